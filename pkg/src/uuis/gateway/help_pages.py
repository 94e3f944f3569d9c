"""Static per-page help content, keyed by the page keys the route table uses."""

from __future__ import annotations

HELP_PAGES: dict[str, dict] = {
    "index": {
        "title": "Help",
        "functions": [
            "Pick a page from the menu; every page carries its own Help link",
            "Your role and level decide which menu entries are available",
        ],
    },
    "session": {
        "title": "Login & sessions",
        "functions": [
            "Log in with your 8-character username and password",
            "Pick a role for the session when you hold more than one",
            "High privileged users confirm identity with a voice sample",
            "Sessions end after 30 minutes without activity, or on Logout",
        ],
    },
    "assets": {
        "title": "Assets",
        "functions": [
            "View the asset table: show/hide columns, change lines per page",
            "Add a new asset of a chosen type; barcode must be unique",
            "Edit a record; delete sets its status to unavailable",
            "Assign assets to a person or location, or lend them out",
        ],
    },
    "licenses": {
        "title": "Licenses",
        "functions": [
            "View, add, and edit licenses with seat counts",
            "Assign a license to an asset while seats remain",
            "Borrowing notifies the borrower through the outbox",
        ],
    },
    "locations": {
        "title": "Locations",
        "functions": [
            "View, add, and edit locations; numbers are unique per parent",
            "Nest locations: a location never becomes its own ancestor",
            "Assign locations to persons or departments",
        ],
    },
    "persons": {
        "title": "Persons",
        "functions": [
            "View person accounts inside your visibility area",
            "Edit person details; deletion disables the account",
            "Accounts arrive through import or seeding",
        ],
    },
    "faculties": {
        "title": "Faculties & departments",
        "functions": [
            "View and add faculties and their departments",
        ],
    },
    "groups": {
        "title": "Groups",
        "functions": [
            "Pick one master and two or more children to form a group",
        ],
    },
    "types": {
        "title": "Types",
        "functions": [
            "Define a new type and the fields its add-form shows",
            "Compulsory fields for the kind must stay required",
        ],
    },
    "subgroups": {
        "title": "Subgroups",
        "functions": [
            "Name a subgroup and pick the assets that belong to it",
        ],
    },
    "import": {
        "title": "Import",
        "functions": [
            "Paste CSV or TXT content and map columns to fields manually",
            "Pick a destination location for asset/license imports",
            "Rows the system cannot place land in a problem file for rework",
        ],
    },
    "requests": {
        "title": "Requests",
        "functions": [
            "Report a problem or bug, make a general request, or move items",
            "Move requests list item barcodes and a destination room",
            "A level above yours approves or rejects; rejections carry a reason",
        ],
    },
    "search": {
        "title": "Search",
        "functions": [
            "Basic search matches a case-insensitive substring everywhere",
            "Advanced search adds AND / OR / NOT and category/field limits",
        ],
    },
    "reports": {
        "title": "Reports",
        "functions": [
            "Compare location capacity with chairs, tables, PCs, or students",
            "Sort by location number and print from the browser",
        ],
    },
    "floorplan": {
        "title": "Floor plan",
        "functions": [
            "Pick a location with a plan, then zoom and hover rooms",
            "Hover shows the room number, type, and assignee",
        ],
    },
    "profile": {
        "title": "My profile",
        "functions": [
            "Lists everything assigned to you and borrowed by you",
            "Shows your roles and effective permissions",
        ],
    },
    "admin": {
        "title": "Administration",
        "functions": [
            "Create roles as packages of permissions",
            "Adjust one person's permission list with optional due dates",
            "Assign roles or permissions to many persons at once",
        ],
    },
    "audit": {
        "title": "Auditing",
        "functions": [
            "Log in once more on the audit page to open an audit session",
            "Filter the trail by period, persons, or items; or view it all",
        ],
    },
    "outbox": {
        "title": "Outbox",
        "functions": [
            "Inspect queued notifications and mark them delivered",
        ],
    },
    "language": {
        "title": "Language",
        "functions": [
            "Version 1 ships English only; the menu lists it alone",
        ],
    },
}


def help_content(page: str | None) -> dict:
    """Help for a page key; unknown keys fall back to the generic index."""
    if page and page in HELP_PAGES:
        return {"page": page, **HELP_PAGES[page]}
    return {"page": "index", **HELP_PAGES["index"]}
