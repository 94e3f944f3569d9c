"""HTTP surface over the services.

ROUTES is the single table every endpoint, permission requirement, help page
key, and capability listing is generated from; the API and its docs cannot
drift apart. Every request except the public routes authenticates via the
X-UUIS-Token header; the session touch (and its idle expiry) happens before
any handler runs. Module errors translate to one stable JSON envelope:
``{"error": {"code", "message", "field"}}``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from datetime import date, datetime
from functools import partial
from typing import Any, Callable

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from starlette.concurrency import run_in_threadpool
from starlette.requests import Request
from starlette.responses import JSONResponse, PlainTextResponse, Response

from ..errors import ERRORS, UuisError
from ..importer import ColumnMapping, parse_rows
from ..model import DeliveryState, Kind
from ..search import SearchRestriction
from ..storage import encode_record
from .help_pages import help_content
from .runtime import Runtime

TOKEN_HEADER = "X-UUIS-Token"
AUDIT_TOKEN_HEADER = "X-UUIS-Audit-Token"

PUBLIC = "public"  # route needs no session at all


@dataclass(frozen=True)
class RouteSpec:
    name: str
    method: str
    path: str
    permission: str | None  # PUBLIC, None (session only), or a catalog name
    page: str
    mutating: bool
    handler: Callable


def to_json(value: Any) -> Any:
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {k: to_json(v) for k, v in encode_record(value).items()
                if k not in ("password_digest", "biometric_digest")}
    if isinstance(value, dict):
        return {k: to_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json(v) for v in value]
    if isinstance(value, (datetime, date)):
        return value.isoformat()
    return value


def _grant_list(raw: Any) -> list[tuple[str, date | None]]:
    grants: list[tuple[str, date | None]] = []
    for item in raw or []:
        if isinstance(item, str):
            grants.append((item, None))
        else:
            due = item.get("due_date")
            grants.append((item["permission"], date.fromisoformat(due) if due else None))
    return grants


# --------------------------------------------------------------------------- handlers

def h_health(rt: Runtime, token, payload, pp, qp):
    return {"status": "ok"}


def h_errors(rt: Runtime, token, payload, pp, qp):
    return [{"code": code, "status": status, "message": message}
            for code, (status, message) in sorted(ERRORS.items())]


def h_help(rt: Runtime, token, payload, pp, qp):
    return help_content(pp.get("page"))


def h_language(rt: Runtime, token, payload, pp, qp):
    return {"languages": ["en"], "active": "en"}


def h_login(rt: Runtime, token, payload, pp, qp):
    sample = payload.get("voice_sample")
    result = rt.sessions.login(
        payload.get("username", ""), payload.get("password", ""),
        voice_sample=sample.encode() if isinstance(sample, str) else sample,
    )
    return {"token": result.token, "role_ids": list(result.role_ids),
            "active_role_id": result.active_role_id, "pending": result.pending}


def h_choose_role(rt: Runtime, token, payload, pp, qp):
    session = rt.sessions.choose_role(token, payload.get("role_id", ""))
    return {"active_role_id": session.active_role_id}


def h_logout(rt: Runtime, token, payload, pp, qp):
    rt.sessions.logout(token)
    return {"message": "Logged out successfully"}


def h_biometric(rt: Runtime, token, payload, pp, qp):
    sample = payload.get("sample", "")
    digest = rt.sessions.enroll_biometric(
        token, sample.encode() if isinstance(sample, str) else sample)
    return {"digest": digest}


def h_capabilities(rt: Runtime, token, payload, pp, qp):
    session = rt.sessions.require(token)
    person = rt.store.get(Kind.PERSON, session.person_id)
    permissions = rt.authz.effective_permissions(person, session.active_role_id)
    routes = [
        {"name": r.name, "method": r.method, "path": r.path}
        for r in ROUTES
        if r.permission in (PUBLIC, None) or r.permission in permissions
    ]
    return {"permissions": sorted(permissions), "routes": routes,
            "person_id": person.id, "level": int(person.level),
            "active_role_id": session.active_role_id}


def h_list(rt: Runtime, token, payload, pp, qp, *, kind: Kind):
    columns = qp.get("columns")
    page = rt.inventory.view_entities(
        token, kind,
        columns=columns.split(",") if columns else None,
        page=int(qp.get("page", 1)), size=int(qp.get("size", 20)),
    )
    return {"rows": page.rows, "total": page.total, "page": page.page,
            "size": page.size, "columns": page.columns}


def h_detail(rt: Runtime, token, payload, pp, qp, *, kind: Kind):
    return rt.inventory.view_detail(token, kind, pp["id"])


def h_create(rt: Runtime, token, payload, pp, qp, *, kind: Kind):
    adder = {
        Kind.ASSET: rt.inventory.add_asset,
        Kind.LICENSE: rt.inventory.add_license,
        Kind.LOCATION: rt.inventory.add_location,
        Kind.FACULTY: rt.inventory.add_faculty,
        Kind.DEPARTMENT: rt.inventory.add_department,
    }[kind]
    return adder(token, payload)


def h_edit(rt: Runtime, token, payload, pp, qp, *, kind: Kind):
    return rt.inventory.edit_entity(token, kind, pp["id"], payload)


def h_delete(rt: Runtime, token, payload, pp, qp, *, kind: Kind):
    return rt.inventory.delete_entities(token, kind, payload.get("ids", []))


def h_assign_assets(rt: Runtime, token, payload, pp, qp, *, to: str):
    return rt.inventory.assign_assets(
        token,
        person_id=payload.get("person_id") if to == "person" else None,
        location_id=payload.get("location_id") if to == "location" else None,
        asset_ids=payload.get("asset_ids"),
        barcode_text=payload.get("barcode_text"),
    )


def h_borrow(rt: Runtime, token, payload, pp, qp, *, kind: Kind):
    return rt.inventory.borrow(token, kind, payload.get("ids", []),
                               payload.get("borrower_id"))


def h_license_to_asset(rt: Runtime, token, payload, pp, qp):
    return rt.inventory.assign_license_to_asset(
        token, payload.get("license_id"), payload.get("asset_id"))


def h_locations_assign(rt: Runtime, token, payload, pp, qp, *, to: str):
    if to == "person":
        return rt.inventory.assign_location_to_person(
            token, payload.get("location_ids", []), payload.get("person_id"))
    return rt.inventory.assign_locations(
        token,
        parent_location_id=payload.get("parent_location_id") if to == "location" else None,
        department_id=payload.get("department_id") if to == "department" else None,
        location_ids=payload.get("location_ids"),
    )


def h_group_create(rt: Runtime, token, payload, pp, qp, *, kind: Kind):
    return rt.inventory.create_group(token, kind, payload.get("master_ids", []),
                                     payload.get("child_ids", []))


def h_types_list(rt: Runtime, token, payload, pp, qp):
    kind = qp.get("kind")
    return rt.inventory.list_types(token, Kind(kind) if kind else None)


def h_type_create(rt: Runtime, token, payload, pp, qp, *, kind: Kind):
    return rt.inventory.create_type(token, kind, payload.get("name", ""),
                                    payload.get("field_set", []))


def h_subgroups_list(rt: Runtime, token, payload, pp, qp):
    return rt.inventory.list_subgroups(token)


def h_subgroup_create(rt: Runtime, token, payload, pp, qp):
    return rt.inventory.create_subgroup(token, payload.get("name", ""),
                                        payload.get("asset_ids", []))


def h_import(rt: Runtime, token, payload, pp, qp, *, kind: Kind):
    rows = parse_rows(payload.get("text", ""), payload.get("format", "csv"),
                      delimiter=payload.get("delimiter", "\t"))
    mapping = ColumnMapping(
        target_kind=kind,
        entries=[(int(i), str(f)) for i, f in payload.get("mapping", [])],
        default_location_id=payload.get("default_location_id"),
    )
    result = rt.importer.commit_import(token, mapping, rows)
    return {
        "inserted_ids": result.inserted_ids,
        "problem_rows": [
            {"row_number": n, "row": raw, "reason": reason}
            for n, raw, reason in result.problem_rows
        ],
        "unmapped_columns": result.unmapped_columns,
        "problem_file": result.problem_file,
    }


def h_requests_list(rt: Runtime, token, payload, pp, qp):
    return rt.workflow.list_requests(token)


def h_request_submit(rt: Runtime, token, payload, pp, qp, *, kind: str):
    return rt.workflow.submit(
        token, kind, payload.get("text", ""),
        barcodes=payload.get("barcodes"),
        target_location_id=payload.get("target_location_id"),
    )


def h_request_decide(rt: Runtime, token, payload, pp, qp):
    return rt.workflow.decide(token, pp["id"], payload.get("verdict", ""),
                              payload.get("reason"))


def h_search_basic(rt: Runtime, token, payload, pp, qp):
    result = rt.search.basic_search(token, payload.get("query", ""))
    return {"groups": result.groups, "total": result.total,
            "found": result.found, "message": result.message}


def h_search_advanced(rt: Runtime, token, payload, pp, qp):
    restriction = None
    raw = payload.get("restriction")
    if raw:
        restriction = SearchRestriction(categories=raw.get("categories", []),
                                        fields=raw.get("fields"))
    result = rt.search.advanced_search(token, payload.get("query", ""), restriction)
    return {"groups": result.groups, "total": result.total,
            "found": result.found, "message": result.message}


def h_report_capacity(rt: Runtime, token, payload, pp, qp):
    rows = rt.reporting.capacity_report(token, qp.get("location_type"),
                                        qp.get("comparison"))
    if qp.get("format") == "csv":
        return PlainTextResponse(
            rt.reporting.report_csv(rows, qp.get("comparison", "counted")),
            media_type="text/csv")
    return [{"location_id": r.location_id, "location_number": r.location_number,
             "capacity": r.capacity, "counted": r.counted, "difference": r.difference}
            for r in rows]


def h_floorplan_list(rt: Runtime, token, payload, pp, qp):
    return rt.reporting.list_plans(token)


def h_floorplan(rt: Runtime, token, payload, pp, qp):
    return rt.reporting.floor_plan(token, pp["id"])


def h_profile(rt: Runtime, token, payload, pp, qp):
    return rt.inventory.my_profile(token)


def h_roles_list(rt: Runtime, token, payload, pp, qp):
    return rt.inventory.list_roles(token)


def h_role_create(rt: Runtime, token, payload, pp, qp):
    role = rt.role_admin.add_role(token, payload.get("name", ""),
                                  _grant_list(payload.get("grants")))
    return {"id": role.id, "name": role.name,
            "permissions": sorted(role.permission_names())}


def h_person_grants(rt: Runtime, token, payload, pp, qp):
    grants = rt.role_admin.edit_role_for_person(
        token, [pp["id"]] if pp.get("id") else payload.get("person_ids", []),
        add=_grant_list(payload.get("add")),
        remove=payload.get("remove", []),
        remove_roles=payload.get("remove_roles", []),
    )
    return {"extra_grants": sorted(
        ({"permission": g.permission,
          "due_date": g.due_date.isoformat() if g.due_date else None} for g in grants),
        key=lambda g: g["permission"])}


def h_assign_role(rt: Runtime, token, payload, pp, qp):
    return rt.role_admin.assign_role_bulk(token, payload.get("person_ids", []),
                                          payload.get("role_id"))


def h_assign_permission(rt: Runtime, token, payload, pp, qp):
    due = payload.get("due_date")
    return rt.role_admin.assign_permission_bulk(
        token, payload.get("person_ids", []), payload.get("permission"),
        date.fromisoformat(due) if due else None)


def h_permissions_list(rt: Runtime, token, payload, pp, qp):
    return sorted(rt.authz.catalog())


def h_permission_add(rt: Runtime, token, payload, pp, qp):
    perm = rt.role_admin.add_permission(token, payload.get("name", ""))
    return {"id": perm.id, "name": perm.name}


def h_permission_edit(rt: Runtime, token, payload, pp, qp):
    perm = rt.role_admin.edit_permission(token, payload.get("old", ""),
                                         payload.get("new", ""))
    return {"id": perm.id, "name": perm.name}


def _audit_filters(qp) -> dict:
    period_from = qp.get("from")
    period_to = qp.get("to")
    persons = qp.get("persons")
    items = qp.get("items")
    return {
        "period": (datetime.fromisoformat(period_from) if period_from else None,
                   datetime.fromisoformat(period_to) if period_to else None),
        "persons": set(persons.split(",")) if persons else None,
        "items": ({tuple(item.split(":", 1)) for item in items.split(",")}
                  if items else None),
    }


def h_audit_login(rt: Runtime, token, payload, pp, qp):
    return {"audit_token": rt.audit.audit_login(token, payload.get("password", ""))}


def h_audit_records(rt: Runtime, token, payload, pp, qp):
    records = rt.audit.query(token, qp.get("audit_token", ""), **_audit_filters(qp))
    return [to_json(r) for r in records]


def h_audit_export(rt: Runtime, token, payload, pp, qp):
    records = rt.audit.query(token, qp.get("audit_token", ""), **_audit_filters(qp))
    return PlainTextResponse(rt.audit.export_csv(records), media_type="text/csv")


def h_outbox_list(rt: Runtime, token, payload, pp, qp):
    state = qp.get("state")
    return rt.outbox.list_messages(token, state=DeliveryState(state) if state else None)


def h_outbox_drain(rt: Runtime, token, payload, pp, qp):
    return rt.outbox.drain(token)


# --------------------------------------------------------------------------- routes

ROUTES: tuple[RouteSpec, ...] = (
    RouteSpec("health", "GET", "/health", PUBLIC, "index", False, h_health),
    RouteSpec("errors", "GET", "/api/errors", PUBLIC, "index", False, h_errors),
    RouteSpec("help_index", "GET", "/api/help", PUBLIC, "index", False, h_help),
    RouteSpec("help", "GET", "/api/help/{page}", PUBLIC, "index", False, h_help),
    RouteSpec("language", "GET", "/api/language", PUBLIC, "language", False, h_language),
    RouteSpec("login", "POST", "/api/session/login", PUBLIC, "session", True, h_login),
    RouteSpec("choose_role", "POST", "/api/session/role", None, "session", True,
              h_choose_role),
    RouteSpec("logout", "POST", "/api/session/logout", None, "session", True, h_logout),
    RouteSpec("biometric", "POST", "/api/session/biometric", "addBiometric", "session",
              True, h_biometric),
    RouteSpec("capabilities", "GET", "/api/capabilities", None, "index", False,
              h_capabilities),

    RouteSpec("assets_list", "GET", "/api/assets", "seeAssets", "assets", False,
              partial(h_list, kind=Kind.ASSET)),
    RouteSpec("assets_detail", "GET", "/api/assets/{id}", "seeAssets", "assets", False,
              partial(h_detail, kind=Kind.ASSET)),
    RouteSpec("assets_create", "POST", "/api/assets", "insertAsset", "assets", True,
              partial(h_create, kind=Kind.ASSET)),
    RouteSpec("assets_edit", "PATCH", "/api/assets/{id}", "editAsset", "assets", True,
              partial(h_edit, kind=Kind.ASSET)),
    RouteSpec("assets_delete", "POST", "/api/assets/delete", "deleteAssets", "assets",
              True, partial(h_delete, kind=Kind.ASSET)),
    RouteSpec("assets_assign_person", "POST", "/api/assets/assign-to-person",
              "assignAssetsToPerson", "assets", True, partial(h_assign_assets, to="person")),
    RouteSpec("assets_assign_location", "POST", "/api/assets/assign-to-location",
              "assignAssetsToLocation", "assets", True,
              partial(h_assign_assets, to="location")),
    RouteSpec("assets_borrow", "POST", "/api/assets/borrow", "borrowAssets", "assets",
              True, partial(h_borrow, kind=Kind.ASSET)),

    RouteSpec("licenses_list", "GET", "/api/licenses", "seeLicenses", "licenses", False,
              partial(h_list, kind=Kind.LICENSE)),
    RouteSpec("licenses_detail", "GET", "/api/licenses/{id}", "seeLicenses", "licenses",
              False, partial(h_detail, kind=Kind.LICENSE)),
    RouteSpec("licenses_create", "POST", "/api/licenses", "insertLicense", "licenses",
              True, partial(h_create, kind=Kind.LICENSE)),
    RouteSpec("licenses_edit", "PATCH", "/api/licenses/{id}", "editLisense", "licenses",
              True, partial(h_edit, kind=Kind.LICENSE)),
    RouteSpec("licenses_delete", "POST", "/api/licenses/delete", "deleteLicenses",
              "licenses", True, partial(h_delete, kind=Kind.LICENSE)),
    RouteSpec("licenses_assign_asset", "POST", "/api/licenses/assign-to-asset",
              "assignLicenceToAsset", "licenses", True, h_license_to_asset),
    RouteSpec("licenses_borrow", "POST", "/api/licenses/borrow", "borrowLicenses",
              "licenses", True, partial(h_borrow, kind=Kind.LICENSE)),

    RouteSpec("locations_list", "GET", "/api/locations", "seeLocations", "locations",
              False, partial(h_list, kind=Kind.LOCATION)),
    RouteSpec("locations_detail", "GET", "/api/locations/{id}", "seeLocations",
              "locations", False, partial(h_detail, kind=Kind.LOCATION)),
    RouteSpec("locations_create", "POST", "/api/locations", "insertLocation",
              "locations", True, partial(h_create, kind=Kind.LOCATION)),
    RouteSpec("locations_edit", "PATCH", "/api/locations/{id}", "editLocation",
              "locations", True, partial(h_edit, kind=Kind.LOCATION)),
    RouteSpec("locations_delete", "POST", "/api/locations/delete", "deleteLocations",
              "locations", True, partial(h_delete, kind=Kind.LOCATION)),
    RouteSpec("locations_assign_location", "POST", "/api/locations/assign-to-location",
              "assignLocationToLocation", "locations", True,
              partial(h_locations_assign, to="location")),
    RouteSpec("locations_assign_department", "POST",
              "/api/locations/assign-to-department", "assignLocationToDepartment",
              "locations", True, partial(h_locations_assign, to="department")),
    RouteSpec("locations_assign_person", "POST", "/api/locations/assign-to-person",
              "assignLocationToPerson", "locations", True,
              partial(h_locations_assign, to="person")),

    RouteSpec("persons_list", "GET", "/api/persons", "seePersons", "persons", False,
              partial(h_list, kind=Kind.PERSON)),
    RouteSpec("persons_detail", "GET", "/api/persons/{id}", "seePersons", "persons",
              False, partial(h_detail, kind=Kind.PERSON)),
    RouteSpec("persons_edit", "PATCH", "/api/persons/{id}", "editPerson", "persons",
              True, partial(h_edit, kind=Kind.PERSON)),
    RouteSpec("persons_delete", "POST", "/api/persons/delete", "deletePersons",
              "persons", True, partial(h_delete, kind=Kind.PERSON)),

    RouteSpec("faculties_list", "GET", "/api/faculties", "seeFacDep", "faculties",
              False, partial(h_list, kind=Kind.FACULTY)),
    RouteSpec("faculties_create", "POST", "/api/faculties", "insertFacDep", "faculties",
              True, partial(h_create, kind=Kind.FACULTY)),
    RouteSpec("faculties_edit", "PATCH", "/api/faculties/{id}", "editFacDep",
              "faculties", True, partial(h_edit, kind=Kind.FACULTY)),
    RouteSpec("departments_list", "GET", "/api/departments", "seeFacDep", "faculties",
              False, partial(h_list, kind=Kind.DEPARTMENT)),
    RouteSpec("departments_create", "POST", "/api/departments", "insertFacDep",
              "faculties", True, partial(h_create, kind=Kind.DEPARTMENT)),
    RouteSpec("departments_edit", "PATCH", "/api/departments/{id}", "editFacDep",
              "faculties", True, partial(h_edit, kind=Kind.DEPARTMENT)),

    RouteSpec("groups_assets", "POST", "/api/groups/assets", "addGroupAsset", "groups",
              True, partial(h_group_create, kind=Kind.ASSET)),
    RouteSpec("groups_locations", "POST", "/api/groups/locations", "addGroupLocation",
              "groups", True, partial(h_group_create, kind=Kind.LOCATION)),

    RouteSpec("types_list", "GET", "/api/types", None, "types", False, h_types_list),
    RouteSpec("types_create_asset", "POST", "/api/types/asset", "addTypeAsset", "types",
              True, partial(h_type_create, kind=Kind.ASSET)),
    RouteSpec("types_create_license", "POST", "/api/types/license", "addTypeLicence",
              "types", True, partial(h_type_create, kind=Kind.LICENSE)),
    RouteSpec("types_create_location", "POST", "/api/types/location", "addTypeLocation",
              "types", True, partial(h_type_create, kind=Kind.LOCATION)),
    RouteSpec("types_create_person", "POST", "/api/types/person", "addTypePerson",
              "types", True, partial(h_type_create, kind=Kind.PERSON)),

    RouteSpec("subgroups_list", "GET", "/api/subgroups", None, "subgroups", False,
              h_subgroups_list),
    RouteSpec("subgroups_create", "POST", "/api/subgroups", "addSubgroupAsset",
              "subgroups", True, h_subgroup_create),

    RouteSpec("import_asset", "POST", "/api/import/asset", "importAsset", "import",
              True, partial(h_import, kind=Kind.ASSET)),
    RouteSpec("import_license", "POST", "/api/import/license", "importLicense",
              "import", True, partial(h_import, kind=Kind.LICENSE)),
    RouteSpec("import_location", "POST", "/api/import/location", "importLocation",
              "import", True, partial(h_import, kind=Kind.LOCATION)),
    RouteSpec("import_person", "POST", "/api/import/person", "importPerson", "import",
              True, partial(h_import, kind=Kind.PERSON)),

    RouteSpec("requests_list", "GET", "/api/requests", None, "requests", False,
              h_requests_list),
    RouteSpec("requests_acquisition", "POST", "/api/requests/acquisition",
              "createAcquisitionRequest", "requests", True,
              partial(h_request_submit, kind="acquisition")),
    RouteSpec("requests_reparation", "POST", "/api/requests/reparation",
              "createReparationRequest", "requests", True,
              partial(h_request_submit, kind="reparation")),
    RouteSpec("requests_elimination", "POST", "/api/requests/elimination",
              "createEliminationRequest", "requests", True,
              partial(h_request_submit, kind="elimination")),
    RouteSpec("requests_move", "POST", "/api/requests/move", "createMoveRequest",
              "requests", True, partial(h_request_submit, kind="move")),
    RouteSpec("requests_decide", "POST", "/api/requests/{id}/decide",
              "aprove_rejectRequest", "requests", True, h_request_decide),

    RouteSpec("search_basic", "POST", "/api/search/basic", "basicSearch", "search",
              False, h_search_basic),
    RouteSpec("search_advanced", "POST", "/api/search/advanced", "advancedSearch",
              "search", False, h_search_advanced),

    RouteSpec("reports_capacity", "GET", "/api/reports/capacity", "create_printReport",
              "reports", False, h_report_capacity),
    RouteSpec("floorplan_list", "GET", "/api/floorplan", "see_printFloorPlan",
              "floorplan", False, h_floorplan_list),
    RouteSpec("floorplan", "GET", "/api/floorplan/{id}", "see_printFloorPlan",
              "floorplan", False, h_floorplan),

    RouteSpec("profile", "GET", "/api/profile", "seeMyProfile", "profile", False,
              h_profile),

    RouteSpec("roles_list", "GET", "/api/roles", None, "admin", False, h_roles_list),
    RouteSpec("roles_create", "POST", "/api/roles", "addRole", "admin", True,
              h_role_create),
    RouteSpec("person_grants", "PATCH", "/api/persons/{id}/grants", "editRole", "admin",
              True, h_person_grants),
    RouteSpec("assign_role", "POST", "/api/persons/assign-role", "assignRoleToPersons",
              "admin", True, h_assign_role),
    RouteSpec("assign_permission", "POST", "/api/persons/assign-permission",
              "assignPermissionToPersons", "admin", True, h_assign_permission),
    RouteSpec("permissions_list", "GET", "/api/permissions", None, "admin", False,
              h_permissions_list),
    RouteSpec("permissions_add", "POST", "/api/permissions", "addPermission", "admin",
              True, h_permission_add),
    RouteSpec("permissions_edit", "PATCH", "/api/permissions", "editPermission",
              "admin", True, h_permission_edit),

    RouteSpec("audit_login", "POST", "/api/audit/login", "seeAudit", "audit", False,
              h_audit_login),
    RouteSpec("audit_records", "GET", "/api/audit/records", "seeAudit", "audit", False,
              h_audit_records),
    RouteSpec("audit_export", "GET", "/api/audit/export", "seeAudit", "audit", False,
              h_audit_export),

    RouteSpec("outbox_list", "GET", "/api/outbox", "seeAudit", "outbox", False,
              h_outbox_list),
    RouteSpec("outbox_drain", "POST", "/api/outbox/drain", "seeAudit", "outbox", True,
              h_outbox_drain),
)


def create_app(runtime: Runtime) -> FastAPI:
    app = FastAPI(title="uuis", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.runtime = runtime
    # the UI may be served from any static host; tokens travel in headers,
    # not cookies, so a permissive CORS policy carries no ambient authority
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=[TOKEN_HEADER, AUDIT_TOKEN_HEADER, "Content-Type"],
    )
    for route in ROUTES:
        app.add_api_route(route.path, _make_endpoint(runtime, route),
                          methods=[route.method], name=route.name)
    return app


def _make_endpoint(runtime: Runtime, route: RouteSpec):
    async def endpoint(request: Request) -> Response:
        token = request.headers.get(TOKEN_HEADER)
        payload: dict[str, Any] = {}
        if route.method in ("POST", "PATCH", "PUT"):
            body = await request.body()
            if body:
                try:
                    import json
                    payload = json.loads(body)
                except ValueError:
                    return _error_response(UuisError("VALIDATION", "body is not valid JSON"))
        query_params = dict(request.query_params)
        audit_token = request.headers.get(AUDIT_TOKEN_HEADER)
        if audit_token:
            query_params["audit_token"] = audit_token
        try:
            result = await run_in_threadpool(
                _dispatch, runtime, route, token, payload,
                dict(request.path_params), query_params)
        except UuisError as exc:
            return _error_response(exc)
        except Exception as exc:  # surface storage/internal failures uniformly
            return _error_response(UuisError("DATABASE_ERROR", str(exc)))
        if isinstance(result, Response):
            return result
        return JSONResponse(to_json(result))

    return endpoint


def _dispatch(runtime: Runtime, route: RouteSpec, token: str | None,
              payload: dict, path_params: dict, query_params: dict) -> Any:
    if route.permission != PUBLIC:
        if not token:
            raise UuisError("UNKNOWN_TOKEN", "missing session token header")
        session = runtime.sessions.require(token)
        if route.permission is not None:
            allowed, reason = runtime.authz.check(session, route.permission)
            if not allowed:
                raise UuisError(reason or "PERMISSION_DENIED")
    return route.handler(runtime, token, payload, path_params, query_params)


def _error_response(exc: UuisError) -> JSONResponse:
    body = {"error": {"code": exc.code, "message": exc.message}}
    if exc.field:
        body["error"]["field"] = exc.field
    return JSONResponse(body, status_code=exc.http_status)
