"""Error codes shared by every module and the HTTP gateway.

Each failure carries a machine-stable code from the ERRORS table below; the
gateway translates codes to HTTP statuses and the UI maps codes to its
user-visible strings. Keep the table as the only place codes are declared.
"""

from __future__ import annotations

# code -> (http status, default user-visible message)
ERRORS: dict[str, tuple[int, str]] = {
    # authentication / sessions
    "LOGIN_FAILURE": (401, "Login Failure"),
    "MALFORMED_USERNAME": (400, "Username must be eight characters beginning with a letter"),
    "BIOMETRIC_MISMATCH": (401, "Voice not recognized, please record again"),
    "BIOMETRIC_REQUIRED": (401, "A voice sample is required to log in"),
    "UNKNOWN_TOKEN": (401, "Unknown or terminated session token"),
    "SESSION_EXPIRED": (401, "Session expired after 30 minutes of inactivity"),
    "FOREIGN_ROLE": (400, "Selected role does not belong to this account"),
    "ROLE_ALREADY_CHOSEN": (409, "A role is already active for this session"),
    "NOT_HIGH_PRIVILEGED": (403, "Only high privileged users record a voice sample"),
    "ALREADY_ENROLLED": (409, "A voice sample is already on file"),
    "EMPTY_SAMPLE": (400, "Problems with saving file: sample is empty"),
    # authorization
    "PERMISSION_DENIED": (403, "You do not have permission to perform this action"),
    "OUT_OF_SCOPE": (403, "Record is outside your area of visibility"),
    # storage
    "NOT_FOUND": (404, "Record not found"),
    "DATABASE_ERROR": (500, "Database error"),
    "REF_INTEGRITY": (400, "Referenced record does not exist"),
    "AUDIT_REQUIRED": (500, "Mutating transaction committed without an audit record"),
    "AUDIT_IMMUTABLE": (409, "Audit records cannot be changed or removed"),
    "SCHEMA_VERSION_MISMATCH": (500, "Data directory was created by an incompatible version"),
    # uniqueness
    "BARCODE_NOT_UNIQUE": (409, "Barcode is not unique"),
    "USERNAME_NOT_UNIQUE": (409, "Username is already taken"),
    "DUPLICATE_NAME": (409, "Name already exists"),
    "LOCATION_NUMBER_NOT_UNIQUE": (409, "Location number already used under this parent"),
    # record validation
    "REQUIRED_FIELD_EMPTY": (400, "Required field(s) is (are) empty"),
    "MISSING_COMPULSORY_FIELD": (400, "Compulsory field(s) for this kind are missing"),
    "IMMUTABLE_FIELD": (400, "Field cannot be modified"),
    "UNKNOWN_FIELD": (400, "Unknown field for this record kind"),
    "UNKNOWN_TYPE": (400, "Unknown type"),
    "EMPTY_NAME": (400, "Please write a name"),
    "INVALID_STATUS_TRANSITION": (400, "Status change is not allowed from the current status"),
    "MISSING_FACULTY": (400, "Record must belong to a faculty"),
    "VALIDATION": (400, "Invalid record"),
    # selections / bulk operations
    "EMPTY_SELECTION": (400, "Please select record(s) first"),
    "MULTIPLE_MASTERS": (400, "Please select only one master"),
    "TOO_FEW_CHILDREN": (400, "Please select more than one record to include in the group"),
    "SELF_CONTAINING_GROUP": (400, "Master cannot be included among the children"),
    "NO_TARGET": (400, "Please select person/location to which records should be assigned"),
    "ALREADY_ASSIGNED": (409, "Record is already assigned to another person/location"),
    "FOREIGN_ITEM": (403, "User doesn't have right to move this asset"),
    "NO_BORROWER": (400, "Please select person that wants to borrow"),
    "ITEM_NOT_AVAILABLE": (409, "Item is not available"),
    "NO_LICENSE_CHOSEN": (400, "Please select license which should be assigned"),
    "NO_ASSET_CHOSEN": (400, "Please select asset to which license should be assigned"),
    "SEATS_EXHAUSTED": (409, "No license seats remaining"),
    "CYCLE_CREATED": (400, "Assignment would make a location its own ancestor"),
    # roles / permissions administration
    "EMPTY_GRANTS": (400, "Please select permissions"),
    "EMPTY_GRANT_LIST": (400, "List of requester's permissions would be empty"),
    "NO_PERSON_SELECTED": (400, "Please select a record in persons"),
    "MULTIPLE_PERSONS_SELECTED": (400, "Please select only one record in persons"),
    "MISSING_ROLE_OR_PERMISSION": (400, "Please select role/permission to assign"),
    "PERMISSION_IN_USE": (409, "Permission is already granted somewhere and cannot be renamed"),
    "ALREADY_SEEDED": (409, "Default roles already seeded"),
    "UNKNOWN_PERMISSION": (400, "Permission is not in the catalog"),
    # import
    "MALFORMED_FORMAT": (400, "Data in textbox is in incorrect format"),
    "LOCATION_REQUIRED": (400, "Please select location to perform import"),
    "BAD_MAPPING": (400, "Column mapping is invalid"),
    # requests workflow
    "NO_KIND_CHOSEN": (400, "Please select one kind of request"),
    "EMPTY_TEXT": (400, "Please write the request"),
    "MISSING_BARCODES": (400, "Please write barcode of item(s)"),
    "MISSING_LOCATION": (400, "Please select location"),
    "REASON_REQUIRED": (400, "Please write reason for rejecting the request"),
    "INSUFFICIENT_LEVEL": (403, "Requests are decided by a level above the requester"),
    "ALREADY_DECIDED": (409, "Request was already decided"),
    # search
    "EMPTY_QUERY": (400, "Please type a query for search"),
    "MALFORMED_QUERY": (400, "Incorrect search string (it can't start with AND, OR, etc.)"),
    "NO_MATCHES": (200, "Search item not found"),
    # reports / floor plan
    "MISSING_TYPE": (400, "Please select type of location"),
    "MISSING_KIND": (400, "Please select kind of report"),
    "INVALID_COMBINATION": (400, "This report is not available for the chosen location type"),
    "NO_LOCATION_CHOSEN": (400, "Please select location"),
    "NO_PLAN_AVAILABLE": (404, "No plan is available for this location"),
    # audit
    "STALE_AUDIT_SESSION": (401, "Audit session expired, please log in to auditing again"),
}


class UuisError(Exception):
    """Domain failure with a stable code from the ERRORS table."""

    def __init__(self, code: str, message: str | None = None, *, field: str | None = None):
        if code not in ERRORS:
            raise ValueError(f"unregistered error code: {code}")
        self.code = code
        self.http_status = ERRORS[code][0]
        self.message = message or ERRORS[code][1]
        self.field = field
        super().__init__(f"{code}: {self.message}")


def err(code: str, message: str | None = None, *, field: str | None = None) -> UuisError:
    return UuisError(code, message, field=field)
