// User-visible strings for every stable server error code.
// Keep in lockstep with GET /api/errors; the snapshot test enforces it.

export const ERROR_MESSAGES: Record<string, string> = {
  LOGIN_FAILURE: "Login Failure",
  MALFORMED_USERNAME: "Username must be eight characters beginning with a letter",
  BIOMETRIC_MISMATCH: "Voice not recognized, please record again",
  BIOMETRIC_REQUIRED: "A voice sample is required to log in",
  UNKNOWN_TOKEN: "Unknown or terminated session token",
  SESSION_EXPIRED: "Session expired after 30 minutes of inactivity",
  FOREIGN_ROLE: "Selected role does not belong to this account",
  ROLE_ALREADY_CHOSEN: "A role is already active for this session",
  NOT_HIGH_PRIVILEGED: "Only high privileged users record a voice sample",
  ALREADY_ENROLLED: "A voice sample is already on file",
  EMPTY_SAMPLE: "Problems with saving file: sample is empty",
  PERMISSION_DENIED: "You do not have permission to perform this action",
  OUT_OF_SCOPE: "Record is outside your area of visibility",
  NOT_FOUND: "Record not found",
  DATABASE_ERROR: "Database error",
  REF_INTEGRITY: "Referenced record does not exist",
  AUDIT_REQUIRED: "Mutating transaction committed without an audit record",
  AUDIT_IMMUTABLE: "Audit records cannot be changed or removed",
  SCHEMA_VERSION_MISMATCH: "Data directory was created by an incompatible version",
  BARCODE_NOT_UNIQUE: "Barcode is not unique",
  USERNAME_NOT_UNIQUE: "Username is already taken",
  DUPLICATE_NAME: "Name already exists",
  LOCATION_NUMBER_NOT_UNIQUE: "Location number already used under this parent",
  REQUIRED_FIELD_EMPTY: "Required field(s) is (are) empty",
  MISSING_COMPULSORY_FIELD: "Compulsory field(s) for this kind are missing",
  IMMUTABLE_FIELD: "Field cannot be modified",
  UNKNOWN_FIELD: "Unknown field for this record kind",
  UNKNOWN_TYPE: "Unknown type",
  EMPTY_NAME: "Please write a name",
  INVALID_STATUS_TRANSITION: "Status change is not allowed from the current status",
  MISSING_FACULTY: "Record must belong to a faculty",
  VALIDATION: "Invalid record",
  EMPTY_SELECTION: "Please select record(s) first",
  MULTIPLE_MASTERS: "Please select only one master",
  TOO_FEW_CHILDREN: "Please select more than one record to include in the group",
  SELF_CONTAINING_GROUP: "Master cannot be included among the children",
  NO_TARGET: "Please select person/location to which records should be assigned",
  ALREADY_ASSIGNED: "Record is already assigned to another person/location",
  FOREIGN_ITEM: "User doesn't have right to move this asset",
  NO_BORROWER: "Please select person that wants to borrow",
  ITEM_NOT_AVAILABLE: "Item is not available",
  NO_LICENSE_CHOSEN: "Please select license which should be assigned",
  NO_ASSET_CHOSEN: "Please select asset to which license should be assigned",
  SEATS_EXHAUSTED: "No license seats remaining",
  CYCLE_CREATED: "Assignment would make a location its own ancestor",
  EMPTY_GRANTS: "Please select permissions",
  EMPTY_GRANT_LIST: "List of requester's permissions would be empty",
  NO_PERSON_SELECTED: "Please select a record in persons",
  MULTIPLE_PERSONS_SELECTED: "Please select only one record in persons",
  MISSING_ROLE_OR_PERMISSION: "Please select role/permission to assign",
  PERMISSION_IN_USE: "Permission is already granted somewhere and cannot be renamed",
  ALREADY_SEEDED: "Default roles already seeded",
  UNKNOWN_PERMISSION: "Permission is not in the catalog",
  MALFORMED_FORMAT: "Data in textbox is in incorrect format",
  LOCATION_REQUIRED: "Please select location to perform import",
  BAD_MAPPING: "Column mapping is invalid",
  NO_KIND_CHOSEN: "Please select one kind of request",
  EMPTY_TEXT: "Please write the request",
  MISSING_BARCODES: "Please write barcode of item(s)",
  MISSING_LOCATION: "Please select location",
  REASON_REQUIRED: "Please write reason for rejecting the request",
  INSUFFICIENT_LEVEL: "Requests are decided by a level above the requester",
  ALREADY_DECIDED: "Request was already decided",
  EMPTY_QUERY: "Please type a query for search",
  MALFORMED_QUERY: "Incorrect search string (it can't start with AND, OR, etc.)",
  NO_MATCHES: "Search item not found",
  MISSING_TYPE: "Please select type of location",
  MISSING_KIND: "Please select kind of report",
  INVALID_COMBINATION: "This report is not available for the chosen location type",
  NO_LOCATION_CHOSEN: "Please select location",
  NO_PLAN_AVAILABLE: "No plan is available for this location",
  STALE_AUDIT_SESSION: "Audit session expired, please log in to auditing again",
};

export function messageFor(code: string, fallback?: string): string {
  return ERROR_MESSAGES[code] ?? fallback ?? code;
}
