"""Domain types shared by every other module.

All records are dataclasses validated at construction time: there is no such
thing as a partially valid record. Soft delete is modelled as the
``unavailable`` status, never as row removal, so identifiers are permanent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime
from enum import Enum, IntEnum
from typing import Any

from .errors import err

EntityId = str


class Level(IntEnum):
    """Visibility/authority tier: user, department, faculty, university."""

    USER = 0
    DEPARTMENT = 1
    FACULTY = 2
    UNIVERSITY = 3


class Status(str, Enum):
    AVAILABLE = "available"
    ASSIGNED = "assigned"
    BORROWED = "borrowed"
    UNAVAILABLE = "unavailable"


# Legal status transitions. ``unavailable`` is terminal for user flows except
# the administrative restore back to available performed through edit.
ALLOWED_STATUS_TRANSITIONS: dict[Status, frozenset[Status]] = {
    Status.AVAILABLE: frozenset({Status.ASSIGNED, Status.BORROWED, Status.UNAVAILABLE}),
    Status.ASSIGNED: frozenset({Status.AVAILABLE, Status.UNAVAILABLE}),
    Status.BORROWED: frozenset({Status.AVAILABLE, Status.UNAVAILABLE}),
    Status.UNAVAILABLE: frozenset({Status.AVAILABLE}),
}


class Kind(str, Enum):
    """Entity families persisted by the repository."""

    ASSET = "asset"
    LICENSE = "license"
    LOCATION = "location"
    PERSON = "person"
    FACULTY = "faculty"
    DEPARTMENT = "department"
    TYPE = "type"
    SUBGROUP = "subgroup"
    ROLE = "role"
    PERMISSION = "permission"
    REQUEST = "request"
    SESSION = "session"
    OUTBOX = "outbox"


# The four importable/searchable inventory categories.
INVENTORY_KINDS = (Kind.ASSET, Kind.LICENSE, Kind.LOCATION, Kind.PERSON)


class RequestKind(str, Enum):
    ACQUISITION = "acquisition"
    REPARATION = "reparation"
    ELIMINATION = "elimination"
    MOVE = "move"


class RequestState(str, Enum):
    PENDING = "pending"
    APPROVED = "approved"
    REJECTED = "rejected"


class DeliveryState(str, Enum):
    QUEUED = "queued"
    DELIVERED = "delivered"
    FAILED = "failed"


def validate_username(candidate: str) -> bool:
    """True iff the login name is exactly 8 characters and starts with a letter."""
    return isinstance(candidate, str) and len(candidate) == 8 and candidate[:1].isalpha()


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise err("VALIDATION", message)


@dataclass(frozen=True)
class PermissionGrant:
    """A single permission held by a role or person.

    ``due_date`` is inclusive at date granularity; None means the grant lives
    until the account itself expires.
    """

    permission: str
    due_date: date | None = None

    def active_on(self, today: date) -> bool:
        return self.due_date is None or today <= self.due_date


@dataclass(frozen=True)
class FieldSpec:
    name: str
    required: bool = False


@dataclass(frozen=True)
class Scope:
    """The (faculty, department) region a level lets a person see and manage.

    Regions nest strictly: department ⊂ faculty ⊂ university. A record owned
    by a broader region than the scope is not visible from inside it.
    """

    level: Level
    faculty_id: EntityId | None = None
    department_id: EntityId | None = None

    def __post_init__(self) -> None:
        if self.level == Level.UNIVERSITY:
            _require(self.faculty_id is None and self.department_id is None,
                     "university scope carries no faculty/department restriction")
        elif self.level == Level.FACULTY:
            _require(self.faculty_id is not None, "faculty scope requires a faculty")
            _require(self.department_id is None, "faculty scope carries no department")
        else:
            _require(self.faculty_id is not None and self.department_id is not None,
                     "department/user scope requires faculty and department")

    def contains(self, faculty_id: EntityId | None, department_id: EntityId | None) -> bool:
        """Whether a record owned by (faculty, department) lies inside this scope."""
        if self.level == Level.UNIVERSITY:
            return True
        if self.level == Level.FACULTY:
            return faculty_id == self.faculty_id
        return faculty_id == self.faculty_id and department_id == self.department_id


@dataclass
class Asset:
    id: EntityId
    type_id: EntityId
    name: str
    serial_number: str
    barcode: str
    purchase_number: str
    request_number: str
    brand: str
    description: str
    status: Status
    created_date: datetime
    faculty_id: EntityId
    subgroup_id: EntityId | None = None
    color: str | None = None
    material: str | None = None
    host_name: str | None = None
    version: str | None = None
    location_id: EntityId | None = None
    assigned_person_id: EntityId | None = None
    assigned_to_location: bool = False
    borrowed_by: EntityId | None = None
    department_id: EntityId | None = None
    group_master_id: EntityId | None = None
    last_assigned_at: datetime | None = None

    def __post_init__(self) -> None:
        _require(bool(self.barcode), "asset barcode is required")
        _require(bool(self.faculty_id), "asset must belong to a faculty")
        if self.assigned_to_location:
            _require(self.location_id is not None, "location assignment without a location")
        has_target = self.assigned_person_id is not None or self.assigned_to_location
        _require((self.status == Status.ASSIGNED) == has_target
                 if self.status != Status.UNAVAILABLE else True,
                 "status=assigned must coincide with an assignment target")
        if self.status == Status.UNAVAILABLE:
            # soft-deleted rows keep no live assignment/borrow links
            _require(self.assigned_person_id is None and not self.assigned_to_location
                     and self.borrowed_by is None,
                     "unavailable asset cannot stay assigned or borrowed")
        _require((self.status == Status.BORROWED) == (self.borrowed_by is not None),
                 "status=borrowed must coincide with a borrower")
        _require(not (self.assigned_person_id and self.borrowed_by),
                 "asset cannot be assigned and borrowed at once")


@dataclass
class License:
    id: EntityId
    name: str
    purchase_number: str
    request_number: str
    type_id: EntityId
    seats: int
    price: int  # minor currency units
    term: str
    company: str
    status: Status
    created_date: datetime
    faculty_id: EntityId
    assigned_asset_ids: set[EntityId] = field(default_factory=set)
    borrowed_by: EntityId | None = None
    department_id: EntityId | None = None

    def __post_init__(self) -> None:
        _require(bool(self.name), "license name is required")
        _require(self.seats >= 0, "seats must be non-negative")
        _require(len(self.assigned_asset_ids) <= self.seats,
                 "assigned assets exceed available seats")
        _require((self.status == Status.BORROWED) == (self.borrowed_by is not None),
                 "status=borrowed must coincide with a borrower")
        if self.status == Status.UNAVAILABLE:
            _require(self.borrowed_by is None, "unavailable license cannot stay borrowed")


@dataclass
class Location:
    id: EntityId
    type_id: EntityId
    description: str
    location_number: str
    key_number: str
    code_number: str
    width: str  # decimal with unit label, e.g. "3.5 m"
    length: str
    status: Status
    created_date: datetime
    capacity: int | None = None
    faculty_id: EntityId | None = None
    department_id: EntityId | None = None
    parent_location_id: EntityId | None = None
    assigned_person_id: EntityId | None = None
    has_plan: bool = False
    group_master_id: EntityId | None = None
    last_assigned_at: datetime | None = None

    def __post_init__(self) -> None:
        _require(bool(self.location_number), "location number is required")
        if self.capacity is not None:
            _require(self.capacity >= 0, "capacity must be non-negative")
        if self.department_id is not None:
            _require(self.faculty_id is not None, "department-owned location needs its faculty")
        if self.status != Status.UNAVAILABLE:
            _require((self.status == Status.ASSIGNED) == (self.assigned_person_id is not None),
                     "status=assigned must coincide with an assigned person")
        else:
            _require(self.assigned_person_id is None,
                     "unavailable location cannot stay assigned")


@dataclass
class Person:
    id: EntityId
    username: str
    password_digest: str
    name: str
    title: str
    contact: str
    level: Level
    status: Status
    faculty_id: EntityId | None = None
    department_id: EntityId | None = None
    role_ids: set[EntityId] = field(default_factory=set)
    extra_grants: set[PermissionGrant] = field(default_factory=set)
    biometric_digest: str | None = None
    high_privileged: bool = False

    def __post_init__(self) -> None:
        if not validate_username(self.username):
            raise err("MALFORMED_USERNAME")
        if self.level == Level.FACULTY:
            _require(self.faculty_id is not None, "level-2 person requires a faculty")
        if self.level <= Level.DEPARTMENT:
            _require(self.faculty_id is not None and self.department_id is not None,
                     "level 0/1 person requires faculty and department")

    def scope(self) -> Scope:
        if self.level == Level.UNIVERSITY:
            return Scope(Level.UNIVERSITY)
        if self.level == Level.FACULTY:
            return Scope(Level.FACULTY, faculty_id=self.faculty_id)
        return Scope(self.level, faculty_id=self.faculty_id, department_id=self.department_id)


@dataclass
class Faculty:
    id: EntityId
    name: str
    type: str
    building: str
    created_date: datetime

    def __post_init__(self) -> None:
        _require(bool(self.name), "faculty name is required")


@dataclass
class Department:
    id: EntityId
    name: str
    type: str
    building: str
    created_date: datetime
    faculty_id: EntityId

    def __post_init__(self) -> None:
        _require(bool(self.name), "department name is required")
        _require(bool(self.faculty_id), "department always belongs to exactly one faculty")


@dataclass
class EntityType:
    id: EntityId
    kind: Kind
    name: str
    field_set: tuple[FieldSpec, ...]

    def __post_init__(self) -> None:
        _require(bool(self.name), "type name is required")
        _require(len(self.field_set) > 0, "field set must be non-empty")
        _require(self.kind in INVENTORY_KINDS, "types exist for asset/license/location/person")

    def required_fields(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.field_set if f.required)


@dataclass
class Subgroup:
    id: EntityId
    name: str
    member_asset_ids: set[EntityId] = field(default_factory=set)

    def __post_init__(self) -> None:
        _require(bool(self.name), "subgroup name is required")


@dataclass
class Role:
    id: EntityId
    name: str
    grants: set[PermissionGrant] = field(default_factory=set)

    def __post_init__(self) -> None:
        _require(bool(self.name), "role name is required")
        _require(len(self.grants) > 0, "role grants must be non-empty")

    def permission_names(self) -> set[str]:
        return {g.permission for g in self.grants}


@dataclass
class PermissionDef:
    """Catalog membership row; the catalog itself lives in authz."""

    id: EntityId
    name: str

    def __post_init__(self) -> None:
        _require(bool(self.name), "permission name is required")


@dataclass
class Request:
    id: EntityId
    kind: RequestKind
    text: str
    requester_id: EntityId
    requester_level: Level
    state: RequestState
    created_at: datetime
    item_barcodes: tuple[str, ...] = ()
    target_location_id: EntityId | None = None
    decided_by: EntityId | None = None
    rejection_reason: str | None = None
    decided_at: datetime | None = None

    def __post_init__(self) -> None:
        if self.state == RequestState.REJECTED:
            _require(bool(self.rejection_reason), "rejection requires a reason")
        if self.kind == RequestKind.MOVE:
            _require(len(self.item_barcodes) > 0, "move request requires barcodes")
            _require(self.target_location_id is not None, "move request requires a location")


@dataclass
class AuditRecord:
    sequence_number: int
    timestamp: datetime
    actor_id: EntityId
    action: str
    entity_refs: tuple[tuple[str, EntityId], ...]
    details: str


@dataclass
class Session:
    token: str
    person_id: EntityId
    created_at: datetime
    last_activity: datetime
    active_role_id: EntityId | None = None
    pending_role_ids: tuple[EntityId, ...] = ()

    @property
    def id(self) -> str:  # sessions are stored keyed by token
        return self.token


@dataclass
class OutboxMessage:
    id: EntityId
    recipient_id: EntityId
    subject: str
    body: str
    created_at: datetime
    delivery_state: DeliveryState = DeliveryState.QUEUED


# --------------------------------------------------------------------------
# Per-kind metadata used by storage, inventory, importer and search.
# --------------------------------------------------------------------------

RECORD_TYPES: dict[Kind, type] = {
    Kind.ASSET: Asset,
    Kind.LICENSE: License,
    Kind.LOCATION: Location,
    Kind.PERSON: Person,
    Kind.FACULTY: Faculty,
    Kind.DEPARTMENT: Department,
    Kind.TYPE: EntityType,
    Kind.SUBGROUP: Subgroup,
    Kind.ROLE: Role,
    Kind.PERMISSION: PermissionDef,
    Kind.REQUEST: Request,
    Kind.SESSION: Session,
    Kind.OUTBOX: OutboxMessage,
}

ID_PREFIX: dict[Kind, str] = {
    Kind.ASSET: "ast",
    Kind.LICENSE: "lic",
    Kind.LOCATION: "loc",
    Kind.PERSON: "per",
    Kind.FACULTY: "fac",
    Kind.DEPARTMENT: "dep",
    Kind.TYPE: "typ",
    Kind.SUBGROUP: "sub",
    Kind.ROLE: "rol",
    Kind.PERMISSION: "prm",
    Kind.REQUEST: "req",
    Kind.OUTBOX: "out",
}

# field name -> referenced kind; set-valued fields hold sets of such ids
REF_FIELDS: dict[Kind, dict[str, Kind]] = {
    Kind.ASSET: {
        "type_id": Kind.TYPE, "subgroup_id": Kind.SUBGROUP, "location_id": Kind.LOCATION,
        "assigned_person_id": Kind.PERSON, "borrowed_by": Kind.PERSON,
        "faculty_id": Kind.FACULTY, "department_id": Kind.DEPARTMENT,
        "group_master_id": Kind.ASSET,
    },
    Kind.LICENSE: {
        "type_id": Kind.TYPE, "assigned_asset_ids": Kind.ASSET, "borrowed_by": Kind.PERSON,
        "faculty_id": Kind.FACULTY, "department_id": Kind.DEPARTMENT,
    },
    Kind.LOCATION: {
        "type_id": Kind.TYPE, "parent_location_id": Kind.LOCATION,
        "assigned_person_id": Kind.PERSON, "faculty_id": Kind.FACULTY,
        "department_id": Kind.DEPARTMENT, "group_master_id": Kind.LOCATION,
    },
    Kind.PERSON: {
        "faculty_id": Kind.FACULTY, "department_id": Kind.DEPARTMENT, "role_ids": Kind.ROLE,
    },
    Kind.FACULTY: {},
    Kind.DEPARTMENT: {"faculty_id": Kind.FACULTY},
    Kind.TYPE: {},
    Kind.SUBGROUP: {"member_asset_ids": Kind.ASSET},
    Kind.ROLE: {},
    Kind.PERMISSION: {},
    Kind.REQUEST: {
        "requester_id": Kind.PERSON, "target_location_id": Kind.LOCATION,
        "decided_by": Kind.PERSON,
    },
    Kind.SESSION: {"person_id": Kind.PERSON, "active_role_id": Kind.ROLE},
    Kind.OUTBOX: {"recipient_id": Kind.PERSON},
}

# user-settable fields per inventory kind: what imports may map and types may list
FIELD_UNIVERSE: dict[Kind, tuple[str, ...]] = {
    Kind.ASSET: ("name", "subgroup", "serial_number", "barcode", "purchase_number",
                 "request_number", "color", "material", "host_name", "brand", "version",
                 "description", "status", "type", "faculty", "department", "location"),
    Kind.LICENSE: ("name", "purchase_number", "request_number", "type", "seats", "price",
                   "term", "company", "status", "faculty", "department"),
    Kind.LOCATION: ("type", "capacity", "description", "location_number", "key_number",
                    "code_number", "width", "length", "faculty", "department",
                    "parent_location", "status", "has_plan"),
    Kind.PERSON: ("username", "password", "name", "title", "contact", "level", "faculty",
                  "department", "high_privileged", "status"),
}

# fields every type of the kind must keep marked required
COMPULSORY_FIELDS: dict[Kind, frozenset[str]] = {
    Kind.ASSET: frozenset({"name", "barcode"}),
    Kind.LICENSE: frozenset({"name"}),
    Kind.LOCATION: frozenset({"location_number"}),
    Kind.PERSON: frozenset({"username"}),
}


def region_of(kind: Kind, record: Any) -> tuple[EntityId | None, EntityId | None]:
    """The (faculty, department) region owning a record, for scope checks.

    Faculties own their own region; departments own theirs; records without a
    faculty belong to the university region and are visible only at level 3.
    """
    if kind == Kind.FACULTY:
        return record.id, None
    if kind == Kind.DEPARTMENT:
        return record.faculty_id, record.id
    return getattr(record, "faculty_id", None), getattr(record, "department_id", None)
