"""CRUD and assignment flows over the inventory families.

Soft delete only: records never leave the store, their status flips to
``unavailable``. Bulk operations are per-item independent: one bad item lands
in the outcome list, the rest proceed. Every successful mutation appends its
audit record inside the same transaction.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Callable

from .authz import Authz
from .errors import err
from .model import (
    ALLOWED_STATUS_TRANSITIONS,
    COMPULSORY_FIELDS,
    FIELD_UNIVERSE,
    Asset,
    Department,
    DeliveryState,
    EntityType,
    Faculty,
    FieldSpec,
    Kind,
    License,
    Location,
    OutboxMessage,
    Person,
    RECORD_TYPES,
    Status,
    Subgroup,
    region_of,
)
from .sessions import SessionService, hash_password
from .storage import Store, Txn, decode_record, encode_record

SEE_PERMISSION = {
    Kind.ASSET: "seeAssets", Kind.LICENSE: "seeLicenses", Kind.LOCATION: "seeLocations",
    Kind.PERSON: "seePersons", Kind.FACULTY: "seeFacDep", Kind.DEPARTMENT: "seeFacDep",
}
INSERT_PERMISSION = {
    Kind.ASSET: "insertAsset", Kind.LICENSE: "insertLicense", Kind.LOCATION: "insertLocation",
    Kind.FACULTY: "insertFacDep", Kind.DEPARTMENT: "insertFacDep",
}
EDIT_PERMISSION = {
    Kind.ASSET: "editAsset", Kind.LICENSE: "editLisense", Kind.LOCATION: "editLocation",
    Kind.PERSON: "editPerson", Kind.FACULTY: "editFacDep", Kind.DEPARTMENT: "editFacDep",
}
DELETE_PERMISSION = {
    Kind.ASSET: "deleteAssets", Kind.LICENSE: "deleteLicenses",
    Kind.LOCATION: "deleteLocations", Kind.PERSON: "deletePersons",
}
ADD_TYPE_PERMISSION = {
    Kind.ASSET: "addTypeAsset", Kind.LICENSE: "addTypeLicence",
    Kind.LOCATION: "addTypeLocation", Kind.PERSON: "addTypePerson",
}
GROUP_PERMISSION = {Kind.ASSET: "addGroupAsset", Kind.LOCATION: "addGroupLocation"}

EDITABLE_FIELDS: dict[Kind, frozenset[str]] = {
    Kind.ASSET: frozenset({
        "name", "serial_number", "barcode", "purchase_number", "request_number", "brand",
        "description", "color", "material", "host_name", "version", "status", "type_id",
        "subgroup_id", "location_id", "assigned_person_id", "assigned_to_location",
        "borrowed_by", "faculty_id", "department_id",
    }),
    Kind.LICENSE: frozenset({
        "name", "purchase_number", "request_number", "type_id", "seats", "price", "term",
        "company", "status", "borrowed_by", "faculty_id", "department_id",
    }),
    Kind.LOCATION: frozenset({
        "type_id", "capacity", "description", "location_number", "key_number", "code_number",
        "width", "length", "status", "faculty_id", "department_id", "parent_location_id",
        "assigned_person_id", "has_plan",
    }),
    Kind.PERSON: frozenset({
        "username", "name", "title", "contact", "level", "faculty_id", "department_id",
        "high_privileged", "status", "password",
    }),
    Kind.FACULTY: frozenset({"name", "type", "building"}),
    Kind.DEPARTMENT: frozenset({"name", "type", "building", "faculty_id"}),
}

_BARCODE_SPLIT = re.compile(r"[\n,]+")


def parse_barcode_text(text: str) -> list[str]:
    """Pasted/scanned barcode input: one per line or comma-separated."""
    return [tok.strip() for tok in _BARCODE_SPLIT.split(text) if tok.strip()]


@dataclass
class ItemOutcome:
    id: str
    ok: bool
    error_code: str | None = None


@dataclass
class TablePage:
    rows: list[dict[str, Any]]
    total: int
    page: int
    size: int
    columns: list[str]


class InventoryService:
    def __init__(self, store: Store, sessions: SessionService, authz: Authz,
                 clock: Callable[[], datetime] | None = None):
        self.store = store
        self.sessions = sessions
        self.authz = authz
        self.clock = clock or store.clock

    # ------------------------------------------------------------------ adds

    def add_asset(self, token: str, fields: dict[str, Any]) -> Asset:
        session = self.sessions.require(token)
        actor = self.authz.require(session, INSERT_PERMISSION[Kind.ASSET])
        etype = self._resolve_type(Kind.ASSET, fields)
        faculty_id, department_id = self._owner_region(actor, fields)
        status = self._status_from(fields)
        record = Asset(
            id="",  # allocated in the txn
            type_id=etype.id,
            name=fields.get("name", ""),
            serial_number=fields.get("serial_number", ""),
            barcode=fields.get("barcode", ""),
            purchase_number=fields.get("purchase_number", ""),
            request_number=fields.get("request_number", ""),
            brand=fields.get("brand", ""),
            description=fields.get("description", ""),
            status=status,
            created_date=self.clock(),
            faculty_id=faculty_id,
            department_id=department_id,
            subgroup_id=fields.get("subgroup_id"),
            color=fields.get("color"),
            material=fields.get("material"),
            host_name=fields.get("host_name"),
            version=fields.get("version"),
            location_id=fields.get("location_id"),
        )
        self._check_required(etype, fields)
        return self._insert(Kind.ASSET, record, actor.id, "asset.add")

    def add_license(self, token: str, fields: dict[str, Any]) -> License:
        session = self.sessions.require(token)
        actor = self.authz.require(session, INSERT_PERMISSION[Kind.LICENSE])
        etype = self._resolve_type(Kind.LICENSE, fields)
        faculty_id, department_id = self._owner_region(actor, fields)
        record = License(
            id="",
            name=fields.get("name", ""),
            purchase_number=fields.get("purchase_number", ""),
            request_number=fields.get("request_number", ""),
            type_id=etype.id,
            seats=int(fields.get("seats", 0)),
            price=int(fields.get("price", 0)),
            term=fields.get("term", ""),
            company=fields.get("company", ""),
            status=self._status_from(fields),
            created_date=self.clock(),
            faculty_id=faculty_id,
            department_id=department_id,
        )
        self._check_required(etype, fields)
        return self._insert(Kind.LICENSE, record, actor.id, "license.add")

    def add_location(self, token: str, fields: dict[str, Any]) -> Location:
        session = self.sessions.require(token)
        actor = self.authz.require(session, INSERT_PERMISSION[Kind.LOCATION])
        etype = self._resolve_type(Kind.LOCATION, fields)
        faculty_id = fields.get("faculty_id")
        department_id = fields.get("department_id")
        if department_id and not faculty_id:
            faculty_id = self.store.get(Kind.DEPARTMENT, department_id).faculty_id
        if (faculty_id or department_id) and not actor.scope().contains(faculty_id, department_id):
            raise err("OUT_OF_SCOPE")
        capacity = fields.get("capacity")
        record = Location(
            id="",
            type_id=etype.id,
            description=fields.get("description", ""),
            location_number=fields.get("location_number", ""),
            key_number=fields.get("key_number", ""),
            code_number=fields.get("code_number", ""),
            width=fields.get("width", ""),
            length=fields.get("length", ""),
            status=self._status_from(fields),
            created_date=self.clock(),
            capacity=int(capacity) if capacity not in (None, "") else None,
            faculty_id=faculty_id,
            department_id=department_id,
            parent_location_id=fields.get("parent_location_id"),
            has_plan=bool(fields.get("has_plan", False)),
        )
        self._check_required(etype, fields)
        return self._insert(Kind.LOCATION, record, actor.id, "location.add")

    def add_faculty(self, token: str, fields: dict[str, Any]) -> Faculty:
        session = self.sessions.require(token)
        actor = self.authz.require(session, INSERT_PERMISSION[Kind.FACULTY])
        if not fields.get("name"):
            raise err("REQUIRED_FIELD_EMPTY", field="name")
        record = Faculty(id="", name=fields["name"], type=fields.get("type", ""),
                         building=fields.get("building", ""), created_date=self.clock())
        return self._insert(Kind.FACULTY, record, actor.id, "faculty.add")

    def add_department(self, token: str, fields: dict[str, Any]) -> Department:
        session = self.sessions.require(token)
        actor = self.authz.require(session, INSERT_PERMISSION[Kind.DEPARTMENT])
        if not fields.get("name"):
            raise err("REQUIRED_FIELD_EMPTY", field="name")
        if not fields.get("faculty_id"):
            raise err("REQUIRED_FIELD_EMPTY", field="faculty_id")
        record = Department(id="", name=fields["name"], type=fields.get("type", ""),
                            building=fields.get("building", ""), created_date=self.clock(),
                            faculty_id=fields["faculty_id"])
        return self._insert(Kind.DEPARTMENT, record, actor.id, "department.add")

    def _insert(self, kind: Kind, record: Any, actor_id: str, action: str) -> Any:
        with self.store.txn() as txn:
            record.id = txn.new_id(kind)
            txn.put(kind, record)
            txn.append_audit(actor_id, action, ((kind.value, record.id),),
                             getattr(record, "name", ""))
        return record

    # ------------------------------------------------------------------ views

    def view_entities(self, token: str, kind: Kind, *, columns: list[str] | None = None,
                      page: int = 1, size: int = 20) -> TablePage:
        session = self.sessions.require(token)
        actor = self.authz.require(session, SEE_PERMISSION[kind])
        visible = self._visible_records(actor, session, kind)
        start = max(page - 1, 0) * size
        window = visible[start:start + size]
        all_columns = [f.name for f in dataclasses.fields(RECORD_TYPES[kind])
                       if f.name not in ("password_digest", "biometric_digest")]
        rows = [self._project(kind, r, columns) for r in window]
        with self.store.txn() as txn:
            txn.append_audit(actor.id, f"{kind.value}.view", (),
                             f"page {page} size {size}")
        return TablePage(rows=rows, total=len(visible), page=page, size=size,
                         columns=columns or all_columns)

    def view_detail(self, token: str, kind: Kind, record_id: str) -> dict[str, Any]:
        session = self.sessions.require(token)
        actor = self.authz.require(session, SEE_PERMISSION[kind])
        record = self.store.get(kind, record_id)
        if not actor.scope().contains(*region_of(kind, record)):
            raise err("OUT_OF_SCOPE")
        if getattr(record, "status", None) == Status.UNAVAILABLE \
                and not self._sees_deleted(session, kind):
            raise err("NOT_FOUND")
        with self.store.txn() as txn:
            txn.append_audit(actor.id, f"{kind.value}.view", ((kind.value, record_id),), "")
        return self._project(kind, record, None)

    def _visible_records(self, actor: Person, session, kind: Kind) -> list[Any]:
        scope = actor.scope()
        include_deleted = self._sees_deleted(session, kind)

        def visible(record: Any) -> bool:
            if not scope.contains(*region_of(kind, record)):
                return False
            status = getattr(record, "status", None)
            if status == Status.UNAVAILABLE and not include_deleted:
                return False
            return True

        return self.store.scan(kind, visible)

    def _sees_deleted(self, session, kind: Kind) -> bool:
        delete_permission = DELETE_PERMISSION.get(kind)
        if delete_permission is None:
            return False
        allowed, _ = self.authz.check(session, delete_permission)
        return allowed

    def _project(self, kind: Kind, record: Any, columns: list[str] | None) -> dict[str, Any]:
        doc = encode_record(record)
        doc.pop("password_digest", None)
        doc.pop("biometric_digest", None)
        if columns is None:
            return doc
        keep = set(columns) | {"id"}
        return {k: v for k, v in doc.items() if k in keep}

    # ------------------------------------------------------------------ edit

    def edit_entity(self, token: str, kind: Kind, record_id: str,
                    changes: dict[str, Any]) -> Any:
        session = self.sessions.require(token)
        actor = self.authz.require(session, EDIT_PERMISSION[kind])
        editable = EDITABLE_FIELDS[kind]
        for field_name in changes:
            if field_name in ("id", "created_date"):
                raise err("IMMUTABLE_FIELD", field=field_name)
            if field_name not in editable:
                raise err("UNKNOWN_FIELD", field=field_name)
        with self.store.txn() as txn:
            record = txn.get(kind, record_id)
            if not actor.scope().contains(*region_of(kind, record)):
                raise err("OUT_OF_SCOPE")
            doc = encode_record(record)
            changes = dict(changes)
            if kind == Kind.PERSON and "password" in changes:
                doc["password_digest"] = hash_password(str(changes.pop("password")))
            old_status = getattr(record, "status", None)
            doc.update(changes)
            if "status" in changes and old_status is not None:
                new_status = Status(changes["status"])
                if new_status != old_status \
                        and new_status not in ALLOWED_STATUS_TRANSITIONS[old_status]:
                    raise err("INVALID_STATUS_TRANSITION",
                              f"{old_status.value} -> {new_status.value} is not allowed")
                if new_status in (Status.AVAILABLE, Status.UNAVAILABLE):
                    # returning/unassigning/restoring clears live links
                    for live_link in ("assigned_person_id", "borrowed_by"):
                        if live_link in doc and live_link not in changes:
                            doc[live_link] = None
                    if "assigned_to_location" in doc \
                            and "assigned_to_location" not in changes:
                        doc["assigned_to_location"] = False
            self._check_required_on_edit(kind, doc)
            try:
                updated = decode_record(type(record), doc)
            except Exception as exc:
                from .errors import UuisError
                if isinstance(exc, UuisError):
                    raise
                raise err("VALIDATION", str(exc))
            txn.put(kind, updated)
            txn.append_audit(actor.id, f"{kind.value}.edit", ((kind.value, record_id),),
                             f"fields {sorted(changes)}")
        return updated

    def _check_required_on_edit(self, kind: Kind, doc: dict[str, Any]) -> None:
        type_id = doc.get("type_id")
        if not type_id:
            return
        etype = self.store.get(Kind.TYPE, type_id)
        for name in etype.required_fields():
            mapped = _type_field_to_attr(name)
            if mapped in doc and doc[mapped] in ("", None):
                raise err("REQUIRED_FIELD_EMPTY", field=name)

    # ------------------------------------------------------------------ delete

    def delete_entities(self, token: str, kind: Kind, ids: list[str]) -> list[ItemOutcome]:
        session = self.sessions.require(token)
        if kind not in DELETE_PERMISSION:
            raise err("UNKNOWN_FIELD", f"{kind.value} records cannot be deleted")
        actor = self.authz.require(session, DELETE_PERMISSION[kind])
        if not ids:
            raise err("EMPTY_SELECTION", "Please select records to delete")
        outcomes: list[ItemOutcome] = []
        scope = actor.scope()
        with self.store.txn() as txn:
            for record_id in ids:
                try:
                    record = txn.get(kind, record_id)
                except Exception:
                    outcomes.append(ItemOutcome(record_id, False, "NOT_FOUND"))
                    continue
                if not scope.contains(*region_of(kind, record)):
                    outcomes.append(ItemOutcome(record_id, False, "OUT_OF_SCOPE"))
                    continue
                if record.status == Status.UNAVAILABLE:
                    outcomes.append(ItemOutcome(record_id, False, "INVALID_STATUS_TRANSITION"))
                    continue
                record.status = Status.UNAVAILABLE
                for live_link in ("assigned_person_id", "borrowed_by"):
                    if hasattr(record, live_link):
                        setattr(record, live_link, None)
                if hasattr(record, "assigned_to_location"):
                    record.assigned_to_location = False
                txn.put(kind, record)
                txn.append_audit(actor.id, f"{kind.value}.delete", ((kind.value, record_id),),
                                 "status set to unavailable, record retained")
                outcomes.append(ItemOutcome(record_id, True))
        return outcomes

    # ------------------------------------------------------------------ groups

    def create_group(self, token: str, kind: Kind, master_ids: list[str],
                     child_ids: list[str]) -> dict[str, Any]:
        session = self.sessions.require(token)
        if kind not in GROUP_PERMISSION:
            raise err("UNKNOWN_FIELD", f"groups exist for assets and locations only")
        actor = self.authz.require(session, GROUP_PERMISSION[kind])
        if len(master_ids) == 0:
            raise err("EMPTY_SELECTION", "Please select a master")
        if len(master_ids) > 1:
            raise err("MULTIPLE_MASTERS")
        if len(child_ids) < 2:
            raise err("TOO_FEW_CHILDREN")
        master_id = master_ids[0]
        if master_id in child_ids:
            raise err("SELF_CONTAINING_GROUP")
        scope = actor.scope()
        with self.store.txn() as txn:
            master = txn.get(kind, master_id)
            if not scope.contains(*region_of(kind, master)):
                raise err("OUT_OF_SCOPE")
            # reject chains that would loop back through the master's own chain
            seen = {master_id}
            cursor = master.group_master_id
            while cursor is not None:
                if cursor in child_ids or cursor in seen:
                    raise err("SELF_CONTAINING_GROUP")
                seen.add(cursor)
                cursor = txn.get(kind, cursor).group_master_id
            children = []
            for child_id in child_ids:
                child = txn.get(kind, child_id)
                if not scope.contains(*region_of(kind, child)):
                    raise err("OUT_OF_SCOPE")
                children.append(child)
            for child in children:
                child.group_master_id = master_id
                txn.put(kind, child)
            refs = ((kind.value, master_id),) + tuple((kind.value, c.id) for c in children)
            txn.append_audit(actor.id, "group.create", refs, f"{kind.value} group")
        return {"kind": kind.value, "master_id": master_id, "child_ids": child_ids}

    # ------------------------------------------------------------------ types

    def create_type(self, token: str, kind: Kind, name: str,
                    field_set: list[tuple[str, bool]] | list[dict[str, Any]]) -> EntityType:
        session = self.sessions.require(token)
        if kind not in ADD_TYPE_PERMISSION:
            raise err("UNKNOWN_TYPE", f"types exist for inventory kinds only")
        actor = self.authz.require(session, ADD_TYPE_PERMISSION[kind])
        if not name:
            raise err("EMPTY_NAME", "Please write name of type")
        specs = tuple(
            FieldSpec(f["name"], bool(f.get("required", False))) if isinstance(f, dict)
            else FieldSpec(f[0], bool(f[1]))
            for f in field_set
        )
        if not specs:
            raise err("MISSING_COMPULSORY_FIELD")
        universe = set(FIELD_UNIVERSE[kind])
        for spec in specs:
            if spec.name not in universe:
                raise err("UNKNOWN_FIELD", field=spec.name)
        required = {s.name for s in specs if s.required}
        if not COMPULSORY_FIELDS[kind] <= required:
            missing = sorted(COMPULSORY_FIELDS[kind] - required)
            raise err("MISSING_COMPULSORY_FIELD", f"compulsory field(s) {missing} must be required")
        record = EntityType(id="", kind=kind, name=name, field_set=specs)
        return self._insert(Kind.TYPE, record, actor.id, "type.create")

    def list_types(self, token: str, kind: Kind | None = None) -> list[EntityType]:
        self.sessions.require(token)
        return self.store.scan(Kind.TYPE, (lambda t: t.kind == kind) if kind else None)

    # ------------------------------------------------------------------ subgroups

    def create_subgroup(self, token: str, name: str, asset_ids: list[str]) -> Subgroup:
        session = self.sessions.require(token)
        actor = self.authz.require(session, "addSubgroupAsset")
        if not name:
            raise err("EMPTY_NAME", "Please write name of subgroup")
        if not asset_ids:
            raise err("EMPTY_SELECTION", "Please select records for the subgroup")
        scope = actor.scope()
        with self.store.txn() as txn:
            assets = []
            for asset_id in asset_ids:
                asset = txn.get(Kind.ASSET, asset_id)
                if not scope.contains(asset.faculty_id, asset.department_id):
                    raise err("OUT_OF_SCOPE")
                assets.append(asset)
            subgroup = Subgroup(id=txn.new_id(Kind.SUBGROUP), name=name,
                                member_asset_ids=set(asset_ids))
            txn.put(Kind.SUBGROUP, subgroup)
            for asset in assets:
                asset.subgroup_id = subgroup.id
                txn.put(Kind.ASSET, asset)
            txn.append_audit(actor.id, "subgroup.create", (("subgroup", subgroup.id),), name)
        return subgroup

    def list_subgroups(self, token: str) -> list[Subgroup]:
        self.sessions.require(token)
        return self.store.scan(Kind.SUBGROUP)

    # ------------------------------------------------------------------ assignment

    def assign_assets(self, token: str, *, person_id: str | None = None,
                      location_id: str | None = None,
                      asset_ids: list[str] | None = None,
                      barcode_text: str | None = None) -> list[ItemOutcome]:
        session = self.sessions.require(token)
        if (person_id is None) == (location_id is None):
            raise err("NO_TARGET")
        permission = "assignAssetsToPerson" if person_id else "assignAssetsToLocation"
        actor = self.authz.require(session, permission)
        scope = actor.scope()
        items, unknown = self._resolve_assets(asset_ids, barcode_text)
        if not items and not unknown:
            raise err("EMPTY_SELECTION", "Please select records in assets")
        target_kind = Kind.PERSON if person_id else Kind.LOCATION
        target = self.store.get(target_kind, person_id or location_id)
        if not scope.contains(*region_of(target_kind, target)):
            raise err("OUT_OF_SCOPE", "Target is outside your area of visibility")
        outcomes: list[ItemOutcome] = [ItemOutcome(bad, False, "NOT_FOUND") for bad in unknown]
        now = self.clock()
        action = "asset.assign_person" if person_id else "asset.assign_location"
        with self.store.txn() as txn:
            for stale in items:
                # re-read inside the txn: a concurrent assign/borrow must lose here
                asset = txn.get(Kind.ASSET, stale.id)
                if not scope.contains(asset.faculty_id, asset.department_id):
                    outcomes.append(ItemOutcome(asset.id, False, "FOREIGN_ITEM"))
                    continue
                if asset.status == Status.ASSIGNED:
                    outcomes.append(ItemOutcome(asset.id, False, "ALREADY_ASSIGNED"))
                    continue
                if asset.status != Status.AVAILABLE:
                    outcomes.append(ItemOutcome(asset.id, False, "ITEM_NOT_AVAILABLE"))
                    continue
                if person_id:
                    asset.assigned_person_id = person_id
                else:
                    asset.location_id = location_id
                    asset.assigned_to_location = True
                asset.status = Status.ASSIGNED
                asset.last_assigned_at = now
                txn.put(Kind.ASSET, asset)
                txn.append_audit(actor.id, action,
                                 (("asset", asset.id), (target_kind.value, target.id)), "")
                outcomes.append(ItemOutcome(asset.id, True))
        return outcomes

    def _resolve_assets(self, asset_ids: list[str] | None,
                        barcode_text: str | None) -> tuple[list[Asset], list[str]]:
        items: list[Asset] = []
        unknown: list[str] = []
        for asset_id in asset_ids or []:
            try:
                items.append(self.store.get(Kind.ASSET, asset_id))
            except Exception:
                unknown.append(asset_id)
        if barcode_text:
            by_barcode = {a.barcode: a for a in self.store.scan(Kind.ASSET)}
            for barcode in parse_barcode_text(barcode_text):
                if barcode in by_barcode:
                    items.append(by_barcode[barcode])
                else:
                    unknown.append(barcode)
        return items, unknown

    def assign_license_to_asset(self, token: str, license_id: str | None,
                                asset_id: str | None) -> License:
        session = self.sessions.require(token)
        actor = self.authz.require(session, "assignLicenceToAsset")
        if not license_id:
            raise err("NO_LICENSE_CHOSEN")
        if not asset_id:
            raise err("NO_ASSET_CHOSEN")
        scope = actor.scope()
        with self.store.txn() as txn:
            license_record = txn.get(Kind.LICENSE, license_id)
            asset = txn.get(Kind.ASSET, asset_id)
            if not scope.contains(license_record.faculty_id, license_record.department_id) \
                    or not scope.contains(asset.faculty_id, asset.department_id):
                raise err("OUT_OF_SCOPE")
            if license_record.status == Status.UNAVAILABLE:
                raise err("ITEM_NOT_AVAILABLE")
            if asset_id in license_record.assigned_asset_ids:
                raise err("ALREADY_ASSIGNED", "License already assigned to this asset")
            if len(license_record.assigned_asset_ids) >= license_record.seats:
                raise err("SEATS_EXHAUSTED")
            license_record.assigned_asset_ids = license_record.assigned_asset_ids | {asset_id}
            txn.put(Kind.LICENSE, license_record)
            txn.append_audit(actor.id, "license.assign_asset",
                             (("license", license_id), ("asset", asset_id)), "")
        return license_record

    def assign_locations(self, token: str, *, parent_location_id: str | None = None,
                         department_id: str | None = None,
                         location_ids: list[str] | None = None) -> list[ItemOutcome]:
        session = self.sessions.require(token)
        if (parent_location_id is None) == (department_id is None):
            raise err("NO_TARGET", "Please select location or department to assign to")
        permission = ("assignLocationToLocation" if parent_location_id
                      else "assignLocationToDepartment")
        actor = self.authz.require(session, permission)
        if not location_ids:
            raise err("EMPTY_SELECTION", "Please select records in locations")
        scope = actor.scope()
        now = self.clock()
        outcomes: list[ItemOutcome] = []
        target_faculty = None
        if department_id:
            department = self.store.get(Kind.DEPARTMENT, department_id)
            target_faculty = department.faculty_id
        else:
            self.store.get(Kind.LOCATION, parent_location_id)
        action = ("location.assign_location" if parent_location_id
                  else "location.assign_department")
        with self.store.txn() as txn:
            for location_id in location_ids:
                try:
                    location = txn.get(Kind.LOCATION, location_id)
                except Exception:
                    outcomes.append(ItemOutcome(location_id, False, "NOT_FOUND"))
                    continue
                if not scope.contains(location.faculty_id, location.department_id):
                    outcomes.append(ItemOutcome(location_id, False, "OUT_OF_SCOPE"))
                    continue
                if parent_location_id:
                    if self._creates_cycle(txn, location_id, parent_location_id):
                        outcomes.append(ItemOutcome(location_id, False, "CYCLE_CREATED"))
                        continue
                    location.parent_location_id = parent_location_id
                else:
                    location.department_id = department_id
                    location.faculty_id = target_faculty
                location.last_assigned_at = now
                txn.put(Kind.LOCATION, location)
                txn.append_audit(actor.id, action, (("location", location_id),),
                                 parent_location_id or department_id or "")
                outcomes.append(ItemOutcome(location_id, True))
        return outcomes

    def _creates_cycle(self, txn: Txn, location_id: str, new_parent_id: str) -> bool:
        cursor: str | None = new_parent_id
        while cursor is not None:
            if cursor == location_id:
                return True
            cursor = txn.get(Kind.LOCATION, cursor).parent_location_id
        return False

    def assign_location_to_person(self, token: str, location_ids: list[str],
                                  person_id: str | None) -> list[ItemOutcome]:
        session = self.sessions.require(token)
        actor = self.authz.require(session, "assignLocationToPerson")
        if not person_id:
            raise err("NO_TARGET", "Please select a person")
        if not location_ids:
            raise err("EMPTY_SELECTION", "Please select records in locations")
        person = self.store.get(Kind.PERSON, person_id)
        scope = actor.scope()
        if not scope.contains(person.faculty_id, person.department_id):
            raise err("OUT_OF_SCOPE", "Target is outside your area of visibility")
        now = self.clock()
        outcomes: list[ItemOutcome] = []
        with self.store.txn() as txn:
            for location_id in location_ids:
                try:
                    location = txn.get(Kind.LOCATION, location_id)
                except Exception:
                    outcomes.append(ItemOutcome(location_id, False, "NOT_FOUND"))
                    continue
                if not scope.contains(location.faculty_id, location.department_id):
                    outcomes.append(ItemOutcome(location_id, False, "OUT_OF_SCOPE"))
                    continue
                if location.status == Status.ASSIGNED:
                    outcomes.append(ItemOutcome(location_id, False, "ALREADY_ASSIGNED"))
                    continue
                if location.status != Status.AVAILABLE:
                    outcomes.append(ItemOutcome(location_id, False, "ITEM_NOT_AVAILABLE"))
                    continue
                location.assigned_person_id = person_id
                location.status = Status.ASSIGNED
                location.last_assigned_at = now
                txn.put(Kind.LOCATION, location)
                txn.append_audit(actor.id, "location.assign_person",
                                 (("location", location_id), ("person", person_id)), "")
                outcomes.append(ItemOutcome(location_id, True))
        return outcomes

    # ------------------------------------------------------------------ borrow

    def borrow(self, token: str, kind: Kind, ids: list[str],
               borrower_id: str | None) -> list[ItemOutcome]:
        session = self.sessions.require(token)
        if kind not in (Kind.ASSET, Kind.LICENSE):
            raise err("UNKNOWN_FIELD", "only assets and licenses can be borrowed")
        permission = "borrowAssets" if kind == Kind.ASSET else "borrowLicenses"
        actor = self.authz.require(session, permission)
        if not borrower_id:
            raise err("NO_BORROWER")
        if not ids:
            raise err("EMPTY_SELECTION", f"Please select records in {kind.value}s")
        borrower = self.store.get(Kind.PERSON, borrower_id)
        scope = actor.scope()
        if not scope.contains(borrower.faculty_id, borrower.department_id):
            raise err("OUT_OF_SCOPE", "Borrower is outside your area of visibility")
        outcomes: list[ItemOutcome] = []
        borrowed_names: list[str] = []
        with self.store.txn() as txn:
            for record_id in ids:
                try:
                    record = txn.get(kind, record_id)
                except Exception:
                    outcomes.append(ItemOutcome(record_id, False, "NOT_FOUND"))
                    continue
                if not scope.contains(record.faculty_id, record.department_id):
                    outcomes.append(ItemOutcome(record_id, False, "OUT_OF_SCOPE"))
                    continue
                if record.status != Status.AVAILABLE:
                    outcomes.append(ItemOutcome(record_id, False, "ITEM_NOT_AVAILABLE"))
                    continue
                record.status = Status.BORROWED
                record.borrowed_by = borrower_id
                txn.put(kind, record)
                txn.append_audit(actor.id, f"{kind.value}.borrow",
                                 ((kind.value, record_id), ("person", borrower_id)), "")
                outcomes.append(ItemOutcome(record_id, True))
                borrowed_names.append(getattr(record, "name", record_id))
            if borrowed_names:
                message = OutboxMessage(
                    id=txn.new_id(Kind.OUTBOX),
                    recipient_id=borrower_id,
                    subject="Items ready for pick up",
                    body="Please pick up requested item(s): " + ", ".join(borrowed_names),
                    created_at=self.clock(),
                    delivery_state=DeliveryState.QUEUED,
                )
                txn.put(Kind.OUTBOX, message)
        return outcomes

    # ------------------------------------------------------------------ profile

    def my_profile(self, token: str) -> dict[str, Any]:
        session = self.sessions.require(token)
        actor = self.authz.require(session, "seeMyProfile")
        pid = actor.id
        assigned_assets = self.store.scan(Kind.ASSET, lambda a: a.assigned_person_id == pid)
        assigned_locations = self.store.scan(
            Kind.LOCATION, lambda l: l.assigned_person_id == pid)
        borrowed_assets = self.store.scan(Kind.ASSET, lambda a: a.borrowed_by == pid)
        borrowed_licenses = self.store.scan(Kind.LICENSE, lambda l: l.borrowed_by == pid)
        roles = [self.store.get(Kind.ROLE, rid) for rid in sorted(actor.role_ids)]
        with self.store.txn() as txn:
            txn.append_audit(pid, "profile.view", (("person", pid),), "")
        return {
            "person": self._project(Kind.PERSON, actor, None),
            "assigned_assets": [self._project(Kind.ASSET, a, None) for a in assigned_assets],
            "assigned_locations": [
                self._project(Kind.LOCATION, l, None) for l in assigned_locations],
            "borrowed_assets": [self._project(Kind.ASSET, a, None) for a in borrowed_assets],
            "borrowed_licenses": [
                self._project(Kind.LICENSE, l, None) for l in borrowed_licenses],
            "roles": [{"id": r.id, "name": r.name} for r in roles],
            "active_role_id": session.active_role_id,
            "permissions": sorted(
                self.authz.effective_permissions(actor, session.active_role_id)),
        }

    def list_roles(self, token: str) -> list[dict[str, Any]]:
        self.sessions.require(token)
        return [{"id": r.id, "name": r.name, "permissions": sorted(r.permission_names())}
                for r in self.store.scan(Kind.ROLE)]

    # ------------------------------------------------------------------ helpers

    def _resolve_type(self, kind: Kind, fields: dict[str, Any]) -> EntityType:
        type_id = fields.get("type_id")
        if not type_id:
            raise err("UNKNOWN_TYPE", "Please select a type")
        try:
            etype = self.store.get(Kind.TYPE, type_id)
        except Exception:
            raise err("UNKNOWN_TYPE")
        if etype.kind != kind:
            raise err("UNKNOWN_TYPE", f"type {etype.name} is not a {kind.value} type")
        return etype

    def _check_required(self, etype: EntityType, fields: dict[str, Any]) -> None:
        for name in etype.required_fields():
            value = fields.get(_type_field_to_attr(name), fields.get(name))
            if value in (None, ""):
                raise err("REQUIRED_FIELD_EMPTY", field=name)

    def _owner_region(self, actor: Person, fields: dict[str, Any]) -> tuple[str, str | None]:
        faculty_id = fields.get("faculty_id") or actor.faculty_id
        department_id = fields.get("department_id", actor.department_id)
        if not faculty_id:
            raise err("MISSING_FACULTY")
        if not actor.scope().contains(faculty_id, department_id):
            raise err("OUT_OF_SCOPE")
        return faculty_id, department_id

    def _status_from(self, fields: dict[str, Any]) -> Status:
        raw = fields.get("status", Status.AVAILABLE)
        try:
            return Status(raw)
        except ValueError:
            raise err("VALIDATION", f"unknown status {raw!r}")


def _type_field_to_attr(name: str) -> str:
    """Type field names use friendly labels; map the ref-ish ones to attributes."""
    return {
        "type": "type_id", "faculty": "faculty_id", "department": "department_id",
        "location": "location_id", "subgroup": "subgroup_id",
        "parent_location": "parent_location_id",
    }.get(name, name)
