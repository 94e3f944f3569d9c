"""Bulk ingestion from pasted CSV/TXT content with manual column mapping.

Each mappable row is inserted in its own transaction so one bad row never
blocks the rest; rows the system cannot place are diverted into a problem
file, itself valid CSV with columns (row_number, reason, original_row), for
manual correction and re-import. Unmapped source columns are noted once as a
row_number-0 notice line. Encoding is UTF-8; a BOM is tolerated and stripped.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable

from .authz import Authz
from .errors import err
from .model import (
    FIELD_UNIVERSE,
    Asset,
    EntityType,
    FieldSpec,
    Kind,
    Level,
    License,
    Location,
    Person,
    Status,
)
from .sessions import SessionService, hash_password
from .storage import Store

IMPORT_PERMISSION = {
    Kind.ASSET: "importAsset", Kind.LICENSE: "importLicense",
    Kind.LOCATION: "importLocation", Kind.PERSON: "importPerson",
}

FALLBACK_TYPE_NAME = "imported"


@dataclass
class ColumnMapping:
    """(column index -> target field) chosen manually by the importer."""

    target_kind: Kind
    entries: list[tuple[int, str]]
    default_location_id: str | None = None

    def __post_init__(self) -> None:
        indexes = [i for i, _ in self.entries]
        if len(indexes) != len(set(indexes)):
            raise err("BAD_MAPPING", "column indexes must be unique")
        universe = set(FIELD_UNIVERSE[self.target_kind])
        for _, target in self.entries:
            if target not in universe:
                raise err("BAD_MAPPING", f"{target} is not a {self.target_kind.value} field")


@dataclass
class ImportResult:
    inserted_ids: list[str] = field(default_factory=list)
    problem_rows: list[tuple[int, list[str], str]] = field(default_factory=list)
    unmapped_columns: list[int] = field(default_factory=list)
    problem_file: str = ""


def _csv_quote(value: str) -> str:
    if any(c in value for c in ',"\r\n'):
        return '"' + value.replace('"', '""') + '"'
    return value


def parse_csv(text: str) -> list[list[str]]:
    """RFC 4180 rows: quoted fields, embedded commas/newlines, doubled quotes.

    Raises MALFORMED_FORMAT for an unterminated quote or garbage after a
    closing quote (the stdlib reader silently swallows both).
    """
    rows: list[list[str]] = []
    row: list[str] = []
    buf = io.StringIO()
    in_quotes = False
    was_quoted = False
    i = 0
    n = len(text)

    def end_field() -> None:
        nonlocal was_quoted
        row.append(buf.getvalue())
        buf.seek(0)
        buf.truncate()
        was_quoted = False

    def end_row() -> None:
        end_field()
        rows.append(list(row))
        row.clear()

    while i < n:
        ch = text[i]
        if in_quotes:
            if ch == '"':
                if i + 1 < n and text[i + 1] == '"':
                    buf.write('"')
                    i += 2
                    continue
                in_quotes = False
                was_quoted = True
                i += 1
                continue
            buf.write(ch)
            i += 1
            continue
        if ch == '"':
            if buf.tell() != 0 or was_quoted:
                raise err("MALFORMED_FORMAT", "quote inside unquoted field")
            in_quotes = True
            i += 1
            continue
        if ch == ",":
            end_field()
            i += 1
            continue
        if ch == "\r" or ch == "\n":
            end_row()
            if ch == "\r" and i + 1 < n and text[i + 1] == "\n":
                i += 2
            else:
                i += 1
            continue
        if was_quoted:
            raise err("MALFORMED_FORMAT", "content after closing quote")
        buf.write(ch)
        i += 1
    if in_quotes:
        raise err("MALFORMED_FORMAT", "unterminated quoted field")
    if buf.tell() != 0 or row or was_quoted:
        end_row()
    return rows


def parse_rows(raw_text: str, fmt: str = "csv", *, delimiter: str = "\t") -> list[list[str]]:
    """Split pasted file content into rows of cells; empty lines are dropped."""
    text = raw_text.lstrip("﻿")
    if fmt == "csv":
        rows = parse_csv(text)
    elif fmt == "txt":
        rows = [line.split(delimiter) for line in text.splitlines()]
    else:
        raise err("MALFORMED_FORMAT", f"unknown format {fmt!r}")
    return [r for r in rows if any(cell.strip() for cell in r)]


def render_problem_file(result: ImportResult) -> str:
    lines = ["row_number,reason,original_row"]
    if result.unmapped_columns:
        cols = " ".join(str(c) for c in result.unmapped_columns)
        lines.append(f"0,{_csv_quote(f'unmapped source column(s): {cols}')},")
    for row_number, raw_row, reason in result.problem_rows:
        original = ",".join(raw_row)
        lines.append(f"{row_number},{_csv_quote(reason)},{_csv_quote(original)}")
    return "\n".join(lines) + "\n"


class ImporterService:
    def __init__(self, store: Store, sessions: SessionService, authz: Authz,
                 clock: Callable[[], datetime] | None = None):
        self.store = store
        self.sessions = sessions
        self.authz = authz
        self.clock = clock or store.clock

    def commit_import(self, token: str, mapping: ColumnMapping,
                      rows: list[list[str]]) -> ImportResult:
        session = self.sessions.require(token)
        kind = mapping.target_kind
        actor = self.authz.require(session, IMPORT_PERMISSION[kind])
        if kind in (Kind.ASSET, Kind.LICENSE) and not mapping.default_location_id:
            raise err("LOCATION_REQUIRED")
        if mapping.default_location_id:
            self.store.get(Kind.LOCATION, mapping.default_location_id)
        result = ImportResult()
        result.unmapped_columns = self._unmapped_columns(mapping, rows)
        # persons carry no type reference; every other kind needs one
        fallback_type = None if kind == Kind.PERSON else self._fallback_type(kind, actor.id)
        for offset, raw_row in enumerate(rows, start=1):
            fields = self._row_fields(mapping, raw_row)
            try:
                record_id = self._insert_row(kind, fields, actor, mapping, fallback_type)
                result.inserted_ids.append(record_id)
            except Exception as exc:
                reason = getattr(exc, "message", None) or str(exc)
                result.problem_rows.append((offset, raw_row, reason))
        result.problem_file = render_problem_file(result)
        with self.store.txn() as txn:
            txn.append_audit(
                actor.id, "import.commit", (),
                f"{kind.value} import: {len(result.inserted_ids)} inserted, "
                f"{len(result.problem_rows)} problem row(s), "
                f"{len(result.unmapped_columns)} unmapped column(s)")
        return result

    # -- internals -----------------------------------------------------------

    def _unmapped_columns(self, mapping: ColumnMapping, rows: list[list[str]]) -> list[int]:
        width = max((len(r) for r in rows), default=0)
        mapped = {i for i, _ in mapping.entries}
        return [i for i in range(width) if i not in mapped]

    def _row_fields(self, mapping: ColumnMapping, raw_row: list[str]) -> dict[str, str]:
        fields: dict[str, str] = {}
        for index, target in mapping.entries:
            if index < len(raw_row):
                fields[target] = raw_row[index].strip()
        return fields

    def _fallback_type(self, kind: Kind, actor_id: str) -> EntityType:
        """Per-kind catch-all type for rows whose mapping carries no type column."""
        existing = self.store.scan(
            Kind.TYPE, lambda t: t.kind == kind and t.name == FALLBACK_TYPE_NAME)
        if existing:
            return existing[0]
        from .model import COMPULSORY_FIELDS
        specs = tuple(FieldSpec(n, True) for n in sorted(COMPULSORY_FIELDS[kind]))
        with self.store.txn() as txn:
            etype = EntityType(id=txn.new_id(Kind.TYPE), kind=kind,
                               name=FALLBACK_TYPE_NAME, field_set=specs)
            txn.put(Kind.TYPE, etype)
            txn.append_audit(actor_id, "type.create", (("type", etype.id),),
                             f"fallback {kind.value} type for imports")
        return etype

    def _resolve_named_type(self, kind: Kind, name: str) -> EntityType | None:
        matches = self.store.scan(Kind.TYPE, lambda t: t.kind == kind and t.name == name)
        return matches[0] if matches else None

    def _region_for_row(self, actor: Person, fields: dict[str, str],
                        mapping: ColumnMapping) -> tuple[str, str | None]:
        faculty_id = None
        department_id = None
        if fields.get("department"):
            dept = self._by_name(Kind.DEPARTMENT, fields["department"])
            if dept is None:
                raise err("REF_INTEGRITY", f"unknown department {fields['department']!r}")
            department_id, faculty_id = dept.id, dept.faculty_id
        if fields.get("faculty") and faculty_id is None:
            fac = self._by_name(Kind.FACULTY, fields["faculty"])
            if fac is None:
                raise err("REF_INTEGRITY", f"unknown faculty {fields['faculty']!r}")
            faculty_id = fac.id
        if faculty_id is None:
            faculty_id, department_id = actor.faculty_id, actor.department_id
        if faculty_id is None and mapping.default_location_id:
            loc = self.store.get(Kind.LOCATION, mapping.default_location_id)
            faculty_id, department_id = loc.faculty_id, loc.department_id
        if faculty_id is None:
            raise err("MISSING_FACULTY")
        return faculty_id, department_id

    def _by_name(self, kind: Kind, name: str):
        matches = self.store.scan(kind, lambda r: r.name == name)
        return matches[0] if matches else None

    def _insert_row(self, kind: Kind, fields: dict[str, str], actor: Person,
                    mapping: ColumnMapping, fallback_type: EntityType | None) -> str:
        etype = fallback_type
        if fields.get("type"):
            named = self._resolve_named_type(kind, fields["type"])
            if named is None:
                raise err("UNKNOWN_TYPE", f"unknown type {fields['type']!r}")
            etype = named
        now = self.clock()
        if kind == Kind.PERSON:
            record = self._build_person(fields, actor)
        elif kind == Kind.ASSET:
            faculty_id, department_id = self._region_for_row(actor, fields, mapping)
            if not fields.get("barcode"):
                raise err("REQUIRED_FIELD_EMPTY", "barcode is empty", field="barcode")
            record = Asset(
                id="", type_id=etype.id, name=fields.get("name", ""),
                serial_number=fields.get("serial_number", ""),
                barcode=fields["barcode"],
                purchase_number=fields.get("purchase_number", ""),
                request_number=fields.get("request_number", ""),
                brand=fields.get("brand", ""), description=fields.get("description", ""),
                status=Status.AVAILABLE, created_date=now,
                faculty_id=faculty_id, department_id=department_id,
                color=fields.get("color") or None, material=fields.get("material") or None,
                host_name=fields.get("host_name") or None,
                version=fields.get("version") or None,
                location_id=mapping.default_location_id,
            )
        elif kind == Kind.LICENSE:
            faculty_id, department_id = self._region_for_row(actor, fields, mapping)
            if not fields.get("name"):
                raise err("REQUIRED_FIELD_EMPTY", "name is empty", field="name")
            record = License(
                id="", name=fields["name"],
                purchase_number=fields.get("purchase_number", ""),
                request_number=fields.get("request_number", ""),
                type_id=etype.id, seats=int(fields.get("seats") or 0),
                price=int(fields.get("price") or 0), term=fields.get("term", ""),
                company=fields.get("company", ""), status=Status.AVAILABLE,
                created_date=now, faculty_id=faculty_id, department_id=department_id,
            )
        elif kind == Kind.LOCATION:
            faculty_id: str | None
            department_id: str | None
            try:
                faculty_id, department_id = self._region_for_row(actor, fields, mapping)
            except Exception:
                faculty_id = department_id = None  # locations may be university-owned
            if not fields.get("location_number"):
                raise err("REQUIRED_FIELD_EMPTY", "location_number is empty",
                          field="location_number")
            record = Location(
                id="", type_id=etype.id, description=fields.get("description", ""),
                location_number=fields["location_number"],
                key_number=fields.get("key_number", ""),
                code_number=fields.get("code_number", ""),
                width=fields.get("width", ""), length=fields.get("length", ""),
                status=Status.AVAILABLE, created_date=now,
                capacity=int(fields["capacity"]) if fields.get("capacity") else None,
                faculty_id=faculty_id, department_id=department_id,
            )
        else:
            raise err("BAD_MAPPING", f"cannot import {kind.value}")
        with self.store.txn() as txn:
            record.id = txn.new_id(kind)
            txn.put(kind, record)
            txn.append_audit(actor.id, f"{kind.value}.add", ((kind.value, record.id),),
                             "imported row")
        return record.id

    def _build_person(self, fields: dict[str, str], actor: Person) -> Person:
        username = fields.get("username", "")
        level = Level(int(fields.get("level") or 0))
        faculty_id = None
        department_id = None
        if fields.get("department"):
            dept = self._by_name(Kind.DEPARTMENT, fields["department"])
            if dept is None:
                raise err("REF_INTEGRITY", f"unknown department {fields['department']!r}")
            department_id, faculty_id = dept.id, dept.faculty_id
        elif fields.get("faculty"):
            fac = self._by_name(Kind.FACULTY, fields["faculty"])
            if fac is None:
                raise err("REF_INTEGRITY", f"unknown faculty {fields['faculty']!r}")
            faculty_id = fac.id
        if level <= Level.DEPARTMENT and (faculty_id is None or department_id is None):
            faculty_id = faculty_id or actor.faculty_id
            department_id = department_id or actor.department_id
        if level == Level.FACULTY and faculty_id is None:
            faculty_id = actor.faculty_id
        return Person(
            id="", username=username,
            password_digest=hash_password(fields.get("password") or username),
            name=fields.get("name", ""), title=fields.get("title", ""),
            contact=fields.get("contact", ""), level=level,
            status=Status.AVAILABLE, faculty_id=faculty_id, department_id=department_id,
            high_privileged=fields.get("high_privileged", "").lower() in ("1", "true", "yes"),
        )
