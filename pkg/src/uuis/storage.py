"""Repository over an embedded sqlite store.

Every mutation happens inside a transaction obtained from :meth:`Store.txn`;
the commit refuses to land domain writes that carry no audit record (the
session family is exempt, since idle-clock touches would otherwise audit every
request). Records are the dataclasses from :mod:`uuis.model`, serialized to
one JSON document per row; uniqueness lives in the schema's expression
indexes, referential integrity is checked on every put.

Concurrency: one writer connection serializes all transactions behind a lock;
with an on-disk store (WAL) reads run on per-thread connections and never
block each other. The private in-memory mode shares the writer connection and
serializes reads too (meant for tests).
"""

from __future__ import annotations

import dataclasses
import json
import sqlite3
import threading
import types
import typing
from contextlib import contextmanager
from datetime import date, datetime
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Iterator

from .errors import err
from .model import ID_PREFIX, RECORD_TYPES, REF_FIELDS, AuditRecord, Kind

SCHEMA_VERSION = "1"
SCHEMA_PATH = Path(__file__).with_name("schema.sql")

# unique index name -> (error code, offending field)
_INDEX_ERRORS = {
    "ux_asset_barcode": ("BARCODE_NOT_UNIQUE", "barcode"),
    "ux_person_username": ("USERNAME_NOT_UNIQUE", "username"),
    "ux_role_name": ("DUPLICATE_NAME", "name"),
    "ux_subgroup_name": ("DUPLICATE_NAME", "name"),
    "ux_permission_name": ("DUPLICATE_NAME", "name"),
    "ux_type_kind_name": ("DUPLICATE_NAME", "name"),
    "ux_location_number": ("LOCATION_NUMBER_NOT_UNIQUE", "location_number"),
}


# --------------------------------------------------------------------------
# JSON codec for the model dataclasses
# --------------------------------------------------------------------------

def encode_record(record: Any) -> dict[str, Any]:
    def conv(value: Any) -> Any:
        if isinstance(value, Enum):
            return value.value
        if isinstance(value, datetime):
            return value.isoformat()
        if isinstance(value, date):
            return value.isoformat()
        if isinstance(value, (set, frozenset)):
            return sorted((conv(v) for v in value), key=json.dumps)
        if isinstance(value, tuple):
            return [conv(v) for v in value]
        if dataclasses.is_dataclass(value):
            return {f.name: conv(getattr(value, f.name)) for f in dataclasses.fields(value)}
        return value

    return {f.name: conv(getattr(record, f.name)) for f in dataclasses.fields(record)}


def _decode_value(value: Any, hint: Any) -> Any:
    origin = typing.get_origin(hint)
    if origin in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(hint) if a is not type(None)]
        if value is None:
            return None
        return _decode_value(value, args[0])
    if hint is datetime:
        return value if isinstance(value, datetime) else datetime.fromisoformat(value)
    if hint is date:
        return value if isinstance(value, date) else date.fromisoformat(value)
    if isinstance(hint, type) and issubclass(hint, Enum):
        return hint(value)
    if origin in (set, frozenset):
        (elem,) = typing.get_args(hint)
        out = {_decode_value(v, elem) for v in value}
        return frozenset(out) if origin is frozenset else out
    if origin is tuple:
        args = typing.get_args(hint)
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_decode_value(v, args[0]) for v in value)
        return tuple(_decode_value(v, a) for v, a in zip(value, args))
    if origin is list:
        (elem,) = typing.get_args(hint)
        return [_decode_value(v, elem) for v in value]
    if dataclasses.is_dataclass(hint):
        return decode_record(hint, value)
    return value


_HINT_CACHE: dict[type, dict[str, Any]] = {}


def decode_record(cls: type, doc: dict[str, Any]) -> Any:
    if cls not in _HINT_CACHE:
        _HINT_CACHE[cls] = typing.get_type_hints(cls)
    hints = _HINT_CACHE[cls]
    kwargs = {
        f.name: _decode_value(doc[f.name], hints[f.name])
        for f in dataclasses.fields(cls)
        if f.name in doc
    }
    return cls(**kwargs)


def _audit_from_row(row: sqlite3.Row) -> AuditRecord:
    return AuditRecord(
        sequence_number=row["seq"],
        timestamp=datetime.fromisoformat(row["ts"]),
        actor_id=row["actor"],
        action=row["action"],
        entity_refs=tuple((k, i) for k, i in json.loads(row["refs"])),
        details=row["details"],
    )


class Txn:
    """Write transaction: all puts commit atomically with their audit rows."""

    def __init__(self, store: "Store", conn: sqlite3.Connection):
        self._store = store
        self._conn = conn
        self._wrote_families: set[Kind] = set()
        self._audit_rows = 0

    # -- ids ----------------------------------------------------------------

    def new_id(self, kind: Kind) -> str:
        row = self._conn.execute(
            "UPDATE id_counters SET next = next + 1 WHERE family = ? RETURNING next",
            (kind.value,),
        ).fetchone()
        if row is None:
            self._conn.execute(
                "INSERT INTO id_counters (family, next) VALUES (?, 1)", (kind.value,)
            )
            n = 1
        else:
            n = row[0]
        return f"{ID_PREFIX[kind]}-{n:06d}"

    # -- record access ------------------------------------------------------

    def get(self, kind: Kind, record_id: str) -> Any:
        return self._store._get(self._conn, kind, record_id)

    def exists(self, kind: Kind, record_id: str) -> bool:
        row = self._conn.execute(
            f"SELECT 1 FROM {kind.value} WHERE id = ?", (record_id,)
        ).fetchone()
        return row is not None

    def scan(self, kind: Kind, where: Callable[[Any], bool] | None = None) -> list[Any]:
        return self._store._scan(self._conn, kind, where)

    def put(self, kind: Kind, record: Any) -> str:
        """Persist a record (insert or full update), returning its id."""
        self._check_refs(kind, record)
        doc = json.dumps(encode_record(record), ensure_ascii=False)
        try:
            self._conn.execute(
                f"INSERT INTO {kind.value} (id, doc) VALUES (?, ?) "
                f"ON CONFLICT (id) DO UPDATE SET doc = excluded.doc",
                (record.id, doc),
            )
        except sqlite3.IntegrityError as exc:
            raise _integrity_error(exc) from exc
        if kind != Kind.SESSION:
            self._wrote_families.add(kind)
        return record.id

    def delete(self, kind: Kind, record_id: str) -> None:
        """Hard removal; sessions only. Domain records soft-delete via status."""
        if kind != Kind.SESSION:
            raise err("DATABASE_ERROR", f"hard delete is not allowed for {kind.value}")
        self._conn.execute(f"DELETE FROM {kind.value} WHERE id = ?", (record_id,))

    # -- audit --------------------------------------------------------------

    def append_audit(self, actor_id: str, action: str,
                     entity_refs: tuple[tuple[str, str], ...] = (),
                     details: str = "") -> int:
        now = self._store.clock()
        cur = self._conn.execute(
            "INSERT INTO audit (ts, actor, action, refs, details) VALUES (?, ?, ?, ?, ?)",
            (now.isoformat(), actor_id, action,
             json.dumps([list(r) for r in entity_refs]), details),
        )
        self._audit_rows += 1
        return int(cur.lastrowid)

    # -- internals ----------------------------------------------------------

    def _check_refs(self, kind: Kind, record: Any) -> None:
        for field_name, target in REF_FIELDS.get(kind, {}).items():
            value = getattr(record, field_name, None)
            if value is None:
                continue
            ids = value if isinstance(value, (set, frozenset, tuple, list)) else (value,)
            for ref_id in ids:
                if ref_id == record.id and target == kind:
                    continue  # self-reference is checked by domain rules
                if not self.exists(target, ref_id):
                    raise err("REF_INTEGRITY",
                              f"{kind.value}.{field_name} references missing "
                              f"{target.value} {ref_id}")

    def _finish(self) -> None:
        if self._wrote_families and self._audit_rows == 0:
            raise err("AUDIT_REQUIRED")


def _integrity_error(exc: sqlite3.IntegrityError) -> Exception:
    text = str(exc)
    for index_name, (code, field) in _INDEX_ERRORS.items():
        if index_name in text:
            return err(code, field=field)
    if "audit" in text:
        return err("AUDIT_IMMUTABLE")
    return err("DATABASE_ERROR", text)


class Store:
    """Embedded relational store; thread-safe per the module docstring."""

    def __init__(self, path: str | Path | None = None,
                 clock: Callable[[], datetime] | None = None):
        self.path = str(path) if path is not None else None
        self.clock = clock or (lambda: datetime.now().astimezone())
        self._write_lock = threading.RLock()
        self._local = threading.local()
        self._writer = self._connect()
        self._init_schema()
        self._in_txn = False

    # -- connections ----------------------------------------------------------

    def _connect(self) -> sqlite3.Connection:
        conn = sqlite3.connect(self.path or ":memory:", check_same_thread=False)
        conn.row_factory = sqlite3.Row
        conn.isolation_level = None
        conn.execute("PRAGMA foreign_keys = ON")
        conn.execute("PRAGMA busy_timeout = 10000")
        if self.path:
            conn.execute("PRAGMA journal_mode = WAL")
            conn.execute("PRAGMA synchronous = NORMAL")
        return conn

    def _reader(self) -> sqlite3.Connection:
        if not self.path:
            return self._writer  # shared connection, guarded by the write lock
        conn = getattr(self._local, "conn", None)
        if conn is None:
            conn = self._connect()
            self._local.conn = conn
        return conn

    def _init_schema(self) -> None:
        with self._write_lock:
            self._writer.executescript(SCHEMA_PATH.read_text(encoding="utf-8"))
            row = self._writer.execute(
                "SELECT value FROM meta WHERE key = 'schema_version'"
            ).fetchone()
            if row is None:
                self._writer.execute(
                    "INSERT INTO meta (key, value) VALUES ('schema_version', ?)",
                    (SCHEMA_VERSION,),
                )
            elif row[0] != SCHEMA_VERSION:
                raise err("SCHEMA_VERSION_MISMATCH",
                          f"store has schema v{row[0]}, code expects v{SCHEMA_VERSION}")

    def close(self) -> None:
        self._writer.close()

    # -- transactions -----------------------------------------------------------

    @contextmanager
    def txn(self) -> Iterator[Txn]:
        with self._write_lock:
            if self._in_txn:
                raise err("DATABASE_ERROR", "transactions do not nest")
            self._writer.execute("BEGIN IMMEDIATE")
            self._in_txn = True
            txn = Txn(self, self._writer)
            try:
                yield txn
                txn._finish()
                self._writer.execute("COMMIT")
            except BaseException:
                self._writer.execute("ROLLBACK")
                raise
            finally:
                self._in_txn = False

    # -- reads ------------------------------------------------------------------

    def get(self, kind: Kind, record_id: str) -> Any:
        """Fetch regardless of status; visibility filtering is the caller's job."""
        if not self.path:
            with self._write_lock:
                return self._get(self._reader(), kind, record_id)
        return self._get(self._reader(), kind, record_id)

    def scan(self, kind: Kind, where: Callable[[Any], bool] | None = None,
             *, offset: int = 0, limit: int | None = None) -> list[Any]:
        """All matching records in primary-key order; optional page window."""
        if not self.path:
            with self._write_lock:
                records = self._scan(self._reader(), kind, where)
        else:
            records = self._scan(self._reader(), kind, where)
        if limit is None:
            return records[offset:]
        return records[offset:offset + limit]

    def _get(self, conn: sqlite3.Connection, kind: Kind, record_id: str) -> Any:
        row = conn.execute(
            f"SELECT doc FROM {kind.value} WHERE id = ?", (record_id,)
        ).fetchone()
        if row is None:
            raise err("NOT_FOUND", f"no {kind.value} with id {record_id}")
        return decode_record(RECORD_TYPES[kind], json.loads(row["doc"]))

    def _scan(self, conn: sqlite3.Connection, kind: Kind,
              where: Callable[[Any], bool] | None) -> list[Any]:
        cls = RECORD_TYPES[kind]
        rows = conn.execute(f"SELECT doc FROM {kind.value} ORDER BY id ASC").fetchall()
        records = (decode_record(cls, json.loads(r["doc"])) for r in rows)
        if where is None:
            return list(records)
        return [r for r in records if where(r)]

    # -- audit reads --------------------------------------------------------------

    def scan_audit(self, *, period: tuple[datetime | None, datetime | None] = (None, None),
                   persons: set[str] | None = None,
                   items: set[tuple[str, str]] | None = None) -> list[AuditRecord]:
        """Chronological audit records; filters conjoin when given."""
        conn = self._reader()
        if not self.path:
            with self._write_lock:
                rows = conn.execute("SELECT * FROM audit ORDER BY seq ASC").fetchall()
        else:
            rows = conn.execute("SELECT * FROM audit ORDER BY seq ASC").fetchall()
        records = [_audit_from_row(r) for r in rows]
        start, end = period
        if start is not None:
            records = [r for r in records if r.timestamp >= start]
        if end is not None:
            records = [r for r in records if r.timestamp <= end]
        if persons:
            records = [r for r in records if r.actor_id in persons]
        if items:
            records = [r for r in records if any(ref in items for ref in r.entity_refs)]
        return records
