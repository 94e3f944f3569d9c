"""Role packages, the permission catalog, and every permission/scope check.

The catalog and the eight default role packages ship as one versioned data
file (``data/default_roles.json``); seeding copies it into the store, so every
grant anywhere can be checked against catalog rows. The per-role base set
("similar for all roles") is merged into each package at seed time, keeping
``check`` a plain set-membership test.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date, datetime
from pathlib import Path
from typing import Callable, Iterable

from .errors import err
from .model import (
    Kind,
    PermissionDef,
    PermissionGrant,
    Person,
    Role,
    Scope,
    Session,
    Status,
)
from .storage import Store

ROLES_FILE = Path(__file__).with_name("data") / "default_roles.json"


def load_role_definitions() -> dict:
    return json.loads(ROLES_FILE.read_text(encoding="utf-8"))


@dataclass
class BulkOutcome:
    person_id: str
    ok: bool
    error_code: str | None = None


class Authz:
    """Catalog membership, grant resolution, and visibility scoping."""

    def __init__(self, store: Store, clock: Callable[[], datetime] | None = None):
        self.store = store
        self.clock = clock or store.clock

    # -- seeding ---------------------------------------------------------------

    def seed_default_roles(self, actor_id: str = "system") -> int:
        """Create the catalog and the default role packages; returns roles created."""
        defs = load_role_definitions()
        if self.store.scan(Kind.ROLE):
            raise err("ALREADY_SEEDED")
        base = set(defs["base"])
        with self.store.txn() as txn:
            for name in defs["catalog"] + defs.get("runtime_registrations", []):
                txn.put(Kind.PERMISSION, PermissionDef(id=txn.new_id(Kind.PERMISSION), name=name))
            created = 0
            for role_name, extra in defs["roles"].items():
                grants = {PermissionGrant(p) for p in base | set(extra)}
                txn.put(Kind.ROLE, Role(id=txn.new_id(Kind.ROLE), name=role_name, grants=grants))
                created += 1
            txn.append_audit(actor_id, "role.seed", (),
                             f"seeded {created} default roles, catalog v{defs['version']}")
        return created

    # -- catalog ---------------------------------------------------------------

    def catalog(self) -> set[str]:
        return {p.name for p in self.store.scan(Kind.PERMISSION)}

    def role_by_name(self, name: str) -> Role:
        for role in self.store.scan(Kind.ROLE):
            if role.name == name:
                return role
        raise err("NOT_FOUND", f"no role named {name}")

    def grants_of(self, role_name: str) -> set[str]:
        return self.role_by_name(role_name).permission_names()

    # -- decisions ---------------------------------------------------------------

    def effective_permissions(self, person: Person,
                              active_role_id: str | None) -> set[str]:
        """Unexpired permission names from the active role plus extra grants."""
        today = self.clock().date()
        names: set[str] = set()
        if active_role_id is not None and active_role_id in person.role_ids:
            role = self.store.get(Kind.ROLE, active_role_id)
            names |= {g.permission for g in role.grants if g.active_on(today)}
        names |= {g.permission for g in person.extra_grants if g.active_on(today)}
        return names

    def visible_scope(self, person: Person) -> Scope:
        return person.scope()

    def check(self, session: Session, permission: str,
              region: tuple[str | None, str | None] | None = None) -> tuple[bool, str | None]:
        """allow/deny decision; pure in (grants, due dates, scope, clock)."""
        person = self.store.get(Kind.PERSON, session.person_id)
        if person.status == Status.UNAVAILABLE:
            return False, "PERMISSION_DENIED"
        if permission not in self.effective_permissions(person, session.active_role_id):
            return False, "PERMISSION_DENIED"
        if region is not None and not person.scope().contains(*region):
            return False, "OUT_OF_SCOPE"
        return True, None

    def require(self, session: Session, permission: str,
                region: tuple[str | None, str | None] | None = None) -> Person:
        allowed, reason = self.check(session, permission, region)
        if not allowed:
            raise err(reason or "PERMISSION_DENIED",
                      f"{permission} denied for {session.person_id}"
                      if reason == "PERMISSION_DENIED" else None)
        return self.store.get(Kind.PERSON, session.person_id)


class RoleAdmin:
    """Session-facing role/permission administration (bulk ops included)."""

    def __init__(self, store: Store, sessions, authz: Authz):
        self.store = store
        self.sessions = sessions
        self.authz = authz

    def _grants_from(self, pairs: Iterable[tuple[str, date | None] | str],
                     catalog: set[str]) -> set[PermissionGrant]:
        grants: set[PermissionGrant] = set()
        for item in pairs:
            name, due = item if isinstance(item, tuple) else (item, None)
            if name not in catalog:
                raise err("UNKNOWN_PERMISSION", f"{name} is not in the catalog")
            grants.add(PermissionGrant(name, due))
        return grants

    def add_role(self, token: str, name: str,
                 grants: Iterable[tuple[str, date | None] | str]) -> Role:
        session = self.sessions.require(token)
        actor = self.authz.require(session, "addRole")
        if not name:
            raise err("EMPTY_NAME")
        grant_set = self._grants_from(grants, self.authz.catalog())
        if not grant_set:
            raise err("EMPTY_GRANTS")
        with self.store.txn() as txn:
            role = Role(id=txn.new_id(Kind.ROLE), name=name, grants=grant_set)
            txn.put(Kind.ROLE, role)
            txn.append_audit(actor.id, "role.add", (("role", role.id),), f"role {name}")
        return role

    def edit_role_for_person(self, token: str, person_ids: list[str],
                             add: Iterable[tuple[str, date | None] | str] = (),
                             remove: Iterable[str] = (),
                             remove_roles: Iterable[str] = ()) -> set[PermissionGrant]:
        """Adjust one person's extra grants (and optionally drop roles)."""
        session = self.sessions.require(token)
        actor = self.authz.require(session, "editRole")
        if len(person_ids) == 0:
            raise err("NO_PERSON_SELECTED")
        if len(person_ids) > 1:
            raise err("MULTIPLE_PERSONS_SELECTED")
        added = self._grants_from(add, self.authz.catalog())
        removed_names = set(remove)
        with self.store.txn() as txn:
            person = txn.get(Kind.PERSON, person_ids[0])
            if not actor.scope().contains(person.faculty_id, person.department_id):
                raise err("OUT_OF_SCOPE")
            new_extra = {g for g in person.extra_grants
                         if g.permission not in removed_names} | added
            new_roles = person.role_ids - set(remove_roles)
            if not new_extra and not new_roles:
                raise err("EMPTY_GRANT_LIST")
            person.extra_grants = new_extra
            person.role_ids = new_roles
            txn.put(Kind.PERSON, person)
            txn.append_audit(actor.id, "person.grants_edit", (("person", person.id),),
                             f"+{sorted(g.permission for g in added)} "
                             f"-{sorted(removed_names)} roles-{sorted(remove_roles)}")
        return new_extra

    def add_permission(self, token: str, name: str) -> PermissionDef:
        session = self.sessions.require(token)
        actor = self.authz.require(session, "addPermission")
        if not name:
            raise err("EMPTY_NAME")
        if name in self.authz.catalog():
            raise err("DUPLICATE_NAME", f"permission {name} already exists")
        with self.store.txn() as txn:
            perm = PermissionDef(id=txn.new_id(Kind.PERMISSION), name=name)
            txn.put(Kind.PERMISSION, perm)
            txn.append_audit(actor.id, "permission.add", (("permission", perm.id),), name)
        return perm

    def edit_permission(self, token: str, old: str, new: str) -> PermissionDef:
        """Rename a permission nobody holds yet (pre-use correction)."""
        session = self.sessions.require(token)
        actor = self.authz.require(session, "editPermission")
        if not new:
            raise err("EMPTY_NAME")
        rows = [p for p in self.store.scan(Kind.PERMISSION) if p.name == old]
        if not rows:
            raise err("UNKNOWN_PERMISSION", f"{old} is not in the catalog")
        if self._permission_granted_anywhere(old):
            raise err("PERMISSION_IN_USE")
        if new in self.authz.catalog():
            raise err("DUPLICATE_NAME", f"permission {new} already exists")
        perm = rows[0]
        perm.name = new
        with self.store.txn() as txn:
            txn.put(Kind.PERMISSION, perm)
            txn.append_audit(actor.id, "permission.edit", (("permission", perm.id),),
                             f"{old} -> {new}")
        return perm

    def _permission_granted_anywhere(self, name: str) -> bool:
        for role in self.store.scan(Kind.ROLE):
            if name in role.permission_names():
                return True
        for person in self.store.scan(Kind.PERSON):
            if any(g.permission == name for g in person.extra_grants):
                return True
        return False

    def assign_role_bulk(self, token: str, person_ids: list[str],
                         role_id: str | None) -> list[BulkOutcome]:
        return self._assign_bulk(token, person_ids, "assignRoleToPersons", role_id=role_id)

    def assign_permission_bulk(self, token: str, person_ids: list[str],
                               permission: str | None,
                               due_date: date | None = None) -> list[BulkOutcome]:
        return self._assign_bulk(token, person_ids, "assignPermissionToPersons",
                                 permission=permission, due_date=due_date)

    def _assign_bulk(self, token: str, person_ids: list[str], mode_permission: str, *,
                     role_id: str | None = None, permission: str | None = None,
                     due_date: date | None = None) -> list[BulkOutcome]:
        session = self.sessions.require(token)
        actor = self.authz.require(session, mode_permission)
        if not person_ids:
            raise err("EMPTY_SELECTION", "Please select person(s) in persons")
        is_role_mode = mode_permission == "assignRoleToPersons"
        if (role_id is None) if is_role_mode else (permission is None):
            raise err("MISSING_ROLE_OR_PERMISSION")
        if is_role_mode:
            self.store.get(Kind.ROLE, role_id)  # must exist
        elif permission not in self.authz.catalog():
            raise err("UNKNOWN_PERMISSION", f"{permission} is not in the catalog")
        outcomes: list[BulkOutcome] = []
        scope = actor.scope()
        with self.store.txn() as txn:
            for pid in person_ids:
                try:
                    person = txn.get(Kind.PERSON, pid)
                except Exception:
                    outcomes.append(BulkOutcome(pid, False, "NOT_FOUND"))
                    continue
                if not scope.contains(person.faculty_id, person.department_id):
                    outcomes.append(BulkOutcome(pid, False, "OUT_OF_SCOPE"))
                    continue
                if is_role_mode:
                    person.role_ids = person.role_ids | {role_id}
                    action = "role.assign"
                else:
                    person.extra_grants = person.extra_grants | {
                        PermissionGrant(permission, due_date)
                    }
                    action = "permission.assign"
                txn.put(Kind.PERSON, person)
                txn.append_audit(actor.id, action, (("person", pid),),
                                 role_id or permission or "")
                outcomes.append(BulkOutcome(pid, True))
        return outcomes
