"""Audit querying behind a step-up login.

Appending happens through ``Txn.append_audit`` inside the transaction of the
action being described; this module covers the read side: holders of the
audit permission re-enter their password on a dedicated audit login and
receive a short-lived audit token required by every query. Audit queries do
not log themselves.
"""

from __future__ import annotations

import secrets
from datetime import datetime, timedelta
from typing import Callable

from .authz import Authz
from .errors import err
from .model import AuditRecord
from .sessions import SessionService, verify_password
from .storage import Store

AUDIT_TOKEN_MINUTES = 10


class AuditService:
    def __init__(self, store: Store, sessions: SessionService, authz: Authz,
                 clock: Callable[[], datetime] | None = None,
                 token_minutes: int = AUDIT_TOKEN_MINUTES):
        self.store = store
        self.sessions = sessions
        self.authz = authz
        self.clock = clock or store.clock
        self.ttl = timedelta(minutes=token_minutes)
        self._tokens: dict[str, tuple[str, datetime]] = {}

    def audit_login(self, token: str, password: str) -> str:
        """Step-up re-entry of the password, yielding a short-lived audit token."""
        session = self.sessions.require(token)
        actor = self.authz.require(session, "seeAudit")
        if not verify_password(password, actor.password_digest):
            raise err("LOGIN_FAILURE")
        audit_token = secrets.token_hex(16)
        self._tokens[audit_token] = (actor.id, self.clock())
        return audit_token

    def query(self, token: str, audit_token: str, *,
              period: tuple[datetime | None, datetime | None] = (None, None),
              persons: set[str] | None = None,
              items: set[tuple[str, str]] | None = None) -> list[AuditRecord]:
        session = self.sessions.require(token)
        self.authz.require(session, "seeAudit")
        self._check_audit_token(audit_token, session.person_id)
        return self.store.scan_audit(period=period, persons=persons, items=items)

    def _check_audit_token(self, audit_token: str, person_id: str) -> None:
        entry = self._tokens.get(audit_token)
        if entry is None or entry[0] != person_id:
            raise err("STALE_AUDIT_SESSION")
        if self.clock() - entry[1] >= self.ttl:
            del self._tokens[audit_token]
            raise err("STALE_AUDIT_SESSION")

    @staticmethod
    def export_csv(records: list[AuditRecord]) -> str:
        def quote(value: str) -> str:
            if any(c in value for c in ',"\r\n'):
                return '"' + value.replace('"', '""') + '"'
            return value

        lines = ["sequence,timestamp,actor,action,refs,details"]
        for r in records:
            refs = ";".join(f"{kind}:{rid}" for kind, rid in r.entity_refs)
            lines.append(",".join([
                str(r.sequence_number), r.timestamp.isoformat(), quote(r.actor_id),
                quote(r.action), quote(refs), quote(r.details),
            ]))
        return "\n".join(lines) + "\n"
