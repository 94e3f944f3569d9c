"""Authentication, session lifecycle, idle expiry, and the voice-digest stub.

The clock is injected so expiry is deterministic under test; the idle window
defaults to 30 minutes and expires inclusively (idle exactly 30:00.000 is
expired). Tokens carry 128 bits of entropy and never appear in audit details.

Voice matching is an explicit stub: enrollment stores a digest of the opaque
sample and login compares digests for equality, leaving room for a real
matcher behind the same byte-payload interface.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Callable

from .authz import Authz
from .errors import err
from .model import Kind, Person, Session, Status
from .storage import Store

DEFAULT_IDLE_MINUTES = 30
_PBKDF2_ROUNDS = 50_000


def hash_password(password: str, salt: str | None = None) -> str:
    salt = salt or secrets.token_hex(8)
    digest = hashlib.pbkdf2_hmac("sha256", password.encode(), salt.encode(), _PBKDF2_ROUNDS)
    return f"{salt}${digest.hex()}"


def verify_password(password: str, stored: str) -> bool:
    salt, _, digest = stored.partition("$")
    candidate = hashlib.pbkdf2_hmac("sha256", password.encode(), salt.encode(), _PBKDF2_ROUNDS)
    return secrets.compare_digest(candidate.hex(), digest)


def sample_digest(sample: bytes) -> str:
    return hashlib.sha256(sample).hexdigest()


@dataclass
class LoginResult:
    token: str
    role_ids: tuple[str, ...]
    active_role_id: str | None
    pending: bool  # more than one role: choose_role must follow


class SessionService:
    def __init__(self, store: Store, authz: Authz,
                 clock: Callable[[], datetime] | None = None,
                 idle_minutes: int = DEFAULT_IDLE_MINUTES,
                 captcha_hook: Callable[[str], bool] | None = None):
        self.store = store
        self.authz = authz
        self.clock = clock or store.clock
        self.idle = timedelta(minutes=idle_minutes)
        # pluggable automated-response guard; default accepts everything
        self.captcha_hook = captcha_hook or (lambda username: True)

    # -- lifecycle ---------------------------------------------------------

    def login(self, username: str, password: str,
              voice_sample: bytes | None = None) -> LoginResult:
        if not self.captcha_hook(username):
            raise err("LOGIN_FAILURE")
        from .model import validate_username
        if not validate_username(username):
            raise err("MALFORMED_USERNAME")
        person = self._person_by_username(username)
        if person is None or person.status == Status.UNAVAILABLE \
                or not verify_password(password, person.password_digest):
            raise err("LOGIN_FAILURE")
        if person.high_privileged and person.biometric_digest is not None:
            if voice_sample is None:
                raise err("BIOMETRIC_REQUIRED")
            if sample_digest(voice_sample) != person.biometric_digest:
                raise err("BIOMETRIC_MISMATCH")
        now = self.clock()
        roles = tuple(sorted(person.role_ids))
        active = roles[0] if len(roles) == 1 else None
        session = Session(
            token=secrets.token_hex(16),
            person_id=person.id,
            created_at=now,
            last_activity=now,
            active_role_id=active,
            pending_role_ids=roles if active is None else (),
        )
        with self.store.txn() as txn:
            txn.put(Kind.SESSION, session)
            txn.append_audit(person.id, "session.login", (("person", person.id),),
                             f"login {username}")
        return LoginResult(token=session.token, role_ids=roles,
                           active_role_id=active, pending=active is None and len(roles) > 1)

    def choose_role(self, token: str, role_id: str) -> Session:
        session = self.require(token)
        if session.active_role_id is not None:
            raise err("ROLE_ALREADY_CHOSEN")
        person = self.store.get(Kind.PERSON, session.person_id)
        if role_id not in person.role_ids:
            raise err("FOREIGN_ROLE")
        session.active_role_id = role_id
        session.pending_role_ids = ()
        with self.store.txn() as txn:
            txn.put(Kind.SESSION, session)
            txn.append_audit(person.id, "session.choose_role",
                             (("person", person.id), ("role", role_id)), "")
        return session

    def touch_or_expire(self, token: str, now: datetime | None = None) -> Session:
        """Refresh the idle clock, or terminate the session if the window passed."""
        now = now or self.clock()
        try:
            session = self.store.get(Kind.SESSION, token)
        except Exception:
            raise err("UNKNOWN_TOKEN")
        if now - session.last_activity >= self.idle:
            with self.store.txn() as txn:
                txn.delete(Kind.SESSION, token)
            raise err("SESSION_EXPIRED")
        session.last_activity = now
        with self.store.txn() as txn:
            txn.put(Kind.SESSION, session)
        return session

    def require(self, token: str) -> Session:
        """Every module funnels through here: no operation runs on a dead token."""
        return self.touch_or_expire(token)

    def logout(self, token: str) -> None:
        session = self.require(token)
        with self.store.txn() as txn:
            txn.delete(Kind.SESSION, token)
            txn.append_audit(session.person_id, "session.logout",
                             (("person", session.person_id),), "Logged out successfully")

    # -- biometric stub ------------------------------------------------------

    def enroll_biometric(self, token: str, sample: bytes) -> str:
        session = self.require(token)
        self.authz.require(session, "addBiometric")
        if not sample:
            raise err("EMPTY_SAMPLE")
        with self.store.txn() as txn:
            person = txn.get(Kind.PERSON, session.person_id)
            if not person.high_privileged:
                raise err("NOT_HIGH_PRIVILEGED")
            if person.biometric_digest is not None:
                raise err("ALREADY_ENROLLED")
            person.biometric_digest = sample_digest(sample)
            txn.put(Kind.PERSON, person)
            txn.append_audit(person.id, "session.enroll_biometric",
                             (("person", person.id),), "voice sample stored")
        return person.biometric_digest

    # -- helpers ------------------------------------------------------------

    def _person_by_username(self, username: str) -> Person | None:
        matches = self.store.scan(Kind.PERSON, lambda p: p.username == username)
        return matches[0] if matches else None
