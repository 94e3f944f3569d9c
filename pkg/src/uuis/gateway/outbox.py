"""Notification outbox: the stand-in for outbound email.

Borrow and reject flows enqueue messages inside their own transactions; this
service covers inspection, draining (print-and-mark-delivered), and explicit
admin notices. A real transport adapter can replace draining; the default
keeps everything inspectable in the store.
"""

from __future__ import annotations

from datetime import datetime
from typing import Callable

from ..authz import Authz
from ..model import DeliveryState, Kind, OutboxMessage
from ..sessions import SessionService
from ..storage import Store, encode_record


class OutboxService:
    def __init__(self, store: Store, sessions: SessionService, authz: Authz,
                 clock: Callable[[], datetime] | None = None):
        self.store = store
        self.sessions = sessions
        self.authz = authz
        self.clock = clock or store.clock

    def list_messages(self, token: str, *, state: DeliveryState | None = None) -> list[dict]:
        session = self.sessions.require(token)
        self.authz.require(session, "seeAudit")
        messages = self.store.scan(
            Kind.OUTBOX, (lambda m: m.delivery_state == state) if state else None)
        return [encode_record(m) for m in messages]

    def drain(self, token: str | None = None, actor_id: str = "system") -> list[dict]:
        """Mark queued messages delivered, returning them (CLI prints them)."""
        if token is not None:
            session = self.sessions.require(token)
            actor_id = self.authz.require(session, "seeAudit").id
        queued = self.store.scan(
            Kind.OUTBOX, lambda m: m.delivery_state == DeliveryState.QUEUED)
        if not queued:
            return []
        with self.store.txn() as txn:
            for message in queued:
                message.delivery_state = DeliveryState.DELIVERED
                txn.put(Kind.OUTBOX, message)
            txn.append_audit(actor_id, "outbox.drain", (),
                             f"{len(queued)} message(s) delivered")
        return [encode_record(m) for m in queued]

    def enqueue_notice(self, actor_id: str, recipient_id: str,
                       subject: str, body: str) -> OutboxMessage:
        """Explicit admin notice; the only outbox writer besides borrow/reject."""
        with self.store.txn() as txn:
            message = OutboxMessage(
                id=txn.new_id(Kind.OUTBOX),
                recipient_id=recipient_id,
                subject=subject,
                body=body,
                created_at=self.clock(),
            )
            txn.put(Kind.OUTBOX, message)
            txn.append_audit(actor_id, "outbox.notice", (("outbox", message.id),), subject)
        return message
