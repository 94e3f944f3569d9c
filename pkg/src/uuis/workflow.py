"""Request submission and leveled approval.

A request snapshots its requester's level at submission. Level-3 requests are
approved automatically on submission; everything else waits for a single
decision by any holder of the approval permission at least one level above the
requester (within scope). Decided requests are immutable; a rejection always
carries a reason and enqueues exactly one outbox notification to the
requester.
"""

from __future__ import annotations

from datetime import datetime
from typing import Callable

from .authz import Authz
from .errors import err
from .inventory import parse_barcode_text
from .model import (
    DeliveryState,
    Kind,
    Level,
    OutboxMessage,
    Person,
    Request,
    RequestKind,
    RequestState,
)
from .sessions import SessionService
from .storage import Store

CREATE_PERMISSION = {
    RequestKind.ACQUISITION: "createAcquisitionRequest",
    RequestKind.REPARATION: "createReparationRequest",
    RequestKind.ELIMINATION: "createEliminationRequest",
    RequestKind.MOVE: "createMoveRequest",
}


class WorkflowService:
    def __init__(self, store: Store, sessions: SessionService, authz: Authz,
                 clock: Callable[[], datetime] | None = None):
        self.store = store
        self.sessions = sessions
        self.authz = authz
        self.clock = clock or store.clock

    def submit(self, token: str, kind: RequestKind | str | None,
               text: str = "", *, barcodes: list[str] | str | None = None,
               target_location_id: str | None = None) -> Request:
        session = self.sessions.require(token)
        if kind is None or kind == "":
            raise err("NO_KIND_CHOSEN")
        try:
            kind = RequestKind(kind)
        except ValueError:
            raise err("NO_KIND_CHOSEN", f"unknown request kind {kind!r}")
        actor = self.authz.require(session, CREATE_PERMISSION[kind])
        item_barcodes: tuple[str, ...] = ()
        if kind == RequestKind.MOVE:
            if isinstance(barcodes, str):
                barcodes = parse_barcode_text(barcodes)
            if not barcodes:
                raise err("MISSING_BARCODES")
            if not target_location_id:
                raise err("MISSING_LOCATION")
            self.store.get(Kind.LOCATION, target_location_id)
            item_barcodes = tuple(barcodes)
            self._verify_items_in_scope(actor, item_barcodes)
            if not text:
                raise err("EMPTY_TEXT", "Please type a description of the request")
        elif not text:
            raise err("EMPTY_TEXT")
        now = self.clock()
        auto = actor.level == Level.UNIVERSITY
        with self.store.txn() as txn:
            request = Request(
                id=txn.new_id(Kind.REQUEST),
                kind=kind,
                text=text,
                requester_id=actor.id,
                requester_level=actor.level,
                state=RequestState.APPROVED if auto else RequestState.PENDING,
                created_at=now,
                item_barcodes=item_barcodes,
                target_location_id=target_location_id,
                decided_by=actor.id if auto else None,
                decided_at=now if auto else None,
            )
            txn.put(Kind.REQUEST, request)
            txn.append_audit(actor.id, "request.submit", (("request", request.id),),
                             f"{kind.value}{' (auto-approved at level 3)' if auto else ''}")
        return request

    def _verify_items_in_scope(self, actor: Person, barcodes: tuple[str, ...]) -> None:
        by_barcode = {a.barcode: a for a in self.store.scan(Kind.ASSET)}
        scope = actor.scope()
        for barcode in barcodes:
            asset = by_barcode.get(barcode)
            if asset is None or not scope.contains(asset.faculty_id, asset.department_id):
                raise err("FOREIGN_ITEM",
                          f"item {barcode} doesn't belong to your faculty/department")

    def list_requests(self, token: str) -> list[Request]:
        """Own requests always; holders of seeRequestsAll also get the decidable set."""
        session = self.sessions.require(token)
        viewer = self.store.get(Kind.PERSON, session.person_id)
        sees_all, _ = self.authz.check(session, "seeRequestsAll")
        scope = viewer.scope()

        def visible(request: Request) -> bool:
            if request.requester_id == viewer.id:
                return True
            if not sees_all:
                return False
            if request.requester_level >= viewer.level:
                return False
            requester = self.store.get(Kind.PERSON, request.requester_id)
            return scope.contains(requester.faculty_id, requester.department_id)

        records = self.store.scan(Kind.REQUEST, visible)
        with self.store.txn() as txn:
            txn.append_audit(viewer.id, "request.view", (), f"{len(records)} visible")
        return records

    def decide(self, token: str, request_id: str, verdict: str,
               reason: str | None = None) -> Request:
        session = self.sessions.require(token)
        actor = self.authz.require(session, "aprove_rejectRequest")
        if verdict not in ("approve", "reject"):
            raise err("VALIDATION", f"verdict must be approve or reject, got {verdict!r}")
        if verdict == "reject" and not (reason or "").strip():
            raise err("REASON_REQUIRED")
        with self.store.txn() as txn:
            request = txn.get(Kind.REQUEST, request_id)
            if request.state != RequestState.PENDING:
                raise err("ALREADY_DECIDED")
            if actor.level < request.requester_level + 1:
                raise err("INSUFFICIENT_LEVEL")
            requester = txn.get(Kind.PERSON, request.requester_id)
            if not actor.scope().contains(requester.faculty_id, requester.department_id):
                raise err("OUT_OF_SCOPE")
            now = self.clock()
            request.state = (RequestState.APPROVED if verdict == "approve"
                             else RequestState.REJECTED)
            request.decided_by = actor.id
            request.decided_at = now
            if verdict == "reject":
                request.rejection_reason = reason
                message = OutboxMessage(
                    id=txn.new_id(Kind.OUTBOX),
                    recipient_id=request.requester_id,
                    subject=f"Request {request.id} rejected",
                    body=f"Your {request.kind.value} request was rejected: {reason}",
                    created_at=now,
                    delivery_state=DeliveryState.QUEUED,
                )
                txn.put(Kind.OUTBOX, message)
            txn.put(Kind.REQUEST, request)
            txn.append_audit(actor.id, "request.decide", (("request", request_id),),
                             f"{verdict}" + (f": {reason}" if reason else ""))
        return request
