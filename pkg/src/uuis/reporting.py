"""Capacity-comparison reports and the dynamic floor plan.

Report rows compare each location's capacity with the number of matching
items currently there. Item categories are resolved through a configurable
alias table mapping report kinds to asset-type names. The floor plan is a
vector document generated from the current snapshot (identical snapshots
yield identical bytes) with per-room annotations resolved at render time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .authz import Authz
from .errors import err
from .model import Kind, Location, Status, region_of
from .sessions import SessionService
from .storage import Store

LOCATION_REPORT_TYPES = ("teaching_lab", "research_lab", "office")

# report kind -> asset-type name aliases (or the student-role marker)
DEFAULT_ALIASES: dict[str, tuple[str, ...]] = {
    "chairs": ("chair",),
    "tables": ("table",),
    "pc": ("pc", "computer"),
}

# report kind -> location types it applies to
VALID_COMBINATIONS: dict[str, tuple[str, ...]] = {
    "chairs": LOCATION_REPORT_TYPES,
    "tables": LOCATION_REPORT_TYPES,
    "pc": ("teaching_lab", "office"),
    "students": ("research_lab",),
}


@dataclass
class CapacityReportRow:
    location_id: str
    location_number: str
    capacity: int
    counted: int

    @property
    def difference(self) -> int:
        return self.capacity - self.counted


def _normalize(name: str) -> str:
    return name.strip().lower().replace(" ", "_")


class ReportingService:
    def __init__(self, store: Store, sessions: SessionService, authz: Authz,
                 aliases: dict[str, tuple[str, ...]] | None = None):
        self.store = store
        self.sessions = sessions
        self.authz = authz
        self.aliases = aliases or DEFAULT_ALIASES

    # ------------------------------------------------------------- reports

    def capacity_report(self, token: str, location_type: str | None,
                        comparison: str | None) -> list[CapacityReportRow]:
        session = self.sessions.require(token)
        actor = self.authz.require(session, "create_printReport")
        if not location_type:
            raise err("MISSING_TYPE")
        if not comparison:
            raise err("MISSING_KIND")
        location_type = _normalize(location_type)
        comparison = _normalize(comparison)
        if location_type not in LOCATION_REPORT_TYPES:
            raise err("MISSING_TYPE", f"unknown location type {location_type!r}")
        if comparison not in VALID_COMBINATIONS:
            raise err("MISSING_KIND", f"unknown report kind {comparison!r}")
        if location_type not in VALID_COMBINATIONS[comparison]:
            raise err("INVALID_COMBINATION",
                      f"{comparison} report is not defined for {location_type}")
        scope = actor.scope()
        type_names = {t.id: _normalize(t.name) for t in self.store.scan(Kind.TYPE)}
        locations = self.store.scan(
            Kind.LOCATION,
            lambda l: type_names.get(l.type_id) == location_type
            and l.status != Status.UNAVAILABLE
            and scope.contains(*region_of(Kind.LOCATION, l)),
        )
        rows = [
            CapacityReportRow(
                location_id=loc.id,
                location_number=loc.location_number,
                capacity=loc.capacity or 0,
                counted=self._count(loc, comparison, type_names),
            )
            for loc in locations
        ]
        rows.sort(key=lambda r: r.location_number)
        with self.store.txn() as txn:
            txn.append_audit(actor.id, "report.view", (),
                             f"capacity vs {comparison} for {location_type}")
        return rows

    def _count(self, location: Location, comparison: str,
               type_names: dict[str, str]) -> int:
        if comparison == "students":
            return self._count_students(location)
        aliases = {_normalize(a) for a in self.aliases.get(comparison, ())}
        assets = self.store.scan(
            Kind.ASSET,
            lambda a: a.location_id == location.id
            and a.status != Status.UNAVAILABLE
            and type_names.get(a.type_id) in aliases,
        )
        return len(assets)

    def _count_students(self, location: Location) -> int:
        """Distinct persons with a *student role assigned here or in any sub-location."""
        room_ids = {location.id} | self._descendants(location.id)
        assigned = {
            loc.assigned_person_id
            for loc in self.store.scan(Kind.LOCATION, lambda l: l.id in room_ids)
            if loc.assigned_person_id is not None
        }
        student_roles = {r.id for r in self.store.scan(Kind.ROLE)
                         if "student" in r.name.lower()}
        count = 0
        for person_id in assigned:
            person = self.store.get(Kind.PERSON, person_id)
            if person.status != Status.UNAVAILABLE and person.role_ids & student_roles:
                count += 1
        return count

    def _descendants(self, location_id: str) -> set[str]:
        children: dict[str, list[str]] = {}
        for loc in self.store.scan(Kind.LOCATION):
            if loc.parent_location_id is not None:
                children.setdefault(loc.parent_location_id, []).append(loc.id)
        out: set[str] = set()
        stack = [location_id]
        while stack:
            for child in children.get(stack.pop(), []):
                if child not in out:
                    out.add(child)
                    stack.append(child)
        return out

    @staticmethod
    def report_csv(rows: list[CapacityReportRow], comparison: str) -> str:
        lines = [f"location_number,capacity,{comparison},difference"]
        for row in rows:
            lines.append(f"{row.location_number},{row.capacity},{row.counted},{row.difference}")
        return "\n".join(lines) + "\n"

    # ------------------------------------------------------------- floor plan

    def list_plans(self, token: str) -> list[dict[str, Any]]:
        """Locations for which a plan is available, inside the viewer's scope."""
        session = self.sessions.require(token)
        actor = self.authz.require(session, "see_printFloorPlan")
        scope = actor.scope()
        locations = self.store.scan(
            Kind.LOCATION,
            lambda l: l.has_plan and l.status != Status.UNAVAILABLE
            and scope.contains(*region_of(Kind.LOCATION, l)),
        )
        return [{"id": l.id, "location_number": l.location_number,
                 "description": l.description} for l in locations]

    def floor_plan(self, token: str, location_id: str | None) -> dict[str, Any]:
        session = self.sessions.require(token)
        actor = self.authz.require(session, "see_printFloorPlan")
        if not location_id:
            raise err("NO_LOCATION_CHOSEN")
        location = self.store.get(Kind.LOCATION, location_id)
        if not actor.scope().contains(*region_of(Kind.LOCATION, location)):
            raise err("OUT_OF_SCOPE")
        if not location.has_plan:
            raise err("NO_PLAN_AVAILABLE")
        rooms = sorted(
            self.store.scan(Kind.LOCATION,
                            lambda l: l.parent_location_id == location_id
                            and l.status != Status.UNAVAILABLE),
            key=lambda l: l.location_number,
        )
        annotations = [self._room_annotation(room) for room in rooms]
        svg = self._render_svg(location, rooms)
        with self.store.txn() as txn:
            txn.append_audit(actor.id, "floorplan.view", (("location", location_id),), "")
        return {
            "location_id": location_id,
            "location_number": location.location_number,
            "rooms": annotations,
            "svg": svg,
        }

    def _room_annotation(self, room: Location) -> dict[str, Any]:
        type_name = self.store.get(Kind.TYPE, room.type_id).name
        assignee = None
        if room.assigned_person_id is not None:
            person = self.store.get(Kind.PERSON, room.assigned_person_id)
            assignee = person.name or person.username
        faculty = (self.store.get(Kind.FACULTY, room.faculty_id).name
                   if room.faculty_id else None)
        department = (self.store.get(Kind.DEPARTMENT, room.department_id).name
                      if room.department_id else None)
        return {
            "location_id": room.id,
            "room_number": room.location_number,
            "room_type": type_name,
            "assignee": assignee,
            "capacity": room.capacity,
            "faculty": faculty,
            "department": department,
        }

    @staticmethod
    def _render_svg(location: Location, rooms: list[Location]) -> str:
        """Deterministic grid layout: a pure function of the store snapshot."""
        cols = max(1, int(len(rooms) ** 0.5 + 0.999)) if rooms else 1
        cell, pad = 120, 10
        rows_needed = (len(rooms) + cols - 1) // cols if rooms else 1
        width = cols * (cell + pad) + pad
        height = rows_needed * (cell + pad) + pad
        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
            f'data-location-id="{location.id}">',
        ]
        for index, room in enumerate(rooms):
            x = pad + (index % cols) * (cell + pad)
            y = pad + (index // cols) * (cell + pad)
            parts.append(
                f'<rect data-location-id="{room.id}" x="{x}" y="{y}" '
                f'width="{cell}" height="{cell}" fill="#e8eef7" stroke="#4a6fa5"/>'
            )
            parts.append(
                f'<text data-location-id="{room.id}" x="{x + 8}" y="{y + 24}" '
                f'font-size="14">{room.location_number}</text>'
            )
        parts.append("</svg>")
        return "".join(parts)
