from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from uuis.gateway.runtime import Config, Runtime
from uuis.model import FieldSpec, EntityType, Kind, Level, Person, Status
from uuis.sessions import hash_password

ADMIN_PASSWORD = "secret12"
START = datetime(2026, 1, 5, 9, 0, tzinfo=timezone.utc)


class FakeClock:
    def __init__(self, start: datetime = START):
        self.now = start

    def __call__(self) -> datetime:
        return self.now

    def advance(self, **kwargs) -> None:
        self.now += timedelta(**kwargs)


@pytest.fixture
def clock() -> FakeClock:
    return FakeClock()


@pytest.fixture
def rt(clock: FakeClock) -> Runtime:
    runtime = Runtime(Config(), clock=clock)
    runtime.init(ADMIN_PASSWORD)
    yield runtime
    runtime.close()


def make_person(rt: Runtime, username: str, level: Level, faculty_id=None,
                department_id=None, roles=("administrator",), password="pw",
                high_privileged=False, extra_grants=frozenset()) -> Person:
    role_ids = {rt.authz.role_by_name(name).id for name in roles}
    with rt.store.txn() as txn:
        person = Person(
            id=txn.new_id(Kind.PERSON),
            username=username,
            password_digest=hash_password(password),
            name=username,
            title="",
            contact="",
            level=level,
            status=Status.AVAILABLE,
            faculty_id=faculty_id,
            department_id=department_id,
            role_ids=role_ids,
            extra_grants=set(extra_grants),
            high_privileged=high_privileged,
        )
        txn.put(Kind.PERSON, person)
        txn.append_audit("system", "person.seed", (("person", person.id),), username)
    return person


def login(rt: Runtime, username: str, password="pw", role=None) -> str:
    result = rt.sessions.login(username, password)
    if result.pending:
        role_id = (rt.authz.role_by_name(role).id if role else result.role_ids[0])
        rt.sessions.choose_role(result.token, role_id)
    return result.token


def add_type(rt: Runtime, token: str, kind: Kind, name, fields=None) -> EntityType:
    defaults = {
        Kind.ASSET: [("name", True), ("barcode", True), ("brand", False)],
        Kind.LICENSE: [("name", True), ("seats", False), ("price", False)],
        Kind.LOCATION: [("location_number", True), ("capacity", False)],
        Kind.PERSON: [("username", True), ("name", False)],
    }
    return rt.inventory.create_type(token, kind, name, fields or defaults[kind])


@pytest.fixture
def org(rt: Runtime):
    """Two faculties, three departments, base types, and persons on every level."""
    admin_token = login(rt, "sysadmin", ADMIN_PASSWORD)
    fac_a = rt.inventory.add_faculty(admin_token, {"name": "Engineering"})
    fac_b = rt.inventory.add_faculty(admin_token, {"name": "Science"})
    dep_cs = rt.inventory.add_department(
        admin_token, {"name": "Computer Science", "faculty_id": fac_a.id})
    dep_me = rt.inventory.add_department(
        admin_token, {"name": "Mechanics", "faculty_id": fac_a.id})
    dep_bio = rt.inventory.add_department(
        admin_token, {"name": "Biology", "faculty_id": fac_b.id})
    types = {
        "asset": add_type(rt, admin_token, Kind.ASSET, "generic"),
        "chair": add_type(rt, admin_token, Kind.ASSET, "chair"),
        "pc": add_type(rt, admin_token, Kind.ASSET, "pc"),
        "license": add_type(rt, admin_token, Kind.LICENSE, "software"),
        "building": add_type(rt, admin_token, Kind.LOCATION, "building"),
        "office": add_type(rt, admin_token, Kind.LOCATION, "office"),
        "teaching_lab": add_type(rt, admin_token, Kind.LOCATION, "teaching_lab"),
        "research_lab": add_type(rt, admin_token, Kind.LOCATION, "research_lab"),
    }
    people = {
        "admin3": rt.store.get(Kind.PERSON, "per-000001"),
        "admin2_a": make_person(rt, "adminfca", Level.FACULTY, fac_a.id),
        "admin2_b": make_person(rt, "adminfcb", Level.FACULTY, fac_b.id),
        "admin1_cs": make_person(rt, "admindcs", Level.DEPARTMENT, fac_a.id, dep_cs.id),
        "admin1_me": make_person(rt, "adminmec", Level.DEPARTMENT, fac_a.id, dep_me.id),
        "grad_cs": make_person(rt, "gradcsst", Level.USER, fac_a.id, dep_cs.id,
                               roles=("grad_student",)),
        "grad_me": make_person(rt, "gradmest", Level.USER, fac_a.id, dep_me.id,
                               roles=("grad_student",)),
        "worker_cs": make_person(rt, "workercs", Level.USER, fac_a.id, dep_cs.id,
                                 roles=("part_time_worker",)),
    }
    tokens = {
        "admin3": admin_token,
        "admin2_a": login(rt, "adminfca"),
        "admin2_b": login(rt, "adminfcb"),
        "admin1_cs": login(rt, "admindcs"),
        "admin1_me": login(rt, "adminmec"),
        "grad_cs": login(rt, "gradcsst"),
        "grad_me": login(rt, "gradmest"),
        "worker_cs": login(rt, "workercs"),
    }
    return {
        "fac_a": fac_a, "fac_b": fac_b,
        "dep_cs": dep_cs, "dep_me": dep_me, "dep_bio": dep_bio,
        "types": types, "people": people, "tokens": tokens,
    }


def add_asset(rt: Runtime, token: str, name: str, barcode: str, type_id=None,
              **extra) -> object:
    fields = {"name": name, "barcode": barcode, "type_id": type_id, **extra}
    return rt.inventory.add_asset(token, fields)
