from __future__ import annotations

import json
from datetime import date

import pytest

from conftest import ADMIN_PASSWORD, login, make_person
from uuis.authz import ROLES_FILE, load_role_definitions
from uuis.errors import UuisError
from uuis.model import Kind, Level, PermissionGrant, Scope, Status

BASE = {
    "basicSearch", "createAcquisitionRequest", "createEliminationRequest",
    "createReparationRequest", "login_logout", "seeMyAssets", "seeMyLicenses",
    "seeMyLocations", "seeMyProfile", "seeMyPermissions", "seeMyRole",
    "selectLanguage",
}


class TestSeeding:
    def test_eight_roles_exist(self, rt):
        names = {r.name for r in rt.store.scan(Kind.ROLE)}
        assert names == {
            "administrator", "full_time_faculty", "part_time_faculty",
            "full_time_worker", "part_time_worker", "grad_student",
            "undergrad_student", "independent_student",
        }

    def test_administrator_has_all_62(self, rt):
        grants = rt.authz.grants_of("administrator")
        assert len(grants) == 62
        assert BASE <= grants

    def test_part_time_worker_exact_set(self, rt):
        expected = BASE | {"see_printFloorPlan", "seeAssets", "seeLicenses",
                           "seeLocations"}
        assert rt.authz.grants_of("part_time_worker") == expected

    def test_undergrad_exact_set(self, rt):
        assert rt.authz.grants_of("undergrad_student") == BASE | {"see_printFloorPlan"}

    def test_independent_student_is_base_only(self, rt):
        assert rt.authz.grants_of("independent_student") == BASE

    def test_every_grant_resolves_in_catalog(self, rt):
        catalog = rt.authz.catalog()
        for role in rt.store.scan(Kind.ROLE):
            assert role.permission_names() <= catalog

    def test_catalog_mirrors_data_file(self, rt):
        defs = json.loads(ROLES_FILE.read_text())
        assert set(defs["catalog"]) <= rt.authz.catalog()
        assert len(defs["catalog"]) == 62

    def test_second_seed_refused(self, rt):
        with pytest.raises(UuisError) as exc:
            rt.authz.seed_default_roles()
        assert exc.value.code == "ALREADY_SEEDED"


class TestVisibleScope:
    def test_level3_unrestricted(self, org, rt):
        scope = rt.authz.visible_scope(org["people"]["admin3"])
        assert scope == Scope(Level.UNIVERSITY)

    def test_level1_faculty_and_department(self, org, rt):
        person = org["people"]["admin1_cs"]
        scope = rt.authz.visible_scope(person)
        assert scope.faculty_id == org["fac_a"].id
        assert scope.department_id == org["dep_cs"].id

    def test_level0_and_level1_identical(self, org, rt):
        level1 = rt.authz.visible_scope(org["people"]["admin1_cs"])
        level0 = rt.authz.visible_scope(org["people"]["grad_cs"])
        assert (level1.faculty_id, level1.department_id) == \
            (level0.faculty_id, level0.department_id)

    def test_monotone_over_all_level_org_combos(self, org, rt):
        # enumerate matched persons at every level over the same org cell
        fac, dep = org["fac_a"].id, org["dep_cs"].id
        regions = [(None, None), (fac, None), (fac, dep),
                   (org["fac_b"].id, None), (fac, org["dep_me"].id)]
        scopes = [
            Scope(Level.USER, faculty_id=fac, department_id=dep),
            Scope(Level.DEPARTMENT, faculty_id=fac, department_id=dep),
            Scope(Level.FACULTY, faculty_id=fac),
            Scope(Level.UNIVERSITY),
        ]
        visible_sets = [
            {region for region in regions if s.contains(*region)} for s in scopes
        ]
        for smaller, larger in zip(visible_sets, visible_sets[1:]):
            assert smaller <= larger


class TestCheck:
    def test_level2_manages_other_department_same_faculty(self, org, rt):
        token = org["tokens"]["admin2_a"]
        session = rt.sessions.require(token)
        allowed, _ = rt.authz.check(session, "editAsset",
                                    (org["fac_a"].id, org["dep_me"].id))
        assert allowed

    def test_level1_denied_other_faculty(self, org, rt):
        session = rt.sessions.require(org["tokens"]["admin1_cs"])
        allowed, reason = rt.authz.check(session, "editAsset", (org["fac_b"].id, None))
        assert not allowed and reason == "OUT_OF_SCOPE"

    def test_part_time_worker_denied_advanced_search(self, org, rt):
        session = rt.sessions.require(org["tokens"]["worker_cs"])
        allowed, reason = rt.authz.check(session, "advancedSearch")
        assert not allowed and reason == "PERMISSION_DENIED"

    def test_expired_grant_behaves_as_absent(self, org, rt, clock):
        person = make_person(rt, "extrausr", Level.USER, org["fac_a"].id,
                             org["dep_cs"].id, roles=("independent_student",),
                             extra_grants={PermissionGrant("seeAudit",
                                                           clock().date())})
        token = login(rt, "extrausr")
        session = rt.sessions.require(token)
        assert rt.authz.check(session, "seeAudit")[0]  # valid through the due date
        clock.advance(days=1)
        assert not rt.authz.check(session, "seeAudit")[0]

    def test_inactive_role_does_not_grant(self, org, rt):
        make_person(rt, "tworoles", Level.USER, org["fac_a"].id, org["dep_cs"].id,
                    roles=("administrator", "undergrad_student"))
        token = login(rt, "tworoles", role="undergrad_student")
        session = rt.sessions.require(token)
        assert not rt.authz.check(session, "deleteAssets")[0]

    def test_check_is_deterministic(self, org, rt):
        session = rt.sessions.require(org["tokens"]["grad_cs"])
        first = rt.authz.check(session, "borrowAssets")
        assert all(rt.authz.check(session, "borrowAssets") == first for _ in range(5))


class TestRoleAdmin:
    def test_add_role(self, org, rt):
        role = rt.role_admin.add_role(org["tokens"]["admin3"], "lab_tech",
                                      ["seeAssets", "borrowAssets"])
        assert rt.authz.grants_of("lab_tech") == {"seeAssets", "borrowAssets"}
        assert role.id.startswith("rol-")

    def test_duplicate_role_name(self, org, rt):
        with pytest.raises(UuisError) as exc:
            rt.role_admin.add_role(org["tokens"]["admin3"], "administrator",
                                   ["seeAssets"])
        assert exc.value.code == "DUPLICATE_NAME"

    def test_empty_grants(self, org, rt):
        with pytest.raises(UuisError) as exc:
            rt.role_admin.add_role(org["tokens"]["admin3"], "nothing", [])
        assert exc.value.code == "EMPTY_GRANTS"

    def test_empty_name(self, org, rt):
        with pytest.raises(UuisError) as exc:
            rt.role_admin.add_role(org["tokens"]["admin3"], "", ["seeAssets"])
        assert exc.value.code == "EMPTY_NAME"

    def test_grant_with_due_date(self, org, rt):
        person = org["people"]["grad_cs"]
        grants = rt.role_admin.edit_role_for_person(
            org["tokens"]["admin3"], [person.id],
            add=[("seeAudit", date(2026, 12, 31))])
        assert PermissionGrant("seeAudit", date(2026, 12, 31)) in grants

    def test_grant_without_due_date_lives_until_account_expiry(self, org, rt):
        person = org["people"]["grad_cs"]
        grants = rt.role_admin.edit_role_for_person(
            org["tokens"]["admin3"], [person.id], add=["seeAudit"])
        (grant,) = [g for g in grants if g.permission == "seeAudit"]
        assert grant.due_date is None

    def test_removing_everything_is_refused(self, org, rt):
        person = org["people"]["grad_cs"]
        role_ids = list(person.role_ids)
        with pytest.raises(UuisError) as exc:
            rt.role_admin.edit_role_for_person(
                org["tokens"]["admin3"], [person.id], remove_roles=role_ids)
        assert exc.value.code == "EMPTY_GRANT_LIST"

    def test_person_selection_errors(self, org, rt):
        token = org["tokens"]["admin3"]
        with pytest.raises(UuisError) as exc:
            rt.role_admin.edit_role_for_person(token, [])
        assert exc.value.code == "NO_PERSON_SELECTED"
        people = org["people"]
        with pytest.raises(UuisError) as exc:
            rt.role_admin.edit_role_for_person(
                token, [people["grad_cs"].id, people["grad_me"].id])
        assert exc.value.code == "MULTIPLE_PERSONS_SELECTED"

    def test_add_and_edit_permission(self, org, rt):
        token = org["tokens"]["admin3"]
        rt.role_admin.add_permission(token, "exportAsset")
        assert "exportAsset" in rt.authz.catalog()
        rt.role_admin.edit_permission(token, "exportAsset", "exportAssets")
        assert "exportAssets" in rt.authz.catalog()
        assert "exportAsset" not in rt.authz.catalog()

    def test_edit_granted_permission_refused(self, org, rt):
        with pytest.raises(UuisError) as exc:
            rt.role_admin.edit_permission(org["tokens"]["admin3"], "seeAssets", "x")
        assert exc.value.code == "PERMISSION_IN_USE"

    def test_bulk_role_assignment(self, org, rt):
        role = rt.authz.role_by_name("grad_student")
        ids = [org["people"]["worker_cs"].id, org["people"]["grad_me"].id,
               org["people"]["admin1_me"].id]
        outcomes = rt.role_admin.assign_role_bulk(org["tokens"]["admin3"], ids, role.id)
        assert all(o.ok for o in outcomes) and len(outcomes) == 3

    def test_bulk_empty_selection(self, org, rt):
        with pytest.raises(UuisError) as exc:
            rt.role_admin.assign_role_bulk(org["tokens"]["admin3"], [], "rol-000001")
        assert exc.value.code == "EMPTY_SELECTION"

    def test_bulk_missing_choice(self, org, rt):
        with pytest.raises(UuisError) as exc:
            rt.role_admin.assign_role_bulk(
                org["tokens"]["admin3"], [org["people"]["grad_cs"].id], None)
        assert exc.value.code == "MISSING_ROLE_OR_PERMISSION"

    def test_bulk_out_of_scope_item_fails_others_proceed(self, org, rt):
        # a faculty-A admin touching a faculty-B person: that item only fails
        person_b = make_person(rt, "biologst", Level.USER, org["fac_b"].id,
                               org["dep_bio"].id, roles=("grad_student",))
        role = rt.authz.role_by_name("part_time_worker")
        token = org["tokens"]["admin2_a"]
        outcomes = rt.role_admin.assign_role_bulk(
            token, [org["people"]["grad_cs"].id, person_b.id], role.id)
        by_id = {o.person_id: o for o in outcomes}
        assert by_id[org["people"]["grad_cs"].id].ok
        assert not by_id[person_b.id].ok
        assert by_id[person_b.id].error_code == "OUT_OF_SCOPE"
        # sequential single-item application gives the same verdicts
        sequential = [
            rt.role_admin.assign_role_bulk(token, [pid], role.id)[0].ok
            if pid != person_b.id else False
            for pid in (org["people"]["grad_cs"].id,)
        ]
        assert sequential == [True]
