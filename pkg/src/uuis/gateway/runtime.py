"""Configuration and service wiring for the deployable surface.

Every Config field can be overridden by a UUIS_* environment variable; bad
values abort at startup with a diagnostic rather than limping along.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable

from ..audit import AuditService
from ..authz import Authz, RoleAdmin
from ..importer import ImporterService
from ..inventory import InventoryService
from ..model import Kind, Level, Person, Status
from ..reporting import DEFAULT_ALIASES, ReportingService
from ..search import SearchService
from ..sessions import SessionService, hash_password
from ..storage import Store
from ..workflow import WorkflowService
from .outbox import OutboxService

BOOTSTRAP_USERNAME = "sysadmin"  # 8 characters, letter first


@dataclass
class Config:
    host: str = "127.0.0.1"
    port: int = 8080
    data_dir: str | None = None  # None: private in-memory store
    idle_minutes: int = 30
    audit_token_minutes: int = 10
    report_aliases: dict[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_ALIASES))
    seed_files: dict[str, str] = field(default_factory=dict)  # kind -> csv path

    def __post_init__(self) -> None:
        if not (0 < self.port < 65536):
            raise ValueError(f"port {self.port} is out of range")
        if self.idle_minutes <= 0:
            raise ValueError("idle_minutes must be positive")
        if self.audit_token_minutes <= 0:
            raise ValueError("audit_token_minutes must be positive")
        from ..model import FIELD_UNIVERSE
        for kind in self.seed_files:
            if Kind(kind) not in FIELD_UNIVERSE:  # unknown/unimportable kinds abort
                raise ValueError(f"seed files are supported for "
                                 f"{sorted(k.value for k in FIELD_UNIVERSE)}, "
                                 f"not {kind}")

    @classmethod
    def from_env(cls, **overrides) -> "Config":
        import json

        env = os.environ
        values = dict(
            host=env.get("UUIS_HOST", cls.host),
            port=int(env.get("UUIS_PORT", cls.port)),
            data_dir=env.get("UUIS_DATA_DIR") or None,
            idle_minutes=int(env.get("UUIS_IDLE_MINUTES", cls.idle_minutes)),
            audit_token_minutes=int(
                env.get("UUIS_AUDIT_TOKEN_MINUTES", cls.audit_token_minutes)),
        )
        if env.get("UUIS_REPORT_ALIASES"):
            values["report_aliases"] = {
                kind: tuple(names)
                for kind, names in json.loads(env["UUIS_REPORT_ALIASES"]).items()
            }
        if env.get("UUIS_SEED_FILES"):  # JSON object: kind -> csv path
            values["seed_files"] = json.loads(env["UUIS_SEED_FILES"])
        values.update(overrides)
        return cls(**values)

    def db_path(self) -> str | None:
        if self.data_dir is None:
            return None
        path = Path(self.data_dir)
        path.mkdir(parents=True, exist_ok=True)
        return str(path / "uuis.sqlite3")


class Runtime:
    """All services wired over one store; the clock is injected for tests."""

    def __init__(self, config: Config | None = None,
                 clock: Callable[[], datetime] | None = None):
        self.config = config or Config()
        self.clock = clock or (lambda: datetime.now().astimezone())
        self.store = Store(self.config.db_path(), clock=self.clock)
        self.authz = Authz(self.store, self.clock)
        self.sessions = SessionService(self.store, self.authz, self.clock,
                                       idle_minutes=self.config.idle_minutes)
        self.role_admin = RoleAdmin(self.store, self.sessions, self.authz)
        self.inventory = InventoryService(self.store, self.sessions, self.authz, self.clock)
        self.importer = ImporterService(self.store, self.sessions, self.authz, self.clock)
        self.workflow = WorkflowService(self.store, self.sessions, self.authz, self.clock)
        self.search = SearchService(self.store, self.sessions, self.authz)
        self.reporting = ReportingService(self.store, self.sessions, self.authz,
                                          aliases=self.config.report_aliases)
        self.audit = AuditService(self.store, self.sessions, self.authz, self.clock,
                                  token_minutes=self.config.audit_token_minutes)
        self.outbox = OutboxService(self.store, self.sessions, self.authz, self.clock)

    def init(self, admin_password: str = "changeme") -> Person:
        """Seed the catalog, the default roles, and the bootstrap administrator.

        Configured seed files (kind -> CSV with a header naming the target
        fields) are imported on the administrator's behalf afterwards.
        """
        self.authz.seed_default_roles()
        admin_role = self.authz.role_by_name("administrator")
        with self.store.txn() as txn:
            admin = Person(
                id=txn.new_id(Kind.PERSON),
                username=BOOTSTRAP_USERNAME,
                password_digest=hash_password(admin_password),
                name="Bootstrap administrator",
                title="administrator",
                contact="",
                level=Level.UNIVERSITY,
                status=Status.AVAILABLE,
                role_ids={admin_role.id},
            )
            txn.put(Kind.PERSON, admin)
            txn.append_audit("system", "person.seed", (("person", admin.id),),
                             f"bootstrap administrator {BOOTSTRAP_USERNAME}")
        if self.config.seed_files:
            self._import_seed_files(admin_password)
        return admin

    def _import_seed_files(self, admin_password: str) -> None:
        from ..importer import ColumnMapping, parse_rows

        login = self.sessions.login(BOOTSTRAP_USERNAME, admin_password)
        for kind_name, path in self.config.seed_files.items():
            text = Path(path).read_text(encoding="utf-8")
            rows = parse_rows(text)
            if not rows:
                continue
            header, data = rows[0], rows[1:]
            mapping = ColumnMapping(
                target_kind=Kind(kind_name),
                entries=[(i, name) for i, name in enumerate(header)],
            )
            self.importer.commit_import(login.token, mapping, data)
        self.sessions.logout(login.token)

    def close(self) -> None:
        self.store.close()
