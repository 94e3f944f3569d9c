"""Admin command line: init, serve, import, estimate, audit-export, outbox-drain."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ..cocomo import COST_DRIVERS, MODES, estimate, make_input
from ..errors import UuisError
from ..importer import ColumnMapping, parse_rows
from ..model import Kind
from .runtime import BOOTSTRAP_USERNAME, Config, Runtime


def _runtime(data_dir: str | None) -> Runtime:
    return Runtime(Config.from_env(data_dir=data_dir))


@click.group()
def main() -> None:
    """Unified university inventory service."""


@main.command()
@click.option("--data-dir", envvar="UUIS_DATA_DIR", required=True,
              help="Directory for the embedded store.")
@click.option("--admin-password", default="changeme", show_default=True,
              help="Password for the bootstrap administrator.")
def init(data_dir: str, admin_password: str) -> None:
    """Create the schema, the permission catalog, default roles, and the admin."""
    rt = _runtime(data_dir)
    try:
        admin = rt.init(admin_password)
    except UuisError as exc:
        raise click.ClickException(exc.message)
    roles = rt.store.scan(Kind.ROLE)
    click.echo(f"initialized {data_dir}: {len(roles)} default roles, "
               f"administrator account '{BOOTSTRAP_USERNAME}' ({admin.id})")


@main.command()
@click.option("--data-dir", envvar="UUIS_DATA_DIR", required=True)
@click.option("--host", envvar="UUIS_HOST", default="127.0.0.1", show_default=True)
@click.option("--port", envvar="UUIS_PORT", default=8080, show_default=True, type=int)
def serve(data_dir: str, host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .app import create_app

    rt = Runtime(Config.from_env(data_dir=data_dir, host=host, port=port))
    uvicorn.run(create_app(rt), host=host, port=port, log_level="warning")


def _parse_mapping(spec: str) -> list[tuple[int, str]]:
    entries = []
    for part in spec.split(","):
        index, _, field = part.partition("=")
        if not field:
            raise click.ClickException(f"bad mapping entry {part!r}; expected COL=field")
        entries.append((int(index), field.strip()))
    return entries


@main.command(name="import")
@click.argument("file", type=click.Path(exists=True, path_type=Path))
@click.option("--data-dir", envvar="UUIS_DATA_DIR", required=True)
@click.option("--kind", type=click.Choice(["asset", "license", "location", "person"]),
              required=True)
@click.option("--map", "mapping_spec", required=True,
              help="Column mapping, e.g. 0=name,1=barcode.")
@click.option("--location", "location_id", default=None,
              help="Destination location id (required for assets/licenses).")
@click.option("--format", "fmt", type=click.Choice(["csv", "txt"]), default="csv",
              show_default=True)
@click.option("--delimiter", default="\t", help="Cell delimiter for txt format.")
@click.option("--username", envvar="UUIS_USER", default=BOOTSTRAP_USERNAME,
              show_default=True)
@click.option("--password", envvar="UUIS_PASSWORD", prompt=True, hide_input=True)
@click.option("--problem-file", type=click.Path(path_type=Path), default=None,
              help="Where to write the problem file (default: alongside input).")
def import_cmd(file: Path, data_dir: str, kind: str, mapping_spec: str,
               location_id: str | None, fmt: str, delimiter: str,
               username: str, password: str, problem_file: Path | None) -> None:
    """Import a CSV/TXT file into the chosen family."""
    rt = _runtime(data_dir)
    try:
        login = rt.sessions.login(username, password)
        rows = parse_rows(file.read_text(encoding="utf-8"), fmt, delimiter=delimiter)
        mapping = ColumnMapping(target_kind=Kind(kind),
                                entries=_parse_mapping(mapping_spec),
                                default_location_id=location_id)
        result = rt.importer.commit_import(login.token, mapping, rows)
    except UuisError as exc:
        raise click.ClickException(f"{exc.code}: {exc.message}")
    out = problem_file or file.with_suffix(".problems.csv")
    out.write_text(result.problem_file, encoding="utf-8")
    click.echo(f"inserted {len(result.inserted_ids)}, "
               f"problems {len(result.problem_rows)} (see {out}), "
               f"unmapped columns {result.unmapped_columns or 'none'}")
    if result.problem_rows:
        sys.exit(1)


@main.command(name="estimate")
@click.option("--kloc", type=float, required=True, help="Thousands of source lines.")
@click.option("--mode", type=click.Choice(sorted(MODES)), default="organic",
              show_default=True)
@click.option("--eaf", "eaf_value", type=float, default=None,
              help="Explicit effort adjustment factor (overrides ratings).")
@click.option("--rating", "ratings", multiple=True, metavar="DRIVER=RATING",
              help="Cost-driver rating, repeatable; unset drivers are nominal.")
@click.option("--cpm", type=float, default=0.0, show_default=True,
              help="Cost per person-month.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def estimate_cmd(kloc: float, mode: str, eaf_value: float | None,
                 ratings: tuple[str, ...], cpm: float, as_json: bool) -> None:
    """Estimate effort, schedule, people, and cost."""
    rating_map = {}
    for spec in ratings:
        driver, _, rating = spec.partition("=")
        if driver not in COST_DRIVERS:
            raise click.ClickException(
                f"unknown driver {driver!r}; one of {', '.join(sorted(COST_DRIVERS))}")
        rating_map[driver] = rating
    try:
        inp = make_input(kloc, mode=mode, eaf_value=eaf_value,
                         ratings=rating_map or None, cost_per_pm=cpm)
        result = estimate(inp)
    except UuisError as exc:
        raise click.ClickException(exc.message)
    if as_json:
        click.echo(json.dumps({"input": {"kloc": kloc, "mode": mode, "eaf": inp.eaf,
                                         "cost_per_pm": cpm},
                               **result.rounded()}))
        return
    click.echo(f"EAF (effort adjustment factor) = {inp.eaf:g}")
    click.echo(f"KLOC (number of lines, thousands) = {kloc:g}")
    click.echo(f"E (effort applied, person-months) = {result.effort_pm:.2f}")
    click.echo(f"D (development time, months) = {result.schedule_months:.2f}")
    click.echo(f"P (people required) = {result.people:.2f}")
    click.echo(f"C (cost of project, dollars) = {result.cost:.4f}")


@main.command(name="audit-export")
@click.option("--data-dir", envvar="UUIS_DATA_DIR", required=True)
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="Output CSV path (default: stdout).")
def audit_export(data_dir: str, out: Path | None) -> None:
    """Dump the audit trail as CSV (operator-level, reads the store directly)."""
    from ..audit import AuditService

    rt = _runtime(data_dir)
    csv_text = AuditService.export_csv(rt.store.scan_audit())
    if out is None:
        click.echo(csv_text, nl=False)
    else:
        out.write_text(csv_text, encoding="utf-8")
        click.echo(f"wrote {out}")


@main.command(name="outbox-drain")
@click.option("--data-dir", envvar="UUIS_DATA_DIR", required=True)
def outbox_drain(data_dir: str) -> None:
    """Print queued notifications and mark them delivered."""
    rt = _runtime(data_dir)
    messages = rt.outbox.drain()
    if not messages:
        click.echo("outbox empty")
        return
    for message in messages:
        click.echo(f"[{message['id']}] to {message['recipient_id']}: "
                   f"{message['subject']}: {message['body']}")
    click.echo(f"{len(messages)} message(s) marked delivered")


if __name__ == "__main__":
    main()
