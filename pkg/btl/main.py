import argparse
import csv
import io
import json
import logging
import sys
import time
import uuid
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from btl.commands import UnsupportedPairingError
from btl.commands.bounds import run_bounds, run_sweep
from btl.commands.exact import run_exact
from btl.commands.fem import run_solve, run_steklov
from btl.commands.geometry import run_geom
from btl.config import BTL_DATABASE_URL, BTL_MAX_LEVEL, BUILD_NUMBER
from btl.models.domain_types import DomainSpec
from btl.models.reports import VerdictStatus
from btl.services.fem import SolverConvergenceError, SteklovConvergenceError

logger = logging.getLogger(__name__)

COMMANDS = ("exact", "solve", "steklov", "bounds", "sweep", "geom")

EXIT_OK = 0
EXIT_FAILED_VERDICT = 1
EXIT_ERROR = 2


class RunConfig(BaseModel):
    """One CLI invocation."""
    command: Literal["exact", "solve", "steklov", "bounds", "sweep", "geom"]
    domain: DomainSpec
    delta: Optional[float] = Field(default=None, gt=0.0)
    deltas: Optional[List[float]] = None
    segments: Optional[int] = Field(default=None, ge=6)
    level: Optional[int] = Field(default=None, ge=0, le=BTL_MAX_LEVEL)
    dimension: int = Field(default=2, ge=2)
    output_format: Literal["json", "csv"] = "json"
    out: Optional[Path] = None
    fields: Optional[Path] = None

    @field_validator("deltas")
    @classmethod
    def _positive_deltas(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and (not value or any(d <= 0.0 for d in value)):
            raise ValueError(f"deltas must be a non-empty list of positive numbers, got {value}")
        return value

    @model_validator(mode="after")
    def _check_command_inputs(self) -> "RunConfig":
        if self.command == "sweep" and self.deltas is None:
            raise ValueError("sweep needs --deltas")
        if self.command in ("exact", "solve", "steklov", "bounds") and self.delta is None:
            raise ValueError(f"{self.command} needs --delta")
        return self


COMMAND_RUNNERS = {
    "exact": run_exact,
    "steklov": run_steklov,
    "bounds": run_bounds,
    "sweep": run_sweep,
    "geom": run_geom,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="btl",
        description="Boundary delta-torsional rigidity: closed forms, P1 FEM, Steklov eigenvalue and bound checks",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub = subparsers.add_parser(command)
        sub.add_argument("--domain", required=True, help='Domain JSON file {"kind": ..., "params": {...}}')
        if command == "sweep":
            sub.add_argument("--deltas", required=True, help="Comma-separated decreasing deltas")
        elif command != "geom":
            sub.add_argument("--delta", type=float, required=True)
        if command in ("solve", "steklov", "bounds", "sweep"):
            sub.add_argument("--segments", type=int, default=None, help="Boundary segments of curved domains")
            sub.add_argument("--level", type=int, default=None, help="Uniform refinement level")
        if command == "exact":
            sub.add_argument("--dimension", type=int, default=2, help="Dimension N for balls and shells")
        if command == "solve":
            sub.add_argument("--fields", default=None, help="Write nodal values (x, y, u) as CSV")
        sub.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
        sub.add_argument("--out", default=None, help="Report path (stdout when omitted)")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values: Dict[str, Any] = {key: value for key, value in vars(args).items() if value is not None}
    values["domain"] = DomainSpec.from_file(args.domain)
    if "deltas" in values:
        values["deltas"] = [float(token) for token in values["deltas"].split(",") if token.strip()]
    return RunConfig.model_validate(values)


def _flatten(record: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        elif isinstance(value, list):
            flat[name] = json.dumps(value)
        else:
            flat[name] = value
    return flat


def render_report(report: BaseModel, output_format: str) -> str:
    """JSON keeps the full schema; CSV has one row per verdict / sweep row, or one row otherwise."""
    data = report.model_dump(mode="json")
    if output_format == "json":
        return json.dumps(data, indent=2) + "\n"

    if "verdicts" in data:
        rows = [_flatten(v) for v in data["verdicts"]]
    elif "rows" in data:
        rows = [_flatten(r) for r in data["rows"]]
    else:
        rows = [_flatten(data)]
    return _csv_text(rows)


def _csv_text(rows: Sequence[Dict[str, Any]]) -> str:
    buffer = io.StringIO()
    columns: List[str] = []
    for row in rows:
        columns += [key for key in row if key not in columns]
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _log_run(config: Optional[RunConfig], command: str, exit_code: int, report: Optional[BaseModel],
             error: Optional[str], processing_time_ms: float) -> None:
    """Write one RunLog row; never affects the exit code."""
    if not BTL_DATABASE_URL:
        return
    try:
        from btl.database import RunLog, get_db_session

        session = get_db_session()
        try:
            deltas = None
            if config is not None:
                deltas = json.dumps(config.deltas if config.deltas is not None else [config.delta])
            session.add(RunLog(
                id=str(uuid.uuid4()),
                command=command,
                domainKind=config.domain.kind.value if config is not None else None,
                deltas=deltas,
                level=config.level if config is not None else None,
                exitCode=exit_code,
                report=report.model_dump(mode="json") if report is not None else None,
                error=error,
                processingTimeMs=processing_time_ms,
                build=BUILD_NUMBER,
            ))
            session.commit()
        finally:
            session.close()
    except Exception as e:
        logger.warning(f"Run log not written: {e}")


def run(config: RunConfig) -> int:
    """Execute one command, write its report and return the exit code."""
    start_time = time.perf_counter()
    report = None
    error = None
    try:
        if config.command == "solve":
            report, fields = run_solve(config)
            if config.fields is not None:
                config.fields.write_text(_csv_text(fields), encoding="utf-8")
        else:
            report = COMMAND_RUNNERS[config.command](config)

        _emit(render_report(report, config.output_format), config.out)
        exit_code = EXIT_OK
        if config.command == "bounds" and any(v.status == VerdictStatus.FAILED for v in report.verdicts):
            exit_code = EXIT_FAILED_VERDICT
    except (SolverConvergenceError, SteklovConvergenceError, UnsupportedPairingError, ValueError,
            ArithmeticError, RuntimeError, MemoryError) as e:
        error = f"{type(e).__name__}: {e}"
        logger.error(f"{config.command} failed: {error}")
        print(error, file=sys.stderr)
        exit_code = EXIT_ERROR

    _log_run(config, config.command, exit_code, report, error, (time.perf_counter() - start_time) * 1000)
    return exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO)
    args = build_parser().parse_args(argv)

    logger.info("#" * 80)
    logger.info(f"#################### BUILD NUMBER: {BUILD_NUMBER} ####################")
    logger.info("#" * 80)

    try:
        config = config_from_args(args)
    except (OSError, json.JSONDecodeError, ValidationError, ValueError) as e:
        error = f"{type(e).__name__}: {e}"
        logger.error(f"Invalid input: {error}")
        print(error, file=sys.stderr)
        _log_run(None, args.command, EXIT_ERROR, None, error, 0.0)
        return EXIT_ERROR

    return run(config)


if __name__ == "__main__":
    sys.exit(main())
