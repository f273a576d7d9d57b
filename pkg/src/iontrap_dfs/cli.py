"""Command-line front end.

Subcommands write figure data as CSV (or JSON with ``--format json``):

  leakage-curve     p(t) for closed-system alternation, one block per n
  error-vs-n        1 - f of noisy alternation vs ideal XY, plus power-law fit
  closure-check     Lie closure of projected exchange terms on a qutrit code
  analytic-compare  numeric integrated leakage vs T - (n/2) sin(2T/n)

Exit codes: 0 ok, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .analysis import analytic_total_population, fit_power_law
from .codes import CLI_NAMES, standard_code
from .dynamics import initial_state, run_alternation_experiment, sweep_alternations
from .errors import (
    DFSError,
    InsufficientPoints,
    InvalidConfig,
    NonPositiveValue,
    NotPSD,
    NumericalFailure,
)
from .universality import check_encoded_universality

COMMANDS = ("leakage-curve", "error-vs-n", "closure-check", "analytic-compare")
DEFAULT_N = {
    "leakage-curve": "1,2,4",
    "error-vs-n": "1..64",
    "closure-check": "1",
    "analytic-compare": "1,2,4,8,16",
}
# 1 - f below this is integrator noise, not signal
FIT_FLOOR = 1e-8
ALL_PAIRS = ((0, 1), (1, 2), (0, 2))


@dataclass
class RunConfig:
    command: str
    n_values: list[int] = field(default_factory=lambda: [1])
    gamma: float = 1.0
    g: float = 1.0
    total_time: float = math.pi
    pair: tuple[int, int] = (0, 1)
    pairs: tuple[tuple[int, int], ...] = ALL_PAIRS
    code_name: str = "CI"
    rho0_name: str = "001"
    steps_per_segment: int = 200
    n_min: int = 17
    workers: int = 1
    output_path: str = "-"
    format: str = "csv"

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise InvalidConfig(f"unknown command {self.command!r}")
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise InvalidConfig("n values must be a nonempty list of positive integers")
        if self.steps_per_segment < 10:
            raise InvalidConfig("steps_per_segment must be >= 10")
        if not self.total_time > 0:
            raise InvalidConfig("total time must be positive")
        if self.gamma < 0:
            raise InvalidConfig("gamma must be nonnegative")
        if self.g == 0:
            raise InvalidConfig("g must be nonzero")
        if self.format not in ("csv", "json"):
            raise InvalidConfig(f"unknown format {self.format!r}")
        if self.code_name not in CLI_NAMES:
            raise InvalidConfig(f"unknown code {self.code_name!r}; choose from {sorted(CLI_NAMES)}")
        if self.command == "closure-check" and self.code_name not in ("CI", "CII"):
            raise InvalidConfig("closure-check needs a qutrit code (CI or CII)")
        if self.rho0_name != "plus" and not (
            len(self.rho0_name) == 3 and set(self.rho0_name) <= {"0", "1"}
        ):
            raise InvalidConfig(f"state must be a 3-bit string or 'plus', got {self.rho0_name!r}")
        if self.workers < 1:
            raise InvalidConfig("workers must be >= 1")
        return self


def parse_n_list(text: str) -> list[int]:
    """'1,2,4' or '17..64' or a mix like '1,2,17..20'."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise InvalidConfig(f"cannot parse n list {text!r}") from None
    return sorted(set(out))


def parse_pair(text: str) -> tuple[int, int]:
    try:
        i, j = (int(x) for x in text.split(","))
    except ValueError:
        raise InvalidConfig(f"pair must look like '0,1', got {text!r}") from None
    if i == j or min(i, j) < 0 or max(i, j) > 2:
        raise InvalidConfig(f"pair {text!r} must name two distinct qubits of 0..2")
    return i, j


def parse_pairs(text: str) -> tuple[tuple[int, int], ...]:
    if text == "all":
        return ALL_PAIRS
    return tuple(parse_pair(p) for p in text.split(";") if p.strip())


def read_config_file(path: str) -> list[str]:
    """Turn ``key = value`` lines into ``--key value`` arguments."""
    args: list[str] = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise InvalidConfig(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfig(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        args += [f"--{key.lstrip('-')}", value]
    return args


def fmt(x: float) -> str:
    return f"{x:.17g}"


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _rows_as_records(header, rows):
    return [dict(zip(header, row)) for row in rows]


def _emit_table(cfg: RunConfig, header, rows, extra: dict | None = None) -> str:
    if cfg.format == "json":
        payload = {"command": cfg.command, "rows": _rows_as_records(header, rows)}
        payload.update(extra or {})
        return _json(payload)
    return _csv(header, rows)


def _experiment_kwargs(cfg: RunConfig, gamma: float) -> dict:
    return dict(
        gamma=gamma,
        g=cfg.g,
        T=cfg.total_time,
        rho0=initial_state(cfg.rho0_name, 3),
        pair=cfg.pair,
        code=standard_code(cfg.code_name),
    )


def _step(cfg: RunConfig, n: int) -> float:
    return cfg.total_time / n / cfg.steps_per_segment


def cmd_leakage_curve(cfg: RunConfig) -> str:
    """Closed-system p(t) over one full operation for each n."""
    rows = []
    kw = _experiment_kwargs(cfg, 0.0)
    for n in cfg.n_values:
        res = run_alternation_experiment(n=n, step=_step(cfg, n), **kw)
        rows += [[n, float(t), float(p)] for t, p in zip(res.times, res.leakage_series)]
    return _emit_table(cfg, ["n", "t", "leakage"], rows)


def cmd_error_vs_n(cfg: RunConfig) -> tuple[str, dict]:
    """1 - f per n and the power-law fit over n >= n_min."""
    results = sweep_alternations(
        cfg.n_values,
        workers=cfg.workers,
        steps_per_segment=cfg.steps_per_segment,
        **_experiment_kwargs(cfg, cfg.gamma),
    )
    rows = [[r.n, float(r.one_minus_f), float(r.integrated_leakage)] for r in results]
    summary = {"config": _config_summary(cfg)}
    try:
        fit = fit_power_law([(r.n, r.one_minus_f) for r in results], n_min=cfg.n_min, floor=FIT_FLOOR)
        summary["fit"] = fit.as_dict()
    except (NonPositiveValue, InsufficientPoints) as exc:
        warnings.warn(f"power-law fit refused: {exc}", stacklevel=2)
        summary["fit"] = None
        summary["fit_error"] = f"{type(exc).__name__}: {exc}"
    return _emit_table(cfg, ["n", "one_minus_f", "integrated_leakage"], rows, summary), summary


def cmd_closure_check(cfg: RunConfig) -> str:
    report = check_encoded_universality(standard_code(cfg.code_name), cfg.pairs, g=cfg.g)
    return _json(
        {
            "code": cfg.code_name,
            "pairs": [list(p) for p in cfg.pairs],
            "closure_dimension": report.closure_dimension,
            "iterations": report.iterations,
            "universal": report.closure_dimension == 8,
        }
    )


def cmd_analytic_compare(cfg: RunConfig) -> str:
    rows = []
    kw = _experiment_kwargs(cfg, 0.0)
    for n in cfg.n_values:
        res = run_alternation_experiment(n=n, step=_step(cfg, n), **kw)
        # the closed form is in units of g = 1 time
        analytic = analytic_total_population(cfg.g * cfg.total_time, n) / abs(cfg.g)
        numeric = float(res.integrated_leakage)
        rows.append([n, numeric, analytic, abs(numeric - analytic) / analytic])
    return _emit_table(
        cfg, ["n", "numeric_integrated_leakage", "analytic_total_population", "relative_error"], rows
    )


def _config_summary(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d["pair"] = list(cfg.pair)
    d["pairs"] = [list(p) for p in cfg.pairs]
    return d


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="file of key=value lines mirroring these flags")
    common.add_argument("--n-list", help="e.g. 1,2,4 or 17..64")
    common.add_argument("--gamma", type=float, default=1.0, help="collective dephasing rate (units of g)")
    common.add_argument("--g", type=float, default=1.0, help="coupling eta^2 Omega^2 / Delta")
    common.add_argument("--time", type=float, default=math.pi, help="total XY time T")
    common.add_argument("--pair", default="0,1")
    common.add_argument("--pairs", default="all", help="closure-check pairs, e.g. '0,1;1,2' or 'all'")
    common.add_argument("--code", default="CI", choices=sorted(CLI_NAMES))
    common.add_argument("--state", default="001", help="bitstring or 'plus'")
    common.add_argument("--steps", type=int, default=200, help="RK4 steps per pulse segment")
    common.add_argument("--n-min", type=int, default=17, help="smallest n used in the fit")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", default="csv", choices=("csv", "json"))

    parser = argparse.ArgumentParser(prog="iontrap-dfs", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(argv: list[str]) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.config:
        # config file first, explicit flags override
        ns = parser.parse_args([ns.command, *read_config_file(ns.config), *argv[1:]])
    return RunConfig(
        command=ns.command,
        n_values=parse_n_list(ns.n_list or DEFAULT_N[ns.command]),
        gamma=ns.gamma,
        g=ns.g,
        total_time=ns.time,
        pair=parse_pair(ns.pair),
        pairs=parse_pairs(ns.pairs),
        code_name=ns.code,
        rho0_name=ns.state,
        steps_per_segment=ns.steps,
        n_min=ns.n_min,
        workers=ns.workers,
        output_path=ns.out,
        format=ns.format,
    ).validate()


def run(cfg: RunConfig) -> str:
    """Execute a validated config, write its outputs, return the main payload."""
    if cfg.command == "leakage-curve":
        text = cmd_leakage_curve(cfg)
    elif cfg.command == "error-vs-n":
        text, summary = cmd_error_vs_n(cfg)
        if cfg.format == "csv":
            if cfg.output_path == "-":
                sys.stderr.write(_json(summary))
            else:
                Path(cfg.output_path).with_suffix(".fit.json").write_text(_json(summary))
    elif cfg.command == "closure-check":
        text = cmd_closure_check(cfg)
    else:
        text = cmd_analytic_compare(cfg)
    if cfg.output_path == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.output_path, "w", newline="\n") as fh:
            fh.write(text)
    return text


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = config_from_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0) and 2
    except (InvalidConfig, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    try:
        run(cfg)
    except (NumericalFailure, NotPSD) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2
    except DFSError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
