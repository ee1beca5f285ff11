"""Command-line runner for the catalogued scenarios and suites.

``arenslab list`` prints the catalog; ``arenslab run --scenario ID`` runs one
scenario and writes a JSON report (and, with ``--format csv``, the grid as
CSV).  A VIOLATION verdict is a result, not a failure: the exit status is 0
for every completed run, 1 for numerical failures and 2 for usage errors.
"""

import argparse
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .biregularity import (
    THREADS_ENV,
    Status,
    build_grid,
    finite_dim_suite,
    iterated_limits,
    schur_scenario,
    verdict,
)
from .export import dumps, grid_record, grid_to_csv, verdict_record
from .matrix_core import ConvergenceError, DimensionError
from .operators import check_exponent
from .scenarios import CATALOG, paired_families
from .tensor_norms import (
    InfeasibleDecompositionError,
    TensorElement,
    nuclear_oracle,
    projective_norm,
)

__all__ = ["RunConfig", "run", "list_scenarios", "main"]

SCENARIOS = {s.id: s for s in CATALOG}
GRID_SCENARIOS = ("hs-hs", "bk-k", "b0k-k", "bk-sp")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    N: int = 64
    dim: int = 4
    p: float = 2.0
    q: float = 2.0
    tail_window: int = 8
    eps: float = 1e-9
    tol: float = 1e-6
    seed: int = 0
    trials: int = 1
    output_format: str = "json"
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise UsageError(f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}")
        if self.N < 2 or self.dim < 1 or self.trials < 1:
            raise UsageError("N must be >= 2; dim and trials must be >= 1")
        if self.scenario != "projnorm" and not 1 <= self.tail_window < self.N / 2:
            raise UsageError(f"window must satisfy 1 <= window < N/2 (N={self.N})")
        if not (self.eps > 0 and self.tol > 0):
            raise UsageError("eps and tol must be positive")
        if self.output_format not in ("json", "csv"):
            raise UsageError("format must be json or csv")
        if self.output_format == "csv" and not self.output_path:
            raise UsageError("--format csv needs --out")
        for name in ("p", "q"):
            try:
                object.__setattr__(self, name, check_exponent(getattr(self, name)))
            except ValueError as exc:
                raise UsageError(str(exc)) from None

    @classmethod
    def with_defaults(cls, scenario, **overrides):
        """Catalog defaults for ``scenario`` overlaid with the non-``None`` overrides."""
        if scenario not in SCENARIOS:
            raise UsageError(f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")
        values = dict(SCENARIOS[scenario].defaults)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(scenario=scenario, **values)


def _leg_shape(dim):
    """Most nearly square ``(a, b)`` with ``a * b == dim``."""
    a = max(k for k in range(1, int(dim**0.5) + 1) if dim % k == 0)
    return (a, dim // a)


def _run_grid(cfg):
    m, a, at, b, bt = paired_families(cfg.scenario, cfg.N, cfg.p, cfg.q)
    certificates = {f.name: {"norm": f.norm, "bound": f.bound, "max": f.certify(cfg.N)}
                    for f in (a, at, b, bt)}
    grid = iterated_limits(build_grid(m, a, at, b, bt, cfg.N, scenario_id=cfg.scenario),
                           cfg.tail_window, cfg.eps)
    v = verdict(grid, cfg.tol)
    report = {"grid": grid_record(grid), "verdict": verdict_record(v), "certificates": certificates}
    return report, grid.entries


def _aggregate(counts):
    if counts.get(Status.VIOLATION.value):
        return Status.VIOLATION
    if counts.get(Status.INCONCLUSIVE.value):
        return Status.INCONCLUSIVE
    return Status.BIREGULAR_EVIDENCE


def _trial_table(rows, value="discrepancy"):
    lines = [f"trial,seed,status,{value}"]
    lines += [f"{t},{s},{st},{'' if d is None else repr(float(d))}" for t, s, st, d in rows]
    return "\n".join(lines) + "\n"


def _run_schur(cfg):
    counts = {s.value: 0 for s in Status}
    rows, worst = [], None
    for t in range(cfg.trials):
        seed = cfg.seed + t
        v = schur_scenario(cfg.N, seed, cfg.tail_window, cfg.eps, cfg.tol)
        counts[v.status.value] += 1
        rows.append((t, seed, v.status.value, v.discrepancy))
        if v.discrepancy is not None:
            worst = v.discrepancy if worst is None else max(worst, v.discrepancy)
    status = _aggregate(counts)
    report = {
        "verdict": {"status": status, "discrepancy": worst, "tol": cfg.tol,
                    "witness": {"counts": counts, "violations": counts[Status.VIOLATION.value]}},
        "trials": [{"trial": t, "seed": s, "status": st, "discrepancy": d} for t, s, st, d in rows],
    }
    return report, _trial_table(rows)


def _run_finite_dim(cfg):
    summary = finite_dim_suite(cfg.dim, cfg.trials, cfg.seed, cfg.N, cfg.tail_window, cfg.eps,
                               strict=False)
    report = {
        "verdict": {"status": _aggregate(summary.counts), "discrepancy": None, "tol": 10 * cfg.eps,
                    "witness": {"counts": summary.counts, "violations": summary.violations,
                                "max_limit_error": summary.max_limit_error,
                                "failures": summary.failures}},
    }
    rows = [(t, cfg.seed, st, err) for t, st, err in summary.records]
    return report, _trial_table(rows, "limit_error")


def _run_projnorm(cfg):
    rng = np.random.default_rng(cfg.seed)
    c = rng.standard_normal((cfg.dim, cfg.dim)) + 1j * rng.standard_normal((cfg.dim, cfg.dim))
    legs = {}
    if cfg.p != 2.0:
        legs["left_shape"] = _leg_shape(cfg.dim)
    if cfg.q != 2.0:
        legs["right_shape"] = _leg_shape(cfg.dim)
    u = TensorElement(c, cfg.p, cfg.q, **legs)
    est = projective_norm(u, seed=cfg.seed, trials=max(cfg.trials, 1))
    report = {
        "estimates": est.to_dict(),
        "legs": {"left_shape": u.left_shape, "right_shape": u.right_shape},
        "coefficients": c,
        "nuclear_oracle": nuclear_oracle(u) if u.hilbert_legs else None,
    }
    return report, c


def run(cfg):
    """Run one configuration; returns ``(report, csv_payload)``.

    ``csv_payload`` is a grid array (grid scenarios and projnorm) or ready
    CSV text (per-trial tables of the suites).
    """
    start = time.perf_counter()
    if cfg.scenario in GRID_SCENARIOS:
        body, payload = _run_grid(cfg)
    elif cfg.scenario == "schur":
        body, payload = _run_schur(cfg)
    elif cfg.scenario == "finite-dim":
        body, payload = _run_finite_dim(cfg)
    else:
        body, payload = _run_projnorm(cfg)
    entry = SCENARIOS[cfg.scenario]
    config = asdict(cfg)
    config.pop("output_path")
    report = {
        "version": __version__,
        "config": config,
        "scenario": {"id": entry.id, "result": entry.result, "description": entry.description},
        **body,
        "wall_time": time.perf_counter() - start,
    }
    return report, payload


def list_scenarios(machine=False):
    if machine:
        return dumps([asdict(s) for s in CATALOG])
    lines = []
    for s in CATALOG:
        defaults = ", ".join(f"{k}={v}" for k, v in s.defaults.items())
        lines.append(f"{s.id:<11} {s.result}\n{'':<11} {s.description}\n{'':<11} defaults: {defaults}")
    return "\n".join(lines) + "\n"


def _parser():
    parser = argparse.ArgumentParser(prog="arenslab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    ls = sub.add_parser("list", help="print the scenario catalog")
    ls.add_argument("--json", action="store_true", help="machine-readable catalog")

    r = sub.add_parser("run", help="run one scenario",
                       epilog=f"Grid evaluation threads: set {THREADS_ENV} (default 1).")
    r.add_argument("--scenario", required=True, choices=list(SCENARIOS))
    r.add_argument("--n", dest="N", type=int, help="grid size / truncation dimension")
    r.add_argument("--dim", type=int, help="matrix dimension (finite-dim, projnorm)")
    r.add_argument("--p", help="Schatten exponent of the first leg (number or inf)")
    r.add_argument("--q", help="Schatten exponent of the second leg (number or inf)")
    r.add_argument("--window", dest="tail_window", type=int, help="tail window for limit detection")
    r.add_argument("--eps", type=float, help="stabilization threshold")
    r.add_argument("--tol", type=float, help="verdict tolerance")
    r.add_argument("--seed", type=int)
    r.add_argument("--trials", type=int, help="trial count (schur, finite-dim, projnorm forms)")
    r.add_argument("--format", dest="output_format", choices=["json", "csv"])
    r.add_argument("--out", dest="output_path", help="output file (stdout when omitted)")
    return parser


def main(argv=None):
    parser = _parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        sys.stdout.write(list_scenarios(args.json))
        return 0

    overrides = vars(args)
    overrides.pop("command")
    try:
        cfg = RunConfig.with_defaults(overrides.pop("scenario"), **overrides)
    except UsageError as exc:
        parser.error(str(exc))

    try:
        report, payload = run(cfg)
    except (ConvergenceError, InfeasibleDecompositionError, DimensionError, ArithmeticError,
            AssertionError) as exc:
        print(f"arenslab: {cfg.scenario} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    text = dumps(report)
    if cfg.output_path is None:
        sys.stdout.write(text)
        return 0
    out = Path(cfg.output_path)
    if cfg.output_format == "csv":
        out.write_text(payload if isinstance(payload, str) else grid_to_csv(payload))
        out.with_suffix(".json").write_text(text)
    else:
        out.write_text(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
