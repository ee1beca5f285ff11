"""Double-limit grids, iterated-limit detection and biregularity verdicts.

A grid holds ``G[i][j] = m(a_i a~_j, b_i b~_j)`` for ``1 <= i, j <= N``.
Index ``i`` runs down the rows and ``j`` across the columns, so
``row_then_col`` is ``lim_i lim_j`` (each row collapsed first) and
``col_then_row`` is ``lim_j lim_i``.

A finite grid cannot prove that a limit exists.  An inner limit along a
line is accepted once the last ``tail_window`` entries agree to ``eps``.
Lines near the far edge of the grid see the truncation and may fail this
test, so the outer limit is taken over the leading run of lines whose
inner limits settled.
"""

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Optional

import numpy as np

from .forms import Superoperator, compose_superops, random_riesz_map, riesz_form
from .matrix_core import DimensionError, _frozen, as_matrix, frobenius_norm, matmul, matrix_unit
from .operators import schatten_norm, schur, schur_tail_bound

__all__ = [
    "THREADS_ENV",
    "SequenceFamily",
    "LimitEstimate",
    "LimitGrid",
    "Status",
    "BiregularityVerdict",
    "BiregularityViolation",
    "SuiteSummary",
    "build_grid",
    "iterated_limits",
    "verdict",
    "evaluate",
    "schur_families",
    "schur_scenario",
    "decaying_hs_matrix",
    "schur_tail_monitor",
    "finite_dim_suite",
]

THREADS_ENV = "ARENSLAB_THREADS"
NORM_SLACK = 1e-10


@dataclass(frozen=True)
class SequenceFamily:
    """A sequence ``i -> element`` (``i`` is 1-based) certified to lie in a ball.

    ``norm`` is the Schatten exponent used to certify matrix elements;
    superoperator elements are certified through their induced bound.
    """

    generator: Callable[[int], Any]
    bound: float = 1.0
    name: str = ""
    norm: float = 2.0

    def __getitem__(self, i):
        if i < 1:
            raise IndexError("sequence indices start at 1")
        return self.generator(i)

    def elements(self, n):
        return [self.generator(i) for i in range(1, n + 1)]

    def element_norm(self, x, rng=None, samples=3):
        if isinstance(x, Superoperator):
            # the declared bound must dominate sampled ratios ||T(A)||_2 / ||A||_2
            rng = np.random.default_rng(0) if rng is None else rng
            for _ in range(samples):
                a = rng.standard_normal((x.dim, x.dim)) + 1j * rng.standard_normal((x.dim, x.dim))
                ratio = frobenius_norm(x(a)) / frobenius_norm(a)
                if ratio > x.norm_bound + NORM_SLACK:
                    raise AssertionError(
                        f"{x.name}: sampled ratio {ratio} exceeds declared bound {x.norm_bound}"
                    )
            return x.norm_bound
        if self.norm == 2.0:
            return frobenius_norm(x)
        return schatten_norm(x, self.norm)

    def certify(self, n, rng=None):
        """Largest element norm over ``1..n``; raises if any exceeds ``bound``."""
        worst = 0.0
        for i in range(1, n + 1):
            r = self.element_norm(self.generator(i), rng)
            if r > self.bound + NORM_SLACK:
                raise AssertionError(f"{self.name}[{i}] has norm {r} > {self.bound}")
            worst = max(worst, r)
        return worst


@dataclass(frozen=True)
class LimitEstimate:
    value: Optional[complex]
    stabilized: bool
    lines_used: int = 0


@dataclass(frozen=True)
class LimitGrid:
    N: int
    entries: np.ndarray
    scenario_id: str = ""
    row_then_col: Optional[LimitEstimate] = None
    col_then_row: Optional[LimitEstimate] = None
    tail_window: Optional[int] = None
    eps: Optional[float] = None
    witness: dict = field(default_factory=dict, compare=False)

    @property
    def i_outer(self):
        """``lim_i lim_j``."""
        return self.row_then_col

    @property
    def j_outer(self):
        """``lim_j lim_i``."""
        return self.col_then_row


class Status(str, enum.Enum):
    BIREGULAR_EVIDENCE = "BIREGULAR_EVIDENCE"
    VIOLATION = "VIOLATION"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class BiregularityVerdict:
    status: Status
    discrepancy: Optional[float]
    witness: dict
    tol: float
    grid: Optional[LimitGrid] = field(default=None, compare=False, repr=False)


class BiregularityViolation(AssertionError):
    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


def _default_product(x):
    return compose_superops if isinstance(x, Superoperator) else matmul


def _worker_count(workers):
    if workers is not None:
        return max(1, int(workers))
    return max(1, int(os.environ.get(THREADS_ENV, "1")))


def build_grid(m, a, at, b, bt, N, left_product=None, right_product=None,
               scenario_id="", workers=None):
    """Evaluate ``m(a_i * at_j, b_i * bt_j)`` for ``1 <= i, j <= N``.

    ``left_product`` and ``right_product`` default to composition for
    superoperators and matrix multiplication for matrices.  Rows are
    independent and may be spread over ``workers`` threads (default taken
    from the ``ARENSLAB_THREADS`` environment variable).
    """
    if N < 2:
        raise ValueError("grid size must be at least 2")
    A, At, B, Bt = (f.elements(N) for f in (a, at, b, bt))
    lp = left_product or _default_product(A[0])
    rp = right_product or _default_product(B[0])

    def row(i):
        return [m(lp(A[i], At[j]), rp(B[i], Bt[j])) for j in range(N)]

    try:
        n_workers = _worker_count(workers)
        if n_workers > 1:
            with ThreadPoolExecutor(n_workers) as pool:
                rows = list(pool.map(row, range(N)))
        else:
            rows = [row(i) for i in range(N)]
    except (ValueError, IndexError) as exc:
        if isinstance(exc, DimensionError):
            raise
        raise DimensionError(f"families incompatible with form {m.name}: {exc}") from exc

    entries = np.array(rows, dtype=np.complex128)
    if not np.all(np.isfinite(entries)):
        raise ArithmeticError("grid contains non-finite entries")
    witness = {"form": m.name, "families": [f.name for f in (a, at, b, bt)]}
    return LimitGrid(N, _frozen(entries), scenario_id, witness=witness)


def _line_limit(line, window, eps):
    tail = line[-window:]
    spread = np.abs(tail[:, None] - tail[None, :]).max()
    return complex(tail.mean()), bool(spread < eps)


def _iterated(lines, window, eps):
    """Inner limit along each row of ``lines``, then the outer limit over rows."""
    inner = [_line_limit(line, window, eps) for line in lines]
    run = 0
    while run < len(inner) and inner[run][1]:
        run += 1
    if run < 2 * window:
        return LimitEstimate(None, False, run)
    outer = np.array([v for v, _ in inner[:run]])
    value, stable = _line_limit(outer, window, eps)
    return LimitEstimate(value if stable else None, stable, run)


def iterated_limits(grid, tail_window=8, eps=1e-9):
    """Fill both iterated-limit estimates of ``grid``; never raises on non-convergence."""
    if not 1 <= tail_window < grid.N / 2:
        raise ValueError(f"tail_window must lie in [1, N/2), got {tail_window} for N={grid.N}")
    g = np.asarray(grid.entries)
    return replace(
        grid,
        row_then_col=_iterated(g, tail_window, eps),
        col_then_row=_iterated(g.T, tail_window, eps),
        tail_window=tail_window,
        eps=eps,
    )


def verdict(grid, tol=1e-6):
    """Compare the two iterated limits of a grid that went through :func:`iterated_limits`."""
    if grid.row_then_col is None or grid.col_then_row is None:
        raise ValueError("run iterated_limits before asking for a verdict")
    r, c = grid.row_then_col, grid.col_then_row
    witness = dict(grid.witness, scenario=grid.scenario_id)
    if not (r.stabilized and c.stabilized):
        return BiregularityVerdict(Status.INCONCLUSIVE, None, witness, tol, grid)
    gap = abs(r.value - c.value)
    status = Status.VIOLATION if gap > tol else Status.BIREGULAR_EVIDENCE
    return BiregularityVerdict(status, gap, witness, tol, grid)


def evaluate(m, a, at, b, bt, N, tail_window=8, eps=1e-9, tol=1e-6, **kwargs):
    """``build_grid`` followed by ``iterated_limits`` and ``verdict``."""
    grid = build_grid(m, a, at, b, bt, N, **kwargs)
    return verdict(iterated_limits(grid, tail_window, eps), tol)


# -- Schur-product scenario ------------------------------------------------------


def decaying_hs_matrix(n, rng, decay=None, power=2.0):
    """Random matrix with entries in the unit disk times a decaying profile.

    With ``decay`` set the profile is ``decay**(r+s)`` (0-based), otherwise
    ``((r+1)(s+1))**-power``.
    """
    z = np.sqrt(rng.uniform(size=(n, n))) * np.exp(2j * np.pi * rng.uniform(size=(n, n)))
    r = np.arange(n)
    if decay is not None:
        profile = decay ** (r[:, None] + r[None, :])
    else:
        profile = (np.outer(r + 1, r + 1)) ** (-power)
    return _frozen(z * profile)


def _escaping_perturbation(i, n, rng, support):
    """Unit HS-norm matrix supported on rows ``i-1 .. i-2+support`` (clipped to ``n``)."""
    p = np.zeros((n, n), dtype=np.complex128)
    rows = np.arange(i - 1, min(i - 1 + support, n))
    cols = rng.integers(0, n, size=rows.size)
    p[rows, cols] = rng.standard_normal(rows.size) + 1j * rng.standard_normal(rows.size)
    nrm = np.linalg.norm(p)
    return p / nrm if nrm > 0 else p


def schur_families(N, rng, support=3, decay=0.25):
    """Four weakly convergent unit-ball families ``W + P_i`` on ``N x N`` matrices.

    ``W`` has HS norm 1/2 and geometrically decaying entries; ``P_i`` has
    HS norm 1/2 and lives on rows ``>= i``, so it tends weakly to zero.
    Returns the families and their weak limits.
    """
    families, limits = [], []
    for name in ("a", "a~", "b", "b~"):
        w = decaying_hs_matrix(N, rng, decay=decay)
        w = _frozen(0.5 * w / np.linalg.norm(w))
        perts = [_frozen(0.5 * _escaping_perturbation(i, N, rng, support)) for i in range(1, N + 1)]
        elems = [_frozen(w + p) for p in perts]
        families.append(SequenceFamily(lambda i, e=elems: e[i - 1], 1.0, name=f"schur-{name}"))
        limits.append(w)
    return families, limits


def schur_scenario(N=48, seed=0, tail_window=8, eps=1e-9, tol=1e-6, workers=None):
    """Random form and weakly convergent families with the Schur product as algebra product.

    The verdict's ``witness`` also records the value ``m(V * V~, W * W~)``
    of the form at the weak limits.
    """
    if N < 8:
        raise ValueError("schur scenario needs N >= 8")
    rng = np.random.default_rng(seed)
    (a, at, b, bt), (va, vat, vb, vbt) = schur_families(N, rng)
    m = riesz_form(random_riesz_map(N, rng, kind="sandwich"))
    grid = build_grid(m, a, at, b, bt, N, left_product=schur, right_product=schur,
                      scenario_id="schur", workers=workers)
    v = verdict(iterated_limits(grid, tail_window, eps), tol)
    at_limit = m(schur(va, vat), schur(vb, vbt))
    return replace(v, witness=dict(v.witness, seed=seed, limit_value=at_limit))


def schur_tail_monitor(u, n=None):
    """For ``V_i = E_{1,i}`` (weakly null): ``||V_i * u||_2`` and the tail bound, i = 1..n.

    Returns ``(norms, bounds)`` where ``bounds[i-1]`` is
    ``schur_tail_bound(V_i, 0, u, 0, i-1)``, which dominates ``norms[i-1]**2``.
    """
    u = as_matrix(u)
    n = u.shape[1] if n is None else n
    zero = np.zeros_like(u)
    norms, bounds = [], []
    for i in range(1, n + 1):
        v = matrix_unit(0, i - 1, u.shape[0], u.shape[1])
        norms.append(frobenius_norm(schur(v, u)))
        bounds.append(schur_tail_bound(v, zero, u, 0, i - 1))
    return np.array(norms), np.array(bounds)


# -- finite-dimensional suite ------------------------------------------------------


@dataclass
class SuiteSummary:
    trials: int
    counts: dict
    max_limit_error: float
    failures: list
    records: list = field(default_factory=list)

    @property
    def violations(self):
        return self.counts.get(Status.VIOLATION.value, 0)


def _random_ball(rng, dim, radius):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return z * (radius * rng.uniform() / np.linalg.norm(z))


def _convergent_family(rng, dim, N, decay, name):
    """``S + decay**i P_i`` with ``||S||_2, ||P_i||_2 <= 1/2``; converges in norm to ``S``."""
    s = _frozen(_random_ball(rng, dim, 0.5))
    elems = [_frozen(s + decay**i * _random_ball(rng, dim, 0.5)) for i in range(1, N + 1)]
    return SequenceFamily(lambda i, e=elems: e[i - 1], 1.0, name=name), s


def finite_dim_suite(dim=4, trials=200, seed=0, N=32, tail_window=8, eps=1e-9,
                     decay=0.25, strict=True):
    """Random forms and convergent families on ``dim x dim`` matrices.

    Every trial must give BIREGULAR_EVIDENCE with both iterated limits within
    ``10 * eps`` of ``m(S S~, T T~)`` at the limit points.  With ``strict``
    the first failure raises :class:`BiregularityViolation`.
    """
    if not 1 <= dim <= 8:
        raise ValueError("finite_dim_suite supports dimensions 1..8")
    tol = 10 * eps
    counts = {s.value: 0 for s in Status}
    worst, failures, records = 0.0, [], []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        fams, lims = zip(*(_convergent_family(rng, dim, N, decay, n) for n in ("S", "S~", "T", "T~")))
        m = riesz_form(random_riesz_map(dim, rng, kind="dense"))
        v = evaluate(m, *fams, N, tail_window=tail_window, eps=eps, tol=tol)
        counts[v.status.value] += 1
        expected = m(lims[0] @ lims[1], lims[2] @ lims[3])
        err = None
        if v.status is Status.BIREGULAR_EVIDENCE:
            err = max(abs(v.grid.row_then_col.value - expected), abs(v.grid.col_then_row.value - expected))
            worst = max(worst, err)
        records.append((t, v.status.value, err))
        if v.status is not Status.BIREGULAR_EVIDENCE or err > tol:
            witness = dict(v.witness, trial=t, seed=seed, status=v.status.value,
                           expected=expected, limit_error=err)
            failures.append(witness)
            if strict:
                raise BiregularityViolation(f"trial {t} failed: {v.status.value}", witness)
    return SuiteSummary(trials, counts, worst, failures, records)
