"""Acceptance gate: one test per primary criterion, each printing a PASS/FAIL line.

Run ``python3 tests/test_acceptance.py`` for the bare report, or let pytest
collect it; the lines are repeated in the terminal summary.
"""

import time

import numpy as np

from arenslab.biregularity import (
    Status,
    build_grid,
    decaying_hs_matrix,
    evaluate,
    finite_dim_suite,
    iterated_limits,
    schur_tail_monitor,
    schur_scenario,
    verdict,
)
from arenslab.matrix_core import frobenius_norm
from arenslab.operators import INFINITY, rank_one, schatten_norm
from arenslab.scenarios import b0k_k, bk_k, bk_sp, hs_hs
from arenslab.tensor_norms import TensorElement, nuclear_oracle, projective_norm

RESULTS = []


def _report(name, ok, detail, elapsed, budget=None):
    timing = f"{elapsed:.2f}s" + (f" (budget {budget:g}s)" if budget else "")
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}; {timing}"
    RESULTS.append(line)
    print(line)
    return ok


def _grid_verdict(families, N=64):
    m, a, at, b, bt = families
    grid = iterated_limits(build_grid(m, a, at, b, bt, N), 8, 1e-9)
    return verdict(grid, 1e-6)


def test_hs_counterexample():
    t0 = time.perf_counter()
    N = 64
    v = _grid_verdict(hs_hs(N), N)
    elapsed = time.perf_counter() - t0
    i, j = np.indices((N, N))
    dev = float(np.abs(v.grid.entries - (j <= i)).max())
    r, c = v.grid.row_then_col.value, v.grid.col_then_row.value
    ok = (dev <= 1e-12 and abs(r) <= 1e-12 and abs(c - 1) <= 1e-12
          and v.status is Status.VIOLATION and abs(v.discrepancy - 1.0) <= 1e-9 and elapsed < 1.0)
    detail = f"max dev {dev:.1e}, i-outer {r.real:g}, j-outer {c.real:g}, {v.status.value} {v.discrepancy:g}"
    assert _report("HS counterexample", ok, detail, elapsed, 1)


def test_bk_counterexample():
    t0 = time.perf_counter()
    N = 64
    v = _grid_verdict(bk_k(N), N)
    v0 = _grid_verdict(b0k_k(N), N)
    elapsed = time.perf_counter() - t0
    i, j = np.indices((N, N))
    dev = float(np.abs(v.grid.entries - (i <= j)).max())
    r, c = v.grid.row_then_col.value, v.grid.col_then_row.value
    same = v.grid.entries.tobytes() == v0.grid.entries.tobytes()
    ok = (dev <= 1e-12 and abs(r - 1) <= 1e-12 and abs(c) <= 1e-12 and v.status is Status.VIOLATION
          and abs(v.discrepancy - 1.0) <= 1e-9 and same and elapsed < 2.0)
    detail = (f"max dev {dev:.1e}, i-outer {r.real:g}, j-outer {c.real:g}, {v.status.value} "
              f"{v.discrepancy:g}, b0k-k byte-identical {same}")
    assert _report("B(K)(x)K counterexample", ok, detail, elapsed, 2)


def test_sp_leg_variant():
    N = 64
    base_hs, base_bk = _grid_verdict(hs_hs(N), N), _grid_verdict(bk_k(N), N)
    t0 = time.perf_counter()
    fams_hs, fams_bk = hs_hs(N, 1.0, 1.0), bk_sp(N, 1.0)
    certs = [f.certify(N) for f in fams_hs[1:]] + [f.certify(N) for f in fams_bk[1:]]
    tagged = [f.norm for f in fams_hs[1:]] + [f.norm for f in fams_bk[3:]]
    v_hs, v_bk = _grid_verdict(fams_hs, N), _grid_verdict(fams_bk, N)
    elapsed = time.perf_counter() - t0
    same = (np.array_equal(v_hs.grid.entries, base_hs.grid.entries)
            and np.array_equal(v_bk.grid.entries, base_bk.grid.entries)
            and v_hs.status == base_hs.status and v_bk.status == base_bk.status
            and v_hs.discrepancy == base_hs.discrepancy and v_bk.discrepancy == base_bk.discrepancy)
    ok = max(certs) <= 1.0 + 1e-12 and all(p == 1.0 for p in tagged) and same and elapsed < 2.0
    detail = f"max S_1 certificate {max(certs):g}, grids and verdicts identical {same}"
    assert _report("S_p-leg variant (p = q = 1)", ok, detail, elapsed, 2)


def test_schur_regularity_evidence():
    t0 = time.perf_counter()
    statuses = [schur_scenario(N=48, seed=s).status for s in range(100)]
    violations = sum(s is Status.VIOLATION for s in statuses)
    evidence = sum(s is Status.BIREGULAR_EVIDENCE for s in statuses)
    rng = np.random.default_rng(2024)
    bounded, small = True, True
    worst_tail = 0.0
    for _ in range(20):
        u = decaying_hs_matrix(48, rng)
        norms, bounds = schur_tail_monitor(u)
        bounded &= bool(np.all(norms**2 <= bounds * (1 + 1e-12)))
        worst_tail = max(worst_tail, float(norms[39:].max()))
    small = worst_tail < 1e-3
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and bounded and small and elapsed < 30.0
    detail = (f"{violations} violations / {evidence} evidence in 100 trials, tail bound holds {bounded}, "
              f"max ||V_i * U||_2 for i >= 40 = {worst_tail:.2e}")
    assert _report("Schur regularity evidence", ok, detail, elapsed, 30)


def test_finite_dimensional_biregularity():
    t0 = time.perf_counter()
    summary = finite_dim_suite(dim=4, trials=200, seed=0, strict=False)
    elapsed = time.perf_counter() - t0
    evidence = summary.counts["BIREGULAR_EVIDENCE"]
    ok = evidence == 200 and summary.max_limit_error <= 1e-8 and elapsed < 20.0
    detail = f"{evidence}/200 BIREGULAR_EVIDENCE, max limit error {summary.max_limit_error:.1e}"
    assert _report("Finite-dimensional biregularity", ok, detail, elapsed, 20)


def test_operator_toolkit_properties():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    exps = [1.0, 1.5, 2.0, 3.0, 4.0, INFINITY]
    worst_mono, worst_fro, worst_r1 = -np.inf, 0.0, 0.0
    for _ in range(500):
        m, n = rng.integers(1, 17, size=2)
        a = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        norms = [schatten_norm(a, p) for p in exps]
        worst_mono = max(worst_mono, max(b - c for c, b in zip(norms, norms[1:])))
        fro = float(np.sqrt(np.sum(np.abs(a) ** 2)))
        worst_fro = max(worst_fro, abs(norms[2] - fro) / max(fro, 1.0))
        xi, eta, zeta, delta = (rng.standard_normal(m) + 1j * rng.standard_normal(m) for _ in range(4))
        lhs = rank_one(xi, eta) @ rank_one(zeta, delta)
        rhs = np.vdot(eta, zeta) * rank_one(xi, delta)
        worst_r1 = max(worst_r1, float(np.abs(lhs - rhs).max()) / max(1.0, float(np.abs(rhs).max())))
    elapsed = time.perf_counter() - t0
    ok = worst_mono <= 1e-10 and worst_r1 <= 1e-12 and worst_fro <= 1e-10
    detail = (f"max ||A||_q - ||A||_p (p < q) {worst_mono:.1e}, rank-one rule {worst_r1:.1e}, "
              f"S_2 vs Frobenius {worst_fro:.1e}")
    assert _report("Operator-toolkit property suite", ok, detail, elapsed)


def test_tensor_norm_sandwich():
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    sandwich, within, worst_gap = True, True, 0.0
    for k in range(50):
        u = TensorElement(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
        oracle = nuclear_oracle(u)
        est = projective_norm(u, seed=k)
        sandwich &= est.lower <= oracle + 1e-8 and oracle <= est.upper + 1e-8
        within &= est.upper <= 1.01 * oracle
        worst_gap = max(worst_gap, est.upper / oracle - 1)
    cross_err = 0.0
    for k in range(10):
        x, y = (rng.standard_normal(6) + 1j * rng.standard_normal(6) for _ in range(2))
        est = projective_norm(TensorElement.simple(x, y), seed=k)
        exact = float(np.linalg.norm(x) * np.linalg.norm(y))
        cross_err = max(cross_err, abs(est.upper - exact), abs(est.lower - exact))
    elapsed = time.perf_counter() - t0
    ok = sandwich and within and cross_err <= 1e-6 and elapsed < 60.0
    detail = (f"sandwich holds {sandwich}, max upper/oracle - 1 = {worst_gap:.1e}, "
              f"cross-norm bracket error {cross_err:.1e}")
    assert _report("Tensor-norm sandwich", ok, detail, elapsed, 60)


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                pass
