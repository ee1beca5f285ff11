"""Projective tensor norm of finite tensors, with two-sided certificates.

A tensor ``u = sum_ab C[a, b] x_a (x) y_b`` is stored through its
coefficient grid ``C`` against the coordinate bases of the two legs.  A
leg vector is measured in a Schatten norm after reshaping it (row-major)
to the leg's matrix shape; the default shape ``(dim, 1)`` makes every
Schatten norm the Euclidean norm.

For Euclidean (Hilbert) legs the projective norm is the trace norm of
``C``, which :func:`nuclear_oracle` returns.  :func:`projective_upper`
searches exact decompositions ``C = X @ Y.T`` and :func:`projective_lower`
pairs ``u`` against bilinear forms with certified norm at most one.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .matrix_core import _frozen, as_matrix, svd
from .operators import INFINITY, check_exponent, dual_exponent, schatten_norm

__all__ = [
    "InfeasibleDecompositionError",
    "TensorElement",
    "ProjectiveNormEstimate",
    "nuclear_oracle",
    "projective_upper",
    "projective_lower",
    "projective_norm",
    "norming_functional",
]

RESIDUAL_LIMIT = 1e-8


class InfeasibleDecompositionError(ArithmeticError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class TensorElement:
    coefficients: np.ndarray
    left_norm: float = 2.0
    right_norm: float = 2.0
    left_shape: Optional[tuple] = None
    right_shape: Optional[tuple] = None

    def __post_init__(self):
        c = as_matrix(self.coefficients)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "left_norm", check_exponent(self.left_norm))
        object.__setattr__(self, "right_norm", check_exponent(self.right_norm))
        for side, dim in (("left_shape", c.shape[0]), ("right_shape", c.shape[1])):
            shape = getattr(self, side)
            shape = (dim, 1) if shape is None else tuple(shape)
            if shape[0] * shape[1] != dim:
                raise ValueError(f"{side} {shape} does not hold {dim} coordinates")
            object.__setattr__(self, side, shape)

    @classmethod
    def simple(cls, x, y, **legs):
        """The elementary tensor ``x (x) y``."""
        return cls(np.outer(np.asarray(x), np.asarray(y)), **legs)

    @property
    def hilbert_legs(self):
        return self.left_norm == 2.0 and self.right_norm == 2.0

    def left(self, x, fast=False):
        return (_fast_leg_norm if fast else _leg_norm)(x, self.left_shape, self.left_norm)

    def right(self, y, fast=False):
        return (_fast_leg_norm if fast else _leg_norm)(y, self.right_shape, self.right_norm)


def _leg_norm(x, shape, p):
    if p == 2.0 or 1 in shape:
        return float(np.linalg.norm(x))
    return schatten_norm(np.reshape(x, shape), p)


def _fast_leg_norm(x, shape, p):
    """Same value as :func:`_leg_norm` through LAPACK; used inside the optimizer loop."""
    if p == 2.0 or 1 in shape:
        return float(np.linalg.norm(x))
    s = np.linalg.svd(np.reshape(x, shape), compute_uv=False)
    if p == INFINITY:
        return float(s[0])
    return float(np.sum(s**p) ** (1.0 / p))


def _leg_constant(shape, p):
    """Smallest ``c`` with ``||x||_2 <= c ||x||_p`` on the leg."""
    k = min(shape)
    if p <= 2.0 or k == 1:
        return 1.0
    return k ** (0.5 - (0.0 if p == INFINITY else 1.0 / p))


@dataclass
class ProjectiveNormEstimate:
    """``upper`` is ``None`` for a lower-bound-only estimate; ``lower`` defaults to 0."""

    upper: Optional[float]
    lower: float = 0.0
    certificate_upper: list = field(default_factory=list)
    certificate_lower: dict = field(default_factory=dict)
    history: list = field(default_factory=list)
    residual: float = 0.0

    def to_dict(self):
        def cplx(a):
            a = np.asarray(a)
            return np.stack([a.real, a.imag], axis=-1).tolist()

        lower = dict(self.certificate_lower)
        if "matrix" in lower:
            lower["matrix"] = cplx(lower["matrix"])
        return {
            "upper": self.upper,
            "lower": self.lower,
            "residual": self.residual,
            "history": list(self.history),
            "certificate_upper": [{"x": cplx(x), "y": cplx(y)} for x, y in self.certificate_upper],
            "certificate_lower": lower,
        }


def nuclear_oracle(u):
    """Trace norm of the coefficient grid; exact for Hilbert legs only."""
    if not u.hilbert_legs:
        raise ValueError("nuclear_oracle needs both leg exponents equal to 2")
    return schatten_norm(u.coefficients, 1)


# -- upper bound -------------------------------------------------------------------


def _objective(u, x, y, fast=True):
    return sum(u.left(x[:, i], fast) * u.right(y[:, i], fast) for i in range(x.shape[1]))


def _shear_euclidean(xk, xl, yk, yl):
    """Minimize ``|xk| |yk - t yl| + |xl + t xk| |yl|`` over complex ``t``.

    Both terms are increasing in the distance from ``t`` to their own
    minimizer, so the optimum lies on the segment between the two.
    """
    nxk, nyl = np.linalg.norm(xk), np.linalg.norm(yl)
    tau1 = np.vdot(yl, yk) / nyl**2
    tau2 = -np.vdot(xk, xl) / nxk**2
    d1 = np.linalg.norm(yk - tau1 * yl)
    d2 = np.linalg.norm(xl + tau2 * xk)
    gap = abs(tau2 - tau1)

    def f(s):
        return (nxk * math.hypot(nyl * s * gap, d1)
                + nyl * math.hypot(nxk * (1 - s) * gap, d2))

    if gap == 0.0:
        return tau1
    res = minimize_scalar(f, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
    return tau1 + res.x * (tau2 - tau1)


def _shear_general(u, xk, xl, yk, yl):
    lk, rl = u.left(xk, True), u.right(yl, True)

    def f(z):
        t = z[0] + 1j * z[1]
        return lk * u.right(yk - t * yl, True) + u.left(xl + t * xk, True) * rl

    res = minimize(f, np.zeros(2), method="Nelder-Mead",
                   options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 200})
    return res.x[0] + 1j * res.x[1]


def _rebalance(u, x, y):
    for i in range(x.shape[1]):
        nx, ny = u.left(x[:, i], True), u.right(y[:, i], True)
        if nx > 0 and ny > 0:
            s = math.sqrt(ny / nx)
            x[:, i] *= s
            y[:, i] /= s


def _descend(u, x, y, iters, rtol=1e-13):
    """Coordinate descent over shears ``x_l += t x_k``, ``y_k -= t y_l``.

    Each move keeps ``x @ y.T`` fixed, only accepts improvements, and
    returns the objective after every sweep (non-increasing).
    """
    euclid = all(p == 2.0 or 1 in s for p, s in
                 ((u.left_norm, u.left_shape), (u.right_norm, u.right_shape)))
    R = x.shape[1]
    history = [_objective(u, x, y)]
    for _ in range(iters):
        for k in range(R):
            for l in range(R):
                if k == l:
                    continue
                xk, xl, yk, yl = x[:, k], x[:, l], y[:, k], y[:, l]
                if not (np.any(xk) and np.any(yl)):
                    continue
                before = u.left(xk, True) * u.right(yk, True) + u.left(xl, True) * u.right(yl, True)
                t = _shear_euclidean(xk, xl, yk, yl) if euclid else _shear_general(u, xk, xl, yk, yl)
                nyk, nxl = yk - t * yl, xl + t * xk
                after = u.left(xk, True) * u.right(nyk, True) + u.left(nxl, True) * u.right(yl, True)
                if after < before:
                    x[:, l], y[:, k] = nxl, nyk
        _rebalance(u, x, y)
        history.append(min(history[-1], _objective(u, x, y)))
        if history[-2] - history[-1] <= rtol * max(history[-1], 1e-300):
            break
    return history


def _random_mixing(rng, n):
    """Random invertible matrix with condition number at most 3."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return np.eye(n) + z / (2 * np.linalg.norm(z))


def projective_upper(u, R=None, iters=50, seed=0, restarts=5, svd_init=True):
    """Best ``sum_i ||x_i|| ||y_i||`` found over exact rank-``R`` decompositions.

    The first restart starts from the singular value decomposition of the
    coefficient grid (skipped when ``svd_init`` is false); the others start
    from ``X G, Y G^-T`` for a random invertible ``G``.  Raises
    :class:`InfeasibleDecompositionError` when ``R`` is below the rank.
    """
    c = u.coefficients
    d1, d2 = c.shape
    uu, s, vv = svd(c)
    rank = int(np.sum(s > 1e-12 * max(s[0], 1e-300))) if s.size else 0
    R = max(rank, 1) if R is None else int(R)
    if R < 1:
        raise ValueError("R must be positive")

    k = min(R, s.size)
    x0 = np.zeros((d1, R), dtype=np.complex128)
    y0 = np.zeros((d2, R), dtype=np.complex128)
    root = np.sqrt(s[:k])
    x0[:, :k] = uu[:, :k] * root
    y0[:, :k] = vv[:, :k].conj() * root
    residual = float(np.linalg.norm(x0 @ y0.T - c)) / max(1.0, float(np.linalg.norm(c)))
    if residual > RESIDUAL_LIMIT:
        raise InfeasibleDecompositionError(f"rank {rank} grid has no exact rank-{R} decomposition", residual)

    rng = np.random.default_rng(seed)
    best = None
    for r in range(restarts):
        if r == 0 and svd_init:
            x, y = x0.copy(), y0.copy()
        else:
            g = _random_mixing(rng, R)
            x, y = x0 @ g, y0 @ np.linalg.inv(g).T
        history = _descend(u, x, y, iters)
        res = float(np.linalg.norm(x @ y.T - c)) / max(1.0, float(np.linalg.norm(c)))
        if best is None or history[-1] < best[0]:
            best = (history[-1], x, y, history, res)
    _, x, y, history, res = best
    value = _objective(u, x, y, fast=False)
    if res > RESIDUAL_LIMIT:
        raise InfeasibleDecompositionError("decomposition drifted from the coefficient grid", res)
    pairs = [(_frozen(x[:, i].copy()), _frozen(y[:, i].copy())) for i in range(R)
             if np.any(x[:, i]) and np.any(y[:, i])]
    return ProjectiveNormEstimate(float(value), 0.0, pairs, {}, [float(h) for h in history], res)


# -- lower bound -------------------------------------------------------------------


def norming_functional(x, shape, p):
    """Coordinates ``a`` with ``sum(a * x) == ||x||_p`` and dual norm ``||a||_p' == 1``.

    Both norms are Schatten norms of the row-major reshapes to ``shape``.
    """
    p = check_exponent(p)
    w = np.reshape(np.asarray(x, dtype=np.complex128), shape)
    uw, sw, vw = svd(w)
    if sw[0] == 0.0:
        return np.zeros(shape[0] * shape[1], dtype=np.complex128)
    if p == INFINITY:
        d = np.zeros_like(sw)
        d[0] = 1.0
    elif p == 1.0:
        d = (sw > 1e-15 * sw[0]).astype(float)
    else:
        d = (sw / sw[0]) ** (p - 1.0)
        d /= np.sum((sw / sw[0]) ** p) ** ((p - 1.0) / p)
    a = uw.conj() @ np.diag(d) @ vw.T
    return a.ravel()


def _pairing(c, m):
    return abs(complex(np.sum(c * m)))


def projective_lower(u, trials=64, seed=0):
    """Largest ``|<u, m>|`` over sampled bilinear forms of certified norm at most one.

    The candidates always include the form aligned with the singular value
    decomposition of the grid (exact for Hilbert legs) and the product of
    norming functionals of its top singular pair (exact for elementary
    tensors on any legs).
    """
    c = u.coefficients
    p, q = u.left_norm, u.right_norm
    cp, cq = _leg_constant(u.left_shape, p), _leg_constant(u.right_shape, q)
    pd, qd = dual_exponent(p), dual_exponent(q)
    best = {"value": 0.0, "kind": "zero", "matrix": np.zeros_like(c), "norm_bound": 0.0}

    def consider_dense(m, kind):
        sigma = schatten_norm(m, INFINITY)
        if sigma == 0.0:
            return
        bound = sigma * cp * cq
        value = _pairing(c, m) / bound
        if value > best["value"]:
            best.update(value=value, kind=kind, matrix=m, norm_bound=bound)

    def consider_rank_one(a, b, kind):
        na = _leg_norm(a, u.left_shape, pd)
        nb = _leg_norm(b, u.right_shape, qd)
        if na == 0.0 or nb == 0.0:
            return
        m = np.outer(a, b)
        value = _pairing(c, m) / (na * nb)
        if value > best["value"]:
            best.update(value=value, kind=kind, matrix=m, norm_bound=na * nb)

    uu, s, vv = svd(c)
    if s[0] > 0:
        keep = s > 1e-15 * s[0]
        consider_dense(uu[:, keep].conj() @ vv[:, keep].T, "aligned")
        a = norming_functional(uu[:, 0], u.left_shape, p)
        b = norming_functional(vv[:, 0].conj(), u.right_shape, q)
        consider_rank_one(a, b, "aligned-rank-one")

    rng = np.random.default_rng(seed)
    for _ in range(trials):
        z = rng.standard_normal(c.shape) + 1j * rng.standard_normal(c.shape)
        consider_dense(z, "random")
        a = rng.standard_normal(c.shape[0]) + 1j * rng.standard_normal(c.shape[0])
        b = rng.standard_normal(c.shape[1]) + 1j * rng.standard_normal(c.shape[1])
        consider_rank_one(a, b, "random-rank-one")

    value = best.pop("value")
    return ProjectiveNormEstimate(None, float(value), certificate_lower=best)


def projective_norm(u, R=None, iters=50, seed=0, restarts=5, trials=64):
    """Upper and lower estimates together."""
    up = projective_upper(u, R=R, iters=iters, seed=seed, restarts=restarts)
    lo = projective_lower(u, trials=trials, seed=seed)
    up.lower = lo.lower
    up.certificate_lower = lo.certificate_lower
    return up
