"""Riesz-represented bilinear forms and superoperators on Hilbert-Schmidt truncations.

A bounded bilinear form on two Hilbert-Schmidt spaces is written
``m(S, T) = <T, phi(S)>`` with ``phi`` conjugate linear; :class:`RieszMap`
carries ``phi`` together with a certified bound on its norm.  A
:class:`Superoperator` is a linear map on matrices kept as a closure and
never materialized except for small property checks.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .matrix_core import DimensionError, _frozen, as_matrix, hs_inner
from .operators import operator_norm

__all__ = [
    "RieszMap",
    "BilinearForm",
    "Superoperator",
    "triangular_phi",
    "conjugation_map",
    "sandwich_map",
    "dense_riesz_map",
    "random_riesz_map",
    "riesz_form",
    "point_form",
    "evaluation_form",
    "identity_superop",
    "zero_superop",
    "superop_from_vector_action",
    "compose_superops",
    "MATERIALIZE_LIMIT",
]

# superoperators are materialized as dim**2 x dim**2 matrices only up to here
MATERIALIZE_LIMIT = 8


@dataclass(frozen=True)
class RieszMap:
    """Conjugate-linear map ``phi`` on ``shape`` matrices with ``||phi(A)||_2 <= norm_bound ||A||_2``."""

    map: Callable
    norm_bound: float
    shape: tuple
    name: str = "phi"

    def __call__(self, a):
        a = as_matrix(a)
        if a.shape != self.shape:
            raise DimensionError(f"{self.name} expects shape {self.shape}, got {a.shape}")
        return _frozen(np.asarray(self.map(a), dtype=np.complex128))


@dataclass(frozen=True)
class BilinearForm:
    """A bilinear form ``evaluate(x, y)`` with a bound on ``|m(x, y)|`` over unit balls."""

    evaluate: Callable
    bound: float
    name: str = "m"
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, x, y):
        return complex(self.evaluate(x, y))


@dataclass(frozen=True)
class Superoperator:
    """Linear map on ``dim x dim`` matrices with induced Hilbert-Schmidt bound ``norm_bound``."""

    apply: Callable
    norm_bound: float
    dim: int
    name: str = "T"

    def __call__(self, a):
        a = as_matrix(a)
        if a.shape != (self.dim, self.dim):
            raise DimensionError(f"{self.name} acts on {self.dim}x{self.dim} matrices, got {a.shape}")
        return _frozen(np.asarray(self.apply(a), dtype=np.complex128))

    def __matmul__(self, other):
        return compose_superops(self, other)

    def materialize(self):
        """Dense matrix of the map in the matrix-unit basis (row-major vec)."""
        d = self.dim
        if d > MATERIALIZE_LIMIT:
            raise DimensionError(f"refusing to materialize a superoperator of dimension {d}")
        cols = []
        for k in range(d * d):
            unit = np.zeros(d * d, dtype=np.complex128)
            unit[k] = 1.0
            cols.append(self(unit.reshape(d, d)).ravel())
        return np.column_stack(cols)


# -- Riesz maps ---------------------------------------------------------------


def triangular_phi(dim):
    """Conjugate the lower triangle (diagonal included) and zero the rest.

    Coefficient ``c_ij`` against the matrix unit ``E_ij`` is sent to
    ``conj(c_ij) E_ij`` when ``j <= i`` and to zero otherwise.
    """
    if dim < 1:
        raise DimensionError("dimension must be positive")
    keep = np.tril(np.ones((dim, dim), dtype=bool))
    return RieszMap(lambda c: np.where(keep, c.conj(), 0), 1.0, (dim, dim), name="triangular")


def conjugation_map(dim, cols=None):
    cols = dim if cols is None else cols
    return RieszMap(np.conjugate, 1.0, (dim, cols), name="conjugation")


def sandwich_map(left, right, mask=None, bound=None):
    """``C -> conj(left @ (mask * C) @ right)``, bounded by ``||left|| max|mask| ||right||``.

    Pass ``bound`` when the operator norms of ``left`` and ``right`` are
    already known to be at most one; it must then dominate ``max|mask|``.
    """
    left, right = as_matrix(left), as_matrix(right)
    shape = (left.shape[1], right.shape[0])
    if mask is None:
        mask_bound = 1.0

        def apply(c):
            return (left @ c @ right).conj()
    else:
        mask = as_matrix(mask)
        if mask.shape != shape:
            raise DimensionError(f"mask shape {mask.shape} does not match {shape}")
        mask_bound = float(np.abs(mask).max())

        def apply(c):
            return (left @ (mask * c) @ right).conj()

    if bound is None:
        bound = operator_norm(left) * mask_bound * operator_norm(right)
    elif bound < mask_bound:
        raise ValueError("declared bound is smaller than the mask bound")
    return RieszMap(apply, bound, shape, name="sandwich")


def dense_riesz_map(kernel, shape, out_shape=None):
    """``C -> conj(kernel @ vec(C))`` reshaped to ``out_shape`` (row-major vec)."""
    kernel = as_matrix(kernel)
    out_shape = shape if out_shape is None else out_shape
    if kernel.shape != (out_shape[0] * out_shape[1], shape[0] * shape[1]):
        raise DimensionError(f"kernel shape {kernel.shape} incompatible with {shape} -> {out_shape}")
    return RieszMap(
        lambda c: (kernel @ c.ravel()).conj().reshape(out_shape),
        operator_norm(kernel),
        tuple(shape),
        name="dense",
    )


def _random_contraction(rng, n):
    """``(I + Z / ||Z||_F) / 2``: operator norm at most one, no SVD needed."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (np.eye(n) + z / np.linalg.norm(z)) / 2


def random_riesz_map(dim, rng, kind="auto"):
    """Random conjugate-linear map of norm at most one on ``dim x dim`` matrices.

    ``kind="dense"`` draws a full kernel normalized by its operator norm
    (only sensible for small ``dim``); ``kind="sandwich"`` draws
    ``C -> conj(L (M * C) R)`` with contractions ``L, R`` and a mask ``M``
    whose entries lie in the unit disk.
    """
    if kind == "auto":
        kind = "dense" if dim <= MATERIALIZE_LIMIT else "sandwich"
    if kind == "dense":
        z = rng.standard_normal((dim * dim,) * 2) + 1j * rng.standard_normal((dim * dim,) * 2)
        return dense_riesz_map(z / operator_norm(z), (dim, dim))
    if kind == "sandwich":
        mask = np.sqrt(rng.uniform(size=(dim, dim))) * np.exp(2j * np.pi * rng.uniform(size=(dim, dim)))
        return sandwich_map(_random_contraction(rng, dim), _random_contraction(rng, dim), mask,
                            bound=1.0)
    raise ValueError(f"unknown kind {kind!r}")


# -- bilinear forms -------------------------------------------------------------


def riesz_form(phi):
    """The form ``m(S, T) = <T, phi(S)>``; bilinear because ``phi`` is conjugate linear."""

    def evaluate(s, t):
        return hs_inner(t, phi(s))

    return BilinearForm(evaluate, phi.norm_bound, name=f"riesz[{phi.name}]")


def point_form(d):
    """The form ``m(T, A) = <T(A), D>`` on superoperators times matrices."""
    d = as_matrix(d)
    if d.shape[0] != d.shape[1]:
        raise DimensionError("D must be square")
    hs = float(np.linalg.norm(d))

    def evaluate(t, a):
        return hs_inner(t(a), d)

    return BilinearForm(evaluate, hs, name="point", params={"D": d})


def evaluation_form(beta):
    """The form ``m(T, zeta) = <T zeta, beta>`` on operators times vectors."""
    beta = np.asarray(beta, dtype=np.complex128)

    def evaluate(t, zeta):
        return np.vdot(beta, as_matrix(t) @ np.asarray(zeta, dtype=np.complex128))

    return BilinearForm(evaluate, float(np.linalg.norm(beta)), name="evaluation")


# -- superoperators -------------------------------------------------------------


def identity_superop(dim):
    return Superoperator(lambda a: a, 1.0, dim, name="I")


def zero_superop(dim):
    return Superoperator(np.zeros_like, 0.0, dim, name="0")


def superop_from_vector_action(s, name="T"):
    """``A -> theta_{S (A e_1), e_1}``: the first column of ``A`` pushed through ``S``.

    The induced Hilbert-Schmidt norm equals the operator norm of ``S``.
    """
    s = as_matrix(s)
    dim = s.shape[0]
    if s.shape[1] != dim:
        raise DimensionError("S must be square")

    def apply(a):
        # theta_{xi, e_1} is the matrix with first column xi
        out = np.zeros((dim, dim), dtype=np.complex128)
        out[:, 0] = s @ a[:, 0]
        return out

    return Superoperator(apply, operator_norm(s), dim, name=name)


def compose_superops(t1, t2):
    """``t1 o t2`` (apply ``t2`` first)."""
    if t1.dim != t2.dim:
        raise DimensionError(f"cannot compose dimensions {t1.dim} and {t2.dim}")
    f1, f2 = t1.apply, t2.apply
    return Superoperator(
        lambda a: f1(f2(a)), t1.norm_bound * t2.norm_bound, t1.dim, name=f"{t1.name}{t2.name}"
    )
