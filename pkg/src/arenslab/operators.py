"""Schatten norms, rank-one operators, projections and the Schur product.

The Schur product is taken with respect to the standard coordinate basis
of the truncation; there is no way to change the basis.
"""

import math

import numpy as np

from .matrix_core import DimensionError, _frozen, as_matrix, as_vector, svd

__all__ = [
    "INFINITY",
    "check_exponent",
    "dual_exponent",
    "schatten_norm",
    "operator_norm",
    "rank_one",
    "coordinate_projection",
    "schur",
    "tail_sup",
    "schur_tail_bound",
]

INFINITY = math.inf


def check_exponent(p):
    """Return ``p`` as a float after checking ``1 <= p <= inf``."""
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity"):
            return INFINITY
        try:
            p = float(p)
        except ValueError:
            raise ValueError(f"invalid Schatten exponent {p!r}") from None
    p = float(p)
    if not p >= 1.0:
        raise ValueError(f"Schatten exponent must be >= 1, got {p}")
    return p


def dual_exponent(p):
    """Hölder conjugate ``p'`` with ``1/p + 1/p' = 1``."""
    p = check_exponent(p)
    if p == 1.0:
        return INFINITY
    if p == INFINITY:
        return 1.0
    return p / (p - 1.0)


def _spectrum_norm(s, p):
    if s.size == 0:
        return 0.0
    if p == INFINITY:
        return float(s[0])
    top = s[0]
    if top == 0.0:
        return 0.0
    # scale by the top singular value to avoid overflow in s**p
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


def schatten_norm(a, p):
    """Schatten ``p``-norm ``(sum_k s_k**p)**(1/p)``; ``p=inf`` gives the operator norm.

    >>> schatten_norm(np.eye(2), 1)
    2.0
    """
    p = check_exponent(p)
    return _spectrum_norm(svd(a, compute_uv=False), p)


def operator_norm(a):
    return schatten_norm(a, INFINITY)


def rank_one(xi, eta):
    """Matrix of ``theta_{xi,eta}: gamma -> <gamma, eta> xi``.

    Entries are ``xi_r * conj(eta_s)``.  Composition follows
    ``rank_one(xi, eta) @ rank_one(zeta, delta) == <zeta, eta> rank_one(xi, delta)``.
    """
    xi, eta = as_vector(xi), as_vector(eta)
    return _frozen(np.outer(xi, eta.conj()))


def coordinate_projection(j, dim):
    """Orthogonal projection onto the span of the first ``j`` basis vectors."""
    if not (isinstance(j, (int, np.integer)) and 0 <= j <= dim):
        raise DimensionError(f"projection rank {j} invalid for dimension {dim}")
    d = np.zeros(dim, dtype=np.complex128)
    d[:j] = 1.0
    return _frozen(np.diag(d))


def schur(a, b):
    """Entrywise (Hadamard) product."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return _frozen(a * b)


def tail_sup(u, m, n):
    """Largest entry modulus over the strict tail block (0-based ``u[m:, n:]``).

    In 1-based terms this is ``sup_{r>m, s>n} |u_rs|``.  Empty tails give 0.
    """
    u = as_matrix(u)
    if m < 0 or n < 0:
        raise ValueError("tail offsets must be non-negative")
    block = u[m:, n:]
    if block.size == 0:
        return 0.0
    return float(np.abs(block).max())


def schur_tail_bound(v, w, u, m, n):
    """Upper bound for ``||v*u - w*u||_2**2`` when ``v`` and ``w`` agree off the tail.

    Returns ``tail_sup(u, m, n)**2 * sum_{tail} |v_rs - w_rs|**2``.  The bound
    is valid whenever ``v - w`` vanishes outside ``[m:, n:]``; the mixed
    blocks (head rows with tail columns and vice versa) count as head.
    """
    v, w, u = as_matrix(v), as_matrix(w), as_matrix(u)
    if not v.shape == w.shape == u.shape:
        raise DimensionError("v, w and u must share a shape")
    d = (v - w)[m:, n:]
    return tail_sup(u, m, n) ** 2 * float(np.sum(np.abs(d) ** 2))
