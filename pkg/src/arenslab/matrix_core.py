"""Dense complex linear algebra used by every other module.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``.
Every function validates its input, never mutates it, and returns a fresh
read-only array, so values can be shared freely between workers.
"""

import numpy as np

__all__ = [
    "DimensionError",
    "ConvergenceError",
    "as_matrix",
    "as_vector",
    "basis_vector",
    "matrix_unit",
    "identity",
    "matmul",
    "adjoint",
    "trace",
    "hs_inner",
    "frobenius_norm",
    "svd",
]


class DimensionError(ValueError):
    """Raised when operands have incompatible or invalid shapes."""


class ConvergenceError(ArithmeticError):
    """Raised when an iterative routine fails to converge.

    The offending residual is available as ``residual``.
    """

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


def _frozen(a):
    a.flags.writeable = False
    return a


def as_matrix(a):
    """Validate ``a`` as a finite 2-D complex matrix and return a read-only copy.

    Arrays that are already read-only ``complex128`` are returned as they are.
    """
    if isinstance(a, np.ndarray) and a.dtype == np.complex128 and not a.flags.writeable:
        if a.ndim == 2 and a.size:
            return a
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or 0 in m.shape:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimensionError("matrix entries must be finite")
    return _frozen(m)


def as_vector(v):
    """Validate ``v`` as a finite 1-D complex vector and return a read-only copy."""
    x = np.array(v, dtype=np.complex128)
    if x.ndim != 1 or x.size == 0:
        raise DimensionError(f"expected a non-empty 1-D vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DimensionError("vector entries must be finite")
    return _frozen(x)


def basis_vector(k, dim):
    """Standard basis vector with a one at 0-based position ``k``."""
    if not 0 <= k < dim:
        raise DimensionError(f"basis index {k} out of range for dimension {dim}")
    e = np.zeros(dim, dtype=np.complex128)
    e[k] = 1.0
    return _frozen(e)


def matrix_unit(r, s, dim, cols=None):
    """Matrix unit with a one at 0-based position ``(r, s)``."""
    cols = dim if cols is None else cols
    if not (0 <= r < dim and 0 <= s < cols):
        raise DimensionError(f"unit ({r}, {s}) out of range for shape ({dim}, {cols})")
    e = np.zeros((dim, cols), dtype=np.complex128)
    e[r, s] = 1.0
    return _frozen(e)


def identity(dim):
    return _frozen(np.eye(dim, dtype=np.complex128))


def matmul(a, b):
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    inner = a.any(axis=0)
    if inner.all():
        return _frozen(a @ b)
    # contract only over indices where a has a nonzero column
    idx = np.flatnonzero(inner)
    if idx.size == 1:
        return _frozen(np.multiply.outer(a[:, idx[0]], b[idx[0]]))
    return _frozen(a[:, idx] @ b[idx, :])


def adjoint(a):
    """Conjugate transpose."""
    return _frozen(np.ascontiguousarray(as_matrix(a).conj().T))


def trace(a):
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"trace needs a square matrix, got {a.shape}")
    return complex(np.trace(a))


def hs_inner(a, b):
    """Hilbert-Schmidt inner product ``Tr(b* a)``, linear in ``a``."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    # Tr(b* a) == sum_rs conj(b_rs) a_rs, without forming the product
    return complex(np.vdot(b, a))


def frobenius_norm(a):
    a = as_matrix(a)
    return float(np.sqrt(np.sum(a.real**2 + a.imag**2)))


def _round_robin(n):
    """Pairings for a cyclic sweep: ``n - 1`` rounds of disjoint column pairs.

    ``n`` must be even; every unordered pair appears exactly once per sweep.
    """
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        p = np.array(players[:half])
        q = np.array(players[half:][::-1])
        rounds.append((p, q))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _jacobi_columns(g, tol, max_sweeps, accumulate=True):
    """One-sided (Hestenes) Jacobi on the columns of ``g``.

    Orthogonalizes the columns of ``g`` in place by complex plane rotations
    and returns the accumulated unitary ``v`` such that ``g_in @ v == g``.
    """
    m, n = g.shape
    pad = n % 2
    if pad:
        g = np.hstack([g, np.zeros((m, 1), dtype=g.dtype)])
    nn = g.shape[1]
    v = np.eye(nn, dtype=np.complex128)
    rounds = _round_robin(nn)

    off = np.inf
    for _ in range(max_sweeps):
        off = 0.0
        for p, q in rounds:
            gp, gq = g[:, p], g[:, q]
            alpha = np.sum(gp.real**2 + gp.imag**2, axis=0)
            beta = np.sum(gq.real**2 + gq.imag**2, axis=0)
            gamma = np.sum(gp.conj() * gq, axis=0)
            mod = np.abs(gamma)
            scale = np.sqrt(alpha * beta)
            with np.errstate(divide="ignore", invalid="ignore"):
                rel = np.where(scale > 0, mod / scale, 0.0)
            off = max(off, float(rel.max(initial=0.0)))
            act = rel > tol
            if not act.any():
                continue
            p, q = p[act], q[act]
            alpha, beta, gamma, mod = alpha[act], beta[act], gamma[act], mod[act]
            phase = gamma / mod
            zeta = (beta - alpha) / (2.0 * mod)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta**2))
            c = 1.0 / np.sqrt(1.0 + t**2)
            s = c * t
            for mat in ((g, v) if accumulate else (g,)):
                xp = mat[:, p]
                xq = mat[:, q] * phase.conj()
                mat[:, p] = c * xp - s * xq
                mat[:, q] = s * xp + c * xq
        if off <= tol:
            break
    else:
        raise ConvergenceError("one-sided Jacobi did not converge", off)
    if pad:
        g, v = g[:, :n], v[:n, :n]
    return g, v


def _complete_columns(u, keep):
    """Replace columns of ``u`` not flagged in ``keep`` by an orthonormal completion."""
    m = u.shape[0]
    kept = u[:, keep]
    q, _ = np.linalg.qr(np.hstack([kept, np.eye(m, dtype=np.complex128)]))
    filled = u.copy()
    filled[:, ~keep] = q[:, kept.shape[1]:kept.shape[1] + int((~keep).sum())]
    return filled


def svd(a, tol=None, max_sweeps=60, compute_uv=True):
    """Thin singular value decomposition by one-sided Jacobi rotations.

    Parameters
    ----------
    a : array_like
        Complex matrix of shape ``(m, n)``.
    tol : float, optional
        Orthogonality threshold for column pairs; defaults to ``1e-15 * m``.
    max_sweeps : int
        Sweep limit before :class:`ConvergenceError` is raised.

    Returns
    -------
    u : ndarray, shape (m, k)
    s : ndarray, shape (k,)
        Non-increasing singular values, ``k = min(m, n)``.
    v : ndarray, shape (n, k)
        ``a == u @ diag(s) @ v.conj().T`` up to rounding.

    With ``compute_uv=False`` only ``s`` is returned.
    """
    a = as_matrix(a)
    m, n = a.shape
    if not compute_uv:
        # zero rows and columns only contribute zero singular values
        rows, cols = np.any(a != 0, axis=1), np.any(a != 0, axis=0)
        if not (rows.all() and cols.all()):
            out = np.zeros(min(m, n))
            if rows.any():
                core = svd(a[rows][:, cols], tol=tol, max_sweeps=max_sweeps, compute_uv=False)
                out[:core.size] = core
            return _frozen(out)
    if m < n:
        out = svd(a.conj().T, tol=tol, max_sweeps=max_sweeps, compute_uv=compute_uv)
        if not compute_uv:
            return out
        v, s, u = out
        return u, s, v
    tol = 1e-15 * m if tol is None else tol

    # rescale so squared column norms can neither overflow nor underflow
    amax = float(np.abs(a).max())
    scale_in = amax if amax > 0 else 1.0
    g, v = _jacobi_columns(a / scale_in, tol, max_sweeps, accumulate=compute_uv)
    s = np.linalg.norm(g, axis=0) * scale_in
    if not compute_uv:
        return _frozen(np.sort(s)[::-1].copy())
    order = np.argsort(-s, kind="stable")
    s, g, v = s[order], g[:, order], v[:, order]

    scale = s[0] if s.size else 0.0
    keep = s > max(scale, np.finfo(float).tiny) * 1e-15 * max(m, n)
    u = np.zeros_like(g)
    u[:, keep] = g[:, keep] / (s[keep] / scale_in)
    if not keep.all():
        s = np.where(keep, s, 0.0)
        u = _complete_columns(u, keep)
    return _frozen(u), _frozen(s), _frozen(v)
