"""Catalog of the explicit counterexample scenarios and the randomized suites.

Indices are 1-based throughout: ``e(i)`` is the i-th basis vector, stored at
position ``i - 1``.  Each builder returns the form and the four families in
the order ``(m, a, a~, b, b~)`` expected by :func:`build_grid`.
"""

from dataclasses import dataclass, field

from .biregularity import SequenceFamily
from .forms import point_form, riesz_form, superop_from_vector_action, triangular_phi
from .matrix_core import basis_vector
from .operators import check_exponent, coordinate_projection, rank_one

__all__ = ["Scenario", "CATALOG", "hs_hs", "bk_k", "b0k_k", "bk_sp", "paired_families"]


def _e(i, n):
    return basis_vector(i - 1, n)


def _cached(fn):
    cache = {}

    def gen(i):
        if i not in cache:
            cache[i] = fn(i)
        return cache[i]

    return gen


def hs_hs(N, p=2.0, q=2.0):
    """Triangular form on Hilbert-Schmidt legs.

    ``S_i = e_i (x) e_1``, ``S~_j = e_1 (x) e_j`` (so ``S_i S~_j = E_ij``) and
    the same pattern ``T_i, T~_j`` on the second leg; the form sends
    ``E_ij`` to itself when ``j <= i`` and to zero otherwise, so
    ``G[i][j] = 1`` exactly when ``j <= i``.  ``p`` and ``q`` tag the
    Schatten exponents the families are certified in.
    """
    p, q = check_exponent(p), check_exponent(q)
    m = riesz_form(triangular_phi(N))
    s = SequenceFamily(_cached(lambda i: rank_one(_e(i, N), _e(1, N))), 1.0, "S_i=e_i(x)e_1", p)
    st = SequenceFamily(_cached(lambda j: rank_one(_e(1, N), _e(j, N))), 1.0, "S~_j=e_1(x)e_j", p)
    t = SequenceFamily(_cached(lambda i: rank_one(_e(i, N), _e(1, N))), 1.0, "T_i=f_i(x)f_1", q)
    tt = SequenceFamily(_cached(lambda j: rank_one(_e(1, N), _e(j, N))), 1.0, "T~_j=f_1(x)f_j", q)
    return m, s, st, t, tt


def bk_k(N, p=2.0):
    """Point-evaluation form on superoperators times Hilbert-Schmidt matrices.

    ``T_i(A) = theta_{S_i(A e_1), e_1}`` with ``S_i = theta_{e_1, e_i}``,
    ``T~_j(A) = theta_{R_j(A e_1), e_1}`` with ``R_j`` the projection onto
    the first ``j`` coordinates, ``A_i = theta_{e_i, e_1}``,
    ``A~_j = theta_{e_1, e_1}`` and ``m(T, A) = <T(A), theta_{e_1, e_1}>``.
    Then ``G[i][j] = <S_i R_j e_i, e_1>``, which is 1 exactly when ``i <= j``.
    """
    p = check_exponent(p)
    e1 = _e(1, N)
    d = rank_one(e1, e1)
    m = point_form(d)
    ti = SequenceFamily(
        _cached(lambda i: superop_from_vector_action(rank_one(e1, _e(i, N)), name=f"T_{i}")),
        1.0, "T_i:A->theta(S_i A e_1, e_1)")
    tj = SequenceFamily(
        _cached(lambda j: superop_from_vector_action(coordinate_projection(j, N), name=f"T~_{j}")),
        1.0, "T~_j:A->theta(R_j A e_1, e_1)")
    ai = SequenceFamily(_cached(lambda i: rank_one(_e(i, N), e1)), 1.0, "A_i=theta(e_i,e_1)", p)
    aj = SequenceFamily(lambda j: d, 1.0, "A~_j=theta(e_1,e_1)", p)
    return m, ti, tj, ai, aj


def b0k_k(N):
    """Same sequences as :func:`bk_k`; every ``T_i``, ``T~_j`` has rank at most ``N``."""
    return bk_k(N)


def bk_sp(N, p=1.0):
    """:func:`bk_k` with the matrix leg certified in the Schatten ``p``-norm."""
    return bk_k(N, p=p)


def paired_families(kind, N, p=2.0, q=2.0):
    if kind == "hs-hs":
        return hs_hs(N, p, q)
    if kind in ("bk-k", "b0k-k"):
        return bk_k(N)
    if kind == "bk-sp":
        return bk_sp(N, p)
    raise KeyError(kind)


@dataclass(frozen=True)
class Scenario:
    id: str
    result: str
    description: str
    defaults: dict = field(default_factory=dict)


CATALOG = (
    Scenario(
        "hs-hs",
        "S_p(H1) (x)_gamma S_q(H2) is not Arens regular for 1 <= p, q <= 2 (triangular form)",
        "grid is the indicator of j <= i; lim_i lim_j = 0, lim_j lim_i = 1",
        {"N": 64, "p": 2.0, "q": 2.0, "tail_window": 8, "eps": 1e-9, "tol": 1e-6},
    ),
    Scenario(
        "bk-k",
        "B(K) (x)_gamma K is not Arens regular, K = S_2(H) (point-evaluation form)",
        "grid is the indicator of i <= j; lim_i lim_j = 1, lim_j lim_i = 0",
        {"N": 64, "tail_window": 8, "eps": 1e-9, "tol": 1e-6},
    ),
    Scenario(
        "b0k-k",
        "B_0(K) (x)_gamma K is not Arens regular (finite-rank superoperators)",
        "same sequences and grid as bk-k",
        {"N": 64, "tail_window": 8, "eps": 1e-9, "tol": 1e-6},
    ),
    Scenario(
        "bk-sp",
        "B(K) (x)_gamma S_p(H) and B_0(K) (x)_gamma S_p(H) are not Arens regular for 1 <= p <= 2",
        "bk-k sequences with the matrix leg certified in the Schatten p-norm",
        {"N": 64, "p": 1.0, "tail_window": 8, "eps": 1e-9, "tol": 1e-6},
    ),
    Scenario(
        "schur",
        "S_2(H) (x)_gamma S_2(H) is Arens regular under the Schur product",
        "seeded random forms and weakly convergent families; expect no violations",
        {"N": 48, "trials": 100, "tail_window": 8, "eps": 1e-9, "tol": 1e-6},
    ),
    Scenario(
        "finite-dim",
        "every bilinear form on S_2 legs is biregular when one leg is finite dimensional",
        "random forms and norm-convergent families; limits equal m(S S~, T T~)",
        {"dim": 4, "N": 32, "trials": 200, "tail_window": 8, "eps": 1e-9},
    ),
    Scenario(
        "projnorm",
        "the projective norm is a cross norm",
        "upper/lower projective norm estimates for a random coefficient grid",
        {"dim": 6, "p": 2.0, "q": 2.0, "trials": 64},
    ),
)
