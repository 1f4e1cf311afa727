"""Generalized Kloosterman sums attached to cusp pairs of level-Q groups.

Two independent implementation routes exist for each sum:

* a collapsed formula over residues mod c*q (functions without suffix), and
* a coset-style oracle enumerating the full residue ranges that appear
  before any collapse (functions with the ``_oracle`` suffix).

The two routes are mutual oracles; the verification suites check them
against each other and against the classical-sum identities obtained by
averaging over the cusp numerators r.

Sign-class convention: the summation conditions ``x == +-1 (mod f)`` carry
one branch per sign when the defining congruence level Q/q is at least 3
(the two classes are then genuinely distinct at level Q/q, even if they
coincide mod a smaller f, in which case a residue pair is weighted by both
branches).  For Q/q in {1, 2} there is a single class, enumerated once, and
the weight parity is forced to 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .characters import DirichletCharacter
from .cusps import cusp_representatives, scaling_matrix, width
from .errors import IdentityError, PreconditionViolation
from .modular import divisors, euler_phi, moebius, tau
from .sums import RootOfUnitySum, kloosterman, units_with_inverses

__all__ = [
    "CuspPairSumSpec",
    "s_infty_rq",
    "s_infty_rq_oracle",
    "s_infty_rq_rsum",
    "s_infty_rq_rsum_rhs",
    "s_gamma01_infty_infty",
    "s_rq_rq",
    "s_rq_rq_oracle",
    "s_rq_rq_rsum",
    "s_rq_rq_moebius_rhs",
    "cor33_infty_margin",
    "cor33_rsum_ratio",
]

_PREF = (1 + 0j, -1j)  # (-i)**kappa for kappa in {0, 1}

#: Absolute tolerance per summed term for the self-checked identities.
TERM_TOL = 1e-9


@dataclass(frozen=True)
class CuspPairSumSpec:
    """Arguments of a cusp-pair sum: level data, multiplier, indices.

    ``chi`` is a character of modulus Q/q for the character-multiplier
    sums and None for the sign-multiplier ones.
    """

    Q: int
    q: int
    r: int
    chi: DirichletCharacter | None
    kappa: int
    m: int
    n: int
    c: int


def _fsum_complex(values: np.ndarray) -> complex:
    if values.size == 0:
        return 0j
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _angle_terms(k: np.ndarray, modulus: int) -> np.ndarray:
    theta = (2.0 * math.pi / modulus) * k.astype(np.float64)
    return np.cos(theta) + 1j * np.sin(theta)


@lru_cache(maxsize=512)
def _char_table(chi: DirichletCharacter) -> np.ndarray:
    """chi evaluated on all residues mod its modulus, as a complex array."""
    table = np.array([chi(j) for j in range(chi.modulus)], dtype=np.complex128)
    table.setflags(write=False)
    return table


def _validate_common(spec: CuspPairSumSpec) -> None:
    if spec.Q < 1 or spec.q < 1 or spec.c < 1:
        raise PreconditionViolation("Q, q, c must all be positive")
    if spec.Q % spec.q != 0:
        raise PreconditionViolation(f"q must divide Q, got q={spec.q}, Q={spec.Q}")
    if math.gcd(spec.r, spec.Q) != 1:
        raise PreconditionViolation(f"r must be coprime to Q, got r={spec.r}, Q={spec.Q}")
    if spec.kappa not in (0, 1):
        raise PreconditionViolation(f"kappa must be 0 or 1, got {spec.kappa}")


def _validate_chi(spec: CuspPairSumSpec) -> None:
    _validate_common(spec)
    big_m = spec.Q // spec.q
    if spec.chi is None or spec.chi.modulus != big_m:
        raise PreconditionViolation(f"chi must have modulus Q/q = {big_m}")
    if spec.chi.parity != spec.kappa:
        raise PreconditionViolation("kappa must match the parity of chi")
    if math.gcd(spec.c, big_m) != 1:
        raise PreconditionViolation(
            f"c must be coprime to Q/q for this cusp pair, got c={spec.c}, Q/q={big_m}"
        )


def _validate_sign(Q: int, q: int, kappa: int) -> None:
    if kappa not in (0, 1):
        raise PreconditionViolation(f"kappa must be 0 or 1, got {kappa}")
    if Q // q <= 2 and kappa != 0:
        raise PreconditionViolation("kappa must be 0 when Q/q <= 2")


def _sign_branches(big_m: int, kappa: int) -> list[tuple[int, int]]:
    """(eps, weight) branches of the +-1 congruence classes at level Q/q."""
    if big_m <= 2:
        return [(1, 1)]
    return [(1, 1), (-1, (-1) ** kappa)]


def s_infty_rq(spec: CuspPairSumSpec) -> RootOfUnitySum:
    """Character-twisted sum at the (infinity, r/q) cusp pair, collapsed form.

    Value: (-i)^kappa * conj(chi(c)) * sum of e((m*a + n*d)/(c*q)) over
    a*d == 1 (mod c*q) with d == c*rbar (mod gcd(q, Q/q)).
    """
    _validate_chi(spec)
    Q, q, c = spec.Q, spec.q, spec.c
    cq = c * q
    g = math.gcd(q, Q // q)
    units, inv = units_with_inverses(cq)
    if g > 1:
        rbar = pow(spec.r % g, -1, g)
        mask = inv % g == c * rbar % g
        units, inv = units[mask], inv[mask]
    k = (spec.m * units + spec.n * inv) % cq
    assert spec.chi is not None
    pref = _PREF[spec.kappa] * spec.chi(c).conjugate()
    terms = _angle_terms(k, cq)
    return RootOfUnitySum(pref * _fsum_complex(terms), len(units))


@lru_cache(maxsize=4096)
def _infty_rq_oracle_pairs(
    Q: int, q: int, c: int, r: int
) -> tuple[np.ndarray, np.ndarray]:
    """(a, d) pairs of the pre-collapse coset sum for the (infinity, r/q) pair.

    a runs mod c*q, d over its lifts mod c*q*w with d == c*y (mod Q/q).
    """
    cq = c * q
    w = width(Q, q)
    big_m = Q // q
    sm = scaling_matrix(Q, q, r)
    units, inv = units_with_inverses(cq)
    lifts = inv[:, None] + cq * np.arange(w, dtype=np.int64)[None, :]
    mask = lifts % big_m == (c * sm.y) % big_m
    a_sel = np.broadcast_to(units[:, None], lifts.shape)[mask]
    d_sel = lifts[mask]
    a_sel.setflags(write=False)
    d_sel.setflags(write=False)
    return a_sel, d_sel


def s_infty_rq_oracle(spec: CuspPairSumSpec) -> RootOfUnitySum:
    """Coset-style oracle for s_infty_rq: enumerates d over the full lift
    range mod c*q*w and evaluates the character at d*r - c*q*x directly."""
    _validate_chi(spec)
    Q, q, c = spec.Q, spec.q, spec.c
    cq = c * q
    big_m = Q // q
    sm = scaling_matrix(Q, q, spec.r)
    a_sel, d_sel = _infty_rq_oracle_pairs(Q, q, c, spec.r)
    assert spec.chi is not None
    weights = _char_table(spec.chi)[(d_sel * spec.r - c * q * sm.x) % big_m].conjugate()
    k = (spec.m * a_sel + spec.n * d_sel) % cq
    terms = weights * _angle_terms(k, cq)
    return RootOfUnitySum(_PREF[spec.kappa] * _fsum_complex(terms), len(a_sel))


def s_infty_rq_rsum_rhs(
    chi: DirichletCharacter, kappa: int, m: int, n: int, c: int, q: int
) -> RootOfUnitySum:
    """Closed form of the r-averaged (infinity, r/q) sum:
    (-i)^kappa * conj(chi(c)) * S(m, n; c*q)."""
    s = kloosterman(m, n, c * q)
    return RootOfUnitySum(_PREF[kappa] * chi(c).conjugate() * s.value, s.term_count)


def s_infty_rq_rsum(
    Q: int, q: int, chi: DirichletCharacter, kappa: int, m: int, n: int, c: int
) -> RootOfUnitySum:
    """Sum of s_infty_rq over the cusp numerators r for fixed q.

    Self-checks against the classical-sum closed form and returns the
    left-hand side.
    """
    left = 0j
    count = 0
    for cusp in cusp_representatives(Q):
        if cusp.q != q:
            continue
        part = s_infty_rq(CuspPairSumSpec(Q, q, cusp.r, chi, kappa, m, n, c))
        left += part.value
        count += part.term_count
    right = s_infty_rq_rsum_rhs(chi, kappa, m, n, c, q)
    tol = TERM_TOL * max(count, right.term_count, 1)
    if abs(left - right.value) > tol:
        raise IdentityError(
            f"r-averaged (infinity, r/q) identity failed: |{left} - {right.value}| > {tol}"
        )
    return RootOfUnitySum(left, count)


def _paired_units_in_class(
    modulus: int, f: int, eps: int
) -> tuple[np.ndarray, np.ndarray]:
    """Unit pairs a*d == 1 (mod modulus) with a == d == eps (mod f)."""
    units, inv = units_with_inverses(modulus)
    if f > 1:
        target = eps % f
        mask = (units % f == target) & (inv % f == target)
        units, inv = units[mask], inv[mask]
    return units, inv


def s_gamma01_infty_infty(
    Q: int, q: int, kappa: int, m: int, n: int, c: int
) -> RootOfUnitySum:
    """Sign-multiplier sum at the (infinity, infinity) pair of the +-1
    congruence group of levels (Q, Q/q).

    Value: (-i)^kappa * sum over a*d == 1 (mod c), a == d == +-1 (mod Q/q),
    weighting the -1 class by (-1)^kappa.  Requires c in Q*N.
    """
    _validate_sign(Q, q, kappa)
    if c < 1 or c % Q != 0:
        raise PreconditionViolation(f"c must be a positive multiple of Q, got c={c}, Q={Q}")
    big_m = Q // q
    total = 0j
    count = 0
    for eps, weight in _sign_branches(big_m, kappa):
        a_sel, d_sel = _paired_units_in_class(c, big_m, eps)
        k = (m * a_sel + n * d_sel) % c
        total += weight * _fsum_complex(_angle_terms(k, c))
        count += len(a_sel)
    return RootOfUnitySum(_PREF[kappa] * total, count)


def _validate_rq_rq(spec: CuspPairSumSpec) -> int:
    _validate_common(spec)
    _validate_sign(spec.Q, spec.q, spec.kappa)
    w = width(spec.Q, spec.q)
    if (spec.c * spec.q * w) % spec.Q != 0:
        raise PreconditionViolation(
            f"c*q*w must lie in Q*N, got c={spec.c}, q={spec.q}, w={w}, Q={spec.Q}"
        )
    return w


def s_rq_rq(spec: CuspPairSumSpec) -> RootOfUnitySum:
    """Sign-multiplier sum at the (r/q, r/q) pair, collapsed form.

    Value: (-i)^kappa * gcd(c, w) * sum over a*d == 1 (mod c*q) with
    a + c*y == d - c*y == +-1 (mod gcd(c*q, Q/q)), the -1 branch weighted
    by (-1)^kappa.  The index satisfies c*q*w in Q*N.
    """
    w = _validate_rq_rq(spec)
    Q, q, c = spec.Q, spec.q, spec.c
    cq = c * q
    big_m = Q // q
    fm = math.gcd(cq, big_m)
    y = scaling_matrix(Q, q, spec.r).y
    units, inv = units_with_inverses(cq)
    total = 0j
    count = 0
    for eps, weight in _sign_branches(big_m, spec.kappa):
        target = (eps - c * y) % fm if fm > 1 else 0
        target_d = (eps + c * y) % fm if fm > 1 else 0
        if fm > 1:
            mask = (units % fm == target) & (inv % fm == target_d)
            a_sel, d_sel = units[mask], inv[mask]
        else:
            a_sel, d_sel = units, inv
        k = (spec.m * a_sel + spec.n * d_sel) % cq
        total += weight * _fsum_complex(_angle_terms(k, cq))
        count += len(a_sel)
    pref = _PREF[spec.kappa] * math.gcd(c, w)
    return RootOfUnitySum(pref * total, count)


@lru_cache(maxsize=4096)
def _rq_rq_oracle_pairs(
    Q: int, q: int, c: int, r: int, eps: int
) -> tuple[np.ndarray, np.ndarray]:
    """(a, d) pairs mod c*q*w of the pre-collapse (r/q, r/q) coset sum for
    one sign class eps."""
    w = width(Q, q)
    cq = c * q
    cqw = cq * w
    big_m = Q // q
    y = scaling_matrix(Q, q, r).y
    a_all = np.arange(cqw, dtype=np.int64)
    a_all = a_all[np.gcd(a_all, cq) == 1]
    _, inv = units_with_inverses(cq)
    inv_map = np.zeros(cq, dtype=np.int64)
    units_cq, _ = units_with_inverses(cq)
    inv_map[units_cq] = inv
    d_base = inv_map[a_all % cq]
    lifts = d_base[:, None] + cq * np.arange(w, dtype=np.int64)[None, :]
    a_grid = np.broadcast_to(a_all[:, None], lifts.shape)
    shifted_a = a_grid + c * y
    shifted_d = lifts - c * y
    mask = (shifted_a % big_m == eps % big_m) & (shifted_d % big_m == eps % big_m)
    mask &= (shifted_a * shifted_d - 1) % (c * big_m) == 0
    a_sel = a_grid[mask]
    d_sel = lifts[mask]
    a_sel.setflags(write=False)
    d_sel.setflags(write=False)
    return a_sel, d_sel


def s_rq_rq_oracle(spec: CuspPairSumSpec) -> RootOfUnitySum:
    """Coset-style oracle for s_rq_rq: enumerates a, d over the full range
    mod c*q*w with the congruences of the uncollapsed sum; the collapse
    factor gcd(c, w) is thereby exercised rather than assumed."""
    _validate_rq_rq(spec)
    Q, q, c = spec.Q, spec.q, spec.c
    cq = c * q
    big_m = Q // q
    total = 0j
    count = 0
    for eps, weight in _sign_branches(big_m, spec.kappa):
        a_sel, d_sel = _rq_rq_oracle_pairs(Q, q, c, spec.r, eps)
        k = (spec.m * a_sel + spec.n * d_sel) % cq
        total += weight * _fsum_complex(_angle_terms(k, cq))
        count += len(a_sel)
    return RootOfUnitySum(_PREF[spec.kappa] * total, count)


def s_rq_rq_moebius_rhs(
    Q: int, q: int, kappa: int, m: int, n: int, c: int
) -> RootOfUnitySum:
    """Moebius-inverted closed form of the r-averaged (r/q, r/q) sum."""
    _validate_sign(Q, q, kappa)
    w = width(Q, q)
    if (c * q * w) % Q != 0:
        raise PreconditionViolation(f"c*q*w must lie in Q*N, got c={c}")
    cq = c * q
    big_m = Q // q
    g_c = math.gcd(c, big_m)
    ratio = euler_phi(math.gcd(q, big_m)) // euler_phi(math.gcd(q, Q // (q * g_c)))
    total = 0j
    count = 0
    for f in divisors(math.gcd(cq, big_m)):
        if f % g_c != 0:
            continue
        mu = moebius(f // g_c)
        if mu == 0:
            continue
        for eps, weight in _sign_branches(big_m, kappa):
            a_sel, d_sel = _paired_units_in_class(cq, f, eps)
            k = (m * a_sel + n * d_sel) % cq
            total += mu * weight * _fsum_complex(_angle_terms(k, cq))
            count += len(a_sel)
    pref = _PREF[kappa] * math.gcd(c, w) * ratio
    return RootOfUnitySum(pref * total, count)


def s_rq_rq_rsum(
    Q: int, q: int, kappa: int, m: int, n: int, c: int
) -> RootOfUnitySum:
    """Sum of s_rq_rq over the cusp numerators r for fixed q.

    Self-checks against the Moebius-inverted closed form and returns the
    left-hand side.
    """
    left = 0j
    count = 0
    for cusp in cusp_representatives(Q):
        if cusp.q != q:
            continue
        part = s_rq_rq(CuspPairSumSpec(Q, q, cusp.r, None, kappa, m, n, c))
        left += part.value
        count += part.term_count
    right = s_rq_rq_moebius_rhs(Q, q, kappa, m, n, c)
    tol = TERM_TOL * max(count, right.term_count, 1)
    if abs(left - right.value) > tol:
        raise IdentityError(
            f"Moebius r-averaged (r/q, r/q) identity failed: "
            f"|{left} - {right.value}| > {tol}"
        )
    return RootOfUnitySum(left, count)


def cor33_infty_margin(
    Q: int, q: int, kappa: int, m: int, n: int, c: int
) -> float:
    """|sign-multiplier (infinity, infinity) sum| over its explicit bound
    2^(5/2) * tau(c) * min(c/(Q/q), gcd(c/(Q/q), m, n)^(1/2) * c^(1/2))."""
    s = s_gamma01_infty_infty(Q, q, kappa, m, n, c)
    big_m = Q // q
    c_red = c // big_m
    g = math.gcd(math.gcd(abs(m), abs(n)), c_red)
    bound = 2**2.5 * tau(c) * min(c_red, math.sqrt(g) * math.sqrt(c))
    return abs(s.value) / bound


def cor33_rsum_ratio(
    Q: int, q: int, kappa: int, m: int, n: int, c: int
) -> float:
    """Ratio of the r-averaged (r/q, r/q) sum to the explicit part of its
    bound; the grid maximum is frozen as a regression constant since the
    remaining factor is only determined up to (c*Q)^o(1)."""
    s = s_rq_rq_rsum(Q, q, kappa, m, n, c)
    big_m = Q // q
    g_c = math.gcd(c, big_m)
    cq_red = c * q // g_c
    g = math.gcd(math.gcd(abs(m), abs(n)), cq_red)
    bound = g_c * min(cq_red, math.sqrt(g) * math.sqrt(c * q))
    return abs(s.value) / bound
