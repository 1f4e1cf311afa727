"""Classical Kloosterman sums, quadratic Gauss sums, and restricted
Kloosterman-type sums over residues in a fixed class, together with their
reduction identities and explicit-constant bound margins.

Evaluators accumulate unit-modulus terms with exact (fsum) compensation, so
the accumulated rounding error stays far below the repo-wide tolerance of
1e-9 * term_count.  Angles are kept as integers mod the sum's modulus until
the final exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import PreconditionViolation
from .modular import carmichael_lambda, egcd, factorize, tau

__all__ = [
    "RootOfUnitySum",
    "kloosterman",
    "kloosterman_fast",
    "gauss_sum",
    "gauss_reduce",
    "t_sum",
    "t_sum_fast",
    "weil_margin",
    "t_margin",
]

# Largest modulus for which a**2 * c fits comfortably in int64 vector math.
_VEC_LIMIT = 2_000_000


@dataclass(frozen=True)
class RootOfUnitySum:
    """A finite sum of unit-modulus terms and the number of terms summed."""

    value: complex
    term_count: int

    @property
    def abs(self) -> float:
        return abs(self.value)


def cis_frac(num: int, den: int) -> complex:
    """exp(2*pi*i*num/den), exact on the axes."""
    num %= den
    if num == 0:
        return 1 + 0j
    if 2 * num == den:
        return -1 + 0j
    if 4 * num == den:
        return 1j
    if 4 * num == 3 * den:
        return -1j
    theta = 2.0 * math.pi * (num / den)
    return complex(math.cos(theta), math.sin(theta))


# Above this many terms, sums are blocked: exact fsum of per-block pairwise
# sums.  The accumulated error stays below a few ulps per term either way.
_FSUM_BLOCK = 1 << 13


def compensated_sum(values: np.ndarray) -> float:
    """Compensated total of a float array: exactly rounded below the block
    size, otherwise an exact fsum of pairwise-summed blocks."""
    if values.size <= _FSUM_BLOCK:
        return math.fsum(values)
    nblocks = -(-values.size // _FSUM_BLOCK)
    partials = [
        np.sum(values[i * _FSUM_BLOCK : (i + 1) * _FSUM_BLOCK]) for i in range(nblocks)
    ]
    return math.fsum(partials)


def _fsum_angles(k: np.ndarray, modulus: int) -> complex:
    """Sum of exp(2*pi*i*k/modulus) over an int64 angle array, compensated."""
    if k.size == 0:
        return 0j
    theta = (2.0 * math.pi / modulus) * k.astype(np.float64)
    return complex(compensated_sum(np.cos(theta)), compensated_sum(np.sin(theta)))


def _pow_mod_vec(base: np.ndarray, exponent: int, modulus: int) -> np.ndarray:
    result = np.ones_like(base)
    b = base % modulus
    e = exponent
    while e:
        if e & 1:
            result = result * b % modulus
        b = b * b % modulus
        e >>= 1
    return result


_CACHE_MODULUS_LIMIT = 20_000


def _build_unit_tables(modulus: int) -> tuple[np.ndarray, np.ndarray]:
    if modulus == 1:
        z = np.zeros(1, dtype=np.int64)
        return z, z
    if modulus > _VEC_LIMIT:
        raise ValueError(f"modulus {modulus} too large for dense unit table")
    a = np.arange(modulus, dtype=np.int64)
    units = a[np.gcd(a, modulus) == 1]
    if modulus <= _CACHE_MODULUS_LIMIT:
        inv = _pow_mod_vec(units, carmichael_lambda(modulus) - 1, modulus)
    else:
        from ._kernels import _batch_inverse

        inv = _batch_inverse(units, modulus)
        # Certify the table: a single exact integer check makes the route
        # used to produce it irrelevant.
        assert bool(np.all(units * inv % modulus == 1))
    out = (units, inv)
    for arr in out:
        arr.setflags(write=False)
    return out


_cached_unit_tables = lru_cache(maxsize=256)(_build_unit_tables)
_last_large_table: tuple[int, tuple[np.ndarray, np.ndarray]] | None = None


def units_with_inverses(modulus: int) -> tuple[np.ndarray, np.ndarray]:
    """(units, inverses) arrays mod `modulus`; for modulus 1 both are [0].

    Small moduli are LRU-cached; for large ones only the most recent table
    is kept, which covers the evaluate-several-sums-at-one-modulus pattern
    without holding many multi-megabyte arrays.
    """
    global _last_large_table
    if modulus <= _CACHE_MODULUS_LIMIT:
        return _cached_unit_tables(modulus)
    if _last_large_table is not None and _last_large_table[0] == modulus:
        return _last_large_table[1]
    tables = _build_unit_tables(modulus)
    _last_large_table = (modulus, tables)
    return tables


def kloosterman(m: int, n: int, c: int) -> RootOfUnitySum:
    """S(m, n; c): sum of e((m*a + n*d)/c) over a*d == 1 (mod c).

    Direct enumeration over the units mod c; this is the reference
    implementation every fast path is tested against.
    """
    if c < 1:
        raise PreconditionViolation(f"modulus c must be >= 1, got {c}")
    units, inv = units_with_inverses(c)
    k = (m * units + n * inv) % c
    return RootOfUnitySum(_fsum_angles(k, c), len(units))


def _kloosterman_prime_power(m: int, n: int, pa: int) -> RootOfUnitySum:
    """S(m, n; p**alpha) by direct enumeration (no splitting possible)."""
    units, inv = units_with_inverses(pa)
    k = (m * units + n * inv) % pa
    return RootOfUnitySum(_fsum_angles(k, pa), len(units))


def kloosterman_fast(m: int, n: int, c: int) -> RootOfUnitySum:
    """S(m, n; c) via the coprime-splitting identity.

    The modulus is split into prime powers r with cofactor s and Bezout
    weights u*r + v*s = 1; each factor is S(m*v, n*v; r) with the arguments
    twisted by the inverse cofactor, and the remaining sum continues with
    m*u, n*u mod s.
    """
    if c < 1:
        raise PreconditionViolation(f"modulus c must be >= 1, got {c}")
    value = 1 + 0j
    terms = 1
    remaining = c
    mc, nc = m, n
    for p, e in factorize(c).factors:
        r = p**e
        s = remaining // r
        if s == 1:
            part = _kloosterman_prime_power(mc % r, nc % r, r)
            value *= part.value
            terms *= part.term_count
            break
        _, u, v = egcd(r, s)
        part = _kloosterman_prime_power(mc * v % r, nc * v % r, r)
        value *= part.value
        terms *= part.term_count
        mc, nc = mc * u % s, nc * u % s
        remaining = s
    return RootOfUnitySum(value, terms)


def gauss_sum(a: int, b: int, c: int) -> RootOfUnitySum:
    """G(a, b; c): sum of e((a*n^2 + b*n)/c) over n mod c."""
    if c < 1:
        raise PreconditionViolation(f"modulus c must be >= 1, got {c}")
    ar, br = a % c, b % c
    if c <= _VEC_LIMIT:
        n = np.arange(c, dtype=np.int64)
        k = (ar * n * n + br * n) % c
        return RootOfUnitySum(_fsum_angles(k, c), c)
    ks = [(ar * n * n + br * n) % c for n in range(c)]
    re = math.fsum(math.cos(2 * math.pi * k / c) for k in ks)
    im = math.fsum(math.sin(2 * math.pi * k / c) for k in ks)
    return RootOfUnitySum(complex(re, im), c)


def gauss_reduce(a: int, b: int, c: int) -> tuple[int, tuple[int, int, int]] | None:
    """Reduce G(a, b; c) to a coprime leading coefficient.

    Returns None when the sum vanishes (gcd(a, c) does not divide b);
    otherwise (scale, (a', b', c')) with scale = gcd(a, c),
    G(a, b; c) = scale * G(a', b', c') and gcd(a', c') = 1.
    """
    if c < 1:
        raise PreconditionViolation(f"modulus c must be >= 1, got {c}")
    g = math.gcd(a, c)
    if b % g != 0:
        return None
    return g, (a // g, b // g, c // g)


def _validate_t_args(q: int, c: int, f: int) -> None:
    if c < 1 or q < 1:
        raise PreconditionViolation(f"need c, q >= 1, got c={c}, q={q}")
    if c % q != 0:
        raise PreconditionViolation(f"q must divide c, got q={q}, c={c}")
    if math.gcd(f, q) != 1:
        raise PreconditionViolation(f"f must be coprime to q, got f={f}, q={q}")


def t_sum(m: int, n: int, q: int, c: int, f: int) -> RootOfUnitySum:
    """Restricted sum of e((m*a + n*inverse(a))/c) over units a == f (mod q)."""
    _validate_t_args(q, c, f)
    units, inv = units_with_inverses(c)
    if q > 1:
        mask = units % q == f % q
        units, inv = units[mask], inv[mask]
    k = (m * units + n * inv) % c
    return RootOfUnitySum(_fsum_angles(k, c), len(units))


def _t_prime_power(m: int, n: int, p: int, alpha: int, gamma: int, f: int) -> RootOfUnitySum:
    """Restricted sum at modulus p**alpha, class f mod p**gamma.

    Pulls out the common p-power of (m, n), then either applies the closed
    form (valid when the reduced alpha is at most twice the reduced gamma)
    or falls back to direct enumeration over the prime power.
    """
    pa = p**alpha
    if alpha == 0:
        return RootOfUnitySum(1 + 0j, 1)
    if gamma == 0:
        # No class restriction at this prime: the p-power pull-out below is
        # only valid with one, so evaluate the plain sum directly.
        return _kloosterman_prime_power(m % pa, n % pa, pa)
    delta = alpha
    for v in (m, n):
        if v != 0:
            vp = 0
            while v % p == 0:
                v //= p
                vp += 1
            delta = min(delta, vp)
    scale = p ** min(alpha - gamma, delta)
    m1, n1 = m // p**delta, n // p**delta
    a1 = alpha - delta
    g1 = min(a1, gamma)
    count = p ** (alpha - gamma)
    if a1 == 0:
        return RootOfUnitySum(complex(scale), count)
    pa1 = p**a1
    if a1 <= 2 * g1:
        ff = f % pa1
        fb = pow(ff, -1, pa1)
        gate = p ** (a1 - g1)
        if (ff * ff * m1 - n1) % gate != 0:
            return RootOfUnitySum(0j, count)
        angle = (m1 * ff + n1 * fb) % pa1
        return RootOfUnitySum(scale * gate * cis_frac(angle, pa1), count)
    part = t_sum(m1 % pa1, n1 % pa1, p**g1, pa1, f % p**g1)
    return RootOfUnitySum(scale * part.value, count)


def t_sum_fast(m: int, n: int, q: int, c: int, f: int) -> RootOfUnitySum:
    """Restricted sum via coprime splitting plus per-prime-power closed forms.

    Equivalent to t_sum; the class label f is carried through the splitting
    unchanged, while m, n pick up inverse-cofactor twists.
    """
    _validate_t_args(q, c, f)
    value = 1 + 0j
    terms = 1
    remaining = c
    mc, nc = m, n
    qfact = factorize(q)
    for p, e in factorize(c).factors:
        r = p**e
        gamma = qfact.exponent_of(p)
        s = remaining // r
        if s == 1:
            part = _t_prime_power(mc % r, nc % r, p, e, gamma, f)
        else:
            _, u, v = egcd(r, s)
            part = _t_prime_power(mc * v % r, nc * v % r, p, e, gamma, f)
            mc, nc = mc * u % s, nc * u % s
            remaining = s
        value *= part.value
        terms *= part.term_count
        if s == 1:
            break
    return RootOfUnitySum(value, terms)


def weil_margin(m: int, n: int, c: int) -> float:
    """|S(m, n; c)| divided by tau(c) * gcd(m, n, c)^(1/2) * c^(1/2).

    At most 1 for every (m, n) != (0, 0).
    """
    if m == 0 and n == 0:
        raise PreconditionViolation("weil_margin requires (m, n) != (0, 0)")
    s = kloosterman_fast(m, n, c)
    g = math.gcd(math.gcd(abs(m), abs(n)), c)
    return abs(s.value) / (tau(c) * math.sqrt(g) * math.sqrt(c))


def t_margin(m: int, n: int, q: int, c: int, f: int) -> float:
    """|T_f| divided by its explicit bound 2^(3/2) * tau(c) * min(c/q, ...).

    At most 1 on the tested grids.
    """
    s = t_sum_fast(m, n, q, c, f)
    cq = c // q
    g = math.gcd(math.gcd(abs(m), abs(n)), cq)
    bound = 2**1.5 * tau(c) * min(cq, math.sqrt(g) * math.sqrt(c))
    return abs(s.value) / bound
