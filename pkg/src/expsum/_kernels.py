"""Jitted kernels for bulk evaluation of classical Kloosterman sums.

The batch entry point computes S(m, n; c) for an array of moduli, one
independent slot per modulus, so results are bit-identical for any thread
count.  Each modulus is split into prime powers via a smallest-prime-factor
sieve; within a prime power, unit inverses come from a single batched
inversion (three multiplications per unit and one extended gcd total), and
terms are paired a <-> -a so only cosines of reduced angles are summed,
with Kahan compensation.

Kernel domain: moduli up to 2**31 (int64 products stay in range).
"""

from __future__ import annotations

import numpy as np
from numba import config as _numba_config
from numba import get_num_threads, njit, prange, set_num_threads

_KERNEL_C_LIMIT = 2**31


@njit(cache=True)
def _build_spf(limit):
    spf = np.zeros(limit + 1, dtype=np.int64)
    for i in range(2, limit + 1):
        if spf[i] == 0:
            for j in range(i, limit + 1, i):
                if spf[j] == 0:
                    spf[j] = i
    return spf


@njit(cache=True)
def _inv_mod(a, m):
    """Inverse of a mod m for gcd(a, m) = 1, m >= 1."""
    if m == 1:
        return 0
    r0, r1 = a % m, m
    x0, x1 = 1, 0
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        x0, x1 = x1, x0 - q * x1
    return x0 % m


@njit(cache=True)
def _kloos_prime_power(m, n, p, pa):
    """S(m, n; p**alpha), real by the a <-> -a pairing."""
    if pa == 1:
        return 1.0
    if pa == 2:
        return 1.0 if (m + n) % 2 == 0 else -1.0
    half = pa // 2
    count = 0
    for a in range(1, half + 1):
        if a % p != 0:
            count += 1
    units = np.empty(count, dtype=np.int64)
    prefix = np.empty(count, dtype=np.int64)
    idx = 0
    run = 1
    for a in range(1, half + 1):
        if a % p != 0:
            units[idx] = a
            run = run * a % pa
            prefix[idx] = run
            idx += 1
    running = _inv_mod(run, pa)
    inv = np.empty(count, dtype=np.int64)
    for i in range(count - 1, -1, -1):
        below = prefix[i - 1] if i > 0 else 1
        inv[i] = running * below % pa
        running = running * units[i] % pa
    two_pi_over = 2.0 * np.pi / pa
    total = 0.0
    comp = 0.0
    same = m % pa == n % pa
    for i in range(count):
        a = units[i]
        d = inv[i]
        mult = 2.0
        if same:
            # a, -a, d, -d form one orbit with equal cosine; sum it once.
            dh = d if d <= half else pa - d
            if a > dh:
                continue
            if a < dh:
                mult = 4.0
        k = (m * a + n * d) % pa
        if k > pa - k:
            k = pa - k
        y = mult * np.cos(two_pi_over * k) - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


@njit(cache=True)
def _kloos_single(m, n, c, spf):
    """S(m, n; c) via coprime splitting with inverse-cofactor twists."""
    if c == 1:
        return 1.0
    val = 1.0
    mc = m % c
    nc = n % c
    remaining = c
    while remaining > 1:
        p = spf[remaining]
        pa = p
        rest = remaining // p
        while rest % p == 0:
            pa *= p
            rest //= p
        if rest == 1:
            val *= _kloos_prime_power(mc % pa, nc % pa, p, pa)
            break
        # Bezout: u*pa + v*rest = 1
        r0, r1 = pa, rest
        u0, u1 = 1, 0
        while r1:
            q = r0 // r1
            r0, r1 = r1, r0 - q * r1
            u0, u1 = u1, u0 - q * u1
        v = (1 - u0 * pa) // rest
        vm = v % pa
        val *= _kloos_prime_power(mc * vm % pa, nc * vm % pa, p, pa)
        um = u0 % rest
        mc = mc * um % rest
        nc = nc * um % rest
        remaining = rest
    return val


@njit(cache=True, parallel=True)
def _kloos_batch(m, n, cs, spf, out):
    for i in prange(cs.size):
        out[i] = _kloos_single(m, n, cs[i], spf)


@njit(cache=True)
def _batch_inverse(units, modulus):
    """Inverses of an array of units mod `modulus` via one prefix-product
    scan and a single extended gcd."""
    count = units.size
    inv = np.empty(count, dtype=np.int64)
    if count == 0:
        return inv
    prefix = np.empty(count, dtype=np.int64)
    run = 1
    for i in range(count):
        run = run * units[i] % modulus
        prefix[i] = run
    running = _inv_mod(run, modulus)
    for i in range(count - 1, -1, -1):
        below = prefix[i - 1] if i > 0 else 1
        inv[i] = running * below % modulus
        running = running * units[i] % modulus
    return inv


_spf_cache: dict[int, np.ndarray] = {}


def spf_sieve(limit: int) -> np.ndarray:
    """Smallest-prime-factor table up to limit, cached by sufficiency."""
    for cached_limit, table in _spf_cache.items():
        if cached_limit >= limit:
            return table
    table = _build_spf(limit)
    _spf_cache.clear()
    _spf_cache[limit] = table
    return table


def kloosterman_values(m: int, n: int, cs: np.ndarray) -> np.ndarray:
    """S(m, n; c) for every c in cs (int array), as float64 (the sums are real).

    Slots are computed independently, so the output does not depend on the
    number of threads in use.
    """
    cs = np.ascontiguousarray(cs, dtype=np.int64)
    if cs.size == 0:
        return np.zeros(0, dtype=np.float64)
    cmax = int(cs.max())
    if cs.min() < 1:
        raise ValueError("moduli must be positive")
    if cmax >= _KERNEL_C_LIMIT:
        raise ValueError(f"kernel supports moduli below 2**31, got {cmax}")
    spf = spf_sieve(cmax)
    out = np.empty(cs.size, dtype=np.float64)
    _kloos_batch(np.int64(m), np.int64(n), cs, spf, out)
    return out


def set_threads(requested: int) -> int:
    """Set the kernel thread count, clamped to what the runtime allows."""
    clamped = max(1, min(requested, _numba_config.NUMBA_NUM_THREADS))
    set_num_threads(clamped)
    return get_num_threads()
