"""Exact integer arithmetic: inverses, CRT, factorization, and the
multiplicative functions (divisor count, Euler phi, Moebius) used by the
bound calculators.

Everything here is pure and deterministic.  Factorization uses trial
division by sieved primes up to 10**6 (which fully handles inputs up to
10**12) and falls back to Brent's variant of Pollard rho with a
deterministic Miller-Rabin test whose witness set is valid below 2**64.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

from .errors import NonCoprimeModuli, NotInvertible, TooManyDivisors

_TRIAL_LIMIT = 10**6
_DIVISOR_CAP = 10**6

# Deterministic Miller-Rabin witnesses for n < 2**64.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_small_primes: list[int] | None = None


def _sieve_primes(limit: int) -> list[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            start = p * p
            sieve[start :: p] = bytearray(len(range(start, limit + 1, p)))
    return [i for i, flag in enumerate(sieve) if flag]


def _trial_primes() -> list[int]:
    global _small_primes
    if _small_primes is None:
        _small_primes = _sieve_primes(_TRIAL_LIMIT)
    return _small_primes


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended gcd: returns (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def mod_inverse(a: int, n: int) -> int:
    """Inverse of a modulo n, in [0, n).  For n == 1 the result is 0."""
    if n < 1:
        raise ValueError(f"modulus must be positive, got {n}")
    if n == 1:
        return 0
    g, x, _ = egcd(a % n, n)
    if g != 1:
        raise NotInvertible(f"{a} is not invertible mod {n} (gcd = {g})")
    return x % n


def is_prime(n: int) -> bool:
    """Miller-Rabin with a fixed witness set; deterministic for n < 2**64."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int, rng: random.Random) -> int:
    """Brent-cycle Pollard rho; returns a nontrivial factor of composite odd n."""
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


@dataclass(frozen=True)
class Factorization:
    """A positive integer together with its ordered prime-power decomposition."""

    value: int
    factors: tuple[tuple[int, int], ...]

    def exponent_of(self, p: int) -> int:
        for prime, exp in self.factors:
            if prime == p:
                return exp
        return 0


@lru_cache(maxsize=1 << 16)
def factorize(n: int) -> Factorization:
    """Full prime factorization of n >= 1 with primes strictly increasing."""
    if n < 1:
        raise ValueError(f"factorize requires n >= 1, got {n}")
    if n == 1:
        return Factorization(1, ())
    value = n
    counts: dict[int, int] = {}
    for p in _trial_primes():
        if p * p > n:
            break
        while n % p == 0:
            counts[p] = counts.get(p, 0) + 1
            n //= p
    if n > 1:
        stack = [n]
        rng = random.Random(0xC0FFEE)
        while stack:
            m = stack.pop()
            if is_prime(m):
                counts[m] = counts.get(m, 0) + 1
                continue
            d = _pollard_rho(m, rng)
            stack.append(d)
            stack.append(m // d)
    return Factorization(value, tuple(sorted(counts.items())))


def euler_phi(n: int) -> int:
    """Euler's totient."""
    result = 1
    for p, e in factorize(n).factors:
        result *= (p - 1) * p ** (e - 1)
    return result


def tau(n: int) -> int:
    """Number of divisors."""
    result = 1
    for _, e in factorize(n).factors:
        result *= e + 1
    return result


def moebius(n: int) -> int:
    """Moebius function: 0 on non-squarefree n, else (-1)^(#prime factors)."""
    sign = 1
    for _, e in factorize(n).factors:
        if e > 1:
            return 0
        sign = -sign
    return sign


def divisors(n: int) -> list[int]:
    """All divisors of n in increasing order.  Errors if tau(n) > 10**6."""
    fact = factorize(n)
    if tau(n) > _DIVISOR_CAP:
        raise TooManyDivisors(f"{n} has more than {_DIVISOR_CAP} divisors")
    divs = [1]
    for p, e in fact.factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    divs.sort()
    return divs


def carmichael_lambda(n: int) -> int:
    """Exponent of the unit group mod n (Carmichael's function)."""
    lam = 1
    for p, e in factorize(n).factors:
        if p == 2 and e >= 3:
            comp = 2 ** (e - 2)
        else:
            comp = (p - 1) * p ** (e - 1)
        lam = lam * comp // math.gcd(lam, comp)
    return lam


def crt_combine(residues: list[tuple[int, int]] | tuple[tuple[int, int], ...]) -> int:
    """Combine (residue, modulus) pairs with pairwise coprime moduli into the
    unique residue modulo their product, in [0, product)."""
    r_acc, m_acc = 0, 1
    for r, m in residues:
        if m < 1:
            raise ValueError(f"modulus must be positive, got {m}")
        g = math.gcd(m_acc, m)
        if g != 1:
            raise NonCoprimeModuli(f"moduli {m_acc} and {m} share factor {g}")
        # r_acc + m_acc * t == r (mod m)
        t = (r - r_acc) * mod_inverse(m_acc, m) % m
        r_acc += m_acc * t
        m_acc *= m
    return r_acc % m_acc
