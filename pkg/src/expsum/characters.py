"""Dirichlet characters mod N with exact rational-angle values.

A character is stored by its exponents against fixed generators of the
CRT components of (Z/NZ)^x: the smallest primitive root for each odd
prime power, and the pair (-1, 5) for 2**k with k >= 3.  Values are exact
angles num/den (meaning exp(2*pi*i*num/den)), so orthogonality and
multiplicativity can be checked without floating error.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .modular import factorize

__all__ = [
    "RationalAngle",
    "DirichletCharacter",
    "characters_mod",
    "char_eval",
    "char_parity",
]


@dataclass(frozen=True)
class RationalAngle:
    """An exact angle num/den in [0, 1), standing for exp(2*pi*i*num/den)."""

    numerator: int
    denominator: int

    @staticmethod
    def of(num: int, den: int) -> "RationalAngle":
        if den <= 0:
            raise ValueError(f"denominator must be positive, got {den}")
        num %= den
        g = math.gcd(num, den)
        return RationalAngle(num // g, den // g)

    def __add__(self, other: "RationalAngle") -> "RationalAngle":
        den = self.denominator * other.denominator
        num = self.numerator * other.denominator + other.numerator * self.denominator
        return RationalAngle.of(num, den)

    def __neg__(self) -> "RationalAngle":
        return RationalAngle.of(-self.numerator, self.denominator)

    def to_complex(self) -> complex:
        if self.numerator == 0:
            return 1 + 0j
        if 2 * self.numerator == self.denominator:
            return -1 + 0j
        return cmath.exp(2j * math.pi * self.numerator / self.denominator)


def _primitive_root_mod_prime(p: int) -> int:
    """Smallest primitive root mod p (p an odd prime)."""
    order = p - 1
    prime_parts = [q for q, _ in factorize(order).factors]
    g = 2
    while True:
        if all(pow(g, order // q, p) != 1 for q in prime_parts):
            return g
        g += 1


def _component_generators(p: int, k: int) -> tuple[tuple[int, int], ...]:
    """Generators (g, order) of the unit group mod p**k."""
    pk = p**k
    if p == 2:
        if k == 1:
            return ()
        if k == 2:
            return ((3, 2),)
        return ((pk - 1, 2), (5, 2 ** (k - 2)))
    g = _primitive_root_mod_prime(p)
    if pow(g, p - 1, p * p) == 1:
        g += p
    return ((g % pk, (p - 1) * p ** (k - 1)),)


class _UnitGroup:
    """Unit-group structure mod N: cyclic components and discrete-log tables."""

    def __init__(self, modulus: int):
        self.modulus = modulus
        self.components: list[tuple[int, tuple[tuple[int, int], ...]]] = []
        for p, k in factorize(modulus).factors:
            self.components.append((p**k, _component_generators(p, k)))
        self.orders: tuple[int, ...] = tuple(
            order for _, gens in self.components for _, order in gens
        )
        self.angle_lcm = 1
        for d in self.orders:
            self.angle_lcm = self.angle_lcm * d // math.gcd(self.angle_lcm, d)
        self._dlog: list[dict[int, tuple[int, ...]]] = [
            self._dlog_table(pk, gens) for pk, gens in self.components
        ]

    @staticmethod
    def _dlog_table(pk: int, gens: tuple[tuple[int, int], ...]) -> dict[int, tuple[int, ...]]:
        table: dict[int, tuple[int, ...]] = {}
        ranges = [range(order) for _, order in gens]
        for exps in product(*ranges):
            val = 1
            for (g, _), e in zip(gens, exps):
                val = val * pow(g, e, pk) % pk
            table[val] = exps
        return table

    def dlog(self, n: int) -> tuple[int, ...] | None:
        """Exponent vector of n across all components, or None if not a unit."""
        out: list[int] = []
        for (pk, _), table in zip(self.components, self._dlog):
            exps = table.get(n % pk)
            if exps is None:
                return None
            out.extend(exps)
        return tuple(out)


@lru_cache(maxsize=256)
def _unit_group(modulus: int) -> _UnitGroup:
    return _UnitGroup(modulus)


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character mod `modulus`, fixed by its component exponents.

    The exponent tuple is aligned with the generator orders of the unit
    group; the character sends the i-th generator to the exact angle
    exponents[i] / orders[i].
    """

    modulus: int
    exponents: tuple[int, ...]

    @property
    def _group(self) -> _UnitGroup:
        return _unit_group(self.modulus)

    def angle(self, n: int) -> RationalAngle | None:
        """Exact value angle at n, or None when gcd(n, modulus) > 1."""
        dlog = self._group.dlog(n % self.modulus)
        if dlog is None:
            return None
        lcm = self._group.angle_lcm
        acc = 0
        for e, x, d in zip(self.exponents, dlog, self._group.orders):
            acc = (acc + e * x * (lcm // d)) % lcm
        return RationalAngle.of(acc, lcm)

    def __call__(self, n: int) -> complex:
        ang = self.angle(n)
        return 0j if ang is None else ang.to_complex()

    def conj(self) -> "DirichletCharacter":
        exps = tuple(
            (-e) % d for e, d in zip(self.exponents, self._group.orders)
        )
        return DirichletCharacter(self.modulus, exps)

    @property
    def is_principal(self) -> bool:
        return all(e == 0 for e in self.exponents)

    @property
    def parity(self) -> int:
        """0 for even characters (value 1 at -1), 1 for odd ones."""
        ang = self.angle(self.modulus - 1) if self.modulus > 1 else RationalAngle(0, 1)
        assert ang is not None  # -1 is always a unit
        if ang.numerator == 0:
            return 0
        assert 2 * ang.numerator == ang.denominator  # order divides 2
        return 1


def characters_mod(modulus: int) -> list[DirichletCharacter]:
    """All phi(N) Dirichlet characters mod N, in lexicographic exponent order.

    The principal character comes first.
    """
    if modulus < 1:
        raise ValueError(f"modulus must be positive, got {modulus}")
    group = _unit_group(modulus)
    return [
        DirichletCharacter(modulus, exps)
        for exps in product(*(range(d) for d in group.orders))
    ]


def char_eval(chi: DirichletCharacter, n: int) -> RationalAngle | None:
    """Exact angle of chi(n); None encodes the value zero (n not coprime)."""
    return chi.angle(n)


def char_parity(chi: DirichletCharacter) -> int:
    """Weight parity: 0 if chi(-1) = 1, else 1."""
    return chi.parity
