"""Cusp combinatorics for the Hecke congruence group of level Q.

A representative cusp is a fraction r/q with q dividing Q, gcd(r, Q) = 1,
and r ranging over classes mod gcd(q, Q/q).  Each cusp carries a width and
an integer scaling matrix; the irrational width factor sqrt(w) is never
materialized, since every downstream sum depends only on the integer
entries (r, x, q, y) and the width itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import PreconditionViolation
from .modular import divisors, euler_phi, mod_inverse

__all__ = [
    "CuspData",
    "ScalingMatrix",
    "cusp_representatives",
    "width",
    "scaling_matrix",
    "stabilizer_generator",
    "allowed_modulus_infty_rq",
]


@dataclass(frozen=True)
class CuspData:
    """A representative cusp r/q of level Q, with width and cusp parameter."""

    level: int
    q: int
    r: int
    width: int
    eta: int = 0  # only cusps with vanishing cusp parameter are modeled


@dataclass(frozen=True)
class ScalingMatrix:
    """Integer quadruple (r, x, q, y) of the cusp scaling matrix.

    The actual scaling matrix is [[r, x], [q, y]] * diag(sqrt(w), 1/sqrt(w));
    the integer part has determinant r*y - q*x = 1, with Q/q dividing x and
    r*y == 1 (mod Q).
    """

    r: int
    x: int
    q: int
    y: int
    width: int


def _check_cusp_args(level: int, q: int) -> None:
    if level < 1 or q < 1:
        raise PreconditionViolation(f"need level, q >= 1, got {level}, {q}")
    if level % q != 0:
        raise PreconditionViolation(f"q must divide the level, got q={q}, Q={level}")


def width(level: int, q: int) -> int:
    """Width of the cusps with denominator q: Q / gcd(Q, q^2)."""
    _check_cusp_args(level, q)
    return level // math.gcd(level, q * q)


def cusp_representatives(level: int) -> list[CuspData]:
    """One representative cusp per class: q | Q and r mod gcd(q, Q/q).

    Each representative's numerator is adjusted inside its class so that
    gcd(r, Q) = 1.  The total count is the sum of phi(gcd(q, Q/q)) over
    divisors q.
    """
    if level < 1:
        raise PreconditionViolation(f"level must be >= 1, got {level}")
    cusps: list[CuspData] = []
    for q in divisors(level):
        g = math.gcd(q, level // q)
        w = width(level, q)
        for r0 in range(1, g + 1):
            if math.gcd(r0, g) != 1:
                continue
            r = r0
            while math.gcd(r, level) != 1:
                r += g
            cusps.append(CuspData(level, q, r, w))
    return cusps


def scaling_matrix(level: int, q: int, r: int) -> ScalingMatrix:
    """Scaling-matrix integers for the cusp r/q of the given level.

    y is the least positive inverse of r mod Q, and x = (r*y - 1)/q, which
    is automatically divisible by Q/q.
    """
    _check_cusp_args(level, q)
    if math.gcd(r, level) != 1:
        raise PreconditionViolation(f"r must be coprime to the level, got r={r}, Q={level}")
    y = mod_inverse(r, level)
    if y == 0:  # level == 1: any y works, pick the one giving x = 0
        y = 1
    x = (r * y - 1) // q
    assert r * y - q * x == 1
    return ScalingMatrix(r, x, q, y, width(level, q))


def stabilizer_generator(level: int, q: int, r: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Generator of the stabilizer of the cusp r/q, as an integer matrix.

    Returns ((1 - r*q*w, r^2*w), (-q^2*w, 1 + r*q*w)) with w the cusp width;
    it has determinant 1, lower-left entry divisible by Q, and fixes r/q.
    """
    _check_cusp_args(level, q)
    if math.gcd(r, level) != 1:
        raise PreconditionViolation(f"r must be coprime to the level, got r={r}, Q={level}")
    w = width(level, q)
    return ((1 - r * q * w, r * r * w), (-q * q * w, 1 + r * q * w))


def allowed_modulus_infty_rq(level: int, q: int, c: int) -> bool:
    """Whether the c-index is admissible for the (infinity, r/q) cusp pair.

    The occurring moduli are c*q*sqrt(w) with gcd(c, Q/q) = 1.
    """
    _check_cusp_args(level, q)
    if c < 1:
        return False
    return math.gcd(c, level // q) == 1


def cusp_count(level: int) -> int:
    """Number of cusp classes: sum of phi(gcd(q, Q/q)) over q | Q."""
    return sum(euler_phi(math.gcd(q, level // q)) for q in divisors(level))
