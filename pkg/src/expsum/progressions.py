"""Sums of classical Kloosterman sums over arithmetic progressions and
against periodic weights: sharp and smoothed dyadic sums, the character /
cusp decomposition of the smoothed sum, truncated Kloosterman zeta values,
explicit bound calculators, and log-log exponent fitting.

Progressions are parametrized as c == a*q (mod Q) with q | Q and
gcd(a, Q/q) = 1; every residue class mod Q arises exactly once this way.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import _kernels
from .characters import characters_mod
from .cusps import cusp_representatives
from .cusp_sums import CuspPairSumSpec, s_infty_rq
from .errors import DegenerateFit, InvalidBump, PreconditionViolation
from .modular import euler_phi
from .sums import kloosterman_fast

__all__ = [
    "ProgressionSpec",
    "PeriodicFunction",
    "BumpSpec",
    "Bump",
    "SumSeries",
    "ap_sum",
    "correlation_sum",
    "build_bump",
    "smooth_dyadic_sum",
    "decomposition_check",
    "DecompositionResult",
    "zeta_partial",
    "fit_exponent",
    "FitResult",
    "thm52_rhs",
    "trivial_bound",
    "ap_series",
    "correlation_series",
    "write_series_csv",
    "THM52_OMITTED_FACTOR",
]

#: Every bound from the uniform progression theorem omits this factor.
THM52_OMITTED_FACTOR = "|m*n*Q*C|^o(1)"

# Numerically verified total-variation constants for the quintic bump:
# integral of |phi'| is exactly 2; integral of |phi''| stays below
# BUMP_C2 * C / (X*B) for every admissible (C, B).
BUMP_C1 = 2.5
BUMP_C2 = 20.0


@dataclass(frozen=True)
class ProgressionSpec:
    """The progression c == a*q (mod Q), with q | Q and gcd(a, Q/q) = 1."""

    a: int
    q: int
    Q: int

    def __post_init__(self) -> None:
        if self.a < 1 or self.q < 1 or self.Q < 1:
            raise PreconditionViolation("a, q, Q must all be positive")
        if self.Q % self.q != 0:
            raise PreconditionViolation(f"q must divide Q, got q={self.q}, Q={self.Q}")
        if math.gcd(self.a, self.Q // self.q) != 1:
            raise PreconditionViolation(
                f"a must be coprime to Q/q, got a={self.a}, Q/q={self.Q // self.q}"
            )

    def members(self, lo: float, hi: float) -> np.ndarray:
        """All progression members in [lo, hi], ascending."""
        start = (self.a * self.q) % self.Q
        if start == 0:
            start = self.Q
        first = start + self.Q * max(0, math.ceil((lo - start) / self.Q))
        if first > hi:
            return np.zeros(0, dtype=np.int64)
        return np.arange(first, math.floor(hi) + 1, self.Q, dtype=np.int64)


@dataclass(frozen=True)
class PeriodicFunction:
    """A function of period P given by its values on residues 0..P-1."""

    period: int
    values: tuple[complex, ...]

    def __post_init__(self) -> None:
        if self.period < 1 or len(self.values) != self.period:
            raise PreconditionViolation("need exactly `period` values")

    def __call__(self, c: int) -> complex:
        return self.values[c % self.period]

    def sample(self, cs: np.ndarray) -> np.ndarray:
        return np.asarray(self.values, dtype=np.complex128)[cs % self.period]

    @staticmethod
    def constant(value: complex = 1.0) -> "PeriodicFunction":
        return PeriodicFunction(1, (complex(value),))

    @staticmethod
    def exp_mod(period: int) -> "PeriodicFunction":
        """F(c) = exp(2*pi*i*c/period)."""
        vals = tuple(cmath.exp(2j * math.pi * k / period) for k in range(period))
        return PeriodicFunction(period, vals)

    @staticmethod
    def indicator(a: int, period: int) -> "PeriodicFunction":
        """F(c) = 1 when c == a (mod period), else 0."""
        vals = tuple(1.0 + 0j if k == a % period else 0j for k in range(period))
        return PeriodicFunction(period, vals)


def _fsum_complex_terms(values: np.ndarray) -> complex:
    if values.size == 0:
        return 0j
    return complex(math.fsum(values.real), math.fsum(values.imag))


def ap_sum(m: int, n: int, prog: ProgressionSpec, C: float) -> complex:
    """Sum of S(m, n; c)/c over progression members c <= C."""
    if m == 0 or n == 0:
        raise PreconditionViolation("m and n must be nonzero")
    cs = prog.members(1, C)
    if cs.size == 0:
        return 0j
    s_vals = _kernels.kloosterman_values(m, n, cs)
    return complex(math.fsum(s_vals / cs), 0.0)


def correlation_sum(m: int, n: int, F: PeriodicFunction, C: float) -> complex:
    """Sum of S(m, n; c)/sqrt(c) * F(c) over 1 <= c <= C."""
    if m == 0 or n == 0:
        raise PreconditionViolation("m and n must be nonzero")
    if C < 1:
        return 0j
    cs = np.arange(1, math.floor(C) + 1, dtype=np.int64)
    s_vals = _kernels.kloosterman_values(m, n, cs)
    terms = s_vals / np.sqrt(cs) * F.sample(cs)
    return _fsum_complex_terms(terms)


@dataclass(frozen=True)
class BumpSpec:
    """Geometry of the smoothing bump for a dyadic window at cutoff C.

    The bump (of the rescaled variable x = 4*pi*sqrt|mn|/c) is 1 on
    [2*pi*sqrt|mn|/C, 4*pi*sqrt|mn|/C] and supported in the slightly wider
    interval obtained by moving the edges by B.
    """

    C: float
    B: float
    mn_abs: int

    def __post_init__(self) -> None:
        if self.mn_abs < 1:
            raise InvalidBump(f"|m*n| must be >= 1, got {self.mn_abs}")
        if not 1 <= self.B <= self.C / 2:
            raise InvalidBump(f"need 1 <= B <= C/2, got B={self.B}, C={self.C}")

    @property
    def X(self) -> float:
        return 4 * math.pi * math.sqrt(self.mn_abs) / self.C


def _smoothstep(t: np.ndarray) -> np.ndarray:
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def _smoothstep_d1(t: np.ndarray) -> np.ndarray:
    return 30.0 * t * t * (1.0 - t) ** 2


def _smoothstep_d2(t: np.ndarray) -> np.ndarray:
    return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)


@dataclass(frozen=True)
class Bump:
    """A twice continuously differentiable bump with quintic ramps."""

    lo_support: float
    lo_plateau: float
    hi_plateau: float
    hi_support: float

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros_like(x)
        out[(self.lo_plateau <= x) & (x <= self.hi_plateau)] = 1.0
        rise = (self.lo_support < x) & (x < self.lo_plateau)
        t = (x[rise] - self.lo_support) / (self.lo_plateau - self.lo_support)
        out[rise] = _smoothstep(t)
        fall = (self.hi_plateau < x) & (x < self.hi_support)
        t = (self.hi_support - x[fall]) / (self.hi_support - self.hi_plateau)
        out[fall] = _smoothstep(t)
        return out if out.shape else float(out)

    def deriv_abs(self, x: np.ndarray, order: int) -> np.ndarray:
        """|phi'| or |phi''| on x (used for the verification quadratures)."""
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros_like(x)
        d = _smoothstep_d1 if order == 1 else _smoothstep_d2
        h_lo = self.lo_plateau - self.lo_support
        rise = (self.lo_support < x) & (x < self.lo_plateau)
        out[rise] = np.abs(d((x[rise] - self.lo_support) / h_lo)) / h_lo**order
        h_hi = self.hi_support - self.hi_plateau
        fall = (self.hi_plateau < x) & (x < self.hi_support)
        out[fall] = np.abs(d((self.hi_support - x[fall]) / h_hi)) / h_hi**order
        return out


def build_bump(spec: BumpSpec) -> Bump:
    """Construct the quintic-ramp bump for `spec` and verify its contract.

    Checks, by dense sampling and trapezoid quadrature: plateau value 1,
    vanishing outside the support, range [0, 1], total variation of phi at
    most BUMP_C1, and integral of |phi''| at most BUMP_C2 * C/(X*B).
    """
    root = math.sqrt(spec.mn_abs)
    bump = Bump(
        lo_support=2 * math.pi * root / (spec.C + spec.B),
        lo_plateau=2 * math.pi * root / spec.C,
        hi_plateau=4 * math.pi * root / spec.C,
        hi_support=4 * math.pi * root / (spec.C - spec.B),
    )
    xs = np.linspace(bump.lo_support * 0.5, bump.hi_support * 1.5, 20001)
    vals = bump(xs)
    ok = np.all((0.0 <= vals) & (vals <= 1.0))
    ok &= np.all(vals[(bump.lo_plateau <= xs) & (xs <= bump.hi_plateau)] == 1.0)
    ok &= np.all(vals[(xs <= bump.lo_support) | (xs >= bump.hi_support)] == 0.0)
    tv = np.trapezoid(bump.deriv_abs(xs, 1), xs)
    curv = np.trapezoid(bump.deriv_abs(xs, 2), xs)
    ok &= tv <= BUMP_C1
    ok &= curv <= BUMP_C2 * spec.C / (spec.X * spec.B)
    if not ok:
        raise InvalidBump(f"bump verification failed for {spec}")
    return bump


def _smooth_dyadic_terms(
    m: int, n: int, prog: ProgressionSpec, C: float, B: float
) -> tuple[complex, int]:
    bump = build_bump(BumpSpec(C, B, abs(m * n)))
    cs = prog.members(C - B, 2 * (C + B))
    if cs.size == 0:
        return 0j, 0
    x = 4 * math.pi * math.sqrt(abs(m * n)) / cs
    weights = bump(x) / cs
    total = 0j
    terms = 0
    parts = []
    for c, wgt in zip(cs, weights):
        if wgt == 0.0:
            continue
        s = kloosterman_fast(m, n, int(c))
        parts.append(wgt * s.value)
        terms += s.term_count
    re = math.fsum(p.real for p in parts)
    im = math.fsum(p.imag for p in parts)
    return complex(re, im), terms


def smooth_dyadic_sum(m: int, n: int, prog: ProgressionSpec, C: float, B: float) -> complex:
    """Sum of S(m, n; c)/c * phi(4*pi*sqrt|mn|/c) over the progression.

    phi is the verified bump for (C, B); its support confines c to the
    window (C - B, 2*(C + B)), so the sum is finite.
    """
    if m == 0 or n == 0:
        raise PreconditionViolation("m and n must be nonzero")
    return _smooth_dyadic_terms(m, n, prog, C, B)[0]


class DecompositionResult(NamedTuple):
    lhs: complex
    rhs: complex
    delta: float
    term_count: int


def decomposition_check(
    m: int, n: int, prog: ProgressionSpec, C: float, B: float
) -> DecompositionResult:
    """Geometric-side decomposition of the smoothed progression sum.

    The left side sums classical Kloosterman sums over the progression; the
    right side averages the character-twisted (infinity, r/q) cusp sums over
    characters mod Q/q and cusp numerators r, with the width factors
    cancelled exactly so only integer arguments appear:

        lhs = sum_c S(m,n;c)/c * phi(4*pi*sqrt|mn|/c)
        rhs = 1/phi(Q/q) * sum_kappa i^kappa * sum_chi chi(a)
              * sum_r sum_c' s_infty_rq(...)/(c'*q) * phi(4*pi*sqrt|mn|/(c'*q))

    Both sides are returned with their absolute difference; the i^kappa
    prefactor undoes the (-i)^kappa carried by each cusp-sum value.
    """
    if m <= 0:
        raise PreconditionViolation("m must be positive (flip signs of both m, n)")
    if n == 0:
        raise PreconditionViolation("n must be nonzero")
    lhs, lhs_terms = _smooth_dyadic_terms(m, n, prog, C, B)
    bump = build_bump(BumpSpec(C, B, abs(m * n)))
    q, Q = prog.q, prog.Q
    big_m = Q // q
    root = math.sqrt(abs(m * n))
    c_lo = max(1, math.ceil((C - B) / q))
    c_hi = math.floor(2 * (C + B) / q)
    reps = [cusp.r for cusp in cusp_representatives(Q) if cusp.q == q]
    chars = characters_mod(big_m)
    total = 0j
    rhs_terms = 0
    parts = []
    for chi in chars:
        kappa = chi.parity
        chi_a = chi(prog.a)
        pref = chi_a * (1j**kappa)
        for r in reps:
            for c_idx in range(c_lo, c_hi + 1):
                if math.gcd(c_idx, big_m) != 1:
                    continue
                wgt = float(bump(4 * math.pi * root / (c_idx * q)))
                if wgt == 0.0:
                    continue
                part = s_infty_rq(CuspPairSumSpec(Q, q, r, chi, kappa, m, n, c_idx))
                parts.append(pref * part.value * wgt / (c_idx * q))
                rhs_terms += part.term_count
    total = complex(
        math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts)
    )
    rhs = total / euler_phi(big_m)
    return DecompositionResult(lhs, rhs, abs(lhs - rhs), lhs_terms + rhs_terms)


def zeta_partial(m: int, n: int, s: complex, Cmax: float) -> complex:
    """Truncated Kloosterman zeta: sum of S(m, n; c)/c^(2s) for c <= Cmax."""
    if Cmax < 1:
        return 0j
    cs = np.arange(1, math.floor(Cmax) + 1, dtype=np.int64)
    s_vals = _kernels.kloosterman_values(m, n, cs)
    weights = np.exp(-2.0 * complex(s) * np.log(cs.astype(np.float64)))
    return _fsum_complex_terms(s_vals * weights)


@dataclass(frozen=True)
class SumSeries:
    """Partial-sum values of a sweep at an increasing sequence of cutoffs."""

    cutoffs: tuple[float, ...]
    values: tuple[complex, ...]
    m: int
    n: int
    label: str
    normalization: str  # "1/c" or "1/sqrt(c)"

    def __post_init__(self) -> None:
        if len(self.cutoffs) != len(self.values):
            raise PreconditionViolation("cutoffs and values must align")
        if any(b <= a for a, b in zip(self.cutoffs, self.cutoffs[1:])):
            raise PreconditionViolation("cutoffs must be strictly increasing")


class FitResult(NamedTuple):
    slope: float
    intercept: float
    residual: float
    dropped: int


def fit_exponent(series: SumSeries) -> FitResult:
    """Least-squares fit of log|value| against log(cutoff).

    Zero values are dropped (their count is reported); fewer than three
    usable points raise DegenerateFit.
    """
    xs, ys = [], []
    dropped = 0
    for c, v in zip(series.cutoffs, series.values):
        if abs(v) > 0:
            xs.append(math.log(c))
            ys.append(math.log(abs(v)))
        else:
            dropped += 1
    if len(xs) < 3:
        raise DegenerateFit(f"only {len(xs)} usable points after dropping {dropped}")
    slope, intercept = np.polyfit(xs, ys, 1)
    fitted = np.polyval([slope, intercept], xs)
    residual = float(np.sqrt(np.mean((np.asarray(ys) - fitted) ** 2)))
    return FitResult(float(slope), float(intercept), residual, dropped)


def _series_from_values(
    cs: np.ndarray,
    terms: np.ndarray,
    cutoffs: Sequence[float],
    m: int,
    n: int,
    label: str,
    normalization: str,
) -> SumSeries:
    values = []
    for cut in cutoffs:
        sel = terms[cs <= cut]
        values.append(_fsum_complex_terms(sel))
    return SumSeries(tuple(float(c) for c in cutoffs), tuple(values), m, n, label, normalization)


def ap_series(
    m: int, n: int, prog: ProgressionSpec, cutoffs: Sequence[float]
) -> SumSeries:
    """SumSeries of ap_sum at each cutoff (single sweep to the largest)."""
    cs = prog.members(1, max(cutoffs))
    s_vals = _kernels.kloosterman_values(m, n, cs) if cs.size else np.zeros(0)
    terms = (s_vals / cs).astype(np.complex128) if cs.size else np.zeros(0, dtype=np.complex128)
    label = f"ap:a={prog.a},q={prog.q},Q={prog.Q}"
    return _series_from_values(cs, terms, cutoffs, m, n, label, "1/c")


def correlation_series(
    m: int, n: int, F: PeriodicFunction, cutoffs: Sequence[float], label: str = "periodic"
) -> SumSeries:
    """SumSeries of correlation_sum at each cutoff (single sweep)."""
    cs = np.arange(1, math.floor(max(cutoffs)) + 1, dtype=np.int64)
    s_vals = _kernels.kloosterman_values(m, n, cs)
    terms = s_vals / np.sqrt(cs) * F.sample(cs)
    return _series_from_values(cs, terms, cutoffs, m, n, label, "1/sqrt(c)")


def thm52_rhs(
    m: int, n: int, prog: ProgressionSpec, C: float, theta: float = 7 / 64
) -> float:
    """Explicit part of the uniform progression bound at cutoff C.

    The omitted |m*n*Q*C|^o(1) factor is recorded in THM52_OMITTED_FACTOR.
    theta is the eigenvalue-gap exponent (default 7/64).
    """
    if m == 0 or n == 0:
        raise PreconditionViolation("m and n must be nonzero")
    if not 0 <= theta <= 0.25:
        raise PreconditionViolation(f"theta must lie in [0, 1/4], got {theta}")
    am, an = abs(m), abs(n)
    q, Q = prog.q, prog.Q
    g_mn = math.gcd(am, an)
    g_mnq = math.gcd(g_mn, q)
    g_qm = math.gcd(q, am)
    g_qn = math.gcd(q, an)
    g_qQq = math.gcd(q, Q // q)
    g_q2Q = math.gcd(q * q, Q)
    pref = math.sqrt(Q) * math.sqrt(g_qQq) / math.sqrt(q)
    t1 = math.sqrt(g_mnq) / math.sqrt(q)
    t2 = g_mn / math.sqrt(Q)
    t3 = g_mnq ** (1 / 6) * g_qQq ** (1 / 3) / q ** (1 / 3) * C ** (1 / 6)
    t4 = pref * (
        1
        + math.sqrt(am * an) / Q
        + (am ** (1 / 3) * g_qm**0.25 + an ** (1 / 3) * g_qn**0.25)
        / (g_q2Q ** (1 / 12) * math.sqrt(Q))
        + (am * an) ** (1 / 3) * g_qm**0.25 * g_qn**0.25 / (g_q2Q ** (1 / 6) * Q)
    )
    t5 = (
        pref
        * (
            1
            + (am**0.25 * g_qm**0.25 + an**0.25 * g_qn**0.25) / math.sqrt(Q)
            + (am * an) ** 0.25 * g_qm**0.25 * g_qn**0.25 / Q
        )
        * (
            1
            + (am * g_qm + an * g_qn) / math.sqrt(am * an) * C / Q**2
            + g_qm * g_qn * C**2 / Q**4
        )
        ** theta
    )
    return t1 + t2 + t3 + t4 + t5


def trivial_bound(m: int, n: int, prog: ProgressionSpec, C: float) -> float:
    """Explicit part of the elementary progression bound:
    gcd(m, n, q)^(1/2) * (q^(-1/2) + C^(1/2)/Q)."""
    g = math.gcd(math.gcd(abs(m), abs(n)), prog.q)
    return math.sqrt(g) * (1 / math.sqrt(prog.q) + math.sqrt(max(C, 0)) / prog.Q)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_series_csv(
    series: SumSeries, fh, prog: ProgressionSpec | None = None, theta: float = 7 / 64
) -> None:
    """Write a sweep series as CSV with the fixed column set
    C, re, im, abs, bound_trivial, bound_thm52, slope_running.

    Bound columns are NaN when no progression applies (periodic sweeps).
    Floats carry 17 significant digits so they round-trip exactly.
    """
    fh.write("C,re,im,abs,bound_trivial,bound_thm52,slope_running\n")
    for i, (cut, val) in enumerate(zip(series.cutoffs, series.values)):
        if prog is not None:
            b_triv = trivial_bound(series.m, series.n, prog, cut)
            b_52 = thm52_rhs(series.m, series.n, prog, cut, theta)
        else:
            b_triv = b_52 = float("nan")
        prefix = SumSeries(
            series.cutoffs[: i + 1],
            series.values[: i + 1],
            series.m,
            series.n,
            series.label,
            series.normalization,
        )
        try:
            slope = fit_exponent(prefix).slope
        except DegenerateFit:
            slope = float("nan")
        cols = [cut, val.real, val.imag, abs(val), b_triv, b_52, slope]
        fh.write(",".join(_fmt(x) for x in cols) + "\n")
