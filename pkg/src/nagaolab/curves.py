"""Hyperelliptic curve models y^2 = f(x): bad primes, Frobenius traces, L-polynomials.

Sign convention: ``a`` is always the trace of Frobenius, so #C(F_p) = p + 1 - a
for both genus 1 and genus 2 (the stored ``a`` is the negative of the linear
L-polynomial coefficient in the 1 + a_p T + ... normalization).

The smooth projective model of y^2 = f(x) has one point at infinity when
deg f is odd and 1 + chi_p(lead f) points when deg f is even; the character-sum
trace formula carries that correction and is cross-checked against the
exhaustive counting oracle in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import sympy

from .finite_field import (
    ResidueTable,
    legendre,
    poly_eval_all_mod,
    poly_eval_mod,
    residue_table,
)
from .polynomials import IntPolynomial, PolynomialError

DEFAULT_LPOLY_CAP = 10**4


class CurveError(PolynomialError):
    pass


class BadPrimeError(ValueError):
    def __init__(self, p: int):
        super().__init__(f"p = {p} is a prime of bad reduction for this curve")
        self.p = p


class CapExceededError(ValueError):
    pass


@dataclass(frozen=True)
class CurveSpec:
    """A curve y^2 = f(x) of genus 1 or 2 with its bad-prime set."""

    f: IntPolynomial
    genus: int
    bad_primes: frozenset[int]


@dataclass(frozen=True)
class TraceRecord:
    p: int
    a: int
    genus: int


@dataclass(frozen=True)
class LPolynomial2:
    """Genus-2 local data (a, b): trace convention, so the L-polynomial in the
    opposite sign convention reads 1 - aT + bT^2 - paT^3 + p^2 T^4."""

    p: int
    a: int
    b: int


def hyperelliptic_bad_primes(f: IntPolynomial) -> frozenset[int]:
    """{2} together with primes dividing disc(f) or the leading coefficient."""
    if not f.is_squarefree():
        raise CurveError(f"f = {f} has a repeated root (not squarefree over Q)")
    bad = {2}
    disc = f.discriminant()
    for n in (abs(disc), abs(f.lead)):
        if n > 1:
            bad.update(int(q) for q in sympy.factorint(n))
    return frozenset(bad)


def curve_from_poly(f: IntPolynomial) -> CurveSpec:
    """Build a CurveSpec from a squarefree f of degree 3..6."""
    if f.is_zero or not 3 <= f.degree <= 6:
        raise CurveError(f"degree must be 3..6, got {f.coeffs and f.degree}")
    genus = 1 if f.degree <= 4 else 2
    return CurveSpec(f, genus, hyperelliptic_bad_primes(f))


def hyperelliptic_trace(f: IntPolynomial, p: int, table: ResidueTable | None = None) -> int:
    """Trace of Frobenius of the smooth projective model of y^2 = f(x) at a good p.

    a = -sum_x chi_p(f(x)) minus the point-at-infinity correction chi_p(lead f)
    for even degree.  Valid for any degree >= 3 (genus (deg-1)//2 for odd deg,
    deg/2 - 1 for even).
    """
    tab = table if table is not None and table.p == p else residue_table(p)
    vals = poly_eval_all_mod(f.coeffs, p)
    s = int(tab.chi[vals].sum(dtype=np.int64))
    corr = tab.chi_of(f.lead) if f.degree % 2 == 0 else 0
    return -s - corr


def _checked_trace(c: CurveSpec, p: int, table: ResidueTable | None) -> TraceRecord:
    if p in c.bad_primes:
        raise BadPrimeError(p)
    a = hyperelliptic_trace(c.f, p, table)
    if a * a > 4 * c.genus * c.genus * p:
        raise AssertionError(
            f"Weil bound violated at p={p}: a={a}, genus {c.genus} (counting bug)"
        )
    return TraceRecord(p, a, c.genus)


def trace_elliptic(c: CurveSpec, p: int, table: ResidueTable | None = None) -> TraceRecord:
    """Genus-1 trace a = -sum chi_p(f(x)) for a degree-3 model; a = p + 1 - #E(F_p)."""
    if c.genus != 1 or c.f.degree != 3:
        raise CurveError("trace_elliptic requires a degree-3 genus-1 curve")
    return _checked_trace(c, p, table)


def trace_genus2(c: CurveSpec, p: int, table: ResidueTable | None = None) -> TraceRecord:
    """Genus-2 trace a = p + 1 - #C(F_p) for the smooth model, degree 5 or 6."""
    if c.genus != 2:
        raise CurveError("trace_genus2 requires a genus-2 curve (degree 5 or 6)")
    return _checked_trace(c, p, table)


def curve_trace(c: CurveSpec, p: int, table: ResidueTable | None = None) -> TraceRecord:
    """Genus-aware trace dispatch used by sweeps."""
    return _checked_trace(c, p, table)


def _count_fp2(f: IntPolynomial, p: int) -> int:
    """#C(F_{p^2}) for the smooth model of y^2 = f, with F_{p^2} = F_p[u]/(u^2 - n)."""
    tab = residue_table(p)
    n = next(a for a in range(2, p) if tab.chi_of(a) == -1)
    # z = z0 + z1 u is a nonzero square in F_{p^2}  iff  chi_p(Norm z) = 1,
    # Norm(z) = z0^2 - n z1^2.
    total = 0
    x1 = np.arange(p, dtype=np.int64)
    for x0 in range(p):
        v0 = np.zeros(p, dtype=np.int64)
        v1 = np.zeros(p, dtype=np.int64)
        for c in reversed(f.coeffs):
            v0, v1 = (v0 * x0 + n * v1 * x1 + c) % p, (v0 * x1 + v1 * x0) % p
        norm = (v0 * v0 - n * v1 * v1) % p
        total += p + int(tab.chi[norm].sum(dtype=np.int64))
    if f.degree % 2 == 1:
        total += 1
    else:
        # lead is a square in F_{p^2} iff it is nonzero mod p (norm of lead is lead^2)
        total += 1 + (1 if f.lead % p else 0)
    return total


def l_polynomial_genus2(c: CurveSpec, p: int, cap: int = DEFAULT_LPOLY_CAP) -> LPolynomial2:
    """Local genus-2 L-data (a, b) via counts over F_p and F_{p^2}.

    b = (a^2 - (p^2 + 1 - #C(F_{p^2}))) / 2, an exact integer.
    """
    if p > cap:
        raise CapExceededError(f"p = {p} exceeds the F_p^2 counting cap {cap}")
    rec = trace_genus2(c, p)
    a2 = p * p + 1 - _count_fp2(c.f, p)
    num = rec.a * rec.a - a2
    assert num % 2 == 0, "parity failure in b (counting bug)"
    b = num // 2
    if abs(b) > 6 * p:
        raise AssertionError(f"|b| <= 6p violated at p={p}: b={b}")
    return LPolynomial2(p, rec.a, b)


def lpoly_roots(lp: LPolynomial2) -> np.ndarray:
    """Complex roots of the encoded quartic x^4 - a x^3 + b x^2 - pa x + p^2.

    These are the Frobenius eigenvalues; all have absolute value sqrt(p).
    """
    return np.roots([1, -lp.a, lp.b, -lp.p * lp.a, lp.p * lp.p])


def normalized_angle(rec: TraceRecord) -> float:
    """theta_p = arccos(a / 2 sqrt(p)) in [0, pi], genus-1 records only."""
    if rec.genus != 1:
        raise CurveError("normalized_angle is defined for genus-1 records")
    z = rec.a / (2.0 * math.sqrt(rec.p))
    if abs(z) > 1.0:
        raise AssertionError(f"Hasse bound violated at p={rec.p}: a={rec.a}")
    return math.acos(z)


def trace_oracle_exhaustive(c: CurveSpec, p: int) -> TraceRecord:
    """Brute-force point count of the smooth projective model (test oracle).

    Counts y-solutions per x via a square-count histogram; deliberately avoids
    the quadratic-character path.  Restricted to p < 10^4.
    """
    if p >= 10**4:
        raise CapExceededError("exhaustive oracle limited to p < 10^4")
    if p in c.bad_primes:
        raise BadPrimeError(p)
    sq = [0] * p
    for y in range(p):
        sq[y * y % p] += 1
    affine = sum(sq[poly_eval_mod(c.f.coeffs, x, p)] for x in range(p))
    if c.f.degree % 2 == 1:
        infinity = 1
    else:
        infinity = sq[c.f.lead % p]
    return TraceRecord(p, p + 1 - (affine + infinity), c.genus)
