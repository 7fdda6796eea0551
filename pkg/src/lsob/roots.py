"""All complex roots of a polynomial at high precision.

Roots come from Aberth-Ehrlich simultaneous iteration at twice the working
precision, followed by a Newton polish; they are then rounded to working
precision, snapped to the real axis when the imaginary part is negligible, and
sorted by ``(real, imag)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import MPContext

from .errors import NoConvergence
from .poly import ComplexScalar, Polynomial, float_field

__all__ = ["ZeroSet", "ZeroLocationReport", "find_roots", "zero_location_check", "real_roots_in", "residual_tolerance"]

DEFAULT_BITS = 256
MAX_SWEEPS = 200


@dataclass(frozen=True)
class ZeroSet:
    """Roots of one polynomial with their certificates.

    Attributes
    ----------
    poly_id : str
        Label of the source polynomial.
    roots : tuple of ComplexScalar
        Sorted by real part, then imaginary part.
    residual_bound : mpf
        ``max |p(r)|`` over the reported roots.
    simple : tuple of bool
        Per-root simplicity certificate.
    min_separation : mpf
        Smallest pairwise distance (``inf`` for a single root).
    """

    poly_id: str
    roots: tuple
    residual_bound: object
    simple: tuple
    min_separation: object
    precision_bits: int = DEFAULT_BITS

    def __len__(self):
        return len(self.roots)

    @property
    def all_real(self) -> bool:
        return all(r.im == 0 for r in self.roots)

    @property
    def all_simple(self) -> bool:
        return all(self.simple)

    def real_parts(self) -> list:
        return [r.re for r in self.roots]

    def real_roots(self) -> list:
        return [r.re for r in self.roots if r.im == 0]


def _context(bits: int) -> MPContext:
    ctx = MPContext()
    ctx.prec = bits
    return ctx


def _convert(ctx, v):
    if isinstance(v, Fraction):
        return ctx.mpf(v.numerator) / v.denominator
    return ctx.mpf(v)


def _horner2(coeffs, z):
    # value and first derivative together
    p = coeffs[-1]
    dp = 0
    for a in reversed(coeffs[:-1]):
        dp = dp * z + p
        p = p * z + a
    return p, dp


def _initial_guesses(ctx, coeffs):
    n = len(coeffs) - 1
    lead = coeffs[-1]
    # Fujiwara-type bound: every root lies in |z| <= 2 max |a_{n-i}/a_n|^(1/i)
    radius = max(
        (abs(coeffs[n - i] / lead) ** (ctx.mpf(1) / i) for i in range(1, n + 1) if coeffs[n - i] != 0),
        default=ctx.mpf(0),
    )
    radius = 2 * radius if radius > 0 else ctx.mpf(1)
    centre = -coeffs[n - 1] / (n * lead)
    # the small angular offset keeps the start off the real axis
    return [centre + radius * ctx.expjpi(ctx.mpf(2 * k) / n + ctx.mpf(1) / (2 * n + 1)) for k in range(n)]


def _aberth(ctx, coeffs, max_sweeps):
    n = len(coeffs) - 1
    z = _initial_guesses(ctx, coeffs)
    absc = [abs(a) for a in coeffs]
    eps = ctx.ldexp(1, -ctx.prec + 6)
    done = [False] * n
    for sweep in range(1, max_sweeps + 1):
        for k in range(n):
            if done[k]:
                continue
            p, dp = _horner2(coeffs, z[k])
            scale = sum(a * abs(z[k]) ** i for i, a in enumerate(absc))
            if abs(p) <= eps * scale:
                done[k] = True
                continue
            s = ctx.fsum(1 / (z[k] - z[j]) for j in range(n) if j != k)
            ratio = p / dp if dp != 0 else ctx.mpf(1)
            w = ratio / (1 - ratio * s)
            z[k] -= w
            if abs(w) <= eps * (1 + abs(z[k])):
                done[k] = True
        if all(done):
            return z, sweep, True
    return z, max_sweeps, False


def _polish(ctx, coeffs, z, steps=3):
    out = []
    for r in z:
        p, dp = _horner2(coeffs, r)
        for _ in range(steps):
            if dp == 0:
                break
            cand = r - p / dp
            pc, dpc = _horner2(coeffs, cand)
            if abs(pc) >= abs(p):
                break
            r, p, dp = cand, pc, dpc
        out.append(r)
    return out


def _pair_conjugates(roots):
    upper = sorted((r for r in roots if r.imag > 0), key=lambda r: (r.real, r.imag))
    lower = sorted((r for r in roots if r.imag < 0), key=lambda r: (r.real, -r.imag))
    real = [r for r in roots if r.imag == 0]
    if len(upper) != len(lower):
        return [(r.real, r.imag) for r in roots]
    paired = []
    for a, b in zip(upper, lower):
        re = (a.real + b.real) / 2
        im = (a.imag - b.imag) / 2
        paired.append((re, im))
    out = [(r.real, r.imag) for r in real]
    for re, im in paired:
        out.extend([(re, im), (re, -im)])
    return out


def find_roots(p: Polynomial, label: str = "p", precision_bits: int | None = None, max_sweeps: int = MAX_SWEEPS) -> ZeroSet:
    """All ``deg p`` complex roots of ``p``.

    Parameters
    ----------
    p : Polynomial
        Real polynomial of degree at least one.
    precision_bits : int, optional
        Working precision; defaults to the field's precision (256 for rationals).

    Raises
    ------
    NoConvergence
        If the iteration cap is hit; ``exc.partial`` holds the current
        approximations with every root flagged non-simple.
    """
    if p.degree < 1:
        raise ValueError("find_roots needs a polynomial of degree >= 1")
    bits = precision_bits or p.field.precision_bits or DEFAULT_BITS
    work = float_field(bits).ctx
    hi = _context(2 * bits)
    coeffs = [_convert(hi, a) for a in p.coeffs]
    z, _, ok = _aberth(hi, coeffs, max_sweeps)
    if ok:
        z = _polish(hi, coeffs, z)
    rounded = [work.mpc(r) for r in z]
    snap = work.ldexp(1, -(bits // 4))
    snapped = []
    for r in rounded:
        if abs(r.imag) < snap * (1 + abs(r.real)):
            r = work.mpc(r.real, 0)
        snapped.append(r)
    pairs = _pair_conjugates(snapped)
    pairs.sort()
    roots = tuple(ComplexScalar(work.mpf(re), work.mpf(im)) for re, im in pairs)
    zs = _certify(p, label, roots, bits, work, hi, coeffs)
    if not ok:
        zs = ZeroSet(label, zs.roots, zs.residual_bound, tuple(False for _ in roots), zs.min_separation, bits)
        raise NoConvergence(f"Aberth iteration for {label} did not converge in {max_sweeps} sweeps", zs)
    return zs


def _certify(p, label, roots, bits, work, hi, coeffs):
    n = len(roots)
    zs_hi = [hi.mpc(r.re, r.im) for r in roots]
    vals = [_horner2(coeffs, z) for z in zs_hi]
    residuals = [abs(v) for v, _ in vals]
    bound = work.mpf(max(residuals))
    sep = work.inf
    nearest = [work.inf] * n
    for i, j in itertools.combinations(range(n), 2):
        dist = work.mpf(abs(zs_hi[i] - zs_hi[j]))
        sep = min(sep, dist)
        nearest[i] = min(nearest[i], dist)
        nearest[j] = min(nearest[j], dist)
    sep_tol = work.ldexp(1, -(bits // 4))
    simple = tuple(bool(nearest[k] > sep_tol and abs(vals[k][1]) > bound) for k in range(n))
    return ZeroSet(label, roots, bound, simple, sep, bits)


def residual_tolerance(p: Polynomial, r: ComplexScalar, bits: int):
    """Declared per-root bound ``2^(-bits/2) ||p||_inf max(1,|r|)^deg``."""
    ctx = float_field(bits).ctx
    norm = _convert(ctx, p.norm_inf())
    mod = ctx.sqrt(r.re * r.re + r.im * r.im)
    return ctx.ldexp(norm, -(bits // 2)) * max(ctx.mpf(1), mod) ** p.degree


@dataclass(frozen=True)
class ZeroLocationReport:
    """Where the zeros of ``S_n`` sit relative to the mass points.

    ``attracted`` maps each mass index ``j`` to the root assigned to it (or
    ``None``); ``exactly_one_each`` is true when every mass has attracted its
    own zero; ``remaining_positive`` when all other roots are real and positive.
    """

    attracted: dict
    candidates: tuple
    exactly_one_each: bool
    remaining_positive: bool
    n_positive: int
    n_roots: int


def zero_location_check(cfg, zs: ZeroSet) -> ZeroLocationReport:
    """Match non-positive roots to mass points.

    A root is a candidate when it is closer to some ``c_j`` than to
    ``[0, inf)``.  Candidates are assigned to mass points injectively by
    minimal total distance (exhaustive over the few mass points).
    """
    ctx = float_field(zs.precision_bits).ctx
    masses = [ctx.mpf(m.c.numerator) / m.c.denominator if isinstance(m.c, Fraction) else ctx.mpf(m.c) for m in cfg.masses]

    def dist(r, c):
        return abs(ctx.mpc(r.re - c, r.im))

    def dist_half(r):
        return abs(r.im) if r.re >= 0 else abs(ctx.mpc(r.re, r.im))

    cand = [r for r in zs.roots if masses and min(dist(r, c) for c in masses) < dist_half(r)]
    attracted = {j: None for j in range(len(masses))}
    if cand and masses:
        k = min(len(cand), len(masses))
        best = None
        for roots_sub in itertools.combinations(range(len(cand)), k):
            for js in itertools.permutations(range(len(masses)), k):
                cost = sum(dist(cand[i], masses[j]) for i, j in zip(roots_sub, js))
                if best is None or cost < best[0]:
                    best = (cost, roots_sub, js)
        for i, j in zip(best[1], best[2]):
            attracted[j] = cand[i]
    chosen = {id(r) for r in attracted.values() if r is not None}
    rest = [r for r in zs.roots if id(r) not in chosen]
    n_pos = sum(1 for r in zs.roots if r.im == 0 and r.re > 0)
    return ZeroLocationReport(
        attracted=attracted,
        candidates=tuple(cand),
        exactly_one_each=bool(masses) and all(v is not None for v in attracted.values()) and len(cand) == len(masses),
        remaining_positive=all(r.im == 0 and r.re > 0 for r in rest),
        n_positive=n_pos,
        n_roots=len(zs.roots),
    )


def _bound(ctx, v):
    if isinstance(v, str):
        return ctx.mpf(v.replace("∞", "inf"))
    if isinstance(v, Fraction):
        return ctx.mpf(v.numerator) / v.denominator
    if isinstance(v, float) and math.isinf(v):
        return ctx.inf if v > 0 else -ctx.inf
    return ctx.mpf(v)


def real_roots_in(p: Polynomial, a, b, precision_bits: int | None = None) -> int:
    """Number of real roots of ``p`` in the open interval ``(a, b)``; infinite ends are allowed."""
    bits = precision_bits or p.field.precision_bits or DEFAULT_BITS
    ctx = float_field(bits).ctx
    lo, hi = _bound(ctx, a), _bound(ctx, b)
    if not lo < hi:
        raise ValueError("real_roots_in needs a < b")
    if p.degree < 1:
        return 0
    zs = find_roots(p, precision_bits=bits)
    return sum(1 for r in zs.roots if r.im == 0 and lo < r.re < hi)
