"""Discrete Laguerre-Sobolev inner products and their monic orthogonal polynomials.

The inner product is

    <f, g>_S = int_0^inf f g x^alpha e^{-x} dx + sum_{(j,k) in I+} lambda_{j,k} f^(k)(c_j) g^(k)(c_j)

with mass points ``c_j < 0``.  ``S_n`` is built from the Laguerre basis via the
Fourier/kernel connection formula; :func:`gram_schmidt_oracle` rebuilds it
independently from the Gram matrix of monomials.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping

from .errors import ConfigError, IdentityViolation, PositiveDefiniteViolation
from .laguerre import LaguerreFamily, laguerre_family
from .linalg import ldl_pivots, solve
from .poly import RATIONAL, Polynomial, exact_divide, float_field, taylor_poly

__all__ = [
    "MassPoint",
    "SobolevConfig",
    "SobolevPolynomial",
    "KernelSet",
    "sobolev_inner",
    "kernel_set",
    "solve_mass_derivatives",
    "sobolev_poly",
    "gram_schmidt_oracle",
    "is_sequentially_ordered",
    "mass_derivatives",
]


@dataclass(frozen=True)
class MassPoint:
    """A mass point ``c`` with positive weights ``lambdas = ((k, lambda_k), ...)``."""

    c: object
    lambdas: tuple

    @property
    def order(self) -> int:
        return max(k for k, _ in self.lambdas)

    def lam(self, k: int):
        for kk, v in self.lambdas:
            if kk == k:
                return v
        return 0


def _parse_mass(raw, field) -> MassPoint | None:
    if isinstance(raw, MassPoint):
        c, lams = raw.c, dict(raw.lambdas)
    elif isinstance(raw, Mapping):
        if "c" not in raw:
            raise ConfigError("mass point needs a 'c' entry")
        c = raw["c"]
        if "lambdas" in raw:
            lams = {int(k): v for k, v in raw["lambdas"].items()}
        else:
            if "order" not in raw or "lambda" not in raw:
                raise ConfigError("mass point needs 'order' and 'lambda' (or 'lambdas')")
            lams = {int(raw["order"]): raw["lambda"]}
    else:
        c, order, lam = raw
        lams = {int(order): lam}
    try:
        c = field(c)
        lams = {k: field(v) for k, v in lams.items()}
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad scalar in mass point: {exc}") from None
    if not c < 0:
        raise ConfigError(f"mass points must be negative, got c={c}")
    for k, v in lams.items():
        if k < 0:
            raise ConfigError(f"derivative order must be nonnegative, got {k}")
        if v < 0:
            raise ConfigError(f"weights must be nonnegative, got lambda_{k}={v} at c={c}")
    positive = tuple(sorted((k, v) for k, v in lams.items() if v > 0))
    if not positive:
        return None
    return MassPoint(c, positive)


@dataclass(frozen=True)
class SobolevConfig:
    """Parameters of a Laguerre-Sobolev inner product.

    ``masses`` accepts :class:`MassPoint` objects, ``(c, order, lambda)``
    triples, or dicts with ``c`` plus either ``order``/``lambda`` or a
    ``lambdas`` map.  Zero weights are dropped and mass points are sorted so
    that derivative orders are nondecreasing (ties: closer to the origin first).
    """

    alpha: object
    masses: tuple = ()
    mode: str = "rational"
    precision_bits: int = 256

    def __post_init__(self):
        if self.mode not in ("rational", "float"):
            raise ConfigError(f"mode must be 'rational' or 'float', got {self.mode!r}")
        if int(self.precision_bits) < 32:
            raise ConfigError("precision_bits must be at least 32")
        object.__setattr__(self, "precision_bits", int(self.precision_bits))
        f = self.field
        try:
            alpha = f(self.alpha)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad alpha: {exc}") from None
        if not alpha > -1:
            raise ConfigError(f"alpha must exceed -1, got {alpha}")
        parsed = [m for m in (_parse_mass(raw, f) for raw in self.masses) if m is not None]
        cs = [m.c for m in parsed]
        if len(set(cs)) != len(cs):
            raise ConfigError("mass points must be pairwise distinct")
        parsed.sort(key=lambda m: (m.order, -m.c))
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "masses", tuple(parsed))

    @property
    def field(self):
        return RATIONAL if self.mode == "rational" else float_field(self.precision_bits)

    @property
    def float_field(self):
        """Big-float field used for roots and electrostatics."""
        return float_field(self.precision_bits)

    def family(self) -> LaguerreFamily:
        return laguerre_family(self.alpha, self.field)

    @property
    def N(self) -> int:
        return len(self.masses)

    @property
    def orders(self) -> tuple:
        return tuple(m.order for m in self.masses)

    @property
    def d(self) -> int:
        return sum(m.order + 1 for m in self.masses)

    @functools.cached_property
    def index(self) -> tuple:
        """``I+`` as ``((j, k), ...)`` with zero-based ``j``."""
        return tuple((j, k) for j, m in enumerate(self.masses) for k, _ in m.lambdas)

    @property
    def d_star(self) -> int:
        return len(self.index)

    def lam(self, j: int, k: int):
        return self.masses[j].lam(k)

    def c(self, j: int):
        return self.masses[j].c

    @property
    def is_classical(self) -> bool:
        return not self.masses

    def with_mode(self, mode: str, precision_bits: int | None = None) -> "SobolevConfig":
        bits = self.precision_bits if precision_bits is None else precision_bits
        masses = [{"c": _to_str(m.c), "lambdas": {k: _to_str(v) for k, v in m.lambdas}} for m in self.masses]
        return SobolevConfig(_to_str(self.alpha), tuple(masses), mode, bits)

    def describe(self) -> dict:
        return {
            "alpha": _to_str(self.alpha),
            "masses": [
                {"c": _to_str(m.c), "lambdas": {str(k): _to_str(v) for k, v in m.lambdas}}
                for m in self.masses
            ],
            "mode": self.mode,
            "precision_bits": self.precision_bits,
            "N": self.N,
            "d": self.d,
            "d_star": self.d_star,
        }


def _to_str(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if hasattr(v, "_mpf_"):
        from mpmath import nstr

        return nstr(v, 80, strip_zeros=True)
    return str(v)


@dataclass(frozen=True)
class KernelSet:
    """Kernel partial derivatives ``K_{n-1}^{(l,k)}(c_i, c_j)`` and ``K_{n-1}^{(0,k)}(x, c_j)``."""

    n: int
    values: dict
    polys: dict
    matrix: tuple


@dataclass(frozen=True)
class SobolevPolynomial:
    """Monic ``S_n`` together with ``S_n^(k)(c_j)`` for ``(j,k)`` in ``I+``.

    ``sigma`` is ``sum lambda_{j,k} S_n^(k)(c_j) (L_n)^(k)(c_j) / h_{n-1}``
    (zero for ``n = 0``).
    """

    n: int
    poly: Polynomial
    derivs_at_masses: dict
    sigma: object
    kernels: KernelSet | None = dc_field(default=None, repr=False, compare=False)


def mass_derivatives(cfg: SobolevConfig, p: Polynomial) -> dict:
    """``{(j, k): p^(k)(c_j)}`` over every ``(j, k)`` in ``I+``."""
    out = {}
    for j, m in enumerate(cfg.masses):
        vals = p.derivatives_at(m.c, m.order)
        for k, _ in m.lambdas:
            out[(j, k)] = vals[k]
    return out


def sobolev_inner(cfg: SobolevConfig, f: Polynomial, g: Polynomial, fam: LaguerreFamily | None = None):
    """``<f, g>_S`` with the continuous part computed from exact moments."""
    fam = fam or cfg.family()
    prod = f * g
    total = cfg.field(0)
    for i, c in enumerate(prod.coeffs):
        if c != 0:
            total += c * fam.moment(i)
    if cfg.masses:
        fd, gd = mass_derivatives(cfg, f), mass_derivatives(cfg, g)
        for (j, k) in cfg.index:
            total += cfg.lam(j, k) * fd[(j, k)] * gd[(j, k)]
    return total


def _derivative_tables(cfg, fam, n):
    return [mass_derivatives(cfg, fam.poly(m)) for m in range(n)]


def kernel_set(cfg: SobolevConfig, fam: LaguerreFamily, n: int) -> KernelSet:
    """Kernel data for the degree-``n`` system, from the truncated-sum definition.

    In rational mode the polynomials ``K_{n-1}^{(0,k)}(x, c_j)`` are also rebuilt
    from the closed Christoffel-Darboux form and compared exactly.  For
    ``n >= d`` the kernel matrix must be positive definite.
    """
    if n < 1:
        raise ValueError("kernel_set needs n >= 1")
    field = cfg.field
    index = cfg.index
    tables = _derivative_tables(cfg, fam, n)
    inv_h = [1 / fam.norm(m) for m in range(n)]

    values = {}
    matrix = []
    for (i, l) in index:
        row = []
        for (j, k) in index:
            acc = field(0)
            for m in range(n):
                acc += tables[m][(i, l)] * tables[m][(j, k)] * inv_h[m]
            values[(l, k, i, j)] = acc
            row.append(acc)
        matrix.append(tuple(row))

    polys = {}
    for (j, k) in index:
        acc = Polynomial.zero(field)
        for m in range(n):
            w = tables[m][(j, k)] * inv_h[m]
            if w != 0:
                acc = acc + fam.poly(m) * w
        polys[(j, k)] = acc

    if field.exact:
        _check_closed_form(cfg, fam, n, polys)

    if n >= cfg.d and index:
        pivots = ldl_pivots(matrix)
        if len(pivots) < len(index) or not all(p > 0 for p in pivots):
            raise PositiveDefiniteViolation(f"kernel matrix not positive definite at n={n}: pivots {pivots}")
    return KernelSet(n, values, polys, tuple(matrix))


def _check_closed_form(cfg, fam, n, polys):
    field = cfg.field
    ln, lnm1 = fam.poly(n), fam.poly(n - 1)
    h = fam.norm(n - 1)
    fact = 1
    for (j, k) in cfg.index:
        c = cfg.c(j)
        fact = 1
        for i in range(2, k + 1):
            fact *= i
        num = (taylor_poly(lnm1, c, k) * ln - taylor_poly(ln, c, k) * lnm1) * fact
        den = Polynomial.linear(c, field) ** (k + 1) * h
        closed = exact_divide(num, den).quotient
        if closed != polys[(j, k)]:
            raise IdentityViolation(f"Christoffel-Darboux closed form mismatch at (j,k)=({j},{k}), n={n}")


def solve_mass_derivatives(cfg: SobolevConfig, fam: LaguerreFamily, n: int, kernels: KernelSet | None = None) -> dict:
    """Solve ``(I + K_{n-1} L) S_n(C) = P_n(C)`` for ``{(j,k): S_n^(k)(c_j)}``."""
    index = cfg.index
    rhs_all = mass_derivatives(cfg, fam.poly(n))
    if not index:
        return {}
    if n == 0:
        return rhs_all
    kernels = kernels or kernel_set(cfg, fam, n)
    lam = [cfg.lam(j, k) for (j, k) in index]
    a = [
        [(1 if r == s else 0) + kernels.matrix[r][s] * lam[s] for s in range(len(index))]
        for r in range(len(index))
    ]
    b = [rhs_all[key] for key in index]
    x = solve(a, b, cfg.field)
    return dict(zip(index, x))


def sobolev_poly(cfg: SobolevConfig, fam: LaguerreFamily | None, n: int) -> SobolevPolynomial:
    """Monic ``S_n`` via ``S_n = L_n - sum lambda_{j,k} S_n^(k)(c_j) K_{n-1}^{(0,k)}(x, c_j)``."""
    fam = fam or cfg.family()
    field = cfg.field
    ln = fam.poly(n)
    if n == 0 or not cfg.index:
        return SobolevPolynomial(n, ln, mass_derivatives(cfg, ln), _sigma(cfg, fam, n, mass_derivatives(cfg, ln)))
    kernels = kernel_set(cfg, fam, n)
    sol = solve_mass_derivatives(cfg, fam, n, kernels)
    s = ln
    for key in cfg.index:
        s = s - kernels.polys[key] * (cfg.lam(*key) * sol[key])
    if s.degree != n or (field.exact and not s.is_monic()):
        raise IdentityViolation(f"S_{n} is not monic of degree {n}")
    if field.exact:
        got = mass_derivatives(cfg, s)
        if got != sol:
            raise IdentityViolation(f"S_{n} derivative values disagree with the linear solve")
        for m in range(n):
            if sobolev_inner(cfg, s, Polynomial.monomial(m, field), fam) != 0:
                raise IdentityViolation(f"<S_{n}, x^{m}>_S != 0")
    return SobolevPolynomial(n, s, sol, _sigma(cfg, fam, n, sol), kernels)


def _sigma(cfg, fam, n, sdiv):
    if n == 0 or not cfg.index:
        return cfg.field(0)
    ld = mass_derivatives(cfg, fam.poly(n))
    acc = cfg.field(0)
    for key in cfg.index:
        acc += cfg.lam(*key) * sdiv[key] * ld[key]
    return acc / fam.norm(n - 1)


def gram_schmidt_oracle(cfg: SobolevConfig, n: int, fam: LaguerreFamily | None = None) -> Polynomial:
    """Monic orthogonalization of ``1, x, ..., x^n`` under ``<.,.>_S``.

    Works only from the Gram matrix of monomials, so it shares no code path
    with the kernel construction in :func:`sobolev_poly`.
    """
    fam = fam or cfg.family()
    field = cfg.field
    monos = [Polynomial.monomial(a, field) for a in range(n + 1)]
    gram = [[None] * (n + 1) for _ in range(n + 1)]
    for a in range(n + 1):
        for b in range(a, n + 1):
            gram[a][b] = gram[b][a] = sobolev_inner(cfg, monos[a], monos[b], fam)

    def ip(p, q):
        acc = field(0)
        for a, pa in enumerate(p):
            if pa == 0:
                continue
            for b, qb in enumerate(q):
                if qb != 0:
                    acc += pa * qb * gram[a][b]
        return acc

    basis = []
    norms = []
    for m in range(n + 1):
        v = [field(0)] * m + [field(1)]
        e = list(v)
        for p, h in zip(basis, norms):
            t = ip(e, p) / h
            for i, pi in enumerate(p):
                v[i] -= t * pi
        basis.append(v)
        norms.append(ip(v, v))
    return Polynomial(basis[n], field)


def is_sequentially_ordered(cfg: SobolevConfig):
    """Check the hull-nesting condition; returns ``(ok, failing_level_or_None)``.

    Level 0 is the hull of ``[0, inf)`` and the order-0 mass points; level
    ``k >= 1`` is the hull of ``{c_j : lambda_{j,k} > 0}``.  Every level must
    avoid the interior of the hull of all lower levels.
    """
    top = max(cfg.orders, default=0)
    zero = cfg.field(0)
    lo = min([zero] + [m.c for m in cfg.masses if m.lam(0) > 0])
    for k in range(1, top + 1):
        pts = [m.c for m in cfg.masses if m.lam(k) > 0]
        if not pts:
            continue
        # the running hull is [lo, inf) with interior (lo, inf)
        if max(pts) > lo:
            return False, k
        lo = min(lo, min(pts))
    return True, None
