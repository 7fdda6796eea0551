"""Electrostatic interpretation of the zeros of ``S_n``.

The logarithmic derivative ``P1/P2`` of the differential equation splits into
simple fractions

    P1/P2 = -1 + l1/x + sum_j l2_j/(x - c_j) + sum_i l3_i/(x - u_i) - sum_j l4_j/(x - e_j)

where ``u_i`` are the roots of ``delta_n`` and ``e_j`` those of ``phi_{1,n}``.
The external potential of one unit charge at ``w`` is

    H(w) = w/2 - 1/2 sum_p Re[a_p log(w - p)]

with ``a_p`` the residue at pole ``p`` (``a = -l4`` at the ``e_j``), so that
``H' = -P1/(2 P2)``.  The zeros of ``S_n`` are then critical points of

    E(w) = -sum_{k<j} log|w_j - w_k| + sum_k H(w_k).

Conjugate complex poles carry conjugate residues, so ``H`` stays real.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import NonSimplePole, PoleCollision
from .linalg import jacobi_eigh, ldl_pivots
from .poly import Polynomial, float_field
from .roots import ZeroSet, find_roots
from .structure import StructureBundle

__all__ = [
    "CONVENTIONS",
    "Pole",
    "Assumptions",
    "ElectrostaticModel",
    "Classification",
    "ConditionalResult",
    "ElectrostaticReport",
    "build_model",
    "energy",
    "gradient",
    "hessian",
    "external_second_derivative",
    "ode_second_derivative",
    "classify",
    "conditional_equilibrium",
]

CONVENTIONS = {
    "linear_term": "w/2 (signed); its derivative is 1/2 on both half-lines",
    "e_terms": "+1/2 l4 log|w - e| (the e_j attract like negative charges)",
    "u_terms": "+1/2 l3 log(1/|w - u|)",
}


@dataclass(frozen=True)
class Pole:
    """A simple pole of ``P1/P2`` with its residue.

    ``kind`` is ``"origin"``, ``"mass"``, ``"u"`` or ``"e"``; ``index`` is the
    0-based position within its kind.
    """

    kind: str
    index: int
    location: object
    residue: object


@dataclass(frozen=True)
class Assumptions:
    simple_delta: bool
    e_admissible: bool
    residues_positive: bool
    diagnostics: tuple = ()

    @property
    def all_hold(self) -> bool:
        return self.simple_delta and self.e_admissible and self.residues_positive


@dataclass(frozen=True)
class ElectrostaticModel:
    n: int
    precision_bits: int
    zeros: ZeroSet
    u_roots: ZeroSet | None
    e_roots: ZeroSet | None
    e_groups: tuple
    ell1: object
    ell2: dict
    ell3: dict
    ell4: dict
    r_values: dict
    psi1: Polynomial
    psi2: Polynomial
    P1: Polynomial
    P2: Polynomial
    poles: tuple
    assumptions: Assumptions
    decomposition_valid: bool = True

    @property
    def ctx(self):
        return float_field(self.precision_bits).ctx

    def pole_locations(self) -> list:
        return [p.location for p in self.poles]


def _mp(ctx, v):
    if isinstance(v, Fraction):
        return ctx.mpf(v.numerator) / v.denominator
    if isinstance(v, (int, float, str)):
        return ctx.mpf(v)
    return v


def _eval(ctx, p: Polynomial, z):
    acc = ctx.mpf(0)
    for a in reversed(p.coeffs):
        acc = acc * z + _mp(ctx, a)
    return acc


def _as_point(ctx, r):
    return ctx.mpf(r.re) if r.im == 0 else ctx.mpc(r.re, r.im)


def _realify(ctx, v):
    if isinstance(v, ctx.mpc) and v.imag == 0:
        return v.real
    return v


def _group_roots(ctx, zs: ZeroSet, bits: int):
    # multiple roots come back as tight clusters; merge them with a multiplicity
    tol = ctx.ldexp(1, -(bits // 8))
    groups = []
    for r in zs.roots:
        z = _as_point(ctx, r)
        for g in groups:
            if abs(g[0] - z) <= tol * (1 + abs(z)):
                g[1].append(z)
                break
        else:
            groups.append([z, [z]])
    out = []
    for _, members in groups:
        centre = ctx.fsum(members) / len(members)
        out.append((_realify(ctx, centre), len(members)))
    return tuple(out)


def build_model(cfg, bundle: StructureBundle, zeros: ZeroSet | None = None, precision_bits: int | None = None) -> ElectrostaticModel:
    """Pole decomposition and exponents for the zeros of ``S_n``.

    Failing hypotheses are recorded in ``model.assumptions``; the model is
    built regardless.  If ``psi2`` has a repeated root the residues are not
    defined, ``decomposition_valid`` is false and later evaluations raise
    :class:`NonSimplePole`.
    """
    bits = precision_bits or cfg.precision_bits
    ctx = float_field(bits).ctx
    n = bundle.n
    x = Polynomial.x(bundle.field)
    psi2 = x * bundle.rho.rho_N * bundle.delta
    psi1 = (bundle.phi2 + bundle.phi3 + psi2).chop()
    dpsi2 = psi2.derivative()
    zeros = zeros or find_roots(bundle.S, f"S_{n}", precision_bits=bits)
    u_roots = find_roots(bundle.delta, f"delta_{n}", precision_bits=bits) if bundle.delta.degree >= 1 else None
    e_roots = find_roots(bundle.phi1, f"phi1_{n}", precision_bits=bits) if bundle.phi1.degree >= 1 else None
    e_groups = _group_roots(ctx, e_roots, bits) if e_roots else ()
    diags = []
    tiny = ctx.ldexp(1, -(bits // 4))
    masses = [_mp(ctx, m.c) for m in cfg.masses]
    zero_pts = [_as_point(ctx, r) for r in zeros.roots]

    # assumption 1: delta_n has real simple roots away from zeros, masses and 0
    a1 = True
    if u_roots is not None:
        if not u_roots.all_real:
            a1 = False
            diags.append("delta_n has non-real roots")
        if not u_roots.all_simple:
            a1 = False
            diags.append("delta_n has a repeated root")
        for r in u_roots.roots:
            u = _as_point(ctx, r)
            if any(abs(u - q) <= tiny for q in zero_pts + masses + [ctx.mpf(0)]):
                a1 = False
                diags.append(f"delta_n root {ctx.nstr(u, 10)} collides with a zero, mass point or the origin")

    # assumption 2: e_j outside [0, inf) and away from the mass points
    a2 = True
    for e, _mult in e_groups:
        if not isinstance(e, ctx.mpc) and e >= 0:
            a2 = False
            diags.append(f"phi1 root {ctx.nstr(e, 10)} lies in [0, inf)")
        if any(abs(e - c) <= tiny for c in masses):
            a2 = False
            diags.append(f"phi1 root {ctx.nstr(e, 10)} coincides with a mass point")

    # residues of psi1/psi2 at its simple poles 0, c_j, u_i
    valid = True
    r_values = {}
    poles = []

    def residue(z):
        nonlocal valid
        dv = _eval(ctx, dpsi2, z)
        if abs(dv) <= tiny * (1 + abs(_eval(ctx, psi1, z))):
            valid = False
            return None
        return _realify(ctx, _eval(ctx, psi1, z) / dv)

    r0 = residue(ctx.mpf(0))
    r_values["0"] = r0
    ell1 = None if r0 is None else 1 + r0
    poles.append(Pole("origin", 0, ctx.mpf(0), ell1))
    ell2 = {}
    for j, m in enumerate(cfg.masses):
        rc = residue(masses[j])
        r_values[f"c{j + 1}"] = rc
        ell2[j] = None if rc is None else 2 * m.order + rc + 3
        poles.append(Pole("mass", j, masses[j], ell2[j]))
    ell3 = {}
    if u_roots is not None:
        for i, r in enumerate(u_roots.roots):
            u = _as_point(ctx, r)
            ru = residue(u)
            if ru is not None and abs(ru + 1) <= tiny:
                # the u-pole cancels against delta'/delta: no charge sits there
                ru = ctx.mpf(-1)
            r_values[f"u{i + 1}"] = ru
            ell3[i] = None if ru is None else _realify(ctx, ru + 1)
            poles.append(Pole("u", i, u, ell3[i]))
    ell4 = {}
    for j, (e, mult) in enumerate(e_groups):
        ell4[j] = mult
        poles.append(Pole("e", j, e, ctx.mpf(-mult)))
    if not valid:
        a1 = False
        diags.append("psi2' vanishes at one of its poles; residues undefined")

    # assumption 3: every residue exponent is positive
    a3 = valid
    if valid:
        if not r0 > -1:
            a3 = False
            diags.append(f"r(0) = {ctx.nstr(r0, 10)} <= -1")
        for j, m in enumerate(cfg.masses):
            rc = r_values[f"c{j + 1}"]
            if isinstance(rc, ctx.mpc) or not rc > -2 * m.order - 3:
                a3 = False
                diags.append(f"r(c{j + 1}) = {ctx.nstr(rc, 10)} <= -2d_j-3")
        for i in ell3:
            ru = r_values[f"u{i + 1}"]
            if isinstance(ru, ctx.mpc) or not ru > -1:
                a3 = False
                what = "= -1 (pole cancels, l3 = 0)" if ru == -1 else f"= {ctx.nstr(ru, 10)} is not > -1"
                diags.append(f"r(u{i + 1}) {what}")

    return ElectrostaticModel(
        n=n,
        precision_bits=bits,
        zeros=zeros,
        u_roots=u_roots,
        e_roots=e_roots,
        e_groups=e_groups,
        ell1=ell1,
        ell2=ell2,
        ell3=ell3,
        ell4=ell4,
        r_values=r_values,
        psi1=psi1,
        psi2=psi2,
        P1=bundle.P1,
        P2=bundle.P2,
        poles=tuple(poles),
        assumptions=Assumptions(a1, a2, a3, tuple(diags)),
        decomposition_valid=valid,
    )


def _prepare(model: ElectrostaticModel, omega):
    if not model.decomposition_valid:
        raise NonSimplePole("pole decomposition unavailable: psi2 has a repeated root")
    ctx = model.ctx
    w = [_mp(ctx, v) for v in omega]
    tiny = ctx.ldexp(1, -ctx.prec + 8)
    for k, j in itertools.combinations(range(len(w)), 2):
        if abs(w[k] - w[j]) <= tiny * (1 + abs(w[k])):
            raise PoleCollision(f"charges {k + 1} and {j + 1} coincide")
    for k, wk in enumerate(w):
        for p in model.poles:
            if p.residue != 0 and abs(wk - p.location) <= tiny * (1 + abs(wk)):
                raise PoleCollision(f"charge {k + 1} sits on a {p.kind} pole at {ctx.nstr(p.location, 10)}")
    return ctx, w


def _external(model, ctx, w):
    acc = w / 2
    for p in model.poles:
        if p.residue == 0:
            continue
        # Re[a log z] = a log|z| for real a; conjugate pairs sum to a real value
        acc -= ctx.re(p.residue * ctx.log(w - p.location)) / 2
    return acc


def _external_d1(model, ctx, w):
    acc = ctx.mpf(1) / 2
    for p in model.poles:
        if p.residue != 0:
            acc -= ctx.re(p.residue / (w - p.location)) / 2
    return acc


def external_second_derivative(model: ElectrostaticModel, w):
    """``H''(w)`` from the pole decomposition."""
    ctx = model.ctx
    w = _mp(ctx, w)
    acc = ctx.mpf(0)
    for p in model.poles:
        if p.residue != 0:
            acc += ctx.re(p.residue / (w - p.location) ** 2) / 2
    return acc


def ode_second_derivative(model: ElectrostaticModel, w):
    """``-(P1/P2)'(w)/2`` straight from the differential equation."""
    ctx = model.ctx
    w = _mp(ctx, w)
    p1, p2 = _eval(ctx, model.P1, w), _eval(ctx, model.P2, w)
    dp1, dp2 = _eval(ctx, model.P1.derivative(), w), _eval(ctx, model.P2.derivative(), w)
    return -(dp1 * p2 - p1 * dp2) / (2 * p2 * p2)


def energy(model: ElectrostaticModel, omega):
    """Total energy ``E(omega)``."""
    ctx, w = _prepare(model, omega)
    acc = ctx.mpf(0)
    for k, j in itertools.combinations(range(len(w)), 2):
        acc -= ctx.log(abs(w[j] - w[k]))
    for wk in w:
        acc += _external(model, ctx, wk)
    return acc


def gradient(model: ElectrostaticModel, omega) -> list:
    ctx, w = _prepare(model, omega)
    out = []
    for k, wk in enumerate(w):
        inter = ctx.fsum(1 / (wk - wi) for i, wi in enumerate(w) if i != k)
        out.append(-inter + _external_d1(model, ctx, wk))
    return out


def hessian(model: ElectrostaticModel, omega) -> list:
    """Symmetric Hessian of ``E`` as a list of rows."""
    ctx, w = _prepare(model, omega)
    n = len(w)
    h = [[ctx.mpf(0)] * n for _ in range(n)]
    for k, j in itertools.combinations(range(n), 2):
        v = -1 / (w[k] - w[j]) ** 2
        h[k][j] = h[j][k] = v
    for k in range(n):
        h[k][k] = -ctx.fsum(h[k][i] for i in range(n) if i != k) + external_second_derivative(model, w[k])
    return h


@dataclass(frozen=True)
class Classification:
    """``kind`` is ``LocalMin``, ``LocalMax``, ``Saddle`` or ``Degenerate``.

    ``negative_indices`` lists, for every negative eigenvalue, the 1-based
    coordinate that dominates its eigenvector.
    """

    kind: str
    negative_indices: tuple = ()
    reason: str = ""

    def __str__(self):
        if self.kind == "Saddle":
            return f"Saddle{{{', '.join(map(str, self.negative_indices))}}}"
        return self.kind


@dataclass(frozen=True)
class ConditionalResult:
    fixed: tuple
    free: tuple
    eigenvalues: tuple
    positive_definite: bool
    vacuous: bool


@dataclass
class ElectrostaticReport:
    model: ElectrostaticModel
    gradient: list
    gradient_residual: object
    hessian: list
    hessian_eigenvalues: list
    eigenvectors: list
    classification: Classification
    external_curvature: list = dc_field(default_factory=list)
    sufficient_condition: bool = False
    gershgorin_lower: object = None
    gershgorin_respected: bool | None = None
    conditional: ConditionalResult | None = None


def classify(model: ElectrostaticModel, conditional_fixed=None) -> ElectrostaticReport:
    """Hessian spectrum at the zeros of ``S_n`` and its sign pattern.

    The Gershgorin lower bound ``min_k H''(x_k)`` is reported whenever every
    ``H''(x_k)`` is positive.  A conditional problem is always solved: with the
    first ``m`` zeros fixed, where ``m`` is the number of non-positive
    eigenvalues, unless ``conditional_fixed`` says otherwise.
    """
    ctx = model.ctx
    bits = model.precision_bits
    zs = model.zeros
    if not (zs.all_real and zs.all_simple):
        return ElectrostaticReport(model, [], None, [], [], [], Classification("Degenerate", (), "zeros of S_n are not all real and simple"))
    w = [r.re for r in zs.roots]
    grad = gradient(model, w)
    h = hessian(model, w)
    vals, vecs, _ = jacobi_eigh(h, ctx, tol=ctx.ldexp(max(ctx.mpf(1), max(abs(v) for row in h for v in row)), -(bits // 2)))
    tol = ctx.ldexp(1, -(bits // 4))
    if any(abs(v) <= tol for v in vals):
        cls = Classification("Degenerate", (), "an eigenvalue is numerically zero")
    elif all(v > 0 for v in vals):
        cls = Classification("LocalMin")
    elif all(v < 0 for v in vals):
        cls = Classification("LocalMax", tuple(range(1, len(w) + 1)))
    else:
        neg = []
        for v, vec in zip(vals, vecs):
            if v < 0:
                neg.append(1 + max(range(len(vec)), key=lambda i: abs(vec[i])))
        cls = Classification("Saddle", tuple(sorted(neg)))
    curv = [external_second_derivative(model, wk) for wk in w]
    suff = all(c > 0 for c in curv)
    g_lower = min(curv) if curv else None
    respected = None
    if suff:
        respected = bool(vals[0] >= g_lower - ctx.ldexp(max(ctx.mpf(1), abs(g_lower)), -(bits // 2)))
    rep = ElectrostaticReport(
        model=model,
        gradient=grad,
        gradient_residual=max(abs(g) for g in grad),
        hessian=h,
        hessian_eigenvalues=vals,
        eigenvectors=vecs,
        classification=cls,
        external_curvature=curv,
        sufficient_condition=suff,
        gershgorin_lower=g_lower,
        gershgorin_respected=respected,
    )
    if conditional_fixed is None:
        m = sum(1 for v in vals if not v > tol)
        conditional_fixed = range(1, m + 1)
    rep.conditional = conditional_equilibrium(rep, conditional_fixed)
    return rep


def conditional_equilibrium(report: ElectrostaticReport, fixed) -> ConditionalResult:
    """Positive-definiteness of the Hessian restricted to the unfixed charges.

    ``fixed`` holds 1-based charge indices.
    """
    n = len(report.hessian)
    fixed = tuple(sorted(set(int(i) for i in fixed)))
    if any(not 1 <= i <= n for i in fixed):
        raise ValueError(f"fixed indices must lie in 1..{n}")
    free = tuple(i for i in range(1, n + 1) if i not in fixed)
    if not free:
        return ConditionalResult(fixed, free, (), True, True)
    sub = [[report.hessian[i - 1][j - 1] for j in free] for i in free]
    ctx = report.model.ctx
    vals, _, _ = jacobi_eigh(sub, ctx)
    pivots = ldl_pivots(sub)
    pd = len(pivots) == len(free) and all(p > 0 for p in pivots) and vals[0] > 0
    return ConditionalResult(fixed, free, tuple(vals), bool(pd), False)
