import mpmath
import pytest
from hypothesis import given, strategies as st

from conftest import PUBLISHED_EIGENVALUES, config, sequence
from lsob.config import load_config
from lsob.electrostatics import (
    build_model,
    classify,
    conditional_equilibrium,
    energy,
    external_second_derivative,
    gradient,
    hessian,
    ode_second_derivative,
)
from lsob.errors import PoleCollision
from lsob.structure import SobolevSequence

_MODELS = {}
_REPORTS = {}


def model(name, n=12):
    key = (name, n)
    if key not in _MODELS:
        seq = sequence(name)
        _MODELS[key] = build_model(seq.cfg, seq.bundle(n))
    return _MODELS[key]


def report(name):
    if name not in _REPORTS:
        _REPORTS[name] = classify(model(name))
    return _REPORTS[name]


def zeros(m):
    return [r.re for r in m.zeros.roots]


def test_classical_n1_energy_minimum_at_one():
    m = model("classical0", 1)
    ctx = m.ctx
    assert abs(zeros(m)[0] - 1) < ctx.ldexp(1, -200)
    e1 = energy(m, [1])
    for w in ("0.9", "1.1", "0.5", "3"):
        assert energy(m, [ctx.mpf(w)]) > e1
    assert abs(gradient(m, [1])[0]) < ctx.ldexp(1, -200)


def test_example1_charges_and_poles():
    m = model("example1")
    tol = m.ctx.ldexp(1, -200)
    assert abs(m.ell1 - 12) < tol
    assert list(m.ell2) == [0] and abs(m.ell2[0] - 3) < tol
    kinds = sorted(p.kind for p in m.poles)
    assert kinds.count("origin") == 1 and kinds.count("mass") == 1
    assert kinds.count("e") == 3
    locs = sorted(float(p.location.real if hasattr(p.location, "real") else p.location) for p in m.poles if p.kind == "e")
    assert locs == pytest.approx([-1.7501, -0.528573, 1.40334], abs=5e-5)
    u = sorted(float(r.re) for r in m.u_roots.roots)
    assert u == pytest.approx([-2.728, -1.272], abs=5e-4)


def test_u_poles_cancel():
    for name in ("example1", "example3", "example5"):
        m = model(name)
        assert all(v == 0 for v in m.ell3.values())
        assert not m.assumptions.residues_positive


@pytest.mark.parametrize("name", ["example1", "example2", "example3", "example4", "example5", "classical11"])
def test_zeros_are_critical_points(name):
    rep = report(name)
    assert rep.gradient_residual <= mpmath.mpf("1e-25")


def test_gradient_matches_finite_differences():
    m = model("example4")
    ctx = m.ctx
    w = [x + ctx.mpf(k + 1) / 37 for k, x in enumerate(zeros(m))]
    g = gradient(m, w)
    h = ctx.ldexp(1, -40)
    for k in range(len(w)):
        wp, wm = list(w), list(w)
        wp[k] += h
        wm[k] -= h
        fd = (energy(m, wp) - energy(m, wm)) / (2 * h)
        assert abs(fd - g[k]) <= mpmath.mpf("1e-10") * max(abs(v) for v in g)


def test_hessian_matches_finite_differences_of_gradient():
    m = model("example5")
    ctx = m.ctx
    w = [x + ctx.mpf(1) / 101 for x in zeros(m)]
    hs = hessian(m, w)
    h = ctx.ldexp(1, -40)
    for k in (0, 3, 11):
        wp, wm = list(w), list(w)
        wp[k] += h
        wm[k] -= h
        gp, gm = gradient(m, wp), gradient(m, wm)
        for j in range(len(w)):
            fd = (gp[j] - gm[j]) / (2 * h)
            assert abs(fd - hs[j][k]) <= mpmath.mpf("1e-10") * max(1, abs(hs[j][k]))


@pytest.mark.parametrize("name", ["example1", "example5"])
def test_external_second_derivative_agrees_with_ode(name):
    m = model(name)
    ctx = m.ctx
    for w in (ctx.mpf("0.37"), ctx.mpf(5), ctx.mpf("23.5"), ctx.mpf("-3.3")):
        a, b = external_second_derivative(m, w), ode_second_derivative(m, w)
        assert abs(a - b) <= ctx.ldexp(max(1, abs(b)), -128)


def test_classical_external_curvature():
    m = model("classical11")
    ctx = m.ctx
    for w in zeros(m):
        want = ctx.mpf(12) / (2 * w * w)
        assert abs(external_second_derivative(m, w) - want) <= ctx.ldexp(want, -200)


def test_hessian_symmetric_and_permutation_invariant_energy():
    m = model("example3")
    w = zeros(m)
    h = hessian(m, w)
    assert all(h[i][j] == h[j][i] for i in range(12) for j in range(12))
    perm = w[::-1]
    assert abs(energy(m, w) - energy(m, perm)) <= m.ctx.ldexp(1, -200)


@pytest.mark.parametrize("name", ["example1", "example4", "example5"])
def test_eigenvalues_match_published(name):
    vals = [float(v) for v in report(name).hessian_eigenvalues]
    assert vals == pytest.approx(PUBLISHED_EIGENVALUES[name], abs=1e-3, rel=2e-4)


def test_classifications():
    assert report("example1").classification.kind == "LocalMin"
    assert report("example4").classification.kind == "LocalMin"
    assert report("classical11").classification.kind == "LocalMin"
    c = report("example5").classification
    assert c.kind == "Saddle" and c.negative_indices == (1, 2)
    assert str(c) == "Saddle{1, 2}"


def test_example5_conditional_problem():
    rep = report("example5")
    assert rep.conditional.fixed == (1, 2)
    assert rep.conditional.positive_definite
    bad = conditional_equilibrium(rep, [5])
    assert not bad.positive_definite
    everything = conditional_equilibrium(rep, range(1, 13))
    assert everything.vacuous and everything.positive_definite
    with pytest.raises(ValueError):
        conditional_equilibrium(rep, [13])


def test_classical_sufficient_condition_and_gershgorin():
    rep = report("classical11")
    assert rep.sufficient_condition
    assert rep.gershgorin_respected


def test_pole_collision():
    m = model("example1")
    w = zeros(m)
    with pytest.raises(PoleCollision):
        energy(m, [0] + w[1:])
    with pytest.raises(PoleCollision):
        gradient(m, [w[1]] + w[1:])


def test_float_mode_matches_rational():
    run = load_config("example5", env={})
    seq = SobolevSequence(run.sobolev.with_mode("float", 256))
    m = build_model(seq.cfg, seq.bundle(12))
    rep = classify(m)
    ref = report("example5").hessian_eigenvalues
    for a, b in zip(rep.hessian_eigenvalues, ref):
        assert abs(a - b) <= mpmath.mpf("1e-30") * max(1, abs(b))


@given(st.permutations(list(range(6))))
def test_energy_symmetric_under_permutation(order):
    m = model("classical0", 6)
    w = zeros(m)
    shifted = [x + m.ctx.mpf(1) / 7 for x in w]
    perm = [shifted[i] for i in order]
    assert abs(energy(m, shifted) - energy(m, perm)) <= m.ctx.ldexp(1, -200)
