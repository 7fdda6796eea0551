import pytest

from conftest import CLASSICAL, EXAMPLES, config, sequence
from lsob.errors import IdentityViolation, NonPolynomialResult
from lsob.poly import Polynomial
from lsob.structure import (
    SobolevSequence,
    build_rho,
    check_identity,
    classical_tables,
    ladder_apply,
    lcoef_ledger,
    ode_residual,
    raise_from_constant,
    ttrr_residual,
)

X = Polynomial.x()
ALL = EXAMPLES + CLASSICAL + ["intro"]


def test_rho_for_two_masses():
    r = build_rho(config("example5"))
    assert r.rho == (X + 1) ** 2 * (X + 2) ** 3
    assert r.rho_N == (X + 1) * (X + 2)
    assert r.rho_dN == (X + 1) * (X + 2) ** 2
    assert r.rho_jk[(1, 2)] == (X + 1) ** 2
    assert r.drho == r.rho.derivative()


def test_rho_classical_is_one():
    assert build_rho(config("classical0")).rho == Polynomial.one()


def test_check_identity_raises_with_residual():
    with pytest.raises(IdentityViolation) as err:
        check_identity("demo", X, X + 1)
    assert err.value.residual is not None


@pytest.mark.parametrize("name", ALL)
def test_connection_identities(name):
    seq = sequence(name)
    for n in range(0, 13):
        c = seq.connection(n)
        rs = seq.rho.rho * seq.S(n).poly
        lhs2 = c.F2 * seq.fam.poly(n) + (c.G2 * seq.fam.poly(n - 1) if n else 0)
        assert lhs2 == rs
        lhs3 = c.F3 * seq.fam.poly(n) + (c.G3 * seq.fam.poly(n - 1) if n else 0)
        assert lhs3 == X * rs.derivative()


@pytest.mark.parametrize("name", ALL)
def test_bundles_and_ledger(name):
    seq = sequence(name)
    for n in range(1, 13):
        b = seq.bundle(n)
        bad = [e.name for e in lcoef_ledger(b) if not e.passed]
        assert not bad, (n, bad)
        assert ode_residual(b, seq.S(n)).is_zero()


def test_ledger_has_all_entries():
    names = {e.name for e in lcoef_ledger(sequence("example1").bundle(5))}
    for want in ("F2", "G2", "F3", "G3", "V2", "W2", "V3", "W3", "q0", "q1", "q2", "q3", "q4", "P2", "P1", "P0"):
        assert want in names


def test_intro_bundle_n2():
    b = sequence("intro").bundle(2)
    assert b.S == X * X - 2
    assert b.rho.rho == (X + 2) ** 2
    # Delta is divisible by rho by construction; delta is its quotient
    assert b.Delta == b.rho.rho * b.delta


@pytest.mark.parametrize("name", CLASSICAL)
def test_classical_tables(name):
    seq = sequence(name)
    for n in range(1, 13):
        table = classical_tables(seq.bundle(n), seq.fam)
        assert all(table.values()), (n, [k for k, v in table.items() if not v])


@pytest.mark.parametrize("name", ALL)
def test_three_term_recurrence(name):
    seq = sequence(name)
    for n in range(1, 12):
        r = ttrr_residual(seq.bundle(n), seq.bundle(n + 1), seq.S(n - 1), seq.S(n), seq.S(n + 1))
        assert r.is_zero()


@pytest.mark.parametrize("name", ["example1", "example3", "example5"])
def test_ladder_round_trip(name):
    seq = sequence(name)
    for n in range(1, 13):
        b = seq.bundle(n)
        assert ladder_apply(b, "down", seq.S(n).poly) == seq.S(n - 1).poly
        assert ladder_apply(b, "up", seq.S(n - 1).poly) == seq.S(n).poly


def test_ladder_rejects_non_polynomial_result():
    b = sequence("example1").bundle(4)
    with pytest.raises(NonPolynomialResult):
        ladder_apply(b, "up", X ** 7 + 3)
    with pytest.raises(ValueError):
        ladder_apply(b, "sideways", X)


def test_raise_from_constant_n1_and_intro():
    assert raise_from_constant(sequence("example1"), 1) == X - 12
    assert raise_from_constant(sequence("intro"), 2) == X * X - 2


@pytest.mark.parametrize("name", EXAMPLES)
def test_raise_from_constant_to_twelve(name):
    seq = sequence(name)
    assert raise_from_constant(seq, 12) == seq.S(12).poly


def test_bundle_n0_rejected():
    with pytest.raises(ValueError):
        sequence("example1").bundle(0)


def test_float_mode_bundles():
    cfg = config("example5").with_mode("float", 256)
    seq = SobolevSequence(cfg)
    for n in range(1, 9):
        b = seq.bundle(n)
        assert all(e.passed for e in lcoef_ledger(b))
