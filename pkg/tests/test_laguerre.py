import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from lsob.errors import GammaUnavailable
from lsob.laguerre import (
    LaguerreFamily,
    classical_ladder,
    classical_ode_residual,
    explicit_laguerre,
    laguerre_family,
    laguerre_monic,
    laguerre_norm,
)
from lsob.poly import Polynomial, float_field

X = Polynomial.x()


def test_low_degrees():
    assert laguerre_monic(laguerre_family(0), 0) == Polynomial.one()
    assert laguerre_monic(laguerre_family(0), 1) == X - 1
    assert laguerre_monic(laguerre_family(11), 1) == X - 12


def test_degree_twelve_is_monic():
    p = laguerre_family(11).poly(12)
    assert p.degree == 12 and p.is_monic()


@pytest.mark.parametrize("alpha", [0, 11, 14, Fraction(1, 2)])
def test_recurrence_matches_explicit_sum(alpha):
    fam = LaguerreFamily(alpha)
    for n in range(9):
        assert fam.poly(n) == explicit_laguerre(alpha, n)


def test_norms():
    assert laguerre_norm(laguerre_family(0), 2) == 4
    assert laguerre_norm(laguerre_family(11), 0) == math.factorial(11)


@pytest.mark.parametrize("alpha,n", [(0, 3), (11, 4), (Fraction(1, 2), 3)])
def test_norm_against_quadrature(alpha, n):
    # independent oracle: numerical integral of L_n^2 x^alpha e^-x
    f = float_field(113)
    fam = laguerre_family(alpha, f)
    p = fam.poly(n)
    with mpmath.workprec(113):
        a = mpmath.mpf(alpha.numerator) / alpha.denominator if isinstance(alpha, Fraction) else mpmath.mpf(alpha)
        val = mpmath.quad(lambda t: mpmath.mpf(p(t)) ** 2 * t ** a * mpmath.exp(-t), [0, 1, 10, 50, mpmath.inf])
    assert abs(val - fam.norm(n)) < mpmath.mpf(10) ** -20 * fam.norm(n)


def test_orthogonality_from_moments():
    fam = laguerre_family(3)
    for m in range(6):
        for k in range(m):
            prod = fam.poly(m) * fam.poly(k)
            assert sum(c * fam.moment(i) for i, c in enumerate(prod.coeffs)) == 0


def test_gamma_unavailable_for_half_integer_alpha():
    with pytest.raises(GammaUnavailable):
        LaguerreFamily(Fraction(1, 2)).norm(0)
    f = float_field(64)
    assert abs(LaguerreFamily(Fraction(1, 2), f).norm(0) - f.ctx.sqrt(f.ctx.pi) / 2) < f.tolerance()


def test_alpha_must_exceed_minus_one():
    with pytest.raises(ValueError):
        LaguerreFamily(-1)


def test_classical_ladder():
    fam = laguerre_family(0)
    assert classical_ladder(fam, 1, "up", Polynomial.one()) == X - 1
    fam11 = laguerre_family(11)
    for n in range(1, 10):
        assert classical_ladder(fam11, n, "down", fam11.poly(n)) == fam11.poly(n - 1)
        assert classical_ladder(fam11, n, "up", fam11.poly(n - 1)) == fam11.poly(n)
    with pytest.raises(ValueError):
        classical_ladder(fam, 1, "sideways", X)


def test_classical_ode_residual():
    assert classical_ode_residual(laguerre_family(11), 12).is_zero()


@given(st.integers(min_value=0, max_value=20), st.integers(min_value=1, max_value=10))
def test_three_term_recurrence_property(alpha, n):
    fam = laguerre_family(alpha)
    lhs = fam.poly(n + 1)
    rhs = (X - fam.beta(n)) * fam.poly(n) - fam.poly(n - 1) * fam.gamma(n)
    assert lhs == rhs
    assert classical_ode_residual(fam, n).is_zero()
