"""Monic Laguerre polynomials, their norms, ladder operators and ODE."""

from __future__ import annotations

import functools
import math
import threading
from fractions import Fraction

from .errors import GammaUnavailable, IdentityViolation
from .poly import RATIONAL, Polynomial

__all__ = [
    "LaguerreFamily",
    "laguerre_family",
    "laguerre_monic",
    "laguerre_norm",
    "classical_ladder",
    "classical_ode_residual",
    "explicit_laguerre",
]

# degree at which the recurrence is first cross-checked against the explicit sum
_CROSS_CHECK_DEGREE = 6


class LaguerreFamily:
    """Monic Laguerre polynomials ``L_n^alpha`` with a grow-only cache.

    The polynomials come from the three-term recurrence
    ``L_{n+1} = (x - beta_n) L_n - gamma_n L_{n-1}`` with
    ``beta_n = 2n + alpha + 1`` and ``gamma_n = n (n + alpha)``.
    """

    def __init__(self, alpha, field=RATIONAL):
        self.field = field
        self.alpha = field(alpha)
        if not self.alpha > -1:
            raise ValueError(f"alpha must exceed -1, got {alpha}")
        self._polys = [Polynomial.one(field)]
        self._gamma_base = None
        self._checked = False
        self._lock = threading.Lock()

    def __repr__(self):
        return f"LaguerreFamily(alpha={self.alpha}, field={self.field!r})"

    def beta(self, n: int):
        return self.field(2 * n + 1) + self.alpha

    def gamma(self, n: int):
        return n * (n + self.alpha)

    def poly(self, n: int) -> Polynomial:
        if n < 0:
            raise ValueError("degree must be nonnegative")
        if n >= len(self._polys):
            with self._lock:
                x = Polynomial.x(self.field)
                while len(self._polys) <= n:
                    k = len(self._polys) - 1
                    nxt = (x - self.beta(k)) * self._polys[k]
                    if k >= 1:
                        nxt = nxt - self._polys[k - 1] * self.gamma(k)
                    self._polys.append(nxt)
                if not self._checked and len(self._polys) > _CROSS_CHECK_DEGREE:
                    self._cross_check(_CROSS_CHECK_DEGREE)
        return self._polys[n]

    def _cross_check(self, n):
        explicit = explicit_laguerre(self.alpha, n, self.field)
        diff = self._polys[n] - explicit
        if self.field.exact:
            ok = diff.is_zero()
        else:
            ok = diff.norm_inf() <= self.field.tolerance(explicit.norm_inf())
        if not ok:
            raise IdentityViolation(f"Laguerre recurrence disagrees with explicit sum at n={n}", diff)
        self._checked = True

    def gamma_alpha_plus_one(self):
        """``Gamma(alpha + 1)`` in the family's field."""
        if self._gamma_base is None:
            if self.field.exact:
                a = self.alpha
                if a.denominator != 1 or a < 0:
                    raise GammaUnavailable(
                        f"Gamma({a} + 1) is not rational; use float mode for non-integer alpha"
                    )
                self._gamma_base = Fraction(math.factorial(int(a)))
            else:
                self._gamma_base = self.field.ctx.gamma(self.alpha + 1)
        return self._gamma_base

    def shifted_gamma(self, m: int):
        """``Gamma(alpha + 1 + m)`` via ``Gamma(z + 1) = z Gamma(z)``."""
        g = self.gamma_alpha_plus_one()
        for i in range(1, m + 1):
            g = g * (self.alpha + i)
        return g

    @functools.lru_cache(maxsize=None)
    def moment(self, k: int):
        """``int_0^inf x^k x^alpha e^{-x} dx = Gamma(alpha + k + 1)``."""
        if k == 0:
            return self.gamma_alpha_plus_one()
        return self.moment(k - 1) * (self.alpha + k)

    @functools.lru_cache(maxsize=None)
    def norm(self, n: int):
        """``h_n = n! Gamma(n + alpha + 1)``."""
        return math.factorial(n) * self.moment(n)


@functools.lru_cache(maxsize=None)
def laguerre_family(alpha, field=RATIONAL) -> LaguerreFamily:
    """Shared family per ``(alpha, field)``."""
    return LaguerreFamily(alpha, field)


def explicit_laguerre(alpha, n: int, field=RATIONAL) -> Polynomial:
    """``(-1)^n n! sum_k binom(n+alpha, n-k) (-x)^k / k!`` with generalized binomials."""
    alpha = field(alpha)
    coeffs = []
    for k in range(n + 1):
        m = n - k
        binom = field(1)
        for i in range(m):
            binom = binom * (n + alpha - i)
        binom = binom / math.factorial(m)
        c = binom * ((-1) ** (n + k) * math.factorial(n)) / math.factorial(k)
        coeffs.append(c)
    return Polynomial(coeffs, field)


def laguerre_monic(fam: LaguerreFamily, n: int) -> Polynomial:
    return fam.poly(n)


def laguerre_norm(fam: LaguerreFamily, n: int):
    return fam.norm(n)


def classical_ladder(fam: LaguerreFamily, n: int, direction: str, p: Polynomial) -> Polynomial:
    """Apply the lowering or raising Laguerre operator of index ``n`` to ``p``.

    ``down`` is ``(x/gamma_n) d/dx - (n/gamma_n)`` and maps ``L_n`` to ``L_{n-1}``;
    ``up`` is ``-x d/dx + (x - n - alpha)`` and maps ``L_{n-1}`` to ``L_n``.
    """
    if n < 1:
        raise ValueError("ladder index must be >= 1")
    x = Polynomial.x(fam.field)
    if direction == "down":
        g = fam.gamma(n)
        return (x * p.derivative() - p * n) / g
    if direction == "up":
        return -(x * p.derivative()) + (x - fam.field(n) - fam.alpha) * p
    raise ValueError(f"direction must be 'down' or 'up', got {direction!r}")


def classical_ode_residual(fam: LaguerreFamily, n: int) -> Polynomial:
    """``x Y'' + (alpha + 1 - x) Y' + n Y`` for ``Y = L_n^alpha``."""
    y = fam.poly(n)
    x = Polynomial.x(fam.field)
    return x * y.derivative(2) + (fam.alpha + 1 - x) * y.derivative() + y * n
