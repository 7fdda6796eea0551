"""Dense univariate polynomials over exact rationals or big floats.

Two scalar fields are available behind one small interface:

* :data:`RATIONAL` -- :class:`fractions.Fraction`, always gcd-reduced.
* :func:`float_field` -- mpmath big floats living in a private
  :class:`mpmath.MPContext`, so every value of one field shares one precision
  and nothing touches the global ``mpmath.mp`` state.

Polynomials store coefficients in ascending degree order.  The zero
polynomial has an empty coefficient tuple and degree -1.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from mpmath import MPContext

from .errors import InexactDivision, ModeMismatch

__all__ = [
    "RATIONAL",
    "RationalField",
    "FloatField",
    "float_field",
    "ComplexScalar",
    "Polynomial",
    "Division",
    "poly_arith",
    "poly_derivative",
    "poly_eval",
    "taylor_poly",
    "exact_divide",
]


class RationalField:
    """Exact rationals backed by :class:`fractions.Fraction`."""

    mode = "rational"
    precision_bits = None
    exact = True

    def __call__(self, value) -> Fraction:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, str)):
            return Fraction(value)
        if hasattr(value, "_mpf_"):
            raise ModeMismatch("refusing to convert a big float into an exact rational")
        if isinstance(value, float):
            return Fraction(value)
        raise TypeError(f"cannot convert {value!r} to a rational")

    def is_zero(self, value) -> bool:
        return value == 0

    def abs(self, value):
        return abs(value)

    def tolerance(self, scale=1):
        return 0

    def __repr__(self):
        return "RationalField()"

    def __reduce__(self):
        return (_rational_field, ())


def _rational_field():
    return RATIONAL


RATIONAL = RationalField()


class FloatField:
    """Big floats with a fixed mantissa length, isolated in their own context."""

    mode = "float"
    exact = False

    def __init__(self, precision_bits: int):
        if precision_bits < 16:
            raise ValueError("precision_bits must be at least 16")
        self.precision_bits = int(precision_bits)
        self.ctx = MPContext()
        self.ctx.prec = self.precision_bits

    def __call__(self, value):
        ctx = self.ctx
        if isinstance(value, Fraction):
            return ctx.mpf(value.numerator) / value.denominator
        if isinstance(value, (int, float, str)) or hasattr(value, "_mpf_"):
            return ctx.mpf(value)
        raise TypeError(f"cannot convert {value!r} to a big float")

    def is_zero(self, value) -> bool:
        return value == 0

    def abs(self, value):
        return abs(value)

    def tolerance(self, scale=1):
        """Relative tolerance 2^(-precision/2) applied to ``scale``."""
        return self.ctx.ldexp(self(scale), -(self.precision_bits // 2))

    def __repr__(self):
        return f"FloatField({self.precision_bits})"

    def __reduce__(self):
        return (float_field, (self.precision_bits,))


@functools.lru_cache(maxsize=None)
def float_field(precision_bits: int = 256) -> FloatField:
    """Return the shared :class:`FloatField` for ``precision_bits``."""
    return FloatField(precision_bits)


def _same_field(a, b):
    if a is not b:
        raise ModeMismatch(f"scalar field mismatch: {a!r} vs {b!r}")


@dataclass(frozen=True)
class ComplexScalar:
    """Complex number built from two scalars of one field."""

    re: object
    im: object

    def __add__(self, other):
        return ComplexScalar(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return ComplexScalar(self.re - other.re, self.im - other.im)

    def __mul__(self, other):
        if isinstance(other, ComplexScalar):
            return ComplexScalar(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return ComplexScalar(self.re * other, self.im * other)

    def conjugate(self):
        return ComplexScalar(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0


class Polynomial:
    """Immutable dense polynomial ``sum(coeffs[i] * x**i)`` over one field."""

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs: Iterable = (), field=RATIONAL):
        cs = [field(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "field", field)

    @classmethod
    def _raw(cls, coeffs: list, field) -> "Polynomial":
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        p = object.__new__(cls)
        object.__setattr__(p, "coeffs", tuple(coeffs))
        object.__setattr__(p, "field", field)
        return p

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    def __reduce__(self):
        return (Polynomial, (self.coeffs, self.field))

    # constructors

    @classmethod
    def zero(cls, field=RATIONAL):
        return cls._raw([], field)

    @classmethod
    def constant(cls, c, field=RATIONAL):
        return cls._raw([field(c)], field)

    @classmethod
    def one(cls, field=RATIONAL):
        return cls.constant(1, field)

    @classmethod
    def x(cls, field=RATIONAL):
        return cls._raw([field(0), field(1)], field)

    @classmethod
    def monomial(cls, k: int, field=RATIONAL, c=1):
        return cls._raw([field(0)] * k + [field(c)], field)

    @classmethod
    def linear(cls, root, field=RATIONAL):
        """The monic linear factor ``x - root``."""
        return cls._raw([-field(root), field(1)], field)

    @classmethod
    def from_roots(cls, roots: Iterable, field=RATIONAL):
        p = cls.one(field)
        for r in roots:
            p = p * cls.linear(r, field)
        return p

    # basic properties

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self):
        """Leading coefficient; zero for the zero polynomial."""
        return self.coeffs[-1] if self.coeffs else self.field(0)

    def lcoef(self):
        """``(degree, leading coefficient)``."""
        return self.degree, self.lc

    def coeff(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else self.field(0)

    def norm_inf(self):
        if not self.coeffs:
            return self.field(0)
        return max(abs(c) for c in self.coeffs)

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            _same_field(self.field, other.field)
            return other
        return Polynomial._raw([self.field(other)], self.field)

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Polynomial._raw(out, self.field)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw([-c for c in self.coeffs], self.field)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            s = self.field(other)
            if s == 0:
                return Polynomial.zero(self.field)
            return Polynomial._raw([c * s for c in self.coeffs], self.field)
        _same_field(self.field, other.field)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial.zero(self.field)
        zero = self.field(0)
        out = [zero] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return Polynomial._raw(out, self.field)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, Polynomial):
            return exact_divide(self, scalar).quotient
        s = self.field(scalar)
        return Polynomial._raw([c / s for c in self.coeffs], self.field)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.one(self.field)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __divmod__(self, other):
        d = divmod_poly(self, other)
        return d.quotient, d.remainder

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.field is other.field and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(other, self.field)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.mode, self.coeffs))

    # calculus and evaluation

    def derivative(self, k: int = 1) -> "Polynomial":
        if k < 0:
            raise ValueError("derivative order must be nonnegative")
        cs = list(self.coeffs)
        for _ in range(k):
            if not cs:
                break
            cs = [c * i for i, c in enumerate(cs)][1:]
        return Polynomial._raw(cs, self.field)

    def __call__(self, x):
        """Horner evaluation at a real scalar of the polynomial's field."""
        if isinstance(x, ComplexScalar):
            return poly_eval(self, x)
        if isinstance(x, (int, Fraction, float, str)):
            x = self.field(x)
        acc = self.field(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivatives_at(self, x, k: int) -> list:
        """``[p(x), p'(x), ..., p^(k)(x)]`` via repeated synthetic division."""
        x = self.field(x)
        cs = list(self.coeffs)
        out = []
        fact = 1
        for nu in range(k + 1):
            if not cs:
                out.append(self.field(0))
                continue
            # one synthetic-division pass yields the Taylor coefficient c_nu
            acc = self.field(0)
            nxt = []
            for c in reversed(cs):
                acc = acc * x + c
                nxt.append(acc)
            taylor = nxt.pop()
            nxt.reverse()
            cs = nxt
            out.append(taylor * fact)
            fact *= nu + 1
        return out

    def to_field(self, field) -> "Polynomial":
        if field is self.field:
            return self
        return Polynomial(self.coeffs, field)

    def chop(self, rel_tol=None) -> "Polynomial":
        """Drop leading float coefficients that are negligible relative to the sup-norm."""
        if self.field.exact or not self.coeffs:
            return self
        tol = rel_tol if rel_tol is not None else self.field.tolerance(self.norm_inf())
        cs = list(self.coeffs)
        while cs and abs(cs[-1]) <= tol:
            cs.pop()
        return Polynomial._raw(cs, self.field)

    def monic(self) -> "Polynomial":
        return self / self.lc

    def __repr__(self):
        return f"Polynomial({[str(c) for c in self.coeffs]}, {self.field!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and c == 1:
                terms.append(f"+ {mono}")
            elif mono and c == -1:
                terms.append(f"- {mono}")
            else:
                sign = "-" if c < 0 else "+"
                mag = str(abs(c))
                terms.append(f"{sign} {mag}*{mono}" if mono else f"{sign} {mag}")
        s = " ".join(terms)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


class Division(NamedTuple):
    quotient: Polynomial
    remainder: Polynomial


def divmod_poly(num: Polynomial, den: Polynomial) -> Division:
    _same_field(num.field, den.field)
    if den.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    field = num.field
    r = list(num.coeffs)
    dd = den.degree
    lc = den.lc
    if len(r) <= dd:
        return Division(Polynomial.zero(field), num)
    q = [field(0)] * (len(r) - dd)
    for i in range(len(r) - dd - 1, -1, -1):
        t = r[i + dd] / lc
        q[i] = t
        if t != 0:
            for j, c in enumerate(den.coeffs):
                r[i + j] -= t * c
        r[i + dd] = field(0)
    return Division(Polynomial._raw(q, field), Polynomial._raw(r[:dd], field))


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    """Ring operation ``op`` in {"add", "sub", "mul"} (or ``+``, ``-``, ``*``)."""
    _same_field(a.field, b.field)
    if op in ("add", "+"):
        return a + b
    if op in ("sub", "-"):
        return a - b
    if op in ("mul", "*"):
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def poly_derivative(p: Polynomial, k: int = 1) -> Polynomial:
    return p.derivative(k)


def poly_eval(p: Polynomial, z) -> ComplexScalar:
    """Horner evaluation at a complex point.

    ``z`` may be a :class:`ComplexScalar`, a ``(re, im)`` pair, a Python
    ``complex`` or a real scalar.
    """
    if isinstance(z, tuple):
        z = ComplexScalar(p.field(z[0]), p.field(z[1]))
    elif isinstance(z, complex):
        z = ComplexScalar(p.field(z.real), p.field(z.imag))
    elif not isinstance(z, ComplexScalar):
        z = ComplexScalar(p.field(z), p.field(0))
    acc = ComplexScalar(p.field(0), p.field(0))
    for c in reversed(p.coeffs):
        acc = acc * z
        acc = ComplexScalar(acc.re + c, acc.im)
    return acc


def taylor_poly(f: Polynomial, y, k: int) -> Polynomial:
    """Taylor polynomial of degree ``k`` of ``f`` centred at ``y``."""
    field = f.field
    y = field(y)
    derivs = f.derivatives_at(y, k)
    shift = Polynomial.linear(y, field)
    out = Polynomial.zero(field)
    power = Polynomial.one(field)
    for nu, dv in enumerate(derivs):
        if dv != 0:
            out = out + power * (dv / math.factorial(nu))
        power = power * shift
    return out


def exact_divide(num: Polynomial, den: Polynomial) -> Division:
    """Divide ``num`` by ``den`` where the division is known to be exact.

    Rational mode demands a zero remainder.  Float mode accepts a remainder
    whose sup-norm is at most ``2**(-precision_bits/2) * ||num||``; the
    remainder is returned for diagnostics either way.
    """
    d = divmod_poly(num, den)
    if d.remainder.is_zero():
        return d
    if num.field.exact:
        raise InexactDivision(f"remainder {d.remainder} dividing by {den}", d.remainder)
    if d.remainder.norm_inf() > num.field.tolerance(num.norm_inf()):
        raise InexactDivision(
            f"remainder norm {d.remainder.norm_inf()} exceeds tolerance", d.remainder
        )
    return d


def poly_from_strings(values: Sequence[str], field=RATIONAL) -> Polynomial:
    return Polynomial([field(v) for v in values], field)
