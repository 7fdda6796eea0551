"""Small dense linear algebra over the lsob scalar fields.

Everything here works on plain lists of lists so the same code serves
``Fraction`` and mpmath values.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import SingularSystem

__all__ = ["solve", "solve_rational_bareiss", "solve_float_pivoting", "ldl_pivots", "jacobi_eigh"]


def solve(a, b, field):
    """Solve ``a x = b``; exact fraction-free elimination for rationals."""
    if field.exact:
        return solve_rational_bareiss(a, b)
    return solve_float_pivoting(a, b, field)


def solve_rational_bareiss(a, b):
    n = len(a)
    if n == 0:
        return []
    # clear denominators row by row so Bareiss runs on integers
    rows = []
    for i in range(n):
        row = [Fraction(v) for v in a[i]] + [Fraction(b[i])]
        lcm = 1
        for v in row:
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
        rows.append([int(v * lcm) for v in row])
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for s in range(k + 1, n):
                if rows[s][k] != 0:
                    rows[k], rows[s] = rows[s], rows[k]
                    break
            else:
                raise SingularSystem(f"zero pivot column {k}")
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                rows[i][j] = (rows[i][j] * rows[k][k] - rows[i][k] * rows[k][j]) // prev
            rows[i][k] = 0
        prev = rows[k][k]
    if rows[n - 1][n - 1] == 0:
        raise SingularSystem("matrix is singular")
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Fraction(rows[i][n])
        for j in range(i + 1, n):
            acc -= rows[i][j] * x[j]
        x[i] = acc / rows[i][i]
    return x


def solve_float_pivoting(a, b, field):
    n = len(a)
    m = [[field(v) for v in a[i]] + [field(b[i])] for i in range(n)]
    scale = max((abs(v) for row in m for v in row[:n]), default=field(0))
    tiny = field.ctx.ldexp(scale, -field.precision_bits + 4)
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(m[i][k]))
        if abs(m[p][k]) <= tiny:
            raise SingularSystem(f"numerically singular at column {k}")
        m[k], m[p] = m[p], m[k]
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            for j in range(k, n + 1):
                m[i][j] -= f * m[k][j]
    x = [field(0)] * n
    for i in range(n - 1, -1, -1):
        acc = m[i][n]
        for j in range(i + 1, n):
            acc -= m[i][j] * x[j]
        x[i] = acc / m[i][i]
    return x


def ldl_pivots(a):
    """Diagonal of the LDL^T factorization of a symmetric matrix (no pivoting).

    A symmetric matrix is positive definite iff every returned pivot is
    positive; the factorization stops at the first nonpositive pivot.
    """
    n = len(a)
    m = [list(row) for row in a]
    pivots = []
    for k in range(n):
        piv = m[k][k]
        pivots.append(piv)
        if not piv > 0:
            break
        for i in range(k + 1, n):
            f = m[i][k] / piv
            for j in range(k + 1, n):
                m[i][j] = m[i][j] - f * m[k][j]
    return pivots


def jacobi_eigh(a, ctx, tol=None, max_sweeps=100):
    """Cyclic Jacobi eigensolver for a real symmetric matrix.

    Parameters
    ----------
    a : list of lists
        Symmetric matrix with entries in ``ctx``.
    ctx : mpmath.MPContext
        Arithmetic context.
    tol : mpf, optional
        Stop when the off-diagonal Frobenius norm drops to ``tol``;
        defaults to ``2**(-prec/2)`` times the matrix norm.

    Returns
    -------
    (eigenvalues, eigenvectors, off_norm)
        Eigenvalues ascending; ``eigenvectors[i]`` is the unit vector for
        ``eigenvalues[i]``.
    """
    n = len(a)
    m = [[ctx.mpf(v) for v in row] for row in a]
    v = [[ctx.mpf(1) if i == j else ctx.mpf(0) for j in range(n)] for i in range(n)]
    frob = ctx.sqrt(ctx.fsum(x * x for row in m for x in row))
    if tol is None:
        tol = ctx.ldexp(frob if frob else ctx.mpf(1), -(ctx.prec // 2))

    def off_norm():
        return ctx.sqrt(ctx.fsum(2 * m[i][j] ** 2 for i in range(n) for j in range(i + 1, n)))

    off = off_norm()
    sweeps = 0
    # keep rotating a little past the requested tolerance; each sweep is cheap
    target = ctx.ldexp(frob if frob else ctx.mpf(1), -ctx.prec + 8)
    while off > target and sweeps < max_sweeps:
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p][q]
                if apq == 0:
                    continue
                theta = (m[q][q] - m[p][p]) / (2 * apq)
                t = ctx.sign(theta) / (abs(theta) + ctx.sqrt(theta * theta + 1)) if theta != 0 else ctx.mpf(1)
                c = 1 / ctx.sqrt(t * t + 1)
                s = t * c
                for k in range(n):
                    mkp, mkq = m[k][p], m[k][q]
                    m[k][p] = c * mkp - s * mkq
                    m[k][q] = s * mkp + c * mkq
                for k in range(n):
                    mpk, mqk = m[p][k], m[q][k]
                    m[p][k] = c * mpk - s * mqk
                    m[q][k] = s * mpk + c * mqk
                for k in range(n):
                    vkp, vkq = v[k][p], v[k][q]
                    v[k][p] = c * vkp - s * vkq
                    v[k][q] = s * vkp + c * vkq
        off = off_norm()
    if off > tol:
        raise ArithmeticError(f"Jacobi did not converge: off-diagonal norm {off}")
    order = sorted(range(n), key=lambda i: m[i][i])
    values = [m[i][i] for i in order]
    vectors = [[v[k][i] for k in range(n)] for i in order]
    return values, vectors, off
