"""Exact rational linear algebra and a small simplex solver.

Everything here works on :class:`fractions.Fraction`; nothing rounds.
The simplex uses Bland's rule, so it terminates on degenerate problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def to_fractions(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = to_fractions(rows)
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0


def primitive(values: Sequence[Fraction]) -> list[int]:
    """Scale a rational vector to coprime integers (direction preserved)."""
    fr = [Fraction(v) for v in values]
    den = 1
    for v in fr:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in fr]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    if g == 0:
        return ints
    return [v // g for v in ints]


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: list[Fraction] | None = None
    value: Fraction | None = None
    # Farkas vector for infeasible problems: y.A <= 0 componentwise and y.b > 0
    farkas: list[Fraction] | None = None


def solve_lp(c: Sequence, a_eq: Sequence[Sequence], b_eq: Sequence) -> LPResult:
    """Minimise ``c.x`` subject to ``a_eq x = b_eq``, ``x >= 0``, exactly."""
    A = to_fractions(a_eq)
    b = [Fraction(v) for v in b_eq]
    cost = [Fraction(v) for v in c]
    m, n = len(A), len(cost)
    sign = [1] * m
    for i in range(m):
        if b[i] < 0:
            sign[i] = -1
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]

    # tableau columns: n structural, m artificial, then rhs
    T = [A[i] + [Fraction(int(i == j)) for j in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]

    def pivot(r: int, col: int) -> None:
        inv = 1 / T[r][col]
        T[r] = [v * inv for v in T[r]]
        for i in range(m):
            if i != r and T[i][col] != 0:
                f = T[i][col]
                T[i] = [a - f * p for a, p in zip(T[i], T[r])]
        basis[r] = col

    def run(obj: list[Fraction], allowed: int) -> str:
        while True:
            # reduced costs d_j = obj_j - obj_B . column_j
            enter = None
            for j in range(allowed):
                if j in basis:
                    continue
                d = obj[j] - sum(obj[basis[i]] * T[i][j] for i in range(m))
                if d < 0:
                    enter = j
                    break
            if enter is None:
                return "optimal"
            best = None
            for i in range(m):
                if T[i][enter] > 0:
                    ratio = T[i][-1] / T[i][enter]
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return "unbounded"
            pivot(best[1], enter)

    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    run(phase1, n + m)
    infeas = sum(T[i][-1] for i in range(m) if basis[i] >= n)
    if infeas > 0:
        # y = c_B B^-1, with B^-1 sitting in the artificial columns
        y = [sum(phase1[basis[r]] * T[r][n + i] for r in range(m)) for i in range(m)]
        return LPResult("infeasible", farkas=[y[i] * sign[i] for i in range(m)])

    # drive remaining (zero-level) artificials out of the basis
    keep = list(range(m))
    for r in range(m):
        if basis[r] >= n:
            col = next((j for j in range(n) if T[r][j] != 0), None)
            if col is None:
                keep.remove(r)  # redundant equality
            else:
                pivot(r, col)
    T = [T[r][:n] + [T[r][-1]] for r in keep]
    basis = [basis[r] for r in keep]
    m = len(T)

    status = run(cost, n)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for i in range(m):
        x[basis[i]] = T[i][-1]
    return LPResult("optimal", x=x, value=sum(ci * xi for ci, xi in zip(cost, x)))
