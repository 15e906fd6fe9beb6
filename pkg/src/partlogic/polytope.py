"""Classical correlation polytope of a diagram: exact bounds, membership, facets.

The polytope is the convex hull of the two-valued states, viewed as 0/1
vectors indexed by atoms in canonical order.  Facets are computed in the
affine hull of the vertices, using the pivot atoms of an exact row
reduction as coordinates, so every facet has zero coefficients outside the
pivot atoms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .diagram import OrthoDiagram
from .exact import primitive, rank, rref, solve_lp
from .states import StateSet, check_weight

__all__ = [
    "HullCertificate",
    "Inequality",
    "LinearFunctional",
    "MAX_FACET_DIM",
    "MAX_FACET_VERTICES",
    "Polytope",
    "classical_max",
    "enumerate_facets",
    "facet_combination",
    "hull_membership",
    "lift_nonnegative",
    "load_functional",
]

MAX_FACET_DIM = 12
MAX_FACET_VERTICES = 64


class LinearFunctional(dict):
    """Atom -> exact rational coefficient; missing atoms read as 0."""

    def __init__(self, coefficients: Mapping[str, object] = (), **kw):
        super().__init__()
        for a, v in dict(coefficients, **kw).items():
            self[str(a)] = Fraction(str(v)) if isinstance(v, str) else Fraction(v)

    def __missing__(self, key):
        return Fraction(0)

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        return sum((c * Fraction(point.get(a, 0)) for a, c in self.items()), Fraction(0))

    def vector(self, atoms: Sequence[str]) -> list[Fraction]:
        unknown = set(self) - set(atoms)
        if unknown:
            raise KeyError(f"functional refers to unknown atoms {sorted(unknown)}")
        return [self[a] for a in atoms]


@dataclass(frozen=True)
class Inequality:
    """``sum coefficients[a] * x_a <= bound``."""

    coefficients: LinearFunctional
    bound: Fraction

    def value(self, point: Mapping[str, Fraction]) -> Fraction:
        return self.coefficients.evaluate(point)

    def holds(self, point: Mapping[str, Fraction]) -> bool:
        return self.value(point) <= self.bound

    def format(self, atoms: Sequence[str]) -> str:
        terms = [f"{_fmt(self.coefficients[a])}*{a}" for a in atoms if self.coefficients[a] != 0]
        lhs = " + ".join(terms).replace("+ -", "- ") if terms else "0"
        return f"{lhs} <= {_fmt(self.bound)}"

    def to_dict(self, atoms: Sequence[str]) -> dict:
        return {
            "coefficients": {a: _fmt(self.coefficients[a]) for a in atoms if self.coefficients[a] != 0},
            "bound": _fmt(self.bound),
        }


def _fmt(q: Fraction) -> str:
    return str(Fraction(q))


def load_functional(text: str) -> tuple[LinearFunctional, Fraction | None]:
    """Read ``{"coefficients": {...}, "bound": b}`` or a bare coefficient map."""
    data = json.loads(text)
    if "coefficients" in data:
        bound = data.get("bound")
        return LinearFunctional(data["coefficients"]), None if bound is None else Fraction(str(bound))
    return LinearFunctional(data), None


def classical_max(states: StateSet, f: Mapping[str, object]) -> tuple[Fraction, list[tuple[int, ...]]]:
    """Exact maximum of ``f`` over the two-valued states and the states attaining it."""
    if not states.states:
        raise ValueError("classical_max needs a nonempty state set")
    f = f if isinstance(f, LinearFunctional) else LinearFunctional(f)
    coeffs = f.vector(states.diagram.atoms)
    values = [sum((c for c, v in zip(coeffs, s) if v), Fraction(0)) for s in states.states]
    best = max(values)
    return best, [s for s, v in zip(states.states, values) if v == best]


@dataclass
class Polytope:
    """Vertices plus the affine-hull coordinate system used for facets."""

    atoms: tuple[str, ...]
    vertices: list[tuple[int, ...]]
    pivots: list[int]
    # rows of the reduced echelon form of vertex differences, one per pivot
    basis: list[list[Fraction]]
    origin: tuple[int, ...]
    facets: list[Inequality] = field(default_factory=list)

    @classmethod
    def from_states(cls, states: StateSet) -> "Polytope":
        if not states.states:
            raise ValueError("empty state set has no polytope")
        verts = list(states.states)
        origin = verts[0]
        diffs = [[Fraction(v - o) for v, o in zip(s, origin)] for s in verts[1:]]
        basis, pivots = rref(diffs) if diffs else ([], [])
        return cls(states.diagram.atoms, verts, pivots, basis, origin)

    @property
    def dimension(self) -> int:
        return len(self.pivots)

    def equalities(self) -> list[Inequality]:
        """Affine-hull equations, one per non-pivot atom, each as ``lhs <= b`` holding with equality."""
        out = []
        n = len(self.atoms)
        for j in range(n):
            if j in self.pivots:
                continue
            coeffs = {self.atoms[j]: Fraction(1)}
            b = Fraction(self.origin[j])
            for r, p in enumerate(self.pivots):
                coef = self.basis[r][j]
                if coef:
                    coeffs[self.atoms[p]] = coeffs.get(self.atoms[p], 0) - coef
                    b -= coef * self.origin[p]
            out.append(Inequality(LinearFunctional(coeffs), b))
        return out

    def reduce(self, ineq: Inequality) -> Inequality:
        """Rewrite ``ineq`` on the pivot atoms, using the affine-hull equations.

        Two inequalities agree on the polytope's affine hull iff their
        reductions coincide.
        """
        f = ineq.coefficients.vector(self.atoms)
        const = Fraction(0)
        for j, fj in enumerate(f):
            if fj:
                const += fj * (self.origin[j] - sum(self.basis[r][j] * self.origin[p] for r, p in enumerate(self.pivots)))
        coeffs = {}
        for r, p in enumerate(self.pivots):
            g = sum(fj * self.basis[r][j] for j, fj in enumerate(f) if fj)
            if g:
                coeffs[self.atoms[p]] = g
        return Inequality(LinearFunctional(coeffs), Fraction(ineq.bound) - const)

    def is_valid(self, ineq: Inequality) -> bool:
        f = ineq.coefficients.vector(self.atoms)
        return all(sum((c for c, v in zip(f, s) if v), Fraction(0)) <= ineq.bound for s in self.vertices)

    def tight_vertices(self, ineq: Inequality) -> list[tuple[int, ...]]:
        f = ineq.coefficients.vector(self.atoms)
        return [s for s in self.vertices if sum((c for c, v in zip(f, s) if v), Fraction(0)) == ineq.bound]

    def is_facet(self, ineq: Inequality) -> bool:
        """Valid, and tight at ``dimension`` affinely independent vertices."""
        if not self.is_valid(ineq):
            return False
        tight = self.tight_vertices(ineq)
        if len(tight) == len(self.vertices):
            return False
        return rank([[1, *s] for s in tight]) == self.dimension


def _canonical(coeffs: list[Fraction], bound: Fraction) -> tuple[list[int], int]:
    ints = primitive([*coeffs, bound])
    return ints[:-1], ints[-1]


def _double_description(points: list[list[Fraction]]) -> list[list[int]]:
    """Extreme rays y of {y : y . (1, p) >= 0 for all points p}.

    ``points`` must affinely span their space, so the cone is pointed.
    Rays are returned as coprime integer vectors.
    """
    rows = [[Fraction(1), *p] for p in points]
    d = len(rows[0])
    # initial simplex cone from d linearly independent rows
    chosen: list[int] = []
    for i in range(len(rows)):
        if rank([rows[j] for j in chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == d:
                break
    if len(chosen) != d:
        raise ValueError("points do not affinely span their space")
    B = [rows[i] for i in chosen]
    inv = _inverse(B)
    rays = [primitive([inv[r][c] for r in range(d)]) for c in range(d)]
    processed = list(chosen)

    def dot(w, r):
        return sum(a * b for a, b in zip(w, r))

    for i in range(len(rows)):
        if i in chosen:
            continue
        w = rows[i]
        vals = [dot(w, r) for r in rays]
        pos = [r for r, v in zip(rays, vals) if v > 0]
        neg = [r for r, v in zip(rays, vals) if v < 0]
        zero = [r for r, v in zip(rays, vals) if v == 0]
        zero_sets = {
            tuple(r): frozenset(k for k in processed if dot(rows[k], r) == 0) for r in rays
        }
        new = pos + zero
        for p in pos:
            for q in neg:
                common = zero_sets[tuple(p)] & zero_sets[tuple(q)]
                if len(common) < d - 2:
                    continue
                # combinatorial adjacency: no third ray is tight on all of `common`
                if any(
                    common <= zero_sets[tuple(r)] for r in rays if r is not p and r is not q
                ):
                    continue
                wp, wq = dot(w, p), dot(w, q)
                new.append(primitive([wp * qc - wq * pc for pc, qc in zip(p, q)]))
        rays = new
        processed.append(i)
    return sorted({tuple(r) for r in rays})


def _inverse(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("singular matrix")
    return [row[n:] for row in red]


def enumerate_facets(states: StateSet) -> Polytope:
    """Complete, irredundant facet list of the classical polytope.

    Facets live on the pivot atoms (see :meth:`Polytope.reduce`) with coprime
    integer coefficients, sorted by coefficient vector then bound.
    """
    poly = Polytope.from_states(states)
    k = poly.dimension
    if k > MAX_FACET_DIM or len(poly.vertices) > MAX_FACET_VERTICES:
        raise ValueError(
            f"facet enumeration limited to dimension <= {MAX_FACET_DIM} and <= {MAX_FACET_VERTICES} "
            f"vertices (got {k}, {len(poly.vertices)})"
        )
    if k == 0:
        return poly
    points = [[Fraction(s[p]) for p in poly.pivots] for s in poly.vertices]
    facets = []
    for y in _double_description(points):
        # y0 + y.p >= 0   <=>   -y.p <= y0
        coeffs, bound = _canonical([Fraction(-v) for v in y[1:]], Fraction(y[0]))
        facets.append((coeffs, bound))
    facets.sort()
    poly.facets = [
        Inequality(LinearFunctional({poly.atoms[p]: c for p, c in zip(poly.pivots, coeffs) if c}), Fraction(b))
        for coeffs, b in facets
    ]
    for f in poly.facets:
        if not poly.is_facet(f):
            raise RuntimeError(f"computed inequality is not a facet: {f.format(poly.atoms)}")
    return poly


def facet_combination(poly: Polytope, ineq: Inequality) -> dict[int, Fraction] | None:
    """Nonnegative multipliers of facets whose sum implies ``ineq`` on the affine hull.

    Returns ``{facet index: multiplier}`` when the reduced functional equals
    ``sum lambda_i facet_i`` with ``sum lambda_i bound_i <= reduced bound``;
    ``None`` when no such combination exists (``ineq`` is then invalid).
    """
    red = poly.reduce(ineq)
    piv_atoms = [poly.atoms[p] for p in poly.pivots]
    target = red.coefficients.vector(piv_atoms)
    if not poly.facets:
        return {} if all(t == 0 for t in target) and red.bound >= 0 else None
    cols = [f.coefficients.vector(piv_atoms) for f in poly.facets]
    a_eq = [[col[r] for col in cols] for r in range(len(piv_atoms))]
    res = solve_lp([f.bound for f in poly.facets], a_eq, target)
    if res.status != "optimal" or res.value > red.bound:
        return None
    return {i: v for i, v in enumerate(res.x) if v}


def lift_nonnegative(diagram: OrthoDiagram, ineq: Inequality) -> Inequality:
    """Equivalent inequality (on admissible weights) with nonnegative coefficients.

    Adds rational multiples of the context sums (each equal to 1 on every
    admissible weight) so that all coefficients are >= 0 and their total is
    minimal, then scales to coprime integers.
    """
    atoms = diagram.atoms
    g = ineq.coefficients.vector(atoms)
    K = len(diagram.contexts)
    # variables: c+_k, c-_k (K each), slack s_a (one per atom)
    # g_a + sum_{k ∋ a} (c+_k - c-_k) - s_a = 0
    a_eq = []
    rhs = []
    for j, a in enumerate(atoms):
        member = [1 if a in ctx else 0 for ctx in diagram.contexts]
        row = member + [-m for m in member] + [-1 if i == j else 0 for i in range(len(atoms))]
        a_eq.append(row)
        rhs.append(-g[j])
    sizes = [len(ctx) for ctx in diagram.contexts]
    cost = sizes + [-s for s in sizes] + [0] * len(atoms)
    res = solve_lp(cost, a_eq, rhs)
    if res.status != "optimal":
        raise RuntimeError(f"lifting LP ended with status {res.status}")
    shift = [res.x[k] - res.x[K + k] for k in range(K)]
    coeffs = list(g)
    for k, ctx in enumerate(diagram.contexts):
        for a in ctx:
            coeffs[atoms.index(a)] += shift[k]
    bound = Fraction(ineq.bound) + sum(shift, Fraction(0))
    ints, b = _canonical(coeffs, bound)
    return Inequality(LinearFunctional({a: c for a, c in zip(atoms, ints) if c}), Fraction(b))


@dataclass(frozen=True)
class HullCertificate:
    member: bool
    # convex coefficients per state (member) ...
    coefficients: tuple[tuple[tuple[int, ...], Fraction], ...] = ()
    # ... or an inequality valid on all states and violated by the weight
    separating: Inequality | None = None

    def __bool__(self) -> bool:
        return self.member


def hull_membership(
    states: StateSet, weight: Mapping[str, Fraction], use_facets: bool = True
) -> HullCertificate:
    """Decide whether an admissible weight is a convex mixture of two-valued states.

    A positive answer carries mixing coefficients maximising the smallest
    coefficient, so that a uniform mixture of all states comes back uniform.
    A negative answer carries a separating inequality, preferably the most
    violated facet, lifted to nonnegative coefficients.
    """
    diagram = states.diagram
    check = check_weight(diagram, weight)
    if not check:
        raise ValueError("inadmissible weight: " + "; ".join(check.violations))
    if not states.states:
        raise ValueError("no two-valued states: the classical polytope is empty")
    atoms = diagram.atoms
    w = [Fraction(weight[a]) for a in atoms]
    n = len(states.states)

    base = [[s[j] for s in states.states] for j in range(len(atoms))] + [[1] * n]
    res = solve_lp([0] * n, base, w + [1])
    if res.status == "optimal":
        # second pass: maximise t with mu_i - t - r_i = 0 over the same feasible set
        a_eq = [row + [0] + [0] * n for row in base]
        for i in range(n):
            a_eq.append([int(i == q) for q in range(n)] + [-1] + [-int(i == q) for q in range(n)])
        central = solve_lp([0] * n + [-1] + [0] * n, a_eq, w + [1] + [0] * n)
        x = central.x if central.status == "optimal" else res.x
        coeffs = tuple((s, x[i]) for i, s in enumerate(states.states) if x[i])
        return HullCertificate(True, coeffs)

    poly = Polytope.from_states(states)
    point = dict(zip(atoms, w))
    separating = None
    for eq in poly.equalities():
        v = eq.value(point)
        if v != eq.bound:
            # an equation of the hull; orient it so w is on the wrong side
            separating = eq if v > eq.bound else Inequality(
                LinearFunctional({a: -c for a, c in eq.coefficients.items()}), -eq.bound
            )
            break
    if separating is None and use_facets and poly.dimension <= MAX_FACET_DIM and n <= MAX_FACET_VERTICES:
        poly = enumerate_facets(states)
        best = None
        for f in poly.facets:
            lifted = lift_nonnegative(diagram, f)
            excess = lifted.value(point) - lifted.bound
            if excess > 0 and (best is None or excess > best[0]):
                best = (excess, lifted)
        separating = best[1] if best else None
    if separating is None:
        # Farkas: g.s + z0 <= 0 on every state, g.w + z0 > 0
        g = res.farkas[: len(atoms)]
        z0 = res.farkas[len(atoms)]
        separating = Inequality(LinearFunctional(dict(zip(atoms, g))), -z0)
        if not Polytope.from_states(states).is_valid(separating) or separating.holds(point):
            raise RuntimeError("could not derive a separating inequality")
    return HullCertificate(False, separating=lift_nonnegative(diagram, separating))
