"""Faithful orthogonal representations and Born-rule values.

Atoms are mapped to real unit vectors.  A representation is faithful when
atoms sharing a context get orthogonal vectors and atoms never sharing a
context get non-orthogonal ones.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .diagram import OrthoDiagram

__all__ = [
    "DEFAULT_TOLERANCE",
    "PENTAGON_CORNERS",
    "FaithfulnessReport",
    "VectorRep",
    "born_probability",
    "check_faithful",
    "complete_representation",
    "gram_schmidt_complete",
    "lovasz_umbrella",
    "pentagon_umbrella_rep",
    "quantum_value",
    "unit_state",
]

DEFAULT_TOLERANCE = 1e-10
RESIDUAL_CUTOFF = 1e-8

# corner atoms of the bundled pentagon diagram, in cyclic order, and the
# umbrella index attached to each: v1..v5 = u1, u3, u5, u2, u4
PENTAGON_CORNERS = ("v1", "v3", "v5", "v7", "v9")
PENTAGON_UMBRELLA_ORDER = (1, 3, 5, 2, 4)


@dataclass
class VectorRep:
    dimension: int
    vectors: dict[str, np.ndarray]
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        self.vectors = {a: np.asarray(v, dtype=float) for a, v in self.vectors.items()}
        for a, v in self.vectors.items():
            if v.shape != (self.dimension,):
                raise ValueError(f"vector for {a!r} has shape {v.shape}, expected ({self.dimension},)")

    def __getitem__(self, atom: str) -> np.ndarray:
        try:
            return self.vectors[atom]
        except KeyError:
            raise KeyError(f"no vector for atom {atom!r}") from None

    def to_json(self, atoms: Sequence[str] | None = None) -> str:
        order = list(atoms) if atoms is not None else list(self.vectors)
        body = ", ".join(
            f"{json.dumps(a)}: [{', '.join(_f17(x) for x in self.vectors[a])}]" for a in order
        )
        return f'{{"dimension": {self.dimension}, "vectors": {{{body}}}, "tolerance": {_f17(self.tolerance)}}}'

    @classmethod
    def from_json(cls, data: str | dict) -> "VectorRep":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            int(data["dimension"]),
            {str(a): v for a, v in data["vectors"].items()},
            float(data.get("tolerance", DEFAULT_TOLERANCE)),
        )


def _f17(x: float) -> str:
    text = format(float(x), ".17g")
    # keep floats recognisable: 2.0 prints as "2.0", not "2"
    return text if any(ch in text for ch in ".eni") else text + ".0"


def unit_state(components: Sequence[float], tolerance: float = DEFAULT_TOLERANCE) -> np.ndarray:
    c = np.asarray(components, dtype=float)
    if abs(np.linalg.norm(c) - 1.0) > tolerance:
        raise ValueError(f"state vector is not normalised (norm {np.linalg.norm(c)!r})")
    return c


def lovasz_umbrella() -> dict[int, np.ndarray]:
    """The five 3-vectors u_1..u_5 of the Lovász umbrella, keyed by l."""
    s = np.sqrt(np.sqrt(5.0) - 1.0)
    scale = 5.0 ** -0.25
    out = {}
    for l in range(1, 6):
        phi = 2.0 * np.pi * l / 5.0
        out[l] = scale * np.array([1.0, s * np.cos(phi), s * np.sin(phi)])
    return out


def _sign_normalise(v: np.ndarray) -> np.ndarray:
    for x in v:
        if abs(x) > 1e-12:
            return v if x > 0 else -v
    return v


def gram_schmidt_complete(partial: Sequence[Sequence[float]], dimension: int | None = None,
                          tolerance: float = DEFAULT_TOLERANCE) -> list[np.ndarray]:
    """Complete ``partial`` orthonormal vectors to an orthonormal basis.

    Candidates are e_1, e_2, ... in order; a candidate whose residual after
    projection has norm below 1e-8 is skipped.  Each new vector is made to
    have a positive first nonzero component.
    """
    basis = [np.asarray(v, dtype=float) for v in partial]
    if dimension is None:
        if not basis:
            raise ValueError("dimension required when no vectors are given")
        dimension = basis[0].shape[0]
    k = len(basis)
    if k >= dimension:
        raise ValueError(f"nothing to complete: {k} vectors in dimension {dimension}")
    if k:
        gram = np.array([[u @ v for v in basis] for u in basis])
        if np.max(np.abs(gram - np.eye(k))) > tolerance:
            raise ValueError("input vectors are not orthonormal")
    out: list[np.ndarray] = []
    for i in range(dimension):
        cand = np.zeros(dimension)
        cand[i] = 1.0
        # two projection passes keep the residual orthogonal to ~1e-16
        for _ in range(2):
            for b in basis:
                cand = cand - (b @ cand) * b
        norm = np.linalg.norm(cand)
        if norm < RESIDUAL_CUTOFF:
            continue
        v = _sign_normalise(cand / norm)
        basis.append(v)
        out.append(v)
        if len(basis) == dimension:
            break
    return out


def complete_representation(diagram: OrthoDiagram, partial: Mapping[str, Sequence[float]],
                            dimension: int, tolerance: float = DEFAULT_TOLERANCE) -> VectorRep:
    """Fill in missing atoms context by context with Gram–Schmidt completions.

    Contexts are visited in diagram order; missing atoms of a context receive
    the completion vectors in context order.
    """
    vecs = {a: np.asarray(v, dtype=float) for a, v in partial.items()}
    progress = True
    while progress:
        progress = False
        for ctx in diagram.contexts:
            missing = [a for a in ctx if a not in vecs]
            known = [vecs[a] for a in ctx if a in vecs]
            if not missing or not known:
                continue
            extra = gram_schmidt_complete(known, dimension, tolerance)
            if len(extra) < len(missing):
                raise ValueError(f"context {ctx} needs {len(missing)} vectors, only {len(extra)} available")
            vecs.update(zip(missing, extra))
            progress = True
    left = [a for a in diagram.atoms if a not in vecs]
    if left:
        raise ValueError(f"no context links atoms {left} to the given vectors")
    return VectorRep(dimension, {a: vecs[a] for a in diagram.atoms}, tolerance)


def pentagon_umbrella_rep(diagram: OrthoDiagram | None = None) -> VectorRep:
    """Umbrella vectors on the pentagon corners, completed on the inner atoms."""
    if diagram is None:
        from .corpus import load

        diagram = load("pentagon")
    u = lovasz_umbrella()
    corners = {a: u[l] for a, l in zip(PENTAGON_CORNERS, PENTAGON_UMBRELLA_ORDER)}
    return complete_representation(diagram, corners, 3)


@dataclass
class FaithfulnessReport:
    faithful: bool
    violations: list[tuple[str, str, str, float]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.faithful


def check_faithful(diagram: OrthoDiagram, rep: VectorRep) -> FaithfulnessReport:
    """Unit norms, orthogonality inside contexts, non-orthogonality outside."""
    missing = [a for a in diagram.atoms if a not in rep.vectors]
    if missing:
        raise KeyError(f"representation lacks vectors for {missing}")
    eps = rep.tolerance
    bad: list[tuple[str, str, str, float]] = []
    for a in diagram.atoms:
        n = float(np.linalg.norm(rep[a]))
        if abs(n - 1.0) > eps:
            bad.append(("norm", a, a, n))
    nbrs = diagram.neighbours()
    atoms = diagram.atoms
    for i, a in enumerate(atoms):
        for b in atoms[i + 1:]:
            ip = float(rep[a] @ rep[b])
            if b in nbrs[a]:
                if abs(ip) > eps:
                    bad.append(("not-orthogonal", a, b, ip))
            elif abs(ip) <= eps:
                bad.append(("orthogonal-outside-context", a, b, ip))
    return FaithfulnessReport(not bad, bad)


def born_probability(rep: VectorRep, c: Sequence[float], atom: str) -> float:
    """Squared inner product of the state with the atom's vector."""
    v = rep[atom]
    return float(np.dot(np.asarray(c, dtype=float), v) ** 2)


def quantum_value(rep: VectorRep, c: Sequence[float], f: Mapping[str, object],
                  atoms: Sequence[str] | None = None) -> float:
    """``sum_a f(a) <c|v_a>^2``, accumulated in the given (canonical) atom order."""
    order = list(atoms) if atoms is not None else sorted(f)
    missing = [a for a in f if a not in rep.vectors and float(f[a]) != 0]
    if missing:
        raise KeyError(f"no vectors for atoms {missing}")
    total = 0.0
    for a in order:
        coef = float(f.get(a, 0))
        if coef:
            total += coef * born_probability(rep, c, a)
    return total
