"""Orthogonality diagrams: atoms, contexts and the ``.gd`` text format.

A diagram is a hypergraph whose hyperedges (contexts) are the blocks of a
pasting of Boolean algebras.  Atoms are opaque strings; canonical atom order
is order of first appearance when reading the contexts in order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

__all__ = [
    "DiagramError",
    "DiagramSyntaxError",
    "OrthoDiagram",
    "Violation",
    "bell_number",
    "diagram_from_json",
    "load_diagram",
    "parse_diagram",
    "serialize_diagram",
    "validate",
]

BELL_MAX = 14


class DiagramError(ValueError):
    """Raised for structurally invalid diagrams."""

    def __init__(self, message: str, violations: Sequence["Violation"] = ()):
        super().__init__(message)
        self.violations = list(violations)


class DiagramSyntaxError(DiagramError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Violation:
    """One broken diagram invariant."""

    kind: str
    message: str
    contexts: tuple[int, ...] = ()
    atoms: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "message": self.message,
            "contexts": list(self.contexts),
            "atoms": list(self.atoms),
        }


@dataclass(frozen=True)
class OrthoDiagram:
    """Atoms plus an ordered list of contexts.

    Construct through :func:`parse_diagram` or :meth:`from_contexts`, both of
    which validate.  Direct construction does not, so that :func:`validate`
    can report on arbitrary input.
    """

    atoms: tuple[str, ...]
    contexts: tuple[tuple[str, ...], ...]

    @classmethod
    def from_contexts(
        cls, contexts: Iterable[Iterable[str]], atoms: Iterable[str] | None = None
    ) -> "OrthoDiagram":
        ctxs = tuple(tuple(str(a) for a in c) for c in contexts)
        order = _first_appearance(ctxs)
        if atoms is not None:
            for a in atoms:
                if a not in order:
                    order.append(str(a))
        diagram = cls(tuple(order), ctxs)
        problems = validate(diagram)
        if problems:
            raise DiagramError(problems[0].message, problems)
        return diagram

    @property
    def index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.atoms)}

    def neighbours(self) -> dict[str, set[str]]:
        """Atoms sharing at least one context with each atom."""
        out: dict[str, set[str]] = {a: set() for a in self.atoms}
        for ctx in self.contexts:
            for a in ctx:
                out[a].update(b for b in ctx if b != a)
        return out

    def contexts_of(self, atom: str) -> list[int]:
        return [k for k, ctx in enumerate(self.contexts) if atom in ctx]

    def to_dict(self) -> dict:
        return {"atoms": list(self.atoms), "contexts": [list(c) for c in self.contexts]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __len__(self) -> int:
        return len(self.atoms)


def _first_appearance(contexts: Iterable[Sequence[str]]) -> list[str]:
    seen: dict[str, None] = {}
    for ctx in contexts:
        for a in ctx:
            seen.setdefault(a, None)
    return list(seen)


def validate(diagram: OrthoDiagram) -> list[Violation]:
    """Return every invariant violation; an empty list means valid."""
    out: list[Violation] = []
    if not diagram.contexts:
        out.append(Violation("empty", "diagram has no contexts"))
    if len(set(diagram.atoms)) != len(diagram.atoms):
        dup = sorted({a for a in diagram.atoms if diagram.atoms.count(a) > 1})
        out.append(Violation("duplicate-atom-id", f"atom ids repeated: {dup}", atoms=tuple(dup)))
    for a in diagram.atoms:
        if not a:
            out.append(Violation("empty-atom-id", "atom id must be nonempty"))
    declared = set(diagram.atoms)
    covered: set[str] = set()
    for k, ctx in enumerate(diagram.contexts):
        covered.update(ctx)
        if len(ctx) < 2:
            out.append(
                Violation("short-context", f"context {k} has fewer than 2 atoms", (k,), tuple(ctx))
            )
        dups = sorted({a for a in ctx if ctx.count(a) > 1})
        if dups:
            out.append(
                Violation(
                    "duplicate-in-context",
                    f"context {k} repeats atom(s) {dups}",
                    (k,),
                    tuple(dups),
                )
            )
        unknown = [a for a in ctx if a not in declared]
        if unknown:
            out.append(
                Violation("undeclared-atom", f"context {k} uses undeclared atoms {unknown}", (k,), tuple(unknown))
            )
    for a in diagram.atoms:
        if a not in covered:
            out.append(Violation("isolated-atom", f"atom {a!r} is in no context", atoms=(a,)))
    sets = [frozenset(c) for c in diagram.contexts]
    for i, j in combinations(range(len(sets)), 2):
        shared = sets[i] & sets[j]
        if sets[i] == sets[j]:
            out.append(
                Violation("duplicate-context", f"contexts {i} and {j} are equal", (i, j), tuple(sorted(shared)))
            )
        elif len(shared) >= 2:
            out.append(
                Violation(
                    "intertwining",
                    f"intertwining violation: contexts {i} and {j} share {len(shared)} atoms",
                    (i, j),
                    tuple(sorted(shared)),
                )
            )
    return out


def parse_diagram(text: str, check: bool = True) -> OrthoDiagram:
    """Parse the ``.gd`` DSL.

    One context per line, atoms separated by whitespace; ``/`` also separates
    contexts on one line; ``#`` comments run to end of line.
    """
    contexts: list[tuple[str, ...]] = []
    positions: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        col = 0
        for chunk in line.split("/"):
            start = col
            col += len(chunk) + 1
            tokens = chunk.split()
            if not tokens:
                # '/' at the start, end or doubled
                raise DiagramSyntaxError("empty context between '/' separators", lineno, start + 1)
            for tok in tokens:
                bad = next((ch for ch in tok if not ch.isprintable()), None)
                if bad is not None:
                    raise DiagramSyntaxError(
                        f"unexpected character {bad!r}", lineno, start + chunk.index(tok) + tok.index(bad) + 1
                    )
            leading = len(chunk) - len(chunk.lstrip())
            contexts.append(tuple(tokens))
            positions.append((lineno, start + leading + 1))
    if not contexts:
        raise DiagramError("empty diagram: no contexts found", [Violation("empty", "diagram has no contexts")])
    diagram = OrthoDiagram(tuple(_first_appearance(contexts)), tuple(contexts))
    if not check:
        return diagram
    problems = validate(diagram)
    if problems:
        first = problems[0]
        if first.contexts:
            line, column = positions[first.contexts[-1]]
            raise DiagramError(f"line {line}, column {column}: {first.message}", problems)
        raise DiagramError(first.message, problems)
    return diagram


def serialize_diagram(diagram: OrthoDiagram) -> str:
    """Inverse of :func:`parse_diagram` (one context per line)."""
    return "".join(" ".join(ctx) + "\n" for ctx in diagram.contexts)


def diagram_from_json(data: dict | str) -> OrthoDiagram:
    if isinstance(data, str):
        data = json.loads(data)
    return OrthoDiagram.from_contexts(data["contexts"], data.get("atoms"))


def load_diagram(path, check: bool = True) -> OrthoDiagram:
    """Read a ``.gd`` file, or a ``.json`` file in the diagram schema."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if str(path).endswith(".json"):
        if not check:
            data = json.loads(text)
            ctxs = tuple(tuple(str(a) for a in c) for c in data["contexts"])
            atoms = [str(a) for a in data.get("atoms", _first_appearance(ctxs))]
            return OrthoDiagram(tuple(atoms), ctxs)
        return diagram_from_json(text)
    return parse_diagram(text, check)


def bell_number(n: int) -> int:
    """Number of set partitions of an ``n``-element set (Bell triangle)."""
    if isinstance(n, bool) or not isinstance(n, int) or not 1 <= n <= BELL_MAX:
        raise ValueError(f"bell_number needs an integer 1 <= n <= {BELL_MAX}, got {n!r}")
    row = [1]
    for _ in range(n - 1):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[-1]


def bell_number_by_sum(n: int) -> int:
    """B(n) from B(n) = sum_k C(n-1, k) B(k); used as a cross-check."""
    b = [1]
    for m in range(n):
        b.append(sum(math.comb(m, k) * b[k] for k in range(m + 1)))
    return b[n]
