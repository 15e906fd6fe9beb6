"""Generalized urn models and a two-agent, CHSH-style urn experiment.

A ball type carries one symbol per color; looking through a filter of one
color reveals only that symbol, so each color partitions the ball types.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Mapping, Sequence

from .diagram import OrthoDiagram

__all__ = [
    "ALICE_COLORS",
    "BOB_COLORS",
    "SETTING_PAIRS",
    "ChshResult",
    "ExperimentRecord",
    "UrnModel",
    "chsh_exact",
    "chsh_statistic",
    "induced_partition",
    "load_urn",
    "run_experiment",
    "sample_load",
    "subensemble",
    "subensemble_urn",
    "urn_to_diagram",
]

ALICE_COLORS = ("red", "blue")
BOB_COLORS = ("green", "orange")
SETTING_PAIRS = (("red", "green"), ("red", "orange"), ("blue", "green"), ("blue", "orange"))
# bump when the sampling procedure changes in any way that alters records
RNG_FORMAT_VERSION = 1

# sign of each E(a, b) in S; the default is E(r,g) + E(b,o) + E(r,o) - E(b,g)
CHSH_VARIANTS = {
    "bg": {("red", "green"): 1, ("blue", "orange"): 1, ("red", "orange"): 1, ("blue", "green"): -1},
    "rg": {("red", "green"): -1, ("blue", "orange"): 1, ("red", "orange"): 1, ("blue", "green"): 1},
    "bo": {("red", "green"): 1, ("blue", "orange"): -1, ("red", "orange"): 1, ("blue", "green"): 1},
    "ro": {("red", "green"): 1, ("blue", "orange"): 1, ("red", "orange"): -1, ("blue", "green"): 1},
}


class UrnError(ValueError):
    pass


@dataclass(frozen=True)
class UrnModel:
    types: tuple[str, ...]
    colors: tuple[str, ...]
    symbols: Mapping[str, Mapping[str, str]]
    load: Mapping[str, Fraction]

    def __post_init__(self):
        if not self.types or not self.colors:
            raise UrnError("an urn needs at least one ball type and one color")
        for t in self.types:
            row = self.symbols.get(t)
            if row is None or any(c not in row for c in self.colors):
                raise UrnError(f"symbol table incomplete for ball type {t!r}")
        if set(self.load) - set(self.types):
            raise UrnError(f"load refers to unknown types {sorted(set(self.load) - set(self.types))}")
        if any(Fraction(v) < 0 for v in self.load.values()):
            raise UrnError("load entries must be nonnegative")
        total = sum((Fraction(self.load.get(t, 0)) for t in self.types), Fraction(0))
        if total != 1:
            raise UrnError(f"load sums to {total}, not 1")

    def symbol(self, ball_type: str, color: str) -> str:
        return self.symbols[ball_type][color]

    def with_load(self, load: Mapping[str, Fraction]) -> "UrnModel":
        return UrnModel(self.types, self.colors, self.symbols, {t: Fraction(load.get(t, 0)) for t in self.types})

    def to_dict(self) -> dict:
        return {
            "types": list(self.types),
            "colors": list(self.colors),
            "symbols": {t: dict(self.symbols[t]) for t in self.types},
            "load": {t: str(Fraction(self.load.get(t, 0))) for t in self.types},
        }


def load_urn(text: str | dict) -> UrnModel:
    """Parse the ``.urn`` JSON schema; loads may be ``"p/q"`` strings or numbers."""
    data = json.loads(text) if isinstance(text, str) else text
    types = tuple(str(t) for t in data["types"])
    symbols = {str(t): {str(c): str(s) for c, s in row.items()} for t, row in data["symbols"].items()}
    load = {str(t): Fraction(str(v)) for t, v in data["load"].items()}
    return UrnModel(types, tuple(str(c) for c in data["colors"]), symbols, load)


def induced_partition(urn: UrnModel, color: str) -> list[tuple[str, ...]]:
    """Ball types grouped by their symbol in ``color``; blocks ordered by first member."""
    if color not in urn.colors:
        raise UrnError(f"unknown color {color!r}")
    blocks: dict[str, list[str]] = {}
    for t in urn.types:
        blocks.setdefault(urn.symbol(t, color), []).append(t)
    return [tuple(b) for b in blocks.values()]


def block_name(block: Sequence[str]) -> str:
    return "{" + ",".join(block) + "}"


def urn_to_diagram(urn: UrnModel) -> tuple[OrthoDiagram, dict[str, Fraction]]:
    """One context per color, one atom per block; equal blocks are pasted.

    Colors whose partition has a single block (the trivial context) and
    colors repeating an earlier partition are skipped.  The load is pushed
    forward to the blocks.
    """
    contexts: list[tuple[str, ...]] = []
    seen: set[frozenset[str]] = set()
    for color in urn.colors:
        part = induced_partition(urn, color)
        names = tuple(block_name(b) for b in part)
        if len(names) < 2 or frozenset(names) in seen:
            continue
        seen.add(frozenset(names))
        contexts.append(names)
    if not contexts:
        raise UrnError("every color induces the trivial partition; no diagram")
    diagram = OrthoDiagram.from_contexts(contexts)
    weight: dict[str, Fraction] = {}
    for color in urn.colors:
        for b in induced_partition(urn, color):
            name = block_name(b)
            if name in diagram.atoms:
                weight[name] = sum((Fraction(urn.load.get(t, 0)) for t in b), Fraction(0))
    return diagram, weight


@dataclass(frozen=True)
class Draw:
    ball_type: str
    alice_color: str
    bob_color: str
    alice_symbol: str
    bob_symbol: str


@dataclass
class ExperimentRecord:
    seed: int
    protocol: str
    draws: list[Draw] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "protocol": self.protocol,
            "rng_format": RNG_FORMAT_VERSION,
            "draws": [
                [d.ball_type, d.alice_color, d.bob_color, d.alice_symbol, d.bob_symbol] for d in self.draws
            ],
        }


class _Sampler:
    """Integer sampling from a seeded Mersenne Twister via ``getrandbits`` only.

    ``random.Random(seed).getrandbits`` is stable across platforms and Python
    versions; higher-level helpers such as ``choices`` are not used because
    their algorithms are not pinned.
    """

    def __init__(self, seed: int):
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self._rng = random.Random(seed)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        bits = max(1, (n - 1).bit_length())
        while True:
            x = self._rng.getrandbits(bits)
            if x < n:
                return x

    def weighted(self, items: Sequence[str], weights: Sequence[Fraction]) -> str:
        den = 1
        for w in weights:
            den = den * w.denominator // math.gcd(den, w.denominator)
        r = self.below(den)
        acc = 0
        for item, w in zip(items, weights):
            acc += int(w * den)
            if r < acc:
                return item
        raise AssertionError("weights do not sum to 1")


Protocol = str | tuple[str, str]


def run_experiment(urn: UrnModel, protocol: Protocol, n_draws: int, seed: int) -> ExperimentRecord:
    """Draw ``n_draws`` balls; Alice then Bob read the same ball through their filters.

    ``protocol`` is a fixed ``(alice_color, bob_color)`` pair, ``"round-robin"``
    (cycling through the four setting pairs) or ``"random"`` (each agent picks
    uniformly and independently per draw).  Per draw the generator is consumed
    in the order: ball type, Alice's setting, Bob's setting.
    """
    missing = [c for c in ALICE_COLORS + BOB_COLORS if c not in urn.colors]
    if missing:
        raise UrnError(f"urn lacks protocol colors {missing}")
    if n_draws < 1:
        raise ValueError("n_draws must be at least 1")
    if isinstance(protocol, tuple):
        a, b = protocol
        if a not in ALICE_COLORS or b not in BOB_COLORS:
            raise UrnError(f"invalid fixed setting {protocol}")
        choose: Callable[[int, _Sampler], tuple[str, str]] = lambda i, s: (a, b)
        name = f"fixed:{a},{b}"
    elif protocol == "round-robin":
        choose = lambda i, s: SETTING_PAIRS[i % 4]
        name = protocol
    elif protocol == "random":
        choose = lambda i, s: (ALICE_COLORS[s.below(2)], BOB_COLORS[s.below(2)])
        name = protocol
    else:
        raise UrnError(f"unknown protocol {protocol!r}")
    sampler = _Sampler(seed)
    types = list(urn.types)
    weights = [Fraction(urn.load.get(t, 0)) for t in types]
    record = ExperimentRecord(seed, name)
    for i in range(n_draws):
        t = sampler.weighted(types, weights)
        ca, cb = choose(i, sampler)
        record.draws.append(Draw(t, ca, cb, urn.symbol(t, ca), urn.symbol(t, cb)))
    return record


def _pm(symbol: str) -> int:
    if symbol == "0":
        return 1
    if symbol == "1":
        return -1
    raise UrnError(f"CHSH needs binary symbols 0/1, got {symbol!r}")


@dataclass
class ChshResult:
    S: float | Fraction
    expectations: dict[tuple[str, str], float | Fraction]
    counts: dict[tuple[str, str], int]

    def to_dict(self) -> dict:
        return {
            "S": _num(self.S),
            "terms": [
                {"alice": a, "bob": b, "E": _num(self.expectations[(a, b)]), "count": self.counts.get((a, b))}
                for a, b in SETTING_PAIRS
            ],
        }


def _num(x):
    return str(x) if isinstance(x, Fraction) else x


def _combine(expect: Mapping[tuple[str, str], object], variant: str):
    signs = CHSH_VARIANTS[variant]
    return sum(signs[p] * expect[p] for p in SETTING_PAIRS)


def chsh_statistic(record: ExperimentRecord, variant: str = "bg") -> ChshResult:
    """Empirical S from a record, with symbols 0 -> +1 and 1 -> -1."""
    sums = {p: 0 for p in SETTING_PAIRS}
    counts = {p: 0 for p in SETTING_PAIRS}
    for d in record.draws:
        p = (d.alice_color, d.bob_color)
        sums[p] += _pm(d.alice_symbol) * _pm(d.bob_symbol)
        counts[p] += 1
    empty = [p for p in SETTING_PAIRS if counts[p] == 0]
    if empty:
        raise UrnError(f"no samples for setting pairs {empty}")
    expect = {p: sums[p] / counts[p] for p in SETTING_PAIRS}
    return ChshResult(_combine(expect, variant), expect, counts)


def chsh_exact(urn: UrnModel, variant: str = "bg") -> ChshResult:
    """Load-weighted S, computed exactly over the ball types."""
    expect = {}
    for a, b in SETTING_PAIRS:
        expect[(a, b)] = sum(
            (Fraction(urn.load.get(t, 0)) * _pm(urn.symbol(t, a)) * _pm(urn.symbol(t, b)) for t in urn.types),
            Fraction(0),
        )
    return ChshResult(_combine(expect, variant), expect, {})


def binary_universe(colors: Sequence[str]) -> UrnModel:
    """All 2^k ball types over binary symbols, named by their digit strings, uniform load."""
    rows = ["".join(bits) for bits in product("01", repeat=len(colors))]
    symbols = {r: dict(zip(colors, r)) for r in rows}
    n = len(rows)
    return UrnModel(tuple(rows), tuple(colors), symbols, {r: Fraction(1, n) for r in rows})


# digit predicates of the relational-encoding subensembles over (red, green)
SUBENSEMBLES: dict[str, Callable[[str], bool]] = {
    "E1": lambda d: d[0] == "0",
    "E2": lambda d: d[0] == "1",
    "E3": lambda d: d[1] == "0",
    "E4": lambda d: d[1] == "1",
    "E5": lambda d: d[0] == d[1],
    "E6": lambda d: d[0] != d[1],
}

# pairs-of-pairs versions over (red, green, blue, orange)
SQUARED_SUBENSEMBLES: dict[str, Callable[[str], bool]] = {
    "E5^2": lambda d: d[0] == d[1] and d[2] == d[3],
    "E6^2": lambda d: d[0] != d[1] and d[2] != d[3],
}


def subensemble(name: str) -> list[str]:
    """Members of a named subensemble, as digit strings in lexicographic order."""
    if name in SUBENSEMBLES:
        universe = binary_universe(("red", "green"))
        pred = SUBENSEMBLES[name]
    elif name in SQUARED_SUBENSEMBLES:
        universe = binary_universe(("red", "green", "blue", "orange"))
        pred = SQUARED_SUBENSEMBLES[name]
    else:
        raise KeyError(name)
    return [t for t in universe.types if pred(t)]


def subensemble_urn(name: str, load: Mapping[str, Fraction] | None = None) -> UrnModel:
    """Urn holding exactly the members of a subensemble (uniform load by default)."""
    members = subensemble(name)
    colors = ("red", "green") if name in SUBENSEMBLES else ("red", "green", "blue", "orange")
    symbols = {t: dict(zip(colors, t)) for t in members}
    if load is None:
        load = {t: Fraction(1, len(members)) for t in members}
    return UrnModel(tuple(members), colors, symbols, load)


def sample_load(types: Sequence[str], rng: random.Random, max_den: int = 1000) -> dict[str, Fraction]:
    """A random rational load (positive integer weights normalised)."""
    raw = [rng.randint(0, max_den) for _ in types]
    if not any(raw):
        raw[0] = 1
    total = sum(raw)
    return {t: Fraction(r, total) for t, r in zip(types, raw)}
