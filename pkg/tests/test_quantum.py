import math

import numpy as np
import pytest

from partlogic import corpus
from partlogic.diagram import parse_diagram
from partlogic.polytope import classical_max
from partlogic.quantum import (
    PENTAGON_CORNERS,
    VectorRep,
    born_probability,
    check_faithful,
    complete_representation,
    gram_schmidt_complete,
    lovasz_umbrella,
    pentagon_umbrella_rep,
    quantum_value,
    unit_state,
)

HANDLE = (1.0, 0.0, 0.0)
INDICATOR = {a: 1 for a in PENTAGON_CORNERS}


@pytest.fixture(scope="module")
def rep():
    return pentagon_umbrella_rep()


def test_umbrella_norms_and_pentagram():
    u = lovasz_umbrella()
    for l in range(1, 6):
        assert abs(np.linalg.norm(u[l]) - 1) < 1e-12
        nxt = (l + 1) % 5 + 1  # l + 2, 1-based
        assert abs(u[l] @ u[nxt]) < 1e-12


def test_umbrella_pentagon_neighbours_not_orthogonal():
    u = lovasz_umbrella()
    for l in range(1, 6):
        assert abs(u[l] @ u[l % 5 + 1]) > 0.5


def test_u5_closed_form():
    expected = 5 ** -0.25 * np.array([1.0, math.sqrt(math.sqrt(5) - 1), 0.0])
    assert np.allclose(lovasz_umbrella()[5], expected, atol=1e-15)


def test_u1_u3_closed_form():
    cos = -(1 + math.sqrt(5)) / 4
    assert abs(5 ** -0.5 * (1 + (math.sqrt(5) - 1) * cos)) < 1e-12
    u = lovasz_umbrella()
    assert abs(u[1] @ u[3]) < 1e-12


def test_gram_schmidt_e1():
    out = gram_schmidt_complete([[1, 0, 0]])
    assert len(out) == 2
    assert np.allclose(out[0], [0, 1, 0]) and np.allclose(out[1], [0, 0, 1])


def test_gram_schmidt_matches_cross_product():
    u = lovasz_umbrella()
    (v,) = gram_schmidt_complete([u[1], u[3]])
    cross = np.cross(u[1], u[3])
    cross /= np.linalg.norm(cross)
    assert min(np.linalg.norm(v - cross), np.linalg.norm(v + cross)) < 1e-12
    assert abs(v @ u[1]) < 1e-12 and abs(v @ u[3]) < 1e-12


def test_gram_schmidt_2d():
    r = 1 / math.sqrt(2)
    (v,) = gram_schmidt_complete([[r, r]])
    assert np.allclose(np.abs(v), [r, r], atol=1e-12) and abs(v @ [r, r]) < 1e-12
    assert v[0] > 0  # sign pinned by first nonzero component


def test_gram_schmidt_identity_pattern():
    rng = np.random.default_rng(7)
    q, _ = np.linalg.qr(rng.normal(size=(5, 5)))
    partial = [q[:, 0], q[:, 1]]
    basis = np.array(partial + gram_schmidt_complete(partial))
    assert np.max(np.abs(basis @ basis.T - np.eye(5))) < 1e-12


@pytest.mark.parametrize(
    "partial, dim",
    [([[1, 0], [0, 1]], None), ([[1, 0, 0], [1, 0, 0]], None), ([[2, 0, 0]], None), ([], None)],
)
def test_gram_schmidt_errors(partial, dim):
    with pytest.raises(ValueError):
        gram_schmidt_complete(partial, dim)


def test_umbrella_rep_faithful(rep):
    report = check_faithful(corpus.load("pentagon"), rep)
    assert report.faithful, report.violations


def test_completed_contexts_orthonormal(rep):
    for ctx in corpus.load("pentagon").contexts:
        m = np.array([rep[a] for a in ctx])
        assert np.max(np.abs(m @ m.T - np.eye(3))) < 1e-10


def test_standard_basis_faithful():
    d = parse_diagram("a b c")
    assert check_faithful(d, VectorRep(3, {"a": [1, 0, 0], "b": [0, 1, 0], "c": [0, 0, 1]}))


def test_degenerate_rep():
    d = corpus.load("pentagon")
    report = check_faithful(d, VectorRep(3, {a: [1, 0, 0] for a in d.atoms}))
    assert not report
    # every co-contextual pair fails; the others are fine since they are parallel
    pairs = {(a, b) for _, a, b, _ in report.violations}
    adjacent = {(a, b) for ctx in d.contexts for i, a in enumerate(ctx) for b in ctx[i + 1:]}
    assert {tuple(sorted(p)) for p in pairs} == {tuple(sorted(p)) for p in adjacent}


def test_missing_vector():
    with pytest.raises(KeyError):
        check_faithful(parse_diagram("a b"), VectorRep(2, {"a": [1, 0]}))


def test_born_basics(rep):
    v = rep["v2"]
    assert abs(born_probability(rep, v, "v2") - 1) < 1e-12
    assert abs(born_probability(rep, rep["v1"], "v2")) < 1e-12
    for a in PENTAGON_CORNERS:
        assert abs(born_probability(rep, HANDLE, a) - 5 ** -0.5) < 1e-10


def test_born_sums_random_states(rep):
    rng = np.random.default_rng(20240101)
    d = corpus.load("pentagon")
    for _ in range(100):
        c = rng.normal(size=3)
        c /= np.linalg.norm(c)
        for ctx in d.contexts:
            assert abs(sum(born_probability(rep, c, a) for a in ctx) - 1) < 1e-9


def test_quantum_value_handle(rep):
    assert abs(quantum_value(rep, HANDLE, INDICATOR) - math.sqrt(5)) < 1e-10


def test_quantum_value_zero(rep):
    assert quantum_value(rep, HANDLE, {}) == 0


def test_quantum_value_e2(rep):
    expected = sum((math.sqrt(5) - 1) * 5 ** -0.5 * math.cos(2 * math.pi * l / 5) ** 2 for l in range(1, 6))
    assert abs(expected - (math.sqrt(5) - 1) * 5 ** -0.5 * 2.5) < 1e-12
    assert abs(quantum_value(rep, (0, 1, 0), INDICATOR) - expected) < 1e-10


def test_quantum_classical_gap(rep, pentagon_states):
    classical, _ = classical_max(pentagon_states, INDICATOR)
    gap = quantum_value(rep, HANDLE, INDICATOR) - float(classical)
    assert abs(gap - (math.sqrt(5) - 2)) < 1e-10 and gap > 0


def test_quantum_value_missing_atom(rep):
    with pytest.raises(KeyError):
        quantum_value(rep, HANDLE, {"nope": 1})


def test_unit_state():
    with pytest.raises(ValueError):
        unit_state([1, 1, 0])
    assert unit_state([0, 1, 0])[1] == 1


def test_rep_json_round_trip(rep):
    again = VectorRep.from_json(rep.to_json())
    assert again.dimension == 3
    for a, v in rep.vectors.items():
        assert np.array_equal(again[a], v)


def test_complete_representation_needs_links():
    d = parse_diagram("a b c / d e f")
    with pytest.raises(ValueError, match="no context links"):
        complete_representation(d, {"a": [1, 0, 0]}, 3)
