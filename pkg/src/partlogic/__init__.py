"""Finite orthogonality diagrams, their two-valued states, classical
polytopes and faithful orthogonal representations."""

from .diagram import (
    DiagramError,
    OrthoDiagram,
    bell_number,
    load_diagram,
    parse_diagram,
    serialize_diagram,
    validate,
)
from .polytope import (
    Inequality,
    LinearFunctional,
    classical_max,
    enumerate_facets,
    hull_membership,
)
from .quantum import (
    VectorRep,
    born_probability,
    check_faithful,
    gram_schmidt_complete,
    lovasz_umbrella,
    pentagon_umbrella_rep,
    quantum_value,
)
from .states import (
    PartitionLogic,
    StateSet,
    build_partition_logic,
    check_weight,
    enumerate_states,
    is_separating,
    partition_logics_isomorphic,
    true_implies_true,
)
from .urn import UrnModel, chsh_exact, chsh_statistic, induced_partition, run_experiment, urn_to_diagram

__version__ = "0.1.0"

__all__ = [
    "DiagramError", "OrthoDiagram", "bell_number", "load_diagram", "parse_diagram", "serialize_diagram",
    "validate", "Inequality", "LinearFunctional", "classical_max", "enumerate_facets", "hull_membership",
    "VectorRep", "born_probability", "check_faithful", "gram_schmidt_complete", "lovasz_umbrella",
    "pentagon_umbrella_rep", "quantum_value", "PartitionLogic", "StateSet", "build_partition_logic",
    "check_weight", "enumerate_states", "is_separating", "partition_logics_isomorphic", "true_implies_true",
    "UrnModel", "chsh_exact", "chsh_statistic", "induced_partition", "run_experiment", "urn_to_diagram",
]
