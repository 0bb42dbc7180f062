"""Qubit-to-QPU mapping and EPR-aware slot scheduling for distributed quantum circuits."""

from .circuit import (
    Circuit,
    Gate,
    InteractionGraph,
    PrecedenceDag,
    build_interaction_graph,
    build_precedence,
    parse_gate_list,
    parse_qasm_subset,
    random_circuit,
)
from .mapper import GateIndicators, Mapping, derive_indicators, map_qubits
from .model import (
    LatencyTable,
    Metrics,
    ObjectiveWeights,
    Plan,
    ValidationReport,
    compute_metrics,
    objective,
    validate,
)
from .network import QpuSpec, Topology, all_pairs_costs, default_cloud, e_over_n, gen_topology
from .pipeline import Instance, uniq_plan
from .scheduler import Budget, EprInventory, GenMode, Schedule, epr_utilization, schedule

__version__ = "0.1.0"
