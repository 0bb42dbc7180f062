"""End-to-end greedy mapping followed by JIT scheduling."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .circuit import (
    Circuit,
    InteractionGraph,
    PrecedenceDag,
    build_interaction_graph,
    build_precedence,
)
from .mapper import Mapping, derive_indicators, map_qubits
from .model import Plan
from .network import Topology, all_pairs_costs
from .scheduler import Budget, GenMode, schedule


@dataclass(frozen=True)
class Instance:
    """A circuit on a cloud, with derived structures computed once."""
    circuit: Circuit
    topology: Topology

    @cached_property
    def dag(self) -> PrecedenceDag:
        return build_precedence(self.circuit)

    @cached_property
    def graph(self) -> InteractionGraph:
        return build_interaction_graph(self.circuit)

    @cached_property
    def costs(self) -> np.ndarray:
        return all_pairs_costs(self.topology)


def plan_for_mapping(inst: Instance, mapping: Mapping, horizon: int | None = None,
                     mode: GenMode = GenMode.IN_SLOT, budget: Budget = Budget.STORED) -> Plan:
    ind = derive_indicators(mapping, inst.circuit)
    sch, _ = schedule(inst.circuit, inst.dag, mapping, ind, inst.topology, horizon, mode, budget)
    return Plan(mapping, sch, ind)


def uniq_plan(inst: Instance, horizon: int | None = None, mode: GenMode = GenMode.IN_SLOT,
              budget: Budget = Budget.STORED, literal_delta: bool = False) -> Plan:
    mapping = map_qubits(inst.graph, inst.topology, inst.costs, literal=literal_delta)
    return plan_for_mapping(inst, mapping, horizon, mode, budget)
