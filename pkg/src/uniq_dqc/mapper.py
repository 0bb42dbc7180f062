"""Greedy qubit-to-QPU placement and the derived local/remote gate indicators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .circuit import Circuit, InteractionGraph
from .errors import Infeasible, MalformedDocument, MappingMismatch
from .network import Topology


@dataclass(frozen=True)
class Mapping:
    assign: tuple[int, ...]

    def counts(self, p: int) -> list[int]:
        out = [0] * p
        for u in self.assign:
            out[u] += 1
        return out

    def matrix(self, p: int) -> np.ndarray:
        pi = np.zeros((len(self.assign), p), dtype=np.int64)
        pi[np.arange(len(self.assign)), list(self.assign)] = 1
        return pi

    def to_doc(self) -> dict[str, Any]:
        return {"assign": list(self.assign)}

    @classmethod
    def from_doc(cls, doc: dict) -> Mapping:
        try:
            return cls(tuple(int(u) for u in doc["assign"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDocument(f"bad mapping document: {exc}") from exc


@dataclass(frozen=True)
class GateIndicators:
    """delta[k] and pair[k] for the gate with id k+1; pair is None for local gates."""
    delta: tuple[int, ...]
    pair: tuple[tuple[int, int] | None, ...]

    @property
    def remote_count(self) -> int:
        return sum(self.delta)

    def theta(self, p: int) -> np.ndarray:
        """Dense m x p x p 0/1 array, symmetric in the last two axes."""
        th = np.zeros((len(self.delta), p, p), dtype=np.int64)
        for k, pr in enumerate(self.pair):
            if pr is not None:
                u, v = pr
                th[k, u, v] = th[k, v, u] = 1
        return th


def map_qubits(w: InteractionGraph, t: Topology, costs: np.ndarray,
               literal: bool = False) -> Mapping:
    """Place qubits one at a time in non-increasing interaction weight.

    Each qubit goes to the QPU with remaining capacity that minimises
    ``sum_j w[q, j] * costs[u, assign[j]]`` over already placed ``j``; ties go
    to the smallest QPU id. With ``literal=True`` the sum is restricted to
    qubits already on ``u``, which makes every score zero (``costs[u, u] == 0``)
    and reduces to first-fit.
    """
    n = w.weights.shape[0]
    p = t.p
    costs = np.asarray(costs)
    remaining = np.array(t.caps, dtype=np.int64)
    total_w = w.total_weight()
    order = sorted(range(n), key=lambda q: (-int(total_w[q]), q))
    neighbors = w.neighbors()

    # placed_w[q, v]: interaction weight between q and qubits already on QPU v
    placed_w = np.zeros((n, p), dtype=np.int64)
    assign = [-1] * n
    for q in order:
        free = np.flatnonzero(remaining > 0)
        if free.size == 0:
            raise Infeasible(f"no QPU has capacity left for qubit {q} "
                             f"(total capacity {sum(t.caps)} < {n} qubits)")
        if literal:
            delta = placed_w[q, free] * costs[free, free]
        else:
            delta = costs[free] @ placed_w[q]
        u = int(free[int(np.argmin(delta))])
        assign[q] = u
        remaining[u] -= 1
        for j, wq in neighbors[q]:
            placed_w[j, u] += wq
    return Mapping(tuple(assign))


def check_mapping(m: Mapping, c: Circuit, t: Topology) -> None:
    if len(m.assign) != c.num_qubits:
        raise MappingMismatch(f"mapping covers {len(m.assign)} qubits, circuit has {c.num_qubits}")
    bad = [u for u in m.assign if not 0 <= u < t.p]
    if bad:
        raise MappingMismatch(f"mapping references unknown QPU {bad[0]}")


def derive_indicators(m: Mapping, c: Circuit) -> GateIndicators:
    delta, pair = [], []
    for g in c.gates:
        u, v = m.assign[g.control], m.assign[g.target]
        if u == v:
            delta.append(0)
            pair.append(None)
        else:
            delta.append(1)
            pair.append((min(u, v), max(u, v)))
    return GateIndicators(tuple(delta), tuple(pair))
