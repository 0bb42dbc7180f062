"""Just-in-time slot scheduling of CNOT gates with EPR-pair generation.

Gates are visited once in a topological order. Each starts its scan at one
slot past its latest predecessor and takes the first slot where both
endpoint QPUs still have a free communication qubit. Nothing is revisited.

Two accounting rules for communication qubits are supported:

``stored`` (default)
    a pair holds one communication qubit on each endpoint for every slot from
    its generation slot through the slot of the gate that consumes it.
``generation``
    only generation events are charged against the per-slot budget; pairs
    waiting in storage are bounded separately by the inventory limit.

The two rules coincide for in-slot generation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

from .circuit import Circuit, PrecedenceDag
from .errors import HorizonExhausted, MalformedDocument, MappingMismatch
from .mapper import GateIndicators, Mapping, check_mapping
from .network import Topology


class GenMode(str, Enum):
    IN_SLOT = "inslot"
    LATEST_EARLIER = "latest-earlier"


class Budget(str, Enum):
    STORED = "stored"
    GENERATION = "generation"


@dataclass(frozen=True)
class Schedule:
    horizon: int
    tau: tuple[int, ...]               # execution slot of gate id k+1
    tgen: tuple[int | None, ...]       # EPR generation slot, None for local gates
    probes: int = field(default=0, compare=False)

    @property
    def makespan(self) -> int:
        return max(self.tau, default=0)

    def to_doc(self) -> dict[str, Any]:
        return {
            "horizon": self.horizon,
            "gates": [{"id": k + 1, "slot": t, "epr_slot": e}
                      for k, (t, e) in enumerate(zip(self.tau, self.tgen))],
        }

    @classmethod
    def from_doc(cls, doc: dict) -> Schedule:
        try:
            gates = sorted(doc["gates"], key=lambda g: g["id"])
            if [g["id"] for g in gates] != list(range(1, len(gates) + 1)):
                raise MalformedDocument("schedule gate ids must be 1..m")
            tau = tuple(int(g["slot"]) for g in gates)
            tgen = tuple(None if g.get("epr_slot") is None else int(g["epr_slot"]) for g in gates)
            return cls(int(doc["horizon"]), tau, tgen)
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDocument(f"bad schedule document: {exc}") from exc


@dataclass(frozen=True)
class EprInventory:
    s: np.ndarray       # p x p x (H+1) stored pairs after each slot, slot 0 = initial
    usage: np.ndarray   # p x (H+1) communication qubits charged per slot


class _Ledger:
    """Per-QPU (and optionally per-pair) communication-qubit accounting."""

    def __init__(self, comms: Sequence[int], horizon: int, budget: Budget,
                 pair_caps: dict[tuple[int, int], int] | None):
        p = len(comms)
        self.cap = list(comms)
        self.budget = budget
        size = horizon + 2
        self.occ = [[0] * size for _ in range(p)]   # charged per slot
        self.held = [[0] * size for _ in range(p)]  # stored after slot (generation rule)
        self.pair_caps = pair_caps
        self.pair_occ: dict[tuple[int, int], list[int]] = {}
        self.pair_held: dict[tuple[int, int], list[int]] = {}
        self.size = size

    def _pair_rows(self, pr):
        if pr not in self.pair_occ:
            self.pair_occ[pr] = [0] * self.size
            self.pair_held[pr] = [0] * self.size
        return self.pair_occ[pr], self.pair_held[pr]

    def _free(self, pr, t: int) -> bool:
        a, b = pr
        if self.occ[a][t] >= self.cap[a] or self.occ[b][t] >= self.cap[b]:
            return False
        if self.pair_caps is not None:
            return self._pair_rows(pr)[0][t] < self.pair_caps.get(pr, 0)
        return True

    def _storable(self, pr, t: int) -> bool:
        a, b = pr
        if self.held[a][t] >= self.cap[a] or self.held[b][t] >= self.cap[b]:
            return False
        if self.pair_caps is not None:
            return self._pair_rows(pr)[1][t] < self.pair_caps.get(pr, 0)
        return True

    def place(self, pr, t: int, mode: GenMode) -> int | None:
        """Generation slot for a remote gate executed at ``t``, or None if ``t`` is infeasible."""
        stored = self.budget is Budget.STORED
        if stored and not self._free(pr, t):
            return None
        if mode is GenMode.LATEST_EARLIER:
            for s in range(t - 1, 0, -1):
                ok_window = self._free(pr, s) if stored else self._storable(pr, s)
                if not ok_window:
                    break
                if stored or self._free(pr, s):
                    return s
        if stored or self._free(pr, t):
            return t
        return None

    def commit(self, pr, tgen: int, t: int) -> None:
        a, b = pr
        rows = [self.occ[a], self.occ[b]]
        held = [self.held[a], self.held[b]]
        if self.pair_caps is not None:
            po, ph = self._pair_rows(pr)
            rows.append(po)
            held.append(ph)
        if self.budget is Budget.STORED:
            for row in rows:
                for s in range(tgen, t + 1):
                    row[s] += 1
        else:
            for row in rows:
                row[tgen] += 1
        for row in held:
            for s in range(tgen, t):
                row[s] += 1


def jit_scan(order: Sequence[int], preds: Sequence[Sequence[int]],
             pairs: Sequence[tuple[int, int] | None], comms: Sequence[int], horizon: int,
             mode: GenMode = GenMode.IN_SLOT, budget: Budget = Budget.STORED,
             pair_caps: dict[tuple[int, int], int] | None = None):
    """Earliest-feasible slot scan over gate ids in ``order``.

    ``preds[g]`` lists immediate predecessors of gate ``g`` (1-based) and
    ``pairs[g - 1]`` is the QPU pair of a remote gate or None. Returns
    ``(tau, tgen, usage, probes)``.
    """
    m = len(pairs)
    ledger = _Ledger(comms, horizon, Budget(budget), pair_caps)
    mode = GenMode(mode)
    tau = [0] * m
    tgen: list[int | None] = [None] * m
    probes = 0
    for g in order:
        t = 1 + max((tau[h - 1] for h in preds[g]), default=0)
        pr = pairs[g - 1]
        while True:
            if t > horizon:
                raise HorizonExhausted(f"gate {g} found no feasible slot within horizon {horizon}")
            probes += 1
            if pr is None:
                tau[g - 1] = t
                break
            s = ledger.place(pr, t, mode)
            if s is not None:
                ledger.commit(pr, s, t)
                tau[g - 1], tgen[g - 1] = t, s
                break
            t += 1
    usage = np.array([row[: horizon + 1] for row in ledger.occ], dtype=np.int64)
    return tau, tgen, usage, probes


def reconstruct_inventory(tau, tgen, pairs, p: int, horizon: int) -> np.ndarray:
    """Stored pairs per ordered QPU pair after each slot, by forward recursion from zero."""
    gen = np.zeros((p, p, horizon + 1), dtype=np.int64)
    use = np.zeros_like(gen)
    for t, e, pr in zip(tau, tgen, pairs):
        if pr is None:
            continue
        u, v = pr
        gen[u, v, e] += 1
        gen[v, u, e] += 1
        use[u, v, t] += 1
        use[v, u, t] += 1
    s = np.zeros_like(gen)
    for t in range(1, horizon + 1):
        s[:, :, t] = s[:, :, t - 1] + gen[:, :, t] - use[:, :, t]
    return s


def schedule(c: Circuit, dag: PrecedenceDag, m: Mapping, ind: GateIndicators, t: Topology,
             horizon: int | None = None, mode: GenMode = GenMode.IN_SLOT,
             budget: Budget = Budget.STORED) -> tuple[Schedule, EprInventory]:
    """Schedule gates in program order. ``horizon`` defaults to the gate count."""
    check_mapping(m, c, t)
    if len(ind.delta) != c.m:
        raise MappingMismatch(f"indicators cover {len(ind.delta)} gates, circuit has {c.m}")
    H = c.m if horizon is None else horizon
    if H < 1 and c.m:
        raise MalformedDocument("horizon must be at least 1")
    order = range(1, c.m + 1)
    tau, tgen, usage, probes = jit_scan(order, dag.predecessors(), ind.pair, t.comms, H,
                                        mode, budget)
    sch = Schedule(H, tuple(tau), tuple(tgen), probes)
    inv = EprInventory(reconstruct_inventory(tau, tgen, ind.pair, t.p, H), usage)
    return sch, inv


def epr_utilization(sch: Schedule) -> dict[str, list[int]]:
    """EPR pairs generated and consumed in each slot 1..makespan."""
    T = sch.makespan
    generated = [0] * T
    consumed = [0] * T
    for t, e in zip(sch.tau, sch.tgen):
        if e is not None:
            generated[e - 1] += 1
            consumed[t - 1] += 1
    return {"generated": generated, "consumed": consumed}


def timeline(sch: Schedule) -> list[dict[str, Any]]:
    """Gate ids grouped by slot, each tagged local or remote."""
    slots: list[list[dict[str, Any]]] = [[] for _ in range(sch.makespan)]
    for k, (t, e) in enumerate(zip(sch.tau, sch.tgen)):
        slots[t - 1].append({"id": k + 1, "kind": "local" if e is None else "remote"})
    return [{"slot": i + 1, "gates": gs} for i, gs in enumerate(slots)]
