"""Plan validation against the nine model constraints, objective and metrics."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .circuit import Circuit, PrecedenceDag, build_precedence, parse_gate_list
from .errors import MalformedDocument, MissingCost
from .mapper import GateIndicators, Mapping, derive_indicators
from .network import Topology, load_topology
from .scheduler import Budget, Schedule, epr_utilization

CONSTRAINTS = ("a", "b", "c", "d", "e", "f", "g", "h", "i")

CONSTRAINT_NAMES = {
    "a": "mapping validity",
    "b": "QPU capacity",
    "c": "gate scheduling",
    "d": "same-QPU indicator",
    "e": "EPR generation requirement",
    "f": "EPR before execution",
    "g": "precedence",
    "h": "undirected mapping indicator",
    "i": "EPR inventory",
}


@dataclass(frozen=True)
class Plan:
    mapping: Mapping
    schedule: Schedule
    indicators: GateIndicators


@dataclass(frozen=True)
class ObjectiveWeights:
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("objective weights must be non-negative")
        if self.alpha == 0 and self.beta == 0:
            raise ValueError("alpha and beta cannot both be zero")


@dataclass(frozen=True)
class LatencyTable:
    """Operation latencies in CX units."""
    t_1q: float = 0.1
    t_2q: float = 1.0
    t_ms: float = 5.0
    t_ep: float = 12.0


@dataclass
class Verdict:
    ok: bool
    witness: dict[str, Any] | None = None


@dataclass
class ValidationReport:
    verdicts: dict[str, Verdict]

    @property
    def feasible(self) -> bool:
        return all(v.ok for v in self.verdicts.values())

    def failed(self) -> list[str]:
        return [k for k in CONSTRAINTS if not self.verdicts[k].ok]

    def to_doc(self) -> dict[str, Any]:
        return {
            "feasible": self.feasible,
            "constraints": {
                k: {"name": CONSTRAINT_NAMES[k], "ok": v.ok, "witness": v.witness}
                for k, v in self.verdicts.items()
            },
        }


@dataclass
class Metrics:
    objective: float
    makespan_slots: int
    runtime_cx: float
    remote_gates: int
    algo_wall_time: float
    epr_series: dict[str, list[int]] = field(default_factory=dict)

    CSV_FIELDS = ("objective", "makespan_slots", "runtime_cx", "remote_gates", "algo_wall_time")

    def to_doc(self) -> dict[str, Any]:
        return asdict(self)

    def csv_row(self) -> dict[str, Any]:
        return {k: getattr(self, k) for k in self.CSV_FIELDS}


def plan_variables(plan: Plan, c: Circuit, t: Topology):
    """Expand a plan into 0/1 arrays ``pi`` (n x p), ``z`` and ``y`` (m x H, slot t at column t-1)."""
    H = plan.schedule.horizon
    n, p, m = c.num_qubits, t.p, c.m
    pi = np.zeros((n, p), dtype=np.int64)
    for q, u in enumerate(plan.mapping.assign[:n]):
        if 0 <= u < p:
            pi[q, u] = 1
    z = np.zeros((m, H), dtype=np.int64)
    y = np.zeros((m, H), dtype=np.int64)
    for k in range(min(m, len(plan.schedule.tau))):
        s = plan.schedule.tau[k]
        if 1 <= s <= H:
            z[k, s - 1] = 1
        e = plan.schedule.tgen[k]
        if e is not None and 1 <= e <= H:
            y[k, e - 1] = 1
    return pi, z, y


def _first(mask: np.ndarray):
    idx = np.argwhere(mask)
    return None if idx.size == 0 else tuple(int(x) for x in idx[0])


def check_variables(pi, z, y, delta, theta, c: Circuit, dag: PrecedenceDag, t: Topology,
                    budget: Budget = Budget.STORED) -> ValidationReport:
    """Check constraints a-i on raw decision variables.

    ``delta`` (length m) and ``theta`` (m x p x p) are the plan's claimed
    indicators; both are recomputed from ``pi`` and compared.
    """
    pi, z, y = (np.asarray(a, dtype=np.int64) for a in (pi, z, y))
    m, H = z.shape
    p = t.p
    caps = np.array(t.caps)
    comms = np.array(t.comms)
    ctrl = np.array([g.control for g in c.gates], dtype=np.int64)
    targ = np.array([g.target for g in c.gates], dtype=np.int64)
    v: dict[str, Verdict] = {}

    rows = pi.sum(axis=1)
    bad = _first(rows != 1)
    v["a"] = Verdict(bad is None, None if bad is None else
                     {"qubit": bad[0], "qpus": np.flatnonzero(pi[bad[0]]).tolist()})

    load = pi.sum(axis=0)
    bad = _first(load > caps)
    v["b"] = Verdict(bad is None, None if bad is None else
                     {"qpu": bad[0], "load": int(load[bad[0]]), "cap": int(caps[bad[0]])})

    zs = z.sum(axis=1)
    bad = _first(zs != 1)
    v["c"] = Verdict(bad is None, None if bad is None else
                     {"gate": bad[0] + 1, "slots": (np.flatnonzero(z[bad[0]]) + 1).tolist()})

    pi_i, pi_j = pi[ctrl], pi[targ]  # m x p
    delta_true = 1 - (pi_i * pi_j).sum(axis=1)
    bad = _first(np.asarray(delta) != delta_true)
    v["d"] = Verdict(bad is None, None if bad is None else
                     {"gate": bad[0] + 1, "claimed": int(delta[bad[0]]),
                      "derived": int(delta_true[bad[0]])})

    ys = y.sum(axis=1)
    bad = _first(ys != delta_true)
    v["e"] = Verdict(bad is None, None if bad is None else
                     {"gate": bad[0] + 1, "epr_count": int(ys[bad[0]]),
                      "required": int(delta_true[bad[0]])})

    cum_y = np.cumsum(y, axis=1)
    cum_z = np.cumsum(z, axis=1)
    bad = _first(cum_y < z - (1 - delta_true)[:, None])
    v["f"] = Verdict(bad is None, None if bad is None else
                     {"gate": bad[0] + 1, "slot": bad[1] + 1})

    # strict precedence: g may be done by slot t only if g' was done by t-1
    prev = np.zeros_like(cum_z)
    prev[:, 1:] = cum_z[:, :-1]
    witness = None
    for a, b in sorted(dag.edges):
        viol = np.flatnonzero(cum_z[b - 1] > prev[a - 1])
        if viol.size:
            witness = {"before": a, "after": b, "slot": int(viol[0]) + 1}
            break
    v["g"] = Verdict(witness is None, witness)

    off = 1 - np.eye(p, dtype=np.int64)
    theta_true = (np.einsum("gu,gv->guv", pi_i, pi_j) + np.einsum("gu,gv->guv", pi_j, pi_i)) * off
    theta_claim = np.asarray(theta) * off
    bad = _first(theta_claim != theta_true)
    v["h"] = Verdict(bad is None, None if bad is None else
                     {"gate": bad[0] + 1, "u": bad[1], "v": bad[2]})

    gen = np.einsum("gt,guv->uvt", y, theta_true)
    use = np.einsum("gt,guv->uvt", z, theta_true)
    s = np.zeros((p, p, H + 1), dtype=np.int64)
    for tt in range(1, H + 1):
        s[:, :, tt] = s[:, :, tt - 1] + gen[:, :, tt - 1] - use[:, :, tt - 1]
    stock = s[:, :, 1:].sum(axis=1)  # p x H
    if budget is Budget.STORED:
        # a pair holds a communication qubit from generation through consumption
        held = cum_y - np.concatenate([np.zeros((m, 1), dtype=np.int64), cum_z[:, :-1]], axis=1)
        charged = np.einsum("gt,guv->ut", held, theta_true)
    else:
        charged = gen.sum(axis=1)
    witness = None
    neg = _first(s < 0)
    if neg is not None:
        witness = {"qpu": neg[0], "peer": neg[1], "slot": neg[2], "reason": "negative inventory"}
    else:
        over = _first(stock > comms[:, None])
        if over is not None:
            witness = {"qpu": over[0], "slot": over[1] + 1, "reason": "stored pairs exceed budget"}
        else:
            over = _first(charged > comms[:, None])
            if over is not None:
                witness = {"qpu": over[0], "slot": over[1] + 1,
                           "reason": "communication qubits exceed budget",
                           "charged": int(charged[over]), "budget": int(comms[over[0]])}
    v["i"] = Verdict(witness is None, witness)
    return ValidationReport(v)


def validate(plan: Plan, c: Circuit, dag: PrecedenceDag, t: Topology,
             budget: Budget = Budget.STORED) -> ValidationReport:
    if len(plan.mapping.assign) != c.num_qubits or len(plan.schedule.tau) != c.m:
        raise MalformedDocument("plan does not match circuit dimensions")
    pi, z, y = plan_variables(plan, c, t)
    return check_variables(pi, z, y, plan.indicators.delta, plan.indicators.theta(t.p),
                           c, dag, t, budget)


def objective(plan: Plan, costs: np.ndarray, w: ObjectiveWeights = ObjectiveWeights()) -> float:
    """alpha * sum of execution slots + beta * sum of QPU-pair costs over remote gates."""
    p = np.asarray(costs).shape[0]
    comm = 0
    for pr in plan.indicators.pair:
        if pr is None:
            continue
        u, v = pr
        if not (0 <= u < p and 0 <= v < p):
            raise MissingCost(f"no cost entry for QPU pair {pr}")
        comm += int(costs[u, v])
    return w.alpha * sum(plan.schedule.tau) + w.beta * comm


def compute_metrics(plan: Plan, costs: np.ndarray, w: ObjectiveWeights = ObjectiveWeights(),
                    lat: LatencyTable = LatencyTable(), wall: float = 0.0) -> Metrics:
    T = plan.schedule.makespan
    return Metrics(
        objective=objective(plan, costs, w),
        makespan_slots=T,
        runtime_cx=T * lat.t_ep,
        remote_gates=plan.indicators.remote_count,
        algo_wall_time=wall,
        epr_series=epr_utilization(plan.schedule),
    )


def plan_to_doc(plan: Plan, c: Circuit, t: Topology, budget: Budget = Budget.STORED) -> dict:
    """Self-contained plan document: instance plus decisions."""
    return {
        "circuit": c.to_doc(),
        "topology": t.to_doc(),
        "budget": Budget(budget).value,
        "mapping": plan.mapping.to_doc(),
        "schedule": plan.schedule.to_doc(),
    }


def dump_plan(plan: Plan, c: Circuit, t: Topology, budget: Budget = Budget.STORED) -> str:
    return json.dumps(plan_to_doc(plan, c, t, budget), indent=1) + "\n"


def load_plan(doc: str | bytes | dict):
    """Inverse of :func:`plan_to_doc`; returns ``(plan, circuit, topology, budget)``."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"not valid JSON: {exc}") from exc
    try:
        c = parse_gate_list(doc["circuit"])
        t = load_topology(doc["topology"])
        mapping = Mapping.from_doc(doc["mapping"])
        sched = Schedule.from_doc(doc["schedule"])
        budget = Budget(doc.get("budget", "stored"))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocument(f"bad plan document: {exc}") from exc
    if len(mapping.assign) != c.num_qubits or len(sched.tau) != c.m:
        raise MalformedDocument("plan does not match circuit dimensions")
    if any(not 0 <= u < t.p for u in mapping.assign):
        raise MalformedDocument("mapping references unknown QPU")
    return Plan(mapping, sched, derive_indicators(mapping, c)), c, t, budget


def validate_document(doc) -> ValidationReport:
    plan, c, t, budget = load_plan(doc)
    return validate(plan, c, build_precedence(c), t, budget)
