"""QPU cloud topology: nodes, links, generators and hop-count cost matrix."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import BadNodeCount, DisconnectedTopology, MalformedDocument

TOPOLOGY_KINDS = ("square", "triangle", "hexagonal", "random")

_RANDOM_LINK_P = 0.5
_RANDOM_RETRIES = 100


@dataclass(frozen=True)
class QpuSpec:
    id: int
    cap: int   # computing qubits
    comm: int  # communication qubits (EPR endpoints per slot)

    def __post_init__(self):
        if self.cap < 0 or self.comm < 0:
            raise MalformedDocument(f"QPU {self.id}: cap and comm must be non-negative")


@dataclass(frozen=True)
class Topology:
    nodes: tuple[QpuSpec, ...]
    links: frozenset[tuple[int, int]]

    def __post_init__(self):
        for k, node in enumerate(self.nodes):
            if node.id != k:
                raise MalformedDocument(f"node ids must be dense 0..p-1, found {node.id} at {k}")
        p = len(self.nodes)
        for u, v in self.links:
            if u == v:
                raise MalformedDocument(f"self-link on node {u}")
            if not (0 <= u < p and 0 <= v < p):
                raise MalformedDocument(f"link ({u}, {v}) references unknown node")
            if u > v:
                raise MalformedDocument("links must be stored as (min, max)")

    @classmethod
    def build(cls, caps, comms, links) -> Topology:
        nodes = tuple(QpuSpec(k, int(c), int(e)) for k, (c, e) in enumerate(zip(caps, comms)))
        return cls(nodes, frozenset((min(u, v), max(u, v)) for u, v in links))

    @property
    def p(self) -> int:
        return len(self.nodes)

    @property
    def caps(self) -> list[int]:
        return [n.cap for n in self.nodes]

    @property
    def comms(self) -> list[int]:
        return [n.comm for n in self.nodes]

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.p)]
        for u, v in sorted(self.links):
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def with_budgets(self, cap: int | None = None, comm: int | None = None) -> Topology:
        nodes = tuple(QpuSpec(n.id, n.cap if cap is None else cap, n.comm if comm is None else comm)
                      for n in self.nodes)
        return Topology(nodes, self.links)

    def to_doc(self) -> dict[str, Any]:
        return {
            "nodes": [{"id": n.id, "cap": n.cap, "comm": n.comm} for n in self.nodes],
            "links": [list(l) for l in sorted(self.links)],
        }


def load_topology(doc: str | bytes | dict) -> Topology:
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"not valid JSON: {exc}") from exc
    try:
        nodes = sorted(doc["nodes"], key=lambda n: n["id"])
        specs = tuple(QpuSpec(int(n["id"]), int(n["cap"]), int(n["comm"])) for n in nodes)
        links = frozenset((min(u, v), max(u, v)) for u, v in doc["links"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocument(f"bad topology document: {exc}") from exc
    return Topology(specs, links)


def dump_topology(t: Topology) -> str:
    return json.dumps(t.to_doc())


def _components(p: int, links) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(p)]
    for u, v in links:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * p
    comps = []
    for s in range(p):
        if seen[s]:
            continue
        seen[s] = True
        comp, queue = [], deque([s])
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        comps.append(sorted(comp))
    return comps


def all_pairs_costs(t: Topology) -> np.ndarray:
    """Hop-count shortest paths between every pair of QPUs (BFS from each node)."""
    p = t.p
    adj = t.adjacency()
    cost = np.full((p, p), -1, dtype=np.int64)
    for s in range(p):
        cost[s, s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if cost[s, v] < 0:
                    cost[s, v] = cost[s, u] + 1
                    queue.append(v)
        if s == 0 and (cost[0] < 0).any():
            raise DisconnectedTopology([int(v) for v in np.flatnonzero(cost[0] < 0)])
    cost.setflags(write=False)
    return cost


def _lattice_links(kind: str, s: int) -> set[tuple[int, int]]:
    idx = lambda r, c: r * s + c  # noqa: E731
    links = set()

    def add(a, b):
        if a != b:
            links.add((min(a, b), max(a, b)))

    for r in range(s):
        for c in range(s):
            if kind == "hexagonal":
                # 6-neighbour torus: right, down, down-right with wrap-around
                add(idx(r, c), idx(r, (c + 1) % s))
                add(idx(r, c), idx((r + 1) % s, c))
                add(idx(r, c), idx((r + 1) % s, (c + 1) % s))
                continue
            if c + 1 < s:
                add(idx(r, c), idx(r, c + 1))
            if r + 1 < s:
                add(idx(r, c), idx(r + 1, c))
            if kind == "triangle" and r + 1 < s and c + 1 < s:
                add(idx(r, c), idx(r + 1, c + 1))
    return links


def _random_links(n: int, rng: np.random.Generator) -> set[tuple[int, int]]:
    candidates = [(u, v) for u in range(n) for v in range(u + 1, n)]
    links: set[tuple[int, int]] = set()
    for _ in range(_RANDOM_RETRIES):
        keep = rng.random(len(candidates)) < _RANDOM_LINK_P
        links = {e for e, k in zip(candidates, keep) if k}
        if len(_components(n, links)) == 1:
            return links
    # spanning repair: chain the components through their smallest members
    comps = _components(n, links)
    for a, b in zip(comps, comps[1:]):
        links.add((min(a[0], b[0]), max(a[0], b[0])))
    return links


def gen_topology(kind: str, n: int, cap: int, comm: int, seed: int | None = None) -> Topology:
    """Generate a lattice (``square``, ``triangle``, ``hexagonal``) or ``random`` cloud."""
    if kind not in TOPOLOGY_KINDS:
        raise MalformedDocument(f"unknown topology kind {kind!r}")
    if n < 2:
        raise BadNodeCount(f"need at least 2 nodes, got {n}")
    if kind == "random":
        if seed is None:
            raise MalformedDocument("random topology requires a seed")
        links = _random_links(n, np.random.default_rng(seed))
    else:
        s = math.isqrt(n)
        if s * s != n:
            raise BadNodeCount(f"{kind} lattice needs a perfect-square node count, got {n}")
        if kind == "hexagonal" and s < 3:
            raise BadNodeCount("hexagonal torus needs a side of at least 3")
        links = _lattice_links(kind, s)
    return Topology.build([cap] * n, [comm] * n, links)


def default_cloud(seed: int) -> Topology:
    """Five QPUs with 20 computing and 10 communication qubits, random links."""
    return gen_topology("random", 5, cap=20, comm=10, seed=seed)


def e_over_n(t: Topology) -> float:
    return len(t.links) / t.p
