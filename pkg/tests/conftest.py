import numpy as np
import pytest

from uniq_dqc import Circuit, Topology, gen_topology, random_circuit
from uniq_dqc.pipeline import Instance


def line_topology(p, cap, comm):
    return Topology.build([cap] * p, [comm] * p, [(u, u + 1) for u in range(p - 1)])


def random_instance(seed, max_qubits=10, max_gates=30, max_qpus=5, comm=None):
    """Random circuit on a random cloud with enough total capacity."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_qubits + 1))
    m = int(rng.integers(0, max_gates + 1))
    p = int(rng.integers(2, max_qpus + 1))
    cap = int(np.ceil(n / p)) + int(rng.integers(0, 3))
    e = int(rng.integers(1, 4)) if comm is None else comm
    return Instance(random_circuit(n, m, seed), gen_topology("random", p, cap, e, seed=seed))


@pytest.fixture
def two_qpu_pair():
    return line_topology(2, 2, 1)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
