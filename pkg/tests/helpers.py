"""Shared fixtures for the test suite."""
import numpy as np

from cimbandits.graph import Graph

# Source-to-target benchmark: 6 source nodes (ids 0..5), 12 targets (6..17),
# each source covering 3 targets in an overlapping ring.  Sources 2 and 4 are
# clearly strong and the rest clearly weak, so ignorance of the weights is
# expensive while knowledge of them pins the optimum.
RING_EDGES = [(i, 6 + (2 * i + j) % 12) for i in range(6) for j in range(3)]
RING_WEIGHTS = np.array([
    0.15, 0.22, 0.18,  # source 0
    0.12, 0.25, 0.10,  # source 1
    0.80, 0.85, 0.75,  # source 2
    0.20, 0.16, 0.24,  # source 3
    0.78, 0.82, 0.76,  # source 4
    0.14, 0.11, 0.19,  # source 5
])


def ring_fixture():
    g = Graph(18, RING_EDGES, labels=[f"l{i}" for i in range(6)] + [f"r{j}" for j in range(12)])
    return g, RING_WEIGHTS.copy()


def transitive_closure_counts(g: Graph) -> list:
    """Reachable-set sizes per node via boolean matrix closure."""
    if g.n == 0:
        return []
    adj = np.eye(g.n, dtype=bool)
    for u, v in g.edges:
        adj[u, v] = True
    while True:
        nxt = adj | (adj @ adj)
        if (nxt == adj).all():
            break
        adj = nxt
    return adj.sum(axis=1).tolist()
