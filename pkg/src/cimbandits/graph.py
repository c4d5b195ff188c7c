"""Directed graphs with indexed edges, edge-list IO and reachability utilities.

Edges are the unit everything else hangs off: edge i of a graph with m edges
is the i-th base arm, probability vectors and live-edge masks are arrays of
length m in edge order, and edge order is load order.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable

import numpy as np


class Graph:
    """Immutable directed graph with dense node and edge indices.

    Nodes are integers in [0, n); edges keep their construction order and are
    addressed by index in [0, m).  Parallel edges and self-loops are allowed;
    a self-loop never activates a new node but still counts as an arm.
    """

    __slots__ = ("n", "m", "edges", "out_edges", "in_edges", "labels")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], labels: list[str] | None = None):
        edges = tuple((int(u), int(v)) for u, v in edges)
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references a node outside [0, {n})")
        self.n = int(n)
        self.m = len(edges)
        self.edges = edges
        out_e: list[list[int]] = [[] for _ in range(n)]
        in_e: list[list[int]] = [[] for _ in range(n)]
        for i, (u, v) in enumerate(edges):
            out_e[u].append(i)
            in_e[v].append(i)
        self.out_edges = tuple(tuple(es) for es in out_e)
        self.in_edges = tuple(tuple(es) for es in in_e)
        if labels is None:
            labels = [str(i) for i in range(n)]
        if len(labels) != n:
            raise ValueError("labels length must equal node count")
        self.labels = tuple(labels)

    def source(self, e: int) -> int:
        return self.edges[e][0]

    def target(self, e: int) -> int:
        return self.edges[e][1]

    def out_degree(self, u: int) -> int:
        return len(self.out_edges[u])

    def in_degree(self, v: int) -> int:
        return len(self.in_edges[v])

    def node_id(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown node label {label!r}") from None

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def validate_probs(g: Graph, values) -> np.ndarray:
    """Coerce to a float array of length g.m with entries in [0, 1]."""
    arr = np.asarray(values, dtype=float)
    if arr.shape != (g.m,):
        raise ValueError(f"expected {g.m} probabilities, got shape {arr.shape}")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    return arr


def validate_intervals(g: Graph, lower, upper) -> tuple[np.ndarray, np.ndarray]:
    """Coerce per-edge probability intervals; requires lower <= upper everywhere."""
    lo = validate_probs(g, lower)
    hi = validate_probs(g, upper)
    if np.any(lo > hi):
        raise ValueError("interval lower bounds must not exceed upper bounds")
    return lo, hi


def load_edge_list(text: str | Iterable[str]) -> tuple[Graph, np.ndarray | None]:
    """Parse edge-list text into a graph and, if present, edge probabilities.

    Each data line is "u v" or "u v p"; lines starting with '#' and blank
    lines are skipped.  Node labels are arbitrary whitespace-free strings and
    are mapped to dense ids in first-appearance order.  All data lines must
    agree on whether they carry a probability.
    """
    if isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = [line.rstrip("\r\n") for line in text]
    index: dict[str, int] = {}
    labels: list[str] = []
    edges: list[tuple[int, int]] = []
    probs: list[float] = []
    has_probs: bool | None = None

    def node(tok: str) -> int:
        if tok not in index:
            index[tok] = len(labels)
            labels.append(tok)
        return index[tok]

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise ValueError(f"line {lineno}: parse error, expected 'u v' or 'u v p'")
        if len(tokens) > 3:
            raise ValueError(f"line {lineno}: parse error, too many fields")
        carries = len(tokens) == 3
        if has_probs is None:
            has_probs = carries
        elif has_probs != carries:
            raise ValueError(f"line {lineno}: format error, mixed lines with and without probabilities")
        u = node(tokens[0])
        v = node(tokens[1])
        edges.append((u, v))
        if carries:
            try:
                p = float(tokens[2])
            except ValueError:
                raise ValueError(f"line {lineno}: parse error, bad probability {tokens[2]!r}") from None
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"line {lineno}: range error, probability {p} outside [0, 1]")
            probs.append(p)

    g = Graph(len(labels), edges, labels)
    if has_probs:
        return g, np.array(probs, dtype=float)
    return g, None


def dumps_edge_list(g: Graph, probs=None) -> str:
    """Serialize back to edge-list text; inverse of load_edge_list."""
    if probs is not None:
        probs = validate_probs(g, probs)
    out = []
    for i, (u, v) in enumerate(g.edges):
        if probs is None:
            out.append(f"{g.labels[u]} {g.labels[v]}")
        else:
            out.append(f"{g.labels[u]} {g.labels[v]} {float(probs[i])!r}")
    return "\n".join(out) + ("\n" if out else "")


def assign_weighted_cascade(g: Graph) -> np.ndarray:
    """Weighted-cascade probabilities: p(u, v) = 1 / in_degree(v)."""
    probs = np.empty(g.m, dtype=float)
    for i, (_, v) in enumerate(g.edges):
        probs[i] = 1.0 / g.in_degree(v)
    return probs


def constant_probs(g: Graph, p: float) -> np.ndarray:
    """Uniform probability p on every edge."""
    if not (0.0 <= p <= 1.0):
        raise ValueError("probability must lie in [0, 1]")
    return np.full(g.m, float(p))


def reachable_nodes(g: Graph, seeds: Iterable[int]) -> set[int]:
    """Nodes reachable from the seed set along directed edges, seeds included."""
    seeds = set(int(u) for u in seeds)
    for u in seeds:
        if not (0 <= u < g.n):
            raise ValueError(f"unknown node id {u}")
    seen = set(seeds)
    queue = deque(seeds)
    while queue:
        u = queue.popleft()
        for e in g.out_edges[u]:
            v = g.target(e)
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def max_reach(g: Graph) -> int:
    """Largest number of nodes any single node can reach, itself included.

    This is the smoothness coefficient that scales reward sensitivity to
    per-edge probability perturbations; 0 for the empty graph.
    """
    if g.n == 0:
        return 0
    return max(len(reachable_nodes(g, [u])) for u in range(g.n))


def reachable_edges_from(g: Graph, seeds: Iterable[int]) -> set[int]:
    """Edges whose source is reachable from the seed set (seeds count)."""
    return {e for u in reachable_nodes(g, seeds) for e in g.out_edges[u]}
