"""Offline seed selection: greedy for a fixed probability vector, and
optimistic variants that jointly pick probabilities from per-edge intervals.

Because the expected A spread is affine in each edge probability, the joint
optimum always sits on interval boundaries.  Edges the competitor cannot
reach are safely pinned to their upper bounds; the rest are either
pre-determined (single-step graphs), enumerated (few competitor-reachable
edges), or set heuristically.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .diffusion import (
    Action,
    CapacityError,
    TieRule,
    exact_spread,
    is_single_step,
    rewards_on_masks,
)
from .graph import Graph, reachable_edges_from, validate_intervals, validate_probs


@dataclass
class OracleResult:
    """Chosen A seeds, the probability vector they were optimized under, and
    the oracle's own spread estimate for that pair."""

    seeds_a: frozenset
    mu_used: np.ndarray
    value: float


class _Evaluator:
    """Spread evaluation shared by one oracle call.

    Monte-Carlo mode pre-draws one mask block per greedy step (common random
    numbers across candidates) plus a dedicated block for the final value, so
    reported values are comparable across budgets under the same generator.
    """

    def __init__(self, g, probs, seeds_b, k, rule, mc_samples, rng, exact, max_enum_edges):
        self.g = g
        self.probs = probs
        self.seeds_b = frozenset(seeds_b)
        self.k = k
        self.rule = rule
        self.exact = exact
        self.max_enum_edges = max_enum_edges
        if not exact:
            if rng is None:
                rng = np.random.default_rng()
            self.step_rng, eval_rng = rng.spawn(2)
            self.mc_samples = mc_samples
            self.eval_masks = eval_rng.random((mc_samples, g.m)) < probs
            self.step_masks = None

    def new_step(self):
        if not self.exact:
            self.step_masks = self.step_rng.random((self.mc_samples, self.g.m)) < self.probs

    def candidate_value(self, seeds_a) -> float:
        action = Action(seeds_a, self.seeds_b, self.k)
        if self.exact:
            return exact_spread(self.g, self.probs, action, self.rule, self.max_enum_edges)
        return float(rewards_on_masks(self.g, self.step_masks, action, self.rule).mean())

    def final_value(self, seeds_a) -> float:
        action = Action(seeds_a, self.seeds_b, self.k)
        if self.exact:
            return exact_spread(self.g, self.probs, action, self.rule, self.max_enum_edges)
        return float(rewards_on_masks(self.g, self.eval_masks, action, self.rule).mean())


def greedy_seed_select(
    g: Graph,
    probs,
    seeds_b,
    k: int,
    rule: TieRule,
    mc_samples: int = 1000,
    rng: np.random.Generator | None = None,
    exact: bool = False,
    max_enum_edges: int = 20,
) -> OracleResult:
    """Greedy marginal-gain seed selection for a fixed probability vector.

    Adds k nodes one at a time, each maximizing the estimated A spread given
    the competitor's seeds; ties break to the lowest node id.  Nodes in
    seeds_b stay selectable.  With exact=True every evaluation uses
    exact_spread, otherwise Monte Carlo with mc_samples draws.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > g.n:
        raise ValueError(f"k = {k} exceeds node count {g.n}")
    if mc_samples < 1:
        raise ValueError("mc_samples must be at least 1")
    probs = validate_probs(g, probs)
    ev = _Evaluator(g, probs, seeds_b, k, rule, mc_samples, rng, exact, max_enum_edges)

    chosen: set = set()
    for _ in range(k):
        ev.new_step()
        best_u = None
        best_v = -np.inf
        for u in range(g.n):
            if u in chosen:
                continue
            v = ev.candidate_value(chosen | {u})
            if v > best_v:
                best_u, best_v = u, v
        chosen.add(best_u)
    return OracleResult(frozenset(chosen), probs, ev.final_value(chosen))


def exhaustive_seed_select(
    g: Graph,
    probs,
    seeds_b,
    k: int,
    rule: TieRule,
    mc_samples: int = 1000,
    rng: np.random.Generator | None = None,
    exact: bool = True,
    max_enum_edges: int = 20,
) -> OracleResult:
    """Best size-k seed set by brute force; only sensible on tiny graphs.

    Ties break to the lexicographically smallest node tuple.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > g.n:
        raise ValueError(f"k = {k} exceeds node count {g.n}")
    probs = validate_probs(g, probs)
    ev = _Evaluator(g, probs, seeds_b, k, rule, mc_samples, rng, exact, max_enum_edges)
    ev.new_step()
    best = None
    best_v = -np.inf
    for combo in combinations(range(g.n), k):
        v = ev.candidate_value(combo)
        if v > best_v:
            best, best_v = combo, v
    return OracleResult(frozenset(best), probs, ev.final_value(best))


def _require_intervals(g, lower, upper):
    return validate_intervals(g, lower, upper)


def ofu_bipartite(
    g: Graph,
    lower,
    upper,
    seeds_b,
    k: int,
    rule: TieRule,
    mc_samples: int = 1000,
    rng: np.random.Generator | None = None,
    exact: bool = True,
) -> OracleResult:
    """Optimistic oracle for source-to-target graphs.

    Single-step structure lets the probability vector be pre-determined:
    under A>B the competitor can never beat A to a target, so every edge
    takes its upper bound; under B>A the competitor's own out-edges take
    their lower bounds and everything else its upper bound.  Greedy then
    runs on the resolved vector.
    """
    lower, upper = _require_intervals(g, lower, upper)
    if not is_single_step(g):
        raise ValueError("graph is not bipartite: some node has both in- and out-edges")
    mu = upper.copy()
    if rule is TieRule.B_OVER_A:
        for u in seeds_b:
            for e in g.out_edges[u]:
                mu[e] = lower[e]
    res = greedy_seed_select(g, mu, seeds_b, k, rule, mc_samples, rng, exact)
    return OracleResult(res.seeds_a, mu, res.value)


def ofu_boundary_enum(
    g: Graph,
    lower,
    upper,
    seeds_b,
    k: int,
    rule: TieRule,
    max_enum_edges: int = 12,
    mc_samples: int = 1000,
    rng: np.random.Generator | None = None,
    exact: bool = False,
) -> OracleResult:
    """Optimistic oracle by enumerating boundary assignments.

    Edges not reachable from the competitor's seeds are pinned to their upper
    bounds; each lower/upper combination of the remaining r edges gets a
    greedy run, and the best (seeds, vector) pair wins.  Raises CapacityError
    when r exceeds max_enum_edges so callers can fall back to the heuristic.
    Corner ties keep the smallest corner index (bit j set means edge j of the
    sorted reachable list takes its upper bound).
    """
    lower, upper = _require_intervals(g, lower, upper)
    seeds_b = frozenset(seeds_b)
    enum_edges = sorted(reachable_edges_from(g, seeds_b))
    if len(enum_edges) > max_enum_edges:
        raise CapacityError(
            f"{len(enum_edges)} competitor-reachable edges exceed the "
            f"enumeration limit of {max_enum_edges}"
        )
    if rng is None:
        rng = np.random.default_rng()
    corner_rngs = rng.spawn(1 << len(enum_edges))
    best = None
    for corner in range(1 << len(enum_edges)):
        mu = upper.copy()
        for j, e in enumerate(enum_edges):
            mu[e] = upper[e] if corner >> j & 1 else lower[e]
        res = greedy_seed_select(
            g, mu, seeds_b, k, rule, mc_samples, corner_rngs[corner], exact
        )
        if best is None or res.value > best.value:
            best = OracleResult(res.seeds_a, mu, res.value)
    return best


def ofu_general_heuristic(
    g: Graph,
    lower,
    upper,
    seeds_b,
    k: int,
    rule: TieRule,
    mc_samples: int = 1000,
    rng: np.random.Generator | None = None,
    exact: bool = False,
) -> OracleResult:
    """Optimistic oracle for general graphs without enumeration.

    Under B>A, the competitor's direct out-edges take their lower bounds
    (those first-level assignments are always correct) and all other edges
    their upper bounds; deeper edges matter less as influence decays.  Under
    A>B every edge takes its upper bound.
    """
    lower, upper = _require_intervals(g, lower, upper)
    mu = upper.copy()
    if rule is TieRule.B_OVER_A:
        for u in seeds_b:
            for e in g.out_edges[u]:
                mu[e] = lower[e]
    res = greedy_seed_select(g, mu, seeds_b, k, rule, mc_samples, rng, exact)
    return OracleResult(res.seeds_a, mu, res.value)


def ofu_auto(
    g: Graph,
    lower,
    upper,
    seeds_b,
    k: int,
    rule: TieRule,
    max_enum_edges: int = 12,
    mc_samples: int = 1000,
    rng: np.random.Generator | None = None,
    exact: bool = False,
) -> OracleResult:
    """Pick the strongest applicable optimistic oracle.

    Single-step graphs get the pre-determined vector; otherwise boundary
    enumeration when the competitor reaches few edges, else the heuristic.
    """
    if is_single_step(g):
        return ofu_bipartite(g, lower, upper, seeds_b, k, rule, mc_samples, rng, exact)
    try:
        return ofu_boundary_enum(
            g, lower, upper, seeds_b, k, rule, max_enum_edges, mc_samples, rng, exact
        )
    except CapacityError:
        return ofu_general_heuristic(g, lower, upper, seeds_b, k, rule, mc_samples, rng, exact)
