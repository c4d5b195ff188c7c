"""Two-item competitive cascade simulation with dominance tie-breaking.

Both items spread synchronously over a shared live-edge realization: every
edge flips one coin, and whichever item first crosses it uses that outcome.
A node reached by both items in the same step adopts the dominant one.
Spread values can be estimated by Monte Carlo (vectorized over samples) or
computed exactly, by closed form on single-step graphs and by live-edge
enumeration otherwise.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, validate_probs


class CapacityError(ValueError):
    """Raised when an exact computation would exceed its enumeration budget."""


class TieRule(enum.Enum):
    """Dominance rule for same-step conflicts, including shared seeds."""

    A_OVER_B = "A>B"
    B_OVER_A = "B>A"

    @classmethod
    def parse(cls, token: str) -> "TieRule":
        for rule in cls:
            if token in (rule.value, rule.name, rule.name.lower()):
                return rule
        raise ValueError(f"unknown tie rule {token!r}, expected 'A>B' or 'B>A'")


@dataclass(frozen=True)
class Action:
    """A joint seed placement: our seeds, the competitor's seeds, our budget."""

    seeds_a: frozenset
    seeds_b: frozenset
    budget_k: int

    def __init__(self, seeds_a, seeds_b, budget_k: int):
        object.__setattr__(self, "seeds_a", frozenset(int(u) for u in seeds_a))
        object.__setattr__(self, "seeds_b", frozenset(int(u) for u in seeds_b))
        object.__setattr__(self, "budget_k", int(budget_k))
        if self.budget_k < 1:
            raise ValueError("budget_k must be positive")
        if len(self.seeds_a) > self.budget_k:
            raise ValueError(
                f"budget violation: |seeds_a| = {len(self.seeds_a)} exceeds k = {self.budget_k}"
            )


@dataclass
class PropagationOutcome:
    """One round of feedback: who ended up with what, and which arms fired.

    ``triggered`` holds every out-edge of an activated node; ``observations``
    maps exactly those edges to their live/blocked bit.
    """

    activated_a: set
    activated_b: set
    triggered: set
    observations: dict
    reward: int
    action: Action = field(default=None)

    def to_dict(self) -> dict:
        return {
            "activated_a": sorted(self.activated_a),
            "activated_b": sorted(self.activated_b),
            "triggered": sorted(self.triggered),
            "observations": {str(e): int(x) for e, x in self.observations.items()},
            "reward": self.reward,
            "action": None
            if self.action is None
            else {
                "seeds_a": sorted(self.action.seeds_a),
                "seeds_b": sorted(self.action.seeds_b),
                "budget_k": self.action.budget_k,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PropagationOutcome":
        action = None
        if d.get("action") is not None:
            a = d["action"]
            action = Action(a["seeds_a"], a["seeds_b"], a["budget_k"])
        return cls(
            activated_a=set(d["activated_a"]),
            activated_b=set(d["activated_b"]),
            triggered=set(d["triggered"]),
            observations={int(e): int(x) for e, x in d["observations"].items()},
            reward=int(d["reward"]),
            action=action,
        )


def resolve_seed_overlap(action: Action, rule: TieRule) -> tuple[set, set]:
    """Step-0 ownership: shared seeds go to the dominant item."""
    shared = action.seeds_a & action.seeds_b
    if rule is TieRule.A_OVER_B:
        return set(action.seeds_a), set(action.seeds_b - shared)
    return set(action.seeds_a - shared), set(action.seeds_b)


def sample_live_edges(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One live-edge realization: bit i is live with probability probs[i]."""
    probs = np.asarray(probs, dtype=float)
    return rng.random(probs.shape[0]) < probs


def _check_action_nodes(g: Graph, action: Action) -> None:
    for u in action.seeds_a | action.seeds_b:
        if not (0 <= u < g.n):
            raise ValueError(f"unknown node id {u}")


def propagate(g: Graph, mask: np.ndarray, action: Action, rule: TieRule) -> PropagationOutcome:
    """Deterministic synchronous propagation over a fixed live-edge mask.

    Step 0 activates the seeds (overlap resolved by the tie rule).  At each
    later step, every node activated in the previous step fires its live
    out-edges at inactive targets; a target hit by both items in the same
    step adopts per the rule.  Stops when a step activates nothing.
    """
    mask = np.asarray(mask)
    if mask.shape != (g.m,):
        raise ValueError(f"mask length {mask.shape} does not match edge count {g.m}")
    _check_action_nodes(g, action)

    set_a, set_b = resolve_seed_overlap(action, rule)
    frontier_a, frontier_b = set(set_a), set(set_b)
    while frontier_a or frontier_b:
        attempts_a: set = set()
        attempts_b: set = set()
        for u in frontier_a:
            for e in g.out_edges[u]:
                if mask[e]:
                    attempts_a.add(g.target(e))
        for u in frontier_b:
            for e in g.out_edges[u]:
                if mask[e]:
                    attempts_b.add(g.target(e))
        active = set_a | set_b
        new_a = attempts_a - active
        new_b = attempts_b - active
        contested = new_a & new_b
        if rule is TieRule.A_OVER_B:
            new_b -= contested
        else:
            new_a -= contested
        set_a |= new_a
        set_b |= new_b
        frontier_a, frontier_b = new_a, new_b

    triggered = {e for u in set_a | set_b for e in g.out_edges[u]}
    observations = {e: int(bool(mask[e])) for e in triggered}
    return PropagationOutcome(
        activated_a=set_a,
        activated_b=set_b,
        triggered=triggered,
        observations=observations,
        reward=len(set_a),
        action=action,
    )


def batch_activation(
    g: Graph, masks: np.ndarray, action: Action, rule: TieRule
) -> tuple[np.ndarray, np.ndarray]:
    """Propagate many live-edge masks at once.

    masks has shape (samples, m); returns boolean activation matrices
    (samples, n) for items A and B.  Semantics match propagate() exactly.
    """
    masks = np.asarray(masks, dtype=bool)
    n_samples = masks.shape[0]
    _check_action_nodes(g, action)
    set_a, set_b = resolve_seed_overlap(action, rule)

    act_a = np.zeros((n_samples, g.n), dtype=bool)
    act_b = np.zeros((n_samples, g.n), dtype=bool)
    if set_a:
        act_a[:, sorted(set_a)] = True
    if set_b:
        act_b[:, sorted(set_b)] = True
    frontier_a = act_a.copy()
    frontier_b = act_b.copy()

    while frontier_a.any() or frontier_b.any():
        att_a = np.zeros((n_samples, g.n), dtype=bool)
        att_b = np.zeros((n_samples, g.n), dtype=bool)
        for e, (u, v) in enumerate(g.edges):
            live = masks[:, e]
            att_a[:, v] |= frontier_a[:, u] & live
            att_b[:, v] |= frontier_b[:, u] & live
        inactive = ~(act_a | act_b)
        new_a = att_a & inactive
        new_b = att_b & inactive
        contested = new_a & new_b
        if rule is TieRule.A_OVER_B:
            new_b &= ~contested
        else:
            new_a &= ~contested
        act_a |= new_a
        act_b |= new_b
        frontier_a, frontier_b = new_a, new_b
    return act_a, act_b


def sample_reward_batch(
    g: Graph, probs: np.ndarray, action: Action, rule: TieRule, n_samples: int, rng: np.random.Generator
) -> np.ndarray:
    """Per-sample A rewards over n_samples independent live-edge draws."""
    probs = validate_probs(g, probs)
    masks = rng.random((n_samples, g.m)) < probs
    act_a, _ = batch_activation(g, masks, action, rule)
    return act_a.sum(axis=1)


def rewards_on_masks(g: Graph, masks: np.ndarray, action: Action, rule: TieRule) -> np.ndarray:
    """A rewards for pre-drawn masks; used for common-random-number comparisons."""
    act_a, _ = batch_activation(g, masks, action, rule)
    return act_a.sum(axis=1)


def estimate_spread(
    g: Graph, probs, action: Action, rule: TieRule, n_samples: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Monte-Carlo estimate of the expected A spread; returns (mean, stderr)."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rewards = sample_reward_batch(g, probs, action, rule, n_samples, rng)
    mean = float(rewards.mean())
    if n_samples == 1:
        return mean, 0.0
    stderr = float(rewards.std(ddof=1) / math.sqrt(n_samples))
    return mean, stderr


def is_single_step(g: Graph) -> bool:
    """True when no node has both in- and out-edges, so cascades end at step 1.

    Covers bipartite source-to-target graphs; spread and trigger probabilities
    then have closed forms evaluated in O(n + m).
    """
    return all(not (g.in_edges[u] and g.out_edges[u]) for u in range(g.n))


def exact_spread_single_step(g: Graph, probs: np.ndarray, action: Action, rule: TieRule) -> float:
    """Closed-form expected A spread on a single-step graph.

    A non-seed target v falls to A iff some A-owned in-edge is live and,
    under B>A, additionally no B-owned in-edge is live.
    """
    set_a, set_b = resolve_seed_overlap(action, rule)
    total = float(len(set_a))
    seeds = set_a | set_b
    for v in range(g.n):
        if v in seeds or not g.in_edges[v]:
            continue
        miss_a = 1.0
        miss_b = 1.0
        for e in g.in_edges[v]:
            u = g.source(e)
            if u in set_a:
                miss_a *= 1.0 - probs[e]
            elif u in set_b:
                miss_b *= 1.0 - probs[e]
        p_hit_a = 1.0 - miss_a
        if rule is TieRule.B_OVER_A:
            p_hit_a *= miss_b
        total += p_hit_a
    return total


def _free_edges(probs: np.ndarray) -> tuple[list, np.ndarray]:
    """Split edges into random ones (0 < p < 1) and a deterministic base mask."""
    free = [int(e) for e in np.flatnonzero((probs > 0.0) & (probs < 1.0))]
    base = probs >= 1.0
    return free, base


def _enumerate_masks(g: Graph, probs: np.ndarray, max_enum_edges: int):
    """Yield (mask, probability) over all realizations of the random edges."""
    free, base = _free_edges(probs)
    if len(free) > max_enum_edges:
        raise CapacityError(
            f"{len(free)} edges with fractional probability exceed the "
            f"enumeration limit of {max_enum_edges}"
        )
    p_free = probs[free]
    for bits in range(1 << len(free)):
        mask = base.copy()
        pr = 1.0
        for j, e in enumerate(free):
            if bits >> j & 1:
                mask[e] = True
                pr *= p_free[j]
            else:
                pr *= 1.0 - p_free[j]
        yield mask, pr


def exact_spread(
    g: Graph, probs, action: Action, rule: TieRule, max_enum_edges: int = 20
) -> float:
    """Exact expected A spread.

    Single-step graphs use the closed form regardless of size.  Otherwise the
    expectation is the reward-weighted sum over all live-edge realizations of
    the fractional-probability edges; more than max_enum_edges of those raises
    CapacityError.
    """
    probs = validate_probs(g, probs)
    _check_action_nodes(g, action)
    if is_single_step(g):
        return exact_spread_single_step(g, probs, action, rule)
    total = 0.0
    for mask, pr in _enumerate_masks(g, probs, max_enum_edges):
        if pr == 0.0:
            continue
        total += pr * propagate(g, mask, action, rule).reward
    return total


def estimate_trigger_prob(
    g: Graph,
    probs,
    action: Action,
    rule: TieRule,
    edge: int,
    n_samples: int,
    rng: np.random.Generator,
) -> float:
    """Fraction of sampled rounds in which the edge's outcome is observed."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if not (0 <= edge < g.m):
        raise ValueError(f"unknown edge id {edge}")
    probs = validate_probs(g, probs)
    masks = rng.random((n_samples, g.m)) < probs
    act_a, act_b = batch_activation(g, masks, action, rule)
    src = g.source(edge)
    return float((act_a[:, src] | act_b[:, src]).mean())


def exact_trigger_probs(
    g: Graph, probs, action: Action, max_enum_edges: int = 20
) -> np.ndarray:
    """Exact probability that each edge is triggered by the action.

    An edge is triggered iff its source is reachable from the seed union over
    live edges, which does not depend on the tie rule or on how the union is
    split between the items.
    """
    probs = validate_probs(g, probs)
    _check_action_nodes(g, action)
    seeds = action.seeds_a | action.seeds_b
    out = np.zeros(g.m)
    for mask, pr in _enumerate_masks(g, probs, max_enum_edges):
        if pr == 0.0:
            continue
        reached = set(seeds)
        stack = list(seeds)
        while stack:
            u = stack.pop()
            for e in g.out_edges[u]:
                if mask[e]:
                    v = g.target(e)
                    if v not in reached:
                        reached.add(v)
                        stack.append(v)
        for u in reached:
            for e in g.out_edges[u]:
                out[e] += pr
    return out
