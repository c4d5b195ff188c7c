"""Built-in fixtures and self-checks behind the ``verify`` command.

The checks exercise the properties the simulator must get right to be
trusted: the two-route conflict graph whose spread has a closed form that
decreases in the competitor's edge, dominance tie-breaking, agreement of
Monte Carlo with exact enumeration, and the trigger-weighted smoothness
bound on reward perturbations.
"""
from __future__ import annotations

import numpy as np

from .diffusion import (
    Action,
    TieRule,
    estimate_spread,
    exact_spread,
    exact_trigger_probs,
    propagate,
)
from .graph import Graph, max_reach


def conflict_fixture() -> tuple[Graph, Action]:
    """Two routes into one contested node.

    Our seed a reaches x for sure and x reaches v with probability mu1; the
    competitor's seed b reaches v directly with probability mu2.  The
    expected A spread is 2 + mu1 * (1 - mu2) under both tie rules, so raising
    mu2 strictly hurts us: spread is not monotone in edge probabilities.
    """
    g = Graph(4, [(0, 1), (1, 2), (3, 2)], labels=["a", "x", "v", "b"])
    return g, Action({0}, {3}, 1)


def conflict_probs(mu1: float, mu2: float) -> np.ndarray:
    return np.array([1.0, mu1, mu2])


def random_instance(rng: np.random.Generator, max_n: int = 6, max_m: int = 10):
    """A random small graph with random probabilities and a random action."""
    n = int(rng.integers(2, max_n + 1))
    m = int(rng.integers(1, max_m + 1))
    edges = [(int(rng.integers(n)), int(rng.integers(n))) for _ in range(m)]
    g = Graph(n, edges)
    probs = rng.random(m)
    k = int(rng.integers(1, n + 1))
    size_a = int(rng.integers(1, k + 1))
    seeds_a = set(int(u) for u in rng.choice(n, size=size_a, replace=False))
    size_b = int(rng.integers(0, n + 1))
    seeds_b = set(int(u) for u in rng.choice(n, size=size_b, replace=False))
    return g, probs, Action(seeds_a, seeds_b, k)


def check_nonmonotone() -> tuple[bool, str]:
    """Exact spread matches 2 + mu1*(1 - mu2) on the conflict fixture and
    strictly decreases in mu2."""
    g, action = conflict_fixture()
    worst = 0.0
    for rule in TieRule:
        for mu1 in (0.0, 0.5, 1.0):
            for mu2 in (0.0, 0.5, 1.0):
                got = exact_spread(g, conflict_probs(mu1, mu2), action, rule)
                worst = max(worst, abs(got - (2.0 + mu1 * (1.0 - mu2))))
    if worst > 1e-9:
        return False, f"closed form mismatch up to {worst:.3g}"
    lo = exact_spread(g, conflict_probs(0.5, 1.0), action, TieRule.A_OVER_B)
    hi = exact_spread(g, conflict_probs(0.5, 0.0), action, TieRule.A_OVER_B)
    if not lo < hi:
        return False, f"spread did not decrease in the competitor edge ({lo} vs {hi})"
    return True, f"closed form within {worst:.3g}, decreasing in competitor edge"


def check_tie_rules(propagate_fn=propagate) -> tuple[bool, str]:
    """Dominance resolution on a contested node, on shared seeds, and when
    the competitor wins a node outright by arriving earlier."""
    contested = Graph(3, [(0, 2), (1, 2)], labels=["a", "b", "v"])
    mask = np.array([True, True])
    out = propagate_fn(contested, mask, Action({0}, {1}, 1), TieRule.A_OVER_B)
    if not (2 in out.activated_a and out.reward == 2):
        return False, "contested node did not go to the dominant item under A>B"
    out = propagate_fn(contested, mask, Action({0}, {1}, 1), TieRule.B_OVER_A)
    if not (2 in out.activated_b and out.reward == 1):
        return False, "contested node did not go to the dominant item under B>A"

    shared = Graph(2, [(0, 1)], labels=["s", "t"])
    out = propagate_fn(shared, np.array([True]), Action({0}, {0}, 1), TieRule.B_OVER_A)
    if not (0 in out.activated_b and out.reward == 0):
        return False, "shared seed did not resolve to the dominant item"

    race = Graph(4, [(0, 1), (1, 2), (3, 2)], labels=["a", "x", "v", "b"])
    for rule in TieRule:
        out = propagate_fn(race, np.array([True, True, True]), Action({0}, {3}, 1), rule)
        if 2 not in out.activated_b:
            return False, f"earlier arrival lost the race under {rule.value}"
    return True, "dominance and arrival-order semantics hold"


def check_mc_vs_exact(seed: int = 7, instances: int = 10, samples: int = 20000) -> tuple[bool, str]:
    """Monte-Carlo spread agrees with enumeration within 5 standard errors."""
    rng = np.random.default_rng(seed)
    for i in range(instances):
        g, probs, action = random_instance(rng)
        rule = TieRule.A_OVER_B if i % 2 == 0 else TieRule.B_OVER_A
        exact = exact_spread(g, probs, action, rule)
        mean, stderr = estimate_spread(g, probs, action, rule, samples, rng)
        tol = max(5.0 * stderr, 1e-9)
        if abs(mean - exact) > tol:
            return False, f"instance {i}: |{mean} - {exact}| > {tol}"
    return True, f"{instances} instances within 5 standard errors"


def check_tpm(seed: int = 11, instances: int = 20) -> tuple[bool, str]:
    """Reward differences obey the trigger-weighted smoothness bound."""
    rng = np.random.default_rng(seed)
    for i in range(instances):
        g, probs, action = random_instance(rng, max_n=5, max_m=8)
        probs2 = rng.random(g.m)
        rule = TieRule.A_OVER_B if i % 2 == 0 else TieRule.B_OVER_A
        reach = max_reach(g)
        trig = exact_trigger_probs(g, probs, action)
        lhs = abs(
            exact_spread(g, probs, action, rule) - exact_spread(g, probs2, action, rule)
        )
        rhs = reach * float(np.sum(trig * np.abs(probs - probs2)))
        if lhs > rhs + 1e-12:
            return False, f"instance {i}: {lhs} > {rhs}"
    return True, f"{instances} instances satisfy the smoothness bound"


CHECKS = {
    "nonmono": check_nonmonotone,
    "tierule": check_tie_rules,
    "mcexact": check_mc_vs_exact,
    "tpm": check_tpm,
}


def run_checks(selectors=None, propagate_fn=propagate) -> list:
    """Run the selected checks; returns (name, ok, detail) triples.

    propagate_fn exists as a hook so a deliberately broken propagation can be
    shown to fail the tie-rule check.
    """
    names = list(CHECKS) if not selectors else list(selectors)
    results = []
    for name in names:
        if name not in CHECKS:
            raise ValueError(f"unknown check {name!r}, expected one of {sorted(CHECKS)}")
        if name == "tierule":
            ok, detail = check_tie_rules(propagate_fn)
        else:
            ok, detail = CHECKS[name]()
        results.append((name, ok, detail))
    return results
