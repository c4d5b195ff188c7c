"""Online seed-selection policies over edge arms.

All policies share one protocol: select_action(seeds_b) returns the round's
joint action, update(outcome) ingests the round's feedback.  Learners never
see true edge probabilities; everything they know comes through observed
edge outcomes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diffusion import Action, PropagationOutcome, TieRule
from .graph import Graph


def confidence_radius(t: int, t_i: int, scale: float = 1.0) -> float:
    """Radius sqrt(3 ln t / (2 T_i)), infinite for unplayed arms.

    t is the 1-based round index; scale < 1 shrinks the interval to speed up
    learning at the cost of the theoretical guarantee.
    """
    if t < 1:
        raise ValueError("round index t must be at least 1")
    if t_i == 0:
        return math.inf
    return scale * math.sqrt(3.0 * math.log(t) / (2.0 * t_i))


def clipped_interval(mu_hat: float, rho: float) -> tuple[float, float]:
    """[mu_hat - rho, mu_hat + rho] clipped into [0, 1]."""
    if math.isinf(rho):
        return 0.0, 1.0
    return max(mu_hat - rho, 0.0), min(mu_hat + rho, 1.0)


class BetaPosteriors:
    """Independent Beta(a_i, b_i) beliefs over edge probabilities."""

    def __init__(self, m: int, a0=1.0, b0=1.0):
        self.a = np.broadcast_to(np.asarray(a0, dtype=float), (m,)).copy()
        self.b = np.broadcast_to(np.asarray(b0, dtype=float), (m,)).copy()
        if np.any(self.a <= 0) or np.any(self.b <= 0):
            raise ValueError("Beta parameters must be positive")

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.beta(self.a, self.b)

    def mean(self) -> np.ndarray:
        return self.a / (self.a + self.b)


def posterior_update(posteriors: BetaPosteriors, outcome: PropagationOutcome) -> None:
    """Conjugate update on every observed arm: a += X, b += 1 - X."""
    for e, x in outcome.observations.items():
        if x not in (0, 1):
            raise ValueError(f"observation for edge {e} must be 0 or 1, got {x!r}")
        posteriors.a[e] += x
        posteriors.b[e] += 1 - x


class ArmStats:
    """Play counts and empirical means per arm.

    Means are kept as exact integer success/count ratios; unplayed arms
    report init_mean.
    """

    def __init__(self, m: int, init_mean: float = 1.0):
        self.counts = np.zeros(m, dtype=np.int64)
        self.ones = np.zeros(m, dtype=np.int64)
        self.init_mean = float(init_mean)

    @property
    def mu_hat(self) -> np.ndarray:
        out = np.full(self.counts.shape, self.init_mean)
        played = self.counts > 0
        out[played] = self.ones[played] / self.counts[played]
        return out


def direct_edges(g: Graph, action: Action, rule: TieRule) -> set:
    """Out-edges of the round's seed nodes.

    The competitor's out-edges count under B>A, where choosing those nodes
    ourselves would hand them to the competitor and hide nothing new.
    """
    nodes = set(action.seeds_a)
    if rule is TieRule.B_OVER_A:
        nodes |= action.seeds_b
    return {e for u in nodes for e in g.out_edges[u]}


def stats_update(
    stats: ArmStats,
    outcome: PropagationOutcome,
    feedback_scope: str = "full_tau",
    g: Graph | None = None,
    rule: TieRule | None = None,
) -> None:
    """Ingest observed outcomes into counts and means.

    feedback_scope "full_tau" uses every observed edge; "direct_only"
    restricts to seed out-edges (requires g and rule to identify them).
    """
    if feedback_scope == "full_tau":
        in_scope = outcome.observations.keys()
    elif feedback_scope == "direct_only":
        if g is None or rule is None:
            raise ValueError("direct_only scope needs the graph and tie rule")
        scope = direct_edges(g, outcome.action, rule)
        in_scope = [e for e in outcome.observations if e in scope]
    else:
        raise ValueError(f"unknown feedback scope {feedback_scope!r}")
    for e in in_scope:
        x = outcome.observations[e]
        if x not in (0, 1):
            raise ValueError(f"observation for edge {e} must be 0 or 1, got {x!r}")
        stats.counts[e] += 1
        stats.ones[e] += x


def etc_schedule(n: int, k: int, n_visits: int) -> list:
    """Exploration rounds visiting every node n_visits times as a seed.

    Returns ceil(n * n_visits / k) rounds of k distinct nodes each.  Rounds
    take the k most-owed nodes (ties to the lowest id), which keeps visit
    counts balanced so only the final round can need padding with
    already-finished nodes.
    """
    if n_visits < 1:
        raise ValueError("n_visits must be at least 1")
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > n:
        raise ValueError(f"k = {k} exceeds node count {n}")
    owed = [n_visits] * n
    schedule = []
    while any(owed):
        by_need = sorted(range(n), key=lambda u: (-owed[u], u))
        sel = [u for u in by_need if owed[u] > 0][:k]
        pad = 0
        while len(sel) < k:
            if pad not in sel:
                sel.append(pad)
            pad += 1
        for u in sel:
            if owed[u] > 0:
                owed[u] -= 1
        schedule.append(frozenset(sel))
    assert len(schedule) == math.ceil(n * n_visits / k)
    return schedule


def etc_choose_n(
    mode: str,
    reach: int,
    m: int,
    n: int,
    k: int,
    horizon: int,
    delta_min: float | None = None,
) -> int:
    """Exploration visit count for explore-then-commit.

    "independent": (reach*m*k)^(2/3) * n^(-4/3) * T^(2/3) * (ln T)^(1/3).
    "dependent": (2 reach^2 m^2 / delta_min^2) * ln(k T delta_min^2 / (reach^3 m)),
    requiring delta_min > 0.  Both round up and floor at 1.
    """
    if mode == "independent":
        if horizon < 2:
            raise ValueError("horizon must be at least 2 for the gap-free formula")
        value = (
            (reach * m * k) ** (2.0 / 3.0)
            * n ** (-4.0 / 3.0)
            * horizon ** (2.0 / 3.0)
            * math.log(horizon) ** (1.0 / 3.0)
        )
    elif mode == "dependent":
        if delta_min is None or delta_min <= 0:
            raise ValueError("dependent mode requires delta_min > 0")
        arg = k * horizon * delta_min**2 / (reach**3 * m)
        value = (2.0 * reach**2 * m**2 / delta_min**2) * math.log(arg) if arg > 0 else 0.0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return max(1, math.ceil(value))


# ---------------------------------------------------------------------------
# Policies


class OraclePolicy:
    """Plays the fixed-vector oracle every round; the clairvoyant reference."""

    name = "oracle"

    def __init__(self, g: Graph, k: int, rule: TieRule, oracle, mu, rng=None):
        self.g = g
        self.k = k
        self.oracle = oracle
        self.mu = np.asarray(mu, dtype=float)
        self.rng = rng if rng is not None else np.random.default_rng()

    def select_action(self, seeds_b) -> Action:
        res = self.oracle(seeds_b, self.mu, self.rng)
        return Action(res.seeds_a, seeds_b, self.k)

    def update(self, outcome: PropagationOutcome) -> None:
        pass


class ThompsonSamplingPolicy:
    """Sample a probability vector from per-arm Beta beliefs, play the
    oracle's answer for it, and update every observed arm."""

    name = "ts"

    def __init__(self, g: Graph, k: int, rule: TieRule, oracle, rng, a0=1.0, b0=1.0):
        self.g = g
        self.k = k
        self.oracle = oracle
        self.rng = rng
        self.posteriors = BetaPosteriors(g.m, a0, b0)

    def select_action(self, seeds_b) -> Action:
        mu_t = self.posteriors.sample(self.rng)
        res = self.oracle(seeds_b, mu_t, self.rng)
        return Action(res.seeds_a, seeds_b, self.k)

    def update(self, outcome: PropagationOutcome) -> None:
        posterior_update(self.posteriors, outcome)


class OFUPolicy:
    """Optimism without monotonicity: hand the interval oracle the clipped
    confidence box around the empirical means and play its joint optimum."""

    name = "ofu"

    def __init__(self, g: Graph, k: int, rule: TieRule, interval_oracle, rng, alpha_rho: float = 1.0):
        self.g = g
        self.k = k
        self.interval_oracle = interval_oracle
        self.rng = rng
        self.alpha_rho = alpha_rho
        self.stats = ArmStats(g.m, init_mean=1.0)
        self.t = 0

    def intervals(self) -> tuple[np.ndarray, np.ndarray]:
        mu_hat = self.stats.mu_hat
        lo = np.empty(self.g.m)
        hi = np.empty(self.g.m)
        for i in range(self.g.m):
            rho = confidence_radius(self.t, int(self.stats.counts[i]), self.alpha_rho)
            lo[i], hi[i] = clipped_interval(mu_hat[i], rho)
        return lo, hi

    def select_action(self, seeds_b) -> Action:
        self.t += 1
        lo, hi = self.intervals()
        res = self.interval_oracle(seeds_b, lo, hi, self.rng)
        return Action(res.seeds_a, seeds_b, self.k)

    def update(self, outcome: PropagationOutcome) -> None:
        stats_update(self.stats, outcome, "full_tau")


class CUCBPolicy:
    """Upper-confidence baseline for monotone instances: greedy on
    min(mu_hat + rho, 1)."""

    name = "cucb"

    def __init__(self, g: Graph, k: int, rule: TieRule, oracle, rng, alpha_rho: float = 1.0):
        self.g = g
        self.k = k
        self.oracle = oracle
        self.rng = rng
        self.alpha_rho = alpha_rho
        self.stats = ArmStats(g.m, init_mean=1.0)
        self.t = 0

    def ucb(self) -> np.ndarray:
        mu_hat = self.stats.mu_hat
        out = np.empty(self.g.m)
        for i in range(self.g.m):
            rho = confidence_radius(self.t, int(self.stats.counts[i]), self.alpha_rho)
            out[i] = min(mu_hat[i] + rho, 1.0)
        return out

    def select_action(self, seeds_b) -> Action:
        self.t += 1
        res = self.oracle(seeds_b, self.ucb(), self.rng)
        return Action(res.seeds_a, seeds_b, self.k)

    def update(self, outcome: PropagationOutcome) -> None:
        stats_update(self.stats, outcome, "full_tau")


class EpsilonGreedyPolicy:
    """Empirical-mean oracle with probability 1 - epsilon, uniform random
    seeds otherwise.  epsilon = 0 is the pure empirical-mean policy.

    Unplayed arms default to mean 0: exploration comes from the random
    branch and from arms the competitor happens to trigger, not from
    implicit optimism.
    """

    name = "eps-greedy"

    def __init__(self, g: Graph, k: int, rule: TieRule, oracle, rng,
                 epsilon: float = 0.0, mu_init: float = 0.0):
        if not (0.0 <= epsilon <= 1.0):
            raise ValueError("epsilon must lie in [0, 1]")
        self.g = g
        self.k = k
        self.oracle = oracle
        self.rng = rng
        self.epsilon = epsilon
        self.stats = ArmStats(g.m, init_mean=mu_init)
        self.random_rounds = 0

    def select_action(self, seeds_b) -> Action:
        if self.rng.random() < self.epsilon:
            self.random_rounds += 1
            seeds_a = self.rng.choice(self.g.n, size=self.k, replace=False)
            return Action(frozenset(int(u) for u in seeds_a), seeds_b, self.k)
        res = self.oracle(seeds_b, self.stats.mu_hat, self.rng)
        return Action(res.seeds_a, seeds_b, self.k)

    def update(self, outcome: PropagationOutcome) -> None:
        stats_update(self.stats, outcome, "full_tau")


class ETCPolicy:
    """Explore-then-commit: visit every node a fixed number of times as a
    seed, learning only from seed out-edges, then commit to the
    empirical-mean oracle with no further updates."""

    name = "etc"

    def __init__(self, g: Graph, k: int, rule: TieRule, oracle, rng, n_visits: int):
        self.g = g
        self.k = k
        self.rule = rule
        self.oracle = oracle
        self.rng = rng
        self.schedule = etc_schedule(g.n, k, n_visits)
        self.stats = ArmStats(g.m, init_mean=0.0)
        self.t = 0
        self._updating = False

    @property
    def exploring(self) -> bool:
        return self.t < len(self.schedule)

    def select_action(self, seeds_b) -> Action:
        if self.exploring:
            seeds_a = self.schedule[self.t]
            self.t += 1
            self._updating = True
            return Action(seeds_a, seeds_b, self.k)
        self.t += 1
        self._updating = False
        res = self.oracle(seeds_b, self.stats.mu_hat, self.rng)
        return Action(res.seeds_a, seeds_b, self.k)

    def update(self, outcome: PropagationOutcome) -> None:
        if self._updating:
            stats_update(self.stats, outcome, "direct_only", self.g, self.rule)
