"""Experiment orchestration: competitor policies, per-round regret
accounting against a cached per-context baseline, repetition management with
deterministic seeding, and CSV/JSON trace persistence.

The regret columns compare expected rewards, not single-round realizations:
the realized expected reward of each played action is evaluated exactly when
feasible, otherwise by Monte Carlo with seeds derived only from the master
seed and round index so competing algorithms see identical evaluation noise.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .bandits import (
    CUCBPolicy,
    EpsilonGreedyPolicy,
    ETCPolicy,
    OFUPolicy,
    OraclePolicy,
    ThompsonSamplingPolicy,
    etc_choose_n,
)
from .diffusion import (
    Action,
    TieRule,
    estimate_spread,
    exact_spread,
    is_single_step,
    propagate,
    sample_live_edges,
)
from .graph import (
    Graph,
    assign_weighted_cascade,
    constant_probs,
    dumps_edge_list,
    load_edge_list,
    max_reach,
    validate_probs,
)
from .oracles import (
    exhaustive_seed_select,
    greedy_seed_select,
    ofu_auto,
    ofu_bipartite,
    ofu_boundary_enum,
    ofu_general_heuristic,
)

_EVAL_TAG = 0xE7A1
_IM_TAG = 0xB0
_INSTANCE_TAG = 0x1A57A
_BASELINE_TAG = 0xBA5E


@dataclass(frozen=True)
class CompetitorSpec:
    """How the competitor places its seeds each round."""

    kind: str  # "rd" | "im" | "fixed"
    size: int = 0
    nodes: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in ("rd", "im", "fixed"):
            raise ValueError(f"competitor.kind must be rd, im or fixed, got {self.kind!r}")


@dataclass
class ExperimentConfig:
    """Everything one experiment needs, fully resolved.

    true_mu drives the environment and the baseline only; learners never
    read it (the clairvoyant "oracle" algorithm is the deliberate exception).
    """

    graph: Graph
    true_mu: np.ndarray
    algorithm: str
    k: int
    rule: TieRule
    horizon: int
    repetitions: int = 1
    master_seed: int = 0
    competitor: CompetitorSpec = field(default_factory=lambda: CompetitorSpec("fixed"))
    algo_params: dict = field(default_factory=dict)
    alpha: float = 1.0
    beta: float = 1.0
    baseline: str = "greedy"  # greedy | exhaustive
    eval_mode: str = "auto"  # auto | exact | mc
    eval_samples: int = 10000
    eval_max_enum_edges: int = 20
    oracle_samples: int = 1000
    oracle_exact: str = "auto"  # auto | true | false
    ofu_oracle: str = "auto"  # auto | bipartite | boundary | heuristic
    oracle_max_enum_edges: int = 12
    bayes_instances: int = 0
    prior: str = "uniform"  # uniform | weights:<scale> | file:<path>
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.true_mu = validate_probs(self.graph, self.true_mu)
        if self.horizon < 1:
            raise ValueError("run.horizon must be at least 1")
        if self.repetitions < 1:
            raise ValueError("run.repetitions must be at least 1")
        if not (1 <= self.k <= self.graph.n):
            raise ValueError(f"run.k must lie in [1, {self.graph.n}]")
        if self.competitor.kind == "fixed":
            bad = [u for u in self.competitor.nodes if not (0 <= u < self.graph.n)]
            if bad:
                raise ValueError(f"competitor.nodes references unknown nodes {bad}")
        elif self.competitor.size > self.graph.n:
            raise ValueError("competitor.size exceeds node count")
        if self.baseline not in ("greedy", "exhaustive"):
            raise ValueError(f"run.baseline must be greedy or exhaustive, got {self.baseline!r}")

    def config_hash(self) -> str:
        payload = {
            "graph": hashlib.sha256(dumps_edge_list(self.graph).encode()).hexdigest(),
            "true_mu": hashlib.sha256(self.true_mu.tobytes()).hexdigest(),
            "algorithm": self.algorithm,
            "algo_params": {k: str(v) for k, v in sorted(self.algo_params.items())},
            "k": self.k,
            "rule": self.rule.value,
            "horizon": self.horizon,
            "repetitions": self.repetitions,
            "master_seed": self.master_seed,
            "competitor": [self.competitor.kind, self.competitor.size, sorted(self.competitor.nodes)],
            "alpha": self.alpha,
            "beta": self.beta,
            "baseline": self.baseline,
            "eval": [self.eval_mode, self.eval_samples, self.eval_max_enum_edges],
            "oracle": [
                self.oracle_samples,
                self.oracle_exact,
                self.ofu_oracle,
                self.oracle_max_enum_edges,
            ],
            "bayes_instances": self.bayes_instances,
            "prior": self.prior,
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


@dataclass
class RegretTrace:
    """Per-round baseline and realized expected rewards plus running regret."""

    baseline: list
    reward: list
    cum_regret: list
    config_hash: str = ""
    seed: int = 0
    repetition: int = 0
    actions: list | None = None

    def __len__(self) -> int:
        return len(self.baseline)


# ---------------------------------------------------------------------------
# Evaluation and baselines


def _eval_exact(config: ExperimentConfig) -> bool:
    if config.eval_mode == "exact":
        return True
    if config.eval_mode == "mc":
        return False
    if config.eval_mode != "auto":
        raise ValueError(f"run.eval must be auto, exact or mc, got {config.eval_mode!r}")
    g = config.graph
    if is_single_step(g):
        return True
    fractional = int(np.sum((config.true_mu > 0) & (config.true_mu < 1)))
    return fractional <= config.eval_max_enum_edges


def expected_reward(config: ExperimentConfig, mu, action: Action, eval_rng=None) -> float:
    """Expected A spread of an action under mu, per the config's eval settings."""
    if _eval_exact(config):
        return exact_spread(config.graph, mu, action, config.rule, config.eval_max_enum_edges)
    if eval_rng is None:
        eval_rng = np.random.default_rng()
    mean, _ = estimate_spread(config.graph, mu, action, config.rule, config.eval_samples, eval_rng)
    return mean


def _oracle_exact(config: ExperimentConfig) -> bool:
    if config.oracle_exact == "true":
        return True
    if config.oracle_exact == "false":
        return False
    if config.oracle_exact != "auto":
        raise ValueError("algorithm.oracle_exact must be auto, true or false")
    return is_single_step(config.graph)


def make_fixed_oracle(config: ExperimentConfig):
    """Greedy seed selection as a (seeds_b, mu, rng) callable."""
    exact = _oracle_exact(config)

    def oracle(seeds_b, mu, rng):
        return greedy_seed_select(
            config.graph,
            mu,
            seeds_b,
            config.k,
            config.rule,
            mc_samples=config.oracle_samples,
            rng=rng,
            exact=exact,
            max_enum_edges=config.eval_max_enum_edges,
        )

    return oracle


def make_interval_oracle(config: ExperimentConfig):
    """Interval-optimistic seed selection as a (seeds_b, lower, upper, rng) callable."""
    exact = _oracle_exact(config)
    kind = config.ofu_oracle
    if kind not in ("auto", "bipartite", "boundary", "heuristic"):
        raise ValueError("algorithm.ofu_oracle must be auto, bipartite, boundary or heuristic")

    def oracle(seeds_b, lower, upper, rng):
        common = dict(mc_samples=config.oracle_samples, rng=rng, exact=exact)
        if kind == "bipartite":
            return ofu_bipartite(config.graph, lower, upper, seeds_b, config.k, config.rule, **common)
        if kind == "boundary":
            return ofu_boundary_enum(
                config.graph, lower, upper, seeds_b, config.k, config.rule,
                config.oracle_max_enum_edges, **common,
            )
        if kind == "heuristic":
            return ofu_general_heuristic(
                config.graph, lower, upper, seeds_b, config.k, config.rule, **common
            )
        return ofu_auto(
            config.graph, lower, upper, seeds_b, config.k, config.rule,
            config.oracle_max_enum_edges, **common,
        )

    return oracle


def baseline_opt(
    g: Graph,
    true_mu,
    seeds_b,
    k: int,
    rule: TieRule,
    method: str = "greedy",
    exact: bool = True,
    mc_samples: int = 10000,
    rng=None,
) -> float:
    """Spread of the benchmark solution for one context.

    The default greedy solver is the standard near-optimal benchmark; the
    exhaustive solver gives the true per-context optimum on tiny instances.
    """
    solver = exhaustive_seed_select if method == "exhaustive" else greedy_seed_select
    res = solver(g, true_mu, seeds_b, k, rule, mc_samples=mc_samples, rng=rng, exact=exact)
    return res.value


class BaselineCache:
    """Per-context baseline values, computed once per distinct competitor set."""

    def __init__(self, config: ExperimentConfig, mu):
        self.config = config
        self.mu = validate_probs(config.graph, mu)
        self.values: dict = {}

    def value(self, seeds_b) -> float:
        key = frozenset(seeds_b)
        if key not in self.values:
            cfg = self.config
            exact = _eval_exact(cfg)
            rng = None
            if not exact:
                entropy = [_BASELINE_TAG, cfg.master_seed] + sorted(key)
                rng = np.random.default_rng(np.random.SeedSequence(entropy))
            self.values[key] = baseline_opt(
                cfg.graph, self.mu, key, cfg.k, cfg.rule,
                method=cfg.baseline, exact=exact, mc_samples=cfg.eval_samples, rng=rng,
            )
        return self.values[key]


# ---------------------------------------------------------------------------
# Competitor


class Competitor:
    """Produces the competitor's seed set each round.

    "rd" draws a fresh uniform subset per round; "im" runs the
    non-competitive greedy once on the true probabilities and replays the
    result; "fixed" replays a given set.
    """

    def __init__(self, spec: CompetitorSpec, config: ExperimentConfig):
        self.spec = spec
        self.config = config
        self._im_set: frozenset | None = None

    def _im_seeds(self) -> frozenset:
        if self._im_set is None:
            cfg = self.config
            rng = np.random.default_rng(np.random.SeedSequence([_IM_TAG, cfg.master_seed]))
            res = greedy_seed_select(
                cfg.graph,
                cfg.true_mu,
                frozenset(),
                self.spec.size,
                cfg.rule,
                mc_samples=cfg.eval_samples,
                rng=rng,
                exact=_eval_exact(cfg),
            )
            self._im_set = res.seeds_a
        return self._im_set

    def step(self, round_index: int, rng: np.random.Generator) -> frozenset:
        if self.spec.kind == "fixed":
            return self.spec.nodes
        if self.spec.kind == "im":
            return self._im_seeds()
        picks = rng.choice(self.config.graph.n, size=self.spec.size, replace=False)
        return frozenset(int(u) for u in picks)


def competitor_step(spec: CompetitorSpec, config: ExperimentConfig, round_index: int, rng) -> frozenset:
    """One-shot form of Competitor.step for callers without a persistent object."""
    return Competitor(spec, config).step(round_index, rng)


# ---------------------------------------------------------------------------
# Priors and policies


def resolve_prior(config: ExperimentConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-arm Beta(a0, b0) prior parameters from the config's prior spec.

    "weights:<scale>" centers the prior on the true weights; parameters are
    floored at 1e-6 so degenerate weights stay valid.
    """
    m = config.graph.m
    spec = config.prior
    if spec == "uniform":
        return np.ones(m), np.ones(m)
    if spec.startswith("weights:"):
        scale = float(spec.split(":", 1)[1])
        if scale <= 0:
            raise ValueError("prior weights scale must be positive")
        w = config.true_mu
        return np.maximum(scale * w, 1e-6), np.maximum(scale * (1.0 - w), 1e-6)
    if spec.startswith("file:"):
        path = spec.split(":", 1)[1]
        data = np.loadtxt(path, ndmin=2)
        if data.shape != (m, 2):
            raise ValueError(f"prior file {path} must have {m} rows of 'a b'")
        return data[:, 0].copy(), data[:, 1].copy()
    raise ValueError(f"unknown prior spec {spec!r}")


def build_policy(config: ExperimentConfig, rng: np.random.Generator):
    """Instantiate the configured algorithm with its oracle wiring."""
    g, k, rule = config.graph, config.k, config.rule
    params = config.algo_params
    name = config.algorithm
    if name == "oracle":
        return OraclePolicy(g, k, rule, make_fixed_oracle(config), config.true_mu, rng)
    if name == "ts":
        a0, b0 = resolve_prior(config)
        return ThompsonSamplingPolicy(g, k, rule, make_fixed_oracle(config), rng, a0, b0)
    if name == "ofu":
        alpha_rho = float(params.get("alpha_rho", 1.0))
        return OFUPolicy(g, k, rule, make_interval_oracle(config), rng, alpha_rho)
    if name == "cucb":
        alpha_rho = float(params.get("alpha_rho", 1.0))
        return CUCBPolicy(g, k, rule, make_fixed_oracle(config), rng, alpha_rho)
    if name in ("eps-greedy", "emp"):
        epsilon = 0.0 if name == "emp" else float(params.get("epsilon", 0.0))
        mu_init = float(params.get("mu_init", 0.0))
        return EpsilonGreedyPolicy(g, k, rule, make_fixed_oracle(config), rng, epsilon, mu_init)
    if name == "etc":
        n_visits = params.get("n_visits", "auto-independent")
        if isinstance(n_visits, str) and n_visits.startswith("auto"):
            reach = max_reach(g)
            if n_visits == "auto-independent":
                n = etc_choose_n("independent", reach, g.m, g.n, k, config.horizon)
            elif n_visits.startswith("auto-dependent:"):
                delta = float(n_visits.split(":", 1)[1])
                n = etc_choose_n("dependent", reach, g.m, g.n, k, config.horizon, delta)
            else:
                raise ValueError(f"bad algorithm.n_visits {n_visits!r}")
        else:
            n = int(n_visits)
        return ETCPolicy(g, k, rule, make_fixed_oracle(config), rng, n)
    raise ValueError(f"unknown algorithm {name!r}")


# ---------------------------------------------------------------------------
# Experiment loops


def _run_single(
    config: ExperimentConfig,
    seed_ids: tuple,
    repetition: int,
    baseline_mu=None,
    record_actions: bool = False,
) -> RegretTrace:
    root = np.random.SeedSequence(list(seed_ids))
    env_ss, learner_ss, competitor_ss = root.spawn(3)
    env_rng = np.random.default_rng(env_ss)
    learner_rng = np.random.default_rng(learner_ss)
    competitor_rng = np.random.default_rng(competitor_ss)

    policy = build_policy(config, learner_rng)
    competitor = Competitor(config.competitor, config)
    baselines = BaselineCache(config, config.true_mu if baseline_mu is None else baseline_mu)
    eval_exact = _eval_exact(config)
    scale = config.alpha * config.beta

    baseline_col: list = []
    reward_col: list = []
    cum_col: list = []
    actions: list = []
    cum = 0.0
    for t in range(1, config.horizon + 1):
        seeds_b = competitor.step(t, competitor_rng)
        action = policy.select_action(seeds_b)
        mask = sample_live_edges(config.true_mu, env_rng)
        outcome = propagate(config.graph, mask, action, config.rule)
        policy.update(outcome)

        eval_rng = None
        if not eval_exact:
            eval_rng = np.random.default_rng(
                np.random.SeedSequence([_EVAL_TAG, *seed_ids, t])
            )
        base = float(scale * baselines.value(seeds_b))
        rew = float(expected_reward(config, config.true_mu, action, eval_rng))
        cum = cum + (base - rew)
        baseline_col.append(base)
        reward_col.append(rew)
        cum_col.append(cum)
        if record_actions:
            actions.append(sorted(action.seeds_a))

    return RegretTrace(
        baseline=baseline_col,
        reward=reward_col,
        cum_regret=cum_col,
        config_hash=config.config_hash(),
        seed=config.master_seed,
        repetition=repetition,
        actions=actions if record_actions else None,
    )


def _run_single_star(args):
    return _run_single(*args)


def run_experiment(
    config: ExperimentConfig,
    jobs: int = 1,
    baseline_mu=None,
    record_actions: bool = False,
) -> list:
    """Run all repetitions and return one trace per repetition.

    Each repetition draws from streams derived only from the master seed and
    its index, so results do not depend on worker count or scheduling.
    """
    tasks = [
        (config, (config.master_seed, rep), rep, baseline_mu, record_actions)
        for rep in range(config.repetitions)
    ]
    if jobs == 1 or len(tasks) == 1:
        return [_run_single_star(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_single_star, tasks))


def aggregate_traces(traces) -> RegretTrace:
    """Round-wise means across traces, in fixed trace order."""
    if not traces:
        raise ValueError("no traces to aggregate")
    horizon = len(traces[0])
    for tr in traces:
        if len(tr) != horizon:
            raise ValueError("traces must share a horizon to aggregate")
    n = len(traces)
    mean = lambda col: [sum(getattr(tr, col)[t] for tr in traces) / n for t in range(horizon)]
    return RegretTrace(
        baseline=mean("baseline"),
        reward=mean("reward"),
        cum_regret=mean("cum_regret"),
        config_hash=traces[0].config_hash,
        seed=traces[0].seed,
        repetition=-1,
    )


def sample_instance_mu(config: ExperimentConfig, instance: int) -> np.ndarray:
    """Draw one true probability vector from the configured prior."""
    a0, b0 = resolve_prior(config)
    rng = np.random.default_rng(
        np.random.SeedSequence([_INSTANCE_TAG, config.master_seed, instance])
    )
    return rng.beta(a0, b0)


def bayesian_sweep(config: ExperimentConfig, n_instances: int, jobs: int = 1):
    """Average regret over problem instances drawn from the prior.

    Returns (aggregate trace of round-wise mean regret, all per-run traces).
    Each instance replaces the environment's true probabilities; baselines
    are recomputed against the instance's own truth.
    """
    if n_instances < 1:
        raise ValueError("n_instances must be at least 1")
    tasks = []
    run_index = 0
    for inst in range(n_instances):
        mu = sample_instance_mu(config, inst)
        inst_config = replace(config, true_mu=mu)
        for rep in range(config.repetitions):
            tasks.append((inst_config, (config.master_seed, inst, rep), run_index, None, False))
            run_index += 1
    if jobs == 1:
        traces = [_run_single_star(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            traces = list(pool.map(_run_single_star, tasks))
    return aggregate_traces(traces), traces


# ---------------------------------------------------------------------------
# Trace persistence

TRACE_HEADER = "round,baseline,reward,cum_regret"


def write_trace(trace: RegretTrace, path) -> None:
    """Write CSV rows plus a JSON sidecar with run metadata.

    Floats are written with repr so a read back is lossless.
    """
    path = os.fspath(path)
    base = path[:-4] if path.endswith(".csv") else path
    rows = [TRACE_HEADER]
    for t in range(len(trace)):
        rows.append(
            f"{t + 1},{float(trace.baseline[t])!r},"
            f"{float(trace.reward[t])!r},{float(trace.cum_regret[t])!r}"
        )
    with open(base + ".csv", "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")
    meta = {
        "config_hash": trace.config_hash,
        "seed": trace.seed,
        "repetition": trace.repetition,
    }
    if trace.actions is not None:
        meta["actions"] = trace.actions
    with open(base + ".json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_trace(path) -> RegretTrace:
    """Read a trace written by write_trace; the sidecar is optional."""
    path = os.fspath(path)
    base = path[:-4] if path.endswith(".csv") else path
    baseline: list = []
    reward: list = []
    cum: list = []
    with open(base + ".csv", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != TRACE_HEADER:
            raise ValueError(f"{base}.csv: unexpected header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            _, b, r, c = line.split(",")
            baseline.append(float(b))
            reward.append(float(r))
            cum.append(float(c))
    trace = RegretTrace(baseline=baseline, reward=reward, cum_regret=cum)
    if os.path.exists(base + ".json"):
        with open(base + ".json", encoding="utf-8") as fh:
            meta = json.load(fh)
        trace.config_hash = meta.get("config_hash", "")
        trace.seed = meta.get("seed", 0)
        trace.repetition = meta.get("repetition", 0)
        trace.actions = meta.get("actions")
    return trace


def write_traces(traces, out_dir, stem: str = "trace") -> list:
    """Write one CSV per repetition plus an aggregate of round-wise means."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for trace in traces:
        base = os.path.join(out_dir, f"{stem}_rep{trace.repetition:03d}")
        write_trace(trace, base)
        paths.append(base + ".csv")
    agg = aggregate_traces(traces)
    agg_base = os.path.join(out_dir, f"{stem}_mean")
    write_trace(agg, agg_base)
    paths.append(agg_base + ".csv")
    return paths


# ---------------------------------------------------------------------------
# Config files

_SECTIONS = ("graph", "environment", "algorithm", "competitor", "run")
_KEY_SECTIONS = {
    "path": "graph",
    "mu": "environment",
    "tie_rule": "environment",
    "name": "algorithm",
    "alpha_rho": "algorithm",
    "epsilon": "algorithm",
    "prior": "algorithm",
    "n_visits": "algorithm",
    "ofu_oracle": "algorithm",
    "oracle_samples": "algorithm",
    "oracle_exact": "algorithm",
    "max_enum_edges": "algorithm",
    "kind": "competitor",
    "size": "competitor",
    "nodes": "competitor",
    "horizon": "run",
    "repetitions": "run",
    "seed": "run",
    "k": "run",
    "eval": "run",
    "baseline": "run",
    "alpha": "run",
    "beta": "run",
    "out": "run",
    "bayes_instances": "run",
}


def resolve_mu(g: Graph, spec: str, base_dir: str = ".") -> np.ndarray:
    """Probability source: "wc", "const:<p>" or "file:<path>"."""
    if spec == "wc":
        return assign_weighted_cascade(g)
    if spec.startswith("const:"):
        return constant_probs(g, float(spec.split(":", 1)[1]))
    if spec.startswith("file:"):
        path = spec.split(":", 1)[1]
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        with open(path, encoding="utf-8") as fh:
            g2, probs = load_edge_list(fh.read())
        if probs is None:
            raise ValueError(f"environment.mu file {path} carries no probabilities")
        if g2.edges != g.edges or g2.labels != g.labels:
            raise ValueError(f"environment.mu file {path} does not match the graph")
        return probs
    raise ValueError(f"environment.mu must be wc, const:<p> or file:<path>, got {spec!r}")


def apply_overrides(parser: configparser.ConfigParser, overrides) -> dict:
    """Apply "key=value" or "section.key=value" overrides; returns the echo map."""
    applied = {}
    for item in overrides or []:
        if "=" not in item:
            raise ValueError(f"override {item!r} must look like key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        if "." in key:
            section, name = key.split(".", 1)
        else:
            name = key
            section = _KEY_SECTIONS.get(name)
            if section is None:
                raise ValueError(f"override references unknown key {name!r}")
        if section not in _SECTIONS:
            raise ValueError(f"override references unknown section {section!r}")
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, name, value.strip())
        applied[f"{section}.{name}"] = value.strip()
    return applied


def load_config(path, overrides=None) -> ExperimentConfig:
    """Parse an INI experiment file, apply overrides, and resolve everything.

    Relative graph and probability paths resolve against the config file's
    directory.  Raises ValueError with the offending field on any problem.
    """
    path = os.fspath(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh, source=path)
    applied = apply_overrides(parser, overrides)
    base_dir = os.path.dirname(os.path.abspath(path))

    def get(section, key, default=None):
        if parser.has_option(section, key):
            return parser.get(section, key).strip()
        return default

    graph_path = get("graph", "path")
    if not graph_path:
        raise ValueError("graph.path is required")
    if not os.path.isabs(graph_path):
        graph_path = os.path.join(base_dir, graph_path)
    if not os.path.exists(graph_path):
        raise ValueError(f"graph.path does not exist: {graph_path}")
    with open(graph_path, encoding="utf-8") as fh:
        g, file_probs = load_edge_list(fh.read())

    mu_spec = get("environment", "mu", "inline" if file_probs is not None else "wc")
    if mu_spec == "inline":
        if file_probs is None:
            raise ValueError("environment.mu is inline but the graph file has no probabilities")
        true_mu = file_probs
    else:
        true_mu = resolve_mu(g, mu_spec, base_dir)
    rule = TieRule.parse(get("environment", "tie_rule", "B>A"))

    algorithm = get("algorithm", "name")
    if not algorithm:
        raise ValueError("algorithm.name is required")
    algo_params = {}
    if parser.has_section("algorithm"):
        for key, value in parser.items("algorithm"):
            if key != "name":
                algo_params[key] = value.strip()
    prior = algo_params.get("prior", "uniform")
    if prior.startswith("file:") and not os.path.isabs(prior.split(":", 1)[1]):
        prior = "file:" + os.path.join(base_dir, prior.split(":", 1)[1])
        algo_params["prior"] = prior

    kind = get("competitor", "kind", "fixed")
    size = int(get("competitor", "size", "0"))
    nodes_spec = get("competitor", "nodes", "")
    nodes = frozenset(g.node_id(tok) for tok in nodes_spec.split(",") if tok.strip()) if nodes_spec else frozenset()
    if kind == "fixed":
        size = len(nodes)
    competitor = CompetitorSpec(kind, size, nodes)

    eval_spec = get("run", "eval", "auto")
    if eval_spec.startswith("mc:"):
        eval_mode, eval_samples = "mc", int(eval_spec.split(":", 1)[1])
    else:
        eval_mode, eval_samples = eval_spec, 10000
    config = ExperimentConfig(
        graph=g,
        true_mu=true_mu,
        algorithm=algorithm,
        k=int(get("run", "k", "1")),
        rule=rule,
        horizon=int(get("run", "horizon", "100")),
        repetitions=int(get("run", "repetitions", "1")),
        master_seed=int(get("run", "seed", "0")),
        competitor=competitor,
        algo_params=algo_params,
        alpha=float(get("run", "alpha", "1.0")),
        beta=float(get("run", "beta", "1.0")),
        baseline=get("run", "baseline", "greedy"),
        eval_mode=eval_mode,
        eval_samples=eval_samples,
        oracle_samples=int(algo_params.get("oracle_samples", "1000")),
        oracle_exact=algo_params.get("oracle_exact", "auto"),
        ofu_oracle=algo_params.get("ofu_oracle", "auto"),
        oracle_max_enum_edges=int(algo_params.get("max_enum_edges", "12")),
        bayes_instances=int(get("run", "bayes_instances", "0")),
        prior=prior,
        meta={
            "config_path": path,
            "graph_path": graph_path,
            "overrides": applied,
            "out": get("run", "out", "traces"),
        },
    )
    return config
