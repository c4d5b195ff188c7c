import math
import os

import numpy as np
import pytest

from cimbandits.diffusion import Action, TieRule
from cimbandits.fixtures import random_instance
from cimbandits.graph import Graph, dumps_edge_list
from cimbandits.harness import (
    BaselineCache,
    Competitor,
    CompetitorSpec,
    ExperimentConfig,
    RegretTrace,
    aggregate_traces,
    baseline_opt,
    bayesian_sweep,
    load_config,
    read_trace,
    run_experiment,
    sample_instance_mu,
    write_trace,
    write_traces,
)
from cimbandits.oracles import exhaustive_seed_select
from helpers import ring_fixture


def small_config(**kw):
    g, mu = ring_fixture()
    defaults = dict(
        graph=g,
        true_mu=mu,
        algorithm="emp",
        k=2,
        rule=TieRule.B_OVER_A,
        horizon=30,
        repetitions=2,
        master_seed=7,
        competitor=CompetitorSpec("rd", 2),
    )
    defaults.update(kw)
    return ExperimentConfig(**defaults)


class TestCompetitor:
    def test_rd_inclusion_frequency(self):
        config = small_config()
        comp = Competitor(CompetitorSpec("rd", 2), config)
        rng = np.random.default_rng(50)
        rounds = 10_000
        counts = np.zeros(config.graph.n)
        for t in range(rounds):
            for u in comp.step(t, rng):
                counts[u] += 1
        p = 2 / config.graph.n
        sigma = math.sqrt(p * (1 - p) / rounds)
        assert np.all(np.abs(counts / rounds - p) < 4 * sigma)

    def test_im_star_selects_hub(self):
        g = Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
        config = ExperimentConfig(
            graph=g, true_mu=np.full(4, 0.9), algorithm="emp", k=1,
            rule=TieRule.B_OVER_A, horizon=5, competitor=CompetitorSpec("im", 1),
        )
        comp = Competitor(config.competitor, config)
        rng = np.random.default_rng(51)
        assert comp.step(0, rng) == {0}
        assert comp.step(1, rng) == {0}

    def test_fixed_constant(self):
        config = small_config(competitor=CompetitorSpec("fixed", nodes=frozenset({3})))
        comp = Competitor(config.competitor, config)
        rng = np.random.default_rng(52)
        assert all(comp.step(t, rng) == {3} for t in range(10))

    def test_size_validation(self):
        with pytest.raises(ValueError):
            small_config(competitor=CompetitorSpec("rd", 99))

    def test_unknown_fixed_node(self):
        with pytest.raises(ValueError):
            small_config(competitor=CompetitorSpec("fixed", nodes=frozenset({99})))


class TestBaseline:
    def test_cache_hit(self):
        config = small_config()
        cache = BaselineCache(config, config.true_mu)
        v1 = cache.value(frozenset({0}))
        assert len(cache.values) == 1
        v2 = cache.value(frozenset({0}))
        assert v1 == v2 and len(cache.values) == 1
        cache.value(frozenset({1}))
        assert len(cache.values) == 2

    def test_saturated_budget(self):
        g = Graph(3, [(0, 1), (1, 2)])
        mu = np.array([0.5, 0.5])
        value = baseline_opt(g, mu, frozenset(), 3, TieRule.A_OVER_B)
        from cimbandits.diffusion import exact_spread

        assert value == pytest.approx(exact_spread(g, mu, Action({0, 1, 2}, set(), 3), TieRule.A_OVER_B))

    def test_greedy_within_e_fraction_of_exhaustive(self):
        rng = np.random.default_rng(53)
        for i in range(8):
            g, probs, action = random_instance(rng, max_n=6, max_m=9)
            k = min(2, g.n)
            rule = TieRule.A_OVER_B if i % 2 else TieRule.B_OVER_A
            greedy_v = baseline_opt(g, probs, action.seeds_b, k, rule)
            best = exhaustive_seed_select(g, probs, action.seeds_b, k, rule, exact=True)
            assert greedy_v >= (1 - 1 / np.e) * best.value - 1e-9


class TestRunExperiment:
    def test_oracle_policy_has_zero_regret(self):
        config = small_config(algorithm="oracle", horizon=40, repetitions=1)
        (trace,) = run_experiment(config)
        assert max(abs(b - r) for b, r in zip(trace.baseline, trace.reward)) < 1e-9
        assert abs(trace.cum_regret[-1]) < 1e-9

    def test_zero_probability_environment(self):
        g, _ = ring_fixture()
        config = small_config(true_mu=np.zeros(g.m), algorithm="emp", horizon=25, repetitions=1)
        (trace,) = run_experiment(config)
        assert abs(trace.cum_regret[-1]) < 1e-9
        assert all(r == pytest.approx(2.0) for r in trace.reward)

    def test_telescoping(self):
        config = small_config(algorithm="eps-greedy", algo_params={"epsilon": "0.2"}, horizon=30)
        for trace in run_experiment(config):
            cum = 0.0
            for t in range(len(trace)):
                cum = cum + (trace.baseline[t] - trace.reward[t])
                assert trace.cum_regret[t] == cum

    def test_reproducible_across_runs_and_jobs(self):
        config = small_config(algorithm="ofu", horizon=20, repetitions=3)
        a = run_experiment(config, jobs=1)
        b = run_experiment(config, jobs=1)
        c = run_experiment(config, jobs=3)
        for x, y in zip(a, b):
            assert x.cum_regret == y.cum_regret
        for x, y in zip(a, c):
            assert x.cum_regret == y.cum_regret
            assert x.baseline == y.baseline and x.reward == y.reward

    def test_learner_ignores_baseline_truth(self):
        # corrupting the values fed to the baseline must not change actions
        config = small_config(algorithm="ofu", horizon=25, repetitions=1)
        wrong = np.clip(config.true_mu * 0.1 + 0.05, 0, 1)
        (a,) = run_experiment(config, record_actions=True)
        (b,) = run_experiment(config, baseline_mu=wrong, record_actions=True)
        assert a.actions == b.actions
        assert a.baseline != b.baseline

    def test_algorithms_all_run(self):
        for name, params in [
            ("ts", {}),
            ("ofu", {"alpha_rho": "0.5"}),
            ("cucb", {}),
            ("eps-greedy", {"epsilon": "0.1"}),
            ("etc", {"n_visits": "1"}),
            ("emp", {}),
        ]:
            config = small_config(algorithm=name, algo_params=params, horizon=12, repetitions=1)
            (trace,) = run_experiment(config)
            assert len(trace) == 12

    def test_unknown_algorithm(self):
        config = small_config()
        config.algorithm = "nope"
        with pytest.raises(ValueError, match="unknown algorithm"):
            run_experiment(config)


class TestBayesianSweep:
    def test_point_mass_prior_matches_frequentist(self):
        g, mu = ring_fixture()
        config = small_config(
            algorithm="ts", prior="weights:1000000", horizon=25, repetitions=2
        )
        aggregate, traces = bayesian_sweep(config, 1)
        freq_config = small_config(algorithm="ts", prior="weights:1000000", horizon=25, repetitions=2)
        freq = run_experiment(freq_config)
        # instance mu is a hair away from the true weights; regrets stay close
        inst_mu = sample_instance_mu(config, 0)
        assert np.max(np.abs(inst_mu - mu)) < 0.005
        assert len(traces) == 2
        assert abs(aggregate.cum_regret[-1] - aggregate_traces(freq).cum_regret[-1]) < 3.0

    def test_prior_sampling_centered_on_weights(self):
        config = small_config(prior="weights:5")
        draws = np.stack([sample_instance_mu(config, i) for i in range(400)])
        w = config.true_mu
        sigma = np.sqrt(w * (1 - w) / 6 / 400)
        assert np.all(np.abs(draws.mean(axis=0) - w) < 4 * sigma + 1e-3)

    def test_run_count(self):
        config = small_config(algorithm="emp", horizon=8, repetitions=2, prior="weights:5")
        aggregate, traces = bayesian_sweep(config, 3)
        assert len(traces) == 6
        assert len(aggregate) == 8


class TestTracePersistence:
    def make_trace(self):
        return RegretTrace(
            baseline=[1.5, 1.5, 2.25],
            reward=[0.5, 1.4999999999999998, 2.0],
            cum_regret=[1.0, 1.0000000000000002, 1.2500000000000002],
            config_hash="abc123",
            seed=9,
            repetition=1,
        )

    def test_round_trip(self, tmp_path):
        trace = self.make_trace()
        write_trace(trace, tmp_path / "t")
        back = read_trace(tmp_path / "t")
        assert back.baseline == trace.baseline
        assert back.reward == trace.reward
        assert back.cum_regret == trace.cum_regret
        assert back.config_hash == "abc123"
        assert (back.seed, back.repetition) == (9, 1)

    def test_csv_header_and_naming(self, tmp_path):
        config = small_config(horizon=5, repetitions=3)
        traces = run_experiment(config)
        paths = write_traces(traces, tmp_path)
        names = sorted(os.path.basename(p) for p in paths)
        assert names == [
            "trace_mean.csv",
            "trace_rep000.csv",
            "trace_rep001.csv",
            "trace_rep002.csv",
        ]
        body = (tmp_path / "trace_rep000.csv").read_text()
        assert body.splitlines()[0] == "round,baseline,reward,cum_regret"
        agg = read_trace(tmp_path / "trace_mean")
        manual = aggregate_traces(traces)
        assert agg.cum_regret == manual.cum_regret

    def test_bad_header_rejected(self, tmp_path):
        (tmp_path / "x.csv").write_text("wrong\n1,2,3,4\n")
        with pytest.raises(ValueError, match="header"):
            read_trace(tmp_path / "x")


class TestConfigFiles:
    def write_fixture(self, tmp_path):
        g, mu = ring_fixture()
        (tmp_path / "g.txt").write_text(dumps_edge_list(g, mu))
        cfg = """
[graph]
path = g.txt

[environment]
tie_rule = B>A

[algorithm]
name = ofu
alpha_rho = 1.0

[competitor]
kind = rd
size = 2

[run]
horizon = 10
repetitions = 2
seed = 3
k = 2
"""
        (tmp_path / "exp.cfg").write_text(cfg)
        return tmp_path / "exp.cfg"

    def test_load_and_run(self, tmp_path):
        config = load_config(self.write_fixture(tmp_path))
        assert config.algorithm == "ofu"
        assert config.horizon == 10 and config.k == 2
        traces = run_experiment(config)
        assert len(traces) == 2

    def test_overrides(self, tmp_path):
        config = load_config(self.write_fixture(tmp_path), ["horizon=4", "run.seed=11"])
        assert config.horizon == 4 and config.master_seed == 11
        assert config.meta["overrides"] == {"run.horizon": "4", "run.seed": "11"}

    def test_unknown_override_key(self, tmp_path):
        with pytest.raises(ValueError, match="unknown key"):
            load_config(self.write_fixture(tmp_path), ["bogus=1"])

    def test_missing_graph(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("[graph]\npath = nowhere.txt\n[algorithm]\nname = emp\n")
        with pytest.raises(ValueError, match="nowhere.txt"):
            load_config(cfg)

    def test_mu_const_spec(self, tmp_path):
        path = self.write_fixture(tmp_path)
        config = load_config(path, ["environment.mu=const:0.25"])
        assert np.all(config.true_mu == 0.25)

    def test_config_hash_changes_with_settings(self, tmp_path):
        path = self.write_fixture(tmp_path)
        h1 = load_config(path).config_hash()
        h2 = load_config(path, ["horizon=99"]).config_hash()
        assert h1 != h2
