import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biasim import Engine
from biasim.reactance import (ReactanceConfig, blend, classify_targets,
                              messenger_influence, peer_interact, stop_condition)

opinion = st.floats(0.0, 1.0, allow_nan=False)


class TestBlend:
    @given(opinion, st.floats(0.51, 1.0, allow_nan=False))
    def test_fixed_point(self, x, w):
        assert blend(x, x, w) == pytest.approx(x)

    def test_default_weight_arithmetic(self):
        assert blend(0.0, 1.0, 0.8) == pytest.approx(0.2)

    @given(opinion, opinion, st.floats(0.51, 1.0, allow_nan=False))
    def test_result_between_inputs(self, a, b, w):
        lo, hi = min(a, b), max(a, b)
        assert lo - 1e-12 <= blend(a, b, w) <= hi + 1e-12

    def test_repeated_blending_converges_to_midpoint(self):
        # two-agent map oracle: simultaneous blends conserve the sum, so the
        # common limit is the exact midpoint
        a, b = 0.05, 0.93
        target = (a + b) / 2
        for _ in range(200):
            a, b = blend(a, b, 0.8), blend(b, a, 0.8)
        assert abs(a - target) < 1e-6 and abs(b - target) < 1e-6
        assert 0.05 < a < 0.93


class TestMessengerInfluence:
    def test_rational_agent_blends(self):
        assert messenger_influence(0.8, False, 0.2, 0.0, 0.8) == pytest.approx(0.68)

    def test_susceptible_repulsion_arithmetic(self):
        # d = 0.6, repelled by (1-w)*d = 0.12 away from the message
        assert messenger_influence(0.8, True, 0.2, 0.0, 0.8) == pytest.approx(0.92)

    def test_threshold_not_crossed_attracts(self):
        assert messenger_influence(0.3, True, 0.2, 0.25, 0.8) == pytest.approx(0.28)

    @given(opinion, opinion, st.floats(0.0, 1.0, allow_nan=False))
    def test_dichotomy_exact_at_threshold(self, op, msg, delta):
        d = abs(op - msg)
        out = messenger_influence(op, True, msg, delta, 0.8)
        if d <= delta:
            assert abs(out - msg) <= d + 1e-12              # attracted
        else:
            assert abs(out - msg) >= d - 1e-12              # repelled
            assert 0.0 <= out <= 1.0

    @given(opinion, opinion)
    def test_repulsion_magnitude_mirrors_attraction(self, op, msg):
        attracted = messenger_influence(op, False, msg, 1.0, 0.8)
        repelled = messenger_influence(op, True, msg, 0.0, 0.8)
        d = abs(op - msg)
        assert abs(attracted - op) == pytest.approx(0.2 * d, abs=1e-12)
        if d > 0:
            # same gain, opposite direction, unless the boundary clips it
            moved = abs(repelled - op)
            assert moved == pytest.approx(0.2 * d, abs=1e-12) or repelled in (0.0, 1.0)


class TestPeerInteract:
    def test_disagreement_discarded_under_confirmation(self):
        cfg = ReactanceConfig(confirmation_bias=True)
        assert peer_interact(0.9, 0.1, cfg) == (0.9, 0.1)

    def test_agreement_extremizes_beyond_blend(self):
        cfg = ReactanceConfig(confirmation_bias=True)
        na, nb = peer_interact(0.8, 0.9, cfg)
        assert na > blend(0.8, 0.9, 0.8)
        assert nb > blend(0.9, 0.8, 0.8)

    def test_plain_contagion_blends_both(self):
        cfg = ReactanceConfig()
        na, nb = peer_interact(0.2, 0.6, cfg)
        assert na == pytest.approx(blend(0.2, 0.6, 0.8))
        assert nb == pytest.approx(blend(0.6, 0.2, 0.8))

    def test_peer_reactance_flag_repels_far_opinions(self):
        cfg = ReactanceConfig(peer_reactance=True, reactance_delta=0.1)
        na, nb = peer_interact(0.9, 0.2, cfg, a_susceptible=True, b_susceptible=False)
        assert na > 0.9            # susceptible side repelled
        assert nb == pytest.approx(blend(0.2, 0.9, 0.8))

    @given(opinion, opinion, st.booleans(), st.booleans())
    def test_outputs_bounded(self, a, b, ca, cb):
        cfg = ReactanceConfig(confirmation_bias=ca, peer_reactance=cb)
        na, nb = peer_interact(a, b, cfg, a_susceptible=True, b_susceptible=True)
        assert 0.0 <= na <= 1.0 and 0.0 <= nb <= 1.0

    def test_polarization_empties_the_middle(self):
        # simulation property: confirmation bias plus contagion drives a
        # bimodal split with nobody left between 0.4 and 0.6
        e = Engine("reactance", {
            "world.population_size": 50, "world.width": 15, "world.height": 15,
            "world.encounter_radius": 2.0,
            "reactance.initial_mean": 0.5,
            "contagion": True, "confirmation_bias": True, "broadcasting": False,
        }, seed=3)
        meetings = 0
        while meetings < 10_000:
            e.world.step_movement()
            pairs = e.world.encounters()
            meetings += sum(1 for i, j in pairs if j != e.model.messenger_id)
            e.model.advance(e.world, pairs)
        ops = e.model.opinions
        assert ((ops <= 0.4) | (ops >= 0.6)).all()
        assert (ops <= 0.4).any() and (ops >= 0.6).any()


def clamped_normal_mean(mu, sigma):
    """Quadrature oracle for E[clip(N(mu, sigma), 0, 1)]."""
    from scipy import integrate, stats
    inner = integrate.quad(lambda x: x * stats.norm.pdf(x, mu, sigma), 0, 1)[0]
    return inner + 1.0 * (1 - stats.norm.cdf(1, mu, sigma))


class TestInitPopulation:
    def test_clamped_gaussian_mean(self):
        oracle = clamped_normal_mean(0.8, 0.5)
        assert oracle == pytest.approx(0.696402, abs=1e-5)  # frozen oracle value
        e = Engine("reactance", {"reactance.initial_mean": 0.8,
                                 "world.population_size": 1000}, seed=8)
        assert float(e.model.opinions.mean()) == pytest.approx(oracle, abs=0.05)

    def test_zero_variance_degenerate(self):
        e = Engine("reactance", {"reactance.initial_mean": 0.8,
                                 "reactance.init_variance": 0.0,
                                 "world.population_size": 50}, seed=8)
        assert (e.model.opinions == 0.8).all()

    def test_susceptible_fraction_binomial(self):
        e = Engine("reactance", {"world.population_size": 1000}, seed=8)
        assert e.model.susceptible.mean() == pytest.approx(0.5, abs=0.05)

    def test_opinions_in_bounds(self):
        e = Engine("reactance", {"reactance.initial_mean": 0.9,
                                 "world.population_size": 400}, seed=8)
        assert (e.model.opinions >= 0).all() and (e.model.opinions <= 1).all()


class TestClassifyTargets:
    def test_three_way_example(self):
        ops = np.array([0.2, 0.4, 0.9])
        sus = np.array([False, False, True])
        assert classify_targets(ops, sus, 0.2, 0.25, 0.05) == (1, 1, 1)

    def test_delta_one_disables_negative_target(self):
        g = np.random.default_rng(0)
        ops = g.random(200)
        sus = g.random(200) < 0.5
        assert classify_targets(ops, sus, 0.3, 1.0, 0.05)[2] == 0

    def test_everyone_convinced(self):
        ops = np.full(30, 0.42)
        sus = np.zeros(30, dtype=bool)
        assert classify_targets(ops, sus, 0.42, 0.2, 0.05) == (30, 0, 0)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**31), st.floats(0, 1, allow_nan=False),
           st.floats(0, 1, allow_nan=False), st.floats(0, 0.3, allow_nan=False))
    def test_matches_per_agent_oracle(self, seed, msg, delta, eps):
        g = np.random.default_rng(seed)
        n = int(g.integers(1, 60))
        ops = g.random(n)
        sus = g.random(n) < 0.5
        convinced = positive = negative = 0
        for o, s in zip(ops, sus):
            d = abs(o - msg)
            if d <= eps:
                convinced += 1
            elif s and d > delta:
                negative += 1
            else:
                positive += 1
        assert classify_targets(ops, sus, msg, delta, eps) == (convinced, positive, negative)
        assert convinced + positive + negative == n

    def test_stop_condition(self):
        assert stop_condition((30, 0, 0)) is True
        assert stop_condition((0, 30, 0)) is False


def run_reactance(seed, ticks=None, **params):
    overrides = {
        "world.width": 20, "world.height": 20, "world.population_size": 100,
        "world.encounter_radius": 2.0, "reactance.initial_mean": 0.8,
        "message": 0.2, "broadcasting": True, "contagion": False,
    }
    overrides.update(params)
    e = Engine("reactance", overrides, seed=seed)
    frames = []
    for _ in range(ticks or 1500):
        frames.append(e.step())
        if ticks is None and frames[-1]["positive_count"] == 0:
            break
    return e, frames


class TestDynamics:
    def test_boundedness_under_all_mechanisms(self):
        e, _ = run_reactance(5, ticks=300, contagion=True, confirmation_bias=True,
                             reactance_delta=0.3)
        assert (e.model.opinions >= 0).all() and (e.model.opinions <= 1).all()

    def test_convergence_when_bias_disabled(self):
        e, frames = run_reactance(1, reactance_delta=1.0)
        assert frames[-1]["positive_count"] == 0
        assert np.abs(e.model.opinions - 0.2).max() <= 0.05
        assert frames[-1]["convinced_count"] == 100

    def test_divergence_split_when_delta_zero(self):
        e, frames = run_reactance(2, reactance_delta=0.0)
        assert frames[-1]["positive_count"] == 0
        sus = e.model.susceptible
        assert abs(frames[-1]["mean_opinion_rational"] - 0.2) <= 0.05
        assert frames[-1]["mean_opinion_susceptible"] >= frames[0]["mean_opinion_susceptible"]

    def test_susceptible_distance_nondecreasing_under_full_reactance(self):
        e = Engine("reactance", {
            "world.width": 20, "world.height": 20, "world.population_size": 100,
            "world.encounter_radius": 2.0, "reactance.initial_mean": 0.8,
            "message": 0.2, "reactance_delta": 0.0, "contagion": False,
        }, seed=4)
        sus = e.model.susceptible
        prev = np.abs(e.model.opinions[sus] - 0.2)
        for _ in range(400):
            e.step()
            cur = np.abs(e.model.opinions[sus] - 0.2)
            assert (cur >= prev - 1e-12).all()
            prev = cur

    def test_after_stop_nobody_moves_toward_message(self):
        # once positive is empty (contagion off) the negative target only
        # repels further and convinced stay convinced
        e, frames = run_reactance(6, reactance_delta=0.2)
        counts = (frames[-1]["convinced_count"], frames[-1]["positive_count"],
                  frames[-1]["negative_count"])
        assert stop_condition(counts)
        d_before = np.abs(e.model.opinions - 0.2)
        for _ in range(50):
            e.step()
        d_after = np.abs(e.model.opinions - 0.2)
        assert (d_after >= d_before - e.model.cfg.convinced_tolerance - 1e-12).all()
        assert e.metrics_frame()["convinced_count"] >= counts[0]
