import math

import numpy as np
import pytest

from oracles import mle_gllr

from linbai.allocation import Allocation, psi
from linbai.environment import RewardStream
from linbai.errors import InvalidConfigError, InvalidInputError, SingularDesignError
from linbai.estimator import DesignState
from linbai.instance import ArmSet, Instance, gen_many_arms, orthonormal_instance
from linbai.lts import (
    LazySchedule,
    StopConfig,
    TrackerState,
    beta_threshold,
    f_threshold,
    gllr_pair,
    maybe_update_allocation,
    next_arm,
    run_lts,
    should_stop,
    stopping_statistic,
)
from linbai.records import RunRecord
from linbai.rng import philox_generator, standard_normal

LN20 = math.log(20.0)


def _ortho_tracker(mode="noavg", allocation=None):
    arms = orthonormal_instance(2).arm_set
    return TrackerState(arms, mode=mode, allocation=allocation)


def test_lazy_schedule_kinds():
    exp = LazySchedule.parse("exp")
    assert [t for t in range(1, 70) if exp.contains(t)] == [1, 2, 4, 8, 16, 32, 64]
    per = LazySchedule.parse("period:5")
    assert [t for t in range(1, 17) if per.contains(t)] == [1, 6, 11, 16]
    every = LazySchedule.parse("every")
    assert all(every.contains(t) for t in range(1, 10))
    with pytest.raises(InvalidConfigError):
        LazySchedule.parse("sometimes")


def test_f_threshold_values():
    tracker = _ortho_tracker()
    assert tracker.c_a0 == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-12)
    assert f_threshold(4, tracker) == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert f_threshold(0, tracker) == 0.0
    grid = [f_threshold(t, tracker) for t in range(20)]
    assert all(a < b for a, b in zip(grid, grid[1:]))


def test_next_arm_forced_at_start():
    tracker = _ortho_tracker()
    design = DesignState(2, n_arms=2)
    assert next_arm(tracker, design) == 0  # first exploration arm
    design.update(np.array([1.0, 0.0]), 0, 0.0)
    assert next_arm(tracker, design) == 1  # cycles through the spanning set


def test_next_arm_single_support_tracking():
    tracker = _ortho_tracker(allocation=Allocation(np.array([0.0, 1.0])))
    design = DesignState(2, n_arms=2)
    arms = np.eye(2)
    picks = []
    for _ in range(300):
        i = next_arm(tracker, design)
        forced = design.t == 0 or design.min_eig < f_threshold(design.t, tracker)
        picks.append((i, forced))
        design.update(arms[i], i, 0.0)
    tracked = [i for i, forced in picks if not forced]
    assert tracked and all(i == 1 for i in tracked)


def test_tracking_deficit_bound():
    # constant w = (1/2, 1/2): counts stay within 1 + d of the target
    tracker = _ortho_tracker(allocation=Allocation(np.array([0.5, 0.5])))
    design = DesignState(2, n_arms=2)
    arms = np.eye(2)
    for t in range(1, 4097):
        i = next_arm(tracker, design)
        design.update(arms[i], i, 0.0)
        bound = 1 + 2
        assert abs(design.counts[0] - t / 2) <= bound
        assert abs(design.counts[1] - t / 2) <= bound


def test_tracking_converges_to_constant_allocation():
    tracker = _ortho_tracker(allocation=Allocation(np.array([0.5, 0.5])))
    design = DesignState(2, n_arms=2)
    arms = np.eye(2)
    for _ in range(10_000):
        i = next_arm(tracker, design)
        design.update(arms[i], i, 0.0)
    assert np.max(np.abs(design.counts / design.t - 0.5)) <= 0.01


def test_maybe_update_respects_schedule(ortho2):
    calls = []

    def spy(mu, arms, warm_start):
        calls.append(True)
        from linbai.allocation import optimize_allocation

        return optimize_allocation(mu, arms, warm_start=warm_start, tol=1e-4, max_iter=500)

    tracker = _ortho_tracker()
    design = DesignState(2, n_arms=2)
    schedule = LazySchedule.parse("period:3")
    stream = RewardStream(ortho2, 0)
    arms = np.eye(2)
    update_rounds = []
    for t in range(1, 13):
        i = next_arm(tracker, design)
        design.update(arms[i], i, stream.sample_reward(arms[i]))
        before = len(calls)
        maybe_update_allocation(tracker, schedule, design, spy)
        if len(calls) > before:
            update_rounds.append(t)
    assert update_rounds == [1, 4, 7, 10]
    assert np.allclose(tracker.w_cumsum.sum(), 12.0, atol=1e-9)


def test_maybe_update_skips_on_ties():
    tracker = _ortho_tracker()
    design = DesignState(2, n_arms=2)  # no data: mu_hat = 0, tied best arms

    def explode(mu, arms, warm_start):
        raise AssertionError("must not be called on ties")

    maybe_update_allocation(tracker, LazySchedule.parse("every"), design, explode)
    assert tracker.allocation is None


def test_maybe_update_survives_optimizer_failure(ortho2):
    tracker = _ortho_tracker(allocation=Allocation(np.array([0.5, 0.5])))
    design = DesignState(2, n_arms=2)
    design.update(np.array([1.0, 0.0]), 0, 1.0)

    def broken(mu, arms, warm_start):
        raise SingularDesignError("synthetic failure")

    maybe_update_allocation(tracker, LazySchedule.parse("every"), design, broken)
    assert np.array_equal(tracker.allocation.weights, [0.5, 0.5])


def _design_from(pulls):
    dim = len(pulls[0][0])
    st = DesignState(dim, n_arms=None)
    for arm, reward in pulls:
        st.update(np.asarray(arm, dtype=float), None, reward)
    return st


def test_gllr_pair_example():
    # gram = diag(2, 2), mu_hat = (0.5, 0.1)
    st = _design_from([([1, 0], 0.5), ([1, 0], 0.5), ([0, 1], 0.1), ([0, 1], 0.1)])
    z = gllr_pair(st, np.array([1.0, 0.0]), np.array([0.0, 1.0]), 0.0)
    assert z == pytest.approx(0.08, abs=1e-12)


def test_gllr_pair_sign_boundary():
    st = _design_from([([1, 0], 0.3), ([0, 1], 0.5)])
    z = gllr_pair(st, np.array([1.0, 0.0]), np.array([0.0, 1.0]), 0.2)
    assert z == 0.0


def test_gllr_pair_antisymmetry():
    st = _design_from([([1, 0], 0.9), ([0, 1], 0.2), ([1, 1], 1.3)])
    a, b = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    assert gllr_pair(st, a, b, 0.0) == pytest.approx(-gllr_pair(st, b, a, 0.0), rel=1e-12)


def test_gllr_pair_errors():
    st = _design_from([([1, 0], 1.0)])
    with pytest.raises(InvalidInputError):
        gllr_pair(st, np.array([1.0, 0.0]), np.array([1.0, 0.0]), 0.0)
    with pytest.raises(SingularDesignError):
        gllr_pair(st, np.array([1.0, 0.0]), np.array([0.0, 1.0]), 0.0)


def test_gllr_matches_constrained_mle(rng):
    # closed form vs two constrained quadratic programs on random states
    for trial in range(10):
        d = int(rng.integers(2, 4))
        n_arms = int(rng.integers(3, 6))
        arms = standard_normal(philox_generator(trial), (n_arms, d))
        mu = rng.standard_normal(d)
        st = DesignState(d, n_arms=n_arms)
        history = []
        for _ in range(d + 10):
            i = int(rng.integers(0, n_arms))
            r = float(arms[i] @ mu + rng.standard_normal())
            st.update(arms[i], i, r)
            history.append((arms[i].copy(), r))
        if st.min_eig <= 0:
            continue
        eps = float(rng.choice([0.0, 0.25]))
        closed = gllr_pair(st, arms[0], arms[1], eps)
        assert closed == pytest.approx(mle_gllr(history, arms[0], arms[1], eps), abs=1e-5)


def test_stopping_statistic_tied_leaders_give_zero():
    arms = ArmSet(dim=2, arms=np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    st = _design_from([([1, 0], 1.0), ([0, 1], 0.0)])
    z, a_hat = stopping_statistic(st, arms)
    assert z == 0.0 and a_hat == 0


def test_stopping_statistic_two_arm_closed_form(ortho2):
    m = 7
    pulls = [([1, 0], 0.8)] * m + [([0, 1], 0.3)] * m
    st = _design_from(pulls)
    z, a_hat = stopping_statistic(st, ortho2.arm_set)
    mu_hat = st.estimate()
    assert a_hat == 0
    assert z == pytest.approx(m * (mu_hat[0] - mu_hat[1]) ** 2 / 4.0, rel=1e-12)


def test_stopping_statistic_identity_with_psi(rng):
    inst = gen_many_arms(25, seed=4)
    arms = inst.arm_set
    stream = RewardStream(inst, 3)
    st = DesignState(2, n_arms=25)
    for t in range(1, 120):
        i = int(rng.integers(0, 25))
        st.update(arms.arms[i], i, stream.sample_reward(arms.arms[i]))
        if st.min_eig > 0:
            z, a_hat = stopping_statistic(st, arms)
            expected = st.t * psi(st.estimate(), st.counts / st.t, arms)
            assert abs(z - expected) <= 1e-8 * max(1.0, z)


def test_beta_threshold_values(ortho2):
    cfg = StopConfig(delta=0.05, sigma=1.0, u=1.0, c=1.0)
    empty = DesignState(2, n_arms=2)
    assert beta_threshold(empty, cfg, 0) == pytest.approx(2.0 * LN20, rel=1e-12)
    st = _design_from([([1, 0], 0.0)] * 3 + [([0, 1], 0.0)])  # gram = diag(3, 1)
    assert beta_threshold(st, cfg, st.t) == pytest.approx(math.log(8.0) + 2.0 * LN20, rel=1e-12)


def test_beta_threshold_remark_bound(rng):
    # with c = max |a|^2 and u = 1: beta <= 2 sigma^2 log((t+1)^{d/2} / delta)
    inst = gen_many_arms(30, seed=6)
    cfg = StopConfig(delta=0.05, sigma=1.0, u=1.0, c=inst.arm_set.max_norm**2)
    st = DesignState(2, n_arms=30)
    stream = RewardStream(inst, 0)
    for t in range(1, 200):
        i = int(rng.integers(0, 30))
        st.update(inst.arm_set.arms[i], i, stream.sample_reward(inst.arm_set.arms[i]))
        cap = 2.0 * math.log((t + 1) ** 1.0 / 0.05)  # d/2 = 1
        assert beta_threshold(st, cfg, t) <= cap + 1e-9


def test_should_stop_conjunction(ortho2):
    cfg = StopConfig(delta=0.05, sigma=1.0, u=0.1, c=1.0)
    st = DesignState(2, n_arms=2)
    assert not should_stop(st, cfg, ortho2.arm_set)  # t = 0
    st.update(np.array([1.0, 0.0]), 0, 1.0)
    assert not should_stop(st, cfg, ortho2.arm_set)  # rank deficient
    st.update(np.array([0.0, 1.0]), 1, 0.9)
    assert st.min_eig >= cfg.c
    z, _ = stopping_statistic(st, ortho2.arm_set)
    assert z <= beta_threshold(st, cfg, st.t)
    assert not should_stop(st, cfg, ortho2.arm_set)  # design fine but Z below beta


def test_run_noiseless_returns_best_arm():
    inst = orthonormal_instance(2, sigma=1e-9)
    cfg = StopConfig.from_profile("paper-appendix", 0.05, inst.sigma, inst.arm_set)
    rec = run_lts(inst, cfg, seed=0)
    assert rec.correct and rec.answer == 0 and not rec.incomplete


def test_run_huge_gap_noiseless_stops():
    inst = orthonormal_instance(2, sigma=1e-6)
    cfg = StopConfig.from_profile("paper-appendix", 0.05, inst.sigma, inst.arm_set)
    rec = run_lts(inst, cfg, seed=1)
    assert rec.tau < 100 and rec.correct


def test_run_tau_exceeds_dimension():
    inst = gen_many_arms(40, seed=2)
    cfg = StopConfig.from_profile("paper-appendix", 0.05, 1.0, inst.arm_set)
    rec = run_lts(inst, cfg, seed=5)
    assert rec.tau > inst.arm_set.dim


def test_run_deterministic_per_seed():
    inst = gen_many_arms(40, seed=2)
    cfg = StopConfig.from_profile("paper-appendix", 0.1, 1.0, inst.arm_set)
    r1 = run_lts(inst, cfg, seed=11)
    r2 = run_lts(inst, cfg, seed=11)
    assert (r1.tau, r1.answer, r1.correct, r1.support_size) == (r2.tau, r2.answer, r2.correct, r2.support_size)


def test_run_cap_flags_incomplete():
    inst = gen_many_arms(40, seed=2)
    cfg = StopConfig.from_profile("paper-appendix", 0.05, 1.0, inst.arm_set)
    rec = run_lts(inst, cfg, seed=3, max_rounds=17)
    assert rec.incomplete and rec.tau == 17
    assert isinstance(rec, RunRecord)


def test_forced_exploration_invariant_small():
    inst = gen_many_arms(30, seed=8)
    cfg = StopConfig.from_profile("paper-appendix", 0.1, 1.0, inst.arm_set)
    threshold = 5 * 2 / 4 + 1 / (4 * 2) + 1.5  # = 4.125 for d = 2
    for seed in range(10):
        tracker_box = {}
        violations = []

        def check(design, tracker):
            tracker_box["t"] = tracker
            t = design.t
            if t >= threshold:
                if design.min_eig < f_threshold(t - 2 - 1, tracker) - 1e-9:
                    violations.append(t)

        run_lts(inst, cfg, seed=seed, on_round=check)
        assert violations == []


def test_delta_pac_small_instance():
    inst = gen_many_arms(20, seed=12)
    cfg = StopConfig.from_profile("paper-appendix", 0.2, 1.0, inst.arm_set)
    errors = sum(not run_lts(inst, cfg, seed=s).correct for s in range(60))
    assert errors / 60 <= 0.2


def test_tracking_modes_share_contract():
    inst = gen_many_arms(25, seed=5)
    cfg = StopConfig.from_profile("paper-appendix", 0.1, 1.0, inst.arm_set)
    for mode in ("avg", "noavg"):
        rec = run_lts(inst, cfg, mode=mode, seed=2)
        assert rec.algorithm == f"lts-{mode}" and not rec.incomplete
