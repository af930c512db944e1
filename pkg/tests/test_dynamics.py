import math

import numpy as np
import pytest

from collapsemc.dynamics import (CollapseParams, IncompleteNoiseError,
                                 InvalidProfileError, NoCollapsePossibleError,
                                 NonConvergenceError, NonFiniteNoiseError,
                                 OccupationProfile, StreamLayout, TwoBranchState,
                                 aggregate_profiles, collapse_batch, effective_rate,
                                 evolve_batch, run_to_collapse, run_trajectory,
                                 stable_q, step, union_cells, write_trajectory_csv)
from collapsemc.noise import derive_stream_key

ETA = 1e10
LAM = 1e-16

# frame-A style pair: one occupied cell per branch, Gamma = 2e4 / s
P1 = OccupationProfile((("yes", ETA), ("no", 0.0)))
P2 = OccupationProfile((("yes", 0.0), ("no", ETA)))
LAYOUT = StreamLayout((("yes", "no"),))
PARAMS = CollapseParams(dt=1.25e-7, lam=LAM)
GAMMA = 2.0 * LAM * ETA * ETA  # 2e4 per second


def keys_for(n, seed=1, det="D1", salt=""):
    return [(derive_stream_key(seed, det, k, salt=salt),) for k in range(n)]


# ---------------------------------------------------------------------------
# state and profiles
# ---------------------------------------------------------------------------

def test_stable_q_basic():
    assert stable_q(0.0) == 0.5
    assert stable_q(800.0) == 1.0
    assert stable_q(-700.0) > 0.0
    assert stable_q(-800.0) == 0.0  # graceful underflow, no overflow or NaN
    arr = stable_q(np.array([-1.0, 0.0, 1.0]))
    assert arr[0] + arr[2] == pytest.approx(1.0, abs=1e-15)


def test_two_branch_state_q_and_normalization():
    s = TwoBranchState.from_q(0.3)
    assert s.q == pytest.approx(0.3, rel=1e-14)
    assert s.q + (1.0 - s.q) == 1.0
    for q in (0.0, 1.0, 1e-9, 1.0 - 1e-9):
        assert TwoBranchState.from_q(q).q == pytest.approx(q, rel=1e-12, abs=1e-300)


def test_two_branch_state_extreme_log_ratio():
    # log-sum-exp discipline: stable out to |logw1 - logw2| of 700 and beyond
    assert TwoBranchState(0.0, -700.0).q == pytest.approx(1.0)
    lo = TwoBranchState(-700.0, 0.0).q
    assert 0.0 < lo < 1e-300
    assert TwoBranchState(-1000.0, -1700.0).q == pytest.approx(1.0)


def test_two_branch_state_validation():
    with pytest.raises(ValueError):
        TwoBranchState.from_q(1.5)
    with pytest.raises(ValueError):
        TwoBranchState.from_weights(-1.0, 2.0)
    s = TwoBranchState.from_weights(2.0, 2.0)
    assert s.q == 0.5


def test_profile_validation():
    with pytest.raises(InvalidProfileError):
        OccupationProfile((("a", 1.0), ("a", 2.0)))
    with pytest.raises(InvalidProfileError):
        OccupationProfile((("a", -1.0),))
    with pytest.raises(InvalidProfileError):
        OccupationProfile((("a", math.nan),))


def test_profile_absent_cells_read_zero():
    p = OccupationProfile((("a", 3.0),))
    assert p.eta("a") == 3.0
    assert p.eta("missing") == 0.0


def test_union_cells_order():
    p1 = OccupationProfile((("a", 1.0), ("b", 2.0)))
    p2 = OccupationProfile((("b", 1.0), ("c", 2.0)))
    assert union_cells(p1, p2) == ("a", "b", "c")


# ---------------------------------------------------------------------------
# effective_rate and aggregation
# ---------------------------------------------------------------------------

def test_effective_rate_identical_profiles_zero():
    p = OccupationProfile((("a", 5.0), ("b", 7.0)))
    assert effective_rate(p, p, 0.123) == 0.0


def test_effective_rate_single_cell():
    p1 = OccupationProfile((("a", ETA),))
    p2 = OccupationProfile(())
    assert effective_rate(p1, p2, LAM) == pytest.approx(1e4, rel=1e-12)


def test_effective_rate_two_cells():
    assert effective_rate(P1, P2, LAM) == pytest.approx(2e4, rel=1e-12)


def test_effective_rate_disjoint_union():
    p1 = OccupationProfile((("a", 3.0),))
    p2 = OccupationProfile((("b", 4.0),))
    assert effective_rate(p1, p2, 1.0) == pytest.approx(25.0, rel=1e-14)


def test_aggregate_single_cell_idempotent():
    p1 = OccupationProfile((("x", 5.0),))
    p2 = OccupationProfile(())
    a1, a2 = aggregate_profiles(p1, p2)
    assert a1.cells[0][1] == pytest.approx(5.0, rel=1e-15)
    assert a2.cells[0][1] == 0.0


def test_aggregate_root_sum_square():
    a1, _ = aggregate_profiles(P1, P2)
    assert a1.cells[0][1] == pytest.approx(math.sqrt(2.0) * ETA, rel=1e-14)


def test_aggregate_preserves_rate_property():
    rng = np.random.default_rng(20260809)
    for _ in range(50):
        c1 = {f"c{i}": float(rng.uniform(0, 2e10)) for i in range(5)}
        c2 = {f"c{i}": float(rng.uniform(0, 2e10)) for i in range(5)}
        p1 = OccupationProfile.from_dict(c1)
        p2 = OccupationProfile.from_dict(c2)
        a1, a2 = aggregate_profiles(p1, p2)
        assert effective_rate(a1, a2, LAM) == pytest.approx(
            effective_rate(p1, p2, LAM), rel=1e-12)


# ---------------------------------------------------------------------------
# step
# ---------------------------------------------------------------------------

def test_step_identical_profiles_leave_q_unchanged():
    p = OccupationProfile((("a", ETA), ("b", 3.0)))
    s = TwoBranchState.from_q(0.5)
    out = step(s, p, p, PARAMS, {"a": 0.37, "b": -1.2})
    assert out.q == 0.5


def test_step_hand_example():
    # single cell, eta1 = 1, eta2 = 0, lam dt = 0.01, dB = 0.1:
    # d(logw1) = 2*0.1 - 2*0.01 = 0.18, d(logw2) = 0
    p1 = OccupationProfile((("c", 1.0),))
    p2 = OccupationProfile((("c", 0.0),))
    params = CollapseParams(dt=1.0, lam=0.01, epsilon=1e-6, max_steps=10)
    s = TwoBranchState.from_q(0.5)
    out = step(s, p1, p2, params, {"c": 0.1})
    assert out.logw1 - out.logw2 == pytest.approx(
        (s.logw1 - s.logw2) + 0.18, abs=1e-15)
    expected_q = 1.0 / (1.0 + math.exp(-0.18))
    assert out.q == pytest.approx(expected_q, rel=1e-12)
    assert expected_q == pytest.approx(0.5449, abs=5e-5)


def test_step_noise_errors():
    s = TwoBranchState.from_q(0.5)
    with pytest.raises(IncompleteNoiseError):
        step(s, P1, P2, PARAMS, {"yes": 0.1})
    with pytest.raises(NonFiniteNoiseError):
        step(s, P1, P2, PARAMS, {"yes": 0.1, "no": math.inf})


def test_step_ignores_extraneous_cells():
    s = TwoBranchState.from_q(0.5)
    a = step(s, P1, P2, PARAMS, {"yes": 0.1, "no": -0.2})
    b = step(s, P1, P2, PARAMS, {"yes": 0.1, "no": -0.2, "other": 9.9})
    assert a == b


def test_params_validation():
    with pytest.raises(ValueError):
        CollapseParams(dt=0.0)
    with pytest.raises(ValueError):
        CollapseParams(dt=1.0, lam=-1.0)
    with pytest.raises(ValueError):
        CollapseParams(dt=1.0, epsilon=0.5)
    with pytest.raises(ValueError):
        CollapseParams(dt=1.0, max_steps=0)
    p = CollapseParams(dt=1.0, epsilon=1e-6)
    assert p.log_threshold == pytest.approx(math.log((1 - 1e-6) / 1e-6), rel=1e-12)


# ---------------------------------------------------------------------------
# run_to_collapse
# ---------------------------------------------------------------------------

def test_immediate_absorption():
    key = derive_stream_key(1, "D1", 0)
    res = run_to_collapse(1.0, P1, P2, PARAMS, key)
    assert (res.winner, res.duration, res.steps) == (1, 0.0, 0)
    res = run_to_collapse(0.0, P1, P2, PARAMS, key)
    assert (res.winner, res.duration) == (2, 0.0)
    res = run_to_collapse(PARAMS.epsilon / 2, P1, P2, PARAMS, key)
    assert res.winner == 2


def test_gamma_zero_raises():
    p = OccupationProfile((("a", 1.0),))
    with pytest.raises(NoCollapsePossibleError):
        run_to_collapse(0.5, p, p, PARAMS, derive_stream_key(1, "D1", 0))


def test_gamma_dt_bound_enforced():
    params = CollapseParams(dt=1.0, lam=LAM)  # Gamma * dt = 2e4
    with pytest.raises(ValueError, match="Gamma"):
        run_to_collapse(0.5, P1, P2, params, derive_stream_key(1, "D1", 0))


def test_non_convergence_carries_final_q():
    params = CollapseParams(dt=1.25e-7, lam=LAM, max_steps=40)
    with pytest.raises(NonConvergenceError) as info:
        run_to_collapse(0.5, P1, P2, params, derive_stream_key(1, "D1", 0))
    assert 0.0 <= info.value.final_q <= 1.0
    assert info.value.steps == 40


def test_born_rule_small():
    n = 2000
    res = collapse_batch(0.5, P1, P2, PARAMS, LAYOUT, keys_for(n, seed=12))
    freq = float(np.mean(res.winner == 1))
    assert abs(freq - 0.5) < 4.0 * math.sqrt(0.25 / n)


def test_determinism_same_keys_bit_identical():
    keys = keys_for(64, seed=77)
    a = collapse_batch(0.4, P1, P2, PARAMS, LAYOUT, keys)
    b = collapse_batch(0.4, P1, P2, PARAMS, LAYOUT, keys)
    assert np.array_equal(a.winner, b.winner)
    assert np.array_equal(a.steps, b.steps)
    assert np.array_equal(a.logw1, b.logw1)
    assert np.array_equal(a.logw2, b.logw2)


def test_batch_composition_invariance():
    keys = keys_for(32, seed=31)
    full = collapse_batch(0.5, P1, P2, PARAMS, LAYOUT, keys)
    for j in (0, 13, 31):
        single = collapse_batch(0.5, P1, P2, PARAMS, LAYOUT, [keys[j]])
        assert single.winner[0] == full.winner[j]
        assert single.steps[0] == full.steps[j]
        assert single.logw1[0] == full.logw1[j]
        assert single.logw2[0] == full.logw2[j]


def test_engine_matches_reference_stepper():
    # raw measure: increments are sig * xi for both paths, so the batch
    # engine must reproduce repeated applications of step() exactly
    from collapsemc.noise import DEFAULT_NOISE
    key = derive_stream_key(5, "D1", 9)
    n_steps = 50
    res = evolve_batch(0.37, P1, P2, PARAMS, LAYOUT, [(key,)], n_steps, measure="raw")
    xi = DEFAULT_NOISE.block_normals(key, 0, 2, rows=n_steps)
    sig = math.sqrt(PARAMS.lam * PARAMS.dt)
    state = TwoBranchState.from_q(0.37)
    for t in range(n_steps):
        incr = {"yes": float(sig * xi[t, 0]), "no": float(sig * xi[t, 1])}
        state = step(state, P1, P2, PARAMS, incr)
    assert state.logw1 == res.logw1[0]
    assert state.logw2 == res.logw2[0]


def test_one_step_cooked_mean_preserves_q():
    n = 200_000
    res = evolve_batch(0.3, P1, P2, PARAMS, LAYOUT, keys_for(n, seed=8), 1)
    q = res.q
    se = float(q.std()) / math.sqrt(n)
    assert abs(float(q.mean()) - 0.3) < 4.0 * se


def test_martingale_at_intermediate_time():
    n = 20_000
    n_steps = round(0.3 / GAMMA / PARAMS.dt)
    res = evolve_batch(0.3, P1, P2, PARAMS, LAYOUT, keys_for(n, seed=21), n_steps)
    q = res.q
    se = float(q.std()) / math.sqrt(n)
    assert abs(float(q.mean()) - 0.3) < 4.0 * se


def test_raw_measure_is_not_born():
    # under the unbiased measure the log ratio is a driftless walk for
    # these symmetric profiles, so the hitting probability comes from the
    # gambler's-ruin linear interpolation, not from q0
    n = 4000
    res = collapse_batch(0.3, P1, P2, PARAMS, LAYOUT, keys_for(n, seed=13), measure="raw")
    freq = float(np.mean(res.winner == 1))
    thr = PARAMS.log_threshold
    r0 = math.log(0.3) - math.log1p(-0.3)
    expected = (r0 + thr) / (2.0 * thr)
    assert abs(freq - expected) < 4.0 * math.sqrt(expected * (1 - expected) / n)
    assert abs(freq - 0.3) > 0.05


def test_time_scaling_doubling_gamma_halves_median():
    p1_fast = OccupationProfile((("yes", ETA * math.sqrt(2.0)), ("no", 0.0)))
    p2_fast = OccupationProfile((("yes", 0.0), ("no", ETA * math.sqrt(2.0))))
    n = 3000
    slow = collapse_batch(0.5, P1, P2, PARAMS, LAYOUT, keys_for(n, seed=41))
    fast = collapse_batch(0.5, p1_fast, p2_fast, PARAMS, LAYOUT, keys_for(n, seed=42))
    ratio = float(np.median(fast.duration) / np.median(slow.duration))
    assert 0.43 < ratio < 0.57


def test_winner_immutability_small():
    n = 2000
    res = collapse_batch(0.5, P1, P2, PARAMS, LAYOUT, keys_for(n, seed=51))
    cont_keys = keys_for(n, seed=51, salt="cont")
    n_cont = round(6.0 / GAMMA / PARAMS.dt)
    cont = evolve_batch((res.logw1, res.logw2), P1, P2, PARAMS, LAYOUT,
                        cont_keys, n_cont, track_range=True)
    thr = PARAMS.log_threshold
    reversed_1 = (res.winner == 1) & (cont.r_min <= -thr)
    reversed_2 = (res.winner == 2) & (cont.r_max >= thr)
    assert int(reversed_1.sum() + reversed_2.sum()) <= max(1, int(0.001 * n))


def test_evolve_batch_validation():
    with pytest.raises(ValueError):
        evolve_batch(0.5, P1, P2, PARAMS, LAYOUT, keys_for(2), -1)
    with pytest.raises(ValueError):
        evolve_batch((np.zeros(3), np.zeros(3)), P1, P2, PARAMS, LAYOUT,
                     keys_for(2), 1)


def test_stream_layout_validation():
    with pytest.raises(ValueError):
        StreamLayout((("a", "b"), ("b",)))
    bad = StreamLayout((("yes",),))
    with pytest.raises(IncompleteNoiseError):
        collapse_batch(0.5, P1, P2, PARAMS, bad, keys_for(1))


def test_trajectory_recording(tmp_path):
    key = derive_stream_key(3, "D1", 4)
    rows = run_trajectory(0.5, P1, P2, PARAMS, key)
    assert rows[0][:3] == (0, 0.0, 0.5)
    ref = run_to_collapse(0.5, P1, P2, PARAMS, key)
    assert len(rows) - 1 == ref.steps
    final_q = rows[-1][2]
    assert (final_q >= 1 - PARAMS.epsilon) if ref.winner == 1 else (final_q <= PARAMS.epsilon)

    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, rows)
    lines = path.read_text().splitlines()
    assert lines[0] == "step,t_model_s,q,logw1,logw2"
    assert len(lines) == len(rows) + 1
