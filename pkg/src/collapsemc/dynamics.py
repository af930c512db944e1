"""Stochastic two-branch collapse dynamics.

The model evolves the squared magnitudes (w1, w2) of a two-branch
superposition under per-cell white noise.  Each spatial cell n carries an
occupation number eta_n that differs between the branches wherever a
macroscopic pointer sits in different places.  Over a timestep dt the raw
(linear, unnormalized) update of the log squared magnitudes is exact:

    logw_i += sum_n [ 2 * eta_n(i) * dB_n  -  2 * lam * eta_n(i)^2 * dt ]

where dB_n is the Brownian increment of cell n with variance lam * dt.
Under the physical measure the increments acquire a state-dependent mean,

    dB_n ~ Normal(2 * lam * etabar_n * dt,  lam * dt),
    etabar_n = q * eta_n(1) + (1 - q) * eta_n(2),

with q = w1 / (w1 + w2) evaluated before the step.  That bias makes q a
martingale, which is what produces Born-rule outcome frequencies at the
absorbing thresholds.  The branch-distinguishing rate

    Gamma = lam * sum_n (eta_n(1) - eta_n(2))^2

sets the collapse timescale: trajectories absorb at q <= epsilon or
q >= 1 - epsilon after a model time of order 1/Gamma.

Everything here is a pure function of its inputs plus a counter-addressed
noise source, so trajectories can run concurrently without coordination.
The batch entry points evolve many runs in lockstep with identical
per-run arithmetic; a batch of one reproduces a scalar run exactly.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .noise import BLOCK_STEPS, DEFAULT_NOISE, PhiloxNoiseSource, StreamKey

# Hard ceiling on Gamma * dt; runs refuse to start above it.  Scenario
# builders aim far lower (see experiment.TARGET_GAMMA_DT) so that the
# weak discretization bias of the frozen-drift Euler step stays well
# inside the statistical bands the package is tested against.
MAX_GAMMA_DT = 0.05


class InvalidProfileError(ValueError):
    """Occupation profile violates its invariants."""


class IncompleteNoiseError(ValueError):
    """A step was supplied no increment for some cell in the union."""


class NonFiniteNoiseError(ValueError):
    """A supplied increment is NaN or infinite."""


class NoCollapsePossibleError(ValueError):
    """Branch profiles are identical (Gamma = 0), so q never moves."""


class NonConvergenceError(RuntimeError):
    """Run hit the step cap before absorbing; carries the final state."""

    def __init__(self, message: str, final_q: float, steps: int):
        super().__init__(message)
        self.final_q = final_q
        self.steps = steps


def stable_q(r):
    """Branch-1 weight sigma(r) = 1 / (1 + exp(-r)), overflow-safe.

    Accepts scalars or arrays; stable for any |r| because only exp of a
    non-positive number is ever taken.
    """
    r = np.asarray(r, dtype=np.float64)
    e = np.exp(-np.abs(r))
    q = np.where(r >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return q if q.ndim else float(q)


@dataclass(frozen=True)
class TwoBranchState:
    """Log squared magnitudes of the two branches.

    Only logw1 and logw2 are state; the normalized branch-1 weight q is
    derived, so q and 1 - q always sum to one exactly.  Working in log
    space keeps the raw (non-norm-preserving) evolution overflow-free no
    matter how lopsided the branches become.
    """

    logw1: float
    logw2: float

    @property
    def q(self) -> float:
        return stable_q(self.logw1 - self.logw2)

    @classmethod
    def from_q(cls, q: float) -> "TwoBranchState":
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"q must be in [0, 1], got {q}")
        logw1 = math.log(q) if q > 0.0 else -math.inf
        logw2 = math.log1p(-q) if q < 1.0 else -math.inf
        return cls(logw1, logw2)

    @classmethod
    def from_weights(cls, w1: float, w2: float) -> "TwoBranchState":
        if w1 < 0 or w2 < 0 or w1 + w2 <= 0:
            raise ValueError(f"weights must be >= 0 with positive sum, got ({w1}, {w2})")
        logw1 = math.log(w1) if w1 > 0.0 else -math.inf
        logw2 = math.log(w2) if w2 > 0.0 else -math.inf
        return cls(logw1, logw2)


@dataclass(frozen=True)
class OccupationProfile:
    """Per-cell occupation numbers eta_n for one branch.

    Cells are an ordered tuple of (cell_id, eta) pairs.  Two profiles are
    compared on the union of their cell ids; a cell absent from a profile
    reads as eta = 0.
    """

    cells: tuple[tuple[str, float], ...]

    def __post_init__(self):
        seen = set()
        for cid, eta in self.cells:
            if cid in seen:
                raise InvalidProfileError(f"duplicate cell id {cid!r}")
            seen.add(cid)
            if not math.isfinite(eta) or eta < 0:
                raise InvalidProfileError(f"cell {cid!r} has invalid eta {eta!r}")

    @classmethod
    def from_dict(cls, occupations: Mapping[str, float]) -> "OccupationProfile":
        return cls(tuple((cid, float(eta)) for cid, eta in occupations.items()))

    @property
    def cell_ids(self) -> tuple[str, ...]:
        return tuple(cid for cid, _ in self.cells)

    def eta(self, cell_id: str) -> float:
        for cid, eta in self.cells:
            if cid == cell_id:
                return eta
        return 0.0


def union_cells(profile1: OccupationProfile, profile2: OccupationProfile) -> tuple[str, ...]:
    """Cell ids of the union, profile1's order first then profile2's extras."""
    out = list(profile1.cell_ids)
    seen = set(out)
    for cid in profile2.cell_ids:
        if cid not in seen:
            out.append(cid)
            seen.add(cid)
    return tuple(out)


@dataclass(frozen=True)
class CollapseParams:
    """Integration and absorption parameters.

    alpha is the cell edge length used when constructing occupation
    profiles from geometry; it never enters the dynamics.
    """

    dt: float
    lam: float = 1e-16
    epsilon: float = 1e-6
    max_steps: int = 1_000_000
    alpha: float = 1e-7

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lam must be > 0, got {self.lam}")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not 0 < self.epsilon < 0.5:
            raise ValueError(f"epsilon must be in (0, 0.5), got {self.epsilon}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")

    @property
    def log_threshold(self) -> float:
        """Absorption threshold on r = logw1 - logw2; absorb at |r| >= this."""
        return math.log1p(-self.epsilon) - math.log(self.epsilon)


def effective_rate(profile1: OccupationProfile, profile2: OccupationProfile,
                   lam: float) -> float:
    """Branch-distinguishing rate Gamma = lam * sum_n (delta eta_n)^2."""
    if not lam > 0:
        raise ValueError(f"lam must be > 0, got {lam}")
    total = 0.0
    for cid in union_cells(profile1, profile2):
        d = profile1.eta(cid) - profile2.eta(cid)
        total += d * d
    return lam * total


def aggregate_profiles(profile1: OccupationProfile,
                       profile2: OccupationProfile) -> tuple[OccupationProfile, OccupationProfile]:
    """Collapse the cell union to one cell preserving Gamma exactly.

    The single cell gets eta = sqrt(sum_n (delta eta_n)^2) in the first
    output and 0 in the second, so effective_rate is unchanged.  Outcome
    statistics depend on the profiles only through Gamma, which makes
    this the oracle pairing for equivalence tests.
    """
    total = 0.0
    for cid in union_cells(profile1, profile2):
        d = profile1.eta(cid) - profile2.eta(cid)
        total += d * d
    d_agg = math.sqrt(total)
    agg1 = OccupationProfile((("agg", d_agg),))
    agg2 = OccupationProfile((("agg", 0.0),))
    return agg1, agg2


def _cell_weights(cells: Sequence[str], profile1: OccupationProfile,
                  profile2: OccupationProfile) -> tuple[np.ndarray, np.ndarray]:
    e1 = np.array([profile1.eta(c) for c in cells], dtype=np.float64)
    e2 = np.array([profile2.eta(c) for c in cells], dtype=np.float64)
    return e1, e2


def _dot_cells(values, weights: np.ndarray):
    """Fixed-order weighted sum over the trailing cell axis.

    Unrolled so the floating-point operation order is identical for
    scalars, batch-of-one and batch-of-many inputs.
    """
    out = values[..., 0] * weights[0]
    for k in range(1, weights.shape[0]):
        out = out + values[..., k] * weights[k]
    return out


def _branch_increment(dB, weights_x2: np.ndarray, decay: float):
    """Raw log-weight increment sum_n 2 eta_n dB_n - 2 lam sum_n eta_n^2 dt.

    weights_x2 holds 2 * eta_n and decay the precomputed dt term, so the
    scalar stepper and the batch engine share one operation order.
    """
    return _dot_cells(dB, weights_x2) - decay


def _decay_term(weights: np.ndarray, lam: float, dt: float) -> float:
    return 2.0 * lam * float(weights @ weights) * dt


def step(state: TwoBranchState, profile1: OccupationProfile,
         profile2: OccupationProfile, params: CollapseParams,
         increments: Mapping[str, float]) -> TwoBranchState:
    """Apply one raw log-space update given per-cell increments dB_n.

    The stepper is measure-agnostic: it consumes whatever increments the
    caller supplies.  Physical (cooked) runs add the drift
    2 * lam * etabar_n * dt to unit-variance noise before calling it;
    raw-measure runs supply zero-mean increments.
    """
    cells = union_cells(profile1, profile2)
    dB = np.empty(len(cells), dtype=np.float64)
    for k, cid in enumerate(cells):
        if cid not in increments:
            raise IncompleteNoiseError(f"no increment supplied for cell {cid!r}")
        v = increments[cid]
        if not math.isfinite(v):
            raise NonFiniteNoiseError(f"increment for cell {cid!r} is {v!r}")
        dB[k] = v
    e1, e2 = _cell_weights(cells, profile1, profile2)
    logw1 = state.logw1 + _branch_increment(dB, 2.0 * e1, _decay_term(e1, params.lam, params.dt))
    logw2 = state.logw2 + _branch_increment(dB, 2.0 * e2, _decay_term(e2, params.lam, params.dt))
    return TwoBranchState(float(logw1), float(logw2))


# ---------------------------------------------------------------------------
# Batch engine
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StreamLayout:
    """Assignment of the cell union to noise streams.

    Streams are consumed in order; their cell lists concatenate to the
    column layout of the noise arrays.  Every run of a batch shares the
    layout and supplies one stream key per stream.
    """

    stream_cells: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        flat = [c for cells in self.stream_cells for c in cells]
        if len(flat) != len(set(flat)):
            raise ValueError("cell assigned to more than one stream")

    @property
    def cells(self) -> tuple[str, ...]:
        return tuple(c for cells in self.stream_cells for c in cells)

    def check_covers(self, profile1: OccupationProfile, profile2: OccupationProfile):
        need = set(union_cells(profile1, profile2))
        have = set(self.cells)
        if have != need:
            missing = sorted(need - have)
            extra = sorted(have - need)
            raise IncompleteNoiseError(
                f"stream layout does not match cell union (missing {missing}, extra {extra})")

    def slices(self) -> list[slice]:
        out, k = [], 0
        for cells in self.stream_cells:
            out.append(slice(k, k + len(cells)))
            k += len(cells)
        return out


@dataclass
class BatchResult:
    """Per-run outcomes of a batch collapse.

    winner is 1 or 2, or 0 for runs that hit the step cap without
    absorbing.  duration is steps * dt.  logw1/logw2 are the final raw
    state, usable to continue a trajectory past absorption.
    """

    winner: np.ndarray
    steps: np.ndarray
    duration: np.ndarray
    logw1: np.ndarray
    logw2: np.ndarray

    @property
    def q(self) -> np.ndarray:
        return stable_q(self.logw1 - self.logw2)

    @property
    def failed(self) -> np.ndarray:
        return self.winner == 0


@dataclass
class EvolveResult:
    """Final state of a fixed-step batch evolution (no absorption)."""

    logw1: np.ndarray
    logw2: np.ndarray
    r_min: np.ndarray | None = None
    r_max: np.ndarray | None = None

    @property
    def q(self) -> np.ndarray:
        return stable_q(self.logw1 - self.logw2)


def _normalize_keys(stream_keys, n_streams: int) -> list[tuple[StreamKey, ...]]:
    keys = [tuple(k) for k in stream_keys]
    for k in keys:
        if len(k) != n_streams:
            raise ValueError(f"expected {n_streams} stream keys per run, got {len(k)}")
    return keys


def _prepare(profile1, profile2, params, layout, stream_keys, measure):
    if measure not in ("cooked", "raw"):
        raise ValueError(f"measure must be 'cooked' or 'raw', got {measure!r}")
    layout.check_covers(profile1, profile2)
    e1, e2 = _cell_weights(layout.cells, profile1, profile2)
    gamma = params.lam * float(((e1 - e2) ** 2).sum())
    if gamma * params.dt > MAX_GAMMA_DT:
        raise ValueError(
            f"Gamma*dt = {gamma * params.dt:.3g} exceeds {MAX_GAMMA_DT}; reduce dt")
    keys = _normalize_keys(stream_keys, len(layout.stream_cells))
    return e1, e2, gamma, keys


def _fill_noise(noise, keys, slices, widths, block_index, n_cells, rows):
    """Draw the first ``rows`` steps of one window for every listed run."""
    xi = np.empty((len(keys), rows, n_cells), dtype=np.float64)
    for j, run_keys in enumerate(keys):
        for key, sl, w in zip(run_keys, slices, widths):
            xi[j, :, sl] = noise.block_normals(key, block_index, w, rows=rows)
    return xi


def _make_kernel(e1, e2, lam, dt, cooked):
    """Build the per-step update for fixed profiles and parameters.

    The kernel advances (logw1, logw2) in place given the current
    r = logw1 - logw2 and the step's unit normals, and returns the new r.
    Broadcasting and the unrolled cell sum keep every run's update
    bit-equal to the same run evolved alone, whatever the batch size.
    """
    e1x2 = 2.0 * e1
    e2x2 = 2.0 * e2
    de = e1 - e2
    drift = 2.0 * lam * dt
    sig = math.sqrt(lam * dt)
    c1 = _decay_term(e1, lam, dt)
    c2 = _decay_term(e2, lam, dt)

    if cooked:
        def kernel(logw1, logw2, r, xi_t):
            e = np.exp(-np.abs(r))
            q = np.where(r >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
            # increments dB ~ Normal(2 lam etabar dt, lam dt), with
            # etabar = q eta1 + (1 - q) eta2 written as eta2 + q (eta1 - eta2)
            dB = drift * (e2 + q[:, None] * de) + sig * xi_t
            logw1 += _branch_increment(dB, e1x2, c1)
            logw2 += _branch_increment(dB, e2x2, c2)
            return logw1 - logw2
    else:
        def kernel(logw1, logw2, r, xi_t):
            dB = sig * xi_t
            logw1 += _branch_increment(dB, e1x2, c1)
            logw2 += _branch_increment(dB, e2x2, c2)
            return logw1 - logw2

    return kernel


def collapse_batch(q0: float, profile1: OccupationProfile, profile2: OccupationProfile,
                   params: CollapseParams, layout: StreamLayout, stream_keys,
                   noise: PhiloxNoiseSource = DEFAULT_NOISE,
                   measure: str = "cooked") -> BatchResult:
    """Run a batch of trajectories to absorption.

    stream_keys is a sequence (one entry per run) of per-stream key
    tuples matching the layout.  Runs evolve in lockstep but consume only
    their own streams, so results per run do not depend on batch
    composition or execution schedule.
    """
    if not 0.0 <= q0 <= 1.0:
        raise ValueError(f"q0 must be in [0, 1], got {q0}")
    e1, e2, gamma, keys = _prepare(profile1, profile2, params, layout, stream_keys, measure)
    if gamma == 0.0:
        raise NoCollapsePossibleError("profiles are identical on their union; Gamma = 0")
    n = len(keys)
    thr = params.log_threshold

    winner = np.zeros(n, dtype=np.int8)
    steps = np.zeros(n, dtype=np.int64)
    if q0 <= params.epsilon or q0 >= 1.0 - params.epsilon:
        start = TwoBranchState.from_q(q0)
        winner[:] = 1 if q0 >= 0.5 else 2
        return BatchResult(winner, steps, steps * params.dt,
                           np.full(n, start.logw1), np.full(n, start.logw2))

    logw1 = np.full(n, math.log(q0), dtype=np.float64)
    logw2 = np.full(n, math.log1p(-q0), dtype=np.float64)

    live = np.arange(n)
    slices = layout.slices()
    widths = [len(c) for c in layout.stream_cells]
    kernel = _make_kernel(e1, e2, params.lam, params.dt, measure == "cooked")
    step_base = 0
    while live.size and step_base < params.max_steps:
        block = step_base // BLOCK_STEPS
        n_window = min(BLOCK_STEPS, params.max_steps - step_base)
        xi = _fill_noise(noise, [keys[i] for i in live], slices, widths, block,
                         len(layout.cells), n_window)
        w1 = logw1[live]
        w2 = logw2[live]
        r = w1 - w2
        done = np.zeros(live.size, dtype=bool)
        win = np.zeros(live.size, dtype=np.int8)
        stp = np.zeros(live.size, dtype=np.int64)
        snap1 = w1.copy()
        snap2 = w2.copy()
        for t in range(n_window):
            r = kernel(w1, w2, r, xi[:, t, :])
            newly = ~done & ((r >= thr) | (r <= -thr))
            if newly.any():
                win[newly] = np.where(r[newly] >= thr, 1, 2)
                stp[newly] = step_base + t + 1
                snap1[newly] = w1[newly]
                snap2[newly] = w2[newly]
                done |= newly
                if done.all():
                    break
        winner[live] = win
        steps[live] = np.where(done, stp, step_base + n_window)
        # absorbed runs keep the state captured at their crossing step
        logw1[live] = np.where(done, snap1, w1)
        logw2[live] = np.where(done, snap2, w2)
        live = live[~done]
        step_base += n_window

    steps[winner == 0] = params.max_steps
    return BatchResult(winner, steps, steps * params.dt, logw1, logw2)


def evolve_batch(start, profile1: OccupationProfile, profile2: OccupationProfile,
                 params: CollapseParams, layout: StreamLayout, stream_keys,
                 n_steps: int, noise: PhiloxNoiseSource = DEFAULT_NOISE,
                 measure: str = "cooked", track_range: bool = False) -> EvolveResult:
    """Evolve a batch for a fixed number of steps with no absorption.

    start is either a scalar q0 shared by all runs or a (logw1, logw2)
    array pair giving each run its own initial state.  With track_range
    the result carries the running min and max of r = logw1 - logw2,
    which is how threshold crossings during a continuation are detected.
    """
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")
    e1, e2, _gamma, keys = _prepare(profile1, profile2, params, layout, stream_keys, measure)
    n = len(keys)
    if isinstance(start, tuple):
        logw1 = np.array(start[0], dtype=np.float64, copy=True)
        logw2 = np.array(start[1], dtype=np.float64, copy=True)
        if logw1.shape != (n,) or logw2.shape != (n,):
            raise ValueError("start arrays must have one entry per run")
    else:
        s = TwoBranchState.from_q(float(start))
        logw1 = np.full(n, s.logw1, dtype=np.float64)
        logw2 = np.full(n, s.logw2, dtype=np.float64)

    slices = layout.slices()
    widths = [len(c) for c in layout.stream_cells]
    kernel = _make_kernel(e1, e2, params.lam, params.dt, measure == "cooked")
    r = logw1 - logw2
    r_min = r.copy() if track_range else None
    r_max = r.copy() if track_range else None
    done_steps = 0
    while done_steps < n_steps:
        block = done_steps // BLOCK_STEPS
        n_window = min(BLOCK_STEPS, n_steps - done_steps)
        xi = _fill_noise(noise, keys, slices, widths, block, len(layout.cells), n_window)
        for t in range(n_window):
            r = kernel(logw1, logw2, r, xi[:, t, :])
            if track_range:
                np.minimum(r_min, r, out=r_min)
                np.maximum(r_max, r, out=r_max)
        done_steps += n_window
    return EvolveResult(logw1, logw2, r_min, r_max)


# ---------------------------------------------------------------------------
# Scalar wrappers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CollapseResult:
    winner: int
    duration: float
    steps: int


def _as_layout(profile1, profile2, streams) -> tuple[StreamLayout, tuple[StreamKey, ...]]:
    """Accept a bare stream key (one stream, union order) or explicit
    (key, cells) pairs."""
    if isinstance(streams, tuple) and len(streams) == 2 and all(
            isinstance(x, int) for x in streams):
        return StreamLayout((union_cells(profile1, profile2),)), (streams,)
    keys = tuple(k for k, _cells in streams)
    layout = StreamLayout(tuple(tuple(cells) for _k, cells in streams))
    return layout, keys


def run_to_collapse(q0: float, profile1: OccupationProfile, profile2: OccupationProfile,
                    params: CollapseParams, streams,
                    noise: PhiloxNoiseSource = DEFAULT_NOISE,
                    measure: str = "cooked") -> CollapseResult:
    """Run one trajectory to absorption.

    streams is a stream key (all cells on one stream, union order) or a
    sequence of (stream_key, cell_ids) pairs partitioning the union.
    Raises NonConvergenceError if max_steps is hit first.
    """
    layout, keys = _as_layout(profile1, profile2, streams)
    res = collapse_batch(q0, profile1, profile2, params, layout, [keys],
                         noise=noise, measure=measure)
    if res.winner[0] == 0:
        raise NonConvergenceError(
            f"no absorption within {params.max_steps} steps (q = {float(res.q[0]):.6g})",
            final_q=float(res.q[0]), steps=int(res.steps[0]))
    return CollapseResult(int(res.winner[0]), float(res.duration[0]), int(res.steps[0]))


def run_trajectory(q0: float, profile1: OccupationProfile, profile2: OccupationProfile,
                   params: CollapseParams, streams,
                   noise: PhiloxNoiseSource = DEFAULT_NOISE,
                   measure: str = "cooked", max_rows: int | None = None) -> list[tuple]:
    """Integrate one trajectory, recording (step, t_model_s, q, logw1, logw2).

    Row 0 is the initial state; one row follows per step until absorption
    or max_rows (default params.max_steps) rows.
    """
    layout, key_tuple = _as_layout(profile1, profile2, streams)
    e1, e2, gamma, _ = _prepare(profile1, profile2, params, layout, [key_tuple], measure)
    if gamma == 0.0:
        raise NoCollapsePossibleError("profiles are identical on their union; Gamma = 0")
    cap = params.max_steps if max_rows is None else min(max_rows, params.max_steps)
    thr = params.log_threshold
    s = TwoBranchState.from_q(q0)
    logw1 = np.array([s.logw1])
    logw2 = np.array([s.logw2])
    slices = layout.slices()
    widths = [len(c) for c in layout.stream_cells]
    kernel = _make_kernel(e1, e2, params.lam, params.dt, measure == "cooked")
    rows = [(0, 0.0, stable_q(logw1[0] - logw2[0]), float(logw1[0]), float(logw2[0]))]
    if q0 <= params.epsilon or q0 >= 1.0 - params.epsilon:
        return rows
    r = logw1 - logw2
    k = 0
    while k < cap:
        n_window = min(BLOCK_STEPS, cap - k)
        xi = _fill_noise(noise, [key_tuple], slices, widths, k // BLOCK_STEPS,
                         len(layout.cells), n_window)
        for t in range(n_window):
            r = kernel(logw1, logw2, r, xi[:, t, :])
            k += 1
            rows.append((k, k * params.dt, stable_q(float(r[0])), float(logw1[0]), float(logw2[0])))
            if abs(float(r[0])) >= thr:
                return rows
    return rows


def write_trajectory_csv(path, rows: list[tuple]) -> None:
    """Dump trajectory rows as CSV (step, t_model_s, q, logw1, logw2)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "t_model_s", "q", "logw1", "logw2"])
        for row in rows:
            w.writerow([row[0], repr(row[1]), repr(row[2]), repr(row[3]), repr(row[4])])
