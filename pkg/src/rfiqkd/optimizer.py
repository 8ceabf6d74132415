"""Full-parameter key-rate optimization.

Multi-start projected coordinate search over the ten protocol variables.
Each start sweeps the coordinates in turn; a coordinate is moved by its own
adaptive step (expanded on success, halved on failure) and every trial point
is projected onto the part of the box that keeps the coupled constraints
(``nu < mu``, probability sums below one) satisfied.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernel
from .channel import ChannelParams, simulate_observations
from .decoy import estimate_all
from .errors import (
    ConfigError,
    DegenerateSelectionError,
    InconsistencyError,
    InfeasibleParamsError,
    SearchFailureError,
    ZeroObservationError,
)
from .params import FEASIBILITY_MARGIN, MU_MAX, PARAM_NAMES, ProtocolParams, is_feasible
from .security import KeyRateReport, SecurityConfig, SecurityMode, key_rate
from .statistics import FluctuationConfig

INTENSITY_GAP = 1e-4
# projection keeps sums this far below 1; the extra slack absorbs round-off
# against the feasibility margin
SUM_MARGIN = 2.0 * FEASIBILITY_MARGIN
BASELINE_NU = 0.1

_MODE_CODES = {
    SecurityMode.RFI_IE: kernel.MODE_RFI_IE,
    SecurityMode.RFI_LITERAL_EQ13: kernel.MODE_RFI_LITERAL,
    SecurityMode.BB84: kernel.MODE_BB84,
}
_STATUS_ERRORS = {
    kernel.STATUS_INFEASIBLE: InfeasibleParamsError,
    kernel.STATUS_DEGENERATE: DegenerateSelectionError,
    kernel.STATUS_ZERO_OBSERVATION: ZeroObservationError,
    kernel.STATUS_INCONSISTENT: InconsistencyError,
}

DEFAULT_LOWER = (INTENSITY_GAP, 1e-4) + (1e-4,) * 8
DEFAULT_UPPER = (MU_MAX, 0.5) + (1.0 - 1e-4,) * 8


@dataclass(frozen=True)
class Scenario:
    """Everything the objective depends on apart from the protocol parameters."""

    channel: ChannelParams = field(default_factory=ChannelParams)
    distance: float = 0.0
    fluctuation: FluctuationConfig = field(default_factory=FluctuationConfig)
    security: SecurityConfig = field(default_factory=SecurityConfig)

    def __post_init__(self):
        if not (math.isfinite(self.distance) and self.distance >= 0):
            raise ConfigError(f"distance must be >= 0, got {self.distance}")

    @property
    def bb84(self) -> bool:
        return self.security.mode is SecurityMode.BB84

    def at(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def kernel_args(self):
        ch = self.channel
        scen = np.array([ch.eta, ch.y0, ch.ed, ch.alpha, ch.beta_rad, self.distance,
                         self.fluctuation.n_pulses, self.fluctuation.gamma, self.security.f])
        return scen, _MODE_CODES[self.security.mode]


@dataclass(frozen=True)
class OptimizerConfig:
    n_starts: int = 16
    max_iters: int = 200
    tol: float = 1e-6
    seed: int = 0
    lower: tuple = DEFAULT_LOWER
    upper: tuple = DEFAULT_UPPER
    # a start has converged once every coordinate step is below this
    # fraction of its box width (and the sweep gain is below tol)
    step_tol: float = 1e-6
    workers: int = 1

    def __post_init__(self):
        if self.n_starts < 1:
            raise ConfigError("n_starts must be >= 1")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if len(self.lower) != 10 or len(self.upper) != 10:
            raise ConfigError("box bounds need one entry per protocol variable")
        for name, lo, hi in zip(PARAM_NAMES, self.lower, self.upper):
            if not lo < hi:
                raise ConfigError(f"empty search box for {name}: [{lo}, {hi}]")


def _raise_for(status: int):
    exc = _STATUS_ERRORS.get(status)
    if exc is not None:
        raise exc(f"key-rate kernel returned status {status}")


def evaluate(params: ProtocolParams, scenario: Scenario) -> KeyRateReport:
    """Structured pipeline: simulate, bound, estimate, key rate."""
    if not is_feasible(params, bb84=scenario.bb84):
        raise InfeasibleParamsError(f"infeasible protocol parameters: {params}")
    stats = simulate_observations(scenario.channel, params, scenario.distance, bb84=scenario.bb84)
    bounds = estimate_all(stats, params, scenario.fluctuation, bb84=scenario.bb84)
    return key_rate(params, stats, bounds, scenario.security)


def objective(params: ProtocolParams, scenario: Scenario) -> float:
    """Clamped key rate per pulse, computed by the fast kernel."""
    scen, mode = scenario.kernel_args()
    out = kernel.new_out()
    status = kernel.evaluate(params.as_array(), scen, mode, out)
    _raise_for(status)
    return float(out[1])


class _Evaluator:
    """Search value for the kernel: the rate where a key exists, else the
    (negative) per-sifted-bit margin so no-key regions still have a slope."""

    def __init__(self, scenario: Scenario):
        self.scen, self.mode = scenario.kernel_args()
        self.out = kernel.new_out()
        self.calls = 0

    def __call__(self, x: np.ndarray) -> float:
        self.calls += 1
        status = kernel.evaluate(x, self.scen, self.mode, self.out)
        if status == kernel.STATUS_KEY:
            return self.out[0]
        if status == kernel.STATUS_NO_KEY:
            return self.out[0] / self.out[9]
        return -math.inf


def _free_indices(bb84: bool):
    return (0, 1, 2, 3, 4, 6, 8) if bb84 else tuple(range(10))


def _sync_bb84(x: np.ndarray):
    x[5] = 1.0 - x[4]
    x[7] = 1.0 - x[6]
    x[9] = 1.0 - x[8]


def _interval(x, i, lo, hi, bb84):
    """Feasible range of coordinate ``i`` with the others held fixed."""
    a, b = lo[i], hi[i]
    if i == 0:
        a = max(a, x[1] + INTENSITY_GAP)
    elif i == 1:
        b = min(b, x[0] - INTENSITY_GAP)
    elif i in (2, 3):
        b = min(b, 1.0 - x[5 - i] - SUM_MARGIN)
    elif not bb84:
        partner = i + 1 if i % 2 == 0 else i - 1
        b = min(b, 1.0 - x[partner] - SUM_MARGIN)
    return a, b


def _coordinate_search(x0: np.ndarray, f, config: OptimizerConfig, bb84: bool):
    lo = np.asarray(config.lower, dtype=float)
    hi = np.asarray(config.upper, dtype=float)
    idx = _free_indices(bb84)
    x = x0.copy()
    if bb84:
        _sync_bb84(x)
    fx = f(x)
    width = hi - lo
    step = 0.1 * width
    min_step = config.step_tol * width
    trial = x.copy()

    for _ in range(config.max_iters):
        f_start = fx
        for i in idx:
            a, b = _interval(x, i, lo, hi, bb84)
            if a > b:
                continue
            moved = False
            for direction in (1.0, -1.0):
                s = step[i] * direction
                while True:
                    trial[:] = x
                    trial[i] = min(max(x[i] + s, a), b)
                    if trial[i] == x[i]:
                        break
                    if bb84:
                        _sync_bb84(trial)
                    ft = f(trial)
                    if not ft > fx:
                        break
                    x[:] = trial
                    fx = ft
                    moved = True
                    s *= 2.0
                if moved:
                    break
            if moved:
                step[i] = min(2.0 * step[i], width[i])
            else:
                step[i] *= 0.5
        gain = fx - f_start
        small_gain = gain <= config.tol * max(abs(fx), 1e-300)
        if small_gain and np.all(step[list(idx)] < min_step[list(idx)]):
            break
    return x, fx


def _random_start(rng: np.random.Generator, config: OptimizerConfig, bb84: bool, f):
    lo, hi = config.lower, config.upper
    mu_lo = max(lo[0], lo[1] + INTENSITY_GAP)
    if mu_lo > hi[0]:
        raise SearchFailureError("search box leaves no room for nu < mu")
    for _ in range(1000):
        mu = rng.uniform(mu_lo, hi[0])
        nu_hi = min(hi[1], mu - INTENSITY_GAP)
        if nu_hi < lo[1]:
            continue
        nu = rng.uniform(lo[1], nu_hi)
        p_mu, p_nu, _ = rng.dirichlet((1.0, 1.0, 1.0))
        x = [mu, nu, p_mu, p_nu]
        for _k in range(3):
            if bb84:
                z = rng.uniform(0.0, 1.0)
                x += [z, 1.0 - z]
            else:
                z, xb, _ = rng.dirichlet((1.0, 1.0, 1.0))
                x += [z, xb]
        x = np.array(x)
        if np.all(x >= np.asarray(lo)) and np.all(x <= np.asarray(hi)) and f(x) > -math.inf:
            return x
    raise SearchFailureError("could not draw a feasible starting point")


def _golden_section(g, a, b, tol=1e-9, max_iter=200):
    """Maximize a unimodal ``g`` on ``[a, b]``."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - inv_phi * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + inv_phi * (b - a)
            gd = g(d)
    # endpoints matter when the optimum sits on the box edge
    cands = [(g(a), -a), (gc, -c), (gd, -d), (g(b), -b)]
    best = max(cands)
    return -best[1], best[0]


def _baseline_vector(mu: float, bb84: bool) -> np.ndarray:
    third = 1.0 / 3.0
    if bb84:
        return np.array([mu, BASELINE_NU, third, third, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5])
    return np.array([mu, BASELINE_NU] + [third] * 8)


def _baseline_search(scenario: Scenario):
    f = _Evaluator(scenario)
    bb84 = scenario.bb84
    mu, value = _golden_section(lambda m: f(_baseline_vector(m, bb84)),
                                BASELINE_NU + INTENSITY_GAP, MU_MAX)
    return _baseline_vector(mu, bb84), value


def unbiased_baseline(scenario: Scenario, distance: float | None = None):
    """Reference protocol: nu = 0.1, every probability 1/3, only mu optimized.

    In BB84 mode the basis probabilities are 1/2 (there is no Y basis).
    """
    if distance is not None:
        scenario = scenario.at(distance=distance)
    x, _ = _baseline_search(scenario)
    params = ProtocolParams.from_array(x)
    return params, evaluate(params, scenario)


def _run_start(args):
    k, x0, scenario, config = args
    f = _Evaluator(scenario)
    if x0 is None:
        rng = np.random.default_rng([config.seed, k])
        x0 = _random_start(rng, config, scenario.bb84, f)
    x, fx = _coordinate_search(x0, f, config, scenario.bb84)
    return k, x, fx


def _baseline_in_box(x: np.ndarray, config: OptimizerConfig) -> bool:
    return bool(np.all(x >= np.asarray(config.lower)) and np.all(x <= np.asarray(config.upper)))


def optimize(scenario: Scenario, config: OptimizerConfig | None = None, extra_starts=()):
    """Maximize the key rate; returns ``(ProtocolParams, KeyRateReport)``.

    Start 0 is the unbiased baseline when it lies inside the box, the rest
    are random feasible points drawn from ``(seed, start index)``.
    ``extra_starts`` (e.g. the optimum at a neighbouring distance) are run
    after those.  Ties are broken by the lowest start index, so parallel and
    sequential runs agree.
    """
    config = config or OptimizerConfig()
    base_x, _ = _baseline_search(scenario)
    jobs = []
    for k in range(config.n_starts):
        x0 = base_x if k == 0 and _baseline_in_box(base_x, config) else None
        jobs.append((k, x0, scenario, config))
    for j, start in enumerate(extra_starts):
        x0 = start.as_array() if isinstance(start, ProtocolParams) else np.asarray(start, float)
        if is_feasible(ProtocolParams.from_array(x0), bb84=scenario.bb84):
            jobs.append((config.n_starts + j, x0, scenario, config))

    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_start, jobs))
    else:
        results = [_run_start(job) for job in jobs]

    best_k, best_x, best_f = results[0]
    for k, x, fx in results[1:]:
        if fx > best_f:
            best_k, best_x, best_f = k, x, fx

    params = ProtocolParams.from_array(best_x)
    report = evaluate(params, scenario)
    if report.no_key:
        params = ProtocolParams.from_array(base_x)
        report = evaluate(params, scenario)
    return params, report
