"""Batch scans over distance, pulse count and protocol, with config and CSV I/O."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .channel import ChannelParams
from .errors import ConfigError, ParseError, QKDError
from .optimizer import OptimizerConfig, Scenario, optimize, unbiased_baseline
from .params import PARAM_NAMES, ProtocolParams
from .security import KeyRateReport, SecurityConfig, SecurityMode
from .statistics import DEFAULT_GAMMA, DEFAULT_N_PULSES, FluctuationConfig

MODES = ("rfi-biased", "rfi-unbiased", "bb84-biased")
ZERO_RUN_CUTOFF = 3

CSV_COLUMNS = (
    "mode", "beta_deg", "distance_km", "n_pulses", "rate",
    *PARAM_NAMES,
    "c_value", "y1_zz_lower", "e1_zz_upper", "i_e", "no_key_flag",
)

# no_key_flag values
FLAG_KEY = 0
FLAG_NO_KEY = 1
FLAG_CUTOFF = 2  # no key, and the distance scan stopped after this row


class ScanIOError(QKDError, OSError):
    pass


@dataclass(frozen=True)
class ScanSpec:
    mode: str = "rfi-biased"
    beta_list: tuple = (0.0,)
    distance_start: float = 0.0
    distance_stop: float = 300.0
    distance_step: float = 5.0
    n_pulses_list: tuple = (1e9, 1e10, 1e11, 1e12, 1e13)
    gamma: float = DEFAULT_GAMMA
    n_total: float = DEFAULT_N_PULSES
    security_mode: SecurityMode = SecurityMode.RFI_IE
    n_starts: int = 16
    seed: int = 0
    out: str | None = None
    # explicit distance grid; overrides start/stop/step when given
    distance_list: tuple | None = None
    channel: ChannelParams = field(default_factory=ChannelParams)
    f: float = SecurityConfig().f

    def __post_init__(self):
        validate_spec(self)

    @property
    def distances(self) -> list:
        if self.distance_list is not None:
            return list(self.distance_list)
        n = int(math.floor((self.distance_stop - self.distance_start) / self.distance_step + 1e-9))
        return [self.distance_start + k * self.distance_step for k in range(n + 1)]

    def optimizer_config(self) -> OptimizerConfig:
        return OptimizerConfig(n_starts=self.n_starts, seed=self.seed)

    def scenario(self, mode: str, beta: float, distance: float, n_pulses: float) -> Scenario:
        sec_mode = SecurityMode.BB84 if mode == "bb84-biased" else self.security_mode
        return Scenario(
            channel=replace(self.channel, beta=beta),
            distance=distance,
            fluctuation=FluctuationConfig(n_pulses=n_pulses, gamma=self.gamma),
            security=SecurityConfig(f=self.f, mode=sec_mode),
        )


def validate_spec(spec: ScanSpec):
    if spec.mode not in MODES:
        raise ConfigError(f"mode: expected one of {', '.join(MODES)}, got {spec.mode!r}")
    if not spec.beta_list:
        raise ConfigError("beta_list: must not be empty")
    if not all(math.isfinite(b) for b in spec.beta_list):
        raise ConfigError("beta_list: angles must be finite")
    for key in ("distance_start", "distance_stop"):
        v = getattr(spec, key)
        if not (math.isfinite(v) and v >= 0):
            raise ConfigError(f"{key}: must be a finite distance >= 0, got {v}")
    if not (math.isfinite(spec.distance_step) and spec.distance_step > 0):
        raise ConfigError(f"distance_step: must be > 0, got {spec.distance_step}")
    if spec.distance_stop < spec.distance_start:
        raise ConfigError("distance_stop: must not be below distance_start")
    if spec.distance_list is not None:
        if not spec.distance_list:
            raise ConfigError("distance grid: must not be empty")
        if not all(math.isfinite(d) and d >= 0 for d in spec.distance_list):
            raise ConfigError("distance grid: distances must be finite and >= 0")
    if not spec.n_pulses_list:
        raise ConfigError("n_pulses_list: must not be empty")
    if not all(math.isfinite(n) and n >= 1 for n in spec.n_pulses_list):
        raise ConfigError("n_pulses_list: every N must be >= 1")
    if not (math.isfinite(spec.gamma) and spec.gamma >= 0):
        raise ConfigError(f"gamma: must be >= 0, got {spec.gamma}")
    if not (math.isfinite(spec.n_total) and spec.n_total >= 1):
        raise ConfigError(f"n_total: must be >= 1, got {spec.n_total}")
    if spec.security_mode is SecurityMode.BB84:
        raise ConfigError("security_mode: use mode = bb84-biased for BB84 runs")
    if spec.n_starts < 1:
        raise ConfigError(f"n_starts: must be >= 1, got {spec.n_starts}")
    if not 0 <= spec.seed < 2 ** 64:
        raise ConfigError(f"seed: must be an unsigned 64-bit integer, got {spec.seed}")


@dataclass(frozen=True)
class ScanRow:
    mode: str
    beta: float
    distance_km: float
    n_pulses: float
    params: ProtocolParams
    report: KeyRateReport
    cutoff: bool = False

    @property
    def rate(self) -> float:
        return self.report.rate

    @property
    def flag(self) -> int:
        if self.cutoff:
            return FLAG_CUTOFF
        return FLAG_NO_KEY if self.report.no_key else FLAG_KEY


# -- config -------------------------------------------------------------------

def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


_PARSERS = {
    "mode": str,
    "beta_list": _floats,
    "distance_start": float,
    "distance_stop": float,
    "distance_step": float,
    "n_pulses_list": _floats,
    "gamma": float,
    "n_total": float,
    "security_mode": SecurityMode.parse,
    "n_starts": int,
    "seed": int,
    "out": str,
}
CONFIG_KEYS = tuple(_PARSERS)


def parse_config_text(text: str, path=None) -> ScanSpec:
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are ignored."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno, path)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _PARSERS:
            raise ParseError(f"unknown key {key!r}", lineno, path)
        if key in values:
            raise ParseError(f"duplicate key {key!r}", lineno, path)
        if not value:
            raise ParseError(f"missing value for {key!r}", lineno, path)
        try:
            values[key] = _PARSERS[key](value)
        except (ValueError, ConfigError) as exc:
            raise ParseError(f"bad value for {key!r}: {exc}", lineno, path) from None
    return ScanSpec(**values)


def parse_config(path) -> ScanSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScanIOError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    return parse_config_text(text, path=path)


# -- scans --------------------------------------------------------------------

def _solve(spec: ScanSpec, mode: str, scenario: Scenario, warm=None):
    if mode == "rfi-unbiased":
        return unbiased_baseline(scenario)
    extra = () if warm is None else (warm,)
    return optimize(scenario, spec.optimizer_config(), extra_starts=extra)


def _distance_curve(spec: ScanSpec, mode: str, beta: float) -> list:
    rows = []
    zero_run = 0
    warm = None
    for distance in spec.distances:
        scenario = spec.scenario(mode, beta, distance, spec.n_total)
        params, report = _solve(spec, mode, scenario, warm)
        if not report.no_key:
            warm = params
        zero_run = zero_run + 1 if report.no_key else 0
        stop = zero_run >= ZERO_RUN_CUTOFF
        rows.append(ScanRow(mode, beta, distance, spec.n_total, params, report, cutoff=stop))
        if stop:
            break
    return rows


def run_distance_scan(spec: ScanSpec, modes=None) -> list:
    """One optimization per (mode, beta, distance); rows ordered mode, beta, distance.

    A curve stops after three consecutive zero-rate points; its last row is
    flagged with ``FLAG_CUTOFF``.
    """
    modes = modes or (spec.mode,)
    rows = []
    for mode in modes:
        for beta in spec.beta_list:
            rows.extend(_distance_curve(spec, mode, beta))
    return rows


def run_pulse_scan(spec: ScanSpec) -> list:
    """One optimization per (beta, N) at the fixed distance ``distance_start``."""
    rows = []
    for beta in spec.beta_list:
        for n in spec.n_pulses_list:
            scenario = spec.scenario(spec.mode, beta, spec.distance_start, n)
            params, report = _solve(spec, spec.mode, scenario)
            rows.append(ScanRow(spec.mode, beta, spec.distance_start, n, params, report))
    return rows


def run_comparison(spec: ScanSpec) -> list:
    """RFI and BB84 (both biased) over the same grids, interleaved per (beta, distance)."""
    modes = ("rfi-biased", "bb84-biased")
    curves = {(m, b): _distance_curve(spec, m, b) for b in spec.beta_list for m in modes}
    rows = []
    for beta in spec.beta_list:
        for distance in spec.distances:
            for mode in modes:
                rows.extend(r for r in curves[(mode, beta)] if r.distance_km == distance)
    return rows


# -- output -------------------------------------------------------------------

def _fmt(v) -> str:
    return format(float(v), ".17g")


def format_row(row: ScanRow) -> str:
    rep = row.report
    fields = [row.mode, _fmt(row.beta), _fmt(row.distance_km), _fmt(row.n_pulses), _fmt(rep.rate)]
    fields += [_fmt(getattr(row.params, name)) for name in PARAM_NAMES]
    fields += [_fmt(rep.c_value), _fmt(rep.y1_zz_lower), _fmt(rep.e1_zz_upper), _fmt(rep.i_e)]
    fields.append(str(row.flag))
    return ",".join(fields)


def emit_csv(rows, path) -> None:
    lines = [",".join(CSV_COLUMNS)] + [format_row(r) for r in rows]
    try:
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise ScanIOError(f"cannot write {path}: {exc.strerror or exc}") from exc


def read_csv(path) -> list:
    """Read a scan CSV back as a list of dicts (numeric columns as floats)."""
    import csv

    with open(path, newline="") as fh:
        out = []
        for rec in csv.DictReader(fh):
            row = {k: (v if k == "mode" else float(v)) for k, v in rec.items()}
            row["no_key_flag"] = int(row["no_key_flag"])
            out.append(row)
        return out
