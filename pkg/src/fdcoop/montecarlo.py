# Trial orchestration: paired Monte-Carlo sweeps over power, SI mode and group size.
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .allocator import allocate, check_constraints
from .scenario import ConfigError, ScenarioConfig, normalize_gains, sample_channels

SI_MODE_ON = "with_si"
SI_MODE_OFF = "without_si"
_SI_MODES = (SI_MODE_ON, SI_MODE_OFF)


@dataclass(frozen=True)
class SweepSpec:
    """Grid definition for one sweep: power points x SI modes x group sizes.

    Trials with equal trial_index share the channel realization across all grid
    points of a given group size (common random numbers), so per-trial
    comparisons between grid points are exact paired comparisons.
    """

    base: ScenarioConfig
    pmax_user_dbm_values: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0)
    si_modes: tuple = (SI_MODE_ON, SI_MODE_OFF)
    trials_per_point: int = 500
    group_sizes: Optional[tuple] = None

    def __post_init__(self):
        if self.trials_per_point < 1:
            raise ConfigError("field 'trials_per_point': must be >= 1")
        vals = tuple(float(p) for p in self.pmax_user_dbm_values)
        if len(vals) < 1 or any(b <= a for a, b in zip(vals, vals[1:])):
            raise ConfigError("field 'pmax_user_dbm_values': must be strictly increasing")
        object.__setattr__(self, "pmax_user_dbm_values", vals)
        modes = tuple(self.si_modes)
        if not modes or len(set(modes)) != len(modes) or any(m not in _SI_MODES for m in modes):
            raise ConfigError(
                f"field 'si_modes': must be a non-empty subset of {_SI_MODES}")
        object.__setattr__(self, "si_modes", modes)
        if self.group_sizes is None:
            groups = ((self.base.k1, self.base.k2),)
        else:
            groups = tuple((int(k1), int(k2)) for k1, k2 in self.group_sizes)
            if not groups or any(k1 < 1 or k2 < 1 for k1, k2 in groups):
                raise ConfigError("field 'group_sizes': entries must be pairs of ints >= 1")
        object.__setattr__(self, "group_sizes", groups)


@dataclass(frozen=True)
class SweepPoint:
    """Aggregated result of one grid point."""

    pmax_dbm: float
    si_mode: str
    k1: int
    k2: int
    trials: int
    mean_sum_rate: float
    ci95_halfwidth: float
    outage_fraction: float
    degenerate: bool = False                 # single-sample CI is meaningless
    constraint_violations: int = 0           # non-QoS violations found by the plan audit
    trial_sum_rates: Optional[np.ndarray] = None


def run_trial(config: ScenarioConfig, trial_index: int, return_plan: bool = False):
    """One end-to-end trial: sample channels, normalize, allocate.

    Deterministic in (config.seed, trial_index). Returns the RateReport, or
    (plan, report) when return_plan is set.
    """
    channels = sample_channels(config, trial_index)
    gains = normalize_gains(config, channels)
    plan, report = allocate(gains, config)
    if return_plan:
        return plan, report
    return report


def aggregate(sum_rates: Sequence[float],
              feasible: Optional[Sequence[bool]] = None) -> tuple[float, float, float]:
    """Mean, normal-approximation 95% CI halfwidth, and outage fraction."""
    values = np.asarray(sum_rates, float)
    if values.size == 0:
        raise ValueError("cannot aggregate an empty sample")
    mean = float(values.mean())
    if values.size > 1:
        halfwidth = float(1.96 * values.std(ddof=1) / np.sqrt(values.size))
    else:
        halfwidth = 0.0
    if feasible is None:
        outage = 0.0
    else:
        flags = np.asarray(list(feasible), bool)
        if flags.size != values.size:
            raise ValueError("feasibility flags must match the sample size")
        outage = float(np.count_nonzero(~flags) / flags.size)
    return mean, halfwidth, outage


def run_sweep(spec: SweepSpec, keep_trials: bool = False,
              check_plans: bool = False) -> list[SweepPoint]:
    """Run every grid point with paired trial indices and aggregate the results.

    Trials run in ascending trial_index order so the reduction is deterministic;
    with check_plans the structural/power constraint families are audited on
    every produced plan and the violation count is carried on the point.
    """
    points: list[SweepPoint] = []
    for k1, k2 in spec.group_sizes:
        for si_mode in spec.si_modes:
            for pmax_dbm in spec.pmax_user_dbm_values:
                config = replace(spec.base, k1=k1, k2=k2,
                                 si_enabled=(si_mode == SI_MODE_ON),
                                 pmax_user_dbm=pmax_dbm)
                rates = np.empty(spec.trials_per_point)
                feasible = np.empty(spec.trials_per_point, bool)
                violations = 0
                for t in range(spec.trials_per_point):
                    if check_plans:
                        plan, report = run_trial(config, t, return_plan=True)
                        found = check_constraints(plan, report, config)
                        violations += sum(1 for v in found if v.constraint <= 6)
                    else:
                        report = run_trial(config, t)
                    rates[t] = report.sum_rate
                    feasible[t] = report.feasible
                mean, halfwidth, outage = aggregate(rates, feasible)
                points.append(SweepPoint(
                    pmax_dbm=pmax_dbm, si_mode=si_mode, k1=k1, k2=k2,
                    trials=spec.trials_per_point, mean_sum_rate=mean,
                    ci95_halfwidth=halfwidth, outage_fraction=outage,
                    degenerate=(spec.trials_per_point == 1),
                    constraint_violations=violations,
                    trial_sum_rates=rates.copy() if keep_trials else None))
    return points
