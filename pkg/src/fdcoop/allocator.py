# End-to-end allocation for one channel realization.
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lapjv import CostMatrix, solve_rectangular
from .rate_model import FORM_FULL, coop_pair_rate, noncoop_slot_rate
from .scenario import NormalizedGains, ScenarioConfig

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0
_PRESCAN = 64
# golden-section iterations for a relative interval tolerance of 1e-10 starting
# from a two-cell prescan bracket of width 2*pmax/63
_GOLDEN_ITERS = 43


class OversubscriptionError(RuntimeError):
    """More transmitting entities than subcarriers; fractional sharing is unsupported."""


@dataclass(frozen=True)
class AllocationPlan:
    """Relay choices, subcarrier assignments and transmit powers for one realization.

    Each cooperative pair occupies the same subcarrier index in both slots; a
    non-relaying near user transmits in both slots on its own subcarrier.
    """

    relay_of: np.ndarray                      # far user k -> relay index m
    coop_assign: dict                         # far user k -> subcarrier
    noncoop_assign: dict                      # near user m -> (subcarrier slot 1, slot 2)
    coop_powers: dict                         # far user k -> (x, y) watts
    noncoop_powers: dict                      # near user m -> (p slot 1, p slot 2) watts


@dataclass(frozen=True)
class RateReport:
    """Achieved rates and QoS flags for every served entity."""

    coop_rate: dict                           # far user k -> bit/s/Hz
    noncoop_rate: dict                        # near user m -> bit/s/Hz
    sum_rate: float
    coop_qos_met: dict
    noncoop_qos_met: dict
    feasible: bool

    def to_dict(self) -> dict:
        return {
            "sum_rate_bps_hz": self.sum_rate,
            "coop_rate_bps_hz": {str(k): v for k, v in sorted(self.coop_rate.items())},
            "noncoop_rate_bps_hz": {str(m): v for m, v in sorted(self.noncoop_rate.items())},
            "coop_qos_met": {str(k): v for k, v in sorted(self.coop_qos_met.items())},
            "noncoop_qos_met": {str(m): v for m, v in sorted(self.noncoop_qos_met.items())},
            "feasible": self.feasible,
        }


@dataclass(frozen=True)
class Violation:
    constraint: int
    detail: str


def _full_sinr_on_line(x, pmax, a, b, c):
    """Full-form cooperative SINR at (x, pmax - x); broadcasts over arrays."""
    y = pmax - x
    num = x * y * a * b
    den = 1.0 + y * b + x * a + c + c * x * a
    return num / den


def _simplified_sinr_on_line(x, pmax, a, b, c):
    y = pmax - x
    num = x * y * a * b
    den = a * c * x + b * y
    return np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 0.0)


def _coop_split_table(a, b, gamma, z, pmax, form=FORM_FULL):
    """Optimal power split on the budget line for every cell of the gain arrays.

    Returns (x, sinr) arrays of the broadcast shape. A 64-point prescan brackets
    the maximizer (guarding against non-unimodal corners), then a fixed-count
    golden-section search refines it to a relative tolerance of 1e-10.
    """
    a, b, gamma = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float),
                                      np.asarray(gamma, float))
    shape = a.shape
    a = a.ravel()
    b = b.ravel()
    c = z * gamma.ravel()
    sinr_line = _full_sinr_on_line if form == FORM_FULL else _simplified_sinr_on_line

    x_out = np.full(a.shape, pmax / 2.0)
    sinr_out = np.zeros(a.shape)
    active = (a > 0) & (b > 0) & (pmax > 0)
    if np.any(active):
        aa, bb, cc = a[active], b[active], c[active]
        xs = np.linspace(0.0, pmax, _PRESCAN)
        grid = sinr_line(xs[None, :], pmax, aa[:, None], bb[:, None], cc[:, None])
        best = np.argmax(grid, axis=1)
        lo = xs[np.maximum(best - 1, 0)]
        hi = xs[np.minimum(best + 1, _PRESCAN - 1)]
        x1 = hi - _INVPHI * (hi - lo)
        x2 = lo + _INVPHI * (hi - lo)
        f1 = sinr_line(x1, pmax, aa, bb, cc)
        f2 = sinr_line(x2, pmax, aa, bb, cc)
        for _ in range(_GOLDEN_ITERS):
            keep_low = f1 > f2
            hi = np.where(keep_low, x2, hi)
            lo = np.where(keep_low, lo, x1)
            x1 = hi - _INVPHI * (hi - lo)
            x2 = lo + _INVPHI * (hi - lo)
            f1 = sinr_line(x1, pmax, aa, bb, cc)
            f2 = sinr_line(x2, pmax, aa, bb, cc)
        x_ref = 0.5 * (lo + hi)
        f_ref = sinr_line(x_ref, pmax, aa, bb, cc)
        x_grid = xs[best]
        f_grid = grid[np.arange(len(aa)), best]
        use_ref = f_ref >= f_grid
        x_out[active] = np.where(use_ref, x_ref, x_grid)
        sinr_out[active] = np.where(use_ref, f_ref, f_grid)
    return x_out.reshape(shape), sinr_out.reshape(shape)


def allocate_powers_cooperative(a: float, b: float, gamma: float, z: float,
                                pmax: float, form: str = FORM_FULL) -> tuple[float, float]:
    """Split the pair budget between far user (x) and relay (y = pmax - x).

    The budget binds because the SINR is increasing in both powers; dead links
    (a or b zero) fall back to an equal split with zero rate.
    """
    if pmax < 0:
        raise ValueError("pmax must be >= 0")
    if pmax == 0:
        return 0.0, 0.0
    x, _ = _coop_split_table(a, b, gamma, z, pmax, form=form)
    x = float(x)
    return x, pmax - x


def allocate_powers_noncooperative(config: ScenarioConfig) -> float:
    """Per-slot direct-link power: the budget, since the rate is increasing in it."""
    return config.pmax_user_w


def select_relays(gains: NormalizedGains, config: ScenarioConfig) -> np.ndarray:
    """Pick a relay for every far user by highest best-subcarrier cooperative SINR.

    The SINR is the full form evaluated at the equal budget split. With enough
    near users (k2 >= k1) selection is greedy in descending best-SINR order and
    each relay serves at most one far user; otherwise each far user takes its
    argmax relay independently. Ties go to the lowest relay index.
    """
    z = config.pmax_bs_w
    half = config.pmax_user_w / 2.0
    c = z * gains.gamma_si                                  # (n,)
    num = half * half * gains.alpha * gains.beta[None, :, :]
    den = 1.0 + half * gains.beta[None, :, :] + half * gains.alpha \
        + c[None, None, :] * (1.0 + half * gains.alpha)
    best = (num / den).max(axis=2)                          # (k1, k2)

    k1, k2 = config.k1, config.k2
    if k1 > k2:
        return np.argmax(best, axis=1).astype(int)
    relay_of = np.full(k1, -1, dtype=int)
    available = np.ones(k2, dtype=bool)
    order = sorted(range(k1), key=lambda k: (-best[k].max(), k))
    for k in order:
        cand = np.flatnonzero(available)
        m = int(cand[int(np.argmax(best[k, cand]))])
        relay_of[k] = m
        available[m] = False
    return relay_of


def free_near_users(relay_of: np.ndarray, k2: int) -> list[int]:
    """Near users not acting as relays, in ascending index order."""
    used = set(int(m) for m in relay_of)
    return [m for m in range(k2) if m not in used]


def build_cost_matrix(gains: NormalizedGains, relays: np.ndarray,
                      config: ScenarioConfig) -> CostMatrix:
    """Negated full-budget achievable rate per (entity, subcarrier).

    Rows are the k1 cooperative pairs followed by the non-relaying near users;
    cooperative cells take their optimal power split, direct cells transmit the
    per-slot budget in both slots.
    """
    n = config.n_subcarriers
    z = config.pmax_bs_w
    pmax = config.pmax_user_w
    rows = []
    for k in range(config.k1):
        m = int(relays[k])
        _, sinr = _coop_split_table(gains.alpha[k, m, :], gains.beta[m, :],
                                    gains.gamma_si, z, pmax)
        rows.append(0.5 * np.log2(1.0 + sinr))
    slot_sinr = pmax * gains.beta / (1.0 + z * gains.gamma_si)[None, :]
    for m in free_near_users(relays, config.k2):
        rows.append(np.log2(1.0 + slot_sinr[m]))            # two half-rate slots
    return CostMatrix(costs=-np.array(rows).reshape(len(rows), n))


def assign_subcarriers(cost: CostMatrix) -> np.ndarray:
    """One subcarrier per entity, maximizing total rate via the assignment solver."""
    if cost.rows > cost.cols:
        raise OversubscriptionError(
            f"{cost.rows} entities exceed {cost.cols} subcarriers")
    return solve_rectangular(cost).row_to_col


def allocate(gains: NormalizedGains, config: ScenarioConfig) -> tuple[AllocationPlan, RateReport]:
    """Full pipeline: relay selection, subcarrier assignment, power allocation.

    The returned plan satisfies the structural and power constraints by
    construction; minimum-rate requirements are evaluated and flagged, never
    repaired, so infeasible realizations surface as outage.
    """
    relays = select_relays(gains, config)
    free = free_near_users(relays, config.k2)
    n_entities = config.k1 + len(free)
    if n_entities > config.n_subcarriers:
        raise OversubscriptionError(
            f"{n_entities} entities exceed {config.n_subcarriers} subcarriers")

    cost = build_cost_matrix(gains, relays, config)
    row_to_col = assign_subcarriers(cost)

    z = config.pmax_bs_w
    pmax = config.pmax_user_w
    p_nc = allocate_powers_noncooperative(config)

    coop_assign, coop_powers, coop_rate = {}, {}, {}
    for k in range(config.k1):
        m = int(relays[k])
        i = int(row_to_col[k])
        x, y = allocate_powers_cooperative(gains.alpha[k, m, i], gains.beta[m, i],
                                           gains.gamma_si[i], z, pmax)
        coop_assign[k] = i
        coop_powers[k] = (x, y)
        coop_rate[k] = float(coop_pair_rate(x, y, gains.alpha[k, m, i],
                                            gains.beta[m, i], gains.gamma_si[i], z))

    noncoop_assign, noncoop_powers, noncoop_rate = {}, {}, {}
    for row, m in enumerate(free, start=config.k1):
        j = int(row_to_col[row])
        noncoop_assign[m] = (j, j)
        noncoop_powers[m] = (p_nc, p_nc)
        slot = noncoop_slot_rate(p_nc, gains.beta[m, j], gains.gamma_si[j], z)
        noncoop_rate[m] = float(2.0 * slot)

    sum_rate = float(sum(coop_rate.values()) + sum(noncoop_rate.values()))
    coop_qos = {k: bool(r >= config.rmin_coop_bps_hz) for k, r in coop_rate.items()}
    noncoop_qos = {m: bool(r >= config.rmin_noncoop_bps_hz)
                   for m, r in noncoop_rate.items()}
    feasible = all(coop_qos.values()) and all(noncoop_qos.values())

    plan = AllocationPlan(relay_of=relays, coop_assign=coop_assign,
                          noncoop_assign=noncoop_assign, coop_powers=coop_powers,
                          noncoop_powers=noncoop_powers)
    report = RateReport(coop_rate=coop_rate, noncoop_rate=noncoop_rate,
                        sum_rate=sum_rate, coop_qos_met=coop_qos,
                        noncoop_qos_met=noncoop_qos, feasible=feasible)
    return plan, report


def check_constraints(plan: AllocationPlan, report: RateReport,
                      config: ScenarioConfig) -> list[Violation]:
    """Audit a plan/report against all eight constraint families.

    Families 1-3 are structural (indicator sanity and per-slot subcarrier
    exclusivity), 4-6 are power limits, 7-8 are the minimum-rate requirements.
    """
    out: list[Violation] = []
    n, k1, k2 = config.n_subcarriers, config.k1, config.k2
    pmax = config.pmax_user_w
    tol = 1e-9 * max(pmax, 1.0)

    for k, m in enumerate(plan.relay_of):
        if not 0 <= int(m) < k2:
            out.append(Violation(1, f"far user {k}: relay index {m} out of range"))
    for k, i in plan.coop_assign.items():
        if not 0 <= i < n:
            out.append(Violation(1, f"far user {k}: subcarrier {i} out of range"))
    for m, (i1, i2) in plan.noncoop_assign.items():
        if not (0 <= i1 < n and 0 <= i2 < n):
            out.append(Violation(1, f"near user {m}: subcarrier out of range"))
        if int(m) in set(int(r) for r in plan.relay_of):
            out.append(Violation(2, f"near user {m} both relays and transmits directly"))

    slot1 = list(plan.coop_assign.values()) + [ij[0] for ij in plan.noncoop_assign.values()]
    slot2 = list(plan.coop_assign.values()) + [ij[1] for ij in plan.noncoop_assign.values()]
    for constraint, occupied in ((2, slot1), (3, slot2)):
        seen = set()
        for i in occupied:
            if i in seen:
                out.append(Violation(constraint, f"subcarrier {i} assigned more than once"))
            seen.add(i)

    for k, (x, y) in plan.coop_powers.items():
        if x < 0 or y < 0:
            out.append(Violation(4, f"far user {k}: negative power"))
        if x + y > pmax + tol:
            out.append(Violation(5, f"far user {k}: pair power {x + y:.6g} over budget"))
    for m, (p1, p2) in plan.noncoop_powers.items():
        if p1 < 0 or p2 < 0:
            out.append(Violation(4, f"near user {m}: negative power"))
        if p1 > pmax + tol or p2 > pmax + tol:
            out.append(Violation(6, f"near user {m}: slot power over budget"))

    for k, r in report.coop_rate.items():
        if r < config.rmin_coop_bps_hz - 1e-12:
            out.append(Violation(7, f"far user {k}: rate {r:.6g} below minimum"))
    for m, r in report.noncoop_rate.items():
        if r < config.rmin_noncoop_bps_hz - 1e-12:
            out.append(Violation(8, f"near user {m}: rate {r:.6g} below minimum"))
    return out
