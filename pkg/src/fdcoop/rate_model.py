# Closed-form SINR and achievable-rate expressions for both link types.
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FORM_FULL = "full"
FORM_SIMPLIFIED = "simplified"
_FORMS = (FORM_FULL, FORM_SIMPLIFIED)


class DegenerateInputError(ValueError):
    """Simplified SINR evaluated where its denominator vanishes but the numerator does not."""


@dataclass(frozen=True)
class CoopLinkParams:
    """One cooperative (two-hop) link: far user -> relay -> base station.

    x: far-user transmit power (W), slot 1
    y: relay transmit power (W), slot 2
    z: base-station downlink power (W), source of the self-interference
    a: normalized far-user -> relay gain
    b: normalized relay -> base-station gain
    gamma: normalized residual self-interference gain at the base station
    """

    x: float
    y: float
    z: float
    a: float
    b: float
    gamma: float

    def __post_init__(self):
        vals = (self.x, self.y, self.z, self.a, self.b, self.gamma)
        if any(v < 0 for v in vals) or not all(np.isfinite(vals)):
            raise ValueError("cooperative link parameters must be finite and >= 0")


@dataclass(frozen=True)
class NonCoopLinkParams:
    """One direct near-user -> base-station link in a single time slot."""

    p: float
    b: float
    z: float
    gamma: float

    def __post_init__(self):
        vals = (self.p, self.b, self.z, self.gamma)
        if any(v < 0 for v in vals) or not all(np.isfinite(vals)):
            raise ValueError("non-cooperative link parameters must be finite and >= 0")


def amplification_gain(x: float, h_gain: float) -> float:
    """Amplify-and-forward scaling 1/sqrt(x*h_gain + 1) applied at the relay."""
    if x < 0 or h_gain < 0:
        raise ValueError("power and gain must be >= 0")
    return 1.0 / np.sqrt(x * h_gain + 1.0)


def sinr_cooperative(p: CoopLinkParams, form: str = FORM_FULL) -> float:
    """End-to-end SINR of the amplified two-hop link.

    The full form keeps every interference and noise term; the simplified form
    keeps only the two dominant denominator terms (a*c*x + b*y with c = z*gamma),
    which is the expression whose concavity is established analytically.
    The simplified form upper-bounds the full one.
    """
    if form not in _FORMS:
        raise ValueError(f"unknown SINR form {form!r}")
    c = p.z * p.gamma
    num = p.x * p.y * p.a * p.b
    if form == FORM_FULL:
        den = 1.0 + p.y * p.b + p.x * p.a + c + c * p.x * p.a
        return num / den
    den = p.a * c * p.x + p.b * p.y
    if den == 0.0:
        if num == 0.0:
            return 0.0
        raise DegenerateInputError("simplified SINR denominator is zero with nonzero numerator")
    return num / den


def sinr_noncooperative(p: NonCoopLinkParams) -> float:
    """Direct-link SINR p*b / (1 + z*gamma) for one time slot."""
    return p.p * p.b / (1.0 + p.z * p.gamma)


def rate_from_sinr(sinr: float) -> float:
    """Per-slot spectral efficiency 0.5*log2(1 + sinr) in bit/s/Hz."""
    if sinr < 0:
        raise ValueError("SINR must be >= 0")
    return 0.5 * np.log2(1.0 + sinr)


def coop_pair_rate(x: float, y: float, a: float, b: float, gamma: float, z: float,
                   form: str = FORM_FULL) -> float:
    """Rate of one cooperative pair on its subcarrier (two slots, 1/2 pre-log)."""
    sinr = sinr_cooperative(CoopLinkParams(x=x, y=y, z=z, a=a, b=b, gamma=gamma), form=form)
    return rate_from_sinr(sinr)


def noncoop_slot_rate(p: float, b: float, gamma: float, z: float) -> float:
    """Rate of one direct transmission in one slot (1/2 pre-log)."""
    return rate_from_sinr(sinr_noncooperative(NonCoopLinkParams(p=p, b=b, z=z, gamma=gamma)))


def total_sum_rate(plan, gains, config, form: str = FORM_FULL) -> float:
    """Recompute the network sum-rate from an allocation plan's powers.

    Sums the cooperative-pair rates over their assigned subcarriers plus both
    per-slot direct rates of every non-relaying near user. Serves as the
    independent re-summation against the rates carried in a RateReport.
    """
    n = config.n_subcarriers
    z = config.pmax_bs_w
    alpha, beta, gamma_si = gains.alpha, gains.beta, gains.gamma_si
    if alpha.shape != (config.k1, config.k2, n) or beta.shape != (config.k2, n):
        raise ValueError("gain dimensions do not match config")
    total = 0.0
    for k, i in plan.coop_assign.items():
        m = plan.relay_of[k]
        x, y = plan.coop_powers[k]
        total += coop_pair_rate(x, y, alpha[k, m, i], beta[m, i], gamma_si[i], z, form=form)
    for m, (i1, i2) in plan.noncoop_assign.items():
        p1, p2 = plan.noncoop_powers[m]
        total += noncoop_slot_rate(p1, beta[m, i1], gamma_si[i1], z)
        total += noncoop_slot_rate(p2, beta[m, i2], gamma_si[i2], z)
    return total
