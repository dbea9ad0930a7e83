"""Uplink resource allocation for a full-duplex cooperative OFDMA cell.

Far users reach the base station through amplify-and-forward relays picked from
the near-user group; subcarriers are assigned with a Jonker-Volgenant linear
assignment solver and transmit powers by concave optimization on the budget
line. Monte-Carlo sweeps with common random numbers evaluate the scheme.
"""

from .allocator import (AllocationPlan, OversubscriptionError, RateReport,
                        allocate, allocate_powers_cooperative,
                        allocate_powers_noncooperative, assign_subcarriers,
                        build_cost_matrix, check_constraints, select_relays)
from .concavity_audit import (AuditPoint, AuditReport, analytic_coop_eigenvalues,
                              analytic_noncoop_eigenvalues, audit_concavity,
                              fd_hessian)
from .lapjv import (Assignment, CostMatrix, brute_force_assignment,
                    solve_rectangular, solve_square)
from .montecarlo import SweepPoint, SweepSpec, aggregate, run_sweep, run_trial
from .rate_model import (CoopLinkParams, DegenerateInputError, NonCoopLinkParams,
                         amplification_gain, rate_from_sinr, sinr_cooperative,
                         sinr_noncooperative, total_sum_rate)
from .scenario import (ChannelRealization, ConfigError, NormalizedGains,
                       ScenarioConfig, dbm_to_watts, dbw_to_watts, noise_power,
                       normalize_gains, sample_channels, scenario_from_dict,
                       watts_to_dbm)

__version__ = "0.1.0"
