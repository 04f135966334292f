"""Capacity bounds for broadcast packet erasure channels with feedback.

Library layout:

* channels   -- erasure models, multi-input channels, reception sampling
* lp         -- constraint systems and the exact rational simplex
* bounds     -- outer/inner rate-region bounds and the time-sharing functional
* reduction  -- relay-network cut reduction to multi-input channels
* gf,scheme  -- GF(2^m) decoding and the two-phase repair-scheme simulator
* cli        -- `pecbounds` command-line front end
"""

__version__ = "0.1.0"

from .bounds import (BoundResult, GapResult, degraded_region, enumerate_tuples,
                     inner_bound_system, inner_max_weighted, outer_bound_systems,
                     outer_max_weighted, outer_membership, sum_rate_gap,
                     timesharing_functional, timesharing_lp_value,
                     timesharing_system, uniform_sum_constraint)
from .channels import ErasureModel, MultiInputPEC, ReceptionOutcome, trial_rng
from .errors import (CapExceededError, InputError, ModelRestrictionError,
                     PecError, PreconditionError)
from .gf import GaloisField, gf_solve
from .lp import ConstraintSystem, LpSolution, feasible, make_row, maximize
from .reduction import (CutSpec, ReductionResult, RelayGraph, network_rate_bound,
                        reduce_cut)
from .scheme import (SchemeConfig, SchemeReport, SchemeSummary, closed_form_rates,
                     repair_fraction, run_baseline, run_trials, run_two_phase,
                     two_subchannel_channel)

__all__ = [
    "BoundResult", "CapExceededError", "ConstraintSystem", "CutSpec",
    "ErasureModel", "GaloisField", "GapResult", "InputError", "LpSolution",
    "ModelRestrictionError", "MultiInputPEC", "PecError", "PreconditionError",
    "ReceptionOutcome", "ReductionResult", "RelayGraph", "SchemeConfig",
    "SchemeReport", "SchemeSummary", "closed_form_rates", "degraded_region",
    "enumerate_tuples", "feasible", "gf_solve", "inner_bound_system",
    "inner_max_weighted", "make_row", "maximize", "network_rate_bound",
    "outer_bound_systems", "outer_max_weighted", "outer_membership",
    "reduce_cut", "repair_fraction", "run_baseline", "run_trials",
    "run_two_phase", "sum_rate_gap", "timesharing_functional",
    "timesharing_lp_value", "timesharing_system", "trial_rng",
    "two_subchannel_channel", "uniform_sum_constraint",
]
