"""Outer and inner bounds on the rate region of multi-input broadcast PECs
with feedback.

Outer bound: for every way of ordering the destinations per subchannel
(one permutation per subchannel), the rates must admit a per-subchannel
split satisfying the degraded-channel weighted-sum constraint built from
nested prefix non-reception probabilities. The region is the intersection
over all permutation choices.

Inner bound: the Minkowski sum of the per-subchannel feedback capacity
regions (exact for K <= 3), or the time-sharing region for any K.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .channels import MultiInputPEC
from .errors import CapExceededError, InputError, ModelRestrictionError
from .lp import ConstraintSystem, LpSolution, make_row, maximize, solve_feasibility
from .rational import parse_rational

DEFAULT_TUPLE_CAP = 10000

# one permutation of 1..K per subchannel
PermutationTuple = tuple[tuple[int, ...], ...]

ONE = Fraction(1)


def rate_var(k: int) -> str:
    return f"R[{k}]"


def split_var(i: int, k: int) -> str:
    return f"R[{i}][{k}]"


def _as_perm(perm, k: int) -> tuple[int, ...]:
    p = tuple(int(x) for x in perm)
    if sorted(p) != list(range(1, k + 1)):
        raise InputError(f"{p} is not a permutation of 1..{k}")
    return p


def normalize_tuple(channel: MultiInputPEC, perms) -> PermutationTuple:
    """Accept a single shared permutation or one permutation per subchannel."""
    perms = tuple(perms)
    if perms and all(isinstance(x, int) for x in perms):
        shared = _as_perm(perms, channel.k)
        return tuple(shared for _ in range(channel.m))
    if len(perms) != channel.m:
        raise InputError(f"need {channel.m} permutations, got {len(perms)}")
    return tuple(_as_perm(p, channel.k) for p in perms)


def enumerate_tuples(channel: MultiInputPEC, shared: bool = False,
                     tuple_cap: int = DEFAULT_TUPLE_CAP) -> list[PermutationTuple]:
    """All permutation tuples (or the shared-permutation diagonal subset)."""
    count = math.factorial(channel.k)
    if not shared:
        count **= channel.m
    if count > tuple_cap:
        raise CapExceededError(
            f"{count} permutation tuples exceed the cap {tuple_cap}; "
            "pass an explicit tuple subset or raise the cap")
    perms = sorted(itertools.permutations(range(1, channel.k + 1)))
    if shared:
        return [tuple(p for _ in range(channel.m)) for p in perms]
    return [combo for combo in itertools.product(perms, repeat=channel.m)]


def weighted_split_rows(channel: MultiInputPEC, i: int, perm: Sequence[int],
                        name=split_var):
    """Rows for one subchannel under one destination ordering.

    Returns (weighted_row, pin_rows): the weighted-sum row has coefficient
    1/(1 - eps(prefix)) on each split rate; prefixes that are always erased
    pin the corresponding split rate to zero instead of dividing.
    """
    coeffs = {}
    pins = []
    prefix: set[int] = set()
    for j in perm:
        prefix.add(j)
        denom = ONE - channel.joint_non_reception(i, prefix)
        if denom == 0:
            pins.append(make_row({name(i, j): 1}, "=", 0))
        else:
            coeffs[name(i, j)] = ONE / denom
    row = make_row(coeffs, "<=", 1) if coeffs else None
    return row, pins


def degraded_region(channel: MultiInputPEC, perms) -> ConstraintSystem:
    """Constraint system of the degraded channel for one permutation tuple.

    Variables are the totals R[k] and the per-subchannel splits R[i][k],
    coupled by R[k] = sum_i R[i][k]; all nonnegative.
    """
    tup = normalize_tuple(channel, perms)
    k, m = channel.k, channel.m
    variables = [rate_var(j) for j in range(1, k + 1)]
    variables += [split_var(i, j) for i in range(1, m + 1) for j in range(1, k + 1)]
    system = ConstraintSystem(variables)
    for i in range(1, m + 1):
        row, pins = weighted_split_rows(channel, i, tup[i - 1])
        if row is not None:
            system.rows.append(row)
        system.rows.extend(pins)
    for j in range(1, k + 1):
        coeffs = {rate_var(j): 1}
        for i in range(1, m + 1):
            coeffs[split_var(i, j)] = -1
        system.add_row(coeffs, "=", 0)
    return system


def outer_bound_systems(channel: MultiInputPEC, tuples=None,
                        tuple_cap: int = DEFAULT_TUPLE_CAP) -> list[ConstraintSystem]:
    """One system per permutation tuple, structurally deduplicated.

    The outer bound is the set of rate tuples feasible for every system.
    """
    if tuples is None:
        tuples = enumerate_tuples(channel, tuple_cap=tuple_cap)
    else:
        tuples = [normalize_tuple(channel, t) for t in tuples]
    systems = []
    seen = set()
    for tup in tuples:
        system = degraded_region(channel, tup)
        key = system.canonical_key()
        if key not in seen:
            seen.add(key)
            systems.append(system)
    return systems


def clamp_weights(channel: MultiInputPEC, mu) -> list[Fraction]:
    """Negative weights never bind (rates are nonnegative): clamp to zero."""
    weights = [parse_rational(x) for x in mu]
    if len(weights) != channel.k:
        raise InputError(f"need {channel.k} weights, got {len(weights)}")
    return [w if w > 0 else Fraction(0) for w in weights]


@dataclass
class BoundResult:
    value: Fraction | float
    rates: dict
    tuples_evaluated: int
    solution: LpSolution


def _tuple_block_rows(channel: MultiInputPEC, tup: PermutationTuple, tag: str):
    """Rows of one tuple's system with splits renamed to a private copy."""
    def name(i, k):
        return f"{split_var(i, k)}{tag}"
    rows = []
    for i in range(1, channel.m + 1):
        row, pins = weighted_split_rows(channel, i, tup[i - 1], name=name)
        if row is not None:
            rows.append(row)
        rows.extend(pins)
    return rows


def outer_max_weighted(channel: MultiInputPEC, mu, tuples=None,
                       tuple_cap: int = DEFAULT_TUPLE_CAP,
                       mode: str = "exact") -> BoundResult:
    """Maximum weighted sum of rates over the outer-bound intersection.

    One joint LP: shared totals R[k], one private split copy per distinct
    tuple. Couplings are relaxed to R[k] <= sum_i splits, which is exact
    here because the per-tuple regions are downward closed and the clamped
    weights are nonnegative.
    """
    weights = clamp_weights(channel, mu)
    if tuples is None:
        tuples = enumerate_tuples(channel, tuple_cap=tuple_cap)
    else:
        tuples = [normalize_tuple(channel, t) for t in tuples]
    k, m = channel.k, channel.m

    distinct = []
    seen = set()
    for tup in tuples:
        key = degraded_region(channel, tup).canonical_key()
        if key not in seen:
            seen.add(key)
            distinct.append(tup)

    variables = [rate_var(j) for j in range(1, k + 1)]
    rows = []
    for t, tup in enumerate(distinct):
        tag = f"#{t}"
        variables += [f"{split_var(i, j)}{tag}"
                      for i in range(1, m + 1) for j in range(1, k + 1)]
        rows.extend(_tuple_block_rows(channel, tup, tag))
        for j in range(1, k + 1):
            coeffs = {rate_var(j): 1}
            for i in range(1, m + 1):
                coeffs[f"{split_var(i, j)}{tag}"] = -1
            rows.append(make_row(coeffs, "<=", 0))
    system = ConstraintSystem(variables, rows)
    objective = {rate_var(j): weights[j - 1] for j in range(1, k + 1)}
    solution = maximize(system, objective, mode=mode)
    if solution.status != "optimal":
        raise InputError(f"outer-bound LP reported {solution.status}")
    rates = {rate_var(j): solution.assignment[rate_var(j)] for j in range(1, k + 1)}
    return BoundResult(value=solution.value, rates=rates,
                       tuples_evaluated=len(distinct), solution=solution)


def _parse_rates(channel: MultiInputPEC, rates) -> list[Fraction]:
    vals = [parse_rational(x) for x in rates]
    if len(vals) != channel.k:
        raise InputError(f"need {channel.k} rates, got {len(vals)}")
    if any(v < 0 for v in vals):
        raise InputError("rates must be nonnegative")
    return vals


def outer_membership(channel: MultiInputPEC, rates, tuples=None,
                     tuple_cap: int = DEFAULT_TUPLE_CAP,
                     mode: str = "exact") -> bool:
    """Is the rate tuple inside the outer bound? One feasibility LP per
    distinct tuple; membership requires a feasible split for each."""
    vals = _parse_rates(channel, rates)
    if tuples is None:
        tuples = enumerate_tuples(channel, tuple_cap=tuple_cap)
    else:
        tuples = [normalize_tuple(channel, t) for t in tuples]
    k, m = channel.k, channel.m
    seen = set()
    for tup in tuples:
        key = degraded_region(channel, tup).canonical_key()
        if key in seen:
            continue
        seen.add(key)
        variables = [split_var(i, j) for i in range(1, m + 1) for j in range(1, k + 1)]
        system = ConstraintSystem(variables)
        for i in range(1, m + 1):
            row, pins = weighted_split_rows(channel, i, tup[i - 1])
            if row is not None:
                system.rows.append(row)
            system.rows.extend(pins)
        for j in range(1, k + 1):
            coeffs = {split_var(i, j): 1 for i in range(1, m + 1)}
            system.add_row(coeffs, "=", vals[j - 1])
        if solve_feasibility(system, mode=mode).status != "optimal":
            return False
    return True


def timesharing_functional(channel: MultiInputPEC, mu) -> Fraction:
    """Closed-form weighted-sum optimum of the time-sharing region:
    each subchannel serves the destination with the largest mu_j(1-eps_ij)."""
    weights = clamp_weights(channel, mu)
    total = Fraction(0)
    for i in range(1, channel.m + 1):
        total += max(weights[j - 1] * (ONE - channel.marginal_erasure(i, j))
                     for j in range(1, channel.k + 1))
    return total


def timesharing_system(channel: MultiInputPEC) -> ConstraintSystem:
    """Time-sharing rate region: R[j] <= sum_i a[i][j](1-eps_ij) with each
    subchannel's slot shares a[i][.] forming a probability vector."""
    k, m = channel.k, channel.m
    variables = [rate_var(j) for j in range(1, k + 1)]
    variables += [f"a[{i}][{j}]" for i in range(1, m + 1) for j in range(1, k + 1)]
    system = ConstraintSystem(variables)
    for i in range(1, m + 1):
        system.add_row({f"a[{i}][{j}]": 1 for j in range(1, k + 1)}, "=", 1)
    for j in range(1, k + 1):
        coeffs = {rate_var(j): 1}
        for i in range(1, m + 1):
            coeffs[f"a[{i}][{j}]"] = -(ONE - channel.marginal_erasure(i, j))
        system.add_row(coeffs, "<=", 0)
    return system


def timesharing_lp_value(channel: MultiInputPEC, mu, mode: str = "exact"):
    """LP cross-check of the closed form, over the allocation region."""
    weights = clamp_weights(channel, mu)
    system = timesharing_system(channel)
    objective = {rate_var(j): weights[j - 1] for j in range(1, channel.k + 1)}
    solution = maximize(system, objective, mode=mode)
    if solution.status != "optimal":
        raise InputError(f"time-sharing LP reported {solution.status}")
    return solution.value


INNER_CAPACITY_MAX_K = 3


def inner_bound_system(channel: MultiInputPEC, kind: str = "capacity") -> ConstraintSystem:
    """Inner bound as one constraint system.

    kind="capacity": Minkowski sum of per-subchannel capacity regions; each
    subchannel's splits satisfy the weighted-sum row for every destination
    ordering simultaneously. Only claimed exact for K <= 3, refused above.
    kind="timeshare": the time-sharing region, any K.
    """
    if kind == "timeshare":
        return timesharing_system(channel)
    if kind != "capacity":
        raise InputError(f"unknown inner bound kind {kind!r}")
    if channel.k > INNER_CAPACITY_MAX_K:
        raise ModelRestrictionError(
            f"capacity-sum inner bound is only available for K <= {INNER_CAPACITY_MAX_K} "
            f"(got K={channel.k}); use the time-sharing inner bound instead")
    k, m = channel.k, channel.m
    variables = [rate_var(j) for j in range(1, k + 1)]
    variables += [split_var(i, j) for i in range(1, m + 1) for j in range(1, k + 1)]
    system = ConstraintSystem(variables)
    seen = set()
    for i in range(1, m + 1):
        for perm in sorted(itertools.permutations(range(1, k + 1))):
            row, pins = weighted_split_rows(channel, i, perm)
            for candidate in ([row] if row is not None else []) + pins:
                key = candidate.canonical()
                if key not in seen:
                    seen.add(key)
                    system.rows.append(candidate)
    for j in range(1, k + 1):
        coeffs = {rate_var(j): 1}
        for i in range(1, m + 1):
            coeffs[split_var(i, j)] = -1
        system.add_row(coeffs, "=", 0)
    return system


def inner_max_weighted(channel: MultiInputPEC, mu, kind: str = "capacity",
                       mode: str = "exact") -> BoundResult:
    """Maximum weighted rate sum over the inner bound."""
    weights = clamp_weights(channel, mu)
    system = inner_bound_system(channel, kind=kind)
    objective = {rate_var(j): weights[j - 1] for j in range(1, channel.k + 1)}
    solution = maximize(system, objective, mode=mode)
    if solution.status != "optimal":
        raise InputError(f"inner-bound LP reported {solution.status}")
    rates = {rate_var(j): solution.assignment[rate_var(j)]
             for j in range(1, channel.k + 1)}
    return BoundResult(value=solution.value, rates=rates,
                       tuples_evaluated=0, solution=solution)


@dataclass
class GapResult:
    outer: Fraction | float
    inner: Fraction | float
    gap: Fraction | float
    outer_rates: dict
    inner_rates: dict


def sum_rate_gap(channel: MultiInputPEC, tuple_cap: int = DEFAULT_TUPLE_CAP,
                 mode: str = "exact") -> GapResult:
    """Sum-rate optima of outer and inner bounds and their gap (>= 0)."""
    ones = [1] * channel.k
    outer = outer_max_weighted(channel, ones, tuple_cap=tuple_cap, mode=mode)
    inner = inner_max_weighted(channel, ones, mode=mode)
    gap = outer.value - inner.value
    if gap < 0:
        raise InputError("internal error: inner bound exceeded outer bound")
    return GapResult(outer=outer.value, inner=inner.value, gap=gap,
                     outer_rates=outer.rates, inner_rates=inner.rates)


def uniform_sum_constraint(channel: MultiInputPEC, rates, perm) -> bool:
    """For channels with independent links and subchannel-independent erasures,
    check the summed ordering constraint: the prefix-weighted total rates may
    not exceed the number of subchannels."""
    vals = _parse_rates(channel, rates)
    eps = None
    for model in channel.subchannels:
        if model.kind != "independent":
            raise ModelRestrictionError("summed constraint needs independent link models")
        if eps is None:
            eps = model.eps
        elif model.eps != eps:
            raise ModelRestrictionError(
                "summed constraint needs identical erasure vectors on every subchannel")
    p = _as_perm(perm, channel.k)
    total = Fraction(0)
    prefix_eps = ONE
    for j in p:
        prefix_eps *= eps[j - 1]
        denom = ONE - prefix_eps
        if denom == 0:
            if vals[j - 1] != 0:
                return False
            continue
        total += vals[j - 1] / denom
    return total <= channel.m
