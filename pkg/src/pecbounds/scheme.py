"""Monte-Carlo simulation of the cross-subchannel repair scheme.

Channel: two destinations; subchannel 1 has independent per-link erasure
eps1, subchannel 2 erases both links together with probability eps2.

The scheme runs two direct phases of N slots each on subchannel 1 (fresh
packets for one destination, resent only when nobody receives them), then a
repair phase of random linear combinations of the cross-received packets.
Subchannel 2 carries combinations the whole time; combining across the
block resolves the ordering of phase and repair traffic. Each destination
already holds the other's cross-received packets, so it decodes once its
received combinations have full rank over its own missing set.

The baseline scheme repairs over subchannel 1 only and spends subchannel 2
on fresh uncoded packets; its sum rate matches the no-cross-coding bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .channels import ErasureModel, MultiInputPEC, trial_rng
from .errors import InputError, PreconditionError
from .gf import GaloisField, gf_solve
from .rational import fmt_rational, parse_probability

ONE = Fraction(1)
_CHUNK = 4096


def two_subchannel_channel(eps1, eps2) -> MultiInputPEC:
    """The mixed pair: one independent subchannel, one fully correlated."""
    e1 = parse_probability(eps1)
    e2 = parse_probability(eps2)
    return MultiInputPEC(2, [ErasureModel.independent([e1, e1]),
                             ErasureModel.identical(e2, 2)])


def repair_fraction(eps1, eps2) -> Fraction:
    """Repair-phase length per unit direct-phase length.

    Solves the combination budget: repair and subchannel-2 deliveries
    together must cover each destination's cross-received set.
    """
    e1 = parse_probability(eps1)
    e2 = parse_probability(eps2)
    threshold = ONE - (ONE - e1) * e1 / 2
    if e2 < threshold:
        raise PreconditionError(
            f"repair fraction requires eps2 >= 1 - (1-eps1)*eps1/2 = {fmt_rational(threshold)}; "
            f"got eps2 = {fmt_rational(e2)}")
    denom = 2 - e1 - e2
    if denom == 0:
        raise PreconditionError("eps1 = eps2 = 1: the channel cannot carry repair traffic")
    return ((ONE - e1) * e1 - 2 * (ONE - e2)) / denom


@dataclass(frozen=True)
class SumRateBounds:
    inner: Fraction
    outer: Fraction
    gap: Fraction


def closed_form_rates(eps1, eps2) -> SumRateBounds:
    """Exact sum-rate bounds of the mixed pair channel."""
    e1 = parse_probability(eps1)
    e2 = parse_probability(eps2)
    inner = 2 * (ONE - e1 ** 2) / (2 + e1) + (ONE - e2)
    outer = 2 * (2 - e1 ** 2 + e1 - e2 - e1 * e2) / (2 + e1)
    gap = e1 * (ONE - e2) / (2 + e1)
    if gap != outer - inner:
        raise InputError("internal error: gap identity failed")
    return SumRateBounds(inner=inner, outer=outer, gap=gap)


@dataclass(frozen=True)
class SchemeConfig:
    eps1: Fraction
    eps2: Fraction
    n: int                      # direct-phase length in slots
    q: int = 256                # field size for repair combinations
    seed: int = 0
    trials: int = 1
    rank_margin: int = 8        # extra combinations collected per destination
    decode: str = "auto"        # auto | matrix | chain
    matrix_limit: int = 600     # max unknowns for materialized decoding

    def __post_init__(self):
        object.__setattr__(self, "eps1", parse_probability(self.eps1))
        object.__setattr__(self, "eps2", parse_probability(self.eps2))
        if self.n < 1:
            raise InputError("phase length n must be >= 1")
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if self.rank_margin < 0:
            raise InputError("rank_margin must be >= 0")
        GaloisField(self.q)
        if self.q <= self.rank_margin:
            raise InputError(
                f"field size {self.q} must exceed the rank margin {self.rank_margin}")
        if self.decode not in ("auto", "matrix", "chain"):
            raise InputError(f"unknown decode backend {self.decode!r}")


@dataclass
class SchemeReport:
    trial: int
    n: int
    slots: int
    repair_slots: int
    p1_size: int                 # packets for t1 held only by t2
    p2_size: int
    direct: tuple[int, int]      # direct-phase deliveries to each destination
    combos: tuple[int, int]      # combinations received by each destination
    decoded: tuple[int, int]
    decode_ok: tuple[bool, bool]
    sum_rate: Fraction
    backend: str

    @property
    def success(self) -> bool:
        return self.decode_ok[0] and self.decode_ok[1]


def _direct_phase(rng: np.random.Generator, n: int, e1: float) -> tuple[int, int]:
    """One N-slot direct phase: (deliveries to the intended destination,
    packets picked up only by the other destination). A slot where nobody
    receives repeats the packet, so per-slot tallies count packets."""
    intended = rng.random(n) >= e1
    other = rng.random(n) >= e1
    return int(intended.sum()), int((~intended & other).sum())


def _decode(rng: np.random.Generator, field: GaloisField, unknowns: int,
            combos: int, backend: str) -> bool:
    """Can `unknowns` packets be recovered from `combos` uniform combinations?

    matrix: materialize the coefficients and row-reduce.
    chain: sample the rank evolution directly; a fresh uniform row extends a
    rank-r space with probability 1 - q^(r - unknowns), which is exactly the
    law of the materialized matrix rank. The two destinations read disjoint
    coordinate blocks of any shared combination, so their chains are
    independent.
    """
    if unknowns == 0:
        return True
    if combos < unknowns:
        return False
    if backend == "matrix":
        matrix = field.random_matrix(rng, combos, unknowns)
        rank, _ = gf_solve(field, matrix)
        return rank == unknowns
    u = rng.random(combos)
    q = float(field.size)
    rank = 0
    for t in range(combos):
        if u[t] >= q ** (rank - unknowns):
            rank += 1
            if rank == unknowns:
                return True
    return False


def _pick_backend(config: SchemeConfig, p1: int, p2: int) -> str:
    if config.decode != "auto":
        return config.decode
    return "matrix" if max(p1, p2) <= config.matrix_limit else "chain"


def _repair_phase(rng, rates: Sequence[float], have: list[int],
                  need: list[int]) -> tuple[int, list[int]]:
    """Run repair slots until every destination holds enough combinations.

    `rates` lists per-slot reception probabilities per combination stream:
    (sub1 to t1, sub1 to t2, sub2 shared). Returns (slots used, counts)."""
    slots = 0
    counts = list(have)
    while counts[0] < need[0] or counts[1] < need[1]:
        a = rng.random(_CHUNK) >= (1 - rates[0])
        b = rng.random(_CHUNK) >= (1 - rates[1])
        c = rng.random(_CHUNK) >= (1 - rates[2]) if rates[2] > 0 else np.zeros(_CHUNK, dtype=bool)
        got1 = np.cumsum(a.astype(np.int64) + c.astype(np.int64)) + counts[0]
        got2 = np.cumsum(b.astype(np.int64) + c.astype(np.int64)) + counts[1]
        done = (got1 >= need[0]) & (got2 >= need[1])
        idx = int(np.argmax(done)) if done.any() else None
        if idx is not None:
            slots += idx + 1
            counts = [int(got1[idx]), int(got2[idx])]
            break
        slots += _CHUNK
        counts = [int(got1[-1]), int(got2[-1])]
    return slots, counts


def run_two_phase(config: SchemeConfig, trial: int = 0) -> SchemeReport:
    """Simulate one trial of the cross-subchannel repair scheme."""
    rng = trial_rng(config.seed, trial)
    e1, e2 = float(config.eps1), float(config.eps2)
    repair_fraction(config.eps1, config.eps2)   # enforce the parameter condition
    n = config.n

    direct1, p1 = _direct_phase(rng, n, e1)
    direct2, p2 = _direct_phase(rng, n, e1)
    shared = int((rng.random(2 * n) >= e2).sum())   # sub2 combos during phases

    need = [p1 + config.rank_margin if p1 else 0,
            p2 + config.rank_margin if p2 else 0]
    repair_slots, combos = _repair_phase(
        rng, (1 - e1, 1 - e1, 1 - e2), [shared, shared], need)

    field = GaloisField(config.q)
    backend = _pick_backend(config, p1, p2)
    ok1 = _decode(rng, field, p1, combos[0], backend)
    ok2 = _decode(rng, field, p2, combos[1], backend)
    decoded1 = direct1 + (p1 if ok1 else 0)
    decoded2 = direct2 + (p2 if ok2 else 0)
    slots = 2 * n + repair_slots
    return SchemeReport(
        trial=trial, n=n, slots=slots, repair_slots=repair_slots,
        p1_size=p1, p2_size=p2, direct=(direct1, direct2),
        combos=(combos[0], combos[1]), decoded=(decoded1, decoded2),
        decode_ok=(ok1, ok2), sum_rate=Fraction(decoded1 + decoded2, slots),
        backend=backend)


def run_baseline(config: SchemeConfig, trial: int = 0) -> SchemeReport:
    """No coding across subchannels: repair on subchannel 1 only, fresh
    uncoded packets on subchannel 2 for the whole run."""
    rng = trial_rng(config.seed, trial)
    e1, e2 = float(config.eps1), float(config.eps2)
    n = config.n

    direct1, p1 = _direct_phase(rng, n, e1)
    direct2, p2 = _direct_phase(rng, n, e1)

    need = [p1 + config.rank_margin if p1 else 0,
            p2 + config.rank_margin if p2 else 0]
    repair_slots, combos = _repair_phase(rng, (1 - e1, 1 - e1, 0.0), [0, 0], need)

    slots = 2 * n + repair_slots
    fresh = int((rng.random(slots) >= e2).sum())    # sub2 deliveries, alternating owner
    field = GaloisField(config.q)
    backend = _pick_backend(config, p1, p2)
    ok1 = _decode(rng, field, p1, combos[0], backend)
    ok2 = _decode(rng, field, p2, combos[1], backend)
    decoded1 = direct1 + (p1 if ok1 else 0) + (fresh + 1) // 2
    decoded2 = direct2 + (p2 if ok2 else 0) + fresh // 2
    return SchemeReport(
        trial=trial, n=n, slots=slots, repair_slots=repair_slots,
        p1_size=p1, p2_size=p2, direct=(direct1, direct2),
        combos=(combos[0], combos[1]), decoded=(decoded1, decoded2),
        decode_ok=(ok1, ok2), sum_rate=Fraction(decoded1 + decoded2, slots),
        backend=backend)


@dataclass
class SchemeSummary:
    reports: list[SchemeReport]
    mean_rate: float
    stderr: float
    decode_failures: int

    @property
    def all_decoded(self) -> bool:
        return self.decode_failures == 0


def run_trials(config: SchemeConfig, baseline: bool = False) -> SchemeSummary:
    """Independent trials with per-trial derived streams; the summary does
    not depend on execution order."""
    runner = run_baseline if baseline else run_two_phase
    reports = [runner(config, trial) for trial in range(config.trials)]
    rates = np.array([float(r.sum_rate) for r in reports])
    mean = float(rates.mean())
    stderr = float(rates.std(ddof=1) / math.sqrt(len(rates))) if len(rates) > 1 else 0.0
    failures = sum(1 for r in reports if not r.success)
    return SchemeSummary(reports=reports, mean_rate=mean, stderr=stderr,
                         decode_failures=failures)
