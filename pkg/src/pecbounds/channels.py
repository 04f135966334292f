"""Multi-input broadcast packet erasure channels and their joint statistics.

A channel has M parallel broadcast subchannels from one source to K
destinations. Each subchannel carries one packet per slot and erases it
per-destination according to its erasure model:

* ``independent`` -- per-link erasure probabilities, links erase independently;
* ``identical``   -- one erasure event shared by every link (fully correlated);
* ``joint``       -- an explicit distribution over reception subsets of [K].

All probabilities are exact rationals. Erasure events on different
subchannels are always independent of each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from .jsonio import canonical_json, parse_subset_key, subset_key
from .rational import fmt_rational, parse_probability

DEFAULT_K_CAP = 8

# One slot's receptions: per subchannel, the set of destinations that got it.
ReceptionOutcome = tuple[frozenset[int], ...]

ONE = Fraction(1)


@dataclass(frozen=True)
class ErasureModel:
    """Erasure law of one broadcast subchannel over destinations 1..k."""

    kind: str
    k: int
    eps: tuple[Fraction, ...] = ()          # independent: per-link erasure
    eps_all: Fraction = Fraction(0)         # identical: shared erasure
    table: tuple[tuple[frozenset[int], Fraction], ...] = ()  # joint: p(S)

    @classmethod
    def independent(cls, eps: Iterable) -> "ErasureModel":
        probs = tuple(parse_probability(e) for e in eps)
        if not probs:
            raise ValueError("independent model needs at least one link")
        return cls(kind="independent", k=len(probs), eps=probs)

    @classmethod
    def identical(cls, e, k: int) -> "ErasureModel":
        if k < 1:
            raise ValueError("k must be >= 1")
        return cls(kind="identical", k=k, eps_all=parse_probability(e))

    @classmethod
    def nested(cls, eps: Iterable, order: Iterable[int] | None = None) -> "ErasureModel":
        """Physically degraded subchannel: receptions are nested along `order`
        (strongest destination first), so the receiver set is always a prefix.
        Marginals must be nondecreasing along the order; by default the order
        sorts destinations from strongest to weakest."""
        probs = [parse_probability(e) for e in eps]
        k = len(probs)
        if order is None:
            order = sorted(range(1, k + 1), key=lambda j: (probs[j - 1], j))
        order = [int(j) for j in order]
        if sorted(order) != list(range(1, k + 1)):
            raise ValueError(f"{order} is not a permutation of 1..{k}")
        chain = [probs[j - 1] for j in order]
        if any(chain[i] > chain[i + 1] for i in range(k - 1)):
            raise ValueError("marginal erasures must be nondecreasing along the degradation order")
        p: dict[frozenset[int], Fraction] = {}
        if chain[0] != 0:
            p[frozenset()] = chain[0]
        prefix: list[int] = []
        for idx in range(k):
            prefix.append(order[idx])
            hi = chain[idx + 1] if idx + 1 < k else ONE
            mass = hi - chain[idx]
            if mass != 0:
                p[frozenset(prefix)] = mass
        return cls.joint(p, k)

    @classmethod
    def joint(cls, p: Mapping, k: int) -> "ErasureModel":
        """Build from a reception-subset distribution {S: prob}."""
        if k < 1:
            raise ValueError("k must be >= 1")
        entries: dict[frozenset[int], Fraction] = {}
        for subset, prob in p.items():
            s = frozenset(subset) if not isinstance(subset, str) else parse_subset_key(subset)
            if any(j < 1 or j > k for j in s):
                raise ValueError(f"subset {sorted(s)} not within 1..{k}")
            q = parse_probability(prob)
            entries[s] = entries.get(s, Fraction(0)) + q
        total = sum(entries.values(), Fraction(0))
        if total != 1:
            raise ValueError(f"joint reception probabilities sum to {total}, expected 1")
        table = tuple(sorted(
            ((s, q) for s, q in entries.items() if q != 0),
            key=lambda item: (len(item[0]), sorted(item[0])),
        ))
        return cls(kind="joint", k=k, table=table)

    def non_reception(self, subset: Iterable[int]) -> Fraction:
        """Probability that no destination in `subset` receives the packet."""
        s = frozenset(subset)
        if any(j < 1 or j > self.k for j in s):
            raise IndexError(f"destination subset {sorted(s)} out of range 1..{self.k}")
        if not s:
            return ONE
        if self.kind == "independent":
            prod = ONE
            for j in s:
                prod *= self.eps[j - 1]
            return prod
        if self.kind == "identical":
            return self.eps_all
        return sum((q for rec, q in self.table if not (rec & s)), Fraction(0))

    def marginal(self, j: int) -> Fraction:
        return self.non_reception({j})

    def to_joint(self) -> "ErasureModel":
        """Lossless conversion to an explicit joint model."""
        if self.kind == "joint":
            return self
        if self.kind == "identical":
            full = frozenset(range(1, self.k + 1))
            return ErasureModel.joint({full: ONE - self.eps_all, frozenset(): self.eps_all}, self.k)
        p: dict[frozenset[int], Fraction] = {}
        dests = range(1, self.k + 1)
        for r in range(self.k + 1):
            for rec in combinations(dests, r):
                prob = ONE
                for j in dests:
                    prob *= (ONE - self.eps[j - 1]) if j in rec else self.eps[j - 1]
                if prob != 0:
                    p[frozenset(rec)] = prob
        return ErasureModel.joint(p, self.k)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Sample reception indicators; returns a boolean (n, k) array."""
        if self.kind == "independent":
            thresholds = np.array([float(e) for e in self.eps])
            return rng.random((n, self.k)) >= thresholds
        if self.kind == "identical":
            hit = rng.random(n) >= float(self.eps_all)
            return np.repeat(hit[:, None], self.k, axis=1)
        cum = np.cumsum([float(q) for _, q in self.table])
        cum[-1] = 1.0
        idx = np.searchsorted(cum, rng.random(n), side="right")
        idx = np.minimum(idx, len(self.table) - 1)
        masks = np.zeros((len(self.table), self.k), dtype=bool)
        for row, (rec, _) in enumerate(self.table):
            for j in rec:
                masks[row, j - 1] = True
        return masks[idx]

    def to_obj(self):
        if self.kind == "independent":
            return {"model": "independent", "eps": [fmt_rational(e) for e in self.eps]}
        if self.kind == "identical":
            return {"model": "identical", "eps": fmt_rational(self.eps_all)}
        return {"model": "joint",
                "p": {subset_key(s): fmt_rational(q) for s, q in self.table}}

    @classmethod
    def from_obj(cls, obj, k: int) -> "ErasureModel":
        kind = obj.get("model")
        if kind == "independent":
            model = cls.independent(obj["eps"])
            if model.k != k:
                raise ValueError(f"independent model has {model.k} links, channel has k={k}")
            return model
        if kind == "identical":
            return cls.identical(obj["eps"], k)
        if kind == "joint":
            return cls.joint(obj["p"], k)
        raise ValueError(f"unknown erasure model kind {kind!r}")


@dataclass(frozen=True)
class MultiInputPEC:
    """M parallel broadcast erasure subchannels to a common destination set."""

    k: int
    subchannels: tuple[ErasureModel, ...]

    def __init__(self, k: int, subchannels: Iterable[ErasureModel], k_cap: int = DEFAULT_K_CAP):
        subs = tuple(subchannels)
        if k < 1:
            raise ValueError("channel needs k >= 1 destinations")
        if k > k_cap:
            raise ValueError(f"k={k} exceeds the configured cap {k_cap}")
        if not subs:
            raise ValueError("channel needs at least one subchannel")
        for idx, model in enumerate(subs, start=1):
            if model.k != k:
                raise ValueError(f"subchannel {idx} is over {model.k} destinations, channel has k={k}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "subchannels", subs)

    @property
    def m(self) -> int:
        return len(self.subchannels)

    def _subchannel(self, i: int) -> ErasureModel:
        if not 1 <= i <= self.m:
            raise IndexError(f"subchannel index {i} out of range 1..{self.m}")
        return self.subchannels[i - 1]

    def joint_non_reception(self, i: int, subset: Iterable[int]) -> Fraction:
        """P(no destination in `subset` receives subchannel i's packet)."""
        return self._subchannel(i).non_reception(subset)

    def marginal_erasure(self, i: int, j: int) -> Fraction:
        """Erasure probability of the link from subchannel i to destination j."""
        return self._subchannel(i).marginal(j)

    def sample_slot(self, rng: np.random.Generator) -> ReceptionOutcome:
        """Sample one slot; subchannels draw independently."""
        outcome = []
        for model in self.subchannels:
            row = model.sample(rng, 1)[0]
            outcome.append(frozenset(j + 1 for j in np.flatnonzero(row)))
        return tuple(outcome)

    def sample_slots(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Sample n slots at once; returns a boolean (n, M, K) array."""
        out = np.empty((n, self.m, self.k), dtype=bool)
        for i, model in enumerate(self.subchannels):
            out[:, i, :] = model.sample(rng, n)
        return out

    def to_obj(self):
        return {"k": self.k, "subchannels": [m.to_obj() for m in self.subchannels]}

    def to_json(self) -> str:
        return canonical_json(self.to_obj())

    @classmethod
    def from_obj(cls, obj, k_cap: int = DEFAULT_K_CAP) -> "MultiInputPEC":
        try:
            k = int(obj["k"])
            subs = obj["subchannels"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"channel spec missing field: {exc}") from exc
        return cls(k, (ErasureModel.from_obj(s, k) for s in subs), k_cap=k_cap)


def trial_rng(seed: int, trial: int = 0) -> np.random.Generator:
    """Independent per-trial stream; results do not depend on scheduling."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))
