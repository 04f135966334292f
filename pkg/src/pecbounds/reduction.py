"""Cut-based reduction of packet erasure relay networks to multi-input PECs.

Given a directed erasure graph, a receiver-side node set A (source outside),
and a frontier subset W_A, the reduction peels off cut-side nodes fed
entirely through W_A, merges the surviving cut-side structure into fully
cooperating super sinks, and splits every frontier transmitter into a fully
correlated part (its peeled edges) and an independent part (its remaining
cut edges). The result is a multi-input broadcast PEC whose outer bound,
written in aggregate rate variables, bounds the network rates into A.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .bounds import (DEFAULT_TUPLE_CAP, degraded_region, enumerate_tuples,
                     make_row, rate_var, weighted_split_rows)
from .channels import ErasureModel, MultiInputPEC
from .errors import InputError
from .jsonio import canonical_json
from .lp import ConstraintSystem
from .rational import fmt_rational, parse_probability

ONE = Fraction(1)


@dataclass(frozen=True)
class GraphNode:
    id: str
    kind: str                      # source | relay | dest
    dest_index: int | None = None


@dataclass(frozen=True)
class GraphEdge:
    frm: str
    to: str
    eps: Fraction


class RelayGraph:
    """Directed erasure graph with one source and destinations t_1..t_K."""

    def __init__(self, nodes: Iterable[GraphNode], edges: Iterable[GraphEdge]):
        self.nodes = list(nodes)
        self.edges = list(edges)
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate node ids")
        self.by_id = {n.id: n for n in self.nodes}
        self.order = {n.id: idx for idx, n in enumerate(self.nodes)}
        sources = [n for n in self.nodes if n.kind == "source"]
        if len(sources) != 1:
            raise InputError(f"graph needs exactly one source, found {len(sources)}")
        self.source = sources[0].id
        dest_indices = sorted(n.dest_index for n in self.nodes if n.kind == "dest")
        if any(n.kind == "dest" and not n.dest_index for n in self.nodes):
            raise InputError("every destination needs a positive dest_index")
        if any(n.kind != "dest" and n.dest_index is not None for n in self.nodes):
            raise InputError("dest_index is only allowed on destinations")
        if dest_indices != list(range(1, len(dest_indices) + 1)):
            raise InputError(f"destination indices must be 1..K, got {dest_indices}")
        self.k = len(dest_indices)
        seen = set()
        for e in self.edges:
            if e.frm not in self.by_id or e.to not in self.by_id:
                raise InputError(f"edge ({e.frm}, {e.to}) references unknown node")
            if e.frm == e.to:
                raise InputError(f"self-loop at {e.frm}")
            if (e.frm, e.to) in seen:
                raise InputError(f"duplicate edge ({e.frm}, {e.to})")
            seen.add((e.frm, e.to))

    def dest_index(self, node_id: str) -> int | None:
        return self.by_id[node_id].dest_index

    def to_obj(self):
        nodes = []
        for n in self.nodes:
            obj = {"id": n.id, "kind": n.kind}
            if n.dest_index is not None:
                obj["dest_index"] = n.dest_index
            nodes.append(obj)
        return {"nodes": nodes,
                "edges": [{"from": e.frm, "to": e.to, "eps": fmt_rational(e.eps)}
                          for e in self.edges]}

    @classmethod
    def from_obj(cls, obj) -> "RelayGraph":
        try:
            nodes = [GraphNode(id=str(n["id"]), kind=str(n["kind"]),
                               dest_index=(int(n["dest_index"]) if "dest_index" in n else None))
                     for n in obj["nodes"]]
            edges = [GraphEdge(frm=str(e["from"]), to=str(e["to"]),
                               eps=parse_probability(e["eps"]))
                     for e in obj["edges"]]
        except (KeyError, TypeError) as exc:
            raise InputError(f"graph spec missing field: {exc}") from exc
        return cls(nodes, edges)


@dataclass(frozen=True)
class CutSpec:
    a: frozenset[str]
    w: frozenset[str]

    @classmethod
    def from_obj(cls, obj) -> "CutSpec":
        try:
            return cls(a=frozenset(str(x) for x in obj["A"]),
                       w=frozenset(str(x) for x in obj["W_A"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"cut spec missing field: {exc}") from exc

    def to_obj(self):
        return {"A": sorted(self.a), "W_A": sorted(self.w)}


def edge_cut(graph: RelayGraph, cut: CutSpec) -> list[GraphEdge]:
    """Edges entering A from outside, in edge declaration order."""
    return [e for e in graph.edges if e.frm not in cut.a and e.to in cut.a]


def frontier(graph: RelayGraph, cut: CutSpec) -> list[str]:
    """Tails of the cut edges, in node declaration order."""
    tails = {e.frm for e in edge_cut(graph, cut)}
    return [n.id for n in graph.nodes if n.id in tails]


def validate_cut(graph: RelayGraph, cut: CutSpec) -> None:
    unknown = (cut.a | cut.w) - set(graph.by_id)
    if unknown:
        raise InputError(f"cut references unknown nodes {sorted(unknown)}")
    if graph.source in cut.a:
        raise InputError("the cut-side set A must not contain the source")
    extra = cut.w - set(frontier(graph, cut))
    if extra:
        raise InputError(f"W_A must be a subset of the cut frontier; {sorted(extra)} are not")


@dataclass
class CutPeel:
    """Fixed point of the peeling sweep over the cut side."""
    promoted_edges: list[GraphEdge]        # edges rerouted into the correlated pipe
    freed_dests: list[str]                 # destinations peeled out as single sinks
    survivors: set[str]
    residual_edges: list[GraphEdge]
    passes: int


def peel_cut(graph: RelayGraph, cut: CutSpec) -> CutPeel:
    """Iteratively remove cut-side nodes: a node fed entirely from W_A hands
    its incoming edges to the correlated pipe; a node with no incoming edges
    is dropped. Destinations removed either way become standalone sinks.
    Edge tests use the full residual edge set, cut edges included."""
    validate_cut(graph, cut)
    alive = set(cut.a)
    edges = list(graph.edges)
    promoted: list[GraphEdge] = []
    freed: list[str] = []
    sweep = sorted(cut.a)
    passes = 0
    changed = True
    while changed:
        changed = False
        passes += 1
        for w in sweep:
            if w not in alive:
                continue
            incoming = [e for e in edges if e.to == w]
            if incoming and all(e.frm in cut.w for e in incoming):
                promoted.extend(incoming)
                if graph.by_id[w].kind == "dest":
                    freed.append(w)
                edges = [e for e in edges if e.to != w and e.frm != w]
                alive.discard(w)
                changed = True
        for w in sweep:
            if w not in alive:
                continue
            if not any(e.to == w for e in edges):
                if graph.by_id[w].kind == "dest":
                    freed.append(w)
                edges = [e for e in edges if e.frm != w]
                alive.discard(w)
                changed = True
    freed.sort(key=graph.order.get)
    return CutPeel(promoted_edges=promoted, freed_dests=freed,
                   survivors=alive, residual_edges=edges, passes=passes)


def destination_components(graph: RelayGraph, peel: CutPeel) -> list[list[str]]:
    """Undirected components of the surviving cut side that contain at least
    one destination, each a future fully cooperating super sink."""
    adj: dict[str, set[str]] = {v: set() for v in peel.survivors}
    for e in peel.residual_edges:
        if e.frm in peel.survivors and e.to in peel.survivors:
            adj[e.frm].add(e.to)
            adj[e.to].add(e.frm)
    seen: set[str] = set()
    comps: list[list[str]] = []
    for start in sorted(peel.survivors, key=graph.order.get):
        if start in seen:
            continue
        stack, comp = [start], []
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        if any(graph.by_id[v].kind == "dest" for v in comp):
            comps.append(sorted(comp, key=graph.order.get))
    comps.sort(key=lambda c: graph.order[c[0]])
    return comps


@dataclass(frozen=True)
class Sink:
    kind: str                     # dest | super
    rates: tuple[int, ...]        # destination indices this sink aggregates
    nodes: tuple[str, ...]


@dataclass
class ReductionResult:
    channel: MultiInputPEC | None
    sinks: list[Sink]
    provenance: list[dict]
    peel: CutPeel
    components: list[list[str]]
    assumptions: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.sinks)

    def to_obj(self):
        return {
            "channel": self.channel.to_obj() if self.channel else None,
            "q_mapping": [
                {"sink": idx, "kind": s.kind, "rates": list(s.rates), "nodes": list(s.nodes)}
                for idx, s in enumerate(self.sinks, start=1)
            ],
            "promoted_edges": [[e.frm, e.to] for e in self.peel.promoted_edges],
            "freed_destinations": list(self.peel.freed_dests),
            "components": [list(c) for c in self.components],
            "provenance": self.provenance,
            "assumptions": list(self.assumptions),
        }

    def to_json(self) -> str:
        return canonical_json(self.to_obj())


def build_reduced_channel(graph: RelayGraph, cut: CutSpec, peel: CutPeel,
                          comps: list[list[str]]) -> ReductionResult:
    """Split each frontier transmitter into a fully correlated subchannel
    (its promoted edges, one shared erasure event) and an independent
    subchannel (its remaining cut edges, one product erasure per super sink)."""
    sinks: list[Sink] = [Sink("dest", (graph.dest_index(v),), (v,))
                         for v in peel.freed_dests]
    for comp in comps:
        rates = tuple(sorted(graph.dest_index(v) for v in comp
                             if graph.by_id[v].kind == "dest"))
        sinks.append(Sink("super", rates, tuple(comp)))
    n = len(sinks)

    cut_edges = edge_cut(graph, cut)
    promoted = {(e.frm, e.to) for e in peel.promoted_edges}
    subchannels: list[ErasureModel] = []
    provenance: list[dict] = []
    for v in frontier(graph, cut):
        mine = [e for e in cut_edges if e.frm == v]
        correlated = [e for e in mine if (e.frm, e.to) in promoted]
        free = [e for e in mine if (e.frm, e.to) not in promoted]
        if correlated and n:
            eps = ONE
            for e in correlated:
                eps *= e.eps
            subchannels.append(ErasureModel.identical(eps, n))
            provenance.append({
                "transmitter": v,
                "part": "correlated",
                "eps": fmt_rational(eps),
                "edges": [[e.frm, e.to] for e in correlated],
            })
        if free and n:
            eps_per_sink = []
            links = []
            for idx, sink in enumerate(sinks, start=1):
                if sink.kind != "super":
                    eps_per_sink.append(ONE)   # independent part feeds super sinks only
                    continue
                members = set(sink.nodes)
                contributing = [e for e in free if e.to in members]
                eps = ONE
                for e in contributing:
                    eps *= e.eps
                eps_per_sink.append(eps)
                if contributing:
                    links.append({"sink": idx, "eps": fmt_rational(eps),
                                  "edges": [[e.frm, e.to] for e in contributing]})
            if any(e != 1 for e in eps_per_sink):
                subchannels.append(ErasureModel.independent(eps_per_sink))
                provenance.append({"transmitter": v, "part": "independent",
                                   "links": links})
    channel = MultiInputPEC(n, subchannels, k_cap=max(n, 8)) if subchannels else None
    assumptions = []
    if any(p["part"] == "independent" for p in provenance):
        assumptions.append(
            "links of an independent-part transmitter to different super sinks "
            "are modeled as mutually independent")
    return ReductionResult(channel=channel, sinks=sinks, provenance=provenance,
                           peel=peel, components=comps, assumptions=assumptions)


def reduce_cut(graph: RelayGraph, cut: CutSpec) -> ReductionResult:
    """Full pipeline: peel, find super sinks, split the frontier transmitters."""
    peel = peel_cut(graph, cut)
    comps = destination_components(graph, peel)
    return build_reduced_channel(graph, cut, peel, comps)


def network_rate_bound(graph: RelayGraph, cut: CutSpec,
                       tuple_cap: int = DEFAULT_TUPLE_CAP) -> tuple[ConstraintSystem, ReductionResult]:
    """Outer bound on the rates of the destinations inside A, as one system
    over R[j]: the reduced channel's outer-bound systems with each sink's
    aggregate rate replaced by the destination rates it collects."""
    result = reduce_cut(graph, cut)
    j_a = sorted(graph.dest_index(v) for v in cut.a if graph.by_id[v].kind == "dest")
    variables = [rate_var(j) for j in j_a]
    if result.channel is None:
        system = ConstraintSystem(variables)
        for j in j_a:
            system.add_row({rate_var(j): 1}, "=", 0)
        return system, result

    channel = result.channel
    seen = set()
    distinct = []
    for tup in enumerate_tuples(channel, tuple_cap=tuple_cap):
        key = degraded_region(channel, tup).canonical_key()
        if key not in seen:
            seen.add(key)
            distinct.append(tup)

    rows = []
    for t, tup in enumerate(distinct):
        tag = f"#{t}"

        def name(i, k, _tag=tag):
            return f"Q[{i}][{k}]{_tag}"

        for i in range(1, channel.m + 1):
            row, pins = weighted_split_rows(channel, i, tup[i - 1], name=name)
            if row is not None:
                rows.append(row)
            rows.extend(pins)
        for idx, sink in enumerate(result.sinks, start=1):
            coeffs = {rate_var(j): Fraction(1) for j in sink.rates}
            for i in range(1, channel.m + 1):
                coeffs[name(i, idx)] = Fraction(-1)
            rows.append(make_row(coeffs, "=", 0))
        variables += [name(i, idx) for i in range(1, channel.m + 1)
                      for idx in range(1, result.n + 1)]
    system = ConstraintSystem(variables, rows)
    return system, result
