import random
from fractions import Fraction as F
from pathlib import Path

import pytest

from pecbounds.bounds import rate_var
from pecbounds.errors import InputError
from pecbounds.lp import maximize
from pecbounds.reduction import (CutSpec, RelayGraph, destination_components,
                                 network_rate_bound, peel_cut, reduce_cut)

DATA = Path(__file__).resolve().parent.parent / "data"


def load_diamond():
    import json
    graph = RelayGraph.from_obj(json.loads((DATA / "relay_diamond.json").read_text()))
    cut = CutSpec.from_obj(json.loads((DATA / "relay_diamond_cut.json").read_text()))
    return graph, cut


def simple_graph(nodes, edges):
    return RelayGraph.from_obj({
        "nodes": [{"id": n, "kind": kind, **({"dest_index": di} if di else {})}
                  for n, kind, di in nodes],
        "edges": [{"from": a, "to": b, "eps": e} for a, b, e in edges],
    })


class TestPeel:
    def test_diamond_trace(self):
        graph, cut = load_diamond()
        peel = peel_cut(graph, cut)
        assert [(e.frm, e.to) for e in peel.promoted_edges] == [("rb", "rd")]
        assert peel.freed_dests == []
        assert peel.survivors == {"t1", "t2"}
        assert peel.passes <= len(cut.a) + 1

    def test_isolated_destination_freed(self):
        g = simple_graph([("s", "source", None), ("t1", "dest", 1)], [])
        peel = peel_cut(g, CutSpec(frozenset({"t1"}), frozenset()))
        assert peel.freed_dests == ["t1"] and not peel.survivors

    def test_chain_nothing_deleted(self):
        g = simple_graph(
            [("s", "source", None), ("a", "relay", None), ("t1", "dest", 1)],
            [("s", "a", "3/10"), ("a", "t1", "1/5")])
        cut = CutSpec(frozenset({"a", "t1"}), frozenset())
        peel = peel_cut(g, cut)
        assert peel.survivors == {"a", "t1"} and not peel.promoted_edges
        comps = destination_components(g, peel)
        assert comps == [["a", "t1"]]

    def test_cascading_deletions(self):
        # feeding chain entirely behind W_A collapses pass by pass
        g = simple_graph(
            [("s", "source", None), ("w", "relay", None),
             ("x", "relay", None), ("t1", "dest", 1)],
            [("s", "w", "0"), ("w", "x", "1/3"), ("x", "t1", "1/4")])
        cut = CutSpec(frozenset({"x", "t1"}), frozenset({"w"}))
        peel = peel_cut(g, cut)
        # x is fed only from W_A -> its edge is promoted, then t1 loses its feed
        assert [(e.frm, e.to) for e in peel.promoted_edges] == [("w", "x")]
        assert peel.freed_dests == ["t1"]
        assert not peel.survivors

    def test_relay_only_component_dropped(self):
        g = simple_graph(
            [("s", "source", None), ("v", "relay", None),
             ("x", "relay", None), ("t1", "dest", 1)],
            [("s", "v", "0"), ("v", "x", "1/2"), ("s", "t1", "1/3")])
        cut = CutSpec(frozenset({"x"}), frozenset())
        peel = peel_cut(g, cut)
        assert peel.survivors == {"x"}
        assert destination_components(g, peel) == []
        result = reduce_cut(g, cut)
        assert result.channel is None and result.sinks == []


class TestReduce:
    def test_diamond_reproduces_mixed_pair(self):
        graph, cut = load_diamond()
        result = reduce_cut(graph, cut)
        expected = (DATA / "channel_mixed_pair.json").read_text()
        assert result.channel.to_json() == expected
        assert [(s.kind, s.rates) for s in result.sinks] == [("super", (1,)), ("super", (2,))]

    def test_star_no_promotion(self):
        g = simple_graph(
            [("s", "source", None), ("t1", "dest", 1), ("t2", "dest", 2)],
            [("s", "t1", "3/10"), ("s", "t2", "3/5")])
        result = reduce_cut(g, CutSpec(frozenset({"t1", "t2"}), frozenset()))
        assert result.channel.to_obj() == {
            "k": 2,
            "subchannels": [{"model": "independent", "eps": ["3/10", "3/5"]}],
        }

    def test_chain_super_node(self):
        g = simple_graph(
            [("s", "source", None), ("a", "relay", None), ("t1", "dest", 1)],
            [("s", "a", "3/10"), ("a", "t1", "1/5")])
        result = reduce_cut(g, CutSpec(frozenset({"a", "t1"}), frozenset()))
        assert result.channel.to_obj() == {
            "k": 1, "subchannels": [{"model": "independent", "eps": ["3/10"]}]}
        assert result.sinks[0].nodes == ("a", "t1")

    def test_empty_cut_edges(self):
        g = simple_graph([("s", "source", None), ("t1", "dest", 1)], [])
        result = reduce_cut(g, CutSpec(frozenset({"t1"}), frozenset()))
        assert result.channel is None
        assert [(s.kind, s.rates) for s in result.sinks] == [("dest", (1,))]

    def test_destination_partition(self):
        rng = random.Random(19)
        for _ in range(30):
            g, cut = random_instance(rng)
            result = reduce_cut(g, cut)
            j_a = sorted(g.dest_index(v) for v in cut.a if g.by_id[v].kind == "dest")
            covered = sorted(j for s in result.sinks for j in s.rates)
            assert covered == j_a


class TestNetworkBound:
    def test_diamond_sum_bound(self):
        graph, cut = load_diamond()
        system, _ = network_rate_bound(graph, cut)
        sol = maximize(system, {rate_var(1): 1, rate_var(2): 1})
        assert sol.value == F(18, 25)

    def test_point_to_point(self):
        g = simple_graph([("s", "source", None), ("t1", "dest", 1)],
                         [("s", "t1", "2/7")])
        system, _ = network_rate_bound(g, CutSpec(frozenset({"t1"}), frozenset()))
        assert maximize(system, {rate_var(1): 1}).value == F(5, 7)

    def test_merged_destinations_single_aggregate(self):
        # both destinations inside one surviving component: the reduced
        # channel has one sink and the bound constrains R1+R2 jointly
        g = simple_graph(
            [("s", "source", None), ("x", "relay", None),
             ("t1", "dest", 1), ("t2", "dest", 2)],
            [("s", "x", "1/4"), ("x", "t1", "0"), ("x", "t2", "0")])
        cut = CutSpec(frozenset({"x", "t1", "t2"}), frozenset())
        result = reduce_cut(g, cut)
        assert [(s.kind, s.rates) for s in result.sinks] == [("super", (1, 2))]
        system, _ = network_rate_bound(g, cut)
        assert maximize(system, {rate_var(1): 1, rate_var(2): 1}).value == F(3, 4)
        assert maximize(system, {rate_var(1): 1}).value == F(3, 4)

    def test_empty_cut_zero_rates(self):
        g = simple_graph([("s", "source", None), ("t1", "dest", 1)], [])
        system, _ = network_rate_bound(g, CutSpec(frozenset({"t1"}), frozenset()))
        assert maximize(system, {rate_var(1): 1}).value == 0


def random_instance(rng):
    """Small random layered graph plus a valid random cut."""
    n_relays = rng.randint(1, 3)
    n_dests = rng.randint(1, 2)
    nodes = [("s", "source", None)]
    nodes += [(f"r{i}", "relay", None) for i in range(n_relays)]
    nodes += [(f"t{j}", "dest", j) for j in range(1, n_dests + 1)]
    edges = []
    ids = [n[0] for n in nodes]
    for a in ids:
        for b in ids:
            if a == b or b == "s" or a.startswith("t"):
                continue
            if rng.random() < 0.55:
                edges.append((a, b, F(rng.randint(0, 4), 5)))
    g = simple_graph(nodes, edges)
    pool = [n for n in ids if n != "s"]
    cut_nodes = {n for n in pool if rng.random() < 0.6} or {pool[-1]}
    cut_nodes |= {f"t{j}" for j in range(1, n_dests + 1) if rng.random() < 0.7}
    tails = {e.frm for e in g.edges if e.frm not in cut_nodes and e.to in cut_nodes}
    w = frozenset(v for v in tails if rng.random() < 0.5)
    return g, CutSpec(frozenset(cut_nodes), w)


def test_lowering_erasure_never_shrinks_the_bound():
    rng = random.Random(29)
    checked = 0
    while checked < 15:
        g, cut = random_instance(rng)
        result = reduce_cut(g, cut)
        if result.channel is None or not g.edges:
            continue
        system, _ = network_rate_bound(g, cut)
        objective = {v: 1 for v in system.variables if v.startswith("R[")
                     and v.count("[") == 1}
        if not objective:
            continue
        before = maximize(system, objective).value
        idx = rng.randrange(len(g.edges))
        edges2 = [(e.frm, e.to, e.eps if i != idx else e.eps / 2)
                  for i, e in enumerate(g.edges)]
        g2 = simple_graph([(n.id, n.kind, n.dest_index) for n in g.nodes], edges2)
        system2, _ = network_rate_bound(g2, cut)
        after = maximize(system2, objective).value
        assert after >= before
        checked += 1


def test_cut_validation():
    g = simple_graph([("s", "source", None), ("t1", "dest", 1)],
                     [("s", "t1", "1/2")])
    with pytest.raises(InputError):
        peel_cut(g, CutSpec(frozenset({"s", "t1"}), frozenset()))
    with pytest.raises(InputError):
        peel_cut(g, CutSpec(frozenset({"t1"}), frozenset({"t1"})))
    with pytest.raises(InputError):
        peel_cut(g, CutSpec(frozenset({"nope"}), frozenset()))


def test_graph_validation():
    with pytest.raises(InputError):
        simple_graph([("a", "relay", None)], [])                    # no source
    with pytest.raises(InputError):
        simple_graph([("s", "source", None), ("t", "dest", 2)], []) # gap in indices
    with pytest.raises(InputError):
        simple_graph([("s", "source", None), ("t", "dest", 1)],
                     [("s", "t", "1/2"), ("s", "t", "1/3")])        # duplicate edge
    with pytest.raises(InputError):
        simple_graph([("s", "source", None), ("t", "dest", 1)],
                     [("s", "s", "1/2")])                           # self-loop


def test_reduction_output_deterministic():
    graph, cut = load_diamond()
    assert reduce_cut(graph, cut).to_json() == reduce_cut(graph, cut).to_json()
