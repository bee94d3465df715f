import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ponavail.model import (
    TABLE_I,
    AvailabilityTable,
    Fiber,
    FiberRole,
    Node,
    NodeKind,
    PonTree,
    component_availability,
    fiber_availability_from_length,
    validate,
)

from .trees import ARN, OLT, ONU, PRN, chain, fig5


def test_table_defaults():
    t = AvailabilityTable()
    assert t.olt == 0.9999485
    assert t.onu == 0.9999645
    assert t.passive_rn == 0.9999987
    assert t.active_rn == 0.9999485
    assert t.fiber_per_km == 0.9999429
    assert t.feeder_fiber == 0.999429
    assert t.distribution_fiber == 0.999829
    assert t.last_mile_fiber == 0.99996


@pytest.mark.parametrize("bad", [0.0, -0.1, 1.0000001, float("nan")])
def test_table_rejects_out_of_range(bad):
    with pytest.raises(ValueError):
        AvailabilityTable(olt=bad)


def test_table_overrides():
    t = AvailabilityTable.from_mapping({"active_rn": 0.9999})
    assert t.active_rn == 0.9999 and t.olt == TABLE_I.olt
    with pytest.raises(ValueError, match="unknown"):
        AvailabilityTable.from_mapping({"splitter": 0.5})


@pytest.mark.parametrize(
    "kind, ic, expected",
    [
        (NodeKind.OLT, False, 0.9999485),
        (NodeKind.PASSIVE_RN, False, 0.9999987),
        (NodeKind.ACTIVE_RN, False, 0.9999485),
        (NodeKind.ONU, True, 0.9999645),
        (NodeKind.ONU, False, 0.9999645),
    ],
)
def test_component_availability(kind, ic, expected):
    assert component_availability(kind, TABLE_I) == expected
    assert Node(0, kind, ic, component_availability(kind)).availability == expected


def test_component_availability_total():
    for kind in NodeKind:
        assert 0.0 < component_availability(kind, TABLE_I) <= 1.0


@pytest.mark.parametrize(
    "length, expected",
    [(10, 0.999429), (3, 0.999829), (0.7, 0.99996)],
)
def test_fiber_from_length_matches_table(length, expected):
    assert fiber_availability_from_length(length, 0.9999429) == pytest.approx(expected, abs=1e-6)


def test_fiber_zero_length():
    assert fiber_availability_from_length(0, 0.9999429) == 1.0


def test_fiber_negative_length():
    with pytest.raises(ValueError):
        fiber_availability_from_length(-1, 0.9999429)


@given(st.floats(0, 50), st.floats(0, 50), st.floats(0.9, 1.0, exclude_min=True))
def test_fiber_length_multiplicative(a, b, per_km):
    whole = fiber_availability_from_length(a + b, per_km)
    parts = fiber_availability_from_length(a, per_km) * fiber_availability_from_length(b, per_km)
    assert math.isclose(whole, parts, rel_tol=0, abs_tol=1e-12)


def test_minimal_chain_is_valid():
    tree = chain()
    assert validate(tree).ok
    assert [f.role for f in tree.fibers] == [FiberRole.FEEDER, FiberRole.LAST_MILE]
    assert tree.root == 0


def test_two_olt_children_is_root_fanout():
    tree = PonTree.build([OLT, PRN, PRN, ONU, ONU], [None, 0, 0, 1, 2])
    assert "root fan-out" in validate(tree).rules()


def test_mislabeled_fiber_role():
    nodes = [Node(0, OLT), Node(1, PRN), Node(2, ONU)]
    fibers = [Fiber(1, 0, FiberRole.FEEDER), Fiber(2, 1, FiberRole.FEEDER)]
    report = validate(PonTree(nodes, fibers))
    assert not report.ok
    assert report.rules() == {"fiber role"}


def test_leaf_rn_and_onu_with_children():
    tree = PonTree.build([OLT, PRN, ONU, PRN], [None, 0, 1, 1])
    assert "leaf kind" in validate(tree).rules()
    nodes = [Node(0, OLT), Node(1, PRN), Node(2, ONU), Node(3, ONU)]
    fibers = [Fiber(1, 0, FiberRole.FEEDER), Fiber(2, 1, FiberRole.LAST_MILE), Fiber(3, 2, FiberRole.LAST_MILE)]
    assert "leaf kind" in validate(PonTree(nodes, fibers)).rules()


def test_root_must_be_olt():
    nodes = [Node(0, PRN), Node(1, ONU)]
    assert "root kind" in validate(PonTree(nodes, [Fiber(1, 0, FiberRole.LAST_MILE)])).rules()


def test_forest_reports_root_count():
    nodes = [Node(0, OLT), Node(1, PRN), Node(2, ONU), Node(3, ONU)]
    fibers = [Fiber(1, 0, FiberRole.FEEDER), Fiber(2, 1, FiberRole.LAST_MILE)]
    rules = validate(PonTree(nodes, fibers)).rules()
    assert {"root count", "fiber count"} <= rules


def test_constructor_rejects_structural_garbage():
    with pytest.raises(ValueError, match="duplicate"):
        PonTree([Node(0, OLT), Node(0, PRN)], [])
    with pytest.raises(ValueError, match="unknown node"):
        PonTree([Node(0, OLT)], [Fiber(1, 0, FiberRole.FEEDER)])
    with pytest.raises(ValueError, match="more than one upstream"):
        PonTree([Node(0, OLT), Node(1, PRN)], [Fiber(1, 0, FiberRole.FEEDER), Fiber(1, 0, FiberRole.FEEDER)])


def test_build_derives_availabilities():
    tree = fig5()
    for n in tree.nodes:
        assert n.availability == component_availability(n.kind)
    roles = {f.child: f.role for f in tree.fibers}
    assert roles[1] is FiberRole.FEEDER
    assert roles[2] is FiberRole.DISTRIBUTION
    assert roles[7] is FiberRole.LAST_MILE
    assert tree.up_fiber(2).availability == TABLE_I.distribution_fiber


def test_adjacency():
    tree = fig5()
    assert tree.parent(0) is None
    assert tree.parent(3) == 2
    assert tree.children(3) == (4, 7)
    assert tree.neighbors(3) == (2, 4, 7)
    assert tree.link(2, 3) == tree.link(3, 2) == tree.up_fiber(3)
    with pytest.raises(KeyError):
        tree.link(1, 3)
    assert tree.path_to_root(8) == [8, 4, 3, 2, 1, 0]
    assert tree.rn_depth(8) == 4


def test_immutable():
    tree = chain()
    with pytest.raises(AttributeError):
        tree.root = 5


def test_json_round_trip():
    tree = fig5()
    again = PonTree.from_json(tree.to_json())
    assert again == tree
    data = json.loads(tree.to_json())
    assert data["nodes"][0] == {"id": 0, "kind": "olt"}
    assert data["nodes"][6] == {"id": 6, "kind": "onu", "ic": True}
    assert {"child": 1, "parent": 0, "role": "feeder"} in data["fibers"]
    assert "availability" not in json.dumps(data)


def test_json_reload_uses_given_table():
    table = AvailabilityTable.from_mapping({"onu": 0.5})
    tree = PonTree.from_json(chain().to_json(), table)
    assert tree.node(2).availability == 0.5


@pytest.mark.parametrize(
    "doc, match",
    [
        ({"nodes": []}, "nodes"),
        ({"nodes": [{"id": 0, "kind": "hub"}], "fibers": []}, "nodes\\[0\\]"),
        ({"nodes": [{"id": 0, "kind": "olt"}], "fibers": [{"child": 0}]}, "fibers\\[0\\]"),
    ],
)
def test_json_errors(doc, match):
    with pytest.raises(ValueError, match=match):
        PonTree.from_dict(doc)


def test_with_table_keeps_structure():
    tree = fig5()
    other = tree.with_table(AvailabilityTable.perfect())
    assert other.structure() == tree.structure()
    assert all(n.availability == 1.0 for n in other.nodes)


def test_arn_between_rns_is_distribution():
    tree = PonTree.build([OLT, PRN, ARN, ONU], [None, 0, 1, 2])
    assert tree.up_fiber(2).role is FiberRole.DISTRIBUTION
    assert validate(tree).ok
