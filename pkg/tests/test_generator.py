import math

import numpy as np
import pytest

from ponavail.analytic import expected_onu_count, expected_stage_counts
from ponavail.generator import GeneratorParams, Scenario, generate, onu_census
from ponavail.model import FiberRole, NodeKind, validate


def rn_kinds_by_stage(tree):
    out = {}
    for n in tree.nodes:
        if n.kind.is_rn:
            out.setdefault(tree.rn_depth(n.id) + 1, set()).add(n.kind)
    return out


def test_s0_gives_single_splitter():
    tree = generate(GeneratorParams(g=32, s=0.0, r=0.3, seed=5))
    census = onu_census(tree)
    assert census.total == 32
    assert census.per_stage == (32, 0, 0)
    assert [n.kind for n in tree.nodes if n.kind.is_rn] == [NodeKind.PASSIVE_RN]


def test_s1_gives_full_depth():
    tree = generate(GeneratorParams(g=32, s=1.0, r=0.0, seed=1))
    census = onu_census(tree)
    assert census.total == 32**3
    assert census.nic == census.total
    assert census.per_stage == (0, 0, 32**3)
    assert validate(tree).ok


def test_r1_all_ic():
    census = onu_census(generate(GeneratorParams(r=1.0, seed=3)))
    assert census.nic == 0 and census.ic == census.total


@pytest.mark.parametrize("scenario", list(Scenario))
@pytest.mark.parametrize("seed", [0, 1, 2**64 - 1])
def test_generated_trees_validate(scenario, seed):
    tree = generate(GeneratorParams(g=8, s=0.5, r=0.2, q=0.5, scenario=scenario, seed=seed))
    report = validate(tree)
    assert report.ok, report.violations
    for f in tree.fibers:
        parent, child = tree.kind(f.parent), tree.kind(f.child)
        if parent is NodeKind.OLT:
            assert f.role is FiberRole.FEEDER
        elif child is NodeKind.ONU:
            assert f.role is FiberRole.LAST_MILE
        else:
            assert f.role is FiberRole.DISTRIBUTION


def test_deterministic():
    params = GeneratorParams(s=0.3, r=0.05, q=0.4, scenario=Scenario.SECOND, seed=42)
    assert generate(params).structure() == generate(params).structure()
    assert generate(params).structure() != generate(GeneratorParams(s=0.3, r=0.05, q=0.4, scenario="second", seed=43)).structure()


def test_ids_are_level_order():
    tree = generate(GeneratorParams(g=4, s=0.5, seed=11))
    assert tree.node(0).kind is NodeKind.OLT
    assert tree.node(1).kind.is_rn
    assert tree.node_ids() == tuple(range(len(tree)))
    depth = [len(tree.path_to_root(i)) for i in tree.node_ids()]
    assert depth == sorted(depth)


def test_first_scenario_types_by_stage():
    tree = generate(GeneratorParams(s=0.5, scenario=Scenario.FIRST, seed=9))
    assert rn_kinds_by_stage(tree) == {
        1: {NodeKind.PASSIVE_RN},
        2: {NodeKind.ACTIVE_RN},
        3: {NodeKind.PASSIVE_RN},
    }


def test_traditional_has_no_active_rn():
    tree = generate(GeneratorParams(s=0.5, scenario=Scenario.TRADITIONAL, seed=9))
    assert all(n.kind is not NodeKind.ACTIVE_RN for n in tree.nodes)


@pytest.mark.parametrize("seed", range(5))
def test_second_q0_matches_traditional(seed):
    a = generate(GeneratorParams(r=0.1, q=0.0, scenario=Scenario.SECOND, seed=seed))
    b = generate(GeneratorParams(r=0.1, scenario=Scenario.TRADITIONAL, seed=seed))
    assert a.structure() == b.structure()


def test_second_q1_all_active():
    tree = generate(GeneratorParams(q=1.0, scenario=Scenario.SECOND, seed=2))
    assert all(n.kind is not NodeKind.PASSIVE_RN for n in tree.nodes)


def test_scenarios_share_topology():
    shapes = set()
    for scenario in Scenario:
        tree = generate(GeneratorParams(r=0.2, q=0.3, scenario=scenario, seed=17))
        shapes.add(tuple((f.child, f.parent) for f in tree.fibers))
        shapes.add(tuple(tree.is_ic(i) for i in tree.node_ids()))
    assert len(shapes) == 2


def test_numpy_stream_is_prefix_consistent():
    # the draw order relies on block draws matching one long draw
    a = np.random.Generator(np.random.PCG64(123))
    b = np.random.Generator(np.random.PCG64(123))
    blocks = np.concatenate([a.random(5), a.random(0), a.random(17)])
    assert np.array_equal(blocks, b.random(22))


@pytest.mark.parametrize(
    "kwargs",
    [dict(g=1), dict(g=2.5), dict(s=-0.1), dict(r=1.5), dict(q=2), dict(seed=-1), dict(seed=2**64), dict(scenario="third")],
)
def test_invalid_params(kwargs):
    with pytest.raises(ValueError):
        GeneratorParams(**kwargs)


def test_census_totals():
    tree = generate(GeneratorParams(r=0.3, seed=4))
    c = onu_census(tree)
    assert c.total == c.ic + c.nic == sum(c.per_stage) == len(tree.onus())


def test_mean_onu_count_matches_closed_form():
    counts = [onu_census(generate(GeneratorParams(r=0.01, seed=k))).total for k in range(1000)]
    mean = sum(counts) / len(counts)
    assert abs(mean - expected_onu_count(32, 0.3)) / 3186.56 < 0.02


def test_stage_counts_match_closed_form():
    n = 400
    census = np.array([onu_census(generate(GeneratorParams(seed=k))).per_stage for k in range(n)], dtype=float)
    expected = expected_stage_counts(32, 0.3)
    for stage in range(3):
        col = census[:, stage]
        se = col.std(ddof=1) / math.sqrt(n)
        assert abs(col.mean() - expected[stage]) < 4 * se


def test_ic_fraction_binomial():
    ic = total = 0
    for k in range(1000):
        c = onu_census(generate(GeneratorParams(r=0.5, seed=k)))
        ic += c.ic
        total += c.total
    assert abs(ic / total - 0.5) < 3 * math.sqrt(0.25 / total)
