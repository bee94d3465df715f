"""Random three-stage PON topologies.

Every network is one OLT feeding one stage-1 RN with ``g`` output ports.
Each stage-1 port leads to a stage-2 RN with probability ``s`` (otherwise
to an ONU), each stage-2 port likewise to a stage-3 RN, and every stage-3
port reaches an ONU.

Random numbers come from numpy's PCG64 bit generator seeded with the
64-bit ``seed``. Uniforms in [0, 1) are consumed in this fixed order:

1. ``g`` branch draws for the stage-1 ports, port order;
2. ``g`` branch draws per stage-2 RN, RNs in id order, then port order;
3. one type draw per RN in id order (consumed for every scenario);
4. one IC draw per ONU in id order.

A port branches iff its draw is ``< s``; an RN is active (second scenario
only) iff its draw is ``< q``; an ONU is IC-capable iff its draw is
``< r``. Node ids are assigned level by level: OLT 0, stage-1 RN 1, then
the stage-1 port targets, then the stage-2 port targets, then the stage-3
port targets.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .model import (
    TABLE_I,
    AvailabilityTable,
    FiberRole,
    NodeKind,
    PonTree,
)

MAX_SEED = 2**64 - 1


class Scenario(str, Enum):
    FIRST = "first"
    SECOND = "second"
    TRADITIONAL = "traditional"


# RN kind by stage (1-based) for the fixed-layout first scenario.
FIRST_SCENARIO_STAGES = (NodeKind.PASSIVE_RN, NodeKind.ACTIVE_RN, NodeKind.PASSIVE_RN)


@dataclass(frozen=True)
class GeneratorParams:
    g: int = 32
    s: float = 0.3
    r: float = 0.0
    q: float = 0.0
    scenario: Scenario = Scenario.FIRST
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        if isinstance(self.g, bool) or not isinstance(self.g, (int, np.integer)) or self.g < 2:
            raise ValueError(f"g must be an integer >= 2, got {self.g!r}")
        for name in ("s", "r", "q"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value!r}")
        if not 0 <= int(self.seed) <= MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")


def generate(params: GeneratorParams, table: AvailabilityTable = TABLE_I) -> PonTree:
    """Draw one random network. Identical params give an identical tree."""
    g, s = int(params.g), params.s
    rng = np.random.Generator(np.random.PCG64(int(params.seed)))

    branch1 = rng.random(g) < s
    k2 = int(branch1.sum())
    branch2 = rng.random(k2 * g) < s
    k3 = int(branch2.sum())
    type_draws = rng.random(1 + k2 + k3)

    # level layout: [olt, rn1, stage-1 ports, stage-2 ports, stage-3 ports]
    n = 2 + g + k2 * g + k3 * g
    parents = np.empty(n, dtype=np.int64)
    is_rn = np.zeros(n, dtype=bool)
    stage = np.zeros(n, dtype=np.int8)
    parents[0] = -1
    parents[1] = 0
    is_rn[1] = True
    stage[1] = 1

    lo1 = 2
    parents[lo1 : lo1 + g] = 1
    is_rn[lo1 : lo1 + g] = branch1
    stage2_rns = lo1 + np.flatnonzero(branch1)
    stage[stage2_rns] = 2

    lo2 = lo1 + g
    parents[lo2 : lo2 + k2 * g] = np.repeat(stage2_rns, g)
    is_rn[lo2 : lo2 + k2 * g] = branch2
    stage3_rns = lo2 + np.flatnonzero(branch2)
    stage[stage3_rns] = 3

    lo3 = lo2 + k2 * g
    parents[lo3:] = np.repeat(stage3_rns, g)

    rn_ids = np.flatnonzero(is_rn)
    onu_ids = np.flatnonzero(~is_rn[1:]) + 1
    ic_flags = rng.random(onu_ids.size) < params.r

    if params.scenario is Scenario.FIRST:
        rn_active = stage[rn_ids] == 2
    elif params.scenario is Scenario.SECOND:
        rn_active = type_draws < params.q
    else:
        rn_active = np.zeros(rn_ids.size, dtype=bool)

    kinds: list[NodeKind] = [NodeKind.ONU] * n
    kinds[0] = NodeKind.OLT
    roles = dict.fromkeys(range(2, n), FiberRole.LAST_MILE)
    roles[1] = FiberRole.FEEDER
    for i, active in zip(rn_ids.tolist(), rn_active.tolist()):
        kinds[i] = NodeKind.ACTIVE_RN if active else NodeKind.PASSIVE_RN
        if i > 1:
            roles[i] = FiberRole.DISTRIBUTION
    ic = [False] * n
    for i in onu_ids[ic_flags].tolist():
        ic[i] = True

    # every RN's ports occupy a contiguous id range
    children: dict[int, tuple[int, ...]] = dict.fromkeys(range(n), ())
    children[0] = (1,)
    children[1] = tuple(range(lo1, lo1 + g))
    for j, rn in enumerate(stage2_rns.tolist()):
        children[rn] = tuple(range(lo2 + j * g, lo2 + (j + 1) * g))
    for j, rn in enumerate(stage3_rns.tolist()):
        children[rn] = tuple(range(lo3 + j * g, lo3 + (j + 1) * g))
    parent_list: list[int | None] = parents.tolist()
    parent_list[0] = None
    return PonTree._from_parts(kinds, parent_list, ic, roles, children, table)


class OnuCensus(NamedTuple):
    total: int
    ic: int
    nic: int
    per_stage: tuple[int, int, int]


def onu_census(tree: PonTree) -> OnuCensus:
    """Count ONUs, split by IC capability and by RN depth (1, 2 or 3)."""
    per_stage = [0, 0, 0]
    ic = nic = 0
    kind, children = tree._kind, tree._children
    depth = {tree.root: 0}
    # breadth-first, so parents are visited before their children
    queue = [tree.root]
    for c in queue:
        kc = kind[c]
        if kc is NodeKind.ONU:
            if tree._ic[c]:
                ic += 1
            else:
                nic += 1
            d = depth[c]
            if not 1 <= d <= 3:
                raise ValueError(f"ONU {c} sits behind {d} RNs; expected 1 to 3")
            per_stage[d - 1] += 1
            continue
        d = depth[c] + (kc is not NodeKind.OLT)
        for k in children[c]:
            depth[k] = d
            queue.append(k)
    return OnuCensus(ic + nic, ic, nic, tuple(per_stage))
