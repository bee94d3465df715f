"""Hand-built and random small topologies shared by the tests."""

from __future__ import annotations

import random

from ponavail.model import NodeKind, PonTree

OLT, PRN, ARN, ONU = NodeKind.OLT, NodeKind.PASSIVE_RN, NodeKind.ACTIVE_RN, NodeKind.ONU


def chain(ic: bool = False, rn: NodeKind = PRN) -> PonTree:
    """OLT - feeder - RN - last mile - ONU (ids 0, 1, 2)."""
    return PonTree.build([OLT, rn, ONU], [None, 0, 1], [False, False, ic])


# Fig. 5 ids: OLT 0, RN1 1 (active), RN2 2, RN3 3, RN4 4 (passive),
# 5 an NIC-ONU on RN1, 6 IC-ONU1 on RN2, 7 NIC-ONU1 on RN3, 8 IC-ONU2 on RN4
FIG5 = dict(olt=0, rn1=1, rn2=2, rn3=3, rn4=4, side=5, ic1=6, nic1=7, ic2=8)


def fig5() -> PonTree:
    """Smallest tree with every element of the shared-path example (17 components)."""
    kinds = [OLT, ARN, PRN, PRN, PRN, ONU, ONU, ONU, ONU]
    parents = [None, 0, 1, 2, 3, 1, 2, 3, 4]
    ic = [False, False, False, False, False, False, True, False, True]
    return PonTree.build(kinds, parents, ic)


def random_tree(rng: random.Random, max_components: int = 20, ic_prob: float | None = None) -> PonTree:
    """Random valid tree with at most ``max_components`` nodes plus fibers.

    Shapes mix RN types freely, so every case of the recursion shows up
    across a few dozen draws.
    """
    max_nodes = (max_components + 1) // 2
    kinds = [OLT, rng.choice([PRN, ARN])]
    parents: list[int | None] = [None, 0]
    rns = [1]
    n_rn = rng.randint(1, max(1, min(4, max_nodes - 3)))
    while len(rns) < n_rn:
        kinds.append(rng.choice([PRN, PRN, ARN]))
        parents.append(rng.choice(rns))
        rns.append(len(kinds) - 1)
    # every RN without children needs at least one ONU
    has_child = {p for p in parents if p is not None}
    for rn in rns:
        if rn not in has_child:
            kinds.append(ONU)
            parents.append(rn)
    budget = max_nodes - len(kinds)
    if budget < 0:
        return random_tree(rng, max_components, ic_prob)
    for _ in range(rng.randint(0, budget)):
        kinds.append(ONU)
        parents.append(rng.choice(rns))
    p_ic = rng.random() if ic_prob is None else ic_prob
    ic = [k is ONU and rng.random() < p_ic for k in kinds]
    return PonTree.build(kinds, parents, ic)


def recursion_case(tree: PonTree, c: int, p: int | None) -> int:
    """Which case of the recursion handles the call f(c, p)."""
    kind = tree.kind(c)
    if kind is ONU:
        if p is None:
            return 1
        return 3 if tree.is_ic(c) else 2
    if kind is OLT:
        return 3
    if kind is ARN or p == tree.parent(c):
        return 4
    return 5
