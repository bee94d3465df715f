"""Exact ONU service availability under interoperator communication.

The service availability (SA) of an NIC-ONU is evaluated by the recursive
function ``f(c, p)``: the availability of reaching a service node (the OLT
or an IC-ONU) from node ``c`` when ``c`` was entered from neighbor ``p``.

* ``p is None`` and ``c`` an NIC-ONU: ``a_c * a_fiber * f(u_c, c)``.
* ``c`` an NIC-ONU reached from elsewhere: 0.
* ``c`` the OLT or an IC-ONU: ``a_c``.
* ``c`` an active RN, or a passive RN entered from upstream: ``c`` forwards
  to every other neighbor in parallel.
* ``c`` a passive RN entered from downstream: upstream traffic cannot turn
  around at a passive splitter, so every service path shares the chain of
  passive RNs up to the first active node. That shared segment is counted
  once (``h``) and the parallel branches hanging off it are combined.

Values depend on the entry direction, so memoization is keyed on the
directed edge ``(c, p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    TABLE_I,
    AvailabilityTable,
    FiberRole,
    NodeKind,
    PonTree,
    component_availability,
    fiber_role_availability,
)

HOURS_PER_YEAR = 8760.0


@dataclass(frozen=True)
class SharedSegment:
    """Decomposition of a passive RN entered from downstream.

    ``segment`` lists the passive RNs from the entry RN upward, ``apex`` is
    the first active RN or the OLT above them, ``h`` the availability of
    the shared chain (segment RNs, the fibers above each, and the apex) and
    ``branches`` the availabilities of the parallel non-shared paths.
    """

    segment: tuple[int, ...]
    apex: int
    h: float
    branches: tuple[float, ...]
    apex_is_olt: bool

    @property
    def value(self) -> float:
        if self.apex_is_olt:
            # the OLT is already a service source inside h
            return self.h
        miss = 1.0
        for d in self.branches:
            miss *= 1.0 - d
        return self.h * (1.0 - miss)


class _Evaluator:
    """Holds the memo for one (tree, table) pair."""

    def __init__(self, tree: PonTree, table: AvailabilityTable) -> None:
        self.tree = tree
        self.table = table
        self.memo: dict[tuple[int, int | None], float] = {}
        node_avail = {k: component_availability(k, table) for k in NodeKind}
        role_avail = {r: fiber_role_availability(r, table) for r in FiberRole}
        self._kind = tree._kind
        self._ic = tree._ic
        self._parent = tree._parent
        self._children = tree._children
        self._a = {i: node_avail[k] for i, k in self._kind.items()}
        # availability of the fiber above each non-root node
        self._af = {i: role_avail[r] for i, r in tree._role.items()}
        self._miss: dict = {}

    def f(self, c: int, p: int | None) -> float:
        key = (c, p)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        value = self._f(c, p)
        self.memo[key] = value
        return value

    def _f(self, c: int, p: int | None) -> float:
        kind = self._kind[c]
        if kind is NodeKind.ONU:
            if p is None:
                if self._ic[c]:
                    raise ValueError(f"ONU {c} is an IC-ONU; the recursion starts at NIC-ONUs")
                up = self._parent.get(c)
                if up is None:
                    raise ValueError(f"ONU {c} has no upstream node")
                return self._a[c] * self._af[c] * self.f(up, c)
            return self._a[c] if self._ic[c] else 0.0
        if kind is NodeKind.OLT:
            return self._a[c]
        up = self._parent.get(c)
        if kind is NodeKind.ACTIVE_RN or p == up:
            miss = self._children_miss(c, p)
            if up is not None and up != p:
                miss *= 1.0 - self._af[c] * self.f(up, c)
            return self._a[c] * (1.0 - miss)
        return self._segment_value(c, p)

    def _term(self, i: int) -> float:
        """``a_{i -> u_i} f(i, u_i)``: reaching service downstream through child ``i``."""
        if self._kind[i] is NodeKind.ONU:
            # cases 2 and 3 inlined; leaves dominate the node count
            return self._af[i] * self._a[i] if self._ic[i] else 0.0
        return self._af[i] * self.f(i, self._parent[i])

    def _children_miss(self, c: int, skip: int | None) -> float:
        """Product of ``1 - term`` over the children of ``c`` other than ``skip``."""
        full = self._miss.get(c)
        if full is None:
            full = 1.0
            for i in self._children[c]:
                full *= 1.0 - self._term(i)
            self._miss[c] = full
        if skip is None or self._parent.get(skip) != c or self._term(skip) == 0.0:
            # a zero term contributes a factor of exactly 1.0
            return full
        miss = self._miss.get((c, skip))
        if miss is None:
            miss = 1.0
            for i in self._children[c]:
                if i != skip:
                    miss *= 1.0 - self._term(i)
            self._miss[(c, skip)] = miss
        return miss

    def _segment_value(self, entry_rn: int, came_from: int) -> float:
        """Case-5 value without materializing the branch list."""
        h = 1.0
        miss = 1.0
        c, e = entry_rn, came_from
        kind = self._kind[c]
        while kind is NodeKind.PASSIVE_RN:
            h *= self._a[c]
            miss *= self._children_miss(c, e)
            up = self._parent.get(c)
            if up is None:
                raise ValueError(f"passive RN {c} has no upstream node")
            h *= self._af[c]
            c, e = up, c
            kind = self._kind[c]
        h *= self._a[c]
        if kind is NodeKind.OLT:
            return h
        if kind is not NodeKind.ACTIVE_RN:
            raise ValueError(f"segment above {entry_rn} ends at a {kind.value}")
        miss *= self._children_miss(c, e)
        up = self._parent.get(c)
        if up is not None:
            miss *= 1.0 - self._af[c] * self.f(up, c)
        return h * (1.0 - miss)

    def shared_segment(self, entry_rn: int, came_from: int) -> SharedSegment:
        if self._kind[entry_rn] is not NodeKind.PASSIVE_RN:
            raise ValueError(f"node {entry_rn} is not a passive RN")
        if came_from not in self._children[entry_rn]:
            raise ValueError(f"node {came_from} is not a downstream neighbor of {entry_rn}")

        segment: list[int] = []
        branches: list[float] = []
        h = 1.0
        c, e = entry_rn, came_from
        while self._kind[c] is NodeKind.PASSIVE_RN:
            segment.append(c)
            h *= self._a[c]
            for i in self._children[c]:
                if i != e:
                    branches.append(self._af[i] * self.f(i, c))
            up = self._parent.get(c)
            if up is None:
                raise ValueError(f"passive RN {c} has no upstream node")
            h *= self._af[c]
            c, e = up, c
        apex = c
        h *= self._a[apex]
        apex_is_olt = self._kind[apex] is NodeKind.OLT
        if not apex_is_olt:
            if self._kind[apex] is not NodeKind.ACTIVE_RN:
                raise ValueError(f"segment above {entry_rn} ends at a {self._kind[apex].value}")
            up = self._parent.get(apex)
            if up is not None:
                branches.append(self._af[apex] * self.f(up, apex))
            for i in self._children[apex]:
                if i != e:
                    branches.append(self._af[i] * self.f(i, apex))
        return SharedSegment(tuple(segment), apex, h, tuple(branches), apex_is_olt)

    def onu_sa(self, onu: int) -> float:
        kind = self._kind[onu]
        if kind is not NodeKind.ONU:
            raise ValueError(f"node {onu} is a {kind.value}, not an ONU")
        if self._ic[onu]:
            return self.table.olt
        return self.f(onu, None)


def _check_tree_node(tree: PonTree, node_id: int) -> None:
    if node_id not in tree:
        raise KeyError(f"no node with id {node_id!r}")


def service_availability(tree: PonTree, onu: int, table: AvailabilityTable = TABLE_I) -> float:
    """SA of one ONU. IC-ONUs report the OLT availability."""
    _check_tree_node(tree, onu)
    return _Evaluator(tree, table).onu_sa(onu)


def f_value(tree: PonTree, c: int, p: int | None, table: AvailabilityTable = TABLE_I) -> float:
    """Raw ``f(c, p)``, exposed for inspection and tests."""
    _check_tree_node(tree, c)
    return _Evaluator(tree, table).f(c, p)


def shared_segment(
    tree: PonTree, entry_rn: int, came_from: int, table: AvailabilityTable = TABLE_I
) -> SharedSegment:
    _check_tree_node(tree, entry_rn)
    return _Evaluator(tree, table).shared_segment(entry_rn, came_from)


def all_onu_availabilities(tree: PonTree, table: AvailabilityTable = TABLE_I) -> dict[int, float]:
    """SA of every ONU, sharing one memo across the tree."""
    ev = _Evaluator(tree, table)
    kind, ic, parent = tree._kind, tree._ic, tree._parent
    # f(c, x) is the same for every NIC child x of c: the excluded child's
    # own term is exactly 0, so the computation never depends on which one.
    rep: dict[int, float] = {}
    out = {}
    for o in tree.node_ids():
        if kind[o] is not NodeKind.ONU:
            continue
        if ic[o]:
            out[o] = table.olt
            continue
        c = parent.get(o)
        if c is None:
            raise ValueError(f"ONU {o} has no upstream node")
        up = rep.get(c)
        if up is None:
            up = rep[c] = ev.f(c, o)
        out[o] = ev._a[o] * ev._af[o] * up
    return out


def mean_onu_availability(tree: PonTree, table: AvailabilityTable = TABLE_I) -> float:
    """Arithmetic mean of the SA over all ONUs of the network."""
    values = all_onu_availabilities(tree, table)
    if not values:
        raise ValueError("network has no ONUs")
    return math.fsum(values.values()) / len(values)


def annual_downtime_hours(availability: float) -> float:
    if not 0.0 <= availability <= 1.0:
        raise ValueError(f"availability must be in [0, 1], got {availability!r}")
    return (1.0 - availability) * HOURS_PER_YEAR
