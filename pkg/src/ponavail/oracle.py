"""Brute-force service availability by enumerating component states.

Every node and every fiber is an independent two-state component. An ONU
has service in a state iff some service node (the OLT or another IC-ONU)
is reachable over a route whose components are all up. Routes climb from
the ONU towards the root and may turn downstream only at the OLT or an
active RN: the turnaround node for a target ``S`` is the first OLT or
active RN at or above the lowest common ancestor of the ONU and ``S``.

Nothing here shares code with :mod:`ponavail.engine`; the two agree only
if the recursion is right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .model import TABLE_I, AvailabilityTable, NodeKind, PonTree, component_availability, fiber_role_availability

DEFAULT_MAX_COMPONENTS = 24
_CHUNK_BITS = 20


class NetworkTooLarge(ValueError):
    def __init__(self, components: int, bound: int) -> None:
        super().__init__(f"network too large: {components} components exceed the oracle bound of {bound}")
        self.components = components
        self.bound = bound


class Component(NamedTuple):
    """A node (``fiber=False``) or the fiber above node ``id`` (``fiber=True``)."""

    id: int
    fiber: bool


def components(tree: PonTree) -> list[Component]:
    """Fixed component indexing: nodes in tree order, then fibers in tree order."""
    return [Component(n.id, False) for n in tree.nodes] + [Component(f.child, True) for f in tree.fibers]


def component_availabilities(tree: PonTree, table: AvailabilityTable = TABLE_I) -> list[float]:
    out = [component_availability(n.kind, table) for n in tree.nodes]
    out += [fiber_role_availability(f.role, table) for f in tree.fibers]
    return out


@dataclass(frozen=True)
class ComponentState:
    """Up/down flag for each component of ``components(tree)``, in order."""

    up: tuple[bool, ...]

    @classmethod
    def all_up(cls, tree: PonTree) -> ComponentState:
        return cls((True,) * (len(tree.nodes) + len(tree.fibers)))

    @classmethod
    def from_index(cls, index: int, size: int) -> ComponentState:
        """State whose bit ``k`` of ``index`` is the flag of component ``k``."""
        return cls(tuple(bool(index >> k & 1) for k in range(size)))

    def with_down(self, tree: PonTree, *down: Component) -> ComponentState:
        order = {c: k for k, c in enumerate(components(tree))}
        flags = list(self.up)
        for c in down:
            flags[order[c]] = False
        return ComponentState(tuple(flags))


def _is_turnaround(tree: PonTree, node_id: int) -> bool:
    kind = tree.node(node_id).kind
    return kind is NodeKind.OLT or kind is NodeKind.ACTIVE_RN


def service_route(tree: PonTree, onu: int, source: int) -> frozenset[Component]:
    """Components that must all be up for ``onu`` to reach ``source``."""
    up_onu = tree.path_to_root(onu)
    up_src = tree.path_to_root(source)
    on_src_path = set(up_src)
    lca_pos = next(k for k, v in enumerate(up_onu) if v in on_src_path)
    lca = up_onu[lca_pos]
    if lca == source:
        turn_pos = lca_pos
    else:
        turn_pos = next((k for k in range(lca_pos, len(up_onu)) if _is_turnaround(tree, up_onu[k])), None)
        if turn_pos is None:
            raise ValueError(f"no turnaround node above {lca}")
    route: set[Component] = set()
    climb = up_onu[: turn_pos + 1]
    for v in climb:
        route.add(Component(v, False))
    for v in climb[:-1]:
        route.add(Component(v, True))
    # descend from the turnaround node to the source: that is the source's
    # upward path until it meets the climb
    turn = up_onu[turn_pos]
    for v in up_src[: up_src.index(turn)]:
        route.add(Component(v, False))
        route.add(Component(v, True))
    return frozenset(route)


def service_sources(tree: PonTree, onu: int) -> list[int]:
    """The OLT plus every IC-ONU other than ``onu`` itself."""
    out = [n.id for n in tree.nodes if n.kind is NodeKind.OLT]
    out += [n.id for n in tree.nodes if n.kind is NodeKind.ONU and n.ic and n.id != onu]
    return out


def _require_onu(tree: PonTree, onu: int) -> None:
    if onu not in tree:
        raise KeyError(f"no node with id {onu!r}")
    if tree.node(onu).kind is not NodeKind.ONU:
        raise ValueError(f"node {onu} is not an ONU")


def has_service(tree: PonTree, onu: int, state: ComponentState) -> bool:
    _require_onu(tree, onu)
    comps = components(tree)
    if len(state.up) != len(comps):
        raise ValueError(f"state has {len(state.up)} flags for {len(comps)} components")
    up = {c for c, flag in zip(comps, state.up) if flag}
    return any(service_route(tree, onu, s) <= up for s in service_sources(tree, onu))


def _chunks(size: int) -> Iterator[tuple[int, int]]:
    step = 1 << min(size, _CHUNK_BITS)
    total = 1 << size
    for start in range(0, total, step):
        yield start, min(step, total - start)


def _state_probabilities(avail: list[float], size: int) -> np.ndarray:
    """Probabilities of states 0 .. 2**size - 1 over the first ``size`` components."""
    probs = np.ones(1)
    for a in avail[:size]:
        probs = np.concatenate((probs * (1.0 - a), probs * a))
    return probs


def availability(
    tree: PonTree,
    onu: int,
    table: AvailabilityTable = TABLE_I,
    max_components: int = DEFAULT_MAX_COMPONENTS,
    compensated: bool = False,
) -> float:
    """Exact SA of ``onu`` by summing over all ``2**components`` states.

    IC-ONUs report the OLT availability, as the engine does.
    """
    _require_onu(tree, onu)
    comps = components(tree)
    n = len(comps)
    if n > max_components:
        raise NetworkTooLarge(n, max_components)
    if tree.node(onu).ic:
        return table.olt

    index = {c: k for k, c in enumerate(comps)}
    masks = []
    for s in service_sources(tree, onu):
        m = 0
        for c in service_route(tree, onu, s):
            m |= 1 << index[c]
        masks.append(m)

    avail = component_availabilities(tree, table)
    low = min(n, _CHUNK_BITS)
    low_probs = _state_probabilities(avail, low)
    partials = []
    for start, count in _chunks(n):
        idx = np.arange(start, start + count, dtype=np.uint64)
        served = np.zeros(count, dtype=bool)
        for m in masks:
            mm = np.uint64(m)
            served |= (idx & mm) == mm
        high_prob = 1.0
        for k in range(low, n):
            high_prob *= avail[k] if (start >> k) & 1 else 1.0 - avail[k]
        weights = low_probs[: count] * high_prob
        if compensated:
            partials.append(math.fsum(weights[served].tolist()))
        else:
            partials.append(float(weights[served].sum()))
    return math.fsum(partials) if compensated else float(sum(partials))


def total_probability(tree: PonTree, table: AvailabilityTable = TABLE_I, max_components: int = DEFAULT_MAX_COMPONENTS) -> float:
    """Sum of all state probabilities; 1 up to rounding."""
    avail = component_availabilities(tree, table)
    n = len(avail)
    if n > max_components:
        raise NetworkTooLarge(n, max_components)
    low = min(n, _CHUNK_BITS)
    low_sum = float(_state_probabilities(avail, low).sum())
    total = 0.0
    for start, _ in _chunks(n):
        high_prob = 1.0
        for k in range(low, n):
            high_prob *= avail[k] if (start >> k) & 1 else 1.0 - avail[k]
        total += low_sum * high_prob
    return total


def all_onu_availabilities(
    tree: PonTree, table: AvailabilityTable = TABLE_I, max_components: int = DEFAULT_MAX_COMPONENTS
) -> dict[int, float]:
    return {o: availability(tree, o, table, max_components) for o in tree.onus()}
