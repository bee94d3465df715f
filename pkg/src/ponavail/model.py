"""PON topology types and the component availability table.

A :class:`PonTree` is a rooted tree: one OLT, remote nodes (passive
splitters or active switches), ONUs at the leaves, and one fiber from
every non-root node to its upstream parent.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from enum import Enum
from typing import Any, Iterable, NamedTuple


@dataclass(frozen=True)
class AvailabilityTable:
    """Steady-state availabilities of each PON component class."""

    olt: float = 0.9999485
    onu: float = 0.9999645
    passive_rn: float = 0.9999987
    # Exposed separately from ``olt`` even though the default is the same.
    active_rn: float = 0.9999485
    fiber_per_km: float = 0.9999429
    feeder_fiber: float = 0.999429
    distribution_fiber: float = 0.999829
    last_mile_fiber: float = 0.99996

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{f.name}={value!r} is not in (0, 1]")

    @classmethod
    def perfect(cls) -> AvailabilityTable:
        """Table where every component is always up."""
        return cls(**{f.name: 1.0 for f in fields(cls)})

    @classmethod
    def from_mapping(cls, overrides: dict[str, float]) -> AvailabilityTable:
        """Default table with selected entries replaced."""
        known = {f.name for f in fields(cls)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"unknown availability entries: {sorted(unknown)}")
        return replace(cls(), **{k: float(v) for k, v in overrides.items()})

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


TABLE_I = AvailabilityTable()


class NodeKind(str, Enum):
    OLT = "olt"
    PASSIVE_RN = "prn"
    ACTIVE_RN = "arn"
    ONU = "onu"

    @property
    def is_rn(self) -> bool:
        return self is NodeKind.PASSIVE_RN or self is NodeKind.ACTIVE_RN


class FiberRole(str, Enum):
    FEEDER = "feeder"
    DISTRIBUTION = "distribution"
    LAST_MILE = "lastmile"


class Node(NamedTuple):
    id: int
    kind: NodeKind
    # Only meaningful for ONUs: True for an IC-ONU, False for an NIC-ONU.
    ic: bool = False
    availability: float = 1.0


class Fiber(NamedTuple):
    child: int
    parent: int
    role: FiberRole
    availability: float = 1.0


def component_availability(kind: NodeKind, table: AvailabilityTable = TABLE_I) -> float:
    if kind is NodeKind.OLT:
        return table.olt
    if kind is NodeKind.ONU:
        return table.onu
    if kind is NodeKind.PASSIVE_RN:
        return table.passive_rn
    if kind is NodeKind.ACTIVE_RN:
        return table.active_rn
    raise ValueError(f"unknown node kind {kind!r}")


def fiber_role_availability(role: FiberRole, table: AvailabilityTable = TABLE_I) -> float:
    if role is FiberRole.FEEDER:
        return table.feeder_fiber
    if role is FiberRole.DISTRIBUTION:
        return table.distribution_fiber
    if role is FiberRole.LAST_MILE:
        return table.last_mile_fiber
    raise ValueError(f"unknown fiber role {role!r}")


def fiber_availability_from_length(length_km: float, per_km: float) -> float:
    """Availability of a fiber of the given length: ``per_km ** length_km``."""
    if length_km < 0 or math.isnan(length_km):
        raise ValueError(f"fiber length must be nonnegative, got {length_km!r}")
    if not 0.0 < per_km <= 1.0:
        raise ValueError(f"per-km availability must be in (0, 1], got {per_km!r}")
    return per_km**length_km


def expected_role(parent_kind: NodeKind, child_kind: NodeKind) -> FiberRole | None:
    """Fiber role implied by the endpoint kinds, or None if no role fits."""
    if child_kind is NodeKind.ONU and parent_kind.is_rn:
        return FiberRole.LAST_MILE
    if child_kind.is_rn and parent_kind is NodeKind.OLT:
        return FiberRole.FEEDER
    if child_kind.is_rn and parent_kind.is_rn:
        return FiberRole.DISTRIBUTION
    return None


class PonTree:
    """Immutable PON tree.

    Node ids must be unique; they are usually dense integers with the OLT
    as id 0. Construction does not enforce the topology rules, so that
    malformed inputs can be inspected with :func:`validate`. Node and fiber
    availabilities come from ``table``.
    """

    __slots__ = ("table", "root", "_order", "_kind", "_ic", "_parent", "_role", "_children", "_cache")

    def __init__(
        self,
        nodes: Iterable[Node],
        fibers: Iterable[Fiber],
        table: AvailabilityTable = TABLE_I,
    ) -> None:
        kind: dict[int, NodeKind] = {}
        ic: dict[int, bool] = {}
        for n in nodes:
            if n.id in kind:
                raise ValueError(f"duplicate node id {n.id}")
            kind[n.id] = NodeKind(n.kind)
            ic[n.id] = bool(n.ic) and kind[n.id] is NodeKind.ONU
        parent: dict[int, int] = {}
        role: dict[int, FiberRole] = {}
        children: dict[int, list[int]] = {i: [] for i in kind}
        for f in fibers:
            if f.child not in kind or f.parent not in kind:
                raise ValueError(f"fiber {f.parent}->{f.child} references an unknown node")
            if f.child in parent:
                raise ValueError(f"node {f.child} has more than one upstream fiber")
            parent[f.child] = f.parent
            role[f.child] = FiberRole(f.role)
            children[f.parent].append(f.child)
        self._init(table, tuple(kind), kind, ic, parent, role, {k: tuple(v) for k, v in children.items()})

    def _init(self, table, order, kind, ic, parent, role, children) -> None:
        set_ = object.__setattr__
        set_(self, "table", table)
        set_(self, "_order", order)
        set_(self, "_kind", kind)
        set_(self, "_ic", ic)
        set_(self, "_parent", parent)
        set_(self, "_role", role)
        set_(self, "_children", children)
        set_(self, "_cache", {})
        set_(self, "root", next((i for i in order if i not in parent), None))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("PonTree is immutable")

    @classmethod
    def build(
        cls,
        kinds: Iterable[NodeKind | str],
        parents: Iterable[int | None],
        ic: Iterable[bool] | None = None,
        table: AvailabilityTable = TABLE_I,
    ) -> PonTree:
        """Build a tree from per-node lists; ids are list positions.

        Fiber roles follow from the endpoint kinds.
        """
        kinds = [NodeKind(k) for k in kinds]
        parents = [None if p is None or p < 0 else int(p) for p in parents]
        if len(parents) != len(kinds):
            raise ValueError("kinds and parents differ in length")
        ic = [False] * len(kinds) if ic is None else [bool(x) for x in ic]
        roles: dict[int, FiberRole] = {}
        children: dict[int, list[int]] = {i: [] for i in range(len(kinds))}
        for i, p in enumerate(parents):
            if p is None:
                continue
            role = expected_role(kinds[p], kinds[i])
            if role is None:
                raise ValueError(f"no fiber role fits {kinds[p].value}->{kinds[i].value}")
            roles[i] = role
            children[p].append(i)
        return cls._from_parts(kinds, parents, ic, roles, {k: tuple(v) for k, v in children.items()}, table)

    @classmethod
    def _from_parts(cls, kinds, parents, ic, roles, children, table) -> PonTree:
        # dense ids, no checks: for trusted builders only
        tree = cls.__new__(cls)
        n = len(kinds)
        tree._init(
            table,
            tuple(range(n)),
            dict(enumerate(kinds)),
            {i: bool(ic[i]) and kinds[i] is NodeKind.ONU for i in range(n)},
            {i: p for i, p in enumerate(parents) if p is not None},
            roles,
            children,
        )
        return tree

    @property
    def nodes(self) -> tuple[Node, ...]:
        out = self._cache.get("nodes")
        if out is None:
            avail = {k: component_availability(k, self.table) for k in NodeKind}
            out = tuple(Node(i, self._kind[i], self._ic[i], avail[self._kind[i]]) for i in self._order)
            self._cache["nodes"] = out
        return out

    @property
    def fibers(self) -> tuple[Fiber, ...]:
        out = self._cache.get("fibers")
        if out is None:
            avail = {r: fiber_role_availability(r, self.table) for r in FiberRole}
            out = tuple(
                Fiber(i, self._parent[i], self._role[i], avail[self._role[i]]) for i in self._order if i in self._parent
            )
            self._cache["fibers"] = out
        return out

    def node(self, node_id: int) -> Node:
        try:
            kind = self._kind[node_id]
        except KeyError:
            raise KeyError(f"no node with id {node_id!r}") from None
        return Node(node_id, kind, self._ic[node_id], component_availability(kind, self.table))

    def kind(self, node_id: int) -> NodeKind:
        return self._kind[node_id]

    def is_ic(self, node_id: int) -> bool:
        return self._ic[node_id]

    def __contains__(self, node_id: object) -> bool:
        return node_id in self._kind

    def __len__(self) -> int:
        return len(self._order)

    def node_ids(self) -> tuple[int, ...]:
        return self._order

    def parent(self, node_id: int) -> int | None:
        return self._parent.get(node_id)

    def children(self, node_id: int) -> tuple[int, ...]:
        return self._children[node_id]

    def neighbors(self, node_id: int) -> tuple[int, ...]:
        """Upstream parent (if any) followed by the children."""
        p = self._parent.get(node_id)
        kids = self._children[node_id]
        return kids if p is None else (p, *kids)

    def up_fiber(self, node_id: int) -> Fiber:
        """The fiber connecting ``node_id`` to its parent."""
        role = self._role[node_id]
        return Fiber(node_id, self._parent[node_id], role, fiber_role_availability(role, self.table))

    def link(self, a: int, b: int) -> Fiber:
        """The fiber between two adjacent nodes, in either direction."""
        if self._parent.get(a) == b:
            return self.up_fiber(a)
        if self._parent.get(b) == a:
            return self.up_fiber(b)
        raise KeyError(f"nodes {a} and {b} are not adjacent")

    def path_to_root(self, node_id: int) -> list[int]:
        """Node ids from ``node_id`` up to the root, inclusive."""
        path = [node_id]
        seen = {node_id}
        p = self._parent.get(node_id)
        while p is not None:
            if p in seen:
                raise ValueError(f"cycle through node {p}")
            seen.add(p)
            path.append(p)
            p = self._parent.get(p)
        return path

    def onus(self) -> list[int]:
        return [i for i in self._order if self._kind[i] is NodeKind.ONU]

    def rn_depth(self, node_id: int) -> int:
        """Number of RNs on the upstream path of ``node_id`` (excluding itself)."""
        return sum(1 for i in self.path_to_root(node_id)[1:] if self._kind[i].is_rn)

    def with_table(self, table: AvailabilityTable) -> PonTree:
        """Same topology with availabilities re-derived from ``table``."""
        tree = PonTree.__new__(PonTree)
        tree._init(table, self._order, self._kind, self._ic, self._parent, self._role, self._children)
        return tree

    def structure(self) -> tuple:
        """Hashable summary of the topology, used for equality checks."""
        return (
            tuple((i, self._kind[i].value, self._ic[i]) for i in self._order),
            tuple((i, self._parent[i], self._role[i].value) for i in self._order if i in self._parent),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PonTree):
            return NotImplemented
        return self.structure() == other.structure() and self.table == other.table

    def __hash__(self) -> int:
        return hash(self.structure())

    def __repr__(self) -> str:
        return f"PonTree({len(self._order)} nodes, {len(self.onus())} ONUs)"

    # serialization -------------------------------------------------------

    def to_dict(self) -> dict[str, list[dict[str, Any]]]:
        nodes = []
        for n in self.nodes:
            entry: dict[str, Any] = {"id": n.id, "kind": n.kind.value}
            if n.kind is NodeKind.ONU:
                entry["ic"] = n.ic
            nodes.append(entry)
        fibers = [{"child": f.child, "parent": f.parent, "role": f.role.value} for f in self.fibers]
        return {"nodes": nodes, "fibers": fibers}

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict[str, Any], table: AvailabilityTable = TABLE_I) -> PonTree:
        try:
            raw_nodes = data["nodes"]
            raw_fibers = data["fibers"]
        except (KeyError, TypeError):
            raise ValueError('topology must be an object with "nodes" and "fibers"') from None
        nodes = []
        for i, entry in enumerate(raw_nodes):
            try:
                kind = NodeKind(entry["kind"])
                node_id = int(entry["id"])
            except (KeyError, ValueError, TypeError) as exc:
                raise ValueError(f"nodes[{i}]: {exc}") from None
            ic = bool(entry.get("ic", False)) if kind is NodeKind.ONU else False
            nodes.append(Node(node_id, kind, ic, component_availability(kind, table)))
        fibers = []
        for i, entry in enumerate(raw_fibers):
            try:
                role = FiberRole(entry["role"])
                fibers.append(
                    Fiber(int(entry["child"]), int(entry["parent"]), role, fiber_role_availability(role, table))
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise ValueError(f"fibers[{i}]: {exc}") from None
        return cls(nodes, fibers, table)

    @classmethod
    def from_json(cls, text: str, table: AvailabilityTable = TABLE_I) -> PonTree:
        return cls.from_dict(json.loads(text), table)


@dataclass(frozen=True)
class Violation:
    rule: str
    detail: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}


def validate(tree: PonTree) -> ValidationReport:
    """Check the topology rules; violations are returned, not raised."""
    out: list[Violation] = []
    roots = [n for n in tree.nodes if tree.parent(n.id) is None]
    if len(roots) != 1:
        out.append(Violation("root count", f"expected one root, found {len(roots)}"))
    for r in roots:
        if r.kind is not NodeKind.OLT:
            out.append(Violation("root kind", f"root {r.id} is {r.kind.value}, not olt"))
    olts = [n for n in tree.nodes if n.kind is NodeKind.OLT]
    if len(olts) != 1:
        out.append(Violation("olt count", f"expected one OLT, found {len(olts)}"))
    if len(tree.fibers) != len(tree.nodes) - 1:
        out.append(Violation("fiber count", f"{len(tree.fibers)} fibers for {len(tree.nodes)} nodes"))

    for n in tree.nodes:
        kids = tree.children(n.id)
        if n.kind is NodeKind.OLT:
            if len(kids) != 1:
                out.append(Violation("root fan-out", f"OLT {n.id} has {len(kids)} children"))
            elif not tree.node(kids[0]).kind.is_rn:
                out.append(Violation("root fan-out", f"OLT child {kids[0]} is not an RN"))
        elif n.kind is NodeKind.ONU:
            if kids:
                out.append(Violation("leaf kind", f"ONU {n.id} has children"))
        elif not kids:
            out.append(Violation("leaf kind", f"RN {n.id} is a leaf"))
        if n.availability != component_availability(n.kind, tree.table):
            out.append(Violation("node availability", f"node {n.id} does not match the table"))

    for f in tree.fibers:
        want = expected_role(tree.node(f.parent).kind, tree.node(f.child).kind)
        if want is None:
            out.append(Violation("fiber endpoints", f"no role fits fiber {f.parent}->{f.child}"))
        elif want is not f.role:
            out.append(Violation("fiber role", f"fiber {f.parent}->{f.child} is {f.role.value}, expected {want.value}"))
        if f.availability != fiber_role_availability(f.role, tree.table):
            out.append(Violation("fiber availability", f"fiber {f.parent}->{f.child} does not match the table"))

    if len(roots) == 1:
        reached = {roots[0].id}
        stack = [roots[0].id]
        while stack:
            for c in tree.children(stack.pop()):
                if c not in reached:
                    reached.add(c)
                    stack.append(c)
        if len(reached) != len(tree.nodes):
            out.append(Violation("connectivity", f"{len(tree.nodes) - len(reached)} nodes unreachable from root"))
    return ValidationReport(tuple(out))
