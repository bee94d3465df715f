"""Closed-form expectations for the three-stage topology model."""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

from .model import TABLE_I, AvailabilityTable, NodeKind, component_availability


def _check(g: int, s: float) -> None:
    if isinstance(g, bool) or int(g) != g or g < 2:
        raise ValueError(f"g must be an integer >= 2, got {g!r}")
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must be in [0, 1], got {s!r}")


class StageCounts(NamedTuple):
    n1: float
    n2: float
    n3: float

    @property
    def total(self) -> float:
        return self.n1 + self.n2 + self.n3


def expected_onu_count(g: int, s: float) -> float:
    """Mean number of ONUs in a network: ``g(1 - s + gs(1 - s + gs))``."""
    _check(g, s)
    # summing the stage terms avoids a last-digit rounding error at (32, 0.3)
    return math.fsum(expected_stage_counts(g, s))


def expected_stage_counts(g: int, s: float) -> StageCounts:
    """Mean ONU counts behind 1, 2 and 3 RNs."""
    _check(g, s)
    return StageCounts(g * (1 - s), g * s * g * (1 - s), g * s * g * s * g)


def stage_series_availability(table: AvailabilityTable, rn_types: Sequence[NodeKind], depth: int) -> float:
    """Series availability of an ONU behind ``depth`` RNs with no IC anywhere."""
    a = table.olt * table.feeder_fiber
    for k in range(depth):
        a *= component_availability(rn_types[k], table)
    a *= table.distribution_fiber ** (depth - 1)
    return a * table.last_mile_fiber * table.onu


def analytic_mean_sa_no_ic(
    table: AvailabilityTable = TABLE_I,
    g: int = 32,
    s: float = 0.3,
    rn_types: Sequence[NodeKind] = (NodeKind.PASSIVE_RN,) * 3,
) -> float:
    """Mean ONU SA at r = 0, weighting each stage by its expected ONU count.

    This is a ratio of expectations; the per-network mean averaged over a
    population differs from it only marginally.
    """
    rn_types = tuple(NodeKind(k) for k in rn_types)
    if len(rn_types) != 3 or not all(k.is_rn for k in rn_types):
        raise ValueError("rn_types must name three RN kinds, one per stage")
    counts = expected_stage_counts(g, s)
    weighted = sum(n * stage_series_availability(table, rn_types, d) for d, n in enumerate(counts, start=1))
    return weighted / counts.total
