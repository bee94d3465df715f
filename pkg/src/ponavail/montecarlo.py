"""Population sampling and the parameter sweeps.

A population is fixed by (scenario, g, s, r, q). Its sample is
``sample_size`` random networks; the unit of observation is each
network's mean ONU SA.

Network seeds come from ``numpy.random.SeedSequence(master_seed,
spawn_key=(population_id, index))``, taking the first 64-bit word of its
generated state. Any network of any sweep can therefore be regenerated on
its own, and populations can be evaluated in any order or in parallel.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .engine import mean_onu_availability
from .generator import GeneratorParams, Scenario, generate
from .model import TABLE_I, AvailabilityTable

log = logging.getLogger(__name__)

DEFAULT_SAMPLE_SIZE = 100
RSE_LIMIT = 0.01


@dataclass(frozen=True)
class PopulationSpec:
    scenario: Scenario = Scenario.FIRST
    g: int = 32
    s: float = 0.3
    r: float = 0.0
    q: float = 0.0
    sample_size: int = DEFAULT_SAMPLE_SIZE
    master_seed: int = 0
    population_id: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        if self.sample_size < 2:
            raise ValueError(f"sample_size must be at least 2, got {self.sample_size}")
        if self.population_id < 0:
            raise ValueError("population_id must be nonnegative")
        # reuse the generator's checks on g, s, r, q and the seed range
        GeneratorParams(self.g, self.s, self.r, self.q, self.scenario, self.master_seed)

    def network_params(self, index: int) -> GeneratorParams:
        return GeneratorParams(self.g, self.s, self.r, self.q, self.scenario, network_seed(self.master_seed, self.population_id, index))


@dataclass(frozen=True)
class SampleStats:
    mean: float
    std: float
    rse: float
    n: int
    # RSE of the sample mean of the unavailability 1 - SA
    rse_unavailability: float

    @classmethod
    def from_values(cls, values: Sequence[float]) -> SampleStats:
        values = list(values)
        n = len(values)
        if n < 2:
            raise ValueError(f"need at least 2 values, got {n}")
        mean = math.fsum(values) / n
        std = _sample_std(values, mean)
        return cls(mean, std, _rse(std, n, mean), n, _rse(std, n, 1.0 - mean))


class NetworkFailure(RuntimeError):
    def __init__(self, population_id: int, index: int, cause: BaseException) -> None:
        super().__init__(f"population {population_id}, network {index}: {cause}")
        self.population_id = population_id
        self.index = index


def network_seed(master_seed: int, population_id: int, index: int) -> int:
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(population_id), int(index)))
    return int(ss.generate_state(1, np.uint64)[0])


def _sample_std(values: Sequence[float], mean: float) -> float:
    n = len(values)
    return math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (n - 1))


def _rse(std: float, n: int, mean: float) -> float:
    if mean == 0.0:
        return 0.0 if std == 0.0 else math.inf
    return std / (math.sqrt(n) * mean)


def relative_standard_error(values: Sequence[float]) -> float:
    """Sample std (n - 1 denominator) over ``sqrt(n) * mean``."""
    values = list(values)
    if len(values) < 2:
        raise ValueError(f"need at least 2 values, got {len(values)}")
    mean = math.fsum(values) / len(values)
    return _rse(_sample_std(values, mean), len(values), mean)


def sample_means(spec: PopulationSpec, table: AvailabilityTable = TABLE_I) -> list[float]:
    """Per-network mean ONU SA for every network of the sample."""
    out = []
    for i in range(spec.sample_size):
        try:
            out.append(mean_onu_availability(generate(spec.network_params(i), table), table))
        except Exception as exc:
            raise NetworkFailure(spec.population_id, i, exc) from exc
    return out


def evaluate_population(spec: PopulationSpec, table: AvailabilityTable = TABLE_I) -> SampleStats:
    stats = SampleStats.from_values(sample_means(spec, table))
    if stats.rse >= RSE_LIMIT:
        log.warning("population %d: RSE %.3g is not below %.0f%%", spec.population_id, stats.rse, RSE_LIMIT * 100)
    return stats


def r_grid() -> list[float]:
    """The 38 IC probabilities: 0, 1e-3..1e-2, 2e-2..1e-1, 0.15..1."""
    return [0.0] + [k / 1000 for k in range(1, 11)] + [k / 100 for k in range(2, 11)] + [k / 20 for k in range(3, 21)]


def q_grid() -> list[float]:
    """The 21 active-RN probabilities 0, 0.05, ..., 1."""
    return [k / 20 for k in range(21)]


class Scenario1Row(NamedTuple):
    series: Scenario
    r: float
    stats: SampleStats


class Scenario2Row(NamedTuple):
    r: float
    q: float
    stats: SampleStats


# population ids: scenario 1 first series, then traditional, then the
# scenario 2 grid with r as the outer loop
SCENARIO1_SERIES = (Scenario.FIRST, Scenario.TRADITIONAL)
SCENARIO2_BASE_ID = len(SCENARIO1_SERIES) * len(r_grid())


def scenario1_specs(master_seed: int = 0, sample_size: int = DEFAULT_SAMPLE_SIZE, g: int = 32, s: float = 0.3) -> list[PopulationSpec]:
    rs = r_grid()
    return [
        PopulationSpec(series, g, s, r, 0.0, sample_size, master_seed, k * len(rs) + i)
        for k, series in enumerate(SCENARIO1_SERIES)
        for i, r in enumerate(rs)
    ]


def scenario2_specs(master_seed: int = 0, sample_size: int = DEFAULT_SAMPLE_SIZE, g: int = 32, s: float = 0.3) -> list[PopulationSpec]:
    rs, qs = r_grid(), q_grid()
    return [
        PopulationSpec(Scenario.SECOND, g, s, r, q, sample_size, master_seed, SCENARIO2_BASE_ID + i * len(qs) + j)
        for i, r in enumerate(rs)
        for j, q in enumerate(qs)
    ]


def _evaluate(args: tuple[PopulationSpec, AvailabilityTable]) -> SampleStats:
    return evaluate_population(*args)


def evaluate_many(
    specs: Iterable[PopulationSpec], table: AvailabilityTable = TABLE_I, workers: int = 1
) -> list[SampleStats]:
    """Evaluate populations, in parallel if ``workers > 1``; results keep input order."""
    jobs = [(spec, table) for spec in specs]
    if workers <= 1:
        return [_evaluate(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate, jobs, chunksize=max(1, len(jobs) // (8 * workers))))


def sweep_scenario1(
    master_seed: int = 0,
    sample_size: int = DEFAULT_SAMPLE_SIZE,
    table: AvailabilityTable = TABLE_I,
    workers: int = 1,
    g: int = 32,
    s: float = 0.3,
) -> list[Scenario1Row]:
    specs = scenario1_specs(master_seed, sample_size, g, s)
    stats = evaluate_many(specs, table, workers)
    return [Scenario1Row(sp.scenario, sp.r, st) for sp, st in zip(specs, stats)]


def sweep_scenario2(
    master_seed: int = 0,
    sample_size: int = DEFAULT_SAMPLE_SIZE,
    table: AvailabilityTable = TABLE_I,
    workers: int = 1,
    g: int = 32,
    s: float = 0.3,
) -> list[Scenario2Row]:
    specs = scenario2_specs(master_seed, sample_size, g, s)
    stats = evaluate_many(specs, table, workers)
    return [Scenario2Row(sp.r, sp.q, st) for sp, st in zip(specs, stats)]
