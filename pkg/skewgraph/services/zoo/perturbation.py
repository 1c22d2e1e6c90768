"""Jitter zoo systems and re-check the conditions they were built to satisfy."""

import logging
from collections.abc import Sequence
from dataclasses import replace
from fractions import Fraction

from skewgraph.config import get_settings
from skewgraph.exceptions import SkewGraphError, ValidationError
from skewgraph.models.base import ONE, ZERO
from skewgraph.models.maps import FiberMap, PLMap, ProductMap
from skewgraph.models.system import SkewSystem
from skewgraph.models.zoo import KPairSpec, PerturbationReport, ZooEntry
from skewgraph.services import fiber
from skewgraph.services.parallel import parallel_map
from skewgraph.services.splitting_service import SplittingService
from skewgraph.services.symbolic import make_rng
from skewgraph.services.zoo.builders import transported_kpair
from skewgraph.services.zoo.validation import KPairValidator, SpineFamilyValidator

logger = logging.getLogger(__name__)

# Jitter is drawn on this dyadic grid so perturbed maps stay cheap to compose exactly.
JITTER_RESOLUTION = 2**16


def _jitter_map(f: PLMap, delta: float, rng) -> PLMap:
    """Move interior vertex values by at most delta; fixed points and end values stay put."""
    steps = int(delta * JITTER_RESOLUTION)
    values = list(f.values)
    for i, (x, y) in enumerate(zip(f.breakpoints, f.values)):
        if x in (ZERO, ONE) or x == y:
            continue
        shift = Fraction(int(rng.integers(-steps, steps + 1)), JITTER_RESOLUTION)
        values[i] = min(ONE, max(ZERO, y + shift))
    return PLMap(f.breakpoints, tuple(values), injective=f.injective)


def _jitter(f: FiberMap, delta: float, rng) -> FiberMap:
    if isinstance(f, ProductMap):
        return ProductMap(tuple(_jitter_map(g, delta, rng) for g in f.factors))
    return _jitter_map(f, delta, rng)


def perturb(sys: SkewSystem, delta: float, seed: int) -> SkewSystem:
    """
    A copy of the system whose fiber maps have interior vertex values moved by ≤ delta.

    Raises:
        ValidationError: If delta is negative or a jittered map stops being monotone
    """
    if delta < 0:
        raise ValidationError("delta must be nonnegative", "delta")
    rng = make_rng(seed, "perturb")
    return sys.with_maps(tuple(_jitter(f, delta, rng) for f in sys.fiber_maps))


def _kpairs(entry: ZooEntry, system: SkewSystem) -> list[KPairSpec]:
    if entry.kpair is not None:
        f1, f2 = system.fiber_maps[:2]
        return [replace(entry.kpair, f1=f1, f2=f2)]
    if system.name == "spine_family" and entry.intervals is not None:
        f1, f2 = system.fiber_maps[:2]
        return [transported_kpair(a, b - a, f1, f2) for a, b in entry.intervals]
    return []


def _rebuilt(entry: ZooEntry, system: SkewSystem) -> ZooEntry:
    kpair = entry.kpair
    if kpair is not None:
        kpair = replace(kpair, f1=system.fiber_maps[0], f2=system.fiber_maps[1])
    return replace(entry, system=system, kpair=kpair)


def check_entry(entry: ZooEntry, system: SkewSystem) -> tuple[list[str], Fraction | None]:
    """Findings for a (possibly perturbed) system and the largest K-pair cover gap."""
    findings: list[str] = []
    if system.name == "spine_family" and entry.intervals is not None:
        findings += SpineFamilyValidator.check(system, entry.intervals)
    gaps = []
    for spec in _kpairs(entry, system):
        findings += KPairValidator.check(spec, require_cover=False)
        gaps.append(KPairValidator.cover_gap(spec))
    if entry.trapping_region is not None:
        image = fiber.image(system.fiber_maps[0], entry.trapping_region)
        for f in system.fiber_maps[1:]:
            image = image.union(fiber.image(f, entry.trapping_region))
        if not entry.trapping_region.contains(image):
            findings.append("Trapping region is no longer forward invariant")
    if entry.splitting_words is not None:
        try:
            SplittingService().check_split(system, *entry.splitting_words)
        except SkewGraphError as e:
            findings.append(f"Splitting words fail: {e}")
    return findings, (max(gaps) if gaps else None)


def perturbation_harness(
    entry: ZooEntry,
    delta: float | None = None,
    seeds: Sequence[int] = (0, 1, 2, 3, 4),
    workers: int | None = None,
) -> list[PerturbationReport]:
    """
    Perturb an entry once per seed and re-validate it.

    An inexact K-pair cover is reported through `cover_gap`, not as a finding.

    Args:
        entry: The zoo entry to perturb
        delta: Jitter size (default from settings)
        seeds: One perturbation per seed
        workers: Thread count (default from settings)

    Returns:
        One PerturbationReport per seed, in seed order
    """
    settings = get_settings()
    delta = delta if delta is not None else settings.perturbation_delta
    workers = workers if workers is not None else settings.worker_count()

    def run(seed: int) -> PerturbationReport:
        try:
            system = perturb(entry.system, delta, seed)
        except ValidationError as e:
            return PerturbationReport(seed, delta, False, (str(e),))
        findings, gap = check_entry(entry, system)
        return PerturbationReport(
            seed=seed,
            delta=delta,
            valid=not findings,
            findings=tuple(findings),
            entry=_rebuilt(entry, system),
            cover_gap=float(gap) if gap is not None else None,
        )

    reports = parallel_map(run, list(seeds), workers)
    logger.info(
        f"Perturbation of {entry.name} (delta={delta}): "
        f"{sum(r.valid for r in reports)}/{len(reports)} valid"
    )
    return reports
