"""Exact checks of the structural conditions zoo systems are built to satisfy."""

from collections.abc import Sequence
from fractions import Fraction

from skewgraph.exceptions import ValidationError
from skewgraph.models.base import format_fraction
from skewgraph.models.maps import PLMap
from skewgraph.models.sets import IntervalUnion
from skewgraph.models.system import SkewSystem
from skewgraph.models.zoo import KPairSpec, Word


def compose_word(word: Word, maps: Sequence[PLMap]) -> PLMap:
    """maps[w_n] ∘ ... ∘ maps[w_1] for a 1-based word."""
    result = PLMap.identity()
    for symbol in word:
        result = maps[symbol - 1].compose(result)
    return result


def lipschitz_on(f: PLMap, a: Fraction, b: Fraction) -> Fraction:
    """Largest slope of f over the pieces meeting (a, b)."""
    xs = f.breakpoints
    return max(
        slope
        for slope, lo, hi in zip(f.slopes, xs, xs[1:])
        if lo < b and hi > a
    )


def _fmt(interval: tuple[Fraction, Fraction]) -> str:
    return f"[{format_fraction(interval[0])}, {format_fraction(interval[1])}]"


class KPairValidator:
    """Validates the defining properties of a K-pair on its interval."""

    @staticmethod
    def cover_gap(spec: KPairSpec) -> Fraction:
        """Length of J left uncovered by the images of J under the contracting words."""
        a, b = spec.interval
        images = IntervalUnion(
            tuple(compose_word(w, spec.maps).image_interval(a, b) for w in spec.contracting_words)
        )
        covered = images.intersection(IntervalUnion.of((a, b)))
        return (b - a) - sum(covered.lengths(), Fraction(0))

    @staticmethod
    def check(spec: KPairSpec, require_cover: bool = True) -> list[str]:
        """
        Collect every violated K-pair property.

        Args:
            spec: The pair and its interval
            require_cover: Whether an inexact cover of J is reported as a finding

        Returns:
            Human-readable findings; empty when the pair is valid
        """
        findings: list[str] = []
        a, b = spec.interval
        f1, f2 = spec.maps
        j = _fmt(spec.interval)

        for name, f in (("f1", f1), ("f2", f2)):
            lo, hi = f.image_interval(a, b)
            if lo < a or hi > b:
                findings.append(f"{name} does not map J = {j} into itself")
        if f1.apply(a) != a or f1.slope_right(a) >= 1:
            findings.append(f"{format_fraction(a)} is not an attracting fixed point of f1")
        if f2.apply(b) != b or f2.slope_left(b) >= 1:
            findings.append(f"{format_fraction(b)} is not an attracting fixed point of f2")

        h = compose_word(spec.repelling_word, spec.maps)
        repelling = [
            p
            for p in h.fixed_points()
            if a < p < b and h.slope_left(p) > 1 and h.slope_right(p) > 1
        ]
        if not repelling:
            findings.append(
                f"Word {spec.repelling_word} has no repelling fixed point inside J = {j}"
            )

        for word in spec.contracting_words:
            g = compose_word(word, spec.maps)
            lo, hi = g.image_interval(a, b)
            if lo < a or hi > b:
                findings.append(f"Contracting word {word} leaves J = {j}")
            if lipschitz_on(g, a, b) >= 1:
                findings.append(f"Word {word} is not a contraction on J = {j}")
        if require_cover and KPairValidator.cover_gap(spec) != 0:
            findings.append(f"Contracting words do not cover J = {j}")
        return findings

    @staticmethod
    def validate(spec: KPairSpec) -> None:
        """
        Validate a K-pair.

        Raises:
            ValidationError: If any K-pair property fails
        """
        findings = KPairValidator.check(spec)
        if findings:
            raise ValidationError("; ".join(findings), "kpair")


class SpineFamilyValidator:
    """Checks the interval conditions of the four-map disconnected-spine family."""

    @staticmethod
    def check(system: SkewSystem, intervals: IntervalUnion) -> list[str]:
        findings: list[str] = []
        if system.k != 4 or system.fiber_dimension != 1:
            return ["The family needs four one-dimensional fiber maps"]
        f1, f2, f3, f4 = system.fiber_maps
        parts = intervals.components
        for i, (a, b) in enumerate(parts, start=1):
            for name, f in (("f1", f1), ("f2", f2)):
                lo, hi = f.image_interval(a, b)
                if lo < a or hi > b:
                    findings.append(f"{name}(I_{i}) is not contained in I_{i}")
            target = parts[i] if i < len(parts) else parts[-1]
            lo, hi = f4.image_interval(a, b)
            if not (target[0] < lo and hi < target[1]):
                findings.append(
                    f"f4(I_{i}) is not inside the interior of I_{min(i + 1, len(parts))}"
                )
        lo, hi = f3.image_interval(Fraction(0), Fraction(1))
        if lo < parts[0][0] or hi > parts[0][1]:
            findings.append("f3([0,1]) is not contained in I_1")
        if f3.lipschitz_bound >= 1:
            findings.append("f3 is not a contraction")
        return findings

    @staticmethod
    def validate(system: SkewSystem, intervals: IntervalUnion) -> None:
        findings = SpineFamilyValidator.check(system, intervals)
        if findings:
            raise ValidationError("; ".join(findings), "fiber_maps")
