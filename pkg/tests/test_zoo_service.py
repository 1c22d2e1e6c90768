"""Tests for the preset registry, zoo builders, structural validators and perturbations."""

from dataclasses import replace
from fractions import Fraction

import pytest

pytestmark = pytest.mark.unit

from skewgraph.exceptions import ValidationError
from skewgraph.models.symbols import MarkovSpec
from skewgraph.services.zoo import (
    KPairValidator,
    SpineFamilyValidator,
    build_binary_ifs,
    build_kpair,
    build_msplits,
    build_single_contraction,
    build_spine_family,
    compose_word,
    perturb,
    perturbation_harness,
)
from tests.conftest import AssertionHelpers

F = Fraction


class TestPresetRegistry:
    """Tests for ZooService lookups and overrides."""

    def test_all_presets_listed(self, zoo_service):
        names = {p.name for p in zoo_service.list_presets()}
        assert names == {
            "binary_ifs",
            "middle_third",
            "single_contraction",
            "identity",
            "contraction_cover",
            "msplits",
            "kpair",
            "spine_family",
            "theorem2",
            "porcupine",
        }

    @pytest.mark.parametrize("name", ["binary_ifs", "kpair", "porcupine", "identity"])
    def test_builds_with_defaults(self, zoo_service, name):
        entry = zoo_service.build(name)
        assert entry.name == name
        assert entry.system.k == 2

    def test_unknown_preset(self, zoo_service):
        with pytest.raises(ValidationError, match="Unknown preset 'tent'"):
            zoo_service.build("tent")

    def test_unknown_override(self, zoo_service):
        with pytest.raises(ValidationError, match="has no parameter"):
            zoo_service.build("binary_ifs", m=2)

    def test_theorem2_is_the_spine_family(self, zoo_service):
        alias = zoo_service.build("theorem2")
        entry = zoo_service.build("spine_family")
        assert [(f.breakpoints, f.values) for f in alias.system.fiber_maps] == [
            (f.breakpoints, f.values) for f in entry.system.fiber_maps
        ]
        assert alias.intervals == entry.intervals

    def test_override_reaches_builder(self, zoo_service):
        entry = zoo_service.build("spine_family", m=3)
        AssertionHelpers.assert_components(entry.intervals, 3, F(1, 4))

    def test_cover_extra_maps_from_tables(self, zoo_service):
        entry = zoo_service.build(
            "contraction_cover", extra_maps=[{"x": ["0", "1"], "y": ["0", "1/3"]}]
        )
        assert entry.system.k == 3
        assert entry.system.fiber_map(3).apply(1) == F(1, 3)

    def test_msplits_transition(self, zoo_service):
        entry = zoo_service.build("msplits", p11=0.25)
        assert entry.system.markov.p(1, 1) == pytest.approx(0.25)
        assert entry.system.markov.p(1, 2) == pytest.approx(0.75)


class TestBuilders:
    """Tests for builder parameter checks."""

    def test_msplits_parameter_ranges(self):
        with pytest.raises(ValidationError, match="p11"):
            build_msplits(p11=1)
        with pytest.raises(ValidationError, match="p21"):
            build_msplits(p21=0)

    def test_contraction_factor_range(self):
        with pytest.raises(ValidationError):
            build_single_contraction(c=1)

    def test_dimension_must_be_positive(self):
        with pytest.raises(ValidationError):
            build_single_contraction(m=0)

    def test_spine_family_needs_four_symbol_base(self):
        with pytest.raises(ValidationError, match="symbols"):
            build_spine_family(m=2, markov=MarkovSpec.uniform(3))

    def test_spine_family_trapping_region_contains_intervals(self, spine_family_entry):
        assert spine_family_entry.trapping_region.contains(spine_family_entry.intervals)

    def test_entry_to_dict(self, msplits_entry):
        data = msplits_entry.to_dict()
        assert data["name"] == "msplits"
        assert data["splitting_words"] == [[2, 2, 2, 1, 2], [2, 2, 2, 2, 2]]
        assert data["system"]["fiber_dimension"] == 1


class TestKPair:
    """Tests for the exact K-pair checks."""

    def test_shipped_pair_is_valid(self):
        spec = build_kpair()
        assert KPairValidator.check(spec) == []
        assert KPairValidator.cover_gap(spec) == 0

    def test_repelling_composition(self):
        spec = build_kpair()
        h = compose_word(spec.repelling_word, spec.maps)
        assert F(7, 20) in h.fixed_points()
        assert h.slope_left(F(7, 20)) == F(9, 4)

    def test_compose_word_applies_first_symbol_first(self):
        f1, f2 = build_kpair().maps
        h = compose_word((2, 1), (f1, f2))
        for x in (F(0), F(1, 5), F(1, 2), F(9, 10), F(1)):
            assert h.apply(x) == f1.apply(f2.apply(x))

    def test_swapped_maps_rejected(self):
        spec = build_kpair()
        swapped = replace(spec, f1=spec.f2, f2=spec.f1)
        findings = KPairValidator.check(swapped)
        assert any("attracting fixed point of f1" in f for f in findings)
        with pytest.raises(ValidationError):
            KPairValidator.validate(swapped)

    def test_missing_contracting_words(self):
        spec = replace(build_kpair(), contracting_words=((1, 1, 1),))
        assert KPairValidator.cover_gap(spec) > 0
        assert KPairValidator.check(spec, require_cover=False) == []
        assert any("do not cover" in f for f in KPairValidator.check(spec))


class TestSpineFamilyValidator:
    def test_family_is_valid(self, spine_family_entry):
        assert SpineFamilyValidator.check(spine_family_entry.system, spine_family_entry.intervals) == []

    def test_wrong_alphabet(self, binary_entry):
        findings = SpineFamilyValidator.check(binary_entry.system, binary_entry.intervals)
        assert findings == ["The family needs four one-dimensional fiber maps"]


class TestPerturbation:
    """Tests for jittered copies of zoo systems."""

    def test_negative_delta(self):
        with pytest.raises(ValidationError):
            perturb(build_binary_ifs().system, -0.1, seed=0)

    def test_seeded(self, kpair_entry):
        first = perturb(kpair_entry.system, 1e-3, seed=3)
        again = perturb(kpair_entry.system, 1e-3, seed=3)
        assert [f.values for f in first.fiber_maps] == [f.values for f in again.fiber_maps]

    def test_jitter_is_bounded(self, kpair_entry):
        jittered = perturb(kpair_entry.system, 1e-3, seed=1)
        for before, after in zip(kpair_entry.system.fiber_maps, jittered.fiber_maps):
            assert after.breakpoints == before.breakpoints
            assert all(abs(a - b) <= F(1, 1000) for a, b in zip(after.values, before.values))

    def test_zero_delta_keeps_kpair(self, kpair_entry):
        reports = perturbation_harness(kpair_entry, 0.0, seeds=(0, 1), workers=1)
        assert [r.seed for r in reports] == [0, 1]
        assert all(r.valid for r in reports)
        assert all(r.cover_gap == 0.0 for r in reports)

    def test_zero_delta_keeps_splitting(self, msplits_entry):
        reports = perturbation_harness(msplits_entry, 0.0, seeds=(0,), workers=1)
        assert reports[0].valid
        assert reports[0].findings == ()

    def test_service_reports_in_seed_order(self, zoo_service, kpair_entry):
        reports = zoo_service.perturbation_reports(kpair_entry, delta=1e-4, seeds=(4, 2, 7))
        assert [r.seed for r in reports] == [4, 2, 7]
        assert all(r.delta == 1e-4 for r in reports)
