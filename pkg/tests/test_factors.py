"""Keyword classification tables, sentence rendering, and coherence checks."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx

from perfattrib.factors import (
    EPSILON,
    EffectSign,
    FactorAssessment,
    PerformanceStance,
    WeightStance,
    classify_allocation,
    classify_selection,
    ground_truth_factors,
    render_sentences,
    sign_from_stances,
    total_sign,
)
from perfattrib.records import EffectType
from perfattrib.report_io import RESPONSE_MARKER, emit_factor_rows, split_agent_response

OVER, UNDER, NEUT = WeightStance.OVERWEIGHT, WeightStance.UNDERWEIGHT, WeightStance.NEUTRAL
OUT, LAG, FLAT = (
    PerformanceStance.OUTPERFORMANCE,
    PerformanceStance.UNDERPERFORMANCE,
    PerformanceStance.NEUTRAL,
)
POS, NEG, ZERO = EffectSign.POSITIVE, EffectSign.NEGATIVE, EffectSign.ZERO


class TestClassifyAllocation:
    def test_overweight_outperformer_positive(self):
        got = classify_allocation("Consumer Staples", 0.145, 0.088, 0.097, 0.072)
        assert (got.weight_stance, got.performance_stance, got.sign) == (OVER, OUT, POS)

    def test_neutral_both_zero(self):
        got = classify_allocation("X", 0.10, 0.10, 0.05, 0.05)
        assert (got.weight_stance, got.performance_stance, got.sign) == (NEUT, FLAT, ZERO)
        assert got.value == 0.0

    def test_underweight_underperformer_positive(self):
        got = classify_allocation("Energy", 0.037, 0.075, 0.043, 0.0715)
        assert (got.weight_stance, got.performance_stance, got.sign) == (UNDER, LAG, POS)

    def test_nine_cell_table(self):
        # Weight direction x performance direction, including the epsilon
        # boundary rows where either leg is flat.
        want = {
            (0.02, 0.03): (OVER, OUT, POS),
            (0.02, -0.03): (OVER, LAG, NEG),
            (0.02, 0.0): (OVER, FLAT, ZERO),
            (-0.02, 0.03): (UNDER, OUT, NEG),
            (-0.02, -0.03): (UNDER, LAG, POS),
            (-0.02, 0.0): (UNDER, FLAT, ZERO),
            (0.0, 0.03): (NEUT, OUT, ZERO),
            (0.0, -0.03): (NEUT, LAG, ZERO),
            (0.0, 0.0): (NEUT, FLAT, ZERO),
        }
        for (dw, dr), cell in want.items():
            got = classify_allocation("S", 0.10 + dw, 0.10, 0.05 + dr, 0.05)
            assert (got.weight_stance, got.performance_stance, got.sign) == cell, (dw, dr)

    def test_epsilon_boundary_is_neutral(self):
        got = classify_allocation("S", 0.10 + 5e-13, 0.10, 0.05, 0.05 - 5e-13)
        assert got.weight_stance is NEUT
        assert got.performance_stance is FLAT
        assert got.sign is ZERO


class TestClassifySelection:
    def test_outperformance_positive(self):
        got = classify_selection("Consumer Staples", 0.145, 0.113, 0.097)
        assert (got.performance_stance, got.sign) == (OUT, POS)
        assert got.weight_stance is None

    def test_zero_weight_is_no_exposure(self):
        got = classify_selection("S", 0.0, 0.10, 0.02)
        assert got.sign is ZERO
        assert got.performance_stance is PerformanceStance.NO_EXPOSURE

    def test_underperformance_negative(self):
        got = classify_selection("Financials", 0.077, 0.043, 0.057)
        assert (got.performance_stance, got.sign) == (LAG, NEG)

    def test_six_cell_table(self):
        for dr, (stance, sign) in {
            0.03: (OUT, POS),
            -0.03: (LAG, NEG),
            0.0: (FLAT, ZERO),
        }.items():
            got = classify_selection("S", 0.20, 0.05 + dr, 0.05)
            assert (got.performance_stance, got.sign) == (stance, sign), dr
        for dr in (0.03, -0.03, 0.0):
            got = classify_selection("S", 0.0, 0.05 + dr, 0.05)
            assert (got.performance_stance, got.sign) == (
                PerformanceStance.NO_EXPOSURE, ZERO,
            ), dr


class TestTotalSign:
    def test_allocation_dominates(self):
        assert total_sign(0.0011, -0.0004) is POS

    def test_exact_offset_is_zero(self):
        assert total_sign(0.0007, -0.0007) is ZERO

    def test_both_negative(self):
        assert total_sign(-0.0004, -0.0007) is NEG

    def test_nine_sign_combinations(self):
        cases = [
            (0.002, 0.003, POS),
            (0.003, -0.002, POS),
            (-0.002, 0.003, POS),
            (-0.002, -0.003, NEG),
            (0.002, -0.003, NEG),
            (-0.003, 0.002, NEG),
            (0.002, 0.0, POS),
            (0.0, -0.002, NEG),
            (0.0, 0.0, ZERO),
        ]
        for alloc, sel, want in cases:
            assert total_sign(alloc, sel) is want, (alloc, sel)


class TestSignCoherence:
    @settings(max_examples=300)
    @given(
        w=st.integers(0, 10000),
        bench_w=st.integers(0, 10000),
        group_b=st.integers(-1500, 1500),
        total_b=st.integers(-1500, 1500),
    )
    def test_allocation_sign_matches_value(self, w, bench_w, group_b, total_b):
        got = classify_allocation("S", w / 10000, bench_w / 10000, group_b / 10000, total_b / 10000)
        if got.sign is POS:
            assert got.value > 0
        elif got.sign is NEG:
            assert got.value < 0
        else:
            scale = max(abs(w - bench_w), abs(group_b - total_b), 1) / 10000
            assert abs(got.value) <= EPSILON * scale

    @settings(max_examples=300)
    @given(
        w=st.integers(0, 10000),
        group_r=st.integers(-1500, 1500),
        group_b=st.integers(-1500, 1500),
    )
    def test_selection_sign_matches_value(self, w, group_r, group_b):
        got = classify_selection("S", w / 10000, group_r / 10000, group_b / 10000)
        if got.sign is POS:
            assert got.value > 0
        elif got.sign is NEG:
            assert got.value < 0
        if w > 0:
            assert (got.sign is POS) == (got.performance_stance is OUT)
            assert (got.sign is NEG) == (got.performance_stance is LAG)


def _assessment_pair(sector="Consumer Staples", w=0.145, bw=0.088, pr=0.113, br=0.097, b=0.0715):
    return (
        classify_allocation(sector, w, bw, br, b),
        classify_selection(sector, w, pr, br),
    ), br, b, pr


class TestRenderSentences:
    def test_positive_overweight_sentence(self):
        pair, br, b, pr = _assessment_pair()
        alloc_bullet, sel_bullet = render_sentences(pair, br, b, pr)
        assert alloc_bullet.startswith("- The 'Consumer Staples' sector had a 'positive' ")
        assert "'overweight'" in alloc_bullet
        assert "'outperformed'" in alloc_bullet
        assert "'0.0015'" in alloc_bullet
        assert "benchmark total return of '0.0715'" in alloc_bullet
        assert "'positive' selection effect of '0.0023'" in sel_bullet
        assert "(Portfolio Return: '0.1130' vs Benchmark Return: '0.0970')" in sel_bullet

    def test_underweight_underperformer_sentence(self):
        pair, br, b, pr = _assessment_pair("Energy", 0.037, 0.075, 0.032, 0.043)
        alloc_bullet, _ = render_sentences(pair, br, b, pr)
        assert "'underweight'" in alloc_bullet
        assert "'underperformed'" in alloc_bullet

    def test_zero_effect_uses_zero_and_neutral_slots(self):
        pair, br, b, pr = _assessment_pair("Flat", 0.10, 0.10, 0.05, 0.05, b=0.05)
        alloc_bullet, sel_bullet = render_sentences(pair, br, b, pr)
        assert "'zero' allocation effect" in alloc_bullet
        assert "'neutral'" in alloc_bullet
        assert "'zero' selection effect" in sel_bullet
        assert "'neutral'" in sel_bullet

    def test_mismatched_pair_rejected(self):
        pair, br, b, pr = _assessment_pair()
        with pytest.raises(ValueError, match=r"\(allocation, selection\)"):
            render_sentences((pair[1], pair[0]), br, b, pr)

    def test_injective_on_stance_tuples(self):
        alloc_texts = set()
        for weight_stance, performance_stance in itertools.product(WeightStance, [OUT, LAG, FLAT]):
            alloc = FactorAssessment(
                "S", EffectType.ALLOCATION, 0.001, weight_stance, performance_stance,
                sign_from_stances(EffectType.ALLOCATION, weight_stance, performance_stance),
            )
            sel = FactorAssessment(
                "S", EffectType.SELECTION, 0.001, None, OUT,
                sign_from_stances(EffectType.SELECTION, None, OUT),
            )
            bullet, _ = render_sentences((alloc, sel), 0.05, 0.04, 0.06)
            alloc_texts.add(bullet)
        assert len(alloc_texts) == 9

    def test_round_trip_through_response_extraction(self):
        # Values on the 4-dp grid so quoted numbers parse back bit-for-bit.
        pairs = []
        for weight_stance, performance_stance in itertools.product(WeightStance, [OUT, LAG, FLAT]):
            alloc = FactorAssessment(
                "Industrials", EffectType.ALLOCATION, 0.0021, weight_stance, performance_stance,
                sign_from_stances(EffectType.ALLOCATION, weight_stance, performance_stance),
            )
            for sel_stance in [OUT, LAG, FLAT, PerformanceStance.NO_EXPOSURE]:
                sel = FactorAssessment(
                    "Industrials", EffectType.SELECTION, -0.0007, None, sel_stance,
                    sign_from_stances(EffectType.SELECTION, None, sel_stance),
                )
                pairs.append((alloc, sel))
        for pair in pairs:
            bullets = render_sentences(pair, 0.05, 0.04, 0.06)
            raw = "\n".join(bullets) + f"\n{RESPONSE_MARKER}\n" + emit_factor_rows(pair)
            response = split_agent_response(raw)
            assert response.parseable
            assert len(response.bullets) == 2
            assert response.factor_rows == pair


class TestGroundTruthFactors:
    def test_cardinality_two_per_sector(self, sample_obj2_path):
        from perfattrib.report_io import parse_objective_two

        first, _ = parse_objective_two(sample_obj2_path)
        assessments = ground_truth_factors(first)
        assert len(assessments) == 24
        assert sum(a.effect_type is EffectType.ALLOCATION for a in assessments) == 12

    def test_utilities_overweight_underperformer_negative(self, sample_obj2_path):
        from perfattrib.report_io import parse_objective_two

        first, _ = parse_objective_two(sample_obj2_path)
        assessments = ground_truth_factors(first)
        utilities = next(
            a for a in assessments
            if a.sector == "Utilities" and a.effect_type is EffectType.ALLOCATION
        )
        assert (utilities.weight_stance, utilities.performance_stance, utilities.sign) == (
            OVER, LAG, NEG,
        )

    def test_exam_health_care_allocation(self, exam_slice):
        assessments = ground_truth_factors(exam_slice)
        health = next(
            a for a in assessments
            if a.sector == "Health Care" and a.effect_type is EffectType.ALLOCATION
        )
        assert (health.weight_stance, health.performance_stance, health.sign) == (UNDER, LAG, POS)
        assert health.value == approx(0.0036, abs=1e-12)
