"""Case classification, instance generation, and the crosscheck loop."""

from fractions import Fraction

import pytest

from cuspidal.binform import (
    POINT_A,
    BinaryForm,
    P1Point,
    ZeroFormError,
    ZeroScheme,
    apolar_coeffs,
)
from cuspidal.classifier import (
    ClassifierError,
    GeneratedInstance,
    InstanceSpec,
    SchemeDegreeError,
    SpanCriterionDisagreement,
    classify,
    classify_e3,
    classify_e4,
    crosscheck,
    generate_instance,
    o_in_span,
    scheme_span_basis,
    span_center_routes,
    span_matrix,
)
from cuspidal.projection import ProjectionFrame, cusp_curve_point

F = Fraction


def form_from_avec(d, avec):
    from math import comb

    return BinaryForm(d, tuple(F(avec[i]) * comb(d, i) for i in range(d + 1)))


def scheme_of(pairs):
    return ZeroScheme(tuple((p.linear_form(), m) for p, m in pairs))


def pt(tau):
    return P1Point(F(1), F(tau))


class TestSpans:
    def test_single_point_span_is_its_power_vector(self):
        W = scheme_of([(pt(2), 1)])
        basis = scheme_span_basis(W, 4)
        assert len(basis) == 1
        vec = basis[0]
        expect = [F(2) ** i for i in range(5)]
        ratios = {vec[i] / expect[i] for i in range(5)}
        assert len(ratios) == 1

    def test_double_cusp_preimage_spans_first_two_slots(self):
        W = scheme_of([(POINT_A, 2)])
        basis = scheme_span_basis(W, 4)
        assert len(basis) == 2
        for vec in basis:
            assert all(vec[i] == 0 for i in range(2, 5))

    def test_double_point_span_contains_tangent_direction(self):
        W = scheme_of([(pt(1), 2)])
        basis = scheme_span_basis(W, 4)
        assert len(basis) == 2
        from cuspidal import linalg

        assert linalg.in_span(basis, tuple(F(x) for x in (1, 1, 1, 1, 1)))
        assert linalg.in_span(basis, tuple(F(x) for x in (0, 1, 2, 3, 4)))
        assert not linalg.in_span(basis, tuple(F(x) for x in (0, 1, 0, 0, 0)))

    def test_full_degree_scheme_spans_everything(self):
        W = scheme_of([(pt(k), 1) for k in (1, 2, 3, 4)] + [(POINT_A, 1)])
        assert W.degree == 5
        basis = scheme_span_basis(W, 4)
        assert len(basis) == 5

    def test_degree_beyond_independence_regime_rejected(self):
        W = scheme_of([(pt(k), 1) for k in range(1, 7)])
        with pytest.raises(SchemeDegreeError):
            scheme_span_basis(W, 4)

    def test_span_matrix_rejects_oversized_divisor(self):
        h = scheme_of([(pt(k), 1) for k in (1, 2, 3, 4, 5)]).product_form()
        with pytest.raises(SchemeDegreeError):
            span_matrix(h, 4)

    def test_empty_scheme_spans_nothing(self):
        assert scheme_span_basis(ZeroScheme(()), 4) == []


class TestOInSpan:
    def test_double_cusp_preimage_contains_center(self):
        frame = ProjectionFrame(3)
        assert o_in_span(scheme_of([(POINT_A, 2)]), frame) is True

    def test_simple_cusp_preimage_plus_point_misses_center(self):
        frame = ProjectionFrame(3)
        W = scheme_of([(POINT_A, 1), (pt(1), 1)])
        assert o_in_span(W, frame) is False

    def test_three_distinct_points_miss_center(self):
        frame = ProjectionFrame(3)
        W = scheme_of([(pt(1), 1), (pt(2), 1), (pt(3), 1)])
        assert o_in_span(W, frame) is False

    def test_double_point_off_cusp_misses_center(self):
        frame = ProjectionFrame(3)
        assert o_in_span(scheme_of([(pt(1), 2)]), frame) is False

    def test_degree_above_regime_rejected(self):
        frame = ProjectionFrame(3)
        W = scheme_of([(pt(k), 1) for k in range(1, 7)])
        with pytest.raises(SchemeDegreeError):
            o_in_span(W, frame)

    def test_routes_agree_on_random_schemes_within_theorem_domain(self):
        import random

        rng = random.Random("o-span-agreement")
        for n in range(3, 9):
            frame = ProjectionFrame(n)
            for _ in range(40):
                deg = rng.randint(1, n)
                pairs = []
                left = deg
                while left:
                    m = rng.randint(1, left)
                    tau = rng.randint(-6, 6)
                    p = POINT_A if tau == 6 else pt(tau)
                    if any(p == q for q, _ in pairs):
                        continue
                    pairs.append((p, m))
                    left -= m
                W = scheme_of(pairs)
                by_span, by_mult = span_center_routes(W, frame)
                assert by_span == by_mult

    def test_routes_part_ways_at_degree_n_plus_1(self):
        # four points with tau summing to zero span a hyperplane through
        # the center, yet none of them is the cusp preimage
        frame = ProjectionFrame(3)
        W = scheme_of([(pt(1), 1), (pt(-1), 1), (pt(2), 1), (pt(-2), 1)])
        by_span, by_mult = span_center_routes(W, frame)
        assert by_span is True and by_mult is False
        with pytest.raises(SpanCriterionDisagreement):
            o_in_span(W, frame)

    def test_routes_part_ways_at_degree_n_plus_2(self):
        # a reduced scheme of degree n+2 spans the whole space
        frame = ProjectionFrame(3)
        W = scheme_of([(pt(k), 1) for k in (1, 2, 3, 4, 5)])
        by_span, by_mult = span_center_routes(W, frame)
        assert by_span is True and by_mult is False


class TestClassifyNoGap:
    def test_two_powers_low_degree_regime(self):
        # n=6, two distinct simple points: exact value 2, unique witness
        d = 7
        avec = [F(1) + F(-1) ** i for i in range(d + 1)]
        M = form_from_avec(d, avec)
        v = classify_e4(M)
        assert v.case_tag == "e4_i"
        assert (v.lo, v.hi) == (2, 2)
        assert v.exact and v.prediction == 2
        assert v.witness_scheme == scheme_of([(pt(1), 1), (pt(-1), 1)])
        assert v.witness_points == (
            cusp_curve_point(6, pt(-1)),
            cusp_curve_point(6, pt(1)),
        )
        assert any("unique" in note for note in v.notes)

    def test_interval_band(self):
        # n=7, four points: 2*4 = n+1, value pinned to {3, 4}
        inst = generate_instance(InstanceSpec("e4_ii", 7, 4, seed=1))
        v = inst.truth
        assert v.case_tag == "e4_ii"
        assert (v.lo, v.hi) == (3, 4)
        assert not v.exact and v.prediction == (3, 4)

    def test_generic_only_band(self):
        # n=7, five points: 2*5 = n+3, generic value 4
        inst = generate_instance(InstanceSpec("e4_iii", 7, 5, seed=0))
        v = inst.truth
        assert v.case_tag == "e4_iii"
        assert (v.lo, v.hi) == (4, 4)
        assert any("generic" in note for note in v.notes)

    def test_rejects_border_gap_input(self):
        B = form_from_avec(8, [1, 1, 1, 0, 0, 0, 0, 0, 0])
        with pytest.raises(ClassifierError):
            classify_e4(B)

    def test_rejects_pure_power(self):
        M = form_from_avec(7, [1] * 8)
        with pytest.raises(ClassifierError):
            classify_e4(M)

    def test_rejects_center(self):
        avec = [0] * 8
        avec[1] = 1
        with pytest.raises(ClassifierError):
            classify_e4(form_from_avec(7, avec))

    def test_rejects_small_degree(self):
        with pytest.raises(ClassifierError):
            classify_e4(BinaryForm(3, (F(1), F(0), F(0), F(1))))

    def test_rejects_zero(self):
        with pytest.raises(ZeroFormError):
            classify_e4(BinaryForm(7, (F(0),) * 8))

    def test_rejects_mismatched_frame(self):
        M = form_from_avec(7, [F(1) + F(-1) ** i for i in range(8)])
        with pytest.raises(ClassifierError):
            classify_e4(M, ProjectionFrame(5))


class TestClassifyGap:
    def test_triple_cusp_preimage(self):
        # n=7, w=3, scheme 3A: value n+3-w = 7
        B = form_from_avec(8, [1, 1, 1, 0, 0, 0, 0, 0, 0])
        v = classify_e3(B)
        assert v.case_tag == "e3_2"
        assert v.prediction == 7
        assert v.inputs["mult_A"] == 3

    def test_double_cusp_preimage_alone(self):
        B = form_from_avec(8, [1, 1, 0, 0, 0, 0, 0, 0, 0])
        v = classify_e3(B)
        assert v.case_tag == "e3_3_cusp"
        assert v.prediction == 1
        assert v.witness_points == (cusp_curve_point(7, POINT_A),)

    def test_membership_subcase_drops_two(self):
        # n=7, w=4, W = 2A + (1:1) + (1:-1), B inside the center-extended
        # span of the reduced residual: value w-2 = 2
        B = form_from_avec(8, [2, 1, 2, 0, 2, 0, 2, 0, 2])
        v = classify_e3(B)
        assert v.case_tag == "e3_3_wminus2"
        assert v.prediction == 2
        assert v.witness_scheme == scheme_of([(pt(1), 1), (pt(-1), 1)])
        assert v.witness_points == (
            cusp_curve_point(7, pt(-1)),
            cusp_curve_point(7, pt(1)),
        )

    def test_membership_subcase_drops_one(self):
        # same scheme, B outside that span: value w-1 = 3
        B = form_from_avec(8, [3, 1, 2, 0, 2, 0, 2, 0, 2])
        v = classify_e3(B)
        assert v.case_tag == "e3_3_wminus1"
        assert v.prediction == 3
        assert v.witness_scheme == scheme_of(
            [(POINT_A, 1), (pt(1), 1), (pt(-1), 1)]
        )
        assert v.witness_points == (
            cusp_curve_point(7, pt(-1)),
            cusp_curve_point(7, POINT_A),
            cusp_curve_point(7, pt(1)),
        )

    def test_simple_cusp_preimage_band(self):
        # n=8, w=4, multiplicity 1 at the cusp preimage: value n+2-w = 6
        inst = generate_instance(InstanceSpec("e3_5", 8, 4, seed=0))
        v = inst.truth
        assert v.case_tag == "e3_5"
        assert v.prediction == 6
        assert v.inputs["mult_A"] == 1

    def test_missing_cusp_preimage_exact_band(self):
        # n=9, w=4, 2w <= n-1: value n+1-w = 6
        inst = generate_instance(InstanceSpec("e3_4_exact", 9, 4, seed=0))
        v = inst.truth
        assert v.case_tag == "e3_4_exact"
        assert v.prediction == 6
        assert v.inputs["mult_A"] == 0

    def test_missing_cusp_preimage_interval_band(self):
        # n=8, w=4, 2w = n: value in [n+1-w, n+3-w] = [5, 7]
        inst = generate_instance(InstanceSpec("e3_4_interval", 8, 4, seed=0))
        v = inst.truth
        assert v.case_tag == "e3_4_interval"
        assert (v.lo, v.hi) == (5, 7)

    def test_double_cusp_preimage_with_nonreduced_residual(self):
        # W = 2A + 2Q needs the multiplicity-2 branch, not the membership one
        inst = generate_instance(InstanceSpec("e3_2", 8, 4, seed=3))
        v = inst.truth
        assert v.case_tag == "e3_2"
        assert v.prediction == 8 + 3 - 4

    def test_out_of_scope_band_reported_not_raised(self):
        # n=6, w=4, no cusp preimage: 2w = n+2 exceeds the m=0 clauses
        import random

        from cuspidal.apolarity import rank as sylvester_rank

        rng = random.Random("oos-construct")
        W = scheme_of([(pt(1), 2), (pt(2), 1), (pt(3), 1)])
        basis = scheme_span_basis(W, 7)
        found = None
        for _ in range(60):
            coeffs = [F(rng.randint(1, 9)) for _ in basis]
            avec = [
                sum(c * v[i] for c, v in zip(coeffs, basis))
                for i in range(8)
            ]
            B = form_from_avec(7, avec)
            if B.is_zero():
                continue
            cert = sylvester_rank(B)
            if cert.border_rank != 4 or cert.witness_scheme != W:
                continue
            found = B
            break
        assert found is not None
        v = classify_e3(found)
        assert v.case_tag == "out_of_scope"
        assert v.prediction is None and v.lo is None
        assert any("2w" in note for note in v.notes)

    def test_rejects_no_gap_input(self):
        M = form_from_avec(7, [F(1) + F(-1) ** i for i in range(8)])
        with pytest.raises(ClassifierError):
            classify_e3(M)

    def test_dispatch_picks_the_right_theorem(self):
        gap = form_from_avec(8, [1, 1, 1, 0, 0, 0, 0, 0, 0])
        nogap = form_from_avec(7, [F(1) + F(-1) ** i for i in range(8)])
        assert classify(gap).theorem == "e3"
        assert classify(nogap).theorem == "e4"

    def test_verdict_json_shape(self):
        v = classify_e3(form_from_avec(8, [2, 1, 2, 0, 2, 0, 2, 0, 2]))
        blob = v.to_json()
        assert blob["case"] == "e3_3_wminus2"
        assert blob["prediction"] == 2
        assert blob["witness"]["degree"] == 2
        assert len(blob["witness_points_on_X"]) == 2
        assert blob["inputs"]["w"] == 4


class TestGeneration:
    def test_deterministic(self):
        a = generate_instance(InstanceSpec("e3_2", 7, 3, seed=5))
        b = generate_instance(InstanceSpec("e3_2", 7, 3, seed=5))
        assert a.form == b.form and a.scheme == b.scheme

    def test_seeds_vary(self):
        a = generate_instance(InstanceSpec("e4_i", 8, 3, seed=0))
        b = generate_instance(InstanceSpec("e4_i", 8, 3, seed=1))
        assert a.form != b.form

    @pytest.mark.parametrize(
        "tag,n,level",
        [
            ("e4_i", 6, 2),
            ("e4_i", 8, 4),
            ("e4_ii", 7, 4),
            ("e4_ii", 8, 5),
            ("e4_iii", 5, 4),
            ("e3_2", 7, 3),
            ("e3_2", 8, 5),
            ("e3_3_wminus1", 7, 4),
            ("e3_3_wminus2", 7, 4),
            ("e3_3_wminus1", 9, 5),
            ("e3_3_wminus2", 9, 5),
            ("e3_3_cusp", 6, 2),
            ("e3_4_exact", 9, 4),
            ("e3_4_interval", 8, 4),
            ("e3_5", 8, 4),
            ("e3_5", 10, 5),
        ],
    )
    def test_annotation_consistency(self, tag, n, level):
        inst = generate_instance(InstanceSpec(tag, n, level, seed=2))
        assert inst.truth.case_tag == tag
        assert inst.spec.n == n and inst.spec.level == level
        from cuspidal.apolarity import rank as sylvester_rank

        cert = sylvester_rank(inst.form)
        if tag.startswith("e4"):
            assert cert.rank == cert.border_rank == level
        else:
            assert cert.border_rank == level and cert.rank > level
            assert cert.witness_scheme == inst.scheme

    def test_instance_json_roundtrippable(self):
        inst = generate_instance(InstanceSpec("e4_i", 6, 2, seed=0))
        blob = inst.to_json()
        assert blob["degree"] == 7
        rebuilt = BinaryForm(
            blob["degree"], tuple(F(c) for c in blob["coeffs"])
        )
        assert rebuilt == inst.form
        assert blob["truth"]["case"] == "e4_i"

    def test_spec_validation(self):
        with pytest.raises(ClassifierError):
            InstanceSpec("e4_iii", 6, 4)  # even n
        with pytest.raises(ClassifierError):
            InstanceSpec("e3_3_cusp", 7, 3)  # level must be 2
        with pytest.raises(ClassifierError):
            InstanceSpec("e4_i", 6, 4)  # 2*level > n
        with pytest.raises(ClassifierError):
            InstanceSpec("e3_5", 7, 4)  # 2w > n
        with pytest.raises(ClassifierError):
            InstanceSpec("e3_1_info", 7, 3)  # no recipe
        with pytest.raises(ClassifierError):
            InstanceSpec("bogus", 7, 3)


class TestCrosscheck:
    def test_no_gap_low_regime_matches_with_witness(self):
        inst = generate_instance(InstanceSpec("e4_i", 6, 2, seed=4))
        report = crosscheck(inst.form)
        assert report["case"] == "e4_i"
        assert report["prediction"] == 2
        assert report["fiber_value"] == 2
        assert report["match"] is True
        assert report["witness_match"] is True
        assert report["fiber_complete"] is True

    def test_interval_case_containment(self):
        inst = generate_instance(InstanceSpec("e4_ii", 7, 4, seed=2))
        report = crosscheck(inst.form)
        assert report["case"] == "e4_ii"
        assert report["match"] is True
        assert 3 <= report["fiber_value"] <= 4

    def test_gap_cases_match_fiber_scan(self):
        for tag, n, level in [
            ("e3_2", 7, 3),
            ("e3_3_wminus1", 7, 4),
            ("e3_3_wminus2", 7, 4),
            ("e3_3_cusp", 7, 2),
            ("e3_5", 8, 4),
            ("e3_4_exact", 9, 4),
        ]:
            inst = generate_instance(InstanceSpec(tag, n, level, seed=6))
            report = crosscheck(inst.form)
            assert report["case"] == tag, (tag, report)
            assert report["match"] is True, (tag, report)
            assert report["o_span"]["agree"] is True

    def test_frozen_membership_pair_against_fiber(self):
        lo = crosscheck(form_from_avec(8, [2, 1, 2, 0, 2, 0, 2, 0, 2]))
        hi = crosscheck(form_from_avec(8, [3, 1, 2, 0, 2, 0, 2, 0, 2]))
        assert lo["case"] == "e3_3_wminus2" and lo["fiber_value"] == 2
        assert hi["case"] == "e3_3_wminus1" and hi["fiber_value"] == 3
        assert lo["match"] is True and hi["match"] is True

    def test_pure_power_reports_error_but_still_scans(self):
        M = form_from_avec(7, [1] * 8)
        report = crosscheck(M)
        assert "classifier_error" in report
        assert report["fiber_value"] == 1
        assert report["match"] is None

    def test_report_is_json_serializable(self):
        import json

        inst = generate_instance(InstanceSpec("e3_3_cusp", 6, 2, seed=0))
        report = crosscheck(inst.form)
        json.dumps(report)
