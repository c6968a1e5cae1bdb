"""Discretized reference pipeline: aggregation, defuzzifiers, convergence."""

import math

import numpy as np
import pytest

from it2fuzz import (
    BoundSource,
    ClosedFormEngine,
    ConsequentSet,
    DomainTooNarrow,
    EngineConfig,
    Form,
    IT2Gaussian,
    Join,
    Partition,
    RefConfig,
    ReferenceEngine,
    Rule,
    RuleBase,
    SampledCurve,
    ZeroArea,
    ZeroMass,
    build_output_fou,
    coa_decomposition_check,
    coa_defuzz,
    default_rulebase,
    fire,
    infer_gc,
    infer_nt,
    nt_defuzz,
)

from helpers import collapsed_rulebase

RB = default_rulebase()
REF = RefConfig()
EXACT_REF = RefConfig(bound_source=BoundSource.EXACT)


def test_config_validation():
    with pytest.raises(ValueError):
        RefConfig(grid_points=100)
    with pytest.raises(ValueError):
        RefConfig(domain=(1.0, -1.0))
    with pytest.raises(ValueError):
        RefConfig(consequent_width=0.0)


def test_sampled_curve_validation():
    with pytest.raises(ValueError):
        SampledCurve((-1.0, 1.0), np.array([0.5]))
    with pytest.raises(ValueError):
        SampledCurve((-1.0, 1.0), np.array([0.1, -0.2, 0.3]))
    with pytest.raises(ValueError):
        SampledCurve((-1.0, 1.0), np.array([0.1, math.nan]))
    c = SampledCurve((-1.0, 1.0), np.zeros(5))
    assert c.ys[0] == -1.0 and c.ys[-1] == 1.0


def test_consequent_set_rows_peak_at_centers():
    cs = ConsequentSet((-1.0, 0.0, 1.0), 0.01)
    ys = np.linspace(-1.5, 1.5, 3001)
    mat = cs.matrix(ys)
    assert mat.shape == (3, 3001)
    for row, c in zip(mat, cs.centers):
        assert ys[int(np.argmax(row))] == pytest.approx(c, abs=1e-3)
        assert row.max() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        ConsequentSet((0.0,), 0.0)


def test_domain_too_narrow_rejected():
    tight = RefConfig(domain=(-1.02, 1.5))  # center -1 is within 5 widths
    with pytest.raises(DomainTooNarrow):
        build_output_fou(RB, tight, (0.0, 0.0))
    with pytest.raises(DomainTooNarrow):
        ReferenceEngine(RB, tight)


def test_single_rule_fou_scales_with_firing():
    # one rule, consequent 0: both output curves are the same consequent
    # bump scaled by the firing levels, so lower = fire.lower * upper exactly
    sigma = 0.3
    spread = sigma * math.sqrt(2.0 * math.log(2.0))  # lmf(center) = 1/2
    p = Partition((-1.2, 1.2),
                  (IT2Gaussian.uncertain_mean(-spread, spread, sigma),))
    rb = RuleBase((p,), (Rule((0,), 0.0),))
    f = fire(rb, EngineConfig(bound_source=BoundSource.EXACT), (0.0,))[0]
    assert f.upper == 1.0
    assert f.lower == pytest.approx(0.5, abs=1e-12)
    u, l = build_output_fou(rb, EXACT_REF, (0.0,))
    assert np.array_equal(l.values, f.lower * u.values)
    assert u.values.max() == pytest.approx(1.0, abs=1e-12)
    # fifty widths from the center the bump has fully underflowed
    assert u.values[int(np.argmin(np.abs(u.ys - 0.5)))] == 0.0
    assert coa_defuzz(u, l) == pytest.approx(0.0, abs=1e-12)


def test_three_bumps_from_demo_at_origin():
    u, _ = build_output_fou(RB, REF, (0.0, 0.0))

    def at(y):
        return u.values[int(np.argmin(np.abs(u.ys - y)))]

    assert at(-1.0) > 0.1 and at(1.0) > 0.1
    # three rules share center 0, so their mass stacks above one
    assert at(0.0) > 1.0
    assert at(0.5) == 0.0 and at(-0.5) == 0.0


def test_join_variants_at_saturated_corner():
    for join, cap in ((Join.SUM, None), (Join.SUM_CLIPPED, 1.0), (Join.MAX, 1.0)):
        ref = RefConfig(join=join)
        u, l = build_output_fou(RB, ref, (1.0, 1.0))
        assert bool(np.all(l.values <= u.values))
        if cap is None:
            assert float(u.values.max()) > 1.2
        else:
            assert float(u.values.max()) <= cap


@pytest.mark.parametrize("join", [Join.SUM, Join.SUM_CLIPPED, Join.MAX])
def test_rule_order_does_not_change_curves(join):
    ref = RefConfig(join=join)
    shuffled = RuleBase(RB.partitions, tuple(RB.rules[k] for k in
                                             (5, 2, 8, 0, 7, 4, 1, 6, 3)))
    for x in ((1.0, 1.0), (0.25, -0.7)):
        a_u, a_l = build_output_fou(RB, ref, x)
        b_u, b_l = build_output_fou(shuffled, ref, x)
        assert np.array_equal(a_u.values, b_u.values)
        assert np.array_equal(a_l.values, b_l.values)


def test_lower_curve_never_exceeds_upper():
    for x in ((0.0, 0.0), (0.5, -0.5), (1.0, 1.0), (-0.3, 0.8)):
        u, l = build_output_fou(RB, REF, x)
        assert bool(np.all(l.values <= u.values))


def test_triangle_centroid():
    ys = np.linspace(-0.7, 1.3, 10001)
    tri = np.maximum(0.0, 1.0 - np.abs(ys - 0.3))
    u = SampledCurve((-0.7, 1.3), tri)
    l = SampledCurve((-0.7, 1.3), np.zeros(ys.size))
    assert coa_defuzz(u, l) == pytest.approx(0.3, abs=1e-12)


def test_uniform_band_centroid_is_domain_center():
    u = SampledCurve((-1.0, 1.0), np.full(5001, 0.4))
    l = SampledCurve((-1.0, 1.0), np.zeros(5001))
    assert coa_defuzz(u, l) == pytest.approx(0.0, abs=1e-12)


def test_collapsed_band_raises_zero_area_but_nt_still_works():
    rb = collapsed_rulebase()
    u, l = build_output_fou(rb, EXACT_REF, (0.2, -0.1))
    assert np.array_equal(u.values, l.values)
    with pytest.raises(ZeroArea):
        coa_defuzz(u, l)
    # midline centroid degenerates to the centroid of the single curve
    expect = float(np.dot(u.ys, u.values) / u.values.sum())
    assert nt_defuzz(u, l) == pytest.approx(expect, abs=1e-12)


def test_empty_curves_raise_zero_mass():
    z = SampledCurve((-1.0, 1.0), np.zeros(201))
    with pytest.raises(ZeroMass):
        nt_defuzz(z, z)
    with pytest.raises(ZeroArea):
        coa_defuzz(z, z)


def test_defuzz_rejects_mismatched_grids():
    a = SampledCurve((-1.0, 1.0), np.ones(101))
    b = SampledCurve((-1.0, 1.0), np.ones(102))
    c = SampledCurve((-2.0, 1.0), np.ones(101))
    for other in (b, c):
        with pytest.raises(ValueError):
            coa_defuzz(a, other)


def test_symmetric_band_centers_both_defuzzifiers():
    u, l = build_output_fou(RB, REF, (0.0, 0.0))
    assert coa_defuzz(u, l) == pytest.approx(0.0, abs=1e-12)
    assert nt_defuzz(u, l) == pytest.approx(0.0, abs=1e-12)


def test_centroid_decomposition_identity():
    for x in ((0.25, 0.75), (-0.6, 0.1), (1.0, 1.0)):
        u, l = build_output_fou(RB, REF, x)
        lhs, rhs = coa_decomposition_check(u, l)
        assert abs(lhs - rhs) <= 1e-9


def test_decomposition_with_zero_lower_reduces_to_upper_centroid():
    u, _ = build_output_fou(RB, REF, (0.25, 0.75))
    zeros = SampledCurve(u.domain, np.zeros(u.values.size))
    lhs, rhs = coa_decomposition_check(u, zeros)
    expect = float(np.dot(u.ys, u.values) / u.values.sum())
    assert rhs == pytest.approx(expect, abs=1e-12)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_reference_engine_matches_pipeline_functions():
    gc = ReferenceEngine(RB)
    nt = ReferenceEngine(RB, method="nt")
    for x in ((0.5, -0.5), (0.25, 0.75), (-1.0, -1.0)):
        u, l = build_output_fou(RB, REF, x)
        assert gc.infer(x) == (coa_defuzz(u, l), False)
        assert nt.infer(x) == (nt_defuzz(u, l), False)


def test_reference_engine_flags_degenerate_instead_of_raising():
    gc = ReferenceEngine(collapsed_rulebase(), EXACT_REF)
    assert gc.infer((0.2, -0.1)) == (0.0, True)
    nt = ReferenceEngine(RB, method="nt")
    assert nt.infer((30.0, 30.0)) == (0.0, True)


def test_reference_engine_method_validation():
    with pytest.raises(ValueError):
        ReferenceEngine(RB, method="coa")


def test_reference_agrees_with_closed_forms_at_spots():
    gc_ref = ReferenceEngine(RB)
    nt_ref = ReferenceEngine(RB, method="nt")
    gc_cfg = EngineConfig()
    nt_cfg = EngineConfig(form=Form.NT_CLOSED)
    for x in ((0.5, -0.5), (0.25, 0.75), (-1.0, -1.0)):
        assert abs(gc_ref.infer(x).value - infer_gc(RB, gc_cfg, x).value) <= 1e-3
        assert abs(nt_ref.infer(x).value - infer_nt(RB, nt_cfg, x).value) <= 1e-3


def test_error_does_not_grow_as_width_halves():
    # keep the grid density per consequent width fixed while shrinking it
    probes = [(float(a), float(b)) for a in np.linspace(-1.0, 1.0, 5)
              for b in np.linspace(-1.0, 1.0, 5)]
    closed = ClosedFormEngine(RB)
    errs = []
    for w in (0.08, 0.04, 0.02, 0.01, 0.005):
        ref = RefConfig(consequent_width=w, grid_points=round(100.0 / w) + 1)
        eng = ReferenceEngine(RB, ref)
        errs.append(max(abs(eng.infer(p).value - closed.infer(p).value)
                        for p in probes))
    assert all(b <= a + 1e-9 for a, b in zip(errs, errs[1:]))
    assert errs[-1] <= 1e-3
