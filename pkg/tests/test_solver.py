"""Picard iteration, error envelopes, and the finite-carrier oracle.

Covers:
    - the worked 2x/7 run: iterates, limit, exact step ratios
    - immediate convergence when the start is already fixed
    - max_iter, divergence, and carrier-escape terminations
    - the tail envelope: hand values, monotone decay, stop-rule bound
    - decay/cauchy verification including forged-delta negative controls
    - multi-start uniqueness probing and brute-force fixed points
"""

import math

import pytest

from ametric_fix import (
    CarrierDomainError,
    MapSpec,
    SelfMap,
    StopRule,
    UsageError,
    brute_force_fixed_points,
    make_absdiff_space,
    make_lifted_space,
    make_map,
    picard_run,
    rep_distance,
    tail_bound,
    uniqueness_probe,
    verify_cauchy,
    verify_decay,
)

SEED = 91

DISCRETE_3 = [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]


def paper_trace(t=3, eps=1e-12):
    s = make_absdiff_space(t)
    f = make_map(MapSpec.of("two-sevenths"), s)
    return s, picard_run(s, f, 7.0, 2 / 7, StopRule(eps=eps))


def test_picard_worked_example():
    s, trace = paper_trace()
    assert trace.status == "converged"
    assert trace.iterates[0] == 7.0
    assert trace.iterates[1] == 2.0
    assert trace.iterates[2] == pytest.approx(4 / 7, rel=1e-15)
    assert abs(trace.limit) <= 1e-11
    assert trace.d0 == 10.0


def test_picard_records_function_iterates():
    s = make_absdiff_space(3)
    f = make_map(MapSpec.of("linear-scale", lam=0.5), s)
    trace = picard_run(s, f, 64.0, 0.5, StopRule(eps=1e-6))
    for a, b in zip(trace.iterates, trace.iterates[1:]):
        assert b == f(a)
    for n, step in enumerate(trace.steps):
        assert step == rep_distance(s, trace.iterates[n + 1], trace.iterates[n])


def test_picard_start_already_fixed():
    s = make_absdiff_space(3)
    f = make_map(MapSpec.of("two-sevenths"), s)
    trace = picard_run(s, f, 0.0, 2 / 7, StopRule())
    assert trace.status == "converged"
    assert trace.steps == ()
    assert trace.iterates == (0.0,)
    assert trace.limit == 0.0


def test_picard_shift_hits_max_iter():
    s = make_absdiff_space(3, box=(-1e6, 1e6))
    f = make_map(MapSpec.of("shift", offset=1.0), s, seed=SEED)
    trace = picard_run(s, f, 0.0, -1.0, StopRule(eps=1e-12, max_iter=50))
    assert trace.status == "max_iter"
    assert trace.limit is None
    assert len(trace.steps) == 50
    assert not trace.monitored


def test_picard_divergence_detected():
    s = make_absdiff_space(3, box=(-1e9, 1e9))
    doubler = SelfMap(kind="doubler", fn=lambda x: 2.0 * x)
    trace = picard_run(s, doubler, 1.0, -1.0, StopRule(eps=1e-12))
    assert trace.status == "diverged"
    assert trace.limit is None
    assert len(trace.steps) < 20


def test_picard_escape_raises_with_index():
    s = make_absdiff_space(3, box=(0.0, 10.0))
    walker = SelfMap(kind="walker", fn=lambda x: x + 3.0)
    with pytest.raises(CarrierDomainError) as err:
        picard_run(s, walker, 5.0, -1.0, StopRule())
    assert err.value.index == 2  # 5 -> 8 -> 11 leaves at the second iterate


def test_picard_rejects_bad_delta():
    s = make_absdiff_space(3)
    f = make_map(MapSpec.of("two-sevenths"), s)
    with pytest.raises(UsageError):
        picard_run(s, f, 1.0, 1.0, StopRule())


def test_tail_bound_hand_values():
    assert tail_bound(0.0, 3, 5.0, 1) == 0.0
    assert tail_bound(0.5, 2, 1.0, 3) == pytest.approx(0.25, abs=1e-15)
    assert tail_bound(2 / 7, 3, 10.0, 1) == pytest.approx(8.0, abs=1e-12)


def test_tail_bound_dominates_distance_to_limit():
    s, trace = paper_trace()
    # the true limit is 0; every recorded iterate sits inside its envelope
    for n, x in enumerate(trace.iterates):
        gap = rep_distance(s, x, 0.0)
        env = tail_bound(2 / 7, 3, trace.d0, n)
        assert gap <= env + 1e-9 * (1.0 + env)


def test_tail_bound_monotone_to_zero():
    values = [tail_bound(0.8, 4, 3.0, n) for n in range(250)]
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-22


def test_tail_bound_validation():
    with pytest.raises(UsageError):
        tail_bound(1.0, 3, 1.0, 0)
    with pytest.raises(UsageError):
        tail_bound(-0.1, 3, 1.0, 0)
    with pytest.raises(UsageError):
        tail_bound(0.5, 3, -1.0, 0)
    with pytest.raises(UsageError):
        tail_bound(0.5, 3, 1.0, -1)


def test_bound_eps_stops_within_predicted_iterations():
    s = make_absdiff_space(3)
    f = make_map(MapSpec.of("two-sevenths"), s)
    delta, bound_eps = 2 / 7, 1e-6
    trace = picard_run(s, f, 7.0, delta, StopRule(eps=1e-300, bound_eps=bound_eps))
    assert trace.status == "converged"
    predicted = math.ceil(math.log(bound_eps * (1 - delta) / ((3 - 1) * trace.d0)) / math.log(delta))
    assert len(trace.steps) <= predicted


def test_verify_decay_worked_example():
    _, trace = paper_trace()
    report = verify_decay(trace)
    assert report.passed
    ratios = [b / a for a, b in zip(trace.steps, trace.steps[1:])]
    assert all(abs(r - 2 / 7) <= 1e-12 for r in ratios)


def test_verify_decay_constant_map():
    s = make_absdiff_space(3)
    f = make_map(MapSpec.of("constant", value=0.3), s)
    trace = picard_run(s, f, 9.0, 0.0, StopRule())
    assert trace.steps[1:] == (0.0,) * (len(trace.steps) - 1)
    assert verify_decay(trace).passed


def test_verify_decay_forged_delta_fails():
    s = make_absdiff_space(3, box=(-1e6, 1e6))
    f = make_map(MapSpec.of("shift", offset=1.0), s, seed=SEED)
    forged = picard_run(s, f, 0.0, 0.5, StopRule(max_iter=30))
    report = verify_decay(forged)
    assert not report.passed
    assert report.violations[0].witness  # witness carries the failing step index


def test_verify_decay_needs_monitoring():
    s = make_absdiff_space(3)
    f = make_map(MapSpec.of("two-sevenths"), s)
    trace = picard_run(s, f, 7.0, -1.0, StopRule())
    with pytest.raises(UsageError):
        verify_decay(trace)


def test_verify_cauchy_worked_example():
    s, trace = paper_trace()
    report = verify_cauchy(trace, s)
    assert report.passed
    n = len(trace.iterates)
    assert report.checked == n * (n - 1) // 2
    info = report.info
    assert info["envelope_rate"] == 1.0
    assert 0.0 <= info["variant_bound_rate"] <= 1.0
    assert info["variant_bound_satisfied"] < info["variant_bound_checked"]


def test_verify_cauchy_short_trace_rejected():
    s = make_absdiff_space(3)
    f = make_map(MapSpec.of("constant", value=0.0), s)
    trace = picard_run(s, f, 0.0, 0.0, StopRule())
    assert len(trace.iterates) == 1
    with pytest.raises(UsageError):
        verify_cauchy(trace, s)


def test_uniqueness_probe_worked_example():
    s = make_absdiff_space(3)
    f = make_map(MapSpec.of("two-sevenths"), s)
    report = uniqueness_probe(s, f, [-5.0, 0.1, 7.0], 2 / 7, StopRule(eps=1e-12))
    assert report.passed
    assert abs(report.info["limit"]) < 1e-11
    assert report.info["n_converged"] == 3


def test_uniqueness_probe_constant_map():
    s = make_absdiff_space(3)
    f = make_map(MapSpec.of("constant", value=0.3), s)
    report = uniqueness_probe(s, f, [-50.0, 0.0, 12.0], 0.0, StopRule())
    assert report.passed
    assert report.info["limit"] == 0.3


def test_uniqueness_probe_identity_disagrees():
    s = make_absdiff_space(3)
    f = make_map(MapSpec.of("identity"), s)
    report = uniqueness_probe(s, f, [0.0, 1.0], -1.0, StopRule())
    assert not report.passed
    assert any(v.law == "limit-agreement" for v in report.violations)


def test_uniqueness_probe_needs_two_starts():
    s = make_absdiff_space(3)
    f = make_map(MapSpec.of("identity"), s)
    with pytest.raises(UsageError):
        uniqueness_probe(s, f, [0.0], -1.0, StopRule())


def test_brute_force_fixed_points():
    s = make_lifted_space(3, DISCRETE_3)
    const = make_map(MapSpec.of("finite-table", images=[1, 1, 1]), s)
    assert brute_force_fixed_points(s, const) == (1,)
    ident = make_map(MapSpec.of("identity"), s)
    assert brute_force_fixed_points(s, ident) == (0, 1, 2)


def test_brute_force_needs_finite_carrier():
    s = make_absdiff_space(3)
    f = make_map(MapSpec.of("identity"), s)
    with pytest.raises(UsageError):
        brute_force_fixed_points(s, f)


def test_finite_certified_map_matches_oracle():
    s = make_lifted_space(3, DISCRETE_3)
    f = make_map(MapSpec.of("finite-table", images=[1, 1, 1]), s)
    fps = brute_force_fixed_points(s, f)
    assert len(fps) == 1
    for start in range(3):
        trace = picard_run(s, f, start, 0.0, StopRule(eps=1e-15))
        assert trace.status == "converged"
        assert trace.limit == fps[0]


def test_csv_format():
    _, trace = paper_trace()
    text = trace.to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "n,step,bound,ratio,tail_bound"
    first = lines[1].split(",")
    assert first[0] == "0" and first[3] == ""  # no ratio before the second step
    second = lines[2].split(",")
    assert float(second[3]) == pytest.approx(2 / 7, abs=1e-15)
    assert len(lines) == 1 + len(trace.steps)


def test_unmonitored_csv_leaves_envelope_columns_empty():
    s = make_absdiff_space(3)
    f = make_map(MapSpec.of("linear-scale", lam=0.5), s)
    trace = picard_run(s, f, 8.0, -1.0, StopRule(eps=1e-6))
    row = trace.to_csv().strip().split("\n")[1].split(",")
    assert row[2] == "" and row[4] == ""
