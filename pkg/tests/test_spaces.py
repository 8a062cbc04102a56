"""Space constructions and the self-map catalog.

Covers:
    - absdiff construction at several arities and dimensions
    - lifted spaces agreeing with the closed-form space on a shared base
    - the construction gate: structural table defects and law violations
    - map construction, range checking, and the declarative spec round-trip
    - positive homogeneity of linear maps on the absdiff space
"""

import pytest

from ametric_fix import (
    ConstructionError,
    MapSpec,
    UsageError,
    check_axioms,
    axiom_samples,
    evaluate,
    make_absdiff_space,
    make_lifted_space,
    make_map,
    rep_distance,
)
from ametric_fix.sampling import SampleSet, philox, _random_points
from ametric_fix.spaces import default_catalog

SEED = 77


def test_absdiff_t2_is_plain_metric():
    s = make_absdiff_space(2)
    assert evaluate(s, (3.0, 7.0)) == 4.0
    assert evaluate(s, (-1.5, -1.5)) == 0.0


def test_absdiff_t3_hand_sum():
    s = make_absdiff_space(3)
    assert evaluate(s, (1.0, 2.0, 3.0)) == 4.0


def test_absdiff_t4_d2_all_equal():
    s = make_absdiff_space(4, d=2, box=(-5.0, 5.0))
    assert evaluate(s, ((1.0, -1.0),) * 4) == 0.0


def test_lifted_callable_matches_absdiff():
    t = 3
    closed = make_absdiff_space(t)
    lifted = make_lifted_space(t, lambda x, y: abs(x - y), box=(-100.0, 100.0), seed=SEED)
    rng = philox(SEED, 99)
    pts = _random_points(closed.carrier, rng, 3 * 50)
    for k in range(50):
        tup = tuple(pts[3 * k: 3 * k + 3])
        assert evaluate(lifted, tup) == evaluate(closed, tup)


def test_lifted_discrete_metric():
    table = [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]
    s = make_lifted_space(3, table)
    assert evaluate(s, (0, 1, 2)) == 3.0


def test_lifted_negative_entry_rejected():
    table = [[0.0, -1.0], [-1.0, 0.0]]
    with pytest.raises(ConstructionError) as err:
        make_lifted_space(3, table)
    assert err.value.witness is not None


def test_lifted_asymmetric_rejected():
    with pytest.raises(ConstructionError):
        make_lifted_space(3, [[0.0, 1.0], [2.0, 0.0]])


def test_lifted_nonzero_diagonal_rejected():
    with pytest.raises(ConstructionError):
        make_lifted_space(3, [[1.0, 1.0], [1.0, 0.0]])


def test_lifted_gate_catches_law_violation():
    # triangle-breaking base: d(0,1) wildly exceeds d(0,2) + d(2,1)
    table = [
        [0.0, 10.0, 1.0],
        [10.0, 0.0, 1.0],
        [1.0, 1.0, 0.0],
    ]
    with pytest.raises(ConstructionError) as err:
        make_lifted_space(3, table)
    assert err.value.witness.law == "simplex"


def test_lifted_metric_base_passes_gate():
    # distances of points on a line always lift cleanly
    xs = [0.0, 0.7, 1.9, 3.2]
    table = [[abs(a - b) for b in xs] for a in xs]
    s = make_lifted_space(4, table, seed=SEED)
    assert check_axioms(s, axiom_samples(s, 10, SEED)).passed


def test_make_map_examples():
    s = make_absdiff_space(3)
    f = make_map(MapSpec.of("two-sevenths"), s)
    assert f(7.0) == 2.0
    ident = make_map(MapSpec.of("identity"), s)
    assert ident(3.25) == 3.25
    unit = make_absdiff_space(3, box=(0.0, 1.0))
    const = make_map(MapSpec.of("constant", value=0.3), unit)
    assert const(0.9) == 0.3


def test_make_map_escape_rejected():
    s = make_absdiff_space(3, box=(0.0, 1.0))
    with pytest.raises(ConstructionError) as err:
        make_map(MapSpec.of("constant", value=5.0), s)
    assert err.value.witness is not None


def test_linear_map_scales_distances():
    s = make_absdiff_space(4)
    f = make_map(MapSpec.of("two-sevenths"), s)
    tup = (7.0, -3.0, 0.5, 21.0)
    image = tuple(f(x) for x in tup)
    assert evaluate(s, image) == pytest.approx((2 / 7) * evaluate(s, tup), rel=1e-14)


def test_piecewise_map():
    s = make_absdiff_space(3)
    f = make_map(MapSpec.of("piecewise", breakpoints=[0.0],
                            pieces=[[0.4, 0.0], [-0.25, 0.0]]), s)
    assert f(-10.0) == -4.0
    assert f(8.0) == -2.0
    assert f(0.0) == -0.0


def test_piecewise_validation():
    s = make_absdiff_space(3)
    with pytest.raises(UsageError):
        make_map(MapSpec.of("piecewise", breakpoints=[1.0, 0.0],
                            pieces=[[0.1, 0], [0.1, 0], [0.1, 0]]), s)
    with pytest.raises(UsageError):
        make_map(MapSpec.of("piecewise", breakpoints=[0.0], pieces=[[0.1, 0]]), s)


def test_finite_table_map():
    table = [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]
    s = make_lifted_space(3, table)
    f = make_map(MapSpec.of("finite-table", images=[1, 1, 1]), s)
    assert [f(i) for i in range(3)] == [1, 1, 1]
    with pytest.raises(UsageError):
        make_map(MapSpec.of("finite-table", images=[0, 1]), s)
    with pytest.raises(ConstructionError):
        make_map(MapSpec.of("finite-table", images=[3, 3, 3]), s)


def test_map_spec_round_trip():
    spec = MapSpec.of("linear-scale", lam=0.5)
    assert MapSpec.from_dict(spec.to_dict()) == spec
    with pytest.raises(UsageError):
        MapSpec.from_dict({"kind": "warp-drive"})


def test_shift_map_keeps_wide_carrier():
    s = make_absdiff_space(3, box=(-1e6, 1e6))
    f = make_map(MapSpec.of("shift", offset=1.0), s, seed=SEED)
    assert f(0.0) == 1.0


def test_d2_componentwise_maps():
    s = make_absdiff_space(3, d=2, box=(-10.0, 10.0))
    f = make_map(MapSpec.of("linear-scale", lam=0.5), s)
    assert f((4.0, -2.0)) == (2.0, -1.0)


def test_catalog_constructs_on_wide_box():
    s = make_absdiff_space(3, box=(-1e6, 1e6))
    for name, spec, _ in default_catalog():
        f = make_map(spec, s, seed=SEED)
        assert f.kind == spec.kind, name


def test_rep_scaling_for_lifted_table():
    xs = [0.0, 1.0, 2.5]
    table = [[abs(a - b) for b in xs] for a in xs]
    s = make_lifted_space(3, table, seed=SEED)
    for i in range(3):
        for j in range(3):
            assert rep_distance(s, i, j) == (s.t - 1) * table[i][j]
