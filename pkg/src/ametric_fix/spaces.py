"""Concrete space constructions and the self-map catalog.

Two space families are provided.  The pairwise absolute-difference space
sums |x_i - x_j| (the l1 gap for d > 1) over all argument pairs and
satisfies the defining laws by construction.  Lifted spaces apply the same
sum-over-pairs recipe to an arbitrary base metric, given either as a finite
symmetric table or as a callable; since nothing guarantees the simplex law
for an arbitrary base, lifted construction is gated on an axiom check and
fails loudly with the offending witness.

Self-maps are described by declarative ``MapSpec`` values so they can be
round-tripped through CLI configs.  Construction verifies that the map
sends the carrier into itself (exhaustively on finite carriers, on a
seeded sample otherwise).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import AMetricSpace, Box, FiniteCarrier, Point, check_axioms
from .errors import CarrierDomainError, ConstructionError, UsageError
from .sampling import STREAM_GATE, STREAM_MAP_CHECK, axiom_samples, philox, _random_points


def _pair_sum_1d(pts: tuple) -> float:
    total = 0.0
    for i, xi in enumerate(pts):
        for xj in pts[i + 1:]:
            total += abs(xi - xj)
    return total


def _pair_sum_nd(pts: tuple) -> float:
    total = 0.0
    for i, xi in enumerate(pts):
        for xj in pts[i + 1:]:
            for a, b in zip(xi, xj):
                total += abs(a - b)
    return total


def make_absdiff_space(t: int, d: int = 1, box=(-100.0, 100.0), eq_tol: float = 1e-12) -> AMetricSpace:
    """Pairwise absolute-difference space: sum of |x_i - x_j| over i < j.

    For d > 1 each pair contributes its l1 gap, which reduces bit-exactly
    to the scalar formula at d = 1.
    """
    carrier = Box.of(box[0], box[1], d)
    dist = _pair_sum_1d if carrier.d == 1 else _pair_sum_nd
    return AMetricSpace(t=t, distance=dist, carrier=carrier, eq_tol=eq_tol, kind="absdiff")


def _validate_table(table) -> np.ndarray:
    arr = np.asarray(table, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise UsageError(f"base table must be square and nonempty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise UsageError("base table entries must be finite")
    return arr


def table_space(t: int, table, eq_tol: float = 1e-12) -> AMetricSpace:
    """Ungated sum-over-pairs space from a raw table.

    No structural or law checks are performed: this is the entry point for
    running diagnostics against deliberately broken tables.
    """
    arr = _validate_table(table)
    n = arr.shape[0]

    def dist(pts: tuple) -> float:
        total = 0.0
        for i, pi in enumerate(pts):
            for pj in pts[i + 1:]:
                total += arr[pi, pj]
        return float(total)

    return AMetricSpace(t=t, distance=dist, carrier=FiniteCarrier(n), eq_tol=eq_tol, kind="lifted-table")


def make_lifted_space(t: int, base, *, box=None, eq_tol: float = 1e-12,
                      seed: int = 0, n_gate: int = 300) -> AMetricSpace:
    """Sum-over-pairs lift of a base metric, admitted only after an axiom check.

    ``base`` is either a square table (finite carrier, indices as points) or
    a callable two-argument metric, in which case ``box`` describes the
    carrier.  Structural defects of a table (negative entry, asymmetry,
    nonzero diagonal) and any law violation found by the gating sweep raise
    :class:`ConstructionError` carrying the witness.
    """
    if callable(base):
        if box is None:
            raise UsageError("a callable base needs an explicit carrier box")
        carrier = Box.of(box[0], box[1], 1)

        def dist(pts: tuple) -> float:
            total = 0.0
            for i, pi in enumerate(pts):
                for pj in pts[i + 1:]:
                    total += base(pi, pj)
            return float(total)

        space = AMetricSpace(t=t, distance=dist, carrier=carrier, eq_tol=eq_tol, kind="lifted-callable")
    else:
        arr = _validate_table(base)
        neg = np.argwhere(arr < 0)
        if len(neg):
            i, j = (int(v) for v in neg[0])
            raise ConstructionError(f"base table entry ({i},{j}) is negative", witness=(i, j))
        asym = np.argwhere(arr != arr.T)
        if len(asym):
            i, j = (int(v) for v in asym[0])
            raise ConstructionError(f"base table is asymmetric at ({i},{j})", witness=(i, j))
        diag = np.argwhere(np.diagonal(arr) != 0)
        if len(diag):
            i = int(diag[0][0])
            raise ConstructionError(f"base table diagonal entry {i} is nonzero", witness=(i, i))
        space = table_space(t, arr, eq_tol=eq_tol)

    gate = check_axioms(space, axiom_samples(space, n_gate, seed))
    if not gate.passed:
        first = gate.violations[0]
        raise ConstructionError(
            f"lift violates the {first.law} law at {first.witness!r} "
            f"(gap {first.gap:.3g})",
            witness=first,
        )
    return space


MAP_KINDS = (
    "two-sevenths",
    "linear-scale",
    "affine",
    "constant",
    "identity",
    "shift",
    "piecewise",
    "finite-table",
)


@dataclass(frozen=True)
class MapSpec:
    """Declarative self-map description, JSON round-trippable."""

    kind: str
    params: dict = field(default_factory=dict)

    @staticmethod
    def of(kind: str, **params) -> "MapSpec":
        return MapSpec(kind=kind, params=params)

    @staticmethod
    def from_dict(doc: dict) -> "MapSpec":
        if not isinstance(doc, dict) or "kind" not in doc:
            raise UsageError(f"map spec must be an object with a 'kind', got {doc!r}")
        kind = doc["kind"]
        if kind not in MAP_KINDS:
            raise UsageError(f"unknown map kind {kind!r}; expected one of {MAP_KINDS}")
        params = {k: v for k, v in doc.items() if k != "kind"}
        return MapSpec(kind=kind, params=params)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}


@dataclass(frozen=True)
class SelfMap:
    """A pure endomorphism of a space's carrier."""

    kind: str
    fn: Callable[[Point], Point]

    def __call__(self, p: Point) -> Point:
        return self.fn(p)


def _componentwise(g: Callable[[float], float]) -> Callable[[Point], Point]:
    def apply(p: Point) -> Point:
        if isinstance(p, tuple):
            return tuple(g(c) for c in p)
        return g(p)

    return apply


def _param(spec: MapSpec, name: str, default=None, required: bool = False):
    if name in spec.params:
        return spec.params[name]
    if required:
        raise UsageError(f"map kind {spec.kind!r} requires parameter {name!r}")
    return default


def _finite_real(value, what: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise UsageError(f"{what} must be a real number, got {value!r}") from None
    if not math.isfinite(v):
        raise UsageError(f"{what} must be finite, got {value!r}")
    return v


def _build_fn(spec: MapSpec, space: AMetricSpace) -> Callable[[Point], Point]:
    kind = spec.kind
    finite = space.is_finite
    if kind == "finite-table":
        if not finite:
            raise UsageError("finite-table maps need a finite carrier")
        images = _param(spec, "images", required=True)
        size = space.carrier.size
        if (not isinstance(images, (list, tuple)) or len(images) != size
                or any(isinstance(v, bool) or not isinstance(v, int) for v in images)):
            raise UsageError(f"finite-table images must be {size} integer indices")
        table = tuple(images)
        return lambda p: table[p]
    if finite and kind != "identity" and kind != "constant":
        raise UsageError(f"map kind {kind!r} needs a continuous carrier")
    if kind == "two-sevenths":
        return _componentwise(lambda x: 2.0 * x / 7.0)
    if kind == "linear-scale":
        lam = _finite_real(_param(spec, "lam", required=True), "lam")
        return _componentwise(lambda x: lam * x)
    if kind == "affine":
        alpha = _finite_real(_param(spec, "alpha", required=True), "alpha")
        beta = _finite_real(_param(spec, "beta", required=True), "beta")
        return _componentwise(lambda x: alpha * x + beta)
    if kind == "constant":
        value = _param(spec, "value", required=True)
        if finite:
            if isinstance(value, bool) or not isinstance(value, int):
                raise UsageError("a constant map on a finite carrier needs an integer index")
            return lambda p: value
        if isinstance(value, (list, tuple)):
            pt = tuple(_finite_real(v, "value") for v in value)
        else:
            pt = _finite_real(value, "value")
        return lambda p: pt
    if kind == "identity":
        return lambda p: p
    if kind == "shift":
        offset = _finite_real(_param(spec, "offset", 1.0), "offset")
        return _componentwise(lambda x: x + offset)
    if kind == "piecewise":
        if space.carrier.d != 1:
            raise UsageError("piecewise maps are one-dimensional")
        breaks = [_finite_real(v, "breakpoint") for v in _param(spec, "breakpoints", required=True)]
        pieces = _param(spec, "pieces", required=True)
        if any(b >= c for b, c in zip(breaks, breaks[1:])):
            raise UsageError("breakpoints must be strictly increasing")
        if len(pieces) != len(breaks) + 1:
            raise UsageError(f"need {len(breaks) + 1} pieces for {len(breaks)} breakpoints")
        coeffs = [(_finite_real(p[0], "slope"), _finite_real(p[1], "intercept")) for p in pieces]

        def piecewise(x: float) -> float:
            a, c = coeffs[bisect.bisect_right(breaks, x)]
            return a * x + c

        return piecewise
    raise UsageError(f"unknown map kind {kind!r}")


def make_map(spec: MapSpec, space: AMetricSpace, *, seed: int = 0, n_check: int = 200) -> SelfMap:
    """Build the map and verify its image stays inside the carrier.

    Finite carriers are checked exhaustively; continuous ones on a seeded
    sample.  An escaping image raises :class:`ConstructionError` with the
    witness point.
    """
    fn = _build_fn(spec, space)
    if space.is_finite:
        probes = range(space.carrier.size)
    else:
        rng = philox(seed, STREAM_MAP_CHECK)
        probes = _random_points(space.carrier, rng, n_check)
    for p in probes:
        try:
            space.carrier.canon(fn(p))
        except CarrierDomainError:
            raise ConstructionError(
                f"map {spec.kind!r} sends {p!r} outside the carrier", witness=p
            ) from None
    return SelfMap(kind=spec.kind, fn=fn)


def default_catalog() -> list[tuple[str, MapSpec, bool]]:
    """Named fixture maps: (name, spec, expected to certify as contractive).

    Intended for a one-dimensional box carrier wide enough that the shift
    map's sampled range check passes, e.g. (-1e6, 1e6).
    """
    return [
        ("two-sevenths", MapSpec.of("two-sevenths"), True),
        ("linear-half", MapSpec.of("linear-scale", lam=0.5), True),
        ("linear-nine-tenths", MapSpec.of("linear-scale", lam=0.9), True),
        ("affine-contraction", MapSpec.of("affine", alpha=0.6, beta=3.0), True),
        ("constant", MapSpec.of("constant", value=0.3), True),
        ("piecewise-contraction",
         MapSpec.of("piecewise", breakpoints=[0.0], pieces=[[0.4, 0.0], [-0.25, 0.0]]), True),
        ("identity", MapSpec.of("identity"), False),
        ("shift", MapSpec.of("shift", offset=1.0), False),
    ]
