"""Monte Carlo sampling of random point pairs and Kolmogorov-Smirnov checks.

All geometries live in one frame: a regular hexagon of circumradius ``side``
centred at the origin, with vertices ``V_k = side * (cos(k*pi/3), sin(k*pi/3))``
and triangles ``T_k = (O, V_k, V_{k+1})``.  Relative to ``T_0`` the triangle
``T_1`` shares a side, ``T_2`` is a translate sharing the vertex ``O`` and
``T_3`` is the point reflection of ``T_0`` through ``O``.

Random numbers come from NumPy's Philox4x64-10 counter-based bit generator,
keyed through ``SeedSequence(seed, spawn_key=(stream,))`` and consumed as
53-bit doubles by ``Generator.random``.  Every pair consumes its uniforms in a
fixed order: the first endpoint's ``(u, v)`` then the second endpoint's.
Composite regions prefix each endpoint with one extra uniform that selects the
member triangle.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Union

import numpy as np

from .distributions import DistanceCase, TriangleDistribution
from .errors import InvalidArgumentError

__all__ = [
    "CasePairLayout",
    "CompositeKind",
    "CompositeRegion",
    "EmpiricalSample",
    "KS_CRITICAL_ALPHA_001",
    "Point2",
    "RNG_ALGORITHM",
    "Triangle",
    "composite_region",
    "empirical_cdf",
    "ks_statistic",
    "ks_threshold",
    "layout",
    "make_rng",
    "region_cdf",
    "sample_composite_distances",
    "sample_distances",
    "sample_point",
]

RNG_ALGORITHM = "numpy.random.Philox (Philox4x64-10), SeedSequence(seed, spawn_key=(stream,))"
KS_CRITICAL_ALPHA_001 = 1.63
_SEED_LIMIT = 2**64


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Triangle:
    v0: Point2
    v1: Point2
    v2: Point2

    def __post_init__(self):
        coords = np.array(self.vertices)
        if not np.all(np.isfinite(coords)):
            raise InvalidArgumentError("triangle vertices must be finite")

    @property
    def vertices(self) -> tuple[Point2, Point2, Point2]:
        return self.v0, self.v1, self.v2

    def as_array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float)

    @property
    def signed_area(self) -> float:
        (x0, y0), (x1, y1), (x2, y2) = self.vertices
        return 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))

    def side_lengths(self) -> tuple[float, float, float]:
        a, b, c = self.vertices
        return (
            math.dist(a, b),
            math.dist(b, c),
            math.dist(c, a),
        )

    def translated(self, dx: float, dy: float) -> "Triangle":
        return Triangle(*(Point2(p.x + dx, p.y + dy) for p in self.vertices))


class CompositeKind(enum.Enum):
    RHOMBUS2 = "rhombus2"
    BIG_TRIANGLE4 = "bigtriangle4"
    HEXAGON6 = "hexagon6"

    @classmethod
    def parse(cls, name: str) -> "CompositeKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            names = ", ".join(c.value for c in cls)
            raise InvalidArgumentError(
                f"unknown composite region {name!r}; expected one of {names}"
            ) from None


@dataclass(frozen=True)
class CasePairLayout:
    first: Triangle
    second: Triangle
    case: DistanceCase
    side: float


@dataclass(frozen=True)
class CompositeRegion:
    """Union of congruent triangles; each endpoint picks a member uniformly."""

    name: CompositeKind
    triangles: tuple[Triangle, ...]
    side: float = 1.0


@dataclass(frozen=True, eq=False)
class EmpiricalSample:
    """Sorted pair distances from one seeded run."""

    case: Union[DistanceCase, CompositeKind]
    side: float
    seed: int
    distances: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return int(self.distances.size)

    def __eq__(self, other):
        if not isinstance(other, EmpiricalSample):
            return NotImplemented
        return (
            self.case == other.case
            and self.side == other.side
            and self.seed == other.seed
            and np.array_equal(self.distances, other.distances)
        )

    __hash__ = None


def _check_side(side) -> float:
    side = float(side)
    if not (math.isfinite(side) and side > 0.0):
        raise InvalidArgumentError(f"side must be positive and finite, got {side!r}")
    return side


def _check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < _SEED_LIMIT:
        raise InvalidArgumentError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def _check_count(n) -> int:
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"sample count must be a positive integer, got {n!r}")
    return int(n)


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for ``(seed, stream)``."""
    seed = _check_seed(seed)
    ss = np.random.SeedSequence(seed, spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


def hexagon_triangles(side: float = 1.0) -> tuple[Triangle, ...]:
    side = _check_side(side)
    origin = Point2(0.0, 0.0)
    verts = [
        Point2(side * math.cos(k * math.pi / 3.0), side * math.sin(k * math.pi / 3.0))
        for k in range(6)
    ]
    return tuple(Triangle(origin, verts[k], verts[(k + 1) % 6]) for k in range(6))


_PARTNER = {
    DistanceCase.WITHIN: 0,
    DistanceCase.ADJACENT_SIDE: 1,
    DistanceCase.PARALLEL_VERTEX: 2,
    DistanceCase.DIAGONAL_VERTEX: 3,
}


def layout(case: DistanceCase, side: float = 1.0) -> CasePairLayout:
    """Canonical pair of triangles realizing ``case``: ``(T_0, T_k)``."""
    if not isinstance(case, DistanceCase):
        raise InvalidArgumentError(f"not a DistanceCase: {case!r}")
    side = _check_side(side)
    tris = hexagon_triangles(side)
    return CasePairLayout(tris[0], tris[_PARTNER[case]], case, side)


def composite_region(kind: CompositeKind, side: float = 1.0) -> CompositeRegion:
    side = _check_side(side)
    tris = hexagon_triangles(side)
    if kind is CompositeKind.RHOMBUS2:
        members = tris[:2]
    elif kind is CompositeKind.HEXAGON6:
        members = tris
    elif kind is CompositeKind.BIG_TRIANGLE4:
        # Side-2s triangle on T_0's orientation: three corner copies of T_0
        # plus the inverted middle triangle (T_3 moved onto the centre).
        t0 = tris[0]
        ex, ey = t0.v1
        fx, fy = t0.v2
        members = (
            t0,
            t0.translated(ex, ey),
            t0.translated(fx, fy),
            tris[3].translated(ex + fx, ey + fy),
        )
    else:
        raise InvalidArgumentError(f"not a CompositeKind: {kind!r}")
    return CompositeRegion(kind, tuple(members), side)


def _fold_to_points(tri: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Map unit-square draws onto triangle(s) ``tri`` by the reflection fold."""
    flip = u + v > 1.0
    u = np.where(flip, 1.0 - u, u)
    v = np.where(flip, 1.0 - v, v)
    v0 = tri[..., 0, :]
    e1 = tri[..., 1, :] - v0
    e2 = tri[..., 2, :] - v0
    return v0 + u[..., None] * e1 + v[..., None] * e2


def sample_point(tri: Triangle, rng: np.random.Generator) -> Point2:
    """One uniform point in ``tri``; consumes exactly two draws from ``rng``."""
    if tri.signed_area == 0.0:
        raise InvalidArgumentError("degenerate triangle")
    u, v = rng.random(2)
    x, y = _fold_to_points(tri.as_array(), np.float64(u), np.float64(v))
    return Point2(float(x), float(y))


def _split(n: int, streams: int) -> list[int]:
    base, extra = divmod(n, streams)
    return [base + (1 if k < extra else 0) for k in range(streams)]


def _run_streams(worker, n, seed, streams):
    if int(streams) != streams or streams < 1:
        raise InvalidArgumentError(f"streams must be a positive integer, got {streams!r}")
    sizes = _split(n, int(streams))
    jobs = [(k, size) for k, size in enumerate(sizes) if size]
    if len(jobs) == 1:
        chunks = [worker(make_rng(seed, k), size) for k, size in jobs]
    else:
        with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
            chunks = list(pool.map(lambda job: worker(make_rng(seed, job[0]), job[1]), jobs))
    out = np.concatenate(chunks)
    out.sort(kind="stable")
    out.flags.writeable = False
    return out


def sample_distances(
    case: DistanceCase,
    side: float = 1.0,
    n: int = 1000,
    seed: int = 0,
    streams: int = 1,
) -> EmpiricalSample:
    """Distances between ``n`` independent uniform pairs for ``case``.

    With ``streams > 1`` the ``n`` pairs are split into contiguous chunks, each
    drawn from its own ``(seed, stream)`` generator; the result depends only on
    ``(case, side, n, seed, streams)``.
    """
    pair = layout(case, side)
    n = _check_count(n)
    seed = _check_seed(seed)
    first = pair.first.as_array()
    second = pair.second.as_array()

    def worker(rng, size):
        draws = rng.random((size, 4))
        p = _fold_to_points(first, draws[:, 0], draws[:, 1])
        q = _fold_to_points(second, draws[:, 2], draws[:, 3])
        return np.hypot(p[:, 0] - q[:, 0], p[:, 1] - q[:, 1])

    return EmpiricalSample(case, pair.side, seed, _run_streams(worker, n, seed, streams))


def sample_composite_distances(
    region: CompositeRegion, n: int = 1000, seed: int = 0, streams: int = 1
) -> EmpiricalSample:
    """Pair distances with both endpoints uniform over ``region``.

    Each endpoint uses three draws ``(w, u, v)``: ``w`` picks the member
    triangle (all members have equal area), ``(u, v)`` places the point.
    """
    n = _check_count(n)
    seed = _check_seed(seed)
    tris = np.array([t.as_array() for t in region.triangles])
    k = len(tris)

    def worker(rng, size):
        draws = rng.random((size, 6))
        ia = np.minimum((draws[:, 0] * k).astype(np.intp), k - 1)
        ib = np.minimum((draws[:, 3] * k).astype(np.intp), k - 1)
        p = _fold_to_points(tris[ia], draws[:, 1], draws[:, 2])
        q = _fold_to_points(tris[ib], draws[:, 4], draws[:, 5])
        return np.hypot(p[:, 0] - q[:, 0], p[:, 1] - q[:, 1])

    return EmpiricalSample(region.name, region.side, seed, _run_streams(worker, n, seed, streams))


def region_cdf(kind: CompositeKind, side: float = 1.0) -> Callable:
    """Mixture CDF of the pair distance over a composite region.

    Conditioning on which member triangles the two endpoints fall in gives
    the weights: rhombus ``(1/2, 1/2)`` over (within, adjacent); hexagon
    ``(1/6, 1/3, 1/3, 1/6)`` over the four cases; the side-``2s`` triangle is
    simply the within-triangle law at twice the side.
    """
    side = _check_side(side)
    if kind is CompositeKind.BIG_TRIANGLE4:
        return TriangleDistribution(DistanceCase.WITHIN, 2.0 * side).cdf
    if kind is CompositeKind.RHOMBUS2:
        weights = {DistanceCase.WITHIN: 0.5, DistanceCase.ADJACENT_SIDE: 0.5}
    elif kind is CompositeKind.HEXAGON6:
        weights = {
            DistanceCase.WITHIN: 1.0 / 6.0,
            DistanceCase.ADJACENT_SIDE: 1.0 / 3.0,
            DistanceCase.PARALLEL_VERTEX: 1.0 / 3.0,
            DistanceCase.DIAGONAL_VERTEX: 1.0 / 6.0,
        }
    else:
        raise InvalidArgumentError(f"not a CompositeKind: {kind!r}")
    parts = [(w, TriangleDistribution(c, side)) for c, w in weights.items()]

    def cdf(d):
        return sum(w * dist.cdf(d) for w, dist in parts)

    return cdf


def empirical_cdf(sample: EmpiricalSample, d):
    """Fraction of sampled distances ``<= d`` (right-continuous)."""
    hits = np.searchsorted(sample.distances, np.asarray(d, dtype=float), side="right")
    out = hits / sample.count
    return float(out) if np.ndim(out) == 0 else out


def ks_statistic(sample: EmpiricalSample, reference) -> float:
    """Kolmogorov-Smirnov distance between ``sample`` and a reference CDF.

    ``reference`` is a :class:`TriangleDistribution` or any vectorized CDF.
    """
    cdf = reference.cdf if isinstance(reference, TriangleDistribution) else reference
    x = sample.distances
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    return float(min(max(d_plus, d_minus, 0.0), 1.0))


def ks_threshold(n: int) -> float:
    """Asymptotic one-sample KS critical value at alpha = 0.01."""
    return KS_CRITICAL_ALPHA_001 / math.sqrt(n)
