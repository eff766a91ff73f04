"""Finite point configurations on the unit sphere.

Holds the configuration type, the distance functionals used to build
distance profiles, closed-form generators for the standard configurations
and a few structural detectors (minimum distance, orthogonal splitting).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import DimensionError, MajorsphereError, ParameterRangeError, SingularityError
from .majorization import RealSequence

NORM_TOL = 1e-9
CLUSTER_TOL = 1e-6
ORTHO_TOL = 1e-6


class SphericalConfiguration:
    """``m`` unit vectors in ``R^n``; the points live on ``S^{n-1}``."""

    __slots__ = ("_points",)

    def __init__(self, points, normalize: bool = False, norm_tol: float = NORM_TOL):
        arr = np.array(points, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"points must form an (m, n) array with m, n >= 1, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise MajorsphereError("point coordinates must be finite")
        norms = np.linalg.norm(arr, axis=1)
        if normalize:
            if np.any(norms == 0):
                raise MajorsphereError(f"cannot normalize zero vector (point {int(np.argmin(norms))})")
            arr = arr / norms[:, None]
        else:
            bad = np.nonzero(np.abs(norms - 1.0) > norm_tol)[0]
            if bad.size:
                i = int(bad[0])
                raise MajorsphereError(f"point {i} has norm {norms[i]!r}, expected 1 within {norm_tol:g}")
        arr.setflags(write=False)
        self._points = arr

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def dimension(self) -> int:
        return self._points.shape[1]

    @property
    def m(self) -> int:
        return self._points.shape[0]

    def __len__(self):
        return self.m

    def __repr__(self):
        return f"SphericalConfiguration(m={self.m}, n={self.dimension})"

    def gram(self) -> np.ndarray:
        g = self._points @ self._points.T
        return (g + g.T) / 2


class DistanceKind(enum.Enum):
    EUCLIDEAN = "r"
    SQUARED_EUCLIDEAN = "r2"
    ANGULAR = "phi"
    SCALE = "s"


@dataclass(frozen=True)
class DistanceFunctional:
    """Symmetric pair functional, evaluated from Euclidean distances.

    ``SCALE(s)`` is ``r**s`` for ``s > 0``, ``log r`` for ``s == 0`` and
    ``-r**s`` for ``s < 0``; every member of the family increases with ``r``.
    """

    kind: DistanceKind
    s: float = 0.0

    @classmethod
    def euclidean(cls):
        return cls(DistanceKind.EUCLIDEAN)

    @classmethod
    def squared(cls):
        return cls(DistanceKind.SQUARED_EUCLIDEAN)

    @classmethod
    def angular(cls):
        return cls(DistanceKind.ANGULAR)

    @classmethod
    def scale(cls, s: float):
        return cls(DistanceKind.SCALE, float(s))

    @classmethod
    def parse(cls, text: str) -> "DistanceFunctional":
        """Parse ``r``, ``r2``, ``phi`` or ``s:<value>`` (also ``r_s:<value>``)."""
        key = text.strip().lower()
        if key in ("r", "euclidean"):
            return cls.euclidean()
        if key in ("r2", "squared", "squared_euclidean"):
            return cls.squared()
        if key in ("phi", "angular"):
            return cls.angular()
        for prefix in ("s:", "r_s:", "s="):
            if key.startswith(prefix):
                try:
                    return cls.scale(float(key[len(prefix):]))
                except ValueError:
                    break
        raise MajorsphereError(f"unknown distance functional {text!r}; use r, r2, phi or s:<value>")

    def __str__(self):
        if self.kind is DistanceKind.SCALE:
            return f"s:{self.s:g}"
        return self.kind.value

    @property
    def singular_at_zero(self) -> bool:
        return self.kind is DistanceKind.SCALE and self.s <= 0

    def from_distance(self, r, r2=None):
        """Evaluate on Euclidean distances ``r`` (``r2`` may carry exact squares)."""
        r = np.asarray(r, dtype=float)
        if self.kind is DistanceKind.EUCLIDEAN:
            return r
        if self.kind is DistanceKind.SQUARED_EUCLIDEAN:
            return r * r if r2 is None else np.asarray(r2, dtype=float)
        if self.kind is DistanceKind.ANGULAR:
            return 2.0 * np.arcsin(np.minimum(r / 2.0, 1.0))
        s = self.s
        with np.errstate(divide="ignore"):
            if s > 0:
                return r**s
            if s == 0:
                return np.log(r)
            return -(r**s)

    def __call__(self, x, y) -> float:
        d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        r2 = float(d @ d)
        r = math.sqrt(r2)
        if r == 0 and self.singular_at_zero:
            raise SingularityError("coincident points: functional is singular at distance 0")
        return float(self.from_distance(r, r2))


def pair_indices(m: int):
    """Unordered pairs ``i < j`` in lexicographic order."""
    return np.triu_indices(m, k=1)


def pair_distances(X: SphericalConfiguration):
    """Euclidean distances and their squares over all unordered pairs."""
    i, j = pair_indices(X.m)
    d = X.points[i] - X.points[j]
    r2 = np.einsum("ij,ij->i", d, d)
    return np.sqrt(r2), r2, (i, j)


def distance_profile(X: SphericalConfiguration, rho: DistanceFunctional) -> RealSequence:
    """Multiset of ``rho`` over the ``m(m-1)/2`` unordered pairs of ``X``."""
    if X.m < 2:
        raise MajorsphereError("a distance profile needs at least two points")
    r, r2, (i, j) = pair_distances(X)
    if rho.singular_at_zero:
        zero = np.nonzero(r == 0)[0]
        if zero.size:
            k = int(zero[0])
            pair = (int(i[k]), int(j[k]))
            raise SingularityError(
                f"points {pair[0]} and {pair[1]} coincide; {rho} is singular at distance 0", pair
            )
    return RealSequence(rho.from_distance(r, r2))


@dataclass(frozen=True)
class GramSpectrum:
    gram: np.ndarray
    values: tuple  # cluster representatives, descending
    multiplicities: tuple  # unordered pair counts per cluster
    cluster_tol: float

    @property
    def inner_product_set(self):
        return dict(zip(self.values, self.multiplicities))

    def __len__(self):
        return len(self.values)


def cluster_values(values, tol: float):
    """Single-linkage clustering of reals; returns (representatives, counts) descending."""
    v = np.sort(np.asarray(values, dtype=float))[::-1]
    if v.size == 0:
        return (), ()
    breaks = np.nonzero(-np.diff(v) > tol)[0] + 1
    groups = np.split(v, breaks)
    reps = tuple(float(g.mean()) for g in groups)
    counts = tuple(int(g.size) for g in groups)
    return reps, counts


def gram_spectrum(X: SphericalConfiguration, cluster_tol: float = CLUSTER_TOL) -> GramSpectrum:
    """Gram matrix plus the clustered set of distinct off-diagonal inner products."""
    g = X.gram()
    i, j = pair_indices(X.m)
    reps, counts = cluster_values(g[i, j], cluster_tol)
    return GramSpectrum(g, reps, counts, cluster_tol)


# --- generators -----------------------------------------------------------


def _simplex_coords(d: int) -> np.ndarray:
    """Regular d-simplex in R^d, first vertex at (0, ..., 0, 1)."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    sub = _simplex_coords(d - 1) * math.sqrt(1.0 - 1.0 / (d * d))
    top = np.zeros((1, d))
    top[0, -1] = 1.0
    rest = np.hstack([sub, np.full((d, 1), -1.0 / d)])
    return np.vstack([top, rest])


def polygon(m: int) -> SphericalConfiguration:
    if m < 1:
        raise ParameterRangeError("polygon needs m >= 1")
    ang = 2 * np.pi * np.arange(m) / m
    return SphericalConfiguration(np.column_stack([np.cos(ang), np.sin(ang)]))


def circle_points(angles) -> SphericalConfiguration:
    ang = np.asarray(angles, dtype=float)
    return SphericalConfiguration(np.column_stack([np.cos(ang), np.sin(ang)]))


def regular_simplex(n: int) -> SphericalConfiguration:
    """``n + 1`` vertices of a regular simplex on ``S^{n-1}``."""
    if n < 1:
        raise ParameterRangeError("regular simplex needs n >= 1")
    return SphericalConfiguration(_simplex_coords(n))


def cross_polytope(n: int) -> SphericalConfiguration:
    """``2n`` points ``+-e_i``, starting at the north pole."""
    if n < 1:
        raise ParameterRangeError("cross-polytope needs n >= 1")
    pts = []
    for i in reversed(range(n)):
        e = np.zeros(n)
        e[i] = 1.0
        pts.extend([e, -e])
    return SphericalConfiguration(pts)


def triangular_bipyramid() -> SphericalConfiguration:
    """Two poles plus an equilateral triangle on the equator of ``S^2``."""
    ang = 2 * np.pi * np.arange(3) / 3
    eq = np.column_stack([np.cos(ang), np.sin(ang), np.zeros(3)])
    return SphericalConfiguration(np.vstack([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], eq]))


def cell24() -> SphericalConfiguration:
    """Vertices of the regular 24-cell on ``S^3``."""
    pts = []
    for i in reversed(range(4)):
        for sgn in (1.0, -1.0):
            e = np.zeros(4)
            e[i] = sgn
            pts.append(e)
    for bits in range(16):
        pts.append([0.5 if (bits >> k) & 1 == 0 else -0.5 for k in range(4)])
    return SphericalConfiguration(pts)


def _helmert_basis(N: int) -> np.ndarray:
    """Orthonormal basis (rows) of the sum-zero hyperplane in ``R^N``."""
    H = np.zeros((N - 1, N))
    for k in range(1, N):
        H[k - 1, :k] = 1.0
        H[k - 1, k] = -k
        H[k - 1] /= math.sqrt(k * (k + 1))
    return H


def lambda_n(n: int) -> SphericalConfiguration:
    """Maximal two-distance set from ``{e_i + e_j}`` in ``R^{n+1}``, centred and rescaled.

    Inner products are ``(n - 3) / (2(n - 1))`` and ``-2 / (n - 1)``.
    """
    if n < 2:
        raise ParameterRangeError("lambda_n needs n >= 2")
    N = n + 1
    i, j = np.triu_indices(N, k=1)
    V = np.zeros((i.size, N))
    V[np.arange(i.size), i] = 1.0
    V[np.arange(i.size), j] = 1.0
    V -= 2.0 / N
    coords = V @ _helmert_basis(N).T
    coords /= math.sqrt(2.0 * (n - 1) / (n + 1))
    return SphericalConfiguration(coords)


def isosceles_triangle(alpha: float) -> SphericalConfiguration:
    """Three circle points with angular sides ``alpha, alpha, 2*pi - 2*alpha``."""
    if not 0 < alpha <= math.pi:
        raise ParameterRangeError(f"alpha must lie in (0, pi], got {alpha!r}")
    return circle_points([0.0, alpha, 2 * alpha])


def quadrilateral(alpha: float) -> SphericalConfiguration:
    """Four circle points with angular sides ``alpha, alpha, alpha, 2*pi - 3*alpha``."""
    if not 0 < alpha <= 2 * math.pi / 3 + 1e-15:
        raise ParameterRangeError(f"alpha must lie in (0, 2*pi/3], got {alpha!r}")
    return circle_points([0.0, alpha, 2 * alpha, 3 * alpha])


def delta_tetrahedron(a: float, theta: float) -> SphericalConfiguration:
    """Tetrahedron ABCD with equal opposite edges AC, BD meeting at angle ``theta``.

    The midpoints of AC and BD sit at ``(0, 0, a)`` and ``(0, 0, -a)``.
    """
    if not 0 <= a <= 1:
        raise ParameterRangeError(f"a must lie in [0, 1], got {a!r}")
    if not 0 < theta <= math.pi:
        raise ParameterRangeError(f"theta must lie in (0, pi], got {theta!r}")
    h = math.sqrt(1.0 - a * a)
    c, s = math.cos(theta), math.sin(theta)
    pts = [
        [h, 0.0, a],
        [h * c, h * s, -a],
        [-h, 0.0, a],
        [-h * c, -h * s, -a],
    ]
    return SphericalConfiguration(pts)


def simplex_product(dims: Sequence[int]) -> SphericalConfiguration:
    """Mutually orthogonal regular simplices of dimensions ``d_1, ..., d_k``."""
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise ParameterRangeError(f"simplex dimensions must all be >= 1, got {dims}")
    n = sum(dims)
    blocks = []
    offset = 0
    for d in dims:
        block = np.zeros((d + 1, n))
        block[:, offset:offset + d] = _simplex_coords(d)
        blocks.append(block)
        offset += d
    return SphericalConfiguration(np.vstack(blocks))


_GENERATORS = {
    "polygon": (polygon, ("m",)),
    "regular_simplex": (regular_simplex, ("n",)),
    "cross_polytope": (cross_polytope, ("n",)),
    "tbp": (triangular_bipyramid, ()),
    "24cell": (cell24, ()),
    "lambda_n": (lambda_n, ("n",)),
    "isosceles_triangle": (isosceles_triangle, ("alpha",)),
    "quadrilateral": (quadrilateral, ("alpha",)),
    "delta_tetra": (delta_tetrahedron, ("a", "theta")),
    "simplex_product": (simplex_product, ("dims",)),
}

_ALIASES = {"24_cell": "24cell", "lambda": "lambda_n", "triangle": "isosceles_triangle"}

FAMILIES = tuple(_GENERATORS)


def generate(family: str, **params) -> SphericalConfiguration:
    """Build a named configuration family, e.g. ``generate("lambda_n", n=8)``."""
    key = family.strip().lower().replace("-", "_")
    key = _ALIASES.get(key, key)
    if key not in _GENERATORS:
        raise ParameterRangeError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    fn, names = _GENERATORS[key]
    missing = [p for p in names if params.get(p) is None]
    if missing:
        raise ParameterRangeError(f"family {key} needs parameter(s): {', '.join(missing)}")
    extra = [p for p, v in params.items() if p not in names and v is not None]
    if extra:
        raise ParameterRangeError(f"family {key} does not take: {', '.join(extra)}")
    return fn(*(params[p] for p in names))


# --- structural detectors -------------------------------------------------


def min_pair_distance(X: SphericalConfiguration) -> float:
    if X.m < 2:
        raise MajorsphereError("minimum distance needs at least two points")
    r, _, _ = pair_distances(X)
    return float(r.min())


def omega_member(X: SphericalConfiguration, q0: float, tol: float = NORM_TOL) -> bool:
    """All pairwise distances are at least ``q0`` (within ``tol``)."""
    return min_pair_distance(X) >= q0 - tol


@dataclass(frozen=True)
class Cluster:
    members: tuple
    cardinality: int
    rank: int


@dataclass(frozen=True)
class KuperbergPartition:
    clusters: tuple
    dims: tuple
    is_valid: bool
    failures: tuple = field(default=())
    max_cross_inner_product: float = 0.0
    min_distance: float = float("nan")


def kuperberg_decompose(X: SphericalConfiguration, ortho_tol: float = ORTHO_TOL) -> KuperbergPartition:
    """Split ``X`` into groups linked by non-orthogonal inner products.

    Points ``i, j`` join a cluster when ``|<p_i, p_j>| > ortho_tol``.  The
    partition is valid when there are at least two clusters, every cluster of
    rank ``d_i`` holds ``d_i + 1`` points, and the ranks add up to ``n``.
    """
    g = X.gram()
    adj = np.abs(g) > ortho_tol
    np.fill_diagonal(adj, False)
    _, labels = connected_components(adj.astype(np.int8), directed=False)
    # relabel by smallest member so output order is stable
    order = {}
    for idx, lab in enumerate(labels):
        order.setdefault(int(lab), len(order))
    groups = [[] for _ in order]
    for idx, lab in enumerate(labels):
        groups[order[int(lab)]].append(idx)

    clusters = []
    failures = []
    for members in groups:
        rank = int(np.linalg.matrix_rank(X.points[members], tol=1e-8))
        clusters.append(Cluster(tuple(members), len(members), rank))
        if len(members) != rank + 1:
            failures.append(f"cluster {members} has {len(members)} points but rank {rank}")
    dims = tuple(c.rank for c in clusters)
    if sum(dims) != X.dimension:
        failures.append(f"cluster ranks sum to {sum(dims)}, not n={X.dimension}")
    if len(clusters) < 2:
        failures.append("single cluster: the splitting needs at least two factors")

    cross = 0.0
    lab = np.array([order[int(l)] for l in labels])
    mask = lab[:, None] != lab[None, :]
    if mask.any():
        cross = float(np.abs(g[mask]).max())
    mind = min_pair_distance(X) if X.m >= 2 else float("nan")
    return KuperbergPartition(tuple(clusters), dims, not failures, tuple(failures), cross, mind)

