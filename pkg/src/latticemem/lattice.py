"""Exact arithmetic and geometry of the scaled E8 lattice.

The lattice used throughout this package is the integer-coordinate copy of
E8 at twice the unimodular scale: vectors whose eight coordinates are all
even or all odd, with coordinate sum divisible by 4.  At this scale the
packing radius is sqrt(2), the covering radius is 2, and the 240 minimal
vectors have squared norm 8.

Everything here is pure and deterministic.  Batched entry points accept
arrays of shape (..., 8) and vectorize over the leading axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

DIM = 8

#: Largest radius such that open balls around lattice points are disjoint.
PACKING_RADIUS = math.sqrt(2.0)

#: Smallest radius such that closed balls around lattice points cover space.
COVERING_RADIUS = 2.0

#: Squared radius of the interpolation support ball (minimal vector norm).
SUPPORT_RADIUS_SQ = 8.0

#: Number of lattice points per unit volume is 1/256 (covolume of the basis).
COVOLUME = 256

#: Generator matrix; rows are basis vectors of the lattice.
BASIS = np.array(
    [
        [4, 0, 0, 0, 0, 0, 0, 0],
        [-2, 2, 0, 0, 0, 0, 0, 0],
        [0, -2, 2, 0, 0, 0, 0, 0],
        [0, 0, -2, 2, 0, 0, 0, 0],
        [0, 0, 0, -2, 2, 0, 0, 0],
        [0, 0, 0, 0, -2, 2, 0, 0],
        [0, 0, 0, 0, 0, -2, 2, 0],
        [1, 1, 1, 1, 1, 1, 1, 1],
    ],
    dtype=np.int64,
)


def _exact_inverse_times_covolume(basis: np.ndarray) -> np.ndarray:
    """Integer matrix M with basis @ M == COVOLUME * I, computed exactly."""
    n = basis.shape[0]
    a = [[Fraction(int(v)) for v in row] for row in basis]
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[pivot] = a[pivot], a[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        scale = a[col][col]
        a[col] = [v / scale for v in a[col]]
        inv[col] = [v / scale for v in inv[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
                inv[r] = [v - f * w for v, w in zip(inv[r], inv[col])]
    scaled = [[v * COVOLUME for v in row] for row in inv]
    if any(v.denominator != 1 for row in scaled for v in row):
        raise AssertionError("basis inverse is not integral at the expected scale")
    return np.array([[int(v) for v in row] for row in scaled], dtype=np.int64)


#: Integer matrix with BASIS @ BASIS_INV_SCALED == 256 * identity.
BASIS_INV_SCALED = _exact_inverse_times_covolume(BASIS)


def is_lattice_point(x) -> np.ndarray | bool:
    """Membership test: constant coordinate parity and sum divisible by 4."""
    x = np.asarray(x)
    if x.shape[-1] != DIM:
        raise ValueError(f"expected trailing dimension {DIM}, got {x.shape}")
    xi = np.asarray(np.rint(x), dtype=np.int64)
    if not np.array_equal(xi, x):
        return np.zeros(x.shape[:-1], dtype=bool) if x.ndim > 1 else False
    even = xi % 2 == 0
    same_parity = np.logical_or(even.all(axis=-1), (~even).all(axis=-1))
    divisible = xi.sum(axis=-1) % 4 == 0
    result = np.logical_and(same_parity, divisible)
    return bool(result) if result.ndim == 0 else result


def _nearest_even_sum(y: np.ndarray) -> np.ndarray:
    """Nearest integer vector with even coordinate sum (checkerboard decode).

    Rounds every coordinate, then repairs parity by re-rounding the
    coordinate with the largest rounding error in the other direction.
    """
    r = np.rint(y)
    parity = np.asarray(r.sum(axis=-1), dtype=np.int64) % 2
    odd = parity != 0
    if np.any(odd):
        err = y - r
        rows = np.nonzero(odd)[0]
        worst = np.abs(err[rows]).argmax(axis=-1)
        step = np.where(err[rows, worst] > 0.0, 1.0, -1.0)
        r[rows, worst] += step
    return r


def _lex_less(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise batched lexicographic a < b over the trailing axis."""
    diff = a - b
    nonzero = diff != 0
    first = nonzero.argmax(axis=-1)
    lead = np.take_along_axis(diff, first[..., None], axis=-1)[..., 0]
    return np.logical_and(nonzero.any(axis=-1), lead < 0)


def decode_batch(q: np.ndarray) -> np.ndarray:
    """Nearest lattice point for each row of q, shape (n, 8) -> (n, 8) int64.

    Decodes the even and odd cosets independently by parity-repaired
    rounding and keeps the closer representative.  Exact ties between the
    cosets go to the lexicographically smaller point.
    """
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 2 or q.shape[1] != DIM:
        raise ValueError(f"expected shape (n, {DIM}), got {q.shape}")
    if not np.isfinite(q).all():
        raise ValueError("query coordinates must be finite")
    even = 2.0 * _nearest_even_sum(q * 0.5)
    odd = 2.0 * _nearest_even_sum((q - 1.0) * 0.5) + 1.0
    d_even = ((q - even) ** 2).sum(axis=-1)
    d_odd = ((q - odd) ** 2).sum(axis=-1)
    take_odd = np.logical_or(
        d_odd < d_even, np.logical_and(d_odd == d_even, _lex_less(odd, even))
    )
    out = np.where(take_odd[:, None], odd, even)
    return np.asarray(out, dtype=np.int64)


def decode(q) -> np.ndarray:
    """Nearest lattice point to a single 8-vector."""
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (DIM,):
        raise ValueError(f"expected shape ({DIM},), got {q.shape}")
    return decode_batch(q[None, :])[0]


@dataclass(frozen=True)
class Isometry:
    """Lattice-preserving map: translate, permute coordinates, flip signs.

    Applying the map computes ``signs * (x - translation)[permutation]``;
    the number of negative signs is even, so the lattice is preserved
    setwise.  ``apply_inverse`` exactly undoes ``apply`` up to float
    rounding, and maps lattice points to lattice points in integer
    arithmetic.
    """

    translation: np.ndarray
    permutation: np.ndarray
    signs: np.ndarray

    def __post_init__(self):
        if int((self.signs < 0).sum()) % 2 != 0:
            raise ValueError("sign mask must flip an even number of coordinates")
        if sorted(self.permutation.tolist()) != list(range(DIM)):
            raise ValueError("permutation must be a bijection on 0..7")

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        return self.signs * (x - self.translation)[..., self.permutation]

    def apply_inverse(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z)
        u = self.signs * z
        out = np.empty_like(u)
        out[..., self.permutation] = u
        return out + self.translation

    def pull_back_gradient(self, g: np.ndarray) -> np.ndarray:
        """Transform a gradient taken in image coordinates back to the source."""
        g = np.asarray(g)
        u = self.signs * g
        out = np.empty_like(u)
        out[..., self.permutation] = u
        return out


def canonicalize_batch(q: np.ndarray):
    """Map queries into the fundamental wedge; returns (z, tau, order, signs).

    For each row: ``tau`` is the nearest lattice point, ``order`` the
    permutation sorting ``|q - tau|`` in descending order, and ``signs``
    the per-coordinate flips making the first seven sorted coordinates
    non-negative with an even number of flips overall (the last coordinate
    absorbs the parity).  The canonical point is
    ``z = signs * (q - tau)[order]`` and satisfies
    z1 >= ... >= z7 >= |z8|, z1 + z2 <= 2 and sum(z) <= 4.
    """
    q = np.asarray(q, dtype=np.float64)
    tau = decode_batch(q)
    t = q - tau
    order = np.argsort(-np.abs(t), axis=-1, kind="stable")
    ts = np.take_along_axis(t, order, axis=-1)
    signs = np.where(ts < 0.0, -1, 1).astype(np.int64)
    flip = (signs < 0).sum(axis=-1) % 2 == 1
    signs[flip, DIM - 1] = -signs[flip, DIM - 1]
    z = ts * signs
    return z, tau, order, signs


def canonicalize(q) -> tuple[np.ndarray, Isometry]:
    """Canonical representative and the isometry that produced it."""
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (DIM,):
        raise ValueError(f"expected shape ({DIM},), got {q.shape}")
    z, tau, order, signs = canonicalize_batch(q[None, :])
    iso = Isometry(translation=tau[0], permutation=order[0], signs=signs[0])
    return z[0], iso


# The canonical wedge, as the 10 half-space constraints CONSTRAINTS_G x <= CONSTRAINTS_H:
# six descending-order constraints, |z8| <= z7 (two rows), z1 + z2 <= 2, sum <= 4.
CONSTRAINTS_G = np.zeros((10, DIM), dtype=np.int64)
CONSTRAINTS_H = np.zeros(10, dtype=np.int64)
for _i in range(6):
    CONSTRAINTS_G[_i, _i] = -1
    CONSTRAINTS_G[_i, _i + 1] = 1
CONSTRAINTS_G[6, 6] = -1
CONSTRAINTS_G[6, 7] = 1
CONSTRAINTS_G[7, 6] = -1
CONSTRAINTS_G[7, 7] = -1
CONSTRAINTS_G[8, 0] = 1
CONSTRAINTS_G[8, 1] = 1
CONSTRAINTS_H[8] = 2
CONSTRAINTS_G[9, :] = 1
CONSTRAINTS_H[9] = 4
del _i


def in_fundamental_region(z, tol: float = 1e-12) -> np.ndarray | bool:
    """True where z satisfies all wedge constraints within tol."""
    z = np.asarray(z, dtype=np.float64)
    slack = CONSTRAINTS_H - z @ CONSTRAINTS_G.T
    result = (slack >= -tol).all(axis=-1)
    return bool(result) if result.ndim == 0 else result


def enumerate_box_points(bound: int) -> np.ndarray:
    """All lattice points with coordinates in [-bound, bound], sorted."""
    evens = np.arange(-bound - (bound % 2), bound + 1, 2, dtype=np.int64)
    evens = evens[np.abs(evens) <= bound]
    odds = np.arange(-bound + (1 - bound % 2), bound + 1, 2, dtype=np.int64)
    odds = odds[np.abs(odds) <= bound]
    chunks = []
    for vals in (evens, odds):
        if vals.size == 0:
            continue
        grid = np.stack(np.meshgrid(*([vals] * DIM), indexing="ij"), axis=-1)
        pts = grid.reshape(-1, DIM)
        pts = pts[pts.sum(axis=1) % 4 == 0]
        chunks.append(pts)
    pts = np.concatenate(chunks, axis=0)
    order = np.lexsort(pts.T[::-1])
    return pts[order]


def min_vectors() -> np.ndarray:
    """The 240 minimal vectors (squared norm 8), lexicographically sorted."""
    pts = enumerate_box_points(3)
    return pts[(pts * pts).sum(axis=1) == SUPPORT_RADIUS_SQ]


def random_lattice_points(n: int, rng: np.random.Generator, span: int = 8) -> np.ndarray:
    """Random lattice points from integer combinations of the basis."""
    coeffs = rng.integers(-span, span + 1, size=(n, DIM))
    return np.asarray(coeffs @ BASIS, dtype=np.int64)


def ball_volume(dimension: int, radius: float) -> float:
    """Volume of the Euclidean ball of the given radius."""
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    return math.pi ** (dimension / 2.0) * radius**dimension / math.gamma(dimension / 2.0 + 1.0)


def expected_support_count(dimension: int, covering_radius: float) -> float:
    """Average number of points inside an interpolation ball, per unit density.

    The interpolation radius is sqrt(2) times the covering radius; for a
    unimodular lattice the expected number of lattice points inside the
    ball equals the ball volume.
    """
    if covering_radius <= 0:
        raise ValueError("covering_radius must be positive")
    return ball_volume(dimension, math.sqrt(2.0) * covering_radius)


#: Exact covering radii of the comparison lattices at unimodular scale.
UNIMODULAR_COVERING_RADIUS = {
    "Z8": math.sqrt(2.0),
    "E8": 1.0,
    "K12": math.sqrt(8.0 * math.sqrt(3.0)) / 3.0,
    "BW16": math.sqrt(3.0 / math.sqrt(2.0)),
    "Leech": math.sqrt(2.0),
}

#: Dimensions of the comparison lattices.
LATTICE_DIMENSION = {"Z8": 8, "E8": 8, "K12": 12, "BW16": 16, "Leech": 24}


def support_count_table() -> dict[str, float]:
    """Analytic average support counts for the comparison lattices."""
    return {
        name: expected_support_count(LATTICE_DIMENSION[name], radius)
        for name, radius in UNIMODULAR_COVERING_RADIUS.items()
    }
