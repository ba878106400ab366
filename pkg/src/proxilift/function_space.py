"""Discretized continuous-function machinery on [0,1] and [0,1]^2.

For a closed set D, the ideal J_D of grid functions vanishing on D admits a
linear selection of the metric projection: subtract the affine interpolant
of f between the D-endpoints of each gap (a constant beyond the outermost
endpoints) and zero out D itself.  The distance of f to J_D is then the max
of |f| over D, and the subtraction realizes it.  The two-dimensional
variant applies the same rule radially along rays from the origin.  A
componentwise transfer applies a certified selection across finite product
spaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_spaces import DEFAULT_TOL, Norm, Space, Tolerance, norm
from .selection_engine import SelectionCertificate

_SNAP_DEFAULT = 1e-6
_GRID_CAP = 2**22 + 1


class UnalignedGrid(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ClosedSet1D:
    """A closed subset of [0,1]: a disjoint union of intervals (points are
    intervals with equal endpoints).  Touching intervals are merged."""

    intervals: tuple

    def __post_init__(self):
        ivs = [(float(lo), float(hi)) for lo, hi in self.intervals]
        if not ivs:
            raise ValueError("the closed set must be nonempty")
        for lo, hi in ivs:
            if not (0.0 <= lo <= hi <= 1.0):
                raise ValueError(f"interval [{lo}, {hi}] is not inside [0, 1]")
        ivs.sort()
        merged = [ivs[0]]
        for lo, hi in ivs[1:]:
            if lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        object.__setattr__(self, "intervals", tuple(merged))

    @classmethod
    def parse(cls, text: str) -> "ClosedSet1D":
        """Parse the textual form ``[a,b];[c,d];...``."""
        parts = [p.strip() for p in text.split(";") if p.strip()]
        ivs = []
        for p in parts:
            if not (p.startswith("[") and p.endswith("]")):
                raise ValueError(f"bad interval syntax: {p!r}")
            nums = p[1:-1].split(",")
            if len(nums) != 2:
                raise ValueError(f"bad interval syntax: {p!r}")
            ivs.append((float(nums[0]), float(nums[1])))
        return cls(tuple(ivs))

    def format(self) -> str:
        return ";".join(f"[{lo:.17g},{hi:.17g}]" for lo, hi in self.intervals)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a function on the uniform grid of [0,1]."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("a grid function needs a 1-d array of >= 2 samples")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def grid_n(self) -> int:
        return self.values.size

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.grid_n)

    @classmethod
    def from_callable(cls, fn, grid_n: int) -> "GridFunction":
        return cls(np.asarray(fn(np.linspace(0.0, 1.0, grid_n)), dtype=float))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


def _snap(d: ClosedSet1D, grid_n: int):
    """Snap interval endpoints to grid indices; returns (max shift, merged
    index pairs)."""
    m = grid_n - 1
    pairs = []
    err = 0.0
    for lo, hi in d.intervals:
        ilo = int(round(lo * m))
        ihi = int(round(hi * m))
        err = max(err, abs(lo - ilo / m), abs(hi - ihi / m))
        pairs.append((ilo, ihi))
    merged = [pairs[0]]
    for ilo, ihi in pairs[1:]:
        if ilo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], ihi))
        else:
            merged.append((ilo, ihi))
    return err, merged


def _next_grid(grid_n: int) -> int:
    m = 1
    while m + 1 <= grid_n:
        m *= 2
    return m + 1


def aligned_grid_for(
    d: ClosedSet1D, grid_n: int = 1025, max_snap: float = _SNAP_DEFAULT
) -> int:
    """Smallest grid (refining to the next power of two plus one) on which
    every endpoint of D snaps to a grid point within max_snap.  The
    construction needs exact zeros at the snapped endpoints; the refinement
    bounds how far D moves."""
    n = grid_n
    while n <= _GRID_CAP:
        err, _ = _snap(d, n)
        if err < max_snap:
            return n
        n = _next_grid(n)
    raise RuntimeError("grid refinement cap exceeded")


def d_mask(d: ClosedSet1D, grid_n: int, max_snap: float = _SNAP_DEFAULT) -> np.ndarray:
    """Boolean mask of the grid points belonging to (the snapped) D."""
    err, pairs = _snap(d, grid_n)
    if err > max_snap:
        raise UnalignedGrid(
            f"endpoint snap error {err:.2e} exceeds {max_snap:.0e}; "
            "sample on aligned_grid_for(D) first"
        )
    mask = np.zeros(grid_n, dtype=bool)
    for ilo, ihi in pairs:
        mask[ilo : ihi + 1] = True
    return mask


def star_selection_1d(
    f: GridFunction, d: ClosedSet1D, max_snap: float = _SNAP_DEFAULT
) -> GridFunction:
    """The selection onto the vanishing ideal of D: zero on D, f minus the
    affine interpolant of f across each gap between D components, f minus
    the boundary value beyond the outermost components.  Linear in f, and
    f - f1 attains dist(f, J_D) = max over D of |f|."""
    err, pairs = _snap(d, f.grid_n)
    if err > max_snap:
        raise UnalignedGrid(
            f"endpoint snap error {err:.2e} exceeds {max_snap:.0e}; "
            "sample on aligned_grid_for(D) first"
        )
    v = f.values
    out = np.empty_like(v)
    first_lo = pairs[0][0]
    last_hi = pairs[-1][1]
    out[:first_lo] = v[:first_lo] - v[first_lo]
    out[last_hi + 1 :] = v[last_hi + 1 :] - v[last_hi]
    for (_, hi), (nlo, _) in zip(pairs, pairs[1:]):
        idx = np.arange(hi + 1, nlo)
        lam = (idx - hi) / (nlo - hi)
        out[idx] = v[idx] - v[hi] + lam * (v[hi] - v[nlo])
    for ilo, ihi in pairs:
        out[ilo : ihi + 1] = 0.0
    return GridFunction(out)


def vanishing_ideal_distance(
    f: GridFunction, d: ClosedSet1D, max_snap: float = _SNAP_DEFAULT
) -> float:
    """dist(f, J_D) on the grid: the sup of |f| over the points of D."""
    mask = d_mask(d, f.grid_n, max_snap)
    return float(np.max(np.abs(f.values[mask])))


# ---------------------------------------------------------------------------
# Two-dimensional radial variant


@dataclass(frozen=True, eq=False)
class GridFunction2D:
    """Samples on the uniform grid of [0,1]^2; values[ix, iy] sits at
    (ix*h, iy*h)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] < 2:
            raise ValueError("a 2-d grid function needs a square array")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def grid_n(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_callable(cls, fn, grid_n: int) -> "GridFunction2D":
        ax = np.linspace(0.0, 1.0, grid_n)
        xs, ys = np.meshgrid(ax, ax, indexing="ij")
        return cls(np.asarray(fn(xs, ys), dtype=float))


@dataclass(frozen=True, eq=False)
class Star2DResult:
    f1: GridFunction2D
    uncovered: np.ndarray  # points whose ray misses D (reported per point)
    max_adjacent_jump: float


def _bilinear(values: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = values.shape[0]
    gx = np.clip(x * (n - 1), 0.0, n - 1.0)
    gy = np.clip(y * (n - 1), 0.0, n - 1.0)
    ix = np.minimum(gx.astype(int), n - 2)
    iy = np.minimum(gy.astype(int), n - 2)
    fx = gx - ix
    fy = gy - iy
    v00 = values[ix, iy]
    v10 = values[ix + 1, iy]
    v01 = values[ix, iy + 1]
    v11 = values[ix + 1, iy + 1]
    return (
        v00 * (1 - fx) * (1 - fy)
        + v10 * fx * (1 - fy)
        + v01 * (1 - fx) * fy
        + v11 * fx * fy
    )


def ray_segments(predicate, direction: tuple, grid_n: int):
    """March the ray from the origin along `direction` at grid resolution
    and return the radial segments where the predicate holds as (lo, hi)
    pairs (single samples give point segments)."""
    ux, uy = direction
    h = 1.0 / (grid_n - 1)
    length = math.hypot(ux, uy)
    ux, uy = ux / length, uy / length
    r_max = min(
        1.0 / ux if ux > 1e-12 else math.inf,
        1.0 / uy if uy > 1e-12 else math.inf,
    )
    radii = np.arange(0.0, r_max + 0.5 * h, h)
    radii = radii[radii <= r_max + 1e-12]
    hit = np.asarray(
        predicate(radii * ux, radii * uy), dtype=bool
    )
    segments = []
    start = None
    for i, flag in enumerate(hit):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            segments.append((radii[start], radii[i - 1]))
            start = None
    if start is not None:
        segments.append((radii[start], radii[-1]))
    return segments


def star_selection_2d(f: GridFunction2D, predicate) -> Star2DResult:
    """Radial variant of the 1-d construction: for each grid point, the ray
    through the origin is marched at grid resolution, its intersection with
    D grouped into radial segments, and the 1-d rule applied along the ray
    (values off the lattice come from bilinear interpolation).  Points whose
    ray misses D entirely are reported, not invented.  Linearity in f holds
    because all anchors depend only on D.  Adjacent-ray roughness is
    reported as a diagnostic; no continuity across rays is claimed."""
    n = f.grid_n
    h = 1.0 / (n - 1)
    vals = f.values
    ax = np.linspace(0.0, 1.0, n)
    xs, ys = np.meshgrid(ax, ax, indexing="ij")
    on_d = np.asarray(predicate(xs, ys), dtype=bool)
    out = np.zeros_like(vals)
    uncovered = np.zeros((n, n), dtype=bool)

    rays: dict[tuple, list] = {}
    for ix in range(n):
        for iy in range(n):
            if ix == 0 and iy == 0:
                continue
            g = math.gcd(ix, iy)
            rays.setdefault((ix // g, iy // g), []).append((ix, iy))

    def apply_ray(direction, points):
        segments = ray_segments(predicate, direction, n)
        ux, uy = direction
        length = math.hypot(ux, uy)
        ux, uy = ux / length, uy / length
        anchors = {}

        def f_at(r):
            if r not in anchors:
                anchors[r] = float(
                    _bilinear(vals, np.array([r * ux]), np.array([r * uy]))[0]
                )
            return anchors[r]

        for ix, iy in points:
            if on_d[ix, iy]:
                out[ix, iy] = 0.0
                continue
            r_p = math.hypot(ix * h, iy * h)
            if not segments:
                uncovered[ix, iy] = True
                out[ix, iy] = vals[ix, iy]
                continue
            if r_p < segments[0][0]:
                out[ix, iy] = vals[ix, iy] - f_at(segments[0][0])
                continue
            if r_p > segments[-1][1]:
                out[ix, iy] = vals[ix, iy] - f_at(segments[-1][1])
                continue
            placed = False
            for (lo, hi) in segments:
                if lo - 1e-12 <= r_p <= hi + 1e-12:
                    out[ix, iy] = 0.0
                    placed = True
                    break
            if placed:
                continue
            for (_, hi), (nlo, _) in zip(segments, segments[1:]):
                if hi < r_p < nlo:
                    lam = (r_p - hi) / (nlo - hi)
                    out[ix, iy] = vals[ix, iy] - f_at(hi) + lam * (f_at(hi) - f_at(nlo))
                    break

    for direction, points in rays.items():
        apply_ray(direction, points)
    if on_d[0, 0]:
        out[0, 0] = 0.0
    else:
        # the origin lies on every ray; use the first axis by convention
        apply_ray((1, 0), [(0, 0)])

    jump = 0.0
    ok = ~uncovered
    for diffs, pair_ok in (
        (np.abs(np.diff(out, axis=0)), ok[:-1, :] & ok[1:, :]),
        (np.abs(np.diff(out, axis=1)), ok[:, :-1] & ok[:, 1:]),
    ):
        if np.any(pair_ok):
            jump = max(jump, float(np.max(diffs[pair_ok])))
    return Star2DResult(f1=GridFunction2D(out), uncovered=uncovered, max_adjacent_jump=jump)


def annulus_predicate(r_lo: float, r_hi: float):
    def pred(x, y):
        r = np.hypot(x, y)
        return (r >= r_lo) & (r <= r_hi)

    return pred


def rect_predicate(x0: float, x1: float, y0: float, y1: float):
    def pred(x, y):
        return (x >= x0) & (x <= x1) & (y >= y0) & (y <= y1)

    return pred


# ---------------------------------------------------------------------------
# Componentwise transfer to finite product spaces


def product_norm_value(space: Space, components, kind: Norm) -> float:
    norms = [norm(space, c) for c in components]
    if kind is Norm.SUP:
        return max(norms) if norms else 0.0
    if kind is Norm.SUM:
        return float(sum(norms))
    raise ValueError("product aggregation is sup or sum")


def product_distance(space: Space, subspace, components, kind: Norm,
                     tol: Tolerance = DEFAULT_TOL) -> float:
    """Distance of a tuple to the product of J with itself: the sup or sum
    aggregate of the componentwise distances."""
    from .core_spaces import project_onto_subspace

    dists = [
        project_onto_subspace(space, subspace, c, tol, want_face=False).distance
        for c in components
    ]
    if kind is Norm.SUP:
        return max(dists) if dists else 0.0
    if kind is Norm.SUM:
        return float(sum(dists))
    raise ValueError("product aggregation is sup or sum")


def componentwise_selection(
    cert: SelectionCertificate,
    components,
    kind: Norm = Norm.SUP,
    tol: Tolerance = DEFAULT_TOL,
):
    """Apply a certified selection to each component of a tuple; the result
    selects a nearest point in the product of J (the product distance is the
    aggregate of componentwise distances, attained componentwise).  The
    crude bound ||(p(x_i))|| <= 2 ||(x_i)|| is asserted on the way."""
    if not cert.certified:
        raise ValueError("selection certificate carries violations")
    space = cert.p.domain
    comps = [space.check(c) for c in components]
    projected = [cert.p.matrix @ c for c in comps]
    bound = 2.0 * product_norm_value(space, comps, kind)
    got = product_norm_value(space, projected, kind)
    if got > bound + tol.eps_eq * (1.0 + bound):
        raise RuntimeError("componentwise bound violated")
    return projected


# ---------------------------------------------------------------------------
# CSV forms


def write_grid_csv(path, f: GridFunction) -> None:
    xs = f.grid()
    with open(path, "w") as fh:
        fh.write("x,value\n")
        for x, v in zip(xs, f.values):
            fh.write(f"{x:.17g},{v:.17g}\n")


def read_grid_csv(path) -> GridFunction:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "x,value":
            raise ValueError("expected header 'x,value'")
        xs, vs = [], []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            a, b = line.split(",")
            xs.append(float(a))
            vs.append(float(b))
    xs = np.asarray(xs)
    n = xs.size
    if n < 2:
        raise ValueError("need at least two samples")
    expect = np.linspace(0.0, 1.0, n)
    if float(np.max(np.abs(xs - expect))) > 1e-9:
        raise ValueError("samples are not on the uniform grid of [0,1]")
    return GridFunction(np.asarray(vs))


def write_grid2d_csv(path, f: GridFunction2D) -> None:
    n = f.grid_n
    ax = np.linspace(0.0, 1.0, n)
    with open(path, "w") as fh:
        fh.write("x,y,value\n")
        for ix in range(n):
            for iy in range(n):
                fh.write(f"{ax[ix]:.17g},{ax[iy]:.17g},{f.values[ix, iy]:.17g}\n")


def read_grid2d_csv(path) -> GridFunction2D:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "x,y,value":
            raise ValueError("expected header 'x,y,value'")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    total = len(rows)
    n = int(round(math.sqrt(total)))
    if n * n != total or n < 2:
        raise ValueError("samples do not form a square grid")
    vals = np.array([float(r[2]) for r in rows]).reshape(n, n)
    return GridFunction2D(vals)
