"""Core normed-space machinery.

Finite-dimensional real spaces with the sup, sum, or Euclidean norm;
subspaces given by a basis; linear maps between spaces and quotients; a
dense two-phase simplex solver with Bland's rule; exact operator norms by
extreme-point enumeration; and a brute-force grid oracle for distances.

Everything is immutable after construction and every operation is a pure
function of its inputs, so concurrent read-only use needs no coordination.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

# Geometric extents below this count as a single point (optimal-face probing).
FACE_EXTENT_TOL = 1e-7
# Simplex pivot / reduced-cost threshold; instances are tiny and well scaled.
_PIVOT_TOL = 1e-11
# Phase-1 residual above this (relative to the right-hand side) is infeasible.
_FEAS_TOL = 1e-8
_MAX_SUP_ENUM_DIM = 12


class Norm(Enum):
    SUP = "linf"
    SUM = "l1"
    EUCLID = "l2"


class DimensionMismatch(ValueError):
    pass


class RankDeficientBasis(ValueError):
    pass


class UnsupportedNormPair(ValueError):
    pass


class LpInfeasible(RuntimeError):
    pass


class LpUnbounded(RuntimeError):
    pass


@dataclass(frozen=True)
class Tolerance:
    """Numeric policy shared by all operations.

    eps_eq is a relative scalar-equality tolerance, eps_rank the rank
    threshold for basis validation, sphere_samples the sampling density of
    set-inclusion checks that have no exact route.
    """

    eps_eq: float = 1e-9
    eps_rank: float = 1e-10
    sphere_samples: int = 4096

    def __post_init__(self):
        if self.eps_eq <= 0 or self.eps_rank <= 0 or self.sphere_samples <= 0:
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


def approx_eq(a: float, b: float, tol: Tolerance = DEFAULT_TOL) -> bool:
    return abs(a - b) <= tol.eps_eq * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class Space:
    dim: int
    norm: Norm

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if not isinstance(self.norm, Norm):
            raise ValueError("norm must be a Norm member")

    def check(self, x) -> np.ndarray:
        v = np.asarray(x, dtype=float)
        if v.shape != (self.dim,):
            raise DimensionMismatch(
                f"vector of shape {v.shape} in space of dim {self.dim}"
            )
        return v


def norm(space: Space, x) -> float:
    """Norm of x in the given space (sup, sum, or Euclidean)."""
    v = space.check(x)
    if space.norm is Norm.SUP:
        return float(np.max(np.abs(v)))
    if space.norm is Norm.SUM:
        return float(np.sum(np.abs(v)))
    return float(np.linalg.norm(v))


def _as_basis_matrix(dim: int, basis) -> np.ndarray:
    b = np.asarray(basis, dtype=float)
    if b.ndim == 1:
        b = b.reshape(dim, 1) if b.size else b.reshape(dim, 0)
    if b.ndim != 2 or b.shape[0] != dim:
        # a list of vectors is accepted and stored column-wise
        rows = [np.asarray(v, dtype=float) for v in basis]
        if not rows:
            return np.zeros((dim, 0))
        if any(r.shape != (dim,) for r in rows):
            raise DimensionMismatch("basis vectors must match the ambient dim")
        b = np.column_stack(rows)
    return b


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of `ambient` spanned by the columns of `basis` (n x k).

    k = 0 is the zero subspace.  The basis must have full column rank; near
    dependent bases are rejected because downstream constructions assume a
    genuine basis.
    """

    ambient: Space
    basis: np.ndarray

    def __post_init__(self):
        b = _as_basis_matrix(self.ambient.dim, self.basis)
        if b.shape[1] > self.ambient.dim:
            raise RankDeficientBasis("more basis vectors than the dimension")
        if b.shape[1] > 0:
            r, _ = pivoted_rank(b, DEFAULT_TOL.eps_rank)
            if r < b.shape[1]:
                raise RankDeficientBasis(
                    f"basis has rank {r} < {b.shape[1]} at tolerance"
                )
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    def coefficients(self, x) -> np.ndarray:
        x = self.ambient.check(x)
        if self.k == 0:
            return np.zeros(0)
        return np.linalg.lstsq(self.basis, x, rcond=None)[0]

    def contains(self, x, tol: Tolerance = DEFAULT_TOL) -> bool:
        x = self.ambient.check(x)
        res = x - self.basis @ self.coefficients(x)
        return float(np.max(np.abs(res), initial=0.0)) <= tol.eps_eq * (
            1.0 + float(np.max(np.abs(x), initial=0.0))
        )


def storage_dim(sp) -> int:
    """Matrix storage dimension of a Space or quotient (coset representatives
    of a quotient are stored in the ambient coordinates)."""
    if isinstance(sp, Space):
        return sp.dim
    return sp.ambient.dim


def is_quotient(sp) -> bool:
    return not isinstance(sp, Space) and hasattr(sp, "ambient")


@dataclass(frozen=True, eq=False)
class LinearMap:
    """A linear map given by a matrix of shape (storage codomain, storage domain).

    When the codomain is a quotient, columns are coset representatives; when
    the domain is a quotient, the matrix represents the composition with the
    quotient map (it must vanish on the subspace to be well defined).
    """

    matrix: np.ndarray
    domain: object
    codomain: object

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2:
            raise DimensionMismatch("matrix must be two-dimensional")
        want = (storage_dim(self.codomain), storage_dim(self.domain))
        if m.shape != want:
            raise DimensionMismatch(f"matrix shape {m.shape}, expected {want}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __call__(self, x) -> np.ndarray:
        v = np.asarray(x, dtype=float)
        if v.shape != (self.matrix.shape[1],):
            raise DimensionMismatch("argument does not match the domain")
        return self.matrix @ v


# ---------------------------------------------------------------------------
# Elimination utilities


def pivoted_rank(mat, eps: float = DEFAULT_TOL.eps_rank):
    """Rank by Gaussian elimination with column pivot selection.

    Returns (rank, pivot column indices).  The threshold is relative to the
    largest entry of the input.
    """
    a = np.array(mat, dtype=float)
    if a.ndim != 2:
        raise ValueError("matrix expected")
    nrows, ncols = a.shape
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    thr = eps * scale
    row = 0
    pivots: list[int] = []
    for col in range(ncols):
        if row == nrows:
            break
        sub = np.abs(a[row:, col])
        p = int(np.argmax(sub))
        if sub[p] <= thr:
            continue
        if p != 0:
            a[[row, row + p]] = a[[row + p, row]]
        a[row + 1 :] -= np.outer(a[row + 1 :, col] / a[row, col], a[row])
        pivots.append(col)
        row += 1
    return row, pivots


def complete_to_standard_basis(basis: np.ndarray, eps: float = DEFAULT_TOL.eps_rank):
    """Indices of standard basis vectors completing `basis` to a full basis.

    Chosen by column-pivoted elimination on [basis | I], so the choice is
    deterministic.
    """
    n, k = basis.shape
    aug = np.hstack([basis, np.eye(n)])
    r, pivots = pivoted_rank(aug, eps)
    if any(p >= k for p in pivots[:k]) or r < n:
        raise RankDeficientBasis("basis columns are not independent")
    return [p - k for p in pivots[k:]]


def rref(mat, eps: float = DEFAULT_TOL.eps_rank):
    """Reduced row echelon form with partial pivoting; returns (R, pivots)."""
    a = np.array(mat, dtype=float)
    nrows, ncols = a.shape
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    thr = eps * scale
    row = 0
    pivots: list[int] = []
    for col in range(ncols):
        if row == nrows:
            break
        sub = np.abs(a[row:, col])
        p = int(np.argmax(sub))
        if sub[p] <= thr:
            continue
        if p != 0:
            a[[row, row + p]] = a[[row + p, row]]
        a[row] /= a[row, col]
        others = [i for i in range(nrows) if i != row]
        a[others] -= np.outer(a[others, col], a[row])
        pivots.append(col)
        row += 1
    return a, pivots


def null_space_vector(mat, eps: float = DEFAULT_TOL.eps_rank) -> np.ndarray:
    """A deterministic basis vector of a one-dimensional null space."""
    a = np.asarray(mat, dtype=float)
    ncols = a.shape[1]
    r, pivots = rref(a, eps)
    free = [j for j in range(ncols) if j not in pivots]
    if len(free) != 1:
        raise ValueError(f"null space has dimension {len(free)}, expected 1")
    j = free[0]
    v = np.zeros(ncols)
    v[j] = 1.0
    for row, p in enumerate(pivots):
        v[p] = -r[row, j]
    # sign convention: first nonzero entry positive
    nz = np.flatnonzero(np.abs(v) > eps)
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v


def subspace_residual(basis: np.ndarray, vectors: np.ndarray) -> float:
    """Max-abs residual of the given columns against span(basis)."""
    v = np.atleast_2d(np.asarray(vectors, dtype=float))
    if v.shape[0] != basis.shape[0]:
        v = v.T
    if basis.shape[1] == 0:
        return float(np.max(np.abs(v), initial=0.0))
    coef = np.linalg.lstsq(basis, v, rcond=None)[0]
    return float(np.max(np.abs(v - basis @ coef), initial=0.0))


# ---------------------------------------------------------------------------
# Dense simplex


@dataclass(frozen=True)
class LpResult:
    value: float
    x: np.ndarray


def _price_out(t: np.ndarray, basis: list[int]) -> None:
    for i, bi in enumerate(basis):
        coef = t[-1, bi]
        if coef != 0.0:
            t[-1] -= coef * t[i]


def _iterate(t: np.ndarray, basis: list[int], allowed: int) -> None:
    """Bland-rule simplex iterations on the tableau.

    `allowed` is the number of leading columns eligible to enter; the
    right-hand side is the last column and the cost row the last row.
    """
    m = t.shape[0] - 1
    max_iter = 200 + 50 * t.shape[1]
    for _ in range(max_iter):
        reduced = t[-1, :allowed]
        candidates = np.flatnonzero(reduced < -_PIVOT_TOL)
        if candidates.size == 0:
            return
        col = int(candidates[0])
        column = t[:m, col]
        rows = np.flatnonzero(column > _PIVOT_TOL)
        if rows.size == 0:
            raise LpUnbounded("objective decreases without bound")
        ratios = t[rows, -1] / column[rows]
        best = np.min(ratios)
        tie = rows[ratios <= best + _PIVOT_TOL * (1.0 + abs(best))]
        leave = int(min(tie, key=lambda i: basis[i]))
        piv = t[leave, col]
        t[leave] /= piv
        others = [i for i in range(m + 1) if i != leave]
        t[others] -= np.outer(t[others, col], t[leave])
        basis[leave] = col
    raise RuntimeError("simplex did not converge (iteration cap)")


def solve_lp(
    c,
    a_ub=None,
    b_ub=None,
    a_eq=None,
    b_eq=None,
) -> LpResult:
    """Minimize c @ x over free x with a_ub @ x <= b_ub and a_eq @ x == b_eq.

    Two-phase dense simplex with Bland's rule; unbounded and infeasible
    problems raise LpUnbounded / LpInfeasible.  Intended for the tiny
    instances produced by distance and face computations.
    """
    c = np.atleast_1d(np.asarray(c, dtype=float))
    n = c.size
    a_ub = np.zeros((0, n)) if a_ub is None else np.atleast_2d(np.asarray(a_ub, float))
    b_ub = np.zeros(0) if b_ub is None else np.atleast_1d(np.asarray(b_ub, float))
    a_eq = np.zeros((0, n)) if a_eq is None else np.atleast_2d(np.asarray(a_eq, float))
    b_eq = np.zeros(0) if b_eq is None else np.atleast_1d(np.asarray(b_eq, float))
    if a_ub.shape != (b_ub.size, n) or a_eq.shape != (b_eq.size, n):
        raise DimensionMismatch("constraint shapes do not match the objective")

    m_ub, m_eq = b_ub.size, b_eq.size
    m = m_ub + m_eq
    ncore = 2 * n + m_ub
    a = np.zeros((m, ncore))
    a[:m_ub, :n] = a_ub
    a[:m_ub, n : 2 * n] = -a_ub
    a[:m_ub, 2 * n :] = np.eye(m_ub)
    a[m_ub:, :n] = a_eq
    a[m_ub:, n : 2 * n] = -a_eq
    b = np.concatenate([b_ub, b_eq])
    flip = b < 0
    a[flip] *= -1.0
    b[flip] *= -1.0

    basis = [-1] * m
    for i in range(m_ub):
        if not flip[i]:
            basis[i] = 2 * n + i
    art_rows = [i for i in range(m) if basis[i] == -1]
    nart = len(art_rows)
    ncols = ncore + nart
    t = np.zeros((m + 1, ncols + 1))
    t[:m, :ncore] = a
    t[:m, -1] = b
    for idx, i in enumerate(art_rows):
        t[i, ncore + idx] = 1.0
        basis[i] = ncore + idx

    if nart:
        t[-1, :] = 0.0
        t[-1, ncore:ncols] = 1.0
        _price_out(t, basis)
        _iterate(t, basis, ncore)
        resid = -t[-1, -1]
        if abs(resid) > _FEAS_TOL * (1.0 + float(np.max(np.abs(b), initial=0.0))):
            raise LpInfeasible(f"phase-1 residual {resid:.3e}")
        # Pivot surviving artificials out; rows without any usable pivot are
        # redundant and get neutralized.
        drop = []
        for i in range(m):
            if basis[i] < ncore:
                continue
            row = t[i, :ncore]
            cols = np.flatnonzero(np.abs(row) > _PIVOT_TOL)
            if cols.size:
                col = int(cols[0])
                piv = t[i, col]
                t[i] /= piv
                others = [r for r in range(m + 1) if r != i]
                t[others] -= np.outer(t[others, col], t[i])
                basis[i] = col
            else:
                drop.append(i)
        if drop:
            keep = [i for i in range(m) if i not in drop]
            t = np.vstack([t[keep], t[-1:]])
            basis = [basis[i] for i in keep]
            m = len(keep)

    t[-1, :] = 0.0
    t[-1, :n] = c
    t[-1, n : 2 * n] = -c
    _price_out(t, basis)
    _iterate(t, basis, ncore)

    z = np.zeros(ncols)
    for i, bi in enumerate(basis):
        z[bi] = t[i, -1]
    x = z[:n] - z[n : 2 * n]
    return LpResult(value=float(c @ x), x=x)


@dataclass(frozen=True)
class FaceInfo:
    result: LpResult
    extents: np.ndarray
    dim: int


def optimal_face(
    c,
    a_ub=None,
    b_ub=None,
    a_eq=None,
    b_eq=None,
    coords=None,
) -> FaceInfo:
    """Solve the LP and report the optimal face restricted to `coords`.

    The face is analyzed by re-solving with secondary objectives over the
    optimal set: each probed coordinate is minimized and maximized (the
    extents), and each inequality's slack is maximized to decide whether it
    binds on the whole face.  The affine hull of the face is the solution
    set of the always-binding rows, so the reported dimension (of the
    projection onto `coords`) is exact up to tolerances.
    """
    base = solve_lp(c, a_ub, b_ub, a_eq, b_eq)
    c = np.atleast_1d(np.asarray(c, dtype=float))
    n = c.size
    if coords is None:
        coords = list(range(n))
    a_ub0 = np.zeros((0, n)) if a_ub is None else np.atleast_2d(np.asarray(a_ub, float))
    b_ub0 = np.zeros(0) if b_ub is None else np.atleast_1d(np.asarray(b_ub, float))
    a_eq0 = np.zeros((0, n)) if a_eq is None else np.atleast_2d(np.asarray(a_eq, float))
    slack = 1e-11 * (1.0 + abs(base.value))
    a2 = np.vstack([a_ub0, c])
    b2 = np.concatenate([b_ub0, [base.value + slack]])

    extents = []
    for d in coords:
        obj = np.zeros(n)
        obj[d] = 1.0
        lo = solve_lp(obj, a2, b2, a_eq, b_eq)
        hi = solve_lp(-obj, a2, b2, a_eq, b_eq)
        extents.append(-hi.value - lo.value)
    extents = np.asarray(extents)
    scale = max(1.0, float(np.max(np.abs(base.x), initial=0.0)), abs(base.value))
    if extents.size and float(np.max(extents)) <= FACE_EXTENT_TOL * scale:
        return FaceInfo(result=base, extents=extents, dim=0)

    binding = [c]
    for i in range(a_ub0.shape[0]):
        row = a_ub0[i]
        gap = solve_lp(row, a2, b2, a_eq, b_eq)  # min a_i z, i.e. max slack
        if b_ub0[i] - gap.value <= FACE_EXTENT_TOL * scale:
            binding.append(row)
    stack = np.vstack([a_eq0, np.asarray(binding)]) if binding else a_eq0
    sv_all = np.linalg.svd(stack, compute_uv=False) if stack.size else np.zeros(0)
    thr = FACE_EXTENT_TOL * max(1.0, float(sv_all[0]) if sv_all.size else 1.0)
    _, sv, vt = np.linalg.svd(stack) if stack.size else (None, np.zeros(0), np.eye(n))
    rank = int(np.sum(sv > thr))
    null = vt[rank:].T
    proj = null[coords, :] if null.size else np.zeros((len(coords), 0))
    dim = int(np.linalg.matrix_rank(proj, tol=1e-9)) if proj.size else 0
    return FaceInfo(result=base, extents=extents, dim=dim)


# ---------------------------------------------------------------------------
# Distance engine (used by metric_projection and by operator norms over
# quotients; fast closed forms where available, LP otherwise)


@dataclass(frozen=True)
class ProjectionCore:
    distance: float
    coefficients: np.ndarray
    representative: np.ndarray
    face_dim: int


def _span_projection_sup(x: np.ndarray, v: np.ndarray) -> tuple[float, float, float]:
    """Minimize max_i |x_i - t v_i|; returns (value, t_lo, t_hi) of the
    optimal interval.  Candidate kinks are pairwise crossings of the lines
    +-(x_i - t v_i)."""
    den_p = v[:, None] - v[None, :]
    den_m = v[:, None] + v[None, :]
    num_p = x[:, None] - x[None, :]
    num_m = x[:, None] + x[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        t_p = np.where(np.abs(den_p) > 1e-14, num_p / den_p, np.nan)
        t_m = np.where(np.abs(den_m) > 1e-14, num_m / den_m, np.nan)
    ts = np.concatenate([[0.0], t_p.ravel(), t_m.ravel()])
    ts = ts[np.isfinite(ts)]
    vals = np.max(np.abs(x[None, :] - ts[:, None] * v[None, :]), axis=1)
    best = float(np.min(vals))
    eps = 1e-11 * (1.0 + best)
    opt = ts[vals <= best + eps]
    return best, float(np.min(opt)), float(np.max(opt))


def _span_projection_sum(x: np.ndarray, v: np.ndarray) -> tuple[float, float, float]:
    nz = np.abs(v) > 1e-14
    ts = np.concatenate([[0.0], x[nz] / v[nz]])
    vals = np.sum(np.abs(x[None, :] - ts[:, None] * v[None, :]), axis=1)
    best = float(np.min(vals))
    eps = 1e-11 * (1.0 + best)
    opt = ts[vals <= best + eps]
    return best, float(np.min(opt)), float(np.max(opt))


def _project_lp(space: Space, basis: np.ndarray, x: np.ndarray, want_face: bool):
    n, k = basis.shape
    if space.norm is Norm.SUP:
        # variables (t, c); rows -t -+ B_i c <= -+ x_i
        nv = 1 + k
        a = np.zeros((2 * n, nv))
        b = np.zeros(2 * n)
        a[:n, 0] = -1.0
        a[:n, 1:] = -basis
        b[:n] = -x
        a[n:, 0] = -1.0
        a[n:, 1:] = basis
        b[n:] = x
        obj = np.zeros(nv)
        obj[0] = 1.0
        coords = list(range(1, nv))
    else:
        # variables (t_1..t_n, c)
        nv = n + k
        a = np.zeros((2 * n, nv))
        b = np.zeros(2 * n)
        a[:n, :n] = -np.eye(n)
        a[:n, n:] = -basis
        b[:n] = -x
        a[n:, :n] = -np.eye(n)
        a[n:, n:] = basis
        b[n:] = x
        obj = np.zeros(nv)
        obj[:n] = 1.0
        coords = list(range(n, nv))
    if want_face:
        info = optimal_face(obj, a, b, coords=coords)
        res, dim = info.result, info.dim
    else:
        res, dim = solve_lp(obj, a, b), 0
    coef = res.x[coords]
    return res.value, coef, dim


def project_onto_subspace(
    space: Space,
    subspace: Subspace,
    x,
    tol: Tolerance = DEFAULT_TOL,
    want_face: bool = True,
    method: str = "auto",
) -> ProjectionCore:
    """Distance and a nearest point of x in the subspace, plus the dimension
    of the set of nearest points.

    method "auto" uses closed forms (Euclidean; spans and hyperplanes of
    polyhedral norms) and the LP otherwise; "lp" forces the simplex route.
    """
    x = space.check(x)
    if subspace.ambient != space:
        raise DimensionMismatch("subspace does not live in the given space")
    b = subspace.basis
    n, k = b.shape

    if k == 0:
        return ProjectionCore(norm(space, x), np.zeros(0), np.zeros(n), 0)
    if k == n:
        coef = np.linalg.solve(b, x)
        return ProjectionCore(0.0, coef, x.copy(), 0)
    if space.norm is Norm.EUCLID:
        coef = np.linalg.lstsq(b, x, rcond=None)[0]
        rep = b @ coef
        return ProjectionCore(float(np.linalg.norm(x - rep)), coef, rep, 0)

    if method == "auto" and k == n - 1:
        f = null_space_vector(b.T, tol.eps_rank)
        phi = float(f @ x)
        if space.norm is Norm.SUP:
            dual = float(np.sum(np.abs(f)))
            dist = abs(phi) / dual
            r = (phi / dual) * np.sign(f)
            zeros = int(np.sum(np.abs(f) <= tol.eps_rank * np.max(np.abs(f))))
            face = 0 if dist <= FACE_EXTENT_TOL else zeros
        else:
            dual = float(np.max(np.abs(f)))
            dist = abs(phi) / dual
            ties = np.flatnonzero(np.abs(f) >= dual * (1.0 - 1e-12))
            j = int(ties[0])
            r = np.zeros(n)
            r[j] = phi / f[j]
            face = 0 if dist <= FACE_EXTENT_TOL else int(ties.size - 1)
        rep = x - r
        coef = np.linalg.lstsq(b, rep, rcond=None)[0]
        return ProjectionCore(dist, coef, b @ coef, face)

    if method == "auto" and k == 1:
        v = b[:, 0]
        if space.norm is Norm.SUP:
            dist, t_lo, t_hi = _span_projection_sup(x, v)
        else:
            dist, t_lo, t_hi = _span_projection_sum(x, v)
        extent = (t_hi - t_lo) * norm(space, v)
        face = 1 if extent > FACE_EXTENT_TOL * (1.0 + abs(t_lo)) else 0
        coef = np.array([t_lo])
        return ProjectionCore(dist, coef, t_lo * v, face)

    value, coef, dim = _project_lp(space, b, x, want_face)
    return ProjectionCore(float(value), coef, b @ coef, dim)


# ---------------------------------------------------------------------------
# Operator norms


def sup_sign_patterns(dim: int) -> np.ndarray:
    """Extreme points of the sup-norm unit ball with first coordinate +1
    (the other half is symmetric)."""
    if dim > _MAX_SUP_ENUM_DIM:
        raise UnsupportedNormPair(
            f"sup-norm enumeration limited to dim <= {_MAX_SUP_ENUM_DIM}"
        )
    if dim == 1:
        return np.array([[1.0]])
    tails = np.array(list(itertools.product((1.0, -1.0), repeat=dim - 1)))
    return np.hstack([np.ones((tails.shape[0], 1)), tails])


def unit_ball_extreme_points(space: Space) -> np.ndarray:
    if space.norm is Norm.SUP:
        half = sup_sign_patterns(space.dim)
        return np.vstack([half, -half])
    if space.norm is Norm.SUM:
        eye = np.eye(space.dim)
        return np.vstack([eye, -eye])
    raise UnsupportedNormPair("the Euclidean ball has no finite extreme set")


def _codomain_norm_fn(codomain, tol: Tolerance):
    if isinstance(codomain, Space):
        return lambda v: norm(codomain, v)
    amb, sub = codomain.ambient, codomain.subspace
    return lambda v: project_onto_subspace(amb, sub, v, tol, want_face=False).distance


def operator_norm(t: LinearMap, tol: Tolerance = DEFAULT_TOL) -> float:
    """Exact operator norm by extreme-point enumeration (polyhedral domains)
    or the largest singular value (Euclidean to Euclidean).

    A quotient domain is handled through the quotient map: the image of the
    ambient unit ball is the quotient unit ball, so enumeration over ambient
    extreme points is exact.
    """
    dom = t.domain
    mat = t.matrix
    if is_quotient(dom):
        jb = dom.subspace.basis
        if jb.shape[1]:
            scale = max(1.0, float(np.max(np.abs(mat), initial=0.0)))
            if float(np.max(np.abs(mat @ jb), initial=0.0)) > 1e-8 * scale:
                raise ValueError("map is not well defined on the quotient")
        dom_space = dom.ambient
    else:
        dom_space = dom
    conorm = _codomain_norm_fn(t.codomain, tol)

    if dom_space.norm is Norm.SUM:
        return max(conorm(mat[:, i]) for i in range(mat.shape[1]))
    if dom_space.norm is Norm.SUP:
        signs = sup_sign_patterns(dom_space.dim)
        return max(conorm(mat @ s) for s in signs)
    # Euclidean domain
    if isinstance(t.codomain, Space) and t.codomain.norm is Norm.EUCLID:
        return float(np.linalg.svd(mat, compute_uv=False)[0]) if mat.size else 0.0
    if is_quotient(t.codomain) and t.codomain.ambient.norm is Norm.EUCLID:
        jb = t.codomain.subspace.basis
        if jb.shape[1]:
            q, _ = np.linalg.qr(jb)
            reduced = mat - q @ (q.T @ mat)
        else:
            reduced = mat
        return float(np.linalg.svd(reduced, compute_uv=False)[0]) if mat.size else 0.0
    raise UnsupportedNormPair(
        "Euclidean domains support only Euclidean (or Euclidean-quotient) codomains"
    )


# ---------------------------------------------------------------------------
# Brute-force oracle


def brute_distance_oracle(
    space: Space,
    subspace: Subspace,
    x,
    grid_radius: float,
    grid_steps: int,
) -> float:
    """Upper bound on dist(x, J) by minimizing over a uniform coefficient
    grid; converges to the distance as the grid refines.  Independent of the
    LP machinery, which is the point."""
    x = space.check(x)
    k = subspace.k
    if k > 3:
        raise ValueError("grid oracle supports at most 3 basis vectors")
    if k == 0:
        return norm(space, x)
    axis = np.linspace(-grid_radius, grid_radius, grid_steps)
    b = subspace.basis
    best = np.inf
    chunk = 65536

    def residual_norms(coefs: np.ndarray) -> np.ndarray:
        r = x[None, :] - coefs @ b.T
        if space.norm is Norm.SUP:
            return np.max(np.abs(r), axis=1)
        if space.norm is Norm.SUM:
            return np.sum(np.abs(r), axis=1)
        return np.linalg.norm(r, axis=1)

    if k == 1:
        coefs = axis.reshape(-1, 1)
        for lo in range(0, coefs.shape[0], chunk):
            best = min(best, float(np.min(residual_norms(coefs[lo : lo + chunk]))))
        return best
    if k == 2:
        for a0 in axis:
            coefs = np.column_stack([np.full(axis.size, a0), axis])
            best = min(best, float(np.min(residual_norms(coefs))))
        return best
    for a0 in axis:
        for a1 in axis:
            coefs = np.column_stack(
                [np.full(axis.size, a0), np.full(axis.size, a1), axis]
            )
            best = min(best, float(np.min(residual_norms(coefs))))
    return best
