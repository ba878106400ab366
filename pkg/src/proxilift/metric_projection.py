"""Distances to subspaces, best-approximation sets, metric-complement
membership, Chebyshev testing, the proximinal decomposition x = j + j0, and
the closed-form complement classification in the sup-norm plane."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core_spaces import (
    DEFAULT_TOL,
    DimensionMismatch,
    Norm,
    Space,
    Subspace,
    Tolerance,
    approx_eq,
    norm,
    project_onto_subspace,
)


@dataclass(frozen=True)
class ProjectionResult:
    """One nearest point of x in J together with the geometry of the whole
    best-approximation set (a polytope for polyhedral norms)."""

    distance: float
    representative: np.ndarray
    is_singleton: bool
    face_dim: int


class ComplementKind(Enum):
    WHOLE_SPACE = "whole_space"
    ZERO = "zero"
    SPAN = "span"
    CONE_UNION = "cone_union"


@dataclass(frozen=True)
class ComplementDescription:
    kind: ComplementKind
    generators: tuple
    is_subspace: bool

    def __post_init__(self):
        gens = tuple(np.asarray(g, dtype=float) for g in self.generators)
        for g in gens:
            g.setflags(write=False)
        object.__setattr__(self, "generators", gens)
        if self.kind is ComplementKind.SPAN and not self.is_subspace:
            raise ValueError("a span is a subspace")
        if self.kind is ComplementKind.CONE_UNION and self.is_subspace:
            raise ValueError("a cone union here is never a subspace")


def distance(
    space: Space,
    subspace: Subspace,
    x,
    method: str = "auto",
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """dist(x, J): exact LP value for polyhedral norms (closed forms where
    available), orthogonal distance for the Euclidean norm."""
    core = project_onto_subspace(space, subspace, x, tol, want_face=False, method=method)
    return core.distance


def metric_projection(
    space: Space,
    subspace: Subspace,
    x,
    method: str = "auto",
    tol: Tolerance = DEFAULT_TOL,
) -> ProjectionResult:
    core = project_onto_subspace(space, subspace, x, tol, want_face=True, method=method)
    return ProjectionResult(
        distance=core.distance,
        representative=core.representative,
        is_singleton=core.face_dim == 0,
        face_dim=core.face_dim,
    )


def in_metric_complement(
    space: Space,
    subspace: Subspace,
    x,
    tol: Tolerance = DEFAULT_TOL,
) -> bool:
    """Whether ||x|| = dist(x, J), i.e. 0 is a best approximation of x."""
    x = space.check(x)
    return approx_eq(norm(space, x), distance(space, subspace, x, tol=tol), tol)


class ChebyshevKind(Enum):
    YES_CERTIFIED = "yes_certified"
    YES_SAMPLED = "yes_sampled"
    NO = "no"


@dataclass(frozen=True)
class ChebyshevVerdict:
    kind: ChebyshevKind
    witness: np.ndarray | None
    samples_checked: int


def _chebyshev_candidates(space: Space, rng: np.random.Generator, budget: int):
    n = space.dim
    eye = np.eye(n)
    for i in range(n):
        yield 2.0 * eye[i]
        yield -2.0 * eye[i]
    if n <= 6:
        grids = np.array(
            np.meshgrid(*([[-1.0, 0.0, 1.0]] * n), indexing="ij")
        ).reshape(n, -1).T
        for row in grids:
            if np.any(row != 0.0):
                yield row
    while True:
        v = rng.standard_normal(n)
        m = norm(space, v)
        if m > 1e-9:
            yield v / m


def is_chebyshev(
    space: Space,
    subspace: Subspace,
    samples: int = 4096,
    seed: int = 42,
    tol: Tolerance = DEFAULT_TOL,
) -> ChebyshevVerdict:
    """Uniqueness of best approximations.  Certified for the Euclidean norm;
    for polyhedral norms the verdict is NO with a witness whenever any
    candidate has a nontrivial optimal face, and otherwise YES over the
    sample budget only (the epistemic status is part of the verdict)."""
    if space.norm is Norm.EUCLID:
        return ChebyshevVerdict(ChebyshevKind.YES_CERTIFIED, None, 0)
    if subspace.k in (0, space.dim):
        return ChebyshevVerdict(ChebyshevKind.YES_CERTIFIED, None, 0)
    rng = np.random.default_rng(seed)
    checked = 0
    for x in _chebyshev_candidates(space, rng, samples):
        if checked >= samples:
            break
        checked += 1
        res = metric_projection(space, subspace, x, tol=tol)
        if res.face_dim >= 1:
            w = np.asarray(x, dtype=float)
            w.setflags(write=False)
            return ChebyshevVerdict(ChebyshevKind.NO, w, checked)
    return ChebyshevVerdict(ChebyshevKind.YES_SAMPLED, None, checked)


def cheney_wulbert_decompose(
    space: Space,
    subspace: Subspace,
    x,
    tol: Tolerance = DEFAULT_TOL,
):
    """Split x = j + j0 with j a best approximation and j0 in the metric
    complement.  Finite-dimensional subspaces are proximinal, so this always
    succeeds; the complement membership is asserted, not assumed."""
    x = space.check(x)
    res = metric_projection(space, subspace, x, tol=tol)
    j = res.representative
    j0 = x - j
    if not in_metric_complement(space, subspace, j0, tol=tol):
        raise RuntimeError("residual failed the metric-complement check")
    return j, j0


_LINF2 = Space(2, Norm.SUP)


def linf2_complement(u: float, v: float, tol: Tolerance = DEFAULT_TOL) -> ComplementDescription:
    """Metric complement of span{(u, v)} in the sup-norm plane.

    With both coordinates nonzero the complement is the line spanned by
    (1, -1) when v/u > 0 and by (1, 1) when v/u < 0; with one coordinate
    zero it is the double cone bounded by those two lines, which is not a
    subspace.  Each emitted generator is re-checked by membership.
    """
    scale = max(abs(u), abs(v))
    if scale <= 0.0:
        raise ValueError("zero generator")
    eps = tol.eps_eq * scale
    subspace = Subspace(_LINF2, [[float(u)], [float(v)]])
    if abs(u) > eps and abs(v) > eps:
        gen = (1.0, -1.0) if v / u > 0 else (1.0, 1.0)
        desc = ComplementDescription(ComplementKind.SPAN, (np.array(gen),), True)
    else:
        axis = (0.0, 1.0) if abs(v) <= eps else (1.0, 0.0)
        desc = ComplementDescription(
            ComplementKind.CONE_UNION,
            (np.array([1.0, 1.0]), np.array([1.0, -1.0]), np.array(axis)),
            False,
        )
    for g in desc.generators:
        if not in_metric_complement(_LINF2, subspace, g, tol=tol):
            raise RuntimeError(f"generator {g} failed the membership check")
    return desc


def complement_description(
    subspace: Subspace, tol: Tolerance = DEFAULT_TOL
) -> ComplementDescription:
    """Complement classification for any subspace of the sup-norm plane,
    including the degenerate ends: the complement of the zero subspace is
    the whole space, and of the whole space the zero subspace."""
    if subspace.ambient != _LINF2:
        raise DimensionMismatch("classification is specific to the sup-norm plane")
    if subspace.k == 0:
        return ComplementDescription(
            ComplementKind.WHOLE_SPACE,
            (np.array([1.0, 0.0]), np.array([0.0, 1.0])),
            True,
        )
    if subspace.k == 2:
        return ComplementDescription(ComplementKind.ZERO, (), True)
    u, v = subspace.basis[:, 0]
    return linf2_complement(float(u), float(v), tol)
