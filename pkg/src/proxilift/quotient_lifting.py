"""Quotient spaces and norm-preserving operator lifting.

The quotient X/J carries the norm ||x + J|| = dist(x, J).  A certified
linear selection p turns the coset map x + J -> x - p(x) into a linear
isometry back into X, which lifts any operator into the quotient without
increasing its norm; conversely a norm-one lift of the identity yields the
selection back.  Also: minimum-norm basis lifting through surjections from
sum-norm domains, restriction of lifts to complemented subspaces, and the
dual-projection lift for coordinate max-summands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_spaces import (
    DEFAULT_TOL,
    DimensionMismatch,
    LinearMap,
    Norm,
    RankDeficientBasis,
    Space,
    Subspace,
    Tolerance,
    complete_to_standard_basis,
    is_quotient,
    norm,
    operator_norm,
    pivoted_rank,
    project_onto_subspace,
    solve_lp,
    storage_dim,
    subspace_residual,
)
from .selection_engine import SelectionCertificate, verify_selection


@dataclass(frozen=True, eq=False)
class QuotientSpace:
    """The pair (X, J) with coset-representative machinery.

    `complement` holds standard basis vectors completing J to a basis of X,
    chosen by column pivoting, so canonical representatives are a fixed
    linear function of the coset (minimum-norm representatives are an
    operation, not the default, because they are not linear in general).
    """

    ambient: Space
    subspace: Subspace
    complement: np.ndarray

    def __post_init__(self):
        if self.subspace.ambient != self.ambient:
            raise DimensionMismatch("subspace does not live in the ambient space")
        c = np.asarray(self.complement, dtype=float)
        n = self.ambient.dim
        if c.shape != (n, n - self.subspace.k):
            raise DimensionMismatch("complement must have dim - k columns")
        if self.subspace.k + c.shape[1] > 0:
            full = np.hstack([self.subspace.basis, c])
            r, _ = pivoted_rank(full)
            if r < n:
                raise RankDeficientBasis("subspace plus complement does not span")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "complement", c)

    @classmethod
    def create(cls, ambient: Space, subspace: Subspace) -> "QuotientSpace":
        idx = (
            complete_to_standard_basis(subspace.basis)
            if subspace.k < ambient.dim
            else []
        )
        comp = np.eye(ambient.dim)[:, idx]
        return cls(ambient=ambient, subspace=subspace, complement=comp)

    @property
    def effective_dim(self) -> int:
        return self.ambient.dim - self.subspace.k

    def quotient_norm(self, x, tol: Tolerance = DEFAULT_TOL) -> float:
        return project_onto_subspace(
            self.ambient, self.subspace, x, tol, want_face=False
        ).distance

    def canonical_rep(self, x) -> np.ndarray:
        """The unique coset representative inside span(complement)."""
        x = self.ambient.check(x)
        if self.effective_dim == 0:
            return np.zeros(self.ambient.dim)
        if self.subspace.k == 0:
            return x.copy()
        full = np.hstack([self.subspace.basis, self.complement])
        coef = np.linalg.solve(full, x)
        return self.complement @ coef[self.subspace.k :]


@dataclass(frozen=True)
class LiftReport:
    T: LinearMap
    composition_ok: bool
    norm_S: float
    norm_T: float
    norm_preserved: bool
    composition_residual: float


def quotient_residual(m1: np.ndarray, m2: np.ndarray, q: QuotientSpace) -> float:
    """Max-abs entrywise difference of two quotient-valued matrices after
    reducing columns to canonical representatives."""
    if m1.shape != m2.shape:
        raise DimensionMismatch("matrices of different shapes")
    worst = 0.0
    for i in range(m1.shape[1]):
        d = q.canonical_rep(m1[:, i]) - q.canonical_rep(m2[:, i])
        worst = max(worst, float(np.max(np.abs(d), initial=0.0)))
    return worst


def quotient_map(q: QuotientSpace) -> LinearMap:
    """The canonical map x -> x + J; stored as the identity on coset
    representatives.  Its operator norm is 1 whenever J is proper."""
    n = q.ambient.dim
    return LinearMap(np.eye(n), q.ambient, q)


def _check_certificate_matches(q: QuotientSpace, cert: SelectionCertificate, tol: Tolerance):
    if not cert.certified:
        raise ValueError("selection certificate carries violations")
    mat = cert.p.matrix
    b = q.subspace.basis
    scale = 1.0 + float(np.max(np.abs(mat), initial=0.0))
    if subspace_residual(b, mat) > 1e-7 * scale:
        raise ValueError("certificate is not a selection onto this subspace")
    if b.shape[1] and float(np.max(np.abs(mat @ b - b))) > 1e-7 * (
        1.0 + float(np.max(np.abs(b)))
    ):
        raise ValueError("certificate does not fix this subspace")


def iso_from_selection(
    q: QuotientSpace,
    cert: SelectionCertificate,
    tol: Tolerance = DEFAULT_TOL,
    seed: int = 0,
) -> LinearMap:
    """The isometry X/J -> X sending x + J to x - p(x), stored as its
    composition with the quotient map.  Well-definedness on cosets is exact
    because p fixes J; it is re-checked on random coset shifts anyway, along
    with the isometry property on a few classes."""
    _check_certificate_matches(q, cert, tol)
    mat = np.eye(q.ambient.dim) - cert.p.matrix
    psi = LinearMap(mat, q, q.ambient)
    rng = np.random.default_rng(seed)
    b = q.subspace.basis
    for _ in range(4):
        x = rng.standard_normal(q.ambient.dim)
        if b.shape[1]:
            shift = b @ rng.standard_normal(b.shape[1])
            if float(np.max(np.abs(mat @ (x + shift) - mat @ x))) > 1e-7 * (
                1.0 + float(np.max(np.abs(x)))
            ):
                raise RuntimeError("coset representatives disagree")
        image_norm = norm(q.ambient, mat @ x)
        qn = q.quotient_norm(x, tol)
        if abs(image_norm - qn) > 1e-7 * (1.0 + qn):
            raise RuntimeError("isometry check failed")
    return psi


def lift_operator(
    s: LinearMap,
    cert: SelectionCertificate,
    tol: Tolerance = DEFAULT_TOL,
) -> LiftReport:
    """Norm-preserving lift T of S through the quotient map, built by
    composing S with the selection isometry."""
    q = s.codomain
    if not is_quotient(q):
        raise DimensionMismatch("operator must map into a quotient")
    psi = iso_from_selection(q, cert, tol)
    t_mat = psi.matrix @ s.matrix
    t = LinearMap(t_mat, s.domain, q.ambient)
    resid = quotient_residual(t_mat, s.matrix, q)
    n_s = operator_norm(s, tol)
    n_t = operator_norm(t, tol)
    return LiftReport(
        T=t,
        composition_ok=resid <= tol.eps_eq * (1.0 + float(np.max(np.abs(s.matrix), initial=0.0))),
        norm_S=n_s,
        norm_T=n_t,
        norm_preserved=abs(n_t - n_s) <= tol.eps_eq * max(1.0, n_s),
        composition_residual=resid,
    )


def lift_norm_lower_bound_check(
    s: LinearMap, t: LinearMap, tol: Tolerance = DEFAULT_TOL
) -> bool:
    """For any lift T of S (same composition with the quotient map), the
    lifted norm can only go up: ||S|| <= ||T||."""
    q = s.codomain
    if not is_quotient(q):
        raise DimensionMismatch("operator must map into a quotient")
    scale = 1.0 + float(np.max(np.abs(s.matrix), initial=0.0))
    if quotient_residual(t.matrix, s.matrix, q) > 1e-7 * scale:
        raise ValueError("T does not lift S (composition mismatch)")
    n_s = operator_norm(s, tol)
    n_t = operator_norm(t, tol)
    return n_s <= n_t + tol.eps_eq * max(1.0, n_s)


def selection_from_lift(
    q: QuotientSpace,
    id_lift: LinearMap,
    tol: Tolerance = DEFAULT_TOL,
) -> SelectionCertificate:
    """Extract the selection from a norm-one lift of the identity on X/J:
    composing with the quotient map gives a projection whose kernel is J and
    whose range sits in the metric complement, so I minus it is a linear
    selection.  Lifts of norm above one are rejected; the extraction argument
    needs the norm to stay at one."""
    n = q.ambient.dim
    mat = np.asarray(id_lift.matrix, dtype=float)
    if mat.shape != (n, n):
        raise DimensionMismatch("identity lift must be square on the ambient dim")
    b = q.subspace.basis
    scale = 1.0 + float(np.max(np.abs(mat)))
    if b.shape[1] and float(np.max(np.abs(mat @ b))) > 1e-7 * scale:
        raise ValueError("map is not well defined on the quotient")
    if subspace_residual(b, mat - np.eye(n)) > 1e-7 * scale:
        raise ValueError("composition with the quotient map is not the identity")
    nrm = operator_norm(id_lift, tol)
    if q.effective_dim > 0 and nrm > 1.0 + 1e-7:
        raise ValueError(f"identity lift has norm {nrm:.6f} > 1")
    if float(np.max(np.abs(mat @ mat - mat))) > 1e-7 * scale:
        raise ValueError("lift composed with the quotient map is not idempotent")
    p = np.eye(n) - mat
    return verify_selection(q.ambient, q.subspace, p, tol=tol, method="from_lift")


def lift_from_l1(
    s: LinearMap,
    psi_sur: LinearMap,
    tol: Tolerance = DEFAULT_TOL,
) -> LinearMap:
    """Lift S through an onto map by sending each sum-norm basis vector to a
    minimum-norm preimage of its image.  The composition is exact; when
    psi_sur is a quotient map the minimum-norm preimage realizes the
    quotient norm, so the lift preserves the norm as well."""
    dom = s.domain
    if not isinstance(dom, Space) or dom.norm is not Norm.SUM:
        raise DimensionMismatch("basis lifting needs a sum-norm domain")
    x_space = psi_sur.domain
    if not isinstance(x_space, Space):
        raise DimensionMismatch("the surjection must start from a space")
    w_co = psi_sur.codomain
    if w_co is not s.codomain and storage_dim(w_co) != storage_dim(s.codomain):
        raise DimensionMismatch("codomains of S and the surjection differ")
    psi = psi_sur.matrix
    if is_quotient(w_co):
        wb = w_co.subspace.basis
        eq_mat = np.hstack([psi, -wb]) if wb.shape[1] else psi
        extra = wb.shape[1]
        # surjectivity onto the quotient: psi(X) + J must fill the ambient
        r, _ = pivoted_rank(np.hstack([psi, wb]) if wb.shape[1] else psi)
        if r < w_co.ambient.dim:
            raise RankDeficientBasis("map is not onto the quotient")
    else:
        eq_mat = psi
        extra = 0
        r, _ = pivoted_rank(psi)
        if r < w_co.dim:
            raise RankDeficientBasis("map is not onto")

    n = x_space.dim
    cols = []
    for i in range(s.matrix.shape[1]):
        target = s.matrix[:, i]
        cols.append(_min_norm_preimage(x_space, eq_mat, extra, target))
    t_mat = np.column_stack(cols) if cols else np.zeros((n, 0))
    lifted = LinearMap(t_mat, dom, x_space)
    if is_quotient(w_co):
        resid = quotient_residual(psi @ t_mat, s.matrix, w_co)
    else:
        resid = float(np.max(np.abs(psi @ t_mat - s.matrix), initial=0.0))
    if resid > 1e-7 * (1.0 + float(np.max(np.abs(s.matrix), initial=0.0))):
        raise RuntimeError("preimage composition failed")
    return lifted


def _min_norm_preimage(x_space: Space, eq_mat: np.ndarray, extra: int, target: np.ndarray):
    """Minimize ||z|| subject to eq_mat @ (z, d) == target, returning z."""
    n = x_space.dim
    nz = n + extra
    if x_space.norm is Norm.EUCLID:
        part = np.linalg.lstsq(eq_mat, target, rcond=None)[0]
        _, sv, vt = np.linalg.svd(eq_mat)
        rank = int(np.sum(sv > 1e-12 * max(1.0, sv[0] if sv.size else 1.0)))
        null = vt[rank:].T
        if null.size:
            beta = np.linalg.lstsq(null[:n], -part[:n], rcond=None)[0]
            part = part + null @ beta
        return part[:n]
    if x_space.norm is Norm.SUP:
        nv = nz + 1
        a_ub = np.zeros((2 * n, nv))
        b_ub = np.zeros(2 * n)
        a_ub[:n, :n] = np.eye(n)
        a_ub[:n, -1] = -1.0
        a_ub[n:, :n] = -np.eye(n)
        a_ub[n:, -1] = -1.0
        obj = np.zeros(nv)
        obj[-1] = 1.0
    else:
        nv = nz + n
        a_ub = np.zeros((2 * n, nv))
        b_ub = np.zeros(2 * n)
        a_ub[:n, :n] = np.eye(n)
        a_ub[:n, nz:] = -np.eye(n)
        a_ub[n:, :n] = -np.eye(n)
        a_ub[n:, nz:] = -np.eye(n)
        obj = np.zeros(nv)
        obj[nz:] = 1.0
    a_eq = np.zeros((eq_mat.shape[0], nv))
    a_eq[:, :nz] = eq_mat
    res = solve_lp(obj, a_ub, b_ub, a_eq, target)
    return res.x[:n]


def restrict_lift(
    p: LinearMap,
    lift_of_sp: LinearMap,
    s: LinearMap,
    tol: Tolerance = DEFAULT_TOL,
) -> LinearMap:
    """Given a projection P of W onto a complemented subspace and a lift of
    S o P, restricting the lift gives a lift of S on that subspace.  The
    returned map is the lift composed with P, which agrees with the
    restriction on range(P)."""
    w_space = p.domain
    mat_p = p.matrix
    scale = 1.0 + float(np.max(np.abs(mat_p), initial=0.0))
    if float(np.max(np.abs(mat_p @ mat_p - mat_p))) > 1e-7 * scale:
        raise ValueError("P is not a projection")
    q = s.codomain
    if not is_quotient(q):
        raise DimensionMismatch("S must map into a quotient")
    sp_mat = s.matrix @ mat_p
    if quotient_residual(lift_of_sp.matrix, sp_mat, q) > 1e-7 * (
        1.0 + float(np.max(np.abs(sp_mat), initial=0.0))
    ):
        raise ValueError("given map does not lift S o P")
    restricted = LinearMap(lift_of_sp.matrix @ mat_p, w_space, q.ambient)
    # composition agrees with S on range(P)
    r, piv = pivoted_rank(mat_p)
    rng_basis = mat_p[:, piv] if r else np.zeros((mat_p.shape[0], 0))
    if r:
        resid = quotient_residual(restricted.matrix @ rng_basis, s.matrix @ rng_basis, q)
        if resid > 1e-7 * (1.0 + float(np.max(np.abs(s.matrix), initial=0.0))):
            raise RuntimeError("restriction does not lift S on the subspace")
    return restricted


def _coordinate_summand_rows(subspace: Subspace, tol: Tolerance):
    b = subspace.basis
    n, k = b.shape
    scale = max(1.0, float(np.max(np.abs(b), initial=0.0)))
    rows = [i for i in range(n) if float(np.max(np.abs(b[i]), initial=0.0)) > tol.eps_rank * scale]
    if len(rows) != k:
        return None
    r, _ = pivoted_rank(b[rows, :], tol.eps_rank)
    return rows if r == k else None


def duality_lift(s: LinearMap, tol: Tolerance = DEFAULT_TOL) -> LiftReport:
    """Lift through duality for a coordinate max-summand J in a sup-norm
    space: the adjoint of S lands in the annihilator of J, composing with
    the sum-norm projection of the dual onto that annihilator and taking
    adjoints again zeroes the J-coordinates of the representatives.  Agrees
    with the selection-based lift for the coordinate projection."""
    q = s.codomain
    if not is_quotient(q):
        raise DimensionMismatch("operator must map into a quotient")
    if q.ambient.norm is not Norm.SUP:
        raise ValueError("duality lift needs a sup-norm ambient space")
    rows = _coordinate_summand_rows(q.subspace, tol)
    if rows is None:
        raise ValueError("subspace is not a coordinate max-summand")
    t_mat = np.array(s.matrix, dtype=float)
    t_mat[rows, :] = 0.0
    t = LinearMap(t_mat, s.domain, q.ambient)
    resid = quotient_residual(t_mat, s.matrix, q)
    n_s = operator_norm(s, tol)
    n_t = operator_norm(t, tol)
    return LiftReport(
        T=t,
        composition_ok=resid <= tol.eps_eq * (1.0 + float(np.max(np.abs(s.matrix), initial=0.0))),
        norm_S=n_s,
        norm_T=n_t,
        norm_preserved=abs(n_t - n_s) <= tol.eps_eq * max(1.0, n_s),
        composition_residual=resid,
    )
