"""Linear selections of the metric projection: verification against the
best-approximation property, closed-form constructions (orthogonal,
coordinate, hyperplane, sup-norm plane), a randomized complement search, and
nonlinearity witnesses that certify non-existence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core_spaces import (
    DEFAULT_TOL,
    LinearMap,
    Norm,
    Space,
    Subspace,
    Tolerance,
    norm,
    pivoted_rank,
    null_space_vector,
    project_onto_subspace,
    solve_lp,
    subspace_residual,
    LpInfeasible,
)
from .metric_projection import (
    ComplementKind,
    in_metric_complement,
    linf2_complement,
    metric_projection,
)

# Threshold for "the minimum over a cell dropped below the norm": cell LPs
# resolve to machine accuracy, true violations are macroscopic.
_CELL_TOL = 1e-7
_MAX_FULL_VERIFIES = 64
_MAX_COMBOS = 2048
_COND_CAP = 1e8


class SelectionStatus(Enum):
    CERTIFIED_EXACT = "certified_exact"
    CERTIFIED_SAMPLED = "certified_sampled"


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    witness: np.ndarray | None = None


@dataclass(frozen=True)
class SelectionCertificate:
    """Outcome of checking a candidate selection p.

    `status` records the strength of the best-approximation check that ran
    (exact cell enumeration versus sampling); the certificate is only valid
    when `violations` is empty.
    """

    p: LinearMap
    status: SelectionStatus
    violations: tuple
    method: str

    @property
    def certified(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class NonlinearityWitness:
    """A pair f, g whose best approximations are unique but do not add up:
    pf + pg is not a best approximation of f + g.  Any selection is pinned
    at f and g, so a linear one cannot exist."""

    f: np.ndarray
    g: np.ndarray
    pf: np.ndarray
    pg: np.ndarray
    pfg: np.ndarray

    def __post_init__(self):
        for name in ("f", "g", "pf", "pg", "pfg"):
            v = np.asarray(getattr(self, name), dtype=float).copy()
            v.setflags(write=False)
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class SelectionNotFound:
    witness: NonlinearityWitness | None

    @property
    def inconclusive(self) -> bool:
        return self.witness is None


def _as_matrix(p, n: int) -> np.ndarray:
    m = p.matrix if isinstance(p, LinearMap) else np.asarray(p, dtype=float)
    if m.shape != (n, n):
        raise ValueError(f"selection matrix must be {n}x{n}, got {m.shape}")
    return np.array(m, dtype=float)


def _cells(space: Space):
    """Cones on which the norm is linear, as (rows, functional) pairs:
    within each cell ``rows @ w <= 0`` and ``functional @ w`` equals ||w||.
    Only half of the sign patterns are needed by symmetry."""
    n = space.dim
    tails = itertools.product((1.0, -1.0), repeat=n - 1)
    for tail in tails:
        s = np.array((1.0,) + tail)
        if space.norm is Norm.SUM:
            yield -np.diag(s), s
        else:
            for j in range(n):
                rows = [-s[i] * _unit(n, i) for i in range(n)]
                rows += [
                    s[i] * _unit(n, i) - s[j] * _unit(n, j)
                    for i in range(n)
                    if i != j
                ]
                yield np.array(rows), s[j] * _unit(n, j)


def _unit(n: int, i: int) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e


def _exact_cell_check(space: Space, subspace: Subspace, w: np.ndarray):
    """Exact check that span(w columns) lies in the metric complement.

    Per norm-linearity cell, minimize dist(v, J) over {v in span(W) in the
    cell, ||v|| = 1} by LP; the span is inside the complement iff every such
    minimum is 1.  Returns (ok, witness_vector_or_None).
    """
    n = space.dim
    b = subspace.basis
    k = b.shape[1]
    m = w.shape[1]
    for rows, functional in _cells(space):
        cell_rows = rows @ w  # constraints on alpha
        lw = functional @ w
        if space.norm is Norm.SUP:
            nv = m + k + 1
            a_ub = np.zeros((cell_rows.shape[0] + 2 * n, nv))
            b_ub = np.zeros(a_ub.shape[0])
            a_ub[: cell_rows.shape[0], :m] = cell_rows
            a_ub[cell_rows.shape[0] : cell_rows.shape[0] + n, :m] = w
            a_ub[cell_rows.shape[0] : cell_rows.shape[0] + n, m : m + k] = -b
            a_ub[cell_rows.shape[0] : cell_rows.shape[0] + n, -1] = -1.0
            a_ub[cell_rows.shape[0] + n :, :m] = -w
            a_ub[cell_rows.shape[0] + n :, m : m + k] = b
            a_ub[cell_rows.shape[0] + n :, -1] = -1.0
            a_eq = np.zeros((1, nv))
            a_eq[0, :m] = lw
            obj = np.zeros(nv)
            obj[-1] = 1.0
        else:
            nv = m + k + n
            a_ub = np.zeros((cell_rows.shape[0] + 2 * n, nv))
            b_ub = np.zeros(a_ub.shape[0])
            a_ub[: cell_rows.shape[0], :m] = cell_rows
            a_ub[cell_rows.shape[0] : cell_rows.shape[0] + n, :m] = w
            a_ub[cell_rows.shape[0] : cell_rows.shape[0] + n, m : m + k] = -b
            a_ub[cell_rows.shape[0] : cell_rows.shape[0] + n, m + k :] = -np.eye(n)
            a_ub[cell_rows.shape[0] + n :, :m] = -w
            a_ub[cell_rows.shape[0] + n :, m : m + k] = b
            a_ub[cell_rows.shape[0] + n :, m + k :] = -np.eye(n)
            a_eq = np.zeros((1, nv))
            a_eq[0, :m] = lw
            obj = np.zeros(nv)
            obj[m + k :] = 1.0
        try:
            res = solve_lp(obj, a_ub, b_ub, a_eq, np.array([1.0]))
        except LpInfeasible:
            continue
        if res.value < 1.0 - _CELL_TOL:
            witness = w @ res.x[:m]
            return False, witness
    return True, None


def verify_selection(
    space: Space,
    subspace: Subspace,
    p,
    tol: Tolerance = DEFAULT_TOL,
    seed: int = 0,
    method: str = "verified_input",
) -> SelectionCertificate:
    """Check that p maps into J, fixes J, and always lands on a nearest
    point.  The last property is equivalent to range(I - p) lying in the
    metric complement: checked exactly for rank one (homogeneity), by cell
    enumeration for polyhedral norms in dimension <= 3, by orthogonality for
    the Euclidean norm, and on a sampled unit sphere otherwise.  Problems
    are reported as violations, not exceptions."""
    n = space.dim
    mat = _as_matrix(p, n)
    b = subspace.basis
    violations: list[Violation] = []
    scale = 1.0 + float(np.max(np.abs(mat), initial=0.0))

    if subspace_residual(b, mat) > tol.eps_eq * scale:
        violations.append(Violation("range", "range(p) is not inside J"))
    if b.shape[1]:
        dev = float(np.max(np.abs(mat @ b - b)))
        if dev > tol.eps_eq * (1.0 + float(np.max(np.abs(b)))):
            violations.append(Violation("identity", f"p is not identity on J ({dev:.2e})"))

    resid = np.eye(n) - mat
    rank, piv = pivoted_rank(resid, tol.eps_rank)
    exact = True
    if rank > 0:
        w = resid[:, piv]
        w = w / np.max(np.abs(w), axis=0)
        if space.norm is Norm.EUCLID:
            if b.shape[1] and float(np.max(np.abs(b.T @ w))) > tol.eps_eq * scale:
                violations.append(
                    Violation("best_approx", "residual range is not orthogonal to J")
                )
        elif rank == 1:
            vec = w[:, 0]
            if not in_metric_complement(space, subspace, vec, tol=tol):
                violations.append(
                    Violation("best_approx", "residual direction leaves the complement", vec)
                )
        elif n <= 3:
            ok, witness = _exact_cell_check(space, subspace, w)
            if not ok:
                violations.append(
                    Violation("best_approx", "cell minimum below the norm", witness)
                )
        else:
            exact = False
            rng = np.random.default_rng(seed)
            bad = 0
            for _ in range(tol.sphere_samples):
                x = rng.standard_normal(n)
                nx = norm(space, x)
                if nx <= 1e-12:
                    continue
                x /= nx
                d = project_onto_subspace(space, subspace, x, tol, want_face=False).distance
                if abs(norm(space, x - mat @ x) - d) > tol.eps_eq * (1.0 + d) * 10:
                    bad += 1
                    if bad <= 3:
                        violations.append(
                            Violation("best_approx", "sampled point misses the distance", x)
                        )
    status = SelectionStatus.CERTIFIED_EXACT if exact else SelectionStatus.CERTIFIED_SAMPLED
    return SelectionCertificate(
        p=LinearMap(mat, space, space),
        status=status,
        violations=tuple(violations),
        method=method,
    )


# ---------------------------------------------------------------------------
# Closed-form constructions


def _kernel_basis(f: np.ndarray, eps: float) -> np.ndarray:
    n = f.size
    j = int(np.argmax(np.abs(f)))
    cols = []
    for i in range(n):
        if i == j:
            continue
        v = _unit(n, i)
        v[j] = -f[i] / f[j]
        cols.append(v)
    return np.column_stack(cols) if cols else np.zeros((n, 0))


def _hyperplane_matrix(space: Space, kernel: Subspace, f: np.ndarray, tol: Tolerance):
    """Projection onto ker f along the line of one best-approximation
    residual.  Homogeneity of the metric complement makes the whole line
    usable, so this works for every proximinal hyperplane."""
    n = space.dim
    j = int(np.argmax(np.abs(f)))
    x_hat = _unit(n, j)
    res = project_onto_subspace(space, kernel, x_hat, tol, want_face=False)
    x0 = x_hat - res.representative
    denom = float(f @ x0)
    if abs(denom) <= tol.eps_eq:
        raise RuntimeError("degenerate hyperplane residual")
    return np.eye(n) - np.outer(x0, f) / denom


def hyperplane_selection(
    space: Space, f, tol: Tolerance = DEFAULT_TOL
) -> SelectionCertificate:
    """Linear selection onto the kernel of a nonzero functional f."""
    f = space.check(f)
    if float(np.max(np.abs(f))) <= tol.eps_eq:
        raise ValueError("zero functional")
    kernel = Subspace(space, _kernel_basis(f, tol.eps_rank))
    mat = _hyperplane_matrix(space, kernel, f, tol)
    return verify_selection(space, kernel, mat, tol=tol, method="hyperplane")


def linf2_selection(u: float, v: float, tol: Tolerance = DEFAULT_TOL) -> SelectionCertificate:
    """Closed-form selection for span{(u, v)} in the sup-norm plane,
    assembled from the complement classification: projection along the
    complement line when it is one, coordinate projection otherwise."""
    space = Space(2, Norm.SUP)
    subspace = Subspace(space, [[float(u)], [float(v)]])
    desc = linf2_complement(u, v, tol)
    if desc.kind is ComplementKind.SPAN:
        g = desc.generators[0]
        m = np.column_stack([subspace.basis[:, 0], g])
        mat = subspace.basis @ np.linalg.inv(m)[:1, :]
    else:
        axis = 0 if abs(u) > abs(v) else 1
        mat = np.zeros((2, 2))
        mat[axis, axis] = 1.0
    return verify_selection(space, subspace, mat, tol=tol, method="linf2_closed_form")


def _coordinate_span_indices(basis: np.ndarray, eps: float):
    n, k = basis.shape
    scale = max(1.0, float(np.max(np.abs(basis), initial=0.0)))
    rows = [i for i in range(n) if float(np.max(np.abs(basis[i]), initial=0.0)) > eps * scale]
    if len(rows) != k:
        return None
    r, _ = pivoted_rank(basis[rows, :], eps)
    return rows if r == k else None


# ---------------------------------------------------------------------------
# Randomized complement search


def _direction_key(v: np.ndarray) -> bytes:
    w = v / np.max(np.abs(v))
    nz = np.flatnonzero(np.abs(w) > 1e-9)
    if nz.size and w[nz[0]] < 0:
        w = -w
    return np.round(w, 6).tobytes()


def _span_key(w: np.ndarray) -> bytes:
    q, _ = np.linalg.qr(w)
    cols = []
    for i in range(q.shape[1]):
        c = q[:, i]
        nz = np.flatnonzero(np.abs(c) > 1e-9)
        if nz.size and c[nz[0]] < 0:
            c = -c
        cols.append(np.round(c, 6))
    return np.column_stack(cols).tobytes()


def _precheck_span(space, subspace, w, tol) -> bool:
    m = w.shape[1]
    if m == 1:
        combos = [w[:, 0]]
    elif m == 2:
        # cheap sum/difference probes first, then an angle sweep
        angles = np.pi * np.arange(1, 8) / 8.0
        combos = [w[:, 0] + w[:, 1], w[:, 0] - w[:, 1], w[:, 0]]
        combos += [np.cos(a) * w[:, 0] + np.sin(a) * w[:, 1] for a in angles]
    else:
        combos = [
            w @ np.array(c, dtype=float)
            for c in itertools.product((-1.0, 0.0, 1.0), repeat=m)
            if any(c)
        ][: 2 * 13]
    for v in combos:
        if norm(space, v) <= 1e-9:
            continue
        if not in_metric_complement(space, subspace, v, tol=tol):
            return False
    return True


def _candidate_points(space: Space, rng: np.random.Generator):
    n = space.dim
    for i in range(n):
        yield _unit(n, i)
    if n <= 4:
        for tail in itertools.product((1.0, -1.0), repeat=n - 1):
            yield np.array((1.0,) + tail)
    if n <= 3:
        for c in itertools.product((0.0, 1.0, -1.0), repeat=n):
            v = np.array(c)
            if np.any(v != 0.0):
                yield v
    while True:
        yield rng.standard_normal(n)


def _residual_candidates(space, subspace, x, tol):
    """Best-approximation residuals of x, including the endpoints and the
    midpoint of the optimal face for one-dimensional subspaces (all of them
    live in the metric complement)."""
    from .core_spaces import _span_projection_sum, _span_projection_sup

    b = subspace.basis
    if b.shape[1] == 1:
        v = b[:, 0]
        if space.norm is Norm.SUP:
            _, t_lo, t_hi = _span_projection_sup(x, v)
        else:
            _, t_lo, t_hi = _span_projection_sum(x, v)
        ts = {t_lo, t_hi, 0.5 * (t_lo + t_hi)}
        return [x - t * v for t in ts]
    res = project_onto_subspace(space, subspace, x, tol, want_face=False)
    return [x - res.representative]


def _assemble_projection(basis: np.ndarray, w: np.ndarray):
    m = np.column_stack([basis, w])
    if np.linalg.cond(m) > _COND_CAP:
        return None
    k = basis.shape[1]
    return basis @ np.linalg.inv(m)[:k, :]


def _deutsch_search_raw(space, subspace, rng, budget, tol):
    n, k = space.dim, subspace.k
    m = n - k
    pool: list[np.ndarray] = []
    seen: set[bytes] = set()
    tried: set[tuple] = set()
    combos_used = 0
    verifies = 0

    # window size so the combination count stays bounded
    window = {1: 1024, 2: 46, 3: 20}.get(m, 12)

    spans_seen: set[bytes] = set()

    def try_assemblies():
        nonlocal combos_used, verifies
        limit = min(len(pool), window)
        for combo in itertools.combinations(range(limit), m):
            if combos_used >= _MAX_COMBOS or verifies >= _MAX_FULL_VERIFIES:
                return None
            if combo in tried:
                continue
            tried.add(combo)
            combos_used += 1
            w = np.column_stack([pool[i] for i in combo])
            aug = np.column_stack([subspace.basis, w])
            if abs(np.linalg.det(aug)) <= 1e-9:
                continue
            if not _precheck_span(space, subspace, w, tol):
                continue
            key = _span_key(w)
            if key in spans_seen:
                continue
            spans_seen.add(key)
            mat = _assemble_projection(subspace.basis, w)
            if mat is None:
                continue
            verifies += 1
            cert = verify_selection(
                space, subspace, mat, tol=tol, method="deutsch_search"
            )
            if cert.certified:
                return cert
        return None

    stream = _candidate_points(space, rng)
    stages = sorted({min(budget, 32), min(budget, 128), budget})
    produced = 0
    for target in stages:
        while produced < target:
            x = next(stream)
            produced += 1
            for r in _residual_candidates(space, subspace, x, tol):
                nr = norm(space, r)
                if nr <= 1e-9:
                    continue
                r = r / nr
                key = _direction_key(r)
                if key in seen:
                    continue
                seen.add(key)
                pool.append(r)
        found = try_assemblies()
        if found is not None:
            return found
        if combos_used >= _MAX_COMBOS or verifies >= _MAX_FULL_VERIFIES:
            break
    return None


def signed_permutation_matrix(perm, signs) -> np.ndarray:
    """Isometry x -> (signs[perm[i]] * x[perm[i]])_i of the sup and sum
    norms; orthogonal, so the inverse is the transpose."""
    n = len(perm)
    u = np.zeros((n, n))
    for i, j in enumerate(perm):
        u[i, j] = signs[j]
    return u


def _deutsch_search(space, subspace, rng, budget, tol):
    if subspace.k == 1:
        v = subspace.basis[:, 0]
        signs = np.where(v < 0, -1.0, 1.0)
        order = np.argsort(-np.abs(v), kind="stable")
        u = signed_permutation_matrix(list(order), signs)
        canon = Subspace(space, (u @ v).reshape(-1, 1))
        cert = _deutsch_search_raw(space, canon, rng, budget, tol)
        if cert is None:
            return None
        mat = u.T @ cert.p.matrix @ u
        return verify_selection(space, subspace, mat, tol=tol, method="deutsch_search")
    return _deutsch_search_raw(space, subspace, rng, budget, tol)


# ---------------------------------------------------------------------------
# Nonlinearity witnesses


def make_witness(
    space: Space, subspace: Subspace, f, g, tol: Tolerance = DEFAULT_TOL
) -> NonlinearityWitness | None:
    """Validate the pair (f, g) as a nonlinearity witness; None if it is not
    one.  Requires unique best approximations at f and g so that every
    selection is pinned there."""
    f = space.check(f)
    g = space.check(g)
    rf = metric_projection(space, subspace, f, tol=tol)
    if rf.face_dim != 0:
        return None
    rg = metric_projection(space, subspace, g, tol=tol)
    if rg.face_dim != 0:
        return None
    rfg = metric_projection(space, subspace, f + g, tol=tol)
    gap = norm(space, (f + g) - (rf.representative + rg.representative)) - rfg.distance
    if gap <= _CELL_TOL * (1.0 + rfg.distance):
        return None
    return NonlinearityWitness(
        f=f, g=g, pf=rf.representative, pg=rg.representative, pfg=rfg.representative
    )


def validate_witness(
    space: Space, subspace: Subspace, w: NonlinearityWitness, tol: Tolerance = DEFAULT_TOL
) -> bool:
    """Re-validate a witness using only distance computations (no reliance on
    how it was found)."""
    for point, rep in ((w.f, w.pf), (w.g, w.pg), (w.f + w.g, w.pfg)):
        res = metric_projection(space, subspace, point, tol=tol)
        if not subspace.contains(rep, tol):
            return False
        if abs(norm(space, point - rep) - res.distance) > tol.eps_eq * (1.0 + res.distance):
            return False
    for point in (w.f, w.g):
        if metric_projection(space, subspace, point, tol=tol).face_dim != 0:
            return False
    d = project_onto_subspace(space, subspace, w.f + w.g, tol, want_face=False).distance
    gap = norm(space, (w.f + w.g) - (w.pf + w.pg)) - d
    return gap > _CELL_TOL * (1.0 + d)


def _witness_search(space, subspace, rng, budget, tol):
    n, k = space.dim, subspace.k
    if k == 1:
        v = subspace.basis[:, 0]
        scale = float(np.max(np.abs(v)))
        supp = [i for i in range(n) if abs(v[i]) > tol.eps_rank * scale]
        signs = np.where(v < 0, -1.0, 1.0)
        if len(supp) >= 3:
            for a, b, c in itertools.islice(itertools.combinations(supp, 3), 4):
                f = signs[a] * _unit(n, a) - signs[b] * _unit(n, b)
                g = -signs[b] * _unit(n, b) + signs[c] * _unit(n, c)
                w = make_witness(space, subspace, f, g, tol)
                if w is not None:
                    return w
    for _ in range(budget):
        f = rng.standard_normal(n)
        g = rng.standard_normal(n)
        w = make_witness(space, subspace, f, g, tol)
        if w is not None:
            return w
    return None


# ---------------------------------------------------------------------------
# The search driver


def find_linear_selection(
    space: Space,
    subspace: Subspace,
    seed: int = 42,
    deutsch_budget: int = 512,
    witness_budget: int = 256,
    tol: Tolerance = DEFAULT_TOL,
):
    """Find a linear selection for the metric projection onto J, or produce
    a nonlinearity witness showing none exists.

    Deterministic order: degenerate cases, the orthogonal projection, the
    coordinate projection when J is spanned by standard basis vectors, the
    hyperplane rule in codimension one, the sup-norm-plane closed form, then
    a seeded search for a complementary subspace inside the metric
    complement, and finally a witness attempt.  Returns a
    SelectionCertificate or a SelectionNotFound whose missing witness marks
    the outcome as inconclusive."""
    n, k = space.dim, subspace.k
    b = subspace.basis
    if k == 0:
        return verify_selection(space, subspace, np.zeros((n, n)), tol=tol, method="zero_subspace")
    if k == n:
        return verify_selection(space, subspace, np.eye(n), tol=tol, method="whole_space")
    if space.norm is Norm.EUCLID:
        mat = b @ np.linalg.pinv(b)
        return verify_selection(space, subspace, mat, tol=tol, method="orthogonal")
    coords = _coordinate_span_indices(b, tol.eps_rank)
    if coords is not None:
        mat = np.zeros((n, n))
        for i in coords:
            mat[i, i] = 1.0
        return verify_selection(space, subspace, mat, tol=tol, method="coordinate_projection")
    if k == n - 1:
        f = null_space_vector(b.T, tol.eps_rank)
        mat = _hyperplane_matrix(space, subspace, f, tol)
        return verify_selection(space, subspace, mat, tol=tol, method="hyperplane")
    if space.dim == 2 and space.norm is Norm.SUP and k == 1:
        cert = linf2_selection(float(b[0, 0]), float(b[1, 0]), tol)
        if cert.certified:
            return verify_selection(
                space, subspace, cert.p.matrix, tol=tol, method="linf2_closed_form"
            )
    rng = np.random.default_rng(seed)
    cert = _deutsch_search(space, subspace, rng, deutsch_budget, tol)
    if cert is not None and cert.certified:
        return cert
    witness = _witness_search(space, subspace, rng, witness_budget, tol)
    if witness is not None and not validate_witness(space, subspace, witness, tol):
        witness = None
    return SelectionNotFound(witness=witness)


def span_support_qlp_test(
    norm_kind: Norm,
    f,
    seed: int = 42,
    tol: Tolerance = DEFAULT_TOL,
) -> bool:
    """Whether the metric projection onto span{f} admits a linear selection
    (equivalently, whether lifting through the quotient by span{f} preserves
    norms)."""
    f = np.asarray(f, dtype=float)
    if f.size > 4:
        raise ValueError("supported up to dimension 4")
    if float(np.max(np.abs(f))) <= 0.0:
        raise ValueError("zero vector spans nothing")
    if norm_kind not in (Norm.SUP, Norm.SUM):
        raise ValueError("support test applies to the polyhedral norms")
    space = Space(f.size, norm_kind)
    subspace = Subspace(space, f.reshape(-1, 1))
    result = find_linear_selection(space, subspace, seed=seed, tol=tol)
    return isinstance(result, SelectionCertificate) and result.certified
