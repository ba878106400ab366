"""Command-line entry points, run configuration, JSON analysis reports, and
CSV plot-data emission.

Subcommands: analyze (selection/complement/lifting status of a subspace),
lift (norm-preserving lift of an operator given in a JSON file), select-c01
and select-c01-2d (vanishing-ideal selections with CSV output), propcheck
(seeded property suites).  Reports are byte-identical across runs with the
same configuration and seed; timings are emitted only on request so they
cannot break that.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, replace

import numpy as np

from .core_spaces import (
    DEFAULT_TOL,
    LinearMap,
    Norm,
    RankDeficientBasis,
    Space,
    Subspace,
    Tolerance,
    norm,
    operator_norm,
    project_onto_subspace,
)
from .function_space import (
    ClosedSet1D,
    GridFunction,
    GridFunction2D,
    aligned_grid_for,
    annulus_predicate,
    d_mask,
    read_grid_csv,
    rect_predicate,
    star_selection_1d,
    star_selection_2d,
    vanishing_ideal_distance,
    write_grid2d_csv,
    write_grid_csv,
)
from .metric_projection import (
    ChebyshevKind,
    cheney_wulbert_decompose,
    complement_description,
    in_metric_complement,
    is_chebyshev,
    metric_projection,
)
from .quotient_lifting import (
    QuotientSpace,
    duality_lift,
    iso_from_selection,
    lift_operator,
    selection_from_lift,
)
from .selection_engine import (
    NonlinearityWitness,
    SelectionCertificate,
    SelectionNotFound,
    find_linear_selection,
    validate_witness,
)

SCHEMA_VERSION = 1
ENV_SEED = "PROXILIFT_SEED"


# ---------------------------------------------------------------------------
# Deterministic JSON with 17-significant-digit floats


def _fmt_float(x: float) -> str:
    if x != x:
        raise ValueError("NaN is not serializable")
    return format(float(x), ".17g")


def dumps(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if obj is True or obj is False:
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [dumps(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(inner + it for it in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")


# ---------------------------------------------------------------------------
# Run configuration


@dataclass(frozen=True)
class RunConfig:
    eps_eq: float = 1e-9
    eps_rank: float = 1e-10
    sphere_samples: int = 4096
    seed: int = 42
    chebyshev_samples: int = 4096
    deutsch_budget: int = 512
    witness_budget: int = 256
    grid_n: int = 1025
    grid2d_n: int = 65

    @property
    def tolerance(self) -> Tolerance:
        return Tolerance(
            eps_eq=self.eps_eq,
            eps_rank=self.eps_rank,
            sphere_samples=self.sphere_samples,
        )

    def to_dict(self) -> dict:
        return {
            "eps_eq": self.eps_eq,
            "eps_rank": self.eps_rank,
            "sphere_samples": self.sphere_samples,
            "chebyshev_samples": self.chebyshev_samples,
            "deutsch_budget": self.deutsch_budget,
            "witness_budget": self.witness_budget,
        }


_INT_KEYS = {
    "sphere_samples",
    "seed",
    "chebyshev_samples",
    "deutsch_budget",
    "witness_budget",
    "grid_n",
    "grid2d_n",
}


def load_config_file(path: str) -> dict:
    """Flat key=value text; '#' starts a comment."""
    values: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in RunConfig.__dataclass_fields__:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = int(val) if key in _INT_KEYS else float(val)
    return values


def build_config(args) -> RunConfig:
    """Flag > config file > environment > defaults, per key."""
    file_vals = load_config_file(args.config) if getattr(args, "config", None) else {}
    cfg = replace(RunConfig(), **file_vals)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    elif "seed" not in file_vals and ENV_SEED in os.environ:
        cfg = replace(cfg, seed=int(os.environ[ENV_SEED]))
    if getattr(args, "tol", None) is not None:
        cfg = replace(cfg, eps_eq=args.tol)
    if getattr(args, "grid", None) is not None:
        cfg = replace(cfg, grid_n=args.grid, grid2d_n=args.grid)
    return cfg


# ---------------------------------------------------------------------------
# Spec parsing


_NORM_TOKENS = {"linf": Norm.SUP, "l1": Norm.SUM, "l2": Norm.EUCLID}


def parse_space(spec: str) -> Space:
    try:
        token, dim_s = spec.split(":")
        return Space(int(dim_s), _NORM_TOKENS[token])
    except (ValueError, KeyError):
        raise ValueError(
            f"bad space spec {spec!r}; expected linf:N, l1:N, or l2:N"
        ) from None


def parse_subspace(spec: str, space: Space) -> Subspace:
    vectors = []
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        coords = [float(c) for c in part.split(",")]
        vectors.append(np.asarray(coords))
    if not vectors:
        raise ValueError("empty subspace spec")
    return Subspace(space, vectors)


def space_token(space: Space) -> str:
    inv = {v: k for k, v in _NORM_TOKENS.items()}
    return f"{inv[space.norm]}:{space.dim}"


# ---------------------------------------------------------------------------
# Analysis reports


@dataclass(frozen=True)
class AnalysisReport:
    payload: dict

    @property
    def qlp(self) -> str:
        return self.payload["qlp"]

    def to_json(self) -> str:
        return dumps(self.payload) + "\n"


def _witness_dict(w: NonlinearityWitness) -> dict:
    return {
        "f": w.f,
        "g": w.g,
        "pf": w.pf,
        "pg": w.pg,
        "pfg": w.pfg,
    }


def _complement_dict(desc) -> dict:
    return {
        "kind": desc.kind.value,
        "generators": [g for g in desc.generators],
        "is_subspace": desc.is_subspace,
    }


def _j0_subspace_status(space, subspace, config, selection, witness, tol):
    """TRUE / FALSE are exact (plane classification, Euclidean, degenerate,
    or an explicit closure violation); SAMPLED_TRUE reflects a survived
    sampling budget only."""
    n, k = space.dim, subspace.k
    if k == 0 or k == n or space.norm is Norm.EUCLID:
        return "TRUE", None, None
    if space.norm is Norm.SUP and n == 2:
        desc = complement_description(subspace, tol)
        status = "TRUE" if desc.is_subspace else "FALSE"
        pair = None
        if not desc.is_subspace:
            # the two boundary rays (one possibly flipped) sum into the
            # excluded cone, exhibiting the closure failure
            g0, g1 = desc.generators[0], desc.generators[1]
            for x, y in ((g0, g1), (g0, -g1)):
                if not in_metric_complement(space, subspace, x + y, tol=tol):
                    pair = {"x": x, "y": y}
                    break
        return status, desc, pair
    if witness is not None:
        x = witness.f - witness.pf
        y = witness.g - witness.pg
        if not in_metric_complement(space, subspace, x + y, tol=tol):
            return "FALSE", None, {"x": x, "y": y}
    rng = np.random.default_rng(config.seed)
    members = []
    for _ in range(64):
        v = rng.standard_normal(n)
        res = project_onto_subspace(space, subspace, v, tol, want_face=False)
        r = v - res.representative
        if norm(space, r) > 1e-9:
            members.append(r)
    for i in range(len(members)):
        for j in range(i + 1, min(i + 9, len(members))):
            s = members[i] + members[j]
            if norm(space, s) <= 1e-9:
                continue
            if not in_metric_complement(space, subspace, s, tol=tol):
                return "FALSE", None, {"x": members[i], "y": members[j]}
    return "SAMPLED_TRUE", None, None


def build_analysis_report(
    space: Space,
    subspace: Subspace,
    config: RunConfig,
    with_timings: bool = False,
) -> AnalysisReport:
    tol = config.tolerance
    t0 = time.perf_counter()
    cheb = is_chebyshev(
        space, subspace, samples=config.chebyshev_samples, seed=config.seed, tol=tol
    )
    t_cheb = time.perf_counter() - t0

    t0 = time.perf_counter()
    result = find_linear_selection(
        space,
        subspace,
        seed=config.seed,
        deutsch_budget=config.deutsch_budget,
        witness_budget=config.witness_budget,
        tol=tol,
    )
    t_sel = time.perf_counter() - t0

    selection = None
    witness = None
    if isinstance(result, SelectionCertificate) and result.certified:
        selection = result
        qlp = "HOLDS"
    elif isinstance(result, SelectionNotFound) and result.witness is not None:
        witness = result.witness
        if not validate_witness(space, subspace, witness, tol):
            raise RuntimeError("witness failed re-validation")
        qlp = "FAILS_WITH_WITNESS"
    else:
        qlp = "INCONCLUSIVE"

    j0_status, desc, closure_pair = _j0_subspace_status(
        space, subspace, config, selection, witness, tol
    )

    witnesses: dict = {}
    if cheb.kind is ChebyshevKind.NO:
        witnesses["chebyshev_face"] = cheb.witness
    if witness is not None:
        witnesses["nonlinearity"] = _witness_dict(witness)
    if closure_pair is not None:
        witnesses["j0_closure_pair"] = closure_pair

    payload: dict = {
        "schema": SCHEMA_VERSION,
        "space": space_token(space),
        "subspace_basis": subspace.basis.T,
        "seed": config.seed,
        "tolerances": config.to_dict(),
        "chebyshev": {
            "verdict": cheb.kind.name,
            "samples_checked": cheb.samples_checked,
        },
        "j0_is_subspace": j0_status,
        "selection": None
        if selection is None
        else {
            "matrix": selection.p.matrix,
            "status": selection.status.name,
            "method": selection.method,
        },
        "qlp": qlp,
        "witnesses": witnesses,
    }
    if desc is not None:
        payload["j0_description"] = _complement_dict(desc)
    if with_timings:
        payload["timings"] = {"chebyshev_s": t_cheb, "selection_s": t_sel}
    return AnalysisReport(payload)


def revalidate_report_witnesses(payload: dict, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Check every witness embedded in a report using distance computations
    only."""
    space = parse_space(payload["space"])
    basis = np.asarray(payload["subspace_basis"], dtype=float).T
    subspace = Subspace(space, basis)
    ok = True
    w = payload.get("witnesses", {})
    if "chebyshev_face" in w:
        res = metric_projection(space, subspace, np.asarray(w["chebyshev_face"], float), tol=tol)
        ok &= res.face_dim >= 1
    if "nonlinearity" in w:
        data = w["nonlinearity"]
        wit = NonlinearityWitness(
            f=np.asarray(data["f"], float),
            g=np.asarray(data["g"], float),
            pf=np.asarray(data["pf"], float),
            pg=np.asarray(data["pg"], float),
            pfg=np.asarray(data["pfg"], float),
        )
        ok &= validate_witness(space, subspace, wit, tol)
    if "j0_closure_pair" in w:
        x = np.asarray(w["j0_closure_pair"]["x"], float)
        y = np.asarray(w["j0_closure_pair"]["y"], float)
        ok &= in_metric_complement(space, subspace, x, tol=tol)
        ok &= in_metric_complement(space, subspace, y, tol=tol)
        ok &= not in_metric_complement(space, subspace, x + y, tol=tol)
    return bool(ok)


# ---------------------------------------------------------------------------
# Property suites (shared by `propcheck` and the test suite)


def _random_instance(rng, norms=(Norm.SUP, Norm.SUM), max_dim=3):
    n = int(rng.integers(2, max_dim + 1))
    kind = norms[int(rng.integers(len(norms)))]
    space = Space(n, kind)
    k = 1 if n == 2 else int(rng.integers(1, n))
    for _ in range(32):
        b = np.round(rng.uniform(-2.0, 2.0, (n, k)), 2)
        b[rng.random((n, k)) < 0.35] = 0.0
        try:
            return space, Subspace(space, b)
        except RankDeficientBasis:
            continue
    return space, Subspace(space, np.eye(n)[:, :k])


def _suite_cheney_wulbert(trials, seed, config):
    failures = []
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        space, subspace = _random_instance(rng)
        x = np.round(rng.uniform(-3.0, 3.0, space.dim), 3)
        tol = config.tolerance
        try:
            j, j0 = cheney_wulbert_decompose(space, subspace, x, tol=tol)
        except RuntimeError as exc:
            failures.append(
                {"trial": i, "space": space_token(space),
                 "basis": subspace.basis.T, "x": x, "error": str(exc)}
            )
            continue
        recomposed = float(np.max(np.abs((j + j0) - x)))
        ok = (
            subspace.contains(j, tol)
            and recomposed <= 1e-9 * (1.0 + float(np.max(np.abs(x))))
            and in_metric_complement(space, subspace, j0, tol=tol)
        )
        if not ok:
            failures.append(
                {"trial": i, "space": space_token(space),
                 "basis": subspace.basis.T, "x": x, "j": j, "j0": j0}
            )
    return failures


def _suite_homogeneity(trials, seed, config):
    failures = []
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        space, subspace = _random_instance(rng)
        x = np.round(rng.uniform(-3.0, 3.0, space.dim), 3)
        lam = float(np.round(rng.uniform(-4.0, 4.0), 3)) or 1.0
        tol = config.tolerance
        _, j0 = cheney_wulbert_decompose(space, subspace, x, tol=tol)
        if norm(space, j0) <= 1e-9:
            continue
        if not in_metric_complement(space, subspace, lam * j0, tol=tol):
            failures.append(
                {"trial": i, "space": space_token(space),
                 "basis": subspace.basis.T, "j0": j0, "lambda": lam}
            )
    return failures


def _certified_instance(rng, config):
    space, subspace = _random_instance(rng)
    result = find_linear_selection(
        space,
        subspace,
        seed=config.seed,
        deutsch_budget=config.deutsch_budget,
        witness_budget=8,
        tol=config.tolerance,
    )
    if isinstance(result, SelectionCertificate) and result.certified:
        return space, subspace, result
    return None


def _random_quotient_operator(rng, q: QuotientSpace):
    m = int(rng.integers(1, 4))
    dom = Space(m, Norm.SUP if rng.integers(2) else Norm.SUM)
    mat = np.round(rng.uniform(-2.0, 2.0, (q.ambient.dim, m)), 3)
    return LinearMap(mat, dom, q)


def _suite_lift_norm(trials, seed, config):
    failures = []
    tol = config.tolerance
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        inst = _certified_instance(rng, config)
        if inst is None:
            continue
        space, subspace, cert = inst
        q = QuotientSpace.create(space, subspace)
        s = _random_quotient_operator(rng, q)
        rep = lift_operator(s, cert, tol)
        bad = not (rep.composition_ok and rep.norm_preserved)
        # any other lift can only have a larger norm
        if subspace.k and not bad:
            pert = subspace.basis @ np.round(
                rng.uniform(-2.0, 2.0, (subspace.k, s.matrix.shape[1])), 3
            )
            t_other = LinearMap(rep.T.matrix + pert, s.domain, space)
            n_other = operator_norm(t_other, tol)
            if n_other < rep.norm_S - 1e-9 * max(1.0, rep.norm_S):
                bad = True
        if bad:
            failures.append(
                {"trial": i, "space": space_token(space),
                 "basis": subspace.basis.T, "s": s.matrix,
                 "norm_s": rep.norm_S, "norm_t": rep.norm_T}
            )
    return failures


def _suite_deutsch_roundtrip(trials, seed, config):
    failures = []
    tol = config.tolerance
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        inst = _certified_instance(rng, config)
        if inst is None:
            continue
        space, subspace, cert = inst
        q = QuotientSpace.create(space, subspace)
        psi = iso_from_selection(q, cert, tol)
        back = selection_from_lift(q, psi, tol)
        gap = float(np.max(np.abs(back.p.matrix - cert.p.matrix)))
        if not back.certified or gap > 1e-12:
            failures.append(
                {"trial": i, "space": space_token(space),
                 "basis": subspace.basis.T, "roundtrip_gap": gap}
            )
    return failures


def _suite_duality(trials, seed, config):
    failures = []
    tol = config.tolerance
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        n = int(rng.integers(2, 4))
        space = Space(n, Norm.SUP)
        k = int(rng.integers(1, n))
        rows = sorted(rng.permutation(n)[:k].tolist())
        basis = np.eye(n)[:, rows]
        subspace = Subspace(space, basis)
        q = QuotientSpace.create(space, subspace)
        s = _random_quotient_operator(rng, q)
        dual = duality_lift(s, tol)
        cert = find_linear_selection(space, subspace, seed=config.seed, tol=tol)
        assert isinstance(cert, SelectionCertificate)  # coordinate spans always resolve
        rep = lift_operator(s, cert, tol)
        gap = float(np.max(np.abs(dual.T.matrix - rep.T.matrix)))
        if not (
            dual.composition_ok
            and dual.norm_preserved
            and rep.norm_preserved
            and gap <= 1e-9
        ):
            failures.append(
                {"trial": i, "space": space_token(space), "rows": rows,
                 "s": s.matrix, "gap": gap}
            )
    return failures


SUITES = {
    "cheney_wulbert": _suite_cheney_wulbert,
    "homogeneity": _suite_homogeneity,
    "lift_norm": _suite_lift_norm,
    "deutsch_roundtrip": _suite_deutsch_roundtrip,
    "duality": _suite_duality,
}


def run_suite(name: str, trials: int, seed: int, config: RunConfig | None = None):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    config = config or RunConfig()
    failures = SUITES[name](trials, seed, config)
    return {
        "schema": SCHEMA_VERSION,
        "suite": name,
        "trials": trials,
        "seed": seed,
        "passes": trials - len(failures),
        "failures": failures,
    }


# ---------------------------------------------------------------------------
# Commands


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    config = build_config(args)
    try:
        space = parse_space(args.space)
        subspace = parse_subspace(args.subspace, space)
    except (ValueError, RankDeficientBasis) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = build_analysis_report(space, subspace, config, with_timings=args.timings)
    _write_or_print(report.to_json(), args.out)
    return 0 if report.qlp in ("HOLDS", "FAILS_WITH_WITNESS") else 2


def cmd_lift(args) -> int:
    config = build_config(args)
    tol = config.tolerance
    try:
        space = parse_space(args.space)
        subspace = parse_subspace(args.subspace, space)
        with open(args.operator) as fh:
            data = json.load(fh)
        dom = parse_space(data["domain"])
        rows = np.asarray(data["rows"], dtype=float)
        if rows.shape != (space.dim, dom.dim):
            raise ValueError(
                f"operator rows have shape {rows.shape}, expected {(space.dim, dom.dim)}"
            )
    except (ValueError, KeyError, OSError, RankDeficientBasis) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    q = QuotientSpace.create(space, subspace)
    s = LinearMap(rows, dom, q)
    result = find_linear_selection(
        space,
        subspace,
        seed=config.seed,
        deutsch_budget=config.deutsch_budget,
        witness_budget=config.witness_budget,
        tol=tol,
    )
    if not (isinstance(result, SelectionCertificate) and result.certified):
        payload = {
            "schema": SCHEMA_VERSION,
            "status": "FAILS_WITH_WITNESS"
            if isinstance(result, SelectionNotFound) and result.witness is not None
            else "INCONCLUSIVE",
            "space": space_token(space),
            "subspace_basis": subspace.basis.T,
            "seed": config.seed,
        }
        if isinstance(result, SelectionNotFound) and result.witness is not None:
            payload["witness"] = _witness_dict(result.witness)
        _write_or_print(dumps(payload) + "\n", args.out)
        return 2
    rep = lift_operator(s, result, tol)
    payload = {
        "schema": SCHEMA_VERSION,
        "status": "LIFTED",
        "space": space_token(space),
        "subspace_basis": subspace.basis.T,
        "domain": data["domain"],
        "seed": config.seed,
        "T": rep.T.matrix,
        "norm_S": rep.norm_S,
        "norm_T": rep.norm_T,
        "norm_preserved": rep.norm_preserved,
        "composition_ok": rep.composition_ok,
        "composition_residual": rep.composition_residual,
        "selection_method": result.method,
    }
    _write_or_print(dumps(payload) + "\n", args.out)
    return 0


def _builtin_function(spec: str, grid_n: int) -> GridFunction:
    if spec == "id":
        return GridFunction.from_callable(lambda x: x, grid_n)
    if spec.startswith("poly:"):
        coeffs = [float(c) for c in spec[5:].split(",")]

        def poly(x):
            acc = np.zeros_like(x)
            for c in reversed(coeffs):
                acc = acc * x + c
            return acc

        return GridFunction.from_callable(poly, grid_n)
    if spec.startswith("csv:"):
        return read_grid_csv(spec[4:])
    raise ValueError(f"unknown function spec {spec!r}; use id, poly:c0,c1,..., or csv:path")


def cmd_select_c01(args) -> int:
    config = build_config(args)
    try:
        d = ClosedSet1D.parse(args.d)
        if args.f.startswith("csv:"):
            f = _builtin_function(args.f, 0)
            grid_n = f.grid_n
            _ = d_mask(d, grid_n)  # raises if unaligned
        else:
            grid_n = aligned_grid_for(d, config.grid_n)
            f = _builtin_function(args.f, grid_n)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    f1 = star_selection_1d(f, d)
    residual = GridFunction(f.values - f1.values)
    dist = vanishing_ideal_distance(f, d)
    attained = residual.sup_norm()
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    write_grid_csv(os.path.join(outdir, "f.csv"), f)
    write_grid_csv(os.path.join(outdir, "f1.csv"), f1)
    write_grid_csv(os.path.join(outdir, "f_minus_f1.csv"), residual)
    payload = {
        "schema": SCHEMA_VERSION,
        "d": d.format(),
        "grid_n": grid_n,
        "residual_sup_norm": attained,
        "max_over_d": dist,
        "distance_attained": bool(
            abs(attained - dist) <= config.eps_eq * (1.0 + dist)
        ),
    }
    text = dumps(payload) + "\n"
    with open(os.path.join(outdir, "certificate.json"), "w") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return 0


def _parse_region(spec: str):
    preds = []
    for term in spec.split(";"):
        term = term.strip()
        if not term:
            continue
        if term.startswith("annulus:"):
            lo, hi = (float(v) for v in term[8:].split(","))
            preds.append(annulus_predicate(lo, hi))
        elif term.startswith("rect:"):
            x0, x1, y0, y1 = (float(v) for v in term[5:].split(","))
            preds.append(rect_predicate(x0, x1, y0, y1))
        else:
            raise ValueError(f"unknown region term {term!r}; use annulus:lo,hi or rect:x0,x1,y0,y1")
    if not preds:
        raise ValueError("empty region spec")

    def union(x, y):
        acc = preds[0](x, y)
        for p in preds[1:]:
            acc = acc | p(x, y)
        return acc

    return union


def _builtin_function_2d(spec: str, grid_n: int) -> GridFunction2D:
    if spec == "norm":
        return GridFunction2D.from_callable(lambda x, y: np.hypot(x, y), grid_n)
    if spec.startswith("const:"):
        c = float(spec[6:])
        return GridFunction2D.from_callable(lambda x, y: np.full_like(x, c), grid_n)
    raise ValueError(f"unknown 2-d function spec {spec!r}; use norm or const:c")


def cmd_select_c01_2d(args) -> int:
    config = build_config(args)
    try:
        pred = _parse_region(args.d)
        f = _builtin_function_2d(args.f, config.grid2d_n)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    result = star_selection_2d(f, pred)
    residual = GridFunction2D(f.values - result.f1.values)
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    write_grid2d_csv(os.path.join(outdir, "f.csv"), f)
    write_grid2d_csv(os.path.join(outdir, "f1.csv"), result.f1)
    write_grid2d_csv(os.path.join(outdir, "f_minus_f1.csv"), residual)
    payload = {
        "schema": SCHEMA_VERSION,
        "d": args.d,
        "grid_n": config.grid2d_n,
        "uncovered_points": int(result.uncovered.sum()),
        "max_adjacent_jump": result.max_adjacent_jump,
        "residual_sup_norm": float(np.max(np.abs(residual.values))),
    }
    text = dumps(payload) + "\n"
    with open(os.path.join(outdir, "certificate.json"), "w") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return 0


def cmd_propcheck(args) -> int:
    config = build_config(args)
    try:
        result = run_suite(args.suite, args.trials, config.seed, config)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write_or_print(dumps(result) + "\n", args.out)
    return 0 if not result["failures"] else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="proxilift",
        description="Best approximation, metric complements, linear selections, "
        "and norm-preserving quotient lifts in finite-dimensional normed spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, space=False):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--seed", type=int, help=f"RNG seed (falls back to ${ENV_SEED})")
        p.add_argument("--tol", type=float, help="scalar equality tolerance")
        p.add_argument("--grid", type=int, help="grid size for function-space commands")
        p.add_argument("--out", help="output path (directory for CSV commands)")
        if space:
            p.add_argument("--space", required=True, help="space spec, e.g. linf:3")
            p.add_argument(
                "--subspace", required=True, help='basis vectors, e.g. "1,1,1" or "1,0;0,1"'
            )

    p = sub.add_parser("analyze", help="selection / complement / lifting status of (X, J)")
    common(p, space=True)
    p.add_argument("--timings", action="store_true", help="include timings in the report")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("lift", help="norm-preserving lift of an operator into X/J")
    common(p, space=True)
    p.add_argument("--operator", required=True, help="JSON file with domain and rows")
    p.set_defaults(fn=cmd_lift)

    p = sub.add_parser("select-c01", help="vanishing-ideal selection on [0,1]")
    common(p)
    p.add_argument("--d", required=True, help='closed set, e.g. "[0.2,0.4];[0.6,0.8]"')
    p.add_argument("--f", required=True, help="function spec: id, poly:c0,c1,..., csv:path")
    p.set_defaults(fn=cmd_select_c01)

    p = sub.add_parser("select-c01-2d", help="radial vanishing-ideal selection on [0,1]^2")
    common(p)
    p.add_argument("--d", required=True, help='region, e.g. "annulus:0.4,0.6"')
    p.add_argument("--f", required=True, help="function spec: norm or const:c")
    p.set_defaults(fn=cmd_select_c01_2d)

    p = sub.add_parser("propcheck", help="run a seeded property suite")
    common(p)
    p.add_argument("suite", help=f"one of {sorted(SUITES)}")
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(fn=cmd_propcheck)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BrokenPipeError:
        return 1


if __name__ == "__main__":
    sys.exit(main())
