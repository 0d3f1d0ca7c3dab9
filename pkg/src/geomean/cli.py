"""Command-line entry point.

Every JSON output carries the schema version, the pinned constants, the
parsed arguments and the seed, so identical invocations produce identical
bytes. Exit codes: 0 success, 1 domain error, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io as _stdio
import os
import subprocess
import sys
from importlib import metadata
from pathlib import Path

import numpy as np

from . import config
from . import io
from .errors import GeomeanError

SEED_ENV = "GEOMEAN_SEED"


class UsageError(Exception):
    pass


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    return 0


def _echo(args) -> dict:
    skip = {"func", "handler"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(args, command: str, result, seed: int | None = None) -> int:
    doc = {
        "schema_version": config.SCHEMA_VERSION,
        "command": command,
        "seed": seed,
        "config": {"args": _echo(args), "constants": config.as_dict()},
        "provenance": {"package": "artifact", "version": _version(), "module": f"geomean.{command.split()[0]}"},
        "result": result,
    }
    io.write_json(doc, getattr(args, "out", None))
    return 0


def _need(path: str | None, flag: str) -> str:
    if path is None:
        raise UsageError(f"{flag} is required")
    if not Path(path).exists():
        raise UsageError(f"{flag}: no such file {path!r}")
    return path


def _kappa(M: np.ndarray) -> float:
    w = np.linalg.eigvalsh(M)
    return float(1 / w[0])


# ----------------------------------------------------------------- commands

def cmd_geomean(args) -> int:
    from .linalg_core import geodesic_point

    A = io.load_matrix(_need(args.a, "--a"))
    C = io.load_matrix(_need(args.c, "--c"))
    Y = geodesic_point(A, C, args.t)
    return _emit(args, "geomean", {"Y": io.matrix_to_json(Y), "t": args.t})


def cmd_riccati(args) -> int:
    from .riccati import residual_norm, solve_riccati_general, solve_yayc

    A = io.load_matrix(_need(args.a, "--a"))
    C = io.load_matrix(_need(args.c, "--c"))
    if args.b is None:
        Y = solve_yayc(A, C)
        return _emit(args, "riccati", {"y_plus": io.matrix_to_json(Y),
                                       "residual_plus": residual_norm(A, None, C, Y)})
    B = io.load_matrix(_need(args.b, "--b"), hermitian=False)
    return _emit(args, "riccati", solve_riccati_general(A, B, C).to_dict())


def cmd_riccati_p(args) -> int:
    from .riccati import pth_order_residual, solve_pth_order

    A = io.load_matrix(_need(args.a, "--a"))
    C = io.load_matrix(_need(args.c, "--c"))
    Y = solve_pth_order(A, C, args.p)
    return _emit(args, "riccati-p", {"Y": io.matrix_to_json(Y), "p": args.p,
                                     "residual": pth_order_residual(A, C, Y, args.p)})


def cmd_polyfit(args) -> int:
    from .polyapprox import approx_negative_power, approx_positive_power

    fn = approx_negative_power if args.kind == "neg_power" else approx_positive_power
    poly = fn(args.c, args.delta, args.eps)
    out = poly.to_dict()
    if not args.coeffs:
        out.pop("coeffs")
    return _emit(args, "polyfit", out)


def cmd_blockenc_verify(args) -> int:
    from . import blockenc

    A = io.load_matrix(_need(args.matrix, "--matrix"), hermitian=False)
    if args.sparsity:
        be = blockenc.from_sparse(A, args.sparsity, args.eps)
        target = A / args.sparsity
    else:
        be = blockenc.from_dilation(A, hermitian=False)
        target = A
    err = float(np.linalg.norm(be.block - target, 2))
    res = be.to_dict(include_unitary=args.unitary)
    res.update({"block_error": err, "within_claim": err <= be.eps_claimed / be.alpha + 1e-12})
    return _emit(args, "blockenc verify", res)


def _pipeline_inputs(args):
    from . import blockenc

    A = io.load_matrix(_need(args.a, "--a"))
    C = io.load_matrix(_need(args.c, "--c"))
    kA = args.kappa_a or _kappa(A)
    kC = args.kappa_c or _kappa(C)
    return blockenc.from_dilation(A, "A"), blockenc.from_dilation(C, "C"), kA, kC


def cmd_pipeline(args) -> int:
    from . import blockenc
    from . import geomean_pipeline as gp

    UA, UC, kA, kC = _pipeline_inputs(args)
    if args.kind == "geomean":
        rep = gp.be_inverse_geomean(UA, UC, args.eps, kA, kC, strict=not args.trusting)
    elif args.kind == "weighted":
        if args.p is None:
            raise UsageError("--p is required for the weighted pipeline")
        fn = gp.be_weighted_inverse if args.inverse else gp.be_weighted_geomean
        rep = fn(UA, UC, args.p, args.eps, kA, kC, strict=not args.trusting)
    else:
        B = io.load_matrix(_need(args.b, "--b"), hermitian=False)
        UB = blockenc.from_dilation(B, "B", hermitian=False)
        rep = gp.be_riccati_general(UA, UB, UC, args.eps, kA, kC, strict=not args.trusting)
    return _emit(args, f"pipeline {args.kind}", rep.to_dict())


_MODES = {"exact": "exact", "estimate": "amplitude_estimated", "sampled": "hadamard_sampled"}


def _states(args):
    rho = io.load_matrix(_need(args.rho, "--rho"))
    sigma = io.load_matrix(_need(args.sigma, "--sigma"))
    return rho, sigma, args.kappa_rho or _kappa(rho), args.kappa_sigma or _kappa(sigma)


def cmd_fidelity(args) -> int:
    from .estimation import estimate_fidelity, exact_fidelity

    seed = _seed(args)
    rho, sigma, kr, ks = _states(args)
    est = estimate_fidelity(rho, sigma, kr, ks, args.eps, mode=_MODES[args.mode], rng=seed,
                            k=args.k, strict=not args.trusting)
    res = est.to_dict()
    res["exact"] = exact_fidelity(rho, sigma)
    return _emit(args, "fidelity", res, seed)


def cmd_renyi(args) -> int:
    from .estimation import estimate_geo_renyi, exact_geo_renyi

    seed = _seed(args)
    rho, sigma, kr, ks = _states(args)
    est = estimate_geo_renyi(rho, sigma, args.alpha, kr, ks, args.eps, mode=_MODES[args.mode],
                             rng=seed, k=args.k, strict=not args.trusting, base=args.base)
    res = est.to_dict()
    res["exact"] = exact_geo_renyi(rho, sigma, args.alpha, args.base)
    return _emit(args, "renyi", res, seed)


def cmd_gmml_gen(args) -> int:
    from .metric_learning import two_gaussian_pairs, write_pairs_csv

    seed = _seed(args)
    ds = two_gaussian_pairs(args.dim, args.pairs, seed)
    if args.out is None:
        raise UsageError("--out is required")
    write_pairs_csv(ds, args.out)
    return 0


def cmd_gmml_fit(args) -> int:
    from . import metric_learning as ml

    ds = ml.read_pairs_csv(_need(args.data, "--data"))
    A, C = ml.build_scatter(ds, ridge=args.ridge)
    model = ml.gmml_fit(A, C) if args.t == 0.5 else ml.gmml_fit_weighted(A, C, args.t)
    ml.fit_threshold(model, ds)
    res = model.to_dict()
    res.update({"train_accuracy": ml.pair_accuracy(model, ds),
                "kappa_A": A.kappa, "kappa_C": C.kappa, "source": ds.source_note})
    return _emit(args, "gmml fit", res)


def _score_rows(rows: list[tuple[str, float, str]], out: str | None):
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "score", "decision"])
    for r in rows:
        w.writerow([r[0], f"{r[1]:.17g}", r[2]])
    if out is None or out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        Path(out).write_text(buf.getvalue())


def cmd_gmml_score(args) -> int:
    from . import metric_learning as ml

    obj = io.load_json(_need(args.model, "--model"))
    model = ml.MetricModel.from_dict(obj.get("result", obj))
    ds = ml.read_pairs_csv(_need(args.data, "--data"))
    X, _ = ds.pairs()
    d = ml.pair_distances(model, X)
    thr = model.threshold if model.threshold is not None else float(np.median(d))
    _score_rows([(str(i), float(v), "D" if v > thr else "S") for i, v in enumerate(d)], args.out)
    return 0


def cmd_anomaly_score(args) -> int:
    from .metric_learning import anomaly_score

    rho = io.load_matrix(_need(args.rho, "--rho"))
    sigma = io.load_matrix(_need(args.sigma, "--sigma"))
    rows = []
    for i, path in enumerate(args.xi):
        xi = io.load_matrix(_need(path, "--xi"))
        s = anomaly_score(rho, sigma, xi, mode=args.mode, eps=args.eps, t=args.t)
        rows.append((Path(path).stem, s, "anomalous" if s > args.threshold else "normal"))
    _score_rows(rows, args.out)
    return 0


def cmd_bqp_gen(args) -> int:
    from .bqp_instance import gen_instance

    seed = _seed(args)
    inst = gen_instance(args.n, args.kappa_a, args.kappa_c, seed, args.label)
    return _emit(args, "bqp gen", {**inst.to_dict(), "value": inst.meta.get("value")}, seed)


def _load_instance(path):
    from .bqp_instance import MgmInstance

    obj = io.load_json(_need(path, "--instance"))
    return MgmInstance.from_dict(obj.get("result", obj))


def cmd_bqp_solve(args) -> int:
    from .bqp_instance import solve_exact, solve_pipeline

    seed = _seed(args)
    inst = _load_instance(args.instance)
    if args.mode == "exact":
        v = solve_exact(inst)
        res = {"value": v, "decision": "yes" if v >= 0.5 else "no", "p_estimate": v}
    else:
        res = solve_pipeline(inst, args.delta, rng=seed)
        res["value"] = res["p_Y"]
    return _emit(args, "bqp solve", res, seed)


def cmd_bqp_reduce(args) -> int:
    from .bqp_instance import reduce_qlsp

    A = io.load_matrix(_need(args.a, "--a"))
    inst = reduce_qlsp(A, args.kappa)
    return _emit(args, "bqp reduce", inst.to_dict())


def cmd_bench(args) -> int:
    root = Path(__file__).resolve().parents[2]
    suite = root / "tests" / "test_acceptance.py"
    if not suite.exists():
        raise UsageError(f"acceptance suite not found at {suite}")
    proc = subprocess.run([sys.executable, "-m", "pytest", str(suite), "-q", "-s", "-p", "no:cacheprovider"],
                          capture_output=True, text=True, cwd=root)
    lines = [ln for ln in proc.stdout.splitlines() if ln.startswith(("PASS ", "FAIL "))]
    res = {"criteria": [{"status": ln.split(" ", 1)[0], "line": ln.split(" ", 1)[1]} for ln in lines],
           "pytest_exit_code": proc.returncode}
    _emit(args, "bench", res)
    return 0 if proc.returncode == 0 else 1


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="geomean", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, parent=sub, **kw):
        sp = parent.add_parser(name, **kw)
        sp.set_defaults(func=func)
        sp.add_argument("--out", help="output path (default stdout)")
        return sp

    sp = add("geomean", cmd_geomean, help="weighted geometric mean A #_t C")
    sp.add_argument("--a")
    sp.add_argument("--c")
    sp.add_argument("--t", type=float, default=0.5)

    sp = add("riccati", cmd_riccati, help="solve YAY = C, or the equation with linear term B")
    sp.add_argument("--a")
    sp.add_argument("--b")
    sp.add_argument("--c")

    sp = add("riccati-p", cmd_riccati_p, help="solve Y (AY)^{p-1} = C")
    sp.add_argument("--a")
    sp.add_argument("--c")
    sp.add_argument("--p", type=int, default=2)

    sp = add("polyfit", cmd_polyfit, help="Chebyshev approximation of a power function")
    sp.add_argument("--kind", choices=["neg_power", "pos_power"], default="neg_power")
    sp.add_argument("--c", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--coeffs", action="store_true", help="include the coefficient vector")

    be = sub.add_parser("blockenc", help="block-encoding utilities")
    be_sub = be.add_subparsers(dest="action", required=True)
    sp = add("verify", cmd_blockenc_verify, parent=be_sub, help="build and check an encoding")
    sp.add_argument("--matrix")
    sp.add_argument("--sparsity", type=int, default=0)
    sp.add_argument("--eps", type=float, default=0.0)
    sp.add_argument("--unitary", action="store_true", help="include the unitary in the output")

    sp = add("pipeline", cmd_pipeline, help="block-encoding pipelines")
    sp.add_argument("kind", choices=["geomean", "riccati", "weighted"])
    sp.add_argument("--a")
    sp.add_argument("--b")
    sp.add_argument("--c")
    sp.add_argument("--p", type=float)
    sp.add_argument("--inverse", action="store_true", help="weighted: A^{-1} #_{1/p} C instead of A #_{1/p} C")
    sp.add_argument("--eps", type=float, default=1e-2)
    sp.add_argument("--kappa-a", type=float)
    sp.add_argument("--kappa-c", type=float)
    sp.add_argument("--trusting", action="store_true", help="skip spectrum checks")

    for name, func in (("fidelity", cmd_fidelity), ("renyi", cmd_renyi)):
        sp = add(name, func)
        sp.add_argument("--rho")
        sp.add_argument("--sigma")
        sp.add_argument("--eps", type=float, default=0.02)
        sp.add_argument("--mode", choices=sorted(_MODES), default="estimate")
        sp.add_argument("--kappa-rho", type=float)
        sp.add_argument("--kappa-sigma", type=float)
        sp.add_argument("--k", type=int, default=config.MEDIAN_K)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--trusting", action="store_true")
        if name == "renyi":
            sp.add_argument("--alpha", type=float, default=0.5)
            sp.add_argument("--base", choices=["e", "2"], default="e")

    gm = sub.add_parser("gmml", help="geometric mean metric learning")
    gm_sub = gm.add_subparsers(dest="action", required=True)
    sp = add("gen", cmd_gmml_gen, parent=gm_sub, help="write the two-Gaussian pair CSV")
    sp.add_argument("--dim", type=int, default=8)
    sp.add_argument("--pairs", type=int, default=200)
    sp.add_argument("--seed", type=int)
    sp = add("fit", cmd_gmml_fit, parent=gm_sub)
    sp.add_argument("--data")
    sp.add_argument("--t", type=float, default=0.5)
    sp.add_argument("--ridge", action="store_true")
    sp = add("score", cmd_gmml_score, parent=gm_sub)
    sp.add_argument("--model")
    sp.add_argument("--data")

    an = sub.add_parser("anomaly", help="one-class anomaly scoring")
    an_sub = an.add_subparsers(dest="action", required=True)
    sp = add("score", cmd_anomaly_score, parent=an_sub)
    sp.add_argument("--rho")
    sp.add_argument("--sigma")
    sp.add_argument("--xi", nargs="+", default=[])
    sp.add_argument("--mode", choices=["exact", "pipeline"], default="exact")
    sp.add_argument("--eps", type=float, default=1e-3)
    sp.add_argument("--t", type=float, default=0.5)
    sp.add_argument("--threshold", type=float, default=1.0)

    bq = sub.add_parser("bqp", help="geometric-mean decision problem")
    bq_sub = bq.add_subparsers(dest="action", required=True)
    sp = add("gen", cmd_bqp_gen, parent=bq_sub)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--kappa-a", type=float, default=4.0)
    sp.add_argument("--kappa-c", type=float, default=4.0)
    sp.add_argument("--label", choices=["yes", "no", "unknown"], default="yes")
    sp.add_argument("--seed", type=int)
    sp = add("solve", cmd_bqp_solve, parent=bq_sub)
    sp.add_argument("--instance")
    sp.add_argument("--mode", choices=["exact", "pipeline"], default="exact")
    sp.add_argument("--delta", type=float)
    sp.add_argument("--seed", type=int)
    sp = add("reduce", cmd_bqp_reduce, parent=bq_sub)
    sp.add_argument("--a")
    sp.add_argument("--kappa", type=float)

    add("bench", cmd_bench, help="run the acceptance suite and report")
    return p


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except GeomeanError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
