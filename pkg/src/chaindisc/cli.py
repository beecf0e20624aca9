"""Command-line entry point ``chaindisc``.

Every command prints (or writes with ``--out``) a JSON report; ``--format csv``
emits witness colorings, point sets or per-row tables instead. Exit codes:
0 ok, 2 configuration error, 3 size or precondition error, 4 budget failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import chaining, coloring, entropy_oracle, generators, lab, shatter
from ._parallel import set_default_threads
from .core import IndexSet, PointSet, PreconditionError, SizeError, dumps_coloring, dumps_points, parse_metric, read_points
from .reports import build_report, dumps_json, rows_to_csv

EXIT_OK, EXIT_CONFIG, EXIT_SIZE, EXIT_BUDGET = 0, 2, 3, 4

LAB_KEYS = {
    "measure", "dim", "index_set", "k", "k_list", "m", "m_grid", "trials", "budget", "rho",
    "constants", "I_samples", "pair_samples", "t", "n", "kappa7", "A_estimate", "mc_trials",
    "values", "probs", "L",
}


class ConfigError(ValueError):
    pass


def parse_constants(text: str | None) -> dict:
    """``k1=1,k2=0.5`` -> {"k1": 1.0, "k2": 0.5}."""
    out: dict = {}
    if not text:
        return out
    for item in text.split(","):
        key, sep, val = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"malformed constant {item!r}; expected name=value")
        try:
            out[key.strip()] = float(val)
        except ValueError as exc:
            raise ConfigError(f"constant {key!r} is not a number: {val!r}") from exc
    return out


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc


def load_input(args) -> PointSet:
    if args.input and args.gen:
        raise ConfigError("give either --input or --gen, not both")
    if args.input:
        return read_points(args.input)
    if args.gen:
        return generators.generate(args.gen, seed=args.seed)
    raise ConfigError("an input is required: --input FILE or --gen SPEC")


def _config_echo(args) -> dict:
    skip = {"func", "threads", "out"}  # neither changes the result
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# -- chaining ------------------------------------------------------------------------


def cmd_gamma2(args):
    T = load_input(args)
    metric = parse_metric(args.metric)
    seq = chaining.build_admissible(T, metric, strategy=args.strategy, s0=args.s0)
    value = chaining.gamma2(T, metric, s0=args.s0, seq=seq)
    summary = {"value": value, "exact": args.strategy == "exhaustive", "levels": [len(l) for l in seq.levels]}
    return summary, [], summary["exact"], None


def cmd_cover(args):
    T = load_input(args)
    res = chaining.covering_number(T, args.eps, parse_metric(args.metric))
    return {"value": res.value, "exact": res.exact, "eps": args.eps}, [], res.exact, None


def cmd_pack(args):
    T = load_input(args)
    value = chaining.packing_number(T, args.eps, parse_metric(args.metric))
    exact = len(T.dedup()) <= chaining.EXACT_COUNT_LIMIT
    return {"value": value, "exact": exact, "eps": args.eps}, [], exact, None


def cmd_entropy_number(args):
    T = load_input(args)
    value = chaining.entropy_number(T, args.k, parse_metric(args.metric))
    exact = len(T.dedup()) <= chaining.EXACT_COUNT_LIMIT
    return {"value": value, "k": args.k, "exact": exact}, [], exact, None


def cmd_entropy(args):
    base = {"nat": "natural", "natural": "natural", "bits": "two", "two": "two", "2": "two"}.get(args.base)
    if base is None:
        raise ConfigError(f"unknown base {args.base!r}")
    if args.a:
        r = entropy_oracle.entropic_ratio(_floats(args.a), base)
        return {"H": r["H"], "Phi": r["Phi"], "ratio": r["ratio"]}, [], True, None
    grid = load_input(args)
    r = entropy_oracle.verify_entropic_estimate(grid.points.tolist(), base, args.threads)
    summary = {k: r[k] for k in ("max_ratio", "argmax", "count", "degenerate", "base")}
    return summary, r["rows"], True, None


# -- coloring -------------------------------------------------------------------------


def _disc_summary(res: coloring.DiscResult) -> dict:
    return {"value": res.value, "exact": res.exact, "coloring": res.coloring.tolist(), "details": res.details}


def cmd_disc(args):
    T = load_input(args)
    if args.mode == "exact":
        res = coloring.disc_exact(T)
    else:
        res = coloring.disc_heuristic(T, budget=args.budget or 4096, seed=args.seed)
    return _disc_summary(res), [], res.exact, res.coloring


def cmd_spencer(args):
    T = load_input(args)
    res = coloring.spencer_color(T, seed=args.seed, budget=args.budget or 4096, kappa=args.constants_dict or None)
    return _disc_summary(res), res.details["rounds"], False, res.coloring


def cmd_matousek(args):
    T = load_input(args)
    res = coloring.matousek_color(T, args.d, seed=args.seed, budget=args.budget or 4096)
    return _disc_summary(res), res.details["rounds"], False, res.coloring


def cmd_hdisc(args):
    T = load_input(args)
    value = coloring.hdisc_exact(T)
    return {"value": value, "exact": True}, [], True, None


def cmd_partial(args):
    T = load_input(args)
    consts = args.constants_dict or None
    if args.schedule == "gamma":
        sched, seq = chaining.schedule_gamma(T.n, consts), None
    else:
        sched = chaining.schedule_entropy(T.n, consts, orientation=args.orientation)
        seq = chaining.build_entropy_sequence(T.with_origin(), sched, root=0)
    res = coloring.partial_color(T, sched, seq, budget=args.budget or 100000, seed=args.seed)
    check = coloring.entropy_budget_check(sched, T.n)
    summary = {
        "coloring": res.coloring.tolist(), "chain_bound": res.chain_bound, "zero_count": res.zero_count,
        "method": res.method, "budget_used": res.budget_used, "certified": coloring.verify_partial(T, res),
        "budget_check": check, "schedule": sched.as_dict(), "stats": res.stats,
    }
    return summary, [], res.method == "exhaustive", res.coloring


# -- shattering -----------------------------------------------------------------------


def cmd_vc(args):
    T = load_input(args)
    if args.lower:
        grid = _floats(args.deltas) if args.deltas else None
        value = shatter.hdisc_vc_lower(T, grid)
        return {"hdisc_vc_lower": value, "grid": grid or shatter.default_delta_grid(T)}, [], True, None
    if args.haussler:
        rep = shatter.haussler_check(T, args.haussler, samples=args.trials or 8, seed=args.seed, threads=args.threads)
        rows = rep.pop("rows")
        return rep, rows, False, None
    if args.eps is None:
        raise ConfigError("vc needs --eps (or --lower / --haussler D)")
    if args.indices:
        I = IndexSet.from_one_based(int(x) for x in args.indices.split(","))
        wit = shatter.is_shattered(T, I, args.eps, hull=args.hull)
        return {"shattered": wit is not None, "witness": wit.as_dict() if wit else None}, [], True, None
    d, wit = shatter.vc_dim(T, args.eps, hull=args.hull, return_witness=True)
    return {"vc": d, "eps": args.eps, "hull": args.hull, "witness": wit.as_dict() if wit else None}, [], True, None


# -- lab ------------------------------------------------------------------------------


def load_lab_config(args) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    unknown = sorted(set(cfg) - LAB_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    if args.trials is not None:
        cfg["trials"] = args.trials
    if args.budget is not None:
        cfg["budget"] = args.budget
    consts = dict(cfg.get("constants") or {})
    consts.update(args.constants_dict)
    cfg["constants"] = consts
    return cfg


def _lab_class(cfg: dict, args) -> lab.LinearClass:
    src = cfg.get("index_set")
    if isinstance(src, list):
        T = PointSet.from_rows(src)
    elif isinstance(src, str):
        T = generators.generate(src, seed=args.seed) if ":" in src else read_points(src)
    elif args.input or args.gen:
        T = load_input(args)
    else:
        raise ConfigError("lab commands need an index_set (config) or --input/--gen")
    dim = int(cfg.get("dim", T.n))
    measure = lab.MeasureSpec(cfg.get("measure", "gaussian"), dim, cfg.get("values"), cfg.get("probs"), cfg.get("L", 1.0))
    return lab.LinearClass(T, measure)


def cmd_lab(args):
    cfg = load_lab_config(args)
    consts = cfg["constants"]
    seed, threads = args.seed, args.threads
    trials = cfg.get("trials")
    exp = args.experiment
    if exp == "orderstats":
        rep = lab.order_stats(int(cfg.get("n", 1024)), trials or 2000, seed, cfg.get("m_grid"), threads)
        rows = [{"i": i + 1, "mean": v} for i, v in enumerate(rep.pop("mean"))]
        rep.pop("ratios")
        return rep, rows, False, None
    cls = _lab_class(cfg, args)
    if exp == "gap":
        rep = lab.gap_experiment(
            cls, cfg.get("k_list", [16, 64, 256]), cfg.get("budget", 256), trials or 20, cfg.get("rho", 0.25),
            seed, cfg.get("mc_trials", 2000), threads, consts.get("c1", 1.0), consts.get("c2", 1.0),
        )
        rows = rep.pop("rows")
        return rep, rows, False, None
    if exp == "shrink":
        t = cfg.get("t") or cls.index_set.points[0].tolist()
        rep = lab.shrink_single(t, cls.measure, int(cfg.get("k", 256)), trials or 1000, seed, threads)
        rows = [{"trial": i, "constant": v} for i, v in enumerate(rep.pop("values"))]
        return rep, rows, False, None
    if exp == "meanwidth":
        k = int(cfg.get("k", 128))
        rep = lab.meanwidth_ratio(cls, k, cfg.get("m_grid", [8, 16, 32, 64]), cfg.get("I_samples", 50),
                                  trials or 1000, seed, threads)
        rows = rep.pop("rows")
        return rep, rows, False, None
    if exp == "isometry":
        rep = lab.almost_isometry(cls, int(cfg.get("k", 512)), trials or 200, cfg.get("A_estimate"),
                                  consts.get("kappa7", cfg.get("kappa7", 1.0)), seed, threads)
        rows = [{"trial": i, "rate": v} for i, v in enumerate(rep.pop("per_trial"))]
        return rep, rows, False, None
    if exp == "decompose":
        k, m = int(cfg.get("k", 64)), int(cfg.get("m", 8))
        rows = []
        for q in range(trials or 1):
            dec = lab.decompose(cls, k, m)
            win = lab.sample_window(cls.measure, k, seed + q)
            a = lab.verify_weak_l2_containment(dec, win, cfg.get("I_samples", 200), seed + q)
            b = lab.verify_shrinking(dec, win, pair_samples=cfg.get("pair_samples"), seed=seed + q)
            rows.append({"trial": q, "reconstruction_error": dec.reconstruction_error(cls.index_set),
                         "tau_m": dec.tau_m, "depth": dec.depth, "net_size": int(dec.net.size),
                         "c1": a["c1"], "degenerate": a["degenerate"], "c2": b["c2"],
                         "iso_ratio": b["iso_ratio"], "sqrt2_violated": b["sqrt2_violated"]})
        summary = {"k": k, "m": m, "trials": len(rows),
                   "max_c1": max(r["c1"] for r in rows), "max_c2": max(r["c2"] for r in rows),
                   "sqrt2_violations": sum(r["sqrt2_violated"] for r in rows)}
        return summary, rows, False, None
    raise ConfigError(f"unknown lab experiment {exp!r}")


def cmd_generate(args):
    if not args.gen:
        raise ConfigError("generate needs --gen SPEC")
    T = generators.generate(args.gen, seed=args.seed)
    return {"spec": args.gen, "m": len(T), "n": T.n, "points": T.points.tolist()}, [], True, T


# -- plumbing -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="point set file (.csv or .json)")
    common.add_argument("--gen", help="generator spec, e.g. basis:8 or random-box:12,12")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--constants", help="k1=1,k2=1,...")
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--threads", type=int, default=1)

    p = argparse.ArgumentParser(prog="chaindisc", description="Chaining, discrepancy and shattering experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.set_defaults(func=func)
        return sp

    sp = add("gamma2", cmd_gamma2, help="gamma_2 upper bound along an admissible sequence")
    sp.add_argument("--metric", default="l2")
    sp.add_argument("--s0", type=int, default=0)
    sp.add_argument("--strategy", choices=("greedy", "exhaustive"), default="greedy")
    for name, func in (("cover", cmd_cover), ("pack", cmd_pack)):
        sp = add(name, func, help=f"{name}ing number at scale eps")
        sp.add_argument("--eps", type=float, required=True)
        sp.add_argument("--metric", default="l2")
    sp = add("entropy-number", cmd_entropy_number, help="entropy number e_k")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--metric", default="l2")
    sp = add("entropy", cmd_entropy, help="H(W_a) against Phi(1/(2|a|^2))")
    sp.add_argument("--a", help="comma-separated vector; otherwise every input row is a vector")
    sp.add_argument("--base", default="nat")
    sp = add("disc", cmd_disc, help="discrepancy, exact or heuristic")
    sp.add_argument("--mode", choices=("exact", "heuristic"), default="heuristic")
    add("spencer", cmd_spencer, help="iterated partial coloring with the three-branch schedule")
    sp = add("matousek", cmd_matousek, help="iterated partial coloring for {0,1} systems of bounded VC dimension")
    sp.add_argument("--d", type=int, required=True)
    add("hdisc", cmd_hdisc, help="hereditary discrepancy by enumeration")
    sp = add("partial", cmd_partial, help="one pigeonhole partial coloring")
    sp.add_argument("--schedule", choices=("gamma", "entropy"), default="gamma")
    sp.add_argument("--orientation", choices=("proof", "lemma"), default="proof")
    sp = add("vc", cmd_vc, help="shattering dimension at scale eps")
    sp.add_argument("--eps", type=float)
    sp.add_argument("--hull", action="store_true", help="use the absolute convex hull")
    sp.add_argument("--indices", help="1-based coordinates; test this set only")
    sp.add_argument("--lower", action="store_true", help="sup over a delta grid of delta * VC(absconv, delta)")
    sp.add_argument("--deltas", help="comma-separated delta grid for --lower")
    sp.add_argument("--haussler", type=int, metavar="D", help="packing-bound check with declared VC bound D")
    sp = add("lab", cmd_lab, help="Monte Carlo experiments on linear classes")
    sp.add_argument("experiment", choices=("gap", "shrink", "meanwidth", "orderstats", "isometry", "decompose"))
    sp.add_argument("--config", help="JSON config file")
    add("generate", cmd_generate, help="emit a generated point set")
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _error(kind: str, exc: BaseException, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc), "exit_code": code}) + "\n")
    return code


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.constants_dict = parse_constants(args.constants)
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        set_default_threads(args.threads)
        summary, rows, exact, artifact = args.func(args)
        echo = _config_echo(args)
        echo.pop("constants_dict", None)
        report = build_report(args.command if args.command != "lab" else f"lab {args.experiment}",
                              echo, summary, rows, args.seed, args.constants_dict, exact)
        if args.format == "json":
            _emit(dumps_json(report), args.out)
        elif isinstance(artifact, PointSet):
            _emit(dumps_points(artifact), args.out)
        elif artifact is not None:
            _emit(dumps_coloring(artifact), args.out)
        elif args.command == "lab" and args.experiment == "gap":
            _emit(rows_to_csv([{"k": s["k"], "median_r": s["median_r"]} for s in summary["summary"]]), args.out)
        else:
            _emit(rows_to_csv(rows or [summary]), args.out)
        return EXIT_OK
    except coloring.PartialColoringFailure as exc:
        return _error("budget", exc, EXIT_BUDGET)
    except PreconditionError as exc:
        return _error("size" if isinstance(exc, SizeError) else "precondition", exc, EXIT_SIZE)
    except (ConfigError, ValueError, KeyError, IndexError, OSError, json.JSONDecodeError) as exc:
        return _error("config", exc, EXIT_CONFIG)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
