"""Command-line front end.

    torusgap gap --law uniform --t 0.1 --p 2
    torusgap sweep --config configs/uniform.yaml
    torusgap verify --config configs/uniform.yaml
    torusgap counterexample --atom 0.5:1 --t 0.5 --eps 1e-9
    torusgap lemma1 --law uniform --C 3 --counts 32:128
    torusgap report --inputs out/

Outputs go to --out, else $TORUSGAP_OUTPUT_DIR, else the config's
output_dir, else ./torusgap-out. Worker threads come from --threads or
$TORUSGAP_THREADS (default 1); results do not depend on it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import re
import sys
from pathlib import Path

from . import gap as gapmod
from . import verify
from .config import ConfigError, RunConfig, load_config, parse_law_arg, p_text
from .law import Atoms, LawError, law_label, law_to_dict
from .operator import MultiplierOperator, build_grid_operator
from .reporting import read_csv, write_csv, write_json
from .torus import TorusGrid

SWEEP_COLUMNS = ["law", "p", "t", "t2", "gap", "gap_over_t2", "method", "witness"]


def _parse_p(text: str) -> float:
    if text.strip().lower() in {"inf", "infinity"}:
        return math.inf
    p = float(text)
    if p < 1:
        raise argparse.ArgumentTypeError(f"p must be >= 1 or inf, got {text}")
    return p


def _parse_atom(text: str) -> tuple[float, float]:
    try:
        pos, mass = text.split(":")
        return float(pos), float(mass)
    except ValueError:
        raise argparse.ArgumentTypeError(f"atom must look like position:mass, got {text!r}")


def _parse_range(text: str) -> list[int]:
    if ":" in text:
        lo, hi = (int(v) for v in text.split(":"))
        return list(range(lo, hi + 1))
    return [int(v) for v in text.split(",")]


def _args_hash(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    return int(os.environ.get("TORUSGAP_THREADS", "1"))


def _out_dir(args, cfg: RunConfig | None = None) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    if os.environ.get("TORUSGAP_OUTPUT_DIR"):
        return Path(os.environ["TORUSGAP_OUTPUT_DIR"])
    if cfg is not None and cfg.output_dir:
        return Path(cfg.output_dir)
    return Path("torusgap-out")


def _config_from_args(args) -> RunConfig:
    if getattr(args, "config", None):
        cfg = load_config(args.config)
    else:
        cfg = RunConfig(law=parse_law_arg(args.law or "uniform"))
    if getattr(args, "n", None):
        cfg.n = args.n
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    return cfg


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", name).strip("_")[:80]


def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, list) and obj and isinstance(obj[0], dict):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append({"key": prefix, "value": json.dumps(obj) if isinstance(obj, list) else obj})
    return out


# -- subcommands -----------------------------------------------------------------

def cmd_gap(args) -> int:
    law = parse_law_arg(args.law)
    if args.backend == "multiplier":
        if args.p != 2:
            raise SystemExit("the multiplier backend computes the L2 gap only")
        rep = gapmod.gap_l2(MultiplierOperator(law, args.t, args.cutoff))
    else:
        op = build_grid_operator(law, args.t, TorusGrid(args.n))
        rep = gapmod.gap(op, args.p, seed=args.seed or 0)
    rep.meta.pop("witness_function", None)
    payload = {"law": law_to_dict(law), "law_id": law_label(law), "p": p_text(args.p),
               "t": args.t, "gap": rep.gap, "gap_over_t2": rep.gap / args.t**2,
               "method": rep.method, "witness": rep.witness, "meta": rep.meta}
    h = _args_hash({"cmd": "gap", "law": law_to_dict(law), "t": args.t, "p": p_text(args.p),
                    "n": args.n, "backend": args.backend, "cutoff": args.cutoff})
    out = _out_dir(args)
    write_json(out / "gap.json", payload, h)
    print(json.dumps({"gap": rep.gap, "p": p_text(args.p), "t": args.t,
                      "method": rep.method, "witness": rep.witness}))
    return 0


def _sweep_rows(sw: gapmod.SweepReport) -> list[dict]:
    return [{"law": sw.law_id, **r.as_row()} for r in sw.reports]


def cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    sw = gapmod.sweep_fit_constant(cfg.law, cfg.ps, cfg.ts, TorusGrid(cfg.n),
                                   workers=_threads(args))
    out, h = _out_dir(args, cfg), cfg.digest()
    write_csv(out / "sweep.csv", _sweep_rows(sw), SWEEP_COLUMNS, h)
    write_json(out / "sweep.json", {"config": cfg.to_dict(), "law_id": sw.law_id,
                                    "c_est": sw.c_est, "c_est_by_p": sw.c_est_by_p,
                                    "flags": sw.flags, "meta": sw.meta}, h)
    print(f"{sw.law_id}: c_est = {sw.c_est:.10g}  by p: "
          + ", ".join(f"{k}={v:.6g}" for k, v in sw.c_est_by_p.items()))
    for flag in sw.flags:
        print(f"flag: {flag}")
    return 0 if sw.c_est > 0 else 1


def cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    results = verify.run_suite(cfg, workers=_threads(args))
    out, h = _out_dir(args, cfg), cfg.digest()
    files = {}
    for i, r in enumerate(results):
        path = out / "checks" / f"{i:03d}_{_slug(r.name)}.csv"
        rows = _flatten("", {"status": r.status, "values": r.values, "margins": r.margins,
                             "meta": r.meta, "witness": r.witness}, [])
        write_csv(path, rows, ["key", "value"], h)
        files[r.name] = str(path.relative_to(out))
    failed = [r for r in results if r.status == "fail"]
    write_json(out / "verify.json", {
        "config": cfg.to_dict(),
        "checks": [r.to_dict() for r in results],
        "summary": {"total": len(results), "failed": len(failed),
                    "not_applicable": sum(r.status == "not_applicable" for r in results)},
    }, h)
    for r in results:
        print(f"{r.status.upper():>14}  {r.name}")
    for r in failed:
        print(f"FAILED {r.name}: witness {r.witness}, see {files[r.name]}", file=sys.stderr)
    print(f"{len(results) - len(failed)}/{len(results)} checks passed or not applicable")
    return 1 if failed else 0


def cmd_counterexample(args) -> int:
    law = Atoms(tuple(args.atom))
    h = _args_hash({"cmd": "counterexample", "atoms": law.atoms, "t": args.t,
                    "eps": args.eps, "n_max": args.n_max})
    out = _out_dir(args)
    try:
        rep = verify.counterexample_search(law, args.t, args.eps, args.n_max)
    except verify.NotFound as exc:
        write_json(out / "counterexample.json", exc.report.to_dict(), h)
        print(str(exc), file=sys.stderr)
        return 1
    write_json(out / "counterexample.json", rep.to_dict(), h)
    print(json.dumps({"n": rep.n, "residual": rep.residual, "bound": rep.bound,
                      "pigeonhole_bound": str(rep.pigeonhole_bound)}))
    return 0


def cmd_lemma1(args) -> int:
    cfg = _config_from_args(args)
    counts = _parse_range(args.counts) if args.counts else list(
        range(cfg.lemma1_counts[0], cfg.lemma1_counts[1] + 1))
    C = args.C if args.C is not None else cfg.lemma1_scale
    floor = args.floor if args.floor is not None else cfg.tolerances["lemma1_floor"]
    r = verify.lemma1_check(cfg.law, C, counts, TorusGrid(cfg.n), floor=floor)
    out = _out_dir(args, cfg)
    h = _args_hash({"cmd": "lemma1", "config": cfg.digest(), "C": C, "counts": counts,
                    "floor": floor})
    write_json(out / "lemma1.json", r.to_dict(), h)
    if r.status != "not_applicable":
        rows = [{"n": n, "goodness": g, "lclt_sup_distance": d}
                for n, g, d in zip(r.values["counts"], r.values["goodness"],
                                   r.values["lclt_sup_distance"])]
        write_csv(out / "lemma1.csv", rows, ["n", "goodness", "lclt_sup_distance"], h)
    print(f"{r.status}: {r.name} {r.values.get('min_goodness', r.values.get('reason'))}")
    return 1 if r.status == "fail" else 0


def cmd_report(args) -> int:
    rows, c_est = {}, {}
    sources = []
    for base in args.inputs:
        base = Path(base)
        found = [base] if base.is_file() else sorted(base.rglob("sweep.csv"))
        for path in found:
            sources.append(str(path))
            for row in read_csv(path):
                key = (row["law"], float(row["t"]))
                entry = rows.setdefault(key, {"law": row["law"], "t": float(row["t"])})
                p = row["p"]
                entry[f"gap_p{p}"] = float(row["gap"])
                entry[f"gap_over_t2_p{p}"] = float(row["gap_over_t2"])
                c = c_est.setdefault(row["law"], {})
                c[p] = min(c.get(p, math.inf), float(row["gap_over_t2"]))
    if not rows:
        print("no sweep.csv files found", file=sys.stderr)
        return 1
    ps = sorted({k[len("gap_p"):] for r in rows.values() for k in r if k.startswith("gap_p")},
                key=lambda s: math.inf if s == "inf" else float(s))
    columns = ["law", "t", "t2"] + [f"gap_p{p}" for p in ps] + \
        [f"gap_over_t2_p{p}" for p in ps] + [f"c_est_p{p}" for p in ps]
    table = []
    for (law, t), entry in sorted(rows.items()):
        entry["t2"] = t * t
        for p in ps:
            entry[f"c_est_p{p}"] = c_est[law].get(p)
        table.append(entry)
    h = _args_hash({"cmd": "report", "sources": [Path(s).read_text() for s in sources]})
    out = _out_dir(args)
    write_csv(out / "summary.csv", table, columns, h)
    write_json(out / "summary.json", {"sources": sources, "c_est": c_est}, h)
    for law, by_p in c_est.items():
        print(f"{law}: " + ", ".join(f"c_est[p={p}]={v:.6g}" for p, v in by_p.items()))
    return 0


# -- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torusgap", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        p.add_argument("--out", help="output directory")
        p.add_argument("--threads", type=int, help="worker threads")
        if config:
            p.add_argument("--config", help="YAML run config")
            p.add_argument("--law", help="uniform | gaussian | mixture | path to a law YAML")
            p.add_argument("--n", type=int, help="grid size")
            p.add_argument("--seed", type=int)

    p = sub.add_parser("gap", help="gap of I - A_t for one (law, t, p)")
    common(p, config=False)
    p.add_argument("--law", default="uniform")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--p", type=_parse_p, default=2.0)
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--backend", choices=["grid", "multiplier"], default="grid")
    p.add_argument("--cutoff", type=int, default=512)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("sweep", help="gap sweep over (t, p) and the fitted constant")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the full check suite")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("counterexample", help="search n with ||f_n - A_t f_n||_1 <= eps")
    common(p, config=False)
    p.add_argument("--atom", type=_parse_atom, action="append", required=True,
                   help="position:mass, repeatable")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--n-max", type=int, default=10_000)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("lemma1", help="goodness of wrapped standardized sums")
    common(p)
    p.add_argument("--C", type=float)
    p.add_argument("--counts", help="lo:hi or comma list")
    p.add_argument("--floor", type=float)
    p.set_defaults(func=cmd_lemma1)

    p = sub.add_parser("report", help="merge sweep outputs into one table")
    common(p, config=False)
    p.add_argument("--inputs", nargs="+", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (LawError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
