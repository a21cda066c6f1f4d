"""Command-line entry point: ``hmk <command> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .core import HMKError, Tolerances

log = logging.getLogger("hmk")

BIG_ROOTS = 24


class RunConfig:
    def __init__(self, args):
        self.tol = Tolerances(unitarity_tolerance=args.tol_unitarity, unbiasedness_tolerance=args.tol_unbiased)
        if args.budget <= 0:
            raise ValueError("--budget must be positive")
        self.budget = int(args.budget)
        self.seed = args.seed
        self.format = args.format
        self.workers = max(1, args.workers)


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, default=_default)


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not all(isinstance(x, (int, float, str, bool)) for x in v):
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_text(v, indent) if isinstance(v, (dict, list)) else f"{pad}- {v}" for v in obj)
    return f"{pad}{obj}"


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _flat_rows(obj) -> list:
    rows = [["key", "value"]]
    for k, v in obj.items():
        if not isinstance(v, (dict, list)):
            rows.append([k, v])
    return rows


def emit(cfg: RunConfig, obj, out=None, rows=None) -> None:
    if cfg.format == "json":
        text = _dump(obj) + "\n"
    elif cfg.format == "csv":
        text = _csv(rows if rows is not None else _flat_rows(obj))
    else:
        text = _text(json.loads(_dump(obj))) + "\n"
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _figure_path(out, suffix: str = "") -> Path | None:
    if not out:
        return None
    p = Path(out)
    return p.with_name(p.stem + suffix + ".png")


def _table_rows(table, labels, digits):
    rows = [[""] + list(labels)]
    for lab, row in zip(labels, np.asarray(table)):
        rows.append([lab] + [f"{v:.{digits}f}" for v in row])
    return rows


# --- commands -----------------------------------------------------------------------

def cmd_catalog(args, cfg):
    from . import catalog
    from .io import matrix_to_json

    if args.action == "list":
        listing = catalog.family_listing()
        emit(cfg, {"families": listing}, rows=[["family", "arity", "params"]] +
             [[f["family"], f["arity"], f["params"]] for f in listing])
        return 0
    params = catalog.parse_params(args.params or "")
    spec = catalog.FamilySpec(catalog.Family(args.family), params, args.branch)
    m = catalog.build(spec)
    doc = matrix_to_json(m)
    doc["family_spec"] = json.loads(catalog.spec_to_json(spec))
    emit(cfg, doc, args.out)
    return 0


def cmd_equiv(args, cfg):
    from .equivalence import are_equivalent
    from .io import read_matrix

    a, b = read_matrix(args.a, cfg.tol), read_matrix(args.b, cfg.tol)
    w = are_equivalent(a, b, args.atol)
    verdict = {"equivalent": w is not None, "mode": "ordered"}
    if w is not None:
        verdict["witness"] = w.to_json()
        verdict["witness_residual"] = w.residual(a, b)
    elif args.unordered:
        from .core import BasisMatrix

        bd = BasisMatrix(b.entries.conj().T)
        w = are_equivalent(a, bd, args.atol)
        verdict["mode"] = "unordered"
        verdict["equivalent"] = w is not None
        if w is not None:
            verdict["witness_against_adjoint"] = w.to_json()
    emit(cfg, verdict, args.out)
    return 0 if verdict["equivalent"] else 1


def cmd_distance(args, cfg):
    from .geometry import chordal_distance_sq, distance_table
    from .io import read_matrix

    digits = cfg.tol.distance_report_digits
    if args.matrix_list:
        files = sorted(Path(args.matrix_list).glob("*.json"))
        if len(files) < 2:
            raise HMKError(f"need at least two matrix files in {args.matrix_list}")
        mats = [read_matrix(f, cfg.tol) for f in files]
        labels = [f.stem for f in files]
        t = distance_table(mats)
        obj = {"labels": labels, "table": np.round(t, digits).tolist(), "table_raw": t.tolist()}
        if args.table:
            Path(args.table).write_text(_csv(_table_rows(t, labels, digits)))
            from .plotting import distance_heatmap

            distance_heatmap(t, labels, _figure_path(args.table), "squared chordal distances")
        emit(cfg, obj, args.out, rows=_table_rows(t, labels, digits))
        return 0
    if not (args.a and args.b):
        raise HMKError("give two matrix files or --matrix-list")
    d = chordal_distance_sq(read_matrix(args.a, cfg.tol), read_matrix(args.b, cfg.tol))
    emit(cfg, {"distance_sq": round(d, digits), "distance_sq_raw": d}, args.out)
    return 0


def cmd_average(args, cfg):
    from .geometry import average_distance_estimate, random_scan

    est = average_distance_estimate(args.n, args.samples, cfg.seed)
    obj = {"n": args.n, **est.to_json(), "within_4_stderr": est.within(4.0)}
    if args.scan_bases:
        obj["scan"] = random_scan(args.n, args.scan_bases, args.set_size, cfg.seed)
    if args.out:
        from .plotting import estimate_plot

        estimate_plot([obj], _figure_path(args.out), "Haar average")
    emit(cfg, obj, args.out)
    return 0 if est.within(4.0) else 1


def cmd_biunimodular(args, cfg):
    from .fourier import enumerate_biunimodular

    recs = enumerate_biunimodular(args.n, args.alphabet, tol=cfg.tol, budget=cfg.budget, workers=cfg.workers)
    obj = {"n": args.n, "alphabet": args.alphabet, "count": len(recs),
           "classical": sum(r.classical for r in recs), "records": [r.to_json() for r in recs]}
    rows = [["index", "classical"] + [f"z{k}_turn" for k in range(args.n)]]
    for i, r in enumerate(recs):
        rows.append([i, int(r.classical)] + r.to_json()["z_turns"])
    emit(cfg, obj, args.out, rows=rows)
    return 0


def cmd_census(args, cfg):
    from .fourier import grassl_census

    c = grassl_census(tol=cfg.tol, budget=cfg.budget, workers=cfg.workers)
    digits = cfg.tol.distance_report_digits
    labels = [f"{g}:{lab}" for g, lab in zip(c.groups, c.labels)]
    if args.out:
        from .plotting import distance_heatmap

        distance_heatmap(c.distance_table, labels, _figure_path(args.out), "bases unbiased to 1 and F")
    emit(cfg, c.to_json(digits), args.out, rows=_table_rows(c.distance_table, labels, digits))
    return 0


def _alphabet(args):
    from .search import SearchAlphabet

    if args.roots > BIG_ROOTS and not args.big:
        raise HMKError(f"roots:{args.roots} searches run for hours; pass --big to allow them")
    text = f"roots:{args.roots}" + (f",{args.extras}" if args.extras else "")
    return SearchAlphabet.parse(text)


def cmd_search(args, cfg):
    from .search import survey, triplet_search

    alpha = _alphabet(args)
    progress = args.progress or args.big
    digits = cfg.tol.distance_report_digits
    if args.action == "survey":
        rep = survey(alpha, tol=cfg.tol, budget=cfg.budget, workers=cfg.workers, progress=progress)
        obj = rep.to_json(digits)
        if args.out:
            from .plotting import candidate_bars

            candidate_bars({r.pair_label: r.count for r in rep.reports}, _figure_path(args.out),
                           f"third bases per class, {alpha.describe()}")
        rows = [["pair", "unbiased_vectors", "candidates", "max_offdiag"]] + \
            [[r.pair_label, r.vector_count, r.count, f"{r.max_offdiag:.{digits}f}"] for r in rep.reports]
        emit(cfg, obj, args.out, rows=rows)
        return 0
    from .io import read_matrix

    mub1 = read_matrix(args.mub1, cfg.tol)
    rep = triplet_search(mub1, alpha, cfg.tol, cfg.budget, cfg.workers, checkpoint=args.checkpoint,
                         progress=progress)
    if args.out and rep.count > 1:
        from .plotting import distance_heatmap

        distance_heatmap(rep.distance_table, rep.candidate_labels, _figure_path(args.out), f"(1, {rep.pair_label})")
    emit(cfg, rep.to_json(digits), args.out,
         rows=_table_rows(rep.distance_table, rep.candidate_labels, digits) if rep.count else [["candidates"], [0]])
    return 0


def cmd_defect(args, cfg):
    from . import defect as D

    if args.action == "compute":
        from .io import read_matrix

        m = read_matrix(args.matrix, cfg.tol)
        emit(cfg, {"label": m.label, "defect": D.defect(m, cfg.tol), "rank_threshold": cfg.tol.rank_threshold},
             args.out)
        return 0
    if args.action == "dita-expand":
        seed = [float(v) for v in args.seed_values.split(",")]
        rep = D.dita_expand(seed, args.order)
        emit(cfg, rep.to_json(), args.out)
        return 0 if rep.consistent else 1
    scan = D.scan_hermitian(args.samples, cfg.seed, cfg.tol)
    emit(cfg, scan, args.out, rows=[["theta", "branch", "defect"]] +
         list(zip(scan["thetas"], scan["branches"], scan["defects"])))
    return 0


def cmd_reproduce(args, cfg):
    from .reproduce import SECTIONS, run_sections

    sections = args.sections or list(SECTIONS)
    bundle = run_sections(sections, cfg.tol, cfg.budget, cfg.workers, cfg.seed, args.out_dir)
    for sec in bundle["sections"]:
        for c in sec["claims"]:
            print(f"{'PASS' if c['pass'] else 'FAIL'} {sec['section']}: {c['claim']}", file=sys.stderr)
    if cfg.format == "json":
        summary = {"pass": bundle["pass"], "failed": bundle["failed"],
                   "sections": {s["section"]: s["pass"] for s in bundle["sections"]}}
        if args.out_dir:
            summary["bundle"] = str(Path(args.out_dir) / "reproduce.json")
        sys.stdout.write(_dump(summary) + "\n")
    else:
        claims = [{"section": s["section"], "claim": c["claim"], "pass": c["pass"]}
                  for s in bundle["sections"] for c in s["claims"]]
        emit(cfg, {"pass": bundle["pass"], "claims": claims}, rows=[["section", "claim", "pass"]] +
             [[s["section"], c["claim"], int(c["pass"])] for s in bundle["sections"] for c in s["claims"]])
    return 0 if bundle["pass"] else 1


# --- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hmk", description="Complex Hadamard matrices and MUBs in dimension six.")
    p.add_argument("--tol-unitarity", type=float, default=1e-10)
    p.add_argument("--tol-unbiased", type=float, default=1e-9)
    p.add_argument("--budget", type=float, default=1e9, help="maximum vector evaluations per search")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalog", help="build catalog matrices")
    csub = c.add_subparsers(dest="action", required=True)
    csub.add_parser("list")
    b = csub.add_parser("build")
    b.add_argument("--family", required=True)
    b.add_argument("--params", default="")
    b.add_argument("--branch", type=int, default=1, choices=(1, -1))
    b.add_argument("--out")
    c.set_defaults(func=cmd_catalog)

    e = sub.add_parser("equiv", help="equivalence test")
    esub = e.add_subparsers(dest="action", required=True)
    t = esub.add_parser("test")
    t.add_argument("a")
    t.add_argument("b")
    t.add_argument("--unordered", action="store_true")
    t.add_argument("--atol", type=float, default=1e-8)
    t.add_argument("--out")
    e.set_defaults(func=cmd_equiv)

    d = sub.add_parser("distance", help="squared chordal distances")
    d.add_argument("a", nargs="?")
    d.add_argument("b", nargs="?")
    d.add_argument("--matrix-list")
    d.add_argument("--table")
    d.add_argument("--out")
    d.set_defaults(func=cmd_distance)

    a = sub.add_parser("average", help="Monte-Carlo distance to a random basis")
    a.add_argument("--n", type=int, default=6)
    a.add_argument("--samples", type=int, default=100_000)
    a.add_argument("--scan-bases", type=int, default=0)
    a.add_argument("--set-size", type=int, default=4)
    a.add_argument("--out")
    a.set_defaults(func=cmd_average)

    bu = sub.add_parser("biunimodular", help="biunimodular sequences over an alphabet")
    bu.add_argument("--n", type=int, default=6)
    bu.add_argument("--alphabet", default="roots:12")
    bu.add_argument("--out")
    bu.set_defaults(func=cmd_biunimodular)

    ce = sub.add_parser("census", help="bases unbiased to 1 and F")
    ce.add_argument("--out")
    ce.set_defaults(func=cmd_census)

    s = sub.add_parser("search", help="alphabet searches")
    ssub = s.add_subparsers(dest="action", required=True)
    for name in ("survey", "triplets"):
        q = ssub.add_parser(name)
        q.add_argument("--roots", type=int, default=12 if name == "survey" else 24)
        q.add_argument("--extras", default="", help="comma list from d, b1, b2 (d^2 allows squares)")
        q.add_argument("--big", action="store_true", help=f"allow roots above {BIG_ROOTS}")
        q.add_argument("--progress", action="store_true")
        q.add_argument("--out")
        if name == "triplets":
            q.add_argument("--mub1", required=True)
            q.add_argument("--checkpoint")
    s.set_defaults(func=cmd_search)

    df = sub.add_parser("defect", help="defect and the expansion around D(0)")
    dsub = df.add_subparsers(dest="action", required=True)
    q = dsub.add_parser("compute")
    q.add_argument("matrix")
    q.add_argument("--out")
    q = dsub.add_parser("dita-expand")
    q.add_argument("--seed", dest="seed_values", required=True, help="a,b,c,d")
    q.add_argument("--order", type=int, default=3, choices=(1, 2, 3))
    q.add_argument("--out")
    q = dsub.add_parser("scan-hermitian")
    q.add_argument("--samples", type=int, default=100)
    q.add_argument("--out")
    df.set_defaults(func=cmd_defect)

    r = sub.add_parser("reproduce", help="run reproduction suites")
    r.add_argument("sections", nargs="*")
    r.add_argument("--out-dir")
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.INFO if (args.verbose or getattr(args, "progress", False) or getattr(args, "big", False)
                             or args.command == "reproduce") else logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig(args)
        return args.func(args, cfg)
    except (HMKError, ValueError, OSError) as exc:
        print(f"hmk: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
