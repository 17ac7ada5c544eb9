"""Command-line front end.

Verbs: check | shadow | scan | lift | expansive | quantize | gen.

Every emitted report embeds a run manifest (command, seed, tolerance,
depth, timestamp, input digests); identical manifests reproduce identical
output bytes.  The timestamp therefore defaults to a fixed epoch string
and is only ever what the caller passes via --timestamp.  Floats are
rounded to 12 significant digits and printed in shortest round-trip form;
exact rationals are printed as "p/q" strings.  Normalized units are used
everywhere; --raw-units echoes the raw equivalents for interval systems.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .errors import ResourceGuardError, SvdynError
from .expansive import certify_expansive, check_expansive_lift, quantize
from .lifting import lift_inverse, lift_pseudo_orbit, shadow_inverse
from .orbits import (DEFAULT_DEPTH, OrbitSegment, PseudoOrbit,
                     generate_pseudo_orbit, validate_orbit)
from .shadowing import (PROPERTY_HOLDS, SHADOWED, decide_finite_shadowing,
                        decide_shadowing_property, max_shadowing_slack,
                        nstep_criterion)
from .space import TOL, FiniteSpace, IntervalSpace, as_fraction
from .svmap import (FiniteRelation, PiecewiseLinear, folded_doubling_map,
                    symmetrize, tent_family)

EPOCH = "1970-01-01T00:00:00Z"


# ---------------------------------------------------------------------------
# serialization helpers


def _fmt(value):
    """Deterministic JSON-ready form: rationals as 'p/q', floats rounded to
    12 significant digits (then shortest round-trip via repr)."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}" if value.denominator != 1 \
            else str(value.numerator)
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _fmt(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_fmt(v) for v in value]
    return value


def _dump(obj) -> str:
    return json.dumps(_fmt(obj), sort_keys=True, indent=2) + "\n"


def _digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _manifest(args, command: str, inputs) -> dict:
    return {
        "command": command,
        "seed": getattr(args, "seed", None),
        "tolerance": TOL,
        "depth": DEFAULT_DEPTH,
        "timestamp": args.timestamp,
        "inputs": {p: _digest(p) for p in inputs if p},
    }


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_number(s):
    return as_fraction(str(s))


# ---------------------------------------------------------------------------
# system files


def load_system(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return system_from_dict(doc)


def system_from_dict(doc: dict):
    if "preset" in doc:
        name = doc["preset"]
        if name == "folded_doubling":
            return folded_doubling_map()
        if name == "tent":
            return tent_family(float(doc.get("c", 2.0)))
        if name == "symmetrized_tent":
            return symmetrize(tent_family(float(doc.get("c", 2.0))))
        raise SvdynError(f"unknown preset {name!r}")
    space_doc = doc["space"]
    map_doc = doc["map"]
    if "points" in space_doc:
        labels = space_doc.get("labels")
        space = FiniteSpace(space_doc["points"],
                            [[_parse_number(d) for d in row]
                             for row in space_doc["dist"]],
                            labels={k: _parse_number(v)
                                    for k, v in labels.items()} if labels else None)
        if map_doc.get("kind", "relation") != "relation":
            raise SvdynError("finite spaces require a relation map")
        return FiniteRelation(space, map_doc["images"])
    if "interval" in space_doc:
        components = [tuple(space_doc["interval"])]
    else:
        components = [tuple(c) for c in space_doc["components"]]
    space = IntervalSpace(components)
    if map_doc.get("kind") != "piecewise":
        raise SvdynError("interval spaces require a piecewise map")
    grouped = {}
    for br in map_doc["branches"]:
        dom = (float(br["domain"][0]), float(br["domain"][1]))
        grouped.setdefault(dom, []).append(
            (float(br["affine"][0]), float(br["affine"][1])))
    branches = [(lo, hi, tuple(pieces)) for (lo, hi), pieces in grouped.items()]
    exceptions = [(float(e["x"]), [float(v) for v in e["image"]])
                  for e in map_doc.get("exceptions", [])]
    return PiecewiseLinear(space, branches, exceptions)


def system_to_dict(F) -> dict:
    if isinstance(F, FiniteRelation):
        sp = F.space
        return {
            "space": {
                "points": list(sp.points),
                "dist": [[_fmt(d) for d in row] for row in sp._dist],
                **({"labels": {k: _fmt(v) for k, v in sp.labels.items()}}
                   if sp.labels else {}),
            },
            "map": {"kind": "relation",
                    "images": {p: list(img) for p, img in F.images.items()}},
        }
    return {
        "space": {"components": [list(c) for c in F.space.components]},
        "map": {
            "kind": "piecewise",
            "branches": [
                {"domain": [br.lo, br.hi], "affine": [a, b]}
                for br in F.branches for a, b in br.pieces
            ],
            "exceptions": [
                {"x": x, "image": list(values)} for x, values in F.exceptions
            ],
        },
    }


def load_points(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    pts = doc["points"] if isinstance(doc, dict) else doc
    delta = doc.get("delta") if isinstance(doc, dict) else None
    return pts, (_parse_number(delta) if delta is not None else None)


def _coerce_points(F, pts):
    if isinstance(F, FiniteRelation):
        return tuple(pts)
    return tuple(float(x) for x in pts)


def _raw_units(F, report: dict, keys):
    """Echo raw-unit equivalents of normalized quantities (interval only)."""
    if isinstance(F, FiniteRelation):
        return
    scale = F.space.scale
    raw = {}
    for k in keys:
        if report.get(k) is not None:
            raw[k] = float(report[k]) / scale
    report["raw_units"] = raw


# ---------------------------------------------------------------------------
# verbs


def cmd_check(args) -> int:
    F = load_system(args.system)
    predicates = {
        "usc": F.is_usc(),
        "lsc": F.is_lsc(),
        "continuous": F.is_continuous(),
        "open": F.is_open(),
        "onto": F.is_onto(),
        "closed": F.is_closed(),
    }
    report = {
        "manifest": _manifest(args, "check", [args.system]),
        "predicates": predicates,
    }
    if isinstance(F, PiecewiseLinear):
        evidence = []
        for p in F.breakpoints():
            left, right, lex, rex = F._side_limits(p)
            evidence.append({
                "x": p,
                "image": list(F.value_list(p)),
                "left_limits": list(left) if lex else None,
                "right_limits": list(right) if rex else None,
            })
        report["breakpoints"] = evidence
    _emit(args, _dump(report))
    return 0


def _obtain_pseudo_orbit(args, F):
    if args.orbit:
        pts, delta = load_points(args.orbit)
        pts = _coerce_points(F, pts)
        delta = delta if delta is not None else _parse_number(args.delta or "1")
        return PseudoOrbit(F, pts, delta if F.space.is_finite else float(delta))
    if args.gen:
        delta, length, seed = args.gen
        delta = _parse_number(delta)
        if not F.space.is_finite:
            delta = float(delta)
        return generate_pseudo_orbit(F, delta, int(length), int(seed))
    raise SvdynError("provide --orbit FILE or --gen DELTA LENGTH SEED")


def cmd_shadow(args) -> int:
    F = load_system(args.system)
    p = _obtain_pseudo_orbit(args, F)
    eps = _parse_number(args.eps)
    if not F.space.is_finite:
        eps = float(eps)
    rep = decide_finite_shadowing(F, p, eps)
    report = {
        "manifest": _manifest(args, "shadow",
                              [args.system, args.orbit]),
        "epsilon": eps,
        "delta": p.delta,
        "pseudo_orbit": list(p.points),
        "verdict": rep.verdict,
        "witness": list(rep.witness.points) if rep.witness else None,
        "nodes": rep.nodes,
    }
    _raw_units(F, report, ["epsilon", "delta"])
    _emit(args, _dump(report))
    return 0 if rep.verdict == SHADOWED else 2


def _scan_cell(F, eps, delta):
    try:
        rep = decide_shadowing_property(F, eps, delta)
        witness_len = len(rep.counterexample) if rep.counterexample else 0
        return (rep.verdict, witness_len, rep.nodes)
    except ResourceGuardError:
        return ("skipped", 0, 0)


def cmd_scan(args) -> int:
    F = load_system(args.system)
    if not isinstance(F, FiniteRelation):
        raise SvdynError("scan requires a finite (or quantized) system")
    eps_grid = [_parse_number(s) for s in args.eps_grid.split(",")]
    buf = io.StringIO()
    manifest = _manifest(args, "scan", [args.system])
    buf.write("# manifest " + json.dumps(_fmt(manifest), sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["eps", "delta", "verdict", "witness_len", "nodes", "seed"])
    threads = max(1, int(os.environ.get("SVDYN_THREADS", "1")))
    if args.delta_star:
        cells = [(eps,) for eps in eps_grid]

        def run_star(cell):
            (eps,) = cell
            try:
                return (eps, max_shadowing_slack(F, eps), "delta_star", 0, 0)
            except ResourceGuardError:
                return (eps, "", "skipped", 0, 0)

        results = _parallel_map(run_star, cells, threads)
        for eps, value, verdict, wl, nodes in results:
            writer.writerow([_csv_num(eps), _csv_num(value), verdict, wl, nodes,
                             args.seed if args.seed is not None else ""])
    else:
        delta_grid = [_parse_number(s) for s in args.delta_grid.split(",")]
        cells = [(eps, delta) for eps in eps_grid for delta in delta_grid]

        def run_cell(cell):
            eps, delta = cell
            verdict, wl, nodes = _scan_cell(F, eps, delta)
            return (eps, delta, verdict, wl, nodes)

        results = _parallel_map(run_cell, cells, threads)
        for eps, delta, verdict, wl, nodes in results:
            writer.writerow([_csv_num(eps), _csv_num(delta), verdict, wl, nodes,
                             args.seed if args.seed is not None else ""])
    _emit(args, buf.getvalue())
    return 0


def _parallel_map(fn, cells, threads):
    if threads <= 1 or len(cells) <= 1:
        return [fn(c) for c in cells]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, cells))


def _csv_num(v) -> str:
    if isinstance(v, Fraction):
        return f"{float(v):.12g}"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def cmd_lift(args) -> int:
    F = load_system(args.system)
    p = _obtain_pseudo_orbit(args, F)
    delta = _parse_number(args.delta)
    if not F.space.is_finite:
        delta = float(delta)
    report = {
        "manifest": _manifest(args, "lift", [args.system, args.orbit]),
        "mode": args.mode,
        "delta": delta,
        "pseudo_orbit": list(p.points),
    }
    ok = True
    if args.mode == "shift":
        lifted, rep = lift_pseudo_orbit(F, p, delta)
        report.update(_lift_report_dict(rep))
        report["heads"] = [u.head for u in lifted]
        ok = rep.ok
    elif args.mode == "inv":
        lifted, rep = lift_inverse(F, p, delta)
        report.update(_lift_report_dict(rep))
        report["heads"] = [u.head for u in lifted]
        ok = rep.ok
    elif args.mode == "inverse-shadow":
        eps = _parse_number(args.eps)
        if not F.space.is_finite:
            eps = float(eps)
        out = shadow_inverse(F, p, eps,
                             delta=delta if args.delta else None)
        dists = [F.space.dist(a, b) for a, b in zip(out.points, p.points)]
        report["witness"] = list(out.points)
        report["max_distance"] = max(dists)
        report["epsilon"] = eps
        ok = True
    elif args.mode == "nstep":
        eps = _parse_number(args.eps)
        if not F.space.is_finite:
            eps = float(eps)
        rep = nstep_criterion(F, eps, p=p, steps=args.steps)
        report["epsilon"] = eps
        report["steps"] = rep.steps
        report["chain"] = list(rep.deltas)
        report["distances"] = list(rep.distances)
        report["bound"] = rep.bound
        report["chain_ok"] = rep.chain_ok
        report["variants"] = rep.variants
        ok = rep.chain_ok
    else:
        raise SvdynError(f"unknown lift mode {args.mode!r}")
    _raw_units(F, report, ["delta", "epsilon"])
    _emit(args, _dump(report))
    return 0 if ok else 2


def _lift_report_dict(rep) -> dict:
    return {
        "beta": list(rep.beta),
        "bounds": list(rep.bounds),
        "ok": rep.ok,
        "failing_index": rep.failing_index,
        "chain": {
            "delta": rep.chain.delta,
            "depth": rep.chain.depth,
            "deltas": list(rep.chain.deltas),
        } if rep.chain else None,
    }


def cmd_expansive(args) -> int:
    F = load_system(args.system)
    delta = _parse_number(args.delta)
    cert = certify_expansive(F, delta, grid_evidence=bool(F.space.labels))
    report = {
        "manifest": _manifest(args, "expansive", [args.system]),
        "delta": delta,
        "verdict": cert.verdict,
        "surviving_nodes": cert.surviving_nodes,
        "grid_evidence": cert.grid_evidence,
    }
    if cert.grid_evidence:
        report["caveat"] = ("verdict certified on a quantized grid; "
                            "evidence, not a proof, for the interval system")
    if cert.witness_pair:
        sx, sy = cert.witness_pair
        report["witness"] = {
            "first": list(sx.points),
            "second": list(sy.points),
            "cycle_start": cert.cycle_start,
        }
    if args.lift_check and cert.expansive:
        lr = check_expansive_lift(F, delta, samples=args.samples,
                                  depth=args.depth, seed=args.seed or 0)
        report["lift_check"] = {
            "samples": lr.samples,
            "separated": lr.separated,
            "max_horizon": lr.max_horizon,
            "inconclusive": list(lr.inconclusive),
            "ok": lr.ok,
        }
    _emit(args, _dump(report))
    return 0 if cert.expansive else 2


def cmd_quantize(args) -> int:
    F = load_system(args.system)
    Q = quantize(F, _parse_number(args.resolution))
    doc = system_to_dict(Q)
    doc["manifest"] = _manifest(args, "quantize", [args.system])
    _emit(args, _dump(doc))
    return 0


def cmd_gen(args) -> int:
    F = load_system(args.system)
    delta = _parse_number(args.delta)
    if not F.space.is_finite:
        delta = float(delta)
    p = generate_pseudo_orbit(F, delta, args.length, args.seed)
    doc = {
        "manifest": _manifest(args, "gen", [args.system]),
        "points": list(p.points),
        "delta": p.delta,
    }
    _emit(args, _dump(doc))
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="svdyn",
        description="set-valued dynamics: shadowing, lifts, expansiveness")
    sub = top.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("system", help="system JSON file")
        p.add_argument("--out", help="write output to this path")
        p.add_argument("--timestamp", default=EPOCH,
                       help="manifest timestamp (fixed default for reproducibility)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--raw-units", action="store_true",
                       help="echo raw-unit values for interval systems")

    p = sub.add_parser("check", help="predicate report")
    common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("shadow", help="decide finite shadowing")
    common(p)
    p.add_argument("--orbit", help="pseudo-orbit JSON file")
    p.add_argument("--gen", nargs=3, metavar=("DELTA", "LEN", "SEED"),
                   help="generate a pseudo-orbit instead of reading one")
    p.add_argument("--eps", required=True)
    p.add_argument("--delta", help="slack recorded for a raw orbit file")
    p.set_defaults(fn=cmd_shadow)

    p = sub.add_parser("scan", help="(eps, delta) property scan to CSV")
    common(p)
    p.add_argument("--eps-grid", required=True)
    p.add_argument("--delta-grid")
    p.add_argument("--delta-star", action="store_true")
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("lift", help="lifting pipelines")
    common(p)
    p.add_argument("--orbit")
    p.add_argument("--gen", nargs=3, metavar=("DELTA", "LEN", "SEED"))
    p.add_argument("--delta", required=True)
    p.add_argument("--eps")
    p.add_argument("--mode", required=True,
                   choices=["shift", "inv", "inverse-shadow", "nstep"])
    p.add_argument("--steps", type=int, default=8)
    p.set_defaults(fn=cmd_lift)

    p = sub.add_parser("expansive", help="expansiveness certificate")
    common(p)
    p.add_argument("--delta", required=True)
    p.add_argument("--lift-check", action="store_true")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--depth", type=int, default=32)
    p.set_defaults(fn=cmd_expansive)

    p = sub.add_parser("quantize", help="grid relation from an interval system")
    common(p)
    p.add_argument("--resolution", required=True)
    p.set_defaults(fn=cmd_quantize)

    p = sub.add_parser("gen", help="generate a seeded pseudo-orbit")
    common(p)
    p.add_argument("--delta", required=True)
    p.add_argument("--length", type=int, required=True)
    p.set_defaults(fn=cmd_gen)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "gen" and args.seed is None:
        print("error: gen requires an explicit --seed", file=sys.stderr)
        return 1
    try:
        return args.fn(args)
    except SvdynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
