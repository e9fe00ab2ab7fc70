"""Command-line front end.

Exit codes:

    0  success
    1  a check failed
    2  bad configuration or unparsable input
    3  root window (--kbound) too small
    4  word outside the supported rewriting strategy
    5  counting case not covered (eps = +1 from the origin)
    6  a membership certificate came back "unknown"
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactalg import Field, ParseError
from .galleries import (
    NotCentrifugal,
    ProblematicCase,
    TooLarge,
    brute_force_liftings,
    count_liftings_poly,
    random_centrifugal_gallery,
    segment_count,
)
from .heckepath import (
    SCHEMA,
    BoundExceeded,
    NotLambdaPath,
    PiecewisePath,
    Superdecoration,
    crossing_bound,
    validate_superdecoration,
    verify_hecke,
)
from .sl2engine import StrategyInapplicable, counterexample_report, named_word, retract_segment

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_BOUND, EXIT_STRATEGY, EXIT_PROBLEMATIC, EXIT_UNKNOWN = range(7)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    field: Field
    depth: int
    k_bound: int | None
    emit: str
    seed: int
    out: str | None

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        try:
            field = Field.parse(ns.field)
        except (ValueError, ParseError) as e:
            raise ConfigError(f"--field: {e}") from None
        if ns.depth < 1:
            raise ConfigError("--depth must be positive")
        if ns.kbound is not None and ns.kbound < 0:
            raise ConfigError("--kbound must be non-negative")
        return cls(field, ns.depth, ns.kbound, ns.emit, ns.seed, ns.out)


def _dump(obj: dict) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _csv(rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _write(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ParseError(f"{path}: {e}") from None
    if not isinstance(d, dict):
        raise ParseError(f"{path}: expected a JSON object")
    if d.get("schema", SCHEMA) != SCHEMA:
        raise ParseError(f"{path}: unsupported schema {d.get('schema')!r}")
    return d


def _parse_range(text: str) -> tuple[Fraction, Fraction]:
    try:
        lo, hi = text.split(":")
        lo, hi = Fraction(lo), Fraction(hi)
    except ValueError:
        raise ConfigError(f"--range expects lo:hi, got {text!r}") from None
    if not (0 <= lo < hi <= 1):
        raise ConfigError("--range needs 0 <= lo < hi <= 1")
    return lo, hi


def _parse_qs(text: str) -> list[int]:
    try:
        qs = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--q expects a comma-separated list of integers, got {text!r}") from None
    if not qs or any(q < 2 for q in qs):
        raise ConfigError("--q values must be integers >= 2")
    return qs


# ---------------------------------------------------------------------------
# svg

def path_svg(path: PiecewisePath, folds: Sequence = (), size: int = 480, max_k: int = 12) -> str:
    """The path in the (x, y) plane over walls x + k*y + m = 0 (thin lines), folds as dots."""
    pts = [(float(v.x), float(v.y)) for v in path.vertices]
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    pad = 0.25
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad
    span = max(x1 - x0, y1 - y0)
    sc = size / span

    def X(x):
        return (x - x0) * sc

    def Y(y):
        return (y1 - y) * sc

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    K = min(max_k, crossing_bound(path) + 2)
    for k in range(-K, K + 1):
        # wall x = -k*y - m, drawn where it crosses the box
        lo_m = int(min(-x - k * y for x in (x0, x1) for y in (y0, y1))) - 1
        hi_m = int(max(-x - k * y for x in (x0, x1) for y in (y0, y1))) + 1
        for m in range(lo_m, hi_m + 1):
            xa, xb = -k * y0 - m, -k * y1 - m
            if max(xa, xb) < x0 or min(xa, xb) > x1:
                continue
            out.append(
                f'<line x1="{X(xa):.2f}" y1="{Y(y0):.2f}" x2="{X(xb):.2f}" y2="{Y(y1):.2f}" '
                'stroke="#ccc" stroke-width="0.5"/>'
            )
    poly = " ".join(f"{X(x):.2f},{Y(y):.2f}" for x, y in pts)
    out.append(f'<polyline points="{poly}" fill="none" stroke="#1f4e99" stroke-width="2"/>')
    for p in folds:
        out.append(f'<circle cx="{X(float(p.x)):.2f}" cy="{Y(float(p.y)):.2f}" r="4" fill="#c0392b"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# commands

def cmd_verify_hecke(ns, cfg: RunConfig) -> int:
    path = PiecewisePath.from_json(_load_json(ns.path_file))
    rep = verify_hecke(path, cfg.k_bound)
    if cfg.emit == "json":
        _write(cfg, _dump(rep.to_json()))
    elif cfg.emit == "csv":
        rows = [["t", "x", "y", "chain"]]
        rows += [[str(f.t), str(f.point.x), str(f.point.y), "" if f.chain is None else " ".join(str(r) for r in f.chain.roots)]
                 for f in rep.folds]
        _write(cfg, _csv(rows))
    elif cfg.emit == "svg":
        _write(cfg, path_svg(path, [f.point for f in rep.folds]))
    else:
        _write(cfg, "\n".join(rep.lines()) + "\n")
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_retract(ns, cfg: RunConfig) -> int:
    lo, hi = _parse_range(ns.range)
    try:
        word = named_word(ns.word, cfg.field)
    except ValueError as e:
        raise ParseError(str(e)) from None
    res = retract_segment(word, lo, hi, field=cfg.field, k_bound=cfg.k_bound)
    rep = verify_hecke(res.path, cfg.k_bound)
    check = validate_superdecoration(res.superdecoration)
    ok = rep.ok and check.ok
    if cfg.emit == "json":
        d = res.to_json()
        d["hecke_ok"] = rep.ok
        d["superdecoration"] = res.superdecoration.to_json()
        d["superdecoration_ok"] = check.ok
        _write(cfg, _dump(d))
    elif cfg.emit == "csv":
        verts = res.path.vertices
        rows = [["t0", "t1", "segment_t0", "segment_t1", "weyl", "map", "x0", "y0", "x1", "y1"]]
        for i, (pc, m) in enumerate(zip(res.path.pieces, res.maps)):
            rows.append([str(pc.t0), str(pc.t1), str(res.t_of(pc.t0)), str(res.t_of(pc.t1)), pc.w.word or "e", str(m),
                         str(verts[i].x), str(verts[i].y), str(verts[i + 1].x), str(verts[i + 1].y)])
        _write(cfg, _csv(rows))
    elif cfg.emit == "svg":
        _write(cfg, path_svg(res.path, res.fold_points))
    else:
        lines = [f"retract {ns.word or '(empty word)'} on [{lo}, {hi}]: {len(res.path.pieces)} pieces, "
                 f"{len(res.fold_points)} folding points"]
        for pc, m in zip(res.path.pieces, res.maps):
            lines.append(f"  [{res.t_of(pc.t0)}, {res.t_of(pc.t1)}]  {m}")
        for t, p in zip(res.fold_times_t, res.fold_points):
            lines.append(f"  fold at t={t}: {p}")
        lines.append(f"  verify-hecke: {'PASS' if rep.ok else 'FAIL'}; superdecoration: {'valid' if check.ok else 'INVALID'}")
        _write(cfg, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def _load_superdecoration(path: str) -> Superdecoration:
    d = _load_json(path)
    if "superdecoration" in d:
        d = d["superdecoration"]
    try:
        return Superdecoration.from_json(d)
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"{path}: malformed superdecoration ({e})") from None


def cmd_count(ns, cfg: RunConfig) -> int:
    sd = _load_superdecoration(ns.superdecoration_file)
    check = validate_superdecoration(sd)
    if not check.ok:
        for line in check.lines():
            print(line, file=sys.stderr)
        return EXIT_FAIL
    poly = segment_count(sd)
    qs = [] if ns.symbolic and ns.q is None else _parse_qs(ns.q or "2,3,4")
    values = {q: poly.eval(q) for q in qs}
    oracle = {}
    ok = True
    if ns.oracle:
        for q in qs:
            try:
                brute = q ** sd.m0_doubleprime
                for it in sd.items:
                    brute *= brute_force_liftings(it.gallery, it.c_minus, q)
            except TooLarge as e:
                oracle[q] = f"skipped ({e})"
                continue
            oracle[q] = brute
            ok = ok and brute == values[q]
    if cfg.emit == "json":
        _write(cfg, _dump({"schema": SCHEMA, "count": str(poly), **poly.to_json(),
                           "values": {str(q): v for q, v in values.items()},
                           "oracle": {str(q): v for q, v in oracle.items()}, "ok": ok}))
    elif cfg.emit == "csv":
        rows = [["q", "value", "oracle"]] + [[q, values[q], oracle.get(q, "")] for q in qs]
        _write(cfg, _csv(rows))
    else:
        lines = [str(poly)]
        lines += [f"q={q}: {values[q]}" + (f" (oracle {oracle[q]})" if q in oracle else "") for q in qs]
        _write(cfg, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_counterexample(ns, cfg: RunConfig) -> int:
    rep = counterexample_report(cfg.field, cfg.depth)
    if cfg.emit == "json":
        _write(cfg, _dump(rep.to_json()))
    elif cfg.emit == "csv":
        _write(cfg, _csv([["check", "verdict", "detail"]] + [[l.name, l.verdict, l.detail] for l in rep.lines]))
    else:
        _write(cfg, "\n".join(rep.text()) + "\n")
    if rep.ok:
        return EXIT_OK
    return EXIT_UNKNOWN if rep.has_unknown and not any(l.verdict == "FAIL" for l in rep.lines) else EXIT_FAIL


def cmd_selfcheck(ns, cfg: RunConfig) -> int:
    """Random centrifugal galleries: closed-form count against brute force."""
    rng = random.Random(cfg.seed)
    qs = _parse_qs(ns.q or "2,3,4,5")
    bad = []
    for i in range(ns.trials):
        g, c = random_centrifugal_gallery(rng, 8)
        poly = count_liftings_poly(g, c)
        for q in qs:
            if poly.eval(q) != brute_force_liftings(g, c, q):
                bad.append((i, q))
    summary = {"schema": SCHEMA, "seed": cfg.seed, "trials": ns.trials, "q": qs, "mismatches": len(bad)}
    if cfg.emit == "json":
        _write(cfg, _dump(summary))
    else:
        _write(cfg, f"selfcheck seed={cfg.seed}: {ns.trials} galleries, {len(bad)} mismatches\n")
    return EXIT_OK if not bad else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default="rational", help="rational | fp:<p>")
    common.add_argument("--depth", type=int, default=32, help="series truncation depth")
    common.add_argument("--kbound", type=int, default=None, help="root window |k| (default: sufficient bound)")
    common.add_argument("--emit", choices=("text", "json", "csv", "svg"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write output to a file")

    p = argparse.ArgumentParser(prog="masure-lab", description="Hecke paths and retractions in the SL2 masure.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-hecke", parents=[common], help="check a path JSON file")
    s.add_argument("path_file")
    s.set_defaults(func=cmd_verify_hecke)

    s = sub.add_parser("retract", parents=[common], help="retract a named word times a vertical segment")
    s.add_argument("word", nargs="?", default="", help="gN:<N> | gprimeN:<N> | empty")
    s.add_argument("--range", default="0:1", help="segment parameter range lo:hi")
    s.set_defaults(func=cmd_retract)

    s = sub.add_parser("count", parents=[common], help="count segments from a superdecoration file")
    s.add_argument("superdecoration_file")
    s.add_argument("--q", default=None, help="comma-separated q values")
    s.add_argument("--symbolic", action="store_true", help="print only the polynomial unless --q is given")
    s.add_argument("--oracle", action="store_true", help="compare with brute-force enumeration")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("counterexample", parents=[common], help="run the counter-example checks")
    s.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("selfcheck", parents=[common], help="randomized counting oracle comparison")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--q", default=None)
    s.set_defaults(func=cmd_selfcheck)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code else EXIT_OK
    try:
        cfg = RunConfig.from_args(ns)
        return ns.func(ns, cfg)
    except ConfigError as e:
        print(f"masure-lab: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (ParseError, NotLambdaPath) as e:
        print(f"masure-lab: parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except BoundExceeded as e:
        print(f"masure-lab: {e}", file=sys.stderr)
        return EXIT_BOUND
    except StrategyInapplicable as e:
        print(f"masure-lab: unsupported word: {e}", file=sys.stderr)
        return EXIT_STRATEGY
    except ProblematicCase as e:
        print(f"masure-lab: {e}", file=sys.stderr)
        return EXIT_PROBLEMATIC
    except NotCentrifugal as e:
        print(f"masure-lab: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
