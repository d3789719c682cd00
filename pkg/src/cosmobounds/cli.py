"""Command-line interface.

Subcommands::

    cosmobounds bounds --input data.csv --t 0,1,5
    cosmobounds model --n 3 --beta 3 --t 0:2:5
    cosmobounds evolve --spec spacetime.json --t 0:5:11
    cosmobounds evolve --theta0 3 --ricci zero --t 2 --step 1e-3
    cosmobounds gen-area --n 3 --beta 3 --T 1
    cosmobounds counterexample --p 1 --n 3 --t 3 --j 1,100
    cosmobounds verify

Every output starts with a ``#`` line echoing the resolved configuration.
Exit codes: 0 success, 1 validation error, 2 failed verification, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import congruence as cg
from . import counterexample as cx
from . import integral_bounds as ib
from . import level_sets as ls
from . import verify as vf
from .errors import CosmoBoundsError, ValidationError
from .initial_data import initial_data_from_dict, load_initial_data
from .model_geometry import (ModelGeometry, model_area, model_mean_curvature, model_volume,
                             scale_factor)

EXIT_OK, EXIT_VALIDATION, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def parse_grid(text: str) -> list:
    """``"1"``, ``"0,1,5"`` or ``"start:stop:num"`` (inclusive linspace)."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, num = text.split(":")
            num = int(num)
            if num < 1:
                raise ValueError
            return [float(x) for x in np.linspace(float(start), float(stop), num)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"cannot parse grid {text!r}; use 't', 't1,t2,...' or 'start:stop:num'") from None


def parse_ints(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"cannot parse integer list {text!r}") from None


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def render(header: list, rows: list, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
        return buf.getvalue()
    cells = [[str(h) for h in header]] + [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) + "\n" for r in cells)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def config_echo(args) -> str:
    items = sorted((k, v) for k, v in vars(args).items() if k not in ("func",) and v is not None)
    return "# cosmobounds " + " ".join(f"{k}={v}" for k, v in items) + "\n"


class Output:
    """Collects the config echo, optional ``#`` notes and the body."""

    def __init__(self, args):
        self.args = args
        self.notes = []

    def note(self, key, value):
        self.notes.append((key, value))

    def emit(self, body: str, payload: dict = None):
        fmt = self.args.format
        if fmt == "json":
            doc = {"config": {k: v for k, v in sorted(vars(self.args).items()) if k != "func"}}
            doc.update({k: v for k, v in self.notes})
            doc.update(payload or {})
            body = json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"
            text = config_echo(self.args) + body
        else:
            text = config_echo(self.args) + "".join(f"# {k}={_fmt(v)}\n" for k, v in self.notes) + body
        if self.args.output:
            Path(self.args.output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)


# ---------------------------------------------------------------- commands

def _load_data(args):
    path = Path(args.input)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        try:
            data = initial_data_from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON: {exc}") from exc
        if args.n is not None and args.n != data.n:
            raise ValidationError(f"dimension mismatch: file has n={data.n}, --n {args.n}")
        return data
    return load_initial_data(io.StringIO(text), n=args.n, label=path.name)


def cmd_bounds(args) -> int:
    data = _load_data(args)
    ts = parse_grid(args.t)
    area = [ib.area_report(data, t) for t in ts]
    volume = [ib.volume_report(data, t) for t in ts]
    out = Output(args)
    out.note("cells", len(data))
    out.note("total_area", data.total_area)
    out.note("sec_assumed", True)
    reports = area if args.quantity == "area" else volume
    body = render(ib.sweep_header(data.n), ib.sweep_rows(reports), args.format)
    out.emit(body, {"data": data.to_dict(),
                    "area": [r.to_dict() for r in area],
                    "volume": [r.to_dict() for r in volume]})
    return EXIT_OK


def cmd_model(args) -> int:
    m = ModelGeometry(args.n, args.beta)
    header = ["t", "scale_factor", "mean_curvature", "area", "volume", "envelope"]
    rows = []
    for t in parse_grid(args.t):
        env = cg.comparison_envelope(m.beta, m.n, t) if m.beta > 0 else None
        rows.append([t, scale_factor(m, t), model_mean_curvature(m, t),
                     model_area(m, args.base_area, t), model_volume(m, args.base_area, t), env])
    out = Output(args)
    out.emit(render(header, rows, args.format),
             {"rows": [dict(zip(header, r)) for r in rows]})
    return EXIT_OK


def _evolve_spec(args) -> int:
    st = cg.load_spacetime(Path(args.spec).read_text(encoding="utf-8"))
    ts = parse_grid(args.t)
    if len(ts) < 2:
        ts = list(np.linspace(0.0, ts[0], 11)) if ts else [0.0, 1.0]
    sec = cg.sec_check(st, ts)
    data = cg.induced_initial_data(st)
    beta = float(np.max(np.maximum(data.mean_curvature, 0.0)))
    areas = [cg.evolve_flrw_areas(st, None, t) for t in ts]
    quot = cg.monotone_quotient_check(ts, areas, beta, st.n)
    bounds = [ib.area_bound_exact(data, t) for t in ts]
    out = Output(args)
    out.note("sec_passed", sec.passed)
    out.note("beta", beta)
    out.note("quotient_max_increase", quot.max_increase)
    out.note("quotient_passed", quot.passed)
    header = ["t", "area", "bound_exact", "quotient"]
    rows = [[t, a, b, float(q)] for t, a, b, q in zip(ts, areas, bounds, quot.quotients)]
    out.emit(render(header, rows, args.format),
             {"sec_violations": sec.violations, "rows": [dict(zip(header, r)) for r in rows]})
    if not sec.passed:
        return EXIT_VERIFY
    return EXIT_OK


def _evolve_trajectory(args) -> int:
    ricci = cg.RicciProfile.parse(args.ricci)
    t_end = parse_grid(args.t)[-1]
    traj = cg.integrate_raychaudhuri(args.theta0, ricci, args.n, t_end, args.step)
    out = Output(args)
    out.note("focal_time", traj.focal_time)
    out.note("sec", traj.sec)
    beta = args.beta if args.beta is not None else args.theta0
    envelope = None
    if beta > 0:
        if traj.sec:
            out.note("envelope_violation", cg.envelope_violation(traj, beta, args.n))
        quot = cg.monotone_quotient_check(traj.taus, traj.areas, beta, args.n)
        out.note("quotient_max_increase", quot.max_increase)
        envelope = [cg.comparison_envelope(beta, args.n, float(t)) for t in traj.taus]
    header = ["tau", "theta", "A", "envelope"]
    rows = [[float(t), float(th), float(a), None if envelope is None else envelope[i]]
            for i, (t, th, a) in enumerate(zip(traj.taus, traj.thetas, traj.areas))]
    out.emit(render(header, rows, args.format), {"trajectory": traj.to_dict()})
    return EXIT_OK


def cmd_evolve(args) -> int:
    if args.spec:
        return _evolve_spec(args)
    if args.theta0 is None or args.n is None:
        raise ValidationError("evolve needs either --spec or both --theta0 and --n")
    return _evolve_trajectory(args)


def _load_history(args) -> ls.AreaHistory:
    if args.history:
        ts, areas = [], []
        with open(args.history, encoding="utf-8", newline="") as fh:
            reader = csv.reader(line for line in fh if not line.startswith("#"))
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:2]] != ["t", "area"]:
                raise ValidationError(f"{args.history}: expected header 't,area'")
            for lineno, row in enumerate(reader, start=2):
                try:
                    ts.append(float(row[0]))
                    areas.append(float(row[1]))
                except (IndexError, ValueError):
                    raise ValidationError(f"{args.history}: malformed row {lineno}: {row!r}") from None
        return ls.AreaHistory.from_samples(ts, areas, kind=args.interp, label=args.history)
    if args.n is None or args.beta is None:
        raise ValidationError("gen-area needs --history or both --n and --beta")
    t_max = args.T * 2 if args.T > 0 else 1.0
    return ls.AreaHistory.model(ModelGeometry(args.n, args.beta), args.base_area, t_max)


def cmd_gen_area(args) -> int:
    hist = _load_history(args)
    kw = dict(h0=args.h0, ratio=args.ratio, count=args.count, tail_fraction=args.tail_fraction)
    est = ls.generalized_area(hist, args.T, **kw)
    s_T = hist(args.T) if args.s_T is None else args.s_T
    lim = ls.left_limsup(hist, args.T, **kw)
    verdict = ls.sandwich_check(s_T, est, lim, args.tol)
    out = Output(args)
    for key, value in (("estimate", est.estimate), ("s_T", s_T), ("left_limsup", lim),
                       ("lower_margin", verdict.lower_margin), ("upper_margin", verdict.upper_margin),
                       ("sandwich_passed", verdict.passed), ("truncated", est.truncated),
                       ("clipped", est.clipped)):
        out.note(key, value)
    rows = [[h, q] for h, q in zip(est.h_schedule, est.quotients)]
    out.emit(render(["h", "quotient"], rows, args.format), {"generalized_area": est.to_dict()})
    return EXIT_OK if verdict.passed else EXIT_VERIFY


def cmd_counterexample(args) -> int:
    t = parse_grid(args.t)[-1]
    report = cx.divergence_report(args.p, args.n, t, parse_ints(args.j))
    out = Output(args)
    out.note("first_violation", report.first_violation)
    out.note("certified", report.certified)
    rows = [[r["j"], r["area"], r["bound"], r["ratio"]] for r in report.rows]
    out.emit(render(["j", "area", "bound", "ratio"], rows, args.format), {"report": report.to_dict()})
    return EXIT_OK


def cmd_verify(args) -> int:
    results = vf.run_all(args.seed)
    out = Output(args)
    out.note("passed", sum(r.passed for r in results))
    out.note("total", len(results))
    rows = [[r.number, r.name, "PASS" if r.passed else "FAIL", r.detail] for r in results]
    out.emit(render(["#", "check", "result", "detail"], rows, args.format),
             {"checks": [dict(number=r.number, name=r.name, passed=r.passed, detail=r.detail)
                         for r in results]})
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cosmobounds",
                description="Area and volume bounds for cosmological-time level sets.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--format", choices=["table", "csv", "json"], default="table")
        sp.add_argument("--output", default=None, help="write to this file instead of stdout")

    sp = sub.add_parser("bounds", help="area/volume bound sweep for an initial data file")
    sp.add_argument("--input", required=True, help="CSV (id,weight,H[,K]) or JSON data set")
    sp.add_argument("--n", type=int, default=None, help="dimension if the file has no '# n=' line")
    sp.add_argument("--t", default="1", help="time grid: t, t1,t2,... or start:stop:num")
    sp.add_argument("--quantity", choices=["area", "volume"], default="area")
    common(sp)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("model", help="model geometry areas, volumes and envelope")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--base-area", type=float, default=1.0)
    sp.add_argument("--t", default="0:2:5")
    common(sp)
    sp.set_defaults(func=cmd_model)

    sp = sub.add_parser("evolve", help="evolve a spacetime spec or a single congruence fiber")
    sp.add_argument("--spec", default=None, help="JSON spacetime spec")
    sp.add_argument("--theta0", type=float, default=None)
    sp.add_argument("--ricci", default="zero", help="zero, constant:<rho> or a number")
    sp.add_argument("--beta", type=float, default=None, help="envelope beta (default theta0)")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--t", default="0:1:11", help="time grid (spec) or end time (fiber)")
    sp.add_argument("--step", type=float, default=1e-3)
    common(sp)
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("gen-area", help="generalized area and sandwich check")
    sp.add_argument("--history", default=None, help="CSV with header t,area")
    sp.add_argument("--interp", choices=["cubic", "linear"], default="cubic")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--base-area", type=float, default=1.0)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--s-T", type=float, default=None, help="|S_T| (default: history at T)")
    sp.add_argument("--h0", type=float, default=None)
    sp.add_argument("--ratio", type=float, default=0.5)
    sp.add_argument("--count", type=int, default=20)
    sp.add_argument("--tail-fraction", type=float, default=0.5)
    sp.add_argument("--tol", type=float, default=1e-4, help="absolute sandwich tolerance")
    common(sp)
    sp.set_defaults(func=cmd_gen_area)

    sp = sub.add_parser("counterexample", help="L^p insufficiency divergence report")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", default="3")
    sp.add_argument("--j", default="1,10,100,1000")
    common(sp)
    sp.set_defaults(func=cmd_counterexample)

    sp = sub.add_parser("verify", help="run the oracle acceptance suite")
    sp.add_argument("--seed", type=int, default=vf.DEFAULT_SEED)
    common(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CosmoBoundsError as exc:
        print(f"cosmobounds {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"cosmobounds {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
