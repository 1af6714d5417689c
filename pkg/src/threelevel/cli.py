"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

import numpy as np

from . import oracle, quantifiers, sweep
from ._backend import BACKEND
from .errors import InvalidArgumentError
from .qsystem import STATE_KINDS, DriveParams, dressed_states, evolve, initial_amplitudes

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

PARAM_DEFAULTS = {"vartheta2": 1.0, "vartheta3": 0.3, "delta": 0.04, "phi2": 0.0, "phi3": 0.0}
FIXED_OUTPUTS = {
    "qfi": ("qfi2", "qfi3", "qfi23"),
    "ratio": ("gamma", "var_ind_phi2", "var_ind_phi3", "var_sim_phi2", "var_sim_phi3",
              "delta_ind", "delta_sim", "quantumness"),
    "coherence": ("coherence",),
    "hss": ("hss2", "hss3"),
}
CONFIG_KEYS = (
    "vartheta2", "vartheta3", "delta", "phi2", "phi3", "t_start", "t_end", "t_points",
    "mode", "state", "hss_variant", "step", "vary", "outputs",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common(sub, *, grid=True, mode=True):
    sub.add_argument("--config", help="flat 'key = value' file; flags override it")
    sub.add_argument("--out", help="write output here instead of stdout")
    for name in ("vartheta2", "vartheta3", "delta", "phi2", "phi3"):
        sub.add_argument(f"--{name}", type=float)
    if grid:
        sub.add_argument("--t-start", type=float)
        sub.add_argument("--t-end", type=float)
        sub.add_argument("--t-points", type=int)
    if mode:
        sub.add_argument("--mode", choices=sweep.MODES)
        sub.add_argument("--state", choices=STATE_KINDS)
        sub.add_argument("--hss-variant", choices=quantifiers.HSS_VARIANTS)
        sub.add_argument("--step", type=float, help="finite-difference phase step")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="threelevel", description=__doc__)
    parser.add_argument("--version", action="version", version=f"threelevel ({BACKEND} kernels)")
    subs = parser.add_subparsers(dest="command", parser_class=_Parser)
    subs.required = True

    _common(subs.add_parser("spectrum", help="eigenfrequencies, dressed states and amplitudes"),
            grid=False, mode=False)
    ev = subs.add_parser("evolve", help="state amplitudes over a time grid")
    _common(ev, mode=False)
    ev.add_argument("--state", choices=STATE_KINDS)
    for name, helptext in (("qfi", "QFI matrix entries"), ("ratio", "bounds, total variances and gamma"),
                           ("coherence", "l2 coherence"), ("hss", "Hilbert-Schmidt speeds")):
        _common(subs.add_parser(name, help=helptext))

    sw = subs.add_parser("sweep", help="evaluate chosen quantities over a grid")
    _common(sw)
    sw.add_argument("--vary", help="field=v1,v2,... (one column group per value)")
    sw.add_argument("--outputs", help="comma-separated quantity names: " + ",".join(sweep.QUANTITIES))

    fg = subs.add_parser("figure", help="regenerate the data behind one figure")
    fg.add_argument("which", help="one of " + ", ".join(sweep.FIGURES))
    _common(fg)
    fg.add_argument("--curves", help="comma-separated curve values (vartheta3 or delta)")
    fg.add_argument("--panels", help="comma-separated panel values (fig2: delta)")

    va = subs.add_parser("validate", help="cross-validate closed forms against the oracle")
    va.add_argument("--out", help="JSONL report path")
    for name in ("vartheta2", "vartheta3", "delta", "phi2", "phi3"):
        va.add_argument(f"--{name}", type=float)
    va.add_argument("--grid-points", type=int, default=500)
    va.add_argument("--t-end", type=float, default=sweep.DEFAULT_T_END)
    va.add_argument("--random-sets", type=int, default=0)
    va.add_argument("--seed", type=int, default=0)
    va.add_argument("--state", choices=STATE_KINDS, default="exact")
    va.add_argument("--hss-variant", choices=oracle.HSS_CHOICES, default="auto")
    va.add_argument("--step", type=float, default=oracle.DEFAULT_STEP)
    va.add_argument("--allow-discrepancy", action="store_true")
    va.add_argument("--inject-fault", action="append", choices=oracle.FAULTS, default=[])
    return parser


# ---- option resolution ---------------------------------------------------------------------

def read_config(path: str) -> dict:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read config {path!r}: {exc.strerror}") from None
    try:
        cp.read_string("[config]\n" + text, source=path)
    except configparser.Error as exc:
        raise InvalidArgumentError(f"malformed config {path!r}: {exc}") from None
    values = {}
    for key, value in cp["config"].items():
        norm = key.replace("-", "_")
        if norm not in CONFIG_KEYS:
            raise InvalidArgumentError(f"unknown config key {key!r}")
        values[norm] = value
    return values


def _resolved(args) -> dict:
    """Defaults < config file < flags."""
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    out = {}
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        out[key] = flag if flag is not None else cfg.get(key)
    return out


def _float(value, name):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise InvalidArgumentError(f"{name} must be a number, got {value!r}") from None


def _params(opts, defaults=PARAM_DEFAULTS) -> DriveParams:
    vals = {k: _float(opts[k], k) if opts.get(k) is not None else defaults[k] for k in defaults}
    return DriveParams(**vals)


def _grid(opts, explicit_only=False):
    given = [opts.get(k) is not None for k in ("t_start", "t_end")]
    if explicit_only and not any(given):
        return None
    points = opts.get("t_points")
    return sweep.Grid(
        _float(opts["t_start"], "t-start") if given[0] else sweep.DEFAULT_T_START,
        _float(opts["t_end"], "t-end") if given[1] else sweep.DEFAULT_T_END,
        int(_float(points, "t-points")) if points is not None else sweep.DEFAULT_T_POINTS,
    )


def _list(text, name):
    items = [s.strip() for s in str(text).split(",") if s.strip()]
    if not items:
        raise InvalidArgumentError(f"{name} needs at least one value")
    return items


def _vary(text):
    if text is None:
        return None
    name, sep, values = str(text).partition("=")
    if not sep:
        raise InvalidArgumentError("vary must look like field=v1,v2,...")
    return name.strip(), tuple(_float(v, "vary value") for v in _list(values, "vary"))


def _step(opts):
    return _float(opts["step"], "step") if opts.get("step") is not None else oracle.DEFAULT_STEP


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---- commands ------------------------------------------------------------------------------

def _fmt(x):
    return sweep.fmt_number(x)


def cmd_spectrum(args) -> int:
    opts = _resolved(args)
    p = _params(opts)
    s = dressed_states(p)
    amps = initial_amplitudes(p, s)
    lines = [f"# {k}: {_fmt(v)}" for k, v in sweep._meta_params(p)]
    lines.append("state,omega,re_l1,im_l1,re_l2,im_l2,re_l3,im_l3,re_C,im_C")
    for name, w, v, c in zip("ijk", s.omegas, (s.v_i, s.v_j, s.v_k), amps):
        comps = [_fmt(z) for x in v for z in (x.real, x.imag)]
        lines.append(",".join([name, _fmt(w)] + comps + [_fmt(c.real), _fmt(c.imag)]))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_evolve(args) -> int:
    opts = _resolved(args)
    p = _params(opts)
    grid = _grid(opts)
    state = args.state or opts.get("state") or "exact"
    panel_lines = [f"# {k}: {_fmt(v)}" for k, v in sweep._meta_params(p)]
    panel_lines += [f"# state: {state}", "t,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3,norm"]
    for t in grid.t:
        a = evolve(p, float(t), state).amps
        vals = [_fmt(t)] + [_fmt(z) for x in a for z in (x.real, x.imag)] + [_fmt(np.linalg.norm(a))]
        panel_lines.append(",".join(vals))
    _emit("\n".join(panel_lines) + "\n", args.out)
    return EXIT_OK


def _spec(opts, outputs, default_mode="analytic") -> sweep.SweepSpec:
    return sweep.SweepSpec(
        params=_params(opts),
        grid=_grid(opts),
        vary=_vary(opts.get("vary")),
        outputs=tuple(outputs),
        mode=opts.get("mode") or default_mode,
        state=opts.get("state") or "exact",
        hss_variant=opts.get("hss_variant") or "as_printed",
        step=_step(opts),
    )


def cmd_fixed(args) -> int:
    opts = _resolved(args)
    panel = sweep.run_sweep(_spec(opts, FIXED_OUTPUTS[args.command]))
    _emit(sweep.panel_csv(panel, [("command", args.command)]), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    opts = _resolved(args)
    outputs = _list(opts["outputs"], "outputs") if opts.get("outputs") is not None else ("qfi2", "qfi3")
    panel = sweep.run_sweep(_spec(opts, outputs))
    _emit(sweep.panel_csv(panel, [("command", "sweep")]), args.out)
    return EXIT_OK


def _panel_path(out: str, name: str, many: bool) -> Path:
    path = Path(out)
    if not many:
        return path
    safe = name.replace("=", "").replace("/", "_")
    return path.with_name(f"{path.stem}_{safe}{path.suffix or '.csv'}")


def cmd_figure(args) -> int:
    if args.which not in sweep.FIGURES:
        raise InvalidArgumentError(f"unknown figure {args.which!r}; expected one of {', '.join(sweep.FIGURES)}")
    opts = _resolved(args)

    def opt_float(key):
        return _float(opts[key], key) if opts.get(key) is not None else None

    fo = sweep.FigureOptions(
        grid=_grid(opts, explicit_only=True),
        t_points=int(_float(opts["t_points"], "t-points")) if opts.get("t_points") is not None else None,
        vartheta2=opt_float("vartheta2"),
        vartheta3=opt_float("vartheta3"),
        delta=opt_float("delta"),
        phi2=opt_float("phi2") or 0.0,
        phi3=opt_float("phi3") or 0.0,
        curves=tuple(_float(v, "curves") for v in _list(args.curves, "curves")) if args.curves else None,
        panels=tuple(_float(v, "panels") for v in _list(args.panels, "panels")) if args.panels else None,
        mode=opts.get("mode"),
        state=opts.get("state") or "exact",
        hss_variant=opts.get("hss_variant") or "as_printed",
        step=_step(opts),
    )
    if fo.t_points is not None and fo.t_points < 2:
        raise InvalidArgumentError("t_points must be an integer >= 2")
    panels = sweep.figure(args.which, fo)
    many = len(panels) > 1
    if args.out:
        for panel in panels:
            _panel_path(args.out, panel.name, many).write_text(
                sweep.panel_csv(panel, [("panel", panel.name)]))
    else:
        sys.stdout.write("".join(sweep.panel_csv(panel, [("panel", panel.name)]) for panel in panels))
    return EXIT_OK


def validation_summary(report: oracle.ValidationReport, allow_discrepancy: bool, points: int) -> str:
    lines = [
        f"validation: state={report.state} hss_variant={report.hss_variant} "
        f"param_sets={len(report.params)} grid_points={points}"
        + (f" faults={','.join(report.faults)}" if report.faults else ""),
    ]
    summ = report.summary()
    for name, s in summ["by_check"].items():
        lines.append(f"  {name}: {s['total']} checks, {s['failed']} failed")
    if report.adjudication:
        lines.append("HSS / Lambda adjudication:")
        for a in report.adjudication:
            dev = "n/a" if a["max_abs_dev"] is None else f"{a['max_abs_dev']:.3e}"
            sel = " (selected)" if a["selected"] else ""
            lines.append(f"  {a['variant']}: {a['verdict']} ({a['points'] - a['failed']}/{a['points']} "
                         f"points within tolerance, max |dev| {dev}){sel}")
    lines.append(f"failures: {summ['failures']}  discrepancies: {summ['discrepancies']}"
                 + ("  (discrepancies allowed)" if allow_discrepancy else ""))
    lines.append("result: " + ("PASS" if report.ok(allow_discrepancy) else "FAIL"))
    return "\n".join(lines) + "\n"


def cmd_validate(args) -> int:
    if args.grid_points < 0:
        raise InvalidArgumentError("grid-points must be non-negative")
    if args.random_sets < 0:
        raise InvalidArgumentError("random-sets must be non-negative")
    given = {k: getattr(args, k) for k in PARAM_DEFAULTS if getattr(args, k) is not None}
    if given:
        sets = [_params(given)]
    else:
        sets = sweep.figure_param_sets()
    sets += oracle.random_params(args.random_sets, args.seed)
    t = np.linspace(0.0, args.t_end, args.grid_points)
    tol = oracle.Tolerances(step=args.step)
    report = oracle.cross_validate(sets, t, tol, state=args.state, hss_variant=args.hss_variant,
                                   faults=args.inject_fault)
    if args.out:
        Path(args.out).write_text(report.to_jsonl())
    sys.stdout.write(validation_summary(report, args.allow_discrepancy, args.grid_points))
    return EXIT_OK if report.ok(args.allow_discrepancy) else EXIT_FAIL


COMMANDS = {
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "qfi": cmd_fixed,
    "ratio": cmd_fixed,
    "coherence": cmd_fixed,
    "hss": cmd_fixed,
    "sweep": cmd_sweep,
    "figure": cmd_figure,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"threelevel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidArgumentError as exc:
        print(f"threelevel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"threelevel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
