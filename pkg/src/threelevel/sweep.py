"""Grid evaluation of named quantities, figure parameter sets and CSV output."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import estimation, quantifiers
from .errors import Flag, InvalidArgumentError
from .profile import DEFAULT_STEP, numeric_profile, time_grid
from .qsystem import DriveParams, eigenfrequencies

QUANTITIES = (
    "qfi2",
    "qfi3",
    "qfi23",
    "gamma",
    "var_ind_phi2",
    "var_ind_phi3",
    "var_sim_phi2",
    "var_sim_phi3",
    "delta_ind",
    "delta_sim",
    "coherence",
    "hss2",
    "hss3",
    "quantumness",
)
MODES = ("analytic", "numeric", "both")
VARY_FIELDS = ("vartheta2", "vartheta3", "delta", "phi2", "phi3")

DEFAULT_T_START = 0.0
DEFAULT_T_END = 50.0
DEFAULT_T_POINTS = 2000
# figure grids stretch to cover this many slow beat periods 2 pi / |omega_i|
MIN_BEAT_PERIODS = 2
DEFAULT_VARTHETA3 = (0.3, 0.5, 0.7)
DEFAULT_DELTAS = (0.04, 1.0, 5.0, 30.0)
FIG2_DELTAS = (0.04, 30.0)
SIG_DIGITS = 12


@dataclass(frozen=True)
class Grid:
    t_start: float = DEFAULT_T_START
    t_end: float = DEFAULT_T_END
    t_points: int = DEFAULT_T_POINTS

    def __post_init__(self):
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end)):
            raise InvalidArgumentError("grid bounds must be finite")
        if self.t_start < 0:
            raise InvalidArgumentError("t_start must be non-negative")
        if self.t_end <= self.t_start:
            raise InvalidArgumentError("t_end must exceed t_start")
        if int(self.t_points) != self.t_points or self.t_points < 2:
            raise InvalidArgumentError("t_points must be an integer >= 2")

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, int(self.t_points))


@dataclass(frozen=True)
class SweepSpec:
    params: DriveParams
    grid: Grid = field(default_factory=Grid)
    vary: tuple | None = None  # (field name, tuple of values)
    outputs: tuple = ("qfi2", "qfi3")
    mode: str = "analytic"
    state: str = "exact"
    hss_variant: str = "as_printed"
    step: float = DEFAULT_STEP

    def __post_init__(self):
        check_outputs(self.outputs)
        if self.mode not in MODES:
            raise InvalidArgumentError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.hss_variant not in quantifiers.HSS_VARIANTS:
            raise InvalidArgumentError(
                f"unknown HSS variant {self.hss_variant!r}; expected one of {quantifiers.HSS_VARIANTS}"
            )
        if self.vary is not None:
            name, values = self.vary
            if name not in VARY_FIELDS:
                raise InvalidArgumentError(f"cannot vary {name!r}; expected one of {VARY_FIELDS}")
            if len(values) == 0:
                raise InvalidArgumentError("vary needs at least one value")
            for v in values:
                self.params.replace(**{name: v})


@dataclass
class Panel:
    name: str
    t: np.ndarray
    columns: list  # [(header, cells)]
    metadata: list  # [(key, value)]


def check_outputs(outputs):
    bad = [q for q in outputs if q not in QUANTITIES]
    if bad or not outputs:
        raise InvalidArgumentError(
            f"unknown quantity {', '.join(bad) or '(none)'}; valid names: {', '.join(QUANTITIES)}"
        )


def _cells(values, bad=None):
    arr = np.asarray(values, dtype=float)
    out = []
    for i, x in enumerate(arr):
        if bad is not None and bad[i]:
            out.append(Flag.DISCREPANCY)
        elif not math.isfinite(x):
            out.append(Flag.SINGULAR)
        else:
            out.append(float(x))
    return out


_STRATEGY = ("gamma", "var_ind_phi2", "var_ind_phi3", "var_sim_phi2", "var_sim_phi3",
             "delta_ind", "delta_sim", "quantumness")


def evaluate(p: DriveParams, t, outputs, mode: str = "analytic", state: str = "exact",
             hss_variant: str = "as_printed", h: float = DEFAULT_STEP) -> dict:
    """{(quantity, path): cells} for path in the requested mode(s).

    Quantumness has no closed form; it always uses the numeric Uhlmann term,
    combined with F from the path it is listed under.
    """
    check_outputs(outputs)
    t = time_grid(t)
    paths = ("analytic", "numeric") if mode == "both" else (mode,)
    needs_profile = "numeric" in paths or any(q in _STRATEGY for q in outputs)
    prof = numeric_profile(p, t, state, h) if needs_profile else None
    out = {}
    for path in paths:
        if path == "analytic":
            f22, f33, f23 = estimation.closed_form_qfi(p, t)
        else:
            f22, f33, f23 = prof["qfi22"], prof["qfi33"], prof["qfi23"]
        strat = None
        if any(q in _STRATEGY for q in outputs):
            strat = estimation.strategy_columns(f22, f33, f23, t, prof["uhlmann23"])
        hss_cols = None
        for q in outputs:
            if q == "qfi2":
                cells = _cells(f22)
            elif q == "qfi3":
                cells = _cells(f33)
            elif q == "qfi23":
                cells = _cells(f23)
            elif q in _STRATEGY:
                cells = strat[q]
            elif q == "coherence":
                vals = quantifiers.coherence_l2_analytic(p, t) if path == "analytic" else prof["coherence"]
                cells = _cells(np.atleast_1d(vals))
            else:
                if path == "analytic":
                    if hss_cols is None:
                        hss_cols = quantifiers.hss_analytic_grid(p, t, hss_variant)
                    vals, bad = hss_cols[0 if q == "hss2" else 1]
                    cells = _cells(vals, bad)
                else:
                    cells = _cells(prof[q])
            out[(q, path)] = cells
    return out


def _meta_params(p: DriveParams):
    return [("vartheta2", p.vartheta2), ("vartheta3", p.vartheta3), ("delta", p.delta),
            ("phi2", p.phi2), ("phi3", p.phi3)]


def _column_name(q, path, mode, label=None):
    name = q if mode != "both" else f"{q}_{path}"
    return f"{name}[{label}]" if label else name


def run_sweep(spec: SweepSpec) -> Panel:
    t = spec.grid.t
    paths = ("analytic", "numeric") if spec.mode == "both" else (spec.mode,)
    runs = [(None, spec.params)]
    if spec.vary is not None:
        name, values = spec.vary
        runs = [(f"{name}={fmt_number(v)}", spec.params.replace(**{name: v})) for v in values]
    columns = []
    for label, p in runs:
        res = evaluate(p, t, spec.outputs, spec.mode, spec.state, spec.hss_variant, spec.step)
        for q in spec.outputs:
            for path in paths:
                columns.append((_column_name(q, path, spec.mode, label), res[(q, path)]))
    meta = _meta_params(spec.params) + [
        ("t_start", spec.grid.t_start), ("t_end", spec.grid.t_end), ("t_points", spec.grid.t_points),
        ("mode", spec.mode), ("state", spec.state), ("hss_variant", spec.hss_variant),
    ]
    if spec.vary is not None:
        meta.append(("vary", f"{spec.vary[0]}=" + ",".join(fmt_number(v) for v in spec.vary[1])))
    return Panel("sweep", t, columns, meta)


# ---- figures -----------------------------------------------------------------------------

def beat_period(p: DriveParams) -> float:
    wi = eigenfrequencies(p)[0]
    return 2 * math.pi / abs(wi)


def figure_grid(param_sets, grid: Grid | None, points: int | None = None) -> Grid:
    """Explicit grid if given, else [0, 50] stretched to MIN_BEAT_PERIODS slow periods."""
    if grid is not None:
        return grid
    span = max([DEFAULT_T_END] + [MIN_BEAT_PERIODS * beat_period(p) for p in param_sets])
    return Grid(DEFAULT_T_START, span, points or DEFAULT_T_POINTS)


@dataclass(frozen=True)
class FigureOptions:
    grid: Grid | None = None
    t_points: int | None = None
    vartheta2: float | None = None
    vartheta3: float | None = None
    delta: float | None = None
    phi2: float = 0.0
    phi3: float = 0.0
    curves: tuple | None = None
    panels: tuple | None = None
    mode: str | None = None
    state: str = "exact"
    hss_variant: str = "as_printed"
    step: float = DEFAULT_STEP


def _panel(name, base_meta, sets, labels, outputs, opts, mode, grid):
    t = grid.t
    paths = ("analytic", "numeric") if mode == "both" else (mode,)
    columns = []
    for label, p in zip(labels, sets):
        res = evaluate(p, t, outputs, mode, opts.state, opts.hss_variant, opts.step)
        for q in outputs:
            for path in paths:
                columns.append((_column_name(q, path, mode, label), res[(q, path)]))
    meta = base_meta + [
        ("t_start", grid.t_start), ("t_end", grid.t_end), ("t_points", grid.t_points),
        ("mode", mode), ("state", opts.state), ("hss_variant", opts.hss_variant),
    ]
    return Panel(name, t, columns, meta)


def _pick(value, default):
    return default if value is None else value


def fig2(opts: FigureOptions):
    v2 = _pick(opts.vartheta2, 1.0)
    curves = opts.curves or ((opts.vartheta3,) if opts.vartheta3 is not None else DEFAULT_VARTHETA3)
    deltas = opts.panels or ((opts.delta,) if opts.delta is not None else FIG2_DELTAS)
    mode = opts.mode or "analytic"
    out = []
    for d in deltas:
        sets = [DriveParams(v2, v3, d, opts.phi2, opts.phi3) for v3 in curves]
        grid = figure_grid(sets, opts.grid, opts.t_points)
        out.append(_panel(f"delta={fmt_number(d)}", [("figure", "fig2"), ("vartheta2", v2), ("delta", d)],
                          sets, [f"vartheta3={fmt_number(v)}" for v in curves], ("qfi2", "qfi3"),
                          opts, mode, grid))
    return out


def fig3a(opts: FigureOptions):
    v2 = _pick(opts.vartheta2, 1.0)
    v3 = _pick(opts.vartheta3, 1.0)
    curves = opts.curves or ((opts.delta,) if opts.delta is not None else DEFAULT_DELTAS)
    sets = [DriveParams(v2, v3, d, opts.phi2, opts.phi3) for d in curves]
    grid = figure_grid(sets, opts.grid, opts.t_points)
    return [_panel("a", [("figure", "fig3a"), ("vartheta2", v2), ("vartheta3", v3)], sets,
                   [f"delta={fmt_number(d)}" for d in curves], ("gamma",), opts,
                   opts.mode or "analytic", grid)]


def fig3b(opts: FigureOptions):
    v2 = _pick(opts.vartheta2, 0.5)
    d = _pick(opts.delta, 30.0)
    curves = opts.curves or ((opts.vartheta3,) if opts.vartheta3 is not None else DEFAULT_VARTHETA3)
    sets = [DriveParams(v2, v3, d, opts.phi2, opts.phi3) for v3 in curves]
    grid = figure_grid(sets, opts.grid, opts.t_points)
    return [_panel("b", [("figure", "fig3b"), ("vartheta2", v2), ("delta", d)], sets,
                   [f"vartheta3={fmt_number(v)}" for v in curves], ("gamma",), opts,
                   opts.mode or "analytic", grid)]


def fig4(opts: FigureOptions):
    p = DriveParams(_pick(opts.vartheta2, 1.0), _pick(opts.vartheta3, 0.3), _pick(opts.delta, 0.04),
                    opts.phi2, opts.phi3)
    grid = figure_grid([p], opts.grid, opts.t_points)
    return [_panel("main", [("figure", "fig4")] + _meta_params(p), [p], [None],
                   ("coherence", "delta_ind", "delta_sim"), opts, opts.mode or "analytic", grid)]


FIG5_SETS = {"ac": (1.0, 0.3, 0.04), "bd": (0.5, 0.5, 30.0)}


def fig5(opts: FigureOptions):
    out = []
    for name, (v2, v3, d) in FIG5_SETS.items():
        p = DriveParams(_pick(opts.vartheta2, v2), _pick(opts.vartheta3, v3), _pick(opts.delta, d),
                        opts.phi2, opts.phi3)
        grid = figure_grid([p], opts.grid, opts.t_points)
        out.append(_panel(name, [("figure", "fig5")] + _meta_params(p), [p], [None],
                          ("hss2", "qfi2", "hss3", "qfi3"), opts, opts.mode or "both", grid))
    return out


FIGURES = {"fig2": fig2, "fig3a": fig3a, "fig3b": fig3b, "fig4": fig4, "fig5": fig5}


def figure(which: str, opts: FigureOptions | None = None):
    if which not in FIGURES:
        raise InvalidArgumentError(f"unknown figure {which!r}; expected one of {', '.join(FIGURES)}")
    return FIGURES[which](opts or FigureOptions())


def figure_param_sets():
    """Every parameter set named by the figure definitions, deduplicated, in first-seen order."""
    sets = []
    for v3 in DEFAULT_VARTHETA3:
        for d in FIG2_DELTAS:
            sets.append(DriveParams(1.0, v3, d))
    sets += [DriveParams(1.0, 1.0, d) for d in DEFAULT_DELTAS]
    sets += [DriveParams(0.5, v3, 30.0) for v3 in DEFAULT_VARTHETA3]
    sets += [DriveParams(*v) for v in FIG5_SETS.values()]
    seen, out = set(), []
    for p in sets:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


# ---- output ------------------------------------------------------------------------------

def fmt_number(x) -> str:
    """Locale-independent decimal with 12 significant digits; flags pass through."""
    if isinstance(x, Flag):
        return x.value
    x = float(x) + 0.0  # folds -0.0
    if not math.isfinite(x):
        raise ValueError(f"refusing to format non-finite value {x!r}")
    return format(x, f".{SIG_DIGITS}g")


def _meta_value(v) -> str:
    if isinstance(v, float):
        return fmt_number(v)
    return str(v)


def panel_csv(panel: Panel, extra_meta=()) -> str:
    buf = io.StringIO()
    for k, v in list(extra_meta) + panel.metadata:
        buf.write(f"# {k}: {_meta_value(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [name for name, _ in panel.columns])
    for i, tt in enumerate(panel.t):
        w.writerow([fmt_number(tt)] + [fmt_number(cells[i]) for _, cells in panel.columns])
    return buf.getvalue()


def read_csv(text: str):
    """Parse our CSV back into (metadata dict, header list, rows of str)."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            meta[key.strip()] = value.strip()
        elif line:
            body.append(line)
    rows = list(csv.reader(body))
    return meta, (rows[0] if rows else None), rows[1:]
