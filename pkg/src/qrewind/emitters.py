"""File emitters for distributions, success curves and run statistics.

CSV column contracts: hitting distributions use header t,prob with one row
per step count including explicit zeros; success curves use header
m,prob_commutator,prob_full. JSON mirrors field names. SVG output is a
self-contained 800x600 line chart with linear axes and one polyline per
curve column. Floats print with 17 significant digits; rational-backed
values can be written as num/den strings (exact=True).
"""
from __future__ import annotations

import json
from fractions import Fraction

from .analytics import HittingDist, SuccessCurve
from .engine import Statistics

SVG_WIDTH = 800
SVG_HEIGHT = 600
_MARGIN_LEFT = 70
_MARGIN_RIGHT = 30
_MARGIN_TOP = 30
_MARGIN_BOTTOM = 60
_CURVE_COLORS = ("#1f6fb2", "#c23b22", "#3a7d44")


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_value(value, exact: bool) -> str:
    if exact and isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return fmt_float(value)


def _write_text(path, text: str):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


# ── CSV ──────────────────────────────────────────────────────────────────

def hitting_dist_csv(dist: HittingDist, exact: bool = False) -> str:
    lines = ["t,prob"]
    for t, value in dist.rows():
        lines.append(f"{t},{_fmt_value(value, exact)}")
    return "\n".join(lines) + "\n"


def success_curve_csv(curve: SuccessCurve) -> str:
    lines = ["m,prob_commutator,prob_full"]
    for m, pc, pf in curve.rows():
        lines.append(f"{m},{fmt_float(pc)},{fmt_float(pf)}")
    return "\n".join(lines) + "\n"


def statistics_csv(stats: Statistics) -> str:
    lines = ["field,value"]
    data = stats.to_dict()
    for key in ("n_runs", "n_success", "n_trim_fail", "n_abort"):
        lines.append(f"{key},{data[key]}")
    lines.append(f"success_rate,{fmt_float(data['success_rate'])}")
    for key in ("min_fidelity", "mean_fidelity"):
        value = data[key]
        lines.append(f"{key},{'' if value is None else fmt_float(value)}")
    for q, count in sorted(stats.q_count_hist.items()):
        lines.append(f"q_count_{q},{count}")
    return "\n".join(lines) + "\n"


# ── JSON ─────────────────────────────────────────────────────────────────

def hitting_dist_json(dist: HittingDist, exact: bool = False) -> str:
    if exact and dist.backing == "rational":
        probs = [f"{v.numerator}/{v.denominator}" for v in dist.probs]
    else:
        probs = [float(v) for v in dist.probs]
    return json.dumps({"backing": dist.backing, "probs": probs}, indent=2) + "\n"


def success_curve_json(curve: SuccessCurve) -> str:
    return json.dumps({"m": curve.m,
                       "prob_commutator": curve.prob_commutator,
                       "prob_full": curve.prob_full}, indent=2) + "\n"


def statistics_json(stats: Statistics) -> str:
    return json.dumps(stats.to_dict(), indent=2) + "\n"


def parse_statistics_json(text: str) -> Statistics:
    return Statistics.from_dict(json.loads(text))


# ── SVG ──────────────────────────────────────────────────────────────────

def _svg_chart(series: list[tuple[str, list[float], list[float]]],
               x_label: str, y_label: str) -> str:
    """Line chart: series is a list of (name, xs, ys) triples."""
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    x_min, x_max = (min(xs_all), max(xs_all)) if xs_all else (0.0, 1.0)
    y_min, y_max = (min(ys_all), max(ys_all)) if ys_all else (0.0, 1.0)
    if x_max == x_min:
        x_max = x_min + 1.0
    if y_max == y_min:
        y_max = y_min + 1.0
    plot_w = SVG_WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = SVG_HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def px(x):
        return _MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w

    def py(y):
        return _MARGIN_TOP + plot_h - (y - y_min) / (y_max - y_min) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" '
        f'height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
        # axes
        f'<line x1="{_MARGIN_LEFT}" y1="{_MARGIN_TOP}" x2="{_MARGIN_LEFT}" '
        f'y2="{_MARGIN_TOP + plot_h}" stroke="black"/>',
        f'<line x1="{_MARGIN_LEFT}" y1="{_MARGIN_TOP + plot_h}" '
        f'x2="{_MARGIN_LEFT + plot_w}" y2="{_MARGIN_TOP + plot_h}" stroke="black"/>',
    ]
    for i in range(5):
        xv = x_min + (x_max - x_min) * i / 4
        yv = y_min + (y_max - y_min) * i / 4
        parts.append(f'<text x="{px(xv):.1f}" y="{_MARGIN_TOP + plot_h + 20}" '
                     f'font-size="12" text-anchor="middle">{xv:g}</text>')
        parts.append(f'<text x="{_MARGIN_LEFT - 8}" y="{py(yv) + 4:.1f}" '
                     f'font-size="12" text-anchor="end">{yv:.3g}</text>')
    parts.append(f'<text x="{_MARGIN_LEFT + plot_w / 2:.1f}" '
                 f'y="{SVG_HEIGHT - 15}" font-size="14" '
                 f'text-anchor="middle">{x_label}</text>')
    parts.append(f'<text x="18" y="{_MARGIN_TOP + plot_h / 2:.1f}" font-size="14" '
                 f'text-anchor="middle" transform="rotate(-90 18 '
                 f'{_MARGIN_TOP + plot_h / 2:.1f})">{y_label}</text>')
    for i, (name, xs, ys) in enumerate(series):
        color = _CURVE_COLORS[i % len(_CURVE_COLORS)]
        points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{points}"/>')
        parts.append(f'<text x="{_MARGIN_LEFT + plot_w - 8}" '
                     f'y="{_MARGIN_TOP + 16 + 16 * i}" font-size="12" '
                     f'text-anchor="end" fill="{color}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def hitting_dist_svg(dist: HittingDist) -> str:
    ts = [float(t) for t, _ in dist.rows()]
    ps = [float(v) for v in dist.probs]
    return _svg_chart([("prob", ts, ps)], "t", "probability")


def success_curve_svg(curve: SuccessCurve) -> str:
    ms = [float(m) for m in curve.m]
    return _svg_chart([("prob_commutator", ms, curve.prob_commutator),
                       ("prob_full", ms, curve.prob_full)],
                      "m", "success probability")


def statistics_svg(stats: Statistics) -> str:
    if stats.q_count_hist:
        qs = sorted(stats.q_count_hist)
        xs = [float(q) for q in qs]
        ys = [stats.q_count_hist[q] / stats.n_runs for q in qs]
    else:
        xs, ys = [0.0], [0.0]
    return _svg_chart([("q_count frequency", xs, ys)], "q_count", "frequency")


# ── Dispatch ─────────────────────────────────────────────────────────────

_RENDERERS = {
    (HittingDist, "csv"): hitting_dist_csv,
    (HittingDist, "json"): hitting_dist_json,
    (HittingDist, "svg"): lambda d, exact=False: hitting_dist_svg(d),
    (SuccessCurve, "csv"): lambda c, exact=False: success_curve_csv(c),
    (SuccessCurve, "json"): lambda c, exact=False: success_curve_json(c),
    (SuccessCurve, "svg"): lambda c, exact=False: success_curve_svg(c),
    (Statistics, "csv"): lambda s, exact=False: statistics_csv(s),
    (Statistics, "json"): lambda s, exact=False: statistics_json(s),
    (Statistics, "svg"): lambda s, exact=False: statistics_svg(s),
}


def emit(artifact, fmt: str, path, exact: bool = False):
    """Render a HittingDist, SuccessCurve or Statistics to csv/json/svg."""
    renderer = _RENDERERS.get((type(artifact), fmt))
    if renderer is None:
        raise ValueError(f"cannot emit {type(artifact).__name__} as {fmt!r}")
    _write_text(path, renderer(artifact, exact=exact))
