"""Two-panel SVG figures: density on the left, spectra on the right.

Figures 1 to 4 are the two-sided power example, the dyadic block example,
the monotone example and ``mu_p``. Output is deterministic: coordinates are
printed with fixed precision and the only run-dependent text is a version
comment.
"""
from __future__ import annotations

import math
import xml.etree.ElementTree as ET

import numpy as np

from . import __version__, oracle, presets
from .dyadic import DyadicBlockMeasure
from .output import atomic_write
from .spectrum import SpectrumEstimate, estimate_spectra

__all__ = ["FIGURES", "emit_figure", "render_figure"]

W, H = 900, 380
PANEL_W, PANEL_H = 360, 280
LEFT_X, RIGHT_X, TOP = 70, 520, 40
SVG_NS = "http://www.w3.org/2000/svg"

FIGURES = {
    1: ("assouad-sharp", "Sharp example for the Assouad spectrum"),
    2: ("lower-sharp", "Sharp example for the lower spectrum"),
    3: ("mono-sharp", "Sharp example with a monotone density"),
    4: ("mu_p", "Regular measure with only L^1 smoothness"),
}


def _f(v: float) -> str:
    return f"{v:.3f}"


class _Panel:
    def __init__(self, root, x0, y0, xlim, ylim, title, xlabel, ylabel):
        self.root, self.x0, self.y0 = root, x0, y0
        self.xlim, self.ylim = xlim, ylim
        g = ET.SubElement(root, "g")
        ET.SubElement(g, "rect", x=_f(x0), y=_f(y0), width=str(PANEL_W), height=str(PANEL_H),
                      fill="none", stroke="black")
        self._text(g, x0 + PANEL_W / 2, y0 - 12, title, anchor="middle", size=13)
        self._text(g, x0 + PANEL_W / 2, y0 + PANEL_H + 34, xlabel, anchor="middle")
        self._text(g, x0 - 48, y0 + PANEL_H / 2, ylabel, anchor="middle")
        for frac in (0.0, 0.5, 1.0):
            xv = xlim[0] + frac * (xlim[1] - xlim[0])
            yv = ylim[0] + frac * (ylim[1] - ylim[0])
            self._text(g, self.px(xv), y0 + PANEL_H + 16, f"{xv:.3g}", anchor="middle")
            self._text(g, x0 - 6, self.py(yv) + 4, f"{yv:.3g}", anchor="end")
        self.g = g

    @staticmethod
    def _text(parent, x, y, s, anchor="start", size=11, fill="black"):
        t = ET.SubElement(parent, "text", x=_f(x), y=_f(y), fill=fill)
        t.set("font-size", str(size))
        t.set("text-anchor", anchor)
        t.set("font-family", "sans-serif")
        t.text = s
        return t

    def px(self, x):
        return self.x0 + (x - self.xlim[0]) / (self.xlim[1] - self.xlim[0]) * PANEL_W

    def py(self, y):
        y = min(max(y, self.ylim[0]), self.ylim[1])
        return self.y0 + PANEL_H - (y - self.ylim[0]) / (self.ylim[1] - self.ylim[0]) * PANEL_H

    def polyline(self, xs, ys, color="black", width=1.5, dash=None):
        pts = [(self.px(x), self.py(y)) for x, y in zip(xs, ys) if math.isfinite(y)]
        if len(pts) < 2:
            return
        el = ET.SubElement(self.g, "polyline", points=" ".join(f"{_f(a)},{_f(b)}" for a, b in pts),
                           fill="none", stroke=color)
        el.set("stroke-width", str(width))
        if dash:
            el.set("stroke-dasharray", dash)

    def markers(self, xs, ys, color="black"):
        for x, y in zip(xs, ys):
            if math.isfinite(y):
                ET.SubElement(self.g, "circle", cx=_f(self.px(x)), cy=_f(self.py(y)), r="2.5",
                              fill=color)

    def vline(self, x, color="grey", label=None):
        ET.SubElement(self.g, "line", x1=_f(self.px(x)), x2=_f(self.px(x)), y1=_f(self.y0),
                      y2=_f(self.y0 + PANEL_H), stroke=color).set("stroke-dasharray", "3,3")
        if label:
            self._text(self.g, self.px(x) + 3, self.y0 + 14, label, size=10, fill=color)

    def note(self, s, row=0):
        self._text(self.g, self.x0 + 6, self.y0 + 16 + 14 * row, s, size=10)


def _density_panel(root, m, title_extra=""):
    if isinstance(m, DyadicBlockMeasure):
        # heights span many orders of magnitude: draw log10 heights, schematic
        bl = sorted(m.blocks, key=lambda b: b.center)
        logs = [b.log_h_in / math.log(10) for b in bl] + \
               [b.log_h_out / math.log(10) for b in bl if b.log_h_out > -math.inf]
        lo, hi = min(logs), max(logs)
        pad = 0.05 * (hi - lo or 1.0)
        p = _Panel(root, LEFT_X, TOP, (m.support.lo, m.support.hi), (lo - pad, hi + pad),
                   "Density" + title_extra, "x", "log10 f(x)")
        for b in bl:
            xs, ys = [], []
            if b.log_h_out > -math.inf and b.log_rho_out > b.log_rho_in:
                xs += [b.center - b.radius_outer, b.center - b.radius_outer]
                ys += [lo - pad, b.log_h_out / math.log(10)]
            xs += [b.center, b.center]
            ys += [b.log_h_in / math.log(10)] * 2
            if b.log_h_out > -math.inf and b.log_rho_out > b.log_rho_in:
                xs += [b.center + b.radius_outer, b.center + b.radius_outer]
                ys += [b.log_h_out / math.log(10), lo - pad]
            p.polyline(xs, ys, width=1.0)
        p.note("log-scaled, not drawn to scale")
        return p
    sup = m.support
    xs = np.unique(np.concatenate([
        np.linspace(sup.lo, sup.hi, 801),
        *[np.clip(s + np.array([-1, 1])[:, None] * np.geomspace(1e-6, 1e-2, 30), sup.lo, sup.hi)
          .ravel() for s in m.structural_points()]]))
    ys = np.asarray(m.density(xs), float)
    finite = ys[np.isfinite(ys)]
    cap = float(np.quantile(finite, 0.97)) * 1.3 if finite.size else 1.0
    p = _Panel(root, LEFT_X, TOP, (sup.lo, sup.hi), (0.0, cap), "Density" + title_extra,
               "x", "f(x)")
    p.polyline(xs, np.minimum(ys, cap))
    if np.any(ys > cap):
        p.note(f"clipped at {cap:.3g}")
    return p


def render_figure(figure_id: int, params: dict | None = None,
                  est: SpectrumEstimate | None = None) -> str:
    """Build the SVG text of a figure."""
    if figure_id not in FIGURES:
        raise ValueError(f"figure id must be one of {sorted(FIGURES)}")
    name, title = FIGURES[figure_id]
    prm = dict(presets.get_preset(name).defaults)
    prm.update(params or {})
    m = presets.build_measure(name, prm)
    est = est or estimate_spectra(m, presets.default_sweep(name, prm))
    th = est.thetas
    fine = np.linspace(0.01, 0.99, 197)
    p1 = presets._num(prm.get("p1", math.inf))
    p2 = presets._num(prm.get("p2", math.inf))

    ET.register_namespace("", SVG_NS)
    root = ET.Element("svg", xmlns=SVG_NS, width=str(W), height=str(H),
                      viewBox=f"0 0 {W} {H}")
    root.append(ET.Comment(f" assouad-lp {__version__} "))
    _Panel._text(root, W / 2, 18, title, anchor="middle", size=14)
    _density_panel(root, m)

    curves = []  # (xs, ys, colour, dash)
    notes = []
    if figure_id == 1:
        ref = [oracle.sharp_assouad_spectrum(p1, p2, t) for t in fine]
        curves.append((fine, ref, "black", None))
        shown = [("Assouad", est.upper, "tab:blue")]
    elif figure_id == 2:
        ref = [oracle.sharp_lower_spectrum(p1, p2, t) for t in fine]
        curves.append((fine, ref, "black", None))
        shown = [("lower", est.lower, "tab:red")]
    elif figure_id == 3:
        pairs = [oracle.mono_sharp_spectra(p1, p2, t) for t in fine]
        curves.append((fine, [a for a, _ in pairs], "black", None))
        curves.append((fine, [l for _, l in pairs], "black", "5,3"))
        shown = [("Assouad", est.upper, "tab:blue"), ("lower", est.lower, "tab:red")]
    else:
        # general upper bound for reference, with p1 = p and no lower control
        ref = [oracle.assouad_upper_bound(oracle.BoundSet(float(prm["p"]), math.inf), t)
               for t in fine]
        curves.append((fine, ref, "grey", None))
        curves.append((fine, [1.0] * len(fine), "black", None))
        shown = [("Assouad", est.upper, "tab:blue")]
        notes.append("grey: general upper bound (reference)")
    ymax = max([max(c[1]) for c in curves] + [float(np.nanmax(np.where(np.isfinite(v), v, np.nan)))
                                              for _, v, _ in shown])
    ymax = min(ymax, 12.0) * 1.05
    sp = _Panel(root, RIGHT_X, TOP, (0.0, 1.0), (0.0, ymax), "Spectra", "theta", "dimension")
    colours = {"tab:blue": "#1f77b4", "tab:red": "#d62728"}
    for xs, ys, col, dash in curves:
        sp.polyline(xs, ys, color=col, dash=dash)
    for label, vals, col in shown:
        sp.markers(th, vals, color=colours[col])
    if figure_id == 3:
        for tr in oracle.phase_transitions(oracle.BoundSet(p1, p2, "monotone")):
            sp.vline(float(tr.theta), label=f"{tr.spectrum} {tr.theta}")
    legend = ["lines: formulas", "dots: estimates"] + notes
    for i, s in enumerate(legend):
        sp.note(s, row=i)
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


def emit_figure(figure_id: int, out_path: str, params: dict | None = None,
                est: SpectrumEstimate | None = None) -> str:
    text = render_figure(figure_id, params, est)
    atomic_write(out_path, text)
    return out_path
