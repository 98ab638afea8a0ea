"""CDF comparison curves as tidy CSV and a dependency-free SVG overlay."""

from __future__ import annotations

import csv
import io
import xml.etree.ElementTree as ET

import numpy as np

from .dataio import Ecdf
from .gpd import GpdParams, gpd_cdf

PALETTE = ["#000000", "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]


def cdf_curves(values, fits: dict[str, GpdParams], points: int = 200, upper_q: float = 0.99):
    """Evaluate the ECDF and each fitted GPD CDF on a shared x grid.

    Returns ``(x, {label: y})``; a GPD curve is NaN below its threshold.
    """
    data = np.sort(np.asarray(values, dtype=float))
    hi = float(np.quantile(data, upper_q))
    x = np.linspace(data[0], max(hi, data[0] * (1 + 1e-9) + 1e-12), points)
    curves = {"empirical": Ecdf(data)(x)}
    for label, p in fits.items():
        y = np.full(x.size, np.nan)
        ok = x >= p.mu
        y[ok] = gpd_cdf(x[ok], p)
        curves[label] = y
    return x, curves


def curves_csv(x, curves: dict, year=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["year", "curve", "x", "cdf"])
    for label, y in curves.items():
        for xi, yi in zip(x, y):
            if np.isfinite(yi):
                w.writerow(["" if year is None else year, label, repr(float(xi)), repr(float(yi))])
    return buf.getvalue()


def curves_svg(x, curves: dict, title: str = "", width: int = 640, height: int = 420) -> str:
    """SVG 1.1 document with one ``<path>`` per curve."""
    ml, mr, mt, mb = 60, 170, 30, 45
    pw, ph = width - ml - mr, height - mt - mb
    x0, x1 = float(x[0]), float(x[-1])
    span = (x1 - x0) or 1.0

    def px(v):
        return ml + (v - x0) / span * pw

    def py(v):
        return mt + (1.0 - v) * ph

    svg = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        version="1.1",
        width=str(width),
        height=str(height),
        viewBox=f"0 0 {width} {height}",
    )
    ET.SubElement(svg, "title").text = title or "CDF comparison"
    axes = ET.SubElement(svg, "g", stroke="#444444", fill="none")
    ET.SubElement(axes, "line", x1=str(ml), y1=str(mt + ph), x2=str(ml + pw), y2=str(mt + ph))
    ET.SubElement(axes, "line", x1=str(ml), y1=str(mt), x2=str(ml), y2=str(mt + ph))
    labels = ET.SubElement(svg, "g", fill="#222222", style="font: 11px sans-serif")
    for t in np.linspace(0, 1, 6):
        ET.SubElement(labels, "text", x=str(ml - 30), y=f"{py(t) + 4:.1f}").text = f"{t:.1f}"
    for t in np.linspace(x0, x1, 6):
        ET.SubElement(labels, "text", x=f"{px(t) - 12:.1f}", y=str(mt + ph + 18)).text = f"{t:.2f}"
    ET.SubElement(labels, "text", x=str(ml + pw // 2 - 40), y=str(height - 8)).text = "claim size"
    if title:
        ET.SubElement(labels, "text", x=str(ml), y=str(mt - 10)).text = title

    for i, (label, y) in enumerate(curves.items()):
        color = PALETTE[i % len(PALETTE)]
        ok = np.isfinite(y)
        if not ok.any():
            continue
        pts = [f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[ok], y[ok])]
        if label == "empirical":
            # draw as a step function
            steps = [pts[0]]
            for prev, cur in zip(pts, pts[1:]):
                steps.append(f"{cur.split(',')[0]},{prev.split(',')[1]}")
                steps.append(cur)
            pts = steps
        d = "M" + " L".join(pts)
        ET.SubElement(
            svg, "path", d=d, fill="none", stroke=color,
            **{"stroke-width": "1.5", "data-curve": label},
        )
        ly = mt + 16 * i + 8
        ET.SubElement(svg, "line", x1=str(ml + pw + 10), y1=str(ly), x2=str(ml + pw + 30),
                      y2=str(ly), stroke=color, **{"stroke-width": "2"})
        ET.SubElement(labels, "text", x=str(ml + pw + 35), y=str(ly + 4)).text = label
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(svg, encoding="unicode") + "\n"
