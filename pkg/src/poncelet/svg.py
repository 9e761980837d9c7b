"""Small self-contained SVG 1.1 writer for orbits, polygons and staircases."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

SEGMENTS = 512
SIZE = 512


def _fmt(v: float) -> str:
    return f"{v:.3f}"


class Canvas:
    """World-to-pixel mapping with ``y`` pointing up in world coordinates."""

    def __init__(self, xmin, xmax, ymin, ymax, size=SIZE, pad=16, keep_aspect=True):
        if keep_aspect:
            span = max(xmax - xmin, ymax - ymin)
            cx, cy = 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)
            xmin, xmax, ymin, ymax = cx - span / 2, cx + span / 2, cy - span / 2, cy + span / 2
        self.box = (xmin, xmax, ymin, ymax)
        self.size, self.pad = size, pad
        self.items: list[str] = []

    def px(self, x, y):
        xmin, xmax, ymin, ymax = self.box
        inner = self.size - 2 * self.pad
        u = self.pad + (x - xmin) / (xmax - xmin) * inner
        v = self.pad + (ymax - y) / (ymax - ymin) * inner
        return u, v

    def polyline(self, pts, stroke="#000", width=1.0, closed=False, fill="none", dash=None):
        coords = " ".join(f"{_fmt(u)},{_fmt(v)}" for u, v in (self.px(x, y) for x, y in pts))
        tag = "polygon" if closed else "polyline"
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<{tag} points="{coords}" fill="{fill}" stroke="{stroke}" '
                          f'stroke-width="{width}"{extra}/>')

    def dot(self, x, y, r=2.5, fill="#000"):
        u, v = self.px(x, y)
        self.items.append(f'<circle cx="{_fmt(u)}" cy="{_fmt(v)}" r="{r}" fill="{fill}"/>')

    def text(self, x, y, s, size=12):
        self.items.append(f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-family="sans-serif" '
                          f'font-size="{size}">{escape(s)}</text>')

    def render(self, title: str = "", build_info: str = "") -> str:
        head = ['<?xml version="1.0" encoding="UTF-8" standalone="no"?>']
        if build_info:
            head.append(f"<!-- {escape(build_info)} -->")
        head.append(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                    f'width="{self.size}" height="{self.size}" '
                    f'viewBox="0 0 {self.size} {self.size}">')
        if title:
            head.append(f"<title>{escape(title)}</title>")
        head.append(f'<rect width="{self.size}" height="{self.size}" fill="#fff"/>')
        return "\n".join(head + self.items + ["</svg>"]) + "\n"


def oval_points(oval, segments: int = SEGMENTS) -> np.ndarray:
    th = np.linspace(0.0, 2.0 * math.pi, segments, endpoint=False)
    x, y = oval.radial_point(th)
    return np.column_stack([x, y])


def _canvas_for(*point_sets, margin=0.08) -> Canvas:
    pts = np.vstack(point_sets)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    m = margin * float(np.max(hi - lo))
    return Canvas(lo[0] - m, hi[0] + m, lo[1] - m, hi[1] + m)


def orbit_svg(pair, points, chords: bool = True, title: str = "", build_info: str = "") -> str:
    """Inner and outer ovals, the chords between consecutive points, the orbit."""
    inner, outer = oval_points(pair.inner), oval_points(pair.outer)
    pts = np.asarray(points, dtype=float)
    cv = _canvas_for(inner, outer, pts)
    cv.polyline(outer, stroke="#1f4e79", width=1.2, closed=True)
    cv.polyline(inner, stroke="#7a1f1f", width=1.2, closed=True)
    if chords and len(pts) > 1:
        for a, b in zip(pts[:-1], pts[1:]):
            cv.polyline([a, b], stroke="#999", width=0.5)
    for x, y in pts[1:]:
        cv.dot(x, y, r=2.0, fill="#333")
    cv.dot(pts[0, 0], pts[0, 1], r=4.0, fill="#d62728")
    return cv.render(title, build_info)


def polygon_svg(pair, solution, title: str = "", build_info: str = "") -> str:
    """Tangent polygon of a periodic orbit with its tangency points."""
    inner, outer = oval_points(pair.inner), oval_points(pair.outer)
    verts = np.asarray(solution.points)
    cv = _canvas_for(inner, outer, verts)
    cv.polyline(outer, stroke="#1f4e79", width=1.2, closed=True)
    cv.polyline(inner, stroke="#7a1f1f", width=1.2, closed=True)
    cv.polyline(verts, stroke="#2ca02c", width=1.0, closed=True)
    qx, qy = pair.inner.radial_point(np.asarray(solution.phis))
    for x, y in zip(np.atleast_1d(qx), np.atleast_1d(qy)):
        cv.dot(x, y, r=2.0, fill="#7a1f1f")
    for x, y in verts:
        cv.dot(x, y, r=3.0, fill="#1f4e79")
    return cv.render(title, build_info)


def staircase_svg(table, plateaus=(), title: str = "", build_info: str = "") -> str:
    """``rho`` against ``k`` with plateau intervals shaded."""
    ks, rhos = [], []
    for k, rho, *_ in table.rows():
        if math.isfinite(rho):
            ks.append(k)
            rhos.append(rho)
    if not ks:
        raise ValueError("nothing to plot")
    cv = Canvas(min(ks), max(ks), 0.0, 0.5, keep_aspect=False, pad=32)
    for p in plateaus:
        j, n = p.rational
        y = j / n
        cv.polyline([(p.k_lo, y), (p.k_hi, y)], stroke="#d62728", width=4.0)
        u, v = cv.px(p.k_lo, y)
        cv.text(u, v - 6, f"{j}/{n}", size=10)
    cv.polyline(list(zip(ks, rhos)), stroke="#1f4e79", width=1.0)
    for x, y in zip(ks, rhos):
        cv.dot(x, y, r=1.2, fill="#1f4e79")
    xmin, xmax, _, _ = cv.box
    cv.polyline([(xmin, 0.0), (xmax, 0.0)], stroke="#000", width=0.8)
    cv.polyline([(xmin, 0.0), (xmin, 0.5)], stroke="#000", width=0.8)
    u0, v0 = cv.px(xmin, 0.0)
    cv.text(u0, v0 + 20, f"k = {xmin:g}", size=10)
    u1, _ = cv.px(xmax, 0.0)
    cv.text(u1 - 60, v0 + 20, f"k = {xmax:g}", size=10)
    return cv.render(title, build_info)
