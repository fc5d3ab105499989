"""Deterministic CSV / SVG / JSON emission for band diagrams and spectra.

CSV is RFC-4180 style with a header row; floats use Python's shortest
round-trip repr. SVG is hand-emitted (no plotting dependency): a fixed
800 x 600 viewport with the bulk region |z| >= sqrt(m^2 + k^2) shaded in
gray, one path per band-domain component in black, and the full-operator
spectrum drawn as a blue strip on the right edge.
"""

from __future__ import annotations

import io
import csv
import json
import math

import numpy as np

from . import fiber, spectrum as spectrum_mod
from .coupling import Coupling
from .errors import ConfiningRegime


def _fmt(v: float) -> str:
    return repr(float(v) + 0.0)  # + 0.0 normalizes -0.0


# ---------------------------------------------------------------------------
# Band sampling shared by CSV and SVG


def band_samples(c: Coupling, kmin: float, kmax: float, samples: int):
    """Common sample table: (ks, columns) with per-branch values and masks.

    Column order: the single linear branch when d = 4, otherwise the plus
    branch followed by the minus branch. Each column is (label, values,
    admissible mask); values are evaluated from the closed form and masked
    where k is outside every domain component of the branch.
    """
    ks = np.linspace(kmin, kmax, samples)
    all_bands = fiber.bands(c)
    is_d4 = any(b.branch_id == "single_d4" for b in all_bands)
    layout = (("single_d4", "z_single_or_plus"),) if is_d4 else (
        ("plus", "z_single_or_plus"),
        ("minus", "z_minus"),
    )
    columns = []
    for branch, label in layout:
        group = [b for b in all_bands if b.branch_id == branch]
        mask = np.zeros(samples, dtype=bool)
        for b in group:
            for lo, hi in b.domain:
                mask |= (ks > lo) & (ks < hi)
        if group:
            values = np.asarray(group[0].evaluate(ks), dtype=float)
        else:
            values = np.asarray(
                fiber._quadratic_branch(c, ks, 1.0 if branch == "plus" else -1.0),
                dtype=float,
            )
        columns.append((label, values, mask))
    return ks, columns


def bands_csv(c: Coupling, kmin: float, kmax: float, samples: int) -> str:
    ks, columns = band_samples(c, kmin, kmax, samples)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    header = ["k"]
    for label, _, _ in columns:
        header += [label, "admissible" + label[1:]]
    writer.writerow(header)
    for i, k in enumerate(ks):
        row = [_fmt(k)]
        for _, values, mask in columns:
            row.append(_fmt(values[i]) if mask[i] else "")
            row.append("true" if mask[i] else "false")
        writer.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# SVG


_W, _H = 800, 600
_ML, _MR, _MT, _MB = 60.0, 110.0, 20.0, 40.0


def _axes(c: Coupling, kmin: float, kmax: float):
    gmax = max(math.hypot(c.mass, kmin), math.hypot(c.mass, kmax))
    zmax = 1.1 * max(gmax, 1e-9)

    def px(k):
        return _ML + (k - kmin) / (kmax - kmin) * (_W - _ML - _MR)

    def py(z):
        return _MT + (zmax - z) / (2 * zmax) * (_H - _MT - _MB)

    return px, py, zmax


def _path(points, cls, stroke, width, fill="none"):
    d = "M " + " L ".join(f"{x:.2f} {y:.2f}" for x, y in points)
    return (
        f'<path class="{cls}" d="{d}" fill="{fill}" '
        f'stroke="{stroke}" stroke-width="{width}"/>'
    )


def bands_svg(c: Coupling, kmin: float, kmax: float, samples: int) -> str:
    ks, columns = band_samples(c, kmin, kmax, samples)
    px, py, zmax = _axes(c, kmin, kmax)
    try:
        desc = spectrum_mod.assemble_spectrum(c)
    except ConfiningRegime:
        # decoupled case: the strip is still free spectrum + band closures
        ac = spectrum_mod.free_spectrum(c.mass)
        for band in fiber.bands(c):
            if not band.is_constant:
                ac = ac.union(spectrum_mod.band_range_closure(band))
        desc = spectrum_mod.SpectrumDescription(ac=ac, pp=(), case_tag="thm_iii")
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
    ]
    # bulk region |z| >= sqrt(m^2 + k^2), shaded gray
    edge = np.sqrt(c.mass**2 + ks**2)
    upper = [(px(k), py(min(e, zmax))) for k, e in zip(ks, edge)]
    upper = [(px(kmin), py(zmax))] + upper + [(px(kmax), py(zmax))]
    lower = [(px(kmin), py(-zmax))] + [
        (px(k), py(max(-e, -zmax))) for k, e in zip(ks, edge)
    ] + [(px(kmax), py(-zmax))]
    for pts in (upper, lower):
        d = "M " + " L ".join(f"{x:.2f} {y:.2f}" for x, y in pts) + " Z"
        parts.append(f'<path class="bulk" d="{d}" fill="#c8c8c8" stroke="none"/>')
    # axes
    parts.append(_path([(px(kmin), py(0)), (px(kmax), py(0))], "axis", "#404040", 1))
    if kmin < 0 < kmax:
        parts.append(_path([(px(0), py(-zmax)), (px(0), py(zmax))], "axis", "#404040", 1))
    # band curves: one path per band-domain component
    for band in fiber.bands(c):
        for lo, hi in band.domain:
            sel = (ks > lo) & (ks < hi)
            if not sel.any():
                continue
            zs = np.asarray(band.evaluate(ks[sel]), dtype=float)
            pts = list(zip((px(k) for k in ks[sel]), (py(z) for z in zs)))
            if len(pts) == 1:
                x, y = pts[0]
                pts = [(x - 0.5, y), (x + 0.5, y)]
            parts.append(_path(pts, "band", "black", 2.5))
    # spectrum strip (full operator) on the right edge, in blue
    sx = _W - _MR + 40.0
    for iv in desc.ac.intervals:
        lo = max(iv.lo, -zmax)
        hi = min(iv.hi, zmax)
        if hi <= lo:
            continue
        parts.append(
            f'<rect class="spectrum" x="{sx - 5:.2f}" y="{py(hi):.2f}" '
            f'width="10" height="{py(lo) - py(hi):.2f}" fill="#3060c0"/>'
        )
    for p in desc.pp:
        if -zmax <= p.value <= zmax:
            parts.append(
                f'<circle class="eigenvalue" cx="{sx:.2f}" cy="{py(p.value):.2f}" '
                f'r="4" fill="#3060c0"/>'
            )
    parts.append(
        f'<text x="{px(kmax) - 10:.2f}" y="{py(0) + 16:.2f}" '
        f'font-size="12" fill="#404040">k</text>'
    )
    parts.append(
        f'<text x="{px(kmin) + 4:.2f}" y="{py(zmax) + 14:.2f}" '
        f'font-size="12" fill="#404040">z</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# JSON / sweep CSV


def spectrum_json(desc) -> str:
    return json.dumps(desc.to_json(), indent=2) + "\n"


def sweep_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["epsilon", "energy", "target", "abs_error"])
    for r in report.rows:
        writer.writerow([_fmt(r.epsilon), _fmt(r.energy), _fmt(r.target), _fmt(r.abs_error)])
    return buf.getvalue()


def sweep_json(report) -> str:
    c = report.coupling
    payload = {
        "coupling": {"eta": c.eta, "tau": c.tau, "lambda": c.lam, "omega": c.omega, "mass": c.mass},
        "k": report.k,
        "branch": report.branch_l,
        "monotone": report.monotone,
        "final_error": report.final_error,
        "rows": [
            {"epsilon": r.epsilon, "energy": r.energy, "target": r.target, "abs_error": r.abs_error}
            for r in report.rows
        ],
    }
    return json.dumps(payload, indent=2) + "\n"
