"""Tracing the Jordan curves of B^{-1}(S^1) off the unit circle.

Each curve leaves the circle at a maximum of the lift, runs through the
disk, and lands on the circle at the paired minimum.  Only the inner half
is traced; the outer half is its image under z -> 1/conj(z).
"""
from __future__ import annotations

import cmath
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from ._roots import safeguarded_newton
from .core import (
    KappaVector,
    ParameterPoint,
    lift_derivative,
    lift_second_derivative,
    lift_value,
    log_abs_B,
    log_derivative,
)
from .critical import CriticalProfile, find_critical_points
from .errors import EndpointMismatch, TraceLost

H_MIN = 1e-4
H_MAX = 1e-2
CORRECTOR_TOL = 1e-12
LANDING = 5e-4
MAX_STEPS = 200_000


@dataclass(frozen=True)
class TracedCurve:
    """A closed curve Gamma_j; ``polyline`` runs c' -> (disk) -> c'' -> (exterior) -> c'."""

    j: int
    polyline: np.ndarray
    endpoints: tuple[complex, complex]
    endpoint_angles: tuple[float, float]
    enclosed: dict = field(default_factory=dict)
    inner_count: int = 0
    landing_error: float = 0.0

    @property
    def inner_half(self) -> np.ndarray:
        return self.polyline[: self.inner_count]

    def winding_number(self, w: complex) -> int:
        return winding_number(self.polyline, w)


def winding_number(polyline: np.ndarray, w: complex) -> int:
    """Winding number of the closed polygon ``polyline`` around ``w``."""
    z = np.asarray(polyline) - w
    ang = np.angle(np.roll(z, -1) / z)
    return int(round(ang.sum() / (2 * math.pi)))


def _correct(z, mu, kappa, tol=CORRECTOR_TOL, maxiter=8):
    """Newton on log|B| along its gradient direction."""
    for it in range(maxiter):
        f = float(log_abs_B(z, mu, kappa))
        if abs(f) <= tol:
            return z, it
        grad = np.conj(complex(log_derivative(z, mu, kappa)))
        g2 = abs(grad) ** 2
        if g2 == 0.0:
            return None, it
        z = z - f * grad / g2
    return (z, maxiter) if abs(float(log_abs_B(z, mu, kappa))) <= tol else (None, maxiter)


def _land(angle, mu, kappa, profile):
    """Refine a landing angle to a critical point and match it to the profile."""
    pts = np.asarray(profile.points)
    diff = (pts - angle + 0.5) % 1.0 - 0.5
    i = int(np.argmin(np.abs(diff)))
    guess = angle + diff[i]
    lo, hi = guess - 1e-3, guess + 1e-3
    f = lambda t: lift_derivative(t, mu, kappa)
    fp = lambda t: lift_second_derivative(t, mu, kappa)
    try:
        t = safeguarded_newton(f, fp, lo, hi)
    except ValueError:
        t = angle
    gap = abs((pts[i] - t + 0.5) % 1.0 - 0.5)
    if gap > 1e-6:
        raise EndpointMismatch(f"landing at t = {t:.10g} is {gap:.3g} from the nearest critical point")
    return i, float(pts[i]), float(gap)


def trace_gamma(
    mu: ParameterPoint,
    kappa: KappaVector,
    j: int,
    profile: Optional[CriticalProfile] = None,
) -> TracedCurve:
    """Predictor-corrector trace of the curve around the pole pair of ``a_j`` (1-based)."""
    if profile is None:
        profile = find_critical_points(mu, kappa)
    if not 1 <= j <= kappa.m:
        raise ValueError(f"pole index must be in 1..{kappa.m}, got {j}")
    p = list(profile.pairing).index(j - 1)
    t_start = profile.points[2 * p]
    c = cmath.exp(2j * math.pi * t_start)

    # the level set meets the circle at a right angle: launch inward
    z, _ = _correct(c * (1.0 - H_MIN), mu, kappa)
    if z is None:
        raise TraceLost(f"corrector failed at launch from t = {t_start:.10g}")
    path = [c, z]
    direction = -c
    h = H_MIN
    for _ in range(MAX_STEPS):
        g = complex(log_derivative(z, mu, kappa))
        tangent = 1j * np.conj(g)
        tangent /= abs(tangent)
        if (tangent * np.conj(direction)).real < 0:
            tangent = -tangent
        h = min(h, max(H_MIN, 0.25 * (1.0 - abs(z))))
        while True:
            new, iters = _correct(z + h * tangent, mu, kappa)
            if new is not None and abs(new - z) < 2.0 * h and ((new - z) * np.conj(tangent)).real > 0:
                break
            if h <= H_MIN:
                raise TraceLost(f"step control failed near z = {z:.6g}")
            h = max(H_MIN, 0.5 * h)
        direction = new - z
        z = new
        path.append(z)
        h = min(H_MAX, 1.5 * h if iters <= 3 else h)
        if abs(abs(z) - 1.0) < LANDING and abs(z - c) > 10 * H_MIN:
            break
    else:
        raise TraceLost("curve did not return to the circle")

    landing = (cmath.phase(z) / (2 * math.pi)) % 1.0
    i_end, t_end, gap = _land(landing, mu, kappa, profile)
    if i_end != 2 * p + 1:
        raise EndpointMismatch(
            f"curve from turning point {2 * p + 1} landed at turning point {i_end + 1}, "
            f"expected its pair {2 * p + 2}"
        )
    if abs(z) > 1.0:
        path[-1] = 1.0 / np.conj(z)
    end = cmath.exp(2j * math.pi * t_end)
    inner = np.array(path + [end])
    outer = 1.0 / np.conj(inner[-2:0:-1])
    polyline = np.concatenate([inner, outer])
    curve = TracedCurve(
        j=j,
        polyline=polyline,
        endpoints=(c, end),
        endpoint_angles=(float(t_start), t_end),
        inner_count=len(inner),
        landing_error=gap,
    )
    enclosed = {}
    for i, ai in enumerate(mu.a, start=1):
        enclosed[f"a{i}"] = winding_number(polyline, ai) != 0
        enclosed[f"a{i}*"] = winding_number(polyline, 1.0 / np.conj(ai)) != 0
    object.__setattr__(curve, "enclosed", enclosed)
    return curve


def _regular_value(profile: CriticalProfile) -> float:
    """A circle value far from every critical value (fractional part of the midpoint of the widest gap)."""
    vals = np.sort(np.asarray(profile.values) % 1.0)
    gaps = np.diff(np.append(vals, vals[0] + 1.0))
    i = int(np.argmax(gaps))
    return float((vals[i] + gaps[i] / 2) % 1.0)


def preimages(w: complex, mu: ParameterPoint, kappa: KappaVector) -> np.ndarray:
    """All d_B solutions of B(z) = w, from the numerator polynomial, Newton-polished."""
    num = np.poly1d([1.0]) * cmath.exp(2j * math.pi * mu.eta0)
    den = np.poly1d([1.0 + 0j])
    for a, k in zip(mu.a, kappa.k):
        num *= np.poly1d([1.0, -a]) ** k
        den *= np.poly1d([-np.conj(a), 1.0]) ** k
    num *= np.poly1d([1.0] + [0.0] * kappa.k0)
    poly = num - w * den
    roots = np.roots(poly.coeffs)
    dpoly = poly.deriv()
    for _ in range(3):
        roots = roots - poly(roots) / dpoly(roots)
    return roots


@dataclass
class DecompositionReport:
    curves: list
    min_pairwise_distance: float
    circle_crossings: int
    crossings_match_profile: bool
    max_crossing_error: float
    enclosure_ok: bool
    census_total: int
    census_expected: int
    census_on_circle: int
    census_signed_circle: int
    census_per_curve: dict
    max_level_error: float
    symmetric: bool

    @property
    def ok(self) -> bool:
        return (
            self.min_pairwise_distance > 0
            and self.circle_crossings == 2 * len(self.curves)
            and self.crossings_match_profile
            and self.enclosure_ok
            and self.census_total == self.census_expected
            and self.max_level_error <= 1e-9
            and self.symmetric
        )


def _min_distance(a: np.ndarray, b: np.ndarray) -> float:
    tree = cKDTree(np.column_stack([b.real, b.imag]))
    d, _ = tree.query(np.column_stack([a.real, a.imag]))
    return float(np.min(d))


def _segment_distance(z: complex, polyline: np.ndarray) -> float:
    a, b = polyline[:-1], polyline[1:]
    ab = b - a
    u = np.clip(((z - a) * np.conj(ab)).real / np.maximum(np.abs(ab) ** 2, 1e-300), 0.0, 1.0)
    return float(np.min(np.abs(a + u * ab - z)))


def verify_decomposition(
    mu: ParameterPoint,
    kappa: KappaVector,
    profile: Optional[CriticalProfile] = None,
) -> DecompositionReport:
    """Trace all m curves and check disjointness, crossings, enclosure and the preimage census."""
    if profile is None:
        profile = find_critical_points(mu, kappa)
    curves = [trace_gamma(mu, kappa, j, profile) for j in range(1, kappa.m + 1)]
    dmin = math.inf
    for i in range(len(curves)):
        for k in range(i + 1, len(curves)):
            dmin = min(dmin, _min_distance(curves[i].polyline, curves[k].polyline))

    angles = [t for c in curves for t in c.endpoint_angles]
    pts = np.asarray(profile.points)
    err = max(c.landing_error for c in curves)
    distinct = len({round(t % 1.0, 9) for t in angles}) == len(angles) == len(pts)

    enclosure = True
    for c in curves:
        for i in range(1, kappa.m + 1):
            inside = i == c.j
            enclosure &= c.enclosed[f"a{i}"] == inside and c.enclosed[f"a{i}*"] == inside

    level = max(float(np.max(np.abs(log_abs_B(c.polyline[1:-1], mu, kappa)))) for c in curves)
    symmetric = True
    for c in curves:
        inv = 1.0 / np.conj(c.polyline)
        symmetric &= _min_distance(inv, c.polyline) <= 1e-7

    theta = _regular_value(profile) + profile.c1
    w = cmath.exp(2j * math.pi * theta)
    roots = preimages(w, mu, kappa)
    on_circle = np.abs(np.abs(roots) - 1.0) < 1e-8
    t_roots = np.angle(roots[on_circle]) / (2 * math.pi)
    signed = int(np.sum(np.sign(lift_derivative(t_roots, mu, kappa)))) if len(t_roots) else 0
    per_curve = {c.j: 0 for c in curves}
    for z in roots[~on_circle]:
        # the inner half is traced and the outer half is its (coarser) reflection
        q = z if abs(z) < 1 else 1 / np.conj(z)
        dists = [_segment_distance(q, c.polyline) for c in curves]
        best = int(np.argmin(dists))
        if dists[best] <= 2 * H_MAX:
            per_curve[curves[best].j] += 1
    total = int(on_circle.sum()) + sum(per_curve.values())
    return DecompositionReport(
        curves=curves,
        min_pairwise_distance=dmin,
        circle_crossings=len(angles) if distinct else len(set(np.round(angles, 9))),
        crossings_match_profile=distinct and err <= 1e-8,
        max_crossing_error=err,
        enclosure_ok=bool(enclosure),
        census_total=total,
        census_expected=kappa.d + 2 * sum(kappa.k),
        census_on_circle=int(on_circle.sum()),
        census_signed_circle=signed,
        census_per_curve=per_curve,
        max_level_error=level,
        symmetric=bool(symmetric),
    )


# -- export -------------------------------------------------------------

SVG_SIZE = 1000
SVG_RADIUS = 400
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _svg_xy(z: complex) -> tuple[float, float]:
    c = SVG_SIZE / 2
    return c + SVG_RADIUS * z.real, c - SVG_RADIUS * z.imag


def export_geometry(
    curves: Sequence[TracedCurve],
    profile: Optional[CriticalProfile] = None,
    format: str = "svg",
    mu: Optional[ParameterPoint] = None,
) -> str:
    """CSV (curve_id, re, im) or SVG rendering of the traced curves."""
    if format == "csv":
        buf = io.StringIO()
        buf.write("curve_id,re,im\n")
        for c in curves:
            for z in c.polyline:
                buf.write(f"{c.j},{z.real:.17g},{z.imag:.17g}\n")
        return buf.getvalue()
    if format != "svg":
        raise ValueError(f"unknown format {format!r}")
    half = SVG_SIZE / 2
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
        f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        f'<rect width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>',
        f'<circle cx="{half}" cy="{half}" r="{SVG_RADIUS}" fill="none" stroke="black" stroke-width="1.5"/>',
    ]
    for c in curves:
        color = _COLORS[(c.j - 1) % len(_COLORS)]
        pts = " ".join("%.3f,%.3f" % _svg_xy(z) for z in np.append(c.polyline, c.polyline[0]))
        out.append(f'<polyline class="curve" data-j="{c.j}" points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
    if profile is not None:
        for z, lab in zip(profile.circle_points(), profile.labels):
            x, y = _svg_xy(z)
            fill = "black" if lab == "max" else "white"
            out.append(f'<circle class="critical" cx="{x:.3f}" cy="{y:.3f}" r="5" fill="{fill}" stroke="black"/>')
    if mu is not None:
        for a in mu.a:
            for z in (a, 1.0 / np.conj(a)):
                x, y = _svg_xy(z)
                out.append(f'<text class="pole" x="{x:.3f}" y="{y:.3f}" font-size="14" text-anchor="middle">&#215;</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def lift_samples(
    mu: ParameterPoint,
    kappa: KappaVector,
    profile: Optional[CriticalProfile] = None,
    n: int = 1001,
) -> tuple[np.ndarray, np.ndarray]:
    """Samples (t, G(t)) of the normalized lift G(t) = F(t + C_1) - C_1 on [0, 1], gauge v_1 in [0, 1)."""
    if profile is None:
        profile = find_critical_points(mu, kappa)
    t = np.linspace(0.0, 1.0, n)
    g = lift_value(t + profile.c1, mu, kappa) - profile.c1
    g = g - math.floor(g[0])
    return t, g


def export_lift(t: np.ndarray, g: np.ndarray, format: str = "csv", profile: Optional[CriticalProfile] = None) -> str:
    if format == "csv":
        rows = ["t,lift"] + [f"{a:.17g},{b:.17g}" for a, b in zip(t, g)]
        return "\n".join(rows) + "\n"
    if format != "svg":
        raise ValueError(f"unknown format {format!r}")
    lo, hi = math.floor(g.min()), math.ceil(g.max())
    margin = 60
    span = SVG_SIZE - 2 * margin
    sx = lambda u: margin + span * u
    sy = lambda v: SVG_SIZE - margin - span * (v - lo) / max(hi - lo, 1)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
        f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        f'<rect width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>',
    ]
    for level in range(lo, hi + 1):
        out.append(f'<line x1="{sx(0):.1f}" y1="{sy(level):.1f}" x2="{sx(1):.1f}" y2="{sy(level):.1f}" stroke="#bbbbbb"/>')
    pts = " ".join(f"{sx(a):.3f},{sy(b):.3f}" for a, b in zip(t, g))
    out.append(f'<polyline class="lift" points="{pts}" fill="none" stroke="black" stroke-width="1.5"/>')
    if profile is not None:
        shift = math.floor(profile.normalized_raw_values()[0])
        for a, b in zip(profile.normalized_points(), profile.normalized_raw_values() - shift):
            out.append(f'<circle class="critical" cx="{sx(a):.3f}" cy="{sy(b):.3f}" r="4" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
