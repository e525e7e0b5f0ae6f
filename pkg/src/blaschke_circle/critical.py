"""Turning points of the circle map, critical values and combinatorial type.

Labeling convention: the first critical point C_1 is the first local maximum
of the lift in [0, 1) (or, when continuing along a path, the maximum closest
to the previous C_1).  Turning points are then listed in cyclic order, so odd
indices are maxima and each consecutive (max, min) pair bounds one
decreasing arc.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._roots import safeguarded_newton
from .core import (
    KappaVector,
    ParameterPoint,
    lift_derivative,
    lift_second_derivative,
    lift_value,
)
from .errors import (
    DegenerateCritical,
    DomainError,
    GapViolation,
    NotAlternating,
    NotMultimodal,
    SeedFailure,
)

INTEGER_TIE = 1e-9
DEGENERACY = 1e-9
REFINE_FACTOR = 16


@dataclass(frozen=True)
class CriticalProfile:
    """The 2m labeled turning points of F and their critical values.

    ``values`` are F(C_i) + gauge_shift with the shift chosen so that
    values[0] lies in [0, 1); ``raw_values`` are the unshifted F(C_i).
    ``pairing[p]`` is the (0-based) pole index whose curve carries the
    turning pair (C_{2p+1}, C_{2p+2}).
    """

    m: int
    points: tuple[float, ...]
    values: tuple[float, ...]
    raw_values: tuple[float, ...]
    gauge_shift: int
    labels: tuple[str, ...]
    pairing: tuple[int, ...]
    pairing_certain: bool = True
    derivative_scale: float = 1.0

    @property
    def c1(self) -> float:
        return self.points[0]

    def circle_points(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.asarray(self.points))

    def normalized_points(self) -> np.ndarray:
        return np.asarray(self.points) - self.points[0]

    def normalized_raw_values(self) -> np.ndarray:
        """F(C_i) - C_1 without any integer gauge."""
        return np.asarray(self.raw_values) - self.points[0]


@dataclass(frozen=True)
class TargetVector:
    """A vector of critical values together with the V-membership data.

    ``pair_k[p]`` is the exponent bounding the gap of the p-th turning pair
    (k_j of the pole carrying that pair).
    """

    v: tuple[float, ...]
    kappa: KappaVector
    pair_k: tuple[int, ...] = ()
    points: tuple[float, ...] = ()
    gauge_shift: int = 0

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(float(x) for x in self.v))
        if not self.pair_k:
            object.__setattr__(self, "pair_k", tuple(self.kappa.k))
        if len(self.v) != 2 * self.kappa.m:
            raise DomainError(f"expected {2 * self.kappa.m} critical values, got {len(self.v)}")

    @property
    def m(self) -> int:
        return self.kappa.m

    def as_array(self) -> np.ndarray:
        return np.asarray(self.v)

    def violations(self) -> list[str]:
        """Failed inequalities among those defining V (empty when v is in V)."""
        v = self.v
        out = []
        for i in range(len(v) - 1):
            # 1-based index i+1: sign (-1)^(i+1)
            sign = -1.0 if i % 2 == 0 else 1.0
            if not sign * (v[i + 1] - v[i]) > 0:
                out.append(f"alternation fails between v{i + 1} and v{i + 2}")
        for p, k in enumerate(self.pair_k):
            gap = v[2 * p] - v[2 * p + 1]
            if not 0.0 < gap < k:
                out.append(f"gap {p + 1} = {gap:.6g} outside (0, {k})")
        if not v[-1] < v[0] + self.kappa.d:
            out.append("wrap inequality v_2m < v_1 + d fails")
        return out

    @property
    def in_V(self) -> bool:
        return not self.violations()

    @property
    def tau(self) -> tuple[int, ...]:
        return compute_type(self.v)


def _grid_size(kappa: KappaVector) -> int:
    return max(1024, 64 * (kappa.k0 + sum(kappa.k)))


def _scan(mu, kappa, base, n):
    grid = base + np.arange(n + 1) / n
    fp = lift_derivative(grid, mu, kappa)
    signs = np.where(fp < 0, -1, 1)
    idx = np.nonzero(signs[:-1] != signs[1:])[0]
    return grid, fp, signs, idx


def _raw_turning_points(mu, kappa, base):
    n = _grid_size(kappa)
    grid, fp, signs, idx = _scan(mu, kappa, base, n)
    if len(idx) != 2 * kappa.m:
        grid, fp, signs, idx = _scan(mu, kappa, base, n * REFINE_FACTOR)
    if len(idx) != 2 * kappa.m:
        raise NotMultimodal(
            f"F' has {len(idx)} sign changes per period, expected {2 * kappa.m}", count=len(idx)
        )

    def f(t):
        return lift_derivative(t, mu, kappa)

    def fprime(t):
        return lift_second_derivative(t, mu, kappa)

    roots, labels = [], []
    for i in idx:
        root = safeguarded_newton(f, fprime, grid[i], grid[i + 1], fp[i], fp[i + 1])
        roots.append(root)
        # a grid node may sit exactly on a root (F' = 0 counts as positive)
        labels.append("max" if signs[i] > signs[i + 1] else "min")
    scale = 1.0 + float(np.max(np.abs(fp)))
    for root in roots:
        if abs(fprime(root)) < DEGENERACY * scale:
            raise DegenerateCritical(f"turning point at t={root:.12g} is degenerate")
    return np.array(roots), labels, scale


def _eta_pairing(points, angles):
    """Assign each decreasing arc [C_{2p-1}, C_{2p}] the pole whose angle it contains."""
    m = len(angles)
    owners = []
    for p in range(m):
        start, stop = points[2 * p], points[2 * p + 1]
        inside = [j for j in range(m) if (angles[j] - start) % 1.0 < stop - start]
        owners.append(inside)
    if all(len(o) == 1 for o in owners) and len({o[0] for o in owners}) == m:
        return tuple(o[0] for o in owners), True
    # fall back to nearest arc midpoint, greedily
    mids = [(points[2 * p] + points[2 * p + 1]) / 2 for p in range(m)]
    cand = sorted(
        (min((angles[j] - mids[p]) % 1.0, (mids[p] - angles[j]) % 1.0), p, j)
        for p in range(m)
        for j in range(m)
    )
    chosen: dict[int, int] = {}
    used = set()
    for _, p, j in cand:
        if p not in chosen and j not in used:
            chosen[p] = j
            used.add(j)
    return tuple(chosen[p] for p in range(m)), False


def find_critical_points(
    mu: ParameterPoint,
    kappa: KappaVector,
    anchor: Optional[float] = None,
    pairing: Optional[Sequence[int]] = None,
) -> CriticalProfile:
    """Locate and label the 2m turning points of the lift.

    ``anchor`` is a previous value of C_1; the maximum nearest to it is
    chosen and lifted continuously.  ``pairing`` carries a known pole
    assignment along a continuation path.
    """
    mu.check(kappa)
    base = 0.0 if anchor is None else anchor - 0.5
    roots, labels, scale = _raw_turning_points(mu, kappa, base)
    maxima = [i for i, lab in enumerate(labels) if lab == "max"]
    if anchor is None:
        first = maxima[0]
        c1 = roots[first]
    else:
        first = min(maxima, key=lambda i: abs(roots[i] - anchor))
        c1 = roots[first]
    order = [(first + i) % len(roots) for i in range(len(roots))]
    points = np.array([roots[i] + (1.0 if roots[i] < c1 else 0.0) for i in order])
    labels = tuple(labels[i] for i in order)
    raw = lift_value(points, mu, kappa)
    shift = -math.floor(raw[0])
    if pairing is None:
        pairing, certain = _eta_pairing(points, mu.angles)
    else:
        pairing, certain = tuple(int(p) for p in pairing), True
    return CriticalProfile(
        m=kappa.m,
        points=tuple(float(p) for p in points),
        values=tuple(float(x + shift) for x in raw),
        raw_values=tuple(float(x) for x in raw),
        gauge_shift=int(shift),
        labels=labels,
        pairing=tuple(pairing),
        pairing_certain=certain,
        derivative_scale=scale,
    )


def is_in_Delta(mu: ParameterPoint, kappa: KappaVector) -> bool:
    """True when F' has exactly 2m transversal sign changes per period."""
    try:
        mu.check(kappa)
        _raw_turning_points(mu, kappa, 0.0)
    except (NotMultimodal, DegenerateCritical, DomainError):
        return False
    return True


def seed_parameters(
    m: int,
    kappa: KappaVector,
    eta_guesses: Sequence[float],
    radii: Optional[Sequence[float]] = None,
) -> ParameterPoint:
    """A parameter in Delta with the given pole angles.

    Starting from ``radii`` (default 1.2 for every pole), all excesses
    r_j - 1 are halved together until the circle map is 2m-multimodal,
    which happens for radii close enough to 1 when the angles are distinct.
    """
    guesses = [float(e) % 1.0 for e in eta_guesses]
    if len(guesses) != m or kappa.m != m:
        raise DomainError(f"need {m} angle guesses and exponents, got {len(guesses)}/{kappa.m}")
    if guesses[0] != 0.0:
        raise DomainError("the first angle guess must be 0 (a1 is real)")
    reduced = sorted(guesses)
    gaps = np.diff(reduced + [reduced[0] + 1.0])
    if np.any(gaps < 1e-12):
        raise DomainError(f"angle guesses must be distinct mod 1, got {eta_guesses}")
    r = np.full(m, 1.2) if radii is None else np.asarray(radii, dtype=float)
    if r.shape != (m,) or np.any(r <= 1.0):
        raise DomainError(f"need {m} seed radii > 1, got {radii}")
    for _ in range(60):
        mu = ParameterPoint(0.0, r[0], tuple(zip(r[1:], guesses[1:])))
        if is_in_Delta(mu, kappa):
            return mu
        r = 1.0 + 0.5 * (r - 1.0)
    raise SeedFailure(f"no multimodal seed found for angles {guesses}")


def pair_exponents(profile: CriticalProfile, kappa: KappaVector) -> tuple[int, ...]:
    return tuple(kappa.k[j] for j in profile.pairing)


def target_from_profile(profile: CriticalProfile, kappa: KappaVector) -> TargetVector:
    raw = profile.normalized_raw_values()
    shift = -math.floor(raw[0])
    return TargetVector(
        v=tuple(raw + shift),
        kappa=kappa,
        pair_k=pair_exponents(profile, kappa),
        points=tuple(float(p) for p in profile.normalized_points()),
        gauge_shift=int(shift),
    )


def compute_phi(
    mu: ParameterPoint,
    kappa: KappaVector,
    anchor: Optional[float] = None,
    pairing: Optional[Sequence[int]] = None,
) -> TargetVector:
    """Normalized critical values F(C_i) - C_1, gauge-shifted so v_1 is in [0, 1)."""
    return target_from_profile(find_critical_points(mu, kappa, anchor, pairing), kappa)


def compute_type(v: Sequence[float], kappa: Optional[KappaVector] = None) -> tuple[int, ...]:
    """Type vector of an alternating critical-value vector.

    tau_j = (-1)^j * (minimal number of integer translates met by the
    j-th critical-value interval), i.e. floor of its length, or the length
    itself when it is an integer.
    """
    v = np.asarray(v, dtype=float)
    if kappa is not None and len(v) != 2 * kappa.m:
        raise DomainError(f"expected {2 * kappa.m} values, got {len(v)}")
    tau = []
    for j in range(1, len(v)):
        step = v[j] - v[j - 1]
        if not (-1) ** j * step > 0:
            raise NotAlternating(f"values {j} -> {j + 1} do not alternate: step {step:.6g}")
        length = abs(step)
        nearest = round(length)
        count = int(nearest) if abs(length - nearest) < INTEGER_TIE else math.floor(length)
        tau.append((-1) ** j * count)
    return tuple(tau)


@dataclass(frozen=True)
class RiemannHurwitzReport:
    sphere_defect_total: int
    off_circle_budget: int
    residual: int
    observed_circle_count: int
    m: int

    @property
    def balanced(self) -> bool:
        return self.residual == 2 * self.m == self.observed_circle_count


def riemann_hurwitz_report(mu: ParameterPoint, kappa: KappaVector) -> RiemannHurwitzReport:
    """Defect bookkeeping: total 2 d_B - 2 against the defects at 0, inf, a_j, 1/conj(a_j)."""
    total = 2 * kappa.sphere_degree - 2
    budget = 2 * (kappa.k0 - 1) + 2 * sum(k - 1 for k in kappa.k)
    profile = find_critical_points(mu, kappa)
    return RiemannHurwitzReport(
        sphere_defect_total=total,
        off_circle_budget=budget,
        residual=total - budget,
        observed_circle_count=len(profile.points),
        m=kappa.m,
    )


def gap_vector(profile: CriticalProfile, kappa: KappaVector) -> list[float]:
    """Gaps v_{2j-1} - v_{2j}; each must lie strictly inside (0, k_j)."""
    gaps = []
    for p, k in enumerate(pair_exponents(profile, kappa)):
        gap = profile.values[2 * p] - profile.values[2 * p + 1]
        if not 0.0 < gap < k:
            raise GapViolation(f"gap {p + 1} = {gap:.12g} not in (0, {k})")
        gaps.append(gap)
    return gaps


def sample_parameter(
    rng: np.random.Generator,
    kappa: KappaVector,
    radius_range: tuple[float, float] = (1.05, 1.6),
    min_separation: float = 0.08,
    max_tries: int = 1000,
) -> ParameterPoint:
    """Random parameter in Delta: uniform eta0, radii and well-separated pole angles (rejection sampling)."""
    m = kappa.m
    for _ in range(max_tries):
        angles = np.concatenate([[0.0], rng.uniform(0.0, 1.0, m - 1)])
        ordered = np.sort(angles)
        if m > 1 and np.min(np.diff(np.append(ordered, 1.0))) < min_separation:
            continue
        radii = rng.uniform(*radius_range, m)
        mu = ParameterPoint(rng.uniform(0.0, 1.0), radii[0], tuple(zip(radii[1:], angles[1:])))
        if is_in_Delta(mu, kappa):
            return mu
    raise SeedFailure(f"no multimodal sample found for kappa = {kappa.as_tuple()}")
