"""Inverting the critical-value map by Newton continuation.

phi maps a parameter mu to the normalized critical values
(F(C_1) - C_1, ..., F(C_2m) - C_1).  It is a diffeomorphism from a
component of the multimodal locus onto the convex polytope V, so a
straight segment in V can be followed back to parameter space.
Critical values are compared modulo a uniform integer shift throughout,
since the lift, eta0 and the pole angles each carry an integer gauge.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .core import (
    KappaVector,
    ParameterPoint,
    derivative_parameter_gradient,
    lift_parameter_gradient,
    lift_second_derivative,
)
from .critical import (
    CriticalProfile,
    TargetVector,
    find_critical_points,
    pair_exponents,
    seed_parameters,
)
from .errors import (
    BlaschkeError,
    ContinuationStall,
    DomainError,
    SeedFailure,
    TargetOutsideV,
)

__all__ = [
    "TargetVector",
    "jacobian_phi",
    "jacobian_phi_fd",
    "cauchy_matrix",
    "cauchy_determinant",
    "normalized_cauchy_determinant",
    "solve_phi_inverse",
    "continue_to_target",
    "ContinuationResult",
    "seed_matching",
]

log = logging.getLogger(__name__)

FD_STEP = 1e-6
DET_FLOOR = 1e-12


def _modular_residual(values: np.ndarray, target: np.ndarray) -> np.ndarray:
    res = values - target
    return res - np.round(np.mean(res))


def jacobian_phi(
    mu: ParameterPoint,
    profile: CriticalProfile,
    kappa: KappaVector,
    normalized: bool = True,
) -> np.ndarray:
    """Analytic Jacobian of phi with respect to (eta0, a1, r2, eta2, ...).

    Because F'(C_i) = 0, d/dmu F(C_i(mu)) is just the partial derivative of
    F at the fixed point C_i.  The normalization subtracts dC_1/dmu from
    every row, obtained by implicit differentiation of F'(C_1) = 0.
    """
    points = np.asarray(profile.points)
    jac = lift_parameter_gradient(points, mu, kappa)
    if normalized:
        c1 = points[0]
        dc1 = -derivative_parameter_gradient(c1, mu, kappa) / lift_second_derivative(c1, mu, kappa)
        jac = jac - dc1[None, :]
    return jac


def _phi_raw(mu, kappa, anchor, pairing, normalized=True):
    profile = find_critical_points(mu, kappa, anchor=anchor, pairing=pairing)
    if normalized:
        return profile.normalized_raw_values(), profile
    return np.asarray(profile.raw_values), profile


def jacobian_phi_fd(
    mu: ParameterPoint,
    profile: CriticalProfile,
    kappa: KappaVector,
    normalized: bool = True,
    step: float = FD_STEP,
) -> np.ndarray:
    """Central finite-difference Jacobian of phi, tracking the labeling of ``profile``."""
    base = mu.as_vector()
    n = len(base)
    jac = np.empty((2 * kappa.m, n))
    for col in range(n):
        plus, minus = base.copy(), base.copy()
        plus[col] += step
        minus[col] -= step
        vp, _ = _phi_raw(ParameterPoint.from_vector(plus), kappa, profile.c1, profile.pairing, normalized)
        vm, _ = _phi_raw(ParameterPoint.from_vector(minus), kappa, profile.c1, profile.pairing, normalized)
        diff = vp - vm
        jac[:, col] = (diff - np.round(diff[0])) / (2.0 * step)
    return jac


def _cauchy_nodes(profile: CriticalProfile, mu: ParameterPoint):
    c = profile.circle_points()
    b = []
    for a in mu.a:
        b.extend((a, 1.0 / np.conj(a)))
    return c, np.array(b)


def cauchy_matrix(profile: CriticalProfile, mu: ParameterPoint) -> np.ndarray:
    """The matrix [1 / (c_i - b_j)] with b = (a1, 1/a1, a2, 1/conj(a2), ...)."""
    c, b = _cauchy_nodes(profile, mu)
    return 1.0 / (c[:, None] - b[None, :])


def cauchy_determinant(profile: CriticalProfile, mu: ParameterPoint) -> complex:
    """Closed-form determinant of :func:`cauchy_matrix`.

    prod_{i<j} (c_j - c_i)(b_i - b_j) / prod_{i,j} (c_i - b_j)
    """
    c, b = _cauchy_nodes(profile, mu)
    n = len(c)
    num = 1.0 + 0j
    for i in range(n):
        for j in range(i + 1, n):
            num *= (c[j] - c[i]) * (b[i] - b[j])
    den = np.prod(c[:, None] - b[None, :])
    return complex(num / den)


def normalized_cauchy_determinant(profile: CriticalProfile, mu: ParameterPoint) -> float:
    """|det| divided by the product of row norms (Hadamard ratio, in [0, 1])."""
    rows = np.linalg.norm(cauchy_matrix(profile, mu), axis=1)
    return abs(cauchy_determinant(profile, mu)) / float(np.prod(rows))


@dataclass
class ContinuationResult:
    mu: ParameterPoint
    profile: CriticalProfile
    residual: float
    steps_accepted: int = 0
    steps_rejected: int = 0
    newton_iterations: int = 0
    s_history: list = field(default_factory=list)
    min_cauchy_ratio: float = np.inf
    min_abs_det: float = np.inf
    det_signs: list = field(default_factory=list)


class _Corrector:
    def __init__(self, kappa, pairing, jacobian):
        self.kappa = kappa
        self.pairing = pairing
        self.jacobian = jacobian
        self.newton_iterations = 0

    def evaluate(self, vec, anchor):
        mu = ParameterPoint.from_vector(vec)
        values, profile = _phi_raw(mu, self.kappa, anchor, self.pairing)
        return mu, profile, values

    def jac(self, mu, profile):
        if self.jacobian == "fd":
            return jacobian_phi_fd(mu, profile, self.kappa)
        return jacobian_phi(mu, profile, self.kappa)

    def correct(self, vec, anchor, target, tol, maxiter=8):
        """Damped Newton on phi(mu) = target (mod uniform integers)."""
        try:
            mu, profile, values = self.evaluate(vec, anchor)
        except (BlaschkeError, DomainError):
            return None
        res = _modular_residual(values, target)
        norm = np.max(np.abs(res))
        for _ in range(maxiter):
            if norm <= tol:
                return mu, profile, norm
            self.newton_iterations += 1
            jac = self.jac(mu, profile)
            try:
                delta = np.linalg.solve(jac, res)
            except np.linalg.LinAlgError:
                return None
            lam = 1.0
            for _ in range(6):
                trial = mu.as_vector() - lam * delta
                try:
                    t_mu, t_profile, t_values = self.evaluate(trial, profile.c1)
                except (BlaschkeError, DomainError):
                    lam *= 0.5
                    continue
                t_res = _modular_residual(t_values, target)
                t_norm = np.max(np.abs(t_res))
                if t_norm < norm or t_norm <= tol:
                    mu, profile, res, norm = t_mu, t_profile, t_res, t_norm
                    break
                lam *= 0.5
            else:
                return None
        return (mu, profile, norm) if norm <= tol else None


def continue_to_target(
    v_target: Union[TargetVector, Sequence[float]],
    seed: ParameterPoint,
    kappa: KappaVector,
    tol: float = 1e-10,
    anchor: Optional[float] = None,
    pairing: Optional[Sequence[int]] = None,
    jacobian: str = "analytic",
    path_tol: float = 1e-7,
) -> ContinuationResult:
    """Follow v(s) = (1 - s) phi(seed) + s v_target from s = 0 to 1.

    Step control: initial ds = 0.1, halved on corrector failure, doubled
    after two consecutive successes, capped at 0.25.
    """
    seed.check(kappa)
    start = find_critical_points(seed, kappa, anchor=anchor, pairing=pairing)
    pairing = start.pairing
    if not isinstance(v_target, TargetVector):
        v_target = TargetVector(tuple(v_target), kappa, pair_k=pair_exponents(start, kappa))
    problems = v_target.violations()
    if problems:
        raise TargetOutsideV("; ".join(problems))

    v0 = start.normalized_raw_values()
    vt = np.asarray(v_target.v)
    vt = vt + np.round(np.mean(v0 - vt))
    corrector = _Corrector(kappa, pairing, jacobian)
    mu, profile = seed, start
    result = ContinuationResult(mu=mu, profile=profile, residual=float(np.max(np.abs(v0 - vt))))

    def accept(mu, profile):
        ratio = normalized_cauchy_determinant(profile, mu)
        result.min_cauchy_ratio = min(result.min_cauchy_ratio, ratio)
        det = np.linalg.det(corrector.jac(mu, profile))
        result.min_abs_det = min(result.min_abs_det, abs(det))
        result.det_signs.append(int(np.sign(det)))

    accept(mu, profile)
    if result.residual <= tol:
        return result

    s, ds, streak = 0.0, 0.1, 0
    result.s_history.append(0.0)
    direction = vt - v0
    while s < 1.0:
        s_new = min(1.0, s + ds)
        final = s_new >= 1.0
        target = (1.0 - s_new) * v0 + s_new * vt
        try:
            tangent = np.linalg.solve(corrector.jac(mu, profile), direction)
            predicted = mu.as_vector() + (s_new - s) * tangent
        except np.linalg.LinAlgError:
            predicted = mu.as_vector()
        outcome = corrector.correct(predicted, profile.c1, target, tol if final else path_tol)
        if outcome is None:
            result.steps_rejected += 1
            streak = 0
            ds *= 0.5
            if ds < 1e-12:
                raise ContinuationStall(f"continuation stalled at s = {s:.6g}", s_reached=s)
            continue
        mu, profile, _ = outcome
        s = s_new
        result.steps_accepted += 1
        result.s_history.append(s)
        accept(mu, profile)
        streak += 1
        if streak >= 2:
            ds = min(0.25, 2.0 * ds)
            streak = 0

    values = profile.normalized_raw_values()
    result.mu, result.profile = mu, profile
    result.residual = float(np.max(np.abs(_modular_residual(values, vt))))
    result.newton_iterations = corrector.newton_iterations
    log.debug("continuation: %d accepted, %d rejected", result.steps_accepted, result.steps_rejected)
    return result


def solve_phi_inverse(
    v_target: Union[TargetVector, Sequence[float]],
    seed: ParameterPoint,
    kappa: KappaVector,
    tol: float = 1e-10,
    **kwargs,
) -> ParameterPoint:
    """Parameter mu with |phi(mu) - v_target| <= tol (modulo the integer gauge)."""
    return continue_to_target(v_target, seed, kappa, tol=tol, **kwargs).mu


def seed_matching(profile: CriticalProfile, mu: ParameterPoint, kappa: KappaVector):
    """Seed with the pole angles of ``mu``, labeled like ``profile``.

    Returns ``(seed, anchor)`` where ``anchor`` picks the seed maximum that
    belongs to the same pole as the first turning pair of ``profile``.
    """
    seed = seed_parameters(kappa.m, kappa, mu.angles)
    start = find_critical_points(seed, kappa)
    lead = profile.pairing[0]
    for p, pole in enumerate(start.pairing):
        if pole == lead:
            return seed, start.points[2 * p]
    raise SeedFailure("seed pairing does not contain the leading pole")
