"""Thurston pull-back operator on control configurations and its fixed-point driver.

A control configuration x = (x_1 = 0 < x_2 < ... < x_k < 1) assigns a
position to every marked point.  One application of T

1. turns x into critical values v (see :func:`resolve_offsets`),
2. finds mu with phi(mu) = v by continuation,
3. pulls the marked points back through the normalized lift
   G(t) = F(t + C_1) - C_1 (modulo a uniform integer).

Fixed points of T are the post-critically finite maps realizing the model.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._roots import safeguarded_newton
from .combinatorics import CombinatorialModel, resolve_offsets
from .core import (
    KappaVector,
    ParameterPoint,
    lift_derivative,
    lift_second_derivative,
    lift_value,
)
from .critical import (
    CriticalProfile,
    compute_type,
    find_critical_points,
    gap_vector,
    seed_parameters,
)
from .errors import BranchMismatch, DomainError, NotConverged
from .inverse import continue_to_target

log = logging.getLogger(__name__)

TIE = 1e-12


def as_configuration(x: Sequence[float], k: Optional[int] = None) -> np.ndarray:
    """Validate a control configuration and return it as a float array."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or (k is not None and len(x) != k):
        raise DomainError(f"configuration must have {k} entries, got shape {x.shape}")
    if x[0] != 0.0:
        raise DomainError("configuration must start at x_1 = 0")
    if np.any(np.diff(x) <= 0) or x[-1] >= 1.0:
        raise DomainError("configuration must be strictly increasing inside [0, 1)")
    return x


def equally_spaced(k: int) -> np.ndarray:
    return np.arange(k) / k


def family_kappa(model: CombinatorialModel, pairing: Sequence[int]) -> KappaVector:
    """Exponents indexed by pole, given which pole carries each turning pair."""
    k = [0] * model.m
    for p, j in enumerate(pairing):
        k[j] = model.kappa[1 + p]
    return KappaVector(model.kappa[0], tuple(k))


def _default_pairing(m: int) -> tuple[int, ...]:
    # seeds put pole j+1 at the angle of turning point t_{2j+1}; the first
    # maximum in [0, 1) then belongs to pole 2 and the last pair to pole 1
    return tuple((p + 1) % m for p in range(m))


@dataclass(frozen=True)
class PullBack:
    y: np.ndarray
    mu: ParameterPoint
    kappa: KappaVector
    profile: CriticalProfile
    target: tuple[float, ...]
    realized_type: tuple[int, ...]


def _normalized_lift(profile: CriticalProfile, mu, kappa, target):
    c1 = profile.c1
    shift = round(float(np.mean(profile.normalized_raw_values() - np.asarray(target))))

    def g(t):
        return lift_value(np.asarray(t) + c1, mu, kappa) - c1 - shift

    def gp(t):
        return lift_derivative(np.asarray(t) + c1, mu, kappa)

    return g, gp


SEED_SEPARATION = 0.02


def _seed(model: CombinatorialModel, x: np.ndarray, radii=None):
    guesses = [x[t - 1] for t in model.turning_indices[0::2]]
    ring = np.diff(np.append(guesses, 1.0))
    if np.min(ring) < SEED_SEPARATION:
        # nearly coincident poles force r ~ 1; spread them instead
        guesses = [j / model.m for j in range(model.m)]
    pairing = _default_pairing(model.m)
    for _ in range(2):
        kappa = family_kappa(model, pairing)
        seed = seed_parameters(model.m, kappa, guesses, radii)
        profile = find_critical_points(seed, kappa)
        if profile.pairing == pairing:
            return seed, kappa, profile
        pairing = profile.pairing
    raise BranchMismatch(f"seed pole pairing {profile.pairing} is unstable")


def _place_branch(values, start, stop, increasing):
    """Greedy monotone placement of target values (fractions mod 1) after ``start``."""
    out = []
    cur = start
    for f in values:
        step = ((f - cur) if increasing else (cur - f)) % 1.0
        if step < TIE or step > 1.0 - TIE:
            step = 1.0
        cur = cur + step if increasing else cur - step
        out.append(cur)
    if out:
        beyond = (out[-1] - stop) if increasing else (stop - out[-1])
        if beyond > TIE:
            raise BranchMismatch(
                f"marked points need a value window beyond {stop:.12g} (reached {out[-1]:.12g})"
            )
    return out


def pull_back(
    x: Sequence[float],
    model: CombinatorialModel,
    warm_start: Optional[ParameterPoint] = None,
    anchor: Optional[float] = None,
    pairing: Optional[Sequence[int]] = None,
    solve_tol: float = 1e-12,
    jacobian: str = "analytic",
    seed_radii: Optional[Sequence[float]] = None,
) -> PullBack:
    """One application of T with full diagnostics (see :func:`apply_T`)."""
    x = as_configuration(x, model.k_count)
    target = resolve_offsets(x, model)
    if warm_start is None:
        seed, kappa, start = _seed(model, x, seed_radii)
        anchor, pairing = start.c1, start.pairing
    else:
        seed = warm_start
        if pairing is None:
            guess = family_kappa(model, _default_pairing(model.m))
            pairing = find_critical_points(seed, guess, anchor=anchor).pairing
        kappa = family_kappa(model, pairing)
    res = continue_to_target(
        target, seed, kappa, tol=solve_tol, anchor=anchor, pairing=pairing, jacobian=jacobian
    )
    mu, profile = res.mu, res.profile
    v = np.asarray(target.v)
    g, gp = _normalized_lift(profile, mu, kappa, v)

    m2 = 2 * model.m
    t = list(model.turning_indices) + [model.k_count + 1]
    C = list(profile.normalized_points()) + [1.0]
    vals = list(v) + [v[0] + model.d]
    y = np.zeros(model.k_count)
    for b in range(m2):
        y[t[b] - 1] = C[b]
        interior = list(range(t[b] + 1, t[b + 1]))
        if not interior:
            continue
        increasing = b % 2 == 1
        goals = _place_branch([x[model.sigma[i - 1] - 1] for i in interior], vals[b], vals[b + 1], increasing)
        lo, hi = C[b], C[b + 1]
        glo, ghi = g(lo), g(hi)
        for i, goal in zip(interior, goals):
            flo, fhi = glo - goal, ghi - goal
            if abs(flo) <= TIE:
                y[i - 1] = lo
            elif abs(fhi) <= TIE or flo * fhi > 0:
                y[i - 1] = hi
            else:
                y[i - 1] = safeguarded_newton(lambda s: g(s) - goal, gp, lo, hi, fa=flo, fb=fhi)
            lo, glo = y[i - 1], g(y[i - 1])
    y[0] = 0.0
    realized = profile.normalized_raw_values()
    realized = realized - np.floor(realized[0])
    return PullBack(
        y=y,
        mu=mu,
        kappa=kappa,
        profile=profile,
        target=tuple(target.v),
        realized_type=compute_type(realized),
    )


def apply_T(
    x: Sequence[float],
    model: CombinatorialModel,
    warm_start: Optional[ParameterPoint] = None,
    **kwargs,
) -> tuple[np.ndarray, ParameterPoint]:
    """The pull-back T(x) and the parameter mu realizing the critical values of x.

    Parameters
    ----------
    x : sequence of float
        Control configuration, 0 = x_1 < ... < x_k < 1.
    model : CombinatorialModel
    warm_start : ParameterPoint, optional
        Starting parameter for the continuation.  Without it a fresh seed
        is built with pole angles at the odd turning positions of ``x``.

    Returns
    -------
    y : ndarray
        New configuration, with G(y_i) = x_{sigma(i)} modulo 1.
    mu : ParameterPoint
    """
    pb = pull_back(x, model, warm_start=warm_start, **kwargs)
    return pb.y, pb.mu


def _circle_dist(a, b):
    d = np.abs(np.asarray(a) - np.asarray(b)) % 1.0
    return np.minimum(d, 1.0 - d)


def fixed_point_residual(
    x: Sequence[float],
    mu: ParameterPoint,
    model: CombinatorialModel,
    profile: Optional[CriticalProfile] = None,
    kappa: Optional[KappaVector] = None,
) -> float:
    """max_i circle distance between G(x_i) and x_{sigma(i)}.

    Without an explicit ``profile`` every maximum of F is tried as C_1
    (with the matching pole pairing) and the smallest residual is returned.
    """
    x = np.asarray(x, dtype=float)
    images = x[np.asarray(model.sigma) - 1]
    if profile is not None:
        kappa = kappa or family_kappa(model, profile.pairing)
        candidates = [(profile, kappa)]
    else:
        guess = kappa or family_kappa(model, _default_pairing(model.m))
        first = find_critical_points(mu, guess)
        candidates = []
        for c in first.points[0::2]:
            prof = find_critical_points(mu, guess, anchor=c)
            candidates.append((find_critical_points(mu, family_kappa(model, prof.pairing), anchor=c),
                               family_kappa(model, prof.pairing)))
    best = np.inf
    for prof, kap in candidates:
        vals = lift_value(x + prof.c1, mu, kap) - prof.c1
        best = min(best, float(np.max(_circle_dist(vals, images))))
    return best


def derivative_bound(mu: ParameterPoint, kappa: KappaVector, n: int = 2048) -> float:
    """Empirical sup of |F'| and |F''| on a grid."""
    t = np.arange(n) / n
    return float(max(np.max(np.abs(lift_derivative(t, mu, kappa))),
                     np.max(np.abs(lift_second_derivative(t, mu, kappa)))))


@dataclass
class IterationResult:
    x: np.ndarray
    mu: ParameterPoint
    residual: float
    iterations: int
    residual_history: list = field(default_factory=list)
    step_history: list = field(default_factory=list)
    converged: bool = False
    M_estimate: float = 0.0
    kappa: Optional[KappaVector] = None
    profile: Optional[CriticalProfile] = None
    critical_values: tuple = ()


def iterate_to_fixed_point(
    model: CombinatorialModel,
    x0: Optional[Sequence[float]] = None,
    tol: float = 1e-10,
    max_iter: int = 500,
    solve_tol: float = 1e-12,
    jacobian: str = "analytic",
    check_gaps: bool = True,
    seed_radii: Optional[Sequence[float]] = None,
) -> IterationResult:
    """Iterate x <- T(x), warm-starting each solve from the previous mu.

    Stops once min(residual, step) < tol, where step is the sup-norm change
    of x.  Raises :class:`NotConverged` (carrying the partial result) after
    ``max_iter`` iterations.  ``seed_radii`` sets the starting pole radii of
    the first solve (see :func:`seed_parameters`).
    """
    if x0 is None:
        x0 = model.x0 if model.x0 is not None else equally_spaced(model.k_count)
    x = as_configuration(x0, model.k_count)
    warm = anchor = pairing = None
    result = None
    M = 0.0
    for it in range(1, max_iter + 1):
        pb = pull_back(x, model, warm_start=warm, anchor=anchor, pairing=pairing,
                       solve_tol=solve_tol, jacobian=jacobian,
                       seed_radii=seed_radii if warm is None else None)
        if pb.realized_type != model.tau:
            raise BranchMismatch(f"realized type {pb.realized_type} differs from {model.tau}")
        if check_gaps:
            gap_vector(pb.profile, pb.kappa)
        step = float(np.max(np.abs(pb.y - x)))
        residual = fixed_point_residual(pb.y, pb.mu, model, profile=pb.profile, kappa=pb.kappa)
        M = max(M, derivative_bound(pb.mu, pb.kappa))
        if result is None:
            result = IterationResult(x=pb.y, mu=pb.mu, residual=residual, iterations=it)
        result.x, result.mu, result.residual, result.iterations = pb.y, pb.mu, residual, it
        result.kappa, result.profile, result.critical_values = pb.kappa, pb.profile, pb.target
        result.residual_history.append(residual)
        result.step_history.append(step)
        result.M_estimate = M
        log.debug("iteration %d: residual %.3e step %.3e", it, residual, step)
        if min(residual, step) < tol:
            # report the residual of the accepted pair; step < tol bounds it too
            result.converged = True
            return result
        x = pb.y
        warm, anchor, pairing = pb.mu, pb.profile.c1, pb.profile.pairing
    raise NotConverged(
        f"no fixed point within {max_iter} iterations (residual {result.residual:.3e})", result
    )


def w_epsilon_check(
    x: Sequence[float],
    eps: float,
    s: Sequence[int],
    c: float,
    include_wrap: bool = True,
) -> bool:
    """True iff x_{i+1} - x_i >= eps / c**s(i) for every consecutive gap."""
    if eps <= 0 or c <= 1:
        raise DomainError("need eps > 0 and c > 1")
    x = np.asarray(x, dtype=float)
    gaps = list(np.diff(x))
    if include_wrap:
        gaps.append(1.0 + x[0] - x[-1])
    s = np.asarray(s, dtype=float)[: len(gaps)]
    return bool(np.all(np.asarray(gaps) >= eps / c ** s))


