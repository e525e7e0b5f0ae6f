"""Randomized property checks shared by the ``verify`` command and the test suite."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import KappaVector, ParameterPoint
from .critical import (
    find_critical_points,
    gap_vector,
    riemann_hurwitz_report,
    sample_parameter,
    target_from_profile,
)
from .errors import BlaschkeError
from .inverse import continue_to_target, jacobian_phi, jacobian_phi_fd, seed_matching
from .tracer import verify_decomposition

FAMILIES = (
    KappaVector(2, (1,)),
    KappaVector(7, (3, 3)),
    KappaVector(8, (3, 2, 2)),
)

JACOBIAN_RTOL = 1e-5
ROUNDTRIP_TOL = 1e-9


def jacobian_error(mu: ParameterPoint, kappa: KappaVector, profile=None) -> float:
    profile = profile or find_critical_points(mu, kappa)
    ja = jacobian_phi(mu, profile, kappa)
    jf = jacobian_phi_fd(mu, profile, kappa)
    return float(np.max(np.abs(ja - jf)) / np.max(np.abs(ja)))


def roundtrip_error(mu: ParameterPoint, kappa: KappaVector, tol: float = 1e-11):
    """Invert phi at phi(mu) from an independent seed; returns (error, continuation result)."""
    profile = find_critical_points(mu, kappa)
    target = target_from_profile(profile, kappa)
    seed, anchor = seed_matching(profile, mu, kappa)
    res = continue_to_target(target, seed, kappa, tol=tol, anchor=anchor)
    back = target_from_profile(res.profile, kappa).as_array()
    diff = back - target.as_array()
    diff = diff - np.round(np.mean(diff))
    return float(np.max(np.abs(diff))), res


@dataclass
class VerifySummary:
    seed: int
    samples: int
    passed: dict = field(default_factory=dict)
    failed: dict = field(default_factory=dict)
    min_gap_margin: float = np.inf
    max_jacobian_error: float = 0.0
    max_roundtrip_error: float = 0.0
    min_cauchy_ratio: float = np.inf
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(self.failed.values())

    def record(self, name: str, ok: bool, detail: str = ""):
        self.passed.setdefault(name, 0)
        self.failed.setdefault(name, 0)
        if ok:
            self.passed[name] += 1
        else:
            self.failed[name] += 1
            self.failures.append(f"{name}: {detail}")

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "samples": self.samples,
            "ok": self.ok,
            "passed": dict(sorted(self.passed.items())),
            "failed": dict(sorted(self.failed.items())),
            "min_gap_margin": float(f"{self.min_gap_margin:.12g}"),
            "max_jacobian_error": float(f"{self.max_jacobian_error:.6g}"),
            "max_roundtrip_error": float(f"{self.max_roundtrip_error:.6g}"),
            "min_cauchy_ratio": float(f"{self.min_cauchy_ratio:.12g}"),
            "failures": self.failures,
        }


def run_verification(seed: int = 0, samples: int = 100, trace: bool = True) -> VerifySummary:
    """Check gap bounds, Jacobian, round trip, Riemann-Hurwitz and census on random mu.

    Samples cycle through the three test families; sample i draws from its
    own generator seeded by (seed, i), so results do not depend on order.
    """
    summary = VerifySummary(seed=seed, samples=samples)
    for i in range(samples):
        kappa = FAMILIES[i % len(FAMILIES)]
        rng = np.random.default_rng([seed, i])
        tag = f"sample {i} kappa={kappa.as_tuple()}"
        try:
            mu = sample_parameter(rng, kappa)
            profile = find_critical_points(mu, kappa)
        except BlaschkeError as exc:
            summary.record("sampling", False, f"{tag}: {exc}")
            continue
        try:
            gaps = gap_vector(profile, kappa)
            ks = [kappa.k[j] for j in profile.pairing]
            margin = min(min(g, k - g) for g, k in zip(gaps, ks))
            summary.min_gap_margin = min(summary.min_gap_margin, margin)
            summary.record("gap_bounds", True)
        except BlaschkeError as exc:
            summary.record("gap_bounds", False, f"{tag}: {exc}")

        rh = riemann_hurwitz_report(mu, kappa)
        summary.record("riemann_hurwitz", rh.balanced, f"{tag}: {rh}")

        err = jacobian_error(mu, kappa, profile)
        summary.max_jacobian_error = max(summary.max_jacobian_error, err)
        summary.record("jacobian_fd", err <= JACOBIAN_RTOL, f"{tag}: relative error {err:.3g}")

        try:
            rt, res = roundtrip_error(mu, kappa)
            summary.max_roundtrip_error = max(summary.max_roundtrip_error, rt)
            summary.min_cauchy_ratio = min(summary.min_cauchy_ratio, res.min_cauchy_ratio)
            summary.record("roundtrip", rt <= ROUNDTRIP_TOL, f"{tag}: error {rt:.3g}")
        except BlaschkeError as exc:
            summary.record("roundtrip", False, f"{tag}: {type(exc).__name__}: {exc}")

        if trace:
            try:
                report = verify_decomposition(mu, kappa, profile)
                summary.record("decomposition", report.ok, f"{tag}: {report}")
            except BlaschkeError as exc:
                summary.record("decomposition", False, f"{tag}: {type(exc).__name__}: {exc}")
    return summary
