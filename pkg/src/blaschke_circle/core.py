"""Evaluation of the Blaschke-type product and the lift of its circle restriction.

The family is

    B(z) = exp(2 pi i eta0) z**k0 * prod_j ((z - a_j) / (1 - conj(a_j) z))**k_j

with |a_j| > 1, a_1 real.  All angles are measured in turns.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi

#: the point at infinity of the Riemann sphere
INFINITY = complex(math.inf, 0.0)


def is_infinite(z: complex) -> bool:
    return cmath.isinf(z)


@dataclass(frozen=True)
class KappaVector:
    """Exponents (k0, k1, ..., km) of the family."""

    k0: int
    k: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))
        if len(self.k) < 1:
            raise DomainError("kappa needs at least one pole exponent")
        if int(self.k0) < 2:
            raise DomainError(f"k0 must be >= 2, got {self.k0}")
        if any(x < 1 for x in self.k):
            raise DomainError(f"pole exponents must be >= 1, got {self.k}")

    @classmethod
    def from_sequence(cls, values: Sequence[int]) -> "KappaVector":
        values = [int(v) for v in values]
        return cls(values[0], tuple(values[1:]))

    @property
    def m(self) -> int:
        return len(self.k)

    @property
    def d(self) -> int:
        """Topological degree of the circle map."""
        return self.k0 - sum(self.k)

    @property
    def sphere_degree(self) -> int:
        return self.k0 + sum(self.k)

    def as_tuple(self) -> tuple[int, ...]:
        return (self.k0, *self.k)

    def permuted(self, order: Sequence[int]) -> "KappaVector":
        """Kappa whose pole ``j`` carries the exponent ``self.k[order[j]]``."""
        return KappaVector(self.k0, tuple(self.k[i] for i in order))


@dataclass(frozen=True)
class ParameterPoint:
    """A parameter mu = (eta0, a1, r2, eta2, ..., rm, etam).

    ``poles`` holds the pairs (r_j, eta_j) for j >= 2.  Angles are reduced to
    [0, 1) on construction; the lift changes only by integers under this
    reduction.
    """

    eta0: float
    a1: float
    poles: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        poles = tuple((float(r), float(e) % 1.0) for r, e in self.poles)
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "eta0", float(self.eta0) % 1.0)
        object.__setattr__(self, "a1", float(self.a1))
        if not self.a1 > 1.0:
            raise DomainError(f"a1 must exceed 1, got {self.a1}")
        for r, _ in poles:
            if not r > 1.0:
                raise DomainError(f"pole radius must exceed 1, got {r}")

    @property
    def m(self) -> int:
        return 1 + len(self.poles)

    @property
    def radii(self) -> np.ndarray:
        return np.array([self.a1] + [r for r, _ in self.poles])

    @property
    def angles(self) -> np.ndarray:
        return np.array([0.0] + [e for _, e in self.poles])

    @property
    def a(self) -> np.ndarray:
        """Complex pole/zero locations a_j."""
        return self.radii * np.exp(2j * np.pi * self.angles)

    def as_vector(self) -> np.ndarray:
        out = [self.eta0, self.a1]
        for r, e in self.poles:
            out.extend((r, e))
        return np.array(out)

    @classmethod
    def from_vector(cls, vec: Sequence[float]) -> "ParameterPoint":
        vec = [float(v) for v in vec]
        if len(vec) < 2 or len(vec) % 2:
            raise DomainError(f"parameter vector must have even length >= 2, got {len(vec)}")
        poles = tuple((vec[i], vec[i + 1]) for i in range(2, len(vec), 2))
        return cls(vec[0], vec[1], poles)

    def check(self, kappa: KappaVector) -> None:
        if kappa.m != self.m:
            raise DomainError(f"kappa has {kappa.m} pole exponents but mu has {self.m} poles")


def _arrays(mu: ParameterPoint, kappa: KappaVector):
    mu.check(kappa)
    return mu.radii, mu.angles, np.array(kappa.k, dtype=float)


def eval_B(z: complex, mu: ParameterPoint, kappa: KappaVector) -> complex:
    """Value of B at a sphere point; poles map to :data:`INFINITY`."""
    mu.check(kappa)
    if is_infinite(z):
        return INFINITY
    z = complex(z)
    value = cmath.exp(TWO_PI * 1j * mu.eta0) * z ** kappa.k0
    for a, k in zip(mu.a, kappa.k):
        den = 1.0 - a.conjugate() * z
        if den == 0:
            return INFINITY
        value *= ((z - a) / den) ** k
    return value


def log_derivative(z, mu: ParameterPoint, kappa: KappaVector):
    """B'(z)/B(z), vectorized over ``z``."""
    a = mu.a
    k = np.array(kappa.k, dtype=float)
    z = np.asarray(z, dtype=complex)
    zz = z[..., None]
    terms = k * (1.0 - np.abs(a) ** 2) / ((1.0 - np.conj(a) * zz) * (zz - a))
    return kappa.k0 / z + terms.sum(axis=-1)


def log_abs_B(z, mu: ParameterPoint, kappa: KappaVector):
    """log|B(z)|, vectorized; vanishes exactly on B^{-1}(S^1)."""
    a = mu.a
    k = np.array(kappa.k, dtype=float)
    z = np.asarray(z, dtype=complex)
    zz = z[..., None]
    ratio = np.abs(zz - a) / np.abs(1.0 - np.conj(a) * zz)
    return kappa.k0 * np.log(np.abs(z)) + (k * np.log(ratio)).sum(axis=-1)


def eval_B_prime(z: complex, mu: ParameterPoint, kappa: KappaVector) -> complex:
    """Complex derivative of B."""
    mu.check(kappa)
    if is_infinite(z):
        raise DomainError("derivative requested at infinity")
    z = complex(z)
    for a in mu.a:
        if 1.0 - a.conjugate() * z == 0:
            raise DomainError(f"z = {z} is a pole of B")
    if z == 0:
        # z**k0 with k0 >= 2 vanishes to second order
        return 0j
    return eval_B(z, mu, kappa) * complex(log_derivative(z, mu, kappa))


def _phase_terms(t, mu: ParameterPoint, kappa: KappaVector):
    r, eta, k = _arrays(mu, kappa)
    t = np.asarray(t, dtype=float)
    theta = TWO_PI * (t[..., None] - eta)
    return t, r, eta, k, theta


def lift_value(t, mu: ParameterPoint, kappa: KappaVector):
    """Canonical lift F with exp(2 pi i F(t)) = B(exp(2 pi i t)).

    Uses the branch phi_j(t) = eta_j + 1/2 + Arg(1 - exp(2 pi i t)/a_j)/(2 pi);
    the argument of Arg stays in the right half-plane, so F is continuous
    and F(t + 1) = F(t) + d exactly.
    """
    t, r, eta, k, theta = _phase_terms(t, mu, kappa)
    w = np.exp(1j * theta) / r
    phi = eta + 0.5 + np.angle(1.0 - w) / TWO_PI
    value = mu.eta0 + kappa.k0 * t + (k * (2.0 * phi - t[..., None])).sum(axis=-1)
    return value if value.ndim else float(value)


def lift_derivative(t, mu: ParameterPoint, kappa: KappaVector):
    """F'(t) = k0 - sum_j k_j (r_j^2 - 1) / |exp(2 pi i t) - a_j|^2."""
    t, r, eta, k, theta = _phase_terms(t, mu, kappa)
    dist2 = 1.0 + r * r - 2.0 * r * np.cos(theta)
    value = kappa.k0 - (k * (r * r - 1.0) / dist2).sum(axis=-1)
    return value if value.ndim else float(value)


def lift_second_derivative(t, mu: ParameterPoint, kappa: KappaVector):
    t, r, eta, k, theta = _phase_terms(t, mu, kappa)
    dist2 = 1.0 + r * r - 2.0 * r * np.cos(theta)
    value = (k * (r * r - 1.0) * 2.0 * TWO_PI * r * np.sin(theta) / dist2 ** 2).sum(axis=-1)
    return value if value.ndim else float(value)


def lift_parameter_gradient(t, mu: ParameterPoint, kappa: KappaVector) -> np.ndarray:
    """Partial derivatives of F(t) with respect to (eta0, a1, r2, eta2, ...).

    Returns an array of shape ``t.shape + (2m,)``.
    """
    t, r, eta, k, theta = _phase_terms(t, mu, kappa)
    w = np.exp(1j * theta) / r
    q = w / (1.0 - w)
    dphi_dr = q.imag / (TWO_PI * r)
    dphi_deta = 1.0 + q.real
    m = len(r)
    out = np.empty(t.shape + (2 * m,))
    out[..., 0] = 1.0
    out[..., 1] = 2.0 * k[0] * dphi_dr[..., 0]
    for j in range(1, m):
        out[..., 2 * j] = 2.0 * k[j] * dphi_dr[..., j]
        out[..., 2 * j + 1] = 2.0 * k[j] * dphi_deta[..., j]
    return out


def derivative_parameter_gradient(t, mu: ParameterPoint, kappa: KappaVector) -> np.ndarray:
    """Partial derivatives of F'(t) with respect to the parameter vector."""
    t, r, eta, k, theta = _phase_terms(t, mu, kappa)
    c, s = np.cos(theta), np.sin(theta)
    dist2 = 1.0 + r * r - 2.0 * r * c
    d_r = -k * (2.0 * r * dist2 - (r * r - 1.0) * (2.0 * r - 2.0 * c)) / dist2 ** 2
    d_eta = -k * (r * r - 1.0) * 2.0 * TWO_PI * r * s / dist2 ** 2
    m = len(r)
    out = np.zeros(t.shape + (2 * m,))
    out[..., 1] = d_r[..., 0]
    for j in range(1, m):
        out[..., 2 * j] = d_r[..., j]
        out[..., 2 * j + 1] = d_eta[..., j]
    return out
