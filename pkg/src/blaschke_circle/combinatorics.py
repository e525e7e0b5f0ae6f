"""Combinatorial data of a post-critically finite multimodal circle map.

Marked points z_1 = 0 < z_2 < ... < z_k < 1 are referred to by their
1-based indices.  ``sigma`` sends each index to the index of its image
(integer preimages are sent to 1, since z_1 = 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .core import KappaVector
from .critical import TargetVector
from .errors import (
    DegenerateConfiguration,
    DomainError,
    InvalidCombinatorics,
    TypeUnrealizable,
)

TIE = 1e-12


@dataclass(frozen=True)
class CombinatorialModel:
    m: int
    d: int
    k_count: int
    turning_indices: tuple[int, ...]
    sigma: tuple[int, ...]
    tau: tuple[int, ...]
    kappa: tuple[int, ...]
    integer_preimage_indices: tuple[int, ...] = ()
    x0: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        for name in ("turning_indices", "sigma", "tau", "kappa", "integer_preimage_indices"):
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))
        if self.x0 is not None:
            object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))

    @property
    def kappa_vector(self) -> KappaVector:
        return KappaVector.from_sequence(self.kappa)

    def replace(self, **changes) -> "CombinatorialModel":
        return replace(self, **changes)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


def _branch_index(model: CombinatorialModel, i: int) -> int:
    """1-based position of the last turning index at or before ``i``."""
    pos = 0
    for p, t in enumerate(model.turning_indices, start=1):
        if t <= i:
            pos = p
    return pos


def _structural_violations(model: CombinatorialModel) -> list[Violation]:
    out = []
    k, m = model.k_count, model.m
    add = lambda code, msg: out.append(Violation(code, msg))
    if m < 1:
        add("BadM", f"m must be >= 1, got {m}")
    if len(model.sigma) != k:
        add("SigmaNotTotal", f"sigma has {len(model.sigma)} entries, k = {k}")
    if any(not 1 <= s <= k for s in model.sigma):
        add("SigmaNotTotal", f"sigma values must lie in 1..{k}")
    t = model.turning_indices
    if len(t) != 2 * m:
        add("TurningIndices", f"need {2 * m} turning indices, got {len(t)}")
    if list(t) != sorted(set(t)) or any(not 1 <= i <= k for i in t):
        add("TurningIndices", "turning indices must be strictly increasing within 1..k")
    if not t or t[0] != 1:
        add("FirstTurningNotOne", "index 1 (z_1 = 0) must be the first turning point, a maximum")
    ip = model.integer_preimage_indices
    if list(ip) != sorted(set(ip)) or any(not 1 <= i <= k for i in ip):
        add("IntegerPreimages", "integer preimage indices must be strictly increasing within 1..k")
    if set(ip) & set(t):
        add("IndexOverlap", "turning and integer-preimage indices must be disjoint")
    if len(model.sigma) == k:
        for i in ip:
            if 1 <= i <= k and model.sigma[i - 1] != 1:
                add("IntegerPreimageSigma", f"sigma({i}) must be 1 for an integer preimage")
    if len(model.tau) != 2 * m - 1:
        add("TypeLength", f"tau needs {2 * m - 1} entries, got {len(model.tau)}")
    for j, tj in enumerate(model.tau, start=1):
        if (-1) ** j * tj < 0:
            add("TypeSignPattern", f"tau_{j} = {tj} has the wrong sign")
    kap = model.kappa
    if len(kap) != m + 1:
        add("KappaLength", f"kappa needs {m + 1} entries, got {len(kap)}")
    else:
        if any(v < 1 for v in kap[1:]):
            add("KappaNotPositive", "pole exponents must be positive")
        if kap[0] != model.d + sum(kap[1:]):
            add("KappaDegreeMismatch", f"k0 = {kap[0]} but d + sum k_j = {model.d + sum(kap[1:])}")
        if kap[0] <= 1:
            add("KappaDegreeMismatch", "k0 must exceed 1")
        for j in range(1, m + 1):
            if 2 * j - 2 < len(model.tau) and kap[j] < -model.tau[2 * j - 2] + 2:
                add("KappaNotAboveTau", f"k_{j} = {kap[j]} < -tau_{2 * j - 1} + 2 = {-model.tau[2 * j - 2] + 2}")
    if model.x0 is not None:
        x0 = model.x0
        if len(x0) != k or x0[0] != 0.0 or any(b <= a for a, b in zip(x0, x0[1:])) or x0[-1] >= 1.0:
            add("InvalidX0", "x0 must satisfy 0 = x_1 < ... < x_k < 1")
    return out


def _orbit_violations(model: CombinatorialModel) -> list[Violation]:
    """Every marked point must be turning, post-turning, or an integer preimage."""
    reach = set(model.turning_indices) | set(model.integer_preimage_indices)
    frontier = list(model.turning_indices)
    seen = set()
    while frontier:
        i = frontier.pop()
        if i in seen:
            continue
        seen.add(i)
        j = model.sigma[i - 1]
        reach.add(j)
        frontier.append(j)
    missing = sorted(set(range(1, model.k_count + 1)) - reach)
    if missing:
        return [Violation("UnreachableMarkedPoint", f"indices {missing} are not in any critical orbit")]
    return []


def _wrap_count(sequence, decreasing):
    wraps = 0
    for a, b in zip(sequence, sequence[1:]):
        if (b >= a) if decreasing else (b <= a):
            wraps += 1
    return wraps


def branch_minimal_floors(model: CombinatorialModel) -> list[int]:
    """Least floor of each critical-value gap compatible with the marked points on that branch."""
    t = model.turning_indices
    floors = []
    for j in range(1, 2 * model.m):
        decreasing = j % 2 == 1
        seq = [model.sigma[i - 1] for i in range(t[j - 1], t[j] + 1)]
        wraps = _wrap_count(seq, decreasing)
        start, end = seq[0], seq[-1]
        ahead = end > start if not decreasing else end < start
        if start == end or ahead:
            floors.append(wraps)
        else:
            floors.append(wraps - 1)
    return floors


def _branch_violations(model: CombinatorialModel) -> list[Violation]:
    out = []
    t = model.turning_indices
    for j, floor in enumerate(branch_minimal_floors(model), start=1):
        need = abs(model.tau[j - 1])
        if need < floor:
            out.append(Violation("BranchInconsistent", f"branch {j} needs |tau_{j}| >= {floor}, got {need}"))
        if need == 0 and floor == 0 and model.sigma[t[j - 1] - 1] == model.sigma[t[j] - 1]:
            out.append(Violation("DegenerateBranch", f"turning points {t[j - 1]} and {t[j]} share a critical value"))
    return out


def _step_lengths(model: CombinatorialModel):
    """Each critical-value step length as an affine form (coef over x_1..x_k, const).

    Marked points are ordered by index, so every fractional offset used by
    :func:`resolve_offsets` is affine in x on the whole simplex W.
    """
    k, t = model.k_count, model.turning_indices
    forms = []
    for j in range(1, 2 * model.m):
        sign = (-1) ** j
        p, q = model.sigma[t[j] - 1], model.sigma[t[j - 1] - 1]
        coef = np.zeros(k)
        const = float(abs(model.tau[j - 1]))
        if p != q:
            coef[p - 1] += sign
            coef[q - 1] -= sign
            if (p > q) != (sign > 0):
                const += 1.0
        forms.append((coef, const))
    return forms


def type_feasibility_margin(model: CombinatorialModel) -> float:
    """Largest slack with which some x in W meets every inequality of V.

    Solves a small linear program over the simplex W: alternation and gap
    bounds on the step lengths plus the wrap inequality.  A non-positive
    value means no configuration realizes ``tau`` with this ``sigma``.
    """
    k = model.k_count
    kap = model.kappa_vector
    rows, consts = [], []  # each row encodes coef . x + const >= slack

    def need(coef, const):
        rows.append(coef)
        consts.append(const)

    forms = _step_lengths(model)
    total, total_c = np.zeros(k), 0.0
    for j, (coef, const) in enumerate(forms, start=1):
        need(coef, const)
        if j % 2 == 1:
            need(-coef, kap.k[(j - 1) // 2] - const)
        sign = (-1) ** j
        total, total_c = total + sign * coef, total_c + sign * const
    need(-total, model.d - total_c)
    for i in range(1, k):
        e = np.zeros(k)
        e[i] = 1.0
        if i > 1:
            e[i - 1] = -1.0
        need(e, 0.0)
    e = np.zeros(k)
    e[k - 1] = -1.0
    need(e, 1.0)
    # variables (x_2..x_k, slack); x_1 = 0 drops out
    A = np.array(rows)[:, 1:]
    A_ub = np.hstack([-A, np.ones((len(rows), 1))])
    res = linprog(np.r_[np.zeros(k - 1), -1.0], A_ub=A_ub, b_ub=np.array(consts),
                  bounds=[(0.0, 1.0)] * (k - 1) + [(None, 1.0)], method="highs")
    return float(-res.fun) if res.status == 0 else -math.inf


def _type_violations(model: CombinatorialModel) -> list[Violation]:
    margin = type_feasibility_margin(model)
    if margin <= 1e-9:
        return [Violation("TypeUnrealizable",
                          f"no configuration in W gives critical values of type {model.tau} (slack {margin:.3g})")]
    return []


def validate_model(model: CombinatorialModel) -> list[Violation]:
    """All violated invariants of ``model``; an empty list means valid."""
    out = _structural_violations(model)
    if out:
        return out
    out.extend(_orbit_violations(model))
    out.extend(_branch_violations(model))
    out.extend(_type_violations(model))
    try:
        compute_s_indices(model)
    except InvalidCombinatorics as exc:
        out.append(Violation("InessentialOrPeriodicInterval", str(exc)))
    return out


def resolve_offsets(x: Sequence[float], model: CombinatorialModel) -> TargetVector:
    """Critical values realizing ``model`` at the control configuration ``x``.

    v_i = x_{sigma(t_i)} + n_i with v_1 in [0, 1) and, for each consecutive
    pair, the step of sign (-1)^j whose length L_j has floor |tau_j| (length
    exactly |tau_j| when the fractional parts coincide).
    """
    x = np.asarray(x, dtype=float)
    kappa = model.kappa_vector
    t = model.turning_indices
    frac = [x[model.sigma[i - 1] - 1] for i in t]
    v = [frac[0]]
    for j in range(1, 2 * model.m):
        sign = (-1) ** j
        cur = v[-1]
        delta = (sign * (frac[j] - cur)) % 1.0
        if delta < TIE or delta > 1.0 - TIE:
            delta = 0.0
        length = abs(model.tau[j - 1]) + delta
        if length <= TIE:
            raise DegenerateConfiguration(f"critical values {j} and {j + 1} coincide")
        approx = cur + sign * length
        v.append(frac[j] + round(approx - frac[j]))
    target = TargetVector(tuple(v), kappa, pair_k=tuple(kappa.k))
    problems = target.violations()
    if problems:
        raise TypeUnrealizable("; ".join(problems))
    return target


def _image_arcs(model: CombinatorialModel, i: int) -> list[int]:
    k = model.k_count
    a = model.sigma[i - 1]
    b = model.sigma[i % k]
    decreasing = _branch_index(model, i) % 2 == 1
    lo, hi = (b, a) if decreasing else (a, b)
    if lo == hi:
        return list(range(1, k + 1))
    arcs, r = [], lo
    while r != hi:
        arcs.append(r)
        r = r % k + 1
    return arcs


def compute_s_indices(model: CombinatorialModel) -> tuple[int, ...]:
    """s(i): least n such that the n-th image of arc [z_i, z_{i+1}] contains a turning point.

    Arc k wraps around to z_1 + 1.  Arcs whose forward images never reach
    a turning point raise :class:`InvalidCombinatorics`.
    """
    k = model.k_count
    turning = set(model.turning_indices)
    s: list[float] = [math.inf] * k
    images = {}
    for i in range(1, k + 1):
        if i in turning or (i % k + 1) in turning:
            s[i - 1] = 0
        else:
            images[i] = _image_arcs(model, i)
    for _ in range(k):
        changed = False
        for i, arcs in images.items():
            best = 1 + min(s[r - 1] for r in arcs)
            if best < s[i - 1]:
                s[i - 1] = best
                changed = True
        if not changed:
            break
    stuck = [i for i in range(1, k + 1) if math.isinf(s[i - 1])]
    if stuck:
        raise InvalidCombinatorics(f"arcs {stuck} never cover a turning point (periodic or inessential interval)")
    return tuple(int(v) for v in s)


@dataclass(frozen=True)
class OrbifoldReport:
    euler_characteristic: Fraction
    punctures: tuple[str, ...]
    cone_orders: dict = field(default_factory=dict)

    @property
    def hyperbolic(self) -> bool:
        return self.euler_characteristic < 0


def orbifold_report(model: CombinatorialModel) -> OrbifoldReport:
    """Euler characteristic of the orbifold of the realizing rational map.

    0 and infinity are critical fixed points (N = infinity).  On the circle,
    each turning point has local degree 2; a post-critical point gets N = 2^c
    with c the largest number of turning points on an orbit segment ending
    there, or infinity when it lies on a cycle through a turning point.
    """
    k = model.k_count
    turning = set(model.turning_indices)
    order: dict[int, float] = {}
    for t in model.turning_indices:
        orbit = [t]
        while orbit.count(orbit[-1]) < 2:
            orbit.append(model.sigma[orbit[-1] - 1])
        start = orbit.index(orbit[-1])
        cycle = orbit[start:-1]
        critical_cycle = bool(turning & set(cycle))
        count = 0
        for n in range(1, len(orbit)):
            if orbit[n - 1] in turning:
                count += 1
            z = orbit[n]
            value = math.inf if (critical_cycle and z in cycle) else 2 ** count
            order[z] = max(order.get(z, 1), value)
    punctures = ["0", "inf"] + [f"z{z}" for z, n in sorted(order.items()) if math.isinf(n)]
    cones = {f"z{z}": int(n) for z, n in sorted(order.items()) if not math.isinf(n) and n > 1}
    chi = Fraction(2 - len(punctures))
    for n in cones.values():
        chi -= 1 - Fraction(1, n)
    return OrbifoldReport(chi, tuple(punctures), cones)


def orbifold_hyperbolicity_check(model: CombinatorialModel) -> bool:
    return orbifold_report(model).hyperbolic


def four_modal_model() -> CombinatorialModel:
    """The 4-modal degree-one combinatorics with five marked points."""
    return CombinatorialModel(
        m=2,
        d=1,
        k_count=5,
        turning_indices=(1, 3, 4, 5),
        sigma=(3, 2, 3, 2, 1),
        tau=(-1, 0, -1),
        kappa=(7, 3, 3),
    )


def model_from_dict(doc: dict) -> CombinatorialModel:
    allowed = {
        "m", "d", "k_count", "kappa", "tau", "turning_indices",
        "integer_preimage_indices", "sigma", "x0", "solver",
    }
    unknown = set(doc) - allowed
    if unknown:
        raise DomainError(f"unknown model fields: {sorted(unknown)}")
    missing = {"m", "d", "k_count", "kappa", "tau", "turning_indices", "sigma"} - set(doc)
    if missing:
        raise DomainError(f"missing model fields: {sorted(missing)}")
    return CombinatorialModel(
        m=int(doc["m"]),
        d=int(doc["d"]),
        k_count=int(doc["k_count"]),
        turning_indices=doc["turning_indices"],
        sigma=doc["sigma"],
        tau=doc["tau"],
        kappa=doc["kappa"],
        integer_preimage_indices=doc.get("integer_preimage_indices", ()),
        x0=doc.get("x0"),
    )


def model_to_dict(model: CombinatorialModel) -> dict:
    doc = {
        "m": model.m,
        "d": model.d,
        "k_count": model.k_count,
        "kappa": list(model.kappa),
        "tau": list(model.tau),
        "turning_indices": list(model.turning_indices),
        "integer_preimage_indices": list(model.integer_preimage_indices),
        "sigma": list(model.sigma),
    }
    if model.x0 is not None:
        doc["x0"] = list(model.x0)
    return doc
