from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blaschke_circle import (
    CombinatorialModel,
    DegenerateConfiguration,
    InvalidCombinatorics,
    TypeUnrealizable,
    compute_s_indices,
    compute_type,
    four_modal_model,
    orbifold_hyperbolicity_check,
    orbifold_report,
    resolve_offsets,
    validate_model,
)
from blaschke_circle.combinatorics import (
    _image_arcs,
    model_from_dict,
    model_to_dict,
    type_feasibility_margin,
)

from conftest import PUBLISHED_X


def codes(model):
    return {v.code for v in validate_model(model)}


def loop_model():
    # arc [z3, z4] sits on an increasing branch and maps onto itself
    return CombinatorialModel(m=1, d=1, k_count=4, turning_indices=(1, 2),
                              sigma=(3, 4, 3, 4), tau=(-1,), kappa=(4, 3))


def one_step_model():
    # arc [z3, z4] maps onto [z1, z2], which has turning endpoints
    return CombinatorialModel(m=1, d=1, k_count=4, turning_indices=(1, 2),
                              sigma=(3, 4, 1, 2), tau=(-1,), kappa=(4, 3))


def swap_model():
    return CombinatorialModel(m=1, d=1, k_count=2, turning_indices=(1, 2),
                              sigma=(2, 1), tau=(0,), kappa=(3, 2))


def test_four_modal_model_is_valid(model):
    assert validate_model(model) == []


def test_kappa_below_tau_bound(model):
    assert "KappaNotAboveTau" in codes(model.replace(kappa=(5, 2, 2)))


def test_periodic_arc_loop_rejected():
    m = loop_model()
    assert codes(m) == {"InessentialOrPeriodicInterval"}
    with pytest.raises(InvalidCombinatorics):
        compute_s_indices(m)


CORRUPTIONS = [
    ("m", 3), ("m", 1), ("m", 0),
    ("d", 0), ("d", 2),
    ("k_count", 4), ("k_count", 6),
    ("turning_indices", (2, 3, 4, 5)), ("turning_indices", (1, 3, 4)),
    ("turning_indices", (1, 3, 3, 5)), ("turning_indices", (1, 3, 4, 6)),
    ("turning_indices", (1, 4, 3, 5)),
    ("integer_preimage_indices", (2,)), ("integer_preimage_indices", (3,)),
    ("integer_preimage_indices", (6,)),
    ("sigma", (3, 2, 3, 2)), ("sigma", (3, 2, 3, 2, 6)), ("sigma", (3, 2, 3, 2, 0)),
    ("sigma", (3, 2, 3, 3, 1)),
    ("tau", (1, 0, -1)), ("tau", (-1, 0)), ("tau", (-1, -1, -1)),
    ("tau", (0, 0, -1)), ("tau", (-1, 0, -3)),
    ("kappa", (5, 2, 2)), ("kappa", (7, 3, 4)), ("kappa", (7, 3)), ("kappa", (8, 3, 3)),
    ("x0", (0.1, 0.2, 0.3, 0.4, 0.5)), ("x0", (0.0, 0.3, 0.2, 0.4, 0.5)),
]


@pytest.mark.parametrize("field, value", CORRUPTIONS, ids=[f"{f}={v}" for f, v in CORRUPTIONS])
def test_single_field_corruption_rejected(model, field, value):
    assert validate_model(model.replace(**{field: value})), f"{field}={value} accepted"


def test_type_floor_consistency_is_checked(model):
    # tau_1 = 0 cannot hold: branch one needs a full wrap to revisit z3
    assert "BranchInconsistent" in codes(model.replace(tau=(0, 0, -1)))


def test_s_indices():
    assert compute_s_indices(one_step_model()) == (0, 0, 1, 0)
    assert validate_model(one_step_model()) == []


def test_s_indices_four_modal(model):
    assert compute_s_indices(model) == (0, 0, 0, 0, 0)


def test_s_descent_property():
    for m in (one_step_model(), swap_model()):
        s = compute_s_indices(m)
        for i in range(1, m.k_count + 1):
            if s[i - 1] >= 1:
                assert any(s[r - 1] == s[i - 1] - 1 for r in _image_arcs(m, i))
            is_turning_arc = i in m.turning_indices or (i % m.k_count + 1) in m.turning_indices
            assert (s[i - 1] == 0) == is_turning_arc


def test_resolve_offsets_fixed_configuration(model):
    v = resolve_offsets(PUBLISHED_X, model)
    assert np.allclose(v.v, (0.13811, -0.86189, 0.03427, -1.0), atol=1e-12)
    assert v.v[0] - v.v[1] == 1.0  # coinciding fractional parts give an exactly integer gap
    z2, z3 = PUBLISHED_X[1], PUBLISHED_X[2]
    shift = np.asarray(v.v) - np.array([z3 + 1, z3, z2 + 1, 0.0])
    assert np.allclose(shift, -1.0)
    assert compute_type(v.v) == model.tau


def test_resolve_offsets_zero_offsets():
    v = resolve_offsets([0.0, 0.4], swap_model())
    assert v.v == (0.4, 0.0)


def test_resolve_offsets_unrealizable(model):
    # a long increasing step pushes v_4 = 2 past the wrap bound v_1 + d
    with pytest.raises(TypeUnrealizable):
        resolve_offsets(PUBLISHED_X, model.replace(tau=(-1, 3, -1)))


def test_resolve_offsets_degenerate():
    m = CombinatorialModel(m=1, d=1, k_count=2, turning_indices=(1, 2),
                           sigma=(2, 2), tau=(0,), kappa=(3, 2))
    with pytest.raises(DegenerateConfiguration):
        resolve_offsets([0.0, 0.5], m)


@st.composite
def configurations(draw, k=5):
    gaps = draw(st.lists(st.floats(1e-3, 1.0), min_size=k, max_size=k))
    x = np.cumsum([0.0] + gaps[:-1]) / sum(gaps)
    return x


@given(configurations())
def test_resolve_offsets_reproduces_type(x):
    model = four_modal_model()
    try:
        v = resolve_offsets(x, model)
    except TypeUnrealizable:
        return
    assert compute_type(v.v) == model.tau
    assert 0 <= v.v[0] < 1
    frac = np.asarray(v.v) - x[np.asarray(model.sigma)[np.asarray(model.turning_indices) - 1] - 1]
    assert np.allclose(frac, np.round(frac), atol=1e-12)


def test_orbifold(model):
    rep = orbifold_report(model)
    assert rep.euler_characteristic == Fraction(-2)
    assert rep.punctures == ("0", "inf", "z3")
    assert rep.cone_orders == {"z1": 2, "z2": 2}
    assert orbifold_hyperbolicity_check(model)
    for m in (one_step_model(), swap_model()):
        assert orbifold_report(m).euler_characteristic < 0


def test_model_document_round_trip(model):
    assert model_from_dict(model_to_dict(model)) == model
    with pytest.raises(ValueError):
        model_from_dict({**model_to_dict(model), "colour": 1})


def test_type_feasibility_static_check(model):
    assert type_feasibility_margin(model) > 0
    for tau in [(-1, 3, -1), (-1, 4, -1)]:
        assert "TypeUnrealizable" in codes(model.replace(tau=tau))


@given(st.sampled_from([(-1, 0, -1), (-1, 1, -1), (-1, 3, -1), (-2, 0, -1), (-1, 0, 0), (-2, 2, -2)]),
       st.lists(st.integers(1, 5), min_size=5, max_size=5),
       st.integers(0, 2**32 - 1))
@settings(max_examples=80)
def test_type_feasibility_agrees_with_sampling(tau, sigma, seed):
    # the linear program is exact: sampled configurations succeed only when it reports slack
    m = four_modal_model().replace(tau=tau, sigma=tuple(sigma), kappa=(9, 4, 4))
    margin = type_feasibility_margin(m)
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(300):
        x = np.concatenate([[0.0], np.sort(rng.uniform(0, 1, 4))])
        try:
            resolve_offsets(x, m)
            hits += 1
        except (TypeUnrealizable, DegenerateConfiguration):
            pass
    if margin <= 0:
        assert hits == 0
    if margin > 0.05:
        assert hits > 0
