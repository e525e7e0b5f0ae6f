import csv
import io
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blaschke_circle import (
    KappaVector,
    ParameterPoint,
    export_geometry,
    find_critical_points,
    trace_gamma,
    verify_decomposition,
)
from blaschke_circle.core import eval_B, lift_value, log_abs_B
from blaschke_circle.critical import sample_parameter
from blaschke_circle.tracer import export_lift, lift_samples, preimages, winding_number

FAMILIES = [KappaVector(2, (1,)), KappaVector(7, (3, 3)), KappaVector(8, (3, 2, 2))]


def test_unimodal_curve_through_closed_form_points(unimodal):
    mu, kap = unimodal
    prof = find_critical_points(mu, kap)
    c = trace_gamma(mu, kap, 1, prof)
    assert c.endpoint_angles == pytest.approx(prof.points, abs=1e-12)
    for z in c.endpoints:
        assert abs(abs(z) - 1) < 1e-12
    assert c.enclosed == {"a1": True, "a1*": True}


def test_curve_invariants(three_pole_params):
    mu, kap = three_pole_params
    prof = find_critical_points(mu, kap)
    for j in range(1, 4):
        c = trace_gamma(mu, kap, j, prof)
        inner = c.polyline[1:-1]
        assert np.max(np.abs(log_abs_B(inner, mu, kap))) <= 1e-9
        p = list(prof.pairing).index(j - 1)
        assert c.endpoint_angles == pytest.approx((prof.points[2 * p], prof.points[2 * p + 1]), abs=1e-8)
        assert c.landing_error < 1e-8
        # inversion symmetry
        inv = 1 / np.conj(c.polyline)
        d = np.min(np.abs(inv[:, None] - c.polyline[None, :]), axis=1)
        assert np.max(d) <= 1e-7
        for i, a in enumerate(mu.a, start=1):
            assert (winding_number(c.polyline, a) != 0) == (i == j)


def test_three_pole_decomposition(three_pole_params):
    mu, kap = three_pole_params
    rep = verify_decomposition(mu, kap)
    assert rep.ok
    assert len(rep.curves) == 3 and rep.circle_crossings == 6
    assert rep.min_pairwise_distance > 0
    assert rep.census_total == rep.census_expected == kap.d + 2 * sum(kap.k) == kap.sphere_degree
    assert rep.census_signed_circle == kap.d


def test_four_modal_census(published_mu, kappa733):
    rep = verify_decomposition(published_mu, kappa733)
    assert rep.ok and len(rep.curves) == 2 and rep.circle_crossings == 4
    assert rep.census_total == 13


def test_preimages_solve_the_equation(three_pole_params):
    mu, kap = three_pole_params
    w = np.exp(2j * np.pi * 0.3)
    roots = preimages(w, mu, kap)
    assert len(roots) == kap.sphere_degree
    for z in roots:
        assert abs(eval_B(z, mu, kap) - w) < 1e-9


@given(st.integers(0, 10_000), st.sampled_from(FAMILIES))
@settings(max_examples=15)
def test_tracer_agrees_with_pairing(seed, kap):
    mu = sample_parameter(np.random.default_rng(seed), kap)
    rep = verify_decomposition(mu, kap)
    assert rep.ok, rep


def test_csv_export(three_pole_params):
    mu, kap = three_pole_params
    rep = verify_decomposition(mu, kap)
    text = export_geometry(rep.curves, format="csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["curve_id", "re", "im"]
    assert len(rows) - 1 == sum(len(c.polyline) for c in rep.curves)
    z = complex(float(rows[1][1]), float(rows[1][2]))
    assert z == rep.curves[0].polyline[0]


def test_svg_export(three_pole_params):
    mu, kap = three_pole_params
    prof = find_critical_points(mu, kap)
    rep = verify_decomposition(mu, kap, prof)
    root = ET.fromstring(export_geometry(rep.curves, prof, "svg", mu=mu))
    assert root.get("viewBox") == "0 0 1000 1000"
    ns = "{http://www.w3.org/2000/svg}"
    circles = root.findall(f"{ns}circle")
    assert circles[0].get("r") == "400"
    assert len(root.findall(f"{ns}polyline")) == 3
    assert len([c for c in circles if c.get("class") == "critical"]) == 6


def test_empty_export_draws_only_the_circle():
    root = ET.fromstring(export_geometry([], format="svg"))
    ns = "{http://www.w3.org/2000/svg}"
    assert len(root.findall(f"{ns}circle")) == 1
    assert not root.findall(f"{ns}polyline")
    assert export_geometry([], format="csv") == "curve_id,re,im\n"


def test_lift_samples_periodic(published_mu, kappa733):
    t, g = lift_samples(published_mu, kappa733)
    assert t[0] == 0 and t[-1] == 1
    assert g[-1] - g[0] == pytest.approx(kappa733.d, abs=1e-12)
    text = export_lift(t, g, "csv")
    assert text.splitlines()[0] == "t,lift" and len(text.splitlines()) == len(t) + 1
    ET.fromstring(export_lift(t, g, "svg", find_critical_points(published_mu, kappa733)))


def test_census_counts_roots_on_the_reflected_half():
    # the outer root lies where the reflected polyline is coarse
    kap = KappaVector(2, (1,))
    mu = ParameterPoint(0.782119073078226, 1.5942176747209)
    rep = verify_decomposition(mu, kap)
    assert rep.census_per_curve == {1: 2} and rep.census_total == 3 and rep.ok
