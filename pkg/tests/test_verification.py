import math
from fractions import Fraction

import numpy as np
import pytest

from polyxform import (ExtremalFamily, FlowSpec, GridSet, IndexFamily, LogGrowthSpec,
                       classify_point, extremal_sweep, full_family_exponents, i_functional_mc,
                       log_growth_fit)
from polyxform.cov import flow_image
from polyxform.errors import CoverageError, DimensionError, DomainError, FitError
from polyxform.necessity import constraint_report, polygon_agreement
from polyxform.suites import SUITES, SuiteOptions, run_suite

F_ = Fraction


# change of variables ------------------------------------------------------------

def test_cov_matches_measure_power():
    fam = IndexFamily.full(1, 1, 1)
    F = GridSet.box([0, 0], [1, 2])
    r = i_functional_mc(FlowSpec(fam, [0.1], [0.2, -0.3], samples=100_000, seed=4), F)
    assert r.target == pytest.approx(F.measure() ** (2 - 1))
    assert abs(r.zscore) <= 3


def test_cov_degree_two():
    fam = IndexFamily.full(1, 1, 2)
    F = GridSet.from_boxes([-1, -1], [1, 1], 4, [([-0.5, -1], [0.5, 0.5])])
    r = i_functional_mc(FlowSpec(fam, [0.0], [0.1, 0.2, 0.1], samples=200_000, seed=5), F)
    assert r.target == pytest.approx(F.measure() ** 2)
    assert abs(r.zscore) <= 3


def test_cov_empty_set_and_seed_determinism():
    fam = IndexFamily.full(1, 1, 1)
    empty = GridSet.empty([0, 0], [1, 1], 2)
    assert i_functional_mc(FlowSpec(fam, [0], [0, 0], samples=100), empty).estimate == 0.0
    F = GridSet.box([0, 0], [1, 1])
    a = i_functional_mc(FlowSpec(fam, [0], [0, 0], samples=5000, seed=9), F)
    b = i_functional_mc(FlowSpec(fam, [0], [0, 0], samples=5000, seed=9), F)
    assert a == b


def test_cov_spec_checks():
    fam = IndexFamily.full(1, 1, 1)
    with pytest.raises(DimensionError):
        FlowSpec(fam, [0, 0], [0, 0])
    with pytest.raises(DimensionError):
        FlowSpec(fam, [0], [0])
    spec = FlowSpec(fam, [0], [0, 0], samples=100, s_box=((0.0,), (0.1,)))
    with pytest.raises(CoverageError):
        i_functional_mc(spec, GridSet.box([0, 0], [3, 3]))


def test_flow_image_at_zero_shift_is_graph_point():
    fam = IndexFamily.full(1, 1, 1)
    x = flow_image(fam, [0.5], [1.0, 2.0], np.zeros((1, 1)), np.zeros((1, fam.size - 1)))
    assert x.shape[-1] == 2


# extremal sweeps ----------------------------------------------------------------

@pytest.mark.parametrize("n,npr,d", [(1, 1, 1), (2, 1, 2), (1, 3, 2), (2, 2, 3)])
def test_sweep_slopes(n, npr, d):
    pq = full_family_exponents(n, npr, d)
    for l in range(1, d + 1):
        r = extremal_sweep(ExtremalFamily("F", n, npr, d, l), pq)
        assert r.verdict["pass"], r.slopes
    assert extremal_sweep(ExtremalFamily("Fprime", n, npr, d), pq).verdict["pass"]


def test_sweep_outputs():
    pq = full_family_exponents(1, 1, 1)
    r = extremal_sweep(ExtremalFamily("F", 1, 1, 1, 1), pq)
    assert r.to_csv().splitlines()[0] == "delta,pairing,F_measure,G_measure,ratio"
    assert len(r.to_csv().splitlines()) == 9
    assert r.to_svg().startswith("<svg")
    assert r.to_json()["p"] == "3/2"


def test_sweep_grid_checks():
    pq = full_family_exponents(1, 1, 1)
    with pytest.raises(FitError):
        extremal_sweep(ExtremalFamily("F", 1, 1, 1, 1, deltas=(0.5, 0.25, 0.125)), pq)
    with pytest.raises(FitError):
        extremal_sweep(ExtremalFamily("F", 1, 1, 1, 1, deltas=(0.1, 0.2, 0.3, 0.4, 0.5, 0.6)), pq)
    with pytest.raises(DomainError):
        ExtremalFamily("G", 1, 1, 1)


def test_constraint_equality_exact():
    rep = constraint_report(1, 1, 1, full_family_exponents(1, 1, 1))
    lvl = rep["levels"][0]
    assert lvl["lhs"] == lvl["rhs"] == "4/3"
    assert lvl["equality"] and rep["all_hold"]


def test_classification_matches_polygon():
    assert classify_point(1, 1, 1, (F_(2, 3), F_(1, 3))).label == "bounded-looking"
    assert classify_point(1, 1, 1, (F_(1), F_(0))).label == "diverging"
    assert not polygon_agreement(1, 1, 2, grid=10)["mismatches"]


@pytest.mark.parametrize("betas,m,gamma", [
    (((1, 1), (1, 0)), 1, 1.0),
    (((1, 1), (1, 0)), 2, 0.0),
    (((1, 0), (0, 1)), 0, 2.0),
])
def test_log_growth(betas, m, gamma):
    r = log_growth_fit(LogGrowthSpec(betas, m))
    assert abs(r.gamma - gamma) <= 0.05


def test_log_growth_four_log_r():
    r = log_growth_fit(LogGrowthSpec(((1, 1), (1, 0)), 1))
    np.testing.assert_allclose(r.measures, 4 * np.log(r.R), rtol=1e-12)


# suites -----------------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes(name):
    res = run_suite(name, SuiteOptions(draws=5, samples=100_000))
    bad = [c for checks in res["suites"].values() for c in checks if not c["pass"]]
    assert res["pass"], bad


def test_sweep_level_two_example():
    r = extremal_sweep(ExtremalFamily("F", 2, 1, 2, 2), full_family_exponents(2, 1, 2))
    assert r.family.K == 4
    assert abs(r.slopes["pairing"] - 6.0) <= 0.05
    fp = extremal_sweep(ExtremalFamily("Fprime", 2, 1, 2), full_family_exponents(2, 1, 2))
    assert abs(fp.slopes["pairing"] - fp.family.K) <= 0.05
