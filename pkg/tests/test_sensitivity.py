import math

import numpy as np
import pytest

from pmadm.core import DecisionMatrix, madm_rank, normalize
from pmadm.errors import InputError
from pmadm.io import read_matrix
from pmadm.pairwise import pmadm_rank
from pmadm.sensitivity import (
    changing_threshold,
    divergence_witness,
    flip_thresholds,
    flips_madm,
    flips_pmadm,
    sensitivity_survey,
    stability_experiment,
)

from .conftest import FIXTURES

BISECTION_TOL = 1e-9


def test_divergence_trivial_cases():
    assert divergence_witness(DecisionMatrix.from_rows([[0.1], [0.5], [0.3]])) is None
    assert divergence_witness(DecisionMatrix.from_rows([[0.2, 0.4]] * 3)) is None


def test_divergence_fixture(fixture_matrix):
    m = fixture_matrix("divergence.csv")
    assert divergence_witness(m) == ("N1", "N2")
    madm = madm_rank(m).order
    pm = pmadm_rank(m).order
    assert (madm.index("N1") < madm.index("N2")) != (pm.index("N1") < pm.index("N2"))
    rep = changing_threshold(m, pair=("N1", "N2"))
    assert rep.threshold_satisfied
    gap = rep.utilities_madm[0] - rep.utilities_madm[1]
    assert abs(rep.delta_u_ij) > abs(gap)


def test_changing_threshold_trivial():
    rep = changing_threshold(DecisionMatrix.from_rows([[0.3, 0.3]] * 3))
    assert rep.delta_u_i == rep.delta_u_j == rep.delta_u_ij == 0
    assert not rep.threshold_satisfied
    rng = np.random.default_rng(2)
    for _ in range(200):
        m = DecisionMatrix.from_rows(rng.random((5, 3)))
        if divergence_witness(m) is None:
            assert not changing_threshold(m).threshold_satisfied


def test_single_attribute_thresholds_equal_gap():
    m = DecisionMatrix.from_rows([[0.9], [0.6], [0.3]])
    rep = flip_thresholds(m)
    d = 0.9 / 0.9 - 0.6 / 0.9
    assert rep.flip_threshold_madm_frozen == pytest.approx(-d)
    assert rep.flip_threshold_pmadm_frozen == pytest.approx(-d)
    assert rep.flip_threshold_madm == pytest.approx(-d, abs=1e-9)
    assert rep.flip_threshold_pmadm == pytest.approx(-d, abs=1e-9)


def test_unreachable_flip_is_none():
    # N1 leads N2 by 1 on both attributes; moving one of them inside [0, 1] cannot reverse that
    m = DecisionMatrix.from_rows([[1.0, 1.0], [0.0, 0.0], [0.5, 0.5]])
    rep = flip_thresholds(m, scheme="minmax")
    assert rep.flip_threshold_pmadm is None
    assert rep.flip_threshold_madm is None
    assert rep.flip_threshold_pmadm_frozen == -2.0


def test_bad_arguments():
    m = DecisionMatrix.from_rows([[0.2, 0.4], [0.3, 0.1]])
    with pytest.raises(InputError):
        flip_thresholds(m, attribute=2)
    with pytest.raises(InputError):
        flip_thresholds(m, pair=("N1", "N1"))
    with pytest.raises(InputError):
        changing_threshold(m, pair=("N1", "N9"))


def _check_boundary(norm, flips, t):
    assert flips(norm, ("N1", "N2"), 0, t)
    back = t - math.copysign(BISECTION_TOL, t)
    assert not flips(norm, ("N1", "N2"), 0, back)


@pytest.mark.parametrize(
    "name,pair_larger",
    [("sensitivity_pair_weight_larger.csv", True), ("sensitivity_pair_weight_smaller.csv", False)],
)
def test_sensitivity_direction_fixtures(name, pair_larger):
    m = read_matrix(FIXTURES / name)
    rep = flip_thresholds(m)
    assert (rep.weight_pair > rep.weight_global) == pair_larger
    norm = normalize(m)
    _check_boundary(norm, flips_madm, rep.flip_threshold_madm)
    _check_boundary(norm, flips_pmadm, rep.flip_threshold_pmadm)
    if pair_larger:
        assert abs(rep.flip_threshold_pmadm) < abs(rep.flip_threshold_madm)
    else:
        assert abs(rep.flip_threshold_pmadm) > abs(rep.flip_threshold_madm)


def test_survey_counts_are_consistent():
    counts = sensitivity_survey(0, 200)
    assert counts["trials"] == 200
    assert 0 <= counts["follows_rule"] <= counts["comparable"] <= 200


def test_stability_same_row():
    m = DecisionMatrix.from_rows(np.random.default_rng(3).random((5, 4)))
    rep = stability_experiment(m, node="N2", new_row=m.values[1])
    assert rep.madm_stable and rep.pmadm_stable


def test_stability_random_perturbations():
    rng = np.random.default_rng(12)
    for _ in range(100):
        m = DecisionMatrix.from_rows(rng.random((6, 3)))
        rep = stability_experiment(m, node=f"N{rng.integers(1, 7)}", new_row=rng.random(3))
        assert rep.pmadm_stable


def test_madm_instability_fixture(fixture_matrix):
    m = fixture_matrix("madm_instability.csv")
    new = fixture_matrix("madm_instability_new_row.csv")
    node = new.node_ids[0]
    rep = stability_experiment(m, node=node, new_row=new.values[0])
    assert rep.pmadm_stable
    assert rep.madm_stable is False
    assert not rep.clamped
    rest = [x for x in rep.details["madm_order_before"] if x != node]
    after = [x for x in rep.details["madm_order_after"] if x != node]
    assert rest != after
