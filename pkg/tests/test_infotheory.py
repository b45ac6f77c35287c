"""Discrete information engine: golden entropies, decomposition identity,
bound sandwich, conditional-independence constructions, and the
monotonicity/submodularity scanners."""

import io
import math

import numpy as np
import pytest

from helpers import random_ci_joint, random_joint
from mbrkit.infotheory import (
    DiscreteJoint,
    bayes_error,
    conditional_total_correlation,
    decompose_mi,
    entropy,
    error_bounds,
    growing_target_scan,
    load_joint,
    make_ci_joint,
    monotonicity_scan,
    mutual_information,
    save_joint,
    submodularity_check,
    supermodularity_check,
    total_correlation,
)


def binary_entropy(p):
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def copy_joint(k=2):
    # X = target, both uniform over k values
    pmf = np.zeros((k, k))
    for i in range(k):
        pmf[i, i] = 1.0 / k
    return DiscreteJoint(pmf)


def independent_joint(k=2):
    return DiscreteJoint(np.full((k, k), 1.0 / k**2))


def bsc_joint(p=0.1):
    # uniform binary target observed through a symmetric flip
    return DiscreteJoint(np.array([[(1 - p) / 2, p / 2], [p / 2, (1 - p) / 2]]))


def xor_joint():
    # X1, X2 iid uniform bits, target = X1 xor X2
    pmf = np.zeros((2, 2, 2))
    for x1 in range(2):
        for x2 in range(2):
            pmf[x1, x2, x1 ^ x2] = 0.25
    return DiscreteJoint(pmf)


class TestDiscreteJoint:
    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            DiscreteJoint(np.array([[0.6, -0.1], [0.3, 0.2]]))

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            DiscreteJoint(np.array([[0.5, 0.5], [0.5, 0.5]]))

    def test_shape_accessors(self):
        j = DiscreteJoint(np.full((2, 3, 4), 1.0 / 24))
        assert j.n_vars == 2
        assert j.alphabet_sizes == (2, 3)
        assert j.target_size == 4


class TestEntropy:
    def test_fair_coin(self):
        assert entropy([0.5, 0.5]) == 1.0

    def test_point_mass(self):
        assert entropy([1.0, 0.0, 0.0]) == 0.0

    def test_closed_form(self):
        expected = -(0.25 * math.log2(0.25) + 0.75 * math.log2(0.75))
        assert entropy([0.25, 0.75]) == pytest.approx(expected, rel=1e-12)
        assert entropy([0.25, 0.75]) == pytest.approx(0.811278, abs=1e-6)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            entropy([0.5, 0.6])


class TestMutualInformation:
    def test_independent_is_zero(self):
        assert mutual_information(independent_joint(), [0]) == pytest.approx(0.0, abs=1e-12)

    def test_copy_equals_target_entropy(self):
        j = copy_joint(3)
        assert mutual_information(j, [0]) == pytest.approx(math.log2(3), rel=1e-12)

    def test_enumeration_oracle(self):
        j = DiscreteJoint(np.array([[0.4, 0.1], [0.1, 0.4]]))
        expected = 1.0 - binary_entropy(0.2)
        assert mutual_information(j, [0]) == pytest.approx(expected, rel=1e-9)
        assert mutual_information(j, [0]) == pytest.approx(0.278072, abs=1e-6)

    def test_empty_subset(self):
        assert mutual_information(independent_joint(), []) == 0.0

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            mutual_information(independent_joint(), [3])


class TestTotalCorrelations:
    def test_independent_vars_tc_zero(self):
        rng = np.random.default_rng(131)
        px = rng.random(2) + 0.1
        px /= px.sum()
        py = rng.random(3) + 0.1
        py /= py.sum()
        pmf = px[:, None, None] * py[None, :, None] * np.array([0.5, 0.5])[None, None, :]
        j = DiscreteJoint(pmf)
        assert total_correlation(j, [0, 1]) == pytest.approx(0.0, abs=1e-12)

    def test_duplicate_var_tc_is_entropy(self):
        # X2 = X1, both uniform bits, independent target
        pmf = np.zeros((2, 2, 2))
        pmf[0, 0, :] = 0.25
        pmf[1, 1, :] = 0.25
        j = DiscreteJoint(pmf)
        assert total_correlation(j, [0, 1]) == pytest.approx(1.0, rel=1e-12)

    def test_ci_joint_ctc_zero(self):
        rng = np.random.default_rng(137)
        for _ in range(50):
            j = random_ci_joint(rng, n=3, alphabet=3, target=3)
            for subset in ([0, 1], [0, 2], [1, 2], [0, 1, 2]):
                assert abs(conditional_total_correlation(j, subset)) <= 1e-12

    def test_small_subsets_are_zero(self):
        j = independent_joint()
        assert total_correlation(j, [0]) == 0.0
        assert conditional_total_correlation(j, []) == 0.0


class TestDecomposeMi:
    def test_single_variable(self):
        j = bsc_joint()
        report = decompose_mi(j, [0])
        assert report.relevancy == pytest.approx(report.mi, rel=1e-12)
        assert report.redundancy == 0.0
        assert report.cond_redundancy == 0.0

    def test_duplicate_copy_variable_oracle(self):
        # X1 = target, X2 = X1: relevancy 2 H, redundancy H, conditional 0
        pmf = np.zeros((2, 2, 2))
        pmf[0, 0, 0] = 0.5
        pmf[1, 1, 1] = 0.5
        j = DiscreteJoint(pmf)
        report = decompose_mi(j, [0, 1])
        assert report.h_target == 1.0
        assert report.relevancy == pytest.approx(2.0, rel=1e-12)
        assert report.redundancy == pytest.approx(1.0, rel=1e-12)
        assert report.cond_redundancy == pytest.approx(0.0, abs=1e-12)
        assert report.mi == pytest.approx(1.0, rel=1e-12)

    def test_identity_on_random_joints(self):
        rng = np.random.default_rng(139)
        for _ in range(200):
            j = random_joint(rng)
            report = decompose_mi(j)
            residual = abs(report.mi - (report.relevancy + report.cond_redundancy - report.redundancy))
            assert residual <= 1e-9


class TestBoundsAndBayes:
    def test_copy_variable(self):
        j = copy_joint()
        lower, upper = error_bounds(j, [0])
        assert upper == pytest.approx(0.0, abs=1e-12)
        assert bayes_error(j, [0]) == pytest.approx(0.0, abs=1e-12)

    def test_independent_uniform(self):
        j = independent_joint()
        lower, upper = error_bounds(j, [0])
        assert lower == pytest.approx(0.0, abs=1e-12)
        assert upper == pytest.approx(0.5, rel=1e-12)
        assert bayes_error(j, [0]) == pytest.approx(0.5, rel=1e-12)

    def test_binary_symmetric_flip(self):
        j = bsc_joint(0.1)
        lower, upper = error_bounds(j, [0])
        assert lower == pytest.approx(-(1.0 - binary_entropy(0.1)), rel=1e-9)
        assert lower == pytest.approx(-0.531, abs=5e-4)
        assert upper == pytest.approx(binary_entropy(0.1) / 2, rel=1e-9)
        assert upper == pytest.approx(0.2345, abs=5e-5)
        assert bayes_error(j, [0]) == pytest.approx(0.1, rel=1e-9)

    def test_sandwich_on_random_joints(self):
        rng = np.random.default_rng(149)
        for _ in range(200):
            j = random_joint(rng)
            subset = list(range(j.n_vars))
            lower, upper = error_bounds(j, subset)
            err = bayes_error(j, subset)
            assert lower <= err + 1e-9
            assert err <= upper + 1e-9

    def test_degenerate_target_rejected(self):
        j = DiscreteJoint(np.array([[0.5], [0.5]]))
        with pytest.raises(ValueError):
            error_bounds(j, [0])

    def test_guessing_error(self):
        j = independent_joint(4)
        assert bayes_error(j, [0]) == pytest.approx(0.75, rel=1e-12)


class TestMakeCiJoint:
    def test_single_variable_outer_product(self):
        prior = [0.25, 0.75]
        cond = [[[0.5, 0.5], [0.1, 0.9]]]
        j = make_ci_joint(prior, cond)
        expected = np.array([[0.125, 0.075], [0.125, 0.675]])
        assert np.allclose(j.pmf, expected, atol=1e-15)

    def test_deterministic_copies_have_full_redundancy(self):
        ident = [[1.0, 0.0], [0.0, 1.0]]
        j = make_ci_joint([0.5, 0.5], [ident, ident])
        assert total_correlation(j, [0, 1]) == pytest.approx(1.0, rel=1e-12)

    def test_random_ci_has_zero_ctc(self):
        rng = np.random.default_rng(151)
        j = random_ci_joint(rng, n=3)
        for subset in ([0, 1], [1, 2], [0, 1, 2]):
            assert abs(conditional_total_correlation(j, subset)) <= 1e-12

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            make_ci_joint([0.5, 0.6], [[[1.0, 0.0], [0.0, 1.0]]])
        with pytest.raises(ValueError):
            make_ci_joint([0.5, 0.5], [[[0.9, 0.0], [0.0, 1.0]]])


class TestSubmodularity:
    def test_ci_joints_have_no_violations(self):
        rng = np.random.default_rng(157)
        for _ in range(50):
            j = random_ci_joint(rng, n=3, alphabet=2, target=2)
            assert submodularity_check(j).ok

    def test_xor_witness(self):
        j = xor_joint()
        assert mutual_information(j, [0]) == pytest.approx(0.0, abs=1e-12)
        assert mutual_information(j, [1]) == pytest.approx(0.0, abs=1e-12)
        assert mutual_information(j, [0, 1]) == pytest.approx(1.0, rel=1e-12)
        report = submodularity_check(j)
        assert not report.ok
        kinds = {(v.function, v.kind) for v in report.violations}
        assert ("mutual_information", "submodularity") in kinds

    def test_single_variable_vacuous(self):
        j = bsc_joint()
        report = submodularity_check(j)
        assert report.ok
        assert report.n_modularity_triples == 0

    def test_enumeration_cap(self):
        j = DiscreteJoint(np.full((2,) * 6, 1.0 / 2**6))
        with pytest.raises(ValueError):
            submodularity_check(j, max_vars=4)

    def test_bounds_supermodular_on_ci_joints(self):
        rng = np.random.default_rng(163)
        for _ in range(50):
            j = random_ci_joint(rng, n=3, alphabet=2, target=2)
            assert supermodularity_check(j).ok


class TestMonotonicityScan:
    def test_ci_joint_redundancy_deltas(self):
        rng = np.random.default_rng(167)
        j = random_ci_joint(rng, n=3, alphabet=2, target=2)
        steps = monotonicity_scan(j, [0, 1, 2])
        for k, step in enumerate(steps):
            assert step.deltas["cond_redundancy"] == pytest.approx(0.0, abs=1e-12)
            subset = [0, 1, 2][:k]
            expected_tc_gain = (
                mutual_information_between(j, step.added, subset) if subset else 0.0
            )
            assert step.deltas["redundancy"] == pytest.approx(expected_tc_gain, abs=1e-9)

    def test_duplicate_variable_negative_diversity_delta(self):
        pmf = np.zeros((2, 2, 2))
        pmf[0, 0, 0] = 0.5
        pmf[1, 1, 1] = 0.5
        j = DiscreteJoint(pmf)
        steps = monotonicity_scan(j, [0, 1])
        assert steps[1].deltas["it_diversity"] < 0

    def test_xor_positive_diversity_delta(self):
        # frozen witness: the parity joint gains conditional redundancy with
        # no marginal redundancy, so diversity jumps by +1 bit at step two
        steps = monotonicity_scan(xor_joint(), [0, 1])
        assert steps[1].deltas["it_diversity"] == pytest.approx(1.0, rel=1e-12)

    def test_mi_nondecreasing_and_bounds_nonincreasing(self):
        rng = np.random.default_rng(173)
        for _ in range(100):
            j = random_joint(rng, n_max=3)
            steps = monotonicity_scan(j, list(range(j.n_vars)))
            for step in steps:
                assert step.deltas["mi"] >= -1e-12
                assert step.deltas["lower_bound"] <= 1e-12
                assert step.deltas["upper_bound"] <= 1e-12

    def test_invalid_chain(self):
        j = xor_joint()
        with pytest.raises(ValueError):
            monotonicity_scan(j, [0, 0])
        with pytest.raises(ValueError):
            monotonicity_scan(j, [])

    def test_growing_target_mode_reports_raw_deltas(self):
        rng = np.random.default_rng(179)
        joints = [random_joint(rng, n_max=2, target_max=2),
                  random_joint(rng, n_max=2, target_max=3)]
        steps = growing_target_scan(joints)
        assert len(steps) == 2
        assert steps[0].deltas == {k: 0.0 for k in steps[0].deltas}
        assert steps[1].added is None


def mutual_information_between(joint, var, subset):
    """I(X_var; X_subset) oracle via entropies of predictor marginals."""
    from mbrkit.infotheory import _marginal_entropy  # test-only shortcut

    s = tuple(sorted(subset))
    merged = tuple(sorted(set(s) | {var}))
    return (
        _marginal_entropy(joint, (var,), False)
        + _marginal_entropy(joint, s, False)
        - _marginal_entropy(joint, merged, False)
    )


class TestSerialization:
    def test_dense_round_trip(self):
        rng = np.random.default_rng(181)
        j = random_joint(rng)
        buf = io.StringIO()
        save_joint(buf, j)
        buf.seek(0)
        back = load_joint(buf)
        assert back.pmf.shape == j.pmf.shape
        assert np.array_equal(back.pmf, j.pmf)

    def test_ci_form_loads(self):
        buf = io.StringIO(
            '{"prior": [0.5, 0.5], "conditionals": [[[1.0, 0.0], [0.0, 1.0]]]}'
        )
        j = load_joint(buf)
        assert j.pmf.shape == (2, 2)
        assert mutual_information(j, [0]) == pytest.approx(1.0, rel=1e-12)

    def test_flat_order_is_target_fastest(self):
        pmf = np.array([[0.1, 0.2], [0.3, 0.4]])
        buf = io.StringIO()
        save_joint(buf, DiscreteJoint(pmf))
        buf.seek(0)
        import json

        assert json.load(buf)["pmf"] == [0.1, 0.2, 0.3, 0.4]

    def test_bad_payloads(self):
        with pytest.raises(ValueError):
            load_joint(io.StringIO('{"prior": [1.0]}'))
        with pytest.raises(ValueError):
            load_joint(io.StringIO('{"alphabet_sizes": [2], "target_size": 2, "pmf": [1.0]}'))
