import json
import math
from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gromovlab import FiniteMetricSpace, Method, MetricSpaceError, hyperbolicity_delta, ultrametric_defect
from gromovlab.experiments import random_metric_space
from gromovlab.metric_core import (
    fourpoint_value,
    gromov_product,
    gromov_value,
    is_triangle_triplet,
    sums_lemma_defects,
    triangle_defect,
    ultrametric_value,
)

import oracles


def star_tree(leaves):
    n = leaves + 1
    d = np.full((n, n), 2.0)
    d[0, :] = d[:, 0] = 1.0
    np.fill_diagonal(d, 0.0)
    return FiniteMetricSpace(d)


def cycle_graph(n):
    i = np.arange(n)
    gap = np.abs(i[:, None] - i[None, :])
    return FiniteMetricSpace(np.minimum(gap, n - gap).astype(float))


@st.composite
def spaces(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    kind = draw(st.sampled_from(["euclidean", "tree", "graph"]))
    return random_metric_space(n, seed, kind)


class TestConstruction:
    def test_valid_table(self):
        X = FiniteMetricSpace([[0, 1, 2], [1, 0, 1], [2, 1, 0]], labels=["a", "b", "c"])
        assert X.n == 3 and len(X) == 3
        assert X[0, 2] == 2.0
        assert X.labels == ("a", "b", "c")

    def test_table_is_read_only(self):
        X = FiniteMetricSpace([[0, 1], [1, 0]])
        with pytest.raises(ValueError):
            X.dist[0, 1] = 5.0

    def test_input_not_aliased(self):
        d = np.array([[0.0, 1.0], [1.0, 0.0]])
        X = FiniteMetricSpace(d)
        d[0, 1] = d[1, 0] = 7.0
        assert X[0, 1] == 1.0

    @pytest.mark.parametrize(
        "table, witness",
        [
            ([[0, 1], [2, 0]], (0, 1)),
            ([[1, 1], [1, 0]], (0, 0)),
            ([[0, 0], [0, 0]], (0, 1)),
            ([[0, -1], [-1, 0]], (0, 1)),
        ],
    )
    def test_invalid_tables_carry_witness(self, table, witness):
        with pytest.raises(MetricSpaceError) as exc:
            FiniteMetricSpace(table)
        assert exc.value.witness == witness

    def test_non_square_and_non_finite(self):
        with pytest.raises(MetricSpaceError):
            FiniteMetricSpace([[0, 1, 2], [1, 0, 1]])
        with pytest.raises(MetricSpaceError):
            FiniteMetricSpace([[0, np.inf], [np.inf, 0]])

    def test_triangle_violation_rejected(self):
        d = [[0, 1, 3], [1, 0, 1], [3, 1, 0]]
        with pytest.raises(MetricSpaceError) as exc:
            FiniteMetricSpace(d)
        assert exc.value.witness == (0, 2, 1)

    def test_triangle_tolerance_is_relative(self):
        # a violation of 1e-10 on distances of size 1 is within 1e-9 * max
        d = [[0, 1, 2 + 1e-10], [1, 0, 1], [2 + 1e-10, 1, 0]]
        FiniteMetricSpace(d)
        with pytest.raises(MetricSpaceError):
            FiniteMetricSpace([[0, 1, 2 + 1e-8], [1, 0, 1], [2 + 1e-8, 1, 0]])

    def test_label_count_checked(self):
        with pytest.raises(MetricSpaceError):
            FiniteMetricSpace([[0, 1], [1, 0]], labels=["a"])

    def test_from_points_and_subspace(self):
        X = FiniteMetricSpace.from_points([[0, 0], [3, 4], [6, 8]])
        assert X[0, 1] == 5.0 and X[0, 2] == 10.0
        S = X.subspace([2, 0])
        assert S.n == 2 and S[0, 1] == 10.0


class TestGromovProduct:
    def test_half_line_basepoint_zero(self):
        X = FiniteMetricSpace.from_points([0.0, 2.5, 7.0])
        assert gromov_product(X, 1, 2, 0) == 2.5
        assert gromov_product(X, 2, 1, 0) == 2.5

    def test_same_point(self):
        X = random_metric_space(4, 1)
        assert gromov_product(X, 2, 2, 2) == 0.0

    def test_matches_formula(self):
        X = random_metric_space(5, 3)
        d = X.dist.tolist()
        for x, y, w in permutations(range(5), 3):
            assert gromov_product(X, x, y, w) == pytest.approx(oracles.gromov_product(d, x, y, w), abs=1e-15)

    def test_index_checked(self):
        X = random_metric_space(3, 0)
        with pytest.raises(IndexError):
            gromov_product(X, 0, 1, 3)


class TestHyperbolicity:
    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("method", list(Method))
    def test_small_spaces(self, n, method):
        X = random_metric_space(n, 0)
        rep = hyperbolicity_delta(X, method)
        assert rep.delta == 0.0

    def test_degenerate_fourpoint_witness(self):
        rep = hyperbolicity_delta(random_metric_space(3, 0), Method.FOUR_POINT)
        assert rep.witness == (0, 0, 0, 0)

    def test_uniform_half_line(self):
        X = FiniteMetricSpace.from_points(np.linspace(0, 50, 26))
        for method in Method:
            assert hyperbolicity_delta(X, method).delta == 0.0

    def test_star_tree(self):
        X = star_tree(5)
        assert hyperbolicity_delta(X, Method.FOUR_POINT).delta == 0.0
        assert hyperbolicity_delta(X, Method.GROMOV_PRODUCT).delta == 0.0

    def test_four_cycle(self):
        # sums 2, 4, 2 for the square: (4 - 2) / 2
        X = cycle_graph(4)
        assert hyperbolicity_delta(X).delta == 1.0
        assert hyperbolicity_delta(X, Method.GROMOV_PRODUCT).delta == 1.0

    def test_longer_cycle(self):
        X = cycle_graph(8)
        d = X.dist.tolist()
        assert hyperbolicity_delta(X).delta == oracles.delta_fourpoint(d)

    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("kind", ["euclidean", "tree", "graph"])
    def test_against_oracles(self, seed, kind):
        X = random_metric_space(9, seed, kind)
        d = X.dist.tolist()
        fp = hyperbolicity_delta(X, Method.FOUR_POINT).delta
        gp = hyperbolicity_delta(X, Method.GROMOV_PRODUCT).delta
        assert fp == pytest.approx(oracles.delta_fourpoint(d), abs=1e-12)
        assert gp == pytest.approx(oracles.delta_gromov(d), abs=1e-12)

    def test_tree_metrics_are_zero_hyperbolic(self):
        for seed in range(5):
            X = random_metric_space(12, seed, "tree")
            assert hyperbolicity_delta(X).delta <= 1e-12

    def test_report_json_fields(self):
        rep = hyperbolicity_delta(cycle_graph(4))
        out = json.loads(json.dumps(rep.to_dict()))
        assert set(out) == {"delta", "witness", "method"}
        assert out == {"delta": 1.0, "witness": [0, 1, 2, 3], "method": "FourPoint"}

    def test_method_accepts_text(self):
        X = cycle_graph(5)
        assert hyperbolicity_delta(X, "GromovProduct").method is Method.GROMOV_PRODUCT

    @settings(max_examples=60, deadline=None)
    @given(spaces())
    def test_definitions_agree(self, X):
        fp = hyperbolicity_delta(X, Method.FOUR_POINT).delta
        gp = hyperbolicity_delta(X, Method.GROMOV_PRODUCT).delta
        assert abs(fp - gp) <= 1e-12

    @settings(max_examples=60, deadline=None)
    @given(spaces())
    def test_bounded_by_ultrametric_defect(self, X):
        assert hyperbolicity_delta(X).delta <= ultrametric_defect(X).defect + 1e-12

    @settings(max_examples=60, deadline=None)
    @given(spaces())
    def test_witness_reevaluates_exactly(self, X):
        fp = hyperbolicity_delta(X, Method.FOUR_POINT)
        gp = hyperbolicity_delta(X, Method.GROMOV_PRODUCT)
        if X.n >= 4:
            assert list(fp.witness) == sorted(fp.witness)
            assert fourpoint_value(X, fp.witness) == fp.delta
        assert gromov_value(X, gp.witness) == gp.delta

    @settings(max_examples=40, deadline=None)
    @given(spaces(), st.data())
    def test_subspace_monotone(self, X, data):
        idx = data.draw(st.lists(st.integers(0, X.n - 1), min_size=1, unique=True))
        S = X.subspace(sorted(idx))
        assert hyperbolicity_delta(S).delta <= hyperbolicity_delta(X).delta
        assert ultrametric_defect(S).defect <= ultrametric_defect(X).defect

    @settings(max_examples=40, deadline=None)
    @given(spaces(), st.floats(0.1, 10))
    def test_scaling(self, X, lam):
        Y = FiniteMetricSpace(lam * X.dist)
        assert hyperbolicity_delta(Y).delta == pytest.approx(lam * hyperbolicity_delta(X).delta, abs=1e-12)

    def test_lexicographic_tie_break(self):
        # every quadruple of the 5-cycle ties; the first one wins
        rep = hyperbolicity_delta(cycle_graph(5))
        assert rep.witness == (0, 1, 2, 3)


class TestUltrametric:
    def test_equilateral(self):
        X = FiniteMetricSpace(np.ones((3, 3)) - np.eye(3))
        assert ultrametric_defect(X).defect == 0.0

    def test_small(self):
        assert ultrametric_defect(random_metric_space(2, 0)).witness == (0, 0, 0)

    def test_half_line_with_midpoint(self):
        x, y = 2.0, 10.0
        X = FiniteMetricSpace.from_points([0.0, x, y, (x + y) / 2])
        rep = ultrametric_defect(X)
        assert rep.defect >= abs(x - y) / 2
        assert ultrametric_value(X, rep.witness) == rep.defect

    def test_log_transformed_valid_and_below_log2(self):
        t = np.concatenate(([0.0], np.geomspace(1, 1e5, 40)))
        X = FiniteMetricSpace(np.log1p(np.abs(t[:, None] - t[None, :])))
        rep = ultrametric_defect(X)
        assert 0.6 < rep.defect <= math.log(2)

    @pytest.mark.parametrize("seed", range(5))
    def test_against_oracle(self, seed):
        X = random_metric_space(11, seed, "graph")
        assert ultrametric_defect(X).defect == pytest.approx(oracles.ultra_defect(X.dist.tolist()), abs=1e-15)

    def test_json(self):
        rep = ultrametric_defect(FiniteMetricSpace.from_points([0.0, 1.0, 2.0]))
        assert rep.to_dict() == {"defect": 1.0, "witness": [0, 1, 2]}


class TestTriangleDefect:
    def test_half_line(self):
        t = np.linspace(0, 5, 6)
        assert triangle_defect(np.abs(t[:, None] - t[None, :]))[0] == 0.0

    def test_exact_violation(self):
        # points 1, 2, 3 of the description are indices 0, 1, 2
        d = np.array([[0, 3, 1], [3, 0, 1], [1, 1, 0]], dtype=float)
        value, wit = triangle_defect(d)
        assert value == 1.0
        assert wit == (0, 1, 2)

    def test_small_tables(self):
        assert triangle_defect([[0.0]]) == (0.0, None)

    def test_rejects_asymmetric_and_diagonal(self):
        with pytest.raises(MetricSpaceError):
            triangle_defect([[0, 1], [2, 0]])
        with pytest.raises(MetricSpaceError):
            triangle_defect([[1, 1], [1, 0]])

    @pytest.mark.parametrize("seed", range(5))
    def test_snowflake_of_random_metric(self, seed):
        X = random_metric_space(10, seed, "graph")
        assert triangle_defect(np.sqrt(X.dist))[0] == 0.0

    @pytest.mark.parametrize("seed", range(5))
    def test_against_oracle(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.uniform(0.1, 3, (8, 8))
        d = np.triu(a, 1) + np.triu(a, 1).T
        assert triangle_defect(d)[0] == pytest.approx(oracles.triangle_violation(d.tolist()), abs=1e-15)


class TestTriplets:
    def test_examples(self):
        assert is_triangle_triplet(1, 2, 3)
        assert not is_triangle_triplet(1, 1, 3)
        with pytest.raises(ValueError):
            is_triangle_triplet(-1, 1, 1)

    @given(st.integers(0, 10**6), st.data())
    def test_half_sum_triplets(self, t, data):
        # integers keep the halves exact, so the flat cases stay flat
        s = data.draw(st.integers(0, t))
        assert is_triangle_triplet((t + s) / 2, (t - s) / 2, s)
        assert is_triangle_triplet((t + s) / 2, (t - s) / 2, t)


class TestSumsLemma:
    def test_constant_table(self):
        A = np.ones((4, 4)) - np.eye(4)
        assert sums_lemma_defects(A) == (0.0, 0.0)

    def test_half_line(self):
        t = np.arange(4.0)
        A = np.abs(t[:, None] - t[None, :])
        triple, pair = sums_lemma_defects(A)
        # a_03 = 3 against max(a_01, a_13) = 2; pairing sums 2, 4, 4
        assert triple == 1.0
        assert pair == 0.0
        assert pair <= 2 * max(0.0, triple)

    def test_negated(self):
        t = np.array([0.0, 1.0, 3.0, 7.0])
        A = -np.abs(t[:, None] - t[None, :])
        triple, pair = sums_lemma_defects(A)
        assert pair <= 2 * max(0.0, triple) + 1e-12

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            sums_lemma_defects(np.arange(16.0).reshape(4, 4))

    def test_random_tables(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            a = rng.normal(size=(4, 4))
            A = np.triu(a, 1) + np.triu(a, 1).T
            triple, pair = sums_lemma_defects(A)
            assert pair <= 2 * max(0.0, triple) + 1e-12
            ref = max(A[i, j] - max(A[i, k], A[k, j]) for i, j, k in permutations(range(4), 3))
            assert triple == ref

    @settings(max_examples=200)
    @given(st.lists(st.floats(-100, 100), min_size=6, max_size=6))
    def test_lemma_property(self, vals):
        A = np.zeros((4, 4))
        for v, (i, j) in zip(vals, combinations(range(4), 2)):
            A[i, j] = A[j, i] = v
        for sign in (1, -1):
            triple, pair = sums_lemma_defects(sign * A)
            assert pair <= 2 * max(0.0, triple) + 1e-9
