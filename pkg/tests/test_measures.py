import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    goodman_kruskal_lambda,
    kvalseth_lambda,
    naive_lambda,
    quasi_independent_table,
    random_table,
    symmetric_lambda_exact,
)
from prelambda.errors import BadOrder, DegenerateMarginal
from prelambda.measures import (
    Direction,
    Family,
    lambda_k_t,
    lambda_t,
    measure_profile,
    symmetric_lambda,
    symmetric_weights,
)
from prelambda.reproduce import TABLE_1
from prelambda.tables import ProbabilityTable, build_independent, normalize, transpose


@pytest.mark.parametrize(
    "name, t, plain, k",
    [
        ("a", 1, 0.0, 0.0),
        ("a", 2, 0.0, 0.0),
        ("b", 1, 0.0, 0.007),
        ("b", 2, 0.6, 0.606),
        ("c", 1, 0.0, 0.0),
        ("c", 2, 0.4, 0.403),
    ],
)
def test_published_artificial_tables(table_1, name, t, plain, k):
    assert lambda_t(table_1[name], t).value == pytest.approx(plain, abs=5e-4)
    assert lambda_k_t(table_1[name], t).value == pytest.approx(k, abs=5e-4)


def test_cannabis_survey_values(table_4_p):
    assert lambda_t(table_4_p, 2).value == pytest.approx(15 / 93, abs=1e-12)
    assert lambda_t(table_4_p, 1).value == 0.0
    assert round(lambda_k_t(table_4_p, 1).value, 3) == 0.070
    assert round(lambda_k_t(table_4_p, 2).value, 3) == 0.186


def test_error_probabilities(table_1):
    res = lambda_t(table_1["b"], 2)
    assert res.error_case1 == pytest.approx(0.1)
    assert res.error_case2 == pytest.approx(1 - 0.96)
    assert res.value == pytest.approx((res.error_case1 - res.error_case2) / res.error_case1)
    assert res.family is Family.PLAIN and res.direction is Direction.Y_GIVEN_X and res.t == 2
    k = lambda_k_t(table_1["b"], 2)
    a = math.sqrt(0.48**2 / 0.5 + 0.30**2 / 0.3 + 0.18**2 / 0.2)
    assert k.error_case2 == pytest.approx(1 - a, abs=1e-15)


def test_diagonal_table_is_perfect():
    p = ProbabilityTable(np.diag([0.5, 0.3, 0.2]))
    assert lambda_k_t(p, 1).value == 1.0
    assert lambda_t(p, 1).value == 1.0


def test_degenerate_marginal():
    p = ProbabilityTable([[0.5, 0.0, 0.0], [0.2, 0.3, 0.0]])
    lambda_t(p, 1)
    with pytest.raises(DegenerateMarginal):
        lambda_t(p, 2)
    with pytest.raises(DegenerateMarginal):
        lambda_k_t(p, 2)


def test_bad_order(table_1):
    with pytest.raises(BadOrder):
        lambda_t(table_1["a"], 3)


def test_zero_row_contributes_nothing():
    p = ProbabilityTable([[0.4, 0.1, 0.1], [0.0, 0.0, 0.0], [0.1, 0.1, 0.2]])
    expected = naive_lambda(p.p, 1)
    assert lambda_t(p, 1).value == pytest.approx(expected[0])
    assert lambda_k_t(p, 1).value == pytest.approx(expected[1])


def test_x_given_y_is_transposed_measure(table_1):
    p = table_1["b"]
    for fn in (lambda_t, lambda_k_t):
        assert fn(p, 2, Direction.X_GIVEN_Y).value == fn(transpose(p), 2).value
    wide = ProbabilityTable(np.full((2, 4), 1 / 8))
    lambda_t(wide, 3)
    with pytest.raises(BadOrder):
        lambda_t(wide, 2, "x-given-y")


def test_symmetric_lambda_exact_oracle(table_1):
    for name in "abc":
        exact = symmetric_lambda_exact([[Fraction(str(v)) for v in row] for row in TABLE_1[name]])
        assert symmetric_lambda(table_1[name]).value == pytest.approx(float(exact), abs=1e-14)
    assert symmetric_lambda(table_1["a"]).value == pytest.approx(0.0, abs=1e-12)
    assert symmetric_lambda(ProbabilityTable(np.eye(3) / 3)).value == 1.0


def test_symmetric_weights_combine_directional_measures(table_1):
    for p in table_1.values():
        w = symmetric_weights(p)
        combined = w.w_y * lambda_t(p, 1).value + w.w_x * lambda_t(p, 1, "x-given-y").value
        assert combined == pytest.approx(symmetric_lambda(p).value, abs=1e-14)
        assert w.w_y + w.w_x == pytest.approx(1.0)


def test_measure_profile_table_1b(table_1):
    prof = measure_profile(table_1["b"])
    got = [(r.family.value, r.t, round(r.value, 3)) for r in prof]
    assert got == [("plain", 1, 0.0), ("k", 1, 0.007), ("plain", 2, 0.6), ("k", 2, 0.606)]


def test_measure_profile_sizes():
    assert [r.t for r in measure_profile(ProbabilityTable(np.full((2, 2), 0.25)))] == [1, 1]
    indep = build_independent([0.1, 0.2, 0.3, 0.4], [0.4, 0.3, 0.2, 0.1])
    assert all(r.value == pytest.approx(0, abs=1e-12) for r in measure_profile(indep))


def test_measure_profile_flags_degenerate_orders():
    p = ProbabilityTable([[0.5, 0.0, 0.0], [0.2, 0.3, 0.0]])
    prof = measure_profile(p)
    assert [r.degenerate for r in prof] == [False, False, True, True]
    assert math.isnan(prof[2].value)


tables = st.tuples(st.integers(2, 6), st.integers(2, 6), st.integers(0, 2**32 - 1),
                   st.sampled_from(["dense", "sparse", "independent", "capped"]))


@settings(max_examples=300, deadline=None)
@given(tables)
def test_bounds_and_ordering(spec):
    r, c, seed, kind = spec
    p = ProbabilityTable(random_table(np.random.default_rng(seed), r, c, kind))
    for t in range(1, c):
        try:
            plain, k = lambda_t(p, t), lambda_k_t(p, t)
        except DegenerateMarginal:
            continue
        assert 0.0 <= plain.value <= 1.0
        assert 0.0 <= k.value <= 1.0
        assert k.value >= plain.value - 1e-12
        for res in (plain, k):
            assert 0.0 <= res.error_case2 <= res.error_case1 <= 1.0 + 1e-12


@settings(max_examples=200, deadline=None)
@given(tables)
def test_t1_matches_classic_formulas(spec):
    r, c, seed, kind = spec
    g = random_table(np.random.default_rng(seed), r, c, kind)
    p = ProbabilityTable(g)
    if p.col_marginals.max() >= 1.0 - 1e-15:
        return
    assert lambda_t(p, 1).value == pytest.approx(goodman_kruskal_lambda(g), abs=1e-12)
    assert lambda_k_t(p, 1).value == pytest.approx(kvalseth_lambda(g), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_independent_tables_are_zero(r, c, seed):
    p = ProbabilityTable(random_table(np.random.default_rng(seed), r, c, "independent"))
    for t in range(1, c):
        try:
            assert lambda_t(p, t).value == pytest.approx(0, abs=1e-12)
            assert lambda_k_t(p, t).value == pytest.approx(0, abs=1e-12)
        except DegenerateMarginal:
            pass


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 6), st.integers(3, 6), st.integers(0, 2**32 - 1), st.data())
def test_quasi_independence_gives_zero(r, c, seed, data):
    t = data.draw(st.integers(1, c - 2))
    g = quasi_independent_table(np.random.default_rng(seed), r, c, t)
    p = ProbabilityTable(g)
    assert lambda_t(p, t).value == pytest.approx(0, abs=1e-12)
    assert lambda_k_t(p, t).value == pytest.approx(0, abs=1e-12)


def test_quasi_independent_table_1c(table_1):
    assert lambda_t(table_1["c"], 1).value == 0.0
    assert lambda_k_t(table_1["c"], 1).value == pytest.approx(0, abs=1e-12)
    assert not np.allclose(table_1["c"].p, np.outer(table_1["c"].row_marginals, table_1["c"].col_marginals))


@settings(max_examples=300, deadline=None)
@given(tables)
def test_perfection_iff_at_most_t_nonzero(spec):
    r, c, seed, kind = spec
    p = ProbabilityTable(random_table(np.random.default_rng(seed), r, c, kind))
    nonzero = (p.p > 0).sum(axis=1)
    for t in range(1, c):
        try:
            plain, k = lambda_t(p, t).value, lambda_k_t(p, t).value
        except DegenerateMarginal:
            continue
        perfect = bool(np.all(nonzero <= t))
        assert (plain == 1.0) == perfect
        assert (k == 1.0) == perfect


def _grid_tables(r, c, steps):
    for combo in itertools.product(range(steps + 1), repeat=r * c - 1):
        last = steps - sum(combo)
        if last < 0:
            continue
        yield np.array((*combo, last), dtype=float).reshape(r, c) / steps


def _check_against_naive(grid):
    p = ProbabilityTable(grid)
    c = grid.shape[1]
    for t in range(1, c):
        ref = naive_lambda(grid, t)
        if ref is None:
            with pytest.raises(DegenerateMarginal):
                lambda_t(p, t)
            continue
        assert lambda_t(p, t).value == pytest.approx(ref[0], abs=1e-12)
        assert lambda_k_t(p, t).value == pytest.approx(ref[1], abs=1e-12)


@pytest.mark.slow
def test_brute_force_equivalence_2x3():
    count = 0
    for grid in _grid_tables(2, 3, 20):
        _check_against_naive(grid)
        count += 1
    assert count == math.comb(25, 5)


@pytest.mark.slow
def test_brute_force_equivalence_3x3():
    count = 0
    for grid in _grid_tables(3, 3, 10):
        _check_against_naive(grid)
        count += 1
    assert count == math.comb(18, 8)
    # random subsample of the finer 0.05 grid
    rng = np.random.default_rng(99)
    for _ in range(5000):
        bars = np.sort(rng.choice(28, size=8, replace=False))
        parts = np.diff(np.concatenate(([-1], bars, [28]))) - 1
        _check_against_naive(parts.reshape(3, 3) / 20)


def test_count_scale_invariance(table_4_counts):
    from prelambda.tables import ContingencyTable
    scaled = ContingencyTable(table_4_counts.counts * 7.5)
    for t in (1, 2):
        assert lambda_k_t(normalize(scaled), t).value == pytest.approx(lambda_k_t(normalize(table_4_counts), t).value)
