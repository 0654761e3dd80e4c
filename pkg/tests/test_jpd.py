import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pi_forge.errors import InvalidAssignmentError, InvalidInputError, InvalidQueryError, ZeroEvidenceError
from pi_forge.jpd import (
    JointTable,
    VariableSpec,
    binary_vars,
    condition,
    conditional_mutual_information,
    config_of,
    entropy,
    from_factors,
    index_of,
    is_independent,
    marginalize,
    mutual_information,
    uniform,
)
from pi_forge.pi_models import fixture

from .helpers import product_table, tables


def brute_marginal(table, keep):
    keep = sorted(keep)
    out = {}
    for config in itertools.product(*(range(c) for c in table.shape)):
        key = tuple(config[i] for i in keep)
        out[key] = out.get(key, 0.0) + table[config]
    return out


class TestIndexing:
    def test_all_zero_tuple(self):
        assert index_of(uniform(binary_vars(4)), (0, 0, 0, 0)) == 0

    def test_last_variable_fastest(self):
        assert index_of(uniform(binary_vars(4)), (0, 0, 0, 1)) == 1

    def test_first_variable_slowest(self):
        assert index_of(uniform(binary_vars(4)), (1, 0, 0, 0)) == 8

    def test_matches_enumeration(self):
        t = uniform(binary_vars(4))
        for expected, config in enumerate(itertools.product((0, 1), repeat=4)):
            assert index_of(t, config) == expected
            assert config_of(t, expected) == config

    def test_mixed_cardinalities(self):
        t = uniform([VariableSpec("A", 3), VariableSpec("B", 2), VariableSpec("C", 4)])
        for expected, config in enumerate(itertools.product(range(3), range(2), range(4))):
            assert index_of(t, dict(enumerate(config))) == expected

    def test_unbound_variable(self):
        with pytest.raises(InvalidAssignmentError):
            index_of(uniform(binary_vars(3)), {0: 1, 1: 0})

    def test_out_of_range_value(self):
        with pytest.raises(InvalidAssignmentError):
            index_of(uniform(binary_vars(2)), (0, 2))


class TestConstruction:
    def test_rejects_bad_sum(self):
        with pytest.raises(InvalidInputError):
            JointTable(binary_vars(1), [0.5, 0.6])

    def test_rejects_negative(self):
        with pytest.raises(InvalidInputError):
            JointTable(binary_vars(1), [1.5, -0.5])

    def test_rejects_duplicate_names(self):
        with pytest.raises(InvalidInputError):
            JointTable([VariableSpec("A"), VariableSpec("A")], [0.25] * 4)

    def test_rejects_unary_variable(self):
        with pytest.raises(InvalidInputError):
            VariableSpec("A", 1)

    def test_immutable(self):
        t = uniform(binary_vars(2))
        with pytest.raises(AttributeError):
            t.probs = None
        with pytest.raises(ValueError):
            t.probs[0] = 1.0


class TestMarginalize:
    def test_table1_single_variable(self):
        m = marginalize(fixture("table1"), {3})
        assert m.probs.tolist() == [0.5, 0.5]

    def test_table4_submodel_is_table3(self):
        m = marginalize(fixture("table4"), {0, 1, 2})
        assert m.allclose(fixture("table3"), atol=1e-15)

    def test_identity(self, any_fixture):
        assert marginalize(any_fixture, range(any_fixture.n)) == any_fixture

    def test_keeps_relative_order(self):
        t = fixture("table4")
        m = marginalize(t, [3, 1])
        assert m.names == ("X2", "X4")

    def test_empty_keep(self):
        with pytest.raises(InvalidQueryError):
            marginalize(fixture("table1"), set())

    @given(tables(), st.data())
    @settings(max_examples=60, deadline=None)
    def test_matches_brute_force(self, table, data):
        keep = data.draw(st.sets(st.integers(0, table.n - 1), min_size=1))
        expected = brute_marginal(table, keep)
        m = marginalize(table, keep)
        for config, p in expected.items():
            assert m[config] == pytest.approx(p, abs=1e-12)
        assert math.fsum(m.probs) == pytest.approx(1.0, abs=1e-12)

    @given(tables(min_vars=2), st.data())
    @settings(max_examples=60, deadline=None)
    def test_composes(self, table, data):
        a = data.draw(st.sets(st.integers(0, table.n - 1), min_size=1))
        b = data.draw(st.sets(st.integers(0, table.n - 1)))
        direct = marginalize(table, a)
        nested_src = marginalize(table, a | b)
        positions = [sorted(a | b).index(i) for i in sorted(a)]
        nested = marginalize(nested_src, positions)
        assert np.allclose(direct.probs, nested.probs, atol=1e-12, rtol=0)


class TestCondition:
    def test_uniform_stays_uniform(self):
        c = condition(uniform(binary_vars(2)), {0: 0})
        assert c.probs.tolist() == [0.5, 0.5]

    def test_table1_parity(self):
        c = condition(fixture("table1"), {0: 0, 1: 0, 2: 0})
        assert c[(0,)] == 1.0

    def test_table3(self):
        c = condition(fixture("table3"), {0: 0, 1: 0})
        assert c[(0,)] == pytest.approx(0.225 / (0.225 + 0.025), abs=1e-12)
        assert c[(0,)] == pytest.approx(0.9, abs=1e-12)

    def test_zero_evidence(self):
        t = JointTable(binary_vars(2), [0.5, 0.5, 0.0, 0.0])
        with pytest.raises(ZeroEvidenceError):
            condition(t, {0: 1})

    def test_full_evidence_rejected(self):
        with pytest.raises(InvalidQueryError):
            condition(uniform(binary_vars(2)), {0: 0, 1: 0})

    @given(tables(min_vars=2, allow_zeros=False), st.data())
    @settings(max_examples=40, deadline=None)
    def test_normalized(self, table, data):
        var = data.draw(st.integers(0, table.n - 1))
        val = data.draw(st.integers(0, table.vars[var].cardinality - 1))
        assert math.fsum(condition(table, {var: val}).probs) == pytest.approx(1.0, abs=1e-12)


class TestEntropy:
    def test_uniform_binary(self):
        assert entropy(uniform(binary_vars(1))) == pytest.approx(math.log(2), abs=1e-15)

    def test_table1(self):
        assert entropy(fixture("table1")) == pytest.approx(3 * math.log(2), abs=1e-12)

    def test_deterministic(self):
        assert entropy(JointTable(binary_vars(1), [1.0, 0.0])) == 0.0

    @given(tables(max_vars=2), tables(max_vars=2))
    @settings(max_examples=40, deadline=None)
    def test_additive_over_products(self, a, b):
        b = JointTable([VariableSpec("W" + v.name, v.cardinality) for v in b.vars], b.probs)
        assert entropy(from_factors([a, b])) == pytest.approx(entropy(a) + entropy(b), abs=1e-9)

    @given(tables())
    @settings(max_examples=40, deadline=None)
    def test_nonnegative_and_matches_direct_sum(self, t):
        direct = -sum(p * math.log(p) for p in t.probs if p > 0)
        assert entropy(t) >= 0
        assert entropy(t) == pytest.approx(direct, abs=1e-12)


class TestMutualInformation:
    def test_table3_independent_pair(self):
        assert mutual_information(fixture("table3"), 0, 1) < 1e-12

    def test_table3_dependent_pair(self):
        # direct summation over the 2x2 marginal {0.425, 0.075, 0.075, 0.425}
        cells = [0.425, 0.075, 0.075, 0.425]
        expected = sum(p * math.log(p / 0.25) for p in cells)
        assert mutual_information(fixture("table3"), 1, 2) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.2704, abs=1e-4)

    def test_independent_uniform(self):
        assert mutual_information(uniform(binary_vars(2)), 0, 1) == 0.0

    def test_same_variable(self):
        with pytest.raises(InvalidQueryError):
            mutual_information(fixture("table3"), 1, 1)

    @pytest.mark.parametrize("name", ["table1", "table2"])
    def test_pairwise_zero_in_full_pi(self, name):
        t = fixture(name)
        for x, y in itertools.combinations(range(t.n), 2):
            assert mutual_information(t, x, y) <= 1e-12

    @given(tables(min_vars=2), st.data())
    @settings(max_examples=60, deadline=None)
    def test_entropy_identity(self, t, data):
        x, y = data.draw(st.lists(st.integers(0, t.n - 1), min_size=2, max_size=2, unique=True))
        expected = entropy(marginalize(t, {x})) + entropy(marginalize(t, {y})) - entropy(marginalize(t, {x, y}))
        assert mutual_information(t, x, y) == pytest.approx(expected, abs=1e-9)


class TestIndependence:
    def test_table1_marginal_pair(self):
        assert is_independent(fixture("table1"), {0}, set(), {1})

    def test_table1_collective(self):
        assert not is_independent(fixture("table1"), {0}, {1, 2}, {3})

    def test_table3_dependent(self):
        assert not is_independent(fixture("table3"), {1}, set(), {2})

    def test_overlap_rejected(self):
        with pytest.raises(InvalidQueryError):
            is_independent(fixture("table1"), {0, 1}, {1}, {2})

    def test_empty_v_rejected(self):
        with pytest.raises(InvalidQueryError):
            is_independent(fixture("table1"), {0}, set(), set())

    @pytest.mark.parametrize("name", ["table1", "table2"])
    def test_each_variable_depends_on_rest(self, name):
        t = fixture(name)
        for x in range(t.n):
            for y in range(t.n):
                if x == y:
                    continue
                rest = [i for i in range(t.n) if i not in (x, y)]
                assert not is_independent(t, {x}, rest, {y})

    def test_product_is_independent(self):
        t = product_table([0.3, 0.6, 0.8])
        assert is_independent(t, {0}, set(), {1, 2})
        assert is_independent(t, {0}, {2}, {1})

    @given(tables(min_vars=3, max_vars=3, max_card=2))
    @settings(max_examples=60, deadline=None)
    def test_pointwise_agrees_with_cmi(self, t):
        cmi = conditional_mutual_information(t, [0], [2], [1])
        if is_independent(t, {0}, {1}, {2}, tol=1e-12):
            assert cmi <= 1e-9
        if cmi <= 1e-15:
            assert is_independent(t, {0}, {1}, {2}, tol=1e-6)
