import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hpqcert import (DegenerateFormError, HypothesisError, PreconditionError, build_gram, build_gram_exact,
                     build_reflections, check_hypotheses, check_no_empty_square, commuting_infinite_subsets,
                     coxeter_pipeline, fundamental_cone_membership, perturb_to_nondegenerate, sample_sigma,
                     sigma_membership, signature)
from hpqcert.coxeter_vinberg import INF, CoxeterSpec, complete_graph, pentagon, square_graph


def brute_force_square(n, infinite):
    """Oracle: disjoint S1, S2, each holding an infinite pair, commuting across."""
    inf = {(min(i, j), max(i, j)) for i, j in infinite}

    def has_inf(S):
        return any((a, b) in inf for a, b in itertools.combinations(sorted(S), 2))

    for mask in itertools.product(range(3), repeat=n):
        S1 = [k for k in range(n) if mask[k] == 1]
        S2 = [k for k in range(n) if mask[k] == 2]
        if not (has_inf(S1) and has_inf(S2)):
            continue
        if all((min(a, b), max(a, b)) not in inf for a in S1 for b in S2):
            return True
    return False


def test_pentagon_gram_and_signature():
    spec = pentagon()
    B = build_gram_exact(spec)
    assert B[0, 2] == Fraction(-21, 20) and B[0, 1] == 0 and B[0, 0] == 1
    assert signature(build_gram(spec)) == (4, 1, 0)


def test_exact_reflections_preserve_form():
    vin = build_reflections(pentagon())
    B = vin.exact_gram
    eye = np.array([[Fraction(int(i == j)) for j in range(5)] for i in range(5)], dtype=object)
    for R in vin.exact_reflections:
        assert np.all(R.T.dot(B).dot(R) == B)
        assert np.all(R.dot(R) == eye)


def test_reflection_fixes_orthogonal_and_negates_root():
    vin = build_reflections(pentagon())
    R = vin.reflections[0]
    assert np.allclose(R @ np.eye(5)[0], -np.eye(5)[0])
    # s1 commutes with s2 and fixes e2, which is orthogonal to e1
    assert np.allclose(R @ np.eye(5)[1], np.eye(5)[1])


def test_from_labels():
    m = [[1, 2, INF], [2, 1, 0], [INF, 0, 1]]
    spec = CoxeterSpec.from_labels(m, alpha=Fraction(3, 2))
    assert spec.infinite == {(0, 2), (1, 2)}
    assert spec.m(0, 1) == 2 and spec.m(2, 0) == INF
    with pytest.raises(PreconditionError):
        CoxeterSpec.from_labels([[1, 3], [3, 1]])
    with pytest.raises(PreconditionError):
        CoxeterSpec.from_edges(["a", "b"], [(0, 1)], alpha=Fraction(1, 2))


def test_degenerate_gram_and_perturbation():
    spec = CoxeterSpec.from_edges(["s", "t"], [(0, 1)], alpha=1)
    assert np.array_equal(build_gram(spec), [[1, -1], [-1, 1]])
    with pytest.raises(DegenerateFormError):
        build_reflections(spec)
    fixed = perturb_to_nondegenerate(spec, 0.1, seed=3)
    a = fixed.alpha[(0, 1)]
    assert 1 < a <= 1.1
    assert signature(build_gram(fixed)) == (1, 1, 0)
    with pytest.raises(PreconditionError):
        perturb_to_nondegenerate(pentagon(), 0.1)


def test_hypotheses_on_named_graphs():
    hyp = check_hypotheses(pentagon())
    assert hyp.failed() == [] and hyp.crosschecked
    sq = check_hypotheses(square_graph())
    assert set(sq.failed()) == {"irreducible", "condition1"}
    a, b, c, d = sq.square_witness
    spec = square_graph()
    assert spec.m(a, b) == spec.m(b, c) == spec.m(c, d) == spec.m(d, a) == 2
    assert spec.m(a, c) == spec.m(b, d) == INF
    comp = check_hypotheses(complete_graph())
    assert set(comp.failed()) == {"infinite", "irreducible"}
    low = check_hypotheses(pentagon(alpha=Fraction(1)))
    assert low.failed() == ["condition2"]


def test_pipeline_abort_names_failures():
    with pytest.raises(HypothesisError) as err:
        coxeter_pipeline(square_graph(), depth=3)
    assert set(err.value.failed) == {"irreducible", "condition1"}
    assert "condition1" in str(err.value)


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 7), st.data())
def test_square_search_matches_brute_force(n, data):
    pairs = list(itertools.combinations(range(n), 2))
    chosen = data.draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [e for e, c in zip(pairs, chosen) if c]
    spec = CoxeterSpec.from_edges([f"s{i}" for i in range(n)], edges)
    ok, witness = check_no_empty_square(spec)
    assert ok == (not brute_force_square(n, edges))
    assert commuting_infinite_subsets(spec)[0] == (not ok)


def test_fundamental_cone_pitfall():
    vin = build_reflections(pentagon())
    v = -np.ones(5)
    pairings = vin.gram @ v
    assert np.allclose(pairings, 1.1)
    assert not fundamental_cone_membership(vin, v)
    assert fundamental_cone_membership(vin, -v)
    assert sigma_membership(vin, -v)
    assert not sigma_membership(vin, v)
    assert not sigma_membership(vin, np.eye(5)[0])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_sigma_samples_are_timelike(seed):
    vin = build_reflections(pentagon())
    V, attempts = sample_sigma(vin, 50, rng=seed)
    assert len(V) == 50 and attempts >= 50
    for v in V:
        assert sigma_membership(vin, v)
    # nonnegative coefficients times nonpositive pairings give B(v, v) <= 0
    assert np.all(vin.space.self_pairing(V) < 0)
