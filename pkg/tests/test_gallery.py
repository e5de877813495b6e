import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hpqcert import PreconditionError, QuadraticSpace, is_proximal, make_standard_space, signature
from hpqcert.gallery import (EXAMPLES, PingPongWarning, block_embed, determinant_form, example_names,
                             get_example, hitchin_fixture, hyperbolic_element, normalize_generators,
                             po22_pair, schottky_fuchsian, schottky_ping_pong, schottky_sl2,
                             standard_boost, standard_congruence, sym_power, symmetric_power_form)


def random_sl2(rng, spread=1.0):
    while True:
        g = rng.uniform(-spread, spread, size=(2, 2))
        d = np.linalg.det(g)
        if d > 0.1:
            return g / np.sqrt(d)


def test_sym_power_of_diagonal():
    lam = 3.0
    S, _ = sym_power(3, np.diag([lam, 1 / lam]))
    assert np.allclose(S, np.diag([lam ** 2, 1.0, lam ** -2]))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from([2, 3, 4, 5, 7]))
def test_sym_power_is_homomorphism_preserving_form(seed, n):
    rng = np.random.default_rng(seed)
    g, h = random_sl2(rng), random_sl2(rng)
    Sg, B = sym_power(n, g)
    Sh, _ = sym_power(n, h)
    Sgh, _ = sym_power(n, g @ h)
    scale = max(1.0, np.max(np.abs(Sgh)))
    assert np.max(np.abs(Sgh - Sg @ Sh)) <= 1e-12 * scale * n
    assert np.max(np.abs(Sg.T @ B @ Sg - B)) <= 1e-12 * max(1.0, np.max(np.abs(Sg))) ** 2 * n


def test_sym_power_requires_sl2():
    with pytest.raises(PreconditionError):
        sym_power(3, np.diag([2.0, 1.0]))


@pytest.mark.parametrize("n", [3, 5, 7, 9])
def test_symmetric_power_form_signature(n):
    m = (n - 1) // 2
    expected = (m + 1, m) if m % 2 else (m, m + 1)
    assert signature(symmetric_power_form(n))[:2] == expected


def test_determinant_form_is_preserved():
    rng = np.random.default_rng(4)
    G = determinant_form()
    assert signature(G) == (2, 2, 0)
    A = rng.normal(size=(2, 2))
    g, h = random_sl2(rng), random_sl2(rng)
    vec = A.reshape(-1)
    img = po22_pair(g, h) @ vec
    assert np.allclose(img.reshape(2, 2), g @ A @ np.linalg.inv(h))
    assert vec @ G @ vec == pytest.approx(np.linalg.det(A))
    M = po22_pair(g, h)
    assert np.allclose(M.T @ G @ M, G)


def test_standard_congruence():
    B = symmetric_power_form(5)
    C = standard_congruence(B)
    assert np.allclose(C.T @ B @ C, np.diag([1.0, 1, -1, -1, -1]))


def test_normalized_generators_preserve_standard_form():
    gens = [(lab, sym_power(3, g)[0]) for lab, g in schottky_sl2().items()]
    space, conj, C = normalize_generators(symmetric_power_form(3), gens)
    assert (space.p, space.q) == (2, 1)
    for _, g in conj:
        assert space.form_residual(g) < 1e-9


def test_hyperbolic_element():
    space = make_standard_space(2, 1)
    u, w = np.array([1.0, 0, 1]), np.array([-1.0, 0, 1])
    g = hyperbolic_element(space, u, w, 2.0)
    assert np.allclose(g, standard_boost(2.0))
    ok, data = is_proximal(g)
    assert ok and data.top_eigenvalue == pytest.approx(np.exp(2.0))


def test_ping_pong():
    assert schottky_ping_pong((3.0, 3.0), ((0, np.pi / 2), (np.pi, 3 * np.pi / 2)))
    assert not schottky_ping_pong((0.2, 0.2), ((0, np.pi / 2), (np.pi, 3 * np.pi / 2)))
    with pytest.warns(PingPongWarning):
        schottky_fuchsian((0.2, 0.2))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        schottky_fuchsian()


def test_block_embed():
    base = schottky_fuchsian()
    for p, q in [(2, 2), (3, 1), (3, 2)]:
        big = block_embed(base, p, q)
        assert (big.space.p, big.space.q) == (p, q)
        for g in big.generators:
            assert big.space.form_residual(g) < 1e-9
    with pytest.raises(PreconditionError):
        block_embed(base, 1, 1)


def test_hitchin_signatures():
    assert (hitchin_fixture(3).rep.space.p, hitchin_fixture(3).rep.space.q) == (2, 1)
    rep5 = hitchin_fixture(5).rep
    assert (rep5.space.p, rep5.space.q) == (2, 3)
    with pytest.raises(PreconditionError):
        hitchin_fixture(4)


def test_registry():
    names = example_names()
    for name in ("pentagon", "square", "complete", "mixed-po22", "bad-cyclic", "hitchin-5"):
        assert name in names
    for name in EXAMPLES:
        bundle = get_example(name)
        assert bundle.name == name
        for g in bundle.rep.generators:
            assert isinstance(bundle.rep.space, QuadraticSpace)
    assert get_example("mixed-po22").expected_verdict == "Mixed"
    assert get_example("hitchin-5").tolerances == {"dedupe_radius": 2e-3}
    with pytest.raises(KeyError):
        get_example("nope")


def test_user_tolerances_replace_fixture_defaults():
    tol = make_standard_space(1, 1).tol.updated(sign=1e-8)
    bundle = get_example("hitchin-5", tol=tol)
    assert bundle.tolerances == {}
    assert bundle.rep.space.tol.dedupe_radius == 1e-6
