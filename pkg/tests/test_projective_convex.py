import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import circle_lift
from hpqcert import (DomainError, HalfspaceDomain, PreconditionError, QuadricDomain,
                     boundary_segment_probe, certify_sign, convex_hull_interior_sample, dual_domain,
                     hilbert_distance, make_standard_space, omega_max_membership)
from hpqcert.gallery import bad_cyclic_fixture
from hpqcert.projective_convex import find_interior_point, positive_combination, segment_trace

THREE_POINTS = [np.array([1.0, 0, 1]), np.array([0, 1.0, 1]), np.array([-1.0, 0, 1])]


def hyperbolic_distance(space, x, y):
    """Oracle: distance in the hyperboloid model."""
    c = -space.pairing(x, y) / np.sqrt(space.self_pairing(x) * space.self_pairing(y))
    return float(np.arccosh(max(c, 1.0)))


def simplex_distance(x, y):
    """Oracle: Hilbert distance on the open positive orthant."""
    r = np.asarray(x) / np.asarray(y)
    return 0.5 * float(np.log(r.max() / r.min()))


@pytest.fixture
def ball():
    return QuadricDomain(make_standard_space(2, 1))


@pytest.fixture
def simplex():
    return HalfspaceDomain(-np.eye(3))


def test_ball_distance_from_centre(ball):
    for r in (0.1, 0.5, 0.9, 0.99):
        assert hilbert_distance(ball, [0, 0, 1.0], [r, 0, 1.0]) == pytest.approx(np.arctanh(r), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-0.7, 0.7), min_size=4, max_size=4))
def test_ball_distance_matches_hyperboloid(c):
    space = make_standard_space(2, 1)
    dom = QuadricDomain(space)
    x = np.array([c[0], c[1], 1.0])
    y = np.array([c[2], c[3], 1.0])
    assert hilbert_distance(dom, x, y) == pytest.approx(hyperbolic_distance(space, x, y), rel=1e-9, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.05, 5.0), min_size=6, max_size=6))
def test_simplex_distance_matches_formula(v):
    dom = HalfspaceDomain(-np.eye(3))
    x, y = np.array(v[:3]), np.array(v[3:])
    assert hilbert_distance(dom, x, y) == pytest.approx(simplex_distance(x, y), rel=1e-9, abs=1e-12)


def test_distance_is_symmetric_and_zero_on_diagonal(simplex):
    x, y = np.array([1.0, 2, 3]), np.array([3.0, 1, 1])
    assert hilbert_distance(simplex, x, x) == 0.0
    assert hilbert_distance(simplex, x, 2 * x) == 0.0
    assert hilbert_distance(simplex, x, y) == pytest.approx(hilbert_distance(simplex, y, x), rel=1e-12)


def test_segment_trace_order(simplex):
    tr = segment_trace(simplex, [1.0, 1, 1], [1.0, 2, 1])
    ya = np.linalg.norm(tr.y - tr.a)
    za = np.linalg.norm(tr.z - tr.a)
    yb = np.linalg.norm(tr.y - tr.b)
    assert ya < za and yb > np.linalg.norm(tr.z - tr.b)
    assert tr.cross_ratio > 1


def test_exterior_points_rejected(ball, simplex):
    with pytest.raises(DomainError):
        hilbert_distance(ball, [0, 0, 1.0], [2.0, 0, 1.0])
    with pytest.raises(DomainError):
        hilbert_distance(simplex, [1.0, 1, 1], [-1.0, 1, 1])


def test_halfplane_is_not_properly_convex():
    dom = HalfspaceDomain([[0.0, 0, -1.0], [0.0, -1.0, -1.0]])
    assert not dom.properly_convex
    assert HalfspaceDomain(-np.eye(3)).properly_convex


def test_empty_constraints_have_no_interior():
    x, depth = find_interior_point([[1.0, 0, 0], [-1.0, 0, 0]])
    assert x is None and depth <= 0
    with pytest.raises(DomainError):
        HalfspaceDomain([[1.0, 0, 0], [-1.0, 0, 0]])


def test_transformed_domain_distances(simplex, rng):
    g = np.eye(3) + 0.3 * rng.normal(size=(3, 3))
    img = simplex.transformed(g)
    x, y = np.array([1.0, 2, 0.5]), np.array([0.2, 1, 1])
    assert hilbert_distance(img, g @ x, g @ y) == pytest.approx(hilbert_distance(simplex, x, y), rel=1e-9)


def test_antipodal_samples_have_empty_dual():
    space = make_standard_space(2, 1)
    x = np.array([1.0, 0, 1])
    out = dual_domain(space, [x, -x])
    assert not out.feasible and out.domain is None


def test_dual_of_circle_sample_contains_ball_centre():
    space = make_standard_space(2, 1)
    pts = [circle_lift(t) for t in np.linspace(0, 2 * np.pi, 12, endpoint=False)]
    cert = certify_sign(space, pts)
    out = dual_domain(space, cert.cone)
    assert out.feasible
    centre = np.array([0, 0, 1.0]) * np.sign(cert.cone.vectors[0, 2])
    assert out.domain.contains(centre)


def test_membership_classes():
    space = make_standard_space(2, 1)
    cert = certify_sign(space, THREE_POINTS)
    cone = cert.cone
    centre = np.array([0, 0, 1.0])
    kinds = {omega_max_membership(space, cone, centre).kind, omega_max_membership(space, cone, -centre).kind}
    assert kinds == {"Interior", "Outside"}
    assert omega_max_membership(space, cone, cone.vectors[0]).kind == "Boundary"
    outside = np.array([2.0, 0, 1])
    for v in (outside, -outside):
        assert omega_max_membership(space, cone, v).kind == "Outside"


def test_membership_requires_negative_cone():
    space = make_standard_space(2, 1)
    with pytest.raises(PreconditionError):
        omega_max_membership(space, THREE_POINTS, [0, 0, 1.0])


def test_fundamental_domain_pitfall():
    # a vector pairing negatively with each of three circle points along one
    # orientation is not a member for the opposite orientation
    space = make_standard_space(2, 1)
    cone = certify_sign(space, THREE_POINTS).cone
    v = -cone.vectors.sum(axis=0)
    assert np.all(cone.vectors @ space.gram @ v > 0)
    assert omega_max_membership(space, cone, v).kind == "Outside"


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(3, 20))
def test_hull_samples_are_negative(seed, n):
    rng = np.random.default_rng(seed)
    space = make_standard_space(2, 1)
    angles = np.sort(rng.uniform(0, 2 * np.pi, n))
    if np.min(np.diff(np.r_[angles, angles[0] + 2 * np.pi])) < 1e-3:
        return
    cone = certify_sign(space, [circle_lift(t) for t in angles]).cone
    V = convex_hull_interior_sample(space, cone, 50, rng)
    assert np.all(space.self_pairing(V) < 0)


def test_positive_combination_needs_two_weights():
    with pytest.raises(PreconditionError):
        positive_combination(np.eye(3), [1.0, 0, 0])
    with pytest.raises(PreconditionError):
        positive_combination(np.eye(3), [1.0, -1.0, 1.0])
    assert np.allclose(positive_combination(np.eye(3), [1.0, 2.0, 0]), [1, 2, 0])


def test_probe_on_circle_finds_nothing():
    space = make_standard_space(2, 1)
    pts = [circle_lift(t) for t in np.linspace(0, 2 * np.pi, 40, endpoint=False)]
    cone = certify_sign(space, pts).cone
    assert boundary_segment_probe(space, cone, pairs=300, rng=0).max_length == 0.0


def test_probe_finds_isotropic_segment():
    bundle = bad_cyclic_fixture()
    space = bundle.rep.space
    res = boundary_segment_probe(space, bundle.probe_points)
    # the isotropic plane through u0 and u1 contains the whole quarter arc
    assert 0.9 * np.pi / 2 <= res.max_length <= np.pi / 2 + 1e-9
    assert res.pair == (0, 1)


def test_quadric_domain_needs_one_negative_direction():
    with pytest.raises(PreconditionError):
        QuadricDomain(make_standard_space(2, 2))
    with pytest.raises(DomainError):
        QuadricDomain(make_standard_space(2, 1), chart=[1.0, 0, 0])
