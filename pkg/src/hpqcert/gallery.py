"""Named example groups used as documentation and as test fixtures."""

import warnings
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .coxeter_vinberg import build_reflections, complete_graph, pentagon, square_graph
from .errors import PreconditionError
from .pq_form import make_standard_space
from .proximal_dynamics import GroupRep
from .tolerances import DEFAULT_TOLERANCES

EXPECTED_VERDICTS = ("Negative", "Positive", "Mixed", "Empty", "NonTransverse")


class PingPongWarning(UserWarning):
    """Generators may fail to generate a free discrete group."""


@dataclass(eq=False)
class ExampleBundle:
    """A named group with the verdict it should produce.

    Attributes
    ----------
    congruence : ndarray or None
        Matrix C with C^T B C standard, when generators were conjugated from
        a non-diagonal form B.
    tolerances : dict
        Overrides applied before running the fixture.
    probe_points : ndarray or None
        Extra vectors of interest for the segment probe.
    coxeter : CoxeterSpec or None
    """

    name: str
    rep: GroupRep
    expected_verdict: str
    provenance: str
    congruence: np.ndarray = None
    tolerances: dict = field(default_factory=dict)
    probe_points: np.ndarray = None
    coxeter: object = None
    default_depth: int = 8

    def __post_init__(self):
        if self.expected_verdict not in EXPECTED_VERDICTS:
            raise PreconditionError(f"unknown expected verdict {self.expected_verdict}")


def _projector_pair(space, u, w):
    """Rank-one maps x -> <x, w> u / <u, w> and x -> <x, u> w / <u, w>."""
    uw = space.pairing(u, w)
    return np.outer(u, space.gram @ w) / uw, np.outer(w, space.gram @ u) / uw


def hyperbolic_element(space, u, w, t):
    """Form-preserving map scaling null u by e^t, null w by e^-t, fixing their orthogonal."""
    pu, pw = _projector_pair(space, np.asarray(u, float), np.asarray(w, float))
    return np.eye(space.dim) + (np.exp(t) - 1) * pu + (np.exp(-t) - 1) * pw


def standard_boost(t):
    """Boost of translation length t in O(2,1), attracting (1,0,1), repelling (-1,0,1)."""
    c, s = np.cosh(t), np.sinh(t)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def _circle_point(theta):
    return np.array([np.cos(theta), np.sin(theta), 1.0])


def _frame_to(u_angle, w_angle):
    """Isometry of O(2,1) sending angle 0 to u_angle and angle pi to w_angle."""
    space = make_standard_space(2, 1)
    u = _circle_point(u_angle)
    w = _circle_point(w_angle)
    scale = -2.0 / space.pairing(u, w)
    u = u * scale
    e1 = (u - w) / 2
    e3 = (u + w) / 2
    e2 = np.cross(space.gram @ e1, space.gram @ e3)
    e2 /= np.sqrt(space.pairing(e2, e2))
    return np.column_stack([e1, e2, e3])


def _angle(v):
    return float(np.arctan2(v[1], v[0]) % (2 * np.pi))


def _arc(h, center, half):
    """Image under h of the closed boundary arc of given half-width about ``center``."""
    a = _angle(h @ _circle_point(center - half))
    b = _angle(h @ _circle_point(center + half))
    c = _angle(h @ _circle_point(center))
    if (c - a) % (2 * np.pi) > (b - a) % (2 * np.pi):
        a, b = b, a
    return a, b


def _on_arc(x, arc):
    a, b = arc
    return (x - a) % (2 * np.pi) <= (b - a) % (2 * np.pi)


def schottky_ping_pong(translation_lengths, axis_endpoints):
    """Check that the attracting and repelling arcs of the generators are disjoint.

    A boost of length t maps the complement of the open arc of half-width
    arccos(tanh(t/2)) about its repelling point into the closed arc of the
    same half-width about its attracting point.  Pairwise disjoint arcs give
    a free discrete group.
    """
    arcs = []
    for t, (ua, wa) in zip(translation_lengths, axis_endpoints):
        half = np.arccos(np.tanh(t / 2))
        h = _frame_to(ua, wa)
        arcs.append(_arc(h, 0.0, half))
        arcs.append(_arc(h, np.pi, half))
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            A, B = arcs[i], arcs[j]
            if _on_arc(A[0], B) or _on_arc(A[1], B) or _on_arc(B[0], A) or _on_arc(B[1], A):
                return False
    return True


DEFAULT_SCHOTTKY = ((3.0, 3.0), ((0.0, np.pi / 2), (np.pi, 3 * np.pi / 2)))


def schottky_fuchsian(translation_lengths=DEFAULT_SCHOTTKY[0], axis_endpoints=DEFAULT_SCHOTTKY[1],
                      labels=None, tol=None):
    """Hyperbolic isometries of the disk as matrices in O(2,1).

    Parameters
    ----------
    translation_lengths : sequence of float
        Positive translation length of each generator.
    axis_endpoints : sequence of (float, float)
        Boundary angles of the attracting and repelling fixed points.

    Warns
    -----
    PingPongWarning
        When the ping-pong arcs overlap.
    """
    lengths = list(translation_lengths)
    ends = list(axis_endpoints)
    if not lengths or len(lengths) != len(ends):
        raise PreconditionError("need one axis per translation length and at least one generator")
    if any(not t > 0 for t in lengths):
        raise PreconditionError("translation lengths must be positive")
    space = make_standard_space(2, 1, tol=tol)
    labels = labels or [chr(ord("a") + i) for i in range(len(lengths))]
    gens = []
    for t, (ua, wa) in zip(lengths, ends):
        if abs(np.exp(1j * ua) - np.exp(1j * wa)) < 1e-9:
            raise PreconditionError("axis endpoints must differ")
        gens.append(hyperbolic_element(space, _circle_point(ua), _circle_point(wa), t))
    if len(lengths) > 1 and not schottky_ping_pong(lengths, ends):
        warnings.warn("ping-pong arcs overlap; group may not be free and discrete", PingPongWarning)
    return GroupRep(space, list(zip(labels, gens)))


def block_embed(rep, p, q, tol=None):
    """Extend a group in O(m,1) by the identity to the standard form of signature (p, q).

    The m positive directions go to the first m positive slots and the
    negative direction to the first negative slot.
    """
    m = rep.space.p
    std = np.diag([1.0] * m + [-1.0])
    if rep.space.q != 1 or rep.dim != m + 1 or np.max(np.abs(rep.space.gram - std)) > 0:
        raise PreconditionError("block_embed needs a group preserving the standard form of signature (m, 1)")
    if p < m or q < 1:
        raise PreconditionError(f"cannot embed signature ({m}, 1) into ({p}, {q})")
    index = list(range(m)) + [p]
    target = make_standard_space(p, q, tol=tol if tol is not None else rep.space.tol)
    gens = []
    for lab, g in zip(rep.labels, rep.generators):
        big = np.eye(p + q)
        big[np.ix_(index, index)] = g
        gens.append((lab, big))
    return GroupRep(target, gens, involutive=rep.involutive)


def _check_sl2(g, name="g"):
    g = np.asarray(g, dtype=float)
    if g.shape != (2, 2):
        raise PreconditionError(f"{name} must be 2x2")
    if abs(np.linalg.det(g) - 1) > 1e-12:
        raise PreconditionError(f"{name} must have determinant 1, got {np.linalg.det(g)!r}")
    return g


def symmetric_power_form(n):
    """Pairing on binary forms of degree n - 1 induced by minus the area form.

    In the monomial basis ``x^(N-k) y^k`` (N = n - 1) it is antidiagonal
    with entry ``-(-1)^k / C(N, k)`` at (k, N - k); symmetric for odd n.
    """
    N = n - 1
    B = np.zeros((n, n))
    for k in range(n):
        B[k, N - k] = -((-1) ** k) / comb(N, k)
    return B


def sym_power(n, g):
    """Action of g in SL(2, R) on binary forms of degree n - 1.

    Column k holds the coefficients of ``(g e1)^(N-k) (g e2)^k`` in the
    monomial basis.  Returns the matrix and the invariant form.
    """
    if n < 1:
        raise PreconditionError("n must be positive")
    g = _check_sl2(g)
    N = n - 1
    P = np.polynomial.polynomial
    col1 = [g[0, 0], g[1, 0]]
    col2 = [g[0, 1], g[1, 1]]
    out = np.zeros((n, n))
    for k in range(n):
        poly = P.polymul(P.polypow(col1, N - k), P.polypow(col2, k))
        out[: len(poly), k] = poly
    return out, symmetric_power_form(n)


def standard_congruence(B):
    """Matrix C with C^T B C = diag(+1, ..., -1, ...), positives first."""
    B = np.asarray(B, dtype=float)
    w, Q = np.linalg.eigh((B + B.T) / 2)
    order = np.argsort(-w, kind="stable")
    w, Q = w[order], Q[:, order]
    if np.any(w == 0):
        raise PreconditionError("form is degenerate")
    return Q / np.sqrt(np.abs(w))


def normalize_generators(gram, generators, tol=None):
    """Conjugate generators preserving ``gram`` into the standard form.

    Returns the new space, conjugated ``(label, matrix)`` pairs and C.
    """
    C = standard_congruence(gram)
    J = np.round(C.T @ gram @ C)
    p = int(np.sum(np.diag(J) > 0))
    space = make_standard_space(p, len(J) - p, tol=tol)
    Cinv = np.linalg.inv(C)
    gens = [(lab, Cinv @ np.asarray(g, float) @ C) for lab, g in generators]
    return space, gens, C


def pants_sl2():
    """Free group with disjoint axes (three-holed sphere type).

    a fixes 0 and infinity; b is a conjugated by a Moebius map sending 0 to 1
    and infinity to 3.
    """
    a = np.diag([4.0, 0.25])
    M = np.array([[3.0, 1.0], [1.0, 1.0]]) / np.sqrt(2.0)
    b = M @ a @ np.linalg.inv(M)
    return {"a": a, "b": b}


def torus_sl2(t=1.5):
    """Free group with crossing axes (one-holed torus type)."""
    a = np.diag([2.0, 0.5])
    b = np.array([[np.cosh(t), np.sinh(t)], [np.sinh(t), np.cosh(t)]])
    return {"a": a, "b": b}


def schottky_sl2(translation_lengths=DEFAULT_SCHOTTKY[0], axis_endpoints=DEFAULT_SCHOTTKY[1], labels=None):
    """SL(2, R) matrices for the same Schottky data as :func:`schottky_fuchsian`.

    A boundary angle theta corresponds to the line through
    (sin(theta/2), cos(theta/2)), and a translation length t to eigenvalues
    e^(t/2) and e^(-t/2).
    """
    labels = labels or [chr(ord("a") + i) for i in range(len(translation_lengths))]
    out = {}
    for lab, t, (ua, wa) in zip(labels, translation_lengths, axis_endpoints):
        P = np.array([[np.sin(ua / 2), np.sin(wa / 2)], [np.cos(ua / 2), np.cos(wa / 2)]])
        out[lab] = P @ np.diag([np.exp(t / 2), np.exp(-t / 2)]) @ np.linalg.inv(P)
    return out


def hitchin_fixture(n, fuchsian=None, tol=None):
    """Compose a surface group in SL(2, R) with the n-dimensional irreducible representation.

    Only odd n is supported; the invariant form is then symmetric with
    signature (m+1, m) or (m, m+1), m = (n-1)/2.
    """
    if n < 3 or n % 2 == 0:
        raise PreconditionError("hitchin_fixture needs odd n >= 3")
    fuchsian = schottky_sl2() if fuchsian is None else fuchsian
    B = symmetric_power_form(n)
    gens = [(lab, sym_power(n, _check_sl2(g, lab))[0]) for lab, g in fuchsian.items()]
    tol, overrides = _fixture_tol(f"hitchin-{n}", tol)
    space, conj, C = normalize_generators(B, gens, tol=tol)
    return ExampleBundle(f"hitchin-{n}", GroupRep(space, conj), "Negative",
                         f"surface group composed with the {n}-dimensional irreducible representation",
                         congruence=C, tolerances=overrides)


def determinant_form():
    """Polarized determinant on 2x2 matrices in the basis E11, E12, E21, E22."""
    return 0.5 * np.array([[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]], dtype=float)


def po22_pair(g, h):
    """Matrix of A -> g A h^-1 on 2x2 matrices (row-major basis E11, E12, E21, E22)."""
    g = _check_sl2(g, "g")
    h = _check_sl2(h, "h")
    return np.kron(g, np.linalg.inv(h).T)


def _po22_bundle(name, left, right, expected, provenance, tol=None):
    gram = determinant_form()
    gens = [(lab, po22_pair(left[lab], right[lab])) for lab in left]
    space, conj, C = normalize_generators(gram, gens, tol=tol)
    return ExampleBundle(name, GroupRep(space, conj), expected, provenance, congruence=C)


def mixed_sign_fixture(tol=None):
    """Product of a disjoint-axes and a crossing-axes holonomy acting on 2x2 matrices.

    The fixed points of the two factors are ordered differently on the
    circle, so the limit set in the (2,2) quadric has triples of both signs.
    """
    tol, overrides = _fixture_tol("mixed-po22", tol)
    bundle = _po22_bundle("mixed-po22", pants_sl2(), torus_sl2(), "Mixed",
                          "pair of free-group holonomies with differently ordered fixed points", tol)
    bundle.tolerances = overrides
    return bundle


def po22_diagonal_fixture(which=1, tol=None):
    """One holonomy acting on both sides; its limit set has constant sign."""
    rho = pants_sl2() if which == 1 else torus_sl2()
    return _po22_bundle(f"po22-diagonal-{which}", rho, rho, "Positive",
                        "single holonomy acting by conjugation on 2x2 matrices", tol)


def bad_cyclic_fixture(p=2, q=2, lam=2.0, tol=None):
    """Element of O(p,q) with a repeated top eigenvalue on an isotropic plane.

    It acts by lam on span(u_0, u_1) and by 1/lam on span(w_0, w_1), where
    u_i = (e_i + e_(p+i))/sqrt(2) and w_i = (e_i - e_(p+i))/sqrt(2).
    """
    if min(p, q) < 2:
        raise PreconditionError("bad_cyclic_fixture needs min(p, q) >= 2")
    if not lam > 1:
        raise PreconditionError("lam must exceed 1")
    space = make_standard_space(p, q, tol=tol)
    n = p + q
    g = np.eye(n)
    us = []
    for i in range(2):
        u = np.zeros(n)
        w = np.zeros(n)
        u[i] = u[p + i] = w[i] = 1 / np.sqrt(2)
        w[p + i] = -1 / np.sqrt(2)
        pu, pw = _projector_pair(space, u, w)
        g = g + (lam - 1) * pu + (1 / lam - 1) * pw
        us.append(u)
    return ExampleBundle("bad-cyclic", GroupRep(space, [("g", g)]), "Empty",
                         "element whose top eigenvalue has a two-dimensional isotropic eigenspace",
                         probe_points=np.array(us))


def quasi_fuchsian_fixture(p, q, tol=None):
    base = schottky_fuchsian(tol=tol)
    return ExampleBundle(f"quasi-fuchsian-{p}{q}", block_embed(base, p, q, tol=tol), "Negative",
                         "Schottky group block-embedded from O(2,1)")


def coxeter_fixture(spec, name, tol=None):
    vin = build_reflections(spec, tol=tol)
    return ExampleBundle(name, vin.group_rep(), "Negative", "right-angled reflection group",
                         coxeter=spec, default_depth=10)


COXETER_EXAMPLES = {
    "pentagon": pentagon,
    "square": square_graph,
    "complete": complete_graph,
}

EXAMPLES = {
    "schottky-21": lambda tol=None: ExampleBundle("schottky-21", schottky_fuchsian(tol=tol), "Negative",
                                                  "two-generator Schottky group in O(2,1)"),
    "quasi-fuchsian-31": lambda tol=None: quasi_fuchsian_fixture(3, 1, tol),
    "quasi-fuchsian-22": lambda tol=None: quasi_fuchsian_fixture(2, 2, tol),
    "hitchin-3": lambda tol=None: hitchin_fixture(3, tol=tol),
    "hitchin-5": lambda tol=None: hitchin_fixture(5, tol=tol),
    "mixed-po22": mixed_sign_fixture,
    "po22-diagonal-1": lambda tol=None: po22_diagonal_fixture(1, tol),
    "po22-diagonal-2": lambda tol=None: po22_diagonal_fixture(2, tol),
    "bad-cyclic": lambda tol=None: bad_cyclic_fixture(tol=tol),
}


# Pairings between nearby limit points shrink like a power of their distance
# (the fourth power for the degree-4 curve), so dense samples drop below double
# precision.  A coarser dedupe radius keeps these samples resolvable.
FIXTURE_TOLERANCES = {
    "hitchin-5": {"dedupe_radius": 2e-3},
    "mixed-po22": {"dedupe_radius": 3e-4},
}


def fixture_tolerances(name):
    return dict(FIXTURE_TOLERANCES.get(name, {}))


def _fixture_tol(name, tol):
    """Fixture overrides apply only when the caller passes no tolerances."""
    overrides = fixture_tolerances(name)
    if tol is None:
        return DEFAULT_TOLERANCES.updated(**overrides), overrides
    return tol, {}


def example_names():
    return sorted(set(EXAMPLES) | set(COXETER_EXAMPLES))


def get_example(name, tol=None):
    """Bundle for a named fixture.  Coxeter names return their reflection group."""
    if name in EXAMPLES:
        return EXAMPLES[name](tol=tol)
    if name in COXETER_EXAMPLES:
        return coxeter_fixture(COXETER_EXAMPLES[name](), name, tol)
    raise KeyError(f"unknown example {name!r}; choose from {example_names()}")
