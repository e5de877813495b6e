"""Convex projective domains, the Hilbert metric and dual cones.

Domains live in projective space and are handled through an affine chart:
a covector ``c`` such that the lifted cone sits in ``{c > 0}``.  A point of
the chart is the lift normalized to ``c(x) = 1``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import DomainError, PreconditionError
from .pq_form import LiftedCone, Verdict, _lift_matrix
from .tolerances import DEFAULT_TOLERANCES

_BISECT_STEPS = 80
_MAX_EXPAND = 1e12


class ConvexDomain:
    """Base class: an open convex cone given by a slack function.

    Subclasses implement :meth:`slack`, positive exactly on the open cone
    (for lifts with ``chart @ x > 0``), and may override
    :meth:`line_interval` with an exact formula.
    """

    chart = None

    def slack(self, x):
        raise NotImplementedError

    def to_chart(self, x):
        x = np.asarray(x, dtype=float)
        c = float(self.chart @ x)
        if c <= 0:
            raise DomainError("point is not on the positive side of the chart")
        return x / c

    def contains(self, x, tol=0.0):
        x = np.asarray(x, dtype=float)
        if float(self.chart @ x) <= 0:
            x = -x
        return self.slack(self.to_chart(x)) > tol

    def line_interval(self, y, d):
        """Parameters ``s_minus < 0 < s_plus`` where ``y + s d`` leaves the domain.

        Generic version: expand until outside, bisect, then take one Newton
        step on the slack.
        """
        return -self._exit_param(y, -d), self._exit_param(y, d)

    def _exit_param(self, y, d):
        lo, hi = 0.0, 1.0
        while self.slack(y + hi * d) > 0:
            lo, hi = hi, hi * 2
            if hi > _MAX_EXPAND:
                raise DomainError("line does not leave the domain: not properly convex")
        for _ in range(_BISECT_STEPS):
            mid = 0.5 * (lo + hi)
            if self.slack(y + mid * d) > 0:
                lo = mid
            else:
                hi = mid
        s = 0.5 * (lo + hi)
        h = max(hi - lo, 1e-12 * max(1.0, s))
        deriv = (self.slack(y + (s + h) * d) - self.slack(y + (s - h) * d)) / (2 * h)
        if deriv < 0:
            step = self.slack(y + s * d) / deriv
            if abs(step) <= hi - lo + 1e-15:
                s -= step
        return s


class HalfspaceDomain(ConvexDomain):
    """Cone cut out by finitely many strict inequalities ``l_k(x) < 0``.

    Parameters
    ----------
    constraints : array_like, shape (k, n)
        Covectors ``l_k``; rows are rescaled to unit length.
    chart : array_like, optional
        Chart covector.  Defaults to ``-mean(constraints)``, which is positive
        on the cone whenever the cone is properly convex.
    interior : array_like, optional
        A known strictly feasible point; otherwise one is found by linear
        programming.

    Attributes
    ----------
    interior : ndarray
        Strictly feasible point normalized to the chart.
    properly_convex : bool
        Whether the closure of the cone meets ``{chart = 0}`` only at 0.
    """

    def __init__(self, constraints, chart=None, interior=None, tol=None):
        self.tol = DEFAULT_TOLERANCES if tol is None else tol
        L = np.atleast_2d(np.asarray(constraints, dtype=float))
        norms = np.linalg.norm(L, axis=1)
        if L.size == 0 or np.any(norms == 0):
            raise PreconditionError("constraints must be nonzero covectors")
        self.constraints = L / norms[:, None]
        self.dim = L.shape[1]
        if interior is None:
            interior, depth = find_interior_point(self.constraints)
            if interior is None:
                raise DomainError("constraint set has empty interior")
        interior = np.asarray(interior, dtype=float)
        if np.max(self.constraints @ interior) >= 0:
            raise DomainError("supplied interior point violates a constraint")
        if chart is None:
            chart = -self.constraints.mean(axis=0)
            if chart @ interior <= 0:
                chart = interior / np.linalg.norm(interior)
        self.chart = np.asarray(chart, dtype=float)
        if self.chart @ interior <= 0:
            raise DomainError("chart is not positive at the interior point")
        self.interior = interior / (self.chart @ interior)
        self.properly_convex = _bounded_in_chart(self.constraints, self.chart)

    def slack(self, x):
        return float(-np.max(self.constraints @ x))

    def line_interval(self, y, d):
        a = self.constraints @ y
        b = self.constraints @ d
        with np.errstate(divide="ignore"):
            roots = -a / b
        upper = roots[b > 0]
        lower = roots[b < 0]
        if upper.size == 0 or lower.size == 0:
            raise DomainError("line does not leave the domain: not properly convex")
        return float(lower.max()), float(upper.min())

    def transformed(self, g):
        """Image of the domain under the linear map ``g``."""
        ginv = np.linalg.inv(np.asarray(g, dtype=float))
        return HalfspaceDomain(self.constraints @ ginv, chart=self.chart @ ginv,
                               interior=np.asarray(g) @ self.interior, tol=self.tol)


class QuadricDomain(ConvexDomain):
    """The negative cone ``{<x, x> < 0}`` of a form of signature (n - 1, 1).

    The projectivization is the projective model of real hyperbolic space.
    """

    def __init__(self, space, chart=None):
        if space.q != 1:
            raise PreconditionError("QuadricDomain needs a form with exactly one negative direction")
        self.space = space
        w, v = np.linalg.eigh(space.gram)
        t = v[:, 0]
        if chart is None:
            chart = -space.gram @ t
        self.chart = np.asarray(chart, dtype=float)
        # {chart = 0} misses the closed negative cone iff gram^-1 chart is timelike
        dual = np.linalg.solve(space.gram, self.chart)
        if float(self.chart @ dual) >= 0:
            raise DomainError("chart does not cover the negative cone")
        if self.chart @ t < 0:
            t = -t
        self.interior = t / (self.chart @ t)

    def slack(self, x):
        return float(-self.space.self_pairing(x))

    def line_interval(self, y, d):
        g = self.space.gram
        a = float(d @ g @ d)
        b = float(2 * (y @ g @ d))
        c = float(y @ g @ y)
        if c >= 0:
            raise DomainError("base point is not inside the domain")
        if a <= 0:
            raise DomainError("line does not leave the domain: not properly convex")
        disc = np.sqrt(b * b - 4 * a * c)
        # stable quadratic roots
        qq = -0.5 * (b + np.copysign(disc, b))
        r1, r2 = qq / a, c / qq
        return float(min(r1, r2)), float(max(r1, r2))


def find_interior_point(constraints):
    """Maximize the worst slack of ``l_k(x) < 0`` over the unit box.

    Returns ``(x, depth)`` with ``depth > 0``, or ``(None, depth)`` when the
    open cone is empty.
    """
    L = np.atleast_2d(np.asarray(constraints, dtype=float))
    k, n = L.shape
    # variables (x, t); maximize t subject to L x + t <= 0
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    A = np.hstack([L, np.ones((k, 1))])
    bounds = [(-1.0, 1.0)] * n + [(None, 1.0)]
    res = linprog(cost, A_ub=A, b_ub=np.zeros(k), bounds=bounds, method="highs")
    if res.status != 0:
        return None, 0.0
    depth = -res.fun
    if depth <= 1e-12:
        return None, depth
    return res.x[:n], depth


def _bounded_in_chart(L, chart, tol=1e-9):
    """True when the closed cone ``{L x <= 0}`` meets ``{chart = 0}`` only at 0."""
    n = L.shape[1]
    for axis in range(n):
        for direction in (1.0, -1.0):
            cost = np.zeros(n)
            cost[axis] = -direction
            res = linprog(cost, A_ub=L, b_ub=np.zeros(len(L)), A_eq=chart[None, :],
                          b_eq=[0.0], bounds=[(-1.0, 1.0)] * n, method="highs")
            if res.status == 0 and -res.fun > tol:
                return False
    return True


@dataclass(frozen=True)
class SegmentTrace:
    """Boundary points and parameters of the chord through two points."""

    a: np.ndarray
    b: np.ndarray
    y: np.ndarray
    z: np.ndarray
    cross_ratio: float


def segment_trace(domain, y, z):
    """Chord of the domain through y and z, in the order a, y, z, b."""
    for label, pt in (("y", y), ("z", z)):
        pt = np.asarray(pt, dtype=float)
        if float(domain.chart @ pt) <= 0 or domain.slack(domain.to_chart(pt)) <= 0:
            raise DomainError(f"{label} is not an interior point")
    yh = domain.to_chart(y)
    zh = domain.to_chart(z)
    d = zh - yh
    s_minus, s_plus = domain.line_interval(yh, d)
    if not (s_minus < 0 and s_plus > 1):
        raise DomainError("line-boundary intersection failed")
    cr = ((1 - s_minus) * s_plus) / ((-s_minus) * (s_plus - 1))
    return SegmentTrace(yh + s_minus * d, yh + s_plus * d, yh, zh, float(cr))


def hilbert_distance(domain, y, z, tol=1e-12):
    """Hilbert distance ``0.5 * log [a, y, z, b]`` between interior points.

    The cross-ratio is normalized so that ``[0, 1, t, inf] = t``.
    """
    yh = domain.to_chart(np.asarray(y, dtype=float))
    zh = domain.to_chart(np.asarray(z, dtype=float))
    if domain.slack(yh) <= 0 or domain.slack(zh) <= 0:
        raise DomainError("hilbert_distance needs interior points")
    if np.linalg.norm(zh - yh) <= tol * max(1.0, np.linalg.norm(yh)):
        return 0.0
    trace = segment_trace(domain, yh, zh)
    return 0.5 * float(np.log(trace.cross_ratio))


@dataclass(frozen=True)
class DualOutcome:
    """Result of :func:`dual_domain`; ``domain`` is None when the dual is empty."""

    domain: HalfspaceDomain
    feasible: bool
    witness: np.ndarray = None
    depth: float = 0.0


def _cone_vectors(space, samples):
    if isinstance(samples, LiftedCone):
        return samples.vectors
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    if X.shape[1] != space.dim:
        raise PreconditionError("sample vectors have the wrong length")
    return X


def dual_domain(space, samples):
    """Cone of vectors pairing negatively with every sample.

    Covectors are identified with vectors through the form, so the
    constraints are ``<x_k, .> < 0``.  The computed cone contains the dual of
    the full limit cone whenever the samples are a subset of it.
    """
    X = _cone_vectors(space, samples)
    if len(X) == 0:
        raise PreconditionError("dual_domain needs at least one sample")
    L = X @ space.gram
    witness, depth = find_interior_point(L / np.linalg.norm(L, axis=1)[:, None])
    if witness is None:
        return DualOutcome(None, False, None, depth)
    chart = -space.gram @ X.mean(axis=0)
    if chart @ witness <= 0:
        chart = witness / np.linalg.norm(witness)
    dom = HalfspaceDomain(L, chart=chart, interior=witness, tol=space.tol)
    return DualOutcome(dom, True, witness, depth)


@dataclass(frozen=True)
class Membership:
    kind: str
    margin: float


def omega_max_membership(space, cone, x, tol=None):
    """Classify ``x`` against the largest invariant domain of a negative cone.

    ``margin = max_k <x_k, x>`` over the cone lifts, for a unit lift of x.
    Interior when ``margin < -tol``, Boundary when ``|margin| <= tol``,
    Outside otherwise.  With a finite cone this tests membership in a
    superset of the true domain.
    """
    if not isinstance(cone, LiftedCone) or cone.certified is not Verdict.NEGATIVE:
        raise PreconditionError("omega_max_membership needs a negative-certified cone")
    tol = space.tol.boundary if tol is None else tol
    x = np.asarray(x, dtype=float)
    x = x / np.linalg.norm(x)
    margin = float(np.max(cone.vectors @ space.gram @ x))
    if margin < -tol:
        kind = "Interior"
    elif margin <= tol:
        kind = "Boundary"
    else:
        kind = "Outside"
    return Membership(kind, margin)


def positive_combination(vectors, weights):
    """Combination of cone vectors with nonnegative weights, at least two nonzero."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or np.count_nonzero(w) < 2:
        raise PreconditionError("need nonnegative weights with at least two nonzero")
    return w @ np.asarray(vectors, dtype=float)


def convex_hull_interior_sample(space, cone, count, rng=None):
    """Random strictly positive combinations of the cone lifts.

    Raises
    ------
    PreconditionError
        If the cone is not certified or spans a proper subspace.
    """
    if not isinstance(cone, LiftedCone) or cone.certified not in (Verdict.NEGATIVE, Verdict.POSITIVE):
        raise PreconditionError("convex_hull_interior_sample needs a certified cone")
    X = cone.vectors
    if len(X) < 2 or np.linalg.matrix_rank(X) < space.dim:
        raise PreconditionError("cone lifts span a proper subspace")
    rng = np.random.default_rng(rng)
    W = rng.exponential(size=(count, len(X)))
    W /= W.sum(axis=1, keepdims=True)
    return W @ X


@dataclass(frozen=True)
class SegmentProbe:
    """Longest sub-arc of a chord found within tol_null of the null quadric."""

    max_length: float
    pair: tuple
    pairs_checked: int


def boundary_segment_probe(space, cone, pairs=200, rng=None, grid=64):
    """Look for projective segments of the null quadric between sampled points.

    For each sampled pair of points the chord between their lifts is
    evaluated on ``grid`` interior nodes; the longest run of consecutive
    nodes that are null gives an arc whose angular length is reported.  A
    node counts as null when its unit self-pairing is at most
    ``tol_null * d**2``, with ``d`` the chordal distance of the endpoints:
    a chord between transverse points deviates from the quadric by an amount
    of order ``d**2``, while a chord lying in the quadric does not deviate at
    all.  For a negative cone the result is 0.
    """
    if isinstance(cone, LiftedCone):
        X = cone.vectors
    else:
        _, X = _lift_matrix(space, cone, require_null=False)
    n = len(X)
    if n < 2:
        return SegmentProbe(0.0, None, 0)
    total = n * (n - 1) // 2
    if total <= pairs:
        idx = np.array([(i, j) for i in range(n) for j in range(i + 1, n)])
    else:
        rng = np.random.default_rng(rng)
        draws = rng.integers(0, n, size=(3 * pairs, 2))
        draws = draws[draws[:, 0] != draws[:, 1]]
        idx = np.unique(np.sort(draws, axis=1), axis=0)[:pairs]
    s = np.arange(1, grid) / grid
    A = X[idx[:, 0]]
    B = X[idx[:, 1]]
    best = (0.0, None)
    for k in range(len(idx)):
        a, b = A[k], B[k]
        d = min(np.linalg.norm(a - b), np.linalg.norm(a + b))
        if d <= space.tol.dedupe_radius:
            continue
        P = (1 - s)[:, None] * a + s[:, None] * b
        P /= np.linalg.norm(P, axis=1, keepdims=True)
        null = np.abs(space.self_pairing(P)) <= space.tol.null * d * d
        length = _longest_run_angle(P, null)
        if length > best[0]:
            best = (length, (int(idx[k, 0]), int(idx[k, 1])))
    return SegmentProbe(best[0], best[1], len(idx))


def _longest_run_angle(P, mask):
    best = 0.0
    start = None
    for i, flag in enumerate(list(mask) + [False]):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if i - 1 > start:
                c = np.clip(abs(P[start] @ P[i - 1]), -1.0, 1.0)
                best = max(best, float(np.arccos(c)))
            start = None
    return best
