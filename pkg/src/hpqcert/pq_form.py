"""Bilinear forms of signature (p, q), projective points and sign certification.

A finite set of points on the null quadric of a form is *negative* when the
points admit lifts whose pairwise pairings are all negative, and *positive*
when they admit lifts with all pairings positive.  The routines here decide
which case holds for a sampled set, or produce witnesses that neither does.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import DegenerateFormError, PreconditionError
from .tolerances import DEFAULT_TOLERANCES

_BLOCK = 1024


class NormClass(str, Enum):
    NEGATIVE = "negative"
    NULL = "null"
    POSITIVE = "positive"


class Sign(str, Enum):
    """Outcome of a single triple test."""

    NEGATIVE = "Negative"
    POSITIVE = "Positive"
    DEGENERATE = "Degenerate"


class Verdict(str, Enum):
    """Outcome of certifying a whole set."""

    NEGATIVE = "Negative"
    POSITIVE = "Positive"
    MIXED = "Mixed"
    DEGENERATE = "Degenerate"
    EMPTY = "Empty"


class ScanVerdict(str, Enum):
    ALL_NEGATIVE = "AllNegative"
    ALL_POSITIVE = "AllPositive"
    MIXED = "Mixed"
    DEGENERATE = "Degenerate"


def _as_float_matrix(matrix):
    arr = np.asarray(matrix)
    if arr.dtype == object:
        arr = np.vectorize(float, otypes=[float])(arr)
    return np.asarray(arr, dtype=float)


def signature(space_or_matrix, tol=None):
    """Inertia of a symmetric matrix.

    Returns ``(p, q, r)``: the counts of positive, negative and numerically
    zero eigenvalues, where zero means ``|lambda| <= tol * spectral_radius``.
    """
    if isinstance(space_or_matrix, QuadraticSpace):
        gram = space_or_matrix.gram
    else:
        gram = _as_float_matrix(space_or_matrix)
    if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
        raise PreconditionError("signature needs a square matrix")
    tol = DEFAULT_TOLERANCES.degenerate if tol is None else tol
    eig = np.linalg.eigvalsh((gram + gram.T) / 2)
    radius = np.max(np.abs(eig)) if eig.size else 0.0
    cut = tol * radius
    p = int(np.sum(eig > cut))
    q = int(np.sum(eig < -cut))
    return p, q, len(eig) - p - q


class QuadraticSpace:
    """A nondegenerate symmetric bilinear form on R^n.

    Parameters
    ----------
    gram : array_like
        Symmetric n x n matrix.  Asymmetry at rounding level is averaged out;
        anything larger is rejected.
    tol : Tolerances, optional
    exact_gram : array_like of Fraction, optional
        Exact copy of the Gram matrix, kept for rational arithmetic.

    Raises
    ------
    DegenerateFormError
        If some eigenvalue is below ``tol.degenerate`` times the spectral radius.
    """

    def __init__(self, gram, tol=None, exact_gram=None):
        self.tol = DEFAULT_TOLERANCES if tol is None else tol
        g = _as_float_matrix(gram)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] < 1:
            raise PreconditionError("gram must be a nonempty square matrix")
        if np.max(np.abs(g - g.T)) > 1e-12 * max(1.0, np.max(np.abs(g))):
            raise PreconditionError("gram must be symmetric")
        g = (g + g.T) / 2
        p, q, r = signature(g, self.tol.degenerate)
        if r:
            raise DegenerateFormError(f"form has numerical nullity {r} (inertia {p},{q},{r})")
        g.setflags(write=False)
        self.gram = g
        self.dim = g.shape[0]
        self.p, self.q = p, q
        self.norm = float(np.linalg.norm(g, 2))
        self._gram_inv = np.linalg.inv(g)
        self.exact_gram = exact_gram

    @property
    def signature(self):
        return self.p, self.q

    def __repr__(self):
        return f"QuadraticSpace(p={self.p}, q={self.q})"

    def with_tolerances(self, tol):
        return QuadraticSpace(self.gram, tol=tol, exact_gram=self.exact_gram)

    def _check_vec(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise PreconditionError(f"expected vectors of length {self.dim}, got shape {x.shape}")
        return x

    def pairing(self, x, y):
        x = self._check_vec(x)
        y = self._check_vec(y)
        return x @ self.gram @ y.T if x.ndim > 1 or y.ndim > 1 else float(x @ self.gram @ y)

    def self_pairing(self, x):
        x = self._check_vec(x)
        return np.einsum("...i,ij,...j->...", x, self.gram, x)

    def adjoint_inverse(self, g):
        """Inverse of a form-preserving matrix, computed as gram^-1 g^T gram."""
        return self._gram_inv @ np.asarray(g, dtype=float).T @ self.gram

    def form_residual(self, g):
        g = np.asarray(g, dtype=float)
        return float(np.max(np.abs(g.T @ self.gram @ g - self.gram)))

    def classify(self, x):
        x = self._check_vec(x)
        v = float(self.self_pairing(x / np.linalg.norm(x)))
        if v < -self.tol.null:
            return NormClass.NEGATIVE
        if v > self.tol.null:
            return NormClass.POSITIVE
        return NormClass.NULL

    def point(self, x):
        return ProjectivePoint.from_vector(self, x)


def make_standard_space(p, q, tol=None):
    """The diagonal form with p entries +1 followed by q entries -1."""
    if p < 0 or q < 0 or p + q < 2:
        raise PreconditionError("standard space needs p, q >= 0 and p + q >= 2")
    gram = np.diag([1.0] * p + [-1.0] * q)
    exact = np.array([[Fraction(int(v)) for v in row] for row in gram], dtype=object)
    return QuadraticSpace(gram, tol=tol, exact_gram=exact)


def pairing(space, x, y):
    """Evaluate x^T gram y."""
    return space.pairing(x, y)


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A point of projective space with a unit-norm lift."""

    lift: np.ndarray
    norm_class: NormClass
    self_pairing: float

    @classmethod
    def from_vector(cls, space, x):
        x = space._check_vec(x).astype(float).copy()
        nrm = np.linalg.norm(x)
        if not np.isfinite(nrm) or nrm == 0:
            raise PreconditionError("a projective point needs a nonzero finite lift")
        x /= nrm
        x.setflags(write=False)
        sp = float(space.self_pairing(x))
        return cls(x, space.classify(x), sp)

    def distance(self, other):
        return chordal_distance(self.lift, other.lift)

    def flipped(self):
        return ProjectivePoint(np.negative(self.lift), self.norm_class, self.self_pairing)


def chordal_distance(x, y):
    """Projective distance min(|x - y|, |x + y|) between unit lifts."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(min(np.linalg.norm(x - y), np.linalg.norm(x + y)))


@dataclass(frozen=True, eq=False)
class LiftedCone:
    """Points of the null quadric together with a lift orientation for each."""

    space: QuadraticSpace
    points: tuple
    signs: np.ndarray
    certified: Verdict = None

    @property
    def vectors(self):
        return self.signs[:, None] * np.array([pt.lift for pt in self.points])

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class SignCertificate:
    """Result of :func:`certify_sign`.

    ``cone`` is set for Negative and Positive verdicts.  A Mixed verdict
    carries one triple of each sign, a Degenerate verdict the offending pair.
    """

    verdict: Verdict
    cone: LiftedCone = None
    negative_witness: tuple = None
    positive_witness: tuple = None
    degenerate_pair: tuple = None
    ambiguous_small_set: bool = False
    min_abs_pairing: float = None


def _coerce_points(space, points):
    pts = []
    for pt in points:
        if isinstance(pt, ProjectivePoint):
            pts.append(pt)
        else:
            pts.append(ProjectivePoint.from_vector(space, pt))
    return pts


def _lift_matrix(space, points, require_null=True):
    pts = _coerce_points(space, points)
    if not pts:
        return pts, np.zeros((0, space.dim))
    X = np.array([pt.lift for pt in pts])
    if require_null:
        bad = [i for i, pt in enumerate(pts) if pt.norm_class is not NormClass.NULL]
        if bad:
            raise PreconditionError(f"points {bad[:5]} are not null within tol_null")
    return pts, X


def _pair_blocks(space, X):
    """Yield (row slice, pairing block, zero-threshold block) over all pairs."""
    gx = X @ space.gram
    q = np.abs(np.einsum("ij,ij->i", gx, X))
    for start in range(0, len(X), _BLOCK):
        rows = slice(start, min(start + _BLOCK, len(X)))
        G = gx[rows] @ X.T
        dots = np.abs(X[rows] @ X.T)
        d2 = np.clip(2.0 - 2.0 * dots, 0.0, None)
        thr = space.tol.sign * space.norm * d2 + 0.5 * (q[rows, None] + q[None, :])
        yield rows, G, thr


def _degenerate_pair(space, X):
    for rows, G, thr in _pair_blocks(space, X):
        bad = np.abs(G) <= thr
        idx = np.arange(rows.start, rows.stop)
        bad &= idx[:, None] < np.arange(len(X))[None, :]
        if bad.any():
            i, j = np.argwhere(bad)[0]
            return int(idx[i]), int(j)
    return None


def _check_distinct(space, X):
    radius = space.tol.dedupe_radius
    for start in range(0, len(X), _BLOCK):
        rows = slice(start, min(start + _BLOCK, len(X)))
        dots = np.abs(X[rows] @ X.T)
        d2 = np.clip(2.0 - 2.0 * dots, 0.0, None)
        idx = np.arange(rows.start, rows.stop)
        close = (d2 <= radius * radius) & (idx[:, None] < np.arange(len(X))[None, :])
        if close.any():
            i, j = np.argwhere(close)[0]
            raise PreconditionError(f"points {idx[i]} and {j} are projectively equal")


def _propagate(space, X, target):
    """Orient lifts from point 0 so every pairing has sign ``target``.

    Returns ``(signs, None)`` on success and ``(signs, (i, j))`` for the first
    pair whose oriented pairing has the wrong sign.
    """
    g0 = X @ space.gram @ X[0]
    signs = np.where(target * g0 > 0, 1.0, -1.0)
    signs[0] = 1.0
    Y = signs[:, None] * X
    gy = Y @ space.gram
    for start in range(0, len(Y), _BLOCK):
        rows = slice(start, min(start + _BLOCK, len(Y)))
        G = gy[rows] @ Y.T
        idx = np.arange(rows.start, rows.stop)
        bad = (target * G <= 0) & (idx[:, None] < np.arange(len(Y))[None, :])
        if bad.any():
            i, j = np.argwhere(bad)[0]
            return signs, (int(idx[i]), int(j))
    return signs, None


def certify_sign(space, points, check_distinct=True):
    """Decide whether a finite set of null points is negative or positive.

    Lifts are oriented by propagation from the first point: every other lift
    is chosen so its pairing with the first has the target sign, and then all
    remaining pairs are checked.  Failure of a pair (i, j) in the negative
    attempt shows that the triple (0, i, j) has positive product of
    pairings, and symmetrically for the positive attempt.

    Parameters
    ----------
    space : QuadraticSpace
    points : sequence of ProjectivePoint or vectors
        At least two distinct null points.

    Returns
    -------
    SignCertificate
    """
    pts, X = _lift_matrix(space, points)
    if len(pts) < 2:
        raise PreconditionError("certify_sign needs at least two points")
    if check_distinct:
        _check_distinct(space, X)
    bad = _degenerate_pair(space, X)
    if bad is not None:
        return SignCertificate(Verdict.DEGENERATE, degenerate_pair=bad)
    min_abs = _min_abs_offdiag(space, X)
    neg_signs, neg_fail = _propagate(space, X, -1.0)
    if neg_fail is None:
        cone = LiftedCone(space, tuple(pts), neg_signs, Verdict.NEGATIVE)
        return SignCertificate(Verdict.NEGATIVE, cone=cone, ambiguous_small_set=len(pts) == 2,
                               min_abs_pairing=min_abs)
    pos_signs, pos_fail = _propagate(space, X, 1.0)
    if pos_fail is None:
        cone = LiftedCone(space, tuple(pts), pos_signs, Verdict.POSITIVE)
        return SignCertificate(Verdict.POSITIVE, cone=cone, min_abs_pairing=min_abs)
    return SignCertificate(
        Verdict.MIXED,
        negative_witness=(0,) + pos_fail,
        positive_witness=(0,) + neg_fail,
        min_abs_pairing=min_abs,
    )


def _min_abs_offdiag(space, X):
    best = np.inf
    gx = X @ space.gram
    for start in range(0, len(X), _BLOCK):
        rows = slice(start, min(start + _BLOCK, len(X)))
        G = np.abs(gx[rows] @ X.T)
        idx = np.arange(rows.start, rows.stop)
        G[idx[:, None] >= np.arange(len(X))[None, :]] = np.inf
        best = min(best, float(G.min()))
    return best


def triple_sign(space, y1, y2, y3):
    """Sign of the product of the three pairwise pairings of null points.

    A Negative triple spans a triangle inside the negative set, a Positive
    triple one inside the positive set.  Degenerate means some pairing is
    numerically zero.
    """
    pts, X = _lift_matrix(space, [y1, y2, y3])
    _check_distinct(space, X)
    return _triple_signs(space, X, np.array([[0, 1, 2]]))[0]


def _triple_signs(space, X, triples):
    """Vectorized triple signs for an (m, 3) index array."""
    gx = X @ space.gram
    q = np.abs(np.einsum("ij,ij->i", gx, X))
    degenerate = np.zeros(len(triples), bool)
    prod = np.ones(len(triples))
    for a, b in ((0, 1), (0, 2), (1, 2)):
        i = triples[:, a]
        j = triples[:, b]
        g = np.einsum("ij,ij->i", gx[i], X[j])
        d2 = np.clip(2.0 - 2.0 * np.abs(np.einsum("ij,ij->i", X[i], X[j])), 0.0, None)
        thr = space.tol.sign * space.norm * d2 + 0.5 * (q[i] + q[j])
        degenerate |= np.abs(g) <= thr
        prod *= g
    return [Sign.DEGENERATE if d else (Sign.NEGATIVE if p < 0 else Sign.POSITIVE)
            for d, p in zip(degenerate, prod)]


@dataclass(frozen=True)
class TransversalityMargin:
    """Smallest pairing between distinct points.

    ``margin`` is scale free: ``|<x, y>| / d(x, y)**2`` on unit lifts, with
    ``d`` the chordal distance.  It stays bounded below on samples of a
    transverse curve however dense they are.  ``raw`` is the plain minimum of
    ``|<x, y>|`` on unit lifts.
    """

    margin: float
    pair: tuple
    raw: float
    raw_pair: tuple


def transversality_margin(space, points):
    pts, X = _lift_matrix(space, points, require_null=False)
    if len(pts) < 2:
        raise PreconditionError("transversality_margin needs at least two points")
    gx = X @ space.gram
    best = (np.inf, None)
    best_raw = (np.inf, None)
    n = len(X)
    for start in range(0, n, _BLOCK):
        rows = slice(start, min(start + _BLOCK, n))
        idx = np.arange(rows.start, rows.stop)
        G = np.abs(gx[rows] @ X.T)
        d2 = np.clip(2.0 - 2.0 * np.abs(X[rows] @ X.T), 0.0, None)
        lower = idx[:, None] >= np.arange(n)[None, :]
        G[lower] = np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(d2 > 0, G / d2, np.where(G > 0, np.inf, 0.0))
        ratio[lower] = np.inf
        k = np.unravel_index(np.argmin(ratio), ratio.shape)
        if ratio[k] < best[0]:
            best = (float(ratio[k]), (int(idx[k[0]]), int(k[1])))
        k = np.unravel_index(np.argmin(G), G.shape)
        if G[k] < best_raw[0]:
            best_raw = (float(G[k]), (int(idx[k[0]]), int(k[1])))
    return TransversalityMargin(best[0], best[1], best_raw[0], best_raw[1])


@dataclass(frozen=True)
class ScanResult:
    verdict: ScanVerdict
    negative_witness: tuple = None
    positive_witness: tuple = None
    degenerate_witness: tuple = None
    triples_checked: int = 0
    exhaustive: bool = False


def sign_constancy_scan(space, points, samples=2000, rng_seed=0, exhaustive_cap=1_000_000):
    """Evaluate triple signs across a set and report whether they agree.

    All triples are checked when ``len(points)**3 <= exhaustive_cap``;
    otherwise ``samples`` random triples are.  Witnesses are the
    lexicographically first failing index triples among those checked.
    """
    pts, X = _lift_matrix(space, points)
    n = len(pts)
    if n < 3:
        raise PreconditionError("sign_constancy_scan needs at least three points")
    exhaustive = n ** 3 <= exhaustive_cap
    if exhaustive:
        triples = np.array(list(combinations(range(n), 3)), dtype=np.int64)
    else:
        rng = np.random.default_rng(rng_seed)
        draws = np.sort(rng.integers(0, n, size=(4 * samples, 3)), axis=1)
        ok = (draws[:, 0] != draws[:, 1]) & (draws[:, 1] != draws[:, 2])
        triples = np.unique(draws[ok], axis=0)
        if len(triples) > samples:
            triples = triples[np.sort(rng.choice(len(triples), samples, replace=False))]
    signs = np.array([s.value for s in _triple_signs(space, X, triples)])

    def first(kind):
        hits = np.nonzero(signs == kind.value)[0]
        return tuple(int(v) for v in triples[hits[0]]) if len(hits) else None

    neg, pos, deg = first(Sign.NEGATIVE), first(Sign.POSITIVE), first(Sign.DEGENERATE)
    if deg is not None:
        verdict = ScanVerdict.DEGENERATE
    elif neg is not None and pos is not None:
        verdict = ScanVerdict.MIXED
    elif pos is None:
        verdict = ScanVerdict.ALL_NEGATIVE
    else:
        verdict = ScanVerdict.ALL_POSITIVE
    return ScanResult(verdict, neg, pos, deg, len(triples), exhaustive)
