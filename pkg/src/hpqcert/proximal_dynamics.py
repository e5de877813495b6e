"""Proximal elements, word enumeration and limit-set sampling."""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import FormViolationError, NotProximalError, PreconditionError
from .pq_form import ProjectivePoint
from .tolerances import DEFAULT_TOLERANCES

DEFAULT_ELEMENT_CAP = 200_000
DEFAULT_POINT_CAP = 2000
_QUANT = 1e9
_POWER_STEPS = 3


class GroupRep:
    """A finitely generated group of matrices preserving a bilinear form.

    Parameters
    ----------
    space : QuadraticSpace
    generators : mapping or sequence of (label, matrix) pairs
    involutive : sequence of bool, optional
        Per-generator involution flags; detected from ``g @ g`` when omitted.

    Raises
    ------
    FormViolationError
        If some generator g moves the form by more than
        ``1e-9 * |gram| * max(1, |g|)**2``.
    """

    def __init__(self, space, generators, involutive=None):
        items = list(generators.items()) if hasattr(generators, "items") else list(generators)
        if not items:
            raise PreconditionError("a group needs at least one generator")
        labels = [str(lab) for lab, _ in items]
        if len(set(labels)) != len(labels):
            raise PreconditionError("generator labels must be unique")
        mats = [np.array(m, dtype=float) for _, m in items]
        n = space.dim
        for lab, m in zip(labels, mats):
            if m.shape != (n, n):
                raise PreconditionError(f"generator {lab} has shape {m.shape}, expected {(n, n)}")
        self.space = space
        self.labels = labels
        self.generators = mats
        residuals = [space.form_residual(m) for m in mats]
        self.form_check_residual = max(residuals)
        for lab, m, r in zip(labels, mats, residuals):
            if r > 1e-9 * space.norm * max(1.0, np.linalg.norm(m, 2)) ** 2:
                raise FormViolationError(f"generator {lab} does not preserve the form (residual {r:.3g})")
        eye = np.eye(n)
        if involutive is None:
            involutive = [np.max(np.abs(m @ m - eye)) <= 1e-9 * max(1.0, np.max(np.abs(m))) ** 2
                          for m in mats]
        self.involutive = [bool(v) for v in involutive]
        # alphabet: generators followed by inverses of the non-involutive ones
        self.letters = list(labels)
        self.letter_mats = list(mats)
        self.inverse_letter = list(range(len(mats)))
        for i, (lab, m) in enumerate(zip(labels, mats)):
            if self.involutive[i]:
                continue
            self.inverse_letter[i] = len(self.letters)
            self.inverse_letter.append(i)
            self.letters.append(lab + "^-1")
            self.letter_mats.append(space.adjoint_inverse(m))

    @property
    def dim(self):
        return self.space.dim

    def __len__(self):
        return len(self.generators)

    def __repr__(self):
        return f"GroupRep({self.labels}, signature={self.space.signature})"

    def inverse(self, i):
        return self.letter_mats[self.inverse_letter[i]]

    def word_matrix(self, word):
        """Product of letter matrices for a sequence of letter indices."""
        m = np.eye(self.dim)
        for k in word:
            m = m @ self.letter_mats[k]
        return m

    def word_label(self, word):
        return " ".join(self.letters[k] for k in word) if word else "e"

    def conjugated(self, c):
        """Conjugate generators by ``c``: each g becomes c^-1 g c."""
        cinv = np.linalg.inv(c)
        return [(lab, cinv @ g @ c) for lab, g in zip(self.labels, self.generators)]


@dataclass(frozen=True)
class WordElement:
    word: tuple
    label: str
    matrix: np.ndarray

    @property
    def length(self):
        return len(self.word)


class WordEnumeration:
    """Breadth-first iterator over reduced words.

    After iteration, ``truncated`` tells whether ``element_cap`` stopped it.
    With ``dedupe="matrix"`` elements whose matrices agree on a relative
    1e-9 grid are yielded once.
    """

    def __init__(self, rep, max_length, dedupe="matrix", element_cap=DEFAULT_ELEMENT_CAP):
        if max_length < 1:
            raise PreconditionError("max_length must be at least 1")
        if dedupe not in ("matrix", "none"):
            raise PreconditionError("dedupe must be 'matrix' or 'none'")
        self.rep = rep
        self.max_length = int(max_length)
        self.dedupe = dedupe
        self.element_cap = int(element_cap)
        self.truncated = False
        self.count = 0

    def __iter__(self):
        rep = self.rep
        self.truncated = False
        self.count = 0
        seen = set()
        if self.dedupe == "matrix":
            seen.add(_matrix_key(np.eye(rep.dim)))
        frontier = [((), np.eye(rep.dim))]
        for _ in range(self.max_length):
            nxt = []
            for word, mat in frontier:
                forbidden = rep.inverse_letter[word[-1]] if word else None
                for k, gk in enumerate(rep.letter_mats):
                    if k == forbidden:
                        continue
                    m = mat @ gk
                    if self.dedupe == "matrix":
                        key = _matrix_key(m)
                        if key in seen:
                            continue
                        seen.add(key)
                    if self.count >= self.element_cap:
                        self.truncated = True
                        return
                    w = word + (k,)
                    self.count += 1
                    yield WordElement(w, rep.word_label(w), m)
                    nxt.append((w, m))
            frontier = nxt
            if not frontier:
                return


def _matrix_key(m):
    scale = np.max(np.abs(m))
    return np.round(m / scale * _QUANT).astype(np.int64).tobytes()


def enumerate_words(rep, max_length, dedupe="matrix", element_cap=DEFAULT_ELEMENT_CAP):
    return WordEnumeration(rep, max_length, dedupe, element_cap)


@dataclass(frozen=True)
class ProximalData:
    """Spectral data of a proximal matrix.

    Attributes
    ----------
    top_eigenvalue : float
        The real eigenvalue of largest modulus.
    top_eigenvalue_modulus : float
    gap_ratio : float
        Ratio of the two largest eigenvalue moduli.
    attracting_lift : ndarray
        Unit eigenvector for the top eigenvalue, first nonzero entry positive.
    repelling_hyperplane_normal : ndarray
        Unit covector annihilating the sum of the other eigenspaces.
    opposite_pairing : float or None
        Pairing of the attracting points of g and g^-1, when computed.
    """

    top_eigenvalue: float
    top_eigenvalue_modulus: float
    gap_ratio: float
    attracting_lift: np.ndarray
    repelling_hyperplane_normal: np.ndarray
    opposite_pairing: float = None

    def attracting_point(self, space):
        return ProjectivePoint.from_vector(space, self.attracting_lift)


def _orient(v):
    v = v / np.linalg.norm(v)
    nz = np.nonzero(np.abs(v) > 1e-12)[0]
    if len(nz) and v[nz[0]] < 0:
        v = -v
    return v


def _real_vector(v):
    v = np.asarray(v)
    if np.iscomplexobj(v):
        k = np.argmax(np.abs(v))
        v = (v * np.conj(v[k]) / abs(v[k])).real
    return v


def _top_spectrum(g):
    w, v = np.linalg.eig(g)
    order = np.argsort(-np.abs(w), kind="stable")
    return w[order], v[:, order]


def is_proximal(g, tol=None):
    """Test for a unique real eigenvalue of maximal modulus.

    Returns ``(True, ProximalData)`` or ``(False, None)``.
    """
    tol = DEFAULT_TOLERANCES if tol is None else tol
    g = np.asarray(g, dtype=float)
    if not np.all(np.isfinite(g)):
        raise PreconditionError("is_proximal needs a finite matrix")
    w, v = _top_spectrum(g)
    mods = np.abs(w)
    if mods[-1] == 0 and np.linalg.svd(g, compute_uv=False)[-1] == 0:
        raise PreconditionError("is_proximal needs an invertible matrix")
    if g.shape[0] == 1:
        return False, None
    if mods[1] == 0:
        gap = np.inf
    else:
        gap = mods[0] / mods[1]
    if not gap > 1 + tol.proximal or abs(w[0].imag) > 1e-12 * mods[0]:
        return False, None
    lam = float(w[0].real)
    x = _real_vector(v[:, 0])
    for _ in range(_POWER_STEPS):
        x = g @ x
        x /= np.linalg.norm(x)
    wl, vl = _top_spectrum(g.T)
    normal = _orient(_real_vector(vl[:, 0]))
    return True, ProximalData(lam, float(mods[0]), float(gap), _orient(x), normal)


def repelling_data(g, space=None, tol=None):
    """Spectral data of g^-1, whose attracting point is the repelling point of g.

    With ``space`` given, ``opposite_pairing`` holds the pairing of the unit
    attracting lifts of g and g^-1, which must be nonzero.
    """
    g = np.asarray(g, dtype=float)
    ok, data = is_proximal(g, tol)
    if not ok:
        raise NotProximalError("element is not proximal")
    ginv = space.adjoint_inverse(g) if space is not None else np.linalg.inv(g)
    ok, inv_data = is_proximal(ginv, tol)
    if not ok:
        raise NotProximalError("inverse is not proximal")
    if space is None:
        return inv_data
    pair = space.pairing(data.attracting_lift, inv_data.attracting_lift)
    if abs(pair) <= space.tol.sign:
        raise NotProximalError("attracting and repelling points are orthogonal")
    return ProximalData(inv_data.top_eigenvalue, inv_data.top_eigenvalue_modulus, inv_data.gap_ratio,
                        inv_data.attracting_lift, inv_data.repelling_hyperplane_normal, float(pair))


def cyclic_reduction(rep, word):
    """Split a word as ``u + core + inverse(u)`` with ``core`` cyclically reduced."""
    word = tuple(word)
    k = 0
    while len(word) - 2 * k >= 2 and rep.inverse_letter[word[k]] == word[len(word) - 1 - k]:
        k += 1
    return word[:k], word[k:len(word) - k]


def word_proximal_data(rep, word):
    """Proximality of a word, with its attracting point computed stably.

    The attracting point of ``u c u^-1`` is ``u`` applied to that of ``c``.
    Eigenvectors of the short-norm core are well conditioned, and applying
    the letters of ``u`` one at a time keeps rounding errors relative.
    """
    prefix, core = cyclic_reduction(rep, word)
    ok, data = is_proximal(rep.word_matrix(core), rep.space.tol)
    if not ok or not prefix:
        return ok, data
    x = data.attracting_lift
    for k in reversed(prefix):
        x = rep.letter_mats[k] @ x
        x = x / np.linalg.norm(x)
    y = data.repelling_hyperplane_normal
    for k in reversed(prefix):
        y = rep.letter_mats[rep.inverse_letter[k]].T @ y
        y = y / np.linalg.norm(y)
    return True, ProximalData(data.top_eigenvalue, data.top_eigenvalue_modulus, data.gap_ratio,
                              _orient(x), _orient(y))


@dataclass
class LimitSample:
    """Sampled attracting points of proximal group elements.

    Attributes
    ----------
    points : list of ProjectivePoint
    words : list of str
        Word label producing each point.
    stats : dict
        Counts, proximal fraction, gap statistics and truncation flags.
    """

    points: list
    words: list
    stats: dict = field(default_factory=dict)
    dim: int = 0

    @property
    def empty(self):
        return not self.points

    @property
    def lifts(self):
        return np.array([p.lift for p in self.points]).reshape(len(self.points), self.dim)


def sample_limit_set(rep, max_length, element_cap=DEFAULT_ELEMENT_CAP, point_cap=DEFAULT_POINT_CAP):
    """Attracting points of proximal elements up to a word length.

    Points closer than ``dedupe_radius`` are merged.  Candidates that fail
    the null test are counted and dropped.  When more than ``point_cap``
    distinct points are found, an evenly spaced subset of the breadth-first
    order is kept so that every word length stays represented.
    """
    space = rep.space
    tol = space.tol
    words = enumerate_words(rep, max_length, "matrix", element_cap)
    cand, labels, lengths, gaps = [], [], [], []
    n_elem = n_prox = 0
    for el in words:
        n_elem += 1
        ok, data = word_proximal_data(rep, el.word)
        if not ok:
            continue
        n_prox += 1
        gaps.append(np.log(data.gap_ratio))
        cand.append(data.attracting_lift)
        labels.append(el.label)
        lengths.append(el.length)
    stats = {
        "elements_enumerated": n_elem,
        "elements_truncated": words.truncated,
        "proximal_count": n_prox,
        "proximal_fraction": n_prox / n_elem if n_elem else 0.0,
        "non_proximal_fraction": 1 - n_prox / n_elem if n_elem else 1.0,
        "mean_log_gap": float(np.mean(gaps)) if gaps else None,
    }
    if not cand:
        stats.update(candidates=0, distinct_points=0, rejected_non_null=0, points_truncated=False,
                     points_by_length={}, max_null_residual=None)
        return LimitSample([], [], stats, rep.dim)
    X = np.array(cand)
    keep = _dedupe_projective(X, tol.dedupe_radius)
    q = np.abs(space.self_pairing(X[keep]))
    null_ok = q <= tol.null
    rejected = int(np.sum(~null_ok))
    keep = keep[null_ok]
    distinct = len(keep)
    truncated = distinct > point_cap
    if truncated:
        keep = keep[np.unique(np.linspace(0, distinct - 1, point_cap).round().astype(int))]
    points = [ProjectivePoint.from_vector(space, X[i]) for i in keep]
    by_len = {}
    for i in keep:
        by_len[lengths[i]] = by_len.get(lengths[i], 0) + 1
    stats.update(
        candidates=len(cand),
        distinct_points=distinct,
        rejected_non_null=rejected,
        points_truncated=truncated,
        points_by_length={str(k): by_len[k] for k in sorted(by_len)},
        max_null_residual=float(max(abs(p.self_pairing) for p in points)) if points else None,
    )
    return LimitSample(points, [labels[i] for i in keep], stats, rep.dim)


def _dedupe_projective(X, radius):
    """Indices of the first representative of each projective cluster."""
    tree = cKDTree(np.vstack([X, -X]))
    n = len(X)
    taken = np.zeros(n, bool)
    keep = []
    for i in range(n):
        if taken[i]:
            continue
        keep.append(i)
        for j in tree.query_ball_point(X[i], radius):
            taken[j % n] = True
    return np.array(keep, dtype=int)


@dataclass(frozen=True)
class GapDiagnostic:
    """Minimum log gap per word length with a least-squares slope.

    This is a heuristic growth test, not a proof of any dynamical property.
    """

    lengths: tuple
    min_log_gap: tuple
    counts: tuple
    slope: float
    intercept: float
    mode: str
    heuristic: bool = True

    def rows(self):
        return [{"length": l, "min_log_gap": g, "words": c}
                for l, g, c in zip(self.lengths, self.min_log_gap, self.counts)]


def _log_gap(m, mode):
    if mode == "singular":
        s = np.linalg.svd(m, compute_uv=False)
        return float(np.log(s[0] / s[1]))
    mods = np.sort(np.abs(np.linalg.eigvals(m)))[::-1]
    return float(np.log(mods[0] / mods[1]))


def anosov_gap_diagnostic(rep, max_length, mode="singular", samples_per_length=None,
                          element_cap=DEFAULT_ELEMENT_CAP, rng=0):
    """Smallest logarithmic gap among words of each length.

    Parameters
    ----------
    mode : {"singular", "eigen"}
        ``"singular"`` uses the ratio of the two largest singular values,
        ``"eigen"`` the ratio of the two largest eigenvalue moduli.  Groups
        with torsion contain short-translation conjugates at every length, so
        the eigenvalue version stays flat for them; singular values track
        word growth.
    samples_per_length : int, optional
        Random subsample size per length; all words are used when omitted.
    """
    if mode not in ("singular", "eigen"):
        raise PreconditionError("mode must be 'singular' or 'eigen'")
    by_len = {}
    for el in enumerate_words(rep, max_length, "matrix", element_cap):
        by_len.setdefault(el.length, []).append(el.matrix)
    rng = np.random.default_rng(rng)
    lengths, mins, counts = [], [], []
    for ell in sorted(by_len):
        mats = by_len[ell]
        if samples_per_length is not None and len(mats) > samples_per_length:
            pick = np.sort(rng.choice(len(mats), samples_per_length, replace=False))
            mats = [mats[i] for i in pick]
        lengths.append(ell)
        mins.append(min(_log_gap(m, mode) for m in mats))
        counts.append(len(mats))
    if len(lengths) >= 2:
        slope, intercept = np.polyfit(lengths, mins, 1) + 0.0
    else:
        slope, intercept = float("nan"), float(mins[0]) if mins else float("nan")
    return GapDiagnostic(tuple(lengths), tuple(mins), tuple(counts), float(slope), float(intercept), mode)
