"""Right-angled Coxeter groups and their reflection representations.

A right-angled Coxeter group is given by a graph on its generators: each
pair either commutes (label 2) or generates an infinite dihedral group
(label infinity, carrying a parameter alpha >= 1).  The Gram matrix has ones
on the diagonal, 0 for commuting pairs and -alpha for infinite pairs, and
generator i acts by the reflection ``x -> x - 2 B(e_i, x) e_i``.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateFormError, HypothesisError, NumericalFailure, PreconditionError
from .pq_form import QuadraticSpace, signature
from .proximal_dynamics import GroupRep, is_proximal
from .tolerances import DEFAULT_TOLERANCES

INF = float("inf")
MAX_SQUARE_SCAN = 64
MAX_SUBSET_SCAN = 12


def _as_alpha(value):
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    return float(value)


@dataclass(frozen=True)
class CoxeterSpec:
    """Labelled commutation graph with parameters on the infinite edges.

    Attributes
    ----------
    names : tuple of str
    infinite : frozenset of (i, j) with i < j
        Pairs with label infinity; every other pair commutes.
    alpha : dict mapping (i, j) to Fraction or float
        Parameter of each infinite pair, all >= 1.
    """

    names: tuple
    infinite: frozenset
    alpha: dict

    def __post_init__(self):
        n = len(self.names)
        if n < 1:
            raise PreconditionError("a Coxeter graph needs at least one generator")
        if len(set(self.names)) != n:
            raise PreconditionError("generator names must be unique")
        for i, j in self.infinite:
            if not 0 <= i < j < n:
                raise PreconditionError(f"bad edge {(i, j)}")
        if set(self.alpha) != set(self.infinite):
            raise PreconditionError("alpha must be given exactly on the infinite edges")
        for e, a in self.alpha.items():
            if not a >= 1:
                raise PreconditionError(f"alpha on {e} must be >= 1, got {a}")

    @property
    def n(self):
        return len(self.names)

    def m(self, i, j):
        if i == j:
            return 1
        return INF if (min(i, j), max(i, j)) in self.infinite else 2

    def label_matrix(self):
        return [[self.m(i, j) for j in range(self.n)] for i in range(self.n)]

    def is_exact(self):
        return all(isinstance(a, Fraction) for a in self.alpha.values())

    @classmethod
    def from_edges(cls, names, infinite_edges, alpha=Fraction(2)):
        """Spec from a list of infinite edges; ``alpha`` is a scalar or a dict."""
        names = tuple(str(s) for s in names)
        edges = frozenset((min(i, j), max(i, j)) for i, j in infinite_edges)
        if isinstance(alpha, dict):
            al = {(min(i, j), max(i, j)): _as_alpha(a) for (i, j), a in alpha.items()}
        else:
            al = {e: _as_alpha(alpha) for e in edges}
        return cls(names, edges, al)

    @classmethod
    def from_labels(cls, m, alpha=Fraction(2), names=None):
        """Spec from a symmetric label matrix with entries 1, 2 or infinity.

        Labels other than 2 and infinity off the diagonal are rejected: only
        right-angled groups are supported.
        """
        n = len(m)
        names = tuple(names) if names is not None else tuple(f"s{i + 1}" for i in range(n))
        edges = []
        for i in range(n):
            if m[i][i] != 1:
                raise PreconditionError("diagonal labels must be 1")
            for j in range(i + 1, n):
                if m[i][j] != m[j][i]:
                    raise PreconditionError("label matrix must be symmetric")
                if m[i][j] == INF or m[i][j] == 0:
                    edges.append((i, j))
                elif m[i][j] != 2:
                    raise PreconditionError(f"label {m[i][j]} at {(i, j)} is not right-angled")
        return cls.from_edges(names, edges, alpha)


def pentagon(alpha=Fraction(21, 20)):
    """Five generators, consecutive ones commute, the others do not."""
    edges = [(i, (i + 2) % 5) for i in range(5)]
    return CoxeterSpec.from_edges([f"s{i + 1}" for i in range(5)], edges, alpha)


def square_graph(alpha=Fraction(2)):
    """Four generators in a commuting 4-cycle with both diagonals infinite."""
    return CoxeterSpec.from_edges(["s1", "s2", "s3", "s4"], [(0, 2), (1, 3)], alpha)


def complete_graph(n=4):
    """All generators commute: a finite group."""
    return CoxeterSpec.from_edges([f"s{i + 1}" for i in range(n)], [])


def build_gram_exact(spec):
    """Gram matrix as an object array of Fractions."""
    n = spec.n
    B = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            if i == j:
                B[i, j] = Fraction(1)
            elif spec.m(i, j) == 2:
                B[i, j] = Fraction(0)
            else:
                B[i, j] = -Fraction(spec.alpha[(min(i, j), max(i, j))])
    return B


def build_gram(spec):
    """Gram matrix in floating point."""
    n = spec.n
    B = np.eye(n)
    for (i, j), a in spec.alpha.items():
        B[i, j] = B[j, i] = -float(a)
    return B


def perturb_to_nondegenerate(spec, eps, seed=0, tol=None, attempts=20):
    """Raise each alpha by an independent amount in (0, eps] until B is nondegenerate.

    Raises
    ------
    PreconditionError
        If the Gram matrix is already nondegenerate.
    NumericalFailure
        If all attempts stay degenerate.
    """
    tol = DEFAULT_TOLERANCES if tol is None else tol
    if signature(build_gram(spec), tol.degenerate)[2] == 0:
        raise PreconditionError("Gram matrix is already nondegenerate")
    edges = sorted(spec.infinite)
    for k in range(attempts):
        rng = np.random.default_rng(seed + k)
        jitter = eps * (1.0 - rng.random(len(edges)))
        alpha = {e: float(spec.alpha[e]) + float(d) for e, d in zip(edges, jitter)}
        cand = CoxeterSpec(spec.names, spec.infinite, alpha)
        if signature(build_gram(cand), tol.degenerate)[2] == 0:
            return cand
    raise NumericalFailure(f"no nondegenerate perturbation found in {attempts} attempts")


def reflection_matrix(B, i):
    """Matrix of ``x -> x - 2 B(e_i, x) e_i``; works for float or Fraction arrays."""
    n = B.shape[0]
    if B.dtype == object:
        R = np.array([[Fraction(int(r == c)) for c in range(n)] for r in range(n)], dtype=object)
    else:
        R = np.eye(n)
    R[i, :] = R[i, :] - 2 * B[i, :]
    return R


@dataclass(frozen=True, eq=False)
class VinbergRep:
    """Reflection representation of a right-angled Coxeter group.

    ``basis_lifts`` are the vectors e_i, stored as rows.  Exact versions of
    the Gram matrix and reflections are Fraction arrays.
    """

    spec: CoxeterSpec
    gram: np.ndarray
    exact_gram: np.ndarray
    space: QuadraticSpace
    reflections: tuple
    exact_reflections: tuple
    basis_lifts: np.ndarray

    def group_rep(self):
        return GroupRep(self.space, list(zip(self.spec.names, self.reflections)),
                        involutive=[True] * self.spec.n)


def build_reflections(spec, tol=None):
    """Reflection representation; fails on a degenerate Gram matrix."""
    B = build_gram(spec)
    exact = build_gram_exact(spec)
    try:
        space = QuadraticSpace(B, tol=tol, exact_gram=exact)
    except DegenerateFormError as exc:
        raise DegenerateFormError(f"{exc}; perturb alpha with perturb_to_nondegenerate") from exc
    refl = tuple(reflection_matrix(B, i) for i in range(spec.n))
    exact_refl = tuple(reflection_matrix(exact, i) for i in range(spec.n))
    return VinbergRep(spec, B, exact, space, refl, exact_refl, np.eye(spec.n))


def check_no_empty_square(spec):
    """Search for generators i1, i2, i3, i4 forming a commuting square.

    The square has consecutive pairs commuting and both diagonals infinite.
    Returns ``(True, None)`` when none exists, otherwise ``(False, witness)``
    with the lexicographically first ordered witness (0-based indices).
    """
    n = spec.n
    if n > MAX_SQUARE_SCAN:
        raise PreconditionError(f"square scan supports at most {MAX_SQUARE_SCAN} generators")
    inf = [[spec.m(i, j) == INF for j in range(n)] for i in range(n)]
    com = [[spec.m(i, j) == 2 for j in range(n)] for i in range(n)]
    for a in range(n):
        for b in range(n):
            if not com[a][b]:
                continue
            for c in range(n):
                if not (inf[a][c] and com[b][c]):
                    continue
                for d in range(n):
                    if com[c][d] and com[d][a] and inf[b][d]:
                        return False, (a, b, c, d)
    return True, None


def commuting_infinite_subsets(spec):
    """Brute-force search for disjoint S1, S2 generating infinite commuting subgroups.

    Both subsets must contain an infinite edge and every generator of S1 must
    commute with every generator of S2.  Returns ``(found, (S1, S2))`` with
    subsets as sorted index tuples.
    """
    n = spec.n
    if n > MAX_SUBSET_SCAN:
        raise PreconditionError(f"subset search supports at most {MAX_SUBSET_SCAN} generators")
    com = [0] * n
    for i in range(n):
        for j in range(n):
            if i != j and spec.m(i, j) == 2:
                com[i] |= 1 << j
    has_inf = [False] * (1 << n)
    for i, j in spec.infinite:
        pair = (1 << i) | (1 << j)
        for mask in range(1 << n):
            if mask & pair == pair:
                has_inf[mask] = True
    common = [(1 << n) - 1] * (1 << n)
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        common[mask] = common[mask & (mask - 1)] & com[low]
    for s1 in range(1, 1 << n):
        if not has_inf[s1]:
            continue
        avail = common[s1] & ~s1
        sub = avail
        while sub:
            if has_inf[sub]:
                bits = lambda m: tuple(k for k in range(n) if m >> k & 1)
                return True, (bits(s1), bits(sub))
            sub = (sub - 1) & avail
    return False, None


def _irreducible(spec):
    n = spec.n
    adj = {i: set() for i in range(n)}
    for i, j in spec.infinite:
        adj[i].add(j)
        adj[j].add(i)
    seen, stack = {0}, [0]
    while stack:
        for k in adj[stack.pop()]:
            if k not in seen:
                seen.add(k)
                stack.append(k)
    return len(seen) == n


@dataclass(frozen=True)
class HypothesisReport:
    """Conditions under which the reflection group acts convex cocompactly.

    infinite : some pair has label infinity
    irreducible : the graph of infinite edges is connected
    condition1 : no disjoint commuting pair of infinite special subgroups
    condition2 : every alpha is strictly greater than 1
    """

    infinite: bool
    irreducible: bool
    condition1: bool
    condition2: bool
    square_witness: tuple = None
    crosschecked: bool = False

    def failed(self):
        return [k for k in ("infinite", "irreducible", "condition1", "condition2") if not getattr(self, k)]

    def as_dict(self):
        return {"infinite": self.infinite, "irreducible": self.irreducible,
                "condition1": self.condition1, "condition2": self.condition2}


def check_hypotheses(spec):
    """Evaluate the four hypotheses; condition1 uses the empty-square test.

    For at most 12 generators condition1 is also checked against the direct
    subset search, and a disagreement raises.
    """
    infinite = bool(spec.infinite)
    ok, witness = check_no_empty_square(spec)
    crosschecked = False
    if spec.n <= MAX_SUBSET_SCAN:
        found, _ = commuting_infinite_subsets(spec)
        if found == ok:
            raise NumericalFailure("empty-square test disagrees with the subset search")
        crosschecked = True
    cond2 = all(a > 1 for a in spec.alpha.values())
    return HypothesisReport(infinite, _irreducible(spec), ok, cond2, witness, crosschecked)


def fundamental_cone_membership(rep, v, tol=None):
    """Whether ``B(v, e_i) <= tol`` for every i (closed fundamental cone)."""
    tol = rep.space.tol.membership if tol is None else tol
    v = np.asarray(v, dtype=float)
    scale = rep.space.norm * max(np.linalg.norm(v), 1e-300)
    return bool(np.all(rep.gram @ v <= tol * scale))


def sigma_membership(rep, v, tol=None):
    """Whether v lies in the fundamental cone and has nonnegative basis coefficients."""
    tol = rep.space.tol.membership if tol is None else tol
    v = np.asarray(v, dtype=float)
    t = np.linalg.solve(rep.basis_lifts.T, v)
    scale = max(np.linalg.norm(v), 1e-300)
    return bool(np.all(t >= -tol * scale)) and fundamental_cone_membership(rep, v, tol)


def sample_sigma(rep, count, rng=None, max_attempts=1_000_000, batch=4096):
    """Rejection-sample nonzero members of the cone above.

    Coefficient vectors are drawn uniformly from the simplex and kept when
    the resulting vector pairs nonpositively with every basis vector.
    """
    rng = np.random.default_rng(rng)
    n = rep.spec.n
    out = []
    attempts = 0
    while len(out) < count:
        if attempts >= max_attempts:
            raise NumericalFailure(f"found {len(out)} of {count} samples in {attempts} attempts")
        size = min(batch, max_attempts - attempts)
        T = rng.dirichlet(np.ones(n), size=size)
        attempts += size
        V = T @ rep.basis_lifts
        good = np.all(V @ rep.gram <= 0, axis=1)
        out.extend(V[good][: count - len(out)])
    return np.array(out), attempts


def infinite_edge_products(rep):
    """Proximality of s_i s_j over all infinite edges."""
    result = {}
    for i, j in sorted(rep.spec.infinite):
        m = rep.reflections[i] @ rep.reflections[j]
        ok, data = is_proximal(m, rep.space.tol)
        result[(i, j)] = (ok, data.gap_ratio if ok else None)
    return result


def coxeter_pipeline(spec, depth=10, **options):
    """Check hypotheses, build the representation and certify its limit set.

    Raises
    ------
    HypothesisError
        Naming every failed hypothesis.
    """
    from .report import certify_group

    hyp = check_hypotheses(spec)
    failed = hyp.failed()
    if failed:
        raise HypothesisError(failed, hyp)
    tol = options.pop("tol", None)
    sigma_samples = options.pop("sigma_samples", 500)
    seed = options.get("seed", 0)
    rep = build_reflections(spec, tol=tol)
    extras = {"hypotheses": hyp, "vinberg": rep}
    if sigma_samples:
        V, attempts = sample_sigma(rep, sigma_samples, rng=seed)
        extras["sigma"] = {
            "samples": len(V),
            "attempts": attempts,
            "max_self_pairing": float(np.max(rep.space.self_pairing(V))),
        }
    extras["edge_products"] = infinite_edge_products(rep)
    return certify_group(rep.group_rep(), depth, extras=extras, **options)
