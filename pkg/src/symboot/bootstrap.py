"""Rank-by-rank combinatorial search for the hidden group's representation data.

Given the discrete constraints extracted from the plateau matrix and the known
subgroup's fusion ring, the search at each trial rank r

1. deduces allowable branching-vector types (equivalence classes -> quotient
   graph -> cliques -> multiplicity assignments),
2. assembles candidate branching matrices from r-1 types plus the fixed
   trivial column, filtered by the plateau constraints,
3. enumerates, per unresolved irrep pair, all integer decompositions of the
   fusion target vector,
4. backtracks over the pair assignments with incremental dual-partner and
   associativity pruning,
5. classifies surviving rings as Linear (group character table with integer
   class sizes) or Corep (magnetic group; unitary-subgroup order bookkeeping),

iterating r upward until each enabled branch has found its minimal rank.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .groupalg import (
    BranchingMatrix,
    CharacterTable,
    DegenerateSpectrum,
    GroupAlgebraError,
    RepTheory,
    characters_from_fusion,
    irrep_dims_from_branching,
    monoidality_residual,
    validate_fusion_ring,
)
from .spectral import NumericalConstraints


class NoSolution(RuntimeError):
    pass


@dataclass(frozen=True)
class BootstrapOptions:
    r_min: int = 1
    r_max: int = 16
    b_max: int = 3
    branch: str = "linear"  # linear | corep | both
    unitary_subgroup_order: Optional[int] = None

    def __post_init__(self):
        if self.branch not in ("linear", "corep", "both"):
            raise ValueError(f"unknown branch mode {self.branch!r}")
        if self.r_min < 1 or self.r_max < self.r_min:
            raise ValueError("need 1 <= r_min <= r_max")

    @property
    def linear_enabled(self) -> bool:
        return self.branch in ("linear", "both")

    @property
    def corep_enabled(self) -> bool:
        return self.branch in ("corep", "both") and self.unitary_subgroup_order is not None


@dataclass
class QuotientGraph:
    """Equivalence classes as vertices, inter-class positivity as edges."""

    n_vertices: int
    edges: frozenset

    def neighbors(self, v: int) -> set:
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out


@dataclass
class BootstrapSolution:
    rank: int
    branching: BranchingMatrix
    ring: Optional[RepTheory]
    table: Optional[CharacterTable]
    branch: str  # Linear | Corep | ProjectiveSuspected
    group_order: Optional[int] = None
    corep_subset: Optional[tuple] = None
    diagnostics: dict = field(default_factory=dict)

    def sort_key(self):
        fus = self.ring.fusion.reshape(-1).tolist() if self.ring is not None else []
        return (self.branching.b.reshape(-1).tolist(), fus)


@dataclass
class ProjectiveReport:
    rank: Optional[int]
    column_types: list
    candidates: list  # branching matrices whose fusion targets all decompose
    solutions: list  # complete-but-unclassifiable rings, as BootstrapSolution


@dataclass
class BootstrapResult:
    linear_rank: Optional[int] = None
    linear: list = field(default_factory=list)
    corep_rank: Optional[int] = None
    corep: list = field(default_factory=list)
    projective: Optional[ProjectiveReport] = None
    ranks_searched: tuple = ()

    def all_solutions(self) -> list:
        out = list(self.linear) + list(self.corep)
        if self.projective is not None:
            out += list(self.projective.solutions)
        return out


# ---------------------------------------------------------------------------
# steps 1-2: branching vector types and candidate matrices
# ---------------------------------------------------------------------------


def equivalence_classes(constraints: NumericalConstraints) -> list:
    """The validated partition, trivial sector's class first."""
    classes = [tuple(sorted(c)) for c in constraints.classes]
    seen = sorted(m for c in classes for m in c)
    if seen != list(range(constraints.n_sectors)):
        raise ValueError("classes do not partition the sector indices")
    classes.sort(key=lambda c: (0 not in c, min(c)))
    return classes


def quotient_graph(classes: Sequence[tuple], edges) -> QuotientGraph:
    cls_of = {}
    for ci, members in enumerate(classes):
        for m in members:
            cls_of[m] = ci
    qedges = set()
    for a, b in edges:
        ca, cb = cls_of[a], cls_of[b]
        if ca != cb:
            qedges.add((min(ca, cb), max(ca, cb)))
    return QuotientGraph(n_vertices=len(classes), edges=frozenset(qedges))


def all_cliques(graph: QuotientGraph, max_size: Optional[int] = None) -> list:
    """Every non-empty clique up to max_size via Bron-Kerbosch plus subset expansion."""
    if max_size is None:
        max_size = graph.n_vertices
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    neigh = {v: graph.neighbors(v) for v in range(graph.n_vertices)}
    maximal = []

    def bk(R: set, P: set, X: set):
        if not P and not X:
            maximal.append(frozenset(R))
            return
        for v in sorted(P):
            bk(R | {v}, P & neigh[v], X & neigh[v])
            P = P - {v}
            X = X | {v}

    bk(set(), set(range(graph.n_vertices)), set())
    out = set()
    for clique in maximal:
        members = sorted(clique)
        for size in range(1, min(len(members), max_size) + 1):
            for sub in itertools.combinations(members, size):
                out.add(sub)
    return sorted(out, key=lambda c: (len(c), c))


def class_b_max(constraints: NumericalConstraints, options: BootstrapOptions) -> list:
    """Per-class multiplicity cap: 1 for multiplicity-free classes, otherwise the
    configured cutoff, tightened to ceil(K/R) + 1 for flagged classes."""
    out = []
    for mult_free, higher, ratio in zip(
        constraints.class_mult_free, constraints.class_higher, constraints.class_ratio
    ):
        if mult_free:
            out.append(1)
        elif higher and np.isfinite(ratio):
            out.append(max(1, min(options.b_max, int(np.ceil(ratio)) + 1)))
        else:
            out.append(options.b_max)
    return out


def column_types(
    cliques: Sequence[tuple],
    classes: Sequence[tuple],
    b_max_per_class: Sequence[int],
    n_sectors: int,
) -> list:
    """All allowable branching vectors: per clique, every multiplicity assignment."""
    types = set()
    for clique in cliques:
        ranges = [range(1, b_max_per_class[ci] + 1) for ci in clique]
        for values in itertools.product(*ranges):
            vec = [0] * n_sectors
            for ci, v in zip(clique, values):
                for m in classes[ci]:
                    vec[m] = v
            types.add(tuple(vec))
    return sorted(types, reverse=True)


def assemble_candidates(
    types: Sequence[tuple], r: int, constraints: NumericalConstraints
) -> list:
    """Candidate branching matrices: trivial column plus r-1 types, filtered.

    Filters: every sector row non-zero; rows within an equivalence class
    identical; every positive cross plateau realized by a shared column;
    every higher-multiplicity class realized by an entry >= 2.
    """
    if r < 1:
        raise ValueError("rank must be >= 1")
    S = constraints.n_sectors
    trivial = tuple([1] + [0] * (S - 1))
    cls = constraints.class_of()
    inter_edges = [(a, b) for a, b in constraints.edges if cls[a] != cls[b]]
    higher_classes = [
        members
        for members, flag in zip(constraints.classes, constraints.class_higher)
        if flag
    ]
    out = []
    for combo in itertools.combinations_with_replacement(sorted(types, reverse=True), r - 1):
        cols = [trivial] + list(combo)
        b = np.array(cols, dtype=int).T
        if (b.sum(axis=1) == 0).any():
            continue
        ok = True
        for members in constraints.classes:
            first = b[members[0]]
            if any(not np.array_equal(b[m], first) for m in members[1:]):
                ok = False
                break
        if not ok:
            continue
        if any(not ((b[a] > 0) & (b[e] > 0)).any() for a, e in inter_edges):
            continue
        if any(not (b[list(members)] >= 2).any() for members in higher_classes):
            continue
        out.append(BranchingMatrix(b=b, row_labels=constraints.labels))
    return out


# ---------------------------------------------------------------------------
# steps 3-4: fusion targets, decompositions, backtracking
# ---------------------------------------------------------------------------


def fusion_target(B: BranchingMatrix, n_ring: RepTheory, i: int, j: int) -> np.ndarray:
    """Subgroup content of the unresolved product of candidate irreps i and j."""
    b = B.b
    return np.einsum("abl,a,b->l", n_ring.fusion, b[:, i], b[:, j])


def enumerate_decompositions(t: np.ndarray, B: BranchingMatrix) -> list:
    """All non-negative integer vectors n with sum_k n_k b[:, k] = t.

    Depth-first over columns in index order; each coefficient is bounded by
    min over the column's support of floor(residual / entry).
    """
    t = np.asarray(t, dtype=int)
    if (t < 0).any():
        raise ValueError("fusion target must be non-negative")
    b = B.b
    r = b.shape[1]
    supports = [np.nonzero(b[:, k])[0] for k in range(r)]
    out = []
    coeffs = np.zeros(r, dtype=int)

    def rec(k: int, resid: np.ndarray):
        if k == r:
            if not resid.any():
                out.append(tuple(coeffs))
            return
        sup = supports[k]
        if len(sup) == 0:
            coeffs[k] = 0
            rec(k + 1, resid)
            return
        bound = int(np.min(resid[sup] // b[sup, k]))
        for n in range(bound + 1):
            coeffs[k] = n
            rec(k + 1, resid - n * b[:, k])
        coeffs[k] = 0

    rec(0, t.copy())
    return out


def _pair_order(r: int) -> list:
    """Prefix-growing order: all pairs within {1..m} before any pair touching
    m+1, self-pairs first within each level.  Self-pairs still pin duals early
    while associativity triples inside the prefix become checkable as soon as
    possible, which is what prunes candidates with many duplicate columns."""
    pairs = []
    for m in range(1, r):
        pairs.append((m, m))
        pairs += [(i, m) for i in range(1, m)]
    return pairs


class _Backtracker:
    """Depth-first pair assignment with incremental dual and associativity pruning.

    Values live in plain python tuples keyed by unordered pair; after each
    assignment only triples whose last missing requirement involves the new
    pair are examined, so the per-node cost stays small at rank <= 16.
    """

    def __init__(self, r: int, pair_options: Dict[tuple, list], require_duals: bool = True):
        self.r = r
        self.pairs = _pair_order(r)
        self.options = {
            p: [tuple(int(x) for x in v) for v in pair_options[p]] for p in self.pairs
        }
        self.val: Dict[tuple, tuple] = {}
        for j in range(r):
            self.val[(0, j)] = tuple(1 if k == j else 0 for k in range(r))
        self.partner = {0: 0}
        self.verified: set = set()
        self.results: list = []
        self.require_duals = require_duals
        # pairs that could still hand irrep i its dual partner (non-zero
        # trivial-sector coefficient in at least one option)
        self.dual_chances = [0] * r
        for (i, j), opts in self.options.items():
            if any(v[0] > 0 for v in opts):
                self.dual_chances[i] += 1
                if j != i:
                    self.dual_chances[j] += 1

    def _get(self, a: int, b: int):
        return self.val.get((a, b) if a <= b else (b, a))

    def _checkable(self, a: int, b: int, c: int) -> bool:
        vab = self._get(a, b)
        vbc = self._get(b, c)
        if vab is None or vbc is None:
            return False
        get = self._get
        for k, m in enumerate(vab):
            if m and get(k, c) is None:
                return False
        for k, m in enumerate(vbc):
            if m and get(a, k) is None:
                return False
        return True

    def _check(self, a: int, b: int, c: int) -> bool:
        r = self.r
        get = self._get
        lhs = [0] * r
        for k, m in enumerate(get(a, b)):
            if m:
                vkc = get(k, c)
                for x in range(r):
                    lhs[x] += m * vkc[x]
        rhs = [0] * r
        for k, m in enumerate(get(b, c)):
            if m:
                vak = get(a, k)
                for x in range(r):
                    rhs[x] += m * vak[x]
        return lhs == rhs

    def _triples_touching(self, i: int, j: int) -> set:
        """Triples whose requirement set may have been completed by pair (i, j).

        Requirements of triple (a, b, c): pairs (a, b) and (b, c), plus
        (k, c) for k in supp N[a,b] and (a, k) for k in supp N[b,c]."""
        r = self.r
        cand = set()
        for c in range(1, r):
            cand.add((i, j, c))
            cand.add((j, i, c))
            cand.add((c, i, j))
            cand.add((c, j, i))
        for (a, b), v in self.val.items():
            if a == 0:
                continue
            if v[i]:
                cand.add((a, b, j))
                cand.add((b, a, j))
                cand.add((j, a, b))
                cand.add((j, b, a))
            if v[j]:
                cand.add((a, b, i))
                cand.add((b, a, i))
                cand.add((i, a, b))
                cand.add((i, b, a))
        return {t for t in cand if t[0] >= 1 and t[1] >= 1 and t[2] >= 1}

    def run(self) -> list:
        if self.require_duals and any(
            self.dual_chances[i] == 0 for i in range(1, self.r)
        ):
            return []
        self._descend(0)
        return self.results

    def _finish(self):
        r = self.r
        N = np.zeros((r, r, r), dtype=int)
        for (a, b), v in self.val.items():
            N[a, b] = v
            N[b, a] = v
        self.results.append(N)

    def _descend(self, depth: int):
        if depth == len(self.pairs):
            self._finish()
            return
        i, j = self.pairs[depth]
        key = (i, j)
        pair_has_dual_option = any(v[0] > 0 for v in self.options[key])
        for option in self.options[key]:
            added_partner = []
            if option[0] > 0:
                pi, pj = self.partner.get(i), self.partner.get(j)
                if (pi is not None and pi != j) or (pj is not None and pj != i):
                    continue
                if pi is None:
                    self.partner[i] = j
                    added_partner.append(i)
                if self.partner.get(j) is None:
                    self.partner[j] = i
                    added_partner.append(j)
            burned = []
            if self.require_duals and pair_has_dual_option and option[0] == 0:
                dead = False
                for x in {i, j}:
                    self.dual_chances[x] -= 1
                    burned.append(x)
                    if self.partner.get(x) is None and self.dual_chances[x] == 0:
                        dead = True
                if dead:
                    for x in burned:
                        self.dual_chances[x] += 1
                    for k in added_partner:
                        del self.partner[k]
                    continue
            self.val[key] = option
            fresh = []
            ok = True
            for t in self._triples_touching(i, j):
                if t in self.verified or not self._checkable(*t):
                    continue
                if not self._check(*t):
                    ok = False
                    break
                fresh.append(t)
                self.verified.add(t)
            if ok:
                self._descend(depth + 1)
            for t in fresh:
                self.verified.discard(t)
            del self.val[key]
            for x in burned:
                self.dual_chances[x] += 1
            for k in added_partner:
                del self.partner[k]


def backtrack_fusion(B: BranchingMatrix, pair_decompositions: Dict[tuple, list]) -> list:
    """All complete fusion tensors consistent with the given per-pair decompositions.

    Prunes on conflicting dual partners (a second pair claiming the trivial
    sector for an already-paired irrep) and on every associativity triple as
    soon as it is fully determined.  Returned tensors are symmetrized, verified
    once more in full, and sorted canonically.
    """
    r = B.rank
    if r == 1:
        return [np.ones((1, 1, 1), dtype=int)]
    bt = _Backtracker(r, pair_decompositions)
    results = []
    for N in bt.run():
        lhs = np.einsum("ijk,klm->ijlm", N, N)
        rhs = np.einsum("jlk,ikm->ijlm", N, N)
        if np.array_equal(lhs, rhs):
            results.append(N)
    results.sort(key=lambda n: n.reshape(-1).tolist())
    return results


# ---------------------------------------------------------------------------
# step 5-6: classification
# ---------------------------------------------------------------------------


def _linear_arithmetic_ok(dims: np.ndarray, n_order: Optional[int]) -> bool:
    """Necessary conditions for an ordinary group: every irrep dimension divides
    |G| = sum d^2, and the known subgroup's order divides |G| (Lagrange)."""
    order = int(np.sum(dims**2))
    if any(order % int(d) for d in dims):
        return False
    if n_order is not None and order % int(n_order):
        return False
    return True


def _corep_arithmetic_ok(dims: np.ndarray, n_order: Optional[int]) -> bool:
    """Whether some non-empty subset of even-dimensional non-trivial sectors
    satisfies the unitary-subgroup order formula."""
    if n_order is None:
        return False
    total = int(np.sum(dims**2))
    even_sq = [int(d) ** 2 for i, d in enumerate(dims) if i > 0 and d % 2 == 0]
    reachable = {0}
    for sq in even_sq:
        reachable |= {x + sq for x in reachable}
    return any(x > 0 and 2 * total - x == 2 * n_order for x in reachable)


def _is_prime_power(n: int) -> bool:
    if n < 2:
        return False
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            return n == 1
        p += 1
    return True


def _invertible_block_cyclic(dims: np.ndarray, N: np.ndarray) -> bool:
    """Whether the one-dimensional sectors form a cyclic group under fusion."""
    ones = [i for i in range(len(dims)) if dims[i] == 1]
    prod = {}
    for i in ones:
        for j in ones:
            ks = np.nonzero(N[i, j])[0]
            if len(ks) != 1 or N[i, j, ks[0]] != 1 or dims[ks[0]] != 1:
                return False
            prod[(i, j)] = int(ks[0])
    n = len(ones)
    if n == 1:
        return True
    for g in ones:
        order, x = 1, g
        while x != 0:
            x = prod[(x, g)]
            order += 1
            if order > n + 1:
                return False
        if order == n:
            return True
    return False


def _abelianization_obstruction(dims: np.ndarray, N: np.ndarray) -> bool:
    """Burnside-basis obstruction: a group of prime-power order with cyclic
    abelianization is cyclic, hence has no higher-dimensional irreps.  True
    when the candidate violates this (so it cannot be a group table)."""
    order = int(np.sum(dims**2))
    n_ones = int(np.sum(dims == 1))
    if n_ones == len(dims):
        return False
    if not _is_prime_power(order):
        return False
    return _invertible_block_cyclic(dims, N)


def _odd_exterior_square_obstruction(table: CharacterTable, dims: np.ndarray) -> bool:
    """Exterior-square consistency for odd-dimensional irreps.

    In a genuine group there is a squaring map on classes (constrained to the
    class-algebra support of c*c and fixed on linear characters by
    lam(g^2) = lam(g)^2) under which Lambda^2 chi = (chi^2 - chi(g^2))/2 and
    the symmetric square both decompose with non-negative integer
    multiplicities.  True when NO admissible squaring map achieves this for
    the odd-dimensional irreps, i.e. the table cannot belong to a group.
    Even-dimensional sectors are left alone: they are exactly where Wigner
    pairing can double dimensions, and the corep branch owns that case.
    """
    if not any(d > 1 and d % 2 == 1 for d in dims):
        return False
    chi = table.entries
    sizes = table.class_sizes.astype(float)
    order = float(sizes.sum())
    d = dims.astype(float)
    nc = chi.shape[1]
    lin = [a for a in range(len(d)) if dims[a] == 1]
    odd = [a for a in range(len(d)) if dims[a] > 1 and dims[a] % 2 == 1]

    supp = []
    for c in range(nc):
        ok = []
        for k in range(nc):
            a = sizes[c] ** 2 / order * np.sum(chi[:, c] ** 2 * np.conj(chi[:, k]) / d)
            if a.real > 1e-8:
                ok.append(k)
        supp.append(ok)
    cands = []
    for c in range(nc):
        if c == 0:
            cands.append([0])
            continue
        cc = [
            k
            for k in supp[c]
            if all(abs(chi[a, k] - chi[a, c] ** 2) < 1e-8 for a in lin)
        ]
        if not cc:
            return True
        cands.append(cc)

    def is_character(x):
        m = (sizes * x) @ np.conj(chi).T / order
        if np.max(np.abs(m.imag)) > 1e-8:
            return False
        return bool(np.all(m.real > -1e-8) and np.max(np.abs(m.real - np.round(m.real))) < 1e-8)

    for p2 in itertools.product(*cands):
        if all(
            is_character((chi[a, :] ** 2 - chi[a, list(p2)]) / 2)
            and is_character((chi[a, :] ** 2 + chi[a, list(p2)]) / 2)
            for a in odd
        ):
            return False
    return True


def _dual_structure(N: np.ndarray) -> Optional[list]:
    """Unique-dual involution from the trivial-sector pattern, or None."""
    r = N.shape[0]
    dual = []
    for i in range(r):
        partners = np.nonzero(N[i, :, 0])[0]
        if len(partners) != 1:
            return None
        dual.append(int(partners[0]))
    if any(dual[dual[i]] != i for i in range(r)) or dual[0] != 0:
        return None
    return dual


def classify_solution(
    B: BranchingMatrix,
    ring: RepTheory,
    constraints: NumericalConstraints,
    options: BootstrapOptions,
) -> Optional[BootstrapSolution]:
    """Classify a complete fusion assignment as Linear or Corep, else None.

    Rigidity gate: unique dual partners forming an involution, conjugation
    symmetry of the tensor, and branching rigidity against the subgroup's
    dual map.  Linear then requires unit trivial-sector coefficients and an
    integer class decomposition with sum |c| = sum d^2.  The corep branch
    searches subsets S of even-dimensional non-trivial sectors satisfying
    the unitary-subgroup order formula |N| = sum d^2 - (1/2) sum_S d^2.
    """
    N = ring.fusion
    r = ring.rank
    dims = ring.dims
    dual = _dual_structure(N)
    if dual is None:
        return None
    perm = np.array(dual)
    if not np.array_equal(N, N[np.ix_(perm, perm, perm)].transpose(1, 0, 2)):
        return None
    if constraints.n_dual is not None:
        nd = constraints.n_dual
        b = B.b
        for lam in range(b.shape[0]):
            if not all(b[nd(lam), a] == b[lam, dual[a]] for a in range(r)):
                return None
    diagnostics = {
        "strict_rigidity": bool(all(N[i, dual[i], 0] == 1 for i in range(r))),
        "dual": list(dual),
    }
    if constraints.n_ring is not None:
        diagnostics["monoidality_residual"] = monoidality_residual(
            B, constraints.n_ring, ring
        )

    if options.linear_enabled and diagnostics["strict_rigidity"]:
        n_order = constraints.n_ring.group_order if constraints.n_ring is not None else None
        if not _linear_arithmetic_ok(dims, n_order):
            diagnostics["linear_failure"] = (
                "not a group: irrep dimension or subgroup order fails to divide sum d^2"
            )
        elif _abelianization_obstruction(dims, N):
            diagnostics["linear_failure"] = (
                "not a group: prime-power order with cyclic abelianization"
            )
        else:
            try:
                table = characters_from_fusion(RepTheory(dims=dims, fusion=N))
                order = int(np.sum(dims**2))
                diagnostics["class_sizes_ok"] = True
                return BootstrapSolution(
                    rank=r,
                    branching=B,
                    ring=RepTheory(
                        dims=dims,
                        fusion=N,
                        characters=table.entries,
                        class_sizes=table.class_sizes,
                        group_order=order,
                    ),
                    table=table,
                    branch="Linear",
                    group_order=order,
                    diagnostics=diagnostics,
                )
            except GroupAlgebraError as err:
                diagnostics["linear_failure"] = str(err)

    if options.corep_enabled:
        n_order = options.unitary_subgroup_order
        total = int(np.sum(dims**2))
        even = [i for i in range(1, r) if dims[i] % 2 == 0]
        for size in range(1, len(even) + 1):
            for S in itertools.combinations(even, size):
                half = sum(int(dims[i]) ** 2 for i in S)
                if half % 2 or total - half // 2 != n_order:
                    continue
                mu = np.ones(r, dtype=int)
                mu[list(S)] = 2
                try:
                    table = characters_from_fusion(
                        RepTheory(dims=dims, fusion=N, weight_divisors=mu)
                    )
                except GroupAlgebraError:
                    continue
                diagnostics["unitary_subgroup_order"] = n_order
                return BootstrapSolution(
                    rank=r,
                    branching=B,
                    ring=RepTheory(
                        dims=dims,
                        fusion=N,
                        characters=table.entries,
                        class_sizes=table.class_sizes,
                        group_order=2 * n_order,
                        weight_divisors=mu,
                    ),
                    table=table,
                    branch="Corep",
                    group_order=2 * n_order,
                    corep_subset=tuple(S),
                    diagnostics=diagnostics,
                )
    return None


def _stabilizer_perms(b: np.ndarray) -> list:
    """Column permutations fixing the trivial column that leave B unchanged."""
    r = b.shape[1]
    groups: Dict[tuple, list] = {}
    for i in range(1, r):
        groups.setdefault(tuple(b[:, i]), []).append(i)
    keys = sorted(groups)
    perms = []
    for combo in itertools.product(
        *[itertools.permutations(groups[k]) for k in keys]
    ):
        pi = list(range(r))
        for key, perm in zip(keys, combo):
            for src, dst in zip(groups[key], perm):
                pi[src] = dst
        perms.append(pi)
    return perms


def equivalent_solutions(a: BootstrapSolution, b: BootstrapSolution) -> bool:
    """Same solution up to relabeling columns with identical branching vectors."""
    if a.branch != b.branch or not np.array_equal(a.branching.b, b.branching.b):
        return False
    if a.ring is None or b.ring is None:
        return a.ring is b.ring
    for pi in _stabilizer_perms(a.branching.b):
        perm = np.array(pi)
        if np.array_equal(a.ring.fusion[np.ix_(perm, perm, perm)], b.ring.fusion):
            return True
    return False


def dedup_solutions(solutions: list) -> list:
    """Keep one representative per relabeling orbit (first in canonical order)."""
    out = []
    for sol in solutions:
        if not any(equivalent_solutions(kept, sol) for kept in out):
            out.append(sol)
    return out


# ---------------------------------------------------------------------------
# step 7: the rank loop
# ---------------------------------------------------------------------------


def solutions_at_rank(
    constraints: NumericalConstraints,
    n_ring: RepTheory,
    r: int,
    options: BootstrapOptions,
):
    """Classified solutions at one trial rank, plus search bookkeeping.

    Returns (solutions, surviving_candidates, unclassified, n_candidates) where
    surviving_candidates are branching matrices whose fusion targets all admit
    decompositions and unclassified are complete rings failing both branches.
    """
    classes = equivalence_classes(constraints)
    graph = quotient_graph(classes, constraints.edges)
    cliques = all_cliques(graph)
    b_caps = class_b_max(constraints, options)
    types = column_types(cliques, classes, b_caps, constraints.n_sectors)
    candidates = assemble_candidates(types, r, constraints)
    n_sub = constraints.n_ring.group_order if constraints.n_ring is not None else None
    solutions, survivors, unclassified = [], [], []
    for B in candidates:
        pair_opts = {}
        feasible = True
        for i, j in _pair_order(r):
            t = fusion_target(B, n_ring, i, j)
            opts = enumerate_decompositions(t, B)
            if not opts:
                feasible = False
                break
            pair_opts[(i, j)] = opts
        if not feasible:
            continue
        survivors.append(B)
        # candidates whose dimension arithmetic can satisfy neither branch
        # cannot classify however the fusion search ends; skip the backtracking
        dims_b = irrep_dims_from_branching(B, constraints.dims)
        worth_it = (
            options.linear_enabled and _linear_arithmetic_ok(dims_b, n_sub)
        ) or (
            options.corep_enabled
            and _corep_arithmetic_ok(dims_b, options.unitary_subgroup_order)
        )
        if not worth_it:
            continue
        for tensor in backtrack_fusion(B, pair_opts):
            dims = irrep_dims_from_branching(B, constraints.dims)
            ring = RepTheory(dims=dims, fusion=tensor)
            sol = classify_solution(B, ring, constraints, options)
            if sol is None:
                unclassified.append(
                    BootstrapSolution(
                        rank=r,
                        branching=B,
                        ring=ring,
                        table=None,
                        branch="ProjectiveSuspected",
                        diagnostics={"reason": "complete ring failed classification"},
                    )
                )
            else:
                solutions.append(sol)
    solutions.sort(key=lambda s: s.sort_key())
    unclassified.sort(key=lambda s: s.sort_key())
    return dedup_solutions(solutions), survivors, dedup_solutions(unclassified), len(candidates)


def run_bootstrap(
    constraints: NumericalConstraints,
    n_ring: Optional[RepTheory] = None,
    options: BootstrapOptions = BootstrapOptions(),
) -> BootstrapResult:
    """Iterate the trial rank upward, closing each branch at its minimal rank.

    Raises NoSolution when no candidate branching matrix exists at any searched
    rank; reports ProjectiveSuspected when candidates exist but neither branch
    ever classifies.
    """
    if n_ring is None:
        n_ring = constraints.n_ring
    if n_ring is None:
        raise ValueError("a subgroup fusion ring is required")
    result = BootstrapResult()
    ranks = []
    any_candidates = False
    first_projective: Optional[ProjectiveReport] = None
    need_linear = options.linear_enabled
    need_corep = options.corep_enabled
    classes = equivalence_classes(constraints)
    graph = quotient_graph(classes, constraints.edges)
    types = column_types(
        all_cliques(graph), classes, class_b_max(constraints, options), constraints.n_sectors
    )
    for r in range(options.r_min, options.r_max + 1):
        if not (need_linear or need_corep):
            break
        ranks.append(r)
        if need_linear and need_corep:
            branch = options.branch
        elif need_linear:
            branch = "linear"
        else:
            branch = "corep"
        rank_options = replace(options, branch=branch)
        sols, survivors, unclassified, n_cand = solutions_at_rank(
            constraints, n_ring, r, rank_options
        )
        any_candidates = any_candidates or n_cand > 0
        if first_projective is None and (survivors or unclassified):
            first_projective = ProjectiveReport(
                rank=r,
                column_types=[tuple(t) for t in types],
                candidates=survivors,
                solutions=unclassified,
            )
        linear_here = [s for s in sols if s.branch == "Linear"]
        corep_here = [s for s in sols if s.branch == "Corep"]
        if need_linear and linear_here:
            result.linear_rank = r
            result.linear = linear_here
            need_linear = False
        if need_corep and corep_here:
            result.corep_rank = r
            result.corep = corep_here
            need_corep = False
    result.ranks_searched = tuple(ranks)
    if not result.linear and not result.corep:
        if not any_candidates:
            raise NoSolution(
                f"no candidate branching matrices up to rank {options.r_max}"
            )
        result.projective = first_projective or ProjectiveReport(
            rank=None, column_types=[tuple(t) for t in types], candidates=[], solutions=[]
        )
    return result
