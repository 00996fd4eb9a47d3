"""Exact representation-theory algebra on fusion rings and character tables.

Conventions used throughout:

* irrep index 0 is the trivial irrep (dimension 1),
* fusion tensors are integer arrays ``N[i, j, k]`` giving the multiplicity
  of irrep ``k`` in ``i (x) j``,
* character tables are complex arrays with one row per irrep and one column
  per conjugacy class; the identity class column equals the dimension vector,
* corepresentation rings carry per-irrep weight divisors mu in {1, 2, 4};
  a plain group ring is the mu = 1 case.

Characters are floating point with an integer-snapping tolerance where
integrality is required; fusion and branching data are exact integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

INT_TOL = 1e-6
DIAG_TOL = 1e-8
_JOINT_DIAG_SEEDS = (12345, 20177, 31415, 42424, 57721)


class GroupAlgebraError(ValueError):
    pass


class InvalidClassData(GroupAlgebraError):
    pass


class NotAFusionRing(GroupAlgebraError):
    pass


class InvalidRing(GroupAlgebraError):
    pass


class DegenerateSpectrum(GroupAlgebraError):
    pass


class NotAGroupTable(GroupAlgebraError):
    pass


class NotRigid(GroupAlgebraError):
    pass


class InconsistentEmbedding(GroupAlgebraError):
    pass


class EmptyIrrep(GroupAlgebraError):
    pass


@dataclass
class RepTheory:
    """Irrep dimensions plus fusion tensor, optionally characters and classes."""

    dims: np.ndarray
    fusion: np.ndarray
    characters: Optional[np.ndarray] = None
    class_sizes: Optional[np.ndarray] = None
    group_order: Optional[int] = None
    weight_divisors: Optional[np.ndarray] = None
    labels: Optional[list] = None

    def __post_init__(self):
        self.dims = np.asarray(self.dims, dtype=int)
        self.fusion = np.asarray(self.fusion, dtype=int)
        if self.characters is not None:
            self.characters = np.asarray(self.characters, dtype=complex)
        if self.class_sizes is not None:
            self.class_sizes = np.asarray(self.class_sizes, dtype=int)
        if self.weight_divisors is not None:
            self.weight_divisors = np.asarray(self.weight_divisors, dtype=int)

    @property
    def rank(self) -> int:
        return len(self.dims)

    def mu(self) -> np.ndarray:
        """Per-irrep weight divisors, defaulting to all ones."""
        if self.weight_divisors is None:
            return np.ones(self.rank, dtype=int)
        return self.weight_divisors


@dataclass
class CharacterTable:
    """Complex character values (rows = irreps, cols = classes) with class sizes."""

    entries: np.ndarray
    class_sizes: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        self.class_sizes = np.asarray(self.class_sizes, dtype=int)

    @property
    def group_order(self) -> int:
        return int(self.class_sizes.sum())

    @property
    def dims(self) -> np.ndarray:
        d = np.rint(self.entries[:, 0].real).astype(int)
        return d


@dataclass(frozen=True)
class DualMap:
    """Involution alpha -> conjugate irrep index."""

    dual: tuple

    def __call__(self, i: int) -> int:
        return self.dual[i]

    def __len__(self) -> int:
        return len(self.dual)


@dataclass
class BranchingMatrix:
    """Non-negative integer matrix b[lambda, alpha] of branching multiplicities."""

    b: np.ndarray
    row_labels: Optional[list] = None

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=int)
        if (self.b < 0).any():
            raise GroupAlgebraError("branching multiplicities must be non-negative")

    @property
    def n_rows(self) -> int:
        return self.b.shape[0]

    @property
    def rank(self) -> int:
        return self.b.shape[1]


def inner_product(f, g, class_sizes, group_order) -> complex:
    """Class-function inner product (1/|G|) sum_c |c| f(c) conj(g(c))."""
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    sizes = np.asarray(class_sizes, dtype=float)
    if not (len(f) == len(g) == len(sizes)):
        raise InvalidClassData("class-function length mismatch")
    if abs(sizes.sum() - group_order) > INT_TOL:
        raise InvalidClassData(
            f"group order {group_order} does not match class sizes sum {sizes.sum()}"
        )
    return complex(np.sum(sizes * f * np.conj(g)) / group_order)


def _snap_int(x: float, tol: float, what: str, exc=NotAFusionRing) -> int:
    n = int(round(x))
    if abs(x - n) > tol:
        raise exc(f"{what} = {x} is not an integer within {tol}")
    return n


def verlinde_fusion(table: CharacterTable, weight_divisors=None) -> np.ndarray:
    """Fusion tensor N[i,j,k] = <chi_i chi_j, chi_k> / mu_k from a character table.

    mu_k are the corepresentation weight divisors; omit them for an ordinary
    group table.  Raises NotAFusionRing when a coefficient fails integrality.
    """
    chi = table.entries
    r = chi.shape[0]
    sizes = table.class_sizes
    order = table.group_order
    if weight_divisors is None:
        mu = np.ones(r, dtype=int)
    else:
        mu = np.asarray(weight_divisors, dtype=int)
        if not set(np.unique(mu)) <= {1, 2, 4}:
            raise NotAFusionRing("weight divisors must lie in {1, 2, 4}")
    fusion = np.zeros((r, r, r), dtype=int)
    for i in range(r):
        for j in range(i, r):
            prod = chi[i] * chi[j]
            for k in range(r):
                coeff = inner_product(prod, chi[k], sizes, order) / mu[k]
                if abs(coeff.imag) > INT_TOL:
                    raise NotAFusionRing(f"complex fusion coefficient at ({i},{j},{k})")
                n = _snap_int(coeff.real, INT_TOL, f"N[{i}][{j}][{k}]")
                if n < 0:
                    raise NotAFusionRing(f"negative fusion coefficient at ({i},{j},{k})")
                fusion[i, j, k] = n
                fusion[j, i, k] = n
    return fusion


def fusion_matrices(fusion: np.ndarray) -> np.ndarray:
    """Stack of matrices (N_a)[j,k] = N[a,j,k]."""
    return np.asarray(fusion, dtype=float)


def class_sizes_from_characters(entries, weight_divisors=None):
    """Conjugacy-class sizes and group order from a square character table.

    Uses |G| = sum_a d_a^2 / mu_a and column orthogonality
    |c_j| = |G| / sum_a |chi_a(c_j)|^2 / mu_a.  With all mu = 1 this is the
    ordinary finite-group formula.  Raises NotAGroupTable when a size fails
    integrality or the sizes do not sum back to |G|.
    """
    chi = np.asarray(entries, dtype=complex)
    r, n_classes = chi.shape
    if r != n_classes:
        raise NotAGroupTable("character table is not square")
    if np.max(np.abs(chi[0] - 1.0)) > INT_TOL:
        raise NotAGroupTable("first row is not the trivial character")
    mu = np.ones(r) if weight_divisors is None else np.asarray(weight_divisors, dtype=float)
    dims = chi[:, 0].real
    order_f = float(np.sum(dims**2 / mu))
    order = _snap_int(order_f, INT_TOL, "group order", NotAGroupTable)
    sizes = np.zeros(n_classes, dtype=int)
    for j in range(n_classes):
        denom = float(np.sum(np.abs(chi[:, j]) ** 2 / mu))
        if denom <= 0:
            raise NotAGroupTable(f"zero column norm at class {j}")
        s = _snap_int(order / denom, 1e-4, f"|c_{j}|", NotAGroupTable)
        if s <= 0:
            raise NotAGroupTable(f"non-positive class size at {j}")
        sizes[j] = s
    if sizes.sum() != order:
        raise NotAGroupTable(
            f"class sizes sum to {sizes.sum()} but group order is {order}"
        )
    return sizes, order


def _canonical_column_order(entries: np.ndarray, dims: np.ndarray) -> list:
    """Identity column first, rest sorted lexicographically on rounded values."""
    r, n = entries.shape
    id_col = None
    for j in range(n):
        if np.max(np.abs(entries[:, j] - dims)) < 1e-6:
            id_col = j
            break
    if id_col is None:
        # fall back: column with maximal real part in every row
        id_col = int(np.argmax(np.sum(entries.real, axis=0)))
    rest = [j for j in range(n) if j != id_col]

    def key(j):
        col = entries[:, j]
        return tuple((round(z.real, 6), round(z.imag, 6)) for z in col)

    rest.sort(key=key)
    return [id_col] + rest


def characters_from_fusion(ring: RepTheory) -> CharacterTable:
    """Extract the character table as joint eigenvalues of the fusion matrices.

    The fusion matrices commute, so a random real linear combination (fixed
    seeds, retried on failure) is diagonalized and each N_a read off in that
    basis.  Columns are ordered canonically: identity column first, then
    lexicographic on rounded values.  Class sizes come from
    class_sizes_from_characters with the ring's weight divisors.
    """
    report = validate_fusion_ring(ring)
    if not report.axioms_pass:
        raise InvalidRing(f"fusion ring fails axioms: {report.failures()}")
    r = ring.rank
    mats = fusion_matrices(ring.fusion)
    for a in range(r):
        for b in range(a + 1, r):
            if np.max(np.abs(mats[a] @ mats[b] - mats[b] @ mats[a])) > 1e-9:
                raise InvalidRing(f"fusion matrices {a} and {b} do not commute")
    scale = max(1.0, float(np.max(np.abs(mats))))
    last_err = None
    for seed in _JOINT_DIAG_SEEDS:
        rng = np.random.default_rng(seed)
        coeffs = rng.normal(size=r)
        combo = np.tensordot(coeffs, mats, axes=(0, 0))
        try:
            _, vecs = np.linalg.eig(combo)
            vinv = np.linalg.inv(vecs)
        except np.linalg.LinAlgError as err:  # pragma: no cover
            last_err = err
            continue
        cols = np.empty((r, r), dtype=complex)
        ok = True
        for a in range(r):
            d = vinv @ mats[a] @ vecs
            off = d - np.diag(np.diag(d))
            if np.max(np.abs(off)) > DIAG_TOL * scale:
                ok = False
                break
            cols[a, :] = np.diag(d)
        if ok:
            entries = cols
            order = _canonical_column_order(entries, ring.dims.astype(complex))
            entries = entries[:, order]
            sizes, _ = class_sizes_from_characters(entries, ring.weight_divisors)
            return CharacterTable(entries=entries, class_sizes=sizes)
        last_err = DegenerateSpectrum("combination failed to split the joint spectrum")
    raise DegenerateSpectrum(f"joint diagonalization failed after retries: {last_err}")


@dataclass
class ValidationReport:
    """Itemized pass/fail results of the fusion-ring axioms."""

    non_negative_integers: bool
    unity: bool
    commutativity: bool
    associativity: bool
    dimension_consistency: bool
    rigidity: bool
    character_consistency: Optional[bool] = None

    @property
    def axioms_pass(self) -> bool:
        return (
            self.non_negative_integers
            and self.unity
            and self.commutativity
            and self.associativity
            and self.dimension_consistency
        )

    @property
    def all_pass(self) -> bool:
        ok = self.axioms_pass and self.rigidity
        if self.character_consistency is not None:
            ok = ok and self.character_consistency
        return ok

    def failures(self) -> list:
        names = [
            "non_negative_integers",
            "unity",
            "commutativity",
            "associativity",
            "dimension_consistency",
            "rigidity",
        ]
        out = [n for n in names if not getattr(self, n)]
        if self.character_consistency is False:
            out.append("character_consistency")
        return out


def validate_fusion_ring(ring: RepTheory) -> ValidationReport:
    """Check the fusion axioms plus rigidity; returns a report, never raises."""
    N = ring.fusion
    r = ring.rank
    d = ring.dims
    mu = ring.mu()

    non_neg = bool((N >= 0).all()) and N.dtype.kind in "iu"
    unity = bool(
        np.array_equal(N[0], np.eye(r, dtype=int))
        and all(np.array_equal(N[:, 0, :][j], np.eye(r, dtype=int)[j]) for j in range(r))
    )
    comm = bool(np.array_equal(N, N.transpose(1, 0, 2)))
    # sum_k N[i,j,k] N[k,l,m] == sum_k N[j,l,k] N[i,k,m]
    lhs = np.einsum("ijk,klm->ijlm", N, N)
    rhs = np.einsum("jlk,ikm->ijlm", N, N)
    assoc = bool(np.array_equal(lhs, rhs))
    dim_ok = bool(np.array_equal(np.outer(d, d), np.einsum("ijk,k->ij", N, d)))

    rigid = True
    try:
        dual = dual_map(ring)
        for i in range(r):
            for j in range(r):
                expected = mu[i] if j == dual(i) else 0
                if N[i, j, 0] != expected:
                    rigid = False
        if rigid:
            perm = np.array(dual.dual)
            conj = N[np.ix_(perm, perm, perm)].transpose(1, 0, 2)
            rigid = bool(np.array_equal(N, conj))
    except GroupAlgebraError:
        rigid = False

    char_ok = None
    if ring.characters is not None and ring.class_sizes is not None:
        chi = ring.characters
        sizes = ring.class_sizes
        order = int(ring.group_order if ring.group_order is not None else sizes.sum())
        char_ok = bool(np.max(np.abs(chi[0] - 1.0)) < 1e-9)
        char_ok = char_ok and bool(np.max(np.abs(chi[:, 0].real - d)) < 1e-9)
        gram = (chi * sizes) @ chi.conj().T / order
        target = np.diag(mu.astype(float))
        char_ok = char_ok and bool(np.max(np.abs(gram - target)) < 1e-9)

    return ValidationReport(
        non_negative_integers=non_neg,
        unity=unity,
        commutativity=comm,
        associativity=assoc,
        dimension_consistency=dim_ok,
        rigidity=rigid,
        character_consistency=char_ok,
    )


def dual_map(ring: RepTheory) -> DualMap:
    """Duals from the trivial-sector pattern: dual(i) is the unique j with N[i,j,0] > 0.

    Verifies N[i, dual(i), 0] equals the irrep's weight divisor (1 for a group
    ring).  Raises NotRigid on zero or multiple candidate duals.
    """
    N = ring.fusion
    r = ring.rank
    mu = ring.mu()
    dual = []
    for i in range(r):
        partners = [j for j in range(r) if N[i, j, 0] > 0]
        if len(partners) != 1:
            raise NotRigid(f"irrep {i} has {len(partners)} dual partners")
        j = partners[0]
        if N[i, j, 0] != mu[i]:
            raise NotRigid(
                f"N[{i}][{j}][0] = {N[i, j, 0]} differs from weight divisor {mu[i]}"
            )
        dual.append(j)
    for i in range(r):
        if dual[dual[i]] != i:
            raise NotRigid("dual map is not an involution")
    if dual[0] != 0:
        raise NotRigid("trivial irrep is not self-dual")
    return DualMap(dual=tuple(dual))


def branching_from_characters(
    g_table: CharacterTable,
    n_table: CharacterTable,
    class_embedding: Sequence[int],
) -> BranchingMatrix:
    """Branching multiplicities b[lambda, alpha] = <chi_lambda, Res chi_alpha>_N.

    class_embedding[c_N] is the G-class containing the N-class c_N.
    """
    emb = list(class_embedding)
    if len(emb) != n_table.entries.shape[1]:
        raise InconsistentEmbedding("embedding must cover every N-class")
    n_order = n_table.group_order
    restricted = g_table.entries[:, emb]
    n_rows = n_table.entries.shape[0]
    r = g_table.entries.shape[0]
    b = np.zeros((n_rows, r), dtype=int)
    for lam in range(n_rows):
        for a in range(r):
            coeff = inner_product(
                n_table.entries[lam], restricted[a], n_table.class_sizes, n_order
            )
            if abs(coeff.imag) > INT_TOL:
                raise InconsistentEmbedding(f"complex multiplicity at ({lam},{a})")
            b[lam, a] = _snap_int(coeff.real, INT_TOL, f"b[{lam}][{a}]", InconsistentEmbedding)
            if b[lam, a] < 0:
                raise InconsistentEmbedding(f"negative multiplicity at ({lam},{a})")
    return BranchingMatrix(b=b)


def monoidality_residual(B: BranchingMatrix, n_ring: RepTheory, g_ring: RepTheory) -> int:
    """Max |restrict-then-fuse minus fuse-then-restrict| over all (i, j, lambda_c)."""
    b = B.b
    lhs = np.einsum("abc,ai,bj->cij", n_ring.fusion, b, b)
    rhs = np.einsum("ijk,ck->cij", g_ring.fusion, b)
    return int(np.max(np.abs(lhs - rhs)))


def irrep_dims_from_branching(B: BranchingMatrix, d_lambda) -> np.ndarray:
    """G-irrep dimensions d_alpha = sum_lambda b[lambda, alpha] d_lambda."""
    d = np.asarray(d_lambda, dtype=int)
    dims = B.b.T @ d
    if (dims < 1).any():
        raise EmptyIrrep("branching matrix has an empty column")
    return dims


def ring_from_table(
    table: CharacterTable, weight_divisors=None, labels=None
) -> RepTheory:
    """Build a RepTheory (dims, Verlinde fusion, characters) from a character table."""
    fusion = verlinde_fusion(table, weight_divisors)
    dims = table.dims
    wd = None if weight_divisors is None else np.asarray(weight_divisors, dtype=int)
    return RepTheory(
        dims=dims,
        fusion=fusion,
        characters=table.entries,
        class_sizes=table.class_sizes,
        group_order=table.group_order,
        weight_divisors=wd,
        labels=labels,
    )
