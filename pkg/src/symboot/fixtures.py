"""Reference representation-theory data for the bootstrap's known solutions.

Each fixture bundles a subgroup ring, the expected branching matrix, fusion
tensor, character table with class sizes, branch tag, and termination rank.
Fusion tensors are generated from the stored character tables through the
(weighted) Verlinde formula, so a fixture is internally consistent by
construction; the test suite asserts the individually published coefficients
on top of that.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .groupalg import (
    BranchingMatrix,
    CharacterTable,
    DualMap,
    RepTheory,
    dual_map,
    ring_from_table,
)

W = np.exp(2j * np.pi / 3)


@dataclass
class Fixture:
    name: str
    n_ring: RepTheory
    branching: BranchingMatrix
    fusion: np.ndarray
    table: CharacterTable
    branch: str
    rank: int
    group_order: int
    weight_divisors: Optional[np.ndarray] = None
    corep_subset: Optional[tuple] = None
    tags: tuple = ()
    provenance: str = ""

    @property
    def ring(self) -> RepTheory:
        return RepTheory(
            dims=self.table.dims,
            fusion=self.fusion,
            characters=self.table.entries,
            class_sizes=self.table.class_sizes,
            group_order=self.table.group_order,
            weight_divisors=self.weight_divisors,
        )

    def n_dual(self) -> DualMap:
        return dual_map(self.n_ring)


# ---------------------------------------------------------------------------
# subgroup rings
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def trivial_ring() -> RepTheory:
    """Rank-1 ring of the trivial group."""
    table = CharacterTable(entries=np.ones((1, 1), complex), class_sizes=np.array([1]))
    return ring_from_table(table, labels=["0"])


@lru_cache(maxsize=None)
def z3_ring() -> RepTheory:
    """Cyclic group of order 3; charges 0, 1, 2."""
    chi = np.array(
        [[1, 1, 1], [1, W, W**2], [1, W**2, W]], dtype=complex
    )
    table = CharacterTable(entries=chi, class_sizes=np.array([1, 1, 1]))
    return ring_from_table(table, labels=["0", "1", "2"])


@lru_cache(maxsize=None)
def zn_ring(n: int) -> RepTheory:
    """Cyclic group of order n; used by the synthetic solver-oracle instances."""
    w = np.exp(2j * np.pi / n)
    chi = np.array([[w ** (a * k) for k in range(n)] for a in range(n)], dtype=complex)
    table = CharacterTable(entries=chi, class_sizes=np.ones(n, dtype=int))
    return ring_from_table(table, labels=[str(a) for a in range(n)])


@lru_cache(maxsize=None)
def v4_ring() -> RepTheory:
    """Klein four-group; sector labels '00', '10', '01', '11'."""
    labels = ["00", "10", "01", "11"]
    pairs = [(0, 0), (1, 0), (0, 1), (1, 1)]
    chi = np.array(
        [[(-1) ** (a * s + b * t) for (s, t) in pairs] for (a, b) in pairs],
        dtype=complex,
    )
    table = CharacterTable(entries=chi, class_sizes=np.ones(4, dtype=int))
    return ring_from_table(table, labels=labels)


@lru_cache(maxsize=None)
def torus_subgroup_ring() -> RepTheory:
    """(Z3 x Z3) x| Z2 with charge conjugation; six irreps of dims (1,1,2,2,2,2).

    Sector labels: (0,+), (0,-) are the charge-neutral R-even/odd lines;
    [qz,qx] is the two-dimensional irrep on the charge orbit
    {(qz,qx), (-qz,-qx)}.  Class order: e, {Z,Z^2}, {X,X^2}, {ZX,(ZX)^-1},
    {ZX^2,(ZX^2)^-1}, and the 9-element conjugation coset.
    """
    labels = ["(0,+)", "(0,-)", "[0,1]", "[1,0]", "[1,1]", "[1,2]"]

    def chi2(qz, qx):
        # character of the induced 2-dim irrep on class representatives
        def val(b, a):
            z = W ** ((qz * b + qx * a) % 3)
            return z + np.conj(z)

        return [2.0, val(1, 0), val(0, 1), val(1, 1), val(1, 2), 0.0]

    chi = np.array(
        [
            [1, 1, 1, 1, 1, 1],
            [1, 1, 1, 1, 1, -1],
            chi2(0, 1),
            chi2(1, 0),
            chi2(1, 1),
            chi2(1, 2),
        ],
        dtype=complex,
    )
    table = CharacterTable(entries=chi, class_sizes=np.array([1, 2, 2, 2, 2, 9]))
    return ring_from_table(table, labels=labels)


# ---------------------------------------------------------------------------
# fixture tables
# ---------------------------------------------------------------------------


def _fixture_from_table(
    name,
    n_ring,
    b,
    row_labels,
    entries,
    sizes,
    branch,
    rank,
    group_order,
    weight_divisors=None,
    corep_subset=None,
    tags=(),
    provenance="",
) -> Fixture:
    table = CharacterTable(
        entries=np.array(entries, dtype=complex), class_sizes=np.array(sizes, dtype=int)
    )
    wd = None if weight_divisors is None else np.array(weight_divisors, dtype=int)
    fusion = ring_from_table(table, wd).fusion
    return Fixture(
        name=name,
        n_ring=n_ring,
        branching=BranchingMatrix(b=np.array(b, dtype=int), row_labels=row_labels),
        fusion=fusion,
        table=table,
        branch=branch,
        rank=rank,
        group_order=group_order,
        weight_divisors=wd,
        corep_subset=corep_subset,
        tags=tuple(tags),
        provenance=provenance,
    )


@lru_cache(maxsize=None)
def _build_all() -> dict:
    fx = {}

    fx["S3"] = _fixture_from_table(
        "S3",
        z3_ring(),
        [[1, 1, 0], [0, 0, 1], [0, 0, 1]],
        ["0", "1", "2"],
        [[1, 1, 1], [1, -1, 1], [2, 0, -1]],
        [1, 3, 2],
        "Linear",
        3,
        6,
        provenance="hidden S3 of the three-state chain, seen from its Z3 charge sectors",
    )

    fx["S3-corep"] = _fixture_from_table(
        "S3-corep",
        z3_ring(),
        [[1, 0], [0, 1], [0, 1]],
        ["0", "1", "2"],
        [[1, 1], [2, -1]],
        [1, 2],
        "Corep",
        2,
        6,
        weight_divisors=[1, 2],
        corep_subset=(1,),
        provenance="anti-unitary reading of the same chain: Z3 extended by a conjugation",
    )

    fx["D4"] = _fixture_from_table(
        "D4",
        v4_ring(),
        [[1, 1, 0, 0, 0], [0, 0, 1, 1, 0], [0, 0, 0, 0, 1], [0, 0, 0, 0, 1]],
        ["00", "10", "01", "11"],
        [
            [1, 1, 1, 1, 1],
            [1, 1, 1, -1, -1],
            [1, 1, -1, 1, -1],
            [1, 1, -1, -1, 1],
            [2, -2, 0, 0, 0],
        ],
        [1, 1, 2, 2, 2],
        "Linear",
        5,
        8,
        provenance="hidden D4 of the dual spin-1 chain over its Z2xZ2 sectors",
    )

    fx["S4"] = _fixture_from_table(
        "S4",
        v4_ring(),
        [[1, 1, 2, 0, 0], [0, 0, 0, 1, 1], [0, 0, 0, 1, 1], [0, 0, 0, 1, 1]],
        ["00", "10", "01", "11"],
        [
            [1, 1, 1, 1, 1],
            [1, 1, -1, -1, 1],
            [2, 2, 0, 0, -1],
            [3, -1, 1, -1, 0],
            [3, -1, -1, 1, 0],
        ],
        [1, 3, 6, 6, 8],
        "Linear",
        5,
        24,
        provenance="four-state Potts-point chain: full S4 from the spin-flip V4",
    )

    qtc = torus_subgroup_ring()
    qtc_rows = list(qtc.labels)

    fx["S3xS3-linear"] = _fixture_from_table(
        "S3xS3-linear",
        qtc,
        [
            [1, 0, 0, 1, 0, 0, 0, 0, 0],
            [0, 1, 1, 0, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, 0, 1, 1, 0],
            [0, 0, 0, 0, 1, 1, 0, 0, 0],
            [0, 0, 0, 0, 0, 0, 0, 0, 1],
            [0, 0, 0, 0, 0, 0, 0, 0, 1],
        ],
        qtc_rows,
        [
            [1, 1, 1, 1, 1, 1, 1, 1, 1],
            [1, 1, 1, 1, -1, 1, -1, 1, -1],
            [1, 1, 1, 1, 1, -1, 1, -1, -1],
            [1, 1, 1, 1, -1, -1, -1, -1, 1],
            [2, 2, -1, -1, 2, 0, -1, 0, 0],
            [2, 2, -1, -1, -2, 0, 1, 0, 0],
            [2, -1, 2, -1, 0, 2, 0, -1, 0],
            [2, -1, 2, -1, 0, -2, 0, 1, 0],
            [4, -2, -2, 1, 0, 0, 0, 0, 0],
        ],
        [1, 2, 2, 4, 3, 3, 6, 6, 9],
        "Linear",
        9,
        36,
        provenance="torus chain at generic angle, read as a linear S3xS3 action",
    )

    fx["S3xS3-corep"] = _fixture_from_table(
        "S3xS3-corep",
        qtc,
        [
            [1, 0, 0, 0, 0],
            [0, 1, 0, 0, 0],
            [0, 0, 1, 0, 0],
            [0, 0, 0, 1, 0],
            [0, 0, 0, 0, 1],
            [0, 0, 0, 0, 1],
        ],
        qtc_rows,
        [
            [1, 1, 1, 1, 1],
            [1, 1, 1, 1, -1],
            [2, -1, -1, 2, 0],
            [2, -1, 2, -1, 0],
            [4, 1, -2, -2, 0],
        ],
        [1, 4, 2, 2, 9],
        "Corep",
        5,
        36,
        weight_divisors=[1, 1, 1, 1, 2],
        corep_subset=(4,),
        provenance="torus chain at generic angle with the anti-unitary conjugation kept hidden",
    )

    fx["Z3sqZ4"] = _fixture_from_table(
        "Z3sqZ4",
        qtc,
        [
            [1, 0, 1, 0, 0, 0],
            [0, 1, 0, 1, 0, 0],
            [0, 0, 0, 0, 0, 1],
            [0, 0, 0, 0, 0, 1],
            [0, 0, 0, 0, 1, 0],
            [0, 0, 0, 0, 1, 0],
        ],
        qtc_rows,
        [
            [1, 1, 1, 1, 1, 1],
            [1, 1, 1, -1, 1j, -1j],
            [1, 1, 1, 1, -1, -1],
            [1, 1, 1, -1, -1j, 1j],
            [4, 1, -2, 0, 0, 0],
            [4, -2, 1, 0, 0, 0],
        ],
        [1, 4, 4, 9, 9, 9],
        "Linear",
        6,
        36,
        provenance="self-dual torus chain: (Z3xZ3) x| Z4 with a non-normal known subgroup",
    )

    fx["QTC-SD-spurious"] = _fixture_from_table(
        "QTC-SD-spurious",
        qtc,
        [
            [1, 0, 1, 0, 0, 0],
            [0, 1, 0, 1, 0, 0],
            [0, 0, 0, 0, 0, 1],
            [0, 0, 0, 0, 0, 1],
            [0, 0, 0, 0, 1, 0],
            [0, 0, 0, 0, 1, 0],
        ],
        qtc_rows,
        [
            [1, 1, 1, 1, 1, 1],
            [1, 1, 1, 1, -1, -1],
            [1, 1, 1, -1, -1, 1],
            [1, 1, 1, -1, 1, -1],
            [4, 1, -2, 0, 0, 0],
            [4, -2, 1, 0, 0, 0],
        ],
        [1, 4, 4, 9, 9, 9],
        "Linear",
        6,
        36,
        tags=("NotAGroup", "spurious"),
        provenance="self-dual torus chain companion solution: a rigid ring with no group behind it",
    )

    return fx


def list_fixtures() -> list:
    return sorted(_build_all().keys())


def get_fixture(name: str) -> Fixture:
    fixtures = _build_all()
    if name not in fixtures:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(fixtures))}")
    return fixtures[name]
