"""Independent cross-checks: a windowed time-average plateau estimator and a
brute-force solver enumerator.

Both exist to validate the production paths (degeneracy-cluster plateaus and
the staged backtracking search) and deliberately avoid sharing their
enumeration logic.
"""

from __future__ import annotations

import itertools
from typing import Optional, Sequence, Tuple

import numpy as np

from .bootstrap import BootstrapOptions, classify_solution
from .groupalg import BranchingMatrix, RepTheory, irrep_dims_from_branching
from .models import ProjectorSet
from .spectral import NumericalConstraints, SectorWeights, diagonalize, sector_weights, xsff_timeseries


def oracle_plateau(
    H: np.ndarray,
    proj: ProjectorSet,
    pair: Tuple[int, int],
    T_window: Optional[float] = None,
    samples: int = 65536,
) -> float:
    """Trapezoidal time average of the cross form factor over [T, 2T].

    T defaults to 50 Heisenberg times, 2 pi D / span; the sampling step stays
    well below the fastest oscillation period.  Used only to validate the
    exact degeneracy-cluster plateaus.
    """
    spectral = diagonalize(H)
    weights = sector_weights(spectral, proj)
    a, b = pair
    e = spectral.energies
    span = float(e[-1] - e[0])
    if span == 0:
        w = weights.w
        d_a, d_b = proj.dims[a], proj.dims[b]
        return float(w[a].sum() * w[b].sum() / (d_a * d_b))
    if T_window is None:
        T_window = 50 * 2 * np.pi * len(e) / span
    needed = int(np.ceil(T_window * span * 8 / np.pi))
    n = max(samples, needed)
    ts = np.linspace(T_window, 2 * T_window, n)
    total = np.zeros(n)
    chunk = max(1, 2_000_000 // len(e))
    d_a, d_b = int(proj.dims[a]), int(proj.dims[b])
    for start in range(0, n, chunk):
        sl = ts[start : start + chunk]
        total[start : start + len(sl)] = xsff_timeseries(
            weights, e, a, b, d_a, d_b, sl
        )
    return float(np.trapezoid(total, ts) / (ts[-1] - ts[0]))


# ---------------------------------------------------------------------------
# brute-force bootstrap enumerator
# ---------------------------------------------------------------------------


def _column_allowed(col: Tuple[int, ...], constraints: NumericalConstraints, caps) -> bool:
    cls = constraints.class_of()
    n = len(col)
    for members in constraints.classes:
        vals = {col[m] for m in members}
        if len(vals) > 1:
            return False
    for ci, members in enumerate(constraints.classes):
        if col[members[0]] > caps[ci]:
            return False
    edge_set = constraints.edges
    for a in range(n):
        for b in range(a + 1, n):
            if col[a] > 0 and col[b] > 0 and cls[a] != cls[b]:
                if (a, b) not in edge_set:
                    return False
    return any(col)


def brute_force_solutions(
    constraints: NumericalConstraints,
    n_ring: RepTheory,
    r: int,
    options: BootstrapOptions,
) -> list:
    """All classified solutions at rank r by exhaustive enumeration.

    Enumerates every bounded integer column respecting the plateau constraints
    directly (no clique machinery), every candidate matrix, every fusion
    decomposition inside the per-coefficient bound box (no pruning), and keeps
    complete tensors passing naive unity/commutativity/associativity checks.
    """
    from .bootstrap import class_b_max  # shared input derivation, not search logic

    S = constraints.n_sectors
    caps = class_b_max(constraints, options)
    cap_all = max(caps)
    cols = [
        c
        for c in itertools.product(range(cap_all + 1), repeat=S)
        if _column_allowed(c, constraints, caps)
    ]
    cols.sort(reverse=True)
    trivial = tuple([1] + [0] * (S - 1))
    cls = constraints.class_of()
    inter_edges = [(a, b) for a, b in constraints.edges if cls[a] != cls[b]]
    higher = [
        members
        for members, flag in zip(constraints.classes, constraints.class_higher)
        if flag
    ]
    solutions = []
    for combo in itertools.combinations_with_replacement(cols, r - 1):
        b = np.array([trivial] + list(combo), dtype=int).T
        if (b.sum(axis=1) == 0).any():
            continue
        bad = False
        for members in constraints.classes:
            first = b[members[0]]
            if any(not np.array_equal(b[m], first) for m in members[1:]):
                bad = True
                break
        if bad:
            continue
        if any(not ((b[a] > 0) & (b[e] > 0)).any() for a, e in inter_edges):
            continue
        if any(not (b[list(members)] >= 2).any() for members in higher):
            continue
        B = BranchingMatrix(b=b, row_labels=constraints.labels)
        for tensor in _brute_force_tensors(B, n_ring):
            dims = irrep_dims_from_branching(B, constraints.dims)
            ring = RepTheory(dims=dims, fusion=tensor)
            sol = classify_solution(B, ring, constraints, options)
            if sol is not None:
                solutions.append(sol)
    solutions.sort(key=lambda s: s.sort_key())
    return solutions


def _brute_force_tensors(B: BranchingMatrix, n_ring: RepTheory) -> list:
    """Every fusion tensor inside the coefficient bound box solving all targets."""
    b = B.b
    r = B.rank
    pairs = [(i, j) for i in range(1, r) for j in range(i, r)]
    per_pair = []
    for i, j in pairs:
        t = np.einsum("abl,a,b->l", n_ring.fusion, b[:, i], b[:, j])
        ranges = []
        for k in range(r):
            sup = np.nonzero(b[:, k])[0]
            bound = int(np.min(t[sup] // b[sup, k])) if len(sup) else 0
            ranges.append(range(bound + 1))
        sols = [
            v
            for v in itertools.product(*ranges)
            if np.array_equal(b @ np.array(v), t)
        ]
        if not sols:
            return []
        per_pair.append(sols)
    tensors = []
    for assignment in itertools.product(*per_pair):
        N = np.zeros((r, r, r), dtype=int)
        for j in range(r):
            N[0, j, j] = 1
            N[j, 0, j] = 1
        for (i, j), v in zip(pairs, assignment):
            N[i, j] = v
            N[j, i] = v
        lhs = np.einsum("ijk,klm->ijlm", N, N)
        rhs = np.einsum("jlk,ikm->ijlm", N, N)
        if np.array_equal(lhs, rhs):
            tensors.append(N)
    return tensors
