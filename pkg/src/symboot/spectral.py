"""Exact diagonalization, cross spectral form factors, and plateau analysis.

Late-time plateaus are computed exactly from degeneracy clusters: for grouped
eigenvalues the infinite-time average of the cross form factor between sectors
a and b is sum_g W_a(g) W_b(g) / (d_a d_b) with W the in-cluster sector
weights.  Time series are produced for plots and cross-validation only.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from .groupalg import DualMap, RepTheory
from .models import ProjectorSet


class BadOperator(ValueError):
    pass


class BadPlateauData(ValueError):
    pass


@dataclass
class SpectralData:
    """Ascending eigenvalues with the unitary eigenvector matrix (columns)."""

    energies: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.energies)


@dataclass
class SectorWeights:
    """w[sector, n] = <n| P_sector |n> for every eigenstate n."""

    w: np.ndarray
    labels: list
    dims: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)
        self.dims = np.asarray(self.dims, dtype=int)

    @property
    def n_sectors(self) -> int:
        return self.w.shape[0]


@dataclass
class PlateauMatrix:
    """Symmetric late-time plateau matrix with benchmark lines."""

    K: np.ndarray
    R: np.ndarray
    kramers_factor: int = 1
    ensemble_size: int = 1
    stderr: Optional[np.ndarray] = None
    labels: Optional[list] = None
    dims: Optional[np.ndarray] = None

    def __post_init__(self):
        self.K = np.asarray(self.K, dtype=float)
        self.R = np.asarray(self.R, dtype=float)
        if self.stderr is not None:
            self.stderr = np.asarray(self.stderr, dtype=float)
        if self.dims is not None:
            self.dims = np.asarray(self.dims, dtype=int)


@dataclass
class ConstraintThresholds:
    positivity: float = 0.05
    equality: float = 0.05
    ratio: float = 0.15
    degeneracy: float = 1e-10

    def validated(self) -> "ConstraintThresholds":
        if min(self.positivity, self.equality, self.ratio, self.degeneracy) <= 0:
            raise ValueError("thresholds must be positive")
        return self


@dataclass
class NumericalConstraints:
    """Discrete constraint structure distilled from a plateau matrix."""

    classes: list  # list of tuples of sector indices; trivial sector's class first
    edges: frozenset  # frozenset of sorted sector index pairs with positive cross plateau
    class_mult_free: list
    class_higher: list
    class_ratio: list
    dims: np.ndarray
    n_ring: Optional[RepTheory] = None
    n_dual: Optional[DualMap] = None
    n_order: Optional[int] = None
    labels: Optional[list] = None
    kramers_advisory: bool = False

    def __post_init__(self):
        self.dims = np.asarray(self.dims, dtype=int)

    @property
    def n_sectors(self) -> int:
        return len(self.dims)

    def class_of(self) -> Dict[int, int]:
        out = {}
        for ci, members in enumerate(self.classes):
            for m in members:
                out[m] = ci
        return out

    def class_edges(self) -> frozenset:
        cls = self.class_of()
        out = set()
        for a, b in self.edges:
            ca, cb = cls[a], cls[b]
            if ca != cb:
                out.add((min(ca, cb), max(ca, cb)))
        return frozenset(out)


def diagonalize(H: np.ndarray, hermiticity_tol: float = 1e-10) -> SpectralData:
    """Full dense Hermitian eigendecomposition (ascending eigenvalues)."""
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise BadOperator("operator must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(H))))
    if np.max(np.abs(H - H.conj().T)) > hermiticity_tol * scale:
        raise BadOperator("operator is not Hermitian within tolerance")
    energies, vectors = np.linalg.eigh(H)
    return SpectralData(energies=energies, vectors=vectors)


def sector_weights(spectral: SpectralData, proj: ProjectorSet) -> SectorWeights:
    """Diagonal projector expectations in the eigenbasis."""
    V = spectral.vectors
    if proj.projectors[0].shape != (spectral.dim, spectral.dim):
        raise BadOperator("projector dimension mismatch")
    w = np.empty((proj.n_sectors, spectral.dim))
    for i, P in enumerate(proj.projectors):
        w[i] = np.real(np.einsum("in,in->n", V.conj(), P @ V))
    return SectorWeights(w=w, labels=list(proj.labels), dims=proj.dims)


def xsff_timeseries(
    weights: SectorWeights,
    energies: np.ndarray,
    a: int,
    b: int,
    d_a: int,
    d_b: int,
    time_grid: np.ndarray,
) -> np.ndarray:
    """Single-realization cross form factor Re[s_a(t) s_b(t)*] / (d_a d_b)."""
    t = np.asarray(time_grid, dtype=float)
    if len(t) > 1 and not (np.diff(t) > 0).all():
        raise ValueError("time grid must be strictly increasing")
    phases = np.exp(-1j * np.outer(energies, t))
    s_a = weights.w[a] @ phases
    s_b = weights.w[b] @ phases
    return np.real(s_a * np.conj(s_b)) / (d_a * d_b)


def cluster_degenerate(energies: np.ndarray, degeneracy_tol: float) -> np.ndarray:
    """Cluster ids of exactly degenerate eigenvalues.

    Consecutive (sorted) eigenvalues join a cluster when their gap is below
    degeneracy_tol * (span / D), the tolerance measured against the mean level
    spacing.  A zero-span spectrum is a single cluster.
    """
    e = np.asarray(energies, dtype=float)
    n = len(e)
    if n == 0:
        return np.zeros(0, dtype=int)
    order = np.argsort(e, kind="stable")
    es = e[order]
    span = es[-1] - es[0]
    ids_sorted = np.zeros(n, dtype=int)
    if span > 0:
        thr = degeneracy_tol * span / n
        ids_sorted[1:] = np.cumsum(np.diff(es) >= thr)
    ids = np.empty(n, dtype=int)
    ids[order] = ids_sorted
    return ids


def plateau_exact(
    weights: SectorWeights,
    energies: np.ndarray,
    a: int,
    b: int,
    d_a: int,
    d_b: int,
    degeneracy_tol: float = 1e-10,
) -> float:
    """Exact infinite-time average of the cross form factor between sectors a, b."""
    if degeneracy_tol <= 0:
        raise ValueError("degeneracy_tol must be positive")
    ids = cluster_degenerate(energies, degeneracy_tol)
    n_clusters = ids.max() + 1 if len(ids) else 0
    Wa = np.bincount(ids, weights=weights.w[a], minlength=n_clusters)
    Wb = np.bincount(ids, weights=weights.w[b], minlength=n_clusters)
    return float(np.dot(Wa, Wb) / (d_a * d_b))


def plateau_matrix(
    weights: SectorWeights,
    energies: np.ndarray,
    kramers_factor: int = 1,
    degeneracy_tol: float = 1e-10,
) -> PlateauMatrix:
    """Full symmetric plateau matrix plus benchmark lines from one realization."""
    ids = cluster_degenerate(energies, degeneracy_tol)
    n_clusters = ids.max() + 1 if len(ids) else 0
    S = weights.n_sectors
    W = np.zeros((S, n_clusters))
    for s in range(S):
        W[s] = np.bincount(ids, weights=weights.w[s], minlength=n_clusters)
    K = (W @ W.T) / np.outer(weights.dims, weights.dims)
    traces = weights.w.sum(axis=1)
    R = kramers_factor * traces / weights.dims
    return PlateauMatrix(
        K=K,
        R=R,
        kramers_factor=kramers_factor,
        ensemble_size=1,
        labels=list(weights.labels),
        dims=weights.dims,
    )


def benchmark_lines(proj: ProjectorSet, nu: int = 1) -> np.ndarray:
    """R_sector = nu * tr(P) / d."""
    if nu not in (1, 2):
        raise ValueError("Kramers factor must be 1 or 2")
    return nu * proj.traces() / proj.dims


def gaussian_smooth(series: np.ndarray, relative_width: float) -> np.ndarray:
    """Auto-scale Gaussian smoothing on a (log-spaced) grid.

    The kernel width grows with position, sigma_i = relative_width * i samples,
    and is truncated at 4 sigma with the retained mass renormalized, so a
    constant series is reproduced exactly and interior points of a linear ramp
    are unchanged.
    """
    if relative_width <= 0:
        raise ValueError("relative_width must be positive")
    y = np.asarray(series, dtype=float)
    n = len(y)
    out = np.empty_like(y)
    for i in range(n):
        sigma = relative_width * i
        if sigma < 1e-12:
            out[i] = y[i]
            continue
        radius = int(np.ceil(4 * sigma))
        lo = max(0, i - radius)
        hi = min(n, i + radius + 1)
        idx = np.arange(lo, hi)
        kern = np.exp(-0.5 * ((idx - i) / sigma) ** 2)
        out[i] = np.dot(kern, y[lo:hi]) / kern.sum()
    return out


def disorder_average(realizations: Sequence) -> PlateauMatrix:
    """Entrywise mean over realizations with per-entry standard errors.

    Accepts a list of PlateauMatrix (reduced in list order) or a list of
    arrays, in which case an (mean, stderr) pair is returned.
    """
    if len(realizations) == 0:
        raise ValueError("disorder_average needs at least one realization")
    if isinstance(realizations[0], PlateauMatrix):
        stack = np.stack([p.K for p in realizations])
        n = len(realizations)
        mean = stack.mean(axis=0)
        err = stack.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros_like(mean)
        first = realizations[0]
        return PlateauMatrix(
            K=mean,
            R=np.stack([p.R for p in realizations]).mean(axis=0),
            kramers_factor=first.kramers_factor,
            ensemble_size=n,
            stderr=err,
            labels=first.labels,
            dims=first.dims,
        )
    stack = np.stack([np.asarray(r, dtype=float) for r in realizations])
    n = stack.shape[0]
    mean = stack.mean(axis=0)
    err = stack.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros_like(mean)
    return mean, err


def kramers_advisory(K: np.ndarray, R: np.ndarray) -> bool:
    """Flag configurations whose diagonal plateaus all cluster near 2R, not R."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.diag(K) / R
    ratios = ratios[np.isfinite(ratios)]
    return bool(len(ratios)) and bool(np.all(np.abs(ratios - 2.0) < 0.3))


def extract_constraints(
    K: PlateauMatrix,
    thresholds: ConstraintThresholds = ConstraintThresholds(),
    n_ring: Optional[RepTheory] = None,
    n_dual: Optional[DualMap] = None,
    n_order: Optional[int] = None,
    curves: Optional[np.ndarray] = None,
    merge_strict_curves: bool = False,
) -> NumericalConstraints:
    """Distill a plateau matrix into the solver's discrete constraint structure.

    (1) positivity: normalized cross plateau above the positivity threshold,
    (2) sector merging: positivity plus equality of diagonal and cross values
        within the equality tolerance (transitive closure); with
        merge_strict_curves and per-pair curves, additionally an L-inf match
        of the smoothed curves over the last decade,
    (3) multiplicity flags from the diagonal-to-benchmark ratio.
    """
    thresholds.validated()
    k = K.K
    S = k.shape[0]
    if np.any(np.diag(k) < 0):
        raise BadPlateauData("negative diagonal plateau")
    diag = np.diag(k)

    edges = set()
    for a in range(S):
        for b in range(a + 1, S):
            denom = np.sqrt(diag[a] * diag[b])
            if denom > 0 and k[a, b] / denom > thresholds.positivity:
                edges.add((a, b))

    def curves_match(a, b):
        if not merge_strict_curves or curves is None:
            return True
        npts = curves.shape[-1]
        tail = slice(max(0, npts - npts // 4), npts)
        ka, kb, kab = curves[a, a, tail], curves[b, b, tail], curves[a, b, tail]
        scale = max(np.max(np.abs(ka)), 1e-12)
        return (
            np.max(np.abs(ka - kab)) < thresholds.equality * scale
            and np.max(np.abs(kb - kab)) < thresholds.equality * scale
        )

    parent = list(range(S))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in sorted(edges):
        if (
            abs(diag[a] - k[a, b]) < thresholds.equality * diag[a]
            and abs(diag[b] - k[a, b]) < thresholds.equality * diag[a]
            and curves_match(a, b)
        ):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

    groups: Dict[int, list] = {}
    for s in range(S):
        groups.setdefault(find(s), []).append(s)
    classes = [tuple(sorted(v)) for v in groups.values()]
    classes.sort(key=lambda c: (0 not in c, min(c)))

    ratios = np.where(K.R > 0, diag / np.where(K.R > 0, K.R, 1.0), np.inf)
    mult_free, higher, class_ratio = [], [], []
    for members in classes:
        rr = [ratios[m] for m in members]
        mult_free.append(all(abs(r - 1.0) < thresholds.ratio for r in rr))
        higher.append(any(r - 1.0 > thresholds.ratio for r in rr))
        class_ratio.append(float(max(rr)))

    return NumericalConstraints(
        classes=classes,
        edges=frozenset(edges),
        class_mult_free=mult_free,
        class_higher=higher,
        class_ratio=class_ratio,
        dims=K.dims if K.dims is not None else np.ones(S, dtype=int),
        n_ring=n_ring,
        n_dual=n_dual,
        n_order=n_order,
        labels=K.labels,
        kramers_advisory=kramers_advisory(k, K.R),
    )


def default_time_grid(energies: np.ndarray, points: int = 400, decades=(-1.0, 3.0)) -> np.ndarray:
    """Log grid over [10^lo, 10^hi] x (2 pi / mean level spacing)."""
    e = np.asarray(energies, dtype=float)
    span = e.max() - e.min()
    spacing = span / max(len(e) - 1, 1) if span > 0 else 1.0
    unit = 2 * np.pi / spacing
    return np.logspace(decades[0], decades[1], points) * unit
