"""Dense many-body Hamiltonians and subgroup-sector projectors.

Five models are provided: the three-state chain interpolating between a Potts
term and a nearest-neighbor deformation (``obrien_fendley``), the dual spin-1
chain (``kt_spin1``), the extended four-state chain at its permutation point
(``ashkin_teller``), the three-state torus chain (``quantum_torus``), and the
sector-resolved ``fermi_hubbard`` chain.  All are OBC and dense; disorder is
drawn from a seeded generator so identical specs give bit-identical couplings.

Per-site operator templates are cached per (model, L); a realization is then
a coefficient-weighted sum, which keeps ensemble loops cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Dict, Optional, Tuple

import numpy as np

from . import fixtures
from .groupalg import DualMap, RepTheory, dual_map

OMEGA = np.exp(2j * np.pi / 3)

MODELS = ("obrien_fendley", "kt_spin1", "ashkin_teller", "quantum_torus", "fermi_hubbard")


class BadSpec(ValueError):
    pass


@dataclass(frozen=True)
class CouplingSpec:
    """One disorder channel: gaussian(mean, std), uniform(low, high), or fixed(value)."""

    dist: str = "gaussian"
    mean: float = 1.0
    std: float = 0.0
    low: float = 0.0
    high: float = 1.0
    value: float = 1.0

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.dist == "gaussian":
            if self.std < 0:
                raise BadSpec("negative std")
            if self.std == 0:
                return np.full(n, self.mean)
            return rng.normal(self.mean, self.std, size=n)
        if self.dist == "uniform":
            if self.high < self.low:
                raise BadSpec("uniform needs low <= high")
            return rng.uniform(self.low, self.high, size=n)
        if self.dist == "fixed":
            return np.full(n, self.value)
        raise BadSpec(f"unknown distribution {self.dist!r}")


DEFAULT_COUPLINGS: Dict[str, Dict[str, CouplingSpec]] = {
    "obrien_fendley": {
        "J": CouplingSpec("gaussian", mean=1.0, std=0.25),
        "h": CouplingSpec("gaussian", mean=1.0, std=0.25),
    },
    "kt_spin1": {
        "J": CouplingSpec("gaussian", mean=1.0, std=0.25),
        "Delta": CouplingSpec("gaussian", mean=0.7, std=0.25),
        "g": CouplingSpec("gaussian", mean=0.2, std=0.25),
        "D": CouplingSpec("gaussian", mean=0.3, std=0.25),
    },
    "ashkin_teller": {
        "J": CouplingSpec("uniform", low=0.5, high=1.5),
        "Jp": CouplingSpec("uniform", low=0.5, high=1.5),
        "h": CouplingSpec("uniform", low=0.5, high=1.5),
    },
    "quantum_torus": {
        "J": CouplingSpec("gaussian", mean=1.0, std=0.25),
    },
    "fermi_hubbard": {
        "t": CouplingSpec("gaussian", mean=3.0, std=0.5),
        "U": CouplingSpec("fixed", value=4.0),
    },
}


@dataclass
class HamiltonianSpec:
    model: str
    L: int
    theta: float = 0.0
    couplings: Dict[str, CouplingSpec] = field(default_factory=dict)
    rng_seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise BadSpec(f"unknown model {self.model!r}")
        if self.L < 1:
            raise BadSpec("L must be positive")
        merged = dict(DEFAULT_COUPLINGS[self.model])
        merged.update(self.couplings)
        self.couplings = merged

    def with_seed(self, seed: int) -> "HamiltonianSpec":
        return HamiltonianSpec(
            model=self.model,
            L=self.L,
            theta=self.theta,
            couplings=dict(self.couplings),
            rng_seed=seed,
        )

    def draw_couplings(self, names_counts) -> Dict[str, np.ndarray]:
        """Draw channels in the given (name, count) order from a fresh generator."""
        rng = np.random.default_rng(self.rng_seed)
        return {name: self.couplings[name].draw(rng, n) for name, n in names_counts}


@dataclass
class ProjectorSet:
    """Orthogonal projectors onto the known subgroup's sectors."""

    labels: list
    projectors: list
    dims: np.ndarray
    rep: RepTheory
    dual: DualMap

    def __post_init__(self):
        self.dims = np.asarray(self.dims, dtype=int)

    def traces(self) -> np.ndarray:
        return np.array([float(np.trace(p).real) for p in self.projectors])

    @property
    def n_sectors(self) -> int:
        return len(self.labels)


# ---------------------------------------------------------------------------
# local operators
# ---------------------------------------------------------------------------


def clock_shift_ops() -> Tuple[np.ndarray, np.ndarray]:
    """Qutrit clock Z = diag(1, w, w^2) and shift X|q> = |q+1 mod 3>."""
    Z = np.diag([1.0, OMEGA, OMEGA**2]).astype(complex)
    X = np.roll(np.eye(3, dtype=complex), 1, axis=0)
    return Z, X


def spin1_ops() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    sx = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / np.sqrt(2)
    sy = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / np.sqrt(2)
    sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    return sx, sy, sz


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def site_op(op: np.ndarray, j: int, L: int, d: int) -> np.ndarray:
    left = np.eye(d**j, dtype=complex)
    right = np.eye(d ** (L - j - 1), dtype=complex)
    return np.kron(np.kron(left, op), right)


def _bond(a, b, j, L, d):
    left = np.eye(d**j, dtype=complex)
    mid = np.kron(a, b)
    right = np.eye(d ** (L - j - 2), dtype=complex)
    return np.kron(np.kron(left, mid), right)


def global_product(op: np.ndarray, L: int) -> np.ndarray:
    return reduce(np.kron, [op] * L)


def symmetry_residual(H: np.ndarray, ops) -> float:
    """Max entrywise norm of [H, O] over the given operators."""
    worst = 0.0
    for op in ops:
        if op.shape != H.shape:
            raise BadSpec("operator dimension mismatch")
        worst = max(worst, float(np.max(np.abs(H @ op - op @ H))))
    return worst


# ---------------------------------------------------------------------------
# O'Brien-Fendley chain (hidden S3, manifest Z3)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4)
def _of_templates(L: int):
    Z, X = clock_shift_ops()
    sp = (2 * np.eye(3) - OMEGA * X - OMEGA**2 * X.conj().T) @ Z.conj().T / 3.0
    sm = sp.conj().T
    field = [site_op(X + X.conj().T, j, L, 3) for j in range(L)]
    potts = []
    deform = []
    for j in range(L - 1):
        zz = _bond(Z.conj().T, Z, j, L, 3)
        potts.append(-(zz + zz.conj().T))
        t1 = _bond(sp, sm, j, L, 3)
        t2 = _bond(sp @ sp, sm @ sm, j, L, 3)
        o = 3 * t1 - 3 * t2
        deform.append(o + o.conj().T)
    return potts, deform, field


def build_obrien_fendley(spec: HamiltonianSpec):
    if spec.model != "obrien_fendley":
        raise BadSpec("spec is not an obrien_fendley spec")
    L = spec.L
    c = spec.draw_couplings([("J", max(L - 1, 0)), ("h", L)])
    potts, deform, field = _of_templates(L)
    ct, st = np.cos(spec.theta), np.sin(spec.theta)
    D = 3**L
    H = np.zeros((D, D), dtype=complex)
    for j in range(L - 1):
        H += c["J"][j] * (ct * potts[j] + st * deform[j])
    for j in range(L):
        H += c["h"][j] * (st - ct) * field[j]
    _, X = clock_shift_ops()
    xg = global_product(X, L)
    powers = [np.eye(D, dtype=complex), xg, xg @ xg]
    projectors = [
        sum(OMEGA ** (-(q * lam)) * powers[q] for q in range(3)) / 3.0 for lam in range(3)
    ]
    ring = fixtures.z3_ring()
    return H, ProjectorSet(
        labels=list(ring.labels),
        projectors=projectors,
        dims=np.ones(3, dtype=int),
        rep=ring,
        dual=dual_map(ring),
    )


# ---------------------------------------------------------------------------
# dual spin-1 chain (hidden D4, manifest V4)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4)
def _kt_templates(L: int):
    sx, sy, sz = spin1_ops()
    pz = np.eye(3) - 2 * (sz @ sz)  # exp(i pi Sz)
    px = np.eye(3) - 2 * (sx @ sx)  # exp(i pi Sx)
    A = sx @ sx - sy @ sy
    B = sx @ sy + sy @ sx
    bonds_J, bonds_D, bonds_g = [], [], []
    for j in range(L - 1):
        tj = -_bond(sx, sx, j, L, 3) + _bond(sy @ pz, px @ sy, j, L, 3)
        bonds_J.append(tj)
        bonds_D.append(-_bond(sz, sz, j, L, 3))
        bonds_g.append(2 * (_bond(A, A, j, L, 3) - _bond(pz @ B, B, j, L, 3)))
    sites_D = [site_op(sz @ sz, j, L, 3) for j in range(L)]
    ux = global_product(px, L)
    uz = global_product(pz, L)
    return bonds_J, bonds_D, bonds_g, sites_D, ux, uz


def _v4_projectors(u1: np.ndarray, u2: np.ndarray) -> list:
    """Sector projectors of two commuting Z2 generators; labels 00, 10, 01, 11."""
    D = u1.shape[0]
    eye = np.eye(D, dtype=complex)
    out = []
    for q1, q2 in [(0, 0), (1, 0), (0, 1), (1, 1)]:
        p1 = (eye + (-1) ** q1 * u1) / 2
        p2 = (eye + (-1) ** q2 * u2) / 2
        out.append(p1 @ p2)
    return out


def build_kt_spin1(spec: HamiltonianSpec):
    if spec.model != "kt_spin1":
        raise BadSpec("spec is not a kt_spin1 spec")
    L = spec.L
    if L < 2:
        raise BadSpec("kt_spin1 needs L >= 2")
    c = spec.draw_couplings([("J", L - 1), ("Delta", L - 1), ("g", L - 1), ("D", L)])
    bonds_J, bonds_D, bonds_g, sites_D, ux, uz = _kt_templates(L)
    D = 3**L
    H = np.zeros((D, D), dtype=complex)
    for j in range(L - 1):
        H += c["J"][j] * bonds_J[j] + c["Delta"][j] * bonds_D[j] + c["g"][j] * bonds_g[j]
    for j in range(L):
        H += c["D"][j] * sites_D[j]
    ring = fixtures.v4_ring()
    return H, ProjectorSet(
        labels=list(ring.labels),
        projectors=_v4_projectors(ux, uz),
        dims=np.ones(4, dtype=int),
        rep=ring,
        dual=dual_map(ring),
    )


# ---------------------------------------------------------------------------
# extended Ashkin-Teller chain at the permutation point (hidden S4, manifest V4)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4)
def _at_templates(L: int):
    sz = np.kron(PAULI_Z, np.eye(2))
    tz = np.kron(np.eye(2), PAULI_Z)
    sx = np.kron(PAULI_X, np.eye(2))
    tx = np.kron(np.eye(2), PAULI_X)
    stz = sz @ tz
    stx = sx @ tx

    def triple(a_ops, j, rng):
        left = np.eye(4**j, dtype=complex)
        out = 0.0
        for a in a_ops:
            mid = np.kron(np.kron(a, np.eye(4 ** (rng - 1), dtype=complex)), a)
            out = out + np.kron(np.kron(left, mid), np.eye(4 ** (L - j - rng - 1), dtype=complex))
        return out

    nn = [triple([sz, tz, stz], j, 1) for j in range(L - 1)]
    nnn = [triple([sz, tz, stz], j, 2) for j in range(L - 2)]
    fields = [site_op(sx + tx + stx, j, L, 4) for j in range(L)]
    g1 = global_product(sx, L)
    g2 = global_product(tx, L)
    return nn, nnn, fields, g1, g2


def build_ashkin_teller(spec: HamiltonianSpec):
    if spec.model != "ashkin_teller":
        raise BadSpec("spec is not an ashkin_teller spec")
    L = spec.L
    if L < 3:
        raise BadSpec("ashkin_teller needs L >= 3 (next-nearest-neighbor term)")
    c = spec.draw_couplings([("J", L - 1), ("Jp", L - 2), ("h", L)])
    nn, nnn, fields, g1, g2 = _at_templates(L)
    D = 4**L
    H = np.zeros((D, D), dtype=complex)
    for j in range(L - 1):
        H += c["J"][j] * nn[j]
    for j in range(L - 2):
        H += c["Jp"][j] * nnn[j]
    for j in range(L):
        H += c["h"][j] * fields[j]
    ring = fixtures.v4_ring()
    return H, ProjectorSet(
        labels=list(ring.labels),
        projectors=_v4_projectors(g1, g2),
        dims=np.ones(4, dtype=int),
        rep=ring,
        dual=dual_map(ring),
    )


# ---------------------------------------------------------------------------
# three-state torus chain (hidden S3xS3 / (Z3^2 x| Z4), manifest (Z3^2) x| Z2)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4)
def _qtc_templates(L: int):
    Z, X = clock_shift_ops()
    bonds_Z, bonds_X = [], []
    for j in range(L - 1):
        zz = _bond(Z, Z.conj().T, j, L, 3)
        xx = _bond(X, X.conj().T, j, L, 3)
        bonds_Z.append(zz + zz.conj().T)
        bonds_X.append(xx + xx.conj().T)
    r_local = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex)
    zg = global_product(Z, L)
    xg = global_product(X, L)
    rg = global_product(r_local, L)
    return bonds_Z, bonds_X, zg, xg, rg


def _charge_projectors(u: np.ndarray) -> list:
    """Z3 charge projectors of a global order-3 unitary."""
    D = u.shape[0]
    powers = [np.eye(D, dtype=complex), u, u @ u]
    return [
        sum(OMEGA ** (-(q * lam)) * powers[q] for q in range(3)) / 3.0 for lam in range(3)
    ]


def build_quantum_torus(spec: HamiltonianSpec):
    if spec.model != "quantum_torus":
        raise BadSpec("spec is not a quantum_torus spec")
    L = spec.L
    if L < 2:
        raise BadSpec("quantum_torus needs L >= 2")
    if L % 3 != 0:
        raise BadSpec("quantum_torus needs 3 | L")
    c = spec.draw_couplings([("J", L - 1)])
    bonds_Z, bonds_X, zg, xg, rg = _qtc_templates(L)
    D = 3**L
    H = np.zeros((D, D), dtype=complex)
    ct, st = np.cos(spec.theta), np.sin(spec.theta)
    for j in range(L - 1):
        H += c["J"][j] * (ct * bonds_Z[j] + st * bonds_X[j])
    pz = _charge_projectors(zg)
    px = _charge_projectors(xg)
    eye = np.eye(D, dtype=complex)
    p_pair = {(qz, qx): pz[qz] @ px[qx] for qz in range(3) for qx in range(3)}
    p_plus = (eye + rg) / 2
    p_minus = (eye - rg) / 2
    projectors = [
        p_pair[(0, 0)] @ p_plus,
        p_pair[(0, 0)] @ p_minus,
        p_pair[(0, 1)] + p_pair[(0, 2)],
        p_pair[(1, 0)] + p_pair[(2, 0)],
        p_pair[(1, 1)] + p_pair[(2, 2)],
        p_pair[(1, 2)] + p_pair[(2, 1)],
    ]
    ring = fixtures.torus_subgroup_ring()
    return H, ProjectorSet(
        labels=list(ring.labels),
        projectors=projectors,
        dims=np.array([1, 1, 2, 2, 2, 2]),
        rep=ring,
        dual=dual_map(ring),
    )


# ---------------------------------------------------------------------------
# Fermi-Hubbard chain, sector resolved (hidden eta-pairing SU(2))
# ---------------------------------------------------------------------------


@dataclass
class FermiSector:
    n_up: int
    n_dn: int
    dim: int
    basis: tuple
    label: str


def _masks_with_popcount(L: int, n: int) -> list:
    return [m for m in range(1 << L) if bin(m).count("1") == n]


def _apply_annihilate(occ: int, p: int):
    if not (occ >> p) & 1:
        return None
    sign = -1 if bin(occ & ((1 << p) - 1)).count("1") & 1 else 1
    return occ ^ (1 << p), sign


def _apply_create(occ: int, p: int):
    if (occ >> p) & 1:
        return None
    sign = -1 if bin(occ & ((1 << p) - 1)).count("1") & 1 else 1
    return occ | (1 << p), sign


def _sector_basis(L: int, n_up: int, n_dn: int):
    ups = _masks_with_popcount(L, n_up)
    dns = _masks_with_popcount(L, n_dn)
    basis = [(u, d) for u in ups for d in dns]
    index = {s: i for i, s in enumerate(basis)}
    return basis, index


def build_fermi_hubbard(spec: HamiltonianSpec, sector: Tuple[int, int]):
    """Dense Hamiltonian restricted to the (n_up, n_dn) particle sector.

    Mode order: spin-up sites 0..L-1 then spin-down sites L..2L-1, with the
    usual parity-count signs on the combined occupation integer.  Includes the
    -(U/2) sum_j n_j chemical shift.
    """
    if spec.model != "fermi_hubbard":
        raise BadSpec("spec is not a fermi_hubbard spec")
    L = spec.L
    n_up, n_dn = sector
    if not (0 <= n_up <= L and 0 <= n_dn <= L):
        raise BadSpec(f"sector {sector} out of range for L={L}")
    c = spec.draw_couplings([("t", max(L - 1, 0)), ("U", 1)])
    t = c["t"]
    U = float(c["U"][0])
    basis, index = _sector_basis(L, n_up, n_dn)
    dim = len(basis)
    H = np.zeros((dim, dim), dtype=complex)
    for i, (u, d) in enumerate(basis):
        occ = u | (d << L)
        ndouble = bin(u & d).count("1")
        H[i, i] += U * ndouble - 0.5 * U * (n_up + n_dn)
        for j in range(L - 1):
            for off in (0, L):  # spin-up block then spin-down block
                for p, q in ((j + 1 + off, j + off), (j + off, j + 1 + off)):
                    res = _apply_annihilate(occ, q)
                    if res is None:
                        continue
                    occ1, s1 = res
                    res2 = _apply_create(occ1, p)
                    if res2 is None:
                        continue
                    occ2, s2 = res2
                    k = index[(occ2 & ((1 << L) - 1), occ2 >> L)]
                    H[k, i] += -t[j] * s1 * s2
    meta = FermiSector(
        n_up=n_up, n_dn=n_dn, dim=dim, basis=tuple(basis), label=f"({n_up},{n_dn})"
    )
    return H, meta


def fermi_hubbard_eta_plus(L: int, sector: Tuple[int, int]) -> Tuple[np.ndarray, Tuple[int, int]]:
    """Matrix of sum_j (-1)^j c+_{j,up} c+_{j,dn} from (n_up, n_dn) to (n_up+1, n_dn+1)."""
    n_up, n_dn = sector
    src, _ = _sector_basis(L, n_up, n_dn)
    dst_sector = (n_up + 1, n_dn + 1)
    _, dst_index = _sector_basis(L, *dst_sector)
    mat = np.zeros((len(dst_index), len(src)), dtype=complex)
    for i, (u, d) in enumerate(src):
        occ = u | (d << L)
        for j in range(L):
            res = _apply_create(occ, L + j)  # c+_{j,dn} acts first
            if res is None:
                continue
            occ1, s1 = res
            res2 = _apply_create(occ1, j)
            if res2 is None:
                continue
            occ2, s2 = res2
            k = dst_index[(occ2 & ((1 << L) - 1), occ2 >> L)]
            mat[k, i] += (-1) ** j * s1 * s2
    return mat, dst_sector


_BUILDERS = {
    "obrien_fendley": build_obrien_fendley,
    "kt_spin1": build_kt_spin1,
    "ashkin_teller": build_ashkin_teller,
    "quantum_torus": build_quantum_torus,
}


def build_model(spec: HamiltonianSpec):
    """Dispatch to the spin-model builders (fermi_hubbard is sector-resolved)."""
    if spec.model == "fermi_hubbard":
        raise BadSpec("fermi_hubbard is built per sector; use build_fermi_hubbard")
    return _BUILDERS[spec.model](spec)
