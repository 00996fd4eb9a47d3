"""End-to-end orchestration: model -> ED -> plateaus -> constraints -> bootstrap.

Also hosts the run configuration schema, result export (sorted-key JSON and
plot-ready CSV, byte-stable for identical inputs), and verification of
bootstrap output against the stored fixtures.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import fixtures as fixture_db
from .bootstrap import (
    BootstrapOptions,
    BootstrapResult,
    BootstrapSolution,
    run_bootstrap,
)
from .groupalg import RepTheory, dual_map
from .models import (
    BadSpec,
    CouplingSpec,
    HamiltonianSpec,
    ProjectorSet,
    build_fermi_hubbard,
    build_model,
)
from .serialize import (
    SCHEMA_VERSION,
    branching_to_json,
    complex_matrix_to_json,
    dump_json,
    fusion_to_sparse,
    rep_to_json,
)
from .spectral import (
    ConstraintThresholds,
    NumericalConstraints,
    PlateauMatrix,
    SectorWeights,
    default_time_grid,
    diagonalize,
    disorder_average,
    extract_constraints,
    gaussian_smooth,
    plateau_matrix,
    sector_weights,
    xsff_timeseries,
)


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    spec: HamiltonianSpec
    n_realizations: int = 1
    kramers_factor: int = 1
    thresholds: ConstraintThresholds = field(default_factory=ConstraintThresholds)
    bootstrap: BootstrapOptions = field(default_factory=BootstrapOptions)
    time_grid_points: int = 400
    time_grid_decades: Tuple[float, float] = (-1.0, 3.0)
    smoothing_width: float = 0.05
    curves: bool = True
    sectors_n: Optional[List[int]] = None  # fermi_hubbard particle numbers
    run_label: str = "run"
    dump_operators: bool = False
    run_bootstrap_stage: bool = True

    def __post_init__(self):
        if self.n_realizations < 1:
            raise ConfigError("n_realizations must be >= 1")
        if self.kramers_factor not in (1, 2):
            raise ConfigError("kramers_factor must be 1 or 2")
        try:
            self.thresholds.validated()
        except ValueError as err:
            raise ConfigError(str(err)) from err


def config_from_json(doc: dict) -> PipelineConfig:
    try:
        model = dict(doc["model"])
        name = model.pop("name")
        couplings = {
            key: CouplingSpec(**params) for key, params in model.pop("couplings", {}).items()
        }
        spec = HamiltonianSpec(
            model=name,
            L=int(model.pop("L")),
            theta=float(model.pop("theta", 0.0)),
            couplings=couplings,
            rng_seed=int(model.pop("rng_seed", 0)),
        )
        if model:
            raise ConfigError(f"unknown model fields: {sorted(model)}")
        thresholds = ConstraintThresholds(**doc.get("thresholds", {}))
        bootstrap = BootstrapOptions(**doc.get("bootstrap", {}))
        grid = doc.get("time_grid", {})
        return PipelineConfig(
            spec=spec,
            n_realizations=int(doc.get("n_realizations", 1)),
            kramers_factor=int(doc.get("kramers_factor", 1)),
            thresholds=thresholds,
            bootstrap=bootstrap,
            time_grid_points=int(grid.get("points", 400)),
            time_grid_decades=tuple(grid.get("decades", (-1.0, 3.0))),
            smoothing_width=float(doc.get("smoothing", {}).get("relative_width", 0.05)),
            curves=bool(doc.get("curves", True)),
            sectors_n=doc.get("sectors_n"),
            run_label=str(doc.get("run_label", "run")),
            dump_operators=bool(doc.get("dump_operators", False)),
        )
    except (KeyError, TypeError, ValueError, BadSpec) as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(f"invalid configuration: {err}") from err


# ---------------------------------------------------------------------------
# realization workers
# ---------------------------------------------------------------------------


@dataclass
class RealizationResult:
    plateau: PlateauMatrix
    curves: Optional[np.ndarray]  # (S, S, T) raw series per sector pair
    time_grid: Optional[np.ndarray]


def _spin_realization(config: PipelineConfig, index: int) -> RealizationResult:
    spec = config.spec.with_seed(config.spec.rng_seed + index)
    H, proj = build_model(spec)
    spectral = diagonalize(H)
    weights = sector_weights(spectral, proj)
    plateau = plateau_matrix(
        weights,
        spectral.energies,
        kramers_factor=config.kramers_factor,
        degeneracy_tol=config.thresholds.degeneracy,
    )
    curves = None
    grid = None
    if config.curves:
        grid = default_time_grid(
            spectral.energies, config.time_grid_points, config.time_grid_decades
        )
        S = weights.n_sectors
        curves = np.empty((S, S, len(grid)))
        phases = np.exp(-1j * np.outer(spectral.energies, grid))
        amps = weights.w @ phases
        for a in range(S):
            for b in range(S):
                curves[a, b] = np.real(amps[a] * np.conj(amps[b])) / (
                    weights.dims[a] * weights.dims[b]
                )
    return RealizationResult(plateau=plateau, curves=curves, time_grid=grid)


def fermi_sectors(config: PipelineConfig) -> List[Tuple[int, int]]:
    L = config.spec.L
    numbers = config.sectors_n
    if numbers is None:
        numbers = list(range(max(0, L - 2), min(2 * L, L + 2) + 1))
    out = []
    for n in numbers:
        n_up = (n + 1) // 2
        out.append((n_up, n - n_up))
    return out


def _fermi_realization(config: PipelineConfig, index: int) -> RealizationResult:
    spec = config.spec.with_seed(config.spec.rng_seed + index)
    sectors = fermi_sectors(config)
    energies = []
    blocks = []
    for sector in sectors:
        H, meta = build_fermi_hubbard(spec, sector)
        spectral = diagonalize(H)
        energies.append(spectral.energies)
        blocks.append(meta)
    sizes = [len(e) for e in energies]
    total = int(np.sum(sizes))
    w = np.zeros((len(sectors), total))
    offset = 0
    for s, size in enumerate(sizes):
        w[s, offset : offset + size] = 1.0
        offset += size
    weights = SectorWeights(
        w=w, labels=[m.label for m in blocks], dims=np.ones(len(sectors), dtype=int)
    )
    all_e = np.concatenate(energies)
    plateau = plateau_matrix(
        weights,
        all_e,
        kramers_factor=config.kramers_factor,
        degeneracy_tol=config.thresholds.degeneracy,
    )
    curves = None
    grid = None
    if config.curves:
        grid = default_time_grid(all_e, config.time_grid_points, config.time_grid_decades)
        S = len(sectors)
        phases = np.exp(-1j * np.outer(all_e, grid))
        amps = weights.w @ phases
        curves = np.empty((S, S, len(grid)))
        for a in range(S):
            for b in range(S):
                curves[a, b] = np.real(amps[a] * np.conj(amps[b]))
    return RealizationResult(plateau=plateau, curves=curves, time_grid=grid)


# ---------------------------------------------------------------------------
# full runs
# ---------------------------------------------------------------------------


@dataclass
class RunReport:
    config: PipelineConfig
    plateau: PlateauMatrix
    constraints: Optional[NumericalConstraints]
    bootstrap: Optional[BootstrapResult]
    selection_rule: Optional[dict]
    curves: Optional[np.ndarray]
    time_grid: Optional[np.ndarray]
    timings: Dict[str, float]

    def curve_pairs(self) -> list:
        S = self.plateau.K.shape[0]
        return [(a, b) for a in range(S) for b in range(a, S)]


def run_pipeline(config: PipelineConfig, threads: int = 1) -> RunReport:
    """Execute the full chain; realization work may run on a thread pool, with
    the reduction always performed in realization-index order."""
    t_start = time.perf_counter()
    worker = (
        _fermi_realization if config.spec.model == "fermi_hubbard" else _spin_realization
    )
    indices = list(range(config.n_realizations))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda i: worker(config, i), indices))
    else:
        results = [worker(config, i) for i in indices]
    t_ed = time.perf_counter()

    plateau = disorder_average([r.plateau for r in results])
    curves = None
    grid = results[0].time_grid
    if config.curves and results[0].curves is not None:
        curves = np.mean(np.stack([r.curves for r in results]), axis=0)

    timings = {"ed_seconds": t_ed - t_start}
    if config.spec.model == "fermi_hubbard":
        summary = selection_rule_summary(plateau)
        timings["total_seconds"] = time.perf_counter() - t_start
        return RunReport(
            config=config,
            plateau=plateau,
            constraints=None,
            bootstrap=None,
            selection_rule=summary,
            curves=curves,
            time_grid=grid,
            timings=timings,
        )

    _, proj = build_model(config.spec)
    constraints = extract_constraints(
        plateau,
        thresholds=config.thresholds,
        n_ring=proj.rep,
        n_dual=proj.dual,
        n_order=config.bootstrap.unitary_subgroup_order,
        curves=curves,
    )
    t_con = time.perf_counter()
    result = None
    if config.run_bootstrap_stage:
        result = run_bootstrap(constraints, proj.rep, config.bootstrap)
    timings["constraints_seconds"] = t_con - t_ed
    timings["bootstrap_seconds"] = time.perf_counter() - t_con
    timings["total_seconds"] = time.perf_counter() - t_start
    return RunReport(
        config=config,
        plateau=plateau,
        constraints=constraints,
        bootstrap=result,
        selection_rule=None,
        curves=curves,
        time_grid=grid,
        timings=timings,
    )


def _particle_number(label) -> int:
    if isinstance(label, str):
        parts = label.strip("()").split(",")
        return sum(int(p) for p in parts)
    return int(sum(label))


def selection_rule_summary(plateau: PlateauMatrix) -> dict:
    """Normalized cross plateaus grouped by even/odd particle-number offset."""
    labels = plateau.labels
    numbers = [_particle_number(l) for l in labels]
    K = plateau.K
    diag = np.diag(K)
    entries = []
    for a in range(len(labels)):
        for b in range(a + 1, len(labels)):
            norm = K[a, b] / np.sqrt(diag[a] * diag[b]) if diag[a] * diag[b] > 0 else 0.0
            entries.append(
                {
                    "pair": [labels[a], labels[b]],
                    "delta_n": abs(numbers[a] - numbers[b]),
                    "normalized_cross_plateau": float(norm),
                }
            )
    return {
        "sector_numbers": numbers,
        "entries": entries,
        "even_min": min(
            (e["normalized_cross_plateau"] for e in entries if e["delta_n"] % 2 == 0),
            default=None,
        ),
        "odd_max": max(
            (e["normalized_cross_plateau"] for e in entries if e["delta_n"] % 2 == 1),
            default=None,
        ),
    }


# ---------------------------------------------------------------------------
# fixture verification
# ---------------------------------------------------------------------------


@dataclass
class MatchReport:
    fixture: str
    matched: bool
    reasons: list
    column_permutation: Optional[list] = None
    class_permutation: Optional[list] = None


def _column_permutations(sol_b: np.ndarray, fix_b: np.ndarray, sol_d, fix_d):
    """Permutations pi with pi(0)=0 mapping fixture columns onto solution columns."""
    r = sol_b.shape[1]
    groups: Dict[tuple, list] = {}
    for i in range(1, r):
        groups.setdefault((int(fix_d[i]), tuple(fix_b[:, i])), []).append(i)
    sol_groups: Dict[tuple, list] = {}
    for i in range(1, r):
        sol_groups.setdefault((int(sol_d[i]), tuple(sol_b[:, i])), []).append(i)
    if set(groups) != set(sol_groups) or any(
        len(groups[k]) != len(sol_groups[k]) for k in groups
    ):
        return
    keys = sorted(groups)
    for perms in itertools.product(*[itertools.permutations(sol_groups[k]) for k in keys]):
        pi = [0] * r
        for key, perm in zip(keys, perms):
            for fix_idx, sol_idx in zip(groups[key], perm):
                pi[fix_idx] = sol_idx
        yield pi


def verify_against_fixture(solution: BootstrapSolution, fixture_name: str) -> MatchReport:
    """Match a bootstrap solution against a stored fixture.

    Branching must agree in the fixture's declared row order; the fusion tensor
    up to a simultaneous irrep permutation; characters and class sizes up to a
    column permutation within 1e-6; branch tag and rank exactly.
    """
    fx = fixture_db.get_fixture(fixture_name)
    reasons = []
    if solution.rank != fx.rank:
        reasons.append(f"rank {solution.rank} != fixture rank {fx.rank}")
    if solution.branch != fx.branch:
        reasons.append(f"branch {solution.branch} != fixture branch {fx.branch}")
    if reasons:
        return MatchReport(fixture=fixture_name, matched=False, reasons=reasons)
    if solution.group_order is not None and solution.group_order != fx.group_order:
        reasons.append(
            f"group order {solution.group_order} != fixture {fx.group_order}"
        )
        return MatchReport(fixture=fixture_name, matched=False, reasons=reasons)

    sol_b = solution.branching.b
    fix_b = fx.branching.b
    if sol_b.shape != fix_b.shape:
        return MatchReport(
            fixture=fixture_name,
            matched=False,
            reasons=[f"branching shape {sol_b.shape} != {fix_b.shape}"],
        )
    sol_d = solution.ring.dims
    fix_d = fx.ring.dims
    fusion_fix = fx.fusion
    fusion_sol = solution.ring.fusion
    for pi in _column_permutations(sol_b, fix_b, sol_d, fix_d):
        perm = np.array(pi)
        if not np.array_equal(fusion_sol[np.ix_(perm, perm, perm)], fusion_fix):
            continue
        if solution.corep_subset is not None:
            mapped = tuple(sorted(pi[i] for i in fx.corep_subset or ()))
            if tuple(sorted(solution.corep_subset)) != mapped:
                continue
        col_map = _match_character_columns(
            solution.table, fx, perm
        )
        if col_map is None:
            reasons.append("characters do not match under any class permutation")
            continue
        return MatchReport(
            fixture=fixture_name,
            matched=True,
            reasons=[],
            column_permutation=pi,
            class_permutation=col_map,
        )
    reasons.append("no irrep permutation matches branching and fusion")
    return MatchReport(fixture=fixture_name, matched=False, reasons=reasons)


def _match_character_columns(sol_table, fx, perm) -> Optional[list]:
    if sol_table is None:
        return None
    sol_entries = sol_table.entries[perm, :]
    fix_entries = fx.table.entries
    n = fix_entries.shape[1]
    used = set()
    mapping = []
    for c in range(n):
        found = None
        for c2 in range(n):
            if c2 in used:
                continue
            if (
                np.max(np.abs(sol_entries[:, c2] - fix_entries[:, c])) < 1e-6
                and sol_table.class_sizes[c2] == fx.table.class_sizes[c]
            ):
                found = c2
                break
        if found is None:
            return None
        used.add(found)
        mapping.append(found)
    return mapping


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def plateau_to_json(p: PlateauMatrix) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "plateau_matrix",
        "K": [[float(x) for x in row] for row in p.K],
        "R": [float(x) for x in p.R],
        "kramers_factor": int(p.kramers_factor),
        "ensemble_size": int(p.ensemble_size),
    }
    if p.stderr is not None:
        doc["stderr"] = [[float(x) for x in row] for row in p.stderr]
    if p.labels is not None:
        doc["labels"] = [str(l) for l in p.labels]
    if p.dims is not None:
        doc["dims"] = [int(d) for d in p.dims]
    return doc


def constraints_to_json(c: NumericalConstraints) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "numerical_constraints",
        "classes": [list(map(int, members)) for members in c.classes],
        "edges": sorted([list(map(int, e)) for e in c.edges]),
        "class_mult_free": [bool(x) for x in c.class_mult_free],
        "class_higher": [bool(x) for x in c.class_higher],
        "class_ratio": [float(x) for x in c.class_ratio],
        "dims": [int(d) for d in c.dims],
        "labels": None if c.labels is None else [str(l) for l in c.labels],
        "unitary_subgroup_order": c.n_order,
        "kramers_advisory": bool(c.kramers_advisory),
    }


def solution_to_json(s: BootstrapSolution) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "bootstrap_solution",
        "rank": int(s.rank),
        "branch": s.branch,
        "branching": branching_to_json(s.branching),
        "diagnostics": {k: _plain(v) for k, v in sorted(s.diagnostics.items())},
    }
    if s.ring is not None:
        doc["ring"] = rep_to_json(s.ring)
        doc["dims"] = [int(d) for d in s.ring.dims]
        doc["fusion"] = fusion_to_sparse(s.ring.fusion)
    if s.table is not None:
        doc["characters"] = complex_matrix_to_json(s.table.entries)
        doc["class_sizes"] = [int(x) for x in s.table.class_sizes]
    if s.group_order is not None:
        doc["group_order"] = int(s.group_order)
    if s.corep_subset is not None:
        doc["corep_subset"] = [int(i) for i in s.corep_subset]
    return doc


def _plain(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def bootstrap_result_to_json(res: BootstrapResult) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "bootstrap_result",
        "ranks_searched": list(res.ranks_searched),
        "linear_rank": res.linear_rank,
        "linear": [solution_to_json(s) for s in res.linear],
        "corep_rank": res.corep_rank,
        "corep": [solution_to_json(s) for s in res.corep],
    }
    if res.projective is not None:
        doc["projective"] = {
            "rank": res.projective.rank,
            "column_types": [list(map(int, t)) for t in res.projective.column_types],
            "candidates": [branching_to_json(b) for b in res.projective.candidates],
            "solutions": [solution_to_json(s) for s in res.projective.solutions],
        }
    return doc


def write_curves_csv(report: RunReport, out_dir: Path, smoothing_width: float) -> list:
    """One CSV per sector pair with columns t, K_raw, K_smooth."""
    if report.curves is None or report.time_grid is None:
        return []
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for a, b in report.curve_pairs():
        raw = report.curves[a, b]
        smooth = gaussian_smooth(raw, smoothing_width)
        path = out_dir / f"curve_{a}_{b}.csv"
        lines = ["t,K_raw,K_smooth"]
        for t, kr, ks in zip(report.time_grid, raw, smooth):
            lines.append(f"{t!r},{kr!r},{ks!r}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
        written.append(path)
    return written


def _operator_to_json(op: np.ndarray) -> dict:
    return {
        "re": [[float(x) for x in row] for row in op.real],
        "im": [[float(x) for x in row] for row in op.imag],
    }


def export_run(report: RunReport, out_dir, dump_operators: bool = False) -> dict:
    """Write all run artifacts into out_dir; returns the report document."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dump_json(plateau_to_json(report.plateau), out / "plateau.json")
    files = ["plateau.json"]
    if report.constraints is not None:
        dump_json(constraints_to_json(report.constraints), out / "constraints.json")
        files.append("constraints.json")
    if report.bootstrap is not None:
        dump_json(bootstrap_result_to_json(report.bootstrap), out / "solutions.json")
        files.append("solutions.json")
    if report.selection_rule is not None:
        dump_json(
            {
                "schema_version": SCHEMA_VERSION,
                "kind": "selection_rule_summary",
                **report.selection_rule,
            },
            out / "selection_rule.json",
        )
        files.append("selection_rule.json")
    curve_files = write_curves_csv(report, out / "curves", report.config.smoothing_width)
    files += [f"curves/{p.name}" for p in curve_files]
    if dump_operators and report.config.spec.model != "fermi_hubbard":
        H, proj = build_model(report.config.spec)
        dump_json(
            {
                "schema_version": SCHEMA_VERSION,
                "kind": "operators",
                "hamiltonian": _operator_to_json(H),
                "projectors": {
                    str(l): _operator_to_json(p)
                    for l, p in zip(proj.labels, proj.projectors)
                },
            },
            out / "operators.json",
        )
        files.append("operators.json")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "run_report",
        "label": report.config.run_label,
        "model": report.config.spec.model,
        "L": report.config.spec.L,
        "n_realizations": report.config.n_realizations,
        "files": sorted(files),
        "timings": {k: round(v, 3) for k, v in report.timings.items()},
    }
    dump_json(doc, out / "report.json")
    return doc
