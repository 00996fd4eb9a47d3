"""Command-line entry points.

Verbs: xsff (spectra through constraints), bootstrap (solver on saved
constraints), pipeline (full chain), verify (fixture match), oracle
(plateau time-average cross-check), fixtures list.

Exit codes: 0 success, 2 no bootstrap solution, 3 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import fixtures as fixture_db
from .bootstrap import BootstrapOptions, NoSolution, run_bootstrap
from .groupalg import dual_map
from .models import BadSpec, HamiltonianSpec, build_model
from .oracles import oracle_plateau
from .pipeline import (
    ConfigError,
    MatchReport,
    bootstrap_result_to_json,
    config_from_json,
    constraints_to_json,
    export_run,
    run_pipeline,
    solution_to_json,
    verify_against_fixture,
)
from .serialize import dump_json, load_json
from .spectral import NumericalConstraints, diagonalize, plateau_exact, sector_weights


def _load_config(path, seed=None):
    doc = load_json(path)
    if seed is not None:
        doc.setdefault("model", {})["rng_seed"] = seed
    return config_from_json(doc)


def _cmd_pipeline(args) -> int:
    config = _load_config(args.config, args.seed)
    report = run_pipeline(config, threads=args.threads)
    doc = export_run(report, args.out, dump_operators=args.dump_operators or config.dump_operators)
    print(f"wrote {', '.join(doc['files'])} to {args.out}")
    if report.bootstrap is not None:
        res = report.bootstrap
        if res.linear_rank is not None:
            print(f"linear branch: rank {res.linear_rank}, {len(res.linear)} solution(s)")
        if res.corep_rank is not None:
            print(f"corep branch: rank {res.corep_rank}, {len(res.corep)} solution(s)")
        if res.projective is not None:
            print("no linear/corep solution: projective representation suspected")
    return 0


def _cmd_xsff(args) -> int:
    config = _load_config(args.config, args.seed)
    config.run_bootstrap_stage = False
    report = run_pipeline(config, threads=args.threads)
    doc = export_run(report, args.out, dump_operators=args.dump_operators)
    print(f"wrote {', '.join(doc['files'])} to {args.out}")
    return 0


def _constraints_from_json(doc: dict, config) -> NumericalConstraints:
    _, proj = build_model(config.spec)
    return NumericalConstraints(
        classes=[tuple(c) for c in doc["classes"]],
        edges=frozenset(tuple(e) for e in doc["edges"]),
        class_mult_free=list(doc["class_mult_free"]),
        class_higher=list(doc["class_higher"]),
        class_ratio=list(doc["class_ratio"]),
        dims=np.array(doc["dims"], dtype=int),
        n_ring=proj.rep,
        n_dual=proj.dual,
        n_order=doc.get("unitary_subgroup_order"),
        labels=doc.get("labels"),
    )


def _cmd_bootstrap(args) -> int:
    config = _load_config(args.config, args.seed)
    constraints = _constraints_from_json(load_json(args.constraints), config)
    try:
        result = run_bootstrap(constraints, constraints.n_ring, config.bootstrap)
    except NoSolution as err:
        print(f"no solution: {err}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dump_json(bootstrap_result_to_json(result), out / "solutions.json")
    print(f"wrote solutions.json to {out}")
    return 0


def _cmd_verify(args) -> int:
    doc = load_json(args.solution)
    sols = []
    if doc.get("kind") == "bootstrap_result":
        sols = doc.get("linear", []) + doc.get("corep", [])
    elif doc.get("kind") == "bootstrap_solution":
        sols = [doc]
    from .serialize import branching_from_json, complex_matrix_from_json, fusion_from_sparse
    from .bootstrap import BootstrapSolution
    from .groupalg import CharacterTable, RepTheory

    for sdoc in sols:
        rank = sdoc["rank"]
        table = None
        if "characters" in sdoc:
            table = CharacterTable(
                entries=complex_matrix_from_json(sdoc["characters"]),
                class_sizes=np.array(sdoc["class_sizes"], dtype=int),
            )
        ring = None
        if "dims" in sdoc:
            ring = RepTheory(
                dims=np.array(sdoc["dims"], dtype=int),
                fusion=fusion_from_sparse(sdoc["fusion"], rank),
            )
        sol = BootstrapSolution(
            rank=rank,
            branching=branching_from_json(sdoc["branching"]),
            ring=ring,
            table=table,
            branch=sdoc["branch"],
            group_order=sdoc.get("group_order"),
            corep_subset=tuple(sdoc["corep_subset"]) if "corep_subset" in sdoc else None,
        )
        report = verify_against_fixture(sol, args.fixture)
        status = "MATCH" if report.matched else "MISMATCH"
        print(f"{status}: fixture {args.fixture}" + ("" if report.matched else f" ({'; '.join(report.reasons)})"))
        if report.matched:
            return 0
    return 0 if not sols else 1


def _cmd_oracle(args) -> int:
    rng = np.random.default_rng(args.seed)
    a = rng.normal(size=(args.dim, args.dim)) + 1j * rng.normal(size=(args.dim, args.dim))
    H = (a + a.conj().T) / 2
    from .models import ProjectorSet
    from .fixtures import trivial_ring

    q, _ = np.linalg.qr(rng.normal(size=(args.dim, args.dim)))
    split = args.dim // 2
    p0 = q[:, :split] @ q[:, :split].conj().T
    p1 = q[:, split:] @ q[:, split:].conj().T
    ring = trivial_ring()
    proj = ProjectorSet(
        labels=["a", "b"],
        projectors=[p0, p1],
        dims=np.array([1, 1]),
        rep=ring,
        dual=dual_map(ring),
    )
    spectral = diagonalize(H)
    weights = sector_weights(spectral, proj)
    for pair in [(0, 0), (0, 1), (1, 1)]:
        exact = plateau_exact(weights, spectral.energies, pair[0], pair[1], 1, 1)
        est = oracle_plateau(H, proj, pair)
        rel = abs(est - exact) / max(abs(exact), 1e-12)
        print(f"pair {pair}: exact {exact:.6f}, windowed {est:.6f}, rel dev {rel:.2e}")
    return 0


def _cmd_fixtures(args) -> int:
    if args.action == "list":
        for name in fixture_db.list_fixtures():
            fx = fixture_db.get_fixture(name)
            tags = f" [{', '.join(fx.tags)}]" if fx.tags else ""
            print(
                f"{name}: branch {fx.branch}, rank {fx.rank}, order {fx.group_order}, "
                f"dims {fx.table.dims.tolist()}{tags} -- {fx.provenance}"
            )
        return 0
    raise ConfigError(f"unknown fixtures action {args.action!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symboot",
        description="Cross spectral form factors and finite-group symmetry bootstrap",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="pipeline config JSON")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the base seed")
        p.add_argument("--threads", type=int, default=1, help="realization thread pool size")
        p.add_argument("--dump-operators", action="store_true", help="dump H and projectors")

    p = sub.add_parser("pipeline", help="full model -> ED -> constraints -> bootstrap run")
    common(p)
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("xsff", help="spectra, plateaus, and constraints only")
    common(p)
    p.set_defaults(func=_cmd_xsff)

    p = sub.add_parser("bootstrap", help="run the solver on saved constraints JSON")
    common(p)
    p.add_argument("--constraints", required=True, help="NumericalConstraints JSON")
    p.set_defaults(func=_cmd_bootstrap)

    p = sub.add_parser("verify", help="match a solutions JSON against a fixture")
    p.add_argument("--solution", required=True)
    p.add_argument("--fixture", required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("oracle", help="compare exact plateaus to the windowed average")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=32)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("fixtures", help="fixture database utilities")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=_cmd_fixtures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, BadSpec, FileNotFoundError, KeyError) as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 3
    except NoSolution as err:
        print(f"no solution: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
