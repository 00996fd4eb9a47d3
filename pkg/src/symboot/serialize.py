"""JSON schema for the toolkit's data objects.

Schema conventions (documented in README.md):

* every document carries ``schema_version``,
* complex numbers are ``[re, im]`` pairs,
* fusion tensors are sparse quadruplet lists ``[i, j, k, value]`` sorted
  lexicographically,
* files are UTF-8 JSON with sorted keys and a trailing newline, so identical
  inputs produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .groupalg import BranchingMatrix, CharacterTable, RepTheory

SCHEMA_VERSION = 1


def _c(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def complex_matrix_to_json(m: np.ndarray) -> list:
    return [[_c(z) for z in row] for row in np.asarray(m, dtype=complex)]


def complex_matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def fusion_to_sparse(fusion: np.ndarray) -> list:
    out = []
    r = fusion.shape[0]
    for i in range(r):
        for j in range(r):
            for k in range(r):
                v = int(fusion[i, j, k])
                if v:
                    out.append([i, j, k, v])
    return out


def fusion_from_sparse(triplets, rank: int) -> np.ndarray:
    fusion = np.zeros((rank, rank, rank), dtype=int)
    for i, j, k, v in triplets:
        fusion[i, j, k] = v
    return fusion


def rep_to_json(ring: RepTheory) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "rep_theory",
        "rank": ring.rank,
        "dims": [int(d) for d in ring.dims],
        "fusion": fusion_to_sparse(ring.fusion),
    }
    if ring.characters is not None:
        doc["characters"] = complex_matrix_to_json(ring.characters)
    if ring.class_sizes is not None:
        doc["class_sizes"] = [int(s) for s in ring.class_sizes]
    if ring.group_order is not None:
        doc["group_order"] = int(ring.group_order)
    if ring.weight_divisors is not None:
        doc["weight_divisors"] = [int(m) for m in ring.weight_divisors]
    if ring.labels is not None:
        doc["labels"] = list(ring.labels)
    return doc


def rep_from_json(doc: dict) -> RepTheory:
    rank = int(doc["rank"])
    return RepTheory(
        dims=np.array(doc["dims"], dtype=int),
        fusion=fusion_from_sparse(doc["fusion"], rank),
        characters=(
            complex_matrix_from_json(doc["characters"]) if "characters" in doc else None
        ),
        class_sizes=(
            np.array(doc["class_sizes"], dtype=int) if "class_sizes" in doc else None
        ),
        group_order=doc.get("group_order"),
        weight_divisors=(
            np.array(doc["weight_divisors"], dtype=int)
            if "weight_divisors" in doc
            else None
        ),
        labels=doc.get("labels"),
    )


def table_to_json(table: CharacterTable) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "character_table",
        "entries": complex_matrix_to_json(table.entries),
        "class_sizes": [int(s) for s in table.class_sizes],
    }


def table_from_json(doc: dict) -> CharacterTable:
    return CharacterTable(
        entries=complex_matrix_from_json(doc["entries"]),
        class_sizes=np.array(doc["class_sizes"], dtype=int),
    )


def branching_to_json(B: BranchingMatrix) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "branching_matrix",
        "entries": [[int(v) for v in row] for row in B.b],
    }
    if B.row_labels is not None:
        doc["row_labels"] = [str(l) for l in B.row_labels]
    return doc


def branching_from_json(doc: dict) -> BranchingMatrix:
    return BranchingMatrix(
        b=np.array(doc["entries"], dtype=int), row_labels=doc.get("row_labels")
    )


def dump_json(doc: dict, path) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8", newline="\n")


def load_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
