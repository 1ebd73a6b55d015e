"""Vector files: JSONL rows plus a ``.meta.json`` sidecar.

Dense rows are ``{"unit_id": ..., "values": [...]}``; sparse rows are
``{"unit_id": ..., "pairs": [[index, count], ...]}``. The sidecar carries the
dimension, the producing stage's config, and for N-gram vectors the
vocabulary with its document-frequency table.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp

VECTOR_SCHEMA = 1


@dataclass
class VectorSet:
    unit_ids: list[str]
    matrix: Union[np.ndarray, sp.csr_matrix]
    meta: dict = field(default_factory=dict)

    @property
    def sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def __len__(self) -> int:
        return len(self.unit_ids)


def meta_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def _num(x: float):
    # integral values print without a trailing .0 so counts stay readable
    return int(x) if float(x).is_integer() and abs(x) < 2**53 else float(x)


def save_vectors(path, unit_ids: Sequence[str], matrix, meta: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sparse = sp.issparse(matrix)
    if matrix.shape[0] != len(unit_ids):
        raise ValueError("row count does not match unit ids")
    with path.open("w", encoding="utf-8") as fh:
        if sparse:
            m = sp.csr_matrix(matrix)
            m.sort_indices()
            for r, uid in enumerate(unit_ids):
                lo, hi = m.indptr[r], m.indptr[r + 1]
                pairs = [[int(i), _num(v)] for i, v in zip(m.indices[lo:hi], m.data[lo:hi]) if v != 0]
                fh.write(json.dumps({"unit_id": uid, "pairs": pairs}, separators=(",", ":")) + "\n")
        else:
            for uid, row in zip(unit_ids, np.asarray(matrix)):
                fh.write(json.dumps({"unit_id": uid, "values": [_num(v) for v in row]},
                                    separators=(",", ":")) + "\n")
    full = {"schema_version": VECTOR_SCHEMA, "sparse": sparse, "dimension": int(matrix.shape[1]),
            "rows": len(unit_ids), **meta}
    meta_path(path).write_text(json.dumps(full, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_vectors(path) -> VectorSet:
    path = Path(path)
    meta = json.loads(meta_path(path).read_text(encoding="utf-8"))
    if meta.get("schema_version") != VECTOR_SCHEMA:
        raise ValueError(f"unsupported vector schema {meta.get('schema_version')!r}")
    dim = meta["dimension"]
    ids: list[str] = []
    if meta["sparse"]:
        indptr, indices, data = [0], [], []
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                rec = json.loads(line)
                ids.append(rec["unit_id"])
                for i, v in rec["pairs"]:
                    indices.append(i)
                    data.append(v)
                indptr.append(len(indices))
        matrix = sp.csr_matrix((np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int64),
                                np.asarray(indptr, dtype=np.int64)), shape=(len(ids), dim))
    else:
        rows = []
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                rec = json.loads(line)
                ids.append(rec["unit_id"])
                rows.append(rec["values"])
        matrix = np.asarray(rows, dtype=np.float64).reshape(len(ids), dim)
    return VectorSet(ids, matrix, meta)
