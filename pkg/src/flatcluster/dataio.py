"""Dataset and result serialization: JSON datasets, CSV midpoint dumps,
JSONL verification records.

Byte determinism is a contract here: numbers are written as the shortest
decimal that round-trips the 64-bit float (Python's repr), keys in a
fixed order, so equal inputs always serialize to equal bytes and a
read-write cycle reproduces the original file exactly.

Content problems (bad JSON, missing fields, wrong lengths) raise
DataFormatError; plain I/O failures surface as OSError. The two map to
different CLI exit codes.
"""

from __future__ import annotations

import csv
import json
from typing import Any, Sequence

import numpy as np

from .errors import DataFormatError
from .geometry import Flat
from .clustering import Clustering
from .pairwise import PairProjection

FORMAT_VERSION = 1

# metadata keys always emitted first, in this order; extras follow sorted
_META_HEAD = ("seed", "sigma", "centers", "format_version")


def _pyfloat_list(vec) -> list[float]:
    return [float(v) for v in np.asarray(vec, dtype=np.float64)]


def _pyfloat_rows(mat) -> list[list[float]]:
    return [_pyfloat_list(row) for row in np.asarray(mat, dtype=np.float64)]


def _jsonify(value: Any) -> Any:
    """Recursively reduce numpy scalars/arrays to plain Python types."""
    if isinstance(value, np.ndarray):
        return _jsonify(value.tolist())
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)) and not isinstance(value, bool):
        return int(value)
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    return value


def _dump_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=1)
        fh.write("\n")


def write_dataset(
    path: str,
    flats: Sequence[Flat],
    labels: Sequence[int | None] | None = None,
    metadata: dict | None = None,
) -> None:
    """Write flats (+ optional per-flat labels) as a dataset file.

    metadata must carry seed / sigma / centers when known; format_version
    is filled in if absent. Unknown metadata keys are preserved, emitted
    after the standard ones in sorted order so rewrites stay byte-stable.
    """
    if not flats:
        raise DataFormatError("refusing to write a dataset with no flats")
    d = flats[0].d
    if labels is None:
        labels = [None] * len(flats)
    if len(labels) != len(flats):
        raise DataFormatError("one label (or None) per flat required")
    meta = dict(metadata or {})
    meta.setdefault("seed", None)
    meta.setdefault("sigma", None)
    meta.setdefault("centers", None)
    meta.setdefault("format_version", FORMAT_VERSION)
    if meta["format_version"] != FORMAT_VERSION:
        raise DataFormatError(f"unsupported format_version {meta['format_version']}")
    meta_out = {key: _jsonify(meta[key]) for key in _META_HEAD}
    for key in sorted(k for k in meta if k not in _META_HEAD):
        meta_out[key] = _jsonify(meta[key])
    payload = {
        "d": int(d),
        "k": int(max(f.k for f in flats)),
        "flats": [
            {
                "base": _pyfloat_list(f.base),
                "dirs": _pyfloat_rows(f.directions),
                "label": None if lab is None else int(lab),
            }
            for f, lab in zip(flats, labels)
        ],
        "metadata": meta_out,
    }
    _dump_json(path, payload)


def read_dataset(path: str) -> tuple[list[Flat], list[int | None], dict]:
    """Load a dataset file; inverse of write_dataset."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise DataFormatError("top level must be a JSON object")
    try:
        d = int(raw["d"])
        k_max = int(raw["k"])
        entries = raw["flats"]
        meta = raw["metadata"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"missing or malformed field: {exc}") from exc
    if not isinstance(meta, dict) or meta.get("format_version") != FORMAT_VERSION:
        raise DataFormatError("missing or unsupported format_version")
    if not isinstance(entries, list) or not entries:
        raise DataFormatError("flats must be a non-empty list")
    flats: list[Flat] = []
    labels: list[int | None] = []
    for pos, entry in enumerate(entries):
        try:
            base = np.asarray(entry["base"], dtype=np.float64)
            dirs = np.asarray(entry["dirs"], dtype=np.float64)
            label = entry.get("label")
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"flat {pos}: {exc}") from exc
        if base.shape != (d,):
            raise DataFormatError(f"flat {pos}: base length {base.shape} != d={d}")
        if dirs.ndim != 2 or dirs.shape[1] != d or not 1 <= dirs.shape[0] <= k_max:
            raise DataFormatError(
                f"flat {pos}: dirs must be (k, {d}) with 1 <= k <= {k_max}")
        try:
            flats.append(Flat(base, dirs))
        except Exception as exc:
            raise DataFormatError(f"flat {pos}: {exc}") from exc
        labels.append(None if label is None else int(label))
    return flats, labels, dict(meta)


def write_midpoints_csv(
    path: str,
    results: Sequence[PairProjection],
    accept_threshold: float,
    d: int,
) -> None:
    """Per-pair dump: i, j, distance, accepted(0/1), midpoint coordinates.

    Rows are written in the order given (all_pairs supplies lexicographic
    (i, j)); formatting is shortest round-trip decimal, RFC-4180 line
    endings."""
    header = ["i", "j", "distance", "accepted"] + [f"m_{c + 1}" for c in range(d)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for p in results:
            row = [
                str(int(p.i)),
                str(int(p.j)),
                repr(float(p.distance)),
                "1" if p.distance <= accept_threshold else "0",
            ]
            row.extend(repr(float(v)) for v in p.midpoint)
            writer.writerow(row)


def clustering_payload(result: Clustering) -> dict:
    return {
        "clusters": [
            {
                "members": [int(m) for m in c.members],
                "size": int(c.size),
                "center": _pyfloat_list(c.center),
                "midpoints": _pyfloat_rows(c.midpoints),
            }
            for c in result.clusters
        ],
        "unassigned": [int(u) for u in result.unassigned],
        "accepted_pairs": int(result.accepted_pairs),
        "rejected_pairs": int(result.rejected_pairs),
    }


def write_result(
    path: str,
    result: Clustering,
    parameters: dict,
    n_flats: int,
    midpoints_csv: str | None = None,
) -> None:
    """Write a clustering outcome with its parameter echo and an optional
    reference to the per-pair CSV dump."""
    for c in result.clusters:
        for m in c.members:
            if not 0 <= m < n_flats:
                raise DataFormatError(
                    f"cluster member index {m} outside dataset of {n_flats} flats")
    payload = {
        "format_version": FORMAT_VERSION,
        "parameters": _jsonify(parameters),
        **clustering_payload(result),
        "midpoints_csv": midpoints_csv,
    }
    _dump_json(path, payload)


def read_result(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or raw.get("format_version") != FORMAT_VERSION:
        raise DataFormatError("missing or unsupported format_version")
    return raw


def write_verification_records(path: str, records: Sequence[dict]) -> None:
    """One JSON object per line: {label, value, stderr, ci99, gate, pass}."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for rec in records:
            out = {
                "label": str(rec["label"]),
                "value": float(rec["value"]),
                "stderr": float(rec["stderr"]),
                "ci99": [float(rec["ci99"][0]), float(rec["ci99"][1])],
                "gate": str(rec["gate"]),
                "pass": bool(rec["pass"]),
            }
            fh.write(json.dumps(out, ensure_ascii=False))
            fh.write("\n")
