"""Report persistence: atomic writes, schema-versioned CSV/JSON, worker map.

Determinism contract: identical inputs (config + seed) produce bit-identical
files, independent of the worker count; floats are serialized with repr
(shortest round-trip) and aggregation is ordered by chunk index.
"""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

SCHEMA_VERSION = 1


def env_workers() -> int:
    try:
        return max(1, int(os.environ.get("DNLSLAB_WORKERS", "1")))
    except ValueError:
        return 1


def env_out_dir(default: str | Path) -> Path:
    return Path(os.environ.get("DNLSLAB_OUT_DIR", str(default)))


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def write_json_report(path: str | Path, payload: dict, config: dict) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "config": config, **payload}
    atomic_write_text(path, json.dumps(doc, sort_keys=True, indent=1) + "\n")


def _cell(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return repr(x)
    if isinstance(x, int) or type(x).__name__.startswith("int"):
        return repr(int(x))
    try:
        return repr(float(x))
    except (TypeError, ValueError):
        return repr(x)


def write_csv_report(
    path: str | Path, header: list[str], rows, config: dict | None = None
) -> None:
    """CSV with fixed header; resolved config embedded as one comment line."""
    buf = io.StringIO()
    if config is not None:
        buf.write("# config=" + canonical_json(config) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    atomic_write_text(path, buf.getvalue())


def chunked_map(fn, n_items: int, chunk: int, *args):
    """Apply fn(start, stop, *args) over fixed chunks; deterministic order.

    Results are returned as a list ordered by chunk index regardless of
    worker count (DNLSLAB_WORKERS).
    """
    spans = [(s, min(s + chunk, n_items)) for s in range(0, n_items, chunk)]
    workers = env_workers()
    if workers <= 1 or len(spans) <= 1:
        return [fn(s, e, *args) for s, e in spans]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futs = [pool.submit(fn, s, e, *args) for s, e in spans]
        return [f.result() for f in futs]
