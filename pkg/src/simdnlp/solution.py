"""Self-describing text format for solution files.

One ``meta`` line per scalar, one ``block`` header per named value array
followed by its rows.  Values use repr-level precision so round-trips are
exact, which downstream checks (e.g. recomputing the complementarity
violation from a written solution) rely on.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

_HEADER = "# simdnlp solution v1"


def write_solution(path, blocks: dict[str, np.ndarray], meta: dict[str, object]) -> None:
    lines = [_HEADER]
    for key, value in meta.items():
        lines.append(f"meta {key} {value}")
    for name, arr in blocks.items():
        arr = np.asarray(arr, dtype=np.float64)
        dims = " ".join(str(d) for d in arr.shape)
        lines.append(f"block {name} {dims}")
        rows = arr.reshape(arr.shape[0], -1) if arr.ndim > 1 else arr.reshape(1, -1)
        for row in rows:
            lines.append(" ".join("%.17g" % v for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_solution(path) -> tuple[dict[str, str], dict[str, np.ndarray]]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != _HEADER:
        raise ValueError(f"{path}: not a simdnlp solution file")
    meta: dict[str, str] = {}
    blocks: dict[str, np.ndarray] = {}
    i = 1
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line or line.startswith("#"):
            continue
        if line.startswith("meta "):
            _, key, value = line.split(" ", 2)
            meta[key] = value
            continue
        if line.startswith("block "):
            parts = line.split()
            name = parts[1]
            shape = tuple(int(d) for d in parts[2:])
            n_rows = shape[0] if len(shape) > 1 else 1
            values = []
            for _ in range(n_rows):
                values.extend(float(tok) for tok in lines[i].split())
                i += 1
            blocks[name] = np.array(values).reshape(shape)
            continue
        raise ValueError(f"{path}: unexpected line {line!r}")
    return meta, blocks
