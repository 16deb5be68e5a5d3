"""Synthetic vertically-split datasets and CSV round-tripping.

Row format: ``id,a_0..a_{nA-1},b_0..b_{nB-1},label`` with a header line.
Ground-truth weights are written alongside the CSV (``<stem>.weights.json``)
so tests can recover them with a closed-form fit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigInvalid, DatasetMissing, IoFailure


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


def gen_synthetic(
    path: str | Path,
    rows: int,
    n_a: int,
    n_b: int,
    kind: str = "linear",
    noise: float = 0.05,
    seed: int = 0,
) -> Path:
    """Write a synthetic dataset drawn from a known linear/logistic model."""
    if rows <= 0 or n_a <= 0 or n_b <= 0:
        raise ConfigInvalid("rows and feature counts must be positive")
    if kind not in ("linear", "logistic"):
        raise ConfigInvalid(f"unknown dataset kind {kind!r}")
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, (rows, n_a + n_b))
    w = rng.uniform(-1.0, 1.0, n_a + n_b)
    z = x @ w
    if kind == "linear":
        label = z + noise * rng.standard_normal(rows)
    else:
        label = (rng.uniform(0, 1, rows) < _sigmoid(4.0 * z)).astype(np.float64)

    path = Path(path)
    header = (
        "id,"
        + ",".join(f"a_{j}" for j in range(n_a))
        + ","
        + ",".join(f"b_{j}" for j in range(n_b))
        + ",label"
    )
    lines = [header]
    for i in range(rows):
        feats = ",".join(f"{v:.6f}" for v in x[i])
        lines.append(f"{i},{feats},{label[i]:.6f}")
    try:
        path.write_text("\n".join(lines) + "\n")
        weights_path = path.with_suffix(".weights.json")
        weights_path.write_text(
            json.dumps(
                {"kind": kind, "noise": noise, "n_a": n_a, "n_b": n_b,
                 "weights": [float(v) for v in w]},
                indent=2,
            )
            + "\n"
        )
    except OSError as exc:
        raise IoFailure(f"cannot write dataset: {exc}") from None
    return path


def load_dataset(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Read a dataset CSV; returns (ids, X_A, X_B, labels)."""
    path = Path(path)
    if not path.exists():
        raise DatasetMissing(f"no dataset at {path}")
    lines = path.read_text().strip().splitlines()
    if not lines:
        raise DatasetMissing(f"{path} is empty")
    header = lines[0].split(",")
    n_a = sum(1 for h in header if h.startswith("a_"))
    n_b = sum(1 for h in header if h.startswith("b_"))
    if header[0] != "id" or header[-1] != "label" or n_a == 0 or n_b == 0:
        raise DatasetMissing(f"{path} does not look like an id,a_*,b_*,label table")
    body = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    ids = body[:, 0].astype(np.int64)
    x_a = body[:, 1 : 1 + n_a]
    x_b = body[:, 1 + n_a : 1 + n_a + n_b]
    y = body[:, -1]
    return ids, x_a, x_b, y
