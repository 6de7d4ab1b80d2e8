"""JSON state files.

A state file is ``{"M": int, "N": int, "rows": [[[re, im], ...], ...]}``
with rows in the ``a*N + b`` basis order.  Floats are written with
``repr`` so a file reloads to the identical matrix.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .bloch import GeneratorBasis
from .matcore import DensityMatrix, is_density

DEFAULT_FILE_TOL = 1e-8


def default_tol() -> float:
    """File validation tolerance, overridable through ``BLOCHSEP_TOL``."""
    raw = os.environ.get("BLOCHSEP_TOL")
    if raw is None:
        return DEFAULT_FILE_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise ValueError(f"BLOCHSEP_TOL={raw!r} is not a number") from None
    if not tol > 0:
        raise ValueError("BLOCHSEP_TOL must be positive")
    return tol


def complex_rows(mat) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat, dtype=complex)]


def parse_complex_rows(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("rows must be a nested array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_dict(rho: DensityMatrix) -> dict:
    return {"M": rho.dimA, "N": rho.dimB, "rows": complex_rows(rho.mat)}


def state_from_dict(data: dict, tol: float | None = None) -> DensityMatrix:
    try:
        M, N = int(data["M"]), int(data["N"])
        mat = parse_complex_rows(data["rows"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed state file: {exc}") from None
    tol = default_tol() if tol is None else tol
    ok, diag = is_density(mat, M, N, tol=tol)
    if not ok:
        raise ValueError(f"state file does not hold a density matrix: {diag['reason']}")
    return DensityMatrix(mat, M, N, tol=tol)


def dump_state(rho: DensityMatrix, path=None) -> str:
    text = json.dumps(state_to_dict(rho))
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def load_state(path, tol: float | None = None) -> DensityMatrix:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from None
    return state_from_dict(data, tol)


def basis_to_dict(basis: GeneratorBasis) -> dict:
    return {
        "N": basis.dim,
        "ordering": basis.ordering,
        "labels": list(basis.labels),
        "generators": [complex_rows(g) for g in basis.generators],
    }
