"""Dense complex linear algebra for bipartite density matrices.

Basis convention throughout the package: the product ket ``|a>|b>`` of an
``M x N`` system lives at row ``a*N + b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

#: Singular values below RANK_RTOL * sigma_max count as zero for rank decisions.
RANK_RTOL = 1e-12


class SingularSystem(NamedTuple):
    """Thin SVD ``A = sum_i s_i u_i v_i^dagger`` with nonincreasing ``s``."""

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def rank(self, rtol: float = RANK_RTOL) -> int:
        s = self.singular_values
        if s.size == 0 or s[0] == 0:
            return 0
        return int(np.count_nonzero(s > rtol * s[0]))

    def reconstruct(self) -> np.ndarray:
        u, s, v = self.left_vectors, self.singular_values, self.right_vectors
        return (u * s) @ v.conj().T


@dataclass(frozen=True)
class DensityMatrix:
    """A validated bipartite state on ``C^M (x) C^N``.

    The matrix is copied, its anti-Hermitian rounding noise removed, and the
    copy is made read-only.
    """

    mat: np.ndarray
    dimA: int
    dimB: int
    tol: float = field(default=1e-9, compare=False, repr=False)

    def __post_init__(self):
        if self.dimA < 2 or self.dimB < 2:
            raise ValueError(f"local dimensions must be >= 2, got {(self.dimA, self.dimB)}")
        mat = np.array(self.mat, dtype=complex)
        ok, diag = is_density(mat, self.dimA, self.dimB, tol=self.tol)
        if not ok:
            raise ValueError(f"not a density matrix: {diag['reason']}")
        mat = 0.5 * (mat + mat.conj().T)
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def dims(self) -> tuple[int, int]:
        return self.dimA, self.dimB


StateLike = Union[DensityMatrix, np.ndarray]


def _unpack(rho: StateLike, dims=None) -> tuple[np.ndarray, int, int]:
    if isinstance(rho, DensityMatrix):
        return rho.mat, rho.dimA, rho.dimB
    mat = np.asarray(rho, dtype=complex)
    if dims is None:
        raise ValueError("dims=(M, N) is required for a bare array")
    M, N = dims
    if mat.shape != (M * N, M * N):
        raise ValueError(f"matrix shape {mat.shape} does not match dims {(M, N)}")
    return mat, M, N


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def _check_matrix(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def hermitian_eigenvalues(a, tol: float = 1e-9) -> np.ndarray:
    """Ascending real spectrum of a Hermitian matrix.

    Raises ``ValueError`` if ``a`` deviates from Hermitian by more than
    ``tol`` relative to its largest entry.
    """
    a = _check_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix is not square")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.conj().T)) > tol * scale:
        raise ValueError("matrix is not Hermitian")
    return np.linalg.eigvalsh(0.5 * (a + a.conj().T))


def svd(a) -> SingularSystem:
    a = _check_matrix(a)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return SingularSystem(s, u, vh.conj().T)


def ky_fan_norm(a) -> float:
    """Sum of all singular values (trace norm)."""
    a = _check_matrix(a)
    return float(np.linalg.svd(a, compute_uv=False).sum())


def partial_transpose(rho: StateLike, subsystem: str = "B", dims=None) -> np.ndarray:
    mat, M, N = _unpack(rho, dims)
    t = mat.reshape(M, N, M, N)
    if subsystem == "B":
        t = t.transpose(0, 3, 2, 1)
    elif subsystem == "A":
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return t.reshape(M * N, M * N)


def partial_trace(rho: StateLike, keep: str = "A", dims=None) -> np.ndarray:
    mat, M, N = _unpack(rho, dims)
    t = mat.reshape(M, N, M, N)
    if keep == "A":
        return np.einsum("ibjb->ij", t)
    if keep == "B":
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def realign(rho: StateLike, dims=None) -> np.ndarray:
    """Realigned matrix: ``out[i*M + j, k*N + l] = rho[i*N + k, j*N + l]``."""
    mat, M, N = _unpack(rho, dims)
    return mat.reshape(M, N, M, N).transpose(0, 2, 1, 3).reshape(M * M, N * N)


def min_eigenvalue(mat) -> float:
    return float(hermitian_eigenvalues(mat)[0])


def is_density(mat, M: int, N: int, tol: float = 1e-9) -> tuple[bool, dict]:
    """Check square side ``M*N``, Hermiticity, unit trace and PSD within ``tol``.

    The PSD test is relative: eigenvalues must be ``>= -tol * ||mat||_inf``.
    Returns ``(ok, diagnostics)``.
    """
    mat = np.asarray(mat)
    diag: dict = {"reason": "ok"}
    if M < 1 or N < 1 or mat.shape != (M * N, M * N):
        diag["reason"] = f"shape {mat.shape} is not ({M * N}, {M * N})"
        return False, diag
    if not np.all(np.isfinite(mat)):
        diag["reason"] = "non-finite entries"
        return False, diag
    herm_err = float(np.max(np.abs(mat - mat.conj().T)))
    diag["hermitian_error"] = herm_err
    if herm_err > tol:
        diag["reason"] = f"not Hermitian (max deviation {herm_err:.3g})"
        return False, diag
    trace = complex(np.trace(mat))
    diag["trace"] = trace.real
    if abs(trace - 1) > tol:
        diag["reason"] = f"trace {trace.real:.12g} != 1"
        return False, diag
    evals = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
    diag["min_eigenvalue"] = float(evals[0])
    if evals[0] < -tol * float(np.linalg.norm(mat, np.inf)):
        diag["reason"] = f"negative eigenvalue {evals[0]:.3g}"
        return False, diag
    return True, diag
