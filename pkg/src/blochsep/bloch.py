"""SU(N) generator bases and the Bloch (Fano) form of bipartite states.

A bipartite state is written as

    rho = (I + r_i l_i (x) I + s_j I (x) m_j + t_ij l_i (x) m_j) / (M N)

with ``l_i`` (``m_j``) the traceless Hermitian generators of SU(M) (SU(N))
normalised to ``Tr(l_i l_j) = 2 delta_ij``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .matcore import StateLike, _unpack

ORDERINGS = ("canonical", "gellmann3")

# canonical index of each Gell-Mann operator lambda_1..lambda_8:
# canonical SU(3) order is (w0, w1, u01, u02, u12, v01, v02, v12)
_GELLMANN3 = (2, 5, 0, 3, 6, 4, 7, 1)

IMAG_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class GeneratorBasis:
    dim: int
    generators: np.ndarray  # shape (dim**2 - 1, dim, dim), read-only
    ordering: str
    labels: tuple[str, ...]

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __getitem__(self, i):
        return self.generators[i]


def _pairs(N):
    return [(j, k) for j in range(N) for k in range(j + 1, N)]


@lru_cache(maxsize=None)
def generator_basis(N: int, ordering: str = "canonical") -> GeneratorBasis:
    """Generators of SU(N) built from the computational basis.

    ``canonical`` lists the diagonal ``w_l`` (l = 0..N-2), then the symmetric
    ``u_jk`` and the antisymmetric ``v_jk`` with ``j < k`` in lexicographic
    order.  ``gellmann3`` (N = 3 only) is the usual Gell-Mann numbering.
    Results are cached and immutable.
    """
    if int(N) != N or N < 2:
        raise ValueError(f"N must be an integer >= 2, got {N}")
    if ordering not in ORDERINGS:
        raise ValueError(f"unknown ordering {ordering!r}; expected one of {ORDERINGS}")
    if ordering == "gellmann3" and N != 3:
        raise ValueError("gellmann3 ordering is only defined for N = 3")

    gens, labels = [], []
    for l in range(N - 1):
        d = np.zeros(N)
        d[: l + 1] = 1.0
        d[l + 1] = -(l + 1)
        gens.append(np.sqrt(2.0 / ((l + 1) * (l + 2))) * np.diag(d).astype(complex))
        labels.append(f"w{l}")
    for j, k in _pairs(N):
        u = np.zeros((N, N), dtype=complex)
        u[j, k] = u[k, j] = 1.0
        gens.append(u)
        labels.append(f"u{j}{k}")
    for j, k in _pairs(N):
        v = np.zeros((N, N), dtype=complex)
        v[j, k] = -1j
        v[k, j] = 1j
        gens.append(v)
        labels.append(f"v{j}{k}")

    if ordering == "gellmann3":
        gens = [gens[i] for i in _GELLMANN3]
        labels = [labels[i] for i in _GELLMANN3]

    arr = np.array(gens)
    arr.setflags(write=False)
    return GeneratorBasis(N, arr, ordering, tuple(labels))


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """``l_i l_j = (2/N) delta_ij I + i f_ijk l_k + g_ijk l_k``."""

    dim: int
    f: np.ndarray
    g: np.ndarray


def structure_constants(basis: GeneratorBasis) -> StructureConstants:
    L = basis.generators
    triple = np.einsum("iab,jbc,kca->ijk", L, L, L)
    return StructureConstants(basis.dim, triple.imag / 2, triple.real / 2)


def algebra_residual(basis: GeneratorBasis, sc: StructureConstants) -> float:
    """Max entrywise error of the product rule over all generator pairs."""
    L = basis.generators
    N = basis.dim
    lhs = np.einsum("iab,jbc->ijac", L, L)
    rhs = (2.0 / N) * np.einsum("ij,ab->ijab", np.eye(len(L)), np.eye(N))
    rhs = rhs + np.einsum("ijk,kab->ijab", 1j * sc.f + sc.g, L)
    return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True, eq=False)
class BlochForm:
    dimA: int
    dimB: int
    r: np.ndarray
    s: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        M, N = self.dimA, self.dimB
        r = np.asarray(self.r, dtype=float).reshape(-1)
        s = np.asarray(self.s, dtype=float).reshape(-1)
        T = np.asarray(self.T, dtype=float)
        if r.shape != (M * M - 1,) or s.shape != (N * N - 1,) or T.shape != (M * M - 1, N * N - 1):
            raise ValueError(
                f"Bloch data shapes r{r.shape} s{s.shape} T{T.shape} inconsistent with {M}x{N}"
            )
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(s)) and np.all(np.isfinite(T))):
            raise ValueError("Bloch data must be finite")
        for name, val in (("r", r), ("s", s), ("T", T)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    def scaled(self, alpha: float) -> "BlochForm":
        """Bloch form of ``alpha * rho + (1 - alpha) * I / MN``."""
        return BlochForm(self.dimA, self.dimB, alpha * self.r, alpha * self.s, alpha * self.T)


def _bases(M, N, basisA, basisB):
    basisA = generator_basis(M) if basisA is None else basisA
    basisB = generator_basis(N) if basisB is None else basisB
    if basisA.dim != M or basisB.dim != N:
        raise ValueError(
            f"basis dimensions ({basisA.dim}, {basisB.dim}) do not match state dims ({M}, {N})"
        )
    return basisA, basisB


def _real(x, what):
    x = np.asarray(x)
    if np.max(np.abs(x.imag), initial=0.0) > IMAG_TOL:
        raise ValueError(f"{what} has an imaginary part; input is not Hermitian")
    return x.real.copy()


def to_bloch(rho: StateLike, basisA: GeneratorBasis | None = None,
             basisB: GeneratorBasis | None = None, dims=None) -> BlochForm:
    mat, M, N = _unpack(rho, dims)
    basisA, basisB = _bases(M, N, basisA, basisB)
    t = mat.reshape(M, N, M, N)
    LA, LB = basisA.generators, basisB.generators
    # Tr(rho X (x) Y) = sum rho[(a,b),(c,d)] X[c,a] Y[d,b]
    rhoA = np.einsum("abcb->ac", t)
    rhoB = np.einsum("abad->bd", t)
    r = (M / 2) * np.einsum("ac,ica->i", rhoA, LA)
    s = (N / 2) * np.einsum("bd,jdb->j", rhoB, LB)
    T = (M * N / 4) * np.einsum("abcd,ica,jdb->ij", t, LA, LB, optimize=True)
    return BlochForm(M, N, _real(r, "r"), _real(s, "s"), _real(T, "T"))


def from_bloch(b: BlochForm, basisA: GeneratorBasis | None = None,
               basisB: GeneratorBasis | None = None) -> np.ndarray:
    """Matrix of the Bloch form.  Hermitian with unit trace, but not
    necessarily positive semidefinite."""
    M, N = b.dimA, b.dimB
    basisA, basisB = _bases(M, N, basisA, basisB)
    LA, LB = basisA.generators, basisB.generators
    opA = np.eye(M) + np.einsum("i,iab->ab", b.r, LA)
    opB = np.einsum("j,jab->ab", b.s, LB)
    corr = np.einsum("ij,iab,jcd->acbd", b.T, LA, LB, optimize=True).reshape(M * N, M * N)
    out = np.kron(opA, np.eye(N)) + np.kron(np.eye(M), opB) + corr
    return out / (M * N)


def single_bloch(rho, basis: GeneratorBasis | None = None) -> np.ndarray:
    rho = np.asarray(rho)
    N = rho.shape[0]
    if rho.shape != (N, N):
        raise ValueError("expected a square matrix")
    if basis is None:
        basis = generator_basis(N)
    if basis.dim != N:
        raise ValueError(f"basis dimension {basis.dim} does not match matrix side {N}")
    return _real((N / 2) * np.einsum("ab,iba->i", rho, basis.generators), "r")


def single_from_bloch(r, basis: GeneratorBasis) -> np.ndarray:
    N = basis.dim
    return (np.eye(N) + np.einsum("i,iab->ab", np.asarray(r, dtype=float), basis.generators)) / N


def pure_state_constraints(r, sc: StructureConstants) -> tuple[float, float]:
    """Residuals of the two algebraic identities obeyed by pure-state Bloch
    vectors: ``|r| = sqrt(N(N-1)/2)`` and ``r_i r_j g_ijk = (N-2) r_k``."""
    r = np.asarray(r, dtype=float)
    N = sc.dim
    if r.shape != (N * N - 1,):
        raise ValueError(f"vector length {r.shape} does not match SU({N})")
    norm_res = abs(np.linalg.norm(r) - np.sqrt(N * (N - 1) / 2))
    g_res = np.linalg.norm(np.einsum("i,j,ijk->k", r, r, sc.g) - (N - 2) * r)
    return float(norm_res), float(g_res)


def outer_radius(N: int) -> float:
    """Radius of the smallest ball containing every Bloch vector."""
    return np.sqrt(N * (N - 1) / 2)


def inner_radius(N: int) -> float:
    """Radius of the largest ball of Bloch vectors that are all valid states."""
    return np.sqrt(N / (2 * (N - 1)))
