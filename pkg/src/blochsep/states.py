"""Example state families and seeded random ensembles.

Every generator is a deterministic function of its parameters and seed.
``seed`` may be anything ``numpy.random.default_rng`` accepts, including a
``Generator`` (consumed in place) or a sequence such as ``(master, k)``,
which is how ensembles give sample ``k`` its own independent stream.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from . import matcore
from .bloch import BlochForm, from_bloch, to_bloch
from .matcore import DensityMatrix

MEASURES = ("ginibre", "bloch-rejection")
#: a draw counts as PPT when its partial transpose has min eigenvalue >= -PPT_ACCEPT_TOL
PPT_ACCEPT_TOL = 1e-10


def sample_seed(master_seed: int, index: int) -> list[int]:
    """Seed of sample ``index`` in an ensemble; independent of worker layout."""
    return [int(master_seed), int(index)]


def _rng(seed):
    return np.random.default_rng(seed)


def basis_ket(D: int, a: int) -> np.ndarray:
    e = np.zeros(D, dtype=complex)
    e[a] = 1.0
    return e


def projector(ket) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def flip_operator(D: int) -> np.ndarray:
    """Swap ``V|a>|b> = |b>|a>`` on ``C^D (x) C^D``."""
    if D < 2:
        raise ValueError("D must be >= 2")
    V = np.zeros((D * D, D * D))
    for i in range(D):
        for j in range(D):
            V[i * D + j, j * D + i] = 1.0
    return V


def maximally_entangled(D: int) -> np.ndarray:
    return np.eye(D).reshape(-1).astype(complex) / np.sqrt(D)


def maximally_mixed(M: int, N: int) -> DensityMatrix:
    return DensityMatrix(np.eye(M * N) / (M * N), M, N)


def werner(D: int, phi: float) -> DensityMatrix:
    """U (x) U invariant state; separable iff ``phi >= 0``."""
    if D < 2:
        raise ValueError("D must be >= 2")
    if not -1.0 <= phi <= 1.0:
        raise ValueError(f"phi must lie in [-1, 1], got {phi}")
    mat = ((D - phi) * np.eye(D * D) + (D * phi - 1) * flip_operator(D)) / (D**3 - D)
    return DensityMatrix(mat, D, D)


def werner_from_p(p: float) -> DensityMatrix:
    """Two-qubit Werner state ``(1-p) I/4 + p |psi-><psi-|``."""
    return werner(2, (1 - 3 * p) / 2)


def isotropic(D: int, p: float) -> DensityMatrix:
    """``(1-p) I / D^2 + p |Psi><Psi|``; separable iff ``p <= 1/(D+1)``.

    Physical for ``-1/(D^2-1) <= p <= 1``.
    """
    if D < 2:
        raise ValueError("D must be >= 2")
    if not -1.0 / (D * D - 1) - 1e-15 <= p <= 1.0:
        raise ValueError(f"p = {p} gives a non-positive matrix for D = {D}")
    mat = (1 - p) / D**2 * np.eye(D * D) + p * projector(maximally_entangled(D))
    return DensityMatrix(mat, D, D)


def bennett_kets() -> list[np.ndarray]:
    """The five 'Tiles' product vectors of the 3x3 unextendible product basis."""
    e0, e1, e2 = (basis_ket(3, a) for a in range(3))
    s2 = np.sqrt(2)
    return [
        np.kron(e0, (e0 - e1) / s2),
        np.kron((e0 - e1) / s2, e2),
        np.kron(e2, (e1 - e2) / s2),
        np.kron((e1 - e2) / s2, e0),
        np.kron(e0 + e1 + e2, e0 + e1 + e2) / 3,
    ]


def bennett_tiles() -> DensityMatrix:
    """Bound entangled 3x3 state: normalised projector onto the complement of the UPB."""
    mat = np.eye(9) - sum(projector(k) for k in bennett_kets())
    return DensityMatrix(mat / 4, 3, 3)


def example2(p: float, sign: str = "+") -> DensityMatrix:
    """``p |psi+-><psi+-| + (1-p) |00><00|``; separable iff ``p = 0``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    e0, e1 = basis_ket(2, 0), basis_ket(2, 1)
    psi = (np.kron(e0, e1) + (1 if sign == "+" else -1) * np.kron(e1, e0)) / np.sqrt(2)
    mat = p * projector(psi) + (1 - p) * projector(np.kron(e0, e0))
    return DensityMatrix(mat, 2, 2)


def bell_states() -> dict[str, np.ndarray]:
    e0, e1 = basis_ket(2, 0), basis_ket(2, 1)
    s2 = np.sqrt(2)
    return {
        "psi-": (np.kron(e0, e1) - np.kron(e1, e0)) / s2,
        "psi+": (np.kron(e0, e1) + np.kron(e1, e0)) / s2,
        "phi+": (np.kron(e0, e0) + np.kron(e1, e1)) / s2,
        "phi-": (np.kron(e0, e0) - np.kron(e1, e1)) / s2,
    }


def bell_diagonal(q) -> DensityMatrix:
    """Mixture of the Bell states in the order (psi-, psi+, phi+, phi-)."""
    q = np.asarray(q, dtype=float)
    if q.shape != (4,) or np.any(q < 0) or abs(q.sum() - 1) > 1e-12:
        raise ValueError(f"q must be a probability vector of length 4, got {q}")
    mat = sum(w * projector(k) for w, k in zip(q, bell_states().values()))
    return DensityMatrix(mat, 2, 2)


def random_unitary(D: int, seed=None) -> np.ndarray:
    """Haar-random unitary."""
    return unitary_group.rvs(D, random_state=_rng(seed))


def random_ket(D: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    v = rng.standard_normal(D) + 1j * rng.standard_normal(D)
    return v / np.linalg.norm(v)


def random_state(M: int, N: int, seed=None, rank: int | None = None) -> DensityMatrix:
    """``G G^dagger / Tr(G G^dagger)`` with complex Gaussian ``G``.

    ``rank=None`` uses a square ``G`` (Hilbert-Schmidt measure); a smaller
    ``rank`` gives the induced measure of that rank.
    """
    if M < 2 or N < 2:
        raise ValueError("local dimensions must be >= 2")
    rng = _rng(seed)
    D = M * N
    k = D if rank is None else int(rank)
    x = rng.standard_normal((2, D, k))
    G = x[0] + 1j * x[1]
    rho = G @ G.conj().T
    return DensityMatrix(rho / np.trace(rho).real, M, N)


def random_pure_state(M: int, N: int, seed=None) -> DensityMatrix:
    return DensityMatrix(projector(random_ket(M * N, seed)), M, N)


def random_separable_state(M: int, N: int, seed=None, terms: int | None = None) -> DensityMatrix:
    """Random convex mixture of random pure product states."""
    rng = _rng(seed)
    k = terms if terms is not None else int(rng.integers(1, 2 * M * N + 1))
    w = rng.dirichlet(np.ones(k))
    mat = sum(
        wi * projector(np.kron(random_ket(M, rng), random_ket(N, rng))) for wi in w
    )
    return DensityMatrix(mat, M, N)


def _purity_radius(M, N):
    return np.sqrt(M * N - 1)


def _entangled_direction(M, N, rng) -> np.ndarray:
    """Correlation matrix of an equal mixture of orthogonal maximally
    entangled states; its marginals are maximally mixed.  Needs one local
    dimension to divide the other."""
    from .bloch import to_bloch

    small, big = min(M, N), max(M, N)
    if big % small:
        raise ValueError(f"entangled directions need min(M, N) to divide max(M, N), got {M}x{N}")
    F = unitary_group.rvs(big, random_state=rng)
    U = unitary_group.rvs(small, random_state=rng)
    mat = np.zeros((M * N, M * N), dtype=complex)
    for k in range(big // small):
        cols = F[:, k * small:(k + 1) * small]
        # |Phi_k> = sum_a U|a> (x) |f_{k,a}> / sqrt(small)
        phi = sum(np.kron(U[:, a], cols[:, a]) for a in range(small)) / np.sqrt(small)
        if M > N:
            phi = phi.reshape(N, M).T.reshape(-1)
        mat += projector(phi)
    mat /= big // small
    return to_bloch(mat, dims=(M, N)).T


def random_bloch_state(M: int, N: int, seed=None, *, maximally_mixed_marginals: bool = False,
                       direction: str = "gaussian", max_tries: int = 100_000) -> DensityMatrix:
    """Rejection sampler in Bloch space.

    Draws a direction for ``(r, s, T)`` (``T`` only when
    ``maximally_mixed_marginals``), scales it to a radius uniform on
    ``[0, R]``, and accepts the first positive matrix.  ``R`` is the largest
    radius compatible with ``Tr rho^2 <= 1``.

    ``direction="gaussian"`` draws i.i.d. normal coefficients.
    ``direction="entangled"`` takes ``T`` from a random mixture of orthogonal
    maximally entangled states (implies maximally mixed marginals), which
    reaches the strongly correlated region the Gaussian draw almost never
    visits.
    """
    if direction not in ("gaussian", "entangled"):
        raise ValueError(f"unknown direction {direction!r}")
    rng = _rng(seed)
    R = _purity_radius(M, N)
    zero_marg = maximally_mixed_marginals or direction == "entangled"
    for _ in range(max_tries):
        r = np.zeros(M * M - 1) if zero_marg else rng.standard_normal(M * M - 1)
        s = np.zeros(N * N - 1) if zero_marg else rng.standard_normal(N * N - 1)
        if direction == "gaussian":
            T = rng.standard_normal((M * M - 1, N * N - 1))
        else:
            T = _entangled_direction(M, N, rng)
        # purity-weighted norm: MN Tr(rho^2) - 1
        q = np.sqrt(2 / M * r @ r + 2 / N * s @ s + 4 / (M * N) * np.sum(T * T))
        t = rng.uniform(0, R) / q
        mat = from_bloch(BlochForm(M, N, t * r, t * s, t * T))
        if np.linalg.eigvalsh(mat)[0] >= 0:
            return DensityMatrix(mat, M, N)
    raise RuntimeError(f"no positive matrix after {max_tries} Bloch-space draws")


def random_state_measure(M: int, N: int, seed=None, measure: str = "ginibre") -> DensityMatrix:
    if measure == "ginibre":
        return random_state(M, N, seed)
    if measure == "bloch-rejection":
        return random_bloch_state(M, N, seed)
    raise ValueError(f"unknown measure {measure!r}; expected one of {MEASURES}")


class TriesExhausted(RuntimeError):
    pass


_PPT_BATCH = 256


def _ginibre_ppt(M, N, rng, max_tries):
    # Same draws as repeated random_state calls: each sample consumes one
    # contiguous (2, D, D) block of the stream.
    D = M * N
    tries = 0
    while tries < max_tries:
        b = min(_PPT_BATCH, max_tries - tries)
        x = rng.standard_normal((b, 2, D, D))
        G = x[:, 0] + 1j * x[:, 1]
        R = G @ G.conj().transpose(0, 2, 1)
        R /= np.trace(R, axis1=1, axis2=2).real[:, None, None]
        pt = R.reshape(b, M, N, M, N).transpose(0, 1, 4, 3, 2).reshape(b, D, D)
        ok = np.flatnonzero(np.linalg.eigvalsh(pt)[:, 0] >= -PPT_ACCEPT_TOL)
        if ok.size:
            i = int(ok[0])
            return DensityMatrix(R[i], M, N), tries + i + 1
        tries += b
    raise TriesExhausted(f"no PPT state in {max_tries} draws")


def random_ppt_state(M: int, N: int, seed=None, max_tries: int = 1000,
                     measure: str = "ginibre", return_tries: bool = False):
    """First PPT draw from the seeded stream.

    Raises ``TriesExhausted`` after ``max_tries`` rejections.  With
    ``return_tries`` the number of draws used is returned as well.
    """
    rng = _rng(seed)
    if measure == "ginibre":
        rho, tries = _ginibre_ppt(M, N, rng, max_tries)
        return (rho, tries) if return_tries else rho
    for tries in range(1, max_tries + 1):
        rho = random_state_measure(M, N, rng, measure)
        if matcore.min_eigenvalue(matcore.partial_transpose(rho)) >= -PPT_ACCEPT_TOL:
            return (rho, tries) if return_tries else rho
    raise TriesExhausted(f"no PPT state in {max_tries} draws")


def local_unitary(rho: DensityMatrix, UA, UB) -> DensityMatrix:
    U = np.kron(UA, UB)
    return DensityMatrix(U @ rho.mat @ U.conj().T, rho.dimA, rho.dimB)
