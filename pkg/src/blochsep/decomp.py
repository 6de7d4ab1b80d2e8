"""Explicit separable decompositions for states passing a sufficient test.

Each constructive route first writes rho as a convex mixture of
"factors": states whose correlation matrix is ``T = r s^t`` and which are
therefore products ``rho_A (x) rho_B``.  Every factor is then split into
pure product terms by diagonalising its two reductions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import criteria, matcore
from .bloch import BlochForm, from_bloch, generator_basis, inner_radius, single_from_bloch, to_bloch
from .matcore import SingularSystem, StateLike

#: negative reduction eigenvalues above -CLAMP_TOL are rounding noise
CLAMP_TOL = 1e-9
#: terms with smaller weight are dropped
DROP_WEIGHT = 1e-14
#: singular triples with smaller singular value are skipped
SIGMA_TOL = 1e-12
#: residual above which a decomposition is rejected
VERIFY_TOL = 1e-9
PRODUCT_TOL = 1e-9


class ConditionNotSatisfied(ValueError):
    """The sufficient condition behind a decomposition route fails."""


class ReconstructionError(RuntimeError):
    """A constructed decomposition does not reproduce the state."""


@dataclass(frozen=True)
class ProductTerm:
    weight: float
    ketA: np.ndarray
    ketB: np.ndarray

    def projector(self) -> np.ndarray:
        a, b = self.ketA, self.ketB
        return np.kron(np.outer(a, a.conj()), np.outer(b, b.conj()))


@dataclass(frozen=True)
class Factor:
    """A product-form intermediate state and its mixing weight."""

    label: str
    weight: float
    bloch: BlochForm


@dataclass
class ProductDecomposition:
    terms: list[ProductTerm]
    source: str
    dims: tuple[int, int]
    factors: list[Factor] = field(default_factory=list)
    residual: float | None = None

    def __len__(self):
        return len(self.terms)

    @property
    def weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.terms])

    def density(self) -> np.ndarray:
        M, N = self.dims
        out = np.zeros((M * N, M * N), dtype=complex)
        for t in self.terms:
            out += t.weight * t.projector()
        return out

    def to_dict(self) -> dict:
        def ket(v):
            return [[float(z.real), float(z.imag)] for z in v]

        return {
            "source": self.source,
            "dims": list(self.dims),
            "residual": self.residual,
            "terms": [
                {"weight": float(t.weight), "ketA": ket(t.ketA), "ketB": ket(t.ketB)}
                for t in self.terms
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "ProductDecomposition":
        def ket(pairs):
            return np.array([complex(re, im) for re, im in pairs])

        terms = [ProductTerm(float(t["weight"]), ket(t["ketA"]), ket(t["ketB"])) for t in data["terms"]]
        return cls(terms, data["source"], tuple(data["dims"]), residual=data.get("residual"))


def _spectral(rho_local: np.ndarray, what: str):
    w, vecs = np.linalg.eigh(0.5 * (rho_local + rho_local.conj().T))
    if w[0] < -CLAMP_TOL:
        raise ValueError(f"reduction {what} has eigenvalue {w[0]:.3g}; factor is not a state")
    w = np.clip(w, 0.0, None)
    w = w / w.sum()
    return w, vecs


def _split_reductions(rhoA: np.ndarray, rhoB: np.ndarray, scale: float = 1.0) -> list[ProductTerm]:
    a, va = _spectral(rhoA, "A")
    b, vb = _spectral(rhoB, "B")
    terms = []
    for k in range(len(a)):
        for l in range(len(b)):
            w = scale * a[k] * b[l]
            if w >= DROP_WEIGHT:
                terms.append(ProductTerm(float(w), va[:, k], vb[:, l]))
    return terms


def product_split(factor: StateLike, dims=None) -> list[ProductTerm]:
    """Pure product terms of a state equal to the product of its reductions."""
    mat, M, N = matcore._unpack(factor, dims)
    b = to_bloch(mat, dims=(M, N))
    res = criteria.prop1_pure_product(b)
    if res > PRODUCT_TOL:
        raise ValueError(f"factor is not a product state (||T - r s^t||_F = {res:.3g})")
    return _split_reductions(
        matcore.partial_trace(mat, "A", dims=(M, N)), matcore.partial_trace(mat, "B", dims=(M, N))
    )


def verify(rho: StateLike, d: ProductDecomposition, dims=None) -> float:
    """Worst of: Frobenius distance between rho and the mixture, deviation of
    the weights' sum from 1, deviation of any ket norm from 1."""
    if dims is None and not isinstance(rho, matcore.DensityMatrix):
        dims = d.dims
    mat, M, N = matcore._unpack(rho, dims)
    if (M, N) != tuple(d.dims):
        raise ValueError(f"decomposition dims {d.dims} do not match state dims {(M, N)}")
    frob = np.linalg.norm(mat - d.density())
    wsum = abs(d.weights.sum() - 1.0) if d.terms else 1.0
    kets = max(
        (max(abs(np.linalg.norm(t.ketA) - 1), abs(np.linalg.norm(t.ketB) - 1)) for t in d.terms),
        default=0.0,
    )
    if np.any(d.weights < -1e-12):
        return float("inf")
    return float(max(frob, wsum, kets))


def _product_factor(M, N, label, weight, r, s) -> Factor:
    return Factor(label, float(weight), BlochForm(M, N, r, s, np.outer(r, s)))


def _finish(b: BlochForm, factors: list[Factor], source: str) -> ProductDecomposition:
    M, N = b.dimA, b.dimB
    used = sum(f.weight for f in factors)
    rest = 1.0 - used
    if rest < -SIGMA_TOL:
        raise ConditionNotSatisfied(f"{source}: factor weights exceed 1 by {-rest:.3g}")
    if rest > 0:
        factors.append(_product_factor(M, N, "maximally_mixed", rest, np.zeros(M * M - 1), np.zeros(N * N - 1)))
    bA, bB = generator_basis(M), generator_basis(N)
    terms = []
    for f in factors:
        if f.weight < DROP_WEIGHT:
            continue
        terms.extend(
            _split_reductions(single_from_bloch(f.bloch.r, bA), single_from_bloch(f.bloch.s, bB), f.weight)
        )
    d = ProductDecomposition(terms, source, (M, N), factors)
    d.residual = verify(from_bloch(b), d, dims=(M, N))
    if d.residual > VERIFY_TOL:
        raise ReconstructionError(f"{source} decomposition residual {d.residual:.3g} exceeds {VERIFY_TOL}")
    return d


def _pair_factors(M, N, sv: SingularSystem, prefix: str, paired: bool) -> list[Factor]:
    K = np.sqrt(4 * (M - 1) * (N - 1) / (M * N))
    factors = []
    for i, sigma in enumerate(sv.singular_values):
        if sigma < SIGMA_TOL:
            continue
        u = inner_radius(M) * sv.left_vectors[:, i].real
        v = inner_radius(N) * sv.right_vectors[:, i].real
        if paired:
            factors.append(_product_factor(M, N, f"{prefix}{i}", K * sigma / 2, u, v))
            factors.append(_product_factor(M, N, f"{prefix}{i}'", K * sigma / 2, -u, -v))
        else:
            factors.append(_product_factor(M, N, f"{prefix}{i}", K * sigma, u, v))
    return factors


def _direction_factor(M, N, label, vec, on_a: bool) -> list[Factor]:
    n = np.linalg.norm(vec)
    if n < SIGMA_TOL:
        return []
    if on_a:
        return [_product_factor(M, N, label, np.sqrt(2 * (M - 1) / M) * n,
                                inner_radius(M) * vec / n, np.zeros(N * N - 1))]
    return [_product_factor(M, N, label, np.sqrt(2 * (N - 1) / N) * n,
                            np.zeros(M * M - 1), inner_radius(N) * vec / n)]


def decompose_prop3(b: BlochForm) -> ProductDecomposition:
    res = criteria.prop3(b)
    if res.verdict != criteria.SEPARABLE:
        raise ConditionNotSatisfied(f"prop3 condition fails: statistic {res.statistic:.6g} > 1")
    M, N = b.dimA, b.dimB
    factors = _pair_factors(M, N, matcore.svd(b.T), "rho", paired=True)
    factors += _direction_factor(M, N, "rho_r", b.r, on_a=True)
    factors += _direction_factor(M, N, "rho_s", b.s, on_a=False)
    return _finish(b, factors, "prop3")


def decompose_theorem2(b: BlochForm) -> ProductDecomposition:
    M, N = b.dimA, b.dimB
    c = criteria.theorem2_c(b)
    if c <= criteria.C_ZERO_TOL:
        raise ConditionNotSatisfied("theorem2 needs c > 0; use decompose_prop3")
    res = criteria.theorem2(b)
    if res.verdict != criteria.SEPARABLE:
        raise ConditionNotSatisfied(f"theorem2 condition fails: statistic {res.statistic:.6g} > 1")
    factors = _pair_factors(M, N, matcore.svd(b.T - np.outer(b.r, b.s) / c), "rho", paired=True)
    factors.append(_product_factor(M, N, "rho_rs", c, b.r / c, b.s / c))
    return _finish(b, factors, "theorem2")


def decompose_remark2(b: BlochForm, svdT: SingularSystem | None = None) -> ProductDecomposition:
    """Decomposition with one product factor per singular triple of ``T``.

    Raises ``ReconstructionError`` if the mixture does not reproduce the
    state to ``VERIFY_TOL``.
    """
    M, N = b.dimA, b.dimB
    if svdT is None:
        svdT = matcore.svd(b.T)
    res = criteria.remark2(b, svdT)
    if res.verdict != criteria.SEPARABLE:
        raise ConditionNotSatisfied(
            f"remark2 condition fails: statistic {res.statistic:.6g} > {res.threshold:.6g}"
        )
    su, sv = criteria._remark2_parts(b, svdT)
    factors = _pair_factors(M, N, svdT, "rho", paired=False)
    factors += _direction_factor(M, N, "rho_r", b.r - np.sqrt(2 * (N - 1) / N) * su, on_a=True)
    factors += _direction_factor(M, N, "rho_s", b.s - np.sqrt(2 * (M - 1) / M) * sv, on_a=False)
    return _finish(b, factors, "remark2")


def decompose(b: BlochForm, method: str = "auto") -> ProductDecomposition:
    """Dispatch on ``method``; ``auto`` tries theorem2, prop3, then remark2."""
    routes = {"prop3": decompose_prop3, "theorem2": decompose_theorem2, "remark2": decompose_remark2}
    if method != "auto":
        if method not in routes:
            raise ValueError(f"unknown method {method!r}")
        return routes[method](b)
    if criteria.theorem2_c(b) > criteria.C_ZERO_TOL and criteria.theorem2(b).verdict == criteria.SEPARABLE:
        return decompose_theorem2(b)
    if criteria.prop3(b).verdict == criteria.SEPARABLE:
        return decompose_prop3(b)
    if criteria.remark2(b).verdict == criteria.SEPARABLE:
        return decompose_remark2(b)
    raise ConditionNotSatisfied("no sufficient condition holds for this state")
