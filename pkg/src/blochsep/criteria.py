"""Separability tests on the Bloch form, plus PPT and CCNR for reference.

Necessary conditions (``theorem1``, ``ccnr``, the negative branch of
``ppt``) can only certify entanglement; sufficient conditions (``prop3``,
``theorem2``, ``remark2``) can only certify separability.  ``corollary1``
and ``ppt`` in dimension ``MN <= 6`` decide both ways.

Every result carries a signed ``margin``: positive means the test fired
(a necessary condition is violated, or a sufficient condition holds).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import matcore
from .bloch import BlochForm, to_bloch
from .matcore import DensityMatrix, SingularSystem, ky_fan_norm

ENTANGLED = "entangled"
SEPARABLE = "separable"
INCONCLUSIVE = "inconclusive"

NECESSARY = "necessary"
SUFFICIENT = "sufficient"
EXACT = "necessary-and-sufficient"

#: absolute slack for strict inequalities on O(1) statistics
STRICT_TOL = 1e-10
#: slack on the "<= 1" side of the constructive sufficient conditions
SUFFICIENT_TOL = 1e-12
#: Bloch vector norms below this count as zero (corollary1 gate)
ZERO_VECTOR_TOL = 1e-10
#: theorem2 falls back to prop3 for c below this
C_ZERO_TOL = 1e-12


class InapplicableCriterion(ValueError):
    """The criterion's preconditions do not hold for this state."""


class ContradictoryVerdicts(RuntimeError):
    """A necessary test and a sufficient test disagree."""


@dataclass(frozen=True)
class CriterionResult:
    name: str
    verdict: str
    statistic: float
    threshold: float
    margin: float
    kind: str

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class CriterionReport:
    dims: tuple[int, int]
    results: list[CriterionResult]
    norm_r: float
    norm_s: float
    kf_T: float
    overall: str
    tolerances: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> CriterionResult:
        for res in self.results:
            if res.name == name:
                return res
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "overall": self.overall,
            "bloch": {"norm_r": self.norm_r, "norm_s": self.norm_s, "kf_T": self.kf_T},
            "results": [r.to_dict() for r in self.results],
            "tolerances": dict(self.tolerances),
        }


def _a(M):
    # sqrt(2(M-1)/M): maps a coherence vector onto the inner ball scale
    return np.sqrt(2 * (M - 1) / M)


def _k(M, N):
    return np.sqrt(4 * (M - 1) * (N - 1) / (M * N))


def _necessary(name, statistic, threshold, tol=STRICT_TOL):
    margin = statistic - threshold
    verdict = ENTANGLED if margin > tol else INCONCLUSIVE
    return CriterionResult(name, verdict, float(statistic), float(threshold), float(margin), NECESSARY)


def _sufficient(name, statistic, threshold, tol=SUFFICIENT_TOL):
    margin = threshold - statistic
    verdict = SEPARABLE if margin >= -tol else INCONCLUSIVE
    return CriterionResult(name, verdict, float(statistic), float(threshold), float(margin), SUFFICIENT)


def prop1_pure_product(b: BlochForm) -> float:
    """``||T - r s^t||_F``; zero exactly when rho = rho_A (x) rho_B."""
    return float(np.linalg.norm(b.T - np.outer(b.r, b.s)))


def theorem1_threshold(M: int, N: int) -> float:
    return float(np.sqrt(M * N * (M - 1) * (N - 1) / 4))


def theorem1(b: BlochForm) -> CriterionResult:
    """Separable states have ``||T||_KF <= sqrt(MN(M-1)(N-1)/4)``."""
    return _necessary("theorem1", ky_fan_norm(b.T), theorem1_threshold(b.dimA, b.dimB))


def prop3_statistic(b: BlochForm) -> float:
    M, N = b.dimA, b.dimB
    return float(
        _a(M) * np.linalg.norm(b.r) + _a(N) * np.linalg.norm(b.s) + _k(M, N) * ky_fan_norm(b.T)
    )


def prop3(b: BlochForm) -> CriterionResult:
    return _sufficient("prop3", prop3_statistic(b), 1.0)


def theorem2_c(b: BlochForm) -> float:
    return float(max(_a(b.dimA) * np.linalg.norm(b.r), _a(b.dimB) * np.linalg.norm(b.s)))


def theorem2(b: BlochForm) -> CriterionResult:
    """Sufficient condition ``c + K ||T - r s^t / c||_KF <= 1``.

    For ``c`` numerically zero the statistic reduces to that of ``prop3``,
    which is returned under this name.
    """
    c = theorem2_c(b)
    if c <= C_ZERO_TOL:
        stat = prop3_statistic(b)
    else:
        stat = c + _k(b.dimA, b.dimB) * ky_fan_norm(b.T - np.outer(b.r, b.s) / c)
    return _sufficient("theorem2", stat, 1.0)


def _remark2_parts(b: BlochForm, svdT: SingularSystem):
    s = svdT.singular_values
    keep = s >= C_ZERO_TOL
    u = svdT.left_vectors[:, keep].real
    v = svdT.right_vectors[:, keep].real
    su = u @ s[keep]
    sv = v @ s[keep]
    return su, sv


def remark2(b: BlochForm, svdT: SingularSystem | None = None) -> CriterionResult:
    """Sufficient condition depending on the SVD ``T = sum s_i u_i v_i^t``.

    The verdict depends on the particular singular vectors supplied (their
    signs in particular), not only on ``T``.
    """
    M, N = b.dimA, b.dimB
    if svdT is None:
        svdT = matcore.svd(b.T)
    su, sv = _remark2_parts(b, svdT)
    stat = (
        np.linalg.norm(np.sqrt(N / (2 * (N - 1))) * b.r - su)
        + np.linalg.norm(np.sqrt(M / (2 * (M - 1))) * b.s - sv)
        + ky_fan_norm(b.T)
    )
    threshold = np.sqrt(M * N / (4 * (M - 1) * (N - 1)))
    return _sufficient("remark2", stat, threshold)


def corollary1(b: BlochForm) -> CriterionResult:
    """Two qubits with maximally mixed marginals: separable iff ``||T||_KF <= 1``."""
    if (b.dimA, b.dimB) != (2, 2):
        raise InapplicableCriterion("corollary1 applies to 2x2 states only")
    if np.linalg.norm(b.r) > ZERO_VECTOR_TOL or np.linalg.norm(b.s) > ZERO_VECTOR_TOL:
        raise InapplicableCriterion("corollary1 requires maximally mixed subsystems (r = s = 0)")
    stat = ky_fan_norm(b.T)
    margin = 1.0 - stat
    verdict = ENTANGLED if stat > 1.0 + STRICT_TOL else SEPARABLE
    return CriterionResult("corollary1", verdict, stat, 1.0, margin, EXACT)


def ppt(rho: DensityMatrix) -> CriterionResult:
    """Peres-Horodecki test; decides separability when ``MN <= 6``."""
    M, N = rho.dims
    stat = matcore.min_eigenvalue(matcore.partial_transpose(rho, "B"))
    if stat < -STRICT_TOL:
        verdict = ENTANGLED
    elif M * N <= 6:
        verdict = SEPARABLE
    else:
        verdict = INCONCLUSIVE
    kind = EXACT if M * N <= 6 else NECESSARY
    return CriterionResult("ppt", verdict, stat, 0.0, -stat, kind)


def ccnr(rho: DensityMatrix) -> CriterionResult:
    """Realignment test: separable states have ``||R(rho)||_KF <= 1``."""
    return _necessary("ccnr", ky_fan_norm(matcore.realign(rho)), 1.0)


def ccnr_maximally_mixed_prediction(b: BlochForm) -> float:
    """CCNR statistic of a state with ``r = s = 0`` expressed through ``T``."""
    MN = b.dimA * b.dimB
    return float(1 / np.sqrt(MN) + 2 / MN * ky_fan_norm(b.T))


def analyze(rho: DensityMatrix, b: BlochForm | None = None) -> CriterionReport:
    """Run every applicable test and combine the verdicts."""
    if b is None:
        b = to_bloch(rho)
    svdT = matcore.svd(b.T)
    results = [theorem1(b), ccnr(rho), ppt(rho), prop3(b), theorem2(b), remark2(b, svdT)]
    try:
        results.append(corollary1(b))
    except InapplicableCriterion:
        pass

    fired_ent = [r.name for r in results if r.verdict == ENTANGLED]
    fired_sep = [r.name for r in results if r.verdict == SEPARABLE]
    if fired_ent and fired_sep:
        raise ContradictoryVerdicts(
            f"entangled by {fired_ent} but separable by {fired_sep}; numerical fault"
        )
    overall = ENTANGLED if fired_ent else SEPARABLE if fired_sep else "unknown"
    return CriterionReport(
        dims=rho.dims,
        results=results,
        norm_r=float(np.linalg.norm(b.r)),
        norm_s=float(np.linalg.norm(b.s)),
        kf_T=float(svdT.singular_values.sum()),
        overall=overall,
        tolerances={
            "strict": STRICT_TOL,
            "sufficient": SUFFICIENT_TOL,
            "zero_vector": ZERO_VECTOR_TOL,
            "c_zero": C_ZERO_TOL,
        },
    )
