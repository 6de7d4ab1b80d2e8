"""Monte Carlo comparison of theorem1 and CCNR on random PPT states.

Sample ``k`` is drawn from its own stream seeded by ``(seed, k)``, so the
report does not depend on how indices are spread over workers.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

from statsmodels.stats.proportion import proportion_confint

from . import criteria, states
from .bloch import to_bloch


@dataclass(frozen=True)
class SampleOutcome:
    index: int
    ppt: bool
    tries: int
    thm1: bool = False
    ccnr: bool = False


@dataclass
class BenchReport:
    M: int
    N: int
    samples: int
    seed: int
    measure: str
    max_tries: int
    draws: int
    ppt_pass: int
    detected_thm1: int
    detected_ccnr: int
    detected_both: int

    def rates(self) -> dict:
        out = {}
        for name, k in (("theorem1", self.detected_thm1), ("ccnr", self.detected_ccnr),
                        ("both", self.detected_both)):
            n = self.ppt_pass
            if n:
                lo, hi = proportion_confint(k, n, alpha=0.05, method="wilson")
                out[name] = {"detections": k, "rate": k / n, "ci_low": float(lo), "ci_high": float(hi)}
            else:
                out[name] = {"detections": k, "rate": float("nan"), "ci_low": 0.0, "ci_high": 1.0}
        return out

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rates"] = self.rates()
        d["tolerances"] = {"ppt_accept": states.PPT_ACCEPT_TOL, "strict": criteria.STRICT_TOL}
        return d

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["criterion", "detections", "rate", "ci_low", "ci_high"])
        for name, r in self.rates().items():
            w.writerow([name, r["detections"], repr(r["rate"]), repr(r["ci_low"]), repr(r["ci_high"])])
        return buf.getvalue()

    def check_invariants(self):
        if self.detected_both > min(self.detected_thm1, self.detected_ccnr):
            raise AssertionError("detected_both exceeds a single-criterion count")
        if self.M == self.N and self.detected_thm1 != self.detected_both:
            raise AssertionError(
                "theorem1 detected a state that CCNR missed in equal dimensions"
            )


def evaluate_sample(M, N, seed, index, measure="ginibre", max_tries=1000) -> SampleOutcome:
    try:
        rho, tries = states.random_ppt_state(
            M, N, states.sample_seed(seed, index), max_tries=max_tries,
            measure=measure, return_tries=True,
        )
    except states.TriesExhausted:
        return SampleOutcome(index, False, max_tries)
    thm1 = criteria.theorem1(to_bloch(rho)).verdict == criteria.ENTANGLED
    cc = criteria.ccnr(rho).verdict == criteria.ENTANGLED
    return SampleOutcome(index, True, tries, thm1, cc)


def _evaluate_chunk(args):
    M, N, seed, indices, measure, max_tries = args
    return [evaluate_sample(M, N, seed, k, measure, max_tries) for k in indices]


def run_bench(M: int, N: int, samples: int, seed: int = 0, measure: str = "bloch-rejection",
              workers: int = 1, max_tries: int = 100_000) -> BenchReport:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if measure not in states.MEASURES:
        raise ValueError(f"unknown measure {measure!r}")
    indices = list(range(samples))
    if workers <= 1:
        outcomes = _evaluate_chunk((M, N, seed, indices, measure, max_tries))
    else:
        size = max(1, -(-samples // (workers * 4)))
        chunks = [(M, N, seed, indices[i:i + size], measure, max_tries)
                  for i in range(0, samples, size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = [o for part in pool.map(_evaluate_chunk, chunks) for o in part]
    outcomes.sort(key=lambda o: o.index)

    report = BenchReport(
        M=M, N=N, samples=samples, seed=seed, measure=measure, max_tries=max_tries,
        draws=sum(o.tries for o in outcomes),
        ppt_pass=sum(o.ppt for o in outcomes),
        detected_thm1=sum(o.thm1 for o in outcomes),
        detected_ccnr=sum(o.ccnr for o in outcomes),
        detected_both=sum(o.thm1 and o.ccnr for o in outcomes),
    )
    report.check_invariants()
    return report
