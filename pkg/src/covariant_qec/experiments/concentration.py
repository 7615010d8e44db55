"""Sampling random covariant codes: Lemma-1 implications, trend and tail bounds."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ..codes.base import InstanceTooLarge
from ..codes.random_code import NearSingularError, RandomCodeDiagnostics, random_covariant_code
from ..hilbert import operator_norm
from ..verify import fworst_estimate, fworst_lower_bound
from .config import ExperimentConfig

EPSILONS = (0.05, 0.1, 0.2, 0.5, 1.0)
DELTAS = (0.25, 0.5, 0.75, 1.0)
LEMMA_SLACK = 1e-6
MAX_RESAMPLES = 20


@dataclass
class ConcentrationRecord:
    sample: int
    seed: int
    d: int
    n: int
    dist01: float
    psi0_min: float
    psi0_max: float
    lower_bound: float
    fworst: float
    probe_devs: tuple[float, ...]
    verdicts: dict[float, str] = field(default_factory=dict)

    def row(self) -> list:
        return [
            self.sample,
            self.seed,
            self.d,
            self.n,
            repr(self.dist01),
            repr(self.psi0_min),
            repr(self.psi0_max),
            repr(self.lower_bound),
            repr(self.fworst),
            repr(max(self.probe_devs)),
        ] + [self.verdicts[e] for e in EPSILONS]


HEADER = [
    "sample",
    "seed",
    "d",
    "n",
    "dist01_inf",
    "psi0_eig_min",
    "psi0_eig_max",
    "fworst_lower_bound",
    "fworst_estimate",
    "max_probe_dev",
] + [f"lemma1_eps_{e}" for e in EPSILONS]


def sample_seed(master: int, index: int, attempt: int = 0) -> int:
    return int(np.random.SeedSequence([int(master), int(index), int(attempt)]).generate_state(1, dtype=np.uint32)[0])


def probe_states(d: int) -> list[np.ndarray]:
    """Computational-basis projectors on modes (0, 1) and one maximally entangled state."""
    out = []
    for a in range(d * d):
        s = np.zeros((d * d, d * d))
        s[a, a] = 1.0
        out.append(s)
    phi = np.eye(d).reshape(-1) / math.sqrt(d)
    out.append(np.outer(phi, phi))
    return out


def conc_bound(d: int, n: int) -> float:
    """Right-hand side of the tail bound on P(F_worst < 1 - d^{(9-2n)/8})."""
    expo = -(d**2) / 216 * (d ** ((2 * n - 8) / 4) - 432 * math.log(30 * d ** ((7 + 2 * n) / 8)))
    return math.exp(min(expo, 700.0))


def pdelta_bound(d: int, n: int, delta: float) -> float:
    return math.exp(-(d ** (n - 2)) * delta**2 / 6)


def lemma1_verdicts(d: int, dist01: float, fworst: float) -> dict[float, str]:
    out = {}
    for eps in EPSILONS:
        if dist01 <= eps / (3 * d * d):
            out[eps] = "holds" if fworst >= 1 - eps - LEMMA_SLACK else "VIOLATED"
        else:
            out[eps] = "inapplicable"
    return out


def measure_sample(diag: RandomCodeDiagnostics, code, index: int, seed: int, restarts: int, haar_samples: int) -> ConcentrationRecord:
    d, n = diag.d, diag.n
    tau = np.eye(d * d) / (d * d)
    dev = diag.psi01 - tau
    dist = operator_norm(dev)
    w0 = np.linalg.eigvalsh(diag.psi0)
    lb = fworst_lower_bound(diag)
    est = fworst_estimate(code, 0, restarts=restarts, seed=seed, haar_samples=haar_samples).value
    probes = tuple(abs(float(np.real(np.trace(s @ dev)))) for s in probe_states(d))
    rec = ConcentrationRecord(index, seed, d, n, dist, float(w0.min()), float(w0.max()), lb, est, probes)
    rec.verdicts = lemma1_verdicts(d, dist, est)
    return rec


def sample_records(cfg: ExperimentConfig, haar_samples: int = 10_000) -> list[ConcentrationRecord]:
    group = cfg.group_obj()
    d = group.order
    if d**cfg.n > cfg.budget:
        raise InstanceTooLarge(f"instance too large: d^n = {d ** cfg.n} exceeds budget {cfg.budget}")
    records = []
    for i in range(cfg.samples):
        for attempt in range(MAX_RESAMPLES):
            seed = sample_seed(cfg.seed, i, attempt)
            try:
                code = random_covariant_code(group, cfg.n, seed, budget=cfg.budget, decoders="first")
                break
            except NearSingularError:
                continue
        else:
            raise NearSingularError(f"sample {i}: near-singular E†E on {MAX_RESAMPLES} attempts")
        records.append(measure_sample(code.diagnostics["random"], code, i, seed, cfg.restarts, haar_samples))
    return records


@dataclass
class ConcentrationSummary:
    d: int
    n: int
    samples: int
    mean_dist: float
    stderr_dist: float
    lemma_rows: dict[float, tuple[int, int]]
    fail_threshold: float
    fail_frequency: float
    conc_bound: float
    pdelta_rows: list[tuple[float, float, float]]
    bound_violations: int
    dominance_violations: int

    def lines(self) -> list[str]:
        out = [
            f"samples: {self.samples}  d: {self.d}  n: {self.n}",
            f"mean ||Psi01 - tau01||_inf: {self.mean_dist!r}  stderr: {self.stderr_dist!r}",
        ]
        for eps, (applicable, violated) in self.lemma_rows.items():
            out.append(f"lemma1 eps={eps}: applicable={applicable} violated={violated}")
        vac = " (vacuous at this scale)" if self.conc_bound >= 1 else ""
        out.append(
            f"P(F_worst < {self.fail_threshold!r}): empirical={self.fail_frequency!r} bound={self.conc_bound!r}{vac}"
        )
        for delta, freq, bound in self.pdelta_rows:
            vac = " (vacuous at this scale)" if bound >= 1 else ""
            out.append(f"P_delta delta={delta}: empirical={freq!r} bound={bound!r}{vac}")
        out.append(f"non-vacuous bound rows exceeded: {self.bound_violations}")
        out.append(f"lower bound above estimate (+1e-8): {self.dominance_violations}")
        return out


def summarize(records: list[ConcentrationRecord]) -> ConcentrationSummary:
    d, n = records[0].d, records[0].n
    dist = np.array([r.dist01 for r in records])
    fw = np.array([r.fworst for r in records])
    rows = {}
    for eps in EPSILONS:
        app = sum(r.verdicts[eps] != "inapplicable" for r in records)
        bad = sum(r.verdicts[eps] == "VIOLATED" for r in records)
        rows[eps] = (app, bad)
    thr = 1 - d ** ((9 - 2 * n) / 8)
    freq = float(np.mean(fw < thr))
    cb = conc_bound(d, n)
    pd_rows = []
    for delta in DELTAS:
        emp = float(np.mean([max(r.probe_devs) >= delta / d**2 for r in records]))
        pd_rows.append((delta, emp, pdelta_bound(d, n, delta)))
    violations = int(cb < 1 and freq > cb) + sum(int(b < 1 and f > b) for _, f, b in pd_rows)
    dom = sum(r.lower_bound > r.fworst + 1e-8 for r in records)
    se = float(dist.std(ddof=1) / math.sqrt(len(dist))) if len(dist) > 1 else 0.0
    return ConcentrationSummary(d, n, len(records), float(dist.mean()), se, rows, thr, freq, cb, pd_rows, violations, dom)


def records_csv(records: list[ConcentrationRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def run_concentration(cfg: ExperimentConfig, haar_samples: int = 10_000) -> tuple[str, ConcentrationSummary, list[ConcentrationRecord]]:
    """Returns (file text with config echo, CSV and summary), the summary, and the records."""
    records = sample_records(cfg, haar_samples)
    summary = summarize(records)
    text = cfg.echo() + records_csv(records) + "".join(f"# summary: {ln}\n" for ln in summary.lines())
    return text, summary, records
