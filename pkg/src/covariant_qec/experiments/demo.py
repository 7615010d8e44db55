"""One verification run per shipped construction."""

from __future__ import annotations

import numpy as np

from ..channels import choi_distance
from ..codes import (
    LatticeWindow,
    gyroscope_as_twirl,
    gyroscope_code,
    permutation_covariant_code,
    qutrit_base_code,
    qutrit_with_s3_context,
    random_covariant_code,
    sparse_wiring_distances,
    twirled_code,
    u1_lattice_code,
    u1_lattice_encoder,
)
from ..groups import cyclic_group, symmetric_group, symmetric_permutations
from ..hilbert import partial_trace_array
from ..verify import (
    VerificationReport,
    alpha_independence_check,
    covariance_residual,
    fworst_estimate,
    fworst_lower_bound,
    kl_erasure_check,
    random_inputs,
    recovery_pipeline_check,
    step1_pipeline_distance,
)
from .config import ExperimentConfig

DEMO_KINDS = ("u1", "s3-product", "gyroscope", "random", "twirl")

TOLERANCES = {
    "isometry": 1e-12,
    "covariance": 1e-12,
    "kl": 1e-10,
    "recovery": 1e-10,
    "recovery_u1": 1e-12,
    "identity": 1e-10,
    "invariance": 1e-12,
    "step1": 1e-8,
    "dominance": 1e-8,
    "alpha": 1e-8,
}


def _tol(cfg: ExperimentConfig, key: str) -> float:
    return float(cfg.tol.get(key, TOLERANCES[key]))


def demo_u1(cfg: ExperimentConfig, rep: VerificationReport) -> None:
    window = LatticeWindow(int(cfg.extra.get("L", 3)), int(cfg.extra.get("K", 8)))
    code = u1_lattice_code(window)
    raw = u1_lattice_encoder(window, normalize=False)
    rep.add("unnormalized E^dag E - (2K+1) I", np.abs(raw.T @ raw - (2 * window.K + 1) * np.eye(raw.shape[1])).max(), 0.0)
    rep.add("isometry", code.isometry_residual(), _tol(cfg, "isometry"))
    rep.add("charge conservation", covariance_residual(code), 0.0)
    inputs = random_inputs(code.space_in.total, 50, cfg.seed)
    for j in range(3):
        rep.add(f"KL erasure mode {j}", kl_erasure_check(code, j), _tol(cfg, "kl"))
        rep.add(f"recovery mode {j} (1 - F)", 1 - recovery_pipeline_check(code, j, inputs), _tol(cfg, "recovery_u1"), cfg.seed)
    rep.add("alpha spread mode 0", alpha_independence_check(code, {0: code.charges_out[0].generator()}, seed=cfg.seed), _tol(cfg, "alpha"))


def demo_s3_product(cfg: ExperimentConfig, rep: VerificationReport) -> None:
    base = qutrit_base_code()
    for j in range(3):
        rep.add(f"base KL erasure mode {j}", kl_erasure_check(base, j), _tol(cfg, "kl"))
    s3 = symmetric_group(3)
    perms = symmetric_permutations(3)
    small = permutation_covariant_code(base, s3, action=lambda g, a: perms[g][a], n_points=3)
    rep.add("S3 on 3 blocks: covariance", covariance_residual(small), _tol(cfg, "covariance"))
    full = permutation_covariant_code(base, s3, dense=False)
    for g, dist in enumerate(sparse_wiring_distances(full)):
        rep.add(f"two wirings agree, G=A=S3, element {g}", dist, _tol(cfg, "covariance"))
    inputs = random_inputs(small.space_in.total, 5, cfg.seed)
    for j in (0, 4, 8):
        rep.add(f"S3 on 3 blocks: recovery mode {j} (1 - F)", 1 - recovery_pipeline_check(small, j, inputs), _tol(cfg, "recovery"), cfg.seed)


def demo_gyroscope(cfg: ExperimentConfig, rep: VerificationReport) -> None:
    group = cyclic_group(2)
    base = qutrit_base_code()
    code = gyroscope_code(base, group)
    rep.add("trace preservation", code.channel.trace_preservation_residual(), _tol(cfg, "isometry"))
    rep.add("covariance", covariance_residual(code), _tol(cfg, "covariance"))
    rep.add("equals twirl of E0 (x) |e><e|^2", choi_distance(code.channel, gyroscope_as_twirl(base, group).channel), _tol(cfg, "covariance"))
    inputs = random_inputs(3, 20, cfg.seed)
    for j in range(code.n_modes):
        rep.add(f"recovery mode {j} (1 - F)", 1 - recovery_pipeline_check(code, j, inputs), _tol(cfg, "recovery"), cfg.seed)


def random_identity_residuals(code) -> dict[str, float]:
    diag = code.diagnostics["random"]
    d, n = diag.d, diag.n
    u = code.rep_in.power(n + 1)
    inv = max(float(np.abs(u(g) @ diag.psi - diag.psi).max()) for g in code.group.elements())
    pi = diag.pi()
    dims = (d,) * (n + 1)
    traceout = max(
        float(np.abs(partial_trace_array(pi, dims, [k for k in range(n + 1) if k != i]) - np.eye(d**n)).max())
        for i in range(n + 1)
    )
    ete = float(np.abs(diag.E.conj().T @ diag.E - d * diag.psi0.T).max())
    return {"invariance": inv, "traceout": traceout, "ete": ete}


def demo_random(cfg: ExperimentConfig, rep: VerificationReport) -> None:
    group = cfg.group_obj()
    code = random_covariant_code(group, cfg.n, cfg.seed, budget=cfg.budget)
    res = random_identity_residuals(code)
    rep.add("Psi invariance", res["invariance"], _tol(cfg, "invariance"), cfg.seed)
    rep.add("tr_i Pi = I", res["traceout"], _tol(cfg, "identity"), cfg.seed)
    rep.add("E^dag E = d Psi_0^T", res["ete"], _tol(cfg, "identity"), cfg.seed)
    rep.add("isometry", code.isometry_residual(), _tol(cfg, "identity"), cfg.seed)
    rep.add("covariance", covariance_residual(code), _tol(cfg, "identity"), cfg.seed)
    rep.add("step-1 closed form vs pipeline", step1_pipeline_distance(code, random_inputs(group.order, 100, cfg.seed)), _tol(cfg, "step1"), cfg.seed)
    lb = fworst_lower_bound(code.diagnostics["random"])
    est = fworst_estimate(code, 0, restarts=cfg.restarts, seed=cfg.seed).value
    rep.add("lower bound - estimate", max(0.0, lb - est), _tol(cfg, "dominance"), cfg.seed, note=f"bound={lb!r} estimate={est!r}")


def demo_twirl(cfg: ExperimentConfig, rep: VerificationReport) -> None:
    base = qutrit_with_s3_context()
    untwirled = covariance_residual(base)
    tw = twirled_code(base)
    rep.add("twirled covariance", covariance_residual(tw), _tol(cfg, "covariance"), note=f"untwirled residual={untwirled!r}")
    for j in range(3):
        rep.add(f"twirled KL erasure mode {j}", kl_erasure_check(tw, j), _tol(cfg, "kl"))


RUNNERS = {
    "u1": demo_u1,
    "s3-product": demo_s3_product,
    "gyroscope": demo_gyroscope,
    "random": demo_random,
    "twirl": demo_twirl,
}


def run_demo(kind: str, cfg: ExperimentConfig | None = None) -> VerificationReport:
    if kind not in RUNNERS:
        raise ValueError(f"unknown demo {kind!r}; choose from {', '.join(DEMO_KINDS)}")
    cfg = ExperimentConfig("demo") if cfg is None else cfg
    rep = VerificationReport(title=f"demo {kind}")
    RUNNERS[kind](cfg, rep)
    return rep
