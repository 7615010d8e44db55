"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import time

import numpy as np

from covariant_qec.channels import choi_distance
from covariant_qec.codes import (
    LatticeWindow,
    gyroscope_as_twirl,
    gyroscope_code,
    identity_embedding_code,
    permutation_covariant_code,
    qutrit_base_code,
    qutrit_with_s3_context,
    random_covariant_code,
    sparse_wiring_distances,
    twirled_code,
    u1_lattice_code,
)
from covariant_qec.codes.io import write_code, write_state
from covariant_qec.experiments.cli import main
from covariant_qec.experiments.concentration import run_concentration
from covariant_qec.experiments.config import ExperimentConfig
from covariant_qec.experiments.demo import random_identity_residuals
from covariant_qec.experiments.nogo import run_nogo_probe
from covariant_qec.groups import cyclic_group, symmetric_group, symmetric_permutations, trivial_representation
from covariant_qec.verify import (
    alpha_independence_check,
    covariance_residual,
    kl_erasure_check,
    random_inputs,
    recovery_pipeline_check,
    step1_pipeline_distance,
)

ACCEPTANCE_RESULTS = []


def _record(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_RESULTS.append(line)
    print(line)
    return ok


def test_criterion_1_u1_lattice():
    t0 = time.perf_counter()
    code = u1_lattice_code(LatticeWindow(L=3, K=8))
    inputs = random_inputs(code.space_in.total, 50, seed=0)
    fids = [recovery_pipeline_check(code, j, inputs) for j in range(3)]
    charge = covariance_residual(code)
    seconds = time.perf_counter() - t0
    ok = min(fids) >= 1 - 1e-12 and charge == 0 and seconds < 10
    shortfall = ", ".join(f"mode {j}: 1-F={1 - f:.3e}" for j, f in enumerate(fids))
    assert _record(1, ok, f"{shortfall}; charge violation {charge:g}; {seconds:.1f}s")


def test_criterion_2_fig2_wirings():
    t0 = time.perf_counter()
    base = qutrit_base_code()
    assert max(kl_erasure_check(base, j) for j in range(3)) <= 1e-12
    s3 = symmetric_group(3)
    perms = symmetric_permutations(3)
    dense = permutation_covariant_code(base, s3, action=lambda g, a: perms[g][a], n_points=3)
    dense_res = covariance_residual(dense)
    full = permutation_covariant_code(base, s3, dense=False)
    dists = sparse_wiring_distances(full)
    # negative control: the wiring check notices a wrong input representation
    broken = permutation_covariant_code(base, s3, action=lambda g, a: perms[g][a], n_points=3)
    broken.rep_in = trivial_representation(s3, broken.space_in)
    control = covariance_residual(broken)
    seconds = time.perf_counter() - t0
    ok = len(dists) == 6 and max(dists) <= 1e-12 and dense_res <= 1e-12 and control > 0.1 and seconds < 60
    assert _record(
        2, ok, f"G=A=S3 6 blocks max distance {max(dists):.2e}; 3-block dense {dense_res:.2e}; control {control:.2f}; {seconds:.1f}s"
    )


def test_criterion_3_gyroscope():
    code = gyroscope_code(qutrit_base_code(), cyclic_group(2))
    inputs = random_inputs(3, 20, seed=0)
    fids = [recovery_pipeline_check(code, j, inputs) for j in range(code.n_modes)]
    ok = code.n_modes == 5 and min(fids) >= 1 - 1e-10
    assert _record(3, ok, f"5 shares, worst 1-F={1 - min(fids):.2e}")


def test_criterion_4_random_code_identities():
    t0 = time.perf_counter()
    worst = {"invariance": 0.0, "traceout": 0.0, "ete": 0.0, "step1": 0.0}
    for group, n in ((cyclic_group(2), 5), (cyclic_group(3), 3)):
        for seed in range(25):
            code = random_covariant_code(group, n, seed)
            res = random_identity_residuals(code)
            res["step1"] = step1_pipeline_distance(code, random_inputs(group.order, 100, seed))
            for key, val in res.items():
                worst[key] = max(worst[key], val)
    seconds = time.perf_counter() - t0
    ok = (
        worst["invariance"] <= 1e-12
        and worst["traceout"] <= 1e-10
        and worst["ete"] <= 1e-10
        and worst["step1"] <= 1e-8
        and seconds < 300
    )
    detail = ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
    assert _record(4, ok, f"{detail}; {seconds:.1f}s")


def test_criterion_5_lemma1_suite():
    cfg = ExperimentConfig("concentration", group="Z2", n=5, samples=200, seed=0)
    _, summary, _ = run_concentration(cfg)
    violated = sum(bad for _, bad in summary.lemma_rows.values())
    applicable = sum(app for app, _ in summary.lemma_rows.values())
    ok = violated == 0 and summary.dominance_violations == 0
    assert _record(
        5, ok, f"{applicable} applicable rows, {violated} violations; bound above estimate on {summary.dominance_violations} samples"
    )


def test_criterion_6_concentration_trend():
    stats = {}
    for n in (4, 6):
        cfg = ExperimentConfig("concentration", group="Z2", n=n, samples=200, seed=0, restarts=4)
        _, summary, _ = run_concentration(cfg, haar_samples=1000)
        stats[n] = (summary.mean_dist, summary.stderr_dist)
    (m4, s4), (m6, s6) = stats[4], stats[6]
    ok = m6 < m4 and m6 + 3 * s6 < m4 - 3 * s4
    assert _record(6, ok, f"n=4 mean {m4:.4f} +- {3 * s4:.4f}; n=6 mean {m6:.4f} +- {3 * s6:.4f}")


def test_criterion_7_nogo_signatures():
    charged = run_nogo_probe((0, 1), [(0, 1, 2)] * 3, restarts=64, seed=0)
    neutral = run_nogo_probe((0, 0), [(0, 0, 0)] * 3, restarts=64, seed=0, stop_below=1e-12)
    s3 = symmetric_group(3)
    perms = symmetric_permutations(3)
    lattice = u1_lattice_code(LatticeWindow(L=3, K=8))
    perfect = {
        "qutrit": alpha_independence_check(qutrit_base_code()),
        "S3 product": alpha_independence_check(
            permutation_covariant_code(qutrit_base_code(), s3, action=lambda g, a: perms[g][a], n_points=3), n_inputs=5
        ),
        "gyroscope": alpha_independence_check(gyroscope_code(qutrit_base_code(), cyclic_group(2))),
        "twirled": alpha_independence_check(twirled_code(qutrit_with_s3_context())),
        "u1 mode 0": alpha_independence_check(lattice, {0: lattice.charges_out[0].generator()}),
    }
    counter = alpha_independence_check(identity_embedding_code(), {0: np.diag([0.0, 1.0])})
    ok = charged.best_residual >= 1e-3 and neutral.best_residual <= 1e-9 and max(perfect.values()) <= 1e-8 and counter > 0.5
    assert _record(
        7,
        ok,
        f"charged probe {charged.best_residual:.4f}; neutral probe {neutral.best_residual:.1e}; "
        f"max perfect spread {max(perfect.values()):.1e}; identity embedding {counter:.2f}",
    )


def test_criterion_8_twirl():
    base = qutrit_with_s3_context()
    tw = twirled_code(base)
    cov = covariance_residual(tw)
    kl = max(kl_erasure_check(tw, j) for j in range(3))
    gyro = choi_distance(
        gyroscope_code(qutrit_base_code(), cyclic_group(2)).channel,
        gyroscope_as_twirl(qutrit_base_code(), cyclic_group(2)).channel,
    )
    ok = cov <= 1e-12 and kl <= 1e-10 and gyro <= 1e-12
    assert _record(
        8, ok, f"untwirled {covariance_residual(base):.2f}, twirled {cov:.1e}; KL {kl:.1e}; gyroscope vs twirl {gyro:.1e}"
    )


def test_criterion_9_cli_determinism(tmp_path):
    code_path, state_path = tmp_path / "code.txt", tmp_path / "psi.txt"
    write_code(qutrit_base_code(), str(code_path))
    write_state(random_inputs(3, 1, seed=0)[0], (3,), str(state_path))
    runs = {
        "demo u1": ["demo", "u1"],
        "demo s3-product": ["demo", "s3-product"],
        "demo gyroscope": ["demo", "gyroscope"],
        "demo random": ["demo", "random", "--restarts", "4"],
        "demo twirl": ["demo", "twirl", "--csv"],
        "concentration": ["concentration", "--n", "4", "--samples", "5", "--restarts", "2"],
        "nogo": ["nogo", "--restarts", "2"],
        "verify": ["verify", str(code_path), "--csv"],
        "encode": ["encode", str(code_path), str(state_path)],
    }
    mismatched = []
    for name, argv in runs.items():
        out = tmp_path / "out.txt"
        texts = []
        for _ in range(2):
            main(argv + ["--seed", "7", "--out", str(out)])
            texts.append(out.read_text())
        if texts[0] != texts[1]:
            mismatched.append(name)
    ok = not mismatched
    assert _record(9, ok, f"{len(runs)} CLI configurations re-run; mismatched: {mismatched or 'none'}")
