import numpy as np
import pytest

from covariant_qec.codes import build_code, qutrit_base_code
from covariant_qec.codes.io import write_code, write_state
from covariant_qec.experiments.cli import main
from covariant_qec.experiments.concentration import (
    EPSILONS,
    lemma1_verdicts,
    run_concentration,
)
from covariant_qec.experiments.config import ExperimentConfig
from covariant_qec.experiments.demo import run_demo
from covariant_qec.experiments.nogo import run_nogo_probe
from covariant_qec.groups import cyclic_group


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig("bogus")
    with pytest.raises(ValueError):
        ExperimentConfig("demo", samples=0)
    with pytest.raises(ValueError):
        ExperimentConfig("demo", tol={"kl": -1.0})
    with pytest.raises(ValueError):
        ExperimentConfig("demo", group="Q8")
    echo = ExperimentConfig("demo", seed=3).echo()
    assert echo.startswith("# covariant-qec ") and '"seed": 3' in echo


def test_trivial_group_concentration():
    cfg = ExperimentConfig("concentration", group="Z1", n=3, samples=3, restarts=2)
    _, summary, records = run_concentration(cfg, haar_samples=10)
    assert summary.mean_dist == 0
    for r in records:
        assert abs(r.fworst - 1) < 1e-12
        assert all(v == "holds" for v in r.verdicts.values())


def test_lemma1_verdicts():
    v = lemma1_verdicts(2, 0.0, 1.0)
    assert set(v) == set(EPSILONS) and set(v.values()) == {"holds"}
    v = lemma1_verdicts(2, 0.01, 0.4)
    assert v[0.05] == "inapplicable" and v[0.5] == "VIOLATED" and v[1.0] == "holds"


def test_concentration_small_run_is_deterministic():
    cfg = ExperimentConfig("concentration", group="Z2", n=4, samples=4, restarts=2)
    a, sa, _ = run_concentration(cfg, haar_samples=100)
    b, _, _ = run_concentration(cfg, haar_samples=100)
    assert a == b
    assert sa.dominance_violations == 0
    assert sum(bad for _, bad in sa.lemma_rows.values()) == 0


def test_nogo_zero_charges_finds_perfect_code():
    rep = run_nogo_probe((0, 0), [(0, 0, 0)] * 3, restarts=8, seed=0, stop_below=1e-12)
    assert rep.best_residual <= 1e-9


def test_nogo_running_minimum_monotone():
    small = run_nogo_probe((0, 1), [(0, 1, 2)] * 3, restarts=2, seed=1, max_nfev=200)
    big = run_nogo_probe((0, 1), [(0, 1, 2)] * 3, restarts=4, seed=1, max_nfev=200)
    assert all(x >= y for x, y in zip(big.running_min, big.running_min[1:]))
    assert big.best_residual <= small.best_residual
    assert small.best_residual >= 1e-3


@pytest.mark.parametrize("kind", ["s3-product", "gyroscope", "twirl"])
def test_demos_pass(kind):
    rep = run_demo(kind, ExperimentConfig("demo"))
    assert rep.all_passed, rep.to_text()


def test_random_demo_identities():
    rep = run_demo("random", ExperimentConfig("demo", restarts=4))
    by_name = {c.name: c for c in rep.checks}
    assert by_name["E^dag E = d Psi_0^T"].passed
    assert by_name["tr_i Pi = I"].passed
    assert rep.all_passed


def test_cli_demo_reproducible(tmp_path, capsys):
    out_path = tmp_path / "a.txt"
    assert main(["demo", "gyroscope", "--seed", "2", "--out", str(out_path)]) == 0
    first = out_path.read_text()
    assert main(["demo", "gyroscope", "--seed", "2", "--out", str(out_path)]) == 0
    assert out_path.read_text() == first
    assert main(["demo", "twirl", "--csv"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# covariant-qec") and "name,residual,tolerance,pass" in out


def test_cli_verify_and_encode(tmp_path, capsys):
    code_path, state_path = tmp_path / "code.txt", tmp_path / "psi.txt"
    write_code(qutrit_base_code(), str(code_path))
    psi = np.array([0.6, 0.8j, 0.0])
    write_state(psi, (3,), str(state_path))
    assert main(["verify", str(code_path)]) == 0
    assert main(["encode", str(code_path), str(state_path)]) == 0
    out = capsys.readouterr().out
    assert "# config:" in out


def test_cli_verify_flags_bad_code(tmp_path):
    path = tmp_path / "rep.txt"
    write_code(build_code("repetition", {}), str(path))
    assert main(["verify", str(path), "--out", str(tmp_path / "r.txt")]) == 1
    assert "FAIL" in (tmp_path / "r.txt").read_text()


def test_cli_encode_dimension_mismatch(tmp_path):
    code_path, state_path = tmp_path / "code.txt", tmp_path / "psi.txt"
    write_code(qutrit_base_code(), str(code_path))
    write_state(np.array([1.0, 0.0]), (2,), str(state_path))
    assert main(["encode", str(code_path), str(state_path)]) == 2


def test_cli_random_code_verify(tmp_path):
    path = tmp_path / "rand.txt"
    write_code(build_code("random", {"n": 3}, seed=1, group=cyclic_group(2)), str(path))
    assert main(["verify", str(path), "--restarts", "2", "--out", str(tmp_path / "v.txt")]) == 0


def test_cli_bad_tolerance_syntax():
    with pytest.raises(SystemExit):
        main(["demo", "twirl", "--tol", "kl"])
