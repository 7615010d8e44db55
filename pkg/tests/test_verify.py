import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from covariant_qec.codes import (
    identity_embedding_code,
    qutrit_base_code,
    qutrit_with_s3_context,
    random_covariant_code,
    repetition_qubit_code,
    twirled_code,
    u1_lattice_code,
)
from covariant_qec.codes.lattice import LatticeWindow
from covariant_qec.codes.random_code import RandomCodeDiagnostics
from covariant_qec.groups import cyclic_group
from covariant_qec.verify import (
    VerificationReport,
    alpha_independence_check,
    covariance_residual,
    fworst_estimate,
    fworst_lower_bound,
    gell_mann_basis,
    kl_erasure_check,
    numerical_range_lower_bound,
    random_inputs,
    recovery_kraus,
    recovery_pipeline_check,
    step1_closed_form,
    step1_pipeline_distance,
)


@pytest.fixture(scope="module")
def z2_random_code():
    return random_covariant_code(cyclic_group(2), 5, seed=0)


def _uniform_diag(d):
    eye = np.eye(d, dtype=complex)
    return RandomCodeDiagnostics(d, 3, None, None, eye / d, np.eye(d * d) / d**2, None, None, None)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_gell_mann_orthogonality(d):
    basis = gell_mann_basis(d)
    assert len(basis) == d * d
    gram = np.array([[np.trace(a.conj().T @ b) for b in basis[1:]] for a in basis[1:]])
    assert np.abs(gram - 2 * np.eye(d * d - 1)).max() < 1e-14
    for a in basis[1:]:
        assert abs(np.trace(a)) < 1e-14


def test_kl_repetition_leaks_logical_z():
    assert kl_erasure_check(repetition_qubit_code(), 0) >= 0.5


def test_kl_qutrit_passes():
    code = qutrit_base_code()
    assert max(kl_erasure_check(code, j) for j in range(3)) <= 1e-12


def test_covariance_examples():
    assert covariance_residual(twirled_code(qutrit_with_s3_context())) <= 1e-12
    assert covariance_residual(u1_lattice_code(LatticeWindow(L=1, K=2))) == 0
    assert covariance_residual(qutrit_with_s3_context()) > 0.1


def test_zero_erasure_path_is_identity():
    code = qutrit_base_code()
    assert recovery_pipeline_check(code, None, random_inputs(3, 5, seed=0)) >= 1 - 1e-12


def test_step1_uniform_marginal_returns_input():
    diag = _uniform_diag(3)
    rng = np.random.default_rng(0)
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    rho = g @ g.conj().T
    rho /= np.trace(rho)
    assert np.abs(step1_closed_form(diag, rho).entries - rho).max() < 1e-12


def test_lower_bound_is_one_for_identity():
    assert abs(numerical_range_lower_bound(np.eye(3)) - 1) < 1e-12
    assert abs(fworst_lower_bound(_uniform_diag(2)) - 1) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_numerical_range_bound_is_valid(seed):
    rng = np.random.default_rng(seed)
    a = np.eye(3) + 0.3 * (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    lb = numerical_range_lower_bound(a)
    z = rng.standard_normal((500, 3)) + 1j * rng.standard_normal((500, 3))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    vals = np.abs(np.einsum("ki,ij,kj->k", z.conj(), a, z))
    assert lb <= vals.min() + 1e-12


def test_step1_matches_pipeline(z2_random_code):
    inputs = random_inputs(2, 100, seed=1)
    assert step1_pipeline_distance(z2_random_code, inputs) <= 1e-8
    for psi in inputs[:5]:
        out = step1_closed_form(z2_random_code.diagnostics["random"], np.outer(psi, psi.conj()))
        assert abs(np.trace(out.entries) - 1) < 1e-9


def test_step1_every_mode(z2_random_code):
    inputs = random_inputs(2, 10, seed=2)
    for j in range(5):
        assert step1_pipeline_distance(z2_random_code, inputs, j) <= 1e-8


def test_fworst_perfect_code_is_one():
    est = fworst_estimate(qutrit_base_code(), 1, restarts=4, seed=0, haar_samples=200)
    assert abs(est.value - 1) < 1e-9


def test_fworst_dominance(z2_random_code):
    est = fworst_estimate(z2_random_code, 0, restarts=8, seed=0, haar_samples=10_000)
    assert est.value <= est.trace["haar_min"]
    assert fworst_lower_bound(z2_random_code.diagnostics["random"]) <= est.value + 1e-8


def test_fworst_invariant_under_group_rotation(z2_random_code):
    kraus = recovery_kraus(z2_random_code, 0)
    u = z2_random_code.rep_in(1)
    # evaluating at U|psi> is the same as conjugating every Kraus operator by U
    rotated = np.einsum("ji,kjl,lm->kim", u.conj(), kraus, u)
    a = fworst_estimate(z2_random_code, 0, restarts=8, seed=3, kraus=kraus).value
    b = fworst_estimate(z2_random_code, 0, restarts=8, seed=3, kraus=rotated).value
    assert abs(a - b) < 1e-8


def test_alpha_spread_examples():
    assert alpha_independence_check(qutrit_base_code()) <= 1e-12
    t = {0: np.diag([0.0, 1.0])}
    assert alpha_independence_check(identity_embedding_code(), t) > 0.5
    code = u1_lattice_code(LatticeWindow(L=2, K=4))
    assert alpha_independence_check(code, {0: code.charges_out[0].generator()}) <= 1e-12


def test_report_pass_logic_and_csv():
    rep = VerificationReport(title="t")
    rep.add("ok", 1e-13, 1e-12, seed=3)
    rep.add("bad", 1e-3, 1e-12)
    assert not rep.all_passed
    text, csv_text = rep.to_text(), rep.to_csv()
    assert "FAIL" in text and "PASS" in text
    lines = csv_text.strip().splitlines()
    assert lines[0].split(",")[:4] == ["name", "residual", "tolerance", "pass"]
    assert len(lines) == 3
