import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from covariant_qec.codes import LatticeWindow, u1_lattice_encoder
from covariant_qec.hilbert import (
    DenseKet,
    DenseOperator,
    ModeSpace,
    NotPSDError,
    fidelity,
    norms_and_fidelity,
    partial_trace,
    partial_trace_array,
    permute_modes,
    psd_func,
    random_density_matrix,
    random_haar_ket,
    reduced_from_ket,
    schmidt_decompose,
    tensor_product,
)


def _rand(shape, rng):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_identity_tensor_identity():
    a = DenseOperator.identity(ModeSpace((2,)))
    b = DenseOperator.identity(ModeSpace((3,)))
    out = tensor_product(a, b)
    assert out.space_out.dims == (2, 3)
    assert np.abs(out.entries - np.eye(6)).max() == 0


def test_flip_on_00():
    x = DenseOperator.square(ModeSpace((2,)), [[0, 1], [1, 0]])
    xx = tensor_product(x, x)
    out = xx @ DenseKet.basis(ModeSpace((2, 2)), (0, 0))
    assert np.abs(out.amplitudes - DenseKet.basis(ModeSpace((2, 2)), (1, 1)).amplitudes).max() == 0


def test_kron_acts_factorwise():
    rng = np.random.default_rng(1)
    a, b = _rand((2, 2), rng), _rand((2, 2), rng)
    u, v = _rand(2, rng), _rand(2, rng)
    ab = tensor_product(DenseOperator.square(ModeSpace((2,)), a), DenseOperator.square(ModeSpace((2,)), b))
    assert np.abs(ab.entries @ np.kron(u, v) - np.kron(a @ u, b @ v)).max() < 1e-12


def test_mode_space_validation():
    with pytest.raises(ValueError):
        ModeSpace((2, 0))
    with pytest.raises(ValueError):
        ModeSpace((2, 2), labels=("a", "a"))
    with pytest.raises(ValueError):
        DenseOperator(ModeSpace((2,)), ModeSpace((2,)), np.eye(3))
    with pytest.raises(IndexError):
        ModeSpace((2, 3)).check_modes([2])


def test_bell_marginal_is_maximally_mixed():
    bell = DenseKet(ModeSpace((2, 2)), np.array([1, 0, 0, 1]) / np.sqrt(2))
    red = partial_trace(bell.projector(), [0])
    assert np.abs(red.entries - np.eye(2) / 2).max() < 1e-15


def test_full_trace_is_scalar():
    rng = np.random.default_rng(2)
    m = _rand((6, 6), rng)
    out = partial_trace_array(m, (2, 3), [])
    assert np.abs(out.reshape(-1)[0] - np.trace(m)) < 1e-12


def test_lattice_k1_reduced_state_on_first_mode():
    # input |x=0>, K=1: first mode carries momenta {-3, 0, 3}, each with weight 1/3
    window = LatticeWindow(L=0, K=1)
    v = u1_lattice_encoder(window)
    dims = tuple(len(m) for m in window.mode_charges())
    red = reduced_from_ket(v[:, 0], dims, (0,))
    assert np.abs(red - np.eye(3) / 3).max() < 1e-15


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.permutations([0, 1, 2]))
def test_partial_trace_matches_explicit_sum(seed, order):
    rng = np.random.default_rng(seed)
    dims = (2, 3, 2)
    rho = random_density_matrix(12, rng)
    keep = list(order[:2])
    t = rho.reshape(dims + dims)
    traced = order[2]
    expected = np.trace(t, axis1=traced, axis2=traced + 3)
    kept_sorted = sorted(keep)
    expected = expected.reshape(dims[kept_sorted[0]] * dims[kept_sorted[1]], -1)
    if keep != kept_sorted:
        d0, d1 = dims[kept_sorted[0]], dims[kept_sorted[1]]
        expected = expected.reshape(d0, d1, d0, d1).transpose(1, 0, 3, 2).reshape(d0 * d1, -1)
    assert np.abs(partial_trace_array(rho, dims, keep) - expected).max() < 1e-12


def test_partial_trace_composes():
    rng = np.random.default_rng(3)
    dims = (2, 3, 2)
    rho = random_density_matrix(12, rng)
    step = partial_trace_array(partial_trace_array(rho, dims, [0, 1]), (2, 3), [1])
    assert np.abs(step - partial_trace_array(rho, dims, [1])).max() < 1e-12


def test_permute_modes_round_trip():
    rng = np.random.default_rng(4)
    space = ModeSpace((2, 3, 4))
    op = DenseOperator(space, space, _rand((24, 24), rng))
    p = permute_modes(op, (2, 0, 1))
    assert p.space_out.dims == (4, 2, 3)
    back = permute_modes(p, (1, 2, 0))
    assert np.abs(back.entries - op.entries).max() == 0


def test_schmidt_product_state():
    k = DenseKet.basis(ModeSpace((2, 2)), (1, 0))
    c, _, _ = schmidt_decompose(k, [0])
    assert len(c) == 1 and abs(c[0] - 1) < 1e-15


def test_schmidt_bell():
    bell = DenseKet(ModeSpace((2, 2)), np.array([1, 0, 0, 1]) / np.sqrt(2))
    c, _, _ = schmidt_decompose(bell, [0])
    assert np.abs(c - 1 / np.sqrt(2)).max() < 1e-15


def test_schmidt_reconstruction():
    rng = np.random.default_rng(5)
    k = random_haar_ket(16, rng)
    k = DenseKet(ModeSpace((2, 2, 2, 2)), k.amplitudes)
    c, lefts, rights = schmidt_decompose(k, [0, 1])
    rec = sum(ci * np.kron(l.amplitudes, r.amplitudes) for ci, l, r in zip(c, lefts, rights))
    assert np.abs(rec - k.amplitudes).max() < 1e-10


def test_psd_functions():
    s = ModeSpace((2,))
    assert np.abs(psd_func(DenseOperator.identity(s), "sqrt").entries - np.eye(2)).max() < 1e-15
    four = DenseOperator.square(s, 4 * np.eye(2))
    assert np.abs(psd_func(four, "inv_sqrt").entries - np.eye(2) / 2).max() < 1e-15
    degenerate = DenseOperator.square(s, np.diag([1.0, 0.0]))
    assert np.abs(psd_func(degenerate, "inv_sqrt").entries - np.diag([1.0, 0.0])).max() < 1e-15


def test_inv_sqrt_gives_range_projector():
    rng = np.random.default_rng(6)
    g = _rand((6, 4), rng)
    a = g @ g.conj().T
    s = ModeSpace((6,))
    r = psd_func(DenseOperator.square(s, a), "inv_sqrt").entries
    q, _ = np.linalg.qr(g)
    assert np.abs(r @ a @ r - q @ q.conj().T).max() < 1e-8


def test_psd_rejects_negative():
    with pytest.raises(NotPSDError):
        psd_func(DenseOperator.square(ModeSpace((2,)), np.diag([1.0, -0.5])), "sqrt")


def test_norms_and_fidelity_examples():
    s = ModeSpace((2,))
    half = DenseOperator.maximally_mixed(s)
    zero = DenseKet.basis(s, 0).projector()
    assert norms_and_fidelity(half, half)["operator_norm"] == 0
    assert abs(fidelity(zero, half) - 1 / np.sqrt(2)) < 1e-12
    rng = np.random.default_rng(7)
    rho = DenseOperator.square(ModeSpace((3,)), random_density_matrix(3, rng))
    assert abs(fidelity(rho, rho) - 1) < 1e-7


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_fidelity_symmetric_and_bounded(seed):
    rng = np.random.default_rng(seed)
    a, b = random_density_matrix(3, rng), random_density_matrix(3, rng)
    f1, f2 = fidelity(a, b), fidelity(b, a)
    assert 0 <= f1 <= 1
    assert abs(f1 - f2) < 1e-7


def test_haar_ket_contract():
    assert np.abs(random_haar_ket(1, 0).amplitudes - np.array([1])).max() == 0
    assert np.array_equal(random_haar_ket(5, 9).amplitudes, random_haar_ket(5, 9).amplitudes)


def test_haar_first_moment():
    rng = np.random.default_rng(8)
    vals = np.array([abs(random_haar_ket(4, rng).amplitudes[0]) ** 2 for _ in range(10_000)])
    se = vals.std(ddof=1) / np.sqrt(len(vals))
    assert abs(vals.mean() - 0.25) < 3 * se
