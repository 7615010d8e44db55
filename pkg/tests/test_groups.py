import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from covariant_qec.channels import choi_distance, identity_channel, isometry_channel
from covariant_qec.groups import (
    ChargeRep,
    FiniteGroup,
    GroupAxiomError,
    cyclic_group,
    factor_permutation_rep,
    parse_group_spec,
    permutation_representation,
    read_group_table,
    regular_representation,
    symmetric_group,
    symmetric_permutations,
    total_charges,
    trivial_representation,
    twirl_channel,
    u1_unitary,
    write_group_table,
)
from covariant_qec.hilbert import ModeSpace


def test_group_examples():
    assert cyclic_group(1).order == 1
    s3 = symmetric_group(3)
    assert s3.order == 6 and not s3.is_abelian()
    assert cyclic_group(4).op(1, 3) == 0


def test_group_axioms_rejected():
    with pytest.raises(GroupAxiomError):
        FiniteGroup(np.array([[0, 1], [1, 1]]))
    with pytest.raises(GroupAxiomError):
        FiniteGroup(np.array([[0, 2], [1, 0]]))
    # a latin square without associativity
    bad = np.array([[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]])
    with pytest.raises(GroupAxiomError):
        FiniteGroup(bad)


@pytest.mark.parametrize("group", [cyclic_group(1), cyclic_group(5), symmetric_group(3), symmetric_group(4)])
def test_inverses_and_identity(group):
    for g in group.elements():
        assert group.op(g, group.inv[g]) == group.identity
        assert group.op(group.identity, g) == g


def test_group_spec_parsing(tmp_path):
    assert parse_group_spec("Z3").order == 3
    assert parse_group_spec("S3").order == 6
    assert parse_group_spec("cyclic:4").order == 4
    path = tmp_path / "g.txt"
    write_group_table(symmetric_group(3), str(path))
    g = parse_group_spec(f"file:{path}")
    assert np.array_equal(g.mul, symmetric_group(3).mul)
    assert np.array_equal(read_group_table(str(path)).mul, g.mul)
    with pytest.raises(ValueError):
        parse_group_spec("Q8")


def test_regular_rep_examples():
    triv = regular_representation(cyclic_group(1))
    assert np.array_equal(triv(0), np.eye(1))
    z2 = regular_representation(cyclic_group(2))
    assert np.array_equal(z2(1), np.array([[0, 1], [1, 0]]))
    s3 = regular_representation(symmetric_group(3))
    assert s3.homomorphism_residual() == 0
    for g in range(6):
        u = s3(g).real
        assert set(np.unique(u)) <= {0.0, 1.0}
        assert np.array_equal(u.sum(axis=0), np.ones(6))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 7))
def test_cyclic_regular_rep_is_homomorphism(d):
    rep = regular_representation(cyclic_group(d))
    assert rep.homomorphism_residual() == 0
    assert rep.unitarity_residual() == 0


def test_factor_permutation_trivial_group():
    rep = factor_permutation_rep(cyclic_group(1), lambda g, a: a, ModeSpace((3,)), n_points=2)
    assert np.array_equal(rep(0), np.eye(9))


def test_factor_permutation_z2_is_swap():
    rep = factor_permutation_rep(cyclic_group(2), cyclic_group(2).op, ModeSpace((2,)))
    swap = np.zeros((4, 4))
    for u in range(2):
        for v in range(2):
            swap[2 * v + u, 2 * u + v] = 1
    assert np.array_equal(rep(1).real, swap)


def test_factor_permutation_s3_moves_blocks():
    s3 = symmetric_group(3)
    perms = symmetric_permutations(3)
    rep = factor_permutation_rep(s3, lambda g, a: perms[g][a], ModeSpace((3,)), n_points=3)
    assert rep.homomorphism_residual() == 0
    rng = np.random.default_rng(0)
    vecs = [rng.standard_normal(3) for _ in range(3)]
    for g in s3.elements():
        ginv = perms[s3.inv[g]]
        expected = np.kron(np.kron(vecs[ginv[0]], vecs[ginv[1]]), vecs[ginv[2]])
        x = np.kron(np.kron(vecs[0], vecs[1]), vecs[2])
        assert np.abs(rep.apply(g, x) - expected).max() < 1e-15
        assert np.abs(rep(g) @ x - expected).max() < 1e-15


def test_u1_unitary_examples():
    assert np.array_equal(u1_unitary(ChargeRep((0, 1, 5)), 0.0), np.eye(3))
    assert np.abs(u1_unitary(ChargeRep((0, 1)), np.pi) - np.diag([1, -1])).max() < 1e-15
    theta = 0.37
    u = u1_unitary(ChargeRep((3, 0, -3)), theta)
    assert np.abs(u - np.diag([np.exp(3j * theta), 1, np.exp(-3j * theta)])).max() < 1e-15


def test_total_charges_row_major():
    q = total_charges([ChargeRep((0, 1)), ChargeRep((0, 2))])
    assert list(q) == [0, 2, 1, 3]


def test_twirl_trivial_group_unchanged():
    rng = np.random.default_rng(1)
    v, _ = np.linalg.qr(rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2)))
    ch = isometry_channel(v)
    g = cyclic_group(1)
    tw = twirl_channel(ch, g, trivial_representation(g, ModeSpace((2,))), trivial_representation(g, ModeSpace((4,))))
    assert choi_distance(tw, ch) < 1e-12


def test_twirl_fixes_covariant_channel():
    g = cyclic_group(3)
    rep = regular_representation(g)
    ch = identity_channel(ModeSpace((3,)))
    assert choi_distance(twirl_channel(ch, g, rep, rep), ch) < 1e-12


def test_permutation_rep_matches_action():
    s3 = symmetric_group(3)
    perms = symmetric_permutations(3)
    rep = permutation_representation(s3, lambda g, a: perms[g][a], 3)
    for g in s3.elements():
        for a in range(3):
            e = np.zeros(3)
            e[a] = 1
            assert np.argmax(rep(g).real @ e) == perms[g][a]
