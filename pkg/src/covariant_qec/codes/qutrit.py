"""The 3-qutrit threshold code and generic transpose-channel decoders."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..channels import Channel
from ..hilbert import ModeSpace, psd_inv_sqrt_array
from .base import Code


def qutrit_encoder() -> np.ndarray:
    """|j> -> (1/sqrt 3) sum_k |k, k+j, k+2j>, indices mod 3."""
    v = np.zeros((27, 3), dtype=complex)
    for j in range(3):
        for k in range(3):
            idx = np.ravel_multi_index((k, (k + j) % 3, (k + 2 * j) % 3), (3, 3, 3))
            v[idx, j] = 1 / math.sqrt(3)
    return v


def _complete(kraus: list[np.ndarray], d_out: int, d_in: int) -> list[np.ndarray]:
    """Append rank-one Kraus terms so the family becomes trace preserving."""
    s = sum((k.conj().T @ k for k in kraus), np.zeros((d_in, d_in), dtype=complex))
    w, vecs = np.linalg.eigh(np.eye(d_in) - 0.5 * (s + s.conj().T))
    extra = []
    for lam, v in zip(w, vecs.T):
        if lam > 1e-13:
            k = np.zeros((d_out, d_in), dtype=complex)
            k[0] = math.sqrt(lam) * v.conj()
            extra.append(k)
    return kraus + extra


def transpose_channel_decoder(
    encoder: np.ndarray,
    space_out: ModeSpace,
    erased: Sequence[int] = (),
) -> Channel:
    """Petz recovery (reference: maximally mixed code state) after discarding ``erased``.

    Exact whenever erasure of ``erased`` is correctable; the returned channel
    acts on the full output space and ignores the erased modes.
    """
    erased = tuple(sorted(space_out.check_modes(erased)))
    dims = space_out.dims
    keep = tuple(i for i in range(len(dims)) if i not in erased)
    k_in = encoder.shape[1]
    t = encoder.reshape(dims + (k_in,)).transpose(erased + keep + (len(dims),))
    d_e = int(np.prod([dims[i] for i in erased], dtype=np.int64))
    d_keep = int(np.prod([dims[i] for i in keep], dtype=np.int64))
    n_ops = t.reshape(d_e, d_keep, k_in)  # N_m = (<m|_erased (x) I) V
    n_of_i = np.einsum("mik,mjk->ij", n_ops, n_ops.conj())
    inv = psd_inv_sqrt_array(n_of_i, cutoff=1e-12)
    kraus = [n.conj().T @ inv for n in n_ops]
    kraus = _complete(kraus, k_in, d_keep)
    return Channel(space_out, ModeSpace((k_in,)), np.array(kraus), erased)


def qutrit_base_code() -> Code:
    v = qutrit_encoder()
    space_in, space_out = ModeSpace((3,)), ModeSpace((3, 3, 3))
    code = Code("qutrit", space_in, space_out, encoder=v)
    code.decoders = {j: transpose_channel_decoder(v, space_out, (j,)) for j in range(3)}
    return code


def repetition_qubit_code() -> Code:
    """|x> -> |x,x,x>; not erasure correcting (used as a counterexample)."""
    v = np.zeros((8, 2), dtype=complex)
    v[0, 0] = v[7, 1] = 1.0
    return Code("repetition", ModeSpace((2,)), ModeSpace((2, 2, 2)), encoder=v)


def identity_embedding_code(dim: int = 2, n: int = 3) -> Code:
    """|x> -> |x,0,...,0>; the input sits unprotected in mode 0."""
    v = np.zeros((dim**n, dim), dtype=complex)
    for x in range(dim):
        v[x * dim ** (n - 1), x] = 1.0
    return Code("identity_embedding", ModeSpace((dim,)), ModeSpace((dim,) * n), encoder=v)
