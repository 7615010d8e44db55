"""Tensor-product covariant codes: one copy of a base code per point of a G-set."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable

import numpy as np

from ..channels import ProductChannel, lowrank_difference_trace_norm
from ..groups import FiniteGroup, action_table, factor_permutation_rep
from ..hilbert import ModeSpace
from .base import Code, InstanceTooLarge
from .qutrit import transpose_channel_decoder

DEFAULT_ENTRY_BUDGET = 1 << 22


def left_multiplication(group: FiniteGroup) -> Callable[[int, int], int]:
    return group.op


def permutation_covariant_code(
    base: Code,
    group: FiniteGroup,
    action: Callable[[int, int], int] | None = None,
    n_points: int | None = None,
    budget: int = DEFAULT_ENTRY_BUDGET,
    dense: bool = True,
) -> Code:
    """E = E_0^{(x)|A|} with the group permuting the |A| blocks.

    ``action`` defaults to left multiplication of ``group`` on itself.  When
    ``dense`` is false (or the instance exceeds ``budget`` encoder entries and
    ``dense`` is "auto"), no dense encoder is built; covariance can still be
    checked through :func:`sparse_wiring_distances`.
    """
    action = group.op if action is None else action
    n_points = group.order if n_points is None else n_points
    action_table(group, action, n_points)
    if base.encoder is None:
        raise ValueError("base code needs a dense isometric encoder")
    d_in = base.space_in.total**n_points
    d_out = base.space_out.total**n_points
    if dense == "auto":
        dense = d_in * d_out <= budget
    if dense and d_in * d_out > budget:
        raise InstanceTooLarge(f"instance too large: encoder would have {d_in * d_out} entries (budget {budget})")

    space_in = ModeSpace(base.space_in.dims * n_points)
    space_out = ModeSpace(base.space_out.dims * n_points)
    code = Code(
        "product",
        space_in,
        space_out,
        group=group,
        params={"n_points": n_points, "base": base.kind, "group": group.name},
    )
    code.diagnostics["base"] = base
    code.diagnostics["action"] = action
    if dense:
        code.encoder = reduce(np.kron, [base.encoder] * n_points)
        code.rep_in = factor_permutation_rep(group, action, base.space_in, n_points)
        code.rep_out = factor_permutation_rep(group, action, base.space_out, n_points)
    code.decoders = {j: block_decoder(base, n_points, j) for j in range(space_out.n_modes)}
    return code


def block_decoder(base: Code, n_points: int, j: int) -> ProductChannel:
    """Decode every block; the block containing erased mode ``j`` uses its erasure decoder."""
    nb = base.space_out.n_modes
    block, local = divmod(j, nb)
    clean = transpose_channel_decoder(base.encoder, base.space_out, ())
    erased = base.decoders.get(local) or transpose_channel_decoder(base.encoder, base.space_out, (local,))
    factors = []
    for b in range(n_points):
        modes = tuple(range(b * nb, (b + 1) * nb))
        factors.append((erased if b == block else clean, modes))
    return ProductChannel(ModeSpace(base.space_out.dims * n_points), tuple(factors))


@dataclass(frozen=True)
class SparseChoiVector:
    """Choi vector of an isometric channel stored by its nonzero entries.

    ``out_digits``/``in_digits`` hold the per-block basis index of each entry;
    permuting blocks is a column permutation of these arrays.
    """

    out_digits: np.ndarray
    in_digits: np.ndarray
    values: np.ndarray
    d_out_block: int
    d_in_block: int

    def flat_index(self) -> np.ndarray:
        nb = self.out_digits.shape[1]
        o = np.zeros(len(self.values), dtype=np.int64)
        i = np.zeros(len(self.values), dtype=np.int64)
        for b in range(nb):
            o = o * self.d_out_block + self.out_digits[:, b]
            i = i * self.d_in_block + self.in_digits[:, b]
        return o * (self.d_in_block**nb) + i

    def permute_blocks(self, order) -> "SparseChoiVector":
        """New block ``a`` takes old block ``order[a]`` on both input and output."""
        order = list(order)
        return SparseChoiVector(
            self.out_digits[:, order], self.in_digits[:, order], self.values, self.d_out_block, self.d_in_block
        )


def sparse_product_choi(base_encoder: np.ndarray, n_blocks: int, tol: float = 0.0) -> SparseChoiVector:
    rows, cols = np.nonzero(np.abs(base_encoder) > tol)
    vals = base_encoder[rows, cols]
    nnz = len(vals)
    combos = np.array(np.unravel_index(np.arange(nnz**n_blocks), (nnz,) * n_blocks)).T
    values = np.prod(vals[combos], axis=1)
    return SparseChoiVector(rows[combos], cols[combos], values, base_encoder.shape[0], base_encoder.shape[1])


def sparse_distance(a: SparseChoiVector, b: SparseChoiVector) -> float:
    """Choi trace distance between two rank-one (isometric) channels."""
    ia, ib = a.flat_index(), b.flat_index()
    support = np.union1d(ia, ib)
    va = np.zeros(len(support), dtype=complex)
    vb = np.zeros(len(support), dtype=complex)
    va[np.searchsorted(support, ia)] = a.values
    vb[np.searchsorted(support, ib)] = b.values
    return lowrank_difference_trace_norm(va[:, None], vb[:, None])


def sparse_wiring_distances(code: Code) -> list[float]:
    """Per group element, distance between E(U_in . U_in^dag) and U_out E(.) U_out^dag.

    Works on the nonzero entries of E_0^{(x)|A|} only, so instances far beyond
    the dense budget (e.g. six qutrit blocks) are checked exactly.
    """
    base: Code = code.diagnostics["base"]
    group = code.group
    n_points = code.params["n_points"]
    table = action_table(group, code.diagnostics["action"], n_points)
    plain = sparse_product_choi(base.encoder, n_points)
    out = []
    for g in group.elements():
        ginv = group.inv[g]
        order = [int(table[ginv, a]) for a in range(n_points)]
        # U_out E U_in^dag maps |I'> to |U_in I'> and |O'> to |U_out O'>
        out.append(sparse_distance(plain, plain.permute_blocks(order)))
    return out
