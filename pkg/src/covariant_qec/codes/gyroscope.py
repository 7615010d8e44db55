"""Finite-group form of the gyroscope-append encoding.

The base code is rotated into frame g, two ancillas record g, and the result
is averaged over the group.  The decoder reads a surviving ancilla, undoes the
frame, and runs the base decoder.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ..channels import Channel
from ..groups import FiniteGroup, Representation, permutation_representation, regular_representation
from ..hilbert import ModeSpace
from .base import Code
from .qutrit import transpose_channel_decoder


def embedded_regular_action(group: FiniteGroup, dim: int) -> Callable[[int, int], int]:
    """Regular action on the first |G| basis states, trivial on the rest."""
    d = group.order
    if dim < d:
        raise ValueError(f"mode dimension {dim} is smaller than |G| = {d}; pass an explicit mode action")

    def act(g: int, x: int) -> int:
        return group.op(g, x) if x < d else x

    return act


def gyroscope_code(
    base: Code,
    group: FiniteGroup,
    mode_action: Callable[[int, int], int] | None = None,
) -> Code:
    if base.encoder is None or base.space_in.n_modes != 1:
        raise ValueError("base code must be a single-mode isometric code")
    q = base.space_in.total
    if any(d != q for d in base.space_out.dims):
        raise ValueError("base code modes must all match the input dimension")
    mode_action = embedded_regular_action(group, q) if mode_action is None else mode_action
    mode_rep = permutation_representation(group, mode_action, q)
    anc_rep = regular_representation(group)
    n = base.space_out.n_modes
    d = group.order

    v = base.encoder
    kraus = []
    for g in group.elements():
        u = mode_rep(g)
        un = u
        for _ in range(n - 1):
            un = np.kron(un, u)
        frame = un @ v @ u.conj().T
        anc = np.zeros((d * d, 1))
        anc[g * d + g, 0] = 1.0
        kraus.append(np.kron(frame, anc) / math.sqrt(d))
    space_in = ModeSpace((q,))
    space_out = ModeSpace(base.space_out.dims + (d, d))
    channel = Channel(space_in, space_out, np.array(kraus))

    rep_out = mode_rep.power(n).tensor(anc_rep).tensor(anc_rep)
    code = Code(
        "gyroscope",
        space_in,
        space_out,
        channel=channel,
        group=group,
        rep_in=mode_rep,
        rep_out=rep_out,
        params={"group": group.name, "base": base.kind},
    )
    code.diagnostics["mode_rep"] = mode_rep
    code.decoders = {j: gyroscope_decoder(base, mode_rep, group, j) for j in range(n + 2)}
    return code


def gyroscope_decoder(base: Code, mode_rep: Representation, group: FiniteGroup, j: int) -> Channel:
    """Measure a surviving ancilla in {|h>}, undo frame h, decode the code modes.

    Measurement outcomes are summed, so the whole procedure is one channel.
    """
    n = base.space_out.n_modes
    d = group.order
    q = base.space_in.total
    anc = (n, n + 1)
    measured = anc[1] if j == anc[0] else anc[0]
    discard = tuple(sorted({j} | ({a for a in anc if a != measured})))
    code_erased = (j,) if j < n else ()
    base_dec = transpose_channel_decoder(base.encoder, base.space_out, code_erased)
    kept_code = [i for i in range(n) if i not in code_erased]
    space_out = ModeSpace(base.space_out.dims + (d, d))

    kraus = []
    for h in group.elements():
        u = mode_rep(h)
        uk = np.eye(1)
        for _ in kept_code:
            uk = np.kron(uk, u)
        bra_h = np.zeros((1, d))
        bra_h[0, h] = 1.0
        for r in base_dec.kraus:
            kraus.append(np.kron(u @ r @ uk.conj().T, bra_h))
    return Channel(space_out, ModeSpace((q,)), np.array(kraus), discard)
