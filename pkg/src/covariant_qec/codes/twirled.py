"""Covariant codes obtained by twirling a non-covariant encoding."""

from __future__ import annotations

import numpy as np

from ..groups import (
    FiniteGroup,
    ModePermutationRep,
    permutation_representation,
    regular_representation,
    symmetric_group,
    symmetric_permutations,
    trivial_representation,
    twirl_channel,
)
from ..hilbert import ModeSpace
from .base import Code
from .gyroscope import embedded_regular_action
from .qutrit import qutrit_base_code


def mode_permutation_rep(group: FiniteGroup, perms, space: ModeSpace) -> ModePermutationRep:
    """S_n permuting the modes of ``space``: mode p(k) of the output holds input mode k."""
    orders = tuple(tuple(int(i) for i in np.argsort(p)) for p in perms)
    return ModePermutationRep(group, space, orders)


def qutrit_with_s3_context() -> Code:
    """The qutrit code with S3 permuting its three output qutrits and acting trivially on the input.

    The plain encoding is not covariant under this pair of representations.
    """
    code = qutrit_base_code()
    s3 = symmetric_group(3)
    code.group = s3
    code.rep_in = trivial_representation(s3, code.space_in)
    code.rep_out = mode_permutation_rep(s3, symmetric_permutations(3), code.space_out)
    return code


def twirled_code(code: Code, group: FiniteGroup | None = None, rep_in=None, rep_out=None) -> Code:
    group = code.group if group is None else group
    rep_in = code.rep_in if rep_in is None else rep_in
    rep_out = code.rep_out if rep_out is None else rep_out
    channel = twirl_channel(code.encoding_channel(), group, rep_in, rep_out)
    out = Code(
        "twirled",
        code.space_in,
        code.space_out,
        channel=channel,
        group=group,
        rep_in=rep_in,
        rep_out=rep_out,
        params={"base": code.kind, "group": group.name},
    )
    out.diagnostics["base"] = code
    return out


def gyroscope_as_twirl(base: Code, group: FiniteGroup) -> Code:
    """Twirl of E_0 (x) |e><e| (x) |e><e| under (mode rep, mode rep^n (x) regular (x) regular)."""
    q = base.space_in.total
    n = base.space_out.n_modes
    d = group.order
    mode_rep = permutation_representation(group, embedded_regular_action(group, q), q)
    anc = regular_representation(group)
    rep_out = mode_rep.power(n).tensor(anc).tensor(anc)
    e = np.zeros((d * d, 1))
    e[group.identity * d + group.identity, 0] = 1.0
    seeded = Code(
        "gyroscope_seed",
        base.space_in,
        ModeSpace(base.space_out.dims + (d, d)),
        encoder=np.kron(base.encoder, e),
    )
    return twirled_code(seeded, group, mode_rep, rep_out)

