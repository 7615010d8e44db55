"""Charge-conserving isometries parametrized sector by sector.

Input basis states of charge q map into the total-charge-q subspace of the
output.  Within a sector of output dimension D holding m input states, the
columns come from a complex D x m block Z through the polar chart
Z (Z^dag Z)^{-1/2}; the block is read from 2 D m consecutive real parameters
(real parts, then imaginary parts).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..groups import ChargeRep, total_charges
from ..hilbert import ModeSpace
from .base import Code


class EmptySectorError(ValueError):
    pass


@dataclass(frozen=True)
class SectorLayout:
    charge: int
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    offset: int

    @property
    def n_params(self) -> int:
        return 2 * len(self.outputs) * len(self.inputs)


def sector_layout(charges_in: ChargeRep, charges_out: Sequence[ChargeRep]) -> list[SectorLayout]:
    q_out = total_charges(charges_out)
    q_in = np.asarray(charges_in.charges)
    layout, offset, bad = [], 0, []
    for q in sorted(set(q_in.tolist())):
        ins = tuple(int(i) for i in np.flatnonzero(q_in == q))
        outs = tuple(int(i) for i in np.flatnonzero(q_out == q))
        if len(outs) < len(ins):
            bad.append(q)
            continue
        sec = SectorLayout(int(q), ins, outs, offset)
        layout.append(sec)
        offset += sec.n_params
    if bad:
        raise EmptySectorError(f"output charge sector too small for input charge(s) {bad}")
    return layout


def u1_param_count(charges_in: ChargeRep, charges_out: Sequence[ChargeRep]) -> int:
    return sum(s.n_params for s in sector_layout(charges_in, charges_out))


def _polar(z: np.ndarray) -> np.ndarray:
    u, s, vh = np.linalg.svd(z, full_matrices=False)
    if s.min(initial=np.inf) < 1e-14 * max(s.max(initial=0.0), 1e-300) or s.max(initial=0.0) == 0.0:
        raise ValueError("degenerate chart point: sector block is rank deficient")
    return u @ vh


def u1_covariant_isometry(
    charges_in: ChargeRep,
    charges_out: Sequence[ChargeRep],
    params: np.ndarray,
) -> np.ndarray:
    layout = sector_layout(charges_in, charges_out)
    params = np.asarray(params, dtype=float)
    need = sum(s.n_params for s in layout)
    if params.shape != (need,):
        raise ValueError(f"expected {need} parameters, got shape {params.shape}")
    d_out = int(np.prod([r.dim for r in charges_out]))
    v = np.zeros((d_out, charges_in.dim), dtype=complex)
    for sec in layout:
        d, m = len(sec.outputs), len(sec.inputs)
        p = params[sec.offset : sec.offset + sec.n_params]
        z = (p[: d * m] + 1j * p[d * m :]).reshape(d, m)
        v[np.ix_(sec.outputs, sec.inputs)] = _polar(z)
    return v


def u1_isometry_code(charges_in: ChargeRep, charges_out: Sequence[ChargeRep], params: np.ndarray) -> Code:
    v = u1_covariant_isometry(charges_in, charges_out, params)
    return Code(
        "u1_isometry",
        ModeSpace((charges_in.dim,)),
        ModeSpace(tuple(r.dim for r in charges_out)),
        encoder=v,
        charges_in=charges_in,
        charges_out=tuple(charges_out),
        params={"charges_in": list(charges_in.charges), "charges_out": [list(r.charges) for r in charges_out]},
    )
