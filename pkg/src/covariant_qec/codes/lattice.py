"""Truncated U(1)-covariant 1 -> 3 rotor code.

    |x>  ->  sum_{|y| <= K} |-3y, -x+y, 2(y+x)>      (momentum basis)

Each mode's basis is the set of momenta it can actually carry, so mode 0 holds
multiples of 3 and mode 2 holds even numbers.

Decoding after erasure of one mode is a short sequence of integer maps on the
two surviving momenta, ending in a register that holds ``x`` and a garbage
register holding (a bijective function of) the erased mode's value.  The
corrected sequences, with ``(a, b)`` the surviving momenta in mode order, are

    erased 0:  (a, b) -> (a, b-2a) -> (a, b/4) -> (a+b, b)      = (y, x)
    erased 1:  (a, b) -> (a/3, b/2) -> (-2a-b, a+b)              = (y-x, x)
    erased 2:  (a, b) -> (a/3, b)   -> (-2a-b, -a-b)             = (y+x, x)

Only erasure of mode 0 is exact under truncation.  For modes 1 and 2 the set of
``x`` compatible with a given erased value shrinks near the window edge, which
partially dephases the recovered state; the loss vanishes as K/L grows.  This
is forced: a finite-dimensional, charge-conserving code with a nontrivial
input charge cannot correct every single-mode erasure.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..channels import Channel
from ..groups import ChargeRep, total_charges
from ..hilbert import ModeSpace, pure_fidelity
from .base import Code, DecoderValidationError

log = logging.getLogger(__name__)

DECODER_TOL = 1e-12


@dataclass(frozen=True)
class LatticeWindow:
    L: int = 3
    K: int = 8

    def __post_init__(self):
        if self.L < 0 or self.K < 0:
            raise ValueError("window bounds must be non-negative")

    @property
    def input_charges(self) -> tuple[int, ...]:
        return tuple(range(-self.L, self.L + 1))

    def mode_charges(self) -> tuple[tuple[int, ...], ...]:
        L, K = self.L, self.K
        m0 = tuple(range(-3 * K, 3 * K + 1, 3))
        m1 = tuple(range(-L - K, L + K + 1))
        m2 = tuple(range(-2 * (K + L), 2 * (K + L) + 1, 2))
        return m0, m1, m2

    def check(self, mode_charges: Sequence[Sequence[int]] | None = None) -> None:
        m0, m1, m2 = (set(m) for m in (mode_charges or self.mode_charges()))
        for x in self.input_charges:
            for y in range(-self.K, self.K + 1):
                if -3 * y not in m0 or -x + y not in m1 or 2 * (y + x) not in m2:
                    raise ValueError(f"window ranges miss the encoded term x={x}, y={y}")


@dataclass(frozen=True)
class LatticeMap:
    """(a, b) -> matrix @ (a / div_a, b / div_b), defined when both divisions are exact."""

    matrix: tuple[tuple[int, int], tuple[int, int]] = ((1, 0), (0, 1))
    divisors: tuple[int, int] = (1, 1)
    name: str = ""

    def __post_init__(self):
        (p, q), (r, s) = self.matrix
        if p * s - q * r == 0:
            raise ValueError("lattice map must be injective (nonzero determinant)")

    def __call__(self, a: int, b: int) -> tuple[int, int] | None:
        da, db = self.divisors
        if a % da or b % db:
            return None
        a, b = a // da, b // db
        (p, q), (r, s) = self.matrix
        return p * a + q * b, r * a + s * b


@dataclass(frozen=True)
class LatticeDecoderSteps:
    erased: int
    steps: tuple[LatticeMap, ...]
    recovered_register: int = 1

    def run(self, a: int, b: int) -> tuple[int, int] | None:
        state = (a, b)
        for step in self.steps:
            state = step(*state)
            if state is None:
                return None
        return state


CORRECTED_STEPS = {
    0: LatticeDecoderSteps(
        0,
        (
            LatticeMap(((1, 0), (-2, 1)), name="(a,b)->(a,b-2a)"),
            LatticeMap(divisors=(1, 4), name="(a,4b)->(a,b)"),
            LatticeMap(((1, 1), (0, 1)), name="(a,b)->(a+b,b)"),
        ),
    ),
    1: LatticeDecoderSteps(
        1,
        (
            LatticeMap(divisors=(3, 2), name="(3a,2b)->(a,b)"),
            LatticeMap(((-2, -1), (1, 1)), name="(a,b)->(-2a-b,a+b)"),
        ),
    ),
    2: LatticeDecoderSteps(
        2,
        (
            LatticeMap(divisors=(3, 1), name="(3a,b)->(a,b)"),
            LatticeMap(((-2, -1), (-1, -1)), name="(a,b)->(-2a-b,-a-b)"),
        ),
    ),
}


def u1_lattice_encoder(window: LatticeWindow, normalize: bool = True) -> np.ndarray:
    charges = window.mode_charges()
    window.check(charges)
    pos = [{q: i for i, q in enumerate(m)} for m in charges]
    dims = tuple(len(m) for m in charges)
    xs = window.input_charges
    v = np.zeros((int(np.prod(dims)), len(xs)))
    for col, x in enumerate(xs):
        for y in range(-window.K, window.K + 1):
            idx = np.ravel_multi_index((pos[0][-3 * y], pos[1][-x + y], pos[2][2 * (y + x)]), dims)
            v[idx, col] += 1.0
    if normalize:
        v /= math.sqrt(2 * window.K + 1)
    return v


def lattice_decoder(window: LatticeWindow, erased: int, steps: LatticeDecoderSteps | None = None) -> Channel:
    """Channel: discard the erased mode, run the integer maps, keep the x register.

    Each garbage value labels one Kraus operator; basis states outside the
    maps' domain (or landing outside |x| <= L) are sent to a padding of extra
    Kraus operators so the channel stays trace preserving.
    """
    steps = CORRECTED_STEPS[erased] if steps is None else steps
    charges = window.mode_charges()
    dims = tuple(len(m) for m in charges)
    rest = [i for i in range(3) if i != erased]
    xs = window.input_charges
    xpos = {x: i for i, x in enumerate(xs)}
    d_in = len(xs)
    da, db = dims[rest[0]], dims[rest[1]]
    by_label: dict[int, list[tuple[int, int]]] = {}
    junk: list[int] = []
    for ia, a in enumerate(charges[rest[0]]):
        for ib, b in enumerate(charges[rest[1]]):
            col = ia * db + ib
            out = steps.run(a, b)
            if out is None:
                junk.append(col)
                continue
            x = out[steps.recovered_register]
            g = out[1 - steps.recovered_register]
            if x not in xpos:
                junk.append(col)
                continue
            by_label.setdefault(g, []).append((xpos[x], col))
    kraus = []
    for g in sorted(by_label):
        k = np.zeros((d_in, da * db))
        rows = [r for r, _ in by_label[g]]
        if len(set(rows)) != len(rows):
            raise DecoderValidationError(f"lattice map not injective on garbage value {g}")
        for r, c in by_label[g]:
            k[r, c] = 1.0
        kraus.append(k)
    for start in range(0, len(junk), d_in):
        k = np.zeros((d_in, da * db))
        for r, c in enumerate(junk[start : start + d_in]):
            k[r, c] = 1.0
        kraus.append(k)
    space_out = ModeSpace(dims)
    return Channel(space_out, ModeSpace((d_in,)), np.array(kraus), (erased,))


def validate_lattice_decoder(v: np.ndarray, dims, dec: Channel) -> float:
    """Worst recovery fidelity over window basis states and their uniform superposition."""
    k = v.shape[1]
    probes = [np.eye(k)[i] for i in range(k)] + [np.ones(k) / math.sqrt(k)]
    worst = 1.0
    for psi in probes:
        rho = dec.apply_pure(v @ psi)
        worst = min(worst, pure_fidelity(psi, rho))
    return worst


def u1_lattice_decoders(window: LatticeWindow, strict: bool = True) -> dict[int, Channel]:
    """Decoders for erasure of modes 0, 1, 2, validated at construction.

    With ``strict`` a decoder whose worst fidelity falls below 1 - 1e-12
    raises :class:`DecoderValidationError`; otherwise the shortfall is logged
    and recorded on the returned channels' dict under ``"validation"``.
    """
    v = u1_lattice_encoder(window)
    dims = tuple(len(m) for m in window.mode_charges())
    decs = {}
    for j in range(3):
        dec = lattice_decoder(window, j)
        worst = validate_lattice_decoder(v, dims, dec)
        if worst < 1 - DECODER_TOL:
            msg = f"lattice decoder for erased mode {j} reaches fidelity {worst:.6f} on the window (L={window.L}, K={window.K})"
            if strict:
                raise DecoderValidationError(msg)
            log.warning(msg)
        decs[j] = dec
    return decs


def u1_lattice_code(window: LatticeWindow | None = None) -> Code:
    window = LatticeWindow() if window is None else window
    charges = window.mode_charges()
    v = u1_lattice_encoder(window)
    dims = tuple(len(m) for m in charges)
    code = Code(
        "u1_lattice",
        ModeSpace((len(window.input_charges),)),
        ModeSpace(dims),
        encoder=v,
        charges_in=ChargeRep(window.input_charges),
        charges_out=tuple(ChargeRep(m) for m in charges),
        norm_constant=2 * window.K + 1,
        params={"L": window.L, "K": window.K},
    )
    code.decoders = u1_lattice_decoders(window, strict=False)
    code.diagnostics["decoder_validation"] = {
        j: validate_lattice_decoder(v, dims, dec) for j, dec in code.decoders.items()
    }
    return code


def charge_violation(encoder: np.ndarray, charges_in: ChargeRep, charges_out: Sequence[ChargeRep], tol: float = 0.0) -> int:
    """Max |total output charge - input charge| over nonzero encoder entries (exact integers)."""
    q_out = total_charges(charges_out)
    q_in = np.asarray(charges_in.charges, dtype=np.int64)
    rows, cols = np.nonzero(np.abs(encoder) > tol)
    if len(rows) == 0:
        return 0
    return int(np.abs(q_out[rows] - q_in[cols]).max())
