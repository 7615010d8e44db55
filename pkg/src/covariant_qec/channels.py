"""Quantum channels as Kraus families.

A :class:`Channel` may discard some input modes before its Kraus operators
act; this keeps decoders for large codes small (the discarded mode of an
erasure is never touched).  ``full_kraus`` expands the discard into ordinary
Kraus operators when a plain Kraus family is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .hilbert import (
    DenseOperator,
    ModeSpace,
    _as_space,
    partial_trace_array,
    trace_norm,
)

TP_TOL = 1e-9


@dataclass(frozen=True)
class Channel:
    space_in: ModeSpace
    space_out: ModeSpace
    kraus: np.ndarray = field(repr=False)
    discard: tuple[int, ...] = ()

    def __post_init__(self):
        si, so = _as_space(self.space_in), _as_space(self.space_out)
        discard = si.check_modes(self.discard)
        keep_dim = int(np.prod([d for i, d in enumerate(si.dims) if i not in discard], dtype=np.int64))
        k = np.asarray(self.kraus, dtype=complex)
        if k.ndim == 2:
            k = k[None]
        if k.shape[1:] != (so.total, keep_dim):
            raise ValueError(f"Kraus shape {k.shape[1:]} does not match ({so.total}, {keep_dim})")
        k.setflags(write=False)
        object.__setattr__(self, "space_in", si)
        object.__setattr__(self, "space_out", so)
        object.__setattr__(self, "discard", tuple(sorted(discard)))
        object.__setattr__(self, "kraus", k)

    @property
    def keep(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.space_in.n_modes) if i not in self.discard)

    @property
    def n_kraus(self) -> int:
        return self.kraus.shape[0]

    def full_kraus(self) -> np.ndarray:
        if not self.discard:
            return self.kraus
        dims = self.space_in.dims
        keep = self.keep
        keep_dims = tuple(dims[i] for i in keep)
        d_out = self.space_out.total
        out = []
        for e in np.ndindex(*(dims[i] for i in self.discard)):
            sel = dict(zip(self.discard, e))
            for k in self.kraus:
                full = np.zeros((d_out,) + dims, dtype=complex)
                idx = (slice(None),) + tuple(sel[i] if i in sel else slice(None) for i in range(len(dims)))
                full[idx] = k.reshape((d_out,) + keep_dims)
                out.append(full.reshape(d_out, -1))
        return np.array(out)

    def trace_preservation_residual(self) -> float:
        k = self.kraus
        s = np.einsum("kij,kil->jl", k.conj(), k)
        return float(np.abs(s - np.eye(s.shape[0])).max(initial=0.0))

    def is_trace_preserving(self, tol: float = TP_TOL) -> bool:
        return self.trace_preservation_residual() <= tol

    def choi(self) -> "ChoiMatrix":
        return choi(self)

    def purify_output(self, psi: np.ndarray) -> np.ndarray:
        """Matrix W with W W^dag = channel(|psi><psi|); discarded modes join the environment."""
        dims = self.space_in.dims
        keep, disc = self.keep, self.discard
        t = np.asarray(psi).reshape(dims).transpose(keep + disc)
        dk = int(np.prod([dims[i] for i in keep], dtype=np.int64))
        m = t.reshape(dk, -1)
        w = np.einsum("koi,ie->oke", self.kraus, m)
        return w.reshape(self.space_out.total, -1)

    def apply_pure(self, psi: np.ndarray) -> np.ndarray:
        w = self.purify_output(psi)
        return w @ w.conj().T

    def simplified(self, tol: float = 1e-12) -> "Channel":
        """Same channel with a minimal Kraus family from the Choi eigendecomposition."""
        full = self.full_kraus()
        x = full.reshape(full.shape[0], -1).T
        # low-rank eigendecomposition of X X^dag via the small Gram matrix
        g = x.conj().T @ x
        w, v = np.linalg.eigh(0.5 * (g + g.conj().T))
        keep = w > tol * max(w.max(initial=0.0), 1e-300)
        kr = (x @ v[:, keep]).T.reshape(-1, self.space_out.total, self.space_in.total)
        return Channel(self.space_in, self.space_out, kr)


@dataclass(frozen=True)
class ChoiMatrix:
    operator: DenseOperator

    @property
    def entries(self) -> np.ndarray:
        return self.operator.entries


def _space(space) -> ModeSpace:
    return _as_space(space)


def identity_channel(space) -> Channel:
    space = _space(space)
    return Channel(space, space, np.eye(space.total)[None])


def unitary_channel(u, space=None) -> Channel:
    if isinstance(u, DenseOperator):
        return Channel(u.space_in, u.space_out, u.entries[None])
    u = np.asarray(u)
    space = ModeSpace((u.shape[1],)) if space is None else _space(space)
    return Channel(space, space, u[None])


def isometry_channel(v, space_in=None, space_out=None) -> Channel:
    if isinstance(v, DenseOperator):
        return Channel(v.space_in, v.space_out, v.entries[None])
    v = np.asarray(v)
    si = ModeSpace((v.shape[1],)) if space_in is None else _space(space_in)
    so = ModeSpace((v.shape[0],)) if space_out is None else _space(space_out)
    return Channel(si, so, v[None])


def completely_depolarizing(space) -> Channel:
    space = _space(space)
    d = space.total
    kraus = np.zeros((d * d, d, d))
    for i in range(d):
        for j in range(d):
            kraus[i * d + j, i, j] = 1.0 / math.sqrt(d)
    return Channel(space, space, kraus)


def apply(ch: Channel, rho) -> DenseOperator:
    m = rho.entries if isinstance(rho, DenseOperator) else np.asarray(rho, dtype=complex)
    d = ch.space_in.total
    if m.shape != (d, d):
        raise ValueError(f"state of shape {m.shape} does not match channel input dimension {d}")
    if ch.discard:
        m = partial_trace_array(m, ch.space_in.dims, ch.keep)
    k = ch.kraus
    out = np.einsum("kij,jl,kml->im", k, m, k.conj())
    return DenseOperator(ch.space_out, ch.space_out, out)


def compose(a: Channel, b: Channel) -> Channel:
    """b after a."""
    if a.space_out.total != b.space_in.total:
        raise ValueError("dimension mismatch in channel composition")
    kb = b.full_kraus()
    kraus = np.einsum("bij,ajk->baik", kb, a.kraus).reshape(-1, b.space_out.total, a.kraus.shape[2])
    return Channel(a.space_in, b.space_out, kraus, a.discard)


def tensor_channels(a: Channel, b: Channel) -> Channel:
    ka, kb = a.full_kraus(), b.full_kraus()
    kraus = np.einsum("aij,bkl->abikjl", ka, kb).reshape(
        ka.shape[0] * kb.shape[0], ka.shape[1] * kb.shape[1], ka.shape[2] * kb.shape[2]
    )
    return Channel(a.space_in.concat(b.space_in), a.space_out.concat(b.space_out), kraus)


def erase_and_fill(rho, j: int) -> DenseOperator:
    """tau_j (x) tr_j(rho), with the fresh maximally mixed mode left at position j."""
    if not isinstance(rho, DenseOperator):
        raise TypeError("erase_and_fill needs a DenseOperator")
    space = rho.space_in
    j = space.check_modes([j])[0]
    dims = space.dims
    others = tuple(i for i in range(len(dims)) if i != j)
    red = partial_trace_array(rho.entries, dims, others)
    dj = dims[j]
    full = np.kron(np.eye(dj) / dj, red)
    # currently ordered (j, others...); move j back into place
    cur = (j,) + others
    order = tuple(cur.index(i) for i in range(len(dims)))
    n = len(dims)
    cur_dims = tuple(dims[i] for i in cur)
    t = full.reshape(cur_dims + cur_dims).transpose(order + tuple(n + o for o in order))
    return DenseOperator(space, space, t.reshape(full.shape))


def erasure_channel(space, j: int) -> Channel:
    """Kraus family {|m><k|_j (x) I / sqrt(d_j)} realising :func:`erase_and_fill`."""
    space = _space(space)
    j = space.check_modes([j])[0]
    dims = space.dims
    dj = dims[j]
    before = int(np.prod(dims[:j], dtype=np.int64))
    after = int(np.prod(dims[j + 1 :], dtype=np.int64))
    kraus = []
    for m in range(dj):
        for k in range(dj):
            e = np.zeros((dj, dj))
            e[m, k] = 1.0 / math.sqrt(dj)
            kraus.append(np.kron(np.kron(np.eye(before), e), np.eye(after)))
    return Channel(space, space, np.array(kraus))


def choi_vectors(ch: Channel) -> np.ndarray:
    """Columns |K_k>> = sum_i K_k|i> (x) |i>, so J = X X^dag (un-normalized)."""
    full = ch.full_kraus()
    return full.reshape(full.shape[0], -1).T


def choi(ch: Channel) -> ChoiMatrix:
    x = choi_vectors(ch)
    space = ch.space_out.concat(ch.space_in)
    return ChoiMatrix(DenseOperator(space, space, x @ x.conj().T))


def lowrank_difference_trace_norm(x: np.ndarray, y: np.ndarray) -> float:
    """|| X X^dag - Y Y^dag ||_1 computed inside span(X, Y).

    Uses X X^dag - Y Y^dag = (D S^dag + S D^dag) / 2 with D = X - Y, S = X + Y,
    so nearly equal channels give a result proportional to |D| rather than to
    roundoff in |X|^2.
    """
    if x.shape[1] != y.shape[1]:
        w = max(x.shape[1], y.shape[1])
        x = np.pad(x, ((0, 0), (0, w - x.shape[1])))
        y = np.pad(y, ((0, 0), (0, w - y.shape[1])))
    k = x.shape[1]
    r = np.linalg.qr(np.concatenate([x - y, x + y], axis=1), mode="r")
    rd, rs = r[:, :k], r[:, k:]
    m = 0.5 * (rd @ rs.conj().T + rs @ rd.conj().T)
    return float(np.abs(np.linalg.eigvalsh(0.5 * (m + m.conj().T))).sum())


def choi_distance(a, b) -> float:
    """Trace norm of the difference of (un-normalized) Choi matrices."""
    if isinstance(a, ChoiMatrix) and isinstance(b, ChoiMatrix):
        return trace_norm(a.entries - b.entries)
    if a.space_in.total != b.space_in.total or a.space_out.total != b.space_out.total:
        raise ValueError("channels act on different spaces")
    return lowrank_difference_trace_norm(choi_vectors(a), choi_vectors(b))


@dataclass(frozen=True)
class ProductChannel:
    """Tensor product of channels, each acting on a listed group of input modes.

    The output modes are the factors' outputs in factor order.  Only the
    pure-state route is provided; dense Kraus expansion would defeat the point.
    """

    space_in: ModeSpace
    factors: tuple[tuple[Channel, tuple[int, ...]], ...]

    def __post_init__(self):
        seen = sorted(m for _, modes in self.factors for m in modes)
        if seen != list(range(self.space_in.n_modes)):
            raise ValueError("factors must partition the input modes")
        for ch, modes in self.factors:
            if tuple(self.space_in.dims[m] for m in modes) != ch.space_in.dims:
                raise ValueError("factor input space does not match its modes")

    @property
    def space_out(self) -> ModeSpace:
        dims: tuple[int, ...] = ()
        for ch, _ in self.factors:
            dims += ch.space_out.dims
        return ModeSpace(dims)

    def purify_output(self, psi: np.ndarray) -> np.ndarray:
        dims = self.space_in.dims
        t = np.asarray(psi).reshape(dims + (1,))
        live = list(range(len(dims)))
        n_out = 0
        for ch, modes in self.factors:
            pos = [live.index(m) for m in modes]
            other = [i for i in range(len(live)) if i not in pos]
            nl = len(live)
            t = t.transpose(pos + other + list(range(nl, nl + n_out + 1)))
            t = t.reshape((ch.space_in.total,) + t.shape[len(pos) :])
            k = ch.full_kraus()
            t = np.tensordot(k, t, axes=([2], [0]))  # (r, do, other..., outs..., env)
            no = len(other)
            axes = list(range(2, 2 + no + n_out)) + [1, 2 + no + n_out, 0]
            t = t.transpose(axes)
            t = t.reshape(t.shape[:-2] + (-1,))
            live = [live[i] for i in other]
            n_out += 1
        return t.reshape(self.space_out.total, -1)

    def apply_pure(self, psi: np.ndarray) -> np.ndarray:
        w = self.purify_output(psi)
        return w @ w.conj().T
