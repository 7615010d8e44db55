"""Dense complex tensor algebra over mode-structured Hilbert spaces.

A :class:`ModeSpace` names an ordered tensor-factor structure.  Kets and
operators are thin immutable wrappers around numpy arrays that carry their
mode structure along, so partial traces and reorderings never need the caller
to track reshapes by hand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_INV_SQRT_CUTOFF = 1e-10
PSD_TOL = 1e-9


class NotPSDError(ValueError):
    pass


@dataclass(frozen=True)
class ModeSpace:
    dims: tuple[int, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if any(d < 1 for d in dims):
            raise ValueError(f"mode dimensions must be >= 1, got {dims}")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(dims):
                raise ValueError("labels must match dims in length")
            if len(set(labels)) != len(labels):
                raise ValueError("mode labels must be unique")
            object.__setattr__(self, "labels", labels)

    @property
    def total(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.dims else 1

    @property
    def n_modes(self) -> int:
        return len(self.dims)

    def __len__(self):
        return len(self.dims)

    def concat(self, other: "ModeSpace") -> "ModeSpace":
        labels = None
        if self.labels is not None and other.labels is not None:
            labels = self.labels + other.labels
        return ModeSpace(self.dims + other.dims, labels)

    def subspace(self, modes: Sequence[int]) -> "ModeSpace":
        modes = self.check_modes(modes)
        labels = None if self.labels is None else tuple(self.labels[m] for m in modes)
        return ModeSpace(tuple(self.dims[m] for m in modes), labels)

    def relabel(self, labels: Sequence[str] | None) -> "ModeSpace":
        return ModeSpace(self.dims, None if labels is None else tuple(labels))

    def check_modes(self, modes: Iterable[int]) -> tuple[int, ...]:
        modes = tuple(int(m) for m in modes)
        for m in modes:
            if not 0 <= m < len(self.dims):
                raise IndexError(f"mode index {m} out of range for {len(self.dims)} modes")
        if len(set(modes)) != len(modes):
            raise ValueError(f"repeated mode index in {modes}")
        return modes

    @classmethod
    def uniform(cls, dim: int, n: int) -> "ModeSpace":
        return cls((dim,) * n)


def _as_space(space) -> ModeSpace:
    if isinstance(space, ModeSpace):
        return space
    if isinstance(space, (int, np.integer)):
        return ModeSpace((int(space),))
    return ModeSpace(tuple(space))


@dataclass(frozen=True)
class DenseKet:
    space: ModeSpace
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        space = _as_space(self.space)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != space.total:
            raise ValueError(f"ket has {amps.size} amplitudes, space dimension is {space.total}")
        amps.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = 1e-12) -> bool:
        return abs(self.norm**2 - 1.0) <= tol

    def normalized(self) -> "DenseKet":
        return DenseKet(self.space, self.amplitudes / self.norm)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.space.dims)

    def projector(self) -> "DenseOperator":
        a = self.amplitudes
        return DenseOperator(self.space, self.space, np.outer(a, a.conj()))

    def kron(self, other: "DenseKet") -> "DenseKet":
        return DenseKet(self.space.concat(other.space), np.kron(self.amplitudes, other.amplitudes))

    @classmethod
    def basis(cls, space, index: int | Sequence[int]) -> "DenseKet":
        space = _as_space(space)
        if not isinstance(index, (int, np.integer)):
            index = int(np.ravel_multi_index(tuple(index), space.dims))
        amps = np.zeros(space.total, dtype=complex)
        amps[index] = 1.0
        return cls(space, amps)


@dataclass(frozen=True)
class DenseOperator:
    space_out: ModeSpace
    space_in: ModeSpace
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        so, si = _as_space(self.space_out), _as_space(self.space_in)
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (so.total, si.total):
            raise ValueError(f"entries shape {m.shape} does not match spaces ({so.total}, {si.total})")
        m.setflags(write=False)
        object.__setattr__(self, "space_out", so)
        object.__setattr__(self, "space_in", si)
        object.__setattr__(self, "entries", m)

    # construction helpers
    @classmethod
    def square(cls, space, entries) -> "DenseOperator":
        space = _as_space(space)
        return cls(space, space, entries)

    @classmethod
    def identity(cls, space) -> "DenseOperator":
        space = _as_space(space)
        return cls(space, space, np.eye(space.total))

    @classmethod
    def maximally_mixed(cls, space) -> "DenseOperator":
        space = _as_space(space)
        return cls(space, space, np.eye(space.total) / space.total)

    @property
    def is_square_space(self) -> bool:
        return self.space_out.dims == self.space_in.dims

    @property
    def dag(self) -> "DenseOperator":
        return DenseOperator(self.space_in, self.space_out, self.entries.conj().T)

    @property
    def T(self) -> "DenseOperator":
        return DenseOperator(self.space_in, self.space_out, self.entries.T)

    def __matmul__(self, other):
        if isinstance(other, DenseOperator):
            if other.space_out.total != self.space_in.total:
                raise ValueError("dimension mismatch in operator product")
            return DenseOperator(self.space_out, other.space_in, self.entries @ other.entries)
        if isinstance(other, DenseKet):
            if other.space.total != self.space_in.total:
                raise ValueError("dimension mismatch applying operator to ket")
            return DenseKet(self.space_out, self.entries @ other.amplitudes)
        return NotImplemented

    def __add__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.space_out, self.space_in, self.entries + other.entries)

    def __sub__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.space_out, self.space_in, self.entries - other.entries)

    def __mul__(self, c) -> "DenseOperator":
        return DenseOperator(self.space_out, self.space_in, self.entries * c)

    __rmul__ = __mul__

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def relabel(self, space_out=None, space_in=None) -> "DenseOperator":
        """Reinterpret the same matrix on differently labelled (isomorphic) spaces."""
        so = self.space_out if space_out is None else _as_space(space_out)
        si = self.space_in if space_in is None else _as_space(space_in)
        return DenseOperator(so, si, self.entries)

    # predicates, all with explicit tolerances
    def is_hermitian(self, tol: float = 1e-10) -> bool:
        m = self.entries
        return m.shape[0] == m.shape[1] and np.abs(m - m.conj().T).max(initial=0.0) <= tol

    def is_isometry(self, tol: float = 1e-10) -> bool:
        m = self.entries
        return np.abs(m.conj().T @ m - np.eye(m.shape[1])).max(initial=0.0) <= tol

    def is_unitary(self, tol: float = 1e-10) -> bool:
        return self.entries.shape[0] == self.entries.shape[1] and self.is_isometry(tol)

    def is_psd(self, tol: float = PSD_TOL) -> bool:
        if not self.is_hermitian(tol):
            return False
        return float(np.linalg.eigvalsh(_herm(self.entries)).min(initial=0.0)) >= -tol

    def is_trace_one(self, tol: float = 1e-10) -> bool:
        return abs(self.trace() - 1.0) <= tol

    def is_density(self, tol: float = PSD_TOL) -> bool:
        return self.is_psd(tol) and self.is_trace_one(tol)


def _herm(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def ket(space, amplitudes) -> DenseKet:
    return DenseKet(_as_space(space), amplitudes)


def tensor_product(a: DenseOperator, b: DenseOperator) -> DenseOperator:
    """Kronecker product with ``a``'s modes first."""
    return DenseOperator(
        a.space_out.concat(b.space_out),
        a.space_in.concat(b.space_in),
        np.kron(a.entries, b.entries),
    )


def tensor_all(ops: Iterable[DenseOperator]) -> DenseOperator:
    ops = list(ops)
    out = ops[0]
    for op in ops[1:]:
        out = tensor_product(out, op)
    return out


def partial_trace_array(m: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduced matrix on ``keep`` (in the given order) of a square matrix over ``dims``."""
    dims = tuple(dims)
    n = len(dims)
    keep = tuple(keep)
    traced = [i for i in range(n) if i not in keep]
    t = m.reshape(dims + dims)
    # contract traced ket/bra index pairs
    letters = [chr(ord("a") + i) for i in range(2 * n)]
    ket_idx = letters[:n]
    bra_idx = letters[n:]
    for i in traced:
        bra_idx[i] = ket_idx[i]
    out = "".join(ket_idx[i] for i in keep) + "".join(bra_idx[i] for i in keep)
    r = np.einsum("".join(ket_idx) + "".join(bra_idx) + "->" + out, t)
    dk = int(np.prod([dims[i] for i in keep], dtype=np.int64))
    return r.reshape(dk, dk)


def partial_trace(op: DenseOperator, keep: Iterable[int]) -> DenseOperator:
    """Trace out every mode not in ``keep``; the kept modes retain their listed order.

    ``keep=()`` returns the full trace as a 1x1 operator on the empty space.
    """
    if op.space_out.dims != op.space_in.dims:
        raise ValueError("partial_trace needs an operator on a single ModeSpace")
    keep = op.space_in.check_modes(keep)
    r = partial_trace_array(op.entries, op.space_in.dims, keep)
    sub = op.space_in.subspace(keep)
    return DenseOperator(sub, sub, r)


def reduced_from_ket(amplitudes: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix of a pure state without forming the full projector."""
    dims = tuple(dims)
    keep = tuple(keep)
    rest = [i for i in range(len(dims)) if i not in keep]
    t = np.asarray(amplitudes).reshape(dims).transpose(keep + tuple(rest))
    dk = int(np.prod([dims[i] for i in keep], dtype=np.int64))
    mat = t.reshape(dk, -1)
    return mat @ mat.conj().T


def permute_modes(op: DenseOperator, order: Sequence[int]) -> DenseOperator:
    """Reorder the tensor factors of a square operator: new mode k is old mode ``order[k]``."""
    dims = op.space_in.dims
    order = op.space_in.check_modes(order)
    if len(order) != len(dims):
        raise ValueError("order must list every mode")
    n = len(dims)
    t = op.entries.reshape(dims + dims).transpose(order + tuple(n + i for i in order))
    sub = op.space_in.subspace(order)
    return DenseOperator(sub, sub, t.reshape(op.entries.shape))


def permutation_matrix(dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Unitary P with P |i_0 ... i_{n-1}> = |i_{order[0]} ... i_{order[n-1]}>."""
    dims = tuple(dims)
    total = int(np.prod(dims, dtype=np.int64))
    idx = np.arange(total).reshape(dims).transpose(tuple(order)).reshape(-1)
    p = np.zeros((total, total))
    p[np.arange(total), idx] = 1.0
    return p


def schmidt_decompose(state: DenseKet, left: Iterable[int]):
    """Schmidt form across ``left`` | rest.

    Returns ``(coefficients, left_kets, right_kets)`` with coefficients sorted
    descending and ``state = sum_i c_i |L_i>|R_i>`` (left modes first, in the
    listed order, then the remaining modes in their original order).
    """
    space = state.space
    left = space.check_modes(left)
    right = tuple(i for i in range(space.n_modes) if i not in left)
    t = state.tensor().transpose(left + right)
    dl = int(np.prod([space.dims[i] for i in left], dtype=np.int64))
    u, s, vh = np.linalg.svd(t.reshape(dl, -1), full_matrices=False)
    rank = max(1, int(np.sum(s > 1e-14 * max(s[0], 1e-300))))
    ls, rs = space.subspace(left), space.subspace(right)
    lefts = [DenseKet(ls, u[:, i]) for i in range(rank)]
    rights = [DenseKet(rs, vh[i]) for i in range(rank)]
    return s[:rank], lefts, rights


def _eigh_psd(m: np.ndarray, tol: float = PSD_TOL):
    if np.abs(m - m.conj().T).max(initial=0.0) > tol * max(1.0, np.abs(m).max(initial=0.0)):
        raise NotPSDError("not PSD: operator is not Hermitian")
    w, v = np.linalg.eigh(_herm(m))
    if w.size and w.min() < -tol:
        raise NotPSDError(f"not PSD: eigenvalue {w.min():.3e}")
    return w, v


def psd_sqrt_array(m: np.ndarray) -> np.ndarray:
    w, v = _eigh_psd(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def psd_inv_sqrt_array(m: np.ndarray, cutoff: float = DEFAULT_INV_SQRT_CUTOFF) -> np.ndarray:
    """Pseudo-inverse square root; eigenvalues below ``cutoff * max eigenvalue`` map to zero."""
    w, v = _eigh_psd(m)
    wmax = w.max(initial=0.0)
    keep = w > cutoff * wmax
    f = np.zeros_like(w)
    f[keep] = 1.0 / np.sqrt(w[keep])
    return (v * f) @ v.conj().T


def psd_func(op: DenseOperator, which: str, cutoff: float = DEFAULT_INV_SQRT_CUTOFF) -> DenseOperator:
    if which == "sqrt":
        r = psd_sqrt_array(op.entries)
    elif which == "inv_sqrt":
        r = psd_inv_sqrt_array(op.entries, cutoff)
    else:
        raise ValueError(f"unknown psd function {which!r}")
    return DenseOperator(op.space_out, op.space_in, r)


def operator_norm(m) -> float:
    m = m.entries if isinstance(m, DenseOperator) else np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def trace_norm(m) -> float:
    m = m.entries if isinstance(m, DenseOperator) else np.asarray(m)
    if np.allclose(m, m.conj().T, atol=0, rtol=0):
        return float(np.abs(np.linalg.eigvalsh(m)).sum())
    return float(np.linalg.svd(m, compute_uv=False).sum())


def fidelity(a, b) -> float:
    """Root fidelity tr sqrt(sqrt(a) b sqrt(a)), clipped to [0, 1]."""
    a = a.entries if isinstance(a, DenseOperator) else np.asarray(a, dtype=complex)
    b = b.entries if isinstance(b, DenseOperator) else np.asarray(b, dtype=complex)
    sa = psd_sqrt_array(a)
    _eigh_psd(b)
    w = np.linalg.eigvalsh(_herm(sa @ b @ sa))
    return float(min(1.0, np.sqrt(np.clip(w, 0.0, None)).sum()))


def pure_fidelity(psi: np.ndarray, rho: np.ndarray) -> float:
    """F(|psi><psi|, rho) = sqrt(<psi|rho|psi>) for a normalized ``psi``."""
    psi = np.asarray(psi).reshape(-1)
    val = np.real(np.vdot(psi, rho @ psi))
    return float(np.sqrt(min(1.0, max(0.0, val))))


def norms_and_fidelity(a: DenseOperator, b: DenseOperator) -> dict:
    diff = a.entries - b.entries
    return {
        "operator_norm": operator_norm(diff),
        "trace_norm": trace_norm(diff),
        "fidelity": fidelity(a, b),
    }


def random_haar_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if dim == 1:
        return np.ones(1, dtype=complex)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_haar_ket(dim: int, seed: int | np.random.Generator) -> DenseKet:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return DenseKet(ModeSpace((dim,)), random_haar_vector(dim, rng))


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
