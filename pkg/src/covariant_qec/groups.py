"""Finite groups as multiplication tables, their unitary representations,
integer-charge U(1) representations, and channel twirling."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .hilbert import DenseOperator, ModeSpace, permutation_matrix

EXHAUSTIVE_ASSOC_ORDER = 64
SAMPLED_ASSOC_TRIPLES = 10_000
EXHAUSTIVE_HOM_ORDER = 24


class GroupAxiomError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteGroup:
    """Group on elements ``0..d-1`` given by ``mul[g, h] = gh``."""

    mul: np.ndarray = field(repr=False)
    name: str = "G"
    element_names: tuple[str, ...] | None = None
    inv: np.ndarray = field(init=False, repr=False)
    identity: int = field(init=False)

    def __post_init__(self):
        mul = np.array(self.mul, dtype=np.int64)
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] < 1:
            raise GroupAxiomError("multiplication table must be a non-empty square table")
        d = mul.shape[0]
        if mul.min() < 0 or mul.max() >= d:
            raise GroupAxiomError("closure: table entries must be element indices")
        full = np.arange(d)
        for r in range(d):
            if not np.array_equal(np.sort(mul[r]), full) or not np.array_equal(np.sort(mul[:, r]), full):
                raise GroupAxiomError("latin square: each element must appear once per row and column")
        ids = [e for e in range(d) if np.array_equal(mul[e], full) and np.array_equal(mul[:, e], full)]
        if not ids:
            raise GroupAxiomError("identity: no two-sided identity element")
        e = ids[0]
        _check_associativity(mul)
        inv = np.empty(d, dtype=np.int64)
        for g in range(d):
            inv[g] = int(np.flatnonzero(mul[g] == e)[0])
        mul.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "mul", mul)
        object.__setattr__(self, "inv", inv)
        object.__setattr__(self, "identity", e)

    @property
    def order(self) -> int:
        return self.mul.shape[0]

    def __len__(self):
        return self.order

    def op(self, g: int, h: int) -> int:
        return int(self.mul[g, h])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def elements(self) -> range:
        return range(self.order)


def _check_associativity(mul: np.ndarray, rng_seed: int = 0) -> None:
    d = mul.shape[0]
    if d <= EXHAUSTIVE_ASSOC_ORDER:
        # (gh)k vs g(hk) over all triples, vectorised
        left = mul[mul[:, :, None], np.arange(d)[None, None, :]]
        right = mul[np.arange(d)[:, None, None], mul[None, :, :]]
        ok = np.array_equal(left, right)
    else:
        rng = np.random.default_rng(rng_seed)
        g, h, k = rng.integers(0, d, size=(3, SAMPLED_ASSOC_TRIPLES))
        ok = np.array_equal(mul[mul[g, h], k], mul[g, mul[h, k]])
    if not ok:
        raise GroupAxiomError("associativity violated")


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError("n must be >= 1")
    a = np.arange(n)
    return FiniteGroup((a[:, None] + a[None, :]) % n, name=f"Z{n}")


def symmetric_group(n: int) -> FiniteGroup:
    """S_n with elements in lexicographic order; ``(g h)(i) = g(h(i))``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    d = len(perms)
    mul = np.empty((d, d), dtype=np.int64)
    for i, g in enumerate(perms):
        for j, h in enumerate(perms):
            mul[i, j] = index[tuple(g[h[k]] for k in range(n))]
    names = tuple("".join(str(x) for x in p) for p in perms)
    return FiniteGroup(mul, name=f"S{n}", element_names=names)


def symmetric_permutations(n: int) -> list[tuple[int, ...]]:
    """Permutations in the same element order as :func:`symmetric_group`."""
    return list(itertools.permutations(range(n)))


def group_from_table(table) -> FiniteGroup:
    return FiniteGroup(np.asarray(table), name="table")


def make_group(kind: str, n: int | None = None, table=None) -> FiniteGroup:
    if kind == "cyclic":
        return cyclic_group(n)
    if kind == "symmetric":
        return symmetric_group(n)
    if kind == "from_table":
        return group_from_table(table)
    raise ValueError(f"unknown group kind {kind!r}")


def parse_group_spec(spec: str) -> FiniteGroup:
    """``Z3``, ``S3``, ``cyclic:4``, ``symmetric:3`` or ``file:<path>``."""
    s = spec.strip()
    if s.startswith("file:"):
        return read_group_table(s[5:])
    if ":" in s:
        kind, n = s.split(":", 1)
        return make_group({"cyclic": "cyclic", "symmetric": "symmetric"}[kind], int(n))
    if s[0] in "Zz" and s[1:].isdigit():
        return cyclic_group(int(s[1:]))
    if s[0] in "Ss" and s[1:].isdigit():
        return symmetric_group(int(s[1:]))
    raise ValueError(f"cannot parse group spec {spec!r}")


def read_group_table(path: str) -> FiniteGroup:
    """Plain-text table: first line ``d``, then ``d`` lines of ``d`` indices."""
    with open(path) as fh:
        lines = [ln.split() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    d = int(lines[0][0])
    rows = lines[1 : d + 1]
    if len(rows) != d or any(len(r) != d for r in rows):
        raise GroupAxiomError(f"expected {d} rows of {d} entries")
    return group_from_table([[int(x) for x in r] for r in rows])


def write_group_table(group: FiniteGroup, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(f"{group.order}\n")
        for row in group.mul:
            fh.write(" ".join(str(int(x)) for x in row) + "\n")


@dataclass(frozen=True)
class Representation:
    group: FiniteGroup
    space: ModeSpace
    unitaries: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        us = tuple(np.asarray(u, dtype=complex) for u in self.unitaries)
        if len(us) != self.group.order:
            raise ValueError("need one unitary per group element")
        for u in us:
            if u.shape != (self.space.total, self.space.total):
                raise ValueError("unitary shape does not match representation space")
            u.setflags(write=False)
        object.__setattr__(self, "unitaries", us)

    @property
    def dim(self) -> int:
        return self.space.total

    def __call__(self, g: int) -> np.ndarray:
        return self.unitaries[g]

    def operator(self, g: int) -> DenseOperator:
        return DenseOperator(self.space, self.space, self.unitaries[g])

    def homomorphism_residual(self, seed: int = 0, n_samples: int = 2000) -> float:
        d = self.group.order
        if d <= EXHAUSTIVE_HOM_ORDER:
            pairs = itertools.product(range(d), repeat=2)
        else:
            rng = np.random.default_rng(seed)
            pairs = rng.integers(0, d, size=(n_samples, 2))
        worst = 0.0
        for g, h in pairs:
            diff = self.unitaries[g] @ self.unitaries[h] - self.unitaries[self.group.op(g, h)]
            worst = max(worst, float(np.linalg.norm(diff, 2)))
        return worst

    def unitarity_residual(self) -> float:
        eye = np.eye(self.dim)
        return max(float(np.abs(u.conj().T @ u - eye).max()) for u in self.unitaries)

    def tensor(self, other: "Representation") -> "Representation":
        if other.group is not self.group and not np.array_equal(other.group.mul, self.group.mul):
            raise ValueError("representations of different groups")
        return Representation(
            self.group,
            self.space.concat(other.space),
            tuple(np.kron(a, b) for a, b in zip(self.unitaries, other.unitaries)),
        )

    def power(self, n: int) -> "Representation":
        rep = self
        for _ in range(n - 1):
            rep = rep.tensor(self)
        return rep


def trivial_representation(group: FiniteGroup, space) -> Representation:
    space = space if isinstance(space, ModeSpace) else ModeSpace(tuple(space))
    eye = np.eye(space.total)
    return Representation(group, space, tuple(eye for _ in group.elements()))


def permutation_representation(group: FiniteGroup, action: Callable[[int, int], int], n_points: int) -> Representation:
    """U(g)|x> = |g.x> on C^{n_points}, for a left action of ``group`` on ``0..n_points-1``."""
    table = action_table(group, action, n_points)
    us = []
    for g in group.elements():
        u = np.zeros((n_points, n_points))
        u[table[g], np.arange(n_points)] = 1.0
        us.append(u)
    return Representation(group, ModeSpace((n_points,)), tuple(us))


def regular_representation(group: FiniteGroup) -> Representation:
    """U(g)|h> = |gh>."""
    return permutation_representation(group, group.op, group.order)


def action_table(group: FiniteGroup, action: Callable[[int, int], int], n_points: int) -> np.ndarray:
    """Tabulate and validate a left group action; ``table[g, a] = g.a``."""
    table = np.array([[int(action(g, a)) for a in range(n_points)] for g in group.elements()], dtype=np.int64)
    if table.min(initial=0) < 0 or table.max(initial=0) >= n_points:
        raise GroupAxiomError("action maps outside the set")
    if not np.array_equal(table[group.identity], np.arange(n_points)):
        raise GroupAxiomError("action: identity does not act trivially")
    for g in group.elements():
        for h in group.elements():
            if not np.array_equal(table[g][table[h]], table[group.op(g, h)]):
                raise GroupAxiomError("action: (gh).a != g.(h.a)")
    return table


@dataclass(frozen=True)
class ModePermutationRep:
    """Representation acting by permuting tensor factors; ``orders[g][k]`` is the
    input mode landing in output mode ``k``.

    Dense unitaries are built only on request, so very large product spaces
    can still be acted on through :meth:`apply`.
    """

    group: FiniteGroup
    space: ModeSpace
    orders: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return self.space.total

    def __call__(self, g: int) -> np.ndarray:
        return permutation_matrix(self.space.dims, self.orders[g])

    def operator(self, g: int) -> DenseOperator:
        return DenseOperator(self.space, self.space, self(g))

    def apply(self, g: int, x: np.ndarray) -> np.ndarray:
        """U(g) @ x for a vector or a matrix with ``dim`` rows."""
        dims = self.space.dims
        x = np.asarray(x)
        tail = x.shape[1:]
        t = x.reshape(dims + tail).transpose(tuple(self.orders[g]) + tuple(range(len(dims), len(dims) + len(tail))))
        return t.reshape(x.shape)

    def homomorphism_residual(self) -> float:
        worst = 0
        for g in self.group.elements():
            for h in self.group.elements():
                composed = tuple(self.orders[h][k] for k in self.orders[g])
                worst = max(worst, int(composed != self.orders[self.group.op(g, h)]))
        return float(worst)

    def unitarity_residual(self) -> float:
        return 0.0

    def to_dense(self) -> Representation:
        return Representation(self.group, self.space, tuple(self(g) for g in self.group.elements()))


def apply_rep(rep, g: int, x: np.ndarray) -> np.ndarray:
    if hasattr(rep, "apply"):
        return rep.apply(g, x)
    return rep(g) @ x


def factor_permutation_rep(
    group: FiniteGroup,
    action: Callable[[int, int], int],
    base: ModeSpace,
    n_points: int | None = None,
) -> ModePermutationRep:
    """Permute |A| copies of ``base``: U(g) |phi_{a_1}>...|phi_{a_|A|}> = |phi_{g^-1 a_1}>...

    Each copy of ``base`` is one block (possibly several modes).  Block ``a`` of
    the output holds the content of block ``g^{-1} a`` of the input.
    """
    n_points = group.order if n_points is None else n_points
    table = action_table(group, action, n_points)
    nb = base.n_modes
    dims = base.dims * n_points
    orders = []
    for g in group.elements():
        ginv = group.inv[g]
        block_order = [int(table[ginv, a]) for a in range(n_points)]
        orders.append(tuple(b * nb + k for b in block_order for k in range(nb)))
    labels = None
    if base.labels is not None:
        labels = tuple(f"{a}:{l}" for a in range(n_points) for l in base.labels)
    return ModePermutationRep(group, ModeSpace(dims, labels), tuple(orders))


def block_order(group: FiniteGroup, action: Callable[[int, int], int], n_points: int, g: int) -> list[int]:
    """Input block feeding each output block under the factor-permutation action of ``g``."""
    table = action_table(group, action, n_points)
    return [int(table[group.inv[g], a]) for a in range(n_points)]


@dataclass(frozen=True)
class ChargeRep:
    """U(1) acting on one mode by U(theta)|k> = exp(i q_k theta)|k>."""

    charges: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "charges", tuple(int(q) for q in self.charges))

    @property
    def dim(self) -> int:
        return len(self.charges)

    def generator(self) -> np.ndarray:
        return np.diag(np.array(self.charges, dtype=float))

    def unitary(self, theta: float) -> np.ndarray:
        return u1_unitary(self, theta)


def u1_unitary(rep: ChargeRep, theta: float) -> np.ndarray:
    q = np.asarray(rep.charges, dtype=float)
    return np.diag(np.exp(1j * q * theta))


def total_charges(reps: Sequence[ChargeRep]) -> np.ndarray:
    """Total charge of every product basis state, in row-major order."""
    out = np.zeros(1, dtype=np.int64)
    for r in reps:
        out = (out[:, None] + np.asarray(r.charges, dtype=np.int64)[None, :]).reshape(-1)
    return out


def twirl_channel(channel, group: FiniteGroup, rep_in: Representation, rep_out: Representation):
    """Average channel (1/|G|) sum_g U_out(g) channel(U_in(g)^dag rho U_in(g)) U_out(g)^dag.

    Kraus operators are U_out(g) K U_in(g)^dag / sqrt(|G|), listed in a fixed
    (element-major) order so the result does not depend on evaluation order.
    """
    from .channels import Channel

    if rep_in.dim != channel.space_in.total or rep_out.dim != channel.space_out.total:
        raise ValueError("representation spaces do not match channel spaces")
    kraus = channel.full_kraus()
    scale = 1.0 / math.sqrt(group.order)
    out = []
    for g in group.elements():
        for k in kraus:
            out.append(scale * conjugate_operator(k, rep_in, rep_out, g))
    return Channel(channel.space_in, channel.space_out, np.array(out))


def conjugated_channel(channel, rep_in: Representation, rep_out: Representation, g: int):
    """rho -> U_out(g) channel(U_in(g)^dag rho U_in(g)) U_out(g)^dag."""
    from .channels import Channel

    kraus = np.array([conjugate_operator(k, rep_in, rep_out, g) for k in channel.full_kraus()])
    return Channel(channel.space_in, channel.space_out, kraus)


def conjugate_operator(k: np.ndarray, rep_in, rep_out, g: int) -> np.ndarray:
    """U_out(g) K U_in(g)^dag, using mode permutations where the reps allow it."""
    left = apply_rep(rep_out, g, k)
    # K U^dag = (U K^dag)^dag
    return apply_rep(rep_in, g, left.conj().T).conj().T
