"""Random G-covariant isometries built from Haar-random invariant states.

Every mode is a copy of the regular representation space H_G (dimension
d = |G|).  An invariant state on n + 1 modes is Psi = M phi with

    M |h_1 ... h_n> = d^{-1/2} sum_g |g h_1, ..., g h_n, g>,

mode 0 of Psi is contracted against the input, E = sqrt(d) <phi+|_{in,0} |Psi>,
and the code is the isometry T = E (E^dag E)^{-1/2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..channels import Channel
from ..groups import FiniteGroup, regular_representation
from ..hilbert import (
    ModeSpace,
    partial_trace_array,
    psd_inv_sqrt_array,
    psd_sqrt_array,
    random_haar_vector,
    reduced_from_ket,
)
from .base import DEFAULT_DIM_BUDGET, Code, InstanceTooLarge

SINGULAR_CUTOFF = 1e-10
PI_DIM_LIMIT = 4096


class NearSingularError(ValueError):
    pass


@dataclass
class RandomCodeDiagnostics:
    """Quantities of one sample, indexed with Psi's modes 0..n (0 = reference)."""

    d: int
    n: int
    phi: np.ndarray
    psi: np.ndarray
    psi0: np.ndarray
    psi01: np.ndarray
    lambdas: np.ndarray
    E: np.ndarray
    T: np.ndarray
    M: np.ndarray | None = None

    @property
    def psi_tensor(self) -> np.ndarray:
        return self.psi.reshape((self.d,) * (self.n + 1))

    def psi0j(self, j: int) -> np.ndarray:
        """Reduced state of Psi on modes (0, j), j in 1..n."""
        if j == 1:
            return self.psi01
        return reduced_from_ket(self.psi, (self.d,) * (self.n + 1), (0, j))

    def pi(self) -> np.ndarray:
        if self.M is None:
            raise ValueError("projector not stored for this sample size")
        return self.M @ self.M.conj().T


def invariant_embedding(group: FiniteGroup, n: int) -> np.ndarray:
    """The isometry M from H^{(x)n} onto the invariant subspace of H^{(x)(n+1)}."""
    d = group.order
    m = np.zeros((d ** (n + 1), d**n))
    for col, hs in enumerate(np.ndindex(*(d,) * n)):
        for g in range(d):
            idx = np.ravel_multi_index(tuple(group.op(g, h) for h in hs) + (g,), (d,) * (n + 1))
            m[idx, col] += 1.0
    return m / math.sqrt(d)


def _apply_m(group: FiniteGroup, n: int, phi: np.ndarray) -> np.ndarray:
    d = group.order
    table = np.asarray(group.mul)
    src = phi.reshape((d,) * n)
    out = np.zeros((d,) * (n + 1), dtype=complex)
    grids = np.indices((d,) * n).reshape(n, -1)
    for g in range(d):
        dest = tuple(table[g][grids[k]] for k in range(n)) + (np.full(grids.shape[1], g),)
        out[dest] += src.reshape(-1)
    return out.reshape(-1) / math.sqrt(d)


def random_invariant_state(group: FiniteGroup, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    phi = random_haar_vector(group.order**n, rng)
    return phi, _apply_m(group, n, phi)


def schmidt_decoder(diag: RandomCodeDiagnostics, j: int = 1) -> Channel:
    """Decoder for erasure of output mode ``j`` (1..n in Psi's labelling).

    Output mode j of the code is mode j of Psi.  With the rest R = the other
    n - 1 outputs, Psi = sum_s sigma_s a_s (x) b_s across (0, j) | R.  V maps
    b_s to |s, 0...0> on R (the first two modes of R host s), and U_{0j}^T,
    i.e. conj(A), is applied on those two host modes; the first host is kept.
    """
    d, n = diag.d, diag.n
    if n < 3:
        raise ValueError("the Schmidt decoder needs n >= 3")
    if not 1 <= j <= n:
        raise ValueError(f"erased mode {j} out of range 1..{n}")
    rest = [k for k in range(1, n + 1) if k != j]
    t = diag.psi_tensor.transpose([0, j] + rest).reshape(d * d, d ** (n - 1))
    a, _, bh = np.linalg.svd(t, full_matrices=True)
    dr = d ** (n - 1)
    tail = d ** (n - 3)
    hosted = [s * tail for s in range(d * d)]
    others = [r for r in range(dr) if r not in set(hosted)]
    v = np.zeros((dr, dr), dtype=complex)
    v[hosted] = bh[: d * d].conj()
    v[others] = bh[d * d :].conj()
    w = np.kron(a.conj(), np.eye(tail)) @ v
    kraus = w.reshape(d, d * tail, dr).transpose(1, 0, 2)
    space = ModeSpace((d,) * n)
    return Channel(space, ModeSpace((d,)), kraus, (j - 1,))


def random_covariant_code(
    group: FiniteGroup,
    n: int,
    seed: int,
    budget: int = DEFAULT_DIM_BUDGET,
    cutoff: float = SINGULAR_CUTOFF,
    decoders: str = "all",
) -> Code:
    """Sample a random covariant 1 -> n code.

    ``decoders`` is "all" (one Schmidt decoder per mode), "first" (mode 0
    only), or "none".  Code modes are 0-based, so code mode k is Psi mode k+1.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    d = group.order
    if d**n > budget:
        raise InstanceTooLarge(f"instance too large: d^n = {d**n} exceeds budget {budget}")
    rng = np.random.default_rng(seed)
    phi, psi = random_invariant_state(group, n, rng)
    dims = (d,) * (n + 1)
    e = math.sqrt(d) * psi.reshape(d, d**n).T
    gram = e.conj().T @ e
    lam = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))
    if lam.min() < cutoff:
        raise NearSingularError("near-singular E†E; resample")
    t = e @ psd_inv_sqrt_array(gram, cutoff=0.0)
    psi0 = reduced_from_ket(psi, dims, (0,))
    psi01 = reduced_from_ket(psi, dims, (0, 1))
    m = invariant_embedding(group, n) if d ** (n + 1) <= PI_DIM_LIMIT else None
    diag = RandomCodeDiagnostics(d, n, phi, psi, psi0, psi01, np.linalg.eigvalsh(psi01), e, t, m)

    rep = regular_representation(group)
    code = Code(
        "random",
        ModeSpace((d,)),
        ModeSpace((d,) * n),
        encoder=t,
        group=group,
        rep_in=rep,
        rep_out=rep.power(n),
        params={"group": group.name, "n": n},
        seed=seed,
    )
    code.diagnostics["random"] = diag
    which = {"all": range(n), "first": range(1), "none": range(0)}[decoders]
    code.decoders = {k: schmidt_decoder(diag, k + 1) for k in which}
    return code


def step1_matrices(diag: RandomCodeDiagnostics, j: int = 1, cutoff: float = SINGULAR_CUTOFF):
    """(S, Q) with S = (Psi_{0j}^T)^{1/2} and Q = (Psi_0^T)^{-1/2}."""
    p0 = diag.psi0.T
    if np.linalg.eigvalsh(p0).min() < cutoff:
        raise NearSingularError("Psi_0 is singular beyond the cutoff")
    return psd_sqrt_array(diag.psi0j(j).T), psd_inv_sqrt_array(p0, cutoff=0.0)


def step1_output(diag: RandomCodeDiagnostics, rho: np.ndarray, j: int = 1) -> np.ndarray:
    """tr_j( S (Q rho Q (x) I) S ), the recovered state in closed form."""
    d = diag.d
    s, q = step1_matrices(diag, j)
    x = np.kron(q @ rho @ q, np.eye(d))
    return partial_trace_array(s @ x @ s, (d, d), (0,))
