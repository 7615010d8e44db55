"""Numerical checks: covariance, Knill-Laflamme conditions, recovery, fidelity bounds."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .channels import Channel, ProductChannel, apply, choi_distance, erase_and_fill
from .codes.base import Code
from .codes.lattice import charge_violation
from .codes.product import sparse_wiring_distances
from .codes.qutrit import transpose_channel_decoder
from .codes.random_code import RandomCodeDiagnostics, step1_output
from .groups import conjugated_channel
from .hilbert import (
    DenseOperator,
    ModeSpace,
    partial_trace_array,
    psd_inv_sqrt_array,
    psd_sqrt_array,
    pure_fidelity,
    random_haar_vector,
    reduced_from_ket,
    trace_norm,
)

DEFAULT_RESTARTS = 32
HAAR_FLOOR_SAMPLES = 10_000
PHASE_GRID = 64


# ---------------------------------------------------------------- reports


@dataclass
class CheckResult:
    name: str
    residual: float
    tolerance: float
    seed: int | None = None
    seconds: float = 0.0
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


@dataclass
class VerificationReport:
    title: str = "verification"
    checks: list[CheckResult] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def add(self, name: str, residual: float, tolerance: float, seed: int | None = None, seconds: float = 0.0, note: str = "") -> CheckResult:
        r = CheckResult(name, float(residual), float(tolerance), seed, seconds, note)
        self.checks.append(r)
        return r

    def timed(self, name: str, tolerance: float, fn: Callable[[], float], seed: int | None = None, note: str = "") -> CheckResult:
        t0 = time.perf_counter()
        val = fn()
        return self.add(name, val, tolerance, seed, time.perf_counter() - t0, note)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_text(self, timings: bool = False) -> str:
        lines = [f"== {self.title} =="]
        for key, val in self.config.items():
            lines.append(f"# {key}: {val}")
        for c in self.checks:
            line = f"{'PASS' if c.passed else 'FAIL'}  {c.name}: residual={c.residual:.6e} tol={c.tolerance:.1e}"
            if c.seed is not None:
                line += f" seed={c.seed}"
            if timings:
                line += f" time={c.seconds:.3f}s"
            if c.note:
                line += f"  ({c.note})"
            lines.append(line)
        lines.append(f"overall: {'PASS' if self.all_passed else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "residual", "tolerance", "pass", "seed"])
        for c in self.checks:
            w.writerow([c.name, repr(c.residual), repr(c.tolerance), int(c.passed), "" if c.seed is None else c.seed])
        return buf.getvalue()


@dataclass
class FidelityEstimate:
    value: float
    method: str
    trace: dict = field(default_factory=dict)


# ---------------------------------------------------------------- covariance


def covariance_residual(code: Code) -> float:
    """Max over group elements of the Choi distance between the conjugated and
    plain encodings; for U(1) codes, the largest charge violation (exact)."""
    if code.charges_out is not None:
        if code.encoder is None:
            raise ValueError("charge check needs an isometric encoder")
        return float(charge_violation(code.encoder, code.charges_in, code.charges_out))
    if code.group is None:
        raise ValueError(f"{code.kind} code carries no group context")
    if code.kind == "product" and (code.encoder is None or code.rep_out is None):
        return max(sparse_wiring_distances(code))
    if code.rep_in is None or code.rep_out is None:
        raise ValueError(f"{code.kind} code has no representations attached")
    enc = code.encoding_channel()
    return max(choi_distance(conjugated_channel(enc, code.rep_in, code.rep_out, g), enc) for g in code.group.elements())


# ---------------------------------------------------------------- Knill-Laflamme


def gell_mann_basis(d: int) -> list[np.ndarray]:
    """Identity plus the d^2 - 1 generalized Gell-Mann matrices (tr A B = 2 delta)."""
    basis = [np.eye(d, dtype=complex)]
    for a in range(d):
        for b in range(a + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[a, b] = s[b, a] = 1.0
            basis.append(s)
            t = np.zeros((d, d), dtype=complex)
            t[a, b], t[b, a] = -1j, 1j
            basis.append(t)
    for k in range(1, d):
        diag = np.zeros(d)
        diag[:k] = 1.0
        diag[k] = -k
        basis.append(np.diag(diag * math.sqrt(2.0 / (k * (k + 1)))).astype(complex))
    return basis


def code_basis(code: Code, rank_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the code space (the range of the encoding)."""
    if code.encoder is not None:
        return code.encoder
    kr = code.encoding_channel().full_kraus()
    stacked = np.concatenate(list(kr), axis=1)
    u, s, _ = np.linalg.svd(stacked, full_matrices=False)
    return u[:, s > rank_tol * max(s.max(initial=0.0), 1e-300)]


def kl_erasure_check(code: Code, j: int, basis: np.ndarray | None = None) -> float:
    """max_A || P A_j P - tr(P A_j P)/tr(P) P ||_inf over a Gell-Mann basis on mode j.

    Channel encodings are checked on the range of the channel.
    """
    v = code_basis(code) if basis is None else basis
    dims = code.space_out.dims
    j = code.space_out.check_modes([j])[0]
    k = v.shape[1]
    t = np.moveaxis(v.reshape(dims + (k,)), j, 0).reshape(dims[j], -1, k)
    gram = np.einsum("ari,brl->abil", t.conj(), t)
    worst = 0.0
    for a in gell_mann_basis(dims[j]):
        m = np.einsum("ab,abil->il", a, gram)
        c = np.trace(m) / k
        worst = max(worst, float(np.linalg.norm(m - c * np.eye(k), 2)))
    return worst


# ---------------------------------------------------------------- recovery


def _factor_discards(dec) -> set[int]:
    if isinstance(dec, ProductChannel):
        out = set()
        for ch, modes in dec.factors:
            out |= {modes[i] for i in ch.discard}
        return out
    return set(dec.discard)


def encoded_purification(code: Code, psi: np.ndarray) -> np.ndarray:
    w = code.encode_ket(psi)
    return w[:, None] if w.ndim == 1 else w


def recover_state(code: Code, j: int | None, psi: np.ndarray, decoder=None) -> np.ndarray:
    """encode -> erase_and_fill(j) -> decode for one pure input.

    Decoders that ignore mode ``j`` see the same state whether or not the
    mode was refilled with tau, so the pure-state route skips the refill.
    """
    if decoder is None:
        decoder = _clean_decoder(code) if j is None else code.decoders.get(j)
    if decoder is None:
        raise KeyError(f"{code.kind} code has no decoder for mode {j}")
    w = encoded_purification(code, psi)
    if j is None or j in _factor_discards(decoder):
        out = 0
        for col in w.T:
            out = out + decoder.apply_pure(col)
        return out
    rho = DenseOperator(code.space_out, code.space_out, w @ w.conj().T)
    return apply(decoder, erase_and_fill(rho, j)).entries


def _clean_decoder(code: Code):
    if code.encoder is None:
        raise ValueError("zero-erasure decoding needs an isometric encoder")
    return transpose_channel_decoder(code.encoder, code.space_out, ())


def recovery_pipeline_check(code: Code, j: int | None, inputs: Iterable[np.ndarray], decoder=None) -> float:
    """Worst root fidelity to the input over ``inputs``."""
    return min(pure_fidelity(psi, recover_state(code, j, psi, decoder)) for psi in inputs)


def recovery_kraus(code: Code, j: int) -> np.ndarray:
    """Kraus operators of the logical map decode o erase_j o encode."""
    dec = code.decoders.get(j)
    if not isinstance(dec, Channel):
        raise ValueError(f"mode {j}: a single Kraus-family decoder is needed")
    dims = code.space_out.dims
    enc = code.encoding_channel().full_kraus()
    k = code.space_in.total
    disc = list(dec.discard)
    keep = [i for i in range(len(dims)) if i not in disc]
    if j not in disc:
        raise ValueError(f"decoder for mode {j} does not discard it")
    d_disc = int(np.prod([dims[i] for i in disc], dtype=np.int64))
    out = []
    for ka in enc:
        t = ka.reshape(dims + (k,)).transpose(disc + keep + [len(dims)]).reshape(d_disc, -1, k)
        for m in range(d_disc):
            out.append(np.einsum("eoi,ik->eok", dec.kraus, t[m]))
    return np.concatenate(out, axis=0)


def _fidelity_batch(kraus: np.ndarray, kappas: np.ndarray) -> np.ndarray:
    """Root fidelity sqrt(sum_r |<k|R_r|k>|^2) for rows of ``kappas`` (unit vectors)."""
    amps = np.einsum("si,rij,sj->sr", kappas.conj(), kraus, kappas)
    return np.sqrt(np.clip((np.abs(amps) ** 2).sum(axis=1), 0.0, 1.0))


def _restart_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def fworst_estimate(
    code: Code,
    j: int,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    haar_samples: int = HAAR_FLOOR_SAMPLES,
    kraus: np.ndarray | None = None,
) -> FidelityEstimate:
    """Multistart local minimization of the recovery fidelity over pure inputs.

    Each restart starts from a Haar vector drawn from (seed, restart); a
    batch of ``haar_samples`` Haar inputs is evaluated as a floor.  The
    reported value is the smallest fidelity seen anywhere.
    """
    kraus = recovery_kraus(code, j) if kraus is None else kraus
    k = kraus.shape[1]

    def objective(x: np.ndarray) -> float:
        z = x[:k] + 1j * x[k:]
        nrm = np.linalg.norm(z)
        if nrm < 1e-300:
            return 1.0
        return float(_fidelity_batch(kraus, (z / nrm)[None])[0])

    best, best_restart, evals = np.inf, -1, 0
    for r in range(restarts):
        z0 = random_haar_vector(k, _restart_rng(seed, r))
        res = minimize(objective, np.concatenate([z0.real, z0.imag]), method="L-BFGS-B", options={"ftol": 1e-15, "gtol": 1e-12})
        evals += int(res.nfev)
        val = min(float(res.fun), objective(np.concatenate([z0.real, z0.imag])))
        if val < best:
            best, best_restart = val, r
    haar_min = np.inf
    if haar_samples:
        rng = _restart_rng(seed, restarts)
        z = rng.standard_normal((haar_samples, k)) + 1j * rng.standard_normal((haar_samples, k))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        haar_min = float(_fidelity_batch(kraus, z).min())
    value = float(min(best, haar_min))
    return FidelityEstimate(
        value,
        "multistart-minimization",
        {"restarts": restarts, "best_restart": best_restart, "restart_min": float(best), "haar_min": haar_min, "nfev": evals},
    )


def step2_operator(diag: RandomCodeDiagnostics, j: int = 1) -> np.ndarray:
    """A = tr_j(Psi_{0j}^{1/2}) Psi_0^{-1/2} / sqrt(d)."""
    d = diag.d
    s = partial_trace_array(psd_sqrt_array(diag.psi0j(j)), (d, d), (0,))
    return s @ psd_inv_sqrt_array(diag.psi0, cutoff=0.0) / math.sqrt(d)


def numerical_range_lower_bound(a: np.ndarray, grid: int = PHASE_GRID) -> float:
    """max_theta lambda_min(Herm(e^{i theta} A)), clamped to [0, 1].

    For any unit kappa and any theta, |<k|A|k>| >= Re(e^{i theta}<k|A|k>) >= lambda_min
    of the Hermitian part, so every theta gives a valid lower bound on
    min |<k|A|k>|; the best one is kept.
    """

    def lam(theta: float) -> float:
        h = np.exp(1j * theta) * a
        return float(np.linalg.eigvalsh(0.5 * (h + h.conj().T))[0])

    thetas = 2 * np.pi * np.arange(grid) / grid
    vals = np.array([lam(t) for t in thetas])
    i = int(np.argmax(vals))
    step = 2 * np.pi / grid
    res = minimize_scalar(lambda t: -lam(t), bounds=(thetas[i] - step, thetas[i] + step), method="bounded", options={"xatol": 1e-12})
    best = max(float(vals[i]), -float(res.fun))
    return float(min(1.0, max(0.0, best)))


def fworst_lower_bound(diag: RandomCodeDiagnostics, j: int = 1) -> float:
    return numerical_range_lower_bound(step2_operator(diag, j))


def step1_closed_form(diag: RandomCodeDiagnostics, rho, j: int = 1) -> DenseOperator:
    m = rho.entries if isinstance(rho, DenseOperator) else np.asarray(rho)
    out = step1_output(diag, m, j)
    space = ModeSpace((diag.d,))
    return DenseOperator(space, space, out)


def step1_pipeline_distance(code: Code, inputs: Iterable[np.ndarray], j: int = 0) -> float:
    """Max trace distance between the closed form and the decode pipeline (0-based mode j)."""
    diag: RandomCodeDiagnostics = code.diagnostics["random"]
    worst = 0.0
    for psi in inputs:
        rho = np.outer(psi, psi.conj())
        closed = step1_closed_form(diag, rho, j + 1).entries
        piped = recover_state(code, j, psi)
        worst = max(worst, 0.5 * trace_norm(closed - piped))
    return worst


# ---------------------------------------------------------------- no-go signature


def default_generators(code: Code) -> dict[int, np.ndarray]:
    if code.charges_out is not None:
        return {i: r.generator() for i, r in enumerate(code.charges_out)}
    return {i: np.diag(np.arange(d, dtype=float)) for i, d in enumerate(code.space_out.dims)}


def alpha_values(code: Code, generators: Mapping[int, np.ndarray], inputs: Sequence[np.ndarray]) -> dict[int, np.ndarray]:
    dims = code.space_out.dims
    out = {i: [] for i in generators}
    for psi in inputs:
        w = encoded_purification(code, psi)
        for i, t in generators.items():
            rho_i = sum(reduced_from_ket(col, dims, (i,)) for col in w.T)
            out[i].append(float(np.real(np.trace(t @ rho_i))))
    return {i: np.array(v) for i, v in out.items()}


def alpha_independence_check(
    code: Code,
    generators: Mapping[int, np.ndarray] | None = None,
    inputs: Sequence[np.ndarray] | None = None,
    seed: int = 0,
    n_inputs: int = 20,
) -> float:
    """Max over modes of the spread (max - min) of tr(T_i rho_i) across inputs.

    The computational basis states are always included among the inputs.
    """
    generators = default_generators(code) if generators is None else generators
    if inputs is None:
        rng = np.random.default_rng(seed)
        k = code.space_in.total
        inputs = list(np.eye(k, dtype=complex)) + [random_haar_vector(k, rng) for _ in range(n_inputs)]
    vals = alpha_values(code, generators, inputs)
    return max(float(v.max() - v.min()) for v in vals.values())


# ---------------------------------------------------------------- helpers


def random_inputs(dim: int, count: int, seed: int, support: Sequence[int] | None = None) -> list[np.ndarray]:
    """Haar inputs, optionally supported on a subset of basis states."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        if support is None:
            out.append(random_haar_vector(dim, rng))
        else:
            v = np.zeros(dim, dtype=complex)
            v[list(support)] = random_haar_vector(len(support), rng)
            out.append(v)
    return out


def isometry_check(code: Code) -> float:
    if code.encoder is not None:
        return code.isometry_residual()
    return code.encoding_channel().trace_preservation_residual()
