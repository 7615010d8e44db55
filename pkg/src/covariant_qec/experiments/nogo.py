"""Search over charge-conserving isometries for a perfect single-erasure code.

For a nontrivial input charge the search should stall at a positive residual;
with all charges zero, covariance is vacuous and perfect codes are found.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from ..codes.u1_isometry import u1_isometry_code, u1_param_count
from ..groups import ChargeRep
from ..verify import alpha_independence_check, gell_mann_basis, kl_erasure_check


@dataclass
class NogoReport:
    charges_in: tuple[int, ...]
    charges_out: tuple[tuple[int, ...], ...]
    restarts: int
    seed: int
    best_residual: float
    per_mode: list[float]
    alpha_spread: float
    running_min: list[float] = field(default_factory=list)
    best_params: np.ndarray | None = None

    def lines(self) -> list[str]:
        out = [
            f"charges_in: {list(self.charges_in)}",
            f"charges_out: {[list(c) for c in self.charges_out]}",
            f"restarts: {self.restarts}  seed: {self.seed}",
            f"best KL residual: {self.best_residual!r}",
        ]
        out += [f"mode {j} KL residual: {r!r}" for j, r in enumerate(self.per_mode)]
        out.append(f"alpha spread at best point: {self.alpha_spread!r}")
        out.append("running minimum: " + " ".join(repr(x) for x in self.running_min))
        return out


def _kl_vector(v: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """Stacked real and imaginary parts of V^dag A_j V - c I over every mode and basis element."""
    k = v.shape[1]
    parts = []
    for j, dj in enumerate(dims):
        t = np.moveaxis(v.reshape(tuple(dims) + (k,)), j, 0).reshape(dj, -1, k)
        gram = np.einsum("ari,brl->abil", t.conj(), t)
        for a in gell_mann_basis(dj)[1:]:
            m = np.einsum("ab,abil->il", a, gram)
            m = m - np.trace(m) / k * np.eye(k)
            parts.append(m.real.ravel())
            parts.append(m.imag.ravel())
    return np.concatenate(parts)


def run_nogo_probe(
    charges_in: Sequence[int],
    charges_out: Sequence[Sequence[int]],
    restarts: int = 64,
    seed: int = 0,
    max_nfev: int = 2000,
    stop_below: float | None = None,
) -> NogoReport:
    """Multistart Levenberg-Marquardt on the stacked KL violations.

    ``stop_below`` ends the search early once the best residual drops below it.
    """
    cin = ChargeRep(tuple(charges_in))
    cout = tuple(ChargeRep(tuple(c)) for c in charges_out)
    n_params = u1_param_count(cin, cout)
    dims = tuple(r.dim for r in cout)

    def residuals(p: np.ndarray) -> np.ndarray:
        try:
            v = u1_isometry_code(cin, cout, p).encoder
        except ValueError:
            return np.full(_size, 1.0)
        return _kl_vector(v, dims)

    _size = sum(2 * (d * d - 1) * cin.dim**2 for d in dims)
    best, best_p, running = np.inf, None, []
    for r in range(restarts):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), r]))
        p0 = rng.standard_normal(n_params)
        method = "lm" if _size >= n_params else "trf"
        res = least_squares(residuals, p0, method=method, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev)
        code = u1_isometry_code(cin, cout, res.x)
        val = max(kl_erasure_check(code, j) for j in range(len(dims)))
        if val < best:
            best, best_p = val, res.x
        running.append(float(best))
        if stop_below is not None and best <= stop_below:
            break
    code = u1_isometry_code(cin, cout, best_p)
    per_mode = [kl_erasure_check(code, j) for j in range(len(dims))]
    spread = alpha_independence_check(code, seed=seed)
    return NogoReport(tuple(cin.charges), tuple(c.charges for c in cout), len(running), seed, float(best), per_mode, spread, running, best_p)
