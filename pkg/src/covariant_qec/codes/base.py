from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..channels import Channel, ProductChannel, isometry_channel
from ..groups import ChargeRep, FiniteGroup, Representation
from ..hilbert import ModeSpace

DEFAULT_DIM_BUDGET = 4096
HARD_DIM_WARNING = 16384


class InstanceTooLarge(ValueError):
    pass


class DecoderValidationError(RuntimeError):
    pass


@dataclass
class Code:
    """An encoding (isometry or channel) with its symmetry context and decoders.

    Mode indices are 0-based throughout.  ``encoder`` is the normalized
    isometry when there is one; codes whose encoding is a genuine channel
    (the gyroscope code, twirled channels) carry ``channel`` instead.
    """

    kind: str
    space_in: ModeSpace
    space_out: ModeSpace
    encoder: np.ndarray | None = None
    channel: Channel | None = None
    group: FiniteGroup | None = None
    rep_in: Representation | None = None
    rep_out: Representation | None = None
    charges_in: ChargeRep | None = None
    charges_out: tuple[ChargeRep, ...] | None = None
    norm_constant: float = 1.0
    decoders: dict[int, Channel | ProductChannel] = field(default_factory=dict)
    params: dict[str, Any] = field(default_factory=dict)
    diagnostics: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None

    @property
    def n_modes(self) -> int:
        return self.space_out.n_modes

    @property
    def is_isometric(self) -> bool:
        return self.encoder is not None

    def encoding_channel(self) -> Channel:
        if self.channel is not None:
            return self.channel
        if self.encoder is None:
            raise ValueError(f"{self.kind} code has no dense encoder")
        return isometry_channel(self.encoder, self.space_in, self.space_out)

    def encode_ket(self, psi: np.ndarray) -> np.ndarray:
        """Encoded pure state; for channel encodings, a purification matrix W (rho = W W^dag)."""
        if self.encoder is not None:
            return self.encoder @ np.asarray(psi)
        return self.encoding_channel().purify_output(psi)

    def isometry_residual(self) -> float:
        v = self.encoder
        return float(np.abs(v.conj().T @ v - np.eye(v.shape[1])).max())

    def has_group_context(self) -> bool:
        return (self.rep_in is not None and self.rep_out is not None) or self.charges_out is not None


def random_inputs(dim: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    from ..hilbert import random_haar_vector

    return [random_haar_vector(dim, rng) for _ in range(count)]
