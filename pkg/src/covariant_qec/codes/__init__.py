"""Code constructions: qutrit base, block products, gyroscope, U(1) lattice, random covariant."""

from __future__ import annotations

from typing import Any

from ..groups import FiniteGroup, parse_group_spec
from .base import DEFAULT_DIM_BUDGET, HARD_DIM_WARNING, Code, DecoderValidationError, InstanceTooLarge
from .gyroscope import embedded_regular_action, gyroscope_code, gyroscope_decoder
from .lattice import (
    CORRECTED_STEPS,
    LatticeMap,
    LatticeWindow,
    charge_violation,
    lattice_decoder,
    u1_lattice_code,
    u1_lattice_decoders,
    u1_lattice_encoder,
)
from .product import block_decoder, permutation_covariant_code, sparse_wiring_distances
from .qutrit import (
    identity_embedding_code,
    qutrit_base_code,
    qutrit_encoder,
    repetition_qubit_code,
    transpose_channel_decoder,
)
from .random_code import (
    NearSingularError,
    RandomCodeDiagnostics,
    random_covariant_code,
    schmidt_decoder,
    step1_output,
)
from .twirled import gyroscope_as_twirl, mode_permutation_rep, qutrit_with_s3_context, twirled_code
from .u1_isometry import EmptySectorError, u1_covariant_isometry, u1_isometry_code, u1_param_count


def build_code(kind: str, params: dict[str, Any], seed: int | None = None, group: FiniteGroup | None = None) -> Code:
    """Replay a construction from its recorded kind and parameters."""
    if group is None and params.get("group"):
        group = parse_group_spec(params["group"])
    if kind == "qutrit":
        return qutrit_base_code()
    if kind == "repetition":
        return repetition_qubit_code()
    if kind == "identity_embedding":
        return identity_embedding_code()
    if kind == "u1_lattice":
        return u1_lattice_code(LatticeWindow(int(params["L"]), int(params["K"])))
    if kind == "random":
        return random_covariant_code(group, int(params["n"]), int(seed))
    if kind == "product" and params.get("base") == "qutrit" and int(params["n_points"]) == group.order:
        return permutation_covariant_code(qutrit_base_code(), group, dense="auto")
    if kind == "gyroscope" and params.get("base") == "qutrit":
        return gyroscope_code(qutrit_base_code(), group)
    raise KeyError(f"no replay recipe for {kind!r} with params {params}")


__all__ = [name for name in dir() if not name.startswith("_")]
