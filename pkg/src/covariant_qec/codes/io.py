"""Plain-text serialization of codes and states.

A code file is a header of ``key: <json>`` lines followed by the encoder (or
Kraus operators, for channel encodings) as row-major ``re im`` pairs written
with 17 significant digits, so every double survives a round trip.
"""

from __future__ import annotations

import json
import logging
from typing import TextIO

import numpy as np

from ..channels import Channel
from ..groups import ChargeRep, FiniteGroup
from ..hilbert import ModeSpace
from .base import Code

log = logging.getLogger(__name__)

MAGIC = "# covariant-qec code v1"
DEFAULT_TOLERANCES = {"covariance": 1e-10, "kl": 1e-10, "recovery": 1e-9}


def _fmt(z: complex) -> str:
    return f"{z.real:.17g} {z.imag:.17g}"


def _write_entries(fh: TextIO, arr: np.ndarray) -> None:
    for z in np.asarray(arr, dtype=complex).reshape(-1):
        fh.write(_fmt(z) + "\n")


def _read_entries(lines: list[str], count: int) -> np.ndarray:
    if len(lines) < count:
        raise ValueError(f"expected {count} entries, found {len(lines)}")
    vals = np.array([[float(x) for x in ln.split()] for ln in lines[:count]])
    if vals.shape != (count, 2):
        raise ValueError("entries must be 're im' pairs")
    return vals[:, 0] + 1j * vals[:, 1]


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def code_header(code: Code, tolerances: dict | None = None) -> dict:
    group = None
    if code.group is not None:
        group = {"name": code.group.name, "table": np.asarray(code.group.mul).tolist()}
    return {
        "kind": code.kind,
        "params": code.params,
        "seed": code.seed,
        "tolerances": tolerances or DEFAULT_TOLERANCES,
        "space_in": list(code.space_in.dims),
        "space_out": list(code.space_out.dims),
        "norm_constant": code.norm_constant,
        "group": group,
        "charges_in": list(code.charges_in.charges) if code.charges_in is not None else None,
        "charges_out": [list(r.charges) for r in code.charges_out] if code.charges_out is not None else None,
    }


def write_code(code: Code, path: str, tolerances: dict | None = None) -> None:
    header = code_header(code, tolerances)
    if code.encoder is not None:
        data, header["kraus"] = code.encoder, 0
    else:
        data = code.encoding_channel().full_kraus()
        header["kraus"] = int(data.shape[0])
    header["shape"] = list(data.shape)
    with open(path, "w") as fh:
        fh.write(MAGIC + "\n")
        for key, val in header.items():
            fh.write(f"{key}: {json.dumps(val, sort_keys=True, default=_json_default)}\n")
        fh.write("entries:\n")
        _write_entries(fh, data)


def read_code(path: str, rebuild: bool = True) -> Code:
    """Load a code file.

    With ``rebuild`` the construction is replayed from (kind, params, seed);
    if the replayed encoder matches the stored one exactly, its symmetry
    context and decoders are attached.  Otherwise only the stored data is used.
    """
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise ValueError(f"{path}: not a code file")
    header, i = {}, 1
    while i < len(lines) and lines[i].strip() != "entries:":
        key, _, val = lines[i].partition(":")
        header[key.strip()] = json.loads(val)
        i += 1
    if i == len(lines):
        raise ValueError(f"{path}: missing 'entries:' section")
    shape = tuple(header["shape"])
    data = _read_entries(lines[i + 1 :], int(np.prod(shape))).reshape(shape)
    space_in, space_out = ModeSpace(tuple(header["space_in"])), ModeSpace(tuple(header["space_out"]))

    group = None
    if header.get("group"):
        group = FiniteGroup(np.asarray(header["group"]["table"]), name=header["group"]["name"])
    code = Code(
        header["kind"],
        space_in,
        space_out,
        group=group,
        norm_constant=header.get("norm_constant", 1.0),
        params=header.get("params") or {},
        seed=header.get("seed"),
    )
    if header.get("charges_in") is not None:
        code.charges_in = ChargeRep(tuple(header["charges_in"]))
        code.charges_out = tuple(ChargeRep(tuple(c)) for c in header["charges_out"])
    if header["kraus"] == 0:
        code.encoder = data
    else:
        code.channel = Channel(space_in, space_out, data)
    code.diagnostics["tolerances"] = header.get("tolerances", DEFAULT_TOLERANCES)
    if rebuild:
        _attach_rebuilt(code)
    return code


def _attach_rebuilt(code: Code) -> None:
    from . import build_code

    try:
        ref = build_code(code.kind, code.params, code.seed, group=code.group)
    except (KeyError, ValueError, TypeError) as exc:
        log.info("no replay for %s code: %s", code.kind, exc)
        return
    if ref is None:
        return
    same = (
        ref.encoder is not None
        and code.encoder is not None
        and ref.encoder.shape == code.encoder.shape
        and np.array_equal(ref.encoder, code.encoder)
    ) or (
        ref.channel is not None
        and code.channel is not None
        and ref.channel.kraus.shape == code.channel.kraus.shape
        and np.array_equal(ref.channel.full_kraus(), code.channel.kraus)
    )
    if not same:
        log.warning("stored %s code differs from its replayed construction; using stored data only", code.kind)
        return
    code.rep_in, code.rep_out = ref.rep_in, ref.rep_out
    code.decoders = ref.decoders
    for key, val in ref.diagnostics.items():
        code.diagnostics.setdefault(key, val)


def state_text(psi: np.ndarray, dims) -> str:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != int(np.prod(dims)):
        raise ValueError("state length does not match dims")
    return " ".join(str(int(d)) for d in dims) + "\n" + "".join(_fmt(z) + "\n" for z in psi)


def write_state(psi: np.ndarray, dims, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(state_text(psi, dims))


def read_state(path: str) -> tuple[ModeSpace, np.ndarray]:
    """State file: a header line of mode dims, then one ``re im`` pair per line."""
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip() and not ln.startswith("#")]
    dims = tuple(int(x) for x in lines[0].split())
    space = ModeSpace(dims)
    return space, _read_entries(lines[1:], space.total)
