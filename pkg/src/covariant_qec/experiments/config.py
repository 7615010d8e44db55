from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field

from ..codes.base import DEFAULT_DIM_BUDGET, HARD_DIM_WARNING
from ..groups import FiniteGroup, parse_group_spec

log = logging.getLogger(__name__)

VERSION = "0.1.0"
KINDS = ("demo", "concentration", "nogo", "verify", "encode")


@dataclass
class ExperimentConfig:
    kind: str
    group: str = "Z2"
    n: int = 5
    samples: int = 200
    seed: int = 0
    tol: dict = field(default_factory=dict)
    out: str | None = None
    budget: int = DEFAULT_DIM_BUDGET
    restarts: int = 32
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if self.budget < 1:
            raise ValueError("budget must be positive")
        if self.budget > HARD_DIM_WARNING:
            log.warning("dimension budget %d is above %d; dense steps may exhaust memory", self.budget, HARD_DIM_WARNING)
        for key, val in self.tol.items():
            if not (isinstance(val, (int, float)) and val >= 0):
                raise ValueError(f"tolerance {key!r} must be a non-negative number")
        self.group_obj()

    def group_obj(self) -> FiniteGroup:
        return parse_group_spec(self.group)

    def echo(self) -> str:
        """Header written at the top of every output."""
        body = json.dumps(asdict(self), sort_keys=True)
        return f"# covariant-qec {VERSION}\n# config: {body}\n"
