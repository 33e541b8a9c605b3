"""Evidence-at-horizon verdicts."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class Status(str, enum.Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    UNDECIDED = "undecided"

    def __str__(self):
        return self.value

    @classmethod
    def from_horizons(cls, at_n, at_2n):
        """Two-horizon agreement rule."""
        if at_n and at_2n:
            return cls.CERTIFIED
        if not at_n and not at_2n:
            return cls.REFUTED
        return cls.UNDECIDED


def jsonable(v):
    """Canonical JSON form: numpy scalars unwrapped, non-finite floats as strings."""
    if isinstance(v, Status):
        return v.value
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [jsonable(x) for x in v.tolist()]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if hasattr(v, "to_json"):
        return v.to_json()
    return v


@dataclass
class Verdict:
    predicate: str
    status: Status
    evidence: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)

    @property
    def certified(self):
        return self.status is Status.CERTIFIED

    @property
    def refuted(self):
        return self.status is Status.REFUTED

    def to_json(self, config=None):
        out = {"predicate": self.predicate, "verdict": self.status.value,
               "evidence": jsonable(self.evidence), "witnesses": jsonable(self.witnesses)}
        if config is not None:
            out["config"] = jsonable(config)
        return out
