"""Decision verdicts and the machine-readable analysis report."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class Verdict(str, Enum):
    CAUSAL = "CAUSAL"
    NON_CAUSAL = "NON_CAUSAL"
    NOT_DECIDED = "NOT_DECIDED"


@dataclass
class QRecord:
    """Per-depth outcome of a sufficient-condition test."""

    q: int
    sigma_min: float
    bound: float
    margin: float  # bound - sigma_min; negative means the condition holds

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "sigma_min": self.sigma_min,
            "bound": self.bound,
            "margin": self.margin,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QRecord":
        return cls(
            q=int(data["q"]),
            sigma_min=float(data["sigma_min"]),
            bound=float(data["bound"]),
            margin=float(data["margin"]),
        )


@dataclass
class DecisionReport:
    """Full audit record of one analysis run.

    Only the binary test (a necessary-and-sufficient criterion) may report
    NON_CAUSAL; the sufficient-condition modes report CAUSAL or NOT_DECIDED.
    """

    verdict: Verdict
    mode: str
    m: int
    records: list[QRecord] = field(default_factory=list)
    theta: Optional[float] = None
    matrices: Optional[dict[str, list[list[float]]]] = None
    config: Optional[dict] = None
    version: str = "0.1.0"

    def __post_init__(self):
        if self.verdict is Verdict.NON_CAUSAL and self.mode != "binary":
            raise ValueError(
                "NON_CAUSAL can only be reported by the binary test; "
                f"mode {self.mode!r} is one-sided"
            )

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "mode": self.mode,
            "m": self.m,
            "records": [r.to_dict() for r in self.records],
            "theta": self.theta,
            "matrices": self.matrices,
            "config": self.config,
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecisionReport":
        return cls(
            verdict=Verdict(data["verdict"]),
            mode=data["mode"],
            m=int(data["m"]),
            records=[QRecord.from_dict(r) for r in data.get("records", [])],
            theta=data.get("theta"),
            matrices=data.get("matrices"),
            config=data.get("config"),
            version=data.get("version", "0.1.0"),
        )

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "DecisionReport":
        return cls.from_dict(json.loads(text))
