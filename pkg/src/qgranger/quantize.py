"""Quantizer descriptions and elementwise quantization.

Three families are supported: binary (one threshold, outputs -1/+1), finite
non-uniform (increasing thresholds mapped to increasing levels), and infinite
uniform mid-tread (q(w) = delta * round(w / delta)).  Cells are half-open with
the threshold itself belonging to the upper cell, so a value exactly on a
threshold quantizes upward; this is a measure-zero convention fixed for
determinism.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "BinaryQuantizer",
    "FiniteQuantizer",
    "UniformQuantizer",
    "QuantizerSpec",
    "quantize_series",
    "make_saturated_uniform",
    "spec_to_dict",
    "spec_from_dict",
    "spec_to_json",
    "spec_from_json",
]

MAX_SATURATED_BITS = 16


@dataclass(frozen=True)
class BinaryQuantizer:
    """One-bit quantizer: w < threshold -> -1, w >= threshold -> +1."""

    threshold: float = 0.0

    def __post_init__(self):
        t = float(self.threshold)
        if not np.isfinite(t):
            raise ValueError(f"threshold must be finite, got {t}")
        object.__setattr__(self, "threshold", t)

    @property
    def interior_thresholds(self) -> np.ndarray:
        return np.array([self.threshold])

    @property
    def levels(self) -> np.ndarray:
        return np.array([-1.0, 1.0])


@dataclass(frozen=True)
class FiniteQuantizer:
    """Finite-level quantizer: cell i = (c_{i-1}, c_i] maps to level l_i.

    ``thresholds`` are the n-1 interior cell boundaries (strictly increasing);
    the outermost cells extend to -inf and +inf.  ``levels`` are the n strictly
    increasing output values.
    """

    thresholds: np.ndarray
    levels: np.ndarray

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.thresholds, dtype=float))
        l = np.atleast_1d(np.asarray(self.levels, dtype=float))
        if l.size != t.size + 1:
            raise ValueError(
                f"need exactly one more level than threshold, got {l.size} levels "
                f"for {t.size} thresholds"
            )
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(l)):
            raise ValueError("thresholds and levels must be finite")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("thresholds must be strictly increasing")
        if not np.all(np.diff(l) > 0):
            raise ValueError("levels must be strictly increasing")
        object.__setattr__(self, "thresholds", t)
        object.__setattr__(self, "levels", l)

    @property
    def interior_thresholds(self) -> np.ndarray:
        return self.thresholds

    @property
    def n_levels(self) -> int:
        return self.levels.size


@dataclass(frozen=True)
class UniformQuantizer:
    """Infinite-level mid-tread quantizer: q(w) = delta * round(w / delta)."""

    delta: float

    def __post_init__(self):
        d = float(self.delta)
        if not (d > 0.0) or not np.isfinite(d):
            raise ValueError(f"delta must be a positive finite number, got {d}")
        object.__setattr__(self, "delta", d)


QuantizerSpec = Union[BinaryQuantizer, FiniteQuantizer, UniformQuantizer]


def quantize_series(w, spec: QuantizerSpec) -> np.ndarray:
    """Apply the cell rule of ``spec`` elementwise to the sequence ``w``."""
    values = np.asarray(w, dtype=float)
    nan_idx = np.flatnonzero(np.isnan(values))
    if nan_idx.size:
        raise ValueError(f"input contains NaN at index {int(nan_idx[0])}")

    if isinstance(spec, BinaryQuantizer):
        return np.where(values >= spec.threshold, 1.0, -1.0)
    if isinstance(spec, FiniteQuantizer):
        cells = np.searchsorted(spec.thresholds, values, side="right")
        return spec.levels[cells]
    if isinstance(spec, UniformQuantizer):
        return spec.delta * np.round(values / spec.delta)
    raise TypeError(f"unsupported quantizer spec: {type(spec).__name__}")


def make_saturated_uniform(lo: float, hi: float, bits: int) -> FiniteQuantizer:
    """Saturated uniform quantizer with granular region [lo, hi].

    The granular region is split into 2**bits equal cells, each mapped to its
    lower boundary.  Inputs beyond the region take the nearest boundary point:
    the upper overload cell (hi, inf) keeps its own lower boundary hi as an
    explicit outermost cell, while the lower overload merges with the first
    granular cell (both output lo, and levels must stay strictly increasing).
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo}, hi={hi}")
    if bits < 1:
        raise ValueError(f"bits must be >= 1, got {bits}")
    if bits > MAX_SATURATED_BITS:
        raise ValueError(f"bits={bits} exceeds the limit of {MAX_SATURATED_BITS}")
    n = 2**bits
    edges = lo + (hi - lo) * np.arange(n + 1) / n
    return FiniteQuantizer(thresholds=edges[1:], levels=edges)


def spec_to_dict(spec: QuantizerSpec) -> dict:
    if isinstance(spec, BinaryQuantizer):
        return {"kind": "binary", "threshold": spec.threshold}
    if isinstance(spec, FiniteQuantizer):
        return {
            "kind": "finite",
            "thresholds": spec.thresholds.tolist(),
            "levels": spec.levels.tolist(),
        }
    if isinstance(spec, UniformQuantizer):
        return {"kind": "uniform", "delta": spec.delta}
    raise TypeError(f"unsupported quantizer spec: {type(spec).__name__}")


def spec_from_dict(data: dict) -> QuantizerSpec:
    kind = data.get("kind")
    if kind == "binary":
        return BinaryQuantizer(threshold=float(data.get("threshold", 0.0)))
    if kind == "finite":
        return FiniteQuantizer(
            thresholds=np.asarray(data["thresholds"], dtype=float),
            levels=np.asarray(data["levels"], dtype=float),
        )
    if kind == "uniform":
        return UniformQuantizer(delta=float(data["delta"]))
    raise ValueError(f"unknown quantizer kind: {kind!r}")


def spec_to_json(spec: QuantizerSpec) -> str:
    return json.dumps(spec_to_dict(spec))


def spec_from_json(text: str) -> QuantizerSpec:
    return spec_from_dict(json.loads(text))
