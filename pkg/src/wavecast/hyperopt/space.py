"""Search-space description with encoding to and from the unit cube.

Numeric dimensions map to single coordinates in [0, 1] (linearly, or linearly
in log space); categorical dimensions map to one-hot blocks. Decoding snaps
integers by rounding and categories by argmax, so every decoded point is a
valid member of the space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

import numpy as np

__all__ = [
    "OutOfBounds",
    "Dimension",
    "SearchSpace",
    "default_search_space",
]

_KINDS = ("integer_linear", "real_linear", "real_log", "categorical")


class OutOfBounds(ValueError):
    """A value lies outside its dimension's bounds or category set."""


@dataclass(frozen=True)
class Dimension:
    """One tunable quantity: numeric with bounds, or a finite category set."""

    name: str
    kind: str
    low: float | None = None
    high: float | None = None
    categories: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("dimension name must be non-empty")
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if self.kind == "categorical":
            if len(self.categories) < 2:
                raise ValueError("categorical dimensions need at least two categories")
            if len(set(self.categories)) != len(self.categories):
                raise ValueError("categories must be unique")
            object.__setattr__(self, "categories", tuple(str(c) for c in self.categories))
        else:
            if self.low is None or self.high is None:
                raise ValueError(f"numeric dimension {self.name!r} needs low and high")
            low, high = float(self.low), float(self.high)
            if not (math.isfinite(low) and math.isfinite(high) and low < high):
                raise ValueError(f"need finite low < high for {self.name!r}")
            if self.kind == "real_log" and low <= 0.0:
                raise ValueError(f"log-scaled dimension {self.name!r} needs low > 0")
            if self.kind == "integer_linear" and (low != int(low) or high != int(high)):
                raise ValueError(f"integer dimension {self.name!r} needs integer bounds")
            object.__setattr__(self, "low", low)
            object.__setattr__(self, "high", high)

    @property
    def encoded_width(self) -> int:
        return len(self.categories) if self.kind == "categorical" else 1

    def _decode_unit(self, u: float):
        u = min(1.0, max(0.0, float(u)))
        if self.kind == "integer_linear":
            return int(min(self.high, max(self.low, round(self.low + u * (self.high - self.low)))))
        if self.kind == "real_linear":
            return min(self.high, max(self.low, self.low + u * (self.high - self.low)))
        # real_log
        log_low, log_high = math.log(self.low), math.log(self.high)
        value = math.exp(log_low + u * (log_high - log_low))
        return min(self.high, max(self.low, value))

    def _encode_unit(self, value) -> float:
        if self.kind == "integer_linear":
            v = int(value)
            if v != value or not self.low <= v <= self.high:
                raise OutOfBounds(f"{self.name}={value!r} outside [{self.low}, {self.high}]")
            return (v - self.low) / (self.high - self.low)
        v = float(value)
        if not self.low <= v <= self.high:
            raise OutOfBounds(f"{self.name}={value!r} outside [{self.low}, {self.high}]")
        if self.kind == "real_linear":
            u = (v - self.low) / (self.high - self.low)
        else:
            u = (math.log(v) - math.log(self.low)) / (math.log(self.high) - math.log(self.low))
        u = min(1.0, max(0.0, u))
        # The analytic inverse can land a few ulps off; nudge to an exact
        # preimage when one exists so decode(encode(v)) returns v bit-for-bit.
        if self._decode_unit(u) == v:
            return u
        for _ in range(8):
            up = math.nextafter(u, 1.0)
            if self._decode_unit(up) == v:
                return up
            u2 = math.nextafter(u, 0.0)
            if self._decode_unit(u2) == v:
                return u2
            u = up if abs(self._decode_unit(up) - v) < abs(self._decode_unit(u2) - v) else u2
        return u


@dataclass(frozen=True)
class SearchSpace:
    """Ordered collection of dimensions defining the tuning domain."""

    dimensions: tuple[Dimension, ...]

    def __post_init__(self) -> None:
        dims = tuple(self.dimensions)
        if not dims:
            raise ValueError("a search space needs at least one dimension")
        names = [d.name for d in dims]
        if len(set(names)) != len(names):
            raise ValueError("dimension names must be unique")
        object.__setattr__(self, "dimensions", dims)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dimensions)

    @property
    def encoded_dim(self) -> int:
        return sum(d.encoded_width for d in self.dimensions)

    def encode(self, point: Mapping[str, Any]) -> np.ndarray:
        """Map a point dict onto the unit cube; OutOfBounds for bad values."""
        unknown = set(point) - set(self.names)
        if unknown:
            raise ValueError(f"unknown dimensions {sorted(unknown)}")
        out = np.empty(self.encoded_dim)
        offset = 0
        for dim in self.dimensions:
            if dim.name not in point:
                raise ValueError(f"point is missing dimension {dim.name!r}")
            value = point[dim.name]
            if dim.kind == "categorical":
                if value not in dim.categories:
                    raise OutOfBounds(
                        f"{dim.name}={value!r} not among {list(dim.categories)}"
                    )
                block = np.zeros(len(dim.categories))
                block[dim.categories.index(value)] = 1.0
                out[offset : offset + dim.encoded_width] = block
            else:
                out[offset] = dim._encode_unit(value)
            offset += dim.encoded_width
        return out

    def decode(self, vector: np.ndarray) -> dict[str, Any]:
        """Map a unit-cube vector back to a concrete point.

        Coordinates are clipped to [0, 1]; integers round to the nearest level
        and categorical blocks pick the largest slot (first on ties).
        """
        vec = np.asarray(vector, dtype=np.float64).reshape(-1)
        if vec.shape != (self.encoded_dim,):
            raise ValueError(f"expected vector of length {self.encoded_dim}, got {vec.shape}")
        point: dict[str, Any] = {}
        offset = 0
        for dim in self.dimensions:
            if dim.kind == "categorical":
                block = vec[offset : offset + dim.encoded_width]
                point[dim.name] = dim.categories[int(np.argmax(block))]
            else:
                point[dim.name] = dim._decode_unit(vec[offset])
            offset += dim.encoded_width
        return point

    def snap(self, vector: np.ndarray) -> np.ndarray:
        """Project a unit-cube vector onto the encoding of its decoded point."""
        return self.encode(self.decode(vector))

    def subset(self, names: Iterable[str]) -> "SearchSpace":
        wanted = list(names)
        by_name = {d.name: d for d in self.dimensions}
        missing = [n for n in wanted if n not in by_name]
        if missing:
            raise ValueError(f"unknown dimensions {missing}")
        return SearchSpace(tuple(by_name[n] for n in wanted))


def default_search_space() -> SearchSpace:
    """Tuning domain for the forecaster: width, depth, optimizer, and mode."""
    return SearchSpace(
        (
            Dimension("units", "integer_linear", 60, 250),
            Dimension("layers", "integer_linear", 1, 8),
            Dimension("learning_rate", "real_log", 1e-2, 1.0),
            Dimension("l2_penalty", "real_log", 1e-10, 1e-2),
            Dimension("dropout_rate", "real_linear", 0.1, 0.9),
            Dimension("mode", "categorical", categories=("bilstm", "lstm")),
        )
    )
