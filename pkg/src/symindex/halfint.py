"""Exact half-integer arithmetic.

Index values live in (1/2)Z and must never be represented as floats; a
half-integer is stored as its doubled value, which is an ordinary int.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class HalfInteger:
    """A value in (1/2)Z stored exactly as ``doubled = 2 * value``."""

    doubled: int

    def __post_init__(self):
        if not isinstance(self.doubled, int):
            raise TypeError(f"doubled must be int, got {type(self.doubled).__name__}")

    @classmethod
    def from_integer(cls, value: int) -> "HalfInteger":
        return cls(2 * value)

    @property
    def value(self) -> float:
        return self.doubled / 2.0

    @property
    def is_integer(self) -> bool:
        return self.doubled % 2 == 0

    def __add__(self, other: "HalfInteger") -> "HalfInteger":
        return HalfInteger(self.doubled + other.doubled)

    def __sub__(self, other: "HalfInteger") -> "HalfInteger":
        return HalfInteger(self.doubled - other.doubled)

    def __neg__(self) -> "HalfInteger":
        return HalfInteger(-self.doubled)

    def __str__(self) -> str:
        if self.doubled % 2 == 0:
            return str(self.doubled // 2)
        return f"{self.doubled}/2"

    def to_json(self) -> dict:
        # Wire format: only ever {"doubled": int}, never a float.
        return {"doubled": self.doubled}
