"""Code parameters, edge weights, dimension ratios and null-check bookkeeping.

An (alpha, d) lattice code is governed by a degree d and a real alpha in
[0, 1]; every node carries one unit-magnitude edge and d-1 edges of
magnitude w = sqrt(alpha / (d - 1)).  Coupled variants chain L positions,
either with the band-structured "standard" layout or with a randomized
window of width K (the smoothing parameter).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParameterError

MODES = ("conventional", "standard", "randomized")


def derive_weight(alpha: float, d: int) -> float:
    """Edge weight w = sqrt(alpha / (d - 1)) of an (alpha, d) code."""
    if d < 2:
        raise ParameterError(f"degree must be at least 2, got d={d}")
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha}")
    return math.sqrt(alpha / (d - 1))


@dataclass(frozen=True)
class LdlcParams:
    """Degree d and weight parameter alpha of the sparse inverse generator."""

    alpha: float
    d: int

    def __post_init__(self):
        derive_weight(self.alpha, self.d)  # validates both fields

    @property
    def w(self) -> float:
        return derive_weight(self.alpha, self.d)


@dataclass(frozen=True)
class CouplingParams:
    """Chain length L, smoothing parameter K and coupling mode."""

    mode: str
    L: int = 1
    K: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if self.L < 1:
            raise ParameterError(f"L must be positive, got {self.L}")
        if self.K < 1:
            raise ParameterError(f"K must be positive, got {self.K}")
        if self.mode == "conventional":
            if self.L != 1 or self.K != 1:
                raise ParameterError("conventional mode requires L=1 and K=1")
        elif self.mode == "standard":
            if self.L < 2:
                raise ParameterError(f"standard coupling requires L >= 2, got L={self.L}")
        else:  # randomized
            if self.L < 2:
                raise ParameterError(f"randomized coupling requires L >= 2, got L={self.L}")
            if self.K >= self.L:
                raise ParameterError(f"smoothing parameter must satisfy K < L, got K={self.K}, L={self.L}")

    @classmethod
    def conventional(cls) -> "CouplingParams":
        return cls("conventional", 1, 1)

    @classmethod
    def standard(cls, L: int) -> "CouplingParams":
        return cls("standard", L, 1)

    @classmethod
    def randomized(cls, L: int, K: int) -> "CouplingParams":
        return cls("randomized", L, K)


def null_check_positions(coupling: CouplingParams, params: LdlcParams) -> frozenset[int]:
    """1-based check positions whose integer is terminated to zero.

    Standard coupling terminates the last d-1 positions, randomized
    coupling the last K-1; a conventional code has none.
    """
    if coupling.mode == "standard":
        if coupling.L < params.d:
            raise ParameterError(
                f"standard coupling requires L >= d, got L={coupling.L}, d={params.d}")
        return frozenset(range(coupling.L - params.d + 2, coupling.L + 1))
    if coupling.mode == "randomized":
        return frozenset(range(coupling.L - coupling.K + 2, coupling.L + 1))
    return frozenset()


def dimension_ratio(coupling: CouplingParams, params: LdlcParams) -> Fraction:
    """Fraction of lattice dimensions kept after termination.

    1 - (d-1)/L for standard coupling, 1 - (K-1)/L for randomized
    coupling, and exactly 1 for a conventional code.
    """
    if coupling.mode == "standard":
        if coupling.L < params.d:
            raise ParameterError(
                f"standard coupling requires L >= d, got L={coupling.L}, d={params.d}")
        return Fraction(coupling.L - params.d + 1, coupling.L)
    if coupling.mode == "randomized":
        return Fraction(coupling.L - coupling.K + 1, coupling.L)
    return Fraction(1)
