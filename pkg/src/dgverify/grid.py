"""Uniform grid on [0, L]."""

from __future__ import annotations

import numpy as np

__all__ = ["Grid"]


class Grid:
    """Uniform partition of [0, L] into n cells, nodes x_i = i*L/n.

    Nodes are computed as (i*L)/n so x_n == L exactly; with the default
    L = 10 and power-of-ten-friendly n the spacing h = L/n is itself exact.
    """

    __slots__ = ("L", "n", "h")

    def __init__(self, L: float = 10.0, n: int = 8000):
        if n < 2:
            raise ValueError("need at least 2 cells")
        if not (L > 0 and np.isfinite(L)):
            raise ValueError("bad domain length")
        object.__setattr__(self, "L", float(L))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "h", float(L) / int(n))

    def __setattr__(self, name, value):
        raise AttributeError("Grid is immutable")

    def nodes(self) -> np.ndarray:
        return np.arange(self.n + 1, dtype=np.float64) * self.L / self.n

    def node(self, i: int) -> float:
        return (i * self.L) / self.n

    def cell_of(self, x: float, left_at_node: bool = False) -> int:
        """Cell index i with x in [x_i, x_(i+1)]; ties per ``left_at_node``."""
        if left_at_node:
            i = int(np.ceil(x / self.h)) - 1
            while i + 1 <= self.n - 1 and self.node(i + 1) < x:
                i += 1
            while i >= 1 and self.node(i) >= x:
                i -= 1
            if x <= 0.0:
                i = 0
        else:
            i = int(np.floor(x / self.h))
            while i + 1 <= self.n - 1 and self.node(i + 1) <= x:
                i += 1
            while i >= 1 and self.node(i) > x:
                i -= 1
        return max(0, min(self.n - 1, i))

    def refined(self, N: int) -> "Grid":
        if N % self.n != 0:
            raise ValueError(f"refinement count {N} is not a multiple of {self.n}")
        return Grid(self.L, N)

    def aligned_index(self, x: float) -> int:
        """Node index of x, which must be a grid node exactly."""
        i = int(round(x / self.h))
        if not (0 <= i <= self.n) or self.node(i) != x:
            raise ValueError(f"{x} is not a node of Grid(L={self.L}, n={self.n})")
        return i

    def __eq__(self, other):
        return (isinstance(other, Grid) and self.L == other.L
                and self.n == other.n)

    def __hash__(self):
        return hash((self.L, self.n))

    def __repr__(self):
        return f"Grid(L={self.L}, n={self.n})"
