"""Spatial region descriptors: annulus and box domains.

Points are plain length-n float arrays. A domain answers membership
queries, exposes a signed inside function (positive inside, negative
outside) used for boundary bisection, and knows its diameter.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class AnnulusDomain:
    r_inner: float
    r_outer: float
    center: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not 0.0 <= self.r_inner < self.r_outer:
            raise ValueError("annulus requires 0 <= r_inner < r_outer")

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def diameter(self) -> float:
        return 2.0 * self.r_outer

    def inside(self, x) -> float:
        """Signed inside function: min distance to either boundary circle."""
        r = float(np.linalg.norm(np.asarray(x, dtype=float) - self.center))
        return min(r - self.r_inner, self.r_outer - r)

    def contains(self, x, slack: float = 0.0) -> bool:
        return self.inside(x) >= -slack

    def boundary_name(self, x) -> str:
        r = float(np.linalg.norm(np.asarray(x, dtype=float) - self.center))
        return "inner" if (r - self.r_inner) < (self.r_outer - r) else "outer"

    def sample_grid(self, n: int) -> np.ndarray:
        """Deterministic n x n polar grid of interior points, flattened."""
        radii = np.linspace(self.r_inner, self.r_outer, n + 2)[1:-1]
        angles = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        rr, aa = np.meshgrid(radii, angles)
        pts = np.stack([rr * np.cos(aa), rr * np.sin(aa)], axis=-1).reshape(-1, 2)
        return pts + self.center


@dataclass(frozen=True)
class BoxDomain:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", np.asarray(self.lo, dtype=float))
        object.__setattr__(self, "hi", np.asarray(self.hi, dtype=float))
        if self.lo.shape != self.hi.shape or np.any(self.lo >= self.hi):
            raise ValueError("box requires lo < hi componentwise")

    @property
    def dim(self) -> int:
        return self.lo.size

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    def inside(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.min(np.minimum(x - self.lo, self.hi - x)))

    def contains(self, x, slack: float = 0.0) -> bool:
        return self.inside(x) >= -slack

    def boundary_name(self, x) -> str:
        x = np.asarray(x, dtype=float)
        gaps = np.concatenate([x - self.lo, self.hi - x])
        names = [f"lo[{i}]" for i in range(self.dim)] + [f"hi[{i}]" for i in range(self.dim)]
        return names[int(np.argmin(gaps))]

    def sample_grid(self, n: int) -> np.ndarray:
        axes = [np.linspace(a, b, n + 2)[1:-1] for a, b in zip(self.lo, self.hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)
