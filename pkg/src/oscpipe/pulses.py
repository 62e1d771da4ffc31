"""Initial-data families shared by the solvers, the study harness, and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ConfigurationError

LINKS = ("right", "left", "pressure", "velocity")


@dataclass(frozen=True)
class GaussianPulse:
    """Gaussian envelope, optionally carrier-modulated (narrowband packet).

    p0(x) = A exp(-(x-c)^2 / 2 sigma^2) cos(carrier (x-c)/a);  the link picks
    the p/v combination: 'right'/'left' are pure d'Alembert movers
    (v0 = +-p0/(a rho0)), 'pressure' sets v0 = 0, 'velocity' swaps the roles.
    """

    center: float
    width: float
    amplitude: float = 1.0
    link: str = "right"
    carrier: float = 0.0

    def __post_init__(self):
        if self.width <= 0:
            raise ConfigurationError("pulse width must be > 0")
        if self.link not in LINKS:
            raise ConfigurationError(f"pulse link must be one of {LINKS}")

    def _envelope(self, x):
        xi = (np.asarray(x, dtype=float) - self.center)
        return self.amplitude * np.exp(-xi ** 2 / (2 * self.width ** 2))

    def _shape(self, x, a: float):
        xi = np.asarray(x, dtype=float) - self.center
        env = self._envelope(x)
        if self.carrier == 0.0:
            return env
        return env * np.cos(self.carrier * xi / a)

    def _dshape(self, x, a: float):
        xi = np.asarray(x, dtype=float) - self.center
        env = self._envelope(x)
        if self.carrier == 0.0:
            return -xi / self.width ** 2 * env
        k = self.carrier / a
        return env * (-xi / self.width ** 2 * np.cos(k * xi) - k * np.sin(k * xi))

    def p0(self, x, medium):
        if self.link == "velocity":
            return np.zeros_like(np.asarray(x, dtype=float))
        return self._shape(x, medium.a)

    def v0(self, x, medium):
        s = self._shape(x, medium.a)
        if self.link == "right":
            return s / medium.a_rho0
        if self.link == "left":
            return -s / medium.a_rho0
        if self.link == "velocity":
            return s / medium.a_rho0
        return np.zeros_like(s)

    def dp0(self, x, medium):
        if self.link == "velocity":
            return np.zeros_like(np.asarray(x, dtype=float))
        return self._dshape(x, medium.a)

    def support_radius(self, tol: float = 1e-13) -> float:
        """Distance from the center beyond which |envelope| <= tol * amplitude."""
        return self.width * math.sqrt(2.0 * math.log(1.0 / tol))


@dataclass(frozen=True)
class CompactBump:
    """Polynomial bump A (1 - xi^2)^3 on |x - c| < w: compactly supported, C^2."""

    center: float
    width: float
    amplitude: float = 1.0
    link: str = "right"

    def __post_init__(self):
        if self.width <= 0:
            raise ConfigurationError("bump width must be > 0")
        if self.link not in LINKS:
            raise ConfigurationError(f"bump link must be one of {LINKS}")

    def _shape(self, x, a=None):
        xi = (np.asarray(x, dtype=float) - self.center) / self.width
        return self.amplitude * np.where(np.abs(xi) < 1.0, (1.0 - xi ** 2) ** 3, 0.0)

    def _dshape(self, x, a=None):
        xi = (np.asarray(x, dtype=float) - self.center) / self.width
        inside = np.abs(xi) < 1.0
        return self.amplitude * np.where(inside, -6.0 * xi * (1.0 - xi ** 2) ** 2, 0.0) / self.width

    def p0(self, x, medium):
        if self.link == "velocity":
            return np.zeros_like(np.asarray(x, dtype=float))
        return self._shape(x)

    def v0(self, x, medium):
        s = self._shape(x)
        if self.link == "right":
            return s / medium.a_rho0
        if self.link == "left":
            return -s / medium.a_rho0
        if self.link == "velocity":
            return s / medium.a_rho0
        return np.zeros_like(s)

    def dp0(self, x, medium):
        if self.link == "velocity":
            return np.zeros_like(np.asarray(x, dtype=float))
        return self._dshape(x)

    def support_radius(self, tol: float = 0.0) -> float:
        return self.width
