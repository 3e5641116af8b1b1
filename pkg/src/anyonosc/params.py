"""Shared parameter set and small value types for the anyonic oscillator model."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


class ParameterError(ValueError):
    """Raised when a physical parameter is outside its admissible range."""


# Reject beta*omega below this floor: the generalized occupation 1/(e^{bw} - e^{i theta})
# has a pole as bw -> 0, theta -> 0, and we fail loudly instead of returning infinities.
BETA_OMEGA_FLOOR = 1e-9


@dataclass(frozen=True)
class AnyonParams:
    """Physical parameters of the anyonic oscillator pair.

    theta      statistical exchange angle, radians in [0, pi]
    omega      mode frequency; sets the unit of every other rate
    coupling_j hopping between the two modes, in units of omega
    gamma      bath coupling rate, in units of omega
    beta       inverse temperature, so beta*omega is dimensionless
    xi         bath correlation in [-1, 1]
    """

    theta: float
    omega: float = 1.0
    coupling_j: float = 0.2
    gamma: float = 0.1
    beta: float = 1.0
    xi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ParameterError(f"theta must lie in [0, pi], got {self.theta}")
        if not -1.0 <= self.xi <= 1.0:
            raise ParameterError(f"xi must lie in [-1, 1], got {self.xi}")
        if self.omega <= 0.0:
            raise ParameterError(f"omega must be positive, got {self.omega}")
        if self.gamma < 0.0:
            raise ParameterError(f"gamma must be non-negative, got {self.gamma}")
        if self.beta <= 0.0:
            raise ParameterError(f"beta must be positive, got {self.beta}")
        if self.beta * self.omega < BETA_OMEGA_FLOOR:
            raise ParameterError(
                f"beta*omega = {self.beta * self.omega:g} below floor {BETA_OMEGA_FLOOR:g}"
            )

    @property
    def beta_omega(self) -> float:
        return self.beta * self.omega

    @property
    def z(self) -> float:
        """Boltzmann weight z = exp(-beta*omega), always in (0, 1)."""
        return math.exp(-self.beta * self.omega)

    def with_(self, **kw) -> "AnyonParams":
        """Copy with selected fields replaced (validation re-runs)."""
        return replace(self, **kw)


@dataclass(frozen=True)
class ComplexRate:
    """A relaxation quantity whose real part is the decay rate and whose
    imaginary part is a frequency shift inherited from the complex occupation."""

    value: complex

    @property
    def decay(self) -> float:
        return self.value.real

    @property
    def shift(self) -> float:
        return self.value.imag
