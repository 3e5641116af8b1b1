"""Closed-form single-oscillator quantities of the deformed algebra.

Everything here is a pure function of its arguments: the deformed-commutator
spectrum, the generalized (complex) thermal occupation, the statistical phase
average and the relaxation rates, with their boson (theta = 0) and fermion
(theta = pi) limits.
"""

from __future__ import annotations

import cmath
import math

from .params import AnyonParams, ComplexRate, ParameterError, BETA_OMEGA_FLOOR


def deformed_commutator_eigenvalue(n: int, theta: float) -> complex:
    """Eigenvalue of the deformed commutator [a, a+] on the n-quantum state.

    In the Fock representation used throughout (a|n> = sqrt([n]_q)|n-1> with
    [n]_q = (1 - e^{i theta n})/(1 - e^{i theta})), the operator
    1 + (e^{i theta} - 1) N has eigenvalue e^{i theta n}.
    """
    if n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n}")
    return cmath.exp(1j * theta * n)


def q_bracket(n: int, theta: float) -> complex:
    """Deformed integer [n]_q = (1 - e^{i theta n})/(1 - e^{i theta}); n at theta=0.

    The boson and fermion endpoints are special-cased so that the limits are
    exact: [n] = n at theta = 0, and 1/0 for odd/even n at theta = pi (the
    exclusion zero must not pick up rounding noise, which the square roots of
    the ladder entries would amplify).
    """
    if theta == 0.0:
        return complex(n)
    if theta == math.pi:
        return complex(n % 2)
    q = cmath.exp(1j * theta)
    if abs(1.0 - q) < 1e-12:
        return complex(n)
    return (1.0 - q**n) / (1.0 - q)


def thermal_occupation(theta: float, beta: float, omega: float) -> complex:
    """Generalized thermal occupation 1/(e^{beta omega} - e^{i theta}).

    Complex for intermediate theta; real at the boson and fermion points.
    Raises ParameterError when beta*omega is below the configured floor,
    where the expression approaches its theta -> 0 pole.
    """
    bw = beta * omega
    if bw < BETA_OMEGA_FLOOR:
        raise ParameterError(f"beta*omega = {bw:g} below floor {BETA_OMEGA_FLOOR:g}")
    return 1.0 / (math.exp(bw) - cmath.exp(1j * theta))


def phase_average(theta: float, z: float) -> complex:
    """Thermal average of the exchange phase, (1 - z)/(1 - z e^{i theta}).

    Equals sum_n e^{i theta n} (1 - z) z^n for the Boltzmann weights z^n.
    """
    if not 0.0 <= z < 1.0:
        raise ValueError(f"z must lie in [0, 1), got {z}")
    return (1.0 - z) / (1.0 - z * cmath.exp(1j * theta))


def phase_average_series(theta: float, z: float, tol: float = 1e-14) -> complex:
    """Truncated-series oracle for phase_average: sum e^{i theta n}(1-z)z^n with z^N < tol."""
    if z == 0.0:
        return 1.0 + 0.0j
    nmax = max(1, int(math.ceil(math.log(tol) / math.log(z))))
    total = 0.0 + 0.0j
    for n in range(nmax + 1):
        total += cmath.exp(1j * theta * n) * (1.0 - z) * z**n
    return total


def gamma_stat(theta: float, z: float, gamma: float) -> float:
    """Statistical contribution to the coherence relaxation rate.

    (gamma/2) * [1 - (1-z)(1 - z cos theta)/(1 - 2 z cos theta + z^2)];
    vanishes in the boson limit and is maximal in the fermion limit, where it
    reduces to gamma * z/(1+z).
    """
    if gamma < 0.0:
        raise ValueError(f"gamma must be non-negative, got {gamma}")
    if not 0.0 <= z < 1.0:
        raise ValueError(f"z must lie in [0, 1), got {z}")
    c = math.cos(theta)
    if c == 1.0:  # boson limit: exactly zero, no cancellation residue
        return 0.0
    re_avg = (1.0 - z) * (1.0 - z * c) / (1.0 - 2.0 * z * c + z * z)
    return 0.5 * gamma * (1.0 - re_avg)


def gamma_full_single(params: AnyonParams) -> ComplexRate:
    """Total phase relaxation rate of a single oscillator.

    (gamma/2) * [2 n_theta + 1 + (1 - Re<e^{i theta N}>)], complex in general
    because n_theta is; the physical decay rate reported to users is the real
    part. Boson limit: (gamma/2)(2n + 1).
    """
    nth = thermal_occupation(params.theta, params.beta, params.omega)
    re_avg = phase_average(params.theta, params.z).real
    value = 0.5 * params.gamma * (2.0 * nth + 1.0 + (1.0 - re_avg))
    return ComplexRate(value)
