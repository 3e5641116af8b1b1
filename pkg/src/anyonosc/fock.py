"""Truncated Fock-space backend: braided ladder matrices, Hamiltonian and
Lindblad superoperator construction, propagation, resolvents and decay fits.

This is the brute-force oracle for the closed-form modules and the engine
behind the 2D spectra. Everything is dense; at the default two-mode cutoff 2
the superoperator is 81x81.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .dimer import DEFAULT_CONJUGATION, lindblad_coefficients
from .params import AnyonParams
from .rates import q_bracket, thermal_occupation

JUMP_BASES = ("site", "deformed")


def anyon_ladder_matrix(cutoff: int, theta: float) -> np.ndarray:
    """Single-mode lowering operator a|n> = sqrt([n]_q)|n-1>, principal branch.

    [n]_q = (1 - e^{i theta n})/(1 - e^{i theta}) reduces to n at theta = 0 and
    enforces aa+ - e^{i theta} a+a = 1 below the cutoff (with the transpose,
    entry-preserving raising partner).
    """
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    d = cutoff + 1
    a = np.zeros((d, d), dtype=complex)
    for n in range(1, d):
        a[n - 1, n] = np.sqrt(q_bracket(n, theta))
    return a


class FockSystem:
    """Truncated one- or two-mode Fock representation of the braided algebra.

    Stores the lowering matrices and their *formal* raising partners (transpose
    with unconjugated entries, plus the inverse phase string on mode 2), which
    satisfy the deformed commutation relations exactly below the cutoff.
    Hermitian adjoints are available via ``dagger`` for the "modulus"
    convention.
    """

    def __init__(self, cutoff: int = 2, theta: float = 0.0, modes: int = 2):
        if modes not in (1, 2):
            raise ValueError(f"modes must be 1 or 2, got {modes}")
        if cutoff < 1:
            raise ValueError(f"cutoff must be >= 1, got {cutoff}")
        self.cutoff = cutoff
        self.theta = theta
        self.modes = modes
        d = cutoff + 1
        a = anyon_ladder_matrix(cutoff, theta)
        adag = a.T.copy()  # formal raising partner: same sqrt([n]_q) entries
        number = np.diag(np.arange(d).astype(complex))
        eye = np.eye(d, dtype=complex)
        self.phase_string = np.diag(np.exp(1j * theta * np.arange(d)))
        if modes == 1:
            self.dim = d
            self.lowering = (a,)
            self.raising = (adag,)
            self.number_ops = (number,)
        else:
            # braided embedding: a1 = a (x) 1, a2 = P (x) a with P = e^{i theta N}
            # on mode 1, which guarantees a1 a2 = e^{i theta} a2 a1
            self.dim = d * d
            p = self.phase_string
            pinv = np.conj(p)
            self.lowering = (np.kron(a, eye), np.kron(p, a))
            self.raising = (np.kron(adag, eye), np.kron(pinv, adag))
            self.number_ops = (np.kron(number, eye), np.kron(eye, number))
        self.total_quanta = np.sum(self.number_ops, axis=0).real.diagonal().round().astype(int)

    def dagger(self, mode: int, conjugation: str = DEFAULT_CONJUGATION) -> np.ndarray:
        """Raising operator for one mode: Hermitian adjoint under "modulus",
        the stored formal partner under "analytic"."""
        if conjugation == "modulus":
            return self.lowering[mode].conj().T
        if conjugation == "analytic":
            return self.raising[mode]
        raise ValueError(f"unknown conjugation convention {conjugation!r}")

    def vacuum_projector(self) -> np.ndarray:
        rho = np.zeros((self.dim, self.dim), dtype=complex)
        rho[0, 0] = 1.0
        return rho

    def thermal_diagonal(self, params: AnyonParams) -> np.ndarray:
        """Diagonal Boltzmann state over total quanta (optional rho_eq)."""
        w = np.exp(-params.beta * params.omega * self.total_quanta)
        rho = np.diag(w / w.sum()).astype(complex)
        return rho


def braided_embedding(cutoff: int, theta: float):
    """Two-mode lowering pair (a1, a2) with the mode-1 phase string on a2."""
    sys = FockSystem(cutoff, theta, modes=2)
    return sys.lowering


# ---------------------------------------------------------------------------
# superoperator helpers (row-major vectorization: vec(A rho B) = (A kron B^T) vec rho)

def left_mult(op: np.ndarray) -> np.ndarray:
    return np.kron(op, np.eye(op.shape[0], dtype=complex))


def right_mult(op: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(op.shape[0], dtype=complex), op.T)


def trace_vector(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex).ravel()


def build_hamiltonian(system: FockSystem, params: AnyonParams,
                      conjugation: str = DEFAULT_CONJUGATION,
                      rotating: bool = False) -> np.ndarray:
    """H = omega (N1 + N2) + J (a1+ a2 + a2+ a1) with true number operators.

    ``rotating`` subtracts omega * (N1 + N2), leaving only the exchange term
    (the frame used by the spectra). Single-mode systems get H = omega N.
    """
    n_total = np.sum(system.number_ops, axis=0)
    h = np.zeros((system.dim, system.dim), dtype=complex) if rotating else params.omega * n_total
    if system.modes == 2:
        a1, a2 = system.lowering
        a1d = system.dagger(0, conjugation)
        a2d = system.dagger(1, conjugation)
        h = h + params.coupling_j * (a1d @ a2 + a2d @ a1)
    return h


def jump_operators(system: FockSystem, params: AnyonParams,
                   jump_basis: str = "deformed",
                   conjugation: str = DEFAULT_CONJUGATION):
    """Lindblad jump operators and their adjoints, as (L, L°) pairs.

    All four channels are lowering-type, exactly as the model's printed
    channel structure: emission with rate gamma(n_theta + 1), absorption with
    gamma n_theta and no sign flip. Two realizations:

    - "deformed": the dimer-model channel coefficients on the deformed-mode
      matrices, scaled by sqrt(2) so the generator's first-moment equations
      reproduce the effective matrix W_eff exactly.
    - "site": the literal collective combinations
      sqrt(gamma nbar (1 +/- xi)) (a1 +/- a2)/sqrt2, kept for comparison (its
      first moments do not reproduce W_eff away from xi = 0).

    Single-mode systems use sqrt(gamma(n+1)) a and sqrt(gamma n) a.
    The adjoint of each pair follows the conjugation convention: Hermitian
    under "modulus", formal (unconjugated prefactors and entries) under
    "analytic".
    """
    nth = thermal_occupation(params.theta, params.beta, params.omega)
    pairs = []

    def add(op, op_formal_dag, scalar):
        lop = scalar * op
        if conjugation == "modulus":
            pairs.append((lop, lop.conj().T))
        else:
            pairs.append((lop, scalar * op_formal_dag))

    if system.modes == 1:
        a = system.lowering[0]
        ad = system.raising[0]
        for nbar in (nth + 1.0, nth):
            add(a, ad, np.sqrt(complex(params.gamma) * nbar))
        return pairs

    if jump_basis not in JUMP_BASES:
        raise ValueError(f"unknown jump basis {jump_basis!r}")
    a1, a2 = system.lowering
    a1d, a2d = system.raising
    if jump_basis == "site":
        for nbar in (nth + 1.0, nth):
            pref = np.sqrt(complex(params.gamma) * nbar)
            for sgn in (+1, -1):
                w = math.sqrt(max(0.0, 1.0 + sgn * params.xi))
                add((a1 + sgn * a2) / math.sqrt(2.0), (a1d + sgn * a2d) / math.sqrt(2.0), pref * w)
        return pairs

    # deformed basis: channels from the dimer model mapped onto Fock matrices
    half = np.exp(1j * params.theta / 2.0)
    bp = (a1 + half * a2) / math.sqrt(2.0)
    bm = (a1 - half * a2) / math.sqrt(2.0)
    bpd = (a1d + np.conj(half) * a2d) / math.sqrt(2.0)
    bmd = (a1d - np.conj(half) * a2d) / math.sqrt(2.0)
    for ch in lindblad_coefficients(params):
        op = ch.lambda_plus * bp + ch.lambda_minus * bm
        lop = math.sqrt(2.0) * op
        if conjugation == "modulus":
            pairs.append((lop, lop.conj().T))
        else:
            opd = ch.conjugated("plus", "analytic") * bpd + ch.conjugated("minus", "analytic") * bmd
            pairs.append((lop, math.sqrt(2.0) * opd))
    return pairs


def build_liouvillian(system: FockSystem, params: AnyonParams,
                      jump_basis: str = "deformed",
                      conjugation: str = DEFAULT_CONJUGATION,
                      rotating: bool = False) -> np.ndarray:
    """Vectorized generator of d rho/dt = -i[H, rho] + sum_k D[L_k] rho.

    D[L] rho = L rho L° - (L°L rho + rho L°L)/2 with L° the configured
    adjoint. Trace preservation holds for any adjoint pair by construction.
    """
    h = build_hamiltonian(system, params, conjugation, rotating)
    liouv = -1j * (left_mult(h) - right_mult(h))
    for lop, ldag in jump_operators(system, params, jump_basis, conjugation):
        ll = ldag @ lop
        # vec(L rho L°) = (L kron L°^T) vec(rho): sandwich terms are single krons
        liouv += np.kron(lop, ldag.T) - 0.5 * (left_mult(ll) + right_mult(ll))
    return liouv


# ---------------------------------------------------------------------------
# states and propagation

@dataclass
class DensityState:
    """Density matrix with defect diagnostics instead of hard positivity checks
    (positivity is not guaranteed for intermediate theta)."""

    matrix: np.ndarray

    @property
    def trace(self) -> complex:
        return np.trace(self.matrix)

    def trace_defect(self) -> float:
        return abs(self.trace - 1.0)

    def hermiticity_defect(self) -> float:
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T))

    def min_eigenvalue(self) -> float:
        sym = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.linalg.eigvalsh(sym).min())

    def expectation(self, op: np.ndarray) -> complex:
        return np.trace(op @ self.matrix)


def propagate(liouv: np.ndarray, state: DensityState, t: float) -> DensityState:
    """Propagate the vectorized state through exp(L t) (scaling-and-squaring)."""
    if t < 0.0:
        raise ValueError(f"t must be non-negative, got {t}")
    if t == 0.0:
        return DensityState(state.matrix.copy())
    d = state.matrix.shape[0]
    vec = sla.expm(liouv * t) @ state.matrix.ravel()
    return DensityState(vec.reshape(d, d))


def steady_state(liouv: np.ndarray) -> DensityState:
    """Unit-trace kernel vector of the generator (smallest singular vector)."""
    dim2 = liouv.shape[0]
    d = int(round(math.sqrt(dim2)))
    _, _, vh = np.linalg.svd(liouv)
    rho = vh[-1].conj().reshape(d, d)
    tr = np.trace(rho)
    if abs(tr) < 1e-12:
        raise np.linalg.LinAlgError("kernel vector is traceless; no stationary state found")
    return DensityState(rho / tr)


def resolvent_apply(liouv: np.ndarray, omega: float, sign: int, vector: np.ndarray,
                    return_condition: bool = False):
    """Frequency-domain solve x = (sign*i*omega*I - L)^{-1} (-vector).

    Equals -int_0^inf e^{-sign i omega t} e^{Lt} v dt whenever the integral
    converges. sign +1 is the ket-evolution interval, -1 the conjugate
    (rephasing) interval. Optionally returns a one-norm condition estimate of
    the shifted matrix.
    """
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    shifted = sign * 1j * omega * np.eye(liouv.shape[0], dtype=complex) - liouv
    lu, piv = sla.lu_factor(shifted)
    x = sla.lu_solve((lu, piv), -np.asarray(vector, dtype=complex))
    if not return_condition:
        return x
    gecon = sla.get_lapack_funcs(("gecon",), (shifted,))[0]
    rcond, _ = gecon(lu, np.linalg.norm(shifted, 1), norm="1")
    cond = float(1.0 / rcond) if rcond > 0 else float("inf")
    return x, cond


def fit_decay_rate(times: np.ndarray, series: np.ndarray, residual_tol: float = 1e-2):
    """Least-squares fit of A e^{(-rate - i freq) t} to a complex series.

    Log-linear fit with unwrapped phase; returns (rate, freq, residual) where
    residual is the normalized misfit of the reconstructed exponential. A
    residual above ``residual_tol`` marks a non-exponential signal (e.g. the
    polynomial-times-exponential dynamics near an exceptional point).
    """
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=complex)
    if times.shape != series.shape or times.size < 3:
        raise ValueError("times and series must be equal-length with at least 3 samples")
    mags = np.abs(series)
    keep = mags > 1e-12 * mags.max()
    t, s = times[keep], series[keep]
    logs = np.log(np.abs(s)) + 1j * np.unwrap(np.angle(s))
    slope, intercept = np.polyfit(t, logs, 1)
    rate, freq = -slope.real, -slope.imag
    model = np.exp(intercept) * np.exp(slope * t)
    residual = float(np.linalg.norm(model - s) / np.linalg.norm(s))
    return rate, freq, residual, residual > residual_tol
