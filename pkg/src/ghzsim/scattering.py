"""Closed-form optics of one quantum-dot QND detector.

A singly charged quantum dot sits in a single-sided cavity. A resonant photon
is reflected with an amplitude that depends on whether its circular component
couples to the trion transition: r1 for the coupled case, r0 for the empty
cavity. Everything here is frequency-domain and analytic.

Units: all rates and frequencies in ueV, times in ns, with
hbar = 0.6582119569 ueV*ns. With that convention a pulse of bandwidth
sigma = 0.6 ueV takes t0 = hbar/sigma ~ 1.10 ns per scattering event.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HBAR_UEV_NS = 0.6582119569  # ueV * ns

DEFAULT_QUAD_NODES = 64


class QuadratureConvergenceError(RuntimeError):
    """Raised when doubling the Gauss-Hermite node count moves the result too much."""


def _require_finite(name: str, value) -> None:
    if not np.all(np.isfinite(value)):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class CavityQDParams:
    """Physical parameters of one QND detector unit.

    g       : QD-cavity coupling strength (ueV)
    kappa   : directional coupling of the cavity to the in/out mode (ueV)
    kappa_s : cavity side-leakage rate, stands in for all absorption loss (ueV)
    gamma   : trion decay rate (ueV)
    omega_c : cavity resonance (ueV)
    omega_x : trion transition frequency (ueV)
    """

    g: float
    kappa: float
    kappa_s: float
    gamma: float
    omega_c: float = 0.0
    omega_x: float = 0.0

    def __post_init__(self):
        for name in ("g", "kappa", "kappa_s", "gamma", "omega_c", "omega_x"):
            _require_finite(name, getattr(self, name))
        if self.g < 0 or self.kappa_s < 0 or self.gamma < 0:
            raise ValueError("rates g, kappa_s, gamma must be >= 0")
        if self.kappa <= 0:
            raise ValueError("kappa must be > 0")

    @classmethod
    def resonant(cls, g: float, kappa: float, kappa_s: float, gamma: float,
                 omega: float = 0.0) -> "CavityQDParams":
        """Cavity tuned onto the trion line (omega_c = omega_x = omega)."""
        return cls(g=g, kappa=kappa, kappa_s=kappa_s, gamma=gamma,
                   omega_c=omega, omega_x=omega)


@dataclass(frozen=True)
class PulseSpectrum:
    """Gaussian single-photon spectrum: center omega_c, bandwidth sigma (both ueV)."""

    omega_c: float
    sigma: float

    def __post_init__(self):
        _require_finite("omega_c", self.omega_c)
        _require_finite("sigma", self.sigma)
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")


@dataclass(frozen=True)
class ReflectionPair:
    """State-dependent reflection amplitudes: r0 uncoupled (empty cavity), r1 coupled."""

    r0: complex
    r1: complex

    @classmethod
    def ideal(cls) -> "ReflectionPair":
        return cls(r0=-1.0 + 0.0j, r1=1.0 + 0.0j)

    def flip_amplitude(self) -> complex:
        """Amplitude of the polarization-flip (QND-success) branch."""
        return (self.r1 - self.r0) / 2.0

    def error_amplitude(self) -> complex:
        """Amplitude of the unchanged (error) branch."""
        return (self.r1 + self.r0) / 2.0


def reflection_coeffs(params: CavityQDParams, omega) -> ReflectionPair:
    """Reflection amplitudes of the detector unit at frequency omega (ueV).

    r0 = 1 - kappa / [i(omega_c - omega) + (kappa + kappa_s)/2]
    r1 = 1 - kappa*f / {[i(omega_c - omega) + (kappa + kappa_s)/2]*f + g^2}
    with f = i(omega_x - omega) + gamma/2.

    Accepts a scalar or an ndarray of frequencies.
    """
    _require_finite("omega", omega)
    w = np.asarray(omega, dtype=float)
    denom = 1j * (params.omega_c - w) + params.kappa / 2.0 + params.kappa_s / 2.0
    f = 1j * (params.omega_x - w) + params.gamma / 2.0
    r0 = 1.0 - params.kappa / denom
    r1 = 1.0 - params.kappa * f / (denom * f + params.g ** 2)
    if np.isscalar(omega) or w.ndim == 0:
        return ReflectionPair(r0=complex(r0), r1=complex(r1))
    return ReflectionPair(r0=r0, r1=r1)


def cooperativity(params: CavityQDParams) -> float:
    """C = g^2 / (gamma * (kappa + kappa_s)), the emitter-cavity figure of merit."""
    kappa_t = params.kappa + params.kappa_s
    if params.gamma <= 0 or kappa_t <= 0:
        raise ValueError("cooperativity requires gamma > 0 and kappa + kappa_s > 0")
    return params.g ** 2 / (params.gamma * kappa_t)


def eta1(params: CavityQDParams, omega) -> float:
    """Error-free scattering efficiency |r1 - r0|^2 / 4 at frequency omega."""
    pair = reflection_coeffs(params, omega)
    val = np.abs(pair.r1 - pair.r0) ** 2 / 4.0
    return float(val) if np.ndim(val) == 0 else val


def error_prob(params: CavityQDParams, omega) -> float:
    """Probability |r1 + r0|^2 / 4 that photon and QD come back unchanged."""
    pair = reflection_coeffs(params, omega)
    val = np.abs(pair.r1 + pair.r0) ** 2 / 4.0
    return float(val) if np.ndim(val) == 0 else val


def loss_prob(params: CavityQDParams, omega) -> float:
    """Probability 1 - eta1 - p2 that the photon is lost to side leakage."""
    val = 1.0 - eta1(params, omega) - error_prob(params, omega)
    return float(val) if np.ndim(val) == 0 else val


def spectral_density(spec: PulseSpectrum, omega) -> float:
    """Gaussian spectral density, normalized to unit integral over omega."""
    _require_finite("omega", omega)
    w = np.asarray(omega, dtype=float)
    val = np.exp(-(((w - spec.omega_c) / spec.sigma) ** 2)) / (math.sqrt(math.pi) * spec.sigma)
    return float(val) if np.ndim(val) == 0 else val


def _hermite_average(params: CavityQDParams, spec: PulseSpectrum, n: int,
                     eta0: float, nodes: int) -> float:
    # substitution x = (omega - omega_c)/sigma turns the spectral average into
    # (1/sqrt(pi)) * integral exp(-x^2) * integrand dx, exact for Gauss-Hermite
    x, w = np.polynomial.hermite.hermgauss(nodes)
    omega = spec.omega_c + spec.sigma * x
    pair = reflection_coeffs(params, omega)
    integrand = (np.abs((pair.r1 - pair.r0) / 2.0) ** 2) ** n
    return float(eta0 ** n * np.sum(w * integrand) / math.sqrt(math.pi))


def average_efficiency(params: CavityQDParams, spec: PulseSpectrum, n: int,
                       eta0: float = 1.0, nodes: int = DEFAULT_QUAD_NODES,
                       tol: float = 1e-8) -> float:
    """Pulse-averaged n-photon conclusive probability.

    integral over omega of f(omega) * eta0^n * |(r1 - r0)/2|^(2n), evaluated by
    Gauss-Hermite quadrature with a node-doubling convergence check.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= eta0 <= 1.0:
        raise ValueError("eta0 must lie in [0, 1]")
    coarse = _hermite_average(params, spec, n, eta0, nodes)
    fine = _hermite_average(params, spec, n, eta0, 2 * nodes)
    if abs(fine - coarse) > tol:
        raise QuadratureConvergenceError(
            f"Gauss-Hermite average did not converge: {nodes}->{2*nodes} nodes "
            f"moved the result by {abs(fine - coarse):.3e} (tol {tol:.1e})")
    return fine


def scattering_time(spec: PulseSpectrum) -> float:
    """Duration t0 = hbar/sigma (ns) of one scattering event for this pulse."""
    return HBAR_UEV_NS / spec.sigma


def fidelity_fn(n: int, t2_ns: float, spec: PulseSpectrum) -> float:
    """Analyzer fidelity after n scattering events with QD coherence time t2 (ns).

    The two QD spins dephase for t_n = n * t0; only the phase readout suffers,
    giving F_n = [1 + exp(-t_n/T2)]^2 / 4.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not t2_ns > 0:
        raise ValueError("t2_ns must be > 0")
    t_n = n * scattering_time(spec)
    decay = math.exp(-t_n / t2_ns) if math.isfinite(t2_ns) else 1.0
    return (1.0 + decay) ** 2 / 4.0
