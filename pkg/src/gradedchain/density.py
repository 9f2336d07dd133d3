"""Vibrational mode density of the graded chain.

Inside the band ``(Omega_0, Omega_D)``

    rho(omega) = 2 n omega / (pi sqrt((Omega_D^2 - omega^2)(omega^2 - Omega_0^2)))

with integrable inverse-square-root divergences at both edges (only the upper
one survives for ``xi == 1``).  Outside the band the density is zero.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .chain import ChainSpec, dispersion, dispersion_relation
from .errors import BandEdgeSingularity, QuadratureError
from .greens import EDGE_GUARD, Regime, classify, coefficient_a, greens_complex, greens_closed_form


@dataclass(frozen=True)
class ModeDensityCurve:
    omegas: np.ndarray
    rho: np.ndarray
    n: int
    band: tuple[float, float]
    # histogram curves also keep their bin edges and raw counts
    bin_edges: np.ndarray | None = None
    counts: np.ndarray | None = None


@dataclass(frozen=True)
class QuadConfig:
    epsabs: float = 1e-11
    epsrel: float = 1e-13
    limit: int = 200
    tolerance: float = 1e-8


def _raw_density(spec: ChainSpec, omega):
    lo2, hi2 = spec.lower_edge**2, spec.debye**2
    w2 = np.square(omega)
    return 2.0 * spec.n * omega / (np.pi * np.sqrt((hi2 - w2) * (w2 - lo2)))


def _check_edges(spec: ChainSpec, omega, edge_guard):
    a = coefficient_a(spec, omega)
    if spec.homogeneous:
        # Omega_0 = 0: omega / sqrt(omega^2) stays finite, only the Debye edge diverges
        inside = a > -1.0
        on_edge = np.abs(1.0 + a) <= edge_guard
    else:
        a = np.abs(a)
        inside = a < 1.0
        on_edge = np.abs(1.0 - a) <= edge_guard
    if np.any(on_edge):
        bad = np.asarray(omega)[on_edge] if np.ndim(omega) else omega
        raise BandEdgeSingularity(f"mode density diverges at band edge omega={bad}")
    return inside & ~on_edge


def mode_density(spec: ChainSpec, omega, edge_guard: float = EDGE_GUARD):
    """Modes per unit angular frequency; 0 outside the band, error on an edge.

    For ``xi == 1`` the lower edge is ``omega = 0`` where the density stays
    finite (``2n / (pi Omega_D)``), so only the Debye edge raises.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("omega must be >= 0")
    inside = _check_edges(spec, omega, edge_guard)
    rho = np.zeros_like(omega)
    with np.errstate(invalid="ignore", divide="ignore"):
        rho[inside] = _raw_density(spec, omega[inside])
    if spec.homogeneous:
        # omega / sqrt(omega^2) -> 1 at the (finite) lower edge
        rho[inside & (omega == 0.0)] = 2.0 * spec.n / (np.pi * spec.debye)
    return float(rho) if rho.ndim == 0 else rho


def homogeneous_density(n: int, omega0: float, omega):
    """Textbook density of the uniform chain, ``2n / (pi sqrt(omega_D^2 - omega^2))``."""
    w_d = 2.0 * omega0
    return 2.0 * n / (np.pi * np.sqrt(w_d * w_d - np.square(omega)))


def mode_density_from_greens(spec: ChainSpec, omega: float, epsilon: float | None = None,
                             edge_guard: float = EDGE_GUARD) -> float:
    """``(2 omega / pi) Im Tr G(omega + i eps)`` with ``Tr G = n G_pp``.

    ``epsilon=None`` takes the ``eps -> 0+`` limit through the closed form, which
    reproduces :func:`mode_density` exactly; a finite ``epsilon`` gives the
    Lorentzian-broadened density.
    """
    if omega < 0:
        raise ValueError("omega must be >= 0")
    if epsilon is None:
        g = greens_closed_form(spec, omega, 0, 0, edge_guard=edge_guard)
        if g.regime is not Regime.IN_BAND:
            return 0.0
        g_pp = g.value
    else:
        g_pp = complex(greens_complex(spec, omega + 1j * epsilon))
    return 2.0 * omega / np.pi * spec.n * g_pp.imag


def mode_density_from_dispersion(spec: ChainSpec, omega: float, dk: float = 1e-5) -> float:
    """Count modes through the dispersion curve: ``2 (n / 2 pi) |dk/domega|``.

    The slope is taken by a central difference of ``omega(k)`` at the wavenumber
    that solves ``omega(k) = omega`` on the branch ``0 < k < pi``.
    """
    classify(spec, omega)
    a = float(coefficient_a(spec, omega))
    if abs(a) >= 1.0:
        return 0.0
    k = math.acos(a)
    slope = (math.sqrt(dispersion_relation(spec, k + dk))
             - math.sqrt(dispersion_relation(spec, k - dk))) / (2.0 * dk)
    return 2.0 * spec.n / (2.0 * np.pi) / abs(slope)


def _omega_of_phi(spec: ChainSpec, phi):
    lo2, hi2 = spec.lower_edge**2, spec.debye**2
    return np.sqrt(0.5 * (hi2 + lo2 - (hi2 - lo2) * np.cos(phi)))


def normalization_integral(spec: ChainSpec, quad_config: QuadConfig | None = None,
                           route: str = "phi") -> float:
    """Integral of the mode density over the band; equals ``n``.

    ``route="phi"`` integrates ``rho(omega(phi)) domega/dphi`` over ``(0, pi)``
    where ``cos(phi) = a(omega)``; the substitution cancels both edge
    singularities.  ``route="alg"`` integrates in ``omega`` directly with an
    algebraic ``(x-lo)^-1/2 (hi-x)^-1/2`` quadrature weight.
    """
    cfg = quad_config or QuadConfig()
    lo, hi = spec.lower_edge, spec.debye
    width2 = hi * hi - lo * lo
    if route == "phi":
        def integrand(phi):
            w = _omega_of_phi(spec, phi)
            jac = width2 * math.sin(phi) / (4.0 * w)
            return float(_raw_density(spec, w)) * jac

        # near phi = 0 and pi the omega-form loses digits to cancellation; QUADPACK
        # warns about roundoff there, the error estimate below is what counts
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            value, err = integrate.quad(integrand, 0.0, np.pi, epsabs=cfg.epsabs,
                                        epsrel=cfg.epsrel, limit=cfg.limit)
    elif route == "alg":
        if lo > 0.0:
            def smooth(w):
                return 2.0 * spec.n * w / (np.pi * math.sqrt((hi + w) * (w + lo)))
            wvar = (-0.5, -0.5)
        else:
            # xi == 1: omega / sqrt(omega^2) cancels, only the upper edge is singular
            def smooth(w):
                return 2.0 * spec.n / (np.pi * math.sqrt(hi + w))
            wvar = (0.0, -0.5)

        value, err = integrate.quad(smooth, lo, hi, weight="alg", wvar=wvar,
                                    epsabs=cfg.epsabs, epsrel=cfg.epsrel, limit=cfg.limit)
    else:
        raise ValueError(f"unknown route {route!r}")
    if err > cfg.tolerance:
        raise QuadratureError(f"quadrature error estimate {err:.3g} exceeds {cfg.tolerance:g}")
    return value


def cumulative_modes(spec: ChainSpec, omega):
    """Number of modes below ``omega``: ``(n / pi) arccos(a(omega))`` clipped to the band."""
    a = np.clip(coefficient_a(spec, omega), -1.0, 1.0)
    return spec.n / np.pi * np.arccos(a)


def analytic_bin_integrals(spec: ChainSpec, edges) -> np.ndarray:
    return np.diff(cumulative_modes(spec, np.asarray(edges, dtype=float)))


def density_histogram_oracle(spec: ChainSpec, bins: int = 64) -> ModeDensityCurve:
    """Empirical density: histogram of the ``n`` eigenfrequencies over the band."""
    lo, hi = spec.lower_edge, spec.debye
    freqs = dispersion(spec).frequencies
    counts, edges = np.histogram(freqs, bins=bins, range=(lo, hi))
    centers = 0.5 * (edges[1:] + edges[:-1])
    return ModeDensityCurve(omegas=centers, rho=counts / np.diff(edges), n=spec.n,
                            band=(lo, hi), bin_edges=edges, counts=counts)


def sample_density(spec: ChainSpec, count: int = 200, margin: float | None = None,
                   spacing: str = "linear") -> ModeDensityCurve:
    """Sample ``rho`` on ``count`` points strictly inside the band.

    The end points sit ``margin`` (default ``1e-6 (Omega_D - Omega_0)``) away from
    the edges.  ``spacing="log"`` needs a positive lower end, so for ``xi == 1``
    the margin is what keeps it away from zero.
    """
    lo, hi = spec.lower_edge, spec.debye
    if margin is None:
        margin = 1e-6 * (hi - lo)
    if not 0 < 2 * margin < hi - lo:
        raise ValueError("margin must be positive and smaller than half the band width")
    if count < 1:
        raise ValueError("count must be >= 1")
    if spacing == "linear":
        omegas = np.linspace(lo + margin, hi - margin, count)
    elif spacing == "log":
        omegas = np.geomspace(lo + margin, hi - margin, count)
    else:
        raise ValueError(f"unknown spacing {spacing!r}")
    return ModeDensityCurve(omegas=omegas, rho=mode_density(spec, omegas), n=spec.n, band=(lo, hi))
