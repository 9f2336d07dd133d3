"""Continuum limit of the graded chain.

With lattice spacing ``h``, ``L = n h``, ``m0 = rho0 h``, ``omega0 = Omega / h`` and
``xi = exp(beta h)``, the field ``y = exp(beta x) u`` obeys the Klein-Gordon
equation ``y_tt / Omega^2 - y_xx + beta^2 y = 0``.  There is a lower band edge
``beta Omega`` and no upper one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainSpec, dispersion_relation, l_matrix
from .errors import BandEdgeSingularity, UnsupportedMode
from .greens import EDGE_GUARD, closed_form_values

INFINITE = "infinite"
PERIODIC = "periodic"


@dataclass(frozen=True)
class ContinuumSpec:
    length: float
    beta: float
    big_omega: float = 1.0
    rho0: float = 1.0

    def __post_init__(self):
        for name in ("length", "big_omega", "rho0"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)
        beta = float(self.beta)
        if not math.isfinite(beta) or beta < 0:
            raise ValueError(f"beta must be finite and >= 0, got {beta!r}")
        object.__setattr__(self, "beta", beta)

    @property
    def lower_edge(self) -> float:
        return self.beta * self.big_omega

    def chain(self, n: int) -> ChainSpec:
        """Discrete chain with spacing ``h = L / n`` that has this continuum limit."""
        h = self.length / n
        return ChainSpec(n=n, xi=math.exp(self.beta * h), omega0=self.big_omega / h,
                         m0=self.rho0 * h)


@dataclass(frozen=True)
class DiscretizationLadder:
    cspec: ContinuumSpec
    sizes: tuple[int, ...] = (64, 128, 256, 512)

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sizes)
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("ladder sizes must increase")
        object.__setattr__(self, "sizes", sizes)

    @property
    def h_values(self) -> np.ndarray:
        return self.cspec.length / np.asarray(self.sizes, dtype=float)

    @property
    def chains(self) -> list[ChainSpec]:
        return [self.cspec.chain(n) for n in self.sizes]


def continuum_dispersion(cspec: ContinuumSpec, m):
    """``omega(K_m) = Omega sqrt(K_m^2 + beta^2)`` with ``K_m = 2 pi m / L``."""
    k = 2.0 * np.pi * np.asarray(m, dtype=float) / cspec.length
    return cspec.big_omega * np.sqrt(k * k + cspec.beta**2)


def discrete_dispersion_on_rung(cspec: ContinuumSpec, n: int, m) -> np.ndarray:
    """Chain eigenfrequency at ``k = h K_m`` for the rung with ``n`` sites."""
    chain = cspec.chain(n)
    k = 2.0 * np.pi * np.asarray(m, dtype=float) / n
    return np.sqrt(dispersion_relation(chain, k))


def _kappa2(cspec: ContinuumSpec, omega: float) -> float:
    return (omega / cspec.big_omega) ** 2 - cspec.beta**2


def continuum_greens(cspec: ContinuumSpec, omega: float, x, mode: str = INFINITE,
                     images: int = 64, edge_guard: float = EDGE_GUARD):
    """Fundamental solution of ``-Omega^2 (g'' + (omega^2/Omega^2 - beta^2) g) = delta``.

    Below ``beta Omega`` it decays, ``exp(-s|x|) / (2 Omega^2 s)``; above it is the
    outgoing wave ``i exp(i s|x|) / (2 Omega^2 s)``.  ``mode="periodic"`` sums
    ``2 images + 1`` translates by multiples of ``L`` and is only available below
    the band edge, where that sum converges.
    """
    if omega < 0:
        raise ValueError("omega must be >= 0")
    x = np.asarray(x, dtype=float)
    kappa2 = _kappa2(cspec, omega)
    scale = max(cspec.beta**2, (omega / cspec.big_omega) ** 2, 1e-300)
    if abs(kappa2) <= edge_guard * scale:
        raise BandEdgeSingularity(f"omega={omega} is on the continuum band edge beta*Omega")
    w2 = cspec.big_omega**2
    if mode == PERIODIC:
        if kappa2 > 0:
            raise UnsupportedMode(
                "periodic mode is only supported below beta*Omega: the image sum of the "
                "in-band Green's function does not converge"
            )
        shifts = cspec.length * np.arange(-images, images + 1)
        x = np.abs(x[..., None] + shifts)
    elif mode != INFINITE:
        raise ValueError(f"unknown mode {mode!r}")
    else:
        x = np.abs(x)
    if kappa2 < 0:
        s = math.sqrt(-kappa2)
        g = (np.exp(-s * x) / (2.0 * w2 * s)).astype(complex)
    else:
        s = math.sqrt(kappa2)
        g = 1j * np.exp(1j * s * x) / (2.0 * w2 * s)
    if mode == PERIODIC:
        g = g.sum(axis=-1)
    return g


def true_displacement_greens(cspec: ContinuumSpec, omega: float, x, **kwargs):
    """Response of the physical displacement, ``exp(-beta x) g(|x|)`` (not even in ``x``)."""
    x = np.asarray(x, dtype=float)
    return np.exp(-cspec.beta * x) * continuum_greens(cspec, omega, x, **kwargs)


def graded_moduli(cspec: ContinuumSpec, x):
    """``(rho_M(x), mu(x)) = (rho0, Omega^2 rho0) * exp(2 beta x)``."""
    x = np.asarray(x, dtype=float)
    rho_m = cspec.rho0 * np.exp(2.0 * cspec.beta * x)
    return rho_m, cspec.big_omega**2 * rho_m


def continuum_mode_density(cspec: ContinuumSpec, omega: float, route: str = "explicit",
                           edge_guard: float = EDGE_GUARD) -> float:
    """Modes per unit frequency on a ring of length ``L``; zero below ``beta Omega``.

    ``route="greens"`` evaluates ``(2 omega L / pi) Im g(0, omega)`` instead of the
    explicit formula.
    """
    kappa2 = _kappa2(cspec, omega)
    scale = max(cspec.beta**2, (omega / cspec.big_omega) ** 2, 1e-300)
    if abs(kappa2) <= edge_guard * scale:
        raise BandEdgeSingularity(f"omega={omega} is on the continuum band edge")
    if kappa2 < 0:
        return 0.0
    if route == "explicit":
        return cspec.length * omega / (math.pi * cspec.big_omega**2 * math.sqrt(kappa2))
    if route == "greens":
        g0 = complex(continuum_greens(cspec, omega, 0.0))
        return 2.0 * omega * cspec.length / math.pi * g0.imag
    raise ValueError(f"unknown route {route!r}")


@dataclass(frozen=True)
class HelmholtzReport:
    """Outcome of :func:`helmholtz_residual`; all errors are dimensionless."""

    max_residual: float
    jump: complex
    expected_jump: float
    spacing: float
    tol: float

    @property
    def jump_error(self) -> float:
        return abs(self.jump - self.expected_jump)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol and self.jump_error <= self.tol


def _one_sided_derivative(f0, f1, f2, h):
    return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h)


def helmholtz_residual(cspec: ContinuumSpec, omega: float, spacing: float | None = None,
                       extent: float | None = None, exclude: int = 4,
                       tol_factor: float = 1.0, true_field: bool = False) -> HelmholtzReport:
    """Finite-difference check that the continuum Green's function solves its equation.

    Second differences on a grid of ``spacing`` (default ``L/2048``) over
    ``[-extent, extent]`` (default ``L/2``), skipping ``exclude`` cells around the
    source.  Away from the source the residual is reported relative to
    ``Omega^2 |g(x)| s^2``, ``s`` being the inverse decay/wave length of ``g``;
    at the source the jump of ``Omega^2 g'`` (of ``Omega^2 exp(2 beta x) g'`` with
    ``true_field``) must be ``-1``.  Both must be within ``tol_factor (h s)^2``.
    """
    h = spacing if spacing is not None else cspec.length / 2048.0
    extent = extent if extent is not None else cspec.length / 2.0
    w2 = cspec.big_omega**2
    kappa2 = _kappa2(cspec, omega)
    s = math.sqrt(abs(kappa2))
    cells = int(round(extent / h))
    x = h * np.arange(-cells, cells + 1)
    xc = x[1:-1]
    if true_field:
        s = s + cspec.beta
        g = true_displacement_greens(cspec, omega, x)
        wl = np.exp(2.0 * cspec.beta * (xc - h / 2))
        wr = np.exp(2.0 * cspec.beta * (xc + h / 2))
        weight = np.exp(2.0 * cspec.beta * xc)
        flux = (wr * (g[2:] - g[1:-1]) - wl * (g[1:-1] - g[:-2])) / h**2
        res = -w2 * (flux + (omega**2 / w2) * weight * g[1:-1])
    else:
        g = continuum_greens(cspec, omega, x)
        weight = np.ones_like(xc)
        res = -w2 * ((g[2:] - 2.0 * g[1:-1] + g[:-2]) / h**2 + kappa2 * g[1:-1])
    interior = np.abs(xc) > exclude * h
    rel = np.abs(res[interior]) / (w2 * weight[interior] * np.abs(g[1:-1][interior]) * s * s)
    c = cells
    right = _one_sided_derivative(g[c], g[c + 1], g[c + 2], h)
    left = -_one_sided_derivative(g[c], g[c - 1], g[c - 2], h)
    return HelmholtzReport(max_residual=float(rel.max()), jump=complex(right - left) * w2,
                           expected_jump=-1.0, spacing=h, tol=tol_factor * (h * s) ** 2)


def scaled_discrete_greens(cspec: ContinuumSpec, n: int, omega: float, x: float) -> complex:
    """``(1/h) G_pq`` of the rung with ``n`` sites at ``|p - q| = x / h``."""
    chain = cspec.chain(n)
    h = cspec.length / n
    d = x / h
    if abs(d - round(d)) > 1e-9:
        raise ValueError(f"x={x} is not a lattice point for n={n}")
    vals, _ = closed_form_values(chain, omega, int(round(d)))
    return complex(vals) / h


def observed_orders(h_values, errors) -> np.ndarray:
    """``log(e_i / e_{i+1}) / log(h_i / h_{i+1})`` for consecutive rungs."""
    h = np.asarray(h_values, dtype=float)
    e = np.asarray(errors, dtype=float)
    return np.log(e[:-1] / e[1:]) / np.log(h[:-1] / h[1:])


@dataclass(frozen=True)
class ConvergenceTable:
    quantity: str
    h_values: np.ndarray
    errors: np.ndarray

    @property
    def orders(self) -> np.ndarray:
        return observed_orders(self.h_values, self.errors)


def greens_convergence(ladder: DiscretizationLadder, omega: float, x: float) -> ConvergenceTable:
    exact = complex(continuum_greens(ladder.cspec, omega, x))
    errors = [abs(scaled_discrete_greens(ladder.cspec, n, omega, x) - exact) for n in ladder.sizes]
    return ConvergenceTable("greens", ladder.h_values, np.array(errors))


def dispersion_convergence(ladder: DiscretizationLadder, m: int = 1) -> ConvergenceTable:
    exact = float(continuum_dispersion(ladder.cspec, m))
    errors = [abs(float(discrete_dispersion_on_rung(ladder.cspec, n, m)) - exact)
              for n in ladder.sizes]
    return ConvergenceTable("dispersion", ladder.h_values, np.array(errors))


def density_convergence(ladder: DiscretizationLadder, omega: float) -> ConvergenceTable:
    """Chain mode density on each rung against the continuum density at ``omega``."""
    from .density import mode_density

    exact = continuum_mode_density(ladder.cspec, omega)
    errors = [abs(float(mode_density(chain, omega)) - exact) for chain in ladder.chains]
    return ConvergenceTable("density", ladder.h_values, np.array(errors))


def klein_gordon_convergence(ladder: DiscretizationLadder, wave: int = 1) -> ConvergenceTable:
    """Matrix action ``L y`` on samples of a smooth periodic ``y`` versus ``-Omega^2 (y'' - beta^2 y)``."""
    cspec = ladder.cspec
    kk = 2.0 * np.pi * wave / cspec.length
    errors = []
    for n in ladder.sizes:
        chain = cspec.chain(n)
        x = cspec.length * np.arange(n) / n
        y = np.sin(kk * x) + 0.5 * np.cos(2 * kk * x)
        y_xx = -kk**2 * np.sin(kk * x) - 2.0 * kk**2 * np.cos(2 * kk * x)
        exact = -cspec.big_omega**2 * (y_xx - cspec.beta**2 * y)
        errors.append(float(np.max(np.abs(l_matrix(chain) @ y - exact))))
    return ConvergenceTable("klein_gordon", ladder.h_values, np.array(errors))
