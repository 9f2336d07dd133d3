"""Time-domain dynamics: modal initial-value solution, energy, causal Green's function.

The general motion is a superposition of Bloch waves of ``y = xi**p u``:

    u_p(t) = xi**-p / sqrt(n) * sum_m (A_m e^{i(k_m p - w_m t)} + B_m e^{i(k_m p + w_m t)})

For the homogeneous chain the ``k = 0`` mode has ``w = 0`` and moves as a
uniform translation, ``y_0(t) = y_0(0) + t y_0'(0)``, which is carried in
``ModalCoefficients.drift``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainSpec, dispersion, grading_factors
from .errors import AliasingError, ZeroModeError
from .greens import greens_complex
from .oracle import hamiltonian


@dataclass(frozen=True)
class InitialConditions:
    u0: np.ndarray
    v0: np.ndarray

    def __post_init__(self):
        u0 = np.asarray(self.u0, dtype=float)
        v0 = np.asarray(self.v0, dtype=float)
        if u0.ndim != 1 or u0.shape != v0.shape:
            raise ValueError("u0 and v0 must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(u0)) and np.all(np.isfinite(v0))):
            raise ValueError("initial data must be finite")
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "v0", v0)


@dataclass(frozen=True)
class ModalCoefficients:
    a: np.ndarray
    b: np.ndarray
    drift: np.ndarray


@dataclass(frozen=True)
class TimeSignal:
    times: np.ndarray
    values: np.ndarray


def _to_modes(vec: np.ndarray) -> np.ndarray:
    # projection on v^(m)* : (1/sqrt n) sum_p e^{-i k_m p} vec_p
    return np.fft.fft(vec) / math.sqrt(len(vec))


def fit_modal_coefficients(spec: ChainSpec, ic: InitialConditions,
                           strict: bool = False) -> ModalCoefficients:
    """Solve ``A + B = y_m(0)``, ``-i w_m (A - B) = y_m'(0)`` mode by mode.

    Zero-frequency modes go to ``drift`` unless ``strict`` is set, in which case
    :class:`ZeroModeError` is raised.
    """
    if ic.u0.shape != (spec.n,):
        raise ValueError(f"initial data must have length n={spec.n}")
    scale = grading_factors(spec.xi, np.arange(spec.n))
    y_hat = _to_modes(scale * ic.u0)
    ydot_hat = _to_modes(scale * ic.v0)
    w = dispersion(spec).frequencies
    zero = w == 0.0
    if strict and np.any(zero):
        raise ZeroModeError(f"modes {np.flatnonzero(zero).tolist()} have zero frequency")
    safe_w = np.where(zero, 1.0, w)
    a = np.where(zero, y_hat, 0.5 * (y_hat + 1j * ydot_hat / safe_w))
    b = np.where(zero, 0.0, 0.5 * (y_hat - 1j * ydot_hat / safe_w))
    drift = np.where(zero, ydot_hat, 0.0)
    return ModalCoefficients(a=a, b=b, drift=drift)


def modal_amplitudes(spec: ChainSpec, coeffs: ModalCoefficients, t) -> np.ndarray:
    """``y_m(t)``, shape ``(len(t), n)``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))[:, None]
    w = dispersion(spec).frequencies[None, :]
    return coeffs.a * np.exp(-1j * w * t) + coeffs.b * np.exp(1j * w * t) + coeffs.drift * t


def evolve(spec: ChainSpec, coeffs: ModalCoefficients, t, p=None, real: bool = True):
    """Displacements ``u_p(t)``.

    ``t`` may be a scalar or an array; the result has shape ``(len(t), len(p))``
    (or ``(len(p),)`` for scalar ``t``).  ``p`` defaults to ``0..n-1`` but any
    integer indices are accepted, which continues the solution beyond the ring.
    With ``real=False`` the raw complex sum is returned.
    """
    scalar_t = np.ndim(t) == 0
    y_hat = modal_amplitudes(spec, coeffs, t)
    if p is None:
        p = np.arange(spec.n)
        y = np.fft.ifft(y_hat, axis=1) * math.sqrt(spec.n)
    else:
        p = np.asarray(p)
        k = dispersion(spec).wavenumbers
        y = y_hat @ np.exp(1j * np.outer(k, p)) / math.sqrt(spec.n)
    u = y * grading_factors(spec.xi, -p)[None, :]
    if real:
        u = u.real
    return u[0] if scalar_t else u


def evolve_velocity(spec: ChainSpec, coeffs: ModalCoefficients, t, real: bool = True):
    """Velocities ``du_p/dt`` on the ring, same shape rules as :func:`evolve`."""
    scalar_t = np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=float))[:, None]
    w = dispersion(spec).frequencies[None, :]
    ydot_hat = (-1j * w * coeffs.a * np.exp(-1j * w * tt)
                + 1j * w * coeffs.b * np.exp(1j * w * tt) + coeffs.drift)
    y_dot = np.fft.ifft(ydot_hat, axis=1) * math.sqrt(spec.n)
    v = y_dot * grading_factors(spec.xi, -np.arange(spec.n))[None, :]
    if real:
        v = v.real
    return v[0] if scalar_t else v


def _apply_l(spec: ChainSpec, y: np.ndarray) -> np.ndarray:
    s = spec.omega0**2 / spec.xi**2
    return s * ((1.0 + spec.xi**2) * y - spec.xi * (np.roll(y, -1) + np.roll(y, 1)))


def quadratic_form_energy(spec: ChainSpec, u, u_dot) -> float:
    """Energy as ``(m0/2)(|y'|^2 + y.L y)`` in the symmetric variables."""
    scale = grading_factors(spec.xi, np.arange(spec.n))
    y = scale * np.asarray(u, dtype=float)
    y_dot = scale * np.asarray(u_dot, dtype=float)
    return 0.5 * spec.m0 * float(y_dot @ y_dot + y @ _apply_l(spec, y))


def total_energy(spec: ChainSpec, u, u_dot) -> float:
    """Energy (J) summed bond by bond over the ring."""
    return hamiltonian(spec, u, u_dot)


@dataclass(frozen=True)
class FFTConfig:
    """Frequency grid for the inverse transform.

    ``epsilon`` defaults to ``Omega_D / 100`` and ``window`` to ``50 / epsilon``;
    the grid reaches at least ``omega_max_factor * Omega_D``.
    """

    epsilon: float | None = None
    window: float | None = None
    omega_max_factor: float = 8.0
    min_decay: float = 20.0

    def resolve(self, spec: ChainSpec) -> tuple[float, float, float]:
        eps = self.epsilon if self.epsilon is not None else spec.debye / 100.0
        if eps <= 0:
            raise ValueError("epsilon must be > 0")
        window = self.window if self.window is not None else 50.0 / eps
        if self.omega_max_factor < 8.0:
            raise ValueError("omega_max_factor must be >= 8")
        if eps * window < self.min_decay:
            raise AliasingError(
                f"damped response decays only by exp(-{eps * window / 2:.3g}) over half the "
                f"window; increase window or epsilon"
            )
        return eps, window, self.omega_max_factor * spec.debye


def greens_time_domain(spec: ChainSpec, p: int, q: int,
                       fft_config: FFTConfig | None = None) -> TimeSignal:
    """Damped time-domain Green's function ``G_pq(t)`` of the infinite chain.

    Synthesises ``(1/2pi) int G(omega + i eps) e^{-i omega t} d omega`` on a
    uniform grid.  The free-particle part ``-d_pq / (omega + i eps)^2`` is
    transformed exactly (to ``Theta(t) t e^{-eps t}``) so that only a ``1/omega^4``
    tail is left to the truncated grid.  Returned times run from ``-window/2`` to
    ``window/2``; the values are real and carry the ``e^{-eps t}`` damping.
    """
    eps, window, w_max = (fft_config or FFTConfig()).resolve(spec)
    d_omega = 2.0 * np.pi / window
    m = 1 << int(math.ceil(math.log2(2.0 * w_max / d_omega)))
    half = m // 2
    w_pos = d_omega * np.arange(half + 1)
    z = w_pos + 1j * eps
    d = abs(p - q)
    spec_pos = greens_complex(spec, z, d)
    if d == 0:
        spec_pos = spec_pos + 1.0 / (z * z)
    spec_pos[-1] = spec_pos[-1].real
    samples = np.empty(m, dtype=complex)
    samples[: half + 1] = spec_pos
    samples[half + 1:] = np.conj(spec_pos[1:half][::-1])
    values = (d_omega / (2.0 * np.pi)) * np.fft.fft(samples)
    dt = window / m
    times = dt * np.arange(m)
    times[half:] -= window
    order = np.argsort(times)
    times, values = times[order], values[order].real
    if d == 0:
        values = values + np.where(times > 0, times * np.exp(-eps * times), 0.0)
    return TimeSignal(times=times, values=values)


def causality_ratio(signal: TimeSignal) -> float:
    """``max_{t<0} |G| / max_t |G|``."""
    neg = np.abs(signal.values[signal.times < 0])
    return float(neg.max() / np.abs(signal.values).max()) if neg.size else 0.0
