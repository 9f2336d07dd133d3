"""Closed-form frequency-domain Green's function of the infinite graded chain.

All real-frequency evaluations are the ``eps -> 0+`` limit, with the branch
fixed so that the pole ``exp(-phi)`` lies inside the unit circle.  The value
depends on the particle indices only through ``d = |p - q|``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainSpec, grading_factors
from .errors import BandEdgeSingularity

EDGE_GUARD = 1e-12


class Regime(str, enum.Enum):
    IN_BAND = "i"
    BELOW_BAND = "ii"
    ABOVE_BAND = "iii"


class Kind(str, enum.Enum):
    SYMMETRIC = "symmetric"
    TRUE = "true"


@dataclass(frozen=True)
class GreensEvaluation:
    value: complex
    regime: Regime
    p: int
    q: int
    kind: Kind = Kind.SYMMETRIC


def coefficient_a(spec: ChainSpec, omega):
    """``a = (Omega_D^2 + Omega_0^2 - 2 omega^2) / (Omega_D^2 - Omega_0^2)``.

    Written as ``(1 + xi^2)/(2 xi) - xi omega^2 / (2 omega0^2)``, which is the same
    number without the cancellation in ``Omega_D^2 - Omega_0^2``.
    """
    xi, w0 = spec.xi, spec.omega0
    return (1.0 + xi * xi) / (2.0 * xi) - xi * np.square(omega) / (2.0 * w0 * w0)


def classify(spec: ChainSpec, omega: float, edge_guard: float = EDGE_GUARD) -> Regime:
    """Regime of a real frequency; raises :class:`BandEdgeSingularity` at an edge."""
    if omega < 0:
        raise ValueError(f"omega must be >= 0, got {omega}")
    a = float(coefficient_a(spec, omega))
    gap = 1.0 - abs(a)
    if abs(gap) <= edge_guard:
        edge = "lower" if a > 0 else "upper (Debye)"
        raise BandEdgeSingularity(
            f"omega={omega!r} is on the {edge} band edge of xi={spec.xi} (|a|-1={-gap:.3g})"
        )
    if gap > 0:
        return Regime.IN_BAND
    return Regime.BELOW_BAND if a > 0 else Regime.ABOVE_BAND


def _prefactor(spec: ChainSpec) -> float:
    return spec.xi / (2.0 * spec.omega0**2)


def _edge_distances(spec: ChainSpec, omega: float) -> tuple[float, float]:
    """``(1 - a, 1 + a)`` in factored form, free of cancellation near the edges."""
    scale = spec.xi / (2.0 * spec.omega0**2)
    lo, hi = spec.lower_edge, spec.debye
    return scale * (omega - lo) * (omega + lo), scale * (hi - omega) * (hi + omega)


def _trig_values(spec, omega, regime, d):
    pre = _prefactor(spec)
    one_minus, one_plus = _edge_distances(spec, omega)
    a = float(coefficient_a(spec, omega))
    if regime is Regime.IN_BAND:
        sin_phi = math.sqrt(one_minus * one_plus)
        phi = math.atan2(sin_phi, a)
        return 1j * pre * np.exp(1j * phi * d) / sin_phi
    sinh_chi = math.sqrt(-one_minus * one_plus)
    # c - 1 with c = |a|
    c_minus_1 = -one_minus if regime is Regime.BELOW_BAND else -one_plus
    chi = math.log1p(c_minus_1 + sinh_chi)
    vals = pre * np.exp(-chi * d) / sinh_chi
    if regime is Regime.ABOVE_BAND:
        vals = np.where(d % 2 == 0, -vals, vals)
    return vals.astype(complex)


def _radical_values(spec, omega, regime, d):
    lo2, hi2 = spec.lower_edge**2, spec.debye**2
    w2 = omega * omega
    width = hi2 - lo2
    s = hi2 + lo2 - 2.0 * w2
    if regime is Regime.IN_BAND:
        r = math.sqrt((hi2 - w2) * (w2 - lo2))
        return 1j / r * ((s + 2j * r) / width) ** d
    r = math.sqrt((hi2 - w2) * (lo2 - w2))
    if regime is Regime.BELOW_BAND:
        return (1.0 / r * ((s - 2.0 * r) / width) ** d).astype(complex)
    return (-1.0 / r * ((s + 2.0 * r) / width) ** d).astype(complex)


def closed_form_values(spec: ChainSpec, omega: float, d, form: str = "trig",
                       edge_guard: float = EDGE_GUARD):
    """Return ``(values, regime)`` for integer distances ``d >= 0`` (array-like).

    ``form="trig"`` uses the angle (phi or chi) parametrisation, ``form="radical"``
    the explicit band-edge radicals; both describe the same function.
    """
    d = np.asarray(d)
    if np.any(d < 0):
        raise ValueError("distances must be non-negative")
    regime = classify(spec, omega, edge_guard)
    if form == "trig":
        return _trig_values(spec, float(omega), regime, d), regime
    if form == "radical":
        return _radical_values(spec, float(omega), regime, d), regime
    raise ValueError(f"unknown form {form!r}")


def greens_closed_form(spec: ChainSpec, omega: float, p: int, q: int, form: str = "trig",
                       edge_guard: float = EDGE_GUARD) -> GreensEvaluation:
    """Symmetric Green's function ``G_pq(omega)`` of the ``y`` field (units s^2)."""
    vals, regime = closed_form_values(spec, omega, abs(p - q), form, edge_guard)
    return GreensEvaluation(complex(vals), regime, p, q, Kind.SYMMETRIC)


def greens_true(spec: ChainSpec, omega: float, p: int, q: int, form: str = "trig",
                edge_guard: float = EDGE_GUARD) -> GreensEvaluation:
    """Green's function of the true displacements, ``xi**-(p-q)`` times the symmetric one."""
    factor = float(grading_factors(spec.xi, -(p - q)))
    sym = greens_closed_form(spec, omega, p, q, form, edge_guard)
    return GreensEvaluation(sym.value * factor, sym.regime, p, q, Kind.TRUE)


def index_distance(n: int, periodic: bool = True) -> np.ndarray:
    """Matrix of ``|p - q|``, or the minimum-image distance on the ring of ``n`` sites."""
    idx = np.arange(n)
    d = np.abs(idx[:, None] - idx[None, :])
    if periodic:
        d = np.minimum(d, n - d)
    return d


def greens_matrix(spec: ChainSpec, omega: float, kind: Kind | str = Kind.SYMMETRIC,
                  periodic: bool = True, form: str = "trig",
                  edge_guard: float = EDGE_GUARD) -> np.ndarray:
    """``n x n`` matrix of closed-form entries.

    With ``periodic=True`` the entry for ``(p, q)`` uses the minimum-image
    distance on the ring, which is what the periodic chain's resolvent tends to
    for every entry.  ``periodic=False`` uses the literal ``|p - q|``.
    """
    kind = Kind(kind)
    d = index_distance(spec.n, periodic)
    row, _ = closed_form_values(spec, omega, np.arange(d.max() + 1), form, edge_guard)
    mat = row[d]
    if kind is Kind.TRUE:
        idx = np.arange(spec.n)
        mat = mat * grading_factors(spec.xi, -(idx[:, None] - idx[None, :]))
    return mat


def greens_complex(spec: ChainSpec, z, d=0):
    """Master residue form at complex frequency ``z`` (array), distance ``d``.

    Evaluates ``xi/(2 omega0^2) * exp(-d phi)/sinh(phi)`` with ``cosh(phi) = a(z)``
    and ``|exp(-phi)| <= 1``.  For ``Im z > 0`` this is the resolvent of the
    infinite chain; it is used for finite damping and the time-domain transform.
    """
    z = np.asarray(z, dtype=complex)
    a = coefficient_a(spec, z)
    root = np.sqrt(a * a - 1.0)
    w = a - root
    w = np.where(np.abs(w) > 1.0, a + root, w)
    return (spec.xi / spec.omega0**2) * w ** (np.asarray(d) + 1) / (1.0 - w * w)


def greens_ring(spec: ChainSpec, omega: float, d):
    """Exact resolvent of the finite ring at real ``omega``, for distances ``0 <= d <= n``.

    Summing the infinite-chain function over all periodic images ``d + j n``
    is a geometric series in ``w = exp(-chi)`` (or ``exp(-i phi)`` in the band):

        G_n(d) = xi/omega0^2 * (w^(d+1) + w^(n-d+1)) / ((1 - w^2)(1 - w^n))

    The expression is symmetric under ``w -> 1/w``, so in the band it is real
    and has poles exactly at the ring eigenfrequencies.
    """
    d = np.asarray(d)
    if np.any(d < 0) or np.any(d > spec.n):
        raise ValueError(f"distances must lie in [0, {spec.n}]")
    classify(spec, omega)
    a = complex(coefficient_a(spec, omega))
    w = a - np.sqrt(a * a - 1.0)
    if abs(w) > 1.0:
        w = 1.0 / w
    n = spec.n
    denom = (1.0 - w * w) * (1.0 - w**n)
    if abs(denom) < 1e-14:
        raise BandEdgeSingularity(f"omega={omega} is a ring eigenfrequency")
    vals = (spec.xi / spec.omega0**2) * (w ** (d + 1) + w ** (n - d + 1)) / denom
    return np.real(vals)
