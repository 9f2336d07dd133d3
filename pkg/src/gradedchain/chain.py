"""Exponentially graded periodic chain: matrices, band edges and Bloch spectrum.

Particle ``p`` carries mass ``m0 * xi**(2p)`` and is tied to ``p + 1`` by a spring
``m0 * omega0**2 * xi**(2p)``.  With ``y_p = xi**p u_p`` the equations of motion
become ``y'' = -L y`` with the symmetric circulant

    L_pq = (omega0/xi)**2 * ((1 + xi**2) d_pq - xi (d_{p+1,q} + d_{p-1,q}))

where indices wrap modulo ``n``.  Its eigenvectors are plane waves and its
eigenvalues are known in closed form, which is what everything downstream uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GradingOverflow, VerificationError

MAX_DENSE_N = 4096
# exp(709) is the largest finite double
_LOG_FLOAT_MAX = 709.0


@dataclass(frozen=True)
class ChainSpec:
    """Parameters of the discrete chain.

    Parameters
    ----------
    n : int
        Number of particles, at least 2.
    xi : float
        Grading parameter; ``xi == 1`` is the homogeneous chain.
    omega0 : float
        Base angular frequency (rad/s).
    m0 : float
        Mass of particle 0 (kg).
    """

    n: int
    xi: float
    omega0: float = 1.0
    m0: float = 1.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ValueError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        for name in ("xi", "omega0", "m0"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def lower_edge(self) -> float:
        return self.omega0 / self.xi * abs(1.0 - self.xi)

    @property
    def debye(self) -> float:
        return self.omega0 / self.xi * (1.0 + self.xi)

    @property
    def homogeneous(self) -> bool:
        return self.xi == 1.0

    def with_n(self, n: int) -> "ChainSpec":
        return ChainSpec(n, self.xi, self.omega0, self.m0)


@dataclass(frozen=True)
class MatrixTriple:
    """Mass matrix ``Lambda`` (dimensionless), stiffness ``K`` and ``L`` (rad^2/s^2)."""

    lambda_mat: np.ndarray
    k_mat: np.ndarray
    l_mat: np.ndarray

    @property
    def dynamic_matrix(self) -> np.ndarray:
        """``Lambda^-1 K``, the (non-symmetric) operator acting on true displacements."""
        return self.k_mat / np.diag(self.lambda_mat)[:, None]


@dataclass(frozen=True)
class SpectrumResult:
    """Bloch spectrum in k-order (``m = 0..n-1``), not sorted by frequency."""

    wavenumbers: np.ndarray
    eigenvalues: np.ndarray
    frequencies: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.wavenumbers)

    @cached_property
    def eigenvectors(self) -> np.ndarray:
        """Columns ``v^(m)_p = exp(i k_m p) / sqrt(n)``."""
        p = np.arange(self.n)
        return np.exp(1j * np.outer(p, self.wavenumbers)) / math.sqrt(self.n)


def band_edges(spec: ChainSpec) -> tuple[float, float]:
    """Return ``(lowest, Debye)`` eigenfrequency of the infinite chain."""
    return spec.lower_edge, spec.debye


def grading_factors(xi: float, exponents) -> np.ndarray:
    """``xi**exponents`` with an explicit overflow check."""
    exponents = np.asarray(exponents, dtype=float)
    if exponents.size:
        worst = float(np.max(np.abs(exponents))) * abs(math.log(xi))
        if worst > _LOG_FLOAT_MAX:
            raise GradingOverflow(
                f"xi**{np.max(np.abs(exponents)):g} overflows for xi={xi} "
                f"(|exponent * ln xi| = {worst:.1f} > {_LOG_FLOAT_MAX})"
            )
    return np.power(xi, exponents)


def l_matrix(spec: ChainSpec) -> np.ndarray:
    """Symmetric periodic matrix ``L``; defined for any ``n`` (no grading factors)."""
    n = spec.n
    scale = spec.omega0**2 / spec.xi**2
    mat = np.zeros((n, n))
    idx = np.arange(n)
    mat[idx, idx] = scale * (1.0 + spec.xi**2)
    # accumulate, so that for n == 2 both neighbour terms land on the same entry
    np.add.at(mat, (idx, (idx + 1) % n), -scale * spec.xi)
    np.add.at(mat, (idx, (idx - 1) % n), -scale * spec.xi)
    return mat


def build_matrices(spec: ChainSpec) -> MatrixTriple:
    """Assemble ``Lambda``, ``K`` and ``L`` with periodic index wrapping.

    ``K = Lambda^(1/2) L Lambda^(1/2)``, so the wrap entries of ``K`` carry the
    same ``xi**(p+q)`` scaling as the interior ones.  Raises
    :class:`GradingOverflow` when ``xi**(2(n-1))`` is not representable.
    """
    l_mat = l_matrix(spec)
    root = grading_factors(spec.xi, np.arange(spec.n))
    lam = np.diag(root * root)
    k_mat = root[:, None] * l_mat * root[None, :]
    return MatrixTriple(lambda_mat=lam, k_mat=k_mat, l_mat=l_mat)


def wavenumbers(n: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n) / n


def dispersion_relation(spec: ChainSpec, k) -> np.ndarray:
    """``omega(k)**2`` for arbitrary (array) wavenumber ``k``."""
    k = np.asarray(k, dtype=float)
    return spec.omega0**2 / spec.xi**2 * ((spec.xi - np.cos(k)) ** 2 + np.sin(k) ** 2)


def dispersion(spec: ChainSpec) -> SpectrumResult:
    k = wavenumbers(spec.n)
    lam = dispersion_relation(spec, k)
    return SpectrumResult(wavenumbers=k, eigenvalues=lam, frequencies=np.sqrt(lam))


@dataclass(frozen=True)
class SpectrumReport:
    n: int
    xi: float
    max_abs_deviation: float
    max_rel_deviation: float
    similarity_rel_deviation: float | None
    tol: float

    @property
    def passed(self) -> bool:
        ok = self.max_rel_deviation <= self.tol
        if self.similarity_rel_deviation is not None:
            ok = ok and self.similarity_rel_deviation <= self.tol
        return ok


def _similarity_feasible(spec: ChainSpec) -> bool:
    # eig() of the non-normal Lambda^-1 K degrades fast once xi**(n-1) > e**25
    return (spec.n - 1) * abs(math.log(spec.xi)) <= 25.0


def verify_spectrum(spec: ChainSpec, tol: float = 1e-9, check: bool = True) -> SpectrumReport:
    """Compare the closed-form eigenvalues with a dense symmetric eigensolve of ``L``.

    Deviations are reported relative to the spectral scale ``Omega_D**2``.  The
    eigenvalues of ``Lambda^-1 K`` are compared as well when the diagonal
    similarity is mild enough for a non-symmetric eigensolver to resolve it;
    otherwise ``similarity_rel_deviation`` is ``None``.
    """
    if spec.n > MAX_DENSE_N:
        raise ValueError(f"n={spec.n} exceeds dense limit {MAX_DENSE_N}")
    analytic = np.sort(dispersion(spec).eigenvalues)
    dense = np.linalg.eigvalsh(l_matrix(spec))
    scale = spec.debye**2
    abs_dev = float(np.max(np.abs(analytic - dense)))
    sim_dev = None
    if _similarity_feasible(spec):
        dyn = build_matrices(spec).dynamic_matrix
        sim = np.sort(np.linalg.eigvals(dyn).real)
        sim_dev = float(np.max(np.abs(sim - dense)) / scale)
    report = SpectrumReport(spec.n, spec.xi, abs_dev, abs_dev / scale, sim_dev, tol)
    if check and not report.passed:
        raise VerificationError(f"spectrum check failed: {report}", report)
    return report
