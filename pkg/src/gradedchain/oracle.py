"""Brute-force references for the closed forms.

Nothing here uses the closed-form Green's function: the finite-``n`` resolvent
is obtained either as an explicit sum over Bloch modes or by inverting dense
matrices, and the equations of motion are re-derived from the energy function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import MAX_DENSE_N, ChainSpec, build_matrices, dispersion, l_matrix
from .errors import NearSingularError, VerificationError
from .greens import coefficient_a

COND_LIMIT = 1e14


@dataclass(frozen=True)
class OracleConfig:
    epsilon: float | None = None
    max_n: int = MAX_DENSE_N

    def __post_init__(self):
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")

    def eps_for(self, spec: ChainSpec) -> float:
        return self.epsilon if self.epsilon is not None else 1e-6 * spec.debye


def _mode_weights(spec: ChainSpec, omega, epsilon):
    lam = dispersion(spec).eigenvalues
    z = omega + 1j * epsilon
    return 1.0 / (lam - z * z)


def greens_spectral_sum(spec: ChainSpec, omega: float, epsilon: float, p: int, q: int) -> complex:
    """``(1/n) sum_m exp(i k_m (p-q)) / (omega_m^2 - (omega + i eps)^2)``, summed directly."""
    spectrum = dispersion(spec)
    z = omega + 1j * epsilon
    terms = np.exp(1j * spectrum.wavenumbers * (p - q)) / (spectrum.eigenvalues - z * z)
    return complex(np.mean(terms))


def spectral_sum_row(spec: ChainSpec, omega: float, epsilon: float) -> np.ndarray:
    """Row ``G_0q`` for ``q = 0..n-1`` of the finite-``n`` resolvent.

    Same sum as :func:`greens_spectral_sum`, evaluated for all distances at once as
    an inverse DFT of the mode weights.  Entry ``q`` holds the value for
    ``p - q = -q``; by symmetry of the chain this equals the value for ``+q``.
    """
    return np.fft.ifft(_mode_weights(spec, omega, epsilon))


def _checked_inverse(mat: np.ndarray) -> np.ndarray:
    try:
        inv = np.linalg.inv(mat)
    except np.linalg.LinAlgError as exc:
        raise NearSingularError(f"resolvent is singular: {exc}") from exc
    cond = np.linalg.norm(mat, 1) * np.linalg.norm(inv, 1)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NearSingularError(f"resolvent condition number {cond:.3g} exceeds {COND_LIMIT:g}")
    return inv


def _guard(spec: ChainSpec, config: OracleConfig | None):
    limit = (config or OracleConfig()).max_n
    if spec.n > limit:
        raise ValueError(f"n={spec.n} exceeds dense limit {limit}")


def greens_dense_inverse(spec: ChainSpec, omega: float, epsilon: float,
                         config: OracleConfig | None = None) -> np.ndarray:
    """``(L - (omega + i eps)^2)^-1`` by dense LU inversion."""
    _guard(spec, config)
    z = omega + 1j * epsilon
    return _checked_inverse(l_matrix(spec) - z * z * np.eye(spec.n))


def greens_true_dense(spec: ChainSpec, omega: float, epsilon: float,
                      config: OracleConfig | None = None) -> np.ndarray:
    """``(Lambda^-1 K - (omega + i eps)^2)^-1`` for the true displacements."""
    _guard(spec, config)
    z = omega + 1j * epsilon
    return _checked_inverse(build_matrices(spec).dynamic_matrix - z * z * np.eye(spec.n))


def hamiltonian(spec: ChainSpec, u, u_dot) -> float:
    """Energy of the chain written as a sum over bonds.

    The bond leaving particle ``n-1`` connects to the periodic image of particle
    0, whose displacement is ``xi**-n u_0`` (the ``y`` field is periodic).
    """
    u_dot = np.asarray(u_dot, dtype=float)
    weights = spec.xi ** (2.0 * np.arange(spec.n))
    return 0.5 * spec.m0 * float(np.sum(weights * u_dot**2)) + float(np.sum(bond_energies(spec, u)))


def bond_energies(spec: ChainSpec, u) -> np.ndarray:
    """Potential energy stored in each bond ``p -> p+1`` (the last one wraps)."""
    u = np.asarray(u, dtype=float)
    n, xi = spec.n, spec.xi
    weights = xi ** (2.0 * np.arange(n))
    right = np.append(u[1:], u[0] * xi ** (-n))
    return 0.5 * spec.m0 * spec.omega0**2 * weights * (u - right) ** 2


def hamiltonian_stiffness(spec: ChainSpec) -> np.ndarray:
    """Stiffness matrix recovered from the energy by polarisation of unit vectors."""
    n = spec.n
    zero = np.zeros(n)

    def pot(u):
        return hamiltonian(spec, u, zero) / spec.m0

    eye = np.eye(n)
    diag = np.array([pot(eye[p]) for p in range(n)])
    k = np.empty((n, n))
    for p in range(n):
        k[p, p] = 2.0 * diag[p]
        for q in range(p + 1, n):
            k[p, q] = k[q, p] = pot(eye[p] + eye[q]) - diag[p] - diag[q]
    return k


@dataclass(frozen=True)
class ForceCheckReport:
    fd_force: np.ndarray
    matrix_force: np.ndarray
    max_rel_error: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tol


def hamiltonian_force_check(spec: ChainSpec, u, tol: float = 1e-6, step: float = 1e-6,
                            check: bool = True) -> ForceCheckReport:
    """Compare ``-Lambda^-1 K u`` with a finite-difference gradient of the energy.

    The gradient of the bond energies uses central differences with one
    Richardson refinement; the error is measured against ``||Lambda^-1 K||_inf ||u||_inf``.
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (spec.n,) or not np.all(np.isfinite(u)):
        raise ValueError("u must be a finite vector of length n")
    base = step * max(1.0, float(np.max(np.abs(u))))
    # the energy is quadratic, so central differences are exact for any step;
    # the wrap bond sees u_0 scaled by xi**-n, so the two particles it joins
    # get a step large enough to survive that scaling
    steps = np.full(spec.n, base)
    wrap = spec.n * math.log(spec.xi)
    steps[0] *= math.exp(max(0.0, wrap))
    steps[-1] *= math.exp(max(0.0, -wrap))

    def central(p, hh):
        e = np.zeros(spec.n)
        e[p] = hh
        # bond-wise difference: untouched bonds cancel exactly instead of
        # drowning the change in the roundoff of the (graded, huge) total
        return float(np.sum(bond_energies(spec, u + e) - bond_energies(spec, u - e))) / (2.0 * hh)

    grad = np.array([(4.0 * central(p, h / 2) - central(p, h)) / 3.0
                     for p, h in enumerate(steps)])
    masses = spec.m0 * spec.xi ** (2.0 * np.arange(spec.n))
    fd_force = -grad / masses
    dyn = build_matrices(spec).dynamic_matrix
    mat_force = -dyn @ u
    scale = np.linalg.norm(dyn, np.inf) * max(float(np.max(np.abs(u))), 1e-300)
    err = float(np.max(np.abs(fd_force - mat_force)) / scale)
    report = ForceCheckReport(fd_force, mat_force, err, tol)
    if check and not report.passed:
        raise VerificationError(f"force check failed: rel error {err:.3g} > {tol:g}", report)
    return report


def periodic_image_gap(spec: ChainSpec, omega: float) -> float:
    """Size of the nearest periodic image relative to the on-site value, ``exp(-n chi)``.

    Only meaningful outside the band, where ``chi = arccosh|a| > 0``.
    """
    a = abs(float(coefficient_a(spec, omega)))
    if a <= 1.0:
        return 1.0
    return math.exp(-spec.n * math.acosh(a))


def integrate_equations_of_motion(spec: ChainSpec, u0, v0, times, rtol: float = 1e-12,
                                  atol: float = 1e-13) -> np.ndarray:
    """Integrate ``u'' = -Lambda^-1 K u`` with an explicit 8th-order Runge-Kutta scheme.

    Returns an array of shape ``(len(times), n)``.
    """
    from scipy.integrate import solve_ivp

    dyn = build_matrices(spec).dynamic_matrix
    n = spec.n

    def rhs(_t, state):
        return np.concatenate([state[n:], -dyn @ state[:n]])

    times = np.asarray(times, dtype=float)
    state0 = np.concatenate([np.asarray(u0, dtype=float), np.asarray(v0, dtype=float)])
    sol = solve_ivp(rhs, (0.0, float(times.max())), state0, method="DOP853",
                    t_eval=times, rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"ODE integration failed: {sol.message}")
    return sol.y[:n].T
