"""Exponentially graded linear chain: spectra, lattice Green's functions, mode
density, dynamics and the continuum limit."""

__version__ = "0.1.0"

from .chain import (
    ChainSpec,
    MatrixTriple,
    SpectrumResult,
    band_edges,
    build_matrices,
    dispersion,
    verify_spectrum,
)
from .continuum import (
    ContinuumSpec,
    DiscretizationLadder,
    continuum_dispersion,
    continuum_greens,
    continuum_mode_density,
    helmholtz_residual,
)
from .density import ModeDensityCurve, mode_density, normalization_integral
from .errors import (
    AliasingError,
    BandEdgeSingularity,
    GradedChainError,
    GradingOverflow,
    NearSingularError,
    QuadratureError,
    UnsupportedMode,
    VerificationError,
    ZeroModeError,
)
from .greens import (
    GreensEvaluation,
    Kind,
    Regime,
    coefficient_a,
    greens_closed_form,
    greens_matrix,
    greens_ring,
    greens_true,
)
from .timedomain import (
    InitialConditions,
    ModalCoefficients,
    TimeSignal,
    evolve,
    fit_modal_coefficients,
    greens_time_domain,
)
