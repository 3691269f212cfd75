"""Bound-state counting and threshold phase shifts for the planar Dirac equation."""

from . import levinson, potentials, radial, scattering, special, spectrum
from .errors import (
    BranchAmbiguity,
    ConfigError,
    CrossingAmbiguity,
    DomainError,
    ExcludedCase,
    GridInsufficient,
    IllConditioned,
    InfiniteSpectrum,
    IntegrationFailure,
    Levinson2DError,
    NotConverged,
    OutOfValidatedRange,
    UnsupportedOrigin,
    UnsupportedRegime,
)
from .levinson import (
    Classification,
    LevinsonReport,
    TailExponents,
    reduce_tail,
    symmetry_map,
    tail_exponents,
    verify,
)
from .potentials import (
    IntegrabilityResult,
    PotentialModel,
    PowerTail,
    ProblemSpec,
    check_integrability,
    cutoff_view,
    evaluate,
    negate_and_reflect,
)
from .radial import (
    Energy,
    MatchRatio,
    exterior_bound_ratio,
    exterior_tail_ratio,
    exterior_theta,
    integrate_interior,
    interior_theta,
)
from .scattering import (
    PhaseSample,
    PhaseShiftRecord,
    ThresholdFit,
    phase_sweep,
    tan_phase_shift,
    threshold_fit,
    threshold_path,
    threshold_phase,
    threshold_record,
)
from .spectrum import (
    HalfBound,
    MethodAgreement,
    SpectrumReport,
    detect_half_bound,
    find_bound_energies,
    lambda_sweep_count,
    spectrum_report,
)

__version__ = "0.1.0"
