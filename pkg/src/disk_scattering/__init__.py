"""SU(1,1) transfer matrices for 1D scattering and their action on the unit disk."""

from .core import (
    RealTransferMatrix,
    ScatteringAmplitudes,
    TransferMatrix,
    WaveAmplitudePair,
    amplitudes_from_transfer,
    compose,
    composed_amplitudes,
    from_real_representation,
    to_real_representation,
    transfer_from_amplitudes,
    transfer_power,
)
from .errors import (
    BoundaryPointError,
    DegenerateError,
    InvariantError,
    NotHyperbolicError,
    OracleToleranceError,
    PerfectReflectionError,
    ScatteringError,
)
from .geometry import (
    ActionClassification,
    ActionKind,
    Geodesic,
    canonical_form,
    classify,
    conjugate,
    hyperbolic_distance,
    mobius,
    orbit,
    reduce_to_canonical,
    translation_length,
)
from .periodic import (
    BandPoint,
    BandStatus,
    PeriodicResult,
    band_scan,
    closed_form_zN,
    iterate_disk,
    reflectance_N,
)
from .potentials import (
    PotentialSegment,
    PotentialStack,
    SampledPotential,
    UnitConvention,
    barrier_amplitudes,
    barrier_transfer,
    free_transfer,
    numerical_transfer,
    stack_transfer,
)
from .turns import (
    HyperbolicTurn,
    compose_turns,
    hyperbolic_law_of_cosines,
    reflect_in_geodesic,
    sqrt_transfer,
    transfer_from_turn,
    turn_from_transfer,
)

__version__ = "0.1.0"
