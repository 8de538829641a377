"""Partially symmetric monomial codes: construction, bounds, and decoding."""

from .bitmath import BitMatrix, BitVec, GF2mField, gf2m_mul, kernel_basis, rank, rref
from .bounds import (
    bec_minus_capacity,
    bound_curve,
    convergence_gap,
    fully_symmetric_lb,
    list_size_lb,
    partially_symmetric_lb,
)
from .calculus import (
    Direction,
    SymmetryProfile,
    derivative_subcode_dim,
    directional_derivative_code,
    is_invariant,
    monomial_partial,
    symmetry_profile,
)
from .channelconstruct import (
    bec_density_evolution,
    bec_frozen_set,
    ga_frozen_set,
    sc_error_estimate,
    select_permutations,
)
from .codes import (
    FrozenSpec,
    LinearCode,
    Monomial,
    MonomialCode,
    ebch_code,
    encode,
    evaluate_monomial,
    load_code,
    monomial_min_distance,
    monomial_to_linear,
    polar_code,
    rm_code,
    save_code,
)
from .construct import (
    ConstructionRequest,
    FlowNetwork,
    NonRepresentableError,
    biregular_subgraph,
    construct_partially_symmetric,
    max_flow,
)
from .decode import (
    DecodeResult,
    ml_decode_bruteforce,
    ml_lower_bound_flag,
    permutation_decode,
    sc_decode,
    scl_decode,
)
from .sim import Bec, BiAwgn, SimConfig, SimResult, fer_curve, simulate_fer, transmit

__version__ = "0.1.0"
