"""Token-counting ring networks: exact distributions, rigidity checks and certified bounds."""

from . import certify, rgb4, rigidity, ring_model, serialization, tensor_core
from .certify import CertificateBundle, certificate, entanglement_bound, hmin_bound, r_floor_maximize, r_lower_bound
from .errors import (
    CapacityError,
    ConsistencyError,
    DimensionError,
    DomainError,
    PreconditionError,
    RingCertError,
    ValidationError,
)
from .rgb4 import coherence_r, rgb4_closed_form, rgb4_strategy
from .ring_model import (
    OutcomeDistribution,
    QuantumRingStrategy,
    RingLayout,
    TokenStrategy,
    classical_distribution,
    quantum_distribution,
)

__version__ = "0.1.0"
