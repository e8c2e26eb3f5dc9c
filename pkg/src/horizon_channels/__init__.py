"""Information measures for photonic qubits sent to an accelerated receiver.

The receiver sees the sender's mode through a two-mode squeezer of strength
``r``; ``tanh r = exp(-omega pi / a)`` for proper acceleration ``a``, and an
observer hovering at radius ``R`` outside a mass ``M`` has
``1/a = 4 M sqrt(1 - 2M/R)``. Closed-form series live in :mod:`.closedform`,
an independent brute-force pipeline in :mod:`.oracle`.
"""

from .analysis import FitResult, PlateauEstimate, SweepGrid, SweepRow, estimate_plateau, fit_exponential_decay, sweep
from .closedform import (
    SeriesConfig,
    ce_quantum_dual,
    ce_quantum_single,
    classical_capacity,
    coherent_information,
    conditional_entropy,
    derived_quantities,
    fidelity_series,
    mi_classical_dual,
    mi_classical_single,
    mutual_information,
)
from .errors import (
    CapacityError,
    ConvergenceError,
    DomainError,
    HorizonChannelsError,
    InputError,
    PositivityError,
    StructuralError,
    TruncationError,
)
from .fockcore import FockDensityMatrix, TruncationPolicy, fidelity, partial_trace, von_neumann_entropy
from .oracle import oracle_quantities
from .quantities import ChannelQuantities
from .unruh import (
    AccelerationSpec,
    Encoding,
    Preparation,
    Protocol,
    SchwarzschildSpec,
    SqueezingParameter,
    acceleration_from_schwarzschild,
    acceleration_from_squeezing,
    squeezing_from_acceleration,
)
from .verification import VerificationReport, verify_point

__version__ = "0.1.0"
