"""Entanglement-threshold toolkit for the BB84 key-distribution protocol.

A qubit pair whose Z/X-averaged error rate is below 1/4 or above 3/4 is
necessarily entangled; between those values a separable state explains the
observed errors. The package provides the QBER functional, the twirl to
Bell-diagonal form, partial-transpose verdicts, attack channels, protocol
round simulation and recurrence purification.
"""
__version__ = "0.1.0"

from .channels import (
    AttackChannel,
    Depolarizing,
    Identity,
    InterceptResend,
    Kraus,
    Pauli,
    SeparableSource,
    analytic_qber,
    apply_to_pair,
    stochastic_transmit,
)
from .kernels import BACKEND
from .numeric import hermitian_eigenvalues, kron, partial_trace, partial_transpose_b
from .protocol import ProtocolConfig, RunSummary, decide, run_entanglement_round, run_pm_round
from .purification import epp_step, purify_until
from .states import DensityOperator, fidelity_phi_plus, joint_outcome_probs, qber_of_state
from .twirl import (
    BellDiagonal,
    bell_diagonal_of,
    qber_of_bell_diagonal,
    reconstruct,
    twirl,
    verify_symmetry_identities,
)
from .witness import (
    RegionPoint,
    SeparabilityVerdict,
    classify_region,
    ppt_verdict_bell,
    ppt_verdict_numeric,
    separable_family,
    threshold_scan,
)

