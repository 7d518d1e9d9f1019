"""Per-qubit attack channels acting on the transmitted (Bob's) half of a pair.

A general coherent attack is reduced to an i.i.d. per-pair channel: after the
random permutation only the single-pair reduced state enters the QBER, so a
channel acting identically on every transmitted qubit reproduces any attack's
average disturbance.
"""
import json
import math
from dataclasses import dataclass

import numpy as np

from . import states
from .numeric import as_matrix, dagger
from .states import DensityOperator, InvalidStateError
from .witness import separable_family

KRAUS_TOL = 1e-10


class ChannelError(ValueError):
    pass


class AttackChannel:
    """Base class; subclasses provide ``kraus_operators`` and ``to_json``."""

    kind = "abstract"

    def kraus_operators(self):
        raise NotImplementedError

    def apply(self, tau):
        """Deterministic action on a single-qubit state."""
        m = states.as_density(tau).mat
        if m.shape != (2, 2):
            raise InvalidStateError("channel input must be a single-qubit state")
        out = sum(k @ m @ dagger(k) for k in self.kraus_operators())
        return DensityOperator(0.5 * (out + dagger(out)))

    def to_json(self):
        return {"kind": self.kind}

    def describe(self):
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class Identity(AttackChannel):
    kind = "identity"

    def kraus_operators(self):
        return [states.I2.copy()]


def _check_prob(name, v):
    v = float(v)
    if not (0.0 <= v <= 1.0) or math.isnan(v):
        raise ChannelError(f"{name} must lie in [0, 1], got {v}")
    return v


@dataclass(frozen=True)
class Depolarizing(AttackChannel):
    """``tau -> (1 - p) tau + p I/2``."""

    p: float
    kind = "depolarizing"

    def __post_init__(self):
        object.__setattr__(self, "p", _check_prob("p", self.p))

    def kraus_operators(self):
        p = self.p
        return [math.sqrt(1.0 - 0.75 * p) * states.I2,
                math.sqrt(p / 4.0) * states.X,
                math.sqrt(p / 4.0) * states.Y,
                math.sqrt(p / 4.0) * states.Z]

    def to_json(self):
        return {"kind": self.kind, "p": self.p}


@dataclass(frozen=True)
class Pauli(AttackChannel):
    """Apply X, Y or Z with probabilities ``px``, ``py``, ``pz``.

    On ``phi+`` this gives Bell weights ``(1 - px - py - pz, pz, px, py)``.
    """

    px: float
    py: float
    pz: float
    kind = "pauli"

    def __post_init__(self):
        for name in ("px", "py", "pz"):
            object.__setattr__(self, name, _check_prob(name, getattr(self, name)))
        if self.px + self.py + self.pz > 1.0 + 1e-12:
            raise ChannelError("Pauli weights must sum to at most 1")

    def kraus_operators(self):
        p0 = max(0.0, 1.0 - self.px - self.py - self.pz)
        return [math.sqrt(p0) * states.I2,
                math.sqrt(self.px) * states.X,
                math.sqrt(self.py) * states.Y,
                math.sqrt(self.pz) * states.Z]

    def to_json(self):
        return {"kind": self.kind, "px": self.px, "py": self.py, "pz": self.pz}


@dataclass(frozen=True, eq=False)
class Kraus(AttackChannel):
    operators: tuple
    kind = "kraus"

    def __post_init__(self):
        ops = []
        for k in self.operators:
            try:
                k = as_matrix(k)
            except ValueError as exc:
                raise ChannelError(str(exc)) from None
            if k.shape != (2, 2):
                raise ChannelError(f"Kraus operators must be 2x2, got {k.shape}")
            k.setflags(write=False)
            ops.append(k)
        if not ops:
            raise ChannelError("at least one Kraus operator is required")
        total = sum(dagger(k) @ k for k in ops)
        defect = float(np.max(np.abs(total - states.I2)))
        if defect > KRAUS_TOL:
            raise ChannelError(f"Kraus operators are not trace preserving (defect {defect:.2e})")
        object.__setattr__(self, "operators", tuple(ops))

    def kraus_operators(self):
        return [k.copy() for k in self.operators]

    def to_json(self):
        return {"kind": self.kind,
                "operators": [states.matrix_to_json(k) for k in self.operators]}


@dataclass(frozen=True)
class InterceptResend(AttackChannel):
    """Eve measures in Z or X (probability 1/2 each) and resends the result."""

    kind = "intercept_resend"

    def kraus_operators(self):
        s = 1.0 / math.sqrt(2.0)
        return [s * states.basis_projector(l, b) for b in (0, 1) for l in (0, 1)]


def _measure_prepare(b, weight):
    w = math.sqrt(weight)
    return [w * states.basis_projector(l, b) for l in (0, 1)]


@dataclass(frozen=True)
class SeparableSource(AttackChannel):
    """Eve hands Alice and Bob the separable family state with QBER ``D``.

    As a channel on Bob's qubit this is the entanglement-breaking map whose
    Choi state is that family member: for ``D <= 1/2`` a mixture of full
    depolarisation (weight ``4D - 1``) and Z / X measure-and-resend (weight
    ``1 - 2D`` each); above 1/2 the same map for ``1 - D`` followed by Y.
    """

    D: float
    kind = "separable_source"

    def __post_init__(self):
        D = float(self.D)
        if not (0.25 <= D <= 0.75):
            raise ChannelError(f"separable source needs 1/4 <= D <= 3/4, got {D}")
        object.__setattr__(self, "D", D)

    def kraus_operators(self):
        D = self.D if self.D <= 0.5 else 1.0 - self.D
        ops = [math.sqrt(4.0 * D - 1.0) * 0.5 * p
               for p in (states.I2, states.X, states.Y, states.Z)]
        ops += _measure_prepare(0, 1.0 - 2.0 * D)
        ops += _measure_prepare(1, 1.0 - 2.0 * D)
        if self.D > 0.5:
            ops = [states.Y @ k for k in ops]
        return ops

    def to_json(self):
        return {"kind": self.kind, "D": self.D}


_KINDS = {
    "identity": lambda o: Identity(),
    "depolarizing": lambda o: Depolarizing(o["p"]),
    "pauli": lambda o: Pauli(o["px"], o["py"], o["pz"]),
    "kraus": lambda o: Kraus(tuple(states.matrix_from_json(m) for m in o["operators"])),
    "intercept_resend": lambda o: InterceptResend(),
    "separable_source": lambda o: SeparableSource(o["D"]),
}


def channel_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        kind = obj["kind"]
        factory = _KINDS[kind]
    except (KeyError, TypeError):
        raise ChannelError(f"unknown channel description: {obj!r}") from None
    try:
        return factory(obj)
    except (KeyError, TypeError, InvalidStateError) as exc:
        raise ChannelError(f"bad parameters for {kind}: {exc}") from None


def parse_preset(text):
    """Parse ``identity``, ``depol:p``, ``pauli:px,py,pz``, ``ir`` or ``sep:D``."""
    name, _, arg = text.partition(":")
    try:
        if name == "identity" and not arg:
            return Identity()
        if name in ("ir", "intercept-resend") and not arg:
            return InterceptResend()
        if name == "depol":
            return Depolarizing(float(arg))
        if name == "sep":
            return SeparableSource(float(arg))
        if name == "pauli":
            px, py, pz = (float(x) for x in arg.split(","))
            return Pauli(px, py, pz)
    except ValueError as exc:
        raise ChannelError(f"bad channel preset {text!r}: {exc}") from None
    raise ChannelError(f"unknown channel preset {text!r}")


def lift_to_b(k):
    return np.kron(states.I2, k)


def apply_to_pair(ch, rho):
    """``(id (x) channel)(rho)``; a separable source ignores ``rho``."""
    rho = states.as_density(rho)
    if rho.dim != 4:
        raise InvalidStateError("expected a two-qubit state")
    if isinstance(ch, SeparableSource):
        return separable_family(ch.D)
    m = rho.mat
    out = np.zeros((4, 4), dtype=np.complex128)
    for k in ch.kraus_operators():
        kb = lift_to_b(k)
        out += kb @ m @ dagger(kb)
    return DensityOperator(0.5 * (out + dagger(out)))


@dataclass(frozen=True)
class PairState:
    rho: DensityOperator
    provenance: str


def transmit_pair(ch, rho=None):
    if rho is None:
        rho = states.pure(states.PHI_PLUS)
    return PairState(apply_to_pair(ch, rho), ch.describe())


def analytic_qber(ch):
    return states.qber_of_state(apply_to_pair(ch, states.pure(states.PHI_PLUS)))


def branch_probabilities(ch, tau):
    m = states.as_density(tau).mat
    return np.array([np.trace(k @ m @ dagger(k)).real for k in ch.kraus_operators()])


def stochastic_transmit(ch, qubit_state, rng):
    """Sample one Kraus branch with its Born probability; return the normalised output."""
    m = states.as_density(qubit_state).mat
    if m.shape != (2, 2):
        raise InvalidStateError("expected a single-qubit state")
    ops = ch.kraus_operators()
    probs = np.array([np.trace(k @ m @ dagger(k)).real for k in ops])
    probs = np.clip(probs, 0.0, None)
    cdf = np.cumsum(probs) / probs.sum()
    idx = int(np.searchsorted(cdf, rng.random(), side="right"))
    idx = min(idx, len(ops) - 1)
    while probs[idx] == 0.0:  # guard the rounding edge at the top of the cdf
        idx -= 1
    k = ops[idx]
    out = k @ m @ dagger(k) / probs[idx]
    return DensityOperator(0.5 * (out + dagger(out)))
