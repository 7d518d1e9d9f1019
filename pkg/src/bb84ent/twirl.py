"""Bell-diagonal states and the discrete twirl that produces them.

The twirl averages a pair state over the local-unitary group generated by
``X(x)X``, ``Z(x)Z`` and ``H(x)H``. The result is diagonal in the Bell basis
with equal ``phi-`` and ``psi+`` weights, and has the same QBER as the input.
"""
import json
from dataclasses import dataclass

import numpy as np

from . import states
from .numeric import dagger, kron

WEIGHT_TOL = 1e-12
BELL_OFFDIAG_TOL = 1e-10


class InvalidWeightsError(ValueError):
    pass


class NotBellDiagonalError(ValueError):
    pass


@dataclass(frozen=True)
class BellDiagonal:
    """Weights over ``(phi+, phi-, psi+, psi-)``, stored as lam00, lam10, lam01, lam11.

    Entries down to ``-1e-12`` are clamped to zero; the sum must be 1
    within ``1e-12``.
    """

    lam00: float
    lam10: float
    lam01: float
    lam11: float

    def __post_init__(self):
        vals = []
        for name in ("lam00", "lam10", "lam01", "lam11"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise InvalidWeightsError(f"{name} is not finite")
            if v < -WEIGHT_TOL:
                raise InvalidWeightsError(f"{name} = {v:.3e} is negative")
            if v < 0.0:
                v = 0.0
            object.__setattr__(self, name, v)
            vals.append(v)
        if abs(sum(vals) - 1.0) > WEIGHT_TOL:
            raise InvalidWeightsError(f"weights sum to {sum(vals):.15g}, expected 1")

    @classmethod
    def from_sequence(cls, seq):
        seq = list(seq)
        if len(seq) != 4:
            raise InvalidWeightsError(f"expected 4 weights, got {len(seq)}")
        return cls(*seq)

    def as_array(self):
        return np.array([self.lam00, self.lam10, self.lam01, self.lam11])

    @property
    def qber(self):
        return qber_of_bell_diagonal(self)

    @property
    def g2_invariant(self):
        return abs(self.lam01 - self.lam10) <= WEIGHT_TOL

    def to_json(self):
        return [self.lam00, self.lam10, self.lam01, self.lam11]

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            return cls.from_sequence(float(x) for x in obj)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidWeightsError):
                raise
            raise InvalidWeightsError(f"malformed weight vector: {exc}") from None


def qber_of_bell_diagonal(lam):
    """Z/X-averaged error rate of a Bell-diagonal state.

    Z outcomes disagree on psi+ and psi-, X outcomes on phi- and psi-, so the
    average is ``lam11 + (lam01 + lam10) / 2``. For group-invariant weights
    (``lam01 == lam10``) this is ``lam11 + lam01``.
    """
    if not isinstance(lam, BellDiagonal):
        lam = BellDiagonal.from_sequence(lam)
    return lam.lam11 + 0.5 * (lam.lam01 + lam.lam10)


@dataclass(frozen=True)
class GroupElement:
    name: str
    unitary: np.ndarray


def group_elements():
    """Unitaries of the two Abelian groups, ``(G1, G2)``.

    Built from the current module constants on every call.
    """
    X, Z, I2 = states.X, states.Z, states.I2
    XZ = X @ Z
    g = (
        GroupElement("g1", kron(X, X)),
        GroupElement("g2", kron(Z, Z)),
        GroupElement("g3", kron(XZ, XZ)),
        GroupElement("g4", kron(I2, I2)),
    )
    h = (
        GroupElement("h1", kron(states.H, states.H)),
        GroupElement("h2", kron(I2, I2)),
    )
    return g, h


def twirl(rho):
    """Average ``rho`` over all eight products ``U(h) U(g)``."""
    m = states.as_density(rho).mat
    if m.shape != (4, 4):
        raise states.InvalidStateError("twirl acts on two-qubit states")
    g_elems, h_elems = group_elements()
    out = np.zeros((4, 4), dtype=np.complex128)
    for h in h_elems:
        for g in g_elems:
            u = h.unitary @ g.unitary
            out += u @ m @ dagger(u)
    out /= 8.0
    return states.DensityOperator(0.5 * (out + dagger(out)))


def _bell_matrix():
    return np.column_stack(states.BELL_STATES)


def bell_basis_matrix(rho):
    """``rho`` expressed in the Bell basis (phi+, phi-, psi+, psi-)."""
    m = states.as_density(rho).mat
    v = _bell_matrix()
    return dagger(v) @ m @ v


def bell_diagonal_of(rho, tol=BELL_OFFDIAG_TOL):
    b = bell_basis_matrix(rho)
    off = b - np.diag(np.diag(b))
    worst = float(np.max(np.abs(off)))
    if worst > tol:
        raise NotBellDiagonalError(
            f"state has Bell-basis coherences of size {worst:.3e}")
    return BellDiagonal.from_sequence(np.diag(b).real)


def reconstruct(lam):
    if not isinstance(lam, BellDiagonal):
        lam = BellDiagonal.from_sequence(lam)
    m = np.zeros((4, 4), dtype=np.complex128)
    for w, v in zip(lam.as_array(), states.BELL_STATES):
        m += w * np.outer(v, v.conj())
    return states.DensityOperator(m)


def twirled_weights(rho):
    return bell_diagonal_of(twirl(rho))


def verify_symmetry_identities():
    """Evaluate the twelve basis-flip identities for X, Z and XZ conjugation.

    For ``b, l`` in {0, 1}::

        X P(l, b) X        = P(l+1+b, b)
        Z P(l, b) Z        = P(l+b, b)
        XZ P(l, b) (XZ)^+  = P(l+1, b)

    where ``P(l, b) = H^b |l><l| H^b`` and addition is mod 2.

    Returns
    -------
    dict
        ``cases``: list of ``{op, b, l, deviation}``; ``max_deviation``.
    """
    X, Z = states.X, states.Z
    ops = (
        ("X", X, lambda l, b: l ^ 1 ^ b),
        ("Z", Z, lambda l, b: l ^ b),
        ("XZ", X @ Z, lambda l, b: l ^ 1),
    )
    cases = []
    for name, u, target in ops:
        for b in (0, 1):
            for l in (0, 1):
                lhs = u @ states.basis_projector(l, b) @ dagger(u)
                rhs = states.basis_projector(target(l, b), b)
                dev = float(np.max(np.abs(lhs - rhs)))
                cases.append({"op": name, "b": b, "l": l, "deviation": dev})
    return {"cases": cases, "max_deviation": max(c["deviation"] for c in cases)}
