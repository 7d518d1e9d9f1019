"""Qubit and qubit-pair states, named operators and the QBER functional."""
import json
import math
from dataclasses import dataclass

import numpy as np

from .numeric import (
    HERM_TOL,
    PSD_TOL,
    as_matrix,
    dagger,
    hermiticity_defect,
    hermitian_eigenvalues,
    kron,
    partial_trace,
)

TRACE_TOL = 1e-12

_S = 1.0 / math.sqrt(2.0)

I2 = np.eye(2, dtype=np.complex128)
H = np.array([[1, 1], [1, -1]], dtype=np.complex128) * _S
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
I4 = np.eye(4, dtype=np.complex128)

KET0 = np.array([1, 0], dtype=np.complex128)
KET1 = np.array([0, 1], dtype=np.complex128)

PHI_PLUS = np.array([1, 0, 0, 1], dtype=np.complex128) * _S
PHI_MINUS = np.array([1, 0, 0, -1], dtype=np.complex128) * _S
PSI_PLUS = np.array([0, 1, 1, 0], dtype=np.complex128) * _S
PSI_MINUS = np.array([0, 1, -1, 0], dtype=np.complex128) * _S

# Weight order used everywhere: (lam00, lam10, lam01, lam11).
BELL_STATES = (PHI_PLUS, PHI_MINUS, PSI_PLUS, PSI_MINUS)
BELL_LABELS = ("phi+", "phi-", "psi+", "psi-")


class InvalidStateError(ValueError):
    pass


def hadamard_power(b):
    if b not in (0, 1):
        raise ValueError(f"basis label must be 0 or 1, got {b!r}")
    return H if b else I2


def basis_projector(l, b):
    """``H^b |l><l| H^b``: projector on outcome ``l`` of basis ``b``."""
    ket = (KET0, KET1)[l]
    hb = hadamard_power(b)
    v = hb @ ket
    return np.outer(v, v.conj())


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A validated one- or two-qubit density operator.

    Construction checks Hermiticity (``HERM_TOL``), unit trace and that the
    smallest eigenvalue is at least ``PSD_TOL``.
    """

    mat: np.ndarray

    def __post_init__(self):
        try:
            m = as_matrix(self.mat)
        except ValueError as exc:
            raise InvalidStateError(str(exc)) from None
        if m.shape not in ((2, 2), (4, 4)):
            raise InvalidStateError(f"density operator must be 2x2 or 4x4, got {m.shape}")
        if hermiticity_defect(m) > HERM_TOL:
            raise InvalidStateError("density operator is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace is {tr.real:.15g}, expected 1")
        lo = hermitian_eigenvalues(m)[0]
        if lo < PSD_TOL:
            raise InvalidStateError(f"minimum eigenvalue {lo:.3e} is negative")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self):
        return self.mat.shape[0]

    @classmethod
    def from_vector(cls, psi):
        psi = np.asarray(psi, dtype=np.complex128)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    def to_json(self):
        return {
            "dim": int(self.dim),
            "entries": [[float(z.real), float(z.imag)] for z in self.mat.ravel()],
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(matrix_from_json(obj))

    def __eq__(self, other):
        if not isinstance(other, DensityOperator):
            return NotImplemented
        return self.mat.shape == other.mat.shape and np.array_equal(self.mat, other.mat)

    __hash__ = None


def matrix_from_json(obj):
    """Parse ``{dim, entries: [[re, im], ...]}`` (row-major) into a matrix."""
    try:
        dim = int(obj["dim"])
        entries = obj["entries"]
        if len(entries) != dim * dim:
            raise ValueError(f"expected {dim * dim} entries, got {len(entries)}")
        flat = [complex(float(re), float(im)) for re, im in entries]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidStateError(f"malformed matrix JSON: {exc}") from None
    return np.array(flat, dtype=np.complex128).reshape(dim, dim)


def matrix_to_json(m):
    m = as_matrix(m)
    return {
        "dim": int(m.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def as_density(rho):
    if isinstance(rho, DensityOperator):
        return rho
    return DensityOperator(rho)


def _pair(rho):
    rho = as_density(rho)
    if rho.dim != 4:
        raise InvalidStateError("expected a two-qubit (4x4) state")
    return rho


def pure(psi):
    return DensityOperator.from_vector(psi)


def maximally_mixed(dim=4):
    return DensityOperator(np.eye(dim, dtype=np.complex128) / dim)


def bell_projector(index):
    v = BELL_STATES[index]
    return np.outer(v, v.conj())


def joint_outcome_probs(rho, b):
    """Table ``p[l, m]`` for Alice obtaining ``l`` and Bob ``m``, both in basis ``b``."""
    m = _pair(rho).mat
    p = np.empty((2, 2))
    for l in (0, 1):
        for k in (0, 1):
            proj = kron(basis_projector(l, b), basis_projector(k, b))
            p[l, k] = np.trace(proj @ m).real
    return p


def qber_of_state(rho):
    """Average disagreement probability over the Z and X bases."""
    rho = _pair(rho)
    total = 0.0
    for b in (0, 1):
        p = joint_outcome_probs(rho, b)
        total += p[0, 1] + p[1, 0]
    return 0.5 * total


def fidelity_phi_plus(rho):
    m = _pair(rho).mat
    return float((PHI_PLUS.conj() @ m @ PHI_PLUS).real)


def swap_parties(rho):
    """Exchange Alice's and Bob's qubits."""
    m = _pair(rho).mat
    t = m.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2)
    return DensityOperator(np.ascontiguousarray(t).reshape(4, 4))


def marginal(rho, keep):
    """Reduced state of party ``keep`` ("A" or "B")."""
    other = {"A": "B", "B": "A"}[keep]
    return DensityOperator(partial_trace(_pair(rho).mat, other))


def conjugate(rho, u):
    """``U rho U^dagger`` as a new DensityOperator."""
    m = as_density(rho).mat
    return DensityOperator(u @ m @ dagger(u))


def random_density(rng):
    """Random two-qubit state: a Gaussian pure state mixed with I/4.

    The mixing weight is uniform on [0, 1], so the draws cover near-pure and
    near-maximally-mixed states alike.
    """
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    v /= np.linalg.norm(v)
    w = rng.random()
    m = w * np.outer(v, v.conj()) + (1.0 - w) * I4 / 4
    m = 0.5 * (m + dagger(m))
    return DensityOperator(m / np.trace(m).real)
