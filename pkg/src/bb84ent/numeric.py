"""Dense 2x2 / 4x4 operator arithmetic.

Matrices are plain ``numpy`` complex128 arrays. Two-qubit operators use the
ordering ``|a b>`` -> index ``2*a + b`` (Alice first).
"""
import numpy as np

from . import kernels

HERM_TOL = 1e-12
EIG_TOL = 1e-10
PSD_TOL = -1e-10
JACOBI_OFFDIAG_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


class DimensionError(ValueError):
    pass


class NonHermitianError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


def as_matrix(m):
    """Coerce to a 2-D complex128 array, rejecting NaN/Inf."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def dagger(m):
    return np.conj(np.transpose(m))


def kron(a, b):
    return np.kron(as_matrix(a), as_matrix(b))


def _check4(m):
    m = as_matrix(m)
    if m.shape != (4, 4):
        raise DimensionError(f"expected a 4x4 operator, got {m.shape}")
    return m


def partial_trace(m, subsystem):
    """Trace out qubit ``"A"`` or ``"B"`` of a two-qubit operator."""
    t = _check4(m).reshape(2, 2, 2, 2)  # [a, b, a', b']
    if subsystem == "A":
        return np.einsum("ijik->jk", t)
    if subsystem == "B":
        return np.einsum("ijkj->ik", t)
    raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")


def partial_transpose_b(m):
    """Transpose Bob's indices: <a b|M|a' b'> -> <a b'|M|a' b>."""
    t = _check4(m).reshape(2, 2, 2, 2)
    return np.ascontiguousarray(t.transpose(0, 3, 2, 1)).reshape(4, 4)


def hermiticity_defect(m):
    m = as_matrix(m)
    return float(np.max(np.abs(m - dagger(m))))


def hermitian_eigenvalues(m):
    """Ascending eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.

    Raises
    ------
    NonHermitianError
        If ``max|m - m^dagger|`` exceeds ``HERM_TOL``.
    ConvergenceError
        If the off-diagonal norm is still above ``1e-13`` after 100 sweeps.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got {m.shape}")
    if hermiticity_defect(m) > HERM_TOL:
        raise NonHermitianError("matrix is not Hermitian within tolerance")
    return hermitian_eigenvalues_batch(m[None])[0]


def hermitian_eigenvalues_batch(mats):
    """Batched form of :func:`hermitian_eigenvalues` (no Hermiticity check)."""
    mats = np.ascontiguousarray(mats, dtype=np.complex128)
    eigs, sweeps = kernels.jacobi_eigvalsh_batch(
        mats, JACOBI_OFFDIAG_TOL, JACOBI_MAX_SWEEPS)
    if np.any(sweeps < 0):
        raise ConvergenceError(
            f"Jacobi did not converge within {JACOBI_MAX_SWEEPS} sweeps")
    return eigs
