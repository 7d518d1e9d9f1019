import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bb84ent import states
from bb84ent.numeric import (
    ConvergenceError,
    DimensionError,
    NonHermitianError,
    hermitian_eigenvalues,
    kron,
    partial_trace,
    partial_transpose_b,
)

I2, X, Y, Z, H = states.I2, states.X, states.Y, states.Z, states.H
PHI = np.outer(states.PHI_PLUS, states.PHI_PLUS.conj())


def random_hermitian(rng, n=4):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def test_kron_identity_and_diagonal():
    assert np.array_equal(kron(I2, I2), np.eye(4))
    assert np.array_equal(kron(Z, Z), np.diag([1, -1, -1, 1]))


def test_kron_xx_is_antidiagonal():
    expected = np.array([[0, 0, 0, 1],
                         [0, 0, 1, 0],
                         [0, 1, 0, 0],
                         [1, 0, 0, 0]])
    assert np.array_equal(kron(X, X), expected)


int_mats = arrays(np.int64, (2, 2), elements=st.integers(-5, 5))


@given(int_mats, int_mats, int_mats)
def test_kron_associative_exact(a, b, c):
    assert np.array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))


def test_partial_trace_examples():
    assert np.allclose(partial_trace(PHI, "B"), I2 / 2, atol=1e-15)
    ket00 = np.zeros((4, 4)); ket00[0, 0] = 1
    assert np.array_equal(partial_trace(ket00, "A"), np.diag([1, 0]))
    assert np.allclose(partial_trace(np.eye(4) / 4, "B"), I2 / 2)


def test_partial_trace_of_product_state():
    a = np.array([[0.7, 0.1 + 0.2j], [0.1 - 0.2j, 0.3]])
    b = np.array([[0.4, -0.3j], [0.3j, 0.6]])
    assert np.allclose(partial_trace(np.kron(a, b), "B"), a)
    assert np.allclose(partial_trace(np.kron(a, b), "A"), b)


def test_partial_trace_rejects_bad_input():
    with pytest.raises(DimensionError):
        partial_trace(np.eye(2), "A")
    with pytest.raises(ValueError):
        partial_trace(np.eye(4), "C")


def test_partial_trace_preserves_trace(rng):
    for _ in range(200):
        m = random_hermitian(rng)
        for s in "AB":
            assert abs(np.trace(partial_trace(m, s)) - np.trace(m)) < 1e-12


def test_partial_transpose_matches_index_definition():
    m = np.arange(16).reshape(4, 4)
    expected = np.array([[0, 4, 2, 6],
                         [1, 5, 3, 7],
                         [8, 12, 10, 14],
                         [9, 13, 11, 15]])
    assert np.array_equal(partial_transpose_b(m), expected)


def test_partial_transpose_fixed_point_and_swap():
    assert np.array_equal(partial_transpose_b(np.eye(4) / 4), np.eye(4) / 4)
    # PT of |phi+><phi+| is SWAP / 2
    swap = np.eye(4)[[0, 2, 1, 3]]
    assert np.allclose(partial_transpose_b(PHI), swap / 2, atol=1e-15)


def test_partial_transpose_involution_and_structure(rng):
    for _ in range(100):
        m = random_hermitian(rng)
        pt = partial_transpose_b(m)
        assert np.array_equal(partial_transpose_b(pt), m)
        assert np.trace(pt) == np.trace(m)
        assert np.array_equal(pt, pt.conj().T)


def test_partial_transpose_rejects_bad_shape():
    with pytest.raises(DimensionError):
        partial_transpose_b(np.eye(3))


def test_eigenvalues_examples(backend):
    assert np.allclose(hermitian_eigenvalues(np.diag([3.0, 1.0, 2.0, 0.0])), [0, 1, 2, 3])
    assert np.allclose(hermitian_eigenvalues(X), [-1, 1], atol=1e-12)
    ev = hermitian_eigenvalues(partial_transpose_b(PHI))
    assert np.allclose(ev, [-0.5, 0.5, 0.5, 0.5], atol=1e-10)


def test_eigenvalues_against_lapack(backend, rng):
    for n in (2, 4):
        for _ in range(300):
            m = random_hermitian(rng, n)
            ours = hermitian_eigenvalues(m)
            ref = np.linalg.eigvalsh(m)
            assert np.all(np.diff(ours) >= 0)
            assert np.max(np.abs(ours - ref)) < 1e-10
            assert abs(ours.sum() - np.trace(m).real) < 1e-10


def test_eigenvalues_degenerate_and_complex(backend):
    m = np.array([[2, 1j, 0, 0], [-1j, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    assert np.allclose(hermitian_eigenvalues(m), [1, 1, 1, 3], atol=1e-12)


def _unitary_from_constants(word):
    table = {"H": H, "X": X, "Y": Y, "Z": Z, "I": I2}
    u = np.eye(4, dtype=complex)
    for a, b in zip(word[::2], word[1::2]):
        u = np.kron(table[a], table[b]) @ u
    return u


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="HXYZI", min_size=2, max_size=12).filter(lambda s: len(s) % 2 == 0),
       st.integers(0, 2**32 - 1))
def test_eigenvalues_unitarily_invariant(word, seed):
    rng = np.random.default_rng(seed)
    m = random_hermitian(rng)
    u = _unitary_from_constants(word)
    rot = u @ m @ u.conj().T
    rot = (rot + rot.conj().T) / 2
    assert np.max(np.abs(hermitian_eigenvalues(rot) - hermitian_eigenvalues(m))) < 1e-10


def test_eigenvalues_reject_non_hermitian():
    with pytest.raises(NonHermitianError):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))


def test_eigenvalues_report_non_convergence(monkeypatch):
    from bb84ent import numeric
    monkeypatch.setattr(numeric, "JACOBI_MAX_SWEEPS", 0)
    with pytest.raises(ConvergenceError):
        hermitian_eigenvalues(X)


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        kron(np.array([[np.nan, 0], [0, 1]]), I2)
