"""The compiled and pure-Python kernels must agree."""
import numpy as np
import pytest

from bb84ent import _pykernels, kernels

needs_both = pytest.mark.skipif("cython" not in kernels.BACKENDS,
                                reason="compiled extension not built")


def test_backend_selection_defaults():
    assert kernels.BACKEND in kernels.BACKENDS
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@needs_both
def test_jacobi_backends_agree(rng):
    a = rng.standard_normal((500, 4, 4)) + 1j * rng.standard_normal((500, 4, 4))
    a = (a + np.conj(np.swapaxes(a, 1, 2))) / 2
    ec, sc = kernels.get_backend("cython").jacobi_eigvalsh_batch(a, 1e-13, 100)
    ep, sp = _pykernels.jacobi_eigvalsh_batch(a, 1e-13, 100)
    assert np.all(sc >= 0) and np.all(sp >= 0)
    assert np.max(np.abs(ec - ep)) < 1e-12
    assert np.max(np.abs(ec - np.linalg.eigvalsh(a))) < 1e-10


@needs_both
def test_sampler_backends_identical(rng):
    bcdf = np.cumsum(rng.dirichlet(np.ones(5), size=3), axis=1)
    bcdf[:, -1] = 1.0
    ocdf = np.cumsum(rng.dirichlet(np.ones(4), size=(3, 5)), axis=2)
    ocdf[..., -1] = 1.0
    cond = rng.integers(0, 3, 10000)
    ub, uo = rng.random(10000), rng.random(10000)
    c = kernels.get_backend("cython").sample_two_stage(cond, ub, uo, bcdf, ocdf)
    p = _pykernels.sample_two_stage(cond, ub, uo, bcdf, ocdf)
    assert np.array_equal(c[0], p[0]) and np.array_equal(c[1], p[1])


@needs_both
def test_shuffle_backends_identical(rng):
    u = rng.random(999)
    assert np.array_equal(kernels.get_backend("cython").shuffle_indices(u),
                          _pykernels.shuffle_indices(u))


def test_sampler_frequencies(backend, rng):
    bcdf = np.array([[0.2, 1.0]])
    ocdf = np.array([[[0.5, 1.0], [0.9, 1.0]]])
    n = 200000
    b, o = kernels.sample_two_stage(np.zeros(n, dtype=np.int64), rng.random(n),
                                    rng.random(n), bcdf, ocdf)
    assert abs(np.mean(b == 0) - 0.2) < 4 * np.sqrt(0.16 / n)
    # P(o=0) = 0.2*0.5 + 0.8*0.9
    assert abs(np.mean(o == 0) - 0.82) < 4 * np.sqrt(0.82 * 0.18 / n)


def test_sampler_skips_zero_probability_branches(backend):
    bcdf = np.array([[0.5, 0.5, 1.0]])
    ocdf = np.ones((1, 3, 2))
    u = np.linspace(0, 1, 1001, endpoint=False)
    b, _ = kernels.sample_two_stage(np.zeros_like(u, dtype=np.int64), u, u, bcdf, ocdf)
    assert not np.any(b == 1)


def test_shuffle_is_permutation(backend, rng):
    perm = kernels.shuffle_indices(rng.random(49))
    assert sorted(perm.tolist()) == list(range(50))
