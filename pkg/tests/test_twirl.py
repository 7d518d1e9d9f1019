import json

import numpy as np
import pytest

from bb84ent import states
from bb84ent.numeric import dagger
from bb84ent.twirl import (
    BellDiagonal,
    InvalidWeightsError,
    NotBellDiagonalError,
    bell_diagonal_of,
    group_elements,
    reconstruct,
    twirl,
    verify_symmetry_identities,
)
from bb84ent.witness import ppt_verdict_numeric

KET00 = states.pure([1, 0, 0, 0])


def test_twirl_fixed_points():
    phi = states.pure(states.PHI_PLUS)
    assert np.allclose(twirl(phi).mat, phi.mat, atol=1e-12)
    mixed = states.maximally_mixed()
    assert np.allclose(twirl(mixed).mat, mixed.mat, atol=1e-12)


def test_twirl_of_product_state():
    lam = bell_diagonal_of(twirl(KET00))
    assert np.allclose(lam.as_array(), [0.5, 0.25, 0.25, 0], atol=1e-12)
    assert np.allclose(reconstruct((0.5, 0.25, 0.25, 0)).mat, twirl(KET00).mat, atol=1e-12)


def test_bell_diagonal_of_examples():
    assert bell_diagonal_of(states.pure(states.PSI_MINUS)).to_json() == pytest.approx([0, 0, 0, 1])
    with pytest.raises(NotBellDiagonalError):
        bell_diagonal_of(KET00)


def test_reconstruct_examples():
    assert np.allclose(reconstruct((1, 0, 0, 0)).mat,
                       states.pure(states.PHI_PLUS).mat, atol=1e-15)
    assert np.allclose(reconstruct((0.25,) * 4).mat, np.eye(4) / 4, atol=1e-15)


def test_reconstruct_round_trip(rng):
    for _ in range(300):
        lam = BellDiagonal.from_sequence(rng.dirichlet(np.ones(4)))
        back = bell_diagonal_of(reconstruct(lam))
        assert np.max(np.abs(back.as_array() - lam.as_array())) < 1e-12


def test_weights_validation_and_clamping():
    lam = BellDiagonal(1.0, -5e-13, 0.0, 5e-13)
    assert lam.lam10 == 0.0
    with pytest.raises(InvalidWeightsError):
        BellDiagonal(1.1, -0.1, 0, 0)
    with pytest.raises(InvalidWeightsError):
        BellDiagonal(0.5, 0.2, 0.2, 0.2)
    with pytest.raises(InvalidWeightsError):
        BellDiagonal.from_sequence([0.5, 0.5])


def test_weights_json():
    lam = BellDiagonal(0.5, 0.25, 0.25, 0.0)
    assert BellDiagonal.from_json(json.dumps(lam.to_json())) == lam
    with pytest.raises(InvalidWeightsError):
        BellDiagonal.from_json('["a", 1, 0, 0]')


def test_group_elements():
    g, h = group_elements()
    for e in g + h:
        u = e.unitary
        assert np.allclose(dagger(u) @ u, np.eye(4), atol=1e-12)
    for e in g:
        assert np.array_equal(e.unitary, dagger(e.unitary))
    g3 = {e.name: e.unitary for e in g}["g3"]
    assert np.array_equal(g3, -np.kron(states.Y, states.Y))
    h1 = h[0].unitary
    assert np.allclose(h1 @ h1, np.eye(4), atol=1e-15)


def test_group_closure_up_to_phase():
    g, _ = group_elements()
    us = [e.unitary for e in g]
    for a in us:
        for b in us:
            prod = a @ b
            assert any(np.allclose(prod, s * u, atol=1e-12) for u in us for s in (1, -1))


def test_symmetry_identities():
    report = verify_symmetry_identities()
    assert len(report["cases"]) == 12
    assert report["max_deviation"] < 1e-12
    # X with b=0, l=0 sends |0><0| to |1><1|
    assert np.array_equal(states.X @ states.basis_projector(0, 0) @ states.X,
                          np.diag([0, 1]).astype(complex))
    # Z with b=1, l=0 sends H|0><0|H to H|1><1|H
    lhs = states.Z @ states.basis_projector(0, 1) @ states.Z
    assert np.allclose(lhs, states.basis_projector(1, 1), atol=1e-15)


def test_twirl_properties(rng):
    for _ in range(300):
        rho = states.random_density(rng)
        t = twirl(rho)
        assert abs(states.qber_of_state(rho) - states.qber_of_state(t)) < 1e-10
        lam = bell_diagonal_of(t, tol=1e-12)
        assert abs(lam.lam01 - lam.lam10) < 1e-12
        assert np.max(np.abs(twirl(t).mat - t.mat)) < 1e-12


def test_twirl_cannot_create_entanglement(rng):
    # entangled twirl output implies an entangled input
    hits = 0
    for _ in range(500):
        rho = states.random_density(rng)
        if ppt_verdict_numeric(twirl(rho)).entangled:
            hits += 1
            assert ppt_verdict_numeric(rho).entangled
    assert hits > 0
