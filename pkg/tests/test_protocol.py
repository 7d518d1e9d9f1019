import math

import numpy as np
import pytest
from scipy.stats import chisquare

from bb84ent import rng as rngmod
from bb84ent.channels import Depolarizing, Identity, InterceptResend, Pauli, SeparableSource
from bb84ent.protocol import (
    ABORT,
    PROCEED,
    ConfigError,
    Mode,
    ProtocolConfig,
    clopper_pearson,
    decide,
    random_permutation,
    run_entanglement_round,
    run_pm_round,
    run_round,
)


def eb(n, seed, **kw):
    return ProtocolConfig(num_pairs=n, mode="eb", seed=seed, **kw)


def pm(n, seed):
    return ProtocolConfig(num_pairs=n, mode="pm", seed=seed)


@pytest.mark.parametrize("seed", range(5))
def test_identity_is_error_free(seed, backend):
    s = run_entanglement_round(eb(2000, seed), Identity())
    assert s.errors == 0 and s.estimated_qber == 0.0 and s.decision == PROCEED
    assert s.checked == 1000 and all(c > 0 for c in s.per_basis_checked)
    s = run_pm_round(pm(2000, seed), Identity())
    assert s.errors == 0 and s.checked == s.sifted // 2


def test_depolarizing_round():
    s = run_entanglement_round(eb(20000, 7), Depolarizing(0.2))
    assert abs(s.estimated_qber - 0.1) <= 0.02
    assert s.decision == PROCEED


def test_intercept_resend_round():
    for seed in range(5):
        s = run_entanglement_round(eb(20000, seed), InterceptResend())
        assert abs(s.estimated_qber - 0.25) <= 0.025
        assert s.decision == decide(s.estimated_qber, eb(2, 0))


def test_pm_rounds():
    assert run_pm_round(pm(100_000, 1), Identity()).estimated_qber == 0.0
    assert abs(run_pm_round(pm(100_000, 1), Depolarizing(1.0)).estimated_qber - 0.5) <= 0.02
    assert abs(run_pm_round(pm(100_000, 1), InterceptResend()).estimated_qber - 0.25) <= 0.01


def test_pm_sifting_fraction():
    s = run_pm_round(pm(100_000, 3), Identity())
    assert abs(s.sifted / 100_000 - 0.5) < 0.01


def test_decide_examples():
    cfg = eb(2, 0)
    assert decide(0.10, cfg) == PROCEED
    assert decide(0.25, cfg) == ABORT
    assert decide(0.75, cfg) == ABORT
    assert decide(0.80, cfg) == PROCEED
    assert decide(None, cfg) == ABORT
    with pytest.raises(ValueError):
        decide(1.2, cfg)


def test_determinism(backend):
    a = run_entanglement_round(eb(5000, 99), Pauli(0.1, 0.1, 0.1))
    b = run_entanglement_round(eb(5000, 99), Pauli(0.1, 0.1, 0.1))
    c = run_entanglement_round(eb(5000, 100), Pauli(0.1, 0.1, 0.1))
    assert a == b and a != c


def test_backends_agree(backend, monkeypatch):
    from bb84ent import kernels

    got = run_pm_round(pm(4000, 5), InterceptResend())
    monkeypatch.setattr(kernels, "_impl", kernels.get_backend("python"))
    assert run_pm_round(pm(4000, 5), InterceptResend()) == got


@pytest.mark.parametrize("workers", [2, 3, 8])
def test_workers_do_not_change_result(workers):
    ch = Depolarizing(0.3)
    assert (run_entanglement_round(eb(10000, 4), ch, workers=workers)
            == run_entanglement_round(eb(10000, 4), ch))
    assert run_pm_round(pm(10000, 4), ch, workers=workers) == run_pm_round(pm(10000, 4), ch)


def test_item_uniforms_slice_consistency():
    full = rngmod.item_uniforms(11, rngmod.PAIR, 0, 100, 3)
    for lo, hi in [(0, 10), (10, 57), (57, 100), (33, 34)]:
        assert np.array_equal(rngmod.item_uniforms(11, rngmod.PAIR, lo, hi, 3), full[lo:hi])
    full5 = rngmod.item_uniforms(11, rngmod.QUBIT, 0, 50, 5)
    assert np.array_equal(rngmod.item_uniforms(11, rngmod.QUBIT, 20, 50, 5), full5[20:])


def test_streams_are_independent():
    a = rngmod.flat_uniforms(1, rngmod.PAIR, 1000)
    b = rngmod.flat_uniforms(1, rngmod.PERMUTATION, 1000)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.1


def test_permutation_uniformity():
    # 1e4 shuffles of 8 elements: position of each element is uniform
    counts = np.zeros((8, 8))
    for seed in range(10_000):
        p = random_permutation(seed, rngmod.PERMUTATION, 8)
        assert sorted(p) == list(range(8))
        counts[np.arange(8), p] += 1
    for row in counts:
        assert chisquare(row).pvalue > 0.001
    _, pval = chisquare(counts.ravel())
    assert pval > 0.001


def test_config_validation():
    for bad in [dict(num_pairs=3), dict(num_pairs=0), dict(num_pairs=True),
                dict(num_pairs=10, mode="xx"), dict(num_pairs=10, seed=-1),
                dict(num_pairs=10, seed=2**64), dict(num_pairs=10, decision_low=0.8)]:
        with pytest.raises(ConfigError):
            ProtocolConfig(**bad)
    cfg = ProtocolConfig(num_pairs=10, mode="pm", seed=2**64 - 1)
    assert cfg.mode is Mode.PREPARE_AND_MEASURE
    assert cfg.to_json()["mode"] == "pm"
    with pytest.raises(ConfigError):
        run_entanglement_round(cfg, Identity())
    with pytest.raises(ConfigError):
        run_pm_round(pm(10, 0), "identity")


def test_run_round_dispatch_and_json():
    s = run_round(pm(1000, 2), Identity(), confidence=True)
    j = s.to_json()
    assert j["mode"] == "pm" and j["channel"] == {"kind": "identity"}
    assert j["confidence_interval"][0] == 0.0


def test_clopper_pearson():
    lo, hi = clopper_pearson(0, 10)
    assert lo == 0.0 and hi == pytest.approx(1 - 0.025 ** 0.1, rel=1e-9)
    lo, hi = clopper_pearson(10, 10)
    assert hi == 1.0 and lo == pytest.approx(0.025 ** 0.1, rel=1e-9)
    lo, hi = clopper_pearson(250, 1000)
    assert lo < 0.25 < hi and hi - lo < 0.06
    assert clopper_pearson(0, 0) == (0.0, 1.0)


@pytest.mark.slow
@pytest.mark.parametrize("ch,q", [(Identity(), 0.0), (Depolarizing(0.2), 0.1),
                                  (InterceptResend(), 0.25), (Pauli(0.05, 0.0, 0.1), 0.075),
                                  (SeparableSource(0.4), 0.4)],
                         ids=lambda x: x.kind if hasattr(x, "kind") else str(x))
def test_mean_over_seeds(ch, q):
    n = 2000
    est = [run_entanglement_round(eb(n, s), ch).estimated_qber for s in range(200)]
    se = math.sqrt(q * (1 - q) / (n // 2) / 200)
    assert abs(np.mean(est) - q) <= 4 * se
