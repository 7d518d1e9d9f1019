"""Round-level simulation of the entanglement-based and prepare-and-measure protocols.

Per-pair (or per-qubit) randomness is drawn from counter-based streams
indexed by the original item number, so chunked or threaded evaluation gives
bit-identical summaries. The inner sampling loop runs in the compiled
kernel when available.
"""
import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels, rng, states
from .channels import AttackChannel

PROCEED = "Proceed"
ABORT = "Abort"


class Mode(str, enum.Enum):
    ENTANGLEMENT_BASED = "eb"
    PREPARE_AND_MEASURE = "pm"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ProtocolConfig:
    num_pairs: int
    mode: Mode = Mode.ENTANGLEMENT_BASED
    seed: int = 0
    decision_low: float = 0.25
    decision_high: float = 0.75

    def __post_init__(self):
        try:
            object.__setattr__(self, "mode", Mode(self.mode))
        except ValueError:
            raise ConfigError(f"unknown mode {self.mode!r}") from None
        n = self.num_pairs
        if isinstance(n, bool) or int(n) != n or n < 2 or n % 2:
            raise ConfigError(f"num_pairs must be an even integer >= 2, got {n}")
        object.__setattr__(self, "num_pairs", int(n))
        try:
            object.__setattr__(self, "seed", rng.check_seed(self.seed))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        if not (0.0 <= self.decision_low < self.decision_high <= 1.0):
            raise ConfigError("need 0 <= decision_low < decision_high <= 1")

    def to_json(self):
        d = asdict(self)
        d["mode"] = self.mode.value
        return d


@dataclass(frozen=True)
class RunSummary:
    mode: str
    num_pairs: int
    seed: int
    channel: dict
    checked: int
    errors: int
    estimated_qber: float | None
    per_basis_errors: tuple
    per_basis_checked: tuple
    decision: str
    sifted: int | None = None
    confidence_interval: tuple | None = None

    def to_json(self):
        d = asdict(self)
        d["per_basis_errors"] = list(self.per_basis_errors)
        d["per_basis_checked"] = list(self.per_basis_checked)
        if self.confidence_interval is not None:
            d["confidence_interval"] = list(self.confidence_interval)
        return d


def decide(q, cfg):
    """Abort on the closed interval ``[decision_low, decision_high]``."""
    if q is None:
        return ABORT
    if not (0.0 <= q <= 1.0):
        raise ValueError(f"QBER must lie in [0, 1], got {q}")
    return ABORT if cfg.decision_low <= q <= cfg.decision_high else PROCEED


def clopper_pearson(errors, checked, level=0.95):
    from scipy.stats import beta

    if checked == 0:
        return (0.0, 1.0)
    a = 1.0 - level
    lo = 0.0 if errors == 0 else float(beta.ppf(a / 2, errors, checked - errors + 1))
    hi = 1.0 if errors == checked else float(beta.ppf(1 - a / 2, errors + 1, checked - errors))
    return (lo, hi)


def _cdf(p):
    """Cumulative table with the top pinned to 1 from the last non-zero entry on."""
    p = np.clip(np.asarray(p, dtype=np.float64), 0.0, None)
    total = p.sum()
    if total <= 0.0:
        out = np.ones_like(p)
        return out
    c = np.cumsum(p) / total
    last = int(np.nonzero(p)[0][-1])
    c[last:] = 1.0
    return c


def _tables(branch_vectors, measure):
    """Build ``(branch_cdf, out_cdf)`` from per-condition post-branch vectors.

    ``branch_vectors[c][k]`` is the unnormalised state after Kraus branch
    ``k`` under condition ``c``; ``measure(c, v)`` returns outcome weights.
    """
    nc = len(branch_vectors)
    nb = len(branch_vectors[0])
    no = len(measure(0, branch_vectors[0][0]))
    bcdf = np.empty((nc, nb))
    ocdf = np.ones((nc, nb, no))
    for c in range(nc):
        probs = np.array([np.vdot(v, v).real for v in branch_vectors[c]])
        bcdf[c] = _cdf(probs)
        for k, v in enumerate(branch_vectors[c]):
            if probs[k] > 0.0:
                ocdf[c, k] = _cdf(measure(c, v))
    return bcdf, ocdf


def eb_tables(ch):
    """Branch / outcome tables for one pair, conditioned on Alice's mask bit.

    The pair starts in phi+, Alice applies ``H^m`` to the transmitted half,
    the channel acts on it, Bob undoes ``H^m`` and both measure Z. Outcome
    index is ``2 * a + b``.
    """
    vecs = []
    for m in (0, 1):
        hm = states.hadamard_power(m)
        psi = np.kron(states.I2, hm) @ states.PHI_PLUS
        vecs.append([np.kron(states.I2, hm @ k) @ psi for k in ch.kraus_operators()])
    return _tables(vecs, lambda c, v: np.abs(v) ** 2)


def pm_conditions():
    """Condition index ``4*l + 2*b + b_bob`` -> (l, b, b_bob)."""
    return [(l, b, bb) for l in (0, 1) for b in (0, 1) for bb in (0, 1)]


def pm_tables(ch):
    """Tables for one qubit: Alice sends ``H^b|l>``, Bob measures in basis ``b_bob``."""
    conds = pm_conditions()
    vecs = []
    for l, b, _ in conds:
        ket = states.hadamard_power(b) @ (states.KET0, states.KET1)[l]
        vecs.append([k @ ket for k in ch.kraus_operators()])

    def measure(c, v):
        bb = conds[c][2]
        return np.abs(states.hadamard_power(bb) @ v) ** 2

    return _tables(vecs, measure)


def _sample(cond, ub, uo, tables, workers):
    bcdf, ocdf = tables
    n = len(cond)
    if workers <= 1 or n < 2 * workers:
        return kernels.sample_two_stage(cond, ub, uo, bcdf, ocdf)[1]
    bounds = np.linspace(0, n, workers + 1).astype(int)
    with ThreadPoolExecutor(workers) as ex:
        parts = list(ex.map(
            lambda ab: kernels.sample_two_stage(
                cond[ab[0]:ab[1]], ub[ab[0]:ab[1]], uo[ab[0]:ab[1]], bcdf, ocdf)[1],
            zip(bounds[:-1], bounds[1:])))
    return np.concatenate(parts)


def _check_inputs(cfg, ch, mode):
    if not isinstance(cfg, ProtocolConfig):
        raise ConfigError("cfg must be a ProtocolConfig")
    if cfg.mode is not mode:
        raise ConfigError(f"config mode is {cfg.mode.value}, expected {mode.value}")
    if not isinstance(ch, AttackChannel):
        raise ConfigError("ch must be an AttackChannel")


def _summary(cfg, ch, errors_by_basis, checked_by_basis, confidence, sifted=None):
    checked = int(sum(checked_by_basis))
    errors = int(sum(errors_by_basis))
    q = errors / checked if checked else None
    ci = clopper_pearson(errors, checked) if confidence else None
    return RunSummary(
        mode=cfg.mode.value, num_pairs=cfg.num_pairs, seed=cfg.seed,
        channel=ch.to_json(), checked=checked, errors=errors, estimated_qber=q,
        per_basis_errors=tuple(int(e) for e in errors_by_basis),
        per_basis_checked=tuple(int(c) for c in checked_by_basis),
        decision=decide(q, cfg), sifted=sifted, confidence_interval=ci)


def random_permutation(seed, stream, n):
    if n <= 1:
        return np.zeros(n, dtype=np.int64)
    return kernels.shuffle_indices(rng.flat_uniforms(seed, stream, n - 1))


def run_entanglement_round(cfg, ch, *, confidence=False, workers=1):
    """Simulate one verification round of the entanglement-based protocol.

    Steps: phi+ source, random Hadamard mask on the transmitted half, channel,
    mask reversal, seeded uniform shuffle; the first half of the shuffled
    pairs are the check pairs, measured in Z by Born-rule sampling.
    """
    _check_inputs(cfg, ch, Mode.ENTANGLEMENT_BASED)
    n2 = cfg.num_pairs
    u = rng.item_uniforms(cfg.seed, rng.PAIR, 0, n2, 3)
    mask = (u[:, 0] < 0.5).astype(np.int64)
    perm = random_permutation(cfg.seed, rng.PERMUTATION, n2)
    check = perm[: n2 // 2]
    cond = mask[check]
    outcome = _sample(cond, u[check, 1], u[check, 2], eb_tables(ch), workers)
    err = (outcome // 2) != (outcome % 2)
    errors_by_basis = [int(np.sum(err & (cond == b))) for b in (0, 1)]
    checked_by_basis = [int(np.sum(cond == b)) for b in (0, 1)]
    return _summary(cfg, ch, errors_by_basis, checked_by_basis, confidence)


def run_pm_round(cfg, ch, *, confidence=False, workers=1):
    """Simulate one prepare-and-measure round over ``cfg.num_pairs`` raw qubits.

    Alice draws a bit and basis, Bob a basis; positions with matching bases
    form the sifted key, and a random half of it is disclosed to estimate
    the QBER.
    """
    _check_inputs(cfg, ch, Mode.PREPARE_AND_MEASURE)
    n = cfg.num_pairs
    u = rng.item_uniforms(cfg.seed, rng.QUBIT, 0, n, 5)
    bit = (u[:, 0] < 0.5).astype(np.int64)
    basis = (u[:, 1] < 0.5).astype(np.int64)
    bob_basis = (u[:, 2] < 0.5).astype(np.int64)
    cond = 4 * bit + 2 * basis + bob_basis
    bob_bit = _sample(cond, u[:, 3], u[:, 4], pm_tables(ch), workers)
    sifted = np.nonzero(basis == bob_basis)[0]
    order = random_permutation(cfg.seed, rng.SAMPLE, len(sifted))
    sample = sifted[order[: len(sifted) // 2]]
    err = bit[sample] != bob_bit[sample]
    sb = basis[sample]
    errors_by_basis = [int(np.sum(err & (sb == b))) for b in (0, 1)]
    checked_by_basis = [int(np.sum(sb == b)) for b in (0, 1)]
    return _summary(cfg, ch, errors_by_basis, checked_by_basis, confidence,
                    sifted=int(len(sifted)))


def run_round(cfg, ch, **kwargs):
    if cfg.mode is Mode.ENTANGLEMENT_BASED:
        return run_entanglement_round(cfg, ch, **kwargs)
    return run_pm_round(cfg, ch, **kwargs)

