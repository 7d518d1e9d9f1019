"""Deterministic internal consistency report used by ``bb84ent selfcheck``."""
import numpy as np

from . import states
from .numeric import dagger
from .twirl import BellDiagonal, reconstruct, twirl, twirled_weights, verify_symmetry_identities
from .witness import ppt_verdict_bell, ppt_verdict_numeric

IDENTITY_TOL = 1e-12
QBER_TOL = 1e-10
SAMPLE_SEED = 20061015


def random_weights(rng, symmetric=False):
    w = rng.dirichlet(np.ones(3 if symmetric else 4))
    if symmetric:
        # (lam00, lam10 = lam01, lam11): split the middle draw evenly
        w = np.array([w[0], w[1] / 2.0, w[1] / 2.0, w[2]])
    w[-1] = 1.0 - w[:-1].sum()
    return BellDiagonal.from_sequence(np.clip(w, 0.0, None))


def constant_defects():
    """Max deviations of the operator constants from their defining relations."""
    H, X, Y, Z, I2 = states.H, states.X, states.Y, states.Z, states.I2

    def dev(a, b):
        return float(np.max(np.abs(a - b)))

    bell = np.column_stack(states.BELL_STATES)
    return {
        "H^2 = I": dev(H @ H, I2),
        "H unitary": dev(dagger(H) @ H, I2),
        "H Z H = X": dev(H @ Z @ H, X),
        "Paulis square to I": max(dev(P @ P, I2) for P in (X, Y, Z)),
        "XZ = -iY": dev(X @ Z, -1j * Y),
        "Bell basis orthonormal": dev(dagger(bell) @ bell, states.I4),
        "phi+ = (|00>+|11>)/sqrt2": dev(states.PHI_PLUS,
                                       np.array([1, 0, 0, 1]) / np.sqrt(2.0)),
    }


def run_selfcheck(n_states=200, n_weights=2000, seed=SAMPLE_SEED):
    """Run all checks; returns ``(ok, lines)`` with one report line per check."""
    rng = np.random.default_rng(seed)
    results = []

    for name, d in constant_defects().items():
        results.append((f"constant {name}", d, d < IDENTITY_TOL))

    ident = verify_symmetry_identities()
    for c in ident["cases"]:
        label = f"identity {c['op']} b={c['b']} l={c['l']}"
        results.append((label, c["deviation"], c["deviation"] < IDENTITY_TOL))

    try:
        worst_q = worst_sym = worst_idem = 0.0
        for _ in range(n_states):
            rho = states.random_density(rng)
            t = twirl(rho)
            worst_q = max(worst_q, abs(states.qber_of_state(rho) - states.qber_of_state(t)))
            lam = twirled_weights(rho)
            worst_sym = max(worst_sym, abs(lam.lam01 - lam.lam10))
            worst_idem = max(worst_idem, float(np.max(np.abs(twirl(t).mat - t.mat))))
        results.append(("twirl preserves QBER", worst_q, worst_q < QBER_TOL))
        results.append(("twirl lam01 = lam10", worst_sym, worst_sym < IDENTITY_TOL))
        results.append(("twirl idempotent", worst_idem, worst_idem < IDENTITY_TOL))
    except ValueError as exc:
        # a broken constant can make the twirl leave the state space
        results.append((f"twirl ({exc})", float("nan"), False))

    mismatches = 0
    try:
        for i in range(n_weights):
            lam = random_weights(rng, symmetric=bool(i % 2))
            if ppt_verdict_bell(lam).verdict != ppt_verdict_numeric(reconstruct(lam)).verdict:
                mismatches += 1
        results.append(("closed-form vs numeric PPT mismatches", float(mismatches),
                        mismatches == 0))
    except ValueError as exc:
        results.append((f"closed-form vs numeric PPT ({exc})", float("nan"), False))

    lines = [f"{'PASS' if ok else 'FAIL'}  {name}: {val:.3e}" for name, val, ok in results]
    return all(ok for _, _, ok in results), lines
