"""Two-to-one recurrence purification on Bell-diagonal weights.

This is the recurrence with bilateral sector rotations,
written on the weights. With ``A, B, C, E`` the weights of phi+, psi-, psi+
and phi-::

    N  = (A + B)^2 + (C + E)^2
    A' = (A^2 + B^2) / N      B' = 2 C E / N
    C' = (C^2 + E^2) / N      E' = 2 A B / N

``N`` is the probability that the round succeeds.
"""
from dataclasses import dataclass, field

from .twirl import BellDiagonal

# (I (x) XZ) swaps phi+ <-> psi- and phi- <-> psi+
_RELABEL = (3, 2, 1, 0)


class NonDistillableError(ValueError):
    pass


class DegenerateInputError(ValueError):
    pass


def _as_weights(lam):
    if not isinstance(lam, BellDiagonal):
        lam = BellDiagonal.from_sequence(lam)
    return lam


def epp_step(lam):
    """One recurrence round. Returns ``(new_weights, success_probability)``."""
    lam = _as_weights(lam)
    A, E, C, B = lam.lam00, lam.lam10, lam.lam01, lam.lam11
    N = (A + B) ** 2 + (C + E) ** 2
    if N <= 0.0:
        raise DegenerateInputError("success probability is zero")
    new = BellDiagonal(
        lam00=(A * A + B * B) / N,
        lam10=2.0 * A * B / N,
        lam01=(C * C + E * E) / N,
        lam11=2.0 * C * E / N,
    )
    return new, N


def werner_step(F):
    """Closed-form single-round fidelity for a Werner input of fidelity ``F``.

    Returns ``(F', success_probability)``.
    """
    r = 1.0 - F
    num = F * F + r * r / 9.0
    den = F * F + 2.0 * F * r / 3.0 + 5.0 * r * r / 9.0
    return num / den, den


def werner(F):
    r = (1.0 - F) / 3.0
    return BellDiagonal(F, r, r, r)


@dataclass
class EppState:
    lam: BellDiagonal
    rounds: int = 0
    cumulative_yield: float = 1.0
    target: str = "phi+"
    converged: bool = False
    history: list = field(default_factory=list)

    @property
    def fidelity(self):
        return self.lam.lam00 if self.target == "phi+" else self.lam.lam11


def _relabel(lam):
    w = lam.as_array()
    return BellDiagonal.from_sequence(w[list(_RELABEL)])


def purify_until(lam, target_fidelity, max_rounds):
    """Iterate :func:`epp_step` until the target Bell weight reaches ``target_fidelity``.

    Purifies towards phi+ when its weight exceeds 1/2, otherwise towards
    psi- when that weight exceeds 1/2 (by relabelling sectors with the local
    ``I (x) XZ`` before iterating). ``history`` holds one
    ``(round, weights, p_success, cumulative_yield)`` entry per round,
    round 0 being the input; weights are in the original labelling.
    """
    if not (0.5 < target_fidelity < 1.0):
        raise ValueError(f"target fidelity must lie in (1/2, 1), got {target_fidelity}")
    if int(max_rounds) != max_rounds or max_rounds < 0:
        raise ValueError("max_rounds must be a non-negative integer")
    lam = _as_weights(lam)
    if lam.lam00 > 0.5:
        target, work = "phi+", lam
    elif lam.lam11 > 0.5:
        target, work = "psi-", _relabel(lam)
    else:
        raise NonDistillableError(
            f"neither phi+ ({lam.lam00:.6g}) nor psi- ({lam.lam11:.6g}) weight exceeds 1/2")

    def outside(w):
        return w if target == "phi+" else _relabel(w)

    state = EppState(lam=lam, target=target)
    state.history.append((0, lam, 1.0, 1.0))
    while work.lam00 < target_fidelity and state.rounds < max_rounds:
        work, p = epp_step(work)
        state.rounds += 1
        state.cumulative_yield *= p / 2.0
        state.lam = outside(work)
        state.history.append((state.rounds, state.lam, p, state.cumulative_yield))
    state.converged = work.lam00 >= target_fidelity
    return state
