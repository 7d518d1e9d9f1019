"""Partial-transpose separability tests and the (D, G) threshold region.

For the group-invariant family the free parameters are the QBER ``D`` and
``G = lam00 - lam10``. The implied weights are::

    lam00 = (1 - D + G) / 2
    lam10 = lam01 = (1 - D - G) / 2
    lam11 = (3D + G - 1) / 2
"""
import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import states
from .numeric import PSD_TOL, hermitian_eigenvalues, hermitian_eigenvalues_batch, partial_transpose_b
from .twirl import (
    BellDiagonal,
    NotBellDiagonalError,
    WEIGHT_TOL,
    bell_diagonal_of,
    reconstruct,
)

ENTANGLED = "Entangled"
SEPARABLE = "Separable"
INFEASIBLE = "Infeasible"

SLACK_TOL = 1e-12
CSV_HEADER = ("D", "G", "verdict", "min_pt_eig", "slack13", "slack14")


class OutOfRangeError(ValueError):
    pass


@dataclass(frozen=True)
class SeparabilityVerdict:
    verdict: str
    min_pt_eigenvalue: float | None
    inequality_slacks: tuple | None

    @property
    def entangled(self):
        return self.verdict == ENTANGLED

    def to_json(self):
        return {
            "verdict": self.verdict,
            "min_pt_eigenvalue": self.min_pt_eigenvalue,
            "inequality_slacks": (list(self.inequality_slacks)
                                  if self.inequality_slacks is not None else None),
        }


@dataclass(frozen=True)
class RegionPoint:
    D: float
    G: float

    def weights(self):
        """Implied ``(lam00, lam10, lam01, lam11)``; may contain negatives."""
        D, G = self.D, self.G
        side = (1.0 - D - G) / 2.0
        return ((1.0 - D + G) / 2.0, side, side, (3.0 * D + G - 1.0) / 2.0)

    @property
    def feasible(self):
        return min(self.weights()) >= -WEIGHT_TOL


def pt_slacks(lam):
    """Slacks of the two partial-transpose inequalities.

    ``lam01 + lam11 - |lam00 - lam10|`` and ``lam00 + lam10 - |lam01 - lam11|``.
    """
    l00, l10, l01, l11 = lam
    return (l01 + l11 - abs(l00 - l10), l00 + l10 - abs(l01 - l11))


def ppt_verdict_numeric(rho):
    """Peres-Horodecki verdict from the spectrum of the partial transpose.

    Slacks are reported only when ``rho`` is Bell-diagonal; for other states
    the closed-form inequalities do not apply and ``inequality_slacks`` is None.
    """
    rho = states.as_density(rho)
    if rho.dim != 4:
        raise states.InvalidStateError("expected a two-qubit state")
    lo = float(hermitian_eigenvalues(partial_transpose_b(rho.mat))[0])
    try:
        slacks = pt_slacks(bell_diagonal_of(rho).as_array())
    except NotBellDiagonalError:
        slacks = None
    return SeparabilityVerdict(ENTANGLED if lo < PSD_TOL else SEPARABLE, lo, slacks)


def ppt_verdict_bell(lam):
    """Closed-form verdict for a Bell-diagonal state.

    The partial transpose of a Bell-diagonal state has spectrum
    ``1/2 - lam_i``, so the reported minimum eigenvalue is ``1/2 - max(lam)``.
    """
    if not isinstance(lam, BellDiagonal):
        lam = BellDiagonal.from_sequence(lam)
    w = lam.as_array()
    s13, s14 = pt_slacks(w)
    sep = s13 >= -SLACK_TOL and s14 >= -SLACK_TOL
    return SeparabilityVerdict(SEPARABLE if sep else ENTANGLED,
                               0.5 - float(w.max()), (s13, s14))


def separable_by_max_weight(lam):
    if not isinstance(lam, BellDiagonal):
        lam = BellDiagonal.from_sequence(lam)
    return float(lam.as_array().max()) <= 0.5 + SLACK_TOL


def classify_region(p):
    w = p.weights()
    if min(w) < -WEIGHT_TOL:
        return SeparabilityVerdict(INFEASIBLE, None, pt_slacks(w))
    return ppt_verdict_bell(BellDiagonal.from_sequence(w))


def separable_region_closed_form(D, G):
    """Feasible and separable iff ``D >= |G|`` and ``1 - D >= |1 - 2D - G|``."""
    p = RegionPoint(D, G)
    return (p.feasible and D - abs(G) >= -SLACK_TOL
            and (1.0 - D) - abs(1.0 - 2.0 * D - G) >= -SLACK_TOL)


def _sigma_low(D):
    ket = (states.KET0, states.KET1)
    out = (4.0 * D - 1.0) * states.I4 / 4.0
    bracket = np.zeros((4, 4), dtype=np.complex128)
    for k in (0, 1):
        pk = np.outer(ket[k], ket[k])
        bracket += 0.5 * np.kron(pk, pk)
        tilde = 0.5 * (np.outer(ket[0], ket[k]) + np.outer(ket[1], ket[1 ^ k]))
        bracket += np.kron(tilde, tilde)
    return out + abs(1.0 - 2.0 * D) * bracket


REFLECTION = np.kron(np.eye(2), np.array([[0, -1j], [1j, 0]]))  # I (x) Y


def separable_family(D):
    """The separable two-qubit state with QBER ``D``, for ``1/4 <= D <= 3/4``.

    Above ``D = 1/2`` the state is ``(I (x) Y) sigma(1 - D) (I (x) Y)``; the
    Y flip inverts both Z- and X-basis outcomes on Bob's side, so it sends
    QBER ``q`` to ``1 - q`` and keeps the state separable.
    """
    D = float(D)
    if not (0.25 - 1e-15 <= D <= 0.75 + 1e-15):
        raise OutOfRangeError(f"separable family is defined for 1/4 <= D <= 3/4, got {D}")
    if D <= 0.5:
        m = _sigma_low(D)
    else:
        m = REFLECTION @ _sigma_low(1.0 - D) @ REFLECTION.conj().T
    return states.DensityOperator(0.5 * (m + m.conj().T))


def grid_axis(lo, hi, step, extra=()):
    n = int(math.floor((hi - lo) / step + 1e-9))
    vals = {round(lo + i * step, 12) for i in range(n + 1)}
    vals.add(round(hi, 12))
    vals.update(round(v, 12) for v in extra if lo <= v <= hi)
    return np.array(sorted(vals))


def _bell_projectors():
    return np.stack([np.outer(v, v.conj()) for v in states.BELL_STATES])


def numeric_min_pt_eigenvalues(weights):
    """Batched numeric oracle: min eigenvalue of PT(reconstruct(lam)) per row."""
    weights = np.asarray(weights, dtype=np.float64)
    if weights.size == 0:
        return np.zeros(0)
    rho = np.einsum("ni,ijk->njk", weights.astype(np.complex128), _bell_projectors())
    pt = rho.reshape(-1, 2, 2, 2, 2).transpose(0, 1, 4, 3, 2).reshape(-1, 4, 4)
    return hermitian_eigenvalues_batch(np.ascontiguousarray(pt))[:, 0]


@dataclass
class ScanResult:
    step: float
    D: np.ndarray
    G: np.ndarray
    verdict: list
    min_pt_eig: np.ndarray
    slack13: np.ndarray
    slack14: np.ndarray
    numeric_verdict: list
    checks: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(self.checks.values())

    def rows(self):
        for i in range(len(self.D)):
            yield (self.D[i], self.G[i], self.verdict[i], self.min_pt_eig[i],
                   self.slack13[i], self.slack14[i])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for D, G, v, e, s13, s14 in self.rows():
            w.writerow((_fmt(D), _fmt(G), v, _fmt(e), _fmt(s13), _fmt(s14)))
        return buf.getvalue()


def _fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if x == 0.0:
        x = 0.0  # drop the sign of -0.0
    return f"{x:.9g}"


def threshold_scan(step):
    """Classify every (D, G) grid point and check the threshold statements.

    Rows are ordered by D then G. ``checks`` holds:

    ``low_high_entangled``
        every feasible point with ``D < 1/4 - step`` or ``D > 3/4 + step`` is
        entangled;
    ``below_quarter_entangled``
        every feasible point with ``D < 1/4`` is entangled;
    ``separable_in_band``
        each grid ``D`` in ``[1/4, 3/4]`` has a separable point;
    ``closed_form_matches_numeric``
        closed-form and partial-transpose-spectrum verdicts agree everywhere;
    ``mirror_symmetric``
        separable counts at ``D`` and ``1 - D`` coincide.
    """
    if not (0.0 < step <= 0.01):
        raise OutOfRangeError(f"step must lie in (0, 0.01], got {step}")
    d_axis = grid_axis(0.0, 1.0, step, extra=(0.25, 0.5, 0.75))
    g_axis = grid_axis(-1.0, 1.0, step)
    DD, GG = np.meshgrid(d_axis, g_axis, indexing="ij")
    D = DD.ravel()
    G = GG.ravel()
    side = (1.0 - D - G) / 2.0
    W = np.column_stack(((1.0 - D + G) / 2.0, side, side, (3.0 * D + G - 1.0) / 2.0))
    feasible = W.min(axis=1) >= -WEIGHT_TOL
    Wc = np.clip(W, 0.0, None)

    slack13 = W[:, 2] + W[:, 3] - np.abs(W[:, 0] - W[:, 1])
    slack14 = W[:, 0] + W[:, 1] - np.abs(W[:, 2] - W[:, 3])
    closed_sep = (slack13 >= -SLACK_TOL) & (slack14 >= -SLACK_TOL)

    min_eig = np.full(D.shape, np.nan)
    min_eig[feasible] = numeric_min_pt_eigenvalues(Wc[feasible])
    numeric_sep = min_eig >= PSD_TOL

    verdict = np.where(~feasible, INFEASIBLE,
                       np.where(closed_sep, SEPARABLE, ENTANGLED)).tolist()
    numeric_verdict = np.where(~feasible, INFEASIBLE,
                               np.where(numeric_sep, SEPARABLE, ENTANGLED)).tolist()

    res = ScanResult(step, D, G, verdict, min_eig, slack13, slack14, numeric_verdict)

    ent = np.array([v == ENTANGLED for v in verdict])
    sep = np.array([v == SEPARABLE for v in verdict])
    outer = feasible & ((D < 0.25 - step) | (D > 0.75 + step))
    below = feasible & (D < 0.25)
    res.checks["low_high_entangled"] = bool(np.all(ent[outer]))
    res.checks["below_quarter_entangled"] = bool(np.all(ent[below]))
    band = d_axis[(d_axis >= 0.25) & (d_axis <= 0.75)]
    res.checks["separable_in_band"] = bool(all(np.any(sep & (D == d)) for d in band))
    res.checks["closed_form_matches_numeric"] = verdict == numeric_verdict
    counts = {d: int(np.sum(sep & (D == d))) for d in d_axis}
    mirror = True
    for d in d_axis:
        m = round(1.0 - d, 12)
        if m in counts and counts[m] != counts[d]:
            mirror = False
    res.checks["mirror_symmetric"] = mirror
    return res
