"""Pure-Python implementations of the hot kernels.

These mirror ``_ckernels.pyx`` line for line and are used whenever the
compiled extension is unavailable (or ``BB84ENT_PURE=1`` is set). Both
backends consume identical inputs and must return bit-identical integer
outputs; eigenvalues agree to rounding.
"""
import math

import numpy as np


def _jacobi_one(a, n, tol, max_sweeps):
    # a: list of lists of complex, modified in place
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    z = a[p][q]
                    off += z.real * z.real + z.imag * z.imag
        if math.sqrt(off) < tol:
            return sorted(a[i][i].real for i in range(n)), sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq / r  # e^{i phi}
                app = a[p][p].real
                aqq = a[q][q].real
                theta = (aqq - app) / (2.0 * r)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                conj_phase = phase.conjugate()
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp = a[k][p]
                    akq = a[k][q] * conj_phase
                    new_kp = c * akp - s * akq
                    new_kq = s * akp + c * akq
                    a[k][p] = new_kp
                    a[p][k] = new_kp.conjugate()
                    a[k][q] = new_kq
                    a[q][k] = new_kq.conjugate()
                a[p][p] = complex(app - t * r, 0.0)
                a[q][q] = complex(aqq + t * r, 0.0)
                a[p][q] = 0j
                a[q][p] = 0j
    return None, -1


def jacobi_eigvalsh_batch(mats, tol, max_sweeps):
    """Cyclic complex Jacobi on a stack of Hermitian matrices.

    Returns ``(eigs, sweeps)``; ``sweeps[i] == -1`` marks non-convergence.
    """
    mats = np.asarray(mats, dtype=np.complex128)
    m, n, _ = mats.shape
    eigs = np.zeros((m, n))
    sweeps = np.zeros(m, dtype=np.int64)
    for i in range(m):
        a = [[complex(x) for x in row] for row in mats[i]]
        # Hermitian part only; the wrapper has already checked the tolerance
        for p in range(n):
            a[p][p] = complex(a[p][p].real, 0.0)
            for q in range(p + 1, n):
                a[q][p] = a[p][q].conjugate()
        vals, k = _jacobi_one(a, n, tol, max_sweeps)
        sweeps[i] = k
        if vals is not None:
            eigs[i] = vals
    return eigs, sweeps


def sample_two_stage(cond, u_branch, u_out, branch_cdf, out_cdf):
    """Draw a branch, then an outcome, from conditional cumulative tables.

    ``branch_cdf[c, k]`` is the cumulative branch probability for condition
    ``c``; ``out_cdf[c, k, o]`` the cumulative outcome probability given the
    branch. The last entry of every cdf row is treated as 1.
    """
    cond = np.asarray(cond, dtype=np.int64)
    n = cond.shape[0]
    nb = branch_cdf.shape[1]
    no = out_cdf.shape[2]
    branch = np.empty(n, dtype=np.int64)
    outcome = np.empty(n, dtype=np.int64)
    bcdf = branch_cdf.tolist()
    ocdf = out_cdf.tolist()
    ub = u_branch.tolist()
    uo = u_out.tolist()
    cl = cond.tolist()
    for i in range(n):
        c = cl[i]
        row = bcdf[c]
        k = 0
        while k < nb - 1 and ub[i] >= row[k]:
            k += 1
        orow = ocdf[c][k]
        o = 0
        while o < no - 1 and uo[i] >= orow[o]:
            o += 1
        branch[i] = k
        outcome[i] = o
    return branch, outcome


def shuffle_indices(u):
    """Fisher-Yates permutation of ``range(len(u) + 1)`` driven by uniforms."""
    u = np.asarray(u, dtype=np.float64)
    n = u.shape[0] + 1
    perm = list(range(n))
    ul = u.tolist()
    for i in range(n - 1, 0, -1):
        j = int(ul[n - 1 - i] * (i + 1))
        if j > i:
            j = i
        perm[i], perm[j] = perm[j], perm[i]
    return np.array(perm, dtype=np.int64)
