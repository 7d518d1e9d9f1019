# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


cdef double complex _conj(double complex z) nogil:
    return z.real - 1j * z.imag


cdef int _jacobi_one(double complex[:, ::1] a, int n, double tol,
                     int max_sweeps) noexcept nogil:
    cdef int sweep, p, q, k
    cdef double off, r, app, aqq, theta, t, c, s
    cdef double complex apq, phase, cphase, akp, akq, new_kp, new_kq
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
        if sqrt(off) < tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if r == 0.0:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                if fabs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                cphase = _conj(phase)
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp = a[k, p]
                    akq = a[k, q] * cphase
                    new_kp = c * akp - s * akq
                    new_kq = s * akp + c * akq
                    a[k, p] = new_kp
                    a[p, k] = _conj(new_kp)
                    a[k, q] = new_kq
                    a[q, k] = _conj(new_kq)
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                a[p, q] = 0
                a[q, p] = 0
    return -1


def jacobi_eigvalsh_batch(mats, double tol, int max_sweeps):
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] src = np.ascontiguousarray(
        mats, dtype=np.complex128)
    cdef Py_ssize_t m = src.shape[0]
    cdef int n = <int>src.shape[1]
    cdef double[:, ::1] eigs = np.zeros((m, n))
    cdef long long[::1] sweeps = np.zeros(m, dtype=np.int64)
    cdef double complex[:, ::1] work = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, :, ::1] sv = src
    cdef Py_ssize_t i
    cdef int p, q, k
    cdef double tmp
    for i in range(m):
        for p in range(n):
            work[p, p] = sv[i, p, p].real
            for q in range(p + 1, n):
                work[p, q] = sv[i, p, q]
                work[q, p] = _conj(sv[i, p, q])
        k = _jacobi_one(work, n, tol, max_sweeps)
        sweeps[i] = k
        if k >= 0:
            for p in range(n):
                eigs[i, p] = work[p, p].real
            # insertion sort, n is tiny
            for p in range(1, n):
                tmp = eigs[i, p]
                q = p - 1
                while q >= 0 and eigs[i, q] > tmp:
                    eigs[i, q + 1] = eigs[i, q]
                    q -= 1
                eigs[i, q + 1] = tmp
    return np.asarray(eigs), np.asarray(sweeps)


def sample_two_stage(cond, u_branch, u_out, branch_cdf, out_cdf):
    cdef long long[::1] cv = np.ascontiguousarray(cond, dtype=np.int64)
    cdef double[::1] ub = np.ascontiguousarray(u_branch, dtype=np.float64)
    cdef double[::1] uo = np.ascontiguousarray(u_out, dtype=np.float64)
    cdef double[:, ::1] bcdf = np.ascontiguousarray(branch_cdf, dtype=np.float64)
    cdef double[:, :, ::1] ocdf = np.ascontiguousarray(out_cdf, dtype=np.float64)
    cdef Py_ssize_t n = cv.shape[0]
    cdef int nb = <int>bcdf.shape[1]
    cdef int no = <int>ocdf.shape[2]
    branch_arr = np.empty(n, dtype=np.int64)
    outcome_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] branch = branch_arr
    cdef long long[::1] outcome = outcome_arr
    cdef Py_ssize_t i
    cdef long long c
    cdef int k, o
    with nogil:
        for i in range(n):
            c = cv[i]
            k = 0
            while k < nb - 1 and ub[i] >= bcdf[c, k]:
                k += 1
            o = 0
            while o < no - 1 and uo[i] >= ocdf[c, k, o]:
                o += 1
            branch[i] = k
            outcome[i] = o
    return branch_arr, outcome_arr


def shuffle_indices(u):
    cdef double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t n = uv.shape[0] + 1
    perm_arr = np.arange(n, dtype=np.int64)
    cdef long long[::1] perm = perm_arr
    cdef Py_ssize_t i, j
    cdef long long tmp
    with nogil:
        i = n - 1
        while i > 0:
            j = <Py_ssize_t>(uv[n - 1 - i] * (i + 1))
            if j > i:
                j = i
            tmp = perm[i]
            perm[i] = perm[j]
            perm[j] = tmp
            i -= 1
    return perm_arr
