# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for the dyad coordinate-ascent search.

Same recurrence as ``_ascent_py.ascend_batch``, one restart at a time: a fixed
round-robin schedule of phase / two-plane-rotation coordinates, each refined by
a fixed-length golden-section search, with accept-if-improved updates.  The
objective (trace norm of the superoperator image of the dyad) is evaluated with
direct BLAS/LAPACK calls, which is what makes this path fast: no per-evaluation
Python or array-allocation overhead.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, M_PI
from scipy.linalg.cython_blas cimport zgemv
from scipy.linalg.cython_lapack cimport zgesvd

cnp.import_array()

cdef double INVPHI = (sqrt(5.0) - 1.0) / 2.0


cdef class _Workspace:
    cdef int d, d2, lwork
    cdef double complex[::1] w, y, amat, work, ut, vt
    cdef double[::1] s, rwork

    def __cinit__(self, int d):
        cdef double complex wkopt
        cdef double complex[::1] dummy = np.zeros(1, dtype=complex)
        cdef double[::1] rdummy = np.zeros(max(5 * d, 1), dtype=float)
        cdef double sdummy[1]
        cdef int info = 0, lwork = -1, one = 1
        self.d = d
        self.d2 = d * d
        self.w = np.empty(self.d2, dtype=complex)
        self.y = np.empty(self.d2, dtype=complex)
        self.amat = np.empty(self.d2, dtype=complex)
        self.ut = np.empty(d, dtype=complex)
        self.vt = np.empty(d, dtype=complex)
        self.s = np.empty(d, dtype=float)
        self.rwork = np.empty(max(5 * d, 1), dtype=float)
        # workspace query
        zgesvd(b"N", b"N", &self.d, &self.d, &dummy[0], &self.d, &sdummy[0],
               &dummy[0], &one, &dummy[0], &one, &wkopt, &lwork, &rdummy[0], &info)
        self.lwork = <int>wkopt.real
        self.work = np.empty(self.lwork, dtype=complex)


cdef double _objective(double complex[::1, :] lmat, double complex[::1] u,
                       double complex[::1] v, _Workspace ws) except -1.0:
    """||unstack(L vec(u v†))||_1 via zgemv + zgesvd."""
    cdef int d = ws.d, d2 = ws.d2
    cdef int i, j, info = 0, one = 1
    cdef double complex alpha = 1.0, beta = 0.0
    cdef double total = 0.0
    for j in range(d):
        for i in range(d):
            ws.w[i + d * j] = u[i] * v[j].conjugate()
    zgemv(b"N", &d2, &d2, &alpha, &lmat[0, 0], &d2, &ws.w[0], &one,
          &beta, &ws.y[0], &one)
    # y holds the image column-stacked, i.e. exactly the d x d matrix in
    # Fortran layout that zgesvd expects (and destroys -> copy).
    ws.amat[:] = ws.y
    zgesvd(b"N", b"N", &d, &d, &ws.amat[0], &d, &ws.s[0], &ws.amat[0], &one,
           &ws.amat[0], &one, &ws.work[0], &ws.lwork, &ws.rwork[0], &info)
    if info != 0:
        raise RuntimeError(f"zgesvd failed with info={info}")
    for i in range(d):
        total += ws.s[i]
    return total


cdef void _apply_angle(double complex[::1] src, double complex[::1] dst,
                       int kind, int i, int j, double theta) noexcept:
    cdef int k
    cdef double complex wi, wj
    cdef double c, s
    for k in range(src.shape[0]):
        dst[k] = src[k]
    if kind == 0:
        dst[i] = dst[i] * (cos(theta) + 1j * sin(theta))
    else:
        c = cos(theta)
        s = sin(theta)
        wi = dst[i]
        wj = dst[j]
        dst[i] = c * wi - s * wj
        dst[j] = s * wi + c * wj


def ascend(cnp.ndarray lmat_f, cnp.ndarray u_arr, cnp.ndarray v_arr,
           int iters, int golden_steps):
    """Ascend one restart in place; lmat_f must be Fortran-ordered complex128.

    Returns the final objective value; u_arr/v_arr hold the final vectors.
    """
    cdef double complex[::1, :] lmat = lmat_f
    cdef double complex[::1] u = u_arr
    cdef double complex[::1] v = v_arr
    cdef int d = u.shape[0]
    cdef _Workspace ws = _Workspace(d)

    # coordinate schedule: for each vector, d phases then the i<j rotations
    sched = []
    for wv in (0, 1):
        for pi in range(d):
            sched.append((wv, 0, pi, 0))
        for pi in range(d):
            for pj in range(pi + 1, d):
                sched.append((wv, 1, pi, pj))
    cdef cnp.ndarray sched_arr = np.array(sched, dtype=np.intc)
    cdef int[:, ::1] coords = sched_arr
    cdef int ncoords = coords.shape[0]

    cdef int k, which, kind, ci, cj, g, m
    cdef double a, b, x1, x2, f1, f2, fp, half, mid, fm, f, nrm
    cdef bint take_right
    cdef double complex[::1] trial_u = ws.ut
    cdef double complex[::1] trial_v = ws.vt

    f = _objective(lmat, u, v, ws)
    for k in range(iters):
        which = coords[k % ncoords, 0]
        kind = coords[k % ncoords, 1]
        ci = coords[k % ncoords, 2]
        cj = coords[k % ncoords, 3]
        half = M_PI if kind == 0 else M_PI / 2
        a = -half
        b = half
        x1 = b - INVPHI * (b - a)
        x2 = a + INVPHI * (b - a)
        if which == 0:
            _apply_angle(u, trial_u, kind, ci, cj, x1)
            f1 = _objective(lmat, trial_u, v, ws)
            _apply_angle(u, trial_u, kind, ci, cj, x2)
            f2 = _objective(lmat, trial_u, v, ws)
        else:
            _apply_angle(v, trial_v, kind, ci, cj, x1)
            f1 = _objective(lmat, u, trial_v, ws)
            _apply_angle(v, trial_v, kind, ci, cj, x2)
            f2 = _objective(lmat, u, trial_v, ws)
        for g in range(golden_steps):
            take_right = f1 < f2
            if take_right:
                a = x1
                x1 = x2
                x2 = a + INVPHI * (b - a)
                f1 = f2
                if which == 0:
                    _apply_angle(u, trial_u, kind, ci, cj, x2)
                    f2 = _objective(lmat, trial_u, v, ws)
                else:
                    _apply_angle(v, trial_v, kind, ci, cj, x2)
                    f2 = _objective(lmat, u, trial_v, ws)
            else:
                b = x2
                x2 = x1
                x1 = b - INVPHI * (b - a)
                f2 = f1
                if which == 0:
                    _apply_angle(u, trial_u, kind, ci, cj, x1)
                    f1 = _objective(lmat, trial_u, v, ws)
                else:
                    _apply_angle(v, trial_v, kind, ci, cj, x1)
                    f1 = _objective(lmat, u, trial_v, ws)
        mid = (a + b) / 2
        if which == 0:
            _apply_angle(u, trial_u, kind, ci, cj, mid)
            fm = _objective(lmat, trial_u, v, ws)
        else:
            _apply_angle(v, trial_v, kind, ci, cj, mid)
            fm = _objective(lmat, u, trial_v, ws)
        if fm > f:
            f = fm
            nrm = 0.0
            if which == 0:
                for m in range(d):
                    u[m] = trial_u[m]
                    nrm += u[m].real * u[m].real + u[m].imag * u[m].imag
                nrm = sqrt(nrm)
                for m in range(d):
                    u[m] = u[m] / nrm
            else:
                for m in range(d):
                    v[m] = trial_v[m]
                    nrm += v[m].real * v[m].real + v[m].imag * v[m].imag
                nrm = sqrt(nrm)
                for m in range(d):
                    v[m] = v[m] / nrm
    return f
