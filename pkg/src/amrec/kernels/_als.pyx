# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled ALS half-sweep kernel.

Same contract as amrec.kernels.als_py.half_sweep (the reference
implementation); per-row normal equations are solved by LAPACK dposv.
The main loop releases the GIL so Jacobi-mode callers may run disjoint
row ranges on separate threads.
"""

import numpy as np

from scipy.linalg.cython_lapack cimport dposv

from amrec.errors import NumericalError


def half_sweep(double[:, ::1] x, double[:, ::1] x_out, double[:, ::1] y,
               double[:, ::1] gram,
               long long[::1] obs_indptr, long long[::1] obs_indices,
               double lam, double w0, double beta,
               long long[::1] nbr_indptr, long long[::1] nbr_indices,
               double[::1] nbr_weights,
               long long[::1] rev_indptr, long long[::1] rev_indices,
               double[::1] rev_weights,
               double[::1] rev_sq, double[:, ::1] nbr_sums, bint jacobi,
               long long row_start=0, long long row_stop=-1):
    cdef long long rows = x.shape[0]
    cdef int k = <int> x.shape[1]
    if row_stop < 0:
        row_stop = rows

    a_buf = np.empty((k, k), dtype=np.float64)
    b_buf = np.empty(k, dtype=np.float64)
    old_buf = np.empty(k, dtype=np.float64)
    cdef double[:, ::1] a = a_buf
    cdef double[::1] b = b_buf
    cdef double[::1] old = old_buf

    cdef long long i, idx, j, p, fail_row = -1
    cdef int r, c, nrhs = 1, info = 0
    cdef double coef = 1.0 - w0
    cdef double w, diag_add, tmp
    cdef bint has_nbrs, has_rev
    cdef char uplo = b'U'

    with nogil:
        for i in range(row_start, row_stop):
            for r in range(k):
                for c in range(k):
                    a[r, c] = w0 * gram[r, c]
                b[r] = 0.0
                old[r] = x[i, r]
            for idx in range(obs_indptr[i], obs_indptr[i + 1]):
                j = obs_indices[idx]
                for r in range(k):
                    tmp = y[j, r]
                    b[r] += tmp
                    for c in range(k):
                        a[r, c] += coef * tmp * y[j, c]
            has_nbrs = nbr_indptr[i + 1] > nbr_indptr[i]
            has_rev = rev_indptr[i + 1] > rev_indptr[i]
            diag_add = lam + beta * ((1.0 if has_nbrs else 0.0) + rev_sq[i])
            for r in range(k):
                a[r, r] += diag_add
            if beta > 0.0:
                if has_nbrs:
                    for r in range(k):
                        b[r] += beta * nbr_sums[i, r]
                if has_rev:
                    for idx in range(rev_indptr[i], rev_indptr[i + 1]):
                        p = rev_indices[idx]
                        w = rev_weights[idx]
                        for r in range(k):
                            b[r] += beta * w * (x[p, r] - (nbr_sums[p, r] - w * old[r]))
            info = 0
            dposv(&uplo, &k, &nrhs, &a[0, 0], &k, &b[0], &k, &info)
            if info != 0:
                fail_row = i
                break
            if jacobi:
                for r in range(k):
                    x_out[i, r] = b[r]
            else:
                for r in range(k):
                    old[r] = b[r] - x[i, r]
                    x[i, r] = b[r]
                if has_rev:
                    for idx in range(rev_indptr[i], rev_indptr[i + 1]):
                        p = rev_indices[idx]
                        w = rev_weights[idx]
                        for r in range(k):
                            nbr_sums[p, r] += w * old[r]

    if fail_row >= 0:
        raise NumericalError(
            f"normal-equations solve failed (not positive definite) at row {fail_row}"
        )
