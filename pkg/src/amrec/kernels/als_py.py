"""Pure-NumPy ALS half-sweep kernel (fallback backend).

One half-sweep updates every row vector of ``x`` by solving its exact
k x k normal equations against the fixed other-side factors ``y``:

    A_i = w0 * (y^T y) + (1 - w0) * sum_{j observed} y_j y_j^T
          + (lam + beta * (own_i + sum_p w_pi^2)) I
    b_i = sum_{j observed} y_j
          + beta * sum_{k in C(i)} w_ik x_k
          + beta * sum_{p: i in C(p)} w_pi (x_p - sum_{k in C(p), k != i} w_pk x_k)

``own_i`` is 1 when concept i has declared neighbors and 0 otherwise
(concepts without neighbors have no regularization term at all).
``nbr_sums`` must hold W @ x on entry; in Gauss-Seidel mode it is kept
consistent incrementally as rows change, in Jacobi mode it is treated as
a snapshot and solutions go to ``x_out``.
"""

import numpy as np
import scipy.linalg

from amrec.errors import NumericalError


def half_sweep(x, x_out, y, gram, obs_indptr, obs_indices, lam, w0, beta,
               nbr_indptr, nbr_indices, nbr_weights,
               rev_indptr, rev_indices, rev_weights,
               rev_sq, nbr_sums, jacobi, row_start=0, row_stop=-1):
    k = x.shape[1]
    if row_stop < 0:
        row_stop = x.shape[0]
    base = w0 * gram
    eye = np.eye(k)
    coef = 1.0 - w0
    for i in range(row_start, row_stop):
        obs = obs_indices[obs_indptr[i]:obs_indptr[i + 1]]
        if len(obs):
            yj = y[obs]
            a = base + coef * (yj.T @ yj)
            b = yj.sum(axis=0)
        else:
            a = base.copy()
            b = np.zeros(k)
        has_nbrs = nbr_indptr[i + 1] > nbr_indptr[i]
        a += (lam + beta * ((1.0 if has_nbrs else 0.0) + rev_sq[i])) * eye

        ps = ws = None
        if beta > 0.0:
            if has_nbrs:
                b = b + beta * nbr_sums[i]
            lo, hi = rev_indptr[i], rev_indptr[i + 1]
            if hi > lo:
                ps = rev_indices[lo:hi]
                ws = rev_weights[lo:hi]
                partial = x[ps] - nbr_sums[ps] + np.outer(ws, x[i])
                b = b + beta * (ws @ partial)
        try:
            solution = scipy.linalg.solve(a, b, assume_a="pos", check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                f"normal-equations solve failed (not positive definite) at row {i}"
            ) from exc
        if jacobi:
            x_out[i] = solution
        else:
            delta = solution - x[i]
            x[i] = solution
            if ps is not None:
                nbr_sums[ps] += np.outer(ws, delta)
