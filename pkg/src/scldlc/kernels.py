"""Numba-compiled batched versions of the variable-node fold.

The row kernel mirrors `messages.variable_combine` with dynamic integer
windows (null inputs are pinned to b=0) and must stay bit-identical to
the scalar path; the equivalence is asserted by the test suite.  Rows are
independent, so prange parallelism cannot change results.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(cache=True)
def _q_fold_row(mu, s2, cm, cv, h, nul, eta, b_max, skip):
    """Fold the row's check messages (except index `skip`) into (mu, s2)."""
    mhat = mu
    vhat = s2
    k = cm.shape[0]
    used = np.zeros(k, np.bool_)
    if skip >= 0:
        used[skip] = True
    n_fold = k - 1 if skip >= 0 else k
    for _ in range(n_fold):
        best = -1
        best_m = np.inf
        for j in range(k):
            if used[j]:
                continue
            metric = (cm[j] + mhat) ** 2 / (cv[j] + vhat)
            if best < 0 or metric < best_m:
                take = True
            elif metric == best_m:
                # tie-break on (mean, var, label)
                take = (cm[j], cv[j], h[j]) < (cm[best], cv[best], h[best])
            else:
                take = False
            if take:
                best = j
                best_m = metric
        used[best] = True
        mbar = cm[best]
        vbar = cv[best]
        hj = h[best]
        vsum = vbar + vhat
        vprime = vbar * vhat / vsum
        s = mbar + mhat
        if nul[best]:
            blo = 0
            bhi = 0
        else:
            halfw = eta * np.sqrt(vsum) * abs(hj)
            center = int(np.floor(hj * s + 0.5))
            blo = int(np.ceil(hj * s - halfw))
            bhi = int(np.floor(hj * s + halfw))
            if blo < center - b_max:
                blo = center - b_max
            if bhi > center + b_max:
                bhi = center + b_max
            if blo > bhi:
                blo = center
                bhi = center
        emax = -np.inf
        for b in range(blo, bhi + 1):
            e = -((b / hj - s) ** 2) / (2.0 * vsum)
            if e > emax:
                emax = e
        z = 0.0
        m1 = 0.0
        m2 = 0.0
        for b in range(blo, bhi + 1):
            wgt = np.exp(-((b / hj - s) ** 2) / (2.0 * vsum) - emax)
            mb = vprime * (b / (vbar * hj) - mbar / vbar + mhat / vhat)
            z += wgt
            m1 += wgt * mb
            m2 += wgt * mb * mb
        mean = m1 / z
        spread = m2 / z - mean * mean
        if spread < 0.0:
            spread = 0.0
        mhat = mean
        vhat = vprime + spread
    return mhat, vhat


@njit(parallel=True, cache=True)
def q_fold_batch(mu, s2, cm, cv, h, nul, eta, b_max, out_m, out_v):
    """Fold every row of (cm, cv) into its channel prior (mu, s2)."""
    for i in prange(mu.shape[0]):
        out_m[i], out_v[i] = _q_fold_row(mu[i], s2[i], cm[i], cv[i], h[i],
                                         nul[i], eta, b_max, -1)


@njit(parallel=True, cache=True)
def var_update_batch(y, s2, cm, cv, h, nul, eta, b_max,
                     out_m, out_v, post_m, post_v):
    """Per-variable decoder update: extrinsic message for each of the d
    edges (excluding that edge's own input) plus the full posterior."""
    d = cm.shape[1]
    for i in prange(y.shape[0]):
        for k in range(d):
            out_m[i, k], out_v[i, k] = _q_fold_row(
                y[i], s2, cm[i], cv[i], h[i], nul[i], eta, b_max, k)
        post_m[i], post_v[i] = _q_fold_row(
            y[i], s2, cm[i], cv[i], h[i], nul[i], eta, b_max, -1)
