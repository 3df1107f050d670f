"""Nelder-Mead run on a batch of independent starts at once.

The objective is evaluated on stacked points, so one call per iteration
covers every start. Starts never interact: the result for start ``i`` is the
same whatever else is in the batch.
"""
from dataclasses import dataclass

import numpy as np


@dataclass
class BatchResult:
    x: np.ndarray  # (S, n) best point per start
    fun: np.ndarray  # (S,)
    converged: np.ndarray  # (S,) bool
    n_iter: np.ndarray  # (S,)


def nelder_mead_batch(f, x0, step=0.5, max_iter=200, xtol=1e-12, ftol=1e-12, indexed=False):
    """Minimize ``f`` from every row of ``x0``.

    ``f`` maps an ``(m, n)`` array of points to ``(m,)`` values. With
    ``indexed=True`` it is called as ``f(points, starts)`` where ``starts``
    gives the row of ``x0`` each point belongs to, so one batch can carry
    different objectives. Standard coefficients (reflection 1, expansion 2,
    contraction 1/2, shrink 1/2); trial points are evaluated only
    when the step needs them. A start stops when both the simplex
    diameter and the spread of its values fall below the tolerances.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    S, n = x0.shape
    if indexed:
        ev = f
    else:
        def ev(points, _):
            return f(points)
    simplex = np.repeat(x0[:, None, :], n + 1, axis=1)
    simplex[:, 1:, :] += step * np.eye(n)
    fv = ev(simplex.reshape(-1, n), np.repeat(np.arange(S), n + 1)).reshape(S, n + 1)
    active = np.ones(S, dtype=bool)
    n_iter = np.zeros(S, dtype=int)
    rows = np.arange(S)[:, None]

    for _ in range(max_iter):
        order = np.argsort(fv, axis=1, kind="stable")
        simplex = simplex[rows, order]
        fv = fv[rows, order]
        dx = np.max(np.abs(simplex[:, 1:] - simplex[:, :1]), axis=(1, 2))
        df = np.max(np.abs(fv[:, 1:] - fv[:, :1]), axis=1)
        active &= ~((dx <= xtol) & (df <= ftol))
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        n_iter[idx] += 1
        sim = simplex[idx]
        fs = fv[idx]
        cen = sim[:, :-1].mean(axis=1)
        worst = sim[:, -1]
        xr = 2 * cen - worst
        fr = ev(xr, idx)
        fb, fsw, fw = fs[:, 0], fs[:, -2], fs[:, -1]

        new_x = xr.copy()
        new_f = fr.copy()
        shrink = np.zeros(idx.size, dtype=bool)

        # expansion, evaluated only where the reflection beat the best vertex
        expand = fr < fb
        if expand.any():
            xe = 3 * cen[expand] - 2 * worst[expand]
            fe = ev(xe, idx[expand])
            better = fe < fr[expand]
            rows_e = np.flatnonzero(expand)[better]
            new_x[rows_e] = xe[better]
            new_f[rows_e] = fe[better]

        # contraction: outside if the reflection beat the worst vertex, else inside
        contract = ~expand & ~(fr < fsw)
        if contract.any():
            outside = fr[contract] < fw[contract]
            c, w = cen[contract], worst[contract]
            xc = np.where(outside[:, None], 1.5 * c - 0.5 * w, 0.5 * (c + w))
            fc = ev(xc, idx[contract])
            ok = np.where(outside, fc <= fr[contract], fc < fw[contract])
            rows_c = np.flatnonzero(contract)
            new_x[rows_c] = xc
            new_f[rows_c] = fc
            shrink[rows_c[~ok]] = True

        keep = ~shrink
        sim[keep, -1] = new_x[keep]
        fs[keep, -1] = new_f[keep]
        if shrink.any():
            best = sim[shrink, :1]
            pts = best + 0.5 * (sim[shrink, 1:] - best)
            sim[shrink, 1:] = pts
            fs[shrink, 1:] = ev(pts.reshape(-1, n), np.repeat(idx[shrink], n)).reshape(-1, n)
        simplex[idx] = sim
        fv[idx] = fs

    order = np.argsort(fv, axis=1, kind="stable")
    simplex = simplex[rows, order]
    fv = fv[rows, order]
    dx = np.max(np.abs(simplex[:, 1:] - simplex[:, :1]), axis=(1, 2))
    df = np.max(np.abs(fv[:, 1:] - fv[:, :1]), axis=1)
    converged = (dx <= xtol) & (df <= ftol)
    return BatchResult(simplex[:, 0].copy(), fv[:, 0].copy(), converged, n_iter)
