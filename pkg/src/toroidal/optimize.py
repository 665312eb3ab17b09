"""Nelder-Mead downhill simplex minimisation."""

from typing import NamedTuple

import numpy as np

REFLECT = 1.0
EXPAND = 2.0
CONTRACT = 0.5
SHRINK = 0.5


class SimplexResult(NamedTuple):
    x: np.ndarray
    fun: float
    iterations: int
    evaluations: int
    converged: bool


def initial_simplex(x0, step) -> np.ndarray:
    x0 = np.asarray(x0, float)
    step = np.broadcast_to(np.asarray(step, float), x0.shape)
    return np.vstack([x0, x0 + np.diag(step)])


def nelder_mead(f, x0, step=0.5, max_iter=2000, ftol=1e-9) -> SimplexResult:
    """Minimise ``f`` from ``x0`` with the standard Nelder-Mead moves.

    Coefficients are fixed at reflection 1, expansion 2, contraction 0.5 and
    shrink 0.5. The run stops when the spread of function values over the
    simplex falls below ``ftol`` or after ``max_iter`` iterations. ``f`` may
    return ``inf`` to mark an infeasible point.
    """
    simplex = initial_simplex(x0, step)
    values = np.array([f(x) for x in simplex])
    n_eval = len(values)
    for it in range(1, max_iter + 1):
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        if np.isfinite(values[-1]) and values[-1] - values[0] < ftol:
            return SimplexResult(simplex[0].copy(), float(values[0]), it - 1, n_eval, True)

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + REFLECT * (centroid - worst)
        fr = f(xr)
        n_eval += 1

        if fr < values[0]:
            xe = centroid + EXPAND * (xr - centroid)
            fe = f(xe)
            n_eval += 1
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue

        if fr < values[-1]:
            xc = centroid + CONTRACT * (xr - centroid)
            fc = f(xc)
            n_eval += 1
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
                continue
        else:
            xc = centroid + CONTRACT * (worst - centroid)
            fc = f(xc)
            n_eval += 1
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
                continue

        best = simplex[0]
        simplex[1:] = best + SHRINK * (simplex[1:] - best)
        values[1:] = [f(x) for x in simplex[1:]]
        n_eval += len(simplex) - 1

    order = np.argsort(values, kind="stable")
    return SimplexResult(simplex[order[0]].copy(), float(values[order[0]]), max_iter, n_eval, False)
