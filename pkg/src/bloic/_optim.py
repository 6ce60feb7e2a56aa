"""Grid-seeded one-dimensional maximisation."""

import numpy as np
from scipy.optimize import minimize_scalar


def grid_golden_max(func, lo, hi, n_grid=64, xtol=1e-6, log_scale=False):
    """Maximise a scalar function on ``[lo, hi]``.

    A coarse grid locates the best cell, then bounded golden-section/Brent
    iterations refine inside the two neighbouring cells. With ``log_scale``
    the grid and the refinement run in ``log(x)``.

    Returns ``(x_star, f_star)``.
    """
    if log_scale:
        u_lo, u_hi = np.log(lo), np.log(hi)
        wrapped = lambda u: func(float(np.exp(u)))  # noqa: E731
    else:
        u_lo, u_hi = float(lo), float(hi)
        wrapped = lambda u: func(float(u))  # noqa: E731

    grid = np.linspace(u_lo, u_hi, n_grid)
    vals = np.array([wrapped(u) for u in grid])
    k = int(np.nanargmax(vals))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, n_grid - 1)]
    # xtol is on x; convert to the working variable
    tol = xtol / max(np.exp(grid[k]), 1e-300) if log_scale else xtol
    res = minimize_scalar(lambda u: -wrapped(u), bounds=(a, b), method="bounded",
                          options={"xatol": tol})
    u_best, f_best = grid[k], vals[k]
    if -res.fun > f_best:
        u_best, f_best = res.x, -res.fun
    x_best = float(np.exp(u_best)) if log_scale else float(u_best)
    return x_best, float(f_best)
