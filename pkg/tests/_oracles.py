"""Independent scalar-loop oracles for the MPP flux limiter.

These transliterate the enumerated case analyses directly, without any of
the vectorized implementation's machinery, and generate random instances
whose first-order fluxes keep averages inside the bounds.
"""
import numpy as np


def oracle_theta_1d(high, low, ubar, u_min, u_max, lam, periodic):
    n = len(ubar)
    gmax = np.empty(n)
    gmin = np.empty(n)
    for j in range(n):
        gmax[j] = u_max - ubar[j] + lam * (low[j + 1] - low[j])
        gmin[j] = u_min - ubar[j] + lam * (low[j + 1] - low[j])
    gmax = np.maximum(gmax, 0.0)
    gmin = np.minimum(gmin, 0.0)

    lm = np.ones((n, 2))  # upper-bound Lambda at (minus, plus) interface
    ln = np.ones((n, 2))
    for j in range(n):
        fl = lam * (high[j] - low[j])
        fr = lam * (high[j + 1] - low[j + 1])
        if fl <= 0 and fr >= 0:
            lm[j] = (1, 1)
        elif fl <= 0 and fr < 0:
            lm[j] = (1, min(1, gmax[j] / (-fr)))
        elif fl > 0 and fr >= 0:
            lm[j] = (min(1, gmax[j] / fl), 1)
        else:
            if fl - fr <= gmax[j]:
                lm[j] = (1, 1)
            else:
                lm[j] = (gmax[j] / (fl - fr),) * 2
        if fl >= 0 and fr <= 0:
            ln[j] = (1, 1)
        elif fl >= 0 and fr > 0:
            ln[j] = (1, min(1, gmin[j] / (-fr)))
        elif fl < 0 and fr <= 0:
            ln[j] = (min(1, gmin[j] / fl), 1)
        else:
            if fl - fr >= gmin[j]:
                ln[j] = (1, 1)
            else:
                ln[j] = (gmin[j] / (fl - fr),) * 2
    theta = np.ones(n + 1)
    for i in range(n + 1):
        cands = []
        if i > 0:
            cands += [lm[i - 1, 1], ln[i - 1, 1]]
        elif periodic:
            cands += [lm[n - 1, 1], ln[n - 1, 1]]
        if i < n:
            cands += [lm[i, 0], ln[i, 0]]
        elif periodic:
            cands += [lm[0, 0], ln[0, 0]]
        theta[i] = min(cands)
    return theta


def oracle_theta_2d(hx, hy, lx, ly, ubar, u_min, u_max, lam_x, lam_y):
    nx, ny = ubar.shape
    lam_cell = np.ones((nx, ny, 4))  # L, R, D, U
    for i in range(nx):
        for j in range(ny):
            low_diff = (lam_x * (lx[i + 1, j] - lx[i, j])
                        + lam_y * (ly[i, j + 1] - ly[i, j]))
            gmax = max(u_max - ubar[i, j] + low_diff, 0.0)
            gmin = min(u_min - ubar[i, j] + low_diff, 0.0)
            fs = [lam_x * (hx[i, j] - lx[i, j]),
                  -lam_x * (hx[i + 1, j] - lx[i + 1, j]),
                  lam_y * (hy[i, j] - ly[i, j]),
                  -lam_y * (hy[i, j + 1] - ly[i, j + 1])]
            spos = sum(f for f in fs if f > 0)
            sneg = sum(f for f in fs if f < 0)
            for s, f in enumerate(fs):
                lam_m = 1.0 if f <= 0 else min(gmax / spos, 1.0)
                lam_n = 1.0 if f >= 0 else min(gmin / sneg, 1.0)
                lam_cell[i, j, s] = min(lam_m, lam_n)
    tx = np.ones((nx + 1, ny))
    ty = np.ones((nx, ny + 1))
    for j in range(ny):
        for i in range(nx + 1):
            tx[i, j] = min(lam_cell[(i - 1) % nx, j, 1], lam_cell[i % nx, j, 0])
    for i in range(nx):
        for j in range(ny + 1):
            ty[i, j] = min(lam_cell[i, (j - 1) % ny, 3], lam_cell[i, j % ny, 2])
    return tx, ty


def random_instance_1d(rng, n):
    """Fluxes built so the first-order update is bound-preserving."""
    u_min, u_max = 0.0, 1.0
    ubar = rng.uniform(u_min, u_max, n)
    lam = rng.uniform(0.05, 0.3)
    # monotone upwind flux of a linear problem keeps averages in bounds
    low = np.empty(n + 1)
    low[1:] = ubar
    low[0] = ubar[-1]
    high = low + rng.normal(0, 0.8, n + 1)
    high[0] = high[-1] = 0.5 * (high[0] + high[-1])
    return high, low, ubar, u_min, u_max, lam

