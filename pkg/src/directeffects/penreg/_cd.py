"""Compiled inner loops for penalized logistic regression.

Works on standardized columns ``Z`` (Fortran order) with per-column penalty
weights, so one kernel serves both the original-scale objective and any
reweighting. The minimized objective is

    mean NLL(b0 + Z b) + lam * sum(pen1 * |b|) + lam * sum(pen2 * b**2)
"""

import numpy as np
from numba import njit

WEIGHT_FLOOR = 1e-5

# reassociation lets the column reductions vectorize; NaN and inf keep
# their IEEE meaning
FAST = {"reassoc", "contract", "nsz", "arcp"}

# active-set sweeps before trying an exact solve on the active set
JUMP_AFTER = 10
JUMP_MAX_ACTIVE = 100

# status codes returned by solve()
OK = 0
MAX_OUTER = 1
MAX_SWEEPS = 2


@njit(cache=True)
def _nll(eta, y):
    # mean negative log-likelihood, stable for large |eta|
    s = 0.0
    for i in range(eta.shape[0]):
        e = eta[i]
        if e > 0:
            s += e + np.log1p(np.exp(-e)) - y[i] * e
        else:
            s += np.log1p(np.exp(e)) - y[i] * e
    return s / eta.shape[0]


@njit(cache=True)
def objective(eta, y, b, lam, pen1, pen2):
    pen = 0.0
    for j in range(b.shape[0]):
        pen += pen1[j] * abs(b[j]) + pen2[j] * b[j] * b[j]
    return _nll(eta, y) + lam * pen


@njit(cache=True)
def _soft(g, t):
    if g > t:
        return g - t
    if g < -t:
        return g + t
    return 0.0


@njit(cache=True, fastmath=FAST)
def _sweep(Z, w, r, b, v, vset, lam, pen1, pen2, valid, active_only, inv_n):
    """One cyclic pass of coordinate updates on the quadratic model.

    Returns the largest absolute coefficient change."""
    n = Z.shape[0]
    p = Z.shape[1]
    dmax = 0.0
    for j in range(p):
        if not valid[j]:
            continue
        if active_only and b[j] == 0.0:
            continue
        if not vset[j]:
            acc = 0.0
            for i in range(n):
                acc += w[i] * Z[i, j] * Z[i, j]
            v[j] = acc * inv_n
            vset[j] = True
        acc = 0.0
        for i in range(n):
            acc += w[i] * Z[i, j] * r[i]
        g = acc * inv_n + v[j] * b[j]
        new = _soft(g, lam * pen1[j]) / (v[j] + 2.0 * lam * pen2[j])
        d = new - b[j]
        if d != 0.0:
            for i in range(n):
                r[i] -= d * Z[i, j]
            b[j] = new
            ad = abs(d)
            if ad > dmax:
                dmax = ad
    return dmax


@njit(cache=True, fastmath=FAST)
def _intercept_step(w, r, sw):
    acc = 0.0
    for i in range(w.shape[0]):
        acc += w[i] * r[i]
    d = acc / sw
    for i in range(w.shape[0]):
        r[i] -= d
    return d


@njit(cache=True)
def _spd_solve(M, rhs):
    """Cholesky solve; returns an empty array if M is numerically singular."""
    k = M.shape[0]
    L = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1):
            acc = M[i, j]
            for t in range(j):
                acc -= L[i, t] * L[j, t]
            if i == j:
                if acc <= 1e-10 * max(1.0, M[i, i]):
                    return np.empty(0)
                L[i, i] = np.sqrt(acc)
            else:
                L[i, j] = acc / L[j, j]
    x = np.empty(k)
    for i in range(k):
        acc = rhs[i]
        for t in range(i):
            acc -= L[i, t] * x[t]
        x[i] = acc / L[i, i]
    for i in range(k - 1, -1, -1):
        acc = x[i]
        for t in range(i + 1, k):
            acc -= L[t, i] * x[t]
        x[i] = acc / L[i, i]
    return x


@njit(cache=True)
def _active_jump(Z, w, z, r, b, b0, lam, pen1, pen2, inv_n):
    """Minimize the quadratic model over the current active set.

    Signs are held fixed and the exact minimizer is found by a Cholesky
    solve. If the straight line towards it crosses zero in some
    coefficient, the step stops there, that coefficient leaves the set and
    the solve is repeated on the smaller set; the Gram matrix of the
    smaller set is a submatrix of the first one. Every step lowers the
    model, so the loop ends after at most one pass per active column.
    Returns the new intercept.
    """
    n = Z.shape[0]
    p = Z.shape[1]
    m = 0
    for j in range(p):
        if b[j] != 0.0:
            m += 1
    if m == 0 or m > JUMP_MAX_ACTIVE:
        return b0
    idx = np.empty(m, dtype=np.int64)
    k = 0
    for j in range(p):
        if b[j] != 0.0:
            idx[k] = j
            k += 1
    M = np.zeros((m + 1, m + 1))
    rhs = np.zeros(m + 1)
    for i in range(n):
        wi = w[i]
        M[0, 0] += wi
        rhs[0] += wi * z[i]
        for a in range(m):
            za = Z[i, idx[a]]
            M[0, a + 1] += wi * za
            rhs[a + 1] += wi * za * z[i]
            for c in range(a, m):
                M[a + 1, c + 1] += wi * za * Z[i, idx[c]]
    for a in range(m + 1):
        for c in range(a, m + 1):
            M[a, c] *= inv_n
            M[c, a] = M[a, c]
        rhs[a] *= inv_n
    for a in range(m):
        j = idx[a]
        M[a + 1, a + 1] += 2.0 * lam * pen2[j]
        sgn = 1.0 if b[j] > 0 else -1.0
        rhs[a + 1] -= lam * pen1[j] * sgn

    live = np.ones(m, dtype=np.bool_)
    new0 = b0
    moved = False
    for _ in range(m):
        pos = np.empty(m + 1, dtype=np.int64)
        pos[0] = 0
        k = 1
        for a in range(m):
            if live[a]:
                pos[k] = a + 1
                k += 1
        Ms = np.empty((k, k))
        rs = np.empty(k)
        for u in range(k):
            rs[u] = rhs[pos[u]]
            for v in range(k):
                Ms[u, v] = M[pos[u], pos[v]]
        sol = _spd_solve(Ms, rs)
        if sol.shape[0] == 0 or not np.all(np.isfinite(sol)):
            break
        # the model is smooth inside the current orthant: walk towards the
        # solution and stop where the first coefficient would change sign
        t = 1.0
        hit = -1
        for u in range(1, k):
            a = pos[u] - 1
            cur = b[idx[a]]
            if sol[u] * cur <= 0.0:
                ta = cur / (cur - sol[u])
                if ta < t:
                    t = ta
                    hit = a
        new0 = new0 + t * (sol[0] - new0)
        for u in range(1, k):
            a = pos[u] - 1
            j = idx[a]
            b[j] = 0.0 if a == hit else b[j] + t * (sol[u] - b[j])
        moved = True
        if hit < 0:
            break
        live[hit] = False
        if k == 2:
            break
    if not moved:
        return b0
    for i in range(n):
        acc = z[i] - new0
        for a in range(m):
            if b[idx[a]] != 0.0:
                acc -= b[idx[a]] * Z[i, idx[a]]
        r[i] = acc
    return new0


@njit(cache=True)
def solve(Z, y, lam, pen1, pen2, valid, b0, b, max_outer, max_sweeps, tol, history):
    """Proximal-Newton (IRLS + coordinate descent) solve at one penalty.

    ``b`` is updated in place (warm start on entry). Returns
    ``(b0, status, n_outer, n_sweeps, n_hist)``; ``history`` receives the
    penalized objective after every outer step, which never increases
    because steps that would raise it are halved back.
    """
    n = Z.shape[0]
    p = Z.shape[1]
    inv_n = 1.0 / n
    eta = np.empty(n)
    for i in range(n):
        eta[i] = b0
    for j in range(p):
        if b[j] != 0.0:
            for i in range(n):
                eta[i] += b[j] * Z[i, j]
    obj = objective(eta, y, b, lam, pen1, pen2)
    n_hist = 0
    if history.shape[0] > 0:
        history[0] = obj
        n_hist = 1

    w = np.empty(n)
    z = np.empty(n)
    r = np.empty(n)
    v = np.zeros(p)
    vset = np.zeros(p, dtype=np.bool_)
    b_old = np.empty(p)
    eta_new = np.empty(n)
    total_sweeps = 0
    status = MAX_OUTER

    for outer in range(max_outer):
        sw = 0.0
        for i in range(n):
            mu = 1.0 / (1.0 + np.exp(-eta[i]))
            wi = mu * (1.0 - mu)
            if wi < WEIGHT_FLOOR:
                wi = WEIGHT_FLOOR
            w[i] = wi
            r[i] = (y[i] - mu) / wi
            z[i] = eta[i] + r[i]
            sw += wi
        for j in range(p):
            vset[j] = False
            b_old[j] = b[j]
        b0_old = b0

        b0 += _intercept_step(w, r, sw)
        converged = False
        while total_sweeps < max_sweeps:
            dmax = _sweep(Z, w, r, b, v, vset, lam, pen1, pen2, valid, False, inv_n)
            d0 = _intercept_step(w, r, sw)
            b0 += d0
            total_sweeps += 1
            if dmax < tol and abs(d0) < tol:
                converged = True
                break
            active_sweeps = 0
            while total_sweeps < max_sweeps:
                dmax = _sweep(Z, w, r, b, v, vset, lam, pen1, pen2, valid, True, inv_n)
                d0 = _intercept_step(w, r, sw)
                b0 += d0
                total_sweeps += 1
                active_sweeps += 1
                if dmax < tol and abs(d0) < tol:
                    break
                if active_sweeps % JUMP_AFTER == 0:
                    b0 = _active_jump(Z, w, z, r, b, b0, lam, pen1, pen2, inv_n)
        if not converged:
            return b0, MAX_SWEEPS, outer + 1, total_sweeps, n_hist

        for i in range(n):
            eta_new[i] = z[i] - r[i]
        new_obj = objective(eta_new, y, b, lam, pen1, pen2)
        if new_obj > obj + 1e-13 * max(1.0, abs(obj)):
            # convex objective: shrink the step towards the previous iterate
            b0, new_obj = _backtrack(Z, y, eta, b_old, b0_old, b, b0, lam, pen1, pen2, obj, eta_new)

        step = abs(b0 - b0_old)
        for j in range(p):
            d = abs(b[j] - b_old[j])
            if d > step:
                step = d
        for i in range(n):
            eta[i] = eta_new[i]
        obj = new_obj
        if n_hist < history.shape[0]:
            history[n_hist] = obj
            n_hist += 1
        if step < tol:
            status = OK
            return b0, status, outer + 1, total_sweeps, n_hist
    return b0, status, max_outer, total_sweeps, n_hist


@njit(cache=True)
def _backtrack(Z, y, eta, b_old, b0_old, b, b0_new, lam, pen1, pen2, obj, eta_out):
    """Halve the step from (b_old, b0_old) towards (b, b0_new) until the
    objective does not exceed ``obj``. Writes the accepted point into ``b``
    and ``eta_out``."""
    n = Z.shape[0]
    p = Z.shape[1]
    b_full = b.copy()
    eta_full = np.empty(n)
    for i in range(n):
        eta_full[i] = b0_new
    for j in range(p):
        if b_full[j] != 0.0:
            for i in range(n):
                eta_full[i] += b_full[j] * Z[i, j]
    t = 1.0
    best = 0.0
    for _ in range(60):
        t *= 0.5
        for j in range(p):
            b[j] = b_old[j] + t * (b_full[j] - b_old[j])
        for i in range(n):
            eta_out[i] = eta[i] + t * (eta_full[i] - eta[i])
        best = objective(eta_out, y, b, lam, pen1, pen2)
        if best <= obj:
            return b0_old + t * (b0_new - b0_old), best
    for j in range(p):
        b[j] = b_old[j]
    for i in range(n):
        eta_out[i] = eta[i]
    return b0_old, obj


@njit(cache=True, fastmath=FAST)
def gradient(Z, y, b0, b):
    """Mean log-likelihood gradient Z^T (y - mu) / n and the intercept term."""
    n = Z.shape[0]
    p = Z.shape[1]
    eta = np.empty(n)
    for i in range(n):
        eta[i] = b0
    for j in range(p):
        if b[j] != 0.0:
            for i in range(n):
                eta[i] += b[j] * Z[i, j]
    res = np.empty(n)
    g0 = 0.0
    for i in range(n):
        res[i] = y[i] - 1.0 / (1.0 + np.exp(-eta[i]))
        g0 += res[i]
    g = np.zeros(p)
    for j in range(p):
        acc = 0.0
        for i in range(n):
            acc += Z[i, j] * res[i]
        g[j] = acc / n
    return g0 / n, g
