"""Regularized incomplete gamma routines with a log-domain quantile inverse.

The weight construction for the truncated random-measure series needs the
(1-p)-th quantile of gamma(k, 1) for shapes as small as k = 1e-3.  Those
quantiles underflow any linear float scale (ln x goes below -10^4), so the
inverse here works entirely in y = ln x:

  * lower-tail series for x < k + 1, evaluated as ln P(k, e^y),
  * upper-tail continued fraction (modified Lentz) for x >= k + 1,
  * Newton on y from the closed-form small-x estimate (both log-scale
    branches are monotone and concave in y, so the iteration cannot
    diverge), with a bracketed bisection/Newton fallback that expands
    geometrically from the same estimate.

All routines accept scalar or array arguments; the shape parameter is a
scalar.  Vectorized loops freeze converged elements so results are
bit-identical regardless of how inputs are batched or chunked.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, ndtri

_TINY = 1e-300
_TERM_EPS = 1e-17
_CF_EPS = 1e-15
_MAX_TERMS = 20_000
_REL_TOL = 1e-10


def log_gamma_fn(x):
    """ln Gamma(x) for x > 0 (scalar or array)."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr <= 0.0):
        raise ValueError("log_gamma_fn requires x > 0")
    out = gammaln(arr)
    return float(out) if arr.ndim == 0 else out


def _log_lower_series(k: float, y: np.ndarray):
    """ln P(k, e^y) by the lower-tail power series, for e^y < k + 1.

    Returns (log_p, log_t) with log_t = k*y - x - lnGamma(k), so that
    d(ln P)/dy = exp(log_t - log_p).  y = -inf (x = 0) is allowed.
    """
    y = np.asarray(y, dtype=np.float64)
    x = np.exp(y)
    flat = x.ravel()
    total = np.full(flat.shape, 1.0 / k)
    active = np.flatnonzero(flat > 0.0)
    xa = flat[active]
    term = np.full(active.shape, 1.0 / k)
    acc = total[active].copy()
    m = 0
    while active.size:
        m += 1
        if m > _MAX_TERMS:
            raise RuntimeError("incomplete gamma series failed to converge")
        term = term * (xa / (k + m))
        acc = acc + term
        done = term <= _TERM_EPS * acc
        if done.any():
            total[active[done]] = acc[done]
            keep = ~done
            active, xa, term, acc = active[keep], xa[keep], term[keep], acc[keep]
    with np.errstate(invalid="ignore"):
        log_t = k * y - x - gammaln(k)
    log_p = log_t + np.log(total).reshape(y.shape)
    return log_p, log_t


def _log_upper_cf(k: float, y: np.ndarray):
    """ln Q(k, e^y) by continued fraction (modified Lentz), for e^y >= k + 1.

    Returns (log_q, log_t) with log_t = k*y - x - lnGamma(k), so that
    d(ln Q)/dy = -exp(log_t - log_q).
    """
    y = np.asarray(y, dtype=np.float64)
    x = np.exp(y)
    flat = x.ravel()
    h = np.empty(flat.shape)
    active = np.arange(flat.size)
    xa = flat.copy()
    b = xa + 1.0 - k
    c = np.full(flat.shape, 1.0 / _TINY)
    d = 1.0 / b
    ha = d.copy()
    m = 0
    while active.size:
        m += 1
        if m > _MAX_TERMS:
            raise RuntimeError("incomplete gamma continued fraction failed to converge")
        an = -m * (m - k)
        b = b + 2.0
        d = an * d + b
        np.copyto(d, _TINY, where=np.abs(d) < _TINY)
        c = b + an / c
        np.copyto(c, _TINY, where=np.abs(c) < _TINY)
        d = 1.0 / d
        delta = d * c
        ha = ha * delta
        done = np.abs(delta - 1.0) < _CF_EPS
        if done.any():
            h[active[done]] = ha[done]
            keep = ~done
            active, b, c, d, ha = active[keep], b[keep], c[keep], d[keep], ha[keep]
    log_t = k * y - x - gammaln(k)
    log_q = log_t + np.log(h).reshape(y.shape)
    return log_q, log_t


def _q_from_log_x(k: float, y: np.ndarray) -> np.ndarray:
    boundary = math.log(k + 1.0)
    y = np.asarray(y, dtype=np.float64)
    out = np.empty(y.shape)
    lo = y < boundary
    if lo.any():
        log_p, _ = _log_lower_series(k, y[lo])
        out[lo] = -np.expm1(log_p)
    hi = ~lo
    if hi.any():
        log_q, _ = _log_upper_cf(k, y[hi])
        out[hi] = np.exp(log_q)
    return out


def reg_gamma_upper(shape, x):
    """Upper regularized incomplete gamma Q(shape, x) = P(X > x), X ~ gamma(shape, 1).

    Lower-tail series for x < shape + 1, continued fraction otherwise.
    """
    k = float(shape)
    if k <= 0.0:
        raise ValueError("shape must be positive")
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0.0):
        raise ValueError("x must be nonnegative")
    with np.errstate(divide="ignore"):
        y = np.log(arr)
    out = _q_from_log_x(k, y)
    return float(out) if arr.ndim == 0 else out


def reg_gamma_upper_log(shape, log_x):
    """Q(shape, exp(log_x)) evaluated without forming exp(log_x) prematurely.

    Safe for log-domain quantiles whose linear value underflows to zero.
    """
    k = float(shape)
    if k <= 0.0:
        raise ValueError("shape must be positive")
    y = np.asarray(log_x, dtype=np.float64)
    out = _q_from_log_x(k, y)
    return float(out) if y.ndim == 0 else out


def _series_objective(k: float, y: np.ndarray):
    log_p, log_t = _log_lower_series(k, y)
    with np.errstate(invalid="ignore"):
        deriv = np.exp(log_t - log_p)
    # d(ln P)/dy -> k as x -> 0; patch the -inf - -inf indeterminacy at x = 0
    deriv = np.where(np.isnan(deriv), k, deriv)
    return log_p, deriv


def _cf_objective(k: float, y: np.ndarray):
    log_q, log_t = _log_upper_cf(k, y)
    return log_q, -np.exp(log_t - log_q)


def _horner_depth(k: float) -> int:
    """Series depth so the truncated tail at x = k+1 stays below 1e-19."""
    x = k + 1.0
    term = 1.0
    m = 0
    while term > 1e-19 and m < 400:
        m += 1
        term *= x / m
    return max(m, 8)


def _make_series_fast(depth: int):
    """Fixed-depth Horner evaluator of (lnP(k, e^y), d lnP/dy = k/S) for e^y < k+1.

    The fixed depth keeps the arithmetic per element independent of the batch,
    so batched and scalar solves agree bit for bit.
    """
    def series_fast(k: float, y: np.ndarray):
        x = np.exp(y)
        s = np.ones_like(x)
        for j in range(depth, 0, -1):
            s = 1.0 + s * (x / (k + j))
        log_p = k * y - x - gammaln(k + 1.0) + np.log(s)
        return log_p, k / s

    return series_fast


def _newton_monotone(k: float, y0, tgt, value_grad, lo=-np.inf, hi=np.inf):
    """Unbracketed Newton for value_grad(k, y) = tgt on a monotone concave/convex branch.

    Converged elements freeze immediately; stragglers (which should not occur)
    are reported back to the caller for the bracketed fallback.
    """
    y = np.clip(np.asarray(y0, dtype=np.float64), lo, hi).copy()
    tgt = np.asarray(tgt, dtype=np.float64)
    n = y.size
    active = np.arange(n)
    ya = y.copy()
    ta = tgt.copy()
    for _ in range(25):
        if not active.size:
            break
        val, grad = value_grad(k, ya)
        y_new = np.clip(ya - (val - ta) / grad, lo, hi)
        step = np.abs(y_new - ya)
        tol = 0.5 * _REL_TOL * np.maximum(1.0, np.abs(y_new))
        done = step <= tol
        ya = y_new
        if done.any():
            y[active[done]] = ya[done]
            keep = ~done
            active, ya, ta = active[keep], ya[keep], ta[keep]
    y[active] = ya
    return y, active


def _solve_monotone(k: float, y0, target, objective, increasing: bool,
                    y_min=-np.inf, y_max=np.inf):
    """Safeguarded vectorized Newton for objective(k, y) = target.

    Brackets each root by geometric expansion from y0, then iterates Newton
    with bisection fallback.  Converged elements freeze, so results do not
    depend on which other elements share the call.
    """
    y0 = np.asarray(y0, dtype=np.float64)
    tgt = np.asarray(target, dtype=np.float64)
    if tgt.ndim == 0:
        tgt = np.full(y0.shape, float(tgt))
    sign = 1.0 if increasing else -1.0
    n = y0.size

    # Bracket: h(y) = sign*(objective - target) is increasing in y.
    # Walk down until h <= 0, up until h >= 0; domain bounds always bracket.
    val, _ = objective(k, y0)
    h0 = sign * (val - tgt)
    ylo = y0.copy()
    yhi = y0.copy()
    for direction in (-1.0, 1.0):
        edge = ylo if direction < 0 else yhi
        need = np.flatnonzero(h0 * direction < 0.0)
        width = np.full(n, 0.5)
        while need.size:
            if direction < 0:
                edge[need] = np.maximum(edge[need] - width[need], y_min)
                clamped = edge[need] == y_min
            else:
                edge[need] = np.minimum(edge[need] + width[need], y_max)
                clamped = edge[need] == y_max
            width[need] *= 2.0
            if np.any(width > 1e9):
                raise RuntimeError("quantile bracket expansion failed")
            val, _ = objective(k, edge[need])
            hval = sign * (val - tgt[need])
            need = need[(hval * direction < 0.0) & ~clamped]

    # Safeguarded Newton from the bracket midpoint.
    y = 0.5 * (ylo + yhi)
    active = np.arange(n)
    step_old = np.abs(yhi - ylo)
    for _ in range(200):
        if not active.size:
            break
        val, dval = objective(k, y[active])
        h = sign * (val - tgt[active])
        hd = sign * dval
        below = h < 0.0
        ylo[active] = np.where(below, y[active], ylo[active])
        yhi[active] = np.where(below, yhi[active], y[active])
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = y[active] - h / hd
        inside = (newton > ylo[active]) & (newton < yhi[active])
        slow = np.abs(h) * 2.0 > np.abs(step_old[active] * hd)
        use_bisect = ~inside | slow | ~np.isfinite(newton)
        y_new = np.where(use_bisect, 0.5 * (ylo[active] + yhi[active]), newton)
        y_new = np.where(h == 0.0, y[active], y_new)  # exact root: freeze in place
        step = np.abs(y_new - y[active])
        step_old[active] = step
        y[active] = y_new
        tol = 0.5 * _REL_TOL * np.maximum(1.0, np.abs(y_new))
        done = (step <= tol) | (h == 0.0)
        active = active[~done]
    else:
        if active.size:
            raise RuntimeError("quantile iteration failed to converge")
    return y


def gamma_cocdf_inverse(shape, p):
    """ln x solving Q(shape, x) = p; the (1-p)-th gamma(shape, 1) quantile in log domain.

    Returned in log scale so that tiny-shape quantiles (which underflow any
    linear float representation) remain usable downstream.
    """
    k = float(shape)
    if k <= 0.0:
        raise ValueError("shape must be positive")
    arr = np.asarray(p, dtype=np.float64)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError("p must lie strictly inside (0, 1)")
    flat = arr.ravel()
    out = np.empty(flat.shape)

    boundary = math.log(k + 1.0)
    ln_pb, _ = _log_lower_series(k, np.array([boundary]))
    ln_pb = float(ln_pb[0])
    s = 1.0 - flat
    ln_s = np.log(s)
    series = ln_s < ln_pb

    if series.any():
        tgt = ln_s[series]
        lgk1 = float(gammaln(k + 1.0))
        y_sm = np.minimum((tgt + lgk1) / k, boundary)
        x_sm = np.exp(y_sm)
        y_sm = np.minimum(y_sm + x_sm / (k + 1.0), boundary)
        # quick accept where the second-order small-x error is already negligible
        tol = _REL_TOL * np.maximum(1.0, np.abs(y_sm))
        quick = x_sm * x_sm / (k * (k + 1.0)) < 0.05 * tol
        res = y_sm.copy()
        rest = np.flatnonzero(~quick)
        if rest.size:
            if k <= 0.5:
                y0 = y_sm[rest]
            else:
                # Wilson-Hilferty start beats the small-x estimate at moderate shapes
                z = ndtri(1.0 - flat[series][rest])
                wh = k * np.maximum(1.0 - 1.0 / (9.0 * k) + z / (3.0 * math.sqrt(k)), 1e-3) ** 3
                y0 = np.minimum(np.log(wh), boundary)
            solved, left = _newton_monotone(k, y0, tgt[rest],
                                            _make_series_fast(_horner_depth(k)),
                                            hi=boundary)
            if left.size:
                solved[left] = _solve_monotone(k, solved[left], tgt[rest][left],
                                               _series_objective, increasing=True,
                                               y_max=boundary)
            res[rest] = solved
        out[series] = res

    cf = ~series
    if cf.any():
        pc = flat[cf]
        ln_p = np.log(pc)
        if k >= 0.5:
            # Wilson-Hilferty start: (X/k)^(1/3) approximately normal
            z = -ndtri(pc)
            x0 = k * np.maximum(1.0 - 1.0 / (9.0 * k) + z / (3.0 * math.sqrt(k)), 1e-3) ** 3
        else:
            x0 = np.maximum(-ln_p - float(gammaln(k)), k + 1.0)
            for _ in range(3):
                x0 = np.maximum(-ln_p - float(gammaln(k)) + (k - 1.0) * np.log(x0), k + 1.0)
        x0 = np.clip(x0, k + 1.0, 1e6)
        solved, left = _newton_monotone(k, np.log(x0), ln_p, _cf_objective, lo=boundary)
        if left.size:
            solved[left] = _solve_monotone(k, solved[left], ln_p[left], _cf_objective,
                                           increasing=False, y_min=boundary)
        out[cf] = solved

    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)
