"""Spherical Bessel, Neumann and Hankel functions and Legendre polynomials.

All routines build whole tables over the order ``n = 0..nmax`` because every
consumer in this package sums a series over ``n``.  Tables have shape
``(nmax + 1,) + np.shape(x)``.

The time convention is ``exp(-i omega t)``, so ``h1 = j + i y`` is the
outgoing radial solution.
"""

import numpy as np

# Arguments below this magnitude are rejected; nothing here is evaluated at
# the origin.
ARG_FLOOR = 1e-12

_RESCALE_AT = 1e250


def _as_argument(x):
    x = np.asarray(x)
    if not np.iscomplexobj(x):
        x = x.astype(float)
    if np.any(np.abs(x) < ARG_FLOOR):
        raise ValueError(f"radial argument must satisfy |x| >= {ARG_FLOOR}")
    if np.iscomplexobj(x):
        if np.any(x.imag < 0) or np.any(x.real <= 0):
            raise ValueError("complex radial argument must have Re x > 0, Im x >= 0")
    elif np.any(x <= 0):
        raise ValueError("radial argument must be positive")
    return x


def _j0_j1(x):
    s, c = np.sin(x), np.cos(x)
    return s / x, s / x**2 - c / x


def _start_order(nmax, xmax):
    m = max(nmax, xmax)
    return int(m + np.sqrt(40.0 * (m + 1)) + 16)


def spherical_jn_table(nmax, x):
    """Table of ``j_n(x)`` for ``n = 0..nmax``.

    Upward recurrence is used when every argument exceeds ``nmax`` (the
    oscillatory regime, where it is stable).  Otherwise the whole table comes
    from downward (Miller) recurrence, normalized against whichever closed
    form ``j_0`` or ``j_1`` is larger in magnitude.  Complex arguments with
    ``Im x >= 0`` are accepted for penetrable media.
    """
    x = _as_argument(x)
    nmax = int(nmax)
    if nmax < 0:
        raise ValueError("nmax must be non-negative")
    requested = nmax
    nmax = max(nmax, 1)
    dtype = complex if np.iscomplexobj(x) else float
    out = np.empty((nmax + 1,) + x.shape, dtype=dtype)
    j0, j1 = _j0_j1(x)
    absx = np.abs(x)

    if nmax <= absx.min() and absx.min() >= 1.0:
        out[0] = j0
        out[1] = j1
        for n in range(1, nmax):
            out[n + 1] = (2 * n + 1) / x * out[n] - out[n - 1]
        return out[: requested + 1]

    start = _start_order(nmax, float(absx.max()))
    f_next = np.zeros(x.shape, dtype=dtype)
    f_cur = np.full(x.shape, 1e-30, dtype=dtype)
    out[:] = 0
    for n in range(start, 0, -1):
        f_prev = (2 * n + 1) / x * f_cur - f_next
        if n <= nmax:
            out[n] = f_cur
        f_next, f_cur = f_cur, f_prev
        big = np.abs(f_cur) > _RESCALE_AT
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE_AT, 1.0)
            f_cur = f_cur * scale
            f_next = f_next * scale
            lo = min(n, nmax + 1)
            out[lo:] *= scale
    out[0] = f_cur

    use_j0 = np.abs(j0) >= np.abs(j1)
    ref = np.where(use_j0, j0, j1)
    raw = np.where(use_j0, out[0], out[1])
    out *= ref / raw
    # Closed forms at the two lowest orders; j_1's form cancels badly for small x.
    out[0] = j0
    out[1] = np.where(absx >= 0.5, j1, out[1])
    return out[: requested + 1]


def spherical_yn_table(nmax, x):
    """Table of ``y_n(x)`` by upward recurrence from the closed forms (real ``x``)."""
    x = _as_argument(x)
    if np.iscomplexobj(x):
        raise ValueError("spherical_yn_table supports real arguments only")
    nmax = int(nmax)
    out = np.empty((max(nmax, 1) + 1,) + x.shape)
    s, c = np.sin(x), np.cos(x)
    out[0] = -c / x
    out[1] = -c / x**2 - s / x
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, nmax):
            out[n + 1] = (2 * n + 1) / x * out[n] - out[n - 1]
    return out[: nmax + 1]


def spherical_h1_table(nmax, x):
    """Table of ``h1_n(x) = j_n(x) + i y_n(x)`` for real ``x``."""
    return spherical_jn_table(nmax, x) + 1j * spherical_yn_table(nmax, x)


def derivative_table(table, x):
    """Derivatives of a spherical-function table via ``f_n' = f_{n-1} - (n+1)/x f_n``.

    ``table`` must hold orders ``0..nmax+1``; the result holds ``0..nmax``.
    The row ``n = 0`` uses ``f_0' = -f_1``.
    """
    x = np.asarray(x)
    nmax = table.shape[0] - 2
    if nmax < 0:
        raise ValueError("derivative table needs at least orders 0 and 1")
    out = np.empty((nmax + 1,) + table.shape[1:], dtype=table.dtype)
    out[0] = -table[1]
    n = np.arange(1, nmax + 1).reshape((-1,) + (1,) * x.ndim)
    with np.errstate(over="ignore", invalid="ignore"):
        out[1:] = table[: nmax] - (n + 1) / x * table[1 : nmax + 1]
    return out


def legendre_table(nmax, t):
    """Table of ``P_n(t)`` for ``n = 0..nmax`` by the three-term recurrence."""
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1 + 1e-12):
        raise ValueError("Legendre argument must lie in [-1, 1]")
    t = np.clip(t, -1.0, 1.0)
    out = np.empty((nmax + 1,) + t.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = t
    for n in range(1, nmax):
        out[n + 1] = ((2 * n + 1) * t * out[n] - n * out[n - 1]) / (n + 1)
    return out


def spherical_j(n, x):
    """Spherical Bessel function ``j_n(x)``."""
    return spherical_jn_table(n, x)[n]


def spherical_y(n, x):
    """Spherical Neumann function ``y_n(x)``."""
    return spherical_yn_table(n, x)[n]


def spherical_h1(n, x):
    """Spherical Hankel function of the first kind ``h1_n(x)``."""
    return spherical_h1_table(n, x)[n]


def spherical_j_prime(n, x):
    return derivative_table(spherical_jn_table(n + 1, x), x)[n]


def spherical_y_prime(n, x):
    return derivative_table(spherical_yn_table(n + 1, x), x)[n]


def spherical_h1_prime(n, x):
    return derivative_table(spherical_h1_table(n + 1, x), x)[n]


def legendre_p(n, t):
    """Legendre polynomial ``P_n(t)``."""
    return legendre_table(n, t)[n]
