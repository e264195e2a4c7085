# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels.

Each function here has a twin with the same signature and semantics in
``_pykernels``; ``ecsbell.kernels`` picks one at import time.
"""
import numpy as np

from libc.math cimport sqrt, exp, cos, sin, ceil


cdef inline double complex cexp_(double complex z) nogil:
    cdef double m = exp(z.real)
    return m * cos(z.imag) + 1j * (m * sin(z.imag))


cdef inline double complex conj_(double complex z) nogil:
    return z.real - 1j * z.imag


cdef inline double abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def displacement_matrix(int dim, double complex alpha):
    """Exact matrix elements <m|D(alpha)|n> for m, n < dim.

    Each diagonal k = m - n is filled from the normalized three-term Laguerre
    recurrence u_n = sqrt(n!/(n+k)!) L_n^(k)(|alpha|^2) * sqrt(k!), which stays
    accurate to rounding for the amplitudes used here (the naive column
    recurrence in the ladder operators does not).
    """
    out = np.zeros((dim, dim), dtype=np.complex128)
    cdef double complex[:, ::1] d = out
    cdef double[::1] u = np.empty(dim, dtype=np.float64)
    cdef double x = abs2(alpha)
    cdef double env = exp(-0.5 * x)
    cdef double complex pref = 1.0
    cdef double complex lower, upper
    cdef double sign = 1.0
    cdef int k, n, nmax
    for k in range(dim):
        if k > 0:
            pref = pref * alpha / sqrt(k)
            sign = -sign
        nmax = dim - k
        u[0] = 1.0
        if nmax > 1:
            u[1] = (1.0 + k - x) / sqrt(1.0 + k)
        for n in range(1, nmax - 1):
            u[n + 1] = ((2.0 * n + 1.0 + k - x) * u[n]
                        - sqrt(<double>n * (n + k)) * u[n - 1]) / sqrt((n + 1.0) * (n + 1.0 + k))
        lower = pref * env
        upper = sign * conj_(pref) * env
        for n in range(nmax):
            d[n + k, n] = lower * u[n]
            if k > 0:
                d[n, n + k] = upper * u[n]
    return out


cdef inline void _dp_block(double complex b, double complex a, double complex out[2][2]) nogil:
    # <s_x a| D(b) P D(b)^dag |s_y a> = <s_x a| D(2b) |-s_y a>
    cdef double complex gx, gy, v, z
    cdef int x, y
    cdef double sx, sy
    for x in range(2):
        sx = 1.0 if x == 0 else -1.0
        gx = sx * a
        for y in range(2):
            sy = 1.0 if y == 0 else -1.0
            gy = sy * a
            v = 2.0 * b - gy
            z = (-b * conj_(gy) + conj_(b) * gy
                 - 0.5 * abs2(gx) - 0.5 * abs2(v) + conj_(gx) * v)
            out[x][y] = cexp_(z)


cdef inline double _bw_corr(double complex m1[2][2], double complex m2[2][2],
                            double complex w[2][2], double norm_sq) nogil:
    cdef double complex acc = 0
    cdef int x, y
    for x in range(2):
        for y in range(2):
            acc = acc + w[x][y] * m1[x][y] * m2[x][y]
    return norm_sq * acc.real


cdef inline void _weights(double theta, double complex w[2][2]) nogil:
    cdef double complex ph = cos(theta) + 1j * sin(theta)
    w[0][0] = 1.0
    w[0][1] = ph
    w[1][0] = conj_(ph)
    w[1][1] = 1.0


def bw_correlation(double complex beta1, double complex beta2,
                   double complex alpha1, double complex alpha2, double theta):
    """Closed-form displaced-parity correlation on the entangled coherent state."""
    cdef double complex m1[2][2]
    cdef double complex m2[2][2]
    cdef double complex w[2][2]
    cdef double norm_sq = 1.0 / (2.0 + 2.0 * cos(theta) * exp(-2.0 * (abs2(alpha1) + abs2(alpha2))))
    _weights(theta, w)
    _dp_block(beta1, alpha1, m1)
    _dp_block(beta2, alpha2, m2)
    return _bw_corr(m1, m2, w, norm_sq)


def bw_signal(const double[::1] p, double complex alpha1, double complex alpha2, double theta):
    """CHSH combination of displaced-parity correlations.

    ``p`` packs (Re b1, Im b1, Re b2, Im b2, Re b1', Im b1', Re b2', Im b2').
    """
    cdef double complex m1[2][2]
    cdef double complex m1p[2][2]
    cdef double complex m2[2][2]
    cdef double complex m2p[2][2]
    cdef double complex w[2][2]
    cdef double norm_sq = 1.0 / (2.0 + 2.0 * cos(theta) * exp(-2.0 * (abs2(alpha1) + abs2(alpha2))))
    cdef double s
    _weights(theta, w)
    _dp_block(p[0] + 1j * p[1], alpha1, m1)
    _dp_block(p[2] + 1j * p[3], alpha2, m2)
    _dp_block(p[4] + 1j * p[5], alpha1, m1p)
    _dp_block(p[6] + 1j * p[7], alpha2, m2p)
    s = (_bw_corr(m1, m2, w, norm_sq) + _bw_corr(m1, m2p, w, norm_sq)
         + _bw_corr(m1p, m2, w, norm_sq) - _bw_corr(m1p, m2p, w, norm_sq))
    return s if s >= 0 else -s


cdef void _deriv(double complex[::1] g, double complex[::1] e,
                 double complex[::1] dg, double complex[::1] de,
                 double t, double chi, double omega, double delta, int dim) nogil:
    # i dg/dt = omega e^{-i delta t} e ;  i de/dt = chi n e + omega e^{i delta t} g
    cdef double complex ph = cos(delta * t) + 1j * sin(delta * t)
    cdef double complex ophc = omega * conj_(ph)
    cdef double complex oph = omega * ph
    cdef int n
    for n in range(dim):
        dg[n] = -1j * ophc * e[n]
        de[n] = -1j * (chi * n * e[n] + oph * g[n])


def rk4_dispersive(g0, e0, double chi, double omega, double delta, t_grid, double h_max):
    """Fixed-step RK4 for the driven dispersive Hamiltonian.

    Returns the qubit-ground and qubit-excited oscillator amplitudes at every
    time in ``t_grid`` as two arrays of shape (len(t_grid), dim).
    """
    cdef double[::1] ts = np.ascontiguousarray(t_grid, dtype=np.float64)
    cdef int nt = ts.shape[0]
    cdef int dim = len(g0)
    G_out = np.empty((nt, dim), dtype=np.complex128)
    E_out = np.empty((nt, dim), dtype=np.complex128)
    cdef double complex[:, ::1] Go = G_out
    cdef double complex[:, ::1] Eo = E_out
    cdef double complex[::1] g = np.array(g0, dtype=np.complex128)
    cdef double complex[::1] e = np.array(e0, dtype=np.complex128)
    cdef double complex[::1] k1g = np.empty(dim, np.complex128)
    cdef double complex[::1] k1e = np.empty(dim, np.complex128)
    cdef double complex[::1] k2g = np.empty(dim, np.complex128)
    cdef double complex[::1] k2e = np.empty(dim, np.complex128)
    cdef double complex[::1] k3g = np.empty(dim, np.complex128)
    cdef double complex[::1] k3e = np.empty(dim, np.complex128)
    cdef double complex[::1] k4g = np.empty(dim, np.complex128)
    cdef double complex[::1] k4e = np.empty(dim, np.complex128)
    cdef double complex[::1] tg = np.empty(dim, np.complex128)
    cdef double complex[::1] te = np.empty(dim, np.complex128)
    cdef int k, s, n, nsub
    cdef double t, h, span
    with nogil:
        for n in range(dim):
            Go[0, n] = g[n]
            Eo[0, n] = e[n]
        for k in range(nt - 1):
            span = ts[k + 1] - ts[k]
            nsub = <int>ceil(span / h_max - 1e-9)
            if nsub < 1:
                nsub = 1
            h = span / nsub
            t = ts[k]
            for s in range(nsub):
                _deriv(g, e, k1g, k1e, t, chi, omega, delta, dim)
                for n in range(dim):
                    tg[n] = g[n] + 0.5 * h * k1g[n]
                    te[n] = e[n] + 0.5 * h * k1e[n]
                _deriv(tg, te, k2g, k2e, t + 0.5 * h, chi, omega, delta, dim)
                for n in range(dim):
                    tg[n] = g[n] + 0.5 * h * k2g[n]
                    te[n] = e[n] + 0.5 * h * k2e[n]
                _deriv(tg, te, k3g, k3e, t + 0.5 * h, chi, omega, delta, dim)
                for n in range(dim):
                    tg[n] = g[n] + h * k3g[n]
                    te[n] = e[n] + h * k3e[n]
                _deriv(tg, te, k4g, k4e, t + h, chi, omega, delta, dim)
                for n in range(dim):
                    g[n] = g[n] + h / 6.0 * (k1g[n] + 2.0 * k2g[n] + 2.0 * k3g[n] + k4g[n])
                    e[n] = e[n] + h / 6.0 * (k1e[n] + 2.0 * k2e[n] + 2.0 * k3e[n] + k4e[n])
                t = ts[k] + (s + 1) * h
            for n in range(dim):
                Go[k + 1, n] = g[n]
                Eo[k + 1, n] = e[n]
    return G_out, E_out
