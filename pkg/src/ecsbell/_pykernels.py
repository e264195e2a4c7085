"""Pure-Python kernels, numerically equivalent to the compiled ``_kernels``."""
import cmath
import math

import numpy as np


def displacement_matrix(dim, alpha):
    """Exact matrix elements <m|D(alpha)|n> for m, n < dim (diagonal Laguerre recurrence)."""
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    env = math.exp(-0.5 * x)
    d = np.zeros((dim, dim), dtype=np.complex128)
    u = np.empty(dim, dtype=np.float64)
    pref = 1.0 + 0j
    for k in range(dim):
        if k > 0:
            pref *= alpha / math.sqrt(k)
        nmax = dim - k
        u[0] = 1.0
        if nmax > 1:
            u[1] = (1.0 + k - x) / math.sqrt(1.0 + k)
        for n in range(1, nmax - 1):
            u[n + 1] = ((2.0 * n + 1.0 + k - x) * u[n]
                        - math.sqrt(n * (n + k)) * u[n - 1]) / math.sqrt((n + 1.0) * (n + 1.0 + k))
        idx = np.arange(nmax)
        d[idx + k, idx] = pref * env * u[:nmax]
        if k > 0:
            d[idx, idx + k] = (-1) ** k * pref.conjugate() * env * u[:nmax]
    return d


def _dp_block(b, a):
    out = [[0j, 0j], [0j, 0j]]
    bc = b.conjugate()
    for x, sx in enumerate((1.0, -1.0)):
        gx = sx * a
        gxc = gx.conjugate()
        for y, sy in enumerate((1.0, -1.0)):
            gy = sy * a
            v = 2.0 * b - gy
            z = (-b * gy.conjugate() + bc * gy
                 - 0.5 * abs(gx) ** 2 - 0.5 * abs(v) ** 2 + gxc * v)
            out[x][y] = cmath.exp(z)
    return out


def _weights(theta):
    ph = cmath.exp(1j * theta)
    return ((1.0, ph), (ph.conjugate(), 1.0))


def _norm_sq(alpha1, alpha2, theta):
    return 1.0 / (2.0 + 2.0 * math.cos(theta)
                  * math.exp(-2.0 * (abs(alpha1) ** 2 + abs(alpha2) ** 2)))


def _bw_corr(m1, m2, w, norm_sq):
    acc = 0j
    for x in range(2):
        for y in range(2):
            acc += w[x][y] * m1[x][y] * m2[x][y]
    return norm_sq * acc.real


def bw_correlation(beta1, beta2, alpha1, alpha2, theta):
    """Closed-form displaced-parity correlation on the entangled coherent state."""
    alpha1, alpha2 = complex(alpha1), complex(alpha2)
    w = _weights(theta)
    return _bw_corr(_dp_block(complex(beta1), alpha1), _dp_block(complex(beta2), alpha2),
                    w, _norm_sq(alpha1, alpha2, theta))


def bw_signal(p, alpha1, alpha2, theta):
    """CHSH combination of displaced-parity correlations; ``p`` packs Re/Im pairs."""
    alpha1, alpha2 = complex(alpha1), complex(alpha2)
    w = _weights(theta)
    ns = _norm_sq(alpha1, alpha2, theta)
    m1 = _dp_block(complex(p[0], p[1]), alpha1)
    m2 = _dp_block(complex(p[2], p[3]), alpha2)
    m1p = _dp_block(complex(p[4], p[5]), alpha1)
    m2p = _dp_block(complex(p[6], p[7]), alpha2)
    s = (_bw_corr(m1, m2, w, ns) + _bw_corr(m1, m2p, w, ns)
         + _bw_corr(m1p, m2, w, ns) - _bw_corr(m1p, m2p, w, ns))
    return abs(s)


def rk4_dispersive(g0, e0, chi, omega, delta, t_grid, h_max):
    """Fixed-step RK4 for the driven dispersive Hamiltonian (see ``_kernels``)."""
    ts = np.asarray(t_grid, dtype=np.float64)
    g = np.array(g0, dtype=np.complex128)
    e = np.array(e0, dtype=np.complex128)
    cn = chi * np.arange(g.size)
    G = np.empty((ts.size, g.size), dtype=np.complex128)
    E = np.empty_like(G)
    G[0], E[0] = g, e

    def deriv(t, g, e):
        ph = cmath.exp(1j * delta * t)
        return -1j * omega * ph.conjugate() * e, -1j * (cn * e + omega * ph * g)

    for k in range(ts.size - 1):
        span = ts[k + 1] - ts[k]
        nsub = max(1, math.ceil(span / h_max - 1e-9))
        h = span / nsub
        for s in range(nsub):
            t = ts[k] + s * h
            k1g, k1e = deriv(t, g, e)
            k2g, k2e = deriv(t + 0.5 * h, g + 0.5 * h * k1g, e + 0.5 * h * k1e)
            k3g, k3e = deriv(t + 0.5 * h, g + 0.5 * h * k2g, e + 0.5 * h * k2e)
            k4g, k4e = deriv(t + h, g + h * k3g, e + h * k3e)
            g = g + h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
            e = e + h / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e)
        G[k + 1], E[k + 1] = g, e
    return G, E
