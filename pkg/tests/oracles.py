"""Brute-force reference implementations written straight from the definitions.

Everything here uses explicit Python loops over ``cmath`` so that it shares
no code path with the package.
"""

import cmath
import math


def trace(x, L):
    N = len(x)
    R = -(-N // L)
    Z = [[0.0] * N for _ in range(R)]
    for p in range(R):
        for k in range(N):
            acc = 0j
            for n in range(N):
                acc += x[n] * x[(n + p * L) % N] * cmath.exp(-2j * math.pi * n * k / N)
            Z[p][k] = abs(acc) ** 2
    return Z


def transformed(x, L):
    """Quadruple-product form of the per-delay autocorrelations."""
    N = len(x)
    R = -(-N // L)
    Y = [[0j] * N for _ in range(R)]
    for p in range(R):
        s = p * L
        for ell in range(N):
            acc = 0j
            for n in range(N):
                acc += (x[n] * x[(n + ell) % N].conjugate()
                        * x[(n + s) % N] * x[(n + ell + s) % N].conjugate())
            Y[p][ell] = acc
    return Y


def loss(z, Z, L, mu):
    N = len(z)
    R = len(Z)
    total = 0.0
    for p in range(R):
        for k in range(N):
            acc = 0j
            for n in range(N):
                acc += z[n] * z[(n + p * L) % N] * cmath.exp(-2j * math.pi * n * k / N)
            total += (math.sqrt(abs(acc) ** 2 + mu * mu) - math.sqrt(Z[p][k])) ** 2
    return total / (N * R)


def fd_gradient(z, Z, L, mu, h=1e-6):
    """Wirtinger gradient d/d conj(z) from central differences of ``loss``.

    For real ``f``, ``df/d conj(z_j) = (df/da_j + i df/db_j) / 2``.
    """
    N = len(z)
    g = []
    for j in range(N):
        parts = []
        for step in (h, 1j * h):
            zp = list(z)
            zm = list(z)
            zp[j] += step
            zm[j] -= step
            parts.append((loss(zp, Z, L, mu) - loss(zm, Z, L, mu)) / (2 * h))
        g.append(0.5 * (parts[0] + 1j * parts[1]))
    return g
