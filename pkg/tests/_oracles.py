"""Independent numerical oracles for the test suite.

Everything here deliberately avoids the closed-form paths under test:
Duhamel integrals are done by direct composite Gauss-Legendre quadrature
resolving the fast phase, derivatives by central differences, fast means by
trapezoid over one period.
"""

import math

import numpy as np
from scipy.integrate import quad

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def gauss_panels(a: float, b: float, panels: int):
    edges = np.linspace(a, b, panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    nodes = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    weights = (half[:, None] * _GL_W[None, :]).ravel()
    return nodes, weights


def duhamel_quadrature(forcing, n: int, t: float, omega: float = 1.0,
                       per_period: int = 32, min_panels: int = 64) -> float:
    """integral_0^t e^{-n^2 (t-s)} forcing(s) ds by oscillation-resolving GL."""
    if t == 0.0:
        return 0.0
    periods = omega * t / (2.0 * math.pi)
    panels = max(min_panels, int(math.ceil(per_period * periods)))
    nodes, weights = gauss_panels(0.0, t, panels)
    vals = np.asarray(forcing(nodes), dtype=float) * np.exp(-float(n * n) * (t - nodes))
    return float(weights @ vals)


def mode_oracle(envelope, factor, omega: float, n: int, t_nodes,
                per_period: int = 32) -> np.ndarray:
    """Heat-mode amplitudes u_n(t_j) by direct resolving quadrature."""
    fn = envelope.coefficient(n)

    def forcing(s):
        return np.asarray(fn(s), dtype=float) * factor(s, omega * s)

    return np.array([duhamel_quadrature(forcing, n, float(t), omega, per_period)
                     for t in np.atleast_1d(t_nodes)])


def field_oracle(envelope, factor, omega: float, x_nodes, t_nodes,
                 n_max: int = 32, per_period: int = 32) -> np.ndarray:
    out = np.zeros((len(x_nodes), len(t_nodes)))
    for n in envelope.modes:
        if n > n_max:
            continue
        amps = mode_oracle(envelope, factor, omega, n, t_nodes, per_period)
        out += np.outer(np.sin(n * np.asarray(x_nodes)), amps)
    return out


def adaptive_integral(func, a: float, b: float) -> float:
    val, _ = quad(func, a, b, epsabs=1e-14, epsrel=1e-13, limit=400)
    return val


def fast_mean(profile, t: float, samples: int = 4096) -> float:
    """(2 pi)^-1 integral_0^{2 pi} profile(t, tau) dtau by trapezoid."""
    tau = np.linspace(0.0, 2.0 * math.pi, samples + 1)
    vals = profile(t, tau)
    return float(np.trapezoid(vals, tau) / (2.0 * math.pi))


def central_derivative(func, point: float, h: float = 1e-5) -> float:
    return (func(point + h) - func(point - h)) / (2.0 * h)
