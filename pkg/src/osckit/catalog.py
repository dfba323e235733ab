"""Closed-form function catalog shared by all solvers.

Slow time factors are finite sums ``sum_i c_i t^{m_i} e^{g_i t}``; fast
profiles are zero-mean trigonometric polynomials in the fast phase ``tau``
with slow amplitudes; spatial envelopes are finite sine series on
``[0, pi]``.  The catalog is closed under termwise calculus, products, and
Duhamel convolution against ``e^{-n^2 (t-s)}``, so every time integral the
solvers need is evaluated in closed form instead of by time stepping.
Arbitrary callables are admitted only through sampling plus quadrature.
"""

from __future__ import annotations

import inspect
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CatalogError",
    "SlowFunction",
    "FastProfile",
    "SineSeries",
    "SourceFactor",
    "GridFunction",
    "sine_coefficients",
    "duhamel_weight",
    "duhamel_oscillatory",
    "duhamel_slow",
    "exp_kernel_moment",
]

# Relative window around gamma = -n^2 in which the symbolic Duhamel
# convolution switches to the polynomial (resonant) branch.
RESONANCE_RTOL = 1e-9


class CatalogError(ValueError):
    """Requested transform leaves the closed-form catalog."""


# ---------------------------------------------------------------------------
# slow time factors:  sum of c * t^m * e^{g t}
# ---------------------------------------------------------------------------

def _merged_terms(terms):
    acc: dict[tuple[int, float], float] = {}
    for coeff, power, rate in terms:
        coeff = float(coeff)
        power = int(power)
        rate = float(rate)
        if power < 0:
            raise CatalogError(f"negative power {power} not in catalog")
        if not (math.isfinite(coeff) and math.isfinite(rate)):
            raise CatalogError("non-finite term in slow function")
        key = (power, rate)
        acc[key] = acc.get(key, 0.0) + coeff
    out = tuple(
        (c, m, g) for (m, g), c in sorted(acc.items()) if c != 0.0
    )
    return out


class SlowFunction:
    """Finite sum ``sum_i c_i t^{m_i} e^{g_i t}`` with real rates.

    Closed under addition, scalar multiples, products, differentiation,
    multiplication by ``e^{a t}``, and integration from 0 to t.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        self.terms = _merged_terms(terms)

    @classmethod
    def zero(cls) -> "SlowFunction":
        return cls()

    @classmethod
    def constant(cls, value: float) -> "SlowFunction":
        return cls([(value, 0, 0.0)])

    @classmethod
    def monomial(cls, coeff: float, power: int, rate: float = 0.0) -> "SlowFunction":
        return cls([(coeff, power, rate)])

    # -- evaluation ---------------------------------------------------------

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        out = np.zeros_like(arr)
        for c, m, g in self.terms:
            out = out + c * arr**m * np.exp(g * arr)
        if arr.ndim == 0:
            return float(out)
        return out

    def sup_on(self, lo: float, hi: float, samples: int = 1025) -> float:
        grid = np.linspace(lo, hi, samples)
        return float(np.max(np.abs(self(grid))))

    # -- algebra ------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, SlowFunction):
            return SlowFunction(self.terms + other.terms)
        if isinstance(other, (int, float)):
            return SlowFunction(self.terms + ((float(other), 0, 0.0),))
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return SlowFunction(tuple((-c, m, g) for c, m, g in self.terms))

    def __sub__(self, other):
        return self + (-other if isinstance(other, SlowFunction) else -float(other))

    def __mul__(self, other):
        if isinstance(other, SlowFunction):
            prod = [
                (c1 * c2, m1 + m2, g1 + g2)
                for c1, m1, g1 in self.terms
                for c2, m2, g2 in other.terms
            ]
            return SlowFunction(prod)
        if isinstance(other, (int, float)):
            return SlowFunction(tuple((c * float(other), m, g) for c, m, g in self.terms))
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, SlowFunction) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        if not self.terms:
            return "SlowFunction(0)"
        bits = " + ".join(f"{c:g}*t^{m}*e^({g:g}t)" for c, m, g in self.terms)
        return f"SlowFunction({bits})"

    @property
    def is_zero(self) -> bool:
        return not self.terms

    # -- calculus -----------------------------------------------------------

    def derivative(self) -> "SlowFunction":
        out = []
        for c, m, g in self.terms:
            if m >= 1:
                out.append((c * m, m - 1, g))
            if g != 0.0:
                out.append((c * g, m, g))
        return SlowFunction(out)

    def integral(self) -> "SlowFunction":
        """Antiderivative vanishing at 0, i.e. t -> integral_0^t."""
        out = []
        for c, m, g in self.terms:
            if g == 0.0:
                out.append((c / (m + 1), m + 1, 0.0))
                continue
            fr = 1.0  # m!/(m-j)!
            for j in range(m + 1):
                out.append((c * (-1.0) ** j * fr / g ** (j + 1), m - j, g))
                fr *= m - j
            out.append((-c * (-1.0) ** m * math.factorial(m) / g ** (m + 1), 0, 0.0))
        return SlowFunction(out)

    def times_exp(self, rate: float) -> "SlowFunction":
        return SlowFunction(tuple((c, m, g + float(rate)) for c, m, g in self.terms))

    def reciprocal(self) -> "SlowFunction":
        """1/self, defined only for a single term c*e^{g t}."""
        if len(self.terms) != 1 or self.terms[0][1] != 0:
            raise CatalogError(
                "reciprocal only exists in the catalog for a single exponential term"
            )
        c, _, g = self.terms[0]
        return SlowFunction([(1.0 / c, 0, -g)])


def _as_slow(value) -> SlowFunction:
    if isinstance(value, SlowFunction):
        return value
    if isinstance(value, (int, float)):
        return SlowFunction.constant(float(value))
    raise CatalogError(f"cannot interpret {value!r} as a slow function")


# ---------------------------------------------------------------------------
# fast profiles:  sum_k a_k(t) cos(k tau) + b_k(t) sin(k tau),  k >= 1
# ---------------------------------------------------------------------------

class FastProfile:
    """Zero-mean 2*pi-periodic trig polynomial in the fast phase.

    Stored as harmonics ``(k, a_k, b_k)`` with slow amplitudes; the absence
    of a k = 0 term makes the zero fast mean structural.
    """

    __slots__ = ("harmonics",)

    def __init__(self, harmonics=()):
        acc: dict[int, list[SlowFunction]] = {}
        for k, a, b in harmonics:
            k = int(k)
            if k < 1:
                raise CatalogError("fast harmonics require k >= 1 (zero mean)")
            a = _as_slow(a)
            b = _as_slow(b)
            if k in acc:
                acc[k][0] = acc[k][0] + a
                acc[k][1] = acc[k][1] + b
            else:
                acc[k] = [a, b]
        self.harmonics = tuple(
            (k, a, b)
            for k, (a, b) in sorted(acc.items())
            if not (a.is_zero and b.is_zero)
        )

    @classmethod
    def zero(cls) -> "FastProfile":
        return cls()

    @classmethod
    def harmonic(cls, k: int, cos=0.0, sin=0.0) -> "FastProfile":
        return cls([(k, cos, sin)])

    def __call__(self, t, tau):
        t = np.asarray(t, dtype=float)
        tau_arr = np.asarray(tau, dtype=float)
        out = np.zeros(np.broadcast(t, tau_arr).shape)
        for k, a, b in self.harmonics:
            out = out + a(t) * np.cos(k * tau_arr) + b(t) * np.sin(k * tau_arr)
        if out.ndim == 0:
            return float(out)
        return out

    def __add__(self, other):
        if not isinstance(other, FastProfile):
            return NotImplemented
        return FastProfile(self.harmonics + other.harmonics)

    def __eq__(self, other):
        return isinstance(other, FastProfile) and self.harmonics == other.harmonics

    def __hash__(self):
        return hash(self.harmonics)

    def __repr__(self):
        return f"FastProfile({len(self.harmonics)} harmonics)"

    @property
    def is_zero(self) -> bool:
        return not self.harmonics

    def scale(self, factor: float) -> "FastProfile":
        return FastProfile([(k, a * float(factor), b * float(factor)) for k, a, b in self.harmonics])

    def scale_slow(self, s: SlowFunction) -> "FastProfile":
        return FastProfile([(k, a * s, b * s) for k, a, b in self.harmonics])

    def divide_slow(self, s: SlowFunction) -> "FastProfile":
        return self.scale_slow(s.reciprocal())

    # -- fast-phase calculus --------------------------------------------

    def antiderivative_zero_mean(self) -> "FastProfile":
        """tau -> integral_0^tau minus its fast mean (again zero mean).

        Termwise: cos(k tau) integrates to sin(k tau)/k; sin(k tau)
        integrates to (1 - cos(k tau))/k whose mean 1/k is removed.
        """
        return FastProfile(
            [(k, b * (-1.0 / k), a * (1.0 / k)) for k, a, b in self.harmonics]
        )

    def tau_derivative(self) -> "FastProfile":
        return FastProfile(
            [(k, b * float(k), a * float(-k)) for k, a, b in self.harmonics]
        )

    def antiderivative_fast_mean(self) -> SlowFunction:
        """The fast mean of tau -> integral_0^tau, i.e. sum_k b_k(t)/k."""
        out = SlowFunction.zero()
        for k, _, b in self.harmonics:
            out = out + b * (1.0 / k)
        return out


# ---------------------------------------------------------------------------
# finite sine series on [0, pi]
# ---------------------------------------------------------------------------

class SineSeries:
    """``u(x, t) = sum_{n>=1} c_n(t) sin(n x)`` with catalog coefficients.

    Coefficients are SlowFunctions (constants are wrapped); a plain callable
    ``t -> value`` is also accepted for sampled data, in which case the
    exact transforms (``at_x``, kernels, Duhamel) are unavailable.
    """

    __slots__ = ("modes",)

    def __init__(self, modes=None):
        cleaned: dict[int, object] = {}
        for n, value in (modes or {}).items():
            n = int(n)
            if n < 1:
                raise CatalogError("sine series modes start at n = 1")
            if isinstance(value, (int, float, SlowFunction)):
                value = _as_slow(value)
                if value.is_zero:
                    continue
            elif not callable(value):
                raise CatalogError(f"mode {n} coefficient {value!r} unusable")
            cleaned[n] = value
        self.modes = dict(sorted(cleaned.items()))

    @classmethod
    def from_coefficients(cls, coeffs) -> "SineSeries":
        """Build from an iterable of numbers, coefficient of sin((i+1) x)."""
        return cls({i + 1: c for i, c in enumerate(coeffs)})

    @property
    def max_mode(self) -> int:
        return max(self.modes) if self.modes else 0

    @property
    def is_catalog(self) -> bool:
        return all(isinstance(v, SlowFunction) for v in self.modes.values())

    @property
    def is_zero(self) -> bool:
        return not self.modes

    def coefficient(self, n: int) -> SlowFunction:
        value = self.modes.get(int(n), SlowFunction.zero())
        if not isinstance(value, SlowFunction):
            raise CatalogError(f"mode {n} coefficient is sampled, not catalog")
        return value

    def __eq__(self, other):
        return isinstance(other, SineSeries) and self.modes == other.modes

    def __hash__(self):
        return hash(tuple(self.modes.items()))

    def __repr__(self):
        return f"SineSeries(modes={sorted(self.modes)})"

    def __call__(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        out = np.zeros(np.broadcast(x, np.asarray(t, float)).shape)
        for n, coeff in self.modes.items():
            out = out + coeff(t) * np.sin(n * x)
        if out.ndim == 0:
            return float(out)
        return out

    def evaluate_grid(self, x, t) -> np.ndarray:
        """Values on the tensor grid, shape ``(len(x), len(t))``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((x.size, t.size))
        for n, coeff in self.modes.items():
            ct = coeff(t) if isinstance(coeff, SlowFunction) else np.asarray(coeff(t), float)
            out += np.outer(np.sin(n * x), np.broadcast_to(ct, t.shape))
        return out

    def at_x(self, x0: float) -> SlowFunction:
        """The slow trace ``t -> u(x0, t)`` (catalog coefficients only)."""
        out = SlowFunction.zero()
        for n in self.modes:
            out = out + self.coefficient(n) * math.sin(n * x0)
        return out

    def scale(self, factor: float) -> "SineSeries":
        return SineSeries({n: self.coefficient(n) * float(factor) for n in self.modes})


# ---------------------------------------------------------------------------
# source time factor r(t, tau) = mean(t) + oscillation(t, tau)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SourceFactor:
    """Time factor split into mean part and zero-fast-mean oscillation."""

    mean: SlowFunction
    oscillation: FastProfile

    @classmethod
    def steady(cls, mean) -> "SourceFactor":
        return cls(_as_slow(mean), FastProfile.zero())

    def __call__(self, t, tau):
        t_arr = np.asarray(t, dtype=float)
        tau_arr = np.asarray(tau, dtype=float)
        out = self.mean(t_arr) + np.zeros(np.broadcast(t_arr, tau_arr).shape)
        if not self.oscillation.is_zero:
            out = out + self.oscillation(t_arr, tau_arr)
        return float(out) if out.ndim == 0 else out

    @property
    def is_zero(self) -> bool:
        return self.mean.is_zero and self.oscillation.is_zero


# ---------------------------------------------------------------------------
# grid functions
# ---------------------------------------------------------------------------

@dataclass
class GridFunction:
    """Values on a uniform 1-D or tensor 2-D grid, with sup-norm algebra."""

    axes: tuple[np.ndarray, ...]
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        self.values = np.asarray(self.values, dtype=float)
        for a in self.axes:
            if a.size < 2:
                raise ValueError("grid axes need at least 2 nodes")
        if self.values.shape != tuple(a.size for a in self.axes):
            raise ValueError("grid values shape does not match axes")

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def sup_diff(self, other: "GridFunction") -> float:
        if not all(np.array_equal(a, b) for a, b in zip(self.axes, other.axes)):
            raise ValueError("sup_diff requires identical grids")
        return float(np.max(np.abs(self.values - other.values)))

    def interp(self, point: float) -> float:
        """Linear interpolation, 1-D grids only."""
        if len(self.axes) != 1:
            raise ValueError("interp is defined for 1-D grid functions")
        return float(np.interp(point, self.axes[0], self.values))


# ---------------------------------------------------------------------------
# sine coefficients by composite Gauss-Legendre quadrature
# ---------------------------------------------------------------------------

def _gauss_nodes(panels: int, points: int = 16):
    ref_x, ref_w = np.polynomial.legendre.leggauss(points)
    edges = np.linspace(0.0, math.pi, panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    nodes = (mid[:, None] + half[:, None] * ref_x[None, :]).ravel()
    weights = (half[:, None] * ref_w[None, :]).ravel()
    return nodes, weights


def _coefficients_once(sample, n_max: int, panels: int) -> np.ndarray:
    nodes, weights = _gauss_nodes(panels)
    vals = np.asarray(sample(nodes), dtype=float)
    if vals.shape != nodes.shape:
        raise ValueError("sampled integrand has wrong shape")
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite sample value in sine_coefficients input")
    ns = np.arange(1, n_max + 1)
    sines = np.sin(np.outer(ns, nodes))
    return (2.0 / math.pi) * sines @ (weights * vals)


def sine_coefficients(func, n_max: int, quadrature_points: int | None = None,
                      tol: float = 1e-12) -> SineSeries:
    """Sine coefficients ``(2/pi) * integral_0^pi f(x) sin(n x) dx``.

    Composite Gauss-Legendre, with the panel count doubled until two
    successive passes agree to ``tol``.  ``func`` may take ``x`` alone or
    ``(x, t)``; in the latter case the coefficients are returned as plain
    callables of t (sampled data, outside the exact catalog).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    try:
        arity = len(inspect.signature(func).parameters)
    except (TypeError, ValueError):
        arity = 1

    def run(sample):
        panels = quadrature_points or max(8, n_max)
        prev = _coefficients_once(sample, n_max, panels)
        for _ in range(8):
            panels *= 2
            cur = _coefficients_once(sample, n_max, panels)
            if np.max(np.abs(cur - prev)) < tol:
                return cur
            prev = cur
        return prev

    if arity >= 2:
        def make_coeff(n):
            def coeff(t):
                tv = np.asarray(t, dtype=float)
                if tv.ndim == 0:
                    return run(lambda x: func(x, float(tv)))[n - 1]
                return np.array([run(lambda x: func(x, ti))[n - 1] for ti in tv])
            return coeff
        return SineSeries({n: make_coeff(n) for n in range(1, n_max + 1)})

    coeffs = run(func)
    return SineSeries({n: c for n, c in zip(range(1, n_max + 1), coeffs) if abs(c) > 1e-300})


# ---------------------------------------------------------------------------
# Duhamel convolutions against e^{-n^2 (t - s)}
# ---------------------------------------------------------------------------

def exp_kernel_moment(power: int, rate: complex, decay: complex, t) -> np.ndarray:
    """``integral_0^t e^{-decay (t-s)} s^power e^{rate s} ds``.

    Complex-safe and vectorized in t.  Large ``decay`` never enters a bare
    exponential (only ``e^{rate t}`` and ``e^{-decay t}`` appear), and a
    power series takes over where ``|rate + decay| * t <= 1`` so the
    near-resonant regime loses no digits to cancellation.
    """
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    lam = complex(rate) + complex(decay)
    out = np.empty(arr.shape, dtype=complex)

    small = np.abs(lam) * np.abs(arr) <= 1.0
    if small.any():
        ts = arr[small]
        acc = np.zeros(ts.shape, dtype=complex)
        coef = 1.0 + 0.0j  # lam^p / p!
        for p in range(40):
            acc += coef * ts ** (power + p + 1) / (power + p + 1)
            coef *= lam / (p + 1)
        out[small] = np.exp(-complex(decay) * ts) * acc

    big = ~small
    if big.any():
        tb = arr[big]
        e_rate = np.exp(complex(rate) * tb)
        e_decay = np.exp(-complex(decay) * tb)
        s = np.zeros(tb.shape, dtype=complex)
        fr = 1.0  # power!/(power-j)!
        for j in range(power + 1):
            s += (-1.0) ** j * fr * tb ** (power - j) / lam ** (j + 1)
            fr *= power - j
        tail = (-1.0) ** (power + 1) * math.factorial(power) / lam ** (power + 1)
        out[big] = s * e_rate + tail * e_decay

    return out[0] if scalar else out


def duhamel_weight(n: int, g: SlowFunction, t):
    """``integral_0^t e^{-n^2 (t-s)} g(s) ds`` in closed form."""
    n2 = float(n) * float(n)
    arr = np.asarray(t, dtype=float)
    out = np.zeros(arr.shape)
    for c, m, rate in g.terms:
        out = out + c * exp_kernel_moment(m, rate, n2, arr).real
    if arr.ndim == 0:
        return float(out)
    return out


def duhamel_oscillatory(n: int, g: SlowFunction, frequency: float, t) -> np.ndarray:
    """``integral_0^t e^{-n^2 (t-s)} g(s) e^{i * frequency * s} ds`` (complex).

    Real part gives the cos-modulated integral, imaginary part the
    sin-modulated one.
    """
    n2 = float(n) * float(n)
    arr = np.asarray(t, dtype=float)
    out = np.zeros(arr.shape, dtype=complex)
    for c, m, rate in g.terms:
        out = out + c * exp_kernel_moment(m, rate + 1j * frequency, n2, arr)
    return out


def duhamel_slow(n: int, g: SlowFunction) -> SlowFunction:
    """``t -> integral_0^t e^{-n^2 (t-s)} g(s) ds`` as a SlowFunction.

    A term with rate within RESONANCE_RTOL of -n^2 takes the polynomial
    branch ``c t^{m+1} e^{-n^2 t} / (m+1)``, keeping the closed form
    continuous across the resonance.
    """
    n2 = float(n) * float(n)
    out = []
    for c, m, rate in g.terms:
        lam = rate + n2
        if abs(lam) < RESONANCE_RTOL * max(1.0, n2):
            out.append((c / (m + 1), m + 1, -n2))
            continue
        fr = 1.0
        for j in range(m + 1):
            out.append((c * (-1.0) ** j * fr / lam ** (j + 1), m - j, rate))
            fr *= m - j
        out.append((c * (-1.0) ** (m + 1) * math.factorial(m) / lam ** (m + 1), 0, -n2))
    return SlowFunction(out)
