"""Function spaces on the circle R/Z and on compact intervals.

``GridFunction`` represents a real 1-periodic function by N equispaced
samples with trigonometric interpolation (spectrally accurate for smooth
data).  ``IntervalFunction`` represents a function on [a, b] by equispaced
samples with piecewise-cubic interpolation.  Both support the computable
surrogates used throughout the library for Hölder seminorms and C^r norms:
the seminorm is the sup of difference quotients over a deterministic set of
dyadic node pairs plus seeded pseudo-random pairs, hence always a lower
bound of the true seminorm.  All objects are immutable; operations return
new values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import OutOfDomainError

DEFAULT_SEED = 0x5EED

# Dyadic pair distances 2^-1 .. 2^-DYADIC_LEVELS enter every seminorm estimate.
DYADIC_LEVELS = 16

# Block size for interpolation at many points (bounds the dense kernel matrix).
_EVAL_CHUNK = 16384

# Pairs closer than this are discarded: difference quotients of rounding noise
# would otherwise pollute the sup.
_MIN_PAIR_DISTANCE = 1e-9


def circle_nodes(n: int) -> np.ndarray:
    """Equispaced nodes x_j = j/n on R/Z."""
    return np.arange(n) / n


def circle_distance(x, y):
    """Flat metric on R/Z: d(x, y) = min(|x-y|, 1-|x-y|)."""
    d = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)) % 1.0
    return np.minimum(d, 1.0 - d)


def interpolation_matrix(points, n: int) -> np.ndarray:
    """Dense matrix taking samples at the n circle nodes to values at `points`.

    Rows are the periodic cardinal functions sin(n*pi*t)*cot(pi*t)/n
    (t = distance to the node), the interpolant that reproduces trigonometric
    polynomials of degree < n/2 exactly and treats the Nyquist mode as a
    cosine.  Points within ~1e-12 of a node get an exact one-hot row.
    """
    pts = np.asarray(points, dtype=float).ravel() % 1.0
    t = (pts[:, None] - circle_nodes(n)[None, :]) % 1.0
    s = np.sin(np.pi * t)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.sin(np.pi * n * t) * np.cos(np.pi * t) / (n * s)
    hit_row, hit_col = np.nonzero(np.abs(s) < 1e-12)
    if hit_row.size:
        vals[hit_row] = 0.0
        vals[hit_row, hit_col] = 1.0
    return vals


@lru_cache(maxsize=32)
def differentiation_matrix(n: int) -> np.ndarray:
    """Spectral differentiation matrix on the n-point periodic grid."""
    coeffs = np.fft.rfft(np.eye(n), axis=0)
    k = np.arange(n // 2 + 1)
    coeffs *= (2j * np.pi * k)[:, None]
    coeffs[-1, :] = 0.0  # Nyquist mode has no sampled derivative
    mat = np.fft.irfft(coeffs, n, axis=0)
    mat.flags.writeable = False
    return mat


class GridFunction:
    """Real 1-periodic function given by N equispaced samples, N even >= 8."""

    __slots__ = ("samples",)

    def __init__(self, samples):
        arr = np.array(samples, dtype=float, copy=True)
        if arr.ndim != 1:
            raise ValueError("samples must be a one-dimensional vector")
        if arr.size < 8 or arr.size % 2 != 0:
            raise ValueError(f"resolution must be an even integer >= 8, got {arr.size}")
        arr.flags.writeable = False
        self.samples = arr

    @property
    def resolution(self) -> int:
        return self.samples.size

    @property
    def nodes(self) -> np.ndarray:
        return circle_nodes(self.resolution)

    @classmethod
    def from_callable(cls, f, n: int) -> "GridFunction":
        vals = np.asarray(f(circle_nodes(n)), dtype=float)
        if vals.ndim == 0:
            vals = np.full(n, float(vals))
        return cls(vals)

    @classmethod
    def constant(cls, value: float, n: int) -> "GridFunction":
        return cls(np.full(n, float(value)))

    def eval(self, x):
        """Evaluate the trigonometric interpolant at x (scalar or array), 1-periodically."""
        pts = np.asarray(x, dtype=float)
        flat = np.atleast_1d(pts).ravel()
        out = np.empty(flat.size)
        n = self.resolution
        for i in range(0, flat.size, _EVAL_CHUNK):
            block = flat[i : i + _EVAL_CHUNK]
            out[i : i + _EVAL_CHUNK] = interpolation_matrix(block, n) @ self.samples
        if pts.ndim == 0:
            return float(out[0])
        return out.reshape(pts.shape)

    def derivative(self) -> "GridFunction":
        """Spectral derivative; exact for trigonometric polynomials of degree < N/2."""
        n = self.resolution
        c = np.fft.rfft(self.samples)
        c *= 2j * np.pi * np.arange(c.size)
        c[-1] = 0.0
        return GridFunction(np.fft.irfft(c, n))

    def antiderivative(self) -> "GridFunction":
        """Mean-zero periodic primitive; the mean of self is discarded."""
        n = self.resolution
        c = np.fft.rfft(self.samples)
        k = np.arange(c.size)
        c[0] = 0.0
        c[1:] = c[1:] / (2j * np.pi * k[1:])
        return GridFunction(np.fft.irfft(c, n))

    def mean(self) -> float:
        return float(self.samples.mean())

    # -- arithmetic (sample-wise; resolutions must match) --

    def _other_samples(self, other):
        if isinstance(other, GridFunction):
            if other.resolution != self.resolution:
                raise ValueError("resolution mismatch")
            return other.samples
        return other

    def __add__(self, other):
        return GridFunction(self.samples + self._other_samples(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.samples - self._other_samples(other))

    def __rsub__(self, other):
        return GridFunction(self._other_samples(other) - self.samples)

    def __mul__(self, other):
        return GridFunction(self.samples * self._other_samples(other))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(-self.samples)

    def __repr__(self):
        return f"GridFunction(n={self.resolution})"


def differentiate(f: GridFunction) -> GridFunction:
    """Trigonometric-interpolant derivative of a periodic grid function."""
    return f.derivative()


def antiderivative(f: GridFunction) -> GridFunction:
    """Mean-zero periodic primitive of a periodic grid function."""
    return f.antiderivative()


def compose(f: GridFunction, g: GridFunction) -> GridFunction:
    """Sample-wise composition f(g(x_j)), with g read modulo 1."""
    if f.resolution != g.resolution:
        raise ValueError("resolution mismatch")
    return GridFunction(f.eval(g.samples % 1.0))


@dataclass(frozen=True)
class DualFunctional:
    """Linear functional on grid functions: <l, f> = sum_j weights[j] * f[j]."""

    weights: np.ndarray

    def __post_init__(self):
        arr = np.array(self.weights, dtype=float, copy=True)
        arr.flags.writeable = False
        object.__setattr__(self, "weights", arr)

    @classmethod
    def lebesgue(cls, n: int) -> "DualFunctional":
        """Normalized Lebesgue measure: weights 1/n, <l, 1> = 1."""
        return cls(np.full(n, 1.0 / n))

    def pair(self, f) -> float:
        samples = f.samples if isinstance(f, GridFunction) else np.asarray(f, dtype=float)
        return float(self.weights @ samples)

    __call__ = pair


class IntervalFunction:
    """Function on [a, b] given by M >= 8 equispaced samples, cubic-spline interpolated.

    The interpolant is a not-a-knot cubic spline, which is linear in the data
    (so composition operators built on it are genuine matrices) and whose
    endpoint derivatives come from one-sided information.
    """

    __slots__ = ("samples", "a", "b", "_spline")

    def __init__(self, samples, a: float = -1.0, b: float = 1.0):
        arr = np.array(samples, dtype=float, copy=True)
        if arr.ndim != 1:
            raise ValueError("samples must be a one-dimensional vector")
        if arr.size < 8:
            raise ValueError(f"resolution must be >= 8, got {arr.size}")
        if not a < b:
            raise ValueError("need a < b")
        arr.flags.writeable = False
        self.samples = arr
        self.a = float(a)
        self.b = float(b)
        self._spline = None

    @property
    def resolution(self) -> int:
        return self.samples.size

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.resolution)

    @classmethod
    def from_callable(cls, f, m: int, a: float = -1.0, b: float = 1.0) -> "IntervalFunction":
        ts = np.linspace(a, b, m)
        vals = np.asarray(f(ts), dtype=float)
        if vals.ndim == 0:
            vals = np.full(m, float(vals))
        return cls(vals, a, b)

    def spline(self) -> CubicSpline:
        if self._spline is None:
            self._spline = CubicSpline(self.nodes, self.samples, bc_type="not-a-knot")
        return self._spline

    def _check_domain(self, pts: np.ndarray):
        slack = 1e-12 * (self.b - self.a)
        lo, hi = float(np.min(pts)), float(np.max(pts))
        if lo < self.a - slack or hi > self.b + slack:
            raise OutOfDomainError(
                f"evaluation points span [{lo:.6g}, {hi:.6g}] outside [{self.a:.6g}, {self.b:.6g}]"
            )

    def eval(self, t):
        pts = np.asarray(t, dtype=float)
        flat = np.atleast_1d(pts)
        self._check_domain(flat)
        vals = self.spline()(np.clip(flat, self.a, self.b))
        if pts.ndim == 0:
            return float(vals[0])
        return vals.reshape(pts.shape)

    def eval_derivative(self, t, order: int = 1):
        pts = np.asarray(t, dtype=float)
        flat = np.atleast_1d(pts)
        self._check_domain(flat)
        vals = self.spline()(np.clip(flat, self.a, self.b), nu=order)
        if pts.ndim == 0:
            return float(vals[0])
        return vals.reshape(pts.shape)

    def derivative(self) -> "IntervalFunction":
        return IntervalFunction(self.spline()(self.nodes, nu=1), self.a, self.b)

    def _other_samples(self, other):
        if isinstance(other, IntervalFunction):
            if other.resolution != self.resolution or (other.a, other.b) != (self.a, self.b):
                raise ValueError("grid mismatch")
            return other.samples
        return other

    def __add__(self, other):
        return IntervalFunction(self.samples + self._other_samples(other), self.a, self.b)

    __radd__ = __add__

    def __sub__(self, other):
        return IntervalFunction(self.samples - self._other_samples(other), self.a, self.b)

    def __rsub__(self, other):
        return IntervalFunction(self._other_samples(other) - self.samples, self.a, self.b)

    def __mul__(self, other):
        return IntervalFunction(self.samples * self._other_samples(other), self.a, self.b)

    __rmul__ = __mul__

    def __neg__(self):
        return IntervalFunction(-self.samples, self.a, self.b)

    def __repr__(self):
        return f"IntervalFunction(m={self.resolution}, [{self.a}, {self.b}])"


def interval_interpolation_matrix(points, m: int, a: float = -1.0, b: float = 1.0) -> np.ndarray:
    """Matrix taking samples at the m equispaced nodes of [a, b] to spline values at `points`."""
    nodes = np.linspace(a, b, m)
    basis = CubicSpline(nodes, np.eye(m), axis=0, bc_type="not-a-knot")
    pts = np.clip(np.asarray(points, dtype=float).ravel(), a, b)
    return basis(pts)


# ---------------------------------------------------------------------------
# Hölder machinery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HolderNormReport:
    """C^r norm surrogate: r = order + exponent, value = max(ck_norm, seminorm)."""

    sup_norm: float
    ck_norm: float
    seminorm_estimate: float
    exponent: float
    order: int
    value: float


def _circle_pairs(n: int, budget: int, seed: int):
    nodes = circle_nodes(n)
    xs, ys, ds = [], [], []
    for m in range(1, DYADIC_LEVELS + 1):
        h = 2.0**-m
        xs.append(nodes)
        ys.append((nodes + h) % 1.0)
        ds.append(np.full(n, h))
    rng = np.random.default_rng(seed)
    rx = rng.random(budget)
    ry = rng.random(budget)
    xs.append(rx)
    ys.append(ry)
    ds.append(circle_distance(rx, ry))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    d = np.concatenate(ds)
    keep = d > _MIN_PAIR_DISTANCE
    return x[keep], y[keep], d[keep]


def _interval_pairs(f: IntervalFunction, budget: int, seed: int):
    nodes = f.nodes
    scale = f.b - f.a
    xs, ys, ds = [], [], []
    for m in range(1, DYADIC_LEVELS + 1):
        h = scale * 2.0**-m
        x = nodes[nodes + h <= f.b + 1e-15]
        xs.append(x)
        ys.append(np.minimum(x + h, f.b))
        ds.append(np.full(x.size, h))
    rng = np.random.default_rng(seed)
    rx = f.a + scale * rng.random(budget)
    ry = f.a + scale * rng.random(budget)
    xs.append(rx)
    ys.append(ry)
    ds.append(np.abs(rx - ry))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    d = np.concatenate(ds)
    keep = d > _MIN_PAIR_DISTANCE * scale
    return x[keep], y[keep], d[keep]


def holder_seminorm(f, alpha: float, pair_budget: int = 4096, seed: int = DEFAULT_SEED) -> float:
    """Estimate sup |f(x)-f(y)| / d(x,y)^alpha over dyadic node pairs plus seeded random pairs.

    The returned value is a lower bound of the true seminorm: only finitely
    many pairs are inspected.  The pair set is deterministic for a given
    (resolution, pair_budget, seed), which makes norm comparisons between
    related functions consistent.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    if pair_budget < f.resolution:
        raise ValueError("pair_budget must be at least the resolution")
    if isinstance(f, GridFunction):
        x, y, d = _circle_pairs(f.resolution, pair_budget, seed)
    elif isinstance(f, IntervalFunction):
        x, y, d = _interval_pairs(f, pair_budget, seed)
    else:
        raise TypeError(f"unsupported function type {type(f)!r}")
    diff = np.abs(f.eval(x) - f.eval(y))
    ratios = diff / d**alpha
    return float(np.max(ratios, initial=0.0))


def _split_order(r: float):
    if r <= 0.0:
        raise ValueError("r must be positive")
    k = math.ceil(r) - 1
    alpha = r - k
    return k, alpha


def cr_norm(f, r: float, pair_budget: int = 4096, seed: int = DEFAULT_SEED) -> HolderNormReport:
    """C^r norm surrogate with r = k + alpha, k integer >= 0 and alpha in (0, 1].

    ck_norm is the max of the node sup norms of f, f', ..., f^(k);
    seminorm_estimate is the sampled alpha-Hölder seminorm of f^(k).
    """
    k, alpha = _split_order(float(r))
    if k >= f.resolution / 4:
        warnings.warn(
            f"order {k} derivatives on {f.resolution} samples: norm surrogate unreliable",
            RuntimeWarning,
            stacklevel=2,
        )
    g = f
    sups = [float(np.max(np.abs(g.samples)))]
    for _ in range(k):
        g = g.derivative()
        sups.append(float(np.max(np.abs(g.samples))))
    semi = holder_seminorm(g, alpha, pair_budget=pair_budget, seed=seed)
    ck = max(sups)
    return HolderNormReport(
        sup_norm=sups[0],
        ck_norm=ck,
        seminorm_estimate=semi,
        exponent=alpha,
        order=k,
        value=max(ck, semi),
    )


def check_interpolation_inequality(
    f,
    k: int,
    alpha: float,
    beta: float,
    gamma: float,
    m_const: float,
    pair_budget: int = 4096,
    seed: int = DEFAULT_SEED,
) -> bool:
    """Check ||f||_{k+beta} <= M * ||f||_{k+alpha}^mu * ||f||_{k+gamma}^(1-mu).

    mu = (gamma-beta)/(gamma-alpha).  All three norms use the same surrogate,
    so the comparison is internally consistent.  alpha = 0 is allowed for
    k >= 1 and means the plain C^k norm.
    """
    if not (0.0 <= alpha < beta < gamma < 1.0):
        raise ValueError("need 0 <= alpha < beta < gamma < 1")
    if m_const <= 0.0:
        raise ValueError("candidate constant must be positive")
    if alpha == 0.0 and k < 1:
        raise ValueError("alpha = 0 requires k >= 1")
    mu = (gamma - beta) / (gamma - alpha)
    na = cr_norm(f, k + alpha, pair_budget, seed).value
    nb = cr_norm(f, k + beta, pair_budget, seed).value
    ng = cr_norm(f, k + gamma, pair_budget, seed).value
    return nb <= m_const * na**mu * ng ** (1.0 - mu)


def empirical_interpolation_constant(
    f,
    k: int,
    alpha: float,
    beta: float,
    gamma: float,
    pair_budget: int = 4096,
    seed: int = DEFAULT_SEED,
) -> float:
    """Smallest constant making the interpolation inequality hold for this f."""
    if not (0.0 <= alpha < beta < gamma < 1.0):
        raise ValueError("need 0 <= alpha < beta < gamma < 1")
    mu = (gamma - beta) / (gamma - alpha)
    na = cr_norm(f, k + alpha, pair_budget, seed).value
    nb = cr_norm(f, k + beta, pair_budget, seed).value
    ng = cr_norm(f, k + gamma, pair_budget, seed).value
    denom = na**mu * ng ** (1.0 - mu)
    if denom == 0.0:
        return 0.0
    return nb / denom
