"""Two self-contained fixed-point problems on the interval [-1, 1].

The *composition map* F(u, phi) = phi o phi / 2 + u acts on a ball of
C^{1,1} functions; the parameter u is itself a function on the interval,
discretized on the same grid.  The *affine map*
F(u, phi)(t) = phi((t+u)/2) / 2 + g(t, u) acts on C^0 with a scalar
parameter and admits a closed-form series solution, which doubles as an
independent oracle.  Both carry the analytic first- and second-order
coefficients of their increment expansions and are used to exercise the
fixed-point engine end to end.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigInfeasibleError, ConsistencyError, OutOfDomainError
from .fitting import SlopeFit, fit_loglog
from .fixed_point import (
    ParametrizedMap,
    fixed_point_second_derivative,
    solve_fixed_point,
    sup_norm,
)
from .spaces import (
    DEFAULT_SEED,
    IntervalFunction,
    cr_norm,
    interval_interpolation_matrix,
)

INTERVAL_A = -1.0
INTERVAL_B = 1.0

# Allowed overshoot of |phi| beyond 1 before composition is declared broken:
# the ball conditions guarantee range containment analytically, so a larger
# excursion signals a misconfigured run, not roundoff.
_RANGE_SLACK = 1e-9


def interval_nodes(m: int) -> np.ndarray:
    return np.linspace(INTERVAL_A, INTERVAL_B, m)


@dataclass(frozen=True)
class CompositionMapConfig:
    """Ball radii (state, parameter) and grid resolution for the composition map.

    Feasibility requires the invariance conditions
    r/2 + r' <= r, r^2/2 + r' <= r, (r^2/2)(1+r) + r' <= r
    and the contraction conditions (1+r)/2 < 1, (2r+r^2)/2 < 1.
    """

    radius: float = 0.5
    param_radius: float = 0.2
    resolution: int = 257

    def violated_conditions(self) -> list[str]:
        r, rp = self.radius, self.param_radius
        bad = []
        if not (0.0 < r < 1.0 and 0.0 < rp < 1.0):
            bad.append("radii must lie in (0, 1)")
        if r / 2 + rp > r:
            bad.append(f"r/2 + r' = {r / 2 + rp:.4g} > r")
        if r**2 / 2 + rp > r:
            bad.append(f"r^2/2 + r' = {r ** 2 / 2 + rp:.4g} > r")
        if (r**2 / 2) * (1 + r) + rp > r:
            bad.append(f"(r^2/2)(1+r) + r' = {(r ** 2 / 2) * (1 + r) + rp:.4g} > r")
        if (1 + r) / 2 >= 1.0:
            bad.append(f"(1+r)/2 = {(1 + r) / 2:.4g} >= 1")
        if (2 * r + r**2) / 2 >= 1.0:
            bad.append(f"(2r+r^2)/2 = {(2 * r + r ** 2) / 2:.4g} >= 1")
        return bad

    def validate(self):
        bad = self.violated_conditions()
        if bad:
            raise ConfigInfeasibleError("; ".join(bad))

    @property
    def contraction_constant(self) -> float:
        r = self.radius
        return max((1 + r) / 2, (2 * r + r**2) / 2)


def _clamped_inner(phi: np.ndarray) -> np.ndarray:
    excess = float(np.max(np.abs(phi))) - 1.0
    if excess > _RANGE_SLACK:
        raise OutOfDomainError(
            f"|phi| reaches 1 + {excess:.3e}: outside the composition ball (config bug?)"
        )
    return np.clip(phi, INTERVAL_A, INTERVAL_B)


def composition_map(cfg: CompositionMapConfig) -> ParametrizedMap:
    """F(u, phi) = phi o phi / 2 + u on M samples of [-1, 1], u a grid function too.

    Increment coefficients: P h = h, Q z = [phi' o phi * z + z o phi] / 2,
    and the only order-2 coefficient is
    q02[z, w] = [z' o phi * w + w' o phi * z] / 4 + phi'' o phi * z * w / 4
    (the symmetric bilinear form whose diagonal is the exact quadratic term
    of the expansion).
    """
    cfg.validate()
    m = cfg.resolution

    def _fn(vals):
        return IntervalFunction(vals, INTERVAL_A, INTERVAL_B)

    def apply(u, phi):
        inner = _clamped_inner(phi)
        return 0.5 * _fn(phi).eval(inner) + u

    def p_matrix(u, phi):
        return np.eye(m)

    def q_matrix(u, phi):
        inner = _clamped_inner(phi)
        dphi_at = _fn(phi).eval_derivative(inner, 1)
        return 0.5 * (np.diag(dphi_at) + interval_interpolation_matrix(inner, m))

    def q20(u, phi, h1, h2):
        return np.zeros(m)

    def q11(u, phi, h, z):
        return np.zeros(m)

    def q02(u, phi, z, w):
        inner = _clamped_inner(phi)
        z_term = _fn(z).eval_derivative(inner, 1) * w
        w_term = _fn(w).eval_derivative(inner, 1) * z
        curv = _fn(phi).eval_derivative(inner, 2) * z * w
        return 0.25 * (z_term + w_term) + 0.25 * curv

    return ParametrizedMap(
        apply=apply,
        state_dim=m,
        param_dim=m,
        p_matrix=p_matrix,
        q_matrix=q_matrix,
        q20=q20,
        q11=q11,
        q02=q02,
    )


@dataclass(frozen=True)
class AffineMapConfig:
    """F(u, phi)(t) = phi((t+u)/2)/2 + g(t, u) with scalar u in [-epsilon, epsilon].

    ``g`` is vectorized in t.  ``regularity`` declares the parameter
    regularity class of g ("lipschitz" or "holder" with ``holder_exponent``);
    the class drives which slope window the Hölder experiment asserts.
    ``g_du`` / ``g_duu`` supply parameter derivatives where they exist.
    """

    g: Callable[[np.ndarray, float], np.ndarray]
    regularity: str = "lipschitz"
    holder_exponent: float = 0.5
    epsilon: float = 0.15
    resolution: int = 257
    g_du: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    g_duu: Optional[Callable[[np.ndarray, float], np.ndarray]] = None

    def __post_init__(self):
        if self.regularity not in ("lipschitz", "holder"):
            raise ConfigInfeasibleError(f"unknown regularity class {self.regularity!r}")
        if not 0.0 < self.holder_exponent <= 1.0:
            raise ConfigInfeasibleError("holder_exponent must lie in (0, 1]")
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigInfeasibleError("epsilon must lie in (0, 1)")

    def validate_forcing_ball(self, n_params: int = 5, pair_budget: int = 4096,
                              seed: int = DEFAULT_SEED):
        """Check ||g(., u)||_{C^alpha} <= 1/2 on a grid of scanned parameters."""
        alpha = self.holder_exponent
        for u in np.linspace(-self.epsilon, self.epsilon, n_params):
            f = IntervalFunction.from_callable(
                lambda t: self.g(t, float(u)), self.resolution, INTERVAL_A, INTERVAL_B
            )
            norm = cr_norm(f, alpha, pair_budget=pair_budget, seed=seed).value
            if norm > 0.5 + 1e-9:
                raise ConfigInfeasibleError(
                    f"||g(., {u:.4g})||_C^{alpha:.3g} = {norm:.4g} > 1/2"
                )


def affine_map(cfg: AffineMapConfig) -> ParametrizedMap:
    """The affine interval map as a ParametrizedMap with param_dim = 1.

    Increment coefficients at (u, phi): P h = [phi'((t+u)/2)/4 + g_u(t,u)] h,
    Q z = z((t+u)/2)/2, q20[h1,h2] = [phi''((t+u)/2)/16 + g_uu(t,u)/2] h1 h2,
    q11[h, z] = z'((t+u)/2) h / 4 and q02 = 0.  P and the order-2
    coefficients exist only when the corresponding g-derivatives are given.
    """
    m = cfg.resolution
    ts = interval_nodes(m)

    def _fn(vals):
        return IntervalFunction(vals, INTERVAL_A, INTERVAL_B)

    def _shift(u):
        return (ts + float(u[0])) / 2.0

    def apply(u, phi):
        return 0.5 * _fn(phi).eval(_shift(u)) + cfg.g(ts, float(u[0]))

    def q_matrix(u, phi):
        return 0.5 * interval_interpolation_matrix(_shift(u), m)

    p_matrix = None
    if cfg.g_du is not None:
        def p_matrix(u, phi):
            col = 0.25 * _fn(phi).eval_derivative(_shift(u), 1) + cfg.g_du(ts, float(u[0]))
            return col[:, None]

    q20 = q11 = q02 = None
    if cfg.g_du is not None and cfg.g_duu is not None:
        def q20(u, phi, h1, h2):
            col = _fn(phi).eval_derivative(_shift(u), 2) / 16.0 + 0.5 * cfg.g_duu(
                ts, float(u[0])
            )
            return col * float(h1[0]) * float(h2[0])

        def q11(u, phi, h, z):
            return 0.25 * _fn(z).eval_derivative(_shift(u), 1) * float(h[0])

        def q02(u, phi, z, w):
            return np.zeros(m)

    return ParametrizedMap(
        apply=apply,
        state_dim=m,
        param_dim=1,
        p_matrix=p_matrix,
        q_matrix=q_matrix,
        q20=q20,
        q11=q11,
        q02=q02,
    )


def affine_series_solution(cfg: AffineMapConfig, u: float, terms: int = 60) -> np.ndarray:
    """Closed-form fixed point phi_u(t) = sum_n 2^-n g(t_n, u), t_{n+1} = (t_n + u)/2.

    The series is the Neumann sum of the affine contraction and converges
    geometrically; 60 terms reach the rounding floor.  Used as an oracle that
    is independent of the Picard solver.
    """
    t = interval_nodes(cfg.resolution).copy()
    acc = np.zeros(cfg.resolution)
    for k in range(terms):
        acc += 2.0**-k * cfg.g(t, u)
        t = (t + u) / 2.0
    return acc


@dataclass(frozen=True)
class HolderExperimentRow:
    delta: float
    distance: float


@dataclass(frozen=True)
class HolderExperimentReport:
    regularity: str
    exponent: float
    slope: float
    fit: SlopeFit
    rows: list[HolderExperimentRow]


def affine_holder_experiment(
    cfg: AffineMapConfig,
    deltas: Sequence[float],
    tol: float = 1e-13,
    enforce_window: bool = True,
) -> HolderExperimentReport:
    """Fit the exponent of u -> ||phi_u - phi_0||_C0 near u = 0.

    For a forcing of declared Hölder class alpha the slope is asserted to lie
    in [alpha - 0.05, alpha + 0.1]; for Lipschitz forcing the assertion is
    slope >= 0.95.  Raises DegenerateFitError when the deltas cannot support
    a regression.
    """
    fmap = affine_map(cfg)
    zero = np.zeros(1)
    base = solve_fixed_point(fmap, zero, np.zeros(cfg.resolution), tol=tol)
    rows = []
    for delta in deltas:
        shifted = solve_fixed_point(fmap, np.array([float(delta)]), base.phi_star, tol=tol)
        rows.append(
            HolderExperimentRow(float(delta), sup_norm(shifted.phi_star - base.phi_star))
        )
    fit = fit_loglog([r.delta for r in rows], [r.distance for r in rows])
    slope = fit.slope
    if enforce_window:
        if cfg.regularity == "holder":
            lo, hi = cfg.holder_exponent - 0.05, cfg.holder_exponent + 0.1
            if not lo <= slope <= hi:
                raise ConsistencyError(
                    f"fitted slope {slope:.4f} outside [{lo:.4f}, {hi:.4f}]"
                )
        elif slope < 0.95:
            raise ConsistencyError(f"fitted slope {slope:.4f} < 0.95 for Lipschitz forcing")
    return HolderExperimentReport(cfg.regularity, cfg.holder_exponent, slope, fit, rows)


def _richardson_second_difference(solve_at: Callable[[float], np.ndarray],
                                  delta: float) -> np.ndarray:
    """Richardson-extrapolated second central difference over steps delta, 2*delta."""
    f0 = solve_at(0.0)
    d2 = solve_at(delta) - 2.0 * f0 + solve_at(-delta)
    d2_wide = solve_at(2.0 * delta) - 2.0 * f0 + solve_at(-2.0 * delta)
    return (16.0 * d2 - d2_wide) / (12.0 * delta**2)


@dataclass(frozen=True)
class SecondDerivativeRow:
    label: str
    engine_sup: float
    fd_sup: float
    abs_error: float
    rel_error: float


def composition_second_derivative_check(
    cfg: CompositionMapConfig,
    directions: Optional[Sequence] = None,
    fd_delta: float = 1e-2,
    tol: float = 1e-13,
) -> list[SecondDerivativeRow]:
    """Second derivative of the composition-map fixed point vs a Richardson oracle.

    Default directions are the constant function and t -> t (as parameter
    perturbations around u = 0).  Along constants the fixed point is affine
    in the parameter and the second derivative vanishes.
    """
    fmap = composition_map(cfg)
    m = cfg.resolution
    ts = interval_nodes(m)
    if directions is None:
        directions = [("constant", np.ones(m)), ("linear", ts.copy())]
    rows = []
    u0 = np.zeros(m)
    for label, h in directions:
        engine = fixed_point_second_derivative(fmap, u0, h, h, tol=tol)

        def solve_at(c):
            return solve_fixed_point(fmap, u0 + c * h, np.zeros(m), tol=tol).phi_star

        fd = _richardson_second_difference(solve_at, fd_delta)
        abs_err = sup_norm(engine - fd)
        fd_scale = sup_norm(fd)
        rel_err = abs_err / fd_scale if fd_scale > 1e-9 else abs_err
        rows.append(SecondDerivativeRow(label, sup_norm(engine), fd_scale, abs_err, rel_err))
    return rows


def affine_second_derivative_check(
    cfg: AffineMapConfig,
    fd_delta: float = 1e-3,
    tol: float = 1e-13,
) -> SecondDerivativeRow:
    """Second derivative of the affine-map fixed point in u vs a Richardson oracle."""
    fmap = affine_map(cfg)
    h = np.ones(1)
    engine = fixed_point_second_derivative(fmap, np.zeros(1), h, h, tol=tol)

    def solve_at(c):
        return solve_fixed_point(
            fmap, np.array([c]), np.zeros(cfg.resolution), tol=tol
        ).phi_star

    fd = _richardson_second_difference(solve_at, fd_delta)
    abs_err = sup_norm(engine - fd)
    fd_scale = sup_norm(fd)
    rel_err = abs_err / fd_scale if fd_scale > 1e-9 else abs_err
    return SecondDerivativeRow("scalar", sup_norm(engine), fd_scale, abs_err, rel_err)


# ---------------------------------------------------------------------------
# Ball sampling and the constraint suite
# ---------------------------------------------------------------------------


def random_ball_function(rng: np.random.Generator, m: int, target_norm: float) -> np.ndarray:
    """Random smooth interval function scaled to C^{1,1} surrogate norm <= target."""
    ts = interval_nodes(m)
    c = rng.standard_normal(5)
    raw = (
        c[0]
        + c[1] * ts
        + c[2] * ts**2 / 2.0
        + c[3] * np.sin(ts)
        + c[4] * np.cos(2.0 * ts) / 2.0
    )
    norm = cr_norm(IntervalFunction(raw, INTERVAL_A, INTERVAL_B), 2.0).value
    if norm == 0.0:
        return np.zeros(m)
    return raw * (target_norm / norm)


def c1_norm(vals: np.ndarray) -> float:
    """max(sup |f|, sup |f'|) over nodes, the C^1 norm surrogate."""
    f = IntervalFunction(vals, INTERVAL_A, INTERVAL_B)
    return max(sup_norm(vals), sup_norm(f.derivative().samples))


def c11_norm(vals: np.ndarray) -> float:
    """C^{1,1} norm surrogate max(sup f, sup f', Lip f') via pair sampling."""
    return cr_norm(IntervalFunction(vals, INTERVAL_A, INTERVAL_B), 2.0).value


@dataclass(frozen=True)
class ConstraintSuiteReport:
    samples: int
    ball_bound: float
    ball_max: float
    ball_violations: int
    contraction_bound: float
    contraction_max: float
    contraction_violations: int
    q_norm_bound: float
    q_norm_max: float
    q_norm_violations: int


def composition_constraint_suite(
    cfg: CompositionMapConfig,
    n_samples: int = 100,
    seed: int = DEFAULT_SEED,
    ball_margin: float = 0.95,
) -> ConstraintSuiteReport:
    """Ball preservation, contraction constant and Q-norm bound on random samples.

    States are drawn inside ``ball_margin * radius`` (the analytic bounds
    assume exact ball membership; the margin absorbs the surrogate-norm
    scaling).  The Q operator-norm estimate probes random smooth directions,
    so it is a lower bound of the true norm, consistent with the claimed
    upper bound (1 + r)/2.
    """
    cfg.validate()
    fmap = composition_map(cfg)
    m = cfg.resolution
    rng = np.random.default_rng(seed)
    r, rp = cfg.radius, cfg.param_radius
    k_bound = cfg.contraction_constant + 0.01
    q_bound = (1.0 + r) / 2.0

    ball_max = 0.0
    ball_violations = 0
    contraction_max = 0.0
    contraction_violations = 0
    q_max = 0.0
    q_violations = 0
    for _ in range(n_samples):
        phi = random_ball_function(rng, m, ball_margin * r * rng.uniform(0.2, 1.0))
        psi = random_ball_function(rng, m, ball_margin * r * rng.uniform(0.2, 1.0))
        u = random_ball_function(rng, m, ball_margin * rp * rng.uniform(0.2, 1.0))

        image_norm = c11_norm(fmap.apply(u, phi))
        ball_max = max(ball_max, image_norm)
        if image_norm > r + 1e-9:
            ball_violations += 1

        diff_in = c1_norm(phi - psi)
        if diff_in > 0.0:
            ratio = c1_norm(fmap.apply(u, phi) - fmap.apply(u, psi)) / diff_in
            contraction_max = max(contraction_max, ratio)
            if ratio > k_bound:
                contraction_violations += 1

        qmat = fmap.q_matrix(u, phi)
        z = random_ball_function(rng, m, rng.uniform(0.2, 1.0))
        zn = sup_norm(z)
        if zn > 0.0:
            q_ratio = sup_norm(qmat @ z) / zn
            q_max = max(q_max, q_ratio)
            if q_ratio > q_bound + 1e-6:
                q_violations += 1

    return ConstraintSuiteReport(
        samples=n_samples,
        ball_bound=r + 1e-9,
        ball_max=ball_max,
        ball_violations=ball_violations,
        contraction_bound=k_bound,
        contraction_max=contraction_max,
        contraction_violations=contraction_violations,
        q_norm_bound=q_bound,
        q_norm_max=q_max,
        q_norm_violations=q_violations,
    )
