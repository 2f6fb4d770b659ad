"""Steady-state covariance from A V + V A^T = -D, plus a time-integration oracle."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from magsim.errors import ConvergenceError, InstabilityError, ParameterError
from magsim.fluctuations import DriftModel, StabilityReport, stability

RESIDUAL_TOL = 1e-10
ILL_CONDITIONED = 1e12


class ConditioningWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class CovarianceMatrix:
    v: np.ndarray
    residual: float = 0.0
    condition: float = float("nan")
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        arr = np.array(self.v, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2:
            raise ParameterError(f"covariance must be square with even size, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "v", arr)

    @property
    def n_modes(self) -> int:
        return self.v.shape[0] // 2


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def lyapunov_residual(a: np.ndarray, d: np.ndarray, v: np.ndarray) -> float:
    """max|A V + V A^T + D| / max|D|."""
    scale = np.max(np.abs(d)) or 1.0
    return float(np.max(np.abs(a @ v + v @ a.T + d)) / scale)


def _kron_operator(a):
    n = a.shape[0]
    eye = np.eye(n)
    # row-major vec: vec(A V) = (A kron I) vec(V), vec(V A^T) = (I kron A) vec(V)
    return np.kron(a, eye) + np.kron(eye, a)


def solve_lyapunov(model: DriftModel, check_stability: bool = True,
                   report: StabilityReport | None = None) -> CovarianceMatrix:
    """Direct solve of the Lyapunov equation through its Kronecker form.

    ``report`` may carry an already computed :func:`stability` result for ``model``.

    Raises
    ------
    InstabilityError
        If the drift matrix has an eigenvalue with non-negative real part.
    """
    a, d = model.a_matrix, model.d_matrix
    if report is None:
        report = stability(model)
    if check_stability and not report.stable:
        raise InstabilityError(
            f"drift matrix is not Hurwitz (max Re lambda = {-report.margin:.6g}); no steady state",
            margin=report.margin,
        )
    n = a.shape[0]
    # work in units of the drift scale; the solution is invariant under A, D -> A/s, D/s
    s = float(np.max(np.abs(a))) or 1.0
    op = _kron_operator(a / s)
    rhs = -(d / s).reshape(-1)
    vec = np.linalg.solve(op, rhs)
    # one step of iterative refinement; its size tracks cond(op) * eps
    correction = np.linalg.solve(op, rhs - op @ vec)
    vec = vec + correction
    v = vec.reshape(n, n)
    v = 0.5 * (v + v.T)
    residual = lyapunov_residual(a, d, v)
    notes = []
    cond = float("nan")
    rel_correction = float(np.max(np.abs(correction)) / (np.max(np.abs(vec)) or 1.0))
    # the operator's eigenvalues are lambda_i + lambda_j; their spread bounds cond(op) from below
    lam = np.asarray(report.eigenvalues)
    sums = np.abs(lam[:, None] + lam[None, :])
    spread = float(np.max(sums) / np.min(sums)) if np.min(sums) > 0 else np.inf
    if (residual > RESIDUAL_TOL or spread > ILL_CONDITIONED
            or rel_correction > ILL_CONDITIONED * np.finfo(float).eps):
        # the SVD is the expensive part, so only pay for it when the cheap indicators fire
        cond = float(np.linalg.cond(op))
        if cond > ILL_CONDITIONED or residual > RESIDUAL_TOL:
            notes.append(f"Kronecker operator condition number {cond:.3g}, residual {residual:.3g}")
            warnings.warn(notes[-1], ConditioningWarning, stacklevel=2)
    return CovarianceMatrix(v, residual, cond, tuple(notes))


def integrate_to_steady(
    model: DriftModel,
    dt: float | None = None,
    tol: float = 1e-11,
    t_max: float | None = None,
) -> CovarianceMatrix:
    """Integrate dV/dt = A V + V A^T + D from the vacuum V(0) = I/2 with classic RK4.

    Stops once max|dV/dt| < tol * max|D|.  ``dt`` and ``t_max`` are in the
    model's time unit (seconds for rates in rad/s); by default ``dt`` is 0.05
    divided by the row-sum norm of A, which bounds its spectral radius, and
    ``t_max`` allows 10^7 steps.

    Raises
    ------
    ConvergenceError
        If ``t_max`` is reached first, or early once ``V`` grows without bound.
    """
    a, d = model.a_matrix, model.d_matrix
    n = a.shape[0]
    norm = float(np.max(np.sum(np.abs(a), axis=1))) or 1.0
    if dt is None:
        dt = 0.05 / norm
    if dt <= 0:
        raise ParameterError("dt must be positive")
    if dt * norm >= 0.1:
        raise ParameterError(f"dt = {dt:.3g} too large; need dt < 0.1 / |A| = {0.1 / norm:.3g}")
    if t_max is None:
        t_max = 1e7 * dt
    # dimensionless time tau = t * norm keeps entries O(1)
    a_s, d_s, h = a / norm, d / norm, dt * norm
    d_scale = float(np.max(np.abs(d_s))) or 1.0
    threshold = tol * d_scale

    def rhs(v):
        av = a_s @ v
        return av + av.T + d_s

    v = 0.5 * np.eye(n)
    v0_norm = 1.0
    steps = int(np.ceil(t_max / dt))
    half, sixth = 0.5 * h, h / 6.0
    deriv = rhs(v)
    for step in range(steps):
        # the convergence test costs about as much as a stage, so run it every few steps
        if step % 4 == 0 and float(np.max(np.abs(deriv))) < threshold:
            v = 0.5 * (v + v.T)
            return CovarianceMatrix(v, lyapunov_residual(a, d, v))
        k1 = deriv
        k2 = rhs(v + half * k1)
        k3 = rhs(v + half * k2)
        k4 = rhs(v + h * k3)
        v = v + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        deriv = rhs(v)
        if step % 256 == 0:
            size = float(np.max(np.abs(v)))
            if not np.isfinite(size) or size > 1e15 * v0_norm:
                raise ConvergenceError(
                    f"covariance diverging (max|V| = {size:.3g} at t = {(step + 1) * dt:.3g}); "
                    "drift matrix is likely unstable",
                    last_residual=float(np.max(np.abs(deriv))) / d_scale,
                )
    raise ConvergenceError(
        f"no steady state within t_max = {t_max:.3g}",
        last_residual=float(np.max(np.abs(deriv))) / d_scale,
    )
