"""Linearized quadrature dynamics: drift matrix, diffusion matrix, stability.

Quadrature order is (X_a, Y_a, X_c, Y_c, X_m, Y_m, X_b, Y_b) with
X = (o + o^dag)/sqrt(2) and Y = (o - o^dag)/(i sqrt(2)), so the vacuum
variance is 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from magsim.errors import ParameterError
from magsim.mean_field import EffectiveCoupling
from magsim.params import SystemParams

N_QUADRATURES = 8

# (row, col) of every entry allowed to be nonzero, 0-based
DRIFT_SPARSITY = frozenset(
    {(i, i) for i in range(8)}
    | {(0, 1), (0, 3), (1, 0), (1, 2)}
    | {(2, 1), (2, 3), (2, 5), (3, 0), (3, 2), (3, 4)}
    | {(4, 3), (4, 5), (4, 6), (5, 2), (5, 4)}
    | {(6, 7), (7, 5), (7, 6)}
)


@dataclass(frozen=True)
class DriftModel:
    a_matrix: np.ndarray
    d_matrix: np.ndarray
    g_mb_used: float = 0.0

    def __post_init__(self):
        for name in ("a_matrix", "d_matrix"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise ParameterError(f"{name} must be square, got shape {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.a_matrix.shape != self.d_matrix.shape:
            raise ParameterError("drift and diffusion matrices differ in shape")

    @property
    def dim(self) -> int:
        return self.a_matrix.shape[0]


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    margin: float  # -max Re(lambda), rad/s
    eigenvalues: tuple = ()


def drift_matrix(
    params: SystemParams,
    g_mb_eff: EffectiveCoupling | float,
    n_b: float | None = None,
    phonon_sign: float = -1.0,
) -> DriftModel:
    """Drift and diffusion matrices of the linearized fluctuations.

    ``phonon_sign`` is the coefficient of omega_b in the (Y_b, X_b) entry.
    The physical value is -1; +1 reproduces the matrix with the free phonon
    rotation reversed, which is dynamically unstable and kept only for
    comparison.
    """
    g = g_mb_eff.value if isinstance(g_mb_eff, EffectiveCoupling) else float(g_mb_eff)
    if n_b is None:
        n_b = params.n_b
    if n_b < 0:
        raise ParameterError("n_b must be >= 0")
    k_a, k_c, k_m, k_b = params.kappa_a, params.kappa_c, params.kappa_m, params.kappa_b
    d_a, d_c, d_m = params.delta_a, params.delta_c, params.delta_m_tilde
    g_ac, g_cm, w_b = params.g_ac, params.g_cm, params.omega_b

    a = np.zeros((8, 8))
    a[0, 0], a[0, 1], a[0, 3] = -k_a, d_a, g_ac
    a[1, 0], a[1, 1], a[1, 2] = -d_a, -k_a, -g_ac
    a[2, 1], a[2, 2], a[2, 3], a[2, 5] = g_ac, -k_c, d_c, g_cm
    a[3, 0], a[3, 2], a[3, 3], a[3, 4] = -g_ac, -d_c, -k_c, -g_cm
    a[4, 3], a[4, 4], a[4, 5], a[4, 6] = g_cm, -k_m, d_m, -g
    a[5, 2], a[5, 4], a[5, 5] = -g_cm, -d_m, -k_m
    a[6, 6], a[6, 7] = -k_b, w_b
    a[7, 5], a[7, 6], a[7, 7] = g, phonon_sign * w_b, -k_b

    thermal = (2.0 * n_b + 1.0) * k_b
    d = np.diag([k_a, k_a, k_c, k_c, k_m, k_m, thermal, thermal])
    return DriftModel(a, d, g)


def fluctuation_rhs(params: SystemParams, g_mb_eff: float, ops: np.ndarray) -> np.ndarray:
    """Noise-free right-hand side of the linearized Langevin equations for (da, dc, dm, db)."""
    da, dc, dm, db = ops
    d_m = params.delta_m_tilde
    return np.array([
        -(1j * params.delta_a + params.kappa_a) * da - 1j * params.g_ac * dc,
        -(1j * params.delta_c + params.kappa_c) * dc - 1j * params.g_ac * da - 1j * params.g_cm * dm,
        -(1j * d_m + params.kappa_m) * dm - 1j * params.g_cm * dc - 0.5 * g_mb_eff * (np.conj(db) + db),
        -(1j * params.omega_b + params.kappa_b) * db - 0.5 * g_mb_eff * (np.conj(dm) - dm),
    ])


def stability(model: DriftModel) -> StabilityReport:
    """Classify the model by the largest real part of the drift eigenvalues."""
    a = model.a_matrix
    if not np.all(np.isfinite(a)):
        raise ParameterError("drift matrix has non-finite entries")
    try:
        eigs = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise ParameterError(f"eigenvalue computation failed: {exc}") from exc
    margin = -float(np.max(eigs.real))
    return StabilityReport(margin > 0, margin, tuple(eigs))
