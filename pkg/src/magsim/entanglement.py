"""Bipartite logarithmic negativity of Gaussian states and its isolation ratio."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from magsim.errors import MagsimError, ParameterError
from magsim.lyapunov import CovarianceMatrix
from magsim.params import Direction
from magsim.transmission import ratio_db

METHOD_AGREEMENT = 1e-10


class Mode(enum.IntEnum):
    CAVITY_A = 0
    CAVITY_C = 1
    MAGNON = 2
    PHONON = 3

    @property
    def letter(self) -> str:
        return "acmb"[self.value]


@dataclass(frozen=True)
class ModePair:
    first: Mode
    second: Mode

    def __post_init__(self):
        object.__setattr__(self, "first", Mode(self.first))
        object.__setattr__(self, "second", Mode(self.second))
        if self.first == self.second:
            raise ParameterError("a mode pair needs two distinct modes")

    @property
    def label(self) -> str:
        return self.first.letter + self.second.letter

    @classmethod
    def from_label(cls, label: str) -> "ModePair":
        letters = {m.letter: m for m in Mode}
        if len(label) != 2 or label[0] not in letters or label[1] not in letters:
            raise ParameterError(f"unknown mode pair {label!r}")
        return cls(letters[label[0]], letters[label[1]])


# pairs reported by the sweeps: cavity-cavity, cavity-magnon, magnon-phonon, cavity-phonon
STANDARD_PAIRS = tuple(ModePair.from_label(s) for s in ("ac", "cm", "mb", "ab"))


class Convention(str, enum.Enum):
    NORMALIZED = "normalized"  # max(0, -ln(2 nu)): zero at the vacuum threshold nu = 1/2
    PRINTED = "printed"  # max(0, -2 ln nu), for comparison only


@dataclass(frozen=True)
class EntanglementReport:
    pair: ModePair
    nu_minus: float
    e_n: float
    direction: Optional[Direction] = None


def reduce_cm(v: CovarianceMatrix | np.ndarray, pair: ModePair) -> np.ndarray:
    """4x4 marginal covariance of ``pair``, first mode's (X, Y) then the second's."""
    full = v.v if isinstance(v, CovarianceMatrix) else np.asarray(v, dtype=float)
    idx = [2 * pair.first, 2 * pair.first + 1, 2 * pair.second, 2 * pair.second + 1]
    return full[np.ix_(idx, idx)].copy()


_OMEGA_2 = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
_FLIP = {"first": np.array([1.0, -1.0, 1.0, 1.0]), "second": np.array([1.0, 1.0, 1.0, -1.0])}


def _det2(m):
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def partial_transpose(v4: np.ndarray, flip: str = "second") -> np.ndarray:
    """Flip the sign of one mode's Y quadrature (partial transposition at CM level)."""
    if flip not in _FLIP:
        raise ParameterError(f"flip must be 'first' or 'second', got {flip!r}")
    s = _FLIP[flip]
    return v4 * np.outer(s, s)


def nu_minus_spectral(v4: np.ndarray, flip: str = "second") -> float:
    """Smallest symplectic eigenvalue of the partial transpose, from the spectrum of Omega V~."""
    eigs = np.linalg.eigvals(_OMEGA_2 @ partial_transpose(v4, flip))
    return float(np.min(np.abs(eigs.imag)))


def nu_minus_invariants(v4: np.ndarray) -> float:
    """Same quantity from the local symplectic invariants of the 2x2 block decomposition."""
    a, b, c = v4[:2, :2], v4[2:, 2:], v4[:2, 2:]
    sigma = _det2(a) + _det2(b) - 2.0 * _det2(c)
    det_v = np.linalg.det(v4)
    disc = max(sigma * sigma - 4.0 * det_v, 0.0)
    # 2 det / (sigma + sqrt(disc)) is the cancellation-free form of (sigma - sqrt(disc)) / 2
    return float(math.sqrt(2.0 * det_v / (sigma + math.sqrt(disc))))


def min_symplectic_eigenvalue_pt(v4: np.ndarray, flip: str = "second") -> float:
    """Smallest symplectic eigenvalue of the partially transposed two-mode CM.

    Computed from the spectrum of Omega V~ and, independently, from the
    block invariants; the two must agree.

    Raises
    ------
    ParameterError
        If ``v4`` is not a symmetric positive-definite 4x4 matrix.
    """
    v4 = np.asarray(v4, dtype=float)
    if v4.shape != (4, 4):
        raise ParameterError(f"expected a 4x4 covariance, got shape {v4.shape}")
    scale = float(np.max(np.abs(v4))) or 1.0
    if np.max(np.abs(v4 - v4.T)) > 1e-12 * scale:
        raise ParameterError("covariance matrix is not symmetric")
    try:
        np.linalg.cholesky(v4)
    except np.linalg.LinAlgError:
        raise ParameterError("covariance matrix is not positive definite") from None
    spectral = nu_minus_spectral(v4, flip)
    closed = nu_minus_invariants(v4)
    if abs(spectral - closed) > METHOD_AGREEMENT * max(1.0, scale):
        raise MagsimError(f"symplectic eigenvalue routes disagree: {spectral!r} vs {closed!r}")
    return closed


def log_negativity(nu_minus: float, convention=Convention.NORMALIZED) -> float:
    if nu_minus <= 0:
        raise ParameterError("nu_minus must be positive")
    if Convention(convention) is Convention.PRINTED:
        return max(0.0, -2.0 * math.log(nu_minus))
    return max(0.0, -math.log(2.0 * nu_minus))


def pair_entanglement(v: CovarianceMatrix, pair: ModePair, convention=Convention.NORMALIZED,
                      direction=None) -> EntanglementReport:
    nu = min_symplectic_eigenvalue_pt(reduce_cm(v, pair))
    return EntanglementReport(pair, nu, log_negativity(nu, convention),
                              None if direction is None else Direction(direction))


def entanglement_isolation(e12: float, e21: float) -> float:
    """20 log10(E_12 / E_21) in dB; +inf when only the forward pair is entangled."""
    if e12 < 0 or e21 < 0:
        raise ParameterError("logarithmic negativities are non-negative")
    return ratio_db(e12, e21)
