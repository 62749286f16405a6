"""Dispersion relation and instability thresholds of the homogeneous state.

A sinusoidal perturbation of admissible wavenumber ``q_m = 2 pi m / L``
grows or decays at the rates

    lambda_pm(q) = -q^2 (1 +- gamma |K^(q)| sqrt(u1_bar u2_bar)),

so the homogeneous state loses stability when ``|gamma|`` exceeds
``1 / (|K^(q_m)| sqrt(u1_bar u2_bar))`` for some mode ``m >= 1``.  The
critical mode is the admissible one maximizing ``|K^(q_m)|``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams, fourier_coefficient

__all__ = [
    "DispersionPoint",
    "CriticalMode",
    "NeverDestabilizedError",
    "dispersion",
    "instability_thresholds",
    "critical_mode",
    "default_m_max",
]

logger = logging.getLogger(__name__)

#: |K^(q_m)| below this is treated as exactly zero: the mode is never
#: destabilized at any finite advection strength.
KHAT_ZERO_TOL = 1e-14


class NeverDestabilizedError(ValueError):
    """The kernel coefficient vanishes at this mode: no finite threshold."""


@dataclass(frozen=True)
class DispersionPoint:
    """Growth rates of one admissible wavenumber.

    ``lambda_plus`` and ``lambda_minus`` carry the +/- sign of the signed
    advection strength in the rate formula; which branch destabilizes
    therefore depends on sign(gamma).  ``lambda_max`` is the destabilized
    one, equal to ``-q^2 (1 - |gamma| |K^| sqrt(u1_bar u2_bar))``.
    """

    m: int
    q: float
    lambda_plus: float
    lambda_minus: float

    @property
    def lambda_max(self) -> float:
        return max(self.lambda_plus, self.lambda_minus)


@dataclass(frozen=True)
class CriticalMode:
    """First mode destabilized as |gamma| grows, with its thresholds."""

    m_c: int
    q_c: float
    gamma_c_plus: float
    gamma_c_minus: float

    def gamma_c(self, side: str) -> float:
        if side == "plus":
            return self.gamma_c_plus
        if side == "minus":
            return self.gamma_c_minus
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")


def default_m_max(L: float) -> int:
    # |K^| decays like 1/q, so scanning up to q ~ 8 pi safely brackets the
    # maximum for any kernel implemented here.
    return math.ceil(4 * L)


def dispersion(p: ModelParams, m_max: int) -> list[DispersionPoint]:
    """Growth rates for modes ``m = 0..m_max``."""
    if m_max < 1:
        raise ValueError(f"m_max must be at least 1, got {m_max}")
    m = np.arange(m_max + 1)
    q = 2.0 * np.pi * m / p.L
    khat = np.abs(fourier_coefficient(p.kernel, q))
    coupling = p.gamma * khat * math.sqrt(p.u1_bar * p.u2_bar)
    lam_plus = -q * q * (1.0 + coupling)
    lam_minus = -q * q * (1.0 - coupling)
    return [
        DispersionPoint(int(mi), float(qi), float(lp), float(lm))
        for mi, qi, lp, lm in zip(m, q, lam_plus, lam_minus)
    ]


def instability_thresholds(p: ModelParams, m: int) -> tuple[float, float]:
    """Signed advection strengths at which mode ``m`` becomes unstable.

    Returns ``(gamma_m_plus, gamma_m_minus) = (+g, -g)`` with
    ``g = 1 / (|K^(q_m)| sqrt(u1_bar u2_bar))``.
    """
    if m < 1:
        raise ValueError(f"thresholds are defined for m >= 1, got m={m}")
    q_m = 2.0 * math.pi * m / p.L
    khat = abs(fourier_coefficient(p.kernel, q_m))
    if khat < KHAT_ZERO_TOL:
        raise NeverDestabilizedError(
            f"mode never destabilized: kernel coefficient vanishes at "
            f"q_{m} = {q_m:.6g}"
        )
    g = float(1.0 / (khat * math.sqrt(p.u1_bar * p.u2_bar)))
    return g, -g


def critical_mode(p: ModelParams, m_max: int | None = None) -> CriticalMode:
    """Admissible mode ``m >= 1`` maximizing ``|K^(q_m)|``, with thresholds.

    Ties are broken toward the smallest mode index and logged, since for
    non-top-hat kernels the maximizer need not be unique.
    """
    if m_max is None:
        m_max = default_m_max(p.L)
    m = np.arange(1, m_max + 1)
    q = 2.0 * np.pi * m / p.L
    khat = np.abs(fourier_coefficient(p.kernel, q))
    best = int(np.argmax(khat))
    if khat[best] < KHAT_ZERO_TOL:
        raise NeverDestabilizedError(
            "mode never destabilized: kernel coefficient vanishes at every "
            f"admissible wavenumber up to m={m_max}"
        )
    ties = np.nonzero(khat >= khat[best] - 1e-12 * khat[best])[0]
    if ties.size > 1:
        logger.warning(
            "critical mode is not unique (modes %s); choosing smallest m=%d",
            [int(m[i]) for i in ties],
            int(m[best]),
        )
    g = float(1.0 / (khat[best] * math.sqrt(p.u1_bar * p.u2_bar)))
    return CriticalMode(
        m_c=int(m[best]), q_c=float(q[best]), gamma_c_plus=g, gamma_c_minus=-g
    )
