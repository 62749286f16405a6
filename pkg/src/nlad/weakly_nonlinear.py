"""Amplitude-equation coefficients and small-amplitude pattern branches.

Near a threshold the solution is a slowly modulated pattern at the critical
wavenumber plus a slaved second harmonic and, for equal equilibrium
densities, a large-scale zero mode required by mass conservation.  The
pattern amplitude obeys a Stuart-Landau equation, coupled to a diffusion
equation for the zero mode in the equal-density case.  This module builds
the full coefficient set of those equations, classifies the bifurcation,
reconstructs the analytic small-amplitude branches and evaluates the growth
rates of large-scale perturbations of the patterned state.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .linear_stability import CriticalMode, critical_mode
from .model import Kernel, ModelParams, fourier_coefficient
from .spectral import StateGrid

__all__ = [
    "SecondHarmonicResonanceError",
    "WnlCoefficients",
    "BifurcationClass",
    "AnalyticBranch",
    "wnl_coefficients",
    "classify",
    "stability_coefficient_tophat",
    "zero_mode_growth_rates",
    "analytic_branch",
    "wnl_profile",
]

#: The second-harmonic denominator below this magnitude is treated as a
#: resonance between the critical mode and its double.
RESONANCE_TOL = 1e-10


class SecondHarmonicResonanceError(ValueError):
    """|K^(2 q_c)| = |K^(q_c)|: the slaved second harmonic is resonant."""


class BifurcationClass(enum.Enum):
    SUBCRITICAL = "subcritical"
    SUPERCRITICAL_STABLE = "supercritical_stable"
    SUPERCRITICAL_UNSTABLE = "supercritical_unstable"


@dataclass(frozen=True)
class WnlCoefficients:
    """Coefficient set of the amplitude equations at one threshold.

    ``sigma`` is the linear Stuart-Landau coefficient (+q_c^2 in the
    unstable regime, -q_c^2 in the stable one), ``Lambda`` the cubic
    coefficient whose sign separates supercritical from subcritical
    branches, and ``nu``, ``mu``, ``eta`` couple the pattern amplitude to
    the conserved zero mode.  ``Gamma = Lambda mu / (eta nu) - 1`` decides
    the stability of supercritical patterns against large-scale
    perturbations; it is only defined for equal densities and positive
    ``Lambda`` and is ``None`` otherwise.
    """

    rho2: float
    a2: float
    psi1: float
    psi2: float
    sigma: float
    Lambda: float
    nu: float
    mu: float
    eta: float
    Gamma: float | None
    regime: str
    side: str
    gamma_c: float
    q_c: float
    m_c: int
    u1_bar: float
    u2_bar: float

    @property
    def equal_densities(self) -> bool:
        return self.u1_bar == self.u2_bar


def wnl_coefficients(
    p: ModelParams,
    side: str = "plus",
    regime: str = "unstable",
    m_max: int | None = None,
) -> WnlCoefficients:
    """Amplitude-equation coefficients at the requested threshold.

    ``side`` selects the positive or negative bifurcation threshold,
    ``regime`` selects which side of it the branch lives on and only
    affects the sign of ``sigma``.
    """
    if side not in ("plus", "minus"):
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
    if regime not in ("stable", "unstable"):
        raise ValueError(f"regime must be 'stable' or 'unstable', got {regime!r}")
    crit = critical_mode(p, m_max)
    gamma_c = crit.gamma_c(side)
    q_c = crit.q_c
    K1 = fourier_coefficient(p.kernel, q_c)
    K2 = fourier_coefficient(p.kernel, 2.0 * q_c)
    u1, u2 = p.u1_bar, p.u2_bar

    denom = 1.0 - gamma_c**2 * u1 * u2 * K2 * K2
    if abs(denom) < RESONANCE_TOL:
        raise SecondHarmonicResonanceError(
            f"second-harmonic resonance: |K^(2 q_c)| = |K^(q_c)| at q_c={q_c:.6g}"
        )

    rho2 = -1.0 / (gamma_c * u1 * K1)
    a2 = -1.0 / (gamma_c * u2 * K1)
    psi1 = (1.0 - gamma_c * u1 * K2) / (2.0 * u1 * denom)
    psi2 = (1.0 - gamma_c * u2 * K2) / (2.0 * u1 * denom)
    sigma = q_c * q_c if regime == "unstable" else -q_c * q_c
    Lambda = (
        0.5
        * q_c
        * q_c
        * gamma_c
        * (2.0 * K2 * (psi1 + psi2) - K1 * (psi1 * rho2 + psi2 * a2))
    )
    nu = q_c * q_c / u1
    mu = 1.0 + gamma_c * u1  # kernel coefficient at q=0 is exactly 1
    eta = 1.0 / u1
    Gamma = Lambda * mu / (eta * nu) - 1.0 if (u1 == u2 and Lambda > 0) else None

    return WnlCoefficients(
        rho2=rho2,
        a2=a2,
        psi1=psi1,
        psi2=psi2,
        sigma=sigma,
        Lambda=Lambda,
        nu=nu,
        mu=mu,
        eta=eta,
        Gamma=Gamma,
        regime=regime,
        side=side,
        gamma_c=gamma_c,
        q_c=q_c,
        m_c=crit.m_c,
        u1_bar=u1,
        u2_bar=u2,
    )


def classify(c: WnlCoefficients) -> BifurcationClass:
    """Bifurcation type implied by the coefficient signs.

    Subcritical for negative ``Lambda``.  Supercritical branches are
    unstable only in the equal-density case with negative ``Gamma``; for
    unequal densities they are always stable.
    """
    if c.Lambda < 0:
        return BifurcationClass.SUBCRITICAL
    if c.Lambda == 0:
        raise ValueError("degenerate bifurcation: cubic coefficient vanishes")
    if c.equal_densities and c.Gamma is not None and c.Gamma < 0:
        return BifurcationClass.SUPERCRITICAL_UNSTABLE
    return BifurcationClass.SUPERCRITICAL_STABLE


def stability_coefficient_tophat(L: float) -> float:
    """Closed form of ``Gamma`` for the top-hat kernel, avoidance side.

    Valid for equal densities and positive advection strength, where the
    coefficient ratio collapses to an expression in the kernel
    coefficients at the first admissible wavenumber and its double.
    """
    if L <= 2:
        raise ValueError(f"L must exceed 2, got {L}")
    kernel = Kernel.top_hat()
    q1 = 2.0 * math.pi / L
    K1 = fourier_coefficient(kernel, q1)
    K2 = fourier_coefficient(kernel, 2.0 * q1)
    denom = 2.0 * K1 * (K2 + K1)
    if abs(denom) < 1e-14:
        raise ValueError(f"singular denominator in stability coefficient at L={L}")
    return (1.0 + K1) * (2.0 * K2 + K1) / denom - 1.0


def zero_mode_growth_rates(
    c: WnlCoefficients, a0: float, Q: float
) -> tuple[float, float, float]:
    """Growth rates of large-scale perturbations of the patterned state.

    Perturbing the stationary amplitude and the zero mode at modulation
    wavenumber ``Q`` yields a 3x3 eigenvalue problem with one identically
    zero rate (the pattern phase) and the pair

        lambda_pm = (-mu Q^2 - 2 sigma
                     +- sqrt(mu^2 Q^4 + Q^2 (8 a0^2 eta nu - 4 mu sigma)
                             + 4 sigma^2)) / 2.

    Returns ``(0, lambda_plus, lambda_minus)``.  Meaningful for the
    equal-density amplitude equations with ``a0^2 = sigma / Lambda``.
    """
    if not c.equal_densities:
        raise ValueError("zero-mode growth rates require equal densities")
    s, mu, eta, nu = c.sigma, c.mu, c.eta, c.nu
    Q2 = Q * Q
    disc = mu * mu * Q2 * Q2 + Q2 * (8.0 * a0 * a0 * eta * nu - 4.0 * mu * s) + 4.0 * s * s
    root = math.sqrt(disc) if disc >= 0 else 0.0
    if disc < 0:
        # complex pair; report the shared real part in both slots
        lam_p = lam_m = 0.5 * (-mu * Q2 - 2.0 * s)
        return 0.0, lam_p, lam_m
    lam_p = 0.5 * (-mu * Q2 - 2.0 * s + root)
    lam_m = 0.5 * (-mu * Q2 - 2.0 * s - root)
    return 0.0, lam_p, lam_m


@dataclass(frozen=True)
class AnalyticBranch:
    """Small-amplitude branch predicted by the amplitude equations.

    ``amplitude_values`` holds the first-harmonic half-amplitude of the
    first species, ``eps * sqrt(sigma / Lambda)``; the second-harmonic
    correction enters the reconstructed profiles but not this measure.
    Points of the requested range where no stationary amplitude exists
    (``sigma / Lambda <= 0``) are dropped.
    """

    side: str
    gamma_c: float
    q_c: float
    gamma_values: np.ndarray
    epsilon_values: np.ndarray
    amplitude_values: np.ndarray
    stability_flags: np.ndarray
    profiles: list[StateGrid] | None = None


def _profile_arrays(
    p: ModelParams, c: WnlCoefficients, eps: float, a0: float, n: int
) -> tuple[np.ndarray, np.ndarray]:
    x = -p.L / 2 + p.L / n * np.arange(n)
    first = 2.0 * eps * a0 * np.cos(c.q_c * x)
    second = 2.0 * eps * eps * a0 * a0 * np.cos(2.0 * c.q_c * x)
    u1 = p.u1_bar + first + c.psi1 * second
    u2 = p.u2_bar + c.rho2 * first + c.psi2 * second
    return u1, u2


def wnl_profile(p: ModelParams, gamma: float, n: int) -> StateGrid:
    """Reconstructed pattern profile at ``gamma``, phase fixed at zero.

    The branch side follows sign(gamma); the regime (and with it the
    stationary amplitude) is chosen so that ``sigma / Lambda > 0``.  At a
    parameter with no stationary amplitude the homogeneous profile is
    returned.
    """
    side = "plus" if gamma > 0 else "minus"
    c = wnl_coefficients(p, side=side, regime="unstable")
    gamma_c = c.gamma_c
    regime = "unstable" if abs(gamma) >= abs(gamma_c) else "stable"
    if regime == "stable":
        c = wnl_coefficients(p, side=side, regime="stable")
    eps = math.sqrt(abs((gamma - gamma_c) / gamma_c))
    ratio = c.sigma / c.Lambda if c.Lambda != 0 else -1.0
    if ratio <= 0 or eps == 0.0:
        u1 = np.full(n, p.u1_bar)
        u2 = np.full(n, p.u2_bar)
    else:
        u1, u2 = _profile_arrays(p, c, eps, math.sqrt(ratio), n)
    return StateGrid(n=n, L=p.L, u1=u1, u2=u2)


def analytic_branch(
    p: ModelParams,
    side: str,
    gamma_range: tuple[float, float],
    n_points: int,
    profile_n: int | None = None,
) -> AnalyticBranch:
    """Stationary small-amplitude branch over a range of ``gamma``.

    In the unstable regime the branch exists for positive ``Lambda``
    (supercritical) and is stable exactly when the bifurcation classifies
    as stable supercritical.  In the stable regime it exists for negative
    ``Lambda`` (the subcritical branch) and is always unstable.
    """
    c_unstable = wnl_coefficients(p, side=side, regime="unstable")
    c_stable = wnl_coefficients(p, side=side, regime="stable")
    if c_unstable.Lambda == 0:
        raise ValueError("cubic coefficient vanishes: no branch at this order")
    gamma_c = c_unstable.gamma_c
    super_stable = classify(c_unstable) == BifurcationClass.SUPERCRITICAL_STABLE

    gammas, epss, amps, flags = [], [], [], []
    profiles = [] if profile_n is not None else None
    for gamma in np.linspace(gamma_range[0], gamma_range[1], n_points):
        if gamma * gamma_c < 0:
            continue  # opposite sign: not on this branch's side
        unstable_regime = abs(gamma) >= abs(gamma_c)
        c = c_unstable if unstable_regime else c_stable
        ratio = c.sigma / c.Lambda
        eps = math.sqrt(abs((gamma - gamma_c) / gamma_c))
        if ratio <= 0 and eps > 0:
            continue
        a0 = math.sqrt(ratio) if ratio > 0 else 0.0
        gammas.append(float(gamma))
        epss.append(eps)
        amps.append(eps * a0)
        flags.append(bool(unstable_regime and super_stable))
        if profiles is not None:
            u1, u2 = _profile_arrays(p, c, eps, a0, profile_n)
            profiles.append(StateGrid(n=profile_n, L=p.L, u1=u1, u2=u2))

    return AnalyticBranch(
        side=side,
        gamma_c=gamma_c,
        q_c=c_unstable.q_c,
        gamma_values=np.asarray(gammas),
        epsilon_values=np.asarray(epss),
        amplitude_values=np.asarray(amps),
        stability_flags=np.asarray(flags, dtype=bool),
        profiles=profiles,
    )
