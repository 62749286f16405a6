"""Parameter sweeps, numerical bifurcation diagrams and hysteresis.

A sweep advances the advection strength through a monotone sequence,
relaxing each value to a steady state and seeding the next from the result.
Sweeping up and then back down exposes bistability: wherever the two
directions settle on different amplitudes the diagram records a hysteresis
interval.  Converged states are additionally classified by how much of
their spectral energy sits in the first Fourier mode, which separates
single-mode small-amplitude patterns from strongly modulated ones.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .model import ModelParams
from .spectral import (
    SolverConfig,
    StateGrid,
    default_initial_state,
    mode1_energy_fraction,
    mode_amplitude,
    run,
)
from .weakly_nonlinear import wnl_profile

__all__ = [
    "ModulationClass",
    "BranchPoint",
    "Diagram",
    "sweep",
    "build_diagram",
    "classify_modulation",
    "default_gamma_grid",
    "trace_diagram",
]

SEED_MODES = ("homogeneous_plus_noise", "previous_state", "wnl_profile")

#: Steady states keeping less than this share of their nonzero-mode energy
#: in the first mode are classified as strongly modulated.
MODE1_FRACTION_THRESHOLD = 0.8

#: Relative amplitude mismatch between sweep directions that counts as
#: hysteresis.
HYSTERESIS_REL_TOL = 0.05


class ModulationClass(enum.Enum):
    SMALL_AMPLITUDE = "small_amplitude"
    STRONGLY_MODULATED = "strongly_modulated"


@dataclass(frozen=True)
class BranchPoint:
    """One steady state of a sweep.

    ``amplitude`` is the first-harmonic half-amplitude of species 1,
    ``total_amplitude`` half its full range, and ``mode1_energy_fraction``
    the share of nonzero-mode spectral energy in modes +-1.  ``state_ref``
    keeps the converged grid for reseeding and serialization.
    """

    gamma: float
    amplitude: float
    total_amplitude: float
    mode1_energy_fraction: float
    converged: bool
    state_ref: StateGrid | None = None


@dataclass(frozen=True)
class Diagram:
    upward: list[BranchPoint]
    downward: list[BranchPoint]
    hysteresis_interval: tuple[float, float] | None


def classify_modulation(bp: BranchPoint) -> ModulationClass:
    """Single-mode pattern or superposition of several modes."""
    if bp.mode1_energy_fraction < MODE1_FRACTION_THRESHOLD:
        return ModulationClass.STRONGLY_MODULATED
    return ModulationClass.SMALL_AMPLITUDE


def _measure(gamma: float, state: StateGrid, converged: bool) -> BranchPoint:
    return BranchPoint(
        gamma=float(gamma),
        amplitude=mode_amplitude(state, 1),
        total_amplitude=float((state.u1.max() - state.u1.min()) / 2.0),
        mode1_energy_fraction=mode1_energy_fraction(state),
        converged=converged,
        state_ref=state,
    )


def _rescale_mass(state: StateGrid, p: ModelParams) -> StateGrid:
    m1, m2 = state.mass()
    u1 = state.u1 * (p.u1_bar * p.L / m1)
    u2 = state.u2 * (p.u2_bar * p.L / m2)
    return StateGrid(n=state.n, L=state.L, u1=u1, u2=u2)


def _perturbed(state: StateGrid, rel: float, seed: int) -> StateGrid:
    rng = np.random.default_rng(seed)
    f1 = 1.0 + rel * rng.standard_normal(state.n)
    f2 = 1.0 + rel * rng.standard_normal(state.n)
    return StateGrid(n=state.n, L=state.L, u1=state.u1 * f1, u2=state.u2 * f2)


def sweep(
    p_base: ModelParams,
    gamma_list,
    config: SolverConfig,
    seed_mode: str = "previous_state",
    seed: int = 0,
    initial_state: StateGrid | None = None,
) -> list[BranchPoint]:
    """Relax each advection strength to steady state along a monotone path.

    ``seed_mode`` selects the initial condition at each point: fresh seeded
    noise around the homogeneous state, the previous point's steady state
    with a 1e-6 relative perturbation (the first point starts from
    ``initial_state`` or a small critical-mode perturbation), or the
    reconstructed analytic pattern profile.  Points that hit the time
    horizon without reaching steadiness are flagged and the sweep
    continues from whatever state they ended in.
    """
    if seed_mode not in SEED_MODES:
        raise ValueError(f"seed_mode must be one of {SEED_MODES}, got {seed_mode!r}")
    gammas = [float(g) for g in gamma_list]
    mags = [abs(g) for g in gammas]
    ascending = all(b >= a for a, b in zip(mags, mags[1:]))
    descending = all(b <= a for a, b in zip(mags, mags[1:]))
    if not (ascending or descending):
        raise ValueError("gamma_list must be monotone in |gamma|")

    points: list[BranchPoint] = []
    prev_state = initial_state
    for i, gamma in enumerate(gammas):
        p = replace(p_base, gamma=gamma)
        if seed_mode == "homogeneous_plus_noise":
            state0 = default_initial_state(p, config.n, kind="noise", seed=seed + i)
        elif seed_mode == "wnl_profile":
            state0 = wnl_profile(p, gamma, config.n)
            if state0.u1.max() - state0.u1.min() < 1e-12 * p.u1_bar:
                state0 = default_initial_state(p, config.n)
        else:
            if prev_state is None:
                state0 = default_initial_state(p, config.n)
            else:
                state0 = _perturbed(prev_state, 1e-6, seed=seed + i)
                state0 = _rescale_mass(state0, p)
        result = run(state0, p, config)
        points.append(_measure(gamma, result.final_state, result.reached_steady))
        prev_state = result.final_state
    return points


def build_diagram(
    up: list[BranchPoint],
    down: list[BranchPoint],
    rel_tol: float = HYSTERESIS_REL_TOL,
    amp_floor: float | None = None,
) -> Diagram:
    """Merge an up and a down sweep and locate the hysteresis interval.

    Both sweeps must cover the same advection strengths.  A point shows
    hysteresis when the two directions disagree by more than ``rel_tol``
    relative to the larger amplitude (with a floor so that two numerically
    zero amplitudes never disagree); the interval spans all such points.
    """
    by_gamma_up = {bp.gamma: bp for bp in up}
    by_gamma_down = {bp.gamma: bp for bp in down}
    if set(by_gamma_up) != set(by_gamma_down):
        raise ValueError("up and down sweeps must cover the same gamma grid")
    if amp_floor is None:
        biggest = max(
            (bp.total_amplitude for bp in up + down), default=0.0
        )
        amp_floor = max(1e-6, 1e-3 * biggest)

    flagged = []
    for gamma in by_gamma_up:
        a_up = by_gamma_up[gamma].amplitude
        a_down = by_gamma_down[gamma].amplitude
        if abs(a_up - a_down) > rel_tol * max(a_up, a_down, amp_floor):
            flagged.append(gamma)
    interval = (min(flagged), max(flagged)) if flagged else None
    return Diagram(upward=list(up), downward=list(down), hysteresis_interval=interval)


def default_gamma_grid(
    gamma_c: float, n_points: int = 40, lo: float = 0.9, hi: float = 1.3
) -> np.ndarray:
    """Signed grid spanning ``[lo, hi]`` times the threshold, ascending |gamma|."""
    return gamma_c * np.linspace(lo, hi, n_points)


def _largest_jump(points: list[BranchPoint]) -> tuple[float, float] | None:
    best = None
    best_size = 0.0
    for a, b in zip(points, points[1:]):
        size = abs(b.amplitude - a.amplitude)
        if size > best_size:
            best_size = size
            best = (a, b)
    if best is None:
        return None
    scale = max(best[0].amplitude, best[1].amplitude, 1e-6)
    if best_size <= HYSTERESIS_REL_TOL * scale:
        return None
    return best[0].gamma, best[1].gamma


def _insert_points(
    points: list[BranchPoint],
    extra: list[BranchPoint],
    descending: bool,
) -> list[BranchPoint]:
    merged = points + extra
    merged.sort(key=lambda bp: abs(bp.gamma), reverse=descending)
    return merged


def trace_diagram(
    p_base: ModelParams,
    config: SolverConfig,
    gammas=None,
    side: str = "plus",
    seed: int = 0,
    refine: bool = True,
    refine_factor: int = 3,
) -> Diagram:
    """Up sweep, down sweep seeded from its end state, merged diagram.

    With ``refine`` the grid is densified once around the largest
    amplitude jump of each sweep (``refine_factor`` times finer there) and
    the inserted points are relaxed starting from the neighboring state,
    which sharpens hysteresis endpoints.
    """
    if gammas is None:
        from .linear_stability import critical_mode

        gamma_c = critical_mode(p_base).gamma_c(side)
        gammas = default_gamma_grid(gamma_c)
    gammas = np.asarray(list(gammas), dtype=float)
    order = np.argsort(np.abs(gammas))
    up_grid = gammas[order]
    down_grid = up_grid[::-1]

    up = sweep(p_base, up_grid, config, seed_mode="previous_state", seed=seed)
    down = sweep(
        p_base,
        down_grid,
        config,
        seed_mode="previous_state",
        seed=seed + 1,
        initial_state=up[-1].state_ref,
    )

    if refine and refine_factor > 1:
        jumps = [j for j in (_largest_jump(up), _largest_jump(down)) if j is not None]
        inserted: list[float] = []
        for g_a, g_b in jumps:
            fill = np.linspace(g_a, g_b, refine_factor + 1)[1:-1]
            inserted.extend(float(g) for g in fill)
        inserted = sorted(set(inserted), key=abs)
        if inserted:
            up_by_mag = sorted(up, key=lambda bp: abs(bp.gamma))
            for g in inserted:
                below = [bp for bp in up_by_mag if abs(bp.gamma) <= abs(g)]
                anchor = below[-1] if below else up_by_mag[0]
                extra = sweep(
                    p_base,
                    [g],
                    config,
                    seed_mode="previous_state",
                    seed=seed + 2,
                    initial_state=anchor.state_ref,
                )
                up = _insert_points(up, extra, descending=False)
                up_by_mag = sorted(up, key=lambda bp: abs(bp.gamma))
            down_by_mag = sorted(down, key=lambda bp: abs(bp.gamma))
            for g in sorted(inserted, key=abs, reverse=True):
                above = [bp for bp in down_by_mag if abs(bp.gamma) >= abs(g)]
                anchor = above[0] if above else down_by_mag[-1]
                extra = sweep(
                    p_base,
                    [g],
                    config,
                    seed_mode="previous_state",
                    seed=seed + 3,
                    initial_state=anchor.state_ref,
                )
                down = _insert_points(down, extra, descending=True)
                down_by_mag = sorted(down, key=lambda bp: abs(bp.gamma))

    return build_diagram(up, down)
