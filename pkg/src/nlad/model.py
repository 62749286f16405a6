"""Model parameters, nondimensionalization and the averaging kernel.

The dimensional system describes two populations that diffuse and advect
along the gradient of a spatially averaged (convolved) density of the other
species, on a periodic interval.  After rescaling space by the sensing
radius and time by the diffusive timescale, the dynamics depend only on a
signed advection strength ``gamma``, the equilibrium densities, the ratio
``L`` of domain length to sensing radius, and the averaging kernel.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DimensionalParams",
    "ModelParams",
    "Kernel",
    "nondimensionalize",
    "fourier_coefficient",
]

#: Minimum number of samples accepted for a tabulated kernel.
MIN_KERNEL_SAMPLES = 1024

#: Default sampling density used by :meth:`Kernel.from_function`.  Chosen so
#: that trapezoidal quadrature of the cosine transform is accurate to better
#: than 1e-8 for wavenumbers up to ~50.
DEFAULT_KERNEL_SAMPLES = 65537


@dataclass(frozen=True)
class DimensionalParams:
    """Dimensional description of the two-species system.

    Parameters
    ----------
    D:
        Common diffusion rate (length^2/time), positive.
    gamma_dim:
        Signed advection strength.  Positive values model mutual avoidance,
        negative values mutual attraction.
    alpha:
        Sensing radius (length), the half-width of the averaging kernel's
        support.  Must satisfy ``alpha < l/2``.
    l:
        Domain length (length), positive.
    p1, p2:
        Population sizes (total mass of each species), positive.
    """

    D: float
    gamma_dim: float
    alpha: float
    l: float
    p1: float
    p2: float

    def __post_init__(self):
        if self.D <= 0:
            raise ValueError(f"diffusion rate must be positive, got {self.D}")
        if self.l <= 0:
            raise ValueError(f"domain length must be positive, got {self.l}")
        if self.alpha <= 0:
            raise ValueError(f"sensing radius must be positive, got {self.alpha}")
        if self.p1 <= 0 or self.p2 <= 0:
            raise ValueError(
                f"population sizes must be positive, got ({self.p1}, {self.p2})"
            )
        if self.alpha >= self.l / 2:
            raise ValueError(
                f"sensing radius must be smaller than half the domain: "
                f"alpha={self.alpha} >= l/2={self.l / 2}"
            )


@dataclass(frozen=True)
class Kernel:
    """Even, nonnegative averaging kernel with unit mass on [-1, 1].

    Two variants are supported.  The default top-hat kernel (constant 1/2 on
    [-1, 1]) has the closed-form Fourier coefficient ``sin(q)/q``.  A
    tabulated kernel holds uniform samples on [-1, 1] and is transformed by
    trapezoidal quadrature of the cosine integral; this keeps the linear and
    weakly nonlinear machinery fully kernel-generic.
    """

    kind: str = "top_hat"
    samples: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("top_hat", "tabulated"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "top_hat":
            if self.samples is not None:
                raise ValueError("top_hat kernel takes no samples")
            return
        if self.samples is None:
            raise ValueError("tabulated kernel requires samples")
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1 or s.size < MIN_KERNEL_SAMPLES:
            raise ValueError(
                f"tabulated kernel needs at least {MIN_KERNEL_SAMPLES} "
                f"uniform samples on [-1, 1], got shape {s.shape}"
            )
        if s.min() < 0:
            raise ValueError("kernel samples must be nonnegative")
        scale = max(s.max(), 1.0)
        if np.max(np.abs(s - s[::-1])) > 1e-12 * scale:
            raise ValueError("kernel must be even: samples[i] == samples[-1-i]")
        x = np.linspace(-1.0, 1.0, s.size)
        mass = np.trapezoid(s, x)
        if abs(mass - 1.0) > 1e-12:
            raise ValueError(f"kernel must integrate to 1 on [-1, 1], got {mass!r}")
        s = s.copy()
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "_transform_cache", {})

    @classmethod
    def top_hat(cls) -> "Kernel":
        return cls(kind="top_hat")

    @classmethod
    def tabulated(cls, samples) -> "Kernel":
        return cls(kind="tabulated", samples=np.asarray(samples, dtype=float))

    @classmethod
    def from_function(cls, fn, n_samples: int = DEFAULT_KERNEL_SAMPLES) -> "Kernel":
        """Sample ``fn`` uniformly on [-1, 1], symmetrize and normalize.

        The samples are averaged with their mirror image (so tiny evenness
        violations of ``fn`` are removed) and rescaled to unit trapezoidal
        mass, which makes the resulting kernel pass validation exactly.
        """
        x = np.linspace(-1.0, 1.0, n_samples)
        s = np.asarray([fn(xi) for xi in x], dtype=float)
        s = 0.5 * (s + s[::-1])
        mass = np.trapezoid(s, x)
        if mass <= 0:
            raise ValueError("kernel function must have positive mass")
        return cls.tabulated(s / mass)


def _top_hat_coefficient(q: np.ndarray) -> np.ndarray:
    # sin(q)/q with the removable singularity evaluated by series near 0 to
    # keep the result smooth for threshold root-finding.
    q = np.asarray(q, dtype=float)
    out = np.empty_like(q)
    small = np.abs(q) < 1e-4
    qs = q[small]
    out[small] = 1.0 - qs * qs / 6.0 * (1.0 - qs * qs / 20.0)
    qb = q[~small]
    out[~small] = np.sin(qb) / qb
    return out


def fourier_coefficient(kernel: Kernel, q) -> float | np.ndarray:
    """Fourier coefficient of the kernel at wavenumber(s) ``q``.

    Evenness of the kernel makes the transform real: it reduces to the
    cosine integral of the samples over [-1, 1].  Accepts a scalar or an
    array of wavenumbers; the return matches the input shape.
    """
    q_arr = np.atleast_1d(np.asarray(q, dtype=float))
    if kernel.kind == "top_hat":
        out = _top_hat_coefficient(q_arr)
    else:
        cache = getattr(kernel, "_transform_cache", None)
        key = q_arr.tobytes()
        if cache is not None and key in cache:
            out = cache[key]
        else:
            s = kernel.samples
            x = np.linspace(-1.0, 1.0, s.size)
            out = np.empty_like(q_arr)
            # chunked to bound the cos(q x) workspace at ~32 MB
            chunk = max(1, int(6e6) // s.size)
            for i in range(0, q_arr.size, chunk):
                qi = q_arr[i : i + chunk]
                out[i : i + chunk] = np.trapezoid(
                    s * np.cos(np.outer(qi, x)), x, axis=1
                )
            if cache is not None:
                cache[key] = out
    if np.isscalar(q) or np.ndim(q) == 0:
        return float(out[0])
    return out


@dataclass(frozen=True)
class ModelParams:
    """Nondimensional parameters of the two-species system.

    ``gamma`` is the rescaled advection strength, ``u1_bar`` and ``u2_bar``
    the equilibrium densities (equal to the population sizes after
    rescaling), ``L`` the domain length in units of the sensing radius.
    """

    gamma: float
    u1_bar: float
    u2_bar: float
    L: float
    kernel: Kernel = field(default_factory=Kernel.top_hat)

    def __post_init__(self):
        if self.L <= 2:
            raise ValueError(
                f"L must exceed 2 (sensing radius below half the domain), got {self.L}"
            )
        if self.u1_bar <= 0 or self.u2_bar <= 0:
            raise ValueError(
                f"equilibrium densities must be positive, "
                f"got ({self.u1_bar}, {self.u2_bar})"
            )


def nondimensionalize(p: DimensionalParams, kernel: Kernel | None = None) -> ModelParams:
    """Rescale a dimensional parameter set to the nondimensional system.

    Space is measured in sensing radii and time in diffusive units, giving
    ``gamma = gamma_dim / (l D)`` and ``L = l / alpha``.  The rescaled
    densities integrate to the population sizes, so the equilibrium is
    ``(p1, p2)``.
    """
    return ModelParams(
        gamma=p.gamma_dim / (p.l * p.D),
        u1_bar=p.p1,
        u2_bar=p.p2,
        L=p.l / p.alpha,
        kernel=kernel if kernel is not None else Kernel.top_hat(),
    )
