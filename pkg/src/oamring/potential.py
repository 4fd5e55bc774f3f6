"""Light-mediated pair potential on the ring, its Fourier spectrum, and the
derived per-harmonic rate (g_k) and dispersion (alpha_k) coefficients.

The potential between two atoms separated by the azimuthal angle phi is

    V(phi) = -cos(2 k0_rho q(phi) - ell phi) / (k0_rho q(phi)),
    q(phi) = sqrt(sin^2(phi/2) + epsilon^2),

where epsilon regularizes the contact singularity.  Its Fourier coefficients
V_k drive every other module: the imaginary parts set the superradiant rates,
the real parts the dispersive phase shifts.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ResolutionError
from .numerics import periodic_fourier_coefficients

__all__ = [
    "FourierPotential",
    "SystemParams",
    "dispersion_coefficients",
    "fourier_coefficients",
    "pair_potential",
    "rate_coefficients",
]

#: The only cutoff value the source scenarios state; applied unless overridden.
DEFAULT_EPSILON = 0.1

#: Convergence demanded of every retained coefficient under grid doubling.
GRID_DOUBLING_TOL = 1e-10


def default_m_max(ell: int, k0_rho: float) -> int:
    """Band half-width ample for cascades at this radius: the dominant
    transition advances by roughly k0_rho per step, plus safety margin."""
    return abs(ell) + int(math.ceil(k0_rho)) + 12


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless physical configuration plus numerical truncations.

    gamma   -- light-atom coupling (absorbs atom number, detuning, pump power)
    epsilon -- short-range cutoff of the pair potential, > 0
    k0_rho  -- ring radius in units of the optical wavenumber
    ell     -- pump winding number (integer, may be negative or zero)
    m_max   -- half-width of the retained OAM band; default ties to k0_rho
    k_max   -- number of retained potential harmonics; default 2 * m_max
    """

    gamma: float
    epsilon: float = DEFAULT_EPSILON
    k0_rho: float = 1.0
    ell: int = 1
    m_max: int | None = None
    k_max: int | None = None

    def __post_init__(self):
        if not self.gamma >= 0.0:
            raise ConfigurationError(f"gamma must be >= 0, got {self.gamma}")
        if not self.epsilon > 0.0:
            raise ConfigurationError(f"epsilon must be > 0, got {self.epsilon}")
        if not self.k0_rho > 0.0:
            raise ConfigurationError(f"k0_rho must be > 0, got {self.k0_rho}")
        if self.ell != int(self.ell):
            raise ConfigurationError(f"ell must be an integer, got {self.ell}")
        object.__setattr__(self, "ell", int(self.ell))
        if self.m_max is None:
            object.__setattr__(self, "m_max", default_m_max(self.ell, self.k0_rho))
        if self.m_max < abs(self.ell) + 2:
            raise ConfigurationError(
                f"m_max={self.m_max} too small; need at least |ell| + 2 = "
                f"{abs(self.ell) + 2}"
            )
        if self.k_max is None:
            object.__setattr__(self, "k_max", 2 * self.m_max)
        if self.k_max > 2 * self.m_max:
            raise ConfigurationError(
                f"k_max={self.k_max} exceeds 2*m_max={2 * self.m_max}; harmonics "
                "beyond the band cannot act on retained modes"
            )
        if self.k_max < 1:
            raise ConfigurationError("k_max must be >= 1")

    def fingerprint(self) -> str:
        key = repr((self.gamma, self.epsilon, self.k0_rho, self.ell,
                    self.m_max, self.k_max))
        return hashlib.sha256(key.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class FourierPotential:
    """Complex coefficients V_k for |k| <= k_max, index k + k_max.

    Immutable after construction; V_{-k} = conj(V_k) holds because V(phi)
    is real-valued.
    """

    coefficients: np.ndarray
    k_max: int
    params_fingerprint: str = field(default="")

    def coefficient(self, k: int) -> complex:
        if abs(k) > self.k_max:
            raise ConfigurationError(
                f"harmonic k={k} outside the retained band |k| <= {self.k_max}"
            )
        return complex(self.coefficients[k + self.k_max])


def pair_potential(phi, params: SystemParams):
    """Pair potential V(phi); accepts a scalar or an array of angles.

    The angle is reduced mod 2 pi internally, so the function is exactly
    2 pi periodic.  epsilon > 0 keeps the denominator finite everywhere.
    """
    phi = np.mod(np.asarray(phi, dtype=float), 2.0 * np.pi)
    q = np.sqrt(np.sin(phi / 2.0) ** 2 + params.epsilon**2)
    val = -np.cos(2.0 * params.k0_rho * q - params.ell * phi) / (params.k0_rho * q)
    return float(val) if val.ndim == 0 else val


def _quadrature_grid(params: SystemParams) -> int:
    # The integrand has a peak of angular width ~epsilon at phi = 0 that the
    # grid must resolve; aliasing there is the dominant silent failure mode.
    need = max(8192, 32 * params.k_max, int(math.ceil(64.0 / params.epsilon)))
    return 1 << (need - 1).bit_length()


def _coefficients_on_grid(params: SystemParams, grid: int) -> np.ndarray:
    phi = 2.0 * np.pi * np.arange(grid) / grid
    return periodic_fourier_coefficients(pair_potential(phi, params), params.k_max)


def fourier_coefficients(params: SystemParams) -> FourierPotential:
    """Fourier spectrum of the pair potential, verified by grid doubling.

    Raises ResolutionError naming the first harmonic whose value moves by
    more than GRID_DOUBLING_TOL when the quadrature grid is doubled.
    """
    grid = _quadrature_grid(params)
    coarse = _coefficients_on_grid(params, grid)
    fine = _coefficients_on_grid(params, 2 * grid)
    delta = np.abs(fine - coarse)
    if np.any(delta > GRID_DOUBLING_TOL):
        k_bad = int(np.argmax(delta)) - params.k_max
        raise ResolutionError(k_bad, float(delta.max()), GRID_DOUBLING_TOL)
    return FourierPotential(
        coefficients=fine,
        k_max=params.k_max,
        params_fingerprint=params.fingerprint(),
    )


def rate_coefficients(fp: FourierPotential, gamma: float) -> np.ndarray:
    """Superradiant rate coefficients g_k = gamma * |Im V_k| for k = 1..k_max.

    Returned array is indexed so that result[k] = g_k, with result[0] = 0
    (there is no k = 0 transition)."""
    g = gamma * np.abs(fp.coefficients[fp.k_max :].imag)
    g[0] = 0.0
    return g


def dispersion_coefficients(fp: FourierPotential, gamma: float) -> np.ndarray:
    """Dispersion coefficients alpha_k = (gamma/2) Re V_k for k = 0..k_max.

    alpha_0 is half the mean-field phase offset gamma * V_0."""
    return 0.5 * gamma * fp.coefficients[fp.k_max :].real.copy()
