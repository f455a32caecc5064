"""Grid-level functionals and qualitative classification of computed states.

Everything here operates on GridDensity (reconstructed profiles), not on
particle ensembles: entropy and interaction energy by trapezoid quadrature,
exact dilation identities for validating homogeneity of the functionals,
existence thresholds for equilibria, and phase/shape classification of
near-steady states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import GridDensity, Grid1D
from .errors import DomainError
from .kernels import InteractionKernel, PowerLaw

_SPEED_TOL = 1e-4


def grid_entropy(density: GridDensity, m: float) -> float:
    """Internal (entropy) part of the free energy by trapezoid quadrature.

    S_m = int rho^m / (m-1) for m > 1, and int rho log rho for m = 1,
    with the 0 * log 0 = 0 convention.
    """
    if m < 1:
        raise DomainError(f"diffusion exponent must be >= 1, got {m}")
    v = density.values
    x = density.grid.points
    if m == 1.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            integrand = np.where(v > 0, v * np.log(np.where(v > 0, v, 1.0)), 0.0)
    else:
        integrand = v**m / (m - 1.0)
    return float(np.trapezoid(integrand, x))


def grid_interaction(density: GridDensity, kernel: InteractionKernel) -> float:
    """Interaction energy 0.5 * intint W(x-y) rho(x) rho(y) dx dy.

    Double trapezoid rule on the grid; the diagonal x = y is always omitted,
    which drops a vanishing contribution for kernels with an integrable
    singularity and nothing at all for kernels with W(0) = 0.
    """
    x = density.grid.points
    g = x.size
    if g < 2:
        raise DomainError("interaction energy needs at least two grid points")
    tw = np.full(g, density.grid.spacing)
    tw[0] *= 0.5
    tw[-1] *= 0.5
    f = density.values * tw

    diff = (x[:, None] - x[None, :])[:, :, None]
    idx = np.arange(g)
    if kernel.value_singular:
        safe = diff.copy()
        safe[idx, idx, :] = 1.0
        M = kernel.evaluate(safe)
    else:
        M = kernel.evaluate(diff)
    M[idx, idx] = 0.0
    return 0.5 * float(f @ (M @ f))


def dilate(density: GridDensity, lam: float) -> GridDensity:
    """Mass-preserving dilation rho_lam(x) = lam^d * rho(lam * x), d = 1."""
    if lam <= 0:
        raise DomainError(f"dilation factor must be positive, got {lam}")
    grid = density.grid
    scaled = Grid1D(origin=grid.origin / lam, spacing=grid.spacing / lam, count=grid.count)
    return GridDensity(grid=scaled, values=density.values * lam)


def check_scaling_laws(density: GridDensity, m: float, k: float, lam: float) -> dict[str, float]:
    """Residuals of the exact dilation identities for entropy and interaction.

    For rho_lam(x) = lam rho(lam x) in d = 1:

        S_m[rho_lam] = lam^(m-1) S_m[rho]                (m > 1)
        S_1[rho_lam] = S_1[rho] + log(lam) * mass
        W_k[rho_lam] = lam^(-k) W_k[rho]                 (k != 0)
        W_0[rho_lam] = W_0[rho] - 0.5 * log(lam) * mass^2

    where W_k uses the power-law kernel |x|^k / k (log at k = 0).  Returns
    relative residuals; both identities hold exactly at the discrete level,
    so residuals of order machine epsilon certify the implementation.
    """
    scaled = dilate(density, lam)
    mass = density.mass

    s0 = grid_entropy(density, m)
    s1 = grid_entropy(scaled, m)
    if m == 1.0:
        s_expect = s0 + math.log(lam) * mass
    else:
        s_expect = lam ** (m - 1.0) * s0
    s_resid = abs(s1 - s_expect) / max(1.0, abs(s_expect))

    kern = PowerLaw(k)
    w0 = grid_interaction(density, kern)
    w1 = grid_interaction(scaled, kern)
    if k == 0.0:
        w_expect = w0 - 0.5 * math.log(lam) * mass**2
    else:
        w_expect = lam ** (-k) * w0
    w_resid = abs(w1 - w_expect) / max(1.0, abs(w_expect))

    return {"entropy": s_resid, "interaction": w_resid}


def critical_exponent(k: float, d: int = 1) -> float:
    """Critical diffusion exponent 1 - k/d for the power-law kernel |x|^k / k.

    Diffusion dominates (spreading) for m above this value and aggregation
    dominates below it; requires k > -d for local integrability.
    """
    if k <= -d:
        raise DomainError(f"kernel exponent must exceed -d = {-d}, got {k}")
    return 1.0 - k / d


def integrable_kernel_criticality(kernel: InteractionKernel, nu: float, d: int = 1) -> dict:
    """Existence threshold for equilibria with quadratic diffusion (m = 2).

    For an integrable kernel, steady states exist iff nu < -int(W)/2; a
    kernel with nonnegative integral admits none for any nu > 0.
    """
    if nu < 0:
        raise DomainError(f"diffusion coefficient must be >= 0, got {nu}")
    total = kernel.integral(d)
    nu_critical = max(-total / 2.0, 0.0)
    return {
        "kernel_integral": total,
        "nu_critical": nu_critical,
        "exists": bool(nu < nu_critical),
    }


@dataclass(frozen=True)
class EquilibriumReport:
    """Convergence flag, phase label, and shape checks for a late-time state."""

    converged: bool
    phase: str
    plateau_fraction: float
    symmetric_decreasing: bool
    max_density: float


def classify_equilibrium(
    density: GridDensity,
    max_speed: float,
    speed_tol: float = _SPEED_TOL,
    height: float = 1.0,
    height_tol: float = 0.02,
    sym_tol: float = 1e-3,
) -> EquilibriumReport:
    """Classify a (near-)steady profile.

    converged: particle speeds have dropped below speed_tol.
    phase: fraction of mass sitting on the saturation plateau
    {rho >= (1 - height_tol) * height} -- "liquid" when at most 10% of the
    mass is saturated, "solid" when at least 90% is, "intermediate" between,
    "not_converged" when speeds are still large.
    symmetric_decreasing: profile is even about its center of mass and
    non-increasing away from it, to within sym_tol * max(rho) pointwise
    (both arms resampled onto common offsets).
    """
    v = density.values
    x = density.grid.points
    mass = density.mass
    if mass <= 0:
        raise DomainError("cannot classify a zero-mass profile")
    vmax = float(np.max(v))

    mask = v >= (1.0 - height_tol) * height
    plateau_mass = float(np.trapezoid(np.where(mask, v, 0.0), x))
    frac = plateau_mass / mass

    converged = max_speed < speed_tol
    if not converged:
        phase = "not_converged"
    elif frac <= 0.1:
        phase = "liquid"
    elif frac >= 0.9:
        phase = "solid"
    else:
        phase = "intermediate"

    center = float(np.trapezoid(x * v, x)) / mass
    reach = max(x[-1] - center, center - x[0])
    offsets = np.linspace(0.0, reach, 1024)
    right = np.interp(center + offsets, x, v, left=0.0, right=0.0)
    left = np.interp(center - offsets, x, v, left=0.0, right=0.0)
    tol = sym_tol * vmax
    symmetric = bool(np.max(np.abs(right - left)) <= tol)
    arm = 0.5 * (right + left)
    decreasing = bool(np.all(np.diff(arm) <= tol))

    return EquilibriumReport(
        converged=converged,
        phase=phase,
        plateau_fraction=frac,
        symmetric_decreasing=symmetric and decreasing,
        max_density=vmax,
    )


def energy_report(density: GridDensity, kernel: InteractionKernel, m: float, nu: float) -> dict:
    """Free-energy breakdown of a grid profile.

    total = nu * S_m + W.  limit_total is the height-constrained (m -> infty)
    energy: equal to the interaction part when the profile respects the unit
    height constraint (up to 1e-3 slack), infinite otherwise.
    """
    entropy = grid_entropy(density, m)
    interaction = grid_interaction(density, kernel)
    vmax = float(np.max(density.values))
    limit_total = interaction if vmax <= 1.0 + 1e-3 else math.inf
    return {
        "entropy": entropy,
        "interaction": interaction,
        "total": nu * entropy + interaction,
        "limit_total": limit_total,
        "mass": density.mass,
        "max_density": vmax,
    }
