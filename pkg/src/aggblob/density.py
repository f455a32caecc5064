"""Initial densities, particle ensembles, grids, reconstruction and remeshing.

The solver is written for d=1 grids (the core dynamics are dimension-generic,
but discretization, reconstruction and remeshing operate on 1d cell
partitions: particles sit at cell centers and carry the cell integrals of the
initial density as weights).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DomainError, NumericalError
from .mollifier import Mollifier

# ---------------------------------------------------------------------------
# particle ensembles and grids


@dataclass(frozen=True)
class ParticleEnsemble:
    """Weighted particles x_i with masses m_i >= 0 and native spacing h.

    Positions have shape (n, d).  In d=1 the canonical order is ascending;
    construction sorts if needed (permuting weights identically).  Arrays are
    frozen after construction, so ensembles can be shared freely.
    """

    positions: np.ndarray
    weights: np.ndarray
    h: float

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        if pos.shape[0] != w.shape[0]:
            raise DomainError(
                f"{pos.shape[0]} positions but {w.shape[0]} weights"
            )
        if pos.shape[0] == 0:
            raise DomainError("ensemble must contain at least one particle")
        if np.any(w < 0):
            raise DomainError("weights must be nonnegative")
        if not np.sum(w) > 0:
            raise DomainError("total mass must be positive")
        if not (self.h > 0):
            raise DomainError(f"spacing h must be positive, got {self.h}")
        if not np.all(np.isfinite(pos)):
            raise DomainError("positions must be finite")
        if pos.shape[1] == 1:
            order = np.argsort(pos[:, 0], kind="stable")
            if not np.array_equal(order, np.arange(pos.shape[0])):
                pos = pos[order]
                w = w[order]
        pos = np.ascontiguousarray(pos)
        w = np.ascontiguousarray(w)
        pos.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def d(self) -> int:
        return self.positions.shape[1]

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def center_of_mass(self) -> np.ndarray:
        return np.sum(self.weights[:, None] * self.positions, axis=0) / self.total_mass

    @property
    def second_moment(self) -> float:
        return float(np.sum(self.weights * np.sum(self.positions**2, axis=1)))


def max_gap(ens: ParticleEnsemble) -> float:
    """Largest distance between consecutive particles (d=1)."""
    if ens.d != 1:
        raise DomainError("max_gap is defined for d=1 ensembles")
    if ens.n < 2:
        return 0.0
    return float(np.max(np.diff(ens.positions[:, 0])))


@dataclass(frozen=True)
class Grid1D:
    origin: float
    spacing: float
    count: int

    def __post_init__(self):
        if not (self.spacing > 0):
            raise DomainError(f"grid spacing must be positive, got {self.spacing}")
        if self.count < 2:
            raise DomainError(f"grid needs at least 2 points, got {self.count}")

    @property
    def points(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.count)

    @classmethod
    def cover(cls, lo: float, hi: float, count: int) -> "Grid1D":
        if not hi > lo:
            raise DomainError(f"empty grid interval [{lo}, {hi}]")
        return cls(origin=lo, spacing=(hi - lo) / (count - 1), count=count)


@dataclass(frozen=True)
class GridDensity:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.count,):
            raise DomainError(
                f"values shape {v.shape} does not match grid count {self.grid.count}"
            )
        object.__setattr__(self, "values", v)

    @property
    def mass(self) -> float:
        return float(np.trapezoid(self.values, dx=self.grid.spacing))


# ---------------------------------------------------------------------------
# Barenblatt profiles

_barenblatt_cache: dict = {}


def barenblatt_params(alpha: float, d: int = 1) -> tuple[float, float]:
    """(beta, kappa) for the self-similar porous-medium profile.

    rho_alpha(x, tau) = tau^(-d beta) (kappa - (beta/2)((alpha-1)/alpha)
    tau^(-2 beta) |x|^2)_+^(1/(alpha-1)), beta = 1/(2 + d(alpha-1)), kappa
    normalized so the profile has unit mass at tau = 1.
    """
    if not alpha > 1:
        raise DomainError(f"Barenblatt profile requires alpha > 1, got {alpha}")
    if d != 1:
        raise DomainError("Barenblatt normalization implemented for d=1 only")
    key = (float(alpha), d)
    if key in _barenblatt_cache:
        return _barenblatt_cache[key]
    beta = 1.0 / (2.0 + d * (alpha - 1.0))
    c = 0.5 * beta * (alpha - 1.0) / alpha
    expo = 1.0 / (alpha - 1.0)

    def mass_at(kappa):
        radius = math.sqrt(kappa / c)
        val, _ = quad(
            lambda x: (kappa - c * x * x) ** expo,
            0.0,
            radius,
            epsabs=1e-12,
            epsrel=1e-12,
            limit=200,
        )
        return 2.0 * val

    lo, hi = 1e-8, 1.0
    while mass_at(hi) < 1.0:
        hi *= 2.0
    kappa = brentq(lambda k: mass_at(k) - 1.0, lo, hi, xtol=1e-15, rtol=8.9e-16)
    if abs(mass_at(kappa) - 1.0) > 1e-10:
        raise NumericalError("Barenblatt normalization did not converge")
    _barenblatt_cache[key] = (beta, float(kappa))
    return _barenblatt_cache[key]


def barenblatt_profile(
    x: np.ndarray, alpha: float, tau: float, mass: float = 1.0, center: float = 0.0
) -> np.ndarray:
    """mass * rho_alpha(x - center, tau), vectorized over x (d=1)."""
    if not tau > 0:
        raise DomainError(f"Barenblatt time must be positive, got {tau}")
    beta, kappa = barenblatt_params(alpha)
    c = 0.5 * beta * (alpha - 1.0) / alpha
    y = np.asarray(x, dtype=float) - center
    arg = kappa - c * tau ** (-2.0 * beta) * y * y
    return mass * tau ** (-beta) * np.maximum(arg, 0.0) ** (1.0 / (alpha - 1.0))


def barenblatt_radius(alpha: float, tau: float) -> float:
    """Support radius of rho_alpha(., tau)."""
    beta, kappa = barenblatt_params(alpha)
    c = 0.5 * beta * (alpha - 1.0) / alpha
    return tau**beta * math.sqrt(kappa / c)


# ---------------------------------------------------------------------------
# initial density specifications


class DensitySpec:
    def evaluate(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def total_mass(self) -> float:
        raise NotImplementedError

    def cell_integral(self, lo: float, hi: float) -> float:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Characteristic(DensitySpec):
    """height * 1_{[a, b]}."""

    a: float
    b: float
    height: float

    def __post_init__(self):
        if not self.b > self.a:
            raise DomainError(f"need b > a, got [{self.a}, {self.b}]")
        if not self.height > 0:
            raise DomainError(f"height must be positive, got {self.height}")

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.a) & (x <= self.b), self.height, 0.0)

    def support(self):
        return (self.a, self.b)

    def total_mass(self):
        return self.height * (self.b - self.a)

    def cell_integral(self, lo, hi):
        overlap = min(hi, self.b) - max(lo, self.a)
        return self.height * max(overlap, 0.0)

    def to_config(self):
        return {"type": "char", "a": self.a, "b": self.b, "height": self.height}


@dataclass(frozen=True)
class Barenblatt(DensitySpec):
    """mass * rho_alpha(x - center, tau), the self-similar profile."""

    alpha: float
    tau: float
    mass: float = 1.0
    center: float = 0.0

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")
        barenblatt_params(self.alpha)  # validates alpha
        if not self.tau > 0:
            raise DomainError(f"tau must be positive, got {self.tau}")

    def evaluate(self, x):
        return barenblatt_profile(x, self.alpha, self.tau, self.mass, self.center)

    def support(self):
        r = barenblatt_radius(self.alpha, self.tau)
        return (self.center - r, self.center + r)

    def total_mass(self):
        return self.mass

    def cell_integral(self, lo, hi):
        slo, shi = self.support()
        lo2, hi2 = max(lo, slo), min(hi, shi)
        if hi2 <= lo2:
            return 0.0
        beta, kappa = barenblatt_params(self.alpha)
        c = 0.5 * beta * (self.alpha - 1.0) / self.alpha
        scale = self.mass * self.tau ** (-beta)
        ct = c * self.tau ** (-2.0 * beta)
        expo = 1.0 / (self.alpha - 1.0)
        x0 = self.center

        def f(x):
            arg = kappa - ct * (x - x0) ** 2
            return scale * arg**expo if arg > 0 else 0.0

        val, _ = quad(f, lo2, hi2, epsabs=1e-12, epsrel=1e-10, limit=200)
        return val

    def to_config(self):
        return {
            "type": "barenblatt",
            "alpha": self.alpha,
            "tau": self.tau,
            "mass": self.mass,
            "center": self.center,
        }


@dataclass(frozen=True)
class Superposition(DensitySpec):
    parts: tuple

    def __post_init__(self):
        if len(self.parts) == 0:
            raise DomainError("superposition needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))

    def evaluate(self, x):
        return sum(p.evaluate(x) for p in self.parts)

    def support(self):
        los, his = zip(*(p.support() for p in self.parts))
        return (min(los), max(his))

    def total_mass(self):
        return sum(p.total_mass() for p in self.parts)

    def cell_integral(self, lo, hi):
        return sum(p.cell_integral(lo, hi) for p in self.parts)

    def to_config(self):
        return {"type": "sum", "parts": [p.to_config() for p in self.parts]}


def density_from_config(config: dict) -> DensitySpec:
    if not isinstance(config, dict) or "type" not in config:
        raise DomainError(f"density config must be a dict with a 'type' key, got {config!r}")
    kind = config["type"]
    try:
        if kind == "char":
            return Characteristic(
                a=float(config["a"]), b=float(config["b"]), height=float(config["height"])
            )
        if kind == "barenblatt":
            return Barenblatt(
                alpha=float(config["alpha"]),
                tau=float(config["tau"]),
                mass=float(config.get("mass", 1.0)),
                center=float(config.get("center", 0.0)),
            )
        if kind == "sum":
            return Superposition(tuple(density_from_config(p) for p in config["parts"]))
    except KeyError as exc:
        raise DomainError(f"density config {config!r} is missing key {exc}") from None
    raise DomainError(f"unknown density type {kind!r}; expected char|barenblatt|sum")


# ---------------------------------------------------------------------------
# discretization, reconstruction, remeshing


def discretize(spec: DensitySpec, domain: tuple[float, float], n: int) -> ParticleEnsemble:
    """Place n particles at cell centers of a uniform partition of domain,
    weighted by the cell integrals of spec.  Zero weights are retained."""
    a, b = float(domain[0]), float(domain[1])
    if not b > a:
        raise DomainError(f"domain must satisfy a < b, got [{a}, {b}]")
    if n < 2:
        raise DomainError(f"need at least 2 particles, got {n}")
    h = (b - a) / n
    edges = a + h * np.arange(n + 1)
    weights = np.array([spec.cell_integral(edges[i], edges[i + 1]) for i in range(n)])
    centers = 0.5 * (edges[:-1] + edges[1:])
    return ParticleEnsemble(positions=centers[:, None], weights=weights, h=h)


def reconstruct(ens: ParticleEnsemble, moll: Mollifier, grid: Grid1D) -> GridDensity:
    """Mollified density rho_eps(x) = sum_i phi_eps(x - x_i) m_i on the grid."""
    if ens.d != 1:
        raise DomainError("reconstruction is implemented for d=1")
    values = _reconstruct_values(ens, moll, grid.points)
    return GridDensity(grid=grid, values=values)


def _reconstruct_values(ens: ParticleEnsemble, moll: Mollifier, pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    x = ens.positions[:, 0]
    w = ens.weights
    out = np.empty(pts.shape[0])
    # chunk the (G, N) kernel matrix to bound memory
    chunk = max(1, int(4e6 // max(ens.n, 1)))
    norm = (4.0 * np.pi * moll.epsilon**2) ** -0.5
    inv = 1.0 / (4.0 * moll.epsilon**2)
    for s in range(0, pts.shape[0], chunk):
        block = pts[s : s + chunk, None] - x[None, :]
        np.multiply(block, block, out=block)
        np.multiply(block, -inv, out=block)
        np.exp(block, out=block)
        out[s : s + chunk] = norm * (block @ w)
    return out


def remesh(ens: ParticleEnsemble, moll: Mollifier) -> ParticleEnsemble:
    """Re-grid the mollified density onto a fresh uniform partition.

    The partition keeps the original spacing h, covers the region where the
    reconstruction exceeds 1e-12 of its peak, and is centered on that region
    so mirror-symmetric states stay symmetric.  New weights are Simpson cell
    integrals of the reconstruction on an aligned h/10 subgrid, then rescaled
    by one global factor (plus an exact top-up on the largest weight) so the
    total mass is conserved exactly.
    """
    if ens.d != 1:
        raise DomainError("remeshing is implemented for d=1")
    h = ens.h
    eps = moll.epsilon
    x = ens.positions[:, 0]
    lo, hi = float(x[0]), float(x[-1])
    span0 = max(hi - lo, h)

    probe = np.arange(lo, hi + h / 10.0, h / 10.0)
    peak = float(np.max(_reconstruct_values(ens, moll, probe)))
    if not (peak > 0 and math.isfinite(peak)):
        raise NumericalError("reconstruction peak is not positive and finite")
    thresh = 1e-12 * peak

    step = max(eps, h / 10.0)
    max_steps = int(math.ceil(max(10.0 * span0, 12.0 * eps) / step)) + 2
    for _ in range(max_steps):
        if _reconstruct_values(ens, moll, np.array([lo]))[0] < thresh:
            break
        lo -= step
    else:
        raise NumericalError("reconstruction support did not close on the left")
    for _ in range(max_steps):
        if _reconstruct_values(ens, moll, np.array([hi]))[0] < thresh:
            break
        hi += step
    else:
        raise NumericalError("reconstruction support did not close on the right")

    n_cells = max(int(math.ceil((hi - lo) / h)), 2)
    mid = 0.5 * (lo + hi)
    start = mid - 0.5 * n_cells * h

    fine = start + (h / 10.0) * np.arange(10 * n_cells + 1)
    vals = _reconstruct_values(ens, moll, fine)
    idx = 10 * np.arange(n_cells)[:, None] + np.arange(11)[None, :]
    simpson = (h / 30.0) * np.array([1, 4, 2, 4, 2, 4, 2, 4, 2, 4, 1], dtype=float)
    weights = vals[idx] @ simpson

    target = ens.total_mass
    total = float(np.sum(weights))
    if not total > 0:
        raise NumericalError("remeshed mass vanished")
    weights *= target / total
    top = int(np.argmax(weights))
    for _ in range(8):
        gap_mass = target - float(np.sum(weights))
        if gap_mass == 0.0:
            break
        weights[top] += gap_mass

    centers = start + h * (np.arange(n_cells) + 0.5)
    return ParticleEnsemble(positions=centers[:, None], weights=weights, h=h)
