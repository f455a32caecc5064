"""Regularized energy of a particle ensemble and its gradient-flow velocity.

    E(ens) = nu * sum_i m_i F(psi_i)
             + 0.5 * sum_{i,j} Wt(x_i - x_j) m_i m_j,

    psi_i = sum_j phi_eps(x_i - x_j) m_j,
    F(s)  = s^(m-1) / (m-1)  for m > 1,   F(s) = ln s  for m = 1.

Wt is the interaction kernel, convolved with the mollifier when
``mollify_kernel`` is set and the kernel's gradient is singular at zero
separation; smooth kernels pass through unchanged.  Pairwise sums include the
self term for mollified kernels (it vanishes by oddness in the velocity) and
skip it for unmollified singular kernels.

The velocity is the exact negative weighted gradient v_i = -(1/m_i) dE/dx_i.
With G(s) = s^(m-2) (= 1/s at m = 1, the same expression):

    v_i = - sum_j grad Wt(x_i - x_j) m_j
          - nu [ sum_j grad phi_eps(x_i - x_j) m_j G(psi_j)
                 + G(psi_i) sum_j grad phi_eps(x_i - x_j) m_j ].

All functions are pure; reductions go through numpy's pairwise-tree sums, so
repeated evaluation of the same state is bit-reproducible.  psi is clamped
below at 1e-300 and exponentials are clipped, so extreme diffusion exponents
(m of order 1000) stay finite instead of overflowing to inf/nan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import ParticleEnsemble
from .errors import DomainError
from .kernels import InteractionKernel, ZeroKernel
from .mollifier import Mollifier

_PSI_FLOOR = 1e-300


@dataclass(frozen=True)
class Model:
    """Problem data: interaction kernel, diffusion exponent m, diffusion
    coefficient nu, mollifier, and whether to mollify the (singular) kernel."""

    kernel: InteractionKernel
    m: float
    nu: float
    moll: Mollifier
    mollify_kernel: bool = False

    def __post_init__(self):
        if self.nu < 0:
            raise DomainError(f"diffusion coefficient must be >= 0, got {self.nu}")
        if self.nu > 0 and self.m < 1:
            raise DomainError(f"diffusion exponent must be >= 1, got {self.m}")

    @property
    def mollified_interaction(self) -> bool:
        return self.mollify_kernel and self.kernel.gradient_singular


def _clipped_power(base: np.ndarray, p: float) -> np.ndarray:
    """base**p for base >= 0, clamped to avoid 0*inf and overflow."""
    if p == 0.0:
        return np.ones_like(base)
    if p == 1.0:
        return np.maximum(base, _PSI_FLOOR)
    if p == 2.0:
        b = np.maximum(base, _PSI_FLOOR)
        return b * b
    if p == -1.0:
        return 1.0 / np.maximum(base, _PSI_FLOOR)
    b = np.maximum(base, _PSI_FLOOR)
    with np.errstate(under="ignore"):
        return np.exp(np.clip(p * np.log(b), -745.0, 700.0))


def _pair_displacements(x: np.ndarray) -> np.ndarray:
    return x[:, None, :] - x[None, :, :]


def _kernel_gradient_matrix(model: Model, diff: np.ndarray) -> np.ndarray:
    """grad Wt on all pairs, with the self-interaction convention applied."""
    kern = model.kernel
    if model.mollified_interaction:
        return kern.mollified_gradient(diff, model.moll.epsilon)
    if kern.gradient_singular:
        n = diff.shape[0]
        idx = np.arange(n)
        safe = diff.copy()
        safe[idx, idx, :] = 1.0  # placeholder; the self term is discarded below
        out = kern.gradient(safe)
        out[idx, idx, :] = 0.0
        return out
    return kern.gradient(diff)


def _kernel_value_matrix(model: Model, diff: np.ndarray) -> np.ndarray:
    kern = model.kernel
    if model.mollified_interaction:
        return kern.mollified_value(diff, model.moll.epsilon)
    if kern.gradient_singular:
        n = diff.shape[0]
        idx = np.arange(n)
        safe = diff.copy()
        safe[idx, idx, :] = 1.0
        out = kern.evaluate(safe)
        out[idx, idx] = 0.0
        return out
    return kern.evaluate(diff)


def _psi(model: Model, diff: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(phi-matrix, psi) where psi_i = sum_j phi(x_i - x_j) m_j."""
    P = model.moll.eval(diff)
    return P, np.sum(P * w[None, :], axis=1)


def velocity_arrays(model: Model, x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """velocity() on raw position/weight arrays; x has shape (n, d).

    Used by the ODE right-hand side, where positions must stay in the
    solver's ordering rather than being re-sorted into an ensemble.
    """
    diff = _pair_displacements(x)
    v = np.zeros_like(x)

    if not isinstance(model.kernel, ZeroKernel):
        G = _kernel_gradient_matrix(model, diff)
        v -= np.sum(G * w[None, :, None], axis=1)

    if model.nu > 0:
        P, psi = _psi(model, diff, w)
        GP = model.moll.grad_from_eval(diff, P)
        fp = _clipped_power(psi, model.m - 2.0)
        first = np.sum(GP * (w * fp)[None, :, None], axis=1)
        second = fp[:, None] * np.sum(GP * w[None, :, None], axis=1)
        v -= model.nu * (first + second)

    return v


def velocity(model: Model, ens: ParticleEnsemble) -> np.ndarray:
    """Gradient-flow velocity of every particle, shape (n, d).

    Well defined for zero-weight particles too (the 1/m_i in the definition
    cancels against the energy's linear dependence on m_i).
    """
    return velocity_arrays(model, ens.positions, ens.weights)


def _kernel_gradient_slope(model: Model, diff: np.ndarray) -> np.ndarray:
    """d/dx of the pairwise kernel gradient, elementwise central difference.

    An approximate slope is plenty here (it only feeds the stiff solver's
    Newton matrix); differencing the gradient keeps every kernel and
    mollification variant supported without per-kernel second derivatives.
    """
    u = 6e-6 * (np.abs(diff) + model.moll.epsilon)
    slope = (_kernel_gradient_matrix(model, diff + u)
             - _kernel_gradient_matrix(model, diff - u)) / (2.0 * u)
    n = diff.shape[0]
    idx = np.arange(n)
    # the self term of the velocity is identically zero, so its derivative
    # must be dropped even for smooth kernels
    slope[idx, idx, :] = 0.0
    return slope


def velocity_jacobian(model: Model, x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Exact d(velocity)/d(positions) for 1d ensembles, shape (n, n).

    Feeding this to the implicit integrator replaces its n-sweep
    finite-difference Jacobian; the diffusion part is analytic, the kernel
    part differences the gradient once (see _kernel_gradient_slope).
    """
    n, d = x.shape
    if d != 1:
        raise DomainError("analytic velocity jacobian is 1d only")
    diff = _pair_displacements(x)
    idx = np.arange(n)
    J = np.zeros((n, n))

    if not isinstance(model.kernel, ZeroKernel):
        KKw = _kernel_gradient_slope(model, diff)[:, :, 0] * w[None, :]
        J += KKw
        J[idx, idx] -= np.sum(KKw, axis=1)

    if model.nu > 0:
        P, psi = _psi(model, diff, w)
        D = diff[:, :, 0]
        GP = model.moll.grad_from_eval(diff, P)[:, :, 0]
        PP = model.moll.curve_from_eval(D, P)
        fp = _clipped_power(psi, model.m - 2.0)
        s = GP @ w
        a = PP @ (w * fp)
        b = PP @ w
        off = -(PP * fp[None, :] + fp[:, None] * PP)
        diag = a + fp * b
        if model.m != 2.0:
            Gp = (model.m - 2.0) * _clipped_power(psi, model.m - 3.0)
            gs = Gp * s
            off += GP * gs[None, :] - gs[:, None] * GP
            off -= (GP * (w * Gp)[None, :]) @ GP
            diag += gs * s
        J -= model.nu * (off * w[None, :])
        J[idx, idx] -= model.nu * diag

    return J


def discrete_energy(model: Model, ens: ParticleEnsemble) -> float:
    """Regularized free energy of the ensemble (see module docstring)."""
    w = ens.weights
    diff = _pair_displacements(ens.positions)
    total = 0.0

    if model.nu > 0:
        _, psi = _psi(model, diff, w)
        if model.m == 1.0:
            F = np.log(np.maximum(psi, _PSI_FLOOR))
        else:
            F = _clipped_power(psi, model.m - 1.0) / (model.m - 1.0)
        # zero-weight particles contribute nothing even where F blew up
        total += model.nu * float(np.sum(np.where(w > 0, w * F, 0.0)))

    if not isinstance(model.kernel, ZeroKernel):
        Wv = _kernel_value_matrix(model, diff)
        total += 0.5 * float(np.sum(w * np.sum(Wv * w[None, :], axis=1)))

    return total


@dataclass(frozen=True)
class Diagnostics:
    """Scalar functionals of one ensemble state."""

    mass: float
    center_of_mass: np.ndarray
    second_moment: float
    energy: float
    max_speed: float
    max_density: float


def diagnostics(model: Model, ens: ParticleEnsemble, moll: Mollifier | None = None) -> Diagnostics:
    """Mass, center of mass, second moment, energy, max particle speed, and
    the maximum of the mollified density over particle locations."""
    moll = model.moll if moll is None else moll
    v = velocity(model, ens)
    speed = float(np.max(np.sqrt(np.sum(v * v, axis=1))))
    diff = _pair_displacements(ens.positions)
    P = moll.eval(diff)
    psi = np.sum(P * ens.weights[None, :], axis=1)
    return Diagnostics(
        mass=ens.total_mass,
        center_of_mass=ens.center_of_mass,
        second_moment=ens.second_moment,
        energy=discrete_energy(model, ens),
        max_speed=speed,
        max_density=float(np.max(psi)),
    )
