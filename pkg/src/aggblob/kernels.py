"""Interaction kernels W and their (optionally mollified) gradients.

Every kernel is radial and even.  Evaluation is vectorized over arrays whose
last axis is the spatial dimension: ``evaluate`` maps (..., d) -> (...) and
``gradient`` maps (..., d) -> (..., d).

Mollification convolves the whole kernel with the Gaussian mollifier.  For
the singular families used in practice (|x|-type and log-type in d=1, plus
even-integer powers appearing in composite kernels) the convolution has a
closed form:

    (|.| * phi_eps)'(x)   = erf(x / (2 eps))
    (ln|.| * phi_eps)'(x) = dawsn(x / (2 eps)) / eps

Values come from the corresponding antiderivatives; the log case needs the
integral of the Dawson function, evaluated by a Chebyshev fit plus an
asymptotic tail.  Other exponents fall back to adaptive quadrature of the
convolution integral (slow, element-wise; exercised mainly by tests).
Non-singular kernels pass mollified calls through to the raw kernel.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import dawsn, erf

from .errors import DomainError

_SQRT_PI = math.sqrt(math.pi)


def _radius(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.sum(x * x, axis=-1))


def _require_nonzero(r: np.ndarray, what: str) -> None:
    if np.any(r == 0.0):
        raise DomainError(f"{what} is undefined at zero separation")


def _as_1d(x: np.ndarray) -> np.ndarray:
    """Squeeze the trailing dimension axis; closed-form mollification is d=1 only."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 1:
        raise DomainError("closed-form mollification is implemented for d=1 only")
    return x[..., 0]


# ---------------------------------------------------------------------------
# integral of the Dawson function, needed for mollified log-kernel values

_DAWSON_SWITCH = 10.0
# integral of the asymptotic series dawsn(v) ~ sum (2k-1)!! / (2^(k+1) v^(2k+1)):
# antiderivative 0.5*ln v - sum a_k v^(-2k)
_DAWSON_TAIL = [
    (2, 1.0 / 8.0),
    (4, 3.0 / 32.0),
    (6, 5.0 / 32.0),
    (8, 105.0 / 256.0),
    (10, 945.0 / 640.0),
    (12, 10395.0 / 1536.0),
    (14, 135135.0 / 3584.0),
    (16, 2027025.0 / 8192.0),
]
_dawson_cheb_cache = None


def _dawson_cheb():
    global _dawson_cheb_cache
    if _dawson_cheb_cache is None:
        from numpy.polynomial import chebyshev

        def g_scalar(t):
            val, _ = quad(dawsn, 0.0, t, epsabs=1e-13, epsrel=1e-13, limit=200)
            return val

        fit = chebyshev.Chebyshev.interpolate(
            np.vectorize(g_scalar), 140, domain=[0.0, _DAWSON_SWITCH]
        )
        _dawson_cheb_cache = fit
    return _dawson_cheb_cache


def _dawson_tail_antideriv(v: np.ndarray) -> np.ndarray:
    out = 0.5 * np.log(v)
    for p, a in _DAWSON_TAIL:
        out = out - a * v ** (-p)
    return out


def dawson_integral(w: np.ndarray) -> np.ndarray:
    """int_0^|w| dawsn(v) dv, vectorized (the integral is even in w)."""
    w = np.abs(np.asarray(w, dtype=float))
    cheb = _dawson_cheb()
    inner = cheb(np.minimum(w, _DAWSON_SWITCH))
    if np.any(w > _DAWSON_SWITCH):
        w_out = np.maximum(w, _DAWSON_SWITCH)
        tail = _dawson_tail_antideriv(w_out) - _dawson_tail_antideriv(_DAWSON_SWITCH)
        return np.where(w > _DAWSON_SWITCH, cheb(_DAWSON_SWITCH) + tail, inner)
    return inner


# ---------------------------------------------------------------------------
# mollified power-law parts.  part_c(u) = |u|^c / c (c != 0), ln|u| (c == 0);
# these are the building blocks of PowerLaw and RepulsiveAttractive kernels.
# sigma^2 = 2 eps^2 is the mollifier variance.


def _fast_pow(base: np.ndarray, p: float) -> np.ndarray:
    """base**p with cheap paths for the small integer exponents that dominate
    the pairwise hot loops (np.power is ~10x slower there)."""
    if p == 1.0:
        return base
    if p == 2.0:
        return base * base
    if p == 3.0:
        return base * base * base
    if p == 4.0:
        sq = base * base
        return sq * sq
    if p == 0.0:
        return np.ones_like(base)
    if p == -1.0:
        return 1.0 / base
    if p == -2.0:
        return 1.0 / (base * base)
    return base**p


def _part_value(c: float, u: np.ndarray) -> np.ndarray:
    if c == 0:
        return np.log(u)
    return _fast_pow(u, c) / c


def _part_dvalue(c: float, u: np.ndarray) -> np.ndarray:
    # derivative along the positive axis
    return _fast_pow(u, c - 1.0)


def _mollified_part_value_quad(c: float, x: float, eps: float) -> float:
    norm = 1.0 / math.sqrt(4.0 * math.pi * eps * eps)

    def f(y):
        return _part_value(c, abs(x - y)) * norm * math.exp(-y * y / (4 * eps * eps))

    lo = min(-12 * eps, x - 12 * eps)
    hi = max(12 * eps, x + 12 * eps)
    pts = [x] if lo < x < hi else None
    val, err = quad(f, lo, hi, points=pts, limit=300, epsabs=1e-12, epsrel=1e-12)
    if not math.isfinite(val):
        raise DomainError(f"mollified value quadrature diverged for exponent {c}")
    return val


def _mollified_part_gradient_quad(c: float, x: float, eps: float) -> float:
    # principal value via the symmetrized form
    #   int_0^inf u^(c-1) [phi(x-u) - phi(x+u)] du
    norm = 1.0 / math.sqrt(4.0 * math.pi * eps * eps)

    def phi(y):
        return norm * math.exp(-y * y / (4 * eps * eps))

    def f(u):
        return _part_dvalue(c, u) * (phi(x - u) - phi(x + u))

    hi = abs(x) + 14 * eps
    val, err = quad(f, 0.0, hi, limit=300, epsabs=1e-12, epsrel=1e-12)
    if not math.isfinite(val):
        raise DomainError(f"mollified gradient quadrature diverged for exponent {c}")
    return val


def _log_moll_constant(eps: float) -> float:
    # (ln|.| * phi_eps)(0) = E[ln|Y|] for Y ~ N(0, 2 eps^2)
    return math.log(math.sqrt(2.0) * eps) - 0.5 * (np.euler_gamma + math.log(2.0))


def _part_mollified_value(c: float, x: np.ndarray, eps: float) -> np.ndarray:
    """(part_c * phi_eps)(x) for 1d coordinate arrays x."""
    if c == 0:
        return 2.0 * dawson_integral(x / (2.0 * eps)) + _log_moll_constant(eps)
    if c == 1:
        return x * erf(x / (2.0 * eps)) + (2.0 * eps / _SQRT_PI) * np.exp(
            -x * x / (4.0 * eps * eps)
        )
    s2 = 2.0 * eps * eps
    if c == 2:
        return (x * x + s2) / 2.0
    if c == 4:
        x2 = x * x
        return (x2 * x2 + 6.0 * s2 * x2 + 3.0 * s2 * s2) / 4.0
    flat = np.asarray(x, dtype=float).ravel()
    vals = np.array([_mollified_part_value_quad(c, xi, eps) for xi in flat])
    return vals.reshape(np.shape(x))


def _part_mollified_gradient(c: float, x: np.ndarray, eps: float) -> np.ndarray:
    """d/dx (part_c * phi_eps)(x) for 1d coordinate arrays x."""
    if c == 0:
        return dawsn(x / (2.0 * eps)) / eps
    if c == 1:
        return erf(x / (2.0 * eps))
    s2 = 2.0 * eps * eps
    if c == 2:
        return x
    if c == 4:
        return x * x * x + 3.0 * s2 * x
    flat = np.asarray(x, dtype=float).ravel()
    vals = np.array([_mollified_part_gradient_quad(c, xi, eps) for xi in flat])
    return vals.reshape(np.shape(x))


# ---------------------------------------------------------------------------
# kernel variants


class InteractionKernel:
    """Base interface.  All kernels are even; gradients are odd."""

    #: evaluate() undefined at zero separation
    value_singular = False
    #: gradient() undefined (or discontinuous) at zero separation; such
    #: kernels are the ones mollification applies to, and pairwise sums skip
    #: the self term when they are used unmollified.
    gradient_singular = False

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def gradient(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def mollified_value(self, x: np.ndarray, eps: float) -> np.ndarray:
        """(W * phi_eps)(x); non-singular kernels pass through to evaluate()."""
        return self.evaluate(x)

    def mollified_gradient(self, x: np.ndarray, eps: float) -> np.ndarray:
        """grad(W * phi_eps)(x); non-singular kernels pass through to gradient()."""
        return self.gradient(x)

    def integral(self, d: int = 1) -> float:
        """L1 integral over R^d, for integrable kernels."""
        raise DomainError(f"{type(self).__name__} is not integrable over R^{d}")

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PowerLaw(InteractionKernel):
    """W(x) = |x|^k / k for k != 0, with the convention W(x) = ln|x| at k = 0."""

    k: float

    def __post_init__(self):
        if self.k > 2:
            raise DomainError(f"power-law exponent must satisfy k <= 2, got {self.k}")

    @property
    def value_singular(self):
        return self.k <= 0

    @property
    def gradient_singular(self):
        return self.k <= 1

    def _check_dim(self, x):
        d = np.asarray(x).shape[-1]
        if self.k <= -d:
            raise DomainError(f"power-law exponent k={self.k} requires k > -d (d={d})")

    def evaluate(self, x):
        self._check_dim(x)
        r = _radius(x)
        if self.k <= 0:
            _require_nonzero(r, "power-law kernel")
            if self.k == 0:
                return np.log(r)
            return _fast_pow(r, self.k) / self.k
        if self.k == 2:
            return 0.5 * r * r
        return _fast_pow(r, self.k) / self.k

    def gradient(self, x):
        self._check_dim(x)
        x = np.asarray(x, dtype=float)
        r = _radius(x)
        if self.k <= 1:
            _require_nonzero(r, "power-law kernel gradient")
            return _fast_pow(r, self.k - 2.0)[..., None] * x
        if self.k == 2:
            return x.copy()
        # 1 < k < 2: the gradient extends continuously by 0 at the origin
        mask = r == 0.0
        r_safe = np.where(mask, 1.0, r)
        out = _fast_pow(r_safe, self.k - 2.0)[..., None] * x
        if np.any(mask):
            out = np.where(mask[..., None], 0.0, out)
        return out

    def mollified_value(self, x, eps):
        if not self.gradient_singular:
            return self.evaluate(x)
        return _part_mollified_value(self.k, _as_1d(x), eps)

    def mollified_gradient(self, x, eps):
        if not self.gradient_singular:
            return self.gradient(x)
        return _part_mollified_gradient(self.k, _as_1d(x), eps)[..., None]

    def to_config(self):
        return {"type": "power_law", "k": self.k}


@dataclass(frozen=True)
class RepulsiveAttractive(InteractionKernel):
    """W(x) = |x|^A / A - |x|^B / B with A > B (B = 0 means a -ln|x| term)."""

    A: float
    B: float

    def __post_init__(self):
        if not (self.A > self.B):
            raise DomainError(f"need A > B, got A={self.A}, B={self.B}")

    @property
    def value_singular(self):
        return self.B <= 0

    @property
    def gradient_singular(self):
        return self.B <= 1

    def evaluate(self, x):
        r = _radius(x)
        if self.value_singular:
            _require_nonzero(r, "repulsive-attractive kernel")
        return _part_value(self.A, r) - _part_value(self.B, r)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        r = _radius(x)
        if self.gradient_singular:
            _require_nonzero(r, "repulsive-attractive kernel gradient")
            factor = _fast_pow(r, self.A - 2.0) - _fast_pow(r, self.B - 2.0)
            return factor[..., None] * x
        mask = r == 0.0
        r_safe = np.where(mask, 1.0, r)
        factor = _fast_pow(r_safe, self.A - 2.0) - _fast_pow(r_safe, self.B - 2.0)
        out = factor[..., None] * x
        if np.any(mask):
            out = np.where(mask[..., None], 0.0, out)
        return out

    def mollified_value(self, x, eps):
        if not self.gradient_singular:
            return self.evaluate(x)
        x1 = _as_1d(x)
        return _part_mollified_value(self.A, x1, eps) - _part_mollified_value(
            self.B, x1, eps
        )

    def mollified_gradient(self, x, eps):
        if not self.gradient_singular:
            return self.gradient(x)
        x1 = _as_1d(x)
        out = _part_mollified_gradient(self.A, x1, eps) - _part_mollified_gradient(
            self.B, x1, eps
        )
        return out[..., None]

    def to_config(self):
        return {"type": "rep_att", "A": self.A, "B": self.B}


@dataclass(frozen=True)
class Morse(InteractionKernel):
    """W(x) = -C_A exp(-|x|/l_A) + C_R exp(-|x|/l_R).

    Biologically motivated ranges (attraction dominating at long range,
    repulsion at short range, non-catastrophic) are C_R/C_A > 1,
    l_R/l_A < 1 and (C_R/C_A)(l_R/l_A)^d < 1; violations are accepted with a
    warning since the solver itself does not require them.
    """

    C_A: float
    C_R: float
    l_A: float
    l_R: float

    def __post_init__(self):
        for name in ("C_A", "C_R", "l_A", "l_R"):
            if not (getattr(self, name) > 0):
                raise DomainError(f"Morse parameter {name} must be positive")
        C = self.C_R / self.C_A
        ell = self.l_R / self.l_A
        if not (C > 1 and ell < 1 and C * ell < 1):
            warnings.warn(
                f"Morse parameters C={C:.3g}, l={ell:.3g} are outside the "
                "usual regime (C > 1, l < 1, C*l^d < 1 for d=1)",
                stacklevel=2,
            )

    def evaluate(self, x):
        r = _radius(x)
        return -self.C_A * np.exp(-r / self.l_A) + self.C_R * np.exp(-r / self.l_R)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        r = _radius(x)
        mask = r == 0.0
        r_safe = np.where(mask, 1.0, r)
        factor = (
            self.C_A / self.l_A * np.exp(-r_safe / self.l_A)
            - self.C_R / self.l_R * np.exp(-r_safe / self.l_R)
        ) / r_safe
        out = factor[..., None] * x
        if np.any(mask):
            # the kernel has a cusp at 0; the odd extension assigns gradient 0
            out = np.where(mask[..., None], 0.0, out)
        return out

    def integral(self, d: int = 1) -> float:
        if d != 1:
            raise DomainError("Morse integral implemented for d=1 only")
        return 2.0 * (self.C_R * self.l_R - self.C_A * self.l_A)

    def to_config(self):
        return {
            "type": "morse",
            "C_A": self.C_A,
            "C_R": self.C_R,
            "l_A": self.l_A,
            "l_R": self.l_R,
        }


@dataclass(frozen=True)
class LocalizedGaussian(InteractionKernel):
    """W(x) = (4 pi delta^2)^(-d/2) exp(-|x|^2 / (4 delta^2)), unit mass."""

    delta: float

    def __post_init__(self):
        if not (self.delta > 0):
            raise DomainError(f"Gaussian width must be positive, got {self.delta}")

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        d = x.shape[-1]
        r2 = np.sum(x * x, axis=-1)
        dl = self.delta
        return (4.0 * np.pi * dl * dl) ** (-0.5 * d) * np.exp(-r2 / (4.0 * dl * dl))

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        return -x / (2.0 * self.delta**2) * self.evaluate(x)[..., None]

    def integral(self, d: int = 1) -> float:
        return 1.0

    def to_config(self):
        return {"type": "gaussian", "delta": self.delta}


@dataclass(frozen=True)
class ScaledNewtonian1D(InteractionKernel):
    """W(x) = |x| / delta^2 (the 1d Newtonian kernel, sharpening as delta -> 0)."""

    delta: float
    gradient_singular = True

    def __post_init__(self):
        if not (self.delta > 0):
            raise DomainError(f"Newtonian scale must be positive, got {self.delta}")

    def evaluate(self, x):
        return _radius(x) / self.delta**2

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        r = _radius(x)
        _require_nonzero(r, "scaled Newtonian kernel gradient")
        return x / (r[..., None] * self.delta**2)

    def mollified_value(self, x, eps):
        return _part_mollified_value(1.0, _as_1d(x), eps) / self.delta**2

    def mollified_gradient(self, x, eps):
        return (_part_mollified_gradient(1.0, _as_1d(x), eps) / self.delta**2)[..., None]

    def to_config(self):
        return {"type": "newtonian_1d", "delta": self.delta}


@dataclass(frozen=True)
class ScaledLog1D(InteractionKernel):
    """W(x) = ln(|x| / delta) / delta (sharpening logarithmic kernel)."""

    delta: float
    value_singular = True
    gradient_singular = True

    def __post_init__(self):
        if not (self.delta > 0):
            raise DomainError(f"log-kernel scale must be positive, got {self.delta}")

    def evaluate(self, x):
        r = _radius(x)
        _require_nonzero(r, "scaled log kernel")
        return np.log(r / self.delta) / self.delta

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        r = _radius(x)
        _require_nonzero(r, "scaled log kernel gradient")
        return x / (r[..., None] ** 2 * self.delta)

    def mollified_value(self, x, eps):
        x1 = _as_1d(x)
        return (
            _part_mollified_value(0.0, x1, eps) - math.log(self.delta)
        ) / self.delta

    def mollified_gradient(self, x, eps):
        return (_part_mollified_gradient(0.0, _as_1d(x), eps) / self.delta)[..., None]

    def to_config(self):
        return {"type": "log_1d", "delta": self.delta}


@dataclass(frozen=True)
class ZeroKernel(InteractionKernel):
    """No interaction (pure diffusion)."""

    def evaluate(self, x):
        return np.zeros(np.asarray(x).shape[:-1])

    def gradient(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def integral(self, d: int = 1) -> float:
        return 0.0

    def to_config(self):
        return {"type": "zero"}


@dataclass(frozen=True)
class ScaledKernel(InteractionKernel):
    """factor * base.  A negative factor turns a repulsive bump attractive."""

    base: InteractionKernel
    factor: float

    @property
    def value_singular(self):
        return self.base.value_singular

    @property
    def gradient_singular(self):
        return self.base.gradient_singular

    def evaluate(self, x):
        return self.factor * self.base.evaluate(x)

    def gradient(self, x):
        return self.factor * self.base.gradient(x)

    def mollified_value(self, x, eps):
        return self.factor * self.base.mollified_value(x, eps)

    def mollified_gradient(self, x, eps):
        return self.factor * self.base.mollified_gradient(x, eps)

    def integral(self, d: int = 1) -> float:
        return self.factor * self.base.integral(d)

    def to_config(self):
        return {"type": "scaled", "factor": self.factor, "base": self.base.to_config()}


_KERNEL_TYPES = {
    "power_law": lambda c: PowerLaw(k=float(c["k"])),
    "rep_att": lambda c: RepulsiveAttractive(A=float(c["A"]), B=float(c["B"])),
    "morse": lambda c: Morse(
        C_A=float(c["C_A"]), C_R=float(c["C_R"]), l_A=float(c["l_A"]), l_R=float(c["l_R"])
    ),
    "gaussian": lambda c: LocalizedGaussian(delta=float(c["delta"])),
    "newtonian_1d": lambda c: ScaledNewtonian1D(delta=float(c["delta"])),
    "log_1d": lambda c: ScaledLog1D(delta=float(c["delta"])),
    "zero": lambda c: ZeroKernel(),
}


def kernel_from_config(config: dict) -> InteractionKernel:
    """Build a kernel from its JSON dict form (see to_config)."""
    if not isinstance(config, dict) or "type" not in config:
        raise DomainError(f"kernel config must be a dict with a 'type' key, got {config!r}")
    kind = config["type"]
    if kind == "scaled":
        return ScaledKernel(
            base=kernel_from_config(config["base"]), factor=float(config["factor"])
        )
    try:
        builder = _KERNEL_TYPES[kind]
    except KeyError:
        known = sorted(_KERNEL_TYPES) + ["scaled"]
        raise DomainError(f"unknown kernel type {kind!r}; expected one of {known}") from None
    try:
        return builder(config)
    except KeyError as exc:
        raise DomainError(f"kernel config {config!r} is missing key {exc}") from None
