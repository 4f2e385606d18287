"""Reward distributions and their inverse CDFs.

Arms are sampled exclusively through inverse transform: a keyed uniform
u in (0,1) maps to F^{-1}(u).  Inverse transform keeps every realized
reward a monotone function of its uniform, which the counterfactual
machinery relies on, and makes runs reproducible bit for bit.

The normal quantile is Wichura's PPND16 rational approximation (double
precision, error well below 1e-9).  It is implemented once in scalar
form; the vectorized block path evaluates the central branch with the
same Horner expressions on arrays and defers the ~15% of tail points to
the scalar function, so both paths return identical doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_A = (
    3.3871328727963666080e0,
    1.3314166789178437745e2,
    1.9715909503065514427e3,
    1.3731693765509461125e4,
    4.5921953931549871457e4,
    6.7265770927008700853e4,
    3.3430575583588128105e4,
    2.5090809287301226727e3,
)
_B = (
    4.2313330701600911252e1,
    6.8718700749205790830e2,
    5.3941960214247511077e3,
    2.1213794301586595867e4,
    3.9307895800092710610e4,
    2.8729085735721942674e4,
    5.2264952788528545610e3,
)
_C = (
    1.42343711074968357734e0,
    4.63033784615654529590e0,
    5.76949722146069140550e0,
    3.64784832476320460504e0,
    1.27045825245236838258e0,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
)
_D = (
    2.05319162663775882187e0,
    1.67638483018380384940e0,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
)
_E = (
    6.65790464350110377720e0,
    5.46378491116411436990e0,
    1.78482653991729133580e0,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
)
_F = (
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-5,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
)


def _check_u(u: float) -> None:
    if not 0.0 < u < 1.0:
        raise DomainError(f"uniform must lie strictly inside (0,1), got {u!r}")


def normal_inv_cdf(u: float) -> float:
    """Standard normal quantile Phi^{-1}(u) for u in (0,1)."""
    _check_u(u)
    q = u - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = (((((((_A[7] * r + _A[6]) * r + _A[5]) * r + _A[4]) * r + _A[3]) * r + _A[2]) * r + _A[1]) * r + _A[0])
        den = (((((((_B[6] * r + _B[5]) * r + _B[4]) * r + _B[3]) * r + _B[2]) * r + _B[1]) * r + _B[0]) * r + 1.0)
        return q * num / den
    r = u if q < 0.0 else 1.0 - u
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r = r - 1.6
        num = (((((((_C[7] * r + _C[6]) * r + _C[5]) * r + _C[4]) * r + _C[3]) * r + _C[2]) * r + _C[1]) * r + _C[0])
        den = (((((((_D[6] * r + _D[5]) * r + _D[4]) * r + _D[3]) * r + _D[2]) * r + _D[1]) * r + _D[0]) * r + 1.0)
    else:
        r = r - 5.0
        num = (((((((_E[7] * r + _E[6]) * r + _E[5]) * r + _E[4]) * r + _E[3]) * r + _E[2]) * r + _E[1]) * r + _E[0])
        den = (((((((_F[6] * r + _F[5]) * r + _F[4]) * r + _F[3]) * r + _F[2]) * r + _F[1]) * r + _F[0]) * r + 1.0)
    x = float(num / den)
    return -x if q < 0.0 else x


def normal_inv_cdf_block(u: np.ndarray) -> np.ndarray:
    """Vectorized normal quantile, bit-identical to normal_inv_cdf."""
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise DomainError("uniforms must lie strictly inside (0,1)")
    q = u - 0.5
    out = np.empty_like(u)
    central = np.abs(q) <= 0.425
    if np.any(central):
        r = 0.180625 - q[central] * q[central]
        num = (((((((_A[7] * r + _A[6]) * r + _A[5]) * r + _A[4]) * r + _A[3]) * r + _A[2]) * r + _A[1]) * r + _A[0])
        den = (((((((_B[6] * r + _B[5]) * r + _B[4]) * r + _B[3]) * r + _B[2]) * r + _B[1]) * r + _B[0]) * r + 1.0)
        out[central] = q[central] * num / den
    # numpy's vector log may round differently from libm, so tail points
    # go through the scalar path to keep both entry points bit-identical
    for j in np.nonzero(~central)[0]:
        out[j] = normal_inv_cdf(float(u[j]))
    return out


@dataclass(frozen=True)
class Gaussian:
    mean: float
    sd: float

    def __post_init__(self):
        if not self.sd > 0.0:
            raise DomainError(f"sd must be positive, got {self.sd!r}")

    @property
    def mu(self) -> float:
        return self.mean

    def inverse_cdf(self, u: float) -> float:
        _check_u(u)
        return self.mean + self.sd * normal_inv_cdf(u)

    def inverse_cdf_block(self, u: np.ndarray) -> np.ndarray:
        return self.mean + self.sd * normal_inv_cdf_block(u)

    def support(self) -> tuple[float, float]:
        return (-np.inf, np.inf)


@dataclass(frozen=True)
class Bernoulli:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must lie in [0,1], got {self.p!r}")

    @property
    def mu(self) -> float:
        return self.p

    def inverse_cdf(self, u: float) -> float:
        _check_u(u)
        return 1.0 if u > 1.0 - self.p else 0.0

    def inverse_cdf_block(self, u: np.ndarray) -> np.ndarray:
        return (u > 1.0 - self.p).astype(np.float64)

    def support(self) -> tuple[float, float]:
        return (0.0, 1.0)


@dataclass(frozen=True)
class BoundedUniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"need lo < hi, got [{self.lo!r}, {self.hi!r}]")

    @property
    def mu(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def inverse_cdf(self, u: float) -> float:
        _check_u(u)
        return self.lo + u * (self.hi - self.lo)

    def inverse_cdf_block(self, u: np.ndarray) -> np.ndarray:
        return self.lo + u * (self.hi - self.lo)

    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)


Arm = Gaussian | Bernoulli | BoundedUniform


def two_point_support(arm: Arm) -> bool:
    """True when the family takes exactly two values (Bernoulli)."""
    return isinstance(arm, Bernoulli)
