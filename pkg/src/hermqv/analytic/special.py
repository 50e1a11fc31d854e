"""
Beta-function identities and the normalizing constant of the Hermite kernel.

The Hermite process of order ``q`` and index ``H`` is

    Z_t = c(H, q) I_q(L_t),  L_t(y_1..y_q) = int_0^t prod_j (u - y_j)_+^a du,

with ``a = -(1/2 + (1 - H)/q)``; everything below is about that exponent.
"""
import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from src.hermqv.checks import (DomainError, QuadratureConvergenceError,
                               check_hurst, check_order)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelParams:
    """Order, index and kernel exponent of one Hermite process."""
    q: int
    H: float
    a: float

    def __post_init__(self) -> None:
        check_order(self.q)
        check_hurst(self.H)
        expected = kernel_exponent(self.q, self.H)
        if not math.isclose(self.a, expected, rel_tol=0.0, abs_tol=1e-12):
            raise DomainError(f"kernel exponent {self.a} does not match "
                              f"-(1/2 + (1-H)/q) = {expected} for q={self.q}, H={self.H}")
        assert -1.0 < self.a < -0.5

    @classmethod
    def from_order(cls, q: int, H: float) -> "KernelParams":
        check_order(q)
        check_hurst(H)
        return cls(q=q, H=H, a=kernel_exponent(q, H))

    @property
    def diagonal_exponent(self) -> float:
        """``2a + 1 = -2(1 - H)/q``, the power of |u - v| left after integrating out y."""
        return 2.0 * self.a + 1.0


def kernel_exponent(q: int, H: float) -> float:
    return -(0.5 + (1.0 - H) / q)


def beta(x: float, y: float) -> float:
    """Euler's beta function through log-gamma."""
    if not (x > 0 and y > 0):
        raise DomainError(f"beta(x, y) needs x > 0 and y > 0, got x={x}, y={y}")
    return math.exp(special.betaln(x, y))


def _check_beta_tilde_exponents(a: float, b: float) -> None:
    if not (a > -1 and b > -1 and a + b < -1):
        raise DomainError(f"beta_tilde needs a > -1, b > -1 and a + b < -1, got a={a}, b={b}")


def beta_tilde(a: float, b: float, u: float, v: float) -> float:
    """
    Constant of ``int_{-inf}^{u^v} (u-s)^a (v-s)^b ds = beta_tilde * |u-v|^(a+b+1)``.

    Only the order of ``u`` and ``v`` matters.
    """
    _check_beta_tilde_exponents(a, b)
    if u == v:
        raise DomainError("beta_tilde is singular at u == v")
    if u < v:
        return beta(a + 1.0, -1.0 - a - b)
    return beta(b + 1.0, -1.0 - a - b)


def beta_tilde_sup(a: float, b: float) -> float:
    _check_beta_tilde_exponents(a, b)
    return max(beta(a + 1.0, -1.0 - a - b), beta(b + 1.0, -1.0 - a - b))


def _quad(func, lower, upper, **kwargs) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(func, lower, upper, epsabs=0.0, epsrel=1e-11,
                                      limit=400, **kwargs)
        except integrate.IntegrationWarning as err:
            raise QuadratureConvergenceError(str(err)) from err
    return value


def beta_tilde_integral(a: float, b: float, u: float, v: float) -> float:
    """
    Quadrature of ``int_{-inf}^{u^v} (u-s)^a (v-s)^b ds``.

    With ``x = u^v - s`` and ``d = |u - v|`` the integrand is ``x^c (x + d)^e``
    where ``c`` is the exponent attached to the smaller argument. The piece on
    ``[0, d]`` carries the algebraic endpoint weight exactly.
    """
    _check_beta_tilde_exponents(a, b)
    if u == v:
        raise DomainError("the integral has a non-integrable diagonal at u == v")
    c, e = (a, b) if u < v else (b, a)
    d = abs(u - v)
    near = _quad(lambda x: (x + d) ** e, 0.0, d, weight="alg", wvar=(c, 0.0))
    far = _quad(lambda x: x ** c * (x + d) ** e, d, np.inf)
    return near + far


def kernel_norm_squared(q: int, H: float) -> float:
    """``||L_1^{H,q}||^2 = beta(a+1, -1-2a)^q / (H(2H-1))``."""
    params = KernelParams.from_order(q, H)
    return beta(params.a + 1.0, -1.0 - 2.0 * params.a) ** q / (H * (2.0 * H - 1.0))


def kernel_norm_quadrature(q: int, H: float) -> float:
    """
    ``||L_1^{H,q}||^2`` without the closed reduction.

    The inner ``y`` integrals come from :func:`beta_tilde_integral` at unit
    separation and the remaining ``int int |u-v|^{q(2a+1)} du dv`` is done with
    an algebraic-weight quadrature on the triangle ``v < u``.
    """
    params = KernelParams.from_order(q, H)
    a = params.a
    constant = beta_tilde_integral(a, a, 0.0, 1.0) ** q
    power = q * params.diagonal_exponent

    def inner(u: float) -> float:
        if u <= 0.0:
            return 0.0
        # int_0^u (u - v)^power dv
        return _quad(lambda v: 1.0, 0.0, u, weight="alg", wvar=(0.0, power))

    triangle = _quad(inner, 0.0, 1.0)
    return 2.0 * constant * triangle


def norm_constant(q: int, H: float) -> float:
    """``c(H, q) = (q! ||L_1||^2)^(-1/2)``, making ``E[Z_1^2] = 1``."""
    return (math.factorial(q) * kernel_norm_squared(q, H)) ** -0.5
