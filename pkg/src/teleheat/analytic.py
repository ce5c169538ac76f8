"""Closed-form solutions and the checks built around them.

The self-similar solution of

    eps * T_tt + (a / t) * T_t = T_xx,         a = eps * l,

on the mass-conserving branch (decay and spreading exponents both 1) is

    T(x, t) = t**-1 * (1 - eps * x**2 / t**2)_+ ** p,   p = (l - 2) / 2,

supported in the cone ``|x| < t / sqrt(eps)``. It is also the product of
two counter-propagating waves, which :func:`product_form_T` evaluates
independently. The porous-medium comparison solution and the Gaussian
heat kernel live here too.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import beta as beta_fn

from teleheat.core import FloatArray, ModelParams, ParameterDomainError, require_self_similar


class Regularity(enum.Enum):
    INVALID = "invalid"
    DISTRIBUTIONAL = "distributional"
    CLASSICAL = "classical"


@dataclass(frozen=True)
class SimilarityProfile:
    """Similarity exponents and smoothness class for a memory exponent ``l``."""

    l: float
    alpha: float
    beta: float
    p: float
    regularity: Regularity


def classify_regularity(l: float) -> SimilarityProfile:
    """Classify the compact self-similar profile by its front smoothness.

    ``T_x`` is continuous across the front only when ``p > 1`` (``l > 4``);
    ``T_xx`` is continuous when ``p > 2`` (``l > 6``).
    """
    if not l > 1:
        raise ParameterDomainError(f"l must exceed 1, got {l!r}")
    p = (l - 2.0) / 2.0
    if l <= 4:
        reg = Regularity.INVALID
    elif l <= 6:
        reg = Regularity.DISTRIBUTIONAL
    else:
        reg = Regularity.CLASSICAL
    return SimilarityProfile(l=l, alpha=1.0, beta=1.0, p=p, regularity=reg)


def profile_exponent(params: ModelParams) -> float:
    # a/(2 eps) - 1 written through l so it is exact
    return params.a_over_eps / 2.0 - 1.0


def _positive_part(v):
    return np.maximum(v, 0.0)


def profile_f(eta, params: ModelParams):
    """Similarity profile ``(1 - eps * eta**2)_+ ** p``."""
    require_self_similar(params.l)
    eta = np.asarray(eta, dtype=float)
    base = _positive_part(1.0 - params.epsilon * eta * eta)
    out = base ** profile_exponent(params)
    return out[()] if out.ndim == 0 else out


def profile_f_prime(eta, params: ModelParams):
    require_self_similar(params.l)
    eta = np.asarray(eta, dtype=float)
    p = profile_exponent(params)
    base = _positive_part(1.0 - params.epsilon * eta * eta)
    out = -2.0 * params.epsilon * eta * p * base ** (p - 1.0)
    return out[()] if out.ndim == 0 else out


def _check_time(t):
    if np.any(np.asarray(t) <= 0):
        raise ParameterDomainError("time must be positive")


def self_similar_T(x, t, params: ModelParams):
    """Exact source-type solution ``T = f(x/t) / t``; zero outside the cone."""
    _check_time(t)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    return profile_f(x / t, params) / t


def self_similar_Tt(x, t, params: ModelParams):
    """Time derivative ``-(f(eta) + eta f'(eta)) / t**2`` of the exact solution."""
    _check_time(t)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    eta = x / t
    return -(profile_f(eta, params) + eta * profile_f_prime(eta, params)) / (t * t)


def self_similar_Tx(x, t, params: ModelParams):
    """Spatial gradient ``f'(x/t) / t**2`` of the exact solution."""
    _check_time(t)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    return profile_f_prime(x / t, params) / (t * t)


def product_form_T(x, t, params: ModelParams):
    """Same solution written as ``t**(1-l) (t - s x)_+**q (t + s x)_+**q``.

    Here ``s = sqrt(eps)`` and ``q = l/2 - 1``.
    """
    require_self_similar(params.l)
    _check_time(t)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    s = math.sqrt(params.epsilon)
    q = params.l / 2.0 - 1.0
    right = _positive_part(t - s * x) ** q
    left = _positive_part(t + s * x) ** q
    out = t ** (1.0 - params.l) * right * left
    return out[()] if np.ndim(out) == 0 else out


def front_positions(t: float, params: ModelParams) -> tuple[float, float]:
    _check_time(t)
    x = t / math.sqrt(params.epsilon)
    return -x, x


def self_similar_mass(params: ModelParams) -> float:
    """Conserved heat content of the exact solution.

    The integral of ``(1 - eps eta^2)^p`` is ``B(1/2, p + 1) / sqrt(eps)``.
    """
    require_self_similar(params.l)
    return float(beta_fn(0.5, profile_exponent(params) + 1.0) / math.sqrt(params.epsilon))


def integrate_profile_ode(params: ModelParams, eta_max: float, step: float = 1e-4):
    """Integrate the first integral of the profile ODE with fixed-step RK4.

    Integrating the reduced ODE once (with zero flux at the front) gives
    ``f'/f = (a - 2 eps) eta / (eps eta**2 - 1)``. This is linear in
    ``log f``, so ``log f`` is integrated from ``log f(0) = 0`` and
    exponentiated at the end, which keeps the samples positive.

    Returns
    -------
    eta, f : ndarray
        Samples on ``[0, eta_max]``. The last step is shortened to land on
        ``eta_max`` exactly.
    """
    require_self_similar(params.l)
    eps = params.epsilon
    if not 0 < eta_max < 1.0 / math.sqrt(eps):
        raise ParameterDomainError("eta_max must lie strictly inside (0, 1/sqrt(eps))")
    if not 0 < step <= eta_max:
        raise ParameterDomainError("step must lie in (0, eta_max]")
    slope = params.a - 2.0 * eps

    def rhs(eta):
        return slope * eta / (eps * eta * eta - 1.0)

    n_full = int(math.floor(eta_max / step + 1e-9))
    etas = [0.0]
    logs = [0.0]
    eta, g = 0.0, 0.0
    for i in range(n_full + 1):
        h = step if i < n_full else eta_max - n_full * step
        if h <= 1e-15:
            break
        # rhs does not depend on log f, so RK4 reduces to Simpson's rule per step
        k1 = rhs(eta)
        k2 = rhs(eta + 0.5 * h)
        k4 = rhs(eta + h)
        g += h * (k1 + 4.0 * k2 + k4) / 6.0
        eta = (i + 1) * step if i < n_full else eta_max
        etas.append(eta)
        logs.append(g)
    return np.array(etas), np.exp(np.array(logs))


def pde_residual(
    T_fn: Callable, x, t, params: ModelParams, h: float = 1e-3, delta: float = 0.0
):
    """Centered second-order residual ``eps T_tt + a/(t+delta) T_t - T_xx``."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t - h <= 0) and delta == 0:
        raise ParameterDomainError("need t > h for the time stencil")
    Tc = T_fn(x, t, params)
    T_tp = T_fn(x, t + h, params)
    T_tm = T_fn(x, t - h, params)
    T_xp = T_fn(x + h, t, params)
    T_xm = T_fn(x - h, t, params)
    T_tt = (T_tp - 2.0 * Tc + T_tm) / (h * h)
    T_t = (T_tp - T_tm) / (2.0 * h)
    T_xx = (T_xp - 2.0 * Tc + T_xm) / (h * h)
    return params.epsilon * T_tt + params.a / (t + delta) * T_t - T_xx


# -- plane-wave analysis ------------------------------------------------------


@dataclass(frozen=True)
class DispersionSample:
    omega_tilde: float
    t: float
    k_tilde: complex
    v_p: float
    alpha_tilde: float


def dispersion(omega_tilde: float, t: float, params: ModelParams) -> DispersionSample:
    """Complex wavenumber of ``exp(i(k x + w t))`` at frozen time ``t``.

    Substitution gives ``k**2 = eps w**2 - i a w / t``. Writing this as
    ``eps w**2 (1 - i s)`` with ``s = l / (w t)`` avoids cancellation when
    ``s`` is tiny. The root with positive real part is taken, so the
    imaginary part is negative.
    """
    if not (omega_tilde > 0 and t > 0):
        raise ParameterDomainError("omega_tilde and t must be positive")
    s = params.a_over_eps / (omega_tilde * t)
    k = math.sqrt(params.epsilon) * omega_tilde * cmath.sqrt(complex(1.0, -s))
    return DispersionSample(
        omega_tilde=omega_tilde,
        t=t,
        k_tilde=k,
        v_p=omega_tilde / k.real,
        alpha_tilde=1.0 / abs(k.imag),
    )


def printed_dispersion(omega_tilde: float, t: float, params: ModelParams) -> tuple[float, float]:
    """Phase velocity and attenuation from the closed formula

        v_p = sqrt(2/eps) w (1 + sqrt(1 + (l/t)**2))**-1/2,
        alpha = 2 t / (eps l v_p).

    It agrees with :func:`dispersion` only at ``w = 1``; kept for comparison.
    """
    l = params.l
    eps = params.epsilon
    v_p = math.sqrt(2.0 / eps) * omega_tilde / math.sqrt(1.0 + math.sqrt(1.0 + (l / t) ** 2))
    return v_p, 2.0 * t / (eps * l * v_p)


# -- porous-medium comparison solution -----------------------------------------


@dataclass(frozen=True)
class ZKParams:
    """Zeldovich-Kompaneets source solution of ``T_t = (T**m)_xx``."""

    m: float = 2.0
    A: float = 1.0

    def __post_init__(self):
        if not self.m > 1:
            raise ParameterDomainError(f"m must exceed 1, got {self.m!r}")
        if not self.A > 0:
            raise ParameterDomainError("A must be positive")

    @property
    def alpha(self) -> float:
        return 1.0 / (self.m + 1.0)

    @property
    def beta(self) -> float:
        return 1.0 / (self.m + 1.0)

    @property
    def B2(self) -> float:
        m = self.m
        return (m - 1.0) / (2.0 * m * (m + 1.0))

    @property
    def B(self) -> float:
        return math.sqrt(self.B2)

    @property
    def K1(self) -> float:
        """Total mass, ``A**((m+1)/(m-1)) / B * B(1/2, 1 + 1/(m-1))``."""
        m = self.m
        return float(
            self.A ** ((m + 1.0) / (m - 1.0)) / self.B * beta_fn(0.5, 1.0 + 1.0 / (m - 1.0))
        )

    def front(self, t: float) -> float:
        return self.A / self.B * t**self.beta


def zk_solution(x, t, zk: ZKParams):
    _check_time(t)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    m = zk.m
    bracket = _positive_part(zk.A**2 - zk.B2 * x * x * t ** (-2.0 * zk.beta))
    out = (t ** (-zk.alpha * (m - 1.0)) * bracket) ** (1.0 / (m - 1.0))
    return out[()] if np.ndim(out) == 0 else out


def zk_product_form(x, t, zk: ZKParams):
    """``[t**-1 (A t^b - B x)_+ (A t^b + B x)_+]**(1/(m-1))``."""
    _check_time(t)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    tb = zk.A * t**zk.beta
    prod = _positive_part(tb - zk.B * x) * _positive_part(tb + zk.B * x) / t
    out = prod ** (1.0 / (zk.m - 1.0))
    return out[()] if np.ndim(out) == 0 else out


def heat_kernel(x, t, kappa: float):
    """Gaussian fundamental solution of ``T_t = kappa T_xx``."""
    _check_time(t)
    x = np.asarray(x, dtype=float)
    return np.exp(-x * x / (4.0 * kappa * t)) / np.sqrt(4.0 * math.pi * kappa * t)


def heat_residual(T_fn: Callable[[FloatArray, float], FloatArray], x, t, kappa: float, h: float):
    x = np.asarray(x, dtype=float)
    T_t = (T_fn(x, t + h) - T_fn(x, t - h)) / (2.0 * h)
    T_xx = (T_fn(x + h, t) - 2.0 * T_fn(x, t) + T_fn(x - h, t)) / (h * h)
    return T_t - kappa * T_xx


def zk_residual(x, t, zk: ZKParams, h: float):
    """Centered residual of ``T_t - (T**m)_xx`` for the ZK solution."""
    x = np.asarray(x, dtype=float)
    T_t = (zk_solution(x, t + h, zk) - zk_solution(x, t - h, zk)) / (2.0 * h)
    Tm = lambda y: zk_solution(y, t, zk) ** zk.m  # noqa: E731
    lap = (Tm(x + h) - 2.0 * Tm(x) + Tm(x - h)) / (h * h)
    return T_t - lap
