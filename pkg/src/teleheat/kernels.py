"""Relaxation kernels and history-integral fluxes.

The flux is a memory of past temperature gradients,

    q(x, t) = - int_{-inf}^{t} Q(t - t') T_x(x, t') dt'.

Recorded gradient samples are integrated with the trapezoidal rule. Before
the first record the gradient is held at a constant "prehistory" value,
whose contribution is a closed-form tail integral of the kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from teleheat.core import Field, FloatArray, Grid1D, ModelParams, ParameterDomainError


class UnsupportedOperation(TypeError):
    """The kernel variant has no pointwise value (a Dirac distribution)."""


def _positive(**values):
    for name, v in values.items():
        if not v > 0:
            raise ParameterDomainError(f"{name} must be positive, got {v!r}")


@dataclass(frozen=True)
class Dirac:
    """Instantaneous response ``k delta(s)``: the Fourier law."""

    k: float = 1.0

    def __post_init__(self):
        _positive(k=self.k)

    dirac_weight = property(lambda self: self.k)

    def smooth(self, s):
        return np.zeros_like(np.asarray(s, dtype=float))

    def tail(self, start: float) -> float:
        return 0.0


@dataclass(frozen=True)
class Exponential:
    """Cattaneo kernel ``(k/tau) exp(-s/tau)``."""

    k: float = 1.0
    tau: float = 1.0

    def __post_init__(self):
        _positive(k=self.k, tau=self.tau)

    dirac_weight = property(lambda self: 0.0)

    def smooth(self, s):
        return self.k / self.tau * np.exp(-np.asarray(s, dtype=float) / self.tau)

    def tail(self, start: float) -> float:
        return self.k * math.exp(-start / self.tau)


@dataclass(frozen=True)
class PowerLaw:
    """Power-law kernel ``k tau**l / (s + omega)**l``."""

    k: float = 1.0
    tau: float = 1.0
    omega: float = 1.0
    l: float = 6.2

    def __post_init__(self):
        _positive(k=self.k, tau=self.tau, omega=self.omega)
        if not self.l > 1:
            raise ParameterDomainError("power-law kernel needs l > 1 to be integrable")

    @classmethod
    def from_params(cls, params: ModelParams) -> "PowerLaw":
        return cls(k=params.k, tau=params.tau, omega=params.omega, l=params.l)

    dirac_weight = property(lambda self: 0.0)

    def smooth(self, s):
        s = np.asarray(s, dtype=float)
        return self.k * (self.tau / (s + self.omega)) ** self.l

    def tail(self, start: float) -> float:
        return (
            self.k * self.tau**self.l
            / ((self.l - 1.0) * (start + self.omega) ** (self.l - 1.0))
        )


@dataclass(frozen=True)
class Jeffrey:
    """Fourier plus Cattaneo: ``k1 delta(s) + (k2/tau) exp(-s/tau)``."""

    k1: float = 1.0
    k2: float = 1.0
    tau: float = 1.0

    def __post_init__(self):
        _positive(k1=self.k1, k2=self.k2, tau=self.tau)

    dirac_weight = property(lambda self: self.k1)

    def smooth(self, s):
        return self.k2 / self.tau * np.exp(-np.asarray(s, dtype=float) / self.tau)

    def tail(self, start: float) -> float:
        return self.k2 * math.exp(-start / self.tau)


KernelSpec = Union[Dirac, Exponential, PowerLaw, Jeffrey]


def kernel_eval(spec: KernelSpec, s):
    """Pointwise value of the smooth part of ``Q(s)`` for ``s >= 0``.

    A pure Dirac kernel has no pointwise value and raises
    :class:`UnsupportedOperation`; for the Jeffrey kernel only the
    exponential part is returned (its Dirac weight is ``spec.dirac_weight``).
    """
    if isinstance(spec, Dirac):
        raise UnsupportedOperation("Dirac kernel is a distribution; use flux_history")
    if np.any(np.asarray(s) < 0):
        raise ParameterDomainError("kernel argument s must be non-negative")
    return spec.smooth(s)


def kernel_total(spec: KernelSpec) -> float:
    """Integral of ``Q`` over ``[0, inf)``, Dirac weight included."""
    return spec.dirac_weight + spec.tail(0.0)


@dataclass(frozen=True)
class HistoryRecord:
    """Sampled gradient history ``T_x(x, t')``.

    ``prehistory`` is the gradient assumed for all ``t' < times[0]``: a
    scalar or a per-node array.
    """

    times: FloatArray
    gradients: FloatArray
    grid: Grid1D
    prehistory: Union[float, FloatArray] = 0.0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        grads = np.asarray(self.gradients, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise ParameterDomainError("history must contain at least one sample")
        if np.any(np.diff(times) <= 0):
            raise ParameterDomainError("history times must be strictly increasing")
        if grads.shape != (times.size, self.grid.n):
            raise ParameterDomainError(
                f"gradients shape {grads.shape} does not match ({times.size}, {self.grid.n})"
            )
        pre = np.broadcast_to(np.asarray(self.prehistory, dtype=float), (self.grid.n,)).copy()
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "gradients", grads)
        object.__setattr__(self, "prehistory", pre)

    @classmethod
    def from_fields(
        cls, fields: Sequence[Field], prehistory: Union[float, FloatArray] = 0.0
    ) -> "HistoryRecord":
        if not fields:
            raise ParameterDomainError("history must contain at least one sample")
        grid = fields[0].grid
        for f in fields:
            if f.grid != grid:
                raise ParameterDomainError("all gradient fields must share one grid")
        return cls(
            times=np.array([f.t for f in fields]),
            gradients=np.stack([f.values for f in fields]),
            grid=grid,
            prehistory=prehistory,
        )

    def gradient_at(self, t: float) -> FloatArray:
        """Linear interpolation between records; constant beyond either end."""
        times = self.times
        if t < times[0]:
            return self.prehistory
        if t >= times[-1]:
            return self.gradients[-1]
        j = int(np.searchsorted(times, t, side="right"))
        w = (t - times[j - 1]) / (times[j] - times[j - 1])
        return (1 - w) * self.gradients[j - 1] + w * self.gradients[j]

    def up_to(self, t: float) -> tuple[FloatArray, FloatArray]:
        """Sample times in ``[times[0], t]`` and gradients, with ``t`` appended if needed."""
        times = self.times
        mask = times <= t
        ts = times[mask]
        gs = self.gradients[mask]
        if ts[-1] < t:
            ts = np.append(ts, t)
            gs = np.vstack([gs, self.gradient_at(t)])
        return ts, gs


def _weighted_history_integral(record: HistoryRecord, weight, tail_weight, t: float) -> FloatArray:
    """``int_{-inf}^{t} w(t - t') G(t') dt'`` from records, hold-last extension and prehistory.

    ``tail_weight(u)`` must return ``int_u^inf w(s) ds``.
    """
    if t < record.times[0]:
        raise ParameterDomainError("t precedes the first history record")
    total = np.zeros(record.grid.n)
    t_last = record.times[-1]
    if t > t_last:
        # gradient held at its last value on (t_last, t]
        total += (tail_weight(0.0) - tail_weight(t - t_last)) * record.gradients[-1]
        ts, gs = record.times, record.gradients
    else:
        ts, gs = record.up_to(t)
    if ts.size > 1:
        w = weight(t - ts)
        total += np.trapezoid(w[:, None] * gs, x=ts, axis=0)
    total += tail_weight(t - ts[0]) * record.prehistory
    return total


def flux_history(record: HistoryRecord, spec: KernelSpec, t: float) -> Field:
    """Flux from the history integral, stamped at ``t``."""
    total = _weighted_history_integral(record, spec.smooth, spec.tail, t)
    if spec.dirac_weight:
        total = total + spec.dirac_weight * record.gradient_at(t)
    return Field(record.grid, t, -total)


def cattaneo_flux_step(q_prev: Field, grad_T: Field, dt: float, k: float, tau: float) -> Field:
    """One implicit-Euler step of ``tau q_t + q = -k T_x``."""
    if not dt > 0:
        raise ParameterDomainError("dt must be positive")
    if q_prev.grid != grad_T.grid:
        raise ParameterDomainError("flux and gradient grids differ")
    q_new = (q_prev.values - (dt * k / tau) * grad_T.values) / (1.0 + dt / tau)
    return Field(q_prev.grid, q_prev.t + dt, q_new)


@dataclass(frozen=True)
class MeanValueAudit:
    lhs: Field
    rhs: Field
    gap: float


def flux_rate_fd(record: HistoryRecord, spec: KernelSpec, t: float, h: float) -> FloatArray:
    """Centered time difference of :func:`flux_history`."""
    qp = flux_history(record, spec, t + h).values
    qm = flux_history(record, spec, t - h).values
    return (qp - qm) / (2.0 * h)


def mean_value_audit(record: HistoryRecord, params: ModelParams, t: float) -> MeanValueAudit:
    """Compare the exact flux rate of the power-law kernel with the local law.

    ``lhs`` is the exact derivative

        q_t = -k (tau/omega)**l T_x(t) + l int Q(s) / (s + omega) T_x(t - s) ds,

    with the memory integral done by quadrature. ``rhs`` is the local law
    that results from pulling ``1/(s + omega)`` out of the integral as
    ``1/t`` (shifted model time):

        q_t = -k (tau/omega)**l T_x(t) - (l / t) q(t).

    The max-norm gap is diagnostic only.
    """
    if t <= 0:
        raise ParameterDomainError("audit time must be positive")
    if t < record.times[0]:
        raise ParameterDomainError("insufficient history before t")
    kern = PowerLaw.from_params(params)
    l, omega = kern.l, kern.omega
    boundary = -kern.smooth(0.0) * record.gradient_at(t)

    def weight(s):
        return l * kern.smooth(s) / (s + omega)

    # int_u^inf l Q(s)/(s+omega) ds = Q(u)
    memory = _weighted_history_integral(record, weight, kern.smooth, t)
    lhs = boundary + memory
    q = flux_history(record, kern, t).values
    rhs = boundary - (l / t) * q
    gap = float(np.max(np.abs(lhs - rhs)))
    return MeanValueAudit(Field(record.grid, t, lhs), Field(record.grid, t, rhs), gap)
