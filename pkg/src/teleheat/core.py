"""Parameter algebra, uniform meshes and field containers.

Everything here is immutable after construction. The derived model
constants (``epsilon``, ``a``, ``c``, ``kappa``) are computed on access
from the five physical inputs, so ``a == epsilon * l`` always holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]


class ParameterDomainError(ValueError):
    """Raised when an input lies outside the domain where a quantity is defined."""


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the power-law memory model.

    Parameters
    ----------
    k : float
        Effective thermal conductivity.
    gamma : float
        Heat capacity.
    tau : float
        Relaxation time.
    omega : float
        Regularizing time shift of the kernel.
    l : float
        Memory exponent of the power-law kernel; larger means shorter memory.
    """

    k: float = 1.0
    gamma: float = 1.0
    tau: float = 1.0
    omega: float = 1.0
    l: float = 6.2

    def __post_init__(self):
        for name in ("k", "gamma", "tau", "omega"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ParameterDomainError(f"{name} must be positive and finite, got {value!r}")
        if not (np.isfinite(self.l) and self.l > 1):
            raise ParameterDomainError(
                f"memory exponent l must exceed 1 for an integrable kernel, got {self.l!r}"
            )

    @property
    def epsilon(self) -> float:
        """Coefficient of T_tt: (gamma/k) * (omega/tau)**l."""
        return (self.gamma / self.k) * (self.omega / self.tau) ** self.l

    @property
    def a(self) -> float:
        """Coefficient of T_t/t: epsilon * l."""
        return self.epsilon * self.l

    @property
    def c(self) -> float:
        """Front speed 1/sqrt(epsilon)."""
        return 1.0 / math.sqrt(self.epsilon)

    @property
    def kappa(self) -> float:
        """Thermal diffusivity k/gamma."""
        return self.k / self.gamma

    @property
    def a_over_eps(self) -> float:
        # exact by construction; use this instead of dividing the floats
        return self.l


def make_params(
    k: float = 1.0,
    gamma: float = 1.0,
    tau: float = 1.0,
    omega: float = 1.0,
    l: float = 6.2,
    *,
    self_similar: bool = False,
) -> ModelParams:
    """Build validated model parameters.

    With ``self_similar=True`` the stricter bound ``l > 4`` is enforced,
    below which the compactly supported solution has a discontinuous
    gradient at its fronts.
    """
    params = ModelParams(k=k, gamma=gamma, tau=tau, omega=omega, l=l)
    if self_similar:
        require_self_similar(params.l)
    return params


def params_from_eps(eps: float, l: float, *, self_similar: bool = False) -> ModelParams:
    """Unit k, gamma, tau with omega chosen so that epsilon equals ``eps``."""
    if not eps > 0:
        raise ParameterDomainError(f"eps must be positive, got {eps!r}")
    if not l > 1:
        raise ParameterDomainError(f"memory exponent l must exceed 1, got {l!r}")
    return make_params(omega=eps ** (1.0 / l), l=l, self_similar=self_similar)


def require_self_similar(l: float) -> None:
    if not l > 4:
        raise ParameterDomainError(
            f"self-similar solution needs l > 4 (profile exponent (l-2)/2 > 1), got l={l!r}"
        )


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1-D mesh with ``n`` nodes on ``[x_min, x_max]``."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ParameterDomainError(f"need x_min < x_max, got {self.x_min}, {self.x_max}")
        if int(self.n) != self.n or self.n < 3:
            raise ParameterDomainError(f"need an integer n >= 3, got {self.n!r}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> FloatArray:
        x = self.x_min + np.arange(self.n) * self.dx
        x.setflags(write=False)
        return x

    def node(self, i: int) -> float:
        return self.x_min + i * self.dx

    def zeros(self) -> FloatArray:
        return np.zeros(self.n)


def grid_linspace(x_min: float, x_max: float, n: int) -> Grid1D:
    return Grid1D(float(x_min), float(x_max), int(n))


def symmetric_grid(half_width: float, dx: float) -> Grid1D:
    """Grid on ``[-L, L]`` with spacing exactly ``dx`` and a node at 0.

    ``L`` is rounded up to a whole number of cells.
    """
    if half_width <= 0 or dx <= 0:
        raise ParameterDomainError("half_width and dx must be positive")
    cells = int(math.ceil(half_width / dx - 1e-9))
    return Grid1D(-cells * dx, cells * dx, 2 * cells + 1)


@dataclass(frozen=True)
class Field:
    """Samples of T(x, t) or q(x, t) on a grid at one time."""

    grid: Grid1D
    t: float
    values: FloatArray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise ParameterDomainError(
                f"field has shape {values.shape}, grid has {self.grid.n} nodes"
            )
        if not np.all(np.isfinite(values)):
            raise ParameterDomainError("field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def x(self) -> FloatArray:
        return self.grid.x

    def __add__(self, other: "Field") -> "Field":
        return Field(self.grid, self.t, self.values + other.values)

    def __mul__(self, scalar: float) -> "Field":
        return Field(self.grid, self.t, scalar * self.values)

    __rmul__ = __mul__


def mass(f: Field) -> float:
    """Trapezoidal approximation of the integral of the field over its grid."""
    return float(np.trapezoid(f.values, dx=f.grid.dx))


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping controls shared by the finite-difference drivers.

    ``delta`` shifts the singular damping coefficient a/t to a/(t + delta);
    the modified telegraph driver rejects ``t0 + delta <= 0``.
    """

    t0: float = 1.0
    t_end: float = 1.5
    cfl: float = 0.5
    delta: float = 0.0
    boundary: str = "dirichlet-zero"
    snapshot_times: Sequence[float] = field(default_factory=tuple)
    trace_every: int = 1
    front_rel_threshold: float = 1e-10

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ParameterDomainError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.delta < 0:
            raise ParameterDomainError("delta must be non-negative")
        if self.t0 < 0:
            raise ParameterDomainError("t0 must be non-negative")
        if not self.t_end > self.t0:
            raise ParameterDomainError("t_end must exceed t0")
        if self.boundary != "dirichlet-zero":
            raise ParameterDomainError(f"unsupported boundary {self.boundary!r}")
        if self.trace_every < 1:
            raise ParameterDomainError("trace_every must be >= 1")
        snaps = tuple(float(s) for s in self.snapshot_times)
        for s in snaps:
            if not self.t0 <= s <= self.t_end:
                raise ParameterDomainError(f"snapshot time {s} outside [{self.t0}, {self.t_end}]")
        object.__setattr__(self, "snapshot_times", tuple(sorted(snaps)))
