"""Fourier substrate for periodic pseudospectral computation.

The real line is truncated to the box [-L, L), sampled uniformly at n
points.  Everything downstream (functionals, solitary-wave solvers, time
steppers) manipulates fields through Fourier multipliers on this box:

* wavenumbers follow fft ordering, ``xi_j = pi*j/L``,
* integrals are uniform Riemann sums, spectrally accurate for smooth
  periodic integrands,
* the fractional derivative of order ``s`` is the multiplier ``|xi|**s``,
* translation is the phase ``exp(1j*xi*y)``, exact for band-limited fields.

Grids and fields are immutable after construction and safe to share between
concurrently running solves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "Grid1D",
    "RealField",
    "DispersionSymbol",
    "make_grid",
    "field_from_values",
    "field_from_function",
    "apply_multiplier",
    "d_alpha",
    "resolvent",
    "energy_norm",
    "shift_field",
    "integrate",
    "inner",
    "l2_norm",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Uniform periodic sampling of [-L, L) with fft-ordered wavenumbers."""

    n: int
    L: float
    dx: float
    x: np.ndarray
    xi: np.ndarray


def make_grid(n: int, L: float) -> Grid1D:
    """Build the periodic grid with n samples (power of two, >= 8) on [-L, L)."""
    if n < 8 or (n & (n - 1)) != 0:
        raise ValueError(f"n must be a power of two with n >= 8, got {n}")
    if not L > 0:
        raise ValueError(f"L must be positive, got {L}")
    L = float(L)
    dx = 2.0 * L / n  # exact: division by a power of two
    x = -L + dx * np.arange(n)
    xi = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
    return Grid1D(n=n, L=L, dx=dx, x=_readonly(x), xi=_readonly(xi))


@dataclass(frozen=True, eq=False)
class RealField:
    """Real-valued samples on a Grid1D; the state of every solver."""

    grid: Grid1D
    values: np.ndarray

    def __add__(self, other):
        if isinstance(other, RealField):
            _same_grid(self, other)
            return RealField(self.grid, _readonly(self.values + other.values))
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, RealField):
            _same_grid(self, other)
            return RealField(self.grid, _readonly(self.values - other.values))
        return NotImplemented

    def __mul__(self, a):
        if np.isscalar(a):
            return RealField(self.grid, _readonly(self.values * a))
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return RealField(self.grid, _readonly(-self.values))


def _same_grid(u: RealField, v: RealField) -> None:
    if u.grid is not v.grid and (u.grid.n != v.grid.n or u.grid.L != v.grid.L):
        raise ValueError("fields live on different grids")


def field_from_values(grid: Grid1D, values) -> RealField:
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (grid.n,):
        raise ValueError(f"expected {grid.n} values, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("field values must be finite")
    return RealField(grid=grid, values=_readonly(values))


def field_from_function(grid: Grid1D, f: Callable[[np.ndarray], np.ndarray]) -> RealField:
    return field_from_values(grid, f(grid.x))


# -- dispersion symbols -------------------------------------------------------

PURE_POWER = "power"
WHITHAM = "whitham"
WHITHAM_TENSION = "whitham_tension"


@dataclass(frozen=True)
class DispersionSymbol:
    """Even, finite Fourier multiplier p(xi) selecting the model family.

    Kinds:
      power            p(xi) = |xi|**alpha,  0 < alpha <= 2
      whitham          p(xi) = (tanh(xi)/xi)**(1/2), p(0) = 1
      whitham_tension  p(xi) = (1 + beta*xi^2)**(1/2) (tanh(xi)/xi)**(1/2)
    """

    kind: str
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.kind == PURE_POWER:
            if not (0.0 < self.alpha <= 2.0):
                raise ValueError(f"power symbol needs alpha in (0, 2], got {self.alpha}")
        elif self.kind == WHITHAM:
            pass
        elif self.kind == WHITHAM_TENSION:
            if self.beta < 0:
                raise ValueError(f"surface-tension parameter must be >= 0, got {self.beta}")
        else:
            raise ValueError(f"unknown symbol kind {self.kind!r}")

    @classmethod
    def power(cls, alpha: float) -> "DispersionSymbol":
        return cls(kind=PURE_POWER, alpha=float(alpha))

    @classmethod
    def whitham(cls) -> "DispersionSymbol":
        return cls(kind=WHITHAM)

    @classmethod
    def whitham_tension(cls, beta: float) -> "DispersionSymbol":
        return cls(kind=WHITHAM_TENSION, beta=float(beta))

    def __call__(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=np.float64)
        if self.kind == PURE_POWER:
            return np.abs(xi) ** self.alpha
        # tanh(xi)/xi is even with removable singularity at 0 (limit 1)
        t = np.ones_like(xi)
        nz = xi != 0.0
        t[nz] = np.tanh(xi[nz]) / xi[nz]
        p = np.sqrt(t)
        if self.kind == WHITHAM_TENSION:
            p = p * np.sqrt(1.0 + self.beta * xi**2)
        return p


# -- multiplier machinery -----------------------------------------------------


def _apply_multiplier_array(u: RealField, m: np.ndarray) -> RealField:
    """Apply a precomputed (possibly complex) multiplier array; returns the real part."""
    out = np.fft.ifft(m * np.fft.fft(u.values)).real
    return RealField(grid=u.grid, values=_readonly(out))


def apply_multiplier(u: RealField, m: Callable[[np.ndarray], np.ndarray]) -> RealField:
    """Replace u_hat(xi) by m(xi) u_hat(xi) for a real, even symbol m."""
    marr = np.asarray(m(u.grid.xi), dtype=np.float64)
    if marr.shape != (u.grid.n,):
        raise ValueError("multiplier must return one value per grid wavenumber")
    if not np.all(np.isfinite(marr)):
        raise ValueError("multiplier is not finite on all grid wavenumbers")
    # evenness on the lattice: m at -xi_j is m at index (-j) mod n
    flipped = marr[(-np.arange(u.grid.n)) % u.grid.n]
    if not np.allclose(marr, flipped, rtol=1e-12, atol=0.0):
        raise ValueError("multiplier must be even in xi")
    return _apply_multiplier_array(u, marr)


def d_alpha(u: RealField, s: float) -> RealField:
    """Fractional derivative |D|^s: the multiplier |xi|**s (identity for s = 0)."""
    if s < 0:
        raise ValueError(f"d_alpha needs s >= 0, got {s}")
    if s == 0:
        return u
    return _apply_multiplier_array(u, np.abs(u.grid.xi) ** s)


def resolvent(u: RealField, c: float, p: DispersionSymbol) -> RealField:
    """Apply (c + p(D))^{-1}; exact right-inverse of c + p(D) on the grid."""
    if not c > 0:
        raise ValueError(f"resolvent needs c > 0, got {c}")
    return _apply_multiplier_array(u, 1.0 / (c + p(u.grid.xi)))


def integrate(u: RealField) -> float:
    """Integral over the box by the uniform Riemann sum."""
    return float(u.grid.dx * np.sum(u.values))


def inner(u: RealField, v: RealField) -> float:
    _same_grid(u, v)
    return float(u.grid.dx * np.dot(u.values, v.values))


def l2_norm(u: RealField) -> float:
    return float(np.sqrt(u.grid.dx) * np.linalg.norm(u.values))


def energy_norm(u: RealField, alpha: float) -> float:
    """The norm (|u|_2^2 + |D^{alpha/2} u|_2^2)^{1/2} of the energy space."""
    if not (0.0 < alpha <= 2.0):
        raise ValueError(f"energy_norm needs alpha in (0, 2], got {alpha}")
    uhat = np.fft.fft(u.values)
    w = u.grid.dx / u.grid.n  # Parseval weight
    power = np.abs(uhat) ** 2
    l2_sq = w * np.sum(power)
    h_sq = w * np.sum(np.abs(u.grid.xi) ** alpha * power)
    return float(np.sqrt(l2_sq + h_sq))


def shift_field(u: RealField, y: float) -> RealField:
    """Translate to u(. + y) by Fourier phases; exact for band-limited fields.

    The Nyquist mode has no well-defined translation direction and is moved
    with the real-even convention cos(xi_nyq * y).
    """
    grid = u.grid
    phase = np.exp(1j * grid.xi * y)
    phase[grid.n // 2] = np.cos(grid.xi[grid.n // 2] * y)
    return _apply_multiplier_array(u, phase)
