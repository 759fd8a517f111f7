"""Conserved quantities and variational functionals evaluated on fields.

Sign conventions: the cubic integral enters the energy with the signed
``u**3`` while the Weinstein ratio and the Gagliardo-Nirenberg check use
``|u|**3``; the two differ for sign-changing fields.  The BBM pair keeps
the factor 1/2 on the quadratic form, i.e. ``bbm_quadratic`` is half the
squared energy norm and ``bbm_hamiltonian`` is the integral of
``u^2/2 + u^3/6``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import DispersionSymbol, RealField, energy_norm

__all__ = [
    "FunctionalValue",
    "GNReport",
    "mass",
    "energy_fkdv",
    "bbm_quadratic",
    "bbm_hamiltonian",
    "weinstein",
    "gn_check",
]

CUBE_FLOOR = 1e-14


@dataclass(frozen=True)
class FunctionalValue:
    """A functional together with its per-term decomposition.

    The value is the signed sum of the component entries.
    """

    name: str
    value: float
    components: tuple

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "components": [[label, val] for label, val in self.components],
        }


def _spectral_power(u: RealField, weight: np.ndarray) -> float:
    """Parseval form of the weighted quadratic integral sum_xi w(xi)|u_hat|^2."""
    uhat = np.fft.fft(u.values)
    return float(u.grid.dx / u.grid.n * np.sum(weight * np.abs(uhat) ** 2))


def mass(u: RealField) -> float:
    """M(u) = (1/2) integral of u^2."""
    return float(0.5 * u.grid.dx * np.sum(u.values**2))


def energy_fkdv(u: RealField, p_symbol: DispersionSymbol) -> FunctionalValue:
    """E(u) = (1/2) int |p(D)^{1/2} u|^2 - (1/6) int u^3."""
    kinetic = 0.5 * _spectral_power(u, p_symbol(u.grid.xi))
    cubic = u.grid.dx * np.sum(u.values**3) / 6.0
    return FunctionalValue(
        name="energy",
        value=kinetic - cubic,
        components=(("kinetic", kinetic), ("cubic", -cubic)),
    )


def bbm_quadratic(u: RealField, alpha: float) -> float:
    """P(u) = (1/2) int (u^2 + |D^{alpha/2} u|^2), half the squared energy norm."""
    return 0.5 * energy_norm(u, alpha) ** 2


def bbm_hamiltonian(u: RealField) -> float:
    """H_B(u) = int (u^2/2 + u^3/6)."""
    v = u.values
    return float(u.grid.dx * np.sum(v**2 / 2.0 + v**3 / 6.0))


def weinstein(u: RealField, alpha: float) -> float:
    """Scale-invariant ratio (int |u|^3)^-1 (int |D^{a/2}u|^2)^{1/(2a)} (int u^2)^{(3a-1)/(2a)}.

    Its infimum over nonzero fields is attained by the ground state and
    gives the sharp Gagliardo-Nirenberg constant.
    """
    if not (1.0 / 3.0 < alpha <= 2.0):
        raise ValueError(f"weinstein needs alpha in (1/3, 2], got {alpha}")
    v = u.values
    cube = float(u.grid.dx * np.sum(np.abs(v) ** 3))
    if cube <= CUBE_FLOOR:
        raise ValueError("weinstein is undefined: integral of |u|^3 vanishes")
    grad_sq = _spectral_power(u, np.abs(u.grid.xi) ** alpha)
    l2_sq = float(u.grid.dx * np.sum(v**2))
    return grad_sq ** (0.5 / alpha) * l2_sq ** ((3.0 * alpha - 1.0) / (2.0 * alpha)) / cube


@dataclass(frozen=True)
class GNReport:
    """Evaluation of both sides of the Gagliardo-Nirenberg inequality."""

    alpha: float
    constant: float
    lhs: float            # int |u|^3
    rhs: float            # C * (int |D^{a/2}u|^2)^{1/2a} (int u^2)^{(3a-1)/2a}
    ratio: float          # lhs / (rhs without C) = 1 / weinstein(u)
    holds: bool

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "constant": self.constant,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "holds": self.holds,
        }


def gn_check(u: RealField, alpha: float, C: float) -> GNReport:
    """Check int |u|^3 <= C (int |D^{a/2}u|^2)^{1/2a} (int u^2)^{(3a-1)/2a}.

    The sharp constant is 1/weinstein(ground state).
    """
    if not (1.0 / 3.0 < alpha <= 2.0):
        raise ValueError(f"gn_check needs alpha in (1/3, 2], got {alpha}")
    if not C > 0:
        raise ValueError(f"gn_check needs C > 0, got {C}")
    j = weinstein(u, alpha)
    lhs = float(u.grid.dx * np.sum(np.abs(u.values) ** 3))
    rhs_bare = lhs * j  # (int|D^{a/2}u|^2)^{1/2a} (int u^2)^{(3a-1)/2a}
    return GNReport(
        alpha=alpha,
        constant=C,
        lhs=lhs,
        rhs=C * rhs_bare,
        ratio=1.0 / j,
        holds=lhs <= C * rhs_bare,
    )
