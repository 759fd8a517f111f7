"""Numerical verification of the identities and decay estimates obeyed by
solitary-wave profiles and by the fields around them.

Every check produces an IdentityReport with both sides of the identity, a
relative residual, and a pass flag.  Residuals of profile identities are
dominated by the periodization of algebraically decaying tails, which scales
like (pi/L)^(1+alpha); the box has to grow as alpha approaches 1/2 for tight
tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .functionals import energy_fkdv, mass, weinstein
from .ground_state import MinimizerResult, SolitaryWave, dilate_field, minimize_iq
from .spectral import PURE_POWER, DispersionSymbol, Grid1D, RealField, field_from_values

__all__ = [
    "IdentityReport",
    "CommutatorDecay",
    "GNScanReport",
    "identity_suite",
    "pohojaev_functional_check",
    "commutator_decay",
    "smooth_bump",
    "iq_scaling_check",
    "gn_scan",
    "make_scan_battery",
]

RESIDUAL_FLOOR = 1e-300


@dataclass(frozen=True)
class IdentityReport:
    name: str
    lhs: float
    rhs: float
    relative_residual: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relative_residual": self.relative_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def _report(name: str, lhs: float, rhs: float, tol: float) -> IdentityReport:
    rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs), RESIDUAL_FLOOR)
    return IdentityReport(
        name=name, lhs=float(lhs), rhs=float(rhs),
        relative_residual=float(rel), tolerance=tol, passed=bool(rel < tol),
    )


def _profile_integrals(u: RealField, alpha: float):
    grid = u.grid
    uhat = np.fft.fft(u.values)
    w = grid.dx / grid.n
    grad_sq = float(np.sum(np.abs(grid.xi) ** alpha * np.abs(uhat) ** 2) * w)
    l2_sq = float(grid.dx * np.sum(u.values**2))
    cube = float(grid.dx * np.sum(u.values**3))
    return grad_sq, l2_sq, cube


def identity_suite(Q: SolitaryWave, tolerance: float = 1e-6) -> list[IdentityReport]:
    """The five integral identities characterizing pure-power profiles.

    With g = int |D^{a/2}Q|^2, m = int Q^2, k = int Q^3:
      energy            g + c m = k/2
      pohozaev          ((1-a)/2) g + (c/2) m = k/6
      kinetic_mass      (3a - 1) g = c m
      kinetic_fraction  g = c m / (3a - 1)
      cubic_fraction    k = 6 a c m / (3a - 1)
    """
    if Q.model.symbol.kind != PURE_POWER:
        raise ValueError("identity_suite applies to pure-power dispersion only")
    if Q.residual_sup >= 1e-6:
        raise ValueError(
            f"profile residual {Q.residual_sup:.3e} too large for identity checks (need < 1e-6)"
        )
    alpha, c = Q.alpha, Q.c
    g, m, k = _profile_integrals(Q.profile, alpha)
    return [
        _report("energy", g + c * m, 0.5 * k, tolerance),
        _report("pohozaev", 0.5 * (1.0 - alpha) * g + 0.5 * c * m, k / 6.0, tolerance),
        _report("kinetic_mass", (3.0 * alpha - 1.0) * g, c * m, tolerance),
        _report("kinetic_fraction", g, c * m / (3.0 * alpha - 1.0), tolerance),
        _report("cubic_fraction", k, 6.0 * alpha * c * m / (3.0 * alpha - 1.0), tolerance),
    ]


def pohojaev_functional_check(phi: RealField, alpha: float,
                              tolerance: float = 1e-6) -> IdentityReport:
    """Check int (D^alpha phi) x phi' dx = ((alpha-1)/2) int |D^{alpha/2} phi|^2.

    The x-weighted integrand is not periodic, so phi must be effectively
    supported away from the box boundary.  The report carries both sides with
    the quadratic form g = int |D^{alpha/2} phi|^2 added, i.e.
    lhs + g = ((alpha+1)/2) g, so that neither side vanishes at alpha = 0 or
    alpha = 1 and the relative residual stays meaningful there.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    grid = phi.grid
    sup = float(np.max(np.abs(phi.values)))
    boundary = max(abs(phi.values[0]), abs(phi.values[-1]))
    if sup > 0 and boundary > 1e-10 * sup:
        raise ValueError(
            f"boundary value {boundary:.3e} exceeds 1e-10 * sup {sup:.3e}; "
            "the x-weighted identity is not periodic-safe"
        )
    phat = np.fft.fft(phi.values)
    dphi = np.fft.ifft(1j * grid.xi * phat).real      # Nyquist of xi*fft handled below
    # the Nyquist mode of an odd multiplier is dropped
    nyq = grid.n // 2
    if grid.n % 2 == 0:
        dmult = 1j * grid.xi.copy()
        dmult[nyq] = 0.0
        dphi = np.fft.ifft(dmult * phat).real
    dalpha_phi = np.fft.ifft(np.abs(grid.xi) ** alpha * phat).real
    weighted = float(grid.dx * np.sum(dalpha_phi * grid.x * dphi))
    g = float(grid.dx / grid.n * np.sum(np.abs(grid.xi) ** alpha * np.abs(phat) ** 2))
    return _report("pohozaev_functional", weighted + g, (alpha + 1.0) / 2.0 * g, tolerance)


# -- commutator decay ----------------------------------------------------------


def smooth_bump(t: np.ndarray) -> np.ndarray:
    """C^infty cutoff: 1 on [-1, 1], supported on [-2, 2].

    exp(1 - 1/(1 - s^2)) with s = |t| - 1 on the transition region.
    """
    t = np.abs(np.asarray(t, dtype=np.float64))
    out = np.zeros_like(t)
    out[t <= 1.0] = 1.0
    trans = (t > 1.0) & (t < 2.0)
    s = t[trans] - 1.0
    out[trans] = np.exp(1.0 - 1.0 / (1.0 - s**2))
    return out


@dataclass(frozen=True)
class CommutatorDecay:
    alpha: float
    radii: tuple
    norms: tuple
    slope: float
    intercept: float
    degenerate: bool

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "radii": list(self.radii),
            "norms": list(self.norms),
            "slope": self.slope,
            "intercept": self.intercept,
            "degenerate": self.degenerate,
        }


def commutator_decay(alpha: float, v: RealField, r_list: Sequence[float],
                     complement: bool = False) -> CommutatorDecay:
    """L^2 norms of [D^alpha, phi_r] v over a list of cutoff radii, with the
    least-squares log-log slope.

    phi_r(x) = phi(x/r) for the fixed smooth bump (1 on [-r, r], support
    [-2r, 2r]); with complement=True the complementary cutoff
    psi_r = sqrt(1 - phi_r^2) is used instead.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    grid = v.grid
    rs = [float(r) for r in r_list]
    if any(r2 <= r1 for r1, r2 in zip(rs, rs[1:])):
        raise ValueError("radii must be strictly increasing")
    if rs and 2.0 * rs[-1] > grid.L / 2.0:
        raise ValueError(
            f"cutoff support [-2r, 2r] with r = {rs[-1]} exceeds half the box (L = {grid.L})"
        )
    mult = np.abs(grid.xi) ** alpha
    vhat = np.fft.fft(v.values)
    dv = np.fft.ifft(mult * vhat).real
    norms = []
    for r in rs:
        cut = smooth_bump(grid.x / r)
        if complement:
            cut = np.sqrt(np.clip(1.0 - cut**2, 0.0, 1.0))
        comm = np.fft.ifft(mult * np.fft.fft(cut * v.values)).real - cut * dv
        norms.append(float(np.sqrt(grid.dx * np.sum(comm**2))))
    degenerate = any(nm <= 1e-300 for nm in norms) or len(norms) < 2
    if degenerate:
        slope, intercept = float("nan"), float("nan")
    else:
        slope, intercept = np.polyfit(np.log(rs), np.log(norms), 1)
    return CommutatorDecay(
        alpha=alpha, radii=tuple(rs), norms=tuple(norms),
        slope=float(slope), intercept=float(intercept), degenerate=degenerate,
    )


def saturating_field(grid: Grid1D, alpha_exponent: float = 0.75,
                     rolloff: float = 2.0) -> RealField:
    """Even field whose spectrum behaves like |xi|^(-3/4) at low frequency.

    Fields of this type have tails ~|x|^(-1/4) inside the box and realize the
    worst-case commutator decay rate r^(1/4 - alpha) of bounded energy-norm
    families; rapidly decaying fields decay strictly faster, like
    r^(-(alpha + 1/2)).
    """
    xi = grid.xi
    amp = np.zeros(grid.n)
    nz = xi != 0.0
    amp[nz] = np.abs(xi[nz]) ** (-alpha_exponent) * np.exp(-((xi[nz] / rolloff) ** 2))
    vals = np.fft.ifft(amp).real
    vals = vals / np.max(np.abs(vals))
    return field_from_values(grid, vals)


# -- minimization scaling law ---------------------------------------------------


def iq_scaling_check(
    alpha: float,
    q: float,
    theta_list: Sequence[float],
    grid: Grid1D,
    tolerance: float = 1e-3,
    mass_law_tolerance: float = 1e-6,
    energy_law_tolerance: float = 1e-3,
    base: Optional[MinimizerResult] = None,
    **minimize_opts,
) -> list[IdentityReport]:
    """Check I_{theta q} = theta^((3a-1)/(2a-1)) I_q by independent minimizations,
    plus the mass/energy transformation laws of the rescaling
    v_theta(x) = theta^(a/(2a-1)) v(theta^(1/(2a-1)) x) applied to the minimizer.

    The mass law is quadrature-exact for localized fields; the energy law
    carries the |xi|^alpha lattice-kink error of the kinetic term, of size
    (pi/L)^(1+alpha) |int v|^2, hence its looser default tolerance."""
    if not (0.5 < alpha < 1.0):
        raise ValueError(f"iq_scaling_check needs alpha in (1/2, 1), got {alpha}")
    exponent = (3.0 * alpha - 1.0) / (2.0 * alpha - 1.0)
    if base is None:
        base = minimize_iq(q, alpha, grid, **minimize_opts)
    reports = []
    for theta in theta_list:
        if not theta > 0:
            raise ValueError(f"theta must be positive, got {theta}")
        scaled = minimize_iq(theta * q, alpha, grid, **minimize_opts)
        reports.append(_report(
            f"iq_scaling_theta_{theta:g}",
            scaled.I_q / base.I_q, theta**exponent, tolerance,
        ))
        # transformation laws measured on the explicitly rescaled minimizer
        lam = theta ** (1.0 / (2.0 * alpha - 1.0))
        amp = theta ** (alpha / (2.0 * alpha - 1.0))
        v_theta = dilate_field(base.profile, lam, amplitude=amp)
        reports.append(_report(
            f"mass_law_theta_{theta:g}",
            mass(v_theta), theta * mass(base.profile), mass_law_tolerance,
        ))
        sym = DispersionSymbol.power(alpha)
        reports.append(_report(
            f"energy_law_theta_{theta:g}",
            energy_fkdv(v_theta, sym).value,
            theta**exponent * energy_fkdv(base.profile, sym).value,
            energy_law_tolerance,
        ))
    return reports


# -- Weinstein-functional scan ---------------------------------------------------


@dataclass(frozen=True)
class GNScanReport:
    alpha: float
    ground_value: float
    min_ratio: float
    argmin: int
    ratios: tuple
    passed: bool

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "ground_value": self.ground_value,
            "min_ratio": self.min_ratio,
            "argmin": self.argmin,
            "ratios": list(self.ratios),
            "pass": self.passed,
        }


def gn_scan(Q: SolitaryWave, battery: Sequence[RealField], alpha: float,
            slack: float = 1e-8) -> GNScanReport:
    """Assert the ground state minimizes the Weinstein ratio over a battery."""
    if len(battery) == 0:
        raise ValueError("gn_scan needs a non-empty battery")
    j_ground = weinstein(Q.profile, alpha)
    ratios = tuple(weinstein(f, alpha) / j_ground for f in battery)
    argmin = int(np.argmin(ratios))
    min_ratio = float(ratios[argmin])
    return GNScanReport(
        alpha=alpha,
        ground_value=float(j_ground),
        min_ratio=min_ratio,
        argmin=argmin,
        ratios=ratios,
        passed=bool(min_ratio >= 1.0 - slack),
    )


def make_scan_battery(grid: Grid1D, seed: int, count: int = 20,
                      band_fraction: float = 0.1) -> list[RealField]:
    """Deterministic battery of Gaussians and band-limited random fields."""
    rng = np.random.default_rng(seed)
    fields = []
    widths = np.linspace(0.5, 8.0, max(1, count // 2))
    for w in widths:
        fields.append(field_from_values(grid, np.exp(-((grid.x / w) ** 2))))
    n_random = count - len(fields)
    n_modes = max(2, int(band_fraction * grid.n / 2))
    for _ in range(n_random):
        coef = np.zeros(grid.n, dtype=complex)
        re = rng.standard_normal(n_modes)
        im = rng.standard_normal(n_modes)
        coef[1 : n_modes + 1] = re + 1j * im
        coef[-n_modes:] = np.conj(coef[1 : n_modes + 1][::-1])
        vals = np.fft.ifft(coef).real
        vals /= max(np.max(np.abs(vals)), 1e-30)
        # localize so the field represents a line function
        vals *= np.exp(-((grid.x / (grid.L / 4.0)) ** 2))
        fields.append(field_from_values(grid, vals))
    return fields
