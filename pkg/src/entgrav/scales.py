"""Dimensional physics: the control parameter, decoherence times and
validity checks.

Everything else in the package works in natural units with the packet
width sigma as the unit of inverse length; this module is the single place
where SI units (and hence the physical constants) appear.

Constants are CODATA 2018 recommended values:

    G_N   6.67430e-11  m^3 kg^-1 s^-2   (Newtonian constant of gravitation)
    hbar  1.054571817e-34  J s          (reduced Planck constant, exact/derived)
    c     299792458     m s^-1          (speed of light, exact)
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

__all__ = [
    "Regime",
    "Constants",
    "CODATA2018",
    "PhysicalScales",
    "DerivedScales",
    "ValidityReport",
    "control_parameter",
    "rest_energy",
    "derive",
    "decoherence_time",
    "validity_report",
]


class Regime(Enum):
    MASSIVE_STATIC = "massive"
    MASSLESS_HIGH_MOMENTUM = "massless"


@dataclass(frozen=True)
class Constants:
    G_N: float = 6.67430e-11
    hbar: float = 1.054571817e-34
    c: float = 299792458.0


CODATA2018 = Constants()


@dataclass(frozen=True)
class PhysicalScales:
    """SI description of one excitation: regime, mass or wave number, width.

    ``sigma`` is the momentum-space width in inverse meters; the particle
    "size" is 2/sigma. Exactly one of ``mass`` (kg, massive regime) and
    ``wave_number_k0`` (1/m, massless regime) must be present.
    """

    regime: Regime
    sigma: float
    mass: float | None = None
    wave_number_k0: float | None = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.regime is Regime.MASSIVE_STATIC:
            if self.mass is None or not self.mass > 0:
                raise ValueError("massive regime requires mass > 0")
            if self.wave_number_k0 is not None:
                raise ValueError("massive regime must not set wave_number_k0")
        else:
            if self.wave_number_k0 is None or not self.wave_number_k0 > 0:
                raise ValueError("massless regime requires wave_number_k0 > 0")
            if self.mass is not None:
                raise ValueError("massless regime must not set mass")

    def regime_ratio(self, constants: Constants = CODATA2018) -> float:
        """Dimensionless ratio that must be >> 1 for the regime to apply:
        m c / (hbar sigma) when massive, k0 / sigma when massless."""
        if self.regime is Regime.MASSIVE_STATIC:
            return self.mass * constants.c / (constants.hbar * self.sigma)
        return self.wave_number_k0 / self.sigma


@dataclass(frozen=True)
class DerivedScales:
    xi: float
    E0: float
    tau: float
    particle_size: float
    schwarzschild_radius: float | None = None


def rest_energy(scales: PhysicalScales,
                constants: Constants = CODATA2018) -> float:
    """E0 in joules: m c^2 for massive static, hbar k0 c for massless."""
    if scales.regime is Regime.MASSIVE_STATIC:
        return scales.mass * constants.c ** 2
    return constants.hbar * scales.wave_number_k0 * constants.c


def control_parameter(scales: PhysicalScales,
                      constants: Constants = CODATA2018) -> float:
    """The dimensionless coupling xi = G_N E0 sigma / c^4.

    For a massive static particle this equals the Schwarzschild radius
    2 G_N m / c^2 divided by the particle size 2/sigma (algebraic identity:
    G_N (m c^2) sigma / c^4 = (2 G_N m / c^2) / (2 / sigma)).
    """
    return constants.G_N * rest_energy(scales, constants) * scales.sigma / constants.c ** 4


def decoherence_time(scales: PhysicalScales,
                     constants: Constants = CODATA2018) -> float:
    """Time after which the curvature contributions wash out.

    tau_m = m / (sigma^2 hbar) for massive particles, tau_k0 = 1/(sigma c)
    for massless ones, evaluated with this instance's own sigma.
    """
    if scales.regime is Regime.MASSIVE_STATIC:
        return scales.mass / (scales.sigma ** 2 * constants.hbar)
    return 1.0 / (scales.sigma * constants.c)


def derive(scales: PhysicalScales,
           constants: Constants = CODATA2018) -> DerivedScales:
    r_s = None
    if scales.regime is Regime.MASSIVE_STATIC:
        r_s = 2.0 * constants.G_N * scales.mass / constants.c ** 2
    return DerivedScales(
        xi=control_parameter(scales, constants),
        E0=rest_energy(scales, constants),
        tau=decoherence_time(scales, constants),
        particle_size=2.0 / scales.sigma,
        schwarzschild_radius=r_s,
    )


@dataclass(frozen=True)
class ValidityReport:
    regime: Regime
    xi: float
    E0: float
    tau: float
    particle_size: float
    regime_ratio: float
    ratio_threshold: float
    regime_ok: bool
    perturbative_ok: bool
    no_dynamical_gravity: bool
    schwarzschild_radius: float | None = None

    def as_dict(self) -> dict:
        d = {
            "regime": self.regime.value,
            "xi": self.xi,
            "E0_joules": self.E0,
            "tau_seconds": self.tau,
            "particle_size_m": self.particle_size,
            "regime_ratio": self.regime_ratio,
            "ratio_threshold": self.ratio_threshold,
            "regime_ok": self.regime_ok,
            "perturbative_ok": self.perturbative_ok,
            "no_dynamical_gravity": self.no_dynamical_gravity,
        }
        if self.schwarzschild_radius is not None:
            d["schwarzschild_radius_m"] = self.schwarzschild_radius
        return d


def validity_report(scales: PhysicalScales,
                    constants: Constants = CODATA2018,
                    ratio_threshold: float = 10.0) -> ValidityReport:
    """Summarize xi, the size comparison and the regime check.

    ``perturbative_ok`` requires xi < 1, which for massive particles is the
    statement that the Schwarzschild radius stays strictly below the
    particle size. The regime quality (ratio against ``ratio_threshold``)
    is reported separately as ``regime_ok``: it grades the closed-form
    expansions, not the perturbative setup itself. A vanishing xi (zero
    coupling or zero rest energy) is flagged as ``no_dynamical_gravity``:
    the perturbation then has no source.
    """
    d = derive(scales, constants)
    regime_ok = scales.regime_ratio(constants) >= ratio_threshold
    return ValidityReport(
        regime=scales.regime,
        xi=d.xi,
        E0=d.E0,
        tau=d.tau,
        particle_size=d.particle_size,
        regime_ratio=scales.regime_ratio(constants),
        ratio_threshold=ratio_threshold,
        regime_ok=regime_ok,
        perturbative_ok=bool(d.xi < 1.0),
        no_dynamical_gravity=bool(d.xi == 0.0),
        schwarzschild_radius=d.schwarzschild_radius,
    )
