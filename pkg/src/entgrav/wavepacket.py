"""Momentum-space wave-packet profiles and the two localized site states.

All momenta are dimensionless (units of the packet width sigma) and all
lengths are in units of 1/sigma, so the width never appears explicitly.
The peak momentum k0 is stored as a 3-vector but is conventionally aligned
with the z axis.

The two site states are built from one profile F with opposite phases:

    site A  (state |01>)  amplitude F(k) exp(+i L k_z), centred at z = -L
    site B  (state |10>)  amplitude F(k) exp(-i L k_z), centred at z = +L

The sign convention is fixed so that densities built on site B peak at
z = +L; the opposite global choice changes nothing observable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .quadrature import DEFAULT_SPEC, IntegralResult, QuadratureSpec, integrate_3d

__all__ = [
    "ProfileKind",
    "Profile",
    "Site",
    "SitePair",
    "profile_eval",
    "site_overlap",
    "position_density",
    "GAUSSIAN_PEAK",
    "BOX_PEAK",
    "GAUSSIAN_CUT",
]

# Normalized peak amplitudes: (2 pi)^(-3/4) for the Gaussian, 8^(-1/2) for
# the box (support volume 8, so int |F|^2 = 1 for both).
GAUSSIAN_PEAK = (2.0 * np.pi) ** -0.75
BOX_PEAK = 8.0 ** -0.5

# Per-axis truncation of the Gaussian integration box, in widths. The
# bilinear products F(k) F(k') sampled beyond this carry mass < 1e-28.
GAUSSIAN_CUT = 8.0


class ProfileKind(Enum):
    GAUSSIAN = "gaussian"
    BOX = "box"


@dataclass(frozen=True)
class Profile:
    """Momentum-space profile F(k), unit-normalized: int |F|^2 d^3k = 1."""

    kind: ProfileKind
    k0_tilde: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        k0 = tuple(float(v) for v in self.k0_tilde)
        if len(k0) != 3 or not all(np.isfinite(k0)):
            raise ValueError("k0_tilde must be a finite 3-vector")
        object.__setattr__(self, "k0_tilde", k0)

    def amplitude(self, k):
        """Vectorized F(k) for k of shape (..., 3)."""
        k = np.asarray(k, dtype=float)
        q = k - np.asarray(self.k0_tilde)
        if self.kind is ProfileKind.GAUSSIAN:
            return GAUSSIAN_PEAK * np.exp(-0.25 * np.sum(q * q, axis=-1))
        inside = np.all(np.abs(q) <= 1.0, axis=-1)  # closed cube
        return np.where(inside, BOX_PEAK, 0.0)

    def support_box(self):
        """Integration box: the exact support cube for the box profile,
        the +-GAUSSIAN_CUT truncation for the Gaussian."""
        half = 1.0 if self.kind is ProfileKind.BOX else GAUSSIAN_CUT
        return tuple((c - half, c + half) for c in self.k0_tilde)


def profile_eval(profile: Profile, k_tilde) -> float:
    """Amplitude of the profile at one momentum point."""
    return float(profile.amplitude(np.asarray(k_tilde, dtype=float)))


class Site(Enum):
    A = "A"  # |01>, centred at z = -L
    B = "B"  # |10>, centred at z = +L


_PHASE_SIGN = {Site.A: +1.0, Site.B: -1.0}


@dataclass(frozen=True)
class SitePair:
    """Two localized single-particle states at z = -L and z = +L.

    ``mass_tilde`` is m/sigma (0 in the massless regime). For the box
    profile, exact orthogonality of the two sites needs L = n pi; other
    separations are accepted with a warning since the overlap is then
    merely small, not zero. L = 0 is allowed but makes the entanglement
    interpretation void (the sites coincide).
    """

    profile: Profile
    L_tilde: float
    mass_tilde: float = 0.0

    def __post_init__(self):
        if self.L_tilde < 0 or not np.isfinite(self.L_tilde):
            raise ValueError("L_tilde must be finite and >= 0")
        if self.mass_tilde < 0 or not np.isfinite(self.mass_tilde):
            raise ValueError("mass_tilde must be finite and >= 0")
        if self.L_tilde == 0.0:
            warnings.warn("L_tilde = 0: sites coincide, entanglement "
                          "interpretation is void", stacklevel=2)
        elif self.profile.kind is ProfileKind.BOX:
            n = self.L_tilde / np.pi
            if abs(n - round(n)) > 1e-9:
                warnings.warn(
                    f"box profile sites are orthogonal only for L = n*pi; "
                    f"L = {self.L_tilde} gives a nonzero overlap",
                    stacklevel=2)

    def phase(self, site: Site, kz):
        """exp(-+ i L k_z): + for site A, - for site B."""
        return np.exp(1j * _PHASE_SIGN[site] * self.L_tilde * np.asarray(kz))


def site_overlap(pair: SitePair,
                 spec: QuadratureSpec | None = None) -> IntegralResult:
    """<10|01> = int |F(k)|^2 exp(-2 i L k_z) d^3k, by quadrature.

    For the Gaussian profile the modulus equals exp(-2 L^2); for the box
    profile with L = n pi it vanishes.
    """
    spec = spec or DEFAULT_SPEC

    def f(pts):
        amp = pair.profile.amplitude(pts)
        return amp * amp * np.exp(-2j * pair.L_tilde * pts[:, 2])

    return integrate_3d(f, pair.profile.support_box(), spec)


def position_density(pair: SitePair, site: Site, x_tilde,
                     spec: QuadratureSpec | None = None) -> float:
    """|psi(x)|^2 of one site's packet.

    psi(x) = (2 pi)^(-3/2) int F(k) exp(-+ i L k_z) exp(i k.x) d^3k; the
    density peaks at the site's position and integrates to 1.
    """
    spec = spec or DEFAULT_SPEC
    x = np.asarray(x_tilde, dtype=float)

    def f(pts):
        return (pair.profile.amplitude(pts) * pair.phase(site, pts[:, 2])
                * np.exp(1j * (pts @ x)))

    res = integrate_3d(f, pair.profile.support_box(), spec)
    if not res.converged:
        warnings.warn(f"position_density quadrature did not converge "
                      f"(error estimate {res.error_estimate:.2e})", stacklevel=2)
    return float(abs(res.value) ** 2 / (2.0 * np.pi) ** 3)
