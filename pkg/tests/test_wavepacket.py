import numpy as np
import pytest

from entgrav.quadrature import QuadratureSpec, integrate_3d
from entgrav.wavepacket import (BOX_PEAK, GAUSSIAN_PEAK, Profile, ProfileKind,
                                Site, SitePair, position_density,
                                profile_eval, site_overlap)


def gauss(k0z=0.0):
    return Profile(ProfileKind.GAUSSIAN, (0.0, 0.0, k0z))


def box(k0z=0.0):
    return Profile(ProfileKind.BOX, (0.0, 0.0, k0z))


def test_gaussian_peak_value():
    # normalized peak: (2 pi)^(-3/4)
    assert profile_eval(gauss(), (0, 0, 0)) == pytest.approx(GAUSSIAN_PEAK,
                                                             rel=1e-15)
    assert GAUSSIAN_PEAK == pytest.approx(0.251979435538381, rel=1e-12)


def test_box_peak_and_support():
    p = box(k0z=3.0)
    assert profile_eval(p, (0, 0, 3.0)) == pytest.approx(1 / np.sqrt(8),
                                                         rel=1e-15)
    assert profile_eval(p, (2.0, 0, 3.0)) == 0.0      # outside support
    assert profile_eval(p, (1.0, 1.0, 4.0)) == BOX_PEAK  # closed cube edge


@pytest.mark.parametrize("profile", [gauss(), box(), gauss(5.0), box(5.0)])
def test_normalization(profile):
    def f(pts):
        a = profile.amplitude(pts)
        return a * a
    res = integrate_3d(f, profile.support_box())
    assert abs(res.value - 1.0) <= 1e-8


def test_overlap_identical_sites():
    with pytest.warns(UserWarning, match="coincide"):
        pair = SitePair(gauss(), 0.0)
    res = site_overlap(pair)
    assert abs(res.value - 1.0) <= 1e-8


@pytest.mark.parametrize("L", [0.5, 1.0, 2.0])
def test_gaussian_overlap_closed_form(L):
    res = site_overlap(SitePair(gauss(), L))
    exact = np.exp(-2.0 * L * L)
    assert abs(abs(res.value) - exact) <= 1e-6 * exact


@pytest.mark.parametrize("L", [np.pi, 2 * np.pi])
def test_box_overlap_vanishes(L):
    res = site_overlap(SitePair(box(), L))
    assert abs(res.value) < 1e-10


def test_box_nonorthogonal_separation_warns():
    with pytest.warns(UserWarning, match="orthogonal"):
        SitePair(box(), 1.5)


def test_invalid_pairs_rejected():
    with pytest.raises(ValueError):
        SitePair(gauss(), -1.0)
    with pytest.raises(ValueError):
        SitePair(gauss(), 1.0, mass_tilde=-2.0)


SCAN_SPEC = QuadratureSpec(rel_tol=1e-6, abs_tol=1e-10)


def test_box_density_peaks_at_site():
    pair = SitePair(box(), np.pi)
    zs = np.linspace(-2 * np.pi, 2 * np.pi, 41)
    dens = [position_density(pair, Site.B, (0.0, 0.0, z), SCAN_SPEC)
            for z in zs]
    zmax = zs[int(np.argmax(dens))]
    step = zs[1] - zs[0]
    assert abs(zmax - np.pi) <= step


def test_gaussian_density_site_discrimination():
    for L in (2.0, 3.0):
        pair = SitePair(gauss(), L)
        at_own = position_density(pair, Site.A, (0.0, 0.0, -L), SCAN_SPEC)
        at_other = position_density(pair, Site.A, (0.0, 0.0, +L), SCAN_SPEC)
        assert at_own > at_other


def test_density_nonnegative():
    pair = SitePair(gauss(5.0), 1.0)
    rng = np.random.default_rng(3)
    for _ in range(3):
        x = rng.uniform(-3, 3, size=3)
        assert position_density(pair, Site.A, x, SCAN_SPEC) >= 0.0


def test_mirror_symmetry_of_sites():
    # with k0 = 0 site A at (x, y, z) mirrors site B at (x, y, -z)
    pair = SitePair(box(), np.pi)
    for x in [(0.2, -0.4, 1.1), (0.0, 0.0, 2.5), (1.0, 0.3, -0.7)]:
        a = position_density(pair, Site.A, x)
        b = position_density(pair, Site.B, (x[0], x[1], -x[2]))
        assert a == pytest.approx(b, rel=1e-8, abs=1e-12)


def test_profile_validation():
    with pytest.raises(ValueError):
        Profile(ProfileKind.BOX, (0.0, np.inf, 0.0))
    with pytest.raises(ValueError):
        Profile(ProfileKind.BOX, (0.0, 0.0))
