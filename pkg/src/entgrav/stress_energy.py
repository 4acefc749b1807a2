"""Normal-ordered stress-energy expectation values of the two-site states.

Everything is assembled from five mode integrals per site,

    I_w(site, x, t) = int d^3k F(k) e^{-+ i L k_z} w(k) u_k(x, t),
    u_k = (2 pi)^(-3/2) omega^(-1/2) exp[i (k.x - omega t)],
    w in {1, omega, k_x, k_y, k_z},    omega = sqrt(k.k + m^2),

evaluated by adaptive quadrature over the profile support (or by a fixed
Gauss-Legendre tensor rule on cartesian point sets, see
:func:`mode_integral_grids`). All momenta and coordinates are in packet
width units.

Normalization and sign conventions. The trace bilinear

    tr(bra, ket) = -[ -conj(I_om) I_om' + sum_i conj(I_ki) I_ki'
                      + 2 m^2 conj(I_1) I_1' ]

is the normative anchor. Two inequivalent sign choices for the mass term
circulate (a direct canonical-tensor derivation yields -2[(k.k') - 2 m^2]
instead of -[(k.k') + 2 m^2]); this package fixes the latter and defines
the full components as

    T_munu = 1/2 [conj(J_mu) J_nu' + conj(J_nu) J_mu']
             - 1/2 eta_munu [ (J.J') + m^2 conj(I_1) I_1' ],
    J_0 = -I_om,  J_i = I_ki,

so that the eta-contraction of the components reproduces tr(bra, ket)
identically, and the space integral of the diagonal T_00 equals the mean
packet energy (both verified in the test suite).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .qstate import TwoSiteState
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_box_multi
from .wavepacket import Site, SitePair

__all__ = [
    "WEIGHT_NAMES",
    "ETA",
    "OSCILLATION_BUDGET",
    "ModeIntegralSet",
    "SourceTensor",
    "StressTerms",
    "DecayProfile",
    "omega_tilde",
    "mode_integrals",
    "bilinear_trace",
    "bilinear_component",
    "stress_terms",
    "eta_contraction",
    "source_tensor",
    "assemble_source",
    "decay_profile",
    "box_trace_closed_form",
    "mode_integral_grids",
    "trace_grids",
    "source_grids",
    "SourceGrids",
]

WEIGHT_NAMES = ("1", "omega", "kx", "ky", "kz")

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])

# Largest |t| the adaptive rule is asked to resolve; beyond this the
# oscillation e^{-i omega t} needs dedicated oscillatory methods.
OSCILLATION_BUDGET = 500.0


def omega_tilde(k, mass_tilde: float):
    """Dispersion sqrt(k.k + m^2) for k of shape (..., 3)."""
    k = np.asarray(k, dtype=float)
    return np.sqrt(np.sum(k * k, axis=-1) + mass_tilde ** 2)


@dataclass(frozen=True)
class ModeIntegralSet:
    """The five mode integrals of one site at one spacetime point."""

    site: Site
    point: tuple  # (t, (x, y, z))
    values: Mapping[str, complex]
    errors: Mapping[str, float]
    error: float
    converged: bool

    def J(self, mu: int):
        """Covariant current J_mu: J_0 = -I_omega, J_i = I_{k_i}."""
        return _J(self.values, mu)


def _J(values, mu: int):
    if mu == 0:
        return -values["omega"]
    return values[("kx", "ky", "kz")[mu - 1]]


def _mode_integrand(pair: SitePair, site: Site, x, t: float):
    x = np.asarray(x, dtype=float)
    m = pair.mass_tilde
    norm = (2.0 * np.pi) ** -1.5

    def f(pts):
        om = omega_tilde(pts, m)
        base = (pair.profile.amplitude(pts) * pair.phase(site, pts[:, 2])
                * norm * om ** -0.5 * np.exp(1j * (pts @ x - om * t)))
        return np.stack(
            [base, base * om, base * pts[:, 0], base * pts[:, 1],
             base * pts[:, 2]], axis=1)

    return f


def mode_integrals(pair: SitePair, site: Site, x_tilde, t_tilde: float = 0.0,
                   spec: QuadratureSpec | None = None) -> ModeIntegralSet:
    """Evaluate I_w for all five weights in one adaptive pass.

    The channels share the panel decomposition, so the relative phases
    between weights are resolved consistently.
    """
    spec = spec or DEFAULT_SPEC
    if abs(t_tilde) > OSCILLATION_BUDGET:
        raise ValueError(f"|t| = {abs(t_tilde)} exceeds the oscillation "
                         f"budget {OSCILLATION_BUDGET}")
    x = np.asarray(x_tilde, dtype=float)
    res = integrate_box_multi(_mode_integrand(pair, site, x, t_tilde),
                              pair.profile.support_box(), spec,
                              nch=len(WEIGHT_NAMES))
    values = dict(zip(WEIGHT_NAMES, (complex(v) for v in res.values)))
    errors = dict(zip(WEIGHT_NAMES, (float(e) for e in res.errors)))
    return ModeIntegralSet(site=site, point=(float(t_tilde), tuple(x)),
                           values=values, errors=errors,
                           error=float(res.errors.max()),
                           converged=res.converged)


# ---------------------------------------------------------------------------
# Bilinear assembly. These work elementwise, so `values` mappings may hold
# complex scalars (point evaluations) or ndarrays (grid evaluations).

def _lorentz_dot(bra_values, ket_values):
    # eta^{rho sigma} conj(J_rho) J'_sigma
    dot = -np.conj(bra_values["omega"]) * ket_values["omega"]
    for name in ("kx", "ky", "kz"):
        dot = dot + np.conj(bra_values[name]) * ket_values[name]
    return dot


def trace_from_values(bra_values, ket_values, mass_tilde: float):
    """The normative trace bilinear; see the module docstring."""
    return -(_lorentz_dot(bra_values, ket_values)
             + 2.0 * mass_tilde ** 2
             * np.conj(bra_values["1"]) * ket_values["1"])


def component_from_values(bra_values, ket_values, mu: int, nu: int,
                          mass_tilde: float):
    """T_munu bilinear; eta-contraction reproduces trace_from_values."""
    jb_mu, jb_nu = _J(bra_values, mu), _J(bra_values, nu)
    jk_mu, jk_nu = _J(ket_values, mu), _J(ket_values, nu)
    sym = 0.5 * (np.conj(jb_mu) * jk_nu + np.conj(jb_nu) * jk_mu)
    iso = 0.5 * (_lorentz_dot(bra_values, ket_values)
                 + mass_tilde ** 2 * np.conj(bra_values["1"]) * ket_values["1"])
    return sym - ETA[mu, nu] * iso


def eta_contraction(components):
    """eta^{mu nu} T_munu for a (4, 4, ...) component array."""
    return (-components[0, 0] + components[1, 1] + components[2, 2]
            + components[3, 3])


def components_from_values(bra_values, ket_values, mass_tilde: float):
    """All sixteen components; symmetric in (mu, nu) by construction."""
    shape = np.shape(np.asarray(bra_values["1"]))
    out = np.empty((4, 4) + shape, dtype=complex)
    for mu in range(4):
        for nu in range(mu, 4):
            val = component_from_values(bra_values, ket_values, mu, nu,
                                        mass_tilde)
            out[mu, nu] = val
            out[nu, mu] = val
    return out


def bilinear_trace(pair: SitePair, bra_site: Site, ket_site: Site, x_tilde,
                   t_tilde: float = 0.0,
                   spec: QuadratureSpec | None = None) -> complex:
    """<bra|:T^mu_mu:|ket> at one spacetime point."""
    bra = mode_integrals(pair, bra_site, x_tilde, t_tilde, spec)
    ket = (bra if ket_site is bra_site
           else mode_integrals(pair, ket_site, x_tilde, t_tilde, spec))
    _warn_unconverged("bilinear_trace", bra, ket)
    return complex(trace_from_values(bra.values, ket.values, pair.mass_tilde))


def bilinear_component(pair: SitePair, bra_site: Site, ket_site: Site,
                       mu: int, nu: int, x_tilde, t_tilde: float = 0.0,
                       spec: QuadratureSpec | None = None) -> complex:
    """<bra|:T_munu:|ket> at one spacetime point."""
    if not (0 <= mu <= 3 and 0 <= nu <= 3):
        raise ValueError("tensor indices must lie in 0..3")
    bra = mode_integrals(pair, bra_site, x_tilde, t_tilde, spec)
    ket = (bra if ket_site is bra_site
           else mode_integrals(pair, ket_site, x_tilde, t_tilde, spec))
    _warn_unconverged("bilinear_component", bra, ket)
    return complex(component_from_values(bra.values, ket.values, mu, nu,
                                         pair.mass_tilde))


def _warn_unconverged(what, *sets):
    for s in sets:
        if not s.converged:
            warnings.warn(f"{what}: mode integrals at {s.point} not converged "
                          f"(error estimate {s.error:.2e})", stacklevel=3)


@dataclass(frozen=True)
class StressTerms:
    """The three independent bilinears at one point: diagonal site A
    (<01|:T:|01>), diagonal site B (<10|:T:|10>) and off-diagonal
    (<01|:T:|10>), as 4x4 component matrices plus their traces."""

    point: tuple
    d01: np.ndarray
    d10: np.ndarray
    d0110: np.ndarray
    trace_d01: complex
    trace_d10: complex
    trace_d0110: complex
    error: float
    converged: bool


def stress_terms(pair: SitePair, x_tilde, t_tilde: float = 0.0,
                 spec: QuadratureSpec | None = None) -> StressTerms:
    """Evaluate both sites' mode integrals once and assemble all terms."""
    a = mode_integrals(pair, Site.A, x_tilde, t_tilde, spec)
    b = mode_integrals(pair, Site.B, x_tilde, t_tilde, spec)
    m = pair.mass_tilde
    return StressTerms(
        point=a.point,
        d01=components_from_values(a.values, a.values, m),
        d10=components_from_values(b.values, b.values, m),
        d0110=components_from_values(a.values, b.values, m),
        trace_d01=complex(trace_from_values(a.values, a.values, m)),
        trace_d10=complex(trace_from_values(b.values, b.values, m)),
        trace_d0110=complex(trace_from_values(a.values, b.values, m)),
        error=max(a.error, b.error),
        converged=a.converged and b.converged,
    )


@dataclass(frozen=True)
class SourceTensor:
    """State-weighted source <:T_munu:> at one point, dimensionless.

    ``components`` includes the coherence contribution; ``coherence_part``
    is the 2 Re(beta <01|:T:|10>) piece alone, which vanishes identically
    for beta = 0. ``trace`` is the direct trace-path value and equals the
    eta-contraction of ``components`` by construction.
    """

    point: tuple
    components: np.ndarray
    coherence_part: np.ndarray
    trace: float
    error: float
    converged: bool


def assemble_source(alpha: float, beta: complex,
                    terms: StressTerms) -> SourceTensor:
    """Weight the three bilinears by the state: alpha d01 + (1-alpha) d10
    + 2 Re(beta d0110). ``beta`` may be complex; its phase rotates the
    coherence term before the real part is taken."""
    if (alpha - 0.5) ** 2 + abs(beta) ** 2 > 0.25 + 1e-15:
        raise ValueError("(alpha-1/2)^2 + |beta|^2 <= 1/4 violated")
    beta = complex(beta)
    coher = 2.0 * np.real(beta * terms.d0110)
    comps = alpha * terms.d01.real + (1.0 - alpha) * terms.d10.real + coher
    comps = 0.5 * (comps + comps.T)  # exact symmetry
    coher = 0.5 * (coher + coher.T)
    trace = (alpha * terms.trace_d01.real
             + (1.0 - alpha) * terms.trace_d10.real
             + 2.0 * np.real(beta * terms.trace_d0110))
    return SourceTensor(point=terms.point, components=comps,
                        coherence_part=coher, trace=float(trace),
                        error=terms.error, converged=terms.converged)


def source_tensor(state: TwoSiteState, pair: SitePair, x_tilde,
                  t_tilde: float = 0.0, spec: QuadratureSpec | None = None,
                  beta: complex | None = None) -> SourceTensor:
    """Source tensor for the state rho(alpha, beta) at one point.

    ``beta`` overrides the state's real coherence parameter with a complex
    value (same positivity constraint on |beta|).
    """
    terms = stress_terms(pair, x_tilde, t_tilde, spec)
    b = state.beta if beta is None else beta
    return assemble_source(state.alpha, b, terms)


@dataclass(frozen=True)
class DecayProfile:
    """Source-trace time series at a fixed point."""

    point: tuple
    times: tuple
    values: tuple        # signed source trace at each time
    converged: tuple

    @property
    def magnitudes(self):
        return tuple(abs(v) for v in self.values)


def decay_profile(state: TwoSiteState, pair: SitePair, x_tilde, times,
                  spec: QuadratureSpec | None = None,
                  beta: complex | None = None) -> DecayProfile:
    """Source trace at ``x_tilde`` for each time in ``times``.

    The t = 0 entry coincides with the assembled source trace by
    definition. Non-converged evaluations are flagged, not raised.
    """
    times = [float(t) for t in times]
    for t in times:
        if abs(t) > OSCILLATION_BUDGET:
            raise ValueError(f"|t| = {abs(t)} exceeds the oscillation "
                             f"budget {OSCILLATION_BUDGET}")
    b = state.beta if beta is None else beta
    values, flags = [], []
    point = None
    for t in times:
        terms = stress_terms(pair, x_tilde, t, spec)
        src = assemble_source(state.alpha, b, terms)
        point = src.point
        values.append(src.trace)
        flags.append(src.converged)
    return DecayProfile(point=point, times=tuple(times),
                        values=tuple(values), converged=tuple(flags))


# ---------------------------------------------------------------------------
# Closed-form box shapes (leading order in 1/m or 1/k0), used as shape
# oracles only. The overall constant is fitted by the caller since the
# functions are defined up to proportionality.

def _sinc(x):
    return np.sinc(np.asarray(x) / np.pi)


def box_trace_closed_form(term: str, x_tilde, L_tilde: float):
    """Leading-order spatial shape of a box-profile trace bilinear.

    term is one of "D10" (sinc^2 x sinc^2 y sinc^2(z - L)), "D01" (same
    with z + L) or "D0110" (sinc^2 x sinc^2 y sin^2(z) / (L^2 - z^2), whose
    poles at z = +-L are removable with value 0 because sin(L) = 0 for
    L = n pi). Requires L = n pi with integer n >= 1.
    """
    n = L_tilde / np.pi
    if not np.isfinite(L_tilde) or L_tilde <= 0 or abs(n - round(n)) > 1e-9:
        raise ValueError("closed forms require L = n*pi with integer n >= 1")
    x = np.asarray(x_tilde, dtype=float)
    xt, yt, zt = x[..., 0], x[..., 1], x[..., 2]
    perp = _sinc(xt) ** 2 * _sinc(yt) ** 2
    if term == "D10":
        return perp * _sinc(zt - L_tilde) ** 2
    if term == "D01":
        return perp * _sinc(zt + L_tilde) ** 2
    if term == "D0110":
        den = L_tilde ** 2 - zt ** 2
        near_pole = np.abs(np.abs(zt) - L_tilde) < 1e-8
        axial = np.where(near_pole, 0.0,
                         np.sin(zt) ** 2 / np.where(near_pole, 1.0, den))
        return perp * axial
    raise ValueError(f"unknown term {term!r}; expected D01, D10 or D0110")


# ---------------------------------------------------------------------------
# Fast cartesian-set evaluation. For points forming a cartesian product
# {xs} x {ys} x {zs} the plane-wave factor separates per coordinate axis,
# so the mode integrals over a fixed Gauss-Legendre tensor rule reduce to
# three small tensor contractions per weight. einsum with optimize=False
# keeps the summation order fixed (bit-reproducible, BLAS-free).

def _gl_nodes(lo: float, hi: float, n: int):
    u, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return mid + half * u, half * w


def _auto_nodes(half_width: float, max_coord: float, t: float) -> int:
    # phase range per axis: k-halfwidth * |x| plus omega variation * t
    theta = half_width * (max_coord + abs(t))
    return max(32, int(np.ceil(theta)) + 40)


def mode_integral_grids(pair: SitePair, site: Site, axes, t_tilde: float = 0.0,
                        nodes: int | None = None) -> dict:
    """I_w arrays of shape (len(xs), len(ys), len(zs)) for all weights.

    ``axes`` is the coordinate triple (xs, ys, zs). The rule size is chosen
    from the oscillation budget per axis unless ``nodes`` is given.
    """
    xs, ys, zs = (np.atleast_1d(np.asarray(a, dtype=float)) for a in axes)
    if abs(t_tilde) > OSCILLATION_BUDGET:
        raise ValueError(f"|t| = {abs(t_tilde)} exceeds the oscillation "
                         f"budget {OSCILLATION_BUDGET}")
    box = pair.profile.support_box()
    m = pair.mass_tilde
    coords = (xs, ys, zs)
    k_axes, k_wts = [], []
    for (lo, hi), c in zip(box, coords):
        n = nodes or _auto_nodes(0.5 * (hi - lo),
                                 float(np.max(np.abs(c))) if c.size else 0.0,
                                 t_tilde)
        k, w = _gl_nodes(lo, hi, n)
        k_axes.append(k)
        k_wts.append(w)
    ka, kb, kc = k_axes
    pts = np.stack(np.meshgrid(ka, kb, kc, indexing="ij"), axis=-1)
    om = omega_tilde(pts, m)
    wt3 = (k_wts[0][:, None, None] * k_wts[1][None, :, None]
           * k_wts[2][None, None, :])
    base = (pair.profile.amplitude(pts) * pair.phase(site, pts[..., 2])
            * (2.0 * np.pi) ** -1.5 * om ** -0.5
            * np.exp(-1j * om * t_tilde) * wt3)
    ex = np.exp(1j * np.outer(ka, xs))
    ey = np.exp(1j * np.outer(kb, ys))
    ez = np.exp(1j * np.outer(kc, zs))
    out = {}
    for name, w in (("1", None), ("omega", om), ("kx", pts[..., 0]),
                    ("ky", pts[..., 1]), ("kz", pts[..., 2])):
        W = base if w is None else base * w
        t1 = np.einsum("abc,ax->bcx", W, ex, optimize=False)
        t2 = np.einsum("bcx,by->cxy", t1, ey, optimize=False)
        out[name] = np.einsum("cxy,cz->xyz", t2, ez, optimize=False)
    return out


def trace_grids(pair: SitePair, axes, t_tilde: float = 0.0,
                nodes: int | None = None):
    """Trace bilinears of all three terms on a cartesian point set.

    Returns (D01, D10, D0110) arrays; the diagonal ones are real.
    """
    a = mode_integral_grids(pair, Site.A, axes, t_tilde, nodes)
    b = mode_integral_grids(pair, Site.B, axes, t_tilde, nodes)
    m = pair.mass_tilde
    return (trace_from_values(a, a, m).real,
            trace_from_values(b, b, m).real,
            trace_from_values(a, b, m))


@dataclass(frozen=True)
class SourceGrids:
    """Source tensor sampled on a cartesian grid."""

    axes: tuple
    t: float
    components: np.ndarray        # (4, 4, nx, ny, nz), real
    coherence_part: np.ndarray    # (4, 4, nx, ny, nz), real
    trace: np.ndarray             # (nx, ny, nz), real


def source_grids(state: TwoSiteState, pair: SitePair, axes,
                 t_tilde: float = 0.0, nodes: int | None = None,
                 beta: complex | None = None) -> SourceGrids:
    """Grid-sampled source components, coherence part and trace."""
    b = complex(state.beta if beta is None else beta)
    if (state.alpha - 0.5) ** 2 + abs(b) ** 2 > 0.25 + 1e-15:
        raise ValueError("(alpha-1/2)^2 + |beta|^2 <= 1/4 violated")
    ia = mode_integral_grids(pair, Site.A, axes, t_tilde, nodes)
    ib = mode_integral_grids(pair, Site.B, axes, t_tilde, nodes)
    m = pair.mass_tilde
    d01 = components_from_values(ia, ia, m)
    d10 = components_from_values(ib, ib, m)
    d0110 = components_from_values(ia, ib, m)
    coher = 2.0 * np.real(b * d0110)
    comps = state.alpha * d01.real + (1.0 - state.alpha) * d10.real + coher
    trace = (state.alpha * trace_from_values(ia, ia, m).real
             + (1.0 - state.alpha) * trace_from_values(ib, ib, m).real
             + 2.0 * np.real(b * trace_from_values(ia, ib, m)))
    xs, ys, zs = (np.atleast_1d(np.asarray(a, dtype=float)) for a in axes)
    return SourceGrids(axes=(xs, ys, zs), t=float(t_tilde),
                       components=comps, coherence_part=coher, trace=trace)
