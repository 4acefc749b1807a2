"""Independent oracles used by the test suite.

These deliberately avoid the production code paths: the Wootters
construction diagonalizes the spin-flipped matrix, the mode-integral
oracle is a plain dense Gauss-Legendre sum, and the bilinear oracle is
Monte-Carlo. Each exists to cross-check one production route.
"""

import numpy as np

_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_SYSY = np.kron(_SY, _SY)


def wootters_concurrence(rho):
    """Concurrence of a two-qubit density matrix via the spin-flip
    eigenvalues: C = max(0, l1 - l2 - l3 - l4)."""
    r = np.asarray(rho, dtype=complex)
    m = r @ _SYSY @ r.conj() @ _SYSY
    ev = np.linalg.eigvals(m).real
    lam = np.sort(np.sqrt(np.abs(ev)))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def negativity_from_matrix(rho):
    """Negativity from an explicit 4x4 matrix, own partial transpose."""
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    pt = r.transpose(0, 3, 2, 1).reshape(4, 4)
    lam = np.linalg.eigvalsh(pt)
    return float(np.sum(np.abs(lam[lam < 0])))


def mode_integral_gl(pair, site, x, t=0.0, n=72):
    """Dense Gauss-Legendre evaluation of the five mode integrals.

    Straight triple sum over a fixed tensor rule; shares no code with the
    adaptive integrator. Returns a dict keyed like the production path.
    """
    from entgrav.stress_energy import omega_tilde

    x = np.asarray(x, dtype=float)
    u, w = np.polynomial.legendre.leggauss(n)
    box = pair.profile.support_box()
    axes, wts = [], []
    for lo, hi in box:
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        axes.append(mid + half * u)
        wts.append(half * w)
    K = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    W = (wts[0][:, None, None] * wts[1][None, :, None]
         * wts[2][None, None, :]).reshape(-1)
    om = omega_tilde(K, pair.mass_tilde)
    base = (pair.profile.amplitude(K) * pair.phase(site, K[:, 2])
            * (2.0 * np.pi) ** -1.5 * om ** -0.5
            * np.exp(1j * (K @ x - om * t)) * W)
    return {
        "1": complex(base.sum()),
        "omega": complex((base * om).sum()),
        "kx": complex((base * K[:, 0]).sum()),
        "ky": complex((base * K[:, 1]).sum()),
        "kz": complex((base * K[:, 2]).sum()),
    }


def pearson_after_fit(values, shape):
    """Fit a single constant c (sign included) by least squares, then
    return (c, Pearson correlation of values against c * shape)."""
    values = np.asarray(values, dtype=float)
    shape = np.asarray(shape, dtype=float)
    c = float(np.dot(shape, values) / np.dot(shape, shape))
    r = float(np.corrcoef(values, c * shape)[0, 1])
    return c, r


def mc_bilinear(factor_a, factor_b, bracket, box_a, box_b, n_samples,
                seed):
    """Monte-Carlo estimate of the 6-d bilinear
    integral int int conj(A(k)) B(k') bracket(k, k') d^3k d^3k'.

    Returns (estimate, standard error)."""
    rng = np.random.default_rng(seed)
    lo_a = np.array([b[0] for b in box_a])
    hi_a = np.array([b[1] for b in box_a])
    lo_b = np.array([b[0] for b in box_b])
    hi_b = np.array([b[1] for b in box_b])
    vol = np.prod(hi_a - lo_a) * np.prod(hi_b - lo_b)
    k = lo_a + (hi_a - lo_a) * rng.random((n_samples, 3))
    kp = lo_b + (hi_b - lo_b) * rng.random((n_samples, 3))
    f = np.conj(factor_a(k)) * factor_b(kp) * bracket(k, kp)
    mean = f.mean()
    sigma = f.std(ddof=1) / np.sqrt(n_samples)
    return vol * mean, vol * abs(sigma)


def lattice_l2_norm(pair, site, weight, half_extent, spacing, nodes=None):
    """Spatial L2 norm of one mode integral from a Shannon-rate lattice.

    Valid because the integrals are band-limited by the profile support;
    the truncation to |x| <= half_extent loses only the sinc-squared tail.
    """
    from entgrav.stress_energy import mode_integral_grids

    ax = np.arange(-half_extent, half_extent + 0.5 * spacing, spacing)
    grids = mode_integral_grids(pair, site, (ax, ax, ax), 0.0, nodes)
    return float(np.sum(np.abs(grids[weight]) ** 2) * spacing ** 3)
