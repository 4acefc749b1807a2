"""First-order curvature outputs: the Ricci-scalar field and the static
linearized metric perturbation.

With the dimensionless first-order Einstein equation G_munu = -8 pi S_munu
and R = -G^mu_mu, the Ricci scalar is R = +8 pi S^mu_mu. For the static
snapshot the metric is obtained in Lorenz gauge through the trace-reversed
perturbation, where each component decouples into a Poisson equation

    lap hbar_munu = -16 pi S_munu,

solved with free-space (isolated) boundary conditions by zero-padded
spectral convolution against the 1/(4 pi r) kernel. The gauge choice and
the static approximation are modeling decisions of this package.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .qstate import TwoSiteState
from .quadrature import QuadratureSpec
from .stress_energy import source_grids, source_tensor
from .wavepacket import SitePair

__all__ = [
    "Grid",
    "Field3D",
    "CUBE_SELF_INTEGRAL",
    "sample_field",
    "ricci_scalar",
    "ricci_field",
    "solve_static_poisson",
    "greens_oracle",
    "static_metric_perturbation",
]

# Integral of 1/|u| over the centred unit cube (closed form via the
# corner-potential formula); fixes the cell-averaged kernel self-value.
CUBE_SELF_INTEGRAL = 2.0 * (3.0 * np.log((1.0 + np.sqrt(3.0)) / np.sqrt(2.0))
                            - np.pi / 4.0)

# A source is considered boundary-safe when its boundary magnitude is below
# this fraction of the interior maximum.
BOUNDARY_FRACTION = 1e-3


@dataclass(frozen=True)
class Grid:
    """Uniform cartesian grid: per-axis extents and points per axis."""

    extents: tuple  # ((xmin, xmax), (ymin, ymax), (zmin, zmax))
    n: int

    def __post_init__(self):
        if self.n < 8:
            raise ValueError("grid needs n >= 8 points per axis")
        ext = tuple((float(lo), float(hi)) for lo, hi in self.extents)
        if len(ext) != 3 or not all(np.isfinite(lo) and np.isfinite(hi)
                                    and lo < hi for lo, hi in ext):
            raise ValueError("extents must be three finite (lo, hi) pairs")
        object.__setattr__(self, "extents", ext)

    @classmethod
    def cube(cls, half_extent: float, n: int) -> "Grid":
        e = (-float(half_extent), float(half_extent))
        return cls((e, e, e), n)

    def axes(self):
        return tuple(np.linspace(lo, hi, self.n) for lo, hi in self.extents)

    def spacing(self):
        return tuple((hi - lo) / (self.n - 1) for lo, hi in self.extents)


@dataclass(frozen=True)
class Field3D:
    """Scalar field sampled on a grid (one instance per tensor component)."""

    grid: Grid
    data: np.ndarray
    label: str = ""
    flags: tuple = ()

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        n = self.grid.n
        if data.shape != (n, n, n):
            raise ValueError(f"data shape {data.shape} does not match grid "
                             f"({n}, {n}, {n})")
        if not np.all(np.isfinite(data)):
            raise ValueError("field data must be finite everywhere")
        object.__setattr__(self, "data", data)


def sample_field(fieldfn, grid: Grid, threads: int = 1,
                 label: str = "") -> Field3D:
    """Evaluate ``fieldfn(point) -> float`` at every grid node.

    Nodes are assembled in C order regardless of ``threads``, so the result
    is identical for any worker count. A non-finite sample aborts with the
    offending node index.
    """
    xs, ys, zs = grid.axes()
    nodes = [(i, j, k) for i in range(grid.n) for j in range(grid.n)
             for k in range(grid.n)]

    def at(node):
        i, j, k = node
        return fieldfn(np.array([xs[i], ys[j], zs[k]]))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(at, nodes, chunksize=256))
    else:
        values = [at(node) for node in nodes]

    data = np.empty((grid.n,) * 3)
    for node, v in zip(nodes, values):
        if not np.isfinite(v):
            raise ValueError(f"non-finite field sample at node {node}")
        data[node] = v
    return Field3D(grid=grid, data=data, label=label)


def ricci_scalar(state: TwoSiteState, pair: SitePair, x_tilde,
                 t_tilde: float = 0.0, spec: QuadratureSpec | None = None,
                 beta: complex | None = None) -> float:
    """First-order Ricci scalar at one point: 8 pi times the source trace."""
    src = source_tensor(state, pair, x_tilde, t_tilde, spec, beta=beta)
    return 8.0 * np.pi * src.trace


def ricci_field(state: TwoSiteState, pair: SitePair, grid: Grid,
                t_tilde: float = 0.0, nodes: int | None = None,
                beta: complex | None = None) -> Field3D:
    """Ricci scalar sampled on a grid via the fast cartesian evaluation."""
    src = source_grids(state, pair, grid.axes(), t_tilde, nodes, beta=beta)
    return Field3D(grid=grid, data=8.0 * np.pi * src.trace, label="ricci")


def _kernel_value(displacement, h: float):
    """Discrete free-space kernel: potential response of one unit-strength
    cell (source value 1/h^3). Off-cell it is h^3/(4 pi r); the self cell
    uses the cell average of 1/(4 pi r)."""
    r = np.sqrt(np.sum(np.square(displacement), axis=-1))
    self_val = h * h * CUBE_SELF_INTEGRAL / (4.0 * np.pi)
    return np.where(r > 0, h ** 3 / (4.0 * np.pi * np.where(r > 0, r, 1.0)),
                    self_val)


def _check_boundary(data, label):
    interior = np.abs(data).max()
    if interior == 0:
        return ()
    edge = np.concatenate([
        np.abs(data[0]).ravel(), np.abs(data[-1]).ravel(),
        np.abs(data[:, 0]).ravel(), np.abs(data[:, -1]).ravel(),
        np.abs(data[:, :, 0]).ravel(), np.abs(data[:, :, -1]).ravel()])
    if edge.max() > BOUNDARY_FRACTION * interior:
        warnings.warn(
            f"source {label!r} does not decay at the grid boundary "
            f"(edge/interior = {edge.max() / interior:.2e}); the free-space "
            "solution will be degraded", stacklevel=3)
        return ("non_decaying_source",)
    return ()


def solve_static_poisson(source: Field3D) -> Field3D:
    """Free-space solution of lap(u) = -source.

    Zero-padded spectral convolution with the 1/(4 pi r) kernel; the mean
    at infinity is zero by construction. Anisotropic spacings are allowed
    as long as they are equal (cubic cells), which is what the cell-average
    regularization assumes.
    """
    hx, hy, hz = source.grid.spacing()
    if not (np.isclose(hx, hy) and np.isclose(hy, hz)):
        raise ValueError("solve_static_poisson requires cubic cells")
    flags = _check_boundary(source.data, source.label)
    n = source.grid.n
    h = hx
    idx = np.arange(2 * n)
    d = np.where(idx <= n, idx, idx - 2 * n).astype(float) * h
    disp = np.stack(np.meshgrid(d, d, d, indexing="ij"), axis=-1)
    kernel = _kernel_value(disp, h)
    padded = np.zeros((2 * n,) * 3)
    padded[:n, :n, :n] = source.data
    shape = (2 * n,) * 3
    u = np.fft.irfftn(np.fft.rfftn(kernel, s=shape, axes=(0, 1, 2))
                      * np.fft.rfftn(padded, s=shape, axes=(0, 1, 2)),
                      s=shape, axes=(0, 1, 2))[:n, :n, :n]
    return Field3D(grid=source.grid, data=u,
                   label=f"poisson({source.label})", flags=flags)


def greens_oracle(source: Field3D) -> Field3D:
    """Direct O(N^2) convolution with the same discretized kernel.

    Validation oracle for :func:`solve_static_poisson`; restricted to
    n <= 32 grids. Nonzero source cells are visited in C order.
    """
    n = source.grid.n
    if n > 32:
        raise ValueError("greens_oracle is restricted to grids with n <= 32")
    hx, hy, hz = source.grid.spacing()
    if not (np.isclose(hx, hy) and np.isclose(hy, hz)):
        raise ValueError("greens_oracle requires cubic cells")
    h = hx
    xs, ys, zs = source.grid.axes()
    X, Y, Z = np.meshgrid(xs, ys, zs, indexing="ij")
    out = np.zeros_like(source.data)
    for i, j, k in np.argwhere(source.data != 0.0):
        disp = np.stack([X - xs[i], Y - ys[j], Z - zs[k]], axis=-1)
        out += source.data[i, j, k] * _kernel_value(disp, h)
    return Field3D(grid=source.grid, data=out,
                   label=f"oracle({source.label})")


_COMPONENTS = [(mu, nu) for mu in range(4) for nu in range(mu, 4)]


def static_metric_perturbation(state: TwoSiteState, pair: SitePair,
                               grid: Grid, t_tilde: float = 0.0,
                               nodes: int | None = None,
                               beta: complex | None = None) -> dict:
    """Trace-reversed perturbation hbar_munu on a grid, one Poisson solve
    per independent component.

    The source is the t = 0 snapshot unless another time is requested (the
    result is then a labeled snapshot, not a solution of the full
    time-dependent problem). Returns a dict keyed by "00", "01", ... "33".
    """
    src = source_grids(state, pair, grid.axes(), t_tilde, nodes, beta=beta)
    out = {}
    for mu, nu in _COMPONENTS:
        key = f"{mu}{nu}"
        comp = Field3D(grid=grid, data=16.0 * np.pi * src.components[mu, nu],
                       label=f"source_{key}")
        solved = solve_static_poisson(comp)
        out[key] = Field3D(grid=grid, data=solved.data, label=f"hbar_{key}",
                           flags=solved.flags)
    return out
