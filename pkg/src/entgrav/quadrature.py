"""Deterministic adaptive quadrature on intervals and boxes.

Panels are refined with an embedded Gauss-Kronrod 7/15 pair. Results are
reproducible bit for bit: the refinement queue breaks ties by insertion
order and the final panel sum is accumulated in coordinate order, so the
outcome never depends on thread count or timing.

Six-dimensional bilinear integrals are never evaluated directly; they are
reduced to products of 3-d integrals via :func:`separable_bilinear`.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuadratureSpec",
    "IntegralResult",
    "QuadratureError",
    "integrate_1d",
    "integrate_3d",
    "integrate_box_multi",
    "separable_bilinear",
]


class QuadratureError(RuntimeError):
    """Raised when an integrand cannot be evaluated (non-finite samples)."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and budget for adaptive integration.

    ``rel_tol``/``abs_tol`` bound the accumulated error estimate via
    ``err <= max(abs_tol, rel_tol * |value|)``; ``max_subdivisions`` caps
    the number of panel bisections per 1-d pass.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    def scaled(self, abs_factor: float) -> "QuadratureSpec":
        return QuadratureSpec(self.rel_tol, self.abs_tol * abs_factor,
                              self.max_subdivisions)


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    error_estimate: float
    subdivisions_used: int
    converged: bool


DEFAULT_SPEC = QuadratureSpec()

# Gauss-Kronrod 7/15 nodes and weights (QUADPACK dqk15 constants).
_KRONROD_HALF = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898,
])
_WK_HALF = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298,
])
_XK = np.concatenate([-_KRONROD_HALF, [0.0], _KRONROD_HALF[::-1]])
_WK = np.concatenate([_WK_HALF, [0.209482141084728], _WK_HALF[::-1]])
# The embedded 7-point Gauss rule lives on every other Kronrod node.
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870,
])


def _as_channels(y, n, nch, x):
    y = np.asarray(y)
    if y.ndim == 1 and nch == 1:
        y = y[:, None]
    if y.shape != (n, nch):
        raise QuadratureError(
            f"integrand returned shape {y.shape}, expected ({n}, {nch})")
    if not np.all(np.isfinite(y.view(float))):
        bad = np.argwhere(~np.isfinite(y))[0, 0]
        raise QuadratureError(f"non-finite integrand value at x={x[bad]!r}")
    return y


def _panel(f, a, b, nch):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid + half * _XK
    y = _as_channels(f(x), 15, nch, x)
    resk = half * (_WK @ y)
    resg = half * (_WG @ y[1::2])
    return resk, np.abs(resk - resg)


@dataclass
class _AdaptResult:
    values: np.ndarray
    errors: np.ndarray
    converged: bool
    subdivisions: int


def _tol(values, spec):
    return np.maximum(spec.abs_tol, spec.rel_tol * np.abs(values))


def _adapt(f, a, b, spec, nch):
    """Adaptive bisection of [a, b] for a vector-valued integrand."""
    vals, errs = _panel(f, a, b, nch)
    heap = [(-errs.max(), 0, a, b, vals, errs)]
    counter = 1
    total_v = vals.copy()
    total_e = errs.copy()
    nsub = 0
    while nsub < spec.max_subdivisions:
        if np.all(total_e <= _tol(total_v, spec)):
            break
        neg_err, _, pa, pb, pv, pe = heapq.heappop(heap)
        if neg_err == 0.0:
            heapq.heappush(heap, (neg_err, counter, pa, pb, pv, pe))
            counter += 1
            break
        pm = 0.5 * (pa + pb)
        lv, le = _panel(f, pa, pm, nch)
        rv, re = _panel(f, pm, pb, nch)
        total_v += lv + rv - pv
        total_e += le + re - pe
        heapq.heappush(heap, (-le.max(), counter, pa, pm, lv, le))
        heapq.heappush(heap, (-re.max(), counter + 1, pm, pb, rv, re))
        counter += 2
        nsub += 1
    # Fixed-order reduction: sum panels sorted by left endpoint so the
    # result is independent of refinement history details.
    panels = sorted(heap, key=lambda p: p[2])
    values = np.zeros(nch, dtype=complex)
    errors = np.zeros(nch)
    for _, _, _, _, pv, pe in panels:
        values += pv
        errors += pe
    converged = bool(np.all(errors <= _tol(values, spec)))
    return _AdaptResult(values, errors, converged, nsub)


def _vectorized_1d(f):
    """Accept either a vectorized integrand or a plain scalar function."""
    def call(xs):
        try:
            y = np.asarray(f(xs))
            if y.shape[:1] == xs.shape:
                return y
        except (TypeError, ValueError):
            pass
        return np.array([f(x) for x in xs])
    return call


def integrate_1d(f, interval, spec: QuadratureSpec | None = None) -> IntegralResult:
    """Integrate ``f`` over ``[a, b]`` adaptively.

    ``f`` may map a float to a complex value or an ndarray of abscissae to
    an ndarray of values; vectorized integrands are much faster.
    """
    spec = spec or DEFAULT_SPEC
    a, b = float(interval[0]), float(interval[1])
    if not (np.isfinite(a) and np.isfinite(b) and a < b):
        raise ValueError("interval must be finite with a < b")
    res = _adapt(_vectorized_1d(f), a, b, spec, 1)
    return IntegralResult(complex(res.values[0]), float(res.errors[0]),
                          res.subdivisions, res.converged)


def _vectorized_3d(f):
    def call(pts):
        try:
            y = np.asarray(f(pts))
            if y.shape[:1] == pts.shape[:1]:
                return y
        except (TypeError, ValueError):
            pass
        return np.array([f(p) for p in pts])
    return call


def integrate_box_multi(f, box, spec: QuadratureSpec | None = None,
                        nch: int = 1) -> _AdaptResult:
    """Nested adaptive tensor-product integration of a vector integrand.

    ``f`` maps an (N, 3) array of points to an (N, nch) complex array. The
    channels share panel decisions, which is what makes the five mode
    integrals of the stress-energy bilinears affordable. Inner-level error
    estimates are propagated to first order into the reported error.
    """
    spec = spec or DEFAULT_SPEC
    (ax, bx), (ay, by), (az, bz) = [(float(lo), float(hi)) for lo, hi in box]
    for lo, hi in ((ax, bx), (ay, by), (az, bz)):
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ValueError("box must be finite with lo < hi on each axis")
    fv = _vectorized_3d(f)
    len_x, len_y = bx - ax, by - ay
    spec_y = spec.scaled(1.0 / max(len_x, 1.0))
    spec_z = spec.scaled(1.0 / max(len_x * len_y, 1.0))

    stats = {"err_y": np.zeros(nch), "n_y": 0,
             "err_z": np.zeros(nch), "n_z": 0,
             "converged": True, "subdivs": 0}

    def f_outer(xs):
        out = np.empty((len(xs), nch), dtype=complex)
        for i, x in enumerate(xs):
            def f_mid(ys):
                out_y = np.empty((len(ys), nch), dtype=complex)
                for j, y in enumerate(ys):
                    def f_inner(zs):
                        pts = np.empty((len(zs), 3))
                        pts[:, 0] = x
                        pts[:, 1] = y
                        pts[:, 2] = zs
                        return fv(pts)
                    rz = _adapt(f_inner, az, bz, spec_z, nch)
                    stats["err_z"] += rz.errors
                    stats["n_z"] += 1
                    stats["converged"] &= rz.converged
                    stats["subdivs"] += rz.subdivisions
                    out_y[j] = rz.values
                return out_y
            ry = _adapt(f_mid, ay, by, spec_y, nch)
            stats["err_y"] += ry.errors
            stats["n_y"] += 1
            stats["converged"] &= ry.converged
            stats["subdivs"] += ry.subdivisions
            out[i] = ry.values
        return out

    res = _adapt(f_outer, ax, bx, spec, nch)
    errors = res.errors.copy()
    if stats["n_y"]:
        errors += len_x * stats["err_y"] / stats["n_y"]
    if stats["n_z"]:
        errors += len_x * len_y * stats["err_z"] / stats["n_z"]
    return _AdaptResult(res.values, errors, res.converged and stats["converged"],
                        res.subdivisions + stats["subdivs"])


def integrate_3d(f, box, spec: QuadratureSpec | None = None) -> IntegralResult:
    """Integrate ``f(point) -> complex`` over an axis-aligned box."""
    res = integrate_box_multi(f, box, spec, nch=1)
    return IntegralResult(complex(res.values[0]), float(res.errors[0]),
                          res.subdivisions, res.converged)


def _apply_weight(factor, weight):
    if weight is None:
        return factor
    def f(pts):
        return np.asarray(factor(pts)) * np.asarray(weight(pts))
    return f


def separable_bilinear(weights, factor_a, factor_b, boxes,
                       spec: QuadratureSpec | None = None) -> IntegralResult:
    """Evaluate ``sum_j c_j * conj(I_j^A) * I_j^B`` with 3-d factor integrals.

    ``weights`` is a sequence of ``(c_j, (g_j, h_j))`` pairs; ``I_j^A`` is
    the integral of ``factor_a * g_j`` over ``boxes[0]`` and ``I_j^B`` of
    ``factor_b * h_j`` over ``boxes[1]`` (``None`` weight functions mean 1).
    This is how bilinear double integrals factorize when the coupling kernel
    expands into finitely many separable terms; the worst-case error of the
    factor integrals is propagated to first order.
    """
    spec = spec or DEFAULT_SPEC
    box_a, box_b = boxes
    value = 0.0 + 0.0j
    error = 0.0
    converged = True
    subdivs = 0
    for coeff, (g, h) in weights:
        ra = integrate_3d(_apply_weight(factor_a, g), box_a, spec)
        rb = integrate_3d(_apply_weight(factor_b, h), box_b, spec)
        value += coeff * np.conj(ra.value) * rb.value
        error += abs(coeff) * (abs(ra.value) * rb.error_estimate
                               + abs(rb.value) * ra.error_estimate
                               + ra.error_estimate * rb.error_estimate)
        converged &= ra.converged and rb.converged
        subdivs += ra.subdivisions_used + rb.subdivisions_used
    return IntegralResult(value, error, subdivs, converged)
