"""Command-line front end.

Subcommands: scales, entanglement, source-field, ricci-field,
metric-static, decay. Configuration comes from an optional ``key = value``
file (``#`` comments, dotted section prefixes) overridden by flags; every
output embeds the sha256 of the resolved configuration, and reruns with
the same configuration produce byte-identical files regardless of
--threads.

Exit codes: 0 success, 1 configuration or validation error, 2 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import curvature, qstate, scales, stress_energy
from .quadrature import QuadratureError, QuadratureSpec
from .wavepacket import Profile, ProfileKind, SitePair

__all__ = ["RunConfig", "ConfigError", "parse_config", "main"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 0.5
    beta_re: float = 0.0
    beta_im: float = 0.0
    profile: str = "box"
    k0_tilde: tuple = (0.0, 0.0, 0.0)
    l_tilde: float = float(np.pi)
    m_tilde: float = 100.0
    grid_extent: float = 12.0
    grid_n: int = 16
    nodes: int | None = None
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdiv: int = 2000
    times: tuple = (0.0,)
    threads: int = 1
    point: tuple | None = None
    components: tuple = ("00", "trace")
    regime: str | None = None
    mass_kg: float | None = None
    k0_inv_m: float | None = None
    sigma_inv_m: float | None = None


def _as_float(s):
    return float(s)


def _as_int(s):
    v = float(s)
    if v != int(v):
        raise ValueError("expected an integer")
    return int(v)


def _as_vec3(s):
    parts = [p for p in str(s).split(",") if p.strip() != ""]
    if len(parts) == 1:
        return (0.0, 0.0, float(parts[0]))
    if len(parts) == 3:
        return tuple(float(p) for p in parts)
    raise ValueError("expected a scalar (z component) or 'x,y,z'")


def _as_float_list(s):
    parts = [p for p in str(s).split(",") if p.strip() != ""]
    if not parts:
        raise ValueError("expected a comma-separated list of numbers")
    return tuple(float(p) for p in parts)


def _as_str_list(s):
    parts = tuple(p.strip() for p in str(s).split(",") if p.strip() != "")
    if not parts:
        raise ValueError("expected a comma-separated list")
    return parts


def _as_profile(s):
    v = str(s).strip().lower()
    if v not in ("box", "gaussian"):
        raise ValueError("profile must be 'box' or 'gaussian'")
    return v


def _as_regime(s):
    v = str(s).strip().lower()
    if v not in ("massive", "massless"):
        raise ValueError("regime must be 'massive' or 'massless'")
    return v


# config key -> (RunConfig attribute, parser)
_SCHEMA = {
    "state.alpha": ("alpha", _as_float),
    "state.beta": ("beta_re", _as_float),
    "state.beta_im": ("beta_im", _as_float),
    "profile.kind": ("profile", _as_profile),
    "profile.k0": ("k0_tilde", _as_vec3),
    "pair.l": ("l_tilde", _as_float),
    "pair.m": ("m_tilde", _as_float),
    "grid.extent": ("grid_extent", _as_float),
    "grid.n": ("grid_n", _as_int),
    "grid.nodes": ("nodes", _as_int),
    "quad.rel_tol": ("rel_tol", _as_float),
    "quad.abs_tol": ("abs_tol", _as_float),
    "quad.max_subdiv": ("max_subdiv", _as_int),
    "times": ("times", _as_float_list),
    "run.threads": ("threads", _as_int),
    "decay.point": ("point", _as_vec3),
    "source.components": ("components", _as_str_list),
    "scales.regime": ("regime", _as_regime),
    "scales.mass_kg": ("mass_kg", _as_float),
    "scales.k0_inv_m": ("k0_inv_m", _as_float),
    "scales.sigma_inv_m": ("sigma_inv_m", _as_float),
}

_ATTR_TO_KEY = {attr: key for key, (attr, _) in _SCHEMA.items()}


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse ``key = value`` lines into a RunConfig.

    Unknown keys, duplicate keys and type mismatches are errors naming the
    key and line; an empty file yields all defaults.
    """
    cfg = base or RunConfig()
    seen = set()
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', "
                              f"got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        attr, parser = _SCHEMA[key]
        try:
            updates[attr] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}")
    return replace(cfg, **updates)


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def resolved_config_text(cfg: RunConfig) -> str:
    lines = []
    for f in sorted(fields(RunConfig), key=lambda f: _ATTR_TO_KEY[f.name]):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        lines.append(f"{_ATTR_TO_KEY[f.name]} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


def config_hash(cfg: RunConfig) -> str:
    """sha256 of the result-determining configuration.

    The worker count only schedules work and never changes results, so it
    is excluded: reruns with different --threads hash (and byte-compare)
    identically.
    """
    canonical = replace(cfg, threads=1)
    return hashlib.sha256(resolved_config_text(canonical).encode()).hexdigest()


# ---------------------------------------------------------------------------
# model construction helpers

def _build_pair(cfg: RunConfig) -> SitePair:
    kind = ProfileKind.BOX if cfg.profile == "box" else ProfileKind.GAUSSIAN
    return SitePair(Profile(kind, cfg.k0_tilde), cfg.l_tilde, cfg.m_tilde)


def _build_state(cfg: RunConfig) -> tuple:
    state = qstate.make_state(cfg.alpha, cfg.beta_re)
    beta = complex(cfg.beta_re, cfg.beta_im) if cfg.beta_im else None
    if beta is not None and (cfg.alpha - 0.5) ** 2 + abs(beta) ** 2 > 0.25 + 1e-15:
        raise ValueError("(alpha-1/2)^2 + |beta|^2 <= 1/4 violated")
    return state, beta


def _build_spec(cfg: RunConfig) -> QuadratureSpec:
    return QuadratureSpec(cfg.rel_tol, cfg.abs_tol, cfg.max_subdiv)


def _build_grid(cfg: RunConfig) -> curvature.Grid:
    return curvature.Grid.cube(cfg.grid_extent, cfg.grid_n)


def _build_physical_scales(cfg: RunConfig) -> scales.PhysicalScales:
    if cfg.regime is None or cfg.sigma_inv_m is None:
        raise ConfigError("the scales subcommand needs scales.regime and "
                          "scales.sigma_inv_m (flags --regime/--sigma-inv-m)")
    if cfg.regime == "massive":
        if cfg.mass_kg is None:
            raise ConfigError("massive regime needs scales.mass_kg")
        return scales.PhysicalScales(scales.Regime.MASSIVE_STATIC,
                                     sigma=cfg.sigma_inv_m, mass=cfg.mass_kg)
    if cfg.k0_inv_m is None:
        raise ConfigError("massless regime needs scales.k0_inv_m")
    return scales.PhysicalScales(scales.Regime.MASSLESS_HIGH_MOMENTUM,
                                 sigma=cfg.sigma_inv_m,
                                 wave_number_k0=cfg.k0_inv_m)


# ---------------------------------------------------------------------------
# output writers

def _write_bytes(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _field_csv(field: curvature.Field3D, digest: str) -> str:
    xs, ys, zs = field.grid.axes()
    lines = [f"# config_sha256={digest}", "x,y,z,value"]
    data = field.data
    n = field.grid.n
    for i in range(n):
        for j in range(n):
            for k in range(n):
                lines.append(f"{xs[i]:.17g},{ys[j]:.17g},{zs[k]:.17g},"
                             f"{data[i, j, k]:.17g}")
    return "\n".join(lines) + "\n"


def _sidecar(field_label: str, cfg: RunConfig, grid: curvature.Grid,
             digest: str, t: float, flags=()) -> str:
    doc = {
        "component": field_label,
        "config_sha256": digest,
        "time": t,
        "flags": list(flags),
        "grid_n": grid.n,
        "grid_extents": [list(e) for e in grid.extents],
        "grid_spacing": list(grid.spacing()),
        "state_alpha": cfg.alpha,
        "state_beta_re": cfg.beta_re,
        "state_beta_im": cfg.beta_im,
        "profile_kind": cfg.profile,
        "profile_k0": list(cfg.k0_tilde),
        "pair_l": cfg.l_tilde,
        "pair_m": cfg.m_tilde,
        "quad_rel_tol": cfg.rel_tol,
        "quad_abs_tol": cfg.abs_tol,
        "quad_max_subdiv": cfg.max_subdiv,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _emit_field(out_dir: Path | None, name: str, field: curvature.Field3D,
                cfg: RunConfig, digest: str, t: float):
    if out_dir is None:
        return
    _write_bytes(out_dir / f"{name}.csv", _field_csv(field, digest))
    _write_bytes(out_dir / f"{name}.json",
                 _sidecar(field.label or name, cfg, field.grid, digest, t,
                          field.flags))


# ---------------------------------------------------------------------------
# subcommands: each returns (flat summary dict, exit code)

def _cmd_scales(cfg: RunConfig, out_dir):
    ps = _build_physical_scales(cfg)
    report = scales.validity_report(ps)
    summary = report.as_dict()
    summary["config_sha256"] = config_hash(cfg)
    return summary, 0


def _cmd_entanglement(cfg: RunConfig, out_dir):
    if cfg.beta_im:
        raise ValueError("entanglement measures are defined for real beta; "
                         "state.beta_im must be 0 here")
    state = qstate.make_state(cfg.alpha, cfg.beta_re)
    summary = {
        "alpha": state.alpha,
        "beta": state.beta,
        "negativity": qstate.negativity(state),
        "log_negativity": qstate.log_negativity(state),
        "concurrence": qstate.concurrence(state),
        "config_sha256": config_hash(cfg),
    }
    return summary, 0


def _component_array(src: stress_energy.SourceGrids, comp: str, coherence: bool):
    if comp == "trace":
        if coherence:
            return stress_energy.eta_contraction(src.coherence_part)
        return src.trace
    if len(comp) == 2 and comp.isdigit():
        mu, nu = int(comp[0]), int(comp[1])
        if 0 <= mu <= 3 and 0 <= nu <= 3:
            arr = src.coherence_part if coherence else src.components
            return arr[mu, nu]
    raise ValueError(f"unknown component {comp!r}; expected 'trace' or two "
                     "digits like '00'")


def _cmd_source_field(cfg: RunConfig, out_dir):
    state, beta = _build_state(cfg)
    pair = _build_pair(cfg)
    grid = _build_grid(cfg)
    t = cfg.times[0]
    src = stress_energy.source_grids(state, pair, grid.axes(), t,
                                     cfg.nodes, beta=beta)
    digest = config_hash(cfg)
    summary = {"config_sha256": digest, "time": t}
    for comp in cfg.components:
        for coherence, prefix in ((False, "source"), (True, "coherence")):
            data = _component_array(src, comp, coherence)
            field = curvature.Field3D(grid=grid, data=data,
                                      label=f"{prefix}_{comp}")
            _emit_field(out_dir, f"{prefix}_{comp}", field, cfg, digest, t)
            summary[f"{prefix}_{comp}_min"] = float(data.min())
            summary[f"{prefix}_{comp}_max"] = float(data.max())
            summary[f"{prefix}_{comp}_abs_sum"] = float(np.abs(data).sum())
    return summary, 0


def _cmd_ricci_field(cfg: RunConfig, out_dir):
    state, beta = _build_state(cfg)
    pair = _build_pair(cfg)
    grid = _build_grid(cfg)
    t = cfg.times[0]
    field = curvature.ricci_field(state, pair, grid, t, cfg.nodes, beta=beta)
    digest = config_hash(cfg)
    _emit_field(out_dir, "ricci", field, cfg, digest, t)
    summary = {
        "config_sha256": digest,
        "time": t,
        "ricci_min": float(field.data.min()),
        "ricci_max": float(field.data.max()),
        "ricci_abs_sum": float(np.abs(field.data).sum()),
    }
    return summary, 0


def _cmd_metric_static(cfg: RunConfig, out_dir):
    state, beta = _build_state(cfg)
    pair = _build_pair(cfg)
    grid = _build_grid(cfg)
    t = cfg.times[0]
    src = stress_energy.source_grids(state, pair, grid.axes(), t,
                                     cfg.nodes, beta=beta)
    digest = config_hash(cfg)
    keys = [f"{mu}{nu}" for mu in range(4) for nu in range(mu, 4)]

    def solve_one(key):
        mu, nu = int(key[0]), int(key[1])
        comp = curvature.Field3D(
            grid=grid, data=16.0 * np.pi * src.components[mu, nu],
            label=f"source_{key}")
        solved = curvature.solve_static_poisson(comp)
        return curvature.Field3D(grid=grid, data=solved.data,
                                 label=f"hbar_{key}", flags=solved.flags)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            fields_out = list(pool.map(solve_one, keys))
    else:
        fields_out = [solve_one(k) for k in keys]

    summary = {"config_sha256": digest, "time": t}
    warned = False
    for key, field in zip(keys, fields_out):
        _emit_field(out_dir, f"hbar_{key}", field, cfg, digest, t)
        summary[f"hbar_{key}_max_abs"] = float(np.abs(field.data).max())
        warned |= bool(field.flags)
    summary["boundary_warning"] = warned
    return summary, 0


def _cmd_decay(cfg: RunConfig, out_dir):
    state, beta = _build_state(cfg)
    pair = _build_pair(cfg)
    spec = _build_spec(cfg)
    point = cfg.point if cfg.point is not None else (0.0, 0.0, cfg.l_tilde)
    times = cfg.times

    def trace_at(t):
        terms = stress_energy.stress_terms(pair, point, t, spec)
        src = stress_energy.assemble_source(
            state.alpha, state.beta if beta is None else beta, terms)
        return src.trace, src.converged

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(trace_at, times))
    else:
        rows = [trace_at(t) for t in times]

    digest = config_hash(cfg)
    if out_dir is not None:
        lines = [f"# config_sha256={digest}", "t,trace,abs_trace,converged"]
        for t, (tr, ok) in zip(times, rows):
            lines.append(f"{t:.17g},{tr:.17g},{abs(tr):.17g},{int(ok)}")
        _write_bytes(out_dir / "decay.csv", "\n".join(lines) + "\n")

    all_converged = all(ok for _, ok in rows)
    summary = {
        "config_sha256": digest,
        "point_x": point[0], "point_y": point[1], "point_z": point[2],
        "n_times": len(times),
        "trace_t0": rows[0][0],
        "trace_final": rows[-1][0],
        "final_over_initial": (abs(rows[-1][0] / rows[0][0])
                               if rows[0][0] != 0 else float("inf")),
        "converged": all_converged,
    }
    return summary, 0 if all_converged else 2


_COMMANDS = {
    "scales": _cmd_scales,
    "entanglement": _cmd_entanglement,
    "source-field": _cmd_source_field,
    "ricci-field": _cmd_ricci_field,
    "metric-static": _cmd_metric_static,
    "decay": _cmd_decay,
}


def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="configuration file")
    p.add_argument("--out", type=Path, help="directory for CSV/JSON outputs")
    p.add_argument("--print-config", action="store_true",
                   help="echo the resolved configuration and exit")
    g = p.add_argument_group("model parameters")
    g.add_argument("--alpha", type=float)
    g.add_argument("--beta", type=float, help="real part of beta")
    g.add_argument("--beta-im", type=float, help="imaginary part of beta")
    g.add_argument("--profile", choices=["box", "gaussian"])
    g.add_argument("--k0", help="peak momentum: z component or 'x,y,z'")
    g.add_argument("--l", type=float, help="half-separation L")
    g.add_argument("--m", type=float, help="mass in width units")
    g.add_argument("--grid-extent", type=float)
    g.add_argument("--grid-n", type=int)
    g.add_argument("--nodes", type=int, help="fixed rule size for grid paths")
    g.add_argument("--rel-tol", type=float)
    g.add_argument("--abs-tol", type=float)
    g.add_argument("--max-subdiv", type=int)
    g.add_argument("--times", help="comma-separated times")
    g.add_argument("--threads", type=int)
    g.add_argument("--at", help="evaluation point 'x,y,z' (decay)")
    g.add_argument("--components", help="components list (source-field)")
    s = p.add_argument_group("physical scales (SI)")
    s.add_argument("--regime", choices=["massive", "massless"])
    s.add_argument("--mass-kg", type=float)
    s.add_argument("--k0-inv-m", type=float)
    s.add_argument("--sigma-inv-m", type=float)


_FLAG_ATTRS = [
    ("alpha", "alpha", None), ("beta", "beta_re", None),
    ("beta_im", "beta_im", None), ("profile", "profile", None),
    ("k0", "k0_tilde", _as_vec3), ("l", "l_tilde", None),
    ("m", "m_tilde", None), ("grid_extent", "grid_extent", None),
    ("grid_n", "grid_n", None), ("nodes", "nodes", None),
    ("rel_tol", "rel_tol", None), ("abs_tol", "abs_tol", None),
    ("max_subdiv", "max_subdiv", None), ("times", "times", _as_float_list),
    ("threads", "threads", None), ("at", "point", _as_vec3),
    ("components", "components", _as_str_list), ("regime", "regime", None),
    ("mass_kg", "mass_kg", None), ("k0_inv_m", "k0_inv_m", None),
    ("sigma_inv_m", "sigma_inv_m", None),
]


def _resolve_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config is not None:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        cfg = parse_config(text, cfg)
    updates = {}
    for flag, attr, conv in _FLAG_ATTRS:
        val = getattr(args, flag, None)
        if val is None:
            continue
        try:
            updates[attr] = conv(val) if conv else val
        except ValueError as exc:
            raise ConfigError(f"bad value for --{flag.replace('_', '-')}: {exc}")
    return replace(cfg, **updates)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="entgrav",
        description="Gravitational source terms, curvature and static metric "
                    "perturbations of spatially entangled one-particle states.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        _add_common_flags(sp)
    args = parser.parse_args(argv)

    try:
        cfg = _resolve_config(args)
        if args.print_config:
            sys.stdout.write(resolved_config_text(cfg))
            return 0
        summary, code = _COMMANDS[args.command](cfg, args.out)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except QuadratureError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(summary, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
