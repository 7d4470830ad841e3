"""Configuration, phase-diagram sweeps, oracle comparison, and file emission.

A sweep is a deterministic row-major walk over a 2-D parameter grid; each
point builds the chain (with auxiliary end spins), solves the NESS, and
records the end-spin observables.  Point failures are recorded in the row
status, never fabricated, and never abort the sweep.  Output rows are keyed
by grid index, so the CSV is byte-identical for any worker count.
"""

from __future__ import annotations

import json
import multiprocessing
import os
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import oracle
from .chains import (
    TSI,
    TXY,
    BathSpec,
    ChainSpec,
    attach_auxiliary,
    full_params,
)
from .errors import (
    ConfigError,
    DegenerateNessError,
    NoUniqueNessError,
    UndefinedCorrelatorError,
)
from .observables import ness_observables
from .thirdquant import steady_state

CSV_HEADER = "model,N,param1,param2,sz1,szN,g2,residual,status"

GRID_PARAMS = {TXY: ("hbar", "gamma"), TSI: ("lambda1", "lambda2")}

_DEFAULT_GRIDS = {
    TXY: (
        {"name": "hbar", "min": 0.0, "max": 2.0, "count": 61},
        {"name": "gamma", "min": -1.0, "max": 1.0, "count": 61},
    ),
    TSI: (
        {"name": "lambda1", "min": 0.0, "max": 4.0, "count": 61},
        {"name": "lambda2", "min": -4.0, "max": 4.0, "count": 61},
    ),
}


@dataclass(frozen=True)
class GridAxis:
    name: str
    min: float
    max: float
    count: int

    def values(self):
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class SweepConfig:
    """Validated sweep configuration (see README for the JSON schema)."""

    model: str
    n_sites: int
    scale: float = 1.0
    aux_enabled: bool = True
    end_bond_scale: float = 0.02
    end_fields: tuple = (0.0, 0.0)
    gamma: tuple = (0.02, 0.02)
    n_th: tuple = (0.1, 0.1)
    grid1: GridAxis | None = None
    grid2: GridAxis | None = None
    point: dict | None = None
    stability_tol: float = 1e-10
    degeneracy_tol: float = 1e-8
    out_dir: str = "out"
    formats: tuple = ("csv", "svg", "fig")
    cell_size: int = 6
    oracle_tol: float = 1e-6

    def bath(self):
        return BathSpec(
            gamma_1=self.gamma[0], gamma_n=self.gamma[1],
            n_1=self.n_th[0], n_n=self.n_th[1],
        )

    def to_dict(self):
        d = {
            "model": self.model,
            "n_sites": self.n_sites,
            "scale": self.scale,
            "auxiliary": {
                "enabled": self.aux_enabled,
                "end_bond_scale": self.end_bond_scale,
                "end_fields": list(self.end_fields),
            },
            "bath": {"gamma": list(self.gamma), "n_th": list(self.n_th)},
            "grid": {
                "param1": asdict(self.grid1),
                "param2": asdict(self.grid2),
            },
            "solver": {
                "stability_tol": self.stability_tol,
                "degeneracy_tol": self.degeneracy_tol,
            },
            "output": {
                "dir": self.out_dir,
                "formats": list(self.formats),
                "cell_size": self.cell_size,
            },
            "oracle": {"max_deviation": self.oracle_tol},
        }
        if self.point is not None:
            d["point"] = dict(self.point)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _require_keys(section, allowed, prefix):
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key: {prefix}{key}")


def _axis_from(section, prefix, model):
    _require_keys(section, {"name", "min", "max", "count"}, prefix + ".")
    try:
        axis = GridAxis(
            name=str(section["name"]),
            min=float(section["min"]),
            max=float(section["max"]),
            count=int(section["count"]),
        )
    except KeyError as exc:
        raise ConfigError(f"{prefix}: missing key {exc.args[0]}") from exc
    if axis.count < 2:
        raise ConfigError(f"{prefix}.count must be >= 2, got {axis.count}")
    if not (np.isfinite(axis.min) and np.isfinite(axis.max)):
        raise ConfigError(f"{prefix}: range must be finite")
    if axis.name not in GRID_PARAMS[model]:
        raise ConfigError(
            f"{prefix}.name must be one of {GRID_PARAMS[model]} for model {model!r}"
        )
    return axis


def config_from_dict(raw):
    """Validate a raw configuration mapping; unknown keys are rejected."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration root must be a JSON object")
    _require_keys(
        raw,
        {"model", "n_sites", "scale", "auxiliary", "bath", "grid", "point",
         "solver", "output", "oracle"},
        "",
    )
    try:
        model = raw["model"]
    except KeyError:
        raise ConfigError("missing key: model") from None
    if model not in (TXY, TSI):
        raise ConfigError(f"model must be 'txy' or 'tsi', got {model!r}")
    try:
        n_sites = int(raw["n_sites"])
    except KeyError:
        raise ConfigError("missing key: n_sites") from None
    if n_sites < 3:
        raise ConfigError(f"n_sites must be >= 3, got {n_sites}")

    kw = {"model": model, "n_sites": n_sites}
    if "scale" in raw:
        kw["scale"] = float(raw["scale"])

    aux = raw.get("auxiliary", {})
    _require_keys(aux, {"enabled", "end_bond_scale", "end_fields"}, "auxiliary.")
    kw["aux_enabled"] = bool(aux.get("enabled", True))
    kw["end_bond_scale"] = float(aux.get("end_bond_scale", 0.02))
    fields = aux.get("end_fields", (0.0, 0.0))
    if len(fields) != 2:
        raise ConfigError("auxiliary.end_fields must have two entries")
    kw["end_fields"] = (float(fields[0]), float(fields[1]))
    if kw["end_bond_scale"] < 0:
        raise ConfigError("auxiliary.end_bond_scale must be >= 0")

    bath = raw.get("bath", {})
    _require_keys(bath, {"gamma", "n_th"}, "bath.")
    gamma = bath.get("gamma", (0.02, 0.02))
    n_th = bath.get("n_th", (0.1, 0.1))
    if np.isscalar(gamma):
        gamma = (gamma, gamma)
    if np.isscalar(n_th):
        n_th = (n_th, n_th)
    kw["gamma"] = (float(gamma[0]), float(gamma[1]))
    kw["n_th"] = (float(n_th[0]), float(n_th[1]))

    grid = raw.get("grid")
    if grid is not None:
        _require_keys(grid, {"param1", "param2"}, "grid.")
        if "param1" not in grid or "param2" not in grid:
            raise ConfigError("grid needs both param1 and param2")
        kw["grid1"] = _axis_from(grid["param1"], "grid.param1", model)
        kw["grid2"] = _axis_from(grid["param2"], "grid.param2", model)
        if kw["grid1"].name == kw["grid2"].name:
            raise ConfigError("grid.param1 and grid.param2 must differ")
    else:
        p1, p2 = _DEFAULT_GRIDS[model]
        kw["grid1"] = GridAxis(**p1)
        kw["grid2"] = GridAxis(**p2)

    point = raw.get("point")
    if point is not None:
        _require_keys(point, set(GRID_PARAMS[model]), "point.")
        kw["point"] = {k: float(v) for k, v in point.items()}

    solver = raw.get("solver", {})
    _require_keys(solver, {"stability_tol", "degeneracy_tol"}, "solver.")
    kw["stability_tol"] = float(solver.get("stability_tol", 1e-10))
    kw["degeneracy_tol"] = float(solver.get("degeneracy_tol", 1e-8))

    output = raw.get("output", {})
    _require_keys(output, {"dir", "formats", "cell_size"}, "output.")
    kw["out_dir"] = str(output.get("dir", "out"))
    kw["formats"] = tuple(output.get("formats", ("csv", "svg", "fig")))
    for fmt in kw["formats"]:
        if fmt not in ("csv", "svg", "fig"):
            raise ConfigError(f"output.formats: unknown format {fmt!r}")
    kw["cell_size"] = int(output.get("cell_size", 6))

    osec = raw.get("oracle", {})
    _require_keys(osec, {"max_deviation"}, "oracle.")
    kw["oracle_tol"] = float(osec.get("max_deviation", 1e-6))

    return SweepConfig(**kw)


def parse_config(path):
    """Load and validate a JSON sweep configuration."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(raw)


def build_point(cfg, values):
    """Chain + bath for one parameter point.

    ``values`` maps grid parameter names to numbers.  The bulk chain is
    uniform at the requested point; auxiliary end spins (when enabled) are
    attached with the configured bond scale and end fields.
    """
    n_bulk = cfg.n_sites - 2 if cfg.aux_enabled else cfg.n_sites
    if n_bulk < 1:
        raise ConfigError("n_sites too small for auxiliary attachment")
    if cfg.model == TXY:
        jx, jy, h = full_params(values["gamma"], values["hbar"], cfg.scale)
        bulk = ChainSpec.txy_uniform(n_bulk, h, jx, jy)
    else:
        bulk = ChainSpec.tsi_uniform(n_bulk, values["lambda1"], values["lambda2"], jx=cfg.scale)
    if cfg.aux_enabled:
        spec = attach_auxiliary(bulk, cfg.end_bond_scale, cfg.end_fields)
    else:
        spec = bulk
    return spec, cfg.bath()


def solve_point(cfg, values):
    """One NESS solve; returns an NessObservables plus the solve residual."""
    spec, bath = build_point(cfg, values)
    corr = steady_state(
        spec, bath,
        stability_tol=cfg.stability_tol,
        degeneracy_tol=cfg.degeneracy_tol,
    )
    obs = ness_observables(corr)
    return obs, corr


@dataclass(frozen=True)
class SweepRow:
    i1: int
    i2: int
    param1: float
    param2: float
    sz1: float | None
    szn: float | None
    g2: float | None
    residual: float | None
    status: str


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    rows: tuple

    def value_grid(self, attr):
        """(count2, count1) array of one row attribute; NaN where failed."""
        shape = (self.config.grid2.count, self.config.grid1.count)
        grid = np.full(shape, np.nan)
        for row in self.rows:
            v = getattr(row, attr)
            if v is not None:
                grid[row.i2, row.i1] = v
        return grid


_WORKER_CFG = None


def _init_worker(cfg):
    global _WORKER_CFG
    _WORKER_CFG = cfg


def _sanitize_status(msg):
    return str(msg).replace(",", ";").replace("\n", " ")


def _point_row(cfg, task):
    i1, i2, p1, p2 = task
    names = GRID_PARAMS[cfg.model]
    values = {names[0]: p1, names[1]: p2}
    try:
        obs, corr = solve_point(cfg, values)
        return SweepRow(i1, i2, p1, p2, obs.sz_left, obs.sz_right, obs.g2,
                        corr.residual, "ok")
    except NoUniqueNessError as exc:
        return SweepRow(i1, i2, p1, p2, None, None, None, None,
                        _sanitize_status(f"no-unique-ness: {exc}"))
    except UndefinedCorrelatorError as exc:
        return SweepRow(i1, i2, p1, p2, None, None, None, None,
                        _sanitize_status(f"undefined-correlator: {exc}"))
    except np.linalg.LinAlgError as exc:
        return SweepRow(i1, i2, p1, p2, None, None, None, None,
                        _sanitize_status(f"linalg-error: {exc}"))


def _point_row_worker(task):
    return _point_row(_WORKER_CFG, task)


def run_sweep(cfg, workers=1):
    """Walk the grid in row-major (param1-major) order; never abort on a point.

    The result rows are ordered by (i1, i2) regardless of worker scheduling.
    """
    if cfg.grid1 is None or cfg.grid2 is None:
        raise ConfigError("sweep requires a grid section")
    v1 = cfg.grid1.values()
    v2 = cfg.grid2.values()
    tasks = [
        (i1, i2, float(v1[i1]), float(v2[i2]))
        for i1 in range(len(v1))
        for i2 in range(len(v2))
    ]
    if workers <= 1:
        rows = [_point_row(cfg, t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (workers * 8))
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=workers, initializer=_init_worker, initargs=(cfg,)) as pool:
            rows = pool.map(_point_row_worker, tasks, chunksize=chunk)
    rows.sort(key=lambda r: (r.i1, r.i2))
    return SweepResult(config=cfg, rows=tuple(rows))


def _fmt(v):
    return "" if v is None else repr(float(v))


def render_csv(result):
    """Deterministic CSV body (shortest round-trip float formatting)."""
    lines = [CSV_HEADER]
    cfg = result.config
    for r in result.rows:
        lines.append(
            f"{cfg.model},{cfg.n_sites},{_fmt(r.param1)},{_fmt(r.param2)},"
            f"{_fmt(r.sz1)},{_fmt(r.szn)},{_fmt(r.g2)},{_fmt(r.residual)},{r.status}"
        )
    return "\n".join(lines) + "\n"


def emit_outputs(result, out_dir=None, formats=None, cell_size=None):
    """Write the sweep CSV plus figure files; returns the paths written.

    Formats: ``csv`` (delimited rows), ``svg`` (self-contained raster
    heatmaps of sz1 and g2, one pixel cell per grid point), ``fig``
    (annotated matplotlib renderings of the same maps).
    """
    from . import plotting

    cfg = result.config
    out_dir = cfg.out_dir if out_dir is None else out_dir
    formats = cfg.formats if formats is None else formats
    cell = cfg.cell_size if cell_size is None else cell_size
    if not result.rows:
        raise ValueError("nothing to emit: sweep result is empty")
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    if "csv" in formats:
        path = os.path.join(out_dir, "sweep.csv")
        with open(path, "w", newline="") as fh:
            fh.write(render_csv(result))
        paths.append(path)
    maps = (("sz1", "sz1"), ("g2", "g2"))
    if "svg" in formats:
        for attr, stem in maps:
            path = os.path.join(out_dir, f"{stem}.svg")
            plotting.write_svg_heatmap(
                result.value_grid(attr), path,
                x_name=cfg.grid1.name, y_name=cfg.grid2.name,
                cell_size=cell,
            )
            paths.append(path)
    if "fig" in formats:
        for attr, stem in maps:
            path = os.path.join(out_dir, f"{stem}_map.svg")
            plotting.save_heatmap_figure(
                result.value_grid(attr), path,
                x_axis=cfg.grid1, y_axis=cfg.grid2,
                title=f"{attr} ({cfg.model}, N={cfg.n_sites})",
            )
            paths.append(path)
    meta = {"config": cfg.to_dict(), "rows": len(result.rows),
            "aux_three_spin_end_scaling": cfg.model == TSI and cfg.aux_enabled}
    meta_path = os.path.join(out_dir, "run_meta.json")
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths.append(meta_path)
    return paths


@dataclass(frozen=True)
class OracleCheckRow:
    param1: float
    param2: float
    dsz1: float | None
    dszn: float | None
    dg2: float | None
    status: str


@dataclass(frozen=True)
class OracleCheckReport:
    rows: tuple
    max_deviation: float
    tolerance: float

    @property
    def ok(self):
        return self.max_deviation <= self.tolerance


def compare_oracle(cfg, bath_matrix_builder=None):
    """Per-grid-point comparison of the quadratic pipeline against the dense oracle.

    Matching error outcomes (both sides reporting no unique NESS) count as
    agreement.  ``bath_matrix_builder`` overrides the pipeline's bath-matrix
    assembly; it exists for negative-control tests.
    """
    from .chains import build_majorana
    from .thirdquant import build_bath_matrix, build_drift, solve_ness

    if cfg.n_sites > 6:
        raise ConfigError("oracle comparison is limited to n_sites <= 6")
    if cfg.grid1 is None or cfg.grid2 is None:
        raise ConfigError("oracle comparison requires a grid section")
    builder = bath_matrix_builder or build_bath_matrix
    names = GRID_PARAMS[cfg.model]
    rows = []
    worst = 0.0
    for i1, p1 in enumerate(cfg.grid1.values()):
        for i2, p2 in enumerate(cfg.grid2.values()):
            values = {names[0]: float(p1), names[1]: float(p2)}
            spec, bath = build_point(cfg, values)
            pipe_err = oracle_err = None
            obs = obs_oracle = None
            try:
                form = build_majorana(spec)
                drift = build_drift(form, builder(bath, spec.n_sites))
                corr = solve_ness(drift, stability_tol=cfg.stability_tol,
                                  degeneracy_tol=cfg.degeneracy_tol)
                obs = ness_observables(corr)
            except (NoUniqueNessError, UndefinedCorrelatorError) as exc:
                pipe_err = exc
            try:
                ness = oracle.dense_ness(spec, bath)
                obs_oracle = oracle.oracle_observables(ness)
            except (DegenerateNessError, UndefinedCorrelatorError) as exc:
                oracle_err = exc
            if pipe_err is not None or oracle_err is not None:
                agree = pipe_err is not None and oracle_err is not None
                status = "agree-error" if agree else (
                    f"mismatch: pipeline={pipe_err!r} oracle={oracle_err!r}"
                )
                rows.append(OracleCheckRow(float(p1), float(p2), None, None, None,
                                           _sanitize_status(status)))
                if not agree:
                    worst = np.inf
                continue
            d1 = abs(obs.sz_left - obs_oracle.sz_left)
            dn = abs(obs.sz_right - obs_oracle.sz_right)
            dg = abs(obs.g2 - obs_oracle.g2)
            worst = max(worst, d1, dn, dg)
            rows.append(OracleCheckRow(float(p1), float(p2), d1, dn, dg, "ok"))
    return OracleCheckReport(rows=tuple(rows), max_deviation=float(worst),
                             tolerance=cfg.oracle_tol)


def render_oracle_csv(report):
    lines = ["param1,param2,dsz1,dszN,dg2,status"]
    for r in report.rows:
        lines.append(
            f"{_fmt(r.param1)},{_fmt(r.param2)},{_fmt(r.dsz1)},"
            f"{_fmt(r.dszn)},{_fmt(r.dg2)},{r.status}"
        )
    return "\n".join(lines) + "\n"
