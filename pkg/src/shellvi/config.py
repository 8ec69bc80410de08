"""Run configuration: a flat key-value text format with dotted section keys.

Example::

    problem.kind = membrane
    chart.kind = sphere_graph
    chart.radius = 2.0
    chart.domain = -0.6 0.6 -0.6 0.6
    material.lambda = 1.0
    material.mu = 1.0
    thickness.eps = 0.01
    mesh.nx = 16
    mesh.ny = 16
    boundary.gamma0 = all
    load.f3 = -1.0          # polynomial coefficients in x3, ascending
    load.h3 = 0.0
    solver.method = psor
    output.dir = out

Unknown keys are rejected so typos fail loudly.  The full schema is
documented in the project README.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

from .errors import ConfigError

_KNOWN_KEYS = {
    "problem.kind",
    "chart.kind",
    "chart.radius",
    "chart.c1",
    "chart.c2",
    "chart.file",
    "chart.domain",
    "material.lambda",
    "material.mu",
    "thickness.eps",
    "mesh.nx",
    "mesh.ny",
    "boundary.gamma0",
    "load.f1",
    "load.f2",
    "load.f3",
    "load.h1",
    "load.h2",
    "load.h3",
    "solver.method",
    "solver.tol",
    "solver.relax",
    "solver.max_iter",
    "penalty.kappa",
    "output.dir",
    "output.prefix",
    "output.timestamp",
}


@dataclasses.dataclass
class RunConfig:
    """Validated parameters of one pipeline run."""

    problem_kind: str = "membrane"
    chart_kind: str = "plane"
    chart_params: dict = dataclasses.field(default_factory=dict)
    domain: tuple | None = None
    lam: float = 1.0
    mu: float = 1.0
    eps: float = 0.01
    nx: int = 8
    ny: int = 8
    gamma0: str | tuple = "all"
    f_coeffs: tuple = ((), (), ())
    h_top: tuple = (0.0, 0.0, 0.0)
    solver: str = "psor"
    tol: float = 1e-10
    relax: float = 1.5
    max_iter: int = 50000
    kappa: float | None = None
    output_dir: str = "out"
    prefix: str = "run"
    timestamp: bool = True

    def validate(self):
        if self.problem_kind not in ("membrane", "flexural"):
            raise ConfigError(f"problem.kind must be membrane or flexural, got {self.problem_kind!r}")
        if self.chart_kind not in ("plane", "cylinder", "sphere_graph", "paraboloid", "tabulated"):
            raise ConfigError(f"unknown chart.kind {self.chart_kind!r}")
        if self.eps <= 0.0:
            raise ConfigError(f"thickness.eps must be positive, got {self.eps}")
        if self.mu <= 0.0:
            raise ConfigError(f"material.mu must be positive, got {self.mu}")
        if self.lam < 0.0:
            raise ConfigError(f"material.lambda must be nonnegative, got {self.lam}")
        if self.nx < 1 or self.ny < 1:
            raise ConfigError(f"mesh.nx and mesh.ny must be >= 1, got {self.nx}, {self.ny}")
        if self.solver not in ("psor", "activeset"):
            raise ConfigError(f"solver.method must be psor or activeset, got {self.solver!r}")
        if self.problem_kind == "membrane" and self.gamma0 != "all":
            raise ConfigError("the membrane problem requires boundary.gamma0 = all")
        if self.kappa is not None and self.kappa <= 0.0:
            raise ConfigError(f"penalty.kappa must be positive, got {self.kappa}")
        return self

    def penalty(self) -> float:
        """Inextensibility penalty: explicit value or the 1e3 * mu * eps default."""
        return self.kappa if self.kappa is not None else 1e3 * self.mu * self.eps


def _parse_bool(key, tok):
    if tok in ("true", "1", "yes", "on"):
        return True
    if tok in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {tok!r}")


def parse_config_text(text: str) -> RunConfig:
    entries: dict[str, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value.split()

    cfg = RunConfig()

    def floats(key):
        try:
            return [float(t) for t in entries[key]]
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None

    def one_float(key, default):
        if key not in entries:
            return default
        vals = floats(key)
        if len(vals) != 1:
            raise ConfigError(f"{key}: expected one number")
        return vals[0]

    def one_int(key, default):
        v = one_float(key, default)
        if v != int(v):
            raise ConfigError(f"{key}: expected an integer")
        return int(v)

    def one_str(key, default):
        if key not in entries:
            return default
        if len(entries[key]) != 1:
            raise ConfigError(f"{key}: expected one token")
        return entries[key][0]

    cfg.problem_kind = one_str("problem.kind", cfg.problem_kind)
    cfg.chart_kind = one_str("chart.kind", cfg.chart_kind)
    params = {}
    for pkey, name in (("chart.radius", "radius"), ("chart.c1", "c1"), ("chart.c2", "c2")):
        if pkey in entries:
            params[name] = one_float(pkey, None)
    if "chart.file" in entries:
        params["file"] = one_str("chart.file", None)
    cfg.chart_params = params
    if "chart.domain" in entries:
        vals = floats("chart.domain")
        if len(vals) != 4:
            raise ConfigError("chart.domain: expected 'y1_min y1_max y2_min y2_max'")
        cfg.domain = tuple(vals)
    cfg.lam = one_float("material.lambda", cfg.lam)
    cfg.mu = one_float("material.mu", cfg.mu)
    cfg.eps = one_float("thickness.eps", cfg.eps)
    cfg.nx = one_int("mesh.nx", cfg.nx)
    cfg.ny = one_int("mesh.ny", cfg.ny)
    if "boundary.gamma0" in entries:
        toks = entries["boundary.gamma0"]
        cfg.gamma0 = toks[0] if toks in (["all"], ["none"]) else tuple(toks)
    cfg.f_coeffs = tuple(
        tuple(floats(k)) if k in entries else () for k in ("load.f1", "load.f2", "load.f3")
    )
    cfg.h_top = tuple(one_float(k, 0.0) for k in ("load.h1", "load.h2", "load.h3"))
    cfg.solver = one_str("solver.method", cfg.solver)
    cfg.tol = one_float("solver.tol", cfg.tol)
    cfg.relax = one_float("solver.relax", cfg.relax)
    cfg.max_iter = one_int("solver.max_iter", cfg.max_iter)
    if "penalty.kappa" in entries:
        cfg.kappa = one_float("penalty.kappa", None)
    cfg.output_dir = one_str("output.dir", cfg.output_dir)
    cfg.prefix = one_str("output.prefix", cfg.prefix)
    if "output.timestamp" in entries:
        cfg.timestamp = _parse_bool("output.timestamp", one_str("output.timestamp", "true"))
    return cfg.validate()


def parse_config_file(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return parse_config_text(text)
