"""Parametric middle-surface charts and pointwise surface geometry.

A chart maps a planar parameter rectangle into R^3 and supplies exact first
and second partial derivatives.  From those, :func:`frame_at` builds the full
pointwise geometry bundle: tangent bases, metric, curvature, Christoffel
symbols, covariant curvature derivatives and the area factor.  An independent
finite-difference validator (:func:`validate_chart`) cross-checks any chart
against its own derivative data.
"""

from __future__ import annotations

import dataclasses
import math
from typing import NamedTuple

import numpy as np

from .errors import CapabilityError, DomainError, GeometryError, ParameterError

# Tangents a1, a2 are degenerate when |a1 x a2| drops below this (charts are
# assumed O(1)-scaled, so the threshold is absolute).
DEGENERACY_THRESHOLD = 1e-12

# Step for differencing the mixed-curvature field inside frame_at, relative
# to the domain diameter.
CURVATURE_FD_SCALE = 1e-5

PRESET_KINDS = ("plane", "cylinder", "sphere_graph", "paraboloid")


@dataclasses.dataclass(frozen=True)
class Rect:
    """Axis-aligned parameter rectangle [y1_min, y1_max] x [y2_min, y2_max]."""

    y1_min: float
    y1_max: float
    y2_min: float
    y2_max: float

    def __post_init__(self):
        if not (self.y1_max > self.y1_min and self.y2_max > self.y2_min):
            raise ParameterError(
                f"empty parameter rectangle: [{self.y1_min}, {self.y1_max}] x "
                f"[{self.y2_min}, {self.y2_max}]"
            )

    @property
    def diameter(self) -> float:
        return math.hypot(self.y1_max - self.y1_min, self.y2_max - self.y2_min)

    def contains(self, y1: float, y2: float, tol: float = 0.0) -> bool:
        return (
            self.y1_min - tol <= y1 <= self.y1_max + tol
            and self.y2_min - tol <= y2 <= self.y2_max + tol
        )

    def clamp(self, y1: float, y2: float) -> tuple[float, float]:
        return (
            min(max(y1, self.y1_min), self.y1_max),
            min(max(y2, self.y2_min), self.y2_max),
        )

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.y1_min, self.y1_max, self.y2_min, self.y2_max)


def as_rect(domain) -> Rect:
    """Coerce a Rect, a 4-sequence (y1_min, y1_max, y2_min, y2_max), or None."""
    if isinstance(domain, Rect):
        return domain
    return Rect(*(float(v) for v in domain))


class ChartJet(NamedTuple):
    """Position and first/second partial derivatives of a chart at one point."""

    position: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d11: np.ndarray
    d12: np.ndarray
    d22: np.ndarray


class Chart:
    """Base class: a parametric surface patch with exact derivatives."""

    kind = "abstract"

    def __init__(self, domain: Rect, parameters: dict | None = None):
        self.domain = domain
        self.parameters = dict(parameters or {})

    def jet(self, y1: float, y2: float) -> ChartJet:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(domain={self.domain.as_tuple()}, {self.parameters})"


class PlaneChart(Chart):
    """Flat chart theta(y) = (y1, y2, 0)."""

    kind = "plane"

    def jet(self, y1, y2):
        z = np.zeros(3)
        return ChartJet(
            np.array([y1, y2, 0.0]),
            np.array([1.0, 0.0, 0.0]),
            np.array([0.0, 1.0, 0.0]),
            z,
            z.copy(),
            z.copy(),
        )


class CylinderChart(Chart):
    """Circular cylinder theta(y) = (R cos y1, R sin y1, y2)."""

    kind = "cylinder"

    def __init__(self, domain: Rect, radius: float = 1.0):
        super().__init__(domain, {"radius": float(radius)})
        self.radius = float(radius)

    def jet(self, y1, y2):
        r = self.radius
        c, s = math.cos(y1), math.sin(y1)
        z = np.zeros(3)
        return ChartJet(
            np.array([r * c, r * s, y2]),
            np.array([-r * s, r * c, 0.0]),
            np.array([0.0, 0.0, 1.0]),
            np.array([-r * c, -r * s, 0.0]),
            z,
            z.copy(),
        )


class SphereGraphChart(Chart):
    """Graph chart of the upper sphere, theta(y) = (y1, y2, sqrt(R^2 - |y|^2))."""

    kind = "sphere_graph"

    def __init__(self, domain: Rect, radius: float = 1.0):
        super().__init__(domain, {"radius": float(radius)})
        self.radius = float(radius)

    def jet(self, y1, y2):
        rr = self.radius * self.radius - y1 * y1 - y2 * y2
        if rr <= 0.0:
            raise DomainError(
                f"point ({y1}, {y2}) outside the sphere-graph support of radius {self.radius}"
            )
        f = math.sqrt(rr)
        f3 = f * rr
        return ChartJet(
            np.array([y1, y2, f]),
            np.array([1.0, 0.0, -y1 / f]),
            np.array([0.0, 1.0, -y2 / f]),
            np.array([0.0, 0.0, -1.0 / f - y1 * y1 / f3]),
            np.array([0.0, 0.0, -y1 * y2 / f3]),
            np.array([0.0, 0.0, -1.0 / f - y2 * y2 / f3]),
        )


class ParaboloidChart(Chart):
    """Graph chart theta(y) = (y1, y2, (c1 y1^2 + c2 y2^2) / 2)."""

    kind = "paraboloid"

    def __init__(self, domain: Rect, c1: float = 1.0, c2: float = 1.0):
        super().__init__(domain, {"c1": float(c1), "c2": float(c2)})
        self.c1 = float(c1)
        self.c2 = float(c2)

    def jet(self, y1, y2):
        return ChartJet(
            np.array([y1, y2, 0.5 * (self.c1 * y1 * y1 + self.c2 * y2 * y2)]),
            np.array([1.0, 0.0, self.c1 * y1]),
            np.array([0.0, 1.0, self.c2 * y2]),
            np.array([0.0, 0.0, self.c1]),
            np.array([0.0, 0.0, 0.0]),
            np.array([0.0, 0.0, self.c2]),
        )


#: Row layout for second-derivative-complete tabulated charts:
#: y1 y2 then x/y/z components of theta, d1, d2, d11, d12, d22.
TABULATED_FIELDS = ("theta", "d1", "d2", "d11", "d12", "d22")
TABULATED_FULL_COLUMNS = 2 + 3 * len(TABULATED_FIELDS)  # 20
TABULATED_FIRST_ORDER_COLUMNS = 2 + 3 * 3  # 11, no second derivatives


class TabulatedChart(Chart):
    """Chart given by gridded samples of theta and its derivatives.

    Values between grid points come from per-component bicubic splines (one
    spline per tabulated field, so first and second derivatives are
    interpolated from their own data rather than differentiated).
    """

    kind = "tabulated"

    def __init__(self, y1_grid, y2_grid, fields: dict):
        from scipy.interpolate import RectBivariateSpline

        y1_grid = np.asarray(y1_grid, dtype=float)
        y2_grid = np.asarray(y2_grid, dtype=float)
        domain = Rect(y1_grid[0], y1_grid[-1], y2_grid[0], y2_grid[-1])
        super().__init__(domain, {"nx": len(y1_grid), "ny": len(y2_grid)})
        self.has_second_derivatives = all(k in fields for k in ("d11", "d12", "d22"))
        kx = min(3, len(y1_grid) - 1)
        ky = min(3, len(y2_grid) - 1)
        self._splines = {}
        for name, grid in fields.items():
            grid = np.asarray(grid, dtype=float)
            if grid.shape != (len(y1_grid), len(y2_grid), 3):
                raise ValueError(f"tabulated field {name!r} has shape {grid.shape}")
            self._splines[name] = [
                RectBivariateSpline(y1_grid, y2_grid, grid[:, :, c], kx=kx, ky=ky)
                for c in range(3)
            ]

    def _field(self, name, y1, y2):
        return np.array([s.ev(y1, y2) for s in self._splines[name]])

    def jet(self, y1, y2):
        if not self.has_second_derivatives:
            raise CapabilityError(
                "tabulated chart carries no second derivatives; "
                "supply the 20-column format to enable curvature evaluation"
            )
        return ChartJet(*(self._field(name, y1, y2) for name in TABULATED_FIELDS))


def make_chart(kind: str, parameters: dict | None = None, domain=None) -> Chart:
    """Build a chart from its preset id (or a tabulated file path).

    Parameters
    ----------
    kind : one of 'plane', 'cylinder', 'sphere_graph', 'paraboloid', 'tabulated'
    parameters : preset parameters (radius, c1/c2) or {'file': path} for
        tabulated charts
    domain : parameter rectangle; presets fall back to a kind-specific default
    """
    parameters = dict(parameters or {})
    if kind == "tabulated":
        path = parameters.get("file")
        if path is None:
            raise ValueError("tabulated chart requires parameters={'file': path}")
        return load_tabulated_chart(path)
    defaults = {
        "plane": Rect(0.0, 1.0, 0.0, 1.0),
        "cylinder": Rect(0.0, 1.0, 0.0, 1.0),
        "sphere_graph": Rect(-0.5, 0.5, -0.5, 0.5),
        "paraboloid": Rect(0.0, 1.0, 0.0, 1.0),
    }
    if kind not in PRESET_KINDS:
        raise ValueError(f"unknown chart kind {kind!r}; expected one of {PRESET_KINDS} or 'tabulated'")
    rect = as_rect(domain) if domain is not None else defaults[kind]
    if kind == "plane":
        return PlaneChart(rect)
    if kind == "cylinder":
        return CylinderChart(rect, radius=parameters.get("radius", 1.0))
    if kind == "sphere_graph":
        return SphereGraphChart(rect, radius=parameters.get("radius", 1.0))
    return ParaboloidChart(rect, c1=parameters.get("c1", 1.0), c2=parameters.get("c2", 1.0))


def load_tabulated_chart(path) -> TabulatedChart:
    """Read a tabulated chart file.

    Format: comment lines start with '#'.  The first data line is the header
    ``nx ny y1_min y1_max y2_min y2_max``; then nx*ny whitespace-separated
    rows with y1 varying slowest, each either 20 columns (with second
    derivatives) or 11 columns (first-order only).
    """
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                rows.append([float(tok) for tok in line.split()])
    if not rows:
        raise ValueError(f"{path}: empty tabulated chart file")
    header = rows[0]
    if len(header) != 6:
        raise ValueError(f"{path}: header must be 'nx ny y1_min y1_max y2_min y2_max'")
    nx, ny = int(header[0]), int(header[1])
    rect = Rect(header[2], header[3], header[4], header[5])
    data_rows = rows[1:]
    if len(data_rows) != nx * ny:
        raise ValueError(f"{path}: expected {nx * ny} data rows, found {len(data_rows)}")
    ncol = len(data_rows[0])
    if ncol not in (TABULATED_FULL_COLUMNS, TABULATED_FIRST_ORDER_COLUMNS):
        raise ValueError(
            f"{path}: rows must have {TABULATED_FULL_COLUMNS} columns "
            f"(or {TABULATED_FIRST_ORDER_COLUMNS} without second derivatives), got {ncol}"
        )
    if any(len(r) != ncol for r in data_rows):
        raise ValueError(f"{path}: ragged rows")
    data = np.asarray(data_rows, dtype=float)
    y1_grid = np.linspace(rect.y1_min, rect.y1_max, nx)
    y2_grid = np.linspace(rect.y2_min, rect.y2_max, ny)
    coord_tol = 1e-9 * (1.0 + rect.diameter)
    names = TABULATED_FIELDS if ncol == TABULATED_FULL_COLUMNS else TABULATED_FIELDS[:3]
    fields = {name: np.empty((nx, ny, 3)) for name in names}
    for k, row in enumerate(data):
        i, j = divmod(k, ny)
        if abs(row[0] - y1_grid[i]) > coord_tol or abs(row[1] - y2_grid[j]) > coord_tol:
            raise ValueError(
                f"{path}: row {k} coordinates ({row[0]}, {row[1]}) do not match the "
                f"declared grid point ({y1_grid[i]}, {y2_grid[j]})"
            )
        for f, name in enumerate(names):
            fields[name][i, j] = row[2 + 3 * f : 5 + 3 * f]
    return TabulatedChart(y1_grid, y2_grid, fields)


def write_tabulated_chart(path, chart: Chart, nx: int, ny: int, include_second: bool = True):
    """Sample a chart onto a grid and write it in the tabulated file format."""
    rect = chart.domain
    y1_grid = np.linspace(rect.y1_min, rect.y1_max, nx)
    y2_grid = np.linspace(rect.y2_min, rect.y2_max, ny)
    nfields = 6 if include_second else 3
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{nx} {ny} {rect.y1_min!r} {rect.y1_max!r} {rect.y2_min!r} {rect.y2_max!r}\n")
        for y1 in y1_grid:
            for y2 in y2_grid:
                jet = eval_chart(chart, (y1, y2))
                vals = [y1, y2]
                for arr in jet[:nfields]:
                    vals.extend(arr)
                fh.write(" ".join(repr(float(v)) for v in vals) + "\n")


def eval_chart(chart: Chart, y) -> ChartJet:
    """Evaluate theta(y) and all first/second partial derivatives.

    Raises DomainError for points outside the chart rectangle and
    CapabilityError for tabulated charts without second derivatives.
    """
    y1, y2 = float(y[0]), float(y[1])
    tol = 1e-12 * (1.0 + chart.domain.diameter)
    if not chart.domain.contains(y1, y2, tol=tol):
        raise DomainError(
            f"point ({y1}, {y2}) outside chart domain {chart.domain.as_tuple()}"
        )
    return chart.jet(y1, y2)


@dataclasses.dataclass
class SurfaceFrame:
    """Pointwise geometry bundle of a chart.

    Index conventions (Greek indices run over 0, 1):

    - ``a_cov[a, b]`` / ``a_con[a, b]``: covariant / contravariant metric.
    - ``b_cov[a, b]``: covariant curvature; ``b_mix[s, a]`` holds the mixed
      component with contravariant index ``s`` and covariant index ``a``.
    - ``christoffel[s, a, b]``: connection coefficient with upper index ``s``,
      symmetric in (a, b).
    - ``b_covdev[s, b, a]``: covariant derivative of the mixed curvature,
      derivative index last.
    """

    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    a_cov: np.ndarray
    a_con: np.ndarray
    b_cov: np.ndarray
    b_mix: np.ndarray
    christoffel: np.ndarray
    b_covdev: np.ndarray
    sqrt_a: float


def _metric_and_curvature(jet: ChartJet):
    a1, a2 = jet.d1, jet.d2
    cross = np.cross(a1, a2)
    cross_norm = float(np.linalg.norm(cross))
    if cross_norm < DEGENERACY_THRESHOLD:
        raise GeometryError(
            f"degenerate tangents: |a1 x a2| = {cross_norm:.3e} < {DEGENERACY_THRESHOLD}"
        )
    a3 = cross / cross_norm
    a_cov = np.array([[a1 @ a1, a1 @ a2], [a1 @ a2, a2 @ a2]])
    det = a_cov[0, 0] * a_cov[1, 1] - a_cov[0, 1] * a_cov[1, 0]
    a_con = np.array([[a_cov[1, 1], -a_cov[0, 1]], [-a_cov[1, 0], a_cov[0, 0]]]) / det
    b_cov = np.array(
        [[a3 @ jet.d11, a3 @ jet.d12], [a3 @ jet.d12, a3 @ jet.d22]]
    )
    return a3, a_cov, a_con, b_cov, det


def _mixed_curvature(chart: Chart, y1: float, y2: float) -> np.ndarray:
    jet = eval_chart(chart, (y1, y2))
    _, _, a_con, b_cov, _ = _metric_and_curvature(jet)
    return a_con @ b_cov


def frame_at(chart: Chart, y) -> SurfaceFrame:
    """Assemble the full surface frame at a parameter point.

    The derivative of the mixed curvature needed for ``b_covdev`` is taken by
    central differences of the closed-form mixed-curvature field (step
    ``CURVATURE_FD_SCALE * domain diameter``, stencil clamped to the domain),
    which avoids requiring third chart derivatives.
    """
    jet = eval_chart(chart, y)
    a3, a_cov, a_con, b_cov, det = _metric_and_curvature(jet)
    b_mix = a_con @ b_cov

    second = np.empty((2, 2, 3))
    second[0, 0] = jet.d11
    second[0, 1] = jet.d12
    second[1, 0] = jet.d12
    second[1, 1] = jet.d22

    # Contravariant tangent basis a^s = a_con[s, t] a_t.
    tangents = np.vstack([jet.d1, jet.d2])
    con_basis = a_con @ tangents
    christoffel = np.einsum("sk,abk->sab", con_basis, second)

    h = CURVATURE_FD_SCALE * chart.domain.diameter
    y1, y2 = float(y[0]), float(y[1])
    db = np.empty((2, 2, 2))  # db[t] = d_t b_mix
    for t, (e1, e2) in enumerate(((1.0, 0.0), (0.0, 1.0))):
        yp = chart.domain.clamp(y1 + h * e1, y2 + h * e2)
        ym = chart.domain.clamp(y1 - h * e1, y2 - h * e2)
        span = math.hypot(yp[0] - ym[0], yp[1] - ym[1])
        db[t] = (_mixed_curvature(chart, *yp) - _mixed_curvature(chart, *ym)) / span

    # b^s_b|a = d_a b^s_b + Gamma^s_{a t} b^t_b - Gamma^t_{a b} b^s_t
    b_covdev = (
        np.einsum("asb->sba", db)
        + np.einsum("sat,tb->sba", christoffel, b_mix)
        - np.einsum("tab,st->sba", christoffel, b_mix)
    )

    return SurfaceFrame(
        a1=jet.d1,
        a2=jet.d2,
        a3=a3,
        a_cov=a_cov,
        a_con=a_con,
        b_cov=b_cov,
        b_mix=b_mix,
        christoffel=christoffel,
        b_covdev=b_covdev,
        sqrt_a=math.sqrt(det),
    )


@dataclasses.dataclass
class ChartValidation:
    """Finite-difference cross-check of a chart's derivative data."""

    samples: int
    step: float
    max_first_deriv_error: float
    max_second_deriv_error: float
    max_curvature_identity_error: float
    max_codazzi_asymmetry: float
    min_tangent_cross_norm: float
    first_deriv_tol: float
    second_deriv_tol: float
    curvature_identity_tol: float
    codazzi_tol: float

    @property
    def ok(self) -> bool:
        return (
            self.max_first_deriv_error <= self.first_deriv_tol
            and self.max_second_deriv_error <= self.second_deriv_tol
            and self.max_curvature_identity_error <= self.curvature_identity_tol
            and self.max_codazzi_asymmetry <= self.codazzi_tol
            and self.min_tangent_cross_norm >= DEGENERACY_THRESHOLD
        )

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return (
            f"chart validation {status}: first-deriv {self.max_first_deriv_error:.3e}, "
            f"second-deriv {self.max_second_deriv_error:.3e}, "
            f"curvature identity {self.max_curvature_identity_error:.3e}, "
            f"codazzi {self.max_codazzi_asymmetry:.3e}, "
            f"min |a1 x a2| {self.min_tangent_cross_norm:.3e}"
        )


def validate_chart(
    chart: Chart,
    samples: int = 10,
    step: float = 1e-5,
    tol: float = 1e-6,
) -> ChartValidation:
    """Cross-check chart derivatives by central finite differences on a grid.

    The sample grid is inset from the domain boundary so every stencil is
    central.  The report also carries the curvature identity
    ``b_ab = -(d_b a3) . a_a`` and the Codazzi symmetry of the covariant
    curvature derivative; :attr:`ChartValidation.ok` applies the thresholds.
    """
    rect = chart.domain
    inset = 2.0 * max(step, CURVATURE_FD_SCALE * rect.diameter)
    y1s = np.linspace(rect.y1_min + inset, rect.y1_max - inset, samples)
    y2s = np.linspace(rect.y2_min + inset, rect.y2_max - inset, samples)

    def fd(fun, y1, y2, axis):
        # Divide by the realized stencil span so affine charts difference
        # exactly in floating point.
        if axis == 0:
            span = (y1 + step) - (y1 - step)
            return (fun(y1 + step, y2) - fun(y1 - step, y2)) / span
        span = (y2 + step) - (y2 - step)
        return (fun(y1, y2 + step) - fun(y1, y2 - step)) / span

    def pos(y1, y2):
        return eval_chart(chart, (y1, y2)).position

    def tangent(idx):
        return lambda y1, y2: eval_chart(chart, (y1, y2))[1 + idx]

    def normal(y1, y2):
        jet = eval_chart(chart, (y1, y2))
        cross = np.cross(jet.d1, jet.d2)
        return cross / np.linalg.norm(cross)

    err1 = 0.0
    err2 = 0.0
    err_b = 0.0
    err_codazzi = 0.0
    min_cross = math.inf
    for y1 in y1s:
        for y2 in y2s:
            jet = eval_chart(chart, (y1, y2))
            min_cross = min(min_cross, float(np.linalg.norm(np.cross(jet.d1, jet.d2))))
            err1 = max(err1, float(np.max(np.abs(fd(pos, y1, y2, 0) - jet.d1))))
            err1 = max(err1, float(np.max(np.abs(fd(pos, y1, y2, 1) - jet.d2))))
            err2 = max(err2, float(np.max(np.abs(fd(tangent(0), y1, y2, 0) - jet.d11))))
            err2 = max(err2, float(np.max(np.abs(fd(tangent(0), y1, y2, 1) - jet.d12))))
            err2 = max(err2, float(np.max(np.abs(fd(tangent(1), y1, y2, 0) - jet.d12))))
            err2 = max(err2, float(np.max(np.abs(fd(tangent(1), y1, y2, 1) - jet.d22))))

            frame = frame_at(chart, (y1, y2))
            # b_ab = a3 . d_b a_a must match -(d_b a3) . a_a.
            for b in range(2):
                dn = fd(normal, y1, y2, b)
                err_b = max(err_b, abs(-(dn @ frame.a1) - frame.b_cov[0, b]))
                err_b = max(err_b, abs(-(dn @ frame.a2) - frame.b_cov[1, b]))
            err_codazzi = max(
                err_codazzi,
                float(np.max(np.abs(frame.b_covdev - frame.b_covdev.transpose(0, 2, 1)))),
            )

    return ChartValidation(
        samples=samples,
        step=step,
        max_first_deriv_error=err1,
        max_second_deriv_error=err2,
        max_curvature_identity_error=err_b,
        max_codazzi_asymmetry=err_codazzi,
        min_tangent_cross_norm=min_cross,
        first_deriv_tol=tol,
        second_deriv_tol=tol,
        curvature_identity_tol=max(1e-10, tol),
        codazzi_tol=tol,
    )
