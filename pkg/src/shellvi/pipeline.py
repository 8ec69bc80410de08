"""End-to-end pipeline: configuration to solved fields and result files.

``run`` executes chart validation, meshing, assembly, the obstacle-QP solve
and post-processing (transverse strain, first-order thickness correction,
contact pressure), then writes the CSV tables and a VTK file.  ``sweep``
repeats a run over a parameter list and tabulates the outcomes.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

import numpy as np

from .config import RunConfig
from .discretization import (
    Mesh,
    ObstacleQP,
    assemble_flexural,
    assemble_membrane,
    build_mesh,
    dump_qp,
    flexural_strains,
    membrane_strains,
)
from .errors import ParameterError, PipelineError, ShellviError
from .geometry import Chart, ChartValidation, eval_chart, frame_at, make_chart, validate_chart
from .output import export_vtk, timestamp_line, write_csv
from .shell_tensors import load_resultant, polynomial_profile, reconstruct_u1, transverse_strain
from .vi_solver import SolveReport, solve_active_set, solve_psor

#: Scaled transverse coordinates of the exported thickness-correction slices.
U1_SLICES = (-1.0, 0.0, 1.0)


@dataclasses.dataclass
class ResultBundle:
    """Solved fields of one run plus the export tables.

    ``xi1``/``xi2`` are nodal; ``xi3`` and ``active`` live on elements for
    the membrane problem and on nodes for the flexural problem.  The tables
    are column dictionaries mirroring the CSV files.
    """

    kind: str
    config: RunConfig
    mesh: Mesh
    chart: Chart
    qp: ObstacleQP
    report: SolveReport
    validation: ChartValidation
    xi1: np.ndarray
    xi2: np.ndarray
    xi3: np.ndarray
    active: np.ndarray
    pressure: np.ndarray
    penalty_share: float
    fields_table: dict
    strain_table: dict
    u1_table: dict
    files: dict = dataclasses.field(default_factory=dict)

    @property
    def energy(self) -> float:
        return self.report.energy

    @property
    def converged(self) -> bool:
        return self.report.converged


def chart_from_config(config: RunConfig) -> Chart:
    return make_chart(config.chart_kind, config.chart_params, config.domain)


def load_from_config(config: RunConfig) -> np.ndarray:
    profile = None
    if any(len(c) for c in config.f_coeffs):
        profile = polynomial_profile(*config.f_coeffs)
    return load_resultant(profile, np.asarray(config.h_top, dtype=float), config.eps)


def _solve(config: RunConfig, qp: ObstacleQP) -> SolveReport:
    if config.solver == "psor":
        return solve_psor(qp, relax=config.relax, tol=config.tol, max_iter=config.max_iter)
    return solve_active_set(qp, tol=config.tol, max_outer=max(100, config.max_iter // 100))


def _nodal_tangential(space, x):
    mesh = space.mesh
    xi1 = np.zeros(mesh.n_nodes)
    xi2 = np.zeros(mesh.n_nodes)
    free = space.node_map >= 0
    xi1[free] = x[space.node_map[free]]
    xi2[free] = x[space.node_map[free] + space.n_free_nodes]
    return xi1, xi2


def _pressure(qp: ObstacleQP, report: SolveReport) -> np.ndarray:
    """Contact-pressure proxy: multiplier per lumped DOF area on the active
    set (nonnegative for a compressive reaction), zero elsewhere."""
    lam = qp.A @ report.x - qp.b
    pressure = np.zeros(len(qp.constrained))
    active = set(int(i) for i in report.active_set)
    for k, dof in enumerate(qp.constrained):
        if int(dof) in active and qp.obstacle_areas[k] > 0.0:
            pressure[k] = lam[dof] / qp.obstacle_areas[k]
    return pressure


def _membrane_bundle(config, chart, mesh, qp, report, validation) -> ResultBundle:
    space = qp.meta["space"]
    x = report.x
    xi1, xi2 = _nodal_tangential(space, x)
    xi3 = x[space.w_offset :].copy()
    active = np.zeros(mesh.n_elems, dtype=int)
    for dof in report.active_set:
        active[int(dof) - space.w_offset] = 1

    centers = np.array([mesh.element_center(e) for e in range(mesh.n_elems)])
    xi1_c = xi1[mesh.elems].mean(axis=1)
    xi2_c = xi2[mesh.elems].mean(axis=1)
    fields_table = {
        "y1": centers[:, 0],
        "y2": centers[:, 1],
        "xi1": xi1_c,
        "xi2": xi2_c,
        "xi3": xi3,
        "active_flag": active,
    }

    coords, frames, gammas = membrane_strains(mesh, chart, space, x)
    e33 = np.array(
        [transverse_strain(f, g, config.lam, config.mu) for f, g in zip(frames, gammas)]
    )
    strain_table = {"y1": coords[:, 0], "y2": coords[:, 1], "e33": e33}

    rows = {"y1": [], "y2": [], "x3": [], "u1_1": [], "u1_2": [], "u1_3": []}
    zero3 = np.zeros(3)
    zero_grads = np.zeros((3, 2))
    for e in range(mesh.n_elems):
        frame = frame_at(chart, centers[e])
        vals = np.array([xi1_c[e], xi2_c[e], xi3[e]])
        for x3 in U1_SLICES:
            u1 = reconstruct_u1(frame, vals, zero_grads, zero3, x3)
            rows["y1"].append(centers[e, 0])
            rows["y2"].append(centers[e, 1])
            rows["x3"].append(x3)
            rows["u1_1"].append(u1[0])
            rows["u1_2"].append(u1[1])
            rows["u1_3"].append(u1[2])
    u1_table = {k: np.array(v) for k, v in rows.items()}

    return ResultBundle(
        kind="membrane",
        config=config,
        mesh=mesh,
        chart=chart,
        qp=qp,
        report=report,
        validation=validation,
        xi1=xi1,
        xi2=xi2,
        xi3=xi3,
        active=active,
        pressure=_pressure(qp, report),
        penalty_share=0.0,
        fields_table=fields_table,
        strain_table=strain_table,
        u1_table=u1_table,
    )


def _flexural_bundle(config, chart, mesh, qp, report, validation) -> ResultBundle:
    space = qp.meta["space"]
    x = report.x
    xi1, xi2 = _nodal_tangential(space, x)
    xi3 = np.zeros(mesh.n_nodes)
    grad1 = np.zeros(mesh.n_nodes)
    grad2 = np.zeros(mesh.n_nodes)
    free = space.bfs_map[:, 0] >= 0
    xi3[free] = x[space.bfs_map[free, 0]]
    grad1[free] = x[space.bfs_map[free, 1]]
    grad2[free] = x[space.bfs_map[free, 2]]
    active = np.zeros(mesh.n_nodes, dtype=int)
    active_dofs = set(int(i) for i in report.active_set)
    for n in np.flatnonzero(free):
        if int(space.bfs_map[n, 0]) in active_dofs:
            active[n] = 1

    fields_table = {
        "y1": mesh.nodes[:, 0],
        "y2": mesh.nodes[:, 1],
        "xi1": xi1,
        "xi2": xi2,
        "xi3": xi3,
        "active_flag": active,
    }

    coords, frames, gammas, _ = flexural_strains(mesh, chart, space, x)
    e33 = np.array(
        [transverse_strain(f, g, config.lam, config.mu) for f, g in zip(frames, gammas)]
    )
    strain_table = {"y1": coords[:, 0], "y2": coords[:, 1], "e33": e33}

    rows = {"y1": [], "y2": [], "x3": [], "u1_1": [], "u1_2": [], "u1_3": []}
    zero3 = np.zeros(3)
    for n in range(mesh.n_nodes):
        frame = frame_at(chart, mesh.nodes[n])
        vals = np.array([xi1[n], xi2[n], xi3[n]])
        grads = np.zeros((3, 2))
        grads[2] = (grad1[n], grad2[n])
        for x3 in U1_SLICES:
            u1 = reconstruct_u1(frame, vals, grads, zero3, x3)
            rows["y1"].append(mesh.nodes[n, 0])
            rows["y2"].append(mesh.nodes[n, 1])
            rows["x3"].append(x3)
            rows["u1_1"].append(u1[0])
            rows["u1_2"].append(u1[1])
            rows["u1_3"].append(u1[2])
    u1_table = {k: np.array(v) for k, v in rows.items()}

    denom = float(x @ (qp.A @ x))
    share = float(x @ (qp.parts["penalty"] @ x)) / denom if denom > 0.0 else 0.0

    return ResultBundle(
        kind="flexural",
        config=config,
        mesh=mesh,
        chart=chart,
        qp=qp,
        report=report,
        validation=validation,
        xi1=xi1,
        xi2=xi2,
        xi3=xi3,
        active=active,
        pressure=_pressure(qp, report),
        penalty_share=share,
        fields_table=fields_table,
        strain_table=strain_table,
        u1_table=u1_table,
    )


def surface_points(chart: Chart, mesh: Mesh) -> np.ndarray:
    return np.array([eval_chart(chart, y).position for y in mesh.nodes])


def _write_outputs(bundle: ResultBundle) -> dict:
    config = bundle.config
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    stamp = config.timestamp
    files = {}

    files["fields"] = out / f"{config.prefix}_fields.csv"
    write_csv(files["fields"], bundle.fields_table, timestamp=stamp)
    files["strain"] = out / f"{config.prefix}_strain.csv"
    write_csv(files["strain"], bundle.strain_table, timestamp=stamp)
    files["u1"] = out / f"{config.prefix}_u1.csv"
    write_csv(files["u1"], bundle.u1_table, timestamp=stamp)

    if bundle.kind == "membrane":
        fields = [
            ("xi1", "point", bundle.xi1),
            ("xi2", "point", bundle.xi2),
            ("xi3", "cell", bundle.xi3),
            ("active", "cell", bundle.active),
        ]
    else:
        fields = [
            ("xi1", "point", bundle.xi1),
            ("xi2", "point", bundle.xi2),
            ("xi3", "point", bundle.xi3),
            ("active", "point", bundle.active),
        ]
    files["vtk"] = out / f"{config.prefix}_result.vtk"
    export_vtk(
        bundle.mesh,
        fields,
        files["vtk"],
        points=surface_points(bundle.chart, bundle.mesh),
        title=(timestamp_line()[2:] if stamp else "shellvi result"),
    )
    return {k: str(v) for k, v in files.items()}


def run(config: RunConfig, write: bool = True) -> ResultBundle:
    """Execute the full pipeline for one configuration.

    Stage failures raise :class:`PipelineError` tagged with the stage name;
    a non-converged solve does not raise (the report and files still carry
    the best iterate; callers decide the exit status).
    """
    config.validate()

    def stage(name, fn):
        try:
            return fn()
        except PipelineError:
            raise
        except (ShellviError, ValueError, OSError) as exc:
            raise PipelineError(name, str(exc)) from exc

    chart = stage("geometry", lambda: chart_from_config(config))
    # Interpolated charts cannot meet closed-form derivative bounds; their
    # validator threshold reflects bicubic-spline accuracy instead.
    chart_tol = 1e-3 if config.chart_kind == "tabulated" else 1e-6
    validation = stage("geometry", lambda: validate_chart(chart, samples=8, tol=chart_tol))
    if not validation.ok:
        raise PipelineError("geometry", validation.summary())

    mesh = stage("mesh", lambda: build_mesh(config.nx, config.ny, chart.domain, config.gamma0))
    p_load = stage("assembly", lambda: load_from_config(config))
    if config.problem_kind == "membrane":
        qp = stage(
            "assembly",
            lambda: assemble_membrane(mesh, chart, config.lam, config.mu, config.eps, p_load),
        )
    else:
        qp = stage(
            "assembly",
            lambda: assemble_flexural(
                mesh, chart, config.lam, config.mu, config.eps, p_load, config.penalty()
            ),
        )
    report = stage("solve", lambda: _solve(config, qp))
    build = _membrane_bundle if config.problem_kind == "membrane" else _flexural_bundle
    bundle = stage("post", lambda: build(config, chart, mesh, qp, report, validation))
    if write:
        bundle.files = stage("output", lambda: _write_outputs(bundle))
    return bundle


SWEEP_COLUMNS = (
    "value",
    "energy",
    "active_set_size",
    "residual",
    "converged",
    "penalty_share",
    "error",
)


def sweep(config: RunConfig, parameter: str, values, write: bool = True):
    """Run the pipeline once per parameter value and tabulate the outcomes.

    ``parameter`` is 'eps' (thickness) or 'mesh' (sets nx = ny = value).
    Per-run failures are recorded in the table's error column instead of
    aborting the sweep.
    """
    if parameter not in ("eps", "mesh"):
        raise ParameterError(f"sweep parameter must be 'eps' or 'mesh', got {parameter!r}")
    values = list(values)
    if len(values) < 2:
        raise ParameterError("sweep needs at least two parameter values")

    rows = {name: [] for name in SWEEP_COLUMNS}
    bundles = []
    for v in values:
        if parameter == "eps":
            cfg = dataclasses.replace(config, eps=float(v))
        else:
            cfg = dataclasses.replace(config, nx=int(v), ny=int(v))
        rows["value"].append(float(v))
        try:
            bundle = run(cfg, write=False)
        except (ShellviError, ValueError) as exc:
            bundles.append(None)
            rows["energy"].append(np.nan)
            rows["active_set_size"].append(-1)
            rows["residual"].append(np.nan)
            rows["converged"].append(0)
            rows["penalty_share"].append(np.nan)
            rows["error"].append(str(exc).replace(",", ";"))
            continue
        bundles.append(bundle)
        rows["energy"].append(bundle.energy)
        rows["active_set_size"].append(len(bundle.report.active_set))
        rows["residual"].append(bundle.report.complementarity_residual)
        rows["converged"].append(int(bundle.converged))
        rows["penalty_share"].append(bundle.penalty_share)
        rows["error"].append("")

    path = None
    if write:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{config.prefix}_sweep.csv"
        write_csv(path, rows, timestamp=config.timestamp)
    return rows, bundles, (str(path) if path else None)


def dump_problem(config: RunConfig) -> dict:
    """Assemble the configured QP and dump it in coordinate text format."""
    config.validate()
    chart = chart_from_config(config)
    mesh = build_mesh(config.nx, config.ny, chart.domain, config.gamma0)
    p_load = load_from_config(config)
    if config.problem_kind == "membrane":
        qp = assemble_membrane(mesh, chart, config.lam, config.mu, config.eps, p_load)
    else:
        qp = assemble_flexural(
            mesh, chart, config.lam, config.mu, config.eps, p_load, config.penalty()
        )
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    matrix = out / f"{config.prefix}_matrix.txt"
    vector = out / f"{config.prefix}_vector.txt"
    dump_qp(qp, matrix, vector)
    return {"matrix": str(matrix), "vector": str(vector)}
