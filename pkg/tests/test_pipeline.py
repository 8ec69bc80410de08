"""Config parsing, the end-to-end pipeline, file outputs and the CLI."""

import dataclasses

import numpy as np
import pytest
import scipy.sparse.linalg as spla

from shellvi import ConfigError, ParameterError, PipelineError, build_mesh
from shellvi.cli import main
from shellvi.config import parse_config_text
from shellvi.output import export_vtk, read_csv
from shellvi.pipeline import dump_problem, run, sweep

MEMBRANE_TEXT = """
problem.kind = membrane
chart.kind = sphere_graph
chart.radius = 2.0
chart.domain = -0.6 0.6 -0.6 0.6
material.lambda = 1.0
material.mu = 1.0
thickness.eps = 0.01
mesh.nx = 8
mesh.ny = 8
boundary.gamma0 = all
load.f3 = -1.0
solver.method = activeset
output.prefix = mem
output.timestamp = false
"""

FLEXURAL_TEXT = """
problem.kind = flexural
chart.kind = plane
chart.domain = 0 1 0 1
material.lambda = 1.0
material.mu = 1.0
thickness.eps = 0.1
mesh.nx = 6
mesh.ny = 6
boundary.gamma0 = all
load.f3 = 0 0 1.0   # quadratic profile: resultant scales as eps^3
solver.method = activeset
output.prefix = flex
output.timestamp = false
"""


def membrane_config(tmp_path, **overrides):
    cfg = parse_config_text(MEMBRANE_TEXT)
    cfg.output_dir = str(tmp_path / "out")
    return dataclasses.replace(cfg, **overrides).validate() if overrides else cfg


def flexural_config(tmp_path, **overrides):
    cfg = parse_config_text(FLEXURAL_TEXT)
    cfg.output_dir = str(tmp_path / "out")
    return dataclasses.replace(cfg, **overrides).validate() if overrides else cfg


class TestConfig:
    def test_parse_full_example(self):
        cfg = parse_config_text(MEMBRANE_TEXT)
        assert cfg.problem_kind == "membrane"
        assert cfg.chart_kind == "sphere_graph"
        assert cfg.chart_params == {"radius": 2.0}
        assert cfg.domain == (-0.6, 0.6, -0.6, 0.6)
        assert cfg.f_coeffs == ((), (), (-1.0,))
        assert cfg.solver == "activeset"
        assert cfg.timestamp is False

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("problem.kind = membrane\nchart.radus = 2\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("mesh.nx = 2\nmesh.nx = 3\n")

    def test_membrane_requires_full_clamping(self):
        text = MEMBRANE_TEXT + "boundary.gamma0 = left right\n"
        with pytest.raises(ConfigError):
            parse_config_text(text.replace("boundary.gamma0 = all\n", ""))

    def test_invalid_numbers_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("thickness.eps = 0.0\n")
        with pytest.raises(ConfigError):
            parse_config_text("material.mu = -1\n")
        with pytest.raises(ConfigError):
            parse_config_text("mesh.nx = 2.5\n")

    def test_penalty_default(self):
        cfg = parse_config_text(FLEXURAL_TEXT)
        assert cfg.penalty() == pytest.approx(1e3 * cfg.mu * cfg.eps)
        cfg.kappa = 7.0
        assert cfg.penalty() == 7.0


class TestMembraneRun:
    def test_downward_load_binds_contact(self, tmp_path):
        bundle = run(membrane_config(tmp_path))
        assert bundle.converged
        assert len(bundle.report.active_set) > 0
        lam = bundle.qp.A @ bundle.report.x - bundle.qp.b
        assert np.min(lam[bundle.qp.constrained]) >= -1e-10
        assert np.all(bundle.pressure >= -1e-12)

    def test_upward_load_matches_unconstrained_solve(self, tmp_path):
        cfg = membrane_config(tmp_path, f_coeffs=((), (), (1.0,)))
        bundle = run(cfg, write=False)
        assert bundle.converged
        assert len(bundle.report.active_set) == 0
        x_free = spla.spsolve(bundle.qp.A.tocsc(), bundle.qp.b)
        assert np.max(np.abs(bundle.report.x - x_free)) <= 1e-10

    def test_zero_loads_zero_fields(self, tmp_path):
        cfg = membrane_config(tmp_path, f_coeffs=((), (), ()), h_top=(0.0, 0.0, 0.0))
        bundle = run(cfg, write=False)
        assert bundle.energy == 0.0
        assert np.all(bundle.xi1 == 0.0) and np.all(bundle.xi3 == 0.0)
        assert len(bundle.report.active_set) == 0

    def test_psor_and_activeset_agree(self, tmp_path):
        cfg = membrane_config(
            tmp_path, f_coeffs=((), (), (1.0,)), nx=4, ny=4, solver="psor", tol=1e-12
        )
        b1 = run(cfg, write=False)
        b2 = run(dataclasses.replace(cfg, solver="activeset"), write=False)
        assert np.max(np.abs(b1.report.x - b2.report.x)) <= 1e-8

    def test_descaled_and_scaled_problems_coincide(self, tmp_path):
        # thickness eps with tractions eps * h1 versus unit thickness with h1
        eps = 0.05
        h1 = (0.0, 0.0, 0.5)
        cfg_eps = membrane_config(
            tmp_path,
            eps=eps,
            f_coeffs=((), (), (1.0,)),
            h_top=tuple(eps * h for h in h1),
        )
        cfg_one = membrane_config(tmp_path, eps=1.0, f_coeffs=((), (), (1.0,)), h_top=h1)
        b_eps = run(cfg_eps, write=False)
        b_one = run(cfg_one, write=False)
        assert np.max(np.abs(b_eps.report.x - b_one.report.x)) <= 1e-9

    def test_strain_and_u1_tables_populated(self, tmp_path):
        bundle = run(membrane_config(tmp_path, f_coeffs=((), (), (1.0,))), write=False)
        mesh = bundle.mesh
        assert len(bundle.strain_table["e33"]) == 4 * mesh.n_elems
        assert len(bundle.u1_table["x3"]) == 3 * mesh.n_elems
        # midsurface slice of the correction vanishes when xi1 data is zero
        mid = bundle.u1_table["x3"] == 0.0
        assert np.all(bundle.u1_table["u1_1"][mid] == 0.0)


class TestFlexuralRun:
    def test_upward_quadratic_profile(self, tmp_path):
        bundle = run(flexural_config(tmp_path), write=False)
        assert bundle.converged
        assert len(bundle.report.active_set) == 0
        assert bundle.energy < 0.0
        assert bundle.penalty_share <= 1e-12  # flat chart decouples the penalty

    def test_downward_profile_fully_active(self, tmp_path):
        cfg = flexural_config(tmp_path, f_coeffs=((), (), (0.0, 0.0, -1.0)))
        bundle = run(cfg, write=False)
        assert bundle.converged
        assert len(bundle.report.active_set) == len(bundle.qp.constrained)
        assert np.max(np.abs(bundle.report.x)) <= 1e-12

    def test_partially_clamped_cylinder(self, tmp_path):
        cfg = flexural_config(tmp_path, gamma0=("left",))
        cfg.chart_kind = "cylinder"
        cfg.chart_params = {"radius": 1.0}
        cfg.domain = (-0.5, 2.0, -1.0, 1.0)
        bundle = run(cfg, write=False)
        assert bundle.converged
        assert 0.0 <= bundle.penalty_share <= 1.0
        # free-edge nodes carry DOFs, clamped-edge nodes do not
        space = bundle.qp.meta["space"]
        assert space.n_free_nodes == bundle.mesh.n_nodes - (bundle.mesh.ny + 1)


class TestSweep:
    def test_eps_sweep_cubic_energy_scaling(self, tmp_path):
        cfg = flexural_config(tmp_path)
        rows, bundles, path = sweep(cfg, "eps", [0.1, 0.2])
        assert all(e == "" for e in rows["error"])
        ratio = rows["energy"][1] / rows["energy"][0]
        assert ratio == pytest.approx(8.0, rel=1e-6)
        # identical displacement fields: the load resultant scales as eps^3
        assert np.max(np.abs(bundles[0].report.x - bundles[1].report.x)) <= 1e-8
        assert path is not None

    def test_mesh_sweep_energy_decreases(self, tmp_path):
        cfg = membrane_config(tmp_path, f_coeffs=((), (), (1.0,)), solver="activeset")
        rows, _, _ = sweep(cfg, "mesh", [4, 8, 16], write=False)
        e = rows["energy"]
        assert e[0] >= e[1] >= e[2]
        assert abs(e[2] - e[1]) <= abs(e[1] - e[0])

    def test_single_value_rejected(self, tmp_path):
        with pytest.raises(ParameterError):
            sweep(membrane_config(tmp_path), "eps", [0.1])

    def test_per_run_errors_recorded(self, tmp_path):
        cfg = membrane_config(tmp_path)
        rows, bundles, _ = sweep(cfg, "eps", [0.01, -1.0], write=False)
        assert rows["error"][0] == ""
        assert rows["error"][1] != ""
        assert bundles[1] is None


class TestDeterminismAndRoundTrip:
    def test_byte_identical_reruns(self, tmp_path):
        cfg = membrane_config(tmp_path, f_coeffs=((), (), (1.0,)), nx=4, ny=4)
        b1 = run(cfg)
        first = {name: open(path, "rb").read() for name, path in b1.files.items()}
        b2 = run(cfg)
        for name, path in b2.files.items():
            assert open(path, "rb").read() == first[name], name

    def test_csv_round_trip_bit_exact(self, tmp_path):
        bundle = run(membrane_config(tmp_path, f_coeffs=((), (), (1.0,)), nx=4, ny=4))
        parsed = read_csv(bundle.files["fields"])
        for name, col in bundle.fields_table.items():
            assert np.array_equal(parsed[name], np.asarray(col, dtype=float)), name
        strain = read_csv(bundle.files["strain"])
        for name, col in bundle.strain_table.items():
            assert np.array_equal(strain[name], np.asarray(col, dtype=float)), name

    def test_timestamp_line_present_when_enabled(self, tmp_path):
        cfg = membrane_config(tmp_path, nx=2, ny=2, timestamp=True)
        bundle = run(cfg)
        head = open(bundle.files["fields"], "r").readline()
        assert head.startswith("# generated:")


class TestExportVtk:
    def test_counting_and_cell_data(self, tmp_path):
        mesh = build_mesh(2, 2, (0, 1, 0, 1), "all")
        path = tmp_path / "m.vtk"
        export_vtk(mesh, [("ones", "cell", np.ones(4))], path)
        text = path.read_text().splitlines()
        assert "POINTS 9 double" in text
        assert "CELLS 4 20" in text
        assert "CELL_DATA 4" in text
        idx = text.index("LOOKUP_TABLE default")
        assert text[idx + 1 : idx + 5] == ["1.0"] * 4

    def test_geometry_only_file(self, tmp_path):
        mesh = build_mesh(2, 2, (0, 1, 0, 1), "all")
        path = tmp_path / "g.vtk"
        export_vtk(mesh, [], path)
        text = path.read_text()
        assert "POINT_DATA" not in text and "CELL_DATA" not in text

    def test_mismatched_field_rejected_before_write(self, tmp_path):
        mesh = build_mesh(2, 2, (0, 1, 0, 1), "all")
        path = tmp_path / "bad.vtk"
        with pytest.raises(ParameterError):
            export_vtk(mesh, [("f", "point", np.ones(5))], path)
        assert not path.exists()

    def test_vector_point_data(self, tmp_path):
        mesh = build_mesh(1, 1, (0, 1, 0, 1), "all")
        path = tmp_path / "v.vtk"
        export_vtk(mesh, [("disp", "point", np.ones((4, 3)))], path)
        text = path.read_text()
        assert "VECTORS disp double" in text


class TestStageTagging:
    def test_missing_tabulated_file_is_geometry_stage(self, tmp_path):
        cfg = membrane_config(tmp_path)
        cfg.chart_kind = "tabulated"
        cfg.chart_params = {"file": str(tmp_path / "missing.dat")}
        with pytest.raises(PipelineError) as err:
            run(cfg, write=False)
        assert err.value.stage == "geometry"


class TestTabulatedChartPipeline:
    def test_membrane_on_tabulated_sphere_matches_preset(self, tmp_path):
        from shellvi import make_chart, write_tabulated_chart

        preset = make_chart("sphere_graph", {"radius": 2.0}, (-0.6, 0.6, -0.6, 0.6))
        path = tmp_path / "sphere.dat"
        write_tabulated_chart(path, preset, 48, 48)
        cfg_tab = membrane_config(tmp_path, nx=4, ny=4, f_coeffs=((), (), (1.0,)))
        cfg_tab.chart_kind = "tabulated"
        cfg_tab.chart_params = {"file": str(path)}
        cfg_tab.domain = None
        b_tab = run(cfg_tab, write=False)
        b_ref = run(membrane_config(tmp_path, nx=4, ny=4, f_coeffs=((), (), (1.0,))), write=False)
        assert b_tab.converged
        # the spline chart reproduces the preset run to interpolation accuracy
        assert np.max(np.abs(b_tab.report.x - b_ref.report.x)) <= 1e-4 * max(
            1.0, np.max(np.abs(b_ref.report.x))
        )


class TestDumpProblem:
    def test_dump_files_written(self, tmp_path):
        cfg = membrane_config(tmp_path, nx=2, ny=2)
        files = dump_problem(cfg)
        header = open(files["matrix"]).readline().split()
        assert header[0] == "#" and header[1] == "6"
        vec = [float(v) for v in open(files["vector"]).read().split()]
        assert len(vec) == 6


class TestCli:
    def write_cfg(self, tmp_path, text, name="run.cfg"):
        path = tmp_path / name
        path.write_text(text + f"output.dir = {tmp_path / 'out'}\n")
        return str(path)

    def test_run_verb(self, tmp_path, capsys):
        path = self.write_cfg(tmp_path, MEMBRANE_TEXT)
        assert main(["run", path]) == 0
        out = capsys.readouterr().out
        assert "membrane solve" in out and "wrote vtk" in out

    def test_run_solver_and_tol_flags(self, tmp_path):
        path = self.write_cfg(tmp_path, MEMBRANE_TEXT)
        assert main(["run", path, "--solver", "psor", "--tol", "1e-9", "--no-timestamp"]) == 0

    def test_sweep_verb(self, tmp_path, capsys):
        path = self.write_cfg(tmp_path, FLEXURAL_TEXT)
        assert main(["sweep", path, "--param", "eps", "--values", "0.1", "0.2"]) == 0
        assert "sweep over eps" in capsys.readouterr().out

    def test_sweep_single_value_fails_cleanly(self, tmp_path, capsys):
        path = self.write_cfg(tmp_path, FLEXURAL_TEXT)
        assert main(["sweep", path, "--param", "eps", "--values", "0.1"]) == 1
        assert "error" in capsys.readouterr().err

    def test_validate_chart_verb(self, tmp_path, capsys):
        path = self.write_cfg(tmp_path, MEMBRANE_TEXT)
        assert main(["validate-chart", path]) == 0
        assert "chart validation PASS" in capsys.readouterr().out

    def test_dump_qp_verb(self, tmp_path):
        path = self.write_cfg(tmp_path, MEMBRANE_TEXT)
        assert main(["dump-qp", path]) == 0

    def test_bad_config_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("problem.kind = rocket\n")
        assert main(["run", str(bad)]) == 1
        assert "error" in capsys.readouterr().err

    def test_nonconverged_run_exits_two_with_files(self, tmp_path, capsys):
        text = MEMBRANE_TEXT.replace("solver.method = activeset", "solver.method = psor")
        text += "solver.max_iter = 1\nload.h3 = 0.7\n"
        path = self.write_cfg(tmp_path, text.replace("load.f3 = -1.0", "load.f3 = 1.0"))
        assert main(["run", path]) == 2
        out = capsys.readouterr().out
        assert "converged=False" in out
        assert (tmp_path / "out" / "mem_fields.csv").exists()
