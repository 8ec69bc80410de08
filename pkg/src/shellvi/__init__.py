"""Obstacle-problem solvers for elastic membrane and flexural shells."""

from .discretization import (
    Mesh,
    ObstacleQP,
    assemble_flexural,
    assemble_membrane,
    build_mesh,
    element_quadrature,
)
from .errors import (
    CapabilityError,
    ConfigError,
    DomainError,
    GeometryError,
    ParameterError,
    PipelineError,
    ShellviError,
)
from .geometry import (
    Chart,
    ChartJet,
    Rect,
    SurfaceFrame,
    eval_chart,
    frame_at,
    load_tabulated_chart,
    make_chart,
    validate_chart,
    write_tabulated_chart,
)
from .shell_tensors import (
    VoigtTensor2D,
    elasticity_tensor,
    gamma_of,
    load_resultant,
    polynomial_profile,
    reconstruct_u1,
    rho_of,
    transverse_strain,
)
from .vi_solver import (
    SolveReport,
    brute_force_oracle,
    complementarity_residual,
    solve_active_set,
    solve_psor,
)
from .config import RunConfig, parse_config_file, parse_config_text
from .output import export_vtk, read_csv, write_csv
from .pipeline import ResultBundle, dump_problem, run, sweep

__version__ = "0.1.0"
