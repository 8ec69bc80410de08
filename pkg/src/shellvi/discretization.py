"""Structured meshes, shell finite-element spaces and obstacle QP assembly.

Two discrete problems are assembled over a structured quad mesh of the chart
rectangle:

- membrane: Q1 x Q1 tangential displacements (zero on the clamped boundary)
  with a piecewise-constant normal component carrying one obstacle bound per
  element;
- flexural: Q1 tangential displacements plus a Bogner-Fox-Schmit bicubic
  Hermite normal component (H2-conforming), bending stiffness scaled by
  eps^3/3 and the inextensibility constraint enforced by a quadratic penalty.

Boundary conditions are imposed by DOF elimination, so the assembled operator
is positive definite on the retained subspace and the obstacle bookkeeping is
exact.
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.sparse as sp

from .elements import bfs_shape, q1_grad, q1_shape
from .errors import ParameterError
from .geometry import Chart, Rect, as_rect, frame_at
from .shell_tensors import elasticity_tensor, gamma_of, rho_of

SIDES = ("left", "right", "bottom", "top")

# Weight matrix turning raw Voigt strain vectors (g11, g22, g12) into the
# plain Frobenius square g:g = g11^2 + g22^2 + 2 g12^2.
_FROBENIUS_WEIGHTS = np.diag([1.0, 1.0, 2.0])


@dataclasses.dataclass(frozen=True)
class BoundaryEdge:
    n0: int
    n1: int
    side: str
    on_gamma0: bool


@dataclasses.dataclass
class Mesh:
    """Structured quad grid over a chart rectangle.

    Nodes are numbered lexicographically (y1 fastest); element connectivity
    is counterclockwise starting at the lower-left corner, matching the
    reference-square corner order of the element bases.
    """

    domain: Rect
    nx: int
    ny: int
    nodes: np.ndarray
    elems: np.ndarray
    boundary_edges: list[BoundaryEdge]
    gamma0_nodes: np.ndarray
    hx: float
    hy: float

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elems(self) -> int:
        return self.elems.shape[0]

    @property
    def n_gamma0_edges(self) -> int:
        return sum(1 for e in self.boundary_edges if e.on_gamma0)

    def element_center(self, e: int) -> np.ndarray:
        return self.nodes[self.elems[e]].mean(axis=0)


def _normalize_gamma0(gamma0) -> set[str]:
    if gamma0 is None or gamma0 == "none":
        return set()
    if isinstance(gamma0, str):
        if gamma0 == "all":
            return set(SIDES)
        gamma0 = gamma0.split()
    sides = set(gamma0)
    unknown = sides - set(SIDES)
    if unknown:
        raise ParameterError(f"unknown boundary side(s) {sorted(unknown)}; expected {SIDES}")
    return sides


def build_mesh(nx: int, ny: int, domain, gamma0="all") -> Mesh:
    """Structured quad mesh with clamped-boundary tags.

    ``gamma0`` selects the clamped part of the boundary: 'all', 'none', or
    any subset of {'left', 'right', 'bottom', 'top'} (left/right are the
    y1 = const sides).
    """
    if nx < 1 or ny < 1:
        raise ParameterError(f"element counts must be >= 1, got nx={nx}, ny={ny}")
    rect = as_rect(domain)
    sides = _normalize_gamma0(gamma0)
    y1 = np.linspace(rect.y1_min, rect.y1_max, nx + 1)
    y2 = np.linspace(rect.y2_min, rect.y2_max, ny + 1)
    nodes = np.array([[y1[i], y2[j]] for j in range(ny + 1) for i in range(nx + 1)])
    elems = np.empty((nx * ny, 4), dtype=int)
    for j in range(ny):
        for i in range(nx):
            n00 = i + j * (nx + 1)
            elems[i + j * nx] = (n00, n00 + 1, n00 + nx + 2, n00 + nx + 1)
    edges = []
    for i in range(nx):
        edges.append(BoundaryEdge(i, i + 1, "bottom", "bottom" in sides))
        top0 = i + ny * (nx + 1)
        edges.append(BoundaryEdge(top0, top0 + 1, "top", "top" in sides))
    for j in range(ny):
        edges.append(BoundaryEdge(j * (nx + 1), (j + 1) * (nx + 1), "left", "left" in sides))
        edges.append(
            BoundaryEdge(nx + j * (nx + 1), nx + (j + 1) * (nx + 1), "right", "right" in sides)
        )
    gamma0_nodes = np.zeros(len(nodes), dtype=bool)
    for e in edges:
        if e.on_gamma0:
            gamma0_nodes[e.n0] = True
            gamma0_nodes[e.n1] = True
    return Mesh(
        domain=rect,
        nx=nx,
        ny=ny,
        nodes=nodes,
        elems=elems,
        boundary_edges=edges,
        gamma0_nodes=gamma0_nodes,
        hx=(rect.y1_max - rect.y1_min) / nx,
        hy=(rect.y2_max - rect.y2_min) / ny,
    )


def element_quadrature(order: int):
    """Tensor-product Gauss-Legendre rule on the reference square.

    Returns (points (q, 2), weights (q,)); weights sum to 4.
    """
    if order not in (2, 3, 4):
        raise ParameterError(f"unsupported quadrature order {order}; expected 2, 3 or 4")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    pts = np.array([[x, y] for y in nodes for x in nodes])
    wts = np.array([wx * wy for wy in weights for wx in weights])
    return pts, wts


@dataclasses.dataclass
class MembraneSpace:
    """DOF map of the membrane space: Q1 x Q1 tangential (zero on gamma0
    nodes) plus one piecewise-constant normal DOF per element."""

    mesh: Mesh
    node_map: np.ndarray  # free tangential index per node, -1 on gamma0
    n_free_nodes: int

    @property
    def n_w(self) -> int:
        return self.mesh.n_elems

    @property
    def ndof(self) -> int:
        return 2 * self.n_free_nodes + self.n_w

    @property
    def w_offset(self) -> int:
        return 2 * self.n_free_nodes

    def constrained(self) -> np.ndarray:
        return np.arange(self.w_offset, self.ndof)


def membrane_space(mesh: Mesh) -> MembraneSpace:
    node_map = np.full(mesh.n_nodes, -1, dtype=int)
    free = np.flatnonzero(~mesh.gamma0_nodes)
    node_map[free] = np.arange(len(free))
    return MembraneSpace(mesh=mesh, node_map=node_map, n_free_nodes=len(free))


@dataclasses.dataclass
class FlexuralSpace:
    """DOF map of the flexural space: Q1 tangential plus Bogner-Fox-Schmit
    Hermite normal component (value, d1, d2, d12 per node).

    All four Hermite DOFs are eliminated at gamma0 nodes: a zero trace along
    a clamped edge forces the tangential and mixed derivatives as well as the
    value and normal derivative.
    """

    mesh: Mesh
    node_map: np.ndarray
    n_free_nodes: int
    bfs_map: np.ndarray  # (n_nodes, 4) global DOF indices, -1 where clamped
    n_bfs: int

    @property
    def ndof(self) -> int:
        return 2 * self.n_free_nodes + self.n_bfs

    @property
    def bfs_offset(self) -> int:
        return 2 * self.n_free_nodes

    def constrained(self) -> np.ndarray:
        return self.bfs_map[self.bfs_map[:, 0] >= 0, 0]


def flexural_space(mesh: Mesh) -> FlexuralSpace:
    node_map = np.full(mesh.n_nodes, -1, dtype=int)
    free = np.flatnonzero(~mesh.gamma0_nodes)
    node_map[free] = np.arange(len(free))
    bfs_map = np.full((mesh.n_nodes, 4), -1, dtype=int)
    offset = 2 * len(free)
    for k, n in enumerate(free):
        bfs_map[n] = offset + 4 * k + np.arange(4)
    return FlexuralSpace(
        mesh=mesh,
        node_map=node_map,
        n_free_nodes=len(free),
        bfs_map=bfs_map,
        n_bfs=4 * len(free),
    )


@dataclasses.dataclass
class ObstacleQP:
    """Discrete obstacle-constrained quadratic program
    min 1/2 x' A x - b' x subject to x_i >= lower_bounds_i.

    ``constrained`` lists the DOFs with a finite (zero) lower bound;
    ``obstacle_areas`` holds the lumped surface-measure area of each
    constrained DOF (for contact-pressure post-processing).  ``parts``
    exposes the assembled stiffness contributions (e.g. 'bending' and
    'penalty' for the flexural problem).
    """

    A: sp.csr_matrix
    b: np.ndarray
    lower_bounds: np.ndarray
    constrained: np.ndarray
    obstacle_areas: np.ndarray
    meta: dict
    parts: dict

    @property
    def ndof(self) -> int:
        return self.A.shape[0]


def _element_geometry(mesh: Mesh, e: int, pts: np.ndarray):
    """Chart coordinates of the quadrature points of element e plus the
    (constant) reference-to-chart Jacobian determinant."""
    center = mesh.element_center(e)
    ys = center + 0.5 * pts * np.array([mesh.hx, mesh.hy])
    return ys, 0.25 * mesh.hx * mesh.hy


def _membrane_local_basis(N: np.ndarray, dN: np.ndarray):
    """Per-qp membrane basis data (vals (3,), grads (3, 2)) for the 9 local
    DOFs ordered [u1 x4, u2 x4, w]."""
    basis = []
    for comp in (0, 1):
        for a in range(4):
            vals = np.zeros(3)
            vals[comp] = N[a]
            grads = np.zeros((3, 2))
            grads[comp] = dN[a]
            basis.append((vals, grads))
    basis.append((np.array([0.0, 0.0, 1.0]), np.zeros((3, 2))))
    return basis


def _membrane_global_dofs(space: MembraneSpace, e: int) -> np.ndarray:
    conn = space.mesh.elems[e]
    nm = space.node_map[conn]
    g = np.empty(9, dtype=int)
    g[:4] = nm
    g[4:8] = np.where(nm >= 0, space.n_free_nodes + nm, -1)
    g[8] = space.w_offset + e
    return g


def assemble_membrane(mesh: Mesh, chart: Chart, lam: float, mu: float, eps: float, p_load) -> ObstacleQP:
    """Assemble the membrane obstacle QP: stiffness eps * integral of
    a^{abst} g_st(phi_j) g_ab(phi_i) sqrt(a), load from the resultant
    ``p_load`` (3-vector), obstacle bounds 0 on the normal block.

    The membrane limit problem requires clamping on the whole boundary; a
    non-elliptic chart (det b <= 0 at some quadrature point) is recorded as a
    warning in the QP metadata but does not block assembly.
    """
    if eps <= 0.0:
        raise ParameterError(f"thickness half-width must be positive, got eps={eps}")
    if mesh.n_gamma0_edges != len(mesh.boundary_edges):
        raise ParameterError("the membrane problem requires gamma0 = whole boundary")
    p_load = np.asarray(p_load, dtype=float)
    space = membrane_space(mesh)
    pts, wts = element_quadrature(2)
    shapes = [q1_shape(x, y) for x, y in pts]
    grads_ref = [q1_grad(x, y) for x, y in pts]
    grad_scale = np.array([2.0 / mesh.hx, 2.0 / mesh.hy])

    rows, cols, vals = [], [], []
    b = np.zeros(space.ndof)
    areas = np.zeros(mesh.n_elems)
    elliptic = True
    for e in range(mesh.n_elems):
        ys, jac = _element_geometry(mesh, e, pts)
        gdofs = _membrane_global_dofs(space, e)
        ke = np.zeros((9, 9))
        fe = np.zeros(9)
        for q, (w, y) in enumerate(zip(wts, ys)):
            frame = frame_at(chart, y)
            if frame.b_cov[0, 0] * frame.b_cov[1, 1] - frame.b_cov[0, 1] ** 2 <= 0.0:
                elliptic = False
            dN = grads_ref[q] * grad_scale
            basis = _membrane_local_basis(shapes[q], dN)
            B = np.empty((3, 9))
            comp_vals = np.empty((9, 3))
            for i, (bvals, bgrads) in enumerate(basis):
                g = gamma_of(frame, bvals, bgrads)
                B[:, i] = (g[0, 0], g[1, 1], g[0, 1])
                comp_vals[i] = bvals
            mw = elasticity_tensor(frame.a_con, lam, mu).weighted()
            scale = w * jac * frame.sqrt_a
            ke += scale * (B.T @ mw @ B)
            fe += scale * (comp_vals @ p_load)
            areas[e] += scale
        keep = gdofs >= 0
        idx = np.flatnonzero(keep)
        for i in idx:
            b[gdofs[i]] += fe[i]
            for j in idx:
                rows.append(gdofs[i])
                cols.append(gdofs[j])
                vals.append(ke[i, j])

    k_raw = sp.coo_matrix((vals, (rows, cols)), shape=(space.ndof, space.ndof)).tocsr()
    stiffness = k_raw.copy()
    stiffness.data = eps * k_raw.data
    constrained = space.constrained()
    lower = np.full(space.ndof, -np.inf)
    lower[constrained] = 0.0
    meta = {
        "kind": "membrane",
        "eps": eps,
        "lambda": lam,
        "mu": mu,
        "elliptic": elliptic,
        "warnings": [] if elliptic else ["chart is not elliptic on the quadrature set"],
        "space": space,
    }
    return ObstacleQP(
        A=stiffness,
        b=b,
        lower_bounds=lower,
        constrained=constrained,
        obstacle_areas=areas,
        meta=meta,
        parts={"membrane": stiffness},
    )


def _flexural_local_basis(mesh: Mesh, N, dN, bfs_vals, bfs_grads, bfs_seconds):
    """Per-qp flexural basis data (vals, grads, hess) for the 24 local DOFs
    ordered [u1 x4, u2 x4, bfs x16 node-major].

    Hermite shape functions attached to derivative DOFs are rescaled by the
    element half-widths so their physical derivative DOFs are unity.
    """
    sx, sy = 0.5 * mesh.hx, 0.5 * mesh.hy
    dof_scale = np.tile([1.0, sx, sy, sx * sy], 4)
    gx, gy = 2.0 / mesh.hx, 2.0 / mesh.hy
    basis = []
    for comp in (0, 1):
        for a in range(4):
            vals = np.zeros(3)
            vals[comp] = N[a]
            grads = np.zeros((3, 2))
            grads[comp] = dN[a]
            basis.append((vals, grads, np.zeros((2, 2))))
    for k in range(16):
        s = dof_scale[k]
        vals = np.array([0.0, 0.0, s * bfs_vals[k]])
        grads = np.zeros((3, 2))
        grads[2, 0] = s * bfs_grads[k, 0] * gx
        grads[2, 1] = s * bfs_grads[k, 1] * gy
        hess = np.array(
            [
                [s * bfs_seconds[k, 0] * gx * gx, s * bfs_seconds[k, 2] * gx * gy],
                [s * bfs_seconds[k, 2] * gx * gy, s * bfs_seconds[k, 1] * gy * gy],
            ]
        )
        basis.append((vals, grads, hess))
    return basis


def _flexural_global_dofs(space: FlexuralSpace, e: int) -> np.ndarray:
    conn = space.mesh.elems[e]
    nm = space.node_map[conn]
    g = np.empty(24, dtype=int)
    g[:4] = nm
    g[4:8] = np.where(nm >= 0, space.n_free_nodes + nm, -1)
    g[8:] = space.bfs_map[conn].reshape(-1)
    return g


def assemble_flexural(
    mesh: Mesh,
    chart: Chart,
    lam: float,
    mu: float,
    eps: float,
    p_load,
    kappa: float,
) -> ObstacleQP:
    """Assemble the flexural obstacle QP: bending stiffness
    (eps^3/3) * integral of a^{abst} r_st(phi_j) r_ab(phi_i) sqrt(a) plus the
    inextensibility penalty kappa * integral of g:g sqrt(a); obstacle bounds
    0 on the Hermite value DOFs of unclamped nodes.
    """
    if eps <= 0.0:
        raise ParameterError(f"thickness half-width must be positive, got eps={eps}")
    if kappa <= 0.0:
        raise ParameterError(f"inextensibility penalty must be positive, got kappa={kappa}")
    if mesh.n_gamma0_edges == 0:
        raise ParameterError("the flexural problem requires a nonempty clamped boundary")
    p_load = np.asarray(p_load, dtype=float)
    space = flexural_space(mesh)
    pts, wts = element_quadrature(3)
    shapes = [q1_shape(x, y) for x, y in pts]
    grads_ref = [q1_grad(x, y) for x, y in pts]
    bfs_data = [bfs_shape(x, y) for x, y in pts]
    grad_scale = np.array([2.0 / mesh.hx, 2.0 / mesh.hy])

    rows, cols = [], []
    vals_rho, vals_gam = [], []
    b = np.zeros(space.ndof)
    node_areas = np.zeros(mesh.n_nodes)
    for e in range(mesh.n_elems):
        ys, jac = _element_geometry(mesh, e, pts)
        gdofs = _flexural_global_dofs(space, e)
        conn = mesh.elems[e]
        ke_rho = np.zeros((24, 24))
        ke_gam = np.zeros((24, 24))
        fe = np.zeros(24)
        for q, (w, y) in enumerate(zip(wts, ys)):
            frame = frame_at(chart, y)
            dN = grads_ref[q] * grad_scale
            basis = _flexural_local_basis(mesh, shapes[q], dN, *bfs_data[q])
            Br = np.empty((3, 24))
            Bg = np.empty((3, 24))
            comp_vals = np.empty((24, 3))
            for i, (bvals, bgrads, bhess) in enumerate(basis):
                g = gamma_of(frame, bvals, bgrads)
                r = rho_of(frame, bvals, bgrads, bhess)
                Bg[:, i] = (g[0, 0], g[1, 1], g[0, 1])
                Br[:, i] = (r[0, 0], r[1, 1], r[0, 1])
                comp_vals[i] = bvals
            mw = elasticity_tensor(frame.a_con, lam, mu).weighted()
            scale = w * jac * frame.sqrt_a
            ke_rho += scale * (Br.T @ mw @ Br)
            ke_gam += scale * (Bg.T @ _FROBENIUS_WEIGHTS @ Bg)
            fe += scale * (comp_vals @ p_load)
            # Lumped surface area of the Hermite value DOFs.
            for a in range(4):
                node_areas[conn[a]] += scale * basis[8 + 4 * a][0][2]
        keep = gdofs >= 0
        idx = np.flatnonzero(keep)
        for i in idx:
            b[gdofs[i]] += fe[i]
            for j in idx:
                rows.append(gdofs[i])
                cols.append(gdofs[j])
                vals_rho.append(ke_rho[i, j])
                vals_gam.append(ke_gam[i, j])

    shape = (space.ndof, space.ndof)
    k_rho = sp.coo_matrix((vals_rho, (rows, cols)), shape=shape).tocsr()
    k_gam = sp.coo_matrix((vals_gam, (rows, cols)), shape=shape).tocsr()
    bending = k_rho.copy()
    bending.data = (eps**3 / 3.0) * k_rho.data
    penalty = k_gam.copy()
    penalty.data = kappa * k_gam.data
    stiffness = (bending + penalty).tocsr()

    constrained = space.constrained()
    free_nodes = np.flatnonzero(space.bfs_map[:, 0] >= 0)
    lower = np.full(space.ndof, -np.inf)
    lower[constrained] = 0.0
    meta = {
        "kind": "flexural",
        "eps": eps,
        "lambda": lam,
        "mu": mu,
        "kappa": kappa,
        "warnings": [],
        "space": space,
    }
    return ObstacleQP(
        A=stiffness,
        b=b,
        lower_bounds=lower,
        constrained=constrained,
        obstacle_areas=node_areas[free_nodes],
        meta=meta,
        parts={"bending": bending, "penalty": penalty},
    )


def membrane_norm_matrix(mesh: Mesh, chart: Chart, space: MembraneSpace) -> sp.csr_matrix:
    """Block norm matrix for Korn-quotient checks: H1 inner product (surface
    measure) on each tangential block, L2 on the normal block."""
    pts, wts = element_quadrature(2)
    shapes = [q1_shape(x, y) for x, y in pts]
    grads_ref = [q1_grad(x, y) for x, y in pts]
    grad_scale = np.array([2.0 / mesh.hx, 2.0 / mesh.hy])
    rows, cols, vals = [], [], []
    for e in range(mesh.n_elems):
        ys, jac = _element_geometry(mesh, e, pts)
        conn = mesh.elems[e]
        nm = space.node_map[conn]
        me = np.zeros((4, 4))
        area = 0.0
        for q, (w, y) in enumerate(zip(wts, ys)):
            frame = frame_at(chart, y)
            scale = w * jac * frame.sqrt_a
            N = shapes[q]
            dN = grads_ref[q] * grad_scale
            me += scale * (np.outer(N, N) + dN @ dN.T)
            area += scale
        for a in range(4):
            if nm[a] < 0:
                continue
            for bb in range(4):
                if nm[bb] < 0:
                    continue
                for off in (0, space.n_free_nodes):
                    rows.append(off + nm[a])
                    cols.append(off + nm[bb])
                    vals.append(me[a, bb])
        rows.append(space.w_offset + e)
        cols.append(space.w_offset + e)
        vals.append(area)
    return sp.coo_matrix((vals, (rows, cols)), shape=(space.ndof, space.ndof)).tocsr()


def membrane_strains(mesh: Mesh, chart: Chart, space: MembraneSpace, x: np.ndarray, order: int = 2):
    """Membrane strain of a discrete field at the quadrature points.

    Returns (coords (E*q, 2), frames list, gammas (E*q, 2, 2)).
    """
    pts, _ = element_quadrature(order)
    shapes = [q1_shape(p, q) for p, q in pts]
    grads_ref = [q1_grad(p, q) for p, q in pts]
    grad_scale = np.array([2.0 / mesh.hx, 2.0 / mesh.hy])
    coords, frames, gammas = [], [], []
    for e in range(mesh.n_elems):
        ys, _ = _element_geometry(mesh, e, pts)
        nm = space.node_map[mesh.elems[e]]
        u1 = np.where(nm >= 0, x[np.maximum(nm, 0)], 0.0)
        u2 = np.where(nm >= 0, x[np.maximum(nm, 0) + space.n_free_nodes], 0.0)
        w3 = x[space.w_offset + e]
        for q, y in enumerate(ys):
            frame = frame_at(chart, y)
            N = shapes[q]
            dN = grads_ref[q] * grad_scale
            vals = np.array([N @ u1, N @ u2, w3])
            grads = np.vstack([u1 @ dN, u2 @ dN, np.zeros(2)])
            coords.append(y)
            frames.append(frame)
            gammas.append(gamma_of(frame, vals, grads))
    return np.array(coords), frames, np.array(gammas)


def flexural_strains(mesh: Mesh, chart: Chart, space: FlexuralSpace, x: np.ndarray, order: int = 3):
    """Membrane and bending strains of a discrete flexural field at the
    quadrature points.  Returns (coords, frames, gammas, rhos)."""
    pts, _ = element_quadrature(order)
    shapes = [q1_shape(p, q) for p, q in pts]
    grads_ref = [q1_grad(p, q) for p, q in pts]
    bfs_data = [bfs_shape(p, q) for p, q in pts]
    grad_scale = np.array([2.0 / mesh.hx, 2.0 / mesh.hy])
    coords, frames, gammas, rhos = [], [], [], []
    for e in range(mesh.n_elems):
        ys, _ = _element_geometry(mesh, e, pts)
        gdofs = _flexural_global_dofs(space, e)
        xe = np.where(gdofs >= 0, x[np.maximum(gdofs, 0)], 0.0)
        for q, y in enumerate(ys):
            frame = frame_at(chart, y)
            dN = grads_ref[q] * grad_scale
            basis = _flexural_local_basis(mesh, shapes[q], dN, *bfs_data[q])
            vals = np.zeros(3)
            grads = np.zeros((3, 2))
            hess = np.zeros((2, 2))
            for i, (bvals, bgrads, bhess) in enumerate(basis):
                vals += xe[i] * bvals
                grads += xe[i] * bgrads
                hess += xe[i] * bhess
            coords.append(y)
            frames.append(frame)
            gammas.append(gamma_of(frame, vals, grads))
            rhos.append(rho_of(frame, vals, grads, hess))
    return np.array(coords), frames, np.array(gammas), np.array(rhos)


def dump_qp(qp: ObstacleQP, matrix_path, vector_path):
    """Write the stiffness in coordinate text format and the load vector,
    one value per line, for external verification."""
    coo = qp.A.tocoo()
    with open(matrix_path, "w", encoding="utf-8") as fh:
        fh.write(f"# {qp.ndof} {qp.ndof} {coo.nnz}\n")
        for i, j, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{i} {j} {float(v)!r}\n")
    with open(vector_path, "w", encoding="utf-8") as fh:
        for v in qp.b:
            fh.write(f"{float(v)!r}\n")
