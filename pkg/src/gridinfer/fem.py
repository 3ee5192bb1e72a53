"""Point-source Poisson forward problem on learned tessellation meshes.

Interior mesh nodes are generated by MacQueen's stochastic fixed-point
iteration for a centroidal Voronoi tessellation under a product-Beta density,
then augmented with uniformly spaced boundary nodes and Delaunay-triangulated.
The piecewise-linear stiffness system with homogeneous Dirichlet rows
eliminated is solved by a sparse direct factorization; the point-source load
vector is the containing triangle's barycentric coordinates, which sum to one.

The tessellation for a given (k, theta) is regenerated from a seed derived by
hashing (global seed, k, theta), so the forward map stays a deterministic
function of the discretization parameters as the Metropolis theory requires.
"""

from __future__ import annotations

import hashlib
from collections import OrderedDict
from dataclasses import dataclass, field
from math import ceil, sqrt

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import splu
from scipy.spatial import Delaunay, QhullError

from .core import DensityParam, NoiseModel, ObservationModel, PlanarPoint


@dataclass(frozen=True)
class FemConfig:
    k: int = 100
    fine_k: int = 2000
    macqueen_updates_per_generator: int = 200
    obs_noise_std: float = 0.05
    true_source: tuple[float, float] = (0.85, 0.85)

    @property
    def sensors(self) -> np.ndarray:
        axis = np.array([0.5, 0.6, 0.7, 0.8, 0.9])
        xx, yy = np.meshgrid(axis, axis, indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel()])


def sample_beta_density(theta, n: int, rng: np.random.Generator) -> np.ndarray:
    """n independent draws from Beta(a1,b1) x Beta(a2,b2) via gamma ratios."""
    a1, b1, a2, b2 = np.asarray(theta, dtype=float)
    gx = rng.gamma(a1, size=n)
    gx_b = rng.gamma(b1, size=n)
    gy = rng.gamma(a2, size=n)
    gy_b = rng.gamma(b2, size=n)
    return np.column_stack([gx / (gx + gx_b), gy / (gy + gy_b)])


def macqueen_cvt(theta, k: int, n_updates: int, rng: np.random.Generator) -> np.ndarray:
    """k generators as running ρ-weighted cell means.

    Start from k density draws; each update draws one more point, finds its
    nearest generator (ties break to the lowest index), and moves that
    generator to the running mean of the points assigned to it so far.
    """
    draws = sample_beta_density(theta, k + n_updates, rng)
    generators = draws[:k].copy()
    counts = np.ones(k)
    for x in draws[k:]:
        d = generators - x
        nearest = int(np.argmin(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1]))
        c = counts[nearest]
        generators[nearest] = (c * generators[nearest] + x) / (c + 1.0)
        counts[nearest] = c + 1.0
    return generators


@dataclass
class Mesh:
    nodes: np.ndarray
    triangles: np.ndarray
    boundary_mask: np.ndarray
    _delaunay: Delaunay = field(repr=False, compare=False, default=None)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def triangle_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def locate(self, point) -> tuple[np.ndarray, np.ndarray]:
        """Vertex indices of the containing triangle and the point's barycentric weights.

        Weight order matches the returned vertex order (the triangulation's
        own ordering, which may differ from the orientation-fixed triangle
        rows).
        """
        pt = np.asarray(point, dtype=float)
        simplex = int(self._delaunay.find_simplex(pt))
        if simplex < 0:
            raise ValueError(f"point {pt} lies outside the mesh")
        trans = self._delaunay.transform[simplex]
        bary2 = trans[:2] @ (pt - trans[2])
        return (self._delaunay.simplices[simplex],
                np.append(bary2, 1.0 - bary2.sum()))


def boundary_nodes_for(k: int) -> np.ndarray:
    """4 ceil(sqrt(k)) uniformly spaced nodes along the unit-square boundary."""
    per_side = ceil(sqrt(k))
    t = np.arange(per_side) / per_side
    bottom = np.column_stack([t, np.zeros(per_side)])
    right = np.column_stack([np.ones(per_side), t])
    top = np.column_stack([1.0 - t, np.ones(per_side)])
    left = np.column_stack([np.zeros(per_side), 1.0 - t])
    return np.vstack([bottom, right, top, left])


def build_mesh(generators: np.ndarray, boundary: np.ndarray | None = None) -> Mesh:
    """Delaunay triangulation of the generators plus boundary nodes."""
    gens = np.asarray(generators, dtype=float)
    if boundary is None:
        boundary = boundary_nodes_for(len(gens))
    nodes = np.vstack([gens, boundary])

    def triangulate(pts):
        tri = Delaunay(pts)
        if len(tri.coplanar):
            raise QhullError("input points omitted from the triangulation")
        return tri

    try:
        tri = triangulate(nodes)
    except QhullError:
        jitter = 1e-12 * np.random.default_rng(0).standard_normal(nodes.shape)
        tri = triangulate(nodes + jitter)

    simplices = tri.simplices.copy()
    p = nodes[simplices]
    cross = ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
             - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))
    flip = cross < 0
    simplices[flip] = simplices[flip][:, [0, 2, 1]]

    tol = 1e-9
    on_boundary = ((nodes[:, 0] <= tol) | (nodes[:, 0] >= 1.0 - tol)
                   | (nodes[:, 1] <= tol) | (nodes[:, 1] >= 1.0 - tol))
    return Mesh(nodes, simplices, on_boundary, tri)


def stiffness_matrix(mesh: Mesh) -> coo_matrix:
    """P1 stiffness matrix for the Laplacian, assembled triangle-wise."""
    p = mesh.nodes[mesh.triangles]
    # Edge vectors opposite each vertex; grad(lambda_i) = rot90(edge_i) / (2A).
    e = p[:, [2, 0, 1]] - p[:, [1, 2, 0]]
    area2 = e[:, 0, 0] * e[:, 1, 1] - e[:, 0, 1] * e[:, 1, 0]
    local = np.einsum("tid,tjd->tij", e, e) / (2.0 * area2)[:, None, None]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    return coo_matrix((local.ravel(), (rows, cols)),
                      shape=(mesh.n_nodes, mesh.n_nodes))


class DirichletPoissonSolver:
    """Factorized interior stiffness system with zero boundary values."""

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        self.interior = np.flatnonzero(~mesh.boundary_mask)
        self.index_of = -np.ones(mesh.n_nodes, dtype=int)
        self.index_of[self.interior] = np.arange(len(self.interior))
        k_full = stiffness_matrix(mesh).tocsr()
        k_int = k_full[self.interior][:, self.interior].tocsc()
        self.factor = splu(k_int)

    def point_source_load(self, source: PlanarPoint) -> np.ndarray:
        vertices, bary = self.mesh.locate((source.x, source.y))
        load = np.zeros(self.mesh.n_nodes)
        load[vertices] = bary
        return load

    def solve(self, source: PlanarPoint) -> np.ndarray:
        load = self.point_source_load(source)
        interior_solution = self.factor.solve(load[self.interior])
        full = np.zeros(self.mesh.n_nodes)
        full[self.interior] = interior_solution
        return full


def observe_fem(solution: np.ndarray, mesh: Mesh, sensors: np.ndarray) -> np.ndarray:
    """Barycentric interpolation of the nodal solution at each sensor."""
    out = np.empty(len(sensors))
    for i, s in enumerate(np.asarray(sensors, dtype=float)):
        vertices, bary = mesh.locate(s)
        out[i] = solution[vertices] @ bary
    return out


def mesh_seed(global_seed: int, k: int, theta) -> int:
    digest = hashlib.blake2b(digest_size=8)
    digest.update(int(global_seed).to_bytes(8, "little", signed=True))
    digest.update(int(k).to_bytes(8, "little"))
    digest.update(np.ascontiguousarray(theta, dtype=float).tobytes())
    return int.from_bytes(digest.digest(), "little")


def tessellation_for(a: DensityParam, cfg: FemConfig, global_seed: int) -> Mesh:
    rng = np.random.default_rng(mesh_seed(global_seed, a.k, a.theta))
    gens = macqueen_cvt(a.theta, a.k, cfg.macqueen_updates_per_generator * a.k, rng)
    return build_mesh(gens)


class FemForward:
    """Forward evaluator with a small cache of factorized meshes per (k, theta)."""

    def __init__(self, cfg: FemConfig, global_seed: int, cache_size: int = 8):
        self.cfg = cfg
        self.global_seed = global_seed
        self.cache_size = cache_size
        self._cache: OrderedDict = OrderedDict()

    def solver_for(self, a: DensityParam) -> DirichletPoissonSolver:
        key = (a.k, a.theta.tobytes())
        if key not in self._cache:
            mesh = tessellation_for(a, self.cfg, self.global_seed)
            self._cache[key] = DirichletPoissonSolver(mesh)
            while len(self._cache) > self.cache_size:
                self._cache.popitem(last=False)
        else:
            self._cache.move_to_end(key)
        return self._cache[key]

    def __call__(self, u: PlanarPoint, a: DensityParam) -> np.ndarray:
        solver = self.solver_for(a)
        return observe_fem(solver.solve(u), solver.mesh, self.cfg.sensors)


def fine_reference_solver(cfg: FemConfig, global_seed: int) -> DirichletPoissonSolver:
    """Near-uniform fine tessellation used for data generation and references."""
    a_fine = DensityParam(cfg.fine_k, np.ones(4))
    fine_cfg = FemConfig(k=cfg.fine_k, fine_k=cfg.fine_k,
                         macqueen_updates_per_generator=cfg.macqueen_updates_per_generator,
                         obs_noise_std=cfg.obs_noise_std, true_source=cfg.true_source)
    return DirichletPoissonSolver(tessellation_for(a_fine, fine_cfg, global_seed))


def generate_fem_data(
    cfg: FemConfig,
    seed: int,
    noise_std: float | None = None,
) -> tuple[ObservationModel, np.ndarray, DirichletPoissonSolver]:
    """Fine-grid solve at the true source, observed with Gaussian noise."""
    std = cfg.obs_noise_std if noise_std is None else noise_std
    solver = fine_reference_solver(cfg, seed)
    source = PlanarPoint(*cfg.true_source)
    clean = observe_fem(solver.solve(source), solver.mesh, cfg.sensors)
    rng = np.random.default_rng(seed)
    data = clean.copy()
    if std > 0:
        data += std * rng.standard_normal(len(clean))
    noise = NoiseModel.isotropic(cfg.obs_noise_std**2, len(clean))
    return ObservationModel(cfg.sensors, data, noise), clean, solver
