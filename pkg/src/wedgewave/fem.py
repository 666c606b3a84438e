"""Finite-element eigensolver for the wedge cross-section problem.

The travelling-wave problem on the half cross-section is reduced to a real
symmetric generalized eigenproblem by writing the third displacement component
as u3 = i*w3: every sesquilinear coupling of the energy form with d/dx3 -> i*k
then becomes real, with density

    lam*d^2 + mu*[ 2 u1_x^2 + 2 u2_y^2 + 2 k^2 w^2 + (u1_y + u2_x)^2
                   + (k u1 + w_x)^2 + (k u2 + w_y)^2 ],
    d = u1_x + u2_y - k*w,

over unknowns (u1, u2, w3).  Boundary conditions: traction-free on the wedge
face (natural), u1 = 0 on the symmetry line (essential, the other components
natural), all components zero on the truncation arc (essential).

Eigenvalues below the cutoff c_R^2 k^2 are trapped wedge modes; the smallest
one tracks omega_R^2 - eps^2 * lambda1 for small eps, which ``sweep_epsilon``
extracts by fitting the gap against eps^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .asymptotics import compute_cv_plus_closed, compute_lambda1
from .errors import (
    AssemblyFailure,
    ConstraintViolation,
    NoConvergence,
    NotTrapped,
    TruncationSuspect,
)
from .material import IsotropicMaterial, solve_rayleigh
from .mesh import TriangleMesh, WedgeMeshSpec, build_mesh

__all__ = [
    "AssembledSystem",
    "WedgeEigenResult",
    "SweepReport",
    "assemble",
    "assemble_complex",
    "solve_smallest",
    "localization_metric",
    "default_mesh_spec",
    "find_wedge_mode",
    "sweep_epsilon",
]

# Six-point degree-4 rule on the reference triangle; weights sum to 1/2.
_QA = 0.445948490915965
_QB = 0.091576213509771
_QPTS = np.array(
    [
        (_QA, _QA),
        (1.0 - 2.0 * _QA, _QA),
        (_QA, 1.0 - 2.0 * _QA),
        (_QB, _QB),
        (1.0 - 2.0 * _QB, _QB),
        (_QB, 1.0 - 2.0 * _QB),
    ]
)
_QWTS = 0.5 * np.array([0.223381589678011] * 3 + [0.109951743655322] * 3)


def _shapes(order: int, pts: np.ndarray):
    """Reference shape functions and gradients at the given (xi, eta) points."""
    xi, eta = pts[:, 0], pts[:, 1]
    l1, l2, l3 = 1.0 - xi - eta, xi, eta
    if order == 1:
        N = np.stack([l1, l2, l3], axis=1)
        dN = np.broadcast_to(
            np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]), (pts.shape[0], 3, 2)
        ).copy()
        return N, dN
    N = np.stack(
        [
            l1 * (2 * l1 - 1),
            l2 * (2 * l2 - 1),
            l3 * (2 * l3 - 1),
            4 * l1 * l2,
            4 * l2 * l3,
            4 * l3 * l1,
        ],
        axis=1,
    )
    zeros = np.zeros_like(xi)
    dN = np.stack(
        [
            np.stack([1 - 4 * l1, 1 - 4 * l1], axis=1),
            np.stack([4 * l2 - 1, zeros], axis=1),
            np.stack([zeros, 4 * l3 - 1], axis=1),
            np.stack([4 * (l1 - l2), -4 * l2], axis=1),
            np.stack([4 * l3, 4 * l2], axis=1),
            np.stack([-4 * l3, 4 * (l1 - l3)], axis=1),
        ],
        axis=1,
    )
    return N, dN


def _p2_connectivity(mesh: TriangleMesh):
    """Vertex+midside node coordinates, element connectivity, inherited masks."""
    nv = mesh.n_nodes
    coords = [mesh.nodes]
    tr = [mesh.on_traction]
    sy = [mesh.on_symmetry]
    ar = [mesh.on_arc]
    edge_ids: dict[tuple[int, int], int] = {}
    conn = np.empty((mesh.n_triangles, 6), dtype=np.int64)
    conn[:, :3] = mesh.triangles
    mid_xy, mid_tr, mid_sy, mid_ar = [], [], [], []
    for e, (i, j, k) in enumerate(mesh.triangles):
        for slot, (a, b) in enumerate(((i, j), (j, k), (k, i))):
            key = (a, b) if a < b else (b, a)
            idx = edge_ids.get(key)
            if idx is None:
                idx = nv + len(mid_xy)
                edge_ids[key] = idx
                mid_xy.append(0.5 * (mesh.nodes[a] + mesh.nodes[b]))
                mid_tr.append(mesh.on_traction[a] and mesh.on_traction[b])
                mid_sy.append(mesh.on_symmetry[a] and mesh.on_symmetry[b])
                mid_ar.append(mesh.on_arc[a] and mesh.on_arc[b])
            conn[e, 3 + slot] = idx
    coords.append(np.asarray(mid_xy).reshape(-1, 2))
    tr.append(np.asarray(mid_tr, dtype=bool))
    sy.append(np.asarray(mid_sy, dtype=bool))
    ar.append(np.asarray(mid_ar, dtype=bool))
    return (
        np.concatenate(coords),
        conn,
        np.concatenate(tr),
        np.concatenate(sy),
        np.concatenate(ar),
    )


@dataclass
class AssembledSystem:
    """Reduced stiffness/mass pair with the dof bookkeeping to map back to the mesh."""

    K: sp.csr_matrix
    M: sp.csr_matrix
    mesh: TriangleMesh
    order: int
    coords: np.ndarray  # all FE nodes (vertices then midsides for order 2)
    conn: np.ndarray  # element connectivity into coords
    free: np.ndarray  # indices of unconstrained dofs in the full 3*n layout
    n_dof_full: int

    @property
    def n_dof(self) -> int:
        return self.K.shape[0]

    def expand(self, vec: np.ndarray) -> np.ndarray:
        """Embed a free-dof vector into the full (node, component) layout."""
        full = np.zeros(self.n_dof_full)
        full[self.free] = vec
        return full


def _element_geometry(coords: np.ndarray, conn: np.ndarray):
    p = coords[conn[:, :3]]
    j11 = p[:, 1, 0] - p[:, 0, 0]
    j21 = p[:, 1, 1] - p[:, 0, 1]
    j12 = p[:, 2, 0] - p[:, 0, 0]
    j22 = p[:, 2, 1] - p[:, 0, 1]
    det = j11 * j22 - j12 * j21
    return j11, j12, j21, j22, det


def assemble(mesh: TriangleMesh, mat: IsotropicMaterial, k: float, order: int = 2):
    """Assemble the real symmetric (K, M) over unknowns (u1, u2, w3).

    Essential conditions (u1 on the symmetry line, everything on the arc) are
    imposed by eliminating the constrained dofs.  Returns an AssembledSystem
    whose K and M act on the remaining free dofs.
    """
    if not k > 0:
        raise ConstraintViolation(f"k must be positive, got {k}")
    lam, mu = mat.lam, mat.mu
    if order == 2:
        coords, conn, m_tr, m_sy, m_ar = _p2_connectivity(mesh)
    elif order == 1:
        coords, conn = mesh.nodes, mesh.triangles
        m_tr, m_sy, m_ar = mesh.on_traction, mesh.on_symmetry, mesh.on_arc
    else:
        raise ConstraintViolation(f"element order must be 1 or 2, got {order}")

    nn = conn.shape[1]
    nloc = 3 * nn
    N, dN = _shapes(order, _QPTS)  # (nq, nn), (nq, nn, 2)
    nq = N.shape[0]

    j11, j12, j21, j22, det = _element_geometry(coords, conn)
    if np.any(det <= 0.0):
        raise AssemblyFailure(
            f"non-positive element Jacobian (min det = {det.min():.3e}); mesh defect"
        )

    n_nodes = coords.shape[0]
    ndof = 3 * n_nodes
    dofs = (3 * conn[:, :, None] + np.arange(3)[None, None, :]).reshape(-1, nloc)

    rows_idx = np.repeat(dofs, nloc, axis=1).ravel()
    cols_idx = np.tile(dofs, (1, nloc)).ravel()

    K = sp.csr_matrix((ndof, ndof))
    M = sp.csr_matrix((ndof, ndof))
    chunk = max(1, int(2.0e7 // (nloc * nloc)))
    for start in range(0, conn.shape[0], chunk):
        sl = slice(start, min(start + chunk, conn.shape[0]))
        ne = sl.stop - sl.start
        inv_det = 1.0 / det[sl]
        # physical gradients: gx, gy with shape (ne, nq, nn)
        gx = (j22[sl, None, None] * dN[None, :, :, 0] - j21[sl, None, None] * dN[None, :, :, 1]) * inv_det[:, None, None]
        gy = (-j12[sl, None, None] * dN[None, :, :, 0] + j11[sl, None, None] * dN[None, :, :, 1]) * inv_det[:, None, None]

        Kloc = np.zeros((ne, nloc, nloc))
        Mloc = np.zeros((ne, nloc, nloc))
        for q in range(nq):
            w = _QWTS[q] * det[sl]  # (ne,)
            Nq = np.broadcast_to(N[q], (ne, nn))
            rows = {
                "u1x": (0, gx[:, q, :]),
                "u1y": (0, gy[:, q, :]),
                "u2x": (1, gx[:, q, :]),
                "u2y": (1, gy[:, q, :]),
                "wx": (2, gx[:, q, :]),
                "wy": (2, gy[:, q, :]),
                "u1": (0, Nq),
                "u2": (1, Nq),
                "w": (2, Nq),
            }

            def embed(*parts):
                out = np.zeros((ne, nloc))
                for name, scale in parts:
                    comp, vals = rows[name]
                    out[:, comp::3] += scale * vals
                return out

            divr = embed(("u1x", 1.0), ("u2y", 1.0), ("w", -k))
            s12 = embed(("u1y", 1.0), ("u2x", 1.0))
            s13 = embed(("u1", k), ("wx", 1.0))
            s23 = embed(("u2", k), ("wy", 1.0))
            r_u1x = embed(("u1x", 1.0))
            r_u2y = embed(("u2y", 1.0))
            r_w = embed(("w", 1.0))
            r_u1 = embed(("u1", 1.0))
            r_u2 = embed(("u2", 1.0))

            for row, c in (
                (divr, lam),
                (r_u1x, 2.0 * mu),
                (r_u2y, 2.0 * mu),
                (r_w, 2.0 * mu * k**2),
                (s12, mu),
                (s13, mu),
                (s23, mu),
            ):
                Kloc += (c * w)[:, None, None] * np.einsum("ei,ej->eij", row, row)
            for row in (r_u1, r_u2, r_w):
                Mloc += w[:, None, None] * np.einsum("ei,ej->eij", row, row)

        nvals = ne * nloc * nloc
        off = start * nloc * nloc
        K = K + sp.coo_matrix(
            (Kloc.ravel(), (rows_idx[off : off + nvals], cols_idx[off : off + nvals])),
            shape=(ndof, ndof),
        ).tocsr()
        M = M + sp.coo_matrix(
            (Mloc.ravel(), (rows_idx[off : off + nvals], cols_idx[off : off + nvals])),
            shape=(ndof, ndof),
        ).tocsr()

    K = 0.5 * (K + K.T)
    M = 0.5 * (M + M.T)

    fixed = np.zeros(ndof, dtype=bool)
    fixed[3 * np.flatnonzero(m_sy)] = True  # u1 = 0 on the symmetry line
    for c in range(3):
        fixed[3 * np.flatnonzero(m_ar) + c] = True  # clamp the artificial arc
    free = np.flatnonzero(~fixed)
    Kf = sp.csr_matrix(K[free][:, free])
    Mf = sp.csr_matrix(M[free][:, free])
    if Mf.diagonal().min() <= 0.0:
        raise AssemblyFailure("mass matrix lost positive definiteness")
    return AssembledSystem(
        K=Kf,
        M=Mf,
        mesh=mesh,
        order=order,
        coords=coords,
        conn=conn,
        free=free,
        n_dof_full=ndof,
    )


def assemble_complex(mesh: TriangleMesh, mat: IsotropicMaterial, k: float, order: int = 2):
    """Hermitian assembly over raw complex (u1, u2, u3); cross-check of ``assemble``.

    Returns (K, M, free) with the same constraint pattern; the spectrum must
    coincide with the real reduction.
    """
    lam, mu = mat.lam, mat.mu
    if order == 2:
        coords, conn, m_tr, m_sy, m_ar = _p2_connectivity(mesh)
    else:
        coords, conn = mesh.nodes, mesh.triangles
        m_sy, m_ar = mesh.on_symmetry, mesh.on_arc
    nn = conn.shape[1]
    nloc = 3 * nn
    N, dN = _shapes(order, _QPTS)
    nq = N.shape[0]
    j11, j12, j21, j22, det = _element_geometry(coords, conn)
    if np.any(det <= 0.0):
        raise AssemblyFailure("non-positive element Jacobian")
    n_nodes = coords.shape[0]
    ndof = 3 * n_nodes
    dofs = (3 * conn[:, :, None] + np.arange(3)[None, None, :]).reshape(-1, nloc)
    ne = conn.shape[0]
    inv_det = 1.0 / det
    gx = (j22[:, None, None] * dN[None, :, :, 0] - j21[:, None, None] * dN[None, :, :, 1]) * inv_det[:, None, None]
    gy = (-j12[:, None, None] * dN[None, :, :, 0] + j11[:, None, None] * dN[None, :, :, 1]) * inv_det[:, None, None]

    Kloc = np.zeros((ne, nloc, nloc), dtype=complex)
    Mloc = np.zeros((ne, nloc, nloc), dtype=complex)
    ik = 1j * k
    for q in range(nq):
        w = _QWTS[q] * det
        Nq = np.broadcast_to(N[q], (ne, nn)).astype(complex)

        def row_of(comp, vals):
            out = np.zeros((ne, nloc), dtype=complex)
            out[:, comp::3] = vals
            return out

        u1 = row_of(0, Nq)
        u2 = row_of(1, Nq)
        u3 = row_of(2, Nq)
        u1x, u1y = row_of(0, gx[:, q]), row_of(0, gy[:, q])
        u2x, u2y = row_of(1, gx[:, q]), row_of(1, gy[:, q])
        u3x, u3y = row_of(2, gx[:, q]), row_of(2, gy[:, q])

        divk = u1x + u2y + ik * u3
        e33 = ik * u3
        e12 = u1y + u2x  # doubled strains; weights halve below
        e13 = ik * u1 + u3x
        e23 = ik * u2 + u3y

        for row, c in (
            (divk, lam),
            (u1x, 2.0 * mu),
            (u2y, 2.0 * mu),
            (e33, 2.0 * mu),
            (e12, 0.5 * mu),
            (e13, 0.5 * mu),
            (e23, 0.5 * mu),
        ):
            Kloc += (c * w)[:, None, None] * np.einsum("ei,ej->eij", np.conj(row), row)
        for row in (u1, u2, u3):
            Mloc += w[:, None, None] * np.einsum("ei,ej->eij", np.conj(row), row)

    rows_idx = np.repeat(dofs, nloc, axis=1).ravel()
    cols_idx = np.tile(dofs, (1, nloc)).ravel()
    K = sp.coo_matrix((Kloc.ravel(), (rows_idx, cols_idx)), shape=(ndof, ndof)).tocsr()
    M = sp.coo_matrix((Mloc.ravel(), (rows_idx, cols_idx)), shape=(ndof, ndof)).tocsr()
    fixed = np.zeros(ndof, dtype=bool)
    fixed[3 * np.flatnonzero(m_sy)] = True
    for c in range(3):
        fixed[3 * np.flatnonzero(m_ar) + c] = True
    free = np.flatnonzero(~fixed)
    return K[free][:, free], M[free][:, free], free


def solve_smallest(K, M, count: int, tol: float = 1e-9):
    """The ``count`` smallest generalized eigenpairs of (K, M), ascending.

    Residuals ||K v - theta M v|| / ||M v|| are verified against ``tol``;
    NoConvergence carries the worst offender.  Small systems fall back to a
    dense solve.
    """
    n = K.shape[0]
    if count < 1:
        raise ValueError("count must be >= 1")
    if n <= max(2 * count + 1, 50):
        dense_vals, dense_vecs = scipy.linalg.eigh(
            np.asarray(K.todense() if sp.issparse(K) else K),
            np.asarray(M.todense() if sp.issparse(M) else M),
        )
        pairs = [(float(dense_vals[i]), dense_vecs[:, i]) for i in range(min(count, n))]
    else:
        try:
            vals, vecs = spla.eigsh(
                sp.csc_matrix(K), k=count, M=sp.csc_matrix(M), sigma=0.0, which="LM",
                tol=tol * 1e-2, maxiter=10000,
            )
        except spla.ArpackNoConvergence as exc:
            raise NoConvergence(f"eigensolver stalled: {exc}") from exc
        order = np.argsort(vals)
        pairs = [(float(vals[i]), vecs[:, i]) for i in order]
    checked = []
    for theta, v in pairs:
        r = np.linalg.norm(K @ v - theta * (M @ v)) / np.linalg.norm(M @ v)
        if not r <= tol:
            raise NoConvergence(f"eigenpair residual {r:.3e} exceeds tol {tol:.3e}")
        checked.append((theta, v, r))
    return checked


def _element_mass_energy(system: AssembledSystem, full_vec: np.ndarray) -> np.ndarray:
    """Per-element M-energy of a full-layout vector."""
    N, _ = _shapes(system.order, _QPTS)
    Mref = np.einsum("q,qi,qj->ij", _QWTS, N, N)
    _, _, _, _, det = _element_geometry(system.coords, system.conn)
    vals = full_vec.reshape(-1, 3)[system.conn]  # (ne, nn, 3)
    return det * np.einsum("ij,eic,ejc->e", Mref, vals, vals)


def localization_metric(eigvec: np.ndarray, system: AssembledSystem, radius_frac: float = 0.5) -> float:
    """Mass-weighted energy fraction of ``eigvec`` inside r < radius_frac * R.

    ``eigvec`` is in the free-dof layout returned by the eigensolver.
    """
    full = system.expand(eigvec)
    energies = _element_mass_energy(system, full)
    centroid = system.coords[system.conn[:, :3]].mean(axis=1)
    inside = np.hypot(centroid[:, 0], centroid[:, 1]) < radius_frac * system.mesh.radius
    total = energies.sum()
    if total == 0.0:
        return 0.0
    return float(energies[inside].sum() / total)


@dataclass(frozen=True)
class WedgeEigenResult:
    """Outcome of one truncated-wedge eigensolve."""

    eps: float
    omega_hat_sq: float
    cutoff: float
    gap: float
    lambda_estimate: float
    localization: float
    trapped: bool
    residual: float
    n_dof: int
    second_omega_sq: float
    radius: float
    h: float
    order: int
    n_nodes: int
    n_triangles: int

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "omega_hat_sq": self.omega_hat_sq,
            "cutoff": self.cutoff,
            "gap": self.gap,
            "lambda_estimate": self.lambda_estimate,
            "localization": self.localization,
            "trapped": self.trapped,
            "residual": self.residual,
            "n_dof": self.n_dof,
            "second_omega_sq": self.second_omega_sq,
            "radius": self.radius,
            "h": self.h,
            "order": self.order,
            "n_nodes": self.n_nodes,
            "n_triangles": self.n_triangles,
        }


def default_mesh_spec(
    mat: IsotropicMaterial,
    k: float,
    eps: float,
    radius: float | None = None,
    h: float | None = None,
    order: int = 2,
    grading: float = 1.2,
) -> WedgeMeshSpec:
    """Mesh parameters sized from the material's decay rates.

    The radius covers at least eight decay lengths 1/(eps*xi1*k) of the outer
    waves (with a floor of 40/k).  The tip zone is resolved isotropically with
    h*k = 0.1; outside it the transverse ladder keeps the surface profile
    (bulk rates k*kappa_l, k*kappa_t) resolved near the face while elements
    stretch along the face, where the mode only decays at rate eps*xi1*k.
    """
    sol = solve_rayleigh(mat)
    xi1 = -compute_cv_plus_closed(sol, k)
    if radius is None:
        radius = max(8.0 / (eps * xi1), 40.0 / k)
    if h is None:
        h = 0.1 / k
    return WedgeMeshSpec(
        eps=eps,
        radius=radius,
        h=h,
        grading=grading,
        order=order,
        tip_radius=10.0 / k,
        fine_radius=1.0 / k,
        max_size=2.0 / k,
        t_fine=2.5 / (k * sol.kappa_l),
        t_tail=5.0 / (k * sol.kappa_t),
        t_max=0.2 / (k * sol.kappa_t),
        t_growth=1.3,
        far_max=2.0 / k,
    )


def find_wedge_mode(
    mat: IsotropicMaterial,
    k: float,
    spec: WedgeMeshSpec,
    tol: float = 1e-9,
    localization_gate: float = 0.99,
) -> WedgeEigenResult:
    """Solve for the lowest mode of the truncated wedge and classify it.

    ``trapped`` requires the eigenvalue to sit below the cutoff by a margin of
    ten residual tolerances and the mode energy to be localized (fraction
    above ``localization_gate`` inside half the radius); a sub-cutoff but
    delocalized mode raises TruncationSuspect since the truncation arc is then
    polluting the eigenvalue.
    """
    if not 0.0 < spec.eps <= 0.3:
        raise ConstraintViolation(f"eps must lie in (0, 0.3], got {spec.eps}")
    if spec.h * k > 0.2 * (1.0 + 1e-12):
        raise ConstraintViolation(f"h*k <= 0.2 violated: {spec.h * k}")
    sol = solve_rayleigh(mat)
    xi1 = -compute_cv_plus_closed(sol, k)  # carries the factor k
    decay_lengths = spec.radius * spec.eps * xi1
    if decay_lengths < 8.0 * (1.0 - 1e-9):
        raise TruncationSuspect(
            f"domain holds only {decay_lengths:.2f} outer decay lengths (need >= 8); "
            f"radius = {spec.radius}, eps = {spec.eps}, xi1 = {xi1:.4f}"
        )
    mesh = build_mesh(spec)
    system = assemble(mesh, mat, k, order=spec.order)
    pairs = solve_smallest(system.K, system.M, count=2, tol=tol)
    (theta1, v1, r1), (theta2, _, _) = pairs[0], pairs[1]
    cutoff = sol.omega_sq(k)
    loc = localization_metric(v1, system)
    below = theta1 < cutoff * (1.0 - 10.0 * tol)
    if below and loc <= localization_gate:
        raise TruncationSuspect(
            f"sub-cutoff eigenvalue {theta1:.8f} but localization {loc:.4f} <= {localization_gate}"
        )
    gap = cutoff - theta1
    return WedgeEigenResult(
        eps=spec.eps,
        omega_hat_sq=theta1,
        cutoff=cutoff,
        gap=gap,
        lambda_estimate=gap / spec.eps**2,
        localization=loc,
        trapped=bool(below and loc > localization_gate),
        residual=r1,
        n_dof=system.n_dof,
        second_omega_sq=theta2,
        radius=mesh.radius,
        h=spec.h,
        order=spec.order,
        n_nodes=mesh.n_nodes,
        n_triangles=mesh.n_triangles,
    )


@dataclass(frozen=True)
class SweepReport:
    """Gap-versus-eps fit over a family of wedge eigensolves."""

    results: tuple
    lambda_hat: float
    lambda1_ref: float
    rel_deviation: float
    half_term: float
    fit_residuals: np.ndarray
    fit_residuals_pure: np.ndarray

    def to_dict(self) -> dict:
        return {
            "lambda_hat": self.lambda_hat,
            "lambda1_ref": self.lambda1_ref,
            "rel_deviation": self.rel_deviation,
            "half_term": self.half_term,
            "fit_residuals": [float(r) for r in self.fit_residuals],
            "fit_residuals_pure": [float(r) for r in self.fit_residuals_pure],
            "results": [r.to_dict() for r in self.results],
        }


def sweep_epsilon(
    mat: IsotropicMaterial,
    k: float,
    eps_list,
    radius: float | None = None,
    h: float | None = None,
    order: int = 2,
    tol: float = 1e-9,
) -> SweepReport:
    """Fit the eigenvalue gap law over a list of wedge angles.

    Each eps gets its own mesh from ``default_mesh_spec`` (a fixed ``radius``
    or ``h`` overrides the sizing).  The gaps of trapped results are fitted by
    least squares against eps^2 with an eps^(5/2) nuisance term absorbing the
    leading remainder; the eps^2 slope estimates lambda1 and is compared with
    the closed form.
    """
    eps_arr = [float(e) for e in eps_list]
    if len(eps_arr) < 3:
        raise ConstraintViolation(f"need at least 3 eps values, got {len(eps_arr)}")
    if any(not 0.0 < e <= 0.3 for e in eps_arr):
        raise ConstraintViolation(f"eps values must lie in (0, 0.3]: {eps_arr}")
    results = []
    for e in eps_arr:
        spec = default_mesh_spec(mat, k, e, radius=radius, h=h, order=order)
        results.append(find_wedge_mode(mat, k, spec, tol=tol))
    trapped = [r for r in results if r.trapped]
    if len(trapped) < 3:
        raise NotTrapped(f"only {len(trapped)} of {len(results)} runs produced a trapped mode")
    eps_t = np.array([r.eps for r in trapped])
    gaps = np.array([r.gap for r in trapped])
    design = np.column_stack([eps_t**2, eps_t**2.5])
    coef, *_ = np.linalg.lstsq(design, gaps, rcond=None)
    residuals = gaps - design @ coef
    design_p = eps_t[:, None] ** 2
    coef_p, *_ = np.linalg.lstsq(design_p, gaps, rcond=None)
    residuals_p = gaps - design_p @ coef_p
    sol = solve_rayleigh(mat)
    lambda1_ref = compute_lambda1(sol, k)
    lambda_hat = float(coef[0])
    return SweepReport(
        results=tuple(results),
        lambda_hat=lambda_hat,
        lambda1_ref=lambda1_ref,
        rel_deviation=abs(lambda_hat / lambda1_ref - 1.0),
        half_term=float(coef[1]),
        fit_residuals=residuals,
        fit_residuals_pure=residuals_p,
    )
