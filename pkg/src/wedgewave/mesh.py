"""Graded triangular meshes of the half wedge cross-section.

The computational domain is the half cross-section
{ (r, phi) : 0 < r < R, alpha < phi < pi/2 } with alpha = arctan(eps): the
traction-free wedge face at phi = alpha, the symmetry line x1 = 0 at
phi = pi/2, and an artificial truncation arc at r = R.

Rings of nodes are laid out with spacing h/2 next to the origin, h through the
tip zone, then geometrically coarsening steps; each ring is subdivided so arc
spacing tracks the radial step, and consecutive rings with different node
counts are stitched by an angular-merge triangulation.  The ring sequence does
not depend on R (generation stops at the first radius >= R), so meshes for
nested radii are themselves nested and Dirichlet truncation is monotone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MeshGenFailure

__all__ = ["WedgeMeshSpec", "TriangleMesh", "build_mesh", "save_mesh", "load_mesh"]


@dataclass(frozen=True)
class WedgeMeshSpec:
    """Geometry and resolution parameters of a half-wedge mesh.

    eps is tan(alpha) where pi - 2*alpha is the wedge interior angle; radius is
    the truncation radius; h the target element size in the tip zone; grading
    the geometric per-ring growth factor (>= 1) of the radial step outside the
    tip zone, capped at max_size; order selects linear or quadratic elements.

    Outside the tip zone the trapped mode is a surface profile hugging the
    wedge face: it varies fast across the face (bulk decay rates ~ k) and
    slowly along it (rate ~ eps * xi1 * k).  The angular subdivision of each
    ring therefore follows a transverse ladder in arc distance from the face:
    spacing t_fine_step up to height t_fine, then geometric growth by
    t_growth, capped at t_max up to height t_tail and at far_max beyond it
    (the anisotropic outer elements are long along the face, thin across).
    """

    eps: float
    radius: float
    h: float
    grading: float = 1.2
    order: int = 2
    tip_radius: float = 10.0
    fine_radius: float = 1.0
    max_size: float = 2.0
    t_fine: float = 3.0
    t_tail: float = 13.0
    t_max: float = 0.5
    t_growth: float = 1.3
    far_max: float = 2.0

    def __post_init__(self):
        if not self.eps > 0:
            raise MeshGenFailure(f"eps must be positive (eps = tan(alpha)), got {self.eps}")
        if not 0 < self.h < self.radius:
            raise MeshGenFailure(f"need 0 < h < radius, got h = {self.h}, radius = {self.radius}")
        if self.grading < 1.0 or self.t_growth < 1.0:
            raise MeshGenFailure(
                f"growth factors must be >= 1, got {self.grading}, {self.t_growth}"
            )
        if self.order not in (1, 2):
            raise MeshGenFailure(f"element order must be 1 or 2, got {self.order}")
        if not 0 < self.t_max <= self.far_max or not self.max_size > 0:
            raise MeshGenFailure("size caps must satisfy 0 < t_max <= far_max, max_size > 0")


@dataclass
class TriangleMesh:
    """Conforming triangulation with boundary masks on the vertex nodes."""

    nodes: np.ndarray  # (n, 2) float
    triangles: np.ndarray  # (m, 3) int, positively oriented
    on_traction: np.ndarray  # (n,) bool, wedge face phi = alpha
    on_symmetry: np.ndarray  # (n,) bool, symmetry line x1 = 0
    on_arc: np.ndarray  # (n,) bool, artificial arc r = radius
    eps: float
    alpha: float
    radius: float

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    def signed_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        return 0.5 * (
            (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
            - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
        )


def _ring_radii_and_sizes(spec: WedgeMeshSpec):
    """Radius and local size of each ring; independent of spec.radius except for the stop."""
    radii = [0.0]
    sizes = [0.5 * spec.h]
    r = 0.0
    step = 0.5 * spec.h
    while r < spec.radius - 1e-12 * spec.radius:
        if r < spec.fine_radius:
            step = 0.5 * spec.h
        elif r < spec.tip_radius:
            step = spec.h
        else:
            step = min(step * spec.grading, spec.max_size)
        r += step
        radii.append(r)
        sizes.append(step)
    return radii, sizes


def _ring_angles(spec: WedgeMeshSpec, r: float, s_radial: float, span: float):
    """Angular node offsets (from the face) of the ring at radius ``r``.

    Inside the tip zone the spacing is the isotropic local size; outside it a
    transverse ladder in arc distance from the face keeps the surface profile
    resolved while the far (bulk) part coarsens.
    """
    arc_len = span * r
    if r <= spec.tip_radius:
        nseg = max(1, int(round(arc_len / s_radial)))
        return [span * j / nseg for j in range(nseg + 1)]
    # chords longer than ~2*sqrt(2*s_radial*r) cannot be triangulated against
    # the next ring without inverting; stay safely below that bound
    chord_cap = 1.5 * math.sqrt(s_radial * r)
    heights = [0.0]
    step = spec.h
    while True:
        left = arc_len - heights[-1]
        if heights[-1] < spec.t_fine:
            step = spec.h
        elif heights[-1] < spec.t_tail:
            step = min(step * spec.t_growth, spec.t_max)
        else:
            step = min(step * spec.t_growth, spec.far_max)
        step = min(step, chord_cap)
        if left <= 1.5 * step:
            if left <= 0.5 * step and len(heights) > 1:
                heights[-1] = arc_len  # absorb the sliver into the last interval
            else:
                heights.append(arc_len)
            break
        heights.append(heights[-1] + step)
    if len(heights) < 3:  # never degenerate to a single strip
        heights = [0.0, 0.5 * arc_len, arc_len]
    return [t / r for t in heights]


def build_mesh(spec: WedgeMeshSpec) -> TriangleMesh:
    """Triangulate the half cross-section described by ``spec``.

    Returns a positively oriented conforming mesh with all three boundary
    masks populated; raises MeshGenFailure with diagnostics on degenerate
    input or an inverted element.
    """
    alpha = math.atan(spec.eps)
    span = 0.5 * math.pi - alpha
    if span <= 0:
        raise MeshGenFailure(f"interior angle degenerate: alpha = {alpha}")

    radii, sizes = _ring_radii_and_sizes(spec)

    xs: list[float] = [0.0]
    ys: list[float] = [0.0]
    traction = [True]  # the origin terminates the wedge face and the symmetry line
    symmetry = [True]
    arc = [False]
    ring_nodes: list[list[int]] = [[0]]
    ring_angles: list[list[float]] = [[0.0]]

    for i in range(1, len(radii)):
        r, s = radii[i], sizes[i]
        offsets = _ring_angles(spec, r, s, span)
        idx = []
        last = len(offsets) - 1
        for j, off in enumerate(offsets):
            phi = alpha + off
            if j == last:
                x, y = 0.0, r  # exact symmetry line
            else:
                x, y = r * math.cos(phi), r * math.sin(phi)
            idx.append(len(xs))
            xs.append(x)
            ys.append(y)
            traction.append(j == 0)
            symmetry.append(j == last)
            arc.append(i == len(radii) - 1)
        ring_nodes.append(idx)
        ring_angles.append(offsets)

    tris: list[tuple[int, int, int]] = []
    first = ring_nodes[1]
    for j in range(len(first) - 1):
        tris.append((0, first[j], first[j + 1]))

    pts = np.column_stack([np.asarray(xs), np.asarray(ys)])

    def area2(i0, i1, i2):
        p0, p1, p2 = pts[i0], pts[i1], pts[i2]
        return (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0])

    for i in range(1, len(ring_nodes) - 1):
        inner, outer = ring_nodes[i], ring_nodes[i + 1]
        ang_in, ang_out = ring_angles[i], ring_angles[i + 1]
        p, q = len(inner) - 1, len(outer) - 1
        a = b = 0
        while a < p or b < q:
            # merge by angle, falling back to the other chain on an invalid fold
            can_out = b < q
            can_in = a < p
            advance_outer = can_out and (not can_in or ang_out[b + 1] <= ang_in[a + 1])
            if advance_outer and area2(inner[a], outer[b], outer[b + 1]) <= 0.0 and can_in:
                advance_outer = False
            elif not advance_outer and can_in and can_out and area2(inner[a], outer[b], inner[a + 1]) <= 0.0:
                advance_outer = True
            if advance_outer:
                tris.append((inner[a], outer[b], outer[b + 1]))
                b += 1
            else:
                tris.append((inner[a], outer[b], inner[a + 1]))
                a += 1

    mesh = TriangleMesh(
        nodes=np.column_stack([np.asarray(xs), np.asarray(ys)]),
        triangles=np.asarray(tris, dtype=np.int64),
        on_traction=np.asarray(traction, dtype=bool),
        on_symmetry=np.asarray(symmetry, dtype=bool),
        on_arc=np.asarray(arc, dtype=bool),
        eps=spec.eps,
        alpha=alpha,
        radius=radii[-1],
    )
    areas = mesh.signed_areas()
    if np.any(areas <= 0.0):
        bad = int(np.argmin(areas))
        raise MeshGenFailure(
            f"inverted or degenerate element {bad} with signed area {areas[bad]:.3e}"
        )
    return mesh


# ---------------------------------------------------------------------------
# Plain-text mesh interchange (debugging aid, not a stability contract)
# ---------------------------------------------------------------------------

_TR, _SY, _AR = 1, 2, 4  # boundary flag bits


def save_mesh(mesh: TriangleMesh, path) -> None:
    """Write the mesh in the documented plain-text format.

    Layout: a header line, ``eps``/``alpha``/``radius`` lines, then a node
    section ``x y flags`` (flags: 1 wedge face, 2 symmetry line, 4 arc) and a
    triangle section of zero-based vertex triples.
    """
    with open(path, "w", encoding="ascii") as f:
        f.write("wedgewave-mesh 1\n")
        f.write(f"eps {mesh.eps!r}\nalpha {mesh.alpha!r}\nradius {mesh.radius!r}\n")
        f.write(f"nodes {mesh.n_nodes}\n")
        for (x, y), t, s, a in zip(mesh.nodes, mesh.on_traction, mesh.on_symmetry, mesh.on_arc):
            flags = (_TR if t else 0) | (_SY if s else 0) | (_AR if a else 0)
            f.write(f"{x!r} {y!r} {flags}\n")
        f.write(f"triangles {mesh.n_triangles}\n")
        for i, j, k in mesh.triangles:
            f.write(f"{i} {j} {k}\n")


def load_mesh(path) -> TriangleMesh:
    """Read a mesh written by ``save_mesh``."""
    with open(path, encoding="ascii") as f:
        header = f.readline().split()
        if header[:1] != ["wedgewave-mesh"]:
            raise MeshGenFailure(f"not a wedgewave mesh file: {path}")
        eps = float(f.readline().split()[1])
        alpha = float(f.readline().split()[1])
        radius = float(f.readline().split()[1])
        n = int(f.readline().split()[1])
        nodes = np.empty((n, 2))
        flags = np.empty(n, dtype=int)
        for i in range(n):
            sx, sy, sf = f.readline().split()
            nodes[i] = (float(sx), float(sy))
            flags[i] = int(sf)
        m = int(f.readline().split()[1])
        tris = np.empty((m, 3), dtype=np.int64)
        for i in range(m):
            tris[i] = [int(t) for t in f.readline().split()]
    return TriangleMesh(
        nodes=nodes,
        triangles=tris,
        on_traction=(flags & _TR) != 0,
        on_symmetry=(flags & _SY) != 0,
        on_arc=(flags & _AR) != 0,
        eps=eps,
        alpha=alpha,
        radius=radius,
    )
