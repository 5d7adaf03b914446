"""Closed curvilinear polygons and corner-graded quadrature grids.

A curve is an ordered chain of smooth parametric arcs (polynomial or
trigonometric in the arc parameter t in [0, 1]) that closes up.  Orientation
is normalized to anticlockwise, so the bounded component Omega_+ lies on the
left of the direction of travel.  Frames follow the convention

    nu = unit normal pointing into the unbounded component Omega_-,
    tau = (-nu_2, nu_1)  (the direction of travel),

while each Corner additionally carries the corner frame of the Fredholm
symbol machinery: tau along the incoming direction and the inward normal
obtained from tau by a +pi/2 rotation.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass

import numpy as np

from .errors import (
    CuspError,
    EmptyCorners,
    InvalidRefinement,
    OpenCurveError,
    SelfIntersectionError,
)

_ANGLE_TOL = 1e-9
_CLOSURE_TOL = 1e-12
_PANEL_ORDER = 8


@dataclass(frozen=True)
class Edge:
    """One smooth parametric arc t in [0,1] -> R^2.

    kind 'poly':  x(t) = sum_k xc[k] t^k               (same for y)
    kind 'trig':  x(t) = sum_k xc[k] cos(2 pi k t) + sum_k xs[k-1] sin(2 pi k t)
    """

    kind: str
    xc: tuple
    yc: tuple
    xs: tuple = ()
    ys: tuple = ()

    def point(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "poly":
            x = np.polynomial.polynomial.polyval(t, self.xc)
            y = np.polynomial.polynomial.polyval(t, self.yc)
        else:
            x = np.zeros_like(t) + self.xc[0]
            y = np.zeros_like(t) + self.yc[0]
            for k in range(1, len(self.xc)):
                x = x + self.xc[k] * np.cos(2 * np.pi * k * t)
                y = y + self.yc[k] * np.cos(2 * np.pi * k * t)
            for k, (cx, cy) in enumerate(zip(self.xs, self.ys), start=1):
                x = x + cx * np.sin(2 * np.pi * k * t)
                y = y + cy * np.sin(2 * np.pi * k * t)
        return np.stack([x, y], axis=-1)

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "poly":
            dxc = np.polynomial.polynomial.polyder(self.xc)
            dyc = np.polynomial.polynomial.polyder(self.yc)
            x = np.polynomial.polynomial.polyval(t, dxc)
            y = np.polynomial.polynomial.polyval(t, dyc)
        else:
            x = np.zeros_like(t)
            y = np.zeros_like(t)
            for k in range(1, len(self.xc)):
                w = 2 * np.pi * k
                x = x - self.xc[k] * w * np.sin(w * t)
                y = y - self.yc[k] * w * np.sin(w * t)
            for k, (cx, cy) in enumerate(zip(self.xs, self.ys), start=1):
                w = 2 * np.pi * k
                x = x + cx * w * np.cos(w * t)
                y = y + cy * w * np.cos(w * t)
        return np.stack([x, y], axis=-1)

    def reversed_(self) -> "Edge":
        if self.kind == "poly":
            p = np.polynomial.Polynomial
            flip = p([1.0, -1.0])
            xc = tuple(p(list(self.xc))(flip).coef)
            yc = tuple(p(list(self.yc))(flip).coef)
            return Edge("poly", xc, yc)
        xs = tuple(-c for c in self.xs)
        ys = tuple(-c for c in self.ys)
        return Edge("trig", self.xc, self.yc, xs, ys)

    @property
    def is_straight(self) -> bool:
        return self.kind == "poly" and len(self.xc) <= 2 and len(self.yc) <= 2


def line_edge(p0, p1) -> Edge:
    return Edge("poly", (float(p0[0]), float(p1[0] - p0[0])),
                (float(p0[1]), float(p1[1] - p0[1])))


@dataclass(frozen=True)
class ArcEdge:
    """Circular arc, angle phi0 -> phi1 around center; duck-types Edge."""

    center: tuple
    radius: float
    phi0: float
    phi1: float
    kind: str = "arc"

    def point(self, t):
        t = np.asarray(t, dtype=float)
        ph = self.phi0 + (self.phi1 - self.phi0) * t
        return np.stack([self.center[0] + self.radius * np.cos(ph),
                         self.center[1] + self.radius * np.sin(ph)], axis=-1)

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        dph = self.phi1 - self.phi0
        ph = self.phi0 + dph * t
        return np.stack([-self.radius * dph * np.sin(ph),
                         self.radius * dph * np.cos(ph)], axis=-1)

    def reversed_(self) -> "ArcEdge":
        return ArcEdge(self.center, self.radius, self.phi1, self.phi0)

    @property
    def is_straight(self) -> bool:
        return False


@dataclass(frozen=True)
class CurveSpec:
    """Raw edge chain; validated and normalized by build_curve."""

    edges: tuple
    closed: bool = True


@dataclass(frozen=True)
class Corner:
    position: np.ndarray  # (2,)
    theta: float  # interior angle in (0, 2pi) \ {pi}, measured inside Omega_+
    tau_plus: np.ndarray  # unit vector away from the corner along outgoing arc
    tau_minus: np.ndarray  # unit vector away from the corner along incoming arc
    tau: np.ndarray  # left positive tangent, tau = -tau_minus
    nu: np.ndarray  # tau rotated by +pi/2 (inward at a convex corner)
    edge_in: int
    edge_out: int


@dataclass(frozen=True)
class Curve:
    edges: tuple
    corners: tuple
    edge_lengths: np.ndarray
    length: float
    signed_area: float

    @property
    def is_single_smooth(self) -> bool:
        return len(self.edges) == 1 and len(self.corners) == 0

    def corner_positions(self) -> np.ndarray:
        if not self.corners:
            return np.zeros((0, 2))
        return np.array([c.position for c in self.corners])


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------


def circle(radius: float = 1.0, center=(0.0, 0.0)) -> CurveSpec:
    e = Edge("trig", (center[0], radius), (center[1], 0.0), (0.0,), (radius,))
    return CurveSpec((e,))


def ellipse(a: float, b: float, center=(0.0, 0.0)) -> CurveSpec:
    e = Edge("trig", (center[0], a), (center[1], 0.0), (0.0,), (b,))
    return CurveSpec((e,))


def polygon_from_vertices(vertices) -> CurveSpec:
    pts = [np.asarray(v, dtype=float) for v in vertices]
    edges = tuple(line_edge(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts)))
    return CurveSpec(edges)


def regular_polygon(k: int, circumradius: float = 1.0) -> CurveSpec:
    ang = 2 * np.pi * np.arange(k) / k
    verts = np.stack([circumradius * np.cos(ang), circumradius * np.sin(ang)], axis=-1)
    return polygon_from_vertices(verts)


def square(side: float = 1.0) -> CurveSpec:
    h = 0.5 * side
    return polygon_from_vertices([(-h, -h), (h, -h), (h, h), (-h, h)])


def l_shape(scale: float = 1.0) -> CurveSpec:
    s = scale
    verts = [(0, 0), (2 * s, 0), (2 * s, s), (s, s), (s, 2 * s), (0, 2 * s)]
    return polygon_from_vertices(verts)


def rounded_polygon(k: int, circumradius: float = 1.0, radius: float = 0.2) -> CurveSpec:
    """Regular polygon with corners replaced by tangent circular arcs (C^1)."""
    ang = 2 * np.pi * np.arange(k) / k
    verts = np.stack([circumradius * np.cos(ang), circumradius * np.sin(ang)], axis=-1)
    theta = np.pi * (k - 2) / k  # interior angle
    setback = radius / np.tan(theta / 2)
    side = 2 * circumradius * np.sin(np.pi / k)
    if setback >= side / 2:
        raise ValueError("rounding radius too large for this polygon")
    edges = []
    for j in range(k):
        a = verts[j]
        b = verts[(j + 1) % k]
        d = (b - a) / np.linalg.norm(b - a)
        edges.append(line_edge(a + setback * d, b - setback * d))
        # arc around vertex b
        c = verts[(j + 1) % k]
        bis = -c / np.linalg.norm(c)  # inward bisector for a regular polygon
        centre = c + bis * (radius / np.sin(theta / 2))
        p_in = c - setback * d  # arc start: end of this line
        e = (verts[(j + 2) % k] - c) / np.linalg.norm(verts[(j + 2) % k] - c)
        p_out = c + setback * e  # arc end: start of next line
        phi0 = math.atan2(p_in[1] - centre[1], p_in[0] - centre[0])
        phi1 = math.atan2(p_out[1] - centre[1], p_out[0] - centre[0])
        while phi1 <= phi0:  # anticlockwise sweep
            phi1 += 2 * np.pi
        edges.append(ArcEdge((centre[0], centre[1]), radius, phi0, phi1))
    return CurveSpec(tuple(edges))


def rounded_square(side: float = 1.0, radius: float = 0.2) -> CurveSpec:
    return rounded_polygon(4, side / np.sqrt(2.0), radius)


PRESETS = {
    "circle": circle,
    "ellipse": ellipse,
    "square": square,
    "regular_polygon": regular_polygon,
    "l_shape": l_shape,
    "rounded_square": rounded_square,
    "rounded_polygon": rounded_polygon,
}


# ---------------------------------------------------------------------------
# curve construction
# ---------------------------------------------------------------------------


def _edge_length(edge, rel_tol=1e-12) -> float:
    n = 32
    prev = None
    for _ in range(12):
        s, w = np.polynomial.legendre.leggauss(n)
        t = 0.5 * (s + 1.0)
        speed = np.linalg.norm(edge.velocity(t), axis=-1)
        val = 0.5 * np.sum(w * speed)
        if prev is not None and abs(val - prev) <= rel_tol * max(1.0, abs(val)):
            return float(val)
        prev = val
        n *= 2
    return float(prev)


def _signed_area(edges) -> float:
    s, w = np.polynomial.legendre.leggauss(96)
    t = 0.5 * (s + 1.0)
    total = 0.0
    for e in edges:
        p = e.point(t)
        v = e.velocity(t)
        total += 0.25 * np.sum(w * (p[..., 0] * v[..., 1] - p[..., 1] * v[..., 0]))
    return float(total)


def _unit(v):
    return v / np.linalg.norm(v)


def _check_self_intersection(edges, scale):
    samples = []
    for e in edges:
        t = np.linspace(0.0, 1.0, 65)
        samples.append(e.point(t))
    ne = len(edges)
    for i in range(ne):
        for j in range(i, ne):
            pi, pj = samples[i], samples[j]
            d = np.linalg.norm(pi[:, None, :] - pj[None, :, :], axis=-1)
            if i == j:
                # ignore parametrically close pairs on the same arc
                idx = np.abs(np.arange(65)[:, None] - np.arange(65)[None, :])
                if ne == 1:
                    idx = np.minimum(idx, 65 - idx)
                mask = idx > 8
                if np.any(d[mask] < 1e-9 * scale):
                    raise SelfIntersectionError("arc approaches itself")
            else:
                adjacent = (j == i + 1) or (i == 0 and j == ne - 1)
                if adjacent:
                    # mask the shared junction neighbourhood
                    mask = np.ones_like(d, dtype=bool)
                    if j == i + 1:
                        mask[-9:, :9] = False
                    if i == 0 and j == ne - 1:
                        mask[:9, -9:] = False
                    if np.any(d[mask] < 1e-9 * scale):
                        raise SelfIntersectionError(f"arcs {i} and {j} intersect")
                else:
                    if d.min() < 1e-9 * scale:
                        raise SelfIntersectionError(f"arcs {i} and {j} intersect")


def build_curve(spec: CurveSpec, corner_angle_tol: float = _ANGLE_TOL) -> Curve:
    """Validate a CurveSpec and produce a normalized anticlockwise Curve.

    Raises OpenCurveError / CuspError / SelfIntersectionError per the
    corresponding invariant violation.  Junctions with a straight-through
    tangent (interior angle pi within tolerance) are treated as smooth and
    produce no corner.
    """
    edges = list(spec.edges)
    if not edges:
        raise OpenCurveError("curve has no edges")
    pts = np.concatenate([e.point(np.array([0.0, 1.0])) for e in edges])
    scale = max(1.0, float(np.max(np.abs(pts))))
    for i, e in enumerate(edges):
        p_end = e.point(np.array(1.0))
        nxt = edges[(i + 1) % len(edges)]
        p_start = nxt.point(np.array(0.0))
        if np.linalg.norm(p_end - p_start) > _CLOSURE_TOL * scale * 10:
            raise OpenCurveError(
                f"edge {i} ends at {p_end} but edge {(i + 1) % len(edges)} starts at {p_start}")

    if _signed_area(edges) < 0:
        edges = [e.reversed_() for e in reversed(edges)]
    area = _signed_area(edges)

    _check_self_intersection(edges, scale)

    corners = []
    ne = len(edges)
    for j in range(ne):
        prev = edges[j - 1]
        nxt = edges[j]
        u = _unit(prev.velocity(np.array(1.0)))
        v = _unit(nxt.velocity(np.array(0.0)))
        cross = u[0] * v[1] - u[1] * v[0]
        dot = float(np.dot(u, v))
        delta = math.atan2(cross, dot)
        if abs(delta) <= corner_angle_tol:
            continue  # smooth junction
        if math.pi - abs(delta) <= corner_angle_tol:
            raise CuspError(f"cusp at junction {j}: tangents anti-parallel")
        theta = math.pi - delta
        pos = nxt.point(np.array(0.0))
        corners.append(Corner(
            position=pos,
            theta=theta,
            tau_plus=v,
            tau_minus=-u,
            tau=u,
            nu=np.array([-u[1], u[0]]),
            edge_in=(j - 1) % ne,
            edge_out=j,
        ))

    lengths = np.array([_edge_length(e) for e in edges])
    return Curve(tuple(edges), tuple(corners), lengths, float(lengths.sum()), area)


def interior_angles(curve: Curve) -> np.ndarray:
    """Interior angles theta_j (inside Omega_+), one per corner."""
    return np.array([c.theta for c in curve.corners])


def sharpest_angle(angles) -> float:
    """omega = min_j min(theta_j, 2 pi - theta_j), in (0, pi)."""
    angles = np.asarray(angles, dtype=float)
    if angles.size == 0:
        raise EmptyCorners("curve has no corners")
    return float(np.min(np.minimum(angles, 2 * np.pi - angles)))


# ---------------------------------------------------------------------------
# quadrature grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Panel:
    start: int  # node index range [start, stop)
    stop: int
    edge_id: int
    t_a: float  # edge-parameter endpoints
    t_b: float
    za: complex  # physical endpoints
    zb: complex
    straight: bool


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Nystrom grid on the curve: nodes, arclength weights and frames.

    kind 'trapezoid': equispaced-in-parameter periodic rule on a single
    smooth closed arc (N even).  kind 'panel': per-edge composite
    Gauss-Legendre panels, graded toward adjacent corners.
    """

    kind: str
    curve: Curve
    nodes: np.ndarray  # (N, 2)
    weights: np.ndarray  # (N,) arclength weights
    tangents: np.ndarray  # (N, 2), tau = (-nu2, nu1)
    normals: np.ndarray  # (N, 2), pointing into Omega_-
    corner_distance: np.ndarray  # (N,)
    panel_index: np.ndarray  # (N,) int, -1 on trapezoid grids
    panels: tuple  # Panel tuple, empty on trapezoid grids
    param: np.ndarray  # (N,) trapezoid angle theta in [0, 2pi); empty otherwise
    dy_dparam: np.ndarray  # complex velocity dz/dtheta (trapezoid) or dz/ds (panel)
    panel_s: np.ndarray  # (N,) panel-local Gauss abscissa, 0.0 on trapezoid
    grading_exponent: float

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def zc(self) -> np.ndarray:
        return self.nodes[:, 0] + 1j * self.nodes[:, 1]

    @property
    def tc(self) -> np.ndarray:
        return self.tangents[:, 0] + 1j * self.tangents[:, 1]

    @property
    def nc(self) -> np.ndarray:
        return self.normals[:, 0] + 1j * self.normals[:, 1]

    def cache(self) -> dict:
        try:
            return _GRID_CACHES[self]
        except KeyError:
            d: dict = {}
            _GRID_CACHES[self] = d
            return d


_GRID_CACHES: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _freeze(arr):
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


def _grade_breakpoints(n_panels: int, q: float, corner_at_start: bool, corner_at_end: bool):
    s = np.linspace(0.0, 1.0, n_panels + 1)
    if corner_at_start and corner_at_end:
        u = np.where(s <= 0.5, 0.5 * (2 * s) ** q, 1.0 - 0.5 * (2 * (1 - s)) ** q)
    elif corner_at_start:
        u = s**q
    elif corner_at_end:
        u = 1.0 - (1.0 - s) ** q
    else:
        u = s
    u[0], u[-1] = 0.0, 1.0
    return u


def discretize(curve: Curve, nodes_per_edge: int, grading_exponent: float = 3.0) -> QuadratureGrid:
    """Build the quadrature grid; see class docstring for the two flavours."""
    if nodes_per_edge < 8:
        raise InvalidRefinement("nodes_per_edge must be at least 8")
    if grading_exponent < 1.0:
        raise InvalidRefinement("grading_exponent must be >= 1")

    if curve.is_single_smooth:
        n = nodes_per_edge
        if n % 2:
            raise InvalidRefinement(
                "smooth closed curves require even N (alternate-point rule)")
        edge = curve.edges[0]
        t = np.arange(n) / n
        pos = edge.point(t)
        vel = edge.velocity(t)
        speed = np.linalg.norm(vel, axis=-1)
        tang = vel / speed[:, None]
        norm = np.stack([tang[:, 1], -tang[:, 0]], axis=-1)
        weights = speed / n
        dy_dparam = (vel[:, 0] + 1j * vel[:, 1]) / (2 * np.pi)
        return QuadratureGrid(
            kind="trapezoid", curve=curve,
            nodes=_freeze(pos), weights=_freeze(weights),
            tangents=_freeze(tang), normals=_freeze(norm),
            corner_distance=_freeze(np.full(n, np.inf)),
            panel_index=_freeze(np.full(n, -1, dtype=int)),
            panels=(),
            param=_freeze(2 * np.pi * t),
            dy_dparam=_freeze(dy_dparam),
            panel_s=_freeze(np.zeros(n)),
            grading_exponent=grading_exponent,
        )

    # panel flavour
    n_pan = int(np.ceil(nodes_per_edge / _PANEL_ORDER))
    sgl, wgl = np.polynomial.legendre.leggauss(_PANEL_ORDER)
    corner_edges_in = {c.edge_in for c in curve.corners}
    corner_edges_out = {c.edge_out for c in curve.corners}
    nodes, weights, tangs, norms = [], [], [], []
    panels, panel_idx, dyds_all, svals_all = [], [], [], []
    count = 0
    for ei, edge in enumerate(curve.edges):
        at_start = ei in corner_edges_out
        at_end = ei in corner_edges_in
        u = _grade_breakpoints(n_pan, grading_exponent, at_start, at_end)
        for p in range(n_pan):
            ta, tb = u[p], u[p + 1]
            t = ta + (tb - ta) * 0.5 * (sgl + 1.0)
            pos = edge.point(t)
            vel = edge.velocity(t)
            dyds = (vel[:, 0] + 1j * vel[:, 1]) * 0.5 * (tb - ta)
            speed = np.abs(dyds)
            tang = np.stack([dyds.real, dyds.imag], axis=-1) / speed[:, None]
            pa = edge.point(np.array(ta))
            pb = edge.point(np.array(tb))
            panels.append(Panel(count, count + _PANEL_ORDER, ei, ta, tb,
                                complex(pa[0], pa[1]), complex(pb[0], pb[1]),
                                getattr(edge, "is_straight", False)))
            nodes.append(pos)
            weights.append(wgl * speed)
            tangs.append(tang)
            norms.append(np.stack([tang[:, 1], -tang[:, 0]], axis=-1))
            dyds_all.append(dyds)
            svals_all.append(sgl.copy())
            panel_idx.append(np.full(_PANEL_ORDER, len(panels) - 1, dtype=int))
            count += _PANEL_ORDER
    nodes = np.concatenate(nodes)
    cpos = curve.corner_positions()
    if cpos.shape[0]:
        cd = np.min(np.linalg.norm(nodes[:, None, :] - cpos[None, :, :], axis=-1), axis=1)
    else:
        cd = np.full(nodes.shape[0], np.inf)
    return QuadratureGrid(
        kind="panel", curve=curve,
        nodes=_freeze(nodes), weights=_freeze(np.concatenate(weights)),
        tangents=_freeze(np.concatenate(tangs)), normals=_freeze(np.concatenate(norms)),
        corner_distance=_freeze(cd),
        panel_index=_freeze(np.concatenate(panel_idx)),
        panels=tuple(panels),
        param=_freeze(np.zeros(0)),
        dy_dparam=_freeze(np.concatenate(dyds_all)),
        panel_s=_freeze(np.concatenate(svals_all)),
        grading_exponent=grading_exponent,
    )
