"""Projection-contraction machinery and the numeric no-contraction certificate.

A linear projection onto W0 = span(e1, e2) is determined by four reals
(a, b, c, d) filling the top-right 2x2 block of its matrix.  Such a
projection scales Euclidean 2-area on a plane V by a constant factor
lambda(V) = |pi(u) ^ pi(v)|; it contracts the normed Hausdorff 2-measure
only if lambda(V) * H^2(C cut V) <= H^2(C cut W0) for every plane V.  The
certificate sweeps a parameter box and exhibits, for each grid point, a
witness plane violating that inequality.
"""

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bodies import AbsSumBody, Body, SmoothBody, ambient_dim, body_label
from .errors import CertificateFailed, DegenerateSpan, DimensionMismatch, IllConditioned, InvalidId
from .geom import Plane2, _philox, gram_schmidt, random_planes, wedge
from .sections import cross_section

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class ProjectionW0:
    """The projection onto span(e1, e2) with top-right block [[a, b], [c, d]]."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def matrix(self, n: int = 4) -> np.ndarray:
        if n < 4:
            raise DimensionMismatch("projection family needs dimension >= 4")
        m = np.zeros((n, n))
        m[0, 0] = m[1, 1] = 1.0
        m[0, 2], m[0, 3] = self.a, self.b
        m[1, 2], m[1, 3] = self.c, self.d
        return m

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        out[0] = x[0] + self.a * x[2] + self.b * x[3]
        out[1] = x[1] + self.c * x[2] + self.d * x[3]
        return out

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class PlaneFamilyId:
    """Member of the built-in witness family: index 1..9, epsilon for 1..8."""

    index: int
    epsilon: float = 0.0

    def __post_init__(self):
        if self.index not in range(1, 10):
            raise InvalidId(f"plane index {self.index} outside 1..9")
        if self.index != 9 and abs(self.epsilon) > 0.5:
            raise InvalidId("epsilon must satisfy |eps| <= 0.5")


# axis attached to (e1, e2) and the sign pattern, for indices 1..8
_FAMILY_AXES = {
    1: (2, 3, +1.0, +1.0),
    2: (2, 3, -1.0, -1.0),
    3: (2, 3, -1.0, +1.0),
    4: (2, 3, +1.0, -1.0),
    5: (3, 2, +1.0, +1.0),
    6: (3, 2, -1.0, -1.0),
    7: (3, 2, -1.0, +1.0),
    8: (3, 2, +1.0, -1.0),
}


def named_plane(plane_id: PlaneFamilyId | int, epsilon: float | None = None) -> Plane2:
    """The nine named planes of the witness family (in R^4).

    Indices 1..8 tilt (e1, e2) into the (e3, e4) directions by epsilon with
    the four sign patterns on either axis pairing; index 9 is the fixed
    far-away plane.  epsilon = 0 degenerates indices 1..8 to W0.
    """
    if isinstance(plane_id, PlaneFamilyId):
        pid = plane_id
    else:
        pid = PlaneFamilyId(int(plane_id), 0.0 if epsilon is None else float(epsilon))
    if pid.index == 9:
        s = 1.0 / SQRT2
        return Plane2(np.array([s, 0.0, s, 0.0]), np.array([0.0, s, 0.0, -s]))
    ax_u, ax_v, sign_u, sign_v = _FAMILY_AXES[pid.index]
    eps = pid.epsilon
    scale = 1.0 / np.sqrt(1.0 + eps * eps)
    u = np.zeros(4)
    v = np.zeros(4)
    u[0] = scale
    u[ax_u] = sign_u * eps * scale
    v[1] = scale
    v[ax_v] = sign_v * eps * scale
    return Plane2(u, v)


def w0_plane(n: int = 4) -> Plane2:
    u = np.zeros(n)
    v = np.zeros(n)
    u[0] = 1.0
    v[1] = 1.0
    return Plane2(u, v)


def area_factor(p: ProjectionW0, plane: Plane2) -> float:
    """Euclidean 2-area scaling factor |pi(u) ^ pi(v)| of the projection."""
    return wedge(p.apply(plane.u), p.apply(plane.v)).norm


def contraction_gap(
    body: Body, p: ProjectionW0, plane: Plane2, w0_area: float | None = None
) -> float:
    """lambda * H^2(body cut plane) - H^2(body cut W0).

    Positive values witness that the projection increases the normed
    Hausdorff 2-measure of sets inside the plane.
    """
    if plane.n != body.n:
        raise DimensionMismatch("body and plane dimensions differ")
    lam = area_factor(p, plane)
    area_v = cross_section(body, plane).euclidean_area
    if w0_area is None:
        w0_area = cross_section(body, w0_plane(body.n)).euclidean_area
    return lam * area_v - w0_area


def lemma_lower_bound(family: str, eps: float) -> float:
    """Closed-form lower bounds for the tilted-plane section areas.

    ``v1v2`` covers the planes tilted with matching signs on (e3, e4);
    ``v3v4`` the mixed-sign pair.  Both reduce to 8/(4 + 3*sqrt(2)) at
    eps = 0 and are even in eps.
    """
    if abs(eps) >= 0.5:
        raise ValueError("|eps| must be below 0.5")
    e2 = eps * eps
    if family == "v1v2":
        lead = 4.0 * (1.0 + e2) / (1.0 + SQRT2 + (SQRT2 - 1.0) * e2)
        bracket = (1.0 - eps) / (2.0 + SQRT2 - (2.0 - SQRT2) * eps) + (1.0 + eps) / (
            2.0 + SQRT2 + (2.0 - SQRT2) * eps
        )
        return lead * bracket
    if family == "v3v4":
        return 8.0 * (1.0 + e2) / (
            (SQRT2 + 1.0 + (SQRT2 - 1.0) * eps) * (SQRT2 + 2.0 + (SQRT2 - 2.0) * eps)
        )
    raise InvalidId(f"unknown bound family {family!r}; use 'v1v2' or 'v3v4'")


def taylor_fit(area_fn, eps_grid) -> tuple[float, float, float]:
    """Least-squares fit f(eps) ~ a + c eps^2 + d eps^4 over the grid.

    Returns (a, c, max residual).  The function must be even in eps (checked
    pointwise) and the grid must span at least one decade.
    """
    grid = sorted(float(e) for e in eps_grid)
    if len(set(grid)) < 4:
        raise IllConditioned("need at least 4 distinct eps values")
    if not all(0.0 < e <= 0.05 for e in grid):
        raise ValueError("eps grid must lie in (0, 0.05]")
    if grid[-1] / grid[0] < 10.0 - 1e-9:
        raise IllConditioned("eps grid spans less than one decade")
    vals = []
    for e in grid:
        fe = float(area_fn(e))
        fm = float(area_fn(-e))
        if abs(fe - fm) >= 1e-10:
            raise ValueError(f"area function is not even at eps={e}")
        vals.append(fe)
    g = np.asarray(grid)
    design = np.column_stack((np.ones_like(g), g**2, g**4))
    coef, *_ = np.linalg.lstsq(design, np.asarray(vals), rcond=None)
    resid = float(np.abs(design @ coef - vals).max())
    return float(coef[0]), float(coef[1]), resid


@dataclass(frozen=True)
class PinningReport:
    """Admissible-parameter intervals from the tilted-plane pairs at one eps."""

    eps: float
    intervals: dict
    widths: dict


_PIN_LINES = {
    "a+d": (1, 2, lambda t: ProjectionW0(t / 2.0, 0.0, 0.0, t / 2.0)),
    "a-d": (4, 3, lambda t: ProjectionW0(t / 2.0, 0.0, 0.0, -t / 2.0)),
    "b+c": (5, 6, lambda t: ProjectionW0(0.0, t / 2.0, t / 2.0, 0.0)),
    "b-c": (8, 7, lambda t: ProjectionW0(0.0, t / 2.0, -t / 2.0, 0.0)),
}


def _gap_root_increasing(gap_fn, lo, hi):
    """Root of an increasing function bracketed by sign change, by bisection."""
    flo, fhi = gap_fn(lo), gap_fn(hi)
    while fhi <= 0.0:
        hi = lo + 2.0 * (hi - lo)
        fhi = gap_fn(hi)
    if flo >= 0.0:
        raise ValueError("left bracket is not negative")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if gap_fn(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def projection_pinning(body: Body, eps: float) -> PinningReport:
    """Interval bounds on (a+d, a-d, b+c, b-c) from the eight tilted planes.

    For each combination, the projection moves along the symmetric parameter
    line and the two matched planes of the pair flag a violation on either
    side; the reported interval runs between the two gap sign changes.  The
    intervals always contain 0 and shrink linearly with eps.
    """
    if not (0.0 < eps <= 0.1):
        raise ValueError("eps must lie in (0, 0.1]")
    w0_area = cross_section(body, w0_plane(body.n)).euclidean_area
    intervals = {}
    widths = {}
    for combo, (idx_plus, idx_minus, line) in _PIN_LINES.items():
        plane_plus = named_plane(idx_plus, eps)
        plane_minus = named_plane(idx_minus, eps)
        area_plus = cross_section(body, plane_plus).euclidean_area
        area_minus = cross_section(body, plane_minus).euclidean_area

        def gap_plus(t):
            return area_factor(line(t), plane_plus) * area_plus - w0_area

        def gap_minus_neg(t):
            # reflect so the bisection always sees an increasing function
            return area_factor(line(-t), plane_minus) * area_minus - w0_area

        vertex = -2.0 / eps + 1e-9  # lambda vanishes there, gap surely negative
        hi = _gap_root_increasing(gap_plus, vertex, vertex + 4.0 / eps)
        lo = -_gap_root_increasing(gap_minus_neg, vertex, vertex + 4.0 / eps)
        lo, hi = min(lo, hi), max(lo, hi)
        intervals[combo] = (lo, hi)
        widths[combo] = hi - lo
    return PinningReport(eps, intervals, widths)


# ---------------------------------------------------------------------------
# certificate
# ---------------------------------------------------------------------------


@dataclass
class Certificate:
    """Result of a no-contraction sweep over the projection parameter box."""

    body: str
    box_halfwidth: float
    grid_n: int
    eps_set: tuple
    extra_planes: int
    seed: int
    gap_threshold: float
    family_labels: list
    plane_areas: np.ndarray
    w0_area: float
    cell_values: np.ndarray = field(repr=False)
    cell_witness: np.ndarray = field(repr=False)
    grid_min_gap: float = 0.0
    grid_min_point: tuple = (0.0, 0.0, 0.0, 0.0)
    grid_min_witness: str = ""
    refined_count: int = 0
    lifted: list = field(default_factory=list)
    worst_cell: dict = field(default_factory=dict)
    global_min_max_gap: float = 0.0
    exterior: dict = field(default_factory=dict)
    witness_counts: dict = field(default_factory=dict)
    runtime_seconds: float = 0.0
    success: bool = False

    def to_report(self, deterministic: bool = True) -> dict:
        report = {
            "body": self.body,
            "box_halfwidth": self.box_halfwidth,
            "grid_n": self.grid_n,
            "eps_set": list(self.eps_set),
            "extra_planes": self.extra_planes,
            "seed": self.seed,
            "gap_threshold": self.gap_threshold,
            "family_size": len(self.family_labels),
            "family_labels": list(self.family_labels),
            "success": self.success,
            "global_min_max_gap": self.global_min_max_gap,
            "grid_min": {
                "point": list(self.grid_min_point),
                "gap": self.grid_min_gap,
                "witness": self.grid_min_witness,
            },
            "worst_cell": self.worst_cell,
            "refined_points": self.refined_count,
            "lifted": self.lifted,
            "exterior": self.exterior,
            "witness_counts": self.witness_counts,
            "cells": {
                "count": int(self.cell_values.size),
                "min_gap": float(self.cell_values.min()),
                "max_gap": float(self.cell_values.max()),
                "all_positive": bool((self.cell_values > 0.0).all()),
            },
        }
        if not deterministic:
            report["runtime_seconds"] = self.runtime_seconds
        return report


def _reduce_to_r4(body: Body) -> Body:
    """Product bodies with a 4-dim left factor certify through that factor."""
    if isinstance(body, SmoothBody) and body.kind == "product" and ambient_dim(body.left) == 4:
        return body.left
    return body


def _vertex_planes(body: Body) -> list[tuple[str, Plane2]]:
    """Planes through pairs of the body's vertices, for square abs-sum bodies.

    For a body {x : sum |l_j(x)| <= 1} with invertible functional matrix L
    the vertices are the columns of L^-1 and the images of the coordinate
    planes are canonical witness candidates.
    """
    if not isinstance(body, AbsSumBody):
        return []
    L = body.functionals
    if L.shape[0] != L.shape[1]:
        return []
    verts = np.linalg.inv(L)
    out = []
    for i in range(4):
        for j in range(i + 1, 4):
            try:
                out.append((f"vertex:{i + 1}{j + 1}", gram_schmidt(verts[:, i], verts[:, j])))
            except DegenerateSpan:
                continue
    return out


def _build_family(body: Body, eps_set, extra_planes: int, seed: int):
    labels = ["v9"]
    planes = [named_plane(9)]
    for eps in eps_set:
        for idx in range(1, 9):
            labels.append(f"v{idx}:{eps:g}")
            planes.append(named_plane(idx, eps))
    for lbl, pl in _vertex_planes(body):
        labels.append(lbl)
        planes.append(pl)
    for k, pl in enumerate(random_planes(seed, 4, extra_planes)):
        labels.append(f"random:{k}")
        planes.append(pl)
    return labels, planes


def _plane_tables(body: Body, planes):
    areas = np.array([cross_section(body, pl).euclidean_area for pl in planes])
    U = np.array([pl.u for pl in planes])
    V = np.array([pl.v for pl in planes])
    return areas, U, V


def _gaps_at_points(points: np.ndarray, U, V, areas, w0_area) -> np.ndarray:
    """Gap matrix (n_points, n_planes) for parameter points (a, b, c, d)."""
    a, b, c, d = (points[:, i][:, None] for i in range(4))
    P = U[None, :, 0] + a * U[None, :, 2] + b * U[None, :, 3]
    R = V[None, :, 0] + a * V[None, :, 2] + b * V[None, :, 3]
    Q = V[None, :, 1] + c * V[None, :, 2] + d * V[None, :, 3]
    S = U[None, :, 1] + c * U[None, :, 2] + d * U[None, :, 3]
    return np.abs(P * Q - R * S) * areas[None, :] - w0_area


_WITNESS_TIE = 1e-12


def _scan_grid(axes, U, V, areas, w0_area, threads):
    """Per-cell best gap and first witness within tie tolerance, vectorized.

    The first grid axis is chunked across a thread pool; chunks write into
    disjoint slabs so the result is independent of scheduling.
    """
    g = axes.size
    n_planes = areas.size
    best = np.empty((g, g, g, g))
    witness = np.empty((g, g, g, g), dtype=np.int16)

    B = axes[None, :, None, None]
    C = axes[None, None, :, None]
    D = axes[None, None, None, :]

    def do_slab(i0, i1):
        A = axes[i0:i1, None, None, None]

        def plane_gap(i):
            u, v = U[i], V[i]
            P = u[0] + A * u[2] + B * u[3]
            R = v[0] + A * v[2] + B * v[3]
            Q = v[1] + C * v[2] + D * v[3]
            S = u[1] + C * u[2] + D * u[3]
            return np.abs(P * Q - R * S) * areas[i] - w0_area

        local_best = np.full((i1 - i0, g, g, g), -np.inf)
        for i in range(n_planes):
            np.maximum(local_best, plane_gap(i), out=local_best)
        local_wit = np.zeros((i1 - i0, g, g, g), dtype=np.int16)
        assigned = np.zeros(local_best.shape, dtype=bool)
        for i in range(n_planes):
            hit = ~assigned & (plane_gap(i) >= local_best - _WITNESS_TIE)
            local_wit[hit] = i
            assigned |= hit
        best[i0:i1] = local_best
        witness[i0:i1] = local_wit

    workers = threads or os.cpu_count() or 1
    bounds = np.linspace(0, g, min(workers, g) + 1).astype(int)
    slabs = [(int(bounds[k]), int(bounds[k + 1])) for k in range(len(bounds) - 1)
             if bounds[k] < bounds[k + 1]]
    if len(slabs) <= 1:
        do_slab(0, g)
    else:
        with ThreadPoolExecutor(max_workers=len(slabs)) as pool:
            list(pool.map(lambda se: do_slab(*se), slabs))
    return best, witness


def _make_area_fn(body: Body):
    """Scalar section-area evaluator for orthonormal (u, v) plane bases.

    Pure-Python fan-of-extreme-points evaluation for abs-sum bodies (the
    maximizer calls this thousands of times); radial sampling otherwise.
    """
    if isinstance(body, AbsSumBody):
        rows = [tuple(r) for r in body.functionals]

        def area_fn(u, v):
            coeffs = [
                (sum(ri * ui for ri, ui in zip(r, u)), sum(ri * vi for ri, vi in zip(r, v)))
                for r in rows
            ]
            pts = []
            for (a, b) in coeffs:
                h = (a * a + b * b) ** 0.5
                if h == 0.0:
                    continue
                for (dx, dy) in ((-b / h, a / h), (b / h, -a / h)):
                    nd = sum(abs(aj * dx + bj * dy) for (aj, bj) in coeffs)
                    if nd == 0.0:
                        return 0.0
                    r = 1.0 / nd
                    pts.append((np.arctan2(dy, dx), r * dx, r * dy))
            if len(pts) < 4:
                return 0.0
            pts.sort()
            total = 0.0
            _, px, py = pts[-1]
            for (_, x, y) in pts:
                total += px * y - x * py
                px, py = x, y
            return 0.5 * abs(total)

    else:

        def area_fn(u, v):
            return cross_section(
                body, Plane2(np.asarray(u), np.asarray(v)), radial_n=1024
            ).euclidean_area

    return area_fn


def _maximize_gap_at(point, start_planes, area_fn, w0_area, max_sweeps=200, stop_above=None):
    """Coordinate descent on raw plane parameters, step-halving, <= max_sweeps.

    Maximizes lambda * area(plane) - w0_area over Gr(2, 4) starting from each
    given plane; returns the best (gap, label-of-start).  When ``stop_above``
    is given, later starts are skipped once the bound is cleared (the result
    is a witness lower bound either way).
    """
    a, b, c, d = (float(t) for t in point)

    def eval_raw(x):
        # inline Gram-Schmidt in plain floats; degenerate spans score -inf
        ax, ay, az, aw = x[0], x[1], x[2], x[3]
        bx, by, bz, bw = x[4], x[5], x[6], x[7]
        na = (ax * ax + ay * ay + az * az + aw * aw) ** 0.5
        if na < 1e-12:
            return -np.inf
        ax, ay, az, aw = ax / na, ay / na, az / na, aw / na
        dot = ax * bx + ay * by + az * bz + aw * bw
        bx, by, bz, bw = bx - dot * ax, by - dot * ay, bz - dot * az, bw - dot * aw
        nb = (bx * bx + by * by + bz * bz + bw * bw) ** 0.5
        if nb < 1e-9:
            return -np.inf
        bx, by, bz, bw = bx / nb, by / nb, bz / nb, bw / nb
        pu0 = ax + a * az + b * aw
        pu1 = ay + c * az + d * aw
        pv0 = bx + a * bz + b * bw
        pv1 = by + c * bz + d * bw
        lam = abs(pu0 * pv1 - pu1 * pv0)
        if lam == 0.0:
            return -w0_area
        return lam * area_fn((ax, ay, az, aw), (bx, by, bz, bw)) - w0_area

    best_gap = -np.inf
    best_label = ""
    for label, plane in start_planes:
        x = list(plane.u) + list(plane.v)
        val = eval_raw(x)
        if not np.isfinite(val):
            continue
        step = 0.2
        for _ in range(max_sweeps):
            improved = False
            for i in range(8):
                for s in (step, -step):
                    x2 = x.copy()
                    x2[i] += s
                    v2 = eval_raw(x2)
                    if v2 > val + 1e-15:
                        x, val = x2, v2
                        improved = True
                        break
            if not improved:
                step *= 0.5
                if step < 1e-7:
                    break
        if val > best_gap:
            best_gap = val
            best_label = label
        if stop_above is not None and best_gap > stop_above:
            break
    return best_gap, best_label


def certify_no_contraction(
    body: Body,
    box_halfwidth: float = 4.0,
    grid_n: int = 33,
    eps_set=(0.02, 0.05, 0.1),
    extra_planes: int = 64,
    seed: int = 0,
    gap_threshold: float = 1e-3,
    threads: int | None = None,
) -> Certificate:
    """Sweep the projection box and certify a positive witness gap everywhere.

    For every grid point of [-R, R]^4 the maximum contraction gap over the
    witness family is recorded; the worst 1% of cells get one level of grid
    halving, and the lowest refined points plus the worst cell are sharpened
    by a local plane maximizer.  Rays from the box boundary out to 10R check
    that gaps keep growing outside the box.  Raises CertificateFailed when
    any evaluated point has no witness above the threshold.
    """
    if box_halfwidth < 2.0:
        raise ValueError("box halfwidth must be >= 2")
    if grid_n < 21:
        raise ValueError("grid_n must be >= 21")
    eps_set = tuple(sorted(float(e) for e in eps_set))
    if not eps_set or not all(0.0 < e <= 0.2 for e in eps_set):
        raise ValueError("eps_set must be nonempty inside (0, 0.2]")

    t0 = time.perf_counter()
    target = _reduce_to_r4(body)
    if ambient_dim(target) != 4:
        raise DimensionMismatch("certificate runs on 4-dimensional bodies")

    labels, planes = _build_family(target, eps_set, extra_planes, seed)
    areas, U, V = _plane_tables(target, planes)
    w0_area = cross_section(target, w0_plane(4)).euclidean_area
    area_fn = _make_area_fn(target)

    axes = np.linspace(-box_halfwidth, box_halfwidth, grid_n)
    best, witness = _scan_grid(axes, U, V, areas, w0_area, threads)

    flat_idx = int(np.argmin(best.ravel()))
    grid_min_gap = float(best.ravel()[flat_idx])
    ii = np.unravel_index(flat_idx, best.shape)
    grid_min_point = tuple(float(axes[i]) for i in ii)
    grid_min_witness = labels[int(witness[ii])]

    def fail_at(point, max_gap, reason):
        gaps = _gaps_at_points(np.asarray([point]), U, V, areas, w0_area)[0]
        raise CertificateFailed(point, max_gap, dict(zip(labels, gaps.tolist())), reason)

    if grid_min_gap <= gap_threshold:
        lifted_gap, _ = _maximize_gap_at(
            grid_min_point,
            [(grid_min_witness, planes[int(witness[ii])])],
            area_fn,
            w0_area,
            stop_above=gap_threshold,
        )
        if max(grid_min_gap, lifted_gap) <= gap_threshold:
            fail_at(grid_min_point, max(grid_min_gap, lifted_gap), "interior grid minimum")

    start_pool = [("v9", planes[0])]
    for lbl, pl in zip(labels, planes):
        if lbl.startswith("vertex:34"):
            start_pool.append((lbl, pl))
    probe_starts = [(f"probe:v{i}", named_plane(i, 0.35)) for i in range(1, 9)]

    # worst cell: center gap possibly improved by its own maximizer run
    worst_gap_lift, _ = _maximize_gap_at(
        grid_min_point, [(grid_min_witness, planes[int(witness[ii])])] + start_pool, area_fn, w0_area
    )
    worst_local_gap = max(grid_min_gap, worst_gap_lift)

    # --- refinement: one level of grid halving around the worst 1% of cells
    n_cells = best.size
    n_refine = max(1, int(np.ceil(0.01 * n_cells)))
    order = np.lexsort((np.arange(n_cells), best.ravel()))
    refine_cells = order[:n_refine]
    half = (axes[1] - axes[0]) / 2.0
    offsets = np.array([np.array(t) * half for t in _halving_offsets()], dtype=float)
    centers = np.stack(np.unravel_index(refine_cells, best.shape), axis=1)
    centers = axes[centers]
    refined_points = (centers[:, None, :] + offsets[None, :, :]).reshape(-1, 4)
    refined_points = np.unique(refined_points, axis=0)
    refined_best = np.full(refined_points.shape[0], -np.inf)
    refined_wit = np.zeros(refined_points.shape[0], dtype=np.int32)
    chunk = 1 << 16
    for lo in range(0, refined_points.shape[0], chunk):
        pts = refined_points[lo : lo + chunk]
        gaps = _gaps_at_points(pts, U, V, areas, w0_area)
        mx = gaps.max(axis=1)
        refined_best[lo : lo + chunk] = mx
        refined_wit[lo : lo + chunk] = (gaps >= mx[:, None] - _WITNESS_TIE).argmax(axis=1)

    # --- maximizer lift on every refined point that could drag the global
    # minimum below the sharpened worst-cell value (capped for safety)
    bar = max(2.0 * gap_threshold, worst_local_gap - 1e-9)
    low_idx = np.flatnonzero(refined_best < bar)
    if low_idx.size > 128:
        sub = np.lexsort((low_idx, refined_best[low_idx]))[:128]
        low_idx = low_idx[sub]
    lifted = []
    lifted_values = refined_best.copy()
    for idx in (int(i) for i in low_idx):
        pt = refined_points[idx]
        fam_gap = float(refined_best[idx])
        starts = [(labels[refined_wit[idx]], planes[refined_wit[idx]])] + start_pool + probe_starts
        lifted_gap, from_label = _maximize_gap_at(
            tuple(pt), starts, area_fn, w0_area, stop_above=worst_local_gap
        )
        new_val = max(fam_gap, lifted_gap)
        lifted_values[idx] = new_val
        lifted.append(
            {
                "point": [float(t) for t in pt],
                "family_gap": fam_gap,
                "lifted_gap": new_val,
                "witness": labels[refined_wit[idx]]
                if new_val == fam_gap
                else f"optimized({from_label})",
            }
        )

    # refined argmin inside the worst cell's halved neighborhood (post-lift);
    # value ties within the witness tolerance resolve toward the cell center
    cell_pt = np.asarray(grid_min_point)
    near = np.all(np.abs(refined_points - cell_pt[None, :]) <= half + 1e-12, axis=1)
    if np.any(near):
        near_idx = np.flatnonzero(near)
        vals = lifted_values[near_idx]
        tied = near_idx[vals <= vals.min() + _WITNESS_TIE]
        dists = np.abs(refined_points[tied] - cell_pt[None, :]).max(axis=1)
        jloc = int(tied[int(np.lexsort((tied, dists))[0])])
        refined_point = [float(t) for t in refined_points[jloc]]
        refined_gap = float(lifted_values[jloc])
        refined_witness = labels[int(refined_wit[jloc])]
    else:
        refined_point = list(grid_min_point)
        refined_gap = grid_min_gap
        refined_witness = grid_min_witness

    # global minimum over every evaluated point, using the best-known witness
    # value at each (the worst cell keeps its maximizer-sharpened gap)
    base_vals = best.ravel().copy()
    base_vals[flat_idx] = worst_local_gap
    global_min = min(float(base_vals.min()), float(lifted_values.min()))
    if global_min <= gap_threshold:
        bad = int(np.lexsort((np.arange(lifted_values.size), lifted_values))[0])
        fail_at(tuple(refined_points[bad]), float(lifted_values[bad]), "refined point")

    # --- exterior: 2^8 sign-pattern rays from the box boundary to 10R
    rays = _exterior_rays(seed, box_halfwidth)
    radii_factors = 10.0 ** (np.arange(8) / 7.0)
    exterior_min_step = np.inf
    monotone = True
    bad_point = None
    for ray in rays:
        pts = ray[None, :] * radii_factors[:, None]
        mx = _gaps_at_points(pts, U, V, areas, w0_area).max(axis=1)
        steps = np.diff(mx)
        if steps.size:
            exterior_min_step = min(exterior_min_step, float(steps.min()))
        if np.any(steps < -1e-9):
            monotone = False
            k = int(np.argmax(steps < -1e-9))
            bad_point = tuple(float(t) for t in pts[k + 1])
            break
    if not monotone:
        fail_at(bad_point, 0.0, "exterior ray not monotone")

    witness_labels, witness_freq = np.unique(witness, return_counts=True)
    counts = {labels[int(w)]: int(c) for w, c in zip(witness_labels, witness_freq)}

    cert = Certificate(
        body=body_label(body),
        box_halfwidth=float(box_halfwidth),
        grid_n=int(grid_n),
        eps_set=eps_set,
        extra_planes=int(extra_planes),
        seed=int(seed),
        gap_threshold=float(gap_threshold),
        family_labels=labels,
        plane_areas=areas,
        w0_area=float(w0_area),
        cell_values=best,
        cell_witness=witness,
        grid_min_gap=grid_min_gap,
        grid_min_point=grid_min_point,
        grid_min_witness=grid_min_witness,
        refined_count=int(refined_points.shape[0]),
        lifted=lifted,
        worst_cell={
            "point": list(grid_min_point),
            "gap": grid_min_gap,
            "witness": grid_min_witness,
            "local_gap": worst_local_gap,
            "refined_point": refined_point,
            "refined_gap": refined_gap,
            "refined_witness": refined_witness,
        },
        global_min_max_gap=float(global_min),
        exterior={
            "rays": len(rays),
            "radii_factors": radii_factors.tolist(),
            "monotone": monotone,
            "min_step": float(exterior_min_step),
        },
        witness_counts=counts,
        runtime_seconds=time.perf_counter() - t0,
        success=True,
    )
    return cert


def _halving_offsets():
    """All offsets in {-1, 0, +1}^4 in a fixed deterministic order."""
    vals = (-1.0, 0.0, 1.0)
    return [(p, q, r, s) for p in vals for q in vals for r in vals for s in vals]


def _exterior_rays(seed: int, box_halfwidth: float) -> np.ndarray:
    """256 rays: 16 sign patterns times 16 weight profiles, boundary-scaled."""
    gen = _philox(seed, 0xE57E)
    signs = np.array([[p, q, r, s] for p in (1.0, -1.0) for q in (1.0, -1.0)
                      for r in (1.0, -1.0) for s in (1.0, -1.0)])
    rays = []
    for pattern in signs:
        weights = [np.ones(4)]
        for _ in range(15):
            weights.append(0.25 + np.abs(gen.standard_normal(4)))
        for w in weights:
            d = pattern * w
            d = d / np.abs(d).max() * box_halfwidth
            rays.append(d)
    return np.asarray(rays)
