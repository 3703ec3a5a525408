"""Busemann-Hausdorff densities on 2-planes and their codimension-two twins.

The 2-density of a body B at a simple bivector w is
``alpha_2 * |w|_2 / H^2(B intersect span(w))``; the codimension-two variant
replaces the exact planar section by a Monte Carlo volume of the
(n-2)-dimensional central section, with the spanning subspace recovered
through the Hodge dual.  The normalizing ball volume alpha_m is kept in
both (any constant cancels from every convexity statement).
"""

import math
from dataclasses import dataclass

import numpy as np

from .bodies import Body, body_label, body_radius_bounds, minkowski_many
from .errors import (
    DegenerateSpan,
    DimensionMismatch,
    InsufficientSamples,
    NotSimple,
    ZeroBivector,
)
from .geom import (
    Bivector,
    Plane2,
    _philox,
    gram_schmidt,
    hodge_star,
    hodge_star_codim,
    plucker_defect,
)
from .sections import cross_section
from .tolerances import TOL


@dataclass(frozen=True)
class DensityValue:
    value: float
    body: str
    bivector_norm: float
    stderr: float | None = None


def alpha(m: int) -> float:
    """Volume of the Euclidean unit m-ball, pi^(m/2) / Gamma(m/2 + 1)."""
    if not (1 <= m <= 8):
        raise DimensionMismatch("ball dimension must be in 1..8")
    return math.pi ** (m / 2.0) / math.gamma(m / 2.0 + 1.0)


def plane_from_bivector(w: Bivector) -> Plane2:
    """Recover an orthonormal basis of span(w) for a simple bivector.

    Columns of the antisymmetric coordinate matrix lie in the span; the two
    of largest Euclidean norm (ties by index) are orthonormalized, falling
    back to further column pairs if the preferred pair is degenerate.
    """
    nrm = w.norm
    if nrm == 0.0:
        raise ZeroBivector("cannot span a plane from the zero bivector")
    if abs(plucker_defect(w)) > TOL.simplicity_rel * nrm**2:
        raise NotSimple(f"plucker defect {plucker_defect(w):.3g} too large")
    n = w.n
    mat = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    mat[iu] = w.coords
    mat -= mat.T
    col_norms = np.linalg.norm(mat, axis=0)
    order = sorted(range(n), key=lambda j: (-col_norms[j], j))
    for a_idx in range(n):
        for b_idx in range(a_idx + 1, n):
            try:
                return gram_schmidt(mat[:, order[a_idx]], mat[:, order[b_idx]])
            except DegenerateSpan:
                continue
    raise NotSimple("could not extract two independent columns")


def bh_density_2(body: Body, w: Bivector) -> DensityValue:
    """Two-dimensional density alpha_2 |w|_2 / H^2(body cut by span(w))."""
    if w.n != body.n:
        raise DimensionMismatch("bivector and body dimensions differ")
    plane = plane_from_bivector(w)
    area = cross_section(body, plane).euclidean_area
    return DensityValue(math.pi * w.norm / area, body_label(body), w.norm)


def bh_area(body: Body, plane: Plane2, euclidean_area: float) -> float:
    """Normed 2-measure of a planar set of the given Euclidean area."""
    if euclidean_area < 0.0:
        raise ValueError("euclidean_area must be nonnegative")
    return math.pi * euclidean_area / cross_section(body, plane).euclidean_area


def _orthocomplement(plane: Plane2) -> np.ndarray:
    """Orthonormal basis (columns) of the complement of a 2-plane."""
    q, _ = np.linalg.qr(np.column_stack((plane.u, plane.v)), mode="complete")
    return q[:, 2:]


_MC_CHUNK = 1 << 17


def mc_section_volume(
    body: Body, basis: np.ndarray, n_samples: int, seed: int = 0
) -> tuple[float, float]:
    """Monte Carlo volume of body cut by the subspace spanned by basis columns.

    Samples uniformly in the box r_out * [-1, 1]^m mapped isometrically into
    the subspace and counts membership.  Returns (volume, stderr).  Chunks
    are keyed by (seed, chunk index), so the result is independent of any
    parallel scheduling of the chunks.
    """
    m = basis.shape[1]
    _, r_out = body_radius_bounds(body)
    box = (2.0 * r_out) ** m
    hits = 0
    done = 0
    chunk_idx = 0
    while done < n_samples:
        take = min(_MC_CHUNK, n_samples - done)
        gen = _philox(seed, chunk_idx)
        t = gen.uniform(-r_out, r_out, size=(take, m))
        pts = t @ basis.T
        hits += int(np.count_nonzero(minkowski_many(body, pts) <= 1.0))
        done += take
        chunk_idx += 1
    p_hat = hits / n_samples
    volume = box * p_hat
    stderr = box * math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n_samples)
    return volume, stderr


def bh_density_codim2(
    body: Body, w, mc_samples: int = 1_000_000, seed: int = 0
) -> DensityValue:
    """Codimension-two density alpha_(n-2) |w|_2 / H^(n-2)(body cut by span w).

    ``w`` is a simple (n-2)-vector: a Bivector when n = 4, otherwise the
    lex-ordered coordinate array of degree n-2.  The spanning subspace is
    the orthogonal complement of the plane of the Hodge-dual bivector, and
    the section volume is estimated by seeded Monte Carlo with an honest
    standard error.
    """
    n = body.n
    if n not in (4, 6):
        raise DimensionMismatch("codimension-two densities are supported for n in {4, 6}")
    if isinstance(w, Bivector):
        if w.n != n:
            raise DimensionMismatch("bivector and body dimensions differ")
        coords = w.coords
        dual = hodge_star(w)
    else:
        coords = np.asarray(w, dtype=float)
        dual = hodge_star_codim(coords, n)
    w_norm = float(np.linalg.norm(coords))
    if w_norm == 0.0:
        raise ZeroBivector("zero multivector")
    if abs(plucker_defect(dual)) > TOL.simplicity_rel * w_norm**2:
        raise NotSimple("multivector is not simple within tolerance")
    dual_plane = plane_from_bivector(dual)
    basis = _orthocomplement(dual_plane)
    volume, vol_se = mc_section_volume(body, basis, mc_samples, seed)
    if volume <= 0.0 or vol_se / volume > TOL.mc_rel_stderr:
        raise InsufficientSamples(
            f"relative standard error {vol_se / volume if volume else float('inf'):.3g} "
            f"exceeds {TOL.mc_rel_stderr:.0%}"
        )
    value = alpha(n - 2) * w_norm / volume
    stderr = value * vol_se / volume
    return DensityValue(value, body_label(body), w_norm, stderr)
