"""Unit balls of finite-dimensional norms and their Minkowski functionals.

Two representations cover everything the toolkit needs:

* ``AbsSumBody`` -- polyhedral balls {x : sum_j |l_j(x)| <= 1} given by a
  functional matrix; this houses the cross-polytope, its rotated copy and
  arbitrary linear images of the l1 ball.
* ``SmoothBody`` -- Euclidean balls, complex lp balls on interleaved real
  coordinate pairs, and products (gauge = max of factor gauges).
"""

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DimensionMismatch
from .geom import MAX_DIM, _philox, as_vec

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class AbsSumBody:
    """Polyhedral unit ball {x : sum_j |l_j(x)| <= 1}."""

    functionals: np.ndarray
    label: str = "abs_sum"

    def __post_init__(self):
        f = np.asarray(self.functionals, dtype=float)
        if f.ndim != 2 or f.shape[0] < 1:
            raise DimensionMismatch("functionals must form a k x n matrix")
        if not (2 <= f.shape[1] <= MAX_DIM):
            raise DimensionMismatch(f"ambient dimension {f.shape[1]} outside 2..{MAX_DIM}")
        if not np.all(np.isfinite(f)):
            raise ValueError("functional entries must be finite")
        sv = np.linalg.svd(f, compute_uv=False)
        if sv[-1] <= 1e-12 * sv[0]:
            raise ValueError("functionals do not span the space; the body is unbounded")
        f.setflags(write=False)
        object.__setattr__(self, "functionals", f)

    @property
    def n(self) -> int:
        return self.functionals.shape[1]


@dataclass(frozen=True)
class SmoothBody:
    """Non-polyhedral ball: euclidean | complex_lp | product."""

    kind: str
    n: int
    p: float | None = None
    k: int | None = None
    left: "Body | None" = None
    m: int | None = None
    label: str = field(default="")

    def __post_init__(self):
        if self.kind not in ("euclidean", "complex_lp", "product"):
            raise ValueError(f"unknown smooth body kind {self.kind!r}")
        if not (2 <= self.n <= MAX_DIM):
            raise DimensionMismatch(f"ambient dimension {self.n} outside 2..{MAX_DIM}")


Body = Union[AbsSumBody, SmoothBody]


def rotation_matrix() -> np.ndarray:
    """The orthogonal map taking the l1 ball to the rotated benchmark body."""
    s = 1.0 / SQRT2
    return np.array(
        [
            [s, 0.0, 0.5, 0.5],
            [0.0, s, -0.5, 0.5],
            [s, 0.0, -0.5, -0.5],
            [0.0, -s, -0.5, 0.5],
        ]
    )


def make_cross_polytope(n: int) -> AbsSumBody:
    """Unit ball of l1^n; for n = 4 the regular cross-polytope."""
    return AbsSumBody(np.eye(n), label=f"cross{n}")


def make_rotated_cross_polytope() -> AbsSumBody:
    """Rotated copy of the 4-dim cross-polytope, stored by its functionals.

    The functionals are the rows of the transpose of the rotation matrix,
    i.e. the inequality sum_j |(M^T y)_j| <= 1 written out explicitly.
    """
    return AbsSumBody(rotation_matrix().T.copy(), label="rotated-cross4")


def _spot_check_homogeneity(body: "SmoothBody"):
    gen = _philox(20240917)
    for _ in range(8):
        x = gen.standard_normal(body.n)
        t = float(gen.uniform(0.25, 4.0))
        a = minkowski(body, t * x)
        b = t * minkowski(body, x)
        if abs(a - b) > 1e-10 * max(1.0, abs(b)):
            raise ValueError("norm evaluator is not positively homogeneous")


def make_euclidean_ball(n: int) -> SmoothBody:
    body = SmoothBody(kind="euclidean", n=n, label=f"euclidean-ball({n})")
    _spot_check_homogeneity(body)
    return body


def make_complex_lp(p: float, k: int) -> SmoothBody:
    """Complex lp ball on C^k, realized on interleaved real pairs in R^(2k).

    Unit-modulus complex scaling acts by rotation inside each pair, so the
    gauge satisfies |lambda z| = |lambda| |z| for every complex lambda.
    """
    if p < 1.0:
        raise ValueError("p must be at least 1")
    if not (1 <= k <= MAX_DIM // 2):
        raise DimensionMismatch(f"complex dimension {k} outside 1..{MAX_DIM // 2}")
    body = SmoothBody(kind="complex_lp", n=2 * k, p=float(p), k=int(k),
                      label=f"complex-lp(p={p:g},k={k})")
    _spot_check_homogeneity(body)
    return body


def make_product(left: Body, m: int) -> SmoothBody:
    """Product body left x B_2^m; the gauge is the max of the factor gauges."""
    if m < 1:
        raise DimensionMismatch("euclidean factor dimension must be >= 1")
    n = ambient_dim(left) + m
    if n > MAX_DIM:
        raise DimensionMismatch(f"product dimension {n} exceeds {MAX_DIM}")
    body = SmoothBody(kind="product", n=n, left=left, m=int(m),
                      label=f"product({body_label(left)},{m})")
    _spot_check_homogeneity(body)
    return body


def ambient_dim(body: Body) -> int:
    return body.n


def body_label(body: Body) -> str:
    return body.label


def minkowski_many(body: Body, X: np.ndarray) -> np.ndarray:
    """Minkowski functional on the rows of X (vectorized)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != body.n:
        raise DimensionMismatch(f"expected shape (m, {body.n}), got {X.shape}")
    if isinstance(body, AbsSumBody):
        return np.abs(X @ body.functionals.T).sum(axis=1)
    if body.kind == "euclidean":
        return np.linalg.norm(X, axis=1)
    if body.kind == "complex_lp":
        mods = np.hypot(X[:, 0::2], X[:, 1::2])
        if body.p == 1.0:
            return mods.sum(axis=1)
        return (mods**body.p).sum(axis=1) ** (1.0 / body.p)
    # product
    nl = ambient_dim(body.left)
    left_val = minkowski_many(body.left, X[:, :nl])
    right_val = np.linalg.norm(X[:, nl:], axis=1)
    return np.maximum(left_val, right_val)


def minkowski(body: Body, x) -> float:
    """Gauge of the body at x: inf{t > 0 : x in t*body}."""
    x = as_vec(x, body.n)
    return float(minkowski_many(body, x[None, :])[0])


def body_radius_bounds(body: Body) -> tuple[float, float]:
    """Probe-based radii with r_in * B2 inside the body inside ~r_out * B2.

    r_in is exact for abs-sum bodies (reciprocal of the functional norm sum)
    and a probe minimum otherwise; r_out is the maximum radius over 2n axis
    probes plus 1024 seeded random rays.  Consumers that need a guaranteed
    outer box apply a 2x safety factor on r_out.
    """
    n = body.n
    dirs = [np.eye(n)[i] * s for i in range(n) for s in (1.0, -1.0)]
    if isinstance(body, AbsSumBody) and body.functionals.shape[0] == n:
        # square functional matrix: the polytope vertices are known exactly
        verts = np.linalg.inv(body.functionals)
        dirs.extend((verts / np.linalg.norm(verts, axis=0)).T)
    gen = _philox(0xB0D1)
    rnd = gen.standard_normal((1024, n))
    rnd /= np.linalg.norm(rnd, axis=1, keepdims=True)
    D = np.vstack([np.array(dirs), rnd])
    radii = 1.0 / minkowski_many(body, D)
    r_out = float(radii.max())
    if isinstance(body, AbsSumBody):
        r_in = float(1.0 / np.linalg.norm(body.functionals, axis=1).sum())
    else:
        r_in = float(radii.min())
    return r_in, r_out


def body_to_dict(body: Body) -> dict:
    """JSON-ready description matching the CLI ingestion schema."""
    if isinstance(body, AbsSumBody):
        return {"kind": "abs_sum", "functionals": body.functionals.tolist()}
    if body.kind == "euclidean":
        return {"kind": "euclidean", "n": body.n}
    if body.kind == "complex_lp":
        return {"kind": "complex_lp", "p": body.p, "k": body.k}
    return {
        "kind": "product",
        "left": body_to_dict(body.left),
        "euclidean_dim": body.m,
    }


def body_from_dict(data: dict) -> Body:
    """Inverse of body_to_dict; validates as the constructors do."""
    kind = data.get("kind")
    if kind == "abs_sum":
        return AbsSumBody(np.asarray(data["functionals"], dtype=float))
    if kind == "euclidean":
        return make_euclidean_ball(int(data["n"]))
    if kind == "complex_lp":
        return make_complex_lp(float(data["p"]), int(data["k"]))
    if kind == "product":
        return make_product(body_from_dict(data["left"]), int(data["euclidean_dim"]))
    raise ValueError(f"unknown body kind {kind!r}")
