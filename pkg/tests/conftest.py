import math

import numpy as np
import pytest

import bhdensity as bh

SQRT2 = math.sqrt(2.0)
W0_AREA = 8.0 / (4.0 + 3.0 * SQRT2)  # = 12*sqrt(2) - 16
V9_GAP = 17.0 - 12.0 * SQRT2
C1_V1V2 = 272.0 * SQRT2 - 384.0
C2_V3V4 = 408.0 * SQRT2 - 576.0


@pytest.fixture(scope="session")
def body_c():
    return bh.make_rotated_cross_polytope()


@pytest.fixture(scope="session")
def body_o():
    return bh.make_cross_polytope(4)


@pytest.fixture(scope="session")
def ball4():
    return bh.make_euclidean_ball(4)


def random_abs_sum_body(seed: int) -> bh.AbsSumBody:
    """Random well-conditioned 4-functional body for fuzz scans."""
    gen = np.random.default_rng(seed)
    while True:
        L = np.eye(4) + 0.45 * gen.standard_normal((4, 4))
        try:
            return bh.AbsSumBody(L, label=f"random-abs-sum-{seed}")
        except ValueError:
            continue


def embed_plane(plane: bh.Plane2, n: int) -> bh.Plane2:
    u = np.zeros(n)
    v = np.zeros(n)
    u[: plane.n] = plane.u
    v[: plane.n] = plane.v
    return bh.Plane2(u, v)


def gram_route(pu: np.ndarray, pv: np.ndarray) -> float:
    """Independent area factor: Gram determinant via its Schur complement.

    sqrt(det Gram(pu, pv)) = |pu| * |pv - proj_pu(pv)|, which avoids the
    catastrophic cancellation of the naive |pu|^2 |pv|^2 - (pu.pv)^2 form.
    """
    g11 = float(np.dot(pu, pu))
    if g11 == 0.0:
        return 0.0
    resid = pv - (np.dot(pu, pv) / g11) * pu
    return math.sqrt(g11) * float(np.linalg.norm(resid))
