import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import relucert as rc


@dataclass(frozen=True)
class LayerSetup:
    frame: rc.UnitFrame
    poly: rc.Polytope
    estimate: rc.BiasEstimate
    layer: rc.ReLULayer
    bank: rc.FacetDualBank


def build_setup(weights: np.ndarray, radius: float = 1.0) -> LayerSetup:
    frame, _, _ = rc.normalize(weights)
    poly = rc.build_polytope(frame)
    estimate = rc.pbe_ball(frame, poly, radius)
    layer = rc.ReLULayer(frame, estimate.alpha_scaled, radius)
    bank = rc.build_dual_bank(frame, poly, layer.bias)
    return LayerSetup(frame, poly, estimate, layer, bank)


@pytest.fixture(scope="session")
def mb() -> LayerSetup:
    return build_setup(rc.mercedes_benz())


@pytest.fixture(scope="session")
def tet() -> LayerSetup:
    return build_setup(rc.tetrahedron())


@pytest.fixture(scope="session")
def ico() -> LayerSetup:
    return build_setup(rc.icosahedron())


def random_omnidirectional(n: int, m: int, seed: int) -> np.ndarray:
    """Seeded random unit rows, re-drawn deterministically until the hull
    strictly contains the origin."""
    for attempt in range(64):
        pts = rc.random_sphere(n, m, seed + 100_000 * attempt)
        frame, _, _ = rc.normalize(pts)
        if rc.is_omnidirectional(rc.build_polytope(frame)):
            return pts
    raise AssertionError(f"no omnidirectional draw for n={n}, m={m}, seed={seed}")
