import json
import time
from pathlib import Path

import numpy as np
import pytest

from otreg import experiments
from otreg.geometry import ConvexPolygon
from otreg.solver import PLConvexPotential

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

_SOLVE_CACHE = {}


def _solve_cached(config: dict) -> dict:
    """Session-wide cache of solves keyed by (domains, n, seed, tol)."""
    key = json.dumps({"domains": config["domains"], "n": config["n_targets"],
                      "seed": config["seed"], "tol": config.get("tol", 1e-7)},
                     sort_keys=True)
    if key not in _SOLVE_CACHE:
        start = time.perf_counter()
        ctx = experiments.solve_pair(config)
        ctx["solve_seconds"] = time.perf_counter() - start
        _SOLVE_CACHE[key] = ctx
    return _SOLVE_CACHE[key]


@pytest.fixture(scope="session")
def solve_cached():
    return _solve_cached


@pytest.fixture(scope="session")
def shipped_configs():
    out = {}
    for path in sorted(CONFIG_DIR.glob("*.json")):
        out[path.stem] = experiments.load_config(str(path))
    return out


def quad_potential(matrix, domain: ConvexPolygon, m: int = 60) -> PLConvexPotential:
    """PL under-approximation of psi(x) = x.Ax/2 by tangent planes on an
    m x m grid over the domain's bounding box (exact on the tangency
    grid, within O(1/m^2) elsewhere)."""
    a = np.asarray(matrix, float)
    lo, hi = domain.bounding_box()
    gx = np.linspace(lo[0], hi[0], m)
    gy = np.linspace(lo[1], hi[1], m)
    xx, yy = np.meshgrid(gx, gy)
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    slopes = pts @ a.T
    vals = 0.5 * np.einsum("ki,ij,kj->k", pts, a, pts)
    intercepts = np.sum(slopes * pts, axis=1) - vals
    return PLConvexPotential(slopes, intercepts, domain)


@pytest.fixture(scope="session")
def identity_small(solve_cached):
    """Identity pair on the unit square at n=2000."""
    cfg = {"experiment": "engulfing",
           "domains": {"source": {"generator": "rectangle",
                                  "params": {"aspect": 1.0}}},
           "n_targets": 2000, "seed": 1}
    return solve_cached(cfg)
