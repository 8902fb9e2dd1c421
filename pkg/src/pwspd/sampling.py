"""Samplers for the synthetic experiments (uniform cube, sphere, Gaussian)."""
from __future__ import annotations

import numpy as np

from .core import PointCloud


def sample_uniform_cube(n: int, d: int, rng: np.random.Generator) -> PointCloud:
    """n i.i.d. uniform points in [0,1]^d."""
    return PointCloud(rng.random((n, d)), intrinsic_dim=d)


def sample_sphere_surface(n: int, d: int, rng: np.random.Generator) -> PointCloud:
    """n i.i.d. uniform points on the unit sphere S^d embedded in R^(d+1)."""
    g = rng.standard_normal((n, d + 1))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return PointCloud(g, intrinsic_dim=d)


def sample_gaussian(n: int, d: int, rng: np.random.Generator) -> PointCloud:
    """n i.i.d. standard-normal points in R^d."""
    return PointCloud(rng.standard_normal((n, d)), intrinsic_dim=d)


DISTRIBUTIONS = {
    "uniform-cube": sample_uniform_cube,
    "sphere": sample_sphere_surface,
    "gaussian": sample_gaussian,
}


def sample_distribution(
    name: str, n: int, d: int, rng: np.random.Generator
) -> PointCloud:
    try:
        fn = DISTRIBUTIONS[name]
    except KeyError:
        raise ValueError(
            f"unknown distribution {name!r}; choose from {sorted(DISTRIBUTIONS)}"
        ) from None
    return fn(n, d, rng)
