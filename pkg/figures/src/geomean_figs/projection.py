"""Equal-area sphere projection and the cluster-concentration statistic."""

from __future__ import annotations

import numpy as np


def lambert_equal_area(points: np.ndarray):
    """Cylindrical equal-area chart: longitude against sine of latitude."""
    x, y, z = points[:, 0], points[:, 1], points[:, 2]
    lon = np.arctan2(y, x)
    sinlat = np.clip(z, -1.0, 1.0)
    return lon, sinlat


def kmeans_directions(points: np.ndarray, k: int, rng: np.random.Generator, iters: int = 60):
    """Plain k-means on unit vectors with a farthest-point style seeding."""
    centers = [points[rng.integers(points.shape[0])]]
    for _ in range(k - 1):
        d = np.min(
            np.stack([np.linalg.norm(points - c, axis=1) for c in centers]), axis=0
        )
        probs = d**2
        total = probs.sum()
        if total <= 0:
            centers.append(points[rng.integers(points.shape[0])])
            continue
        centers.append(points[rng.choice(points.shape[0], p=probs / total)])
    centers = np.array(centers)
    for _ in range(iters):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(d2, axis=1)
        new = centers.copy()
        for j in range(k):
            mask = labels == j
            if np.any(mask):
                mean = points[mask].mean(axis=0)
                nrm = np.linalg.norm(mean)
                if nrm > 1e-12:
                    new[j] = mean / nrm
        if np.allclose(new, centers, atol=1e-12):
            centers = new
            break
        centers = new
    return centers


def cluster_concentration(points: np.ndarray, k: int = 12, radius: float = 0.35,
                          seed: int = 0) -> float:
    """Fraction of points within `radius` radians of their fitted cluster center."""
    rng = np.random.default_rng(seed)
    centers = kmeans_directions(points, k, rng)
    cosang = np.clip(points @ centers.T, -1.0, 1.0)
    ang = np.arccos(cosang).min(axis=1)
    return float(np.mean(ang <= radius))
