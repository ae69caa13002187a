#!/usr/bin/env python3
"""Frozen oracle values for the volume-per-cell tests.

Computes, independently of the C++ implementation:
  1. the convex hull volume of the 26-direction sphere-sample point set for
     8 cells at the corners of a cube of side 2R (scipy ConvexHull), and
  2. the exact convex hull of the sphere union for the same layout via the
     Steiner formula for the Minkowski sum of a cube and a ball, plus a
     Monte-Carlo rejection check of that closed form.

Run from the repo root: python3 tools/volume_oracle.py
"""
import itertools
import math

import numpy as np
from scipy.spatial import ConvexHull

R = 6.0
side = 2.0 * R

dirs = []
for v in itertools.product((-1, 0, 1), repeat=3):
    if v == (0, 0, 0):
        continue
    a = np.array(v, dtype=float)
    dirs.append(a / np.linalg.norm(a))
dirs = np.array(dirs)
assert dirs.shape == (26, 3)

corners = np.array(list(itertools.product((-side / 2, side / 2), repeat=3)))
samples = (corners[:, None, :] + R * dirs[None, :, :]).reshape(-1, 3)
hull = ConvexHull(samples)
print(f"sampled-hull volume      = {hull.volume:.6f}")
print(f"sampled-hull per cell    = {hull.volume / 8:.6f}")

# Steiner: V(cube + B_R) = s^3 + 6 s^2 R + 3 pi s R^2 + 4/3 pi R^3
s = side
exact = s**3 + 6 * s**2 * R + 3 * math.pi * s * R**2 + 4 / 3 * math.pi * R**3
print(f"exact conv(sphere union) = {exact:.6f}")
print(f"exact per cell           = {exact / 8:.6f}")
print(f"sampled/exact ratio      = {hull.volume / exact:.6f}")

rng = np.random.default_rng(20260815)
n = 2_000_000
pts = rng.uniform(-12.0, 12.0, size=(n, 3))
d = np.maximum(np.abs(pts) - side / 2, 0.0)
inside = (d * d).sum(axis=1) <= R * R
mc = inside.mean() * 24.0**3
print(f"monte-carlo conv union   = {mc:.2f} (se ~ {24.0**3 * math.sqrt(inside.mean()*(1-inside.mean())/n):.2f})")

# Rejection-sampling estimate of the sampled-point polyhedron itself, using
# the face planes reported by the reference hull implementation.
A = hull.equations[:, :3]
b = hull.equations[:, 3]
pts2 = rng.uniform(-12.0, 12.0, size=(n, 3))
inside2 = np.all(pts2 @ A.T + b <= 1e-9, axis=1)
mc2 = inside2.mean() * 24.0**3
print(f"monte-carlo polyhedron   = {mc2:.2f} (se ~ {24.0**3 * math.sqrt(inside2.mean()*(1-inside2.mean())/n):.2f})")

# Single sphere sampled at 26 directions, for the singleton context.
one = ConvexHull(R * dirs)
print(f"single-sphere 26-dir hull = {one.volume:.6f}  (sphere = {4/3*math.pi*R**3:.6f})")
