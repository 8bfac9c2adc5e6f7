# Copyright 2026 The helm Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes the initial mesh of the scattering geometry.

Domain: (-1,1)^2 minus the obstacle {2|x| - 1/2 < y < |x|}. Grid points of
spacing 1/4 outside the obstacle are triangulated with Delaunay; obstacle
sides are split until each piece is a mesh edge.
"""

import argparse
import itertools

import numpy as np
from scipy.spatial import Delaunay

OBSTACLE = np.array([(0.0, -0.5), (0.5, 0.5), (0.0, 0.0), (-0.5, 0.5)])


def inside_obstacle(x, y, tol=1e-12):
    return 2 * abs(x) - 0.5 + tol < y < abs(x) - tol


def on_segment(p, a, b, tol=1e-12):
    ab, ap = b - a, p - a
    cross = ab[0] * ap[1] - ab[1] * ap[0]
    t = np.dot(ap, ab) / np.dot(ab, ab)
    return abs(cross) < tol and -tol <= t <= 1 + tol


def triangulate(n):
    ticks = np.linspace(-1.0, 1.0, n + 1)
    points = [(x, y) for x, y in itertools.product(ticks, ticks) if not inside_obstacle(x, y)]
    for a in OBSTACLE:
        if not any(np.allclose(a, p) for p in points):
            points.append(tuple(a))
    points = np.array(points)
    sides = [(OBSTACLE[i], OBSTACLE[(i + 1) % 4]) for i in range(4)]
    while True:
        tri = Delaunay(points)
        edges = {tuple(sorted((s[i], s[(i + 1) % 3]))) for s in tri.simplices for i in range(3)}
        missing = []
        for a, b in sides:
            on = [i for i, p in enumerate(points) if on_segment(p, a, b)]
            on.sort(key=lambda i: np.dot(points[i] - a, b - a))
            for i, j in zip(on, on[1:]):
                if tuple(sorted((i, j))) not in edges:
                    missing.append(0.5 * (points[i] + points[j]))
        if not missing:
            break
        points = np.vstack([points, missing])
    triangles = []
    for s in tri.simplices:
        c = points[s].mean(axis=0)
        if inside_obstacle(*c, tol=0.0):
            continue
        p0, p1, p2 = points[s]
        area = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0])
        triangles.append([s[0], s[1], s[2]] if area > 0 else [s[0], s[2], s[1]])
    return points, triangles, sides


def boundary_edges(points, triangles, sides):
    count = {}
    for t in triangles:
        for i in range(3):
            e = (t[(i + 1) % 3], t[(i + 2) % 3])
            count.setdefault(tuple(sorted(e)), []).append(e)
    result = []
    for key, uses in count.items():
        if len(uses) != 1:
            continue
        a, b = uses[0]
        obstacle = any(on_segment(points[a], s, e) and on_segment(points[b], s, e) for s, e in sides)
        result.append((a, b, "D" if obstacle else "A"))
    return sorted(result)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=8, help="grid cells per side")
    parser.add_argument("--out", default="assets/scattering.mesh")
    args = parser.parse_args()
    points, triangles, sides = triangulate(args.n)
    used = sorted({v for t in triangles for v in t})
    index = {v: i for i, v in enumerate(used)}
    boundary = boundary_edges(points, triangles, sides)
    with open(args.out, "w") as f:
        f.write(f"{len(used)} {len(triangles)} {len(boundary)}\n")
        for v in used:
            f.write(f"{points[v][0]:.17g} {points[v][1]:.17g}\n")
        for t in triangles:
            f.write(" ".join(str(index[v]) for v in t) + "\n")
        for a, b, tag in boundary:
            f.write(f"{index[a]} {index[b]} {tag}\n")


if __name__ == "__main__":
    main()
