import math

import numpy as np
import pytest

from latticefrac import build_domain

UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]

_cache = {}


def square_domain(eps, offset=(0.0, 0.0)):
    key = (eps, tuple(offset))
    if key not in _cache:
        _cache[key] = build_domain(UNIT_SQUARE, eps, offset)
    return _cache[key]


@pytest.fixture(scope="session")
def dom32():
    return square_domain(1 / 32)


@pytest.fixture(scope="session")
def dom64():
    return square_domain(1 / 64)


@pytest.fixture(scope="session")
def dom128():
    return square_domain(1 / 128)


def brute_force_nodes(polygon, eps, offset=(0.0, 0.0), reach=None):
    """Independent enumeration oracle: scan integer pairs and test containment
    with plain point-in-polygon code written separately from the library."""
    poly = [tuple(p) for p in polygon]
    xmin = min(p[0] for p in poly)
    xmax = max(p[0] for p in poly)
    ymin = min(p[1] for p in poly)
    ymax = max(p[1] for p in poly)
    if reach is None:
        reach = int(math.ceil(max(xmax - xmin, ymax - ymin) / eps)) + 3
    s3 = math.sqrt(3.0) / 2.0
    pts = []
    for a in range(-reach, reach + 1):
        for b in range(-reach, reach + 1):
            x = offset[0] + eps * (a + 0.5 * b)
            y = offset[1] + eps * s3 * b
            if _pip(x, y, poly, 1e-12 * eps):
                pts.append((a, b, x, y))
    return pts


def _pip(x, y, poly, tol):
    n = len(poly)
    # boundary band
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        dx, dy = x1 - x0, y1 - y0
        L2 = dx * dx + dy * dy
        t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((x - x0) * dx + (y - y0) * dy) / L2))
        px, py = x0 + t * dx, y0 + t * dy
        if math.hypot(x - px, y - py) <= tol:
            return True
    inside = False
    j = n - 1
    for i in range(n):
        xi, yi = poly[i]
        xj, yj = poly[j]
        if (yi > y) != (yj > y):
            xint = xi + (y - yi) * (xj - xi) / (yj - yi)
            if x < xint:
                inside = not inside
        j = i
    return inside
