"""Ambient spaces: Euclidean R^d and the first Heisenberg group.

Both spaces are groups carrying a one-parameter family of dilations and a
homogeneous norm (gauge).  Everything downstream touches only the small
surface defined here: ``op``, ``inv``, ``dilate``, ``norm``, ``dist`` and the
per-coordinate homogeneity degrees.  Points are float64 arrays of shape
``(d,)``; every operation also accepts stacked arrays of shape ``(..., d)``
and maps over the leading axes.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, InputError


class Euclidean:
    """R^d with vector addition, scalar dilation, and the l2 metric."""

    kind = "euclidean"

    def __init__(self, dim: int):
        if not isinstance(dim, (int, np.integer)) or isinstance(dim, bool) or dim < 1:
            raise InputError("euclidean dimension must be a positive integer")
        self.dim = int(dim)
        self.coord_degrees = np.ones(self.dim)

    def identity(self) -> np.ndarray:
        return np.zeros(self.dim)

    def check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape[-1:] != (self.dim,):
            raise InputError(
                f"expected point(s) with last axis {self.dim}, got shape {p.shape}"
            )
        if not np.all(np.isfinite(p)):
            raise InputError("point coordinates must be finite")
        return p

    def op(self, p, q):
        return np.asarray(p, dtype=float) + np.asarray(q, dtype=float)

    def inv(self, p):
        return -np.asarray(p, dtype=float)

    def dilate(self, r, p):
        r = np.asarray(r, dtype=float)
        p = np.asarray(p, dtype=float)
        if r.ndim == 0:
            return r * p
        return r[..., np.newaxis] * p

    def norm(self, z):
        z = np.asarray(z, dtype=float)
        return np.sqrt(np.sum(z * z, axis=-1))

    def dist(self, p, q):
        return self.norm(np.asarray(p, dtype=float) - np.asarray(q, dtype=float))

    def to_config(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}

    def __repr__(self) -> str:
        return f"Euclidean(dim={self.dim})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Euclidean) and other.dim == self.dim

    def __hash__(self):
        return hash((self.kind, self.dim))


class Heisenberg1:
    """First Heisenberg group on coordinates (x, y, t).

    Group law: (x,y,t) * (x',y',t') = (x+x', y+y', t+t' + (x y' - y x')/2).
    Dilations scale (x, y) by r and t by r^2.  The gauge is
    ((x^2+y^2)^2 + t^2)^(1/4) and the distance is the gauge of q^{-1} * p.
    """

    kind = "heisenberg1"
    dim = 3

    def __init__(self):
        self.coord_degrees = np.array([1.0, 1.0, 2.0])

    def identity(self) -> np.ndarray:
        return np.zeros(3)

    def check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape[-1:] != (3,):
            raise InputError(f"expected point(s) with last axis 3, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise InputError("point coordinates must be finite")
        return p

    def op(self, p, q):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        x, y, t = p[..., 0], p[..., 1], p[..., 2]
        xq, yq, tq = q[..., 0], q[..., 1], q[..., 2]
        return np.stack(
            [x + xq, y + yq, t + tq + 0.5 * (x * yq - y * xq)], axis=-1
        )

    def inv(self, p):
        # The twist term vanishes on (p, -p), so negation is the inverse.
        return -np.asarray(p, dtype=float)

    def dilate(self, r, p):
        r = np.asarray(r, dtype=float)
        p = np.asarray(p, dtype=float)
        if r.ndim == 0:
            scale = r ** self.coord_degrees
        else:
            scale = r[..., np.newaxis] ** self.coord_degrees
        return scale * p

    def norm(self, z):
        z = np.asarray(z, dtype=float)
        planar = z[..., 0] ** 2 + z[..., 1] ** 2
        return (planar ** 2 + z[..., 2] ** 2) ** 0.25

    def dist(self, p, q):
        return self.norm(self.op(self.inv(q), np.asarray(p, dtype=float)))

    def to_config(self) -> dict:
        return {"kind": self.kind}

    def __repr__(self) -> str:
        return "Heisenberg1()"

    def __eq__(self, other) -> bool:
        return isinstance(other, Heisenberg1)

    def __hash__(self):
        return hash(self.kind)


def geometry_from_config(cfg: dict):
    """Build a geometry from ``{"kind": "euclidean", "dim": d}`` or ``{"kind": "heisenberg1"}``."""
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ConfigError("geometry config must be a dict with a 'kind' key")
    kind = cfg["kind"]
    if kind == "euclidean":
        if "dim" not in cfg:
            raise ConfigError("euclidean geometry config needs 'dim'")
        return Euclidean(cfg["dim"])
    if kind == "heisenberg1":
        return Heisenberg1()
    raise ConfigError(f"unknown geometry kind {kind!r}")
