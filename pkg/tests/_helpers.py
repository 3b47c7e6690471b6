"""Shared fixtures-adjacent helpers for the test suite."""

import json

import numpy as np

from fractalsio import IFS, EPWord, HomogeneousKernel, QuadratureResult


def within(value: float, quad: QuadratureResult) -> bool:
    """True when ``value`` lies inside the reported bracket."""
    return abs(quad.value - value) <= quad.err


def overlap(a: QuadratureResult, b: QuadratureResult) -> bool:
    """True when the two brackets intersect."""
    return abs(a.value - b.value) <= a.err + b.err


def middle_thirds_config(with_ball=False):
    cfg = {
        "geometry": {"kind": "euclidean", "dim": 1},
        "maps": [{"r": 1.0 / 3.0, "q": [0.0]},
                 {"r": 1.0 / 3.0, "q": [2.0 / 3.0]}],
    }
    if with_ball:
        cfg["osc_ball"] = {"center": [0.5], "radius": 0.5}
    return cfg


def four_corner_config():
    return {
        "geometry": {"kind": "euclidean", "dim": 2},
        "maps": [{"r": 0.25, "q": [0.0, 0.0]},
                 {"r": 0.25, "q": [0.75, 0.0]},
                 {"r": 0.25, "q": [0.0, 0.75]},
                 {"r": 0.25, "q": [0.75, 0.75]}],
    }


def line_config():
    # two maps on the x axis inside R^2; attractor is a Cantor set on the line
    return {
        "geometry": {"kind": "euclidean", "dim": 2},
        "maps": [{"r": 1.0 / 3.0, "q": [0.0, 0.0]},
                 {"r": 1.0 / 3.0, "q": [2.0 / 3.0, 0.0]}],
    }


def heis_config():
    # two Heisenberg similarities with ratio 1/3; shifts separated in x
    return {
        "geometry": {"kind": "heisenberg1"},
        "maps": [{"r": 1.0 / 3.0, "q": [0.0, 0.0, 0.0]},
                 {"r": 1.0 / 3.0, "q": [2.0 / 3.0, 0.0, 0.0]}],
    }


def make_ifs(cfg) -> IFS:
    return IFS.from_config(cfg)


def sign_kernel(ifs) -> HomogeneousKernel:
    from fractalsio import SignOmega
    return HomogeneousKernel(ifs.geometry, ifs.dim_s, SignOmega())


def const_kernel(ifs, c=1.0) -> HomogeneousKernel:
    from fractalsio import ConstantOmega
    return HomogeneousKernel(ifs.geometry, ifs.dim_s, ConstantOmega(c))


def word1() -> EPWord:
    return EPWord((), (1,))


def write_config(path, cfg) -> str:
    path = str(path)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cfg, fh)
    return path


def random_points(rng, dim, n, scale=1.0):
    pts = rng.standard_normal((n, dim)) * scale
    # keep points away from the origin so kernel evaluation is defined
    norms = np.linalg.norm(pts, axis=-1)
    return pts[norms > 1e-3]
