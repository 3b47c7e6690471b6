"""Quadrature against the natural measure, with certified error brackets.

The natural measure of an N-map system gives the cylinder C_v the weight
prod_j r_{v_j}^s.  A cell is a cylinder together with a representative point
(the fixed point of its word, which lies inside it) and a certified diameter
bound.  For an integrand f with modulus of continuity omega_f,

    | int_R f dmu  -  sum_v mu(C_v) f(x_v) |  <=  sum_v mu(C_v) omega_f(d_v)

whenever the cells v partition the region R.  Everything here returns a
``QuadratureResult`` carrying the midpoint value and that error bracket.

Sums are accumulated with a deterministic pairwise tree, so results are
reproducible bit for bit across runs and platforms with the same wheel.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, InputError, ResourceLimitError
from .ifs import IFS, _fixed_points
from .symbolic import validate_word


def pairwise_sum(values) -> float:
    """Deterministic pairwise (tree) summation of a 1-d array."""
    a = np.asarray(values, dtype=float).ravel().copy()
    if a.size == 0:
        return 0.0
    while a.size > 1:
        if a.size % 2:
            tail = a[-1]
            a = a[:-1].reshape(-1, 2).sum(axis=1)
            a[-1] += tail
        else:
            a = a.reshape(-1, 2).sum(axis=1)
    return float(a[0])


@dataclass(frozen=True)
class ModulusSpec:
    """Modulus of continuity for an integrand.

    kinds: ``lipschitz`` (omega(d) = L d), ``holder`` (omega(d) = c d^alpha),
    ``sup_only`` (omega(d) = 2 M, the crude oscillation bound from |f| <= M).
    """

    kind: str
    a: float
    alpha: float = 1.0

    @classmethod
    def lipschitz(cls, L: float) -> "ModulusSpec":
        if not (L >= 0.0 and math.isfinite(L)):
            raise InputError("Lipschitz constant must be finite and >= 0")
        return cls("lipschitz", float(L))

    @classmethod
    def holder(cls, c: float, alpha: float) -> "ModulusSpec":
        if not (c >= 0.0 and math.isfinite(c)):
            raise InputError("Holder constant must be finite and >= 0")
        if not (0.0 < alpha <= 1.0):
            raise InputError("Holder exponent must lie in (0, 1]")
        return cls("holder", float(c), float(alpha))

    @classmethod
    def sup_only(cls, M: float) -> "ModulusSpec":
        if not (M >= 0.0 and math.isfinite(M)):
            raise InputError("sup bound must be finite and >= 0")
        return cls("sup_only", float(M))

    def omega(self, d):
        d = np.asarray(d, dtype=float)
        if self.kind == "lipschitz":
            return self.a * d
        if self.kind == "holder":
            return self.a * d ** self.alpha
        if self.kind == "sup_only":
            return np.full_like(d, 2.0 * self.a)
        raise InputError(f"unknown modulus kind {self.kind!r}")


@dataclass(frozen=True)
class QuadratureResult:
    """Midpoint value with a certified absolute error bracket."""

    value: float
    err: float
    depth: int = 0
    cells: int = 0

    def __add__(self, other):
        return QuadratureResult(self.value + other.value, self.err + other.err,
                                max(self.depth, other.depth),
                                self.cells + other.cells)

    def __sub__(self, other):
        return QuadratureResult(self.value - other.value, self.err + other.err,
                                max(self.depth, other.depth),
                                self.cells + other.cells)

    def scale(self, c: float) -> "QuadratureResult":
        return QuadratureResult(c * self.value, abs(c) * self.err,
                                self.depth, self.cells)

    def as_dict(self) -> dict:
        return {"value": self.value, "err": self.err,
                "depth": self.depth, "cells": self.cells}


@dataclass
class CellBlock:
    """Cells (word, weight, representative, certified diameter) in a fixed order."""

    words: list
    weights: np.ndarray
    points: np.ndarray
    diams: np.ndarray

    @property
    def count(self) -> int:
        return len(self.words)


@dataclass
class CylinderNet(CellBlock):
    """All cells of one depth, in lexicographic word order."""

    depth: int = 0


def _word_label(word) -> str:
    return ".".join(str(a) for a in word)


def cells_for_words(ifs: IFS, words) -> CellBlock:
    """Quadrature cells for an explicit list of words (lengths may differ)."""
    words = [validate_word(w, n_letters=ifs.n_letters) for w in words]
    m = len(words)
    geom = ifs.geometry
    weights = np.empty(m)
    points = np.empty((m, geom.dim))
    diams = np.empty(m)
    diam_hi = ifs.diam_bracket()[1]
    bylen = defaultdict(list)
    for i, w in enumerate(words):
        bylen[len(w)].append(i)
    for length, idxs in sorted(bylen.items()):
        ii = np.asarray(idxs, dtype=np.int64)
        if length == 0:
            weights[ii] = 1.0
            points[ii] = ifs.fixed_point((1,))
            diams[ii] = diam_hi
            continue
        letters = np.asarray([words[i] for i in idxs], dtype=np.int64) - 1
        ratio, shift = ifs.compose_batch(letters)
        weights[ii] = np.prod(ifs.letter_weights[letters], axis=1)
        points[ii] = _fixed_points(geom, ratio, shift)
        diams[ii] = ratio * diam_hi
    return CellBlock(words, weights, points, diams)


def _check_budget(count: int, cap: int):
    if count > cap:
        raise ResourceLimitError(
            f"refinement would need {count} cells, over the budget {cap}"
        )


def _suffixes(n_letters: int, m: int):
    return list(itertools.product(range(1, n_letters + 1), repeat=m))


def net(ifs: IFS, depth: int, cap: int = None) -> CylinderNet:
    """The full depth-``depth`` cylinder net in lexicographic order."""
    if not isinstance(depth, (int, np.integer)) or depth < 0:
        raise InputError("net depth must be a nonnegative integer")
    cap = ifs.DEFAULT_CELL_CAP if cap is None else cap
    _check_budget(ifs.n_letters ** depth, cap)
    words = _suffixes(ifs.n_letters, depth)
    cells = cells_for_words(ifs, words)
    return CylinderNet(cells.words, cells.weights, cells.points, cells.diams,
                       depth=int(depth))


def refine(ifs: IFS, netobj: CylinderNet, cap: int = None) -> CylinderNet:
    """The net one level deeper (every cell split into its children)."""
    return net(ifs, netobj.depth + 1, cap=cap)


def region_cells(ifs: IFS, base_words, depth: int, cap: int = None) -> CellBlock:
    """Cells refining each base cylinder by ``depth`` extra letters.

    Order: base words first, then suffixes lexicographically within a base.
    """
    if depth < 0:
        raise InputError("refinement depth must be nonnegative")
    cap = ifs.DEFAULT_CELL_CAP if cap is None else cap
    bases = [validate_word(b, n_letters=ifs.n_letters) for b in base_words]
    suffixes = _suffixes(ifs.n_letters, depth)
    _check_budget(len(bases) * len(suffixes), cap)
    words = [b + s for b in bases for s in suffixes]
    return cells_for_words(ifs, words)


def _eval_f(f, points, words=None):
    """Evaluate an integrand on stacked points; accepts vectorized or scalar f."""
    vals = None
    try:
        out = np.asarray(f(points), dtype=float)
        if out.shape == (len(points),):
            vals = out
    except Exception:
        vals = None
    if vals is None:
        vals = np.array([float(f(p)) for p in points])
    if not np.all(np.isfinite(vals)):
        i = int(np.argmin(np.isfinite(vals)))
        where = _word_label(words[i]) if words is not None else f"index {i}"
        raise EvaluationError(f"integrand returned a non-finite value on cell {where}")
    return vals


def integrate_cells(cells: CellBlock, f, mod: ModulusSpec) -> QuadratureResult:
    """Bracketed integral of f over the union of the given cells."""
    if cells.count == 0:
        return QuadratureResult(0.0, 0.0, 0, 0)
    vals = _eval_f(f, cells.points, cells.words)
    value = pairwise_sum(cells.weights * vals)
    err = pairwise_sum(cells.weights * mod.omega(cells.diams))
    depth = max(len(w) for w in cells.words)
    return QuadratureResult(value, err, depth, cells.count)


def integrate(ifs: IFS, f, mod: ModulusSpec, depth: int) -> QuadratureResult:
    """Bracketed integral of f over the whole attractor at net depth ``depth``."""
    return integrate_cells(net(ifs, depth), f, mod)


def integrate_cylinder(ifs: IFS, f, mod: ModulusSpec, word,
                       depth: int) -> QuadratureResult:
    """Bracketed integral of f over one cylinder, refined ``depth`` letters."""
    return integrate_cells(region_cells(ifs, [word], depth), f, mod)


def complement_base_words(excluded, n_letters: int) -> list:
    """Cylinders partitioning C minus C_excluded.

    For each prefix length j, the siblings that deviate from ``excluded`` at
    position j; outermost (shortest) first, letters ascending.
    """
    w = validate_word(excluded, n_letters=n_letters)
    out = []
    for j in range(len(w)):
        for e in range(1, n_letters + 1):
            if e != w[j]:
                out.append(w[:j] + (e,))
    return out


def integrate_complement(ifs: IFS, f, mod: ModulusSpec, excluded,
                         depth: int) -> QuadratureResult:
    """Bracketed integral of f over C minus C_excluded."""
    bases = complement_base_words(excluded, ifs.n_letters)
    return integrate_cells(region_cells(ifs, bases, depth), f, mod)


def integrate_ball_complement(ifs: IFS, f, mod, center, eps: float, depth: int,
                              region_sup: float = None,
                              cap: int = None) -> QuadratureResult:
    """Bracketed integral of f over the attractor minus the ball B(center, eps).

    Cells certified outside the ball are kept, cells certified inside are
    dropped, and straddling cells are split until word length ``depth``.
    Remaining straddlers are not evaluated: they contribute their full mass
    times ``region_sup`` (a sup bound for |f| on the region) to ``err``.

    ``mod`` is either a ``ModulusSpec``, or a callable ``mod(delta, diams)``
    returning per-cell oscillation bounds given each kept cell's certified
    distance ``delta`` from the center.  With a callable, ``region_sup`` is
    required whenever straddling cells remain.
    """
    geom = ifs.geometry
    center = geom.check_point(np.asarray(center, dtype=float))
    if center.ndim != 1:
        raise InputError("ball center must be a single point")
    eps = float(eps)
    if not (eps > 0.0 and math.isfinite(eps)):
        raise InputError("ball radius eps must be positive and finite")
    if depth < 0:
        raise InputError("refinement depth must be nonnegative")
    cap = ifs.DEFAULT_CELL_CAP if cap is None else cap

    include_words = []
    straddle_words = []
    active = [()]
    for level in range(depth + 1):
        if not active:
            break
        cells = cells_for_words(ifs, active)
        dist = geom.dist(cells.points, center)
        outside = dist - cells.diams >= eps
        inside = dist + cells.diams <= eps
        straddle = ~outside & ~inside
        out_idx = np.nonzero(outside)[0]
        if level == depth:
            include_words.extend(active[i] for i in out_idx)
            straddle_words.extend(active[i] for i in np.nonzero(straddle)[0])
            active = []
        else:
            m = depth - level
            extra = len(out_idx) * ifs.n_letters ** m
            _check_budget(len(include_words) + extra
                          + len(active) * ifs.n_letters, cap)
            if len(out_idx):
                suf = _suffixes(ifs.n_letters, m)
                for i in out_idx:
                    w = active[i]
                    include_words.extend(w + s for s in suf)
            active = [active[i] + (e,) for i in np.nonzero(straddle)[0]
                      for e in range(1, ifs.n_letters + 1)]

    value = 0.0
    err = 0.0
    kept = cells_for_words(ifs, include_words)
    if kept.count:
        vals = _eval_f(f, kept.points, kept.words)
        value = pairwise_sum(kept.weights * vals)
        if callable(mod):
            delta = np.maximum(geom.dist(kept.points, center) - kept.diams,
                               eps * (1.0 - 1e-12))
            omega_cells = np.asarray(mod(delta, kept.diams), dtype=float)
        else:
            omega_cells = mod.omega(kept.diams)
        err = pairwise_sum(kept.weights * omega_cells)

    if straddle_words:
        sc = cells_for_words(ifs, straddle_words)
        if region_sup is not None:
            err += pairwise_sum(sc.weights * float(region_sup))
        elif not callable(mod):
            svals = np.abs(_eval_f(f, sc.points, sc.words))
            err += pairwise_sum(sc.weights * (svals + mod.omega(sc.diams)))
        else:
            raise InputError(
                "a per-cell modulus needs region_sup to bound straddling cells"
            )

    return QuadratureResult(value, err, depth,
                            kept.count + len(straddle_words))


def mc_integrate(ifs: IFS, f, n_samples: int, seed: int,
                 depth: int = None):
    """Plain Monte Carlo mean of f under the natural measure.

    Samples are coded points of random words drawn letter-by-letter with the
    natural weights from a Philox counter-based generator, truncated at a
    word length where the remaining displacement is below float resolution.
    Returns ``(mean, stderr)`` with the usual ddof=1 standard error; the
    bracket is statistical, not certified.
    """
    n_samples = int(n_samples)
    if n_samples < 2:
        raise InputError("need at least two samples")
    if depth is None:
        r_max = float(np.max(ifs.ratios))
        depth = min(max(int(math.ceil(math.log(1e-12) / math.log(r_max))), 4), 256)
    rng = np.random.Generator(np.random.Philox(seed))
    cum = np.cumsum(ifs.letter_weights)
    cum[-1] = 1.0
    u = rng.random((n_samples, depth))
    idx = np.searchsorted(cum, u, side="right")
    np.clip(idx, 0, ifs.n_letters - 1, out=idx)
    ratio, shift = ifs.compose_batch(idx)
    x0 = ifs.fixed_point((1,))
    pts = ifs.geometry.op(shift, ifs.geometry.dilate(ratio, x0))
    vals = _eval_f(f, pts)
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(n_samples))
    return mean, stderr


def export_net_csv(cells: CellBlock, f, path: str):
    """Write cells and integrand values as CSV columns cell,word,weight,diameter,fvalue."""
    vals = _eval_f(f, cells.points, cells.words)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("cell,word,weight,diameter,fvalue\n")
        for i, w in enumerate(cells.words):
            fh.write(f"{i},{_word_label(w)},{cells.weights[i]:.17g},"
                     f"{cells.diams[i]:.17g},{vals[i]:.17g}\n")
