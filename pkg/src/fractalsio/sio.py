"""Singular-integral drivers.

Everything here integrates y -> k(x, y) against the natural measure over
regions built from cylinders: truncations outside a ball, complements of
shrinking cylinders (the PV trace F_k and its annulus increments A_k), the
periodic-point test integral, symbolic maximal scans, the cylinder-versus-
ball comparison, and a finite-horizon divergence certificate stitching those
together.  Error brackets use the per-cell certified pole distance
delta_v = d(x, x_v) - d_v, which is valid because the quadrature bound only
compares points within one cell.

When a cell's pole distance cannot be certified positive, the result is
flagged and its err becomes infinite rather than silently wrong; the same
happens when the system's separation cannot be certified, since cylinder
weights presume essentially disjoint branches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InputError
from .ifs import IFS
from .kernels import HomogeneousKernel
from .measure import (QuadratureResult, complement_base_words,
                      integrate_ball_complement, pairwise_sum, region_cells)
from .symbolic import EPWord, power, validate_word

SEP_FLAG = "separation:"
POLE_FLAG = "unresolved-pole-distance"
PV_CSV_HEADER = "k,F_value,F_err,A_value,A_err,flag"


def _kernel_cells_quadrature(ifs: IFS, kern: HomogeneousKernel, pole,
                             base_words, depth: int):
    """Bracketed integral of k(pole, .) over a union of base cylinders.

    Returns (QuadratureResult, flag); a nonempty flag means the bracket is
    infinite because some cell could not be certified away from the pole.
    """
    if not base_words:
        return QuadratureResult(0.0, 0.0, depth, 0), ""
    cells = region_cells(ifs, base_words, depth)
    geom = ifs.geometry
    z = kern.displacement(pole, cells.points)
    dist = geom.norm(z)
    delta = dist - cells.diams
    if float(np.min(dist)) <= 0.0 or float(np.min(delta)) <= 0.0:
        return (QuadratureResult(0.0, math.inf, depth, cells.count), POLE_FLAG)
    kvals = kern.omega.eval(geom, z) / dist ** kern.s
    value = pairwise_sum(cells.weights * kvals)
    err = pairwise_sum(cells.weights * kern.cell_err_bound(delta, cells.diams))
    return QuadratureResult(value, err, depth, cells.count), ""


def _separation_flag(ifs: IFS) -> str:
    rep = ifs.check_separation()
    if rep.certified_positive_gap():
        return ""
    return SEP_FLAG + rep.status


def _join_flags(*flags) -> str:
    return ";".join(f for f in flags if f)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


# ---- PV trace ---------------------------------------------------------------


@dataclass(frozen=True)
class PVRow:
    k: int
    F: QuadratureResult
    A: QuadratureResult
    flag: str = ""


@dataclass
class PVTrace:
    """Rows (k, F_k, A_k) for k = 0..K-1, plus the final complement integral F_K."""

    word: EPWord
    point: np.ndarray
    rows: list
    f_final: QuadratureResult
    eta_estimate: QuadratureResult
    separation: str
    depth: int

    def as_dict(self) -> dict:
        return {
            "word": self.word.to_config(),
            "point": [float(v) for v in self.point],
            "rows": [{"k": r.k, "F_value": r.F.value, "F_err": r.F.err,
                      "A_value": r.A.value, "A_err": r.A.err, "flag": r.flag}
                     for r in self.rows],
            "f_final": self.f_final.as_dict(),
            "eta_estimate": (None if self.eta_estimate is None
                             else self.eta_estimate.as_dict()),
            "separation": self.separation,
            "depth": self.depth,
        }

    def to_csv_text(self) -> str:
        lines = [PV_CSV_HEADER]
        for r in self.rows:
            lines.append(f"{r.k},{_fmt(r.F.value)},{_fmt(r.F.err)},"
                         f"{_fmt(r.A.value)},{_fmt(r.A.err)},{r.flag}")
        return "\n".join(lines) + "\n"

    def to_csv(self, path: str):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_csv_text())


def pv_trace(ifs: IFS, kern: HomogeneousKernel, w: EPWord, K: int,
             depth: int) -> PVTrace:
    """Truncation trace along the cylinders of ``w``.

    F_k integrates k(pi(w), .) over C minus C_{w|k} and A_k over the annulus
    C_{w|k} minus C_{w|k+1}; every base cylinder is refined by ``depth``
    extra letters.  Rows run k = 0..K-1 (F_0 = 0 exactly); the K-th
    complement integral is kept as ``f_final``.  When the word is purely
    periodic, ``eta_estimate`` sums the first period's worth of increments.
    """
    if not isinstance(w, EPWord):
        raise InputError("pv_trace expects an EPWord")
    if not isinstance(K, (int, np.integer)) or K < 1:
        raise InputError("K must be a positive integer")
    pole = ifs.code_point(w)
    sep_flag = _separation_flag(ifs)

    def complement_at(k):
        return _kernel_cells_quadrature(
            ifs, kern, pole, complement_base_words(w.prefix(k), ifs.n_letters),
            depth)

    def annulus_at(k):
        head = w.prefix(k)
        bases = [head + (e,) for e in range(1, ifs.n_letters + 1)
                 if e != w.letter(k)]
        return _kernel_cells_quadrature(ifs, kern, pole, bases, depth)

    f_results = [(QuadratureResult(0.0, 0.0, depth, 0), "")]
    for k in range(1, K + 1):
        f_results.append(complement_at(k))
    a_results = [annulus_at(k) for k in range(K)]

    rows = []
    for k in range(K):
        fq, ff = f_results[k]
        aq, af = a_results[k]
        rows.append(PVRow(k, fq, aq, _join_flags(sep_flag, ff, af)))

    eta = None
    if w.is_periodic():
        p = len(w.period)
        extras = [annulus_at(k) for k in range(K, p)]
        parts = a_results[:p] + extras
        eta = QuadratureResult(0.0, 0.0, depth, 0)
        for quad, _ in parts:
            eta = eta + quad

    return PVTrace(word=w, point=pole, rows=rows, f_final=f_results[K][0],
                   eta_estimate=eta, separation=sep_flag, depth=depth)


# ---- periodic-point criterion ----------------------------------------------


@dataclass
class CriterionReport:
    """Certified test of the integral over C minus C_w at the periodic point of w."""

    word: tuple
    xi: np.ndarray
    result: QuadratureResult
    verdict: str
    separation: str
    depth: int

    def as_dict(self) -> dict:
        return {
            "word": list(self.word),
            "xi": [float(v) for v in self.xi],
            "value": self.result.value,
            "err": self.result.err,
            "depth": self.depth,
            "cells": self.result.cells,
            "verdict": self.verdict,
            "separation": self.separation,
        }


def criterion(ifs: IFS, kern: HomogeneousKernel, w, depth: int) -> CriterionReport:
    """Bracket I = int_{C minus C_w} k(xi_w, y) dmu(y) at the periodic point xi_w.

    Verdict: ``NonzeroCertified`` exactly when |I.value| > I.err.  The err is
    set to infinity when the separation or some cell's pole distance cannot
    be certified, which makes those cases ``Inconclusive``; otherwise a
    bracket containing zero reports ``ZeroWithinBracket``.
    """
    word = validate_word(w, n_letters=ifs.n_letters)
    if len(word) == 0:
        raise InputError("criterion word must be nonempty")
    xi = ifs.fixed_point(word)
    sep_flag = _separation_flag(ifs)
    quad, flag = _kernel_cells_quadrature(
        ifs, kern, xi, complement_base_words(word, ifs.n_letters), depth)
    if sep_flag:
        quad = QuadratureResult(quad.value, math.inf, quad.depth, quad.cells)
    if abs(quad.value) > quad.err:
        verdict = "NonzeroCertified"
    elif not math.isfinite(quad.err):
        verdict = "Inconclusive"
    else:
        verdict = "ZeroWithinBracket"
    return CriterionReport(word=word, xi=xi, result=quad, verdict=verdict,
                           separation=sep_flag or _join_flags(flag), depth=depth)


# ---- truncated integral ------------------------------------------------------


def truncated(ifs: IFS, kern: HomogeneousKernel, x, eps: float,
              depth: int) -> QuadratureResult:
    """T_eps(1)(x): bracketed integral of k(x, .) outside the ball B(x, eps)."""
    geom = ifs.geometry
    x = geom.check_point(np.asarray(x, dtype=float))

    def f(pts):
        return kern.pole_terms(x, pts)[0]

    def mod(delta, diams):
        return kern.cell_err_bound(delta, diams)

    return integrate_ball_complement(ifs, f, mod, x, eps, depth,
                                     region_sup=kern.pole_sup(eps))


# ---- symbolic maximal scan ---------------------------------------------------


@dataclass
class MaximalEstimate:
    """Scan of |int over C_{w|m} minus C_{w|n}| for 0 <= m < n <= max_n."""

    word: EPWord
    best: tuple
    table: list
    separation: str
    depth: int

    def as_dict(self) -> dict:
        m, n, quad = self.best
        return {
            "word": self.word.to_config(),
            "best": {"m": m, "n": n, "value": quad.value, "err": quad.err},
            "table": [{"m": tm, "n": tn, "value": q.value, "err": q.err}
                      for tm, tn, q in self.table],
            "separation": self.separation,
            "depth": self.depth,
        }


def maximal_symbolic(ifs: IFS, kern: HomogeneousKernel, w: EPWord, max_n: int,
                     depth: int) -> MaximalEstimate:
    """Scan all annulus sums T(m, n) = sum_{k=m}^{n-1} A_k and report the largest.

    A_k are the pv_trace increments, computed once and reused; best is the
    pair maximizing |T(m, n).value|, earliest pair on ties.
    """
    if not isinstance(w, EPWord):
        raise InputError("maximal_symbolic expects an EPWord")
    if not isinstance(max_n, (int, np.integer)) or max_n < 2:
        raise InputError("max_n must be an integer >= 2")
    pole = ifs.code_point(w)
    sep_flag = _separation_flag(ifs)

    annuli = []
    for k in range(max_n):
        head = w.prefix(k)
        bases = [head + (e,) for e in range(1, ifs.n_letters + 1)
                 if e != w.letter(k)]
        annuli.append(_kernel_cells_quadrature(ifs, kern, pole, bases, depth)[0])

    table = []
    best = None
    for m in range(max_n):
        acc = QuadratureResult(0.0, 0.0, depth, 0)
        for n in range(m + 1, max_n + 1):
            acc = acc + annuli[n - 1]
            entry = (m, n, acc)
            table.append(entry)
            if best is None or abs(acc.value) > abs(best[2].value):
                best = entry
    return MaximalEstimate(word=w, best=best, table=table,
                           separation=sep_flag, depth=depth)


# ---- cylinder versus ball comparison ----------------------------------------


def ball_cylinder_gap(ifs: IFS, kern: HomogeneousKernel, w: EPWord, n: int,
                      m1: int, depth: int,
                      radius_factor: float = 2.0) -> QuadratureResult:
    """Gap between a cylinder annulus and the matching ball annulus around pi(w).

    The cylinder term integrates over C_{w|n} minus C_{w|n+m1*p} (p the
    period length); the ball term over B_1 minus B_2 with radii
    ``radius_factor`` times the certified diameters of those cylinders.
    Returns |difference| with the combined bracket.  Requires the IFS to
    carry its open-set ball (``osc_ball``).
    """
    if ifs.osc_ball is None:
        raise ConfigError("ball_cylinder_gap needs the IFS osc_ball "
                          "(open-set ball) in the configuration")
    if not isinstance(w, EPWord):
        raise InputError("ball_cylinder_gap expects an EPWord")
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise InputError("n must be an integer >= 1")
    if not (isinstance(m1, (int, np.integer)) and m1 >= 1):
        raise InputError("m1 must be an integer >= 1")
    radius_factor = float(radius_factor)
    if radius_factor <= 0.0:
        raise InputError("radius_factor must be positive")
    p = len(w.period)
    inner = n + m1 * p
    pole = ifs.code_point(w)

    bases = [w.prefix(j) + (e,) for j in range(n, inner)
             for e in range(1, ifs.n_letters + 1) if e != w.letter(j)]
    cyl, _ = _kernel_cells_quadrature(ifs, kern, pole, bases, depth)

    eps_outer = radius_factor * ifs.cylinder_diam_hi(w.prefix(n))
    eps_inner = radius_factor * ifs.cylinder_diam_hi(w.prefix(inner))
    trunc_depth = inner + depth
    ball = (truncated(ifs, kern, pole, eps_inner, trunc_depth)
            - truncated(ifs, kern, pole, eps_outer, trunc_depth))

    return QuadratureResult(abs(cyl.value - ball.value), cyl.err + ball.err,
                            depth, cyl.cells + ball.cells)


# ---- divergence certificate ---------------------------------------------------


@dataclass
class DivergenceReport:
    """Finite-horizon certificate: constant increments plus linear growth."""

    word: tuple
    K: int
    status: str
    criterion: CriterionReport
    blocks: list
    f_final: QuadratureResult
    checks: dict
    reason: str

    def as_dict(self) -> dict:
        return {
            "word": list(self.word),
            "K": self.K,
            "status": self.status,
            "criterion": self.criterion.as_dict(),
            "blocks": [b.as_dict() for b in self.blocks],
            "f_final": None if self.f_final is None else self.f_final.as_dict(),
            "checks": self.checks,
            "reason": self.reason,
        }


def divergence_certificate(ifs: IFS, kern: HomogeneousKernel, w, K: int,
                           depth: int) -> DivergenceReport:
    """Certify linear growth of |F_K| at the periodic point of ``w``.

    Refuses unless the criterion integral eta over C minus C_w is
    NonzeroCertified.  Then checks that the block increments over
    C_{w^k} minus C_{w^k+1} agree pairwise within 2 (err_k + err_j) for
    k, j < K, and that |F_K| >= K |eta| - (K eta_err + F_err).
    """
    word = validate_word(w, n_letters=ifs.n_letters)
    if len(word) == 0:
        raise InputError("divergence word must be nonempty")
    if not isinstance(K, (int, np.integer)) or K < 1:
        raise InputError("K must be a positive integer")
    crit = criterion(ifs, kern, word, depth)
    if crit.verdict != "NonzeroCertified":
        return DivergenceReport(
            word=word, K=int(K), status="REFUSED", criterion=crit, blocks=[],
            f_final=None, checks={},
            reason=f"criterion verdict is {crit.verdict}, not NonzeroCertified")

    pole = crit.xi
    p = len(word)
    blocks = []
    for k in range(K):
        head = power(word, k)
        bases = [head + word[:j] + (e,) for j in range(p)
                 for e in range(1, ifs.n_letters + 1) if e != word[j]]
        blocks.append(_kernel_cells_quadrature(ifs, kern, pole, bases, depth)[0])

    pairwise_ok = True
    worst = 0.0
    for i in range(K):
        for j in range(i + 1, K):
            gap = abs(blocks[i].value - blocks[j].value)
            allowance = 2.0 * (blocks[i].err + blocks[j].err)
            worst = max(worst, gap - allowance)
            if gap > allowance:
                pairwise_ok = False

    f_final, _ = _kernel_cells_quadrature(
        ifs, kern, pole, complement_base_words(power(word, K), ifs.n_letters),
        depth)
    eta = crit.result
    need = K * abs(eta.value) - (K * eta.err + f_final.err)
    growth_ok = abs(f_final.value) >= need

    status = "PASS" if (pairwise_ok and growth_ok) else "FAIL"
    reason = "" if status == "PASS" else \
        ("block increments disagree beyond brackets" if not pairwise_ok
         else "final complement integral below the certified growth bound")
    return DivergenceReport(
        word=word, K=int(K), status=status, criterion=crit, blocks=blocks,
        f_final=f_final,
        checks={"pairwise_ok": pairwise_ok, "pairwise_excess": worst,
                "growth_ok": growth_ok, "growth_bound": need,
                "f_final_abs": abs(f_final.value)},
        reason=reason)


# ---- witness integrand --------------------------------------------------------


class WitnessIntegrand:
    """The maximal-operator witness as a pointwise integrand.

    For a period word u starting with letter 1, the witness equals 1 at
    points whose coding first leaves the u-repetition track at a block-start
    position, and 0 otherwise.  ``on_word`` evaluates that rule exactly on a
    finite word, returning None while the word is still a prefix of the
    u-track (undecided).  Calling the object on points decodes codings
    geometrically by nearest preimage, which identifies the coding uniquely
    off the boundary set for separated systems; points still undecided after
    ``max_blocks`` blocks evaluate to 0 (they form a null set).
    """

    def __init__(self, ifs: IFS, u, max_blocks: int = 64):
        self.ifs = ifs
        self.u = validate_word(u, n_letters=ifs.n_letters)
        if len(self.u) == 0:
            raise InputError("witness period word must be nonempty")
        if self.u[0] != 1:
            raise InputError("witness period word must start with letter 1")
        if max_blocks < 1:
            raise InputError("max_blocks must be >= 1")
        self.max_blocks = int(max_blocks)

    def on_word(self, word):
        """Exact value on a finite word: 1.0, 0.0, or None when undecided."""
        word = validate_word(word, n_letters=self.ifs.n_letters)
        u, p = self.u, len(self.u)
        i = 0
        while True:
            block = word[i * p:(i + 1) * p]
            if len(block) == 0:
                return None
            if block == u[:len(block)]:
                if len(block) < p:
                    return None
                i += 1
                continue
            return 1.0 if block[0] != u[0] else 0.0

    def _decode_letter(self, y):
        ifs = self.ifs
        geom = ifs.geometry
        c0, _ = ifs.attractor_bound()
        best, best_d = 1, math.inf
        for i, m in enumerate(ifs.maps):
            pre = geom.dilate(1.0 / m.ratio, geom.op(geom.inv(m.shift), y))
            d = float(geom.dist(pre, c0))
            if d < best_d:
                best, best_d = i + 1, d
        return best

    def value_at(self, y) -> float:
        ifs = self.ifs
        geom = ifs.geometry
        y = geom.check_point(np.asarray(y, dtype=float))
        u, p = self.u, len(self.u)
        for _ in range(self.max_blocks):
            for j in range(p):
                a = self._decode_letter(y)
                if a != u[j]:
                    return 1.0 if j == 0 else 0.0
                m = ifs.maps[a - 1]
                y = geom.dilate(1.0 / m.ratio, geom.op(geom.inv(m.shift), y))
        return 0.0

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            return self.value_at(pts)
        return np.array([self.value_at(pt) for pt in pts])


def witness_g(ifs: IFS, u, max_blocks: int = 64) -> WitnessIntegrand:
    """Preset integrand for demonstrating symbolic maximal growth; see WitnessIntegrand."""
    return WitnessIntegrand(ifs, u, max_blocks=max_blocks)
