"""Command-line front end.

One JSON config file describes the geometry, the IFS maps, the kernel, and a
``params`` block holding the per-command inputs; ``--override key=value``
patches any dotted path in it before the run.  JSON reports embed the fully
resolved config so a run can be reproduced bit for bit from its own output.

Exit codes: 0 for certified results and plain successes, 2 when the answer is
inconclusive (an uncertified verdict, a flagged row, an infinite bracket),
1 for configuration or evaluation errors.

Threading: ``--threads`` and the FRACTALSIO_THREADS environment variable are
validated and recorded in the report.  Evaluation is vectorized and runs
serially regardless of the cap, so results never depend on the thread count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .errors import ConfigError, FractalsioError
from .ergodic import birkhoff_frequency, hitting_times
from .ifs import IFS
from .kernels import HomogeneousKernel
from .measure import ModulusSpec, integrate, integrate_complement, mc_integrate
from .sio import (PV_CSV_HEADER, ball_cylinder_gap, criterion, maximal_symbolic,
                  pv_trace, truncated, witness_g)
from .symbolic import EPWord


class _Parser(argparse.ArgumentParser):
    """Argparse variant whose usage errors surface as ConfigError (exit 1)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


# ---- config plumbing ---------------------------------------------------------


def _parse_override(item: str):
    key, sep, raw = item.partition("=")
    if not sep or not key:
        raise ConfigError(f"override must look like key=value, got {item!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def _set_path(cfg, dotted: str, value):
    parts = dotted.split(".")
    node = cfg
    try:
        for part in parts[:-1]:
            if isinstance(node, list):
                node = node[int(part)]
            else:
                if not isinstance(node.get(part), (dict, list)):
                    node[part] = {}
                node = node[part]
        last = parts[-1]
        if isinstance(node, list):
            node[int(last)] = value
        else:
            node[last] = value
    except (ValueError, IndexError, KeyError, AttributeError) as exc:
        raise ConfigError(f"cannot apply override {dotted!r}: {exc}") from exc


def load_config(path: str, overrides) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    for item in overrides or ():
        key, value = _parse_override(item)
        _set_path(cfg, key, value)
    return cfg


def _params(cfg: dict) -> dict:
    p = cfg.get("params", {})
    if not isinstance(p, dict):
        raise ConfigError("'params' must be a JSON object")
    return p


def _need(p: dict, key: str):
    if key not in p:
        raise ConfigError(f"params.{key} is required for this command")
    return p[key]


def _int_param(p: dict, key: str, default=None) -> int:
    raw = _need(p, key) if default is None else p.get(key, default)
    if isinstance(raw, bool) or not isinstance(raw, (int,)):
        raise ConfigError(f"params.{key} must be an integer")
    return int(raw)


def _epword(raw) -> EPWord:
    if isinstance(raw, dict):
        return EPWord.from_config(raw)
    if isinstance(raw, (list, tuple)):
        return EPWord(pre=(), period=tuple(int(a) for a in raw))
    raise ConfigError("word must be a letter list or {'pre': [...], 'period': [...]}")


def _resolve_threads(args) -> int:
    val = args.threads
    if val is None:
        env = os.environ.get("FRACTALSIO_THREADS")
        if env is not None:
            try:
                val = int(env)
            except ValueError as exc:
                raise ConfigError(
                    f"FRACTALSIO_THREADS must be an integer, got {env!r}") from exc
    if val is None:
        return 1
    val = int(val)
    if val < 1:
        raise ConfigError("thread count must be >= 1")
    return val


def _build_kernel(cfg: dict, ifs: IFS) -> HomogeneousKernel:
    if "kernel" not in cfg:
        raise ConfigError("config needs a 'kernel' section for this command")
    return HomogeneousKernel.from_config(cfg["kernel"], ifs.geometry)


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(payload: dict, out_path):
    _emit(json.dumps(payload, indent=2), out_path)


def _payload(command: str, cfg: dict, threads: int, body: dict) -> dict:
    out = {"command": command}
    out.update(body)
    out["threads"] = threads
    out["config"] = cfg
    return out


# ---- integrand specs for `integrate` ------------------------------------------


def _monomial(ifs: IFS, desc: dict):
    geom = ifs.geometry
    exps = desc.get("exponents")
    if not isinstance(exps, (list, tuple)) or len(exps) != geom.dim:
        raise ConfigError("integrand.exponents must list one exponent per coordinate")
    exps = np.array([int(e) for e in exps], dtype=np.int64)
    if np.any(exps < 0):
        raise ConfigError("integrand.exponents must be nonnegative")
    coeff = float(desc.get("coeff", 1.0))

    def f(pts):
        pts = np.asarray(pts, dtype=float)
        return coeff * np.prod(pts ** exps, axis=-1)

    if "lipschitz" in desc:
        lip = float(desc["lipschitz"])
        if lip < 0:
            raise ConfigError("integrand.lipschitz must be nonnegative")
    elif geom.kind == "euclidean":
        center, radius = ifs.attractor_bound()
        bounds = np.abs(np.asarray(center, dtype=float)) + radius
        lip = 0.0
        for j in range(geom.dim):
            if exps[j] == 0:
                continue
            term = float(exps[j]) * bounds[j] ** (exps[j] - 1)
            for l in range(geom.dim):
                if l != j:
                    term *= bounds[l] ** exps[l]
            lip += term
        lip *= abs(coeff)
    else:
        raise ConfigError("provide integrand.lipschitz for group geometries "
                          "(the automatic bound is Euclidean only)")
    return f, ModulusSpec.lipschitz(lip)


def _integrand(ifs: IFS, desc) -> tuple:
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError("params.integrand must be an object with a 'kind'")
    kind = desc["kind"]
    if kind == "monomial":
        return _monomial(ifs, desc)
    if kind == "constant":
        c = float(desc.get("value", 1.0))
        return (lambda pts: np.full(np.asarray(pts).shape[:-1], c)), \
            ModulusSpec.lipschitz(0.0)
    if kind == "witness":
        u = desc.get("u")
        if u is None:
            raise ConfigError("witness integrand needs a period word 'u'")
        g = witness_g(ifs, tuple(int(a) for a in u),
                      max_blocks=int(desc.get("max_blocks", 64)))
        # values in {0, 1}: any two differ by at most 1 = 2 * 0.5
        return g, ModulusSpec.sup_only(0.5)
    raise ConfigError(f"unknown integrand kind {kind!r}")


# ---- commands ------------------------------------------------------------------


def cmd_dim(args) -> int:
    cfg = load_config(args.config, args.override)
    threads = _resolve_threads(args)
    ifs = IFS.from_config(cfg)
    s = ifs.dim_s
    residual = abs(float(np.sum(ifs.ratios ** s)) - 1.0)
    _emit_json(_payload("dim", cfg, threads, {"s": s, "residual": residual}),
               args.out)
    return 0


def cmd_separation(args) -> int:
    cfg = load_config(args.config, args.override)
    threads = _resolve_threads(args)
    ifs = IFS.from_config(cfg)
    p = _params(cfg)
    depth = _int_param(p, "depth", 12)
    rep = ifs.check_separation(depth=depth)
    _emit_json(_payload("separation", cfg, threads, {"report": rep.as_dict()}),
               args.out)
    return 0 if rep.status in ("Separated", "StronglySeparated", "Overlapping") else 2


def cmd_integrate(args) -> int:
    cfg = load_config(args.config, args.override)
    threads = _resolve_threads(args)
    ifs = IFS.from_config(cfg)
    p = _params(cfg)
    f, mod = _integrand(ifs, _need(p, "integrand"))
    method = p.get("method", "net")
    if method == "mc":
        if "excluded" in p:
            raise ConfigError("excluded regions need method 'net'")
        n_samples = _int_param(p, "n_samples")
        if args.seed is not None:
            p["seed"] = int(args.seed)
        seed = _int_param(p, "seed", 0)
        mean, stderr = mc_integrate(ifs, f, n_samples, seed)
        body = {"method": "mc", "value": mean, "stderr": stderr,
                "n_samples": n_samples, "seed": seed}
    elif method == "net":
        depth = _int_param(p, "depth")
        if "excluded" in p:
            excluded = tuple(int(a) for a in p["excluded"])
            quad = integrate_complement(ifs, f, mod, excluded, depth)
        else:
            quad = integrate(ifs, f, mod, depth)
        body = {"method": "net", **quad.as_dict()}
    else:
        raise ConfigError(f"unknown method {method!r} (use 'net' or 'mc')")
    _emit_json(_payload("integrate", cfg, threads, body), args.out)
    return 0


def cmd_pv_trace(args) -> int:
    cfg = load_config(args.config, args.override)
    threads = _resolve_threads(args)
    ifs = IFS.from_config(cfg)
    kern = _build_kernel(cfg, ifs)
    p = _params(cfg)
    K = _int_param(p, "K")
    if K == 0:
        if args.format == "json":
            _emit_json(_payload("pv-trace", cfg, threads, {"rows": []}), args.out)
        else:
            _emit(PV_CSV_HEADER + "\n", args.out)
        return 0
    w = _epword(_need(p, "word"))
    depth = _int_param(p, "depth")
    trace = pv_trace(ifs, kern, w, K, depth)
    flagged = any(r.flag for r in trace.rows)
    if args.format == "json":
        _emit_json(_payload("pv-trace", cfg, threads, trace.as_dict()), args.out)
    else:
        _emit(trace.to_csv_text(), args.out)
    return 2 if flagged else 0


def cmd_truncated(args) -> int:
    cfg = load_config(args.config, args.override)
    threads = _resolve_threads(args)
    ifs = IFS.from_config(cfg)
    kern = _build_kernel(cfg, ifs)
    p = _params(cfg)
    x = [float(v) for v in _need(p, "x")]
    eps = float(_need(p, "eps"))
    depth = _int_param(p, "depth")
    quad = truncated(ifs, kern, x, eps, depth)
    _emit_json(_payload("truncated", cfg, threads,
                        {"x": x, "eps": eps, **quad.as_dict()}), args.out)
    return 0 if math.isfinite(quad.err) else 2


def cmd_criterion(args) -> int:
    cfg = load_config(args.config, args.override)
    threads = _resolve_threads(args)
    ifs = IFS.from_config(cfg)
    kern = _build_kernel(cfg, ifs)
    p = _params(cfg)
    word = tuple(int(a) for a in _need(p, "word"))
    depth = _int_param(p, "depth")
    rep = criterion(ifs, kern, word, depth)
    _emit_json(_payload("criterion", cfg, threads, rep.as_dict()), args.out)
    return 0 if rep.verdict == "NonzeroCertified" else 2


def cmd_maximal(args) -> int:
    cfg = load_config(args.config, args.override)
    threads = _resolve_threads(args)
    ifs = IFS.from_config(cfg)
    kern = _build_kernel(cfg, ifs)
    p = _params(cfg)
    w = _epword(_need(p, "word"))
    max_n = _int_param(p, "max_n")
    depth = _int_param(p, "depth")
    est = maximal_symbolic(ifs, kern, w, max_n, depth)
    _emit_json(_payload("maximal", cfg, threads, est.as_dict()), args.out)
    shaky = bool(est.separation) or any(
        not math.isfinite(q.err) for _, _, q in est.table)
    return 2 if shaky else 0


def cmd_gap(args) -> int:
    cfg = load_config(args.config, args.override)
    threads = _resolve_threads(args)
    ifs = IFS.from_config(cfg)
    kern = _build_kernel(cfg, ifs)
    p = _params(cfg)
    w = _epword(_need(p, "word"))
    n = _int_param(p, "n")
    m1 = _int_param(p, "m1")
    depth = _int_param(p, "depth")
    radius_factor = float(p.get("radius_factor", 2.0))
    quad = ball_cylinder_gap(ifs, kern, w, n, m1, depth,
                             radius_factor=radius_factor)
    _emit_json(_payload("gap", cfg, threads,
                        {"n": n, "m1": m1, "radius_factor": radius_factor,
                         **quad.as_dict()}), args.out)
    return 0 if math.isfinite(quad.err) else 2


def cmd_birkhoff(args) -> int:
    cfg = load_config(args.config, args.override)
    threads = _resolve_threads(args)
    ifs = IFS.from_config(cfg)
    p = _params(cfg)
    target = tuple(int(a) for a in _need(p, "target"))
    n_steps = _int_param(p, "n_steps")
    if args.seed is not None:
        p["seed"] = int(args.seed)
    seed = _int_param(p, "seed", 0)
    freq, expected, stderr = birkhoff_frequency(ifs, target, n_steps, seed)
    body = {"target": list(target), "n_steps": n_steps, "seed": seed,
            "frequency": freq, "expected": expected, "stderr": stderr}
    if p.get("with_hitting_times"):
        body["hitting_times"] = hitting_times(ifs, target, n_steps, seed)
    _emit_json(_payload("birkhoff", cfg, threads, body), args.out)
    return 0


def cmd_perturb(args) -> int:
    cfg = load_config(args.config, args.override)
    threads = _resolve_threads(args)
    ifs = IFS.from_config(cfg)
    kern = _build_kernel(cfg, ifs)
    p = _params(cfg)
    direction = [float(v) for v in _need(p, "direction")]
    rho = float(_need(p, "rho"))
    eps = float(_need(p, "eps"))
    new_kern = kern.perturb(direction, rho, eps)
    geom = ifs.geometry
    u = np.asarray(direction, dtype=float)
    u = u / geom.norm(u)
    delta_at_dir = float(new_kern.omega.eval(geom, u) - kern.omega.eval(geom, u))
    _emit_json(_payload("perturb", cfg, threads,
                        {"kernel": new_kern.to_config(),
                         "delta_at_direction": delta_at_dir,
                         "sup_bound": eps}), args.out)
    return 0


# ---- parser --------------------------------------------------------------------


_COMMANDS = [
    ("dim", cmd_dim, "similarity dimension of the configured IFS"),
    ("separation", cmd_separation, "certified separation check"),
    ("integrate", cmd_integrate, "integrate a configured function against mu"),
    ("pv-trace", cmd_pv_trace, "truncation trace F_k / A_k along a word"),
    ("truncated", cmd_truncated, "truncated singular integral outside a ball"),
    ("criterion", cmd_criterion, "periodic-point nonvanishing test"),
    ("maximal", cmd_maximal, "symbolic maximal scan over annulus sums"),
    ("gap", cmd_gap, "cylinder versus ball annulus comparison"),
    ("birkhoff", cmd_birkhoff, "empirical block frequencies along an orbit"),
    ("perturb", cmd_perturb, "emit a perturbed kernel config"),
]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH",
                        help="JSON config file")
    common.add_argument("--override", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="patch a dotted config path (JSON value or raw string)")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, help="override params.seed")
    common.add_argument("--threads", type=int,
                        help="worker cap (recorded; evaluation is serial), "
                             "default from FRACTALSIO_THREADS")

    parser = _Parser(prog="fractalsio",
                     description="singular integrals on self-similar sets")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND",
                                parser_class=_Parser)
    for name, func, help_ in _COMMANDS:
        p = sub.add_parser(name, parents=[common], help=help_)
        if name == "pv-trace":
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            parser.print_usage(sys.stderr)
            sys.stderr.write("error: a subcommand is required\n")
            return 1
        return args.func(args)
    except FractalsioError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
