"""Configuration-driven command line: estimation pipelines with CSV, sparse
matrix exports, and plain-text reports.

Configuration is `key = value` lines with `#` comments; every key can be
overridden by the command-line flag of the same name.  Exit codes: 0 success,
1 configuration error, 2 budget exceeded, 3 verdict FAIL under --check.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys

import numpy as np

from . import geometry, dynamics
from .geometry import box_dimension_fit, write_count_table
from .dynamics import BudgetExceededError
from .transition import delayed_transitions, full_square, graph_of, grid_matrix
from .entropy import geometric_ladder, mdim_sandwich, write_entropy_csv
from .semigroup import (RandomWalk, SemigroupSpec, make_zero_entropy_pair,
                        walk_entropy, friedland_upper)

__all__ = ["main", "RunConfig", "ConfigError",
           "cmd_boxdim", "cmd_mdim", "cmd_demo_closure", "cmd_semigroup"]


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = "config error at line %d: %s" % (line, message)
        super().__init__(message)


_DEFAULTS = {
    "eps_start": 2.0**-6,
    "eps_stop": 2.0**-16,
    "eps_ratio": 2.0,
    "depth": (2, 3),
    "budget": 10**7,
    "threads": 1,
    "seed": 0,
    "out": ".",
    "check": False,
    "export_matrix": False,
    "tol": 0.1,
    "k_max": 10**4,
    "n_max": 2000,
    "piece_budget": 10**5,
    "samples": 64,
    "n": 6,
    "set": "interval",
    "map": "gauss",
    "generators": "zero_pair",
    "walk": "atomic(12;21)",
}


class RunConfig:
    """Validated key/value configuration for one command."""

    def __init__(self, command, values):
        self.command = command
        self.values = dict(_DEFAULTS)
        self.values.update(values)
        v = self.values
        if v["eps_ratio"] <= 1:
            raise ConfigError("ladder ratio must exceed 1")
        if v["budget"] <= 0 or v["piece_budget"] <= 0:
            raise ConfigError("budgets must be positive")
        if not (0 < v["eps_stop"] <= v["eps_start"]):
            raise ConfigError("need 0 < eps_stop <= eps_start")
        if v["threads"] < 1:
            raise ConfigError("threads must be positive")
        out = v["out"]
        os.makedirs(out, exist_ok=True)
        if not os.access(out, os.W_OK):
            raise ConfigError("output directory not writable: %s" % out)

    def __getitem__(self, key):
        return self.values[key]

    def ladder(self):
        return geometric_ladder(self["eps_start"], self["eps_stop"], self["eps_ratio"])

    def hash(self):
        text = "\n".join("%s = %r" % (k, self.values[k]) for k in sorted(self.values))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


_TYPES = {
    "eps_start": float, "eps_stop": float, "eps_ratio": float, "budget": int,
    "threads": int, "seed": int, "tol": float, "k_max": int, "n_max": int,
    "piece_budget": int, "samples": int, "n": int, "check": bool,
    "export_matrix": bool,
}


def _coerce(key, raw, line=None):
    if key == "depth":
        try:
            text = raw.strip()
            return tuple(int(t) for t in text.split(",")) if text else ()
        except ValueError:
            raise ConfigError("depth must be a comma list of integers", line)
    typ = _TYPES.get(key, str)
    try:
        if typ is bool:
            if isinstance(raw, bool):
                return raw
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return typ(raw)
    except ValueError:
        raise ConfigError("cannot parse %s value %r" % (key, raw), line)


def parse_config_file(path):
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError("expected `key = value`", lineno)
            key, raw = (t.strip() for t in text.split("=", 1))
            if key not in _DEFAULTS:
                raise ConfigError("unknown key %r" % key, lineno)
            values[key] = _coerce(key, raw, lineno)
    return values


# -- token syntax: name or name(arg=value, ...), values may nest ------------

def _parse_token(text):
    text = text.strip()
    if "(" not in text:
        return text, {}
    if not text.endswith(")"):
        raise ConfigError("unbalanced parentheses in %r" % text)
    name, inner = text.split("(", 1)
    inner = inner[:-1]
    kwargs = {}
    depth = 0
    part = []
    parts = []
    for ch in inner:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(part))
            part = []
        else:
            part.append(ch)
    if part:
        parts.append("".join(part))
    for p in parts:
        if "=" not in p:
            raise ConfigError("expected key=value inside %r" % text)
        k, v = (t.strip() for t in p.split("=", 1))
        kwargs[k.strip()] = v
    return name.strip(), kwargs


def _num(value, default=None):
    if value is None:
        return default
    try:
        f = float(value)
        return int(f) if f == int(f) else f
    except (TypeError, ValueError):
        raise ConfigError("expected a number, got %r" % value)


def build_set(token, cfg, as_cutout=False):
    name, kw = _parse_token(token)
    if name == "interval":
        return geometry.CutOutSet((0.0, 1.0), np.zeros((0, 2)), dim_box_exact=1.0)
    if name == "gauss_points":
        k = _num(kw.get("k"), cfg["k_max"])
        return geometry.reciprocal_cutout(k) if as_cutout else geometry.reciprocal_points(k)
    if name == "exp_points":
        n = _num(kw.get("n"), 60)
        return geometry.exp_cutout(n) if as_cutout else geometry.exp_points(n)
    if name == "cantor":
        return geometry.cantor_cutout(int(_num(kw.get("depth"), 12)))
    if name == "uniform":
        return geometry.uniform_cutout(int(_num(kw.get("c"), 4)))
    raise ConfigError("unknown set %r" % token)


def build_transition(cfg):
    name, kw = _parse_token(cfg["set"])
    if name == "square":
        return full_square()
    if name == "delayed":
        F = build_set(kw.get("F", "gauss_points"), cfg)
        k = int(_num(kw.get("k"), 2))
        anchors_raw = kw.get("anchors", "0.5")
        anchors = [float(t) for t in str(anchors_raw).split(";") if t != ""]
        return delayed_transitions(F, k, anchors)
    return graph_of(build_map(cfg["map"], cfg))


def build_map(token, cfg):
    name, kw = _parse_token(token)
    if name == "gauss":
        return dynamics.make_gauss(int(_num(kw.get("k_max"), cfg["k_max"])))
    if name == "mp":
        alpha = float(_num(kw.get("alpha"), 1.0))
        return dynamics.make_mp_induced(alpha, int(_num(kw.get("n_max"), cfg["n_max"])))
    if name == "boxes":
        return dynamics.make_boxes_map(int(_num(kw.get("k_max"), 2000)),
                                       int(_num(kw.get("piece_budget"), cfg["piece_budget"])))
    if name == "sininv":
        return dynamics.make_sin_inv(int(_num(kw.get("k_max"), 4000)))
    if name == "affine":
        cut = build_set(kw.get("cutout", "gauss_points"), cfg, as_cutout=True)
        return dynamics.make_affine_full(cut)
    if name == "identity":
        return dynamics.make_identity()
    if name == "pitfall":
        return dynamics.make_pitfall_map(int(_num(kw.get("n_max"), 40)))
    raise ConfigError("unknown map %r" % token)


# -- reports ------------------------------------------------------------------

def _verdict(est, tol):
    if est.predicted is None:
        return "N/A"
    lo = min(est.slope_lower, est.slope_upper)
    hi = max(est.slope_lower, est.slope_upper)
    ok = (lo <= est.predicted + tol) and (hi >= est.predicted - tol)
    return "PASS" if ok else "FAIL"


def _write_report(path, cfg, lines):
    with open(path, "w") as fh:
        fh.write("config hash: %s\n" % cfg.hash())
        fh.write("ladder: %s\n" % " ".join(
            np.format_float_positional(e, trim="-") for e in cfg.ladder()))
        for line in lines:
            fh.write(line + "\n")


def _sandwich_lines(label, est, tol):
    lines = ["%s lower slope: %.6f (residual %.6f)" % (label, est.slope_lower, est.residual_lower),
             "%s upper slope: %.6f (residual %.6f)" % (label, est.slope_upper, est.residual_upper)]
    if est.predicted is not None:
        lines.append("%s predicted: %.6f (%s)" % (label, est.predicted, est.predicted_note or ""))
        lines.append("%s verdict: %s (tolerance %.3f)" % (label, _verdict(est, tol), tol))
    else:
        lines.append("%s verdict: N/A (no prediction attached)" % label)
    return lines


def _export_matrices(cfg, gamma):
    for eps in cfg.ladder():
        A = grid_matrix(gamma, eps)
        name = "matrix_%s.txt" % np.format_float_positional(eps, trim="-")
        A.export(os.path.join(cfg["out"], name))


# -- commands -----------------------------------------------------------------

def cmd_boxdim(cfg):
    """Covering-number ladder and box-dimension fit for the configured set."""
    target = build_set(cfg["set"], cfg)
    fit = box_dimension_fit(target, cfg.ladder())
    write_count_table(os.path.join(cfg["out"], "boxdim.csv"), fit.table)
    exact = getattr(target, "dim_box_exact", None)
    lines = ["set: %s" % cfg["set"],
             "fitted slope: %.6f (residual %.6f)" % (fit.slope, fit.residual)]
    verdict = "N/A"
    if exact is not None:
        verdict = "PASS" if abs(fit.slope - exact) <= cfg["tol"] else "FAIL"
        lines.append("predicted: %.6f (exact box dimension of the catalog set)" % exact)
        lines.append("verdict: %s (tolerance %.3f)" % (verdict, cfg["tol"]))
    _write_report(os.path.join(cfg["out"], "report.txt"), cfg, lines)
    print("\n".join(lines))
    return 3 if (cfg["check"] and verdict == "FAIL") else 0


def cmd_mdim(cfg):
    """Metric-mean-dimension sandwich for the configured map or relation."""
    gamma = build_transition(cfg)
    est = mdim_sandwich(gamma, cfg.ladder(), depth_schedule=cfg["depth"],
                        node_budget=cfg["budget"], threads=cfg["threads"])
    write_entropy_csv(os.path.join(cfg["out"], "entropy.csv"), est.records)
    if cfg["export_matrix"]:
        _export_matrices(cfg, gamma)
    lines = _sandwich_lines("mdim", est, cfg["tol"])
    _write_report(os.path.join(cfg["out"], "report.txt"), cfg, lines)
    print("\n".join(lines))
    return 3 if (cfg["check"] and _verdict(est, cfg["tol"]) == "FAIL") else 0


def cmd_demo_closure(cfg):
    """Contrast the raw-graph estimates of the flat-tail map with the
    closure-augmented delayed relation (closing the transition set before
    generating sequences manufactures a dimension-1/2 loop)."""
    n_max = int(cfg["n_max"]) if cfg["n_max"] <= 200 else 40
    pmap = dynamics.make_pitfall_map(n_max)
    raw = mdim_sandwich(graph_of(pmap), cfg.ladder(), depth_schedule=cfg["depth"],
                        node_budget=cfg["budget"], threads=cfg["threads"])
    write_entropy_csv(os.path.join(cfg["out"], "entropy.csv"), raw.records)
    F = geometry.PointSet(np.linspace(math.exp(-1.0), 1.0, 2**14 + 1), (0.0, 1.0),
                          dim_box_exact=1.0)
    closure = mdim_sandwich(delayed_transitions(F, 2, [0.0]),
                            geometric_ladder(cfg["eps_start"],
                                             max(cfg["eps_stop"], 2.0**-14),
                                             cfg["eps_ratio"]))
    write_entropy_csv(os.path.join(cfg["out"], "entropy_closure.csv"), closure.records)
    if cfg["export_matrix"]:
        _export_matrices(cfg, graph_of(pmap))
    lines = _sandwich_lines("raw graph", raw, cfg["tol"])
    lines += _sandwich_lines("closure-augmented", closure, cfg["tol"])
    lines += [
        "note: the raw-graph upper bound is loose here by construction "
        "(a graph and its closure occupy the same grid cells, so the matrix "
        "cannot distinguish them); the meaningful contrast is the lower "
        "estimates: ~0 for the raw graph vs ~1/2 certified for the "
        "closure-augmented loop.",
    ]
    _write_report(os.path.join(cfg["out"], "report.txt"), cfg, lines)
    print("\n".join(lines))
    ok = raw.slope_lower <= 0.2 and closure.slope_lower >= 0.4
    return 0 if (ok or not cfg["check"]) else 3


def _build_generators(cfg):
    token = cfg["generators"]
    name, kw = _parse_token(token)
    if name == "zero_pair":
        return make_zero_entropy_pair(int(_num(kw.get("k_max"), 1000)),
                                      int(_num(kw.get("piece_budget"), 10**4)))
    # custom(m1; m2; ...) with map tokens separated by semicolons
    if name == "custom":
        tokens = [t for t in kw.get("maps", "").split(";") if t]
        if not tokens:
            raise ConfigError("custom generators need maps=token;token")
        return tuple(build_map(t, cfg) for t in tokens)
    return (build_map(token, cfg),)


def _build_walk(cfg):
    name, kw_text = cfg["walk"], ""
    if "(" in cfg["walk"]:
        name, inner = cfg["walk"].split("(", 1)
        kw_text = inner.rstrip(")")
    if name == "bernoulli":
        weights = [float(t) for t in kw_text.split(",") if t]
        return RandomWalk.bernoulli(weights or [1.0], seed=cfg["seed"])
    if name == "atomic":
        words = []
        for wtext in kw_text.split(";"):
            wtext = wtext.strip()
            if wtext:
                words.append(tuple(int(ch) - 1 for ch in wtext))
        if not words:
            raise ConfigError("atomic walk needs words like atomic(12;21)")
        return RandomWalk.atomic(words)
    raise ConfigError("unknown walk %r" % cfg["walk"])


def cmd_semigroup(cfg):
    """Random-walk lower-type ladder against the union-graph upper ladder."""
    gens = _build_generators(cfg)
    walk = _build_walk(cfg)
    spec = SemigroupSpec(tuple(gens), walk)
    ladder = cfg.ladder()
    n = cfg["n"]
    hw = [walk_entropy(spec, e, n, samples=cfg["samples"]) for e in ladder]
    hf = [friedland_upper(spec, e) for e in ladder]
    x = np.log(1.0 / np.asarray(ladder))
    sw = float(np.polyfit(x, hw, 1)[0])
    sf = float(np.polyfit(x, hf, 1)[0])
    ordering = all(w <= f + 1e-6 for w, f in zip(hw, hf))
    with open(os.path.join(cfg["out"], "entropy.csv"), "w") as fh:
        fh.write("epsilon,n,h_lower,h_upper,method_lower,method_upper\n")
        for e, w, f in zip(ladder, hw, hf):
            fh.write("%s,%d,%.12g,%.12g,walk,friedland\n"
                     % (np.format_float_positional(e, trim="-"), n, w, f))
    if cfg["export_matrix"]:
        from .transition import friedland_set
        _export_matrices(cfg, friedland_set(spec.generators))
    lines = ["generators: %s  walk: %s  n=%d" % (cfg["generators"], cfg["walk"], n),
             "walk slope: %.6f" % sw,
             "union-graph upper slope: %.6f" % sf,
             "ordering walk <= upper at every scale: %s" % ("PASS" if ordering else "FAIL")]
    _write_report(os.path.join(cfg["out"], "report.txt"), cfg, lines)
    print("\n".join(lines))
    return 3 if (cfg["check"] and not ordering) else 0


_COMMANDS = {
    "boxdim": cmd_boxdim,
    "mdim": cmd_mdim,
    "demo-closure": cmd_demo_closure,
    "semigroup": cmd_semigroup,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mdimlab",
        description="metric mean dimension estimation for interval maps and "
                    "subshifts of compact type")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or "").splitlines()[0])
        p.add_argument("--config", default=None, help="key = value config file")
        p.add_argument("--eps-start", type=float, dest="eps_start")
        p.add_argument("--eps-stop", type=float, dest="eps_stop")
        p.add_argument("--eps-ratio", type=float, dest="eps_ratio")
        p.add_argument("--depth", type=str, help="comma list of cylinder depths")
        p.add_argument("--budget", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=str)
        p.add_argument("--check", action="store_true", default=None)
        p.add_argument("--export-matrix", action="store_true",
                       dest="export_matrix", default=None)
        p.add_argument("--tol", type=float)
        p.add_argument("--set", type=str)
        p.add_argument("--map", type=str)
        p.add_argument("--k-max", type=int, dest="k_max")
        p.add_argument("--n-max", type=int, dest="n_max")
        p.add_argument("--piece-budget", type=int, dest="piece_budget")
        p.add_argument("--samples", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--generators", type=str)
        p.add_argument("--walk", type=str)
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        values = parse_config_file(args.config) if args.config else {}
        for key in _DEFAULTS:
            flag = getattr(args, key, None)
            if flag is not None:
                values[key] = _coerce(key, flag) if isinstance(flag, str) else flag
        cfg = RunConfig(args.command, values)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except OSError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](cfg)
    except BudgetExceededError as exc:
        print("budget exceeded: %s" % exc, file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
