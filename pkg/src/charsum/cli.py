"""Command-line experiment driver.

Every subcommand reads an optional JSON config, lets command-line flags override
it, validates the result, runs one experiment and writes a JSON report that
embeds the resolved config and the package version.  The only field that
varies between identical runs is the top-level ``wall_time``.

Exit status: 0 success, 2 a check failed, 1 bad config or budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import __version__, bounds, census, invariance, moments, strata, subspace, sums
from .errors import BudgetExceeded, CharsumError, ConfigError, FieldError, IrreducibilityUnverified
from .ffield import make_character, make_field
from .rfunc import FactoredRational, parse_poly, parse_rational

REPORT_SCHEMA = 1

EXIT_OK, EXIT_ERROR, EXIT_CHECK = 0, 1, 2


class CheckFailed(Exception):
    """Raised by a command whose report is complete but whose check did not hold."""

    def __init__(self, report: dict, message: str):
        self.report = report
        super().__init__(message)


# --- config handling ------------------------------------------------------------------

DEFAULTS: dict[str, dict[str, Any]] = {
    "bounds": {"n": 2, "r": 5},
    "bootstrap": {"n": 2, "r": 5},
    "char-sum": {"p": 3, "k": 1, "n": 1, "characters": [[2, 1]], "rationals": [[[[1], 1]]],
                 "offsets": [[0]], "ext": [1]},
    "moment-verify": {"p": 3, "k": 1, "n": 1, "characters": [[2, 1]], "rationals": [[[[1], 1]]],
                      "s": [1], "ext": [1]},
    "census": {"p": 3, "k": 1, "n": 1, "F": [[[1], 1]], "d": 2, "s": 1, "e": 1,
               "structure": True, "bound_check": False},
    "weil": {"p": 7, "k": 1, "n": 1, "F": [[[2], 1], [[1], 1]], "d": 2, "char_exp": 1, "ext": [1, 2],
             "C_user": 2.0},
    "stratify": {"p": 5, "k": 1, "n": 1, "characters": [[2, 1], [2, 1]], "rationals": [[[[1], 1]], [[[1], 1]]],
                 "e": 1, "C_user": 3.0, "mode": "exact", "samples": 10000, "seed": 0, "csv_rows": 10000},
    "boxcount": {"p": 5, "k": 1, "N": 2, "polys": [[[[1, 1], 1], [[0, 0], -1]]], "box": [[0, 1, 2, 3, 4], [0, 1, 2, 3, 4]],
                 "theta": 1, "d": 2},
    "subspace-demo": {"p": 3, "dim": 3, "subspaces": [[[1, 0, 0]], [[1, 0, 0], [0, 1, 0]], [[0, 1, 1]]]},
    "invariance": {"n": 2, "poly": [[[2, 0], 1], [[0, 2], 1]], "primes": [2, 3, 5, 7, 11, 13], "e": 1,
                   "height": 2},
}

# flags shared by every subcommand: flag name -> argparse kwargs
COMMON_FLAGS = {
    "--config": dict(dest="config", default=None, help="JSON config file; flags override its keys"),
    "--out": dict(dest="out", default=None, help="write the JSON report here (default stdout)"),
    "--budget": dict(dest="budget", type=int, default=None, help="max inner-loop iterations"),
}


def _json_arg(s: str):
    try:
        return json.loads(s)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"not valid JSON: {exc}") from exc


FLAGS: dict[str, list[tuple[str, dict]]] = {
    "bounds": [("--n", dict(type=_json_arg)), ("--r", dict(type=_json_arg)),
               ("--i-max", dict(type=int, dest="i_max"))],
    "bootstrap": [("--n", dict(type=_json_arg)), ("--r", dict(type=_json_arg))],
    "char-sum": [("--p", dict(type=int)), ("--k", dict(type=int)), ("--n", dict(type=int)),
                 ("--characters", dict(type=_json_arg)), ("--rationals", dict(type=_json_arg)),
                 ("--offsets", dict(type=_json_arg)), ("--ext", dict(type=_json_arg))],
    "moment-verify": [("--p", dict(type=int)), ("--k", dict(type=int)), ("--n", dict(type=int)),
                      ("--characters", dict(type=_json_arg)), ("--rationals", dict(type=_json_arg)),
                      ("--s", dict(type=_json_arg)), ("--ext", dict(type=_json_arg))],
    "census": [("--p", dict(type=int)), ("--k", dict(type=int)), ("--n", dict(type=int)),
               ("--F", dict(type=_json_arg)), ("--d", dict(type=int)), ("--s", dict(type=int)),
               ("--exponents", dict(type=_json_arg)), ("--e", dict(type=int)),
               ("--structure", dict(type=_json_arg)), ("--bound-check", dict(type=_json_arg, dest="bound_check"))],
    "weil": [("--p", dict(type=int)), ("--k", dict(type=int)), ("--n", dict(type=int)),
             ("--F", dict(type=_json_arg)), ("--d", dict(type=int)), ("--char-exp", dict(type=int, dest="char_exp")),
             ("--ext", dict(type=_json_arg)), ("--C-user", dict(type=float, dest="C_user"))],
    "stratify": [("--p", dict(type=int)), ("--k", dict(type=int)), ("--n", dict(type=int)),
                 ("--characters", dict(type=_json_arg)), ("--rationals", dict(type=_json_arg)),
                 ("--e", dict(type=int)), ("--C-user", dict(type=float, dest="C_user")),
                 ("--mode", dict(choices=["exact", "sample"])), ("--samples", dict(type=int)),
                 ("--seed", dict(type=int)), ("--csv", dict()), ("--csv-rows", dict(type=int, dest="csv_rows"))],
    "boxcount": [("--p", dict(type=int)), ("--k", dict(type=int)), ("--N", dict(type=int)),
                 ("--polys", dict(type=_json_arg)), ("--box", dict(type=_json_arg)),
                 ("--theta", dict(type=int)), ("--d", dict(type=int)),
                 ("--suite", dict(type=_json_arg)), ("--seed", dict(type=int)), ("--count", dict(type=int)),
                 ("--n", dict(type=int)), ("--characters", dict(type=_json_arg)),
                 ("--rationals", dict(type=_json_arg)), ("--e", dict(type=int)), ("--j", dict(type=int)),
                 ("--C-user", dict(type=float, dest="C_user")), ("--C-prime", dict(type=float, dest="C_prime"))],
    "subspace-demo": [("--p", dict(type=int)), ("--dim", dict(type=int)), ("--subspaces", dict(type=_json_arg)),
                      ("--seed", dict(type=int)), ("--count", dict(type=int))],
    "invariance": [("--n", dict(type=int)), ("--poly", dict(type=_json_arg)), ("--primes", dict(type=_json_arg)),
                   ("--e", dict(type=int)), ("--height", dict(type=int)), ("--d", dict(type=int))],
}


class _Parser(argparse.ArgumentParser):
    """Usage errors are config errors: exit 1, not argparse's 2 (reserved for failed checks)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="charsum", description="Experiments on offset families of character sums.")
    ap.add_argument("--version", action="version", version=f"charsum {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, flags in FLAGS.items():
        sp = sub.add_parser(name)
        for flag, kw in COMMON_FLAGS.items():
            sp.add_argument(flag, **kw)
        for flag, kw in flags:
            kw = dict(kw)
            kw.setdefault("dest", flag.lstrip("-").replace("-", "_"))
            kw["default"] = None
            sp.add_argument(flag, **kw)
    return ap


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    """Defaults, then the config file, then flags (flags win)."""
    cfg = dict(DEFAULTS[command])
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config must be a JSON object")
        loaded.pop("command", None)
        cfg.update(loaded)
    for flag, kw in FLAGS[command]:
        dest = kw.get("dest", flag.lstrip("-").replace("-", "_"))
        val = getattr(args, dest, None)
        if val is not None:
            cfg[dest] = val
    if args.budget is not None:
        cfg["budget"] = args.budget
    return cfg


def _need_int(cfg: dict, key: str, lo: int | None = None) -> int:
    v = cfg.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError(f"{key}: expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(f"{key}: must be >= {lo}, got {v}")
    return v


def _int_list(cfg: dict, key: str, lo: int | None = None) -> list[int]:
    v = cfg.get(key)
    if isinstance(v, int) and not isinstance(v, bool):
        v = [v]
    if not isinstance(v, list) or not v or not all(isinstance(a, int) and not isinstance(a, bool) for a in v):
        raise ConfigError(f"{key}: expected an integer or a nonempty list of integers, got {v!r}")
    if lo is not None and any(a < lo for a in v):
        raise ConfigError(f"{key}: every entry must be >= {lo}")
    return v


def _field(cfg: dict):
    p = _need_int(cfg, "p", 2)
    k = _need_int(cfg, "k", 1) if "k" in cfg else 1
    return make_field(p, k)


def _family(cfg: dict) -> sums.SumFamily:
    K = _field(cfg)
    n = _need_int(cfg, "n", 1)
    chars = cfg.get("characters")
    rats = cfg.get("rationals")
    if not isinstance(chars, list) or not isinstance(rats, list):
        raise ConfigError("characters and rationals must be lists")
    if len(chars) != len(rats):
        raise ConfigError(f"characters has {len(chars)} entries, rationals has {len(rats)}")
    pairs = []
    for i, c in enumerate(chars):
        if isinstance(c, int):
            c = [c, 1]
        if not (isinstance(c, list) and len(c) == 2 and all(isinstance(a, int) for a in c)):
            raise ConfigError(f"characters[{i}]: expected [d, e], got {c!r}")
        pairs.append(c)
    D = math.lcm(2, *(d for d, _ in pairs)) if pairs else 2
    characters = [make_character(K, d, e, D) for d, e in pairs]
    rationals = [parse_rational(K, n, lit, f"rationals[{i}]") for i, lit in enumerate(rats)]
    return sums.make_family(K, n, characters, rationals, D=D)


def _to_jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _strip_wall_time(obj):
    if isinstance(obj, dict):
        return {k: _strip_wall_time(v) for k, v in obj.items() if k != "wall_time"}
    if isinstance(obj, list):
        return [_strip_wall_time(v) for v in obj]
    return obj


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_to_jsonable, allow_nan=False) + "\n"


# --- commands -----------------------------------------------------------------------------

def cmd_bounds(cfg: dict) -> dict:
    ns = _int_list(cfg, "n", 1)
    rs = _int_list(cfg, "r", 1)
    i_max = cfg.get("i_max")
    rows, iter_rows, tables = [], [], []
    for n in ns:
        for r in rs:
            table = list(bounds.theta_table(n, r))
            tables.append({"n": n, "r": r, "theta": table})
            rows.extend({"n": n, "r": r, "j": j, "theta": t} for j, t in enumerate(table))
            if n >= 2:
                top = r if i_max is None else _need_int(cfg, "i_max", 0)
                for i, v in enumerate(bounds.theta_iterates(n, r, top)):
                    iter_rows.append({"n": n, "r": r, "i": i, "theta_iter": v})
    out = {"rows": rows, "iterates": iter_rows, "tables": tables}
    if len(tables) == 1:
        out["theta"] = tables[0]["theta"]
    return out


def cmd_bootstrap(cfg: dict) -> dict:
    rows = []
    ok = True
    for n in _int_list(cfg, "n", 2):
        for r in _int_list(cfg, "r", 1):
            closed = list(bounds.theta_table(n, r))
            try:
                table = bounds.bootstrap_fixed_point(n, r).to_json()
                match = table["c"] == closed
            except AssertionError as exc:
                table, match = {"error": str(exc)}, False
            rows.append({"n": n, "r": r, "closed_form": closed, "bootstrap": table, "match": match,
                         "no_improvement": bounds.no_improvement_check(n, r)})
            ok &= match and rows[-1]["no_improvement"]
    out = {"rows": rows, "all_match": ok}
    if not ok:
        raise CheckFailed(out, "bootstrap disagrees with the closed form")
    return out


def cmd_char_sum(cfg: dict) -> dict:
    fam = _family(cfg)
    offsets = cfg.get("offsets")
    if not isinstance(offsets, list):
        raise ConfigError("offsets: expected a list of r vectors")
    rows = []
    for e in _int_list(cfg, "ext", 1):
        v = sums.sum_S(fam, e, [tuple(m) for m in offsets], cfg.get("budget"))
        rows.append({"e": e, "Q": fam.ctx.q**e, "value": v.value.to_json(), "abs": v.abs})
    return {"rows": rows}


def cmd_moment_verify(cfg: dict) -> dict:
    fam = _family(cfg)
    rows = []
    ok = True
    for e in _int_list(cfg, "ext", 1):
        for s in _int_list(cfg, "s", 1):
            rep = moments.verify_identity(fam, s, e, cfg.get("budget"))
            rows.append({"e": e, "s": s, **rep.to_json()})
            ok &= rep.equal
    out = {"rows": rows, "equal": ok}
    if not ok:
        raise CheckFailed(out, "moment identity failed")
    return out


def _single_rational(cfg: dict) -> FactoredRational:
    K = _field(cfg)
    n = _need_int(cfg, "n", 1)
    return parse_rational(K, n, cfg.get("F"), "F")


def cmd_census(cfg: dict) -> dict:
    F = _single_rational(cfg)
    d = _need_int(cfg, "d", 2)
    e = _need_int(cfg, "e", 1)
    exps = cfg.get("exponents")
    if exps is not None:
        exps = _int_list(cfg, "exponents")
        s = None
    else:
        s = _need_int(cfg, "s", 1)
    rep = census.perfect_power_census(F, d, s, e, exps, cfg.get("budget"), check_structure=bool(cfg.get("structure")))
    out = {"census": rep.to_json()}
    failed = rep.structure_ok is False
    if cfg.get("bound_check"):
        bc = census.census_bound_check(F, d, rep.exponents, e, cfg.get("budget"))
        out["bound_check"] = bc.to_json()
        failed |= not bc.passed
    if failed:
        raise CheckFailed(out, "census check failed")
    return out


def cmd_weil(cfg: dict) -> dict:
    F = _single_rational(cfg)
    chi = make_character(F.ctx, _need_int(cfg, "d", 2), cfg.get("char_exp", 1))
    rep = census.weil_check(F, chi, _int_list(cfg, "ext", 1), float(cfg.get("C_user", 2.0)), cfg.get("budget"))
    out = rep.to_json()
    if not rep.passed:
        raise CheckFailed(out, f"max ratio {rep.max_ratio:.4f} exceeds C_user={rep.C_user}")
    return out


def cmd_stratify(cfg: dict) -> dict:
    fam = _family(cfg)
    cap = _need_int(cfg, "csv_rows", 0)
    dump = cap if cfg.get("csv") else 0
    sc = strata.stratum_census(fam, _need_int(cfg, "e", 1), float(cfg.get("C_user", strata.DEFAULT_C)),
                               cfg.get("mode", "exact"), _need_int(cfg, "samples", 1), _need_int(cfg, "seed", 0),
                               cfg.get("budget"), dump_rows=dump)
    out = sc.to_json()
    if dump:
        K_q = sc.q
        with open(cfg["csv"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"x{i + 1}_{c + 1}" for i in range(fam.r) for c in range(fam.n)] + ["abs_S"])
            for X, absS in sc.rows:
                coords = []
                for idx in X:
                    coords.extend((idx // K_q ** (fam.n - 1 - c)) % K_q for c in range(fam.n))
                w.writerow(coords + [repr(absS)])
        out["csv"] = {"path": cfg["csv"], "rows": len(sc.rows), "cap": cap}
    return out


def cmd_boxcount(cfg: dict) -> dict:
    if cfg.get("suite"):
        suite = strata.random_variety_suite(_need_int(cfg, "seed", 0) if "seed" in cfg else 0,
                                            _need_int(cfg, "count", 1) if "count" in cfg else 50)
        rows = []
        for inst in suite:
            rep = strata.box_count_variety(inst.polys, inst.box, inst.theta, inst.d, cfg.get("budget"))
            rows.append({"p": inst.p, "N": inst.N, "polys": [str(f) for f in inst.polys],
                         "box": [list(B) for B in inst.box.sets], **rep.to_json()})
        out = {"rows": rows, "all_pass": all(r["pass"] for r in rows)}
        if not out["all_pass"]:
            raise CheckFailed(out, "a box count exceeded its bound")
        return out
    if "characters" in cfg:
        fam = _family(cfg)
        boxes = cfg.get("boxes", [cfg.get("box")] * fam.r)
        specs = [strata.BoxSpec.of(b) for b in boxes]
        rep = strata.box_exceptional_count(fam, _need_int(cfg, "e", 1) if "e" in cfg else 1,
                                           float(cfg.get("C_user", strata.DEFAULT_C)), _need_int(cfg, "j", 0),
                                           specs, cfg.get("C_prime"), cfg.get("budget"))
        out = rep.to_json()
        if rep.passed is False:
            raise CheckFailed(out, "exceptional count exceeds C' times the bound shape")
        return out
    K = _field(cfg)
    N = _need_int(cfg, "N", 1)
    polys = cfg.get("polys")
    if not isinstance(polys, list) or not polys:
        raise ConfigError("polys: expected a nonempty list of polynomial literals")
    fs = [parse_poly(K, N, lit, f"polys[{i}]") for i, lit in enumerate(polys)]
    rep = strata.box_count_variety(fs, strata.BoxSpec.of(cfg.get("box") or []), _need_int(cfg, "theta", 0),
                                   _need_int(cfg, "d", 1), cfg.get("budget"))
    out = rep.to_json()
    if not rep.passed:
        raise CheckFailed(out, f"count {rep.count} exceeds bound {rep.bound}")
    return out


def _subspace_instance(Vs: list) -> dict:
    Ws = subspace.extend_transverse(Vs)
    tb = subspace.transverse_basis(Vs)
    p, n = Vs[0].p, Vs[0].dim_ambient
    inter_v = subspace.intersection(Vs)
    used = set(i for part in tb.parts for i in part)
    checks = {
        "contains": all(V <= W for V, W in zip(Vs, Ws)),
        "same_intersection": subspace.intersection(Ws) == inter_v,
        "extended_transverse": subspace.check_transversality(Ws).all(),
        "basis_spans": subspace.Subspace.span(p, n, [list(v) for v in tb.E]).dim == n == len(tb.E),
        "basis_intersection": tb.span_without(p, n, used) == inter_v,
        "basis_contains": all(V <= tb.span_without(p, n, set(part)) for V, part in zip(Vs, tb.parts)),
        "input_conditions_agree": subspace.check_transversality(Vs).agree(),
    }
    return {"p": p, "dim": n, "V": [[list(v) for v in V.basis] for V in Vs],
            "W": [[list(v) for v in W.basis] for W in Ws],
            "E": [list(v) for v in tb.E], "E_parts": tb.parts,
            "input_conditions": subspace.check_transversality(Vs).to_json(),
            "output_conditions": subspace.check_transversality(Ws).to_json(),
            "checks": checks, "ok": all(checks.values())}


def cmd_subspace_demo(cfg: dict) -> dict:
    if "count" in cfg:
        fams = subspace.random_instances(_need_int(cfg, "seed", 0) if "seed" in cfg else 0, _need_int(cfg, "count", 1))
        rows = [_subspace_instance(Vs) for Vs in fams]
    else:
        p = _need_int(cfg, "p", 2)
        dim = _need_int(cfg, "dim", 1)
        specs = cfg.get("subspaces")
        if not isinstance(specs, list) or not specs:
            raise ConfigError("subspaces: expected a nonempty list of spanning-vector lists")
        rows = [_subspace_instance([subspace.Subspace.span(p, dim, vs) for vs in specs])]
    out = {"rows": rows, "ok": all(r["ok"] for r in rows)}
    if not out["ok"]:
        raise CheckFailed(out, "a transversality construction failed its postconditions")
    return out


def cmd_invariance(cfg: dict) -> dict:
    n = _need_int(cfg, "n", 1)
    F = invariance.int_poly(cfg.get("poly"), n, "poly")
    primes = _int_list(cfg, "primes", 2) if cfg.get("primes") else []
    rep = invariance.rational_invariance_probe(F, n, primes, _need_int(cfg, "e", 1), _need_int(cfg, "height", 0),
                                               budget_limit=cfg.get("budget"))
    out = rep.to_json()
    if n == 1 and "d" in cfg:
        out["power_free"] = {str(p): v for p, v in invariance.power_free_mod_p(F, _need_int(cfg, "d", 2), primes).items()}
    return out


COMMANDS: dict[str, Callable[[dict], dict]] = {
    "bounds": cmd_bounds, "bootstrap": cmd_bootstrap, "char-sum": cmd_char_sum,
    "moment-verify": cmd_moment_verify, "census": cmd_census, "weil": cmd_weil,
    "stratify": cmd_stratify, "boxcount": cmd_boxcount, "subspace-demo": cmd_subspace_demo,
    "invariance": cmd_invariance,
}


def run(command: str, cfg: dict) -> tuple[int, dict]:
    """Run one command on a resolved config; returns (exit status, report)."""
    t0 = time.perf_counter()
    report = {"command": command, "version": __version__, "schema": REPORT_SCHEMA, "config": cfg}
    if "budget" in cfg and not (isinstance(cfg["budget"], int) and cfg["budget"] > 0):
        report.update(status="error", error=f"budget: expected a positive integer, got {cfg['budget']!r}")
        return EXIT_ERROR, report
    try:
        result = COMMANDS[command](cfg)
        status, code = "ok", EXIT_OK
    except CheckFailed as exc:
        result, status, code = exc.report, "check_failed", EXIT_CHECK
        report["error"] = str(exc)
    except (ConfigError, BudgetExceeded, FieldError, IrreducibilityUnverified, CharsumError) as exc:
        result, status, code = None, "error", EXIT_ERROR
        report["error"] = f"{type(exc).__name__}: {exc}"
    report["result"] = _strip_wall_time(result) if result is not None else None
    report["status"] = status
    report["wall_time"] = time.perf_counter() - t0
    return code, report


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.command, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    code, report = run(args.command, cfg)
    text = dumps_report(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if "error" in report:
        print(f"error: {report['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
