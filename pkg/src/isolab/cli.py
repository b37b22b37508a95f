"""Command-line front end: ``isolab <subcommand> [flags]``.

Every subcommand has a small parameter schema.  Values come from the schema
defaults, then ``--params`` (a JSON object or ``@file.json``), then explicit
flags.  Output is one table (CSV or JSON) plus a summary; both embed the
library version and a hash of the resolved configuration.

Exit codes: 0 success, 1 identity violation (counterexample written as
JSON), 2 invalid configuration, 3 resource guard.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import random
import sys
import time
from fractions import Fraction

from . import __version__
from .errors import IdentityViolation, IsolabError, ResourceError


class SchemaError(ValueError):
    pass


# ---------------------------------------------------------------------------
# parameter parsing


def int_list(text):
    """'8,12,16' or '4..10' (inclusive) or a JSON list."""
    if isinstance(text, list):
        return [int(x) for x in text]
    if isinstance(text, int):
        return [text]
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def float_list(text):
    if isinstance(text, list):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x.strip()]


def json_value(text):
    return json.loads(text) if isinstance(text, str) else text


def boolean(text):
    if isinstance(text, bool):
        return text
    low = str(text).lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


SCHEMAS = {
    "profile": {"family": (str, "z2"), "group": (json_value, None), "rmax": (int, 10),
                "normalization": (str, "edge")},
    "wulff": {"dim": (int, 2), "reps": (json_value, None), "weights": (json_value, None),
              "rho": (int_list, "10,20,40"), "fiber": (int, 0)},
    "gamma": {"shape": (json_value, {"shape": "disk", "radius": 1.0, "center": [0.0, 0.0]}),
              "reps": (json_value, None), "weights": (json_value, None),
              "meshes": (int_list, "4..8"), "stencil": (boolean, False)},
    "curlfit": {"N": (int_list, "3,3"), "trials": (int, 200), "dims": (int_list, "2,3"),
                "max_side": (int, 5)},
    "heis": {"random_stacks": (int, 500), "max_side": (int, 8), "max_height": (int, 12)},
    "step2": {"omega": (json_value, [[[0, 0], [1, 1]], [[0, 0], [0, 0]]]),
              "random_stacks": (int, 100), "max_side": (int, 4), "max_height": (int, 5)},
    "tf": {"rmax": (int, 10), "theta": (float, 1.0)},
    "lamplighter": {"q": (int, 1), "k": (int_list, "4..64")},
    "semidirect": {"A": (json_value, [[2, 1], [1, 1]]), "K": (json_value, ["box", [1, 1]]),
                   "R": (int_list, "4,6,8,10,12,16,20"), "alpha": (float, 0.5)},
    "balloon": {"sizes": (int_list, "4,12,36,108"), "r": (int_list, None)},
    "spectral": {"max_size": (int, 8), "n_max": (int, 40), "nash_trials": (int, 200)},
    "mixing": {"d": (int, 3), "m": (int_list, "8,12,16,24"), "eps": (float, 0.25),
               "distance": (str, "tv")},
    "embed": {"d": (int, 1), "levels": (int, 10), "t": (int_list, None), "t_max": (int, 10000),
              "samples": (int, 2)},
    "tempered": {"d": (int, 2), "k_max": (int, 5), "inclusive": (boolean, False)},
}


def resolve(sub, params, flags):
    schema = SCHEMAS[sub]
    unknown = set(params) - set(schema)
    if unknown:
        raise SchemaError(f"unknown parameter(s) for {sub}: {sorted(unknown)}")
    cfg = {}
    for key, (conv, default) in schema.items():
        raw = flags.get(key)
        if raw is None:
            raw = params.get(key, default)
        if raw is None:
            cfg[key] = None
            continue
        try:
            cfg[key] = conv(raw)
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{sub}.{key}: {exc}") from None
    return cfg


def config_hash(sub, cfg, seed):
    blob = json.dumps({"subcommand": sub, "params": cfg, "seed": seed}, sort_keys=True,
                      default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _plain(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if hasattr(v, "item") and callable(v.item):
        return v.item()
    return v


# ---------------------------------------------------------------------------
# runners: each returns (rows, summary)


def run_profile(cfg, rng):
    from .cayley import graph_from_json
    from .profiles import EDGE, VERTEX, check_lipschitz, check_trim_subadd, exact_profile
    doc = cfg["group"] or {"family": cfg["family"], "params": {}}
    G = graph_from_json(doc)
    norm = {"edge": EDGE, "vertex": VERTEX}.get(cfg["normalization"])
    if norm is None:
        raise SchemaError("normalization must be edge or vertex")
    T = exact_profile(G, cfg["rmax"], norm)
    lip, trim = check_lipschitz(T), check_trim_subadd(T)
    return T.rows(), {"graph": G.to_json(), "lipschitz_ok": lip.ok, "trim_subadd_ok": trim.ok}


def run_wulff(cfg, rng):
    from .wulff import Anisotropy, continuum_constant, fiber_lift_ratio, wulff_ratio_scan
    if cfg["fiber"]:
        rows = fiber_lift_ratio(cfg["dim"], cfg["fiber"], cfg["rho"])
        return rows, {"target": rows[0]["target"] if rows else None}
    if cfg["reps"] is None:
        a = Anisotropy.axis(cfg["dim"], cfg["weights"])
    else:
        a = Anisotropy(cfg["dim"], cfg["reps"], cfg["weights"])
    rows = wulff_ratio_scan(a, cfg["rho"])
    return rows, {"c_wulff": continuum_constant(a).value}


def run_gamma(cfg, rng):
    from .gridtv import rate_fit, shape_from_json
    from .wulff import Anisotropy
    E = shape_from_json(cfg["shape"])
    phi = None
    if cfg["reps"] is not None:
        phi = Anisotropy(E.dim, cfg["reps"], cfg["weights"])
    hs = [Fraction(1, 2 ** j) for j in cfg["meshes"]]
    fit = rate_fit(E, phi, hs, stencil=cfg["stencil"])
    return fit.rows, {"slope": fit.slope, "slope_out": fit.slope_out, "exact": fit.exact,
                      "status": fit.status}


def run_curlfit(cfg, rng):
    from .curlfit import H1, curl_fit, d0, d1, homotopy_defect, random_cochain
    rows = []
    for i in range(cfg["trials"]):
        if i == 0:
            N = cfg["N"]
        else:
            N = [rng.randint(1, cfg["max_side"]) for _ in range(rng.choice(cfg["dims"]))]
        c = random_cochain(rng, N)
        if not homotopy_defect(c).is_zero():
            raise IdentityViolation("homotopy identity failed", c.to_json())
        if not d1(d0(H1(c))).is_zero():
            raise IdentityViolation("d1 d0 != 0", c.to_json())
        fit = curl_fit(c)
        if fit.residual_l1 > fit.bound:
            raise IdentityViolation("curl-fit bound exceeded", c.to_json())
        rows.append({"trial": i, "N": "x".join(map(str, N)), "residual": fit.residual_l1,
                     "curl": fit.curl_l1, "bound": fit.bound})
    return rows, {"all_identities_exact": True, "bound_respected": True}


def run_heis(cfg, rng):
    from .carnot import check_heis_stack, heis_decompose, random_stack
    rows = []
    for i in range(cfg["random_stacks"]):
        s = random_stack(rng, max_side=cfg["max_side"], max_height=cfg["max_height"])
        bad = check_heis_stack(s)
        if bad:
            raise IdentityViolation(f"stack {i}: {bad}", s.to_json())
        dec = heis_decompose(s)
        rows.append({"stack": i, "columns": len(s.columns), "volume": s.volume(),
                     "boundary_term": dec.boundary_term, "delta_term": dec.delta_term,
                     "shear_term": dec.shear_term, "total": dec.total})
    return rows, {"stacks": len(rows), "result": "all identities exact"}


def run_step2(cfg, rng):
    from .carnot import random_stack, step2_bounds, validate_cocycle
    omega = validate_cocycle(cfg["omega"])
    d, m = len(omega), len(omega[0][0])
    rows = []
    for i in range(cfg["random_stacks"]):
        s = random_stack(rng, d, m, cfg["max_side"], cfg["max_height"], max_offset=5)
        b = step2_bounds(s, omega)
        if not b.lower <= b.direct <= b.upper:
            raise IdentityViolation(f"sandwich failed on stack {i}", s.to_json())
        rows.append({"stack": i, "lower": b.lower, "direct": b.direct, "upper": b.upper})
    return rows, {"stacks": len(rows), "sandwich_ok": True}


def run_tf(cfg, rng):
    from .cayley import ZdStencil
    from .profiles import EDGE, VERTEX, exact_profile
    from .tfchains import NestedFamily, interleave_from_nnm, interleaving_bound, verify_tf
    G = ZdStencil(2)
    r = cfg["rmax"]
    pv, pe = exact_profile(G, r, VERTEX), exact_profile(G, r, EDGE)
    W = NestedFamily.spiral_squares(r)
    il = interleave_from_nnm(W, cfg["theta"], pv.minorant_at, r0=1, r_stop=r,
                             edge_minorant=pe.minorant_at)
    rep = verify_tf(il.chain, pv, VERTEX)
    bound = interleaving_bound(il.C0, G.degree, cfg["theta"])
    return rep.records, {"levels": il.levels, "C0": il.C0, "A_observed": rep.A_observed,
                         "B_observed": rep.B_observed, "increment_ratio": rep.increment_ratio,
                         "A_bound": bound, "A_within_bound": rep.A_observed <= bound,
                         "ratio_bound": rep.ratio_bound, "ratio_ok": rep.ratio_ok}


def run_lamplighter(cfg, rng):
    from .tfchains import lamplighter_checkpoints
    rows = lamplighter_checkpoints(cfg["k"], q=cfg["q"])
    out = [{"k": c.k, "lamps": c.lamps, "size": c.size, "boundary": c.boundary,
            "ratio": float(c.ratio)} for c in rows]
    dec = all(a.ratio > b.ratio for a, b in zip(rows, rows[1:]))
    return out, {"strictly_decreasing": dec}


def run_semidirect(cfg, rng):
    from .tfchains import layer_diagnostics
    K = cfg["K"]
    K = (K[0], tuple(K[1]) if isinstance(K[1], list) else K[1])
    dg = layer_diagnostics(cfg["A"], K, cfg["R"], cfg["alpha"])
    return dg.rows, {"c1": dg.c1, "c2": dg.c2, "c3": dg.c3, "B_pred": dg.B_pred,
                     "B_obs": dg.B_obs, "Lambda": dg.Lam, "folner_regime": dg.folner_regime}


def run_balloon(cfg, rng):
    from .tfchains import BalloonGraph, balloon_prefix_boundary, balloon_profile
    G = BalloonGraph(cfg["sizes"])
    rs = cfg["r"] or [G.prefix(k) + G.sizes[k] // 2 for k in range(len(G.sizes))]
    rows = []
    for r in rs:
        v = balloon_profile(G, r)
        rows.append({"r": r, "lower": v.lower, "upper": v.upper,
                     "minorant_upper": v.minorant_upper, "ratio_lower": v.ratio_lower,
                     "tail_balloons": v.tail_balloons})
    prefix = [balloon_prefix_boundary(G, n) for n in range(1, len(G.sizes) + 1)]
    return rows, {"prefix_boundaries": prefix}


def run_spectral(cfg, rng):
    from .spectral import cheeger_check, fk_box_check, nash_check
    ch = cheeger_check(cfg["max_size"])
    rows = fk_box_check(cfg["n_max"])
    nash = nash_check(trials=cfg["nash_trials"], seed=rng.randrange(2 ** 32))
    return rows, {"cheeger_checked": ch.checked, "cheeger_ok": ch.ok,
                  "cheeger_worst_margin": ch.worst_margin,
                  "fk_ok": all(r["ok"] for r in rows), "nash": nash,
                  "fk_normalization": "C_iso = 2d, degree 2d, vertex boundary"}


def run_mixing(cfg, rng):
    from .spectral import torus_mixing
    if cfg["distance"] not in ("tv", "linf"):
        raise SchemaError("distance must be tv or linf")
    res = torus_mixing(cfg["d"], cfg["m"], cfg["eps"], cfg["distance"])
    return res["rows"], {"slope": res["slope"], "ratio_drift": res["ratio_drift"],
                         "relaxation_ok": all(r["relaxation_ok"] for r in res["rows"])}


def run_embed(cfg, rng):
    from .coarse import compression_scan, dyadic_spec
    spec = dyadic_spec(cfg["d"], cfg["levels"])
    ts = cfg["t"] or list(range(1, cfg["t_max"] + 1))
    sc = compression_scan(spec, ts, cfg["samples"], seed=rng.randrange(2 ** 32))
    return sc.rows, {"shift": spec.shift, "c_low": sc.c_low, "c_up": sc.c_up,
                     "analytic_low": sc.analytic_low, "analytic_up": sc.analytic_up,
                     "envelope_ok": sc.envelope_ok, "vacuous_lower_t": len(sc.vacuous),
                     "bound_violations": sc.lipschitz_violations}


def run_tempered(cfg, rng):
    from .coarse import dyadic_cubes, tempered_ratios
    sets, G = dyadic_cubes(cfg["d"], cfg["k_max"])
    T = tempered_ratios(sets, G, inclusive=cfg["inclusive"])
    rows = [{"k": k, "radius": 2 ** k, "T_k": t, "T_k_float": float(t)} for k, t in enumerate(T)]
    return rows, {"T": max(T), "below_2_pow_d": all(t < 2 ** cfg["d"] for t in T)}


RUNNERS = {name[4:]: fn for name, fn in globals().items() if name.startswith("run_")}


# ---------------------------------------------------------------------------
# output


def render(rows, summary, meta, fmt):
    rows = [_plain(r) for r in rows]
    if fmt == "json":
        return json.dumps({"meta": meta, "summary": _plain(summary), "rows": rows},
                          indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}: {v}\n")
    for k, v in _plain(summary).items():
        buf.write(f"# {k}: {json.dumps(v, sort_keys=True)}\n")
    if rows:
        cols = list(rows[0])
        for r in rows[1:]:
            cols += [c for c in r if c not in cols]
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v)
                        for k, v in r.items()})
    return buf.getvalue()


def _common(p, default=None):
    # subparsers use SUPPRESS so they do not overwrite values given before the subcommand
    p.add_argument("--seed", type=int, default=default)
    p.add_argument("--output", "-o", default=default)
    p.add_argument("--format", choices=("csv", "json"), default=default)
    p.add_argument("--deterministic", action="store_true", default=default)
    p.add_argument("--threads", type=int, default=default)
    p.add_argument("--params", default=default, help="JSON object or @file.json")


def build_parser():
    top = argparse.ArgumentParser(prog="isolab", description=__doc__.splitlines()[0])
    top.add_argument("--version", action="version", version=f"isolab {__version__}")
    _common(top)
    subs = top.add_subparsers(dest="subcommand", required=True)
    for name, schema in SCHEMAS.items():
        sp = subs.add_parser(name)
        _common(sp, argparse.SUPPRESS)
        for key in schema:
            flag = "--" + key.replace("_", "-")
            sp.add_argument(flag, dest="p_" + key, default=None)
    return top


def _load_params(text):
    if text is None:
        return {}
    try:
        if text.startswith("@"):
            with open(text[1:]) as fh:
                doc = json.load(fh)
        else:
            doc = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"--params: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("--params must be a JSON object")
    return doc


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = args.subcommand
    # flags after the subcommand win over the same flags before it
    seed = args.seed if args.seed is not None else 0
    fmt = args.format or "csv"
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("ISOLAB_THREADS", "0") or 0) or 1
    try:
        params = _load_params(args.params)
        flags = {k[2:]: v for k, v in vars(args).items() if k.startswith("p_") and v is not None}
        cfg = resolve(sub, params, flags)
        if threads < 1:
            raise SchemaError("--threads must be positive")
    except SchemaError as exc:
        print(f"isolab: {exc}", file=sys.stderr)
        return 2
    meta = {"isolab_version": __version__, "subcommand": sub, "seed": seed,
            "config_hash": config_hash(sub, _plain(cfg), seed), "threads": threads}
    if not args.deterministic:
        meta["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    rng = random.Random(seed)
    try:
        rows, summary = RUNNERS[sub](cfg, rng)
    except SchemaError as exc:
        print(f"isolab: {exc}", file=sys.stderr)
        return 2
    except IdentityViolation as exc:
        dump = {"meta": meta, "error": str(exc), "counterexample": _plain(exc.counterexample)}
        path = (args.output or "isolab") + ".counterexample.json"
        with open(path, "w") as fh:
            json.dump(dump, fh, indent=2, sort_keys=True, default=str)
        print(f"isolab: identity violation: {exc} (counterexample in {path})", file=sys.stderr)
        return 1
    except ResourceError as exc:
        print(f"isolab: resource limit: {exc}", file=sys.stderr)
        return 3
    except (IsolabError, KeyError, TypeError, ValueError) as exc:
        print(f"isolab: invalid input: {exc}", file=sys.stderr)
        return 2
    text = render(rows, summary, meta, fmt)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
        print(json.dumps(_plain(summary), sort_keys=True, default=str), file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
