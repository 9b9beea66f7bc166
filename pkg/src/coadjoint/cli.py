"""Command-line front end.

Every command writes one JSON document (to ``--output`` or stdout) and a
short human-readable summary to stderr. Exit status: 0 on success, 1 on a
configuration or domain error, 2 on an integrity error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .errors import CoadjointError, ConfigurationError, IntegrityError
from .haar_oracle import (
    DEFAULT_SAMPLES,
    THREADS_ENV,
    default_threads,
    fit_and_compare,
    moment_estimates,
    parse_group,
    root_system_for,
)
from .polyalg import DEFAULT_SEED, molien_dims
from .pushforward import DEFAULT_K_MAX, char_classes
from .rootsys import (
    RootSystem,
    classify_orbit,
    dominant_representative,
    parse_root_system,
    parse_vector,
)
from .subalgebra import (
    DEFAULT_CUTOFF,
    generate_subalgebra,
    independence_report,
    product_subalgebra,
    semicontinuity_check,
    standard_generators,
)

SCHEMA = "1"

DEFAULTS = {
    "cutoff": DEFAULT_CUTOFF,
    "k_max": DEFAULT_K_MAX,
    "samples": DEFAULT_SAMPLES,
    "seed": DEFAULT_SEED,
    "points": 3,
    "seeding": "powers",
    "k_values": "2,3,4,5,6",
    "output": "-",
    "threads": None,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coadjoint",
        description="Characteristic classes of coadjoint orbit actions in H*(BG).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, xi=True):
        p.add_argument("--group", help="root system label such as A3 or A1xA1")
        if xi:
            p.add_argument("--xi", help="comma-separated exact rationals")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None,
                       help=f"worker cap (default from ${THREADS_ENV}, else 1)")
        p.add_argument("--output", "-o", default=None, help="output path, '-' for stdout")
        p.add_argument("--config", default=None,
                       help="JSON file of option values; conflicts with flags are errors")

    p = sub.add_parser("compute", help="characteristic polynomials P_k of one orbit")
    common(p)
    p.add_argument("--k-max", dest="k_max", type=int, default=None)

    p = sub.add_parser("fullness", help="fibre-integral subalgebra versus all invariants")
    common(p)
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--seeding", choices=("powers", "products"), default=None)

    p = sub.add_parser("independence", help="Jacobian rank of the classes P_2..P_kmax")
    common(p)
    p.add_argument("--k-max", dest="k_max", type=int, default=None)
    p.add_argument("--points", type=int, default=None, help="number of sample points")

    p = sub.add_parser("semicontinuity", help="containment of subalgebras of two orbits")
    common(p)
    p.add_argument("--eta", help="second (nearby) orbit point")
    p.add_argument("--cutoff", type=int, default=None)

    p = sub.add_parser("product", help="Kunneth check on a direct-sum root system")
    common(p)
    p.add_argument("--cutoff", type=int, default=None)

    p = sub.add_parser("oracle", help="Monte Carlo Haar moments versus symbolic classes")
    common(p)
    p.add_argument("--X", dest="X", help="evaluation point")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--k-values", dest="k_values", default=None)

    p = sub.add_parser("molien", help="dimensions of Weyl invariants per degree")
    common(p, xi=False)
    p.add_argument("--cutoff", type=int, default=None)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge flags, an optional --config file, and defaults (in that order)."""
    explicit = {k: v for k, v in vars(args).items() if v is not None and k != "config"}
    merged = dict(explicit)
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read --config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigurationError("--config must hold a JSON object")
        for key, value in data.items():
            key = key.replace("-", "_")
            if key not in vars(args) or key in ("command", "config"):
                raise ConfigurationError(f"--config has unknown field {key!r}")
            if key in explicit and str(explicit[key]) != str(value):
                raise ConfigurationError(
                    f"field {key!r} given as {explicit[key]!r} on the command line "
                    f"and {value!r} in --config")
            merged[key] = value
    for key, value in DEFAULTS.items():
        if key in vars(args) and key not in merged:
            merged[key] = value
    if merged.get("threads") is None and "threads" in vars(args):
        merged["threads"] = default_threads()
    return merged


def _require(cfg: dict, key: str) -> str:
    if cfg.get(key) in (None, ""):
        raise ConfigurationError(f"missing required field {key!r}")
    return cfg[key]


def _orbit(cfg, key="xi", rs: RootSystem | None = None):
    rs = rs or parse_root_system(_require(cfg, "group"))
    return rs, classify_orbit(rs, parse_vector(_require(cfg, key)))


def _summary_dims(rep) -> str:
    return (f"algebra dims {rep.algebra_dims}, invariant dims {rep.invariant_dims}, "
            f"{'full' if rep.full_up_to_cutoff else 'not full'} up to degree {rep.cutoff}")


def cmd_compute(cfg):
    rs, orbit = _orbit(cfg)
    cc = char_classes(rs, orbit, int(cfg["k_max"]))
    zero = [k for k, p in cc.classes.items() if p.is_zero()]
    return cc.to_json(), f"{rs.label}: n_fiber={cc.n_fiber}, vanishing classes k={zero}"


def cmd_fullness(cfg):
    rs, orbit = _orbit(cfg)
    rep = generate_subalgebra(rs, orbit, int(cfg["cutoff"]), int(cfg["seed"]), cfg["seeding"])
    out = rep.to_json()
    out["standard_generators"] = {
        name: {"degree": p.degree, "in_subalgebra": rep.contains(p) if p.degree <= rep.cutoff else None}
        for name, p in standard_generators(rs).items()
    }
    return out, f"{rs.label}: {_summary_dims(rep)}; missing degrees {rep.missing_degrees}"


def cmd_independence(cfg):
    rs, orbit = _orbit(cfg)
    rep = independence_report(rs, orbit, int(cfg["k_max"]), n_points=int(cfg["points"]),
                              seed=int(cfg["seed"]))
    cert = rep.certificate
    verdict = "certified independent" if cert.certified_full else "not certified independent"
    return rep.to_json(), (f"{rs.label}: Jacobian rank {rep.rank} of {rs.rank} "
                           f"from k={rep.k_values} ({verdict})")


def cmd_semicontinuity(cfg):
    rs, o1 = _orbit(cfg)
    _, o2 = _orbit(cfg, "eta", rs)
    cutoff = int(cfg["cutoff"])
    r1 = generate_subalgebra(rs, o1, cutoff, int(cfg["seed"]))
    r2 = generate_subalgebra(rs, o2, cutoff, int(cfg["seed"]))
    verdict = semicontinuity_check(rs, o1, o2, cutoff, reports=(r1, r2))
    out = {
        "orbit1": o1.to_json(), "orbit2": o2.to_json(),
        "algebra_dims1": r1.algebra_dims, "algebra_dims2": r2.algebra_dims,
        **verdict.to_json(),
    }
    return out, f"{rs.label}: contained={verdict.contained}"


def cmd_product(cfg):
    rs, orbit = _orbit(cfg)
    cutoff, seed = int(cfg["cutoff"]), int(cfg["seed"])
    factors = []
    for comp, sl in zip(rs.components, rs.component_slices()):
        frs = RootSystem((comp,))
        factors.append(generate_subalgebra(frs, classify_orbit(frs, orbit.xi[sl]), cutoff, seed))
    conv = product_subalgebra(factors)
    direct = generate_subalgebra(rs, orbit, cutoff, seed)
    agree = (conv.algebra_dims == direct.algebra_dims
             and conv.invariant_dims == direct.invariant_dims)
    out = {
        "orbit": orbit.to_json(),
        "factor_algebra_dims": [f.algebra_dims for f in factors],
        "convolution_algebra_dims": conv.algebra_dims,
        "direct_algebra_dims": direct.algebra_dims,
        "invariant_dims": direct.invariant_dims,
        "paths_agree": agree,
        "full_up_to_cutoff": direct.full_up_to_cutoff,
    }
    if not agree:
        raise IntegrityError(
            f"convolution {conv.algebra_dims} and direct {direct.algebra_dims} dims disagree")
    return out, f"{rs.label}: dims {direct.algebra_dims}, paths agree"


def cmd_oracle(cfg):
    group, n = parse_group(_require(cfg, "group"))
    rs = root_system_for(group, n)
    xi = dominant_representative(rs, parse_vector(_require(cfg, "xi")))
    x = parse_vector(_require(cfg, "X"))
    try:
        ks = [int(t) for t in str(cfg["k_values"]).split(",")]
    except ValueError:
        raise ConfigurationError(f"cannot parse k_values {cfg['k_values']!r}") from None
    orbit = classify_orbit(rs, xi)
    cc = char_classes(rs, orbit, max(ks))
    est = moment_estimates(group, n, orbit.xi, x, ks, int(cfg["samples"]), int(cfg["seed"]),
                           cfg["threads"])
    rep = fit_and_compare(cc, est, x)
    out = {
        "group": f"{group}({n})",
        "root_system": rs.label,
        "orbit": orbit.to_json(),
        "n_fiber": cc.n_fiber,
        "estimates": [e.to_json() for e in est],
        **rep.to_json(),
    }
    return out, f"{group}({n}): fitted constant {rep.constant:.6g}, verdict {rep.verdict}"


def cmd_molien(cfg):
    rs = parse_root_system(_require(cfg, "group"))
    cutoff = int(cfg["cutoff"])
    dims = molien_dims(rs, cutoff)
    return {"group": rs.label, "cutoff": cutoff, "invariant_dims": dims}, f"{rs.label}: {dims}"


HANDLERS = {
    "compute": cmd_compute,
    "fullness": cmd_fullness,
    "independence": cmd_independence,
    "semicontinuity": cmd_semicontinuity,
    "product": cmd_product,
    "oracle": cmd_oracle,
    "molien": cmd_molien,
}


def _emit(doc: dict, path: str):
    text = json.dumps(doc, indent=2) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    doc = {"schema": SCHEMA, "command": args.command}
    output = args.output
    status = 0
    started = time.perf_counter()
    try:
        cfg = resolve_config(args)
        output = cfg.get("output", output)
        doc["config"] = {k: v for k, v in sorted(cfg.items()) if k not in ("output", "command")}
        result, summary = HANDLERS[args.command](cfg)
        doc["result"] = result
        print(summary, file=sys.stderr)
    except IntegrityError as exc:
        status = 2
        doc["error"] = {"type": "IntegrityError", "message": str(exc)}
        print(f"integrity error: {exc}", file=sys.stderr)
    except CoadjointError as exc:
        status = 1
        doc["error"] = {"type": type(exc).__name__, "message": str(exc)}
        print(f"error: {exc}", file=sys.stderr)
    doc["generated_at"] = datetime.now(timezone.utc).isoformat()
    print(f"({time.perf_counter() - started:.2f}s)", file=sys.stderr)
    _emit(doc, output)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
