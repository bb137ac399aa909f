"""Command-line front end.

    affine-moduli classify FILE
    affine-moduli orbit-check A B [--group glplus|gl] [--tol TOL]
    affine-moduli figure [--bounds XMIN,XMAX,YMIN,YMAX] [--resolution N] [--out-prefix P]
    affine-moduli verify [--suite NAME] [--samples N] [--seed S]

Exit codes: 0 ok, 1 property failure, 2 usage or input error, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import action, core, invariants, moduli_map, verify
from .errors import ContractError, DegenerateRicciError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
SEED_ENV = "AFFINE_MODULI_SEED"

KEYS = ("G11_1", "G11_2", "G12_1", "G12_2", "G21_1", "G21_2", "G22_1", "G22_2")


class InputError(Exception):
    pass


def key_index(key: str) -> tuple[int, int, int]:
    """``"G12_1"`` -> ``(0, 1, 0)``."""
    return int(key[1]) - 1, int(key[2]) - 1, int(key[4]) - 1


def gamma_from_document(doc) -> np.ndarray:
    if not isinstance(doc, dict):
        raise InputError("document must be a JSON object")
    entries = doc.get("gamma", doc)
    if not isinstance(entries, dict):
        raise InputError("'gamma' must be an object with keys " + ", ".join(KEYS))
    missing = [k for k in KEYS if k not in entries]
    if missing:
        raise InputError("missing keys: " + ", ".join(missing))
    g = np.empty((2, 2, 2))
    for k in KEYS:
        v = entries[k]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InputError(f"{k} must be a number, got {v!r}")
        if not math.isfinite(v):
            raise InputError(f"{k} is not finite")
        g[key_index(k)] = v
    return g


def document_from_gamma(gamma, label: str | None = None) -> dict:
    g = core.as_christoffel(gamma)
    doc = {"gamma": {k: float(g[key_index(k)]) for k in KEYS}}
    if label is not None:
        doc["label"] = label
    return doc


def _reject_constant(name):
    raise ValueError(f"non-finite constant {name}")


def load_document(path) -> tuple[np.ndarray, str | None]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except ValueError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from exc
    label = doc.get("label") if isinstance(doc, dict) else None
    return gamma_from_document(doc), label


def _matrix(m):
    return [[float(v) for v in row] for row in np.asarray(m)]


def _matrix_order(m, max_order=12, tol=1e-8):
    p = np.eye(2)
    for k in range(1, max_order + 1):
        p = p @ m
        if core.max_abs(p - np.eye(2)) <= tol:
            return k
    return None


def classify(gamma, label=None) -> dict:
    """The classification report for one structure."""
    g = core.as_christoffel(gamma).astype(float)
    tf = core.is_torsion_free(g, invariants.TORSION_TOL)
    rs = core.ricci_symmetric(g)
    sig = core.signature(rs)
    report = {}
    if label is not None:
        report["label"] = label
    report["torsion_free"] = bool(tf)
    report["ricci"] = _matrix(core.ricci(g))
    report["ricci_symmetric"] = _matrix(rs)
    report["signature"] = "degenerate" if sig.degenerate else list(sig.pair)
    region = None
    if not tf:
        report["invariants"] = "n/a (torsion)"
    else:
        try:
            x = invariants.xi(g)
        except DegenerateRicciError:
            report["invariants"] = "n/a (degenerate)"
        else:
            report["invariants"] = {"psi3": x.psi3, "Psi3": x.Psi3, "chi": x.chi}
            region = moduli_map.classify_point((x.psi3, x.Psi3)).value
    report["region"] = region
    report["exceptional_orbit"] = bool(action.in_exceptional_orbit(g))
    if sig.degenerate:
        report["isotropy"] = "n/a (degenerate)"
    else:
        iso = action.isotropy_nontrivial(g)
        if not iso.nontrivial:
            report["isotropy"] = "trivial"
        else:
            order = _matrix_order(iso.witness)
            kind = f"Z{order}" if order else "infinite"
            report["isotropy"] = {"group": kind, "witness": _matrix(iso.witness)}
    return report


def _dump(obj, stream=None):
    stream = stream or sys.stdout
    json.dump(obj, stream, indent=2)
    stream.write("\n")


def _error(msg) -> int:
    print(f"affine-moduli: error: {msg}", file=sys.stderr)
    return EXIT_USAGE


def cmd_classify(args) -> int:
    try:
        gamma, label = load_document(args.file)
    except InputError as exc:
        return _error(exc)
    _dump(classify(gamma, label))
    return EXIT_OK


def cmd_orbit_check(args) -> int:
    try:
        g1, _ = load_document(args.a)
        g2, _ = load_document(args.b)
        res = action.orbit_equivalent(g1, g2, group=args.group, tol=args.tol)
    except (InputError, ContractError) as exc:
        return _error(exc)
    out = {"equivalent": res.equivalent, "status": res.status}
    if res.witness is not None:
        out["witness"] = _matrix(res.witness)
    if res.residual is not None and math.isfinite(res.residual):
        out["residual"] = float(res.residual)
    _dump(out)
    return EXIT_INCONCLUSIVE if res.inconclusive else EXIT_OK


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _g17(v) -> str:
    return "%.17g" % v


def write_figure(prefix, bounds, resolution, curve_samples=moduli_map.DEFAULT_SAMPLES) -> list[str]:
    """Write the curve and region CSVs; returns the paths written."""
    paths = []
    parent = os.path.dirname(prefix)
    if parent:
        os.makedirs(parent, exist_ok=True)
    for name, sign in (("sigma_plus", "+"), ("sigma_minus", "-")):
        pts = moduli_map.emit_curve(sign, moduli_map.T_WINDOW, curve_samples, "log", inject=(moduli_map.CUSP_T,))
        path = f"{prefix}{name}.csv"
        _write_csv(path, "t,x,y", ([_g17(v) for v in row] for row in pts))
        paths.append(path)
    xs, ys, labels = moduli_map.region_grid(bounds, resolution)
    path = f"{prefix}regions.csv"
    _write_csv(
        path,
        "x,y,label",
        ([_g17(x), _g17(y), labels[j, i].value] for j, y in enumerate(ys) for i, x in enumerate(xs)),
    )
    paths.append(path)
    return paths


def _parse_bounds(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bounds must be four numbers, got {text!r}")
    if len(vals) != 4 or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"bounds must be four finite numbers, got {text!r}")
    if not (vals[0] < vals[1] and vals[2] < vals[3]):
        raise argparse.ArgumentTypeError("bounds must satisfy xmin < xmax and ymin < ymax")
    return tuple(vals)


def cmd_figure(args) -> int:
    try:
        paths = write_figure(args.out_prefix, args.bounds, args.resolution, args.curve_samples)
    except OSError as exc:
        return _error(f"cannot write output: {exc}")
    except ContractError as exc:
        return _error(exc)
    for p in paths:
        print(p)
    return EXIT_OK


def _seed(args) -> int:
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return args.seed
    try:
        return int(env)
    except ValueError:
        raise InputError(f"{SEED_ENV} must be an integer, got {env!r}")


def cmd_verify(args) -> int:
    try:
        seed = _seed(args)
    except InputError as exc:
        return _error(exc)
    if args.samples == 0:
        print("warning: --samples=0, sampled properties check nothing", file=sys.stderr)
    results = verify.run_suites(args.suite, args.samples, seed)
    width = max(len(r.name) for r in results)
    print(f"suite={args.suite} samples={args.samples} seed={seed}")
    for r in results:
        flag = "PASS" if r.passed else "FAIL"
        line = f"{flag}  {r.name:<{width}}  n={r.checked}"
        if r.detail:
            line += f"  {r.detail}"
        print(line)
        if not r.passed and r.sample is not None:
            print(f"      falsifying sample: {json.dumps(r.sample, default=str)}")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)} passed, {len(failed)} failed")
    return EXIT_FAIL if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="affine-moduli", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="report tensors, signature, invariants and region")
    c.add_argument("file")
    c.set_defaults(func=cmd_classify)

    o = sub.add_parser("orbit-check", help="decide whether two structures are frame-equivalent")
    o.add_argument("a")
    o.add_argument("b")
    o.add_argument("--group", choices=("glplus", "gl"), default="glplus")
    o.add_argument("--tol", type=float, default=action.DEFAULT_TOL)
    o.set_defaults(func=cmd_orbit_check)

    f = sub.add_parser("figure", help="write curve and region CSV data")
    f.add_argument("--bounds", type=_parse_bounds, default=(-10.0, 10.0, 0.0, 10.0), metavar="XMIN,XMAX,YMIN,YMAX")
    f.add_argument("--resolution", type=int, default=101)
    f.add_argument("--curve-samples", type=int, default=moduli_map.DEFAULT_SAMPLES)
    f.add_argument("--out-prefix", default="")
    f.set_defaults(func=cmd_figure)

    v = sub.add_parser("verify", help="run the property suites")
    v.add_argument("--suite", choices=("all",) + verify.SUITES, default="all")
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "samples", 0) < 0 or getattr(args, "resolution", 1) < 1:
        return _error("counts must be non-negative (resolution at least 1)")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
