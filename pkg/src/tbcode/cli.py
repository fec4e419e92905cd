"""``tbcode`` command-line interface.

Exit status: 0 on success, 1 for user errors (bad specs, flags or paths),
2 for internal failures, including reproduced values that disagree with the
golden table.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import platform
import stat
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import metadata, resources
from pathlib import Path

import numpy as np

from . import gf2_core as gf2
from .code_builder import SpecError, bpt_locality_constant, build_code, read_specs, split_components
from .decoder import DecoderConfig, OracleConfig
from .distance import CapExceeded, NoLogicals, distance, distance_upper_bound, exact_distance
from .search import Budget, SearchQuery, run_search
from .simulator import (FitError, NoCrossing, StopRule, fit_curve, monte_carlo, pseudo_threshold,
                        surface_code_baseline)
from .tanner_layout import (LayoutError, UnsupportedWeight, biplanar_split, build_toric_layout,
                            tangled_layout_weight4, toric_layout_tuples)

SCHEMA = "tbcode/1"
CSV_COLUMNS = ("p", "shots", "failures", "p_l", "ci_low", "ci_high")


class UserError(Exception):
    """Bad input from the command line; reported without a traceback."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# manifests -----------------------------------------------------------------------


def _version(pkg: str) -> str:
    try:
        return metadata.version(pkg)
    except metadata.PackageNotFoundError:
        return "unknown"


@dataclass
class RunManifest:
    command_line: list[str]
    spec_hash: str | None = None
    seed: int | None = None
    versions: dict = field(default_factory=lambda: {
        "artifact": _version("artifact"), "python": platform.python_version(),
        "numpy": np.__version__, "scipy": _version("scipy"), "networkx": _version("networkx")})
    started: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    finished: str | None = None
    outputs: list[str] = field(default_factory=list)

    def write(self, path: Path) -> None:
        self.finished = datetime.now(timezone.utc).isoformat()
        path.write_text(json.dumps({"schema": SCHEMA, **asdict(self)}, indent=2) + "\n")


def spec_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


# input helpers -------------------------------------------------------------------


def bundled_specs_dir():
    return resources.files("tbcode") / "data" / "specs"


def load_golden(path: str | None = None) -> dict:
    if path is None:
        return json.loads((resources.files("tbcode") / "data" / "golden.json").read_text())
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UserError(f"cannot read golden file {path}: {exc}") from None


def resolve_spec_text(arg: str) -> str:
    """A file path, the name of a bundled spec, or an inline spec string."""
    p = Path(arg)
    if p.is_file():
        return p.read_text()
    bundled = bundled_specs_dir() / f"{arg.removesuffix('.spec')}.spec"
    if bundled.is_file():
        return bundled.read_text()
    if "=" in arg:
        return arg
    raise UserError(f"no spec file or bundled spec named {arg!r}")


def load_one_spec(arg: str):
    text = resolve_spec_text(arg)
    specs = read_specs(text)
    if len(specs) != 1:
        raise UserError(f"expected exactly one spec, found {len(specs)}")
    return specs[0], specs[0].to_text()


def parse_range(text: str) -> tuple[int, ...]:
    """``3..8``, ``3,5,7`` or ``4``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return tuple(range(int(lo), int(hi) + 1))
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UserError(f"bad range {text!r}") from None


def parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t]
    except ValueError:
        raise UserError(f"bad number list {text!r}") from None


def ensure_writable_dir(path: Path) -> None:
    """Create ``path`` if needed; refuse directories without write permission bits.

    The mode bits are checked directly so that read-only directories are
    honoured even when running as root.
    """
    if path.exists():
        if not path.is_dir():
            raise OSError(f"{path} is not a directory")
        if not path.stat().st_mode & (stat.S_IWUSR | stat.S_IWGRP | stat.S_IWOTH):
            raise PermissionError(f"{path} is read-only")
    else:
        path.mkdir(parents=True)


def emit(obj, out: str | None, manifest: RunManifest, lines: list | None = None) -> None:
    """Write JSON (or JSONL when ``lines`` is given) to ``out`` or stdout."""
    text = "".join(json.dumps(r) + "\n" for r in lines) if lines is not None else json.dumps(obj, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text)
    manifest.outputs.append(str(path))
    manifest.write(path.with_name(path.name + ".manifest.json"))


def threads(args) -> int:
    if args.threads:
        return args.threads
    env = os.environ.get("TBCODE_THREADS")
    return int(env) if env else 1


# commands ------------------------------------------------------------------------


def code_summary(spec, code) -> dict:
    return {"spec": spec.to_text(), "l": spec.l, "m": spec.m, "n": code.n, "k": code.k,
            "weight": spec.weight, "pattern": list(spec.pattern), "zero_rate": code.zero_rate,
            "commutes": code.commutes(), "components": len(split_components(code))}


def cmd_build(args, manifest):
    spec, text = load_one_spec(args.spec)
    manifest.spec_hash = spec_hash(text)
    code = build_code(spec, with_logicals=False)
    emit({"schema": SCHEMA, **code_summary(spec, code)}, args.out, manifest)


def cmd_distance(args, manifest):
    spec, text = load_one_spec(args.spec)
    manifest.spec_hash, manifest.seed = spec_hash(text), args.seed
    code = build_code(spec, with_logicals=False)
    try:
        if args.exact:
            res = exact_distance(code, args.dim_cap)
        elif args.bound:
            res = distance_upper_bound(code, args.trials, args.seed)
        else:
            res = distance(code, args.dim_cap, args.trials, args.seed)
    except CapExceeded as exc:
        raise UserError(f"{exc}; raise --dim-cap or drop --exact") from None
    out = {"schema": SCHEMA, "spec": spec.to_text(), "n": code.n, "k": code.k, **res.to_dict(),
           "witness": res.witness.support()}
    if res.value:
        out["bpt_c"] = float(bpt_locality_constant(code, res.value))
    emit(out, args.out, manifest)


def layout_report(code) -> dict:
    tuples = toric_layout_tuples(code)
    toric = {"found": bool(tuples), "all_tuples": [list(t) for t in tuples]}
    if tuples:
        i, j, g, h, mu, lam = tuples[0]
        lay = build_toric_layout(code, i, j, g, h)
        toric |= {"i": i, "j": j, "g": g, "h": h, "mu": mu, "lambda": lam, "grid": list(lay.shape),
                  "long_range_vectors": [{"check": c, "origin": f"{o[0]}{o[1] + 1}", "vector": list(v)}
                                         for (c, o), v in sorted(lay.long_range_families().items())]}
    try:
        split = biplanar_split(code)
        biplanar = {"supported": True, "planar1": split.planar1, "planar2": split.planar2,
                    "layers": [[f"{b}{t + 1}" for b, t in split.terms1],
                               [f"{b}{t + 1}" for b, t in split.terms2]]}
    except UnsupportedWeight as exc:
        biplanar = {"supported": False, "reason": str(exc)}
    return {"components": len(split_components(code)), "toric": toric, "biplanar": biplanar}


def write_coords(code, path: str) -> None:
    t = toric_layout_tuples(code)
    if not t:
        raise UserError("no toric layout, so there are no coordinates to emit")
    lay = build_toric_layout(code, *t[0][:4])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("type", "label_ex", "label_ey", "u", "v"))
        for (vt, mono), (u, v) in sorted(lay.coords.items()):
            w.writerow((vt, mono.ex, mono.ey, u, v))


def cmd_layout(args, manifest):
    spec, text = load_one_spec(args.spec)
    manifest.spec_hash = spec_hash(text)
    code = build_code(spec, with_logicals=False)
    out = {"schema": SCHEMA, "spec": spec.to_text(), **layout_report(code)}
    if args.tangled:
        mu, lam = parse_range(args.tangled)
        try:
            t = tangled_layout_weight4(code, mu, lam)
        except LayoutError as exc:
            raise UserError(str(exc)) from None
        out["tangled"] = {"mu": mu, "lambda": lam, "sigma": t.sigma, "tau": t.tau}
    if args.emit_coords:
        write_coords(code, args.emit_coords)
        manifest.outputs.append(args.emit_coords)
    emit(out, args.out, manifest)


def decoder_from_args(args):
    if args.decoder == "oracle":
        return OracleConfig(args.w_max)
    return DecoderConfig(args.bp.replace("-", "_"), args.iters, args.min_sum_scale, args.osd_order)


def cmd_simulate(args, manifest):
    spec, text = load_one_spec(args.spec)
    manifest.spec_hash, manifest.seed = spec_hash(text), args.seed
    code = build_code(spec, with_logicals=False)
    ps = parse_floats(args.p)
    if not ps or any(not 0 <= p <= 1 for p in ps):
        raise UserError("--p needs values in [0, 1]")
    stats = monte_carlo(code, decoder_from_args(args), ps,
                        StopRule(int(args.max_shots), args.target_failures), args.seed, threads(args))
    rows = [{"schema": SCHEMA, **s.to_dict()} for s in stats]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for s in stats:
                w.writerow([repr(getattr(s, c)) if isinstance(getattr(s, c), float) else getattr(s, c)
                            for c in CSV_COLUMNS])
        manifest.outputs.append(args.csv)
        if not args.out:
            manifest.write(Path(args.csv + ".manifest.json"))
    emit(None, args.out, manifest, lines=rows)


def read_points_csv(path: str) -> list[tuple[float, float]]:
    try:
        with open(path, newline="") as fh:
            return [(float(r["p"]), float(r["p_l"])) for r in csv.DictReader(fh)]
    except (OSError, KeyError, ValueError) as exc:
        raise UserError(f"cannot read points from {path}: {exc}") from None


def cmd_fit(args, manifest):
    try:
        fit = fit_curve(read_points_csv(args.input))
    except FitError as exc:
        raise UserError(str(exc)) from None
    out = {"schema": SCHEMA, **fit.to_dict()}
    for key, k in (("p0", 1), ("p0_k", args.k)):
        if k is None:
            continue
        try:
            out[key] = pseudo_threshold(fit, k)
        except NoCrossing:
            out[key] = None
    out["p_l_1e-4"] = float(fit(1e-4))
    emit(out, args.out, manifest)


def cmd_baseline(args, manifest):
    code = surface_code_baseline(args.surface_d)
    out = {"schema": SCHEMA, "n": code.n, "k": code.k, "d": args.surface_d,
           "h_x": gf2.dumps(code.h_x), "h_z": gf2.dumps(code.h_z)}
    if args.out_dir:
        d = Path(args.out_dir)
        ensure_writable_dir(d)
        for name, h in (("h_x", code.h_x), ("h_z", code.h_z)):
            gf2.save(h, d / f"surface_d{args.surface_d}_{name}.txt")
            manifest.outputs.append(str(d / f"surface_d{args.surface_d}_{name}.txt"))
        manifest.write(d / "manifest.json")
    emit(out, args.out, manifest)


def cmd_search(args, manifest):
    wa, wb = args.wa, args.wb
    q = SearchQuery(parse_range(args.l), parse_range(args.m), (wa, wb), args.min_k, args.min_d,
                    args.require_toric, args.require_connected, frozenset(args.universe))
    budget = Budget(args.dim_cap, args.trials, args.seed)
    manifest.seed = args.seed
    start = 0
    if args.resume and Path(args.resume).is_file():
        start = json.loads(Path(args.resume).read_text())["next_index"]
    sink = open(args.out, "a" if start else "w") if args.out else sys.stdout
    try:
        for rec in run_search(q, budget, start, threads(args)):
            if rec.passed or args.all:
                sink.write(json.dumps({"schema": SCHEMA, **rec.to_dict()}) + "\n")
                sink.flush()
            if args.resume:
                Path(args.resume).write_text(json.dumps({"next_index": rec.index + 1}))
    finally:
        if args.out:
            sink.close()
    if args.out:
        manifest.outputs.append(args.out)
        manifest.write(Path(args.out + ".manifest.json"))


def reproduce_tables(out_dir: str | Path, golden: dict | None = None, trials: int = 2000,
                     dim_cap: int = 27, seed: int = 0) -> dict:
    """Rebuild every golden row and compare n, k, d, toric flag and component count."""
    out_dir = Path(out_dir)
    ensure_writable_dir(out_dir)
    golden = golden or load_golden()
    rows = []
    for row in golden["rows"]:
        spec = read_specs(row["spec"])[0]
        code = build_code(spec, with_logicals=False)
        res = distance(code, dim_cap, trials, seed)
        tuples = toric_layout_tuples(code)
        got = {"n": code.n, "k": code.k, "d": res.value, "certainty": res.certainty,
               "toric": bool(tuples), "components": len(split_components(code))}
        want = {"n": row["n"], "k": row["k"], "d": row["d"], "toric": row["toric"] is not None,
                "components": row["components"]}
        mismatches = [key for key in want if got[key] != want[key]]
        if row["toric"] is not None and tuple(row["toric"]) not in tuples:
            mismatches.append("toric_tuple")
        rows.append({"id": row["id"], "got": got, "want": want, "pass": not mismatches,
                     "mismatches": mismatches})
    report = {"schema": SCHEMA, "rows": rows, "all_pass": all(r["pass"] for r in rows)}
    (out_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    return report


def cmd_reproduce(args, manifest):
    golden = load_golden(args.golden)
    try:
        report = reproduce_tables(args.out_dir, golden, args.trials, args.dim_cap, args.seed)
    except OSError as exc:
        raise UserError(f"cannot write to {args.out_dir}: {exc}") from None
    for r in report["rows"]:
        flag = "PASS" if r["pass"] else "FAIL " + ",".join(r["mismatches"])
        g = r["got"]
        print(f"{r['id']:<16} [[{g['n']},{g['k']},{g['d']}]] {g['certainty']:<11} "
              f"toric={'y' if g['toric'] else 'n'} comps={g['components']}  {flag}")
    manifest.seed = args.seed
    manifest.outputs.append(str(Path(args.out_dir) / "report.json"))
    manifest.write(Path(args.out_dir) / "manifest.json")
    return 0 if report["all_pass"] else 2


def cmd_export(args, manifest):
    spec, text = load_one_spec(args.spec)
    manifest.spec_hash = spec_hash(text)
    code = build_code(spec, with_logicals=False)
    d = Path(args.out_dir)
    ensure_writable_dir(d)
    for name, h in (("h_x", code.h_x), ("h_z", code.h_z)):
        gf2.save(h, d / f"{name}.txt")
        manifest.outputs.append(str(d / f"{name}.txt"))
    manifest.write(d / "manifest.json")
    print(json.dumps({"schema": SCHEMA, "spec": spec.to_text(), "n": code.n, "k": code.k,
                      "files": manifest.outputs}))


# parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tbcode", description="Trivariate bicycle quantum LDPC codes.")
    p.add_argument("--version", action="version", version=f"%(prog)s {_version('artifact')}")
    p.add_argument("--threads", type=int, default=None, help="worker cap (default: $TBCODE_THREADS or 1)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def spec_cmd(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--spec", required=True, help="spec file, bundled spec name, or inline spec")
        sp.add_argument("--out", help="write JSON here (plus a manifest) instead of stdout")
        sp.set_defaults(func=fn)
        return sp

    spec_cmd("build", cmd_build, "build a code and report n, k")
    sp = spec_cmd("distance", cmd_distance, "exact distance or randomized upper bound")
    sp.add_argument("--exact", action="store_true", help="fail instead of falling back to a bound")
    sp.add_argument("--bound", action="store_true", help="skip the exact attempt")
    sp.add_argument("--exact-cap", "--dim-cap", dest="dim_cap", type=int, default=24)
    sp.add_argument("--trials", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=0)
    sp = spec_cmd("layout", cmd_layout, "toric tuples, long-range vectors, bi-planar split")
    sp.add_argument("--tangled", metavar="MU,LAM", help="also compute a tangled layout")
    sp.add_argument("--emit-coords", metavar="CSV", help="write toric vertex coordinates")

    sp = spec_cmd("simulate", cmd_simulate, "Monte-Carlo logical error rates (JSONL)")
    sp.add_argument("--p", required=True, help="comma-separated physical error rates")
    sp.add_argument("--target-failures", type=int, default=500)
    sp.add_argument("--max-shots", type=float, default=1e7)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--decoder", choices=("bposd", "oracle"), default="bposd")
    sp.add_argument("--bp", choices=("sum-product", "min-sum", "sum_product", "min_sum"), default="sum-product")
    sp.add_argument("--iters", type=int, default=100)
    sp.add_argument("--min-sum-scale", type=float, default=1.0)
    sp.add_argument("--osd-order", type=int, default=4)
    sp.add_argument("--w-max", type=int, default=2, help="oracle decoder weight limit")
    sp.add_argument("--csv", help="also write plot-ready CSV here")

    sp = sub.add_parser("fit", help="fit the heuristic curve to simulate CSV output")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--k", type=int, default=None, help="also report break-even against k bare qubits")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("baseline", help="rotated surface code check matrices")
    sp.add_argument("--surface-d", type=int, required=True)
    sp.add_argument("--out-dir")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_baseline)

    sp = sub.add_parser("search", help="enumerate and screen specs (JSONL)")
    sp.add_argument("--l", required=True, help="e.g. 3..8")
    sp.add_argument("--m", required=True)
    sp.add_argument("--wa", type=int, required=True)
    sp.add_argument("--wb", type=int, required=True)
    sp.add_argument("--min-k", type=int, default=1)
    sp.add_argument("--min-d", type=int, default=0)
    sp.add_argument("--require-toric", action="store_true")
    sp.add_argument("--require-connected", action="store_true")
    sp.add_argument("--universe", default="xyz")
    sp.add_argument("--dim-cap", type=int, default=24)
    sp.add_argument("--trials", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--all", action="store_true", help="also emit rejected specs")
    sp.add_argument("--resume", help="checkpoint file holding the next spec index")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("reproduce-tables", help="check bundled specs against the golden table")
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--golden")
    sp.add_argument("--trials", type=int, default=2000)
    sp.add_argument("--dim-cap", type=int, default=27)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_reproduce)

    sp = sub.add_parser("export-check-matrices", help="write h_x and h_z as text")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(func=cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = RunManifest(["tbcode", *argv])
    try:
        status = args.func(args, manifest)
    except (UserError, SpecError, NoLogicals, LayoutError, FitError, ValueError, OSError) as exc:
        print(f"tbcode: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal failure
        print(f"tbcode: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return status or 0


def dispatch(argv: list[str]) -> int:
    """Run the CLI and return its exit status, turning ``SystemExit`` into a code."""
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else (0 if exc.code is None else 1)


if __name__ == "__main__":
    sys.exit(main())
