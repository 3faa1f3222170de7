"""Command-line entry point.

Every run writes its data files plus a JSON manifest into the output
directory. The manifest records the full argument vector, so
``hardcore --replay MANIFEST`` repeats a run; data files carry no
timestamps and come out byte-identical.

Exit codes: 0 success, 1 failed check or sampling failure, 2 usage or
guard error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__, approx, cutset, sampler, verify
from .cutset import GuardExceeded
from .gibbs import parse_activity
from .kernels import BACKEND
from .lattice import Box

OUT_DIR_ENV = "HARDCORE_OUT_DIR"
DEFAULT_OUT_DIR = "runs"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _vertex(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(c) for c in text.replace(" ", "").split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad vertex {text!r}; expected e.g. 0,0") from exc


def _vertex_set(text: str) -> tuple[tuple[int, ...], ...]:
    if not text.strip():
        return ()
    return tuple(_vertex(part) for part in text.split(";"))


def _activity(text: str) -> Fraction:
    try:
        return parse_activity(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _activity_list(text: str) -> list[Fraction]:
    return [_activity(t) for t in text.split(",") if t]


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hardcore", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--out-dir", default=None, help=f"output directory (default ${OUT_DIR_ENV} or ./{DEFAULT_OUT_DIR})")
    p.add_argument("--config", default=None, help="key=value file; command-line flags win")
    p.add_argument("--replay", default=None, metavar="MANIFEST", help="rerun the command recorded in a manifest")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command")

    v = sub.add_parser("verify", help="run exhaustive invariant suites")
    v.add_argument("suite", choices=[*verify.SUITES, "all"])
    v.add_argument("--d", type=int, default=2)
    v.add_argument("--n", type=int, default=2)
    v.add_argument("--lambdas", type=_activity_list, default=list(verify.DEFAULT_LAMBDAS))
    v.add_argument("--seeds", type=int, default=100, help="dominating-set seeds per cutset")

    e = sub.add_parser("enumerate", help="stream odd minimal cutsets as NDJSON")
    e.add_argument("--d", type=int, default=2)
    e.add_argument("--n", type=int, default=2)
    e.add_argument("--x", type=_vertex, default=None)
    e.add_argument("--L", type=int, default=None, help="keep cutsets with |G| = L")
    e.add_argument("--eps", type=_activity, default=None, help="keep the eps slice eps|G| < |G_r| <= 2eps|G|")
    e.add_argument("--M", type=int, default=None, help="keep |E1| = M")
    e.add_argument("--R", type=int, default=None, help="keep R(E1) = R")

    s = sub.add_parser("sample", help="exact samples and an occupancy estimate")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--bc", choices=["odd", "even", "free"], default="odd")
    s.add_argument("--lam", type=_activity, default=Fraction(1))
    s.add_argument("--x", type=_vertex, default=None)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--emit", choices=["csv", "svg"], action="append", default=None, help="repeatable; default csv")
    s.add_argument("--snapshots", type=int, default=1, help="SVG documents to write with --emit svg")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--max-sweeps", type=int, default=sampler.MAX_SWEEPS)

    c = sub.add_parser("census-ngamma", help="count direction codes N(R, E)")
    c.add_argument("--d", type=int, default=2)
    c.add_argument("--n", type=int, default=2)
    c.add_argument("--x", type=_vertex, default=None)
    c.add_argument("--R", type=_int_list, required=True, help="comma-separated R values")
    c.add_argument("--E", type=_vertex_set, required=True, help="vertices separated by ';', e.g. '1,0;0,1'")

    f = sub.add_parser("census-family", help="count cutsets and distinct interior approximations")
    f.add_argument("--d", type=int, default=2)
    f.add_argument("--n", type=int, default=3)
    f.add_argument("--x", type=_vertex, default=None)
    f.add_argument("--eps", type=_activity, required=True)
    f.add_argument("--L", type=_int_list, default=None, help="comma-separated sizes (default: all realised)")
    f.add_argument("--regime", choices=[approx.STANDARD, approx.EXTENDED], default=approx.STANDARD)

    sn = sub.add_parser("snapshot", help="one exact sample rendered as SVG")
    sn.add_argument("--d", type=int, default=2)
    sn.add_argument("--n", type=int, default=20)
    sn.add_argument("--bc", choices=["odd", "even", "free"], default="odd")
    sn.add_argument("--lam", type=_activity, default=Fraction(1))
    sn.add_argument("--index", type=int, default=0, help="sample index under the master seed")
    sn.add_argument("--anchor", type=_vertex, default=None, help="overlay Break for this anchor when defined")
    sn.add_argument("--max-sweeps", type=int, default=sampler.MAX_SWEEPS)
    return p


def read_config(path: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (t.strip() for t in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _config_argv(config: dict[str, str], sub: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Turn config entries into flags placed before the user's own (later flags win)."""
    known = {}
    for action in sub._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                known[action.dest] = opt
    extra = []
    for key, value in config.items():
        if key in ("seed", "out_dir"):
            continue
        if key not in known:
            raise UsageError(f"unknown config key {key!r}")
        extra += [known[key], value]
    return extra + argv


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def parse(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.replay:
        manifest = json.loads(Path(args.replay).read_text())
        replay_argv = list(manifest["argv"])
        if args.out_dir is not None:  # allow replaying into a fresh directory
            replay_argv = ["--out-dir", args.out_dir] + _strip_out_dir(replay_argv)
        return parse(replay_argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        raise UsageError("a command is required")
    if args.config:
        config = read_config(args.config)
        sub_argv = argv[argv.index(args.command) + 1 :]
        pre = argv[: argv.index(args.command)]
        merged = _config_argv(config, _subparser(parser, args.command), sub_argv)
        glob = []
        if "seed" in config and "--seed" not in pre:
            glob += ["--seed", config["seed"]]
        if "out_dir" in config and "--out-dir" not in pre:
            glob += ["--out-dir", config["out_dir"]]
        args = parser.parse_args(glob + pre + [args.command] + merged)
    args.argv = canonical_argv(args)
    return args


def _strip_out_dir(argv: list[str]) -> list[str]:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok == "--out-dir":
            skip = True
            continue
        out.append(tok)
    return out


def _fmt(value) -> str:
    if isinstance(value, tuple) and value and isinstance(value[0], tuple):
        return ";".join(_fmt(v) for v in value)
    if isinstance(value, (tuple, list)):
        return ",".join(str(v) for v in value)
    return str(value)


def canonical_argv(args: argparse.Namespace) -> list[str]:
    """Explicit argument vector with every option spelled out (config already folded in)."""
    out = ["--seed", str(args.seed)]
    if args.out_dir is not None:
        out += ["--out-dir", args.out_dir]
    out.append(args.command)
    params = parameters(args)
    if "suite" in params:
        out.append(params.pop("suite"))
    for key, value in params.items():
        if value is None:
            continue
        if key == "emit":
            for e in value:
                out += ["--emit", e]
            continue
        out += ["--" + key.replace("_", "-"), _fmt(value)]
    return out


GLOBALS = {"seed", "out_dir", "config", "replay", "command", "argv"}


def parameters(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k not in GLOBALS}


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def out_dir(args) -> Path:
    path = Path(args.out_dir or os.environ.get(OUT_DIR_ENV) or DEFAULT_OUT_DIR)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_manifest(args, outputs: list[Path], started: float, status: str) -> Path:
    path = out_dir(args) / f"manifest-{args.command}.json"
    doc = {
        "command": args.command,
        "parameters": {k: _jsonable(v) for k, v in parameters(args).items()},
        "seed": args.seed,
        "version": __version__,
        "backend": BACKEND,
        "argv": args.argv,
        "started": started,
        "finished": time.time(),
        "status": status,
        "outputs": [p.name for p in outputs],
    }
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def _anchor(args, d: int) -> tuple[int, ...]:
    x = args.x if getattr(args, "x", None) is not None else (0,) * d
    if len(x) != d:
        raise UsageError(f"anchor {x} does not have dimension {d}")
    return x


# commands; each returns (exit code, output paths, status)


def cmd_verify(args):
    reports = verify.run_suite(args.suite, args.d, args.n, lambdas=args.lambdas, seed=args.seed, seeds=args.seeds)
    path = out_dir(args) / f"verify-{args.suite}.json"
    path.write_text(json.dumps([r.to_json() for r in reports], indent=2) + "\n")
    for r in reports:
        for c in r.checks.values():
            mark = "ok  " if c.passed else "FAIL"
            print(f"{mark} {r.suite}: {c.name} ({c.cases} cases)" + ("" if c.passed else f" -- {c.failure}"))
    ok = all(r.passed for r in reports)
    return (EXIT_OK if ok else EXIT_FAIL), [path], "passed" if ok else "failed"


def cmd_enumerate(args):
    box = Box(args.d, args.n)
    x = _anchor(args, args.d)
    cutset.check_omcut_guard(box)
    path = out_dir(args) / "cutsets.ndjson"
    count = 0
    with path.open("w") as fh:
        for gamma in cutset.enumerate_omcut(box, x):
            st = cutset.stats(gamma)
            if args.L is not None and st.L != args.L:
                continue
            if args.eps is not None and not cutset.omcut_class(gamma, args.eps):
                continue
            if args.M is not None and st.M != args.M:
                continue
            if args.R is not None and st.R != args.R:
                continue
            line = json.dumps(gamma.to_json(), separators=(",", ":"))
            fh.write(line + "\n")
            print(line)
            count += 1
        tail = json.dumps({"count": count}, separators=(",", ":"))
        fh.write(tail + "\n")
        print(tail)
    return EXIT_OK, [path], "ok"


def _sample_chunk(job):
    box, bc, lam, seed, lo, hi, x_index, max_sweeps = job
    lat = sampler.Lattice.build(box, bc)
    hits = failures = 0
    for k in range(lo, hi):
        try:
            a, _ = sampler.cftp_array(lat, lam, seed, k, max_sweeps=max_sweeps)
        except sampler.CoalescenceError:
            failures += 1
            continue
        hits += int(a[x_index])
    return hits, failures


def cmd_sample(args):
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    box = Box(args.d, args.n)
    x = _anchor(args, args.d)
    if not box.contains(x):
        raise UsageError(f"{x} is outside the box")
    emit = args.emit or ["csv"]
    outputs = []
    workers = max(1, args.workers)
    bounds = [(args.samples * i // workers, args.samples * (i + 1) // workers) for i in range(workers)]
    jobs = [(box, args.bc, args.lam, args.seed, lo, hi, box.index(x), args.max_sweeps) for lo, hi in bounds]
    if workers == 1:
        parts = [_sample_chunk(jobs[0])]
    else:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_sample_chunk, jobs))
    hits = sum(h for h, _ in parts)
    failures = sum(f for _, f in parts)
    ok = args.samples - failures
    phat = hits / ok if ok else float("nan")
    se = (phat * (1 - phat) / ok) ** 0.5 if ok else float("nan")
    rec = sampler.EstimateRecord(
        target=f"P(omega({','.join(map(str, x))})=1)",
        estimate=phat,
        samples=ok,
        stderr=se,
        seed=args.seed,
        d=args.d,
        n=args.n,
        lam=args.lam,
        bc=args.bc,
        x=x,
        failures=failures,
    )
    if "csv" in emit:
        path = out_dir(args) / "estimate.csv"
        path.write_text(rec.to_csv())
        outputs.append(path)
        print(rec.to_csv(), end="")
    if "svg" in emit:
        if args.d != 2:
            raise UsageError("SVG snapshots need d = 2")
        lat = sampler.Lattice.build(box, args.bc)
        for k in range(min(args.snapshots, args.samples)):
            try:
                a, _ = sampler.cftp_array(lat, args.lam, args.seed, k, max_sweeps=args.max_sweeps)
            except sampler.CoalescenceError:
                continue
            doc = sampler.render_snapshot(lat.to_configuration(a))
            path = out_dir(args) / f"snapshot-{k}.svg"
            path.write_text(sampler.snapshot_svg(doc))
            outputs.append(path)
    if failures:
        print(f"{failures} samples failed to coalesce", file=sys.stderr)
        return EXIT_FAIL, outputs, "partial"
    return EXIT_OK, outputs, "ok"


def cmd_census_ngamma(args):
    box = Box(args.d, args.n)
    x = _anchor(args, args.d)
    path = out_dir(args) / "census-ngamma.csv"
    rows = [("R", "E", "count", "bound")]
    for R in args.R:
        count = approx.census_ngamma(R, args.E, box, x)
        rows.append((R, _fmt(args.E), count, (2 * args.d) ** (2 * R)))
    _write_csv(path, rows)
    return EXIT_OK, [path], "ok"


def cmd_census_family(args):
    box = Box(args.d, args.n)
    x = _anchor(args, args.d)
    cutset.check_omcut_guard(box)
    sizes = args.L
    if sizes is None:
        sizes = sorted({len(g.edges) for g in cutset.enumerate_omcut(box, x)})
    rows = [approx.FamilyCensus.CSV_HEADER]
    for L in sizes:
        rows.append(approx.family_census(box, x, args.eps, L, seed=args.seed, regime=args.regime).csv_row())
    path = out_dir(args) / "census-family.csv"
    _write_csv(path, rows)
    return EXIT_OK, [path], "ok"


def cmd_snapshot(args):
    if args.d != 2:
        raise UsageError("snapshots need d = 2")
    box = Box(args.d, args.n)
    lat = sampler.Lattice.build(box, args.bc)
    try:
        a, sweeps = sampler.cftp_array(lat, args.lam, args.seed, args.index, max_sweeps=args.max_sweeps)
    except sampler.CoalescenceError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL, [], "failed"
    omega = lat.to_configuration(a)
    gamma = None
    if args.anchor is not None and cutset.in_omega(omega, args.anchor):
        gamma = cutset.break_of(omega, args.anchor)
    doc = sampler.render_snapshot(omega, gamma)
    doc["lambda"] = str(args.lam)
    doc["sweeps"] = sweeps
    base = out_dir(args) / f"snapshot-n{args.n}-lam{str(args.lam).replace('/', '_')}-{args.index}"
    svg, js = base.with_suffix(".svg"), base.with_suffix(".json")
    svg.write_text(sampler.snapshot_svg(doc))
    js.write_text(json.dumps(doc, separators=(",", ":")) + "\n")
    print(svg)
    return EXIT_OK, [svg, js], "ok"


def _write_csv(path: Path, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerows(rows)
    sys.stdout.write(path.read_text())


COMMANDS = {
    "verify": cmd_verify,
    "enumerate": cmd_enumerate,
    "sample": cmd_sample,
    "census-ngamma": cmd_census_ngamma,
    "census-family": cmd_census_family,
    "snapshot": cmd_snapshot,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_USAGE if exc.code else EXIT_OK
    except (UsageError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    started = time.time()
    try:
        code, outputs, status = COMMANDS[args.command](args)
    except (GuardExceeded, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_manifest(args, outputs, started, status)
    return code


if __name__ == "__main__":
    sys.exit(main())
