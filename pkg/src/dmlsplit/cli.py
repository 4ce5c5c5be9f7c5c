"""Command-line entry point: one subcommand per library operation.

Every command reads a JSON problem file (``--input``) and/or inline flags, and
writes a JSON report to stdout. Exit codes: 0 ok, 1 domain error, 2 budget
exceeded, 3 parse error; errors are printed as ``{code, message, location}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import affine, diagnostics, growth, heights, projective, return_set
from .affine import AffinePolyMap
from .errors import BudgetExceeded, DmlError, ParseError
from .exact_arith import DEFAULT_FACTOR_BUDGET, DEFAULT_SEED, format_rational, parse_place, parse_rational
from .orbit import DEFAULT_BITSIZE_CAP
from .projective import ProjPoint, ProjRatMap, parse_map, parse_point
from .return_set import PlaneCurve

OPTION_DEFAULTS = {
    "nmax": 20,
    "budget": 64,
    "precision": 53,
    "place": "inf",
    "seed": DEFAULT_SEED,
    "factor_budget": DEFAULT_FACTOR_BUDGET,
    "bitsize_cap": DEFAULT_BITSIZE_CAP,
    "p": None,
    "m": 1,
    "n_hi": None,
    "certificate": None,
}
SPEC_FIELDS = ("f", "g", "x0", "y0", "curve")


@dataclass
class ProblemSpec:
    f: AffinePolyMap | None = None
    g: ProjRatMap | None = None
    x0: object = None
    y0: ProjPoint | None = None
    curve: PlaneCurve | None = None
    options: dict = field(default_factory=lambda: dict(OPTION_DEFAULTS))
    present: set = field(default_factory=set)  # fields given by the user
    commands: tuple = ()

    def need(self, *names: str):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ParseError(f"missing required field(s): {', '.join(missing)}", missing[0])
        return tuple(getattr(self, n) for n in names)

    def opt(self, name: str):
        return self.options[name]


def parse_affine(value, location: str = "f") -> AffinePolyMap:
    """Ascending coefficients ``[a_0, ..., a_d]``, as a list or a comma-separated string."""
    items = value.split(",") if isinstance(value, str) else value
    if not isinstance(items, (list, tuple)):
        raise ParseError("f must be a list or a comma-separated string of rationals", location)
    coeffs = [parse_rational(c, f"{location}[{i}]") for i, c in enumerate(items)]
    try:
        return AffinePolyMap(tuple(coeffs))
    except DmlError as exc:
        raise ParseError(exc.message, location) from None


def _parse_option(name: str, value):
    if name in ("place",):
        return str(value)
    if name in ("p",):
        return None if value is None else str(value)
    if name == "certificate":
        if value is not None and not isinstance(value, dict):
            raise ParseError("certificate must be an object", "options.certificate")
        return value
    if value is None and name == "n_hi":
        return None
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ParseError(f"option {name} must be an integer", f"options.{name}") from None


def load_spec(data: dict, warn=None) -> ProblemSpec:
    if not isinstance(data, dict):
        raise ParseError("problem file must hold a JSON object", "$")
    spec = ProblemSpec()
    for key in data:
        if key not in SPEC_FIELDS + ("options", "commands", "name", "description"):
            if warn:
                warn(f"unknown field {key!r} ignored")
    if data.get("f") is not None:
        spec.f = parse_affine(data["f"])
    if data.get("g") is not None:
        spec.g = parse_map(data["g"], "g")
    if data.get("x0") is not None:
        spec.x0 = parse_rational(data["x0"], "x0")
    if data.get("y0") is not None:
        spec.y0 = parse_point(data["y0"], "y0")
    if data.get("curve") is not None:
        if not isinstance(data["curve"], dict):
            raise ParseError("curve must be an object with 'coeffs'", "curve")
        spec.curve = PlaneCurve.from_dict(data["curve"], "curve")
    spec.present = {k for k in SPEC_FIELDS if data.get(k) is not None}
    opts = data.get("options", {}) or {}
    if not isinstance(opts, dict):
        raise ParseError("options must be an object", "options")
    for k, v in opts.items():
        if k not in OPTION_DEFAULTS:
            if warn:
                warn(f"unknown option {k!r} ignored")
            continue
        spec.options[k] = _parse_option(k, v)
        spec.present.add(k)
    cmds = data.get("commands", [])
    if not isinstance(cmds, list) or any(c not in COMMANDS for c in cmds):
        raise ParseError(f"commands must be a list drawn from {sorted(COMMANDS)}", "commands")
    spec.commands = tuple(cmds)
    return spec


def apply_flags(spec: ProblemSpec, args: argparse.Namespace) -> ProblemSpec:
    if args.f is not None:
        spec.f = parse_affine(args.f, "--f")
        spec.present.add("f")
    if args.g is not None:
        spec.g = parse_map(args.g, "--g")
        spec.present.add("g")
    if args.x0 is not None:
        spec.x0 = parse_rational(args.x0, "--x0")
        spec.present.add("x0")
    if args.y0 is not None:
        spec.y0 = parse_point(args.y0, "--y0")
        spec.present.add("y0")
    if args.curve is not None:
        try:
            spec.curve = PlaneCurve.from_dict(json.loads(args.curve), "--curve")
        except json.JSONDecodeError as exc:
            raise ParseError(f"--curve is not valid JSON: {exc.msg}", "--curve") from None
        spec.present.add("curve")
    for name in ("nmax", "budget", "precision", "place", "seed", "p", "m", "bitsize_cap"):
        value = getattr(args, name)
        if value is not None:
            spec.options[name] = _parse_option(name, value)
            spec.present.add(name)
    return spec


# ---------------------------------------------------------------- commands


def _segment(seg) -> dict:
    fmt = (lambda v: format_rational(v)) if seg.values and not isinstance(seg.values[0], ProjPoint) else str
    return {
        "values": [fmt(v) for v in seg.values],
        "cycle": None if seg.cycle is None else {"tail": seg.cycle[0], "period": seg.cycle[1]},
        "truncated": seg.truncated,
    }


def cmd_orbit(spec: ProblemSpec) -> tuple[dict, set]:
    out, used = {}, {"nmax", "bitsize_cap"}
    if spec.f is not None and spec.x0 is not None:
        out["f_orbit"] = _segment(affine.orbit(spec.f, spec.x0, spec.opt("nmax"), spec.opt("bitsize_cap")))
        used |= {"f", "x0"}
    if spec.g is not None and spec.y0 is not None:
        out["g_orbit"] = _segment(projective.orbit(spec.g, spec.y0, spec.opt("nmax"), spec.opt("bitsize_cap")))
        used |= {"g", "y0"}
    if not out:
        raise ParseError("orbit needs (f, x0) or (g, y0)", "f")
    return out, used


def cmd_return_set(spec: ProblemSpec):
    f, g, x0, y0, phi = spec.need("f", "g", "x0", "y0", "curve")
    rep = return_set.return_set(f, g, x0, y0, phi, spec.opt("nmax"), spec.opt("bitsize_cap"))
    return rep.as_dict(), {"f", "g", "x0", "y0", "curve", "nmax", "bitsize_cap"}


def cmd_certify_growth(spec: ProblemSpec):
    f, x0 = spec.need("f", "x0")
    S = growth.bad_places(f, spec.opt("factor_budget"), spec.opt("seed"))
    cert = growth.find_certificate(
        f, x0, spec.opt("budget"), spec.opt("factor_budget"), spec.opt("seed"), spec.opt("bitsize_cap")
    )
    if isinstance(cert, growth.NotFound):
        raise BudgetExceeded(f"no growth certificate within {spec.opt('budget')} iterates", payload=cert.as_dict())
    out = cert.as_dict(spec.opt("precision"))
    out["bad_places"] = S.as_dict()
    return out, {"f", "x0", "budget", "factor_budget", "seed", "bitsize_cap", "precision"}


def cmd_verify_growth(spec: ProblemSpec):
    f, x0 = spec.need("f", "x0")
    if spec.opt("certificate") is not None:
        cert = growth.certificate_from_dict(spec.opt("certificate"), f)
    else:
        cert = growth.find_certificate(f, x0, spec.opt("budget"), spec.opt("factor_budget"), spec.opt("seed"))
        if isinstance(cert, growth.NotFound):
            raise BudgetExceeded(f"no growth certificate within {spec.opt('budget')} iterates", payload=cert.as_dict())
    n_hi = spec.opt("n_hi") if spec.opt("n_hi") is not None else max(cert.N, spec.opt("nmax"))
    rep = growth.verify_certificate(f, x0, cert, n_hi, spec.opt("bitsize_cap"))
    used = {"f", "x0", "certificate", "n_hi", "nmax", "budget", "factor_budget", "seed", "bitsize_cap"}
    return rep.as_dict(), used


def cmd_exceptional(spec: ProblemSpec):
    (g,) = spec.need("g")
    return projective.exceptional_set(g).as_dict(), {"g"}


def cmd_poly_conjugate(spec: ProblemSpec):
    (g,) = spec.need("g")
    return projective.polynomial_conjugacy(g).as_dict(), {"g"}


def cmd_preperiodic(spec: ProblemSpec):
    if spec.g is not None and spec.y0 is not None:
        verdict = heights.is_preperiodic(spec.g, spec.y0, spec.opt("budget"), spec.opt("bitsize_cap"))
        used = {"g", "y0"}
    elif spec.f is not None and spec.x0 is not None:
        verdict = heights.is_preperiodic(spec.f, spec.x0, spec.opt("budget"), spec.opt("bitsize_cap"))
        used = {"f", "x0"}
    else:
        raise ParseError("preperiodic needs (g, y0) or (f, x0)", "g")
    return verdict.as_dict(), used | {"budget", "bitsize_cap"}


def cmd_height(spec: ProblemSpec):
    g, y0 = spec.need("g", "y0")
    prec = spec.opt("precision")
    out = {"weil_height": heights.weil_height(y0, prec).as_dict()}
    if g.degree >= 2:
        out["constant"] = heights.height_comparison_constant(g).as_dict()
        est = heights.canonical_height(g, y0, spec.opt("m"), spec.opt("bitsize_cap"))
        out["canonical_height"] = est.as_dict()
    return out, {"g", "y0", "precision", "m", "bitsize_cap"}


def cmd_silverman(spec: ProblemSpec):
    g, y0 = spec.need("g", "y0")
    if spec.opt("p") is None:
        raise ParseError("silverman needs options.p (or --p)", "p")
    p = parse_point(spec.opt("p"), "p")
    v = parse_place(spec.opt("place"), "place")
    tr = diagnostics.silverman_trace(g, y0, p, v, spec.opt("nmax"), spec.opt("precision"), spec.opt("bitsize_cap"))
    return tr, {"g", "y0", "p", "place", "nmax", "precision", "bitsize_cap"}


def cmd_boundary(spec: ProblemSpec):
    f, g, x0, y0, phi = spec.need("f", "g", "x0", "y0", "curve")
    v = parse_place(spec.opt("place"), "place")
    tr = diagnostics.boundary_trace(f, g, x0, y0, phi, v, spec.opt("nmax"), spec.opt("bitsize_cap"))
    return tr, {"f", "g", "x0", "y0", "curve", "place", "nmax", "bitsize_cap"}


def cmd_contradiction(spec: ProblemSpec):
    f, g, x0, y0, phi = spec.need("f", "g", "x0", "y0", "curve")
    rep = diagnostics.contradiction_report(
        f, g, x0, y0, phi, spec.opt("nmax"), spec.opt("precision"), spec.opt("budget"), spec.opt("seed"),
        spec.opt("bitsize_cap"),
    )
    return rep, {"f", "g", "x0", "y0", "curve", "nmax", "precision", "budget", "seed", "bitsize_cap"}


def cmd_certify_progression(spec: ProblemSpec):
    f, g, phi = spec.need("f", "g", "curve")
    m = spec.opt("m")
    ok = return_set.certify_progression(f, g, phi, m)
    return {"m": m, "certified": ok, "meaning": f"n in R implies n + {m} in R" if ok else "not certified"}, {
        "f", "g", "curve", "m",
    }


COMMANDS = {
    "orbit": cmd_orbit,
    "return-set": cmd_return_set,
    "certify-growth": cmd_certify_growth,
    "verify-growth": cmd_verify_growth,
    "exceptional": cmd_exceptional,
    "poly-conjugate": cmd_poly_conjugate,
    "preperiodic": cmd_preperiodic,
    "height": cmd_height,
    "silverman": cmd_silverman,
    "boundary": cmd_boundary,
    "contradiction": cmd_contradiction,
    "certify-progression": cmd_certify_progression,
}
TRACE_COMMANDS = ("silverman", "boundary")


def run_command(command: str, spec: ProblemSpec, csv: bool = False) -> tuple[str, list[str], int]:
    """Return ``(stdout text, warnings, exit code)``; never raises on library errors."""
    warnings: list[str] = []
    try:
        result, used = COMMANDS[command](spec)
        for name in sorted(spec.present - used):
            warnings.append(f"field {name!r} is not used by {command}")
        if command in TRACE_COMMANDS:
            if csv:
                text = result.to_csv() if command == "silverman" else result.to_csv(spec.opt("precision"))
                return text, warnings, 0
            result = result.as_dict()
        return dump(result), warnings, 0
    except DmlError as exc:
        return dump(exc.as_dict()), warnings, exc.exit_code


def dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- batch mode


def _batch_one(path: Path, command: str | None, out_dir: Path, csv: bool) -> list[tuple[str, int]]:
    warnings: list[str] = []
    try:
        spec = load_spec(json.loads(path.read_text(encoding="utf-8")), warnings.append)
        commands = [command] if command else list(spec.commands)
    except json.JSONDecodeError as exc:
        spec, commands = None, [command or "input"]
        err = ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}")
    except DmlError as exc:
        spec, commands, err = None, [command or "input"], exc
    results = []
    for cmd in commands:
        if spec is None:
            text, code = dump(err.as_dict()), err.exit_code
        else:
            text, warns, code = run_command(cmd, spec, csv)
            warnings.extend(warns)
        ext = "csv" if csv and cmd in TRACE_COMMANDS and code == 0 else "json"
        name = f"{path.stem}.{cmd}.{ext}"
        (out_dir / name).write_text(text, encoding="utf-8", newline="\n")
        results.append((name, code))
    return results


def run_batch(batch_dir: Path, out_dir: Path, command: str | None, jobs: int, csv: bool = False) -> dict:
    files = sorted(batch_dir.glob("*.json"))
    out_dir.mkdir(parents=True, exist_ok=True)
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        done = list(pool.map(lambda p: _batch_one(p, command, out_dir, csv), files))
    entries = [{"file": name, "exit_code": code} for res in done for name, code in res]
    return {"inputs": len(files), "outputs": entries}


# ---------------------------------------------------------------- argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dmlsplit", description="Exact arithmetic-dynamics computations over Q.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(COMMANDS) + ["batch"]:
        sp = sub.add_parser(name)
        sp.add_argument("--input", help="JSON problem file")
        sp.add_argument("--f", help="affine map, ascending coefficients a_0,...,a_d")
        sp.add_argument("--g", help="projective map 'desc G1;desc G2'")
        sp.add_argument("--x0")
        sp.add_argument("--y0", help="'u:w', 'inf' or a rational")
        sp.add_argument("--curve", help="curve as inline JSON {\"coeffs\": [[...], ...]}")
        sp.add_argument("--p", help="target point for silverman")
        sp.add_argument("--m", type=int, help="period for certify-progression, iterations for height")
        sp.add_argument("--place", help="'inf' or a prime")
        sp.add_argument("--nmax", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--precision", type=int, help="bits for reported logarithms")
        sp.add_argument("--budget", type=int, help="iteration budget")
        sp.add_argument("--bitsize-cap", dest="bitsize_cap", type=int)
        sp.add_argument("--csv", action="store_true", help="CSV output for trace commands")
        sp.add_argument("--batch", type=Path, help="run on every *.json in this directory")
        sp.add_argument("--out", type=Path, help="output directory for batch mode")
        sp.add_argument("--jobs", type=int, default=1, help="worker threads for batch mode")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    command = None if args.command == "batch" else args.command
    if args.batch is not None or command is None:
        if args.batch is None or args.out is None:
            err = ParseError("batch mode needs --batch DIR and --out DIR", "--batch")
            sys.stdout.write(dump(err.as_dict()))
            return err.exit_code
        summary = run_batch(args.batch, args.out, command, args.jobs, args.csv)
        sys.stdout.write(dump(summary))
        return 0
    try:
        data = {}
        if args.input:
            try:
                data = json.loads(Path(args.input).read_text(encoding="utf-8"))
            except OSError as exc:
                raise ParseError(f"cannot read input: {exc.strerror}", args.input) from None
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", f"{args.input}:{exc.lineno}") from None
        spec = apply_flags(load_spec(data, lambda m: print(f"warning: {m}", file=sys.stderr)), args)
    except DmlError as exc:
        sys.stdout.write(dump(exc.as_dict()))
        return exc.exit_code
    text, warnings, code = run_command(command, spec, args.csv)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
