"""Command-line interface: ``surfchar <command> ...``.

Exit codes: 0 when every check passes, 1 on a verification failure (with a
JSON report on stdout), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .exactalg import QQ, elem_to_json, parse_element, with_sqrt
from .forge import (
    DEFAULT_BUDGET,
    CertificateInvalid,
    ForgeError,
    certify_P_good,
    certificate_to_json,
    forge_any,
    result_from_json,
    result_to_json,
)
from .orbit import (
    DEFAULT_DEPTH,
    DEFAULT_MAX_BITS,
    DEFAULT_THRESHOLD,
    box_search,
    density_evidence,
    markoff_minus,
    mod_obstruction,
    orbit_explore,
    point_to_json,
    report_to_json,
    s04,
    s11,
    torus,
)
from .pgl2 import MinusIRep, forge_minus_I, lift_to_sl2, project, verify_minus_I
from .sl2core import make_LK
from .surfrep import boundary_traces, rep_from_json, rep_to_json, relation_check

CONFIG_ENV = "SURFCHAR_CONFIG"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    budget: int = DEFAULT_BUDGET
    depth: int = DEFAULT_DEPTH
    max_bits: int = DEFAULT_MAX_BITS
    threshold: int = DEFAULT_THRESHOLD
    threads: int = 1
    out: str | None = None
    deterministic: bool = True

    def __post_init__(self):
        for name in ("budget", "depth", "max_bits", "threshold", "threads"):
            if getattr(self, name) <= 0:
                raise UsageError(f"config value {name} must be positive")
        if not self.deterministic:
            raise UsageError("deterministic ordering cannot be switched off")

    def to_json(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("out")  # output location does not affect results
        d.pop("threads")  # nor does the worker count
        return d


def load_config(path: str | None = None) -> RunConfig:
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return RunConfig()
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**data)


def _config(args) -> RunConfig:
    base = load_config(args.config)
    updates = {}
    for name in ("budget", "depth", "max_bits", "threshold", "threads", "out"):
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value
    return dataclasses.replace(base, **updates)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, cfg: RunConfig, default_name: str | None = None) -> None:
    if cfg.out:
        out = Path(cfg.out)
        if default_name and (out.is_dir() or str(cfg.out).endswith("/")):
            out.mkdir(parents=True, exist_ok=True)
            out = out / default_name
        out.write_text(text)
    else:
        sys.stdout.write(text)


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _parse_values(text: str) -> list:
    try:
        return [parse_element(p) for p in text.split(",") if p.strip()]
    except (ValueError, SyntaxError) as exc:
        raise UsageError(f"cannot parse values {text!r}: {exc}") from exc


def _parse_traces(text: str) -> list:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--traces must be a JSON list: {exc}") from exc
    if not isinstance(raw, list):
        raise UsageError("--traces must be a JSON list")
    try:
        return [parse_element(str(x)) for x in raw]
    except (ValueError, SyntaxError) as exc:
        raise UsageError(f"cannot parse trace: {exc}") from exc


def _surface(args):
    name = args.surface
    if name == "torus":
        return torus()
    if args.k is None:
        raise UsageError(f"surface {name} needs --k")
    ks = _parse_values(args.k)
    if name == "s11" and len(ks) == 1:
        return s11(ks[0])
    if name == "markoff" and len(ks) == 1:
        return markoff_minus(ks[0])
    if name == "s04" and len(ks) == 4:
        return s04(*ks)
    raise UsageError(f"wrong number of --k values for surface {name}")


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_forge(args, cfg: RunConfig) -> int:
    ks = _parse_traces(args.traces)
    result = forge_any(args.genus, args.punctures, ks, budget=cfg.budget)
    cert = certify_P_good(result)
    out = result_to_json(result)
    out["certificate"]["verdict"] = cert.verdict
    out["config"] = cfg.to_json()
    _emit(dumps(out), cfg, "forge.json")
    return 0


def _load_rep(obj: dict):
    if "representation" in obj:
        return rep_from_json(obj["representation"]), obj
    return rep_from_json(obj), None


def verify_report(obj: dict) -> dict:
    rep, full = _load_rep(obj)
    status = relation_check(rep)
    integral = all(m.is_integral() for m in rep.images)
    traces = boundary_traces(rep)
    report = {
        "relation": status.kind,
        "integral": integral,
        "boundary_traces": [elem_to_json(t) for t in traces],
    }
    ok = status.kind == "Identity" and (integral or not rep.integral)
    stored = obj.get("representation", obj).get("boundary_traces")
    if stored is not None:
        report["traces_match"] = stored == report["boundary_traces"]
        ok = ok and report["traces_match"]
    if full is not None and full.get("minus_identity"):
        report["minus_identity"] = verify_minus_I(MinusIRep(rep))
        ok = ok and report["minus_identity"]
    report["ok"] = ok
    return report


def cmd_verify(args, cfg: RunConfig) -> int:
    report = verify_report(_read_json(args.file))
    _emit(dumps(report), cfg)
    return 0 if report["ok"] else 1


def cmd_certify(args, cfg: RunConfig) -> int:
    result = result_from_json(_read_json(args.file))
    try:
        cert = certify_P_good(result)
    except CertificateInvalid as exc:
        _emit(dumps({"verdict": False, "error": str(exc)}), cfg)
        return 1
    out = certificate_to_json(cert)
    _emit(dumps(out), cfg)
    return 0


def cmd_orbit(args, cfg: RunConfig) -> int:
    s = _surface(args)
    seed = _parse_values(args.seed)
    if len(seed) != 3:
        raise UsageError("--seed needs three comma-separated values")
    moves = [m.strip() for m in args.moves.split(",") if m.strip()]
    res = orbit_explore(s, seed, moves, cfg.depth, cfg.max_bits, workers=cfg.threads)
    stats = dict(res.stats)
    stats["config"] = cfg.to_json()
    lines = "".join(json.dumps(point_to_json(p)) + "\n" for p in res.points)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "points.jsonl").write_text(lines)
        (out / "stats.json").write_text(dumps(stats))
    else:
        sys.stdout.write(dumps(stats))
    return 0


def cmd_density(args, cfg: RunConfig) -> int:
    result = result_from_json(_read_json(args.file))
    report = density_evidence(result, cfg.depth, cfg.threshold, workers=cfg.threads)
    out = report_to_json(report)
    out["config"] = cfg.to_json()
    _emit(dumps(out), cfg)
    return 0 if report.verdict else 1


def cmd_obstruct(args, cfg: RunConfig) -> int:
    s = _surface(args)
    if args.modulus <= 0:
        raise UsageError("--modulus must be positive")
    count = mod_obstruction(s, args.modulus)
    _emit(dumps({"surface": s.describe(), "modulus": args.modulus, "solutions": count}), cfg)
    return 0


def cmd_search(args, cfg: RunConfig) -> int:
    s = _surface(args)
    pts = box_search(s, args.bound)
    out = {"surface": s.describe(), "bound": args.bound, "count": len(pts), "points": [point_to_json(p) for p in pts]}
    _emit(dumps(out), cfg)
    return 0


def cmd_lift(args, cfg: RunConfig) -> int:
    rep, _ = _load_rep(_read_json(args.file))
    p, f_data = project(rep)
    lifted = lift_to_sl2(p)
    lrep = lifted.rep.rep if isinstance(lifted.rep, MinusIRep) else lifted.rep
    lifted_f = [t * t for t in boundary_traces(lrep)] if rep.surface.punctures else []
    out = {
        "branch": lifted.branch,
        "classification": lifted.classification,
        "flipped": lifted.flipped,
        "sqrt_choice": lifted.sqrt_choice,
        "f_data": [elem_to_json(f) for f in f_data],
        "f_data_match": [elem_to_json(f) for f in lifted_f] == [elem_to_json(f) for f in f_data]
        if rep.surface.punctures
        else True,
        "representation": rep_to_json(lrep),
    }
    _emit(dumps(out), cfg)
    return 0 if out["f_data_match"] and relation_check(lrep).kind == "Identity" else 1


def cmd_minus_i(args, cfg: RunConfig) -> int:
    params = _parse_values(args.lk)
    if len(params) != 4:
        raise UsageError("--lk needs four comma-separated values a,b,c,d")
    tower = with_sqrt(QQ, -1)
    ps = [tower(x) if x.tower.is_prefix_of(tower) else x for x in params]
    M = make_LK(*ps)
    r = forge_minus_I(args.genus, M, params=ps, budget=cfg.budget)
    out = {
        "representation": rep_to_json(r.rep),
        "minus_identity": True,
        "verified": verify_minus_I(r),
        "gamma_trace": None if r.gamma_trace is None else elem_to_json(r.gamma_trace),
        "certificate": None if r.certificate is None else certificate_to_json(r.certificate),
        "config": cfg.to_json(),
    }
    _emit(dumps(out), cfg, "minusI.json")
    return 0 if out["verified"] else 1


COMMANDS = {
    "forge": cmd_forge,
    "verify": cmd_verify,
    "certify": cmd_certify,
    "orbit": cmd_orbit,
    "density": cmd_density,
    "obstruct": cmd_obstruct,
    "search": cmd_search,
    "lift": cmd_lift,
    "minusI": cmd_minus_i,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    common.add_argument("--out", help="output file or directory (default: stdout)")
    common.add_argument("--threads", type=int, help="worker processes")
    common.add_argument("--budget", type=int, help="scan budget for unit parameters")

    parser = argparse.ArgumentParser(prog="surfchar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("forge", parents=[common], help="forge an integral representation")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--punctures", type=int, required=True)
    p.add_argument("--traces", default="[]", help='JSON list, e.g. "[0, \\"(1+sqrt(5))/2\\"]"')

    for name, helptext in (
        ("verify", "check relation, integrality and traces"),
        ("certify", "re-verify a goodness certificate"),
        ("lift", "project to PGL2 and lift back"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("file")

    p = sub.add_parser("density", parents=[common], help="density evidence for a forged result")
    p.add_argument("file")
    p.add_argument("--depth", type=int)
    p.add_argument("--threshold", type=int)

    def surface_args(q):
        q.add_argument("--surface", choices=["s11", "s04", "torus", "markoff"], required=True)
        q.add_argument("--k", help="comma-separated level(s)")

    p = sub.add_parser("orbit", parents=[common], help="explore an orbit on a cubic surface")
    surface_args(p)
    p.add_argument("--seed", required=True)
    p.add_argument("--moves", default="vx,vy,vz")
    p.add_argument("--depth", type=int)
    p.add_argument("--max-bits", dest="max_bits", type=int)

    p = sub.add_parser("obstruct", parents=[common], help="count solutions modulo m")
    surface_args(p)
    p.add_argument("--modulus", type=int, required=True)

    p = sub.add_parser("search", parents=[common], help="integral points in a box")
    surface_args(p)
    p.add_argument("--bound", type=int, required=True)

    p = sub.add_parser("minusI", parents=[common], help="forge with -I at the puncture")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--lk", default="1,1,1,2", help="LK parameters a,b,c,d")
    return parser


def run_command(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"surfchar: {exc}", file=sys.stderr)
        return 2
    except (ForgeError, ValueError) as exc:
        sys.stdout.write(dumps({"ok": False, "error": str(exc)}))
        return 1


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
