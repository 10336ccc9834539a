"""Command-line front end: ``fddevs validate|simulate|transform|flatten|inspect``.

Exit status is 0 on success, 1 when the input is invalid or a model
operation fails, and 2 for usage errors (reported by argparse).
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from .core import AtomicSpec, CoupledSpec, ModelRegistry
from .errors import FddevsError, ValidationFailed
from .scxml import lift_statemachine, transform_scxml
from .sim import flatten, simulate
from .uml import emit_xmi, parse_xmi, registry_from_uml, registry_to_uml
from .xfd import (
    DocumentWarning,
    detect_dialect,
    load_model_tree,
    read_model,
    validate_document,
    write_model,
    write_model_tree,
)


def _violation_dict(v) -> dict:
    return {"code": v.code, "path": v.path, "message": v.message}


def cmd_validate(args) -> int:
    path = Path(args.path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    kind = None if args.kind == "auto" else args.kind
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DocumentWarning)
        found = validate_document(data, kind)
    notes = [str(w.message) for w in caught if issubclass(w.category, DocumentWarning)]
    if args.json:
        report = {
            "file": str(path),
            "valid": not found,
            "violations": [_violation_dict(v) for v in found],
            "warnings": notes,
        }
        print(json.dumps(report, indent=2))
    else:
        for n in notes:
            print(f"{path}: warning: {n}", file=sys.stderr)
        for v in found:
            print(f"{path}: {v}")
        if not found:
            print(f"{path}: ok")
    return 1 if found else 0


def cmd_simulate(args) -> int:
    reg = load_model_tree(args.root_file, args.dir)
    trace = simulate(reg, reg.root, args.until)
    text = trace.to_csv() if args.trace == "csv" else trace.to_jsonl()
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    # the engine draws no random numbers, so --seedless changes nothing
    print(
        f"{len(trace.events)} events, terminationTime={trace.termination_time:g}",
        file=sys.stderr,
    )
    return 0


def _load_any(fmt: str, path: Path) -> ModelRegistry:
    if fmt == "scxml":
        spec = lift_statemachine(transform_scxml(path.read_bytes()), name=path.stem)
        return ModelRegistry.of(spec, root=spec.name)
    if fmt == "xmi":
        return registry_from_uml(parse_xmi(path.read_bytes()))
    return load_model_tree(path)


def cmd_transform(args) -> int:
    src = Path(args.input)
    out_dir = Path(args.out_dir)
    reg = _load_any(args.source, src)
    if args.target == "devs":
        written = write_model_tree(reg, out_dir)
    else:
        out_dir.mkdir(parents=True, exist_ok=True)
        target = out_dir / f"{reg.root}.xmi"
        target.write_text(emit_xmi(registry_to_uml(reg), name=reg.root), encoding="utf-8")
        written = [target]
    for p in written:
        print(p)
    return 0


def cmd_flatten(args) -> int:
    reg = load_model_tree(args.root_file, args.dir)
    flat, flat_reg = flatten(reg, reg.root)
    out = Path(args.out)
    written = [write_model(flat, out)]
    for key, spec in flat_reg.items():
        if isinstance(spec, AtomicSpec):
            written.append(write_model(spec, out.parent / f"{key}.xml"))
    for p in written:
        print(p)
    return 0


def _describe(spec) -> dict:
    if isinstance(spec, AtomicSpec):
        return {
            "kind": "atomic",
            "name": spec.name,
            "initial": spec.initial,
            "states": list(spec.states),
            "inports": list(spec.inports),
            "outports": list(spec.outports),
            "timeAdvance": {s: t for s, t in spec.ta},
            "deltint": len(spec.deltint),
            "deltext": len(spec.deltext),
        }
    return {
        "kind": "coupled",
        "name": spec.name,
        "models": [m.name for m in spec.models],
        "inports": list(spec.inports),
        "outports": list(spec.outports),
        "couplings": [f"{spec.classify(c).value if spec.classify(c) else '?'} {c}" for c in spec.couplings],
    }


def cmd_inspect(args) -> int:
    path = Path(args.path)
    spec = read_model(path)
    info = {"file": str(path), "dialect": detect_dialect(path.read_bytes()).value, **_describe(spec)}
    if isinstance(spec, CoupledSpec) and args.tree:
        reg = load_model_tree(path, args.dir)
        info["tree"] = reg.reachable(reg.root)
    if args.json:
        print(json.dumps(info, indent=2))
    else:
        for key, value in info.items():
            if isinstance(value, list):
                value = ", ".join(map(str, value)) if key != "couplings" else "\n  " + "\n  ".join(value)
            print(f"{key}: {value}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fddevs", description="FD-DEVS model tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an atomic or coupled XML document")
    p.add_argument("path")
    p.add_argument("--kind", choices=("atomic", "coupled", "auto"), default="auto")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="run a model tree and write its trace")
    p.add_argument("root_file")
    p.add_argument("--dir", help="directory holding child model files")
    p.add_argument("--until", type=float, required=True, help="end time")
    p.add_argument("--trace", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--out", help="trace file (default: standard output)")
    p.add_argument("--seedless", action="store_true", help="accepted for scripts; the engine is deterministic")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("transform", help="convert between SCXML, XMI and DEVS XML")
    p.add_argument("--from", dest="source", choices=("scxml", "xmi", "devs"), required=True)
    p.add_argument("--to", dest="target", choices=("devs", "xmi"), required=True)
    p.add_argument("input")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("flatten", help="collapse a hierarchy into one coupled model")
    p.add_argument("root_file")
    p.add_argument("--dir")
    p.add_argument("--out", required=True, help="flat coupled model file; atomic files go beside it")
    p.set_defaults(func=cmd_flatten)

    p = sub.add_parser("inspect", help="summarize a model file")
    p.add_argument("path")
    p.add_argument("--tree", action="store_true", help="also list every model reachable from a coupled file")
    p.add_argument("--dir")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationFailed as exc:
        for v in exc.violations:
            print(f"error: {exc.context}: {v}" if exc.context else f"error: {v}", file=sys.stderr)
        return 1
    except (FddevsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
