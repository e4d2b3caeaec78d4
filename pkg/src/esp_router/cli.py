"""Command line front end: ``esp-router <command> ...``.

Exit codes: 0 success, 1 internal error, 2 bad usage or input.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import asdict
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from .adder import gen_cuccaro_adder
from .circuit import Circuit, CircuitError
from .device import BUNDLED, DeviceError, DeviceModel, bundled_device, esp_circuit, load_device_file
from .evaluator import (EvaluationError, format_records, ideal_distribution, run_experiment,
                        write_distribution_csv)
from .mapper import (CompiledCircuit, CompilerConfig, MappingError, compile_beam, compile_random,
                     verify_compiled, write_compiled)
from .qasm import CircuitSyntaxError, emit_circuit, parse_circuit
from .remote_cnot import MAX_HOPS, TemplateError, candidate_set, format_table, templates_for_path, verify_template

log = logging.getLogger("esp_router")


class UsageError(Exception):
    pass


INPUT_ERRORS = (UsageError, CircuitError, CircuitSyntaxError, DeviceError, MappingError,
                EvaluationError, TemplateError, OSError, ValueError)


def tool_version() -> str:
    try:
        return version("esp-router")
    except PackageNotFoundError:
        return "unknown"


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_device_arg(spec: str) -> tuple[DeviceModel, str | None]:
    """A device file path, or the name of a bundled device."""
    p = Path(spec)
    if p.is_file():
        return load_device_file(p), str(p)
    if spec in BUNDLED:
        return bundled_device(spec), None
    raise UsageError(f"device {spec!r} is neither a file nor one of {', '.join(BUNDLED)}")


def load_circuit_arg(path: str) -> Circuit:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"circuit file {path!r} not found")
    return parse_circuit(p.read_text(encoding="utf-8"))


def write_manifest(path, args, inputs: dict, started: float) -> None:
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    doc = {
        "command": args.command,
        "flags": flags,
        "seed": flags.get("seed"),
        "inputs": {name: _sha256(p) for name, p in inputs.items() if p},
        "version": tool_version(),
        "wall_time": round(time.perf_counter() - started, 6),
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def load_compiled(qasm_path) -> CompiledCircuit:
    """Read a compiled circuit and its JSON sidecar (same stem)."""
    qasm_path = Path(qasm_path)
    side = qasm_path.with_suffix(".json")
    if not side.is_file():
        raise UsageError(f"missing sidecar report {side}")
    report = json.loads(side.read_text(encoding="utf-8"))
    circ = parse_circuit(qasm_path.read_text(encoding="utf-8"))
    return CompiledCircuit(circ.gates, float(report["esp"]), tuple(report["initial_mapping"]),
                           tuple(report["final_mapping"]), circ.num_vars,
                           {"compiler": report.get("strategy", "unknown")})


# ---------------------------------------------------------------- commands


def cmd_compile(args) -> int:
    started = time.perf_counter()
    circ = load_circuit_arg(args.circuit)
    dev, dev_path = load_device_arg(args.device)
    if args.strategy == "random":
        out = compile_random(circ, dev, seed=args.seed)
        config = {"strategy": "random"}
    else:
        cfg = CompilerConfig(args.beam_width, args.random_mappings, args.seed, not args.no_gce)
        out = compile_beam(circ, dev, cfg)
        config = {"strategy": "beam", **asdict(cfg)}
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    name = args.name or f"{Path(args.circuit).stem}-{args.strategy}-s{args.seed}"
    extra = {"seed": args.seed, "config": config, "strategy": args.strategy, "device": dev.name,
             "seconds": round(out.stats.get("seconds", 0.0), 6)}
    qasm_path, report_path = write_compiled(out, outdir / name, extra)
    write_manifest(outdir / f"{name}.manifest.json", args,
                   {"circuit": args.circuit, "device": dev_path}, started)
    print(f"{qasm_path}: gate_count={out.gate_count} esp={out.esp:.6f}")
    return 0


def cmd_gen_adder(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    text = emit_circuit(gen_cuccaro_adder(args.n, hadamards=not args.no_hadamards))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_select_circuit(args) -> int:
    dev, _ = load_device_arg(args.device)
    for q in (args.control, args.target):
        if not 0 <= q < dev.num_qubits:
            raise UsageError(f"qubit {q} is not on {dev.name}")
    if args.control == args.target:
        raise UsageError("control and target must differ")
    cs = candidate_set(dev, args.control, args.target, args.max_hops)
    if not len(cs):
        print(f"no candidates between {args.control} and {args.target} within {args.max_hops} hops")
        return 0
    print(format_table(cs))
    return 0


def cmd_evaluate(args) -> int:
    started = time.perf_counter()
    if args.shots < 1:
        raise UsageError("--shots must be at least 1")
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    dev, dev_path = load_device_arg(args.device)
    src = Path(args.compiled)
    files = sorted(src.glob("*.qasm")) if src.is_dir() else [src]
    if not files or not all(f.is_file() for f in files):
        raise UsageError(f"no compiled circuits found at {src}")
    items = []
    for f in files:
        comp = load_compiled(f)
        comp = CompiledCircuit(comp.gates, esp_circuit(dev, comp.placed()), comp.initial_mapping,
                               comp.final_mapping, comp.num_qubits, comp.stats)
        items.append((f.stem, comp.stats["compiler"], comp))
    records, corr = run_experiment(items, dev, args.runs, args.shots, args.seed, args.threads)
    outdir = Path(args.out) if args.out else (src if src.is_dir() else src.parent)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "experiment.tsv").write_text(format_records(records, corr), encoding="utf-8")
    for cid, _, comp in items:
        write_distribution_csv(ideal_distribution(comp), outdir / f"{cid}.ideal.csv")
    write_manifest(outdir / "experiment.manifest.json", args, {"device": dev_path}, started)
    sys.stdout.write(format_records(records, corr))
    return 0


def cmd_verify(args) -> int:
    ok = True
    if args.templates:
        path = tuple(range(args.max_hops + 1))
        for hops in range(1, args.max_hops + 1):
            for t in templates_for_path(path[:hops + 1]):
                res = verify_template(t)
                ok &= res.passed
                print(f"{hops}-hop {res}")
    if args.circuit or args.compiled:
        if not (args.circuit and args.compiled):
            raise UsageError("--circuit and --compiled go together")
        res = verify_compiled(load_circuit_arg(args.circuit), load_compiled(args.compiled))
        ok &= res.passed
        print(f"{args.compiled}: {'pass' if res.passed else 'FAIL'} "
              f"(max deviation {res.max_deviation:.3g}) {res.message}".rstrip())
    if not (args.templates or args.circuit or args.compiled):
        raise UsageError("nothing to verify; pass --templates or --circuit/--compiled")
    return 0 if ok else 1


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="esp-router", description="ESP-aware qubit mapping and routing")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="map and route a circuit onto a device")
    c.add_argument("--circuit", required=True)
    c.add_argument("--device", required=True, help="device file or bundled name")
    c.add_argument("--beam-width", type=int, default=10000)
    c.add_argument("--random-mappings", type=int, default=1000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--strategy", choices=("beam", "random"), default="beam")
    c.add_argument("--no-gce", action="store_true", help="skip the greedy initial mapping")
    c.add_argument("--out", default=".", help="output directory")
    c.add_argument("--name", help="output file stem")
    c.add_argument("--threads", type=int, default=1)
    c.set_defaults(func=cmd_compile)

    g = sub.add_parser("gen-adder", help="write the adder testbench circuit")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--no-hadamards", action="store_true")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_adder)

    s = sub.add_parser("select-circuit", help="rank remote-CNOT realizations by ESP")
    s.add_argument("--device", required=True)
    s.add_argument("--control", type=int, required=True)
    s.add_argument("--target", type=int, required=True)
    s.add_argument("--max-hops", type=int, default=2, choices=range(1, MAX_HOPS + 1))
    s.set_defaults(func=cmd_select_circuit)

    e = sub.add_parser("evaluate", help="simulate compiled circuits and score them by KL divergence")
    e.add_argument("--compiled", required=True, help="directory of compiled .qasm files, or one file")
    e.add_argument("--device", required=True)
    e.add_argument("--shots", type=int, default=5000)
    e.add_argument("--runs", type=int, default=5)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", help="output directory (defaults to the input directory)")
    e.add_argument("--threads", type=int, default=1)
    e.set_defaults(func=cmd_evaluate)

    v = sub.add_parser("verify", help="check templates or a compiled circuit")
    v.add_argument("--templates", action="store_true")
    v.add_argument("--max-hops", type=int, default=MAX_HOPS, choices=range(1, MAX_HOPS + 1))
    v.add_argument("--circuit")
    v.add_argument("--compiled")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("ESP_ROUTER_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
