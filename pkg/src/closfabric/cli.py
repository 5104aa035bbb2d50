"""Command-line front end: complexity tables, analytic blocking values,
simulation runs/sweeps, and Spine-Leaf topology dumps.

Scenario files are flat `key = value` text; unknown or duplicate keys are
rejected so a typo fails loudly instead of silently simulating the wrong
experiment.  Subcommand arguments may be given either as flags
(`--d 10`) or as `d=10` tokens.  All result output on stdout is CSV or
JSON; diagnostics go to stderr.  Exit codes: 0 success, 2 usage or
config error, 3 runtime failure.

The simulate CSV stream is byte-reproducible for a fixed config and
seed; its wall_seconds column is therefore left empty, and measured wall
time is reported in the JSON format only.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional, Sequence, TextIO

from . import __version__
from .dcn import (
    MulticastRequest,
    SpineKind,
    admit_multicast,
    build_spine_leaf,
    fold_clos,
    ring_adjacency,
    substitute_spine,
)
from .errors import (
    IndexOutOfRange,
    InvalidConfig,
    InvalidInput,
    InvalidRequest,
    InvalidSpec,
)
from .fabric import Fabric, FabricKind, FabricSpec, MiddleKind
from .sim import SimConfig, SimStats, run, sweep
from .theory import compare_complexity, erlang_b, theoretical_limit
from .admission import Policy

SIMULATE_CSV_COLUMNS = [
    "arch",
    "middle",
    "d",
    "l",
    "m",
    "w",
    "load",
    "policy",
    "seed",
    "arrivals",
    "blocked",
    "blocking_prob",
    "ci_lo",
    "ci_hi",
    "rng_name",
    "wall_seconds",
]

COMPLEXITY_CSV_COLUMNS = [
    "d",
    "l",
    "m",
    "spanke_elements",
    "clos_elements",
    "spanke_fibers",
    "clos_fibers",
    "element_savings",
    "fiber_savings",
]

THEORY_CSV_COLUMNS = ["rho", "w", "erlang_b", "input_blocking", "output_blocking", "limit"]

_SCENARIO_KEYS = {
    "arch",
    "middle",
    "d",
    "l",
    "m",
    "w",
    "load",
    "arrivals",
    "seed",
    "policy",
    "sweep.param",
    "sweep.values",
    "dcn.substitute",
    "dcn.multicast",
}


# -- scenario files ---------------------------------------------------------


def parse_scenario_text(text: str) -> dict[str, str]:
    """Parse a flat key/value document; strict about keys and duplicates."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfig(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _SCENARIO_KEYS:
            raise InvalidConfig(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise InvalidConfig(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise InvalidConfig(f"line {lineno}: empty value for {key!r}")
        values[key] = value
    return values


def _parse_int(raw: dict[str, str], key: str) -> int:
    try:
        return int(raw[key])
    except ValueError:
        raise InvalidConfig(f"key {key!r}: expected integer, got {raw[key]!r}") from None


def _parse_float(raw: dict[str, str], key: str) -> float:
    try:
        return float(raw[key])
    except ValueError:
        raise InvalidConfig(f"key {key!r}: expected number, got {raw[key]!r}") from None


def _require(raw: dict[str, str], keys: Sequence[str], context: str) -> None:
    missing = [k for k in keys if k not in raw]
    if missing:
        raise InvalidConfig(f"{context}: missing required keys {missing}")


def _forbid(raw: dict[str, str], keys: Sequence[str], context: str) -> None:
    extra = [k for k in keys if k in raw]
    if extra:
        raise InvalidConfig(f"{context}: keys {extra} are not applicable")


def _fabric_spec_from(raw: dict[str, str]) -> FabricSpec:
    arch = raw["arch"]
    if arch == "spanke":
        _forbid(raw, ["m", "middle"], "arch=spanke")
        return FabricSpec.spanke(
            d=_parse_int(raw, "d"), l=_parse_int(raw, "l"), w=_parse_int(raw, "w")
        )
    if arch == "clos":
        _require(raw, ["m", "middle"], "arch=clos")
        try:
            middle = MiddleKind(raw["middle"])
        except ValueError:
            raise InvalidConfig(f"unknown middle kind {raw['middle']!r}") from None
        return FabricSpec.clos(
            d=_parse_int(raw, "d"),
            l=_parse_int(raw, "l"),
            m=_parse_int(raw, "m"),
            w=_parse_int(raw, "w"),
            middle_kind=middle,
        )
    raise InvalidConfig(f"arch must be 'spanke' or 'clos', got {arch!r}")


def sim_config_from_scenario(raw: dict[str, str]) -> tuple[SimConfig, Optional[str], list]:
    """Build a SimConfig plus optional (sweep_param, sweep_values)."""
    _forbid(raw, ["dcn.substitute", "dcn.multicast"], "simulate")
    _require(raw, ["arch", "d", "l", "w", "load", "arrivals", "seed"], "simulate")
    spec = _fabric_spec_from(raw)
    policy_name = raw.get("policy", "first-fit")
    try:
        policy = Policy(policy_name)
    except ValueError:
        raise InvalidConfig(f"unknown policy {policy_name!r}") from None
    config = SimConfig(
        fabric=spec,
        load_per_fiber=_parse_float(raw, "load"),
        arrivals=_parse_int(raw, "arrivals"),
        seed=_parse_int(raw, "seed"),
        policy=policy,
    )
    if ("sweep.param" in raw) != ("sweep.values" in raw):
        raise InvalidConfig("sweep.param and sweep.values must appear together")
    if "sweep.param" not in raw:
        return config, None, []
    param = raw["sweep.param"]
    tokens = [t.strip() for t in raw["sweep.values"].split(",") if t.strip()]
    if not tokens:
        raise InvalidConfig("sweep.values is empty")
    values: list
    if param == "m":
        values = [int(t) for t in tokens]
    elif param == "load":
        values = [float(t) for t in tokens]
    elif param in ("arch", "middle", "middle_kind"):
        values = tokens
    else:
        raise InvalidConfig(f"unknown sweep.param {param!r}")
    return config, param, values


# -- output helpers ---------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def stats_to_row(stats: SimStats) -> dict[str, object]:
    spec = stats.spec
    return {
        "arch": spec.kind.value,
        "middle": spec.middle_kind.value if spec.middle_kind else "",
        "d": spec.d,
        "l": spec.l,
        "m": spec.m,
        "w": spec.w,
        "load": stats.load_per_fiber,
        "policy": stats.policy.value,
        "seed": stats.seed,
        "arrivals": stats.arrivals,
        "blocked": stats.blocked,
        "blocking_prob": stats.blocking_prob,
        "ci_lo": stats.ci_lo,
        "ci_hi": stats.ci_hi,
        "rng_name": stats.rng_name,
        "wall_seconds": stats.wall_seconds,
    }


def write_csv(rows: list[dict], columns: list[str], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])


def read_results_csv(stream: TextIO) -> list[dict[str, str]]:
    """The tool's own CSV reader; round-trips anything write_csv emits."""
    return list(csv.DictReader(stream))


def _json_payload(rows: list[dict], config_echo: Optional[dict[str, str]]) -> dict:
    header: dict[str, object] = {"tool": "closfabric", "version": __version__}
    if config_echo is not None:
        header["config"] = config_echo
    return {"header": header, "rows": rows}


def fabric_topology_dump(fabric: Fabric) -> dict:
    """JSON-able dump of a fabric: element roster, fiber list, occupancy."""
    spec = fabric.spec
    return {
        "spec": {
            "kind": spec.kind.value,
            "d": spec.d,
            "l": spec.l,
            "m": spec.m,
            "w": spec.w,
            "middle": spec.middle_kind.value if spec.middle_kind else None,
        },
        "elements": [
            {"stage": e.stage.value, "index": e.index, "rows": e.rows, "cols": e.cols}
            for e in fabric.elements
        ],
        "fibers": [str(ref) for ref in fabric.fiber_refs()],
        "occupancy": {
            f"{ref}@{w}": cid for (ref, w), cid in sorted(
                fabric.occupied_slots().items(), key=lambda kv: (str(kv[0][0]), kv[0][1])
            )
        },
    }


# -- subcommands ------------------------------------------------------------


def _open_out(path: Optional[str]) -> TextIO:
    if path is None or path == "-":
        return sys.stdout
    return open(path, "w", newline="")


def _emit(rows: list[dict], columns: list[str], args, config_echo=None) -> None:
    out = _open_out(args.out)
    try:
        if args.format == "json":
            json.dump(_json_payload(rows, config_echo), out, indent=2)
            out.write("\n")
        else:
            write_csv(rows, columns, out)
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_complexity(args) -> int:
    report = compare_complexity(args.d, args.l, args.m)
    row = {c: getattr(report, c) for c in COMPLEXITY_CSV_COLUMNS}
    _emit([row], COMPLEXITY_CSV_COLUMNS, args)
    return 0


def cmd_theory(args) -> int:
    limit = theoretical_limit(args.rho, args.w)
    row = {
        "rho": args.rho,
        "w": args.w,
        "erlang_b": erlang_b(args.rho, args.w),
        "input_blocking": limit.input_blocking,
        "output_blocking": limit.output_blocking,
        "limit": limit.value,
    }
    _emit([row], THEORY_CSV_COLUMNS, args)
    return 0


def cmd_simulate(args) -> int:
    with open(args.config) as fh:
        raw = parse_scenario_text(fh.read())
    if args.seed is not None:
        raw["seed"] = str(args.seed)
    config, param, values = sim_config_from_scenario(raw)
    if param is None:
        results = [run(config)]
    else:
        results = sweep(config, param, values)
    rows = [stats_to_row(s) for s in results]
    if args.format == "csv":
        # Wall time is timing noise; blank it so identical configs give
        # byte-identical CSV.  JSON keeps the measurement.
        for row in rows:
            row["wall_seconds"] = ""
    _emit(rows, SIMULATE_CSV_COLUMNS, args, config_echo=raw)
    return 0


def _parse_substitutions(raw_value: str) -> list[tuple[int, SpineKind]]:
    subs = []
    for token in raw_value.split(","):
        token = token.strip()
        if not token:
            continue
        index_text, _, kind_text = token.partition(":")
        try:
            index = int(index_text)
        except ValueError:
            raise InvalidConfig(f"bad substitution index in {token!r}") from None
        if kind_text == "splitter":
            kind = SpineKind.SPLITTER
        elif kind_text == "ring":
            kind = SpineKind.DIRECT_RING
        else:
            raise InvalidConfig(f"bad substitution kind in {token!r}")
        subs.append((index, kind))
    return subs


def _parse_multicast(raw_value: str) -> list[MulticastRequest]:
    def endpoint(text: str) -> tuple[int, int]:
        leaf_text, _, port_text = text.strip().partition(".")
        try:
            return int(leaf_text), int(port_text)
        except ValueError:
            raise InvalidConfig(f"bad multicast endpoint {text!r}") from None

    requests = []
    for token in raw_value.split(";"):
        token = token.strip()
        if not token:
            continue
        src_text, sep, dst_text = token.partition("->")
        if not sep:
            raise InvalidConfig(f"bad multicast request {token!r}")
        src_leaf, src_port = endpoint(src_text)
        dst = tuple(endpoint(t) for t in dst_text.split(",") if t.strip())
        requests.append(MulticastRequest(src_leaf=src_leaf, src_port=src_port, dst=dst))
    return requests


def cmd_dcn(args) -> int:
    with open(args.config) as fh:
        raw = parse_scenario_text(fh.read())
    _forbid(
        raw,
        ["load", "arrivals", "policy", "sweep.param", "sweep.values", "seed"],
        "dcn",
    )
    _require(raw, ["arch"], "dcn")
    if raw["arch"] != "clos":
        raise InvalidConfig("dcn needs arch = clos")
    spec = fold_clos(_fabric_spec_from(raw))
    for index, kind in _parse_substitutions(raw.get("dcn.substitute", "")):
        spec = substitute_spine(spec, index, kind)

    spines = []
    for s, kind in enumerate(spec.spines):
        entry: dict[str, object] = {"index": s, "kind": kind.value}
        if kind is SpineKind.DIRECT_RING:
            entry["adjacency"] = [list(pair) for pair in ring_adjacency(spec.leaves)]
        else:
            entry["rows"] = spec.leaves
            entry["cols"] = spec.leaves
        spines.append(entry)
    topology = {
        "leaves": spec.leaves,
        "leaf_size": spec.leaf_size,
        "host_ports": spec.host_ports,
        "w": spec.w,
        "spines": spines,
    }

    multicast_rows = []
    requests = _parse_multicast(raw.get("dcn.multicast", ""))
    if requests:
        fabric = build_spine_leaf(spec)
        for request in requests:
            connection = admit_multicast(fabric, request)
            multicast_rows.append(
                {
                    "src_leaf": request.src_leaf,
                    "src_port": request.src_port,
                    "dst": [list(pair) for pair in request.dst],
                    "admitted": connection is not None,
                    "wavelength": connection.wavelength if connection else None,
                    "splitter": connection.splitter if connection else None,
                }
            )

    payload = {
        "header": {"tool": "closfabric", "version": __version__, "config": raw},
        "topology": topology,
        "multicast": multicast_rows,
    }
    out = _open_out(args.out)
    try:
        json.dump(payload, out, indent=2)
        out.write("\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# -- argument plumbing --------------------------------------------------------


def _normalize_tokens(argv: list[str]) -> list[str]:
    """Allow `d=10`-style tokens as a shorthand for `--d 10`."""
    out = []
    for token in argv:
        if "=" in token and not token.startswith("-"):
            key, _, value = token.partition("=")
            if key.replace("_", "").replace(".", "").isalnum():
                out.extend([f"--{key}", value])
                continue
        out.append(token)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="closfabric",
        description="Switching-fabric complexity, blocking theory, and simulation",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", help="write results to this path instead of stdout")
        p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("complexity", help="Spanke vs Clos element/fiber counts")
    p.add_argument("--d", type=int, required=True, help="directional degrees")
    p.add_argument("--l", type=int, required=True, help="fiber degrees per direction")
    p.add_argument("--m", type=int, required=True, help="Clos middle elements")
    add_output_flags(p)
    p.set_defaults(handler=cmd_complexity)

    p = sub.add_parser("theory", help="Erlang-B and the port-limited blocking floor")
    p.add_argument("--rho", type=float, required=True, help="offered load per fiber")
    p.add_argument("--w", type=int, required=True, help="wavelengths per fiber")
    add_output_flags(p)
    p.set_defaults(handler=cmd_theory)

    p = sub.add_parser("simulate", help="run or sweep a blocking simulation")
    p.add_argument("--config", required=True, help="scenario file path")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    add_output_flags(p)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("dcn", help="fold a Clos spec into a Spine-Leaf topology")
    p.add_argument("--config", required=True, help="scenario file path")
    p.add_argument("--out", help="write results to this path instead of stdout")
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(handler=cmd_dcn)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(_normalize_tokens(list(argv)))
    try:
        return args.handler(args)
    except (InvalidConfig, InvalidSpec, InvalidInput, InvalidRequest, IndexOutOfRange, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
