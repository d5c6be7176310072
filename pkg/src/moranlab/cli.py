"""Command-line surface: estimate, exact, bounds, simulate, couple.

Every invocation prints a single JSON object (or --format text) whose
"manifest" entry records the subcommand, all flags, input-file hashes,
seed, and tool version; re-running a manifest's flags reproduces the
output bit for bit. All randomness flows from --seed, which is required
on randomised subcommands rather than defaulting to entropy.

Exit codes: 0 success, 2 configuration error, 3 input parse error,
4 state space over the cap.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys

from . import __version__
from .bounds import (
    absorption_time_bounds,
    complete_graph_sandwich,
    fittest_type_absorption_bound,
    fixation_lower_bound,
)
from .continuous import coupled_run
from .errors import ConfigurationError, InputFormatError
from .fitness import TypeSystemError
from .estimator import (
    EstimatorConfig,
    estimate_fixation_probability,
    plain_monte_carlo,
)
from .exact import (
    DEFAULT_STATE_CAP,
    StateSpaceTooLargeError,
    distribution_average,
    expected_absorption_under,
    solve,
)
from .fitness import parse_types
from .graphs import parse_graph
from .initial import InitialDistribution, sample
from .process import run_to_absorption
from .rng import stream
from .state import State

CAP_ENV_VAR = "MORAN_LAB_CAP"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_TOO_LARGE = 4


def _sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _load_graph(path: str):
    with open(path) as fh:
        return parse_graph(fh.read())


def _load_types(path: str):
    with open(path) as fh:
        return parse_types(fh.read())


def _parse_dist(value: str) -> tuple[InitialDistribution, str | None]:
    if value == "mut":
        return InitialDistribution.mut(), None
    if value.startswith("list:"):
        path = value[len("list:"):]
        return InitialDistribution.from_file(path), path
    raise ConfigurationError(f"--dist must be 'mut' or 'list:<path>', got {value!r}")


def _name_to_index(ts, name: str) -> int:
    try:
        return ts.index_of(name)
    except TypeSystemError:
        # the document parsed fine; the flag value is what is wrong
        raise ConfigurationError(f"unknown type name {name!r}")


def _resolve_alpha(ts, name: str | None, *, require_max: bool) -> int:
    if name is not None:
        alpha = _name_to_index(ts, name)
    elif ts.alpha is not None:
        alpha = ts.alpha
    else:
        raise ConfigurationError(
            "no focal type: pass --alpha or declare one in the types document"
        )
    if require_max and alpha not in ts.fittest_types:
        raise ConfigurationError(
            f"focal type {ts.names[alpha]!r} does not have maximum fitness"
        )
    return alpha


def _manifest(args, subcommand: str, inputs: dict[str, str]) -> dict:
    flags = {
        k: v for k, v in vars(args).items()
        if k not in ("func", "manifest_path") and v is not None
    }
    return {
        "tool": "moranlab",
        "version": __version__,
        "subcommand": subcommand,
        "flags": flags,
        "inputs": {path: _sha256_file(path) for path in inputs.values() if path},
        "masterSeed": getattr(args, "seed", None),
    }


def _render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}{k}:")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return "\n".join(lines)


def _emit(result: dict, args) -> None:
    if getattr(args, "format", "json") == "text":
        print(_render_text(result))
    else:
        print(json.dumps(result, indent=2, sort_keys=True))
    manifest_path = getattr(args, "manifest_path", None)
    if manifest_path:
        with open(manifest_path, "w") as fh:
            json.dump(result["manifest"], fh, indent=2, sort_keys=True)


def _state_cap(args) -> int:
    if getattr(args, "cap", None) is not None:
        return args.cap
    env = os.environ.get(CAP_ENV_VAR)
    if env:
        return int(env)
    return DEFAULT_STATE_CAP


def cmd_estimate(args) -> dict:
    graph = _load_graph(args.graph)
    ts = _load_types(args.types)
    dist, dist_path = _parse_dist(args.dist)
    alpha = _resolve_alpha(ts, args.alpha, require_max=True)
    manifest = _manifest(
        args, "estimate",
        {"graph": args.graph, "types": args.types, "dist": dist_path},
    )
    if args.mode == "plain":
        result = plain_monte_carlo(
            graph, ts, alpha, dist, args.replicates, args.seed,
            threads=args.threads,
        ).to_json_dict()
    else:
        config = EstimatorConfig(
            eps=args.eps,
            delta=args.delta,
            delta_prime=args.delta_prime,
            master_seed=args.seed,
            budget_multiplier=args.budget_multiplier,
            threads=args.threads,
        )
        result = estimate_fixation_probability(
            graph, ts, alpha, dist, config
        ).to_json_dict()
    result["manifest"] = manifest
    return result


def cmd_exact(args) -> dict:
    graph = _load_graph(args.graph)
    ts = _load_types(args.types)
    sol = solve(graph, ts, cap=_state_cap(args), method=args.method)
    manifest = _manifest(args, "exact", {"graph": args.graph, "types": args.types})

    def fmt(x):
        return str(x) if sol.rational else float(x)

    pi = {
        str(idx): [fmt(v) for v in sol.pi[idx]] for idx in range(sol.num_states)
    }
    absorption = {str(idx): fmt(sol.absorption[idx]) for idx in range(sol.num_states)}
    result = {
        "fingerprint": sol.fingerprint,
        "states": sol.num_states,
        "typeNames": list(ts.names),
        "pi": pi,
        "absorption": absorption,
        "manifest": manifest,
    }
    if args.dist:
        dist, dist_path = _parse_dist(args.dist)
        avg = distribution_average(sol, dist)
        result["distribution"] = {
            "kind": dist.kind,
            "pi": [fmt(v) for v in avg],
            "expectedAbsorption": fmt(expected_absorption_under(sol, dist)),
        }
        if dist_path:
            manifest["inputs"][dist_path] = _sha256_file(dist_path)
    return result


def cmd_bounds(args) -> dict:
    graph = _load_graph(args.graph)
    ts = _load_types(args.types)
    manifest = _manifest(args, "bounds", {"graph": args.graph, "types": args.types})
    reports = [
        {
            "quantity": "fixation_probability_of_fittest",
            "value": str(fixation_lower_bound(graph.n)),
            "value_float": float(fixation_lower_bound(graph.n)),
            "direction": "lower",
            "inputs": f"n={graph.n}",
        }
    ]
    alpha = None
    if args.alpha is not None or ts.alpha is not None:
        alpha = _resolve_alpha(ts, args.alpha, require_max=False)
    if ts.k >= 2:
        reports.extend(r.to_json_dict() for r in absorption_time_bounds(graph, ts))
        if alpha is not None and alpha in ts.fittest_types:
            value = fittest_type_absorption_bound(graph, ts, alpha)
            reports.append(
                {
                    "quantity": f"stopped_steps[{ts.names[alpha]}]",
                    "value": str(value),
                    "value_float": float(value),
                    "direction": "upper",
                    "inputs": f"n={graph.n};{ts.fingerprint()}",
                }
            )
    if args.sandwich_i is not None:
        if not graph.is_complete():
            raise ConfigurationError("--sandwich-i needs a complete graph")
        if alpha is None:
            raise ConfigurationError("--sandwich-i needs a focal type")
        low, high = complete_graph_sandwich(ts, alpha, graph.n, args.sandwich_i)
        for value, direction in ((low, "lower"), (high, "upper")):
            reports.append(
                {
                    "quantity": f"fixation_from_{args.sandwich_i}_vertices",
                    "value": str(value),
                    "value_float": float(value),
                    "direction": direction,
                    "inputs": f"n={graph.n};i={args.sandwich_i};{ts.fingerprint()}",
                }
            )
    return {"bounds": reports, "manifest": manifest}


def cmd_simulate(args) -> dict:
    graph = _load_graph(args.graph)
    ts = _load_types(args.types)
    dist, dist_path = _parse_dist(args.dist)
    mode = args.mode
    alpha = None
    if mode == "alpha":
        alpha = _resolve_alpha(ts, args.alpha, require_max=False)
    manifest = _manifest(
        args, "simulate",
        {"graph": args.graph, "types": args.types, "dist": dist_path},
    )
    if args.record and args.replicates != 1:
        raise ConfigurationError("--record needs --replicates 1")
    records = []
    trajectory: list | None = [] if args.record else None
    for i in range(args.replicates):
        rng = stream(args.seed, 0, i)
        m0 = sample(dist, graph, ts, rng)
        rec = run_to_absorption(
            m0, args.max_steps, rng, mode=mode, alpha=alpha,
            seed_key=(0, i), record=trajectory,
        )
        records.append(rec.to_json_dict(i, ts))
    if args.record:
        with open(args.record, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "v", "w"] + [f"count_{t}" for t in ts.names])
            for step_no, v, w, counts in trajectory:
                writer.writerow([step_no, v, w, *counts])
    if args.records_jsonl:
        with open(args.records_jsonl, "w") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    fixated = sum(1 for r in records if r["outcome"] == "fixated")
    truncated = sum(1 for r in records if r["outcome"] == "truncated")
    return {
        "records": records,
        "summary": {
            "replicates": args.replicates,
            "fixated": fixated,
            "truncated": truncated,
            "meanSteps": sum(r["steps"] for r in records) / len(records),
        },
        "manifest": manifest,
    }


def _parse_state(graph, ts, text: str) -> State:
    names = [part.strip() for part in text.split(",")]
    if len(names) != graph.n:
        raise ConfigurationError(
            f"state has {len(names)} entries for {graph.n} vertices"
        )
    return State.from_assignment(graph, ts, [_name_to_index(ts, nm) for nm in names])


def cmd_couple(args) -> dict:
    graph = _load_graph(args.graph)
    ts = _load_types(args.types)
    ts_prime = _load_types(args.types_prime)
    alpha = _resolve_alpha(ts, args.alpha, require_max=False)
    first = _parse_state(graph, ts, args.init)
    second = _parse_state(graph, ts_prime, args.init_prime)
    manifest = _manifest(
        args, "couple",
        {"graph": args.graph, "types": args.types, "types_prime": args.types_prime},
    )
    rng = stream(args.seed, 0)
    result = coupled_run(
        first, second, alpha, args.events, rng,
        record=bool(args.record_events),
        settle_short_circuit=not args.no_settle,
    )
    if args.record_events:
        with open(args.record_events, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["event", "time", "case", "v", "w"])
            for ev in result.events:
                writer.writerow([ev.index, f"{ev.time!r}", ev.case, ev.v, ev.w])
    return {
        "violated": result.violated,
        "violationIndex": result.violation_index,
        "eventsRun": result.events_run,
        "settledAt": result.settled_at,
        "finalFirst": [ts.names[t] for t in result.final_first],
        "finalSecond": [ts_prime.names[t] for t in result.final_second],
        "manifest": manifest,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moranlab",
        description="Multi-type Moran process toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, seed_required: bool):
        p.add_argument("--graph", required=True, help="edge-list file")
        p.add_argument("--types", required=True, help="type/fitness JSON file")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--manifest", dest="manifest_path", default=None,
                       help="also write the manifest to this path")
        if seed_required:
            p.add_argument("--seed", type=int, required=True,
                           help="master seed; all randomness derives from it")

    p = sub.add_parser("estimate", help="randomised fixation-probability estimate")
    common(p, seed_required=True)
    p.add_argument("--alpha", default=None, help="focal type name")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--delta-prime", type=float, default=0.125)
    p.add_argument("--dist", default="mut", help="mut | list:<path>")
    p.add_argument("--budget-multiplier", type=int, default=8)
    p.add_argument("--mode", choices=("fptras", "plain"), default="fptras")
    p.add_argument("--replicates", type=int, default=None,
                   help="replicates for --mode plain")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("exact", help="exact solve of the full chain")
    common(p, seed_required=False)
    p.add_argument("--dist", default=None, help="mut | list:<path>")
    p.add_argument("--cap", type=int, default=None,
                   help=f"state-count cap (default {DEFAULT_STATE_CAP}; "
                        f"env {CAP_ENV_VAR} overrides)")
    p.add_argument("--method", choices=("rational", "float"), default="rational")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("bounds", help="closed-form bound report")
    common(p, seed_required=False)
    p.add_argument("--alpha", default=None)
    p.add_argument("--sandwich-i", type=int, default=None,
                   help="focal-vertex count for complete-graph sandwich bounds")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="run replicates to absorption")
    common(p, seed_required=True)
    p.add_argument("--alpha", default=None)
    p.add_argument("--dist", default="mut", help="mut | list:<path>")
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--mode", choices=("full", "alpha"), default="full")
    p.add_argument("--record", default=None,
                   help="trajectory CSV (single replicate only)")
    p.add_argument("--records-jsonl", default=None,
                   help="write absorption records as JSON lines")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("couple", help="coupled two-chain run")
    common(p, seed_required=True)
    p.add_argument("--types-prime", required=True,
                   help="second chain's type/fitness JSON file")
    p.add_argument("--alpha", required=True)
    p.add_argument("--init", required=True,
                   help="first chain start state: comma-separated type names")
    p.add_argument("--init-prime", required=True)
    p.add_argument("--events", type=int, default=10000)
    p.add_argument("--record-events", default=None, help="event-log CSV path")
    p.add_argument("--no-settle", action="store_true",
                   help="run the full horizon even after both chains fixate")
    p.set_defaults(func=cmd_couple)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except StateSpaceTooLargeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except InputFormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    _emit(result, args)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
