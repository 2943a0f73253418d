"""Command-line surface: trace tooling, offline solves, simulations, sweeps,
and ratio tables.

Exit codes: 0 success, 1 infeasible/model error, 2 I/O or config error.
Every command is deterministic for a fixed config and seed; JSON output uses
sorted keys so repeated invocations are byte-identical.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import engine, offline, ratio, segments, trace as trace_mod
from .cost import CostModel, static_benchmark
from .errors import PowerProvError
from .trace import FluidTrace


class ConfigError(Exception):
    pass


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    doc = json.loads(_read_text(path))
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return doc


def _resolve(args, config: dict, spec: dict) -> dict:
    """Merge builtin defaults, config file, and explicit CLI flags (CLI wins).

    Unknown config keys are rejected so typos fail loudly.
    """
    unknown = set(config) - set(spec)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    out = {}
    for key, default in spec.items():
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            out[key] = cli_val
        elif key in config:
            out[key] = config[key]
        else:
            out[key] = default
    return out


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _csv(rows: list[dict], columns: list[str]) -> str:
    out = io.StringIO()
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(str(row[c]) for c in columns) + "\n")
    return out.getvalue()


def _load_trace(path: str, initial_jobs=None, horizon=None):
    text = _read_text(path)
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.replace(" ", "").startswith("slot,load"):
            return trace_mod.parse_fluid_trace(text)
        break
    return trace_mod.parse_event_trace(text, initial_jobs=initial_jobs, horizon=horizon)


def _cost_model(params: dict) -> CostModel:
    if params.get("cost_model"):
        return CostModel.from_json(_read_text(params["cost_model"]))
    return CostModel(params["power"], params["beta_on"], params["beta_off"])


def _policy(params: dict, seed: int) -> engine.PolicySpec:
    return engine.PolicySpec(
        params["policy"], alpha=params["alpha"], t_wait=params.get("t_wait"), seed=seed
    )


_COST_SPEC = {"power": 1.0, "beta_on": 0.0, "beta_off": 6.0, "cost_model": None}


def _add_cost_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--power", type=float, help="energy per server per time unit")
    p.add_argument("--beta-on", dest="beta_on", type=float, help="cost of turning a server on")
    p.add_argument("--beta-off", dest="beta_off", type=float, help="cost of turning a server off")
    p.add_argument("--cost-model", dest="cost_model", help="JSON file with power/beta_on/beta_off")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="base RNG seed (default 0)")
    p.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
    p.add_argument("--config", help="JSON file supplying defaults for this subcommand")
    p.add_argument("-o", "--output", help="write output to a file instead of stdout")


# ---------------------------------------------------------------------------
# Subcommand handlers.
# ---------------------------------------------------------------------------

def cmd_synth(args) -> int:
    config = _load_config(args.config)
    spec = {
        "kind": "fluid",
        "n_slots": 1008,
        "n_jobs": 100,
        "mean_load": None,
        "target_pmr": 4.63,
        "slot_duration": 1.0,
        "sojourn": "exponential",
        "sojourn_scale": 1.0,
        "departure_identity": "fifo",
        "initial_jobs": 0,
        "seed": 0,
        "format": "csv",
        "output": None,
    }
    p = _resolve(args, config, spec)
    if p["mean_load"] is None:
        p["mean_load"] = 20.0 if p["kind"] == "fluid" else 5.0
    tr = trace_mod.synth_trace(p["kind"], p, p["seed"])
    if isinstance(tr, FluidTrace):
        _emit(trace_mod.serialize_fluid_trace(tr), p["output"])
    else:
        _emit(trace_mod.serialize_event_trace(tr), p["output"])
    return 0


def cmd_rescale(args) -> int:
    config = _load_config(args.config)
    p = _resolve(args, config, {"trace": None, "target_pmr": None, "output": None})
    if p["trace"] is None or p["target_pmr"] is None:
        raise ConfigError("rescale needs a trace path and --target-pmr")
    tr = trace_mod.parse_fluid_trace(_read_text(p["trace"]))
    out = trace_mod.rescale_pmr(tr, p["target_pmr"])
    _emit(trace_mod.serialize_fluid_trace(out), p["output"])
    return 0


def cmd_decompose(args) -> int:
    config = _load_config(args.config)
    p = _resolve(
        args,
        config,
        {"trace": None, "initial_jobs": None, "horizon": None, "format": "json", "output": None},
    )
    if p["trace"] is None:
        raise ConfigError("decompose needs a trace path")
    tr = _load_trace(p["trace"], p["initial_jobs"], p["horizon"])
    if isinstance(tr, FluidTrace):
        raise PowerProvError("decompose applies to event traces (unit steps)")
    deco = segments.decompose(trace_mod.count_function(tr))
    if p["format"] == "csv":
        rows = [
            {"start": s.start, "end": s.end, "type": s.kind.value, "anchor_level": s.anchor_level}
            for s in deco.segments
        ]
        _emit(_csv(rows, ["start", "end", "type", "anchor_level"]), p["output"])
    else:
        _emit(_json(deco.to_jsonable()), p["output"])
    return 0


def cmd_offline(args) -> int:
    config = _load_config(args.config)
    spec = {"trace": None, "initial_jobs": None, "horizon": None, "format": "json", "output": None}
    spec.update(_COST_SPEC)
    p = _resolve(args, config, spec)
    if p["trace"] is None:
        raise ConfigError("offline needs a trace path")
    m = _cost_model(p)
    tr = _load_trace(p["trace"], p["initial_jobs"], p["horizon"])
    if isinstance(tr, FluidTrace):
        total, schedule = offline.fluid_dp_oracle(tr, m)
        doc = {"schedule": schedule.to_jsonable(), "total": total}
    else:
        opt = offline.construct_optimal(trace_mod.count_function(tr), m)
        schedule = opt.schedule
        doc = opt.to_jsonable()
        doc["critical_times"] = list(opt.decomposition.critical_times)
    if p["format"] == "csv":
        rows = [{"time": 0.0, "servers": schedule.initial_value}]
        rows += [{"time": t, "servers": v} for t, v in zip(schedule.times, schedule.values)]
        _emit(_csv(rows, ["time", "servers"]), p["output"])
    else:
        _emit(_json(doc), p["output"])
    return 0


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    spec = {
        "trace": None,
        "initial_jobs": None,
        "horizon": None,
        "policy": "A1",
        "alpha": 0.0,
        "t_wait": None,
        "noise": 0.0,
        "fleet_size": None,
        "seed": 0,
        "format": "json",
        "output": None,
        "log_csv": None,
    }
    spec.update(_COST_SPEC)
    p = _resolve(args, config, spec)
    if p["trace"] is None:
        raise ConfigError("simulate needs a trace path")
    m = _cost_model(p)
    tr = _load_trace(p["trace"], p["initial_jobs"], p["horizon"])
    pol = _policy(p, p["seed"])
    look = engine.LookaheadConfig(pol.alpha, p["noise"], p["seed"])
    if isinstance(tr, FluidTrace):
        res = engine.run_discrete(tr, m, pol, look, p["fleet_size"])
    else:
        res = engine.run(tr, m, pol, look, p["fleet_size"])
    if p["log_csv"]:
        rows = [
            {"record": "assignment", "server": a.server, "what": a.job, "t0": a.assigned, "t1": a.released}
            for a in res.assignments
        ] + [
            {"record": "decision", "server": d.server, "what": d.action, "t0": d.empty_at, "t1": d.off_at}
            for d in res.decisions
        ]
        with open(p["log_csv"], "w", encoding="utf-8") as fh:
            fh.write(_csv(rows, ["record", "server", "what", "t0", "t1"]))
    doc = res.to_jsonable()
    if p["format"] == "csv":
        rows = [
            {
                "total": res.breakdown.total,
                "energy": res.breakdown.energy,
                "turn_on": res.breakdown.turn_on,
                "turn_off": res.breakdown.turn_off,
                "migrations": res.migration_count,
            }
        ]
        _emit(_csv(rows, ["total", "energy", "turn_on", "turn_off", "migrations"]), p["output"])
    else:
        _emit(_json(doc), p["output"])
    return 0


def _derived_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(tuple(int(x) for x in parts)).generate_state(1)[0])


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    spec = {
        "trace": None,
        "synth": None,  # dict of synth_trace params when no trace path is given
        "policies": ("A1", "A2", "A3", "DELAYEDOFF"),
        "alphas": None,
        "windows": None,  # slot counts; converted via delta
        "noise": (0.0,),
        "runs": 100,
        "seed": 0,
        "fleet_size": None,
        "format": "json",
        "output": None,
    }
    spec.update(_COST_SPEC)
    p = _resolve(args, config, spec)
    m = _cost_model(p)
    if p["trace"]:
        tr = _load_trace(p["trace"])
    elif p["synth"]:
        synth = dict(p["synth"])
        kind = synth.pop("kind", "fluid")
        tr = trace_mod.synth_trace(kind, synth, int(synth.pop("seed", p["seed"])))
    else:
        raise ConfigError("sweep needs a trace path or a synth spec")

    if p["alphas"] is not None:
        alphas = [float(a) for a in p["alphas"]]
    elif p["windows"] is not None:
        alphas = [float(w) / m.delta for w in p["windows"]]
    else:
        alphas = [i / 10 for i in range(11)]
    for a in alphas:
        if not 0.0 <= a <= 1.0:
            raise ConfigError(f"alpha {a} outside [0, 1] (window beyond the break-even interval)")
    noises = [float(x) for x in p["noise"]]
    policies = [str(v).upper() for v in p["policies"]]
    runs = int(p["runs"])

    if isinstance(tr, FluidTrace):
        simulate = lambda pol, look: engine.run_discrete(tr, m, pol, look, p["fleet_size"])
        a_for_static = tr
        optimal = engine.run_discrete(tr, m, engine.PolicySpec("A0"), fleet_size=p["fleet_size"]).breakdown.total
    else:
        simulate = lambda pol, look: engine.run(tr, m, pol, look, p["fleet_size"])
        a_for_static = trace_mod.count_function(tr)
        optimal = offline.construct_optimal(a_for_static, m).total
    static = static_benchmark(a_for_static, m)

    def one_point(point):
        pi, ai, ni = point
        variant, alpha, noise = policies[pi], alphas[ai], noises[ni]
        # A0 and DELAYEDOFF never look ahead, and off servers are
        # interchangeable, so their cost is seed- and noise-invariant;
        # noiseless A1 is deterministic outright.
        if variant in ("A0", "DELAYEDOFF") or (variant == "A1" and noise == 0.0):
            repeats = 1
        else:
            repeats = runs
        totals = []
        for r in range(repeats):
            seed = _derived_seed(p["seed"], pi, ai, ni, r)
            pol = engine.PolicySpec(variant, alpha=alpha if variant not in ("A0", "DELAYEDOFF") else 0.0, seed=seed)
            look = engine.LookaheadConfig(pol.alpha, noise, seed)
            totals.append(simulate(pol, look).breakdown.total)
        mean = math.fsum(totals) / len(totals)
        return {
            "policy": variant,
            "alpha": alpha,
            "window": alpha * m.delta,
            "noise": noise,
            "runs": len(totals),
            "mean_cost": mean,
            "cost_reduction": 1.0 - mean / static,
            "empirical_ratio": mean / optimal,
        }

    points = [
        (pi, ai, ni)
        for pi in range(len(policies))
        for ai in range(len(alphas))
        for ni in range(len(noises))
    ]
    threads = int(os.environ.get("POWERPROV_THREADS", "1"))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one_point, points))
    else:
        rows = [one_point(pt) for pt in points]

    columns = ["policy", "alpha", "window", "noise", "runs", "mean_cost", "cost_reduction", "empirical_ratio"]
    if p["format"] == "csv":
        _emit(_csv(rows, columns), p["output"])
    else:
        _emit(_json({"static_benchmark": static, "offline_optimal": optimal, "rows": rows}), p["output"])
    return 0


def cmd_ratio(args) -> int:
    config = _load_config(args.config)
    p = _resolve(
        args,
        config,
        {"b": None, "k": None, "probs": False, "format": "json", "output": None},
    )
    if p["b"] is None or p["k"] is None:
        raise ConfigError("ratio needs --b and --k")
    bs = p["b"] if isinstance(p["b"], (list, tuple)) else [p["b"]]
    ks = p["k"] if isinstance(p["k"], (list, tuple)) else [p["k"]]
    rows = []
    for b in bs:
        for k in ks:
            if k >= b:
                rows.append({"b": int(b), "k": int(k), "c": 1.0})
                continue
            sr = ratio.closed_form(int(b), int(k))
            row = {"b": sr.b, "k": sr.k, "c": sr.c}
            if p["probs"]:
                row["P"] = list(sr.probabilities)
            rows.append(row)
    if p["format"] == "csv":
        _emit(_csv(rows, ["b", "k", "c"]), p["output"])
    else:
        _emit(_json({"rows": rows}), p["output"])
    return 0


# ---------------------------------------------------------------------------
# Parser assembly.
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powerprov",
        description="Dynamic server provisioning: offline-optimal schedules and "
        "future-aware online policies over a last-empty-server-first dispatcher.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic trace")
    p.add_argument("--kind", choices=("brick", "fluid"))
    p.add_argument("--n-slots", dest="n_slots", type=int)
    p.add_argument("--n-jobs", dest="n_jobs", type=int)
    p.add_argument("--mean-load", dest="mean_load", type=float)
    p.add_argument("--target-pmr", dest="target_pmr", type=float)
    p.add_argument("--slot-duration", dest="slot_duration", type=float)
    p.add_argument("--sojourn", choices=trace_mod.SOJOURN_KINDS)
    p.add_argument("--sojourn-scale", dest="sojourn_scale", type=float)
    p.add_argument("--identity", dest="departure_identity", choices=trace_mod.IDENTITY_POLICIES)
    p.add_argument("--initial-jobs", dest="initial_jobs", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("rescale", help="reshape a fluid trace to a target peak-to-mean ratio")
    p.add_argument("trace", nargs="?")
    p.add_argument("--target-pmr", dest="target_pmr", type=float)
    _add_common(p)
    p.set_defaults(func=cmd_rescale)

    p = sub.add_parser("decompose", help="critical times and segment types of an event trace")
    p.add_argument("trace", nargs="?")
    p.add_argument("--initial-jobs", dest="initial_jobs", type=int)
    p.add_argument("--horizon", type=float)
    _add_common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("offline", help="offline-optimal schedule and cost")
    p.add_argument("trace", nargs="?")
    p.add_argument("--initial-jobs", dest="initial_jobs", type=int)
    p.add_argument("--horizon", type=float)
    _add_cost_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_offline)

    p = sub.add_parser("simulate", help="simulate one policy on a trace")
    p.add_argument("trace", nargs="?")
    p.add_argument("--initial-jobs", dest="initial_jobs", type=int)
    p.add_argument("--horizon", type=float)
    p.add_argument("--policy", type=str.upper, choices=engine.VARIANTS)
    p.add_argument("--alpha", type=float)
    p.add_argument("--t-wait", dest="t_wait", type=float)
    p.add_argument("--noise", type=float)
    p.add_argument("--fleet-size", dest="fleet_size", type=int)
    p.add_argument("--log-csv", dest="log_csv", help="write per-server assignment/decision log")
    _add_cost_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="grid of policies x lookahead x noise")
    p.add_argument("--trace")
    p.add_argument("--policies", nargs="+")
    p.add_argument("--alphas", nargs="+", type=float)
    p.add_argument("--windows", nargs="+", type=float)
    p.add_argument("--noise", nargs="+", type=float)
    p.add_argument("--runs", type=int)
    p.add_argument("--fleet-size", dest="fleet_size", type=int)
    _add_cost_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ratio", help="optimal randomized ratio for slotted ski-rental")
    p.add_argument("--b", nargs="+", type=int)
    p.add_argument("--k", nargs="+", type=int)
    p.add_argument("--probs", action="store_true", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_ratio)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PowerProvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
