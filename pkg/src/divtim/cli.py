"""Command-line front end: select | simulate | baseline | metrics | synth.

Runs are configured by flags or by a flat ``key=value`` file (flags win).
Every output document embeds the resolved configuration, and a run is
fully determined by its inputs plus the master seed; only lines starting
with ``timing`` vary between repeated runs.

Exit codes: 0 ok, 1 usage error, 2 data/configuration error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import baselines, diversity, estimator, metrics, profiles, sampler, selector, simulator
from .errors import ConfigError, FormatError, UsageError
from .graph import (DiffusionGraph, derive_targets_indegree, load_graph,
                    load_node_weights, select_targets)

DIVERSITY_KINDS = ("aw", "hamming", "entropy", "class", "numeric-u", "numeric-w")

METRIC_COLUMNS = [
    "dataset", "diversity", "k", "alpha", "target_mode", "target_param",
    "master_seed", "theta", "expected_capital", "diversity_value", "objective",
    "diversity_max", "diversity_ratio", "seed_entropy", "seeds",
]


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # map argparse failures to exit code 1
        raise UsageError(message)


def _read_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"config line {lineno}: expected key=value")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def _apply_config(args: argparse.Namespace, actions: dict[str, argparse.Action]) -> None:
    """Fill unset args from the config file; reject unknown keys.

    Values are coerced through the corresponding flag's argparse type, so
    ``k=5`` in a file behaves exactly like ``--k 5``.
    """
    if not getattr(args, "config", None):
        return
    conf = _read_config_file(args.config)
    unknown = sorted(set(conf) - set(actions))
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    for key, value in conf.items():
        action = actions[key]
        attr = action.dest
        current = getattr(args, attr, None)
        if isinstance(current, bool):
            if current is False:
                setattr(args, attr, value.lower() in ("1", "true", "yes"))
            continue
        if current is None:
            if action.choices and value not in action.choices:
                raise UsageError(f"config key {key}: {value!r} not in {sorted(action.choices)}")
            setattr(args, attr, action.type(value) if action.type else value)


def _load_graph_from_args(args) -> DiffusionGraph:
    if not args.graph:
        raise UsageError("a graph path is required")
    g = load_graph(args.graph, args.weight_mode or "uniform_indegree")
    if args.node_weights:
        g = load_node_weights(g, args.node_weights)
    if args.derive_targets == "indegree":
        g = derive_targets_indegree(g)
    return g


def _targets_from_args(graph, args):
    mode = args.target_mode or "top_percent"
    if mode == "threshold":
        return select_targets(graph, "threshold", tau=float(args.tau if args.tau is not None else 0.5)), \
            "threshold", float(args.tau if args.tau is not None else 0.5)
    percent = float(args.percent if args.percent is not None else 25.0)
    return select_targets(graph, "top_percent", percent=percent), "top_percent", percent


def _build_diversity(kind: str, graph, profile_set, args):
    if kind == "aw":
        if profile_set is None:
            raise ConfigError("attribute-wise diversity needs --profiles")
        lam = float(args.lam) if args.lam is not None else 1.0
        return diversity.AttributeWiseDiversity(profile_set, lam=lam)
    if kind == "hamming":
        if profile_set is None:
            raise ConfigError("hamming diversity needs --profiles")
        xi = int(args.xi) if args.xi is not None else 3
        return diversity.HammingBallDiversity(graph, profile_set, radius=xi)
    if kind == "entropy":
        if profile_set is None:
            raise ConfigError("entropy diversity needs --profiles")
        return diversity.EntropyDiversity(profile_set)
    if kind == "class":
        if not args.class_map:
            raise ConfigError("class diversity needs --class-map")
        classes, rewards = diversity.load_class_map(args.class_map, graph.labels)
        return diversity.ClassDiversity(classes, rewards)
    if kind in ("numeric-u", "numeric-w"):
        if not args.preferences:
            raise ConfigError("numeric diversity needs --preferences")
        mat, _, labels = profiles.load_numeric_matrix(args.preferences)
        if labels is not None:
            order = [labels.index(lab) for lab in graph.labels]
            mat = mat[order]
        if mat.shape[0] != graph.node_count:
            raise ConfigError("preference matrix must cover every node")
        prefs = profiles.derive_numeric_preferences(np.nan_to_num(mat))
        g_mode = "unit" if kind == "numeric-u" else "degree"
        return diversity.NumericDiversity(prefs, baselines.node_gain_vector(graph, g_mode))
    raise ConfigError(f"unknown diversity kind {kind!r}")


def _parse_list(text: str, cast) -> list:
    items = [tok.strip() for tok in str(text).split(",") if tok.strip()]
    if not items:
        raise UsageError("empty value list")
    return [cast(tok) for tok in items]


def _result_doc(res: selector.SeedResult, labels, config_pairs, extra) -> str:
    lines = ["# seed selection result"]
    for key in sorted(config_pairs):
        lines.append(f"config.{key}: {config_pairs[key]}")
    for key, value in extra.items():
        lines.append(f"{key}: {value}")
    lines.append(f"theta: {res.theta}")
    lines.append(f"target_total: {res.target_total!r}")
    lines.append(f"expected_capital: {res.expected_capital!r}")
    lines.append(f"diversity_value: {res.diversity_value!r}")
    if res.diversity_max is not None:
        lines.append(f"diversity_max: {res.diversity_max!r}")
    lines.append(f"objective: {res.objective()!r}")
    lines.append("seeds: " + " ".join(labels[v] for v in res.seeds))
    lines.append("seed_ids: " + " ".join(str(v) for v in res.seeds))
    lines.append("trace:")
    for i, step in enumerate(res.trace, start=1):
        lines.append(f"  {i} {labels[step.node]} {step.capital_gain!r} "
                     f"{step.diversity_gain!r} {step.combined_gain!r}")
    if res.timing_seconds is not None:
        lines.append(f"timing_seconds: {res.timing_seconds:.3f}")
    return "\n".join(lines) + "\n"


def parse_result_doc(path: str) -> dict:
    """Read back a result document into a flat dict (trace excluded)."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        in_trace = False
        for raw in fh:
            line = raw.rstrip("\n")
            if line.startswith("#"):
                continue
            if line == "trace:":
                in_trace = True
                continue
            if in_trace and line.startswith("  "):
                continue
            in_trace = False
            if ": " in line:
                key, _, value = line.partition(": ")
                out[key] = value
            elif line.endswith(":"):
                out[line[:-1]] = ""
    return out


# ---------------------------------------------------------------------- select

def _add_common_graph_flags(p: _Parser) -> None:
    p.add_argument("--config")
    p.add_argument("--graph")
    p.add_argument("--weight-mode", choices=("explicit", "uniform_indegree", "interaction"))
    p.add_argument("--node-weights")
    p.add_argument("--derive-targets", choices=("none", "indegree"))
    p.add_argument("--target-mode", choices=("threshold", "top_percent"))
    p.add_argument("--tau", type=float)
    p.add_argument("--percent", type=float)
    p.add_argument("--model", choices=("ic", "lt"))


def _select_parser(sub) -> None:
    p = sub.add_parser("select", help="run estimation, sampling, and seed selection")
    _add_common_graph_flags(p)
    p.add_argument("--profiles")
    p.add_argument("--numeric-profiles",
                   help="CSV of reals, quantile-binned into categorical profiles")
    p.add_argument("--bins", type=int)
    p.add_argument("--class-map")
    p.add_argument("--preferences")
    p.add_argument("--diversity", choices=DIVERSITY_KINDS)
    p.add_argument("--xi", type=int)
    p.add_argument("--lam", type=float)
    p.add_argument("--k")
    p.add_argument("--alpha")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--ell", type=float)
    p.add_argument("--theta-override", type=int)
    p.add_argument("--theta-cap", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--eager", action="store_true")
    p.add_argument("--dump-corpus")
    p.add_argument("--out", required=False)


def cmd_select(args) -> int:
    if not args.out:
        raise UsageError("select needs --out DIR")
    graph = _load_graph_from_args(args)
    targets, tmode, tparam = _targets_from_args(graph, args)
    model = args.model or "ic"
    master_seed = int(args.seed if args.seed is not None else 0)
    epsilon = float(args.epsilon if args.epsilon is not None else 0.1)
    ell = float(args.ell if args.ell is not None else 1.0)
    kind = args.diversity or "aw"
    ks = _parse_list(args.k if args.k is not None else "10", int)
    alpha_tokens = _parse_list(args.alpha if args.alpha is not None else "0.5", str)
    alphas = [float(tok) for tok in alpha_tokens]
    workers = int(args.workers or 1)

    profile_set = None
    if args.profiles and args.numeric_profiles:
        raise UsageError("give either --profiles or --numeric-profiles, not both")
    if args.profiles:
        profile_set = profiles.load_profiles(args.profiles, node_labels=graph.labels)
    elif args.numeric_profiles:
        mat, names, labels = profiles.load_numeric_matrix(args.numeric_profiles)
        if labels is not None:
            order = [labels.index(lab) for lab in graph.labels]
            mat = mat[order]
        if mat.shape[0] != graph.node_count:
            raise ConfigError("numeric profile matrix must cover every node")
        bins = int(args.bins) if args.bins is not None else 10
        profile_set = profiles.quantile_discretize(mat, bins, names)

    os.makedirs(args.out, exist_ok=True)
    config_pairs = {
        "graph": args.graph, "weight_mode": args.weight_mode or "uniform_indegree",
        "node_weights": args.node_weights or "", "derive_targets": args.derive_targets or "none",
        "profiles": args.profiles or "", "numeric_profiles": args.numeric_profiles or "",
        "bins": args.bins if args.bins is not None else 10,
        "class_map": args.class_map or "",
        "preferences": args.preferences or "", "diversity": kind,
        "xi": args.xi if args.xi is not None else 3,
        "lam": args.lam if args.lam is not None else 1.0, "model": model,
        "target_mode": tmode, "target_param": tparam, "epsilon": epsilon, "ell": ell,
        "seed": master_seed, "normalize": bool(args.normalize), "eager": bool(args.eager),
    }

    rows = []
    for k in ks:
        params = estimator.estimate_params(
            graph, targets, model, k, epsilon=epsilon, ell=ell, master_seed=master_seed,
            theta_override=args.theta_override,
            theta_cap=args.theta_cap or estimator.DEFAULT_THETA_CAP)
        corpus = sampler.generate_corpus(graph, targets, model, params.theta,
                                         master_seed, workers=workers)
        if args.dump_corpus:
            corpus.dump(args.dump_corpus)

        def run_point(alpha_token: str, alpha: float, k=k, params=params, corpus=corpus):
            start = time.perf_counter()
            div = _build_diversity(kind, graph, profile_set, args)
            res = selector.build_seed_set(corpus, k, alpha, div, lazy=not args.eager)
            res.timing_seconds = time.perf_counter() - start
            extra = {
                "kpt_star": repr(params.kpt_star), "kpt_plus": repr(params.kpt_plus),
                "corpus_width": corpus.total_width,
            }
            ent = ""
            if profile_set is not None and res.seeds:
                ent = repr(metrics.seed_entropy(res.seeds, profile_set))
                extra["seed_entropy"] = ent
            if args.normalize:
                extra["objective_normalized"] = repr(
                    selector.objective_value(res, alpha, normalize=True))
            pairs = dict(config_pairs, k=k, alpha=alpha_token)
            doc = _result_doc(res, graph.labels, pairs, extra)
            path = os.path.join(args.out, f"seeds_k{k}_a{alpha_token}.txt")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(doc)
            ratio = ""
            dmax = ""
            if res.diversity_max is not None:
                dmax = repr(res.diversity_max)
                if res.diversity_max > 0:
                    ratio = repr(res.diversity_value / res.diversity_max)
            return {
                "dataset": os.path.basename(args.graph), "diversity": kind, "k": k,
                "alpha": alpha_token, "target_mode": tmode, "target_param": tparam,
                "master_seed": master_seed, "theta": res.theta,
                "expected_capital": repr(res.expected_capital),
                "diversity_value": repr(res.diversity_value),
                "objective": repr(res.objective()),
                "diversity_max": dmax, "diversity_ratio": ratio, "seed_entropy": ent,
                "seeds": " ".join(graph.labels[v] for v in res.seeds),
            }

        jobs = int(args.jobs or 1)
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                rows.extend(pool.map(lambda pair: run_point(pair[0], pair[1]),
                                     zip(alpha_tokens, alphas)))
        else:
            rows.extend(run_point(tok, a) for tok, a in zip(alpha_tokens, alphas))

    with open(os.path.join(args.out, "metrics.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=METRIC_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return 0


# -------------------------------------------------------------------- simulate

def _simulate_parser(sub) -> None:
    p = sub.add_parser("simulate", help="Monte Carlo forward diffusion for a seed set")
    _add_common_graph_flags(p)
    p.add_argument("--seeds", help="comma-separated node labels")
    p.add_argument("--seeds-file", help="file with one node label per line")
    p.add_argument("--from-result", help="read the seeds line of a result document")
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="append a CSV row here instead of printing text")


def cmd_simulate(args) -> int:
    graph = _load_graph_from_args(args)
    targets, tmode, tparam = _targets_from_args(graph, args)
    if args.seeds:
        labels = _parse_list(args.seeds, str)
    elif args.seeds_file:
        with open(args.seeds_file, "r", encoding="utf-8") as fh:
            labels = [line.strip() for line in fh if line.strip()]
    elif args.from_result:
        doc = parse_result_doc(args.from_result)
        labels = doc.get("seeds", "").split()
    else:
        raise UsageError("provide --seeds, --seeds-file, or --from-result")
    unknown = [lab for lab in labels if lab not in graph.label_ids]
    if unknown:
        raise FormatError(f"unknown seed nodes: {unknown}")
    seed_ids = [graph.label_ids[lab] for lab in labels]
    runs = int(args.runs if args.runs is not None else 10_000)
    report = simulator.simulate(graph, args.model or "ic", seed_ids, runs,
                                int(args.seed if args.seed is not None else 0),
                                targets=targets)
    if args.out:
        new = not os.path.exists(args.out)
        with open(args.out, "a", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            if new:
                writer.writerow(["dataset", "target_mode", "target_param", "runs",
                                 "mean_spread", "stderr_spread", "mean_capital",
                                 "stderr_capital", "seeds"])
            writer.writerow([os.path.basename(args.graph), tmode, tparam, report.runs,
                             repr(report.mean_spread), repr(report.stderr_spread),
                             repr(report.mean_capital), repr(report.stderr_capital),
                             " ".join(labels)])
    else:
        print(f"runs: {report.runs}")
        print(f"mean_spread: {report.mean_spread!r}")
        print(f"stderr_spread: {report.stderr_spread!r}")
        print(f"mean_capital: {report.mean_capital!r}")
        print(f"stderr_capital: {report.stderr_capital!r}")
    return 0


# -------------------------------------------------------------------- baseline

def _baseline_parser(sub) -> None:
    p = sub.add_parser("baseline", help="degree/diversity greedy baseline")
    p.add_argument("kind", choices=("deg-d",))
    _add_common_graph_flags(p)
    p.add_argument("--preferences", help="CSV of per-node numeric preference vectors")
    p.add_argument("--g-mode", choices=("unit", "degree"))
    p.add_argument("--gamma", type=float)
    p.add_argument("--alpha", type=float, help="alternative parameterization, gamma = 1 - alpha")
    p.add_argument("--k", type=int)
    p.add_argument("--out")


def cmd_baseline(args) -> int:
    graph = _load_graph_from_args(args)
    if not args.preferences:
        raise UsageError("baseline needs --preferences")
    mat, _, labels = profiles.load_numeric_matrix(args.preferences)
    if labels is not None:
        order = [labels.index(lab) for lab in graph.labels]
        mat = mat[order]
    prefs = profiles.derive_numeric_preferences(np.nan_to_num(mat))
    if args.gamma is not None and args.alpha is not None:
        raise UsageError("give either --gamma or --alpha, not both")
    gamma = float(args.gamma) if args.gamma is not None else \
        (1.0 - float(args.alpha)) if args.alpha is not None else 0.5
    seeds = baselines.deg_d_greedy(graph, prefs, args.g_mode or "unit", gamma,
                                   int(args.k if args.k is not None else 10))
    lines = [graph.labels[v] for v in seeds]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        print("\n".join(lines))
    return 0


# --------------------------------------------------------------------- metrics

def _metrics_parser(sub) -> None:
    p = sub.add_parser("metrics", help="aggregate result documents into one CSV")
    p.add_argument("--results", required=True, help="directory of result documents")
    p.add_argument("--out", required=True)


def cmd_metrics(args) -> int:
    rows = []
    for name in sorted(os.listdir(args.results)):
        if not name.endswith(".txt"):
            continue
        doc = parse_result_doc(os.path.join(args.results, name))
        if "seeds" not in doc or "expected_capital" not in doc:
            continue
        dmax = doc.get("diversity_max", "")
        ratio = ""
        if dmax:
            peak = float(dmax)
            if peak > 0:
                ratio = repr(float(doc["diversity_value"]) / peak)
        rows.append({
            "dataset": os.path.basename(doc.get("config.graph", "")),
            "diversity": doc.get("config.diversity", ""),
            "k": doc.get("config.k", ""), "alpha": doc.get("config.alpha", ""),
            "target_mode": doc.get("config.target_mode", ""),
            "target_param": doc.get("config.target_param", ""),
            "master_seed": doc.get("config.seed", ""), "theta": doc.get("theta", ""),
            "expected_capital": doc.get("expected_capital", ""),
            "diversity_value": doc.get("diversity_value", ""),
            "objective": doc.get("objective", ""),
            "diversity_max": dmax, "diversity_ratio": ratio,
            "seed_entropy": doc.get("seed_entropy", ""),
            "seeds": doc.get("seeds", ""),
        })
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=METRIC_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return 0


# ----------------------------------------------------------------------- synth

def _synth_parser(sub) -> None:
    p = sub.add_parser("synth", help="generate synthetic categorical profiles")
    p.add_argument("--config")
    p.add_argument("--nodes", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--domain-sizes")
    p.add_argument("--distribution", choices=("uniform", "exponential"))
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)


def cmd_synth(args) -> int:
    if args.nodes is None:
        raise UsageError("synth needs --nodes")
    m = int(args.m if args.m is not None else 10)
    if args.domain_sizes:
        sizes = _parse_list(args.domain_sizes, int)
        sizes = sizes * m if len(sizes) == 1 else sizes
    else:
        sizes = [10] * m
    pset = profiles.synth_profiles(int(args.nodes), m, sizes,
                                   args.distribution or "uniform",
                                   int(args.seed if args.seed is not None else 0))
    profiles.save_profiles(pset, args.out)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="divtim",
                     description="diversity-sensitive targeted influence maximization")
    sub = parser.add_subparsers(dest="command", required=True)
    _select_parser(sub)
    _simulate_parser(sub)
    _baseline_parser(sub)
    _metrics_parser(sub)
    _synth_parser(sub)
    return parser


_COMMANDS = {
    "select": cmd_select,
    "simulate": cmd_simulate,
    "baseline": cmd_baseline,
    "metrics": cmd_metrics,
    "synth": cmd_synth,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    actions: dict[str, argparse.Action] = {}
    for group in parser._subparsers._group_actions:
        for name, sp in group.choices.items():
            if name == args.command:
                for a in sp._actions:
                    actions[a.dest.replace("_", "-")] = a
    _apply_config(args, actions)
    return _COMMANDS[args.command](args)


def main(argv: list[str] | None = None) -> int:
    try:
        return run(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (FormatError, ConfigError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
