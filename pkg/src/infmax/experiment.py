"""Experiment configuration, preprocessing pipeline and result files.

Everything the command line does lives here as plain functions, so scripts
can drive the same pipeline without going through ``argparse``.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import baselines
from .analysis import ParetoFront, FrontEntry, correlation_matrix, subset_hypervolume
from .community import (
    CommunityAssignment,
    detect_communities,
    load_assignment,
    modularity,
    save_assignment,
)
from .graph import (
    Graph,
    degree_summary,
    largest_weakly_connected_component,
    load_edge_list,
    remove_nodes,
    write_edge_list,
)
from .moea import ConfigError, MoeaConfig, run_nsga2
from .objectives import (
    OBJECTIVES,
    SHORT,
    NormalizationContext,
    ObjectiveVector,
    mask_name,
    parse_mask,
)
from .propagation import PropagationModel

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
REPORT_MASKS = ("I-S", "I-S-C", "I-S-F", "I-S-B", "I-S-T", "all")
MOEA_KEYS = {
    "population_size", "offspring_size", "elites", "tournament_size", "generations",
    "lam", "theta", "crossover_rate", "mutation_rate", "per_run_communities",
}


@dataclass
class ExperimentConfig:
    graph_path: Path
    directed: bool = True
    community_source: str | None = "detect:0"
    model: str = "wc"
    objectives: str = "all"
    k: int | float = 0.2
    tau: int | None = 5
    n_sims: int = 100
    moea: dict = field(default_factory=dict)
    runs: int = 1
    rng_seed_base: int = 0
    output_dir: Path = Path("results")
    preprocess: bool = False
    min_community_size: int = 10
    workers: int = 1
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        self.graph_path = Path(self.graph_path)
        self.output_dir = Path(self.output_dir)
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {self.schema_version}")
        if isinstance(self.tau, str):
            if self.tau != "unbounded":
                raise ConfigError("tau must be an integer or 'unbounded'")
            self.tau = None
        if self.tau is not None and (not isinstance(self.tau, int) or self.tau < 0):
            raise ConfigError("tau must be a non-negative integer")
        try:
            self.propagation = PropagationModel.parse(self.model)
            self.objectives = mask_name(self.objectives)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if "time" in parse_mask(self.objectives) and self.tau is None:
            raise ConfigError("time objective needs a finite tau")
        if isinstance(self.k, bool) or not isinstance(self.k, (int, float)):
            raise ConfigError("k must be a positive integer or a fraction in (0, 1)")
        if isinstance(self.k, float) and not 0 < self.k < 1:
            raise ConfigError("fractional k must lie in (0, 1)")
        if isinstance(self.k, int) and self.k < 1:
            raise ConfigError("k must be at least 1")
        if self.runs < 1:
            raise ConfigError("runs must be at least 1")
        if self.n_sims < 1:
            raise ConfigError("n_sims must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        unknown = set(self.moea) - MOEA_KEYS
        if unknown:
            raise ConfigError(f"unknown moea keys: {', '.join(sorted(unknown))}")
        parse_community_source(self.community_source)
        # fail early on bad optimizer settings, with a placeholder k
        self.moea_config(1)

    def resolve_k(self, node_count: int) -> int:
        if isinstance(self.k, float):
            return max(1, int(math.floor(self.k * node_count + 0.5)))
        if self.k > node_count:
            raise ConfigError(f"k={self.k} exceeds the {node_count} graph nodes")
        return self.k

    def moea_config(self, k: int) -> MoeaConfig:
        try:
            return MoeaConfig(k=k, active=self.objectives, tau=self.tau, n_sims=self.n_sims,
                              **self.moea)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def parse_community_source(text):
    """``"detect:<seed>"`` -> ("detect", seed); ``"file:<path>"`` -> ("file", path)."""
    if text is None:
        return None
    kind, _, arg = str(text).partition(":")
    if kind == "detect":
        try:
            return ("detect", int(arg or 0))
        except ValueError:
            raise ConfigError(f"bad detection seed in {text!r}") from None
    if kind == "file" and arg:
        return ("file", Path(arg))
    raise ConfigError(f"community_source must be 'detect:<seed>' or 'file:<path>', got {text!r}")


def load_config(path, **overrides) -> ExperimentConfig:
    """Read a JSON config; relative paths resolve against the config's folder."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    if "schema_version" not in raw:
        raise ConfigError(f"{path}: missing schema_version")
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(raw) - names
    if unknown:
        raise ConfigError(f"{path}: unknown keys: {', '.join(sorted(unknown))}")
    if "graph_path" not in raw:
        raise ConfigError(f"{path}: missing graph_path")
    base = path.parent
    raw["graph_path"] = base / raw["graph_path"]
    raw["output_dir"] = base / raw.get("output_dir", "results")
    src = raw.get("community_source", "detect:0")
    if isinstance(src, str) and src.startswith("file:"):
        raw["community_source"] = "file:" + str(base / src[5:])
    raw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**raw)


# ---------------------------------------------------------- preprocessing


@dataclass
class Prepared:
    graph: Graph
    assignment: CommunityAssignment | None
    report: dict


def _communities(cfg: ExperimentConfig, g: Graph, dropped_labels=()):
    source = parse_community_source(cfg.community_source)
    if source is None:
        return None
    kind, arg = source
    if kind == "detect":
        return detect_communities(g, rng_seed=arg)
    return load_assignment(arg, g, ignore=dropped_labels)


def prepare(cfg: ExperimentConfig) -> Prepared:
    """Load the graph and, when ``cfg.preprocess`` is set, clean it.

    Cleaning keeps the largest weakly connected component, drops communities
    smaller than ``min_community_size`` and takes the largest component again.
    """
    raw = load_edge_list(cfg.graph_path, cfg.directed)
    report = {"input_nodes": raw.node_count, "input_edges": raw.edge_count}
    if not cfg.preprocess:
        a = _communities(cfg, raw)
        return Prepared(raw, a, _finish_report(report, raw, a, cfg))

    g = largest_weakly_connected_component(raw)
    outside = np.setdiff1d(raw.labels, g.labels)
    a = _communities(cfg, g, outside.tolist())
    removed_comms = 0
    if a is not None:
        small = np.flatnonzero(a.sizes < cfg.min_community_size)
        removed_comms = int(small.size)
        if small.size:
            drop = np.flatnonzero(np.isin(a.labels, small))
            if drop.size == g.node_count:
                raise RuntimeError("every community is smaller than min_community_size")
            keep = np.ones(g.node_count, dtype=bool)
            keep[drop] = False
            g, a = remove_nodes(g, drop), a.restrict(keep)
        g2 = largest_weakly_connected_component(g)
        if g2 is not g:
            a = a.restrict(np.isin(g.labels, g2.labels))
            g = g2
    report["removed_small_communities"] = removed_comms
    report["removed_nodes"] = raw.node_count - g.node_count
    return Prepared(g, a, _finish_report(report, g, a, cfg))


def _finish_report(report, g, a, cfg):
    stats = degree_summary(g)
    report.update({
        "nodes": g.node_count,
        "edges": g.edge_count,
        "directed": g.directed,
        "communities": a.community_count if a is not None else None,
        "modularity": modularity(g, a) if a is not None else None,
        "degree": dataclasses.asdict(stats),
    })
    report.setdefault("removed_nodes", 0)
    return report


def cmd_preprocess(cfg: ExperimentConfig) -> dict:
    cfg = dataclasses.replace(cfg, preprocess=True)
    prep = prepare(cfg)
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    write_edge_list(prep.graph, out / "graph.txt")
    if prep.assignment is not None:
        save_assignment(prep.assignment, out / "communities.txt", prep.graph)
    _write_json(out / "report.json", prep.report)
    return prep.report


def cmd_detect_communities(cfg: ExperimentConfig, seed: int | None = None) -> dict:
    g = load_edge_list(cfg.graph_path, cfg.directed)
    if seed is None:
        source = parse_community_source(cfg.community_source)
        seed = source[1] if source and source[0] == "detect" else 0
    a = detect_communities(g, rng_seed=seed)
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    save_assignment(a, out / "communities.txt", g)
    report = {
        "nodes": g.node_count,
        "communities": a.community_count,
        "sizes": a.sizes.tolist(),
        "modularity": modularity(g, a),
        "seed": seed,
    }
    _write_json(out / "communities.json", report)
    return report


# ------------------------------------------------------------- front I/O


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return "nan" if math.isnan(x) else repr(x)


FRONT_COLUMNS = (
    ["run_id", "seed_nodes"]
    + list(OBJECTIVES)
    + [f"norm_{s}" for s in SHORT]
)


def write_front_csv(path, front: ParetoFront, g: Graph, run_id: int, meta: dict) -> None:
    """One row per front member; a leading ``#`` line carries the normalization context."""
    ctx = front.ctx
    header = dict(meta)
    header.update(node_count=ctx.node_count, k=ctx.k, budget_cap=ctx.budget_cap,
                  tau="unbounded" if ctx.tau is None else ctx.tau,
                  objectives=mask_name(ctx.active))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FRONT_COLUMNS)
        for e in front.entries:
            labels = ";".join(str(int(g.labels[v])) for v in e.nodes)
            raw = [_fmt(x) for x in e.objectives.as_tuple()]
            w.writerow([run_id, labels] + raw + [_fmt(x) for x in e.point])


@dataclass
class FrontFile:
    path: Path
    meta: dict
    run_ids: list[int]
    front: ParetoFront


def read_front_csv(path, g: Graph | None = None) -> FrontFile:
    """Parse a front CSV back into a :class:`ParetoFront`.

    Seed labels are mapped to internal ids when ``g`` is given; otherwise the
    entries keep the original labels.
    """
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline()
        if not first.startswith("# "):
            raise ValueError(f"{path}: missing metadata line")
        meta = json.loads(first[2:])
        rows = list(csv.reader(fh))
    if not rows or rows[0] != FRONT_COLUMNS:
        raise ValueError(f"{path}: unexpected columns")
    tau = None if meta["tau"] == "unbounded" else int(meta["tau"])
    ctx = NormalizationContext(meta["node_count"], meta["k"], meta["budget_cap"], tau,
                               parse_mask(meta["objectives"]))
    index = {int(lab): i for i, lab in enumerate(g.labels)} if g is not None else None
    entries, run_ids = [], []
    for row in rows[1:]:
        run_ids.append(int(row[0]))
        labels = [int(x) for x in row[1].split(";")]
        nodes = tuple(sorted(index[x] for x in labels)) if index else tuple(labels)
        r = row[2:8]
        vec = ObjectiveVector(float(r[0]), int(r[1]), float(r[2]), float(r[3]), int(r[4]),
                              float(r[5]))
        entries.append(FrontEntry(nodes, vec, np.array([float(x) for x in row[8:14]])))
    return FrontFile(path, meta, run_ids, ParetoFront(entries, ctx))


def mask_hypervolumes(front: ParetoFront) -> dict[str, float | None]:
    """Hypervolume on each reporting mask; None where a coordinate is undefined."""
    out = {}
    for mask in REPORT_MASKS:
        try:
            out[mask] = subset_hypervolume(front, mask) if len(front) else 0.0
        except ValueError:
            out[mask] = None
    return out


def summarize(per_run: list[dict], meta: dict) -> dict:
    table = {}
    for mask in REPORT_MASKS:
        vals = [r["hypervolume"][mask] for r in per_run]
        if any(v is None for v in vals):
            table[mask] = None
            continue
        arr = np.array(vals)
        table[mask] = {"mean": float(arr.mean()), "std": float(arr.std()), "values": vals}
    return dict(meta, runs=per_run, hypervolume=table)


def _write_json(path, obj) -> None:
    def clean(x):
        if isinstance(x, float) and math.isnan(x):
            return None
        if isinstance(x, dict):
            return {k: clean(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        return x
    Path(path).write_text(json.dumps(clean(obj), indent=2) + "\n", encoding="utf-8")


# ------------------------------------------------------------- commands


def _run_meta(cfg: ExperimentConfig, method: str, k: int, g: Graph) -> dict:
    return {
        "method": method,
        "model": cfg.propagation.spec(),
        "k": k,
        "tau": "unbounded" if cfg.tau is None else cfg.tau,
        "n_sims": cfg.n_sims,
        "nodes": g.node_count,
        "edges": g.edge_count,
    }


def _moea_job(args):
    g, a, model, mcfg, seed = args
    return run_nsga2(g, a, model, mcfg, seed).archive


def _map(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def _emit(cfg, prep, method, fronts, seeds, k, extra=None) -> dict:
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    meta = _run_meta(cfg, method, k, prep.graph)
    if extra:
        meta.update(extra)
    per_run = []
    for i, (front, seed) in enumerate(zip(fronts, seeds)):
        write_front_csv(out / f"{method}_run{i:02d}.csv", front, prep.graph, i, meta)
        per_run.append({"run_id": i, "seed": seed, "front_size": len(front),
                        "hypervolume": mask_hypervolumes(front)})
    summary = summarize(per_run, meta)
    _write_json(out / f"summary_{method}.json", summary)
    return summary


def cmd_run(cfg: ExperimentConfig) -> dict:
    """Independent optimizer runs with seeds ``rng_seed_base + i``."""
    prep = prepare(cfg)
    k = cfg.resolve_k(prep.graph.node_count)
    mcfg = cfg.moea_config(k)
    seeds = [cfg.rng_seed_base + i for i in range(cfg.runs)]
    jobs = [(prep.graph, prep.assignment, cfg.propagation, mcfg, s) for s in seeds]
    fronts = _map(_moea_job, jobs, cfg.workers)
    method = "moea_" + cfg.objectives
    return _emit(cfg, prep, method, fronts, seeds, k, {"objectives": cfg.objectives})


def cmd_baseline(cfg: ExperimentConfig, which: str) -> dict:
    """GDD or CELF seed order, prefix-swept into a front once per run."""
    if which not in ("gdd", "celf"):
        raise ConfigError(f"unknown baseline {which!r}")
    prep = prepare(cfg)
    g = prep.graph
    k = cfg.resolve_k(g.node_count)
    seeds = [cfg.rng_seed_base + i for i in range(cfg.runs)]
    fronts = []
    label = baselines.GDD_LABEL if which == "gdd" else "celf"
    for s in seeds:
        if which == "gdd":
            trace = baselines.gdd(g, k)
        else:
            trace = baselines.celf(g, cfg.propagation, k, cfg.tau, cfg.n_sims, s)
        fronts.append(baselines.prefix_sweep(g, prep.assignment, cfg.propagation, trace,
                                             cfg.tau, cfg.n_sims, s, k))
    return _emit(cfg, prep, which, fronts, seeds, k, {"variant": label})


def cmd_analyze(paths, output_dir) -> dict:
    """Correlation matrix over fronts optimized on all objectives, plus a hypervolume table."""
    files = [read_front_csv(p) for p in paths]
    if not files:
        raise ConfigError("no front files given")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "hypervolume_table.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["file", "method", "objectives", "run_id"] + list(REPORT_MASKS))
        for f in files:
            hv = mask_hypervolumes(f.front)
            run = f.run_ids[0] if f.run_ids else ""
            w.writerow([f.path.name, f.meta.get("method", ""), f.meta["objectives"], run]
                       + ["" if hv[m] is None else _fmt(hv[m]) for m in REPORT_MASKS])
    result = {"fronts": len(files), "correlation": None}
    full = [f for f in files if f.meta["objectives"] == "all"]
    if not full:
        logger.info("no front optimized on all objectives; correlation skipped")
        return result
    if len(full) != len(files):
        raise ConfigError("correlation needs every front optimized on all six objectives")
    try:
        corr = correlation_matrix([f.front for f in full])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    with open(out / "correlation.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([""] + list(SHORT))
        for s, row in zip(SHORT, corr):
            w.writerow([s] + [_fmt(x) for x in row])
    result["correlation"] = corr.tolist()
    return result
