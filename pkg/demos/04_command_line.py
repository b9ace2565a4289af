"""
The command-line pipeline
=========================

Write a graph and a config to a scratch folder and drive the same steps a
user would run from the shell: preprocess, optimize, baseline, analyze.
"""
import json
import tempfile
from pathlib import Path

from infmax.cli import main
from infmax.graph import write_edge_list
from infmax.synthetic import planted_partition

work = Path(tempfile.mkdtemp(prefix="infmax-demo-"))
g, _ = planted_partition([30, 25, 20, 4], p_in=0.15, p_out=0.01, seed=7)
write_edge_list(g, work / "graph.txt")

config = {
    "schema_version": 1,
    "graph_path": "graph.txt",
    "community_source": "detect:0",
    "preprocess": True,
    "model": "wc",
    "objectives": "all",
    "k": 0.1,
    "tau": 5,
    "n_sims": 100,
    "runs": 2,
    "moea": {"generations": 10},
    "output_dir": "results",
}
(work / "experiment.json").write_text(json.dumps(config, indent=2))
cfg = str(work / "experiment.json")

# the report records what preprocessing kept and dropped
assert main(["preprocess", "--config", cfg, "--output", str(work / "clean")]) == 0
print((work / "clean" / "report.json").read_text())

assert main(["run", "--config", cfg]) == 0
assert main(["baseline", "gdd", "--config", cfg]) == 0
fronts = sorted(str(p) for p in (work / "results").glob("moea_all_run*.csv"))
assert main(["analyze", *fronts, "--output", str(work / "analysis")]) == 0

print((work / "analysis" / "hypervolume_table.csv").read_text())
print((work / "analysis" / "correlation.csv").read_text())

# a broken config is reported with exit code 1
config["tau"] = -1
(work / "bad.json").write_text(json.dumps(config))
print("bad config exit code:", main(["run", "--config", str(work / "bad.json")]))
print("outputs in", work)
