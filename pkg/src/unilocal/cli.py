"""Command line harness.

``run`` executes seeded sweeps described by a TOML spec, verifies every
output, and writes a CSV of runs plus a JSON summary with a fitted
round constant.  ``certify`` drives the pruning certification suite.
``table`` merges summaries into a comparison table.  ``list`` shows the
registries.
"""

from __future__ import annotations

import json
import math
import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from . import baselib, problems
from .bounds import parse_bound
from .graph import Configuration, Graph, all_graphs, generate
from .pruning import (certify_pruning, prune_mm, prune_ruling, prune_slc)
from .runtime import run_sync

FAMILIES = ("path", "cycle", "clique", "grid", "gnp", "forest", "regular")

CSV_COLUMNS = ("family", "n", "seed", "rounds", "iterations",
               "messages", "valid", "palette")


def _verifiers():
    return {
        "mis": lambda c, y: problems.check_ruling(c, y, 2, 1),
        "ruling_2_2": lambda c, y: problems.check_ruling(c, y, 2, 2),
        "ruling_2_3": lambda c, y: problems.check_ruling(c, y, 2, 3),
        "matching": problems.check_mm,
        "coloring": lambda c, y: problems.check_coloring(c, y),
    }


def _pruners():
    return {
        "ruling1": prune_ruling(1),
        "ruling2": prune_ruling(2),
        "ruling3": prune_ruling(3),
        "mm": prune_mm(),
        "slc": prune_slc(),
    }


def _validate_experiment(exp: dict) -> None:
    name = exp.get("name", "?")
    if exp.get("algorithm") not in baselib._registry():
        raise click.ClickException(
            f"{name}: unknown algorithm {exp.get('algorithm')!r}")
    if exp.get("problem") not in _verifiers():
        raise click.ClickException(
            f"{name}: unknown problem {exp.get('problem')!r}")
    if exp.get("family") not in FAMILIES:
        raise click.ClickException(
            f"{name}: unknown family {exp.get('family')!r}")
    sizes = exp.get("sizes", [])
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise click.ClickException(
            f"{name}: size ladder must be strictly increasing")
    if exp.get("predictor"):
        parse_bound(exp["predictor"])  # fail early on typos


def _instance_p(exp: dict, n: int) -> float:
    if "p_over_n" in exp:
        return min(1.0, exp["p_over_n"] / n)
    if "p_log_over_n" in exp:
        return min(1.0, exp["p_log_over_n"] * math.log(n) / n)
    return exp.get("p", 0.0)


def _make_graph(exp: dict, n: int, seed: int) -> Graph:
    family = exp["family"]
    if family == "grid":
        rows = math.isqrt(n)
        while n % rows:
            rows -= 1
        return generate("grid", rows=rows, cols=n // rows, seed=seed)
    return generate(family, n=n, p=_instance_p(exp, n),
                    d=exp.get("d", 0), seed=seed)


def _run_one(exp: dict, n: int, seed: int) -> dict:
    """Build one instance, run the configured algorithm, verify."""
    g = _make_graph(exp, n, seed)
    c = Configuration(g)
    program = baselib.make_program(exp["algorithm"])
    outs, rep = run_sync(program, c, round_cap=exp.get("round_cap"),
                         seed=seed)
    valid = _verifiers()[exp["problem"]](c, outs)
    row = {"family": exp["family"], "n": g.n, "seed": seed,
           "rounds": rep.rounds_total,
           "iterations": len(rep.phase_breakdown),
           "messages": rep.messages_sent, "valid": valid}
    if exp["problem"] == "coloring":
        row["palette"] = max((v for v in outs.values()
                              if isinstance(v, int)), default=0)
    quantities = {"n": g.n, "m": max(g.num_edges, 1),
                  "deg": max(g.max_degree, 1), "max_id": g.max_id}
    bound = parse_bound(exp.get("predictor", "add(log)"))
    args = exp.get("predictor_args", ["n"])
    row["_pred"] = max(1, bound.eval([quantities[a] for a in args]))
    if not valid:
        row["_fail"] = {"family": exp["family"], "n": g.n, "seed": seed,
                        "edges": [[g.ids[u], g.ids[v]]
                                  for u, v in g.edges()],
                        "outputs": {str(k): repr(v)
                                    for k, v in outs.items()}}
    return row


def _write_csv(path: Path, rows: list) -> None:
    cols = [c for c in CSV_COLUMNS
            if c != "palette" or any("palette" in r for r in rows)]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for r in rows:
            vals = []
            for c in cols:
                v = r.get(c, "")
                vals.append(str(v).lower() if isinstance(v, bool)
                            else str(v))
            fh.write(",".join(vals) + "\n")


def _summarize(exp: dict, rows: list) -> dict:
    per_size = {}
    for r in rows:
        per_size.setdefault(r["n"], []).append(r)
    sizes = {}
    for n in sorted(per_size):
        grp = per_size[n]
        mean_rounds = sum(r["rounds"] for r in grp) / len(grp)
        mean_pred = sum(r["_pred"] for r in grp) / len(grp)
        sizes[str(n)] = {"runs": len(grp), "mean_rounds": mean_rounds,
                         "C": mean_rounds / mean_pred}
    cs = [s["C"] for s in sizes.values() if s["C"] > 0]
    return {"name": exp.get("name", exp["algorithm"]),
            "algorithm": exp["algorithm"], "problem": exp["problem"],
            "family": exp["family"], "runs": len(rows),
            "all_valid": all(r["valid"] for r in rows),
            "per_size": sizes,
            "fitted_C": max(cs) if cs else 0.0,
            "c_ratio": (max(cs) / min(cs)) if cs else 0.0}


@click.group()
def main():
    """Local-algorithm experiment harness."""


@main.command(name="run")
@click.option("--spec", "spec_path", required=True,
              type=click.Path(exists=True), help="TOML experiment spec.")
@click.option("--out", "out_dir", default="reports",
              type=click.Path(), help="report directory")
@click.option("--seeds", default=None, type=int,
              help="override the number of seeds per size")
@click.option("--max-n", default=None, type=int,
              help="drop ladder sizes above this")
@click.option("--parallel", default=0, type=int,
              help="worker processes (0 = in-process)")
def cmd_run(spec_path, out_dir, seeds, max_n, parallel):
    """Run the sweeps in a spec file; verify every output."""
    with open(spec_path, "rb") as fh:
        doc = tomllib.load(fh)
    exps = doc.get("experiment", [])
    if isinstance(exps, dict):
        exps = [exps]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    failed = False
    for exp in exps:
        _validate_experiment(exp)
        sizes = [n for n in exp.get("sizes", [])
                 if max_n is None or n <= max_n]
        seed_list = list(range(seeds if seeds is not None
                               else exp.get("seeds", 1)))
        jobs = [(n, s) for n in sizes for s in seed_list]
        if parallel > 1 and jobs:
            with ProcessPoolExecutor(max_workers=parallel) as pool:
                rows = list(pool.map(_run_one, [exp] * len(jobs),
                                     [n for n, _ in jobs],
                                     [s for _, s in jobs]))
        else:
            rows = [_run_one(exp, n, s) for n, s in jobs]
        rows.sort(key=lambda r: (r["n"], r["seed"]))
        name = exp.get("name", exp["algorithm"])
        _write_csv(out / f"{name}.csv", rows)
        with open(out / f"{name}.json", "w") as fh:
            json.dump(_summarize(exp, rows), fh, indent=2)
        bad = [r for r in rows if not r["valid"]]
        if bad:
            failed = True
            dump = out / f"{name}_counterexample.json"
            with open(dump, "w") as fh:
                json.dump(bad[0]["_fail"], fh, indent=2)
            click.echo(f"{name}: {len(bad)}/{len(rows)} runs failed "
                       f"verification; counterexample in {dump}", err=True)
        else:
            click.echo(f"{name}: {len(rows)} runs, all valid")
    if failed:
        sys.exit(1)


def _slc_config(g: Graph) -> Configuration:
    d = max(g.max_degree, 1)
    lists = [(k, j) for k in range(1, d + 2) for j in range(1, d + 2)]
    return Configuration(g, {nid: {"id": nid, "deg_bound": d,
                                   "lists": list(lists)}
                             for nid in g.ids})


@main.command(name="certify")
@click.argument("pruner", type=click.Choice(sorted(_pruners())))
@click.option("--max-n", default=4, type=int,
              help="certify on all graphs up to this size")
@click.option("--tentatives", default=None, type=int,
              help="random tentative outputs per graph "
                   "(default: exhaustive)")
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="write the JSON report here")
def cmd_certify(pruner, max_n, tentatives, out_path):
    """Certify a pruning algorithm on all small graphs."""
    if max_n > problems.ORACLE_CAP:
        raise click.ClickException(
            f"max-n {max_n} exceeds the oracle cap {problems.ORACLE_CAP}")
    pr = _pruners()[pruner]
    configs = []
    for n in range(1, max_n + 1):
        for g in all_graphs(n):
            configs.append(_slc_config(g) if pruner == "slc"
                           else Configuration(g))
    try:
        report = certify_pruning(pr, configs, report_path=out_path,
                                 max_tentatives=tentatives)
    except AssertionError as exc:
        click.echo(f"violation: {exc}", err=True)
        sys.exit(1)
    click.echo(json.dumps(report))


@main.command(name="table")
@click.argument("reports", nargs=-1, type=click.Path())
@click.option("--out", "out_path", default=None, type=click.Path())
def cmd_table(reports, out_path):
    """Merge JSON summaries into one comparison table."""
    lines = ["problem,algorithm,family,rounds_by_size,fitted_C"]
    for path in reports:
        if not Path(path).exists():
            raise click.ClickException(f"no such report: {path}")
        with open(path) as fh:
            s = json.load(fh)
        rounds = " ".join(f"{n}:{v['mean_rounds']:g}"
                          for n, v in s["per_size"].items())
        lines.append(f"{s['problem']},{s['algorithm']},{s['family']},"
                     f"{rounds},{s['fitted_C']:.3g}")
    text = "\n".join(lines) + "\n"
    if out_path:
        Path(out_path).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command(name="list")
def cmd_list():
    """Show the algorithm, pruner, problem, and family registries."""
    click.echo("algorithms: " + " ".join(sorted(baselib._registry())))
    click.echo("pruners:    " + " ".join(sorted(_pruners())))
    click.echo("problems:   " + " ".join(sorted(_verifiers())))
    click.echo("families:   " + " ".join(FAMILIES))


if __name__ == "__main__":
    main()
