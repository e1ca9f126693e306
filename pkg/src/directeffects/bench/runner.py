"""Seeded simulation grid runner, results table, summaries and real-data runs.

Seeds: every replicate draws from ``SeedSequence(master, spawn_key=(h, d, ...))``
where ``h`` is a stable hash of the grid cell, so a replicate's numbers do not
depend on which worker runs it or in what order.
"""

from __future__ import annotations

import csv
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .. import _seeding
from ..errors import DataError, SchemaError, UsageError
from ..metrics import METRIC_FIELDS, FindMetrics, aggregate, score, score_hct
from ..selectors import run_method
from ..simgen import gen_clustered, gen_serial, simulate_replicate
from ..snpio import GenotypeMatrix, encode, prevalence_filter, read_dataset
from .config import Cell, ExperimentConfig, method_name

log = logging.getLogger(__name__)

SCHEMA = "directeffects-results"
SCHEMA_VERSION = "1.0"
SUMMARY_SCHEMA = "directeffects-summary"
CELL_FIELDS = ("cell", "generator", "n", "p", "rho", "k", "effect", "n_causal")
RESULT_FIELDS = CELL_FIELDS + (
    "dataset", "replicate", "method", "scoring", "status", "error", "n_selected",
    *METRIC_FIELDS, "selected", "causal", "wall_time",
)
RATE_FIELDS = ("strong_true_find", "strong_false_find", "perfect_find")
RESULTS_NAME = "results.csv"


# --- seeds ----------------------------------------------------------------

def dataset_seed(master, cell: Cell, d):
    return np.random.SeedSequence(master, spawn_key=(_seeding.stable_hash(cell.key), d, 0))


def replicate_seed(master, cell: Cell, d, r):
    return np.random.SeedSequence(master, spawn_key=(_seeding.stable_hash(cell.key), d, 1, r))


def make_matrix(cell: Cell, seed):
    if cell.generator == "serial":
        return gen_serial(cell.generator_config(), seed)
    return gen_clustered(cell.generator_config(), seed)


# --- row formatting -------------------------------------------------------

def _fmt(v):
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def _cell_values(cell: Cell, n_causal, X=None):
    n, p = (cell.n, cell.p) if X is None else X.shape
    return {
        "cell": cell.key, "generator": cell.generator, "n": n, "p": p, "rho": cell.rho,
        "k": cell.k, "effect": cell.effect, "n_causal": n_causal,
    }


def _row(base, d, r, method, scoring, metrics=None, selected=(), causal=(), error=None, wall=0.0):
    row = dict(base)
    row.update(dataset=d, replicate=r, method=method, scoring=scoring)
    if metrics is None:
        row.update(status="failed", error=error, n_selected="")
        row.update({f: "" for f in METRIC_FIELDS})
    else:
        row.update(status="ok", error="", n_selected=len(selected))
        row.update(metrics.as_dict())
    row["selected"] = ";".join(str(j) for j in selected)
    row["causal"] = ";".join(str(j) for j in causal)
    row["wall_time"] = f"{wall:.4f}"
    return {k: _fmt(row[k]) for k in RESULT_FIELDS}


# --- work units -----------------------------------------------------------

def _run_replicate(cfg: ExperimentConfig, base, X, truth, y, seed, d, r):
    """All methods on one replicate; returns rows in method order."""
    rows = []
    cache = {}
    method_seed = _seeding.child(seed, 2)
    for name in cfg.methods:
        t0 = time.perf_counter()
        try:
            sel = run_method(method_name(name), X, y, method_seed, cfg.method_options(name), cache)
        except Exception as exc:  # recorded, never fatal for the grid
            wall = time.perf_counter() - t0
            log.warning("%s failed on %s d=%d r=%d: %s", name, base["cell"], d, r, exc)
            rows.append(_row(base, d, r, name, "strict", error=type(exc).__name__,
                             causal=truth.indices, wall=wall))
            if cfg.hct:
                rows.append(_row(base, d, r, name, "hct", error=type(exc).__name__,
                                 causal=truth.indices, wall=wall))
            continue
        wall = time.perf_counter() - t0
        rows.append(_row(base, d, r, name, "strict", score(sel, truth), sel.selected, truth.indices, wall=wall))
        if cfg.hct:
            rows.append(_row(base, d, r, name, "hct", score_hct(sel, truth, X, cfg.hct_corr),
                             sel.selected, truth.indices, wall=wall))
    return rows


def _replicate_task(args):
    """One (cell, dataset, replicate). The dataset's matrix is regenerated
    from its own seed, which is cheap next to the method fits and keeps
    tasks independent."""
    cfg, cell, d, r, X = args
    if X is None:
        X = make_matrix(cell, dataset_seed(cfg.seed, cell, d))
    base = _cell_values(cell, cfg.n_causal, X)
    seed = replicate_seed(cfg.seed, cell, d, r)
    try:
        rep = simulate_replicate(X, cfg.n_causal, cell.effect, seed)
    except Exception as exc:
        log.warning("replicate generation failed on %s d=%d r=%d: %s", cell.key, d, r, exc)
        return [
            _row(base, d, r, name, scoring, error=type(exc).__name__)
            for name in cfg.methods
            for scoring in (("strict", "hct") if cfg.hct else ("strict",))
        ]
    return _run_replicate(cfg, base, X, rep.truth, rep.y, seed, d, r)


def _file_matrix(cfg: ExperimentConfig):
    data, _ = read_dataset(cfg.data_file)
    if isinstance(data, GenotypeMatrix):
        data = prevalence_filter(encode(data))
    return data.matrix


def _tasks(cfg: ExperimentConfig):
    X = _file_matrix(cfg) if cfg.generator == "file" else None
    for cell in cfg.cells():
        for d in range(cfg.datasets):
            for r in range(cfg.replicates):
                yield (cfg, cell, d, r, X)


# --- run ------------------------------------------------------------------

def header_line(schema=SCHEMA, version=SCHEMA_VERSION):
    return f"# schema={schema} version={version}\n"


def run(cfg: ExperimentConfig, output=None, workers=None, append=False):
    """Run the whole grid and write ``<output>/results.csv``.

    Work is split per replicate; results are written by this process
    alone, in task order, so the file is the same for any pool width.
    Returns the path of the results table.
    """
    cfg.validate()
    out_dir = Path(output or cfg.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / RESULTS_NAME
    (out_dir / "config.ini").write_text(cfg.to_ini())
    workers = workers or cfg.worker_count()
    if append and path.exists():
        read_results(path)  # schema check before touching the file
        fh = open(path, "a", newline="")
        writer = csv.DictWriter(fh, fieldnames=RESULT_FIELDS, lineterminator="\n")
    else:
        fh = open(path, "w", newline="")
        fh.write(header_line())
        writer = csv.DictWriter(fh, fieldnames=RESULT_FIELDS, lineterminator="\n")
        writer.writeheader()
    with fh:
        tasks = _tasks(cfg)
        if workers == 1:
            for rows in map(_replicate_task, tasks):
                writer.writerows(rows)
                fh.flush()
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for rows in pool.map(_replicate_task, tasks, chunksize=4):
                    writer.writerows(rows)
                    fh.flush()
    return path


# --- reading and summarizing ----------------------------------------------

def _check_header(first, schema, path):
    line = first.strip()
    expect = f"# schema={schema} version="
    if not line.startswith(expect):
        raise SchemaError(f"{path}: missing '{expect}<major.minor>' header")
    version = line[len(expect):]
    if version.split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise SchemaError(f"{path}: schema version {version} is incompatible with {SCHEMA_VERSION}")


def read_results(path):
    """Rows of a results table as dicts of strings; validates the schema."""
    path = Path(path)
    with open(path, newline="") as fh:
        first = fh.readline()
        _check_header(first, SCHEMA, path)
        reader = csv.DictReader(fh)
        missing = set(RESULT_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise SchemaError(f"{path}: missing columns {sorted(missing)}")
        return list(reader)


GROUP_FIELDS = CELL_FIELDS + ("method", "scoring")
SUMMARY_FIELDS = GROUP_FIELDS + ("count", "failed") + tuple(
    f"{kind}_{m}" for m in METRIC_FIELDS for kind in ("mean", "se")
)


def _metrics_from_row(row):
    return FindMetrics(
        true_finds=int(row["true_finds"]),
        false_finds=int(row["false_finds"]),
        strong_true_find=row["strong_true_find"] == "1",
        strong_false_find=row["strong_false_find"] == "1",
        perfect_find=row["perfect_find"] == "1",
        fdr=float(row["fdr"]),
    )


def summarize_rows(rows):
    """Group by (cell, method, scoring): replicate count, failures, and the
    mean and standard error of each metric over successful replicates."""
    groups = {}
    for row in rows:
        key = tuple(row[f] for f in GROUP_FIELDS)
        groups.setdefault(key, []).append(row)
    out = []
    for key, items in groups.items():
        ok = [r for r in items if r["status"] == "ok"]
        rec = dict(zip(GROUP_FIELDS, key))
        rec["count"] = str(len(ok))
        rec["failed"] = str(len(items) - len(ok))
        if ok:
            agg = aggregate(_metrics_from_row(r) for r in ok)
            for m in METRIC_FIELDS:
                rec[f"mean_{m}"] = repr(agg.mean[m])
                rec[f"se_{m}"] = repr(agg.se[m])
        else:
            for m in METRIC_FIELDS:
                rec[f"mean_{m}"] = rec[f"se_{m}"] = ""
        out.append(rec)
    return out


def summarize(path, output=None):
    """Summary CSV for a results table. Written next to it as
    ``summary.csv`` unless ``output`` is given; returns the output path."""
    rows = read_results(path)
    summary = summarize_rows(rows)
    output = Path(output) if output else Path(path).with_name("summary.csv")
    buf = io.StringIO()
    buf.write(header_line(SUMMARY_SCHEMA))
    w = csv.DictWriter(buf, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(summary)
    output.write_text(buf.getvalue())
    return output


def read_summary(path):
    path = Path(path)
    with open(path, newline="") as fh:
        _check_header(fh.readline(), SUMMARY_SCHEMA, path)
        reader = csv.DictReader(fh)
        missing = set(SUMMARY_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise SchemaError(f"{path}: missing columns {sorted(missing)}")
        return list(reader)


# --- real data ------------------------------------------------------------

def load_real(path, min_prev=0.05):
    """Read a dataset with bundled response; genotype files are encoded and
    filtered, binary files are used as they are."""
    data, y = read_dataset(path)
    if y is None:
        raise DataError(f"{path}: no bundled response ('#response' block)")
    if isinstance(data, GenotypeMatrix):
        data = prevalence_filter(encode(data), min_prev)
    return data, y


def run_real(path, methods, cfg: ExperimentConfig | None = None, output=None, min_prev=0.05):
    """Run each method once on the full data and write a predictor x method
    incidence table (``x`` marks a find). Only predictors found by at least
    one method are listed. Returns ``(output path, {method: SelectionResult})``."""
    methods = list(methods)
    if not methods:
        raise UsageError("run-real needs at least one method")
    for m in methods:
        method_name(m)
    cfg = cfg or ExperimentConfig()
    data, y = load_real(path, min_prev)
    X = data.matrix
    seed = np.random.SeedSequence(cfg.seed, spawn_key=(_seeding.stable_hash(Path(path).name),))
    cache, results = {}, {}
    for name in methods:
        results[name] = run_method(method_name(name), X, y, seed, cfg.method_options(name), cache)
    found = sorted(set().union(*(r.selected for r in results.values())))
    output = Path(output) if output else Path(cfg.output) / "finds.csv"
    output.parent.mkdir(parents=True, exist_ok=True)
    with open(output, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["predictor", "snp", "kind", *methods])
        for j in found:
            label = X.labels[j]
            snp, kind = data.provenance.get(label, (label, ""))
            w.writerow([label, snp, kind, *("x" if j in results[m].selected else "" for m in methods)])
    return output, results


# --- gen-data -------------------------------------------------------------

def gen_data(cell: Cell, n_causal, seed, path, with_response=True):
    """Simulate one dataset (and one replicate's response) and write it in
    the dataset text format. Returns ``(X, truth or None, y or None)``."""
    from ..snpio import write_dataset

    master = _seeding.seed_sequence(seed)
    X = make_matrix(cell, _seeding.child(master, 0))
    truth = y = None
    if with_response:
        rep = simulate_replicate(X, n_causal, cell.effect, _seeding.child(master, 1))
        truth, y = rep.truth, rep.y
    write_dataset(path, X, y)
    return X, truth, y
