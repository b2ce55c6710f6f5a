"""
AMIF-MDS pipeline orchestration
Commands: synth, analyze, mds, cluster, render, recover, rerun.
Every stage is timed and named in errors; every file-producing command
writes a JSON manifest from which it can be re-run bit-identically.
"""

import logging
import os
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, replace
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src import __version__
from src.amif_engine import AmifConfig, AmifEngine, Normalization, SimilarityMatrix, refine
from src.analysis_engine import ClusterAnalyzer, partner_recovery_rate
from src.baselines import BaselineMetric, baseline_similarity_matrix, euclidean_dissim
from src.clustering import ClusterAssignment, DbscanConfig, adjusted_rand_index, dbscan
from src.errors import AmifError, ConfigError, DataError, NumericalError
from src.mds import classical_mds, embedding_to_csv_text, load_embedding_csv
from src.mi_estimator import MiConfig
from src.series_table import (
    LabelVector,
    SeriesTable,
    labels_to_csv_text,
    load_csv,
    load_labels_csv,
    standardize,
    table_to_csv_text,
)
from src.svg_renderer import heatmap_svg, scatter_svg
from src.synth_generator import SynthConfig, generate
from src.transforms import DissimilarityMatrix, TransformConfig, TransformKind, to_dissimilarity
from src.utils import (
    ManifestManager,
    atomic_write_text,
    file_digest,
    frame_to_csv_text,
    load_matrix_csv,
    matrix_to_csv_text,
    text_digest,
)

logger = logging.getLogger(__name__)

MEASURES = ("amif", "macc", "maccoeff", "euclidean")


# ===============================
# 1. Options
# ===============================

@dataclass(frozen=True)
class SynthOptions:
    out_dir: str = "synth_out"
    length: int = 2048
    parents: int = 8
    alpha: float = 1e-3
    seed: int = 0


@dataclass(frozen=True)
class AnalyzeOptions:
    input: str = ""
    out_dir: str = "amif_out"
    measure: str = "amif"
    q: float = 0.5
    nf: int = 16
    k: int = 3
    distance_floor: float = 1e-12
    normalization: str = Normalization.MEAN_FREQUENCY_COUNT.value
    transform: str = TransformKind.MEMBERSHIP.value
    epsilon: float = 1e-9
    max_lag: Optional[int] = None
    mds_dim: int = 2
    dbscan_eps: Optional[float] = None
    dbscan_minpts: int = 1
    standardize: bool = True
    drop_incomplete: bool = True
    sample_interval: Optional[float] = None
    labels: Optional[str] = None
    svg: bool = True
    heatmap: bool = False
    n_jobs: int = 1

    def __post_init__(self):
        if not self.input:
            raise ConfigError("analyze needs an input series CSV")
        if self.measure not in MEASURES:
            raise ConfigError(f"measure must be one of {', '.join(MEASURES)}, got {self.measure!r}")

    def amif_config(self) -> AmifConfig:
        return AmifConfig(
            n_f=self.nf,
            q=self.q,
            mi=MiConfig(k=self.k, distance_floor=self.distance_floor),
            normalization=self.normalization,
        )

    def transform_config(self) -> TransformConfig:
        return TransformConfig(kind=self.transform, epsilon=self.epsilon)


@dataclass(frozen=True)
class MdsOptions:
    input: str = ""
    output: str = "embedding.csv"
    dim: int = 2


@dataclass(frozen=True)
class ClusterOptions:
    input: str = ""
    output: str = "clusters.csv"
    eps: float = 0.15
    min_pts: int = 1


@dataclass(frozen=True)
class RenderOptions:
    input: str = ""
    output: str = "scatter.svg"


# ===============================
# 2. Stage bookkeeping
# ===============================

@contextmanager
def stage(name: str, timings: Dict[str, float]):
    """Time a stage and prefix any analyzer error with the stage name."""
    start = time.perf_counter()
    try:
        yield
    except AmifError as e:
        raise type(e)(f"[{name}] {e}") from e
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"[{name}] {e}") from e
    finally:
        timings[name] = time.perf_counter() - start


def _write_outputs(files: Dict[str, str]) -> Dict[str, str]:
    """Write every (path -> text) atomically; returns path -> sha256."""
    digests = {}
    for path, text in files.items():
        atomic_write_text(path, text)
        digests[path] = text_digest(text)
    return digests


def _save_manifest(command: str, options, inputs: Dict[str, str], outputs: Dict[str, str],
                   timings: Dict[str, float], warnings: List[str], path: str, extra: Optional[Dict] = None) -> Dict:
    manager = ManifestManager(__version__)
    manifest = manager.build(command, asdict(options), inputs, outputs, timings, warnings, extra)
    manager.save(manifest, path)
    return manifest


# ===============================
# 3. synth
# ===============================

def run_synth(opts: SynthOptions) -> Dict:
    timings: Dict[str, float] = {}
    cfg = SynthConfig(length=opts.length, n_parents=opts.parents, trend_scale=opts.alpha, seed=opts.seed)
    with stage("generate", timings):
        table, labels, notes = generate(cfg)

    series_path = os.path.join(opts.out_dir, "series.csv")
    labels_path = os.path.join(opts.out_dir, "labels.csv")
    with stage("write", timings):
        outputs = _write_outputs({
            series_path: table_to_csv_text(table),
            labels_path: labels_to_csv_text(table.names, labels),
        })
    manifest = _save_manifest(
        "synth", opts, {}, outputs, timings, notes, os.path.join(opts.out_dir, "manifest.json"),
        extra={"synth_config": asdict(cfg)},
    )
    return {"table": table, "labels": labels, "manifest": manifest, "paths": [series_path, labels_path]}


# ===============================
# 4. analyze
# ===============================

def _align_labels(truth: LabelVector, table: SeriesTable) -> LabelVector:
    """Reorder/subset ground-truth labels to the table's surviving columns."""
    if truth.names is None:
        truth.check_against(table)
        return truth
    index = {name: i for i, name in enumerate(truth.names)}
    missing = [n for n in table.names if n not in index]
    if missing:
        raise DataError(f"no label for series {', '.join(missing)}")
    return LabelVector(truth.labels[[index[n] for n in table.names]], names=table.names)


def measure_similarity(table: SeriesTable, opts: AnalyzeOptions) -> SimilarityMatrix:
    if opts.measure == "amif":
        return refine(AmifEngine(opts.amif_config(), n_jobs=opts.n_jobs).similarity_matrix(table))
    return refine(baseline_similarity_matrix(table, BaselineMetric(opts.measure), opts.max_lag))


def run_analyze(opts: AnalyzeOptions) -> Dict:
    """
    load -> standardize -> measure -> transform -> MDS -> DBSCAN -> write.

    Every artifact is computed in memory first, so a failing stage writes
    nothing.
    """
    timings: Dict[str, float] = {}
    warnings: List[str] = []
    inputs = {"series": opts.input}

    with stage("load", timings):
        table = load_csv(opts.input, drop_incomplete=opts.drop_incomplete, sample_interval=opts.sample_interval)
        truth = None
        if opts.labels:
            inputs["labels"] = opts.labels
            truth = _align_labels(load_labels_csv(opts.labels), table)
    warnings += [f"excluded: {name}: {reason}" for name, reason in table.excluded.items()]

    if opts.standardize:
        with stage("standardize", timings):
            table = standardize(table)

    similarity = None
    with stage("measure", timings):
        if opts.measure == "euclidean":
            dissim = euclidean_dissim(table)
        else:
            similarity = measure_similarity(table, opts)

    if similarity is not None:
        with stage("transform", timings):
            dissim = to_dissimilarity(similarity, opts.transform_config())

    with stage("mds", timings):
        embedding = classical_mds(dissim, opts.mds_dim)
    if embedding.dropped:
        warnings.append(
            f"MDS: non-positive eigenvalues for dims {[c + 1 for c in embedding.dropped]}; coordinates set to zero"
        )

    clusters = None
    summary: Dict = {}
    if opts.dbscan_eps is not None:
        with stage("cluster", timings):
            clusters = dbscan(embedding.coords, DbscanConfig(opts.dbscan_eps, opts.dbscan_minpts), names=table.names)
            summary = ClusterAnalyzer().analyze(table.names, clusters, similarity, dissim, truth)
    elif truth is not None:
        summary = {"partner_recovery": partner_recovery_rate(dissim, truth)}

    out = opts.out_dir
    files = {}
    with stage("render", timings):
        if similarity is not None:
            files[os.path.join(out, "similarity.csv")] = matrix_to_csv_text(similarity.names, similarity.values)
        files[os.path.join(out, "dissimilarity.csv")] = matrix_to_csv_text(dissim.names, dissim.values)
        files[os.path.join(out, "embedding.csv")] = embedding_to_csv_text(embedding, clusters)
        if opts.svg and embedding.d <= 3:
            files[os.path.join(out, "scatter.svg")] = scatter_svg(embedding, clusters)
        if opts.heatmap:
            files[os.path.join(out, "heatmap.svg")] = heatmap_svg(dissim)

    with stage("write", timings):
        outputs = _write_outputs(files)

    manifest = _save_manifest(
        "analyze", opts, inputs, outputs, timings, warnings, os.path.join(out, "manifest.json"),
        extra={
            "series": table.names,
            "sample_interval": table.sample_interval,
            "eigenvalues": embedding.eigenvalues.tolist(),
            "summary": summary,
        },
    )
    return {
        "table": table,
        "similarity": similarity,
        "dissimilarity": dissim,
        "embedding": embedding,
        "clusters": clusters,
        "summary": summary,
        "manifest": manifest,
        "paths": list(files),
    }


# ===============================
# 5. File-chaining commands
# ===============================

def run_mds(opts: MdsOptions) -> Dict:
    timings: Dict[str, float] = {}
    with stage("load", timings):
        names, values = load_matrix_csv(opts.input)
        dissim = DissimilarityMatrix(names, values)
    with stage("mds", timings):
        embedding = classical_mds(dissim, opts.dim)
    warnings = [f"MDS: non-positive eigenvalue for dim {c + 1}" for c in embedding.dropped]
    with stage("write", timings):
        outputs = _write_outputs({opts.output: embedding_to_csv_text(embedding)})
    manifest = _save_manifest("mds", opts, {"dissimilarity": opts.input}, outputs, timings, warnings,
                              opts.output + ".manifest.json", extra={"eigenvalues": embedding.eigenvalues.tolist()})
    return {"embedding": embedding, "manifest": manifest}


def run_cluster(opts: ClusterOptions) -> Dict:
    timings: Dict[str, float] = {}
    with stage("load", timings):
        embedding, _ = load_embedding_csv(opts.input)
    with stage("cluster", timings):
        clusters = dbscan(embedding.coords, DbscanConfig(opts.eps, opts.min_pts), names=embedding.names)
    with stage("write", timings):
        outputs = _write_outputs({opts.output: embedding_to_csv_text(embedding, clusters)})
    manifest = _save_manifest("cluster", opts, {"embedding": opts.input}, outputs, timings, [],
                              opts.output + ".manifest.json", extra={"n_clusters": clusters.n_clusters})
    return {"clusters": clusters, "manifest": manifest}


def run_render(opts: RenderOptions) -> Dict:
    timings: Dict[str, float] = {}
    with stage("load", timings):
        embedding, labels = load_embedding_csv(opts.input)
    clusters = ClusterAssignment(labels) if labels is not None else None
    with stage("render", timings):
        outputs = _write_outputs({opts.output: scatter_svg(embedding, clusters)})
    manifest = _save_manifest("render", opts, {"embedding": opts.input}, outputs, timings, [],
                              opts.output + ".manifest.json")
    return {"manifest": manifest}


def load_partition(path: str) -> LabelVector:
    """A "name,label" file or an embedding CSV carrying a cluster column."""
    try:
        with open(path, encoding="utf-8") as f:
            header = f.readline().strip().split(",")
    except (OSError, UnicodeDecodeError) as e:
        raise DataError(f"cannot read {path}: {e}") from e
    if header[:2] == ["name", "label"]:
        return load_labels_csv(path)
    embedding, labels = load_embedding_csv(path)
    if labels is None:
        raise DataError(f"{path}: no label or cluster column")
    return LabelVector(labels, names=embedding.names)


def run_ari(path_a: str, path_b: str) -> float:
    """ARI between two partitions, matched by series name."""
    a, b = load_partition(path_a), load_partition(path_b)
    if sorted(a.names) != sorted(b.names):
        raise DataError(f"{path_a} and {path_b} label different series")
    position = {name: i for i, name in enumerate(b.names)}
    aligned = b.labels[[position[name] for name in a.names]]
    return adjusted_rand_index(ClusterAssignment(a.labels), ClusterAssignment(aligned))


# ===============================
# 6. Synthetic recovery experiment
# ===============================

def recovery_rows(table: SeriesTable, labels: LabelVector, settings: Sequence, seed: int, n_jobs: int = 1,
                  k: int = 3) -> List[Dict]:
    """
    Partner-recovery rates for one synthetic table.

    settings is a sequence of (q, n_f). Rows cover AMIF under both transforms
    for every setting, MACC and MACCoeff under both transforms, and Euclidean.
    """
    truth = labels.labels
    cross = truth[:, None] != truth[None, :]

    def row(measure, transform, dissim, q=None, nf=None):
        return {
            "seed": seed, "measure": measure, "q": q, "nf": nf, "transform": transform,
            "recovery": partner_recovery_rate(dissim, labels),
            "median_cross_family": float(np.median(dissim.values[cross])),
        }

    rows = []
    for q, nf in settings:
        cfg = AmifConfig(n_f=nf, q=q, mi=MiConfig(k=k))
        similarity = refine(AmifEngine(cfg, n_jobs=n_jobs).similarity_matrix(table))
        for kind in TransformKind:
            rows.append(row("amif", kind.value, to_dissimilarity(similarity, TransformConfig(kind)), q, nf))
    for metric in BaselineMetric:
        similarity = refine(baseline_similarity_matrix(table, metric))
        for kind in TransformKind:
            rows.append(row(metric.value, kind.value, to_dissimilarity(similarity, TransformConfig(kind))))
    rows.append(row("euclidean", None, euclidean_dissim(table)))
    return rows


def run_recover(seeds: Sequence[int], out: str, length: int = 2048, parents: int = 8, alpha: float = 1e-3,
                settings: Sequence = ((0.5, 16), (0.5, 32), (1.0, 16), (1.0, 32)), n_jobs: int = 1) -> pd.DataFrame:
    rows = []
    for seed in seeds:
        table, labels, _ = generate(SynthConfig(length=length, n_parents=parents, trend_scale=alpha, seed=seed))
        rows += recovery_rows(table, labels, settings, seed, n_jobs=n_jobs)
    frame = pd.DataFrame(rows)
    atomic_write_text(out, frame_to_csv_text(frame))
    return frame


# ===============================
# 7. Re-run from a manifest
# ===============================

COMMANDS = {
    "synth": (SynthOptions, run_synth),
    "analyze": (AnalyzeOptions, run_analyze),
    "mds": (MdsOptions, run_mds),
    "cluster": (ClusterOptions, run_cluster),
    "render": (RenderOptions, run_render),
}


def run_from_manifest(path: str, out_dir: Optional[str] = None) -> Dict:
    """
    Repeat the run a manifest describes.

    out_dir redirects outputs (out_dir for synth/analyze, the output file's
    directory otherwise). A changed input digest is reported, not fatal.
    """
    manifest = ManifestManager.load(path)
    command = manifest["command"]
    if command not in COMMANDS:
        raise DataError(f"manifest {path}: cannot re-run command {command!r}")
    options_cls, runner = COMMANDS[command]
    try:
        opts = options_cls(**manifest["config"])
    except TypeError as e:
        raise DataError(f"manifest {path}: incompatible config ({e})") from e

    for role, record in manifest.get("inputs", {}).items():
        if not os.path.isfile(record["path"]):
            raise DataError(f"manifest {path}: {role} input {record['path']} is missing")
        if file_digest(record["path"]) != record["sha256"]:
            logger.warning(f"{role} input {record['path']} changed since the recorded run")

    if out_dir is not None:
        if hasattr(opts, "out_dir"):
            opts = replace(opts, out_dir=out_dir)
        else:
            opts = replace(opts, output=os.path.join(out_dir, os.path.basename(opts.output)))
    return runner(opts)
