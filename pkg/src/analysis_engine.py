"""
Cluster analysis for AMIF-MDS results
Nearest-neighbor partner recovery, per-cluster core series selection and a
run summary built from the clustering.
"""

from typing import Dict, List, Optional

import numpy as np

from src.amif_engine import SimilarityMatrix
from src.clustering import NOISE, ClusterAssignment, adjusted_rand_index
from src.errors import DataError
from src.series_table import LabelVector
from src.transforms import DissimilarityMatrix


def nearest_neighbors(dissim: DissimilarityMatrix) -> np.ndarray:
    """Index of each series' closest other series (lowest index on ties)."""
    values = np.array(dissim.values, dtype=float)
    if values.shape[0] < 2:
        raise DataError("nearest neighbors need at least 2 series")
    np.fill_diagonal(values, np.inf)
    return np.argmin(values, axis=1)


def partner_recovery_rate(dissim: DissimilarityMatrix, labels: LabelVector) -> float:
    """Fraction of series whose nearest neighbor carries the same ground-truth label."""
    truth = labels.labels if isinstance(labels, LabelVector) else np.asarray(labels)
    if truth.size != dissim.size:
        raise DataError(f"{truth.size} labels for {dissim.size} series")
    nn = nearest_neighbors(dissim)
    return float(np.mean(truth[nn] == truth))


def select_core_series(similarity: SimilarityMatrix, assignment: ClusterAssignment) -> Dict[int, str]:
    """
    One representative per cluster: the member sharing the most information
    with the rest of its cluster (largest summed off-diagonal similarity,
    lowest index on ties). Noise points are not represented.
    """
    if len(assignment) != similarity.size:
        raise DataError(f"{len(assignment)} cluster labels for {similarity.size} series")
    values = np.array(similarity.values, dtype=float)
    np.fill_diagonal(values, 0.0)

    core = {}
    for cluster in sorted(set(assignment.labels.tolist()) - {NOISE}):
        members = assignment.members(cluster)
        totals = values[np.ix_(members, members)].sum(axis=1)
        core[cluster] = similarity.names[members[int(np.argmax(totals))]]
    return core


class ClusterAnalyzer:
    """Summarizes a clustering of series, optionally against ground truth."""

    def analyze(
        self,
        names: List[str],
        assignment: ClusterAssignment,
        similarity: Optional[SimilarityMatrix] = None,
        dissim: Optional[DissimilarityMatrix] = None,
        truth: Optional[LabelVector] = None,
    ) -> Dict:
        """
        Returns:
            {
                'n_clusters': int,
                'n_noise': int,
                'clusters': {id: [names]},
                'singletons': [names],
                'core_series': {id: name} (when a similarity matrix is given),
                'ari': float (with ground truth),
                'partner_recovery': float (with ground truth and dissimilarities)
            }
        """
        clusters = {
            int(c): [names[i] for i in assignment.members(c)]
            for c in sorted(set(assignment.labels.tolist()) - {NOISE})
        }
        summary = {
            "n_clusters": assignment.n_clusters,
            "n_noise": assignment.n_noise,
            "clusters": clusters,
            "singletons": [members[0] for members in clusters.values() if len(members) == 1],
        }
        if similarity is not None:
            summary["core_series"] = select_core_series(similarity, assignment)
        if truth is not None:
            summary["ari"] = adjusted_rand_index(ClusterAssignment(truth.labels), assignment)
            if dissim is not None:
                summary["partner_recovery"] = partner_recovery_rate(dissim, truth)
        return summary

    def generate_executive_summary(self, summary: Dict) -> str:
        """Plain-text report lines for the CLI."""
        lines = [f"{summary['n_clusters']} clusters, {summary['n_noise']} noise points"]
        core = summary.get("core_series", {})
        for cluster, members in summary["clusters"].items():
            marker = f" (core: {core[cluster]})" if cluster in core else ""
            lines.append(f"  cluster {cluster}: {', '.join(members)}{marker}")
        if "ari" in summary:
            lines.append(f"  ARI vs ground truth: {summary['ari']:.4f}")
        if "partner_recovery" in summary:
            lines.append(f"  nearest-neighbor partner recovery: {summary['partner_recovery']:.3f}")
        return "\n".join(lines)
