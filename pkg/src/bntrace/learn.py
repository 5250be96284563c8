"""Learning networks from data and releasing synthetic records.

Structure search is a greedy parent search driven by an entropy-based
correlation: corr(X, Y) = 2 - 2*H(X, Y) / (H(X) + H(Y)) with natural-log
entropies, so corr is 0 for independent columns and 1 for identical ones.
A candidate parent set S for node i scores

    score(S) = sum_{j in S} corr(X_i, X_j)
               / sqrt(|S| + 2 * sum_{j<k in S} corr(X_j, X_k))

(the doubled pair sum counts ordered pairs; pass pairs="unordered" to count
each pair once).  Each sweep proposes at most one new parent per node, keeps
only strict score improvements, and applies additions in node order provided
acyclicity and the parent cap survive.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .bn import BayesianNetwork, NetworkStructure, sample
from .dataset import Dataset
from .errors import ValidationError

__all__ = [
    "PriorSpec",
    "StructureSearchConfig",
    "LowSupportRow",
    "entropy_correlation",
    "correlation_matrix",
    "parent_score",
    "learn_structure",
    "learn_parameters",
    "min_support_filter",
    "synthesize",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PriorSpec:
    """Symmetric Dirichlet pseudo-count added to every CPT cell."""

    pseudo_count: float = 1.0

    def __post_init__(self):
        if not self.pseudo_count > 0:
            raise ValidationError(
                f"pseudo_count must be positive, got {self.pseudo_count}"
            )


@dataclass(frozen=True)
class StructureSearchConfig:
    """Greedy-search knobs.

    `seed` is reserved for randomized tie-breaking and unused by the default
    deterministic policy.  `pairs` picks how the score denominator counts
    parent-parent correlations (each unordered pair twice, or once).
    """

    eta: int
    seed: int = 0
    pairs: str = "ordered"

    def __post_init__(self):
        if self.eta < 0:
            raise ValidationError(f"eta must be non-negative, got {self.eta}")
        if self.pairs not in ("ordered", "unordered"):
            raise ValidationError(f"pairs must be 'ordered' or 'unordered', got {self.pairs!r}")


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    positive = counts[counts > 0].astype(np.float64)
    return float(np.log(total) - (positive * np.log(positive)).sum() / total)


def entropy_correlation(dataset: Dataset, i: int, j: int) -> float:
    """Entropy correlation of two columns; 0 when either column is constant."""
    if i == j:
        raise ValidationError("entropy_correlation needs two distinct columns")
    if dataset.row_count == 0:
        raise ValidationError("dataset must be non-empty")
    ci, cj = dataset.cardinalities[i], dataset.cardinalities[j]
    code = dataset.column(i) * cj + dataset.column(j)
    joint = np.bincount(code, minlength=ci * cj).reshape(ci, cj)
    h_i = _entropy(joint.sum(axis=1))
    h_j = _entropy(joint.sum(axis=0))
    if h_i + h_j == 0.0:
        return 0.0
    value = 2.0 - 2.0 * _entropy(joint.ravel()) / (h_i + h_j)
    return float(min(1.0, max(0.0, value)))


def correlation_matrix(dataset: Dataset) -> np.ndarray:
    """All pairwise entropy correlations; diagonal set to 1.

    Binary datasets take a matmul fast path (all pairs at once); mixed
    cardinalities fall back to per-pair contingency tables.
    """
    if dataset.row_count == 0:
        raise ValidationError("dataset must be non-empty")
    n, m = dataset.records.shape
    if all(c == 2 for c in dataset.cardinalities):
        x = dataset.records.astype(np.float64)
        ones = x.sum(axis=0)
        c11 = x.T @ x
        c10 = ones[:, None] - c11
        c01 = ones[None, :] - c11
        c00 = n - ones[:, None] - ones[None, :] + c11

        def xlogx(a):
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(a > 0, a * np.log(np.maximum(a, 1.0)), 0.0)

        joint_sum = xlogx(c00) + xlogx(c01) + xlogx(c10) + xlogx(c11)
        h2 = np.log(n) - joint_sum / n
        h1 = np.array([_entropy(np.array([n - k, k])) for k in ones])
        denom = h1[:, None] + h1[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            corr = np.where(denom > 0, 2.0 - 2.0 * h2 / denom, 0.0)
        corr = np.clip(corr, 0.0, 1.0)
    else:
        corr = np.zeros((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                corr[i, j] = corr[j, i] = entropy_correlation(dataset, i, j)
    np.fill_diagonal(corr, 1.0)
    return corr


def _score(corr: np.ndarray, i: int, parents, pairs: str) -> float:
    if not parents:
        return 0.0
    idx = list(parents)
    numerator = float(corr[i, idx].sum())
    sub = corr[np.ix_(idx, idx)]
    off_diagonal = float(sub.sum() - np.trace(sub))  # ordered pairs j != k
    if pairs == "unordered":
        off_diagonal /= 2.0
    return numerator / float(np.sqrt(len(idx) + off_diagonal))


def parent_score(dataset: Dataset, i: int, candidate_parents, pairs: str = "ordered") -> float:
    """Score of a candidate parent set for node i (empty set scores 0)."""
    candidates = list(candidate_parents)
    if i in candidates:
        raise ValidationError("a node cannot parent itself")
    if len(set(candidates)) != len(candidates):
        raise ValidationError(f"duplicate candidate parents {candidates}")
    nodes = sorted({i, *candidates})
    corr = np.ones((dataset.attribute_count, dataset.attribute_count))
    for a_pos, a in enumerate(nodes):
        for b in nodes[a_pos + 1 :]:
            corr[a, b] = corr[b, a] = entropy_correlation(dataset, a, b)
    return _score(corr, i, candidates, pairs)


def learn_structure(dataset: Dataset, config: StructureSearchConfig) -> NetworkStructure:
    """Greedy parent search under the eta cap; deterministic given the data.

    Ties between equal-scoring candidates go to the lowest index, and when two
    additions in one sweep would form a 2-cycle the lower-indexed child wins.
    """
    m = dataset.attribute_count
    corr = correlation_matrix(dataset)
    parents: list[list[int]] = [[] for _ in range(m)]
    parent_sets: list[set[int]] = [set() for _ in range(m)]
    children: list[set[int]] = [set() for _ in range(m)]

    def has_path(src: int, dst: int) -> bool:
        # True when dst is reachable from src along child edges.
        stack, seen = [src], {src}
        while stack:
            node = stack.pop()
            if node == dst:
                return True
            for child in children[node]:
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        return False

    while True:
        proposals: list[tuple[int, int]] = []
        for i in range(m):
            if len(parents[i]) >= config.eta:
                continue
            base = _score(corr, i, parents[i], config.pairs)
            best_j, best_score = None, base
            for j in range(m):
                if j == i or j in parent_sets[i] or has_path(i, j):
                    continue
                trial = _score(corr, i, parents[i] + [j], config.pairs)
                if trial > best_score:
                    best_j, best_score = j, trial
            if best_j is not None:
                proposals.append((i, best_j))
        applied = False
        for i, j in proposals:  # ascending child index
            if has_path(i, j):
                continue  # an earlier addition this sweep would make this a cycle
            parents[i].append(j)
            parent_sets[i].add(j)
            children[j].add(i)
            applied = True
        if not applied:
            break

    return NetworkStructure(
        dataset.cardinalities, tuple(tuple(ps) for ps in parents), eta=config.eta
    )


def _count_tables(dataset: Dataset, structure: NetworkStructure) -> list[np.ndarray]:
    rec = dataset.records
    tables = []
    for i in range(structure.node_count):
        k = structure.cardinalities[i]
        rows = structure.parent_row_count(i)
        ps = structure.parents[i]
        if ps:
            row_idx = rec[:, list(ps)] @ structure.radix_weights(i)
        else:
            row_idx = np.zeros(rec.shape[0], dtype=np.int64)
        flat = np.bincount(row_idx * k + rec[:, i], minlength=rows * k)
        tables.append(flat.reshape(rows, k).astype(np.float64))
    return tables


def learn_parameters(
    dataset: Dataset,
    structure: NetworkStructure,
    prior: PriorSpec = PriorSpec(),
    floor: float | None = None,
) -> BayesianNetwork:
    """Smoothed conditional frequencies: theta = (alpha + count) / row total.

    The returned network records per-row support counts (how many records hit
    each parent assignment) for min_support_filter.
    """
    if dataset.row_count == 0:
        raise ValidationError("dataset must be non-empty")
    if dataset.attribute_count != structure.node_count:
        raise ValidationError(
            f"dataset has {dataset.attribute_count} attributes, structure has "
            f"{structure.node_count} nodes"
        )
    for i, (dc, sc) in enumerate(zip(dataset.cardinalities, structure.cardinalities)):
        if dc > sc:
            raise ValidationError(
                f"attribute {i}: dataset cardinality {dc} exceeds structure's {sc}"
            )
    counts = _count_tables(dataset, structure)
    a = prior.pseudo_count
    cpts, supports = [], []
    for table in counts:
        cpts.append((table + a) / (table.sum(axis=1, keepdims=True) + a * table.shape[1]))
        supports.append(table.sum(axis=1).astype(np.int64))
    kwargs = {} if floor is None else {"floor": floor}
    return BayesianNetwork(
        structure,
        tuple(cpts),
        names=dataset.attribute_names,
        support_counts=tuple(supports),
        **kwargs,
    )


@dataclass(frozen=True)
class LowSupportRow:
    """A CPT row estimated from fewer records than the support threshold."""

    node: int
    name: str
    row: int
    parent_values: tuple[int, ...]
    count: int


def min_support_filter(network: BayesianNetwork, threshold: int = 50) -> list[LowSupportRow]:
    """Rows whose parent assignment was seen fewer than `threshold` times."""
    if network.support_counts is None:
        raise ValidationError("network has no support counts (not learned from data)")
    structure = network.structure
    flagged = []
    for i in range(structure.node_count):
        ps = structure.parents[i]
        weights = structure.radix_weights(i)
        for row, count in enumerate(network.support_counts[i]):
            if count >= threshold:
                continue
            values = tuple(
                int(row // weights[t] % structure.cardinalities[ps[t]])
                for t in range(len(ps))
            )
            flagged.append(LowSupportRow(i, network.names[i], row, values, int(count)))
    return flagged


def synthesize(
    dataset: Dataset,
    eta: int,
    count: int,
    seed: int,
    prior: PriorSpec = PriorSpec(),
    pairs: str = "ordered",
) -> Dataset:
    """Release `count` synthetic records from a posterior-sampled network.

    Learns a structure under the eta cap, draws each CPT row from its Dirichlet
    posterior (gamma draws normalised per row), then samples ancestrally.  One
    seed drives both the parameter draw and the sampling, so equal inputs give
    identical output datasets.
    """
    if count < 0:
        raise ValidationError(f"count must be non-negative, got {count}")
    structure = learn_structure(dataset, StructureSearchConfig(eta=eta, pairs=pairs))
    rng = np.random.default_rng(seed)
    cpts = []
    for table in _count_tables(dataset, structure):
        posterior = table + prior.pseudo_count
        draws = rng.standard_gamma(posterior)
        totals = draws.sum(axis=1, keepdims=True)
        # Guard vanishing gamma draws (tiny pseudo-counts): fall back to the mean.
        degenerate = totals[:, 0] == 0.0
        if degenerate.any():
            draws[degenerate] = posterior[degenerate]
            totals = draws.sum(axis=1, keepdims=True)
        cpts.append(draws / totals)
    network = BayesianNetwork(structure, tuple(cpts), names=dataset.attribute_names)
    return sample(network, count, rng)
