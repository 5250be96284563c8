"""Discrete Bayesian networks: structure, CPTs, evaluation, sampling, JSON I/O.

CPT row layout: node i's table has one row per joint parent assignment, indexed
mixed-radix with the *first* parent most significant.  With parents (A, B) of
cardinalities (2, 3), assignment (a, b) selects row 3*a + b.
"""

from __future__ import annotations

import heapq
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .errors import CycleError, ValidationError

__all__ = [
    "DEFAULT_PROB_FLOOR",
    "CPT_SUM_TOL",
    "NetworkStructure",
    "BayesianNetwork",
    "topological_order",
    "complexity",
    "parent_row_index",
    "log_joint",
    "log_joint_batch",
    "sample",
    "save_model",
    "load_model",
]

logger = logging.getLogger(__name__)

# Published tables are clamped away from 0/1 at construction unless disabled.
DEFAULT_PROB_FLOOR = 1e-6
CPT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class NetworkStructure:
    """DAG over categorical nodes.

    Attributes:
        cardinalities: value-space size per node, each >= 2.
        parents: per node, ordered tuple of parent indices.
        eta: max parents per node; defaults to the observed maximum.
    """

    cardinalities: tuple[int, ...]
    parents: tuple[tuple[int, ...], ...]
    eta: int | None = None

    def __post_init__(self):
        cards = tuple(int(c) for c in self.cardinalities)
        pars = tuple(tuple(int(p) for p in ps) for ps in self.parents)
        m = len(cards)
        if len(pars) != m:
            raise ValidationError(
                f"{m} cardinalities but {len(pars)} parent lists"
            )
        for i, card in enumerate(cards):
            if card < 2:
                raise ValidationError(f"node {i}: cardinality {card} < 2")
        for i, ps in enumerate(pars):
            if len(set(ps)) != len(ps):
                raise ValidationError(f"node {i}: duplicate parents {ps}")
            for p in ps:
                if p == i:
                    raise ValidationError(f"node {i}: self-loop")
                if not 0 <= p < m:
                    raise ValidationError(f"node {i}: parent index {p} out of range")
        observed_eta = max((len(ps) for ps in pars), default=0)
        eta = observed_eta if self.eta is None else int(self.eta)
        if eta < 0:
            raise ValidationError(f"eta must be non-negative, got {eta}")
        if observed_eta > eta:
            raise ValidationError(
                f"a node has {observed_eta} parents, exceeding eta={eta}"
            )
        object.__setattr__(self, "cardinalities", cards)
        object.__setattr__(self, "parents", pars)
        object.__setattr__(self, "eta", eta)
        topological_order(self)  # raises CycleError on a cycle

    @property
    def node_count(self) -> int:
        return len(self.cardinalities)

    @property
    def edge_count(self) -> int:
        return sum(len(ps) for ps in self.parents)

    def parent_row_count(self, i: int) -> int:
        count = 1
        for p in self.parents[i]:
            count *= self.cardinalities[p]
        return count

    def radix_weights(self, i: int) -> np.ndarray:
        """Mixed-radix weights for node i's parent tuple (first parent most significant)."""
        ps = self.parents[i]
        weights = np.ones(len(ps), dtype=np.int64)
        for t in range(len(ps) - 2, -1, -1):
            weights[t] = weights[t + 1] * self.cardinalities[ps[t + 1]]
        return weights


def topological_order(structure: NetworkStructure) -> tuple[int, ...]:
    """Topological order, lowest node index first among ready nodes.

    Raises:
        CycleError: naming a witness cycle if the parent lists are not acyclic.
    """
    m = len(structure.parents)
    indegree = [len(ps) for ps in structure.parents]
    children: list[list[int]] = [[] for _ in range(m)]
    for i, ps in enumerate(structure.parents):
        for p in ps:
            children[p].append(i)
    ready = [i for i in range(m) if indegree[i] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for c in children[i]:
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(ready, c)
    if len(order) < m:
        remaining = {i for i in range(m) if indegree[i] > 0}
        start = min(remaining)
        trail, seen = [start], {start}
        node = start
        while True:
            node = next(p for p in structure.parents[node] if p in remaining)
            if node in seen:
                cycle = trail[trail.index(node):] + [node]
                raise CycleError(
                    "cycle detected: " + " -> ".join(str(v) for v in reversed(cycle))
                )
            trail.append(node)
            seen.add(node)
    return tuple(order)


def complexity(structure: NetworkStructure) -> int:
    """Released-parameter count: sum_i |V(parents_i)| * (|V(X_i)| - 1)."""
    return sum(
        structure.parent_row_count(i) * (structure.cardinalities[i] - 1)
        for i in range(structure.node_count)
    )


def parent_row_index(structure: NetworkStructure, i: int, values) -> int:
    """Row of node i's CPT selected by a full record (see module docstring)."""
    ps = structure.parents[i]
    if not ps:
        return 0
    vals = np.asarray(values, dtype=np.int64)
    return int(vals[list(ps)] @ structure.radix_weights(i))


@dataclass(frozen=True, eq=False)
class BayesianNetwork:
    """Structure plus one CPT per node (rows = parent assignments).

    Rows must sum to 1 within 1e-9.  Unless `floor` is 0, entries below the
    floor are clamped up and rows renormalised at construction, keeping every
    probability strictly inside (0, 1).
    """

    structure: NetworkStructure
    cpts: tuple[np.ndarray, ...]
    names: tuple[str, ...] | None = None
    support_counts: tuple[np.ndarray, ...] | None = None
    floor: float = DEFAULT_PROB_FLOOR

    def __post_init__(self):
        m = self.structure.node_count
        names = self.names
        if names is None:
            names = tuple(f"X{i}" for i in range(m))
        names = tuple(str(s) for s in names)
        if len(names) != m:
            raise ValidationError(f"{m} nodes but {len(names)} names")
        if len(set(names)) != len(names):
            raise ValidationError("node names must be unique")
        if len(self.cpts) != m:
            raise ValidationError(f"{m} nodes but {len(self.cpts)} tables")
        if not 0.0 <= self.floor < 0.5:
            raise ValidationError(f"floor must lie in [0, 0.5), got {self.floor}")

        tables = []
        for i, raw in enumerate(self.cpts):
            table = np.asarray(raw, dtype=np.float64)
            rows = self.structure.parent_row_count(i)
            k = self.structure.cardinalities[i]
            if table.shape != (rows, k):
                raise ValidationError(
                    f"node {i}: table shape {table.shape}, expected {(rows, k)}"
                )
            if np.any(table < 0):
                raise ValidationError(f"node {i}: negative probability")
            sums = table.sum(axis=1)
            bad = np.where(np.abs(sums - 1.0) > CPT_SUM_TOL)[0]
            if bad.size:
                raise ValidationError(
                    f"node {i}: row {bad[0]} sums to {sums[bad[0]]!r}, expected 1"
                )
            table = table / sums[:, None]
            if self.floor > 0.0:
                clipped = np.maximum(table, self.floor)
                table = clipped / clipped.sum(axis=1, keepdims=True)
            table.flags.writeable = False
            tables.append(table)

        if self.support_counts is not None:
            counts = []
            for i, raw in enumerate(self.support_counts):
                arr = np.asarray(raw, dtype=np.int64)
                if arr.shape != (self.structure.parent_row_count(i),):
                    raise ValidationError(f"node {i}: support count shape mismatch")
                arr.flags.writeable = False
                counts.append(arr)
            object.__setattr__(self, "support_counts", tuple(counts))

        with np.errstate(divide="ignore"):
            logs = tuple(np.log(t) for t in tables)
        for t in logs:
            t.flags.writeable = False
        object.__setattr__(self, "cpts", tuple(tables))
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_log_cpts", logs)

    @property
    def log_cpts(self) -> tuple[np.ndarray, ...]:
        return self._log_cpts  # type: ignore[attr-defined]


def _validate_records(network: BayesianNetwork, records: np.ndarray) -> np.ndarray:
    rec = np.asarray(records, dtype=np.int64)
    if rec.ndim != 2 or rec.shape[1] != network.structure.node_count:
        raise ValidationError(
            f"records must have shape (n, {network.structure.node_count})"
        )
    if rec.size:
        cards = np.array(network.structure.cardinalities)
        if rec.min() < 0 or np.any(rec.max(axis=0) >= cards):
            raise ValidationError("record value outside node cardinality")
    return rec


def log_joint_batch(network: BayesianNetwork, records) -> np.ndarray:
    """Log joint probability of each row; -inf where a zero entry is hit."""
    rec = _validate_records(network, records)
    total = np.zeros(rec.shape[0], dtype=np.float64)
    structure = network.structure
    for i in range(structure.node_count):
        ps = structure.parents[i]
        if ps:
            rows = rec[:, list(ps)] @ structure.radix_weights(i)
        else:
            rows = np.zeros(rec.shape[0], dtype=np.int64)
        total += network.log_cpts[i][rows, rec[:, i]]
    return total


def log_joint(network: BayesianNetwork, record) -> float:
    """Log joint probability of one record (natural log).

    Returns -inf when a zero-probability table entry is involved; that signals
    a violated non-triviality assumption and is logged as a warning.
    """
    value = float(log_joint_batch(network, np.asarray(record).reshape(1, -1))[0])
    if value == -np.inf:
        logger.warning(
            "record %s has zero probability (zero table entry; non-triviality violated)",
            list(np.asarray(record).ravel()),
        )
    return value


def sample(network: BayesianNetwork, count: int, seed) -> Dataset:
    """Ancestral sampling of `count` records; deterministic in the seed."""
    if count < 0:
        raise ValidationError(f"count must be non-negative, got {count}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    structure = network.structure
    m = structure.node_count
    values = np.zeros((count, m), dtype=np.int64)
    for i in topological_order(structure):
        ps = structure.parents[i]
        if ps:
            rows = values[:, list(ps)] @ structure.radix_weights(i)
        else:
            rows = np.zeros(count, dtype=np.int64)
        probs = network.cpts[i][rows]
        cum = np.cumsum(probs, axis=1)
        drawn = (rng.random(count)[:, None] >= cum).sum(axis=1)
        values[:, i] = np.minimum(drawn, structure.cardinalities[i] - 1)
    return Dataset(values, network.names, structure.cardinalities)


def save_model(network: BayesianNetwork, path) -> None:
    """Serialise to the JSON model format (see load_model)."""
    nodes = []
    for i in range(network.structure.node_count):
        nodes.append(
            {
                "name": network.names[i],
                "cardinality": network.structure.cardinalities[i],
                "parents": [network.names[p] for p in network.structure.parents[i]],
                "cpt": network.cpts[i].tolist(),
            }
        )
    Path(path).write_text(json.dumps({"nodes": nodes}, indent=2) + "\n", encoding="utf-8")


def load_model(path, floor: float = 0.0) -> BayesianNetwork:
    """Load a JSON model: {"nodes": [{name, cardinality, parents, cpt}, ...]}.

    Parent references are by name and must precede nothing in particular (any
    acyclic arrangement loads).  Probability rows must sum to 1 within 1e-9.
    The default floor of 0 keeps the published tables exactly as serialised;
    pass a positive floor to clamp at load time.
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(payload, dict) or "nodes" not in payload:
        raise ValidationError(f"{path}: expected an object with a 'nodes' list")
    nodes = payload["nodes"]
    if not isinstance(nodes, list) or not nodes:
        raise ValidationError(f"{path}: 'nodes' must be a non-empty list")

    names = []
    for entry in nodes:
        if not isinstance(entry, dict):
            raise ValidationError(f"{path}: node entries must be objects")
        for key in ("name", "cardinality", "parents", "cpt"):
            if key not in entry:
                raise ValidationError(f"{path}: node missing field {key!r}")
        names.append(str(entry["name"]))
    if len(set(names)) != len(names):
        raise ValidationError(f"{path}: duplicate node names")
    index = {name: i for i, name in enumerate(names)}

    cards, parents, cpts = [], [], []
    for entry in nodes:
        cards.append(int(entry["cardinality"]))
        try:
            parents.append(tuple(index[p] for p in entry["parents"]))
        except KeyError as exc:
            raise ValidationError(f"{path}: unknown parent {exc.args[0]!r}") from None
        cpts.append(np.asarray(entry["cpt"], dtype=np.float64))

    structure = NetworkStructure(tuple(cards), tuple(parents))
    return BayesianNetwork(structure, tuple(cpts), names=tuple(names), floor=floor)
