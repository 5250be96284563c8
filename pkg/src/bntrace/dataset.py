"""Categorical datasets: CSV loading, deterministic splits, biased subsampling.

A dataset is an (n, m) matrix of small non-negative integers plus per-column
names and cardinalities.  Values in column i always lie in [0, cardinalities[i]).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ValidationError

__all__ = [
    "Dataset",
    "SplitSpec",
    "load_csv",
    "write_csv",
    "write_schema",
    "split",
    "split_indices",
    "biased_sample",
    "biased_sample_indices",
    "selection_probability",
]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable table of categorical records.

    Attributes:
        records: (n, m) int64 array, read-only.
        attribute_names: m column names, unique.
        cardinalities: m value-space sizes, each >= 2.
    """

    records: np.ndarray
    attribute_names: tuple[str, ...]
    cardinalities: tuple[int, ...]

    def __post_init__(self):
        rec = np.asarray(self.records, dtype=np.int64)
        if rec.ndim != 2:
            raise ValidationError("records must be a 2-D array")
        names = tuple(str(s) for s in self.attribute_names)
        cards = tuple(int(c) for c in self.cardinalities)
        if len(names) != rec.shape[1] or len(cards) != rec.shape[1]:
            raise ValidationError(
                f"records have {rec.shape[1]} columns but {len(names)} names "
                f"and {len(cards)} cardinalities were given"
            )
        if len(set(names)) != len(names):
            raise ValidationError("attribute names must be unique")
        for name, card in zip(names, cards):
            if card < 2:
                raise ValidationError(f"attribute {name!r}: cardinality {card} < 2")
        if rec.size:
            low = rec.min(axis=0)
            high = rec.max(axis=0)
            for j, name in enumerate(names):
                if low[j] < 0:
                    raise ValidationError(f"attribute {name!r}: negative value {low[j]}")
                if high[j] >= cards[j]:
                    raise ValidationError(
                        f"attribute {name!r}: value {high[j]} outside cardinality {cards[j]}"
                    )
        rec = rec.copy()
        rec.flags.writeable = False
        object.__setattr__(self, "records", rec)
        object.__setattr__(self, "attribute_names", names)
        object.__setattr__(self, "cardinalities", cards)

    @property
    def row_count(self) -> int:
        return self.records.shape[0]

    @property
    def attribute_count(self) -> int:
        return self.records.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.records[:, i]

    def take(self, indices) -> "Dataset":
        """Row subset (by position) sharing names and cardinalities."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.records[idx], self.attribute_names, self.cardinalities)


@dataclass(frozen=True)
class SplitSpec:
    """Sizes and seed for a disjoint pool/reference split."""

    pool_size: int
    reference_size: int
    seed: int

    def __post_init__(self):
        if self.pool_size <= 0:
            raise ValidationError(f"pool_size must be positive, got {self.pool_size}")
        if self.reference_size <= 0:
            raise ValidationError(
                f"reference_size must be positive, got {self.reference_size}"
            )


def _read_schema(path: Path, names: Sequence[str]) -> dict[str, int]:
    declared: dict[str, int] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(
                f"{path}: line {lineno}: expected 'name cardinality', got {raw!r}"
            )
        name, card_text = parts
        try:
            card = int(card_text)
        except ValueError:
            raise ValidationError(
                f"{path}: line {lineno}: cardinality {card_text!r} is not an integer"
            ) from None
        if card < 2:
            raise ValidationError(f"{path}: line {lineno}: cardinality {card} < 2")
        if name in declared:
            raise ValidationError(f"{path}: duplicate schema entry for {name!r}")
        declared[name] = card
    unknown = set(declared) - set(names)
    if unknown:
        raise ValidationError(
            f"{path}: schema names not present in the data header: {sorted(unknown)}"
        )
    return declared


def load_csv(path, schema_path=None) -> Dataset:
    """Load a categorical dataset from a header-bearing CSV of integers.

    Cardinalities are inferred as max(observed)+1 per column (floored at 2 so a
    constant column keeps a usable value space) unless a sidecar schema file
    overrides them.  A schema file holds `name cardinality` lines; when
    `schema_path` is None, `<path>.schema` is used if it exists.

    Raises:
        ValidationError: empty file, ragged rows, non-integer or negative cells,
            missing values ("missing value at row r, column c"), or schema
            conflicts (declared cardinality not covering observed values).
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file") from None
        names = tuple(h.strip() for h in header)
        if any(not n for n in names):
            raise ValidationError(f"{path}: blank column name in header")
        if len(set(names)) != len(names):
            raise ValidationError(f"{path}: duplicate column names in header")
        m = len(names)
        rows: list[list[int]] = []
        for r, row in enumerate(reader, start=1):
            if len(row) != m:
                raise ValidationError(
                    f"{path}: row {r} has {len(row)} cells, expected {m}"
                )
            parsed = []
            for c, cell in enumerate(row, start=1):
                text = cell.strip()
                if not text:
                    raise ValidationError(f"{path}: missing value at row {r}, column {c}")
                try:
                    value = int(text)
                except ValueError:
                    raise ValidationError(
                        f"{path}: non-integer value {text!r} at row {r}, column {c}"
                    ) from None
                if value < 0:
                    raise ValidationError(
                        f"{path}: negative value {value} at row {r}, column {c}"
                    )
                parsed.append(value)
            rows.append(parsed)

    records = np.array(rows, dtype=np.int64).reshape(len(rows), m)
    observed = records.max(axis=0) + 1 if rows else np.ones(m, dtype=np.int64)
    cards = [max(2, int(k)) for k in observed]

    if schema_path is None:
        candidate = Path(str(path) + ".schema")
        schema_path = candidate if candidate.exists() else None
    if schema_path is not None:
        declared = _read_schema(Path(schema_path), names)
        for j, name in enumerate(names):
            if name in declared:
                if rows and declared[name] < observed[j]:
                    raise ValidationError(
                        f"{schema_path}: attribute {name!r}: declared cardinality "
                        f"{declared[name]} but value {observed[j] - 1} was observed"
                    )
                cards[j] = declared[name]

    return Dataset(records, names, tuple(cards))


def write_csv(dataset: Dataset, path) -> None:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(dataset.attribute_names)
        writer.writerows(dataset.records.tolist())


def write_schema(dataset: Dataset, path) -> None:
    lines = [
        f"{name} {card}"
        for name, card in zip(dataset.attribute_names, dataset.cardinalities)
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def split_indices(row_count: int, spec: SplitSpec):
    """Disjoint (pool, reference, rest) row indices from one seeded shuffle."""
    total = spec.pool_size + spec.reference_size
    if total > row_count:
        raise ValidationError(
            f"pool_size + reference_size = {total} exceeds {row_count} rows"
        )
    perm = np.random.default_rng(spec.seed).permutation(row_count)
    return (
        perm[: spec.pool_size],
        perm[spec.pool_size : total],
        perm[total:],
    )


def split(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Split into a disjoint (pool, reference) pair, deterministic in the seed."""
    pool_idx, ref_idx, _ = split_indices(dataset.row_count, spec)
    return dataset.take(pool_idx), dataset.take(ref_idx)


def selection_probability(record, bias: float, mode: str = "product", attribute: int = 0) -> float:
    """Acceptance probability of one record under value-biased selection.

    In "product" mode every attribute contributes: a record is kept with
    probability prod_i (1-bias)^{[x_i = 1]}, so e.g. three 1-valued attributes
    at bias 0.3 give 0.7**3 = 0.343.  In "single" mode only `attribute` is
    penalised.
    """
    if not 0.0 <= bias <= 1.0:
        raise ValidationError(f"bias must lie in [0, 1], got {bias}")
    rec = np.asarray(record)
    if mode == "product":
        ones = int(np.count_nonzero(rec == 1))
    elif mode == "single":
        ones = int(rec[attribute] == 1)
    else:
        raise ValidationError(f"unknown bias mode {mode!r}")
    return float((1.0 - bias) ** ones)


def _acceptance_probabilities(dataset: Dataset, bias, mode, attribute) -> np.ndarray:
    if not 0.0 <= bias <= 1.0:
        raise ValidationError(f"bias must lie in [0, 1], got {bias}")
    if mode == "product":
        if any(c != 2 for c in dataset.cardinalities):
            raise ValidationError("product-mode biased sampling requires binary attributes")
        ones = (dataset.records == 1).sum(axis=1)
        return (1.0 - bias) ** ones
    if mode == "single":
        if not 0 <= attribute < dataset.attribute_count:
            raise ValidationError(f"attribute index {attribute} out of range")
        if dataset.cardinalities[attribute] != 2:
            raise ValidationError("single-mode biased sampling requires a binary attribute")
        return np.where(dataset.column(attribute) == 1, 1.0 - bias, 1.0)
    raise ValidationError(f"unknown bias mode {mode!r}")


def biased_sample_indices(
    dataset: Dataset,
    pool_size: int,
    bias: float,
    rng,
    mode: str = "product",
    attribute: int = 0,
    max_attempts: int | None = None,
) -> np.ndarray:
    """Accept-reject selection of `pool_size` distinct row indices.

    Candidate rows are proposed uniformly with replacement; already-accepted
    rows are skipped; a proposal is kept with its selection probability.  At
    bias 0 this reduces to uniform sampling without replacement.
    """
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    n = dataset.row_count
    if not 0 < pool_size <= n:
        raise ValidationError(f"pool_size must lie in [1, {n}], got {pool_size}")
    accept_p = _acceptance_probabilities(dataset, bias, mode, attribute)
    budget = max_attempts if max_attempts is not None else max(10_000, 200 * pool_size)

    chosen: list[int] = []
    taken = np.zeros(n, dtype=bool)
    attempts = 0
    while len(chosen) < pool_size:
        if attempts >= budget:
            raise ValidationError(
                f"biased sampling exhausted its attempt budget ({budget} draws, "
                f"{len(chosen)}/{pool_size} rows accepted)"
            )
        chunk = min(4096, budget - attempts)
        candidates = rng.integers(0, n, size=chunk)
        coins = rng.random(chunk)
        attempts += chunk
        for i, u in zip(candidates, coins):
            if taken[i] or u >= accept_p[i]:
                continue
            taken[i] = True
            chosen.append(int(i))
            if len(chosen) == pool_size:
                break
    return np.array(chosen, dtype=np.int64)


def biased_sample(
    dataset: Dataset,
    pool_size: int,
    bias: float,
    seed: int,
    mode: str = "product",
    attribute: int = 0,
    max_attempts: int | None = None,
) -> Dataset:
    """Draw a pool over-representing 0-valued attributes (see selection_probability)."""
    idx = biased_sample_indices(
        dataset, pool_size, bias, np.random.default_rng(seed), mode, attribute, max_attempts
    )
    return dataset.take(idx)
