"""End-to-end tracing experiments: repeated splits, averaged ROC, theory overlay.

Protocol per split s (seeded with config.seed + s, s = 1..splits): draw a pool
(optionally value-biased) and a disjoint reference from the population, learn
the released network on the pool, fit the population model on the reference,
score pool members against held-out non-members, and build the ROC.  Power is
averaged vertically over a fixed logarithmic false-positive grid and paired
with the closed-form bound at the mean released complexity.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import theory
from .attack import empirical_roc, fit_population_model, lr_statistics, write_curve_dat
from .bn import BayesianNetwork, NetworkStructure, complexity, load_model, sample
from .dataset import Dataset, biased_sample_indices, load_csv
from .errors import ValidationError
from .learn import (
    PriorSpec,
    StructureSearchConfig,
    learn_parameters,
    learn_structure,
    min_support_filter,
)

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "ComparisonTable",
    "parse_config_file",
    "run_experiment",
    "random_structure",
    "compare_table",
    "write_report_files",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; reports are pure functions of this.

    Exactly one of `data` (CSV path) or `generator` (model JSON path, sampled
    to `population_size` rows) must be set.  `random_edges` switches the
    released structure to a random DAG of that many edges instead of a learned
    one; `eta_population_model` re-learns the population model's own structure
    on the reference; `control` forces released = population model (the
    no-leakage baseline).  `bias` selects pools that over-represent 0-valued
    attributes.
    """

    pool_size: int
    reference_size: int
    eta_released: int
    seed: int
    data: str | None = None
    generator: str | None = None
    population_size: int | None = None
    eta_population_model: int | None = None
    splits: int = 50
    bias: float | None = None
    bias_mode: str = "product"
    bias_attribute: int = 0
    random_edges: int | None = None
    pseudo_count: float = 1.0
    include_pool_in_negatives: bool = False
    min_support: int = 50
    control: bool = False

    def __post_init__(self):
        if (self.data is None) == (self.generator is None):
            raise ValidationError("exactly one of data/generator must be set")
        if self.generator is not None and self.population_size is None:
            raise ValidationError("generator mode requires population_size")
        if self.data is not None and self.population_size is not None:
            raise ValidationError("population_size only applies in generator mode")
        if self.splits < 1:
            raise ValidationError(f"splits must be at least 1, got {self.splits}")
        if self.pool_size < 1 or self.reference_size < 1:
            raise ValidationError("pool_size and reference_size must be positive")
        if self.eta_released < 0:
            raise ValidationError("eta_released must be non-negative")
        if self.bias is not None and not 0.0 <= self.bias <= 1.0:
            raise ValidationError(f"bias must lie in [0, 1], got {self.bias}")
        if self.min_support < 0:
            raise ValidationError("min_support must be non-negative")


_CONFIG_FIELDS: dict[str, type] = {
    "data": str,
    "generator": str,
    "population_size": int,
    "pool_size": int,
    "reference_size": int,
    "eta_released": int,
    "eta_population_model": int,
    "splits": int,
    "bias": float,
    "bias_mode": str,
    "bias_attribute": int,
    "random_edges": int,
    "seed": int,
    "pseudo_count": float,
    "include_pool_in_negatives": bool,
    "min_support": int,
    "control": bool,
}

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def parse_config_file(path) -> ExperimentConfig:
    """Read a flat key=value config (one pair per line, '#' comments).

    Keys mirror ExperimentConfig field names; values are coerced to the field
    type.  Relative data/generator paths resolve against the config file.
    """
    path = Path(path)
    values: dict[str, object] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}: line {lineno}: expected key=value, got {raw!r}")
        key, _, text = line.partition("=")
        key = key.strip()
        text = text.strip().strip("'\"")
        if key not in _CONFIG_FIELDS:
            raise ValidationError(f"{path}: line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValidationError(f"{path}: line {lineno}: duplicate key {key!r}")
        kind = _CONFIG_FIELDS[key]
        try:
            if kind is bool:
                lowered = text.lower()
                if lowered in _TRUE:
                    values[key] = True
                elif lowered in _FALSE:
                    values[key] = False
                else:
                    raise ValueError(text)
            else:
                values[key] = kind(text)
        except ValueError:
            raise ValidationError(
                f"{path}: line {lineno}: cannot parse {text!r} as {kind.__name__}"
            ) from None
    for key in ("data", "generator"):
        if key in values:
            candidate = Path(str(values[key]))
            if not candidate.is_absolute():
                values[key] = str((path.parent / candidate).resolve())
    try:
        return ExperimentConfig(**values)  # type: ignore[arg-type]
    except TypeError as exc:
        raise ValidationError(f"{path}: {exc}") from None


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    """Averaged attack performance plus the matching theoretical bound."""

    config: ExperimentConfig
    alpha_grid: np.ndarray
    mean_power: np.ndarray
    mean_auc: float
    split_aucs: np.ndarray
    split_complexities: np.ndarray
    split_edge_counts: np.ndarray
    split_low_support_rows: np.ndarray
    complexity: float
    theory_power: np.ndarray
    theory_auc: float

    def to_dict(self) -> dict:
        cfg = {k: v for k, v in self.config.__dict__.items()}
        return {
            "config": cfg,
            "alpha_grid": self.alpha_grid.tolist(),
            "mean_power": self.mean_power.tolist(),
            "mean_auc": self.mean_auc,
            "split_aucs": self.split_aucs.tolist(),
            "split_complexities": self.split_complexities.tolist(),
            "split_edge_counts": self.split_edge_counts.tolist(),
            "split_low_support_rows": self.split_low_support_rows.tolist(),
            "complexity": self.complexity,
            "theory_power": self.theory_power.tolist(),
            "theory_auc": self.theory_auc,
        }


def random_structure(
    m: int,
    cardinalities,
    eta: int,
    edge_count: int,
    seed,
    max_attempts: int | None = None,
) -> NetworkStructure:
    """Random DAG built by accept-reject edge placement.

    Uniform ordered pairs (parent, child) are proposed; an edge is kept iff it
    is new, respects the parent cap, and leaves the graph acyclic.  Raises
    when the attempt budget runs out (edge_count not achievable or unlucky),
    reporting how many edges were placed.
    """
    cards = tuple(int(c) for c in cardinalities)
    if len(cards) != m:
        raise ValidationError(f"{m} nodes but {len(cards)} cardinalities")
    if edge_count < 0:
        raise ValidationError(f"edge_count must be non-negative, got {edge_count}")
    if eta < 0:
        raise ValidationError(f"eta must be non-negative, got {eta}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    budget = max_attempts if max_attempts is not None else max(10_000, 500 * max(1, edge_count))

    parents: list[list[int]] = [[] for _ in range(m)]
    parent_sets: list[set[int]] = [set() for _ in range(m)]
    children: list[set[int]] = [set() for _ in range(m)]

    def has_path(src: int, dst: int) -> bool:
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

    placed = 0
    attempts = 0
    while placed < edge_count:
        if attempts >= budget:
            raise ValidationError(
                f"random_structure exhausted its attempt budget ({budget}); "
                f"placed {placed}/{edge_count} edges"
            )
        attempts += 1
        parent = int(rng.integers(m))
        child = int(rng.integers(m))
        if parent == child or parent in parent_sets[child]:
            continue
        if len(parents[child]) >= eta:
            continue
        if has_path(child, parent):
            continue  # adding parent->child would close a cycle
        parents[child].append(parent)
        parent_sets[child].add(parent)
        children[parent].add(child)
        placed += 1
    return NetworkStructure(cards, tuple(tuple(ps) for ps in parents), eta=eta)


def _interp_power(curve, grid: np.ndarray) -> np.ndarray:
    # Collapse repeated alphas to their max beta, then linear interpolation.
    alphas, betas = curve.alphas, curve.betas
    uniq = np.unique(alphas)
    # betas are non-decreasing, so the last entry per alpha is its max.
    last = np.searchsorted(alphas, uniq, side="right") - 1
    return np.interp(grid, uniq, betas[last])


def _load_population(config: ExperimentConfig) -> Dataset:
    if config.data is not None:
        return load_csv(config.data)
    generator = load_model(config.generator)
    return sample(generator, int(config.population_size), np.random.default_rng(config.seed))


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run the full multi-split protocol; deterministic in the config."""
    population = _load_population(config)
    n_rows = population.row_count
    take = config.pool_size + config.reference_size
    if take > n_rows:
        raise ValidationError(
            f"pool + reference = {take} exceeds population of {n_rows} rows"
        )
    if take == n_rows and not config.include_pool_in_negatives:
        raise ValidationError("no rows left over for non-members")

    grid = theory.default_alpha_grid()
    prior = PriorSpec(pseudo_count=config.pseudo_count)
    powers = np.zeros((config.splits, grid.size))
    aucs = np.zeros(config.splits)
    complexities = np.zeros(config.splits, dtype=np.int64)
    edges = np.zeros(config.splits, dtype=np.int64)
    low_support = np.zeros(config.splits, dtype=np.int64)

    for s in range(1, config.splits + 1):
        try:
            rng = np.random.default_rng(config.seed + s)
            if config.bias is not None and config.bias > 0.0:
                pool_idx = biased_sample_indices(
                    population, config.pool_size, config.bias, rng,
                    mode=config.bias_mode, attribute=config.bias_attribute,
                )
                taken = np.zeros(n_rows, dtype=bool)
                taken[pool_idx] = True
                remaining = np.flatnonzero(~taken)
                order = rng.permutation(remaining.size)
                ref_idx = remaining[order[: config.reference_size]]
                rest_idx = remaining[order[config.reference_size :]]
            else:
                perm = rng.permutation(n_rows)
                pool_idx = perm[: config.pool_size]
                ref_idx = perm[config.pool_size : take]
                rest_idx = perm[take:]

            pool = population.take(pool_idx)
            reference = population.take(ref_idx)

            if config.random_edges is not None:
                released_structure = random_structure(
                    population.attribute_count,
                    population.cardinalities,
                    config.eta_released,
                    config.random_edges,
                    rng,
                )
            else:
                released_structure = learn_structure(
                    pool, StructureSearchConfig(eta=config.eta_released)
                )
            released = learn_parameters(pool, released_structure, prior)

            if config.eta_population_model is not None:
                pop_structure = learn_structure(
                    reference, StructureSearchConfig(eta=config.eta_population_model)
                )
                population_model = learn_parameters(reference, pop_structure, prior)
            else:
                population_model = fit_population_model(reference, released_structure, prior)
            if config.control:
                released = population_model

            member_stats = lr_statistics(population_model, released, pool)
            if config.include_pool_in_negatives:
                negatives = population.records
            else:
                negatives = population.records[rest_idx]
            nonmember_stats = lr_statistics(population_model, released, negatives)

            curve = empirical_roc(member_stats, nonmember_stats)
            powers[s - 1] = _interp_power(curve, grid)
            aucs[s - 1] = curve.auc
            complexities[s - 1] = complexity(released.structure)
            edges[s - 1] = released.structure.edge_count
            low_support[s - 1] = len(min_support_filter(released, config.min_support))
        except Exception as exc:
            raise RuntimeError(f"split {s} failed: {exc}") from exc

    mean_complexity = float(complexities.mean())
    bound = theory.bound_curve(mean_complexity, config.pool_size, alphas=grid)
    return ExperimentReport(
        config=config,
        alpha_grid=grid,
        mean_power=powers.mean(axis=0),
        mean_auc=float(np.mean(aucs)),
        split_aucs=aucs,
        split_complexities=complexities,
        split_edge_counts=edges,
        split_low_support_rows=low_support,
        complexity=mean_complexity,
        theory_power=bound.betas,
        theory_auc=bound.auc,
    )


@dataclass(frozen=True)
class ComparisonTable:
    """Aligned text and CSV views of reports sorted by ascending complexity."""

    text: str
    csv: str


def compare_table(reports) -> ComparisonTable:
    """Tabulate (eta, edges, complexity, empirical AUC, theoretical AUC) rows."""
    reports = list(reports)
    if not reports:
        raise ValidationError("compare_table needs at least one report")
    rows = []
    for report in sorted(reports, key=lambda r: r.complexity):
        rows.append(
            (
                report.config.eta_released,
                float(report.split_edge_counts.mean()),
                report.complexity,
                report.mean_auc,
                report.theory_auc,
            )
        )
    header = ("eta", "edges", "complexity", "auc_empirical", "auc_theoretical")
    formatted = [
        (str(eta), f"{edge:.1f}", f"{comp:.1f}", f"{emp:.4f}", f"{theo:.4f}")
        for eta, edge, comp, emp, theo in rows
    ]
    widths = [
        max(len(header[c]), *(len(r[c]) for r in formatted)) for c in range(len(header))
    ]
    def align(cells):
        return "  ".join(cell.rjust(w) for cell, w in zip(cells, widths))
    text = "\n".join([align(header), *(align(r) for r in formatted)]) + "\n"

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for eta, edge, comp, emp, theo in rows:
        writer.writerow([eta, f"{edge:.6g}", f"{comp:.6g}", f"{emp:.6f}", f"{theo:.6f}"])
    return ComparisonTable(text=text, csv=buffer.getvalue())


def write_report_files(report: ExperimentReport, out_dir, figures: bool = True) -> list[Path]:
    """Write the report bundle; returns the created paths.

    Files: power_mean.dat (vertically averaged empirical curve), bound.dat
    (theory curve), splits.csv (per-split numbers), table.csv + summary.txt
    (comparison row), report.json (full payload), and a PNG overlay figure
    unless figures=False.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    power_path = out / "power_mean.dat"
    write_curve_dat(
        report.alpha_grid,
        report.mean_power,
        power_path,
        comments=[
            "vertically averaged empirical power vs false-positive rate",
            f"splits={report.config.splits} pool_size={report.config.pool_size}",
            f"mean_auc={report.mean_auc:.6f}",
        ],
    )
    written.append(power_path)

    bound_path = out / "bound.dat"
    write_curve_dat(
        report.alpha_grid,
        report.theory_power,
        bound_path,
        comments=[
            "theoretical power bound",
            f"complexity={report.complexity:.6g} pool_size={report.config.pool_size}",
            f"auc={report.theory_auc:.6f}",
        ],
    )
    written.append(bound_path)

    splits_path = out / "splits.csv"
    with open(splits_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["split", "seed", "auc", "complexity", "edges", "low_support_rows"])
        for s in range(report.split_aucs.size):
            writer.writerow(
                [
                    s + 1,
                    report.config.seed + s + 1,
                    f"{report.split_aucs[s]:.6f}",
                    int(report.split_complexities[s]),
                    int(report.split_edge_counts[s]),
                    int(report.split_low_support_rows[s]),
                ]
            )
    written.append(splits_path)

    table = compare_table([report])
    table_path = out / "table.csv"
    table_path.write_text(table.csv, encoding="utf-8")
    written.append(table_path)

    summary_path = out / "summary.txt"
    flagged = int(report.split_low_support_rows.sum())
    summary = [
        "tracing experiment summary",
        f"population: {report.config.data or report.config.generator}",
        f"splits: {report.config.splits}   pool: {report.config.pool_size}   "
        f"reference: {report.config.reference_size}",
        f"released eta: {report.config.eta_released}   "
        f"mean complexity: {report.complexity:.1f}",
        f"mean empirical AUC: {report.mean_auc:.6f}",
        f"theoretical AUC:    {report.theory_auc:.6f}",
        f"low-support CPT rows across splits: {flagged}",
        "",
        table.text,
    ]
    summary_path.write_text("\n".join(summary), encoding="utf-8")
    written.append(summary_path)

    json_path = out / "report.json"
    json_path.write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    written.append(json_path)

    if figures:
        from .plots import save_power_plot

        figure_path = out / "power_vs_error.png"
        save_power_plot(
            figure_path,
            [
                (report.alpha_grid, report.mean_power,
                 f"empirical mean ({report.config.splits} splits)"),
                (report.alpha_grid, report.theory_power, "theoretical bound"),
            ],
            title=f"tracing power, C={report.complexity:.0f}, n={report.config.pool_size}",
        )
        written.append(figure_path)
    return written
