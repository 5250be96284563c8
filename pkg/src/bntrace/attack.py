"""The likelihood-ratio tracing attack and its empirical evaluation.

The statistic for a record x is L(x) = log Pr[x; population] - log Pr[x;
released].  Members of the pool the released model was learned from sit
systematically below non-members, so the attacker flags IN when L(x) falls at
or below a threshold calibrated on reference statistics.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bn import BayesianNetwork, log_joint_batch
from .dataset import Dataset
from .errors import ValidationError
from .learn import PriorSpec, learn_parameters

__all__ = [
    "Verdict",
    "LrDecomposition",
    "RocCurve",
    "AttackDecision",
    "structures_match",
    "lr_statistic",
    "lr_statistics",
    "fit_population_model",
    "calibrate_threshold",
    "empirical_roc",
    "mann_whitney_auc",
    "decide",
    "write_curve_dat",
    "read_curve_dat",
]

logger = logging.getLogger(__name__)


class Verdict(enum.Enum):
    IN = "IN"
    OUT = "OUT"


@dataclass(frozen=True, eq=False)
class LrDecomposition:
    """Tracing statistic with optional per-attribute breakdown.

    per_attribute and active_rows are populated only when both models share a
    structure; total always equals their sum when present.
    """

    total: float
    per_attribute: np.ndarray | None = None
    active_rows: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class RocCurve:
    """Operating points of the thresholded attack, alpha non-decreasing."""

    alphas: np.ndarray
    betas: np.ndarray
    thresholds: np.ndarray
    auc: float

    @property
    def points(self):
        return list(zip(self.alphas.tolist(), self.betas.tolist()))


@dataclass(frozen=True)
class AttackDecision:
    statistic: float
    threshold: float
    verdict: Verdict

    @property
    def is_member(self) -> bool:
        return self.verdict is Verdict.IN


def structures_match(a: BayesianNetwork, b: BayesianNetwork) -> bool:
    return (
        a.structure.cardinalities == b.structure.cardinalities
        and a.structure.parents == b.structure.parents
    )


def lr_statistic(
    population_model: BayesianNetwork,
    released_model: BayesianNetwork,
    record,
) -> LrDecomposition:
    """Score one record; factor-wise breakdown when the structures match.

    Mismatched structures are fine (the models only need to score the record);
    then only the total is populated.  A zero-probability factor on one side
    produces a signed-infinity total and a warning; zero under both models is
    rejected because the ratio is undefined.
    """
    rec = np.asarray(record, dtype=np.int64).ravel()
    if not structures_match(population_model, released_model):
        pop = float(log_joint_batch(population_model, rec.reshape(1, -1))[0])
        rel = float(log_joint_batch(released_model, rec.reshape(1, -1))[0])
        if pop == -math.inf and rel == -math.inf:
            raise ValidationError("record has zero probability under both models")
        total = pop - rel
        if not math.isfinite(total):
            logger.warning("infinite statistic: zero-probability factor on one side")
        return LrDecomposition(total=total)

    structure = released_model.structure
    m = structure.node_count
    if rec.shape != (m,):
        raise ValidationError(f"record must have {m} values")
    cards = structure.cardinalities
    if rec.min() < 0 or any(rec[i] >= cards[i] for i in range(m)):
        raise ValidationError("record value outside node cardinality")

    per = np.empty(m, dtype=np.float64)
    rows = np.empty(m, dtype=np.int64)
    for i in range(m):
        ps = structure.parents[i]
        row = int(rec[list(ps)] @ structure.radix_weights(i)) if ps else 0
        rows[i] = row
        pop_term = population_model.log_cpts[i][row, rec[i]]
        rel_term = released_model.log_cpts[i][row, rec[i]]
        if pop_term == -math.inf and rel_term == -math.inf:
            raise ValidationError(
                f"record has zero probability under both models (node {i})"
            )
        per[i] = pop_term - rel_term
    total = float(per.sum())
    if not math.isfinite(total):
        logger.warning("infinite statistic: zero-probability factor on one side")
    return LrDecomposition(total=total, per_attribute=per, active_rows=rows)


def lr_statistics(
    population_model: BayesianNetwork,
    released_model: BayesianNetwork,
    records,
) -> np.ndarray:
    """Vectorised totals for a batch of records (rows of an (n, m) array)."""
    rec = records.records if isinstance(records, Dataset) else np.asarray(records, dtype=np.int64)
    pop = log_joint_batch(population_model, rec)
    rel = log_joint_batch(released_model, rec)
    with np.errstate(invalid="ignore"):
        totals = pop - rel
    bad = np.isnan(totals)
    if bad.any():
        raise ValidationError(
            f"{int(bad.sum())} records have zero probability under both models"
        )
    return totals


def fit_population_model(
    reference: Dataset,
    released_structure,
    prior: PriorSpec = PriorSpec(),
) -> BayesianNetwork:
    """Estimate population parameters on reference data over a fixed structure."""
    return learn_parameters(reference, released_structure, prior)


def calibrate_threshold(reference_statistics, alpha: float) -> float:
    """Largest observed statistic whose empirical error stays within alpha.

    The empirical error of threshold t is the fraction of reference statistics
    <= t; comparisons against alpha are exact (no epsilon).  When even the
    smallest observed value overshoots (e.g. alpha = 0), returns -inf so the
    attack flags nobody.
    """
    stats = np.asarray(reference_statistics, dtype=np.float64).ravel()
    if stats.size == 0:
        raise ValidationError("reference statistics must be non-empty")
    if np.isnan(stats).any():
        raise ValidationError("reference statistics contain NaN")
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha}")
    ordered = np.sort(stats)
    values = np.unique(ordered)
    fractions = np.searchsorted(ordered, values, side="right") / ordered.size
    eligible = values[fractions <= alpha]
    if eligible.size == 0:
        return -math.inf
    return float(eligible[-1])


def _step_fractions(sorted_values: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    return np.searchsorted(sorted_values, thresholds, side="right") / sorted_values.size


def empirical_roc(pool_statistics, population_statistics) -> RocCurve:
    """Sweep every distinct statistic as a threshold and integrate the curve.

    error(t) = fraction of non-member statistics <= t, power(t) = fraction of
    member statistics <= t.  The trapezoidal AUC equals the rank statistic
    P(L_member < L_nonmember) + 0.5 P(tie).
    """
    pool = np.asarray(pool_statistics, dtype=np.float64).ravel()
    pop = np.asarray(population_statistics, dtype=np.float64).ravel()
    if pool.size == 0 or pop.size == 0:
        raise ValidationError("both statistic lists must be non-empty")
    if np.isnan(pool).any() or np.isnan(pop).any():
        raise ValidationError("statistics contain NaN")

    values = np.unique(np.concatenate([pool, pop]))
    pool_sorted = np.sort(pool)
    pop_sorted = np.sort(pop)
    # Conceptual start (nobody flagged) precedes even a -inf statistic; without
    # it the trapezoid would drop the area of ties at -inf.
    thresholds = np.concatenate([[-math.inf], values])
    alphas = np.concatenate([[0.0], _step_fractions(pop_sorted, values)])
    betas = np.concatenate([[0.0], _step_fractions(pool_sorted, values)])
    auc = float(np.sum((alphas[1:] - alphas[:-1]) * (betas[1:] + betas[:-1])) / 2.0)
    return RocCurve(alphas=alphas, betas=betas, thresholds=thresholds, auc=auc)


def mann_whitney_auc(pool_statistics, population_statistics) -> float:
    """Rank-statistic AUC: P(member stat < non-member stat) + 0.5 P(tie)."""
    pool = np.asarray(pool_statistics, dtype=np.float64).ravel()
    pop = np.sort(np.asarray(population_statistics, dtype=np.float64).ravel())
    if pool.size == 0 or pop.size == 0:
        raise ValidationError("both statistic lists must be non-empty")
    left = np.searchsorted(pop, pool, side="left")
    right = np.searchsorted(pop, pool, side="right")
    greater = pop.size - right
    wins = greater + 0.5 * (right - left)
    return float(wins.sum() / (pool.size * pop.size))


def decide(statistic: float, threshold: float) -> AttackDecision:
    """Flag IN exactly when the statistic is at or below the threshold."""
    verdict = Verdict.IN if statistic <= threshold else Verdict.OUT
    return AttackDecision(statistic=float(statistic), threshold=float(threshold), verdict=verdict)


def write_curve_dat(alphas, betas, path, comments=()) -> None:
    """Two-column `alpha power` text file, 6 decimals, '#' comment header."""
    alphas = np.asarray(alphas, dtype=np.float64).ravel()
    betas = np.asarray(betas, dtype=np.float64).ravel()
    if alphas.shape != betas.shape:
        raise ValidationError("alpha and power columns differ in length")
    if np.any(np.diff(alphas) < 0):
        raise ValidationError("alpha column must be non-decreasing")
    lines = [f"# {line}" for line in comments]
    lines += [f"{a:.6f} {b:.6f}" for a, b in zip(alphas, betas)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_curve_dat(path) -> tuple[np.ndarray, np.ndarray]:
    alphas, betas = [], []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(f"{path}: malformed row {raw!r}")
        alphas.append(float(parts[0]))
        betas.append(float(parts[1]))
    return np.array(alphas), np.array(betas)
