import numpy as np
import pytest
from hypothesis import settings

from bntrace.bn import BayesianNetwork
from bntrace.experiment import random_structure

settings.register_profile("suite", deadline=None, max_examples=50)
settings.load_profile("suite")


def build_strong_generator(m: int, eta: int, edges: int, seed: int) -> BayesianNetwork:
    """Random binary DAG with monotone-additive CPT rows.

    Child tables use p(1 | parents) = 0.2 + 0.6 * mean(parent values), so every
    parent contributes visible pairwise signal; parentless marginals come from
    U(0.25, 0.75).  Strong enough that greedy search recovers the structure.
    """
    struct = random_structure(m, (2,) * m, eta, edges, seed)
    rng = np.random.default_rng(seed + 1)
    cpts = []
    for i in range(m):
        ps = struct.parents[i]
        if not ps:
            p1 = rng.uniform(0.25, 0.75)
            cpts.append(np.array([[1.0 - p1, p1]]))
            continue
        rows = struct.parent_row_count(i)
        weights = struct.radix_weights(i)
        table = np.empty((rows, 2))
        for r in range(rows):
            vals = [r // weights[t] % 2 for t in range(len(ps))]
            p1 = 0.2 + 0.6 * (sum(vals) / len(vals))
            table[r] = (1.0 - p1, p1)
        cpts.append(table)
    return BayesianNetwork(struct, tuple(cpts))


@pytest.fixture(scope="session")
def strong_generator():
    return build_strong_generator


@pytest.fixture()
def chain_net():
    """A -> B with Pr(A=1)=0.3, Pr(B=1|A=0)=0.5, Pr(B=1|A=1)=0.8."""
    from bntrace.bn import NetworkStructure

    structure = NetworkStructure((2, 2), ((), (0,)))
    cpts = (
        np.array([[0.7, 0.3]]),
        np.array([[0.5, 0.5], [0.2, 0.8]]),
    )
    return BayesianNetwork(structure, cpts, names=("A", "B"), floor=0.0)
