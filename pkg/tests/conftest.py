import random

import pytest

from ffconsensus import (
    LeaderFollowerNetwork,
    LinearSystemFF,
    MatrixFF,
    PrimeField,
    WeightedDigraphFF,
)

F2 = PrimeField(2)
F3 = PrimeField(3)
F5 = PrimeField(5)


# ---------------------------------------------------------------------
# Reference scenario: the five-dimensional F_3 system used throughout
# the worked examples, plus a graph pair where every follower has
# in-degree 1 mod 3 in each graph (one degree is realized as 2+2 = 1)
# and the union of follower supports is acyclic.
# ---------------------------------------------------------------------

REF_A_ROWS = [
    [0, 0, 1, 1, 1],
    [2, 0, 0, 1, 2],
    [0, 2, 2, 2, 0],
    [0, 0, 1, 1, 2],
    [2, 0, 1, 2, 2],
]
REF_B = [1, 1, 2, 2, 1]
REF_GAIN = [2, 1, 2, 0, 1]  # known handcrafted deadbeat gain for d = 1

REF_GRAPH1_EDGES = [(0, 1, 1), (1, 2, 2), (0, 2, 2), (2, 3, 1), (3, 4, 1)]
REF_GRAPH2_EDGES = [(0, 1, 1), (0, 2, 1), (1, 4, 2), (2, 4, 2), (1, 3, 1)]


@pytest.fixture
def f3():
    return F3


@pytest.fixture
def ref_system():
    return LinearSystemFF(MatrixFF(F3, REF_A_ROWS), MatrixFF.column(F3, REF_B))


@pytest.fixture
def ref_graphs():
    return (
        WeightedDigraphFF(F3, 4, REF_GRAPH1_EDGES),
        WeightedDigraphFF(F3, 4, REF_GRAPH2_EDGES),
    )


@pytest.fixture
def ref_network(ref_system, ref_graphs):
    return LeaderFollowerNetwork(sys=ref_system, graphs=ref_graphs)


# ---------------------------------------------------------------------
# Random generators (seeded by the caller)
# ---------------------------------------------------------------------


def random_matrix(rng: random.Random, field: PrimeField, rows: int, cols: int) -> MatrixFF:
    return MatrixFF(field, [[rng.randrange(field.p) for _ in range(cols)] for _ in range(rows)])


def random_invertible(rng: random.Random, field: PrimeField, n: int) -> MatrixFF:
    while True:
        m = random_matrix(rng, field, n, n)
        if m.rank() == n:
            return m


def random_nilpotent(rng: random.Random, field: PrimeField, n: int) -> MatrixFF:
    """Random strictly upper-triangular matrix conjugated by a random basis."""
    strict = MatrixFF(
        field,
        [[rng.randrange(field.p) if j > i else 0 for j in range(n)] for i in range(n)],
    )
    t = random_invertible(rng, field, n)
    return (t @ strict) @ t.inverse()


def random_dag_graph(
    rng: random.Random,
    field: PrimeField,
    num_followers: int,
    edge_prob: float = 0.5,
    leader_prob: float = 0.7,
) -> WeightedDigraphFF:
    """Random follower DAG (random topological order) with random leader edges."""
    order = list(range(1, num_followers + 1))
    rng.shuffle(order)
    edges = []
    for i in range(num_followers):
        for j in range(i + 1, num_followers):
            if rng.random() < edge_prob:
                edges.append((order[i], order[j], rng.randrange(1, field.p)))
    for i in range(1, num_followers + 1):
        if rng.random() < leader_prob:
            edges.append((0, i, rng.randrange(1, field.p)))
    return WeightedDigraphFF(field, num_followers, edges)


def random_network(
    rng: random.Random,
    field: PrimeField,
    n: int,
    num_followers: int,
    num_graphs: int = 1,
    with_gain: bool = True,
) -> LeaderFollowerNetwork:
    sys_pair = LinearSystemFF(
        random_matrix(rng, field, n, n),
        MatrixFF.column(field, [rng.randrange(field.p) for _ in range(n)]),
    )
    graphs = tuple(random_dag_graph(rng, field, num_followers) for _ in range(num_graphs))
    gain = (
        MatrixFF.row_vector(field, [rng.randrange(field.p) for _ in range(n)])
        if with_gain
        else None
    )
    return LeaderFollowerNetwork(sys=sys_pair, graphs=graphs, gain=gain)
