"""Weighted directed interaction graphs with edge weights in F_p.

Node 0 is the leader; nodes 1..N are followers.  Edges carry nonzero
weights (a zero weight means "no edge" and is rejected at construction),
no edge may point into the leader, and at most one edge exists per
ordered pair.  The in-degree of a follower sums ALL incoming weights,
including the leader's edge, reduced mod p; this leader-inclusive
convention is what the error-dynamics derivation requires and is used
consistently everywhere in the package.

DAG detection and the topological permutation operate on the edge
support of the follower subgraph, never on mod-p weight sums.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Sequence

from .field import PrimeField, Scalar
from .matrix import MatrixFF


class GraphCycleError(ValueError):
    """Raised when an acyclic follower graph is required; carries a witness."""

    def __init__(self, cycle: list[int]):
        super().__init__(f"follower subgraph has a directed cycle: {cycle}")
        self.cycle = cycle


class WeightedDigraphFF:
    """Digraph on {0, 1, ..., N} with weights in F_p; node 0 is the leader."""

    __slots__ = ("field", "num_followers", "_edges")

    def __init__(
        self,
        field: PrimeField,
        num_followers: int,
        edges: Iterable[tuple[int, int, int]] = (),
    ):
        if num_followers < 1:
            raise ValueError("at least one follower is required")
        self.field = field
        self.num_followers = num_followers
        edge_map: dict[tuple[int, int], int] = {}
        for src, tgt, w in edges:
            if not (0 <= src <= num_followers):
                raise ValueError(f"edge source {src} out of range 0..{num_followers}")
            if not (1 <= tgt <= num_followers):
                raise ValueError(
                    f"edge target {tgt} invalid: targets must be followers 1..{num_followers}"
                )
            wv = (w.value if isinstance(w, Scalar) else int(w)) % field.p
            if wv == 0:
                raise ValueError(f"edge ({src}->{tgt}) has weight 0 mod {field.p}: not an edge")
            if (src, tgt) in edge_map:
                raise ValueError(f"duplicate edge ({src}->{tgt})")
            edge_map[(src, tgt)] = wv
        self._edges = dict(sorted(edge_map.items()))

    def edges(self) -> list[tuple[int, int, int]]:
        """Edge list as (source, target, weight), deterministically sorted."""
        return [(s, t, w) for (s, t), w in self._edges.items()]

    def weight(self, src: int, tgt: int) -> int:
        """Weight of edge src -> tgt, 0 when absent."""
        return self._edges.get((src, tgt), 0)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, WeightedDigraphFF)
            and self.field == other.field
            and self.num_followers == other.num_followers
            and self._edges == other._edges
        )

    def __hash__(self) -> int:
        return hash((self.field.p, self.num_followers, tuple(self._edges.items())))

    def __repr__(self) -> str:
        return (
            f"WeightedDigraphFF(p={self.field.p}, N={self.num_followers}, "
            f"edges={self.edges()})"
        )

    # -- matrices and degrees -------------------------------------------

    def adjacency_matrices(self) -> tuple[MatrixFF, MatrixFF, MatrixFF]:
        """(full adjacency, follower adjacency, follower degree matrix).

        Entry (i, j) of the adjacency is the weight of edge j -> i.  The
        degree matrix is diagonal with the leader-inclusive follower
        in-degrees d_1..d_N mod p.
        """
        N = self.num_followers
        full = [[0] * (N + 1) for _ in range(N + 1)]
        for (src, tgt), w in self._edges.items():
            full[tgt][src] = w
        a_full = MatrixFF(self.field, full)
        a_bar = MatrixFF(self.field, [row[1:] for row in full[1:]])
        degs = self.in_degrees()
        d_bar = MatrixFF(
            self.field,
            [[degs[i + 1].value if i == j else 0 for j in range(N)] for i in range(N)],
        )
        return a_full, a_bar, d_bar

    def in_degrees(self) -> dict[int, Scalar]:
        """Leader-inclusive in-degree of each follower, mod p."""
        totals = {i: 0 for i in range(1, self.num_followers + 1)}
        for (_, tgt), w in self._edges.items():
            totals[tgt] += w
        return {i: self.field.scalar(v) for i, v in totals.items()}

    def laplacian(self) -> MatrixFF:
        """D - A for the full (N+1)-node graph; rows sum to zero mod p."""
        a_full, _, _ = self.adjacency_matrices()
        n = self.num_followers + 1
        p = self.field.p
        rows = a_full.to_rows()
        lap = [
            [
                (sum(rows[i]) % p if i == j else 0) - rows[i][j]
                for j in range(n)
            ]
            for i in range(n)
        ]
        return MatrixFF(self.field, lap)

    # -- structure --------------------------------------------------------

    def follower_successors(self) -> dict[int, list[int]]:
        succ: dict[int, list[int]] = {i: [] for i in range(1, self.num_followers + 1)}
        for (src, tgt), _ in self._edges.items():
            if src >= 1:
                succ[src].append(tgt)
        return succ

    def is_dag(self) -> bool:
        """True iff the follower subgraph has no directed cycle."""
        try:
            self._topological_order()
            return True
        except GraphCycleError:
            return False

    def _topological_order(self) -> list[int]:
        """Kahn's algorithm on follower support, smallest node first."""
        N = self.num_followers
        succ = self.follower_successors()
        indeg = {i: 0 for i in range(1, N + 1)}
        for src, outs in succ.items():
            for t in outs:
                indeg[t] += 1
        ready = [i for i in range(1, N + 1) if indeg[i] == 0]
        heapq.heapify(ready)
        order: list[int] = []
        while ready:
            v = heapq.heappop(ready)
            order.append(v)
            for t in succ[v]:
                indeg[t] -= 1
                if indeg[t] == 0:
                    heapq.heappush(ready, t)
        if len(order) < N:
            remaining = {i for i in range(1, N + 1) if indeg[i] > 0}
            raise GraphCycleError(self._find_cycle(remaining))
        return order

    def _find_cycle(self, remaining: set[int]) -> list[int]:
        # every remaining node keeps a predecessor inside the remaining
        # set, so walking backwards must close a cycle
        preds: dict[int, list[int]] = {i: [] for i in remaining}
        for (src, tgt), _ in self._edges.items():
            if src in remaining and tgt in remaining:
                preds[tgt].append(src)
        seen: dict[int, int] = {}
        path: list[int] = []
        v = min(remaining)
        while v not in seen:
            seen[v] = len(path)
            path.append(v)
            v = min(preds[v])
        return list(reversed(path[seen[v] :]))

    def topological_order(self) -> list[int]:
        """Follower nodes sorted sources-first; raises GraphCycleError."""
        return self._topological_order()

    def topo_permutation(self) -> list[int]:
        """0-based index permutation that strictly upper-triangularizes
        the follower adjacency via ``permute_similarity``.

        Receivers must precede their senders, so this is the reversed
        topological order shifted to 0-based follower indices.
        """
        order = self._topological_order()
        return [node - 1 for node in reversed(order)]

    def leader_globally_reachable(self) -> bool:
        """True iff every follower is reachable from the leader."""
        succ: dict[int, list[int]] = {i: [] for i in range(self.num_followers + 1)}
        for (src, tgt), _ in self._edges.items():
            succ[src].append(tgt)
        seen = {0}
        frontier = [0]
        while frontier:
            v = frontier.pop()
            for t in succ[v]:
                if t not in seen:
                    seen.add(t)
                    frontier.append(t)
        return len(seen) == self.num_followers + 1

    def common_degree(self) -> "DegreeCheck":
        """Check that all follower in-degrees are equal and nonzero mod p.

        Failure is a value, not an exception: the result distinguishes a
        zero degree (some follower's weights cancel mod p) from unequal
        degrees, and names the offending followers.
        """
        degs = {i: d.value for i, d in self.in_degrees().items()}
        zero = tuple(sorted(i for i, d in degs.items() if d == 0))
        if zero:
            return DegreeCheck(ok=False, degree=None, reason="zero_degree",
                               offenders=zero, degrees=degs)
        values = set(degs.values())
        if len(values) > 1:
            ref = degs[1]
            offenders = tuple(sorted(i for i, d in degs.items() if d != ref))
            return DegreeCheck(ok=False, degree=None, reason="unequal",
                               offenders=offenders, degrees=degs)
        return DegreeCheck(ok=True, degree=self.field.scalar(degs[1]),
                           reason=None, offenders=(), degrees=degs)


@dataclass(frozen=True)
class DegreeCheck:
    ok: bool
    degree: Scalar | None
    reason: str | None  # None | "zero_degree" | "unequal"
    offenders: tuple[int, ...]
    degrees: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "degree": self.degree.value if self.degree is not None else None,
            "reason": self.reason,
            "offenders": list(self.offenders),
            "degrees": {str(k): v for k, v in sorted(self.degrees.items())},
        }


def union(graphs: Sequence[WeightedDigraphFF]) -> WeightedDigraphFF:
    """Support-level union: an edge is present iff present in any input.

    Weights may conflict across inputs; the first graph's weight is kept
    (the union is only ever used for support questions such as DAG
    testing, where any nonzero representative is equivalent).
    """
    if not graphs:
        raise ValueError("union of an empty graph list")
    first = graphs[0]
    for g in graphs[1:]:
        if g.field != first.field or g.num_followers != first.num_followers:
            raise ValueError("graphs must share follower count and modulus")
    merged: dict[tuple[int, int], int] = {}
    for g in graphs:
        for (src, tgt), w in g._edges.items():
            merged.setdefault((src, tgt), w)
    return WeightedDigraphFF(
        first.field, first.num_followers, [(s, t, w) for (s, t), w in merged.items()]
    )
