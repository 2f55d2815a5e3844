"""Exact discrete-time simulation of leader-follower networks over F_p.

All updates are synchronous: every agent reads the pre-step states, the
leader evolves autonomously, and each follower applies the relative-state
control u_i = K * sum_j a_ij (x_j - x_i) before advancing.  Tracking
errors are reported with ordinary integer arithmetic on the canonical
residues (e_i = sum of componentwise absolute differences), so e_i = 0
exactly when the follower matches the leader componentwise.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from itertools import product

from .consensus import LeaderFollowerNetwork, SwitchingSignal
from .field import PrimeField
from .matrix import VectorFF

DEFAULT_ORACLE_BOUND = 10**6


@dataclass(frozen=True)
class NetworkState:
    """Snapshot at one step: leader state plus all follower states."""

    step: int
    leader: VectorFF
    followers: tuple[VectorFF, ...]

    def errors(self) -> list[int]:
        """Integer error e_i per follower (componentwise |x_i - x_0| sums)."""
        x0 = self.leader.entries
        return [
            sum(abs(a - b) for a, b in zip(f.entries, x0)) for f in self.followers
        ]

    def error_vectors(self) -> list[VectorFF]:
        """Follower-minus-leader differences over F_p (stacked error state)."""
        return [f - self.leader for f in self.followers]


@dataclass(frozen=True)
class Trajectory:
    """Recorded run: states, per-step errors, and the consensus step."""

    states: tuple[NetworkState, ...]
    errors: tuple[tuple[int, ...], ...]
    consensus_step: int | None
    signal_indices: tuple[int, ...]
    metadata: dict = dc_field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return len(self.states) - 1


def random_state(field: PrimeField, n: int, num_followers: int, rng: random.Random) -> NetworkState:
    """Uniform initial condition over F_p^n per agent."""
    draw = lambda: VectorFF(field, [rng.randrange(field.p) for _ in range(n)])
    return NetworkState(step=0, leader=draw(), followers=tuple(draw() for _ in range(num_followers)))


def step(net: LeaderFollowerNetwork, state: NetworkState, graph_index: int = 0) -> NetworkState:
    """One synchronous update under the chosen graph."""
    if net.gain is None:
        raise ValueError("stepping requires a gain K")
    A = net.sys.A
    b = net.sys.b.col(0)
    K = net.gain
    g = net.graphs[graph_index]
    field = net.field
    n = net.sys.dim

    all_states = (state.leader,) + state.followers
    new_leader = A @ state.leader
    new_followers = []
    for i in range(1, net.num_followers + 1):
        x_i = all_states[i]
        rel = VectorFF(field, [0] * n)
        for j in range(net.num_followers + 1):
            w = g.weight(j, i)
            if w:
                rel = rel + (all_states[j] - x_i).scale(w)
        u = sum(K.entry_int(0, t) * rel.entries[t] for t in range(n)) % field.p
        new_followers.append((A @ x_i) + b.scale(u))
    return NetworkState(step=state.step + 1, leader=new_leader, followers=tuple(new_followers))


def simulate(
    net: LeaderFollowerNetwork,
    init: NetworkState,
    signal: SwitchingSignal | None = None,
    horizon: int = 1,
    metadata: dict | None = None,
) -> Trajectory:
    """Run ``horizon`` steps, recording states, errors, and the first step
    from which every error stays zero through the horizon (None if the
    errors are still nonzero at the end)."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if signal is None:
        signal = SwitchingSignal.constant(0)
    indices = signal.realize(horizon)
    bad = [i for i in indices if not (0 <= i < len(net.graphs))]
    if bad:
        raise ValueError(f"switching signal emitted invalid graph indices {bad}")

    states = [init]
    for k in range(horizon):
        states.append(step(net, states[-1], indices[k]))
    errors = [tuple(s.errors()) for s in states]

    consensus_step: int | None = None
    for k in range(len(errors) - 1, -1, -1):
        if any(errors[k]):
            break
        consensus_step = k
    meta = dict(metadata or {})
    meta.setdefault("signal_kind", signal.kind)
    if signal.seed is not None:
        meta.setdefault("signal_seed", signal.seed)
    return Trajectory(
        states=tuple(states),
        errors=tuple(errors),
        consensus_step=consensus_step,
        signal_indices=tuple(indices),
        metadata=meta,
    )


# ----------------------------------------------------------------------
# Brute-force oracle
# ----------------------------------------------------------------------


def _delta_stepper(net: LeaderFollowerNetwork, graph_index: int):
    """Stepper for the stacked error state, straight from the agent
    recurrence delta_i' = A delta_i + bK (sum_j abar_ij delta_j - d_i delta_i);
    graph tables are precomputed once."""
    g = net.graphs[graph_index]
    p = net.field.p
    n = net.sys.dim
    N = net.num_followers
    a_rows = net.sys.A.to_rows()
    b = net.sys.b.col(0).entries
    k_row = net.gain.to_rows()[0]
    degs = [d.value for _, d in sorted(g.in_degrees().items())]
    in_edges: list[list[tuple[int, int]]] = [[] for _ in range(N)]
    for src, tgt, w in g.edges():
        if src >= 1:
            in_edges[tgt - 1].append((src - 1, w))

    def advance(deltas: tuple[tuple[int, ...], ...]):
        out = []
        for i in range(N):
            acc = [0] * n
            for j, w in in_edges[i]:
                dj = deltas[j]
                for t in range(n):
                    acc[t] += w * dj[t]
            di = degs[i]
            d_i = deltas[i]
            for t in range(n):
                acc[t] = (acc[t] - di * d_i[t]) % p
            u = sum(k_row[t] * acc[t] for t in range(n)) % p
            out.append(
                tuple(
                    (sum(a_rows[t][r] * d_i[r] for r in range(n)) + b[t] * u) % p
                    for t in range(n)
                )
            )
        return tuple(out)

    return advance


def exhaustive_consensus_oracle(
    net: LeaderFollowerNetwork,
    horizon: int,
    signal: SwitchingSignal | None = None,
    all_signals: bool = False,
    state_bound: int = DEFAULT_ORACLE_BOUND,
) -> bool:
    """True iff EVERY initial condition reaches zero error within horizon.

    The zero error state is absorbing, so the check reduces to "is the
    error zero at the horizon".  With ``all_signals`` the reachable error
    sets are advanced under every graph at every step, which decides all
    q^horizon switching sequences at once without enumerating them.

    Enumerates full network states (leader included, via the agent update
    rule) when p^(n(N+1)) fits the bound, otherwise the errors directly;
    both routes are independent of the Kronecker-assembled error matrix.
    """
    if net.gain is None:
        raise ValueError("the oracle requires a gain K")
    p = net.field.p
    n = net.sys.dim
    N = net.num_followers
    full_count = p ** (n * (N + 1))
    delta_count = p ** (n * N)

    if all_signals:
        if delta_count > state_bound:
            raise ValueError(
                f"error state space {delta_count} exceeds the oracle bound {state_bound}"
            )
        steppers = [_delta_stepper(net, gi) for gi in range(len(net.graphs))]
        current = set(product(product(range(p), repeat=n), repeat=N))
        for _ in range(horizon):
            current = {adv(deltas) for deltas in current for adv in steppers}
        zero = tuple(tuple([0] * n) for _ in range(N))
        return current == {zero}

    if signal is None:
        signal = SwitchingSignal.constant(0)
    indices = signal.realize(horizon)

    if full_count <= state_bound:
        field = net.field
        zero_errors = True
        for flat in product(range(p), repeat=n * (N + 1)):
            vecs = [
                VectorFF(field, flat[a * n : (a + 1) * n]) for a in range(N + 1)
            ]
            st = NetworkState(step=0, leader=vecs[0], followers=tuple(vecs[1:]))
            for k in range(horizon):
                st = step(net, st, indices[k])
            if any(st.errors()):
                zero_errors = False
                break
        return zero_errors

    if delta_count > state_bound:
        raise ValueError(
            f"state space sizes {full_count} / {delta_count} exceed the oracle bound {state_bound}"
        )
    steppers = [_delta_stepper(net, gi) for gi in range(len(net.graphs))]
    zero = tuple(tuple([0] * n) for _ in range(N))
    for deltas in product(product(range(p), repeat=n), repeat=N):
        cur = deltas
        for k in range(horizon):
            cur = steppers[indices[k]](cur)
        if cur != zero:
            return False
    return True


def default_horizon(net: LeaderFollowerNetwork) -> int:
    """Bound + 5 when the consensus hypotheses hold, else 4*N*n."""
    from .consensus import convergence_bound

    try:
        return convergence_bound(net) + 5
    except ValueError:
        return 4 * net.num_followers * net.sys.dim
