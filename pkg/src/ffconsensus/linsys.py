"""Single-input linear systems (A, b) over F_p.

Provides the controllability analysis used by the consensus conditions:
the Krylov controllability matrix, a deterministic decomposition into a
controller-companion block plus an uncontrollable block, stabilizability
(the uncontrollable block must be nilpotent), deadbeat gain synthesis,
and the cycle/tree structure of the autonomous map x -> Ax.

The decomposition basis is built greedily: the Krylov chain
b, Ab, A^2 b, ... is kept while independent, then extended with the first
standard basis vectors that remain independent, so the transform Q is
reproducible run to run.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm

from .field import PrimeField
from .matrix import MatrixFF, VectorFF
from .poly import PolyFF, factor, split_nilpotent_bijective, _order_mod_prime_power

DEFAULT_STATE_BOUND = 10**6


@dataclass(frozen=True)
class LinearSystemFF:
    """System pair x(k+1) = A x(k) + b u(k) with a single input column."""

    A: MatrixFF
    b: MatrixFF

    def __post_init__(self):
        if not self.A.is_square:
            raise ValueError("A must be square")
        if self.b.cols != 1 or self.b.rows != self.A.rows:
            raise ValueError("b must be a single column of matching dimension")
        if self.A.field != self.b.field:
            raise ValueError("A and b must share a modulus")

    @property
    def field(self) -> PrimeField:
        return self.A.field

    @property
    def dim(self) -> int:
        return self.A.rows


@dataclass(frozen=True)
class ControllabilityDecomposition:
    """Change of coordinates x^c = Q x exposing the controllable block.

    Q A Q^-1 = [[A_c, A_cc], [0, A_uc]] and Q b = [b_c; 0], where A_c is
    s x s in controller companion form (superdiagonal ones, bottom row
    ``companion_coeffs``) and b_c is the last standard basis vector.
    """

    Q: MatrixFF
    s: int
    A_c: MatrixFF
    A_cc: MatrixFF
    A_uc: MatrixFF
    b_c: MatrixFF
    companion_coeffs: tuple[int, ...]

    def assemble(self) -> MatrixFF:
        """The block matrix [[A_c, A_cc], [0, A_uc]]."""
        field = self.Q.field
        n = self.Q.rows
        s = self.s
        rows = []
        for i in range(s):
            rows.append(
                [self.A_c.entry_int(i, j) for j in range(s)]
                + [self.A_cc.entry_int(i, j) for j in range(n - s)]
            )
        for i in range(n - s):
            rows.append([0] * s + [self.A_uc.entry_int(i, j) for j in range(n - s)])
        return MatrixFF(field, rows) if rows else MatrixFF.zeros(field, 0, 0)


def controllability_matrix(sys: LinearSystemFF) -> MatrixFF:
    """The n x n Krylov matrix [b, Ab, ..., A^(n-1) b]."""
    n = sys.dim
    cols = [sys.b.col(0)]
    for _ in range(n - 1):
        cols.append(sys.A @ cols[-1])
    return MatrixFF(sys.field, [[cols[j].entries[i] for j in range(n)] for i in range(n)])


class _Echelon:
    """Incremental independence test over F_p (row echelon accumulator)."""

    def __init__(self, field: PrimeField, n: int):
        self.p = field.p
        self.n = n
        self.pivots: dict[int, list[int]] = {}

    def try_add(self, vec: list[int]) -> bool:
        v = [x % self.p for x in vec]
        for col, row in self.pivots.items():
            if v[col]:
                f = v[col]
                v = [(a - f * b) % self.p for a, b in zip(v, row)]
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            return False
        inv = pow(v[lead], self.p - 2, self.p)
        self.pivots[lead] = [(x * inv) % self.p for x in v]
        return True


def kalman_decompose(sys: LinearSystemFF) -> ControllabilityDecomposition:
    """Deterministic controllability decomposition of a single-input pair."""
    field = sys.field
    n = sys.dim

    # 1. independent Krylov vectors b, Ab, ... (stops at the first dependence)
    chain: list[VectorFF] = []
    ech = _Echelon(field, n)
    v = sys.b.col(0)
    while ech.try_add(list(v.entries)):
        chain.append(v)
        v = sys.A @ v
    s = len(chain)

    # 2. extend with standard basis vectors to a full basis V (columns)
    basis = list(chain)
    for i in range(n):
        if len(basis) == n:
            break
        e = VectorFF(field, [1 if j == i else 0 for j in range(n)])
        if ech.try_add(list(e.entries)):
            basis.append(e)
    V = MatrixFF(field, [[basis[j].entries[i] for j in range(n)] for i in range(n)])
    V_inv = V.inverse()
    A_V = (V_inv @ sys.A) @ V

    if s == 0:
        Q = V_inv
        return ControllabilityDecomposition(
            Q=Q,
            s=0,
            A_c=MatrixFF.zeros(field, 0, 0),
            A_cc=MatrixFF.zeros(field, 0, n),
            A_uc=A_V,
            b_c=MatrixFF.zeros(field, 0, 1),
            companion_coeffs=(),
        )

    # 3. controller companion form inside the controllable coordinates:
    #    with A1 the leading s x s block and b1 = e_1, take q = last row of
    #    ctrb(A1, b1)^-1 and stack q, qA1, ..., qA1^(s-1); this sends b1 to
    #    e_s and A1 to companion form with superdiagonal ones.
    A1 = MatrixFF(field, [[A_V.entry_int(i, j) for j in range(s)] for i in range(s)])
    b1 = MatrixFF.column(field, [1] + [0] * (s - 1))
    W1 = controllability_matrix(LinearSystemFF(A1, b1))
    q = W1.inverse().row(s - 1)
    t_rows = []
    row = q
    for _ in range(s):
        t_rows.append(list(row.entries))
        row = VectorFF(field, ((A1.transpose()) @ row).entries)
    T = MatrixFF(field, t_rows)

    # full transform: companion change on the controllable block only
    full_rows = []
    for i in range(s):
        full_rows.append(t_rows[i] + [0] * (n - s))
    for i in range(n - s):
        full_rows.append([0] * s + [1 if j == i else 0 for j in range(n - s)])
    Q = MatrixFF(field, full_rows) @ V_inv

    A_Q = (Q @ sys.A) @ Q.inverse()
    A_c = MatrixFF(field, [[A_Q.entry_int(i, j) for j in range(s)] for i in range(s)])
    A_cc = (
        MatrixFF(field, [[A_Q.entry_int(i, j) for j in range(s, n)] for i in range(s)])
        if n > s
        else MatrixFF.zeros(field, s, 0)
    )
    A_uc = (
        MatrixFF(field, [[A_Q.entry_int(i, j) for j in range(s, n)] for i in range(s, n)])
        if n > s
        else MatrixFF.zeros(field, 0, 0)
    )
    b_c = MatrixFF.column(field, [0] * (s - 1) + [1])
    coeffs = tuple(A_c.entry_int(s - 1, j) for j in range(s))
    return ControllabilityDecomposition(
        Q=Q, s=s, A_c=A_c, A_cc=A_cc, A_uc=A_uc, b_c=b_c, companion_coeffs=coeffs
    )


def is_stabilizable(sys: LinearSystemFF) -> bool:
    """True iff the uncontrollable block is nilpotent (vacuous when s = n)."""
    decomp = kalman_decompose(sys)
    return decomp.A_uc.is_nilpotent()


def deadbeat_gain(decomp: ControllabilityDecomposition, d) -> MatrixFF:
    """Gain K (1 x n) making A - d*b*K nilpotent, for nonzero d.

    On the companion coordinates the gain cancels the bottom row:
    k'_l = a_l * d^-1 for l = 1..s, zero on the uncontrollable
    coordinates; K is mapped back through Q.  Rejects d = 0 and systems
    whose uncontrollable block is not nilpotent.
    """
    field = decomp.Q.field
    d_s = field.scalar(d)
    if d_s.value == 0:
        raise ValueError("deadbeat gain requires a nonzero degree d")
    if not decomp.A_uc.is_nilpotent():
        raise ValueError("system is not stabilizable: uncontrollable block is not nilpotent")
    n = decomp.Q.rows
    d_inv = d_s.inv().value
    kc = [(a * d_inv) % field.p for a in decomp.companion_coeffs] + [0] * (n - decomp.s)
    return MatrixFF.row_vector(field, kc) @ decomp.Q


# ----------------------------------------------------------------------
# Cycle / tree structure of x -> Ax
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class CycleStructure:
    """Decomposition of the autonomous dynamics into transients and cycles.

    ``cycles`` maps cycle length -> number of cycles of that length.
    ``tree_depth`` is the number of steps after which every state has
    entered a cycle (enumeration mode: exact; polynomial mode: the
    multiplicity s of the root 0 of the characteristic polynomial, which
    is exact whenever the minimal and characteristic polynomials agree).
    """

    method: str
    tree_depth: int
    cycles: dict[int, int]
    total_states: int
    transient_states: int
    factor_orders: tuple[tuple[PolyFF, int, int], ...] | None = None

    def cycle_lengths(self) -> list[int]:
        """Expanded sorted list of cycle lengths (one entry per cycle)."""
        out: list[int] = []
        for length in sorted(self.cycles):
            out.extend([length] * self.cycles[length])
        return out


def autonomous_cycle_structure(
    A: MatrixFF, mode: str = "enumeration", state_bound: int = DEFAULT_STATE_BOUND
) -> CycleStructure:
    """Cycle multiset and transient depth of the map x -> Ax on F_p^n.

    Enumeration mode walks the whole functional graph and is the
    authoritative answer; it requires p^n <= state_bound.  Polynomial
    mode derives the structure from the characteristic polynomial
    (multiplicities of x give the transient part; cycle lengths come from
    orders of x modulo the irreducible factor powers of the bijective
    part and their lcm combinations).  The polynomial route assumes the
    state module is cyclic, i.e. minimal polynomial = characteristic
    polynomial; callers can cross-check with enumeration when in doubt.
    """
    if not A.is_square:
        raise ValueError("cycle structure requires a square matrix")
    if mode == "enumeration":
        return _cycles_by_enumeration(A, state_bound)
    if mode == "polynomial":
        return _cycles_by_polynomial(A)
    raise ValueError(f"unknown mode {mode!r}")


def _cycles_by_enumeration(A: MatrixFF, state_bound: int) -> CycleStructure:
    p = A.field.p
    n = A.rows
    total = p**n
    if total > state_bound:
        raise ValueError(
            f"state space size {total} exceeds the enumeration bound {state_bound}"
        )
    rows = A.to_rows()

    def successor(x: int) -> int:
        digits = []
        t = x
        for _ in range(n):
            t, r = divmod(t, p)
            digits.append(r)
        out = 0
        for i in range(n - 1, -1, -1):
            row = rows[i]
            out = out * p + (sum(row[j] * digits[j] for j in range(n)) % p)
        return out

    succ = [successor(x) for x in range(total)]

    UNSEEN, DONE = 0, 1
    color = [UNSEEN] * total
    on_cycle = [False] * total
    cycles: dict[int, int] = {}
    for start in range(total):
        if color[start] != UNSEEN:
            continue
        path: list[int] = []
        pos: dict[int, int] = {}
        v = start
        while color[v] == UNSEEN and v not in pos:
            pos[v] = len(path)
            path.append(v)
            v = succ[v]
        if color[v] == UNSEEN:  # closed a brand-new cycle
            length = len(path) - pos[v]
            cycles[length] = cycles.get(length, 0) + 1
            for u in path[pos[v] :]:
                on_cycle[u] = True
        for u in path:
            color[u] = DONE

    # transient depth: longest distance to a cycle
    dist = [0 if on_cycle[x] else -1 for x in range(total)]
    depth = 0
    for start in range(total):
        if dist[start] >= 0:
            continue
        stack = [start]
        v = succ[start]
        while dist[v] < 0:
            stack.append(v)
            v = succ[v]
        base = dist[v]
        for i, u in enumerate(reversed(stack), start=1):
            dist[u] = base + i
        depth = max(depth, dist[start])

    transient = total - sum(length * count for length, count in cycles.items())
    return CycleStructure(
        method="enumeration",
        tree_depth=depth,
        cycles=cycles,
        total_states=total,
        transient_states=transient,
    )


def _cycles_by_polynomial(A: MatrixFF) -> CycleStructure:
    p = A.field.p
    n = A.rows
    s, Q = split_nilpotent_bijective(A.char_poly())
    _, factors = factor(Q)

    # per irreducible power g^e: elements killed by exactly g^k have
    # period order(x mod g^k); combine across factors by lcm of periods
    acc: dict[int, int] = {1: 1}
    table: list[tuple[PolyFF, int, int]] = []
    for g, e in factors:
        m = g.degree
        local: dict[int, int] = {1: 1}  # the zero element
        for k in range(1, e + 1):
            order = _order_mod_prime_power(g, k)
            count = p ** (m * k) - p ** (m * (k - 1))
            local[order] = local.get(order, 0) + count
            if k == 1:
                table.append((g, e, order))
        new: dict[int, int] = {}
        for l1, c1 in acc.items():
            for l2, c2 in local.items():
                key = lcm(l1, l2)
                new[key] = new.get(key, 0) + c1 * c2
        acc = new

    cycles: dict[int, int] = {}
    for length, count in acc.items():
        if count % length:
            raise AssertionError("period counting produced a non-integral cycle count")
        cycles[length] = count // length
    total = p**n
    transient = total - p ** (n - s)
    return CycleStructure(
        method="polynomial",
        tree_depth=s,
        cycles=cycles,
        total_states=total,
        transient_states=transient,
        factor_orders=tuple(table),
    )
