"""Exact fixation probabilities and absorption times on small instances.

Builds the full k^n-state absorbing Markov chain of the process and
solves the standard linear systems: for each type j the hitting
probability of the all-j state, and the expected number of steps until
any type fixates. Two backends: exact rational elimination (authoritative,
small instances) and 64-bit sparse LU (larger desk-scale instances).

States are indexed in mixed radix: index = sum of assignment[v] * k^v.
Self-loop transitions (same-type reproduction) are kept in the kernel so
expected absorption times count every step; for hitting probabilities
they can optionally be conditioned away, which must not change the
answer (tests cross-check both paths).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from gmpy2 import mpq

from .errors import ConfigurationError
from .fitness import TypeSystem
from .graphs import Graph
from .initial import InitialDistribution, enumerate_mut_states

DEFAULT_STATE_CAP = 2_000_000


class StateSpaceTooLargeError(ConfigurationError):
    def __init__(self, states: int, cap: int):
        super().__init__(f"state space has {states} states, cap is {cap}")
        self.states = states
        self.cap = cap


class NotEnumerableError(ConfigurationError):
    pass


class SolveError(ConfigurationError):
    pass


def encode_state(assignment, k: int) -> int:
    idx = 0
    for t in reversed(assignment):
        idx = idx * k + t
    return idx


def decode_state(index: int, k: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        out.append(index % k)
        index //= k
    return tuple(out)


@dataclass
class ExactSolution:
    """Per-state fixation probabilities and expected absorption times."""

    graph: Graph
    types: TypeSystem
    rational: bool
    #: rational mode: list of per-type Fraction tuples; float mode: ndarray
    pi: object
    #: expected steps to full fixation per state
    absorption: object
    fingerprint: dict

    @property
    def num_states(self) -> int:
        return self.types.k ** self.graph.n

    def pi_of(self, assignment, j: int):
        idx = encode_state(assignment, self.types.k)
        return self.pi[idx][j]

    def absorption_of(self, assignment):
        return self.absorption[encode_state(assignment, self.types.k)]

    def states(self):
        k, n = self.types.k, self.graph.n
        for idx in range(self.num_states):
            yield idx, decode_state(idx, k, n)


def _solve_rational_dense(aug: list[list], m: int, rhs_cols: int) -> list[list]:
    """Gaussian elimination over exact rationals, multiple right-hand sides.

    ``aug`` is an m x (m + rhs_cols) augmented matrix of mpq, consumed in
    place. Any nonzero pivot works in exact arithmetic.
    """
    width = m + rhs_cols
    zero = mpq(0)
    for col in range(m):
        piv = None
        for r in range(col, m):
            if aug[r][col]:
                piv = r
                break
        if piv is None:
            raise SolveError("singular system: the chain is not absorbing")
        if piv != col:
            aug[col], aug[piv] = aug[piv], aug[col]
        prow = aug[col]
        pval = prow[col]
        for r in range(col + 1, m):
            row = aug[r]
            a = row[col]
            if a:
                f = a / pval
                row[col] = zero
                for j in range(col + 1, width):
                    pj = prow[j]
                    if pj:
                        row[j] -= f * pj
    # back substitution, one pass per right-hand side
    solutions = [[zero] * rhs_cols for _ in range(m)]
    for c in range(rhs_cols):
        col_idx = m + c
        xs = [zero] * m
        for r in range(m - 1, -1, -1):
            row = aug[r]
            s = row[col_idx]
            for j in range(r + 1, m):
                aj = row[j]
                if aj and xs[j]:
                    s -= aj * xs[j]
            xs[r] = s / row[r]
        for r in range(m):
            solutions[r][c] = xs[r]
    return solutions


def solve(
    graph: Graph,
    ts: TypeSystem,
    *,
    cap: int = DEFAULT_STATE_CAP,
    method: str = "rational",
    condition_self_loops: bool = False,
) -> ExactSolution:
    """Solve the full absorbing chain.

    method "rational" gives exact Fractions; "float" uses sparse LU.
    ``condition_self_loops`` removes same-state transitions from the
    hitting-probability system (probabilities are unchanged; expected
    absorption times always keep self-loops).
    """
    if method not in ("rational", "float"):
        raise ValueError(f"method must be 'rational' or 'float', got {method!r}")
    k, n = ts.k, graph.n
    num_states = k**n
    if num_states > cap:
        raise StateSpaceTooLargeError(num_states, cap)

    absorbing = {encode_state([j] * n, k): j for j in range(k)}
    transient = [idx for idx in range(num_states) if idx not in absorbing]
    pos = {idx: i for i, idx in enumerate(transient)}
    m = len(transient)
    powers = [k**v for v in range(n)]
    fingerprint = {
        "graph": graph.fingerprint(),
        "types": ts.fingerprint(),
        "method": method,
    }

    if method == "rational":
        fit = [mpq(f.numerator, f.denominator) for f in ts.fitness]
        one = mpq(1)
    else:
        fit = [float(f) for f in ts.fitness]
        one = 1.0

    def kernel_row(idx: int, assignment) -> dict[int, object]:
        total = sum(fit[t] for t in assignment)
        row: dict[int, object] = {}
        for v in range(n):
            tv = assignment[v]
            p_v = fit[tv] / total / graph.degrees[v]
            for w in graph.adjacency[v]:
                target = idx + (tv - assignment[w]) * powers[w]
                row[target] = row.get(target, 0) + p_v
        return row

    rows = []
    for idx in transient:
        rows.append(kernel_row(idx, decode_state(idx, k, n)))

    if method == "rational":
        rhs_cols = k + 1
        aug = []
        for i, idx in enumerate(transient):
            row = [mpq(0)] * (m + rhs_cols)
            row[i] = one
            loop_p = rows[i].get(idx, 0)
            keep = one - loop_p if condition_self_loops else one
            for target, p in rows[i].items():
                if condition_self_loops and target == idx:
                    continue
                p_eff = p / keep if condition_self_loops else p
                if target in absorbing:
                    row[m + absorbing[target]] += p_eff
                else:
                    row[pos[target]] -= p_eff
            row[m + k] = one  # E[A] right-hand side
            aug.append(row)
        sols = _solve_rational_dense(aug, m, rhs_cols) if m else []
        pi: list = [None] * num_states
        ea: list = [None] * num_states
        for idx, j in absorbing.items():
            pi[idx] = tuple(Fraction(1) if jj == j else Fraction(0) for jj in range(k))
            ea[idx] = Fraction(0)
        for i, idx in enumerate(transient):
            vals = sols[i]
            pi[idx] = tuple(
                Fraction(vals[j].numerator, vals[j].denominator) for j in range(k)
            )
            ea[idx] = Fraction(vals[k].numerator, vals[k].denominator)
        if condition_self_loops:
            # conditioned system counts only state-changing steps; the
            # unconditioned absorption time is recomputed separately
            full = solve(graph, ts, cap=cap, method="rational")
            ea = full.absorption
        return ExactSolution(graph, ts, True, pi, ea, fingerprint)

    # float backend
    from scipy.sparse import csc_matrix
    from scipy.sparse.linalg import splu

    pi_arr = np.zeros((num_states, k))
    ea_arr = np.zeros(num_states)
    for idx, j in absorbing.items():
        pi_arr[idx, j] = 1.0
    if m:
        data, ri, ci = [], [], []
        b = np.zeros((m, k + 1))
        b[:, k] = 1.0
        for i, idx in enumerate(transient):
            diag = 1.0
            for target, p in rows[i].items():
                if target == idx:
                    diag -= p
                elif target in absorbing:
                    b[i, absorbing[target]] += p
                else:
                    ri.append(i)
                    ci.append(pos[target])
                    data.append(-p)
            ri.append(i)
            ci.append(i)
            data.append(diag)
        matrix = csc_matrix((data, (ri, ci)), shape=(m, m))
        sol = splu(matrix).solve(b)
        for i, idx in enumerate(transient):
            pi_arr[idx, :] = sol[i, :k]
            ea_arr[idx] = sol[i, k]
    return ExactSolution(graph, ts, False, pi_arr, ea_arr, fingerprint)


def kernel_rows(graph: Graph, ts: TypeSystem, assignment) -> dict[tuple, Fraction]:
    """Exact kernel row for one state, keyed by target assignment tuple."""
    fit = ts.fitness
    total = sum((fit[t] for t in assignment), Fraction(0))
    base = tuple(assignment)
    out: dict[tuple, Fraction] = {}
    for v in range(graph.n):
        p_v = fit[base[v]] / total / graph.degrees[v]
        for w in graph.adjacency[v]:
            target = base if base[w] == base[v] else (
                base[:w] + (base[v],) + base[w + 1:]
            )
            out[target] = out.get(target, Fraction(0)) + p_v
    return out


def distribution_average(sol: ExactSolution, dist: InitialDistribution):
    """Per-type fixation probabilities under an enumerable start distribution."""
    k = sol.types.k
    if dist.kind == "mut":
        states = enumerate_mut_states(sol.graph, sol.types)
        if sol.rational:
            acc = [Fraction(0)] * k
            for s in states:
                row = sol.pi[encode_state(s, k)]
                for j in range(k):
                    acc[j] += row[j]
            return [a / len(states) for a in acc]
        rows = np.array([sol.pi[encode_state(s, k)] for s in states])
        return list(rows.mean(axis=0))
    if dist.kind == "list":
        if sol.rational:
            acc = [Fraction(0)] * k
            for p, s in dist.entries:
                row = sol.pi[encode_state(s, k)]
                for j in range(k):
                    acc[j] += p * row[j]
            return acc
        acc_arr = np.zeros(k)
        for p, s in dist.entries:
            acc_arr += float(p) * np.asarray(sol.pi[encode_state(s, k)])
        return list(acc_arr)
    raise NotEnumerableError("black-box oracle distributions cannot be enumerated")


def expected_absorption_under(sol: ExactSolution, dist: InitialDistribution):
    """Expected full-fixation time averaged over an enumerable distribution."""
    if dist.kind == "mut":
        states = enumerate_mut_states(sol.graph, sol.types)
        if sol.rational:
            return sum(
                (sol.absorption[encode_state(s, sol.types.k)] for s in states),
                Fraction(0),
            ) / len(states)
        return float(
            np.mean([sol.absorption[encode_state(s, sol.types.k)] for s in states])
        )
    if dist.kind == "list":
        if sol.rational:
            return sum(
                (p * sol.absorption[encode_state(s, sol.types.k)] for p, s in dist.entries),
                Fraction(0),
            )
        return float(
            sum(float(p) * sol.absorption[encode_state(s, sol.types.k)] for p, s in dist.entries)
        )
    raise NotEnumerableError("black-box oracle distributions cannot be enumerated")
