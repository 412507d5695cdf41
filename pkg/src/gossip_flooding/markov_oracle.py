"""Exact ground truth for the rumor process on tiny graphs.

The process is a finite Markov chain on configurations (one information set
per site, the step counter ignored). This module enumerates every
configuration reachable from a scenario and then:
1. Solves the first-step equations for expected hitting times exactly
2. Iterates the distribution to get exact hitting-time CDFs
3. Builds the M_n(k) / A_n(k) tables for small complete graphs
4. Compares the CDFs of tau_x and Y_x (time reversal duality)

Every non-trivial transition strictly enlarges the total number of
(site, information) pairs, so the chain is upper triangular once states are
sorted by that count. Expected hitting times are therefore solved by back
substitution from the fullest states downwards, with no fill-in, using exact
``gmpy2.mpq`` arithmetic (or floats on the n = 5 smoke path). CDFs count edge
sequences with Python integers and divide by |E|^t at the end.
"""
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from gmpy2 import mpq

from .common.config import FLOAT_PATH_MAX_N, FLOAT_PATH_STATE_CAP, ORACLE_CAP, ORACLE_STATE_CAP
from .common.errors import InvalidSizeError, OracleCapExceededError, UnreachableTargetError
from .common.validators import validate_min, validate_range
from .graphs import Graph, make_complete
from .rumor_process import Scenario, Target, init_state

TargetLike = Union[Target, str, Iterable[int]]


@dataclass
class ConfigurationIndex:
    """Dense numbering of the configurations reachable from one initial state.

    Attributes:
        graph: Graph the chain runs on
        m: Number of informations
        states: Configurations as tuples of per-site bitmask ints
        index: Reverse map from configuration to its number
        initial: Number of the initial configuration (always 0)
        moves: Per state, Counter of successor number -> how many edges lead there
    """

    graph: Graph
    m: int
    states: list = field(default_factory=list)
    index: dict = field(default_factory=dict)
    initial: int = 0
    moves: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.states)

    def holds(self, state: tuple, target: Target) -> bool:
        infos, sites = target.resolve(self.graph.n, self.m)
        mask = sum(1 << j for j in infos)
        return all(state[x] & mask == mask for x in sites)


@dataclass(frozen=True)
class ExactTable:
    """Exact M_n(k) for k = 1..n and A_n(k) for k = 2..n on K_n.

    Attributes:
        n: Site count
        M: M[k-1] = M_n(k)
        A: A[k-2] = A_n(k)
        Y0: E[Y_0] under the all-distinct scenario (equals M_n(1))
    """

    n: int
    M: tuple
    A: tuple
    Y0: Optional[object] = None

    def m_value(self, k: int) -> mpq:
        return self.M[k - 1]

    def a_value(self, k: int) -> mpq:
        return self.A[k - 2]

    def interleaving_chain(self) -> list:
        """[A(2), M(1), A(3), M(2), ..., A(n), M(n-1), M(n)]."""
        chain = []
        for k in range(2, self.n + 1):
            chain.extend([self.a_value(k), self.m_value(k - 1)])
        chain.append(self.m_value(self.n))
        return chain

    def interleaving_holds(self) -> bool:
        chain = self.interleaving_chain()
        return all(a <= b for a, b in zip(chain, chain[1:]))

    def m_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.M, self.M[1:]))

    def a_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.A, self.A[1:]))


def _as_target(target: TargetLike) -> Target:
    if isinstance(target, Target):
        return target
    if isinstance(target, str):
        if target in ("total", "all"):
            return Target.total()
        raise InvalidSizeError(f"unknown target {target!r}")
    return Target.propagation(list(target))


def enumerate_reachable(g: Graph, s: Scenario, state_cap: int = ORACLE_STATE_CAP) -> ConfigurationIndex:
    """Breadth-first closure of the initial configuration under all |E| moves.

    Args:
        g: Connected graph
        s: Initial scenario
        state_cap: Give up once more configurations than this are found

    Returns:
        ConfigurationIndex with the initial configuration numbered 0

    Raises:
        OracleCapExceededError: If the closure exceeds state_cap; the error
                                reports how many states were reached
    """
    start = init_state(g, s)
    initial = tuple(int(sum(1 << j for j in start.site_set(x))) for x in range(g.n))
    idx = ConfigurationIndex(graph=g, m=start.m)
    idx.states.append(initial)
    idx.index[initial] = 0

    queue = deque([initial])
    while queue:
        state = queue.popleft()
        successors: Counter = Counter()
        for u, v in g.edges:
            merged = state[u] | state[v]
            if merged == state[u] and merged == state[v]:
                nxt = state
            else:
                as_list = list(state)
                as_list[u] = merged
                as_list[v] = merged
                nxt = tuple(as_list)
            if nxt not in idx.index:
                if len(idx.states) >= state_cap:
                    raise OracleCapExceededError(
                        f"more than {state_cap} configurations reachable on {g.name}",
                        states_reached=len(idx.states))
                idx.index[nxt] = len(idx.states)
                idx.states.append(nxt)
                queue.append(nxt)
            successors[idx.index[nxt]] += 1
        idx.moves.append(successors)
    return idx


def _solve(idx: ConfigurationIndex, target: Target, float_path: bool = False):
    edges = idx.graph.edge_count
    weight = [sum(bin(site).count("1") for site in state) for state in idx.states]
    order = sorted(range(len(idx)), key=lambda i: weight[i], reverse=True)
    zero = 0.0 if float_path else mpq(0)

    expected: dict = {}
    for i in order:
        state = idx.states[i]
        if idx.holds(state, target):
            expected[i] = zero
            continue
        stay = idx.moves[i].get(i, 0)
        if stay == edges:
            raise UnreachableTargetError(
                f"{target.label} can never hold from configuration {state} on {idx.graph.name}")
        onward = sum((count * expected[j] for j, count in idx.moves[i].items() if j != i), zero)
        if float_path:
            expected[i] = (edges + onward) / (edges - stay)
        else:
            expected[i] = (edges + onward) / mpq(edges - stay)
    return expected[idx.initial]


def expected_hitting_time(g: Graph, s: Scenario, target: TargetLike, float_path: bool = False,
                          index: Optional[ConfigurationIndex] = None):
    """Exact expected first step at which ``target`` holds.

    Solves E[c] = 1 + (1/|E|) sum_e E[next(c, e)] with E = 0 on target
    configurations.

    Args:
        g: Connected graph
        s: Initial scenario
        target: A Target, "total", or an iterable of information indices (tau_H)
        float_path: Solve in floats instead of exact rationals
        index: Reuse an enumeration of (g, s) already built

    Returns:
        mpq (or float on the float path)

    Raises:
        OracleCapExceededError: If the state space is too large
        UnreachableTargetError: If some reachable configuration can never reach the target
    """
    cap = FLOAT_PATH_STATE_CAP if float_path else ORACLE_STATE_CAP
    idx = index if index is not None else enumerate_reachable(g, s, cap)
    return _solve(idx, _as_target(target), float_path)


def hitting_time_cdf(g: Graph, s: Scenario, target: TargetLike, horizon: int,
                     index: Optional[ConfigurationIndex] = None) -> list:
    """Exact P[tau <= t] for t = 0..horizon with the target made absorbing.

    Returns:
        List of horizon + 1 mpq probabilities, non-decreasing in t

    Raises:
        OracleCapExceededError: If the state space is too large
    """
    validate_min(horizon, 0, "horizon")
    idx = index if index is not None else enumerate_reachable(g, s)
    tgt = _as_target(target)
    edges = idx.graph.edge_count
    absorbing = [idx.holds(state, tgt) for state in idx.states]

    # Integer counts of edge sequences of length t; probabilities are counts / |E|^t
    absorbed = 1 if absorbing[idx.initial] else 0
    live: dict = {} if absorbed else {idx.initial: 1}
    cdf = [mpq(absorbed)]
    for t in range(1, horizon + 1):
        absorbed *= edges
        nxt: Counter = Counter()
        for i, count in live.items():
            for j, ways in idx.moves[i].items():
                if absorbing[j]:
                    absorbed += count * ways
                else:
                    nxt[j] += count * ways
        live = nxt
        cdf.append(mpq(absorbed, edges ** t))
    return cdf


def check_oracle_size(n: int, float_path: bool) -> None:
    limit = FLOAT_PATH_MAX_N if float_path else ORACLE_CAP
    if n > limit:
        hint = "" if float_path else " (pass --float-path for n = 5 smoke runs)"
        raise OracleCapExceededError(f"n = {n} exceeds the oracle cap of {limit}{hint}")


def exact_tables(n: int, float_path: bool = False) -> ExactTable:
    """All M_n(k) and A_n(k) on K_n from the full chain solve.

    M_n(k) is the expected hitting time of informations {0..k-1} from the
    all-distinct scenario; A_n(k) that of {0..k-2} from the duplicated-first
    scenario.

    Raises:
        InvalidSizeError: If n < 3 (the duplicated-first scenario needs 3 sites)
        OracleCapExceededError: If n exceeds the oracle cap
    """
    validate_min(n, 3, "site count n")
    check_oracle_size(n, float_path)
    g = make_complete(n)
    cap = FLOAT_PATH_STATE_CAP if float_path else ORACLE_STATE_CAP

    distinct = Scenario.distinct_all()
    idx_m = enumerate_reachable(g, distinct, cap)
    M = tuple(_solve(idx_m, Target.propagation(range(k)), float_path) for k in range(1, n + 1))
    y0 = _solve(idx_m, Target.fully_informed(0), float_path)

    idx_a = enumerate_reachable(g, Scenario.duplicated_first(), cap)
    A = tuple(_solve(idx_a, Target.propagation(range(k - 1)), float_path) for k in range(2, n + 1))
    return ExactTable(n=n, M=M, A=A, Y0=y0)


def reversal_gap(g: Graph, x: int, horizon: int) -> mpq:
    """Largest CDF difference between tau_x and Y_x up to ``horizon``.

    Under the all-distinct scenario tau_x is "every site holds information x"
    and Y_x is "site x holds every information". The two are equal in law, so
    the gap is exactly zero on every graph.

    Raises:
        InvalidSizeError: If x is not a site of g
        OracleCapExceededError: If the state space is too large
    """
    validate_range(x, 0, g.n - 1, "site x")
    distinct = Scenario.distinct_all()
    idx = enumerate_reachable(g, distinct)
    tau = hitting_time_cdf(g, distinct, Target.propagation([x]), horizon, index=idx)
    y = hitting_time_cdf(g, distinct, Target.fully_informed(x), horizon, index=idx)
    return max(abs(a - b) for a, b in zip(tau, y))
