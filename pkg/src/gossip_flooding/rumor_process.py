"""Discrete-time multi-information rumor process.

At every step one edge is chosen uniformly at random and its two endpoints
both end up holding the union of what they knew. Starting from an initial
scenario the engine advances until every requested stopping time has been
observed:

- tau_H: first step at which every site holds every information in H
- tau_V: tau_H for the full information set (total propagation time)
- Y_x:   first step at which site x holds every information
- N(t):  number of fully informed sites after step t (optional trajectory)

Information sets are stored as rows of 64-bit words (one bit per
information), so a union is a word-wise OR. The inner loop is compiled with
numba; edge indices come from a numpy PCG64 generator through
``Generator.integers``, which samples bounded integers without bias.
Stopping times are detected incrementally: only the two touched endpoints
are re-examined after each step.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numba import njit

from .common.config import DEFAULT_STEP_CAP, DRAW_CHUNK
from .common.errors import DisconnectedGraphError, ScenarioError, StepCapExceededError, StopSpecError
from .graphs import Graph, is_connected

WORD_BITS = 64


def word_count(m: int) -> int:
    return max(1, (m + WORD_BITS - 1) // WORD_BITS)


def info_mask(infos: Sequence[int], words: int) -> np.ndarray:
    """Return the uint64 word array with the bits of ``infos`` set."""
    mask = np.zeros(words, dtype=np.uint64)
    for j in infos:
        mask[j // WORD_BITS] |= np.uint64(1) << np.uint64(j % WORD_BITS)
    return mask


def mask_to_set(row: np.ndarray) -> frozenset:
    """Decode one uint64 word row back into a set of information indices."""
    infos = []
    for w, word in enumerate(row):
        word = int(word)
        while word:
            low = word & -word
            infos.append(w * WORD_BITS + low.bit_length() - 1)
            word ^= low
    return frozenset(infos)


@dataclass(frozen=True)
class Scenario:
    """Initial placement of informations on the sites.

    Use the constructors rather than the raw fields:

    - ``Scenario.distinct_all()``: site x knows exactly information x (m = n)
    - ``Scenario.duplicated_first()``: sites 0 and 1 know information 0 and
      site x >= 2 knows information x-1 (m = n-1, needs n >= 3)
    - ``Scenario.custom(sets)``: explicit per-site sets whose union must be
      exactly {0, ..., m-1}
    """

    kind: str
    sets: Optional[tuple] = None

    @classmethod
    def distinct_all(cls) -> "Scenario":
        return cls("distinct")

    @classmethod
    def duplicated_first(cls) -> "Scenario":
        return cls("duplicated")

    @classmethod
    def custom(cls, sets: Sequence[Sequence[int]]) -> "Scenario":
        frozen = tuple(frozenset(int(j) for j in s) for s in sets)
        union = frozenset().union(*frozen) if frozen else frozenset()
        if not union:
            raise ScenarioError("custom scenario holds no information at all")
        if min(union) < 0 or union != frozenset(range(max(union) + 1)):
            raise ScenarioError("custom scenario informations must be exactly 0..m-1")
        return cls("custom", frozen)

    @classmethod
    def from_name(cls, name: str) -> "Scenario":
        if name == "distinct":
            return cls.distinct_all()
        if name in ("duplicated", "dup"):
            return cls.duplicated_first()
        raise ScenarioError(f"unknown scenario {name!r} (expected 'distinct' or 'duplicated')")

    @property
    def name(self) -> str:
        return self.kind

    def info_count(self, n: int) -> int:
        """Total number of informations m for a graph with n sites."""
        if self.kind == "distinct":
            return n
        if self.kind == "duplicated":
            return n - 1
        return max(frozenset().union(*self.sets)) + 1

    def initial_sets(self, n: int) -> list:
        """Per-site initial information sets, validated against n."""
        if self.kind == "distinct":
            return [frozenset([x]) for x in range(n)]
        if self.kind == "duplicated":
            if n < 3:
                raise ScenarioError(f"duplicated-first scenario needs n >= 3, got n = {n}")
            return [frozenset([0])] + [frozenset([x - 1]) for x in range(1, n)]
        if len(self.sets) != n:
            raise ScenarioError(f"custom scenario lists {len(self.sets)} sites but the graph has {n}")
        return list(self.sets)


@dataclass
class InfoState:
    """Full process configuration: per-site information words plus the step counter.

    Attributes:
        sets: (n, words) uint64 array; row x is the bitset i_x(t)
        t: Number of steps taken so far
        m: Total number of informations
    """

    sets: np.ndarray
    t: int
    m: int

    @property
    def n(self) -> int:
        return self.sets.shape[0]

    @property
    def full_mask(self) -> np.ndarray:
        return info_mask(range(self.m), self.sets.shape[1])

    def site_set(self, x: int) -> frozenset:
        return mask_to_set(self.sets[x])

    def as_sets(self) -> list:
        return [self.site_set(x) for x in range(self.n)]

    def union(self) -> frozenset:
        return mask_to_set(np.bitwise_or.reduce(self.sets, axis=0))

    def copy(self) -> "InfoState":
        return InfoState(self.sets.copy(), self.t, self.m)


@dataclass(frozen=True)
class Target:
    """A stopping predicate "every site in ``sites`` holds every information in ``infos``".

    ``infos=None`` means the full information set and ``sites=None`` means
    every site. tau_H is ``Target(H)``, tau_V is ``Target.total()`` and Y_x is
    ``Target.fully_informed(x)``.
    """

    infos: Optional[frozenset] = None
    sites: Optional[frozenset] = None

    @classmethod
    def propagation(cls, infos: Sequence[int]) -> "Target":
        return cls(frozenset(int(j) for j in infos), None)

    @classmethod
    def total(cls) -> "Target":
        return cls(None, None)

    @classmethod
    def fully_informed(cls, site: int) -> "Target":
        return cls(None, frozenset([int(site)]))

    def resolve(self, n: int, m: int) -> tuple:
        """Return (info indices, site indices) with the None defaults expanded."""
        infos = sorted(self.infos) if self.infos is not None else list(range(m))
        sites = sorted(self.sites) if self.sites is not None else list(range(n))
        return infos, sites

    @property
    def label(self) -> str:
        if self.infos is None and self.sites is None:
            return "tau_V"
        if self.infos is None and self.sites is not None and len(self.sites) == 1:
            return f"Y[{next(iter(self.sites))}]"
        infos = "all" if self.infos is None else ",".join(str(j) for j in sorted(self.infos))
        if self.sites is None:
            return f"tau_H[{infos}]"
        return f"hold[{infos}]@[{','.join(str(x) for x in sorted(self.sites))}]"


@dataclass(frozen=True)
class StopSpec:
    """What a run should observe before it stops.

    Attributes:
        targets: Information subsets H whose tau_H is wanted
        want_total: Observe tau_V
        y_sites: Sites x whose Y_x is wanted
        record_N: Keep the N(t) trajectory
        step_cap: Maximum number of steps before the run is abandoned
    """

    targets: tuple = ()
    want_total: bool = False
    y_sites: tuple = ()
    record_N: bool = False
    step_cap: int = DEFAULT_STEP_CAP

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(frozenset(int(j) for j in h) for h in self.targets))
        object.__setattr__(self, "y_sites", tuple(int(x) for x in self.y_sites))

    def validate(self, n: int, m: int) -> None:
        """Check every target and site against the graph and scenario sizes.

        Raises:
            StopSpecError: On an empty or out-of-range target, an out-of-range
                           site, a non-positive cap, or nothing to observe
        """
        for h in self.targets:
            if not h:
                raise StopSpecError("target information sets must be nonempty")
            if min(h) < 0 or max(h) >= m:
                raise StopSpecError(f"target {sorted(h)} is outside [0, {m})")
        for x in self.y_sites:
            if not 0 <= x < n:
                raise StopSpecError(f"site {x} is outside [0, {n})")
        if self.step_cap < 1:
            raise StopSpecError("step_cap must be positive")
        if not (self.targets or self.want_total or self.y_sites or self.record_N):
            raise StopSpecError("stop spec requests nothing to observe")

    def requested(self) -> list:
        """The requested stopping predicates in report order."""
        wanted = [Target(h, None) for h in self.targets]
        if self.want_total:
            wanted.append(Target.total())
        wanted.extend(Target.fully_informed(x) for x in self.y_sites)
        return wanted


@dataclass
class RunRecord:
    """Observed stopping times of one replication.

    Attributes:
        tau_H: Hitting step per requested information subset
        tau_V: Total propagation step, if requested
        Y: First fully informed step per requested site
        N_trajectory: N(t) for t = 0..steps_taken, if requested
        steps_taken: Steps executed before the run stopped
        seed: Seed the replication was run with
    """

    tau_H: dict = field(default_factory=dict)
    tau_V: Optional[int] = None
    Y: dict = field(default_factory=dict)
    N_trajectory: Optional[np.ndarray] = None
    steps_taken: int = 0
    seed: Optional[int] = None

    def times(self) -> dict:
        """Every observed time keyed by its quantity label."""
        out = {Target(h, None).label: t for h, t in self.tau_H.items()}
        if self.tau_V is not None:
            out["tau_V"] = self.tau_V
        out.update({Target.fully_informed(x).label: t for x, t in self.Y.items()})
        return out


def init_state(g: Graph, s: Scenario) -> InfoState:
    """Build the t = 0 configuration of scenario ``s`` on graph ``g``.

    Raises:
        DisconnectedGraphError: If g is not connected
        ScenarioError: If the scenario does not fit g
    """
    if not is_connected(g):
        raise DisconnectedGraphError(f"{g.name} is not connected; propagation times would be infinite")
    initial = s.initial_sets(g.n)
    m = s.info_count(g.n)
    words = word_count(m)
    sets = np.zeros((g.n, words), dtype=np.uint64)
    for x, infos in enumerate(initial):
        sets[x] = info_mask(infos, words)
    return InfoState(sets=sets, t=0, m=m)


def step(state: InfoState, g: Graph, rng: np.random.Generator) -> InfoState:
    """Advance one step: pick a uniform edge and merge its endpoints.

    The input state is left untouched; a new state is returned.
    """
    e = int(rng.integers(0, g.edge_count))
    u, v = g.edges[e]
    nxt = state.copy()
    merged = nxt.sets[u] | nxt.sets[v]
    nxt.sets[u] = merged
    nxt.sets[v] = merged
    nxt.t += 1
    return nxt


def count_fully_informed(state: InfoState) -> int:
    """N(t): number of sites holding every information."""
    return int(np.all(state.sets == state.full_mask, axis=1).sum())


@njit(cache=True, nogil=True)
def _refresh_site(sets, site, t, tmask, tsite, need_count, needed, sat, counts, hit, remaining):
    words = sets.shape[1]
    for k in range(tmask.shape[0]):
        if not tsite[k, site] or sat[k, site]:
            continue
        ok = True
        for w in range(words):
            if (sets[site, w] & tmask[k, w]) != tmask[k, w]:
                ok = False
                break
        if ok:
            sat[k, site] = True
            counts[k] += 1
            if counts[k] == need_count[k] and hit[k] < 0:
                hit[k] = t
                if needed[k]:
                    remaining -= 1
    return remaining


@njit(cache=True, nogil=True)
def _advance(sets, eu, ev, draws, t0, tmask, tsite, need_count, needed, sat, counts, hit,
             remaining, full_idx, record_n, traj):
    words = sets.shape[1]
    consumed = 0
    for i in range(draws.shape[0]):
        if remaining == 0:
            break
        e = draws[i]
        u = eu[e]
        v = ev[e]
        changed_u = False
        changed_v = False
        for w in range(words):
            merged = sets[u, w] | sets[v, w]
            if merged != sets[u, w]:
                sets[u, w] = merged
                changed_u = True
            if merged != sets[v, w]:
                sets[v, w] = merged
                changed_v = True
        consumed += 1
        t = t0 + consumed
        if changed_u:
            remaining = _refresh_site(sets, u, t, tmask, tsite, need_count, needed, sat, counts, hit, remaining)
        if changed_v:
            remaining = _refresh_site(sets, v, t, tmask, tsite, need_count, needed, sat, counts, hit, remaining)
        if record_n:
            traj[i] = counts[full_idx]
    return consumed, remaining


class _Tracker:
    """Array bookkeeping for the incremental stopping-time detection.

    Target 0 is always "every site fully informed"; its satisfied-site count
    is N(t). Requested predicates follow in StopSpec.requested() order.
    Predicates hold from the first step t >= 0 at which they are true.
    """

    def __init__(self, state: InfoState, spec: StopSpec):
        n, words = state.sets.shape
        self.requested = spec.requested()
        predicates = [Target.total()] + self.requested
        self.index = list(range(1, len(predicates)))

        k = len(predicates)
        self.tmask = np.zeros((k, words), dtype=np.uint64)
        self.tsite = np.zeros((k, n), dtype=np.bool_)
        self.need_count = np.zeros(k, dtype=np.int64)
        self.needed = np.zeros(k, dtype=np.bool_)
        for i, target in enumerate(predicates):
            infos, sites = target.resolve(n, state.m)
            self.tmask[i] = info_mask(infos, words)
            self.tsite[i, sites] = True
            self.need_count[i] = len(sites)
        self.needed[1:] = True
        # A recorded trajectory always runs until N(t) = n
        self.needed[0] = spec.record_N

        self.sat = np.zeros((k, n), dtype=np.bool_)
        self.counts = np.zeros(k, dtype=np.int64)
        self.hit = np.full(k, -1, dtype=np.int64)
        for i in range(k):
            held = np.all((state.sets & self.tmask[i]) == self.tmask[i], axis=1) & self.tsite[i]
            self.sat[i] = held
            self.counts[i] = int(held.sum())
            if self.counts[i] == self.need_count[i]:
                self.hit[i] = state.t
        self.remaining = int(np.sum(self.needed & (self.hit < 0)))

    @property
    def fully_informed(self) -> int:
        return int(self.counts[0])

    def record(self, steps: int, seed: Optional[int], trajectory: Optional[np.ndarray]) -> RunRecord:
        rec = RunRecord(steps_taken=steps, seed=seed, N_trajectory=trajectory)
        for i, target in zip(self.index, self.requested):
            t = int(self.hit[i])
            if t < 0:
                continue
            if target.sites is not None:
                rec.Y[next(iter(target.sites))] = t
            elif target.infos is None:
                rec.tau_V = t
            else:
                rec.tau_H[target.infos] = t
        return rec


def run(g: Graph, s: Scenario, spec: StopSpec, seed: int) -> RunRecord:
    """Run one replication until every requested stopping time is observed.

    Args:
        g: Connected graph
        s: Initial scenario
        spec: Requested stopping times and step cap
        seed: Seed for the replication's PCG64 generator

    Returns:
        RunRecord with the exact first step of every requested predicate.
        Identical for identical arguments.

    Raises:
        DisconnectedGraphError: If g is not connected
        ScenarioError / StopSpecError: On invalid inputs
        StepCapExceededError: If step_cap steps pass first; the exception
                              carries the partial record and the seed
    """
    state = init_state(g, s)
    spec.validate(g.n, state.m)
    tracker = _Tracker(state, spec)
    rng = np.random.default_rng(seed)
    eu = np.ascontiguousarray(g.edge_array[:, 0])
    ev = np.ascontiguousarray(g.edge_array[:, 1])

    pieces = [np.array([tracker.fully_informed], dtype=np.int64)] if spec.record_N else []
    traj = np.zeros(DRAW_CHUNK, dtype=np.int64)

    while tracker.remaining > 0:
        if state.t >= spec.step_cap:
            trajectory = np.concatenate(pieces) if spec.record_N else None
            partial = tracker.record(state.t, seed, trajectory)
            raise StepCapExceededError(
                f"step cap {spec.step_cap} reached on {g.name} with seed {seed}", record=partial, seed=seed)
        # Always draw a full chunk so the stream does not depend on the cap
        draws = rng.integers(0, g.edge_count, size=DRAW_CHUNK, dtype=np.int64)
        draws = draws[: spec.step_cap - state.t]
        consumed, remaining = _advance(
            state.sets, eu, ev, draws, state.t, tracker.tmask, tracker.tsite, tracker.need_count,
            tracker.needed, tracker.sat, tracker.counts, tracker.hit, tracker.remaining, 0,
            spec.record_N, traj)
        state.t += int(consumed)
        tracker.remaining = int(remaining)
        if spec.record_N:
            pieces.append(traj[:consumed].copy())

    trajectory = np.concatenate(pieces) if spec.record_N else None
    return tracker.record(state.t, seed, trajectory)
