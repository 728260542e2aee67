"""Exact desk-scale verification: enumerated distributions, transition
matrices with orbit averaging, total-variation curves, mixing times,
detailed balance, and a coupling simulator for adjacent state pairs.

Everything here is exact or exhaustive by design and guarded by size caps;
it exists to let tests and experiments compare sampled behavior against
ground truth on small models.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from random import Random
from typing import Optional, Sequence

import numpy as np

from .chains import ChainKind, ChainTrace, ClauseModel, IndependentSetModel
from .clauses import WeightedClauseSet, weight_value
from .errors import GuardExceededError, InfeasibleModelError, enumeration_cap
from .graphs import Graph
from .perm import Config, PermutationGroup

STATE_SPACE_VERTEX_LIMIT = 24


class ExactDistribution:
    """A fully enumerated distribution over configurations."""

    def __init__(self, states: Sequence[Config], probs, partition_value: float):
        self.states = tuple(states)
        self.probs = np.asarray(probs, dtype=float)
        self.partition_value = float(partition_value)
        if len(self.states) != len(self.probs):
            raise ValueError("states and probabilities differ in length")
        if np.any(self.probs < -1e-15):
            raise ValueError("negative probability")
        if abs(self.probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {self.probs.sum()}, not 1")
        self._index = {s: i for i, s in enumerate(self.states)}

    def index_of(self, state: Config) -> int:
        try:
            return self._index[tuple(state)]
        except KeyError:
            raise KeyError(f"state {state} not in the enumerated universe") from None

    def prob_of(self, state: Config) -> float:
        return float(self.probs[self.index_of(state)])

    def marginal(self, var: int) -> float:
        return float(sum(p for s, p in zip(self.states, self.probs) if s[var]))

    def __len__(self) -> int:
        return len(self.states)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["state", "prob"])
            for s, p in zip(self.states, self.probs):
                writer.writerow(["".join(map(str, s)), repr(float(p))])


def enumerate_independent_sets(graph: Graph,
                               cap: Optional[int] = None) -> list[Config]:
    """All independent sets as bit tuples, in lexicographic order."""
    if graph.n > STATE_SPACE_VERTEX_LIMIT:
        raise GuardExceededError(
            f"independent-set enumeration limited to {STATE_SPACE_VERTEX_LIMIT} "
            f"vertices, got {graph.n}")
    cap = cap if cap is not None else enumeration_cap()
    out: list[tuple[int, ...]] = []

    def grow(members: list[int], candidates: list[int]) -> None:
        if len(out) >= cap:
            raise GuardExceededError(
                f"more than {cap} independent sets (cap exceeded)")
        bits = [0] * graph.n
        for v in members:
            bits[v] = 1
        out.append(tuple(bits))
        for i, v in enumerate(candidates):
            blocked = set(graph.adj[v])
            grow(members + [v], [w for w in candidates[i + 1:] if w not in blocked])

    grow([], list(range(graph.n)))
    out.sort()
    return out


def exact_pi_lambda(graph: Graph, lam: float,
                    cap: Optional[int] = None) -> ExactDistribution:
    """Normalized fugacity-weighted distribution over independent sets."""
    if lam <= 0:
        raise ValueError(f"fugacity must be positive, got {lam}")
    states = enumerate_independent_sets(graph, cap)
    weights = np.array([lam ** sum(s) for s in states], dtype=float)
    z = weights.sum()
    return ExactDistribution(states, weights / z, z)


def enumerate_clause_states(model: WeightedClauseSet,
                            cap: Optional[int] = None) -> list[Config]:
    """All assignments satisfying every hard clause, in lexicographic order."""
    cap = cap if cap is not None else enumeration_cap()
    if 2 ** model.n > cap:
        raise GuardExceededError(
            f"2^{model.n} assignments exceed enumeration cap {cap}")
    hard = [c for c in model.clauses if c.is_hard]
    states = []
    for k in range(2 ** model.n):
        bits = tuple((k >> (model.n - 1 - i)) & 1 for i in range(model.n))
        if all(c.satisfied_by(bits) for c in hard):
            states.append(bits)
    return states


def exact_pi_clauses(model: WeightedClauseSet,
                     cap: Optional[int] = None) -> ExactDistribution:
    """Distribution proportional to exp(total weight of satisfied soft clauses)."""
    states = enumerate_clause_states(model, cap)
    if not states:
        raise InfeasibleModelError("no assignment satisfies every hard clause")
    soft = [(c, weight_value(c.weight)) for c in model.clauses if not c.is_hard]
    scores = np.array([sum(w for c, w in soft if c.satisfied_by(s))
                       for s in states])
    weights = np.exp(scores)
    z = weights.sum()
    return ExactDistribution(states, weights / z, z)


@dataclass(frozen=True)
class TransitionMatrix:
    states: tuple[Config, ...]
    rows: np.ndarray

    def __post_init__(self):
        rows = self.rows
        if rows.shape != (len(self.states), len(self.states)):
            raise ValueError("matrix shape does not match state count")
        if np.any(rows < -1e-15):
            raise ValueError("negative transition probability")
        bad = np.abs(rows.sum(axis=1) - 1.0) > 1e-12
        if bad.any():
            raise ValueError(f"row {int(np.argmax(bad))} does not sum to 1")

    def index_of(self, state: Config) -> int:
        return self.states.index(tuple(state))

    def to_csv(self, path) -> None:
        labels = ["".join(map(str, s)) for s in self.states]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["state"] + labels)
            for label, row in zip(labels, self.rows):
                writer.writerow([label] + [repr(float(x)) for x in row])


def _state_orbit_ids(states: Sequence[Config],
                     group: PermutationGroup) -> list[int]:
    """Orbit id per state; orbits must stay inside the state list."""
    index = {s: i for i, s in enumerate(states)}
    ids = [-1] * len(states)
    next_id = 0
    for i, s in enumerate(states):
        if ids[i] >= 0:
            continue
        frontier = [s]
        ids[i] = next_id
        while frontier:
            c = frontier.pop()
            for g in group.generators:
                d = g.apply_config(c)
                j = index.get(d)
                if j is None:
                    raise ValueError(
                        "group does not preserve the state space: "
                        f"{c} maps outside it")
                if ids[j] < 0:
                    ids[j] = next_id
                    frontier.append(d)
        next_id += 1
    return ids


def orbit_average_matrix(states: Sequence[Config],
                         group: PermutationGroup) -> np.ndarray:
    """Row-stochastic matrix spreading each state uniformly over its orbit."""
    ids = _state_orbit_ids(states, group)
    sizes: dict[int, int] = {}
    for oid in ids:
        sizes[oid] = sizes.get(oid, 0) + 1
    avg = np.zeros((len(states), len(states)))
    for i, oid_i in enumerate(ids):
        share = 1.0 / sizes[oid_i]
        for j, oid_j in enumerate(ids):
            if oid_i == oid_j:
                avg[i, j] = share
    return avg


def _base_insert_delete_matrix(model: IndependentSetModel,
                               states: Sequence[Config]) -> np.ndarray:
    index = {s: i for i, s in enumerate(states)}
    n = model.n
    lam = model.lam
    p_del = 1.0 / (n * (1.0 + lam))
    p_ins = lam / (n * (1.0 + lam))
    rows = np.zeros((len(states), len(states)))
    for i, s in enumerate(states):
        for v in range(n):
            if s[v]:
                j = index[s[:v] + (0,) + s[v + 1:]]
                rows[i, j] += p_del
                rows[i, i] += 1.0 / n - p_del
            elif not any(s[w] for w in model.graph.adj[v]):
                j = index[s[:v] + (1,) + s[v + 1:]]
                rows[i, j] += p_ins
                rows[i, i] += 1.0 / n - p_ins
            else:
                rows[i, i] += 1.0 / n
    return rows


def _base_gibbs_matrix(model: ClauseModel,
                       states: Sequence[Config]) -> np.ndarray:
    index = {s: i for i, s in enumerate(states)}
    n = model.n
    rows = np.zeros((len(states), len(states)))
    for i, s in enumerate(states):
        for v in range(n):
            p1 = model.conditional_p1(s, v)
            for value, p in ((1, p1), (0, 1.0 - p1)):
                if p == 0.0:
                    continue
                rows[i, index[s[:v] + (value,) + s[v + 1:]]] += p / n
    return rows


def transition_matrix(model, kind: ChainKind,
                      group: Optional[PermutationGroup] = None,
                      cap: Optional[int] = None) -> TransitionMatrix:
    """Exact transition matrix of a chain kind on an enumerated state space.

    Base kernels integrate over the step's random choices exhaustively;
    orbital kernels multiply the base kernel by the exact orbit-averaging
    matrix of the group action on the state list.
    """
    kind = ChainKind(kind)
    if kind.base is ChainKind.INSERT_DELETE:
        if not isinstance(model, IndependentSetModel):
            raise TypeError("insert/delete kernels need an IndependentSetModel")
        states = tuple(enumerate_independent_sets(model.graph, cap))
        base = _base_insert_delete_matrix(model, states)
    else:
        if not isinstance(model, ClauseModel):
            raise TypeError("Gibbs kernels need a ClauseModel")
        states = tuple(enumerate_clause_states(model.clause_set, cap))
        base = _base_gibbs_matrix(model, states)
    if kind.is_orbital:
        if group is None:
            raise ValueError(f"kernel {kind.value} requires a symmetry group")
        base = base @ orbit_average_matrix(states, group)
    return TransitionMatrix(states, base)


@dataclass(frozen=True)
class DetailedBalanceReport:
    max_violation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tolerance


def check_detailed_balance(matrix: TransitionMatrix, dist: ExactDistribution,
                           tol: float = 1e-12) -> DetailedBalanceReport:
    """Largest |pi(x)P(x,y) - pi(y)P(y,x)| over all state pairs."""
    if matrix.states != dist.states:
        raise ValueError("matrix and distribution enumerate different states")
    flow = dist.probs[:, None] * matrix.rows
    violation = float(np.abs(flow - flow.T).max())
    return DetailedBalanceReport(violation, tol)


def stationary_deviation(matrix: TransitionMatrix,
                         dist: ExactDistribution) -> float:
    """Max-norm of pi P - pi."""
    if matrix.states != dist.states:
        raise ValueError("matrix and distribution enumerate different states")
    return float(np.abs(dist.probs @ matrix.rows - dist.probs).max())


def pi_orbit_deviation(dist: ExactDistribution,
                       group: PermutationGroup) -> float:
    """Max |pi(x) - pi(x^g)| over enumerated states and generators."""
    worst = 0.0
    for s, p in zip(dist.states, dist.probs):
        for g in group.generators:
            worst = max(worst, abs(p - dist.prob_of(g.apply_config(s))))
    return worst


def has_positive_diagonal(matrix: TransitionMatrix) -> bool:
    return bool((np.diag(matrix.rows) > 0).all())


def is_connected(matrix: TransitionMatrix, tol: float = 0.0) -> bool:
    """Strong connectivity of the positive-transition graph."""
    support = matrix.rows > tol
    n = len(matrix.states)

    def covers(step) -> bool:
        seen = {0}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for y in np.nonzero(step[x])[0]:
                if int(y) not in seen:
                    seen.add(int(y))
                    frontier.append(int(y))
        return len(seen) == n

    return covers(support) and covers(support.T)


def empirical_distribution(samples: Sequence[Config],
                           universe: ExactDistribution) -> ExactDistribution:
    """Frequency distribution of samples over an enumerated universe."""
    if not samples:
        raise ValueError("no samples")
    counts = np.zeros(len(universe.states))
    for s in samples:
        counts[universe.index_of(s)] += 1
    return ExactDistribution(universe.states, counts / len(samples), len(samples))


def tv_distance(p: ExactDistribution, q: ExactDistribution) -> float:
    """Half the L1 distance between two distributions on the same universe."""
    if p.states != q.states:
        raise ValueError("distributions enumerate different states")
    return float(0.5 * np.abs(p.probs - q.probs).sum())


@dataclass
class TVSeries:
    """Total-variation distance of the cumulative empirical distribution."""

    points: list  # (samples used, d_tv)
    chain_kind: Optional[ChainKind] = None
    seed: Optional[int] = None

    def auc(self) -> float:
        xs = [s for s, _ in self.points]
        ys = [d for _, d in self.points]
        return float(np.trapezoid(ys, xs))

    def write_rows(self, writer) -> None:
        kind = self.chain_kind.value if self.chain_kind else ""
        seed = self.seed if self.seed is not None else ""
        for samples, dtv in self.points:
            writer.writerow([samples, repr(float(dtv)), kind, seed])


def tv_curve_csv(path, series: Sequence[TVSeries]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["samples", "d_tv", "chain_kind", "seed"])
        for s in series:
            s.write_rows(writer)


def tv_curve(trace: ChainTrace, exact: ExactDistribution,
             checkpoints: Sequence[int]) -> TVSeries:
    """TV distance to the target at growing prefixes of the recorded samples.

    The empirical distribution at checkpoint c uses the first c recorded
    states, initial state included and no burn-in discarded.
    """
    checkpoints = sorted(set(int(c) for c in checkpoints))
    if not checkpoints or checkpoints[0] < 1:
        raise ValueError("checkpoints must be positive sample counts")
    if checkpoints[-1] > len(trace.states):
        raise ValueError(
            f"checkpoint {checkpoints[-1]} exceeds {len(trace.states)} samples")
    counts = np.zeros(len(exact.states))
    points = []
    upcoming = iter(checkpoints)
    target = next(upcoming)
    for used, state in enumerate(trace.states, start=1):
        counts[exact.index_of(state)] += 1
        if used == target:
            dtv = float(0.5 * np.abs(counts / used - exact.probs).sum())
            points.append((used, dtv))
            target = next(upcoming, None)
            if target is None:
                break
    return TVSeries(points, chain_kind=trace.chain_kind, seed=trace.seed)


def mixing_time(matrix: TransitionMatrix, dist: ExactDistribution,
                eps: float, horizon: int = 1_000_000) -> int:
    """Least t with max_x d_tv(P^t(x, .), pi) <= eps.

    Uses repeated squaring with row renormalization; verifies the distance
    stays below eps at doubling points after the crossing.
    """
    if not (0 < eps < 1):
        raise ValueError("eps must be in (0, 1)")
    if matrix.states != dist.states:
        raise ValueError("matrix and distribution enumerate different states")
    if not is_connected(matrix):
        raise ValueError("chain is not irreducible")
    if not (np.diag(matrix.rows) > 0).any():
        raise ValueError("cannot verify aperiodicity: no positive diagonal")

    pi = dist.probs
    powers = {1: matrix.rows}

    def power(t: int) -> np.ndarray:
        # binary decomposition over cached squarings
        result = None
        bit = 1
        while bit <= t:
            if bit not in powers:
                half = power(bit // 2)
                prod = half @ half
                prod /= prod.sum(axis=1, keepdims=True)
                powers[bit] = prod
            if t & bit:
                result = powers[bit] if result is None else result @ powers[bit]
            bit <<= 1
        return result / result.sum(axis=1, keepdims=True)

    def distance(t: int) -> float:
        return float(0.5 * np.abs(power(t) - pi).sum(axis=1).max())

    hi = 1
    while distance(hi) > eps:
        hi *= 2
        if hi > horizon:
            raise GuardExceededError(
                f"no crossing below eps={eps} within horizon {horizon}; "
                f"last distance {distance(horizon)}")
    lo = hi // 2  # distance(lo) > eps when lo >= 1
    while hi - lo > 1 and lo > 0:
        mid = (lo + hi) // 2
        if distance(mid) <= eps:
            hi = mid
        else:
            lo = mid
    tau = hi
    check = 2 * tau
    while check <= min(horizon, 8 * tau):
        if distance(check) > eps + 1e-12:
            raise AssertionError(
                f"distance rose above eps after crossing at t={check}")
        check *= 2
    return tau


@dataclass
class CouplingReport:
    pairs_examined: int
    case_counts: dict
    rho: float
    varrho: float
    expected_drift: float
    drift_se: float
    bound: float
    beta: float
    diameter: int
    alpha: float

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["case", "count", "rho", "varrho", "drift", "bound"])
            for case in sorted(self.case_counts):
                writer.writerow([case, self.case_counts[case],
                                 repr(self.rho), repr(self.varrho),
                                 repr(self.expected_drift), repr(self.bound)])


class CouplingSimulator:
    """Coupled one-step evolution of two independent sets at distance one.

    The two chains share the vertex choice and acceptance coin and apply a
    common uniformly drawn group element, so each side marginally follows
    the orbit-resampled insert/delete kernel.  When only the lower state
    can accept the chosen insertion and the upper state already lies in
    the inserted state's orbit, both sides move to one uniform sample of
    that shared orbit and the pair coalesces.
    """

    def __init__(self, model: IndependentSetModel, group: PermutationGroup,
                 cap: Optional[int] = None):
        self.model = model
        self.group = group
        self.elements = group.elements(cap)

    def _transporter_exists(self, src: Config, dst: Config) -> bool:
        # literal filter over the enumerated group, desk scale by design
        return any(g.apply_config(src) == dst for g in self.elements)

    def step(self, upper: Config, lower: Config,
             rng: Random) -> tuple[Config, Config, int]:
        graph = self.model.graph
        if not graph.is_independent(upper) or not graph.is_independent(lower):
            raise ValueError("coupled states must be independent sets")
        diff = [v for v in range(graph.n) if upper[v] != lower[v]]
        if len(diff) != 1 or not upper[diff[0]]:
            raise ValueError(
                "states must differ at exactly one vertex present in the first")
        v = diff[0]
        lam = self.model.lam
        p_ins = lam / (1.0 + lam)
        w = rng.randrange(graph.n)
        els = self.elements

        def orbit_map(c: Config, g) -> Config:
            return g.apply_config(c)

        if w == v:
            keep = rng.random() < p_ins
            g = els[rng.randrange(len(els))]
            u = orbit_map(upper if keep else lower, g)
            return u, u, 1
        if upper[w]:
            delete = rng.random() < 1.0 / (1.0 + lam)
            g = els[rng.randrange(len(els))]
            if delete:
                return (orbit_map(upper[:w] + (0,) + upper[w + 1:], g),
                        orbit_map(lower[:w] + (0,) + lower[w + 1:], g), 2)
            return orbit_map(upper, g), orbit_map(lower, g), 2
        blocked_upper = any(upper[x] for x in graph.adj[w])
        if not blocked_upper:
            insert = rng.random() < p_ins
            g = els[rng.randrange(len(els))]
            if insert:
                return (orbit_map(upper[:w] + (1,) + upper[w + 1:], g),
                        orbit_map(lower[:w] + (1,) + lower[w + 1:], g), 3)
            return orbit_map(upper, g), orbit_map(lower, g), 3
        blocked_lower = any(lower[x] for x in graph.adj[w])
        if not blocked_lower:
            insert = rng.random() < p_ins
            g = els[rng.randrange(len(els))]
            if not insert:
                return orbit_map(upper, g), orbit_map(lower, g), 4
            inserted = lower[:w] + (1,) + lower[w + 1:]
            if self._transporter_exists(upper, inserted):
                u = orbit_map(upper, g)
                return u, u, 4
            return orbit_map(upper, g), orbit_map(inserted, g), 4
        g = els[rng.randrange(len(els))]
        return orbit_map(upper, g), orbit_map(lower, g), 5


def coupling_step(upper: Config, lower: Config, model: IndependentSetModel,
                  group: PermutationGroup, rng: Random,
                  cap: Optional[int] = None) -> tuple[Config, Config, int]:
    """One-shot coupled step; loops should hold a CouplingSimulator."""
    return CouplingSimulator(model, group, cap).step(upper, lower, rng)


def distance_one_pairs(graph: Graph,
                       cap: Optional[int] = None) -> list[tuple[Config, Config]]:
    """All ordered pairs (X, X minus one vertex) of independent sets."""
    pairs = []
    for s in enumerate_independent_sets(graph, cap):
        for v in range(graph.n):
            if s[v]:
                pairs.append((s, s[:v] + (0,) + s[v + 1:]))
    return pairs


def exact_rho(graph: Graph, group: PermutationGroup,
              cap: Optional[int] = None) -> float:
    """Fraction of adjacent-extension triples landing in different orbits.

    Enumerates every (X, v, w) with {v, w} an edge and both X + v and
    X + w independent, and reports how often the two extended sets are
    not in one orbit of the group.
    """
    states = enumerate_independent_sets(graph, cap)
    ids = _state_orbit_ids(states, group)
    orbit_of = {s: ids[i] for i, s in enumerate(states)}
    total = 0
    apart = 0
    for s in states:
        for u, w in graph.edges:
            for v, other in ((u, w), (w, u)):
                if s[v] or s[other]:
                    continue
                with_v = s[:v] + (1,) + s[v + 1:]
                if not graph.is_independent(with_v):
                    continue
                with_other = s[:other] + (1,) + s[other + 1:]
                if not graph.is_independent(with_other):
                    continue
                total += 1
                if orbit_of[with_v] != orbit_of[with_other]:
                    apart += 1
    if total == 0:
        raise ValueError("no valid adjacent extensions; graph has no edges?")
    return apart / total


def exact_varrho(graph: Graph, cap: Optional[int] = None) -> float:
    """Probability that a uniform vertex choice from a uniform distance-one
    pair can only be inserted into the smaller set."""
    pairs = distance_one_pairs(graph, cap)
    hits = 0
    for upper, lower in pairs:
        v = next(i for i in range(graph.n) if upper[i] != lower[i])
        for w in range(graph.n):
            if w == v or upper[w]:
                continue
            in_upper = any(upper[x] for x in graph.adj[w])
            in_lower = any(lower[x] for x in graph.adj[w])
            if in_upper and not in_lower:
                hits += 1
    return hits / (len(pairs) * graph.n)


def coupling_drift(model: IndependentSetModel, group: PermutationGroup,
                   trials: int, seed: int = 0,
                   cap: Optional[int] = None) -> CouplingReport:
    """Monte Carlo drift of the coupled chains against the exact bound."""
    if trials < 1:
        raise ValueError("need at least one trial")
    graph = model.graph
    pairs = distance_one_pairs(graph, cap)
    if not pairs:
        raise ValueError("graph admits no distance-one pairs")
    sim = CouplingSimulator(model, group, cap)
    rng = Random(seed)
    rho = exact_rho(graph, group, cap)
    varrho = exact_varrho(graph, cap)

    counts = {k: 0 for k in range(1, 6)}
    drift_sum = 0.0
    drift_sq = 0.0
    changed = 0
    for _ in range(trials):
        upper, lower = pairs[rng.randrange(len(pairs))]
        new_upper, new_lower, case = sim.step(upper, lower, rng)
        counts[case] += 1
        h = sum(a != b for a, b in zip(new_upper, new_lower))
        d = h - 1
        drift_sum += d
        drift_sq += d * d
        if h != 1:
            changed += 1
    mean = drift_sum / trials
    var = max(drift_sq / trials - mean * mean, 0.0)
    se = math.sqrt(var / trials)
    lam = model.lam
    bound = -1.0 / graph.n + varrho * (2 * rho - 1) * lam / (1 + lam)
    return CouplingReport(
        pairs_examined=trials,
        case_counts=counts,
        rho=rho,
        varrho=varrho,
        expected_drift=mean,
        drift_se=se,
        bound=bound,
        beta=1.0 + bound,
        diameter=graph.n,
        alpha=changed / trials,
    )
