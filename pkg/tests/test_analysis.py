"""Exact enumeration, transition matrices, TV curves, mixing and coupling."""

import itertools
import math
from random import Random

import numpy as np
import pytest

from orbitalmcmc.analysis import (
    CouplingSimulator,
    ExactDistribution,
    TransitionMatrix,
    check_detailed_balance,
    coupling_drift,
    coupling_step,
    distance_one_pairs,
    empirical_distribution,
    enumerate_independent_sets,
    exact_pi_clauses,
    exact_pi_lambda,
    exact_rho,
    exact_varrho,
    has_positive_diagonal,
    is_connected,
    mixing_time,
    pi_orbit_deviation,
    stationary_deviation,
    transition_matrix,
    tv_curve,
    tv_distance,
)
from orbitalmcmc.autgroup import automorphism_generators
from orbitalmcmc.chains import ChainKind, ClauseModel, IndependentSetModel, run_chain
from orbitalmcmc.errors import GuardExceededError
from orbitalmcmc.families import gen_complete, gen_connected_cliques, gen_grid
from orbitalmcmc.graphs import Graph
from orbitalmcmc.perm import PermutationGroup, SamplerMode, parse_cycles

from helpers import two_spin_model

NAMES9 = list("abcdefghi")


def grid3_group() -> PermutationGroup:
    return PermutationGroup([parse_cycles("(a c)(d f)(g i)", names=NAMES9),
                             parse_cycles("(a i)(b f)(d h)", names=NAMES9)])


def stationary_power_iteration(rows: np.ndarray, sweeps: int = 200_000,
                               tol: float = 1e-14) -> np.ndarray:
    pi = np.full(len(rows), 1.0 / len(rows))
    for _ in range(sweeps):
        nxt = pi @ rows
        if np.abs(nxt - pi).max() < tol:
            return nxt
        pi = nxt
    return pi


class TestEnumeration:
    def test_edgeless(self):
        graph = Graph(4, [])
        assert len(enumerate_independent_sets(graph)) == 16

    def test_complete_graph(self):
        sets = enumerate_independent_sets(gen_complete(3))
        assert len(sets) == 10
        assert all(sum(s) <= 1 for s in sets)

    def test_grid_against_subset_filter(self):
        graph = gen_grid(3)
        oracle = [bits for bits in itertools.product((0, 1), repeat=9)
                  if graph.is_independent(bits)]
        assert enumerate_independent_sets(graph) == sorted(oracle)

    def test_vertex_guard(self):
        with pytest.raises(GuardExceededError):
            enumerate_independent_sets(Graph(25, []))


class TestExactDistributions:
    def test_single_vertex(self):
        dist = exact_pi_lambda(Graph(1, []), 1.0)
        assert dist.probs == pytest.approx([0.5, 0.5])

    def test_complete_graph_lambda_one(self):
        dist = exact_pi_lambda(gen_complete(3), 1.0)
        assert dist.partition_value == pytest.approx(10.0)
        assert dist.probs == pytest.approx([0.1] * 10)

    def test_lambda_weighting(self):
        dist = exact_pi_lambda(Graph(1, []), 3.0)
        assert dist.prob_of((1,)) == pytest.approx(0.75)

    def test_two_spin_distribution(self):
        dist = exact_pi_clauses(two_spin_model())
        expected = {(0, 0): 0.01, (0, 1): 0.49, (1, 0): 0.49, (1, 1): 0.01}
        for state, p in expected.items():
            assert dist.prob_of(state) == pytest.approx(p, abs=1e-12)

    def test_orbit_constancy(self):
        dist = exact_pi_lambda(gen_grid(3), 1.0)
        assert pi_orbit_deviation(dist, grid3_group()) <= 1e-12


class TestTransitionMatrices:
    def test_trivial_group_orbital_equals_base(self):
        model = IndependentSetModel(gen_grid(3), 1.0)
        base = transition_matrix(model, ChainKind.INSERT_DELETE)
        orbital = transition_matrix(model, ChainKind.ORBITAL_INSERT_DELETE,
                                    group=PermutationGroup([], n=9))
        assert np.allclose(base.rows, orbital.rows, atol=0)

    def test_insert_delete_stationary_matches_pi(self):
        model = IndependentSetModel(gen_grid(3), 1.0)
        matrix = transition_matrix(model, ChainKind.INSERT_DELETE)
        pi = exact_pi_lambda(gen_grid(3), 1.0)
        assert stationary_deviation(matrix, pi) < 1e-14

    def test_orbital_stationary_by_power_iteration(self):
        model = IndependentSetModel(gen_grid(3), 1.0)
        matrix = transition_matrix(model, ChainKind.ORBITAL_INSERT_DELETE,
                                   group=grid3_group())
        pi = exact_pi_lambda(gen_grid(3), 1.0)
        left = stationary_power_iteration(matrix.rows)
        assert np.abs(left - pi.probs).max() < 1e-10

    def test_base_kernel_symmetry_compatibility(self):
        model = IndependentSetModel(gen_grid(3), 1.0)
        matrix = transition_matrix(model, ChainKind.INSERT_DELETE)
        index = {s: i for i, s in enumerate(matrix.states)}
        for g in grid3_group().generators:
            for i, x in enumerate(matrix.states):
                gi = index[g.apply_config(x)]
                for j, y in enumerate(matrix.states):
                    gj = index[g.apply_config(y)]
                    assert abs(matrix.rows[i, j] - matrix.rows[gi, gj]) <= 1e-12

    def test_detailed_balance_two_spin_orbital_gibbs(self):
        model = ClauseModel(two_spin_model())
        group = PermutationGroup([parse_cycles("(0 1)", n=2)])
        matrix = transition_matrix(model, ChainKind.ORBITAL_GIBBS, group=group)
        pi = exact_pi_clauses(two_spin_model())
        report = check_detailed_balance(matrix, pi, tol=1e-12)
        assert report.passed

    def test_detailed_balance_fails_for_wrong_pi(self):
        rows = np.array([[0.9, 0.1], [0.5, 0.5]])
        matrix = TransitionMatrix(((0,), (1,)), rows)
        wrong = ExactDistribution(((0,), (1,)), [0.5, 0.5], 1.0)
        assert not check_detailed_balance(matrix, wrong, tol=1e-12).passed

    def test_structure_flags(self):
        model = IndependentSetModel(gen_connected_cliques(3), 1.0)
        group = automorphism_generators(gen_connected_cliques(3).to_colored())
        for kind, g in ((ChainKind.INSERT_DELETE, None),
                        (ChainKind.ORBITAL_INSERT_DELETE, group)):
            matrix = transition_matrix(model, kind, group=g)
            assert has_positive_diagonal(matrix)
            assert is_connected(matrix)

    def test_orbital_kernels_leave_pi_stationary(self):
        for graph in (gen_grid(3), gen_connected_cliques(3)):
            group = automorphism_generators(graph.to_colored())
            model = IndependentSetModel(graph, 1.0)
            matrix = transition_matrix(model, ChainKind.ORBITAL_INSERT_DELETE,
                                       group=group)
            pi = exact_pi_lambda(graph, 1.0)
            assert stationary_deviation(matrix, pi) <= 1e-10


class TestTotalVariation:
    def test_identical_distributions(self):
        dist = exact_pi_lambda(gen_grid(3), 1.0)
        assert tv_distance(dist, dist) == 0.0

    def test_point_mass_vs_uniform(self):
        states = tuple((i,) for i in range(5))
        point = ExactDistribution(states, [1, 0, 0, 0, 0], 1.0)
        uniform = ExactDistribution(states, [0.2] * 5, 1.0)
        assert tv_distance(point, uniform) == pytest.approx(1 - 1 / 5)

    def test_empirical_distribution_counts(self):
        universe = exact_pi_lambda(Graph(1, []), 1.0)
        emp = empirical_distribution([(0,), (0,), (1,), (0,)], universe)
        assert emp.prob_of((0,)) == pytest.approx(0.75)

    def test_empirical_rejects_foreign_state(self):
        universe = exact_pi_lambda(Graph(2, [(0, 1)]), 1.0)
        with pytest.raises(KeyError):
            empirical_distribution([(1, 1)], universe)

    def test_sampled_orbital_chain_approaches_pi(self):
        graph = gen_complete(3)
        model = IndependentSetModel(graph, 1.0)
        group = automorphism_generators(graph.to_colored())
        pi = exact_pi_lambda(graph, 1.0)
        trace = run_chain(model, ChainKind.ORBITAL_INSERT_DELETE, 100_000,
                          seed=50, group=group,
                          mode=SamplerMode.PRODUCT_REPLACEMENT)
        emp = empirical_distribution(trace.states, pi)
        assert tv_distance(emp, pi) < 0.02

    def test_curve_is_cumulative(self):
        graph = gen_complete(3)
        model = IndependentSetModel(graph, 1.0)
        pi = exact_pi_lambda(graph, 1.0)
        trace = run_chain(model, ChainKind.INSERT_DELETE, 5000, seed=51)
        series = tv_curve(trace, pi, checkpoints=[1, 10, 100, 1000, 5001])
        assert [s for s, _ in series.points] == [1, 10, 100, 1000, 5001]
        assert all(0.0 <= d <= 1.0 for _, d in series.points)
        # the first checkpoint sees only the deterministic initial state
        assert series.points[0][1] == pytest.approx(1 - pi.prob_of((0,) * 9))
        assert series.points[-1][1] < series.points[0][1]
        assert series.auc() > 0


class TestMixingTime:
    def test_already_mixed(self):
        states = tuple((i,) for i in range(3))
        pi = np.array([0.2, 0.3, 0.5])
        matrix = TransitionMatrix(states, np.tile(pi, (3, 1)))
        dist = ExactDistribution(states, pi, 1.0)
        assert mixing_time(matrix, dist, 0.5) == 1
        assert mixing_time(matrix, dist, 0.01) == 1

    def test_complete_graph_bound(self):
        graph = gen_complete(3)
        model = IndependentSetModel(graph, 1.0)
        group = automorphism_generators(graph.to_colored())
        matrix = transition_matrix(model, ChainKind.ORBITAL_INSERT_DELETE,
                                   group=group)
        pi = exact_pi_lambda(graph, 1.0)
        tau = mixing_time(matrix, pi, 0.01)
        assert tau <= math.ceil(9 * math.log(9 / 0.01))

    def test_orbital_not_slower_on_grid(self):
        # deterministic matrices, so this instance-level observation is stable
        model = IndependentSetModel(gen_grid(3), 1.0)
        pi = exact_pi_lambda(gen_grid(3), 1.0)
        base = transition_matrix(model, ChainKind.INSERT_DELETE)
        orbital = transition_matrix(model, ChainKind.ORBITAL_INSERT_DELETE,
                                    group=grid3_group())
        tau_base = mixing_time(base, pi, 0.1)
        tau_orb = mixing_time(orbital, pi, 0.1)
        assert tau_orb <= tau_base

    def test_horizon_error(self):
        states = ((0,), (1,))
        rows = np.array([[1 - 1e-9, 1e-9], [1e-9, 1 - 1e-9]])
        matrix = TransitionMatrix(states, rows)
        dist = ExactDistribution(states, [0.5, 0.5], 1.0)
        with pytest.raises(GuardExceededError):
            mixing_time(matrix, dist, 0.01, horizon=64)


def hamming(a, b):
    return sum(x != y for x, y in zip(a, b))


class TestCoupling:
    def test_case_distance_contract(self):
        graph = gen_grid(3)
        model = IndependentSetModel(graph, 1.0)
        sim = CouplingSimulator(model, grid3_group())
        rng = Random(52)
        pairs = distance_one_pairs(graph)
        seen_cases = set()
        for _ in range(4000):
            upper, lower = pairs[rng.randrange(len(pairs))]
            nu, nl, case = sim.step(upper, lower, rng)
            seen_cases.add(case)
            h = hamming(nu, nl)
            if case == 1:
                assert h == 0
            elif case in (2, 3, 5):
                assert h == 1
            else:
                assert h in (0, 1, 2)
            assert graph.is_independent(nu) and graph.is_independent(nl)
        assert seen_cases == {1, 2, 3, 4, 5}

    def test_case4_coalesces_under_full_symmetry(self):
        # on a complete graph every blocked/free insertion shares an orbit
        graph = gen_complete(2)
        model = IndependentSetModel(graph, 1.0)
        group = automorphism_generators(graph.to_colored())
        sim = CouplingSimulator(model, group)
        rng = Random(53)
        upper = (1, 0, 0, 0)
        lower = (0, 0, 0, 0)
        for _ in range(500):
            nu, nl, case = sim.step(upper, lower, rng)
            if case == 4:
                assert hamming(nu, nl) in (0, 1)  # never drifts apart

    def test_case4_separates_without_symmetry(self):
        graph = Graph(3, [(0, 1), (1, 2)])  # path; trivial group
        model = IndependentSetModel(graph, 1.0)
        sim = CouplingSimulator(model, PermutationGroup([], n=3))
        rng = Random(54)
        upper, lower = (0, 1, 0), (0, 0, 0)
        distances = set()
        for _ in range(500):
            nu, nl, case = sim.step(upper, lower, rng)
            if case == 4:
                distances.add(hamming(nu, nl))
        assert 2 in distances

    def test_precondition_rejected(self):
        graph = gen_grid(3)
        model = IndependentSetModel(graph, 1.0)
        with pytest.raises(ValueError):
            coupling_step((0,) * 9, (0,) * 9, model, grid3_group(), Random(0))

    def test_exact_rho_extremes(self):
        complete = gen_complete(2)
        sym = automorphism_generators(complete.to_colored())
        assert exact_rho(complete, sym) == 0.0
        path = Graph(3, [(0, 1), (1, 2)])
        assert exact_rho(path, PermutationGroup([], n=3)) == 1.0

    def test_exact_rho_grid4_below_one(self):
        grid4 = gen_grid(4)
        group = automorphism_generators(grid4.to_colored())
        assert group.order() == 8
        rho = exact_rho(grid4, group)
        assert 0.0 < rho < 1.0

    def test_drift_satisfies_bound_grid3(self):
        model = IndependentSetModel(gen_grid(3), 1.0)
        report = coupling_drift(model, grid3_group(), trials=20_000, seed=55)
        assert sum(report.case_counts.values()) == report.pairs_examined
        assert 0.0 <= report.rho <= 1.0
        assert report.expected_drift <= report.bound + 3 * report.drift_se
        assert report.diameter == 9
        assert 0.0 < report.alpha < 1.0

    def test_marginal_faithfulness_small(self):
        graph = gen_grid(3)
        model = IndependentSetModel(graph, 1.0)
        group = grid3_group()
        matrix = transition_matrix(model, ChainKind.ORBITAL_INSERT_DELETE,
                                   group=group)
        sim = CouplingSimulator(model, group)
        rng = Random(56)
        corner = NAMES9.index("a")
        middle = NAMES9.index("e")
        upper = tuple(1 if i in (corner, middle) else 0 for i in range(9))
        lower = tuple(1 if i == middle else 0 for i in range(9))
        trials = 30_000
        counts_u = np.zeros(len(matrix.states))
        counts_l = np.zeros(len(matrix.states))
        for _ in range(trials):
            nu, nl, _ = sim.step(upper, lower, rng)
            counts_u[matrix.index_of(nu)] += 1
            counts_l[matrix.index_of(nl)] += 1
        for counts, start in ((counts_u, upper), (counts_l, lower)):
            row = matrix.rows[matrix.index_of(start)]
            for freq, p in zip(counts / trials, row):
                se = math.sqrt(p * (1 - p) / trials)
                assert abs(freq - p) <= 3 * se + 1e-9

    def test_varrho_probability_range(self):
        for graph in (gen_grid(3), gen_complete(2)):
            v = exact_varrho(graph)
            assert 0.0 <= v <= 1.0
