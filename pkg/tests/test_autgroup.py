"""Colored-graph refinement and automorphism search against the brute-force oracle."""

from random import Random

import pytest

from orbitalmcmc.autgroup import (
    ColoredGraph,
    automorphism_generators,
    brute_force_automorphisms,
    color_cells,
    color_refine,
    is_automorphism,
    read_graph,
    write_graph,
)
from orbitalmcmc.perm import Permutation, PermutationGroup, parse_cycles


def example_clause_graph() -> ColoredGraph:
    """Two weighted clauses over three variables: the 8-vertex benchmark graph.

    Vertices 0..2 unnegated a,b,c (color 1); 3..5 negated (color 0);
    6..7 the two equal-weight clause nodes (color 2).  Clause one contains
    a and not-c, clause two contains b and not-c.
    """
    edges = [(0, 3), (1, 4), (2, 5),        # negation pairing
             (6, 0), (6, 5), (7, 1), (7, 5)]  # occurrence edges
    return ColoredGraph(8, [1, 1, 1, 0, 0, 0, 2, 2], edges,
                        vertex_names=["a", "b", "c", "-a", "-b", "-c", "f1", "f2"])


def grid3_plain() -> ColoredGraph:
    edges = []
    for r in range(3):
        for c in range(3):
            v = 3 * r + c
            if c < 2:
                edges.append((v, v + 1))
            if r < 2:
                edges.append((v, v + 3))
    return ColoredGraph(9, [0] * 9, edges)


def triangle() -> ColoredGraph:
    return ColoredGraph(3, [0, 0, 0], [(0, 1), (1, 2), (0, 2)])


def path3() -> ColoredGraph:
    return ColoredGraph(3, [0, 0, 0], [(0, 1), (1, 2)])


def random_colored_graph(rng: Random, max_n: int = 8) -> ColoredGraph:
    n = rng.randrange(1, max_n + 1)
    n_colors = rng.randrange(1, min(3, n) + 1)
    colors = [rng.randrange(n_colors) for _ in range(n)]
    # densify in case a color went unused
    used = sorted(set(colors))
    remap = {c: i for i, c in enumerate(used)}
    colors = [remap[c] for c in colors]
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < 0.4]
    return ColoredGraph(n, colors, edges)


class TestColoredGraph:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            ColoredGraph(2, [0, 0], [(1, 1)])

    def test_rejects_sparse_colors(self):
        with pytest.raises(ValueError):
            ColoredGraph(2, [0, 2], [])

    def test_file_round_trip(self, tmp_path):
        g = example_clause_graph()
        path = tmp_path / "graph.txt"
        write_graph(path, g)
        back = read_graph(path)
        assert back.n == g.n
        assert back.colors == g.colors
        assert back.edges == g.edges


class TestColorRefine:
    def test_discrete_is_fixpoint(self):
        g = triangle()
        discrete = ((0,), (1,), (2,))
        assert color_refine(g, discrete) == discrete

    def test_equitable_unchanged(self):
        g = triangle()
        assert color_refine(g) == ((0, 1, 2),)

    def test_clause_graph_separates_by_clause_degree(self):
        cells = color_refine(example_clause_graph())
        # c has no clause edge while a, b have one; same for the negated side
        as_sets = [set(c) for c in cells]
        assert {0, 1} in as_sets and {2} in as_sets
        assert {3, 4} in as_sets and {5} in as_sets
        assert {6, 7} in as_sets

    def test_monotone_and_idempotent(self):
        rng = Random(11)
        for _ in range(40):
            g = random_colored_graph(rng)
            refined = color_refine(g)
            assert color_refine(g, refined) == refined
            start_cells = {frozenset(c) for c in color_cells(g)}
            for cell in refined:
                assert any(set(cell) <= s for s in start_cells)

    def test_rejects_color_mixing_start(self):
        g = example_clause_graph()
        with pytest.raises(ValueError):
            color_refine(g, ((0, 3), (1, 2, 4, 5), (6, 7)))


class TestIsAutomorphism:
    def test_identity(self):
        g = example_clause_graph()
        assert is_automorphism(g, Permutation.identity(8))

    def test_grid_generator(self):
        names = list("abcdefghi")
        g = grid3_plain()
        assert is_automorphism(g, parse_cycles("(a i)(b f)(d h)", names=names))
        assert is_automorphism(g, parse_cycles("(a c)(d f)(g i)", names=names))

    def test_color_violation(self):
        g = example_clause_graph()
        assert not is_automorphism(g, parse_cycles("(0 3)", n=8))

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            is_automorphism(triangle(), Permutation.identity(4))


class TestBruteForce:
    def test_clause_graph_has_two(self):
        auts = brute_force_automorphisms(example_clause_graph())
        assert len(auts) == 2

    def test_triangle(self):
        assert len(brute_force_automorphisms(triangle())) == 6

    def test_path(self):
        assert len(brute_force_automorphisms(path3())) == 2

    def test_guard(self):
        with pytest.raises(ValueError):
            brute_force_automorphisms(ColoredGraph(11, [0] * 11, []))


class TestSearch:
    def test_clause_graph_exact_generator(self):
        group = automorphism_generators(example_clause_graph())
        assert group.order() == 2
        expected = parse_cycles("(0 1)(3 4)(6 7)", n=8)
        assert group.generators == (expected,)

    def test_grid_order(self):
        assert automorphism_generators(grid3_plain()).order() == 8

    def test_rigid_graph(self):
        g = ColoredGraph(3, [0, 1, 2], [])
        group = automorphism_generators(g)
        assert group.is_trivial()
        assert group.order() == 1

    def test_generators_are_automorphisms(self):
        rng = Random(12)
        for _ in range(30):
            g = random_colored_graph(rng)
            for gen in automorphism_generators(g).generators:
                assert is_automorphism(g, gen)

    def test_matches_brute_force_on_corpus(self):
        rng = Random(13)
        for _ in range(60):
            g = random_colored_graph(rng)
            group = automorphism_generators(g)
            assert len(group.generators) <= g.n
            found = set(group.elements())
            oracle = set(brute_force_automorphisms(g))
            assert found == oracle

    def test_conjugation_by_relabeling(self):
        rng = Random(14)
        for _ in range(15):
            g = random_colored_graph(rng, max_n=7)
            order = automorphism_generators(g).order()
            rho = list(range(g.n))
            rng.shuffle(rho)
            rho_p = Permutation(rho)
            relabeled = ColoredGraph(
                g.n,
                [g.colors[rho_p.inverse().apply(v)] for v in range(g.n)],
                [(rho_p.apply(u), rho_p.apply(v)) for u, v in g.edges])
            conj_group = automorphism_generators(relabeled)
            assert conj_group.order() == order
            # conjugating back by rho yields automorphisms of the original
            inv = rho_p.inverse()
            back = [rho_p.compose(h).compose(inv) for h in conj_group.generators]
            assert all(is_automorphism(g, b) for b in back)
            assert set(PermutationGroup(back, n=g.n).elements()) == \
                set(automorphism_generators(g).elements())
