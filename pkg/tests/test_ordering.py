import itertools
import random

import networkx as nx
import pytest

from tncirc.circuit import parse_circuit
from tncirc.graphs import SimpleGraph, line_graph, multigraph_line_graph, read_graph, write_graph
from tncirc.network import TensorNetwork, build_network, execute_plan, make_plan
from tncirc.ordering import (
    EliminationOrdering,
    TreeDecomposition,
    anytime_ordering,
    elimination_width,
    exact_ordering,
    lg_plan,
    min_fill_ordering,
    plan_from_ordering,
    plan_network,
    read_ordering,
    stochastic_plan,
    tree_decomposition,
    treewidth_upper_bound,
    validate_tree_decomposition,
    write_ordering,
)

from _helpers import brute_force_treewidth, random_circuit


def from_nx(h: nx.Graph) -> SimpleGraph:
    h = nx.convert_node_labels_to_integers(h)
    return SimpleGraph(h.number_of_nodes(), h.edges())


def to_nx(g: SimpleGraph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def test_line_graph_examples():
    assert line_graph(from_nx(nx.complete_graph(3))) == from_nx(nx.complete_graph(3))
    assert line_graph(from_nx(nx.path_graph(3))) == SimpleGraph(2, [(0, 1)])
    assert line_graph(from_nx(nx.star_graph(3))) == from_nx(nx.complete_graph(3))


def test_line_graph_matches_networkx():
    for seed in range(10):
        h = nx.gnm_random_graph(8, 12, seed=seed)
        g = from_nx(h)
        ours = line_graph(g)
        ref = nx.line_graph(to_nx(g))
        index = {e: i for i, e in enumerate(g.edges)}
        expected = {tuple(sorted((index[tuple(sorted(a))], index[tuple(sorted(b))]))) for a, b in ref.edges()}
        assert set(ours.edges) == expected


def test_multigraph_line_graph_parallel_edges_adjacent():
    lg = multigraph_line_graph(2, [(0, 1), (0, 1)])
    assert lg.edges == [(0, 1)]


def test_simple_graph_rejects_loops_and_duplicates():
    with pytest.raises(ValueError, match="self-loop"):
        SimpleGraph(2, [(1, 1)])
    with pytest.raises(ValueError, match="duplicate"):
        SimpleGraph(2, [(0, 1), (1, 0)])


def test_graph_file_roundtrip():
    g = from_nx(nx.petersen_graph())
    assert read_graph(write_graph(g)) == g
    with pytest.raises(ValueError):
        read_graph("3\n0 1 2\n")


@pytest.mark.parametrize("seed", range(5))
def test_trees_have_width_one(seed):
    g = from_nx(nx.random_labeled_tree(12, seed=seed))
    assert min_fill_ordering(g, seed=seed).width == 1
    assert anytime_ordering(g, budget=3, seed=seed).width == 1


@pytest.mark.parametrize("n", [3, 4, 5, 8, 13])
def test_cycles_have_width_two(n):
    g = from_nx(nx.cycle_graph(n))
    assert min_fill_ordering(g).width == 2
    assert anytime_ordering(g, budget=5).width == 2


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_complete_graphs(n):
    g = from_nx(nx.complete_graph(n))
    assert min_fill_ordering(g).width == n - 1
    assert anytime_ordering(g).width == n - 1
    assert treewidth_upper_bound(g, list(range(n))) == n - 1


def test_c5_brute_force_over_all_orders():
    g = from_nx(nx.cycle_graph(5))
    assert min(elimination_width(g, p) for p in itertools.permutations(range(5))) == 2
    assert anytime_ordering(g, budget=1).width == 2


def test_exact_dp_matches_brute_force_on_small_graphs():
    rng = random.Random(0)
    for _ in range(60):
        n = rng.randint(2, 9)
        h = nx.gnp_random_graph(n, rng.uniform(0.2, 0.8), seed=rng.randrange(2**31))
        if not nx.is_connected(h):
            continue
        g = from_nx(h)
        ex = exact_ordering(g)
        assert ex.width == brute_force_treewidth(g)
        assert elimination_width(g, ex.order) == ex.width
        assert min_fill_ordering(g, seed=1).width >= ex.width


def test_exhaustive_budget_selects_exact_search():
    g = from_nx(nx.petersen_graph())
    exact = anytime_ordering(g, budget=2**g.n)
    assert exact.width == brute_force_treewidth(g) == 4


def test_elimination_width_matches_independent_bag_construction():
    g = from_nx(nx.random_regular_graph(3, 8, seed=4))
    order = min_fill_ordering(g, seed=2).order
    # independent bags: eliminate on a networkx copy
    h = to_nx(g)
    width = 0
    for v in order:
        nbrs = list(h.neighbors(v))
        width = max(width, len(nbrs))
        h.add_edges_from(itertools.combinations(nbrs, 2))
        h.remove_node(v)
    assert treewidth_upper_bound(g, order) == width


def test_permutation_checked():
    g = from_nx(nx.path_graph(3))
    with pytest.raises(ValueError, match="permutation"):
        elimination_width(g, [0, 1])


def test_min_fill_beats_or_matches_networkx_heuristic_on_average():
    ours, theirs = 0, 0
    for seed in range(10):
        h = nx.random_regular_graph(3, 20, seed=seed)
        ours += min_fill_ordering(from_nx(h), seed=seed).width
        theirs += nx.algorithms.approximation.treewidth_min_fill_in(h)[0]
    assert ours <= theirs + 2


def test_tree_decomposition_valid_for_random_orders():
    rng = random.Random(1)
    for _ in range(40):
        h = nx.gnp_random_graph(rng.randint(1, 12), 0.35, seed=rng.randrange(2**31))
        g = from_nx(h)
        order = list(range(g.n))
        rng.shuffle(order)
        td = tree_decomposition(g, order)
        assert validate_tree_decomposition(g, td) == []
        assert td.width == elimination_width(g, order)


def test_validator_detects_each_violation():
    g = from_nx(nx.path_graph(3))
    good = TreeDecomposition([frozenset({0, 1}), frozenset({1, 2})], [(0, 1)])
    assert validate_tree_decomposition(g, good) == []
    assert "vertex cover" in validate_tree_decomposition(
        g, TreeDecomposition([frozenset({0, 1})], []))
    assert "edge cover" in validate_tree_decomposition(
        g, TreeDecomposition([frozenset({0, 1}), frozenset({2})], [(0, 1)]))
    assert "tree shape" in validate_tree_decomposition(
        g, TreeDecomposition([frozenset({0, 1}), frozenset({1, 2})], []))
    broken = TreeDecomposition(
        [frozenset({0, 1}), frozenset({2}), frozenset({1, 2})], [(0, 1), (1, 2)])
    assert "running intersection" in validate_tree_decomposition(g, broken)


def test_anytime_is_monotone_and_no_worse_than_first_restart():
    for seed in range(5):
        g = from_nx(nx.random_regular_graph(4, 30, seed=seed))
        res = anytime_ordering(g, budget=8, seed=seed)
        assert len(res.history) == 8
        assert all(a >= b for a, b in zip(res.history, res.history[1:]))
        assert res.width <= min_fill_ordering(g, seed=seed).width
        assert res.width == res.history[-1]


def test_anytime_deterministic_for_restart_budget():
    g = from_nx(nx.random_regular_graph(3, 24, seed=9))
    assert anytime_ordering(g, budget=6, seed=3) == anytime_ordering(g, budget=6, seed=3)


def test_anytime_seconds_budget_runs_at_least_once():
    g = from_nx(nx.cycle_graph(6))
    res = anytime_ordering(g, seconds=0.01)
    assert res.width == 2 and len(res.history) >= 1


def test_plan_from_ordering_single_wire():
    net = build_network(parse_circuit("1"))
    plan = plan_from_ordering(net, [0])
    assert plan.order == (0,)
    assert execute_plan(net, plan)[0] == 1


def test_plan_from_ordering_wrong_length():
    net = build_network(parse_circuit("2\nCNOT 0 1"))
    with pytest.raises(ValueError, match="wires"):
        plan_from_ordering(net, [0, 1])


def test_bell_best_plan_peak_rank():
    net = build_network(parse_circuit("2\nH 0\nCNOT 0 1\nMEASZ 0\nMEASZ 1"))
    ranks = [make_plan(net, p).predicted_peak_rank for p in itertools.permutations(net.wire_ids())]
    assert min(ranks) <= 4
    assert lg_plan(net).predicted_peak_rank <= 4


def test_planners_agree_with_each_other():
    rng = random.Random(2)
    for k in range(25):
        c = random_circuit(rng, rng.randint(2, 5), rng.randint(1, 20), noisy=k % 4 == 0)
        net = build_network(c)
        a = execute_plan(net, plan_network(net, "lg", seed=k))[0]
        b = execute_plan(net, stochastic_plan(net, seed=k))[0]
        assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


def test_stochastic_path_never_needs_positive_threshold():
    net = TensorNetwork.from_structure(6, [(i, i + 1) for i in range(5)], rng=0)
    seen = []
    plan = stochastic_plan(net, max_rejections=3, seed=1, on_accept=lambda w, c, t: seen.append(t))
    assert len(plan.order) == net.num_wires
    assert max(seen) <= 0


def test_stochastic_tetrahedron_first_acceptance_needs_threshold_one():
    net = TensorNetwork.from_structure(4, list(itertools.combinations(range(4), 2)), rng=0)
    assert all(t.rank == 3 for t in net.tensors.values())
    seen = []
    stochastic_plan(net, max_rejections=2, seed=0, on_accept=lambda w, c, t: seen.append((c, t)))
    first_cost, first_threshold = seen[0]
    assert first_cost == 1
    assert first_threshold >= 1


def test_stochastic_deterministic_under_seed():
    c = random_circuit(random.Random(3), 5, 20)
    net = build_network(c)
    assert stochastic_plan(net, seed=7) == stochastic_plan(net, seed=7)


def test_stochastic_rejects_bad_max_rejections():
    net = build_network(parse_circuit("1"))
    with pytest.raises(ValueError):
        stochastic_plan(net, max_rejections=0)


def test_unknown_planner():
    net = build_network(parse_circuit("1"))
    with pytest.raises(ValueError, match="unknown planner"):
        plan_network(net, "quickbb")


def test_ordering_file_roundtrip():
    assert read_ordering(write_ordering([3, 1, 2, 0])) == [3, 1, 2, 0]
    with pytest.raises(ValueError, match="malformed"):
        read_ordering("1 2 x")


def test_elimination_ordering_record():
    g = from_nx(nx.path_graph(4))
    res = min_fill_ordering(g)
    assert isinstance(res, EliminationOrdering)
    assert sorted(res.order) == [0, 1, 2, 3]
