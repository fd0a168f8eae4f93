import unittest
import sys
import os
from fractions import Fraction

import networkx as nx
import numpy as np

# Add src to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.arborescence import (Arborescence, EnumerationLimitError, InfeasibleArborescence, Orientation,
                              count_arborescences, count_columns, enumerate_columns, enumerate_in_arborescences,
                              enumerate_out_arborescences, iter_arborescences, make_column, min_cost_arborescence)
from src.network import make_network
from src.topologies import gen_bidirected_tree, gen_complete, gen_cycle, gen_hypercube, gen_random, gen_ring


class TestArborescence(unittest.TestCase):

    def test_validation(self) -> None:
        with self.assertRaises(ValueError):
            Arborescence(0, Orientation.IN, (None, None, 0))
        with self.assertRaises(ValueError):
            Arborescence(0, Orientation.IN, (None, 2, 1))
        tree = Arborescence(0, Orientation.IN, (None, 0, 1))
        self.assertEqual(tree.edges(), [(1, 0), (2, 1)])
        self.assertEqual(tree.reversed().edges(), [(0, 1), (1, 2)])
        self.assertEqual(tree.depths(), (0, 1, 2))

    def test_column(self) -> None:
        mac = Arborescence(0, Orientation.IN, (None, 0, 0))
        bc = Arborescence(0, Orientation.OUT, (None, 0, 1))
        column = make_column(mac, bc)
        self.assertEqual(column.beta_z, ((0, 1, 0), (1, 0, 1), (1, 0, 0)))
        self.assertEqual(sum(map(sum, column.beta_z)), 4)
        with self.assertRaises(ValueError):
            make_column(bc, mac)
        with self.assertRaises(ValueError):
            make_column(mac, Arborescence(1, Orientation.OUT, (1, None, 1)))


class TestEnumeration(unittest.TestCase):

    def test_complete_counts(self) -> None:
        # Cayley: K^(K-2) spanning trees per root and orientation.
        for K in range(2, 6):
            network = gen_complete(K)
            for root in range(K):
                self.assertEqual(len(enumerate_in_arborescences(network, root)), K ** (K - 2))
                self.assertEqual(len(enumerate_out_arborescences(network, root)), K ** (K - 2))

    def test_column_count_on_complete_support(self) -> None:
        for K in range(2, 7):
            self.assertEqual(count_columns(gen_complete(K)), K ** (2 * K - 3))
        self.assertEqual(len(list(enumerate_columns(gen_complete(3)))), 27)

    def test_lexicographic_order_without_duplicates(self) -> None:
        trees = enumerate_in_arborescences(gen_complete(4), 2)
        parents = [t.parent for t in trees]
        self.assertEqual(len(set(parents)), len(parents))
        self.assertEqual(parents, sorted(parents, key=lambda p: tuple(-1 if x is None else x for x in p)))

    def test_every_tree_uses_support(self) -> None:
        network = gen_ring(5)
        for orientation in Orientation:
            for tree in iter_arborescences(network, 3, orientation):
                self.assertTrue(tree.fits(network))
                self.assertEqual(len(tree.edges()), 4)

    def test_cycle_has_one_tree_per_root(self) -> None:
        network = gen_cycle(5)
        for root in range(5):
            (mac,) = enumerate_in_arborescences(network, root)
            (bc,) = enumerate_out_arborescences(network, root)
            self.assertEqual(mac.edges(), sorted((v, (v + 1) % 5) for v in range(5) if v != root))
            self.assertEqual(bc.edges(), sorted(((v - 1) % 5, v) for v in range(5) if v != root))

    def test_not_strongly_connected(self) -> None:
        network = make_network(3, [(0, 1, 1), (1, 2, 1)])
        self.assertEqual(enumerate_in_arborescences(network, 2), [Arborescence(2, Orientation.IN, (1, 2, None))])
        self.assertEqual(enumerate_in_arborescences(network, 0), [])
        self.assertEqual(count_arborescences(network, 0, Orientation.IN), 0)
        self.assertEqual(list(enumerate_columns(network)), [])

    def test_matrix_tree_matches_enumeration(self) -> None:
        print("\n--- Matrix-tree count vs enumeration (K <= 5) ---")
        networks = [gen_complete(K) for K in range(2, 6)] + [gen_cycle(K) for K in range(3, 6)]
        networks += [gen_ring(K) for K in range(3, 6)] + [gen_hypercube(2)]
        networks.append(gen_bidirected_tree({1: 0, 2: 0, 3: 1, 4: 1}))
        rng = np.random.default_rng(5)
        networks += [gen_random(int(rng.integers(2, 6)), 2, rng) for _ in range(20)]
        for network in networks:
            for root in network.nodes:
                for orientation in Orientation:
                    self.assertEqual(count_arborescences(network, root, orientation),
                                     len(list(iter_arborescences(network, root, orientation))))
        print(f"✓ {len(networks)} networks checked.")

    def test_column_cap(self) -> None:
        with self.assertRaises(EnumerationLimitError):
            list(enumerate_columns(gen_complete(4), cap=100))


class TestMinCostArborescence(unittest.TestCase):

    def test_unit_costs_on_cycle(self) -> None:
        network = gen_cycle(4)
        costs = {edge: 1 for edge in network.support()}
        tree, cost = min_cost_arborescence(network, 0, Orientation.OUT, costs)
        self.assertEqual(cost, 3)
        self.assertEqual(tree.edges(), [(0, 1), (1, 2), (2, 3)])

    def test_tie_break_prefers_smallest_edge_id(self) -> None:
        network = gen_complete(3)
        costs = {edge: 1 for edge in network.support()}
        tree, cost = min_cost_arborescence(network, 0, Orientation.OUT, costs)
        self.assertEqual(cost, 2)
        self.assertEqual(tree.edges(), [(0, 1), (0, 2)])

    def test_infeasible(self) -> None:
        network = make_network(3, [(0, 1, 1), (1, 2, 1)])
        costs = {edge: 1 for edge in network.support()}
        with self.assertRaises(InfeasibleArborescence):
            min_cost_arborescence(network, 2, Orientation.OUT, costs)
        tree, _ = min_cost_arborescence(network, 2, Orientation.IN, costs)
        self.assertEqual(tree.parent, (1, 2, None))

    def test_negative_cost_rejected(self) -> None:
        network = gen_cycle(3)
        with self.assertRaises(ValueError):
            min_cost_arborescence(network, 0, Orientation.IN, {(0, 1): -1, (1, 2): 1, (2, 0): 1})

    def test_matches_brute_force_and_networkx(self) -> None:
        rng = np.random.default_rng(99)
        for _ in range(40):
            K = int(rng.integers(3, 6))
            network = gen_random(K, 1, rng, strongly_connected=True)
            costs = {edge: Fraction(int(rng.integers(0, 10)), int(rng.integers(1, 4))) for edge in network.support()}
            for orientation in Orientation:
                root = int(rng.integers(0, K))
                tree, cost = min_cost_arborescence(network, root, orientation, costs)
                self.assertTrue(tree.fits(network))
                self.assertEqual(cost, sum(costs[e] for e in tree.edges()))
                best = min(sum(costs[e] for e in t.edges()) for t in iter_arborescences(network, root, orientation))
                self.assertEqual(cost, best)
            # networkx finds the global minimum over all roots for out-trees.
            graph = nx.DiGraph()
            for (i, j), c in costs.items():
                graph.add_edge(i, j, weight=float(c))
            reference = nx.minimum_spanning_arborescence(graph, attr="weight")
            global_best = min(min_cost_arborescence(network, r, Orientation.OUT, costs)[1] for r in network.nodes)
            self.assertAlmostEqual(float(global_best), reference.size(weight="weight"))


if __name__ == '__main__':
    unittest.main()
