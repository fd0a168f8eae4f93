import unittest
import sys
import os
from dataclasses import replace
from fractions import Fraction

import numpy as np

# Add src to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.arborescence import Arborescence, Orientation, make_column, min_cost_arborescence
from src.finite_field import FieldError, PrimeField, is_prime
from src.rate_lp import Packing
from src.schemes import pack_complete, pack_cycle
from src.simulator import (TOTAL, CapacityViolation, CausalityViolation, DecodeFailure, Schedule, execute,
                           execute_packing, measured_rate, packing_scale, random_inputs, schedule_column,
                           transcript_dump)
from src.topologies import gen_complete, gen_cycle


def path_column():
    """Root 0; mac 2 -> 1 -> 0, bc 0 -> 1 -> 2."""
    parents = (None, 0, 1)
    return make_column(Arborescence(0, Orientation.IN, parents), Arborescence(0, Orientation.OUT, parents))


def random_column(K, rng):
    network = gen_complete(K)
    root = int(rng.integers(0, K))
    trees = []
    for orientation in (Orientation.IN, Orientation.OUT):
        costs = {edge: int(rng.integers(0, 100)) for edge in network.support()}
        trees.append(min_cost_arborescence(network, root, orientation, costs)[0])
    return make_column(*trees)


class TestPrimeField(unittest.TestCase):

    def test_primality(self) -> None:
        self.assertTrue(is_prime(2))
        self.assertTrue(is_prime(257))
        self.assertFalse(is_prime(1))
        self.assertFalse(is_prime(4))
        self.assertFalse(is_prime(True))

    def test_invalid_modulus(self) -> None:
        with self.assertRaises(FieldError):
            PrimeField(4)
        with self.assertRaises(FieldError):
            PrimeField(2 ** 61 - 1)

    def test_vector_arithmetic(self) -> None:
        field = PrimeField(7)
        a, b = field.vector([1, 5, 6]), field.vector([6, 4, 8])
        np.testing.assert_array_equal(b, [6, 4, 1])
        np.testing.assert_array_equal(field.add(a, b), [0, 2, 0])
        np.testing.assert_array_equal(field.sub(a, b), [2, 1, 5])
        np.testing.assert_array_equal(field.scale(3, a), [3, 1, 4])
        np.testing.assert_array_equal(field.sum([a, b, a]), [1, 0, 6])
        with self.assertRaises(FieldError):
            field.check(np.array([0, 7]))

    def test_random_symbols_in_range(self) -> None:
        field = PrimeField(3)
        sample = field.random(1000, np.random.default_rng(1))
        self.assertTrue(((sample >= 0) & (sample < 3)).all())
        self.assertEqual(set(sample.tolist()), {0, 1, 2})


class TestSchedule(unittest.TestCase):

    def test_round_counts(self) -> None:
        column = path_column()
        self.assertEqual(schedule_column(column, 1).round_count, 4)
        self.assertEqual(schedule_column(column, 5).round_count, 8)
        self.assertEqual(measured_rate(schedule_column(column, 5), 5), Fraction(5, 8))
        two_node = pack_complete(2).columns[0]
        self.assertEqual(schedule_column(two_node, 1).round_count, 2)
        self.assertEqual(measured_rate(schedule_column(two_node, 1), 1), Fraction(1, 2))

    def test_rate_approaches_one(self) -> None:
        column = path_column()
        self.assertEqual(measured_rate(schedule_column(column, 1), 1), Fraction(1, 4))
        self.assertEqual(measured_rate(schedule_column(column, 997), 997), Fraction(997, 1000))

    def test_unit_usage_per_tree_edge(self) -> None:
        column = random_column(5, np.random.default_rng(4))
        schedule = schedule_column(column, 12)
        for n in range(1, schedule.round_count + 1):
            for (i, j), used in schedule.link_usage(n).items():
                self.assertLessEqual(used, column.beta_z[i][j])

    def test_invalid_length(self) -> None:
        with self.assertRaises(ValueError):
            schedule_column(path_column(), 0)


class TestExecute(unittest.TestCase):

    def test_path_column_transcript(self) -> None:
        column = path_column()
        field = PrimeField(257)
        inputs = np.array([[5], [7], [11]])
        transcript = execute(column.as_network(), schedule_column(column, 1), inputs, field)
        self.assertTrue(transcript.decoded)
        np.testing.assert_array_equal(transcript.outputs, [[23], [23], [23]])
        # Y_1(2) is empty: node 1 sends in round 2 and receives nothing.
        self.assertEqual(transcript.received[1][1], ())
        self.assertEqual(transcript.received[0][1][0].value, 18)
        dump = transcript_dump(transcript).splitlines()
        self.assertEqual(dump[0], "n=1 2->1 len=1 desc=partial[v=2,l=0,s=0]")
        self.assertEqual(dump[-1], "decoded=ok rate=1/4")
        self.assertEqual(len(dump), 5)

    def test_zero_inputs(self) -> None:
        column = random_column(4, np.random.default_rng(8))
        transcript = execute(column.as_network(), schedule_column(column, 6), np.zeros((4, 6), dtype=np.int64),
                             PrimeField(3))
        self.assertFalse(transcript.outputs.any())

    def test_randomized_executions(self) -> None:
        print("\n--- Simulator: 1000 randomized executions ---")
        rng = np.random.default_rng(2024)
        fields = [PrimeField(q) for q in (2, 3, 257)]
        for run in range(1000):
            K = int(rng.integers(2, 7))
            L = int(rng.integers(1, 65))
            field = fields[run % 3]
            column = random_column(K, rng)
            schedule = schedule_column(column, L)
            inputs = random_inputs(K, L, field, rng)
            transcript = execute(column.as_network(), schedule, inputs, field)
            self.assertTrue(transcript.decoded)
            np.testing.assert_array_equal(transcript.outputs[K - 1], np.mod(inputs.sum(axis=0), field.q))
            self.assertEqual(measured_rate(schedule, L), Fraction(L, L + 2 * K - 3))
            self.assertGreaterEqual(measured_rate(schedule, L), 1 - Fraction(2 * K - 3, L))
        print("✓ Every node decoded the sum in all runs.")

    def test_linearity(self) -> None:
        rng = np.random.default_rng(12)
        field = PrimeField(257)
        column = random_column(5, rng)
        network, schedule = column.as_network(), schedule_column(column, 10)
        w1, w2 = random_inputs(5, 10, field, rng), random_inputs(5, 10, field, rng)
        out1 = execute(network, schedule, w1, field).outputs
        out2 = execute(network, schedule, w2, field).outputs
        out12 = execute(network, schedule, field.add(w1, w2), field).outputs
        np.testing.assert_array_equal(field.add(out1, out2), out12)

    def test_forged_early_payload(self) -> None:
        column = path_column()
        schedule = schedule_column(column, 1)
        broadcast = next(t for t in schedule.transmissions() if t.payload.kind == TOTAL and t.sender == 0)
        rounds = [list(batch) for batch in schedule.rounds]
        rounds[broadcast.round - 1].remove(broadcast)
        rounds[0].append(replace(broadcast, round=1))
        forged = Schedule(3, 1, (0,), tuple(tuple(batch) for batch in rounds))
        with self.assertRaises(CausalityViolation) as cm:
            execute(column.as_network(), forged, np.ones((3, 1), dtype=np.int64), PrimeField(5))
        self.assertEqual((cm.exception.round, cm.exception.node), (1, 0))

    def test_capacity_violation(self) -> None:
        star = pack_complete(3).columns[0]
        with self.assertRaises(CapacityViolation) as cm:
            execute(gen_cycle(3), schedule_column(star, 2), np.ones((3, 2), dtype=np.int64), PrimeField(5))
        self.assertGreaterEqual(cm.exception.round, 1)

    def test_decode_failure(self) -> None:
        column = path_column()
        schedule = schedule_column(column, 1)
        rounds = list(schedule.rounds[:-1]) + [()]
        truncated = Schedule(3, 1, (0,), tuple(rounds))
        with self.assertRaises(DecodeFailure) as cm:
            execute(column.as_network(), truncated, np.ones((3, 1), dtype=np.int64), PrimeField(5))
        self.assertEqual(cm.exception.node, 2)

    def test_input_shape(self) -> None:
        column = path_column()
        with self.assertRaises(ValueError):
            execute(column.as_network(), schedule_column(column, 2), np.ones((3, 1), dtype=np.int64), PrimeField(5))


class TestExecutePacking(unittest.TestCase):

    def test_complete_three(self) -> None:
        run = execute_packing(gen_complete(3), pack_complete(3), 100, PrimeField(257), np.random.default_rng(0))
        self.assertEqual(run.scale, 2)
        self.assertEqual(run.streams_per_column, (1, 1, 1))
        self.assertTrue(run.transcript.decoded)
        self.assertEqual(run.throughput, Fraction(300, 2 * 103))

    def test_throughput_near_packing_rate(self) -> None:
        for network, packing in ((gen_complete(4), pack_complete(4)), (gen_cycle(5), pack_cycle(5))):
            K, L = network.node_count, 256
            run = execute_packing(network, packing, L, PrimeField(257), np.random.default_rng(K))
            self.assertTrue(run.transcript.decoded)
            self.assertLessEqual(run.throughput, packing.rate)
            self.assertGreaterEqual(run.throughput, packing.rate * (1 - Fraction(2 * K - 3, L)))

    def test_cycle_three_scale_four(self) -> None:
        run = execute_packing(gen_cycle(3), pack_cycle(3), 50, PrimeField(3), np.random.default_rng(5))
        self.assertEqual(run.scale, 4)
        self.assertTrue(run.transcript.decoded)

    def test_single_column_reduces_to_execute(self) -> None:
        column = path_column()
        packing = Packing(3, (column,), (1,))
        run = execute_packing(column.as_network(), packing, 7, PrimeField(11), np.random.default_rng(2))
        self.assertEqual(run.scale, 1)
        self.assertEqual(run.throughput, Fraction(7, 10))

    def test_infeasible_packing(self) -> None:
        packing = Packing(3, pack_complete(3).columns, (1, 1, 1))
        with self.assertRaises(CapacityViolation):
            execute_packing(gen_complete(3), packing, 4, PrimeField(5), np.random.default_rng(0))

    def test_scale(self) -> None:
        self.assertEqual(packing_scale(pack_cycle(5)), 8)
        with self.assertRaises(ValueError):
            execute_packing(gen_cycle(5), pack_cycle(5), 4, PrimeField(5), np.random.default_rng(0), scale=3)


if __name__ == '__main__':
    unittest.main()
