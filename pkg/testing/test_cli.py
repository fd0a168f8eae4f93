import unittest
import sys
import os
import io
import json
import tempfile
from contextlib import redirect_stdout
from fractions import Fraction
from unittest.mock import MagicMock, patch

# Add src to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from run_analysis.cli import EXIT_INTERNAL, EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION, main
from src.file_formats import parse_packing, read_network
from src.interfaces import BoundResult


@patch.dict(os.environ, {"DISCORD_WEBHOOK_URL": "", "ALLREDUCE_LOG_LEVEL": "ERROR"})
class TestCli(unittest.TestCase):

    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = self.tmp.name

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def path(self, name: str) -> str:
        return os.path.join(self.dir, name)

    def run_cli(self, *argv: str):
        out = io.StringIO()
        with redirect_stdout(out):
            code = main(list(argv))
        return code, out.getvalue()

    def gen(self, name: str, *argv: str) -> str:
        code, _ = self.run_cli("gen", *argv, "-o", self.path(name))
        self.assertEqual(code, EXIT_OK)
        return self.path(name)

    # --- gen ---

    def test_gen(self) -> None:
        cube = self.gen("cube3.net", "hypercube", "--dim", "3")
        self.assertEqual(len(read_network(cube).support()), 24)
        code, out = self.run_cli("gen", "complete", "--k", "3")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out.splitlines()[1:], ["K 3", "0 1 1", "0 2 1", "1 0 1", "1 2 1", "2 0 1", "2 1 1"])
        tree = self.gen("tree.net", "tree", "--parents", "0,0,1", "--bandwidth", "2")
        self.assertEqual(read_network(tree).beta(3, 1), 2)

    def test_gen_tree_per_edge_bandwidths(self) -> None:
        tree = read_network(self.gen("tree.net", "tree", "--parents", "0,0,1", "--bandwidths", "2,3,4"))
        self.assertEqual((tree.beta(1, 0), tree.beta(0, 2), tree.beta(3, 1), tree.beta(1, 3)), (2, 3, 4, 4))
        code, _ = self.run_cli("gen", "tree", "--parents", "0,0,1", "--bandwidths", "2,3")
        self.assertEqual(code, EXIT_USAGE)

    def test_gen_missing_parameter(self) -> None:
        code, _ = self.run_cli("gen", "cycle")
        self.assertEqual(code, EXIT_USAGE)
        code, _ = self.run_cli("gen", "cycle", "--k", "2")
        self.assertEqual(code, EXIT_USAGE)

    # --- bounds / lp ---

    def test_bounds(self) -> None:
        network = self.gen("k5.net", "complete", "--k", "5")
        for method in ("brute", "flow", "both"):
            code, out = self.run_cli("bounds", network, "--method", method)
            self.assertEqual(code, EXIT_OK)
            self.assertEqual(out.strip(), "upper=4 cut={0} labels={1}")
        code, out = self.run_cli("bounds", network, "--json")
        self.assertEqual(json.loads(out)["upper"], "4")
        self.assertEqual(json.loads(out)["cut"], [0])

    def test_bounds_hypercube_labels(self) -> None:
        cube = self.gen("cube2.net", "hypercube", "--dim", "2")
        code, out = self.run_cli("bounds", cube)
        self.assertEqual(out.strip(), "upper=2 cut={0} labels={00}")

    def test_lp(self) -> None:
        cube = self.gen("cube3.net", "hypercube", "--dim", "3")
        code, out = self.run_cli("lp", cube, "--mode", "colgen")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(out.startswith("lower=12/7 "))

    def test_lp_exhaustive_limit(self) -> None:
        cycle = self.gen("c6.net", "cycle", "--k", "6")
        code, _ = self.run_cli("lp", cycle, "--mode", "exhaustive")
        self.assertEqual(code, EXIT_USAGE)
        code, out = self.run_cli("lp", cycle, "--mode", "exhaustive", "--force",
                                 "--emit-packing", self.path("c6.pack"))
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(out.startswith("lower=3/5 "))
        self.assertTrue(os.path.exists(self.path("c6.pack")))

    # --- pack / simulate ---

    def test_pack(self) -> None:
        code, out = self.run_cli("pack", "cycle", "--k", "5", "-o", self.path("c5.pack"))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out.strip(), "rate=5/8 columns=5 feasible=yes cap_tight=yes")
        code, out = self.run_cli("pack", "cyc3", "--a", "1", "--b", "2", "--c", "3", "-o", self.path("cyc3.pack"))
        self.assertEqual(out.strip(), "rate=1 columns=3 feasible=yes cap_tight=no")
        code, out = self.run_cli("pack", "hypercube", "--dim", "2", "--json")
        self.assertEqual(json.loads(out)["rate"], "4/3")
        self.assertEqual(parse_packing(json.loads(out)["packing"]).rate, Fraction(4, 3))

    def test_pack_writes_packing_to_stdout(self) -> None:
        code, out = self.run_cli("pack", "cycle", "--k", "5")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out.splitlines()[0], "# rate=5/8 columns=5 feasible=yes cap_tight=yes")
        packing = parse_packing(out)
        self.assertEqual((len(packing), packing.rate), (5, Fraction(5, 8)))

    def test_simulate(self) -> None:
        network = self.gen("k4.net", "complete", "--k", "4")
        code, _ = self.run_cli("pack", "complete", "--k", "4", "-o", self.path("k4.pack"))
        self.assertEqual(code, EXIT_OK)
        code, out = self.run_cli("simulate", network, self.path("k4.pack"), "--L", "16", "--seed", "7",
                                 "--dump", self.path("dump.txt"))
        self.assertEqual(code, EXIT_OK)
        lines = out.splitlines()
        self.assertEqual(lines[0], "seed=7 generator=PCG64 q=257 L=16 scale=2")
        self.assertEqual(lines[1], "decoded=ok rate=32/21 packing_rate=2")
        with open(self.path("dump.txt")) as f:
            self.assertEqual(f.read().splitlines()[-1], "decoded=ok rate=64/42")

    def test_simulate_rejects_composite_q(self) -> None:
        network = self.gen("k3.net", "complete", "--k", "3")
        self.run_cli("pack", "complete", "--k", "3", "-o", self.path("k3.pack"))
        code, _ = self.run_cli("simulate", network, self.path("k3.pack"), "--q", "4")
        self.assertEqual(code, EXIT_USAGE)

    def test_simulate_infeasible_packing(self) -> None:
        cycle = self.gen("c4.net", "cycle", "--k", "4")
        self.run_cli("pack", "complete", "--k", "4", "-o", self.path("k4.pack"))
        code, _ = self.run_cli("simulate", cycle, self.path("k4.pack"))
        self.assertEqual(code, EXIT_VERIFICATION)

    # --- report / search ---

    def test_report(self) -> None:
        network = self.gen("cyc3.net", "cyc3", "--a", "1", "--b", "1", "--c", "2")
        code, out = self.run_cli("report", network, "--json")
        self.assertEqual(code, EXIT_OK)
        report = json.loads(out)
        self.assertEqual((report["lower"], report["upper"], report["gap"]), ("1", "1", "1"))
        self.assertTrue(report["within_two"])
        self.assertEqual(report["lower_provenance"], "closed-form")
        self.assertEqual(report["upper_provenance"], "cut-bruteforce")
        code, out = self.run_cli("report", network)
        self.assertIn("Lower bound", out)
        self.assertIn("within 2", out)

    def test_report_examples(self) -> None:
        cube = self.gen("cube3.net", "hypercube", "--dim", "3")
        report = json.loads(self.run_cli("report", cube, "--json")[1])
        self.assertEqual((report["lower"], report["upper"], report["gap"]), ("12/7", "3", "7/4"))
        self.assertEqual(report["lower_provenance"], "closed-form")
        self.assertEqual(report["columns"], 48)
        self.assertIn("S={000}", self.run_cli("report", cube)[1])
        star = self.gen("star.net", "tree", "--parents", "0,0,0", "--bandwidth", "2")
        report = json.loads(self.run_cli("report", star, "--json")[1])
        self.assertEqual((report["lower"], report["upper"]), ("2", "2"))
        self.assertEqual(report["lower_provenance"], "lp-colgen")
        with open(self.path("path3.net"), "w") as f:
            f.write("K 3\n0 1 2\n1 0 2\n1 2 1\n2 1 1\n")
        report = json.loads(self.run_cli("report", self.path("path3.net"), "--json")[1])
        self.assertEqual((report["lower"], report["lower_provenance"]), ("1", "lp-exhaustive"))

    def test_report_lower_above_upper_is_internal_error(self) -> None:
        network = self.gen("c4.net", "cycle", "--k", "4")
        broken = MagicMock()
        broken.compute.return_value = BoundResult(Fraction(5), "lp-colgen", None)
        with patch("run_analysis.cli.select_lower_bound", return_value=broken):
            code, _ = self.run_cli("report", network)
        self.assertEqual(code, EXIT_INTERNAL)

    def test_small_examples(self) -> None:
        cycle = self.gen("c4.net", "cycle", "--k", "4")
        self.assertTrue(self.run_cli("bounds", cycle)[1].startswith("upper=1 "))
        k3 = self.gen("k3.net", "complete", "--k", "3")
        self.assertTrue(self.run_cli("lp", k3, "--mode", "exhaustive")[1].startswith("lower=3/2 "))
        ring = self.gen("r3.net", "ring", "--k", "3")
        self.assertTrue(self.run_cli("lp", ring)[1].startswith("lower=3/2 "))
        with open(self.path("split.net"), "w") as f:
            f.write("K 3\n0 1 1\n1 0 1\n")
        self.assertTrue(self.run_cli("bounds", self.path("split.net"))[1].startswith("upper=0 "))
        self.assertTrue(self.run_cli("pack", "complete", "--k", "2")[1].startswith("# rate=1 "))

    def test_search(self) -> None:
        code, out = self.run_cli("search", "--count", "3", "--max-k", "4", "--seed", "1")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(out.startswith("seed=1 networks=3 "))

    # --- errors ---

    def test_io_and_parse_errors(self) -> None:
        code, _ = self.run_cli("bounds", self.path("missing.net"))
        self.assertEqual(code, EXIT_IO)
        with open(self.path("bad.net"), "w") as f:
            f.write("K 3\n0 1 1\n0 1 2\n")
        code, _ = self.run_cli("bounds", self.path("bad.net"))
        self.assertEqual(code, EXIT_IO)

    def test_usage_error(self) -> None:
        with patch("sys.stderr", new_callable=io.StringIO):
            with self.assertRaises(SystemExit) as cm:
                main(["bounds"])
        self.assertEqual(cm.exception.code, EXIT_USAGE)


if __name__ == '__main__':
    unittest.main()
