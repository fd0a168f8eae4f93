import argparse
import logging
import os
import sys
import time
from datetime import datetime
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

# --- Add project root to path ---
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from run_analysis.cli import network_report
from src.config import get_settings
from src.network import Network
from src.notifications import Notifier
from src.topologies import gen_bidirected_tree, gen_random, generate, random_parent_map

logger = logging.getLogger(__name__)

# Named topologies swept by the benchmark, with the closed-form (upper, lower).
CLOSED_FORM_CASES: List[Tuple[str, Dict[str, Any], Fraction, Fraction]] = (
    [("complete", {"k": K}, Fraction(K - 1), Fraction(K, 2)) for K in range(2, 9)]
    + [("cycle", {"k": K}, Fraction(1), Fraction(K, 2 * (K - 1))) for K in range(3, 9)]
    + [("ring", {"k": K}, Fraction(2), Fraction(K, K - 1)) for K in range(3, 9)]
    + [("hypercube", {"dim": U}, Fraction(U), Fraction(2 ** (U - 1) * U, 2 ** U - 1)) for U in range(1, 4)]
)


def three_cycle_cases(limit: int = 4) -> List[Tuple[str, Dict[str, Any], Fraction, Fraction]]:
    cases = []
    for a in range(1, limit + 1):
        for b in range(1, limit + 1):
            for c in range(1, limit + 1):
                smallest, quarter = Fraction(min(a, b, c)), Fraction(a + b + c, 4)
                lower = smallest if smallest <= quarter else quarter
                cases.append(("cyc3", {"a": a, "b": b, "c": c}, smallest, lower))
    return cases


def tree_cases(count: int, rng: np.random.Generator) -> List[Tuple[Network, Fraction]]:
    """Random bi-directed trees; R* is the smallest edge bandwidth."""
    cases = []
    for _ in range(count):
        K = int(rng.integers(2, 9))
        parents = random_parent_map(K, rng)
        bandwidths = {child: int(rng.integers(1, 6)) for child in parents}
        cases.append((gen_bidirected_tree(parents, bandwidths), Fraction(min(bandwidths.values()))))
    return cases


def _row(name: str, network: Network, expected: Optional[Tuple[Fraction, Fraction]]) -> Dict[str, Any]:
    start = time.perf_counter()
    report = network_report(network, prefer_closed_form=False)
    row = {
        "Network": name,
        "K": report["K"],
        "Sum beta": report["total_bandwidth"],
        "Upper": report["upper"],
        "Lower": report["lower"],
        "Lower source": report["lower_provenance"],
        "Gap": report["gap"] if report["gap"] is not None else "n/a",
        "Cap": report["cap"],
        "Upper <= 2 Lower": report["within_two"],
        "Seconds": round(time.perf_counter() - start, 3),
    }
    if expected is not None:
        upper, lower = expected
        row["Matches closed form"] = Fraction(report["upper"]) == upper and Fraction(report["lower"]) == lower
    return row


def run_benchmark(random_count: int = 200, max_k: int = 6, seed: Optional[int] = None,
                  report_dir: Optional[str] = None, timestamped: bool = True,
                  notifier: Optional[Notifier] = None) -> str:
    """
    Sweeps every named topology and a batch of random strongly connected
    networks, then writes a markdown report. Returns the report path.
    """
    settings = get_settings()
    seed = settings.default_seed if seed is None else seed
    rng = np.random.default_rng(seed)
    named_rows = []
    for topology, params, upper, lower in CLOSED_FORM_CASES + three_cycle_cases():
        label = f"{topology}({', '.join(f'{k}={v}' for k, v in params.items())})"
        named_rows.append(_row(label, generate(topology, **params), (upper, lower)))
    for index, (network, rate) in enumerate(tree_cases(5, rng)):
        named_rows.append(_row(f"tree#{index} {network.describe()}", network, (rate, rate)))

    random_rows = []
    for index in range(random_count):
        K = int(rng.integers(3, max_k + 1))
        network = gen_random(K, 4, rng, strongly_connected=True)
        row = _row(f"random#{index}", network, None)
        if row["Upper <= 2 Lower"] is False and notifier is not None:
            notifier.report_finding(network.describe(), Fraction(row["Lower"]), Fraction(row["Upper"]))
        random_rows.append(row)

    named_df = pd.DataFrame(named_rows)
    random_df = pd.DataFrame(random_rows)
    mismatches = named_df[~named_df["Matches closed form"]]
    if not mismatches.empty and notifier is not None:
        notifier.report_failure("benchmark", ValueError(f"{len(mismatches)} closed-form mismatches"))

    output_dir = report_dir or settings.report_dir
    os.makedirs(output_dir, exist_ok=True)
    suffix = f"_{datetime.now().strftime('%Y%m%d_%H%M%S')}" if timestamped else ""
    report_path = os.path.join(output_dir, f"bounds_benchmark{suffix}.md")

    with open(report_path, "w") as f:
        f.write("# All-Reduce Bounds Benchmark\n\n")
        if timestamped:
            f.write(f"**Generated:** {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n\n")
        f.write(f"**Seed:** {seed} (PCG64)\n\n")
        f.write("## Closed-form topologies\n\n")
        f.write(f"Mismatches against closed forms: **{len(mismatches)}**\n\n")
        f.write(named_df.to_markdown(index=False))
        f.write("\n\n## Random strongly connected networks\n\n")
        findings = int((random_df["Upper <= 2 Lower"] == False).sum()) if not random_df.empty else 0  # noqa: E712
        f.write(f"Networks with upper > 2 * lower: **{findings}**\n\n")
        if not random_df.empty:
            f.write(random_df.to_markdown(index=False))
        f.write("\n")

    logger.info(f"Benchmark report saved to {report_path}")
    return report_path


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Sweep closed-form topologies and random networks.")
    parser.add_argument('--random', type=int, default=200, help='Number of random networks.')
    parser.add_argument('--max-k', type=int, default=6, help='Largest random node count.')
    parser.add_argument('--seed', type=int, default=None, help='PCG64 seed.')
    parser.add_argument('--out-dir', type=str, default=None, help='Report directory.')
    parser.add_argument('--no-timestamp', action='store_true', help='Write bounds_benchmark.md.')
    parser.add_argument('--notify', action='store_true', help='Post findings and failures to Discord.')
    args = parser.parse_args()
    logging.basicConfig(level=get_settings().log_level, format='%(asctime)s - %(levelname)s - %(message)s')
    path = run_benchmark(args.random, args.max_k, args.seed, args.out_dir, not args.no_timestamp,
                         Notifier() if args.notify else None)
    print(f"Benchmark report saved to {path}")
