"""
Command-line front end: generate networks, compute bounds, solve the packing
LP, emit closed-form packings, simulate schemes and print reports.

Usage (from the project root):
    python -m run_analysis.cli gen hypercube --dim 3 -o cube3.net
    python -m run_analysis.cli bounds cube3.net --method both
    python -m run_analysis.cli lp cube3.net --mode colgen
    python -m run_analysis.cli pack cycle --k 5
    python -m run_analysis.cli simulate k4.net k4.pack --L 64 --q 257 --seed 7
    python -m run_analysis.cli report cube3.net --json
    python -m run_analysis.cli search --count 200 --max-k 6

Exit codes: 0 ok, 1 usage, 2 I/O or parse error, 3 verification or
simulation failure, 4 internal invariant breach.
"""

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from numbers import Rational
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

# --- Add project root to path ---
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from src.arborescence import EnumerationLimitError
from src.config import get_settings
from src.cut_bound import BruteForceCutBound, MaxFlowCutBound, cutset_bound_bruteforce, cutset_bound_maxflow
from src.file_formats import (NetworkFormatError, read_network, read_packing, serialize_network,
                              serialize_packing, write_network, write_packing)
from src.finite_field import FieldError, PrimeField
from src.interfaces import ILowerBound, IUpperBound
from src.network import Network, NetworkError, node_label
from src.notifications import Notifier
from src.rate_lp import (ColumnGenerationError, ColumnGenerationLpBound, ExhaustiveLpBound, bandwidth_cap,
                         lp_solve)
from src.schemes import CLOSED_FORMS, ClosedFormBound, closed_form_packing
from src.simulator import SimulationError, execute_packing, transcript_dump
from src.topologies import TOPOLOGY_GENERATORS, gen_random, generate, hypercube_dimension
from src.verification import VerificationError, VerificationManager, gap_within_two

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VERIFICATION = 3
EXIT_INTERNAL = 4


class _Parser(argparse.ArgumentParser):
    """argparse with the usage exit code."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(value: Rational) -> str:
    """Exact 'p/q' (or integer) string."""
    return str(Fraction(value))


def fmt_human(value: Optional[Rational]) -> str:
    if value is None:
        return "n/a"
    return f"{fmt(value)} (~{float(value):.4f})"


def emit_json(document: Dict[str, Any]) -> None:
    print(json.dumps(document, sort_keys=True, indent=2))


def select_upper_bound(network: Network) -> IUpperBound:
    """Brute force up to the configured node count, max-flow above."""
    if network.node_count <= get_settings().bruteforce_max_k:
        return BruteForceCutBound()
    return MaxFlowCutBound()


def select_lower_bound(network: Network, prefer_closed_form: bool = True) -> ILowerBound:
    """Closed form when the topology is recognized; otherwise the LP (exhaustive for K <= 3)."""
    closed_form = ClosedFormBound.recognize(network) if prefer_closed_form else None
    if closed_form is not None:
        return closed_form
    if network.node_count <= 3:
        return ExhaustiveLpBound()
    return ColumnGenerationLpBound()


def display_labels(network: Network, nodes: Sequence[int]) -> str:
    """1-based labels, or bit-strings on a hypercube, for human-facing output."""
    bits = hypercube_dimension(network) or 0
    return "{" + ",".join(node_label(v, bits) for v in nodes) + "}"


def network_report(network: Network, prefer_closed_form: bool = True) -> Dict[str, Any]:
    """
    Lower / upper / gap summary of one network with exact values as strings.

    With `prefer_closed_form` off, the lower bound always comes from the LP.
    """
    verifier = VerificationManager()
    upper = select_upper_bound(network).compute(network)
    lower = select_lower_bound(network, prefer_closed_form).compute(network)
    verifier.check_bounds_consistent(lower.value, upper.value)
    packing = lower.witness
    if lower.value > 0:
        verifier.check_packing_feasible(network, packing)
    gap = Fraction(upper.value) / lower.value if lower.value else None
    return {
        "network": network.describe(),
        "K": network.node_count,
        "total_bandwidth": fmt(network.total_bandwidth()),
        "upper": fmt(upper.value),
        "upper_provenance": upper.provenance,
        "cut": list(upper.witness.subset),
        "lower": fmt(lower.value),
        "lower_provenance": lower.provenance,
        "columns": len(packing.nonzero()) if packing is not None else 0,
        "cap": fmt(bandwidth_cap(network)),
        "gap": fmt(gap) if gap is not None else None,
        "within_two": gap_within_two(lower.value, upper.value) if lower.value else None,
    }


# --- Subcommands ---

def _topology_params(args: argparse.Namespace) -> Dict[str, Any]:
    params: Dict[str, Any] = {"k": args.k, "a": args.a, "b": args.b, "c": args.c, "dim": args.dim}
    if getattr(args, "parents", None) is not None:
        try:
            parents = [int(p) for p in args.parents.split(",")]
        except ValueError:
            raise NetworkError(f"--parents must be comma-separated integers, got '{args.parents}'.") from None
        params["parents"] = {node: parent for node, parent in enumerate(parents, start=1)}
        params["bandwidth"] = args.bandwidth
        if args.bandwidths is not None:
            try:
                values = [int(b) for b in args.bandwidths.split(",")]
            except ValueError:
                raise NetworkError(f"--bandwidths must be comma-separated integers, got '{args.bandwidths}'.") from None
            if len(values) != len(parents):
                raise NetworkError(f"--bandwidths has {len(values)} entries, --parents has {len(parents)}.")
            params["bandwidth"] = {node: beta for node, beta in enumerate(values, start=1)}
    return params


def cmd_gen(args: argparse.Namespace) -> int:
    network = generate(args.topology, **_topology_params(args))
    comment = f"{args.topology} {network.describe()}"
    if args.out:
        write_network(network, args.out, comment)
    else:
        sys.stdout.write(serialize_network(network, comment))
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    network = read_network(args.network)
    if args.method == "brute":
        cut = cutset_bound_bruteforce(network)
    elif args.method == "flow":
        cut = cutset_bound_maxflow(network)
    else:
        cut = cutset_bound_bruteforce(network)
        VerificationManager().check_oracle_match("cut-set bound", cut.value, cutset_bound_maxflow(network).value)
    if args.json:
        emit_json({"upper": fmt(cut.value), "cut": list(cut.subset), "method": args.method})
    else:
        print(f"upper={fmt(cut.value)} cut={cut.label()} labels={display_labels(network, cut.subset)}")
    return EXIT_OK


def cmd_lp(args: argparse.Namespace) -> int:
    network = read_network(args.network)
    solution = lp_solve(network, method=args.mode, force=args.force)
    if solution.value > 0:
        VerificationManager().check_packing_feasible(network, solution.primal)
    if args.emit_packing:
        write_packing(solution.primal, args.emit_packing)
    if args.json:
        emit_json({"lower": fmt(solution.value), "method": solution.method,
                   "columns": solution.columns_considered, "iterations": solution.iterations,
                   "support": len(solution.primal)})
    else:
        print(f"lower={fmt(solution.value)} columns={solution.columns_considered} support={len(solution.primal)}")
    return EXIT_OK


def cmd_pack(args: argparse.Namespace) -> int:
    network, packing = closed_form_packing(args.topology, **_topology_params(args))
    verifier = VerificationManager()
    verifier.check_packing_feasible(network, packing)
    cap_tight = packing.rate == bandwidth_cap(network)
    if args.topology != "cyc3":
        verifier.check_cap_tight(network, packing)
    summary = f"rate={fmt(packing.rate)} columns={len(packing)} feasible=yes cap_tight={'yes' if cap_tight else 'no'}"
    if args.out:
        write_packing(packing, args.out)
    if args.json:
        emit_json({"rate": fmt(packing.rate), "columns": len(packing), "feasible": True,
                   "cap_tight": cap_tight, "network": network.describe(),
                   "packing": None if args.out else serialize_packing(packing)})
    elif args.out:
        print(summary)
    else:
        sys.stdout.write(serialize_packing(packing, comment=summary))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    settings = get_settings()
    q = args.q if args.q is not None else settings.default_q
    seed = args.seed if args.seed is not None else settings.default_seed
    field = PrimeField(q)
    network = read_network(args.network)
    packing = read_packing(args.packing)
    VerificationManager().check_packing_feasible(network, packing)
    rng = np.random.default_rng(seed)
    run = execute_packing(network, packing, args.L, field, rng)
    transcript = run.transcript
    if args.dump:
        with open(args.dump, "w") as f:
            f.write(transcript_dump(transcript))
    if args.json:
        emit_json({"decoded": transcript.decoded, "rate": fmt(run.throughput), "packing_rate": fmt(run.packing_rate),
                   "scale": run.scale, "rounds": transcript.schedule.round_count, "L": args.L, "q": q,
                   "seed": seed, "generator": "PCG64"})
    else:
        print(f"seed={seed} generator=PCG64 q={q} L={args.L} scale={run.scale}")
        print(f"decoded={'ok' if transcript.decoded else 'failed'} rate={fmt(run.throughput)} "
              f"packing_rate={fmt(run.packing_rate)}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    network = read_network(args.network)
    row = network_report(network)
    if args.json:
        emit_json(row)
        return EXIT_OK
    lower, upper = Fraction(row["lower"]), Fraction(row["upper"])
    table = pd.DataFrame([
        {"Quantity": "Lower bound", "Value": fmt_human(lower), "Source": row["lower_provenance"]},
        {"Quantity": "Upper bound", "Value": fmt_human(upper),
         "Source": f"{row['upper_provenance']} S={display_labels(network, row['cut'])}"},
        {"Quantity": "Gap (upper/lower)", "Value": fmt_human(Fraction(row["gap"]) if row["gap"] else None),
         "Source": "within 2" if row["within_two"] else "-"},
        {"Quantity": "Bandwidth cap", "Value": fmt_human(Fraction(row["cap"])), "Source": "sum(beta)/2(K-1)"},
    ])
    print(f"# {row['network']}\n")
    print(table.to_markdown(index=False))
    return EXIT_OK


def run_search(count: int, max_k: int, max_bandwidth: int, seed: int,
               notifier: Optional[Notifier] = None) -> List[Dict[str, Any]]:
    """
    Random strongly connected networks (3 <= K <= max_k); ratios above 2 are
    recorded as findings and never fail the run.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for index in range(count):
        K = int(rng.integers(3, max_k + 1))
        network = gen_random(K, max_bandwidth, rng, strongly_connected=True)
        row = network_report(network)
        row["index"] = index
        if row["within_two"] is False:
            logger.warning(f"Gap above 2 on {row['network']}: {row['gap']}")
            if notifier is not None:
                notifier.report_finding(row["network"], Fraction(row["lower"]), Fraction(row["upper"]))
        rows.append(row)
    return rows


def cmd_search(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else get_settings().default_seed
    notifier = Notifier() if args.notify else None
    if notifier is not None and not notifier.enabled:
        logger.warning("--notify given but DISCORD_WEBHOOK_URL is not set; findings are only logged.")
    rows = run_search(args.count, args.max_k, args.max_bandwidth, seed, notifier)
    findings = [row for row in rows if row["within_two"] is False]
    max_gap = max(Fraction(row["gap"]) for row in rows) if rows else Fraction(0)
    if args.json:
        emit_json({"seed": seed, "networks": len(rows), "findings": findings, "max_gap": fmt(max_gap)})
    else:
        print(f"seed={seed} networks={len(rows)} findings={len(findings)} max_gap={fmt(max_gap)}")
    return EXIT_OK


# --- Parser ---

def _add_topology_args(parser: argparse.ArgumentParser, choices: Sequence[str]) -> None:
    parser.add_argument('topology', choices=list(choices), help='Topology name.')
    parser.add_argument('--k', type=int, default=None, help='Node count (complete, cycle, ring).')
    parser.add_argument('--a', type=int, default=None, help='Bandwidth of link 0->1 (cyc3).')
    parser.add_argument('--b', type=int, default=None, help='Bandwidth of link 1->2 (cyc3).')
    parser.add_argument('--c', type=int, default=None, help='Bandwidth of link 2->0 (cyc3).')
    parser.add_argument('--dim', type=int, default=None, help='Hypercube dimension U.')
    parser.add_argument('-o', '--out', type=str, default=None, help='Output file (default: stdout).')


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="allreduce", description="Bounds and schemes for All-Reduce over parallel-link networks.")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('gen', help='Write a network file for a named topology.')
    _add_topology_args(p, TOPOLOGY_GENERATORS)
    p.add_argument('--parents', type=str, default=None,
                   help='Tree only: comma-separated parents of nodes 1..K-1 (node 0 is the root).')
    p.add_argument('--bandwidth', type=int, default=1, help='Tree only: bandwidth of every tree edge.')
    p.add_argument('--bandwidths', type=str, default=None,
                   help='Tree only: comma-separated bandwidths of the edges above nodes 1..K-1 (overrides --bandwidth).')
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser('bounds', help='Cut-set upper bound.')
    p.add_argument('network', help='Network file.')
    p.add_argument('--method', choices=['brute', 'flow', 'both'], default='both')
    p.add_argument('--json', action='store_true')
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser('lp', help='Tree-packing LP lower bound.')
    p.add_argument('network', help='Network file.')
    p.add_argument('--mode', choices=['exhaustive', 'colgen'], default='colgen')
    p.add_argument('--force', action='store_true', help='Allow exhaustive LP above the size limit.')
    p.add_argument('--emit-packing', type=str, default=None, help='Write the optimal packing to this file.')
    p.add_argument('--json', action='store_true')
    p.set_defaults(func=cmd_lp)

    p = sub.add_parser('pack', help='Closed-form packing for a named topology.')
    _add_topology_args(p, CLOSED_FORMS)
    p.add_argument('--json', action='store_true')
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser('simulate', help='Execute a packing symbol by symbol over F_q.')
    p.add_argument('network', help='Network file.')
    p.add_argument('packing', help='Packing file.')
    p.add_argument('--L', type=int, default=64, help='Sum instances per stream.')
    p.add_argument('--q', type=int, default=None, help='Prime field size.')
    p.add_argument('--seed', type=int, default=None, help='Seed for the PCG64 input generator.')
    p.add_argument('--dump', type=str, default=None, help='Write the transcript dump to this file.')
    p.add_argument('--json', action='store_true')
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser('report', help='Lower / upper / gap table.')
    p.add_argument('network', help='Network file.')
    p.add_argument('--json', action='store_true')
    p.set_defaults(func=cmd_report)

    p = sub.add_parser('search', help='Random search for gap-conjecture counterexamples.')
    p.add_argument('--count', type=int, default=200)
    p.add_argument('--max-k', type=int, default=6)
    p.add_argument('--max-bandwidth', type=int, default=4)
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--notify', action='store_true', help='Post findings to the Discord webhook.')
    p.add_argument('--json', action='store_true')
    p.set_defaults(func=cmd_search)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    settings = get_settings()
    logging.basicConfig(level=settings.log_level, format='%(asctime)s - %(levelname)s - %(message)s',
                        stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NetworkFormatError as e:
        logger.error(f"Parse error: {e}")
        return EXIT_IO
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO
    except (VerificationError, SimulationError) as e:
        logger.critical(f"{type(e).__name__}: {e}")
        if settings.discord_webhook_url:
            Notifier(settings.discord_webhook_url).report_failure(f"allreduce {args.command}", e)
        return EXIT_VERIFICATION
    except (NetworkError, FieldError, EnumerationLimitError, ValueError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE
    except (AssertionError, ColumnGenerationError) as e:
        logger.critical(f"Internal invariant breach: {type(e).__name__}: {e}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
