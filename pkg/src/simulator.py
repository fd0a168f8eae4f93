"""
Symbol-level replay of pipelined Reduce-then-Broadcast schedules over F_q.

A column schedule streams L sum instances through one MAC-BC column: instance
l's partial sums climb the mac tree one depth level per round, the root's
total then descends the bc tree one level per round, and each instance starts
one round after the previous one. Each phase is given K-1 rounds, so a column
schedule always takes N = 2(K-1) + L - 1 rounds.

Execution enforces the system model:
- capacity: per round, at most beta_ij symbols on link (i, j);
- causality: a node only emits its own input or values received in earlier
  rounds (checked on the schedule before any value is computed);
- decoding: every node ends with the exact sum of all inputs.

Time sharing over a packing runs D * lambda_z concurrent streams of each
column against the capacity D * beta.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.arborescence import MacBcColumn
from src.finite_field import PrimeField
from src.network import Network
from src.rate_lp import Packing

logger = logging.getLogger(__name__)


class SimulationError(Exception):
    """Protocol violation, pinned to a round and node."""

    def __init__(self, message: str, round: int, node: int):
        super().__init__(message)
        self.round = round
        self.node = node


class CapacityViolation(SimulationError):
    pass


class CausalityViolation(SimulationError):
    pass


class DecodeFailure(SimulationError):
    pass


PARTIAL = "partial"
TOTAL = "total"


@dataclass(frozen=True)
class PayloadDescriptor:
    """
    Names the stored value a sender emits. `partial` is the sum over the mac
    subtree of `origin` for one instance; `total` is the full sum.
    """
    kind: str
    instance: int
    stream: int = 0
    origin: Optional[int] = None

    def __str__(self) -> str:
        if self.kind == PARTIAL:
            return f"partial[v={self.origin},l={self.instance},s={self.stream}]"
        return f"total[l={self.instance},s={self.stream}]"


@dataclass(frozen=True)
class Transmission:
    round: int  # 1-based network use
    sender: int
    receiver: int
    payload: PayloadDescriptor
    symbols: int = 1


@dataclass(frozen=True)
class Schedule:
    node_count: int
    instances: int                      # L per stream
    roots: Tuple[int, ...]              # one per stream
    rounds: Tuple[Tuple[Transmission, ...], ...]

    @property
    def round_count(self) -> int:
        return len(self.rounds)

    @property
    def stream_count(self) -> int:
        return len(self.roots)

    def transmissions(self) -> List[Transmission]:
        return [t for batch in self.rounds for t in batch]

    def link_usage(self, round: int) -> Dict[Tuple[int, int], int]:
        usage: Dict[Tuple[int, int], int] = defaultdict(int)
        for t in self.rounds[round - 1]:
            usage[(t.sender, t.receiver)] += t.symbols
        return usage


@dataclass(frozen=True)
class Message:
    sender: int
    payload: PayloadDescriptor
    value: int


@dataclass(frozen=True)
class Transcript:
    """
    received[j][n - 1] is Y_j(n): every round-n message addressed to j.
    outputs[j] is node j's decoded vector over all stream instances.
    """
    schedule: Schedule
    field: PrimeField
    received: Tuple[Tuple[Tuple[Message, ...], ...], ...]
    outputs: np.ndarray
    expected: np.ndarray
    capacity_scale: int = 1

    @property
    def decoded(self) -> bool:
        return bool(np.array_equal(self.outputs, np.broadcast_to(self.expected, self.outputs.shape)))

    @property
    def total_instances(self) -> int:
        return self.schedule.instances * self.schedule.stream_count

    @property
    def network_uses(self) -> int:
        return self.schedule.round_count * self.capacity_scale

    @property
    def throughput(self) -> Fraction:
        """Sum instances per (unscaled) network use."""
        return Fraction(self.total_instances, self.network_uses)


def schedule_column(column: MacBcColumn, L: int, stream: int = 0) -> Schedule:
    """Pipelined schedule for L instances of one column."""
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}.")
    K = column.node_count
    mac_depth = column.mac.depths()
    bc_depth = column.bc.depths()
    N = 2 * (K - 1) + L - 1
    rounds: List[List[Transmission]] = [[] for _ in range(N)]
    for instance in range(L):
        for v in range(K):
            if v == column.root:
                continue
            # Depth K-1 sends first; depth 1 reaches the root in round instance + K - 1.
            up = instance + K - mac_depth[v]
            rounds[up - 1].append(Transmission(up, v, column.mac.parent[v],  # type: ignore[arg-type]
                                               PayloadDescriptor(PARTIAL, instance, stream, v)))
            down = instance + K - 1 + bc_depth[v]
            rounds[down - 1].append(Transmission(down, column.bc.parent[v], v,  # type: ignore[arg-type]
                                                 PayloadDescriptor(TOTAL, instance, stream)))
    return Schedule(K, L, (column.root,), tuple(tuple(batch) for batch in rounds))


def merge_schedules(schedules: Sequence[Schedule]) -> Schedule:
    """Runs schedules concurrently, renumbering their streams consecutively."""
    if not schedules:
        raise ValueError("Nothing to merge.")
    K, L = schedules[0].node_count, schedules[0].instances
    if any(s.node_count != K or s.instances != L for s in schedules):
        raise ValueError("Merged schedules must share node count and instance count.")
    N = max(s.round_count for s in schedules)
    rounds: List[List[Transmission]] = [[] for _ in range(N)]
    roots: List[int] = []
    for schedule in schedules:
        offset = len(roots)
        roots.extend(schedule.roots)
        for t in schedule.transmissions():
            payload = PayloadDescriptor(t.payload.kind, t.payload.instance, t.payload.stream + offset,
                                        t.payload.origin)
            rounds[t.round - 1].append(Transmission(t.round, t.sender, t.receiver, payload, t.symbols))
    return Schedule(K, L, tuple(roots), tuple(tuple(batch) for batch in rounds))


def check_capacity(network: Network, schedule: Schedule, scale: int = 1) -> None:
    for n in range(1, schedule.round_count + 1):
        for (i, j), used in sorted(schedule.link_usage(n).items()):
            allowed = scale * network.beta(i, j)
            if used > allowed:
                raise CapacityViolation(f"Round {n}: link {i}->{j} carries {used} symbols, capacity {allowed}.",
                                        round=n, node=i)


def check_causality(schedule: Schedule) -> None:
    """Every payload is computable from the sender's input and strictly earlier receptions."""
    partial_rounds: Dict[Tuple[int, int, int], List[int]] = defaultdict(list)
    total_rounds: Dict[Tuple[int, int, int], List[int]] = defaultdict(list)
    for t in schedule.transmissions():
        key = (t.receiver, t.payload.instance, t.payload.stream)
        (partial_rounds if t.payload.kind == PARTIAL else total_rounds)[key].append(t.round)
    for t in schedule.transmissions():
        p, u, n = t.payload, t.sender, t.round
        key = (u, p.instance, p.stream)
        if p.kind == PARTIAL:
            if p.origin != u:
                raise CausalityViolation(f"Round {n}: node {u} emits the partial sum of node {p.origin}.",
                                         round=n, node=u)
            needs_partials = True
        elif p.kind == TOTAL:
            needs_partials = u == schedule.roots[p.stream]
            if not needs_partials and not any(r < n for r in total_rounds[key]):
                raise CausalityViolation(f"Round {n}: node {u} forwards {p} before receiving it.", round=n, node=u)
        else:
            raise CausalityViolation(f"Round {n}: unknown payload kind '{p.kind}'.", round=n, node=u)
        if needs_partials and any(r >= n for r in partial_rounds[key]):
            raise CausalityViolation(f"Round {n}: node {u} emits {p} before all subtree sums arrive.",
                                     round=n, node=u)


def execute(network: Network, schedule: Schedule, inputs: np.ndarray, field: PrimeField,
            capacity_scale: int = 1) -> Transcript:
    """
    Replays the schedule on inputs of shape (K, streams * L); stream s handles
    input columns s*L .. s*L + L - 1.

    Raises:
        CapacityViolation, CausalityViolation, DecodeFailure
    """
    K, L, S = schedule.node_count, schedule.instances, schedule.stream_count
    inputs = field.check(np.asarray(inputs, dtype=np.int64))
    if network.node_count != K or inputs.shape != (K, S * L):
        raise ValueError(f"Expected inputs of shape {(K, S * L)} on a {K}-node network, got {inputs.shape}.")
    check_capacity(network, schedule, capacity_scale)
    check_causality(schedule)

    q = field.q
    accumulated: Dict[Tuple[int, int, int], int] = defaultdict(int)  # subtree sums received
    totals: Dict[Tuple[int, int, int], int] = {}
    received: List[List[List[Message]]] = [[[] for _ in range(schedule.round_count)] for _ in range(K)]

    def own_sum(u: int, instance: int, stream: int) -> int:
        return (int(inputs[u, stream * L + instance]) + accumulated[(u, instance, stream)]) % q

    for n, batch in enumerate(schedule.rounds, start=1):
        # All values are taken from the state before this round's deliveries.
        outgoing = []
        for t in batch:
            p = t.payload
            if p.kind == TOTAL and t.sender != schedule.roots[p.stream]:
                value = totals[(t.sender, p.instance, p.stream)]
            else:
                value = own_sum(t.sender, p.instance, p.stream)
            outgoing.append((t, value))
        for t, value in outgoing:
            key = (t.receiver, t.payload.instance, t.payload.stream)
            if t.payload.kind == PARTIAL:
                accumulated[key] = (accumulated[key] + value) % q
            else:
                totals[key] = value
            received[t.receiver][n - 1].append(Message(t.sender, t.payload, value))

    expected = field.sum(inputs)
    outputs = np.zeros((K, S * L), dtype=np.int64)
    for u in range(K):
        for s, root in enumerate(schedule.roots):
            for instance in range(L):
                if u == root:
                    value: Optional[int] = own_sum(u, instance, s)
                else:
                    value = totals.get((u, instance, s))
                if value is None or value != expected[s * L + instance]:
                    msg = (f"Node {u} failed to decode instance {instance} of stream {s}: "
                           f"got {value}, expected {expected[s * L + instance]}.")
                    logger.error(msg)
                    raise DecodeFailure(msg, round=schedule.round_count, node=u)
                outputs[u, s * L + instance] = value
    transcript = Transcript(schedule, field,
                            tuple(tuple(tuple(msgs) for msgs in per_node) for per_node in received),
                            outputs, expected, capacity_scale)
    logger.debug(f"Executed {schedule.round_count} rounds, {S} stream(s), all {K} nodes decoded")
    return transcript


def measured_rate(schedule: Schedule, L: int) -> Fraction:
    """L / N for one stream."""
    return Fraction(L, schedule.round_count)


def random_inputs(K: int, L: int, field: PrimeField, rng: np.random.Generator) -> np.ndarray:
    """K input vectors of length L with uniform symbols, as a (K, L) array."""
    if K < 1 or L < 1:
        raise ValueError(f"Need K >= 1 and L >= 1, got K={K}, L={L}.")
    return np.stack([field.random(L, rng) for _ in range(K)])


def packing_scale(packing: Packing) -> int:
    """Least common multiple of the nonzero weight denominators."""
    return lcm(*[w.denominator for w in packing.weights if w], 1)


@dataclass(frozen=True)
class PackingRun:
    transcript: Transcript
    scale: int
    streams_per_column: Tuple[int, ...]
    packing_rate: Fraction

    @property
    def throughput(self) -> Fraction:
        return self.transcript.throughput


def execute_packing(network: Network, packing: Packing, L: int, field: PrimeField,
                    rng: np.random.Generator, scale: Optional[int] = None) -> PackingRun:
    """
    Time-shares the packing: D * lambda_z streams of column z against capacity D * beta.

    Raises:
        ValueError: some D * lambda_z is not an integer, or the packing is empty.
        CapacityViolation: the packing does not fit (never for a feasible packing).
    """
    D = packing_scale(packing) if scale is None else scale
    counts = []
    for weight in packing.weights:
        streams = weight * D
        if streams.denominator != 1:
            raise ValueError(f"Scale {D} does not clear weight {weight}.")
        counts.append(int(streams))
    schedules = [schedule_column(column, L)
                 for column, count in zip(packing.columns, counts) for _ in range(count)]
    if not schedules:
        raise ValueError("Packing has no positive weight; nothing to execute.")
    schedule = merge_schedules(schedules)
    inputs = random_inputs(network.node_count, schedule.stream_count * L, field, rng)
    transcript = execute(network, schedule, inputs, field, capacity_scale=D)
    logger.info(f"Packing executed: {schedule.stream_count} streams at scale {D}, "
                f"throughput {transcript.throughput} (packing rate {packing.rate})")
    return PackingRun(transcript, D, tuple(counts), packing.rate)


def transcript_dump(transcript: Transcript) -> str:
    """One line per transmission, then the decode verdict and rate."""
    lines = []
    for n, batch in enumerate(transcript.schedule.rounds, start=1):
        for t in sorted(batch, key=lambda t: (t.sender, t.receiver, t.payload.stream, t.payload.instance)):
            lines.append(f"n={n} {t.sender}->{t.receiver} len={t.symbols} desc={t.payload}")
    verdict = "ok" if transcript.decoded else "failed"
    lines.append(f"decoded={verdict} rate={transcript.total_instances}/{transcript.network_uses}")
    return "\n".join(lines) + "\n"
