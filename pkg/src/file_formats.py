"""
Text formats for networks and packings.

Network file:
    # comment
    K 3
    0 1 2
    1 2 3

Packing file (the same `K` header, then one column per line):
    root=0 mac=-,0,0 bc=-,0,0 weight=1/2

Parent lists give each node's parent in node order, with `-` at the root.
"""

import logging
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple, Union

from src.arborescence import Arborescence, MacBcColumn, Orientation, make_column
from src.network import Network, NetworkError, make_network
from src.rate_lp import Packing

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class NetworkFormatError(NetworkError):
    """Malformed network or packing text; `line` is 1-based (0 when not line-specific)."""

    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


def _content_lines(text: str) -> List[Tuple[int, str]]:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if content:
            lines.append((number, content))
    return lines


def _parse_header(lines: List[Tuple[int, str]]) -> int:
    if not lines:
        raise NetworkFormatError("missing 'K <n>' header")
    number, content = lines[0]
    parts = content.split()
    if len(parts) != 2 or parts[0] != "K":
        raise NetworkFormatError(f"expected 'K <n>', got '{content}'", number)
    try:
        K = int(parts[1])
    except ValueError:
        raise NetworkFormatError(f"node count '{parts[1]}' is not an integer", number) from None
    if K < 2:
        raise NetworkFormatError(f"node count must be >= 2, got {K}", number)
    return K


def parse_network(text: str) -> Network:
    lines = _content_lines(text)
    K = _parse_header(lines)
    edges = []
    seen = set()
    for number, content in lines[1:]:
        parts = content.split()
        if len(parts) != 3:
            raise NetworkFormatError(f"expected '<from> <to> <beta>', got '{content}'", number)
        try:
            i, j, beta = (int(p) for p in parts)
        except ValueError:
            raise NetworkFormatError(f"non-integer field in '{content}'", number) from None
        try:
            make_network(K, [(i, j, beta)])
        except NetworkError as e:
            raise NetworkFormatError(str(e), number) from e
        if (i, j) in seen:
            raise NetworkFormatError(f"duplicate link {i}->{j}", number)
        seen.add((i, j))
        edges.append((i, j, beta))
    return make_network(K, edges)


def serialize_network(network: Network, comment: Optional[str] = None) -> str:
    """Links with positive bandwidth, sorted by (from, to)."""
    if not network.is_integral():
        raise NetworkFormatError("network has non-integer bandwidths and cannot be written")
    lines = [f"# {comment}"] if comment else []
    lines.append(f"K {network.node_count}")
    lines.extend(f"{i} {j} {network.beta(i, j)}" for i, j in network.support())
    return "\n".join(lines) + "\n"


def read_network(path: PathLike) -> Network:
    text = Path(path).read_text()
    network = parse_network(text)
    logger.debug(f"Read {network.describe()} from {path}")
    return network


def write_network(network: Network, path: PathLike, comment: Optional[str] = None) -> None:
    Path(path).write_text(serialize_network(network, comment))
    logger.info(f"Wrote network file {path}")


def _format_parents(tree: Arborescence) -> str:
    return ",".join("-" if p is None else str(p) for p in tree.parent)


def _parse_parents(value: str, K: int, number: int) -> Tuple[Optional[int], ...]:
    items = value.split(",")
    if len(items) != K:
        raise NetworkFormatError(f"parent list '{value}' has {len(items)} entries, expected {K}", number)
    try:
        return tuple(None if item == "-" else int(item) for item in items)
    except ValueError:
        raise NetworkFormatError(f"bad parent list '{value}'", number) from None


def _format_weight(weight: Fraction) -> str:
    return f"{weight.numerator}/{weight.denominator}"


def serialize_packing(packing: Packing, comment: Optional[str] = None) -> str:
    lines = [f"# {comment}"] if comment else []
    lines.append(f"K {packing.node_count}")
    for column, weight in zip(packing.columns, packing.weights):
        lines.append(f"root={column.root} mac={_format_parents(column.mac)} "
                     f"bc={_format_parents(column.bc)} weight={_format_weight(weight)}")
    return "\n".join(lines) + "\n"


def parse_packing(text: str) -> Packing:
    lines = _content_lines(text)
    K = _parse_header(lines)
    columns: List[MacBcColumn] = []
    weights: List[Fraction] = []
    for number, content in lines[1:]:
        try:
            fields = dict(part.split("=", 1) for part in content.split())
        except ValueError:
            raise NetworkFormatError(f"expected key=value fields, got '{content}'", number) from None
        if set(fields) != {"root", "mac", "bc", "weight"}:
            raise NetworkFormatError(f"expected root, mac, bc and weight fields, got '{content}'", number)
        try:
            root = int(fields["root"])
            weight = Fraction(fields["weight"])
        except (ValueError, ZeroDivisionError):
            raise NetworkFormatError(f"bad root or weight in '{content}'", number) from None
        try:
            mac = Arborescence(root, Orientation.IN, _parse_parents(fields["mac"], K, number))
            bc = Arborescence(root, Orientation.OUT, _parse_parents(fields["bc"], K, number))
            columns.append(make_column(mac, bc))
        except NetworkFormatError:
            raise
        except ValueError as e:
            raise NetworkFormatError(str(e), number) from e
        if weight < 0:
            raise NetworkFormatError(f"negative weight {weight}", number)
        weights.append(weight)
    return Packing(K, tuple(columns), tuple(weights))


def read_packing(path: PathLike) -> Packing:
    return parse_packing(Path(path).read_text())


def write_packing(packing: Packing, path: PathLike) -> None:
    Path(path).write_text(serialize_packing(packing))
    logger.info(f"Wrote packing file {path} ({len(packing)} columns, rate {packing.rate})")
