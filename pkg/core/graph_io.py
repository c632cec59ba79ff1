"""
Edge-list text format and generator mini-grammar

File format (UTF-8, line oriented):
    # comment
    N <vertex_count>
    E <i> <j> <J>
"""

import logging
import os
import re
from pathlib import Path
from typing import List, Optional, Tuple

from core.errors import (
    DuplicateEdge, FerroError, GraphFormatError, IndexOutOfRange, InvalidParameter,
    NonPositiveCoupling, SelfLoop,
)
from core.graph import CouplingGraph, CouplingRule, build, generate

logger = logging.getLogger(__name__)

MAX_FILE_SIZE_MB = 50


def validate_file(file_path: str) -> None:
    """Validate a graph file before reading it."""
    if not os.path.exists(file_path):
        raise GraphFormatError("file not found", source=str(file_path))
    if not os.path.isfile(file_path):
        raise GraphFormatError("not a regular file", source=str(file_path))

    file_size_mb = os.path.getsize(file_path) / (1024 * 1024)
    if file_size_mb > MAX_FILE_SIZE_MB:
        raise GraphFormatError(f"file too large: {file_size_mb:.1f}MB (max: {MAX_FILE_SIZE_MB}MB)",
                               source=str(file_path))


def read_graph_text(file_path: str) -> str:
    """Read a graph file as UTF-8 (a BOM is tolerated)."""
    validate_file(file_path)
    try:
        with open(file_path, 'r', encoding='utf-8-sig') as f:
            return f.read()
    except UnicodeDecodeError as e:
        raise GraphFormatError(f"not valid UTF-8: {e}", source=str(file_path))
    except OSError as e:
        raise GraphFormatError(f"could not read file: {e}", source=str(file_path))


def parse_edge_list(text: str, source: str = "<text>") -> CouplingGraph:
    """Parse the edge-list format and validate the graph.

    Per-edge problems (bad numbers, self-loops, duplicates, non-positive
    couplings, out-of-range vertices) are reported with their line number;
    whole-graph problems such as disconnection name the source.
    """
    vertex_count: Optional[int] = None
    header_line = None
    edges: List[Tuple[int, int, float]] = []
    seen = {}

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        tokens = line.split()

        if vertex_count is None:
            if len(tokens) != 2 or tokens[0] != 'N':
                raise GraphFormatError(f"expected 'N <vertex_count>', got {line!r}", line_number, source)
            try:
                vertex_count = int(tokens[1])
            except ValueError:
                raise GraphFormatError(f"vertex count is not an integer: {tokens[1]!r}", line_number, source)
            header_line = line_number
            continue

        if len(tokens) != 4 or tokens[0] != 'E':
            raise GraphFormatError(f"expected 'E <i> <j> <J>', got {line!r}", line_number, source)
        try:
            i, j = int(tokens[1]), int(tokens[2])
            J = float(tokens[3])
        except ValueError:
            raise GraphFormatError(f"malformed edge {line!r}", line_number, source)

        location = f"{source}:{line_number}"
        if i == j:
            raise SelfLoop(f"{location}: self-loop at vertex {i}")
        for v in (i, j):
            if not 0 <= v < vertex_count:
                raise IndexOutOfRange(f"{location}: vertex {v} outside 0..{vertex_count - 1}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdge(f"{location}: duplicate edge {key} (first on line {seen[key]})")
        if not J > 0:
            raise NonPositiveCoupling(f"{location}: coupling J{key} = {J} must be strictly positive")
        seen[key] = line_number
        edges.append((i, j, J))

    if vertex_count is None:
        raise GraphFormatError("missing 'N <vertex_count>' header", None, source)

    try:
        return build(vertex_count, edges)
    except FerroError as e:
        # Re-raise the same kind with the file context attached
        raise type(e)(f"{source} (header on line {header_line}, {len(edges)} edges): {e}") from e


def load_graph(file_path: str) -> CouplingGraph:
    """Load and validate a graph file. The file is only read."""
    graph = parse_edge_list(read_graph_text(file_path), source=str(file_path))
    logger.info(f"Loaded graph from {file_path}: N={graph.vertex_count}, |E|={len(graph.edges)}")
    return graph


def format_edge_list(graph: CouplingGraph, comment: Optional[str] = None) -> str:
    """Render a graph in the edge-list format; parse_edge_list reads it back."""
    lines = []
    if comment:
        lines.extend(f"# {part}" for part in comment.splitlines())
    lines.append(f"N {graph.vertex_count}")
    lines.extend(f"E {i} {j} {J!r}" for i, j, J in graph.edges)
    return "\n".join(lines) + "\n"


def save_graph(graph: CouplingGraph, file_path: str, comment: Optional[str] = None) -> None:
    Path(file_path).write_text(format_edge_list(graph, comment), encoding='utf-8')
    logger.info(f"Wrote graph to {file_path}")


_SEED_TOKEN = re.compile(r'^seed(\d+)$')


def _parse_seed(token: str, spec: str) -> int:
    match = _SEED_TOKEN.match(token)
    if not match:
        raise InvalidParameter(f"Expected 'seed<int>' in {spec!r}, got {token!r}")
    return int(match.group(1))


def parse_coupling_rule(spec: str) -> CouplingRule:
    """``uniform:1.0`` or ``random:0.5:2.0:seed3``."""
    parts = spec.split(':')
    try:
        if parts[0] == 'uniform' and len(parts) == 2:
            return CouplingRule.uniform(float(parts[1]))
        if parts[0] == 'random' and len(parts) in (3, 4):
            seed = _parse_seed(parts[3], spec) if len(parts) == 4 else 0
            return CouplingRule.random(float(parts[1]), float(parts[2]), seed=seed)
    except ValueError as e:
        if isinstance(e, InvalidParameter):
            raise
        raise InvalidParameter(f"Malformed coupling rule {spec!r}: {e}")
    raise InvalidParameter(f"Coupling rule must be 'uniform:<J>' or 'random:<lo>:<hi>:seed<k>', got {spec!r}")


def parse_generator_spec(spec: str, coupling: Optional[CouplingRule] = None) -> CouplingGraph:
    """``chain:8``, ``ring:10``, ``grid:3x4``, ``complete:6``, ``star:7``,
    ``random:9:0.4:seed7``."""
    parts = spec.split(':')
    kind = parts[0]
    try:
        if kind in ('chain', 'ring', 'complete', 'star') and len(parts) == 2:
            return generate(kind, int(parts[1]), coupling)
        if kind == 'grid' and len(parts) == 2:
            rows, cols = (int(x) for x in parts[1].lower().split('x'))
            return generate('grid', coupling=coupling, rows=rows, cols=cols)
        if kind == 'random' and len(parts) in (3, 4):
            seed = _parse_seed(parts[3], spec) if len(parts) == 4 else 0
            return generate('random_connected', int(parts[1]), coupling,
                            seed=seed, edge_prob=float(parts[2]))
    except ValueError as e:
        if isinstance(e, FerroError):
            raise
        raise InvalidParameter(f"Malformed generator spec {spec!r}: {e}")
    raise InvalidParameter(
        f"Unknown generator spec {spec!r}; expected chain:N, ring:N, grid:RxC, "
        f"complete:N, star:N or random:N:P:seedK"
    )
