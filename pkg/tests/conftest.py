"""
Shared fixtures for the verifier test suite
"""

import logging
import sys
from pathlib import Path

import pytest

# Add the repository root to Python path for imports
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from core.graph import build  # noqa: E402
from pipeline.eigensolve import SolverPolicy  # noqa: E402


class UnionFind:
    """Independent connectivity oracle."""

    def __init__(self, size):
        self.parent = list(range(size))

    def find(self, v):
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def connected_after_removal(graph, vertex):
    others = [v for v in range(graph.vertex_count) if v != vertex]
    uf = UnionFind(graph.vertex_count)
    for i, j, _ in graph.edges:
        if vertex not in (i, j):
            uf.union(i, j)
    return len({uf.find(v) for v in others}) <= 1


@pytest.fixture
def triangle():
    return build(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


@pytest.fixture
def policy():
    return SolverPolicy(workers=1)


@pytest.fixture
def config_dir(tmp_path):
    path = tmp_path / "config"
    path.mkdir()
    return str(path)


@pytest.fixture(autouse=True)
def _drop_ferro_log_handlers():
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_ferro_handler", False):
            root.removeHandler(handler)
            handler.close()
