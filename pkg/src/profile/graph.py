import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.utils.errors import NotATree, SchemaError, UnknownNode

logger = logging.getLogger(__name__)

NodeId = int
CallPath = Tuple["Frame", ...]


@dataclass(frozen=True)
class Frame:
    """Identity of a code location"""
    name: str
    file: Optional[str] = None
    line: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise SchemaError("frame name must be a non-empty string")
        if self.line is not None and (isinstance(self.line, bool) or not isinstance(self.line, int) or self.line < 0):
            raise SchemaError(f"frame line must be a non-negative integer, got {self.line!r}")

    @property
    def location(self) -> Optional[str]:
        if self.file is None:
            return None
        return self.file if self.line is None else f"{self.file}:{self.line}"

    def __str__(self):
        location = self.location
        return f"{self.name} ({location})" if location else self.name


class CallGraph:
    """
    Immutable caller->callee graph over Frames.

    NodeIds are dense integers. Graphs built by this package number their
    nodes in DFS preorder, so sorting by NodeId gives a deterministic walk.
    A graph flagged ``is_tree`` is a calling context tree; otherwise it is a
    merged call graph that may contain self-edges and back-edges.
    """

    def __init__(self, frames: Sequence[Frame], children: Sequence[Sequence[NodeId]],
                 roots: Sequence[NodeId], is_tree: bool = True):
        if len(frames) != len(children):
            raise SchemaError(f"{len(frames)} frames but {len(children)} child lists")

        self._frames: Tuple[Frame, ...] = tuple(frames)
        self._children: Tuple[Tuple[NodeId, ...], ...] = tuple(tuple(c) for c in children)
        self._roots: Tuple[NodeId, ...] = tuple(roots)
        self.is_tree = is_tree

        size = len(self._frames)
        parents: List[List[NodeId]] = [[] for _ in range(size)]
        for node, kids in enumerate(self._children):
            for child in kids:
                if not 0 <= child < size:
                    raise SchemaError(f"edge {node}->{child} points outside the graph")
                parents[child].append(node)
        self._parents = tuple(tuple(p) for p in parents)

        for root in self._roots:
            if not 0 <= root < size:
                raise SchemaError(f"root {root} is not a node")

        self._order, self._depth, self._tree_parent = self._walk()
        if len(self._order) != size:
            raise SchemaError(f"{size - len(self._order)} nodes are unreachable from the roots")

        if is_tree:
            root_set = set(self._roots)
            for node, node_parents in enumerate(self._parents):
                expected = 0 if node in root_set else 1
                if len(node_parents) != expected:
                    raise NotATree(f"node {node} ({self._frames[node]}) has {len(node_parents)} parents")

    def _walk(self):
        """Iterative preorder walk visiting each node once"""
        size = len(self._frames)
        depth = np.full(size, -1, dtype=np.int64)
        tree_parent = np.full(size, -1, dtype=np.int64)
        order: List[NodeId] = []
        stack: List[Tuple[NodeId, int, NodeId]] = [(root, 0, -1) for root in reversed(self._roots)]
        while stack:
            node, level, parent = stack.pop()
            if depth[node] >= 0:
                continue
            depth[node] = level
            tree_parent[node] = parent
            order.append(node)
            for child in reversed(self._children[node]):
                if depth[child] < 0:
                    stack.append((child, level + 1, node))
        return tuple(order), depth, tree_parent

    @classmethod
    def from_parents(cls, frames: Sequence[Frame], parents: Sequence[NodeId]) -> Tuple["CallGraph", List[int]]:
        """
        Build a tree from a parent array (-1 marks a root). Siblings keep the
        order of their input indices.

        Returns the graph, renumbered in preorder, and the list mapping each
        new NodeId to its input index.
        """
        size = len(frames)
        kids: List[List[int]] = [[] for _ in range(size)]
        roots: List[int] = []
        for index, parent in enumerate(parents):
            if parent < 0:
                roots.append(index)
            else:
                kids[parent].append(index)

        order: List[int] = []
        stack = list(reversed(roots))
        while stack:
            index = stack.pop()
            order.append(index)
            stack.extend(reversed(kids[index]))
        if len(order) != size:
            raise NotATree("parent array contains a cycle")

        new_id = {old: new for new, old in enumerate(order)}
        graph = cls(
            [frames[old] for old in order],
            [[new_id[k] for k in kids[old]] for old in order],
            [new_id[r] for r in roots],
            is_tree=True,
        )
        return graph, order

    def __len__(self):
        return len(self._frames)

    def __iter__(self) -> Iterator[NodeId]:
        return iter(self._order)

    def __repr__(self):
        kind = "tree" if self.is_tree else "graph"
        return f"CallGraph({kind}, nodes={len(self)}, roots={len(self._roots)})"

    def _check(self, node: NodeId):
        if not isinstance(node, (int, np.integer)) or not 0 <= node < len(self._frames):
            raise UnknownNode(f"Unknown node {node!r}")

    @property
    def roots(self) -> Tuple[NodeId, ...]:
        return self._roots

    @property
    def frames(self) -> Tuple[Frame, ...]:
        return self._frames

    def frame(self, node: NodeId) -> Frame:
        self._check(node)
        return self._frames[node]

    def children_of(self, node: NodeId) -> Tuple[NodeId, ...]:
        self._check(node)
        return self._children[node]

    def parents_of(self, node: NodeId) -> Tuple[NodeId, ...]:
        self._check(node)
        return self._parents[node]

    def depth_of(self, node: NodeId) -> int:
        self._check(node)
        return int(self._depth[node])

    def traverse(self, start: Optional[NodeId] = None) -> List[NodeId]:
        """Preorder from ``start`` (default: every root), each node once"""
        if start is None:
            return list(self._order)
        self._check(start)
        seen = set()
        order = []
        stack = [start]
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            order.append(node)
            stack.extend(child for child in reversed(self._children[node]) if child not in seen)
        return order

    def edges(self) -> Iterator[Tuple[NodeId, NodeId]]:
        for node in self._order:
            for child in self._children[node]:
                yield node, child

    @property
    def parent_array(self) -> np.ndarray:
        """Parent of every node in a tree, -1 for roots"""
        if not self.is_tree:
            raise NotATree("parent array is only defined for calling context trees")
        return self._tree_parent.copy()

    @property
    def depth_array(self) -> np.ndarray:
        return self._depth.copy()

    def path_of(self, node: NodeId) -> CallPath:
        """Frames from the root to ``node`` along the first-visit spanning tree"""
        self._check(node)
        path = []
        while node >= 0:
            path.append(self._frames[node])
            node = int(self._tree_parent[node])
        return tuple(reversed(path))

    def paths(self) -> Dict[CallPath, NodeId]:
        """Call path of every node; later duplicates keep the first NodeId"""
        result: Dict[CallPath, NodeId] = {}
        prefix: Dict[NodeId, CallPath] = {}
        for node in self._order:
            parent = int(self._tree_parent[node])
            path = (prefix[parent] if parent >= 0 else ()) + (self._frames[node],)
            prefix[node] = path
            result.setdefault(path, node)
        return result

    def _root_shapes(self, shapes: Dict[Tuple, int]) -> List[int]:
        """Canonical id of every root subtree; equal ids mean isomorphic subtrees"""
        shape = [0] * len(self)
        for node in reversed(self._order):
            key = (self._frames[node], tuple(sorted(shape[child] for child in self._children[node])))
            shape[node] = shapes.setdefault(key, len(shapes))
        return sorted(shape[root] for root in self._roots)

    def is_isomorphic(self, other: "CallGraph") -> bool:
        if len(self) != len(other) or self.is_tree != other.is_tree:
            return False
        if self.is_tree:
            shapes: Dict[Tuple, int] = {}
            return self._root_shapes(shapes) == other._root_shapes(shapes)
        ours = {(self._frames[a], self._frames[b]) for a, b in self.edges()}
        theirs = {(other._frames[a], other._frames[b]) for a, b in other.edges()}
        return (ours == theirs and set(self._frames) == set(other._frames)
                and {self._frames[r] for r in self._roots} == {other._frames[r] for r in other._roots})
