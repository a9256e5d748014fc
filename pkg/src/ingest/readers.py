import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from src.profile.graph import CallGraph, Frame
from src.profile.profile_frame import ProfileFrame
from src.utils.config import Config
from src.utils.errors import NotATree, ParseError, SchemaError
from .schema import LiteralNodeModel, NodeModel, ProfileDocument, validate

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]


class _TreeBuilder:
    """
    Walks nested node documents in preorder and collects frames, parent links
    and per-rank metric rows.

    With ``declared_metrics`` set (canonical documents) unknown metric names
    are rejected; otherwise (literal trees) metrics are collected as they
    appear and missing ones are null.
    """

    def __init__(self, node_model, num_ranks: Optional[int] = None,
                 declared_metrics: Optional[Sequence[str]] = None):
        self.node_model = node_model
        self.num_ranks = num_ranks
        self.declared = list(declared_metrics) if declared_metrics is not None else None
        self.frames: List[Frame] = []
        self.parents: List[int] = []
        self.rows: List[Dict[str, List[Optional[float]]]] = []
        self.seen_metrics: List[str] = list(self.declared or [])

    def _ranks_for(self, values, path: str) -> List[Optional[float]]:
        if not isinstance(values, list):
            values = [values]
        if self.num_ranks is None:
            self.num_ranks = len(values)
        if len(values) != self.num_ranks:
            raise SchemaError(f"expected {self.num_ranks} rank values, got {len(values)}", path)
        return values

    def add_root(self, raw: Any, path: str):
        stack = [(raw, path, -1)]
        while stack:
            raw_node, node_path, parent = stack.pop()
            node = validate(self.node_model, raw_node, node_path)
            frame = Frame(node.frame.name, node.frame.file, node.frame.line)

            row = {}
            for metric, values in node.metrics.items():
                metric_path = f"{node_path}.metrics.{metric}"
                if self.declared is not None and metric not in self.declared:
                    raise SchemaError("metric is not declared in the document header", metric_path)
                if metric not in self.seen_metrics:
                    self.seen_metrics.append(metric)
                row[metric] = self._ranks_for(values, metric_path)

            index = len(self.frames)
            self.frames.append(frame)
            self.parents.append(parent)
            self.rows.append(row)
            for position in range(len(node.children) - 1, -1, -1):
                stack.append((node.children[position], f"{node_path}.children.{position}", index))

    def build(self, exec_id: str, metadata: Optional[Dict[str, Any]] = None) -> ProfileFrame:
        if not self.frames:
            raise SchemaError("profile has no nodes", "roots")
        if not self.seen_metrics:
            raise SchemaError("profile has no metrics", "metrics")
        num_ranks = self.num_ranks or 1

        graph, order = CallGraph.from_parents(self.frames, self.parents)
        empty = [None] * num_ranks
        arrays = {
            metric: np.array([self.rows[old].get(metric, empty) for old in order], dtype=np.float64)
            .reshape(len(order), num_ranks)
            for metric in self.seen_metrics
        }
        pf = ProfileFrame.from_arrays(graph, arrays, exec_id=exec_id, metadata=metadata, num_ranks=num_ranks)
        pf.validate_inclusive()
        logger.debug(f"[INGEST] Built {pf}")
        return pf


def from_document(raw: Any, default_exec_id: str = "", source: str = "") -> ProfileFrame:
    """Build a ProfileFrame from an already-decoded canonical document"""
    if not isinstance(raw, dict):
        raise SchemaError("document must be a JSON object", "<document>")
    header = validate(ProfileDocument, raw, "")
    if len(set(header.metrics)) != len(header.metrics):
        raise SchemaError("metric names must be unique", "metrics")

    builder = _TreeBuilder(NodeModel, num_ranks=header.ranks, declared_metrics=header.metrics)
    for position, root in enumerate(header.roots):
        builder.add_root(root, f"roots.{position}")
    metadata = {"source": source} if source else {}
    return builder.build(header.exec_id or default_exec_id, metadata)


def parse_canonical(text: Union[str, bytes], default_exec_id: str = "", source: str = "") -> ProfileFrame:
    try:
        raw = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ParseError(f"{source or 'document'}: malformed JSON ({e})") from None
    return from_document(raw, default_exec_id, source)


def read_canonical(path: PathLike) -> ProfileFrame:
    """Read a canonical JSON profile; exec_id falls back to the file stem"""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror or e}") from None
    pf = parse_canonical(data, default_exec_id=path.stem, source=str(path))
    logger.info(f"[INGEST] Loaded {path} ({len(pf.graph)} nodes, {pf.num_ranks} ranks)")
    return pf


def from_literal(tree: Union[Dict[str, Any], List[Dict[str, Any]]], exec_id: str = "literal") -> ProfileFrame:
    """
    Build a ProfileFrame from nested dicts::

        {"frame": {"name": "main"}, "metrics": {"time": [1.0, 2.0]},
         "children": [...]}

    A list gives a forest. Metric values are per-rank lists, or a scalar for a
    single-rank profile; every node must agree on the rank count.
    """
    roots = tree if isinstance(tree, list) else [tree]
    builder = _TreeBuilder(LiteralNodeModel)
    for position, root in enumerate(roots):
        builder.add_root(root, f"[{position}]")
    return builder.build(exec_id, {"source": "literal"})


def _rank_values(row: np.ndarray) -> List[Optional[float]]:
    return [None if np.isnan(value) else float(value) for value in row]


def to_canonical_dict(pf: ProfileFrame) -> Dict[str, Any]:
    if not pf.graph.is_tree:
        raise NotATree("only calling context trees can be written in the canonical format")
    graph = pf.graph
    matrices = {metric: pf.matrix(metric) for metric in pf.metric_names}

    nodes: Dict[int, Dict[str, Any]] = {}
    for node in graph.traverse():
        frame = graph.frame(node)
        frame_doc: Dict[str, Any] = {"name": frame.name}
        if frame.file is not None:
            frame_doc["file"] = frame.file
        if frame.line is not None:
            frame_doc["line"] = frame.line
        nodes[node] = {
            "frame": frame_doc,
            "metrics": {metric: _rank_values(matrix[node]) for metric, matrix in matrices.items()},
            "children": [],
        }
        for parent in graph.parents_of(node):
            nodes[parent]["children"].append(nodes[node])

    document: Dict[str, Any] = {"schema": Config.SCHEMA_TAG}
    if pf.exec_id:
        document["exec_id"] = pf.exec_id
    document.update({
        "ranks": pf.num_ranks,
        "metrics": pf.metric_names,
        "roots": [nodes[root] for root in graph.roots],
    })
    return document


def write_canonical(pf: ProfileFrame, path: PathLike, indent: Optional[int] = 1):
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(to_canonical_dict(pf), fh, indent=indent)
        fh.write("\n")
    logger.info(f"[INGEST] Wrote {pf.exec_id or 'profile'} to {path}")
