"""Tensor-network diagrams as Graphviz DOT text.

Nodes are operands (circles for plain tensors, boxes for function tensors);
an edge joins two modes that are contracted together.  Solid edges denote a
contracted product, dashed edges a contracted convolution.  Modes that take
part in no edge are free: they are drawn as labeled half-edges ending at
invisible terminals, so the order of the resulting tensor can be read off the
diagram.  Output is deterministic: nodes and edges are emitted in declaration
order, free terminals afterwards in (node, mode) order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .mlsys import SystemTensor, TensorSequence
from .tensor import ModePairing, _as_pairing

__all__ = [
    "NetworkNode",
    "NetworkEdge",
    "NetworkSpec",
    "to_dot",
    "spec_from_contraction",
    "spec_from_convolution",
]

EDGE_PRODUCT = "product"
EDGE_CONVOLUTION = "convolution"
KIND_TENSOR = "tensor"
KIND_FUNCTION = "function"


@dataclass(frozen=True)
class NetworkNode:
    name: str
    shape: tuple[int, ...]
    kind: str = KIND_TENSOR

    def __post_init__(self):
        if self.kind not in (KIND_TENSOR, KIND_FUNCTION):
            raise ValueError(f"unknown node kind {self.kind!r}")
        object.__setattr__(self, "shape", tuple(int(s) for s in self.shape))


@dataclass(frozen=True)
class NetworkEdge:
    node_a: str
    mode_a: int
    node_b: str
    mode_b: int
    style: str = EDGE_PRODUCT

    def __post_init__(self):
        if self.style not in (EDGE_PRODUCT, EDGE_CONVOLUTION):
            raise ValueError(f"unknown edge style {self.style!r}")


@dataclass
class NetworkSpec:
    """Validated contraction/convolution diagram."""

    nodes: list[NetworkNode] = field(default_factory=list)
    edges: list[NetworkEdge] = field(default_factory=list)

    def __post_init__(self):
        if not self.nodes:
            raise ValueError("network spec has no nodes")
        by_name = {}
        for node in self.nodes:
            if node.name in by_name:
                raise ValueError(f"duplicate node name {node.name!r}")
            by_name[node.name] = node
        used: set[tuple[str, int]] = set()
        for e in self.edges:
            for name, mode in ((e.node_a, e.mode_a), (e.node_b, e.mode_b)):
                if name not in by_name:
                    raise ValueError(f"edge references unknown node {name!r}")
                if not 1 <= mode <= len(by_name[name].shape):
                    raise ValueError(f"mode {mode} out of range for node {name!r}")
                if (name, mode) in used:
                    raise ValueError(f"mode {mode} of node {name!r} used by more than one edge")
                used.add((name, mode))
            da = by_name[e.node_a].shape[e.mode_a - 1]
            db = by_name[e.node_b].shape[e.mode_b - 1]
            if da != db:
                raise ValueError(
                    f"paired dimensions differ on edge {e.node_a}:{e.mode_a} -- "
                    f"{e.node_b}:{e.mode_b} ({da} vs {db})"
                )
        self._by_name = by_name
        self._used = used

    def free_modes(self) -> list[tuple[str, int, int]]:
        """(node name, mode, dimension) for every mode not on an edge, in
        declaration order."""
        out = []
        for node in self.nodes:
            for mode, dim in enumerate(node.shape, start=1):
                if (node.name, mode) not in self._used:
                    out.append((node.name, mode, dim))
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkSpec":
        """Build from the structured-config form used by the CLI and service."""
        try:
            nodes = [
                NetworkNode(
                    name=str(n["name"]),
                    shape=tuple(n["shape"]),
                    kind=str(n.get("kind", KIND_TENSOR)),
                )
                for n in d.get("nodes", [])
            ]
            edges = [
                NetworkEdge(
                    node_a=str(e["a"]),
                    mode_a=int(e["mode_a"]),
                    node_b=str(e["b"]),
                    mode_b=int(e["mode_b"]),
                    style=str(e.get("style", EDGE_PRODUCT)),
                )
                for e in d.get("edges", [])
            ]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed network spec: {exc}") from exc
        return cls(nodes=nodes, edges=edges)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(spec: NetworkSpec) -> str:
    """Render the spec as deterministic Graphviz DOT (UTF-8, LF endings)."""
    lines = ["graph tensor_network {"]
    lines.append("  layout=neato;")
    lines.append("  node [fontsize=12];")
    for node in spec.nodes:
        shape = "box" if node.kind == KIND_FUNCTION else "circle"
        lines.append(f"  {_quote(node.name)} [shape={shape}];")
    for e in spec.edges:
        dim = spec._by_name[e.node_a].shape[e.mode_a - 1]
        style = "dashed" if e.style == EDGE_CONVOLUTION else "solid"
        lines.append(
            f"  {_quote(e.node_a)} -- {_quote(e.node_b)}"
            f' [style={style}, label="{dim}"];'
        )
    for name, mode, dim in spec.free_modes():
        term = f"{name}.{mode}"
        lines.append(f"  {_quote(term)} [shape=point, style=invis, label=\"\"];")
        lines.append(f"  {_quote(name)} -- {_quote(term)} [label=\"{dim}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def spec_from_contraction(
    a_shape: Sequence[int], b_shape: Sequence[int], pairing: ModePairing | tuple
) -> NetworkSpec:
    """Diagram of a contracted product between two tensors."""
    pr = _as_pairing(pairing)
    a_shape = tuple(int(s) for s in a_shape)
    b_shape = tuple(int(s) for s in b_shape)
    nodes = [NetworkNode("A", a_shape), NetworkNode("B", b_shape)]
    edges = [
        NetworkEdge("A", ma, "B", mb, EDGE_PRODUCT)
        for ma, mb in zip(pr.modes_a, pr.modes_b)
    ]
    return NetworkSpec(nodes=nodes, edges=edges)


def spec_from_convolution(h: SystemTensor, x: TensorSequence) -> NetworkSpec:
    """Diagram of a contracted convolution between a system and a signal;
    the contracted mode pairs are drawn dashed."""
    if x.shape != h.input_shape:
        raise ValueError(f"signal shape {x.shape} does not match system input {h.input_shape}")
    nodes = [
        NetworkNode("H", h.impulse_response.shape, KIND_FUNCTION),
        NetworkNode("X", x.shape, KIND_FUNCTION),
    ]
    edges = [
        NetworkEdge("H", h.output_order + k, "X", k, EDGE_CONVOLUTION)
        for k in range(1, h.input_order + 1)
    ]
    return NetworkSpec(nodes=nodes, edges=edges)
