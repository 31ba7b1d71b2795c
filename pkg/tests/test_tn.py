import numpy as np
import pytest

import einsys as es
from einsys.tn import NetworkEdge, NetworkNode
from helpers import random_shape, random_tensor


def _free_edge_count(dot: str) -> int:
    return sum(1 for line in dot.splitlines() if "style=invis" in line)


def _solid_edge_count(dot: str) -> int:
    return sum(1 for line in dot.splitlines() if "style=solid" in line)


def _dashed_edge_count(dot: str) -> int:
    return sum(1 for line in dot.splitlines() if "style=dashed" in line)


class TestToDot:
    def test_single_order3_tensor(self):
        spec = es.NetworkSpec(nodes=[NetworkNode("A", (2, 3, 4))])
        dot = es.to_dot(spec)
        assert '"A" [shape=circle];' in dot
        assert _free_edge_count(dot) == 3

    def test_einstein_product_topology(self):
        # order (P=2)+(N=2) times (N=2)+(M=1): N solid edges, P+M free edges
        spec = es.spec_from_contraction((2, 2, 3, 4), (3, 4, 5), ([3, 4], [1, 2]))
        dot = es.to_dot(spec)
        assert _solid_edge_count(dot) == 2
        assert _free_edge_count(dot) == 3

    def test_inner_product_no_free_edges(self):
        spec = es.spec_from_contraction((2, 3, 4), (2, 3, 4), ([1, 2, 3], [1, 2, 3]))
        dot = es.to_dot(spec)
        assert _solid_edge_count(dot) == 3
        assert _free_edge_count(dot) == 0

    def test_svd_chain_topology(self):
        nodes = [
            NetworkNode("U", (2, 3, 2, 3)),
            NetworkNode("D", (2, 3, 2, 2)),
            NetworkNode("Vh", (2, 2, 2, 2)),
        ]
        edges = [
            NetworkEdge("U", 3, "D", 1),
            NetworkEdge("U", 4, "D", 2),
            NetworkEdge("D", 3, "Vh", 1),
            NetworkEdge("D", 4, "Vh", 2),
        ]
        dot = es.to_dot(es.NetworkSpec(nodes=nodes, edges=edges))
        assert _solid_edge_count(dot) == 4
        assert _free_edge_count(dot) == 4  # row modes of U, column modes of Vh

    def test_function_tensors_render_as_boxes(self, rng):
        h = es.SystemTensor(
            es.TensorSequence(0, [random_tensor(rng, (3, 2, 2))]), input_order=2
        )
        x = es.TensorSequence(0, [random_tensor(rng, (2, 2))])
        spec = es.spec_from_convolution(h, x)
        dot = es.to_dot(spec)
        assert '"H" [shape=box];' in dot
        assert '"X" [shape=box];' in dot
        assert _dashed_edge_count(dot) == 2
        assert _free_edge_count(dot) == 1

    def test_byte_identical_output(self):
        spec1 = es.spec_from_contraction((3, 4), (4, 5), ([2], [1]))
        spec2 = es.spec_from_contraction((3, 4), (4, 5), ([2], [1]))
        assert es.to_dot(spec1) == es.to_dot(spec2)
        assert es.to_dot(spec1).endswith("}\n")
        assert "\r" not in es.to_dot(spec1)

    def test_matrix_product_single_edge(self):
        dot = es.to_dot(es.spec_from_contraction((3, 4), (4, 5), ([2], [1])))
        assert _solid_edge_count(dot) == 1


class TestSpecValidation:
    def test_empty_spec_rejected(self):
        with pytest.raises(ValueError):
            es.NetworkSpec(nodes=[])

    def test_duplicate_node_names(self):
        with pytest.raises(ValueError):
            es.NetworkSpec(nodes=[NetworkNode("A", (2,)), NetworkNode("A", (3,))])

    def test_mode_used_twice(self):
        nodes = [NetworkNode("A", (2, 2)), NetworkNode("B", (2, 2))]
        edges = [NetworkEdge("A", 1, "B", 1), NetworkEdge("A", 1, "B", 2)]
        with pytest.raises(ValueError, match="more than one edge"):
            es.NetworkSpec(nodes=nodes, edges=edges)

    def test_dimension_mismatch(self):
        nodes = [NetworkNode("A", (2,)), NetworkNode("B", (3,))]
        with pytest.raises(ValueError, match="differ"):
            es.NetworkSpec(nodes=nodes, edges=[NetworkEdge("A", 1, "B", 1)])

    def test_unknown_node(self):
        with pytest.raises(ValueError, match="unknown node"):
            es.NetworkSpec(
                nodes=[NetworkNode("A", (2,))], edges=[NetworkEdge("A", 1, "Z", 1)]
            )

    def test_bad_kind_and_style(self):
        with pytest.raises(ValueError):
            NetworkNode("A", (2,), kind="blob")
        with pytest.raises(ValueError):
            NetworkEdge("A", 1, "B", 1, style="wavy")

    def test_from_dict_roundtrip(self):
        d = {
            "nodes": [
                {"name": "H", "shape": [3, 2], "kind": "function"},
                {"name": "X", "shape": [2]},
            ],
            "edges": [{"a": "H", "mode_a": 2, "b": "X", "mode_b": 1, "style": "convolution"}],
        }
        spec = es.NetworkSpec.from_dict(d)
        dot = es.to_dot(spec)
        assert _dashed_edge_count(dot) == 1
        with pytest.raises(ValueError, match="malformed"):
            es.NetworkSpec.from_dict({"nodes": [{"shape": [2]}]})


class TestConsistencyWithContraction:
    def test_free_edge_count_matches_output_order(self, rng):
        for _ in range(10):
            oa = int(rng.integers(1, 4))
            ob = int(rng.integers(1, 4))
            n = int(rng.integers(0, min(oa, ob) + 1))
            mid = random_shape(rng, n)
            a = random_tensor(rng, random_shape(rng, oa - n) + mid)
            b = random_tensor(rng, mid + random_shape(rng, ob - n))
            pairing = (list(range(oa - n + 1, oa + 1)), list(range(1, n + 1)))
            out = es.contracted_product(a, b, pairing)
            spec = es.spec_from_contraction(a.shape, b.shape, pairing)
            assert len(spec.free_modes()) == out.order
