"""Segment graphs over linear orders and the flow view of random utility.

Pipeline::

    conjugate_graph -> line_graph -> conjugate_inverse_multigraph -> condensation

The bipartite *conjugate graph* joins an initial segment to a terminal
segment of the same level whenever they concatenate to an order.  Its
4-cycles are exactly the conjugate squares.  Levels run over ``2..n-2`` so
that both halves of every edge have at least two alternatives.
"""

from __future__ import annotations

import itertools
import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .choice import Distribution, SignedMeasure, moebius_inverse, phi, rows
from .errors import ConsistencyError
from .prefs import (
    ConjugateSquare,
    Order,
    Segment,
    Universe,
    check_size,
    enumerate_orders,
    initial_segment,
    make_conjugate_square,
    terminal_segment,
    upper_contour,
)


def graph_levels(n: int) -> range:
    return range(2, n - 1)


def _universe(u: Universe | int) -> Universe:
    if isinstance(u, int):
        check_size(u)
        return Universe.of(u)
    return u


@dataclass(frozen=True)
class SegmentGraph:
    """Bipartite graph of segments; edges carry ``order`` and ``k`` attributes."""

    universe: Universe
    graph: nx.Graph = field(compare=False)

    @property
    def n(self) -> int:
        return self.universe.n

    def initial_nodes(self) -> list[Segment]:
        return [s for s in self.graph if s.kind == "initial"]

    def terminal_nodes(self) -> list[Segment]:
        return [s for s in self.graph if s.kind == "terminal"]


def conjugate_graph(u: Universe | int) -> SegmentGraph:
    u = _universe(u)
    g = nx.Graph()
    for o in enumerate_orders(u):
        for k in graph_levels(u.n):
            up, down = initial_segment(o, k), terminal_segment(o, k)
            g.add_edge(up, down, order=o, k=k)
    return SegmentGraph(u, g)


def segment_graph_squares(g: SegmentGraph) -> list[ConjugateSquare]:
    """Conjugate squares read off the 4-cycles of the conjugate graph."""
    G = g.graph
    found = set()
    by_level = defaultdict(list)
    for s in g.initial_nodes():
        by_level[s.k].append(s)
    for k, ups in by_level.items():
        for a, b in itertools.combinations(sorted(ups, key=lambda s: s.items), 2):
            common = sorted(set(G[a]) & set(G[b]), key=lambda s: s.items)
            for c, d in itertools.combinations(common, 2):
                # cycle a-c-b-d: orders ac, bc, bd, ad
                found.add(make_conjugate_square(a.items + c.items, b.items + d.items, k))
    return sorted(found, key=lambda s: (s.k, s.top, s.swapped))


def line_graph(g: SegmentGraph) -> nx.Graph:
    """One node ``(order, k)`` per conjugate-graph edge; edges labeled by the shared segment."""
    L = nx.Graph()
    G = g.graph
    for up, down, data in G.edges(data=True):
        L.add_node((data["order"], data["k"]))
    for seg in G:
        incident = sorted(G[seg][other]["order"] for other in G[seg])
        for o1, o2 in itertools.combinations(incident, 2):
            L.add_edge((o1, seg.k), (o2, seg.k), label=seg)
    return L


def _label_key(seg: Segment, u: Universe) -> str:
    return ("I:" if seg.kind == "initial" else "T:") + u.order_str(seg.items) + f"@{seg.k}"


def conjugate_inverse_multigraph(lg: nx.Graph, u: Universe | None = None) -> nx.MultiGraph:
    """Merge line-graph nodes by order, keeping every labeled edge (parallel edges allowed)."""
    orders = sorted({o for o, _ in lg})
    u = u or (Universe.of(len(orders[0])) if orders else Universe.of(1))
    M = nx.MultiGraph()
    M.add_nodes_from(orders)
    for (o1, _), (o2, _), data in sorted(lg.edges(data=True), key=lambda e: (min(e[0], e[1]), max(e[0], e[1]))):
        seg = data["label"]
        a, b = sorted((o1, o2))
        M.add_edge(a, b, key=_label_key(seg, u), label=seg)
    return M


def condensation(mg: nx.MultiGraph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(mg)
    G.add_edges_from((a, b) for a, b in mg.edges())
    return G


def polytope_graph(u: Universe | int) -> nx.Graph:
    """Orders joined when they share a nontrivial initial or terminal segment.

    Two distinct orders qualify when, for some level ``k`` in ``2..n-2``, they
    agree on the top ``k`` (and hence differ below) or agree on the bottom
    ``n - k`` (and hence differ above).
    """
    u = _universe(u)
    n = u.n
    G = nx.Graph()
    orders = enumerate_orders(u)
    G.add_nodes_from(orders)
    for o1, o2 in itertools.combinations(orders, 2):
        if any(o1[:k] == o2[:k] or o1[k:] == o2[k:] for k in graph_levels(n)):
            G.add_edge(o1, o2)
    return G


def top_down_view(lg: nx.Graph) -> nx.Graph:
    """Forget the level of every line-graph node and collapse."""
    G = nx.Graph()
    G.add_nodes_from(o for o, _ in lg)
    G.add_edges_from((a[0], b[0]) for a, b in lg.edges() if a[0] != b[0])
    return G


def find_swap_cycles(mg: nx.MultiGraph) -> list[ConjugateSquare]:
    """Four-cycles alternating initial and terminal edges of one common level.

    Each cycle ``n1 -I- n2 -T- n3 -I- n4 -T- n1`` is returned once as its
    canonical square.
    """
    init = defaultdict(lambda: defaultdict(set))
    term = defaultdict(lambda: defaultdict(set))
    for a, b, data in mg.edges(data=True):
        seg = data["label"]
        side = init if seg.kind == "initial" else term
        side[seg.k][a].add(b)
        side[seg.k][b].add(a)
    found = set()
    for k in sorted(init):
        for n1 in sorted(init[k]):
            for n2 in init[k][n1]:
                for n3 in term[k].get(n2, ()):
                    if n3 in (n1, n2):
                        continue
                    for n4 in init[k].get(n3, ()):
                        if n4 in (n1, n2, n3) or n1 not in term[k].get(n4, ()):
                            continue
                        s = make_conjugate_square(n1, n3, k)
                        if set(s.orders) != {n1, n2, n3, n4}:
                            raise ConsistencyError("swap cycle does not close into its square")
                        found.add(s)
    return sorted(found, key=lambda s: (s.k, s.top, s.swapped))


def segments_preserved(s: ConjugateSquare) -> bool:
    """Both diagonals of a square carry the same multiset of level-``k`` segments."""
    k = s.k

    def segs(pair):
        return sorted([o[:k] for o in pair]) + sorted([o[k:] for o in pair])

    return segs(s.top) == segs(s.swapped)


@dataclass(frozen=True)
class Flow:
    """Nonnegative rational value per ``(order, k)`` edge."""

    n: int
    f: dict[tuple[Order, int], Fraction]

    @property
    def levels(self) -> range:
        return flow_levels(self.n)

    def value(self, order: Order) -> Fraction:
        return self.f.get((order, self.levels[0]), Fraction(0))


def flow_levels(n: int) -> range:
    """Graph levels, or every cut level when the graph has none (``n < 4``)."""
    levels = graph_levels(n)
    return levels if len(levels) else range(1, max(n, 2))


def canonical_flow(mu: SignedMeasure) -> Flow:
    f = {}
    for o, w in mu.to_dict().items():
        for k in flow_levels(mu.n):
            f[(o, k)] = Fraction(w)
    return Flow(mu.n, f)


def flow_conditions(flow: Flow, q) -> dict[str, bool]:
    """Evaluate the three flow conditions against Block-Marschak values ``q``."""
    n = flow.n
    nonneg = all(v >= 0 for v in flow.f.values())
    orders = {o for o, _ in flow.f}
    constant = all(len({flow.f.get((o, k), Fraction(0)) for k in flow.levels}) == 1 for o in orders)
    mass = defaultdict(Fraction)
    for o in orders:
        w = flow.value(o)
        if w:
            for x in range(n):
                mass[(x, upper_contour(o, x))] += w
    full = frozenset(range(n))
    contours = all(mass.get((x, full - A), Fraction(0)) == q[(x, A)] for x, A in rows(n))
    return {"nonnegative": nonneg, "level_constant": constant, "block_marschak": contours}


def check_flow(mu: Distribution, flow: Flow | None = None) -> tuple[Flow, bool]:
    """The canonical flow of ``mu`` (or ``flow``) and whether all conditions hold."""
    flow = flow or canonical_flow(mu)
    ok = all(flow_conditions(flow, moebius_inverse(phi(mu))).values())
    return flow, ok


def observation_holds(u: Universe | int) -> bool:
    """Condensed multigraph equals the polytope graph, edge for edge."""
    u = _universe(u)
    lg = line_graph(conjugate_graph(u))
    cond = condensation(conjugate_inverse_multigraph(lg, u))
    return _edge_set(cond) == _edge_set(polytope_graph(u))


def _edge_set(G: nx.Graph) -> set:
    return {tuple(sorted(e)) for e in G.edges()}


def _node_id(node, u: Universe) -> str:
    if isinstance(node, Segment):
        return ("I:" if node.kind == "initial" else "T:") + u.order_str(node.items)
    if isinstance(node, tuple) and len(node) == 2 and isinstance(node[0], tuple):
        return f"{u.order_str(node[0])}@{node[1]}"
    return u.order_str(node)


def _label(data: dict, u: Universe) -> str | None:
    if "label" in data:
        return _node_id(data["label"], u)
    if "order" in data:
        return f"({u.order_str(data['order'])},{data['k']})"
    return None


def _edges(G: nx.Graph, u: Universe) -> list[tuple[str, str, str | None]]:
    out = []
    data_iter = G.edges(data=True)
    for a, b, data in data_iter:
        x, y = sorted((_node_id(a, u), _node_id(b, u)))
        out.append((x, y, _label(data, u)))
    return sorted(out, key=lambda e: (e[0], e[1], e[2] or ""))


def to_json(G: nx.Graph | SegmentGraph, u: Universe) -> dict:
    G = G.graph if isinstance(G, SegmentGraph) else G
    nodes = sorted(_node_id(v, u) for v in G)
    edges = []
    for a, b, label in _edges(G, u):
        e = {"u": a, "v": b}
        if label is not None:
            e["label"] = label
        edges.append(e)
    return {"nodes": nodes, "edges": edges}


def to_dot(G: nx.Graph | SegmentGraph, u: Universe, name: str = "G") -> str:
    G = G.graph if isinstance(G, SegmentGraph) else G
    lines = [f"graph {name} {{"]
    for v in sorted(_node_id(v, u) for v in G):
        lines.append(f"  {json.dumps(v)};")
    for a, b, label in _edges(G, u):
        attr = f" [label={json.dumps(label)}]" if label is not None else ""
        lines.append(f"  {json.dumps(a)} -- {json.dumps(b)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def multigraph_parallel_pairs(mg: nx.MultiGraph) -> list[tuple[Order, Order, list[Segment]]]:
    """Order pairs joined by more than one labeled edge."""
    out = []
    for a, b in sorted({tuple(sorted(e)) for e in mg.edges()}):
        labels = [d["label"] for d in mg.get_edge_data(a, b).values()]
        if len(labels) > 1:
            out.append((a, b, labels))
    return out


def build_pipeline(u: Universe | int) -> dict[str, object]:
    u = _universe(u)
    g = conjugate_graph(u)
    lg = line_graph(g)
    mg = conjugate_inverse_multigraph(lg, u)
    return {"conjugate": g, "line": lg, "multigraph": mg, "condensation": condensation(mg)}


__all__ = [
    "Flow",
    "SegmentGraph",
    "build_pipeline",
    "canonical_flow",
    "check_flow",
    "condensation",
    "conjugate_graph",
    "conjugate_inverse_multigraph",
    "find_swap_cycles",
    "flow_conditions",
    "line_graph",
    "multigraph_parallel_pairs",
    "observation_holds",
    "polytope_graph",
    "segment_graph_squares",
    "segments_preserved",
    "to_dot",
    "to_json",
    "top_down_view",
]
