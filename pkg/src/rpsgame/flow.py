"""Profit-sharing flow network, integral max flow (Dinic) and min cut."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow as _scipy_maximum_flow

from .errors import Overflow, ValidationError
from .instance import INT64_MAX, RpsInstance


class NodeId(NamedTuple):
    kind: str
    index: int = 0

    def label(self) -> str:
        return {
            "s": "s",
            "t": "t",
            "s_bar": "s̄",
            "t_bar": "t̄",
            "player": f"P_{self.index}",
            "reward": f"A_{self.index}",
            "penalty": f"B_{self.index}",
        }[self.kind]


SOURCE = NodeId("s")
SINK = NodeId("t")
AUX_SOURCE = NodeId("s_bar")
AUX_SINK = NodeId("t_bar")


def player(i: int) -> NodeId:
    return NodeId("player", i)


def reward(i: int) -> NodeId:
    return NodeId("reward", i)


def penalty(j: int) -> NodeId:
    return NodeId("penalty", j)


class Edge(NamedTuple):
    tail: NodeId
    head: NodeId
    capacity: int
    flow: int
    unbounded: bool


class FlowNetwork:
    """Directed network with integer capacities and an integral flow.

    Edges are kept in insertion order; parallel edges stay distinct. An
    unbounded edge stores a finite surrogate capacity and is flagged.
    ``scale`` records a factor all weights were multiplied by (see
    :func:`rpsgame.core.flow_from_core`).
    """

    def __init__(self, source: NodeId = SOURCE, sink: NodeId = SINK):
        self.nodes: list[NodeId] = []
        self._index: dict[NodeId, int] = {}
        self.tail: list[int] = []
        self.head: list[int] = []
        self.cap: list[int] = []
        self.flow: list[int] = []
        self.unbounded: list[bool] = []
        self._edge_lookup: dict[tuple[int, int], int] | None = None
        self.scale = 1
        self.add_node(source)
        self.add_node(sink)
        self.source = self._index[source]
        self.sink = self._index[sink]

    def add_node(self, node: NodeId) -> int:
        if node in self._index:
            return self._index[node]
        self._index[node] = len(self.nodes)
        self.nodes.append(node)
        return self._index[node]

    def add_nodes(self, nodes) -> list[int]:
        """Append nodes known to be new; returns their indices."""
        first = len(self.nodes)
        self.nodes.extend(nodes)
        added = range(first, len(self.nodes))
        self._index.update(zip(self.nodes[first:], added))
        if len(self._index) != len(self.nodes):
            raise ValidationError("add_nodes was given a node that already exists")
        return list(added)

    def index(self, node: NodeId) -> int:
        return self._index[node]

    def __contains__(self, node: NodeId) -> bool:
        return node in self._index

    def add_edge(self, u: NodeId, v: NodeId, capacity: int, unbounded: bool = False) -> int:
        if capacity < 0:
            raise ValidationError(f"negative capacity on edge {u.label()}->{v.label()}")
        return self._add(self.add_node(u), self.add_node(v), capacity, unbounded)

    def _add(self, ui: int, vi: int, capacity: int, unbounded: bool) -> int:
        e = len(self.tail)
        self.tail.append(ui)
        self.head.append(vi)
        self.cap.append(capacity)
        self.flow.append(0)
        self.unbounded.append(unbounded)
        self._edge_lookup = None
        return e

    @property
    def num_edges(self) -> int:
        return len(self.tail)

    def _lookup(self) -> dict[tuple[int, int], int]:
        if self._edge_lookup is None:
            pairs = list(zip(self.tail, self.head))
            # Reversed so the first of several parallel edges wins.
            self._edge_lookup = dict(zip(reversed(pairs), range(len(pairs) - 1, -1, -1)))
        return self._edge_lookup

    def edge_id(self, u: NodeId, v: NodeId) -> int:
        """Index of the first edge from ``u`` to ``v``."""
        try:
            return self._lookup()[(self._index[u], self._index[v])]
        except KeyError:
            raise KeyError(f"no edge {u.label()}->{v.label()}") from None

    def has_edge(self, u: NodeId, v: NodeId) -> bool:
        return (self._index.get(u), self._index.get(v)) in self._lookup()

    def edge_ids(self, pairs) -> list[int]:
        """:meth:`edge_id` for many ``(u, v)`` pairs at once."""
        lookup, index = self._lookup(), self._index
        return [lookup[(index[u], index[v])] for u, v in pairs]

    def flow_on(self, u: NodeId, v: NodeId) -> int:
        return self.flow[self.edge_id(u, v)]

    def capacity_of(self, u: NodeId, v: NodeId) -> int:
        return self.cap[self.edge_id(u, v)]

    def edges(self) -> Iterator[Edge]:
        for e in range(self.num_edges):
            yield Edge(
                self.nodes[self.tail[e]], self.nodes[self.head[e]], self.cap[e], self.flow[e], self.unbounded[e]
            )

    def value(self) -> int:
        """Net flow leaving the source."""
        out = sum(f for u, f in zip(self.tail, self.flow) if u == self.source)
        back = sum(f for v, f in zip(self.head, self.flow) if v == self.source)
        return out - back

    def excess(self) -> list[int]:
        """Inflow minus outflow at every node."""
        ex = [0] * len(self.nodes)
        for u, v, f in zip(self.tail, self.head, self.flow):
            ex[u] -= f
            ex[v] += f
        return ex

    def is_feasible(self) -> bool:
        """Capacity bounds hold and flow is conserved at every node except s and t."""
        if any(f < 0 or f > c for f, c in zip(self.flow, self.cap)):
            return False
        ex = self.excess()
        return all(x == 0 for i, x in enumerate(ex) if i not in (self.source, self.sink))

    def finite_edges_saturated(self) -> bool:
        return all(f == c for f, c, unb in zip(self.flow, self.cap, self.unbounded) if not unb)

    def copy(self) -> "FlowNetwork":
        other = FlowNetwork.__new__(FlowNetwork)
        other.nodes = list(self.nodes)
        other._index = dict(self._index)
        other.tail = list(self.tail)
        other.head = list(self.head)
        other.cap = list(self.cap)
        other.flow = list(self.flow)
        other.unbounded = list(self.unbounded)
        other._edge_lookup = None
        other.scale = self.scale
        other.source = self.source
        other.sink = self.sink
        return other

    def to_dot(self) -> str:
        lines = ["digraph profit_sharing {", "  rankdir=LR;"]
        for i, node in enumerate(self.nodes):
            lines.append(f'  n{i} [label="{node.label()}"];')
        for e in range(self.num_edges):
            cap = "inf" if self.unbounded[e] else str(self.cap[e])
            lines.append(f'  n{self.tail[e]} -> n{self.head[e]} [label="{self.flow[e]}/{cap}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def required_flow_value(inst: RpsInstance) -> int:
    """Total reward plus total penalty: the flow value every core flow must carry."""
    h = inst.total_reward + inst.total_penalty
    if h > INT64_MAX:
        raise Overflow("total reward plus total penalty exceeds the signed 64-bit range")
    return h


def build_profit_sharing_graph(inst: RpsInstance) -> FlowNetwork:
    """Profit-sharing graph of ``inst``; unbounded edges carry the surrogate
    capacity ``required_flow_value(inst)``, which no s-t flow can exceed."""
    big = required_flow_value(inst)
    net = FlowNetwork()
    s, t = net.source, net.sink
    s_bar = net.add_node(AUX_SOURCE)
    t_bar = net.add_node(AUX_SINK)
    players = net.add_nodes(player(i) for i in range(1, inst.n + 1))
    reward_nodes = net.add_nodes(reward(i) for i in range(1, len(inst.rewards) + 1))
    penalty_nodes = net.add_nodes(penalty(j) for j in range(1, len(inst.penalties) + 1))

    # Bulk appends; this builder dominates the large-instance path.
    tail, head, cap, unb = net.tail, net.head, net.cap, net.unbounded
    for node, r in zip(reward_nodes, inst.rewards):
        members = sorted(r.members)
        tail += [s] + [node] * len(members)
        head += [node] + [players[i - 1] for i in members]
        cap += [r.value] + [big] * len(members)
        unb += [False] + [True] * len(members)
    for node, b in zip(penalty_nodes, inst.penalties):
        members = sorted(b.members)
        tail += [node] + [players[i - 1] for i in members]
        head += [t] + [node] * len(members)
        cap += [b.value] + [big] * len(members)
        unb += [False] + [True] * len(members)
    net.flow += [0] * (len(tail) - len(net.flow))
    net._add(s, s_bar, inst.total_penalty, False)
    net._add(t_bar, t, inst.total_reward, False)
    for p in players:
        net._add(s_bar, p, big, True)
        net._add(p, t_bar, big, True)
    net._add(s_bar, t_bar, big, True)
    return net


INT32_MAX = 2**31 - 1


def max_flow(net: FlowNetwork, method: str = "auto") -> tuple[int, FlowNetwork]:
    """Maximum s-t flow. Augments the flow already on ``net`` in place and
    returns the resulting value together with ``net``.

    ``method="scipy"`` uses scipy's Dinic solver, which needs 32-bit
    capacities, no parallel edges and an empty starting flow.
    ``method="dinic"`` is the built-in 64-bit solver. ``"auto"`` picks scipy
    when it applies. Both are deterministic.
    """
    if any(c > INT64_MAX for c in net.cap):
        raise Overflow("edge capacity exceeds the signed 64-bit range")
    if method not in ("auto", "scipy", "dinic"):
        raise ValueError(f"unknown max-flow method {method!r}")
    if method != "dinic":
        if _scipy_applies(net):
            return _scipy_flow(net), net
        if method == "scipy":
            raise ValueError("scipy solver needs 32-bit capacities, simple edges and zero initial flow")
    return _dinic(net), net


def _edge_keys(net: FlowNetwork) -> np.ndarray:
    return np.asarray(net.tail, dtype=np.int64) * len(net.nodes) + np.asarray(net.head, dtype=np.int64)


def _scipy_applies(net: FlowNetwork) -> bool:
    if net.source == net.sink or any(net.flow) or max(net.cap, default=0) > INT32_MAX:
        return False
    keys = _edge_keys(net)
    return len(np.unique(keys)) == len(keys)


def _scipy_flow(net: FlowNetwork) -> int:
    n_nodes = len(net.nodes)
    if not net.num_edges:
        return 0
    graph = csr_matrix(
        (np.asarray(net.cap, dtype=np.int32), (np.asarray(net.tail), np.asarray(net.head))),
        shape=(n_nodes, n_nodes),
    )
    flow = _scipy_maximum_flow(graph, net.source, net.sink, method="dinic").flow.tocoo()
    flow_keys = flow.row.astype(np.int64) * n_nodes + flow.col
    positive = flow.data > 0
    flow_keys, flow_data = flow_keys[positive], flow.data[positive]
    keys = _edge_keys(net)
    per_edge = np.zeros(len(keys), dtype=np.int64)
    if len(flow_keys):
        # scipy reports skew-symmetric net flow; an antiparallel pair keeps its
        # positive part on the forward edge, which never exceeds that capacity.
        order = np.argsort(flow_keys)
        flow_keys, flow_data = flow_keys[order], flow_data[order]
        pos = np.minimum(np.searchsorted(flow_keys, keys), len(flow_keys) - 1)
        found = flow_keys[pos] == keys
        per_edge[found] = flow_data[pos[found]]
    net.flow[:] = per_edge.tolist()
    return net.value()


def _dinic(net: FlowNetwork) -> int:
    # Level graphs are computed with numpy; the blocking-flow search runs over
    # the admissible arcs of each phase in edge insertion order.
    n_nodes = len(net.nodes)
    m = net.num_edges
    # Arc 2e is edge e, arc 2e+1 its reverse.
    to = np.empty(2 * m, dtype=np.int64)
    to[0::2] = net.head
    to[1::2] = net.tail
    arc_tail = np.empty(2 * m, dtype=np.int64)
    arc_tail[0::2] = net.tail
    arc_tail[1::2] = net.head
    res = [0] * (2 * m)
    res[0::2] = [c - f for c, f in zip(net.cap, net.flow)]
    res[1::2] = net.flow

    order = np.argsort(arc_tail, kind="stable")
    indptr = np.searchsorted(arc_tail[order], np.arange(n_nodes + 1))
    sorted_tail = arc_tail[order]
    sorted_head = to[order]
    to_list = to.tolist()

    s, t = net.source, net.sink
    while True:
        res_arr = np.array(res, dtype=np.int64)
        level = _bfs_levels(s, t, indptr, order, to, res_arr, n_nodes)
        t_level = level[t]
        if t_level < 0:
            break
        lt = level[sorted_tail]
        lh = level[sorted_head]
        admissible = (
            (res_arr[order] > 0) & (lt >= 0) & (lh == lt + 1) & ((lh < t_level) | (sorted_head == t))
        )
        arcs = order[admissible]
        ptr = np.concatenate(([0], np.cumsum(np.bincount(sorted_tail[admissible], minlength=n_nodes))))
        _blocking_flow(s, t, arcs.tolist(), ptr.tolist(), to_list, res)

    net.flow[:] = res[1::2]
    return net.value()


def _bfs_levels(s, t, indptr, order, to, res, n_nodes) -> np.ndarray:
    level = np.full(n_nodes, -1, dtype=np.int64)
    level[s] = 0
    frontier = np.array([s], dtype=np.int64)
    depth = 0
    while frontier.size and level[t] < 0:
        depth += 1
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if not total:
            break
        offsets = np.repeat(starts - (np.cumsum(counts) - counts), counts) + np.arange(total)
        arcs = order[offsets]
        heads = to[arcs[res[arcs] > 0]]
        frontier = np.unique(heads[level[heads] < 0])
        level[frontier] = depth
    return level


def _blocking_flow(s, t, arcs, ptr, to, res) -> None:
    # Iterative DFS over the admissible arcs; ptr[u]..ptr[u+1] indexes arcs of u.
    it = ptr[:-1]
    end = ptr[1:]
    stack: list[int] = []
    u = s
    while True:
        if u == t:
            push = min([res[a] for a in stack])
            cut = -1
            for idx, a in enumerate(stack):
                res[a] -= push
                res[a ^ 1] += push
                if cut < 0 and not res[a]:
                    cut = idx
            del stack[cut:]
            u = to[stack[-1]] if stack else s
            continue
        i = it[u]
        stop = end[u]
        while i < stop and not res[arcs[i]]:
            i += 1
        it[u] = i
        if i < stop:
            a = arcs[i]
            stack.append(a)
            u = to[a]
        else:
            if u == s:
                return
            a = stack.pop()
            u = to[a ^ 1]
            it[u] += 1


@dataclass(frozen=True)
class CutResult:
    source_side: frozenset
    capacity: int


def min_cut(net: FlowNetwork) -> CutResult:
    """Source side = nodes reachable from s in the residual graph of the
    current (maximum) flow."""
    out_arcs: list[list[tuple[int, int]]] = [[] for _ in net.nodes]
    for e in range(net.num_edges):
        u, v = net.tail[e], net.head[e]
        if net.flow[e] < net.cap[e]:
            out_arcs[u].append((e, v))
        if net.flow[e] > 0:
            out_arcs[v].append((e, u))
    seen = [False] * len(net.nodes)
    seen[net.source] = True
    queue = deque([net.source])
    while queue:
        u = queue.popleft()
        for _, v in out_arcs[u]:
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    capacity = sum(c for u, v, c in zip(net.tail, net.head, net.cap) if seen[u] and not seen[v])
    side = frozenset(node for node, inside in zip(net.nodes, seen) if inside)
    return CutResult(side, capacity)
