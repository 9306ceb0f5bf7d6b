"""Exact marginals and sampling for degree <= 2 QAOA via boundary contraction.

A degree-2 interaction graph splits into isolated vertices, paths, and cycles,
and the state factors across components, so each is contracted independently.
Probabilities are contracted on the doubled (bra x ket) network: the boundary
message carried across a cut indexes the frontier wire's value at each of the
p phase layers, twice, giving dimension 4^p on a path and 4^(2p) while a
cycle's wrap edge is held open.  Runtime is (n*p)^O(1) * exp(O(p)).

All contraction routines are pure; distinct components (and independently
seeded sample streams) may be evaluated concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ir import InteractionGraph, QaoaInstance, interaction_graph


class DegreeTooHigh(Exception):
    def __init__(self, vertex: int, degree: int):
        super().__init__(f"vertex {vertex} has interaction degree {degree} > 2")
        self.vertex = vertex
        self.degree = degree


@dataclass(frozen=True)
class Component:
    """A connected piece of a degree <= 2 interaction graph.

    Paths are ordered endpoint to endpoint starting from the lower-indexed
    endpoint; cycles start at their lowest vertex and run toward its
    lower-indexed neighbor (the wrap edge closes last back to the start).
    """

    kind: str  # "isolated" | "path" | "cycle"
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]


def decompose(graph: InteractionGraph) -> list[Component]:
    """Classify the graph into isolated vertices, paths, and cycles with
    canonical vertex orderings, sorted by lowest vertex."""
    adj = graph.neighbors()
    for v, nbrs in adj.items():
        if len(nbrs) > 2:
            raise DegreeTooHigh(v, len(nbrs))
    seen: set[int] = set()
    components: list[Component] = []
    for start in range(graph.n):
        if start in seen:
            continue
        # collect the connected component
        stack, comp = [start], {start}
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in comp:
                    comp.add(u)
                    stack.append(u)
        seen |= comp
        if len(comp) == 1 and not adj[start]:
            components.append(Component("isolated", (start,), ()))
            continue
        endpoints = sorted(v for v in comp if len(adj[v]) == 1)
        if endpoints:
            order = _walk(adj, endpoints[0], next_of=None)
            kind = "path"
        else:
            lowest = min(comp)
            order = _walk(adj, lowest, next_of=min(adj[lowest]))
            kind = "cycle"
        edges = list(zip(order, order[1:]))
        if kind == "cycle":
            edges.append((order[-1], order[0]))
        components.append(Component(kind, tuple(order), tuple(edges)))
    components.sort(key=lambda c: c.vertices[0])
    return components


def _walk(adj, start: int, next_of: int | None) -> list[int]:
    order = [start]
    prev = None
    cur = start
    if next_of is not None:
        order.append(next_of)
        prev, cur = start, next_of
    while True:
        nxt = [u for u in adj[cur] if u != prev]
        if not nxt or nxt[0] == start:
            return order
        order.append(nxt[0])
        prev, cur = cur, nxt[0]


@dataclass(frozen=True)
class CutProfile:
    """Interaction edges crossing each cut of a linear qubit ordering.

    delta[i-1] is the number of edges {u, v} with min position <= i < max
    position (cuts are 1-based); each such edge contributes one merged gate per
    phase layer, so the circuit cut width is p * max(delta).
    """

    ordering: tuple[int, ...]
    deltas: tuple[int, ...]
    p: int

    @property
    def max_delta(self) -> int:
        return max(self.deltas, default=0)

    @property
    def circuit_cut_width(self) -> int:
        return self.p * self.max_delta


def cut_width(instance: QaoaInstance, ordering=None) -> CutProfile:
    """Per-cut crossing counts for any instance (any degree; reporting aid).
    Single-qubit gates cross no cut."""
    n = instance.n
    order = tuple(ordering) if ordering is not None else tuple(range(n))
    if sorted(order) != list(range(n)):
        raise ValueError("ordering must be a permutation of the qubits")
    pos = {q: i + 1 for i, q in enumerate(order)}
    deltas = [0] * (n - 1)
    for u, v in interaction_graph(instance.cost).edges:
        lo, hi = sorted((pos[u], pos[v]))
        for cut in range(lo, hi):
            deltas[cut - 1] += 1
    return CutProfile(order, tuple(deltas), instance.p)


@dataclass
class BoundaryMessage:
    """Contraction frontier: doubled per-layer wire values across a cut.

    `table` has one length-4 axis per phase layer (ket and bra bits combined);
    with the wrap edge of a cycle held open a flat leading axis of size 4^p
    carries the starting frontier as well.
    """

    layers: int
    table: np.ndarray
    open_wrap: bool = False

    @property
    def dimension(self) -> int:
        return self.table.size


# ---------------------------------------------------------------------------
# Tensor construction
# ---------------------------------------------------------------------------

def _effective_tables(instance: QaoaInstance, edges: frozenset[tuple[int, int]]):
    """Merge terms into per-vertex 1-local tables and per-edge 2-local tables.

    Terms on a coupled pair merge into that edge's table; 2-variable terms on
    uncoupled pairs depend on at most one variable and fold into it (constants
    are global phases and drop out of probabilities).
    """
    vertex = {v: np.zeros(2) for v in range(instance.n)}
    edge = {e: np.zeros((2, 2)) for e in edges}
    for t in instance.cost.terms:
        if len(t.support) == 1:
            vertex[t.support[0]] += np.asarray(t.table, dtype=float)
            continue
        s0, s1 = t.support
        tab = np.asarray(t.table, dtype=float).reshape(2, 2)
        key = (min(s0, s1), max(s0, s1))
        if key in edge:
            edge[key] += tab if s0 < s1 else tab.T
        else:
            dep0, dep1 = t.depends_on()
            if dep0:
                vertex[s0] += tab[:, 0]
            elif dep1:
                vertex[s1] += tab[0, :]
    return vertex, edge


def _mixers(betas) -> list[np.ndarray]:
    out = []
    for b in betas:
        c, s = np.cos(b), np.sin(b)
        out.append(np.array([[c, -1j * s], [-1j * s, c]]))
    return out


def _ket_tensor(local: np.ndarray, gammas, mixers) -> np.ndarray:
    """Amplitude tensor over (z^0, ..., z^p) for a single qubit with 1-local
    phase table `local`, up to the global 1/sqrt(2) prep factor."""
    amp = np.ones(2, dtype=complex)
    for gamma, m in zip(gammas, mixers):
        phase = np.exp(-1j * gamma * local)
        amp = amp * phase
        amp = amp[..., None] * m.T  # m.T[z_prev, z_next]
    return amp


def _vertex_tensor(ket: np.ndarray, constraint: int | None) -> np.ndarray:
    """Doubled vertex tensor over interleaved (z,y) layer axes, shape (4,)*p,
    with the output bit fixed or traced out."""
    p = ket.ndim - 1
    outputs = (constraint,) if constraint is not None else (0, 1)
    total = None
    for b in outputs:
        a = ket[..., b]
        t = np.tensordot(a, a.conj(), axes=0)
        total = t if total is None else total + t
    perm = [i for pair in zip(range(p), range(p, 2 * p)) for i in pair]
    return 0.5 * total.transpose(perm).reshape((4,) * p)


def _edge_factors(table: np.ndarray, gammas) -> list[np.ndarray]:
    """Per-layer 4x4 doubled factors for one edge, rows indexed by the left
    vertex's (z,y) pair and columns by the right vertex's."""
    out = []
    for gamma in gammas:
        ph = np.exp(-1j * gamma * table)
        g = np.einsum("ab,cd->acbd", ph, ph.conj()).reshape(4, 4)
        out.append(g)
    return out


def _apply_edge(msg: np.ndarray, factors, offset: int = 0) -> np.ndarray:
    for l, g in enumerate(factors):
        msg = np.moveaxis(np.tensordot(msg, g, axes=([offset + l], [0])), -1, offset + l)
    return msg


# ---------------------------------------------------------------------------
# Component evaluation
# ---------------------------------------------------------------------------

class _Evaluator:
    """Precomputed tensors and a marginal cache for one instance."""

    def __init__(self, instance: QaoaInstance):
        if instance.post_select:
            raise ValueError("degree-2 simulation covers plain (non-post-selected) "
                             "QAOA output distributions only")
        self.instance = instance
        self.graph = interaction_graph(instance.cost)
        self.components = decompose(self.graph)
        self.vertex_tables, self.edge_tables = _effective_tables(
            instance, self.graph.edges)
        self.mixers = _mixers(instance.betas)
        self._ket_cache: dict[int, np.ndarray] = {}
        self._vertex_cache: dict[tuple[int, int | None], np.ndarray] = {}
        self._edge_cache: dict[tuple[int, int], list[np.ndarray]] = {}
        self._marginal_cache: dict = {}
        self.component_of = {}
        for idx, comp in enumerate(self.components):
            for v in comp.vertices:
                self.component_of[v] = idx

    def _ket(self, v: int) -> np.ndarray:
        if v not in self._ket_cache:
            self._ket_cache[v] = _ket_tensor(self.vertex_tables[v],
                                             self.instance.gammas, self.mixers)
        return self._ket_cache[v]

    def _vertex(self, v: int, constraint: int | None) -> np.ndarray:
        key = (v, constraint)
        if key not in self._vertex_cache:
            self._vertex_cache[key] = _vertex_tensor(self._ket(v), constraint)
        return self._vertex_cache[key]

    def _edge(self, u: int, v: int) -> list[np.ndarray]:
        """Layer factors for the step from vertex u to vertex v."""
        key = (min(u, v), max(u, v))
        if key not in self._edge_cache:
            self._edge_cache[key] = _edge_factors(self.edge_tables[key],
                                                  self.instance.gammas)
        factors = self._edge_cache[key]
        if u < v:
            return factors
        return [g.T for g in factors]

    def component_marginal(self, comp_index: int, constraints: dict[int, int]) -> float:
        key = (comp_index, tuple(sorted(constraints.items())))
        if key not in self._marginal_cache:
            self._marginal_cache[key] = self._contract(self.components[comp_index],
                                                       constraints)
        return self._marginal_cache[key]

    def _contract(self, comp: Component, constraints: dict[int, int]) -> float:
        for v in constraints:
            if v not in comp.vertices:
                raise ValueError(f"constraint on vertex {v} outside the component")
        if comp.kind == "isolated":
            return self._isolated(comp.vertices[0], constraints)
        if comp.kind == "path":
            return self._path(comp, constraints)
        return self._cycle(comp, constraints)

    def _isolated(self, v: int, constraints: dict[int, int]) -> float:
        amp = np.full(2, 1 / np.sqrt(2), dtype=complex)
        for gamma, m in zip(self.instance.gammas, self.mixers):
            amp = m @ (np.exp(-1j * gamma * self.vertex_tables[v]) * amp)
        probs = np.abs(amp) ** 2
        return float(probs[constraints[v]]) if v in constraints else float(probs.sum())

    def _path(self, comp: Component, constraints: dict[int, int]) -> float:
        verts = comp.vertices
        msg = BoundaryMessage(self.instance.p,
                              self._vertex(verts[0], constraints.get(verts[0])))
        for prev, cur in zip(verts, verts[1:]):
            table = _apply_edge(msg.table, self._edge(prev, cur))
            msg = BoundaryMessage(msg.layers,
                                  table * self._vertex(cur, constraints.get(cur)))
        return float(msg.table.sum().real)

    def _cycle(self, comp: Component, constraints: dict[int, int]) -> float:
        verts = comp.vertices
        p = self.instance.p
        dim = 4 ** p
        start = self._vertex(verts[0], constraints.get(verts[0])).reshape(-1)
        table = np.zeros((dim, dim), dtype=complex)
        np.fill_diagonal(table, start)
        msg = BoundaryMessage(p, table.reshape((dim,) + (4,) * p), open_wrap=True)
        for prev, cur in zip(verts, verts[1:]):
            t = _apply_edge(msg.table, self._edge(prev, cur), offset=1)
            t = t.reshape(dim, dim) * self._vertex(cur, constraints.get(cur)).reshape(-1)
            msg = BoundaryMessage(p, t.reshape((dim,) + (4,) * p), open_wrap=True)
        closed = _apply_edge(msg.table, self._edge(verts[-1], verts[0]), offset=1)
        return float(np.trace(closed.reshape(dim, dim)).real)

    def marginal(self, constraints: dict[int, int]) -> float:
        split: dict[int, dict[int, int]] = {}
        for v, b in constraints.items():
            split.setdefault(self.component_of[v], {})[v] = b
        result = 1.0
        for idx, cons in split.items():
            result *= self.component_marginal(idx, cons)
        return result


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def component_marginal(component: Component, instance: QaoaInstance,
                       constraints: dict[int, int]) -> float:
    """Exact output-probability marginal of one component: isolated vertices by
    2-dimensional evolution, paths by a left-to-right boundary sweep, cycles by
    holding the wrap edge open; unconstrained vertices are traced out."""
    ev = _Evaluator(instance)
    return ev._contract(component, dict(constraints))


def marginal(instance: QaoaInstance, subset, outcome) -> float:
    """Pr[Z_S = z_S] for the instance's output distribution, as the product of
    per-component marginals (interaction degree must be <= 2)."""
    subset = list(subset)
    bits = [int(b) for b in outcome]
    if len(subset) != len(bits):
        raise ValueError("subset and outcome lengths differ")
    if len(set(subset)) != len(subset):
        raise ValueError("subset has repeated qubits")
    return _Evaluator(instance).marginal(dict(zip(subset, bits)))


def sample(instance: QaoaInstance, seed: int, count: int) -> list[str]:
    """Draw exact samples bit by bit from chain-rule conditionals.

    Components are processed in ascending lowest-vertex order and vertices in
    canonical component order; each bit costs two marginal evaluations, for
    Pr[prefix, Z_t = 0] and Pr[prefix, Z_t = 1].  Randomness comes from
    numpy's PCG64 stream seeded with `seed`, so identical seeds reproduce
    identical samples on any platform.  Bitstrings put qubit 0 leftmost.
    """
    ev = _Evaluator(instance)
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    for _ in range(count):
        bits = [0] * instance.n
        for idx, comp in enumerate(ev.components):
            prefix: dict[int, int] = {}
            for v in comp.vertices:
                p0 = ev.component_marginal(idx, {**prefix, v: 0})
                p1 = ev.component_marginal(idx, {**prefix, v: 1})
                total = p0 + p1
                q0 = min(max(p0 / total, 0.0), 1.0) if total > 0 else 0.5
                bit = 0 if rng.random() < q0 else 1
                prefix[v] = bit
                bits[v] = bit
        out.append("".join(str(b) for b in bits))
    return out
