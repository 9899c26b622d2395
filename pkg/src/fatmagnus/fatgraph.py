"""Once-bordered fatgraphs with homology and free-group edge markings.

Half-edges are integers. An oriented edge is represented by the half-edge at
its head, the vertex it points into; the reverse orientation is the paired
half. The single boundary cycle is the orbit of a fixed successor permutation
on oriented edges, normalized to start at the tail.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .algebra import SYMPLECTIC_SIGN, dot

# Boundary successor of an oriented edge: rotate the paired half by
# next**_ROTATION at its vertex. With this choice the successor of the
# reversed tail is the tail itself, so the cycle runs tail ... reversed-tail.
_ROTATION = 1

# Vertex relations multiply edge markings in this orientation of the stored
# cyclic order (False: as stored; True: reversed).  Calibrated jointly with
# _ROTATION, _CHAIN_BITS and the marking signs against the degree-4
# expansion series of the canonical graph at genus 1..3.
_VERTEX_REVERSED = True

Word = tuple[int, ...]


# -- free-group words ------------------------------------------------------
# letters are nonzero ints: +k is generator k (1-based), -k its inverse;
# generator k corresponds to tensor-algebra letter k-1


def w_reduce(word: Iterable[int]) -> Word:
    out: list[int] = []
    for c in word:
        if c == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -c:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def w_mul(*words: Iterable[int]) -> Word:
    out: list[int] = []
    for w in words:
        for c in w:
            if out and out[-1] == -c:
                out.pop()
            else:
                out.append(c)
    return tuple(out)


def w_inv(word: Sequence[int]) -> Word:
    return tuple(-c for c in reversed(word))


def w_conjugate(word: Sequence[int], by: Sequence[int]) -> Word:
    return w_mul(by, word, w_inv(by))


def w_abelianize(word: Sequence[int], rank: int) -> tuple[int, ...]:
    v = [0] * rank
    for c in word:
        v[abs(c) - 1] += 1 if c > 0 else -1
    return tuple(v)


def w_endo(images: Sequence[Word], word: Sequence[int]) -> Word:
    """Apply the endomorphism generator k -> images[k-1] and reduce."""
    out: list[int] = []
    for c in word:
        img = images[c - 1] if c > 0 else w_inv(images[-c - 1])
        for d in img:
            if out and out[-1] == -d:
                out.pop()
            else:
                out.append(d)
    return tuple(out)


def boundary_word(genus: int) -> Word:
    """The surface relator: the product of [u_i, v_i] over all handles."""
    out: list[int] = []
    for i in range(1, genus + 1):
        out += [i, genus + i, -i, -(genus + i)]
    return tuple(out)


# -- combinatorial fatgraph ------------------------------------------------


class Fatgraph:
    """Trivalent once-bordered fatgraph with a tail.

    vertices: cyclic tuples of half-edge ids; edges: map edge id -> (half,
    half), where the canonical orientation of an edge points at its second
    half; tail: the half at the univalent vertex.
    """

    def __init__(self, vertices: Iterable[Sequence[int]],
                 edges: Mapping[int, tuple[int, int]], tail: int):
        self.vertices = [tuple(v) for v in vertices]
        self.edges = {int(e): (int(a), int(b)) for e, (a, b) in edges.items()}
        self.tail = tail

        seen: set[int] = set()
        for v in self.vertices:
            if not v:
                raise ValueError("empty vertex")
            for h in v:
                if h in seen:
                    raise ValueError(f"half-edge {h} listed twice")
                seen.add(h)
        self.half_edges = seen

        self.pair_: dict[int, int] = {}
        self.edge_of: dict[int, int] = {}
        for e, (a, b) in self.edges.items():
            if a == b:
                raise ValueError(f"edge {e} pairs a half-edge with itself")
            for h in (a, b):
                if h not in seen:
                    raise ValueError(f"edge {e} uses unknown half-edge {h}")
                if h in self.edge_of:
                    raise ValueError(f"half-edge {h} used by two edges")
                self.edge_of[h] = e
            self.pair_[a], self.pair_[b] = b, a
        if set(self.edge_of) != seen:
            missing = sorted(seen - set(self.edge_of))
            raise ValueError(f"half-edges not covered by edges: {missing}")

        self.next_: dict[int, int] = {}
        self.vertex_of: dict[int, int] = {}
        for vi, v in enumerate(self.vertices):
            for j, h in enumerate(v):
                self.next_[h] = v[(j + 1) % len(v)]
                self.vertex_of[h] = vi
        self.prev_ = {b: a for a, b in self.next_.items()}

        if tail not in seen:
            raise ValueError("tail is not a half-edge of the graph")
        for vi, v in enumerate(self.vertices):
            want = 1 if vi == self.vertex_of[tail] else 3
            if len(v) == 1 and vi != self.vertex_of[tail]:
                raise ValueError("univalent vertex away from the tail")
            if len(v) < want or (want == 1 and len(v) != 1):
                raise ValueError(
                    f"vertex {v} has valence {len(v)}, expected {want}")

        self._check_connected()
        self._cycle = self._trace_boundary()
        self._pos = {h: i for i, h in enumerate(self._cycle)}

        v_count, e_count = len(self.vertices), len(self.edges)
        twice = 1 + e_count - v_count
        if twice <= 0 or twice % 2:
            raise ValueError(
                f"V={v_count}, E={e_count} is not a once-bordered surface "
                "with positive genus")
        self._genus = twice // 2

    def _check_connected(self) -> None:
        stack, seen = [self.tail], {self.tail}
        while stack:
            h = stack.pop()
            for nb in (self.next_[h], self.pair_[h]):
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if seen != self.half_edges:
            raise ValueError("graph is not connected")

    def succ(self, h: int) -> int:
        """Boundary-cycle successor of the oriented edge with head h."""
        step = self.next_ if _ROTATION == 1 else self.prev_
        return step[self.pair_[h]]

    def _trace_boundary(self) -> list[int]:
        cycle = [self.tail]
        h = self.succ(self.tail)
        while h != self.tail:
            if len(cycle) > len(self.half_edges):
                raise ValueError("boundary successor does not close up")
            cycle.append(h)
            h = self.succ(h)
        if len(cycle) != len(self.half_edges):
            raise ValueError(
                f"{len(cycle)} of {len(self.half_edges)} oriented edges on "
                "the boundary: not once-bordered")
        return cycle

    # -- queries ----------------------------------------------------------

    def boundary_cycle(self) -> list[int]:
        """All oriented edges in boundary order, starting at the tail."""
        return list(self._cycle)

    def genus(self) -> int:
        return self._genus

    def reverse(self, h: int) -> int:
        return self.pair_[h]

    def oriented(self, edge_id: int) -> int:
        """The canonical orientation of an edge: head = its second half."""
        return self.edges[edge_id][1]

    def is_trivalent(self) -> bool:
        tail_v = self.vertex_of[self.tail]
        return all(len(v) == 3 for i, v in enumerate(self.vertices)
                   if i != tail_v)

    def skew_pair(self, a: int, b: int) -> int:
        """Linking pattern of two oriented edges along the boundary."""
        if self.edge_of[a] == self.edge_of[b]:
            return 0
        L = len(self._cycle)
        base = self._pos[a]
        rb = (self._pos[b] - base) % L
        rar = (self._pos[self.pair_[a]] - base) % L
        rbr = (self._pos[self.pair_[b]] - base) % L
        if rb < rar < rbr:
            return -1
        if rbr < rar < rb:
            return 1
        return 0

    def edge_path_to_reverse(self, x: int) -> Optional[list[int]]:
        """The boundary arc x ... reverse(x) avoiding the tail, or None.

        The tail's own path is the whole boundary cycle; exactly one of
        x, reverse(x) has a path for every other edge.
        """
        p, q = self._pos[x], self._pos[self.pair_[x]]
        if p > q:
            return None
        return self._cycle[p:q + 1]

    def movable_edges(self) -> list[int]:
        out = []
        for e, (a, b) in self.edges.items():
            if self.vertex_of[a] == self.vertex_of[b]:
                continue
            if len(self.vertices[self.vertex_of[a]]) != 3:
                continue
            if len(self.vertices[self.vertex_of[b]]) != 3:
                continue
            out.append(e)
        return sorted(out)


def rooted_isomorphism(g1: Fatgraph, g2: Fatgraph) -> Optional[dict[int, int]]:
    """The unique half-edge bijection g1 -> g2 fixing the tail and commuting
    with both pair and next, if one exists."""
    if len(g1.half_edges) != len(g2.half_edges):
        return None
    iso = {g1.tail: g2.tail}
    stack = [g1.tail]
    while stack:
        h = stack.pop()
        for f1, f2 in ((g1.next_, g2.next_), (g1.pair_, g2.pair_)):
            a, b = f1[h], f2[iso[h]]
            if a in iso:
                if iso[a] != b:
                    return None
            elif b in iso.values():
                return None
            else:
                iso[a] = b
                stack.append(a)
    if len(iso) != len(g1.half_edges):
        return None
    return iso


# -- markings --------------------------------------------------------------


HVec = tuple[Fraction, ...]


def _as_hvec(v: Sequence, genus: int) -> HVec:
    vec = tuple(Fraction(x) for x in v)
    if len(vec) != 2 * genus:
        raise ValueError(f"marking vector has length {len(vec)}, "
                         f"expected {2 * genus}")
    return vec


def _vertex_order(cycle: Sequence[int]) -> tuple[int, ...]:
    return tuple(reversed(cycle)) if _VERTEX_REVERSED else tuple(cycle)


def solve_vertex_word(order: Sequence[int], known: Mapping[int, Word],
                      unknown: int) -> Word:
    """Solve the cyclic product relation for one missing edge word."""
    order = _vertex_order(order)
    p = order.index(unknown)
    rest = [known[order[(p + j) % len(order)]] for j in range(1, len(order))]
    return w_inv(w_mul(*rest)) if rest else ()


class MarkedFatgraph:
    """A fatgraph together with an H-marking and optional pi-marking.

    h maps every half-edge (as an oriented edge) to its homology vector;
    pi, when given, maps every half-edge to a reduced free-group word.
    Validation is eager and raises ValueError with a diagnostic.
    """

    def __init__(self, graph: Fatgraph, h: Mapping[int, Sequence],
                 pi: Optional[Mapping[int, Sequence[int]]] = None):
        self.graph = graph
        g = graph.genus()
        self.h: dict[int, HVec] = {
            half: _as_hvec(vec, g) for half, vec in h.items()}
        self.pi: Optional[dict[int, Word]] = None
        if pi is not None:
            self.pi = {half: w_reduce(word) for half, word in pi.items()}
        self._validate()

    def genus(self) -> int:
        return self.graph.genus()

    def h_of(self, half: int) -> HVec:
        return self.h[half]

    def pi_of(self, half: int) -> Word:
        if self.pi is None:
            raise ValueError("no pi-marking present")
        return self.pi[half]

    def _validate(self) -> None:
        G = self.graph
        g = G.genus()
        if set(self.h) != G.half_edges:
            raise ValueError("H-marking must cover every oriented edge")
        zero = tuple(Fraction(0) for _ in range(2 * g))
        for half in G.half_edges:
            if tuple(-c for c in self.h[half]) != self.h[G.pair_[half]]:
                raise ValueError(
                    f"H-marking not odd under reversal at half-edge {half}")
        if self.h[G.tail] != zero:
            raise ValueError("tail H-marking must vanish")
        tail_v = G.vertex_of[G.tail]
        for vi, v in enumerate(G.vertices):
            if vi == tail_v:
                continue
            total = [Fraction(0)] * 2 * g
            for half in v:
                for j, c in enumerate(self.h[half]):
                    total[j] += c
            if any(total):
                raise ValueError(f"H-marking does not balance at vertex {v}")
        if self._h_rank() != 2 * g:
            raise ValueError("marking values do not span the full homology")

        if self.pi is None:
            return
        if set(self.pi) != G.half_edges:
            raise ValueError("pi-marking must cover every oriented edge")
        for half in G.half_edges:
            if w_inv(self.pi[half]) != self.pi[G.pair_[half]]:
                raise ValueError(
                    f"pi-marking not inverse under reversal at {half}")
            if w_abelianize(self.pi[half], 2 * g) != \
                    tuple(self.h[half]):
                raise ValueError(
                    f"pi-marking abelianization mismatch at {half}")
        for vi, v in enumerate(G.vertices):
            if vi == tail_v:
                continue
            if w_mul(*(self.pi[half] for half in _vertex_order(v))):
                raise ValueError(f"pi-marking product at vertex {v} is not 1")
        if self.pi[G.pair_[G.tail]] != boundary_word(g):
            raise ValueError(
                "pi-marking of the reversed tail is not the boundary word")

    def _h_rank(self) -> int:
        rows = [list(self.h[half]) for half in sorted(self.graph.half_edges)]
        rank, ncols = 0, 2 * self.graph.genus()
        for col in range(ncols):
            piv = next((r for r in range(rank, len(rows))
                        if rows[r][col] != 0), None)
            if piv is None:
                continue
            rows[rank], rows[piv] = rows[piv], rows[rank]
            prow = rows[rank]
            for r in range(len(rows)):
                if r != rank and rows[r][col] != 0:
                    f = rows[r][col] / prow[col]
                    rows[r] = [x - f * y for x, y in zip(rows[r], prow)]
            rank += 1
        return rank

    def is_geometric(self, sign: int = SYMPLECTIC_SIGN) -> bool:
        """Whether the boundary linking of every edge pair matches the
        symplectic pairing of the H-marking vectors."""
        halves = sorted(self.graph.half_edges)
        for i, a in enumerate(halves):
            for b in halves[i + 1:]:
                if self.graph.skew_pair(a, b) != dot(self.h[a], self.h[b],
                                                     sign):
                    return False
        return True

    def with_h(self, h: Mapping[int, Sequence],
               pi: Optional[Mapping[int, Sequence[int]]] = None
               ) -> "MarkedFatgraph":
        return MarkedFatgraph(self.graph, h, pi)

    def apply_basis_change(self, matrix: Sequence[Sequence]) -> "MarkedFatgraph":
        """Replace every marking vector v by v . matrix (rows are the images
        of the basis letters). The pi-marking does not transport and is
        dropped."""
        g = self.genus()
        n = 2 * g
        if len(matrix) != n or any(len(r) != n for r in matrix):
            raise ValueError("matrix must be 2g x 2g")
        new_h = {}
        for half, vec in self.h.items():
            out = [Fraction(0)] * n
            for i, c in enumerate(vec):
                if c:
                    for j in range(n):
                        out[j] += c * Fraction(matrix[i][j])
            new_h[half] = tuple(out)
        return MarkedFatgraph(self.graph, new_h, None)


# -- Whitehead moves -------------------------------------------------------


@dataclass(frozen=True)
class WhiteheadMove:
    """One edge collapse-and-reexpand, with the four surrounding oriented
    edges recorded as (a, b, c, d): a, b point into the head vertex of the
    collapsed edge e, c, d into its source vertex, each pair listed in the
    orientation the vertex relations are read in. The new edge f reuses e's
    half-edges; e_head is the head half of e in the source and of f in the
    result, and f ends up between a and d."""
    source: MarkedFatgraph
    result: MarkedFatgraph
    edge_id: int
    a: int
    b: int
    c: int
    d: int
    e_head: int


def whitehead(mg: MarkedFatgraph, edge_id: int) -> WhiteheadMove:
    G = mg.graph
    if edge_id not in G.edges:
        raise ValueError(f"no edge {edge_id}")
    e0, e1 = G.edges[edge_id]
    if G.edge_of[G.tail] == edge_id:
        raise ValueError("cannot move on the tail edge")
    v1, v2 = G.vertex_of[e1], G.vertex_of[e0]
    if v1 == v2:
        raise ValueError(f"edge {edge_id} is a loop")
    if len(G.vertices[v1]) != 3 or len(G.vertices[v2]) != 3:
        raise ValueError(f"edge {edge_id} does not join trivalent vertices")

    # labels follow the vertex-relation reading direction, which is the
    # reverse of the stored cyclic order
    b = G.next_[e1]
    a = G.next_[b]
    d = G.next_[e0]
    c = G.next_[d]

    new_vertices = [v for i, v in enumerate(G.vertices) if i not in (v1, v2)]
    new_vertices.append((e1, a, d))
    new_vertices.append((e0, c, b))
    graph2 = Fatgraph(new_vertices, G.edges, G.tail)

    g = mg.genus()
    h2 = dict(mg.h)
    f_vec = tuple(-(x + y) for x, y in zip(mg.h[a], mg.h[d]))
    h2[e1] = f_vec
    h2[e0] = tuple(-x for x in f_vec)
    pi2 = None
    if mg.pi is not None:
        pi2 = dict(mg.pi)
        known = {a: mg.pi[a], d: mg.pi[d]}
        f_word = solve_vertex_word((e1, a, d), known, e1)
        pi2[e1] = f_word
        pi2[e0] = w_inv(f_word)
    result = MarkedFatgraph(graph2, h2, pi2)
    return WhiteheadMove(mg, result, edge_id, a, b, c, d, e1)


@dataclass(frozen=True)
class MovePath:
    """A composable sequence of Whitehead moves with all intermediates."""
    initial: MarkedFatgraph
    moves: tuple[WhiteheadMove, ...]

    @property
    def final(self) -> MarkedFatgraph:
        return self.moves[-1].result if self.moves else self.initial

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(m.edge_id for m in self.moves)

    def __len__(self) -> int:
        return len(self.moves)


def apply_path(mg: MarkedFatgraph, edge_ids: Sequence[int]) -> MovePath:
    moves = []
    current = mg
    for step, e in enumerate(edge_ids):
        try:
            mv = whitehead(current, e)
        except ValueError as exc:
            raise ValueError(f"step {step} (edge {e}): {exc}") from exc
        moves.append(mv)
        current = mv.result
    return MovePath(mg, tuple(moves))


def markings_equal(m1: MarkedFatgraph, m2: MarkedFatgraph,
                   iso: Mapping[int, int]) -> bool:
    for half in m1.graph.half_edges:
        if m1.h[half] != m2.h[iso[half]]:
            return False
    if (m1.pi is None) != (m2.pi is None):
        return False
    if m1.pi is not None:
        for half in m1.graph.half_edges:
            if m1.pi[half] != m2.pi[iso[half]]:
                return False
    return True


def pi_verify(path: MovePath, images: Sequence[Word]) -> bool:
    """Whether the path realizes the free-group endomorphism sending
    generator k to images[k-1], compared edge by edge through the rooted
    isomorphism between the endpoints."""
    start, end = path.initial, path.final
    if start.pi is None or end.pi is None:
        raise ValueError("pi_verify needs pi-markings on both ends")
    iso = rooted_isomorphism(start.graph, end.graph)
    if iso is None:
        raise ValueError("endpoint fatgraphs are not isomorphic")
    for half in start.graph.half_edges:
        if w_endo(images, start.pi[half]) != end.pi[iso[half]]:
            return False
    return True


# -- the canonical chain-of-handles graph ----------------------------------

# cyclic-order orientation per vertex type, frozen by the calibration
# search against the degree-4 expansion series and geometricity
_CHAIN_BITS = {"S": 0, "X": 0, "A": 0, "B": 0}
_MARK_SWAP = False
_MARK_SIGNS = (1, 1)


def _build_chain(g: int, bits: Mapping[str, int], mark_swap: bool,
                 mark_signs: tuple[int, int]):
    """Construct the genus-g chain graph; returns (graph, edge name map).

    Handle blocks hang left to right off a spine of junction vertices, each
    attached by a single separating edge, with handle g closing the spine.
    Handle i is a theta-shaped block: frame edges p_i, q_i from its entry
    vertex to the two endpoints of the parallel handle edges u_i, v_i.  The
    spine edge with h handles beyond it is named s_h; it serves as the
    virtual tail of the genus-h subgraph it separates.  Junction i also
    carries the connector c_i leading down into handle block i.
    """
    counter = 0
    edges: dict[int, tuple[int, int]] = {}
    names: dict[str, int] = {}

    def edge(name: str) -> tuple[int, int]:
        nonlocal counter
        h0, h1 = counter, counter + 1
        counter += 2
        names[name] = len(edges)
        edges[len(edges)] = (h0, h1)
        return h0, h1

    vertices: list[tuple[int, ...]] = []

    def vtx(kind: str, *halves: int) -> None:
        order = tuple(reversed(halves)) if bits[kind] else tuple(halves)
        vertices.append(order)

    def block(i: int, entry: int) -> None:
        xp, pa = edge(f"p{i}")
        xq, qb = edge(f"q{i}")
        ua, ub = edge(f"u{i}")
        va, vb = edge(f"v{i}")
        vtx("X", entry, xp, xq)
        vtx("A", pa, ua, va)
        vtx("B", ub, vb, qb)

    t0, t1 = edge("t")
    along = t1
    for i in range(1, g):
        cs, cx = edge(f"c{i}")
        ss, sx = edge(f"s{g - i}")
        vtx("S", along, cs, ss)
        block(i, cx)
        along = sx
    block(g, along)
    vertices.append((t0,))

    graph = Fatgraph(vertices, edges, tail=t0)
    return graph, names, mark_swap, mark_signs


def _solve_markings(graph: Fatgraph, names: Mapping[str, int], g: int,
                    mark_swap: bool, mark_signs: tuple[int, int]
                    ) -> dict[int, Word]:
    """Assign generators to the handle edges and solve all other words from
    the vertex relations, working upward from the leaves of the spanning
    tree of non-handle edges."""
    pi: dict[int, Word] = {}
    handle_edges = set()
    for i in range(1, g + 1):
        gen_u, gen_v = i, g + i
        if mark_swap:
            gen_u, gen_v = gen_v, gen_u
        for sym, gen, sgn in (("u", gen_u, mark_signs[0]),
                              ("v", gen_v, mark_signs[1])):
            eid = names[f"{sym}{i}"]
            handle_edges.add(eid)
            head = graph.oriented(eid)
            pi[head] = (sgn * gen,)
            pi[graph.pair_[head]] = (-sgn * gen,)

    # spanning tree = all non-handle edges; BFS depth from the tail vertex
    tail_v = graph.vertex_of[graph.tail]
    depth = {tail_v: 0}
    parent_half: dict[int, int] = {}
    queue = [tail_v]
    while queue:
        v = queue.pop(0)
        for half in graph.vertices[v]:
            if graph.edge_of[half] in handle_edges:
                continue
            other = graph.vertex_of[graph.pair_[half]]
            if other not in depth:
                depth[other] = depth[v] + 1
                # oriented edge pointing from other toward the root
                parent_half[other] = half
                queue.append(other)
    if len(depth) != len(graph.vertices):
        raise ValueError("non-handle edges do not span the graph")

    for v in sorted(depth, key=lambda v: -depth[v]):
        if v == tail_v:
            continue
        up = parent_half[v]
        order = graph.vertices[graph.vertex_of[graph.pair_[up]]]
        known = {h: pi[h] for h in order if h != graph.pair_[up]}
        word = solve_vertex_word(order, known, graph.pair_[up])
        pi[graph.pair_[up]] = word
        pi[up] = w_inv(word)
    return pi


def symplectic_graph(g: int) -> MarkedFatgraph:
    """The canonical marked genus-g fatgraph: a chain of handle blocks with
    the tail at the left end, marked by the standard symplectic generators."""
    if g < 1:
        raise ValueError("genus must be >= 1")
    graph, names, swap, signs = _build_chain(
        g, _CHAIN_BITS, _MARK_SWAP, _MARK_SIGNS)
    pi = _solve_markings(graph, names, g, swap, signs)
    h = {half: w_abelianize(word, 2 * g) for half, word in pi.items()}
    mg = MarkedFatgraph(graph, h, pi)
    mg.edge_names = dict(names)
    return mg


def symplectic_edge_names(g: int) -> dict[str, int]:
    _, names, _, _ = _build_chain(g, _CHAIN_BITS, _MARK_SWAP, _MARK_SIGNS)
    return names
