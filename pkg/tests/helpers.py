"""Shared hypothesis strategies and small utilities for the test suite."""

from fractions import Fraction

from hypothesis import strategies as st

from fatmagnus.algebra import IAMap, TruncatedTensor
from fatmagnus.fatgraph import (
    Fatgraph,
    MarkedFatgraph,
    apply_path,
    solve_vertex_word,
    w_abelianize,
    w_inv,
    whitehead,
)

coeffs = st.fractions(
    min_value=-4, max_value=4, max_denominator=6).filter(lambda c: c != 0)


@st.composite
def tensors(draw, genus=1, max_degree=4, min_degree=0, max_terms=4):
    """A random truncated tensor with a handful of small-coefficient terms."""
    t = TruncatedTensor(genus, max_degree)
    nterms = draw(st.integers(0, max_terms))
    for _ in range(nterms):
        d = draw(st.integers(min_degree, max_degree))
        word = tuple(draw(st.lists(
            st.integers(0, 2 * genus - 1), min_size=d, max_size=d)))
        t = t + TruncatedTensor.from_word(genus, word, draw(coeffs), max_degree)
    return t


@st.composite
def lie_tensors(draw, genus=1, max_degree=4, max_terms=3):
    """A random Lie element: a combination of right-bracketed words."""
    from fatmagnus.algebra import right_bracketing

    t = TruncatedTensor(genus, max_degree)
    for _ in range(draw(st.integers(1, max_terms))):
        d = draw(st.integers(1, max_degree))
        word = tuple(draw(st.lists(
            st.integers(0, 2 * genus - 1), min_size=d, max_size=d)))
        t = t + right_bracketing(genus, word, max_degree).scaled(draw(coeffs))
    return t


@st.composite
def ia_maps(draw, genus=1, max_degree=4):
    corr = [draw(tensors(genus, max_degree, min_degree=2, max_terms=2))
            for _ in range(2 * genus)]
    return IAMap(genus, corr, max_degree)


def frac(p, q=1):
    return Fraction(p, q)


def figure_eight():
    """Genus-1 graph with a single 5-valent vertex carrying two loops.

    Valid and marked, but not trivalent; exercises rejection paths.
    """
    t0, t1, a0, a1, b0, b1 = range(6)
    edges = {0: (t0, t1), 1: (a0, a1), 2: (b0, b1)}
    verts = [(t0,), (t1, a1, b1, a0, b0)]
    G = Fatgraph(verts, edges, tail=t0)
    pi = {a0: (1,), a1: (-1,), b0: (2,), b1: (-2,)}
    known = {h: pi[h] for h in verts[1] if h != t1}
    pi[t1] = solve_vertex_word(verts[1], known, t1)
    pi[t0] = w_inv(pi[t1])
    h = {x: w_abelianize(w, 2) for x, w in pi.items()}
    return MarkedFatgraph(G, h, pi)


def random_walk(mg, steps, rng):
    """A random Whitehead-move path of the given length, as a MovePath."""
    ids = []
    cur = mg
    for _ in range(steps):
        eid = rng.choice(cur.graph.movable_edges())
        ids.append(eid)
        cur = whitehead(cur, eid).result
    return apply_path(mg, ids)


def random_symplectic_matrix(genus, rng, transvections=3):
    """Random integral symplectic matrix as a product of transvections
    x -> x + dot(x, a) a; rows are letter images, the convention of
    MarkedFatgraph.apply_basis_change."""
    from fatmagnus.algebra import dot, is_symplectic_matrix

    n = 2 * genus
    mat = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(transvections):
        a = [rng.randint(-1, 1) for _ in range(n)]
        if not any(a):
            a[rng.randrange(n)] = 1
        pair = [int(dot([int(k == i) for k in range(n)], a))
                for i in range(n)]
        tr = [[int(i == j) + pair[i] * a[j] for j in range(n)]
              for i in range(n)]
        mat = [[sum(mat[i][k] * tr[k][j] for k in range(n))
                for j in range(n)] for i in range(n)]
    assert is_symplectic_matrix(genus, mat)
    return mat


def single_sector_vector(mg, edge_id, x):
    """Classify a test half-edge whose boundary run to its reverse crosses
    exactly one corner of the move on edge_id.

    Returns (sector label, pairing triple against the labels a, b, c).
    Asserts the structure that makes the reading well posed: the labels
    sit on four distinct edges, and the only a/b/c crossings between x
    and its reverse are the consecutive halves of a single corner
    passage.
    """
    from fatmagnus.algebra import dot

    G = mg.graph
    mv = whitehead(mg, edge_id)
    a, b, c, d = mv.a, mv.b, mv.c, mv.d
    e0, e1 = G.edges[edge_id]
    pr = G.pair_
    label_edges = {G.edge_of[h] for h in (a, b, c, d)}
    assert len(label_edges) == 4 and edge_id not in label_edges
    assert G.edge_of[x] not in label_edges | {edge_id, G.edge_of[G.tail]}
    passages = {
        "I": (pr[a], e1, d),
        "II": (pr[b], a),
        "III": (pr[c], e0, b),
        "IV": (pr[d], c),
    }
    cyc = G.boundary_cycle()
    i, j = cyc.index(x), cyc.index(pr[x])
    seg = cyc[i + 1:j] if i < j else cyc[i + 1:] + cyc[:j]
    abc = {a, pr[a], b, pr[b], c, pr[c]}
    hits = [h for h in seg if h in abc]
    for label, pat in passages.items():
        if hits != [h for h in pat if h in abc]:
            continue
        if not all(h in seg for h in pat):
            continue
        pos = [seg.index(h) for h in pat]
        assert pos == list(range(pos[0], pos[0] + len(pat)))
        return label, tuple(dot(mg.h[x], mg.h[y]) for y in (a, b, c))
    raise AssertionError("not a single-sector test edge")
