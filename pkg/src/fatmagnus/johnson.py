"""Graded automorphism data carried by Whitehead moves.

Each move induces an automorphism of the completed free Lie algebra that
fixes degree one; its graded pieces are linear maps from homology into
Lie elements one degree higher.  A closed Hausdorff-series formula
computes these pieces from the source table alone, an independent solver
recovers them by comparing the two expansion tables, and move paths
compose them as substitution maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .algebra import (
    IAMap,
    SYMPLECTIC_SIGN,
    TruncatedTensor,
    dot,
    hausdorff_tail,
    is_lie,
)
from .fatgraph import MarkedFatgraph, MovePath, WhiteheadMove
from .magnus import get_table

SECTOR_LABELS = ("I", "II", "III", "IV")


def _check_degree(m: int) -> None:
    if m < 1:
        raise ValueError("degree must be >= 1")


# -- Poincare duality ------------------------------------------------------


def dual_vector(genus: int, letter: int,
                sign: int = SYMPLECTIC_SIGN) -> tuple[int, ...]:
    """The homology vector whose pairing reads off one letter coefficient.

    dot(dual_vector(g, j), x) == x[j] for every vector x.  This function
    owns the convention identifying maps on homology with tensors, so any
    sign choice lives here and nowhere else.
    """
    vec = [0] * (2 * genus)
    if letter < genus:
        vec[genus + letter] = -sign
    else:
        vec[letter - genus] = sign
    return tuple(vec)


def bracket_map(values: Sequence[TruncatedTensor]) -> TruncatedTensor:
    """Contract a homology-to-Lie map into a single Lie element.

    The input lists the map's values on the letter basis; the result sums
    [dual letter, value].  Its kernel singles out the good subspaces that
    wedge powers of homology embed into.
    """
    if len(values) % 2 or not values:
        raise ValueError("need one value per letter")
    g = values[0].genus
    if len(values) != 2 * g:
        raise ValueError("need one value per letter")
    # lift one degree so the bracket of top-degree values is not cut off
    n = values[0].max_degree + 1
    out = TruncatedTensor(g, n)
    for j, v in enumerate(values):
        d = TruncatedTensor.from_vector(g, dual_vector(g, j), n)
        out = out + d.bracket(v.truncated(n))
    return out


# -- graded values ---------------------------------------------------------


@dataclass(frozen=True)
class GradedTau:
    """Graded pieces of a move (or path) automorphism.

    values[k] lists, per basis letter, the degree-(k+1) Lie element the
    automorphism adds to that letter; pairing with dual_vector turns the
    list back into a homology tensor.
    """

    genus: int
    values: Mapping[int, tuple[TruncatedTensor, ...]]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values",
            {int(k): tuple(v) for k, v in sorted(self.values.items())})
        for k, vals in self.values.items():
            if k < 1:
                raise ValueError("degrees start at 1")
            if len(vals) != 2 * self.genus:
                raise ValueError(f"degree {k} needs one value per letter")
            for v in vals:
                if v.graded(k + 1) != v:
                    raise ValueError(
                        f"degree-{k} value is not pure of degree {k + 1}")
                if not is_lie(v):
                    raise ValueError(f"degree-{k} value is not a Lie element")

    def degrees(self) -> tuple[int, ...]:
        return tuple(self.values)

    def value(self, k: int, vec: Sequence[Fraction | int]) -> TruncatedTensor:
        """The degree-k piece evaluated on a homology vector."""
        vals = self.values[k]
        out = TruncatedTensor(self.genus, vals[0].max_degree)
        for j, v in enumerate(vals):
            c = Fraction(vec[j])
            if c:
                out = out + v.scaled(c)
        return out

    def pairs(self, k: int) -> list[tuple[tuple[int, ...], TruncatedTensor]]:
        """Structured form of one degree: (dual basis vector, Lie series)."""
        return [(dual_vector(self.genus, j), v)
                for j, v in enumerate(self.values[k])]

    def bracket_image(self, k: int) -> TruncatedTensor:
        return bracket_map(self.values[k])

    def is_zero(self) -> bool:
        return all(v.is_zero() for vals in self.values.values() for v in vals)


@dataclass(frozen=True)
class MoveTau:
    """A Whitehead move together with its graded automorphism data."""

    move: WhiteheadMove
    tau: GradedTau

    def __post_init__(self) -> None:
        if self.tau.genus != self.move.source.genus():
            raise ValueError("genus mismatch")


@dataclass(frozen=True)
class SectorContribution:
    """One corner passage's share of a move automorphism, per degree."""

    label: str
    values: Mapping[int, TruncatedTensor]

    def __post_init__(self) -> None:
        if self.label not in SECTOR_LABELS:
            raise ValueError(f"unknown sector {self.label!r}")
        object.__setattr__(
            self, "values", dict(sorted(self.values.items())))


def derive(values: Sequence[TruncatedTensor],
           t: TruncatedTensor) -> TruncatedTensor:
    """Extend a letter-to-tensor map to a derivation over words.

    values lists the image of each letter; every letter occurrence in t
    is replaced in turn and the results summed.  Turns the degree-1 data
    of a GradedTau into an operator on higher Lie elements.
    """
    g, n = t.genus, t.max_degree
    if len(values) != 2 * g:
        raise ValueError("need one value per letter")
    out = TruncatedTensor(g, n)
    for word, coeff in t.terms():
        for i, letter in enumerate(word):
            pre = TruncatedTensor.from_word(g, word[:i], max_degree=n)
            post = TruncatedTensor.from_word(g, word[i + 1:], coeff,
                                             max_degree=n)
            out = out + pre * values[letter] * post
    return out


# -- closed formula --------------------------------------------------------


def _unit_vectors(genus: int) -> list[tuple[int, ...]]:
    n = 2 * genus
    return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]


def tensor_values(genus: int, parts: Sequence[tuple[Sequence, TruncatedTensor]],
                  scale: Fraction = Fraction(1)) -> tuple[TruncatedTensor, ...]:
    """Map values of sum_i vec_i (x) S_i on the letter basis, scaled.

    A tensor vec (x) S acts on homology by x -> dot(vec, x) S; this
    evaluates such a sum on the letter basis, ready to feed a GradedTau.
    """
    units = _unit_vectors(genus)
    out = []
    for u in units:
        acc = None
        for vec, series in parts:
            c = dot(vec, u)
            if c:
                term = series.scaled(c * scale)
                acc = term if acc is None else acc + term
        if acc is None:
            acc = TruncatedTensor(genus, parts[0][1].max_degree)
        out.append(acc)
    return tuple(out)


def _sector_tails(move: WhiteheadMove, n: int) -> dict[str, TruncatedTensor]:
    tab = get_table(move.source, n)
    la, lb, lc, ld = (tab.ell(x)
                      for x in (move.a, move.b, move.c, move.d))
    third = Fraction(1, 3)
    return {
        "I": hausdorff_tail(lb, lc).scaled(-third),
        "II": hausdorff_tail(lc, ld).scaled(third),
        "III": hausdorff_tail(ld, la).scaled(-third),
        "IV": hausdorff_tail(la, lb).scaled(third),
    }


def sector_contributions(move: WhiteheadMove,
                         m: int) -> tuple[SectorContribution, ...]:
    """The four corner passages of a move, as signed Hausdorff tails.

    Their sum vanishes in every degree because the boundary cycle of the
    tail crosses all four corners while carrying zero homology.
    """
    _check_degree(m)
    tails = _sector_tails(move, m + 1)
    return tuple(
        SectorContribution(
            lab, {k: tails[lab].graded(k + 1) for k in range(1, m + 1)})
        for lab in SECTOR_LABELS)


def tau_move(move: WhiteheadMove, m: int) -> MoveTau:
    """All graded pieces of the move automorphism through degree m.

    Built from the source table alone: three times the degree-k piece is
    the homology tensor with the labels a, b, c against Hausdorff tails
    of the surrounding series.
    """
    _check_degree(m)
    src = move.source
    g = src.genus()
    tails = _sector_tails(move, m + 1)
    av, bv, cv = (src.h[x] for x in (move.a, move.b, move.c))
    values = {}
    # reconstruction from the corner pieces: a(x)I + b(x)(I+II) - c(x)IV,
    # with the overall orientation pinned against the table-comparison
    # solver (the corner pieces alone leave a global sign free)
    for k in range(1, m + 1):
        parts = [
            (av, tails["I"].graded(k + 1)),
            (bv, (tails["I"] + tails["II"]).graded(k + 1)),
            (cv, tails["IV"].graded(k + 1).scaled(-1)),
        ]
        values[k] = tensor_values(g, parts)
    return MoveTau(move, GradedTau(g, values))


# -- printed low-degree formulas (independent transcriptions) --------------


def tau2_closed(move: WhiteheadMove) -> MoveTau:
    """Degree-2 piece from the explicit bracket formula over P-values."""
    n = 3
    src = move.source
    g = src.genus()
    tab = get_table(src, n)
    ha, hb, hc, _ = (TruncatedTensor.from_vector(g, src.h[x], n)
                     for x in (move.a, move.b, move.c, move.d))
    pa, pb, pc = (tab.P(x) for x in (move.a, move.b, move.c))
    sa = hb.bracket(pc) - hc.bracket(pb) + (hb - hc).bracket(hb.bracket(hc))
    sb = (hc.bracket(pa) - ha.bracket(pc)
          - ha.bracket(hb.bracket(hc)).scaled(4)
          - (ha - hb.scaled(2) - hc).bracket(ha.bracket(hc)))
    sc = ha.bracket(pb) - hb.bracket(pa) + (ha - hb).bracket(ha.bracket(hb))
    parts = [(src.h[move.a], sa), (src.h[move.b], sb), (src.h[move.c], sc)]
    values = {2: tensor_values(g, parts, Fraction(-1, 36))}
    return MoveTau(move, GradedTau(g, values))


def tau3_closed(move: WhiteheadMove) -> MoveTau:
    """Degree-3 piece from the explicit bracket formula over P and Q."""
    n = 4
    src = move.source
    g = src.genus()
    tab = get_table(src, n)
    a, b, c, _ = (TruncatedTensor.from_vector(g, src.h[x], n)
                  for x in (move.a, move.b, move.c, move.d))
    pa, pb, pc = (tab.P(x) for x in (move.a, move.b, move.c))
    qa, qb, qc = (tab.Q(x) for x in (move.a, move.b, move.c))

    def br(x, y):
        return x.bracket(y)

    sa = (br(b, qc) + br(b, br(b, pc)) - br(b, br(c, pb)).scaled(2)
          + br(b, br(c, pc)) - br(b, br(c, br(b, c))).scaled(3)
          - br(c, qb) + br(c, br(b, pb)) - br(c, br(b, pc)).scaled(2)
          + br(c, br(c, pb)) + br(pb, pc))
    sb = (-br(a, qc) - br(a, br(a, pc))
          - br(a, br(a, br(b, c))).scaled(6) - br(a, br(b, pc)).scaled(4)
          + br(a, br(b, br(a, c))).scaled(6)
          - br(a, br(b, br(b, c))).scaled(6)
          + br(a, br(c, pa)).scaled(2) + br(a, br(c, pb)).scaled(2)
          - br(a, br(c, pc)) + br(a, br(c, br(a, c))).scaled(3)
          + br(b, br(a, pc)).scaled(2) + br(b, br(a, br(b, c))).scaled(6)
          + br(b, br(c, pa)).scaled(2)
          + br(c, qa) - br(c, br(a, pa)) + br(c, br(a, pb)).scaled(2)
          + br(c, br(a, pc)).scaled(2) + br(c, br(a, br(b, c))).scaled(6)
          - br(c, br(b, pa)).scaled(4) - br(c, br(c, pa))
          - br(pa, pc))
    sc = (br(a, qb) + br(a, br(a, pb)) - br(a, br(b, pa)).scaled(2)
          + br(a, br(b, pb)) - br(a, br(b, br(a, b))).scaled(3)
          - br(b, qa) + br(b, br(a, pa)) - br(b, br(a, pb)).scaled(2)
          + br(b, br(b, pa)) + br(pa, pb))
    parts = [(src.h[move.a], sa), (src.h[move.b], sb), (src.h[move.c], sc)]
    values = {3: tensor_values(g, parts, Fraction(-1, 216))}
    return MoveTau(move, GradedTau(g, values))


# -- table-comparison solver -----------------------------------------------


def _invert_matrix(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(rows)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)]
           for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [r[n:] for r in aug]


def _basis_halves(mg: MarkedFatgraph, avoid_edges) -> list[int]:
    """Half-edges avoiding the given edges whose markings form a basis."""
    g = mg.genus()
    chosen: list[int] = []
    rows: list[list[Fraction]] = []
    for h in sorted(mg.graph.half_edges):
        if mg.graph.edge_of[h] in avoid_edges:
            continue
        cand = [Fraction(c) for c in mg.h[h]]
        work = [list(r) for r in rows] + [list(cand)]
        # incremental rank check by elimination
        rank = 0
        for col in range(2 * g):
            piv = next((r for r in range(rank, len(work)) if work[r][col]),
                       None)
            if piv is None:
                continue
            work[rank], work[piv] = work[piv], work[rank]
            prow = work[rank]
            for r in range(len(work)):
                if r != rank and work[r][col]:
                    f = work[r][col] / prow[col]
                    work[r] = [x - f * y for x, y in zip(work[r], prow)]
            rank += 1
        if rank > len(rows):
            chosen.append(h)
            rows.append(cand)
        if len(chosen) == 2 * g:
            return chosen
    raise ValueError("markings of the shared edges do not span the homology")


def ia_between(source: MarkedFatgraph, target: MarkedFatgraph,
               avoid_edges, m: int) -> IAMap:
    """The substitution map carrying the target table to the source table.

    Solved degree by degree on a basis of edges the two graphs share
    unchanged (both graphs must use the same edge ids, with the edges in
    avoid_edges excluded as remarked).
    """
    _check_degree(m)
    if source.genus() != target.genus():
        raise ValueError("genus mismatch")
    n = m + 1
    g = source.genus()
    ts, tt = get_table(source, n), get_table(target, n)
    basis = _basis_halves(source, set(avoid_edges))
    mat = [[Fraction(source.h[x][j]) for j in range(2 * g)] for x in basis]
    inv = _invert_matrix(mat)
    ls = [ts.ell(x) for x in basis]
    lt = [tt.ell(x) for x in basis]
    corr = [TruncatedTensor(g, n) for _ in range(2 * g)]
    for d in range(2, n + 1):
        phi = IAMap(g, corr, n)
        resid = [(ls[i] - phi.apply(lt[i])).graded(d)
                 for i in range(2 * g)]
        for j in range(2 * g):
            add = TruncatedTensor(g, n)
            for i in range(2 * g):
                if inv[j][i]:
                    add = add + resid[i].scaled(inv[j][i])
            corr[j] = corr[j] + add
    return IAMap(g, corr, n)


def ia_graded(phi: IAMap, upto: Optional[int] = None) -> GradedTau:
    """Slice a substitution map into its graded homology-to-Lie pieces."""
    m = phi.max_degree - 1 if upto is None else upto
    values = {k: tuple(c.graded(k + 1) for c in phi.corrections)
              for k in range(1, m + 1)}
    return GradedTau(phi.genus, values)


def tau_move_oracle(move: WhiteheadMove, m: int) -> MoveTau:
    """Graded pieces recovered by comparing the two expansion tables.

    Independent of the closed formula: only the moved edge is excluded
    from the solving basis, since its remarking changes the underlying
    group element.
    """
    phi = ia_between(move.source, move.result, {move.edge_id}, m)
    return MoveTau(move, ia_graded(phi))


# -- paths -----------------------------------------------------------------


def move_ia(move: WhiteheadMove, m: int) -> IAMap:
    """The move automorphism as a substitution map (closed formula)."""
    mt = tau_move(move, m)
    g = mt.tau.genus
    n = m + 1
    corr = []
    for j in range(2 * g):
        c = TruncatedTensor(g, n)
        for k in mt.tau.degrees():
            c = c + mt.tau.values[k][j]
        corr.append(c)
    return IAMap(g, corr, n)


def tau_path(path: MovePath, m: int) -> GradedTau:
    """Ordered composition of the per-move automorphisms along a path.

    The composite carries the final graph's table to the initial one, so
    later moves act first; closed move loops compose to the identity.
    """
    _check_degree(m)
    g = path.initial.genus()
    total = IAMap.identity(g, m + 1)
    for mv in path.moves:
        total = move_ia(mv, m).compose(total)
    return ia_graded(total)
