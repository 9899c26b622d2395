"""Wedge and symmetrized forms of the low-degree move data.

The degree-one value of a move collapses to an integral wedge of the
three label markings.  The degree-two value is pushed into the subspace
spanned by symmetrized wedge-square images, where it becomes reversal
antisymmetric.  Pairing wedges lets the two levels compose along paths
through a twisted group law with integer coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .algebra import (
    TruncatedTensor,
    dot,
    is_lie,
    letter_name,
    lie_pretty,
)
from .fatgraph import MovePath, WhiteheadMove
from .johnson import dual_vector, tau_move

__all__ = [
    "LIE_DEGREE",
    "Lambda3",
    "H2Element",
    "J2Value",
    "tensor_components",
    "wedge_components",
    "varpi",
    "symmetric_pair",
    "bar_project",
    "morita_pair",
    "j1",
    "bar_tau2",
    "j2",
    "j2_compose",
    "j2_identity",
    "j2_inverse",
    "j2_path",
]

# symmetrized degree-two values live in (homology) x (Lie elements of
# this degree); everything in this module is truncated there
LIE_DEGREE = 3


def _sort_triple(i: int, j: int, k: int) -> tuple[tuple[int, int, int], int]:
    """Sorted index triple and the permutation sign, 0 on repeats."""
    if i == j or j == k or i == k:
        return (i, j, k), 0
    sign = 1
    t = [i, j, k]
    for a in range(2):
        for b in range(2 - a):
            if t[b] > t[b + 1]:
                t[b], t[b + 1] = t[b + 1], t[b]
                sign = -sign
    return (t[0], t[1], t[2]), sign


class Lambda3:
    """Antisymmetric rank-three array over the letter basis.

    Coefficients are stored on strictly increasing index triples; any
    triple fed in is sorted with its permutation sign.
    """

    __slots__ = ("genus", "coeffs")

    def __init__(self, genus: int,
                 coeffs: Mapping[tuple[int, int, int], Fraction | int]
                 | None = None):
        if genus < 1:
            raise ValueError("genus must be >= 1")
        self.genus = genus
        n = 2 * genus
        store: dict[tuple[int, int, int], Fraction] = {}
        for (i, j, k), c in (coeffs or {}).items():
            if not all(0 <= x < n for x in (i, j, k)):
                raise ValueError("letter index out of range")
            key, sign = _sort_triple(i, j, k)
            if sign == 0:
                continue
            c = Fraction(c) * sign
            got = store.get(key, Fraction(0)) + c
            if got:
                store[key] = got
            else:
                store.pop(key, None)
        self.coeffs = store

    @classmethod
    def zero(cls, genus: int) -> "Lambda3":
        return cls(genus)

    @classmethod
    def wedge(cls, genus: int,
              u: Sequence[Fraction | int],
              v: Sequence[Fraction | int],
              w: Sequence[Fraction | int]) -> "Lambda3":
        """Wedge product of three homology vectors."""
        n = 2 * genus
        if not len(u) == len(v) == len(w) == n:
            raise ValueError("vectors must have one entry per letter")
        co: dict[tuple[int, int, int], Fraction] = {}
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    det = (u[i] * (v[j] * w[k] - v[k] * w[j])
                           - u[j] * (v[i] * w[k] - v[k] * w[i])
                           + u[k] * (v[i] * w[j] - v[j] * w[i]))
                    if det:
                        co[(i, j, k)] = Fraction(det)
        return cls(genus, co)

    def _check(self, other: "Lambda3") -> None:
        if not isinstance(other, Lambda3):
            raise TypeError("expected a Lambda3")
        if self.genus != other.genus:
            raise ValueError("genus mismatch")

    def __add__(self, other: "Lambda3") -> "Lambda3":
        self._check(other)
        co = dict(self.coeffs)
        for key, c in other.coeffs.items():
            co[key] = co.get(key, Fraction(0)) + c
        return Lambda3(self.genus, co)

    def __neg__(self) -> "Lambda3":
        return Lambda3(self.genus, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other: "Lambda3") -> "Lambda3":
        return self + (-other)

    def scaled(self, c: Fraction | int) -> "Lambda3":
        return Lambda3(self.genus, {k: v * c for k, v in self.coeffs.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lambda3):
            return NotImplemented
        return self.genus == other.genus and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.genus, tuple(sorted(self.coeffs.items()))))

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs.values())

    def terms(self) -> Iterator[tuple[tuple[int, int, int], Fraction]]:
        yield from sorted(self.coeffs.items())

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for (i, j, k), c in self.terms():
            mono = "^".join(letter_name(self.genus, x) for x in (i, j, k))
            if c == 1:
                head = mono
            elif c == -1:
                head = f"-{mono}"
            else:
                head = f"{c} {mono}"
            parts.append(head)
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self) -> str:
        return f"Lambda3(genus={self.genus}, {self})"


def tensor_components(values: Sequence[TruncatedTensor]
                      ) -> tuple[TruncatedTensor, ...]:
    """Letter-slot components of the tensor behind a letter-value list.

    A map on homology given by its values on the letters corresponds,
    through the symplectic duality fixed in dual_vector, to a tensor
    with one Lie component per letter slot; this returns those
    components.  The contraction against the bracket is the same number
    in either picture.
    """
    if len(values) % 2 or not values:
        raise ValueError("need one value per letter")
    g = values[0].genus
    if len(values) != 2 * g:
        raise ValueError("need one value per letter")
    n = values[0].max_degree
    out = [TruncatedTensor(g, n) for _ in range(2 * g)]
    for k, v in enumerate(values):
        for j, cj in enumerate(dual_vector(g, k)):
            if cj:
                out[j] = out[j] + v.scaled(cj)
    return tuple(out)


def _zero_components(genus: int) -> list[TruncatedTensor]:
    return [TruncatedTensor(genus, LIE_DEGREE) for _ in range(2 * genus)]


def _letter(genus: int, i: int) -> TruncatedTensor:
    return TruncatedTensor.letter(genus, i, LIE_DEGREE)


def _check_components(comps: Sequence[TruncatedTensor],
                      degree: int) -> int:
    if len(comps) % 2 or not comps:
        raise ValueError("need one component per letter")
    g = comps[0].genus
    if len(comps) != 2 * g:
        raise ValueError("need one component per letter")
    for t in comps:
        if t.genus != g:
            raise ValueError("genus mismatch")
        if any(len(w) != degree for w, _ in t.terms()):
            raise ValueError(f"component is not pure of degree {degree}")
        if not is_lie(t):
            raise ValueError("component is not a Lie element")
    return g


def wedge_components(xi: Lambda3) -> tuple[TruncatedTensor, ...]:
    """The degree-one tensor a wedge triple stands for.

    Orientation is pinned by the frozen duality: six times the
    degree-one value of a move has exactly the components of its label
    wedge under this map.
    """
    g = xi.genus
    out = [TruncatedTensor(g, 2) for _ in range(2 * g)]
    for (i, j, k), c in xi.terms():
        li, lj, lk = (TruncatedTensor.letter(g, x, 2) for x in (i, j, k))
        out[i] = out[i] - lj.bracket(lk).scaled(c)
        out[j] = out[j] - lk.bracket(li).scaled(c)
        out[k] = out[k] - li.bracket(lj).scaled(c)
    return tuple(out)


def _wedge_matrix(t: TruncatedTensor) -> list[list[Fraction]]:
    """Antisymmetric coefficient matrix of a degree-two Lie element."""
    g = t.genus
    if any(len(w) != 2 for w, _ in t.terms()):
        raise ValueError("expected a pure degree-two element")
    if not is_lie(t):
        raise ValueError("expected a Lie element")
    S = [[Fraction(0)] * (2 * g) for _ in range(2 * g)]
    for w, c in t.terms():
        i, j = w
        if i < j:
            # the (j, i) word of the same Lie element carries -c
            S[i][j] += c
            S[j][i] -= c
    return S


def varpi(s: TruncatedTensor, t: TruncatedTensor
          ) -> tuple[TruncatedTensor, ...]:
    """One-sided pairing of two degree-two Lie elements.

    On wedge generators the first argument donates the letter slot and
    the inner bracket position: the image of a^b (x) t is
    a (x) [b, t] - b (x) [a, t].  Symmetric inputs land in the
    symmetrized subspace; see symmetric_pair.
    """
    if s.genus != t.genus:
        raise ValueError("genus mismatch")
    g = s.genus
    S = _wedge_matrix(s)
    _wedge_matrix(t)  # validates the second argument
    t3 = t.truncated(LIE_DEGREE)
    out = _zero_components(g)
    for i in range(2 * g):
        for j in range(2 * g):
            if S[i][j]:
                out[i] = out[i] + _letter(g, j).bracket(t3).scaled(S[i][j])
    return tuple(out)


def _bar_components(comps: Sequence[TruncatedTensor]
                    ) -> list[TruncatedTensor]:
    g = comps[0].genus
    out = _zero_components(g)
    quarter = Fraction(1, 4)
    for x, t in enumerate(comps):
        for (y, z, w), c in t.truncated(LIE_DEGREE).terms():
            # right-normed presentation of a Lie element: t = (1/3) sum
            # of [w1,[w2,w3]] over its words, then the quarter rule
            c3 = Fraction(c, 3)
            inner = _letter(g, z).bracket(_letter(g, w))
            outer = _letter(g, x).bracket(_letter(g, y))
            out[x] = out[x] + _letter(g, y).bracket(inner).scaled(c3 * quarter)
            out[y] = out[y] - _letter(g, x).bracket(inner).scaled(c3 * quarter)
            out[z] = out[z] + _letter(g, w).bracket(outer).scaled(c3 * quarter)
            out[w] = out[w] - _letter(g, z).bracket(outer).scaled(c3 * quarter)
    return out


class H2Element:
    """A tensor in the symmetrized degree-two target space.

    Stored as one degree-three Lie component per letter slot.  The
    constructor enforces membership: the bracket contraction vanishes
    and the symmetrizing projection fixes the element.
    """

    __slots__ = ("genus", "components")

    def __init__(self, components: Sequence[TruncatedTensor]):
        g = _check_components(components, LIE_DEGREE)
        comps = tuple(t.truncated(LIE_DEGREE) for t in components)
        lifted = TruncatedTensor(g, LIE_DEGREE + 1)
        for j, t in enumerate(comps):
            lifted = lifted + TruncatedTensor.letter(
                g, j, LIE_DEGREE + 1).bracket(t.truncated(LIE_DEGREE + 1))
        if not lifted.is_zero():
            raise ValueError("bracket contraction does not vanish")
        if any(a != b for a, b in zip(_bar_components(comps), comps)):
            raise ValueError("element is not fixed by the symmetrizing projection")
        self.genus = g
        self.components = comps

    @classmethod
    def zero(cls, genus: int) -> "H2Element":
        return cls(_zero_components(genus))

    def _check(self, other: "H2Element") -> None:
        if not isinstance(other, H2Element):
            raise TypeError("expected an H2Element")
        if self.genus != other.genus:
            raise ValueError("genus mismatch")

    def __add__(self, other: "H2Element") -> "H2Element":
        self._check(other)
        return H2Element([a + b for a, b in
                          zip(self.components, other.components)])

    def __neg__(self) -> "H2Element":
        return H2Element([-t for t in self.components])

    def __sub__(self, other: "H2Element") -> "H2Element":
        return self + (-other)

    def scaled(self, c: Fraction | int) -> "H2Element":
        return H2Element([t.scaled(c) for t in self.components])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, H2Element):
            return NotImplemented
        return (self.genus == other.genus
                and self.components == other.components)

    def __hash__(self):
        return hash((self.genus, self.components))

    def is_zero(self) -> bool:
        return all(t.is_zero() for t in self.components)

    def is_integral(self) -> bool:
        return all(c.denominator == 1
                   for t in self.components for _, c in t.terms())

    def symbol_terms(self) -> list[tuple[Fraction,
                                         tuple[int, int], tuple[int, int]]]:
        """Greedy split into symmetrized bracket-pair symbols.

        Exact on elements this type admits; returned as (coefficient,
        first pair, second pair) with each pair increasing and the two
        pairs sorted, since the symbol is symmetric in them.  On four
        distinct letters the three symbols satisfy one null relation,
        which is used to shorten the answer, so a plain symmetrized
        pair prints as itself.
        """
        acc: dict[tuple[tuple[int, int], tuple[int, int]], Fraction] = {}
        for x, t in enumerate(self.components):
            for (y, z, w), c in t.terms():
                p, q, r, s, sign = x, y, z, w, 1
                if p == q or r == s:
                    continue
                if p > q:
                    p, q, sign = q, p, -sign
                if r > s:
                    r, s, sign = s, r, -sign
                key = tuple(sorted(((p, q), (r, s))))
                got = acc.get(key, Fraction(0)) + Fraction(c, 12) * sign
                if got:
                    acc[key] = got
                else:
                    acc.pop(key, None)
        supports = {frozenset(p + q) for (p, q) in acc}
        for sup in supports:
            if len(sup) != 4:
                continue
            x0, x1, x2, x3 = sorted(sup)
            # the null relation: A - B + C = 0 for the three pairings
            keys = (((x0, x1), (x2, x3)),
                    ((x0, x2), (x1, x3)),
                    ((x0, x3), (x1, x2)))
            a, b, c = (acc.get(k, Fraction(0)) for k in keys)
            best = None
            for t in (Fraction(0), a, -b, c):
                trial = (a - t, b + t, c - t)
                score = (sum(1 for x in trial if x),
                         sum(1 for x in trial if x.denominator != 1))
                if best is None or score < best[0]:
                    best = (score, trial)
            for k, v in zip(keys, best[1]):
                if v:
                    acc[k] = v
                else:
                    acc.pop(k, None)
        return [(c, a, b) for (a, b), c in sorted(acc.items())]

    def symbol_form(self) -> str:
        terms = self.symbol_terms()
        if not terms:
            return "0"
        parts = []
        for c, (p, q), (r, s) in terms:
            sym = (f"[{letter_name(self.genus, p)},{letter_name(self.genus, q)}]"
                   f"<->[{letter_name(self.genus, r)},{letter_name(self.genus, s)}]")
            if c == 1:
                parts.append(sym)
            elif c == -1:
                parts.append(f"-{sym}")
            else:
                parts.append(f"{c} {sym}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __str__(self) -> str:
        live = [f"{letter_name(self.genus, j)}: {lie_pretty(t)}"
                for j, t in enumerate(self.components) if not t.is_zero()]
        return "; ".join(live) if live else "0"

    def __repr__(self) -> str:
        return f"H2Element(genus={self.genus}, {self})"


def symmetric_pair(s: TruncatedTensor, t: TruncatedTensor) -> H2Element:
    """Symmetrized pairing of two degree-two Lie elements."""
    a, b = varpi(s, t), varpi(t, s)
    return H2Element([x + y for x, y in zip(a, b)])


def bar_project(comps: Sequence[TruncatedTensor]) -> H2Element:
    """Symmetrizing projection of letter-slot components.

    Linear, idempotent, the identity on symmetric_pair images; the
    quarter rule on a single right-normed bracket spreads it over the
    four letters involved.
    """
    _check_components(comps, LIE_DEGREE)
    return H2Element(_bar_components([t.truncated(LIE_DEGREE)
                                      for t in comps]))


def morita_pair(xi: Lambda3, eta: Lambda3) -> H2Element:
    """Skew pairing of wedge triples into the symmetrized space.

    Nine terms per pair of basis wedges: each letter of the first
    triple is paired against each letter of the second, weighted by
    their intersection number, with the remaining brackets joined
    symmetrically.  This is the twist the path group law adds.
    """
    if xi.genus != eta.genus:
        raise ValueError("genus mismatch")
    g = xi.genus
    unit = [[int(m == x) for m in range(2 * g)] for x in range(2 * g)]
    out = _zero_components(g)
    for (i, j, k), cx in xi.terms():
        xs = (i, j, k)
        for (p, q, r), cy in eta.terms():
            ys = (p, q, r)
            for a in range(3):
                xbr = _letter(g, xs[(a + 1) % 3]).bracket(
                    _letter(g, xs[(a + 2) % 3]))
                for b in range(3):
                    s = dot(unit[xs[a]], unit[ys[b]])
                    if not s:
                        continue
                    ybr = _letter(g, ys[(b + 1) % 3]).bracket(
                        _letter(g, ys[(b + 2) % 3]))
                    piece = [u + v for u, v in zip(varpi(xbr, ybr),
                                                   varpi(ybr, xbr))]
                    for m in range(2 * g):
                        out[m] = out[m] + piece[m].scaled(cx * cy * s)
    return H2Element(out)


def j1(move: WhiteheadMove) -> Lambda3:
    """Integral wedge of the three label markings.

    Six times the degree-one value of the move; vanishes whenever a
    label marking is zero, and flips sign under move reversal.
    """
    src = move.source
    g = src.genus()
    return Lambda3.wedge(g, src.h[move.a], src.h[move.b], src.h[move.c])


def bar_tau2(move: WhiteheadMove) -> H2Element:
    """Symmetrized degree-two value of a single move."""
    values = list(tau_move(move, 2).tau.values[2])
    comps = [t.truncated(LIE_DEGREE) for t in tensor_components(values)]
    return bar_project(comps)


@dataclass(frozen=True)
class J2Value:
    """Twisted pair carried along a path: symmetrized degree-two level
    plus the wedge level that controls the mixing.

    The first slot holds 72 times the symmetrized degree-two value, the
    second the label wedge (six times the degree-one value); both are
    integral on integral markings.
    """

    s: H2Element
    xi: Lambda3

    def __post_init__(self):
        if self.s.genus != self.xi.genus:
            raise ValueError("genus mismatch")

    def is_zero(self) -> bool:
        return self.s.is_zero() and self.xi.is_zero()

    def is_integral(self) -> bool:
        return self.s.is_integral() and self.xi.is_integral()


def j2(move: WhiteheadMove) -> J2Value:
    return J2Value(bar_tau2(move).scaled(72), j1(move))


def j2_compose(x: J2Value, y: J2Value) -> J2Value:
    """Twisted group law, first value then second.

    The twist constant is pinned by the two-move composition identity
    for the symmetrized degree-two level: with the scalings stored in
    J2Value the correction is exactly the wedge pairing, so folding
    j2 over a path reproduces 72 times the symmetrized degree-two value
    of the whole path.
    """
    return J2Value(x.s + y.s + morita_pair(x.xi, y.xi), x.xi + y.xi)


def j2_identity(genus: int) -> J2Value:
    return J2Value(H2Element.zero(genus), Lambda3.zero(genus))


def j2_inverse(v: J2Value) -> J2Value:
    # the twist of a wedge against itself vanishes by skewness, so no
    # correction term survives
    return J2Value(-v.s, -v.xi)


def j2_path(path: MovePath) -> J2Value:
    """Fold the twisted law over the moves of a path."""
    out = j2_identity(path.initial.genus())
    for mv in path.moves:
        out = j2_compose(out, j2(mv))
    return out
