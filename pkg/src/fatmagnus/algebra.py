"""Exact truncated tensor algebra over the first homology of a surface.

Everything downstream (Magnus expansions, Johnson lifts, cocycles) is computed
inside the degree-truncated tensor algebra T = Q<x_1,...,x_{2g}> / (deg > N).
Elements are kept exact: each graded component is a dict from packed integer
words to integer numerators over a single shared denominator, and Fractions
only appear at the API surface.

Letters 0..g-1 are the u_i, letters g..2g-1 are the v_i.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterator, Sequence

DEFAULT_MAX_DEGREE = 5

SYMPLECTIC_SIGN = 1


def letter_name(genus: int, letter: int) -> str:
    if not 0 <= letter < 2 * genus:
        raise ValueError(f"letter {letter} out of range for genus {genus}")
    if letter < genus:
        return f"u{letter + 1}"
    return f"v{letter - genus + 1}"


def letter_index(genus: int, name: str) -> int:
    kind, num = name[0], name[1:]
    if kind not in "uv" or not num.isdigit():
        raise ValueError(f"bad letter name {name!r}")
    i = int(num)
    if not 1 <= i <= genus:
        raise ValueError(f"letter {name!r} out of range for genus {genus}")
    return i - 1 if kind == "u" else genus + i - 1


def _pack(word: Sequence[int], nletters: int) -> int:
    key = 0
    for c in word:
        key = key * nletters + c
    return key


def _unpack(key: int, degree: int, nletters: int) -> tuple[int, ...]:
    out = []
    for _ in range(degree):
        key, c = divmod(key, nletters)
        out.append(c)
    return tuple(reversed(out))


class TruncatedTensor:
    """An element of the tensor algebra truncated above ``max_degree``.

    Components are stored per degree as {packed word: integer numerator};
    ``den`` is the common positive denominator for the whole element.
    """

    __slots__ = ("genus", "nletters", "max_degree", "den", "comps")

    def __init__(self, genus: int, max_degree: int = DEFAULT_MAX_DEGREE):
        if genus < 1:
            raise ValueError("genus must be >= 1")
        if max_degree < 1:
            raise ValueError("max_degree must be >= 1")
        self.genus = genus
        self.nletters = 2 * genus
        self.max_degree = max_degree
        self.den = 1
        self.comps: list[dict[int, int]] = [{} for _ in range(max_degree + 1)]

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, genus: int, max_degree: int = DEFAULT_MAX_DEGREE) -> "TruncatedTensor":
        return cls(genus, max_degree)

    @classmethod
    def unit(cls, genus: int, max_degree: int = DEFAULT_MAX_DEGREE) -> "TruncatedTensor":
        t = cls(genus, max_degree)
        t.comps[0][0] = 1
        return t

    @classmethod
    def letter(cls, genus: int, letter: int,
               max_degree: int = DEFAULT_MAX_DEGREE) -> "TruncatedTensor":
        if not 0 <= letter < 2 * genus:
            raise ValueError(f"letter {letter} out of range for genus {genus}")
        t = cls(genus, max_degree)
        t.comps[1][letter] = 1
        return t

    @classmethod
    def from_word(cls, genus: int, word: Sequence[int],
                  coeff: Fraction | int = 1,
                  max_degree: int = DEFAULT_MAX_DEGREE) -> "TruncatedTensor":
        t = cls(genus, max_degree)
        if len(word) > max_degree:
            return t
        c = Fraction(coeff)
        if c == 0:
            return t
        t.den = c.denominator
        t.comps[len(word)][_pack(word, t.nletters)] = c.numerator
        return t

    @classmethod
    def from_vector(cls, genus: int, vec: Sequence[Fraction | int],
                    max_degree: int = DEFAULT_MAX_DEGREE) -> "TruncatedTensor":
        """Degree-1 element with the given coordinates in the letter basis."""
        if len(vec) != 2 * genus:
            raise ValueError("vector length must be 2*genus")
        fracs = [Fraction(x) for x in vec]
        den = 1
        for f in fracs:
            den = den * f.denominator // gcd(den, f.denominator)
        t = cls(genus, max_degree)
        t.den = den
        for i, f in enumerate(fracs):
            n = f.numerator * (den // f.denominator)
            if n:
                t.comps[1][i] = n
        t._normalize()
        return t

    def copy(self) -> "TruncatedTensor":
        t = TruncatedTensor(self.genus, self.max_degree)
        t.den = self.den
        t.comps = [dict(c) for c in self.comps]
        return t

    def _compat(self, other: "TruncatedTensor") -> None:
        if self.genus != other.genus:
            raise ValueError("genus mismatch")
        if self.max_degree != other.max_degree:
            raise ValueError("max_degree mismatch")

    def _normalize(self) -> None:
        g = self.den
        for comp in self.comps:
            for k in [k for k, n in comp.items() if n == 0]:
                del comp[k]
            for n in comp.values():
                g = gcd(g, n)
                if g == 1:
                    break
            if g == 1:
                break
        if g > 1:
            self.den //= g
            for comp in self.comps:
                for k in comp:
                    comp[k] //= g

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return all(not comp for comp in self.comps)

    def coefficient(self, word: Sequence[int]) -> Fraction:
        if len(word) > self.max_degree:
            return Fraction(0)
        n = self.comps[len(word)].get(_pack(word, self.nletters), 0)
        return Fraction(n, self.den)

    def terms(self) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        """Yield (word, coefficient) pairs, degree by degree."""
        for d, comp in enumerate(self.comps):
            for key in sorted(comp):
                yield _unpack(key, d, self.nletters), Fraction(comp[key], self.den)

    def min_degree(self) -> int | None:
        for d, comp in enumerate(self.comps):
            if comp:
                return d
        return None

    def graded(self, degree: int) -> "TruncatedTensor":
        """The homogeneous degree-``degree`` part."""
        t = TruncatedTensor(self.genus, self.max_degree)
        if 0 <= degree <= self.max_degree and self.comps[degree]:
            t.den = self.den
            t.comps[degree] = dict(self.comps[degree])
            t._normalize()
        return t

    def truncated(self, max_degree: int) -> "TruncatedTensor":
        """Image under the projection to a lower truncation degree."""
        if max_degree >= self.max_degree:
            t = self.copy()
            if max_degree > self.max_degree:
                t.max_degree = max_degree
                t.comps = t.comps + [{} for _ in range(max_degree - self.max_degree)]
            return t
        t = TruncatedTensor(self.genus, max_degree)
        t.den = self.den
        t.comps = [dict(c) for c in self.comps[: max_degree + 1]]
        t._normalize()
        return t

    def degree_one_vector(self) -> list[Fraction]:
        return [Fraction(self.comps[1].get(i, 0), self.den)
                for i in range(self.nletters)]

    # -- ring operations --------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedTensor):
            return NotImplemented
        if self.genus != other.genus or self.max_degree != other.max_degree:
            return False
        return self.den == other.den and self.comps == other.comps

    def __hash__(self):
        raise TypeError("TruncatedTensor is mutable, not hashable")

    def __neg__(self) -> "TruncatedTensor":
        t = self.copy()
        for comp in t.comps:
            for k in comp:
                comp[k] = -comp[k]
        return t

    def __add__(self, other: "TruncatedTensor") -> "TruncatedTensor":
        self._compat(other)
        t = TruncatedTensor(self.genus, self.max_degree)
        d1, d2 = self.den, other.den
        g = gcd(d1, d2)
        m1, m2 = d2 // g, d1 // g
        t.den = d1 * m1
        for d in range(self.max_degree + 1):
            comp = {k: n * m1 for k, n in self.comps[d].items()}
            for k, n in other.comps[d].items():
                comp[k] = comp.get(k, 0) + n * m2
            t.comps[d] = {k: n for k, n in comp.items() if n}
        t._normalize()
        return t

    def __sub__(self, other: "TruncatedTensor") -> "TruncatedTensor":
        return self + (-other)

    def scaled(self, c: Fraction | int) -> "TruncatedTensor":
        c = Fraction(c)
        if c == 0:
            return TruncatedTensor(self.genus, self.max_degree)
        t = self.copy()
        t.den *= c.denominator
        num = c.numerator
        for comp in t.comps:
            for k in comp:
                comp[k] *= num
        t._normalize()
        return t

    def __mul__(self, other: "TruncatedTensor") -> "TruncatedTensor":
        """Concatenation (tensor) product, truncated."""
        self._compat(other)
        t = TruncatedTensor(self.genus, self.max_degree)
        t.den = self.den * other.den
        A = self.nletters
        out = t.comps
        for d1 in range(self.max_degree + 1):
            c1 = self.comps[d1]
            if not c1:
                continue
            for d2 in range(self.max_degree + 1 - d1):
                c2 = other.comps[d2]
                if not c2:
                    continue
                shift = A ** d2
                target = out[d1 + d2]
                for k1, n1 in c1.items():
                    base = k1 * shift
                    for k2, n2 in c2.items():
                        key = base + k2
                        target[key] = target.get(key, 0) + n1 * n2
        for d in range(self.max_degree + 1):
            out[d] = {k: n for k, n in out[d].items() if n}
        t._normalize()
        return t

    def bracket(self, other: "TruncatedTensor") -> "TruncatedTensor":
        return self * other - other * self

    def __repr__(self) -> str:
        return f"TruncatedTensor(genus={self.genus}, N={self.max_degree}, {self.pretty()})"

    # -- display ----------------------------------------------------------

    def pretty(self) -> str:
        """Plain word-by-word rendering, e.g. ``1/2 u1.v1 - 1/2 v1.u1``."""
        parts = []
        for word, coeff in self.terms():
            if not word:
                mono = "1"
            else:
                mono = ".".join(letter_name(self.genus, c) for c in word)
            parts.append((coeff, mono))
        if not parts:
            return "0"
        bits = []
        for coeff, mono in parts:
            sign = "-" if coeff < 0 else "+"
            a = abs(coeff)
            if mono == "1":
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a} {mono}"
            bits.append((sign, body))
        first_sign, first_body = bits[0]
        text = first_body if first_sign == "+" else "-" + first_body
        for sign, body in bits[1:]:
            text += f" {sign} {body}"
        return text


# -- Lie structure --------------------------------------------------------


def right_bracketing(genus: int, word: Sequence[int],
                     max_degree: int) -> TruncatedTensor:
    """[w_1, [w_2, [..., w_k]]] as a tensor."""
    t = TruncatedTensor.letter(genus, word[-1], max_degree)
    for c in reversed(word[:-1]):
        t = TruncatedTensor.letter(genus, c, max_degree).bracket(t)
    return t


def _dynkin_left(t: TruncatedTensor) -> TruncatedTensor:
    """Left-to-right Dynkin map: w_1...w_k -> [[..[w_1,w_2],..],w_k]."""
    out = TruncatedTensor(t.genus, t.max_degree)
    for word, coeff in t.terms():
        if not word:
            continue
        b = TruncatedTensor.letter(t.genus, word[0], t.max_degree)
        for c in word[1:]:
            b = b.bracket(TruncatedTensor.letter(t.genus, c, t.max_degree))
        out = out + b.scaled(coeff)
    return out


def is_lie(t: TruncatedTensor) -> bool:
    """Whether every homogeneous piece lies in the free Lie algebra.

    Uses the Dynkin criterion: a degree-n tensor w is a Lie element iff
    applying the bracketing map gives n*w.
    """
    for n in range(t.max_degree + 1):
        part = t.graded(n)
        if part.is_zero():
            continue
        if n == 0:
            return False
        if _dynkin_left(part) != part.scaled(n):
            return False
    return True


def lie_decompose(t: TruncatedTensor) -> list[tuple[Fraction, tuple[int, ...]]]:
    """Write a Lie element as a combination of right-bracketed words.

    Returns pairs (coeff, word) meaning coeff * [w_1,[w_2,[...,w_k]]],
    one pair per word in the support: a degree-n Lie element equals
    1/n times the sum of its word coefficients times their bracketings.
    Raises ValueError if the input is not Lie.
    """
    if not is_lie(t):
        raise ValueError("not a Lie element")
    out: list[tuple[Fraction, tuple[int, ...]]] = []
    for word, coeff in t.terms():
        out.append((coeff / len(word), word))
    return out


def _lyndon_factor(word: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    # standard factorization: the lexicographically smallest proper suffix
    best = min(range(1, len(word)), key=lambda i: word[i:])
    return word[:best], word[best:]


def _lyndon_words(nletters: int, maxlen: int) -> list[tuple[int, ...]]:
    # Duval's algorithm
    out: list[tuple[int, ...]] = []
    w = [-1]
    while w:
        w[-1] += 1
        m = len(w)
        out.append(tuple(w))
        while len(w) < maxlen:
            w.append(w[-m])
        while w and w[-1] == nletters - 1:
            w.pop()
    return sorted(out, key=lambda t: (len(t), t))


def _lyndon_bracket(genus: int, word: tuple[int, ...],
                    max_degree: int) -> TruncatedTensor:
    if len(word) == 1:
        return TruncatedTensor.letter(genus, word[0], max_degree)
    a, b = _lyndon_factor(word)
    return _lyndon_bracket(genus, a, max_degree).bracket(
        _lyndon_bracket(genus, b, max_degree))


def _bracket_string(genus: int, word: tuple[int, ...]) -> str:
    if len(word) == 1:
        return letter_name(genus, word[0])
    a, b = _lyndon_factor(word)
    return f"[{_bracket_string(genus, a)},{_bracket_string(genus, b)}]"


def lie_pretty(t: TruncatedTensor) -> str:
    """Render a Lie element in the Lyndon bracket basis.

    Greedy: repeatedly subtract the bracketing of the lex-least Lyndon word
    still in the support. Falls back to the plain rendering for non-Lie input.
    """
    if not is_lie(t):
        return t.pretty()
    bits: list[tuple[Fraction, str]] = []
    for n in range(1, t.max_degree + 1):
        rem = t.graded(n)
        if rem.is_zero():
            continue
        for lw in _lyndon_words(t.nletters, n):
            if len(lw) != n:
                continue
            c = rem.coefficient(lw)
            if c == 0:
                continue
            rem = rem - _lyndon_bracket(t.genus, lw, t.max_degree).scaled(c)
            bits.append((c, _bracket_string(t.genus, lw)))
        if not rem.is_zero():  # pragma: no cover - Lyndon brackets span
            return t.pretty()
    if not bits:
        return "0"
    text = ""
    for coeff, mono in bits:
        sign = "-" if coeff < 0 else "+"
        a = abs(coeff)
        body = mono if a == 1 else f"{a} {mono}"
        if not text:
            text = body if sign == "+" else "-" + body
        else:
            text += f" {sign} {body}"
    return text


# -- exponential / logarithm / Hausdorff ----------------------------------


def exp_t(x: TruncatedTensor) -> TruncatedTensor:
    """exp of an element with zero constant term."""
    if x.comps[0]:
        raise ValueError("exp needs zero constant term")
    N = x.max_degree
    one = TruncatedTensor.unit(x.genus, N)
    acc = one
    for k in range(N, 0, -1):
        acc = one + (x * acc).scaled(Fraction(1, k))
    return acc

def log_t(x: TruncatedTensor) -> TruncatedTensor:
    """log of an element with constant term 1."""
    if Fraction(x.comps[0].get(0, 0), x.den) != 1:
        raise ValueError("log needs constant term 1")
    N = x.max_degree
    one = TruncatedTensor.unit(x.genus, N)
    y = x - one
    # log(1+y) = y(1 - y(1/2 - y(1/3 - ...))), Horner from the inside out
    acc = one.scaled(Fraction(1, N))
    for k in range(N - 1, 0, -1):
        acc = one.scaled(Fraction(1, k)) - y * acc
    return y * acc


def star(x: TruncatedTensor, y: TruncatedTensor) -> TruncatedTensor:
    """Baker-Campbell-Hausdorff product log(exp x * exp y)."""
    return log_t(exp_t(x) * exp_t(y))


def hausdorff_tail(x: TruncatedTensor, y: TruncatedTensor) -> TruncatedTensor:
    """star(x, y) - x - y: the higher correction terms."""
    return star(x, y) - x - y


# -- H-coefficient vectors ------------------------------------------------


def dot(a: Sequence[Fraction | int], b: Sequence[Fraction | int],
        sign: int = SYMPLECTIC_SIGN) -> Fraction:
    """Symplectic pairing of two coordinate vectors in the letter basis."""
    if len(a) != len(b) or len(a) % 2:
        raise ValueError("need two vectors of equal even length")
    g = len(a) // 2
    total = Fraction(0)
    for i in range(g):
        total += Fraction(a[i]) * Fraction(b[g + i]) - Fraction(a[g + i]) * Fraction(b[i])
    return sign * total


def symplectic_form(genus: int, max_degree: int = DEFAULT_MAX_DEGREE) -> TruncatedTensor:
    """omega = sum_i [u_i, v_i] as a degree-2 tensor."""
    t = TruncatedTensor(genus, max_degree)
    for i in range(genus):
        t = t + TruncatedTensor.letter(genus, i, max_degree).bracket(
            TruncatedTensor.letter(genus, genus + i, max_degree))
    return t


def apply_letter_map(t: TruncatedTensor,
                     images: Sequence[TruncatedTensor]) -> TruncatedTensor:
    """Algebra endomorphism sending letter i to images[i] (degree-1 images)."""
    if len(images) != t.nletters:
        raise ValueError("need one image per letter")
    out = TruncatedTensor(t.genus, t.max_degree)
    cache: dict[tuple[int, ...], TruncatedTensor] = {}
    for word, coeff in t.terms():
        if not word:
            out = out + TruncatedTensor.unit(t.genus, t.max_degree).scaled(coeff)
            continue
        if word not in cache:
            prod = images[word[0]]
            for c in word[1:]:
                prod = prod * images[c]
            cache[word] = prod
        out = out + cache[word].scaled(coeff)
    return out


def matrix_letter_images(genus: int, matrix: Sequence[Sequence[int]],
                         max_degree: int = DEFAULT_MAX_DEGREE) -> list[TruncatedTensor]:
    """Images of the letters under a linear map given by rows = letter images."""
    if len(matrix) != 2 * genus or any(len(r) != 2 * genus for r in matrix):
        raise ValueError("matrix must be 2g x 2g")
    return [TruncatedTensor.from_vector(genus, row, max_degree) for row in matrix]


def is_symplectic_matrix(genus: int, matrix: Sequence[Sequence[int]],
                         sign: int = SYMPLECTIC_SIGN) -> bool:
    """Whether row-images preserve the pairing ``dot``."""
    n = 2 * genus
    if len(matrix) != n or any(len(r) != n for r in matrix):
        return False
    basis = [[Fraction(1 if j == i else 0) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if dot(matrix[i], matrix[j], sign) != dot(basis[i], basis[j], sign):
                return False
    return True


# -- IA automorphism maps -------------------------------------------------


class IAMap:
    """Substitution x_i -> x_i + corrections[i], corrections of degree >= 2.

    Models the action on the completed tensor algebra of an automorphism
    that is the identity on degree 1. Supports application, composition
    (self after other is ``other.compose(self)`` in the group sense used
    here: see ``compose``), and inversion, all exactly to the truncation.
    """

    __slots__ = ("genus", "max_degree", "corrections")

    def __init__(self, genus: int, corrections: Sequence[TruncatedTensor],
                 max_degree: int = DEFAULT_MAX_DEGREE):
        if len(corrections) != 2 * genus:
            raise ValueError("need one correction per letter")
        for c in corrections:
            if c.genus != genus or c.max_degree != max_degree:
                raise ValueError("correction shape mismatch")
            md = c.min_degree()
            if md is not None and md < 2:
                raise ValueError("corrections must start in degree 2")
        self.genus = genus
        self.max_degree = max_degree
        self.corrections = [c.copy() for c in corrections]

    @classmethod
    def identity(cls, genus: int, max_degree: int = DEFAULT_MAX_DEGREE) -> "IAMap":
        zero = [TruncatedTensor(genus, max_degree) for _ in range(2 * genus)]
        return cls(genus, zero, max_degree)

    def is_identity(self) -> bool:
        return all(c.is_zero() for c in self.corrections)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IAMap):
            return NotImplemented
        return (self.genus == other.genus
                and self.max_degree == other.max_degree
                and self.corrections == other.corrections)

    def apply(self, t: TruncatedTensor) -> TruncatedTensor:
        """Apply the substitution to an arbitrary truncated tensor.

        For a degree-k word, substituting the correction at j >= 1 positions
        raises the degree by >= j, so positions are chosen from subsets of
        size <= (max_degree - k); the identity part of the substitution is
        handled wordwise with no expansion.
        """
        if t.genus != self.genus or t.max_degree != self.max_degree:
            raise ValueError("shape mismatch")
        N = self.max_degree
        out = t.copy()
        corr = self.corrections
        extra = TruncatedTensor(self.genus, N)
        for word, coeff in t.terms():
            k = len(word)
            if k == 0 or k >= N:
                continue
            budget = N - k
            hot = [i for i, c in enumerate(word) if not corr[c].is_zero()]
            if not hot:
                continue
            # subsets of substitution positions, smallest first
            for mask_positions in _subsets(hot, budget):
                if not mask_positions:
                    continue
                prod = None
                for i, c in enumerate(word):
                    if i in mask_positions:
                        factor = corr[c]
                    else:
                        factor = TruncatedTensor.letter(self.genus, c, N)
                    prod = factor if prod is None else prod * factor
                extra = extra + prod.scaled(coeff)
        return out + extra

    def compose(self, other: "IAMap") -> "IAMap":
        """The map "self then other": x -> other(self(x)).

        Corrections: new(x_i) = self(x_i) applied through other, minus x_i,
        i.e. other.apply(x_i + self_corr_i) - x_i
            = other_corr_i + other.apply(self_corr_i).
        """
        if (other.genus, other.max_degree) != (self.genus, self.max_degree):
            raise ValueError("shape mismatch")
        new = [other.corrections[i] + other.apply(self.corrections[i])
               for i in range(2 * self.genus)]
        return IAMap(self.genus, new, self.max_degree)

    def inverse(self) -> "IAMap":
        """Degree-by-degree solve of compose(self, inv) = identity."""
        N = self.max_degree
        inv = IAMap.identity(self.genus, N)
        for n in range(2, N + 1):
            new = []
            for i in range(2 * self.genus):
                # want: self_corr_i + self.apply-free expansion of inv at x_i = 0
                # residual at degree n with current partial inverse:
                x = TruncatedTensor.letter(self.genus, i, N)
                resid = inv.apply(self.apply(x)) - x
                new.append(inv.corrections[i] - resid.graded(n))
            inv = IAMap(self.genus, new, N)
        return inv


def _subsets(items: list[int], max_size: int) -> Iterator[frozenset[int]]:
    from itertools import combinations
    for r in range(1, min(len(items), max_size) + 1):
        for combo in combinations(items, r):
            yield frozenset(combo)
