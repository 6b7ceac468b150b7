"""Exact non-commutative polynomial algebra in the atoms E and O.

Elements live in the free associative algebra over the rationals on the
two letters ``E`` (even) and ``O`` (odd), extended by a central
invertible scalar ``m`` and an involution ``beta`` subject to

    beta * beta = 1,    beta * E = E * beta,    beta * O = -O * beta.

Every polynomial is kept in normal form: a rational linear combination
of words ``beta^b * letters * m^k`` with ``b in {0, 1}`` and ``letters``
a string over ``{"E", "O"}``.  Products are truncated by weight, where
an ``O`` letter counts 1 and an ``E`` letter counts 2 (the kinetic and
field power counting of relativistic expansions: O/m is first order in
v/c, E/m second order).  Powers of the central ``m`` carry no weight of
their own; physical expressions keep their m powers balanced so the
weight of a term equals its v/c order.

All values are immutable after construction and all operations are pure
functions; coefficients are ``fractions.Fraction`` throughout, never
floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

__all__ = [
    "Word",
    "NCPoly",
    "zero",
    "one",
    "scalar",
    "e_atom",
    "o_atom",
    "beta_atom",
    "m_scalar",
    "from_word",
    "normalize",
    "mul",
    "commutator",
    "anticommutator",
    "even_odd_split",
    "truncate",
    "adjoint",
    "beta_conjugate",
    "identity_part",
    "poly_to_json_obj",
    "poly_from_json_obj",
]

_ATOM_WEIGHT = {"E": 2, "O": 1}


@lru_cache(maxsize=None)
def _letter_weight(letters: str) -> int:
    return sum(_ATOM_WEIGHT[c] for c in letters)


@lru_cache(maxsize=None)
def _o_count(letters: str) -> int:
    return letters.count("O")


@dataclass(frozen=True, slots=True)
class Word:
    """Normal-form word ``beta^beta * letters * m^m_power``."""

    beta: int
    letters: str
    m_power: int

    def __post_init__(self) -> None:
        if self.beta not in (0, 1):
            raise ValueError(f"beta exponent must be 0 or 1, got {self.beta}")
        if any(c not in _ATOM_WEIGHT for c in self.letters):
            raise ValueError(f"letters must be over E/O, got {self.letters!r}")

    @property
    def weight(self) -> int:
        return _letter_weight(self.letters)

    @property
    def o_parity(self) -> int:
        """1 when the word anticommutes with beta, 0 when it commutes."""
        return _o_count(self.letters) & 1

    def sort_key(self) -> tuple[int, str, int]:
        return (self.beta, self.letters, self.m_power)


_IDENTITY_WORD = Word(0, "", 0)


class NCPoly:
    """Immutable map from normal-form words to nonzero rational coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Word, Fraction] | None = None):
        clean: dict[Word, Fraction] = {}
        if terms:
            for word, coeff in terms.items():
                c = coeff if isinstance(coeff, Fraction) else Fraction(coeff)
                if c:
                    clean[word] = c
        self._terms = clean

    # -- inspection ---------------------------------------------------

    def items(self) -> Iterator[tuple[Word, Fraction]]:
        return iter(self._terms.items())

    def coeff(self, word: Word) -> Fraction:
        return self._terms.get(word, Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def max_weight(self) -> int:
        return max((w.weight for w in self._terms), default=0)

    def words(self) -> list[Word]:
        return sorted(self._terms, key=Word.sort_key)

    # -- ring structure ------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self._terms == other._terms

    __hash__ = None  # mutable-dict backed; polynomials are not hashable

    def __add__(self, other: "NCPoly") -> "NCPoly":
        if not isinstance(other, NCPoly):
            return NotImplemented
        acc = dict(self._terms)
        for word, c in other._terms.items():
            s = acc.get(word, Fraction(0)) + c
            if s:
                acc[word] = s
            else:
                acc.pop(word, None)
        return _wrap(acc)

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def __neg__(self) -> "NCPoly":
        return _wrap({w: -c for w, c in self._terms.items()})

    def scale(self, factor: Fraction | int) -> "NCPoly":
        f = Fraction(factor)
        if not f:
            return NCPoly()
        return _wrap({w: c * f for w, c in self._terms.items()})

    def __mul__(self, factor: Fraction | int) -> "NCPoly":
        if isinstance(factor, (int, Fraction)):
            return self.scale(factor)
        return NotImplemented

    __rmul__ = __mul__

    def times_m(self, power: int) -> "NCPoly":
        """Multiply by the central scalar m**power."""
        return _wrap(
            {Word(w.beta, w.letters, w.m_power + power): c for w, c in self._terms.items()}
        )

    # -- involutions ----------------------------------------------------

    def beta_conjugate(self) -> "NCPoly":
        """Return beta * p * beta (flips the sign of beta-odd words)."""
        return _wrap({w: (-c if w.o_parity else c) for w, c in self._terms.items()})

    def adjoint(self) -> "NCPoly":
        """Formal adjoint: words reversed, all atoms and beta self-adjoint."""
        acc: dict[Word, Fraction] = {}
        for w, c in self._terms.items():
            # adjoint(beta^b w) = reverse(w) beta^b; pushing beta back to the
            # front crosses every O letter once.
            sign = -1 if (w.beta and w.o_parity) else 1
            word = Word(w.beta, w.letters[::-1], w.m_power)
            acc[word] = acc.get(word, Fraction(0)) + sign * c
        return _wrap({w: c for w, c in acc.items() if c})

    # -- grading ---------------------------------------------------------

    def even_part(self) -> "NCPoly":
        return _wrap({w: c for w, c in self._terms.items() if not w.o_parity})

    def odd_part(self) -> "NCPoly":
        return _wrap({w: c for w, c in self._terms.items() if w.o_parity})

    def weight_truncate(self, weight_max: int) -> "NCPoly":
        return _wrap({w: c for w, c in self._terms.items() if w.weight <= weight_max})

    # -- presentation ------------------------------------------------------

    def pretty(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for w in self.words():
            parts.append(f"{self._terms[w]} * {_word_str(w)}")
        return "  +  ".join(parts)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"NCPoly({self.pretty()})"


def _wrap(terms: dict[Word, Fraction]) -> NCPoly:
    p = NCPoly.__new__(NCPoly)
    p._terms = terms
    return p


def _word_str(w: Word) -> str:
    pieces = []
    if w.beta:
        pieces.append("b")
    i = 0
    while i < len(w.letters):
        j = i
        while j < len(w.letters) and w.letters[j] == w.letters[i]:
            j += 1
        run = j - i
        pieces.append(w.letters[i] if run == 1 else f"{w.letters[i]}^{run}")
        i = j
    if w.m_power:
        pieces.append(f"m^{w.m_power}")
    return " ".join(pieces) if pieces else "1"


# -- constructors ---------------------------------------------------------


def zero() -> NCPoly:
    return NCPoly()


def one() -> NCPoly:
    return _wrap({_IDENTITY_WORD: Fraction(1)})


def scalar(value: Fraction | int) -> NCPoly:
    v = Fraction(value)
    return _wrap({_IDENTITY_WORD: v}) if v else NCPoly()


def e_atom() -> NCPoly:
    return _wrap({Word(0, "E", 0): Fraction(1)})


def o_atom() -> NCPoly:
    return _wrap({Word(0, "O", 0): Fraction(1)})


def beta_atom() -> NCPoly:
    return _wrap({Word(1, "", 0): Fraction(1)})


def m_scalar(power: int = 1) -> NCPoly:
    return _wrap({Word(0, "", power): Fraction(1)})


def from_word(symbols: str, m_power: int = 0, coeff: Fraction | int = 1) -> NCPoly:
    """Build a single-word polynomial from a raw symbol string.

    ``symbols`` is read left to right over the alphabet ``B`` (beta),
    ``E``, ``O``.  The word is normalized on the fly: each ``B`` is
    pushed to the front, picking up one sign flip per ``O`` letter that
    it crosses, and pairs of betas cancel.
    """
    beta = 0
    sign = 1
    letters: list[str] = []
    o_seen = 0
    for ch in symbols:
        if ch == "B":
            if o_seen & 1:
                sign = -sign
            beta ^= 1
        elif ch in _ATOM_WEIGHT:
            letters.append(ch)
            if ch == "O":
                o_seen += 1
        else:
            raise ValueError(f"unknown symbol {ch!r} (expected B, E or O)")
    c = Fraction(coeff) * sign
    if not c:
        return NCPoly()
    return _wrap({Word(beta, "".join(letters), m_power): c})


# -- module-level operations ------------------------------------------------


def normalize(p: NCPoly) -> NCPoly:
    """Re-canonicalize a polynomial.

    Polynomials are constructed in normal form, so this re-merges terms
    and drops zeros; it is the identity on already-normal input and is
    idempotent by construction.
    """
    acc: dict[Word, Fraction] = {}
    for w, c in p.items():
        acc[w] = acc.get(w, Fraction(0)) + c
    return _wrap({w: c for w, c in acc.items() if c})


def mul(a: NCPoly, b: NCPoly, weight_max: int) -> NCPoly:
    """Normalized product with all terms of weight > weight_max dropped."""
    if weight_max < 0:
        raise ValueError("weight_max must be >= 0")
    acc: dict[Word, Fraction] = {}
    b_items = list(b.items())
    for wa, ca in a.items():
        weight_a = wa.weight
        if weight_a > weight_max:
            continue
        a_flip = _o_count(wa.letters) & 1
        for wb, cb in b_items:
            if weight_a + wb.weight > weight_max:
                continue
            # move wb's beta through wa's letters: one sign per O crossed
            c = ca * cb
            if wb.beta and a_flip:
                c = -c
            word = Word(wa.beta ^ wb.beta, wa.letters + wb.letters, wa.m_power + wb.m_power)
            s = acc.get(word, Fraction(0)) + c
            if s:
                acc[word] = s
            else:
                acc.pop(word, None)
    return _wrap(acc)


def commutator(a: NCPoly, b: NCPoly, weight_max: int) -> NCPoly:
    return mul(a, b, weight_max) - mul(b, a, weight_max)


def anticommutator(a: NCPoly, b: NCPoly, weight_max: int) -> NCPoly:
    return mul(a, b, weight_max) + mul(b, a, weight_max)


def even_odd_split(p: NCPoly) -> tuple[NCPoly, NCPoly]:
    """Split into the parts commuting and anticommuting with beta.

    Equivalent to ((p + beta p beta)/2, (p - beta p beta)/2); words with
    an even number of O letters commute with beta, the rest anticommute.
    """
    return p.even_part(), p.odd_part()


def truncate(p: NCPoly, weight_max: int) -> NCPoly:
    return p.weight_truncate(weight_max)


def adjoint(p: NCPoly) -> NCPoly:
    return p.adjoint()


def beta_conjugate(p: NCPoly) -> NCPoly:
    return p.beta_conjugate()


def identity_part(p: NCPoly) -> NCPoly:
    """Sub-polynomial of letter-free words (scalars and beta times scalars)."""
    return _wrap({w: c for w, c in p.items() if not w.letters})


# -- serialization -----------------------------------------------------------


def poly_to_json_obj(p: NCPoly) -> list[dict]:
    """Stable JSON form: entries sorted by (beta, word, m_power)."""
    out = []
    for w in p.words():
        c = p.coeff(w)
        out.append(
            {
                "beta": w.beta,
                "word": w.letters,
                "m_power": w.m_power,
                "coeff": f"{c.numerator}/{c.denominator}",
            }
        )
    return out


def poly_from_json_obj(obj: Iterable[Mapping]) -> NCPoly:
    acc: dict[Word, Fraction] = {}
    for entry in obj:
        word = Word(int(entry["beta"]), str(entry["word"]), int(entry["m_power"]))
        acc[word] = acc.get(word, Fraction(0)) + Fraction(entry["coeff"])
    return _wrap({w: c for w, c in acc.items() if c})
