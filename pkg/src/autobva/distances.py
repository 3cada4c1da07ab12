"""String distances over rendered outputs, plus the boundariness quotient.

Boundariness of an input pair is output distance over input distance.  All
scores are kept as exact rationals so threshold tests and rankings are
reproducible across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .values import InputTuple

Distance = Union[int, Fraction]


def strlendist(s1: str, s2: str) -> int:
    """Absolute difference of Unicode scalar counts; the fast search distance."""
    return abs(len(s1) - len(s2))


def ngrams(s: str, n: int) -> frozenset:
    """Contiguous n-grams; a string shorter than n contributes itself whole."""
    if len(s) < n:
        return frozenset((s,))
    return frozenset(s[i:i + n] for i in range(len(s) - n + 1))


def jaccard_ngram(n: int, s1: str, s2: str) -> Fraction:
    """1 - |A&B|/|A|B| over the two n-gram sets, as an exact fraction."""
    if n < 1:
        raise ValueError("n-gram size must be >= 1")
    a, b = ngrams(s1, n), ngrams(s2, n)
    if not a and not b:
        return Fraction(0)
    if not a or not b:
        return Fraction(1)
    union = len(a | b)
    return Fraction(union - len(a & b), union)


def levenshtein(s1: str, s2: str) -> int:
    """Minimal insert/delete/substitute edit count (two-row DP)."""
    if s1 == s2:
        return 0
    if len(s1) < len(s2):
        s1, s2 = s2, s1
    previous = list(range(len(s2) + 1))
    for i, c1 in enumerate(s1, start=1):
        current = [i] + [0] * len(s2)
        for j, c2 in enumerate(s2, start=1):
            current[j] = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (c1 != c2),
            )
        previous = current
    return previous[-1]


def input_distance(i1: InputTuple, i2: InputTuple) -> int:
    """L1 distance over arbitrary-precision magnitudes, booleans as 0/1."""
    if len(i1) != len(i2):
        raise ValueError("input tuples must have equal arity")
    return sum(abs(int(a) - int(b)) for a, b in zip(i1, i2))


@dataclass(frozen=True)
class OutputDistance:
    """A named output distance usable as a callable on two strings."""

    kind: str          # strlendist | jaccard | levenshtein
    ngram: int = 1     # only meaningful for jaccard

    def __call__(self, s1: str, s2: str) -> Distance:
        if self.kind == "strlendist":
            return strlendist(s1, s2)
        if self.kind == "jaccard":
            return jaccard_ngram(self.ngram, s1, s2)
        if self.kind == "levenshtein":
            return levenshtein(s1, s2)
        raise ValueError(f"unknown output distance kind {self.kind!r}")

    @property
    def name(self) -> str:
        return f"jaccard{self.ngram}" if self.kind == "jaccard" else \
            ("strlen" if self.kind == "strlendist" else self.kind)


STRLEN = OutputDistance("strlendist")
JACCARD1 = OutputDistance("jaccard", 1)
JACCARD2 = OutputDistance("jaccard", 2)
LEVENSHTEIN = OutputDistance("levenshtein")

_BY_NAME = {
    "strlen": STRLEN,
    "strlendist": STRLEN,
    "jaccard1": JACCARD1,
    "jaccard2": JACCARD2,
    "levenshtein": LEVENSHTEIN,
}


def parse_distance(name: str) -> OutputDistance:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown distance {name!r} (expected one of {sorted(set(_BY_NAME))})") from None


def pdq(i1: InputTuple, text1: str, i2: InputTuple, text2: str,
        output_distance: OutputDistance = STRLEN) -> Fraction:
    """Program difference quotient d_o(P(a), P(b)) / d_i(a, b), exact.

    The two inputs must be distinct; error outcomes participate through their
    rendered error text like any other output.
    """
    d_o = output_distance(text1, text2)
    if d_o == 0:
        # zero input distance means elementwise-equal tuples (bools compare as 0/1)
        if i1 == i2:
            raise ValueError("boundariness needs two distinct inputs (zero input distance)")
        return Fraction(0)
    d_i = input_distance(i1, i2)
    if d_i == 0:
        raise ValueError("boundariness needs two distinct inputs (zero input distance)")
    return Fraction(d_o) / d_i
