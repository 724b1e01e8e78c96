"""Phased Pauli strings in symplectic bitmask form.

A term is ``i**phase * P[0] (x) P[1] (x) ... (x) P[width-1]`` where each
letter is one of I, X, Y, Z. Letter ``k`` is encoded in bit ``k`` of the
``x`` and ``z`` masks (I=00, X=10, Z=01, Y=11). Position 0 is the leftmost
tensor factor, i.e. the most significant qubit of a dense realization.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable

import numpy as np

MAX_DENSE_WIDTH = 10

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_PHASE_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_TEXT_PHASE = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}
_TERM_RE = re.compile(r"^\s*([+-]?i?)([IXYZ]+)\s*$")

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class WidthMismatchError(ValueError):
    """Raised when two terms of different widths are combined."""


class OracleSizeError(ValueError):
    """Raised when a dense realization would exceed the desk-scale cap."""


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, slots=True)
class PauliTerm:
    width: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        if self.width < 1:
            raise ValueError(f"width must be positive, got {self.width}")
        limit = 1 << self.width
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("bitmask exceeds width")
        object.__setattr__(self, "phase", self.phase % 4)

    # construction ---------------------------------------------------------
    @classmethod
    def identity(cls, width: int, phase: int = 0) -> PauliTerm:
        return cls(width, 0, 0, phase)

    @classmethod
    def from_letters(cls, letters: str, phase: int = 0) -> PauliTerm:
        x = z = 0
        for k, ch in enumerate(letters):
            try:
                bx, bz = _LETTER_BITS[ch]
            except KeyError:
                raise ValueError(f"bad Pauli letter {ch!r}") from None
            x |= bx << k
            z |= bz << k
        return cls(len(letters), x, z, phase)

    @classmethod
    def single(cls, width: int, position: int, letter: str, phase: int = 0) -> PauliTerm:
        bx, bz = _LETTER_BITS[letter]
        return cls(width, bx << position, bz << position, phase)

    @classmethod
    def from_sites(cls, width: int, sites: Iterable[tuple[int, str]], phase: int = 0) -> PauliTerm:
        """Build from ``(position, letter)`` pairs; positions must be distinct."""
        x = z = 0
        seen = set()
        for pos, letter in sites:
            if pos in seen:
                raise ValueError(f"position {pos} given twice")
            seen.add(pos)
            bx, bz = _LETTER_BITS[letter]
            x |= bx << pos
            z |= bz << pos
        return cls(width, x, z, phase)

    @classmethod
    def parse(cls, text: str) -> PauliTerm:
        """Parse the text form, e.g. ``"+iXXII"`` or ``"-ZY"``."""
        m = _TERM_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse Pauli term {text!r}")
        return cls.from_letters(m.group(2), _TEXT_PHASE[m.group(1)])

    # views ----------------------------------------------------------------
    @property
    def letters(self) -> str:
        return "".join(self.letter(k) for k in range(self.width))

    def letter(self, position: int) -> str:
        return _BITS_LETTER[((self.x >> position) & 1, (self.z >> position) & 1)]

    @property
    def support(self) -> tuple[int, ...]:
        mask = self.x | self.z
        return tuple(k for k in range(self.width) if mask >> k & 1)

    @property
    def coefficient(self) -> complex:
        return 1j ** self.phase

    def is_z_only(self) -> bool:
        return self.x == 0

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def word(self) -> PauliTerm:
        """The same word with phase dropped (a Hermitian Pauli string)."""
        return PauliTerm(self.width, self.x, self.z, 0)

    def same_word(self, other: PauliTerm) -> bool:
        return self.width == other.width and self.x == other.x and self.z == other.z

    def __str__(self) -> str:
        return _PHASE_TEXT[self.phase] + self.letters

    # algebra --------------------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            return multiply(self, other)
        return NotImplemented

    def scale(self, q: int) -> PauliTerm:
        """Multiply by ``i**q``."""
        return PauliTerm(self.width, self.x, self.z, self.phase + q)

    def dagger(self) -> PauliTerm:
        return PauliTerm(self.width, self.x, self.z, -self.phase)

    def weight(self) -> int:
        return weight(self)

    def to_dense(self) -> np.ndarray:
        return to_dense(self)


def _check_width(a: PauliTerm, b: PauliTerm):
    if a.width != b.width:
        raise WidthMismatchError(f"width mismatch: {a.width} vs {b.width}")


def multiply(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Exact product ``a @ b`` including the phase.

    With ``sigma(x, z) = i**(x.z) X**x Z**z`` the product picks up
    ``(-1)**(z_a . x_b)`` from moving Z past X.
    """
    _check_width(a, b)
    x = a.x ^ b.x
    z = a.z ^ b.z
    q = (
        a.phase
        + b.phase
        + _popcount(a.x & a.z)
        + _popcount(b.x & b.z)
        - _popcount(x & z)
        + 2 * _popcount(a.z & b.x)
    )
    return PauliTerm(a.width, x, z, q)


def product(terms: Iterable[PauliTerm]) -> PauliTerm:
    return reduce(multiply, terms)


def anticommutes(a: PauliTerm, b: PauliTerm) -> bool:
    _check_width(a, b)
    return (_popcount(a.x & b.z) + _popcount(a.z & b.x)) % 2 == 1


def commutes(a: PauliTerm, b: PauliTerm) -> bool:
    return not anticommutes(a, b)


def weight(a: PauliTerm) -> int:
    return _popcount(a.x | a.z)


def to_dense(a: PauliTerm) -> np.ndarray:
    """Kronecker realization, leftmost letter as the most significant factor."""
    if a.width > MAX_DENSE_WIDTH:
        raise OracleSizeError(f"width {a.width} exceeds dense cap {MAX_DENSE_WIDTH}")
    mat = reduce(np.kron, (_SINGLE[ch] for ch in a.letters))
    return a.coefficient * mat


def index_masks(a: PauliTerm) -> tuple[int, int]:
    """x and z masks reordered so position k maps to bit ``width-1-k``.

    This is the computational-basis index convention of the dense oracle.
    """
    n = a.width
    x = z = 0
    for k in range(n):
        x |= ((a.x >> k) & 1) << (n - 1 - k)
        z |= ((a.z >> k) & 1) << (n - 1 - k)
    return x, z


def basis_expectation(a: PauliTerm, bits) -> complex:
    """<n|a|n> for a computational basis state given as a bit sequence."""
    if len(bits) != a.width:
        raise WidthMismatchError(f"{len(bits)} bits for width {a.width}")
    if a.x:
        return 0.0
    nmask = sum(1 << k for k, b in enumerate(bits) if b)
    sign = -1 if _popcount(a.z & nmask) % 2 else 1
    return sign * a.coefficient
