"""n-qubit Pauli operators in packed symplectic form.

A Pauli is stored as two integers ``x`` and ``z`` whose bit ``j`` describes
qubit ``j`` (qubit 0 is the leftmost character of the string form), plus a
phase exponent so that the operator equals ``i**phase`` times the tensor
product of Hermitian letters I, X, Y, Z.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator

import numpy as np

from .errors import CapacityError, DimensionError, PauliParseError

MAX_DENSE_QUBITS = 6

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_PREFIX_PHASE = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}
_PHASE_PREFIX = {0: "", 1: "i", 2: "-", 3: "-i"}
_PREFIX_RE = re.compile(r"^(\+i|-i|\+|-|i)?")

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliOperator:
    """Immutable n-qubit Pauli ``i**phase * P_0 (x) P_1 (x) ... (x) P_{n-1}``."""

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask or self.x < 0 or self.z < 0:
            raise ValueError(f"bit vectors do not fit in {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(n)

    @classmethod
    def from_bits(cls, x_bits: Iterable[int], z_bits: Iterable[int], phase: int = 0) -> PauliOperator:
        xs, zs = list(x_bits), list(z_bits)
        if len(xs) != len(zs):
            raise DimensionError("x and z bit vectors differ in length")
        x = sum(1 << j for j, b in enumerate(xs) if b)
        z = sum(1 << j for j, b in enumerate(zs) if b)
        return cls(len(xs), x, z, phase)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliOperator:
        bx, bz = _LETTER_BITS[letter]
        return cls(n, bx << qubit, bz << qubit)

    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple((self.x >> j) & 1 for j in range(self.n))

    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple((self.z >> j) & 1 for j in range(self.n))

    @property
    def letters(self) -> str:
        return "".join(_BITS_LETTER[(self.x >> j) & 1, (self.z >> j) & 1] for j in range(self.n))

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def is_identity(self, up_to_phase: bool = False) -> bool:
        return self.x == 0 and self.z == 0 and (up_to_phase or self.phase == 0)

    def same_letters(self, other: PauliOperator) -> bool:
        return self.n == other.n and self.x == other.x and self.z == other.z

    def without_phase(self) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z)

    def with_phase(self, phase: int) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z, phase)

    def adjoint(self) -> PauliOperator:
        # letters are Hermitian, so only the scalar is conjugated
        return PauliOperator(self.n, self.x, self.z, -self.phase)

    inverse = adjoint

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return pauli_mul(self, other)

    def __neg__(self) -> PauliOperator:
        return self.with_phase(self.phase + 2)

    def __str__(self) -> str:
        return format_pauli(self)

    def __repr__(self) -> str:
        return f"PauliOperator({format_pauli(self)!r})"

    def to_matrix(self) -> np.ndarray:
        return dense(self)


def _check_same_size(a: PauliOperator, b: PauliOperator) -> None:
    if a.n != b.n:
        raise DimensionError(f"Pauli sizes differ: {a.n} vs {b.n}")


def pauli_mul(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Operator product ``a @ b`` with exact power-of-i phase."""
    _check_same_size(a, b)
    mask = (1 << a.n) - 1
    a_x, a_y, a_z = a.x & ~a.z & mask, a.x & a.z, ~a.x & a.z & mask
    b_x, b_y, b_z = b.x & ~b.z & mask, b.x & b.z, ~b.x & b.z & mask
    # XY = iZ, YZ = iX, ZX = iY and the reversed orders pick up -i
    plus = (a_x & b_y) | (a_y & b_z) | (a_z & b_x)
    minus = (a_y & b_x) | (a_z & b_y) | (a_x & b_z)
    phase = a.phase + b.phase + plus.bit_count() - minus.bit_count()
    return PauliOperator(a.n, a.x ^ b.x, a.z ^ b.z, phase)


def pauli_product(paulis: Iterable[PauliOperator], n: int | None = None) -> PauliOperator:
    paulis = list(paulis)
    if not paulis:
        if n is None:
            raise ValueError("empty product needs an explicit qubit count")
        return PauliOperator.identity(n)
    return reduce(pauli_mul, paulis)


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    _check_same_size(a, b)
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) & 1


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    return symplectic_product(a, b) == 0


def weight(p: PauliOperator) -> int:
    return (p.x | p.z).bit_count()


def dense(p: PauliOperator) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix; qubit 0 is the most significant tensor factor."""
    if p.n > MAX_DENSE_QUBITS:
        raise CapacityError(f"dense expansion limited to {MAX_DENSE_QUBITS} qubits, got {p.n}")
    out = np.ones((1, 1), dtype=complex)
    for letter in p.letters:
        out = np.kron(out, _SINGLE[letter])
    return (1j ** p.phase) * out


def format_pauli(p: PauliOperator) -> str:
    return _PHASE_PREFIX[p.phase] + p.letters


def parse_pauli(text: str) -> PauliOperator:
    """Parse ``[+|-|i|-i]{I,X,Y,Z}*``, e.g. ``"-XIZIX"``."""
    text = text.strip()
    prefix = _PREFIX_RE.match(text).group(0)
    body = text[len(prefix):]
    # a bare "i"/"-i" with no letters is ambiguous with an empty body; treat as body error
    if not body:
        raise PauliParseError("empty Pauli string", len(prefix))
    x = z = 0
    for j, ch in enumerate(body):
        try:
            bx, bz = _LETTER_BITS[ch]
        except KeyError:
            raise PauliParseError(f"illegal character {ch!r}", len(prefix) + j) from None
        x |= bx << j
        z |= bz << j
    return PauliOperator(len(body), x, z, _PREFIX_PHASE[prefix])


def all_paulis(n: int) -> Iterator[PauliOperator]:
    """Every phase-free n-qubit Pauli, in lexicographic order of the string form."""
    order = "IXYZ"
    for idx in range(4 ** n):
        letters = []
        for _ in range(n):
            idx, r = divmod(idx, 4)
            letters.append(order[r])
        yield parse_pauli("".join(reversed(letters)))


def paulis_of_weight(n: int, w: int) -> Iterator[PauliOperator]:
    return (p for p in all_paulis(n) if weight(p) == w)


def random_pauli(n: int, rng: random.Random | np.random.Generator, with_phase: bool = True) -> PauliOperator:
    if isinstance(rng, np.random.Generator):
        x, z = (int(v) for v in rng.integers(0, 1 << n, size=2)) if n else (0, 0)
        phase = int(rng.integers(0, 4)) if with_phase else 0
    else:
        x, z = rng.getrandbits(n) if n else 0, rng.getrandbits(n) if n else 0
        phase = rng.randrange(4) if with_phase else 0
    return PauliOperator(n, x, z, phase)
