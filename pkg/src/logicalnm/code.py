"""Stabilizer codes with complete syndrome -> correction lookup tables.

Syndromes are tuples of bits ``(s_1, ..., s_{n-k})`` where ``s_j`` records
whether a Pauli anticommutes with generator ``j``. When a syndrome is used
as an integer index (confusion matrices, the syndrome register of the
encoding unitary) ``s_1`` is the most significant bit, so ``(0, 1)`` is
index 1 and the string form is ``"01"``.
"""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence


from .errors import CodeValidationError, DimensionError, DomainError, SearchExhaustedError
from .pauli import (
    PauliOperator,
    commutes,
    format_pauli,
    parse_pauli,
    pauli_mul,
    pauli_product,
    symplectic_product,
    weight,
)

Syndrome = tuple[int, ...]


def all_syndromes(r: int) -> list[Syndrome]:
    """All length-r syndromes in lexicographic (= integer index) order."""
    return [tuple(bits) for bits in itertools.product((0, 1), repeat=r)]


def syndrome_index(s: Sequence[int]) -> int:
    idx = 0
    for b in s:
        idx = (idx << 1) | int(b)
    return idx


def syndrome_from_index(idx: int, r: int) -> Syndrome:
    return tuple((idx >> (r - 1 - j)) & 1 for j in range(r))


def syndrome_str(s: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in s)


def parse_syndrome(text: str) -> Syndrome:
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"syndrome must be a non-empty bit string, got {text!r}")
    return tuple(int(c) for c in text)


def xor_syndromes(a: Sequence[int], b: Sequence[int]) -> Syndrome:
    if len(a) != len(b):
        raise DimensionError("syndrome lengths differ")
    return tuple(int(u) ^ int(v) for u, v in zip(a, b))


# --- GF(2) linear algebra on symplectic vectors ---------------------------------

def _sym_row(p: PauliOperator) -> int:
    """Row whose dot product with ``x | z << n`` is the symplectic product with p."""
    return p.z | (p.x << p.n)


def _gf2_solve(rows: Sequence[int], rhs: Sequence[int], nbits: int) -> int | None:
    """Solve ``<rows[i], v> = rhs[i]`` over GF(2); free variables are set to 0."""
    aug = [(r, b & 1) for r, b in zip(rows, rhs)]
    pivots: list[tuple[int, int, int]] = []
    for col in reversed(range(nbits)):
        bit = 1 << col
        pick = next((i for i, (r, _) in enumerate(aug) if r & bit), None)
        if pick is None:
            continue
        pr, pb = aug.pop(pick)
        aug = [((r ^ pr, b ^ pb) if r & bit else (r, b)) for r, b in aug]
        pivots = [((q ^ pr, c ^ pb, pc) if q & bit else (q, c, pc)) for q, c, pc in pivots]
        pivots.append((pr, pb, col))
    if any(r == 0 and b for r, b in aug):
        return None
    v = 0
    for r, b, col in pivots:
        if b:
            v |= 1 << col
    return v


def _gf2_rank(vectors: Iterable[int]) -> int:
    basis: dict[int, int] = {}  # leading bit -> vector
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return len(basis)


def _pauli_from_vector(v: int, n: int) -> PauliOperator:
    mask = (1 << n) - 1
    return PauliOperator(n, v & mask, (v >> n) & mask)


@dataclass(frozen=True)
class StabilizerCode:
    """An [[n, k, d]] stabilizer code together with its decoder lookup table."""

    n: int
    k: int
    generators: tuple[PauliOperator, ...]
    logical_z: tuple[PauliOperator, ...]
    logical_x: tuple[PauliOperator, ...]
    destabilizers: tuple[PauliOperator, ...]
    corrections: Mapping[Syndrome, PauliOperator] = field(hash=False, compare=True)
    declared_distance: int | None = None
    name: str = "code"

    @property
    def r(self) -> int:
        """Number of stabilizer generators (syndrome length)."""
        return self.n - self.k

    @property
    def syndromes(self) -> list[Syndrome]:
        return all_syndromes(self.r)

    @property
    def zero_syndrome(self) -> Syndrome:
        return (0,) * self.r

    def correction(self, s: Sequence[int]) -> PauliOperator:
        s = tuple(int(b) for b in s)
        if len(s) != self.r:
            raise DimensionError(f"syndrome length {len(s)} != {self.r}")
        return self.corrections[s]

    def validate(self) -> None:
        validate_code(self)

    def fingerprint(self) -> str:
        return hashlib.sha256(format_code_file(self).encode()).hexdigest()

    def __str__(self) -> str:
        d = self.declared_distance if self.declared_distance is not None else "?"
        return f"{self.name} [[{self.n},{self.k},{d}]]"


def syndrome_of(code: StabilizerCode, p: PauliOperator) -> Syndrome:
    if p.n != code.n:
        raise DimensionError(f"Pauli on {p.n} qubits, code has {code.n}")
    return tuple(symplectic_product(p, g) for g in code.generators)


def in_normalizer(code: StabilizerCode, p: PauliOperator) -> bool:
    return not any(syndrome_of(code, p))


def _generator_combination(code: StabilizerCode, p: PauliOperator) -> PauliOperator | None:
    """Product of generators with the same letters as p, or None if p's letters are not in <S>."""
    # the x|z bits of p must be a GF(2) combination of generator bit vectors
    target = p.x | (p.z << code.n)
    vecs = [g.x | (g.z << code.n) for g in code.generators]
    # solve sum_j c_j vecs_j = target, i.e. rows are bit positions
    nbits = len(vecs)
    rows, rhs = [], []
    for bit in range(2 * code.n):
        rows.append(sum(((v >> bit) & 1) << j for j, v in enumerate(vecs)))
        rhs.append((target >> bit) & 1)
    sol = _gf2_solve(rows, rhs, nbits)
    if sol is None:
        return None
    chosen = [g for j, g in enumerate(code.generators) if (sol >> j) & 1]
    return pauli_product(chosen, code.n)


def is_stabilizer(code: StabilizerCode, p: PauliOperator, up_to_phase: bool = False) -> bool:
    """True iff p is an element of the stabilizer group (with sign +1 unless up_to_phase)."""
    combo = _generator_combination(code, p)
    if combo is None:
        return False
    return up_to_phase or combo.phase == p.phase


def decompose(code: StabilizerCode, p: PauliOperator) -> tuple[PauliOperator, PauliOperator]:
    """Split p into ``(logical, correction)`` with ``p == logical * correction`` exactly."""
    correction = code.corrections[syndrome_of(code, p)]
    logical = pauli_mul(p, correction.inverse())
    return logical, correction


def logical_pauli_of(code: StabilizerCode, l: PauliOperator) -> PauliOperator:
    """k-qubit Pauli represented by a normalizer element, sign included.

    The result ``P`` satisfies ``l = S * P_bar`` for some stabilizer-group
    element ``S`` (up to the scalar recorded in P's phase), where ``P_bar``
    is built from the code's ``logical_x``/``logical_z`` with
    ``Y_bar = i X_bar Z_bar``.
    """
    if l.n != code.n:
        raise DimensionError(f"Pauli on {l.n} qubits, code has {code.n}")
    if not in_normalizer(code, l):
        raise DomainError(f"{format_pauli(l)} does not commute with every stabilizer generator")
    xs = [symplectic_product(l, zl) for zl in code.logical_z]
    zs = [symplectic_product(l, xl) for xl in code.logical_x]
    rep = PauliOperator.identity(code.n)
    for i in range(code.k):
        if xs[i]:
            rep = pauli_mul(rep, code.logical_x[i])
        if zs[i]:
            rep = pauli_mul(rep, code.logical_z[i])
        if xs[i] and zs[i]:
            rep = rep.with_phase(rep.phase + 1)
    rem = pauli_mul(l, rep.inverse())
    combo = _generator_combination(code, rem)
    if combo is None:
        raise DomainError(f"{format_pauli(l)} is not generated by the stabilizers and logical operators")
    return PauliOperator.from_bits(xs, zs, rem.phase - combo.phase)


def is_logical_error(code: StabilizerCode, l: PauliOperator) -> bool:
    """True iff a normalizer element acts non-trivially on the logical qubits (l in N(S) \\ S)."""
    return not logical_pauli_of(code, l).is_identity(up_to_phase=True)


def find_uncorrectable_pair(code: StabilizerCode) -> tuple[Syndrome, Syndrome, PauliOperator]:
    """First pair ``s1 < s2`` (lexicographic) whose corrections multiply to a logical error.

    Returns ``(s1, s2, P)`` with ``P`` the k-qubit logical Pauli carried by
    ``R(s1) R(s2)``.
    """
    synds = code.syndromes
    for i, s1 in enumerate(synds):
        for s2 in synds[i + 1:]:
            prod = pauli_mul(code.corrections[s1], code.corrections[s2])
            logical, _ = decompose(code, prod)
            label = logical_pauli_of(code, logical)
            if not label.is_identity(up_to_phase=True):
                return s1, s2, label
    raise SearchExhaustedError(
        f"no pair of corrections combines to a logical error in {code}; distance < 3 or inconsistent corrections"
    )


# --- construction and validation -------------------------------------------------

def synthesize_destabilizers(
    n: int,
    generators: Sequence[PauliOperator],
    logicals: Sequence[PauliOperator] = (),
) -> tuple[PauliOperator, ...]:
    """D_j anticommuting with generator j only, and commuting with every logical operator."""
    rows = [_sym_row(g) for g in generators] + [_sym_row(l) for l in logicals]
    out = []
    for j in range(len(generators)):
        rhs = [int(i == j) for i in range(len(generators))] + [0] * len(logicals)
        v = _gf2_solve(rows, rhs, 2 * n)
        if v is None:
            raise CodeValidationError(f"no destabilizer exists for generator {j}; generators are dependent")
        out.append(_pauli_from_vector(v, n))
    return tuple(out)


def synthesize_logical_x(
    n: int,
    generators: Sequence[PauliOperator],
    logical_z: Sequence[PauliOperator],
) -> tuple[PauliOperator, ...]:
    chosen: list[PauliOperator] = []
    for i in range(len(logical_z)):
        rows = [_sym_row(g) for g in generators] + [_sym_row(z) for z in logical_z] + [_sym_row(x) for x in chosen]
        rhs = [0] * len(generators) + [int(j == i) for j in range(len(logical_z))] + [0] * len(chosen)
        v = _gf2_solve(rows, rhs, 2 * n)
        if v is None:
            raise CodeValidationError(f"no logical X partner exists for logical Z {i}")
        chosen.append(_pauli_from_vector(v, n))
    return tuple(chosen)


def _paulis_by_weight(n: int, w: int) -> list[PauliOperator]:
    out = []
    for support in itertools.combinations(range(n), w):
        for letters in itertools.product("XYZ", repeat=w):
            chars = ["I"] * n
            for q, c in zip(support, letters):
                chars[q] = c
            out.append("".join(chars))
    return [parse_pauli(s) for s in sorted(out)]


def synthesize_corrections(
    n: int,
    generators: Sequence[PauliOperator],
) -> dict[Syndrome, PauliOperator]:
    """Minimum-weight Pauli for every syndrome, ties broken by string order."""
    r = len(generators)
    table: dict[Syndrome, PauliOperator] = {}
    for w in range(n + 1):
        for p in _paulis_by_weight(n, w) if w else [PauliOperator.identity(n)]:
            s = tuple(symplectic_product(p, g) for g in generators)
            table.setdefault(s, p)
        if len(table) == 1 << r:
            return table
    raise CodeValidationError("some syndromes have no Pauli representative; generators are dependent")


def make_code(
    n: int,
    k: int,
    generators: Sequence[PauliOperator],
    logical_z: Sequence[PauliOperator],
    logical_x: Sequence[PauliOperator] | None = None,
    corrections: Mapping[Syndrome, PauliOperator] | None = None,
    declared_distance: int | None = None,
    name: str = "code",
) -> StabilizerCode:
    """Assemble and validate a code, synthesizing whatever was left out."""
    generators = tuple(generators)
    logical_z = tuple(logical_z)
    for p in (*generators, *logical_z, *(logical_x or ()), *((corrections or {}).values())):
        if p.n != n:
            raise CodeValidationError(f"{format_pauli(p)} acts on {p.n} qubits, expected {n}")
    if len(generators) != n - k:
        raise CodeValidationError(f"expected {n - k} stabilizer generators, got {len(generators)}")
    if len(logical_z) != k:
        raise CodeValidationError(f"expected {k} logical_z operators, got {len(logical_z)}")
    _check_generators(n, generators)
    if logical_x is None or len(logical_x) == 0:
        logical_x = synthesize_logical_x(n, generators, logical_z)
    logical_x = tuple(logical_x)
    if corrections is None:
        corrections = synthesize_corrections(n, generators)
    destabilizers = synthesize_destabilizers(n, generators, (*logical_z, *logical_x))
    code = StabilizerCode(
        n=n,
        k=k,
        generators=generators,
        logical_z=logical_z,
        logical_x=logical_x,
        destabilizers=destabilizers,
        corrections=dict(sorted(corrections.items())),
        declared_distance=declared_distance,
        name=name,
    )
    validate_code(code)
    return code


def _check_generators(n: int, generators: Sequence[PauliOperator]) -> None:
    for i, g in enumerate(generators):
        if g.is_identity(up_to_phase=True):
            raise CodeValidationError(f"generator {i + 1} is proportional to the identity")
        if not g.is_hermitian:
            raise CodeValidationError(f"generator {i + 1} is not Hermitian")
    for (i, a), (j, b) in itertools.combinations(enumerate(generators), 2):
        if not commutes(a, b):
            raise CodeValidationError(f"generators {i + 1} and {j + 1} anticommute")
    if _gf2_rank(g.x | (g.z << n) for g in generators) != len(generators):
        raise CodeValidationError("generators are not independent")


def validate_code(code: StabilizerCode) -> None:
    """Raise CodeValidationError naming the first violated invariant."""
    n, r = code.n, code.r
    _check_generators(n, code.generators)
    # -I in S iff some product of generators is -I; with independent generators the only
    # product with identity letters is the empty one, so the sign check is implied.
    if len(code.logical_x) != code.k:
        raise CodeValidationError(f"expected {code.k} logical_x operators, got {len(code.logical_x)}")
    for name, ops in (("logical_z", code.logical_z), ("logical_x", code.logical_x)):
        for i, op in enumerate(ops):
            if not op.is_hermitian:
                raise CodeValidationError(f"{name} {i + 1} is not Hermitian")
            for j, g in enumerate(code.generators):
                if not commutes(op, g):
                    raise CodeValidationError(f"{name} {i + 1} anticommutes with generator {j + 1}")
    for i, zl in enumerate(code.logical_z):
        for j, xl in enumerate(code.logical_x):
            if commutes(zl, xl) == (i == j):
                rel = "commutes" if i == j else "anticommutes"
                raise CodeValidationError(f"logical_z {i + 1} {rel} with logical_x {j + 1}")
    for (i, a), (j, b) in itertools.combinations(enumerate(code.logical_z), 2):
        if not commutes(a, b):
            raise CodeValidationError(f"logical_z {i + 1} and {j + 1} anticommute")
    for (i, a), (j, b) in itertools.combinations(enumerate(code.logical_x), 2):
        if not commutes(a, b):
            raise CodeValidationError(f"logical_x {i + 1} and {j + 1} anticommute")
    for i, zl in enumerate(code.logical_z):
        if _generator_combination(code, zl) is not None:
            raise CodeValidationError(f"logical_z {i + 1} is a stabilizer")
    if len(code.destabilizers) != r:
        raise CodeValidationError(f"expected {r} destabilizers, got {len(code.destabilizers)}")
    for j, d in enumerate(code.destabilizers):
        expected = tuple(int(i == j) for i in range(r))
        if syndrome_of(code, d) != expected:
            raise CodeValidationError(f"destabilizer {j + 1} has syndrome {syndrome_str(syndrome_of(code, d))}")
    missing = [syndrome_str(s) for s in code.syndromes if s not in code.corrections]
    if missing:
        raise CodeValidationError(f"correction table is missing syndromes {', '.join(missing)}")
    if len(code.corrections) != 1 << r:
        raise CodeValidationError("correction table has entries of the wrong length")
    for s, corr in code.corrections.items():
        if syndrome_of(code, corr) != s:
            raise CodeValidationError(
                f"correction {format_pauli(corr)} for syndrome {syndrome_str(s)} has syndrome "
                f"{syndrome_str(syndrome_of(code, corr))}"
            )
    if not code.corrections[code.zero_syndrome].is_identity():
        raise CodeValidationError("correction for the trivial syndrome must be the identity")


def minimum_logical_weight(code: StabilizerCode, max_weight: int | None = None) -> int | None:
    """Smallest weight of a Pauli in N(S) \\ S, searching up to max_weight (default n)."""
    top = code.n if max_weight is None else max_weight
    for w in range(1, top + 1):
        for p in _paulis_by_weight(code.n, w):
            if in_normalizer(code, p) and is_logical_error(code, p):
                return w
    return None


def verify_distance(code: StabilizerCode) -> bool:
    """Exhaustively confirm the declared distance (n <= 6)."""
    if code.n > 6:
        raise DomainError("exhaustive distance check is limited to n <= 6")
    if code.declared_distance is None:
        return True
    return minimum_logical_weight(code) == code.declared_distance


# --- built-in codes ------------------------------------------------------------

def builtin_rep3() -> StabilizerCode:
    """Three-qubit bit-flip repetition code with the single-flip decoder."""
    p = parse_pauli
    return make_code(
        n=3,
        k=1,
        generators=[p("ZZI"), p("IZZ")],
        logical_z=[p("ZZZ")],
        logical_x=[p("XXX")],
        corrections={
            (0, 0): p("III"),
            (1, 0): p("XII"),
            (0, 1): p("IIX"),
            (1, 1): p("IXI"),
        },
        declared_distance=3,
        name="rep3",
    )


def builtin_five_qubit() -> StabilizerCode:
    """The [[5,1,3]] perfect code; every nonzero syndrome is corrected by a weight-one Pauli."""
    p = parse_pauli
    generators = [p("ZZXIX"), p("XZZXI"), p("IXZZX"), p("XIXZZ")]
    corrections = {(0, 0, 0, 0): PauliOperator.identity(5)}
    for q in range(5):
        for letter in "XYZ":
            e = PauliOperator.single(5, q, letter)
            corrections[tuple(symplectic_product(e, g) for g in generators)] = e
    return make_code(
        n=5,
        k=1,
        generators=generators,
        logical_z=[p("-XIZIX")],
        logical_x=[p("XXXXX")],
        corrections=corrections,
        declared_distance=3,
        name="five-qubit",
    )


BUILTIN_CODES = {"rep3": builtin_rep3, "five-qubit": builtin_five_qubit}


def get_code(name_or_path: str) -> StabilizerCode:
    if name_or_path in BUILTIN_CODES:
        return BUILTIN_CODES[name_or_path]()
    with open(name_or_path, encoding="utf-8") as fh:
        return parse_code_file(fh.read())


# --- code-definition file ----------------------------------------------------

def parse_code_file(text: str, name: str = "custom") -> StabilizerCode:
    """Parse the line-oriented code-definition format.

    ::

        # three-qubit repetition code
        n 3
        k 1
        d 3
        stabilizer ZZI
        stabilizer IZZ
        logical_z ZZZ
        logical_x XXX
        correction 10 XII
    """
    n = k = d = None
    stabs: list[PauliOperator] = []
    lz: list[PauliOperator] = []
    lx: list[PauliOperator] = []
    corrections: dict[Syndrome, PauliOperator] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("#"):
            continue
        key, *args = line.split()
        try:
            if key in ("n", "k", "d"):
                (value,) = args
                if key == "n":
                    n = int(value)
                elif key == "k":
                    k = int(value)
                else:
                    d = int(value)
            elif key == "name":
                (name,) = args
            elif key == "stabilizer":
                (value,) = args
                stabs.append(parse_pauli(value))
            elif key == "logical_z":
                (value,) = args
                lz.append(parse_pauli(value))
            elif key == "logical_x":
                (value,) = args
                lx.append(parse_pauli(value))
            elif key == "correction":
                bits, value = args
                s = parse_syndrome(bits)
                if s in corrections:
                    raise CodeValidationError(f"duplicate correction for syndrome {bits}")
                corrections[s] = parse_pauli(value)
            else:
                raise CodeValidationError(f"unknown directive {key!r}")
        except CodeValidationError as exc:
            raise CodeValidationError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise CodeValidationError(f"line {lineno}: {exc}") from None
    if n is None or k is None:
        raise CodeValidationError("code file must declare both n and k")
    if corrections:
        bad = [syndrome_str(s) for s in corrections if len(s) != n - k]
        if bad:
            raise CodeValidationError(f"correction syndromes have wrong length: {', '.join(bad)}")
    return make_code(
        n=n,
        k=k,
        generators=stabs,
        logical_z=lz,
        logical_x=lx or None,
        corrections=corrections or None,
        declared_distance=d,
        name=name,
    )


def format_code_file(code: StabilizerCode) -> str:
    """Canonical file form; ``parse_code_file`` inverts it."""
    lines = [f"name {code.name}", f"n {code.n}", f"k {code.k}"]
    if code.declared_distance is not None:
        lines.append(f"d {code.declared_distance}")
    lines += [f"stabilizer {format_pauli(g)}" for g in code.generators]
    lines += [f"logical_z {format_pauli(z)}" for z in code.logical_z]
    lines += [f"logical_x {format_pauli(x)}" for x in code.logical_x]
    lines += [f"correction {syndrome_str(s)} {format_pauli(code.corrections[s])}" for s in code.syndromes]
    return "\n".join(lines) + "\n"


def stabilizer_group(code: StabilizerCode) -> Iterator[PauliOperator]:
    for bits in itertools.product((0, 1), repeat=code.r):
        yield pauli_product([g for b, g in zip(bits, code.generators) if b], code.n)


def correction_pair_products(code: StabilizerCode) -> Iterator[tuple[Syndrome, Syndrome, PauliOperator]]:
    """``(s1, s2, R(s1) R(s2))`` for every unordered pair of distinct nonzero syndromes."""
    nonzero = code.syndromes[1:]
    for i, s1 in enumerate(nonzero):
        for s2 in nonzero[i + 1:]:
            yield s1, s2, pauli_mul(code.corrections[s1], code.corrections[s2])


def anticommutes_with_logical_z(code: StabilizerCode, p: PauliOperator) -> bool:
    """Whether p flips some logical Z (an X- or Y-type logical component)."""
    logical, _ = decompose(code, p)
    return any(not commutes(logical, z) for z in code.logical_z)


def weight_profile(ps: Iterable[PauliOperator]) -> dict[int, int]:
    out: dict[int, int] = {}
    for p in ps:
        out[weight(p)] = out.get(weight(p), 0) + 1
    return out
