from __future__ import annotations

import itertools

import numpy as np
import pytest

from logicalnm.code import (
    all_syndromes,
    correction_pair_products,
    decompose,
    find_uncorrectable_pair,
    format_code_file,
    get_code,
    in_normalizer,
    is_logical_error,
    is_stabilizer,
    logical_pauli_of,
    make_code,
    minimum_logical_weight,
    parse_code_file,
    parse_syndrome,
    stabilizer_group,
    syndrome_from_index,
    syndrome_index,
    syndrome_of,
    syndrome_str,
    verify_distance,
    xor_syndromes,
)
from logicalnm.errors import CodeValidationError, DimensionError, DomainError, SearchExhaustedError
from logicalnm.pauli import PauliOperator, all_paulis, dense, parse_pauli, pauli_mul, paulis_of_weight, weight

REP3_FILE = """\
# three-qubit bit-flip code
n 3
k 1
d 3
stabilizer ZZI
stabilizer IZZ
logical_z ZZZ
logical_x XXX
correction 00 III
correction 10 XII
correction 01 IIX
correction 11 IXI
"""


def codespace_projector_oracle(code) -> np.ndarray:
    dim = 1 << code.n
    proj = np.eye(dim, dtype=complex)
    for g in code.generators:
        proj = proj @ (np.eye(dim) + dense(g)) / 2
    return proj


def test_syndrome_indexing():
    assert syndrome_index((0, 1)) == 1
    assert syndrome_index((1, 0)) == 2
    assert syndrome_from_index(2, 2) == (1, 0)
    assert syndrome_str((0, 1)) == "01"
    assert parse_syndrome("10") == (1, 0)
    assert all_syndromes(2) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert xor_syndromes((1, 0), (1, 1)) == (0, 1)
    with pytest.raises(ValueError):
        parse_syndrome("12")


def test_syndrome_of_examples(rep3, five):
    assert syndrome_of(rep3, PauliOperator.identity(3)) == (0, 0)
    assert syndrome_of(rep3, parse_pauli("XII")) == (1, 0)
    assert syndrome_of(rep3, parse_pauli("IIX")) == (0, 1)
    singles = [PauliOperator.single(5, q, c) for q in range(5) for c in "XYZ"]
    synds = {syndrome_of(five, p) for p in singles}
    assert len(synds) == 15
    assert five.zero_syndrome not in synds
    with pytest.raises(DimensionError):
        syndrome_of(rep3, parse_pauli("XX"))


def test_syndrome_additivity(code, rng):
    for _ in range(200):
        a = PauliOperator(code.n, int(rng.integers(1 << code.n)), int(rng.integers(1 << code.n)))
        b = PauliOperator(code.n, int(rng.integers(1 << code.n)), int(rng.integers(1 << code.n)))
        assert syndrome_of(code, pauli_mul(a, b)) == xor_syndromes(syndrome_of(code, a), syndrome_of(code, b))


def test_decompose_is_exact(code):
    for p in itertools.islice(all_paulis(code.n), 0, None, 7):
        for phase in (0, 1, 2, 3):
            q = p.with_phase(phase)
            logical, corr = decompose(code, q)
            assert pauli_mul(logical, corr) == q
            assert corr == code.corrections[syndrome_of(code, q)]
            assert in_normalizer(code, logical)


def test_decompose_examples(rep3):
    for g in rep3.generators:
        logical, corr = decompose(rep3, g)
        assert logical == g and corr.is_identity()
    logical, corr = decompose(rep3, parse_pauli("XII"))
    assert corr == parse_pauli("XII")
    assert is_stabilizer(rep3, logical, up_to_phase=True)
    prod = pauli_mul(rep3.corrections[(1, 0)], rep3.corrections[(0, 1)])
    assert prod == parse_pauli("XIX")
    logical, corr = decompose(rep3, prod)
    assert corr == parse_pauli("IXI")
    assert is_logical_error(rep3, logical)
    assert logical_pauli_of(rep3, logical).letters == "X"


def test_decompose_brute_force_rep3(rep3):
    # independent route: search every (normalizer element, correction) factorization by brute force
    normalizer = [p for p in all_paulis(3) if all((dense(p) @ dense(g) == dense(g) @ dense(p)).all() for g in rep3.generators)]
    for p in all_paulis(3):
        logical, corr = decompose(rep3, p)
        candidates = [l for l in normalizer if pauli_mul(l, corr).same_letters(p)]
        assert any(l.same_letters(logical) for l in candidates)


def test_logical_pauli_of_examples(rep3, five):
    for code in (rep3, five):
        for g in code.generators:
            assert logical_pauli_of(code, g).is_identity(up_to_phase=True)
        assert logical_pauli_of(code, code.logical_z[0]).letters == "Z"
        assert logical_pauli_of(code, code.logical_x[0]).letters == "X"
        y = pauli_mul(code.logical_x[0], code.logical_z[0])
        assert logical_pauli_of(code, y).letters == "Y"
    assert logical_pauli_of(rep3, parse_pauli("XXX")).letters == "X"
    with pytest.raises(DomainError):
        logical_pauli_of(rep3, parse_pauli("XII"))


def test_logical_pauli_of_dense_oracle(rep3):
    # XXX acts on the codespace {|000>, |111>} exactly as a logical bit flip
    e = np.zeros((8, 2))
    e[0, 0] = e[7, 1] = 1
    action = e.T @ dense(parse_pauli("XXX")) @ e
    assert np.allclose(action, [[0, 1], [1, 0]])


def test_builtin_rep3(rep3):
    assert rep3.corrections[(1, 1)] == parse_pauli("IXI")
    assert rep3.corrections[(1, 0)] == parse_pauli("XII")
    assert rep3.corrections[(0, 1)] == parse_pauli("IIX")
    assert rep3.logical_z[0] == parse_pauli("ZZZ")
    assert np.linalg.matrix_rank(codespace_projector_oracle(rep3)) == 2
    rep3.validate()
    assert str(rep3) == "rep3 [[3,1,3]]"


def test_builtin_five_qubit(five):
    assert [g.letters for g in five.generators] == ["ZZXIX", "XZZXI", "IXZZX", "XIXZZ"]
    assert five.logical_z[0] == parse_pauli("-XIZIX")
    for s in five.syndromes:
        assert weight(five.corrections[s]) == (0 if s == five.zero_syndrome else 1)
    assert np.linalg.matrix_rank(codespace_projector_oracle(five)) == 2
    five.validate()


def test_five_qubit_distance_exhaustive(five):
    for w in (1, 2):
        for p in paulis_of_weight(5, w):
            assert not (in_normalizer(five, p) and is_logical_error(five, p))
    assert minimum_logical_weight(five) == 3
    assert verify_distance(five)


def test_rep3_distance_is_bitflip_only(rep3):
    # a single Z error is a logical operator: rep3 only protects against bit flips
    assert minimum_logical_weight(rep3) == 1
    x_only = [p for w in (1, 2) for p in paulis_of_weight(3, w) if p.z == 0]
    assert not any(in_normalizer(rep3, p) and is_logical_error(rep3, p) for p in x_only)


def test_weight_one_errors_equivalent_to_corrections(five, rep3):
    for p in paulis_of_weight(5, 1):
        corr = five.corrections[syndrome_of(five, p)]
        assert is_stabilizer(five, pauli_mul(p, corr), up_to_phase=True)
    for q in range(3):
        p = PauliOperator.single(3, q, "X")
        assert pauli_mul(p, rep3.corrections[syndrome_of(rep3, p)]).is_identity(up_to_phase=True)


def test_find_uncorrectable_pair_rep3(rep3):
    s1, s2, label = find_uncorrectable_pair(rep3)
    assert {s1, s2} == {(1, 0), (0, 1)}
    assert label.letters == "X"


def test_find_uncorrectable_pair_five(five):
    s1, s2, label = find_uncorrectable_pair(five)
    assert s1 != s2
    prod = pauli_mul(five.corrections[s1], five.corrections[s2])
    assert weight(prod) == 2
    assert not label.is_identity(up_to_phase=True)


def test_find_uncorrectable_pair_exhausted():
    toy = make_code(n=2, k=1, generators=[parse_pauli("ZZ")], logical_z=[parse_pauli("ZI")], declared_distance=1, name="toy")
    with pytest.raises(SearchExhaustedError):
        find_uncorrectable_pair(toy)


def test_every_weight_two_error_defeats_five_qubit_decoder(five):
    for p in paulis_of_weight(5, 2):
        logical, _ = decompose(five, p)
        assert is_logical_error(five, logical)


def test_correction_pair_products_five(five):
    # exhaustive census over distinct nonzero syndromes: frozen counts
    labels = {}
    for s1, s2, prod in correction_pair_products(five):
        labels[(s1, s2)] = logical_pauli_of(five, decompose(five, prod)[0]).letters
    assert len(labels) == 105
    counts = {c: sum(v == c for v in labels.values()) for c in "IXYZ"}
    assert counts == {"I": 15, "X": 30, "Y": 30, "Z": 30}


def test_stabilizer_group_size(code):
    group = list(stabilizer_group(code))
    assert len(group) == 1 << code.r
    assert all(is_stabilizer(code, g) for g in group)


def test_code_file_round_trip(rep3):
    parsed = parse_code_file(REP3_FILE, name="rep3")
    assert parsed.corrections == rep3.corrections
    assert parsed.generators == rep3.generators
    assert format_code_file(parsed) == format_code_file(rep3)
    assert parse_code_file(format_code_file(rep3)).fingerprint() == rep3.fingerprint()


def test_code_file_round_trip_five(five):
    again = parse_code_file(format_code_file(five))
    assert again.corrections == five.corrections
    assert again.logical_z == five.logical_z


def test_code_file_anticommuting_generators():
    text = "n 2\nk 0\nstabilizer XI\nstabilizer ZI\n"
    with pytest.raises(CodeValidationError, match="generators 1 and 2 anticommute"):
        parse_code_file(text)


def test_code_file_errors():
    with pytest.raises(CodeValidationError, match="line 3"):
        parse_code_file("n 3\nk 1\nstabilizer ZQI\n")
    with pytest.raises(CodeValidationError, match="unknown directive"):
        parse_code_file("n 3\nk 1\nfoo bar\n")
    with pytest.raises(CodeValidationError):
        parse_code_file("n 3\nk 1\nstabilizer ZZI\nstabilizer IZZ\nlogical_z ZZZ\ncorrection 10 IIX\n")
    with pytest.raises(CodeValidationError, match="n and k"):
        parse_code_file("stabilizer ZZ\n")


def test_code_file_inline_comments(rep3):
    text = REP3_FILE.replace("logical_x XXX", "logical_x XXX  # chosen representative")
    assert parse_code_file(text).logical_x == rep3.logical_x


def test_code_file_synthesizes_missing_parts():
    text = "n 3\nk 1\nstabilizer ZZI\nstabilizer IZZ\nlogical_z ZZZ\n"
    code = parse_code_file(text)
    for s in code.syndromes:
        assert syndrome_of(code, code.corrections[s]) == s
    # minimal weight with lexicographic tie-break on the string form
    assert code.corrections[(1, 0)] == parse_pauli("XII")
    assert code.corrections[(1, 1)] == parse_pauli("IXI")
    for j, d in enumerate(code.destabilizers):
        assert syndrome_of(code, d) == tuple(int(i == j) for i in range(2))
    assert logical_pauli_of(code, code.logical_x[0]).letters == "X"


def test_degenerate_code_synthesis():
    # [[4,2,2]]: several minimal-weight Paulis share each syndrome
    text = "n 4\nk 2\nstabilizer XXXX\nstabilizer ZZZZ\nlogical_z ZZII\nlogical_z ZIZI\n"
    code = parse_code_file(text)
    for s in code.syndromes:
        assert syndrome_of(code, code.corrections[s]) == s
    code.validate()


def test_get_code(tmp_path, rep3):
    assert get_code("rep3").name == "rep3"
    assert get_code("five-qubit").n == 5
    path = tmp_path / "rep.code"
    path.write_text(REP3_FILE)
    assert get_code(str(path)).corrections == rep3.corrections
