from __future__ import annotations

import numpy as np
import pytest

from logicalnm.channels import ConfusionMatrix, bitflip_confusion, random_cptp, recovery_map
from logicalnm.code import parse_code_file
from logicalnm.errors import CapacityError, DimensionError, DomainError, HypothesisError
from logicalnm.experiments import (
    DecayRecord,
    above_floor,
    circuit_oracle,
    composability_check,
    error_rates,
    leading_order_report,
    log_linear_fit,
    logical_flip_fraction,
    polarization_sequence,
    single_flip_sequences,
    sufficiency_suite,
    two_round_pauli_prediction,
    verify_theorem1,
)
from logicalnm.markov import polarization_vectors, spectral_summary, transition_matrix

from support import cached_noisy


@pytest.mark.parametrize("p", [0.01, 0.05, 0.1, 0.3])
def test_first_round_is_perfect(code, p):
    rec = polarization_sequence(code, p, 3)
    assert rec.q[0] == pytest.approx(1, abs=1e-12)
    assert rec.q[1] == pytest.approx(1, abs=1e-12)
    assert rec.q[2] < 1 - 1e-6


def test_zero_noise_never_decays(code):
    assert np.allclose(polarization_sequence(code, 0.0, 10).q, 1, atol=1e-12)


def test_decay_record_invariants(code):
    rec = polarization_sequence(code, 0.1, 40)
    q = np.array(rec.q)
    assert np.all(np.abs(q) <= 1 + 1e-12)
    assert np.all(np.diff(q[1:]) <= 1e-15)
    assert len(rec.eps) == 40 and len(rec.deps) == 39
    assert all(e >= -1e-12 for e in rec.eps)


def test_rep3_two_round_closed_form(rep3):
    for p in (0.01, 0.1, 0.3):
        q2 = polarization_sequence(rep3, p, 2).q[2]
        assert q2 == pytest.approx(1 - 4 * p ** 2 * (1 - p ** 2), abs=1e-12)


def test_error_rate_convention():
    eps, deps = error_rates([1.0, 1.0, 0.8, 0.64])
    assert eps == pytest.approx([0.0, 0.1, 0.1])
    assert deps == pytest.approx([0.1, 0.0])
    eps, _ = error_rates([1.0, 0.0, 0.0])
    assert eps[1] is None


def test_polarization_domain_errors(rep3):
    with pytest.raises(ValueError):
        polarization_sequence(rep3, -0.1, 3)
    two_logical = parse_code_file("n 4\nk 2\nstabilizer XXXX\nstabilizer ZZZZ\nlogical_z ZZII\nlogical_z ZIZI\n")
    with pytest.raises(DomainError):
        polarization_sequence(two_logical, 0.1, 3)


def test_decay_csv_round_trip(rep3):
    rec = polarization_sequence(rep3, 0.1, 20)
    text = rec.to_csv()
    assert text.splitlines()[:2] == ["# code=rep3 p=0.1", "m,q_m,eps_m,abs_delta_eps"]
    again = DecayRecord.from_csv(text)
    assert again.q == rec.q and again.eps == rec.eps and again.deps == rec.deps
    assert again.to_csv() == text


# --- circuit oracle ----------------------------------------------------------

@pytest.mark.parametrize("p", [0.01, 0.1, 0.3])
def test_circuit_oracle_agrees(rep3, p):
    q = polarization_sequence(rep3, p, 10).q
    for m in range(11):
        assert abs(circuit_oracle(p, m) - q[m]) < 1e-10


def test_circuit_oracle_edge_cases():
    assert circuit_oracle(0.0, 7) == pytest.approx(1, abs=1e-14)
    assert 1 - circuit_oracle(0.001, 1) == pytest.approx(0, abs=1e-14)
    assert 1 - circuit_oracle(0.001, 2) > 0
    with pytest.raises(CapacityError):
        circuit_oracle(0.1, 21)


# --- composability --------------------------------------------------------------

def test_perfect_recovery_composes(code):
    rec = recovery_map(code)
    assert not composability_check(code, rec, rec).violated


def test_noisy_recovery_violates(rep3):
    noisy = cached_noisy("rep3", 0.1)
    report = composability_check(rep3, noisy, noisy)
    assert report.violated
    assert report.distance > 1e-4
    assert report.distance == pytest.approx(report.lhs.distance(report.rhs))


def test_composability_dimension_check(rep3, rng):
    small = random_cptp(4, rng)
    with pytest.raises(DimensionError):
        composability_check(rep3, small, small)


def test_sufficiency_suite_rep3(rep3):
    trials = sufficiency_suite(rep3, trials=20, seed=1)
    assert max(t.with_recovery for t in trials) < 1e-9
    assert max(t.without_recovery for t in trials) > 1e-6
    again = sufficiency_suite(rep3, trials=20, seed=1)
    assert [t.without_recovery for t in again] == [t.without_recovery for t in trials]


# --- two-round violation ----------------------------------------------------------

def test_verify_theorem1_rep3(rep3):
    result = verify_theorem1(rep3, bitflip_confusion(rep3, 0.1))
    assert result.violated
    assert result.pauli_probabilities["X"] > 0
    assert result.witness_logical == "X"
    assert set(result.witness_pair) == {(0, 1), (1, 0)}
    assert result.formula_error < 1e-12
    d = result.to_dict()
    assert d["violated"] is True and d["one_round_is_identity"] is True


def test_verify_theorem1_five(five, rep3):
    p = 0.05
    res5 = verify_theorem1(five, bitflip_confusion(five, p))
    res3 = verify_theorem1(rep3, bitflip_confusion(rep3, p))
    assert res5.violated
    assert res5.formula_error < 1e-12
    assert 1 - res5.pauli_probabilities["I"] > 1 - res3.pauli_probabilities["I"]


def test_verify_theorem1_hypotheses(rep3):
    with pytest.raises(HypothesisError):
        verify_theorem1(rep3, ConfusionMatrix.identity(2))
    low = parse_code_file("n 2\nk 1\nd 1\nstabilizer ZZ\nlogical_z ZI\n")
    with pytest.raises(HypothesisError):
        verify_theorem1(low, bitflip_confusion(low, 0.1))
    with pytest.raises(DimensionError):
        verify_theorem1(rep3, ConfusionMatrix.identity(3))


def test_two_round_prediction_frozen(five):
    # combinatorial route, independent of the superoperator; frozen at p = 0.05
    probs = two_round_pauli_prediction(five, bitflip_confusion(five, 0.05))
    assert probs["X"] == pytest.approx(0.01227287484375, abs=1e-14)
    assert probs["Y"] == pytest.approx(0.00165377484375, abs=1e-14)
    assert probs["Z"] == pytest.approx(0.01227287484375, abs=1e-14)
    assert sum(probs.values()) == pytest.approx(1, abs=1e-14)


# --- leading order -------------------------------------------------------------

def test_single_flip_sequences_five(five):
    seqs = single_flip_sequences(five)
    assert len(seqs) == 12
    assert logical_flip_fraction(five) == 0.5


def test_single_flip_sequences_rep3(rep3):
    assert logical_flip_fraction(rep3) == 1.0


def test_leading_order_rep3(rep3):
    report = leading_order_report(rep3, [1e-2, 1e-3, 0.0])
    assert (report.first_round_factor, report.second_round_factor) == (2, 1)
    assert abs(report.rows[1].ratio - 1) < 0.1
    assert abs(report.rows[1].ratio - 1) < abs(report.rows[0].ratio - 1)
    zero = report.rows[2]
    assert zero.one_minus_q2 == pytest.approx(0, abs=1e-15) and zero.ratio is None
    lines = report.to_csv().splitlines()
    assert lines[1] == "p,one_minus_q2,predicted,ratio"
    assert lines[-1].endswith(",")


def test_leading_order_five(five):
    report = leading_order_report(five, [1e-3])
    assert (report.first_round_factor, report.second_round_factor) == (4, 3)
    assert report.flip_fraction == 0.5
    assert abs(report.rows[0].ratio - 1) < 0.1


# --- rate convergence -----------------------------------------------------------

def test_error_rate_converges_at_spectral_ratio(rep3):
    p = 0.1
    rec = polarization_sequence(rep3, p, 60)
    tm = transition_matrix(rep3, cached_noisy("rep3", p))
    initial, observable = polarization_vectors(rep3, tm)
    s = spectral_summary(tm, initial, observable)
    eps_inf = 1 - s.asymptotic_rate
    eps_inf /= 2
    idx = above_floor(rec.deps, 1e-12)
    gaps = [abs(rec.eps[m] - eps_inf) for m in idx]
    factor, r2 = log_linear_fit(gaps, idx[0])
    assert r2 > 0.999
    assert factor == pytest.approx(s.convergence_ratio, rel=0.05)
    assert rec.eps[-1] == pytest.approx(eps_inf, abs=1e-12)


def test_fit_helpers():
    factor, r2 = log_linear_fit([8.0, 4.0, 2.0, 1.0])
    assert factor == pytest.approx(0.5)
    assert r2 == pytest.approx(1)
    assert above_floor([None, 1e-3, 1e-15, None], 1e-13) == [1]
