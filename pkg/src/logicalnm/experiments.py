"""Repeated noisy syndrome-extraction experiments and composability checks."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channels import (
    Channel,
    ConfusionMatrix,
    bitflip_confusion,
    check_channel,
    decoding_operation,
    encoding_isometry,
    gadget_retraction,
    is_pauli_channel,
    noisy_recovery_map,
    pauli_error_probabilities,
    random_cptp,
    recovery_map,
)
from .code import (
    StabilizerCode,
    Syndrome,
    decompose,
    find_uncorrectable_pair,
    logical_pauli_of,
    syndrome_str,
    xor_syndromes,
)
from .errors import CapacityError, DimensionError, DomainError, HypothesisError
from .pauli import commutes, pauli_mul

COMPOSABILITY_TOL = 1e-10

_Z = np.diag([1.0, -1.0]).astype(complex)


# --- polarization decay --------------------------------------------------------

@dataclass
class DecayRecord:
    """Polarization q_m for m = 0..rounds with per-round error rates.

    ``eps[m] = (1 - q[m+1] / q[m]) / 2`` and ``deps[m] = |eps[m+1] - eps[m]|``;
    entries are None where a zero polarization makes the ratio undefined.
    """

    p: float
    rounds: int
    q: list[float]
    eps: list[float | None]
    deps: list[float | None]
    code_name: str = "code"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        buf.write(f"# code={self.code_name} p={self.p!r}\n")
        w.writerow(["m", "q_m", "eps_m", "abs_delta_eps"])
        for m in range(self.rounds + 1):
            eps = self.eps[m] if m < len(self.eps) else None
            deps = self.deps[m] if m < len(self.deps) else None
            w.writerow([m, _num(self.q[m]), _num(eps), _num(deps)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> DecayRecord:
        lines = text.splitlines()
        header = dict(item.split("=", 1) for item in lines[0].lstrip("# ").split())
        rows = list(csv.DictReader(lines[1:]))
        q = [float(r["q_m"]) for r in rows]
        eps = [_parse_num(r["eps_m"]) for r in rows][: len(rows) - 1]
        deps = [_parse_num(r["abs_delta_eps"]) for r in rows][: max(len(rows) - 2, 0)]
        return cls(float(header["p"]), len(rows) - 1, q, eps, deps, header["code"])


def _num(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def _parse_num(s: str) -> float | None:
    return float(s) if s else None


def error_rates(q: Sequence[float]) -> tuple[list[float | None], list[float | None]]:
    eps: list[float | None] = []
    for a, b in zip(q[:-1], q[1:]):
        eps.append(None if a == 0 else (1 - b / a) / 2)
    deps = [None if a is None or b is None else abs(b - a) for a, b in zip(eps[:-1], eps[1:])]
    return eps, deps


def polarization_sequence(code: StabilizerCode, p: float, m_max: int) -> DecayRecord:
    """Decoded logical-Z polarization after m = 0..m_max noisy recovery rounds.

    The two physical initializations ``|0_L>`` and ``|1_L>`` combine as
    ``(<Z>_0 - <Z>_1) / 2``. By linearity this equals propagating the
    synthetic operator ``E(Z/2) = (rho_0 - rho_1) / 2``, which is what is
    iterated here: subtracting two separately propagated states loses
    relative precision once q_m has decayed, the difference does not.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if code.k != 1:
        raise DomainError("polarization experiments need a single logical qubit (k = 1)")
    noisy = noisy_recovery_map(code, bitflip_confusion(code, p))
    e = encoding_isometry(code)
    observable = decoding_operation(code).dual().apply(_Z)
    rho0 = np.outer(e[:, 0], e[:, 0].conj())
    rho1 = np.outer(e[:, 1], e[:, 1].conj())
    w = ((rho0 - rho1) / 2).reshape(-1, order="F")
    obs = observable.reshape(-1, order="F").conj()
    q = []
    for _ in range(m_max + 1):
        q.append(float((obs @ w).real))
        w = noisy.matrix @ w
    eps, deps = error_rates(q)
    return DecayRecord(p, m_max, q, eps, deps, code.name)


def logical_idle_channel(code: StabilizerCode, p: float, m: int) -> Channel:
    """Effective logical process of m noisy recovery rounds."""
    return gadget_retraction(code, noisy_recovery_map(code, bitflip_confusion(code, p)).power(m))


# --- ancilla-level circuit oracle for the repetition code ----------------------

_CIRCUIT_CNOTS = ((2, 0), (3, 0), (3, 1), (4, 1))  # (control, target); ancillas are wires 0, 1


def _cnot(dim_qubits: int, control: int, target: int) -> np.ndarray:
    dim = 1 << dim_qubits
    perm = np.zeros((dim, dim))
    for i in range(dim):
        bits = [(i >> (dim_qubits - 1 - q)) & 1 for q in range(dim_qubits)]
        if bits[control]:
            bits[target] ^= 1
        j = int("".join(map(str, bits)), 2)
        perm[j, i] = 1
    return perm


def _on_qubit(op: np.ndarray, qubit: int, nq: int) -> np.ndarray:
    out = np.ones((1, 1))
    for q in range(nq):
        out = np.kron(out, op if q == qubit else np.eye(2))
    return out


def circuit_oracle(p: float, m: int) -> float:
    """Polarization of the repetition code from an explicit 5-qubit circuit simulation.

    Wires are (ancilla 1, ancilla 2, data 1, data 2, data 3). Each round
    resets the ancillas, applies the four parity CNOTs, flips each ancilla
    with probability p, measures both ancillas and applies the correction
    for the observed outcome. After m rounds one noiseless round runs and
    the data qubits are measured against ZZZ.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if m > 20:
        raise CapacityError("circuit oracle is limited to m <= 20 rounds")
    nq = 5
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    cnots = np.eye(1 << nq)
    for c, t in _CIRCUIT_CNOTS:
        cnots = _cnot(nq, c, t) @ cnots
    corrections = {(0, 0): None, (1, 0): 2, (0, 1): 4, (1, 1): 3}  # outcome -> data wire to flip
    flip = {q: _on_qubit(x, q, nq) for q in range(nq)}
    proj = {}
    for a0 in (0, 1):
        for a1 in (0, 1):
            d = np.zeros(1 << nq)
            for i in range(1 << nq):
                if (i >> 4) & 1 == a0 and (i >> 3) & 1 == a1:
                    d[i] = 1
            proj[a0, a1] = np.diag(d)

    def run_round(rho_data: np.ndarray, flip_prob: float) -> np.ndarray:
        anc = np.zeros((4, 4), dtype=complex)
        anc[0, 0] = 1.0
        rho = np.kron(anc, rho_data)
        rho = cnots @ rho @ cnots.T
        for a in (0, 1):
            rho = (1 - flip_prob) * rho + flip_prob * flip[a] @ rho @ flip[a]
        out = np.zeros_like(rho)
        for outcome, pr in proj.items():
            branch = pr @ rho @ pr
            target = corrections[outcome]
            if target is not None:
                branch = flip[target] @ branch @ flip[target]
            out += branch
        # discard the ancillas
        return np.einsum("ajak->jk", out.reshape(4, 8, 4, 8))

    zzz = np.diag([(-1) ** bin(i).count("1") for i in range(8)]).astype(complex)
    expectations = []
    for start in (0, 7):
        rho = np.zeros((8, 8), dtype=complex)
        rho[start, start] = 1.0
        for _ in range(m):
            rho = run_round(rho, p)
        rho = run_round(rho, 0.0)
        expectations.append(float(np.trace(zzz @ rho).real))
    return (expectations[0] - expectations[1]) / 2


# --- composability ------------------------------------------------------------

@dataclass
class ComposabilityReport:
    lhs: Channel  # retraction of g_b o g_a
    rhs: Channel  # retraction of g_b composed with retraction of g_a
    distance: float
    threshold: float = COMPOSABILITY_TOL

    @property
    def violated(self) -> bool:
        return self.distance > self.threshold


def composability_check(
    code: StabilizerCode,
    g_a: Channel,
    g_b: Channel,
    threshold: float = COMPOSABILITY_TOL,
) -> ComposabilityReport:
    """Compare the logical process of "a then b" with the composition of their logical processes."""
    dim = 1 << code.n
    for g in (g_a, g_b):
        if (g.in_dim, g.out_dim) != (dim, dim):
            raise DimensionError(f"gate acts on dim {g.in_dim}->{g.out_dim}, code needs {dim}")
    lhs = gadget_retraction(code, g_b @ g_a)
    rhs = gadget_retraction(code, g_b) @ gadget_retraction(code, g_a)
    return ComposabilityReport(lhs, rhs, lhs.distance(rhs), threshold)


@dataclass
class SufficiencyTrial:
    with_recovery: float
    without_recovery: float


def sufficiency_suite(code: StabilizerCode, trials: int = 20, seed: int = 0, n_kraus: int = 2) -> list[SufficiencyTrial]:
    """Composability distances for random CPTP pairs, with and without a trailing perfect recovery."""
    rng = np.random.default_rng(seed)
    dim = 1 << code.n
    rec = recovery_map(code)
    out = []
    for _ in range(trials):
        a, b = random_cptp(dim, rng, n_kraus), random_cptp(dim, rng, n_kraus)
        with_r = composability_check(code, rec @ a, rec @ b).distance
        without = composability_check(code, a, b).distance
        out.append(SufficiencyTrial(with_r, without))
    return out


# --- two-round violation of composability ------------------------------------------

@dataclass
class TwoRoundResult:
    violated: bool
    distance: float
    one_round: Channel
    logical_channel: Channel
    pauli_probabilities: dict[str, float]
    predicted_probabilities: dict[str, float]
    witness_pair: tuple[Syndrome, Syndrome]
    witness_logical: str
    code_name: str = "code"

    @property
    def formula_error(self) -> float:
        keys = set(self.pauli_probabilities) | set(self.predicted_probabilities)
        return max(abs(self.pauli_probabilities.get(k, 0.0) - self.predicted_probabilities.get(k, 0.0)) for k in keys)

    def to_dict(self) -> dict:
        return {
            "code": self.code_name,
            "violated": self.violated,
            "distance": self.distance,
            "one_round_is_identity": self.one_round.allclose(Channel.identity(self.one_round.in_dim)),
            "witness": {
                "s1": syndrome_str(self.witness_pair[0]),
                "s2": syndrome_str(self.witness_pair[1]),
                "logical": self.witness_logical,
            },
            "two_round_pauli_channel": self.pauli_probabilities,
            "predicted_pauli_channel": self.predicted_probabilities,
            "formula_error": self.formula_error,
        }


def two_round_pauli_prediction(code: StabilizerCode, chi: ConfusionMatrix) -> dict[str, float]:
    """Two-round logical Pauli channel from the correction-pair combinatorics.

    Starting in the codespace, round one reads ``s1`` with probability
    ``Pr(s1 | 0)`` and leaves ``R(s1)`` on the data; round two reads ``s2``
    with probability ``Pr(s2 | s1)``. The logical component of
    ``R(s2) R(s1)`` is what the final decoder sees.
    """
    zero = code.zero_syndrome
    probs: dict[str, float] = {}
    for s1 in code.syndromes:
        w1 = chi.prob(s1, zero)
        if w1 == 0:
            continue
        for s2 in code.syndromes:
            w2 = chi.prob(s2, s1)
            if w2 == 0:
                continue
            prod = pauli_mul(code.corrections[s2], code.corrections[s1])
            label = logical_pauli_of(code, decompose(code, prod)[0]).letters
            probs[label] = probs.get(label, 0.0) + w1 * w2
    return probs


def verify_theorem1(code: StabilizerCode, chi: ConfusionMatrix, tol: float = COMPOSABILITY_TOL) -> TwoRoundResult:
    """Check that two noisy rounds are not the square of one noisy round at the logical level."""
    if chi.size != 1 << code.r:
        raise DimensionError(f"confusion matrix size {chi.size} != {1 << code.r}")
    if not chi.strictly_positive:
        raise HypothesisError("confusion matrix has zero entries; strict positivity is required")
    if code.declared_distance is None or code.declared_distance < 3:
        raise HypothesisError(f"declared distance must be at least 3, got {code.declared_distance}")
    noisy = noisy_recovery_map(code, chi)
    one = gadget_retraction(code, noisy)
    two = gadget_retraction(code, noisy @ noisy)
    check_channel(one, "one-round logical process")
    check_channel(two, "two-round logical process")
    if not one.allclose(Channel.identity(one.in_dim)):
        raise DomainError("one noisy round is not the logical identity")
    if not is_pauli_channel(two):
        raise DomainError("two-round logical process is not a Pauli channel")
    s1, s2, label = find_uncorrectable_pair(code)
    distance = two.distance(one @ one)
    return TwoRoundResult(
        violated=distance > tol,
        distance=distance,
        one_round=one,
        logical_channel=two,
        pauli_probabilities=pauli_error_probabilities(two),
        predicted_probabilities=two_round_pauli_prediction(code, chi),
        witness_pair=(s1, s2),
        witness_logical=label.letters,
        code_name=code.name,
    )


# --- leading-order analysis -----------------------------------------------------

def single_flip_sequences(code: StabilizerCode) -> list[tuple[int, int, bool]]:
    """``(i, j, flips)`` for readout flips on ancilla i in round one and a different ancilla j in round two.

    Round one leaves ``R(e_i)`` on the data; round two reads ``e_i + e_j``
    and applies that correction. ``flips`` says whether the combined error
    anticommutes with a logical Z.
    """
    r = code.r
    out = []
    for i in range(r):
        e_i = tuple(int(t == i) for t in range(r))
        for j in range(r):
            if j == i:
                continue
            read = xor_syndromes(e_i, tuple(int(t == j) for t in range(r)))
            prod = pauli_mul(code.corrections[read], code.corrections[e_i])
            logical, _ = decompose(code, prod)
            out.append((i, j, any(not commutes(logical, z) for z in code.logical_z)))
    return out


def logical_flip_fraction(code: StabilizerCode) -> float:
    seqs = single_flip_sequences(code)
    return sum(f for *_, f in seqs) / len(seqs)


@dataclass
class LeadingOrderRow:
    p: float
    one_minus_q2: float
    predicted: float
    ratio: float | None


@dataclass
class LeadingOrderReport:
    code_name: str
    first_round_factor: int  # ancillas that can flip in round one
    second_round_factor: int  # different ancillas that can flip in round two
    flip_fraction: float
    rows: list[LeadingOrderRow] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        buf.write(
            f"# code={self.code_name} first_round={self.first_round_factor} "
            f"second_round={self.second_round_factor} flip_fraction={self.flip_fraction!r}\n"
        )
        w.writerow(["p", "one_minus_q2", "predicted", "ratio"])
        for row in self.rows:
            w.writerow([repr(row.p), repr(row.one_minus_q2), repr(row.predicted), _num(row.ratio)])
        return buf.getvalue()


def leading_order_report(code: StabilizerCode, p_list: Sequence[float]) -> LeadingOrderReport:
    """Compare exact ``1 - q_2`` with the small-p count ``2 * (r p) * ((r-1) p) * fraction``.

    ``r`` is the number of ancillas; the factor 2 converts a logical flip
    probability into a polarization loss.
    """
    r = code.r
    frac = logical_flip_fraction(code)
    report = LeadingOrderReport(code.name, r, r - 1, frac)
    for p in p_list:
        loss = 1 - polarization_sequence(code, p, 2).q[2]
        predicted = 2 * (r * p) * ((r - 1) * p) * frac
        ratio = loss / predicted if predicted > 0 else None
        report.rows.append(LeadingOrderRow(p, loss, predicted, ratio))
    return report


# --- fitting helpers ---------------------------------------------------------

def log_linear_fit(values: Sequence[float], start: int = 0) -> tuple[float, float]:
    """Least-squares fit of ``log(values)`` against index; returns (per-step factor, R^2)."""
    y = np.log(np.asarray(values, dtype=float))
    x = np.arange(start, start + len(y))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return math.exp(slope), r2


def above_floor(deps: Sequence[float | None], floor: float = 1e-13) -> list[int]:
    """Indices m >= 1 at which |delta eps_m| is still resolvable above round-off."""
    return [m for m, d in enumerate(deps) if m >= 1 and d is not None and d > floor]

