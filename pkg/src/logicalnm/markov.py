"""Classical Markov-chain view of noisy recovery on computational basis states.

When a channel maps every computational basis state to a diagonal state,
its action on diagonal states is a column-stochastic matrix. For the
repetition code with bit-flip syndrome noise this chain is the whole story:
each basis state carries a logical bit (what the decoder returns) and a
syndrome, and the chain couples the two.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channels import (
    Channel,
    bitflip_confusion,
    decoding_operation,
    encoding_unitary,
    noisy_recovery_map,
    syndrome_projector,
    vec,
)
from .code import StabilizerCode, all_syndromes, syndrome_index, syndrome_str, xor_syndromes
from .errors import DimensionError, DomainError
from .pauli import dense

CLASSICAL_TOL = 1e-10


def classicality_check(chan: Channel, tol: float = CLASSICAL_TOL) -> bool:
    """True iff every computational basis state is mapped to a diagonal operator."""
    d_in, d_out = chan.in_dim, chan.out_dim
    # column c + d_in*c of the matrix is vec(chan(|c><c|))
    cols = chan.matrix[:, [c * (d_in + 1) for c in range(d_in)]]
    off = np.ones((d_out, d_out), dtype=bool)
    np.fill_diagonal(off, False)
    mask = vec(off).astype(bool)
    return bool(np.max(np.abs(cols[mask]), initial=0.0) < tol)


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Column-stochastic matrix; ``m[out, in]`` is the probability of ``in -> out``."""

    states: tuple[str, ...]
    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=float)
        if m.shape != (len(self.states), len(self.states)):
            raise DimensionError("transition matrix shape does not match its state labels")
        if np.any(m < -1e-12) or np.max(np.abs(m.sum(axis=0) - 1)) > 1e-12:
            raise DomainError("transition matrix is not column stochastic")
        m.flags.writeable = False
        object.__setattr__(self, "m", m)

    def index(self, label: str) -> int:
        return self.states.index(label)

    def indicator(self, label: str) -> np.ndarray:
        v = np.zeros(len(self.states))
        v[self.index(label)] = 1.0
        return v

    def power(self, m: int) -> np.ndarray:
        return np.linalg.matrix_power(self.m, m)

    def to_dict(self) -> dict:
        return {"states": list(self.states), "matrix": self.m.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> TransitionMatrix:
        return cls(tuple(data["states"]), np.array(data["matrix"], dtype=float))


def basis_label(index: int, n: int) -> str:
    return format(index, f"0{n}b")


def default_state_order(code: StabilizerCode) -> list[str]:
    """Basis states grouped by syndrome, logical 0 before logical 1 within a group.

    Uses the images of ``|s> kron |l>`` under the encoding unitary when they
    are computational basis states; otherwise falls back to binary order.
    """
    u = encoding_unitary(code)
    dk = 1 << code.k
    order = []
    for s in code.syndromes:
        for l in range(dk):
            col = u[:, syndrome_index(s) * dk + l]
            nz = np.flatnonzero(np.abs(col) > 1e-12)
            if len(nz) != 1:
                return [basis_label(i, code.n) for i in range(1 << code.n)]
            order.append(basis_label(int(nz[0]), code.n))
    return order


def transition_matrix(
    code: StabilizerCode,
    chan: Channel,
    order: Sequence[str] | None = None,
) -> TransitionMatrix:
    """``m[(out),(in)] = <out| chan(|in><in|) |out>`` for a classical channel."""
    if not classicality_check(chan):
        raise DomainError("channel creates coherences on computational basis states; no classical chain exists")
    dim = 1 << code.n
    if chan.in_dim != dim or chan.out_dim != dim:
        raise DimensionError(f"channel acts on dim {chan.in_dim}, code needs {dim}")
    states = list(order) if order is not None else default_state_order(code)
    if sorted(states) != [basis_label(i, code.n) for i in range(dim)]:
        raise ValueError("state order must list every computational basis label exactly once")
    idx = [int(s, 2) for s in states]
    diag_rows = [c * (dim + 1) for c in range(dim)]
    full = chan.matrix[np.ix_(diag_rows, diag_rows)].real
    return TransitionMatrix(tuple(states), full[np.ix_(idx, idx)])


# --- conditional recovery maps -------------------------------------------------

def conditional_recovery(code: StabilizerCode, error_pattern: Sequence[int]) -> Channel:
    """Recovery when the readout is flipped exactly on the bits set in ``error_pattern``."""
    e = tuple(int(b) for b in error_pattern)
    if len(e) != code.r:
        raise DimensionError(f"error pattern length {len(e)} != {code.r}")
    kraus = []
    for s in code.syndromes:
        read = xor_syndromes(s, e)
        kraus.append(dense(code.corrections[read]) @ syndrome_projector(code, s))
    return Channel.from_kraus(kraus)


def pattern_weight(pattern: Sequence[int], p: float) -> float:
    flips = sum(int(b) for b in pattern)
    return (1 - p) ** (len(pattern) - flips) * p ** flips


def recombine_conditional(code: StabilizerCode, p: float) -> Channel:
    """Mixture of conditional recoveries weighted by their bit-flip probabilities."""
    total = None
    for e in code.syndromes:
        term = pattern_weight(e, p) * conditional_recovery(code, e).matrix
        total = term if total is None else total + term
    dim = 1 << code.n
    return Channel(total, dim, dim)


# --- spectral analysis ------------------------------------------------------

@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: tuple[complex, ...]
    second_largest_modulus: float
    asymptotic_rate: float
    convergence_ratio: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "real", "imag", "modulus"])
        for i, ev in enumerate(self.eigenvalues):
            w.writerow([i, repr(float(ev.real)), repr(float(ev.imag)), repr(float(abs(ev)))])
        return buf.getvalue()


def spectral_summary(
    tm: TransitionMatrix,
    initial: np.ndarray | None = None,
    observable: np.ndarray | None = None,
    tol: float = 1e-12,
) -> SpectralSummary:
    """Eigenvalues sorted by modulus, plus the rates that govern polarization decay.

    ``asymptotic_rate`` is the largest eigenvalue modulus that contributes to
    ``observable . M^m initial`` (by default, the second largest modulus of
    the whole chain). ``convergence_ratio`` is the ratio of the next
    contributing modulus to that one: per-round error rates approach their
    limit geometrically with this ratio.
    """
    evals, right = np.linalg.eig(tm.m)
    order = np.argsort(-np.abs(evals), kind="stable")
    evals, right = evals[order], right[:, order]
    moduli = np.abs(evals)
    second = float(moduli[1]) if len(moduli) > 1 else 0.0

    if initial is None or observable is None:
        contributing = moduli
        rate = second
        rest = moduli[2:] if len(moduli) > 2 else np.array([0.0])
    else:
        coeffs = np.linalg.solve(right, np.asarray(initial, dtype=complex))
        weights = np.abs(np.asarray(observable) @ right * coeffs)
        contributing = moduli[weights > tol * max(1.0, weights.max())]
        rate = float(contributing[0]) if len(contributing) else 0.0
        rest = contributing[contributing < rate - 1e-12]
    nxt = float(rest[0]) if len(rest) else 0.0
    ratio = nxt / rate if rate > 0 else 0.0
    return SpectralSummary(tuple(complex(v) for v in evals), second, rate, ratio)


def polarization_vectors(code: StabilizerCode, tm: TransitionMatrix) -> tuple[np.ndarray, np.ndarray]:
    """(synthetic initial distribution, decoded-Z observable) in the chain's state order."""
    if code.k != 1:
        raise DomainError("polarization is defined for single logical qubits")
    dec = decoding_operation(code)
    zdag = dec.dual().apply(np.diag([1.0, -1.0]).astype(complex))
    observable = np.array([zdag[int(s, 2), int(s, 2)].real for s in tm.states])
    order = default_state_order(code)
    zero_state, one_state = order[0], order[1]
    initial = (tm.indicator(zero_state) - tm.indicator(one_state)) / 2
    if np.max(np.abs(np.diag(np.diag(zdag)) - zdag)) > 1e-12:
        raise DomainError("decoded Z observable is not diagonal in the computational basis")
    return initial, observable


def markov_polarization(code: StabilizerCode, p: float, m_max: int) -> np.ndarray:
    """q_0..q_m_max from powers of the transition matrix of the noisy recovery."""
    tm = transition_matrix(code, noisy_recovery_map(code, bitflip_confusion(code, p)))
    initial, observable = polarization_vectors(code, tm)
    out = np.empty(m_max + 1)
    v = initial.copy()
    for m in range(m_max + 1):
        out[m] = observable @ v
        v = tm.m @ v
    return out


# --- cube graph ---------------------------------------------------------------

@dataclass
class GraphNode:
    label: str
    logical: str | None
    syndrome: str | None


@dataclass
class GraphEdge:
    source: str
    target: str
    pattern: str
    probability: float  # conditional on the pattern
    weight: float  # probability of the pattern itself


@dataclass
class LabeledGraph:
    nodes: list[GraphNode] = field(default_factory=list)
    edges: list[GraphEdge] = field(default_factory=list)

    def node(self, label: str) -> GraphNode:
        return next(n for n in self.nodes if n.label == label)

    def out_edges(self, label: str, pattern: str | None = None) -> list[GraphEdge]:
        return [e for e in self.edges if e.source == label and (pattern is None or e.pattern == pattern)]

    def to_dict(self) -> dict:
        return {
            "nodes": [vars(n) for n in self.nodes],
            "edges": [vars(e) for e in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_dot(self, name: str = "recovery") -> str:
        lines = [f"digraph {_dot_id(name)} {{", "  node [shape=circle];"]
        for n in self.nodes:
            text = f"{n.label}\\nL={n.logical} s={n.syndrome}"
            lines.append(f"  {_dot_id(n.label)} [label=\"{text}\"];")
        for e in self.edges:
            lbl = f"e={e.pattern} w={e.weight:.6g}"
            if e.probability != 1.0:
                lbl += f" p={e.probability:.6g}"
            lines.append(f"  {_dot_id(e.source)} -> {_dot_id(e.target)} [label=\"{lbl}\"];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_id(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def basis_annotations(code: StabilizerCode) -> dict[str, tuple[str | None, str | None]]:
    """(logical bits after decoding, syndrome) for each basis state, None where not sharp."""
    dim = 1 << code.n
    dec = decoding_operation(code)
    projs = {syndrome_str(s): np.real(np.diag(syndrome_projector(code, s))) for s in code.syndromes}
    out = {}
    for i in range(dim):
        unit = np.zeros((dim, dim), dtype=complex)
        unit[i, i] = 1.0
        logical_probs = np.real(np.diag(dec.apply(unit)))
        hits = np.flatnonzero(logical_probs > 1 - 1e-10)
        logical = format(int(hits[0]), f"0{code.k}b") if len(hits) == 1 else None
        syn = next((s for s, d in projs.items() if d[i] > 1 - 1e-10), None)
        out[basis_label(i, code.n)] = (logical, syn)
    return out


def cube_graph(code: StabilizerCode, p: float) -> LabeledGraph:
    """One noisy recovery round drawn as basis-state transitions, one edge set per readout error pattern."""
    chan = noisy_recovery_map(code, bitflip_confusion(code, p))
    if not classicality_check(chan):
        raise DomainError("noisy recovery is not classical on computational basis states for this code")
    notes = basis_annotations(code)
    order = default_state_order(code)
    graph = LabeledGraph(nodes=[GraphNode(lbl, *notes[lbl]) for lbl in order])
    for e in all_syndromes(code.r):
        tm = transition_matrix(code, conditional_recovery(code, e), order)
        w = pattern_weight(e, p)
        for j, src in enumerate(order):
            for i, dst in enumerate(order):
                if tm.m[i, j] > 1e-12:
                    graph.edges.append(GraphEdge(src, dst, syndrome_str(e), float(tm.m[i, j]), w))
    return graph


def logical_partition_crossings(graph: LabeledGraph) -> list[GraphEdge]:
    lookup = {n.label: n.logical for n in graph.nodes}
    return [e for e in graph.edges if lookup[e.source] != lookup[e.target]]
