"""Dense superoperators for encoding, recovery and gadget retraction.

Channels act on column-stacked operators: ``vec(A B C) = (C^T kron A) vec(B)``,
so a channel with Kraus operators ``K_i`` has matrix ``sum_i conj(K_i) kron K_i``
and composition is an ordinary matrix product.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .code import StabilizerCode, Syndrome, syndrome_index, syndrome_str
from .errors import CapacityError, DimensionError, DomainError
from .pauli import MAX_DENSE_QUBITS, all_paulis, commutes, dense, parse_pauli

EQUAL_TOL = 1e-10


def vec(op: np.ndarray) -> np.ndarray:
    return np.asarray(op).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return v.reshape(dim, -1, order="F")


def _check_capacity(code: StabilizerCode) -> None:
    if code.n > MAX_DENSE_QUBITS:
        raise CapacityError(f"dense simulation limited to {MAX_DENSE_QUBITS} data qubits, code has {code.n}")


@dataclass(frozen=True, eq=False)
class Channel:
    """Linear map B(C^in_dim) -> B(C^out_dim) stored as an out_dim^2 x in_dim^2 matrix."""

    matrix: np.ndarray
    in_dim: int
    out_dim: int

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.out_dim ** 2, self.in_dim ** 2):
            raise DimensionError(f"channel matrix shape {m.shape} does not match dims {self.in_dim}->{self.out_dim}")
        if not np.all(np.isfinite(m)):
            raise ValueError("channel matrix has non-finite entries")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_kraus(cls, kraus: Iterable[np.ndarray]) -> Channel:
        ks = np.array([np.asarray(k, dtype=complex) for k in kraus])
        n_ops, out_dim, in_dim = ks.shape
        # sum_k conj(K)[i,j] K[l,m] as one matmul, then reorder to kron layout [(i,l),(j,m)]
        flat = ks.reshape(n_ops, out_dim * in_dim)
        m = (flat.conj().T @ flat).reshape(out_dim, in_dim, out_dim, in_dim)
        m = m.transpose(0, 2, 1, 3).reshape(out_dim ** 2, in_dim ** 2)
        return cls(m, in_dim, out_dim)

    @classmethod
    def from_function(cls, f: Callable[[np.ndarray], np.ndarray], in_dim: int, out_dim: int) -> Channel:
        """Tabulate a linear map by applying it to every matrix unit ``|c><d|``."""
        m = np.zeros((out_dim ** 2, in_dim ** 2), dtype=complex)
        for d in range(in_dim):
            for c in range(in_dim):
                unit = np.zeros((in_dim, in_dim), dtype=complex)
                unit[c, d] = 1.0
                m[:, c + in_dim * d] = vec(f(unit))
        return cls(m, in_dim, out_dim)

    @classmethod
    def identity(cls, dim: int) -> Channel:
        return cls(np.eye(dim ** 2, dtype=complex), dim, dim)

    @classmethod
    def unitary(cls, u: np.ndarray) -> Channel:
        return cls.from_kraus([u])

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho)
        if rho.shape != (self.in_dim, self.in_dim):
            raise DimensionError(f"operator shape {rho.shape} does not match input dim {self.in_dim}")
        return unvec(self.matrix @ vec(rho), self.out_dim)

    __call__ = apply

    def compose(self, other: Channel) -> Channel:
        """``self o other``: apply ``other`` first."""
        if other.out_dim != self.in_dim:
            raise DimensionError(f"cannot compose {self.in_dim}-dim input with {other.out_dim}-dim output")
        return Channel(self.matrix @ other.matrix, other.in_dim, self.out_dim)

    def __matmul__(self, other: Channel) -> Channel:
        return self.compose(other)

    def power(self, m: int) -> Channel:
        if self.in_dim != self.out_dim:
            raise DimensionError("only endomorphisms can be iterated")
        return Channel(np.linalg.matrix_power(self.matrix, m), self.in_dim, self.out_dim)

    def dual(self) -> Channel:
        """Hilbert-Schmidt adjoint (Heisenberg picture)."""
        return Channel(self.matrix.conj().T, self.out_dim, self.in_dim)

    def choi(self) -> np.ndarray:
        """``sum_{cd} |c><d| kron Lambda(|c><d|)``; positive semidefinite iff CP."""
        t = self.matrix.reshape(self.out_dim, self.out_dim, self.in_dim, self.in_dim)
        d = self.in_dim * self.out_dim
        return t.transpose(3, 1, 2, 0).reshape(d, d)

    def trace_preservation_error(self) -> float:
        return float(np.max(np.abs(self.dual().apply(np.eye(self.out_dim)) - np.eye(self.in_dim))))

    def min_choi_eigenvalue(self) -> float:
        choi = self.choi()
        return float(np.linalg.eigvalsh((choi + choi.conj().T) / 2)[0])

    def is_trace_preserving(self, tol: float = 1e-10) -> bool:
        return self.trace_preservation_error() < tol

    def is_completely_positive(self, tol: float = 1e-10) -> bool:
        choi = self.choi()
        if np.max(np.abs(choi - choi.conj().T)) > tol:
            return False
        return self.min_choi_eigenvalue() >= -tol

    def is_cptp(self, tol: float = 1e-10) -> bool:
        return self.is_trace_preserving(tol) and self.is_completely_positive(tol)

    def distance(self, other: Channel) -> float:
        """Maximum absolute entrywise difference of the channel matrices."""
        if (self.in_dim, self.out_dim) != (other.in_dim, other.out_dim):
            raise DimensionError("channels have different dimensions")
        return float(np.max(np.abs(self.matrix - other.matrix)))

    def allclose(self, other: Channel, tol: float = EQUAL_TOL) -> bool:
        return self.distance(other) < tol

    def ptm(self) -> np.ndarray:
        """Pauli transfer matrix ``T[i, j] = Tr(P_i Lambda(P_j)) / d`` (square qubit channels)."""
        if self.in_dim != self.out_dim:
            raise DimensionError("Pauli transfer matrix needs equal input and output dims")
        k = _qubits(self.in_dim)
        basis = [dense(p) for p in all_paulis(k)]
        outs = [self.apply(b) for b in basis]
        t = np.array([[np.trace(pi @ o) for o in outs] for pi in basis]) / self.in_dim
        return t.real if np.max(np.abs(t.imag)) < 1e-12 else t

    def to_json(self) -> str:
        return json.dumps(channel_to_dict(self))


def _qubits(dim: int) -> int:
    k = dim.bit_length() - 1
    if 1 << k != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return k


def channel_to_dict(chan: Channel) -> dict:
    return {
        "in_dim": chan.in_dim,
        "out_dim": chan.out_dim,
        "representation": "column-stacked",
        "entries": [[float(z.real), float(z.imag)] for z in chan.matrix.reshape(-1)],
    }


def channel_from_dict(data: dict) -> Channel:
    if data.get("representation") != "column-stacked":
        raise ValueError("only column-stacked channels are supported")
    flat = np.array([complex(re, im) for re, im in data["entries"]])
    in_dim, out_dim = int(data["in_dim"]), int(data["out_dim"])
    return Channel(flat.reshape(out_dim ** 2, in_dim ** 2), in_dim, out_dim)


def operator_to_dict(op: np.ndarray) -> dict:
    op = np.asarray(op)
    return {
        "dim": op.shape[0],
        "entries": [[float(z.real), float(z.imag)] for z in op.reshape(-1)],
    }


def operator_from_dict(data: dict) -> np.ndarray:
    dim = int(data["dim"])
    return np.array([complex(re, im) for re, im in data["entries"]]).reshape(dim, -1)


# --- Pauli channels ----------------------------------------------------------

def is_pauli_channel(chan: Channel, tol: float = 1e-10) -> bool:
    t = chan.ptm()
    return float(np.max(np.abs(t - np.diag(np.diag(t))))) < tol


def pauli_error_probabilities(chan: Channel) -> dict[str, float]:
    """Pauli error rates of a (diagonal-PTM) channel, keyed by letter string."""
    k = _qubits(chan.in_dim)
    paulis = list(all_paulis(k))
    lam = np.real(np.diag(chan.ptm()))
    probs = {}
    for q in paulis:
        signs = np.array([1.0 if commutes(p, q) else -1.0 for p in paulis])
        probs[q.letters] = float(signs @ lam) / len(paulis)
    return probs


def pauli_channel(probs: dict[str, float]) -> Channel:
    kraus = [np.sqrt(w) * dense(parse_pauli(s)) for s, w in probs.items() if w > 0]
    return Channel.from_kraus(kraus)


# --- confusion matrices ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Column-stochastic syndrome readout model: ``m[s', s] = Pr(read s' | true s)``."""

    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError("confusion matrix must be square")
        if np.any(m < 0):
            raise ValueError("confusion matrix has negative entries")
        if np.max(np.abs(m.sum(axis=0) - 1)) > 1e-12:
            raise ValueError("confusion matrix columns must sum to 1")
        m.flags.writeable = False
        object.__setattr__(self, "m", m)

    @property
    def size(self) -> int:
        return self.m.shape[0]

    @property
    def strictly_positive(self) -> bool:
        return bool(np.all(self.m > 0))

    def prob(self, measured: Syndrome, true: Syndrome) -> float:
        return float(self.m[syndrome_index(measured), syndrome_index(true)])

    @classmethod
    def identity(cls, r: int) -> ConfusionMatrix:
        return cls(np.eye(1 << r))


def bitflip_confusion(code: StabilizerCode, p: float) -> ConfusionMatrix:
    """Independent flip of each syndrome bit with probability p."""
    if not 0 <= p <= 1:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    r = code.r
    size = 1 << r
    idx = np.arange(size)
    hamming = np.array([[(a ^ b).bit_count() for b in idx] for a in idx])
    return ConfusionMatrix((1 - p) ** (r - hamming) * p ** hamming)


# --- code-derived operators and channels ----------------------------------------

def syndrome_projector(code: StabilizerCode, s: Sequence[int]) -> np.ndarray:
    _check_capacity(code)
    if len(s) != code.r:
        raise DimensionError(f"syndrome length {len(s)} != {code.r}")
    dim = 1 << code.n
    proj = np.eye(dim, dtype=complex)
    for bit, g in zip(s, code.generators):
        proj = proj @ ((np.eye(dim) + (-1) ** int(bit) * dense(g)) / 2)
    return proj


def codespace_projector(code: StabilizerCode) -> np.ndarray:
    return syndrome_projector(code, code.zero_syndrome)


def encoding_isometry(code: StabilizerCode) -> np.ndarray:
    """``2^n x 2^k`` isometry; column j has logical-Z eigenvalues ``(-1)^{j_i}``.

    The logical zero is the normalized codespace projection of the
    computational basis state it overlaps most, phased so that overlap is
    real and positive; the other columns are obtained with the logical X
    operators.
    """
    _check_capacity(code)
    dim = 1 << code.n
    proj = codespace_projector(code)
    for z in code.logical_z:
        proj = proj @ ((np.eye(dim) + dense(z)) / 2)
    col = int(np.argmax(np.abs(np.diag(proj)) - 1e-9 * np.arange(dim)))
    zero = proj[:, col] / np.sqrt(proj[col, col].real)
    e = np.zeros((dim, 1 << code.k), dtype=complex)
    for j in range(1 << code.k):
        state = zero
        for i, xl in enumerate(code.logical_x):
            if (j >> (code.k - 1 - i)) & 1:
                state = dense(xl) @ state
        e[:, j] = state
    return e


def _recovery_kraus(code: StabilizerCode) -> list[tuple[Syndrome, np.ndarray, np.ndarray]]:
    return [(s, dense(code.corrections[s]), syndrome_projector(code, s)) for s in code.syndromes]


def recovery_map(code: StabilizerCode) -> Channel:
    """Perfect syndrome measurement followed by the looked-up correction."""
    return Channel.from_kraus(r @ proj for _, r, proj in _recovery_kraus(code))


def noisy_recovery_map(code: StabilizerCode, chi: ConfusionMatrix) -> Channel:
    """Recovery with syndrome readout confused according to ``chi``."""
    if chi.size != 1 << code.r:
        raise DimensionError(f"confusion matrix size {chi.size} != {1 << code.r}")
    items = _recovery_kraus(code)
    kraus = []
    for s, _, proj in items:
        for s_read, r_read, _ in items:
            w = chi.prob(s_read, s)
            if w > 0:
                kraus.append(np.sqrt(w) * (r_read @ proj))
    return Channel.from_kraus(kraus)


def encoding_operation(code: StabilizerCode) -> Channel:
    return Channel.from_kraus([encoding_isometry(code)])


def decoding_operation(code: StabilizerCode) -> Channel:
    """Perfect recovery followed by un-encoding: ``rho -> E^dag R(rho) E``."""
    e_dag = encoding_isometry(code).conj().T
    return Channel.from_kraus(e_dag @ r @ proj for _, r, proj in _recovery_kraus(code))


def gadget_retraction(code: StabilizerCode, lam: Channel) -> Channel:
    """Effective logical process ``D o lam o E`` of an n-qubit process."""
    dim = 1 << code.n
    if (lam.in_dim, lam.out_dim) != (dim, dim):
        raise DimensionError(f"process acts on dim {lam.in_dim}->{lam.out_dim}, code needs {dim}")
    return decoding_operation(code) @ lam @ encoding_operation(code)


def encoding_unitary(code: StabilizerCode) -> np.ndarray:
    """``U |s> kron |psi> = R(s)^dag E |psi>``, syndrome register as the leading factor."""
    e = encoding_isometry(code)
    dk = 1 << code.k
    u = np.zeros((1 << code.n, 1 << code.n), dtype=complex)
    for s in code.syndromes:
        block = dense(code.corrections[s]).conj().T @ e
        start = syndrome_index(s) * dk
        u[:, start:start + dk] = block
    return u


def encoding_unitary_table(code: StabilizerCode) -> list[dict]:
    """Image of every ``|s> kron |l>`` as rows ``{logical, syndrome, encoded}``.

    ``encoded`` is the data-qubit basis label when the image is a single
    computational basis state (up to phase), otherwise None.
    """
    u = encoding_unitary(code)
    dk = 1 << code.k
    rows = []
    for logical in range(dk):
        for s in code.syndromes:
            col = u[:, syndrome_index(s) * dk + logical]
            nz = np.flatnonzero(np.abs(col) > 1e-12)
            label = format(int(nz[0]), f"0{code.n}b") if len(nz) == 1 else None
            rows.append({
                "logical": format(logical, f"0{code.k}b") if code.k else "",
                "syndrome": syndrome_str(s),
                "encoded": label,
            })
    return rows


def partial_trace_leading(rho: np.ndarray, d_lead: int, d_rest: int) -> np.ndarray:
    """Trace out the leading tensor factor of dimension ``d_lead``."""
    return np.einsum("ajak->jk", np.asarray(rho).reshape(d_lead, d_rest, d_lead, d_rest))


def syndrome_trace_channel(code: StabilizerCode) -> Channel:
    """``rho -> Tr_Syn(U^dag rho U)`` in the logical frame."""
    u = encoding_unitary(code)
    d_syn, d_l = 1 << code.r, 1 << code.k
    return Channel.from_function(lambda x: partial_trace_leading(u.conj().T @ x @ u, d_syn, d_l), u.shape[0], d_l)


def _check_state(rho: np.ndarray, tol: float = 1e-10) -> None:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DomainError("density matrix must be square")
    if abs(np.trace(rho) - 1) > tol:
        raise DomainError(f"density matrix trace is {np.trace(rho).real:.3g}, expected 1")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise DomainError("density matrix is not Hermitian")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0] < -tol:
        raise DomainError("density matrix has a negative eigenvalue")


def generalized_encoding(code: StabilizerCode, rho_syn: np.ndarray) -> Channel:
    """``rho_L -> U (rho_syn kron rho_L) U^dag``."""
    _check_state(rho_syn)
    if rho_syn.shape[0] != 1 << code.r:
        raise DimensionError(f"syndrome state has dim {rho_syn.shape[0]}, expected {1 << code.r}")
    u = encoding_unitary(code)
    return Channel.from_function(lambda x: u @ np.kron(rho_syn, x) @ u.conj().T, 1 << code.k, 1 << code.n)


def generalized_retraction(code: StabilizerCode, rho_syn: np.ndarray, lam: Channel) -> Channel:
    """Logical process of ``lam`` when the syndrome register starts in ``rho_syn``."""
    dim = 1 << code.n
    if (lam.in_dim, lam.out_dim) != (dim, dim):
        raise DimensionError(f"process acts on dim {lam.in_dim}->{lam.out_dim}, code needs {dim}")
    return decoding_operation(code) @ lam @ generalized_encoding(code, rho_syn)


def basis_projector(dim: int, index: int) -> np.ndarray:
    out = np.zeros((dim, dim), dtype=complex)
    out[index, index] = 1.0
    return out


def random_cptp(dim: int, rng: np.random.Generator, n_kraus: int = 2) -> Channel:
    """Channel from a Haar-random isometry ``C^dim -> C^dim kron C^n_kraus``."""
    from scipy.stats import unitary_group

    u = unitary_group.rvs(dim * n_kraus, random_state=rng)
    iso = u[:, :dim]
    return Channel.from_kraus(iso[i * dim:(i + 1) * dim, :] for i in range(n_kraus))


def check_channel(chan: Channel, what: str, tol: float = 1e-10) -> None:
    """Raise DomainError if ``chan`` is not CPTP within ``tol``."""
    tp = chan.trace_preservation_error()
    if tp >= tol:
        raise DomainError(f"{what} is not trace preserving (error {tp:.3g})")
    ev = chan.min_choi_eigenvalue()
    if ev < -tol:
        raise DomainError(f"{what} is not completely positive (min Choi eigenvalue {ev:.3g})")
