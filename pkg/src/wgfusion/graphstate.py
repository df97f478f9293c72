"""Weighted graph states as dense pure states.

A weighted graph assigns a phase weight chi in (-pi, pi] to each edge; the
associated n-qubit state is built from |+>^n by applying e^{-i chi |11><11|}
along every edge. chi = pi recovers the ordinary graph-state CZ edge.

Bit-ordering convention (shared by all modules): qubit 0 is the MOST
significant bit of the amplitude index, i.e. basis index
    idx = sum_q bit_q << (n - 1 - q).
Global phase is ignored in all equality checks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CapExceededError,
    IndexClashError,
    InvalidGraphError,
    NonUnitaryGateError,
    ShapeMismatchError,
    ZeroOutcomeError,
)

DEFAULT_QUBIT_CAP = 20
ZERO_PROB_CUTOFF = 1e-14
NORM_TOL = 1e-12


def wrap_angle(chi: float) -> float:
    """Normalize an angle into (-pi, pi]."""
    out = math.remainder(chi, 2.0 * math.pi)
    if out <= -math.pi:
        out += 2.0 * math.pi
    return out


@dataclass(frozen=True)
class WeightedGraph:
    """Vertices plus phase-weighted edges.

    Edges are stored canonically as (a, b, chi) with a, b vertex labels in
    vertex order and chi normalized into (-pi, pi]. Edges whose normalized
    weight is (numerically) zero are dropped: zero weight means "no edge".
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]

    def __post_init__(self):
        index = {v: i for i, v in enumerate(self.vertices)}
        if len(index) != len(self.vertices):
            raise InvalidGraphError("duplicate vertex labels")
        seen = set()
        canon = []
        for a, b, chi in self.edges:
            if a not in index or b not in index:
                raise InvalidGraphError(f"edge endpoint not in vertices: ({a},{b})")
            if a == b:
                raise InvalidGraphError(f"self-loop on {a}")
            key = (min(index[a], index[b]), max(index[a], index[b]))
            if key in seen:
                raise InvalidGraphError(f"duplicate edge ({a},{b})")
            seen.add(key)
            w = wrap_angle(float(chi))
            if abs(w) < 1e-12:
                continue  # zero weight == no edge
            if index[a] > index[b]:
                a, b = b, a
            canon.append((a, b, w))
        object.__setattr__(self, "edges", tuple(canon))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def vertex_index(self, v: str) -> int:
        try:
            return self.vertices.index(v)
        except ValueError:
            raise InvalidGraphError(f"unknown vertex {v!r}") from None

    def neighbors(self, v: str) -> list[tuple[str, float]]:
        """Neighbors of v with edge weights."""
        out = []
        for a, b, chi in self.edges:
            if a == v:
                out.append((b, chi))
            elif b == v:
                out.append((a, chi))
        return out

    def degree(self, v: str) -> int:
        return len(self.neighbors(v))

    def weight(self, a: str, b: str) -> float:
        for x, y, chi in self.edges:
            if {x, y} == {a, b}:
                return chi
        return 0.0

    def without_vertex(self, v: str) -> "WeightedGraph":
        verts = tuple(x for x in self.vertices if x != v)
        edges = tuple(e for e in self.edges if v not in (e[0], e[1]))
        return WeightedGraph(verts, edges)

    def to_json(self) -> str:
        doc = {
            "vertices": list(self.vertices),
            "edges": [{"a": a, "b": b, "chi": chi} for a, b, chi in self.edges],
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "WeightedGraph":
        try:
            doc = json.loads(text)
            verts = tuple(str(v) for v in doc["vertices"])
            edges = tuple(
                (str(e["a"]), str(e["b"]), float(e["chi"])) for e in doc["edges"]
            )
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise InvalidGraphError(f"malformed graph JSON: {exc}") from exc
        return cls(verts, edges)


def chain_graph(labels: list[str], weights: list[float]) -> WeightedGraph:
    """Path graph over labels with consecutive edge weights."""
    if len(weights) != len(labels) - 1:
        raise InvalidGraphError("need len(labels)-1 weights for a chain")
    edges = tuple(
        (labels[i], labels[i + 1], weights[i]) for i in range(len(weights))
    )
    return WeightedGraph(tuple(labels), edges)


@dataclass
class PureState:
    """Dense amplitude table over an n-qubit register."""

    num_qubits: int
    amplitudes: np.ndarray
    norm_tag: str = "normalized"

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).ravel()
        if self.amplitudes.size != 1 << self.num_qubits:
            raise ShapeMismatchError(
                f"{self.amplitudes.size} amplitudes for {self.num_qubits} qubits"
            )
        if self.norm_tag == "normalized":
            nrm = float(np.linalg.norm(self.amplitudes))
            if abs(nrm - 1.0) > 1e-10:
                raise ShapeMismatchError(f"state not normalized: |psi| = {nrm}")

    def copy(self) -> "PureState":
        return PureState(self.num_qubits, self.amplitudes.copy(), self.norm_tag)

    def tensor(self, other: "PureState") -> "PureState":
        amps = np.kron(self.amplitudes, other.amplitudes)
        tag = (
            "normalized"
            if self.norm_tag == other.norm_tag == "normalized"
            else "unnormalized-with-weight"
        )
        return PureState(self.num_qubits + other.num_qubits, amps, tag)

    def reshaped(self) -> np.ndarray:
        return self.amplitudes.reshape([2] * self.num_qubits)


@dataclass(frozen=True)
class LocalGate:
    """Single-qubit unitary on a target register position."""

    target: int
    matrix: np.ndarray = field(hash=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise NonUnitaryGateError("LocalGate matrix must be 2x2")
        if np.max(np.abs(m @ m.conj().T - np.eye(2))) > NORM_TOL:
            raise NonUnitaryGateError("LocalGate matrix is not unitary")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class QubitProjection:
    """Projection of one qubit onto the ket alpha|0> + beta|1>.

    Applies the bra conj(alpha)<0| + conj(beta)<1| to the target qubit.
    """

    target: int
    coefficients: tuple[complex, complex]

    def __post_init__(self):
        a, b = complex(self.coefficients[0]), complex(self.coefficients[1])
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > NORM_TOL:
            raise ShapeMismatchError("projection coefficients not normalized")
        object.__setattr__(self, "coefficients", (a, b))


# Common gates.
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def phase_gate(phi: float) -> np.ndarray:
    """diag(1, e^{i phi}) == e^{i phi |1><1|} up to nothing."""
    return np.diag([1.0, np.exp(1j * phi)]).astype(complex)


def z_rotation(theta: float) -> np.ndarray:
    """e^{i theta Z} = diag(e^{i theta}, e^{-i theta})."""
    return np.diag([np.exp(1j * theta), np.exp(-1j * theta)]).astype(complex)


def plus_state(n: int) -> PureState:
    amps = np.full(1 << n, 1.0 / math.sqrt(1 << n), dtype=complex)
    return PureState(n, amps)


def apply_phase_edge(state: PureState, a: int, b: int, chi: float) -> PureState:
    """Multiply amplitudes with both bits a, b set by e^{-i chi}."""
    n = state.num_qubits
    if a == b:
        raise IndexClashError("phase edge endpoints must differ")
    if not (0 <= a < n and 0 <= b < n):
        raise IndexClashError("phase edge index out of range")
    idx = np.arange(1 << n)
    mask_a = 1 << (n - 1 - a)
    mask_b = 1 << (n - 1 - b)
    both = (idx & mask_a).astype(bool) & (idx & mask_b).astype(bool)
    amps = state.amplitudes.copy()
    amps[both] *= np.exp(-1j * chi)
    return PureState(n, amps, state.norm_tag)


def build_state(graph: WeightedGraph, max_qubits: int = DEFAULT_QUBIT_CAP) -> PureState:
    """Dense state of a weighted graph: phase edges applied to |+>^n."""
    n = graph.n
    if n > max_qubits:
        raise CapExceededError(f"{n} qubits exceeds cap {max_qubits}")
    state = plus_state(n)
    for a, b, chi in graph.edges:
        state = apply_phase_edge(state, graph.vertex_index(a), graph.vertex_index(b), chi)
    return state


def attach_vertex(
    state: PureState, new_qubit: int, neighbor_weights: list[tuple[int, float]]
) -> PureState:
    """Attach a fresh qubit via the recursion
    (|0>|phi> + |1> prod_b e^{-i chi |1><1|_b} |phi>)/sqrt2.

    new_qubit is the insertion position in the enlarged register (0..n);
    neighbor indices refer to positions in the EXISTING register and are
    shifted automatically when they land at or after the insertion point.
    """
    n = state.num_qubits
    if not (0 <= new_qubit <= n):
        raise IndexClashError(f"insertion position {new_qubit} out of range")
    phi = state.amplitudes
    branch = phi.copy()
    tmp = PureState(n, branch, state.norm_tag)
    for b, chi in neighbor_weights:
        if not (0 <= b < n):
            raise IndexClashError(f"neighbor index {b} out of range")
        # single-qubit phase e^{-i chi |1><1|} on b
        idx = np.arange(1 << n)
        mask = 1 << (n - 1 - b)
        sel = (idx & mask).astype(bool)
        amps = tmp.amplitudes.copy()
        amps[sel] *= np.exp(-1j * chi)
        tmp = PureState(n, amps, tmp.norm_tag)
    # stack: new qubit as most significant of a front register, then move it
    stacked = np.concatenate([phi, tmp.amplitudes]) / math.sqrt(2.0)
    out = PureState(n + 1, stacked, state.norm_tag)
    if new_qubit != 0:
        out = move_qubit(out, 0, new_qubit)
    return out


def move_qubit(state: PureState, src: int, dst: int) -> PureState:
    """Reorder the register so the qubit at position src sits at dst."""
    n = state.num_qubits
    order = list(range(n))
    order.remove(src)
    order.insert(dst, src)
    arr = state.reshaped().transpose(order).reshape(-1)
    return PureState(n, arr, state.norm_tag)


def apply_local(state: PureState, gate: LocalGate) -> PureState:
    n = state.num_qubits
    t = gate.target
    if not (0 <= t < n):
        raise IndexClashError(f"gate target {t} out of range")
    arr = state.reshaped()
    arr = np.tensordot(gate.matrix, arr, axes=([1], [t]))
    arr = np.moveaxis(arr, 0, t)
    return PureState(n, arr.reshape(-1), state.norm_tag)


def project_qubit(
    state: PureState, proj: QubitProjection, allow_zero: bool = False
) -> tuple[PureState | None, float]:
    """Project one qubit out; returns (renormalized n-1 qubit state, probability).

    Below the zero-probability cutoff the branch is reported impossible:
    raises ZeroOutcomeError unless allow_zero, in which case (None, prob).
    """
    n = state.num_qubits
    t = proj.target
    if not (0 <= t < n):
        raise IndexClashError(f"projection target {t} out of range")
    a, b = proj.coefficients
    arr = state.reshaped()
    sl0 = np.take(arr, 0, axis=t)
    sl1 = np.take(arr, 1, axis=t)
    red = np.conj(a) * sl0 + np.conj(b) * sl1
    red = red.reshape(-1)
    prob = float(np.vdot(red, red).real)
    if prob < ZERO_PROB_CUTOFF:
        if allow_zero:
            return None, prob
        raise ZeroOutcomeError(f"projection probability {prob} below cutoff")
    return PureState(n - 1, red / math.sqrt(prob)), prob


def fidelity_up_to_global_phase(s1: PureState, s2: PureState) -> float:
    """|<s1|s2>| for normalized states."""
    if s1.num_qubits != s2.num_qubits:
        raise ShapeMismatchError("qubit counts differ")
    return float(abs(np.vdot(s1.amplitudes, s2.amplitudes)))


def equal_up_to_prescribed_corrections(
    candidate: PureState, target: PureState, corrections: list[LocalGate]
) -> bool:
    """True iff the corrected candidate matches target up to global phase."""
    cur = candidate
    for gate in corrections:
        cur = apply_local(cur, gate)
    return fidelity_up_to_global_phase(cur, target) >= 1.0 - 1e-10
