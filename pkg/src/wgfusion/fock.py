"""Dual-rail photonic layer for two-photon fusion networks.

Two photons enter modes (a_H, a_V, b_H, b_V) carrying register branch states
f1..f4: the input is (f1 a_H+ + f2 a_V+)(f3 b_H+ + f4 b_V+)|vac>/2 with
<f1|f2> = 0 and z = <f4|f3> free. An N x N mode unitary maps the four input
modes (plus vacuum ancillas on rows 5..N) to detector modes,
    a_H+ = sum_k U[0,k] c_k+,   etc.
and ideal number-resolving detectors read out all N modes.

Closed-form path (enumerate_outcomes) vs. brute-force amplitude path
(oracle_enumerate): the two must agree to 1e-10 on every pattern.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidContextError, InvalidUnitaryError
from .graphstate import PureState

UNITARY_TOL = 1e-10
ZERO_PROB = 1e-14


@dataclass(frozen=True)
class ModeUnitary:
    """N x N mode unitary; rows 0-3 are a_H, a_V, b_H, b_V, rows 4.. vacuum."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 4:
            raise InvalidUnitaryError("ModeUnitary must be square with N >= 4")
        if np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) > UNITARY_TOL:
            raise InvalidUnitaryError("ModeUnitary fails U U+ = I")
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "re": self.matrix.real.tolist(),
                "im": self.matrix.imag.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "ModeUnitary":
        try:
            doc = json.loads(text)
            n = int(doc["n"])
            m = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(
                doc["im"], dtype=float
            )
            if m.shape != (n, n):
                raise InvalidUnitaryError("matrix shape does not match n")
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise InvalidUnitaryError(f"malformed unitary JSON: {exc}") from exc
        return cls(m)

    @classmethod
    def identity(cls, n: int = 4) -> "ModeUnitary":
        return cls(np.eye(n, dtype=complex))


class FusionContext:
    """The four register branch states riding on the two photons.

    f1, f2 live on the left residual register, f3, f4 on the right one.
    Invariants (checked at 1e-10): all four normalized, <f1|f2> = 0.
    gram.z = <f4|f3> is unconstrained; m_coeffs is the fixed product-input
    coefficient table (all entries 1/2).
    """

    def __init__(self, f1: PureState, f2: PureState, f3: PureState, f4: PureState):
        if f1.num_qubits != f2.num_qubits or f3.num_qubits != f4.num_qubits:
            raise InvalidContextError("branch-state register sizes mismatch")
        for k, f in enumerate((f1, f2, f3, f4), start=1):
            if abs(np.linalg.norm(f.amplitudes) - 1.0) > UNITARY_TOL:
                raise InvalidContextError(f"f{k} not normalized")
        if abs(np.vdot(f1.amplitudes, f2.amplitudes)) > UNITARY_TOL:
            raise InvalidContextError("<f1|f2> != 0")
        self.f1, self.f2, self.f3, self.f4 = f1, f2, f3, f4
        self.m_coeffs = np.full((2, 2), 0.5, dtype=complex)
        # z = <f4|f3> (right-side gram overlap)
        self.z = complex(np.vdot(f4.amplitudes, f3.amplitudes))

    @property
    def left_qubits(self) -> int:
        return self.f1.num_qubits

    @property
    def right_qubits(self) -> int:
        return self.f3.num_qubits


@dataclass
class FusionOutcome:
    """One detection pattern (i, j), i <= j, 0-based detector indices."""

    pattern: tuple[int, int]
    probability: float
    register_state: PureState | None  # None for (numerically) zero outcomes
    kind: str  # "relevant" | "non-relevant"
    m_matrix: np.ndarray | None = None  # normalized [[a,b],[c,d]]/N for relevant


def outcome_coeffs(u: np.ndarray, i: int, j: int) -> tuple[complex, complex, complex, complex]:
    """(a,b,c,d) coefficients of pattern (i,j), i != j: a = U_1i U_3j + U_1j U_3i etc."""
    a = u[0, i] * u[2, j] + u[0, j] * u[2, i]
    b = u[0, i] * u[3, j] + u[0, j] * u[3, i]
    c = u[1, i] * u[2, j] + u[1, j] * u[2, i]
    d = u[1, i] * u[3, j] + u[1, j] * u[3, i]
    return a, b, c, d


def relevant_norm_sq(a, b, c, d, z: complex) -> float:
    """N_ij^2 with the gram correction: |a|^2+|b|^2+2Re(z a b*) + |c|^2+|d|^2+2Re(z c d*)."""
    return float(
        abs(a) ** 2
        + abs(b) ** 2
        + 2.0 * (z * a * np.conj(b)).real
        + abs(c) ** 2
        + abs(d) ** 2
        + 2.0 * (z * c * np.conj(d)).real
    )


def same_detector_prob(u: np.ndarray, i: int, z: complex) -> float:
    """p_ii = (1/2)(|U_1i|^2+|U_2i|^2)(|U_3i|^2+|U_4i|^2+2Re(z U_3i U_4i*)).

    The 1/2 is the bosonic normalization of the doubly occupied mode; with it
    the full distribution is complete (sums to 1)."""
    alpha = abs(u[0, i]) ** 2 + abs(u[1, i]) ** 2
    beta = (
        abs(u[2, i]) ** 2
        + abs(u[3, i]) ** 2
        + 2.0 * (z * u[2, i] * np.conj(u[3, i])).real
    )
    return 0.5 * alpha * beta


def enumerate_outcomes(ctx: FusionContext, u: ModeUnitary) -> list[FusionOutcome]:
    """All N(N+1)/2 detection patterns with closed-form probabilities."""
    m = u.matrix
    n = u.n
    z = ctx.z
    v1, v2 = ctx.f1.amplitudes, ctx.f2.amplitudes
    v3, v4 = ctx.f3.amplitudes, ctx.f4.amplitudes
    nq = ctx.left_qubits + ctx.right_qubits
    out: list[FusionOutcome] = []
    for i in range(n):
        for j in range(i, n):
            if i == j:
                p = same_detector_prob(m, i, z)
                reg = None
                if p > ZERO_PROB:
                    left = m[0, i] * v1 + m[1, i] * v2
                    right = m[2, i] * v3 + m[3, i] * v4
                    vec = np.kron(left, right)
                    reg = PureState(nq, vec / np.linalg.norm(vec))
                out.append(FusionOutcome((i, i), p, reg, "non-relevant"))
            else:
                a, b, c, d = outcome_coeffs(m, i, j)
                nsq = relevant_norm_sq(a, b, c, d, z)
                p = nsq / 4.0
                reg = None
                mm = None
                if p > ZERO_PROB:
                    vec = (
                        a * np.kron(v1, v3)
                        + b * np.kron(v1, v4)
                        + c * np.kron(v2, v3)
                        + d * np.kron(v2, v4)
                    )
                    reg = PureState(nq, vec / np.linalg.norm(vec))
                    mm = np.array([[a, b], [c, d]], dtype=complex) / math.sqrt(nsq)
                out.append(FusionOutcome((i, j), p, reg, "relevant", mm))
    return out


def oracle_enumerate(ctx: FusionContext, u: ModeUnitary) -> list[FusionOutcome]:
    """Brute-force path: expand the two-photon amplitude per pattern.

    Uses only mode-operator substitution and dense vectors; no closed-form
    probability or normalization shortcut. The doubly occupied pattern carries
    the bosonic sqrt(2): c_i+ c_i+ |vac> = sqrt(2) |2_i>.
    """
    m = u.matrix
    n = u.n
    v1, v2 = ctx.f1.amplitudes, ctx.f2.amplitudes
    v3, v4 = ctx.f3.amplitudes, ctx.f4.amplitudes
    nq = ctx.left_qubits + ctx.right_qubits
    # photon from channel a in mode i carries register branch fA_i, etc.
    f_a = [m[0, i] * v1 + m[1, i] * v2 for i in range(n)]
    f_b = [m[2, i] * v3 + m[3, i] * v4 for i in range(n)]
    out: list[FusionOutcome] = []
    for i in range(n):
        for j in range(i, n):
            if i == j:
                amp = np.kron(f_a[i], f_b[i]) / math.sqrt(2.0)
                kind = "non-relevant"
                mm = None
            else:
                amp = 0.5 * (np.kron(f_a[i], f_b[j]) + np.kron(f_a[j], f_b[i]))
                kind = "relevant"
            p = float(np.vdot(amp, amp).real)
            reg = None
            mm = None
            if p > ZERO_PROB:
                reg = PureState(nq, amp / math.sqrt(p))
                if kind == "relevant":
                    a, b, c, d = outcome_coeffs(m, i, j)
                    mm = np.array([[a, b], [c, d]], dtype=complex) / (
                        2.0 * math.sqrt(p)
                    )
            out.append(FusionOutcome((i, j), p, reg, kind, mm))
    return out


def reduced_det_rho(outcome: FusionOutcome, left_qubits: int) -> float:
    """Dense oracle for det of the effective 2x2 reduced density matrix.

    Reshapes the register state across the left/right cut, builds rho by
    matrix product, and returns the product of its two leading eigenvalues
    (the state has Schmidt rank <= 2 by construction).
    """
    reg = outcome.register_state
    mat = reg.amplitudes.reshape(1 << left_qubits, -1)
    rho = mat @ mat.conj().T
    evals = np.sort(np.linalg.eigvalsh(rho))[::-1]
    return float(evals[0] * evals[1])


def type_i_matrix() -> ModeUnitary:
    """Endpoint-merging fusion network.

    Channel a passes a polarizing beam splitter whose H output becomes c_H;
    channel b's V output becomes c_V; the a_V/b_H pair interferes on a 50:50
    splitter into d_H, d_V. Only the d modes are detected; the undetected c
    modes form the new dual-rail qubit. Columns: (c_H, c_V, d_H, d_V).
    """
    s = 1.0 / math.sqrt(2.0)
    m = np.array(
        [
            [1, 0, 0, 0],
            [0, 0, s, -s],
            [0, 0, s, s],
            [0, 1, 0, 0],
        ],
        dtype=complex,
    )
    return ModeUnitary(m)


def type_ii_matrix() -> ModeUnitary:
    """Bell-projecting fusion network.

    Both channels pass a diagonal polarizing beam splitter and both outputs
    are detected in the rotated (H/V) basis. Columns: (c_H, c_V, d_H, d_V).
    Cross-channel outcomes are maximally entangled Bell projections totaling
    probability 1/2; same-detector outcomes realize the X-type failure
    operators with the (1 -/+ Re z)/4 split.
    """
    m = 0.5 * np.array(
        [
            [1, 1, 1, -1],
            [1, 1, -1, 1],
            [1, -1, 1, 1],
            [-1, 1, 1, 1],
        ],
        dtype=complex,
    )
    return ModeUnitary(m)


def type_i_marginal(outcomes: list[FusionOutcome], ctx: FusionContext) -> dict:
    """Marginalize a type_i_matrix outcome list over the undetected c modes.

    Returns the four physical outcomes keyed by label:
    one photon in d_H / d_V (success branches, the c modes carry the new
    qubit coherently), both photons in c (zero photons detected), both in d.
    The success register gains the new qubit c as its FIRST (most
    significant) qubit: |0>_c from c_H, |1>_c from c_V.
    """
    by_pattern = {o.pattern: o for o in outcomes}
    nq = ctx.left_qubits + ctx.right_qubits

    def success(d_mode: int) -> tuple[float, PureState | None]:
        # coherent sum over c in {0,1}: amplitude of (c_mode, d_mode)
        amps = []
        total = 0.0
        for c_mode in (0, 1):
            o = by_pattern[(min(c_mode, d_mode), max(c_mode, d_mode))]
            total += o.probability
            if o.register_state is None:
                amps.append(np.zeros(1 << nq, dtype=complex))
            else:
                amps.append(
                    math.sqrt(o.probability) * o.register_state.amplitudes
                )
        vec = np.concatenate(amps)  # new qubit = most significant bit
        state = None
        if total > ZERO_PROB:
            state = PureState(nq + 1, vec / math.sqrt(total))
        return total, state

    p_dh, s_dh = success(2)
    p_dv, s_dv = success(3)
    p_c = by_pattern[(0, 1)].probability + by_pattern[(0, 0)].probability + by_pattern[(1, 1)].probability
    reg_c = by_pattern[(0, 1)].register_state
    p_d = sum(by_pattern[(i, j)].probability for i in (2, 3) for j in (2, 3) if i <= j)
    # both-in-d register: incoherent over patterns, but for this network only
    # the (2,2) and (3,3) patterns contribute and share one register state.
    reg_d = by_pattern[(2, 2)].register_state
    return {
        "one_photon_d_H": (p_dh, s_dh),
        "one_photon_d_V": (p_dv, s_dv),
        "both_in_c": (p_c, reg_c),
        "both_in_d": (p_d, reg_d),
    }
