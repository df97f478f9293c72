"""Fusion protocol drivers on weighted chains.

Each driver returns the exhaustive outcome distribution (analysis mode);
sample_outcomes provides the seeded Monte Carlo mode on top of it.

Register convention: a ChainState's qubits are ordered by its graph's vertex
list; projecting a vertex out removes its register position.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidGraphError,
    NoLogicalPairError,
    NotAchievableError,
    NotEndpointError,
    NumericalAbortError,
    WeightsNotEligibleError,
)
from .fock import FusionContext, FusionOutcome, ModeUnitary, enumerate_outcomes
from .graphstate import (
    LocalGate,
    PureState,
    QubitProjection,
    WeightedGraph,
    apply_local,
    build_state,
    chain_graph,
    fidelity_up_to_global_phase,
    phase_gate,
    project_qubit,
    wrap_angle,
    z_rotation,
    PAULI_X,
    PAULI_Z,
)

WEIGHT_TOL = 1e-9


@dataclass
class ChainState:
    """A weighted chain (path) with its dense state and logical pairs.

    Path topology is checked after contracting each logical pair to a single
    vertex; logical pairs must have |00>/|11> support only.
    """

    graph: WeightedGraph
    state: PureState
    logical_pairs: frozenset[frozenset[str]] = frozenset()
    validate: bool = True

    def __post_init__(self):
        self.logical_pairs = frozenset(frozenset(p) for p in self.logical_pairs)
        if self.state.num_qubits != self.graph.n:
            raise InvalidGraphError("state size does not match graph")
        if self.validate:
            self.check_invariants()

    def qubit(self, v: str) -> int:
        return self.graph.vertex_index(v)

    def check_invariants(self):
        _check_path_after_contraction(self.graph, self.logical_pairs)
        for pair in self.logical_pairs:
            if not self.pair_support_ok(pair):
                raise InvalidGraphError(
                    f"logical pair {set(pair)} has mixed-bit amplitude support"
                )

    def pair_support_ok(self, pair: frozenset[str], tol: float = 1e-12) -> bool:
        """Amplitudes where the pair's bits differ must vanish."""
        a, e = sorted(pair, key=self.graph.vertices.index)
        n = self.graph.n
        idx = np.arange(1 << n)
        ba = (idx >> (n - 1 - self.qubit(a))) & 1
        be = (idx >> (n - 1 - self.qubit(e))) & 1
        mixed = ba != be
        return float(np.max(np.abs(self.state.amplitudes[mixed]), initial=0.0)) < tol


def _check_path_after_contraction(graph: WeightedGraph, pairs) -> None:
    rep = {v: v for v in graph.vertices}
    for pair in pairs:
        a, e = sorted(pair, key=graph.vertices.index)
        if a not in rep or e not in rep:
            raise InvalidGraphError("logical pair member not in graph")
        rep[e] = a
    adj: dict[str, set[str]] = {}
    for a, b, _ in graph.edges:
        ra, rb = rep[a], rep[b]
        if ra == rb:
            raise InvalidGraphError("edge inside a contracted logical pair")
        adj.setdefault(ra, set()).add(rb)
        adj.setdefault(rb, set()).add(ra)
    for v, nb in adj.items():
        if len(nb) > 2:
            raise InvalidGraphError(f"vertex {v} has contracted degree {len(nb)} > 2")
    # acyclic: a path on k vertices has k-1 edges per connected component
    nodes = set(rep[v] for v in graph.vertices)
    seen: set[str] = set()
    for start in nodes:
        if start in seen:
            continue
        comp, edges2 = set(), 0
        stack = [start]
        while stack:
            v = stack.pop()
            if v in comp:
                continue
            comp.add(v)
            for w in adj.get(v, ()):
                edges2 += 1
                if w not in comp:
                    stack.append(w)
        if edges2 // 2 != len(comp) - 1:
            raise InvalidGraphError("contracted graph contains a cycle")
        seen |= comp


def make_chain(labels: list[str], weights: list[float]) -> ChainState:
    g = chain_graph(labels, weights)
    return ChainState(g, build_state(g))


@dataclass
class Correction:
    """A prescribed local correction, recorded after being applied."""

    vertex: str
    name: str
    matrix: np.ndarray = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {"vertex": self.vertex, "gate": self.name}


@dataclass
class ProtocolOutcome:
    label: str
    probability: float
    post_states: list[ChainState]
    corrections_applied: list[Correction] = field(default_factory=list)
    is_good_failure: bool = False

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "probability": self.probability,
            "post_graphs": [
                {
                    "vertices": list(s.graph.vertices),
                    "edges": [
                        {"a": a, "b": b, "chi": chi} for a, b, chi in s.graph.edges
                    ],
                    "logical_pairs": [sorted(p) for p in s.logical_pairs],
                }
                for s in self.post_states
            ],
            "corrections": [c.as_dict() for c in self.corrections_applied],
            "is_good_failure": self.is_good_failure,
        }


def _branch_states(state: PureState, qubit: int) -> tuple[PureState, PureState]:
    """sqrt(2)-scaled slices of one qubit: the f-branch states of the recursion."""
    arr = state.reshaped()
    f0 = np.take(arr, 0, axis=qubit).reshape(-1) * math.sqrt(2.0)
    f1 = np.take(arr, 1, axis=qubit).reshape(-1) * math.sqrt(2.0)
    n = state.num_qubits - 1
    return (
        PureState(n, f0, "unnormalized-with-weight"),
        PureState(n, f1, "unnormalized-with-weight"),
    )


def _as_normalized(f: PureState) -> PureState:
    nrm = float(np.linalg.norm(f.amplitudes))
    return PureState(f.num_qubits, f.amplitudes / nrm)


def _resolve_vertex(chain: ChainState, v) -> str:
    if isinstance(v, str):
        chain.graph.vertex_index(v)  # raises if unknown
        return v
    return chain.graph.vertices[int(v)]


def split_product(state: PureState, n_left: int) -> tuple[PureState, PureState]:
    """Factor an exactly-product state across the left/right register cut."""
    mat = state.amplitudes.reshape(1 << n_left, -1)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    if s.size > 1 and s[1] > 1e-10:
        raise NumericalAbortError("state is not a product across the requested cut")
    return (
        PureState(n_left, u[:, 0]),
        PureState(state.num_qubits - n_left, vh[0, :]),
    )


def fuse_type_i(
    left: ChainState, end_a, right: ChainState, end_b, new_label: str | None = None
) -> list[ProtocolOutcome]:
    """Endpoint-merging fusion: four outcomes at probability 1/4 each.

    Success branches create a new vertex c inheriting both endpoints'
    neighbors and weights; failures Z-measure both endpoints out.
    """
    a = _resolve_vertex(left, end_a)
    b = _resolve_vertex(right, end_b)
    for chain, v in ((left, a), (right, b)):
        if chain.graph.degree(v) != 1:
            raise NotEndpointError(f"{v} has degree {chain.graph.degree(v)} != 1")
        if any(v in p for p in chain.logical_pairs):
            raise NotEndpointError(f"{v} is part of a logical pair")
    c = new_label or f"{a}*{b}"
    (na, chi_a), = left.graph.neighbors(a)
    (nb, chi_b), = right.graph.neighbors(b)

    f1, f2 = _branch_states(left.state, left.qubit(a))
    f3, f4 = _branch_states(right.state, right.qubit(b))
    lg, rg = left.graph.without_vertex(a), right.graph.without_vertex(b)
    merged = WeightedGraph(
        (c,) + lg.vertices + rg.vertices,
        ((c, na, chi_a), (c, nb, chi_b)) + lg.edges + rg.edges,
    )

    def _succ(sign: float, label: str, corr: list[Correction]):
        # branch states are unit vectors: divide by sqrt2 for a unit vector
        v13 = np.kron(f1.amplitudes, f3.amplitudes)
        v24 = np.kron(f2.amplitudes, f4.amplitudes)
        vec = np.concatenate([v13, sign * v24]) / math.sqrt(2.0)
        st = PureState(merged.n, vec)
        for g in corr:
            st = apply_local(st, LocalGate(merged.vertex_index(g.vertex), g.matrix))
        post = ChainState(merged, st, left.logical_pairs | right.logical_pairs)
        return ProtocolOutcome(label, 0.25, [post], corr)

    out = [
        _succ(+1.0, "success_plus", []),
        _succ(-1.0, "success_minus", [Correction(c, "Z", PAULI_Z)]),
    ]

    def _fail(label: str, fl: PureState, fr: PureState, corr: list[Correction]):
        sl, sr = _as_normalized(fl), _as_normalized(fr)
        for g in corr:
            if g.vertex in lg.vertices:
                sl = apply_local(sl, LocalGate(lg.vertex_index(g.vertex), g.matrix))
            else:
                sr = apply_local(sr, LocalGate(rg.vertex_index(g.vertex), g.matrix))
        posts = [
            ChainState(lg, sl, left.logical_pairs),
            ChainState(rg, sr, right.logical_pairs),
        ]
        return ProtocolOutcome(label, 0.25, posts, corr)

    # two photons in d: endpoints were effectively Z-measured (a -> 1, b -> 0)
    out.append(
        _fail(
            "failure_two_photon",
            f2,
            f3,
            [Correction(na, "phase(+chi)", phase_gate(chi_a))],
        )
    )
    # zero photons in d: a -> 0, b -> 1
    out.append(
        _fail(
            "failure_zero_photon",
            f1,
            f4,
            [Correction(nb, "phase(+chi)", phase_gate(chi_b))],
        )
    )
    return out


def _xlike_case(chi1: float, chi2: float) -> str | None:
    """Eligibility of an X-like projection on a vertex with edge weights chi1, chi2.

    Case 1: equal weights. Case 2: weights sum to 2pi (i.e. chi1 = -chi2 mod 2pi).
    chi = pi satisfies both; Case 1 is preferred then.
    """
    if abs(wrap_angle(chi1 - chi2)) < WEIGHT_TOL:
        return "case1"
    if abs(wrap_angle(chi1 + chi2)) < WEIGHT_TOL:
        return "case2"
    return None


def create_logical_qubit(chain: ChainState, a) -> list[ProtocolOutcome]:
    """Project an interior vertex to turn its two neighbors into a logical pair.

    Success probability (1 - cos chi)/4; at chi = pi the complementary
    projection also succeeds (total probability 1). Otherwise the complement
    is a failure carrying the Z-measurement recovery split.
    """
    a = _resolve_vertex(chain, a)
    nbs = chain.graph.neighbors(a)
    if len(nbs) != 2:
        raise WeightsNotEligibleError(f"{a} is not interior (degree {len(nbs)})")
    if any(a in p for p in chain.logical_pairs):
        raise NoLogicalPairError(f"{a} already belongs to a logical pair")
    (b1, chi1), (b2, chi2) = sorted(nbs, key=lambda t: chain.graph.vertices.index(t[0]))
    case = _xlike_case(chi1, chi2)
    if case is None:
        raise WeightsNotEligibleError(
            f"weights ({chi1:.6g}, {chi2:.6g}) satisfy neither eligibility case"
        )
    chi = chi1 if case == "case1" else chi2  # case 2: chi1 = -chi mod 2pi
    at_pi = abs(wrap_angle(chi - math.pi)) < WEIGHT_TOL

    # primary bra (A, B): case 1 B = -A e^{i chi}; case 2 B = -A.
    bra = (
        (1.0, -cmath.exp(1j * chi)) if case == "case1" else (1.0, -1.0)
    )
    out = [
        _xlike_branch(chain, a, b1, b2, bra, case, f"success_{case}")
    ]
    # complementary bra (1, e^{i chi})/sqrt2 for case 1; (1, 1) for case 2
    comp = (
        (1.0, cmath.exp(1j * chi)) if case == "case1" else (1.0, 1.0)
    )
    if at_pi:
        comp_case = "case2" if case == "case1" else "case1"
        out.append(_xlike_branch(chain, a, b1, b2, comp, comp_case, f"success_{comp_case}"))
    else:
        out.extend(_xlike_failure_split(chain, a, b1, b2, comp))
    return out


def _project_bra(state: PureState, qubit: int, bra: tuple[complex, complex]):
    """Apply the unnormalized-direction bra (A<0| + B<1|)/norm on one qubit."""
    a, b = bra
    nrm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
    proj = QubitProjection(qubit, (np.conj(a) / nrm, np.conj(b) / nrm))
    return project_qubit(state, proj, allow_zero=True)


def _xlike_branch(
    chain: ChainState,
    a: str,
    b1: str,
    b2: str,
    bra: tuple[complex, complex],
    case: str,
    label: str,
) -> ProtocolOutcome:
    """One successful X-like projection branch with its prescribed corrections."""
    g = chain.graph
    chi1, chi2 = g.weight(a, b1), g.weight(a, b2)
    chi = chi1 if case == "case1" else chi2
    st, prob = _project_bra(chain.state, chain.qubit(a), bra)
    ng = g.without_vertex(a)
    corr: list[Correction] = []
    if case == "case2":
        corr.append(Correction(b1, "X", PAULI_X))
        # c1 = b1's remaining neighbor, if any; its edge weight sign flips
        others = [(v, w) for v, w in g.neighbors(b1) if v != a]
        if others:
            (c1, phi1), = others
            corr.append(Correction(c1, "phase(+phi1)", phase_gate(phi1)))
            edges = tuple(
                (x, y, -w if {x, y} == {b1, c1} else w) for x, y, w in ng.edges
            )
            ng = WeightedGraph(ng.vertices, edges)
    corr.append(Correction(b1, "zrot((pi-chi)/2)", z_rotation((math.pi - chi) / 2.0)))
    for gate in corr:
        st = apply_local(st, LocalGate(ng.vertex_index(gate.vertex), gate.matrix))
    pairs = chain.logical_pairs | {frozenset({b1, b2})}
    return ProtocolOutcome(label, prob, [ChainState(ng, st, pairs)], corr)


def _xlike_failure_split(
    chain: ChainState, a: str, b1: str, b2: str, bra: tuple[complex, complex]
) -> list[ProtocolOutcome]:
    """Failure branch: project a onto the complement, then Z-measure b1, b2.

    Each of the four Z sub-outcomes splits the chain into the segment left of
    b1 and the segment right of b2 (either may be empty), with the standard
    Z-rule phase corrections applied on the measured vertices' neighbors.
    """
    g = chain.graph
    st_a, p_a = _project_bra(chain.state, chain.qubit(a), bra)
    out: list[ProtocolOutcome] = []
    ng = g.without_vertex(a)
    for s1 in (0, 1):
        for s2 in (0, 1):
            if st_a is None:
                continue
            st = st_a
            gg = ng
            prob = p_a
            corr: list[Correction] = []
            for v, s in ((b1, s1), (b2, s2)):
                bra_z = (1.0, 0.0) if s == 0 else (0.0, 1.0)
                st2, p = _project_bra(st, gg.vertex_index(v), bra_z)
                prob *= p
                if st2 is None:
                    st = None
                    break
                st = st2
                nb = [(w, chi) for w, chi in gg.neighbors(v)]
                gg = gg.without_vertex(v)
                if s == 1:
                    for w, chi in nb:
                        gate = phase_gate(chi)
                        corr.append(Correction(w, "phase(+chi)", gate))
                        st = apply_local(st, LocalGate(gg.vertex_index(w), gate))
            if st is None:
                continue
            posts = _split_components(gg, st, chain.logical_pairs)
            out.append(
                ProtocolOutcome(f"failure_z{s1}{s2}", prob, posts, corr, False)
            )
    return out


def _split_components(
    graph: WeightedGraph, state: PureState, pairs
) -> list[ChainState]:
    """Split a (possibly disconnected) chain state into per-component ChainStates."""
    comps: list[set[str]] = []
    seen: set[str] = set()
    for v in graph.vertices:
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for y, _ in graph.neighbors(x):
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        # keep logical pair partners in one component
        for p in pairs:
            if comp & set(p):
                comp |= set(p)
        seen |= comp
        comps.append(comp)
    if len(comps) <= 1:
        return [ChainState(graph, state, frozenset(p for p in pairs if set(p) <= set(graph.vertices)))]
    out = []
    remaining = state
    rem_vertices = list(graph.vertices)
    for comp in comps[:-1]:
        # move component qubits to the front, then factor
        order = sorted(comp, key=rem_vertices.index)
        rest = [v for v in rem_vertices if v not in comp]
        perm = [rem_vertices.index(v) for v in order + rest]
        arr = remaining.reshaped().transpose(perm).reshape(-1)
        remaining = PureState(len(rem_vertices), arr)
        sl, remaining = split_product(remaining, len(order))
        gsub = WeightedGraph(
            tuple(order),
            tuple(e for e in graph.edges if e[0] in comp and e[1] in comp),
        )
        out.append(
            ChainState(gsub, sl, frozenset(p for p in pairs if set(p) <= comp))
        )
        rem_vertices = rest
    last = comps[-1]
    gsub = WeightedGraph(
        tuple(v for v in rem_vertices),
        tuple(e for e in graph.edges if e[0] in last and e[1] in last),
    )
    out.append(ChainState(gsub, remaining, frozenset(p for p in pairs if set(p) <= last)))
    return out


def rez_formula(chi_bf: float, chi_bf2: float = 0.0) -> float:
    """Re z = [1 + cos chi_bf + cos chi_bf' + cos(chi_bf + chi_bf')]/4."""
    return (
        1.0 + math.cos(chi_bf) + math.cos(chi_bf2) + math.cos(chi_bf + chi_bf2)
    ) / 4.0


def _pair_members(left: ChainState, pair) -> tuple[str, str]:
    p = frozenset(_resolve_vertex(left, v) for v in pair)
    if p not in left.logical_pairs:
        raise NoLogicalPairError(f"{set(p)} is not a registered logical pair")
    a, e = sorted(p, key=left.graph.vertices.index)
    return a, e


def fuse_type_ii(
    left: ChainState, pair, right: ChainState, b, consume: str | None = None
) -> list[ProtocolOutcome]:
    """Bell-measure one logical pair member against a qubit of another chain.

    Success outcomes (<00| +/- <11|, total probability 1/2) merge the chains:
    the kept pair member e inherits the logical vertex's and b's neighbors.
    Failure outcomes are X-type with probabilities (1 -/+ Re z)/4; the
    b-side <0|-<1| branch is a good failure under Case-2 weights on b.
    """
    a, e = _pair_members(left, pair)
    if consume is not None and _resolve_vertex(left, consume) != a:
        a, e = e, a
    b = _resolve_vertex(right, b)
    if any(b in p for p in right.logical_pairs):
        raise NoLogicalPairError(f"{b} belongs to a logical pair on the right chain")

    f1, f2 = _branch_states(left.state, left.qubit(a))
    f3, f4 = _branch_states(right.state, right.qubit(b))
    z = complex(np.vdot(f4.amplitudes, f3.amplitudes))  # branch states are unit vectors
    nbs = right.graph.neighbors(b)
    if len(nbs) <= 2:
        chis = [w for _, w in nbs] + [0.0] * (2 - len(nbs))
        expect = rez_formula(chis[0], chis[1])
        if abs(z.real - expect) > 1e-10:
            raise NumericalAbortError(
                f"Re z mismatch: numeric {z.real}, formula {expect}"
            )

    lg = left.graph.without_vertex(a)
    rg = right.graph.without_vertex(b)
    # e inherits the logical vertex's edges (already on a and e) plus b's edges
    extra = tuple((e, v, w) for v, w in right.graph.neighbors(b))
    moved = tuple(
        (e if x == a else x, e if y == a else y, w)
        for x, y, w in left.graph.edges
        if a in (x, y)
    )
    merged = WeightedGraph(lg.vertices + rg.vertices, lg.edges + moved + rg.edges + extra)
    pairs_left = frozenset(p for p in left.logical_pairs if a not in p)

    out: list[ProtocolOutcome] = []
    for sign, label in ((+1.0, "success_plus"), (-1.0, "success_minus")):
        vec = (
            np.kron(f1.amplitudes, f3.amplitudes)
            + sign * np.kron(f2.amplitudes, f4.amplitudes)
        ) / (2.0 * math.sqrt(2.0))
        prob = float(np.vdot(vec, vec).real)
        st = PureState(merged.n, vec / math.sqrt(prob))
        corr: list[Correction] = []
        if sign < 0:
            corr.append(Correction(e, "Z", PAULI_Z))
            st = apply_local(st, LocalGate(merged.vertex_index(e), PAULI_Z))
        # geometries with extra surviving edges merge into a non-path graph
        try:
            post = ChainState(merged, st, pairs_left | right.logical_pairs)
        except InvalidGraphError:
            post = ChainState(
                merged, st, pairs_left | right.logical_pairs, validate=False
            )
        out.append(ProtocolOutcome(label, prob, [post], corr))

    # failures: X-type product projections; left side always collapses the
    # pair into a plain vertex e carrying the logical vertex's edges.
    left_graph = WeightedGraph(lg.vertices, lg.edges + moved)
    for sa, sb, label in ((+1, -1, "failure_b_minus"), (-1, +1, "failure_b_plus")):
        vl = (f1.amplitudes + sa * f2.amplitudes) / 2.0
        vr = (f3.amplitudes + sb * f4.amplitudes) / 2.0
        prob = float(np.vdot(vl, vl).real * np.vdot(vr, vr).real)
        if prob < 1e-14:
            out.append(ProtocolOutcome(label, prob, [], [], False))
            continue
        sl = PureState(left_graph.n, vl / np.linalg.norm(vl))
        corr: list[Correction] = []
        if sa < 0:
            corr.append(Correction(e, "Z", PAULI_Z))
            sl = apply_local(sl, LocalGate(left_graph.vertex_index(e), PAULI_Z))
        post_l = ChainState(left_graph, sl, pairs_left)
        post_r, good, corr_r = _classify_right_failure(right, b, sb)
        out.append(
            ProtocolOutcome(label, prob, [post_l, post_r], corr + corr_r, good)
        )
    return out


def _classify_right_failure(
    right: ChainState, b: str, sb: int
) -> tuple[ChainState, bool, list[Correction]]:
    """Project b onto (<0| + sb <1|)/sqrt2 and decide if the residual is good.

    Good means: after the prescribed X-like corrections the residual is a
    valid weighted chain with a new logical pair (requires b interior and the
    matching eligibility case). Verified numerically, not just by weights.
    """
    nbs = sorted(right.graph.neighbors(b), key=lambda t: right.graph.vertices.index(t[0]))
    bra = (1.0, float(sb))
    if len(nbs) == 2:
        (b1, chi1), (b2, chi2) = nbs
        case = _xlike_case(chi1, chi2)
        want = None
        if sb < 0:
            # <0| - <1| is the Case-2 bra (B = -A)
            want = "case2" if case in ("case1", "case2") and abs(wrap_angle(chi1 + chi2)) < WEIGHT_TOL else None
        else:
            # <0| + <1| is the Case-1 bra only at chi = pi (B = -A e^{i pi} = A)
            want = (
                "case1"
                if abs(wrap_angle(chi1 - math.pi)) < WEIGHT_TOL
                and abs(wrap_angle(chi2 - math.pi)) < WEIGHT_TOL
                else None
            )
        if want is not None:
            outcome = _xlike_branch(right, b, b1, b2, bra, want, "good")
            post = outcome.post_states[0]
            try:
                post.check_invariants()
                return post, True, outcome.corrections_applied
            except InvalidGraphError:
                pass
    # not good: return the raw residual over the b-deleted register
    st, _ = _project_bra(right.state, right.qubit(b), bra)
    gg = right.graph.without_vertex(b)
    post = ChainState(gg, st, frozenset(), validate=False)
    return post, False, []


def fuse_generalized(
    left: ChainState, pair, right: ChainState, b, u: ModeUnitary, consume: str | None = None
) -> tuple[FusionContext, list[FusionOutcome]]:
    """Generalized fusion through an arbitrary mode unitary.

    Builds the FusionContext from the chains (f1 = |0>_e phi_L etc.) and
    delegates to the fock layer; returns the context (for analysis hooks)
    plus the full outcome list.
    """
    a, e = _pair_members(left, pair)
    if consume is not None and _resolve_vertex(left, consume) != a:
        a, e = e, a
    b = _resolve_vertex(right, b)
    f1, f2 = _branch_states(left.state, left.qubit(a))
    f3, f4 = _branch_states(right.state, right.qubit(b))
    ctx = FusionContext(
        _as_normalized(f1), _as_normalized(f2), _as_normalized(f3), _as_normalized(f4)
    )
    return ctx, enumerate_outcomes(ctx, u)


def _ghz_state(chi1: float, chi2: float) -> PureState:
    return build_state(chain_graph(["b1", "a", "b2"], [chi1, chi2]))


def weighted_pair_state(phi: float) -> PureState:
    """2-vertex weighted graph state; phi = 0 means no edge (|++>)."""
    if abs(wrap_angle(phi)) < 1e-12:
        return build_state(WeightedGraph(("b1", "b2"), ()))
    return build_state(chain_graph(["b1", "b2"], [phi]))


def local_equivalent_2q(
    candidate: PureState, target: PureState
) -> tuple[np.ndarray, np.ndarray] | None:
    """Single-qubit unitaries (A, B) with (A x B)|candidate> = |target>, or None.

    Two 2-qubit pure states are local-unitary equivalent iff their Schmidt
    spectra agree; the rotations come straight out of the two SVDs.
    """
    mc = candidate.amplitudes.reshape(2, 2)
    mt = target.amplitudes.reshape(2, 2)
    uc, sc, vhc = np.linalg.svd(mc)
    ut, st, vht = np.linalg.svd(mt)
    if np.max(np.abs(sc - st)) > 1e-9:
        return None
    a = ut @ uc.conj().T
    b = (vhc.conj().T @ vht).T
    # verify exactly; degenerate Schmidt spectra may need no more than this
    out = (a @ mc @ b.T).reshape(-1)
    if np.max(np.abs(out - mt.reshape(-1))) > 1e-9:
        return None
    return a, b


def match_weighted_pair(state: PureState) -> tuple[float, list[Correction]] | None:
    """Restricted correction search: match a 2-qubit state to a weighted pair.

    The Schmidt spectrum fixes |det M| = |1 - e^{-i phi}|/4, hence |phi|; the
    matching single-qubit rotations are built constructively. Returns
    (phi >= 0, corrections) or None.
    """
    if state.num_qubits != 2:
        return None
    det = abs(np.linalg.det(state.amplitudes.reshape(2, 2)))
    phi = math.acos(max(-1.0, min(1.0, 1.0 - 8.0 * det * det)))
    target = weighted_pair_state(phi)
    rot = local_equivalent_2q(state, target)
    if rot is None:
        return None
    corr = [
        Correction("pair0", "local-unitary", rot[0]),
        Correction("pair1", "local-unitary", rot[1]),
    ]
    return phi, corr


def ghz_pair_projection(
    chi1: float, chi2: float, mag_a: float
) -> tuple[tuple[QubitProjection, QubitProjection], float]:
    """Measurement basis on the middle GHZ qubit yielding a weighted pair.

    Returns ((projection, complement), phi) where both outcomes produce the
    2-qubit weighted graph state with the same weight phi (up to diagonal
    local corrections), with arg B = arg A + (chi1 + chi2 + pi)/2 and
    phi = +/- arccos(1 - 2|A|^2|B|^2 (1-cos chi1)(1-cos chi2)).
    """
    if not (0.0 <= mag_a <= 1.0):
        raise NotAchievableError("|A| must lie in [0, 1]")
    mag_b = math.sqrt(max(0.0, 1.0 - mag_a * mag_a))
    arg_b = (chi1 + chi2 + math.pi) / 2.0
    bra_a, bra_b = complex(mag_a), mag_b * cmath.exp(1j * arg_b)
    # QubitProjection applies conj(alpha)<0| + conj(beta)<1|: pass conjugates
    proj = QubitProjection(1, (np.conj(bra_a), np.conj(bra_b)))
    comp = QubitProjection(1, (bra_b, -bra_a))  # bra (B*, -A*)
    phi_mag = math.acos(
        max(
            -1.0,
            min(
                1.0,
                1.0
                - 2.0
                * mag_a**2
                * mag_b**2
                * (1.0 - math.cos(chi1))
                * (1.0 - math.cos(chi2)),
            ),
        )
    )
    # verify both outcomes by direct 3-qubit simulation: each must be
    # local-unitary matchable to the weighted pair with the SAME phi
    ghz = _ghz_state(chi1, chi2)
    target = weighted_pair_state(phi_mag)
    checked = 0
    for p in (proj, comp):
        st, prob = project_qubit(ghz, p, allow_zero=True)
        if st is None:
            continue  # zero-probability outcome (poles |A| in {0,1})
        if local_equivalent_2q(st, target) is None:
            raise NotAchievableError(
                "simulated outcome is not the weighted pair the formula predicts"
            )
        checked += 1
    if checked == 0:
        raise NotAchievableError("no realizable outcome")
    return (proj, comp), phi_mag


def ghz_pair_range(chi1: float, chi2: float) -> float:
    """Maximum |phi| reachable: arccos(1 - (1-cos chi1)(1-cos chi2)/2)."""
    val = 1.0 - 0.5 * (1.0 - math.cos(chi1)) * (1.0 - math.cos(chi2))
    return math.acos(max(-1.0, min(1.0, val)))


def ghz_pair_for_target(
    chi1: float, chi2: float, phi_target: float
) -> tuple[QubitProjection, QubitProjection]:
    """Invert the phi formula for |A| (closed form); errors outside range."""
    denom = (1.0 - math.cos(chi1)) * (1.0 - math.cos(chi2))
    if denom < 1e-14:
        if abs(wrap_angle(phi_target)) < 1e-12:
            return ghz_pair_projection(chi1, chi2, 0.0)[0]
        raise NotAchievableError("a zero-weight edge forces phi = 0")
    t = (1.0 - math.cos(phi_target)) / (2.0 * denom)
    if t > 0.25 + 1e-12:
        raise NotAchievableError(
            f"|phi_target| exceeds the range cap {ghz_pair_range(chi1, chi2):.6f}"
        )
    mag_a = math.sqrt((1.0 - math.sqrt(max(0.0, 1.0 - 4.0 * t))) / 2.0)
    projs, phi = ghz_pair_projection(chi1, chi2, mag_a)
    if abs(abs(wrap_angle(phi)) - abs(wrap_angle(phi_target))) > 1e-9:
        raise NotAchievableError("inversion check failed")
    return projs


def sample_outcomes(outcomes: list, n: int, seed: int) -> list[str]:
    """Monte Carlo mode: draw n outcome labels with the injected seed."""
    rng = np.random.default_rng(seed)
    probs = np.array(
        [getattr(o, "probability") for o in outcomes], dtype=float
    )
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    labels = [
        getattr(o, "label", None) or str(getattr(o, "pattern")) for o in outcomes
    ]
    idx = rng.choice(len(outcomes), size=n, p=probs)
    return [labels[i] for i in idx]
