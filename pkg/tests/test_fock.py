from __future__ import annotations

import json
import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from wgfusion.errors import InvalidContextError, InvalidUnitaryError
from wgfusion.fock import (
    FusionContext,
    ModeUnitary,
    enumerate_outcomes,
    oracle_enumerate,
    outcome_coeffs,
    reduced_det_rho,
    relevant_norm_sq,
    same_detector_prob,
    type_i_marginal,
    type_i_matrix,
    type_ii_matrix,
)
from wgfusion.graphstate import PureState, build_state, chain_graph

RNG = np.random.default_rng(3)


def _unit(n: int, rng) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def _random_context(rng, left_qubits=2, right_qubits=2) -> FusionContext:
    # f1 perpendicular to f2 (logical-pair branches); f3, f4 arbitrary units
    f1 = _unit(1 << left_qubits, rng)
    raw = _unit(1 << left_qubits, rng)
    f2 = raw - np.vdot(f1, raw) * f1
    f2 /= np.linalg.norm(f2)
    f3 = _unit(1 << right_qubits, rng)
    f4 = _unit(1 << right_qubits, rng)
    return FusionContext(
        PureState(left_qubits, f1),
        PureState(left_qubits, f2),
        PureState(right_qubits, f3),
        PureState(right_qubits, f4),
    )


def test_mode_unitary_validation():
    with pytest.raises(InvalidUnitaryError):
        ModeUnitary(np.ones((4, 4)))
    with pytest.raises(InvalidUnitaryError):
        ModeUnitary(np.eye(3))  # at least 4 modes


def test_mode_unitary_json_roundtrip():
    u = ModeUnitary(unitary_group.rvs(5, random_state=1))
    u2 = ModeUnitary.from_json(u.to_json())
    assert np.allclose(u.matrix, u2.matrix)
    data = json.loads(u.to_json())
    assert data["n"] == 5


def test_context_requires_orthogonal_left_branches():
    f = PureState(1, np.array([1.0, 0.0]))
    with pytest.raises(InvalidContextError):
        FusionContext(f, f, f, f)


def test_fusion_matrices_are_unitary():
    for u in (type_i_matrix(), type_ii_matrix()):
        m = u.matrix
        assert np.allclose(m @ m.conj().T, np.eye(4), atol=1e-12)


def test_completeness_analytic_and_oracle():
    for k in range(5):
        rng = np.random.default_rng(100 + k)
        ctx = _random_context(rng)
        u = ModeUnitary(unitary_group.rvs(4 + k, random_state=rng))
        pa = sum(o.probability for o in enumerate_outcomes(ctx, u))
        po = sum(o.probability for o in oracle_enumerate(ctx, u))
        assert pa == pytest.approx(1.0, abs=1e-12)
        assert po == pytest.approx(1.0, abs=1e-12)


def test_analytic_matches_oracle_per_pattern():
    rng = np.random.default_rng(42)
    ctx = _random_context(rng)
    u = ModeUnitary(unitary_group.rvs(6, random_state=rng))
    ana = {o.pattern: o for o in enumerate_outcomes(ctx, u)}
    orc = {o.pattern: o for o in oracle_enumerate(ctx, u)}
    assert set(ana) == set(orc)
    for pat, o in ana.items():
        assert o.probability == pytest.approx(orc[pat].probability, abs=1e-12)
        if o.register_state is not None and orc[pat].register_state is not None:
            fid = abs(
                np.vdot(o.register_state.amplitudes, orc[pat].register_state.amplitudes)
            )
            assert fid == pytest.approx(1.0, abs=1e-10)


def test_same_detector_probability_formula():
    # the bosonic 1/2 in p_ii is what makes the distribution complete
    rng = np.random.default_rng(5)
    ctx = _random_context(rng)
    u = ModeUnitary(unitary_group.rvs(4, random_state=rng))
    orc = {o.pattern: o.probability for o in oracle_enumerate(ctx, u)}
    z = ctx.z
    for i in range(4):
        assert same_detector_prob(u.matrix, i, z) == pytest.approx(
            orc[(i, i)], abs=1e-12
        )


def test_relevant_norm_z_dependence():
    u = unitary_group.rvs(4, random_state=11)
    a, b, c, d = outcome_coeffs(u, 0, 2)
    n0 = relevant_norm_sq(a, b, c, d, 0.0)
    expect = abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2 + abs(d) ** 2
    assert n0 == pytest.approx(expect, abs=1e-12)
    z = 0.3 + 0.2j
    shift = 2 * (z * a * np.conj(b)).real + 2 * (z * c * np.conj(d)).real
    assert relevant_norm_sq(a, b, c, d, z) == pytest.approx(n0 + shift, abs=1e-12)


def test_reduced_det_rho_oracle_on_bell_register():
    # Bell-shaped register across the cut: det rho = 1/4
    amps = np.zeros(4, dtype=complex)
    amps[0] = amps[3] = 1 / math.sqrt(2)
    from wgfusion.fock import FusionOutcome

    o = FusionOutcome((0, 1), 0.25, PureState(2, amps), "relevant")
    assert reduced_det_rho(o, 1) == pytest.approx(0.25, abs=1e-12)


def _chain_context(wl: float, wr: float) -> FusionContext:
    """f1, f2 = endpoint branches of a 2-chain; perpendicular by construction
    via a logical-pair-like left side (|0>f1, |1>f2 with orthogonal markers)."""
    left = build_state(chain_graph(["x", "a"], [wl])).reshaped()
    f1 = PureState(1, left[:, 0] * math.sqrt(2))
    f2 = PureState(1, left[:, 1] * math.sqrt(2))
    # make them orthogonal by tagging with an extra qubit (pair branch picture)
    v1 = np.kron(np.array([1.0, 0.0]), f1.amplitudes)
    v2 = np.kron(np.array([0.0, 1.0]), f2.amplitudes)
    right = build_state(chain_graph(["b", "y"], [wr])).reshaped()
    g3 = PureState(1, right[0] * math.sqrt(2))
    g4 = PureState(1, right[1] * math.sqrt(2))
    return FusionContext(PureState(2, v1), PureState(2, v2), g3, g4)


def test_gram_overlap_matches_weight_formula():
    ctx = _chain_context(0.8, 1.1)
    expect = (1 + np.exp(1.1j)) / 4 * 2  # single neighbor: (1+e^{i chi})/2
    assert ctx.z == pytest.approx(expect, abs=1e-12)


def test_type_i_marginal_distribution():
    ctx = _chain_context(0.9, -1.4)
    outs = enumerate_outcomes(ctx, type_i_matrix())
    marg = type_i_marginal(outs, ctx)
    assert marg["one_photon_d_H"][0] == pytest.approx(0.25, abs=1e-12)
    assert marg["one_photon_d_V"][0] == pytest.approx(0.25, abs=1e-12)
    assert marg["both_in_c"][0] == pytest.approx(0.25, abs=1e-12)
    assert marg["both_in_d"][0] == pytest.approx(0.25, abs=1e-12)
    # success branches carry the new dual-rail qubit coherently
    assert marg["one_photon_d_H"][1].num_qubits == 4


def test_type_i_probabilities_weight_independent():
    for (wl, wr) in ((0.3, 2.0), (math.pi, math.pi), (-1.0, 0.4)):
        ctx = _chain_context(wl, wr)
        marg = type_i_marginal(enumerate_outcomes(ctx, type_i_matrix()), ctx)
        for key in marg:
            assert marg[key][0] == pytest.approx(0.25, abs=1e-12)


def test_type_ii_cross_outcomes_are_bell():
    # cross-channel relevant outcomes of the type-II network are Bell projections
    u = type_ii_matrix().matrix
    for (i, j), sign in (((0, 2), 1), ((1, 3), 1)):
        a, b, c, d = outcome_coeffs(u, i, j)
        m = np.array([[a, b], [c, d]])
        # proportional to diag Bell: <00| + <11|
        assert abs(b) < 1e-12 and abs(c) < 1e-12
        assert a == pytest.approx(d, abs=1e-12)
    for (i, j) in ((0, 3), (1, 2)):
        # anti-diagonal Bell: <01| + <10|
        a, b, c, d = outcome_coeffs(u, i, j)
        assert abs(a) < 1e-12 and abs(d) < 1e-12
        assert abs(b) == pytest.approx(abs(c), abs=1e-12)


def test_identity_unitary_single_photon_channels():
    # identity network: no interference, photons stay in their channels;
    # every outcome pairs one a-mode with one b-mode
    ctx = _chain_context(0.5, 0.5)
    outs = enumerate_outcomes(ctx, ModeUnitary.identity(4))
    live = [o for o in outs if o.probability > 1e-12]
    assert all(o.pattern[0] in (0, 1) and o.pattern[1] in (2, 3) for o in live)
    assert sum(o.probability for o in live) == pytest.approx(1.0, abs=1e-12)
