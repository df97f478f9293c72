from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from wgfusion.analysis import (
    TwoQubitProjection,
    check_no_good_failure,
    classify_projection,
    entanglement_report,
    hyperbola_projection,
    inner_z,
    max_entangled_conditions_residual,
    max_entangled_family,
    pair_weight_from_projection,
    resulting_weight,
    solve_xi_for_weight,
    tef_unitarity,
    xlike_uniqueness_scan,
    ylike_impossibility_scan,
)
from wgfusion.errors import (
    BadSeedError,
    DegenerateArgumentError,
    DegenerateGramError,
    InputError,
)
from wgfusion.fock import type_i_matrix, type_ii_matrix
from wgfusion.graphstate import build_state, chain_graph, wrap_angle

RNG = np.random.default_rng(17)
ISQ2 = 1.0 / math.sqrt(2.0)


def _rand_proj(rng) -> TwoQubitProjection:
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    v /= np.linalg.norm(v)
    return TwoQubitProjection(*v)


# ------------------------------------------------------------- inner_z


def test_inner_z_examples():
    assert inner_z(math.pi) == pytest.approx(0.0, abs=1e-15)
    assert inner_z(0.0) == pytest.approx(1.0, abs=1e-15)
    assert inner_z(math.pi / 2, math.pi / 2) == pytest.approx(0.5j, abs=1e-15)


# ------------------------------------------------- entanglement report


def test_report_bell_and_rank1():
    bell = np.eye(2) / math.sqrt(2.0)
    r = entanglement_report(bell, 0.0)
    assert r.det_rho == pytest.approx(0.25, abs=1e-12)
    assert r.entropy_bits == pytest.approx(1.0, abs=1e-12)
    flat = np.full((2, 2), 0.5)
    r0 = entanglement_report(flat, 0.0)
    assert r0.det_rho == pytest.approx(0.0, abs=1e-12)
    assert r0.entropy_bits == pytest.approx(0.0, abs=1e-12)


def test_report_degenerate_gram_rejected():
    with pytest.raises(DegenerateGramError):
        entanglement_report(np.eye(2) / math.sqrt(2.0), 1.0)


def test_report_left_phase_invariance():
    # multiplying rows by phases changes neither probability nor entropy
    for k in range(10):
        rng = np.random.default_rng(200 + k)
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        z = 0.3 * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
        ph = np.diag(np.exp(1j * rng.uniform(-math.pi, math.pi, 2)))
        r1 = entanglement_report(m, z)
        r2 = entanglement_report(ph @ m, z)
        assert r2.det_rho == pytest.approx(r1.det_rho, abs=1e-12)
        assert r2.probability == pytest.approx(r1.probability, abs=1e-12)


def test_report_z_zero_reduces_to_plain_norm():
    m = np.array([[0.3, 0.5j], [-0.4, 0.2 + 0.1j]])
    r = entanglement_report(m, 0.0)
    nsq = float(np.sum(np.abs(m) ** 2))
    assert r.probability == pytest.approx(nsq / 4.0, abs=1e-14)
    assert r.det_rho == pytest.approx(
        abs(np.linalg.det(m)) ** 2 / nsq**2, abs=1e-14
    )


# --------------------------------------------------- resulting weight


def test_resulting_weight_fused_case():
    # B = C = 0 leaves the b-f weight on the new e-f edge (conjugated pair)
    p = TwoQubitProjection(ISQ2, 0.0, 0.0, ISQ2)
    assert resulting_weight(p, 1.3) == pytest.approx(-1.3, abs=1e-12)


def test_resulting_weight_degenerate_argument():
    p = TwoQubitProjection(0.5, -0.5, 0.5, 0.5)
    with pytest.raises(DegenerateArgumentError):
        resulting_weight(p, 1.0)  # A + B = 0


def test_resulting_weight_two_angle_family():
    # (A,B) = e^{i t1}(cos f1, i sin f1)/sqrt2, (C,D) = e^{i t2}(i sin f2, cos f2)/sqrt2
    # at chi_bf = pi produces chi = 2(f1 - f2) + pi
    for (f1, f2, t1, t2) in ((0.3, 0.9, 0.2, -1.1), (-0.7, 0.25, 1.9, 0.4)):
        p = TwoQubitProjection(
            cmath.exp(1j * t1) * math.cos(f1) * ISQ2,
            cmath.exp(1j * t1) * 1j * math.sin(f1) * ISQ2,
            cmath.exp(1j * t2) * 1j * math.sin(f2) * ISQ2,
            cmath.exp(1j * t2) * math.cos(f2) * ISQ2,
        )
        assert tef_unitarity(p.a, p.b, p.c, p.d, math.pi)
        expect = wrap_angle(2.0 * (f1 - f2) + math.pi)
        assert resulting_weight(p, math.pi) == pytest.approx(expect, abs=1e-12)


# ------------------------------------------------------ tef unitarity


def test_tef_unitarity_examples():
    assert tef_unitarity(ISQ2, 0.0, 0.0, ISQ2, 0.9)
    assert not tef_unitarity(0.9, 0.1, 0.1, 0.4, 0.9)
    with pytest.raises(DegenerateArgumentError):
        tef_unitarity(ISQ2, 0.0, 0.0, ISQ2, 0.0)


def test_tef_dual_formulations_agree_on_random_samples():
    # direct magnitude test and argument/magnitude form must never disagree
    rng = np.random.default_rng(99)
    hits = 0
    for _ in range(20000):
        p = _rand_proj(rng)
        chi = rng.uniform(-math.pi, math.pi)
        if abs(chi) < 1e-6:
            continue
        if tef_unitarity(p.a, p.b, p.c, p.d, chi):  # raises on disagreement
            hits += 1
    assert hits < 50  # random points almost never satisfy the conditions


def test_tef_unitarity_on_solution_family():
    rng = np.random.default_rng(5)
    for _ in range(50):
        chi = rng.uniform(0.1, math.pi - 0.1) * rng.choice([-1, 1])
        xi = rng.choice([-1, 1]) * math.exp(rng.uniform(-2, 2))
        p = hyperbola_projection(chi, xi, rng.uniform(0.2, 0.9))
        assert tef_unitarity(p.a, p.b, p.c, p.d, chi)


# ------------------------------------------------------ classification


def test_classify_precedence_order():
    chi = 1.1
    fused = classify_projection(TwoQubitProjection(ISQ2, 0, 0, ISQ2 * 1j), chi)
    assert fused.tag == "fused_weighted_graph"

    xi = solve_xi_for_weight(chi, 0.7)
    nw = classify_projection(hyperbola_projection(chi, xi), chi)
    assert nw.tag == "weighted_graph_new_weight"
    assert nw.chi == pytest.approx(0.7, abs=1e-9)

    prod = classify_projection(TwoQubitProjection(0.5, 0.5, 0.5, 0.5), chi)
    assert prod.tag == "product"


def test_classify_maximally_entangled_family():
    chi = 0.8
    z = inner_z(chi)
    seed = unitary_group.rvs(2, random_state=12) / math.sqrt(2.0)
    p = max_entangled_family(seed, z)
    out = classify_projection(p, chi)
    assert out.tag in ("maximally_entangled", "weighted_graph_new_weight")
    # the family satisfies the closed-form conditions exactly
    assert max_entangled_conditions_residual(p, z) < 1e-12


def test_maximal_entanglement_does_not_imply_fused():
    # an X-like maximally entangled projection that is not of the fused form:
    # A, D = cos(f)/sqrt2 and B, C = i sin(f)/sqrt2 give a maximally
    # entangled outcome at z = 0 for every f, yet B, C != 0
    f = 0.6
    p = TwoQubitProjection(
        math.cos(f) * ISQ2, 1j * math.sin(f) * ISQ2,
        1j * math.sin(f) * ISQ2, math.cos(f) * ISQ2,
    )
    r = entanglement_report(p.matrix, 0.0)
    assert r.det_rho == pytest.approx(0.25, abs=1e-12)
    out = classify_projection(p, math.pi)  # chi_bf = pi gives z = 0
    assert out.tag != "fused_weighted_graph"


# ----------------------------------------------------------- xi family


def test_solve_xi_random_targets():
    rng = np.random.default_rng(31)
    for _ in range(100):
        chi = rng.uniform(0.05, math.pi - 0.05) * rng.choice([-1, 1])
        target = rng.uniform(-math.pi, math.pi)
        xi = solve_xi_for_weight(chi, target)
        p = hyperbola_projection(chi, xi)
        assert resulting_weight(p, chi) == pytest.approx(
            wrap_angle(target), abs=1e-9
        )


def test_solve_xi_rejects_zero_weight():
    with pytest.raises(DegenerateArgumentError):
        solve_xi_for_weight(0.0, 1.0)


def test_hyperbola_projection_end_to_end():
    # apply the bra to (Bell pair) x (2-chain) and confirm the residual pair
    chi, target = 1.3, -0.9
    xi = solve_xi_for_weight(chi, target)
    p = hyperbola_projection(chi, xi)
    pair = np.zeros(4, dtype=complex)
    pair[0] = pair[3] = ISQ2
    right = build_state(chain_graph(["b", "f"], [chi])).amplitudes
    joint = np.kron(pair, right).reshape(2, 2, 2, 2)
    res = np.einsum("eabf,ab->ef", joint, p.matrix)
    res /= np.linalg.norm(res)
    # Schmidt spectrum matches a weighted pair with |det| = |1-e^{-i target}|/4
    s = np.linalg.svd(res, compute_uv=False)
    assert s[0] * s[1] == pytest.approx(
        abs(1.0 - cmath.exp(-1j * target)) / 4.0, abs=1e-10
    )


# --------------------------------------------- maximally entangled family


def test_family_z_zero_returns_seed():
    seed = np.array([[1.0, 1.0], [1.0, -1.0]]) / 2.0
    p = max_entangled_family(seed, 0.0)
    assert np.allclose(p.matrix, seed, atol=1e-14)


def test_family_bell_seed_nonzero_z():
    seed = np.eye(2) / math.sqrt(2.0)
    p = max_entangled_family(seed, 0.5)
    r = entanglement_report(p.matrix, 0.5)
    assert r.det_rho == pytest.approx(0.25, abs=1e-12)
    assert r.entropy_bits == pytest.approx(1.0, abs=1e-12)


def test_family_rejects_bad_seed():
    with pytest.raises(BadSeedError):
        max_entangled_family(np.eye(2), 0.3)
    with pytest.raises(DegenerateGramError):
        max_entangled_family(np.eye(2) / math.sqrt(2.0), 1.0)


# ----------------------------------------------------- no good failure


def test_no_good_failure_on_fusion_networks():
    r1 = check_no_good_failure(type_i_matrix())
    assert r1["premise_holds"]
    assert r1["conclusion_holds"]
    assert r1["max_relevant_det"] < 1e-12
    # the type-II network violates the premise, so nothing is claimed
    r2 = check_no_good_failure(type_ii_matrix())
    assert not r2["premise_holds"]
    assert r2["conclusion_holds"] is None


# ----------------------------------------------------------- pair weight


def test_pair_weight_pi_over_2_chain():
    phi, equal = pair_weight_from_projection(ISQ2, ISQ2, math.pi / 2, math.pi / 2)
    assert phi == pytest.approx(math.pi / 3, abs=1e-12)
    assert equal


def test_pair_weight_requires_normalized_bra():
    with pytest.raises(InputError):
        pair_weight_from_projection(1.0, 1.0, 1.0, 1.0)


def test_pair_weight_matches_simulation():
    rng = np.random.default_rng(77)
    for _ in range(30):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        chi1, chi2 = rng.uniform(0.2, math.pi - 0.2, 2)
        phi, _ = pair_weight_from_projection(v[0], v[1], chi1, chi2)
        st = build_state(chain_graph(["a", "b", "c"], [chi1, chi2])).amplitudes
        res = np.einsum("abc,b->ac", st.reshape(2, 2, 2), v)
        res /= np.linalg.norm(res)
        s = np.linalg.svd(res, compute_uv=False)
        assert s[0] * s[1] == pytest.approx(
            abs(1.0 - cmath.exp(-1j * phi)) / 4.0, abs=1e-10
        )


# ----------------------------------------------------------------- scans


def test_xlike_scan_small_resolution():
    r = xlike_uniqueness_scan(resolution=40)
    assert r["outliers"] == []
    assert r["solutions"] > 0
    assert sum(r["counts"].values()) == r["solutions"]


def test_ylike_scan_small_resolution():
    r = ylike_impossibility_scan(resolution=40)
    assert r["outliers"] == []
    assert r["at_pi"] == r["solutions"] > 0
