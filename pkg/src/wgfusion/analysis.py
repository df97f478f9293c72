"""Closed-form analysis of two-qubit projections on weighted fusions.

Every closed-form quantity is computed twice: analytic formula and a dense
linear-algebra oracle; disagreement beyond 1e-10 raises NumericalAbortError.
Argument comparisons are modulo 2pi with principal value in (-pi, pi].
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadSeedError,
    ConvergenceFailureError,
    DegenerateArgumentError,
    DegenerateGramError,
    InputError,
    NumericalAbortError,
)
from .fock import ModeUnitary, outcome_coeffs, relevant_norm_sq, same_detector_prob
from .graphstate import wrap_angle

ABORT_TOL = 1e-10
INV_SQRT2 = 1.0 / math.sqrt(2.0)


def inner_z(chi_bf: float, chi_bf2: float = 0.0) -> complex:
    """Gram overlap z = <f4|f3> = (1+e^{i chi_bf})(1+e^{i chi_bf'})/4.

    A single neighbor is encoded by chi_bf2 = 0.
    """
    return (1.0 + cmath.exp(1j * chi_bf)) * (1.0 + cmath.exp(1j * chi_bf2)) / 4.0


@dataclass
class EntanglementReport:
    z: complex
    det_rho: float
    lam: float
    entropy_bits: float
    probability: float


def binary_entropy(lam: float) -> float:
    out = 0.0
    for p in (lam, 1.0 - lam):
        if p > 1e-300:
            out -= p * math.log2(p)
    return out


def _gram_factor(z: complex) -> np.ndarray:
    """Right factor turning M into M': [[1, 0], [z*, sqrt(1-|z|^2)]]."""
    return np.array(
        [[1.0, 0.0], [np.conj(z), math.sqrt(max(0.0, 1.0 - abs(z) ** 2))]],
        dtype=complex,
    )


def entanglement_report(m: np.ndarray, z: complex) -> EntanglementReport:
    """Entropy analysis of a relevant-outcome coefficient matrix m = [[a,b],[c,d]].

    det_rho = (1-|z|^2)|ad-bc|^2 / N^4 with the z-corrected normalization
    N^2 = |a|^2+|b|^2+2Re(z a b*)+|c|^2+|d|^2+2Re(z c d*); cross-checked
    against the eigenvalues of rho = M' M'+.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise InputError("m must be 2x2")
    if abs(z) >= 1.0 - 1e-12:
        raise DegenerateGramError(f"|z| = {abs(z)} too close to 1")
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    nsq = relevant_norm_sq(a, b, c, d, z)
    if nsq < 1e-28:
        raise DegenerateArgumentError("vanishing outcome norm")
    det_rho = (1.0 - abs(z) ** 2) * abs(a * d - b * c) ** 2 / nsq**2
    lam = (1.0 + math.sqrt(max(0.0, 1.0 - 4.0 * det_rho))) / 2.0
    entropy = binary_entropy(lam)
    # dense oracle: rho = M' M'+ must have eigenvalues (lam, 1-lam)
    mp = (m / math.sqrt(nsq)) @ _gram_factor(z)
    rho = mp @ mp.conj().T
    ev = np.sort(np.linalg.eigvalsh(rho))
    if abs(float(ev[0] * ev[1]) - det_rho) > ABORT_TOL or abs(float(ev[1]) - lam) > ABORT_TOL:
        raise NumericalAbortError(
            f"analytic det_rho {det_rho} disagrees with dense oracle {float(ev[0] * ev[1])}"
        )
    return EntanglementReport(z, det_rho, lam, entropy, nsq / 4.0)


@dataclass
class TwoQubitProjection:
    """Bra coefficients A<00| + B<01| + C<10| + D<11|, stored unnormalized."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if self.norm_sq < 1e-28:
            raise InputError("projection coefficients are all zero")

    @property
    def norm_sq(self) -> float:
        return float(
            abs(self.a) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2 + abs(self.d) ** 2
        )

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)


@dataclass
class OutcomeClass:
    tag: str  # fused_weighted_graph | weighted_graph_new_weight | maximally_entangled | product | other
    evidence: str
    chi: float | None = None


def resulting_weight(p: TwoQubitProjection, chi_bf: float) -> float:
    """New e-f edge weight:
    chi = arg(A+B) + arg(C+De^{-i chi_bf}) - arg(A+Be^{-i chi_bf}) - arg(C+D).
    """
    ph = cmath.exp(-1j * chi_bf)
    terms = (p.a + p.b, p.c + p.d * ph, p.a + p.b * ph, p.c + p.d)
    scale = math.sqrt(p.norm_sq)
    for t in terms:
        if abs(t) < 1e-12 * scale:
            raise DegenerateArgumentError("vanishing argument in the weight formula")
    return wrap_angle(
        cmath.phase(terms[0])
        + cmath.phase(terms[1])
        - cmath.phase(terms[2])
        - cmath.phase(terms[3])
    )


def _tef_magnitudes(p: TwoQubitProjection, chi_bf: float) -> np.ndarray:
    ph = cmath.exp(-1j * chi_bf)
    return np.array(
        [abs(p.a + p.b), abs(p.a + p.b * ph), abs(p.c + p.d), abs(p.c + p.d * ph)]
    )


def _tef_arg_form(p: TwoQubitProjection, chi_bf: float, tol: float) -> bool:
    """Equivalent argument/magnitude formulation of the unitarity conditions.

    arg B - arg A and arg D - arg C must equal chi_bf/2 modulo pi, and the
    magnitude balance |A|^2+|B|^2 +/- 2|A||B|cos(chi_bf/2) must match the
    C,D side (sign + exactly when the argument difference is chi_bf/2).
    """
    scale = p.norm_sq

    def side(x: complex, y: complex) -> tuple[float, float]:
        if abs(x) * abs(y) < 1e-14 * scale:
            return 0.0, abs(x) ** 2 + abs(y) ** 2
        d = wrap_angle(cmath.phase(y) - cmath.phase(x) - chi_bf / 2.0)
        dd = math.remainder(d, math.pi)
        shifted = abs(wrap_angle(d - dd)) > 1e-6  # a pi shift was removed
        sign = -1.0 if shifted else 1.0
        val = (
            abs(x) ** 2
            + abs(y) ** 2
            + 2.0 * sign * abs(x) * abs(y) * math.cos(chi_bf / 2.0)
        )
        return abs(dd), val

    r1, v1 = side(p.a, p.b)
    r2, v2 = side(p.c, p.d)
    return max(r1, r2, abs(v1 - v2) / scale) < tol


def tef_unitarity(
    a: complex, b: complex, c: complex, d: complex, chi_bf: float, tol: float = 1e-10
) -> bool:
    """True iff the effective e-f transfer matrix is proportional to a unitary:
    |A+B| = |A+Be^{-i chi_bf}| = |C+D| = |C+De^{-i chi_bf}|.

    Evaluated both directly and through the argument/magnitude formulation;
    the two must agree.
    """
    if abs(wrap_angle(chi_bf)) < 1e-12:
        raise DegenerateArgumentError("chi_bf must be nonzero")
    p = TwoQubitProjection(a, b, c, d)
    mags = _tef_magnitudes(p, chi_bf)
    scale = math.sqrt(p.norm_sq)
    direct = float(mags.max() - mags.min()) < tol * scale
    viaargs = _tef_arg_form(p, chi_bf, math.sqrt(tol))
    if direct != viaargs:
        # borderline points may fall between the two formulations' tolerances
        spread = float(mags.max() - mags.min()) / scale
        if spread < 1e-6 or spread > 1e-12:
            raise NumericalAbortError(
                f"unitarity formulations disagree (magnitude spread {spread})"
            )
    return direct


def classify_projection(
    p: TwoQubitProjection,
    chi_bf: float,
    neighbor_count: int = 1,
    chi_bf2: float = 0.0,
) -> OutcomeClass:
    """Ordered classification of a relevant-outcome projection.

    Precedence: fused > new-weight > maximally-entangled > product > other.
    neighbor_count is the fused qubit's neighbor count on the right chain;
    chi_bf2 is its second edge weight (ignored when neighbor_count = 1).
    """
    scale = math.sqrt(p.norm_sq)
    if (
        abs(p.b) < 1e-9 * scale
        and abs(p.c) < 1e-9 * scale
        and abs(abs(p.a) - abs(p.d)) < 1e-9 * scale
    ):
        return OutcomeClass("fused_weighted_graph", "B=C=0 and |A|=|D|")
    if neighbor_count == 1 and abs(wrap_angle(chi_bf)) > 1e-12:
        try:
            if tef_unitarity(p.a, p.b, p.c, p.d, chi_bf):
                chi = resulting_weight(p, chi_bf)
                return OutcomeClass(
                    "weighted_graph_new_weight", "T_{e,f} unitarity conditions", chi
                )
        except (DegenerateArgumentError, NumericalAbortError):
            pass
    z = inner_z(chi_bf, chi_bf2 if neighbor_count == 2 else 0.0)
    if abs(z) < 1.0 - 1e-12:
        m = p.matrix
        nsq = relevant_norm_sq(p.a, p.b, p.c, p.d, z)
        if nsq > 1e-20 * p.norm_sq:
            mp = (m / math.sqrt(nsq)) @ _gram_factor(z)
            if np.max(np.abs(mp @ mp.conj().T - 0.5 * np.eye(2))) < 1e-9:
                return OutcomeClass("maximally_entangled", "M' proportional to unitary")
    if abs(p.a * p.d - p.b * p.c) < 1e-12 * p.norm_sq:
        return OutcomeClass("product", "det = 0")
    return OutcomeClass("other", "no condition set fired")


def _hyperbola_arg(xi: float, chi_bf: float) -> float:
    w = xi * cmath.exp(1j * chi_bf / 2.0)
    return cmath.phase(2.0 + w + 1.0 / w)


def solve_xi_for_weight(chi_bf: float, chi_target: float, tol: float = 1e-12) -> float:
    """Real xi != 0 with 2 arg(2 + w + 1/w) = chi_target, w = xi e^{i chi_bf/2}.

    The left branch (xi < 0) sweeps arg monotonically over
    (chi_bf/2 - pi, pi - chi_bf/2); the right branch (xi > 0) covers
    (-|chi_bf|/2, |chi_bf|/2). Bisection on log|xi|.
    """
    from scipy.optimize import brentq

    if abs(wrap_angle(chi_bf)) < 1e-12:
        raise DegenerateArgumentError("chi_bf must be nonzero")
    half = wrap_angle(chi_target) / 2.0
    s_lo, s_hi = -36.0, 36.0
    for branch_sign in (-1.0, 1.0):
        # candidate arg targets equal to chi_target/2 modulo pi
        for h in (half, half - math.pi, half + math.pi):

            def f(s: float) -> float:
                return _hyperbola_arg(branch_sign * math.exp(s), chi_bf) - h

            flo, fhi = f(s_lo), f(s_hi)
            if flo == 0.0:
                return branch_sign * math.exp(s_lo)
            if flo * fhi > 0.0:
                continue
            s = brentq(f, s_lo, s_hi, xtol=1e-15, rtol=8.9e-16)
            xi = branch_sign * math.exp(s)
            res = abs(wrap_angle(2.0 * _hyperbola_arg(xi, chi_bf) - chi_target))
            if res < 1e-9:
                return xi
    raise ConvergenceFailureError(
        f"no xi on either branch (log|xi| bracket [{s_lo}, {s_hi}]) reaches "
        f"chi_target {chi_target} for chi_bf {chi_bf}"
    )


def hyperbola_projection(chi_bf: float, xi: float, mag_a: float = INV_SQRT2) -> TwoQubitProjection:
    """The xi-family projection: B = xi e^{i chi_bf/2} A, D = e^{i chi_bf/2} C / xi,
    with |C| = |xi||A| so the unitarity balance holds."""
    a = complex(mag_a)
    b = xi * cmath.exp(1j * chi_bf / 2.0) * a
    c = complex(abs(xi) * mag_a)
    d = cmath.exp(1j * chi_bf / 2.0) * c / xi
    return TwoQubitProjection(a, b, c, d)


def max_entangled_family(seed: np.ndarray, z: complex) -> TwoQubitProjection:
    """Maximally entangled projection family from a (1/sqrt2)-unitary seed.

    A = A' - z* B'/sqrt(1-|z|^2), B = B'/sqrt(1-|z|^2), and likewise (C, D).
    """
    seed = np.asarray(seed, dtype=complex)
    if seed.shape != (2, 2) or np.max(
        np.abs(seed @ seed.conj().T - 0.5 * np.eye(2))
    ) > 1e-10:
        raise BadSeedError("seed must be (1/sqrt2)-unitary")
    if abs(z) >= 1.0 - 1e-12:
        raise DegenerateGramError(f"|z| = {abs(z)} too close to 1")
    root = math.sqrt(1.0 - abs(z) ** 2)
    ap, bp, cp, dp = seed[0, 0], seed[0, 1], seed[1, 0], seed[1, 1]
    out = TwoQubitProjection(
        ap - np.conj(z) * bp / root,
        bp / root,
        cp - np.conj(z) * dp / root,
        dp / root,
    )
    resid = max_entangled_conditions_residual(out, z)
    if resid > ABORT_TOL:
        raise NumericalAbortError(f"family conditions violated, residual {resid}")
    return out


def max_entangled_conditions_residual(p: TwoQubitProjection, z: complex) -> float:
    """Residual of the three closed-form maximal-entanglement conditions:
    |A+z*B| = sqrt(1-|z|^2)|D|, |C+z*D| = sqrt(1-|z|^2)|B|,
    AB* + CD* + z*(|B|^2+|D|^2) = 0.
    """
    root = math.sqrt(max(0.0, 1.0 - abs(z) ** 2))
    zc = np.conj(z)
    r1 = abs(abs(p.a + zc * p.b) - root * abs(p.d))
    r2 = abs(abs(p.c + zc * p.d) - root * abs(p.b))
    r3 = abs(
        p.a * np.conj(p.b)
        + p.c * np.conj(p.d)
        + zc * (abs(p.b) ** 2 + abs(p.d) ** 2)
    )
    return float(max(r1, r2, r3)) / p.norm_sq


def check_no_good_failure(u: ModeUnitary, tol: float = 1e-12) -> dict:
    """Verify the no-good-failure theorem on one unitary.

    Premise: all same-detector outcomes with nonzero probability (z = 0
    baseline) share (U_3i, U_4i) up to a global phase. Conclusion: every
    relevant outcome's coefficient matrix has zero determinant.
    """
    m = u.matrix
    n = u.n
    live = [i for i in range(n) if same_detector_prob(m, i, 0.0) > 1e-12]
    premise = True
    for idx in range(1, len(live)):
        i, j = live[0], live[idx]
        cross = m[2, i] * m[3, j] - m[2, j] * m[3, i]
        if abs(cross) > 1e-10:
            premise = False
            break
    max_det = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            a, b, c, d = outcome_coeffs(m, i, j)
            max_det = max(max_det, abs(a * d - b * c))
    conclusion = max_det < tol
    return {
        "premise_holds": premise,
        "conclusion_holds": conclusion if premise else None,
        "max_relevant_det": max_det,
        "live_detectors": live,
    }


def _angle_grid(n: int) -> np.ndarray:
    """Uniform grid on (-pi, pi] including pi exactly (n even keeps the
    Case-1/Case-2 manifold points on-grid)."""
    return -math.pi + 2.0 * math.pi * (np.arange(n) + 1) / n


def xlike_uniqueness_scan(resolution: int = 200, tol: float = 1e-6) -> dict:
    """Grid scan of the 3-qubit unitarity conditions for an X-like projection.

    The post-projection coefficient matrix
        M = [[A+B, A+Be^{-i chi1}], [A+Be^{-i chi2}, A+Be^{-i(chi1+chi2)}]]
    must be proportional to a unitary. Scans (chi1, chi2, arg B - arg A)
    at the given resolution with |A| in {0.3, 1/sqrt2, 0.9}; every solution
    must lie on Case 1 (chi1 = chi2, B = -A e^{i chi}), Case 2
    (chi1 + chi2 = 2pi, B = -A) or the degenerate chi1 = chi2 = pi manifold.
    """
    chis = _angle_grid(resolution)
    deltas = _angle_grid(resolution)
    mag_as = np.array([0.3, INV_SQRT2, 0.9])
    e1 = np.exp(-1j * chis)  # e^{-i chi}
    counts = {"case1": 0, "case2": 0, "pi_degenerate": 0}
    outliers: list[tuple] = []
    n_solutions = 0
    r = mag_as[None, None, :]
    bmag = np.sqrt(1.0 - mag_as**2)[None, None, :]
    bph = np.exp(1j * deltas)[None, :, None]
    b = bmag * bph  # (1, delta, r)
    for i1, chi1 in enumerate(chis):
        p1 = e1[i1]
        m11 = r + b  # A + B
        m12 = r + b * p1  # A + B e^{-i chi1}
        m21 = r + b * e1[:, None, None]  # A + B e^{-i chi2}, axis 0 = chi2
        m22 = r + b * (p1 * e1)[:, None, None]
        res = np.maximum(
            np.abs(np.abs(m11) - np.abs(m22)),
            np.abs(np.abs(m12) - np.abs(m21)),
        )
        res = np.maximum(res, np.abs(m11 * np.conj(m21) + m12 * np.conj(m22)))
        hits = np.argwhere(res < tol)
        for i2, idd, ir in hits:
            n_solutions += 1
            chi2, delta, mag = chis[i2], deltas[idd], mag_as[ir]
            near_half = abs(mag - INV_SQRT2) < 1e-3
            if (
                abs(wrap_angle(chi1 - chi2)) < 1e-3
                and abs(wrap_angle(delta - chi1 - math.pi)) < 1e-3
                and near_half
            ):
                counts["case1"] += 1
            elif (
                abs(wrap_angle(chi1 + chi2)) < 1e-3
                and abs(wrap_angle(delta - math.pi)) < 1e-3
                and near_half
            ):
                counts["case2"] += 1
            elif (
                abs(wrap_angle(chi1 - math.pi)) < 1e-3
                and abs(wrap_angle(chi2 - math.pi)) < 1e-3
            ):
                counts["pi_degenerate"] += 1
            else:
                outliers.append((float(chi1), float(chi2), float(delta), float(mag)))
    return {
        "resolution": resolution,
        "tolerance": tol,
        "solutions": n_solutions,
        "counts": counts,
        "outliers": outliers,
    }


def ylike_impossibility_scan(resolution: int = 200, tol: float = 1e-6) -> dict:
    """Grid scan of the Y-like four-magnitude condition
    |A+B| = |A+Be^{-i chi1}| = |A+Be^{-i chi2}| = |A+Be^{-i(chi1+chi2)}|.

    For A, B != 0 the condition is magnitude-independent and reduces to
    cos(delta) = cos(delta - chi1) = cos(delta - chi2) = cos(delta-chi1-chi2)
    with delta = arg B - arg A. Nonzero weights admit solutions only at
    chi1 = chi2 = pi.
    """
    chis = _angle_grid(resolution)
    deltas = _angle_grid(resolution)
    nz = np.abs(chis) > 1e-9  # zero weight means "no edge": excluded
    c1 = chis[:, None, None]
    c2 = chis[None, :, None]
    dl = deltas[None, None, :]
    base = np.cos(dl)
    res = np.abs(base - np.cos(dl - c1))
    res = np.maximum(res, np.abs(base - np.cos(dl - c2)))
    res = np.maximum(res, np.abs(base - np.cos(dl - c1 - c2)))
    res = np.where(nz[:, None, None] & nz[None, :, None], res, np.inf)
    hits = np.argwhere(res < tol)
    outliers = []
    at_pi = 0
    for i1, i2, idd in hits:
        if (
            abs(wrap_angle(chis[i1] - math.pi)) < 1e-3
            and abs(wrap_angle(chis[i2] - math.pi)) < 1e-3
        ):
            at_pi += 1
        else:
            outliers.append((float(chis[i1]), float(chis[i2]), float(deltas[idd])))
    return {
        "resolution": resolution,
        "tolerance": tol,
        "solutions": int(len(hits)),
        "at_pi": at_pi,
        "outliers": outliers,
    }


def pair_weight_from_projection(
    a: complex, b: complex, chi1: float, chi2: float
) -> tuple[float, bool]:
    """Pair weight produced by projecting the middle of a (chi1, chi2) chain
    with the bra A<0| + B<1|.

    |det M1| = |A||B||1-e^{-i chi1}||1-e^{-i chi2}| / N^2 with
    N^2 = 4(1 + Re(AB*(1+e^{i chi1})(1+e^{i chi2}))/2); phi solves
    |det M2| = |1-e^{-i phi}|/4 = |det M1|. both_outcomes_equal iff
    Re(AB*(1+e^{i chi1})(1+e^{i chi2})) = 0.
    """
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-10:
        raise InputError("|A|^2 + |B|^2 must be 1")
    cross = (a * np.conj(b) * (1.0 + cmath.exp(1j * chi1)) * (1.0 + cmath.exp(1j * chi2))).real
    nsq = 4.0 * (1.0 + 0.5 * cross)
    det1 = (
        abs(a)
        * abs(b)
        * abs(1.0 - cmath.exp(-1j * chi1))
        * abs(1.0 - cmath.exp(-1j * chi2))
        / nsq
    )
    phi = math.acos(max(-1.0, min(1.0, 1.0 - 8.0 * det1 * det1)))
    return phi, abs(cross) < 1e-10
