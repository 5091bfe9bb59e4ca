"""Perturbation certificates for orbit systems.

Each certificate evaluates the hypothesis of one perturbation statement
on a finite horizon, reports the margin by which it holds, and verifies
the statement's conclusion on the perturbed system.  Infinite sums are
truncated at the horizon with a geometric tail bound added, keeping the
sufficient-condition direction intact.  A randomized satisfiability
search probes whether the hypothesis set of a certificate is inhabited
at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import frames, numkit
from .dynsamp import OrbitSpec, WeightSpec, nilpotent_shift, orbit
from .errors import HypothesisViolated, InvalidHypothesis, InvalidInput
from .frames import BoundsReport, VectorSystem

CERTIFICATE_NAMES = (
    "riesz_orbit_perturbation",
    "weighted_frame_perturbation",
    "scaled_generator_perturbation",
    "multi_generator_riesz",
    "two_operator_frame",
    "two_operator_riesz_sum",
)


@dataclass(frozen=True, eq=False)
class ContractionData:
    """Invariant subspace on which an operator acts as a strict contraction.

    ``mu`` is the largest norm of the operator over unit vectors of the
    subspace; ``invariance_defect`` is the spectral norm of
    ``(I - P_V) T P_V``.
    """

    operator: np.ndarray
    subspace_basis: np.ndarray  # d x k, orthonormal columns
    mu: float
    invariance_defect: float


def contraction_data(t, subspace_basis, tol: float = 1e-8) -> ContractionData:
    """Validate an invariant contraction subspace."""
    t = numkit.as_operator(t)
    v = numkit.as_matrix(subspace_basis)
    if v.shape[0] != t.shape[0]:
        raise InvalidInput("subspace basis dimension does not match the operator")
    k = v.shape[1]
    if numkit.frobenius(numkit.adjoint(v) @ v - np.eye(k)) > 1e-10:
        raise InvalidInput("subspace basis is not orthonormal within tolerance")
    p = v @ numkit.adjoint(v)
    eye = np.eye(t.shape[0])
    defect = numkit.operator_norm((eye - p) @ t @ p)
    if defect > tol:
        raise InvalidHypothesis(
            f"subspace is not invariant: defect {defect:.3e} > {tol:.1e}"
        )
    mu = numkit.operator_norm(t @ v)
    if mu >= 1.0:
        raise InvalidHypothesis(f"contraction factor {mu:.6g} >= 1 on the subspace")
    return ContractionData(operator=t, subspace_basis=v, mu=float(mu),
                           invariance_defect=float(defect))


def _in_subspace(cd: ContractionData, vec, tol: float) -> None:
    v = numkit.as_vector(vec)
    p = cd.subspace_basis @ (numkit.adjoint(cd.subspace_basis) @ v)
    if np.linalg.norm(v - p) > tol * max(1.0, np.linalg.norm(v)):
        raise InvalidHypothesis("vector is not in the contraction subspace")


@dataclass(frozen=True, eq=False)
class Certificate:
    """Named hypothesis evaluation with its margin and conclusion check."""

    name: str
    hypothesis_values: dict[str, float]
    margin: float
    verdict: bool
    conclusion_check: BoundsReport | None = None


def _plain_orbit(t, phi, horizon, weights=None) -> VectorSystem:
    return orbit(OrbitSpec(operator=t, generators=(numkit.as_vector(phi),),
                           weights=weights, horizon=horizon))


# ---------------------------------------------------------------------------
# single-orbit perturbations
# ---------------------------------------------------------------------------

def riesz_perturbation_certificate(cd: ContractionData, phi, psi, horizon: int,
                                   tol: float = 1e-8) -> Certificate:
    """Riesz-sequence stability of {T^n (phi + psi)} for psi in the
    contraction subspace.

    Margin: ``(1 - mu) sqrt(A) - ||psi||`` with A the lower Riesz bound of
    the base orbit prefix.  Also reports the operative sum
    ``sum_n ||T^n psi|| ||S^+ T^n phi||`` with its geometric tail bound;
    a total below one certifies the perturbed prefix with lower bound at
    least ``A (1 - sum)^2``.
    """
    t = cd.operator
    phi = numkit.as_vector(phi)
    psi = numkit.as_vector(psi)
    _in_subspace(cd, psi, tol)
    base = _plain_orbit(t, phi, horizon)
    report = frames.frame_bounds(base, ambient=False)
    if report.classification not in ("riesz_sequence", "riesz_basis"):
        raise HypothesisViolated(
            f"base orbit prefix is not a Riesz sequence ({report.classification})"
        )
    a = report.a_opt
    mu = cd.mu
    psi_norm = float(np.linalg.norm(psi))
    threshold = (1.0 - mu) * math.sqrt(a)
    margin = threshold - psi_norm

    s_pinv = numkit.pinv(frames.frame_operator(base))
    partial = 0.0
    v_phi, v_psi = phi, psi
    for _ in range(horizon):
        partial += float(np.linalg.norm(v_psi) * np.linalg.norm(s_pinv @ v_phi))
        v_phi = t @ v_phi
        v_psi = t @ v_psi
    tail = (mu**horizon) * psi_norm / ((1.0 - mu) * math.sqrt(a)) if a > 0 else math.inf
    total = partial + tail

    perturbed = _plain_orbit(t, phi + psi, horizon)
    conclusion = frames.frame_bounds(perturbed, ambient=False)
    values = {
        "lower_riesz_bound": a,
        "mu": mu,
        "psi_norm": psi_norm,
        "threshold": threshold,
        "proof_sum": partial,
        "proof_tail_bound": tail,
        "proof_sum_total": total,
        "perturbed_floor": a * (1.0 - total) ** 2 if total < 1.0 else 0.0,
    }
    return Certificate("riesz_orbit_perturbation", values, float(margin),
                       margin > 0, conclusion)


def weighted_frame_perturbation_certificate(cd: ContractionData, phi, psi,
                                            weights: WeightSpec, horizon: int,
                                            tol: float = 1e-8) -> Certificate:
    """Frame stability of {a_n T^n (phi + psi)} for psi in the contraction
    subspace.

    Margin: ``sqrt(A (1 - mu^2)) - sup_n |a_n| ||psi||``.  A is the lower
    bound of the base orbit on its span (the ambient bound when the orbit
    spans).  The frame-sequence claim for arbitrary psi is recorded via
    the span-relative lower bound of the perturbed system.  The ambient
    conclusion report is meaningful once psi reaches into the contraction
    subspace; at psi = 0 over a non-spanning base it degenerates to the
    base classification.
    """
    t = cd.operator
    phi = numkit.as_vector(phi)
    psi = numkit.as_vector(psi)
    _in_subspace(cd, psi, tol)
    a_seq = weights.sequence(horizon)
    base = _plain_orbit(t, phi, horizon, weights=weights)
    report = frames.frame_bounds(base, ambient=False)
    if report.a_opt <= report.tol:
        raise HypothesisViolated("base weighted orbit has no lower bound")
    a = report.a_opt
    mu = cd.mu
    sup_weight = float(np.max(np.abs(a_seq)))
    psi_norm = float(np.linalg.norm(psi))
    threshold = math.sqrt(a * (1.0 - mu**2))
    margin = threshold - sup_weight * psi_norm

    perturbed = _plain_orbit(t, phi + psi, horizon, weights=weights)
    ambient_report = frames.frame_bounds(perturbed, ambient=True)
    span_report = frames.frame_bounds(perturbed, ambient=False)
    values = {
        "lower_bound": a,
        "mu": mu,
        "sup_weight": sup_weight,
        "psi_norm": psi_norm,
        "threshold": threshold,
        "part_i_span_lower": span_report.a_opt,
    }
    return Certificate("weighted_frame_perturbation", values, float(margin),
                       margin > 0, ambient_report)


def scaled_generator_perturbation_certificate(t, phi, psi, weights: WeightSpec,
                                              horizon: int,
                                              tol: float = 1e-8) -> Certificate:
    """Frame stability of {a_n T^n (phi + psi)} from a weight-ratio bound.

    Hypotheses: {a_n T^n phi} is a frame with lower bound A and
    {a_{n+1} T^n psi} is Bessel with bound B.  Margin:
    ``sqrt(A / B) - sup_n |a_n / a_{n+1}|``; for psi = 0 the Bessel bound
    degenerates to zero and the margin is reported as +inf.
    """
    t = numkit.as_operator(t)
    phi = numkit.as_vector(phi)
    psi = numkit.as_vector(psi)
    a_seq = weights.sequence(horizon + 1)
    base = _plain_orbit(t, phi, horizon, weights=weights)
    base_report = frames.frame_bounds(base, ambient=True)
    if base_report.a_opt <= base_report.tol:
        raise HypothesisViolated("base weighted orbit is not a frame")
    a = base_report.a_opt

    shifted = WeightSpec.explicit(a_seq[1:])
    sup_ratio = float(np.max(np.abs(a_seq[:-1] / a_seq[1:])))
    psi_norm = float(np.linalg.norm(psi))
    if psi_norm == 0.0:
        b = 0.0
        margin = math.inf
    else:
        bessel_sys = _plain_orbit(t, psi, horizon, weights=shifted)
        b = frames.frame_bounds(bessel_sys, ambient=True).b_opt
        margin = math.sqrt(a / b) - sup_ratio if b > 0 else math.inf

    perturbed = _plain_orbit(t, phi + psi, horizon, weights=weights)
    conclusion = frames.frame_bounds(perturbed, ambient=True)
    values = {
        "lower_bound": a,
        "bessel_bound": b,
        "sup_ratio": sup_ratio,
        "psi_norm": psi_norm,
    }
    return Certificate("scaled_generator_perturbation", values, float(margin),
                       margin > 0, conclusion)


# ---------------------------------------------------------------------------
# two-operator certificates
# ---------------------------------------------------------------------------

def multi_generator_riesz_certificate(cd_w: ContractionData,
                                      cd_t: ContractionData, generators,
                                      horizon: int,
                                      tol: float = 1e-8) -> Certificate:
    """Riesz-sequence transfer from W-orbits to T-orbits of shared
    generators inside both contraction subspaces.

    Margin: ``(1 - lambda^2) / (2 ||S^+||) - sum_j ||g_j||^2`` with S the
    frame operator of the truncated W-system and lambda the larger
    contraction factor.  The operative comparison sum
    ``sum_{j,n} ||W^n g_j - T^n g_j|| ||S^+ W^n g_j||`` is always
    reported, with its geometric tail bound.
    """
    w_op = cd_w.operator
    t_op = cd_t.operator
    gens = tuple(numkit.as_vector(g) for g in generators)
    if not gens:
        raise InvalidInput("need at least one generator")
    for g in gens:
        _in_subspace(cd_w, g, tol)
        _in_subspace(cd_t, g, tol)
    lam = max(cd_w.mu, cd_t.mu)

    w_sys = orbit(OrbitSpec(operator=w_op, generators=gens, horizon=horizon))
    w_report = frames.frame_bounds(w_sys, ambient=False)
    if w_report.a_opt <= w_report.tol:
        raise HypothesisViolated("W-orbit system has no lower bound on its span")
    s = frames.frame_operator(w_sys)
    s_pinv = numkit.pinv(s)
    s_pinv_norm = numkit.operator_norm(s_pinv)
    energy = float(sum(np.linalg.norm(g) ** 2 for g in gens))
    threshold = (1.0 - lam**2) / (2.0 * s_pinv_norm)
    margin = threshold - energy

    partial = 0.0
    for g in gens:
        wv, tv = g, g
        for _ in range(horizon):
            partial += float(
                np.linalg.norm(wv - tv) * np.linalg.norm(s_pinv @ wv)
            )
            wv = w_op @ wv
            tv = t_op @ tv
    tail = 2.0 * s_pinv_norm * energy * lam ** (2 * horizon) / (1.0 - lam**2)

    t_sys = orbit(OrbitSpec(operator=t_op, generators=gens, horizon=horizon))
    conclusion = frames.frame_bounds(t_sys, ambient=False)
    values = {
        "lambda": lam,
        "s_pinv_norm": s_pinv_norm,
        "generator_energy": energy,
        "threshold": threshold,
        "proof_sum": partial,
        "proof_tail_bound": tail,
        "proof_sum_total": partial + tail,
        "base_is_riesz": 1.0 if w_report.classification
        in ("riesz_sequence", "riesz_basis") else 0.0,
    }
    return Certificate("multi_generator_riesz", values, float(margin),
                       margin > 0, conclusion)


def two_operator_certificates(cd_t: ContractionData, cd_w: ContractionData,
                              phi, horizon: int,
                              tol: float = 1e-8) -> tuple[Certificate, Certificate]:
    """Certificates for replacing the T-orbit of phi by the W-orbit.

    The frame certificate uses the stated inequality
    ``2 ||phi|| < sqrt(A (1 - lambda^2))``; the sum certificate uses the
    operative inequality ``sum_n ||T^n phi - W^n phi||^2 < A`` (with tail
    bound) and concludes that the W-orbit is a frame.  When the base
    prefix is a Riesz sequence the combined-orbit variant
    (``||phi|| < sqrt(A (1 - lambda^2))`` giving {T^n phi + W^n phi}
    Riesz) is reported through the hypothesis values.
    """
    t_op = cd_t.operator
    w_op = cd_w.operator
    phi = numkit.as_vector(phi)
    _in_subspace(cd_t, phi, tol)
    _in_subspace(cd_w, phi, tol)
    lam = max(cd_t.mu, cd_w.mu)

    base = _plain_orbit(t_op, phi, horizon)
    base_report = frames.frame_bounds(base, ambient=True)
    if base_report.a_opt <= base_report.tol:
        raise HypothesisViolated("T-orbit prefix is not a frame")
    a = base_report.a_opt
    phi_norm = float(np.linalg.norm(phi))
    threshold = math.sqrt(a * (1.0 - lam**2))

    w_sys = _plain_orbit(w_op, phi, horizon)
    w_report = frames.frame_bounds(w_sys, ambient=True)

    frame_margin = threshold - 2.0 * phi_norm
    frame_cert = Certificate(
        "two_operator_frame",
        {
            "lower_bound": a,
            "lambda": lam,
            "phi_norm": phi_norm,
            "threshold": threshold,
        },
        float(frame_margin),
        frame_margin > 0,
        w_report,
    )

    diff_sum = 0.0
    tv, wv = phi.copy(), phi.copy()
    for _ in range(horizon):
        diff_sum += float(np.linalg.norm(tv - wv) ** 2)
        tv = t_op @ tv
        wv = w_op @ wv
    tail = 4.0 * phi_norm**2 * lam ** (2 * horizon) / (1.0 - lam**2)
    sum_margin = a - (diff_sum + tail)

    values = {
        "lower_bound": a,
        "lambda": lam,
        "phi_norm": phi_norm,
        "difference_sum": diff_sum,
        "difference_tail_bound": tail,
        "w_lower_floor": (math.sqrt(a) - math.sqrt(diff_sum + tail)) ** 2
        if sum_margin > 0 else 0.0,
    }
    base_span = frames.frame_bounds(base, ambient=False)
    if base_span.classification in ("riesz_sequence", "riesz_basis"):
        combined_vecs = []
        tv, wv = phi.copy(), phi.copy()
        for _ in range(horizon):
            combined_vecs.append(tv + wv)
            tv = t_op @ tv
            wv = w_op @ wv
        combined = frames.vector_system(combined_vecs)
        combined_report = frames.frame_bounds(combined, ambient=False)
        values["riesz_variant_margin"] = (
            math.sqrt(base_span.a_opt * (1.0 - lam**2)) - phi_norm
        )
        values["combined_span_lower"] = combined_report.a_opt
    sum_cert = Certificate("two_operator_riesz_sum", values, float(sum_margin),
                           sum_margin > 0, w_report)
    return frame_cert, sum_cert


# ---------------------------------------------------------------------------
# randomized satisfiability search
# ---------------------------------------------------------------------------

@dataclass
class SearchReport:
    certificate: str
    tried: int
    satisfying: list[dict] = field(default_factory=list)


def _block_contraction_instance(rng):
    """Shift block plus diagonal contraction block, contraction subspace =
    the trailing coordinates."""
    m = int(rng.integers(2, 5))
    k = int(rng.integers(1, 4))
    d = m + k
    scale = float(rng.uniform(0.5, 1.5))
    t = np.zeros((d, d), dtype=complex)
    t[:m, :m] = scale * nilpotent_shift(m)
    diag = rng.uniform(0.05, 0.9, size=k)
    t[m:, m:] = np.diag(diag).astype(complex)
    v_basis = np.eye(d, dtype=complex)[:, m:]
    phi = np.zeros(d, dtype=complex)
    phi[0] = 1.0
    return t, v_basis, phi, m, k


def _random_contraction(rng, d, top=0.95):
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    target = float(rng.uniform(0.2, top))
    return (m / numkit.operator_norm(m)) * target


def _search_one(name: str, rng) -> dict | None:
    if name == "riesz_orbit_perturbation":
        t, v_basis, phi, m, _ = _block_contraction_instance(rng)
        dim = t.shape[0]
        cd = contraction_data(t, v_basis)
        direction = rng.standard_normal(v_basis.shape[1]) \
            + 1j * rng.standard_normal(v_basis.shape[1])
        direction /= np.linalg.norm(direction)
        psi = v_basis @ direction * float(rng.uniform(0.0, 1.2))
        cert = riesz_perturbation_certificate(cd, phi, psi, horizon=m)
    elif name == "weighted_frame_perturbation":
        t, v_basis, phi, m, _ = _block_contraction_instance(rng)
        dim = t.shape[0]
        cd = contraction_data(t, v_basis)
        direction = rng.standard_normal(v_basis.shape[1]) \
            + 1j * rng.standard_normal(v_basis.shape[1])
        direction /= np.linalg.norm(direction)
        psi = v_basis @ direction * float(rng.uniform(0.0, 1.2))
        weights = WeightSpec.geometric(float(rng.uniform(0.7, 1.3)))
        cert = weighted_frame_perturbation_certificate(cd, phi, psi, weights,
                                                       horizon=m)
    elif name == "scaled_generator_perturbation":
        d = int(rng.integers(2, 6))
        dim = d
        t = nilpotent_shift(d)
        phi = np.zeros(d, dtype=complex)
        phi[0] = 1.0
        psi = phi * float(rng.uniform(0.0, 0.5))
        weights = WeightSpec.geometric(float(rng.uniform(0.7, 1.3)))
        cert = scaled_generator_perturbation_certificate(t, phi, psi, weights,
                                                         horizon=d)
    elif name == "multi_generator_riesz":
        d = int(rng.integers(1, 9))
        dim = d
        w_op = _random_contraction(rng, d)
        t_op = _random_contraction(rng, d)
        v_basis = np.eye(d, dtype=complex)
        cd_w = contraction_data(w_op, v_basis)
        cd_t = contraction_data(t_op, v_basis)
        count = int(rng.integers(1, 3))
        gens = [
            (rng.standard_normal(d) + 1j * rng.standard_normal(d))
            * float(rng.uniform(0.1, 2.0))
            for _ in range(count)
        ]
        cert = multi_generator_riesz_certificate(cd_w, cd_t, gens,
                                                 horizon=4 * d)
    elif name == "two_operator_frame":
        d = int(rng.integers(1, 9))
        dim = d
        t_op = _random_contraction(rng, d)
        w_op = _random_contraction(rng, d)
        v_basis = np.eye(d, dtype=complex)
        cd_t = contraction_data(t_op, v_basis)
        cd_w = contraction_data(w_op, v_basis)
        phi = (rng.standard_normal(d) + 1j * rng.standard_normal(d)) \
            * float(rng.uniform(0.2, 2.0))
        cert, _ = two_operator_certificates(cd_t, cd_w, phi, horizon=4 * d)
    elif name == "two_operator_riesz_sum":
        d = int(rng.integers(1, 9))
        dim = d
        t_op = _random_contraction(rng, d)
        w_op = t_op + 0.01 * _random_contraction(rng, d)
        if numkit.operator_norm(w_op) >= 1.0:
            w_op = w_op / (numkit.operator_norm(w_op) + 0.05)
        v_basis = np.eye(d, dtype=complex)
        cd_t = contraction_data(t_op, v_basis)
        cd_w = contraction_data(w_op, v_basis)
        phi = (rng.standard_normal(d) + 1j * rng.standard_normal(d)) \
            * float(rng.uniform(0.2, 2.0))
        _, cert = two_operator_certificates(cd_t, cd_w, phi, horizon=4 * d)
    else:
        raise InvalidInput(f"unknown certificate {name!r}")

    if cert.verdict and math.isfinite(cert.margin):
        return {
            "margin": cert.margin,
            "dimension": dim,
            "hypothesis_values": dict(cert.hypothesis_values),
        }
    return None


def satisfiability_search(certificate_name: str, trials: int,
                          seed: int) -> SearchReport:
    """Randomized probe of a certificate's hypothesis set.

    Each trial draws an instance (dimension <= 8) from a seed-derived
    substream, evaluates the certificate, and records it when the margin
    is positive.  Instances violating a hard hypothesis count as tried
    and unsatisfying.  Deterministic for a fixed seed.
    """
    if certificate_name not in CERTIFICATE_NAMES:
        raise InvalidInput(f"unknown certificate {certificate_name!r}")
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    report = SearchReport(certificate=certificate_name, tried=trials)
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        try:
            hit = _search_one(certificate_name, rng)
        except HypothesisViolated:
            hit = None
        if hit is not None:
            hit["trial"] = trial
            report.satisfying.append(hit)
    return report
