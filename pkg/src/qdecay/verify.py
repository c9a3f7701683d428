"""Randomized verification suites.

Every suite draws its states from counter-derived substreams of a root
seed, checks an inequality against exact entropic values, and returns a
report dict.  A violation record carries the sample counter so the
offending state can be regenerated from (seed, counter) alone.  Reports
are plain JSON-serializable dicts with deterministic content.
"""

from __future__ import annotations

import math

import numpy as np

from . import bounds, channels, entropy, matcore
from .matcore import BipartiteDensity, DensityMatrix
from .rng import Rng

SLACK = 1e-10


def _report(name: str, samples: int, seed: int, violations: list,
            worst_margin: float, extra: dict | None = None) -> dict:
    out = {
        "suite": name,
        "samples": samples,
        "seed": seed,
        "violations": violations,
        "violationCount": len(violations),
        "worstMargin": worst_margin,
        "passed": not violations,
    }
    if extra:
        out["params"] = extra
    return out


def _rand_commuting_pair(rng: Rng, d: int, floor: float = 0.01):
    """Simultaneously diagonalizable pair in a random eigenbasis."""
    basis = matcore.eigh(matcore.random_hermitian(rng, d)).eigenvectors
    p = matcore.random_probability_vector(rng, d, floor=floor)
    q = matcore.random_probability_vector(rng, d, floor=floor)
    rho = DensityMatrix.from_matrix((basis * p) @ basis.conj().T)
    sigma = DensityMatrix.from_matrix((basis * q) @ basis.conj().T)
    return rho, sigma


def pinsker_suite(samples: int, seed: int) -> dict:
    """Both Pinsker forms on commuting pairs, the basic form on arbitrary pairs."""
    rng = Rng(seed)
    violations = []
    worst = math.inf
    for k in range(samples):
        sub = rng.substream(k)
        d = 2 + (k % 2)
        rho, sigma = _rand_commuting_pair(sub, d)
        rep = entropy.pinsker_check(rho, sigma)
        if not rep.passed:
            violations.append({"counter": k, "kind": "commuting"})
        worst = min(worst,
                    rep.relative_entropy - rep.basic_bound,
                    rep.relative_entropy - (rep.refined_bound or 0.0))
        rho2 = matcore.random_density(sub, d)
        sigma2 = matcore.random_density(sub, d, mix=0.05)
        rep2 = entropy.pinsker_check(rho2, sigma2)
        if not rep2.basic_holds:
            violations.append({"counter": k, "kind": "general"})
        worst = min(worst, rep2.relative_entropy - rep2.basic_bound)
    return _report("pinsker", samples, seed, violations, worst)


def almost_concavity_suite(samples: int, seed: int) -> dict:
    """Joint convexity defect bound
    D(mix || mix) >= p D1 + (1-p) D2 - f_m(p) on commuting tuples."""
    rng = Rng(seed)
    violations = []
    worst = math.inf
    for k in range(samples):
        sub = rng.substream(k)
        d = 3
        basis = matcore.eigh(matcore.random_hermitian(sub, d)).eigenvectors
        def diag_density(vals):
            return DensityMatrix.from_matrix((basis * vals) @ basis.conj().T)
        sigma1 = matcore.random_probability_vector(sub, d, floor=0.02)
        sigma2 = matcore.random_probability_vector(sub, d, floor=0.02)
        rho1 = matcore.random_probability_vector(sub, d)
        rho2 = matcore.random_probability_vector(sub, d)
        p = sub.uniform(0.001, 0.999)
        m_tilde = float(min(sigma1.min(), sigma2.min()))
        lhs = entropy.relative_entropy(
            diag_density(p * rho1 + (1 - p) * rho2),
            diag_density(p * sigma1 + (1 - p) * sigma2)).unwrap()
        d1 = entropy.relative_entropy(diag_density(rho1), diag_density(sigma1)).unwrap()
        d2 = entropy.relative_entropy(diag_density(rho2), diag_density(sigma2)).unwrap()
        rhs = p * d1 + (1 - p) * d2 - entropy.f_almost_concavity(p, m_tilde)
        if lhs < rhs - SLACK:
            violations.append({"counter": k, "lhs": lhs, "rhs": rhs})
        worst = min(worst, lhs - rhs)
    return _report("almost-concavity", samples, seed, violations, worst)


def gaorouze_suite(samples: int, seed: int) -> dict:
    """Order-to-entropy sandwich on comparable full-rank pairs."""
    rng = Rng(seed)
    violations = []
    worst = math.inf
    for k in range(samples):
        sub = rng.substream(k)
        d = 2 + (k % 2)
        rho = matcore.random_density(sub, d, mix=0.1)
        sigma = matcore.random_density(sub, d, mix=0.1)
        rep = entropy.gaorouze_sandwich_check(rho, sigma)
        if not rep.passed:
            violations.append({"counter": k})
        worst = min(worst, rep.lower_slack, rep.upper_slack)
    return _report("gaorouze", samples, seed, violations, worst)


def normcomp_suite(samples: int, seed: int) -> dict:
    """sigma <= c omega implies ||X||^2_{omega} <= c ||X||^2_{sigma} for the
    resolvent-weighted norms."""
    rng = Rng(seed)
    violations = []
    worst = math.inf
    for k in range(samples):
        sub = rng.substream(k)
        d = 2 + (k % 2)
        sigma = matcore.random_density(sub, d, mix=0.1)
        omega = matcore.random_density(sub, d, mix=0.1)
        c = matcore.loewner_min_coefficient(sigma, omega)
        x = matcore.random_hermitian(sub, d)
        lhs = entropy.weighted_norm_sq(x, omega)
        rhs = c * entropy.weighted_norm_sq(x, sigma)
        if lhs > rhs + SLACK * max(1.0, abs(rhs)):
            violations.append({"counter": k, "lhs": lhs, "rhs": rhs})
        worst = min(worst, rhs - lhs)
    return _report("normcomp", samples, seed, violations, worst)


def integral_form_suite(samples: int, seed: int, quad_points: int = 64,
                        tol: float = 1e-6) -> dict:
    """Quadrature path vs eigendecomposition path for relative entropy."""
    rng = Rng(seed)
    violations = []
    worst = -math.inf
    for k in range(samples):
        sub = rng.substream(k)
        d = 2 + (k % 2)
        rho = matcore.random_density(sub, d, mix=0.1)
        sigma = matcore.random_density(sub, d, mix=0.1)
        de = entropy.relative_entropy(rho, sigma).unwrap()
        di = entropy.relative_entropy_integral_form(rho, sigma, quad_points)
        err = abs(de - di)
        if err > tol:
            violations.append({"counter": k, "error": err})
        worst = max(worst, err)
    return _report("integral-form", samples, seed, violations, -worst,
                   extra={"quadPoints": quad_points, "tolerance": tol})


def _qubit_depolarizing_lindbladian() -> channels.Lindbladian:
    """The worked qubit-depolarizing case: c = 4, analytic diamond bound 3/4."""
    e = channels.depolarizing_projection(2)
    return channels.replacement_lindbladian(e, diamond_upper=0.75, pp_index=4.0)


def clsi_converse_suite(samples: int, seed: int,
                        times=(1e-3, 1e-2, 1e-1, 1.0),
                        variants=("theorem", "paper-example"),
                        extended: bool = True) -> dict:
    """Fixed-point converse for the qubit depolarizing semigroup, bare and
    with a dim-2 untouched auxiliary."""
    lind = _qubit_depolarizing_lindbladian()
    rng = Rng(seed)
    violations = []
    worst = math.inf
    factors = {}
    for t in times:
        zeta = 1.0 - math.exp(-t * lind.pp_index * lind.diamond_upper)
        for variant in variants:
            g, tau = bounds.g_factor(zeta, lind.pp_index, variant=variant)
            factors[(t, variant)] = (g, tau)
    semis = {t: lind.semigroup(t) for t in times}
    semis_ext = {t: semis[t].tensor_identity(2) for t in times} if extended else {}
    e_ext = lind.fixed_point.superop.tensor_identity(2) if extended else None
    for k in range(samples):
        sub = rng.substream(k)
        rho = matcore.random_density(sub, 2)
        e_rho = lind.fixed_point.apply(rho)
        d_pre = entropy.relative_entropy(rho, e_rho).unwrap()
        for t in times:
            evolved = semis[t].apply(rho)
            d_post = entropy.relative_entropy(evolved, e_rho).unwrap()
            for variant in variants:
                g, _ = factors[(t, variant)]
                if d_post < g * d_pre - SLACK:
                    violations.append({"counter": k, "t": t, "variant": variant,
                                       "kind": "bare"})
                worst = min(worst, d_post - g * d_pre)
        if extended:
            rho4 = matcore.random_density(sub, 4)
            e_rho4 = DensityMatrix.from_matrix(e_ext.apply_matrix(rho4.matrix))
            d_pre4 = entropy.relative_entropy(rho4, e_rho4).unwrap()
            for t in times:
                ev4 = DensityMatrix.from_matrix(semis_ext[t].apply_matrix(rho4.matrix))
                d_post4 = entropy.relative_entropy(ev4, e_rho4).unwrap()
                for variant in variants:
                    g, _ = factors[(t, variant)]
                    if d_post4 < g * d_pre4 - SLACK:
                        violations.append({"counter": k, "t": t, "variant": variant,
                                           "kind": "extended"})
                    worst = min(worst, d_post4 - g * d_pre4)
    return _report("clsi-converse", samples, seed, violations, worst,
                   extra={"c": lind.pp_index, "diamond": lind.diamond_upper,
                          "times": list(times), "variants": list(variants),
                          "extended": extended})


# weak replacement coupling keeps the (a, eps, m_tilde) triple feasible at
# the sampled m_tilde floor for both suite times; see ConverseBoundParams
CLASSICAL_SUITE_COUPLING = 0.01
CLASSICAL_SIGMA_FLOOR = 0.35
MUTINFO_SUITE_COUPLING = 2.5e-4
MUTINFO_CELL_FLOOR = 0.16


def classical_converse_suite(samples: int, seed: int,
                             times=(0.01, 0.1)) -> dict:
    """Commuting-pair converse under the weakly-coupled replacement
    semigroup toward the qubit depolarizing projection."""
    e = channels.depolarizing_projection(2)
    lind = channels.replacement_lindbladian(e, coupling=CLASSICAL_SUITE_COUPLING,
                                            pp_index=4.0)
    rng = Rng(seed)
    violations = []
    worst = math.inf
    branches = {"large-D": 0, "small-D": 0}
    for k in range(samples):
        sub = rng.substream(k)
        s0 = sub.uniform(CLASSICAL_SIGMA_FLOOR, 1.0 - CLASSICAL_SIGMA_FLOOR)
        sigma = DensityMatrix.diagonal([s0, 1.0 - s0])
        if k % 2 == 0:
            r0 = sub.uniform(0.001, 0.999)
        else:
            r0 = min(max(s0 + 0.08 * sub.normal(), 1e-4), 1 - 1e-4)
        rho = DensityMatrix.diagonal([r0, 1.0 - r0])
        e_sigma = e.apply(sigma)
        m_tilde = bounds.smallest_nonzero_eigenvalue_direct_sum(sigma, e_sigma)
        g_tilde = matcore.loewner_min_coefficient(e_sigma, sigma)
        for t in times:
            params = bounds.ConverseBoundParams.from_semigroup(
                t, lind.pp_index, lind.diamond_upper,
                m_tilde=m_tilde, g_tilde=g_tilde)
            rep = bounds.classical_converse_check(e, rho, sigma, params)
            branches[rep.extra["branch"]] += 1
            if not rep.passed:
                violations.append({"counter": k, "t": t})
            worst = min(worst, rep.margin)
    return _report("classical", samples, seed, violations, worst,
                   extra={"coupling": CLASSICAL_SUITE_COUPLING,
                          "c": lind.pp_index, "diamond": lind.diamond_upper,
                          "times": list(times), "branches": branches})


def classical_mutinfo_suite(samples: int, seed: int,
                            times=(0.01, 0.1)) -> dict:
    """Mutual-information converse on random 2x2 classical joints with
    B-side replacement noise toward the depolarizing projection."""
    e = channels.depolarizing_projection(2)
    c = 4.0
    diamond = 2.0 * MUTINFO_SUITE_COUPLING
    rng = Rng(seed)
    violations = []
    worst = math.inf
    branches = {"large-D": 0, "small-D": 0}
    for k in range(samples):
        sub = rng.substream(k)
        cells = matcore.random_probability_vector(sub, 4, floor=MUTINFO_CELL_FLOOR)
        joint = BipartiteDensity.from_matrix(np.diag(cells.astype(complex)), 2, 2)
        for t in times:
            params = bounds.ConverseBoundParams.from_semigroup(t, c, diamond)
            rep = bounds.mutual_info_converse_check(e, joint, params=params)
            branches[rep.extra["branch"]] += 1
            if not rep.passed:
                violations.append({"counter": k, "t": t})
            worst = min(worst, rep.margin)
    return _report("classical-mutinfo", samples, seed, violations, worst,
                   extra={"coupling": MUTINFO_SUITE_COUPLING, "c": c,
                          "diamond": diamond, "times": list(times),
                          "branches": branches})


def decayed_state_suite(samples: int, seed: int) -> dict:
    """Partial-replacement comparison with theta = omega = I/2 and c = 1."""
    rng = Rng(seed)
    violations = []
    worst = math.inf
    mixed = DensityMatrix.maximally_mixed(2)
    for k in range(samples):
        sub = rng.substream(k)
        rho, sigma = _rand_commuting_pair(sub, 2)
        zeta = sub.uniform(0.01, 0.5)
        eps = sub.uniform(zeta + 1e-4, 0.95)
        rep = bounds.decayed_state_bound_check(rho, sigma, mixed, mixed,
                                               eps=eps, zeta=zeta, c=1.0)
        if not rep.passed:
            violations.append({"counter": k})
        worst = min(worst, rep.margin)
    return _report("decayed-state", samples, seed, violations, worst)


def origcompare_suite(samples: int, seed: int) -> dict:
    """Upper comparison of D(rho||sigma) through the mixed pair, on
    commuting qubit tuples with rho >= (1-zeta) sigma by construction."""
    rng = Rng(seed)
    violations = []
    worst = math.inf
    for k in range(samples):
        sub = rng.substream(k)
        s0 = sub.uniform(0.05, 0.95)
        sigma = DensityMatrix.diagonal([s0, 1.0 - s0])
        zeta = sub.uniform(0.05, 0.9)
        w0 = sub.uniform(0.0, 1.0)
        rho = DensityMatrix.from_matrix(
            (1 - zeta) * sigma.matrix + zeta * np.diag([w0, 1.0 - w0]).astype(complex))
        if k % 3 == 0:
            omega = sigma  # replacement-style special case
        else:
            o0 = sub.uniform(0.02, 0.98)
            omega = DensityMatrix.diagonal([o0, 1.0 - o0])
        eps = sub.uniform(0.02, 0.9)
        rep = bounds.origcompare_check(rho, sigma, omega, eps=eps, zeta=zeta)
        if not rep.passed:
            violations.append({"counter": k})
        worst = min(worst, rep.margin)
    return _report("origcompare", samples, seed, violations, worst)


def data_processing_suite(samples: int, seed: int) -> dict:
    """D(Phi rho || Phi sigma) <= D(rho || sigma) for the channel
    constructors of the package."""
    rng = Rng(seed)
    violations = []
    worst = math.inf
    for k in range(samples):
        sub = rng.substream(k)
        rho = matcore.random_density(sub, 2, mix=0.02)
        sigma = matcore.random_density(sub, 2, mix=0.02)
        d_pre = entropy.relative_entropy(rho, sigma).unwrap()
        chans = [
            channels.depolarizing(2, sub.uniform(0.0, 1.0)),
            channels.dephasing_y(sub.uniform(0.0, 1.0)),
            _random_flagged_channel(sub),
        ]
        for idx, ch in enumerate(chans):
            d_post = entropy.relative_entropy(ch.apply(rho), ch.apply(sigma)).unwrap()
            if d_post > d_pre + SLACK:
                violations.append({"counter": k, "channel": idx})
            worst = min(worst, d_pre - d_post)
    return _report("data-processing", samples, seed, violations, worst)


def _random_flagged_channel(sub: Rng):
    from . import experiments
    return experiments.flagged_channel(sub.uniform(0.05, 0.95),
                                       sub.uniform(0.05, 0.95))


def channel_validity_suite(samples: int, seed: int) -> dict:
    """Channels map random densities to valid densities (PSD, unit trace)."""
    rng = Rng(seed)
    violations = []
    worst = math.inf
    for k in range(samples):
        sub = rng.substream(k)
        d = 2 + (k % 3)
        rho = matcore.random_density(sub, d)
        ch = channels.depolarizing(d, sub.uniform(0.0, 1.0))
        out = ch.apply_matrix(rho.matrix)
        w, _ = matcore.eigh(out)
        tr = float(np.trace(out).real)
        defect = min(float(w[0]), 1e-9 - abs(tr - 1.0))
        if w[0] < -1e-9 or abs(tr - 1.0) > 1e-9:
            violations.append({"counter": k})
        worst = min(worst, defect)
    return _report("channel-validity", samples, seed, violations, worst)


SUITES = {
    "pinsker": pinsker_suite,
    "almost-concavity": almost_concavity_suite,
    "gaorouze": gaorouze_suite,
    "normcomp": normcomp_suite,
    "integral-form": integral_form_suite,
    "clsi-converse": clsi_converse_suite,
    "classical": classical_converse_suite,
    "classical-mutinfo": classical_mutinfo_suite,
    "decayed-state": decayed_state_suite,
    "origcompare": origcompare_suite,
    "data-processing": data_processing_suite,
    "channel-validity": channel_validity_suite,
}

# in aggregate ("all") runs the heavier suites take a reduced share of the
# requested sample count; an explicitly named suite always runs the exact
# requested count
SAMPLE_SCALE = {
    "integral-form": 0.1,
    "clsi-converse": 0.25,
    "classical-mutinfo": 0.5,
}


def run_suites(names, samples: int, seed: int) -> dict:
    """Run the named suites (or all) and collect a deterministic report."""
    aggregate = names in ("all", ["all"], ("all",))
    if aggregate:
        names = list(SUITES)
    reports = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
        n = max(1, int(samples * SAMPLE_SCALE.get(name, 1.0))) if aggregate else samples
        reports.append(SUITES[name](n, seed))
    return {
        "seed": seed,
        "requestedSamples": samples,
        "suites": reports,
        "allPassed": all(r["passed"] for r in reports),
    }
