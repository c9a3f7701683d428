"""Converse lower bounds on information decay, with exact-value verifiers.

Each bound comes as a factor formula plus a check routine: the check
computes both sides from exact entropic quantities (never expansions)
and reports the slack.  The tau suprema are taken by a log-spaced grid
bracket followed by golden-section refinement, so a unimodality
assumption is never relied on globally.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import channels, entropy, matcore
from .channels import ConditionalExpectation, Lindbladian
from .matcore import BipartiteDensity, DensityMatrix

PASS_SLACK = 1e-10

TAU_GRID_MIN = 1e-4
TAU_GRID_POINTS = 2000
TAU_REFINE_TOL = 1e-8

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class InfeasibleParamsError(ValueError):
    """The (a, eps, m_tilde) triple violates the case-combination condition."""


def _golden_max(f: Callable[[float], float], lo: float, hi: float,
                tol: float) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def maximize_on_unit_interval(f: Callable[[float], float],
                              grid_min: float = TAU_GRID_MIN,
                              grid_points: int = TAU_GRID_POINTS,
                              tol: float = TAU_REFINE_TOL) -> tuple[float, float]:
    """Global grid bracket on (0, 1) followed by golden-section refinement."""
    grid = np.logspace(math.log10(grid_min), math.log10(1.0 - grid_min), grid_points)
    vals = np.array([f(t) for t in grid])
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    x, fx = _golden_max(f, lo, hi, tol)
    if vals[i] > fx:
        return float(grid[i]), float(vals[i])
    return float(x), float(fx)


def g_factor(zeta: float, c: float, variant: str = "theorem") -> tuple[float, float]:
    """Optimized decay-converse factor
    g(zeta, c) = sup_tau (1-zeta)^2 tau / (tau + zeta) * (1 - tau (1 - ln tau)/kappa)
    returned as (g, tau_star).

    variant \"theorem\" uses kappa(c); variant \"paper-example\" keeps the
    literal constant (9 ln 9 - 8)/9 of the worked qubit-depolarizing table,
    which is inconsistent with kappa(4) but reproduces that table's values.
    Both are kept so the discrepancy stays visible.
    """
    if not 0.0 <= zeta < 1.0:
        raise ValueError(f"zeta must lie in [0, 1), got {zeta!r}")
    if c <= 1.0:
        raise ValueError(f"c must exceed 1, got {c!r}")
    if variant == "theorem":
        denom = entropy.kappa(c)
    elif variant == "paper-example":
        denom = (9.0 * math.log(9.0) - 8.0) / 9.0
    else:
        raise ValueError(f"unknown variant {variant!r}")

    def objective(tau: float) -> float:
        return ((1.0 - zeta) ** 2 * tau / (tau + zeta)
                * (1.0 - tau * (1.0 - math.log(tau)) / denom))

    # the optimal tau scales like sqrt(zeta kappa) for small zeta, so the
    # grid's lower edge follows zeta down instead of staying at 1e-4
    grid_min = min(TAU_GRID_MIN, max(zeta * 1e-2, 1e-12))
    tau_star, g = maximize_on_unit_interval(objective, grid_min=grid_min)
    return max(g, 0.0), tau_star


@dataclass(frozen=True)
class ConverseBoundParams:
    """Scalar bundle feeding the bound formulas.

    zeta = 1 - exp(-t c diamond) is the replacement weight of the
    fixed-point converse; eps is the mixing weight of the commuting-case
    replacement step, derived as 1 - exp(-t c diamond / 2) (the keep
    amplitude exp(-t c diamond / 2) is epsilon_keep).  a defaults to the
    midpoint of its feasible interval and tau to \"optimize\".
    """

    t: float = 0.0
    c: float = 1.0
    diamond: float = 1.0
    zeta: float = 0.0
    eps: float = 0.0
    a: float | None = None
    m_tilde: float = 1.0
    g_tilde: float = 1.0
    tau: float | str = "optimize"

    @property
    def eps_keep(self) -> float:
        return 1.0 - self.eps

    @classmethod
    def from_semigroup(cls, t: float, c: float, diamond: float,
                       m_tilde: float = 1.0, g_tilde: float = 1.0,
                       a: float | None = None) -> "ConverseBoundParams":
        if t < 0 or c < 1 or diamond <= 0:
            raise ValueError("need t >= 0, c >= 1, diamond > 0")
        return cls(
            t=t, c=c, diamond=diamond,
            zeta=1.0 - math.exp(-t * c * diamond),
            eps=1.0 - math.exp(-t * c * diamond / 2.0),
            a=a, m_tilde=m_tilde, g_tilde=g_tilde,
        )

    def feasible_a_interval(self) -> tuple[float, float]:
        f = entropy.f_almost_concavity(self.eps, self.m_tilde)
        lo = 2.0 * f / ((1.0 - self.eps) * self.m_tilde ** 2)
        return lo, 1.0

    def resolved_a(self) -> float:
        if self.a is not None:
            return self.a
        lo, hi = self.feasible_a_interval()
        if lo >= hi:
            raise InfeasibleParamsError(
                f"no feasible a: need a * m_tilde^2 > 2 f(eps)/(1-eps) = "
                f"{lo * self.m_tilde ** 2:.6g} with m_tilde = {self.m_tilde:.6g}")
        return 0.5 * (lo + hi)

    def to_json_dict(self) -> dict:
        return {
            "t": self.t, "c": self.c, "diamond": self.diamond,
            "zeta": self.zeta, "eps": self.eps,
            "a": self.a, "mTilde": self.m_tilde, "gTilde": self.g_tilde,
            "tau": self.tau,
        }


@dataclass(frozen=True)
class BoundReport:
    """Both sides of one bound evaluation; pass means lhs >= rhs - slack."""

    name: str
    lhs: float
    rhs: float
    factor: float
    params: ConverseBoundParams | None = None
    tau_star: float | None = None
    g_star: float | None = None
    slack: float = PASS_SLACK
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.lhs >= self.rhs - self.slack

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    def to_json_dict(self) -> dict:
        out = {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "factor": self.factor,
            "pass": self.passed,
            "slack": self.slack,
        }
        if self.params is not None:
            out["params"] = self.params.to_json_dict()
        if self.tau_star is not None:
            out["tauStar"] = self.tau_star
            out["gStar"] = self.g_star
        if self.extra:
            out["extra"] = self.extra
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))


def clsi_converse_check(lind: Lindbladian, rho: DensityMatrix, t: float,
                        variant: str = "theorem") -> BoundReport:
    """D(Phi^t rho || E rho) >= g(1 - e^{-t c ||L||}, c) D(rho || E rho),
    both sides exact."""
    e_rho = lind.fixed_point.apply(rho)
    d_pre = entropy.relative_entropy(rho, e_rho)
    if not d_pre.finite:
        raise AssertionError(
            "D(rho || E rho) infinite although c E >= Id; inconsistent fixed point")
    evolved = channels.semigroup_apply(lind, t, rho)
    d_post = entropy.relative_entropy(evolved, e_rho).unwrap()
    zeta = 1.0 - math.exp(-t * lind.pp_index * lind.diamond_upper)
    g, tau_star = g_factor(zeta, lind.pp_index, variant=variant)
    params = ConverseBoundParams(t=t, c=lind.pp_index, diamond=lind.diamond_upper,
                                 zeta=zeta)
    return BoundReport(
        name=f"clsi-converse[{variant}]",
        lhs=d_post, rhs=g * d_pre.value, factor=g,
        params=params, tau_star=tau_star, g_star=g,
    )


def clsi_converse_extended_check(lind: Lindbladian, rho: BipartiteDensity, t: float,
                                 variant: str = "theorem") -> BoundReport:
    """Tensor-stability of the fixed-point converse: the same factor with the
    channel extended by an untouched auxiliary (noise on the left factor)."""
    if rho.dim_a != lind.dim:
        raise ValueError("noise acts on the left (A) factor of the bipartite input")
    e_ext = lind.fixed_point.superop.tensor_identity(rho.dim_b)
    e_rho = DensityMatrix.from_matrix(e_ext.apply_matrix(rho.state.matrix))
    d_pre = entropy.relative_entropy(rho.state, e_rho).unwrap()
    phi_ext = lind.semigroup(t).tensor_identity(rho.dim_b)
    evolved = DensityMatrix.from_matrix(phi_ext.apply_matrix(rho.state.matrix))
    d_post = entropy.relative_entropy(evolved, e_rho).unwrap()
    zeta = 1.0 - math.exp(-t * lind.pp_index * lind.diamond_upper)
    g, tau_star = g_factor(zeta, lind.pp_index, variant=variant)
    params = ConverseBoundParams(t=t, c=lind.pp_index, diamond=lind.diamond_upper,
                                 zeta=zeta)
    return BoundReport(
        name=f"clsi-converse-extended[{variant}]",
        lhs=d_post, rhs=g * d_pre, factor=g,
        params=params, tau_star=tau_star, g_star=g,
    )


def replacement_converse_factor(zeta: float, c: float,
                                tau: float | str = "optimize") -> float:
    """Factor of D((1-zeta) rho + zeta sigma || sigma) >= factor * D(rho||sigma)
    for rho <= c sigma; shares its optimizer with g_factor."""
    if tau == "optimize":
        g, _ = g_factor(zeta, c, variant="theorem")
        return g
    tau = float(tau)
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau!r}")
    return max(((1.0 - zeta) ** 2 * tau / (tau + zeta)
                * (1.0 - tau * (1.0 - math.log(tau)) / entropy.kappa(c))), 0.0)


def classical_converse_factor(params: ConverseBoundParams, branch: str) -> float:
    """Branch factors of the commuting-state converse.

    large-D branch (D >= a m^2 / 2):
        1 - eps - 2 f_m(eps) / (a m^2)
    small-D branch (D <= a m^2 / 2):
        (1 - a)(1 - eps)^2 / ((1 - eps)(1 - a) + eps g_tilde)
    Feasibility a m^2 > 2 f_m(eps)/(1 - eps) is enforced for both.
    """
    a = params.resolved_a()
    if not 0.0 < a < 1.0:
        raise InfeasibleParamsError(f"a must lie in (0, 1), got {a!r}")
    eps, m = params.eps, params.m_tilde
    f = entropy.f_almost_concavity(eps, m)
    if a * m * m <= 2.0 * f / (1.0 - eps):
        raise InfeasibleParamsError(
            f"infeasible triple: a m^2 = {a * m * m:.6g} but "
            f"2 f(eps)/(1-eps) = {2 * f / (1 - eps):.6g}")
    if branch == "large-D":
        return 1.0 - eps - 2.0 * f / (a * m * m)
    if branch == "small-D":
        return ((1.0 - a) * (1.0 - eps) ** 2
                / ((1.0 - eps) * (1.0 - a) + eps * params.g_tilde))
    raise ValueError(f"unknown branch {branch!r}")


def _check_commuting(*mats: np.ndarray, atol: float = 1e-10) -> None:
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            dev = float(np.abs(mats[i] @ mats[j] - mats[j] @ mats[i]).max())
            if dev > atol:
                raise ValueError(f"matrices {i} and {j} do not commute: |[.,.]| = {dev:.3e}")


def classical_converse_check(e: ConditionalExpectation, rho: DensityMatrix,
                             sigma: DensityMatrix,
                             params: ConverseBoundParams) -> BoundReport:
    """Commuting-state converse under the replacement semigroup.

    Noise keeps amplitude eps_keep = 1 - eps on the state and mixes in the
    shared fixed point E(rho) = E(sigma) with weight eps; the exact decayed
    relative entropy is compared against the branch factor.
    """
    e_rho = e.apply(rho)
    e_sigma = e.apply(sigma)
    _check_commuting(rho.matrix, sigma.matrix)
    _check_commuting(rho.matrix, e_rho.matrix)
    img_dev = matcore.trace_norm(e_rho.matrix - e_sigma.matrix)
    if img_dev > 1e-10:
        raise ValueError(f"E(rho) != E(sigma): trace distance {img_dev:.3e}")
    d_pre = entropy.relative_entropy(rho, sigma).unwrap()
    eps = params.eps
    mixed_rho = DensityMatrix.from_matrix(
        (1 - eps) * rho.matrix + eps * e_rho.matrix)
    mixed_sigma = DensityMatrix.from_matrix(
        (1 - eps) * sigma.matrix + eps * e_sigma.matrix)
    d_post = entropy.relative_entropy(mixed_rho, mixed_sigma).unwrap()
    a = params.resolved_a()
    branch = "large-D" if d_pre >= a * params.m_tilde ** 2 / 2.0 else "small-D"
    resolved = ConverseBoundParams(
        t=params.t, c=params.c, diamond=params.diamond, zeta=params.zeta,
        eps=eps, a=a, m_tilde=params.m_tilde, g_tilde=params.g_tilde,
        tau=params.tau)
    factor = classical_converse_factor(resolved, branch)
    return BoundReport(
        name=f"classical-converse[{branch}]",
        lhs=d_post, rhs=factor * d_pre, factor=factor, params=resolved,
        extra={"branch": branch, "dPre": d_pre},
    )


def smallest_nonzero_eigenvalue_direct_sum(sigma: DensityMatrix,
                                           e_sigma: DensityMatrix) -> float:
    """m_tilde: smallest nonzero eigenvalue of sigma (+) E(sigma) compressed
    to supp(sigma)."""
    vals = list(sigma.eigenvalues[sigma.support_mask()])
    p = sigma.support_projector()
    compressed = p @ e_sigma.matrix @ p
    w, _ = matcore.eigh(compressed)
    top = max(float(w[-1]), np.finfo(float).tiny)
    vals.extend(w[w > matcore.SUPPORT_RTOL * top])
    return float(min(vals))


def mutual_info_converse_check(e_on_b: ConditionalExpectation,
                               rho: BipartiteDensity,
                               params: ConverseBoundParams | None = None,
                               t: float = 0.0, c: float | None = None,
                               diamond: float | None = None) -> BoundReport:
    """Mutual-information converse for classical-classical states under
    replacement noise on the B side.

    m_tilde and g_tilde are computed from the pre-noise marginals; the
    underlying comparison is the commuting-state converse applied to
    sigma = rho_A x rho_B.
    """
    joint = rho.state.matrix
    off = float(np.abs(joint - np.diag(np.diagonal(joint))).max())
    if off > 1e-10:
        raise ValueError("input is not classical-classical (off-diagonal weight present)")
    rho_a = rho.marginal("A")
    rho_b = rho.marginal("B")
    e_rho_b = e_on_b.apply(rho_b)
    # the bound applies only when (Id x E)(rho) = rho_A x omega for some omega
    id_x_e = _right_factor_superop(e_on_b.superop, rho.dim_a)
    e_joint = id_x_e.apply_matrix(joint)
    target = matcore.tensor(rho_a.matrix, e_rho_b.matrix)
    if float(np.abs(e_joint - target).max()) > 1e-9:
        raise ValueError("(Id x E)(rho) is not of product form rho_A x omega")
    sigma = DensityMatrix.from_matrix(matcore.tensor(rho_a.matrix, rho_b.matrix))
    m_tilde = smallest_nonzero_eigenvalue_direct_sum(
        sigma, DensityMatrix.from_matrix(target))
    g_tilde = matcore.loewner_min_coefficient(e_rho_b, rho_b)
    if params is None:
        if c is None:
            c = channels.pimsner_popa_index(e_on_b)
        if diamond is None:
            diamond = 2.0
        params = ConverseBoundParams.from_semigroup(
            t, c, diamond, m_tilde=m_tilde, g_tilde=g_tilde)
    else:
        params = ConverseBoundParams(
            t=params.t, c=params.c, diamond=params.diamond, zeta=params.zeta,
            eps=params.eps, a=params.a, m_tilde=m_tilde, g_tilde=g_tilde,
            tau=params.tau)
    i_pre = entropy.mutual_information(rho)
    eps = params.eps
    mixed = DensityMatrix.from_matrix(
        (1 - eps) * joint + eps * e_joint)
    i_post = entropy.mutual_information(
        BipartiteDensity(rho.dim_a, rho.dim_b, mixed))
    a = params.resolved_a()
    branch = "large-D" if i_pre >= a * m_tilde ** 2 / 2.0 else "small-D"
    resolved = ConverseBoundParams(
        t=params.t, c=params.c, diamond=params.diamond, zeta=params.zeta,
        eps=eps, a=a, m_tilde=m_tilde, g_tilde=g_tilde, tau=params.tau)
    factor = classical_converse_factor(resolved, branch)
    return BoundReport(
        name=f"mutual-info-converse[{branch}]",
        lhs=i_post, rhs=factor * i_pre, factor=factor, params=resolved,
        extra={"branch": branch, "iPre": i_pre},
    )


def _right_factor_superop(sup: channels.SuperOperator, left_dim: int) -> channels.SuperOperator:
    """Id on a left factor tensor the given map on the right factor."""
    d, a = sup.dim, left_dim
    m4 = sup.matrix.reshape(d, d, d, d)
    eye = np.eye(a, dtype=complex)
    j8 = np.einsum("lkji,mn,op->mloknjpi", m4, eye, eye)
    da = d * a
    return channels.SuperOperator(da, j8.reshape(da * da, da * da))


def decayed_state_bound_check(rho: DensityMatrix, sigma: DensityMatrix,
                              theta_dens: DensityMatrix, omega: DensityMatrix,
                              eps: float, zeta: float,
                              c: float | None = None) -> BoundReport:
    """Partial-replacement comparison
    D((1-eps) rho + eps theta || (1-eps) sigma + eps theta)
      >= (zeta / (c eps)) ((1-eps)/(1-zeta))^2
         D((1-zeta) rho + zeta omega || (1-zeta) sigma + zeta omega)
    for theta <= c omega and eps >= zeta."""
    if c is None:
        c = matcore.loewner_min_coefficient(theta_dens, omega, strict=True)
        if not math.isfinite(c):
            raise ValueError("theta has weight outside supp(omega)")
        c = max(c, 1.0)
    else:
        check = matcore.loewner_min_coefficient(theta_dens, omega, strict=True)
        if check > c * (1 + 1e-9):
            w = check
            raise ValueError(f"order precondition fails: smallest valid c is {w!r}")
    if not (0.0 < zeta <= eps < 1.0):
        raise ValueError("need 0 < zeta <= eps < 1")
    lhs_rho = DensityMatrix.from_matrix((1 - eps) * rho.matrix + eps * theta_dens.matrix)
    lhs_sigma = DensityMatrix.from_matrix((1 - eps) * sigma.matrix + eps * theta_dens.matrix)
    rhs_rho = DensityMatrix.from_matrix((1 - zeta) * rho.matrix + zeta * omega.matrix)
    rhs_sigma = DensityMatrix.from_matrix((1 - zeta) * sigma.matrix + zeta * omega.matrix)
    lhs = entropy.relative_entropy(lhs_rho, lhs_sigma).unwrap()
    d_rhs = entropy.relative_entropy(rhs_rho, rhs_sigma).unwrap()
    factor = (zeta / (c * eps)) * ((1 - eps) / (1 - zeta)) ** 2
    params = ConverseBoundParams(c=c, zeta=zeta, eps=eps)
    return BoundReport(name="decayed-state", lhs=lhs, rhs=factor * d_rhs,
                       factor=factor, params=params, extra={"dRhs": d_rhs})


def origcompare_check(rho: DensityMatrix, sigma: DensityMatrix,
                      omega: DensityMatrix, eps: float, zeta: float) -> BoundReport:
    """Upper comparison of the original relative entropy by the mixed one:
    D(rho||sigma) <= (1/(1-eps)^2) (1 + eps (g/(1-zeta) - 1))
                     D((1-eps) rho + eps omega || (1-eps) sigma + eps omega)
    under rho >= (1-zeta) sigma."""
    if not (0.0 <= eps < 1.0 and 0.0 <= zeta < 1.0):
        raise ValueError("eps and zeta must lie in [0, 1)")
    floor = rho.matrix - (1 - zeta) * sigma.matrix
    wmin = float(matcore.eigh(floor)[0][0])
    if wmin < -1e-10:
        raise ValueError(f"precondition rho >= (1-zeta) sigma fails by {wmin!r}")
    p = sigma.support_projector()
    g = matcore.loewner_min_coefficient(p @ omega.matrix @ p, sigma)
    factor = (1.0 + eps * (g / (1 - zeta) - 1.0)) / (1 - eps) ** 2
    d_orig = entropy.relative_entropy(rho, sigma).unwrap()
    mixed_rho = DensityMatrix.from_matrix((1 - eps) * rho.matrix + eps * omega.matrix)
    mixed_sigma = DensityMatrix.from_matrix((1 - eps) * sigma.matrix + eps * omega.matrix)
    d_mixed = entropy.relative_entropy(mixed_rho, mixed_sigma).unwrap()
    # report in lhs >= rhs form: factor * D_mixed >= D_orig
    params = ConverseBoundParams(zeta=zeta, eps=eps, g_tilde=g)
    return BoundReport(name="origcompare", lhs=factor * d_mixed, rhs=d_orig,
                       factor=factor, params=params,
                       extra={"dOrig": d_orig, "dMixed": d_mixed})
