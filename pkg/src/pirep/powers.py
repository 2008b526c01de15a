"""Power and root criteria for partially isometric representations.

The power-side results relate, for the lift T = tilde of a partially
isometric representation,

    (a)  T_m is a partial isometry for every m <= n,
    (b)  (I_{E^(m-1)} (x) T) N(T_m)^perp  <=  N(T_{m-1})^perp for m <= n,
    (c)  (I_{E^(m-1)} (x) T T*) N(T_{m-1}) <=  N(T_{m-1})     for m <= n,

with T_0 = I_H, so the m = 1 instances are vacuous.  (b) and (c) are
equivalent for every m unconditionally; (a) and (b) are equivalent as
conjunctions over m.  The root side goes the other way: from a partial
isometry T_k, k >= 2, back to T, through an isometry condition and an
orthogonality condition on the amplified lift.

Certification is finite and explicit: a report states the bound it was
computed to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics as nx
from .covrep import CovariantRep
from .errors import NotApplicable, DimensionMismatch
from .numerics import Subspace, eye, herm, opnorm


def _amplified_tilde(rep: CovariantRep, m: int) -> np.ndarray:
    """I_{E^(m-1)} (x) tilde : space(m) -> space(m-1)."""
    if m == 1:
        return rep.tilde
    return rep.amplified(rep.tilde, m - 1, 1, 0)


def cokernel_subspace(rep: CovariantRep, m: int) -> Subspace:
    """N(tilde_m)^perp inside space(m); tilde_0 = I makes m = 0 all of H."""
    if m == 0:
        return Subspace.whole(rep.h_dim)
    return Subspace(nx.range_frame(herm(rep.tilde_power(m)), rep.tol, scale_floor=1.0))


def kernel_subspace(rep: CovariantRep, m: int) -> Subspace:
    if m == 0:
        return Subspace.zero(rep.h_dim)
    return Subspace(nx.kernel_frame(rep.tilde_power(m), rep.tol, scale_floor=1.0))


def kernel_chain_condition(rep: CovariantRep, m: int) -> bool:
    """(I_{E^(m-1)} (x) tilde) N(tilde_m)^perp <= N(tilde_{m-1})^perp."""
    if m < 1:
        raise DimensionMismatch("kernel_chain_condition needs m >= 1")
    tol = rep.tol
    moved = nx.image(_amplified_tilde(rep, m), cokernel_subspace(rep, m), tol)
    return nx.is_subset(moved, cokernel_subspace(rep, m - 1), tol)


def range_invariance_condition(rep: CovariantRep, m: int) -> bool:
    """(I_{E^(m-1)} (x) tilde tilde*) N(tilde_{m-1}) <= N(tilde_{m-1})."""
    if m < 1:
        raise DimensionMismatch("range_invariance_condition needs m >= 1")
    tol = rep.tol
    final = rep.tilde @ herm(rep.tilde)
    amp = rep.amplified(final, m - 1, 0, 0)
    kernel = kernel_subspace(rep, m - 1)
    return nx.is_subset(nx.image(amp, kernel, tol), kernel, tol)


@dataclass(frozen=True)
class PowerReport:
    """Per-power partial-isometry flags and the two chain conditions,
    certified up to the stated bound."""

    n_max: int
    applicable: bool
    pi_flags: list
    chain_flags: list
    range_flags: list
    residuals: list

    def cumulative_pi(self):
        out, ok = [], True
        for f in self.pi_flags:
            ok = ok and bool(f)
            out.append(ok)
        return out

    def cumulative_chain(self):
        out, ok = [], True
        for f in self.chain_flags:
            ok = ok and bool(f)
            out.append(ok)
        return out

    def to_dict(self):
        return {
            "n_max": self.n_max,
            "applicable": self.applicable,
            "pi_flags": list(self.pi_flags),
            "chain_flags": list(self.chain_flags),
            "range_flags": list(self.range_flags),
            "residuals": list(self.residuals),
        }


def power_report(rep: CovariantRep, n_max: int) -> PowerReport:
    """Fill all three flag vectors for m = 1..n_max.

    Marked not applicable when the representation itself is not partially
    isometric (the power criteria presuppose it)."""
    tol = rep.tol
    applicable = rep.is_partial_isometric()
    if not applicable:
        return PowerReport(n_max, False, [], [], [], [])
    pi_flags, chain_flags, range_flags, residuals = [], [], [], []
    for m in range(1, n_max + 1):
        tm = rep.tilde_power(m)
        res = opnorm(tm @ herm(tm) @ tm - tm)
        pi_flags.append(nx.is_partial_isometry(tm, tol))
        chain_flags.append(kernel_chain_condition(rep, m))
        range_flags.append(range_invariance_condition(rep, m))
        residuals.append(res)
    return PowerReport(n_max, True, pi_flags, chain_flags, range_flags, residuals)


# ---------------------------------------------------------------------------
# generalized range and regularity
# ---------------------------------------------------------------------------


def iterated_range(rep: CovariantRep, x: np.ndarray | None = None) -> Subspace:
    """Intersection of the nested ranges R(X_m), computed by the fixed-point
    iteration S -> X(E (x) S); stabilizes within dim H steps because the
    ranges are decreasing."""
    tol = rep.tol
    x = rep.tilde if x is None else nx.as_matrix(x)
    current = Subspace.whole(rep.h_dim)
    for _ in range(rep.h_dim + 1):
        amp = rep.amplified(current.projector(), 1, 0, 0)
        nxt = Subspace(nx.range_frame(x @ amp, tol, scale_floor=1.0))
        if nxt.dim == current.dim:
            return nxt
        current = nxt
    return current


def generalized_range(rep: CovariantRep) -> Subspace:
    """R^infty: the intersection of the ranges of all tensor powers."""
    return iterated_range(rep)


def is_regular(rep: CovariantRep) -> bool:
    """N(tilde) <= E (x) R^infty (closed range is automatic here)."""
    tol = rep.tol
    rinf = generalized_range(rep)
    amp = rep.amplified(rinf.projector(), 1, 0, 0)
    e_tensor_rinf = Subspace(nx.range_frame(amp, tol, scale_floor=1.0))
    return nx.is_subset(rep.kernel_subspace(1), e_tensor_rinf, tol)


@dataclass(frozen=True)
class GeneralizedInverseReport:
    is_gen_inverse: bool
    identity_residuals: dict
    lemma_holds_up_to: int

    def to_dict(self):
        return {
            "is_gen_inverse": self.is_gen_inverse,
            "identity_residuals": dict(self.identity_residuals),
            "lemma_holds_up_to": self.lemma_holds_up_to,
        }


def generalized_inverse_check(
    rep: CovariantRep, s: np.ndarray, m_bound: int = 3
) -> GeneralizedInverseReport:
    """Check S tilde S = S and tilde S tilde = tilde for S : H -> E (x) H;
    for a regular representation with a generalized inverse, also verify
    the kernel-step inclusions

        (I_{E^(x m)} (x) S) N(tilde_m) <= N(tilde_{m+1}),  m <= m_bound,

    reporting the largest verified m."""
    tol = rep.tol
    s = nx.as_matrix(s)
    space1 = rep.space(1)
    if s.shape != (space1.dim, rep.h_dim):
        raise DimensionMismatch(f"S must map H to E (x) H, got shape {s.shape}")
    t = rep.tilde
    res_s = opnorm(s @ t @ s - s)
    res_t = opnorm(t @ s @ t - t)
    ok = res_s <= tol.eq_rel * max(1.0, opnorm(s)) and res_t <= tol.eq_rel * max(1.0, opnorm(t))
    up_to = 0
    if ok and is_regular(rep):
        for m in range(1, m_bound + 1):
            amp_s = rep.amplified(s, m, 0, 1)
            moved = nx.image(amp_s, kernel_subspace(rep, m), tol)
            if not nx.is_subset(moved, kernel_subspace(rep, m + 1), tol):
                break
            up_to = m
    return GeneralizedInverseReport(
        is_gen_inverse=ok,
        identity_residuals={"S_tilde_S": res_s, "tilde_S_tilde": res_t},
        lemma_holds_up_to=up_to,
    )


@dataclass(frozen=True)
class RegularPowerResult:
    is_pi: bool
    is_power_pi_up_to: int

    def to_dict(self):
        return {"is_pi": self.is_pi, "is_power_pi_up_to": self.is_power_pi_up_to}


def regular_pi_iff_power_pi(rep: CovariantRep, bound: int = 4) -> RegularPowerResult:
    """For regular representations, partial isometry of the lift is
    equivalent to all powers being partial isometries; reports the largest
    certified power."""
    if not is_regular(rep):
        raise NotApplicable("representation is not regular")
    tol = rep.tol
    is_pi = rep.is_partial_isometric()
    up_to = 0
    for m in range(1, bound + 1):
        if nx.is_partial_isometry(rep.tilde_power(m), tol):
            up_to = m
        else:
            break
    return RegularPowerResult(is_pi=is_pi, is_power_pi_up_to=up_to)


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootCriterionResult:
    """Root test data: with T_k a partial isometry (hypothesis_ok), the
    representation is partially isometric iff the amplified lift is
    isometric on D = N(T_k) (-) N(I (x) T) (cond_a) and maps N(T_k)^perp
    and D onto orthogonal subspaces (cond_b)."""

    hypothesis_ok: bool
    cond_a: bool
    cond_b: bool
    rep_is_pi: bool
    isometry_defect: float
    orthogonality_defect: float

    def to_dict(self):
        return {
            "hypothesis_ok": self.hypothesis_ok,
            "cond_a": self.cond_a,
            "cond_b": self.cond_b,
            "rep_is_pi": self.rep_is_pi,
            "isometry_defect": self.isometry_defect,
            "orthogonality_defect": self.orthogonality_defect,
        }


def root_criterion(rep: CovariantRep, k: int) -> RootCriterionResult:
    """Decide the root criterion at power k >= 2.

    Applicable to contractive representations of full correspondences;
    N(I (x) tilde) <= N(tilde_k) holds exactly in theory, and a failure
    beyond tolerance is reported as a numeric inconsistency."""
    if k < 2:
        raise DimensionMismatch("root criterion needs k >= 2")
    tol = rep.tol
    if not rep.corr.is_full(tol):
        raise NotApplicable("correspondence is not full")
    if not rep.classify().is_contractive:
        raise NotApplicable("representation is not contractive")
    hypothesis_ok = nx.is_partial_isometry(rep.tilde_power(k), tol)
    w = _amplified_tilde(rep, k)  # I_{E^(k-1)} (x) tilde : space(k) -> space(k-1)
    n_k = kernel_subspace(rep, k)
    n_w = Subspace(nx.kernel_frame(w, tol, scale_floor=1.0))
    if not nx.is_subset(n_w, n_k, tol):
        raise NotApplicable(
            "numeric inconsistency: N(I (x) tilde) escapes N(tilde_k) beyond tolerance"
        )
    d_sub = nx.ominus(n_k, n_w, tol)
    if d_sub.dim == 0:
        cond_a, iso_defect = True, 0.0
    else:
        gram = herm(d_sub.frame) @ herm(w) @ w @ d_sub.frame
        iso_defect = opnorm(gram - eye(d_sub.dim))
        cond_a = iso_defect <= tol.eq_rel
    img_cokernel = nx.image(w, cokernel_subspace(rep, k), tol)
    img_d = nx.image(w, d_sub, tol)
    ortho_defect = opnorm(herm(img_cokernel.frame) @ img_d.frame)
    cond_b = ortho_defect <= tol.incl_abs
    return RootCriterionResult(
        hypothesis_ok=hypothesis_ok,
        cond_a=cond_a,
        cond_b=cond_b,
        rep_is_pi=rep.is_partial_isometric(),
        isometry_defect=iso_defect,
        orthogonality_defect=ortho_defect,
    )


@dataclass(frozen=True)
class KernelMatchResult:
    applicable: bool
    rep_is_pi: bool

    def to_dict(self):
        return {"applicable": self.applicable, "rep_is_pi": self.rep_is_pi}


def kernel_match_criterion(rep: CovariantRep, k: int) -> KernelMatchResult:
    """Simplified root test: if N(I_E (x) tilde) = N(tilde_2) and some
    tilde_k (k >= 2) is a partial isometry, the representation is
    partially isometric.  ``applicable`` reports the kernel equality."""
    if k < 2:
        raise DimensionMismatch("kernel match criterion needs k >= 2")
    tol = rep.tol
    if not rep.corr.is_full(tol):
        raise NotApplicable("correspondence is not full")
    if not rep.classify().is_contractive:
        raise NotApplicable("representation is not contractive")
    if not nx.is_partial_isometry(rep.tilde_power(k), tol):
        raise NotApplicable(f"tilde_{k} is not a partial isometry")
    amp = rep.amplified(rep.tilde, 1, 1, 0)  # I_E (x) tilde : space(2) -> space(1)
    n_amp = Subspace(nx.kernel_frame(amp, tol, scale_floor=1.0))
    n_2 = kernel_subspace(rep, 2)
    applicable = nx.is_subset(n_amp, n_2, tol) and nx.is_subset(n_2, n_amp, tol)
    return KernelMatchResult(applicable=applicable, rep_is_pi=rep.is_partial_isometric())


def orthogonality_from_chain(rep: CovariantRep, k: int) -> dict:
    """Companion fact to the root test: if cond_a holds and the chain
    inclusion (I (x) tilde) N(tilde_k)^perp <= N(tilde_{k-1})^perp holds,
    then cond_b holds."""
    res = root_criterion(rep, k)
    chain = kernel_chain_condition(rep, k)
    return {
        "cond_a": res.cond_a,
        "chain": chain,
        "cond_b": res.cond_b,
        "implication_holds": (not (res.cond_a and chain)) or res.cond_b,
    }
