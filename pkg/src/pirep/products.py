"""Products of covariant representations over tensor-product correspondences
and the partial-isometry criteria for them.

Given factors (sigma, V^(1)), ..., (sigma, V^(n)) over E_1, ..., E_n on the
same space, the stage operators are

    T_1 = tilde^(1),     T_i = T_{i-1} . (I_{E_1 (x) ... (x) E_{i-1}} (x) tilde^(i)),

the lifts of the product representation on E_1 (x) ... (x) E_i.  The tests
here decide when the stages are partial isometries: a sufficient
intertwining identity, the commuting-projections equivalence for two
factors, the four-condition chain equivalence for n factors, the
pseudoinverse factorization equivalence, and the defect-dilation block
matrix.

Hypothesis failure is a distinct tri-state outcome, never conflated with a
false conclusion: functions either return None ("not applicable") where
documented or raise NotApplicable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numerics as nx
from .correspondence import FdCorrespondence, TensorSpace, amplify, interior_tensor, plain_space, tensor_product
from .covrep import CovariantRep, DEFAULT_TENSOR_CAP, rep_from_tilde
from .errors import DimensionMismatch, DomainError, NotApplicable
from .numerics import Subspace, Tolerance, eye, herm, opnorm


class ProductRep:
    """Ordered factors sharing the coefficient algebra, sigma, and H."""

    def __init__(self, factors, tol: Tolerance | None = None, *, tensor_cap: int = DEFAULT_TENSOR_CAP):
        factors = list(factors)
        if len(factors) < 2:
            raise DimensionMismatch("a product needs at least two factors")
        first = factors[0]
        for f in factors[1:]:
            if f.sigma != first.sigma:
                raise DimensionMismatch("factors must share sigma (algebra and multiplicities)")
        self.factors = factors
        self.sigma = first.sigma
        self.tol = tol or first.tol
        self.tensor_cap = tensor_cap
        self._prefix_corr: dict[int, FdCorrespondence] = {1: factors[0].corr}
        self._prefix_space: dict[int, TensorSpace] = {}
        self._stages: dict[int, np.ndarray] = {1: factors[0].tilde}

    @property
    def n(self) -> int:
        return len(self.factors)

    def prefix_corr(self, i: int) -> FdCorrespondence:
        """E_1 (x) ... (x) E_i."""
        if i not in self._prefix_corr:
            self._prefix_corr[i] = tensor_product(self.prefix_corr(i - 1), self.factors[i - 1].corr)
        return self._prefix_corr[i]

    def prefix_space(self, i: int) -> TensorSpace:
        if i == 0:
            return plain_space(self.sigma)
        if i not in self._prefix_space:
            self._prefix_space[i] = interior_tensor(self.prefix_corr(i), self.sigma, self.tol)
        return self._prefix_space[i]

    def amplified(self, i: int, x: np.ndarray, dom: TensorSpace, cod: TensorSpace) -> np.ndarray:
        """I_{E_1 (x) ... (x) E_i} (x) X."""
        mat, _, _ = amplify(
            self.prefix_corr(i), x, dom, cod, self.sigma, self.tol, dim_cap=self.tensor_cap
        )
        return mat

    def stage(self, i: int) -> np.ndarray:
        """The lift of the product of the first i factors."""
        if not 1 <= i <= self.n:
            raise DimensionMismatch(f"stage index {i} out of range 1..{self.n}")
        if i not in self._stages:
            prev = self.stage(i - 1)
            fac = self.factors[i - 1]
            amp = self.amplified(i - 1, fac.tilde, fac.space(1), plain_space(self.sigma))
            self._stages[i] = prev @ amp
        return self._stages[i]

    @property
    def tilde(self) -> np.ndarray:
        return self.stage(self.n)

    def as_rep(self, i: int | None = None) -> CovariantRep:
        """The product of the first i factors as a single representation."""
        i = self.n if i is None else i
        return rep_from_tilde(
            self.prefix_corr(i), self.sigma, self.stage(i), self.tol, tensor_cap=self.tensor_cap
        )

    def check_defining_formula(self, rng: np.random.Generator, samples: int = 10) -> float:
        """Worst residual of stage_n(xi_1 (x) ... (x) xi_n (x) h) =
        V^(1)(xi_1) ... V^(n)(xi_n) h on random simple tensors."""
        worst = 0.0
        space = self.prefix_space(self.n)
        d = self.sigma.h_dim
        for _ in range(samples):
            xis = [
                (rng.standard_normal(f.corr.module_dim) + 1j * rng.standard_normal(f.corr.module_dim))
                for f in self.factors
            ]
            h = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            formal = xis[0]
            for xi in xis[1:]:
                formal = np.kron(formal, xi)
            lhs = self.tilde @ space.coords_of_simple(formal, h)
            rhs = h
            for f, xi in zip(reversed(self.factors), reversed(xis)):
                rhs = sum(c * v for c, v in zip(xi, f.v_on_basis)) @ rhs
            worst = max(worst, float(np.linalg.norm(lhs - rhs)))
        return worst


def product_rep(factors, tol: Tolerance | None = None, **kw) -> ProductRep:
    return ProductRep(factors, tol, **kw)


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


def sufficient_intertwining_check(rep1: CovariantRep, rep2: CovariantRep, tol: Tolerance | None = None):
    """Sufficient condition for the two-factor product to be partially
    isometric:

        tilde1 (I (x) tilde2 tilde2*) = tilde2 tilde2* tilde1.

    Returns True/False, or None when either factor is not partially
    isometric (the condition is then not applicable).
    """
    tol = tol or rep1.tol
    if not (rep1.is_partial_isometric() and rep2.is_partial_isometric()):
        return None
    prod = ProductRep([rep1, rep2], tol)
    final2 = rep2.tilde @ herm(rep2.tilde)
    amp = prod.amplified(1, final2, plain_space(prod.sigma), plain_space(prod.sigma))
    lhs = rep1.tilde @ amp
    rhs = final2 @ rep1.tilde
    return opnorm(lhs - rhs) <= tol.eq_rel * max(1.0, opnorm(rep1.tilde))


@dataclass(frozen=True)
class CommutingProjectionResult:
    product_is_pi: bool
    projections_commute: bool
    commutator_norm: float
    product_residual: float
    ef_norm: float  # ||E F||; idempotents of norm 1 + eps are borderline, so report it

    def to_dict(self):
        return {
            "product_is_pi": self.product_is_pi,
            "projections_commute": self.projections_commute,
            "commutator_norm": self.commutator_norm,
            "product_residual": self.product_residual,
            "ef_norm": self.ef_norm,
        }


def commuting_projection_test(
    rep1: CovariantRep, rep2: CovariantRep, tol: Tolerance | None = None
) -> CommutingProjectionResult:
    """Two partially isometric factors: the product lift is a partial
    isometry iff the initial projection of the first factor commutes with
    the amplified final projection of the second."""
    tol = tol or rep1.tol
    if not rep1.is_partial_isometric():
        raise NotApplicable("first factor is not partially isometric")
    if not rep2.is_partial_isometric():
        raise NotApplicable("second factor is not partially isometric")
    prod = ProductRep([rep1, rep2], tol)
    # both projections act on E_1 (x) H
    e_proj = herm(rep1.tilde) @ rep1.tilde
    f_proj = rep1.amplified(rep2.tilde @ herm(rep2.tilde), 1, 0, 0)
    commutator = opnorm(e_proj @ f_proj - f_proj @ e_proj)
    t2 = prod.stage(2)
    residual = opnorm(t2 @ herm(t2) @ t2 - t2)
    return CommutingProjectionResult(
        product_is_pi=nx.is_partial_isometry(t2, tol),
        projections_commute=commutator <= tol.eq_rel,
        commutator_norm=commutator,
        product_residual=residual,
        ef_norm=opnorm(e_proj @ f_proj),
    )


@dataclass(frozen=True)
class ChainConditionReport:
    """Per-stage data for the four-condition product criterion.

    Stage s (1-based, s = 1..n-1) concerns appending factor s+1 to the
    product of the first s factors:

      stage_pi[s-1]          the (s+1)-stage lift is a partial isometry
      range_invariant[s-1]   (I (x) W W*) R(T_s*) <= R(T_s*)
      domain_invariant[s-1]  T_s* T_s R(I (x) W) <= R(I (x) W)
      idempotent[s-1]        P_{R(T_s*)} P_{R(I (x) W)} is idempotent

    with W the lift of factor s+1.  The four raw flags provably coincide
    up to and including the first failing stage; the cumulative
    (conjunction-so-far) vectors coincide at every stage and carry the
    theorem's content.
    """

    stage_pi: list
    range_invariant: list
    domain_invariant: list
    idempotent: list
    residuals: list

    def cumulative(self) -> dict:
        def conj(flags):
            out, ok = [], True
            for f in flags:
                ok = ok and bool(f)
                out.append(ok)
            return out

        return {
            "stage_pi": conj(self.stage_pi),
            "range_invariant": conj(self.range_invariant),
            "domain_invariant": conj(self.domain_invariant),
            "idempotent": conj(self.idempotent),
        }

    def cumulative_agree(self) -> bool:
        c = self.cumulative()
        vectors = list(c.values())
        return all(v == vectors[0] for v in vectors)

    def raw_agree_until_first_failure(self) -> bool:
        rows = list(zip(self.stage_pi, self.range_invariant, self.domain_invariant, self.idempotent))
        for row in rows:
            if len(set(row)) > 1:
                return False
            if not row[0]:
                return True
        return True

    def to_dict(self):
        return {
            "stage_pi": list(self.stage_pi),
            "range_invariant": list(self.range_invariant),
            "domain_invariant": list(self.domain_invariant),
            "idempotent": list(self.idempotent),
            "cumulative": self.cumulative(),
            "residuals": list(self.residuals),
        }


def chain_condition_test(factors, tol: Tolerance | None = None) -> ChainConditionReport:
    """Evaluate the four equivalent stagewise conditions for a product of
    partially isometric factors."""
    factors = list(factors)
    tol = tol or factors[0].tol
    for i, f in enumerate(factors):
        if not f.is_partial_isometric():
            raise NotApplicable(f"factor {i + 1} is not partially isometric")
    prod = ProductRep(factors, tol)
    stage_pi, range_inv, dom_inv, idem, residuals = [], [], [], [], []
    for s in range(1, prod.n):
        t_s = prod.stage(s)
        fac = factors[s]
        w_amp = prod.amplified(s, fac.tilde, fac.space(1), plain_space(prod.sigma))
        t_next = prod.stage(s + 1)
        pi_res = opnorm(t_next @ herm(t_next) @ t_next - t_next)
        stage_pi.append(nx.is_partial_isometry(t_next, tol))
        initial_range = Subspace(nx.range_frame(herm(t_s), tol, scale_floor=1.0))
        final_w = fac.tilde @ herm(fac.tilde)
        amp_final_w = prod.amplified(s, final_w, plain_space(prod.sigma), plain_space(prod.sigma))
        range_inv.append(nx.is_subset(nx.image(amp_final_w, initial_range, tol), initial_range, tol))
        w_range = Subspace(nx.range_frame(w_amp, tol, scale_floor=1.0))
        dom_inv.append(nx.is_subset(nx.image(herm(t_s) @ t_s, w_range, tol), w_range, tol))
        q = initial_range.projector() @ w_range.projector()
        idem_res = opnorm(q @ q - q)
        idem.append(idem_res <= tol.eq_rel)
        residuals.append({"stage_pi": pi_res, "idempotent": idem_res})
    return ChainConditionReport(stage_pi, range_inv, dom_inv, idem, residuals)


@dataclass(frozen=True)
class PinvFactorizationResult:
    is_pi: bool
    pinv_factors_match: bool
    chain_residual: float

    def to_dict(self):
        return {
            "is_pi": self.is_pi,
            "pinv_factors_match": self.pinv_factors_match,
            "chain_residual": self.chain_residual,
        }


def pinv_factorization_test(factors, tol: Tolerance | None = None) -> PinvFactorizationResult:
    """The product lift is a partial isometry iff its Moore-Penrose inverse
    equals the reversed chain of amplified factor pseudoinverses."""
    factors = list(factors)
    tol = tol or factors[0].tol
    for i, f in enumerate(factors):
        if not f.is_partial_isometric():
            raise NotApplicable(f"factor {i + 1} is not partially isometric")
    prod = ProductRep(factors, tol)
    t_n = prod.tilde
    direct = nx.pseudoinverse(t_n, tol)
    chain = nx.pseudoinverse(factors[0].tilde, tol)
    for i in range(1, prod.n):
        fac = factors[i]
        dagger = nx.pseudoinverse(fac.tilde, tol)
        amp = prod.amplified(i, dagger, plain_space(prod.sigma), fac.space(1))
        chain = amp @ chain
    residual = opnorm(direct - chain)
    scale = max(1.0, opnorm(direct))
    return PinvFactorizationResult(
        is_pi=nx.is_partial_isometry(t_n, tol),
        pinv_factors_match=residual <= tol.eq_rel * scale,
        chain_residual=residual,
    )


@dataclass(frozen=True)
class DefectDilationResult:
    matrix: np.ndarray = field(repr=False)
    m_is_pi: bool = False
    rep1_is_pi: bool = False

    def to_dict(self):
        return {"m_is_pi": self.m_is_pi, "rep1_is_pi": self.rep1_is_pi}


def single_defect_dilation(rep: CovariantRep, tol: Tolerance | None = None) -> np.ndarray:
    """[[tilde, (I - tilde tilde*)^(1/2)], [0, 0]]: a partial isometry for
    every completely contractive representation."""
    tol = tol or rep.tol
    if not rep.classify().is_contractive:
        raise DomainError("defect dilation needs a contractive representation")
    d = rep.h_dim
    defect = nx.psd_sqrt(eye(d) - rep.tilde @ herm(rep.tilde), tol)
    top = np.hstack([rep.tilde, defect])
    return np.vstack([top, np.zeros_like(top)])


def defect_dilation_test(
    rep1: CovariantRep, rep2: CovariantRep, tol: Tolerance | None = None
) -> DefectDilationResult:
    """Assemble
        M = [[T_2, tilde1 (I (x) (I - tilde2 tilde2*))^(1/2)], [0, 0]]
    for contractive factors; M is a partial isometry iff the first factor
    is partially isometric."""
    tol = tol or rep1.tol
    for i, rep in enumerate((rep1, rep2)):
        if not rep.classify().is_contractive:
            raise DomainError(f"factor {i + 1} is not contractive")
    prod = ProductRep([rep1, rep2], tol)
    d = rep1.h_dim
    # amplification commutes with functional calculus, so
    # (I (x) (I - tilde2 tilde2*))^{1/2} = I (x) (I - tilde2 tilde2*)^{1/2}
    defect_root = nx.psd_sqrt(eye(d) - rep2.tilde @ herm(rep2.tilde), tol)
    amp_root = prod.amplified(1, defect_root, plain_space(prod.sigma), plain_space(prod.sigma))
    top_left = prod.stage(2)
    top_right = rep1.tilde @ amp_root
    top = np.hstack([top_left, top_right])
    m = np.vstack([top, np.zeros_like(top)])
    return DefectDilationResult(
        matrix=m,
        m_is_pi=nx.is_partial_isometry(m, tol),
        rep1_is_pi=rep1.is_partial_isometric(),
    )
