"""Covariant representations, their lifted operators, tensor powers,
pseudoinverse chains, classification, and reducing-subspace restriction.

A covariant pair (sigma, V) is stored through the matrices V(xi_a) on the
module basis.  Its working avatar is the lift

    tilde :  E (x)_sigma H  ->  H,     tilde(xi (x) h) = V(xi) h,

which intertwines the induced left action with sigma.  Tensor powers are
built by the defining composition

    tilde_m = tilde . (I_E (x) tilde) ... (I_{E^(m-1)} (x) tilde)

and cached; representations are immutable apart from these idempotent
caches, so concurrent readers are safe (duplicated fills are harmless).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics as nx
from .correspondence import (
    FdCorrespondence,
    StarRepresentation,
    TensorSpace,
    amplify,
    interior_tensor,
    plain_space,
    tensor_product,
)
from .errors import (
    DimensionMismatch,
    DomainError,
    InvalidRepresentation,
    ResourceLimit,
)
from .numerics import DEFAULT_TOL, Subspace, Tolerance, as_matrix, eye, herm, opnorm

DEFAULT_TENSOR_CAP = 2**18


@dataclass(frozen=True)
class ClassificationReport:
    """Verdicts plus the residuals of all six partial-isometry conditions.

    The partial-isometry verdict is the triple-product condition
    ||T T* T - T|| <= eq_rel ||T||; the remaining five are diagnostics.
    ``consistent`` is False when the six disagree beyond tolerance, which
    is reported, never silently resolved.
    """

    is_contractive: bool
    is_isometric: bool
    is_partial_isometric: bool
    norm: float
    isometry_residual: float
    condition_residuals: dict
    condition_verdicts: dict
    consistent: bool

    def to_dict(self) -> dict:
        return {
            "is_contractive": self.is_contractive,
            "is_isometric": self.is_isometric,
            "is_partial_isometric": self.is_partial_isometric,
            "norm": self.norm,
            "isometry_residual": self.isometry_residual,
            "condition_residuals": dict(self.condition_residuals),
            "condition_verdicts": dict(self.condition_verdicts),
            "consistent": self.consistent,
        }


def classify_operator(m, tol: Tolerance = DEFAULT_TOL) -> ClassificationReport:
    """Classification of a bare operator (used on lifts and their powers)."""
    a = as_matrix(m)
    conditions = nx.partial_isometry_conditions(a, tol)
    norm = opnorm(a)
    iso_res = opnorm(herm(a) @ a - eye(a.shape[1]))
    return ClassificationReport(
        is_contractive=norm <= 1.0 + tol.eq_rel,
        is_isometric=iso_res <= tol.eq_rel * max(1.0, norm) ** 2,
        is_partial_isometric=conditions["verdicts"]["triple_product"],
        norm=norm,
        isometry_residual=iso_res,
        condition_residuals=conditions["residuals"],
        condition_verdicts=conditions["verdicts"],
        consistent=conditions["unanimous"],
    )


class CovariantRep:
    """The pair (sigma, V) with its lift and cached tensor powers."""

    def __init__(
        self,
        corr: FdCorrespondence,
        sigma: StarRepresentation,
        v_on_basis,
        tol: Tolerance = DEFAULT_TOL,
        *,
        validate: bool = True,
        tensor_cap: int = DEFAULT_TENSOR_CAP,
    ):
        if corr.algebra != sigma.algebra:
            raise DimensionMismatch("correspondence and representation algebras differ")
        self.corr = corr
        self.sigma = sigma
        self.tol = tol
        self.tensor_cap = tensor_cap
        d = sigma.h_dim
        vs = [as_matrix(v) for v in v_on_basis]
        if len(vs) != corr.module_dim or any(v.shape != (d, d) for v in vs):
            raise DimensionMismatch(
                f"need {corr.module_dim} matrices of shape ({d}, {d})"
            )
        self.v_on_basis = vs
        self._spaces: dict[int, TensorSpace] = {}
        self._corr_powers: dict[int, FdCorrespondence] = {1: corr}
        self._powers: dict[int, np.ndarray] = {}
        self._tilde = self._build_tilde()
        if validate:
            self._validate_covariance()

    # -- spaces -------------------------------------------------------------

    def corr_power(self, m: int) -> FdCorrespondence:
        if m < 1:
            raise DimensionMismatch("corr_power needs m >= 1")
        if m not in self._corr_powers:
            self._corr_powers[m] = tensor_product(self.corr_power(m - 1), self.corr)
        return self._corr_powers[m]

    def space(self, m: int) -> TensorSpace:
        """E^(x m) (x)_sigma H; m = 0 is H itself."""
        if m == 0:
            return plain_space(self.sigma)
        if m not in self._spaces:
            corr = self.corr_power(m)
            if corr.module_dim * self.sigma.h_dim > self.tensor_cap:
                raise ResourceLimit(
                    f"tensor space dimension {corr.module_dim * self.sigma.h_dim}"
                    f" exceeds the cap {self.tensor_cap}"
                )
            self._spaces[m] = interior_tensor(corr, self.sigma, self.tol)
        return self._spaces[m]

    @property
    def h_dim(self) -> int:
        return self.sigma.h_dim

    # -- the lift and its powers ---------------------------------------------

    def _build_tilde(self) -> np.ndarray:
        space = self.space(1)
        if not self.v_on_basis:
            return np.zeros((self.h_dim, space.dim), dtype=np.complex128)
        formal = np.hstack(self.v_on_basis)  # column (b, j) is V(xi_b) e_j
        return formal if space.lift is None else formal @ space.lift

    def _validate_covariance(self):
        tol = self.tol
        scale = max([1.0] + [opnorm(v) for v in self.v_on_basis])
        if not self.corr.algebra.is_scalar:
            basis = self.corr.algebra.basis()
            for a in basis:
                la = self.corr.left(a)
                sa = self.sigma.apply(a)
                for c in basis:
                    rc = self.corr.right(c)
                    sc = self.sigma.apply(c)
                    w = la @ rc
                    for b in range(self.corr.module_dim):
                        lhs = sum(w[y, b] * self.v_on_basis[y] for y in range(self.corr.module_dim))
                        rhs = sa @ self.v_on_basis[b] @ sc
                        if opnorm(lhs - rhs) > tol.eq_rel * max(1.0, scale):
                            raise InvalidRepresentation(
                                "bimodule covariance V(a xi c) = sigma(a) V(xi) sigma(c) fails"
                            )
        resid = self.intertwining_residual()
        if resid > tol.eq_rel * max(1.0, scale):
            raise InvalidRepresentation(
                f"lift does not intertwine the left action (residual {resid:.3e})"
            )

    def intertwining_residual(self) -> float:
        """Residual of tilde (phi(a) (x) I) = sigma(a) tilde over the algebra basis."""
        if self.corr.algebra.is_scalar:
            return 0.0
        space = self.space(1)
        worst = 0.0
        for a in self.corr.algebra.basis():
            worst = max(
                worst,
                opnorm(self._tilde @ space.induced_action(a) - self.sigma.apply(a) @ self._tilde),
            )
        return worst

    @property
    def tilde(self) -> np.ndarray:
        return self._tilde

    def tilde_power(self, m: int) -> np.ndarray:
        """tilde_m = tilde . (I_E (x) tilde) ... (I_{E^(m-1)} (x) tilde)."""
        if m < 1:
            raise DimensionMismatch("tilde_power needs m >= 1")
        if m in self._powers:
            return self._powers[m]
        if m == 1:
            mat = self._tilde
        else:
            prev = self.tilde_power(m - 1)
            mat = self._compose_amplified(prev, m)
        self._powers[m] = mat
        return mat

    def _compose_amplified(self, prev: np.ndarray, m: int) -> np.ndarray:
        """prev @ (I_{E^(m-1)} (x) tilde), never materializing the block
        diagonal on the identity-coordinate fast path."""
        dom = self.space(1)
        sm = self.space(m)  # enforces the cap
        sm1 = self.space(m - 1)
        if dom.embed is None and sm.embed is None and sm1.embed is None:
            k = self.corr_power(m - 1).module_dim
            d = self.h_dim
            blocks = [prev[:, j * d : (j + 1) * d] @ self._tilde for j in range(k)]
            return np.hstack(blocks) if blocks else np.zeros((d, 0), dtype=np.complex128)
        amp, _, _ = amplify(
            self.corr_power(m - 1),
            self._tilde,
            dom,
            self.space(0),
            self.sigma,
            self.tol,
            dim_cap=self.tensor_cap,
        )
        return prev @ amp

    def amplified(self, x: np.ndarray, m: int, dom_power: int, cod_power: int) -> np.ndarray:
        """I_{E^(x m)} (x) X for X : space(dom_power) -> space(cod_power)."""
        if m == 0:
            return as_matrix(x)
        mat, _, _ = amplify(
            self.corr_power(m),
            x,
            self.space(dom_power),
            self.space(cod_power),
            self.sigma,
            self.tol,
            dim_cap=self.tensor_cap,
        )
        return mat

    def pinv_chain(self, m: int) -> np.ndarray:
        """(I_{E^(m-1)} (x) pinv(tilde)) ... (I_E (x) pinv(tilde)) pinv(tilde)."""
        if m < 1:
            raise DimensionMismatch("pinv_chain needs m >= 1")
        dagger = nx.pseudoinverse(self._tilde, self.tol)
        out = dagger
        for j in range(1, m):
            out = self.amplified(dagger, j, 0, 1) @ out
        return out

    # -- classification -------------------------------------------------------

    def classify(self) -> ClassificationReport:
        return classify_operator(self._tilde, self.tol)

    def is_partial_isometric(self) -> bool:
        return self.classify().is_partial_isometric

    # -- subspaces -------------------------------------------------------------

    def kernel_subspace(self, m: int = 1) -> Subspace:
        """N(tilde_m), inside space(m); unit scale floor (lifts are O(1))."""
        return Subspace(nx.kernel_frame(self.tilde_power(m), self.tol, scale_floor=1.0))

    def range_subspace(self, m: int = 1) -> Subspace:
        """R(tilde_m), inside H; unit scale floor."""
        return Subspace(nx.range_frame(self.tilde_power(m), self.tol, scale_floor=1.0))

    # -- restriction -------------------------------------------------------------

    def restrict(self, k_sub: Subspace) -> "CovariantRep":
        """Compression to a reducing subspace.

        K must satisfy sigma(a) K <= K, tilde(E (x) K) <= K and
        tilde*(K) <= E (x) K; the failing inclusion is named otherwise.
        """
        tol = self.tol
        if k_sub.ambient_dim != self.h_dim:
            raise DimensionMismatch("subspace does not live on H")
        for t, a in enumerate(self.corr.algebra.basis()):
            if not nx.is_subset(nx.image(self.sigma.apply(a), k_sub, tol), k_sub, tol):
                raise DomainError(f"K is not sigma-invariant (algebra basis element {t})")
        p_k = k_sub.projector()
        amp_pk = self.amplified(p_k, 1, 0, 0)
        e_tensor_k = Subspace(nx.range_frame(amp_pk, tol, scale_floor=1.0))
        if not nx.is_subset(nx.image(self._tilde, e_tensor_k, tol), k_sub, tol):
            raise DomainError("tilde(E (x) K) is not contained in K")
        if not nx.is_subset(nx.image(herm(self._tilde), k_sub, tol), e_tensor_k, tol):
            raise DomainError("tilde*(K) is not contained in E (x) K")
        f = k_sub.frame
        compressed = [herm(f) @ v @ f for v in self.v_on_basis]
        if self.corr.algebra.is_scalar:
            sigma_k = StarRepresentation(self.corr.algebra, [k_sub.dim])
            return CovariantRep(self.corr, sigma_k, compressed, tol, tensor_cap=self.tensor_cap)
        sigma_mats = [herm(f) @ self.sigma.apply(a) @ f for a in self.corr.algebra.basis()]
        mults, w = _canonicalize_representation(self.corr.algebra, sigma_mats, tol)
        sigma_k = StarRepresentation(self.corr.algebra, mults)
        rotated = [herm(w) @ v @ w for v in compressed]
        return CovariantRep(self.corr, sigma_k, rotated, tol, tensor_cap=self.tensor_cap)


def _canonicalize_representation(algebra, basis_mats, tol: Tolerance):
    """Unitary W with W* sigma'(a) W in the canonical (+)_i a_i (x) I form.

    Standard matrix-unit argument: an orthonormal basis of the range of
    sigma'(e^{(i)}_{11}) generates the block through sigma'(e^{(i)}_{p1}).
    """
    r = basis_mats[0].shape[0] if basis_mats else 0

    def mat_of(a):
        coords = algebra.coords(a)
        out = np.zeros((r, r), dtype=np.complex128)
        for c, m in zip(coords, basis_mats):
            if c != 0:
                out = out + c * m
        return out

    mults = []
    columns = []
    for i, k in enumerate(algebra.block_sizes):
        e11 = mat_of(algebra.unit(i, 0, 0))
        g = nx.range_frame(e11, tol)
        m_i = g.shape[1]
        mults.append(m_i)
        for p in range(k):
            ep1 = mat_of(algebra.unit(i, p, 0))
            for t in range(m_i):
                columns.append(ep1 @ g[:, t])
    w = np.column_stack(columns) if columns else np.zeros((r, 0), dtype=np.complex128)
    if w.shape != (r, r):
        raise DomainError("compression is not a representation of the canonical form")
    if opnorm(herm(w) @ w - eye(r)) > 100 * tol.eq_rel:
        raise DomainError("canonicalizing frame failed to be unitary")
    return mults, w


def rep_from_tilde(
    corr: FdCorrespondence,
    sigma: StarRepresentation,
    tilde: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
    *,
    tensor_cap: int = DEFAULT_TENSOR_CAP,
) -> CovariantRep:
    """Reconstruct (sigma, V) from a lift: V(xi_b) h = tilde(xi_b (x) h)."""
    tilde = as_matrix(tilde)
    space = interior_tensor(corr, sigma, tol)
    if tilde.shape != (sigma.h_dim, space.dim):
        raise DimensionMismatch(f"lift shape {tilde.shape} != ({sigma.h_dim}, {space.dim})")
    d = sigma.h_dim
    vs = []
    for b in range(corr.module_dim):
        formal = np.zeros((space.formal_dim, d), dtype=np.complex128)
        formal[b * d : (b + 1) * d] = np.eye(d)
        vs.append(tilde @ space.apply_embed(formal))
    return CovariantRep(corr, sigma, vs, tol, tensor_cap=tensor_cap)
