"""Dense complex linear algebra with an explicit tolerance discipline.

Matrices are plain ``numpy.ndarray`` values of dtype complex128.  Every
rank, projector, pseudoinverse, and subspace-inclusion decision made
anywhere in the package reduces to the primitives in this module, and
every such decision is governed by a single :class:`Tolerance` value:

* ``rank_rel``  -- a singular value sigma counts as zero iff
  ``sigma <= rank_rel * sigma_max * max(rows, cols)``,
* ``eq_rel``    -- operator identities ``A == B`` are accepted iff
  ``||A - B|| <= eq_rel * scale`` in spectral norm,
* ``incl_abs``  -- a subspace inclusion ``S1 <= S2`` is accepted iff
  ``||(I - P2) F1|| <= incl_abs`` for an orthonormal frame F1 of S1.

All values are immutable after construction; nothing here mutates its
inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DomainError, NumericFailure


@dataclass(frozen=True)
class Tolerance:
    """Numeric policy shared by all decision procedures."""

    rank_rel: float = 1e-10
    eq_rel: float = 1e-8
    incl_abs: float = 1e-8

    def __post_init__(self):
        for name in ("rank_rel", "eq_rel", "incl_abs"):
            value = getattr(self, name)
            if not (value > 0.0):
                raise DomainError(f"tolerance {name} must be strictly positive")
        if not self.rank_rel < 1.0:
            raise DomainError("rank_rel must be < 1")


DEFAULT_TOL = Tolerance()


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite 2-d complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got ndim={a.ndim}")
    if a.size and not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    return a


def herm(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(m.T)


def opnorm(m) -> float:
    """Spectral norm; 0.0 for empty matrices."""
    a = as_matrix(m)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def _svd(m: np.ndarray, full_matrices: bool):
    try:
        return np.linalg.svd(m, full_matrices=full_matrices)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"SVD did not converge: {exc}", shape=m.shape) from exc


def singular_values(m) -> np.ndarray:
    a = as_matrix(m)
    if a.size == 0:
        return np.zeros(0)
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"SVD did not converge: {exc}", shape=a.shape) from exc


def rank_threshold(s: np.ndarray, shape, tol: Tolerance, scale_floor: float = 0.0) -> float:
    """Cutoff below which singular values are treated as zero.

    ``scale_floor`` guards products that should vanish exactly but carry
    roundoff dust: with a pure relative cutoff, a matrix of norm 1e-16
    has "rank" relative to its own dust.  Subspace-producing operations
    pass 1.0 (every operator this package decides on has norm O(1));
    inverse-producing operations keep the pure relative rule.
    """
    if s.size == 0:
        return 0.0
    return tol.rank_rel * max(float(s[0]), scale_floor) * max(shape)


def matrix_rank(m, tol: Tolerance = DEFAULT_TOL) -> int:
    a = as_matrix(m)
    s = singular_values(a)
    return int(np.sum(s > rank_threshold(s, a.shape, tol)))


def pseudoinverse(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose inverse via SVD with the rank_rel cutoff.

    The result satisfies the four defining identities
    ``A X A = A``, ``X A X = X``, ``(A X)* = A X``, ``(X A)* = X A``
    up to roundoff on the retained singular values.
    """
    a = as_matrix(m)
    if a.size == 0:
        return np.zeros((a.shape[1], a.shape[0]), dtype=np.complex128)
    u, s, vh = _svd(a, full_matrices=False)
    cut = rank_threshold(s, a.shape, tol)
    inv = np.where(s > cut, 1.0 / np.where(s > cut, s, 1.0), 0.0)
    return herm(vh) @ (inv[:, None] * herm(u))


def penrose_residuals(m, pinv, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Spectral-norm residuals of the four Moore-Penrose identities."""
    a = as_matrix(m)
    x = as_matrix(pinv)
    ax = a @ x
    xa = x @ a
    return {
        "AXA": opnorm(a @ xa - a),
        "XAX": opnorm(x @ ax - x),
        "AX_selfadjoint": opnorm(ax - herm(ax)),
        "XA_selfadjoint": opnorm(xa - herm(xa)),
    }


def range_frame(m, tol: Tolerance = DEFAULT_TOL, scale_floor: float = 0.0) -> np.ndarray:
    """Orthonormal column basis of the range of m."""
    a = as_matrix(m)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=np.complex128)
    u, s, _ = _svd(a, full_matrices=False)
    r = int(np.sum(s > rank_threshold(s, a.shape, tol, scale_floor)))
    return u[:, :r]


def kernel_frame(m, tol: Tolerance = DEFAULT_TOL, scale_floor: float = 0.0) -> np.ndarray:
    """Orthonormal column basis of the kernel of m."""
    a = as_matrix(m)
    if a.size == 0:
        return eye(a.shape[1]) if a.shape[0] == 0 else np.zeros((a.shape[1], 0), dtype=np.complex128)
    _, s, vh = _svd(a, full_matrices=True)
    r = int(np.sum(s > rank_threshold(s, a.shape, tol, scale_floor)))
    return herm(vh)[:, r:]


def range_projector(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projection onto the range of m.  Equals m @ pinv(m)."""
    f = range_frame(m, tol)
    return f @ herm(f)


def kernel_projector(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projection onto the kernel of m."""
    f = kernel_frame(m, tol)
    return f @ herm(f)


def psd_sqrt(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Self-adjoint PSD square root of a self-adjoint PSD matrix.

    Eigenvalues in ``[-eq_rel*||M||, 0)`` are clamped to zero (roundoff
    dust); anything below ``-10*eq_rel*||M||`` is a hard failure.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"psd_sqrt needs a square matrix, got {a.shape}")
    if a.size == 0:
        return a.copy()
    scale = opnorm(a)
    if opnorm(a - herm(a)) > tol.eq_rel * max(scale, 1.0):
        raise DomainError("psd_sqrt: input is not self-adjoint within tolerance")
    sym = (a + herm(a)) / 2.0
    try:
        w, v = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigh did not converge: {exc}", shape=a.shape) from exc
    if w.size and w[0] < -10.0 * tol.eq_rel * max(scale, 1.0):
        raise DomainError(f"psd_sqrt: materially negative eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    root = (v * np.sqrt(w)) @ herm(v)
    return (root + herm(root)) / 2.0


# ---------------------------------------------------------------------------
# Subspaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """A closed subspace of C^d, stored as an orthonormal column frame.

    The zero subspace is a frame with zero columns; every operation
    accepts it.
    """

    frame: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "frame", as_matrix(self.frame))

    @property
    def ambient_dim(self) -> int:
        return self.frame.shape[0]

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    def projector(self) -> np.ndarray:
        return self.frame @ herm(self.frame)

    def orthonormality_residual(self) -> float:
        return opnorm(herm(self.frame) @ self.frame - eye(self.dim))

    @staticmethod
    def whole(d: int) -> "Subspace":
        return Subspace(eye(d))

    @staticmethod
    def zero(d: int) -> "Subspace":
        return Subspace(np.zeros((d, 0), dtype=np.complex128))

    @staticmethod
    def span(columns, tol: Tolerance = DEFAULT_TOL) -> "Subspace":
        """Subspace spanned by the columns of a matrix (need not be
        orthonormal or independent)."""
        return Subspace(range_frame(columns, tol, scale_floor=1.0))


def _check_same_ambient(s1: Subspace, s2: Subspace):
    if s1.ambient_dim != s2.ambient_dim:
        raise DimensionMismatch(
            f"ambient dimensions differ: {s1.ambient_dim} vs {s2.ambient_dim}"
        )


def intersect(s1: Subspace, s2: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Intersection, computed from the kernel of the stacked orthogonal
    complements [(I - P1); (I - P2)]."""
    _check_same_ambient(s1, s2)
    d = s1.ambient_dim
    stacked = np.vstack([eye(d) - s1.projector(), eye(d) - s2.projector()])
    return Subspace(kernel_frame(stacked, tol))


def ortho_complement(s: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    return Subspace(kernel_frame(herm(s.frame), tol))


def is_subset(s1: Subspace, s2: Subspace, tol: Tolerance = DEFAULT_TOL) -> bool:
    """S1 <= S2 iff ||(I - P2) F1|| <= incl_abs."""
    _check_same_ambient(s1, s2)
    if s1.dim == 0:
        return True
    defect = s1.frame - s2.projector() @ s1.frame
    return opnorm(defect) <= tol.incl_abs


def ominus(s1: Subspace, s2: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """S1 (-) S2 for nested S2 <= S1."""
    _check_same_ambient(s1, s2)
    if not is_subset(s2, s1, tol):
        raise DomainError("ominus: second subspace is not contained in the first")
    residue = s1.frame - s2.projector() @ s1.frame
    return Subspace(range_frame(residue, tol, scale_floor=1.0))


def image(m, s: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Image of the subspace under the operator: R(M @ frame).

    Directions whose singular value is pure roundoff dust (below
    rank_rel * dim on the unit scale) are dropped; see rank_threshold.
    """
    a = as_matrix(m)
    if a.shape[1] != s.ambient_dim:
        raise DimensionMismatch(
            f"operator domain {a.shape[1]} != subspace ambient {s.ambient_dim}"
        )
    return Subspace(range_frame(a @ s.frame, tol, scale_floor=1.0))


# ---------------------------------------------------------------------------
# Operator predicates
# ---------------------------------------------------------------------------


def is_partial_isometry(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Decided by ||M M* M - M|| <= eq_rel * ||M||.

    A matrix whose norm is below rank_rel on the unit scale is roundoff
    dust left by a cancellation; it is indistinguishable from the zero
    operator, which is a partial isometry.
    """
    a = as_matrix(m)
    scale = opnorm(a)
    if scale <= tol.rank_rel:
        return True
    return opnorm(a @ herm(a) @ a - a) <= tol.eq_rel * scale


def is_isometry(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = as_matrix(m)
    scale = max(1.0, opnorm(a)) ** 2
    return opnorm(herm(a) @ a - eye(a.shape[1])) <= tol.eq_rel * scale


def is_coisometry(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    return is_isometry(herm(as_matrix(m)), tol)


def is_projection(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, opnorm(a)) ** 2
    idempotent = opnorm(a @ a - a) <= tol.eq_rel * scale
    selfadjoint = opnorm(a - herm(a)) <= tol.eq_rel * scale
    return idempotent and selfadjoint


def is_contraction(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    return opnorm(m) <= 1.0 + tol.eq_rel


def partial_isometry_conditions(m, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Residuals and verdicts for the six equivalent characterizations of
    a partial isometry.

    Keys:
      ``norm_on_cokernel``   isometric on the orthocomplement of the kernel
      ``adjoint_norm``       the adjoint is isometric on its cokernel
      ``triple_product``     M M* M = M
      ``initial_projection`` M* M is the projection onto R(M*)
      ``final_projection``   M M* is the projection onto R(M)
      ``pinv_is_adjoint``    pinv(M) = M*

    Returns a dict with ``residuals``, ``verdicts``, and ``unanimous``.
    """
    a = as_matrix(m)
    norm = opnorm(a)
    if norm <= tol.rank_rel:
        # numerically the zero operator: every characterization holds
        residuals = {
            key: 0.0
            for key in (
                "norm_on_cokernel",
                "adjoint_norm",
                "triple_product",
                "initial_projection",
                "final_projection",
                "pinv_is_adjoint",
            )
        }
        return {
            "residuals": residuals,
            "verdicts": {key: True for key in residuals},
            "unanimous": True,
        }
    scale = max(1.0, norm)

    def frame_gram_residual(x):
        f = range_frame(herm(x), tol)  # orthonormal frame of N(x)^perp
        if f.shape[1] == 0:
            return 0.0
        g = herm(f) @ herm(x) @ x @ f
        return opnorm(g - eye(f.shape[1]))

    residuals = {
        "norm_on_cokernel": frame_gram_residual(a),
        "adjoint_norm": frame_gram_residual(herm(a)),
        "triple_product": opnorm(a @ herm(a) @ a - a),
        "initial_projection": opnorm(herm(a) @ a - range_projector(herm(a), tol)),
        "final_projection": opnorm(a @ herm(a) - range_projector(a, tol)),
        "pinv_is_adjoint": opnorm(pseudoinverse(a, tol) - herm(a)),
    }
    budgets = {key: tol.eq_rel * scale for key in residuals}
    budgets["triple_product"] = tol.eq_rel * opnorm(a)  # same rule as is_partial_isometry
    verdicts = {key: residuals[key] <= budgets[key] for key in residuals}
    return {
        "residuals": residuals,
        "verdicts": verdicts,
        "unanimous": len(set(verdicts.values())) <= 1,
    }
