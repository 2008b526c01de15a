"""Finite-dimensional C*-algebras, their representations, C*-correspondences,
interior tensor products, and identity amplification.

A correspondence is specified by finite structure data: an algebra-valued
Gram matrix on a chosen module basis plus left/right action matrices per
algebra basis element.  This encoding is a choice of this package (the
objects themselves are basis-free); it makes every invariant mechanically
checkable.

Index convention, fixed package-wide: in any tensor product the leftmost
factor is the most significant index (row-major), so for the scalar algebra
the interior tensor product E (x) H is the plain Kronecker ordering
``(basis_a (x) e_j) -> a * dim(H) + j`` with no permutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    IntertwinerError,
    InvalidCorrespondence,
    ResourceLimit,
)
from .numerics import DEFAULT_TOL, Tolerance, as_matrix, eye, herm, opnorm


class FdCStarAlgebra:
    """Direct sum of full matrix algebras, realized block-diagonally.

    Elements are block-diagonal complex matrices with blocks of exactly
    the given sizes.  The canonical linear basis is the family of matrix
    units, ordered block by block, row-major within a block.
    """

    def __init__(self, block_sizes):
        sizes = tuple(int(k) for k in block_sizes)
        if not sizes or any(k < 1 for k in sizes):
            raise InvalidCorrespondence("block sizes must be a nonempty list of positive ints")
        self.block_sizes = sizes
        self.matrix_size = sum(sizes)
        self.dim = sum(k * k for k in sizes)
        offsets = []
        start = 0
        for k in sizes:
            offsets.append((start, start + k))
            start += k
        self._block_ranges = tuple(offsets)
        self._unit_positions = []
        for (lo, _), k in zip(self._block_ranges, sizes):
            for p in range(k):
                for q in range(k):
                    self._unit_positions.append((lo + p, lo + q))

    def __eq__(self, other):
        return isinstance(other, FdCStarAlgebra) and self.block_sizes == other.block_sizes

    def __hash__(self):
        return hash(self.block_sizes)

    def __repr__(self):
        return f"FdCStarAlgebra{self.block_sizes}"

    @property
    def is_scalar(self) -> bool:
        return self.block_sizes == (1,)

    def identity(self) -> np.ndarray:
        return eye(self.matrix_size)

    def basis(self):
        """Matrix units as concrete block-diagonal matrices."""
        out = []
        for r, c in self._unit_positions:
            u = np.zeros((self.matrix_size, self.matrix_size), dtype=np.complex128)
            u[r, c] = 1.0
            out.append(u)
        return out

    def coords(self, a) -> np.ndarray:
        """Coordinates of an algebra element in the matrix-unit basis."""
        a = as_matrix(a)
        if a.shape != (self.matrix_size, self.matrix_size):
            raise DimensionMismatch(f"element shape {a.shape} != {self.matrix_size}")
        return np.array([a[r, c] for r, c in self._unit_positions])

    def from_coords(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.complex128)
        a = np.zeros((self.matrix_size, self.matrix_size), dtype=np.complex128)
        for value, (r, c) in zip(v, self._unit_positions):
            a[r, c] = value
        return a

    def off_block_mass(self, a) -> float:
        """Norm of the part of a matrix outside the block-diagonal support."""
        a = as_matrix(a)
        mask = np.ones_like(a)
        for lo, hi in self._block_ranges:
            mask[lo:hi, lo:hi] = 0.0
        return opnorm(a * mask)

    def central_projection(self, i: int) -> np.ndarray:
        lo, hi = self._block_ranges[i]
        z = np.zeros((self.matrix_size, self.matrix_size), dtype=np.complex128)
        z[lo:hi, lo:hi] = np.eye(hi - lo)
        return z

    def block(self, a, i: int) -> np.ndarray:
        lo, hi = self._block_ranges[i]
        return as_matrix(a)[lo:hi, lo:hi]

    def unit(self, i: int, p: int, q: int) -> np.ndarray:
        """Matrix unit e^{(i)}_{pq}."""
        lo, _ = self._block_ranges[i]
        u = np.zeros((self.matrix_size, self.matrix_size), dtype=np.complex128)
        u[lo + p, lo + q] = 1.0
        return u


SCALARS = FdCStarAlgebra([1])


class StarRepresentation:
    """Unital *-representation sigma(a) = (+)_i a_i (x) I_{m_i} on C^{H_dim}.

    The block structure (multiplicity per algebra block) pins the
    representation up to nothing: the matrix form is canonical.
    Nondegeneracy sigma(1) = I holds structurally.
    """

    def __init__(self, algebra: FdCStarAlgebra, multiplicities):
        mults = tuple(int(m) for m in multiplicities)
        if len(mults) != len(algebra.block_sizes) or any(m < 0 for m in mults):
            raise DimensionMismatch("need one nonnegative multiplicity per algebra block")
        self.algebra = algebra
        self.multiplicities = mults
        self.h_dim = sum(k * m for k, m in zip(algebra.block_sizes, mults))

    def __eq__(self, other):
        return (
            isinstance(other, StarRepresentation)
            and self.algebra == other.algebra
            and self.multiplicities == other.multiplicities
        )

    def __repr__(self):
        return f"StarRepresentation({self.algebra!r}, mult={self.multiplicities})"

    def apply(self, a) -> np.ndarray:
        a = as_matrix(a)
        blocks = []
        for i, (k, m) in enumerate(zip(self.algebra.block_sizes, self.multiplicities)):
            if m == 0:
                continue
            blocks.append(np.kron(self.algebra.block(a, i), np.eye(m)))
        if not blocks:
            return np.zeros((0, 0), dtype=np.complex128)
        out = np.zeros((self.h_dim, self.h_dim), dtype=np.complex128)
        at = 0
        for b in blocks:
            n = b.shape[0]
            out[at : at + n, at : at + n] = b
            at += n
        return out

    def basis_images(self):
        return [self.apply(u) for u in self.algebra.basis()]


class FdCorrespondence:
    """C*-correspondence over a finite-dimensional C*-algebra.

    Structure data on a module basis xi_1..xi_N:
      gram[a, b]          = <xi_a, xi_b>  in A   (shape (N, N, K, K))
      left_action[t]      = matrix of phi(basis_t) on module coordinates
      right_action[t]     = matrix of xi -> xi . basis_t

    The module inner product is conjugate-linear in the first slot.
    """

    def __init__(self, algebra: FdCStarAlgebra, gram, left_action, right_action):
        self.algebra = algebra
        self.gram = np.asarray(gram, dtype=np.complex128)
        self.left_action = np.asarray(left_action, dtype=np.complex128)
        self.right_action = np.asarray(right_action, dtype=np.complex128)
        n = self.gram.shape[0]
        k = algebra.matrix_size
        if self.gram.shape != (n, n, k, k):
            raise DimensionMismatch(f"gram must have shape (N, N, {k}, {k})")
        if self.left_action.shape != (algebra.dim, n, n):
            raise DimensionMismatch("left_action must be (dim A, N, N)")
        if self.right_action.shape != (algebra.dim, n, n):
            raise DimensionMismatch("right_action must be (dim A, N, N)")
        self.module_dim = n

    def left(self, a) -> np.ndarray:
        """Matrix of phi(a) on module coordinates."""
        c = self.algebra.coords(a)
        return np.tensordot(c, self.left_action, axes=(0, 0))

    def right(self, a) -> np.ndarray:
        c = self.algebra.coords(a)
        return np.tensordot(c, self.right_action, axes=(0, 0))

    def gram_as_block_matrix(self) -> np.ndarray:
        """The (N*K) x (N*K) scalar matrix [ <xi_a, xi_b> ]_{a,b}."""
        n, k = self.module_dim, self.algebra.matrix_size
        return self.gram.transpose(0, 2, 1, 3).reshape(n * k, n * k)

    def validate(self, tol: Tolerance = DEFAULT_TOL):
        """Check the Hilbert-bimodule axioms on the structure data."""
        n = self.module_dim
        scale = max(1.0, float(np.abs(self.gram).max(initial=0.0)))
        # Hermitian A-valued Gram
        flip = np.conj(self.gram.transpose(1, 0, 3, 2))
        if np.abs(self.gram - flip).max(initial=0.0) > tol.eq_rel * scale:
            raise InvalidCorrespondence("gram is not Hermitian as an A-valued matrix")
        # positivity of the scalar block matrix
        big = self.gram_as_block_matrix()
        if big.size:
            w = np.linalg.eigvalsh((big + herm(big)) / 2.0)
            if w.size and w[0] < -10.0 * tol.eq_rel * max(1.0, float(w[-1])):
                raise InvalidCorrespondence(f"gram block matrix has negative eigenvalue {w[0]:.3e}")
        basis = self.algebra.basis()
        # right compatibility  <xi_a, xi_b . c> = <xi_a, xi_b> c
        for t, c in enumerate(basis):
            lhs = np.einsum("xb,axij->abij", self.right_action[t], self.gram)
            rhs = np.einsum("abij,jk->abik", self.gram, c)
            if np.abs(lhs - rhs).max(initial=0.0) > tol.eq_rel * scale:
                raise InvalidCorrespondence(f"right action incompatible with gram (basis {t})")
        # phi unital
        if opnorm(self.left(self.algebra.identity()) - eye(n)) > tol.eq_rel:
            raise InvalidCorrespondence("left action is not unital")
        # phi multiplicative and adjointable w.r.t. the gram
        for s, a in enumerate(basis):
            for t, b in enumerate(basis):
                lhs = self.left_action[s] @ self.left_action[t]
                rhs = self.left(a @ b)
                if opnorm(lhs - rhs) > tol.eq_rel * max(1.0, opnorm(lhs)):
                    raise InvalidCorrespondence("left action is not multiplicative")
            la = self.left_action[s]
            lstar = self.left(herm(a))
            lhs = np.einsum("xp,xqij->pqij", np.conj(la), self.gram)
            rhs = np.einsum("yq,pyij->pqij", lstar, self.gram)
            if np.abs(lhs - rhs).max(initial=0.0) > tol.eq_rel * scale:
                raise InvalidCorrespondence("left action is not adjointable w.r.t. the gram")
        return self

    def is_full(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        """True iff the inner products <xi_a, xi_b> span the whole algebra."""
        n = self.module_dim
        rows = np.array(
            [self.algebra.coords(self.gram[a, b]) for a in range(n) for b in range(n)]
        )
        if rows.size == 0:
            return self.algebra.dim == 0
        s = np.linalg.svd(rows, compute_uv=False)
        cut = tol.rank_rel * (s[0] if s.size else 0.0) * max(rows.shape)
        return int(np.sum(s > cut)) == self.algebra.dim


def scalar_correspondence(n: int) -> FdCorrespondence:
    """E = C^n with orthonormal basis over the scalar algebra."""
    gram = np.eye(n, dtype=np.complex128).reshape(n, n, 1, 1)
    action = np.eye(n, dtype=np.complex128).reshape(1, n, n)
    return FdCorrespondence(SCALARS, gram, action, action.copy())


def algebra_correspondence(algebra: FdCStarAlgebra) -> FdCorrespondence:
    """The algebra as the trivial correspondence over itself, <u, v> = u* v."""
    basis = algebra.basis()
    n = algebra.dim
    k = algebra.matrix_size
    gram = np.zeros((n, n, k, k), dtype=np.complex128)
    left = np.zeros((n, n, n), dtype=np.complex128)
    right = np.zeros((n, n, n), dtype=np.complex128)
    for a, u in enumerate(basis):
        for b, v in enumerate(basis):
            gram[a, b] = herm(u) @ v
    for t, c in enumerate(basis):
        for b, u in enumerate(basis):
            left[t, :, b] = algebra.coords(c @ u)
            right[t, :, b] = algebra.coords(u @ c)
    return FdCorrespondence(algebra, gram, left, right)


def diagonal_correspondence(algebra: FdCStarAlgebra, left_tags, right_tags) -> FdCorrespondence:
    """Correspondence with diagonal structure over a multi-block algebra.

    Basis vector xi_a carries <xi_a, xi_a> = central unit of block
    right_tags[a] and left action phi(a)xi = a_{left_tags[a]} . xi
    (scalar multiplication by the (0,0) entry of the tagged block; the
    tagged blocks must be 1x1).
    """
    n = len(left_tags)
    if len(right_tags) != n:
        raise DimensionMismatch("left_tags and right_tags must have equal length")
    for tag in tuple(left_tags) + tuple(right_tags):
        if algebra.block_sizes[tag] != 1:
            raise InvalidCorrespondence("diagonal correspondences need 1x1 tagged blocks")
    k = algebra.matrix_size
    gram = np.zeros((n, n, k, k), dtype=np.complex128)
    left = np.zeros((algebra.dim, n, n), dtype=np.complex128)
    right = np.zeros((algebra.dim, n, n), dtype=np.complex128)
    for a in range(n):
        gram[a, a] = algebra.central_projection(right_tags[a])
    basis = algebra.basis()
    for t, u in enumerate(basis):
        for a in range(n):
            left[t, a, a] = algebra.block(u, left_tags[a])[0, 0]
            right[t, a, a] = algebra.block(u, right_tags[a])[0, 0]
    return FdCorrespondence(algebra, gram, left, right)


def tensor_product(e: FdCorrespondence, f: FdCorrespondence) -> FdCorrespondence:
    """Tensor product of correspondences over the same algebra.

    Gram: <xi (x) eta, xi' (x) eta'> = <eta, <xi, xi'> . eta'>; the left
    action acts on the first factor, the right action on the last.
    """
    if e.algebra != f.algebra:
        raise DimensionMismatch("tensor product requires a common coefficient algebra")
    ne, nf = e.module_dim, f.module_dim
    k = e.algebra.matrix_size
    gram = np.zeros((ne * nf, ne * nf, k, k), dtype=np.complex128)
    for a in range(ne):
        for b in range(ne):
            lg = f.left(e.gram[a, b])  # N_F x N_F
            block = np.einsum("cxij,xd->cdij", f.gram, lg)
            gram[a * nf : (a + 1) * nf, b * nf : (b + 1) * nf] = block
    left = np.stack([np.kron(e.left_action[t], np.eye(nf)) for t in range(e.algebra.dim)])
    right = np.stack([np.kron(np.eye(ne), f.right_action[t]) for t in range(f.algebra.dim)])
    return FdCorrespondence(e.algebra, gram, left, right)


def tensor_power(e: FdCorrespondence, m: int) -> FdCorrespondence:
    """m-fold tensor power; m = 0 is the algebra as the trivial correspondence."""
    if m < 0:
        raise DimensionMismatch("tensor power needs m >= 0")
    if m == 0:
        return algebra_correspondence(e.algebra)
    out = e
    for _ in range(m - 1):
        out = tensor_product(out, e)
    return out


# ---------------------------------------------------------------------------
# Interior tensor product
# ---------------------------------------------------------------------------


@dataclass
class TensorSpace:
    """Hilbert space E (x)_sigma H in an orthonormal coordinate system.

    ``embed`` maps formal vectors (module basis (x) H basis, length
    N * H_dim) to coordinates; ``lift`` is its Moore-Penrose section.
    ``None`` for both means the coordinate system IS the formal basis
    (scalar algebra with orthonormal module basis), in which case no
    (N*H_dim)^2 matrix is ever materialized.

    ``corr`` is None for the plain coefficient space H itself.
    """

    corr: FdCorrespondence | None
    h_dim: int
    dim: int
    embed: np.ndarray | None
    lift: np.ndarray | None
    action_source: object = field(default=None, repr=False)

    @property
    def formal_dim(self) -> int:
        n = 1 if self.corr is None else self.corr.module_dim
        return n * self.h_dim

    def apply_embed(self, v: np.ndarray) -> np.ndarray:
        return v if self.embed is None else self.embed @ v

    def apply_lift(self, v: np.ndarray) -> np.ndarray:
        return v if self.lift is None else self.lift @ v

    def coords_of_simple(self, xi_coords, h) -> np.ndarray:
        """Coordinates of the simple tensor xi (x) h."""
        formal = np.kron(np.asarray(xi_coords, dtype=np.complex128), np.asarray(h, dtype=np.complex128))
        return self.apply_embed(formal)

    def induced_action(self, a) -> np.ndarray:
        """The operator phi(a) (x) I_H compressed to the coordinates (or
        sigma(a) itself for the plain space)."""
        if self.corr is None:
            return self.action_source.apply(a)
        formal = np.kron(self.corr.left(a), eye(self.h_dim))
        if self.embed is None:
            return formal
        return self.embed @ formal @ self.lift


def plain_space(sigma: StarRepresentation) -> TensorSpace:
    """H itself, viewed as the 0-fold tensor space."""
    return TensorSpace(corr=None, h_dim=sigma.h_dim, dim=sigma.h_dim, embed=None, lift=None, action_source=sigma)


def _gram_is_standard(e: FdCorrespondence) -> bool:
    if not e.algebra.is_scalar:
        return False
    n = e.module_dim
    expected = np.eye(n, dtype=np.complex128).reshape(n, n, 1, 1)
    return bool(np.array_equal(e.gram, expected))


def interior_tensor(
    e: FdCorrespondence,
    sigma: StarRepresentation,
    tol: Tolerance = DEFAULT_TOL,
) -> TensorSpace:
    """Build E (x)_sigma H: put the semi-inner product
    <xi (x) h, eta (x) g> = <h, sigma(<xi, eta>) g> on the formal tensor
    space, quotient by its null vectors, and return an orthonormal
    coordinatization.

    The quotient basis is the Gram eigenbasis restricted to nonzero
    eigenvalues, scaled so the coordinates are orthonormal for the
    quotient inner product.  When the scalar Gram is exactly the identity
    (scalar algebra, orthonormal module basis) the coordinate map is the
    identity and is represented implicitly.
    """
    if e.algebra != sigma.algebra:
        raise DimensionMismatch("correspondence and representation algebras differ")
    d = sigma.h_dim
    n = e.module_dim
    if _gram_is_standard(e):
        return TensorSpace(corr=e, h_dim=d, dim=n * d, embed=None, lift=None, action_source=sigma)
    blocks = np.zeros((n, n, d, d), dtype=np.complex128)
    for a in range(n):
        for b in range(n):
            blocks[a, b] = sigma.apply(e.gram[a, b])
    big = blocks.transpose(0, 2, 1, 3).reshape(n * d, n * d)
    big = (big + herm(big)) / 2.0
    if big.size == 0:
        return TensorSpace(corr=e, h_dim=d, dim=0,
                           embed=np.zeros((0, 0), dtype=np.complex128),
                           lift=np.zeros((0, 0), dtype=np.complex128),
                           action_source=sigma)
    w, v = np.linalg.eigh(big)
    top = float(w[-1]) if w.size else 0.0
    if w.size and w[0] < -10.0 * tol.eq_rel * max(1.0, top):
        raise InvalidCorrespondence(f"interior tensor gram has negative eigenvalue {w[0]:.3e}")
    cut = tol.rank_rel * max(top, 0.0) * (n * d)
    keep = w > cut
    lam = w[keep]
    basis = v[:, keep]
    embed = np.sqrt(lam)[:, None] * herm(basis)
    lift = basis / np.sqrt(lam)[None, :]
    return TensorSpace(corr=e, h_dim=d, dim=int(lam.size), embed=embed, lift=lift, action_source=sigma)


# ---------------------------------------------------------------------------
# Identity amplification
# ---------------------------------------------------------------------------


def _space_corr(space: TensorSpace):
    return space.corr


def amplify(
    f: FdCorrespondence,
    x: np.ndarray,
    dom: TensorSpace,
    cod: TensorSpace,
    sigma: StarRepresentation,
    tol: Tolerance = DEFAULT_TOL,
    *,
    check_covariance: bool = True,
    dim_cap: int | None = None,
):
    """Concrete matrix of I_F (x) X under F (x) (D (x) H) ~ (F (x) D) (x) H.

    X must map ``dom`` to ``cod`` (either may be a tensor space or the
    plain space H) and intertwine the induced algebra actions; otherwise
    the amplification is ill-defined and IntertwinerError is raised.

    Returns ``(matrix, big_dom, big_cod)`` where the big spaces are the
    interior tensor products F (x) dom and F (x) cod.
    """
    x = as_matrix(x)
    if x.shape != (cod.dim, dom.dim):
        raise DimensionMismatch(f"operator shape {x.shape} != ({cod.dim}, {dom.dim})")
    if check_covariance and not sigma.algebra.is_scalar:
        for u in sigma.algebra.basis():
            resid = opnorm(x @ dom.induced_action(u) - cod.induced_action(u) @ x)
            if resid > tol.eq_rel * max(1.0, opnorm(x)):
                raise IntertwinerError(
                    f"operator does not intertwine the algebra actions (residual {resid:.3e})"
                )

    def big_space(side: TensorSpace) -> TensorSpace:
        corr = f if side.corr is None else tensor_product(f, side.corr)
        return interior_tensor(corr, sigma, tol)

    big_dom = big_space(dom)
    big_cod = big_space(cod)
    if dim_cap is not None and max(big_dom.formal_dim, big_cod.formal_dim) > dim_cap:
        raise ResourceLimit(
            f"amplified tensor dimension {max(big_dom.formal_dim, big_cod.formal_dim)}"
            f" exceeds the cap {dim_cap}"
        )
    nf = f.module_dim
    trivial = (
        dom.embed is None
        and cod.embed is None
        and big_dom.embed is None
        and big_cod.embed is None
    )
    if trivial:
        return np.kron(eye(nf), x), big_dom, big_cod
    y = cod.apply_lift(eye(cod.dim)) @ x @ dom.apply_embed(eye(dom.formal_dim))
    formal = np.kron(eye(nf), y)
    mat = big_cod.apply_embed(formal @ big_dom.apply_lift(eye(big_dom.dim)))
    return mat, big_dom, big_cod
