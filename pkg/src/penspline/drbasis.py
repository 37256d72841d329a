"""Demmler-Reinsch bases for penalized splines.

A DR basis of order q is orthonormal in the empirical inner product and
diagonalizes the order-q roughness form; its eigenvalues order the basis
functions by roughness. It is constructed by Cholesky reduction of the
generalized symmetric eigenvalue problem for the pair (R, G).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .basis import SplineSpace, DesignMatrix, PenaltyMatrix, gramian, monomial_coefficients
from .errors import DimensionMismatch, GramianNotPositiveDefinite

__all__ = ["DrBasis", "dr_basis", "dr_basis_for_design", "dr_coords", "dr_norms"]


@dataclass(frozen=True)
class DrBasis:
    """Transition matrix, DR design matrix and eigenvalues of a DR basis.

    Attributes
    ----------
    transition : numpy.ndarray, shape (d, d)
        Columns are generalized eigenvectors; b = transition @ u maps DR
        coefficients to B-spline coefficients.
    dr_design : numpy.ndarray, shape (n, d)
        Z = B @ transition with Z'Z / n = I.
    eigenvalues : numpy.ndarray, shape (d,)
        Nondecreasing, nonnegative; the first q are exactly zero.
    penalty_order : int
    """

    transition: np.ndarray
    dr_design: np.ndarray
    eigenvalues: np.ndarray
    penalty_order: int

    @property
    def dim(self) -> int:
        return self.transition.shape[0]

    @property
    def n(self) -> int:
        return self.dr_design.shape[0]

    def to_bspline(self, u):
        """B-spline coefficients of the spline with DR coefficients u."""
        return self.transition @ np.asarray(u, dtype=float)


def _orthonormal_polynomial_block(space, G, q):
    """Coefficient vectors of an empirically orthonormal basis of P_{q-1}.

    Gram-Schmidt (via Cholesky of the monomial Gram matrix) applied to the
    spline representations of 1, x, ..., x^{q-1}.
    """
    P = np.column_stack([monomial_coefficients(space, j) for j in range(q)])
    M = P.T @ G @ P
    K = np.linalg.cholesky(M)
    return scipy.linalg.solve_triangular(K, P.T, lower=True).T


def dr_basis(G, R, B=None, space=None):
    """Construct a DR basis from a Gramian and a roughness penalty matrix.

    Parameters
    ----------
    G : numpy.ndarray, shape (d, d)
        Empirical Gramian B'B / n.
    R : PenaltyMatrix
        Roughness penalty matrix of order q.
    B : DesignMatrix, optional
        Paired design matrix; needed to populate the DR design Z = B A.
        If omitted, Z is the (0, d) empty matrix.
    space : SplineSpace, optional
        When given, the first q transition columns are replaced by the
        empirically orthonormalized monomial basis of P_{q-1}, making the
        polynomial block reproducible and exactly polynomial.

    Raises
    ------
    GramianNotPositiveDefinite
        If the Cholesky factorization of G fails (rank-deficient design);
        a DR basis exists iff G is positive definite.
    """
    G = np.asarray(G, dtype=float)
    q = R.derivative_order
    Rv = R.values
    d = G.shape[0]
    if Rv.shape != G.shape:
        raise DimensionMismatch("Gramian and penalty matrix sizes differ")
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise GramianNotPositiveDefinite(
            "Gramian is not positive definite; design matrix is rank deficient"
        ) from exc
    if np.min(np.diag(L)) ** 2 <= 1e-12 * np.trace(G) / d:
        raise GramianNotPositiveDefinite("Gramian is numerically rank deficient")

    # symmetric reduction: C = L^{-1} R L^{-T}, then A = L^{-T} V
    Linv_R = scipy.linalg.solve_triangular(L, Rv, lower=True)
    C = scipy.linalg.solve_triangular(L, Linv_R.T, lower=True).T
    gam, V = np.linalg.eigh(0.5 * (C + C.T))
    A = scipy.linalg.solve_triangular(L.T, V, lower=False)

    gam = np.maximum(gam, 0.0)
    gam[:q] = 0.0

    if space is not None:
        A[:, :q] = _orthonormal_polynomial_block(space, G, q)

    # deterministic sign: largest-magnitude entry of each column positive
    idx = np.argmax(np.abs(A), axis=0)
    signs = np.sign(A[idx, np.arange(d)])
    signs[signs == 0] = 1.0
    A = A * signs

    Z = B.values @ A if B is not None else np.empty((0, d))
    return DrBasis(transition=A, dr_design=Z, eigenvalues=gam, penalty_order=q)


def dr_basis_for_design(space, B, q):
    """DR basis of order q for a spline space and its design matrix."""
    from .basis import penalty_matrix

    R = penalty_matrix(space, q)
    return dr_basis(gramian(B), R, B=B, space=space)


def dr_coords(basis, values):
    """Least-squares DR coefficients Z' values / n of an n-vector."""
    values = np.asarray(values, dtype=float)
    if values.shape != (basis.n,):
        raise DimensionMismatch(
            f"expected a length-{basis.n} vector, got shape {values.shape}"
        )
    return basis.dr_design.T @ values / basis.n


def dr_norms(basis, u):
    """Squared empirical norm and squared roughness of the spline with DR coefficients u.

    Returns (sum u_j^2, sum_{j>q} gamma_j u_j^2).
    """
    u = np.asarray(u, dtype=float)
    q = basis.penalty_order
    return float(u @ u), float(basis.eigenvalues[q:] @ u[q:] ** 2)
