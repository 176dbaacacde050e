"""Dense complex linear-algebra kernels shared by the whole package.

Hermitian eigendecompositions, definite and semidefinite generalized
eigenvalue pencils, positive-semidefinite null spaces, minimal
Frobenius-norm linear maps, and smallest singular values.  All functions
accept array-likes, promote to complex128, reject non-finite input, and
treat nominally Hermitian matrices defensively by symmetrizing.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.linalg import solve_triangular

__all__ = [
    "EigResult",
    "EigenConvergenceError",
    "IndefiniteMatrixError",
    "InfeasibleMapError",
    "NotPositiveDefiniteError",
    "as_complex_matrix",
    "as_complex_vector",
    "definite_pencil_smallest",
    "fix_phase",
    "hermitian_eig",
    "hermitian_part",
    "min_frobenius_map",
    "norm1",
    "normalize",
    "psd_nullspace",
    "semidefinite_pencil_smallest",
    "smallest_singular_value",
]


class EigenConvergenceError(RuntimeError):
    """The eigenvalue iteration failed to converge."""


class NotPositiveDefiniteError(ValueError):
    """A matrix required to be positive definite failed its factorization."""


class IndefiniteMatrixError(ValueError):
    """A nominally positive-semidefinite matrix has a significantly negative eigenvalue."""


class InfeasibleMapError(ValueError):
    """No linear map D with D x = b exists because x = 0 while b != 0."""


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return ``a`` as a fresh finite complex128 2-d array."""
    arr = np.array(a, dtype=np.complex128, copy=True)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_complex_vector(a, name: str = "vector") -> np.ndarray:
    arr = np.array(a, dtype=np.complex128, copy=True).ravel()
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def norm1(m) -> float:
    """Matrix 1-norm (maximum absolute column sum); 0.0 for empty input."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    if m.ndim == 1:
        return float(np.abs(m).sum())
    return float(np.linalg.norm(m, 1))


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    nrm = float(np.linalg.norm(v))
    if nrm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return v / nrm


def fix_phase(v) -> np.ndarray:
    """Rotate ``v`` by a unit scalar so its largest-magnitude entry is real positive."""
    v = np.asarray(v, dtype=np.complex128)
    if v.size == 0:
        return v.copy()
    j = int(np.argmax(np.abs(v)))
    a = v[j]
    mag = abs(a)
    if mag == 0.0:
        return v.copy()
    return v * (a.conjugate() / mag)


def hermitian_part(m, name: str = "matrix") -> tuple[np.ndarray, float]:
    """Split ``m`` into (m + m*)/2, returning the Hermitian part and the
    Frobenius norm of the discarded skew component."""
    m = as_complex_matrix(m, name)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    h = (m + m.conj().T) / 2.0
    return h, float(np.linalg.norm(m - h))


class EigResult(NamedTuple):
    """Ascending eigenvalues and the matching unitary eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def hermitian_eig(m) -> EigResult:
    """Full eigendecomposition of a Hermitian matrix, values ascending."""
    h, _ = hermitian_part(m)
    try:
        values, vectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(
            f"eigendecomposition of a {h.shape[0]}x{h.shape[1]} Hermitian matrix "
            f"did not converge: {exc}"
        ) from exc
    return EigResult(values, vectors)


def definite_pencil_smallest(m, n) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue of the Hermitian pencil (M, N) with N positive
    definite, plus a unit eigenvector.

    Reduces via the Cholesky factor N = L L* to a standard Hermitian
    problem on L^{-1} M L^{-*}.  Raises NotPositiveDefiniteError when the
    factorization fails, signalling the caller to take a semidefinite or
    infeasible branch.
    """
    M, _ = hermitian_part(m, "pencil left-hand side")
    N, _ = hermitian_part(n, "pencil right-hand side")
    if M.shape != N.shape:
        raise ValueError(f"pencil shapes differ: {M.shape} vs {N.shape}")
    try:
        L = np.linalg.cholesky(N)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            "pencil right-hand side is not positive definite"
        ) from exc
    t = solve_triangular(L, M, lower=True)
    a = solve_triangular(L, t.conj().T, lower=True).conj().T
    a = (a + a.conj().T) / 2.0
    try:
        w, vecs = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"pencil eigendecomposition failed: {exc}") from exc
    v = solve_triangular(L.conj().T, vecs[:, 0], lower=False)
    v = v / np.linalg.norm(v)
    return float(w[0]), fix_phase(v)


def semidefinite_pencil_smallest(m, n, tol: float = 1e-10) -> tuple[float, np.ndarray]:
    """Infimum of the Rayleigh quotient (y* M y)/(y* N y) over y* N y > 0,
    for Hermitian M and positive-semidefinite N, plus an attaining unit
    vector.

    When N is singular, minimizing out the null-space component of y
    replaces M by its Schur complement onto the numerically positive
    subspace of N; that requires M restricted to null(N) to be positive
    definite (otherwise NotPositiveDefiniteError).  The returned y
    satisfies M y = value * N y.
    """
    M, _ = hermitian_part(m, "pencil left-hand side")
    N, _ = hermitian_part(n, "pencil right-hand side")
    if M.shape != N.shape:
        raise ValueError(f"pencil shapes differ: {M.shape} vs {N.shape}")
    w, W = np.linalg.eigh(N)
    scale = norm1(N)
    if w.size and w[0] < -tol * scale:
        raise IndefiniteMatrixError(
            f"pencil right-hand side has eigenvalue {w[0]:.3e} below -tol*||N||_1"
        )
    pos = w > tol * max(1.0, scale)
    if not pos.any():
        raise NotPositiveDefiniteError("pencil right-hand side is numerically zero")
    if pos.all():
        return definite_pencil_smallest(M, N)
    P = W[:, pos]
    Z = W[:, ~pos]
    mpp = P.conj().T @ M @ P
    mpz = P.conj().T @ M @ Z
    mzz = Z.conj().T @ M @ Z
    mzz = (mzz + mzz.conj().T) / 2.0
    try:
        Lz = np.linalg.cholesky(mzz)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            "pencil numerator is singular on the null space of the denominator"
        ) from exc
    # Schur complement of the null-space block of M.
    Y = solve_triangular(Lz, mpz.conj().T, lower=True)
    schur = mpp - Y.conj().T @ Y
    npp = P.conj().T @ N @ P
    value, u = definite_pencil_smallest(schur, npp)
    yz = -solve_triangular(Lz.conj().T, Y @ u, lower=False)
    y = P @ u + Z @ yz
    return value, fix_phase(y / np.linalg.norm(y))


def psd_nullspace(m, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (as columns, possibly zero of them) of the numerical
    null space of a positive-semidefinite matrix.

    Eigenvalues at or below tol * max(1, ||M||_1) count as zero; an
    eigenvalue below -tol * ||M||_1 raises IndefiniteMatrixError.
    """
    M, _ = hermitian_part(m)
    w, V = np.linalg.eigh(M)
    scale = norm1(M)
    if w.size and w[0] < -tol * scale:
        raise IndefiniteMatrixError(
            f"matrix has eigenvalue {w[0]:.3e} below -tol*||M||_1 = {-tol * scale:.3e}"
        )
    keep = w <= tol * max(1.0, scale)
    return V[:, keep].copy()


def min_frobenius_map(x, b) -> np.ndarray:
    """The unique minimal-Frobenius-norm matrix D with D x = b, namely
    b x* / ||x||^2.  For x = 0: the zero matrix if b = 0, else the
    constraint is infeasible."""
    x = as_complex_vector(x, "x")
    b = as_complex_vector(b, "b")
    xn2 = float(np.real(np.vdot(x, x)))
    if xn2 == 0.0:
        if not b.any():
            return np.zeros((b.size, x.size), dtype=np.complex128)
        raise InfeasibleMapError("x = 0 with b != 0: no matrix D satisfies D x = b")
    return np.outer(b, x.conj()) / xn2


def smallest_singular_value(m) -> float:
    """Smallest singular value of a square matrix (never negative)."""
    M = as_complex_matrix(m)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got shape {M.shape}")
    s = np.linalg.svd(M, compute_uv=False)
    return max(float(s[-1]), 0.0)
