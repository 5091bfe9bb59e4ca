"""Dense complex linear-algebra kernel.

Factorizations, pseudo-inverse, PSD square root, spectral radius, and a
discrete Stein-equation solver.  Operators and vectors are plain complex
``numpy`` arrays; every public function validates its inputs and never
mutates them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DivergentSeries,
    InvalidInput,
    NoConvergence,
    NotPositiveSemidefinite,
)

# Dimension up to which solve_stein uses the exact vectorized linear solve.
STEIN_DENSE_LIMIT = 64

# Cap on squaring steps of the doubling iteration.
STEIN_MAX_DOUBLINGS = 200


def as_operator(entries) -> np.ndarray:
    """Validate and return a square complex matrix with finite entries."""
    m = np.array(entries, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InvalidInput(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInput("operator entries must be finite")
    return m


def as_vector(entries) -> np.ndarray:
    """Validate and return a complex vector with finite entries."""
    v = np.array(entries, dtype=complex).reshape(-1)
    if v.size == 0:
        raise InvalidInput("vector must be nonempty")
    if not np.all(np.isfinite(v)):
        raise InvalidInput("vector entries must be finite")
    return v


def as_matrix(entries) -> np.ndarray:
    """Validate a (possibly rectangular) complex matrix."""
    m = np.array(entries, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise InvalidInput(f"expected a nonempty matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInput("matrix entries must be finite")
    return m


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(m).T)


def frobenius(m) -> float:
    return float(np.linalg.norm(m))


def operator_norm(m) -> float:
    """Largest singular value."""
    return float(np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)[0])


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``m = u @ diag(s) @ vh`` with singular values descending."""
    m = as_matrix(m)
    return np.linalg.svd(m, full_matrices=False)


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns eigenvalues in ascending order and the unitary matrix of
    eigenvectors (columns).  Rejects inputs further than
    ``1e-10 * ||m||_F`` from Hermitian.
    """
    m = as_operator(m)
    scale = max(1.0, frobenius(m))
    if frobenius(m - adjoint(m)) > 1e-10 * scale:
        raise InvalidInput("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(m)
    return w.astype(float), v


def pinv(m, rank_tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudo-inverse via SVD.

    ``rank_tol`` is an absolute cutoff on singular values; the default is
    ``max(shape) * eps * sigma_max``.
    """
    m = as_matrix(m)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    if rank_tol is None:
        rank_tol = max(m.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    if rank_tol < 0:
        raise InvalidInput("rank_tol must be nonnegative")
    inv = np.where(s > rank_tol, 1.0 / np.where(s > rank_tol, s, 1.0), 0.0)
    return adjoint(vh) @ (inv[:, None] * adjoint(u))


def matrix_rank(m, rank_tol: float | None = None) -> int:
    m = as_matrix(m)
    s = np.linalg.svd(m, compute_uv=False)
    if rank_tol is None:
        rank_tol = max(m.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    return int(np.sum(s > rank_tol))


def range_basis(m, rank_tol: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of ``m``."""
    m = as_matrix(m)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if rank_tol is None:
        rank_tol = max(m.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > rank_tol))
    return u[:, :rank]


def sqrt_psd(m) -> np.ndarray:
    """Hermitian PSD square root.

    Eigenvalue dust below zero is clamped to zero; anything below
    ``-1e-10 * ||m||`` raises :class:`NotPositiveSemidefinite`.
    """
    m = as_operator(m)
    w, v = eig_hermitian(m)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if w.size and w[0] < -1e-10 * scale:
        raise NotPositiveSemidefinite(
            f"eigenvalue {w[0]:.3e} below PSD threshold {-1e-10 * scale:.3e}"
        )
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ adjoint(v)


def spectral_radius(m) -> float:
    """Largest eigenvalue modulus, via dense eigensolve with a power-iteration
    fallback should the QR iteration fail to converge."""
    m = as_operator(m)
    try:
        eigs = np.linalg.eigvals(m)
        return float(np.max(np.abs(eigs)))
    except np.linalg.LinAlgError:
        return _power_radius(m)


def _power_radius(m: np.ndarray, iterations: int = 500) -> float:
    d = m.shape[0]
    x = (1.0 + np.arange(d)).astype(complex)
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iterations):
        y = m @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        est = float(norm)
        x = y / norm
    return est


@dataclass(frozen=True, eq=False)
class SteinSolution:
    """Solution record for ``s - t @ s @ t* = c``."""

    s: np.ndarray
    residual: float
    method: str  # "vectorized-solve" or "doubling-iteration"
    iterations: int


def solve_stein(t, c, tol: float = 1e-12) -> SteinSolution:
    """Solve the discrete Stein equation ``S - T S T* = C``.

    The solution is the convergent series ``sum_{n>=0} T^n C T*^n``,
    defined whenever the spectral radius of ``T`` is below one.  For
    dimension up to ``STEIN_DENSE_LIMIT`` the vectorized system
    ``(I - kron(T, conj(T))) vec(S) = vec(C)`` is solved exactly (row-major
    vec); larger problems use the squaring iteration
    ``S <- S + T_k S T_k*``, ``T_k <- T_k @ T_k``.

    Parameters
    ----------
    t : square complex matrix
    c : Hermitian PSD matrix of matching shape
    tol : relative residual target; success requires
        ``||S - T S T* - C||_F <= tol * (1 + ||C||_F)``.
    """
    t = as_operator(t)
    c = as_operator(c)
    if t.shape != c.shape:
        raise InvalidInput(f"shape mismatch: T {t.shape} vs C {c.shape}")
    c_fro = frobenius(c)
    if frobenius(c - adjoint(c)) > 1e-10 * max(1.0, c_fro):
        raise InvalidInput("C must be Hermitian")
    w = np.linalg.eigvalsh((c + adjoint(c)) / 2.0)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if w.size and w[0] < -1e-10 * scale:
        raise NotPositiveSemidefinite("C must be positive semidefinite")

    rho = spectral_radius(t)
    if rho >= 1.0:
        raise DivergentSeries(
            f"spectral radius {rho:.8g} >= 1; orbit series diverges"
        )

    d = t.shape[0]
    target = tol * (1.0 + c_fro)
    if d <= STEIN_DENSE_LIMIT:
        a = np.eye(d * d, dtype=complex) - np.kron(t, t.conj())
        s = np.linalg.solve(a, c.reshape(-1)).reshape(d, d)
        method = "vectorized-solve"
        iterations = 0
    else:
        s = c.astype(complex, copy=True)
        tk = t.copy()
        method = "doubling-iteration"
        iterations = 0
        for iterations in range(1, STEIN_MAX_DOUBLINGS + 1):
            update = tk @ s @ adjoint(tk)
            s = s + update
            if frobenius(update) <= 0.5 * target:
                break
            tk = tk @ tk
        else:
            raise NoConvergence(
                f"doubling iteration did not converge in {STEIN_MAX_DOUBLINGS} steps"
            )

    s = (s + adjoint(s)) / 2.0
    residual = frobenius(s - t @ s @ adjoint(t) - c)
    if residual > target:
        raise NoConvergence(
            f"Stein residual {residual:.3e} exceeds tolerance {target:.3e}"
        )
    return SteinSolution(s=s, residual=residual, method=method, iterations=iterations)
