"""Dense complex Hermitian linear algebra.

Operators are plain ``numpy`` complex arrays. Bipartite indexing is A-major
throughout the package: the composite index of subsystem indices ``(i, k)``
is ``i * d_b + k``. All logarithms elsewhere are base 2; this module is
log-free.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeEigenvalue,
    NotHermitian,
    ValidationError,
)

HERMITIAN_TOL = 1e-10

# Support cutoff: eigenvalues at or below CUTOFF_SCALE * max(1, largest
# eigenvalue) are treated as exact zeros.
CUTOFF_SCALE = 1e-10


class EigenDecomposition(NamedTuple):
    """Spectral decomposition of a Hermitian matrix.

    ``eigenvalues`` is real and ascending; ``eigenvectors`` holds the
    matching orthonormal eigenvectors as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_square_matrix(m) -> np.ndarray:
    """Coerce to a square complex matrix with finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    return a


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entrywise deviation of ``m`` from its conjugate transpose."""
    return float(np.max(np.abs(m - m.conj().T), initial=0.0))


def require_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return the symmetrized matrix, or raise if the defect exceeds ``tol``."""
    a = as_square_matrix(m)
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitian(f"hermiticity defect {defect:.3e} exceeds {tol:.1e}")
    return 0.5 * (a + a.conj().T)


def unitarity_defect(u: np.ndarray) -> float:
    """Frobenius norm of ``u† u - I``."""
    a = as_square_matrix(u)
    eye = np.eye(a.shape[0])
    return float(np.linalg.norm(a.conj().T @ a - eye))


def support_cutoff(eigenvalues: np.ndarray, scale: float = CUTOFF_SCALE) -> float:
    """Default threshold below which eigenvalues count as zero."""
    top = float(np.max(np.abs(eigenvalues), initial=0.0))
    return scale * max(top, 1.0)


def hermitian_eig(m, tol: float = HERMITIAN_TOL, method: str = "lapack") -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``method="lapack"`` uses ``numpy.linalg.eigh``; ``method="jacobi"`` uses
    the cyclic Jacobi solver below, which is slower but fully independent of
    LAPACK and serves as a cross-check.
    """
    h = require_hermitian(m, tol)
    if method == "jacobi":
        return jacobi_eig(h, tol=tol)
    if method != "lapack":
        raise ValidationError(f"unknown eigensolver method {method!r}")
    vals, vecs = np.linalg.eigh(h)
    return EigenDecomposition(vals, vecs)


def jacobi_eig(m, tol: float = HERMITIAN_TOL, sweep_tol: float = 1e-14,
               max_sweeps: int = 100) -> EigenDecomposition:
    """Cyclic Jacobi eigensolver for complex Hermitian matrices.

    Pivots sweep the strict upper triangle in fixed row-major order, so the
    result is bit-reproducible. Each pivot applies the 2x2 unitary that
    zeroes the pivot entry: a phase rotation making it real followed by the
    classical symmetric Jacobi rotation.
    """
    a = require_hermitian(m, tol).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= sweep_tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                b = abs(apq)
                if b <= 1e-300:
                    continue
                phase = apq / b
                tau = (a[q, q].real - a[p, p].real) / (2.0 * b)
                if tau >= 0:
                    t = 1.0 / (tau + np.hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                j2 = np.array(
                    [[c, s], [-s * np.conj(phase), c * np.conj(phase)]],
                    dtype=complex,
                )
                a[:, [p, q]] = a[:, [p, q]] @ j2
                a[[p, q], :] = j2.conj().T @ a[[p, q], :]
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, [p, q]] = v[:, [p, q]] @ j2
    order = np.argsort(np.diag(a).real, kind="stable")
    return EigenDecomposition(np.diag(a).real[order], v[:, order])


def matrix_function_on_support(m, f: Callable[[np.ndarray], np.ndarray],
                               cutoff: float | None = None) -> np.ndarray:
    """Apply a scalar function to a PSD matrix on its support.

    Eigenvalues at or below ``cutoff`` are treated as exact zeros and
    excluded from ``f``, which makes functions like ``x**-0.5`` and ``log2``
    well defined on rank-deficient inputs. ``cutoff=None`` selects the
    package default relative threshold.
    """
    vals, vecs = hermitian_eig(m)
    if cutoff is None:
        cutoff = support_cutoff(vals)
    if cutoff < 0:
        raise ValidationError(f"cutoff must be nonnegative, got {cutoff}")
    if np.any(vals < -cutoff):
        worst = float(vals.min())
        raise NegativeEigenvalue(f"eigenvalue {worst:.3e} below -{cutoff:.1e}")
    keep = vals > cutoff
    fvals = np.zeros_like(vals)
    if np.any(keep):
        fvals[keep] = f(vals[keep])
    out = (vecs * fvals) @ vecs.conj().T
    return 0.5 * (out + out.conj().T)


def kron(a, b) -> np.ndarray:
    """Tensor product with A-major composite indexing."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(m, d_a: int, d_b: int, keep: str = "A") -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    ``keep="A"`` returns the d_a x d_a reduction, ``keep="B"`` the
    d_b x d_b one. Composite indexing is A-major.
    """
    a = as_square_matrix(m)
    if a.shape[0] != d_a * d_b:
        raise DimensionMismatch(
            f"matrix dimension {a.shape[0]} is not d_a*d_b = {d_a * d_b}"
        )
    r = a.reshape(d_a, d_b, d_a, d_b)
    if keep == "A":
        return np.einsum("ibjb->ij", r)
    if keep == "B":
        return np.einsum("ibic->bc", r)
    raise ValidationError(f"keep must be 'A' or 'B', got {keep!r}")


def distance(a, b, norm: str = "frobenius") -> float:
    """Distance between two equally sized matrices.

    ``frobenius`` is the entrywise 2-norm of the difference; ``trace`` is the
    full trace norm (sum of singular values), so orthogonal pure states are
    at trace distance 2 under this convention.
    """
    x = as_square_matrix(a)
    y = as_square_matrix(b)
    if x.shape != y.shape:
        raise DimensionMismatch(f"shape {x.shape} vs {y.shape}")
    d = x - y
    if norm == "frobenius":
        return float(np.linalg.norm(d))
    if norm == "trace":
        return float(np.sum(np.linalg.svd(d, compute_uv=False)))
    raise ValidationError(f"norm must be 'frobenius' or 'trace', got {norm!r}")


def trace_distance(a, b) -> float:
    """Half the trace norm of the difference, the state-discrimination metric."""
    return 0.5 * distance(a, b, norm="trace")
