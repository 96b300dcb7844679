"""Dense complex Hermitian linear algebra used throughout the solvers.

Thin, contract-checked wrappers around LAPACK via numpy: eigendecomposition,
Frobenius-nearest PSD projection, Gram factorization with numerical rank,
unitary completion of an isometric correspondence, and Schur products
(entrywise at scalar level, blockwise tensor at operator level).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericsError, ValidationError

RANK_TOL = 1e-10


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """Symmetrize on ingest so downstream eigensolves see exact Hermitian data."""
    a = np.asarray(a, dtype=complex)
    return (a + a.conj().T) / 2.0


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray  # real, ascending
    vectors: np.ndarray  # unitary, columns are eigenvectors


def eigh(h: np.ndarray) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, values ascending."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 1:
        raise ValidationError(f"square matrix required, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValidationError("non-finite entries")
    w, v = np.linalg.eigh(hermitian_part(h))
    return EigenDecomposition(values=w, vectors=v)


def psd_project(h: np.ndarray) -> np.ndarray:
    """Frobenius-nearest PSD matrix: clip negative eigenvalues to zero."""
    dec = eigh(h)
    w = np.clip(dec.values, 0.0, None)
    return hermitian_part((dec.vectors * w[None, :]) @ dec.vectors.conj().T)


def psd_project_stack(hs: np.ndarray) -> np.ndarray:
    """psd_project over a stacked array of Hermitian matrices, shape (m, n, n)."""
    hs = (hs + hs.conj().transpose(0, 2, 1)) / 2.0
    w, v = np.linalg.eigh(hs)
    w = np.clip(w, 0.0, None)
    out = (v * w[:, None, :]) @ v.conj().transpose(0, 2, 1)
    return (out + out.conj().transpose(0, 2, 1)) / 2.0


def min_eigenvalue(h: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(hermitian_part(h))[0])


def gram_factor(h: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Factor a PSD matrix as G* G = H with G of shape (rank, n).

    Eigenvalues at or below tol * lambda_max count as zero; an eigenvalue
    below -tol * scale means the input is not PSD and is rejected.
    """
    dec = eigh(h)
    lam_max = float(dec.values[-1]) if dec.values.size else 0.0
    scale = max(lam_max, 0.0)
    if dec.values[0] < -tol * max(scale, 1e-30):
        raise NumericsError(
            f"not PSD: min eigenvalue {dec.values[0]:.3e} below -tol*scale"
        )
    keep = dec.values > tol * scale
    if not np.any(keep):
        return np.zeros((0, h.shape[0]), dtype=complex)
    lam = dec.values[keep]
    vecs = dec.vectors[:, keep]
    return np.sqrt(lam)[:, None] * vecs.conj().T


def unitary_completion(
    x_vectors: np.ndarray, y_vectors: np.ndarray, gram_tol: float = 1e-8
) -> np.ndarray:
    """Complete the correspondence x_i -> y_i to a unitary matrix.

    Columns of ``x_vectors`` and ``y_vectors`` are the paired families; their
    Gram matrices must agree within ``gram_tol`` (relative), which is the
    isometry condition.  Families living in ambient spaces of different
    dimension are zero-padded to the larger one.  The orthogonal complements
    are filled deterministically by Gram-Schmidt over canonical basis vectors
    in index order.
    """
    x = np.asarray(x_vectors, dtype=complex)
    y = np.asarray(y_vectors, dtype=complex)
    if x.ndim != 2 or y.ndim != 2 or x.shape[1] != y.shape[1]:
        raise ValidationError("column-matched 2-d vector families required")
    n = max(x.shape[0], y.shape[0])
    if x.shape[0] < n:
        x = np.vstack([x, np.zeros((n - x.shape[0], x.shape[1]))])
    if y.shape[0] < n:
        y = np.vstack([y, np.zeros((n - y.shape[0], y.shape[1]))])

    gx = x.conj().T @ x
    gy = y.conj().T @ y
    scale = max(1.0, float(np.abs(gx).max(initial=0.0)))
    if np.abs(gx - gy).max(initial=0.0) > gram_tol * scale:
        raise NumericsError(
            "not an isometric correspondence: Gram mismatch "
            f"{np.abs(gx - gy).max():.3e} exceeds tolerance"
        )

    dec = eigh(gx)
    lam_max = max(float(dec.values[-1]) if dec.values.size else 0.0, 0.0)
    keep = dec.values > RANK_TOL * max(lam_max, 1e-30)
    if np.any(keep):
        coeff = dec.vectors[:, keep] / np.sqrt(dec.values[keep])[None, :]
        qx = x @ coeff
        qy = y @ coeff
        # Gram drift in y makes qy only near-orthonormal; re-orthonormalize
        # while keeping leading directions (phase-fixed QR).
        qy = _phase_fixed_qr(qy)
    else:
        qx = np.zeros((n, 0), dtype=complex)
        qy = np.zeros((n, 0), dtype=complex)

    bx = _complete_basis(qx)
    by = _complete_basis(qy)
    v = by @ bx.conj().T
    return v


def schur_oslash(
    a: np.ndarray, b: np.ndarray, block_a: int = 1, block_b: int = 1
) -> np.ndarray:
    """Node-indexed Schur product: entrywise at scalar level, tensor at block level.

    ``a`` is (n*block_a) x (n*block_a) over n nodes, likewise ``b``; the result
    carries (block_a * block_b)-sized blocks, block (i, j) equal to
    A[i,j] (x) B[i,j].  With both block sizes 1 this is the entrywise product,
    which maps pairs of PSD inputs to a PSD output.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] % block_a or b.shape[0] % block_b:
        raise ValidationError("matrix sizes must be multiples of their block sizes")
    n = a.shape[0] // block_a
    if b.shape[0] // block_b != n or a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1]:
        raise ValidationError(
            f"node-count mismatch: {a.shape} with block {block_a} vs {b.shape} with block {block_b}"
        )
    if block_a == 1 and block_b == 1:
        return a * b
    d = block_a * block_b
    out = np.zeros((n * d, n * d), dtype=complex)
    for i in range(n):
        for j in range(n):
            ab = a[i * block_a : (i + 1) * block_a, j * block_a : (j + 1) * block_a]
            bb = b[i * block_b : (i + 1) * block_b, j * block_b : (j + 1) * block_b]
            out[i * d : (i + 1) * d, j * d : (j + 1) * d] = np.kron(ab, bb)
    return out


def _phase_fixed_qr(q: np.ndarray) -> np.ndarray:
    """QR re-orthonormalization with the R diagonal rotated to be positive."""
    if q.shape[1] == 0:
        return q
    qq, rr = np.linalg.qr(q)
    d = np.diag(rr).copy()
    d = np.where(np.abs(d) < 1e-300, 1.0, d / np.abs(d))
    return qq * d[None, :]


def _complete_basis(q: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns to a full unitary basis, canonical order."""
    n, r = q.shape
    cols = q
    for j in range(n):
        if cols.shape[1] == n:
            break
        e = np.zeros(n, dtype=complex)
        e[j] = 1.0
        v = e - cols @ (cols.conj().T @ e)
        # second Gram-Schmidt pass guards against loss of orthogonality
        v = v - cols @ (cols.conj().T @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-7:
            cols = np.concatenate([cols, (v / nv)[:, None]], axis=1)
    if cols.shape[1] != n:
        raise NumericsError("basis completion failed; input columns degenerate")
    return cols
