"""Dense complex linear algebra on bipartite matrices.

Matrices are plain ``numpy`` arrays of ``complex128``; a bipartite split is a
``(dA, dB)`` pair whose product must equal the ambient dimension.  Everything
here is a pure function, dense, and sized for ambient dimensions up to ~81.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import DimMismatch, DomainError, NotHermitian

# A Hermitian M counts as PSD iff min_eig(M) >= -TOL_PSD * max(1, ||M||_inf).
TOL_PSD = 1e-9

# Relative tolerance for "is this Hermitian" preconditions.
TOL_HERM = 1e-10


def _as_matrix(M) -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2:
        raise DimMismatch(f"expected a matrix, got ndim={A.ndim}")
    if not np.all(np.isfinite(A.view(float))):
        raise ValueError("matrix entries must be finite")
    return A


def _check_square(A: np.ndarray) -> int:
    if A.shape[0] != A.shape[1]:
        raise DimMismatch(f"expected square matrix, got shape {A.shape}")
    return A.shape[0]


def _check_bipartite(A: np.ndarray, dims: Sequence[int]) -> tuple[int, int]:
    n = _check_square(A)
    dA, dB = int(dims[0]), int(dims[1])
    if dA < 1 or dB < 1 or dA * dB != n:
        raise DimMismatch(f"dims {dims} do not factor ambient dimension {n}")
    return dA, dB


def hermiticity_defect(M) -> float:
    """Max-entry magnitude of M - M^dagger."""
    A = _as_matrix(M)
    _check_square(A)
    return float(np.max(np.abs(A - A.conj().T))) if A.size else 0.0


def require_hermitian(M, tol: float = TOL_HERM) -> np.ndarray:
    """Return M as an array, raising NotHermitian beyond relative tolerance."""
    A = _as_matrix(M)
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 0.0)
    if hermiticity_defect(A) > tol * scale:
        raise NotHermitian(f"hermiticity defect {hermiticity_defect(A):.3e} exceeds tolerance")
    return A


def eig_hermitian(M, tol: float = TOL_HERM) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, V)`` with eigenvalues ``w`` real ascending and ``V`` unitary,
    so that ``M = V @ diag(w) @ V.conj().T``.
    """
    A = require_hermitian(M, tol)
    w, V = np.linalg.eigh(A)
    return w, V


def min_eig(M) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    A = require_hermitian(M)
    return float(np.linalg.eigvalsh(A)[0])


def is_psd(M, tol_psd: float = TOL_PSD) -> bool:
    """PSD test with the package-wide relative tolerance convention."""
    A = require_hermitian(M)
    w = np.linalg.eigvalsh(A)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    return float(w[0]) >= -tol_psd * scale


def psd_margin(M) -> float:
    """min_eig(M) / max(1, ||M||_inf); nonnegative within tolerance iff PSD."""
    A = require_hermitian(M)
    w = np.linalg.eigvalsh(A)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    return float(w[0]) / scale


def kron(A, B) -> np.ndarray:
    """Kronecker product with complex promotion."""
    return np.kron(_as_matrix(A), _as_matrix(B))


def operator_norm(M) -> float:
    """Largest singular value."""
    A = _as_matrix(M)
    return float(np.linalg.norm(A, 2)) if A.size else 0.0


def max_entangled_vector(d: int) -> np.ndarray:
    """Unnormalized |Omega> = sum_i |i>|i> on C^d x C^d."""
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0
    return v


def max_entangled_projector(d: int) -> np.ndarray:
    """Unnormalized |Omega><Omega|; trace d, one eigenvalue d."""
    v = max_entangled_vector(d)
    return np.outer(v, v.conj())


def flip_operator(d: int) -> np.ndarray:
    """Swap F = sum_ij |ij><ji|; the Choi matrix of transposition."""
    F = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            F[i * d + j, j * d + i] = 1.0
    return F


def symplectic_form(n: int) -> np.ndarray:
    """Standard symplectic form on n modes, block-diagonal [[0,1],[-1,0]] per mode."""
    if n < 1:
        raise DomainError(f"mode count must be positive, got {n}")
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * n, 2 * n))
    for k in range(n):
        out[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = block
    return out


def partial_transpose(M, dims: Sequence[int], which: str = "A") -> np.ndarray:
    """Transpose one tensor factor of a square bipartite matrix."""
    A = _as_matrix(M)
    dA, dB = _check_bipartite(A, dims)
    T = A.reshape(dA, dB, dA, dB)
    if which == "A":
        T = T.transpose(2, 1, 0, 3)
    elif which == "B":
        T = T.transpose(0, 3, 2, 1)
    else:
        raise ValueError("which must be 'A' or 'B'")
    return T.reshape(dA * dB, dA * dB).copy()


def partial_trace(M, dims: Sequence[int], which: str = "B") -> np.ndarray:
    """Trace out one tensor factor; preserves the total trace."""
    A = _as_matrix(M)
    dA, dB = _check_bipartite(A, dims)
    T = A.reshape(dA, dB, dA, dB)
    if which == "B":
        return np.trace(T, axis1=1, axis2=3).copy()
    if which == "A":
        return np.trace(T, axis1=0, axis2=2).copy()
    raise ValueError("which must be 'A' or 'B'")


def realign(M, dims: Sequence[int]) -> np.ndarray:
    """Index reshuffle R(M)[(i,j),(k,l)] = M[(i,k),(j,l)].

    The output has shape dA^2 x dB^2; its singular values are the operator
    Schmidt coefficients of M, and R(A kron B) = vec(A) vec(B)^T (row-major
    vec), which pins the index convention.
    """
    A = _as_matrix(M)
    dA, dB = _check_bipartite(A, dims)
    T = A.reshape(dA, dB, dA, dB)
    return T.transpose(0, 2, 1, 3).reshape(dA * dA, dB * dB).copy()


def permute_systems(M, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of a square multipartite matrix.

    ``perm[k]`` names which input factor lands in slot ``k`` of the output.
    """
    A = _as_matrix(M)
    dims = [int(d) for d in dims]
    n = int(np.prod(dims))
    if A.shape != (n, n):
        raise DimMismatch(f"dims {dims} do not match shape {A.shape}")
    perm = list(perm)
    if sorted(perm) != list(range(len(dims))):
        raise ValueError(f"perm {perm} is not a permutation of {len(dims)} factors")
    k = len(dims)
    T = A.reshape(dims + dims)
    axes = perm + [p + k for p in perm]
    out_dims = [dims[p] for p in perm]
    return T.transpose(axes).reshape(int(np.prod(out_dims)), -1).copy()


def random_hermitian(d: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (G + G.conj().T) / 2.0


def random_psd(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Wishart-style random PSD matrix, optionally rank-limited."""
    r = d if rank is None else int(rank)
    G = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    return G @ G.conj().T


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix."""
    G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_pure_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def _entry_to_float(x) -> float:
    # JSON entries may arrive as numbers or exact decimal strings.
    if isinstance(x, str):
        return float(x)
    return float(x)


def matrix_to_json(M) -> dict:
    """Serialize to {"rows","cols","re","im"} with round-trippable floats."""
    A = _as_matrix(M)
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "re": [[float(x) for x in row] for row in A.real],
        "im": [[float(x) for x in row] for row in A.imag],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    re = obj["re"]
    im = obj.get("im")

    def grid(raw) -> np.ndarray:
        if len(raw) != rows or any(len(row) != cols for row in raw):
            raise DimMismatch("matrix JSON shape mismatch")
        out = np.zeros((rows, cols))
        for i, row in enumerate(raw):
            for j, x in enumerate(row):
                out[i, j] = _entry_to_float(x)
        return out

    A = grid(re).astype(complex)
    if im is not None:
        A = A + 1j * grid(im)
    return A
