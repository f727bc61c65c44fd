"""Hot numerical kernels with an optional numba JIT path.

Each kernel is written once in numba-compatible numpy and compiled when numba
is importable; setting ``EBCOMPOSE_DISABLE_JIT=1`` (or missing numba) selects
the identical pure-numpy code path.  The ``*_py`` names always refer to the
uncompiled variants so the two paths can be compared directly.
"""

from __future__ import annotations

import functools
import os

import numpy as np

_DISABLE = bool(os.environ.get("EBCOMPOSE_DISABLE_JIT"))

try:
    import numba as _nb
except ImportError:  # pragma: no cover - exercised via the env flag instead
    _nb = None

HAS_NUMBA = _nb is not None
JIT_ENABLED = HAS_NUMBA and not _DISABLE

if JIT_ENABLED:
    _njit = functools.partial(_nb.njit, cache=True)
else:
    def _njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap


def _ball_seesaw_py(fwd, adj, starts, iters):
    """Maximize ||D(X)||_inf over unitary X by alternating exact steps.

    fwd and adj are the n^2 x n^2 matrix representations of the shifted map D
    and its Hilbert-Schmidt adjoint acting on row-major vectorized matrices;
    starts is a stack of unit starting unitaries.  Given X, the optimal rank-1
    direction is the top singular pair of D(X); given the pair, the optimal
    unitary is the polar factor of the adjoint-propagated dyad.  Both half
    steps are exact maximizations, so the objective is non-decreasing.
    """
    n = starts.shape[1]
    best_val = -1.0
    best_x = starts[0].ravel().copy()
    for r in range(starts.shape[0]):
        x = starts[r].ravel().copy()
        prev = -1.0
        for _ in range(iters):
            Q = (fwd @ x).reshape((n, n))
            U, s, Vh = np.linalg.svd(Q)
            val = s[0]
            m = np.empty(n * n, dtype=np.complex128)
            for i in range(n):
                for j in range(n):
                    m[i * n + j] = U[i, 0] * Vh[0, j]
            A = (adj @ m).reshape((n, n))
            Ua, sa, Vha = np.linalg.svd(A)
            x = (Ua @ Vha).ravel()
            if abs(val - prev) <= 1e-13 * max(1.0, val):
                break
            prev = val
        s_fin = np.linalg.svd((fwd @ x).reshape((n, n)))[1]
        if s_fin[0] > best_val:
            best_val = s_fin[0]
            best_x = x.copy()
    return best_val, best_x


def _kpos_seesaw_py(C, d1, d2, k, a_starts, b_starts, iters):
    """Minimize <psi|C|psi> over unit vectors of Schmidt rank <= k.

    psi is parametrized as vec(A @ B) with A of shape (d1, k) and B of shape
    (k, d2).  With the passive factor orthonormalized, each half step is an
    exact smallest-eigenvector computation, so the value is non-increasing.
    Returns the best (value, psi).
    """
    restarts = a_starts.shape[0]
    best_val = np.inf
    best_psi = np.zeros(d1 * d2, dtype=np.complex128)
    for r in range(restarts):
        A = a_starts[r].copy()
        B = b_starts[r].copy()
        prev = np.inf
        val = np.inf
        for _ in range(iters):
            # orthonormalize rows of B, then solve exactly for A
            Qb, Rb = np.linalg.qr(np.ascontiguousarray(B.conj().T))
            Bt = Qb.conj().T
            KB = np.zeros((d1 * d2, d1 * k), dtype=np.complex128)
            for i in range(d1):
                for a in range(d2):
                    for s in range(k):
                        KB[i * d2 + a, i * k + s] = Bt[s, a]
            HA = KB.conj().T @ C @ KB
            wA, VA = np.linalg.eigh(HA)
            val = wA[0]
            A = VA[:, 0].copy().reshape((d1, k))
            B = Bt
            # orthonormalize columns of A, then solve exactly for B
            Qa, Ra = np.linalg.qr(A)
            At = Qa.copy()
            KA = np.zeros((d1 * d2, k * d2), dtype=np.complex128)
            for i in range(d1):
                for a in range(d2):
                    for s in range(k):
                        KA[i * d2 + a, s * d2 + a] = At[i, s]
            HB = KA.conj().T @ C @ KA
            wB, VB = np.linalg.eigh(HB)
            val = wB[0]
            B = VB[:, 0].copy().reshape((k, d2))
            A = At
            if abs(val - prev) <= 1e-14 * max(1.0, abs(val)):
                break
            prev = val
        M = A @ B
        psi = M.ravel()
        nrm = np.sqrt((np.abs(psi) ** 2).sum())
        if nrm > 0:
            psi = psi / nrm
        value = (psi.conj() @ (C @ psi)).real
        if value < best_val:
            best_val = value
            best_psi = psi.copy()
    return best_val, best_psi


def _pursuit_atom_py(R, dA, dB, a_starts, b_starts, iters):
    """Maximize <a (x) b|R|a (x) b> over unit product vectors.

    Alternates exact top-eigenvector steps for each factor; R is the current
    (Hermitian) residual as a dA*dB square matrix.  Returns (value, a, b).
    """
    best_val = -np.inf
    best_a = a_starts[0].copy()
    best_b = b_starts[0].copy()
    for r in range(a_starts.shape[0]):
        a = a_starts[r].copy()
        b = b_starts[r].copy()
        val = -np.inf
        for _ in range(iters):
            Pb = np.zeros((dA * dB, dA), dtype=np.complex128)
            for i in range(dA):
                for kk in range(dB):
                    Pb[i * dB + kk, i] = b[kk]
            Ma = Pb.conj().T @ R @ Pb
            wa, Va = np.linalg.eigh(Ma)
            a = Va[:, dA - 1].copy()
            Pa = np.zeros((dA * dB, dB), dtype=np.complex128)
            for i in range(dA):
                for kk in range(dB):
                    Pa[i * dB + kk, kk] = a[i]
            Mb = Pa.conj().T @ R @ Pa
            wb, Vb = np.linalg.eigh(Mb)
            b = Vb[:, dB - 1].copy()
            new_val = wb[dB - 1]
            if abs(new_val - val) <= 1e-13 * max(1.0, abs(new_val)):
                val = new_val
                break
            val = new_val
        if val > best_val:
            best_val = val
            best_a = a.copy()
            best_b = b.copy()
    return best_val, best_a, best_b


ball_seesaw = _njit()(_ball_seesaw_py)
kpos_seesaw = _njit()(_kpos_seesaw_py)
pursuit_atom = _njit()(_pursuit_atom_py)
