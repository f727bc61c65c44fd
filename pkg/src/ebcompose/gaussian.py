"""Gaussian channels on covariance-matrix data.

A channel on n modes is the pair (X, Y) acting on covariance matrices as
gamma -> X gamma X^T + Y.  Means are omitted throughout; no Fock-space
objects appear.  Validity, complete copositivity, and entanglement breaking
are all linear matrix inequalities against the symplectic form, checked as
Hermitian PSD conditions through the real embedding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg, sdp
from .errors import DimMismatch, ModeMismatch, NotHermitian, PreconditionFailed


@dataclass(frozen=True)
class SymplecticForm:
    """The canonical symplectic form on n modes."""

    n: int
    matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        J = linalg.symplectic_form(self.n)
        J.setflags(write=False)
        object.__setattr__(self, "matrix", J)


@dataclass(frozen=True)
class GaussianChannel:
    """Gaussian channel (X, Y) on n modes; validity is recorded, not enforced."""

    n: int
    X: np.ndarray
    Y: np.ndarray
    valid: bool = field(init=False)

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise DimMismatch(f"mode count must be positive, got {n}")
        X = np.asarray(self.X, dtype=float)
        Y = np.asarray(self.Y, dtype=float)
        if X.shape != (2 * n, 2 * n) or Y.shape != (2 * n, 2 * n):
            raise DimMismatch(
                f"X, Y must be {(2 * n, 2 * n)} matrices, got {X.shape} and {Y.shape}"
            )
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise ValueError("channel matrices must be finite")
        if float(np.max(np.abs(Y - Y.T))) > 1e-12 * max(1.0, float(np.max(np.abs(Y)))):
            raise NotHermitian("Y must be symmetric")
        Y = (Y + Y.T) / 2.0
        X.setflags(write=False)
        Y.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "valid", _valid_check(n, X, Y))


def _embedded_psd(H: np.ndarray, tol: float) -> bool:
    Z = sdp.hermitian_to_real_embedding(H)
    w = np.linalg.eigvalsh(Z)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    return float(w[0]) >= -tol * scale


def _valid_check(n: int, X: np.ndarray, Y: np.ndarray, tol: float = linalg.TOL_PSD) -> bool:
    sig = linalg.symplectic_form(n)
    return _embedded_psd(Y + 1j * (sig - X @ sig @ X.T), tol)


def is_valid(C: GaussianChannel, tol: float = linalg.TOL_PSD) -> bool:
    """Channel condition Y + i(sigma - X sigma X^T) >= 0."""
    return _valid_check(C.n, C.X, C.Y, tol)


def is_cocp(C: GaussianChannel, tol: float = linalg.TOL_PSD) -> bool:
    """Complete copositivity condition Y - i(sigma + X sigma X^T) >= 0."""
    sig = linalg.symplectic_form(C.n)
    return _embedded_psd(C.Y - 1j * (sig + C.X @ sig @ C.X.T), tol)


def is_eb(C: GaussianChannel, opts: Optional[dict] = None) -> sdp.SdpResult:
    """Entanglement-breaking test via the noise-splitting SDP.

    Feasible results carry the explicit witness pair (N, M) and are
    re-audited here: adding the two split inequalities must recover both the
    validity and the complete-copositivity conditions.
    """
    res = sdp.gaussian_eb_split(C.Y, C.X, opts)
    if res.status != sdp.FEASIBLE:
        return res
    sig = linalg.symplectic_form(C.n)
    xsx = C.X @ sig @ C.X.T
    M, N = res.primal["M"], res.primal["N"]
    cocp_margin = linalg.psd_margin(C.Y - 1j * (sig + xsx))
    valid_margin = linalg.psd_margin(C.Y + 1j * (sig - xsx))
    if min(cocp_margin, valid_margin) < -1e-8:
        return sdp.SdpResult(
            sdp.INCONCLUSIVE,
            None,
            None,
            {**res.residuals, "cocp_margin": cocp_margin, "valid_margin": valid_margin},
        )
    return sdp.SdpResult(
        res.status,
        {"M": M, "N": N},
        res.dual,
        {**res.residuals, "cocp_margin": cocp_margin, "valid_margin": valid_margin},
    )


def compose(C2: GaussianChannel, C1: GaussianChannel) -> GaussianChannel:
    """Concatenation C2 after C1: X = X2 X1, Y = X2 Y1 X2^T + Y2."""
    if C1.n != C2.n:
        raise ModeMismatch(f"mode counts {C1.n} and {C2.n} differ")
    X = C2.X @ C1.X
    Y = C2.X @ C1.Y @ C2.X.T + C2.Y
    return GaussianChannel(C1.n, X, (Y + Y.T) / 2.0)


def ppt2_witness(
    C2: GaussianChannel, C1: GaussianChannel, tol: float = linalg.TOL_PSD
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Explicit entanglement-breaking split for a two-step coCP concatenation.

    For valid, completely copositive C1 and C2, the concatenation C2 after C1
    is entanglement breaking, witnessed by N = X2 Y1 X2^T and M = Y2.  Both
    linear matrix inequalities are verified and the flag returned; under the
    stated preconditions it can only be true.
    """
    if C1.n != C2.n:
        raise ModeMismatch(f"mode counts {C1.n} and {C2.n} differ")
    for label, C in (("first", C1), ("second", C2)):
        if not is_valid(C, tol):
            raise PreconditionFailed(f"{label} channel fails the validity condition")
        if not is_cocp(C, tol):
            raise PreconditionFailed(f"{label} channel is not completely copositive")
    sig = linalg.symplectic_form(C1.n)
    N = C2.X @ C1.Y @ C2.X.T
    N = (N + N.T) / 2.0
    M = C2.Y
    Xc = C2.X @ C1.X
    ok_n = _embedded_psd(N - 1j * (Xc @ sig @ Xc.T), tol)
    ok_m = _embedded_psd(M - 1j * sig, tol)
    return N, M, bool(ok_n and ok_m)


def random_cocp_channel(n: int, seed: int) -> GaussianChannel:
    """Random channel passing both the validity and coCP conditions.

    X has uniform entries in [-1, 1]; Y is a random PSD matrix shifted by
    the smallest multiple of the identity that gives both conditions an
    absolute eigenvalue margin of at least 0.01.
    """
    if n < 1:
        raise DimMismatch(f"mode count must be positive, got {n}")
    rng = np.random.default_rng(seed)
    two_n = 2 * n
    X = rng.uniform(-1.0, 1.0, size=(two_n, two_n))
    A = rng.uniform(-1.0, 1.0, size=(two_n, two_n))
    Y0 = A @ A.T
    sig = linalg.symplectic_form(n)
    xsx = X @ sig @ X.T
    floor = min(
        linalg.min_eig(Y0 + 1j * (sig - xsx)),
        linalg.min_eig(Y0 - 1j * (sig + xsx)),
    )
    lam = max(0.0, 0.01 - floor)
    return GaussianChannel(n, X, Y0 + lam * np.eye(two_n))


def channel_to_json(C: GaussianChannel) -> dict:
    return {
        "n": C.n,
        "X": [[float(v) for v in row] for row in C.X],
        "Y": [[float(v) for v in row] for row in C.Y],
    }


def channel_from_json(obj: dict) -> GaussianChannel:
    n = int(obj["n"])
    X = np.array(obj["X"], dtype=float)
    Y = np.array(obj["Y"], dtype=float)
    return GaussianChannel(n, X, Y)
