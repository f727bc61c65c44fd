"""Dense semidefinite feasibility solver and the checks built on it.

Problems are block-diagonal real symmetric SDPs with trace equality
constraints.  The solver is a homogeneous self-dual interior-point method
with Nesterov-Todd scaling and a Mehrotra predictor-corrector step; it is
sized for a few hundred scalar variables, which covers every use in this
package.  Every verdict is re-checked outside the solver: "feasible" is
claimed only after the returned blocks pass an independent PSD and residual
audit, and "infeasible" only with a verified separating functional.

Hermitian problems enter through the standard real embedding
H -> [[Re H, -Im H], [Im H, Re H]].  Constraints are always written with
Hermitian coefficient matrices, whose embeddings commute with the embedded
complex structure; the interior-point iterates then stay in the embedded
subspace automatically and no structure equalities are needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np
import scipy.linalg

from . import choi, linalg
from .errors import DimMismatch, NotHermitian, PreconditionFailed

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
INCONCLUSIVE = "inconclusive"

# Relative equality-residual bound a "feasible" verdict certifies.
FEAS_TOL = 1e-7

# Relative eigenvalue floor certified on returned PSD blocks.
PSD_TOL = 1e-9

_SQRT2 = float(np.sqrt(2.0))


# ---------------------------------------------------------------------------
# problem and result types


def _clean_symmetric(name: str, M, n: int) -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.shape != (n, n):
        raise DimMismatch(
            f"coefficient for block {name!r} has shape {A.shape}, expected {(n, n)}"
        )
    if not np.all(np.isfinite(A)):
        raise ValueError(f"coefficient for block {name!r} has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 0.0)
    if float(np.max(np.abs(A - A.T))) > 1e-10 * scale:
        raise NotHermitian(f"coefficient for block {name!r} is not symmetric")
    S = (A + A.T) / 2.0
    S.setflags(write=False)
    return S


@dataclass(frozen=True)
class SdpProblem:
    """Feasibility (or minimization) over block-diagonal PSD matrices.

    ``blocks`` is a sequence of ``(name, dim)`` pairs declaring real
    symmetric PSD variables.  Each equality is ``(coeffs, rhs)`` with
    ``coeffs`` mapping block names to symmetric coefficient matrices, and
    constrains ``sum_j tr(coeffs[j] @ X_j) == rhs``.  ``objective``, when
    present, is minimized with the same coefficient convention.
    """

    blocks: tuple[tuple[str, int], ...]
    equalities: tuple[tuple[Mapping[str, np.ndarray], float], ...]
    objective: Optional[Mapping[str, np.ndarray]] = None

    def __post_init__(self):
        blocks = tuple((str(name), int(dim)) for name, dim in self.blocks)
        if not blocks:
            raise PreconditionFailed("problem declares no blocks")
        names = [name for name, _ in blocks]
        if len(set(names)) != len(names):
            raise PreconditionFailed("block names must be unique")
        dims = {name: dim for name, dim in blocks}
        for name, dim in blocks:
            if dim < 1:
                raise DimMismatch(f"block {name!r} has non-positive dimension {dim}")

        def clean_coeffs(coeffs: Mapping[str, np.ndarray]) -> Mapping[str, np.ndarray]:
            out = {}
            for name, M in coeffs.items():
                if name not in dims:
                    raise PreconditionFailed(f"unknown block name {name!r}")
                out[name] = _clean_symmetric(name, M, dims[name])
            return out

        equalities = tuple(
            (clean_coeffs(coeffs), float(rhs)) for coeffs, rhs in self.equalities
        )
        for _, rhs in equalities:
            if not np.isfinite(rhs):
                raise ValueError("equality right-hand side must be finite")
        objective = None if self.objective is None else clean_coeffs(self.objective)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "equalities", equalities)
        object.__setattr__(self, "objective", objective)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.blocks)


@dataclass(frozen=True)
class SdpResult:
    """Audited outcome of an SDP solve.

    ``status`` is one of "feasible", "infeasible", "inconclusive".  On
    "feasible", ``primal`` maps block names to PSD matrices satisfying the
    equalities; on "infeasible", ``dual`` carries the verified separating
    functional (the Farkas multiplier vector, or a problem-specific witness
    for the wrappers below).  ``residuals`` holds scalar diagnostics.
    """

    status: str
    primal: Optional[dict[str, np.ndarray]]
    dual: Optional[np.ndarray]
    residuals: dict[str, float]


# ---------------------------------------------------------------------------
# svec packing

# Symmetric matrices are flattened isometrically: diagonal entries first,
# then sqrt(2)-scaled strict upper entries, so vec(S) . vec(T) = tr(S T).


class _BlockOps:
    def __init__(self, dims: Sequence[int]):
        self.dims = list(dims)
        self.triu = [np.triu_indices(n, 1) for n in self.dims]
        self.sizes = [n * (n + 1) // 2 for n in self.dims]
        self.offsets = np.concatenate([[0], np.cumsum(self.sizes)])
        self.total = int(self.offsets[-1])

    def svec_block(self, k: int, S: np.ndarray) -> np.ndarray:
        return np.concatenate([np.diag(S), _SQRT2 * S[self.triu[k]]])

    def smat_block(self, k: int, v: np.ndarray) -> np.ndarray:
        n = self.dims[k]
        S = np.zeros((n, n))
        S[np.diag_indices(n)] = v[:n]
        S[self.triu[k]] = v[n:] / _SQRT2
        return S + np.triu(S, 1).T

    def pack(self, mats: Sequence[np.ndarray]) -> np.ndarray:
        return np.concatenate([self.svec_block(k, M) for k, M in enumerate(mats)])

    def unpack(self, v: np.ndarray) -> list[np.ndarray]:
        return [
            self.smat_block(k, v[self.offsets[k] : self.offsets[k + 1]])
            for k in range(len(self.dims))
        ]

    def identity_vec(self) -> np.ndarray:
        return self.pack([np.eye(n) for n in self.dims])


def _compile(problem: SdpProblem):
    names = list(problem.names)
    dims = [dim for _, dim in problem.blocks]
    ops = _BlockOps(dims)
    m = len(problem.equalities)
    A = np.zeros((m, ops.total))
    b = np.zeros(m)
    for i, (coeffs, rhs) in enumerate(problem.equalities):
        b[i] = rhs
        for k, name in enumerate(names):
            if name in coeffs:
                lo, hi = ops.offsets[k], ops.offsets[k + 1]
                A[i, lo:hi] = ops.svec_block(k, coeffs[name])
    c = np.zeros(ops.total)
    if problem.objective is not None:
        for k, name in enumerate(names):
            if name in problem.objective:
                lo, hi = ops.offsets[k], ops.offsets[k + 1]
                c[lo:hi] = ops.svec_block(k, problem.objective[name])
    return names, dims, ops, A, b, c


# ---------------------------------------------------------------------------
# independent verification of solver claims


def _verify_feasible(A, b, ops, xs, obj=None):
    """Audit a primal candidate: PSD blocks and equality residuals."""
    mats = ops.unpack(xs)
    margin = min((linalg.psd_margin(M) for M in mats), default=0.0)
    if b.size:
        rel = float(np.max(np.abs(A @ xs - b))) / (1.0 + float(np.max(np.abs(b))))
    else:
        rel = 0.0
    ok = margin >= -PSD_TOL and rel <= FEAS_TOL
    info = {"primal_psd_margin": float(margin), "equality_residual": rel}
    if obj is not None:
        info["objective"] = float(obj @ xs)
    return ok, mats, info


def _verify_farkas(A, b, ops, y):
    """Audit an infeasibility certificate: -A*(y) PSD and b.y > 0."""
    gap = float(b @ y)
    if not np.isfinite(gap) or gap <= 0.0:
        return False, {}
    yn = y / gap
    slack = ops.unpack(-(A.T @ yn))
    margin = min((linalg.psd_margin(M) for M in slack), default=0.0)
    ok = margin >= -PSD_TOL
    return ok, {"farkas_gap": 1.0, "farkas_slack_margin": float(margin)}


# ---------------------------------------------------------------------------
# homogeneous self-dual interior-point core


def _eigh_pd(M: np.ndarray):
    """Eigendecomposition that insists on strict positive definiteness."""
    w, Q = np.linalg.eigh(M)
    if w[0] <= 0.0:
        raise np.linalg.LinAlgError("iterate left the interior of the cone")
    return w, Q


def _max_step(Xs, dXs, Xinvhalfs) -> float:
    """Largest alpha with X + alpha dX staying PSD, per block, capped at 1."""
    alpha = 1.0
    for dX, R in zip(dXs, Xinvhalfs):
        lam = float(np.linalg.eigvalsh(R @ dX @ R)[0])
        if lam < 0:
            alpha = min(alpha, -1.0 / lam)
    return alpha


def _lyap_solve(vw, vq, R):
    """Solve V G + G V = 2 R in the eigenbasis (vw, vq) of V."""
    Rt = vq.T @ R @ vq
    G = 2.0 * Rt / (vw[:, None] + vw[None, :])
    return vq @ G @ vq.T


def solve(problem: SdpProblem, opts: Optional[dict] = None) -> SdpResult:
    """Solve a block SDP, returning only audited verdicts.

    ``opts`` may override ``max_iters`` (default 200) and ``gap_tol``
    (default 1e-9).  Numerical breakdown is reported as "inconclusive" with
    diagnostics; it never raises.
    """
    opts = dict(opts or {})
    max_iters = int(opts.get("max_iters", 200))
    gap_tol = float(opts.get("gap_tol", 1e-9))

    names, dims, ops, A, b, c = _compile(problem)
    m, N = A.shape
    has_obj = bool(np.any(c))
    if m == 0:
        # No equalities: the zero matrix is feasible and objective-minimal
        # over the cone whenever the objective is PSD; callers never hit this.
        mats = [np.zeros((n, n)) for n in dims]
        return SdpResult(FEASIBLE, dict(zip(names, mats)), np.zeros(0), {"iterations": 0.0})

    x = ops.identity_vec()
    s = x.copy()
    y = np.zeros(m)
    tau, kappa = 1.0, 1.0
    nu = sum(dims) + 1
    mu0 = (float(x @ s) + tau * kappa) / nu

    def attempt_classify(diag, endgame):
        # Primal candidate: requires tau bounded away from zero and, when an
        # objective is present, a closed duality gap.  Before the endgame
        # only high-precision candidates are accepted, so that boundary
        # solutions keep polishing instead of exiting at contract tolerance.
        feas_tol = FEAS_TOL if endgame else 1e-2 * FEAS_TOL
        psd_tol = PSD_TOL if endgame else 1e-1 * PSD_TOL
        if tau > 1e-9:
            if not has_obj or (x @ s) / (tau * tau) <= 1e-8 * (1.0 + abs(c @ x) / tau):
                ok, mats, info = _verify_feasible(
                    A, b, ops, x / tau, obj=c if has_obj else None
                )
                certified = (
                    info["primal_psd_margin"] >= -psd_tol
                    and info["equality_residual"] <= feas_tol
                )
                if ok and certified:
                    return SdpResult(
                        FEASIBLE,
                        dict(zip(names, mats)),
                        y / tau,
                        {**diag, **info},
                    )
        ok, info = _verify_farkas(A, b, ops, y)
        if ok:
            return SdpResult(INFEASIBLE, None, y.copy(), {**diag, **info})
        return None

    result = None
    reason = "iteration limit reached"
    it = 0
    try:
        for it in range(1, max_iters + 1):
            mu = (float(x @ s) + tau * kappa) / nu
            Rp = A @ x - b * tau
            Rd = -(A.T @ y) + c * tau - s
            Rg = float(b @ y - c @ x - kappa)
            diag = {
                "iterations": float(it - 1),
                "mu": mu,
                "tau": tau,
                "kappa": kappa,
                "primal_infeas": float(np.linalg.norm(Rp)),
                "dual_infeas": float(np.linalg.norm(Rd)),
            }

            endgame = mu <= gap_tol * mu0 or it > max_iters - 5
            if mu <= 0.5e-2 * mu0 or endgame:
                result = attempt_classify(diag, endgame)
                if result is not None:
                    break
            if mu <= gap_tol * mu0 * 1e-4:
                reason = "gap closed without a certifiable verdict"
                break

            # Nesterov-Todd scaling per block.
            Xm, Sm = ops.unpack(x), ops.unpack(s)
            W12, Wm12, Xih, vws, vqs = [], [], [], [], []
            for X, S in zip(Xm, Sm):
                wX, QX = _eigh_pd(X)
                rootX = (QX * np.sqrt(wX)) @ QX.T
                Xih.append((QX / np.sqrt(wX)) @ QX.T)
                Z = rootX @ S @ rootX
                wZ, QZ = _eigh_pd((Z + Z.T) / 2.0)
                W = rootX @ ((QZ / np.sqrt(wZ)) @ QZ.T) @ rootX
                wW, QW = _eigh_pd((W + W.T) / 2.0)
                W12.append((QW * np.sqrt(wW)) @ QW.T)
                Wm12.append((QW / np.sqrt(wW)) @ QW.T)
                V = Wm12[-1] @ X @ Wm12[-1]
                vw, vq = _eigh_pd((V + V.T) / 2.0)
                vws.append(vw)
                vqs.append(vq)

            def op_w(u):
                Ms = ops.unpack(u)
                return ops.pack(
                    [W12[k] @ W12[k] @ M @ W12[k] @ W12[k] for k, M in enumerate(Ms)]
                )

            # Schur complement M = A W A^T W, factored once per iteration.
            wc = op_w(c)
            A_rows_w = np.empty_like(A)
            for i in range(m):
                A_rows_w[i] = op_w(A[i])
            Schur = A @ A_rows_w.T
            Schur = (Schur + Schur.T) / 2.0
            jitter = 1e-14 * (1.0 + float(np.trace(Schur)) / max(m, 1))
            cho = None
            for _ in range(8):
                try:
                    cho = scipy.linalg.cho_factor(
                        Schur + jitter * np.eye(m), check_finite=False
                    )
                    break
                except scipy.linalg.LinAlgError:
                    jitter *= 100.0
            if cho is None:
                raise np.linalg.LinAlgError("Schur complement not factorable")

            bw = b - A @ wc
            dy2 = scipy.linalg.cho_solve(cho, bw + 2.0 * (A @ wc), check_finite=False)
            # dy2 solves M dy2 = b + A(WcW); bw + 2 A wc == b + A wc.
            alpha_g = float(c @ wc) + kappa / tau

            def direction(eta, rhs_blocks, rtk):
                r1 = -eta * Rp
                r2 = -eta * Rd
                r3 = -eta * Rg
                G = [
                    _lyap_solve(vws[k], vqs[k], rhs_blocks[k])
                    for k in range(len(dims))
                ]
                ghat = ops.pack([W12[k] @ G[k] @ W12[k] for k in range(len(dims))])
                wr2 = op_w(r2)
                rhs1 = r1 - A @ ghat - A @ wr2
                dy1 = scipy.linalg.cho_solve(cho, rhs1, check_finite=False)
                rhs3 = r3 + float(c @ ghat) + float(c @ wr2) + rtk / tau
                denom = float(bw @ dy2) + alpha_g
                dtau = (rhs3 - float(bw @ dy1)) / denom
                dy = dy1 + dtau * dy2
                ds = -(r2) - (A.T @ dy) + c * dtau
                dx = ghat - op_w(ds)
                dkappa = (rtk - kappa * dtau) / tau
                return dx, dy, ds, dtau, dkappa

            # Predictor (affine scaling) direction.
            aff_rhs = [-(vqs[k] * vws[k] ** 2) @ vqs[k].T for k in range(len(dims))]
            dxa, dya, dsa, dta, dka = direction(1.0, aff_rhs, -tau * kappa)

            Sih = []
            for S in Sm:
                wS, QS = _eigh_pd(S)
                Sih.append((QS / np.sqrt(wS)) @ QS.T)
            a_p = _max_step(Xm, ops.unpack(dxa), Xih)
            a_d = _max_step(Sm, ops.unpack(dsa), Sih)
            a_aff = min(a_p, a_d)
            if dta < 0:
                a_aff = min(a_aff, -tau / dta)
            if dka < 0:
                a_aff = min(a_aff, -kappa / dka)

            mu_aff = (
                float((x + a_aff * dxa) @ (s + a_aff * dsa))
                + (tau + a_aff * dta) * (kappa + a_aff * dka)
            ) / nu
            sigma = float(np.clip((max(mu_aff, 0.0) / mu) ** 3, 1e-8, 1.0 - 1e-8))

            # Corrector with Mehrotra second-order term in the scaled space.
            dXa, dSa = ops.unpack(dxa), ops.unpack(dsa)
            corr_rhs = []
            for k in range(len(dims)):
                Dx = Wm12[k] @ dXa[k] @ Wm12[k]
                Ds = W12[k] @ dSa[k] @ W12[k]
                cross = (Dx @ Ds + Ds @ Dx) / 2.0
                V2 = (vqs[k] * vws[k] ** 2) @ vqs[k].T
                corr_rhs.append(sigma * mu * np.eye(dims[k]) - V2 - cross)
            rtk = sigma * mu - tau * kappa - dta * dka
            dx, dy, ds, dt, dk = direction(1.0 - sigma, corr_rhs, rtk)

            a_p = _max_step(Xm, ops.unpack(dx), Xih)
            a_d = _max_step(Sm, ops.unpack(ds), Sih)
            alpha = min(a_p, a_d)
            if dt < 0:
                alpha = min(alpha, -tau / dt)
            if dk < 0:
                alpha = min(alpha, -kappa / dk)
            alpha *= 0.98

            x = x + alpha * dx
            s = s + alpha * ds
            y = y + alpha * dy
            tau += alpha * dt
            kappa += alpha * dk
            if tau <= 0 or kappa <= 0:
                raise np.linalg.LinAlgError("homogenizing variables collapsed")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, FloatingPointError) as exc:
        reason = f"numerical failure: {exc}"

    if result is None:
        mu = (float(x @ s) + tau * kappa) / nu
        diag = {
            "iterations": float(it),
            "mu": mu,
            "tau": tau,
            "kappa": kappa,
        }
        result = attempt_classify(diag, True)
        if result is None:
            result = SdpResult(INCONCLUSIVE, None, None, {**diag, "reason": reason})
    return result


# ---------------------------------------------------------------------------
# Hermitian embedding


def hermitian_to_real_embedding(M) -> np.ndarray:
    """Real symmetric embedding [[Re M, -Im M], [Im M, Re M]] of Hermitian M.

    The embedding doubles every eigenvalue's multiplicity and preserves the
    spectrum, so PSD-ness and minimum eigenvalues transfer exactly.
    """
    A = linalg.require_hermitian(M)
    return np.block([[A.real, -A.imag], [A.imag, A.real]])


def embedding_to_hermitian(Z) -> np.ndarray:
    """Inverse of the real embedding, averaging over the embedded symmetry.

    The average (Z + J^T Z J)/2 with J = [[0,-I],[I,0]] is the nearest
    embedded-Hermitian matrix; it preserves PSD-ness, so unembedding a PSD
    block always yields a PSD Hermitian matrix.
    """
    Z = np.asarray(Z, dtype=float)
    n2 = Z.shape[0]
    if Z.ndim != 2 or Z.shape != (n2, n2) or n2 % 2:
        raise DimMismatch(f"embedded matrix must be square even-dimensional, got {Z.shape}")
    n = n2 // 2
    P = (Z[:n, :n] + Z[n:, n:]) / 2.0
    Q = (Z[n:, :n] - Z[:n, n:]) / 2.0
    H = (P + P.T) / 2.0 + 1j * (Q - Q.T) / 2.0
    return H


def _hermitian_basis(n: int) -> Iterator[np.ndarray]:
    """Orthogonal Hermitian basis of M_n: n^2 matrices, deterministic order."""
    for p in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[p, p] = 1.0
        yield E
    for p in range(n):
        for q in range(p + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[p, q] = E[q, p] = 1.0
            yield E
            E = np.zeros((n, n), dtype=complex)
            E[p, q] = 1j
            E[q, p] = -1j
            yield E


def _embed_coeff(H: np.ndarray) -> np.ndarray:
    # tr(E(H)/2 . E(M)) == Re tr(H M) == tr(H M) for Hermitian H, M.
    return hermitian_to_real_embedding(H) / 2.0


# ---------------------------------------------------------------------------
# decomposability


def decomposability_check(P: choi.QuantumMap, opts: Optional[dict] = None) -> SdpResult:
    """Decide whether P splits as CP plus (CP composed with transposition).

    Feasible: ``primal`` holds Hermitian PSD Choi matrices ``cp_part`` and
    ``cocp_part`` with ``cp_part + PT_B(cocp_part)`` reconstructing the Choi
    matrix of P.  Infeasible: ``dual`` is a verified witness state, PSD with
    PSD partial transpose and trace one, whose overlap with the Choi matrix
    of P is negative.
    """
    C = linalg.require_hermitian(P.choi)
    D = P.din * P.dout
    basis = list(_hermitian_basis(D))
    eqs = []
    for H in basis:
        GH = linalg.partial_transpose(H, P.dims, "B")
        eqs.append(
            (
                {"cp_part": _embed_coeff(H), "cocp_part": _embed_coeff(GH)},
                float(np.real(np.trace(H @ C))),
            )
        )
    prob = SdpProblem(
        blocks=(("cp_part", 2 * D), ("cocp_part", 2 * D)),
        equalities=tuple(eqs),
    )
    res = solve(prob, opts)

    if res.status == FEASIBLE:
        C1 = embedding_to_hermitian(res.primal["cp_part"])
        C2 = embedding_to_hermitian(res.primal["cocp_part"])
        recon = C1 + linalg.partial_transpose(C2, P.dims, "B")
        scale = 1.0 + float(np.max(np.abs(C)))
        err = float(np.max(np.abs(recon - C))) / scale
        m1, m2 = linalg.psd_margin(C1), linalg.psd_margin(C2)
        if err <= FEAS_TOL and m1 >= -PSD_TOL and m2 >= -PSD_TOL:
            return SdpResult(
                FEASIBLE,
                {"cp_part": C1, "cocp_part": C2},
                None,
                {
                    **res.residuals,
                    "reconstruction_error": err,
                    "cp_margin": m1,
                    "cocp_margin": m2,
                },
            )
        return SdpResult(INCONCLUSIVE, None, None, {**res.residuals, "unembed_error": err})

    if res.status == INFEASIBLE:
        W = np.zeros((D, D), dtype=complex)
        for yi, H in zip(res.dual, basis):
            W += yi * H
        V = -W
        t = float(np.real(np.trace(V)))
        if t <= 0.0:
            return SdpResult(INCONCLUSIVE, None, None, dict(res.residuals))
        V = V / t
        overlap = float(np.real(np.trace(V @ C)))
        mV = linalg.psd_margin(V)
        mG = linalg.psd_margin(linalg.partial_transpose(V, P.dims, "B"))
        if mV >= -PSD_TOL and mG >= -PSD_TOL and overlap < 0.0:
            return SdpResult(
                INFEASIBLE,
                None,
                V,
                {
                    **res.residuals,
                    "witness_overlap": overlap,
                    "witness_margin": mV,
                    "witness_pt_margin": mG,
                },
            )
        return SdpResult(INCONCLUSIVE, None, None, dict(res.residuals))

    return res


# ---------------------------------------------------------------------------
# Gaussian split


def gaussian_eb_split(Y, X, opts: Optional[dict] = None) -> SdpResult:
    """Split Y = N + M with M - i*sigma >= 0 and N - i*X sigma X^T >= 0.

    Existence of such a split certifies entanglement breaking for the
    Gaussian channel with matrices (X, Y).  Feasible: ``primal`` holds the
    real symmetric parts {"M": M, "N": N}, re-audited on the complex side.
    """
    Y = np.asarray(Y, dtype=float)
    X = np.asarray(X, dtype=float)
    if Y.ndim != 2 or Y.shape[0] != Y.shape[1] or Y.shape[0] % 2:
        raise DimMismatch(f"Y must be square even-dimensional, got {Y.shape}")
    if X.shape != Y.shape:
        raise DimMismatch(f"X shape {X.shape} does not match Y shape {Y.shape}")
    scale = max(1.0, float(np.max(np.abs(Y))))
    if float(np.max(np.abs(Y - Y.T))) > 1e-10 * scale:
        raise NotHermitian("Y must be symmetric")
    n = Y.shape[0] // 2
    two_n = 2 * n
    sig = linalg.symplectic_form(n)
    xsx = X @ sig @ X.T
    K = Y - 1j * (sig + xsx)

    eqs = []
    for H in _hermitian_basis(two_n):
        coeff = _embed_coeff(H)
        eqs.append(
            (
                {"part_m": coeff, "part_n": coeff},
                float(np.real(np.trace(H @ K))),
            )
        )
    # Pin the antisymmetric (imaginary) part of the M block to -sigma.
    for p in range(two_n):
        for q in range(p + 1, two_n):
            H = np.zeros((two_n, two_n), dtype=complex)
            H[p, q] = 1j
            H[q, p] = -1j
            eqs.append(({"part_m": _embed_coeff(H)}, -2.0 * float(sig[p, q])))

    prob = SdpProblem(
        blocks=(("part_m", 2 * two_n), ("part_n", 2 * two_n)),
        equalities=tuple(eqs),
    )
    res = solve(prob, opts)

    if res.status == FEASIBLE:
        Mt = embedding_to_hermitian(res.primal["part_m"])
        M = Mt.real
        M = (M + M.T) / 2.0
        N = Y - M
        im_err = float(np.max(np.abs(Mt.imag + sig)))
        mM = linalg.psd_margin(M - 1j * sig)
        mN = linalg.psd_margin(N - 1j * xsx)
        if mM >= -PSD_TOL and mN >= -PSD_TOL and im_err <= FEAS_TOL * scale:
            return SdpResult(
                FEASIBLE,
                {"M": M, "N": N},
                None,
                {
                    **res.residuals,
                    "measured_margin": mM,
                    "remainder_margin": mN,
                },
            )
        return SdpResult(
            INCONCLUSIVE, None, None, {**res.residuals, "unembed_error": im_err}
        )
    return res


# ---------------------------------------------------------------------------
# counterexample search


def _seesaw_problem_parts(P: choi.QuantumMap):
    """Fixed blocks and equalities of the inner SDP over PPT inputs T."""
    d = P.din
    D = d * d
    basis = list(_hermitian_basis(D))
    eqs = []
    for H in basis:
        GH = linalg.partial_transpose(H, (d, d), "B")
        # tr(GH . C_T) - tr(H . G) == 0 couples G to the partial transpose.
        eqs.append(
            (
                {"choi_t": _embed_coeff(GH), "choi_t_pt": -_embed_coeff(H)},
                0.0,
            )
        )
    eqs.append(({"choi_t": _embed_coeff(np.eye(D, dtype=complex))}, float(d)))
    blocks = (("choi_t", 2 * D), ("choi_t_pt", 2 * D))
    return blocks, tuple(eqs)


def counterexample_search(P: choi.QuantumMap, opts: Optional[dict] = None) -> dict:
    """Seesaw hunt for a PPT input T making P compose T non-decomposable.

    Alternates an SDP over PPT Choi matrices C_T minimizing
    <psi| (id (x) P)(C_T) |psi> with an exact eigenvector update of psi.
    The objective is non-increasing across rounds.  On finding a negative
    value the composition P after T is handed to ``decomposability_check``
    and its verdict, with verified evidence, enters the report.  Never
    raises; solver breakdowns are reported in the trace.
    """
    opts = dict(opts or {})
    restarts = int(opts.get("restarts", 16))
    max_rounds = int(opts.get("max_rounds", 40))
    seed = int(opts.get("seed", 0))
    value_tol = float(opts.get("value_tol", -1e-6))
    improve_tol = float(opts.get("improve_tol", 1e-10))
    patience = int(opts.get("patience", 5))
    solver_opts = opts.get("solver", None)

    d, dp = P.din, P.dout
    D = d * d
    blocks, eqs = _seesaw_problem_parts(P)
    id_in = choi.identity_map(d)
    adjP = choi.adjoint(P)
    probe = choi.tensor(id_in, adjP)

    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(restarts)]
    trace: list[dict] = []
    best = {"value": np.inf, "choi_t": None, "psi": None, "restart": -1}
    sdp_failures = 0

    for r in range(restarts):
        if r == 0 and d == dp:
            psi = linalg.max_entangled_vector(d) / np.sqrt(d)
        else:
            psi = linalg.random_pure_state(d * dp, rngs[r])
        prev = np.inf
        stall = 0
        for k in range(max_rounds):
            F = choi.apply(probe, np.outer(psi, psi.conj()))
            F = (F + F.conj().T) / 2.0
            prob = SdpProblem(
                blocks=blocks,
                equalities=eqs,
                objective={"choi_t": _embed_coeff(F)},
            )
            res = solve(prob, solver_opts)
            if res.status != FEASIBLE:
                sdp_failures += 1
                trace.append(
                    {"restart": r, "round": k, "status": res.status, "value": None}
                )
                break
            CT = embedding_to_hermitian(res.primal["choi_t"])
            T = choi.QuantumMap(d, d, CT)
            comp = choi.compose(P, T).choi
            w, V = linalg.eig_hermitian(comp)
            value = float(w[0])
            psi = V[:, 0]
            trace.append(
                {
                    "restart": r,
                    "round": k,
                    "status": res.status,
                    "sdp_objective": float(res.residuals.get("objective", np.nan)),
                    "value": value,
                }
            )
            if value < best["value"]:
                best = {"value": value, "choi_t": CT, "psi": psi, "restart": r}
            if value < value_tol:
                break
            if prev - value < improve_tol:
                stall += 1
                if stall >= patience:
                    break
            else:
                stall = 0
            prev = value
        if best["value"] < value_tol:
            break

    tolerances = {
        "success_value": value_tol,
        "improve_tol": improve_tol,
        "psd_tol": PSD_TOL,
        "equality_tol": FEAS_TOL,
    }
    evidence = [
        {
            "name": "best-objective",
            "data": None if best["choi_t"] is None else float(best["value"]),
        },
        {"name": "sdp-failures", "data": sdp_failures},
    ]
    if best["choi_t"] is None:
        return {
            "op": "counterexample_search",
            "verdict": "inconclusive",
            "evidence": evidence,
            "seed": seed,
            "tolerances": tolerances,
            "trace": trace,
        }

    evidence.append({"name": "input-choi", "data": linalg.matrix_to_json(best["choi_t"])})
    evidence.append(
        {
            "name": "probe-state",
            "data": {
                "re": [float(v) for v in best["psi"].real],
                "im": [float(v) for v in best["psi"].imag],
            },
        }
    )
    # Audit the returned input map: PSD, PPT, normalized trace.
    evidence.append(
        {
            "name": "input-ppt-margins",
            "data": {
                "psd": linalg.psd_margin(best["choi_t"]),
                "pt": linalg.psd_margin(
                    linalg.partial_transpose(best["choi_t"], (d, d), "B")
                ),
                "trace_error": abs(float(np.real(np.trace(best["choi_t"]))) - d),
            },
        }
    )

    if best["value"] >= value_tol:
        verdict = "no-violation-found"
    else:
        T = choi.QuantumMap(d, d, best["choi_t"])
        dec = decomposability_check(choi.compose(P, T))
        evidence.append(
            {
                "name": "composition-decomposability",
                "data": {"status": dec.status, "residuals": dec.residuals},
            }
        )
        if dec.status == FEASIBLE:
            verdict = "composition-decomposable"
        elif dec.status == INFEASIBLE:
            verdict = "composition-not-decomposable"
            evidence.append(
                {
                    "name": "non-decomposability-witness",
                    "data": linalg.matrix_to_json(dec.dual),
                }
            )
        else:
            verdict = "decomposability-unresolved"

    return {
        "op": "counterexample_search",
        "verdict": verdict,
        "evidence": evidence,
        "seed": seed,
        "tolerances": tolerances,
        "trace": trace,
    }


# ---------------------------------------------------------------------------
# JSON round-tripping


def problem_to_json(problem: SdpProblem) -> dict:
    return {
        "blocks": [[name, dim] for name, dim in problem.blocks],
        "equalities": [
            {
                "coeffs": {name: linalg.matrix_to_json(M) for name, M in coeffs.items()},
                "rhs": rhs,
            }
            for coeffs, rhs in problem.equalities
        ],
        "objective": None
        if problem.objective is None
        else {name: linalg.matrix_to_json(M) for name, M in problem.objective.items()},
    }


def problem_from_json(obj: dict) -> SdpProblem:
    objective = obj.get("objective")
    return SdpProblem(
        blocks=tuple((name, int(dim)) for name, dim in obj["blocks"]),
        equalities=tuple(
            (
                {name: linalg.matrix_from_json(M).real for name, M in eq["coeffs"].items()},
                float(eq["rhs"]),
            )
            for eq in obj["equalities"]
        ),
        objective=None
        if objective is None
        else {name: linalg.matrix_from_json(M).real for name, M in objective.items()},
    )


def result_to_json(result: SdpResult) -> dict:
    dual = result.dual
    if dual is not None:
        dual = (
            linalg.matrix_to_json(dual)
            if np.asarray(dual).ndim == 2
            else [float(v) for v in np.asarray(dual, dtype=float)]
        )
    return {
        "status": result.status,
        "primal": None
        if result.primal is None
        else {name: linalg.matrix_to_json(M) for name, M in result.primal.items()},
        "dual": dual,
        "residuals": {k: v for k, v in result.residuals.items()},
    }
