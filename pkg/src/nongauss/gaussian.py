"""Phase-space formalism: symplectic algebra and Gaussian maps on moments.

Quadrature ordering is (q_1, p_1, ..., q_N, p_N) with q = (a + a^dag)/sqrt(2),
so the vacuum covariance is I/2 and the uncertainty relation reads
V + i Omega / 2 >= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import CutoffError
from .lincore import (
    TOL_TRUNC,
    as_density_matrix,
    check_leakage,
    minimal_coherent_cutoff,
    quadrature_matrices,
)

TOL_SYM = 1e-9    # symplectic-condition tolerance
TOL_UNC = 1e-8    # uncertainty / complete-positivity tolerance
TOL_COV_SYM = 1e-10


def omega(n_modes: int) -> np.ndarray:
    """Symplectic form: direct sum of [[0, 1], [-1, 0]] blocks."""
    w = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return scipy.linalg.block_diag(*([w] * n_modes))


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(np.asarray(a, dtype=np.float64))
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GaussianMoments:
    """First and second moments (mean vector, covariance matrix)."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        cov = np.asarray(self.cov, dtype=np.float64)
        n2 = mean.size
        if n2 % 2 or cov.shape != (n2, n2):
            raise ValueError(f"inconsistent moment shapes {mean.shape}, {cov.shape}")
        if np.abs(cov - cov.T).max() > TOL_COV_SYM:
            raise ValueError("covariance matrix not symmetric")
        w = omega(n2 // 2)
        h = cov + 0.5j * w
        lam = float(np.linalg.eigvalsh(0.5 * (h + h.conj().T)).min())
        if lam < -TOL_UNC:
            raise ValueError(f"uncertainty relation violated: min eig {lam:g}")
        object.__setattr__(self, "mean", _readonly(mean))
        object.__setattr__(self, "cov", _readonly(cov))

    @property
    def modes(self) -> int:
        return self.mean.size // 2


@dataclass(frozen=True)
class SymplecticMap:
    """Affine Gaussian-unitary action on moments: x -> S x + d, V -> S V S^T."""

    s: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=np.float64)
        d = np.asarray(self.d, dtype=np.float64).reshape(-1)
        if s.shape != (d.size, d.size):
            raise ValueError(f"shape mismatch: S {s.shape}, d {d.shape}")
        w = omega(d.size // 2)
        if np.abs(s @ w @ s.T - w).max() > TOL_SYM:
            raise ValueError("matrix is not symplectic")
        object.__setattr__(self, "s", _readonly(s))
        object.__setattr__(self, "d", _readonly(d))


@dataclass(frozen=True)
class GaussianChannelParams:
    """Gaussian channel on moments: x -> T x + d, V -> T V T^T + N."""

    t: np.ndarray
    d: np.ndarray
    nmat: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.float64)
        d = np.asarray(self.d, dtype=np.float64).reshape(-1)
        nmat = np.asarray(self.nmat, dtype=np.float64)
        if t.shape != (d.size, d.size) or nmat.shape != t.shape:
            raise ValueError("shape mismatch among (T, d, N)")
        if np.abs(nmat - nmat.T).max() > TOL_COV_SYM:
            raise ValueError("noise matrix not symmetric")
        w = omega(d.size // 2)
        h = nmat + 0.5j * w - 0.5j * (t @ w @ t.T)
        lam = float(np.linalg.eigvalsh(0.5 * (h + h.conj().T)).min())
        if lam < -TOL_UNC:
            raise ValueError(f"complete positivity violated: min eig {lam:g}")
        object.__setattr__(self, "t", _readonly(t))
        object.__setattr__(self, "d", _readonly(d))
        object.__setattr__(self, "nmat", _readonly(nmat))


# ---------------------------------------------------------------------------
# moments from Fock-space states
# ---------------------------------------------------------------------------

def _lifted_quadratures(cutoffs):
    """Per-mode q and p matrices lifted to the joint space, ordered q1,p1,..."""
    mats = []
    eyes = [np.eye(d, dtype=np.complex128) for d in cutoffs]
    for k, d in enumerate(cutoffs):
        q, p = quadrature_matrices(d)
        for op in (q, p):
            lifted = np.array([[1.0 + 0.0j]])
            for j, _ in enumerate(cutoffs):
                lifted = np.kron(lifted, op if j == k else eyes[j])
            mats.append(lifted)
    return mats


def mean_vector(state, tol_trunc: float = TOL_TRUNC) -> np.ndarray:
    """Quadrature means (q_1, p_1, ...); gated on tracked leakage."""
    rho = as_density_matrix(state)
    check_leakage(rho, tol_trunc, context="mean_vector")
    mats = _lifted_quadratures(rho.spec.cutoffs)
    return np.array([float(np.trace(rho.matrix @ x).real) for x in mats])


def moments_from_state(state, tol_trunc: float = TOL_TRUNC) -> GaussianMoments:
    """Mean vector and symmetrized covariance of a truncated Fock-space state.

    Moments of a badly truncated state are meaningless, so tracked leakage
    above tol_trunc is an error rather than a warning.
    """
    rho = as_density_matrix(state)
    check_leakage(rho, tol_trunc, context="moments_from_state")
    mats = _lifted_quadratures(rho.spec.cutoffs)
    n2 = len(mats)
    mean = np.array([float(np.trace(rho.matrix @ x).real) for x in mats])
    cov = np.zeros((n2, n2))
    centered = [x - m * np.eye(x.shape[0]) for x, m in zip(mats, mean)]
    for i in range(n2):
        rho_xi = rho.matrix @ centered[i]
        for j in range(i, n2):
            val = 0.5 * float(np.trace(rho_xi @ centered[j]
                                       + rho.matrix @ centered[j] @ centered[i]).real)
            cov[i, j] = cov[j, i] = val
    return GaussianMoments(mean, cov)


# ---------------------------------------------------------------------------
# symplectic actions
# ---------------------------------------------------------------------------

def apply_symplectic(m: GaussianMoments, g: SymplecticMap) -> GaussianMoments:
    if g.d.size != m.mean.size:
        raise ValueError(f"dimension mismatch: map {g.d.size}, moments {m.mean.size}")
    return GaussianMoments(g.s @ m.mean + g.d, g.s @ m.cov @ g.s.T)


def beamsplitter_symplectic(theta: float, n_modes: int) -> SymplecticMap:
    """Moment-level 50:50-style splitter pairing (A_i, B_i): 4N x 4N."""
    c, s = math.cos(theta), math.sin(theta)
    eye = np.eye(2 * n_modes)
    top = np.hstack([c * eye, s * eye])
    bot = np.hstack([-s * eye, c * eye])
    return SymplecticMap(np.vstack([top, bot]), np.zeros(4 * n_modes))


def tensor_moments(a: GaussianMoments, b: GaussianMoments) -> GaussianMoments:
    mean = np.concatenate([a.mean, b.mean])
    cov = scipy.linalg.block_diag(a.cov, b.cov)
    return GaussianMoments(mean, cov)


# ---------------------------------------------------------------------------
# characteristic functions
# ---------------------------------------------------------------------------

def characteristic_function(state, xi, tol_trunc: float = TOL_TRUNC) -> complex:
    """Tr(rho D(xi)) with D(xi) = exp(i x^T Omega xi).

    The single-mode link to the complex-displacement form is
    alpha = (xi_1 + i xi_2)/sqrt(2). The cutoff must be adequate for the
    displacement magnitude under the usual truncation policy.
    """
    rho = as_density_matrix(state)
    check_leakage(rho, tol_trunc, context="characteristic_function")
    xi = np.asarray(xi, dtype=np.float64).reshape(-1)
    if xi.size != 2 * rho.spec.modes:
        raise ValueError(f"xi must have length {2 * rho.spec.modes}")
    for k, d in enumerate(rho.spec.cutoffs):
        alpha = (xi[2 * k] + 1j * xi[2 * k + 1]) / math.sqrt(2.0)
        need = minimal_coherent_cutoff(alpha, tol_trunc)
        if d < need:
            raise CutoffError(
                f"cutoff {d} of mode {k} inadequate for |xi| displacement; "
                f"minimal adequate cutoff is {need}", minimal_cutoff=need)
    mats = _lifted_quadratures(rho.spec.cutoffs)
    w = omega(rho.spec.modes)
    coeff = w @ xi
    gen = sum(c * x for c, x in zip(coeff, mats))
    disp = scipy.linalg.expm(1j * gen)
    return complex(np.trace(rho.matrix @ disp))


def gaussian_char_fn(m: GaussianMoments, xi) -> complex:
    """Closed-form Gaussian characteristic function of the given moments."""
    xi = np.asarray(xi, dtype=np.float64).reshape(-1)
    w = omega(m.modes)
    quad = float(xi @ (w @ m.cov @ w.T) @ xi)
    phase = float((w @ m.mean) @ xi)
    return complex(math.exp(-0.5 * quad)) * complex(math.cos(phase), -math.sin(phase))


# ---------------------------------------------------------------------------
# Gaussian channels on moments and the splitter commutation witnesses
# ---------------------------------------------------------------------------

def gaussian_channel_on_moments(m: GaussianMoments, p: GaussianChannelParams) -> GaussianMoments:
    if p.d.size != m.mean.size:
        raise ValueError("dimension mismatch between channel and moments")
    return GaussianMoments(p.t @ m.mean + p.d, p.t @ m.cov @ p.t.T + p.nmat)


def commutation_witness_unitary(g: SymplecticMap) -> tuple[SymplecticMap, SymplecticMap]:
    """Per-arm Gaussian unitaries commuting a same-on-both-arms unitary
    through the 50:50 splitter: (S, sqrt(2) d) on the sum arm, (S, 0) on
    the difference arm.
    """
    return SymplecticMap(g.s, math.sqrt(2.0) * g.d), SymplecticMap(g.s, np.zeros_like(g.d))


def commutation_witness_channel(p: GaussianChannelParams) -> tuple[GaussianChannelParams, GaussianChannelParams]:
    """Channel version of the splitter commutation: (T, sqrt(2) d, N), (T, 0, N)."""
    return (GaussianChannelParams(p.t, math.sqrt(2.0) * p.d, p.nmat),
            GaussianChannelParams(p.t, np.zeros_like(p.d), p.nmat))


def apply_channels_to_joint(m: GaussianMoments,
                            p1: GaussianChannelParams,
                            p2: GaussianChannelParams) -> GaussianMoments:
    """Apply channel p1 to the A half and p2 to the B half of joint moments."""
    n2 = p1.d.size
    if m.mean.size != 2 * n2 or p2.d.size != n2:
        raise ValueError("joint moments must split into two equal halves")
    t = scipy.linalg.block_diag(p1.t, p2.t)
    d = np.concatenate([p1.d, p2.d])
    nmat = scipy.linalg.block_diag(p1.nmat, p2.nmat)
    return GaussianMoments(t @ m.mean + d, t @ m.cov @ t.T + nmat)
