"""Beam-splitter unitaries in truncated Fock space and quantum convolution.

The two-mode beam splitter conserves total photon number, so it is built
blockwise: within the sector of total number n the generator
theta * (a_A^dag a_B - a_A a_B^dag) is a real antisymmetric tridiagonal
matrix and its exponential is orthogonal. Convolutions embed their inputs
with per-mode cutoff D = d_A + d_B - 1 so that every populated sector is
complete and the beam splitter acts exactly (no truncation error beyond
the inputs' own leakage).

Mixed states travel through the splitter in low-rank form (eigenvector
ensembles); dense joint matrices are materialized only on request and are
capped by a memory guard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import MemoryGuardError
from .lincore import (
    DensityMatrix,
    FockSpec,
    PureState,
    annihilation_matrix,
    as_density_matrix,
)

DEFAULT_MAX_JOINT_DIM = 4096   # dense joint matrices capped at this dimension
RANK_EPS = 1e-14               # eigenvalue floor for low-rank ensembles


def sector_indices(d_a: int, d_b: int) -> list[np.ndarray]:
    """Joint indices (row-major, A slowest) grouped by total photon number."""
    out = []
    for n in range(d_a + d_b - 1):
        lo = max(0, n - d_b + 1)
        hi = min(n, d_a - 1)
        i = np.arange(lo, hi + 1)
        out.append(i * d_b + (n - i))
    return out


def _sector_block(theta: float, n: int, lo: int, hi: int) -> np.ndarray:
    """exp(theta * G) for the sector restriction of a_A^dag a_B - a_A a_B^dag.

    Basis ordered by A-occupation i = lo..hi (B holds n - i).
    """
    size = hi - lo + 1
    gen = np.zeros((size, size))
    for r in range(size - 1):
        i = lo + r
        c = math.sqrt((i + 1) * (n - i))
        gen[r + 1, r] = c
        gen[r, r + 1] = -c
    return scipy.linalg.expm(theta * gen)


@lru_cache(maxsize=128)
def _bs_data(theta: float, d_a: int, d_b: int):
    sectors = sector_indices(d_a, d_b)
    blocks = []
    for n, idx in enumerate(sectors):
        lo = max(0, n - d_b + 1)
        hi = min(n, d_a - 1)
        block = _sector_block(theta, n, lo, hi)
        block.setflags(write=False)
        idx.setflags(write=False)
        blocks.append(block)
    return tuple(sectors), tuple(blocks)


@dataclass(frozen=True)
class BeamSplitterOp:
    """Photon-number-conserving beam splitter on a (d_A, d_B) mode pair."""

    theta: float
    d_a: int
    d_b: int
    sectors: tuple
    blocks: tuple

    def apply_columns(self, v: np.ndarray) -> np.ndarray:
        """Apply to each column of a (d_A*d_B, batch) array."""
        out = np.empty_like(v)
        for idx, block in zip(self.sectors, self.blocks):
            out[idx, :] = block @ v[idx, :]
        return out

    def apply_vector(self, v: np.ndarray) -> np.ndarray:
        return self.apply_columns(v.reshape(-1, 1))[:, 0]

    def conjugate(self, m: np.ndarray) -> np.ndarray:
        """U m U^dag for a dense (d_A*d_B) square matrix."""
        um = self.apply_columns(m)
        return self.apply_columns(um.conj().T).conj().T

    def to_matrix(self) -> np.ndarray:
        u = np.zeros((self.d_a * self.d_b,) * 2)
        for idx, block in zip(self.sectors, self.blocks):
            u[np.ix_(idx, idx)] = block
        return u


def beamsplitter_unitary(theta: float, d_a: int, d_b: int) -> BeamSplitterOp:
    _check_sign_convention()
    sectors, blocks = _bs_data(float(theta), int(d_a), int(d_b))
    return BeamSplitterOp(float(theta), int(d_a), int(d_b), sectors, blocks)


_SIGN_OK = None


def _check_sign_convention() -> None:
    """One-time self-test pinning the mode-transformation sign convention.

    Conjugating the annihilation matrices by the 50:50 splitter must give
    a_A -> (a_A + a_B)/sqrt(2) and a_B -> (a_B - a_A)/sqrt(2) on every
    matrix element whose bra and ket live in complete sectors. A mismatch
    would silently flip interference cross terms, so it aborts.
    """
    global _SIGN_OK
    if _SIGN_OK:
        return
    _SIGN_OK = True  # set first: beamsplitter_unitary below re-enters
    d = 5
    u = beamsplitter_unitary(math.pi / 4.0, d, d).to_matrix()
    a = annihilation_matrix(d)
    eye = np.eye(d)
    a_a = np.kron(a, eye)
    a_b = np.kron(eye, a)
    totals = np.add.outer(np.arange(d), np.arange(d)).reshape(-1)
    safe = totals <= d - 1
    mask = np.outer(safe, safe)
    got_a = u.conj().T @ a_a @ u
    got_b = u.conj().T @ a_b @ u
    want_a = (a_a + a_b) / math.sqrt(2.0)
    want_b = (a_b - a_a) / math.sqrt(2.0)
    err = max(np.abs((got_a - want_a)[mask]).max(), np.abs((got_b - want_b)[mask]).max())
    if err > 1e-12:
        _SIGN_OK = None
        raise RuntimeError(f"beam-splitter sign convention self-test failed (error {err:g})")


# ---------------------------------------------------------------------------
# embedding
# ---------------------------------------------------------------------------

def embed_pure(psi: PureState, cutoffs) -> PureState:
    """Zero-pad a pure state to larger per-mode cutoffs."""
    cutoffs = tuple(int(c) for c in cutoffs)
    old = psi.spec.cutoffs
    if any(c < d for c, d in zip(cutoffs, old)):
        raise ValueError(f"target cutoffs {cutoffs} smaller than current {old}")
    amp = np.zeros(cutoffs, dtype=np.complex128)
    amp[tuple(slice(0, d) for d in old)] = psi.amplitudes.reshape(old)
    return PureState(FockSpec(cutoffs), amp.reshape(-1), leakage=psi.leakage)


def embed_dm(rho: DensityMatrix, cutoffs) -> DensityMatrix:
    cutoffs = tuple(int(c) for c in cutoffs)
    old = rho.spec.cutoffs
    if any(c < d for c, d in zip(cutoffs, old)):
        raise ValueError(f"target cutoffs {cutoffs} smaller than current {old}")
    mat = np.zeros(cutoffs + cutoffs, dtype=np.complex128)
    mat[tuple(slice(0, d) for d in old + old)] = rho.matrix.reshape(old + old)
    dim = int(np.prod(cutoffs))
    return DensityMatrix(FockSpec(cutoffs), mat.reshape(dim, dim), leakage=rho.leakage)


def _embedded_vector(vec: np.ndarray, old, new) -> np.ndarray:
    out = np.zeros(new, dtype=np.complex128)
    out[tuple(slice(0, d) for d in old)] = vec.reshape(old)
    return out.reshape(-1)


def embed_for_exact_bs(rho_a, rho_b, max_joint_dim: int = DEFAULT_MAX_JOINT_DIM) -> DensityMatrix:
    """Dense joint state rho_A (x) rho_B at the lossless-splitting cutoffs.

    Per-mode cutoff D = d_A + d_B - 1 makes every populated total-number
    sector complete, so a subsequent beam splitter is exact.
    """
    rho_a = as_density_matrix(rho_a)
    rho_b = as_density_matrix(rho_b)
    if rho_a.spec.modes != rho_b.spec.modes:
        raise ValueError("mode counts differ")
    big = tuple(da + db - 1 for da, db in zip(rho_a.spec.cutoffs, rho_b.spec.cutoffs))
    joint_dim = int(np.prod(big)) ** 2
    _guard_dense(joint_dim, max_joint_dim)
    ea = embed_dm(rho_a, big)
    eb = embed_dm(rho_b, big)
    return DensityMatrix(ea.spec.concat(eb.spec), np.kron(ea.matrix, eb.matrix),
                         leakage=1.0 - (1.0 - ea.leakage) * (1.0 - eb.leakage))


def _guard_dense(joint_dim: int, max_joint_dim: int) -> None:
    if joint_dim > max_joint_dim:
        raise MemoryGuardError(
            f"dense joint dimension {joint_dim} exceeds the guard {max_joint_dim}; "
            "raise max_joint_dim explicitly if this is intentional")


# ---------------------------------------------------------------------------
# low-rank joint representation
# ---------------------------------------------------------------------------

def state_factors(state, rank_eps: float = RANK_EPS):
    """(weights, row-stacked vectors) ensemble with weights > rank_eps."""
    if isinstance(state, PureState):
        return np.array([1.0]), state.amplitudes.reshape(1, -1)
    rho = as_density_matrix(state)
    vals, vecs = np.linalg.eigh(rho.matrix)
    keep = vals > rank_eps
    return vals[keep], np.ascontiguousarray(vecs[:, keep].T)


@dataclass(frozen=True)
class ConvolvedPair:
    """Low-rank form of U_theta (rho (x) sigma) U_theta^dag.

    ``mats[r]`` is the (dim_A, dim_B) reshaping of the r-th post-splitter
    vector; the joint state is sum_r weights[r] |w_r><w_r|.
    """

    weights: np.ndarray
    mats: np.ndarray
    spec_a: FockSpec
    spec_b: FockSpec
    leakage: float

    def marginal_a(self) -> DensityMatrix:
        r, da, db = self.mats.shape
        mw = self.mats * self.weights[:, None, None]
        left = np.moveaxis(mw, 0, 1).reshape(da, r * db)
        right = np.moveaxis(self.mats.conj(), 0, 1).reshape(da, r * db)
        out = left @ right.T
        out = 0.5 * (out + out.conj().T)
        return DensityMatrix(self.spec_a, out, leakage=self.leakage)

    def marginal_b(self) -> DensityMatrix:
        r, da, db = self.mats.shape
        mw = self.mats * self.weights[:, None, None]
        left = np.ascontiguousarray(np.moveaxis(mw, 2, 0)).reshape(db, r * da)
        right = np.ascontiguousarray(np.moveaxis(self.mats.conj(), 2, 0)).reshape(db, r * da)
        out = left @ right.T
        out = 0.5 * (out + out.conj().T)
        return DensityMatrix(self.spec_b, out, leakage=self.leakage)

    def joint_purity(self) -> float:
        """Tr of the squared joint state via the Gram matrix of the ensemble."""
        r = self.mats.shape[0]
        flat = self.mats.reshape(r, -1)
        gram = flat.conj() @ flat.T
        return float(np.real(np.einsum("r,s,rs->", self.weights, self.weights,
                                       np.abs(gram) ** 2)))

    def cross_with_product(self, x: DensityMatrix, y: DensityMatrix) -> float:
        """Tr[ rho_AB (X (x) Y) ] for operators X on A and Y on B."""
        total = 0.0
        for w, m in zip(self.weights, self.mats):
            total += w * float(np.real(np.trace(m.conj().T @ x.matrix @ m @ y.matrix.T)))
        return total

    def parity_expectation_b(self) -> float:
        """Expectation of (-1)^{sum n_B} on the kept-B marginal."""
        par = parity_diagonal(self.spec_b)
        probs = np.einsum("rab,rab->b", self.mats * self.weights[:, None, None],
                          self.mats.conj()).real
        return float(np.dot(par, probs))

    def to_dense(self, max_joint_dim: int = DEFAULT_MAX_JOINT_DIM) -> DensityMatrix:
        r, da, db = self.mats.shape
        _guard_dense(da * db, max_joint_dim)
        flat = self.mats.reshape(r, da * db)
        mat = (flat.T * self.weights) @ flat.conj()
        mat = 0.5 * (mat + mat.conj().T)
        return DensityMatrix(self.spec_a.concat(self.spec_b), mat, leakage=self.leakage)


def convolved_pair(rho, sigma, theta: float = math.pi / 4.0,
                   rank_eps: float = RANK_EPS,
                   max_joint_dim: int = DEFAULT_MAX_JOINT_DIM) -> ConvolvedPair:
    """Send rho (x) sigma through pairwise beam splitters, in low-rank form."""
    spec_r, spec_s = rho.spec, sigma.spec
    if spec_r.modes != spec_s.modes:
        raise ValueError(f"mode counts differ: {spec_r.modes} vs {spec_s.modes}")
    n_modes = spec_r.modes
    big = tuple(da + db - 1 for da, db in zip(spec_r.cutoffs, spec_s.cutoffs))
    dim_side = int(np.prod(big))
    wa, va = state_factors(rho, rank_eps)
    wb, vb = state_factors(sigma, rank_eps)
    r_total = len(wa) * len(wb)
    if r_total * dim_side * dim_side > max_joint_dim ** 2:
        raise MemoryGuardError(
            f"low-rank ensemble of {r_total} joint vectors at dimension "
            f"{dim_side ** 2} exceeds the memory guard")
    va_e = np.stack([_embedded_vector(v, spec_r.cutoffs, big) for v in va])
    vb_e = np.stack([_embedded_vector(v, spec_s.cutoffs, big) for v in vb])
    cols = np.einsum("ka,lb->abkl", va_e, vb_e).reshape(dim_side * dim_side, r_total)
    tens = cols.reshape(big + big + (r_total,))
    for k in range(n_modes):
        bs = beamsplitter_unitary(theta, big[k], big[k])
        moved = np.moveaxis(tens, (k, n_modes + k), (0, 1))
        shape = moved.shape
        flat = bs.apply_columns(np.ascontiguousarray(moved.reshape(big[k] * big[k], -1)))
        tens = np.moveaxis(flat.reshape(shape), (0, 1), (k, n_modes + k))
    mats = np.ascontiguousarray(
        np.moveaxis(tens.reshape(dim_side, dim_side, r_total), 2, 0))
    weights = np.outer(wa, wb).reshape(-1)
    leak = 1.0 - (1.0 - rho.leakage) * (1.0 - sigma.leakage)
    spec_big = FockSpec(big)
    return ConvolvedPair(weights, mats, spec_big, spec_big, leak)


def _maybe_retruncate(dm: DensityMatrix, out_cutoff) -> DensityMatrix:
    if out_cutoff is None:
        return dm
    cutoffs = (out_cutoff,) * dm.spec.modes if isinstance(out_cutoff, int) else tuple(out_cutoff)
    sl = tuple(slice(0, c) for c in cutoffs)
    t = dm.matrix.reshape(dm.spec.cutoffs + dm.spec.cutoffs)[sl + sl]
    dim = int(np.prod(cutoffs))
    mat = t.reshape(dim, dim)
    dropped = dm.trace - float(np.trace(mat).real)
    return DensityMatrix(FockSpec(cutoffs), mat, leakage=dm.leakage + dropped)


def boxplus(rho, sigma, out_cutoff=None, max_joint_dim: int = DEFAULT_MAX_JOINT_DIM) -> DensityMatrix:
    """Quantum convolution: keep arm A of the 50:50 beam splitter."""
    cp = convolved_pair(rho, sigma, max_joint_dim=max_joint_dim)
    return _maybe_retruncate(cp.marginal_a(), out_cutoff)


def boxminus(rho, sigma, out_cutoff=None, max_joint_dim: int = DEFAULT_MAX_JOINT_DIM) -> DensityMatrix:
    """Anti-convolution: keep arm B of the 50:50 beam splitter."""
    cp = convolved_pair(rho, sigma, max_joint_dim=max_joint_dim)
    return _maybe_retruncate(cp.marginal_b(), out_cutoff)


def boxplus_power(state, k: int, max_joint_dim: int = DEFAULT_MAX_JOINT_DIM) -> DensityMatrix:
    """k-fold self-convolution, defined inductively; k=0 is the input itself."""
    if k < 0:
        raise ValueError("k must be >= 0")
    acc = as_density_matrix(state)
    for _ in range(k):
        acc = boxplus(acc, state, max_joint_dim=max_joint_dim)
    return acc


def joint_convolved_state(rho, max_joint_dim: int = DEFAULT_MAX_JOINT_DIM) -> DensityMatrix:
    """Dense U_{pi/4} (rho (x) rho) U^dag; marginals equal boxplus/boxminus."""
    return convolved_pair(rho, rho, max_joint_dim=max_joint_dim).to_dense(max_joint_dim)


# ---------------------------------------------------------------------------
# parity
# ---------------------------------------------------------------------------

def parity_diagonal(spec: FockSpec) -> np.ndarray:
    """Diagonal of (-1)^{sum_i n_i} over the given space, as a +/-1 vector."""
    par = np.ones(1)
    for d in spec.cutoffs:
        par = np.kron(par, (-1.0) ** np.arange(d))
    return par


def parity_operator(spec: FockSpec) -> np.ndarray:
    """Total parity operator as a dense diagonal matrix."""
    return np.diag(parity_diagonal(spec)).astype(np.complex128)


def overlap_via_parity(rho, sigma, max_joint_dim: int = DEFAULT_MAX_JOINT_DIM) -> float:
    """Tr(rho sigma) evaluated as the parity of the anti-convolved output."""
    rho_d = as_density_matrix(rho)
    sigma_d = as_density_matrix(sigma)
    if rho_d.spec != sigma_d.spec:
        raise ValueError(f"spec mismatch: {rho_d.spec} vs {sigma_d.spec}")
    cp = convolved_pair(rho_d, sigma_d, max_joint_dim=max_joint_dim)
    return cp.parity_expectation_b()
