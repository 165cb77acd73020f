"""Dense complex linear algebra core: truncated Fock spaces, states, operators.

Conventions fixed here and relied on everywhere else:

* joint index ordering is row-major over mode occupations, mode 1 slowest;
* all constructed values are immutable (arrays are marked read-only);
* truncation leakage (probability mass lost to the finite cutoff) is
  tracked on every state and never silently renormalized beyond the
  declared tolerances;
* logarithms are base 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import CutoffError, LeakageError, SpectrumError

# Default tolerances. Functions take overrides where the contract says
# "configurable"; the defaults are the package-wide policy.
TOL_NORM = 1e-10        # pure-state norm band after construction
TOL_HERM = 1e-10        # Hermiticity, relative to Frobenius norm
TOL_TRACE = 1e-10       # trace band for normalized density matrices
TOL_EIG = 1e-8          # eigenvalue clipping band (absolute, unit trace)
TOL_TRUNC = 1e-10       # acceptable truncation deficit for state factories
TOL_RANK = 1e-12        # rank threshold for the alpha=0 Renyi entropy
LOG2 = math.log(2.0)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FockSpec:
    """Truncated multi-mode Fock space: per-mode cutoffs d_i (basis 0..d_i-1)."""

    cutoffs: tuple[int, ...]

    def __post_init__(self):
        cutoffs = tuple(int(d) for d in self.cutoffs)
        if not cutoffs or any(d < 1 for d in cutoffs):
            raise ValueError(f"cutoffs must be positive integers, got {self.cutoffs}")
        object.__setattr__(self, "cutoffs", cutoffs)

    @property
    def modes(self) -> int:
        return len(self.cutoffs)

    @property
    def dim(self) -> int:
        return int(np.prod(self.cutoffs))

    def index(self, occupation) -> int:
        """Joint index of an occupation tuple (mode 1 slowest)."""
        occ = tuple(int(n) for n in occupation)
        if len(occ) != self.modes:
            raise ValueError(f"expected {self.modes} occupation numbers, got {len(occ)}")
        for k, (n, d) in enumerate(zip(occ, self.cutoffs)):
            if not 0 <= n < d:
                raise ValueError(f"occupation {n} of mode {k} outside cutoff {d}")
        return int(np.ravel_multi_index(occ, self.cutoffs))

    def occupation(self, index: int) -> tuple[int, ...]:
        return tuple(int(x) for x in np.unravel_index(index, self.cutoffs))

    def concat(self, other: "FockSpec") -> "FockSpec":
        return FockSpec(self.cutoffs + other.cutoffs)


def single_mode(d: int) -> FockSpec:
    return FockSpec((d,))


@dataclass(frozen=True)
class PureState:
    """Complex amplitude vector on a FockSpec, unit norm to TOL_NORM."""

    spec: FockSpec
    amplitudes: np.ndarray
    leakage: float = 0.0

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=np.complex128)
        if amp.shape != (self.spec.dim,):
            raise ValueError(f"amplitude vector has shape {amp.shape}, expected ({self.spec.dim},)")
        norm = float(np.linalg.norm(amp))
        if abs(norm - 1.0) > TOL_NORM:
            raise ValueError(f"state norm {norm!r} outside [1-{TOL_NORM}, 1+{TOL_NORM}]")
        object.__setattr__(self, "amplitudes", _readonly(amp))
        object.__setattr__(self, "leakage", float(self.leakage))

    def to_density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.spec, np.outer(self.amplitudes, self.amplitudes.conj()),
                             leakage=self.leakage)

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian PSD matrix on a FockSpec with tracked truncation leakage.

    Trace must sit in [1 - TOL_TRACE, 1 + TOL_TRACE] unless a nonzero
    ``leakage`` declares the state sub-normalized; the matrix is then
    expected to carry trace ~ 1 - leakage. Full positivity is enforced at
    the spectrum gate (:func:`hermitian_spectrum`); construction checks the
    cheap necessary condition that the diagonal is >= -TOL_EIG.
    """

    spec: FockSpec
    matrix: np.ndarray
    leakage: float = 0.0

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.complex128)
        d = self.spec.dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix has shape {mat.shape}, expected ({d}, {d})")
        fro = float(np.linalg.norm(mat))
        herm_defect = float(np.linalg.norm(mat - mat.conj().T))
        if herm_defect > TOL_HERM * max(1.0, fro):
            raise ValueError(f"matrix not Hermitian: defect {herm_defect:g}")
        tr = complex(np.trace(mat))
        leak = float(self.leakage)
        if abs(tr.imag) > TOL_HERM * max(1.0, fro):
            raise ValueError(f"trace has imaginary part {tr.imag:g}")
        # renormalization within the declared leakage is allowed, so the
        # trace may sit anywhere in [1 - leakage, 1] up to TOL_TRACE
        if tr.real > 1.0 + TOL_TRACE or tr.real < 1.0 - leak - TOL_TRACE:
            raise ValueError(
                f"trace {tr.real!r} outside [1 - leakage, 1] for leakage {leak!r}")
        dmin = float(np.min(mat.real[np.diag_indices(d)]))
        if dmin < -TOL_EIG:
            raise SpectrumError(f"diagonal entry {dmin:g} below -{TOL_EIG}")
        object.__setattr__(self, "matrix", _readonly(mat))
        object.__setattr__(self, "leakage", leak)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


def as_density_matrix(state) -> DensityMatrix:
    """Accept a PureState or DensityMatrix and return a DensityMatrix."""
    if isinstance(state, PureState):
        return state.to_density_matrix()
    if isinstance(state, DensityMatrix):
        return state
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")


# ---------------------------------------------------------------------------
# state factories
# ---------------------------------------------------------------------------

def fock_state(n, spec: FockSpec | int) -> PureState:
    """Number eigenstate |n_1, ..., n_N> on the given space.

    ``n`` is a single occupation or a tuple; a bare integer cutoff is
    accepted for the single-mode case.
    """
    if isinstance(spec, int):
        spec = single_mode(spec)
    occ = (n,) if isinstance(n, (int, np.integer)) else tuple(n)
    for k, (ni, di) in enumerate(zip(occ, spec.cutoffs)):
        if ni >= di:
            raise CutoffError(
                f"occupation {ni} of mode {k} requires cutoff >= {ni + 1}, got {di}",
                minimal_cutoff=ni + 1)
    amp = np.zeros(spec.dim, dtype=np.complex128)
    amp[spec.index(occ)] = 1.0
    return PureState(spec, amp)


def coherent_amplitudes(z: complex, d: int) -> np.ndarray:
    """Un-renormalized coherent amplitudes e^{-|z|^2/2} z^n / sqrt(n!)."""
    amp = np.empty(d, dtype=np.complex128)
    amp[0] = math.exp(-0.5 * abs(z) ** 2)
    for k in range(1, d):
        amp[k] = amp[k - 1] * z / math.sqrt(k)
    return amp


def minimal_coherent_cutoff(z: complex, tol: float = TOL_TRUNC, d_max: int = 4096) -> int:
    """Smallest cutoff whose coherent-state deficit is below ``tol``."""
    lam = abs(z) ** 2
    if lam == 0.0:
        return 1
    term = math.exp(-lam)
    cum = term
    n = 0
    while 1.0 - cum >= tol:
        n += 1
        if n > d_max:
            raise CutoffError(f"no adequate cutoff below {d_max} for |z|={abs(z):g}")
        term *= lam / n
        cum += term
    return n + 1


def coherent_state(z: complex, cutoff: int, tol_trunc: float = TOL_TRUNC) -> PureState:
    """Truncated coherent state |z>, renormalized only within ``tol_trunc``."""
    amp = coherent_amplitudes(z, cutoff)
    deficit = 1.0 - float(np.vdot(amp, amp).real)
    if deficit >= tol_trunc:
        need = minimal_coherent_cutoff(z, tol_trunc)
        raise CutoffError(
            f"cutoff {cutoff} leaves coherent deficit {deficit:.3g} >= {tol_trunc:g}; "
            f"minimal adequate cutoff is {need}", minimal_cutoff=need)
    amp = amp / np.linalg.norm(amp)
    return PureState(single_mode(cutoff), amp, leakage=max(deficit, 0.0))


def cat_state(z: complex, sign: int, cutoff: int, tol_trunc: float = TOL_TRUNC) -> PureState:
    """Normalized two-component cat state (|z> + sign |-z>) / sqrt(2(1 +/- e^{-2|z|^2}))."""
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if sign == -1 and z == 0:
        raise ValueError("odd cat at z=0 is the null vector")
    amp = coherent_amplitudes(z, cutoff) + sign * coherent_amplitudes(-z, cutoff)
    exact_sq = 2.0 * (1.0 + sign * math.exp(-2.0 * abs(z) ** 2))
    got_sq = float(np.vdot(amp, amp).real)
    deficit = 1.0 - got_sq / exact_sq
    if deficit >= tol_trunc:
        need = minimal_coherent_cutoff(z, tol_trunc)
        raise CutoffError(
            f"cutoff {cutoff} leaves cat-state deficit {deficit:.3g} >= {tol_trunc:g}; "
            f"try cutoff >= {need}", minimal_cutoff=need)
    amp = amp / math.sqrt(got_sq)
    return PureState(single_mode(cutoff), amp, leakage=max(deficit, 0.0))


def squeezed_vacuum(r: float, cutoff: int, tol_trunc: float = TOL_TRUNC) -> PureState:
    """Single-mode squeezed vacuum with real squeezing parameter r.

    Even amplitudes c_{2k} = (-tanh r)^k sqrt((2k)!) / (2^k k! sqrt(cosh r)).
    """
    t = math.tanh(r)
    amp = np.zeros(cutoff, dtype=np.complex128)
    c = 1.0 / math.sqrt(math.cosh(r))
    k = 0
    while 2 * k < cutoff:
        amp[2 * k] = c
        # ratio c_{2k+2}/c_{2k} = -t * sqrt((2k+1)(2k+2)) / (2(k+1))
        c *= -t * math.sqrt((2 * k + 1) * (2 * k + 2)) / (2.0 * (k + 1))
        k += 1
    deficit = 1.0 - float(np.vdot(amp, amp).real)
    if deficit >= tol_trunc:
        raise CutoffError(
            f"cutoff {cutoff} leaves squeezed-vacuum deficit {deficit:.3g} >= {tol_trunc:g}",
            minimal_cutoff=None)
    amp = amp / np.linalg.norm(amp)
    return PureState(single_mode(cutoff), amp, leakage=max(deficit, 0.0))


def thermal_state(nbar: float, cutoff: int, tol_trunc: float = TOL_TRUNC) -> DensityMatrix:
    """Thermal state with mean photon number nbar, diagonal p_n = nbar^n/(1+nbar)^{n+1}."""
    if nbar < 0:
        raise ValueError("nbar must be nonnegative")
    n = np.arange(cutoff)
    p = np.exp(n * math.log(nbar) - (n + 1) * math.log1p(nbar)) if nbar > 0 \
        else np.concatenate([[1.0], np.zeros(cutoff - 1)])
    deficit = 1.0 - float(p.sum())
    if deficit >= tol_trunc:
        raise CutoffError(
            f"cutoff {cutoff} leaves thermal deficit {deficit:.3g} >= {tol_trunc:g} "
            f"for nbar={nbar:g}", minimal_cutoff=None)
    p = p / p.sum()
    return DensityMatrix(single_mode(cutoff), np.diag(p.astype(np.complex128)))


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def annihilation_matrix(d: int) -> np.ndarray:
    """Truncated annihilation operator: a|n> = sqrt(n)|n-1>."""
    if d < 1:
        raise ValueError("cutoff must be >= 1")
    return np.diag(np.sqrt(np.arange(1, d, dtype=np.float64)), k=1).astype(np.complex128)


def number_matrix(d: int) -> np.ndarray:
    return np.diag(np.arange(d, dtype=np.float64)).astype(np.complex128)


def quadrature_matrices(d: int) -> tuple[np.ndarray, np.ndarray]:
    """(q, p) with q = (a + a^dag)/sqrt(2), p = i(a^dag - a)/sqrt(2)."""
    a = annihilation_matrix(d)
    ad = a.conj().T
    q = (a + ad) / math.sqrt(2.0)
    p = 1j * (ad - a) / math.sqrt(2.0)
    return q, p


def displacement_operator(alpha: complex, d: int, tol_trunc: float = TOL_TRUNC) -> np.ndarray:
    """exp(alpha a^dag - alpha^* a) on the truncated space.

    The cutoff must be adequate for |alpha| in the sense that the displaced
    vacuum column carries deficit < tol_trunc; the same policy as
    :func:`coherent_state`, which this operator must reproduce column zero of.
    """
    need = minimal_coherent_cutoff(alpha, tol_trunc)
    if d < need:
        raise CutoffError(
            f"cutoff {d} inadequate for displacement |alpha|={abs(alpha):g}; "
            f"minimal adequate cutoff is {need}", minimal_cutoff=need)
    a = annihilation_matrix(d)
    gen = alpha * a.conj().T - np.conj(alpha) * a
    return scipy.linalg.expm(gen)


def phase_rotation(phi: float, d: int) -> np.ndarray:
    """exp(i phi n_hat): diagonal Gaussian unitary."""
    return np.diag(np.exp(1j * phi * np.arange(d))).astype(np.complex128)


# ---------------------------------------------------------------------------
# structural operations
# ---------------------------------------------------------------------------

def tensor(a, b):
    """Kronecker product of two states of the same kind; specs concatenate."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(a.spec.concat(b.spec), np.kron(a.amplitudes, b.amplitudes),
                         leakage=1.0 - (1.0 - a.leakage) * (1.0 - b.leakage))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(a.spec.concat(b.spec), np.kron(a.matrix, b.matrix),
                             leakage=1.0 - (1.0 - a.leakage) * (1.0 - b.leakage))
    raise TypeError("tensor requires two PureStates or two DensityMatrices")


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out all modes not in ``keep`` (0-based mode indices, order kept)."""
    keep = tuple(int(k) for k in keep)
    n = rho.spec.modes
    if not keep:
        raise ValueError("keep set must be nonempty")
    if any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
        raise ValueError(f"invalid mode subset {keep} for {n} modes")
    dims = rho.spec.cutoffs
    arr = rho.matrix.reshape(dims + dims)
    traced = [k for k in range(n) if k not in keep]
    # contract traced row/col axis pairs one at a time (axes shift as we go)
    for count, k in enumerate(sorted(traced)):
        ax = k - count
        nleft = n - count
        arr = np.trace(arr, axis1=ax, axis2=ax + nleft)
    kept_dims = tuple(dims[k] for k in sorted(keep))
    out_dim = int(np.prod(kept_dims))
    out = arr.reshape(out_dim, out_dim)
    if sorted(keep) != list(keep):
        # reorder kept modes to the requested order
        perm = [sorted(keep).index(k) for k in keep]
        t = out.reshape(kept_dims + kept_dims)
        t = np.transpose(t, perm + [len(perm) + i for i in perm])
        out = t.reshape(out_dim, out_dim)
        kept_dims = tuple(dims[k] for k in keep)
    out = 0.5 * (out + out.conj().T)  # restore exact Hermiticity
    return DensityMatrix(FockSpec(kept_dims), out, leakage=rho.leakage)


# ---------------------------------------------------------------------------
# spectra and functionals
# ---------------------------------------------------------------------------

def hermitian_spectrum(rho: DensityMatrix, tol_eig: float = TOL_EIG):
    """Descending eigenvalues with the clipping policy applied.

    Values in [-tol_eig, 0) are set to 0 and their total recorded; a value
    below -tol_eig raises SpectrumError. Returns (eigenvalues, diagnostics).
    """
    vals = np.linalg.eigvalsh(rho.matrix)[::-1].copy()
    worst = float(vals.min())
    if worst < -tol_eig:
        raise SpectrumError(
            f"eigenvalue {worst:g} below -{tol_eig:g}: CPTP or truncation bug")
    neg = vals < 0.0
    diagnostics = {
        "clipped_count": int(neg.sum()),
        "clipped_mass": float(-vals[neg].sum()) + 0.0,
        "min_eigenvalue": worst,
    }
    vals[neg] = 0.0
    return vals, diagnostics


def renyi_entropy(rho: DensityMatrix, alpha: float, tol_eig: float = TOL_EIG) -> float:
    """Quantum Renyi entropy S_alpha in bits; alpha=1 is von Neumann.

    alpha=0 counts the rank above TOL_RANK; alpha=inf is -log2(lambda_max).
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    vals, _ = hermitian_spectrum(rho, tol_eig=tol_eig)
    return renyi_entropy_of_spectrum(vals, alpha)


def renyi_entropy_of_spectrum(vals: np.ndarray, alpha: float) -> float:
    """S_alpha of a nonnegative spectrum (not necessarily trace-1)."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    vals = np.asarray(vals, dtype=np.float64)
    pos = vals[vals > 0.0]
    if pos.size == 0:
        raise ValueError("empty spectrum")
    if alpha == 0:
        return math.log2(int(np.sum(vals > TOL_RANK)))
    if math.isinf(alpha):
        return -math.log2(float(pos.max()))
    if alpha == 1:
        return float(-np.sum(pos * np.log2(pos)))
    return math.log2(float(np.sum(pos ** alpha))) / (1.0 - alpha)


def purity(rho: DensityMatrix) -> float:
    """Tr rho^2."""
    m = rho.matrix
    return float(np.vdot(m, m).real)


def frobenius_distance(a: np.ndarray | DensityMatrix, b: np.ndarray | DensityMatrix) -> float:
    ma = a.matrix if isinstance(a, DensityMatrix) else np.asarray(a)
    mb = b.matrix if isinstance(b, DensityMatrix) else np.asarray(b)
    return float(np.linalg.norm(ma - mb))


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity F in [0, 1] (F, not F^2).

    Pure/pure and pure/mixed pairs short-circuit to overlap formulas; the
    general case goes through sqrt(rho) and an eigendecomposition.
    """
    if isinstance(rho, PureState) and isinstance(sigma, PureState):
        return float(min(1.0, abs(rho.overlap(sigma))))
    if isinstance(rho, PureState) or isinstance(sigma, PureState):
        psi, mixed = (rho, sigma) if isinstance(rho, PureState) else (sigma, rho)
        mixed = as_density_matrix(mixed)
        val = float(np.vdot(psi.amplitudes, mixed.matrix @ psi.amplitudes).real)
        return math.sqrt(min(1.0, max(0.0, val)))
    rho = as_density_matrix(rho)
    sigma = as_density_matrix(sigma)
    vals, vecs = np.linalg.eigh(rho.matrix)
    vals = np.clip(vals, 0.0, None)
    sqrt_rho = (vecs * np.sqrt(vals)) @ vecs.conj().T
    inner = sqrt_rho @ sigma.matrix @ sqrt_rho
    ev = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(min(1.0, np.sum(np.sqrt(ev))))


def mean_photon_number(state) -> float:
    """Expectation of the total number operator."""
    rho = as_density_matrix(state)
    dims = rho.spec.cutoffs
    diag = rho.matrix.real[np.diag_indices(rho.spec.dim)].reshape(dims)
    total = 0.0
    for axis, d in enumerate(dims):
        ns = np.arange(d, dtype=np.float64)
        shape = [1] * len(dims)
        shape[axis] = d
        total += float(np.sum(diag * ns.reshape(shape)))
    return total


def check_leakage(state, tol: float = TOL_TRUNC, context: str = "") -> None:
    """Raise LeakageError when tracked leakage exceeds ``tol``."""
    if state.leakage > tol:
        where = f" in {context}" if context else ""
        raise LeakageError(
            f"truncation leakage {state.leakage:.3g} exceeds {tol:g}{where}")
