"""Closed-form references for Fock and cat states, independent of the simulator.

Everything here is evaluated from explicit formulas (spin-rotation blocks,
factorials, 2x2/3x3 matrix algebra); nothing calls the convolution or
channel code paths, so agreement with them is a genuine cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.linalg

ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class WignerBlock:
    """Matrix of <S_z=m | exp(i 2 theta S_y) | S_z=m'> for a single spin S.

    Rows and columns are ordered by ascending m_z = -S..S, i.e. index
    a = m_z + S in 0..2S. Built by exponentiating the spin generator,
    which stays stable far beyond where factorial closed forms overflow.
    """

    spin: Fraction
    theta: float
    matrix: np.ndarray

    def element(self, mz, mzp) -> float:
        s = self.spin
        return float(self.matrix[int(mz + s), int(mzp + s)])


@lru_cache(maxsize=256)
def _wigner_matrix(two_s: int, theta: float) -> np.ndarray:
    dim = two_s + 1
    s = two_s / 2.0
    # ladder coefficients c_m = sqrt(S(S+1) - m(m+1)) for m = -S .. S-1
    ms = -s + np.arange(two_s)
    c = np.sqrt(s * (s + 1.0) - ms * (ms + 1.0))
    # i * 2theta * S_y is real antisymmetric in the ascending-m_z basis
    gen = np.zeros((dim, dim))
    for r in range(two_s):
        gen[r + 1, r] = theta * c[r]
        gen[r, r + 1] = -theta * c[r]
    mat = scipy.linalg.expm(gen)
    defect = float(np.abs(mat @ mat.T - np.eye(dim)).max())
    if defect > ORTHO_TOL:
        raise ArithmeticError(f"spin block not orthogonal: defect {defect:g}")
    mat.setflags(write=False)
    return mat


def wigner_small_d(spin, theta: float) -> WignerBlock:
    """Rotation block for a (half-)integer spin; spin given as 2S/2-compatible."""
    spin = Fraction(spin)
    two_s = spin * 2
    if two_s.denominator != 1 or two_s < 0:
        raise ValueError(f"spin must be a nonnegative half-integer, got {spin}")
    mat = _wigner_matrix(int(two_s), float(theta))
    return WignerBlock(spin, float(theta), mat)


def balanced_column_closed_form(spin: int) -> np.ndarray:
    """The m' = 0 column of the 50:50 block from the factorial closed form.

    Entry for m_z is (-1)^{(S-m)/2} sqrt((S+m)!(S-m)!) / (2^S ((S+m)/2)! ((S-m)/2)!)
    when S+m is even, else 0. Integer spin only (m'=0 needs one).
    """
    s = int(spin)
    col = np.zeros(2 * s + 1)
    for idx in range(2 * s + 1):
        m = idx - s
        if (s + m) % 2:
            continue
        num = math.sqrt(math.factorial(s + m) * math.factorial(s - m))
        den = (2 ** s) * math.factorial((s + m) // 2) * math.factorial((s - m) // 2)
        col[idx] = ((-1) ** ((s - m) // 2)) * num / den
    return col


# ---------------------------------------------------------------------------
# Fock states
# ---------------------------------------------------------------------------

def fock_selfconv_diagonal(n: int) -> np.ndarray:
    """Probabilities over m = 0..2n of the self-convolved number state |n>.

    p(m) = m! (2n-m)! / (2^n (m/2)! (n - m/2)!)^2 for even m, else 0;
    evaluated in exact rational arithmetic before conversion to float.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    probs = np.zeros(2 * n + 1)
    for m in range(0, 2 * n + 1, 2):
        num = Fraction(math.factorial(m) * math.factorial(2 * n - m))
        den = Fraction((2 ** n) * math.factorial(m // 2) * math.factorial(n - m // 2)) ** 2
        probs[m] = float(num / den)
    return probs


def nge_fock_closed_form(n: int, alpha: float) -> float:
    """Renyi-alpha entropy (bits) of the self-convolved number state."""
    p = fock_selfconv_diagonal(n)
    p = p[p > 0.0]
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 1.0:
        return float(-np.sum(p * np.log2(p)))
    if math.isinf(alpha):
        return -math.log2(float(p.max()))
    if alpha == 0.0:
        return math.log2(p.size)
    return math.log2(float(np.sum(p ** alpha))) / (1.0 - alpha)


def ming_fock(n: int) -> float:
    """Shannon entropy (bits) of the self-convolution distribution of |n>.

    This is the single-arm entropy; the two-arm mutual-information measure
    of the simulator equals exactly twice this value for pure inputs.
    """
    return nge_fock_closed_form(n, 1.0)


def lossy_fock_weights(n: int, gamma: float) -> np.ndarray:
    """Diagonal weights of the number state |n> after loss rate gamma.

    Built from the spin-n/2 rotation block at theta_L = arcsin(sqrt(gamma)):
    weight(m) = |block[m, n]|^2 in the ascending-occupation indexing.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must be in [0, 1]")
    theta_l = math.asin(math.sqrt(gamma))
    block = wigner_small_d(Fraction(n, 2), theta_l).matrix
    return np.abs(block[:, n]) ** 2


def lossy_fock_selfconv_weights(n: int, gamma: float) -> np.ndarray:
    """Diagonal weights over 0..2n of (lossy |n>) [+] (lossy |n>)."""
    p = lossy_fock_weights(n, gamma)
    out = np.zeros(2 * n + 1)
    for ma in range(n + 1):
        if p[ma] == 0.0:
            continue
        for mb in range(n + 1):
            if p[mb] == 0.0:
                continue
            block = wigner_small_d(Fraction(ma + mb, 2), math.pi / 4.0).matrix
            out[: ma + mb + 1] += p[ma] * p[mb] * np.abs(block[:, ma]) ** 2
    return out


def lossy_fock_state(n: int, gamma: float):
    """Lossy number state as a diagonal DensityMatrix (cutoff n+1)."""
    from .lincore import DensityMatrix, FockSpec
    w = lossy_fock_weights(n, gamma)
    return DensityMatrix(FockSpec((n + 1,)), np.diag(w.astype(np.complex128)))


def lossy_fock_selfconv(n: int, gamma: float):
    """Self-convolution of the lossy number state as a diagonal DensityMatrix."""
    from .lincore import DensityMatrix, FockSpec
    w = lossy_fock_selfconv_weights(n, gamma)
    return DensityMatrix(FockSpec((2 * n + 1,)), np.diag(w.astype(np.complex128)))


def _shannon_bits(p: np.ndarray) -> float:
    p = p[p > 0.0]
    return float(-np.sum(p * np.log2(p)))


def ming_lossy_fock(n: int, gamma: float) -> float:
    """Mutual-information non-Gaussianity of the lossy number state:
    2 (H(selfconv) - H(state)) with both distributions from the spin blocks.
    """
    return 2.0 * (_shannon_bits(lossy_fock_selfconv_weights(n, gamma))
                  - _shannon_bits(lossy_fock_weights(n, gamma)))


# ---------------------------------------------------------------------------
# two-component cat states under loss
# ---------------------------------------------------------------------------

def cat_trace_factor(z: complex, sign: int) -> float:
    """Trace of the un-normalized cat projector: 1 + sign * e^{-2|z|^2}.

    The minus branch vanishes at z = 0, as the trace of a null projector
    must.
    """
    return 1.0 + sign * math.exp(-2.0 * abs(z) ** 2)


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def _cat_t1(z: complex, gamma: float) -> np.ndarray:
    az2 = abs(z) ** 2
    c = math.exp(-2.0 * gamma * az2)
    g = math.exp(-2.0 * (1.0 - gamma) * az2)
    n_plus = cat_trace_factor(z, +1)
    mix = np.array([[1.0, c], [c, 1.0]])
    gram = np.array([[1.0, g], [g, 1.0]])
    root = _psd_sqrt(mix)
    return (root @ gram @ root) / (2.0 * n_plus)


def _cat_a_and_gram(z: complex, gamma: float):
    az2 = abs(z) ** 2
    y2 = (1.0 - gamma) * az2        # |y|^2 with y = sqrt(1-gamma) z
    g1 = math.exp(-y2)
    g4 = math.exp(-4.0 * y2)
    n_p = 0.5 * (1.0 + math.exp(-2.0 * gamma * az2))
    n_m = 0.5 * (1.0 - math.exp(-2.0 * gamma * az2))
    a = 0.25 * np.array([
        [2.0 * (n_p ** 2 + n_m ** 2) * (1.0 + g4) + 4.0 * n_p * n_m * (1.0 - g4),
         2.0 * (n_p ** 2 - n_m ** 2) * g1, 0.0],
        [2.0 * (n_p ** 2 - n_m ** 2) * g1, n_p ** 2 + n_m ** 2, 0.0],
        [0.0, 0.0, 2.0 * n_p * n_m],
    ])
    gram = np.array([
        [1.0, 2.0 * g1, 0.0],
        [2.0 * g1, 2.0 * (1.0 + g4), 0.0],
        [0.0, 0.0, 2.0 * (1.0 - g4)],
    ])
    return a, gram, n_p, n_m


def _cat_t2(z: complex, gamma: float) -> np.ndarray:
    a, gram, _, _ = _cat_a_and_gram(z, gamma)
    n_plus = cat_trace_factor(z, +1)
    root = _psd_sqrt(a)
    return (root @ gram @ root) / (n_plus ** 2)


def cat_t1_spectrum(z: complex, gamma: float) -> np.ndarray:
    """Nonzero-spectrum surrogate (2x2) of the lossy even cat state."""
    return np.sort(np.linalg.eigvalsh(_cat_t1(z, gamma)))[::-1]


def cat_t2_spectrum(z: complex, gamma: float) -> np.ndarray:
    """Nonzero-spectrum surrogate (3x3) of the self-convolved lossy cat."""
    return np.sort(np.linalg.eigvalsh(_cat_t2(z, gamma)))[::-1]


def _entropy_bits_matrix(mat: np.ndarray) -> float:
    vals = np.clip(np.linalg.eigvalsh(mat), 0.0, None)
    vals = vals[vals > 0.0]
    return float(-np.sum(vals * np.log2(vals)))


def ming_lossy_cat_terms(z: complex, gamma: float) -> tuple[float, float]:
    """(entropy of the lossy cat, entropy of its self-convolution), in bits."""
    return _entropy_bits_matrix(_cat_t1(z, gamma)), _entropy_bits_matrix(_cat_t2(z, gamma))


def ming_lossy_cat(z: complex, gamma: float) -> float:
    """Mutual-information non-Gaussianity of the lossy even cat:
    2 (S(selfconv) - S(state)) from the 2x2 and 3x3 surrogate spectra.
    """
    s_state, s_conv = ming_lossy_cat_terms(z, gamma)
    return 2.0 * (s_conv - s_state)


def _cat_nu_vector(y2: float, s1: int, s2: int) -> np.ndarray:
    """Frame coefficients of one coherent-component joint vector.

    Nine components ordered row-major over the two three-element frames;
    the exponentials depend on |y|^2 only (all the inner products among
    the frame vectors are real).
    """
    e1 = math.exp(-y2)
    e2 = math.exp(-2.0 * y2)
    e4 = math.exp(-4.0 * y2)
    e5 = math.exp(-5.0 * y2)
    return 0.5 * np.array([
        e1 * (1 + s1) * (1 + s2),
        (1.0 + e4) * (1 + s1 * s2) + 2.0 * e2 * (s1 + s2),
        (1.0 - e4) * (1 - s1 * s2),
        2.0 * e2 * (1 + s1 * s2) + (1.0 + e4) * (s1 + s2),
        2.0 * (e1 + e5) * (1 + s1) * (1 + s2),
        2.0 * (e1 - e5) * (1 - s1 * s2),
        (1.0 - e4) * (s1 - s2),
        2.0 * (e1 - e5) * (s1 - s2),
        0.0,
    ])


def df_lossy_cat(z: complex, gamma: float) -> float:
    """Frobenius non-Gaussianity of the lossy even cat state, closed form.

    Assembled from (Tr T1^2)^2 + (Tr T2^2)^2 minus the frame-contracted
    cross term over the four coherent-component sign sectors.
    """
    t1 = _cat_t1(z, gamma)
    t2 = _cat_t2(z, gamma)
    a, _, n_p, n_m = _cat_a_and_gram(z, gamma)
    n_plus = cat_trace_factor(z, +1)
    y2 = (1.0 - gamma) * abs(z) ** 2
    aa = np.kron(a, a)
    cross = 0.0
    weights = {+1: n_p, -1: n_m}
    for s1 in (+1, -1):
        for s2 in (+1, -1):
            nu = _cat_nu_vector(y2, s1, s2)
            cross += weights[s1] * weights[s2] * float(nu @ aa @ nu)
    quad = (float(np.trace(t1 @ t1)) ** 2
            + float(np.trace(t2 @ t2)) ** 2
            - 2.0 * cross / (n_plus ** 6))
    return math.sqrt(max(quad, 0.0))
