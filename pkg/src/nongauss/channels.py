"""Bosonic noise channels: loss, dephasing, random displacement, noisy splitter.

Loss and dephasing have exact closed forms at finite cutoff; the random
displacement channel and the noisy beam splitter are Gaussian-weighted
unitary mixtures discretized with Gauss-Hermite quadrature. The default
quadrature order is DEFAULT_QUAD_ORDER with a doubling self-check
available via :func:`quadrature_convergence_delta`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lincore import (
    DensityMatrix,
    annihilation_matrix,
    as_density_matrix,
    displacement_operator,
)
from . import conv

DEFAULT_QUAD_ORDER = 21


def _gh_nodes(order: int):
    """Gauss-Hermite nodes/weights for averaging f against N(0, 1)."""
    x, w = np.polynomial.hermite.hermgauss(order)
    return x * math.sqrt(2.0), w / math.sqrt(math.pi)


def loss_kraus(gamma: float, d: int) -> list[np.ndarray]:
    """Kraus set K_k = sqrt(gamma^k / k!) (1-gamma)^{n/2} a^k, k = 0..d-1.

    Exactly trace preserving at finite cutoff: the completeness sum
    telescopes to the binomial theorem for every Fock level below d.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"loss rate must be in [0, 1], got {gamma}")
    a = annihilation_matrix(d)
    n = np.arange(d, dtype=np.float64)
    damp = np.diag((1.0 - gamma) ** (n / 2.0)) if gamma < 1.0 else np.diag(
        np.concatenate([[1.0], np.zeros(d - 1)]))
    ops = []
    ak = np.eye(d, dtype=np.complex128)
    coeff = 1.0
    for k in range(d):
        if k > 0:
            ak = ak @ a
            coeff *= gamma / k
        ops.append(math.sqrt(coeff) * (damp @ ak))
    return ops


@dataclass(frozen=True)
class BosonicChannel:
    """Single- or two-mode CPTP map applied per target mode.

    kind is one of 'identity', 'loss', 'dephasing', 'displacement-noise',
    'noisy-bs' (two-mode), 'compose'. Channels are immutable descriptors;
    apply() is a pure function.
    """

    kind: str
    params: dict = field(default_factory=dict)
    parts: tuple = ()

    def apply(self, state, modes=None) -> DensityMatrix:
        rho = as_density_matrix(state)
        if modes is None:
            modes = tuple(range(rho.spec.modes))
        elif isinstance(modes, int):
            modes = (modes,)
        if self.kind == "identity":
            return rho
        if self.kind == "compose":
            for part in self.parts:
                rho = part.apply(rho, modes)
            return rho
        if self.kind == "noisy-bs":
            return _apply_noisy_bs(rho, modes, **self.params)
        out = rho
        for m in modes:
            out = _apply_single_mode(out, m, self.kind, self.params)
        return out


def _apply_single_mode(rho: DensityMatrix, mode: int, kind: str, params: dict) -> DensityMatrix:
    dims = rho.spec.cutoffs
    d = dims[mode]
    if kind == "loss":
        ops = loss_kraus(params["gamma"], d)
        mat = _kraus_on_mode(rho.matrix, dims, mode, ops)
    elif kind == "dephasing":
        sig2 = params["sigma_sq"]
        n = np.arange(d, dtype=np.float64)
        damp = np.exp(-0.5 * sig2 * np.subtract.outer(n, n) ** 2)
        mat = _elementwise_on_mode(rho.matrix, dims, mode, damp)
    elif kind == "displacement-noise":
        sig2, order = params["sigma_sq"], params["order"]
        if sig2 == 0.0:
            return rho
        x, w = _gh_nodes(order)
        sigma = math.sqrt(sig2)
        ops = []
        for i, xi in enumerate(x):
            for j, xj in enumerate(x):
                alpha = sigma * (xi + 1j * xj)
                ops.append(math.sqrt(w[i] * w[j])
                           * displacement_operator(alpha, d, tol_trunc=1.0))
        mat = _kraus_on_mode(rho.matrix, dims, mode, ops)
    else:
        raise ValueError(f"unknown channel kind {kind!r}")
    mat = 0.5 * (mat + mat.conj().T)
    return DensityMatrix(rho.spec, mat, leakage=rho.leakage)


def _kraus_on_mode(mat: np.ndarray, dims, mode: int, ops) -> np.ndarray:
    """sum_k (I (x) K_k (x) I) rho (...)^dag applied on one tensor factor."""
    n = len(dims)
    t = mat.reshape(dims + dims)
    t = np.moveaxis(t, (mode, n + mode), (0, 1))
    moved_shape = t.shape
    d = dims[mode]
    flat = np.ascontiguousarray(t).reshape(d, d, -1)
    out = np.zeros_like(flat)
    for k in ops:
        out += np.einsum("ab,bcx,dc->adx", k, flat, k.conj())
    t = out.reshape(moved_shape)
    t = np.moveaxis(t, (0, 1), (mode, n + mode))
    dim = int(np.prod(dims))
    return np.ascontiguousarray(t).reshape(dim, dim)


def _elementwise_on_mode(mat: np.ndarray, dims, mode: int, damp: np.ndarray) -> np.ndarray:
    n = len(dims)
    t = mat.reshape(dims + dims)
    shape = [1] * (2 * n)
    shape[mode] = dims[mode]
    shape[n + mode] = dims[mode]
    t = t * damp.reshape(shape)
    dim = int(np.prod(dims))
    return t.reshape(dim, dim)


def _apply_noisy_bs(rho: DensityMatrix, modes, theta: float, sigma_sq: float,
                    order: int) -> DensityMatrix:
    """Random-angle splitter U_{theta+phi}, phi ~ N(0, sigma_sq), on a mode pair."""
    if len(modes) != 2:
        raise ValueError("noisy-bs acts on exactly two modes")
    ma, mb = modes
    dims = rho.spec.cutoffs
    if dims[ma] != dims[mb]:
        raise ValueError("noisy-bs requires equal cutoffs on its mode pair")
    if sigma_sq == 0.0:
        angles, weights = [theta], [1.0]
    else:
        x, w = _gh_nodes(order)
        angles, weights = theta + math.sqrt(sigma_sq) * x, w
    n = len(dims)
    t = rho.matrix.reshape(dims + dims)
    t = np.moveaxis(t, (ma, mb, n + ma, n + mb), (0, 1, 2, 3))
    moved_shape = t.shape
    d = dims[ma]
    flat = np.ascontiguousarray(t).reshape(d * d, d * d, -1)
    rest = flat.shape[2]
    out = np.zeros_like(flat)
    for ang, wgt in zip(angles, weights):
        bs = conv.beamsplitter_unitary(float(ang), d, d)
        left = bs.apply_columns(flat.reshape(d * d, d * d * rest))
        swapped = np.ascontiguousarray(
            left.reshape(d * d, d * d, rest).transpose(1, 0, 2)).reshape(d * d, -1)
        both = bs.apply_columns(swapped.conj()).conj()
        out += wgt * both.reshape(d * d, d * d, rest).transpose(1, 0, 2)
    t = out.reshape(moved_shape)
    t = np.moveaxis(t, (0, 1, 2, 3), (ma, mb, n + ma, n + mb))
    dim = int(np.prod(dims))
    mat = np.ascontiguousarray(t).reshape(dim, dim)
    mat = 0.5 * (mat + mat.conj().T)
    return DensityMatrix(rho.spec, mat, leakage=rho.leakage)


# ---------------------------------------------------------------------------
# public constructors
# ---------------------------------------------------------------------------

def identity_channel() -> BosonicChannel:
    return BosonicChannel("identity")


def loss_channel(gamma: float) -> BosonicChannel:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"loss rate must be in [0, 1], got {gamma}")
    if gamma == 0.0:
        return identity_channel()
    return BosonicChannel("loss", {"gamma": float(gamma)})


def dephasing_channel(sigma_p_sq: float) -> BosonicChannel:
    if sigma_p_sq < 0.0:
        raise ValueError("dephasing variance must be >= 0")
    if sigma_p_sq == 0.0:
        return identity_channel()
    return BosonicChannel("dephasing", {"sigma_sq": float(sigma_p_sq)})


def displacement_noise_channel(sigma_d_sq: float, order: int = DEFAULT_QUAD_ORDER) -> BosonicChannel:
    """Gaussian random-displacement channel, quadrature order Q per axis.

    The weight convention puts variance sigma_d_sq on each real component
    of the complex displacement, so the vacuum maps to a thermal state
    with mean photon number 2 sigma_d_sq.
    """
    if sigma_d_sq < 0.0:
        raise ValueError("displacement variance must be >= 0")
    if order < 3:
        raise ValueError("quadrature order must be >= 3")
    if sigma_d_sq == 0.0:
        return identity_channel()
    return BosonicChannel("displacement-noise",
                          {"sigma_sq": float(sigma_d_sq), "order": int(order)})


def noisy_beamsplitter(theta: float, sigma_b_sq: float,
                       order: int = DEFAULT_QUAD_ORDER) -> BosonicChannel:
    """Two-mode random-angle splitter: U_{theta+phi} with phi ~ N(0, sigma_b_sq)."""
    if order < 3:
        raise ValueError("quadrature order must be >= 3")
    if sigma_b_sq < 0.0:
        raise ValueError("angle variance must be >= 0")
    return BosonicChannel("noisy-bs", {"theta": float(theta),
                                       "sigma_sq": float(sigma_b_sq),
                                       "order": int(order)})


def compose(parts) -> BosonicChannel:
    """Left-to-right application: compose([f, g]) applies f first, then g."""
    parts = tuple(parts)
    if not parts:
        return identity_channel()
    return BosonicChannel("compose", parts=parts)


def standard_noise(sigma_d_sq: float, sigma_p_sq: float, gamma_l: float,
                   order: int = DEFAULT_QUAD_ORDER) -> BosonicChannel:
    """Loss, then dephasing, then random displacement (the idle-mode noise)."""
    return compose([
        loss_channel(gamma_l),
        dephasing_channel(sigma_p_sq),
        displacement_noise_channel(sigma_d_sq, order),
    ])


# ---------------------------------------------------------------------------
# oracles / diagnostics
# ---------------------------------------------------------------------------

def loss_via_ancilla(state, gamma: float,
                     max_joint_dim: int = conv.DEFAULT_MAX_JOINT_DIM) -> DensityMatrix:
    """Loss as a vacuum-ancilla splitter at theta_L = arcsin(sqrt(gamma)).

    Independent of the Kraus route; retained as a cross-check oracle.
    Single-mode states only.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"loss rate must be in [0, 1], got {gamma}")
    rho = as_density_matrix(state)
    if rho.spec.modes != 1:
        raise ValueError("ancilla route implemented for single-mode states")
    theta = math.asin(math.sqrt(gamma))
    from .lincore import fock_state
    vac = fock_state(0, rho.spec.cutoffs[0]).to_density_matrix()
    cp = conv.convolved_pair(rho, vac, theta=theta, max_joint_dim=max_joint_dim)
    out = cp.marginal_a()
    return conv._maybe_retruncate(out, rho.spec.cutoffs)


def kraus_completeness_defect(gamma: float, d: int) -> float:
    ops = loss_kraus(gamma, d)
    acc = sum(k.conj().T @ k for k in ops)
    return float(np.abs(acc - np.eye(d)).max())


def quadrature_convergence_delta(channel: BosonicChannel, state) -> float:
    """Max-abs output change when the quadrature order is doubled."""
    if channel.kind == "displacement-noise":
        doubled = displacement_noise_channel(channel.params["sigma_sq"],
                                             2 * channel.params["order"])
    elif channel.kind == "noisy-bs":
        doubled = noisy_beamsplitter(channel.params["theta"],
                                     channel.params["sigma_sq"],
                                     2 * channel.params["order"])
    else:
        return 0.0
    a = channel.apply(state)
    b = doubled.apply(state)
    return float(np.abs(a.matrix - b.matrix).max())
