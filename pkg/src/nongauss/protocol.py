"""Circuit-level simulation of the parity measurement protocols.

The four-copy circuit factorizes: both splitter pairs in layer one are
identical and their discarded arms never interact again, so the staged
pipeline keeps at most one two-arm joint state alive at a time. A literal
four-mode route exists as a small-cutoff oracle for that factorization.

Noise schedule (a declared convention): the idle-mode channel is applied
once per circuit stage, i.e. after state preparation and between splitter
layers, on every mode still alive at that point. The ancilla qubit is not
simulated; its phase-flip error enters as the exact rescaling
<P> -> <P> (1 - 2 eps_p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import channels, conv, gaussian, measures
from .errors import ConfigError, MemoryGuardError
from .lincore import (
    DensityMatrix,
    FockSpec,
    PureState,
    as_density_matrix,
    cat_state,
    coherent_state,
    fock_state,
    minimal_coherent_cutoff,
    purity,
    tensor,
)


@dataclass(frozen=True)
class NoiseConfig:
    """Per-stage noise strengths for the measurement circuits.

    sigma_* fields are variances; gamma_l and eps_p are probabilities.
    """

    sigma_d_sq: float = 0.0
    sigma_p_sq: float = 0.0
    gamma_l: float = 0.0
    sigma_b_sq: float = 0.0
    eps_p: float = 0.0
    quad_order: int = channels.DEFAULT_QUAD_ORDER

    def __post_init__(self):
        if min(self.sigma_d_sq, self.sigma_p_sq, self.gamma_l,
               self.sigma_b_sq, self.eps_p) < 0.0:
            raise ValueError("noise parameters must be nonnegative")
        if self.gamma_l > 1.0 or self.eps_p > 1.0:
            raise ValueError("gamma_l and eps_p are probabilities (<= 1)")
        if self.quad_order < 3:
            raise ValueError("quadrature order must be >= 3")

    @classmethod
    def uniform(cls, eps: float, quad_order: int = channels.DEFAULT_QUAD_ORDER):
        """Weak-noise shortcut: all standard deviations and rates set to eps."""
        return cls(sigma_d_sq=eps ** 2, sigma_p_sq=eps ** 2, gamma_l=eps,
                   sigma_b_sq=eps ** 2, eps_p=eps, quad_order=quad_order)

    @property
    def is_zero(self) -> bool:
        return (self.sigma_d_sq == self.sigma_p_sq == self.gamma_l
                == self.sigma_b_sq == self.eps_p == 0.0)

    def stage_channel(self) -> channels.BosonicChannel:
        return channels.standard_noise(self.sigma_d_sq, self.sigma_p_sq,
                                       self.gamma_l, self.quad_order)


@dataclass(frozen=True)
class ShotPlan:
    """Finite sampling plan: number of +/-1 shots and the generator seed."""

    shots: int
    seed: int = 0

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")


def _bs_angles(noise: NoiseConfig):
    """Gauss-Hermite discretization of the random splitter angle."""
    if noise.sigma_b_sq == 0.0:
        return np.array([math.pi / 4.0]), np.array([1.0])
    x, w = np.polynomial.hermite.hermgauss(noise.quad_order)
    return math.pi / 4.0 + math.sqrt(2.0 * noise.sigma_b_sq) * x, w / math.sqrt(math.pi)


def _noisy_conv_marginal_a(rho, sigma, noise: NoiseConfig, max_joint_dim: int) -> DensityMatrix:
    angles, weights = _bs_angles(noise)
    acc = None
    for ang, wgt in zip(angles, weights):
        part = conv.convolved_pair(rho, sigma, theta=float(ang),
                                   max_joint_dim=max_joint_dim).marginal_a()
        acc = wgt * part.matrix if acc is None else acc + wgt * part.matrix
        spec = part.spec
        leak = part.leakage
    acc = 0.5 * (acc + acc.conj().T)
    return DensityMatrix(spec, acc, leakage=leak)


def _noisy_conv_parity_b(rho, sigma, noise: NoiseConfig, max_joint_dim: int) -> float:
    angles, weights = _bs_angles(noise)
    total = 0.0
    for ang, wgt in zip(angles, weights):
        cp = conv.convolved_pair(rho, sigma, theta=float(ang),
                                 max_joint_dim=max_joint_dim)
        total += wgt * cp.parity_expectation_b()
    return total


def run_nge21_protocol(psi: PureState, noise: NoiseConfig,
                       max_joint_dim: int = conv.DEFAULT_MAX_JOINT_DIM) -> float:
    """Expected ancilla parity of the four-copy circuit, in [-1, 1].

    Noiseless it equals the purity of the self-convolved input, i.e.
    2^{-NGE_{2,1}}.
    """
    measures._require_pure(psi, "run_nge21_protocol")
    stage = noise.stage_channel()
    rho0 = stage.apply(psi)
    rho1 = _noisy_conv_marginal_a(rho0, rho0, noise, max_joint_dim)
    rho2 = stage.apply(rho1)
    par = _noisy_conv_parity_b(rho2, rho2, noise, max_joint_dim)
    return par * (1.0 - 2.0 * noise.eps_p)


def run_zero_mean_protocol(psi: PureState, noise: NoiseConfig,
                           max_joint_dim: int = conv.DEFAULT_MAX_JOINT_DIM) -> float:
    """Expected parity of the three-copy circuit for zero-mean pure inputs.

    Noiseless it equals <psi| psi [+] psi |psi>.
    """
    measures._require_pure(psi, "run_zero_mean_protocol")
    mean = gaussian.mean_vector(psi)
    if float(np.linalg.norm(mean)) > measures.TOL_MEAN:
        raise ValueError("zero-mean protocol requires a zero-mean input state")
    stage = noise.stage_channel()
    rho0 = stage.apply(psi)            # preparation noise, all three copies
    rho1 = _noisy_conv_marginal_a(rho0, rho0, noise, max_joint_dim)
    rho1 = stage.apply(rho1)
    third = stage.apply(rho0)          # third copy idles through layer one
    par = _noisy_conv_parity_b(rho1, third, noise, max_joint_dim)
    return par * (1.0 - 2.0 * noise.eps_p)


@dataclass(frozen=True)
class DFCircuitResult:
    """Noise-free swap-test circuit expectations assembling d_F."""

    term_joint_purity: float
    term_product_purity: float
    term_cross: float
    d_f: float


def run_dF_circuits(state, max_joint_dim: int = conv.DEFAULT_MAX_JOINT_DIM) -> DFCircuitResult:
    """Expectations of the three noise-free swap-test circuits.

    The joint-purity circuit interferes two copies of the two-arm output;
    the product circuit takes single-arm purities; the cross circuit reads
    the product of two parity measurements.
    """
    rho = as_density_matrix(state)
    cp = conv.convolved_pair(rho, rho, max_joint_dim=max_joint_dim)
    rho_a = cp.marginal_a()
    rho_b = cp.marginal_b()
    t_joint = cp.joint_purity()
    t_prod = purity(rho_a) * purity(rho_b)
    t_cross = cp.cross_with_product(rho_a, rho_b)
    d_f = math.sqrt(max(t_joint + t_prod - 2.0 * t_cross, 0.0))
    return DFCircuitResult(t_joint, t_prod, t_cross, d_f)


def nge21_literal_four_mode(psi: PureState, noise: NoiseConfig, cutoff: int,
                            max_joint_dim: int = conv.DEFAULT_MAX_JOINT_DIM) -> float:
    """Brute-force four-mode route for the four-copy circuit.

    Keeps all four modes at a fixed per-mode cutoff; only meaningful when
    the cutoff holds every photon the circuit can concentrate into one
    mode (e.g. 4 n_max + 1 for photon-conserving noise).
    """
    if psi.spec.modes != 1:
        raise ConfigError("literal four-mode route takes single-mode inputs")
    if cutoff ** 2 > max_joint_dim:
        raise MemoryGuardError(
            f"four-mode cutoff {cutoff} exceeds the memory guard")
    one = conv.embed_pure(psi, (cutoff,))
    full = one
    for _ in range(3):
        full = tensor(full, one)
    rho = full.to_density_matrix()
    stage = noise.stage_channel()
    rho = stage.apply(rho)                               # prep noise, all modes
    bs = channels.noisy_beamsplitter(math.pi / 4.0, noise.sigma_b_sq, noise.quad_order)
    rho = bs.apply(rho, (0, 1))                          # layer one
    rho = bs.apply(rho, (2, 3))
    rho = stage.apply(rho, (0, 2))                       # kept arms idle
    rho = bs.apply(rho, (0, 2))                          # layer two
    par = conv.parity_diagonal(FockSpec((cutoff,)))
    diag = np.real(np.diagonal(rho.matrix)).reshape((cutoff,) * 4)
    val = float(np.einsum("abcd,c->", diag, par))
    return val * (1.0 - 2.0 * noise.eps_p)


def sample_shots(expectation: float, plan: ShotPlan) -> tuple[float, float]:
    """Draw +/-1 outcomes with the given mean; returns (estimate, stderr).

    Deterministic for a fixed seed: the seed fully determines the output.
    """
    if abs(expectation) > 1.0 + 1e-12:
        raise ValueError("expectation must lie in [-1, 1]")
    p_plus = 0.5 * (1.0 + min(1.0, max(-1.0, expectation)))
    rng = np.random.default_rng(plan.seed)
    outcomes = np.where(rng.random(plan.shots) < p_plus, 1.0, -1.0)
    est = float(outcomes.mean())
    stderr = math.sqrt(max(1.0 - est ** 2, 0.0) / plan.shots)
    return est, stderr


# ---------------------------------------------------------------------------
# parameter sweeps
# ---------------------------------------------------------------------------

VALID_MEASURES = ("nge", "ming", "dF", "parity", "zero-mean-parity")


def auto_cutoff(family: str, value, sign: int = +1) -> int:
    """Deterministic cutoff choice for a state family.

    Coherent-type families take the smallest cutoff passing the
    construction leakage gate plus three levels of headroom: quadratic
    measures bottom out at sqrt(leakage), so the bare minimum would leave
    d_F floors right at their faithfulness tolerance.
    """
    if family == "fock":
        return int(value) + 1
    if family in ("coherent", "cat"):
        d = minimal_coherent_cutoff(value)
        if family == "cat":
            for _ in range(12):
                try:
                    cat_state(value, sign, d)
                    break
                except Exception:
                    d += 1
        return d + 3
    raise ConfigError(f"unknown state family {family!r}")


def build_state(family: str, value, cutoff, sign: int = +1) -> PureState:
    d = auto_cutoff(family, value, sign) if cutoff in (None, "auto") else int(cutoff)
    if family == "fock":
        return fock_state(int(value), d)
    if family == "coherent":
        return coherent_state(value, d)
    if family == "cat":
        return cat_state(value, sign, d)
    raise ConfigError(f"unknown state family {family!r}")


def _sweep_cell(family: str, value, sign: int, measure: str, alpha: float, k: int,
                noise_kind: str, level: float, cutoff, quad_order: int,
                max_joint_dim: int) -> dict:
    psi = build_state(family, value, cutoff, sign)
    if noise_kind == "eps":
        noise = NoiseConfig.uniform(level, quad_order)
        if measure == "parity":
            val = run_nge21_protocol(psi, noise, max_joint_dim)
        elif measure == "zero-mean-parity":
            val = run_zero_mean_protocol(psi, noise, max_joint_dim)
        elif measure == "nge":
            if (alpha, k) != (2.0, 1):
                raise ConfigError("the noisy circuit measures nge with alpha=2, k=1 only")
            par = run_nge21_protocol(psi, noise, max_joint_dim)
            val = -math.log2(par) if par > 0.0 else math.inf
        else:
            raise ConfigError(f"measure {measure!r} has no circuit with eps noise; "
                              "use a loss grid")
        state_leak = psi.leakage
    elif noise_kind == "gamma":
        rho = channels.loss_channel(level).apply(psi)
        if measure == "ming":
            val = measures.ming(rho, alpha, max_joint_dim).value
        elif measure == "dF":
            val = measures.d_frobenius(rho, max_joint_dim).value
        elif measure == "nge":
            if level != 0.0:
                raise ConfigError("nge is defined for pure states; loss must be 0")
            val = measures.nge(psi, alpha, k, max_joint_dim).value
        else:
            raise ConfigError(f"measure {measure!r} incompatible with a loss grid")
        state_leak = rho.leakage
    else:
        raise ConfigError(f"unknown noise kind {noise_kind!r}")
    return {
        "state_param": value,
        "noise_param": level,
        "measure": _measure_label(measure, alpha, k),
        "value": val,
        "leakage": state_leak,
        "cutoff": psi.spec.cutoffs[0],
        "quad_order": quad_order,
    }


def _measure_label(measure: str, alpha: float, k: int) -> str:
    if measure == "nge":
        return f"nge:{alpha:g}:{k}"
    if measure == "ming":
        return f"ming:{alpha:g}"
    return measure


def sweep(family: str, state_values, measure: str, noise_levels,
          noise_kind: str = "eps", sink=None, sign: int = +1,
          alpha: float = 2.0, k: int = 1, cutoff="auto",
          quad_order: int = channels.DEFAULT_QUAD_ORDER, seed: int = 0,
          max_joint_dim: int = conv.DEFAULT_MAX_JOINT_DIM) -> list[dict]:
    """Evaluate a measure or circuit over (state grid) x (noise grid).

    Rows are produced in deterministic state-major order and passed to
    ``sink`` one at a time when given; the full table is also returned.
    """
    if measure not in VALID_MEASURES:
        raise ConfigError(f"unknown measure {measure!r}")
    rows = []
    for value in state_values:
        for level in noise_levels:
            row = _sweep_cell(family, value, sign, measure, float(alpha), int(k),
                              noise_kind, float(level), cutoff, quad_order,
                              max_joint_dim)
            row["seed"] = seed
            rows.append(row)
            if sink is not None:
                sink(row)
    return rows
