"""Scripted studies: ratio convergence tables, figure data, closed-form
cross-checks and duality-transport checks built on fock/channels/phase.

The central object is the ratio of the Pegg-Barnett density of an
amplified state (kappa = 1 + s*eps) to the Paul density of the original
state.  It converges to one when s grows first and eps shrinks second;
the order matters, and the ``nonlinear_amplification_scan`` shows the
density vanishing when the schedule is quadratic in s instead.

Ensemble statistics over Hilbert-Schmidt random qubits (``table1_run``)
and the coherent-state ratio scan (``figure1b_run``) default to the
``"riemann"`` kernel normalization, which is the convention behind the
published finite-s statistics; the exact channel composition is available
everywhere via ``normalization="channel"``.  Reported spreads are maximum
deviations from the mean, not standard deviations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import attenuator_apply, default_out_cutoff, qla_apply
from .fock import DensityMatrix, coherent_state, random_hs_density, thermal_state
from .phase import (
    PhaseFunction,
    PhaseGrid,
    QuadratureConfig,
    amplified_density_from_kernel,
    amplified_kernel_matrix,
    paul_density_at,
    paul_expectation,
    paul_kernel_matrix,
    paul_coherent_closed_form,
    pb_coherent_series,
    pb_expectation,
)

__all__ = [
    "DegenerateDenominatorError",
    "RatioEntry",
    "RatioReport",
    "ratio_R",
    "table1_run",
    "figure1a_run",
    "figure1b_run",
    "thermal_pb_amplified_closed_form",
    "thermal_pb_amplified_limit",
    "thermal_amplified_pb_value",
    "nonlinear_amplification_scan",
    "pb_expectation_amplified",
    "operator_attenuation_check",
    "expectation_convergence_check",
]

TWO_PI = 2.0 * np.pi

TABLE1_S_DEFAULT = (1, 10, 100, 1000, 10000)
TABLE1_EPS_DEFAULT = (1.0, 0.5, 0.1, 0.05, 0.01)

DENOMINATOR_FLOOR = 1e-12


class DegenerateDenominatorError(ValueError):
    """Paul density too close to zero for a meaningful ratio."""


@dataclass(frozen=True)
class RatioEntry:
    s: int
    eps: float
    phi: float
    mean: float
    max_dev: float
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.max_dev < 0 or self.n_samples < 1:
            raise ValueError("max_dev must be >= 0 and n_samples >= 1")


@dataclass(frozen=True)
class RatioReport:
    entries: tuple[RatioEntry, ...]

    def rows(self) -> list[dict]:
        return [
            {"s": e.s, "eps": e.eps, "phi": e.phi, "mean": e.mean,
             "max_dev": e.max_dev, "n_samples": e.n_samples, "seed": e.seed}
            for e in self.entries
        ]


def ratio_R(rho: DensityMatrix, s: int, eps: float, phi: float,
            normalization: str = "channel",
            cfg: QuadratureConfig | None = None) -> float:
    """Amplified Pegg-Barnett density over Paul density at one angle.

    Mixed states enter the amplified kernel by linearity in rho (the
    kernel matrix is built once, so thermal and random states reuse the
    pure-state machinery)."""
    denominator = paul_density_at(rho, float(phi), cfg)
    if denominator <= DENOMINATOR_FLOOR:
        raise DegenerateDenominatorError(
            f"Paul density {denominator:g} at phi={phi:g} is degenerate")
    kernel = amplified_kernel_matrix(rho.cutoff, s, eps,
                                     normalization=normalization)
    numerator = amplified_density_from_kernel(kernel, rho.entries, float(phi))
    return numerator / denominator


def _qubit_batch(samples: int, seed: int) -> np.ndarray:
    """Stack of Hilbert-Schmidt random qubit matrices, one per counter index."""
    rhos = np.empty((samples, 2, 2), dtype=complex)
    for i in range(samples):
        rhos[i] = random_hs_density(2, 1, seed, index=i).entries
    return rhos


def table1_run(samples: int, seed: int, phi: float = 0.3,
               s_list=TABLE1_S_DEFAULT, eps_list=TABLE1_EPS_DEFAULT,
               normalization: str = "riemann") -> RatioReport:
    """Ratio statistics over Hilbert-Schmidt random qubit states.

    For each (s, eps) cell the same ``samples`` states (counter-indexed by
    the seed) are pushed through the amplified kernel; the entry records
    the sample mean and the maximum deviation from it.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rhos = _qubit_batch(samples, seed)
    z = np.array([1.0, np.exp(1j * phi)])

    # Paul denominators: same quadrature kernel for every sample.
    cfg = QuadratureConfig.for_state(DensityMatrix(rhos[0], 1))
    w_paul = paul_kernel_matrix(1, cfg)
    den = np.einsum("m,kmn,n->k", z.conj(), rhos * w_paul[None, :, :], z).real
    if np.any(den <= DENOMINATOR_FLOOR):
        raise DegenerateDenominatorError("degenerate Paul denominator in batch")

    entries = []
    for eps in eps_list:
        for s in s_list:
            kernel = amplified_kernel_matrix(1, int(s), float(eps),
                                             normalization=normalization)
            num = np.einsum("m,kmn,n->k", z.conj(), rhos * kernel[None, :, :],
                            z).real
            ratios = num / den
            mean = float(ratios.mean())
            entries.append(RatioEntry(
                s=int(s), eps=float(eps), phi=float(phi), mean=mean,
                max_dev=float(np.max(np.abs(ratios - mean))),
                n_samples=samples, seed=seed))
    return RatioReport(tuple(entries))


def figure1a_run(r_prime_list=(0.5, 2.0), psi: float = np.pi,
                 grid: PhaseGrid | None = None, terms: int = 100) -> list[dict]:
    """Closed-form Paul density next to the truncated Pegg-Barnett series
    for coherent states, sampled over a phase grid."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    if grid is None:
        grid = PhaseGrid(512)
    rows = []
    for r_prime in r_prime_list:
        for phi in grid.points:
            rows.append({
                "r_prime": float(r_prime),
                "phi": float(phi),
                "paul": paul_coherent_closed_form(r_prime, psi, phi),
                "pb_series": pb_coherent_series(r_prime, psi, phi, terms),
            })
    return rows


def figure1b_run(r_prime: float = 2.0, psi: float = np.pi, eps: float = 0.01,
                 s_plus_1_list=(100, 1000, 10000), t_list=tuple(range(1, 10)),
                 terms: int = 100, normalization: str = "riemann") -> list[dict]:
    """Ratio of amplified Pegg-Barnett to Paul density for a coherent
    state at phi = 2 pi t / 10, one row per (s+1, t)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    psi_vec = coherent_state(r_prime * np.exp(1j * psi), terms - 1)
    rho = np.outer(psi_vec.amplitudes, psi_vec.amplitudes.conj())
    phis = np.array([TWO_PI * t / 10.0 for t in t_list])
    den = np.array([paul_coherent_closed_form(r_prime, psi, p) for p in phis])
    rows = []
    for s_plus_1 in s_plus_1_list:
        s = int(s_plus_1) - 1
        kernel = amplified_kernel_matrix(psi_vec.cutoff, s, eps,
                                         normalization=normalization)
        num = amplified_density_from_kernel(kernel, rho, phis)
        for t, phi, ratio in zip(t_list, phis, num / den):
            rows.append({"s_plus_1": int(s_plus_1), "t": int(t),
                         "phi": float(phi), "ratio": float(ratio)})
    return rows


def thermal_amplified_pb_value(beta: float, s: int, kappa: float) -> float:
    """Pegg-Barnett density (flat in phi) of an amplified thermal state:
    (1/2pi) [1 - ((e^-beta + kappa - 1)/kappa)^(s+1)]."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    if s < 0:
        raise ValueError("s must be nonnegative")
    base = (np.exp(-beta) + kappa - 1.0) / kappa
    return float((1.0 - base ** (s + 1)) / TWO_PI)


def thermal_pb_amplified_closed_form(beta: float, s: int, eps: float) -> float:
    """Closed form at the linear schedule kappa = 1 + s*eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return thermal_amplified_pb_value(beta, s, 1.0 + s * eps)


def thermal_pb_amplified_limit(beta: float, eps: float) -> float:
    """s -> infinity limit of the closed form:
    (1/2pi) [1 - e^{-(1 - e^-beta)/eps}]."""
    if beta <= 0 or eps <= 0:
        raise ValueError("beta and eps must be positive")
    return float((1.0 - np.exp(-(1.0 - np.exp(-beta)) / eps)) / TWO_PI)


def _thermal_cutoff(beta: float) -> int:
    return max(30, int(np.ceil(28.0 / beta)))


def nonlinear_amplification_scan(beta: float, eps: float, s_list) -> list[dict]:
    """Amplified Pegg-Barnett density of a thermal state under the
    quadratic schedule kappa = 1 + s^2 eps, which kills the density as s
    grows (no schedule linear in s, no finite limit).

    The density is flat in phi for thermal states, so each row carries a
    single value: the closed form and the numerical kernel cross-check,
    both scaled by 2 pi.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    rho = thermal_state(beta, _thermal_cutoff(beta))
    rows = []
    for s in s_list:
        s = int(s)
        kappa = 1.0 + s**2 * eps
        closed = TWO_PI * thermal_amplified_pb_value(beta, s, kappa)
        kernel = amplified_kernel_matrix(rho.cutoff, s, None, kappa=kappa,
                                         normalization="channel")
        numeric = TWO_PI * float(np.sum(rho.diagonal() * np.diag(kernel)))
        rows.append({"s": s, "kappa": kappa, "closed_form": closed,
                     "numeric": numeric})
    return rows


def pb_expectation_amplified(rho: DensityMatrix, s: int, eps: float,
                             f: PhaseFunction,
                             normalization: str = "channel") -> complex:
    """Pegg-Barnett expectation of f on the amplified state A_{1+s eps}(rho),
    contracted directly through the amplified kernel so that s ~ 1e4 stays
    cheap (the explicit channel matrix would be quadratic in s)."""
    kernel = amplified_kernel_matrix(rho.cutoff, s, eps,
                                     normalization=normalization)
    block = kernel * rho.entries
    dim = block.shape[0]
    if rho.cutoff + f.order <= s:
        # sum_t e^{i k theta_t} e^{i (n-m) theta_t} = (s+1) delta_{n-m, -k}
        diag_sums = np.array([
            np.trace(block, offset=d) for d in range(-(dim - 1), dim)])
        total = 0.0j
        for k in range(-f.order, f.order + 1):
            c = f.coeffs[f.order + k]
            if c != 0 and abs(k) <= dim - 1:
                total += c * diag_sums[(dim - 1) + (-k)]
        return complex(TWO_PI * total)
    theta = TWO_PI * np.arange(s + 1) / (s + 1)
    density = amplified_density_from_kernel(kernel, rho.entries, theta)
    probs = density * TWO_PI / (s + 1)
    return complex(np.sum(f.evaluate(theta) * probs))


def _pb_operator_matrix(s: int, f: PhaseFunction) -> np.ndarray:
    """Pegg-Barnett operator for f on the (s+1)-dimensional block:
    sum_t f(e^{i theta_t}) |theta_t><theta_t|."""
    theta = TWO_PI * np.arange(s + 1) / (s + 1)
    frame = np.exp(1j * np.outer(np.arange(s + 1), theta)) / np.sqrt(s + 1.0)
    return (frame * f.evaluate(theta)) @ frame.conj().T


def operator_attenuation_check(rho: DensityMatrix, s: int, eps: float,
                               f: PhaseFunction) -> tuple[complex, complex]:
    """Duality-transported against direct amplified expectation:

    ( Tr[rho (1/kappa) E_{1/kappa}(Phi_s[f])],
      Tr[A_kappa(rho) Phi_s[f]] )

    with kappa = 1 + s*eps.  The first route attenuates the operator, the
    second amplifies the state; they agree by channel duality.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    kappa = 1.0 + s * eps
    pb_op = _pb_operator_matrix(s, f)

    cutoff = max(s, rho.cutoff)
    op_padded = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    op_padded[: s + 1, : s + 1] = pb_op
    rho_padded = rho.embedded(cutoff)
    attenuated = attenuator_apply(op_padded, 1.0 / kappa) / kappa
    transported = complex(np.trace(rho_padded.entries @ attenuated))

    out_cutoff = max(s, default_out_cutoff(kappa, rho.cutoff))
    amplified = qla_apply(rho, kappa, out_cutoff)
    direct = pb_expectation(amplified, s, f)
    return transported, direct


def expectation_convergence_check(rho: DensityMatrix, f: PhaseFunction, s: int,
                                eps: float,
                                cfg: QuadratureConfig | None = None,
                                normalization: str = "channel") -> tuple[complex, complex]:
    """Paul expectation of f next to the Pegg-Barnett expectation on the
    amplified state; the pair converges as s grows and eps shrinks."""
    paul = paul_expectation(rho, f, cfg)
    pb = pb_expectation_amplified(rho, s, eps, f, normalization=normalization)
    return paul, pb
