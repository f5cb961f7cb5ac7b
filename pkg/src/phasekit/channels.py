"""Quantum limited amplifier and attenuator channels in the number basis.

The amplifier of strength kappa >= 1 acts as

    A_kappa(rho) = (1/kappa) sum_j ((kappa-1)/kappa)^j
                   sum_{mn} rho_mn kappa^{-(m+n)/2}
                   sqrt(C(j+m,j) C(j+n,j)) |j+m><j+n|,

which is trace preserving, completely positive and satisfies the semigroup
law A_x A_y = A_{xy}.  The attenuator E_lambda is the standard pure-loss
channel; it is the amplifier's dual under the trace pairing,
Tr[A_kappa(rho) O] = Tr[rho (1/kappa) E_{1/kappa}(O)].

All combinatorial coefficients are evaluated in log space.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .fock import DensityMatrix, NumericsWarning

__all__ = [
    "AmplifierParams",
    "AttenuatorParams",
    "default_out_cutoff",
    "qla_apply",
    "qla_thermal_closed_form",
    "attenuator_apply",
    "gkls_generator",
    "duality_pair",
]

# Relative tail threshold at which the j-summation may stop early.
_J_TAIL_REL = 1e-14

DISCARD_WARN_THRESHOLD = 1e-6


@dataclass(frozen=True)
class AmplifierParams:
    """Amplification strength kappa >= 1, optionally tied to a stepping
    schedule: ``from_steps`` gives kappa = 1 + s*eps (linear in s),
    ``quadratic_steps`` gives kappa = 1 + s^2*eps."""

    kappa: float
    s: int | None = None
    eps: float | None = None
    schedule: str = "fixed"

    def __post_init__(self):
        if self.kappa < 1.0:
            raise ValueError("kappa must be >= 1")
        if (self.s is None) != (self.eps is None):
            raise ValueError("s and eps must be given together")
        if self.eps is not None and self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.s is not None:
            expected = {"linear": 1.0 + self.s * self.eps,
                        "quadratic": 1.0 + self.s**2 * self.eps}.get(self.schedule)
            if expected is None:
                raise ValueError(f"unknown schedule {self.schedule!r}")
            if self.kappa != expected:
                raise ValueError("kappa inconsistent with schedule")

    @classmethod
    def from_kappa(cls, kappa: float) -> "AmplifierParams":
        return cls(kappa=float(kappa))

    @classmethod
    def from_steps(cls, s: int, eps: float) -> "AmplifierParams":
        return cls(kappa=1.0 + s * eps, s=int(s), eps=float(eps), schedule="linear")

    @classmethod
    def quadratic_steps(cls, s: int, eps: float) -> "AmplifierParams":
        return cls(kappa=1.0 + s**2 * eps, s=int(s), eps=float(eps),
                   schedule="quadratic")


@dataclass(frozen=True)
class AttenuatorParams:
    """Pure-loss transmissivity lambda in [0, 1]."""

    lam: float

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda must lie in [0, 1]")


def default_out_cutoff(kappa: float, in_cutoff: int) -> int:
    """Output cutoff policy: amplification scales the mean photon number
    by kappa; a Gaussian-tail margin keeps the discarded mass small."""
    scaled = kappa * (in_cutoff + 1)
    return int(np.ceil(scaled) + np.ceil(4.0 * np.sqrt(scaled)) + 10)


def _as_params(params, cls):
    if isinstance(params, cls):
        return params
    if cls is AmplifierParams:
        return AmplifierParams.from_kappa(float(params))
    return AttenuatorParams(float(params))


def _qla_matrix(rho: np.ndarray, kappa: float, out_cutoff: int) -> np.ndarray:
    """Amplifier action on raw matrix entries, truncated at out_cutoff."""
    n_in = rho.shape[0] - 1
    dim_out = out_cutoff + 1
    out = np.zeros((dim_out, dim_out), dtype=complex)
    if kappa == 1.0:
        out[: n_in + 1, : n_in + 1] = rho
        return out

    log_q = np.log(kappa - 1.0) - np.log(kappa)
    log_kappa = np.log(kappa)
    m_all = np.arange(n_in + 1)
    trace_in = float(np.trace(rho).real)
    accum = 0.0
    prev_tail_ok = False
    for j in range(out_cutoff + 1):
        width = min(n_in, out_cutoff - j)
        m = m_all[: width + 1]
        # c_m = kappa^{-m/2} sqrt(C(j+m, j)), log-gamma form
        log_c = (0.5 * (gammaln(j + m + 1.0) - gammaln(j + 1.0) - gammaln(m + 1.0))
                 - 0.5 * m * log_kappa)
        c = np.exp(log_c)
        w = np.exp(-log_kappa + j * log_q)
        block = w * (c[:, None] * c[None, :]) * rho[: width + 1, : width + 1]
        out[j: j + width + 1, j: j + width + 1] += block
        t_j = float(np.trace(block).real)
        accum += t_j
        # Geometric-times-binomial tail bound: once the per-step growth
        # ratio drops below 1, the remaining mass is a geometric series.
        ratio = (1.0 - 1.0 / kappa) * (1.0 + n_in / (j + 1.0))
        if ratio < 1.0 and accum > 0.0:
            tail = abs(t_j) * ratio / (1.0 - ratio)
            if tail < _J_TAIL_REL * accum:
                if prev_tail_ok:
                    break
                prev_tail_ok = True
            else:
                prev_tail_ok = False
    return out


def qla_apply(rho: DensityMatrix, params, out_cutoff: int | None = None) -> DensityMatrix:
    """Apply the quantum limited amplifier A_kappa to a state.

    The output is truncated at ``out_cutoff`` (default per the cutoff
    policy) and the discarded mass is added to ``trace_deficit``.  Warns
    if the discarded mass exceeds 1e-6.
    """
    params = _as_params(params, AmplifierParams)
    if out_cutoff is None:
        out_cutoff = default_out_cutoff(params.kappa, rho.cutoff)
    if out_cutoff < rho.cutoff:
        raise ValueError("out_cutoff must be >= input cutoff")
    out = _qla_matrix(rho.entries, params.kappa, out_cutoff)
    out = 0.5 * (out + out.conj().T)
    discarded = max(rho.trace - float(np.trace(out).real), 0.0)
    if discarded > DISCARD_WARN_THRESHOLD:
        warnings.warn(
            f"amplifier discarded mass {discarded:.3g} at out_cutoff {out_cutoff}",
            NumericsWarning)
    return DensityMatrix(out, out_cutoff, rho.trace_deficit + discarded)


def qla_thermal_closed_form(beta: float, kappa: float) -> float:
    """Inverse temperature after amplification:
    beta(kappa) = ln(kappa / (e^-beta + kappa - 1))."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    return float(np.log(kappa / (np.exp(-beta) + kappa - 1.0)))


def _attenuator_matrix(op: np.ndarray, lam: float, out_cutoff: int) -> np.ndarray:
    """Pure-loss Kraus family <n-j|K_j|n> = sqrt(C(n,j)) lam^{(n-j)/2} (1-lam)^{j/2}."""
    n_in = op.shape[0] - 1
    dim_out = out_cutoff + 1
    out = np.zeros((dim_out, dim_out), dtype=complex)
    if lam == 1.0:
        keep = min(n_in, out_cutoff)
        out[: keep + 1, : keep + 1] = op[: keep + 1, : keep + 1]
        return out
    if lam == 0.0:
        out[0, 0] = np.trace(op)
        return out

    log_lam = np.log(lam)
    log_one_minus = np.log1p(-lam)
    for j in range(n_in + 1):
        width = min(n_in - j, out_cutoff)
        m = np.arange(width + 1)
        # K_j maps |m+j> -> sqrt(C(m+j, j)) lam^{m/2} (1-lam)^{j/2} |m>
        log_c = (0.5 * (gammaln(m + j + 1.0) - gammaln(j + 1.0) - gammaln(m + 1.0))
                 + 0.5 * m * log_lam + 0.5 * j * log_one_minus)
        c = np.exp(log_c)
        out[: width + 1, : width + 1] += (
            c[:, None] * c[None, :] * op[j: j + width + 1, j: j + width + 1])
    return out


def attenuator_apply(op, params, out_cutoff: int | None = None):
    """Apply the quantum limited attenuator E_lambda.

    Accepts a ``DensityMatrix`` (returned as one) or a plain operator
    matrix (returned as an ndarray); the latter is needed when attenuating
    observables rather than states.
    """
    params = _as_params(params, AttenuatorParams)
    if isinstance(op, DensityMatrix):
        cutoff = op.cutoff if out_cutoff is None else out_cutoff
        mat = _attenuator_matrix(op.entries, params.lam, cutoff)
        mat = 0.5 * (mat + mat.conj().T)
        discarded = max(op.trace - float(np.trace(mat).real), 0.0)
        return DensityMatrix(mat, cutoff, op.trace_deficit + discarded)
    op = np.asarray(op, dtype=complex)
    cutoff = op.shape[0] - 1 if out_cutoff is None else out_cutoff
    return _attenuator_matrix(op, params.lam, cutoff)


def gkls_generator(rho: DensityMatrix) -> np.ndarray:
    """Generator of the amplifier semigroup,
    L(rho) = a^dag rho a - (1/2){a a^dag, rho}, on cutoff + 1."""
    dim = rho.cutoff + 2
    out = np.zeros((dim, dim), dtype=complex)
    block = rho.entries
    p = np.arange(1, dim)
    gain = np.sqrt(p)[:, None] * np.sqrt(p)[None, :] * block
    out[1:, 1:] += gain
    n_plus_1 = np.arange(dim - 1) + 1.0
    out[: dim - 1, : dim - 1] -= 0.5 * (n_plus_1[:, None] + n_plus_1[None, :]) * block
    return out


def duality_pair(rho: DensityMatrix, obs: np.ndarray, kappa: float) -> tuple[float, float]:
    """Evaluate Tr[A_kappa(rho) O] and Tr[rho (1/kappa) E_{1/kappa}(O)]
    through the two independent channel implementations."""
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    obs = np.asarray(obs, dtype=complex)
    if np.max(np.abs(obs - obs.conj().T)) > 1e-10:
        raise ValueError("observable must be Hermitian")
    n_obs = obs.shape[0] - 1
    cutoff = max(rho.cutoff, n_obs)

    amplified = _qla_matrix(rho.entries, kappa, cutoff)
    obs_padded = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    obs_padded[: n_obs + 1, : n_obs + 1] = obs
    lhs = float(np.trace(amplified @ obs_padded).real)

    attenuated = _attenuator_matrix(obs_padded, 1.0 / kappa, cutoff) / kappa
    rho_padded = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    rho_padded[: rho.cutoff + 1, : rho.cutoff + 1] = rho.entries
    rhs = float(np.trace(rho_padded @ attenuated).real)
    return lhs, rhs
