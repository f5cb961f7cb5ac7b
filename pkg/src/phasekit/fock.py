"""States and basis vectors on a truncated single-mode Fock space.

All constructors return immutable containers carrying explicit truncation
bookkeeping: a ``FockVector`` records the probability mass lost beyond the
cutoff (``tail_mass``), a ``DensityMatrix`` the trace lost to truncation
(``trace_deficit``).  Nothing is silently renormalized; downstream error
budgets rely on these numbers.

Factorials and binomials are always evaluated through log-gamma so that
constructions remain accurate far beyond the m ~ 170 overflow threshold of
direct factorials.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammainc, gammaln

__all__ = [
    "NumericsWarning",
    "FockVector",
    "DensityMatrix",
    "coherent_state",
    "fock_basis_state",
    "thermal_state",
    "random_hs_density",
    "pure_density",
    "number_phase_state",
    "continuous_phase_state",
    "trace_distance",
    "parse_state_spec",
    "parse_spec_fields",
    "default_cutoff_for_spec",
]

# Tolerances used by the container validators.
NORM_TOL = 1e-10
HERM_TOL = 1e-12
EIG_TOL = 1e-10

TAIL_WARN_THRESHOLD = 1e-8


class NumericsWarning(UserWarning):
    """Raised (as a warning) when truncation or quadrature error exceeds
    its advertised threshold.  Never fatal; the CLI surfaces these as
    structured header comments."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class FockVector:
    """Pure-state amplitudes psi_m on the number basis m = 0..cutoff.

    ``tail_mass`` estimates the probability mass of the untruncated state
    beyond the cutoff, so that norm**2 + tail_mass == 1 for states built
    by this module.
    """

    amplitudes: np.ndarray
    cutoff: int
    tail_mass: float = 0.0

    def __post_init__(self):
        amps = _readonly(np.asarray(self.amplitudes, dtype=complex))
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (self.cutoff + 1,):
            raise ValueError(
                f"expected {self.cutoff + 1} amplitudes, got {amps.shape}")
        if not np.all(np.isfinite(amps.view(float))):
            raise ValueError("amplitudes must be finite")
        if self.tail_mass < 0:
            raise ValueError("tail_mass must be nonnegative")

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def check_normalization(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_sq + self.tail_mass - 1.0) <= tol


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive, near-unit-trace matrix rho_mn on the truncated
    basis.  ``trace_deficit`` is the mass lost to truncation."""

    entries: np.ndarray
    cutoff: int
    trace_deficit: float = 0.0

    def __post_init__(self):
        rho = _readonly(np.asarray(self.entries, dtype=complex))
        object.__setattr__(self, "entries", rho)
        dim = self.cutoff + 1
        if rho.shape != (dim, dim):
            raise ValueError(f"expected {dim}x{dim} entries, got {rho.shape}")
        if self.trace_deficit < 0:
            raise ValueError("trace_deficit must be nonnegative")
        herm_err = np.max(np.abs(rho - rho.conj().T))
        if herm_err > HERM_TOL:
            raise ValueError(f"not Hermitian within {HERM_TOL:g}: {herm_err:g}")
        tr = float(np.trace(rho).real)
        if not (1.0 - self.trace_deficit - NORM_TOL <= tr <= 1.0 + NORM_TOL):
            raise ValueError(
                f"trace {tr!r} outside [1 - deficit - {NORM_TOL:g}, 1 + {NORM_TOL:g}]")
        min_eig = float(np.linalg.eigvalsh(rho)[0])
        if min_eig < -EIG_TOL:
            raise ValueError(f"negative eigenvalue {min_eig:g} below -{EIG_TOL:g}")

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def diagonal(self) -> np.ndarray:
        return self.entries.diagonal().real.copy()

    def embedded(self, cutoff: int) -> "DensityMatrix":
        """Same state on a larger cutoff (zero-padded)."""
        if cutoff < self.cutoff:
            raise ValueError("embedding cutoff must not be smaller")
        if cutoff == self.cutoff:
            return self
        dim = cutoff + 1
        out = np.zeros((dim, dim), dtype=complex)
        out[: self.cutoff + 1, : self.cutoff + 1] = self.entries
        return DensityMatrix(out, cutoff, self.trace_deficit)

    def number_quantile(self, mass: float = 1.0 - 1e-10) -> int:
        """Smallest n with cumulative photon-number weight >= mass * trace."""
        p = np.maximum(self.diagonal(), 0.0)
        cum = np.cumsum(p)
        target = mass * cum[-1]
        return int(np.searchsorted(cum, target, side="left"))


def coherent_state(alpha: complex, cutoff: int) -> FockVector:
    """Coherent state |alpha> with amplitudes e^{-|a|^2/2} a^m / sqrt(m!).

    Amplitudes are assembled as exp(log-magnitude) * unit-phase, which keeps
    relative accuracy at large |alpha| and large m.  Warns if the truncated
    tail carries more than 1e-8 probability.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    alpha = complex(alpha)
    m = np.arange(cutoff + 1)
    r = abs(alpha)
    if r == 0.0:
        amps = np.zeros(cutoff + 1, dtype=complex)
        amps[0] = 1.0
        return FockVector(amps, cutoff, 0.0)
    log_mag = -0.5 * r * r + m * np.log(r) - 0.5 * gammaln(m + 1.0)
    amps = np.exp(log_mag) * np.exp(1j * m * np.angle(alpha))
    # Regularized lower incomplete gamma = exact Poisson tail beyond cutoff.
    tail = float(gammainc(cutoff + 1.0, r * r))
    if tail > TAIL_WARN_THRESHOLD:
        warnings.warn(
            f"coherent state tail mass {tail:.3g} beyond cutoff {cutoff}",
            NumericsWarning)
    return FockVector(amps, cutoff, tail)


def fock_basis_state(n: int, cutoff: int) -> FockVector:
    """Number state |n> on the truncated basis."""
    if not 0 <= n <= cutoff:
        raise ValueError(f"n={n} outside [0, {cutoff}]")
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[n] = 1.0
    return FockVector(amps, cutoff, 0.0)


def thermal_state(beta: float, cutoff: int) -> DensityMatrix:
    """Thermal oscillator state, rho_nn = (1 - e^-beta) e^{-beta n}."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    n = np.arange(cutoff + 1)
    z = np.exp(-beta)
    diag = (1.0 - z) * z**n
    deficit = float(z ** (cutoff + 1))
    return DensityMatrix(np.diag(diag.astype(complex)), cutoff, deficit)


def _ginibre_rng(seed: int, index: int) -> np.random.Generator:
    # Counter-based stream: sample `index` maps to a fixed draw regardless
    # of evaluation order, so parallel sweeps stay reproducible.
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return np.random.default_rng(ss)


def random_hs_density(dim: int, cutoff: int, seed: int, index: int = 0) -> DensityMatrix:
    """Hilbert-Schmidt random state GG^dag / tr(GG^dag) on the top-left
    dim x dim block, with G a complex Ginibre matrix of i.i.d. standard
    complex normal entries."""
    if not 1 <= dim <= cutoff + 1:
        raise ValueError(f"dim={dim} outside [1, {cutoff + 1}]")
    rng = _ginibre_rng(seed, index)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    block = g @ g.conj().T
    block /= np.trace(block).real
    block = 0.5 * (block + block.conj().T)
    out = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    out[:dim, :dim] = block
    return DensityMatrix(out, cutoff, 0.0)


def pure_density(psi: FockVector) -> DensityMatrix:
    """Projector |psi><psi| with trace deficit inherited from the tail."""
    rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
    return DensityMatrix(rho, psi.cutoff, psi.tail_mass)


def number_phase_state(t: int, s: int) -> FockVector:
    """Discrete number-phase state at theta_{t,s} = 2 pi t / (s + 1),
    an equal-weight superposition of |0>..|s|."""
    if not 0 <= t <= s:
        raise ValueError(f"t={t} outside [0, {s}]")
    return continuous_phase_state(2.0 * np.pi * t / (s + 1), s)


def continuous_phase_state(phi: float, s: int) -> FockVector:
    """Phase state with amplitudes e^{i n phi} / sqrt(s + 1), n = 0..s."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    phi = float(phi) % (2.0 * np.pi)
    n = np.arange(s + 1)
    amps = np.exp(1j * n * phi) / np.sqrt(s + 1.0)
    return FockVector(amps, s, 0.0)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the trace norm of a - b, after embedding on a common cutoff."""
    cutoff = max(a.cutoff, b.cutoff)
    diff = a.embedded(cutoff).entries - b.embedded(cutoff).entries
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


# --- state-spec mini-language -------------------------------------------
#
# Grammar (used by the CLI and re-exported here):
#   coherent:r=<float>,psi=<float>
#   thermal:beta=<float>
#   fock:n=<int>
#   random:dim=<int>,seed=<int>
# The cutoff is supplied separately.

_SPEC_FIELDS = {
    "coherent": {"r": float, "psi": float},
    "thermal": {"beta": float},
    "fock": {"n": int},
    "random": {"dim": int, "seed": int},
}


class StateSpecError(ValueError):
    """Malformed state-spec string."""


def _parse_fields(kind: str, body: str) -> dict:
    schema = _SPEC_FIELDS[kind]
    out = {}
    if body:
        for item in body.split(","):
            if "=" not in item:
                raise StateSpecError(f"expected key=value, got {item!r}")
            key, _, value = item.partition("=")
            key = key.strip()
            if key not in schema:
                raise StateSpecError(f"unknown field {key!r} for {kind!r}")
            try:
                out[key] = schema[key](value)
            except ValueError as exc:
                raise StateSpecError(f"bad value for {key!r}: {value!r}") from exc
    missing = set(schema) - set(out)
    if missing:
        raise StateSpecError(f"{kind!r} spec missing fields: {sorted(missing)}")
    return out


def parse_spec_fields(spec: str) -> tuple[str, dict]:
    """Split a spec string into its kind and typed field dict."""
    kind, _, body = spec.partition(":")
    kind = kind.strip()
    if kind not in _SPEC_FIELDS:
        raise StateSpecError(f"unknown state kind {kind!r}")
    return kind, _parse_fields(kind, body)


def default_cutoff_for_spec(spec: str) -> int:
    """Cutoff heuristic keeping the truncated tail below ~1e-10."""
    kind, fields = parse_spec_fields(spec)
    if kind == "coherent":
        nbar = fields["r"] ** 2
        return max(30, int(np.ceil(nbar + 8.0 * np.sqrt(nbar + 1.0) + 10)))
    if kind == "thermal":
        return max(30, int(np.ceil(28.0 / fields["beta"])))
    if kind == "fock":
        return fields["n"]
    return fields["dim"] - 1


def parse_state_spec(spec: str, cutoff: int):
    """Build a state from its mini-language description.

    Returns a ``FockVector`` for pure kinds (coherent, fock) and a
    ``DensityMatrix`` for mixed kinds (thermal, random).
    """
    kind, fields = parse_spec_fields(spec)
    if kind == "coherent":
        return coherent_state(fields["r"] * np.exp(1j * fields["psi"]), cutoff)
    if kind == "thermal":
        return thermal_state(fields["beta"], cutoff)
    if kind == "fock":
        return fock_basis_state(fields["n"], cutoff)
    return random_hs_density(fields["dim"], cutoff, fields["seed"])
