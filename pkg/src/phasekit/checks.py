"""Self-contained property suite behind the ``checks`` CLI subcommand.

Each check is a fast, deterministic invariant of the toolkit: channel
algebra (semigroup, duality, generator), distribution normalization,
closed-form agreement and the dominated-convergence envelope.  The CLI
prints one PASS/FAIL line per check.
"""

from __future__ import annotations

import numpy as np

from . import channels, experiments, fock, phase

__all__ = ["run_all_checks"]


def _random_state(seed: int, dim: int = 11) -> fock.DensityMatrix:
    return fock.random_hs_density(dim, dim - 1, seed)


def _check_coherent_norm():
    v = fock.coherent_state(2.0 * np.exp(1j * np.pi), 40)
    err = abs(v.norm_sq + v.tail_mass - 1.0)
    return err < 1e-12, f"norm defect {err:.2e}"


def _check_phase_resolution():
    s = 25
    acc = np.zeros((s + 1, s + 1), dtype=complex)
    for t in range(s + 1):
        a = fock.number_phase_state(t, s).amplitudes
        acc += np.outer(a, a.conj())
    err = np.max(np.abs(acc - np.eye(s + 1)))
    return err < 1e-10, f"identity defect {err:.2e}"


def _check_thermal_flatness():
    dist = phase.paul_distribution(fock.thermal_state(np.log(2.0), 40),
                                   phase.QuadratureConfig(grid_size=256, r_max=14.0))
    err = float(np.max(np.abs(2.0 * np.pi * dist.density - 1.0)))
    return err < 1e-6, f"max |2pi p - 1| = {err:.2e}"


def _check_thermal_covariance():
    amped = channels.qla_apply(fock.thermal_state(np.log(2.0), 40), 2.0, 150)
    target = fock.thermal_state(np.log(4.0 / 3.0), 150)
    dist = fock.trace_distance(amped, target)
    return dist < 1e-10, f"trace distance {dist:.2e}"


def _check_semigroup(seed: int):
    rho = _random_state(seed)
    comp = channels.qla_apply(channels.qla_apply(rho, 2.0, 180), 1.5, 260)
    direct = channels.qla_apply(rho, 3.0, 260)
    dist = fock.trace_distance(comp, direct)
    return dist < 1e-8, f"trace distance {dist:.2e}"


def _check_duality(seed: int):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(20):
        rho = fock.random_hs_density(2, 1, seed, index=i)
        kappa = 1.0 + 2.0 * rng.random()
        h = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        h = 0.5 * (h + h.conj().T)
        lhs, rhs = channels.duality_pair(rho, h, kappa)
        worst = max(worst, abs(lhs - rhs))
    return worst < 1e-8, f"worst pair gap {worst:.2e}"


def _check_gkls(seed: int):
    rho = _random_state(seed)
    gen = channels.gkls_generator(rho)
    target = rho.embedded(rho.cutoff + 1).entries

    def err(eps):
        amped = channels.qla_apply(rho, 1.0 + eps, rho.cutoff + 1)
        return np.linalg.norm((amped.entries - target) / eps - gen)

    ratio = err(1e-4) / err(5e-5)
    return 1.8 <= ratio <= 2.2, f"halving ratio {ratio:.3f}"


def _check_paul_coherent():
    rho = fock.pure_density(fock.coherent_state(2.0 * np.exp(1j * np.pi), 40))
    phis = 2.0 * np.pi * np.arange(64) / 64
    quad = phase.paul_density_at(rho, phis)
    closed = np.array([phase.paul_coherent_closed_form(2.0, np.pi, p) for p in phis])
    err = float(np.max(np.abs(quad - closed)))
    return err < 1e-6, f"max deviation {err:.2e}"


def _check_cross_path(seed: int):
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    amps /= np.linalg.norm(amps)
    psi = fock.FockVector(amps, 8, 0.0)
    s, eps = 60, 0.1
    fast = phase.pb_amplified_density(psi, s, eps, 0.7)
    amped = channels.qla_apply(fock.pure_density(psi), 1.0 + s * eps,
                               max(s, channels.default_out_cutoff(1.0 + s * eps, 8)))
    slow = phase.pb_continuous_density(amped, s, 0.7)
    err = abs(fast - slow)
    return err < 1e-8, f"path gap {err:.2e}"


def _check_envelope(seed: int):
    psi = fock.coherent_state(1.0, 20)
    ok = True
    worst = np.inf
    for s in (10, 100, 1000):
        for eps in (0.05, 0.1, 0.5):
            value, envelope = phase.amplified_density_bound(eps, s, 0.3, psi, 1.0)
            ok &= value <= envelope
            worst = min(worst, envelope - value)
    return bool(ok), f"smallest margin {worst:.2e}"


def _check_normalization(seed: int):
    states = [
        fock.pure_density(fock.coherent_state(1.5, 40)),
        fock.thermal_state(0.7, 50),
        _random_state(seed, dim=6).embedded(8),
    ]
    worst = 0.0
    for rho in states:
        dist = phase.paul_distribution(rho)
        worst = max(worst, abs(dist.integral() - 1.0) - dist.quad_error
                    - rho.trace_deficit)
    return worst < 1e-6, f"worst normalization defect {worst:.2e}"


def _check_paul_invariance(seed: int):
    rho = fock.random_hs_density(2, 1, seed)
    amped = channels.qla_apply(rho, 2.0, channels.default_out_cutoff(2.0, 1))
    phis = 2.0 * np.pi * np.arange(64) / 64
    sup = float(np.max(np.abs(phase.paul_density_at(rho, phis)
                              - phase.paul_density_at(amped, phis))))
    budget = 1e-6 + amped.trace_deficit
    return sup <= budget, f"sup deviation {sup:.2e} vs budget {budget:.2e}"


def _check_husimi_rescaling(seed: int):
    rho = fock.random_hs_density(2, 1, seed)
    amped = channels.qla_apply(rho, 2.0, 60)
    worst = 0.0
    for alpha in (0.3 + 0.1j, 1.0, -1.5j, 2.0 * np.exp(2.1j)):
        lhs = phase.husimi_q(amped, alpha)
        rhs = phase.husimi_q(rho, alpha / np.sqrt(2.0)) / 2.0
        worst = max(worst, abs(lhs - rhs))
    return worst < 1e-8, f"worst gap {worst:.2e}"


def _check_thermal_ratio():
    value = experiments.ratio_R(fock.thermal_state(np.log(2.0), 60), 100, 0.1, 1.0)
    expect = 1.0 - (10.5 / 11.0) ** 101
    err = abs(value - expect)
    return err < 1e-8, f"ratio gap {err:.2e}"


def run_all_checks(seed: int = 42) -> list[tuple[str, bool, str]]:
    """Run every property check; returns (name, passed, detail) triples."""
    named = [
        ("coherent-norm", _check_coherent_norm),
        ("phase-state-resolution", _check_phase_resolution),
        ("thermal-paul-flatness", _check_thermal_flatness),
        ("thermal-covariance", _check_thermal_covariance),
        ("semigroup", lambda: _check_semigroup(seed)),
        ("duality", lambda: _check_duality(seed)),
        ("gkls-first-order", lambda: _check_gkls(seed)),
        ("paul-coherent-closed-form", _check_paul_coherent),
        ("amplified-cross-path", lambda: _check_cross_path(seed)),
        ("domination-envelope", lambda: _check_envelope(seed)),
        ("paul-normalization", lambda: _check_normalization(seed)),
        ("paul-amplification-invariance", lambda: _check_paul_invariance(seed)),
        ("husimi-rescaling", lambda: _check_husimi_rescaling(seed)),
        ("thermal-ratio-closed-form", _check_thermal_ratio),
    ]
    results = []
    for name, func in named:
        try:
            passed, detail = func()
        except Exception as exc:  # a crashed check is a failed check
            passed, detail = False, f"exception: {exc!r}"
        results.append((name, passed, detail))
    return results
