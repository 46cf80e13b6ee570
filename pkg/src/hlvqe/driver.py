"""Simultaneous gradient-descent learning of the rotation angle and the
ansatz angles, with energy as the cost.

Per iteration the cost and its gradients assemble as

    E      = sum_P  h_P(beta)   <P>_theta
    G_beta = sum_P  h_P'(beta)  <P>_theta
    G_th_i = sum_P  h_P(beta)   d<P>/d(theta_i)      (shift rule),

with the coefficients evaluated classically and every <P> taken from the
backend; identity strings contribute exactly and carry no theta-gradient.
Two update rules are provided: ``plain`` steps by -eta * G and converges
geometrically near the optimum; ``normalized`` divides the step by the
gradient norm, which keeps a fixed step length eta and therefore orbits the
optimum at radius ~eta/2 instead of settling onto it (it descends faster far
from the optimum; the convergence tolerances of the reference trajectories
are only reachable in plain mode).

Iteration records hold the parameters before the step-k update, the
backend-evaluated energy, gradients, amplitude magnitudes (exact on the
analytic backend; square roots of one measured computational-basis ensemble
on the sampled backend) and the fidelity distance to the cached exact ground
state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .model import ModelParams, exact_ground_state
from .pauli import PauliDecomposition, PauliString, hamiltonian_decomposition
from .qsim import (
    AnalyticBackend,
    SampledBackend,
    StateVector,
    measure_pauli,
    parameter_shift_grad,
    prepare_ansatz,
)
from .rotations import EffectiveState, FullState, bures_distance, reconstruct_full

__all__ = [
    "HlvqeOptions",
    "IterationRecord",
    "RunSummary",
    "cost_and_grads",
    "run",
    "summarize",
    "excited_hamiltonian",
    "excited_state_run",
]


@dataclass(frozen=True)
class HlvqeOptions:
    learning_rate: float = 0.07
    max_iterations: int = 80
    backend: object = field(default_factory=AnalyticBackend)
    init_beta: float = 0.2
    init_theta: float | np.ndarray = 0.1
    summary_window: tuple = (70, 80)
    update: str = "normalized"
    convergence_tol: float | None = None  # optional early exit on |dE|

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be >= 1, got {self.max_iterations}")
        lo, hi = self.summary_window
        if not 1 <= lo <= hi <= self.max_iterations:
            raise ConfigError(
                f"summary window {self.summary_window} outside [1, {self.max_iterations}]")
        if self.update not in ("normalized", "plain"):
            raise ConfigError(f"update must be 'normalized' or 'plain', got {self.update!r}")


@dataclass(frozen=True)
class IterationRecord:
    step: int
    beta: float
    theta: np.ndarray
    energy: float
    grad_beta: float
    grad_theta: np.ndarray
    grad_norm: float
    amplitudes: np.ndarray
    bures_to_exact: float
    converged: bool = False


@dataclass(frozen=True)
class RunSummary:
    """Per-quantity (mean, half-range) over an iteration window."""

    window: tuple
    quantities: dict

    def mean(self, key: str) -> float:
        return self.quantities[key][0]

    def half_range(self, key: str) -> float:
        return self.quantities[key][1]


def _measure_terms(decomp: PauliDecomposition, state: StateVector, backend) -> dict:
    vals = {}
    for string, _ in decomp.terms:
        if string.is_identity:
            vals[string.ops] = 1.0
        else:
            vals[string.ops] = measure_pauli(state, string, backend).value
    return vals


def cost_and_grads(params: ModelParams, cutoff: int, beta: float, theta,
                   backend) -> tuple[float, float, np.ndarray]:
    """Energy, beta-gradient and theta-gradients at one parameter point."""
    h, dh = hamiltonian_decomposition(params, beta, cutoff)
    n_qubits = h.n_qubits
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    state = prepare_ansatz(theta, n_qubits)

    expect = _measure_terms(h, state, backend)
    for string, _ in dh.terms:
        if string.ops not in expect:
            expect[string.ops] = (1.0 if string.is_identity else
                                  measure_pauli(state, string, backend).value)

    energy = math.fsum(c * expect[s.ops] for s, c in h.terms)
    grad_beta = math.fsum(c * expect[s.ops] for s, c in dh.terms)

    grad_theta = np.zeros(len(theta))
    for i in range(len(theta)):
        contributions = []
        for string, c in h.terms:
            if string.is_identity:
                continue  # <I> has no theta dependence
            contributions.append(
                c * parameter_shift_grad(theta, i, string, backend, n_qubits))
        grad_theta[i] = math.fsum(contributions)
    return energy, grad_beta, grad_theta


def _recorded_amplitudes(state: StateVector, backend) -> np.ndarray:
    """Exact magnitudes on the analytic backend; sqrt of one measured
    computational-basis ensemble on the sampled backend."""
    if isinstance(backend, SampledBackend):
        return np.sqrt(backend.sample_probabilities(state))
    return np.abs(state.real_amplitudes())


def run(params: ModelParams, cutoff: int, opts: HlvqeOptions) -> list[IterationRecord]:
    """Gradient-descent trace; records the state at every step before updating.

    Deterministic given the backend seed.  In normalized mode a gradient norm
    below 1e-14 terminates the run early with the final record marked
    converged (the update direction is undefined at an exact stationary
    point).
    """
    nq = cutoff.bit_length() - 1
    if cutoff < 2 or cutoff & (cutoff - 1):
        raise ConfigError(f"cutoff must be a power of two, got {cutoff}")
    eta = opts.learning_rate
    beta = float(opts.init_beta)
    theta = np.atleast_1d(np.asarray(opts.init_theta, dtype=float))
    if theta.size == 1 and cutoff > 2:
        theta = np.full(cutoff - 1, float(theta[0]))
    if theta.shape != (cutoff - 1,):
        raise ConfigError(f"init_theta must provide {cutoff - 1} angles")

    _, ex_amps = exact_ground_state(params)
    exact = FullState(params.n_particles, ex_amps)

    trace = []
    prev_energy = None
    for step in range(1, opts.max_iterations + 1):
        energy, g_beta, g_theta = cost_and_grads(params, cutoff, beta, theta,
                                                 opts.backend)
        g_norm = math.sqrt(g_beta * g_beta + float(g_theta @ g_theta))

        state = prepare_ansatz(theta, nq)
        amps = _recorded_amplitudes(state, opts.backend)
        signed = state.real_amplitudes()
        eff = EffectiveState(cutoff, beta, signed / np.linalg.norm(signed))
        bures = bures_distance(reconstruct_full(eff, params), exact)

        converged = opts.update == "normalized" and g_norm < 1e-14
        if opts.convergence_tol is not None and prev_energy is not None:
            converged = converged or abs(energy - prev_energy) < opts.convergence_tol
        trace.append(IterationRecord(step, beta, theta.copy(), energy, g_beta,
                                     g_theta.copy(), g_norm, amps, bures, converged))
        if converged:
            break
        prev_energy = energy

        if opts.update == "normalized":
            beta -= eta * g_beta / g_norm
            theta = theta - eta * g_theta / g_norm
        else:
            beta -= eta * g_beta
            theta = theta - eta * g_theta
    return trace


def summarize(trace: list, window: tuple | None = None) -> RunSummary:
    """Mean and half the max-min spread per tracked quantity over a step window."""
    if not trace:
        raise ConfigError("cannot summarize an empty trace")
    if window is None:
        window = (max(1, trace[-1].step - 10), trace[-1].step)
    lo, hi = window
    rows = [r for r in trace if lo <= r.step <= hi]
    if not rows:
        raise ConfigError(f"window {window} selects no steps from the trace")

    def stats(values):
        arr = np.asarray(values, dtype=float)
        return float(arr.mean()), float((arr.max() - arr.min()) / 2)

    quantities = {
        "energy": stats([r.energy for r in rows]),
        "beta": stats([r.beta for r in rows]),
        "bures": stats([r.bures_to_exact for r in rows]),
    }
    n_amp = len(rows[0].amplitudes)
    for n in range(n_amp):
        quantities[f"A{n}"] = stats([r.amplitudes[n] for r in rows])
    return RunSummary((lo, hi), quantities)


def excited_hamiltonian(decomp: PauliDecomposition, ground: StateVector,
                        mu0: float) -> PauliDecomposition:
    """Shift a converged state up by a chemical potential: H + mu0 |psi><psi|.

    Every Pauli coefficient moves by mu0/2^n <psi|P|psi>, including strings
    absent from the input decomposition.
    """
    if mu0 <= 0:
        raise ConfigError(f"mu0 must be > 0, got {mu0}")
    nq = decomp.n_qubits
    if ground.n_qubits != nq:
        raise ConfigError(f"state width {ground.n_qubits} != register width {nq}")
    backend = AnalyticBackend()
    base = decomp.as_dict()

    strings = [""]
    for _ in range(nq):
        strings = [s + c for s in strings for c in "IXYZ"]
    terms = []
    for ops in strings:
        val = measure_pauli(ground, PauliString(ops), backend).value
        coeff = base.get(ops, 0.0) + mu0 / (2 ** nq) * val
        if abs(coeff) > 1e-14:
            terms.append((PauliString(ops), coeff))
    return PauliDecomposition(nq, tuple(terms), decomp.beta)


def excited_state_run(params: ModelParams, cutoff: int, mu0: float,
                      opts: HlvqeOptions, ground_state: StateVector | None = None,
                      beta0: float | None = None) -> tuple[list, PauliDecomposition]:
    """First excited state via the chemical-potential construction.

    The shifted Hamiltonian H + mu0 |g><g| is minimized over theta alone at
    fixed beta_0 (the same effective Hamiltonian describes both states).  The
    shift state |g> and beta_0 default to the endpoint of a fresh ground run;
    callers holding a better-converged ground state should pass it explicitly,
    since the orthogonality of the excited state degrades linearly with the
    shift state's own error.  Returns the theta-only trace on the shifted
    Hamiltonian and that Hamiltonian.
    """
    nq = cutoff.bit_length() - 1
    if ground_state is None or beta0 is None:
        last = run(params, cutoff, opts)[-1]
        if beta0 is None:
            beta0 = last.beta
        if ground_state is None:
            ground_state = prepare_ansatz(last.theta, nq)
    h, _ = hamiltonian_decomposition(params, beta0, cutoff)
    shifted = excited_hamiltonian(h, ground_state, mu0)

    eta = opts.learning_rate
    theta = np.atleast_1d(np.asarray(opts.init_theta, dtype=float))
    if theta.size == 1 and cutoff > 2:
        theta = np.full(cutoff - 1, float(theta[0]))
    backend = opts.backend
    trace = []
    for step in range(1, opts.max_iterations + 1):
        state = prepare_ansatz(theta, nq)
        expect = _measure_terms(shifted, state, backend)
        energy = math.fsum(c * expect[s.ops] for s, c in shifted.terms)
        g_theta = np.zeros(len(theta))
        for i in range(len(theta)):
            g_theta[i] = math.fsum(
                c * parameter_shift_grad(theta, i, s, backend, nq)
                for s, c in shifted.terms if not s.is_identity)
        g_norm = float(np.linalg.norm(g_theta))
        amps = _recorded_amplitudes(state, backend)
        trace.append(IterationRecord(step, beta0, theta.copy(), energy, 0.0,
                                     g_theta.copy(), g_norm, amps,
                                     float("nan")))
        if opts.update == "normalized":
            if g_norm < 1e-14:
                break
            theta = theta - eta * g_theta / g_norm
        else:
            theta = theta - eta * g_theta
    return trace, shifted
