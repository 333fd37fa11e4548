"""Monte-Carlo quantum trajectories under frequent photon detection.

One coarse step of duration ``dt_step`` bundles many detection intervals:
with probability ``p1 = |alpha|^2 * gamma_eff * dt_step`` a photon is
registered and the atom is projected to the ground state (jump operator
``sigma-``); otherwise the no-click back-action contracts the excited
amplitude by ``a_bar(dt_step)`` and the state is renormalised.  A resonant
Rabi drive ``omega * sigma_x`` is applied after the measurement update of
each step.  The no-click contraction and the click probability are linked
by ``gamma_eff = [1 - |a_bar|^2]/dt_step``, which makes the two outcomes
exactly exhaust the step probability.

Reproducibility: every trajectory consumes one uniform variate per step
from a counter-based Philox generator seeded through
``numpy.random.SeedSequence(seed)``.  Ensembles derive the seed of
trajectory ``i`` from the first eight bytes of
``sha256(b"<master_seed>:<i>")``, so any subset of trajectories can be
recomputed independently and results never depend on scheduling order.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .rates import gamma_eff as _gamma_eff_of
from .spectral import MemoryKernel
from .volterra import AtomState, null_conditioned_power, solve_decay

__all__ = [
    "DriveConfig",
    "TrajectoryRecord",
    "EnsembleResult",
    "unitary_drive",
    "mc_step",
    "simulate_trajectory",
    "run_ensemble",
    "ensemble_average",
    "make_drive_config",
    "a_bar_from_memory",
    "child_seed",
    "make_rng",
]

#: at-most-one-photon criterion: both rates must stay below this per step
MAX_RATE_DT = 0.05


@dataclass(frozen=True)
class DriveConfig:
    """Step layout of a trajectory run.

    ``gamma_eff * dt_step`` and ``omega * dt_step`` are both capped at 0.05
    so that at most one photon is registered per step and the drive rotation
    stays small.
    """

    omega: float
    gamma_eff: float
    dt_step: float
    n_steps: int

    def __post_init__(self):
        if self.dt_step <= 0:
            raise ValueError(f"dt_step must be positive, got {self.dt_step}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.gamma_eff < 0:
            raise ValueError(f"gamma_eff must be nonnegative, got {self.gamma_eff}")
        if self.gamma_eff * self.dt_step > MAX_RATE_DT + 1e-12:
            raise ValueError(
                f"gamma_eff*dt_step = {self.gamma_eff * self.dt_step:.3g} violates the "
                f"at-most-one-photon criterion (<= {MAX_RATE_DT})")
        if abs(self.omega) * self.dt_step > MAX_RATE_DT + 1e-12:
            raise ValueError(
                f"omega*dt_step = {abs(self.omega) * self.dt_step:.3g} exceeds {MAX_RATE_DT}")

    @property
    def t_max(self) -> float:
        return self.n_steps * self.dt_step


@dataclass(frozen=True)
class TrajectoryRecord:
    """One stochastic realisation: occupations, click flags, and its seed."""

    dt_step: float
    p_e: np.ndarray      # length n_steps + 1, p_e[0] is the initial occupation
    jumps: np.ndarray    # bool, length n_steps; True = photon registered in that step
    seed: int

    @property
    def times(self) -> np.ndarray:
        return self.dt_step * np.arange(len(self.p_e))

    @property
    def jump_count(self) -> int:
        return int(np.count_nonzero(self.jumps))

    def first_jump_time(self) -> float | None:
        """Time of the first registered photon, or None if none occurred."""
        idx = np.flatnonzero(self.jumps)
        if idx.size == 0:
            return None
        return (int(idx[0]) + 1) * self.dt_step

    def to_csv(self, path):
        # row k = state at t_k; the jump flag of row k marks a click during
        # the step that ended at t_k (row 0 therefore carries 0)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t,p_e,jump\n")
            fh.write(f"0,{self.p_e[0]:.12g},0\n")
            for k in range(1, len(self.p_e)):
                fh.write(f"{k * self.dt_step:.12g},{self.p_e[k]:.12g},{int(self.jumps[k-1])}\n")


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator used for all trajectory sampling."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def child_seed(master_seed: int, index: int) -> int:
    """Deterministic per-trajectory seed: first 8 bytes of sha256(master:index)."""
    digest = hashlib.sha256(f"{master_seed}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def unitary_drive(state: AtomState, omega: float, dt: float) -> AtomState:
    """Exact Rabi rotation ``exp(-i omega sigma_x dt)`` applied to the state."""
    cw = math.cos(omega * dt)
    sw = math.sin(omega * dt)
    alpha = cw * state.alpha - 1j * sw * state.beta
    beta = -1j * sw * state.alpha + cw * state.beta
    return AtomState(alpha, beta)


def _advance(alpha, beta, eps, a_bar, geff_dt, cw, sw):
    """One measurement-then-drive update on raw amplitudes."""
    p1 = (alpha.real * alpha.real + alpha.imag * alpha.imag) * geff_dt
    if p1 >= 1.0:
        raise ValueError(f"jump probability p1 = {p1:.3g} >= 1; dt_step too coarse")
    if eps < p1:
        alpha, beta = 0.0j, 1.0 + 0.0j
        jumped = True
    else:
        alpha = a_bar * alpha
        inv = 1.0 / math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        alpha *= inv
        beta *= inv
        jumped = False
    return cw * alpha - 1j * sw * beta, -1j * sw * alpha + cw * beta, jumped


def mc_step(state: AtomState, cfg: DriveConfig, a_bar_dt: complex,
            epsilon: float) -> tuple[AtomState, bool]:
    """Single Monte-Carlo update with injected randomness ``epsilon in [0, 1)``.

    Click (``epsilon < p1``): ground-state reset, then drive.  No click: the
    excited amplitude is multiplied by ``a_bar_dt``, the state renormalised,
    then driven.
    """
    cw = math.cos(cfg.omega * cfg.dt_step)
    sw = math.sin(cfg.omega * cfg.dt_step)
    alpha, beta, jumped = _advance(complex(state.alpha), complex(state.beta),
                                   epsilon, complex(a_bar_dt),
                                   cfg.gamma_eff * cfg.dt_step, cw, sw)
    return AtomState(alpha, beta), jumped


def simulate_trajectory(initial: AtomState, cfg: DriveConfig, a_bar_dt: complex,
                        seed: int) -> TrajectoryRecord:
    """Run ``cfg.n_steps`` Monte-Carlo steps from ``initial`` with a fixed seed.

    The uniform stream is drawn in one batch from the seeded generator, one
    variate per step, so identical seeds give bit-identical records.
    """
    if abs(a_bar_dt) > 1.0 + 1e-9:
        raise ValueError(f"|a_bar_dt| = {abs(a_bar_dt)!r} exceeds 1 beyond tolerance")
    eps = make_rng(seed).random(cfg.n_steps)
    cw = math.cos(cfg.omega * cfg.dt_step)
    sw = math.sin(cfg.omega * cfg.dt_step)
    geff_dt = cfg.gamma_eff * cfg.dt_step
    a_bar = complex(a_bar_dt)

    alpha, beta = complex(initial.alpha), complex(initial.beta)
    p_e = np.empty(cfg.n_steps + 1)
    jumps = np.empty(cfg.n_steps, dtype=bool)
    p_e[0] = alpha.real * alpha.real + alpha.imag * alpha.imag
    for k in range(cfg.n_steps):
        alpha, beta, jumped = _advance(alpha, beta, eps[k], a_bar, geff_dt, cw, sw)
        p_e[k + 1] = alpha.real * alpha.real + alpha.imag * alpha.imag
        jumps[k] = jumped
    return TrajectoryRecord(dt_step=cfg.dt_step, p_e=p_e, jumps=jumps, seed=seed)


@dataclass(frozen=True)
class EnsembleResult:
    """Index-ordered ensemble statistics of independent trajectories."""

    dt_step: float
    p_e_mean: np.ndarray
    p_e_stderr: np.ndarray
    jump_counts: np.ndarray   # per-trajectory totals, index order
    master_seed: int

    @property
    def n_traj(self) -> int:
        return len(self.jump_counts)

    @property
    def times(self) -> np.ndarray:
        return self.dt_step * np.arange(len(self.p_e_mean))

    @property
    def jump_count_mean(self) -> float:
        return float(np.mean(self.jump_counts))

    @property
    def jump_count_stderr(self) -> float:
        n = len(self.jump_counts)
        return float(np.std(self.jump_counts, ddof=1) / math.sqrt(n)) if n > 1 else 0.0

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t,p_e_mean,p_e_stderr\n")
            for t, m, s in zip(self.times, self.p_e_mean, self.p_e_stderr):
                fh.write(f"{t:.12g},{m:.12g},{s:.12g}\n")


def _trajectory_block(args):
    initial_amps, cfg, a_bar_dt, master_seed, indices = args
    initial = AtomState(*initial_amps)
    block_pe = np.empty((len(indices), cfg.n_steps + 1))
    block_counts = np.empty(len(indices), dtype=np.int64)
    for row, idx in enumerate(indices):
        rec = simulate_trajectory(initial, cfg, a_bar_dt, child_seed(master_seed, idx))
        block_pe[row] = rec.p_e
        block_counts[row] = rec.jump_count
    return block_pe, block_counts


def run_ensemble(initial: AtomState, cfg: DriveConfig, a_bar_dt: complex,
                 n_traj: int, master_seed: int, n_jobs: int = 1) -> EnsembleResult:
    """Simulate ``n_traj`` seeded trajectories and reduce them by index.

    Trajectory ``i`` always runs from ``child_seed(master_seed, i)``, and the
    per-trajectory occupations are assembled into an index-ordered matrix
    before averaging, so the statistics are identical for any ``n_jobs`` and
    any execution order.
    """
    if n_traj < 1:
        raise ValueError(f"n_traj must be >= 1, got {n_traj}")
    indices = np.arange(n_traj)
    if n_jobs <= 1 or n_traj < 4:
        blocks = [_trajectory_block(((initial.alpha, initial.beta), cfg, a_bar_dt,
                                     master_seed, indices))]
    else:
        chunks = np.array_split(indices, min(n_jobs, n_traj))
        payload = [((initial.alpha, initial.beta), cfg, a_bar_dt, master_seed, chunk)
                   for chunk in chunks]
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            blocks = list(pool.map(_trajectory_block, payload))

    p_e = np.concatenate([b[0] for b in blocks], axis=0)
    counts = np.concatenate([b[1] for b in blocks])
    mean = p_e.mean(axis=0)
    if n_traj > 1:
        stderr = p_e.std(axis=0, ddof=1) / math.sqrt(n_traj)
    else:
        stderr = np.zeros_like(mean)
    return EnsembleResult(dt_step=cfg.dt_step, p_e_mean=mean, p_e_stderr=stderr,
                          jump_counts=counts, master_seed=master_seed)


def ensemble_average(initial: AtomState, cfg: DriveConfig, a_bar_dt: complex,
                     n_traj: int, master_seed: int, n_jobs: int = 1) -> np.ndarray:
    """Mean excited-state occupation over a seeded ensemble."""
    return run_ensemble(initial, cfg, a_bar_dt, n_traj, master_seed, n_jobs).p_e_mean


def make_drive_config(gamma_x: complex, omega: float, t_max: float,
                      tau: float | None = None) -> tuple[DriveConfig, complex]:
    """Build a step layout from the effective rate ``gamma(x)`` of the model.

    The step obeys ``dt_step = min(0.05/Re gamma(x), 0.05/omega)`` (and is
    additionally floored to an integer multiple of ``tau`` when a detection
    interval is supplied, as required by memory-resolved contractions).
    Returns the config together with the scaling-form contraction
    ``a_bar(dt_step) = exp(-gamma(x) dt_step / 2)``.
    """
    if t_max <= 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    bounds = [t_max]
    if gamma_x.real > 0:
        bounds.append(MAX_RATE_DT / gamma_x.real)
    if omega != 0:
        bounds.append(MAX_RATE_DT / abs(omega))
    dt = min(bounds)
    if tau is not None:
        if tau <= 0:
            raise ValueError(f"tau must be positive, got {tau}")
        if tau > dt:
            raise ValueError(f"tau = {tau} exceeds the admissible step {dt:.3g}")
        dt = math.floor(dt / tau) * tau
    n_steps = max(1, int(round(t_max / dt)))
    a_bar = complex(np.exp(-0.5 * gamma_x * dt))
    cfg = DriveConfig(omega=omega, gamma_eff=_gamma_eff_of(a_bar, dt),
                      dt_step=dt, n_steps=n_steps)
    return cfg, a_bar


def a_bar_from_memory(kernel: MemoryKernel, tau: float, n_intervals: int,
                      steps_per_interval: int = 400) -> complex:
    """Memory-resolved contraction over ``dt = n_intervals * tau``.

    Solves the full Volterra dynamics across one detection interval and
    raises ``a(tau)`` to the number of intervals per step; preferred over the
    scaling form when the bandwidth is narrow and the step not short.
    """
    if n_intervals < 1:
        raise ValueError(f"n_intervals must be >= 1, got {n_intervals}")
    series = solve_decay(kernel, t_max=tau, dt=tau / steps_per_interval)
    return null_conditioned_power(complex(series.values[-1]), n_intervals)
