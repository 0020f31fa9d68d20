"""Time integration of the nonlinear two-species systems at any level.

The state is a pair of coefficient vectors over a refinement grid; the
dynamics couple pointwise reaction terms with the level-M diffusion
generator acting on each species (ratio d between the two
diffusivities).  Besides plain integration this module provides the
integral-iteration verifier (successive substitutions against the exact
semigroup), the level-refinement convergence study, the replica
comparison, and pattern extraction from trajectories.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .kinetics import KineticsModel, steady_state
from .network import LevelGrid, NetworkEmbedding, refine
from .operators import (
    OperatorMatrix,
    build_full_level,
    build_graph_laplacian,
    build_replica_full,
    project,
    semigroup_exp,
)
from .spectra import SpectrumReport, eig_symmetric, kozyrev_wavelet, wavelet_family

__all__ = [
    "Perturbation",
    "SimConfig",
    "SimState",
    "Trajectory",
    "IntegrationError",
    "PerturbationError",
    "initial_condition",
    "integrate",
    "picard_verify",
    "PicardResult",
    "convergence_study",
    "ConvergenceReport",
    "replica_compare",
    "ReplicaReport",
    "pattern_report",
    "PatternReport",
    "ModeSeries",
    "trajectory_to_csv",
]

_BLOWUP_NORM = 1e6


class IntegrationError(RuntimeError):
    def __init__(self, message: str, last_state: "SimState | None" = None):
        super().__init__(message)
        self.last_state = last_state


class PerturbationError(ValueError):
    pass


@dataclass(frozen=True)
class Perturbation:
    """Initial deviation from the steady state.

    kinds: ``random`` (seeded uniform in [-amplitude, amplitude] per
    site), ``eigenmode`` (amplitude times a sup-normalized graph
    eigenvector, selected by ascending-eigenvalue index), ``wavelet``
    (amplitude times the real part of an in-ball oscillating vector),
    ``function`` (amplitude times samples of a code function).
    """

    kind: str = "random"
    amplitude: float = 1e-4
    eigen_index: int | None = None
    vertex: int = 0
    j: int = 1
    level: int | None = None
    offset: int = 0
    func: object | None = None


@dataclass(frozen=True)
class SimConfig:
    M: int | None = None
    eps: float = 0.3
    d: float = 1.0
    integrator: str = "rk4"
    dt: float | None = None
    t_end: float = 1.0
    stride: int = 1
    seed: int = 0
    perturbation: Perturbation = field(default_factory=Perturbation)

    def __post_init__(self) -> None:
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be >= 0")
        if self.integrator not in ("rk4", "exponential_euler"):
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")


@dataclass(frozen=True)
class SimState:
    t: float
    u: np.ndarray
    v: np.ndarray

    def deviation(self, steady: tuple[float, float]) -> tuple[np.ndarray, np.ndarray]:
        return self.u - steady[0], self.v - steady[1]


@dataclass
class Trajectory:
    grid: LevelGrid
    config: SimConfig
    steady: tuple[float, float]
    times: np.ndarray
    us: np.ndarray
    vs: np.ndarray
    halted: str | None = None
    t_max: float | None = None

    @property
    def final(self) -> SimState:
        return SimState(float(self.times[-1]), self.us[-1].copy(), self.vs[-1].copy())

    def state(self, index: int) -> SimState:
        return SimState(float(self.times[index]), self.us[index].copy(), self.vs[index].copy())


def auto_dt(op: OperatorMatrix, eps: float, d: float) -> float:
    """min(1e-3, 0.1 / max-row-norm of the scaled diffusion blocks)."""
    row_norm = float(np.abs(op.entries).sum(axis=1).max())
    scaled = eps * max(1.0, d) * row_norm
    if scaled <= 0:
        return 1e-3
    return min(1e-3, 0.1 / scaled)


def _mesh(config: SimConfig, op: OperatorMatrix) -> tuple[float, int]:
    """Effective step and step count: dt is snapped to divide t_end."""
    dt = config.dt if config.dt is not None else auto_dt(op, config.eps, config.d)
    if config.t_end == 0.0:
        return dt, 0
    n = max(1, round(config.t_end / dt))
    return config.t_end / n, n


def initial_condition(model: KineticsModel, config: SimConfig, grid: LevelGrid) -> SimState:
    """Steady state plus the configured perturbation, kept inside the box."""
    u0, v0 = steady_state(model)
    if not model.in_box(u0, v0):
        raise PerturbationError("steady state lies outside the validity box")
    pert = config.perturbation
    dim = grid.dim
    amp = pert.amplitude

    if pert.kind == "random":
        rng = np.random.default_rng(config.seed)
        eta_u = rng.uniform(-amp, amp, dim)
        eta_v = rng.uniform(-amp, amp, dim)
    elif pert.kind == "eigenmode":
        if pert.eigen_index is None:
            raise PerturbationError("eigenmode perturbation needs eigen_index")
        spec = eig_symmetric(build_graph_laplacian(grid.embedding), source="graph")
        phi = spec.eigenvectors[:, pert.eigen_index]
        phi_big = np.repeat(phi, grid.sites_per_ball)
        phi_big = phi_big / np.abs(phi_big).max()
        eta_u = amp * phi_big
        eta_v = amp * phi_big
    elif pert.kind == "wavelet":
        wav = kozyrev_wavelet(grid, pert.vertex, pert.j, level=pert.level, offset=pert.offset)
        shape = wav.real
        shape = shape / np.abs(shape).max()
        eta_u = amp * shape
        eta_v = amp * shape
    elif pert.kind == "function":
        if pert.func is None:
            raise PerturbationError("function perturbation needs func")
        shape = project(grid, pert.func)
        eta_u = amp * shape
        eta_v = amp * shape
    else:
        raise PerturbationError(f"unknown perturbation kind {pert.kind!r}")

    u = u0 + eta_u
    v = v0 + eta_v
    if not model.in_box(u, v):
        raise PerturbationError("perturbed initial state leaves the validity box")
    return SimState(0.0, u, v)


def integrate(
    model: KineticsModel,
    op_u: OperatorMatrix,
    op_v: OperatorMatrix,
    config: SimConfig,
    grid: LevelGrid,
    state0: SimState | None = None,
) -> Trajectory:
    """Advance the coupled system to t_end with a fixed step.

    ``rk4`` is the classical 4th-order scheme on the full right-hand
    side; ``exponential_euler`` applies the exact diffusion propagator
    over each step and adds dt times the reaction.  Integration halts
    early (recording why and when) if the state norm passes 1e6 or the
    state leaves the validity box; non-finite values raise.
    """
    steady = steady_state(model)
    if state0 is None:
        state0 = initial_condition(model, config, grid)
    dt, n_steps = _mesh(config, op_u)
    eps, d = config.eps, config.d
    Lu = op_u.entries
    Lv = op_v.entries

    def rhs_u(u, v):
        return model.f(u, v) + eps * (Lu @ u)

    def rhs_v(u, v):
        return model.g(u, v) + eps * d * (Lv @ v)

    if config.integrator == "exponential_euler":
        Eu = semigroup_exp(op_u, eps, dt)
        Ev = semigroup_exp(op_v, eps * d, dt)

    u = state0.u.astype(float).copy()
    v = state0.v.astype(float).copy()
    times = [0.0]
    us = [u.copy()]
    vs = [v.copy()]
    halted = None
    t_max = None

    for k in range(1, n_steps + 1):
        if config.integrator == "rk4":
            k1u, k1v = rhs_u(u, v), rhs_v(u, v)
            u2, v2 = u + 0.5 * dt * k1u, v + 0.5 * dt * k1v
            k2u, k2v = rhs_u(u2, v2), rhs_v(u2, v2)
            u3, v3 = u + 0.5 * dt * k2u, v + 0.5 * dt * k2v
            k3u, k3v = rhs_u(u3, v3), rhs_v(u3, v3)
            u4, v4 = u + dt * k3u, v + dt * k3v
            k4u, k4v = rhs_u(u4, v4), rhs_v(u4, v4)
            u = u + (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
            v = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        else:
            reaction_u = model.f(u, v)
            reaction_v = model.g(u, v)
            u = Eu @ u + dt * reaction_u
            v = Ev @ v + dt * reaction_v
        t = k * dt

        if not (np.isfinite(u).all() and np.isfinite(v).all()):
            last = SimState(times[-1], us[-1], vs[-1])
            raise IntegrationError(f"non-finite state at t = {t:.6g}", last_state=last)
        record = (k % config.stride == 0) or (k == n_steps)
        sup = max(np.abs(u).max(), np.abs(v).max())
        if sup > _BLOWUP_NORM or not model.in_box(u, v):
            halted = "norm" if sup > _BLOWUP_NORM else "box"
            t_max = t
            record = True
        if record:
            times.append(t)
            us.append(u.copy())
            vs.append(v.copy())
        if halted:
            break

    return Trajectory(
        grid=grid,
        config=config,
        steady=steady,
        times=np.array(times),
        us=np.array(us),
        vs=np.array(vs),
        halted=halted,
        t_max=t_max,
    )


@dataclass(frozen=True)
class PicardResult:
    deviation: float
    increments: tuple[float, ...]
    dt: float
    n_steps: int

    @property
    def contracting(self) -> bool:
        return all(b < a for a, b in zip(self.increments, self.increments[1:]))


def picard_verify(
    model: KineticsModel,
    op_u: OperatorMatrix,
    op_v: OperatorMatrix,
    config: SimConfig,
    K: int = 8,
    grid: LevelGrid | None = None,
    state0: SimState | None = None,
) -> PicardResult:
    """Successive-substitution check of the integral (mild) formulation.

    Iterate k+1 maps the whole mesh through

        u(t) = e^(eps t L) u(0) + integral_0^t e^(eps (t-s) L) f(u_k, v_k)(s) ds

    (and the d-scaled analogue for v), with the convolution evaluated by
    composite trapezoid using exact one-step propagators.  Returns the
    sup-distance between the K-th iterate and the time-stepped
    trajectory, plus the successive-iterate increments.
    """
    if K < 1:
        raise ValueError("need at least one iteration")
    if grid is None:
        raise ValueError("picard_verify needs the grid")
    if state0 is None:
        state0 = initial_condition(model, config, grid)
    dt, n = _mesh(config, op_u)
    if n == 0:
        raise ValueError("t_end must be positive for the integral iteration")
    eps, d = config.eps, config.d
    Eu = semigroup_exp(op_u, eps, dt)
    Ev = semigroup_exp(op_v, eps * d, dt)

    dim = grid.dim
    hom_u = np.empty((n + 1, dim))
    hom_v = np.empty((n + 1, dim))
    hom_u[0], hom_v[0] = state0.u, state0.v
    for m in range(n):
        hom_u[m + 1] = Eu @ hom_u[m]
        hom_v[m + 1] = Ev @ hom_v[m]

    # iterate 1 is the constant-in-time initial state
    u_k = np.tile(state0.u, (n + 1, 1))
    v_k = np.tile(state0.v, (n + 1, 1))
    increments: list[float] = []
    for _ in range(K):
        Fu = np.empty((n + 1, dim))
        Fv = np.empty((n + 1, dim))
        for m in range(n + 1):
            Fu[m] = model.f(u_k[m], v_k[m])
            Fv[m] = model.g(u_k[m], v_k[m])
        conv_u = np.zeros((n + 1, dim))
        conv_v = np.zeros((n + 1, dim))
        for m in range(n):
            conv_u[m + 1] = Eu @ (conv_u[m] + 0.5 * dt * Fu[m]) + 0.5 * dt * Fu[m + 1]
            conv_v[m + 1] = Ev @ (conv_v[m] + 0.5 * dt * Fv[m]) + 0.5 * dt * Fv[m + 1]
        u_next = hom_u + conv_u
        v_next = hom_v + conv_v
        inc = max(np.abs(u_next - u_k).max(), np.abs(v_next - v_k).max())
        increments.append(float(inc))
        u_k, v_k = u_next, v_next

    if len(increments) >= 2 and increments[-1] > increments[0]:
        raise IntegrationError(
            f"integral iteration is not contracting on [0, {config.t_end}]: "
            f"increments {increments}"
        )

    stepped = integrate(
        model, op_u, op_v, replace(config, dt=dt, stride=1), grid, state0=state0
    )
    deviation = max(
        np.abs(stepped.us - u_k).max(), np.abs(stepped.vs - v_k).max()
    )
    return PicardResult(
        deviation=float(deviation), increments=tuple(increments), dt=dt, n_steps=n
    )


@dataclass(frozen=True)
class ConvergenceReport:
    levels: tuple[int, ...]
    finest: int
    gaps: tuple[float, ...]
    t_end: float
    dt: float

    def non_increasing(self, slack: float = 0.05) -> bool:
        return all(
            later <= earlier * (1.0 + slack) + 1e-15
            for earlier, later in zip(self.gaps, self.gaps[1:])
        )

    def to_document(self) -> dict:
        return {
            "levels": list(self.levels),
            "finest_level": self.finest,
            "gaps": list(self.gaps),
            "t_end": self.t_end,
            "dt": self.dt,
        }


def _expand(states: np.ndarray, copies: int) -> np.ndarray:
    """Embed level-M coefficient rows into a finer grid by repetition."""
    return np.repeat(states, copies, axis=1)


def convergence_study(
    model: KineticsModel,
    embedding: NetworkEmbedding,
    datum,
    M_list,
    config: SimConfig,
) -> ConvergenceReport:
    """Gap between each level's run and the finest run sampled at its sites.

    ``datum`` is a function on ball-address codes (use
    :func:`padicrd.padic.digit_weight` for a genuinely non-locally-constant
    choice); each level starts from steady + amplitude * samples.  All
    levels share the time mesh of the finest level; gap(M) is the sup
    over recorded times and finest-grid sites of the distance between
    the level-M run (embedded by repetition) and the finest run, so at
    t_end = 0 it reduces to the projection error of the datum.
    """
    M_list = sorted(int(M) for M in M_list)
    if M_list[0] < embedding.N:
        raise ValueError("all levels must satisfy M >= N")
    finest = M_list[-1]
    u0, v0 = steady_state(model)
    amp = config.perturbation.amplitude

    grids = {M: refine(embedding, M) for M in M_list}
    ops = {M: build_full_level(grids[M]) for M in M_list}
    dt = config.dt if config.dt is not None else auto_dt(ops[finest], config.eps, config.d)

    runs = {}
    for M in M_list:
        grid = grids[M]
        shape = project(grid, datum)
        state0 = SimState(0.0, u0 + amp * shape, v0 + amp * shape)
        if not model.in_box(state0.u, state0.v):
            raise PerturbationError(f"scaled datum leaves the validity box at level {M}")
        cfg = replace(config, M=M, dt=dt)
        runs[M] = integrate(model, ops[M], ops[M], cfg, grid, state0=state0)
        if runs[M].halted:
            raise IntegrationError(f"level {M} run halted ({runs[M].halted})")

    fine = runs[finest]
    m_fine = grids[finest].sites_per_ball
    gaps = []
    for M in M_list:
        coarse = runs[M]
        copies = m_fine // grids[M].sites_per_ball
        k = min(len(coarse.times), len(fine.times))
        du = np.abs(_expand(coarse.us[:k], copies) - fine.us[:k]).max() if k else 0.0
        dv = np.abs(_expand(coarse.vs[:k], copies) - fine.vs[:k]).max() if k else 0.0
        gaps.append(float(max(du, dv)))
    return ConvergenceReport(
        levels=tuple(M_list), finest=finest, gaps=tuple(gaps),
        t_end=config.t_end, dt=dt,
    )


@dataclass(frozen=True)
class ReplicaReport:
    M: int
    eps: float
    spectrum_full: SpectrumReport
    spectrum_replica: SpectrumReport
    spectra_match: bool
    identification_supported: bool
    max_trajectory_distance: float
    diag_matches: bool
    max_diag_diff: float
    max_offdiag_diff: float
    offdiag_scale: float

    def to_document(self) -> dict:
        return {
            "level": self.M,
            "eps": self.eps,
            "spectrum_full_level": self.spectrum_full.to_document(),
            "spectrum_replica_stack": self.spectrum_replica.to_document(),
            "spectra_match": self.spectra_match,
            "identification_supported": self.identification_supported,
            "max_trajectory_distance": self.max_trajectory_distance,
            "scaled_block_vs_level_N": {
                "diagonal_matches": self.diag_matches,
                "max_diagonal_difference": self.max_diag_diff,
                "max_offdiagonal_difference": self.max_offdiag_diff,
                "offdiagonal_scale_factor": self.offdiag_scale,
            },
        }


def replica_compare(
    embedding: NetworkEmbedding,
    M: int,
    eps: float,
    t_end: float = 1.0,
    samples: int = 50,
    seed: int = 0,
    initial: np.ndarray | None = None,
) -> ReplicaReport:
    """Pure-diffusion evolution under the level-M generator vs its replica stack.

    Both operators act on the same seeded initial vector through their
    exact propagators; the report carries both spectra, the trajectory
    distance, and whether the block-decomposition identification is
    numerically supported (spectra agreeing entry by entry).
    """
    if M <= embedding.N:
        raise ValueError("the replica comparison needs M > N")
    grid = refine(embedding, M)
    full = build_full_level(grid)
    stack = build_replica_full(embedding, M)
    spec_full = eig_symmetric(full, source="level_computed")
    spec_stack = eig_symmetric(stack, source="level_computed")
    match = bool(
        np.abs(spec_full.eigenvalues - spec_stack.eigenvalues).max() <= 1e-9
    )

    if initial is None:
        rng = np.random.default_rng(seed)
        initial = rng.uniform(0.0, 1.0, grid.dim)
    dist = 0.0
    for t in np.linspace(0.0, t_end, samples + 1):
        hf = semigroup_exp(full, eps, float(t)) @ initial
        hr = semigroup_exp(stack, eps, float(t)) @ initial
        dist = max(dist, float(np.abs(hf - hr).max()))

    # scaled n x n block (epsilon' = p**(N-M) eps, lambda = p**(M-N)) against
    # eps times the level-N generator: diagonals coincide, couplings are diluted
    scale = float(embedding.p) ** (embedding.N - M)
    block = build_replica_full(embedding, M).entries[: embedding.n, : embedding.n]
    level_n = build_graph_laplacian(embedding).entries
    diff = eps * block - eps * level_n
    offmask = ~np.eye(embedding.n, dtype=bool)
    max_diag = float(np.abs(np.diag(diff)).max())
    max_off = float(np.abs(diff[offmask]).max()) if embedding.n > 1 else 0.0
    return ReplicaReport(
        M=M,
        eps=eps,
        spectrum_full=spec_full,
        spectrum_replica=spec_stack,
        spectra_match=match,
        identification_supported=match,
        max_trajectory_distance=dist,
        diag_matches=max_diag <= 1e-12,
        max_diag_diff=max_diag,
        max_offdiag_diff=max_off,
        offdiag_scale=scale,
    )


@dataclass(frozen=True)
class ModeSeries:
    kind: str
    eigenvalue: float
    amplitudes: np.ndarray
    fitted_rate: float | None
    r_squared: float | None
    window_points: int


@dataclass(frozen=True)
class PatternReport:
    times: np.ndarray
    ball_means_u: np.ndarray
    ball_means_v: np.ndarray
    inter_ball_difference: float
    intra_ball_spread: float
    verdict: str
    modes: tuple[ModeSeries, ...]

    @property
    def cluster_count(self) -> int:
        return len(self.ball_means_u)

    def mode(self, eigenvalue: float, kind: str | None = None, tol: float = 1e-8) -> ModeSeries:
        for m in self.modes:
            if abs(m.eigenvalue - eigenvalue) <= tol and (kind is None or m.kind == kind):
                return m
        raise KeyError(f"no {kind or 'any'}-kind mode with eigenvalue {eigenvalue}")

    def to_document(self) -> dict:
        return {
            "verdict": self.verdict,
            "cluster_count": self.cluster_count,
            "ball_means_u": [float(x) for x in self.ball_means_u],
            "ball_means_v": [float(x) for x in self.ball_means_v],
            "inter_ball_difference": self.inter_ball_difference,
            "intra_ball_spread": self.intra_ball_spread,
            "modes": [
                {
                    "kind": m.kind,
                    "eigenvalue": m.eigenvalue,
                    "fitted_rate": m.fitted_rate,
                    "r_squared": m.r_squared,
                    "window_points": m.window_points,
                    "final_amplitude": float(m.amplitudes[-1]),
                }
                for m in self.modes
            ],
        }


def _fit_rate(times: np.ndarray, amps: np.ndarray, lo: float, hi: float):
    mask = (amps > 0) & (amps >= lo) & (amps <= hi)
    pts = int(mask.sum())
    if pts < 3 or np.ptp(times[mask]) <= 0:
        return None, None, pts
    t = times[mask]
    y = np.log(amps[mask])
    slope, intercept = np.polyfit(t, y, 1)
    fit = slope * t + intercept
    ss_res = float(((y - fit) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2, pts


def pattern_report(
    traj: Trajectory,
    model: KineticsModel,
    graph_spectrum: SpectrumReport | None = None,
) -> PatternReport:
    """Cluster statistics and per-mode growth extracted from a trajectory.

    Mode amplitudes are Euclidean norms of the deviation's projection
    onto each distinct-eigenvalue eigenspace (ball-constant graph modes,
    plus zero-mean wavelet modes when the grid is finer than the
    embedding level).  Growth rates are least-squares slopes of
    log-amplitude inside the linear window
    [10 * amplitude, 0.1 * box width].
    """
    if len(traj.times) == 0:
        raise ValueError("empty trajectory")
    grid = traj.grid
    n = grid.embedding.n
    m = grid.sites_per_ball
    u0, v0 = traj.steady

    final_u = traj.us[-1].reshape(n, m)
    final_v = traj.vs[-1].reshape(n, m)
    means_u = final_u.mean(axis=1)
    means_v = final_v.mean(axis=1)
    inter = max(np.ptp(means_u), np.ptp(means_v))
    intra = max(np.ptp(final_u, axis=1).max(), np.ptp(final_v, axis=1).max())
    clustered = inter > 100.0 * max(intra, 1e-12)
    verdict = "clustered" if clustered else "homogeneous"

    w1 = traj.us - u0
    w2 = traj.vs - v0

    if graph_spectrum is None:
        graph_spectrum = eig_symmetric(build_graph_laplacian(grid.embedding), source="graph")

    delta = traj.config.perturbation.amplitude
    lo = 10.0 * delta
    if model.box is not None:
        hi = 0.1 * (model.box[1] - model.box[0])
    else:
        hi = np.inf

    modes: list[ModeSeries] = []
    vals = graph_spectrum.eigenvalues
    Q = graph_spectrum.eigenvectors
    for value, _count in _distinct(vals):
        cols = np.nonzero(np.abs(vals - value) <= 1e-8)[0]
        basis = np.repeat(Q[:, cols], m, axis=0) / np.sqrt(m)  # orthonormal on the grid
        amp = np.sqrt(((w1 @ basis) ** 2 + (w2 @ basis) ** 2).sum(axis=1))
        rate, r2, pts = _fit_rate(traj.times, amp, lo, hi)
        modes.append(ModeSeries("graph", float(value), amp, rate, r2, pts))

    if grid.M > grid.N:
        by_eig: dict[float, list[np.ndarray]] = {}
        norm = float(grid.p) ** (grid.M / 2.0)
        for wav in wavelet_family(grid):
            by_eig.setdefault(wav.eigenvalue, []).append(wav.values / norm)
        for value, vecs in sorted(by_eig.items()):
            B = np.column_stack(vecs)
            proj1 = np.abs(w1 @ B.conj()) ** 2
            proj2 = np.abs(w2 @ B.conj()) ** 2
            amp = np.sqrt(proj1.sum(axis=1) + proj2.sum(axis=1))
            rate, r2, pts = _fit_rate(traj.times, amp, lo, hi)
            modes.append(ModeSeries("wavelet", float(value), amp, rate, r2, pts))

    return PatternReport(
        times=traj.times,
        ball_means_u=means_u,
        ball_means_v=means_v,
        inter_ball_difference=float(inter),
        intra_ball_spread=float(intra),
        verdict=verdict,
        modes=tuple(modes),
    )


def _distinct(values: np.ndarray, tol: float = 1e-8):
    out: list[tuple[float, int]] = []
    for v in values:
        if out and abs(v - out[-1][0]) <= tol:
            out[-1] = (out[-1][0], out[-1][1] + 1)
        else:
            out.append((float(v), 1))
    return out


def trajectory_to_csv(traj: Trajectory, path) -> None:
    """Columns: t, u per site, v per site, in canonical site order."""
    header = ["t"]
    header += [f"u_{v}_{c}" for v, c in traj.grid.sites()]
    header += [f"v_{v}_{c}" for v, c in traj.grid.sites()]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k, t in enumerate(traj.times):
            row = [format(t, ".17g")]
            row += [format(x, ".17g") for x in traj.us[k]]
            row += [format(x, ".17g") for x in traj.vs[k]]
            writer.writerow(row)
