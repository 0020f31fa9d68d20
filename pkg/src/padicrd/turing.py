"""Linear stability and diffusion-driven (Turing) instability analysis.

Around a steady state with Jacobian J and diffusivity pair (eps, eps*d),
a spatial eigenvalue kappa of the diffusion generator feeds the growth
polynomial

    lam^2 - ((1 + d)*eps*kappa + tr J) * lam + h(kappa) = 0,
    h(kappa) = eps^2 * d * kappa^2 + eps * kappa * (d*f_u + g_v) + det J.

A mode destabilizes exactly when h(kappa) < 0, which opens an interval
(kappa_1, kappa_2) of unstable spatial eigenvalues once d exceeds the
critical ratio d_c.  The verdict per function space intersects that band
with the spectrum available at the requested refinement level.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .kinetics import KineticsModel, steady_state
from .network import NetworkEmbedding, refine
from .operators import build_full_level, build_graph_laplacian
from .spectra import eig_symmetric, spectrum_infinity

__all__ = [
    "LinearStability",
    "CriticalDiffusion",
    "Band",
    "ModeStatus",
    "SpaceVerdict",
    "TuringReport",
    "linear_stability",
    "h_kappa",
    "critical_diffusion",
    "instability_band",
    "dispersion",
    "turing_check",
]

_BOUNDARY_GUARD = 1e-12
_ZERO_MODE_TOL = 1e-9

LEVEL_NOTE = (
    "levels above the embedding level include the per-ball degree eigenvalues "
    "in their computed spectra; the verdict follows those numbers"
)


def _unpack(J) -> tuple[float, float, float, float]:
    J = np.asarray(J, dtype=float)
    if J.shape != (2, 2) or not np.isfinite(J).all():
        raise ValueError("expected a finite 2x2 Jacobian")
    return J[0, 0], J[0, 1], J[1, 0], J[1, 1]


@dataclass(frozen=True)
class LinearStability:
    trace: float
    det: float
    t1: bool
    t2: bool
    roots: tuple[complex, complex]

    @property
    def stable(self) -> bool:
        return self.t1 and self.t2


def linear_stability(J) -> LinearStability:
    """Diffusion-free stability of the steady state: roots of the Jacobian."""
    fu, fv, gu, gv = _unpack(J)
    trace = fu + gv
    det = fu * gv - fv * gu
    disc = trace * trace - 4.0 * det
    sq = cmath.sqrt(disc)
    roots = (0.5 * (trace + sq), 0.5 * (trace - sq))
    return LinearStability(trace=trace, det=det, t1=trace < 0.0, t2=det > 0.0, roots=roots)


def h_kappa(J, eps: float, d: float, kappa: float) -> float:
    """The constant term of the growth polynomial at spatial eigenvalue kappa."""
    fu, fv, gu, gv = _unpack(J)
    det = fu * gv - fv * gu
    return eps * eps * d * kappa * kappa + eps * kappa * (d * fu + gv) + det


@dataclass(frozen=True)
class CriticalDiffusion:
    """Critical diffusivity ratio and the raw quadratic roots it came from."""

    value: float | None
    roots: tuple[float, ...]


def critical_diffusion(J) -> CriticalDiffusion:
    """Smallest positive root beyond which the instability band stays open.

    The candidate values are the real roots of
    ``f_u^2 d^2 + 2(2 f_v g_u - f_u g_v) d + g_v^2 = 0``; the returned
    root d* is the smallest positive one such that every d > d* keeps
    both ``(d f_u + g_v)^2 > 4 d det J`` and ``d f_u + g_v > 0``.
    """
    fu, fv, gu, gv = _unpack(J)
    if fu == 0.0:
        raise ValueError("critical diffusion is undefined for f_u = 0 (degenerate quadratic)")
    a = fu * fu
    b = 2.0 * (2.0 * fv * gu - fu * gv)
    c = gv * gv
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return CriticalDiffusion(value=None, roots=())
    sq = math.sqrt(disc)
    r1, r2 = sorted(((-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)))
    for root in (r1, r2):
        if root <= 0.0:
            continue
        opens_for_all_larger_d = root >= r2 - _BOUNDARY_GUARD
        t3_from_root_on = fu > 0.0 and root * fu + gv >= -_BOUNDARY_GUARD
        if opens_for_all_larger_d and t3_from_root_on:
            return CriticalDiffusion(value=root, roots=(r1, r2))
    return CriticalDiffusion(value=None, roots=(r1, r2))


@dataclass(frozen=True)
class Band:
    """Open interval (kappa1, kappa2) of unstable spatial eigenvalues."""

    kappa1: float
    kappa2: float
    kappa_peak: float | None = None

    def contains(self, kappa: float) -> bool:
        return self.kappa1 + _BOUNDARY_GUARD < kappa < self.kappa2 - _BOUNDARY_GUARD

    def is_marginal(self, kappa: float) -> bool:
        return (
            abs(kappa - self.kappa1) <= _BOUNDARY_GUARD
            or abs(kappa - self.kappa2) <= _BOUNDARY_GUARD
        )


def instability_band(J, eps: float, d: float) -> Band | None:
    """Zeros of h(kappa), or None when no negative-eigenvalue band opens.

    ``kappa_peak`` marks where the growth rate is maximal within the
    band (reported only when the critical ratio exists).
    """
    if eps <= 0 or d <= 0:
        raise ValueError("eps and d must be positive")
    fu, fv, gu, gv = _unpack(J)
    det = fu * gv - fv * gu
    q = d * fu + gv
    disc = q * q - 4.0 * d * det
    if q <= 0.0 or disc <= 0.0:
        return None
    sq = math.sqrt(disc)
    kappa1 = -(q + sq) / (2.0 * d * eps)
    kappa2 = -(q - sq) / (2.0 * d * eps)
    crit = critical_diffusion(J)
    peak = None
    if crit.value is not None:
        peak = -q / (2.0 * eps * crit.value)
    return Band(kappa1=kappa1, kappa2=kappa2, kappa_peak=peak)


def dispersion(J, eps: float, d: float, kappa: float) -> tuple[complex, complex]:
    """Both growth-rate roots at spatial eigenvalue kappa (plus root first)."""
    fu, fv, gu, gv = _unpack(J)
    trace = fu + gv
    b = (1.0 + d) * eps * kappa + trace
    c = h_kappa(J, eps, d, kappa)
    sq = cmath.sqrt(b * b - 4.0 * c)
    lam_a = 0.5 * (b + sq)
    lam_b = 0.5 * (b - sq)
    if lam_a.real >= lam_b.real:
        return lam_a, lam_b
    return lam_b, lam_a


@dataclass(frozen=True)
class ModeStatus:
    kappa: float
    lam_plus: complex
    unstable: bool
    marginal: bool


@dataclass(frozen=True)
class SpaceVerdict:
    space: str
    modes: tuple[ModeStatus, ...]
    pattern: bool
    annotation: str | None = None

    def unstable_kappas(self) -> list[float]:
        return [m.kappa for m in self.modes if m.unstable]


@dataclass(frozen=True)
class TuringReport:
    """All instability diagnostics for one (model, eps, d, embedding) setup."""

    steady: tuple[float, float]
    jacobian: tuple[tuple[float, float], tuple[float, float]]
    trace: float
    det: float
    conditions: dict[str, tuple[bool, float]]
    critical: CriticalDiffusion
    band: Band | None
    spaces: tuple[SpaceVerdict, ...]
    eps: float
    d: float
    finite_subset_of_infinity: bool | None = None
    gradient_check: tuple[bool, bool] | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def turing_unstable(self) -> bool:
        flags = [ok for ok, _ in self.conditions.values()]
        return all(flags) and any(s.pattern for s in self.spaces)

    def to_document(self) -> dict:
        return {
            "eps": self.eps,
            "d": self.d,
            "steady_state": list(self.steady),
            "jacobian": [list(r) for r in self.jacobian],
            "trace": self.trace,
            "det": self.det,
            "conditions": {
                name: {"holds": ok, "value": value}
                for name, (ok, value) in self.conditions.items()
            },
            "critical_diffusion": {
                "value": self.critical.value,
                "quadratic_roots": list(self.critical.roots),
            },
            "band": None
            if self.band is None
            else {
                "kappa1": self.band.kappa1,
                "kappa2": self.band.kappa2,
                "kappa_peak": self.band.kappa_peak,
            },
            "spaces": [
                {
                    "space": s.space,
                    "pattern": s.pattern,
                    "annotation": s.annotation,
                    "modes": [
                        {
                            "kappa": m.kappa,
                            "lambda_plus_re": m.lam_plus.real,
                            "lambda_plus_im": m.lam_plus.imag,
                            "unstable": m.unstable,
                            "marginal": m.marginal,
                        }
                        for m in s.modes
                    ],
                }
                for s in self.spaces
            ],
            "finite_levels_subset_of_infinity": self.finite_subset_of_infinity,
            "gradient_nonvanishing_at_steady": None
            if self.gradient_check is None
            else list(self.gradient_check),
            "notes": list(self.notes),
        }


def _space_modes(embedding: NetworkEmbedding, level) -> tuple[str, list[float], str | None]:
    """Distinct non-zero spectral values for one requested space."""
    N = embedding.N
    if level == "infinity":
        spec = spectrum_infinity(embedding)
        return "infinity", spec.unique_values(), None
    M = int(level)
    if M == N:
        spec = eig_symmetric(build_graph_laplacian(embedding), source="graph")
        label = f"level {M}"
        note = None
    else:
        spec = eig_symmetric(build_full_level(refine(embedding, M)), source="level_computed")
        label = f"level {M}"
        note = LEVEL_NOTE
    values = [v for v in spec.unique_values() if abs(v) > _ZERO_MODE_TOL]
    return label, values, note


def turing_check(
    model: KineticsModel,
    eps: float,
    d: float,
    embedding: NetworkEmbedding,
    levels=("N", "infinity"),
    guess: tuple[float, float] | None = None,
) -> TuringReport:
    """Evaluate the instability conditions and per-space pattern verdicts.

    ``levels`` lists the spaces to adjudicate: integers M >= N for
    refinement levels, the string "N" for the embedding level, and
    "infinity" for the continuum.
    """
    embedding.graph.require_spectral()
    steady = steady_state(model, guess=guess)
    J = np.asarray(model.jacobian(*steady), dtype=float)
    fu, fv, gu, gv = _unpack(J)
    lin = linear_stability(J)
    q = d * fu + gv
    t5_value = q * q - 4.0 * d * lin.det
    conditions = {
        "T1": (lin.t1, lin.trace),
        "T2": (lin.t2, lin.det),
        "T3": (q > 0.0, q),
        "T4": (fu * gv < 0.0, fu * gv),
        "T5": (t5_value > 0.0, t5_value),
    }
    crit = critical_diffusion(J)
    band = instability_band(J, eps, d)

    verdicts: list[SpaceVerdict] = []
    infinity_unstable: set[float] | None = None
    finite_unstable: list[list[float]] = []
    for level in levels:
        if level == "N":
            level = embedding.N
        label, kappas, note = _space_modes(embedding, level)
        modes = []
        for kappa in kappas:
            lam_plus, _ = dispersion(J, eps, d, kappa)
            unstable = band is not None and band.contains(kappa)
            marginal = band is not None and band.is_marginal(kappa)
            modes.append(ModeStatus(kappa=kappa, lam_plus=lam_plus,
                                    unstable=unstable, marginal=marginal))
        pattern = any(m.unstable for m in modes)
        verdict = SpaceVerdict(space=label, modes=tuple(modes), pattern=pattern,
                               annotation=note)
        verdicts.append(verdict)
        if level == "infinity":
            infinity_unstable = set(verdict.unstable_kappas())
        else:
            finite_unstable.append(verdict.unstable_kappas())

    subset_flag = None
    if infinity_unstable is not None:
        subset_flag = all(
            any(abs(k - ki) <= 1e-8 for ki in infinity_unstable)
            for ks in finite_unstable
            for k in ks
        )

    notes = []
    if any(v.annotation for v in verdicts):
        notes.append(LEVEL_NOTE)
    return TuringReport(
        steady=steady,
        jacobian=((fu, fv), (gu, gv)),
        trace=lin.trace,
        det=lin.det,
        conditions=conditions,
        critical=crit,
        band=band,
        spaces=tuple(verdicts),
        eps=eps,
        d=d,
        finite_subset_of_infinity=subset_flag,
        gradient_check=model.gradients_nonvanishing_at(*steady),
        notes=tuple(notes),
    )
