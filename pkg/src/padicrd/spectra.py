"""Exact spectra of the operator hierarchy and oscillating eigenvectors.

The level-N generator has the graph-Laplacian spectrum.  Refining to
level M adds, for every vertex ball, p**(M-N) - 1 independent zero-mean
directions on which the generator acts as minus the vertex degree; the
full operator on the continuous domain therefore has the non-zero
spectrum {nonzero Laplacian eigenvalues} together with {-degree(I)}.
The zero-mean eigenvectors are realized explicitly as complex
oscillating vectors supported on single balls (Kozyrev-style wavelets).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import LevelGrid, NetworkEmbedding
from .operators import OperatorMatrix, build_graph_laplacian
from .padic import PAdicCode, ball_contains, character_eval, fractional_part_scaled, refine_ball

__all__ = [
    "SpectrumReport",
    "WaveletVector",
    "eig_symmetric",
    "spectrum_infinity",
    "spectrum_level_predicted",
    "kozyrev_wavelet",
    "wavelet_family",
]

_SYM_TOL = 1e-12
_ZERO_TOL = 1e-9


@dataclass(frozen=True)
class SpectrumReport:
    """Sorted eigenvalue multiset, optionally with orthonormal eigenvectors.

    ``source`` records which construction produced the values:
    ``graph``, ``level_predicted``, ``level_computed``, ``infinity_predicted``
    or ``matrix``.  For predicted infinite-domain spectra, ``note`` flags
    that each vertex's degree eigenvalue carries countably many
    independent eigenvectors (p - 1 per sub-ball per refinement level).
    """

    source: str
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None
    residual_max: float | None = None
    note: str | None = None

    def __post_init__(self) -> None:
        vals = np.sort(np.asarray(self.eigenvalues, dtype=float))
        vals.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def grouped(self, tol: float = 1e-8) -> list[tuple[float, int]]:
        """(value, multiplicity) pairs, values ascending."""
        groups: list[tuple[float, int]] = []
        for v in self.eigenvalues:
            if groups and abs(v - groups[-1][0]) <= tol:
                groups[-1] = (groups[-1][0], groups[-1][1] + 1)
            else:
                groups.append((float(v), 1))
        return groups

    def unique_values(self, tol: float = 1e-8) -> list[float]:
        return [v for v, _ in self.grouped(tol)]

    def to_document(self) -> dict:
        doc = {
            "source": self.source,
            "eigenvalues": [
                {"value": v, "multiplicity": m} for v, m in self.grouped()
            ],
        }
        if self.residual_max is not None:
            doc["residual_max"] = float(self.residual_max)
        if self.note is not None:
            doc["note"] = self.note
        return doc


def _as_matrix(matrix) -> np.ndarray:
    if isinstance(matrix, OperatorMatrix):
        return matrix.entries
    return np.asarray(matrix, dtype=float)


def eig_symmetric(matrix, source: str = "matrix") -> SpectrumReport:
    """Eigenpairs of a symmetric matrix, ascending, deterministic signs.

    The sign convention (first component of magnitude above 1e-12 is
    positive) makes reports reproducible across runs.
    """
    A = _as_matrix(matrix)
    if A.size and np.abs(A - A.T).max() > _SYM_TOL:
        raise ValueError("matrix is not symmetric within 1e-12")
    w, Q = np.linalg.eigh(A)
    Q = Q.copy()
    for k in range(Q.shape[1]):
        col = Q[:, k]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if len(nz) and col[nz[0]] < 0:
            Q[:, k] = -col
    residual = float(np.abs(A @ Q - Q * w).max()) if A.size else 0.0
    return SpectrumReport(source=source, eigenvalues=w, eigenvectors=Q, residual_max=residual)


def _graph_spectrum(embedding: NetworkEmbedding) -> SpectrumReport:
    embedding.graph.require_spectral()
    return eig_symmetric(build_graph_laplacian(embedding), source="graph")


def spectrum_infinity(embedding: NetworkEmbedding) -> SpectrumReport:
    """Non-zero spectrum on the full continuous domain.

    Multiset union of the non-zero graph-Laplacian eigenvalues and one
    -degree(I) per vertex (zeros filtered, so an edgeless graph yields
    an empty report).  Each degree eigenvalue stands for countably many
    zero-mean eigenvectors; only membership matters for instability
    analysis.
    """
    graph_spec = _graph_spectrum(embedding)
    values = [v for v in graph_spec.eigenvalues if abs(v) > _ZERO_TOL]
    values.extend(-float(g) for g in embedding.degrees if g > 0)
    return SpectrumReport(
        source="infinity_predicted",
        eigenvalues=np.array(values, dtype=float),
        note="degree eigenvalues have infinite multiplicity on the continuum: "
        "p-1 independent zero-mean eigenvectors per sub-ball per refinement level",
    )


def spectrum_level_predicted(embedding: NetworkEmbedding, M: int) -> SpectrumReport:
    """Predicted level-M spectrum: graph spectrum plus degree eigenvalues.

    Every vertex ball contributes p**(M-N) - 1 copies of -degree(I),
    one per independent zero-mean direction inside the ball; together
    with the graph spectrum this must reproduce the computed eigenvalues
    of the level-M matrix entry by entry.
    """
    if M < embedding.N:
        raise ValueError("prediction needs M >= N")
    graph_spec = _graph_spectrum(embedding)
    extra = embedding.p ** (M - embedding.N) - 1
    values = list(graph_spec.eigenvalues)
    for g in embedding.degrees:
        values.extend([-float(g)] * extra)
    return SpectrumReport(source="level_predicted", eigenvalues=np.array(values))


@dataclass(frozen=True)
class WaveletVector:
    """Complex oscillating vector supported on one sub-ball of the grid.

    The coefficient at an in-support site x is
    ``p**(level/2) * exp(2*pi*i * frac(j * x / p**(level+1)))`` and zero
    elsewhere; the vector has zero mean over its support and is an
    eigenvector of the level-M generator with eigenvalue
    ``-degree(vertex)``.
    """

    vertex: int
    j: int
    level: int
    center: PAdicCode
    values: np.ndarray
    eigenvalue: float

    @property
    def scale(self) -> int:
        """Scale exponent r = -level in the standard wavelet indexing."""
        return -self.level

    @property
    def real(self) -> np.ndarray:
        return self.values.real.copy()

    @property
    def imag(self) -> np.ndarray:
        return self.values.imag.copy()


def kozyrev_wavelet(
    grid: LevelGrid, vertex: int, j: int, level: int | None = None, offset: int = 0
) -> WaveletVector:
    """Oscillating eigenvector supported on a (sub-)ball of one vertex.

    ``level`` is the support ball's level (default N, the whole vertex
    ball); ``offset`` selects which of the vertex's p**(level-N)
    sub-balls carries the wavelet.  Requires grid level M >= level + 1,
    since the oscillation lives one digit below the support.
    """
    p, N, M = grid.p, grid.N, grid.M
    s = N if level is None else level
    if M <= s:
        raise ValueError(
            f"a level-{s} wavelet is not representable on a level-{M} grid (need M >= {s + 1})"
        )
    if s < N:
        raise ValueError(f"support level {s} is coarser than the embedding level {N}")
    if not 1 <= j <= p - 1:
        raise ValueError(f"j must lie in [1, {p - 1}]")
    if not 0 <= vertex < grid.embedding.n:
        raise ValueError(f"vertex {vertex} out of range")
    subcenters = refine_ball(grid.embedding.codes[vertex], s)
    if not 0 <= offset < len(subcenters):
        raise ValueError(f"offset {offset} out of range for level {s}")
    center = subcenters[offset]

    amplitude = float(p) ** (s / 2.0)
    values = np.zeros(grid.dim, dtype=complex)
    for idx, code in enumerate(grid.codes):
        if ball_contains(center, s, code):
            c, sn = character_eval(fractional_part_scaled(code, j, s))
            values[idx] = amplitude * complex(c, sn)
    return WaveletVector(
        vertex=vertex,
        j=j,
        level=s,
        center=center,
        values=values,
        eigenvalue=-float(grid.embedding.degrees[vertex]),
    )


def wavelet_family(grid: LevelGrid) -> list[WaveletVector]:
    """All wavelets spanning the zero-mean complement of the vertex space.

    Per vertex ball: p**(s-N) sub-balls at each support level
    s = N .. M-1, times p-1 oscillation indices, totalling
    p**(M-N) - 1 vectors per ball.
    """
    out: list[WaveletVector] = []
    p, N, M = grid.p, grid.N, grid.M
    for vertex in range(grid.embedding.n):
        for s in range(N, M):
            for offset in range(p ** (s - N)):
                for j in range(1, p):
                    out.append(kozyrev_wavelet(grid, vertex, j, level=s, offset=offset))
    return out
