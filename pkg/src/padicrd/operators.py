"""Construction of the diffusion operator hierarchy as dense matrices.

All operators share one coupling kernel: the piecewise-constant density
on the ball domain that takes the value p**N * A[J, K] on the product of
the vertex balls J and K.  Integrating that kernel against indicator
functions of level-M sub-balls gives every matrix below; exact ball
volumes (p**-M per sub-ball) make the entries exact rationals scaled
into floats.

Matrix kinds
------------
graph_laplacian   A - diag(degrees), the level-N generator
full_level        p**(N-M) * A[J, I] - degree(I) * delta(sites), level M
replica_block     p**(N-M) * A - diag(degrees), one n x n block
replica_full      block-diagonal stack of p**(M-N) replica blocks
scaled_lambda     full_level off-diagonal, diagonal scaled by -lambda
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .network import LevelGrid, NetworkEmbedding
from .padic import PAdicCode

__all__ = [
    "OperatorMatrix",
    "ScaledParams",
    "kernel_eval",
    "build_graph_laplacian",
    "build_full_level",
    "build_replica_block",
    "build_replica_full",
    "build_scaled_lambda",
    "semigroup_exp",
    "project",
    "operator_to_document",
    "operator_to_csv",
]


@dataclass(frozen=True)
class OperatorMatrix:
    """A dense real operator matrix tagged with its construction."""

    kind: str
    level: int
    p: int
    N: int
    entries: np.ndarray
    lam: float | None = None
    epsilon_applied: bool = False

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("operator entries must form a square matrix")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        return bool(np.abs(self.entries - self.entries.T).max() <= tol)

    def offdiagonal(self) -> np.ndarray:
        out = self.entries.copy()
        np.fill_diagonal(out, 0.0)
        return out

    def diagonal(self) -> np.ndarray:
        return np.diag(self.entries).copy()


@dataclass(frozen=True)
class ScaledParams:
    """A point (epsilon, lambda) of the admissible scaling family.

    epsilon > 0 is the diffusivity, lambda >= 1 the loss-term scale; the
    family is closed under (epsilon, lambda) -> (sigma*epsilon,
    lambda/sigma) for sigma in (0, 1].
    """

    epsilon: float
    lam: float = 1.0

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.lam < 1:
            raise ValueError("lambda must be >= 1 for membership in the scaling family")

    def scaled(self, sigma: float) -> "ScaledParams":
        """Act by sigma in (0, 1]; the result stays in the family."""
        if not 0 < sigma <= 1:
            raise ValueError("sigma must lie in (0, 1]")
        return ScaledParams(sigma * self.epsilon, self.lam / sigma)


def kernel_eval(grid: LevelGrid, x_site: int, y_site: int) -> float:
    """Coupling density between two grid sites: p**N * A[J, K].

    J and K are the vertices whose balls contain the two sites; the
    density is constant on products of vertex balls.
    """
    dim = grid.dim
    if not (0 <= x_site < dim and 0 <= y_site < dim):
        raise ValueError(f"site index out of range for a {dim}-site grid")
    vx = grid.site_vertex
    A = grid.embedding.graph.adjacency
    return float(grid.p**grid.N * A[vx[x_site], vx[y_site]])


def build_graph_laplacian(embedding: NetworkEmbedding) -> OperatorMatrix:
    """A - diag(degrees): entry (J, I) is A[J, I] - degree(I)*delta(J, I)."""
    A = embedding.graph.adjacency.astype(float)
    entries = A - np.diag(embedding.degrees.astype(float))
    return OperatorMatrix(
        kind="graph_laplacian", level=embedding.N, p=embedding.p, N=embedding.N,
        entries=entries,
    )


def _site_expanded(grid: LevelGrid) -> tuple[np.ndarray, np.ndarray]:
    """Adjacency and degree vector expanded to the site indexing."""
    vx = grid.site_vertex
    A = grid.embedding.graph.adjacency.astype(float)
    degrees = grid.embedding.degrees.astype(float)
    return A[np.ix_(vx, vx)], degrees[vx]


def build_full_level(grid: LevelGrid) -> OperatorMatrix:
    """The level-M generator: p**(N-M) * A[J, I] - degree(I) on the diagonal.

    At M = N this degenerates to the graph Laplacian; for M > N the
    cross-ball coupling is diluted by the sub-ball volume ratio while
    the loss term keeps the full vertex degree.
    """
    scale = float(grid.p) ** (grid.N - grid.M)
    A_big, deg_big = _site_expanded(grid)
    entries = scale * A_big - np.diag(deg_big)
    return OperatorMatrix(
        kind="full_level", level=grid.M, p=grid.p, N=grid.N, entries=entries,
    )


def build_replica_block(embedding: NetworkEmbedding, M: int) -> OperatorMatrix:
    """One n x n block of the proposed replica decomposition at level M:

    p**(N-M) * (A - p**(M-N) * diag(degrees)).
    """
    if M < embedding.N:
        raise ValueError("replica level must satisfy M >= N")
    scale = float(embedding.p) ** (embedding.N - M)
    A = embedding.graph.adjacency.astype(float)
    entries = scale * A - np.diag(embedding.degrees.astype(float))
    return OperatorMatrix(
        kind="replica_block", level=M, p=embedding.p, N=embedding.N, entries=entries,
    )


def build_replica_full(embedding: NetworkEmbedding, M: int) -> OperatorMatrix:
    """Block-diagonal matrix holding p**(M-N) copies of the replica block."""
    block = build_replica_block(embedding, M)
    copies = embedding.p ** (M - embedding.N)
    entries = np.kron(np.eye(copies), block.entries)
    return OperatorMatrix(
        kind="replica_full", level=M, p=embedding.p, N=embedding.N, entries=entries,
    )


def build_scaled_lambda(grid: LevelGrid, lam: float) -> OperatorMatrix:
    """Level-M generator with the loss term scaled by lambda.

    Off-diagonal entries match the plain level-M generator; the diagonal
    is -lambda * degree(I).  Values lambda < 1 are accepted with a
    warning: positivity of the associated semigroup is only guaranteed
    for lambda >= 1.
    """
    if lam < 1:
        warnings.warn(
            f"lambda = {lam} < 1 leaves the regime where the semigroup is "
            "guaranteed positive; positivity checks are skipped",
            stacklevel=2,
        )
    scale = float(grid.p) ** (grid.N - grid.M)
    A_big, deg_big = _site_expanded(grid)
    entries = scale * A_big - lam * np.diag(deg_big)
    return OperatorMatrix(
        kind="scaled_lambda", level=grid.M, p=grid.p, N=grid.N, entries=entries, lam=lam,
    )


def semigroup_exp(op: OperatorMatrix, eps: float, t: float) -> np.ndarray:
    """exp(t * eps * op): eigendecomposition when symmetric, else Pade.

    For symmetric generators the eigenpath keeps the result symmetric
    and reproducible; the asymmetric fallback is scaling-and-squaring
    with Pade approximation.
    """
    if t < 0:
        raise ValueError("the semigroup is only defined for t >= 0")
    entries = op.entries
    if not np.isfinite(entries).all():
        raise ValueError("operator matrix has non-finite entries")
    if t == 0.0:
        return np.eye(op.dim)
    if op.is_symmetric():
        w, Q = np.linalg.eigh(entries)
        return (Q * np.exp(t * eps * w)) @ Q.T
    import scipy.linalg

    return scipy.linalg.expm(t * eps * entries)


def project(grid: LevelGrid, samples) -> np.ndarray:
    """Sample a function at the grid's ball-center codes (the projection P).

    ``samples`` is either a callable on :class:`PAdicCode` or a mapping
    keyed by (vertex, offset) pairs or by code integer values; one value
    per site is required.  Idempotent on vectors already at this level.
    """
    values = np.empty(grid.dim)
    if callable(samples):
        for s, code in enumerate(grid.codes):
            values[s] = float(samples(code))
        return values
    for s, ((vertex, offset), code) in enumerate(zip(grid.sites(), grid.codes)):
        if (vertex, offset) in samples:
            values[s] = float(samples[(vertex, offset)])
        elif code.value in samples:
            values[s] = float(samples[code.value])
        else:
            raise ValueError(f"no sample for site (vertex={vertex}, offset={offset})")
    return values


def project_code_values(grid: LevelGrid, func) -> np.ndarray:
    """Convenience wrapper: evaluate ``func`` on each site code."""
    return project(grid, func)


def operator_to_document(op: OperatorMatrix) -> dict:
    doc = {
        "kind": op.kind,
        "level": op.level,
        "p": op.p,
        "N": op.N,
        "entries": [[float(x) for x in row] for row in op.entries],
    }
    if op.lam is not None:
        doc["lambda"] = float(op.lam)
    return doc


def operator_to_csv(op: OperatorMatrix, path) -> None:
    """Row-major CSV dump at full (17 significant digit) precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in op.entries:
            writer.writerow([format(x, ".17g") for x in row])
