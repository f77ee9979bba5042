"""Tomography resource analysis for a vectorized generator.

Answers two questions about a given generator: how many distinct
observables are needed to pin down an unknown initial state (the maximum
geometric multiplicity over the spectrum, called the index of cyclicity
here), and how many measurement instants per observable can ever be needed
(the degree of the generator's minimal polynomial).  A concrete observable
set is adequate when the union of its Krylov subspaces under the dual
generator spans the whole real space of hermitian matrices; this module
verifies that spanning condition and searches for passing sets by seeded
random sampling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NumericalFailure, SearchExhausted, ValidationError
from .lindblad import Superoperator
from .operator_algebra import (
    DEFAULT_TOLERANCES,
    ToleranceConfig,
    assert_hermitian,
    eigenvalues,
    hermitian_basis,
    is_hermitian,
    kernel_dim,
    minimal_polynomial,
    random_hermitian,
    unvec,
    vec,
)

__all__ = [
    "EigenvalueCluster",
    "SpectralReport",
    "MeasurementBudget",
    "VerificationResult",
    "spectral_report",
    "measurement_budget",
    "krylov_subspace",
    "verify_observables",
    "find_observables",
]


class EigenvalueCluster(NamedTuple):
    value: complex
    algebraic_multiplicity: int
    geometric_multiplicity: int


@dataclass(frozen=True)
class SpectralReport:
    """Distinct eigenvalues with multiplicities plus the derived resource counts.

    ``eta`` is the maximum geometric multiplicity (minimal number of
    distinct observables), ``mu`` the minimal-polynomial degree (upper
    bound on instants per observable), ``measurement_budget`` their
    product, and ``static_observable_count`` the dim^2 - 1 observables a
    dynamics-blind reconstruction would need instead.
    """

    dim: int
    distinct_eigenvalues: tuple[EigenvalueCluster, ...]
    eta: int
    mu: int
    min_poly: np.ndarray
    static_observable_count: int
    measurement_budget: int


class MeasurementBudget(NamedTuple):
    eta: int
    mu: int
    total: int


class VerificationResult(NamedTuple):
    ok: bool
    achieved_rank: int


def _cluster_eigenvalues(values: np.ndarray, tol: ToleranceConfig,
                         norm_scale: float) -> list[tuple[complex, int]]:
    """Single-linkage grouping of near-coincident eigenvalues.

    Two values join the same cluster when they are within
    ``eig_cluster_rtol * (1 + max(|a|, |b|)) * max(1, norm_scale)`` of each
    other; exact multiplicities then come back as cluster sizes.
    """
    n = len(values)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    scale = max(1.0, norm_scale)
    for i in range(n):
        for j in range(i + 1, n):
            radius = tol.eig_cluster_rtol * (1.0 + max(abs(values[i]), abs(values[j]))) * scale
            if abs(values[i] - values[j]) <= radius:
                parent[find(i)] = find(j)

    groups: dict[int, list[complex]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(complex(values[i]))
    clusters = [(complex(np.mean(members)), len(members)) for members in groups.values()]
    clusters.sort(key=lambda c: (-c[0].real, c[0].imag))
    return clusters


def spectral_report(gen: Superoperator, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> SpectralReport:
    """Cluster the spectrum, count multiplicities and derive the resource bounds.

    Geometric multiplicities are numerical kernel dimensions of
    ``gen - lambda*I`` at each clustered eigenvalue, so the report is
    meaningful for defective generators as well.
    """
    mat = gen.matrix
    n2 = mat.shape[0]
    eigs = eigenvalues(mat)
    norm_scale = float(np.linalg.norm(mat)) if mat.size else 0.0
    clusters = _cluster_eigenvalues(eigs, tol, norm_scale)

    ident = np.eye(n2, dtype=complex)
    distinct = tuple(
        EigenvalueCluster(
            value=value,
            algebraic_multiplicity=count,
            geometric_multiplicity=kernel_dim(mat - value * ident, tol),
        )
        for value, count in clusters
    )
    eta = max(c.geometric_multiplicity for c in distinct)
    min_poly = minimal_polynomial(mat, tol)
    mu = len(min_poly) - 1
    return SpectralReport(
        dim=gen.dim,
        distinct_eigenvalues=distinct,
        eta=eta,
        mu=mu,
        min_poly=min_poly,
        static_observable_count=gen.dim * gen.dim - 1,
        measurement_budget=eta * mu,
    )


def measurement_budget(report: SpectralReport) -> MeasurementBudget:
    """(eta, mu, eta*mu): observables, instants per observable, total readouts."""
    return MeasurementBudget(report.eta, report.mu, report.eta * report.mu)


def krylov_subspace(gen: Superoperator, observable, depth: int) -> list[np.ndarray]:
    """[Q, L*Q, ..., (L*)^(depth-1) Q] under the dual generator L*.

    The dual generator is the Hilbert-Schmidt adjoint of ``gen``, i.e. the
    conjugate transpose of its matrix acting on vectorized operators.  For
    trace-preserving dissipative dynamics it maps hermitian matrices to
    hermitian matrices, which is re-checked on every element.
    """
    q = assert_hermitian(observable, name="observable")
    if q.shape != (gen.dim, gen.dim):
        raise ValidationError(f"observable has shape {q.shape}, expected ({gen.dim}, {gen.dim})")
    if depth < 1:
        raise ValidationError(f"Krylov depth must be >= 1, got {depth}")

    adjoint = gen.matrix.conj().T
    elements = [q]
    current = vec(q)
    for step in range(1, depth):
        current = adjoint @ current
        element = unvec(current, gen.dim)
        if not is_hermitian(element, atol=1e-10):
            dev = float(np.abs(element - element.conj().T).max())
            raise NumericalFailure(
                f"Krylov element {step} is not hermitian (deviation {dev:.3e}); "
                "the dual generator does not preserve hermiticity"
            )
        elements.append(element)
    return elements


def _coordinate_rows(gen: Superoperator, observables: Sequence[np.ndarray],
                     depth: int) -> np.ndarray:
    """Real coordinates of every Krylov element in the hermitian basis, one per row."""
    n = gen.dim
    basis_stack = np.stack([vec(b) for b in hermitian_basis(n)])
    rows = []
    for q in observables:
        for element in krylov_subspace(gen, q, depth):
            rows.append((basis_stack.conj() @ vec(element)).real)
    return np.array(rows)


def verify_observables(gen: Superoperator, observables: Sequence[np.ndarray],
                       tol: ToleranceConfig = DEFAULT_TOLERANCES) -> VerificationResult:
    """Test whether the observables' Krylov subspaces span all hermitian matrices.

    Stacks the real basis coordinates of every Krylov element (depth = the
    minimal-polynomial degree of ``gen``) and computes the numerical rank;
    the set reconstructs arbitrary states iff that rank reaches dim^2.
    Rows are normalized before the rank test so that elements of very
    different magnitude cannot mask each other.
    """
    if len(observables) == 0:
        raise ValidationError("observable set must contain at least one observable")
    depth = len(minimal_polynomial(gen.matrix, tol)) - 1
    rows = _coordinate_rows(gen, observables, depth)
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    rows = rows / norms
    sigma = np.linalg.svd(rows, compute_uv=False)
    achieved = int(np.sum(sigma > tol.rank_rtol * sigma[0])) if sigma.size else 0
    n2 = gen.dim * gen.dim
    return VerificationResult(ok=achieved == n2, achieved_rank=achieved)


def find_observables(gen: Superoperator, tol: ToleranceConfig = DEFAULT_TOLERANCES,
                     seed: int = 0, max_attempts: int = 100) -> list[np.ndarray]:
    """Search for a passing observable set of minimal size by seeded sampling.

    Draws ``eta`` random hermitian matrices per attempt (complex Gaussian
    entries, symmetrized) and returns the first set that passes
    :func:`verify_observables`.  Deterministic for a fixed seed.  Raises
    :class:`SearchExhausted` with the best achieved rank when every
    attempt fails.
    """
    report = spectral_report(gen, tol)
    rng = np.random.default_rng(seed)
    best_rank = 0
    for _ in range(max_attempts):
        candidate = [random_hermitian(gen.dim, rng) for _ in range(report.eta)]
        ok, achieved = verify_observables(gen, candidate, tol)
        if ok:
            return candidate
        best_rank = max(best_rank, achieved)
    raise SearchExhausted(
        f"no passing observable set in {max_attempts} attempts "
        f"(best spanning rank {best_rank} of {gen.dim * gen.dim} needed, "
        f"eta={report.eta}, seed={seed})",
        attempts=max_attempts,
        best_rank=best_rank,
    )
