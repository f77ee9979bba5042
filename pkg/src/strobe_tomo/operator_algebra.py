"""Dense complex matrix kernel.

All values are plain ``numpy.ndarray`` with ``complex128`` entries, kept in
row-major (C) order so that :func:`vec` is literal row-stacking.  The
routines here are the shared substrate for generator construction, spectral
analysis and reconstruction; none of them keeps internal state, so every
function is safe to call from multiple threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalFailure, ValidationError

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOLERANCES",
    "as_complex_matrix",
    "is_hermitian",
    "assert_hermitian",
    "kron",
    "vec",
    "unvec",
    "hs_inner",
    "rank",
    "kernel_dim",
    "eigenvalues",
    "expm",
    "minimal_polynomial",
    "hermitian_basis",
    "random_hermitian",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds shared by rank tests, eigenvalue clustering and
    hermiticity checks.

    Attributes
    ----------
    rank_rtol : float
        Singular values below ``rank_rtol * sigma_max`` do not count
        towards the numerical rank.
    eig_cluster_rtol : float
        Radius factor used when grouping computed eigenvalues into
        distinct values.
    hermiticity_atol : float
        Absolute floor of the hermiticity predicate.
    """

    rank_rtol: float = 1e-9
    eig_cluster_rtol: float = 1e-8
    hermiticity_atol: float = 1e-12

    def __post_init__(self):
        for name in ("rank_rtol", "eig_cluster_rtol", "hermiticity_atol"):
            value = getattr(self, name)
            if not value > 0:
                raise ValidationError(f"{name} must be strictly positive, got {value!r}")


DEFAULT_TOLERANCES = ToleranceConfig()


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a 2-D complex128 array, rejecting anything else."""
    try:
        arr = np.asarray(a, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} is not convertible to a complex matrix: {exc}") from exc
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {arr.shape}")
    return arr


def _square(a, name: str = "matrix") -> np.ndarray:
    arr = as_complex_matrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError(f"{name} must be non-empty")
    return arr


def is_hermitian(a, atol: float = DEFAULT_TOLERANCES.hermiticity_atol) -> bool:
    """Entrywise hermiticity test: max |A - A^dag| <= atol * (1 + max |A|)."""
    arr = as_complex_matrix(a)
    if arr.shape[0] != arr.shape[1]:
        return False
    scale = 1.0 + (np.abs(arr).max() if arr.size else 0.0)
    return float(np.abs(arr - arr.conj().T).max()) <= atol * scale


def assert_hermitian(a, atol: float = DEFAULT_TOLERANCES.hermiticity_atol,
                     name: str = "matrix") -> np.ndarray:
    arr = _square(a, name)
    if not is_hermitian(arr, atol):
        dev = float(np.abs(arr - arr.conj().T).max())
        raise ValidationError(f"{name} is not hermitian (max |A - A^dag| = {dev:.3e})")
    return arr


def kron(a, b) -> np.ndarray:
    """Kronecker product with block (i, j) equal to ``a[i, j] * b``."""
    return np.kron(as_complex_matrix(a, "a"), as_complex_matrix(b, "b"))


def vec(m) -> np.ndarray:
    """Row-stack a matrix into a vector: vec([[a,b],[c,d]]) = (a, b, c, d)."""
    return as_complex_matrix(m).reshape(-1)


def unvec(v, n: int) -> np.ndarray:
    """Inverse of :func:`vec` for an ``n x n`` matrix."""
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if arr.size != n * n:
        raise ValidationError(f"cannot unvec length-{arr.size} vector into a {n}x{n} matrix")
    return arr.reshape(n, n)


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product tr(A^dag B), conjugate-linear in ``a``."""
    am = as_complex_matrix(a, "a")
    bm = as_complex_matrix(b, "b")
    if am.shape != bm.shape:
        raise ValidationError(f"shape mismatch in inner product: {am.shape} vs {bm.shape}")
    return complex(np.vdot(am, bm))


def rank(m, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> int:
    """Numerical rank: singular values strictly above rank_rtol * sigma_max."""
    arr = as_complex_matrix(m)
    if arr.size == 0:
        return 0
    sigma = np.linalg.svd(arr, compute_uv=False)
    return int(np.sum(sigma > tol.rank_rtol * sigma[0]))


def kernel_dim(m, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> int:
    """Dimension of the (right) null space, ``cols - rank``."""
    arr = as_complex_matrix(m)
    return arr.shape[1] - rank(arr, tol)


def eigenvalues(m) -> np.ndarray:
    """All eigenvalues of a square matrix, with multiplicity.

    Backed by the LAPACK nonsymmetric solver (Hessenberg reduction followed
    by shifted QR).  Non-convergence is reported, never silently truncated.
    """
    arr = _square(m)
    try:
        return np.linalg.eigvals(arr)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(
            f"eigenvalue iteration did not converge for a {arr.shape[0]}x{arr.shape[1]} matrix: {exc}"
        ) from exc


def expm(m) -> np.ndarray:
    """Matrix exponential via scaling-and-squaring with a Pade approximant."""
    return scipy.linalg.expm(_square(m))


def minimal_polynomial(m, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> np.ndarray:
    """Monic coefficients (ascending degree) of the minimal polynomial of ``m``.

    Finds the smallest ``k`` for which the flattened powers
    ``I, M, ..., M^k`` become linearly dependent, then solves for the
    dependency in the least-squares sense.  The rank-growth test works on a
    norm-scaled copy of ``m`` and uses twice-reorthogonalized Gram-Schmidt
    residuals, so defective matrices need no special casing.  Coefficients
    with magnitude below ``1e-9 * max |c|`` are snapped to zero.
    """
    arr = _square(m)
    n = arr.shape[0]
    scale = float(np.linalg.norm(arr, 2)) if arr.size else 0.0
    scaled = arr / scale if scale > 0 else arr

    flat_powers = [np.eye(n, dtype=complex).reshape(-1)]
    ortho: list[np.ndarray] = []
    power = np.eye(n, dtype=complex)
    degree = n
    for k in range(1, n + 1):
        prev = flat_powers[-1].copy()
        for _ in range(2):
            for q in ortho:
                prev -= np.vdot(q, prev) * q
        ortho.append(prev / np.linalg.norm(prev))

        power = scaled @ power
        w = power.reshape(-1)
        resid = w.copy()
        for _ in range(2):
            for q in ortho:
                resid -= np.vdot(q, resid) * q
        flat_powers.append(w)
        if np.linalg.norm(resid) <= tol.rank_rtol * np.linalg.norm(w):
            degree = k
            break

    stack = np.stack(flat_powers[:degree], axis=1)
    low, *_ = np.linalg.lstsq(stack, flat_powers[degree], rcond=None)
    coeffs = np.concatenate([-low, np.ones(1, dtype=complex)])
    if scale > 0:
        coeffs *= scale ** (degree - np.arange(degree + 1))
    coeffs[np.abs(coeffs) < 1e-9 * np.abs(coeffs).max()] = 0.0
    return coeffs


def hermitian_basis(n: int) -> list[np.ndarray]:
    """Orthonormal hermitian basis of the n x n matrices under :func:`hs_inner`.

    Returns ``n**2`` matrices: the normalized identity followed by the
    generalized Gell-Mann families (symmetric, antisymmetric, diagonal).
    Every hermitian ``H`` expands as ``sum_k hs_inner(B_k, H) * B_k`` with
    real coefficients.
    """
    if n < 2:
        raise ValidationError(f"hermitian basis needs dimension >= 2, got {n}")
    basis = [np.eye(n, dtype=complex) / np.sqrt(n)]
    for j in range(n):
        for k in range(j + 1, n):
            sym = np.zeros((n, n), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0 / np.sqrt(2.0)
            basis.append(sym)
    for j in range(n):
        for k in range(j + 1, n):
            asym = np.zeros((n, n), dtype=complex)
            asym[j, k] = -1j / np.sqrt(2.0)
            asym[k, j] = 1j / np.sqrt(2.0)
            basis.append(asym)
    for level in range(1, n):
        diag = np.zeros((n, n), dtype=complex)
        diag[:level, :level] = np.eye(level)
        diag[level, level] = -level
        basis.append(diag / np.sqrt(level * (level + 1)))
    return basis


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random hermitian matrix: complex Gaussian entries, symmetrized."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2.0
