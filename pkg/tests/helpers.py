"""Shared random generators and independent oracles for the test suite."""

import numpy as np

from strobe_tomo import LindbladModel, random_hermitian


def random_density(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random full-rank density matrix via a Wishart draw."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_model(n: int, rng: np.random.Generator, max_jumps: int = 3) -> LindbladModel:
    """Random model: hermitian Hamiltonian plus 0..max_jumps Gaussian channels."""
    ham = random_hermitian(n, rng)
    jumps = []
    for _ in range(int(rng.integers(0, max_jumps + 1))):
        op = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        jumps.append((float(rng.uniform(0.0, 1.5)), op))
    return LindbladModel(dim=n, hamiltonian=ham, jumps=tuple(jumps))


def cofactor_det(m: np.ndarray) -> complex:
    """Determinant by cofactor expansion; independent of LAPACK."""
    n = m.shape[0]
    if n == 1:
        return complex(m[0, 0])
    total = 0.0 + 0.0j
    for j in range(n):
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        total += (-1) ** j * m[0, j] * cofactor_det(minor)
    return total


def lindblad_rhs(model: LindbladModel, rho: np.ndarray) -> np.ndarray:
    """Direct evaluation of the master-equation right-hand side on a matrix."""
    ham = model.hamiltonian
    out = -1j * (ham @ rho - rho @ ham)
    for rate, op in model.jumps:
        opdop = op.conj().T @ op
        out = out + rate * (op @ rho @ op.conj().T - 0.5 * (opdop @ rho + rho @ opdop))
    return out


def laser_cooling_populations(gamma1: float, gamma2: float, t: float) -> np.ndarray:
    """Analytic solution of the rate equations for the start state |2><2|.

    d rho22/dt = -(g1+g2) rho22, d rho11/dt = g1 rho22, d rho33/dt = g2 rho22.
    """
    s = gamma1 + gamma2
    if s == 0:
        return np.diag([0.0, 1.0, 0.0]).astype(complex)
    decayed = np.exp(-s * t)
    return np.diag([
        (gamma1 / s) * (1.0 - decayed),
        decayed,
        (gamma2 / s) * (1.0 - decayed),
    ]).astype(complex)


def span_rank(matrices, rtol: float = 1e-9) -> int:
    """Numerical rank of the span of flattened matrices (SVD oracle)."""
    stack = np.stack([np.asarray(m, dtype=complex).reshape(-1) for m in matrices])
    sigma = np.linalg.svd(stack, compute_uv=False)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.sum(sigma > rtol * sigma[0]))
