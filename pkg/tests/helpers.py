"""Shared test utilities: seeded random inputs with exact arithmetic."""

import numpy as np

from semiq import DensityMatrix, OperatorMatrix, Polynomial


def random_polynomial(rng, mode_count, max_degree, n_terms=6, integer=True):
    """Random polynomial; integer (Gaussian-integer) coefficients keep the
    bracket algebra exact in double precision."""
    terms = {}
    for _ in range(n_terms):
        while True:
            key = tuple(int(e) for e in rng.integers(0, max_degree + 1, size=2 * mode_count))
            if sum(key) <= max_degree:
                break
        if integer:
            coeff = complex(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
        else:
            coeff = complex(rng.standard_normal(), rng.standard_normal())
        if coeff != 0:
            terms[key] = terms.get(key, 0) + coeff
    return Polynomial(mode_count, {k: c for k, c in terms.items() if c != 0})


def random_hermitian(rng, dim, scale=1.0):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return OperatorMatrix(scale * (g + g.conj().T) / 2.0)


def random_operator(rng, dim, scale=1.0):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return OperatorMatrix(scale * g)


def random_density_operator(rng, dim):
    """Positive unit-trace matrix as a plain OperatorMatrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return OperatorMatrix(rho / np.trace(rho).real)


def random_density(rng, dim):
    return DensityMatrix(random_density_operator(rng, dim))
