"""Shared random-matrix constructions."""

import numpy as np

from .errors import ValidationError


def ginibre(dim: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    The R diagonal is phase-normalized, which makes the distribution exactly
    invariant rather than QR-convention dependent.
    """
    if dim < 1:
        raise ValidationError(f"dimension must be >= 1, got {dim}")
    q, r = np.linalg.qr(ginibre(dim, rng))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_special_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform SO(dim) element: QR of a real Gaussian, sign fix, det correction."""
    if dim < 1:
        raise ValidationError(f"dimension must be >= 1, got {dim}")
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.sign(np.diagonal(r))
    if np.linalg.det(q) < 0:
        q = q.copy()
        q[:, 0] = -q[:, 0]
    return q
