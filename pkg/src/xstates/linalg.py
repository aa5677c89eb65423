"""Small dense Hermitian primitives: closed-form 2x2, oracle-grade 4x4."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._tolerances import DEFAULT_TOLERANCES

__all__ = [
    "Hermitian2",
    "NotHermitianError",
    "EigenSolverError",
    "eig2",
    "eig2_values",
    "su2_from_angles",
    "angles_from_block",
    "eig4",
    "eig4_batch",
    "as_hermitian4",
    "kron2",
    "commutator",
]


class NotHermitianError(ValueError):
    pass


class EigenSolverError(RuntimeError):
    """Raised when the 4x4 eigensolver fails to converge."""


@dataclass(frozen=True)
class Hermitian2:
    """2x2 Hermitian matrix ``[[a, b], [conj(b), c]]``.

    Only the upper triangle is stored, so Hermiticity holds by construction.
    """

    a: float
    c: float
    b: complex = 0j

    def __post_init__(self):
        vals = (self.a, self.c, complex(self.b).real, complex(self.b).imag)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite entry in {self!r}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "b", complex(self.b))

    def to_array(self) -> np.ndarray:
        return np.array(
            [[self.a, self.b], [self.b.conjugate(), self.c]], dtype=complex
        )


def su2_from_angles(phi: float, psi: float) -> np.ndarray:
    """Return ``exp(i psi/2 sigma_z) @ exp(i phi/2 sigma_y)``.

    This is the coset chart used for the blockwise diagonalizers; the result
    is special unitary for every real ``phi``, ``psi``.
    """
    c, s = math.cos(phi / 2), math.sin(phi / 2)
    e = cmath.exp(0.5j * psi)
    return np.array([[e * c, e * s], [-s / e, c / e]], dtype=complex)


def angles_from_block(a, c, b):
    """Chart angles ``(phi, psi)`` of the diagonalizer of ``[[a, b], [b*, c]]``.

    ``phi`` lies in ``[0, pi]`` and ``psi`` in ``[0, 2 pi)``. A block with
    ``b == 0`` gets ``psi = 0``; a scalar block gets ``phi = psi = 0``.
    Vectorised over array inputs.
    """
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    b = np.asarray(b, dtype=complex)
    phi = np.arctan2(2.0 * np.abs(b), a - c)
    psi = np.where(np.abs(b) > 0, np.mod(np.angle(-b), 2 * np.pi), 0.0)
    # mod can round a tiny negative angle up to exactly 2*pi
    psi = np.where(psi >= 2 * np.pi, 0.0, psi)
    if phi.ndim == 0:
        return float(phi), float(psi)
    return phi, psi


def eig2_values(a, c, b):
    """Closed-form eigenvalues ``(e_plus, e_minus)``, vectorised."""
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    mean = 0.5 * (a + c)
    radius = np.hypot(0.5 * (a - c), np.abs(np.asarray(b)))
    return mean + radius, mean - radius


def eig2(m: Hermitian2) -> tuple[float, float, np.ndarray]:
    """Eigendecomposition of a 2x2 Hermitian matrix in closed form.

    Returns ``(e_plus, e_minus, U)`` with ``e_plus >= e_minus`` and ``U``
    special unitary such that ``m = U diag(e_plus, e_minus) U^dagger``. The
    columns of ``U`` are built from the ``(phi, psi)`` chart of
    :func:`angles_from_block`, so a scalar matrix yields ``U = I``.

    Examples
    --------
    >>> e1, e2, U = eig2(Hermitian2(0.5, 0.5, 0.5))
    >>> round(e1, 12), round(e2, 12)
    (1.0, 0.0)
    """
    e_plus, e_minus = eig2_values(m.a, m.c, m.b)
    phi, psi = angles_from_block(m.a, m.c, m.b)
    return float(e_plus), float(e_minus), su2_from_angles(phi, psi)


def as_hermitian4(m, tol: float = DEFAULT_TOLERANCES.structural) -> np.ndarray:
    """Validate and return ``m`` as a finite 4x4 complex Hermitian array."""
    arr = np.asarray(m, dtype=complex)
    if arr.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains NaN or Inf")
    dev = np.max(np.abs(arr - arr.conj().T))
    if dev > tol:
        raise NotHermitianError(f"max |M - M^dagger| = {dev:.3e} exceeds {tol:g}")
    return arr


def eig4_batch(m) -> np.ndarray:
    """Descending eigenvalues of a stack of Hermitian 4x4 matrices.

    Uses LAPACK's Hermitian driver on the dense matrices, without exploiting
    any X-structure, so it can act as an independent oracle.
    """
    arr = np.asarray(m, dtype=complex)
    try:
        w = np.linalg.eigvalsh(arr)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"Hermitian eigensolver did not converge: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise EigenSolverError("Hermitian eigensolver returned non-finite values")
    return w[..., ::-1]


def eig4(m) -> tuple[float, float, float, float]:
    """Eigenvalues of a Hermitian 4x4 matrix in descending order."""
    arr = as_hermitian4(m)
    return tuple(float(v) for v in eig4_batch(arr))


def kron2(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 matrices; the first factor is qubit 1."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.einsum("ij,kl->ikjl", a, b).reshape(4, 4)


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a
