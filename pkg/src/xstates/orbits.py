"""Orbits of the X-state invariance group.

Tangent vectors, the Gram matrix and its closed-form spectrum, orbit-type
classification and the blockwise diagonalization ``rho = W D W^dagger``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._tolerances import DEFAULT_TOLERANCES, Tolerances
from .linalg import angles_from_block, eig2_values, su2_from_angles
from .state import (
    HVector,
    XState,
    dense_to_rows,
    from_dense,
    h_coefficients,
)
from .su4 import ALPHA_X, P_PI, alpha_element

__all__ = [
    "GRAM_SCALE",
    "OrbitKind",
    "KIND_BY_CODE",
    "OrbitClass",
    "OrderedSpectrum",
    "DiagonalizingFrame",
    "tangent_vectors",
    "gram",
    "gram_batch",
    "mu_values",
    "mu_values_rows",
    "block_spectra_rows",
    "classify_orbit",
    "classify_by_spectrum",
    "classify_rows",
    "orbit_dimension",
    "diagonalize",
    "diagonalize_rows",
    "frame_unitary",
    "frame_unitary_batch",
    "reconstruct",
    "spectral_diagonal",
    "compose_dense",
    "compose_rows",
    "xstate_from_spectrum",
    "is_block_phase_form",
    "as_rows",
]

# G_kl = GRAM_SCALE * (1/2) Tr(t_k t_l). With Tr(lambda_j lambda_k) = -delta_jk
# the bare half-trace gives eigenvalues mu/8; the factor 8 matches the
# closed-form mu values (fixed on the Bell state, where mu1 = 4).
GRAM_SCALE = 8.0

_ALPHA_STACK = np.stack([alpha_element(k) for k, _ in ALPHA_X])


class OrbitKind(str, enum.Enum):
    """Orbit types by which 2x2 blocks have degenerate spectra.

    ``MAXIMALLY_MIXED_0D`` is the fixed-point set: both blocks scalar, i.e.
    ``rho = I/4 + c sigma_z (x) sigma_z`` for ``|c| <= 1/4``. The label
    keeps the name of its best known member.
    """

    GENERIC_4D = "Generic4D"
    DEGENERATE_UPPER_2D = "DegenerateUpper2D"
    DEGENERATE_LOWER_2D = "DegenerateLower2D"
    MAXIMALLY_MIXED_0D = "MaximallyMixed0D"

    @property
    def isotropy_dim(self) -> int:
        return _ISOTROPY[self]

    @property
    def orbit_dim(self) -> int:
        return 7 - _ISOTROPY[self]


_ISOTROPY = {
    OrbitKind.GENERIC_4D: 3,
    OrbitKind.DEGENERATE_UPPER_2D: 5,
    OrbitKind.DEGENERATE_LOWER_2D: 5,
    OrbitKind.MAXIMALLY_MIXED_0D: 7,
}


@dataclass(frozen=True)
class OrbitClass:
    kind: OrbitKind
    marginal: bool = False

    @property
    def isotropy_dim(self) -> int:
        return self.kind.isotropy_dim

    @property
    def orbit_dim(self) -> int:
        return self.kind.orbit_dim


@dataclass(frozen=True)
class OrderedSpectrum:
    """Eigenvalues ``(r1, r2)`` of the upper block and ``(r3, r4)`` of the
    lower block, each pair in descending order."""

    r1: float
    r2: float
    r3: float
    r4: float

    def __post_init__(self):
        for name in ("r1", "r2", "r3", "r4"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def as_array(self) -> np.ndarray:
        return np.array([self.r1, self.r2, self.r3, self.r4])

    def in_simplex(self, tol: float = DEFAULT_TOLERANCES.structural) -> bool:
        r = self.as_array()
        return bool(
            abs(r.sum() - 1.0) <= tol
            and np.all(r >= -tol)
            and np.all(r <= 1.0 + tol)
            and self.r2 <= self.r1 + tol
            and self.r4 <= self.r3 + tol
        )

    def check(self, tol: float = DEFAULT_TOLERANCES.structural) -> "OrderedSpectrum":
        if not self.in_simplex(tol):
            raise ValueError(f"{self} is not in the partially ordered simplex")
        return self


@dataclass(frozen=True)
class DiagonalizingFrame:
    """Angles of ``W = P_pi (e^{i omega} U (+) e^{-i omega} V) P_pi`` with
    ``U = e^{i psi1 sz/2} e^{i phi1 sy/2}`` and ``V`` likewise."""

    phi1: float
    psi1: float
    phi2: float
    psi2: float
    omega: float = 0.0


def tangent_vectors(x: XState) -> np.ndarray:
    """``[a_k, rho]`` for the seven subalgebra elements, in listing order."""
    rho = x.to_dense()
    return _ALPHA_STACK @ rho - rho @ _ALPHA_STACK


def gram_batch(rho) -> np.ndarray:
    """Gram matrices for a stack of dense matrices, shape ``(n, 7, 7)``."""
    rho = np.asarray(rho, dtype=complex).reshape(-1, 4, 4)
    t = (np.einsum("kij,njl->nkil", _ALPHA_STACK, rho)
         - np.einsum("nij,kjl->nkil", rho, _ALPHA_STACK))
    g = 0.5 * GRAM_SCALE * np.einsum("nkij,nlji->nkl", t, t)
    return g.real


def gram(x: XState) -> np.ndarray:
    """Symmetric PSD 7x7 Gram matrix of the tangent vectors."""
    return gram_batch(x.to_dense())[0]


def mu_values(h: HVector) -> tuple[float, float]:
    """Closed-form doubly degenerate Gram eigenvalues ``(mu1, mu2)``."""
    mu1 = (h.h3 + h.h6) ** 2 + (h.h8 + h.h10) ** 2 + (h.h7 + h.h11) ** 2
    mu2 = (h.h3 - h.h6) ** 2 + (h.h8 - h.h10) ** 2 + (h.h7 - h.h11) ** 2
    return mu1, mu2


def _h_rows(rows) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    d1, d2, d3, d4, ar, ai, br, bi = rows.T
    return np.column_stack([
        -d1 - d2 + d3 + d4,
        -d1 + d2 - d3 + d4,
        -2.0 * (ar + br),
        2.0 * (ai - bi),
        2.0 * (ai + bi),
        2.0 * (br - ar),
        -d1 + d2 + d3 - d4,
    ])


def mu_values_rows(rows) -> np.ndarray:
    """``(n, 2)`` array of ``(mu1, mu2)`` for row-encoded states."""
    h3, h6, h7, h8, h10, h11, _ = _h_rows(rows).T
    mu1 = (h3 + h6) ** 2 + (h8 + h10) ** 2 + (h7 + h11) ** 2
    mu2 = (h3 - h6) ** 2 + (h8 - h10) ** 2 + (h7 - h11) ** 2
    return np.column_stack([mu1, mu2])


def block_spectra_rows(rows) -> np.ndarray:
    """``(n, 4)`` block eigenvalues ``(r1, r2, r3, r4)`` from the closed 2x2 form."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    c14 = rows[:, 4] + 1j * rows[:, 5]
    c23 = rows[:, 6] + 1j * rows[:, 7]
    r1, r2 = eig2_values(rows[:, 0], rows[:, 3], c14)
    r3, r4 = eig2_values(rows[:, 2], rows[:, 1], c23)
    return np.column_stack([r1, r2, r3, r4])


def _kind_from_gaps(gap_upper, gap_lower, tol: Tolerances):
    """Map per-block eigenvalue gaps to (kind codes, marginal flags).

    Codes: 0 generic, 1 upper degenerate, 2 lower degenerate, 3 maximally mixed.
    A gap inside ``(structural, band]`` counts as degenerate and is marginal.
    """
    gap_upper = np.asarray(gap_upper, dtype=float)
    gap_lower = np.asarray(gap_lower, dtype=float)
    up = gap_upper <= tol.band
    lo = gap_lower <= tol.band
    code = np.where(up & lo, 3, np.where(up, 1, np.where(lo, 2, 0)))
    marginal = ((up & (gap_upper > tol.structural))
                | (lo & (gap_lower > tol.structural)))
    return code, marginal


KIND_BY_CODE = (
    OrbitKind.GENERIC_4D,
    OrbitKind.DEGENERATE_UPPER_2D,
    OrbitKind.DEGENERATE_LOWER_2D,
    OrbitKind.MAXIMALLY_MIXED_0D,
)


def classify_rows(rows, tol: Tolerances = DEFAULT_TOLERANCES, route: str = "mu"):
    """Vectorised classification; returns ``(codes, marginal)``.

    ``route="mu"`` uses the Gram eigenvalues (block gap ``sqrt(mu)/2``);
    ``route="spectrum"`` uses the block eigenvalue splittings directly.
    """
    if route == "mu":
        mu = mu_values_rows(rows)
        gaps = 0.5 * np.sqrt(mu)
    elif route == "spectrum":
        r = block_spectra_rows(rows)
        gaps = np.column_stack([r[:, 0] - r[:, 1], r[:, 2] - r[:, 3]])
    else:
        raise ValueError(f"unknown route {route!r}")
    return _kind_from_gaps(gaps[:, 0], gaps[:, 1], tol)


def classify_orbit(x: XState, tol: Tolerances = DEFAULT_TOLERANCES) -> OrbitClass:
    """Orbit type from the vanishing pattern of ``(mu1, mu2)``.

    ``mu1 = 0`` means a degenerate upper block, ``mu2 = 0`` a degenerate lower
    block, both the maximally mixed point.
    """
    code, marginal = classify_rows(x.to_row(), tol, route="mu")
    return OrbitClass(KIND_BY_CODE[int(code[0])], bool(marginal[0]))


def classify_by_spectrum(x: XState, tol: Tolerances = DEFAULT_TOLERANCES) -> OrbitClass:
    """Same classification read off the block spectra instead of the Gram matrix."""
    code, marginal = classify_rows(x.to_row(), tol, route="spectrum")
    return OrbitClass(KIND_BY_CODE[int(code[0])], bool(marginal[0]))


def orbit_dimension(x: XState, tol: float = DEFAULT_TOLERANCES.spectral) -> int:
    """Numerical rank of the Gram matrix."""
    w = np.linalg.eigvalsh(gram(x))
    return int(np.sum(w > tol))


def diagonalize_rows(rows):
    """Vectorised blockwise diagonalization.

    Returns ``(spectra, angles)`` where ``spectra`` is ``(n, 4)`` and
    ``angles`` is ``(n, 4)`` ordered ``phi1, psi1, phi2, psi2``.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    c14 = rows[:, 4] + 1j * rows[:, 5]
    rho32 = rows[:, 6] - 1j * rows[:, 7]
    phi1, psi1 = angles_from_block(rows[:, 0], rows[:, 3], c14)
    phi2, psi2 = angles_from_block(rows[:, 2], rows[:, 1], rho32)
    return block_spectra_rows(rows), np.column_stack([phi1, psi1, phi2, psi2])


def diagonalize(x: XState) -> tuple[OrderedSpectrum, DiagonalizingFrame]:
    """Blockwise diagonalization ``rho = W (diag(r1, r2) (+) diag(r3, r4)) W^dagger``.

    Each block is diagonalized by the closed-form 2x2 solver; eigenvalues
    within a block come out in descending order, which places the spectrum
    in the partially ordered simplex. Degenerate blocks get the identity
    frame. The central phase ``omega`` is pure gauge and set to zero.

    Examples
    --------
    >>> from xstates.state import BELL_PHI_PLUS
    >>> r, frame = diagonalize(BELL_PHI_PLUS)
    >>> r.as_array().round(12).tolist(), round(frame.phi1, 12)
    ([1.0, 0.0, 0.0, 0.0], 1.570796326795)
    """
    spectra, angles = diagonalize_rows(x.to_row())
    phi1, psi1, phi2, psi2 = (float(v) for v in angles[0])
    return OrderedSpectrum(*spectra[0]), DiagonalizingFrame(phi1, psi1, phi2, psi2)


def frame_unitary(frame: DiagonalizingFrame) -> np.ndarray:
    b = np.zeros((4, 4), dtype=complex)
    b[:2, :2] = np.exp(1j * frame.omega) * su2_from_angles(frame.phi1, frame.psi1)
    b[2:, 2:] = np.exp(-1j * frame.omega) * su2_from_angles(frame.phi2, frame.psi2)
    return P_PI @ b @ P_PI


def _su2_batch(phi, psi) -> np.ndarray:
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    e = np.exp(0.5j * psi)
    out = np.empty(np.shape(phi) + (2, 2), dtype=complex)
    out[..., 0, 0] = e * c
    out[..., 0, 1] = e * s
    out[..., 1, 0] = -s / e
    out[..., 1, 1] = c / e
    return out


def frame_unitary_batch(angles, omega=0.0) -> np.ndarray:
    """``W`` for an ``(n, 4)`` array of ``phi1, psi1, phi2, psi2``."""
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    omega = np.broadcast_to(np.asarray(omega, dtype=float), angles.shape[:1])
    n = angles.shape[0]
    b = np.zeros((n, 4, 4), dtype=complex)
    b[:, :2, :2] = np.exp(1j * omega)[:, None, None] * _su2_batch(angles[:, 0], angles[:, 1])
    b[:, 2:, 2:] = np.exp(-1j * omega)[:, None, None] * _su2_batch(angles[:, 2], angles[:, 3])
    return P_PI @ b @ P_PI


# Dense positions of (r1, r2, r3, r4): the diagonal factor lives in the
# block frame, so in the computational basis it reads diag(r1, r4, r3, r2).
_DIAG_ORDER = np.array([0, 3, 2, 1])


def spectral_diagonal(spectra) -> np.ndarray:
    """Dense-frame diagonal ``P_pi diag(r1, r2, r3, r4) P_pi`` as vectors."""
    return np.atleast_2d(np.asarray(spectra, dtype=float))[:, _DIAG_ORDER]


def compose_dense(spectra, angles, omega=0.0) -> np.ndarray:
    """``W D W^dagger`` for stacks of spectra and angles, ``D`` in the block frame."""
    diag = spectral_diagonal(spectra).astype(complex)
    w = frame_unitary_batch(angles, omega)
    return np.einsum("nij,nj,nkj->nik", w, diag, w.conj())


def compose_rows(spectra, angles) -> np.ndarray:
    """Row encoding of ``W diag(r) W^dagger`` from the 2x2 closed forms."""
    r = np.atleast_2d(np.asarray(spectra, dtype=float))
    a = np.atleast_2d(np.asarray(angles, dtype=float))
    phi1, psi1, phi2, psi2 = a.T
    s_up, d_up = 0.5 * (r[:, 0] + r[:, 1]), 0.5 * (r[:, 0] - r[:, 1])
    s_lo, d_lo = 0.5 * (r[:, 2] + r[:, 3]), 0.5 * (r[:, 2] - r[:, 3])
    c14 = -d_up * np.sin(phi1) * np.exp(1j * psi1)
    rho32 = -d_lo * np.sin(phi2) * np.exp(1j * psi2)
    return np.column_stack([
        s_up + d_up * np.cos(phi1),
        s_lo - d_lo * np.cos(phi2),
        s_lo + d_lo * np.cos(phi2),
        s_up - d_up * np.cos(phi1),
        c14.real, c14.imag,
        rho32.real, -rho32.imag,
    ])


def reconstruct(spectrum: OrderedSpectrum, frame: DiagonalizingFrame) -> np.ndarray:
    w = frame_unitary(frame)
    diag = spectral_diagonal(spectrum.as_array())[0].astype(complex)
    return w @ np.diag(diag) @ w.conj().T


def xstate_from_spectrum(spectrum, phi1: float, phi2: float, psi1: float = 0.0,
                         psi2: float = 0.0,
                         tol: Tolerances = DEFAULT_TOLERANCES) -> XState:
    """Validated X-state ``W diag(r) W^dagger`` for the given chart angles."""
    if not isinstance(spectrum, OrderedSpectrum):
        spectrum = OrderedSpectrum(*spectrum)
    spectrum.check(tol.structural)
    m = reconstruct(spectrum, DiagonalizingFrame(phi1, psi1, phi2, psi2))
    return from_dense(m, tol)


def is_block_phase_form(w, tol: float = DEFAULT_TOLERANCES.structural) -> bool:
    """True if ``P_pi W P_pi`` is block diagonal with special unitary blocks
    up to opposite phases ``e^{+i omega}``, ``e^{-i omega}``."""
    b = P_PI @ np.asarray(w, dtype=complex) @ P_PI
    if np.max(np.abs(b[:2, 2:])) > tol or np.max(np.abs(b[2:, :2])) > tol:
        return False
    u, v = b[:2, :2], b[2:, 2:]
    eye = np.eye(2)
    if (np.max(np.abs(u @ u.conj().T - eye)) > tol
            or np.max(np.abs(v @ v.conj().T - eye)) > tol):
        return False
    du, dv = np.linalg.det(u), np.linalg.det(v)
    # det(e^{iw} U) = e^{2iw}, det(e^{-iw} V) = e^{-2iw}
    return bool(abs(du * dv - 1.0) <= tol and abs(abs(du) - 1.0) <= tol)


def as_rows(states) -> np.ndarray:
    """Stack ``XState`` objects (or pass through an array) as ``(n, 8)`` rows."""
    if isinstance(states, XState):
        return states.to_row()[None, :]
    if isinstance(states, np.ndarray) and states.ndim == 3:
        return dense_to_rows(states)
    if not isinstance(states, np.ndarray):
        states = list(states)
        if states and isinstance(states[0], XState):
            return np.stack([s.to_row() for s in states])
    return np.atleast_2d(np.asarray(states, dtype=float))
