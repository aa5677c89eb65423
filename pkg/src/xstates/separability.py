"""Separability of X-states.

Three independent routes give a verdict:

* :func:`ppt_oracle` -- dense partial transpose, eigenvalues from a general
  Hermitian solver (ground truth for two qubits);
* :func:`ppt_elementwise` -- the X-structure shortcut ``d1 d4 >= |c23|^2`` and
  ``d2 d3 >= |c14|^2``;
* :func:`ineq_spectrum_angles` -- the spectrum-plus-angles inequalities
  evaluated in the diagonalizing chart.

Plus absolute separability, the degenerate-orbit criterion and its
cross-check against the oracle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect

from ._tolerances import DEFAULT_TOLERANCES, Tolerances
from .linalg import eig2_values, eig4_batch
from .orbits import (
    OrderedSpectrum,
    compose_dense,
    compose_rows,
)
from .state import XState, rows_to_dense, werner_state

__all__ = [
    "ZETA_CRITICAL",
    "Binding",
    "verdict_from_slacks",
    "SeparabilityVerdict",
    "AbsSepVerdict",
    "OracleResult",
    "OracleDisagreement",
    "partial_transpose",
    "pt_min_eigenvalue_rows",
    "pt_min_eigenvalue_closed_rows",
    "ppt_oracle",
    "elementwise_slacks_rows",
    "ppt_elementwise",
    "spectrum_angle_slacks",
    "ineq_spectrum_angles",
    "psi_sweep_min_eigenvalues",
    "angle_independence_check",
    "absolutely_separable",
    "absolute_slacks",
    "degenerate_bound",
    "degenerate_criterion",
    "critical_ratio",
    "DegenerateCrossCheck",
    "degenerate_cross_check",
    "degenerate_discrepancy_grid",
    "werner_threshold",
]

ZETA_CRITICAL = 3.0 - 2.0 * math.sqrt(2.0)


class Binding(str, enum.Enum):
    """Which of the two positivity conditions is violated."""

    FIRST = "first"
    SECOND = "second"
    BOTH = "both"
    NONE = "none"


@dataclass(frozen=True)
class SeparabilityVerdict:
    separable: bool
    margin: float
    binding: Binding
    marginal: bool
    slacks: tuple = ()

    def as_dict(self) -> dict:
        return {
            "separable": self.separable,
            "margin": self.margin,
            "binding": self.binding.value,
            "marginal": self.marginal,
        }


@dataclass(frozen=True)
class AbsSepVerdict:
    abs_separable: bool
    slack1: float
    slack2: float


class OracleResult(NamedTuple):
    min_eigenvalue: float
    separable: bool


class OracleDisagreement(RuntimeError):
    """The dense and closed-form partial-transpose spectra differ."""


def verdict_from_slacks(s1: float, s2: float, band: float) -> SeparabilityVerdict:
    s1, s2 = float(s1), float(s2)
    bad1, bad2 = s1 < -band, s2 < -band
    binding = (Binding.BOTH if bad1 and bad2 else Binding.FIRST if bad1
               else Binding.SECOND if bad2 else Binding.NONE)
    margin = min(s1, s2)
    return SeparabilityVerdict(
        separable=margin >= -band,
        margin=margin,
        binding=binding,
        marginal=abs(margin) <= band,
        slacks=(s1, s2),
    )


# --- dense oracle ------------------------------------------------------------

def partial_transpose(m) -> np.ndarray:
    """Transpose on the second qubit: ``<ij|m^T2|kl> = <il|m|kj>``.

    Works on a single ``(4, 4)`` matrix or a stack ``(n, 4, 4)``.
    """
    m = np.asarray(m)
    lead = m.shape[:-2]
    t = m.reshape(lead + (2, 2, 2, 2))
    return np.swapaxes(t, -3, -1).reshape(lead + (4, 4))


def pt_min_eigenvalue_rows(rows) -> np.ndarray:
    """Smallest eigenvalue of the partial transpose (dense route)."""
    pt = partial_transpose(rows_to_dense(rows))
    return eig4_batch(pt)[:, -1]


def pt_min_eigenvalue_closed_rows(rows) -> np.ndarray:
    """Smallest partial-transpose eigenvalue from the two 2x2 blocks.

    The transpose moves ``c14`` into the inner block and ``c23`` into the
    outer one.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    c14 = rows[:, 4] + 1j * rows[:, 5]
    c23 = rows[:, 6] + 1j * rows[:, 7]
    _, outer = eig2_values(rows[:, 0], rows[:, 3], c23)
    _, inner = eig2_values(rows[:, 1], rows[:, 2], c14)
    return np.minimum(outer, inner)


def ppt_oracle(x: XState, tol: Tolerances = DEFAULT_TOLERANCES) -> OracleResult:
    """Peres-Horodecki test on the dense partial transpose.

    The dense eigenvalues are compared against the closed-form block route;
    an inconsistency beyond ``tol.spectral`` raises :class:`OracleDisagreement`.

    Examples
    --------
    >>> from xstates.state import BELL_PHI_PLUS
    >>> res = ppt_oracle(BELL_PHI_PLUS)
    >>> round(res.min_eigenvalue, 12), res.separable
    (-0.5, False)
    """
    row = x.to_row()
    dense = float(pt_min_eigenvalue_rows(row)[0])
    closed = float(pt_min_eigenvalue_closed_rows(row)[0])
    if abs(dense - closed) > tol.spectral:
        raise OracleDisagreement(
            f"partial transpose minimum: dense {dense!r} vs closed form {closed!r}"
        )
    return OracleResult(dense, dense >= -tol.spectral)


# --- element-wise X criterion -------------------------------------------------

def elementwise_slacks_rows(rows) -> np.ndarray:
    """``(n, 2)`` slacks ``(d1 d4 - |c23|^2, d2 d3 - |c14|^2)``."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    c14sq = rows[:, 4] ** 2 + rows[:, 5] ** 2
    c23sq = rows[:, 6] ** 2 + rows[:, 7] ** 2
    return np.column_stack([
        rows[:, 0] * rows[:, 3] - c23sq,
        rows[:, 1] * rows[:, 2] - c14sq,
    ])


def ppt_elementwise(x: XState, tol: Tolerances = DEFAULT_TOLERANCES) -> SeparabilityVerdict:
    """Element-wise positivity of the partial transpose of an X-state."""
    s1, s2 = elementwise_slacks_rows(x.to_row())[0]
    return verdict_from_slacks(s1, s2, tol.band)


# --- spectrum and angles ------------------------------------------------------

def spectrum_angle_slacks(spectra, phi1, phi2) -> np.ndarray:
    """Right minus left side of both inequalities; vectorised, ``(n, 2)``."""
    r = np.atleast_2d(np.asarray(spectra, dtype=float))
    phi1 = np.asarray(phi1, dtype=float)
    phi2 = np.asarray(phi2, dtype=float)
    du = (r[:, 0] - r[:, 1]) ** 2
    dl = (r[:, 2] - r[:, 3]) ** 2
    c1, s1 = np.cos(phi1) ** 2, np.sin(phi1) ** 2
    c2, s2 = np.cos(phi2) ** 2, np.sin(phi2) ** 2
    return np.column_stack([
        (r[:, 0] + r[:, 1]) ** 2 - (du * c1 + dl * s2),
        (r[:, 2] + r[:, 3]) ** 2 - (dl * c2 + du * s1),
    ])


def ineq_spectrum_angles(r: OrderedSpectrum, phi1: float, phi2: float,
                         tol: Tolerances = DEFAULT_TOLERANCES) -> SeparabilityVerdict:
    """Separability from the block spectrum and the two polar chart angles.

    The state ``W D W^dagger`` is PPT iff

    ``(r1-r2)^2 cos^2 phi1 + (r3-r4)^2 sin^2 phi2 <= (r1+r2)^2`` and
    ``(r3-r4)^2 cos^2 phi2 + (r1-r2)^2 sin^2 phi1 <= (r3+r4)^2``.

    The azimuthal angles ``psi1, psi2`` do not enter.
    """
    if not isinstance(r, OrderedSpectrum):
        r = OrderedSpectrum(*r)
    r.check(tol.structural)
    s1, s2 = spectrum_angle_slacks(r.as_array(), phi1, phi2)[0]
    return verdict_from_slacks(s1, s2, tol.band)


def psi_sweep_min_eigenvalues(spectra, phi1, phi2, n: int = 8) -> np.ndarray:
    """Oracle minimum PT eigenvalue over an ``n x n`` grid of ``(psi1, psi2)``.

    Returns an array of shape ``(len(spectra), n * n)``.
    """
    spectra = np.atleast_2d(np.asarray(spectra, dtype=float))
    m = spectra.shape[0]
    phi1 = np.broadcast_to(np.asarray(phi1, dtype=float), (m,))
    phi2 = np.broadcast_to(np.asarray(phi2, dtype=float), (m,))
    grid = np.arange(n) * (2 * np.pi / n)
    p1, p2 = (g.ravel() for g in np.meshgrid(grid, grid, indexing="ij"))
    k = n * n
    angles = np.column_stack([
        np.repeat(phi1, k), np.tile(p1, m), np.repeat(phi2, k), np.tile(p2, m)
    ])
    dense = compose_dense(np.repeat(spectra, k, axis=0), angles)
    mins = eig4_batch(partial_transpose(dense))[:, -1]
    return mins.reshape(m, k)


def angle_independence_check(r, phi1: float, phi2: float, n: int = 8,
                             tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """True if the oracle verdict is the same for every ``(psi1, psi2)`` on
    an ``n x n`` grid at fixed spectrum and polar angles."""
    if isinstance(r, OrderedSpectrum):
        r = r.as_array()
    verdicts = psi_sweep_min_eigenvalues(r, phi1, phi2, n)[0] >= -tol.spectral
    return bool(verdicts.all() or not verdicts.any())


# --- absolute separability ----------------------------------------------------

def absolute_slacks(spectra) -> np.ndarray:
    """``(4 r3 r4 - (r1-r2)^2, 4 r1 r2 - (r3-r4)^2)``, vectorised."""
    r = np.atleast_2d(np.asarray(spectra, dtype=float))
    return np.column_stack([
        4 * r[:, 2] * r[:, 3] - (r[:, 0] - r[:, 1]) ** 2,
        4 * r[:, 0] * r[:, 1] - (r[:, 2] - r[:, 3]) ** 2,
    ])


def absolutely_separable(r, tol: Tolerances = DEFAULT_TOLERANCES) -> AbsSepVerdict:
    """Separable for every choice of chart angles.

    The left sides peak at ``phi1 = 0, phi2 = pi/2`` (first inequality) and
    ``phi1 = pi/2, phi2 = 0`` (second), where they reduce to
    ``(r3-r4)^2 <= 4 r1 r2`` and ``(r1-r2)^2 <= 4 r3 r4`` respectively.
    """
    if not isinstance(r, OrderedSpectrum):
        r = OrderedSpectrum(*r)
    s1, s2 = absolute_slacks(r.as_array())[0]
    return AbsSepVerdict(bool(s1 >= -tol.band and s2 >= -tol.band), float(s1), float(s2))


# --- degenerate orbits ------------------------------------------------------

def degenerate_bound(zeta: float) -> float:
    """Unclipped right side ``4 zeta / (1 - zeta)^2``."""
    return 4.0 * zeta / (1.0 - zeta) ** 2


def degenerate_criterion(zeta: float) -> tuple[float, bool]:
    """Upper bound on ``cos^2 phi2`` for an upper-degenerate state with
    ``zeta = r4 / r3``, and whether the angle is unconstrained.

    Raises ``ValueError`` outside ``0 <= zeta < 1``.
    """
    zeta = float(zeta)
    if not (0.0 <= zeta < 1.0) or not math.isfinite(zeta):
        raise ValueError(f"ratio r4/r3 must satisfy 0 <= zeta < 1, got {zeta}")
    return min(1.0, degenerate_bound(zeta)), zeta > ZETA_CRITICAL


def critical_ratio(xtol: float = 1e-15) -> float:
    """Ratio at which the degenerate bound first reaches one, by bisection."""
    return bisect(lambda z: degenerate_bound(z) - 1.0, 0.0, 0.5, xtol=xtol)


@dataclass
class DegenerateCrossCheck:
    """Closed-form degenerate criterion versus the dense oracle on a grid
    of ``phi2`` for the spectrum ``(r1, r1, r3, r4)``."""

    r1: float
    r3: float
    r4: float
    zeta: float
    phi2: np.ndarray
    criterion_separable: np.ndarray
    oracle_min_eig: np.ndarray
    oracle_separable: np.ndarray
    elementwise_separable: np.ndarray
    inequality_separable: np.ndarray
    criterion_boundary: float | None = None
    oracle_boundaries: list = field(default_factory=list)

    @property
    def agreement_rate(self) -> float:
        return float(np.mean(self.criterion_separable == self.oracle_separable))

    @property
    def oracle_consistent(self) -> bool:
        """Oracle agrees with the element-wise and chart-inequality routes."""
        return bool(np.all(self.oracle_separable == self.elementwise_separable)
                    and np.all(self.oracle_separable == self.inequality_separable))

    def disagreement_intervals(self) -> list[tuple[float, float]]:
        bad = self.criterion_separable != self.oracle_separable
        out, start = [], None
        for i, b in enumerate(bad):
            if b and start is None:
                start = i
            if not b and start is not None:
                out.append((float(self.phi2[start]), float(self.phi2[i - 1])))
                start = None
        if start is not None:
            out.append((float(self.phi2[start]), float(self.phi2[-1])))
        return out

    def summary(self) -> dict:
        return {
            "r1": self.r1, "r3": self.r3, "r4": self.r4, "zeta": self.zeta,
            "n_phi2": int(self.phi2.size),
            "agreement_rate": self.agreement_rate,
            "oracle_consistent": self.oracle_consistent,
            "criterion_boundary": self.criterion_boundary,
            "oracle_boundaries": self.oracle_boundaries,
            "disagreements": self.disagreement_intervals(),
        }

    def rows(self):
        for i in range(self.phi2.size):
            yield {
                "r1": self.r1, "r3": self.r3, "r4": self.r4, "zeta": self.zeta,
                "phi2": float(self.phi2[i]),
                "criterion_separable": bool(self.criterion_separable[i]),
                "oracle_separable": bool(self.oracle_separable[i]),
                "oracle_min_eig": float(self.oracle_min_eig[i]),
                "elementwise_separable": bool(self.elementwise_separable[i]),
                "inequality_separable": bool(self.inequality_separable[i]),
            }


def _criterion_verdicts(zeta: float, phi2: np.ndarray, band: float) -> tuple[np.ndarray, float | None]:
    if zeta >= 1.0:
        # both blocks degenerate; the bound diverges as zeta -> 1
        return np.ones(phi2.shape, dtype=bool), None
    bound, unconstrained = degenerate_criterion(zeta)
    verdicts = np.cos(phi2) ** 2 <= bound + band
    boundary = None if unconstrained else float(np.arccos(np.sqrt(bound)))
    return verdicts, boundary


def degenerate_cross_check(r1eq: float, r3: float, r4: float, n_phi: int = 181,
                           tol: Tolerances = DEFAULT_TOLERANCES) -> DegenerateCrossCheck:
    """Compare the degenerate-orbit criterion with the oracle.

    States are ``W (r1eq, r1eq, r3, r4) W^dagger`` with ``phi1 = psi = 0`` and
    ``phi2`` on an even grid over ``[0, pi]``. Also records where the oracle
    verdict flips, refined by bisection on the minimum PT eigenvalue.
    """
    spectrum = OrderedSpectrum(r1eq, r1eq, r3, r4).check(tol.structural)
    zeta = r4 / r3 if r3 > 0 else 0.0
    phi2 = np.linspace(0.0, np.pi, n_phi)
    spectra = np.tile(spectrum.as_array(), (n_phi, 1))
    angles = np.column_stack([np.zeros(n_phi), np.zeros(n_phi), phi2, np.zeros(n_phi)])
    rows = compose_rows(spectra, angles)
    oracle_min = pt_min_eigenvalue_rows(rows)
    oracle_sep = oracle_min >= -tol.spectral
    elem_sep = elementwise_slacks_rows(rows).min(axis=1) >= -tol.band
    ineq_sep = spectrum_angle_slacks(spectra, 0.0, phi2).min(axis=1) >= -tol.band
    crit_sep, crit_boundary = _criterion_verdicts(zeta, phi2, tol.band)

    def f(phi):
        row = compose_rows(spectrum.as_array(), [[0.0, 0.0, phi, 0.0]])
        return float(pt_min_eigenvalue_rows(row)[0])

    boundaries = []
    flips = np.nonzero(np.diff(np.sign(oracle_min)) != 0)[0]
    for i in flips:
        a, b = phi2[i], phi2[i + 1]
        if f(a) * f(b) < 0:
            boundaries.append(float(bisect(f, a, b, xtol=1e-14)))
    return DegenerateCrossCheck(
        r1=float(r1eq), r3=float(r3), r4=float(r4), zeta=float(zeta), phi2=phi2,
        criterion_separable=crit_sep, oracle_min_eig=oracle_min,
        oracle_separable=oracle_sep, elementwise_separable=elem_sep,
        inequality_separable=ineq_sep, criterion_boundary=crit_boundary,
        oracle_boundaries=boundaries,
    )


def degenerate_discrepancy_grid(zetas, r1s, n_phi: int = 91,
                                tol: Tolerances = DEFAULT_TOLERANCES) -> list[DegenerateCrossCheck]:
    """Cross-checks over a ``(zeta, r1)`` grid; ``r3, r4`` follow from the
    trace: ``r3 = (1 - 2 r1) / (1 + zeta)``, ``r4 = zeta r3``."""
    out = []
    for zeta in zetas:
        for r1 in r1s:
            r3 = (1.0 - 2.0 * r1) / (1.0 + zeta)
            r4 = zeta * r3
            out.append(degenerate_cross_check(r1, r3, r4, n_phi, tol))
    return out


# --- Werner benchmark ------------------------------------------------------

def werner_threshold(xtol: float = 1e-14) -> float:
    """Bisect the Werner weight at which the oracle's minimum PT eigenvalue
    changes sign; the exact value is 1/3."""
    def f(p):
        return float(pt_min_eigenvalue_rows(werner_state(p).to_row())[0])
    return bisect(f, 0.0, 1.0, xtol=xtol)
