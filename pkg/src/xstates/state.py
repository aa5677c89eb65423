"""X-state data model.

Basis order is ``|00>, |01>, |10>, |11>``. An X-state keeps the diagonal
``d = (rho_11, rho_22, rho_33, rho_44)`` and the two upper anti-diagonal
entries ``c14 = rho_14`` and ``c23 = rho_23``; the lower ones are their
conjugates.

The "row" layout used for batches, CSV files and the estimators is the
8-vector ``d1, d2, d3, d4, Re c14, Im c14, Re c23, Im c23``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._tolerances import DEFAULT_TOLERANCES, Tolerances
from .linalg import Hermitian2, as_hermitian4
from .su4 import P_PI, alpha_element

__all__ = [
    "XState",
    "HVector",
    "XStateError",
    "TraceViolation",
    "PositivityViolation",
    "NonFiniteError",
    "NotXStructured",
    "H_ORDER",
    "ROW_FIELDS",
    "X_POSITIONS",
    "make_xstate",
    "from_dense",
    "from_row",
    "block_form",
    "blockdiag_to_dense",
    "h_to_dense",
    "h_coefficients",
    "h_to_xstate",
    "rows_to_dense",
    "dense_to_rows",
    "validate_rows",
    "MAXIMALLY_MIXED",
    "BELL_PHI_PLUS",
    "werner_state",
]

ROW_FIELDS = ("d1", "d2", "d3", "d4", "c14re", "c14im", "c23re", "c23im")
H_ORDER = (3, 6, 7, 8, 10, 11, 15)

# Zero-based positions allowed to be non-zero.
X_POSITIONS = frozenset(
    [(0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)]
)


class XStateError(ValueError):
    """Base class for rejected X-state inputs.

    ``failures`` lists every violated invariant, not only the one named by
    the exception type.
    """

    def __init__(self, message: str, failures=None):
        super().__init__(message)
        self.failures = list(failures) if failures else [message]


class TraceViolation(XStateError):
    pass


class PositivityViolation(XStateError):
    def __init__(self, message: str, block: int, failures=None):
        super().__init__(message, failures)
        self.block = block


class NonFiniteError(XStateError):
    pass


class NotXStructured(XStateError):
    def __init__(self, message: str, entries, failures=None):
        super().__init__(message, failures)
        self.entries = entries


@dataclass(frozen=True)
class XState:
    """A validated two-qubit X-state density matrix.

    Build instances with :func:`make_xstate`, :func:`from_dense` or
    :func:`h_to_xstate`. :meth:`unchecked` skips validation and exists for
    perturbation tests only.
    """

    d: tuple
    c14: complex
    c23: complex

    @classmethod
    def unchecked(cls, d, c14=0j, c23=0j) -> "XState":
        return cls(tuple(float(x) for x in d), complex(c14), complex(c23))

    @property
    def d1(self) -> float:
        return self.d[0]

    @property
    def d2(self) -> float:
        return self.d[1]

    @property
    def d3(self) -> float:
        return self.d[2]

    @property
    def d4(self) -> float:
        return self.d[3]

    def to_dense(self) -> np.ndarray:
        m = np.diag(np.asarray(self.d, dtype=complex))
        m[0, 3] = self.c14
        m[3, 0] = self.c14.conjugate()
        m[1, 2] = self.c23
        m[2, 1] = self.c23.conjugate()
        return m

    def to_row(self) -> np.ndarray:
        return np.array([*self.d, self.c14.real, self.c14.imag,
                         self.c23.real, self.c23.imag])

    def to_json(self) -> dict:
        return {
            "d": list(self.d),
            "c14": {"re": self.c14.real, "im": self.c14.imag},
            "c23": {"re": self.c23.real, "im": self.c23.imag},
        }


@dataclass(frozen=True)
class HVector:
    """Expansion coefficients of an X-state over the signed subalgebra."""

    h3: float = 0.0
    h6: float = 0.0
    h7: float = 0.0
    h8: float = 0.0
    h10: float = 0.0
    h11: float = 0.0
    h15: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f"h{k}") for k in H_ORDER])

    @classmethod
    def from_array(cls, values) -> "HVector":
        values = np.asarray(values, dtype=float)
        return cls(**{f"h{k}": float(v) for k, v in zip(H_ORDER, values)})


def _check(d, c14, c23, tol: Tolerances) -> list:
    failures = []
    if abs(sum(d) - 1.0) > tol.structural:
        failures.append(("trace", f"trace {sum(d)!r} differs from 1"))
    for i, x in enumerate(d, start=1):
        if x < -tol.structural:
            failures.append(("diagonal", f"d{i} = {x!r} is negative"))
    if d[0] * d[3] < abs(c14) ** 2 - tol.structural:
        failures.append(
            ("block1", f"d1*d4 = {d[0] * d[3]:.6g} < |c14|^2 = {abs(c14) ** 2:.6g}")
        )
    if d[1] * d[2] < abs(c23) ** 2 - tol.structural:
        failures.append(
            ("block2", f"d2*d3 = {d[1] * d[2]:.6g} < |c23|^2 = {abs(c23) ** 2:.6g}")
        )
    return failures


def make_xstate(d, c14=0j, c23=0j, tol: Tolerances = DEFAULT_TOLERANCES) -> XState:
    """Validate the seven real parameters and return an :class:`XState`.

    Raises
    ------
    NonFiniteError
        Any component is NaN or infinite.
    TraceViolation
        ``sum(d)`` differs from one by more than ``tol.structural``.
    PositivityViolation
        A diagonal entry is negative (``block=0``) or one of the 2x2 blocks
        fails ``d1*d4 >= |c14|^2`` (``block=1``) / ``d2*d3 >= |c23|^2``
        (``block=2``).

    Examples
    --------
    >>> make_xstate([0.5, 0, 0, 0.5], c14=0.5).c14
    (0.5+0j)
    """
    d = tuple(float(x) for x in d)
    if len(d) != 4:
        raise XStateError(f"expected 4 diagonal entries, got {len(d)}")
    c14, c23 = complex(c14), complex(c23)
    parts = (*d, c14.real, c14.imag, c23.real, c23.imag)
    if not all(math.isfinite(x) for x in parts):
        raise NonFiniteError("X-state parameters must be finite")
    failures = _check(d, c14, c23, tol)
    if failures:
        kinds = [k for k, _ in failures]
        messages = [m for _, m in failures]
        summary = "; ".join(messages)
        if kinds[0] == "trace":
            raise TraceViolation(summary, messages)
        block = {"diagonal": 0, "block1": 1, "block2": 2}[kinds[0]]
        raise PositivityViolation(summary, block, messages)
    return XState(d, c14, c23)


def from_row(row, tol: Tolerances = DEFAULT_TOLERANCES) -> XState:
    row = np.asarray(row, dtype=float)
    if row.shape != (8,):
        raise XStateError(f"expected 8 values {ROW_FIELDS}, got {row.size}")
    return make_xstate(row[:4], complex(row[4], row[5]), complex(row[6], row[7]), tol)


def from_dense(m, tol: Tolerances = DEFAULT_TOLERANCES) -> XState:
    """Extract an X-state from a dense Hermitian 4x4 matrix.

    Raises :class:`NotXStructured` when any of the eight forbidden entries
    exceeds ``tol.structural`` in magnitude.
    """
    arr = np.asarray(m, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("matrix contains NaN or Inf")
    m = as_hermitian4(arr, tol.structural)
    bad = [
        (i + 1, j + 1, complex(m[i, j]))
        for i in range(4)
        for j in range(4)
        if (i, j) not in X_POSITIONS and abs(m[i, j]) > tol.structural
    ]
    if bad:
        where = ", ".join(f"m[{i},{j}]={v:.3g}" for i, j, v in bad)
        raise NotXStructured(f"entries outside the X pattern: {where}", bad)
    return make_xstate(np.real(np.diag(m)), m[0, 3], m[1, 2], tol)


def block_form(x: XState) -> tuple[Hermitian2, Hermitian2]:
    """The two 2x2 blocks of ``P_pi rho P_pi``.

    ``upper = [[rho_11, rho_14], [rho_41, rho_44]]`` and
    ``lower = [[rho_33, rho_32], [rho_23, rho_22]]``.
    """
    upper = Hermitian2(x.d1, x.d4, x.c14)
    lower = Hermitian2(x.d3, x.d2, x.c23.conjugate())
    return upper, lower


def blockdiag_to_dense(upper, lower) -> np.ndarray:
    """Inverse of :func:`block_form` on arrays: ``P_pi (upper (+) lower) P_pi``."""
    b = np.zeros((4, 4), dtype=complex)
    b[:2, :2] = upper
    b[2:, 2:] = lower
    return P_PI @ b @ P_PI


def h_coefficients(x: XState) -> HVector:
    """Coefficients ``h_k`` with ``rho = (I + 2i sum_k h_k a_k) / 4``.

    Examples
    --------
    >>> h = h_coefficients(BELL_PHI_PLUS)
    >>> h.h7, h.h11, h.h15
    (-1.0, -1.0, -1.0)
    """
    d1, d2, d3, d4 = x.d
    a, b = x.c14, x.c23
    return HVector(
        h3=-d1 - d2 + d3 + d4,
        h6=-d1 + d2 - d3 + d4,
        h7=-2.0 * (a.real + b.real),
        h8=2.0 * (a.imag - b.imag),
        h10=2.0 * (a.imag + b.imag),
        h11=2.0 * (b.real - a.real),
        h15=-d1 + d2 + d3 - d4,
    )


def h_to_dense(h: HVector) -> np.ndarray:
    """Evaluate the generator expansion directly (reference path)."""
    acc = np.eye(4, dtype=complex)
    for k, v in zip(H_ORDER, h.as_array()):
        acc = acc + 2j * v * alpha_element(k)
    return acc / 4.0


def h_to_xstate(h: HVector, tol: Tolerances = DEFAULT_TOLERANCES) -> XState:
    """Inverse of :func:`h_coefficients`, with validation of the result."""
    h3, h6, h7, h8, h10, h11, h15 = h.as_array()
    d = (
        0.25 * (1 - h3 - h6 - h15),
        0.25 * (1 - h3 + h6 + h15),
        0.25 * (1 + h3 - h6 + h15),
        0.25 * (1 + h3 + h6 - h15),
    )
    c14 = complex(-(h7 + h11), h8 + h10) / 4.0
    c23 = complex(h11 - h7, h10 - h8) / 4.0
    return make_xstate(d, c14, c23, tol)


# --- batch helpers on (n, 8) row arrays -------------------------------------

def rows_to_dense(rows) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    n = rows.shape[0]
    m = np.zeros((n, 4, 4), dtype=complex)
    idx = np.arange(4)
    m[:, idx, idx] = rows[:, :4]
    c14 = rows[:, 4] + 1j * rows[:, 5]
    c23 = rows[:, 6] + 1j * rows[:, 7]
    m[:, 0, 3] = c14
    m[:, 3, 0] = c14.conj()
    m[:, 1, 2] = c23
    m[:, 2, 1] = c23.conj()
    return m


def dense_to_rows(m) -> np.ndarray:
    """Read the X entries of a stack of dense matrices (no validation)."""
    m = np.asarray(m, dtype=complex).reshape(-1, 4, 4)
    idx = np.arange(4)
    return np.column_stack([
        m[:, idx, idx].real,
        m[:, 0, 3].real, m[:, 0, 3].imag,
        m[:, 1, 2].real, m[:, 1, 2].imag,
    ])


def validate_rows(rows, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Boolean mask of rows that satisfy every X-state invariant."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    d = rows[:, :4]
    c14sq = rows[:, 4] ** 2 + rows[:, 5] ** 2
    c23sq = rows[:, 6] ** 2 + rows[:, 7] ** 2
    return (
        np.all(np.isfinite(rows), axis=1)
        & (np.abs(d.sum(axis=1) - 1.0) <= tol.structural)
        & np.all(d >= -tol.structural, axis=1)
        & (d[:, 0] * d[:, 3] >= c14sq - tol.structural)
        & (d[:, 1] * d[:, 2] >= c23sq - tol.structural)
    )


MAXIMALLY_MIXED = XState((0.25, 0.25, 0.25, 0.25), 0j, 0j)
BELL_PHI_PLUS = XState((0.5, 0.0, 0.0, 0.5), 0.5 + 0j, 0j)


def werner_state(p: float) -> XState:
    """``p |Phi+><Phi+| + (1 - p) I/4`` for ``0 <= p <= 1``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Werner weight must lie in [0, 1], got {p}")
    q = (1.0 - p) / 4.0
    return make_xstate([p / 2 + q, q, q, p / 2 + q], c14=p / 2)
