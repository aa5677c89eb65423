"""The su(4) generator basis, the X-state subalgebra and their identities.

Basis convention: ``lambda_k = (i/2) sigma_mu (x) sigma_nu`` with

* ``k = 1..6``  -> ``(x,0), (y,0), (z,0), (0,x), (0,y), (0,z)``  (the subalgebra ``l``)
* ``k = 7..15`` -> ``(x,x), (x,y), ..., (z,z)`` row-major        (the complement ``p``)

All generators are anti-Hermitian with ``Tr(lambda_j lambda_k) = -delta_jk``.
The X-state subalgebra is spanned by the seven signed generators in
:data:`ALPHA_X`; the sign on ``lambda_11`` is kept as metadata so the stored
basis and the commutator table stay untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.linalg import expm

from .linalg import commutator, kron2

__all__ = [
    "PAULI",
    "LAMBDA",
    "P_PI",
    "ALPHA_X",
    "GX_COORDS",
    "L_INDICES",
    "P_INDICES",
    "COMMUTATOR_TABLE",
    "PRINTED_COMMUTATOR_TABLE",
    "TABLE_ERRATA",
    "IdentityReport",
    "lam",
    "alpha_element",
    "structure_coefficients",
    "verify_basis_transcription",
    "verify_commutator_table",
    "verify_cartan_split",
    "verify_alpha_x_closure",
    "pseudospin_ladders",
    "pseudospin_generators",
    "verify_pseudospin",
    "gx_generator",
    "exp_gx",
    "local_group_element",
    "local_factors",
    "ppi_conjugation_table",
    "run_all_identity_checks",
]

_I2 = np.eye(2, dtype=complex)
_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)

PAULI = {"0": _I2, "x": _SX, "y": _SY, "z": _SZ}

_PAIRS = (
    ("x", "0"), ("y", "0"), ("z", "0"), ("0", "x"), ("0", "y"), ("0", "z"),
    ("x", "x"), ("x", "y"), ("x", "z"),
    ("y", "x"), ("y", "y"), ("y", "z"),
    ("z", "x"), ("z", "y"), ("z", "z"),
)

L_INDICES = tuple(range(1, 7))
P_INDICES = tuple(range(7, 16))


def _build_basis() -> np.ndarray:
    out = np.empty((16, 4, 4), dtype=complex)
    out[0] = 0.0  # unused, keeps 1-based indexing
    for k, (mu, nu) in enumerate(_PAIRS, start=1):
        out[k] = 0.5j * kron2(PAULI[mu], PAULI[nu])
    out.setflags(write=False)
    return out


LAMBDA = _build_basis()

# Entries of the supplementary matrix list, lambda_k = (i/2) * M_k, typed in
# independently of the Kronecker construction above.
_j = 1j
_SUPPLEMENT = {
    1: [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]],
    2: [[0, 0, -_j, 0], [0, 0, 0, -_j], [_j, 0, 0, 0], [0, _j, 0, 0]],
    3: [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]],
    4: [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    5: [[0, -_j, 0, 0], [_j, 0, 0, 0], [0, 0, 0, -_j], [0, 0, _j, 0]],
    6: [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]],
    7: [[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
    8: [[0, 0, 0, -_j], [0, 0, _j, 0], [0, -_j, 0, 0], [_j, 0, 0, 0]],
    9: [[0, 0, 1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0]],
    10: [[0, 0, 0, -_j], [0, 0, -_j, 0], [0, _j, 0, 0], [_j, 0, 0, 0]],
    11: [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]],
    12: [[0, 0, -_j, 0], [0, 0, 0, _j], [_j, 0, 0, 0], [0, -_j, 0, 0]],
    13: [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, -1, 0]],
    14: [[0, -_j, 0, 0], [_j, 0, 0, 0], [0, 0, 0, _j], [0, 0, -_j, 0]],
    15: [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]],
}

P_PI = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
)
P_PI.setflags(write=False)

# (index, sign) in the listing order of the subalgebra.
ALPHA_X = ((15, 1), (10, 1), (6, 1), (11, -1), (8, 1), (3, 1), (7, 1))
_ALPHA_SIGN = dict(ALPHA_X)

# Canonical ordering of group coordinates and h-coefficients.
GX_COORDS = (3, 6, 7, 8, 10, 11, 15)

# Commutator table as printed: entry [i-1][j-1] = s*k encodes
# [lambda_i, lambda_j] = s * lambda_k, zero meaning a vanishing commutator.
PRINTED_COMMUTATOR_TABLE = np.array([
    [0, -3, 2, 0, 0, 0, 0, 0, 0, -13, -14, -15, 10, 11, 12],
    [3, 0, -1, 0, 0, 0, 13, 14, 15, 0, 0, 0, -7, -8, -9],
    [-2, 1, 0, 0, 0, 0, -10, -11, -12, 7, 8, 9, 0, 0, 0],
    [0, 0, 0, 0, -6, 5, 0, -9, 8, 0, -12, 11, 0, -15, 14],
    [0, 0, 0, 6, 0, -4, 9, 0, -7, 12, 0, -10, 15, 0, 13],
    [0, 0, 0, -5, 4, 0, -8, 7, 0, -11, 10, 0, -14, 13, 0],
    [0, -13, 10, 0, -9, 8, 0, -6, 5, -3, 0, 0, 2, 0, 0],
    [0, -14, 11, 9, 0, -7, 6, 0, -4, 0, -3, 0, 0, 2, 0],
    [0, -15, 12, -8, 7, 0, -5, 4, 0, 0, 0, -3, 0, 0, 2],
    [13, 0, -7, 0, -12, 11, 3, 0, 0, 0, -6, 5, -1, 0, 0],
    [14, 0, -8, 12, 0, -10, 0, 3, 0, 6, 0, -4, 0, -1, 0],
    [15, 0, -9, -11, 10, 0, 0, 0, 3, -5, 4, 0, 0, 0, -1],
    [-10, 7, 0, 0, -15, 14, -2, 0, 0, 1, 0, 0, 0, -6, 5],
    [-11, 8, 0, 15, 0, -13, 0, -2, 0, 0, 1, 0, 6, 0, -4],
    [-12, 9, 0, -14, 13, 0, 0, 0, -2, 0, 0, 1, -5, 4, 0],
])
PRINTED_COMMUTATOR_TABLE.setflags(write=False)

# (row, col) -> corrected entry. The printed (5, 15) cell reads +lambda_13,
# identical to its mirror (15, 5), which breaks antisymmetry.
TABLE_ERRATA = {(5, 15): -13}


def _apply_errata(table, errata):
    out = np.array(table)
    for (i, j), v in errata.items():
        out[i - 1, j - 1] = v
    out.setflags(write=False)
    return out


COMMUTATOR_TABLE = _apply_errata(PRINTED_COMMUTATOR_TABLE, TABLE_ERRATA)


@dataclass
class IdentityReport:
    """Outcome of one family of algebraic identity checks."""

    name: str
    checked: int = 0
    matched: int = 0
    max_deviation: float = 0.0
    tol: float = 0.0
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.matched == self.checked and not self.failures

    def record(self, label: str, deviation: float, expected: str = "", got: str = ""):
        self.checked += 1
        self.max_deviation = max(self.max_deviation, float(deviation))
        if deviation <= self.tol:
            self.matched += 1
        else:
            self.failures.append(
                {"item": label, "expected": expected, "got": got,
                 "deviation": float(deviation)}
            )

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: {self.matched}/{self.checked} "
                f"(max dev {self.max_deviation:.2e}, tol {self.tol:.0e})")

    def as_dict(self) -> dict:
        return {
            "check": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "matched": self.matched,
            "max_deviation": self.max_deviation,
            "tol": self.tol,
            "failures": self.failures,
            "notes": self.notes,
        }


def lam(k: int) -> np.ndarray:
    """Generator ``lambda_k`` for ``1 <= k <= 15`` (read-only array)."""
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= 15:
        raise IndexError(f"basis index must be an integer in 1..15, got {k!r}")
    return LAMBDA[k]


def alpha_element(k: int) -> np.ndarray:
    """Signed subalgebra element for index ``k`` (``-lambda_11`` for k=11)."""
    try:
        sign = _ALPHA_SIGN[k]
    except KeyError:
        raise IndexError(f"{k} does not index an element of the X subalgebra") from None
    return sign * LAMBDA[k]


def structure_coefficients(m: np.ndarray) -> np.ndarray:
    """Coefficients ``c`` (length 16, ``c[0]`` unused) with ``m = sum c_k lambda_k``.

    Valid for traceless anti-Hermitian ``m``; uses ``Tr(lambda_j lambda_k) = -delta``.
    """
    c = -np.einsum("kij,ji->k", LAMBDA, m)
    c[0] = 0.0
    return c


def _signed(entry: int) -> np.ndarray:
    if entry == 0:
        return np.zeros((4, 4), dtype=complex)
    return np.sign(entry) * LAMBDA[abs(entry)]


def _label(entry: int) -> str:
    if entry == 0:
        return "0"
    return f"{'-' if entry < 0 else ''}lambda_{abs(entry)}"


def verify_basis_transcription(tol: float = 1e-15) -> IdentityReport:
    """Compare the Kronecker-built basis against the typed-in matrix list,
    and check the trace normalisation."""
    rep = IdentityReport("basis transcription", tol=tol)
    for k, m in _SUPPLEMENT.items():
        dev = np.max(np.abs(LAMBDA[k] - 0.5j * np.array(m, dtype=complex)))
        rep.record(f"lambda_{k}", dev)
    gram = np.einsum("aij,bji->ab", LAMBDA[1:], LAMBDA[1:])
    rep.record("Tr(lambda_j lambda_k) = -delta_jk", np.max(np.abs(gram + np.eye(15))))
    return rep


def verify_commutator_table(tol: float = 1e-12, table=None) -> IdentityReport:
    """Evaluate all 225 commutators and compare with the tabulated entries.

    By default the table is :data:`COMMUTATOR_TABLE` (the printed table with
    :data:`TABLE_ERRATA` applied); pass ``PRINTED_COMMUTATOR_TABLE`` to see the
    raw mismatches.
    """
    use_default = table is None
    table = COMMUTATOR_TABLE if use_default else np.asarray(table)
    rep = IdentityReport("commutator table", tol=tol)
    for i in range(1, 16):
        for j in range(1, 16):
            got = commutator(LAMBDA[i], LAMBDA[j])
            entry = int(table[i - 1, j - 1])
            dev = np.max(np.abs(got - _signed(entry)))
            coeffs = structure_coefficients(got)
            got_label = " + ".join(
                f"{coeffs[k].real:+.3g}*lambda_{k}" for k in range(1, 16)
                if abs(coeffs[k]) > 1e-9
            ) or "0"
            rep.record(f"[lambda_{i}, lambda_{j}]", dev, _label(entry), got_label)
    if use_default:
        for (i, j), v in TABLE_ERRATA.items():
            rep.notes.append(
                f"printed cell [lambda_{i}, lambda_{j}] = "
                f"{_label(int(PRINTED_COMMUTATOR_TABLE[i - 1, j - 1]))} contradicts "
                f"its mirror [lambda_{j}, lambda_{i}] = "
                f"{_label(int(PRINTED_COMMUTATOR_TABLE[j - 1, i - 1]))}; "
                f"checked as {_label(v)}"
            )
    return rep


def verify_cartan_split(tol: float = 1e-12) -> IdentityReport:
    """Check ``[l,l] in l``, ``[p,l] in p``, ``[p,p] in l`` by projection."""
    rep = IdentityReport("cartan split", tol=tol)
    spans = {"l": L_INDICES, "p": P_INDICES}
    rules = (("l", "l", "l"), ("p", "l", "p"), ("l", "p", "p"), ("p", "p", "l"))
    for a, b, target in rules:
        allowed = np.zeros(16, dtype=bool)
        allowed[list(spans[target])] = True
        for i in spans[a]:
            for j in spans[b]:
                c = commutator(LAMBDA[i], LAMBDA[j])
                coeffs = structure_coefficients(c)
                inside = np.einsum("k,kij->ij", np.where(allowed, coeffs, 0), LAMBDA)
                residual = np.max(np.abs(c - inside))
                rep.record(f"[lambda_{i}, lambda_{j}] in {target}", residual,
                           f"element of {target}", f"residual {residual:.2e}")
    return rep


def verify_alpha_x_closure(tol: float = 1e-12) -> IdentityReport:
    """The X subalgebra is closed and its ``lambda_15`` element is central."""
    rep = IdentityReport("alpha_X closure", tol=tol)
    members = [k for k, _ in ALPHA_X]
    allowed = np.zeros(16, dtype=bool)
    allowed[members] = True
    for a in members:
        for b in members:
            c = commutator(alpha_element(a), alpha_element(b))
            coeffs = structure_coefficients(c)
            inside = np.einsum("k,kij->ij", np.where(allowed, coeffs, 0), LAMBDA)
            rep.record(f"[a_{a}, a_{b}] in span(alpha_X)", np.max(np.abs(c - inside)))
    for b in members:
        rep.record(f"[lambda_15, a_{b}] = 0",
                   np.max(np.abs(commutator(LAMBDA[15], alpha_element(b)))))
    return rep


def pseudospin_ladders() -> dict:
    """``S_z, S_+, S_-, T_z, T_+, T_-`` as linear combinations of generators."""
    l3, l6, l7, l8, l10, l11 = (LAMBDA[k] for k in (3, 6, 7, 8, 10, 11))
    return {
        "Sz": 1j * (l3 + l6),
        "S+": (l8 + l10) + 1j * (l7 - l11),
        "S-": -(l8 + l10) + 1j * (l7 - l11),
        "Tz": 1j * (l3 - l6),
        "T+": -(l8 - l10) + 1j * (l7 + l11),
        "T-": (l8 - l10) + 1j * (l7 + l11),
    }


def pseudospin_generators():
    """Cartesian pseudospin triples ``(S, T)``.

    Each triple is ``((X_+ + X_-)/2, i (X_+ - X_-)/2, X_z)``.
    """
    lad = pseudospin_ladders()

    def triple(x):
        p, m = lad[x + "+"], lad[x + "-"]
        return (0.5 * (p + m), 0.5j * (p - m), lad[x + "z"])

    return triple("S"), triple("T")


def verify_pseudospin(tol: float = 1e-12) -> IdentityReport:
    rep = IdentityReport("pseudospin relations", tol=tol)
    lad = pseudospin_ladders()
    for x in ("S", "T"):
        z, p, m = lad[x + "z"], lad[x + "+"], lad[x + "-"]
        rep.record(f"[{x}z, {x}+] = 2 {x}+", np.max(np.abs(commutator(z, p) - 2 * p)))
        rep.record(f"[{x}z, {x}-] = -2 {x}-", np.max(np.abs(commutator(z, m) + 2 * m)))
        rep.record(f"[{x}+, {x}-] = 4 {x}z", np.max(np.abs(commutator(p, m) - 4 * z)))
    s_all = [lad["Sz"], lad["S+"], lad["S-"], *pseudospin_generators()[0]]
    t_all = [lad["Tz"], lad["T+"], lad["T-"], *pseudospin_generators()[1]]
    s_names = ["Sz", "S+", "S-", "S1", "S2", "S3"]
    t_names = ["Tz", "T+", "T-", "T1", "T2", "T3"]
    for sn, s in zip(s_names, s_all):
        for tn, t in zip(t_names, t_all):
            rep.record(f"[{sn}, {tn}] = 0", np.max(np.abs(commutator(s, t))))
    return rep


def _coords_vector(v) -> np.ndarray:
    if isinstance(v, Mapping):
        unknown = set(v) - set(GX_COORDS)
        if unknown:
            raise KeyError(f"unknown group coordinates {sorted(unknown)}")
        return np.array([float(v.get(k, 0.0)) for k in GX_COORDS])
    arr = np.asarray(v, dtype=float)
    if arr.shape[-1:] != (7,):
        raise ValueError("expected 7 coordinates ordered as (v3, v6, v7, v8, v10, v11, v15)")
    return arr


_GX_GENERATORS = np.stack([alpha_element(k) for k in GX_COORDS])


def gx_generator(v) -> np.ndarray:
    """Lie algebra element ``sum_k v_k a_k`` over the signed subalgebra."""
    coords = _coords_vector(v)
    if not np.all(np.isfinite(coords)):
        raise ValueError("group coordinates must be finite")
    return np.einsum("...k,kij->...ij", coords, _GX_GENERATORS)


def exp_gx(v) -> np.ndarray:
    """Group element ``exp(sum_k v_k a_k)`` of the X-state invariance group.

    ``v`` is a mapping ``{3: v3, 6: v6, ...}`` or a length-7 sequence in the
    order of :data:`GX_COORDS`. Scaling-and-squaring Pade via scipy.
    """
    gen = gx_generator(v)
    if gen.ndim == 2:
        return expm(gen)
    return np.stack([expm(g) for g in gen.reshape(-1, 4, 4)]).reshape(gen.shape)


def _phase_sigma_z(angle: float) -> np.ndarray:
    return np.diag([np.exp(0.5j * angle), np.exp(-0.5j * angle)])


def local_group_element(phi1: float, phi2: float) -> np.ndarray:
    """Element of the local subgroup,
    ``P_pi (exp(i phi1/2 sigma_z) (+) exp(i phi2/2 sigma_z)) P_pi``.

    The two phases act on the two 2x2 blocks of the block-diagonal frame.
    The result equals ``kron2(*local_factors(phi1, phi2))``.
    """
    blocks = np.zeros((4, 4), dtype=complex)
    blocks[:2, :2] = _phase_sigma_z(phi1)
    blocks[2:, 2:] = _phase_sigma_z(phi2)
    return P_PI @ blocks @ P_PI


def local_factors(phi1: float, phi2: float) -> tuple[np.ndarray, np.ndarray]:
    """Single-qubit SU(2) factors ``(g1, g2)`` of :func:`local_group_element`."""
    return (_phase_sigma_z(0.5 * (phi1 - phi2)), _phase_sigma_z(0.5 * (phi1 + phi2)))


def _blockdiag(a, b) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = a
    out[2:, 2:] = b
    return out


# Printed block forms: P_pi a_k P_pi = (i/2) blockdiag(upper, lower).
_PPI_FORMS = {
    3: (_SZ, -_SZ),
    6: (_SZ, _SZ),
    7: (_SX, _SX),
    8: (_SY, _SY),
    10: (_SY, -_SY),
    11: (_SX, -_SX),
    15: (_I2, -_I2),
}


def ppi_conjugation_table(tol: float = 1e-15) -> IdentityReport:
    """Check the block-diagonal images of the seven subalgebra elements."""
    rep = IdentityReport("P_pi conjugation", tol=tol)
    for k, (upper, lower) in _PPI_FORMS.items():
        got = P_PI @ alpha_element(k) @ P_PI
        expected = 0.5j * _blockdiag(upper, lower)
        name = "-lambda_11" if k == 11 else f"lambda_{k}"
        rep.record(f"P_pi {name} P_pi", np.max(np.abs(got - expected)))
    rep.notes.append("the lambda_11 identity holds for the signed element -lambda_11")
    return rep


def run_all_identity_checks() -> list[IdentityReport]:
    return [
        verify_basis_transcription(),
        verify_commutator_table(),
        verify_cartan_split(),
        verify_alpha_x_closure(),
        verify_pseudospin(),
        ppi_conjugation_table(),
    ]
