"""Seeded random X-states and the tetrahedron picture of the spectrum simplex.

Random streams use numpy's counter-based Philox bit generator, seeded
explicitly, so identical ``(measure, seed, count)`` gives identical output on
every platform numpy supports.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass
from itertools import product
from typing import Iterator

import numpy as np

from .orbits import OrderedSpectrum, compose_dense
from .separability import absolute_slacks
from .state import XState, dense_to_rows, from_row

__all__ = [
    "Measure",
    "SamplerConfig",
    "make_rng",
    "sample_spectra_array",
    "sample_spectrum",
    "sample_angles_array",
    "sample_xstate_rows",
    "sample_xstate",
    "TETRAHEDRON_VERTICES",
    "SPECTRUM_VERTICES",
    "FULL_ORDER_VERTICES",
    "barycentric_weights",
    "embed",
    "unembed",
    "region_points",
    "region_export",
    "REGION_FIELDS",
]


class Measure(str, enum.Enum):
    """Named sampling measures. Neither is claimed to be Hilbert-Schmidt uniform."""

    SPECTRUM_UNIFORM = "spectrum-uniform"
    PARAM_UNIFORM_REJECTION = "param-uniform-rejection"


@dataclass(frozen=True)
class SamplerConfig:
    measure: Measure = Measure.SPECTRUM_UNIFORM
    seed: int = 0
    count: int = 1

    def __post_init__(self):
        object.__setattr__(self, "measure", Measure(self.measure))
        if int(self.count) < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def _pair_sort(r: np.ndarray) -> np.ndarray:
    out = r.copy()
    out[:, :2] = -np.sort(-r[:, :2], axis=1)
    out[:, 2:] = -np.sort(-r[:, 2:], axis=1)
    return out


def _uniform_simplex(rng: np.random.Generator, n: int) -> np.ndarray:
    e = rng.standard_exponential((n, 4))
    return e / e.sum(axis=1, keepdims=True)


def sample_spectra_array(rng: np.random.Generator, n: int, sort_pairs: bool = True) -> np.ndarray:
    """``n`` points uniform on the 3-simplex, optionally folded into the
    partially ordered simplex by sorting each pair in descending order."""
    r = _uniform_simplex(rng, n)
    return _pair_sort(r) if sort_pairs else r


def sample_angles_array(rng: np.random.Generator, n: int) -> np.ndarray:
    """Columns ``phi1, psi1, phi2, psi2``; polar angles uniform in ``[0, pi]``,
    azimuths uniform in ``[0, 2 pi)``."""
    u = rng.random((n, 4))
    return u * np.array([np.pi, 2 * np.pi, np.pi, 2 * np.pi])


def sample_spectrum(cfg: SamplerConfig) -> Iterator[OrderedSpectrum]:
    rng = make_rng(cfg.seed)
    for r in sample_spectra_array(rng, cfg.count):
        yield OrderedSpectrum(*r)


def _disc(rng: np.random.Generator, radius: np.ndarray) -> np.ndarray:
    """Uniform points in discs of the given radii, by rejection from squares."""
    out = np.empty(radius.shape, dtype=complex)
    pending = np.arange(radius.size)
    while pending.size:
        z = rng.uniform(-1.0, 1.0, (pending.size, 2))
        ok = z[:, 0] ** 2 + z[:, 1] ** 2 <= 1.0
        out[pending[ok]] = radius[pending[ok]] * (z[ok, 0] + 1j * z[ok, 1])
        pending = pending[~ok]
    return out


def sample_xstate_rows(cfg: SamplerConfig) -> np.ndarray:
    """The whole stream of :func:`sample_xstate` as an ``(count, 8)`` array."""
    rng = make_rng(cfg.seed)
    n = int(cfg.count)
    if cfg.measure is Measure.SPECTRUM_UNIFORM:
        spectra = sample_spectra_array(rng, n)
        angles = sample_angles_array(rng, n)
        rows = dense_to_rows(compose_dense(spectra, angles))
        # remove trace rounding so every row validates at structural tolerance
        rows[:, :4] /= rows[:, :4].sum(axis=1, keepdims=True)
        return rows
    d = _uniform_simplex(rng, n)
    c14 = _disc(rng, np.sqrt(d[:, 0] * d[:, 3]))
    c23 = _disc(rng, np.sqrt(d[:, 1] * d[:, 2]))
    return np.column_stack([d, c14.real, c14.imag, c23.real, c23.imag])


def sample_xstate(cfg: SamplerConfig) -> Iterator[XState]:
    """Validated X-states drawn under ``cfg.measure``.

    ``SPECTRUM_UNIFORM`` draws a spectrum uniformly on the simplex and chart
    angles uniformly, then forms ``W D W^dagger``. ``PARAM_UNIFORM_REJECTION``
    draws the diagonal uniformly on the simplex and each anti-diagonal entry
    uniformly in its positivity disc.
    """
    for row in sample_xstate_rows(cfg):
        yield from_row(row)


# --- tetrahedron geometry --------------------------------------------------

# Regular tetrahedron centred at the origin.
TETRAHEDRON_VERTICES = {
    "A": np.array([1.0, 1.0, 1.0]),
    "B": np.array([1.0, -1.0, -1.0]),
    "C": np.array([-1.0, 1.0, -1.0]),
    "D": np.array([-1.0, -1.0, 1.0]),
}

# Vertices of the partially ordered simplex as spectra (r1, r2, r3, r4).
SPECTRUM_VERTICES = {
    "A": np.array([1.0, 0.0, 0.0, 0.0]),
    "B": np.array([0.5, 0.5, 0.0, 0.0]),
    "C": np.array([0.0, 0.0, 1.0, 0.0]),
    "D": np.array([0.0, 0.0, 0.5, 0.5]),
}

# Corners of the fully ordered region r1 >= r2 >= r3 >= r4.
FULL_ORDER_VERTICES = {
    "A": np.array([1.0, 0.0, 0.0, 0.0]),
    "B": np.array([0.5, 0.5, 0.0, 0.0]),
    "C'": np.array([1 / 3, 1 / 3, 1 / 3, 0.0]),
    "D'": np.array([0.25, 0.25, 0.25, 0.25]),
}

_VERTS = np.stack([TETRAHEDRON_VERTICES[k] for k in "ABCD"])
_SPEC = np.stack([SPECTRUM_VERTICES[k] for k in "ABCD"])


def barycentric_weights(spectra) -> np.ndarray:
    """Weights on ``A, B, C, D``: ``(r1 - r2, 2 r2, r3 - r4, 2 r4)``."""
    r = np.atleast_2d(np.asarray(spectra, dtype=float))
    return np.column_stack([r[:, 0] - r[:, 1], 2 * r[:, 1], r[:, 2] - r[:, 3], 2 * r[:, 3]])


def embed(spectra) -> np.ndarray:
    """Affine map from the partially ordered simplex onto the tetrahedron."""
    return barycentric_weights(spectra) @ _VERTS


def unembed(xyz) -> np.ndarray:
    """Inverse of :func:`embed`."""
    xyz = np.atleast_2d(np.asarray(xyz, dtype=float))
    # solve for weights w with w @ V = xyz and sum(w) = 1
    lhs = np.vstack([_VERTS.T, np.ones(4)])
    rhs = np.vstack([xyz.T, np.ones(xyz.shape[0])])
    w = np.linalg.solve(lhs, rhs).T
    return w @ _SPEC


REGION_FIELDS = ("r1", "r2", "r3", "r4", "x", "y", "z", "abs_sep", "full_order")


def region_points(resolution: int, band: float = 1e-9, order_tol: float = 1e-12):
    """Grid the partially ordered simplex with step ``1/resolution`` in the
    barycentric weights.

    Returns ``(spectra, xyz, abs_sep, full_order)``.
    """
    if int(resolution) < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    n = int(resolution)
    weights = np.array(
        [k for k in product(range(n + 1), repeat=3) if sum(k) <= n], dtype=float
    )
    weights = np.column_stack([weights, n - weights.sum(axis=1)]) / n
    spectra = weights @ _SPEC
    xyz = weights @ _VERTS
    abs_sep = np.all(absolute_slacks(spectra) >= -band, axis=1)
    full_order = ((spectra[:, 1] <= spectra[:, 0] + order_tol)
                  & (spectra[:, 2] <= spectra[:, 1] + order_tol)
                  & (spectra[:, 3] <= spectra[:, 2] + order_tol))
    return spectra, xyz, abs_sep, full_order


def region_export(resolution: int, stream=None, band: float = 1e-9, header_lines=()) -> str | None:
    """Write the absolute-separability point cloud as CSV.

    Comment lines (``#``) carry the vertex table; columns are
    :data:`REGION_FIELDS`. Returns the text when ``stream`` is None.
    """
    spectra, xyz, abs_sep, full_order = region_points(resolution, band)
    own = stream is None
    out = io.StringIO() if own else stream
    for line in header_lines:
        out.write(f"# {line}\n")
    for name in "ABCD":
        r = ",".join(f"{v:g}" for v in SPECTRUM_VERTICES[name])
        p = ",".join(f"{v:g}" for v in TETRAHEDRON_VERTICES[name])
        out.write(f"# vertex {name}: r=({r}) xyz=({p})\n")
    for name in ("C'", "D'"):
        r = FULL_ORDER_VERTICES[name][None, :]
        p = ",".join(f"{v:.6g}" for v in embed(r)[0])
        out.write(f"# full-order vertex {name}: r=({','.join(f'{v:.6g}' for v in r[0])}) xyz=({p})\n")
    out.write(",".join(REGION_FIELDS) + "\n")
    for r, p, a, f in zip(spectra, xyz, abs_sep, full_order):
        values = [f"{v:.12g}" for v in (*r, *p)] + [str(int(a)), str(int(f))]
        out.write(",".join(values) + "\n")
    return out.getvalue() if own else None
