import io

import numpy as np
import pytest
from hypothesis import given

from xstates.orbits import OrbitKind, classify_rows
from xstates.sampling import (
    FULL_ORDER_VERTICES,
    REGION_FIELDS,
    SPECTRUM_VERTICES,
    TETRAHEDRON_VERTICES,
    Measure,
    SamplerConfig,
    barycentric_weights,
    embed,
    make_rng,
    region_export,
    region_points,
    sample_spectra_array,
    sample_spectrum,
    sample_xstate,
    sample_xstate_rows,
    unembed,
)
from xstates.separability import elementwise_slacks_rows
from xstates.state import validate_rows

from conftest import spectra

# separable fraction of 10^4 parameter-uniform draws at seed 0 (repository regression value)
PARAM_UNIFORM_SEPARABLE_FRACTION = 0.2911


def test_config_validation():
    with pytest.raises(ValueError):
        SamplerConfig(count=0)
    with pytest.raises(ValueError):
        SamplerConfig(seed=-1)
    with pytest.raises(ValueError):
        SamplerConfig(measure="hilbert-schmidt")
    assert SamplerConfig("spectrum-uniform").measure is Measure.SPECTRUM_UNIFORM


def test_spectrum_stream_is_reproducible_and_ordered():
    cfg = SamplerConfig(seed=42, count=3)
    a, b = list(sample_spectrum(cfg)), list(sample_spectrum(cfg))
    assert a == b and len(a) == 3
    assert list(sample_spectrum(SamplerConfig(seed=43, count=3))) != a
    for r in a:
        assert r.in_simplex(1e-15)


def test_simplex_mean_before_sorting():
    n = 100_000
    r = sample_spectra_array(make_rng(7), n, sort_pairs=False)
    # each coordinate of a flat Dirichlet(1,1,1,1) has mean 1/4 and variance 3/80
    sigma = np.sqrt(3 / 80 / n)
    assert np.all(np.abs(r.mean(axis=0) - 0.25) <= 3 * sigma)
    np.testing.assert_allclose(r.sum(axis=1), 1.0, atol=1e-15)


@pytest.mark.parametrize("measure", list(Measure))
def test_xstate_streams_validate_and_repeat(measure):
    cfg = SamplerConfig(measure, seed=3, count=2000)
    rows = sample_xstate_rows(cfg)
    assert rows.shape == (2000, 8)
    assert validate_rows(rows).all()
    assert rows.tobytes() == sample_xstate_rows(cfg).tobytes()
    small = SamplerConfig(measure, seed=3, count=5)
    states = list(sample_xstate(small))
    assert np.array_equal(np.stack([s.to_row() for s in states]), sample_xstate_rows(small))


def test_param_uniform_discs_respected():
    rows = sample_xstate_rows(SamplerConfig(Measure.PARAM_UNIFORM_REJECTION, seed=1, count=5000))
    assert np.all(rows[:, 4] ** 2 + rows[:, 5] ** 2 <= rows[:, 0] * rows[:, 3])
    assert np.all(rows[:, 6] ** 2 + rows[:, 7] ** 2 <= rows[:, 1] * rows[:, 2])


def test_param_uniform_separable_fraction_regression():
    rows = sample_xstate_rows(SamplerConfig(Measure.PARAM_UNIFORM_REJECTION, seed=0, count=10_000))
    frac = float(np.mean(elementwise_slacks_rows(rows).min(axis=1) >= -1e-9))
    half_width = 1.96 * np.sqrt(frac * (1 - frac) / rows.shape[0])
    assert frac == pytest.approx(PARAM_UNIFORM_SEPARABLE_FRACTION, abs=1e-12)
    assert 0.25 < frac - half_width and frac + half_width < 0.33


def test_spectrum_uniform_samples_are_generic():
    rows = sample_xstate_rows(SamplerConfig(seed=11, count=5000))
    codes, marginal = classify_rows(rows)
    assert np.all((codes == 0) | marginal)


def test_vertex_tables():
    assert set(TETRAHEDRON_VERTICES) == set(SPECTRUM_VERTICES) == {"A", "B", "C", "D"}
    pts = np.stack(list(TETRAHEDRON_VERTICES.values()))
    d = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    assert np.allclose(d[~np.eye(4, dtype=bool)], d[0, 1])
    for name in "ABCD":
        np.testing.assert_allclose(embed(SPECTRUM_VERTICES[name])[0], TETRAHEDRON_VERTICES[name])
    full = np.stack(list(FULL_ORDER_VERTICES.values()))
    assert np.all(np.diff(full, axis=1) <= 0)


@given(spectra)
def test_embedding_is_affine_and_invertible(r):
    w = barycentric_weights(r)
    assert w.min() >= -1e-15 and w.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(unembed(embed(r)), r[None], atol=1e-14)


def test_region_resolution_two():
    s, xyz, abs_sep, full = region_points(2)
    assert s.shape == (10, 4)
    verts = {tuple(v) for v in SPECTRUM_VERTICES.values()}
    assert verts <= {tuple(v) for v in s}
    mids = {tuple((SPECTRUM_VERTICES[a] + SPECTRUM_VERTICES[b]) / 2) for a in "ABCD" for b in "ABCD" if a < b}
    assert {tuple(v) for v in s} == verts | mids


def test_region_flags():
    s, _, abs_sep, full = region_points(4)
    index = {tuple(v): i for i, v in enumerate(s)}
    assert not abs_sep[index[(1.0, 0.0, 0.0, 0.0)]]
    assert abs_sep[index[(0.25, 0.25, 0.25, 0.25)]]
    assert full[index[(0.25, 0.25, 0.25, 0.25)]]
    assert not full[index[(0.0, 0.0, 1.0, 0.0)]]


def test_region_flags_swap_symmetric():
    s, _, abs_sep, _ = region_points(12)
    index = {tuple(np.round(v, 12)): i for i, v in enumerate(s)}
    for i, v in enumerate(s):
        j = index[tuple(np.round(v[[2, 3, 0, 1]], 12))]
        assert abs_sep[i] == abs_sep[j]


def test_region_export_csv():
    text = region_export(3, header_lines=["tolerances: band=1e-09"])
    lines = text.splitlines()
    assert lines[0] == "# tolerances: band=1e-09"
    assert any(line.startswith("# vertex A") for line in lines)
    body = [line for line in lines if not line.startswith("#")]
    assert body[0] == ",".join(REGION_FIELDS)
    assert len(body) - 1 == 20
    buf = io.StringIO()
    assert region_export(3, stream=buf) is None
    assert buf.getvalue() == region_export(3)
    with pytest.raises(ValueError):
        region_points(1)
