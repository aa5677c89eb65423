import numpy as np
import pytest
from hypothesis import given

from xstates.linalg import eig2, eig4, kron2
from xstates.state import (
    BELL_PHI_PLUS,
    MAXIMALLY_MIXED,
    H_ORDER,
    HVector,
    NonFiniteError,
    NotXStructured,
    PositivityViolation,
    TraceViolation,
    XState,
    block_form,
    blockdiag_to_dense,
    dense_to_rows,
    from_dense,
    from_row,
    h_coefficients,
    h_to_dense,
    h_to_xstate,
    make_xstate,
    rows_to_dense,
    validate_rows,
    werner_state,
)
from xstates.su4 import alpha_element

from conftest import xstates

DIAG = make_xstate([0.4, 0.3, 0.2, 0.1])


def h_by_projection(x: XState) -> np.ndarray:
    """h_k = 2i Tr(rho a_k), from orthonormality of the generators."""
    rho = x.to_dense()
    return np.array([(2j * np.trace(rho @ alpha_element(k))).real for k in H_ORDER])


def test_make_xstate_accepts_valid_input():
    x = make_xstate([0.5, 0, 0, 0.5], c14=0.5)
    assert x == BELL_PHI_PLUS
    assert np.allclose(eig4(x.to_dense()), (1, 0, 0, 0))


def test_trace_violation():
    with pytest.raises(TraceViolation):
        make_xstate([0.3, 0.3, 0.3, 0.3])


@pytest.mark.parametrize("d,c14,c23,block", [
    ([1.1, 0, 0, -0.1], 0, 0, 0),
    ([0.4, 0.1, 0.1, 0.4], 0.5, 0, 1),
    ([0.1, 0.4, 0.4, 0.1], 0, 0.5, 2),
])
def test_positivity_violation_names_block(d, c14, c23, block):
    with pytest.raises(PositivityViolation) as info:
        make_xstate(d, c14, c23)
    assert info.value.block == block


def test_errors_are_collected():
    with pytest.raises(PositivityViolation) as info:
        make_xstate([0.4, 0.1, 0.1, 0.4], 0.5, 0.5)
    assert len(info.value.failures) == 2


@pytest.mark.parametrize("bad", [float("nan"), float("inf")])
def test_non_finite_rejected(bad):
    with pytest.raises(NonFiniteError):
        make_xstate([bad, 0.5, 0.25, 0.25])
    with pytest.raises(NonFiniteError):
        make_xstate([0.25] * 4, c14=complex(0, bad))


def test_within_tolerance_accepted():
    make_xstate([0.25 + 5e-13, 0.25, 0.25, 0.25])
    with pytest.raises(TraceViolation):
        make_xstate([0.25 + 5e-12, 0.25, 0.25, 0.25])


def test_from_dense_examples():
    assert from_dense(np.eye(4) / 4) == MAXIMALLY_MIXED
    m = np.eye(4, dtype=complex) / 4
    m[0, 1] = m[1, 0] = 0.1
    with pytest.raises(NotXStructured) as info:
        from_dense(m)
    assert {(i, j) for i, j, _ in info.value.entries} == {(1, 2), (2, 1)}
    product = kron2(np.diag([0.7, 0.3]), np.diag([0.6, 0.4]))
    x = from_dense(product)
    np.testing.assert_allclose(x.d, [0.42, 0.28, 0.18, 0.12], atol=1e-15)
    assert x.c14 == 0 and x.c23 == 0


def test_from_dense_rejects_nan():
    m = np.eye(4, dtype=complex) / 4
    m[0, 3] = np.nan
    with pytest.raises(NonFiniteError):
        from_dense(m)


def test_block_form_examples():
    up, lo = block_form(MAXIMALLY_MIXED)
    assert np.array_equal(up.to_array(), np.eye(2) / 4)
    assert np.array_equal(lo.to_array(), np.eye(2) / 4)
    up, lo = block_form(BELL_PHI_PLUS)
    assert np.array_equal(up.to_array(), np.full((2, 2), 0.5))
    assert np.array_equal(lo.to_array(), np.zeros((2, 2)))
    up, lo = block_form(DIAG)
    assert np.array_equal(up.to_array(), np.diag([0.4, 0.1]))
    assert np.array_equal(lo.to_array(), np.diag([0.2, 0.3]))


@given(xstates())
def test_block_form_round_trip_and_spectrum(x):
    up, lo = block_form(x)
    assert np.max(np.abs(blockdiag_to_dense(up.to_array(), lo.to_array()) - x.to_dense())) == 0.0
    blocks = sorted([*eig2(up)[:2], *eig2(lo)[:2]], reverse=True)
    np.testing.assert_allclose(eig4(x.to_dense()), blocks, atol=1e-10)


def test_h_coefficient_examples():
    assert np.array_equal(h_coefficients(MAXIMALLY_MIXED).as_array(), np.zeros(7))
    bell = h_coefficients(BELL_PHI_PLUS)
    assert (bell.h3, bell.h6, bell.h7, bell.h8, bell.h10, bell.h11, bell.h15) == (0, 0, -1, 0, 0, -1, -1)
    h = h_coefficients(DIAG)
    np.testing.assert_allclose(h.as_array(), [-0.4, -0.2, 0, 0, 0, 0, 0], atol=1e-15)


def test_h_to_xstate_examples():
    assert h_to_xstate(HVector.from_array(np.zeros(7))) == MAXIMALLY_MIXED
    bell = h_to_xstate(HVector(h3=0, h6=0, h7=-1, h8=0, h10=0, h11=-1, h15=-1))
    assert np.max(np.abs(bell.to_dense() - BELL_PHI_PLUS.to_dense())) <= 1e-15
    with pytest.raises(PositivityViolation):
        h_to_xstate(HVector(h3=-10, h6=0, h7=0, h8=0, h10=0, h11=0, h15=0))


@given(xstates())
def test_h_vector_matches_trace_projection(x):
    np.testing.assert_allclose(h_coefficients(x).as_array(), h_by_projection(x), atol=1e-12)


@given(xstates())
def test_round_trips(x):
    h = h_coefficients(x)
    assert np.max(np.abs(h_to_dense(h) - x.to_dense())) <= 1e-12
    y = h_to_xstate(h)
    assert np.max(np.abs(y.to_row() - x.to_row())) <= 1e-12
    assert np.max(np.abs(from_dense(x.to_dense()).to_row() - x.to_row())) == 0.0
    assert from_row(x.to_row()) == x


def test_diagonal_entries_have_no_imaginary_residue():
    x = h_to_xstate(HVector(h3=0.1, h6=-0.2, h7=0.3, h8=0.1, h10=-0.2, h11=0.05, h15=0.3))
    assert np.all(np.imag(np.diag(x.to_dense())) == 0)


def test_batch_helpers(rng):
    rows = np.array([x.to_row() for x in (MAXIMALLY_MIXED, BELL_PHI_PLUS, DIAG)])
    dense = rows_to_dense(rows)
    assert np.array_equal(dense_to_rows(dense), rows)
    assert validate_rows(rows).all()
    bad = rows.copy()
    bad[1, 4] = 0.6
    bad[2, 0] = np.nan
    assert validate_rows(bad).tolist() == [True, False, False]


def test_werner_family():
    assert werner_state(0) == MAXIMALLY_MIXED
    assert np.max(np.abs(werner_state(1).to_dense() - BELL_PHI_PLUS.to_dense())) <= 1e-15
    with pytest.raises(ValueError):
        werner_state(1.5)


def test_json_form():
    assert BELL_PHI_PLUS.to_json() == {"d": [0.5, 0.0, 0.0, 0.5], "c14": {"re": 0.5, "im": 0.0},
                                        "c23": {"re": 0.0, "im": 0.0}}


def test_unchecked_skips_validation():
    x = XState.unchecked([1, 1, 1, 1])
    assert x.d == (1.0, 1.0, 1.0, 1.0)
