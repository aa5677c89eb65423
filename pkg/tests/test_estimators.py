import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from xstates.estimators import OrbitTypeClassifier, PPTSeparabilityClassifier, XStateDiagonalizer
from xstates.sampling import Measure, SamplerConfig, sample_xstate_rows
from xstates.separability import pt_min_eigenvalue_rows
from xstates.state import BELL_PHI_PLUS, MAXIMALLY_MIXED

ROWS = sample_xstate_rows(SamplerConfig(Measure.PARAM_UNIFORM_REJECTION, seed=9, count=3000))


def test_params_and_clone():
    est = PPTSeparabilityClassifier(method="oracle", tol_band=1e-6)
    assert est.get_params() == {"method": "oracle", "tol_band": 1e-6, "tol_structural": None}
    assert clone(est).get_params() == est.get_params()
    est.set_params(method="elementwise")
    assert est.method == "elementwise"


@pytest.mark.parametrize("est", [XStateDiagonalizer(), OrbitTypeClassifier(), PPTSeparabilityClassifier()])
def test_requires_fit(est):
    with pytest.raises(NotFittedError):
        (est.transform if hasattr(est, "transform") else est.predict)(ROWS[:2])


@pytest.mark.parametrize("bad", [
    np.zeros((2, 7)),
    np.full((1, 8), np.nan),
    np.array([[0.3, 0.3, 0.3, 0.3, 0, 0, 0, 0]]),
])
def test_input_validation(bad):
    with pytest.raises(ValueError):
        PPTSeparabilityClassifier().fit(bad)


def test_separability_methods_agree_outside_band():
    oracle = pt_min_eigenvalue_rows(ROWS)
    firm = np.abs(oracle) > 1e-9
    preds = {m: PPTSeparabilityClassifier(method=m).fit(ROWS).predict(ROWS)
             for m in ("elementwise", "oracle", "inequalities")}
    assert np.array_equal(preds["elementwise"][firm], preds["oracle"][firm])
    assert np.array_equal(preds["inequalities"][firm], preds["oracle"][firm])
    assert 0 < preds["oracle"].mean() < 1


def test_decision_function_on_fixtures():
    X = np.stack([BELL_PHI_PLUS.to_row(), MAXIMALLY_MIXED.to_row()])
    clf = PPTSeparabilityClassifier().fit(X)
    np.testing.assert_allclose(clf.decision_function(X), [-0.25, 0.0625])
    assert clf.predict(X).tolist() == [0, 1]
    with pytest.raises(ValueError):
        PPTSeparabilityClassifier(method="nope").fit(X).predict(X)


def test_orbit_classifier_labels():
    X = np.stack([MAXIMALLY_MIXED.to_row(), BELL_PHI_PLUS.to_row(), ROWS[0]])
    clf = OrbitTypeClassifier().fit(X)
    assert clf.predict(X).tolist() == ["MaximallyMixed0D", "DegenerateLower2D", "Generic4D"]
    assert np.array_equal(OrbitTypeClassifier(route="spectrum").fit(X).predict(X), clf.predict(X))
    assert clf.predict_marginal(X).tolist() == [False, False, False]


def test_diagonalizer_in_pipeline():
    pipe = make_pipeline(XStateDiagonalizer())
    out = pipe.fit_transform(ROWS[:10])
    assert out.shape == (10, 8)
    np.testing.assert_allclose(out[:, :4].sum(axis=1), 1.0, atol=1e-12)
    assert list(pipe[-1].get_feature_names_out()) == ["r1", "r2", "r3", "r4", "phi1", "psi1", "phi2", "psi2"]
