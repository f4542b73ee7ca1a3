import numpy as np
import pytest

from indefgeom import geometry as geo
from indefgeom import zoo
from indefgeom.diffeo import DiffeoMap
from indefgeom.errors import InputError

MODEL_IDS = [d["id"] for d in zoo.list_models()]


def test_registry_lists_required_models():
    required = {
        "flat", "const_curv", "conformal_flat", "pp_wave", "flat_kaehler", "const_hol",
        "kaehler_product", "hermitian_nonkaehler", "identity", "scaled_identity", "dilation",
        "pseudo_orthogonal", "lorentz_boost", "inversion", "random_linear",
    }
    assert required <= set(MODEL_IDS)


@pytest.mark.parametrize("model_id", MODEL_IDS)
def test_every_entry_meets_its_expectations(model_id):
    results = zoo.validate_model(model_id, np.random.default_rng(11))
    assert results
    failed = [r.as_dict() for r in results if not r.passed]
    assert not failed


def test_flat_index_two():
    m = zoo.instantiate_model("flat", n=4, nu=2)
    np.testing.assert_array_equal(geo.metric_at(m, [0.3, 0.1, 0, 2]), np.diag([-1.0, -1, 1, 1]))


@pytest.mark.parametrize("n, nu", [(2, 1), (3, 0), (4, 1), (4, 2), (5, 3), (6, 2)])
def test_signature_matches_request(rng, n, nu):
    for model_id in ("flat", "const_curv"):
        m = zoo.instantiate_model(model_id, n=n, nu=nu)
        for p in zoo.sample_points(model_id, rng, 5, n=n, nu=nu):
            assert geo.orthonormal_frame(geo.metric_at(m, p)).index == nu


def test_sample_points_stay_in_box(rng):
    for model_id in MODEL_IDS:
        for p in zoo.sample_points(model_id, rng, 4):
            obj = zoo.instantiate_model(model_id)
            m = obj.source if isinstance(obj, DiffeoMap) else obj
            geo.metric_at(m, p)


def test_named_sigma_and_raw_expression_agree():
    a = zoo.conformal_flat("linear_x1")
    b = zoo.conformal_flat("x1")
    p = [0.1, 0.2, 0.3, 0.4]
    np.testing.assert_array_equal(geo.metric_at(a, p), geo.metric_at(b, p))


def test_unknown_model_rejected():
    with pytest.raises(InputError):
        zoo.instantiate_model("klein_bottle")


def test_pseudo_orthogonal_matrix_preserves_eta():
    for nu in range(5):
        L = zoo.pseudo_orthogonal_matrix(4, nu, seed=nu)
        eta = np.diag([-1.0] * nu + [1.0] * (4 - nu))
        np.testing.assert_allclose(L.T @ eta @ L, eta, atol=1e-12)
