import numpy as np
import pytest
from scipy import sparse
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ldpcsched.estimator import LDPCDecoder
from ldpcsched.exceptions import ConfigError, DimensionError


def test_params_round_trip():
    dec = LDPCDecoder(algorithm="rbp", gamma=0.3)
    params = dec.get_params()
    assert params["algorithm"] == "rbp" and params["gamma"] == 0.3 and params["lambda_"] == 0.2
    twin = clone(dec)
    assert twin.get_params() == params
    dec.set_params(t_max=7)
    assert dec.get_params()["t_max"] == 7


def test_fit_inputs_agree(code96):
    H = code96.to_dense()
    for source in (H, sparse.csr_matrix(H), code96):
        dec = LDPCDecoder().fit(source)
        assert dec.graph_ == code96 and dec.n_features_in_ == 96


def test_fit_rejects_bad_matrix():
    with pytest.raises(ValueError):
        LDPCDecoder().fit(np.array([[1, 2, 0]]))
    with pytest.raises(ConfigError):
        LDPCDecoder(alpha=0.9).fit(np.eye(2, 4))


def test_predict_transform(code96):
    rng = np.random.default_rng(0)
    X = 2.0 + rng.normal(0, 1.0, (5, 96))
    dec = LDPCDecoder(algorithm="flooding").fit(code96)
    bits = dec.predict(X)
    assert bits.shape == (5, 96) and bits.dtype == np.uint8
    post = dec.transform(X)
    assert np.array_equal((post < 0).astype(np.uint8), bits)
    assert dec.iterations_.shape == (5,) and dec.converged_.all()
    assert dec.score(X, np.zeros((5, 96), dtype=np.uint8)) == 1.0
    res = dec.decode_one(X[0])
    assert np.array_equal(res.decoded, bits[0])


def test_predict_validation(code96):
    with pytest.raises(NotFittedError):
        LDPCDecoder().predict(np.zeros((1, 96)))
    dec = LDPCDecoder().fit(code96)
    with pytest.raises(DimensionError):
        dec.predict(np.zeros((1, 95)))
