"""scikit-learn style wrapper around the decoders.

``fit`` takes the parity-check matrix (dense, scipy sparse, or a
:class:`TannerGraph`); ``predict`` maps rows of channel LLRs to hard
decisions and ``transform`` maps them to final posterior LLRs.

Examples
--------
>>> import numpy as np
>>> from ldpcsched.estimator import LDPCDecoder
>>> H = np.array([[1, 1, 0, 1], [0, 1, 1, 1]])
>>> dec = LDPCDecoder(algorithm="flooding", t_max=5).fit(H)
>>> dec.predict(np.array([[2.0, -1.5, 3.0, 0.5]])).tolist()
[[0, 1, 0, 1]]
"""
from __future__ import annotations

import numpy as np
from scipy import sparse
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .codes import TannerGraph
from .exceptions import DimensionError
from .schedulers import DecoderConfig, decode


class LDPCDecoder(TransformerMixin, BaseEstimator):
    """Belief-propagation decoder with a selectable schedule.

    Parameters mirror :class:`DecoderConfig`.

    Attributes
    ----------
    graph_ : TannerGraph
    config_ : DecoderConfig
    n_features_in_ : int
        Code length.
    iterations_ : ndarray
        Iterations used per row by the most recent ``predict``/``transform``.
    converged_ : ndarray of bool
    """

    def __init__(self, algorithm="arcid", t_max=20, alpha=0.65, beta=0.35, gamma=0.15,
                 lambda_=0.2, decay=0.9, list_size=4, early_stop=True):
        self.algorithm = algorithm
        self.t_max = t_max
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.lambda_ = lambda_
        self.decay = decay
        self.list_size = list_size
        self.early_stop = early_stop

    def fit(self, H, y=None):
        if isinstance(H, TannerGraph):
            graph = H
        else:
            if sparse.issparse(H):
                H = H.toarray()
            H = check_array(H, dtype=None, ensure_min_samples=1, ensure_min_features=2)
            if not np.isin(H, (0, 1)).all():
                raise ValueError("parity-check matrix entries must be 0 or 1")
            graph = TannerGraph.from_dense(H.astype(np.uint8))
        self.config_ = DecoderConfig(**self.get_params())
        self.graph_ = graph
        self.n_features_in_ = graph.n
        return self

    def _run(self, X):
        check_is_fitted(self, "graph_")
        X = check_array(X, dtype=np.float64, ensure_all_finite=False)
        if X.shape[1] != self.n_features_in_:
            raise DimensionError(f"expected {self.n_features_in_} LLRs per row, got {X.shape[1]}")
        results = [decode(self.graph_, row, self.config_) for row in X]
        self.iterations_ = np.array([r.iterations_used for r in results])
        self.converged_ = np.array([r.converged for r in results])
        return results

    def predict(self, X) -> np.ndarray:
        """Hard decisions, shape ``(n_samples, n)``, dtype uint8."""
        return np.stack([r.decoded for r in self._run(X)])

    def transform(self, X) -> np.ndarray:
        """Final posterior LLRs, shape ``(n_samples, n)``."""
        return np.stack([r.final_posterior for r in self._run(X)])

    def decode_one(self, llrs):
        """Full :class:`DecodeResult` for a single frame."""
        check_is_fitted(self, "graph_")
        return decode(self.graph_, llrs, self.config_)

    def score(self, X, y) -> float:
        """Fraction of correctly decoded bits."""
        y = check_array(y, dtype=np.uint8)
        return float((self.predict(X) == y).mean())
