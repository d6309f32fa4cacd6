"""scikit-learn style wrappers around the encoder and the decoders.

Rows of the input arrays are words; columns are positions (or information
bits). Both estimators are stateless apart from what ``fit`` compiles.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .code import CodeSpec, canonical_information_set, is_information_set, systematic_form
from .decoder import compile_full, compile_info, compile_punctured, decode_batch
from .families import AdmissibleFamily
from .gf2 import make_ordering

SCOPES = ("full", "info", "punctured")


def _binary(X, n_features: int | None = None, name: str = "X") -> np.ndarray:
    X = check_array(X, dtype=None, ensure_2d=True)
    if not np.isin(X, (0, 1)).all():
        raise ValueError(f"{name} must contain only 0 and 1")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"{name} has {X.shape[1]} columns, expected {n_features}")
    return X.astype(np.uint8)


def _spec(r: int, m: int, ordering: str) -> CodeSpec:
    return CodeSpec(r, m, make_ordering(m, ordering))


def _info_set(spec: CodeSpec, info_set) -> tuple[int, ...]:
    if info_set is None or info_set == "canonical":
        return canonical_information_set(spec)
    J = tuple(sorted(int(j) for j in info_set))
    if len(J) != spec.k or not is_information_set(spec, J):
        raise ValueError(f"{list(J)} is not an information set of {spec}")
    return J


class RMEncoder(TransformerMixin, BaseEstimator):
    """Systematic encoder: information bits land unchanged on ``info_set``."""

    def __init__(self, r: int = 2, m: int = 5, ordering: str = "auto", info_set=None):
        self.r = r
        self.m = m
        self.ordering = ordering
        self.info_set = info_set

    def fit(self, X=None, y=None):
        self.spec_ = _spec(self.r, self.m, self.ordering)
        self.info_set_ = _info_set(self.spec_, self.info_set)
        self.generator_ = systematic_form(self.spec_, self.info_set_)
        self.generator_array_ = self.generator_.to_array().astype(np.int64)
        self.n_features_in_ = self.spec_.k
        return self

    def transform(self, X):
        check_is_fitted(self, "generator_")
        X = _binary(X, self.spec_.k)
        return ((X.astype(np.int64) @ self.generator_array_) & 1).astype(np.uint8)

    def inverse_transform(self, C):
        """Information bits read off ``info_set`` (no error correction)."""
        check_is_fitted(self, "generator_")
        C = _binary(C, self.spec_.n, "C")
        return C[:, list(self.info_set_)]


class MajorityLogicDecoder(BaseEstimator):
    """Two-step majority-logic decoder.

    ``scope='full'`` corrects every position (Chen); ``'info'`` corrects the
    information positions of ``family``; ``'punctured'`` does the same from
    n-1 symbols, never reading the position of the point 0.
    """

    def __init__(self, r: int = 2, m: int = 5, ordering: str = "auto", scope: str = "full",
                 family: AdmissibleFamily | None = None):
        self.r = r
        self.m = m
        self.ordering = ordering
        self.scope = scope
        self.family = family

    def fit(self, X=None, y=None):
        if self.scope not in SCOPES:
            raise ValueError(f"scope must be one of {SCOPES}, got {self.scope!r}")
        if self.scope == "full":
            spec = _spec(self.r, self.m, self.ordering)
            self.system_ = compile_full(spec)
        else:
            if self.family is None:
                raise ValueError(f"scope={self.scope!r} needs an admissible family")
            spec = self.family.spec
            if (spec.r, spec.m) != (self.r, self.m):
                raise ValueError("family does not match r and m")
            self.system_ = compile_info(spec, self.family) if self.scope == "info" else compile_punctured(self.family)
        self.spec_ = spec
        self.n_features_in_ = spec.n - 1 if self.scope == "punctured" else spec.n
        return self

    def _run(self, Y):
        check_is_fitted(self, "system_")
        Y = _binary(Y, self.n_features_in_, "Y")
        return decode_batch(Y, self.system_)

    def predict(self, Y):
        """Corrected words (full scope) or corrected information bits."""
        out, _ = self._run(Y)
        if self.scope == "full":
            return out
        return out[:, list(self.system_.positions)]

    def flips(self, Y):
        """Boolean flip indicators over the decoded positions."""
        return self._run(Y)[1]


__all__ = ["MajorityLogicDecoder", "RMEncoder", "SCOPES"]
