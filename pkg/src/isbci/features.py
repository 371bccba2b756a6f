"""PCA dimension reduction and stratified fold construction."""

from dataclasses import dataclass

import numpy as np


@dataclass
class PcaModel:
    """Learned linear projection: orthonormal component rows over centered data.

    ``components`` has shape (n_rf, n_f); ``eigenvalues`` are the matching
    sample-covariance eigenvalues, sorted non-increasing.
    """

    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray

    @property
    def n_components(self):
        return self.components.shape[0]

    @property
    def n_features(self):
        return self.components.shape[1]


@dataclass
class FoldAssignment:
    """Fold index per sample; per class the fold sizes differ by at most 1."""

    fold_of: np.ndarray
    k_folds: int

    def test_indices(self, fold):
        return np.flatnonzero(self.fold_of == fold)

    def train_indices(self, fold):
        return np.flatnonzero(self.fold_of != fold)


def _fix_signs(components: np.ndarray) -> np.ndarray:
    # Deterministic orientation: largest-magnitude entry of each row positive.
    idx = np.abs(components).argmax(axis=1)
    signs = np.sign(components[np.arange(components.shape[0]), idx])
    signs[signs == 0] = 1.0
    return components * signs[:, None]


def pca_fit(x: np.ndarray, n_rf: int) -> PcaModel:
    """Fit the top ``n_rf`` principal directions of ``x`` (n_tr, n_f).

    Uses the n_f x n_f covariance eigendecomposition when features are the
    short axis, otherwise the n_tr x n_tr Gram matrix (needed when tangent
    vectors are much wider than the training set, e.g. 3600 features from
    ~540 trials).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("x must be 2-D")
    n_tr, n_f = x.shape
    if n_tr < 2:
        raise ValueError("invalid configuration: need at least 2 training rows")
    if not 1 <= n_rf <= min(n_tr, n_f):
        raise ValueError(
            f"invalid configuration: n_rf={n_rf} must lie in [1, min(n_tr={n_tr}, n_f={n_f})]"
        )
    mean = x.mean(axis=0)
    xc = x - mean
    if n_f <= n_tr:
        cov = xc.T @ xc / (n_tr - 1)
        w, v = np.linalg.eigh(cov)
        order = np.argsort(w)[::-1][:n_rf]
        eigenvalues = w[order]
        components = v[:, order].T
    else:
        gram = xc @ xc.T / (n_tr - 1)
        w, u = np.linalg.eigh(gram)
        order = np.argsort(w)[::-1][:n_rf]
        eigenvalues = w[order]
        components = xc.T @ u[:, order]
        norms = np.linalg.norm(components, axis=0)
        norms[norms == 0] = 1.0
        components = (components / norms).T
    return PcaModel(mean, _fix_signs(np.ascontiguousarray(components)), eigenvalues)


def pca_transform(model: PcaModel, x: np.ndarray) -> np.ndarray:
    """Project rows of ``x`` onto the learned components: ``(x - mean) @ components.T``."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.n_features:
        raise ValueError("dimension mismatch with fitted model")
    return (x - model.mean) @ model.components.T


def pca_inverse_transform(model: PcaModel, y: np.ndarray) -> np.ndarray:
    """Map reduced rows back to the original feature space."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 2 or y.shape[1] != model.n_components:
        raise ValueError("dimension mismatch with fitted model")
    return y @ model.components + model.mean


def stratified_kfold(labels: np.ndarray, k_folds: int, seed: int) -> FoldAssignment:
    """Seeded stratified fold assignment.

    Within each class the sample indices are shuffled and dealt round-robin
    to the folds, so per-class fold sizes differ by at most one and the
    class proportions are preserved in every fold.
    """
    labels = np.asarray(labels)
    if k_folds < 2:
        raise ValueError("k_folds must be >= 2")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0xF01D]))
    fold_of = np.full(labels.shape[0], -1, dtype=np.int64)
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        if idx.size < k_folds:
            raise ValueError("insufficient samples for stratification")
        perm = rng.permutation(idx)
        fold_of[perm] = np.arange(perm.size) % k_folds
    return FoldAssignment(fold_of, k_folds)
