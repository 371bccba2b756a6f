"""Covariance estimation and geometry of symmetric positive-definite matrices.

Channel covariances of multichannel trials live on the SPD manifold; this
module provides the matrix functions (log, sqrt, exp via the symmetric
eigendecomposition), the geometric mean, the tangent-space projection that
turns matrices into vectors, and a minimum-distance-to-mean classifier used
as an independent separability check.
"""

import numpy as np

EIG_FLOOR_REL = 1e-12
SYM_TOL_REL = 1e-10


def covariance(trial: np.ndarray, shrinkage: float = 0.0, center: bool = False) -> np.ndarray:
    """Channel covariance ``E @ E.T / s`` of a (c, s) trial.

    Parameters
    ----------
    trial : ndarray, shape (c, s)
        One multichannel recording.
    shrinkage : float
        Adds ``shrinkage * (trace/c) * I`` to regularize ill-conditioned
        estimates (e.g. many channels, few samples).
    center : bool
        Subtract per-channel means first. Off by default: bandpassed
        signals are near zero-mean and the plain cross-product form is the
        documented contract.
    """
    e = np.asarray(trial, dtype=np.float64)
    if e.ndim != 2:
        raise ValueError("trial must have shape (c, s)")
    if e.shape[1] < 1:
        raise ValueError("trial needs at least one sample")
    if shrinkage < 0:
        raise ValueError("shrinkage must be >= 0")
    if not np.isfinite(e).all():
        raise ValueError("invalid samples")
    if center:
        e = e - e.mean(axis=1, keepdims=True)
    c = e @ e.T / e.shape[1]
    c = 0.5 * (c + c.T)
    if shrinkage > 0:
        c = c + shrinkage * (np.trace(c) / c.shape[0]) * np.eye(c.shape[0])
    return c


def _check_symmetric(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    scale = np.abs(a).max()
    if scale > 0 and np.abs(a - a.T).max() > SYM_TOL_REL * scale:
        raise ValueError("matrix not symmetric")
    return 0.5 * (a + a.T)


def _spd_eigh(a: np.ndarray):
    """Eigendecomposition with the positive-definiteness gate."""
    a = _check_symmetric(a)
    w, v = np.linalg.eigh(a)
    if w[-1] <= 0 or w[0] <= EIG_FLOOR_REL * w[-1]:
        raise ValueError("matrix not positive-definite")
    return w, v


def logm(a: np.ndarray) -> np.ndarray:
    """Matrix logarithm ``V log(D) V^T`` of an SPD matrix."""
    w, v = _spd_eigh(a)
    return (v * np.log(w)) @ v.T


def sqrtm(a: np.ndarray) -> np.ndarray:
    """Matrix square root of an SPD matrix; ``sqrtm(a) @ sqrtm(a) == a``."""
    w, v = _spd_eigh(a)
    return (v * np.sqrt(w)) @ v.T


def invsqrtm(a: np.ndarray) -> np.ndarray:
    """Inverse matrix square root of an SPD matrix."""
    w, v = _spd_eigh(a)
    return (v * (1.0 / np.sqrt(w))) @ v.T


def expm(a: np.ndarray) -> np.ndarray:
    """Matrix exponential of a symmetric matrix."""
    a = _check_symmetric(a)
    w, v = np.linalg.eigh(a)
    return (v * np.exp(w)) @ v.T


def is_spd(a: np.ndarray) -> bool:
    """True when ``a`` passes the symmetry and positive-definiteness gates."""
    try:
        _spd_eigh(a)
    except ValueError:
        return False
    return True


def covariance_many(trials: np.ndarray, shrinkage: float = 0.0,
                    center: bool = False) -> np.ndarray:
    """Batched :func:`covariance` over an (n, c, s) stack."""
    e = np.asarray(trials, dtype=np.float64)
    if e.ndim != 3:
        raise ValueError("trials must have shape (n, c, s)")
    if shrinkage < 0:
        raise ValueError("shrinkage must be >= 0")
    if not np.isfinite(e).all():
        raise ValueError("invalid samples")
    if center:
        e = e - e.mean(axis=2, keepdims=True)
    covs = e @ e.transpose(0, 2, 1) / e.shape[2]
    covs = 0.5 * (covs + covs.transpose(0, 2, 1))
    if shrinkage > 0:
        c = covs.shape[1]
        traces = np.trace(covs, axis1=1, axis2=2)
        covs = covs + (shrinkage / c) * traces[:, None, None] * np.eye(c)
    return covs


def _batched_logm_psd(mats: np.ndarray) -> np.ndarray:
    """logm over a stack of SPD matrices via the batched eigendecomposition."""
    w, v = np.linalg.eigh(mats)
    if np.any(w[:, 0] <= EIG_FLOOR_REL * w[:, -1]) or np.any(w[:, -1] <= 0):
        raise ValueError("matrix not positive-definite")
    return (v * np.log(w)[:, None, :]) @ v.transpose(0, 2, 1)


def tangent_project_many(covs: np.ndarray, c_m: np.ndarray) -> np.ndarray:
    """Batched :func:`tangent_project` of an (n, c, c) stack at reference ``c_m``."""
    covs = np.asarray(covs, dtype=np.float64)
    if covs.ndim != 3 or covs.shape[1:] != np.asarray(c_m).shape:
        raise ValueError("dimension mismatch between matrices and reference")
    root = sqrtm(c_m)
    inv_root = invsqrtm(c_m)
    whitened = inv_root @ covs @ inv_root
    whitened = 0.5 * (whitened + whitened.transpose(0, 2, 1))
    projected = root @ _batched_logm_psd(whitened) @ root
    return 0.5 * (projected + projected.transpose(0, 2, 1))


def mean_covariance(mats, metric: str = "riemannian", tol: float = 1e-8,
                    max_iter: int = 50) -> np.ndarray:
    """Mean of a set of SPD matrices.

    ``riemannian`` (default) iterates the geometric-mean fixed point
    ``M <- M^1/2 exp(mean_i logm(M^-1/2 C_i M^-1/2)) M^1/2`` from the
    arithmetic mean until the Frobenius norm of the mean tangent update
    drops below ``tol``. ``arithmetic`` averages elementwise.
    """
    mats = [np.asarray(m, dtype=np.float64) for m in mats]
    if not mats:
        raise ValueError("need at least one matrix")
    dim = mats[0].shape
    if any(m.shape != dim for m in mats):
        raise ValueError("matrices disagree on dimension")
    if metric == "arithmetic":
        return np.mean(mats, axis=0)
    if metric != "riemannian":
        raise ValueError(f"unknown metric: {metric!r}")
    stack = np.stack(mats)
    mean = stack.mean(axis=0)
    for _ in range(max_iter + 1):
        root = sqrtm(mean)
        inv_root = invsqrtm(mean)
        whitened = inv_root @ stack @ inv_root
        whitened = 0.5 * (whitened + whitened.transpose(0, 2, 1))
        update = _batched_logm_psd(whitened).mean(axis=0)
        update = 0.5 * (update + update.T)  # exact symmetry survives rounding
        if np.linalg.norm(update, "fro") < tol:
            return mean
        mean = root @ expm(update) @ root
    raise ValueError("mean iteration diverged")


def tangent_project(c_i: np.ndarray, c_m: np.ndarray) -> np.ndarray:
    """Project an SPD matrix to the tangent space at the reference mean.

    Returns the symmetric matrix
    ``C_m^1/2 logm(C_m^-1/2 C_i C_m^-1/2) C_m^1/2``.
    """
    c_i = np.asarray(c_i, dtype=np.float64)
    c_m = np.asarray(c_m, dtype=np.float64)
    if c_i.shape != c_m.shape:
        raise ValueError("dimension mismatch between matrix and reference")
    root = sqrtm(c_m)
    inv_root = invsqrtm(c_m)
    p = root @ logm(inv_root @ c_i @ inv_root) @ root
    return 0.5 * (p + p.T)


def vectorize(p: np.ndarray, scheme: str = "row-concat") -> np.ndarray:
    """Flatten a symmetric matrix into a feature vector.

    ``row-concat`` concatenates the rows (length c*c, the default).
    ``upper-weighted`` keeps the upper triangle with off-diagonal entries
    scaled by sqrt(2) (length c*(c+1)/2, an isometric alternative).
    """
    p = _check_symmetric(p)
    if scheme == "row-concat":
        return p.reshape(-1).copy()
    if scheme == "upper-weighted":
        c = p.shape[0]
        iu = np.triu_indices(c)
        weights = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
        return p[iu] * weights
    raise ValueError(f"unknown scheme: {scheme!r}")


def matrix_from_vector(vec: np.ndarray, scheme: str = "row-concat") -> np.ndarray:
    """Inverse of :func:`vectorize`; rebuilds the symmetric matrix."""
    vec = np.asarray(vec, dtype=np.float64)
    if scheme == "row-concat":
        c = int(round(np.sqrt(vec.size)))
        if c * c != vec.size:
            raise ValueError("vector length is not a square")
        p = vec.reshape(c, c)
        return 0.5 * (p + p.T)
    if scheme == "upper-weighted":
        c = int(round((np.sqrt(1 + 8 * vec.size) - 1) / 2))
        if c * (c + 1) // 2 != vec.size:
            raise ValueError("vector length is not triangular")
        iu = np.triu_indices(c)
        weights = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
        p = np.zeros((c, c))
        p[iu] = vec / weights
        return p + np.triu(p, 1).T
    raise ValueError(f"unknown scheme: {scheme!r}")


def geodesic_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Affine-invariant distance ``||logm(A^-1/2 B A^-1/2)||_F``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    inv_root = invsqrtm(a)
    return float(np.linalg.norm(logm(inv_root @ b @ inv_root), "fro"))


class MdmClassifier:
    """Minimum distance to (Riemannian) mean over covariance matrices.

    Deliberately simple: one geometric mean per class, nearest mean wins.
    Serves as an independent oracle for checking that a dataset is
    separable by covariance structure at all.
    """

    def __init__(self, tol=1e-8, max_iter=50):
        self.tol = tol
        self.max_iter = max_iter
        self.class_means_ = None
        self.classes_ = None

    def fit(self, covs, labels):
        covs = np.asarray(covs, dtype=np.float64)
        labels = np.asarray(labels)
        self.classes_ = np.unique(labels)
        self.class_means_ = [
            mean_covariance(covs[labels == k], tol=self.tol, max_iter=self.max_iter)
            for k in self.classes_
        ]
        return self

    def predict(self, covs):
        if self.class_means_ is None:
            raise ValueError("classifier is not fitted")
        dists = np.array(
            [[geodesic_distance(c, m) for m in self.class_means_] for c in covs]
        )
        return self.classes_[dists.argmin(axis=1)]
