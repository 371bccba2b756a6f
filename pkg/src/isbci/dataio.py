"""Trial-set container I/O, synthetic EEG-like data generation, spectrograms.

Container format (``.isbc``):

* bytes 0..5    magic ``ISBC1\\n``
* bytes 6..9    unsigned 32-bit little-endian header length ``H``
* bytes 10..10+H  UTF-8 JSON header with keys ``n``, ``c``, ``s``,
  ``sampling_rate``, ``class_names``, ``labels``
* remaining ``n*c*s*4`` bytes: little-endian float32 samples, trial-major,
  channel-major, sample-minor (C order of an ``[n, c, s]`` array)
"""

import json
import struct
from dataclasses import dataclass, field

import numpy as np

MAGIC = b"ISBC1\n"
_HEADER_LEN_FMT = "<I"


@dataclass
class EegTrialSet:
    """Labelled set of single-trial multichannel recordings.

    trials : float32 array, shape (n, c, s)
    labels : int array, shape (n,), values in [0, K)
    class_names : K strings, index == label value
    sampling_rate : Hz
    """

    trials: np.ndarray
    labels: np.ndarray
    class_names: list[str]
    sampling_rate: float = 256.0

    def __post_init__(self):
        self.trials = np.ascontiguousarray(self.trials, dtype=np.float32)
        self.labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if self.trials.ndim != 3:
            raise ValueError("trials must have shape (n, c, s)")
        if self.labels.shape != (self.trials.shape[0],):
            raise ValueError("labels length must equal number of trials")
        k = len(self.class_names)
        if k < 2:
            raise ValueError("need at least 2 classes")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= k):
            raise ValueError("labels must lie in [0, K)")
        if not np.isfinite(self.trials).all():
            raise ValueError("invalid samples")

    @property
    def n_trials(self):
        return self.trials.shape[0]

    @property
    def n_channels(self):
        return self.trials.shape[1]

    @property
    def n_samples(self):
        return self.trials.shape[2]

    @property
    def n_classes(self):
        return len(self.class_names)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def require_all_classes(self):
        """Training paths need every class populated; partial containers don't."""
        if (self.class_counts() == 0).any():
            raise ValueError("every class needs at least one trial")
        return self


@dataclass
class SyntheticConfig:
    """Settings for the seeded synthetic generator.

    ``separation`` scales the between-class covariance difference; 0 makes
    all classes identically distributed.
    """

    n_per_class: int = 100
    c: int = 8
    s: int = 128
    K: int = 2
    separation: float = 1.0
    seed: int = 0
    sampling_rate: float = 256.0
    class_names: list[str] | None = field(default=None)

    def validate(self):
        if self.n_per_class < 1:
            raise ValueError("invalid configuration: n_per_class must be >= 1")
        if self.c < 2:
            raise ValueError("invalid configuration: c must be >= 2")
        if self.s < self.c:
            raise ValueError("invalid configuration: s must be >= c")
        if self.K < 2:
            raise ValueError("invalid configuration: K must be >= 2")
        if self.separation < 0:
            raise ValueError("invalid configuration: separation must be >= 0")


def save_trialset(trialset: EegTrialSet, path) -> None:
    """Write ``trialset`` to ``path`` in the container format above."""
    header = {
        "n": int(trialset.n_trials),
        "c": int(trialset.n_channels),
        "s": int(trialset.n_samples),
        "sampling_rate": float(trialset.sampling_rate),
        "class_names": list(trialset.class_names),
        "labels": [int(v) for v in trialset.labels],
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    payload = np.ascontiguousarray(trialset.trials, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack(_HEADER_LEN_FMT, len(header_bytes)))
        fh.write(header_bytes)
        fh.write(payload)


def load_trialset(path) -> EegTrialSet:
    """Read a container written by :func:`save_trialset`.

    Raises ValueError("not a trial container") on a bad magic, ValueError
    ("corrupt container") on header/payload size mismatch and ValueError
    ("invalid samples") on non-finite payload values.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[: len(MAGIC)] != MAGIC:
        raise ValueError("not a trial container")
    off = len(MAGIC)
    if len(blob) < off + 4:
        raise ValueError("corrupt container")
    (hlen,) = struct.unpack_from(_HEADER_LEN_FMT, blob, off)
    off += 4
    if len(blob) < off + hlen:
        raise ValueError("corrupt container")
    try:
        header = json.loads(blob[off : off + hlen].decode("utf-8"))
        n, c, s = int(header["n"]), int(header["c"]), int(header["s"])
        labels = np.asarray(header["labels"], dtype=np.int64)
        class_names = [str(x) for x in header["class_names"]]
        sampling_rate = float(header["sampling_rate"])
    except (KeyError, TypeError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ValueError("corrupt container") from exc
    off += hlen
    expected = n * c * s * 4
    if len(blob) - off != expected or labels.shape != (n,):
        raise ValueError("corrupt container")
    trials = np.frombuffer(blob[off:], dtype="<f4").reshape(n, c, s)
    if not np.isfinite(trials).all():
        raise ValueError("invalid samples")
    return EegTrialSet(trials, labels, class_names, sampling_rate)


def _spd_sqrt(mat):
    w, v = np.linalg.eigh(mat)
    return (v * np.sqrt(np.maximum(w, 0.0))) @ v.T


def synthetic_class_covariances(cfg: SyntheticConfig) -> np.ndarray:
    """Hidden per-class covariances used by :func:`gen_synthetic`, shape (K, c, c).

    Each class covariance is a shared well-conditioned background plus a
    class-specific positive-semidefinite bump scaled by ``cfg.separation``.
    """
    cfg.validate()
    rng = np.random.default_rng(np.random.SeedSequence([int(cfg.seed), 0]))
    c = cfg.c
    g = rng.standard_normal((c, 2 * c))
    background = g @ g.T / (2 * c) + 0.5 * np.eye(c)
    covs = np.empty((cfg.K, c, c))
    for k in range(cfg.K):
        a = rng.standard_normal((c, c))
        covs[k] = background + cfg.separation * (a @ a.T) / c
    return covs


def gen_synthetic(cfg: SyntheticConfig) -> EegTrialSet:
    """Generate a balanced seeded trial set with SPD-colored Gaussian noise.

    Deterministic in ``cfg``: the same config always yields byte-identical
    output. Class k trials are ``sqrt(cov_k) @ z`` with z standard normal,
    so covariance-based decoders can separate classes whenever
    ``cfg.separation > 0``.
    """
    cfg.validate()
    covs = synthetic_class_covariances(cfg)
    mixers = np.stack([_spd_sqrt(covs[k]) for k in range(cfg.K)])
    rng = np.random.default_rng(np.random.SeedSequence([int(cfg.seed), 1]))
    trials = np.empty((cfg.K * cfg.n_per_class, cfg.c, cfg.s), dtype=np.float32)
    labels = np.empty(cfg.K * cfg.n_per_class, dtype=np.int64)
    for k in range(cfg.K):
        z = rng.standard_normal((cfg.n_per_class, cfg.c, cfg.s))
        colored = np.einsum("ij,njs->nis", mixers[k], z)
        sl = slice(k * cfg.n_per_class, (k + 1) * cfg.n_per_class)
        trials[sl] = colored.astype(np.float32)
        labels[sl] = k
    names = cfg.class_names
    if names is None:
        names = ["short", "long"] if cfg.K == 2 else [f"class{k}" for k in range(cfg.K)]
    return EegTrialSet(trials, labels, list(names), cfg.sampling_rate)


def export_spectrogram(trial: np.ndarray, window: int, hop: int) -> np.ndarray:
    """Per-channel magnitude spectrogram, shape (c, window//2 + 1, frames).

    Hann-windowed DFT magnitudes (linear scale, not dB); ``frames`` is
    ``(s - window)//hop + 1``.
    """
    trial = np.asarray(trial, dtype=np.float64)
    if trial.ndim != 2:
        raise ValueError("trial must have shape (c, s)")
    c, s = trial.shape
    if window < 1 or hop < 1:
        raise ValueError("window and hop must be >= 1")
    if window > s:
        raise ValueError("trial too short")
    frames = (s - window) // hop + 1
    taper = np.hanning(window)
    out = np.empty((c, window // 2 + 1, frames))
    for i in range(frames):
        seg = trial[:, i * hop : i * hop + window] * taper
        out[:, :, i] = np.abs(np.fft.rfft(seg, axis=1))
    return out


def trialset_from_csv(paths, labels, class_names, sampling_rate=256.0) -> EegTrialSet:
    """Build a trial set from CSV files, one trial per file, channels as rows."""
    arrays = [np.loadtxt(p, delimiter=",", ndmin=2) for p in paths]
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1:
        raise ValueError(f"trials disagree on shape: {sorted(shapes)}")
    return EegTrialSet(np.stack(arrays), np.asarray(labels), list(class_names), sampling_rate)
