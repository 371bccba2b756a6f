"""Cross-validated pipeline runner and evaluation statistics.

Covers classification accuracy, fold summaries (mean/std/sem/max/min),
chance-corrected kappa, the two-tailed paired t-test (own Student-t CDF via
the regularized incomplete beta, no external stats dependency), information
per trial and information transfer rate, and report rendering.
"""

import itertools
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import ann, features, spd
from .dataio import EegTrialSet


def _sub_seed(seed, *parts) -> int:
    return int(np.random.SeedSequence([int(seed), *map(int, parts)]).generate_state(1)[0])


def accuracy(pred, truth) -> float:
    """Fraction of predictions equal to the truth."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError("length mismatch between predictions and truth")
    if pred.size == 0:
        raise ValueError("empty prediction vector")
    return float(np.mean(pred == truth))


def kappa(acc: float, n_classes: int) -> float:
    """Chance-corrected accuracy: (acc - 1/K) / (1 - 1/K)."""
    if n_classes < 2:
        raise ValueError("n_classes must be >= 2")
    chance = 1.0 / n_classes
    return (acc - chance) / (1.0 - chance)


def _betacf(a: float, b: float, x: float) -> float:
    # Continued fraction for the incomplete beta (Lentz's method).
    max_iter, eps, fpmin = 200, 3e-14, 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ValueError("incomplete beta did not converge")


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_sided_p(t: float, df: int) -> float:
    """P(|T_df| >= |t|) via the incomplete beta identity."""
    if df < 1:
        raise ValueError("df must be >= 1")
    t2 = float(t) * float(t)
    return reg_inc_beta(df / 2.0, 0.5, df / (df + t2))


def paired_ttest_2tailed(a, b):
    """Two-tailed paired t-test; returns (t, p).

    Degenerate convention when all differences are equal: p = 1.0 if the
    common difference is 0, else p = 0.0.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired vectors must be 1-D and equal length")
    n = a.size
    if n < 2:
        raise ValueError("need at least 2 pairs")
    d = a - b
    sd = float(d.std(ddof=1))
    md = float(d.mean())
    if sd == 0.0:
        if md == 0.0:
            return 0.0, 1.0
        return math.copysign(math.inf, md), 0.0
    t = md / (sd / math.sqrt(n))
    return t, student_t_two_sided_p(t, n - 1)


def info_per_trial(n_classes: int, acc: float) -> float:
    """Bits conveyed per decision: log2 K + a log2 a + m log2(m/(K-1))."""
    if n_classes < 2:
        raise ValueError("n_classes must be >= 2")
    if not 0.0 <= acc <= 1.0:
        raise ValueError("accuracy must lie in [0, 1]")

    def xlog2(v):
        return v * math.log2(v) if v > 0.0 else 0.0

    m_rate = 1.0 - acc
    info = math.log2(n_classes) + xlog2(acc)
    if m_rate > 0.0:
        info += m_rate * math.log2(m_rate / (n_classes - 1))
    return info


def itr(info_bits: float, trial_seconds: float) -> float:
    """Information transfer rate in bits per second."""
    if trial_seconds <= 0:
        raise ValueError("trial time must be positive")
    return info_bits / trial_seconds


@dataclass
class HyperGrid:
    """Candidate hyperparameter sets searched by inner cross-validation."""

    pca_dims: list = field(default_factory=lambda: [4, 8, 16, 32, 64])
    bag_sizes: list = field(default_factory=lambda: [2, 4, 8, 16, 32, 64])
    hidden_sizes: list = field(default_factory=lambda: [8, 16, 32, 64, 128, 256])

    def combos(self):
        if not (self.pca_dims and self.bag_sizes and self.hidden_sizes):
            raise ValueError("empty hyperparameter grid")
        return [
            {"n_rf": p, "k_bag": k, "hidden": h}
            for p, k, h in itertools.product(self.pca_dims, self.bag_sizes, self.hidden_sizes)
        ]


@dataclass
class PipelineConfig:
    """Fixed (non-searched) pipeline settings."""

    shrinkage: float = 0.0
    mean_metric: str = "riemannian"
    vector_scheme: str = "row-concat"
    inner_folds: int = 3
    train: ann.TrainConfig = field(default_factory=ann.TrainConfig)


@dataclass
class FittedPipeline:
    """Everything learned from a training portion; immutable thereafter."""

    mean_cov: np.ndarray
    pca: features.PcaModel
    ensemble: ann.BaggingEnsemble
    config: PipelineConfig
    n_classes: int


def _tangent_features(trials, mean_cov, cfg: PipelineConfig) -> np.ndarray:
    covs = spd.covariance_many(np.asarray(trials), cfg.shrinkage)
    projected = spd.tangent_project_many(covs, mean_cov)
    return np.asarray([spd.vectorize(p, cfg.vector_scheme) for p in projected])


def fit_pipeline(trials, labels, n_rf: int, k_bag: int, hidden: int,
                 cfg: PipelineConfig, seed: int, n_classes: int) -> FittedPipeline:
    """Fit covariance mean, tangent features, PCA and the bagged classifier.

    Consumes only the given training trials/labels; every learned statistic
    is a function of them alone.
    """
    covs = spd.covariance_many(np.asarray(trials), cfg.shrinkage)
    mean_cov = spd.mean_covariance(covs, metric=cfg.mean_metric)
    x = np.asarray([spd.vectorize(p, cfg.vector_scheme)
                    for p in spd.tangent_project_many(covs, mean_cov)])
    pca = features.pca_fit(x, n_rf)
    x_red = features.pca_transform(pca, x)
    train_cfg = replace(cfg.train, seed=seed)
    ensemble = ann.train_bagging(x_red, labels, k_bag, hidden, train_cfg, n_classes)
    return FittedPipeline(mean_cov, pca, ensemble, cfg, n_classes)


def predict_pipeline(fitted: FittedPipeline, trials):
    """Decode trials with a fitted pipeline; returns (probs, labels)."""
    x = _tangent_features(trials, fitted.mean_cov, fitted.config)
    x_red = features.pca_transform(fitted.pca, x)
    return ann.predict(fitted.ensemble, x_red)


@dataclass
class CvResult:
    """Per-fold accuracies with the summary statistics reported alongside.

    ``std`` is the sample standard deviation, so ``sem == std / sqrt(k)``.
    """

    name: str
    fold_accuracies: np.ndarray
    chosen_hyperparams: dict
    fold_hyperparams: list

    @property
    def k_folds(self):
        return len(self.fold_accuracies)

    @property
    def mean(self):
        return float(np.mean(self.fold_accuracies))

    @property
    def std(self):
        return float(np.std(self.fold_accuracies, ddof=1))

    @property
    def sem(self):
        return self.std / math.sqrt(self.k_folds)

    @property
    def max(self):
        return float(np.max(self.fold_accuracies))

    @property
    def min(self):
        return float(np.min(self.fold_accuracies))

    def to_dict(self):
        return {
            "name": self.name,
            "fold_accuracies": [float(a) for a in self.fold_accuracies],
            "mean": self.mean,
            "std": self.std,
            "sem": self.sem,
            "max": self.max,
            "min": self.min,
            "chosen_hyperparams": self.chosen_hyperparams,
            "fold_hyperparams": self.fold_hyperparams,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            name=d["name"],
            fold_accuracies=np.asarray(d["fold_accuracies"], dtype=np.float64),
            chosen_hyperparams=dict(d["chosen_hyperparams"]),
            fold_hyperparams=[dict(h) for h in d["fold_hyperparams"]],
        )


def _feasible(combo, n_train, n_features):
    return combo["n_rf"] <= min(n_train, n_features)


def _select_hyperparams(trials, labels, combos, cfg: PipelineConfig, seed: int,
                        n_classes: int) -> dict:
    n_features = trials.shape[1] ** 2 if cfg.vector_scheme == "row-concat" else \
        trials.shape[1] * (trials.shape[1] + 1) // 2
    inner = features.stratified_kfold(labels, cfg.inner_folds, _sub_seed(seed, 1))
    best_combo, best_score = None, -1.0
    for ci, combo in enumerate(combos):
        scores = []
        feasible = True
        for f in range(cfg.inner_folds):
            tr, te = inner.train_indices(f), inner.test_indices(f)
            if not _feasible(combo, len(tr), n_features):
                feasible = False
                break
            fitted = fit_pipeline(trials[tr], labels[tr], combo["n_rf"], combo["k_bag"],
                                  combo["hidden"], cfg, _sub_seed(seed, 2, ci, f), n_classes)
            _, pred = predict_pipeline(fitted, trials[te])
            scores.append(accuracy(pred, labels[te]))
        if not feasible:
            continue
        score = float(np.mean(scores))
        if score > best_score:
            best_combo, best_score = combo, score
    if best_combo is None:
        raise ValueError("no feasible hyperparameter combination for this data size")
    return best_combo


def run_cv_pipeline(trialset: EegTrialSet, grid: HyperGrid, k_folds: int = 10,
                    seed: int = 0, cfg: PipelineConfig | None = None,
                    name: str = "") -> CvResult:
    """Outer stratified k-fold evaluation of the full decoding pipeline.

    Every statistic (covariance mean, PCA, classifier, hyperparameters) is
    fitted on the outer training portion only; when the grid has more than
    one combination the choice is made by inner stratified cross-validation
    inside that portion. Deterministic for a fixed seed.
    """
    if cfg is None:
        cfg = PipelineConfig()
    trialset.require_all_classes()
    combos = grid.combos()
    trials = trialset.trials.astype(np.float64)
    labels = trialset.labels
    n_classes = trialset.n_classes
    folds = features.stratified_kfold(labels, k_folds, _sub_seed(seed, 0))
    fold_acc = np.zeros(k_folds)
    fold_hp = [None] * k_folds
    n_features = trials.shape[1] ** 2 if cfg.vector_scheme == "row-concat" else \
        trials.shape[1] * (trials.shape[1] + 1) // 2
    for f in range(k_folds):
        tr, te = folds.train_indices(f), folds.test_indices(f)
        feasible = [c for c in combos if _feasible(c, len(tr), n_features)]
        if not feasible:
            raise ValueError("no feasible hyperparameter combination for this data size")
        if len(feasible) == 1:
            combo = feasible[0]
        else:
            combo = _select_hyperparams(trials[tr], labels[tr], feasible, cfg,
                                        _sub_seed(seed, 3, f), n_classes)
        fitted = fit_pipeline(trials[tr], labels[tr], combo["n_rf"], combo["k_bag"],
                              combo["hidden"], cfg, _sub_seed(seed, 4, f), n_classes)
        _, pred = predict_pipeline(fitted, trials[te])
        fold_acc[f] = accuracy(pred, labels[te])
        fold_hp[f] = combo
    chosen = max(fold_hp, key=lambda c: sum(1 for o in fold_hp if o == c))
    return CvResult(name, fold_acc, chosen, fold_hp)


def shuffle_labels(trialset: EegTrialSet, seed: int) -> EegTrialSet:
    """Permutation-null copy: same trials, labels shuffled by seed."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x5BF]))
    return EegTrialSet(
        trialset.trials.copy(),
        rng.permutation(trialset.labels),
        list(trialset.class_names),
        trialset.sampling_rate,
    )


_CSV_FIELDS = ["name", "mean", "std", "sem", "max", "min", "n_rf", "k_bag", "hidden"]


def report(results, fmt: str = "text") -> str:
    """Render results losslessly as ``text``, ``csv`` or ``structured`` (JSON)."""
    results = list(results)
    if fmt == "structured":
        return json.dumps([r.to_dict() for r in results], sort_keys=True)
    if fmt == "csv":
        if not results:
            return ",".join(_CSV_FIELDS) + "\n"
        k = results[0].k_folds
        if any(r.k_folds != k for r in results):
            raise ValueError("csv report requires a uniform fold count")
        header = _CSV_FIELDS + [f"fold_{i}" for i in range(k)]
        lines = [",".join(header)]
        for r in results:
            hp = r.chosen_hyperparams
            row = [r.name, repr(r.mean), repr(r.std), repr(r.sem), repr(r.max),
                   repr(r.min), str(hp["n_rf"]), str(hp["k_bag"]), str(hp["hidden"])]
            row += [repr(float(a)) for a in r.fold_accuracies]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"
    if fmt == "text":
        header = f"{'name':<16}{'MEAN':>9}{'STD':>9}{'SEM':>9}{'MAX':>9}{'MIN':>9}  hyperparams"
        lines = [header, "-" * len(header)]
        for r in results:
            hp = r.chosen_hyperparams
            lines.append(
                f"{r.name:<16}{r.mean:>9.4f}{r.std:>9.4f}{r.sem:>9.4f}"
                f"{r.max:>9.4f}{r.min:>9.4f}  n_rf={hp['n_rf']} k={hp['k_bag']} h={hp['hidden']}"
            )
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format: {fmt!r}")


def parse_report(doc: str):
    """Parse a ``structured`` report back into CvResult objects."""
    return [CvResult.from_dict(d) for d in json.loads(doc)]
