"""Single-hidden-layer network trained from scratch, plus a bagged ensemble.

Forward pass: ``softmax(relu(X W1^T + b1) W2^T + b2)``. Training minimizes
mean cross-entropy plus an L2 penalty on the weight matrices with the Adam
optimizer over seeded shuffled mini-batches. Everything is a deterministic
function of (data, config, seed).

Model container (``.isnn``): magic ``ISNN1\\n``, uint32 little-endian header
length, UTF-8 JSON header, then float32 little-endian weights per member in
W1, b1, W2, b2 order.
"""

import json
import struct
from dataclasses import dataclass, field, replace

import numpy as np

MODEL_MAGIC = b"ISNN1\n"
PROB_CLAMP = 1e-12


@dataclass
class TrainConfig:
    learning_rate: float = 0.001
    l2: float = 0.0001
    batch_size: int = 200
    epochs: int = 200
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    early_stop_patience: int = 10
    early_stop_min_delta: float = 1e-6
    no_bias: bool = False

    def validate(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if not (0 < self.adam_beta1 < 1 and 0 < self.adam_beta2 < 1):
            raise ValueError("adam betas must lie in (0, 1)")


@dataclass
class MlpModel:
    """Weights of one network: W1 (h, n_in), b1 (h,), W2 (n_out, h), b2 (n_out,)."""

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    @property
    def n_in(self):
        return self.W1.shape[1]

    @property
    def hidden(self):
        return self.W1.shape[0]

    @property
    def n_out(self):
        return self.W2.shape[0]

    def params(self):
        return [self.W1, self.b1, self.W2, self.b2]

    def copy(self):
        return MlpModel(*(p.copy() for p in self.params()))


@dataclass
class BaggingEnsemble:
    members: list
    bootstrap_seeds: list = field(default_factory=list)

    @property
    def k(self):
        return len(self.members)


def glorot_init(shape, seed) -> np.ndarray:
    """Uniform draw on [-L, L] with L = sqrt(6 / (fan_in + fan_out))."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(
        np.random.SeedSequence([int(seed)])
    )
    fan_out, fan_in = shape
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init_mlp(n_in: int, hidden: int, n_out: int, seed) -> MlpModel:
    """Glorot-initialized weights, zero biases; seed may be an int or Generator."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(
        np.random.SeedSequence([int(seed)])
    )
    return MlpModel(
        W1=glorot_init((hidden, n_in), rng),
        b1=np.zeros(hidden),
        W2=glorot_init((n_out, hidden), rng),
        b2=np.zeros(n_out),
    )


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _forward_parts(model: MlpModel, x: np.ndarray):
    pre = x @ model.W1.T + model.b1
    hidden = np.maximum(pre, 0.0)
    probs = softmax(hidden @ model.W2.T + model.b2)
    return pre, hidden, probs


def forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Class probabilities, one row per input row; rows sum to 1."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.n_in:
        raise ValueError("dimension mismatch with model input size")
    return _forward_parts(model, x)[2]


def onehot(labels: np.ndarray, n_classes: int) -> np.ndarray:
    out = np.zeros((len(labels), n_classes))
    out[np.arange(len(labels)), np.asarray(labels, dtype=int)] = 1.0
    return out


def loss_and_grads(model: MlpModel, x: np.ndarray, y_onehot: np.ndarray, l2: float):
    """Mean cross-entropy + l2 * sum of squared weights, with exact gradients.

    The penalty covers the weight matrices only, never the biases.
    Returns ``(loss, [dW1, db1, dW2, db2])``.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y_onehot, dtype=np.float64)
    n = x.shape[0]
    pre, hidden, probs = _forward_parts(model, x)
    ce = -np.mean(np.log(np.clip((probs * y).sum(axis=1), PROB_CLAMP, None)))
    loss = ce + l2 * (np.sum(model.W1**2) + np.sum(model.W2**2))

    dlogits = (probs - y) / n
    dW2 = dlogits.T @ hidden + 2.0 * l2 * model.W2
    db2 = dlogits.sum(axis=0)
    dhidden = dlogits @ model.W2
    dpre = dhidden * (pre > 0)
    dW1 = dpre.T @ x + 2.0 * l2 * model.W1
    db1 = dpre.sum(axis=0)
    return float(loss), [dW1, db1, dW2, db2]


@dataclass
class AdamState:
    m: list
    v: list
    t: int = 0

    @classmethod
    def for_params(cls, params):
        return cls(m=[np.zeros_like(p) for p in params],
                   v=[np.zeros_like(p) for p in params])


def adam_step(params: list, grads: list, state: AdamState, config: TrainConfig):
    """One bias-corrected Adam update; returns (new_params, new_state)."""
    b1, b2, eps = config.adam_beta1, config.adam_beta2, config.adam_eps
    t = state.t + 1
    new_params, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        m_hat = m / (1 - b1**t)
        v_hat = v / (1 - b2**t)
        new_params.append(p - config.learning_rate * m_hat / (np.sqrt(v_hat) + eps))
        new_m.append(m)
        new_v.append(v)
    return new_params, AdamState(new_m, new_v, t)


def train_mlp(x: np.ndarray, labels: np.ndarray, hidden: int, config: TrainConfig,
              n_classes: int | None = None, on_epoch=None) -> MlpModel:
    """Train one network; bitwise reproducible for a fixed (data, config).

    Per epoch the samples are reshuffled (seeded) and split into batches of
    ``config.batch_size`` (last batch may be short). Stops early when the
    epoch loss has improved by less than ``early_stop_min_delta`` for
    ``early_stop_patience`` consecutive epochs. ``on_epoch(epoch, loss)``
    is invoked after every epoch when provided.
    """
    config.validate()
    if hidden < 1:
        raise ValueError("hidden must be >= 1")
    x = np.asarray(x, dtype=np.float64)
    labels = np.asarray(labels, dtype=int)
    k = int(n_classes if n_classes is not None else labels.max() + 1)
    y = onehot(labels, k)
    rng = np.random.default_rng(np.random.SeedSequence([int(config.seed), 0xA11]))
    model = init_mlp(x.shape[1], hidden, k, rng)
    if config.epochs == 0:
        return model
    params = model.params()
    state = AdamState.for_params(params)
    n = x.shape[0]
    best = np.inf
    stall = 0
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            loss, grads = loss_and_grads(
                MlpModel(*params), x[batch], y[batch], config.l2
            )
            if not np.isfinite(loss):
                raise ValueError("training diverged")
            if config.no_bias:
                grads[1][:] = 0.0
                grads[3][:] = 0.0
            params, state = adam_step(params, grads, state, config)
            total += loss * len(batch)
        epoch_loss = total / n
        if on_epoch is not None:
            on_epoch(epoch, epoch_loss)
        if best - epoch_loss > config.early_stop_min_delta:
            best = epoch_loss
            stall = 0
        else:
            stall += 1
            if stall >= config.early_stop_patience:
                break
    return MlpModel(*params)


def derive_member_seed(seed: int, index: int) -> int:
    """Stable per-member seed for bootstrap draws and weight init."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1)[0])


def train_bagging(x: np.ndarray, labels: np.ndarray, k: int, hidden: int,
                  config: TrainConfig, n_classes: int | None = None,
                  bootstrap: bool = True) -> BaggingEnsemble:
    """Train ``k`` members, each on n samples drawn with replacement.

    Member ``i`` derives its own seed from (config.seed, i), so members are
    independent and could be trained in parallel without changing results.
    ``bootstrap=False`` trains every member on the full sample (useful for
    degenerate k=1 ensembles).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    x = np.asarray(x, dtype=np.float64)
    labels = np.asarray(labels, dtype=int)
    n = x.shape[0]
    k_classes = int(n_classes if n_classes is not None else labels.max() + 1)
    members, seeds = [], []
    for i in range(k):
        member_seed = derive_member_seed(config.seed, i)
        if bootstrap:
            draw_rng = np.random.default_rng(np.random.SeedSequence([member_seed, 0xB007]))
            idx = draw_rng.integers(0, n, size=n)
        else:
            idx = np.arange(n)
        member_cfg = replace(config, seed=member_seed)
        members.append(train_mlp(x[idx], labels[idx], hidden, member_cfg, k_classes))
        seeds.append(member_seed)
    return BaggingEnsemble(members, seeds)


def predict(ensemble: BaggingEnsemble, x: np.ndarray):
    """Average member probabilities; labels are the argmax (ties -> lowest class)."""
    probs = np.mean([forward(m, x) for m in ensemble.members], axis=0)
    return probs, probs.argmax(axis=1)


def save_ensemble(ensemble: BaggingEnsemble, path) -> None:
    """Serialize an ensemble in the ``ISNN1`` container (float32 weights)."""
    if not ensemble.members:
        raise ValueError("ensemble has no members")
    first = ensemble.members[0]
    header = {
        "k": ensemble.k,
        "n_in": first.n_in,
        "hidden": first.hidden,
        "n_out": first.n_out,
        "bootstrap_seeds": [int(s) for s in ensemble.bootstrap_seeds],
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    chunks = []
    for m in ensemble.members:
        if (m.n_in, m.hidden, m.n_out) != (first.n_in, first.hidden, first.n_out):
            raise ValueError("ensemble members disagree on shape")
        for p in m.params():
            chunks.append(np.ascontiguousarray(p, dtype="<f4").tobytes())
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<I", len(header_bytes)))
        fh.write(header_bytes)
        fh.write(b"".join(chunks))


def load_ensemble(path) -> BaggingEnsemble:
    """Load an ``ISNN1`` container written by :func:`save_ensemble`."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[: len(MODEL_MAGIC)] != MODEL_MAGIC:
        raise ValueError("not a model container")
    off = len(MODEL_MAGIC)
    (hlen,) = struct.unpack_from("<I", blob, off)
    off += 4
    header = json.loads(blob[off : off + hlen].decode("utf-8"))
    off += hlen
    k, n_in, hidden, n_out = (header[f] for f in ("k", "n_in", "hidden", "n_out"))
    shapes = [(hidden, n_in), (hidden,), (n_out, hidden), (n_out,)]
    per_member = sum(int(np.prod(s)) for s in shapes)
    data = np.frombuffer(blob[off:], dtype="<f4")
    if data.size != k * per_member:
        raise ValueError("corrupt model container")
    members = []
    pos = 0
    for _ in range(k):
        params = []
        for s in shapes:
            size = int(np.prod(s))
            params.append(data[pos : pos + size].astype(np.float64).reshape(s))
            pos += size
        members.append(MlpModel(*params))
    return BaggingEnsemble(members, [int(s) for s in header.get("bootstrap_seeds", [])])
