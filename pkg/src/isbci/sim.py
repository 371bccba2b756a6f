"""Partial-online control loop: human intent in, decoded action out.

A session trains the decoding pipeline on a share of the data, then serves
a closed loop: the operator picks the intended class (short/long), a
held-out trial of that class is sampled without replacement, the trained
pipeline decodes it, and the state machine consumes the *decoded* class,
which may differ from the intent. Running accuracy and live information
transfer rate are updated every step. The decoded stream, the machine
trace and the statistics are a deterministic function of
(data, seed, intent sequence).
"""

import threading
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import evaluation, fsm
from .dataio import EegTrialSet, load_trialset

INTENT_NAMES = ("short", "long")


@dataclass
class SimSettings:
    """Session-level knobs: train share, decision time, pipeline size."""

    split: float = 0.6
    trial_seconds: float = 2.0  # 1 s imagining + 1 s rest per decision
    n_rf: int = 16
    k_bag: int = 2
    hidden: int = 16
    screen_w: int = 1024
    screen_h: int = 768
    grid_cols: int = 4
    pipeline: evaluation.PipelineConfig = field(default_factory=evaluation.PipelineConfig)


def _split_indices(labels: np.ndarray, split: float, seed: int):
    """Per-class seeded shuffle, first ``split`` share to training."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x5C11]))
    train, test = [], []
    for cls in np.unique(labels):
        idx = rng.permutation(np.flatnonzero(labels == cls))
        cut = int(round(split * idx.size))
        train.extend(idx[:cut])
        test.append(idx[cut:])
    return np.sort(np.asarray(train, dtype=np.int64)), [np.sort(t) for t in test]


class Session:
    """One live control session; steps are serialized by an internal lock."""

    def __init__(self, trialset: EegTrialSet, design: str, settings: SimSettings,
                 seed: int, session_id: str, decoder: str = "pipeline"):
        if design not in ("design1", "design2"):
            raise ValueError(f"unknown design: {design!r}")
        if trialset.n_classes != 2:
            raise ValueError("the binary interface needs exactly 2 classes")
        trialset.require_all_classes()
        if not 0.0 < settings.split <= 1.0:
            raise ValueError("split must lie in (0, 1]")
        self.id = session_id
        self.design = design
        self.settings = settings
        self.seed = int(seed)
        self.trialset = trialset
        self._lock = threading.Lock()

        train_idx, test_pools = _split_indices(trialset.labels, settings.split, seed)
        if any(pool.size == 0 for pool in test_pools):
            raise ValueError("empty test pool")
        if train_idx.size < 4:
            raise ValueError("training share too small")
        self.test_pools = test_pools

        self.decoder_kind = decoder if isinstance(decoder, str) else "custom"
        self._custom_decoder = decoder if callable(decoder) else None
        self.fitted = None
        if self.decoder_kind == "pipeline":
            labels = trialset.labels[train_idx]
            trials = trialset.trials[train_idx].astype(np.float64)
            n_rf = min(settings.n_rf, len(train_idx), trialset.n_channels**2)
            self.fitted = evaluation.fit_pipeline(
                trials, labels, n_rf, settings.k_bag, settings.hidden,
                settings.pipeline, _sub(seed, 1), trialset.n_classes,
            )
        elif self.decoder_kind not in ("oracle", "custom"):
            raise ValueError(f"unknown decoder: {decoder!r}")

        self._pool_rng = np.random.default_rng(np.random.SeedSequence([self.seed, 0xB001]))
        self._pool_order = [self._pool_rng.permutation(p) for p in self.test_pools]
        self._pool_pos = [0, 0]

        if design == "design1":
            screen = fsm.Rect(0, 0, settings.screen_w, settings.screen_h)
            self.ctx = fsm.new_design1_context(screen, seed=seed)
        else:
            self.ctx = fsm.new_design2_context(seed=seed, grid_cols=settings.grid_cols)

        self.stats = {"decodes": 0, "correct": 0}
        self.latencies = []

    # -- sampling ---------------------------------------------------------

    def _next_trial(self, cls: int):
        pos = self._pool_pos[cls]
        warning = False
        if pos >= len(self._pool_order[cls]):
            self._pool_order[cls] = self._pool_rng.permutation(self.test_pools[cls])
            self._pool_pos[cls] = 0
            pos = 0
            warning = True
        self._pool_pos[cls] = pos + 1
        return int(self._pool_order[cls][pos]), warning

    def _decode(self, trial_index: int, true_class: int) -> int:
        if self.decoder_kind == "oracle":
            return true_class
        if self._custom_decoder is not None:
            return int(self._custom_decoder(self.trialset.trials[trial_index], true_class))
        trial = self.trialset.trials[trial_index].astype(np.float64)
        _, pred = evaluation.predict_pipeline(self.fitted, trial[None, :, :])
        return int(pred[0])

    # -- protocol steps ---------------------------------------------------

    def submit_intent(self, intent: str) -> dict:
        """Run one decision; returns the outcome message (wire shape)."""
        if intent not in INTENT_NAMES:
            raise ValueError(f"intent must be one of {INTENT_NAMES}")
        with self._lock:
            started = time.perf_counter()
            intended = INTENT_NAMES.index(intent)
            trial_index, warning = self._next_trial(intended)
            decoded = self._decode(trial_index, intended)
            ev = fsm.FsmEvent.SHORT if decoded == 0 else fsm.FsmEvent.LONG
            if self.design == "design1":
                self.ctx, actions = fsm.d1_step(self.ctx, ev)
            else:
                self.ctx, actions = fsm.d2_step(self.ctx, ev)
            self.stats["decodes"] += 1
            if decoded == intended:
                self.stats["correct"] += 1
            self.latencies.append(time.perf_counter() - started)
            outcome = {
                "type": "outcome",
                "session": self.id,
                "trial_index": trial_index,
                "intended": INTENT_NAMES[intended],
                "decoded": INTENT_NAMES[decoded],
                "correct": decoded == intended,
                "actions": actions,
                "stats": self._stats_fields(),
            }
            if warning:
                outcome["pool_reshuffled"] = True
            return outcome

    def _stats_fields(self) -> dict:
        decodes = self.stats["decodes"]
        correct = self.stats["correct"]
        acc = correct / decodes if decodes else 0.0
        info = evaluation.info_per_trial(2, acc) if decodes else 0.0
        bps = evaluation.itr(info, self.settings.trial_seconds)
        return {
            "decodes": decodes,
            "correct": correct,
            "accuracy": acc,
            "info_bits": info,
            "itr_bps": bps,
            "itr_bpm": bps * 60.0,
        }

    def session_stats(self) -> dict:
        """Running statistics; pure read."""
        out = self._stats_fields()
        out["elapsed_trials"] = self.stats["decodes"]
        out["elapsed_seconds"] = self.stats["decodes"] * self.settings.trial_seconds
        return out

    def state_message(self) -> dict:
        """Current interface state in the wire shape."""
        msg = {
            "type": "state",
            "session": self.id,
            "design": self.design,
            "prompts": {"short": self.ctx.prompt[0], "long": self.ctx.prompt[1]},
        }
        if self.design == "design1":
            msg["fsm_state"] = self.ctx.state.value
            msg["rect"] = self.ctx.current.to_dict()
            msg["screen"] = self.ctx.screen.to_dict()
            msg["stack_depth"] = len(self.ctx.previous)
        else:
            msg["fsm_state"] = self.ctx.state.value
            msg["tree"] = {
                "nodes": self.ctx.tree.to_dict(),
                "cursor": list(self.ctx.cursor),
            }
            msg["history_depth"] = len(self.ctx.history)
        return msg


def _sub(seed, tag):
    return int(np.random.SeedSequence([int(seed), int(tag)]).generate_state(1)[0])


def start_session(data, design: str, split: float = 0.6, seed: int = 0,
                  settings: SimSettings | None = None, decoder: str = "pipeline",
                  session_id: str | None = None) -> Session:
    """Train (or stub) the decoder and open a session.

    ``data`` is a trial container path or an in-memory EegTrialSet.
    ``decoder`` is "pipeline" (train the real decoder), "oracle" (always
    return the intended class; useful for interface testing) or a callable
    ``(trial, true_class) -> predicted_class``.
    """
    trialset = data if isinstance(data, EegTrialSet) else load_trialset(data)
    settings = settings if settings is not None else SimSettings()
    if split != settings.split:
        settings = replace(settings, split=split)
    sid = session_id if session_id is not None else f"sess-{design}-{seed}"
    return Session(trialset, design, settings, seed, sid, decoder)
