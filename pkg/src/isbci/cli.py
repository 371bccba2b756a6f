"""Command-line entry point: gen-data, train, eval, itr, simulate, serve, spectrogram."""

import argparse
import json
import sys

import numpy as np

from . import ann, evaluation, server, sim
from .dataio import SyntheticConfig, gen_synthetic, load_trialset, export_spectrogram


def _int_list(text):
    return [int(tok) for tok in text.split(",") if tok]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isbci")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a seeded synthetic trial container")
    p.add_argument("--n-per-class", type=int, default=100)
    p.add_argument("--channels", type=int, default=8)
    p.add_argument("--samples", type=int, default=128)
    p.add_argument("--classes", type=int, default=2)
    p.add_argument("--separation", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="fit the decoding pipeline and save the ensemble")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--pca", type=int, default=16)
    p.add_argument("--bag", type=int, default=2)
    p.add_argument("--hidden", type=int, default=16)
    p.add_argument("--shrinkage", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("eval", help="cross-validated evaluation with a hyperparameter grid")
    p.add_argument("--data", required=True)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--grid-pca", type=_int_list, default=[16])
    p.add_argument("--grid-bag", type=_int_list, default=[2])
    p.add_argument("--grid-hidden", type=_int_list, default=[16])
    p.add_argument("--shrinkage", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["text", "csv", "structured"], default="text")
    p.add_argument("--name", default="cv")

    p = sub.add_parser("itr", help="information per trial and transfer rate")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--accuracy", type=float, required=True)
    p.add_argument("--trial-seconds", type=float, default=2.0)

    p = sub.add_parser("simulate", help="headless partial-online loop from an intent script")
    p.add_argument("--data", required=True)
    p.add_argument("--design", choices=["1", "2"], default="1")
    p.add_argument("--intents", required=True, help="file with one 'short'/'long' per line")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", type=float, default=0.6)
    p.add_argument("--decoder", choices=["pipeline", "oracle"], default="pipeline")
    p.add_argument("--out", default=None, help="transcript path (default: stdout)")

    p = sub.add_parser("serve", help="serve the wire protocol (HTTP + WebSocket)")
    p.add_argument("--data", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--split", type=float, default=0.6)
    p.add_argument("--decoder", choices=["pipeline", "oracle"], default="pipeline")
    p.add_argument("--web-root", default=None, help="serve static UI files from here")

    p = sub.add_parser("spectrogram", help="export a per-channel magnitude spectrogram")
    p.add_argument("--data", required=True)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--window", type=int, default=256)
    p.add_argument("--hop", type=int, default=128)
    p.add_argument("--out", required=True, help=".npy output path")
    return parser


def _cmd_gen_data(args):
    cfg = SyntheticConfig(
        n_per_class=args.n_per_class, c=args.channels, s=args.samples,
        K=args.classes, separation=args.separation, seed=args.seed,
    )
    from .dataio import save_trialset

    trialset = gen_synthetic(cfg)
    save_trialset(trialset, args.out)
    print(f"wrote {trialset.n_trials} trials "
          f"({trialset.n_channels} ch x {trialset.n_samples} samples) to {args.out}")
    return 0


def _cmd_train(args):
    trialset = load_trialset(args.data)
    cfg = evaluation.PipelineConfig(shrinkage=args.shrinkage)
    fitted = evaluation.fit_pipeline(
        trialset.trials.astype(np.float64), trialset.labels,
        args.pca, args.bag, args.hidden, cfg, args.seed, trialset.n_classes,
    )
    _, pred = evaluation.predict_pipeline(fitted, trialset.trials.astype(np.float64))
    ann.save_ensemble(fitted.ensemble, args.out)
    print(f"training accuracy {evaluation.accuracy(pred, trialset.labels):.4f}; "
          f"ensemble saved to {args.out}")
    return 0


def _cmd_eval(args):
    trialset = load_trialset(args.data)
    grid = evaluation.HyperGrid(args.grid_pca, args.grid_bag, args.grid_hidden)
    cfg = evaluation.PipelineConfig(shrinkage=args.shrinkage)
    result = evaluation.run_cv_pipeline(
        trialset, grid, k_folds=args.folds, seed=args.seed, cfg=cfg, name=args.name,
    )
    sys.stdout.write(evaluation.report([result], args.format))
    return 0


def _cmd_itr(args):
    info = evaluation.info_per_trial(args.classes, args.accuracy)
    bps = evaluation.itr(info, args.trial_seconds)
    print(f"information per trial: {info:.3f} bits")
    print(f"itr: {bps:.3f} bits/s = {bps * 60.0:.1f} bits/min")
    return 0


def _read_intents(path):
    with open(path) as fh:
        intents = [line.strip().lower() for line in fh if line.strip()]
    bad = [i for i in intents if i not in sim.INTENT_NAMES]
    if bad:
        raise ValueError(f"intent file contains invalid tokens: {bad[:3]}")
    return intents


def transcript_lines(session: sim.Session, intents, config: dict):
    """Deterministic transcript: one config line, then one outcome per intent."""
    yield json.dumps({"config": config}, sort_keys=True, separators=(",", ":"))
    for intent in intents:
        outcome = session.submit_intent(intent)
        yield json.dumps(outcome, sort_keys=True, separators=(",", ":"))


def _cmd_simulate(args):
    intents = _read_intents(args.intents)
    session = sim.start_session(
        args.data, f"design{args.design}", split=args.split, seed=args.seed,
        decoder=args.decoder, session_id=f"sim-{args.seed}",
    )
    config = {
        "data": args.data, "design": f"design{args.design}", "seed": args.seed,
        "split": args.split, "decoder": args.decoder, "intents": len(intents),
    }
    lines = "\n".join(transcript_lines(session, intents, config)) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(lines)
    else:
        sys.stdout.write(lines)
    return 0


def _cmd_serve(args):
    manager = server.SessionManager.from_path(
        args.data,
        settings=sim.SimSettings(split=args.split),
        decoder=args.decoder,
    )
    print(f"serving on http://{args.host}:{args.port} (POST /api, WebSocket /ws)")
    server.serve_forever(manager, args.host, args.port, args.web_root)
    return 0


def _cmd_spectrogram(args):
    trialset = load_trialset(args.data)
    if not 0 <= args.trial < trialset.n_trials:
        raise ValueError(f"trial index out of range [0, {trialset.n_trials})")
    spec = export_spectrogram(trialset.trials[args.trial], args.window, args.hop)
    np.save(args.out, spec)
    print(f"wrote spectrogram {spec.shape} to {args.out}")
    return 0


_COMMANDS = {
    "gen-data": _cmd_gen_data,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "itr": _cmd_itr,
    "simulate": _cmd_simulate,
    "serve": _cmd_serve,
    "spectrogram": _cmd_spectrogram,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
