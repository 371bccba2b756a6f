"""Imagined-speech BCI decoding and computer-control simulation toolkit.

Submodules
----------
dataio      trial containers, synthetic data, spectrograms
spd         covariance + SPD-manifold geometry and the MDM oracle
features    PCA and stratified fold construction
ann         from-scratch MLP, Adam, bagging ensemble
evaluation  cross-validated pipeline, kappa, t-test, information rate
fsm         the two control-interface state machines
sim         the partial-online human-in-the-loop simulator
server      JSON wire protocol over HTTP and WebSocket
"""

from . import ann, dataio, evaluation, features, fsm, server, sim, spd

__all__ = [
    "ann",
    "dataio",
    "evaluation",
    "features",
    "fsm",
    "server",
    "sim",
    "spd",
]

__version__ = "0.1.0"
