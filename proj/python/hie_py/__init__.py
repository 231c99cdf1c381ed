"""Python bindings for the hie toolkit."""

import json

from ._core import (
    Graph,
    HieError,
    align_root,
    config_keys,
    convert,
    dist,
    expmap,
    gen_tree,
    gradcheck,
    homophily,
    hyperbolic_center,
    load_dataset,
    logmap,
    origin,
    ranking_metrics,
    save_dataset,
)
from ._core import _train

__all__ = [
    "Graph",
    "HieError",
    "align_root",
    "config_keys",
    "convert",
    "dist",
    "expmap",
    "gen_tree",
    "gradcheck",
    "homophily",
    "hyperbolic_center",
    "load_dataset",
    "logmap",
    "origin",
    "ranking_metrics",
    "save_dataset",
    "train",
]


def train(graph, **options):
    """Train with config keys given as keyword arguments.

    Dotted keys use double underscores: ``hie__mode="full"``.
    Returns ``(report, embedding, history)`` where report is the evaluation
    dictionary, embedding a numpy array with one row per node and history a
    list of per-epoch dictionaries.
    """
    opts = {k.replace("__", "."): _text(v) for k, v in options.items()}
    report, embedding, history = _train(opts, graph)
    return json.loads(report), embedding, history


def _text(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)
