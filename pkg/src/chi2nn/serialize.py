"""Flat text serialization for trained models.

Line 1 is ``<kind> <inputs> <hidden>`` where kind is ``chi2nn`` or ``bpnn``;
the following lines hold one parameter each with 17 significant digits, in
the order: input weights row-major, hidden biases, output weights, output
bias. 17 digits round-trip IEEE doubles exactly.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .baseline import BpnnNetwork
from .network import Chi2Network

_KINDS = {
    "chi2nn": Chi2Network,
    "bpnn": BpnnNetwork,
}


def model_kind(net):
    for kind, cls in _KINDS.items():
        if isinstance(net, cls):
            return kind
    raise TypeError(f"cannot serialize object of type {type(net).__name__}")


def save_model(net, path):
    """Write a network to ``path`` in the flat text format."""
    kind = model_kind(net)
    values = np.concatenate([
        net.weights_in.ravel(order="C"),
        net.bias_hidden,
        net.weights_out,
        [net.bias_out],
    ])
    lines = [f"{kind} {net.inputs} {net.hidden}"]
    lines.extend(f"{v:.17g}" for v in values)
    Path(path).write_text("\n".join(lines) + "\n")


def load_model(path):
    """Read a network written by save_model; returns the right class by kind tag."""
    lines = Path(path).read_text().split()
    if len(lines) < 3:
        raise ValueError(f"{path}: not a model file")
    kind, r_text, h_text = lines[0], lines[1], lines[2]
    if kind not in _KINDS:
        raise ValueError(f"{path}: unknown model kind {kind!r}")
    r, h = int(r_text), int(h_text)
    values = np.array([float(v) for v in lines[3:]])
    expected = r * h + h + h + 1
    if values.shape[0] != expected:
        raise ValueError(f"{path}: expected {expected} parameters, found {values.shape[0]}")
    w_in = values[: r * h].reshape(r, h)
    b_hidden = values[r * h : r * h + h]
    w_out = values[r * h + h : r * h + 2 * h]
    b_out = float(values[-1])
    return _KINDS[kind](
        weights_in=w_in,
        bias_hidden=b_hidden,
        weights_out=w_out,
        bias_out=b_out,
    )
