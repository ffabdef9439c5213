"""Model serialization: the brtm/1 line-oriented text format.

Layout (UTF-8, one JSON document per line after the version tag):

    brtm/1
    {"config": {...}, "feature_names": [...], "f0": ..., "n_stages": N}
    {"gamma": ..., "feature": [...], "threshold": [...], "missing_right": [...],
     "left": [...], "right": [...], "value": [...], "improvement": [...]}
    ... (N stage lines)

Stage arrays are node-indexed; feature -1 marks a leaf, whose threshold,
child, and routing entries are placeholders. Floats are written as Python
repr (shortest round-trip decimal), so load(save(model)) predicts
bit-identically. Unknown object fields are ignored with a warning so
newer writers stay readable; a different version tag is an error.
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path

import numpy as np

from .boosting import BoostConfig, BoostedModel, Stage
from .tree import RegressionTree

FORMAT_VERSION = "brtm/1"

_HEADER_KEYS = {"config", "feature_names", "f0", "n_stages"}
_STAGE_KEYS = {"gamma", "feature", "threshold", "missing_right", "left", "right", "value", "improvement"}
_CONFIG_KEYS = {"n_trees", "learn_rate", "max_nodes", "min_leaf_obs", "subsample_fraction", "loss", "seed"}


class ModelParseError(ValueError):
    """Malformed model document; message carries line/field context."""


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def save_model(model: BoostedModel, sink) -> None:
    lines = [FORMAT_VERSION]
    cfg = model.config
    header = {
        "config": {
            "n_trees": cfg.n_trees,
            "learn_rate": cfg.learn_rate,
            "max_nodes": cfg.max_nodes,
            "min_leaf_obs": cfg.min_leaf_obs,
            "subsample_fraction": cfg.subsample_fraction,
            "loss": cfg.loss,
            "seed": cfg.seed,
        },
        "feature_names": list(model.feature_names),
        "f0": model.f0,
        "n_stages": model.n_stages,
    }
    lines.append(_dump(header))
    for stage in model.stages:
        t = stage.tree
        lines.append(
            _dump(
                {
                    "gamma": stage.gamma,
                    "feature": t.feature.tolist(),
                    "threshold": t.threshold.tolist(),
                    "missing_right": t.missing_right.tolist(),
                    "left": t.left.tolist(),
                    "right": t.right.tolist(),
                    "value": t.value.tolist(),
                    "improvement": t.improvement.tolist(),
                }
            )
        )
    text = "\n".join(lines) + "\n"
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        Path(sink).write_text(text, encoding="utf-8")


def _parse_json_line(line: str, lineno: int):
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise ModelParseError(f"model parse error at line {lineno}: {e.msg}") from None
    if not isinstance(obj, dict):
        raise ModelParseError(f"model parse error at line {lineno}: expected an object")
    return obj


def _require(obj: dict, key: str, lineno: int):
    if key not in obj:
        raise ModelParseError(f"model parse error at line {lineno}: missing field {key!r}")
    return obj[key]


def _warn_unknown(obj: dict, known: set, lineno: int) -> None:
    extra = sorted(set(obj) - known)
    if extra:
        warnings.warn(f"model file line {lineno}: ignoring unknown field(s) {extra}", stacklevel=3)


def _stage_from_obj(obj: dict, lineno: int, n_features: int) -> Stage:
    _warn_unknown(obj, _STAGE_KEYS, lineno)
    gamma = _require(obj, "gamma", lineno)
    arrays = {k: _require(obj, k, lineno) for k in ("feature", "threshold", "missing_right", "left", "right", "value", "improvement")}
    lengths = {len(v) for v in arrays.values()}
    if len(lengths) != 1 or not lengths.pop() >= 1:
        raise ModelParseError(f"model parse error at line {lineno}: node arrays must share one nonzero length")
    n_nodes = len(arrays["feature"])
    for i in range(n_nodes):
        f = arrays["feature"][i]
        if f >= n_features:
            raise ModelParseError(f"model parse error at line {lineno}: node {i} splits on unknown feature {f}")
        if f >= 0:
            lo, hi = arrays["left"][i], arrays["right"][i]
            if not (i < lo < n_nodes and i < hi < n_nodes):
                raise ModelParseError(f"model parse error at line {lineno}: node {i} has invalid children")
    try:
        tree = RegressionTree(
            arrays["feature"],
            arrays["threshold"],
            arrays["missing_right"],
            arrays["left"],
            arrays["right"],
            arrays["value"],
            arrays["improvement"],
            n_features,
        )
    except (TypeError, ValueError) as e:
        raise ModelParseError(f"model parse error at line {lineno}: {e}") from None
    return Stage(tree=tree, gamma=float(gamma))


def load_model(source) -> BoostedModel:
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise ModelParseError("model parse error at line 1: empty document")
    version = lines[0].strip()
    if version != FORMAT_VERSION:
        raise ModelParseError(f"unsupported model version {version!r} (expected {FORMAT_VERSION!r})")
    if len(lines) < 2:
        raise ModelParseError("model parse error at line 2: missing header")

    header = _parse_json_line(lines[1], 2)
    _warn_unknown(header, _HEADER_KEYS, 2)
    cfg_obj = _require(header, "config", 2)
    if not isinstance(cfg_obj, dict):
        raise ModelParseError("model parse error at line 2: 'config' must be an object")
    _warn_unknown(cfg_obj, _CONFIG_KEYS, 2)
    try:
        config = BoostConfig(**{k: v for k, v in cfg_obj.items() if k in _CONFIG_KEYS})
    except (TypeError, ValueError) as e:
        raise ModelParseError(f"model parse error at line 2: bad config: {e}") from None
    feature_names = _require(header, "feature_names", 2)
    if not isinstance(feature_names, list) or not all(isinstance(s, str) for s in feature_names):
        raise ModelParseError("model parse error at line 2: 'feature_names' must be a list of strings")
    f0 = _require(header, "f0", 2)
    n_stages = _require(header, "n_stages", 2)

    stage_lines = [(i + 3, ln) for i, ln in enumerate(lines[2:]) if ln.strip()]
    if len(stage_lines) != n_stages:
        raise ModelParseError(
            f"model parse error: header declares {n_stages} stages but document has {len(stage_lines)}"
        )
    stages = tuple(_stage_from_obj(_parse_json_line(ln, no), no, len(feature_names)) for no, ln in stage_lines)
    return BoostedModel(f0=float(f0), stages=stages, config=config, feature_names=tuple(feature_names))
