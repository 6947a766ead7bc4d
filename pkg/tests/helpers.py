"""Small utilities shared by the test modules."""

import hashlib
import json
import os

import numpy as np


def parabolic_peak(times: np.ndarray, values: np.ndarray) -> float:
    """Sub-sample peak location via a three-point parabola fit."""
    i = int(np.argmax(values))
    if i == 0 or i == len(values) - 1:
        return float(times[i])
    y0, y1, y2 = values[i - 1], values[i], values[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0.0:
        return float(times[i])
    dt = times[1] - times[0]
    return float(times[i] + 0.5 * (y0 - y2) / denom * dt)


def ginibre_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def hash_dir(path: str) -> dict:
    """name -> sha256 for every file except the manifest."""
    out = {}
    for name in sorted(os.listdir(path)):
        if name == "manifest.json":
            continue
        with open(os.path.join(path, name), "rb") as fh:
            out[name] = hashlib.sha256(fh.read()).hexdigest()
    return out


def manifest_sans_timestamp(path: str) -> dict:
    with open(os.path.join(path, "manifest.json"), encoding="utf-8") as fh:
        data = json.load(fh)
    data.pop("timestamp")
    return data
