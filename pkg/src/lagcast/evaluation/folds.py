"""k-fold index schemes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import TooFewRows


@dataclass(frozen=True)
class Shuffled:
    """Permute row indices with ``seed`` before slicing into folds."""

    seed: int = 0


@dataclass(frozen=True)
class Contiguous:
    """Slice rows in time order; avoids leaking later rows into earlier folds."""


def scheme_from_name(name: str, seed: int = 0):
    if name == "shuffled":
        return Shuffled(seed)
    if name == "contiguous":
        return Contiguous()
    raise ValueError(f"unknown fold scheme {name!r}")


def k_fold(n, k: int = 10, scheme=None) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split ``range(n)`` into ``k`` validation folds.

    Fold sizes differ by at most one; the first ``n % k`` folds get the extra
    row. ``n`` may also be any sized object such as a feature matrix.

    Returns
    -------
    list of (train_indices, validation_indices)
    """
    if not isinstance(n, (int, np.integer)):
        n = len(n)
    if k < 2 or n < k:
        raise TooFewRows(f"need n >= k >= 2, got n={n}, k={k}")
    scheme = Shuffled() if scheme is None else scheme
    if isinstance(scheme, Shuffled):
        order = np.random.default_rng(scheme.seed).permutation(n)
    else:
        order = np.arange(n)
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    folds = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        val = np.sort(order[a:b])
        train = np.sort(np.concatenate([order[:a], order[b:]]))
        folds.append((train, val))
    return folds
