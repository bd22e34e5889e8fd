"""Random forest of CART regression trees."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..exceptions import InvalidConfig
from .base import LabelledRegressor

_LEAF = -1


class RegressionTree:
    """CART tree stored as flat arrays; ``feature == -1`` marks a leaf."""

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=float)

    @property
    def n_nodes(self):
        return len(self.feature)

    def predict(self, X):
        node = np.zeros(len(X), dtype=np.int64)
        active = self.feature[node] != _LEAF
        while active.any():
            idx = np.flatnonzero(active)
            cur = node[idx]
            go_left = X[idx, self.feature[cur]] <= self.threshold[cur]
            node[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active[idx] = self.feature[node[idx]] != _LEAF
        return self.value[node]

    def to_dict(self):
        return {k: getattr(self, k).tolist() for k in ("feature", "threshold", "left", "right", "value")}

    @classmethod
    def from_dict(cls, d):
        return cls(d["feature"], d["threshold"], d["left"], d["right"], d["value"])


def _dense_ranks(X):
    """Column-wise ranks where equal values share a rank."""
    R = np.empty(X.shape, dtype=np.int64)
    for j in range(X.shape[1]):
        R[:, j] = np.unique(X[:, j], return_inverse=True)[1]
    return R


def _first_in_segment(mask, seg, n_seg):
    """First position of each segment where ``mask`` holds; -1 if none. ``seg`` is sorted."""
    hit = np.flatnonzero(mask)
    pos = np.full(n_seg, -1)
    if hit.size:
        hit_seg = seg[hit]
        first = np.searchsorted(hit_seg, np.arange(n_seg))
        ok = first < hit.size
        ok[ok] = hit_seg[first[ok]] == np.arange(n_seg)[ok]
        pos[ok] = hit[first[ok]]
    return pos


def grow_forest(X, y, samples, rngs, mtry, min_node_size=5, max_depth=None) -> list[RegressionTree]:
    """Grow one CART tree per row sample, all trees advancing one depth at a time.

    Tree ``i`` is grown on ``X[samples[i]]`` and draws its candidate
    features from ``rngs[i]`` only, so each tree is the same whether it is
    grown alone or together with others.

    Nodes with at most ``min_node_size`` rows become leaves. Each split
    node draws ``mtry`` candidate features uniformly without replacement and
    takes the cut with the largest reduction in squared error; ties go to the
    lower feature index, then to the lower cut point. Cuts sit halfway
    between adjacent distinct values.
    """
    n, p = X.shape
    n_trees = len(samples)
    ranks = _dense_ranks(X)
    rows = np.concatenate([np.asarray(s, dtype=np.int64) for s in samples])
    sizes0 = np.array([len(s) for s in samples])
    cap = int(2 * sizes0.sum() + n_trees)
    feature = np.full(cap, _LEAF)
    threshold = np.zeros(cap)
    left = np.full(cap, _LEAF)
    right = np.full(cap, _LEAF)
    value = np.zeros(cap)
    owner = np.zeros(cap, dtype=np.int64)
    owner[:n_trees] = np.arange(n_trees)
    node_of = np.repeat(np.arange(n_trees), sizes0)
    value[:n_trees] = np.bincount(node_of, weights=y[rows], minlength=n_trees) / sizes0
    n_nodes = n_trees
    frontier = np.arange(n_trees)
    depth = 0
    while frontier.size and (max_depth is None or depth < max_depth):
        counts = np.bincount(node_of, minlength=n_nodes)
        frontier = frontier[counts[frontier] > min_node_size]
        if not frontier.size:
            break
        local = np.full(n_nodes, -1)
        local[frontier] = np.arange(frontier.size)
        keep = local[node_of] >= 0
        rows, node_of = rows[keep], node_of[keep]
        seg = local[node_of]
        m, r = frontier.size, rows.size

        # candidate features: each tree draws for its own frontier nodes in node order
        by_tree = np.argsort(owner[frontier], kind="stable")
        per_tree = np.bincount(owner[frontier], minlength=n_trees)
        keys = np.empty((m, p))
        keys[by_tree] = np.concatenate(
            [rngs[t].random((c, p)) for t, c in enumerate(per_tree) if c]
        )
        picks = np.argsort(keys, axis=1)[:, :mtry]
        chosen = np.zeros((m, p), dtype=bool)
        np.put_along_axis(chosen, picks, True, axis=1)

        yr = y[rows]
        cnt = np.bincount(seg, minlength=m).astype(float)
        tot = np.bincount(seg, weights=yr, minlength=m)
        sq = np.bincount(seg, weights=yr * yr, minlength=m)

        order = np.argsort(seg[:, None] * n + ranks[rows], axis=0, kind="stable")
        s_seg = np.sort(seg)
        s_x = X[rows[order], np.arange(p)]
        csum = np.cumsum(yr[order], axis=0)
        start = np.searchsorted(s_seg, np.arange(m))
        base = np.where((start > 0)[:, None], csum[np.maximum(start - 1, 0)], 0.0)
        left_sum = csum - base[s_seg]
        left_cnt = (np.arange(r) - start[s_seg] + 1)[:, None]
        right_cnt = cnt[s_seg][:, None] - left_cnt
        valid = np.zeros((r, p), dtype=bool)
        valid[:-1] = (s_seg[1:] == s_seg[:-1])[:, None] & (s_x[1:] > s_x[:-1])
        valid &= chosen[s_seg]
        with np.errstate(divide="ignore", invalid="ignore"):
            right_sum = tot[s_seg][:, None] - left_sum
            gain = left_sum**2 / left_cnt + right_sum**2 / right_cnt - (tot * tot / cnt)[s_seg][:, None]
        gain = np.where(valid, gain, -np.inf)
        seg_best = np.maximum.reduceat(gain, start, axis=0)
        best_f = np.argmax(seg_best, axis=1)
        best_gain = seg_best[np.arange(m), best_f]
        splits = best_gain > 1e-12 * np.maximum(1.0, sq)
        if not splits.any():
            break
        hits = gain[np.arange(r), best_f[s_seg]] == best_gain[s_seg]
        pos = _first_in_segment(hits & splits[s_seg], s_seg, m)

        sp = np.flatnonzero(splits)
        nodes, fs, ks = frontier[sp], best_f[sp], pos[sp]
        feature[nodes] = fs
        threshold[nodes] = 0.5 * (s_x[ks, fs] + s_x[ks + 1, fs])
        left[nodes] = n_nodes + 2 * np.arange(sp.size)
        right[nodes] = left[nodes] + 1
        owner[left[nodes]] = owner[nodes]
        owner[right[nodes]] = owner[nodes]
        n_nodes += 2 * sp.size

        active = feature[node_of] != _LEAF
        rows, node_of = rows[active], node_of[active]
        go_left = X[rows, feature[node_of]] <= threshold[node_of]
        node_of = np.where(go_left, left[node_of], right[node_of])
        sums = np.bincount(node_of, weights=y[rows], minlength=n_nodes)
        sizes = np.bincount(node_of, minlength=n_nodes)
        frontier = np.unique(node_of)
        value[frontier] = sums[frontier] / sizes[frontier]
        depth += 1

    # split the shared node arrays back into per-tree arrays
    ids = np.argsort(owner[:n_nodes], kind="stable")
    per_tree = np.bincount(owner[:n_nodes], minlength=n_trees)
    local = np.empty(n_nodes, dtype=np.int64)
    bounds = np.concatenate([[0], np.cumsum(per_tree)])
    local[ids] = np.arange(n_nodes) - np.repeat(bounds[:-1], per_tree)
    trees = []
    for t in range(n_trees):
        g = ids[bounds[t] : bounds[t + 1]]
        lt, rt = left[g], right[g]
        trees.append(
            RegressionTree(
                feature[g],
                threshold[g],
                np.where(lt >= 0, local[np.maximum(lt, 0)], _LEAF),
                np.where(rt >= 0, local[np.maximum(rt, 0)], _LEAF),
                value[g],
            )
        )
    return trees


def grow_tree(X, y, rng, mtry, min_node_size=5, max_depth=None) -> RegressionTree:
    """Single CART tree on all rows of ``X``."""
    return grow_forest(X, y, [np.arange(len(y))], [rng], mtry, min_node_size, max_depth)[0]


class RandomForestRegressor(LabelledRegressor):
    """Bagged CART regression trees on row subsamples drawn without replacement.

    Tree ``i`` uses ``numpy.random.default_rng([seed, i])``, so the forest does
    not depend on how trees are scheduled across threads.

    Parameters
    ----------
    n_trees : int, default 500
    mtry : int or None
        Features tried per split; None means ``max(1, floor(p / 3))``.
    sample_fraction : float, default 0.7
    min_node_size : int, default 5
    max_depth : int or None
    seed : int
    n_jobs : int
    """

    kind = "rf"
    _state_attrs = ()

    def __init__(
        self,
        n_trees=500,
        mtry=None,
        sample_fraction=0.7,
        min_node_size=5,
        max_depth=None,
        seed=0,
        n_jobs=1,
    ):
        self.n_trees = n_trees
        self.mtry = mtry
        self.sample_fraction = sample_fraction
        self.min_node_size = min_node_size
        self.max_depth = max_depth
        self.seed = seed
        self.n_jobs = n_jobs

    def _resolved_mtry(self, p):
        mtry = max(1, p // 3) if self.mtry is None else int(self.mtry)
        if not 1 <= mtry <= p:
            raise InvalidConfig(f"mtry must lie in [1, {p}], got {mtry}")
        return mtry

    def fit(self, X, y=None):
        X, y = self._validate_fit(X, y)
        n, p = X.shape
        if self.n_trees < 1:
            raise InvalidConfig("n_trees must be at least 1")
        if not 0.0 < self.sample_fraction <= 1.0:
            raise InvalidConfig("sample_fraction must lie in (0, 1]")
        mtry = self._resolved_mtry(p)
        size = max(1, int(math.floor(self.sample_fraction * n)))
        self.subsample_size_ = size

        rngs = [np.random.default_rng([int(self.seed), i]) for i in range(self.n_trees)]
        samples = [rng.choice(n, size=size, replace=False) for rng in rngs]

        def build(chunk):
            return grow_forest(
                X, y, [samples[i] for i in chunk], [rngs[i] for i in chunk],
                mtry, self.min_node_size, self.max_depth,
            )

        jobs = max(1, int(self.n_jobs or 1))
        chunks = np.array_split(np.arange(self.n_trees), min(jobs, self.n_trees))
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                parts = list(pool.map(build, chunks))
        else:
            parts = [build(c) for c in chunks]
        self.trees_ = [t for part in parts for t in part]
        return self

    def predict(self, X):
        X = self._validate_predict(X)
        total = np.zeros(len(X))
        for tree in self.trees_:
            total += tree.predict(X)
        return total / len(self.trees_)

    def get_state(self):
        super().get_state()
        return {"subsample_size": self.subsample_size_, "trees": [t.to_dict() for t in self.trees_]}

    def set_state(self, state, feature_labels):
        super().set_state({}, feature_labels)
        self.subsample_size_ = int(state["subsample_size"])
        self.trees_ = [RegressionTree.from_dict(t) for t in state["trees"]]
        return self
