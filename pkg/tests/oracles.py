"""Independent reference implementations used to cross-check the package.

Everything here is written directly from the definitions, in plain Python or
with a different numerical route than the package (SVD instead of a
covariance eigendecomposition, explicit path enumeration instead of
suffix counting), so agreement is evidence rather than tautology.
"""
from __future__ import annotations

import math
import random
from collections import Counter

import numpy as np

from codeanomaly.parser import NODE_KINDS, SyntaxNode

INF = float("inf")


def lof_reference(points, k):
    pts = [tuple(map(float, p)) for p in points]
    n = len(pts)
    dist = [[math.dist(a, b) for b in pts] for a in pts]
    kdist, hood = [], []
    for p in range(n):
        others = sorted(dist[p][o] for o in range(n) if o != p)
        kd = others[k - 1]
        kdist.append(kd)
        hood.append([o for o in range(n) if o != p and dist[p][o] <= kd])
    lrd = []
    for p in range(n):
        reach = [max(kdist[o], dist[p][o]) for o in hood[p]]
        mean = sum(reach) / len(reach)
        lrd.append(INF if mean == 0 else 1.0 / mean)
    out = []
    for p in range(n):
        ratios = []
        for o in hood[p]:
            if lrd[o] == INF and lrd[p] == INF:
                ratios.append(1.0)
            elif lrd[p] == INF:
                ratios.append(0.0)
            else:
                ratios.append(lrd[o] / lrd[p])
        out.append(sum(ratios) / len(ratios))
    return out


def pca_reference(X, k):
    """Principal axes and variance ratios from the SVD of the centered data."""
    X = np.asarray(X, dtype=np.float64)
    C = X - X.mean(axis=0)
    _, s, vt = np.linalg.svd(C, full_matrices=False)
    var = s ** 2 / X.shape[0]
    full = np.zeros(X.shape[1])
    full[:len(var)] = var
    return vt[:k], full[:k] / full.sum(), full


def random_tree(rng: random.Random, max_nodes: int = 200, kinds=None) -> SyntaxNode:
    kinds = kinds or sorted(NODE_KINDS)[:6]
    size = rng.randint(1, max_nodes)
    nodes = [SyntaxNode(rng.choice(kinds))]
    for _ in range(size - 1):
        parent = rng.choice(nodes)
        child = SyntaxNode(rng.choice(kinds))
        parent.children.append(child)
        nodes.append(child)
    return nodes[0]


def tree_chains(tree: SyntaxNode, nmax: int) -> Counter:
    """All downward chains of length 1..nmax, found by starting a walk at every node."""
    out = Counter()

    def down(node, path):
        path = path + [node.kind]
        out[tuple(path)] += 1
        if len(path) < nmax:
            for c in node.children:
                down(c, path)

    every = []
    todo = [tree]
    while todo:
        node = todo.pop()
        every.append(node)
        todo.extend(node.children)
    for node in every:
        down(node, [])
    return out


def contiguous_grams(seq, nmax: int) -> Counter:
    out = Counter()
    for n in range(1, nmax + 1):
        for i in range(len(seq) - n + 1):
            out[tuple(seq[i:i + n])] += 1
    return out


def numeric_gradients(loss_fn, params, eps: float = 1e-6):
    grads = []
    for p in params:
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            i = it.multi_index
            old = p[i]
            p[i] = old + eps
            up = loss_fn()
            p[i] = old - eps
            down = loss_fn()
            p[i] = old
            g[i] = (up - down) / (2 * eps)
        grads.append(g)
    return grads


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(a) + np.linalg.norm(b), 1e-12))
