"""Independent reference implementations used to check production code.

Deliberately different routes: components by hand-rolled BFS (not
scipy.csgraph), levels by explicit Moore-Penrose pseudoinverse (not a
grounded direct solve), incoherence by a double loop over entries.
"""

from __future__ import annotations

import numpy as np


def bfs_largest_weak_component(weights: np.ndarray) -> list[int]:
    """Indices of the largest weakly connected component of the
    loop-stripped graph; ties go to the component with the smallest
    member index."""
    w = weights.copy()
    np.fill_diagonal(w, 0.0)
    n = w.shape[0]
    adjacency = (w > 0) | (w.T > 0)
    seen = [False] * n
    components: list[list[int]] = []
    for start in range(n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            node = stack.pop()
            comp.append(node)
            for other in range(n):
                if adjacency[node, other] and not seen[other]:
                    seen[other] = True
                    stack.append(other)
        components.append(sorted(comp))
    components.sort(key=lambda comp: (-len(comp), comp[0]))
    return components[0]


def pinv_levels(weights: np.ndarray) -> np.ndarray:
    """Min-norm levels via explicit pseudoinverse of the symmetric
    Laplacian-like operator."""
    w = weights.astype(np.float64).copy()
    np.fill_diagonal(w, 0.0)
    strength = w.sum(axis=0) + w.sum(axis=1)
    lam = np.diag(strength) - (w + w.T)
    imbalance = w.sum(axis=0) - w.sum(axis=1)
    return np.linalg.pinv(lam) @ imbalance


def oracle_incoherence(weights: np.ndarray) -> float:
    """Full reference pipeline: strip loops, take the largest weak
    component by BFS, solve levels via pinv, average squared gap errors."""
    w = weights.astype(np.float64).copy()
    np.fill_diagonal(w, 0.0)
    keep = bfs_largest_weak_component(w)
    sub = w[np.ix_(keep, keep)]
    total = sub.sum()
    if total <= 0:
        raise ValueError("no edges")
    h = pinv_levels(sub)
    acc = 0.0
    for i in range(sub.shape[0]):
        for j in range(sub.shape[0]):
            if sub[i, j] > 0:
                acc += sub[i, j] * (h[j] - h[i] - 1.0) ** 2
    return acc / total


def random_digraph(rng: np.random.Generator, max_nodes: int = 6,
                   with_self_loops: bool = True) -> np.ndarray:
    """Random small digraph with weights in {1, 2}, at least one
    off-diagonal edge, optionally with self-loops injected."""
    while True:
        n = int(rng.integers(2, max_nodes + 1))
        mask = rng.random((n, n)) < 0.35
        if not with_self_loops:
            np.fill_diagonal(mask, False)
        w = mask * rng.integers(1, 3, size=(n, n)).astype(np.float64)
        off = w.copy()
        np.fill_diagonal(off, 0.0)
        if off.sum() > 0:
            return w
