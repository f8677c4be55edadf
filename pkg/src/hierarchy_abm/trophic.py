"""Directed-network hierarchy metrics: trophic levels and incoherence.

Given a weighted digraph with w[i, j] the weight of edge i -> j, each
node gets a level h_i from the symmetric singular system

    lap = diag(total_strength) - (W + W^T),   lap @ h = imbalance,

where total_strength_i = in_i + out_i and imbalance_i = in_i - out_i.
On a weakly connected graph the minimum-norm solution (levels summing to
zero) is the global minimizer of the incoherence

    F = sum_ij w_ij * (h_j - h_i - 1)^2 / sum_ij w_ij,

so F = 0 means every edge climbs exactly one level (a perfectly
stratified hierarchy), while a balanced cycle scores exactly 1. Levels
are defined only up to an additive constant; F is invariant under that
gauge, under reversing all edges, and under rescaling all weights.

Self-loops carry no hierarchy information and are stripped; disconnected
graphs are reduced to their largest weakly connected component before
solving, with the remaining nodes reported as omitted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import cg

Label = Hashable
Edge = tuple[Label, Label, float]

# Above this node count the solver switches from a dense factorization to
# Jacobi-preconditioned conjugate gradients on the sparse system.
DENSE_SOLVER_LIMIT = 2000

RESIDUAL_RTOL = 1e-8


class NoEdgesError(ValueError):
    """Raised when incoherence is requested for a graph without edges."""


class DisconnectedGraphError(ValueError):
    """Raised when levels are requested for a non-weakly-connected graph."""


@dataclass(frozen=True)
class DirectedGraph:
    """Dense weighted digraph; w[i, j] is the weight of edge i -> j."""

    weights: np.ndarray
    labels: tuple[Label, ...]

    def __post_init__(self) -> None:
        w = self.weights
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weight matrix must be square")
        if len(self.labels) != w.shape[0]:
            raise ValueError("label count must match matrix size")
        if not np.all(np.isfinite(w)) or (w < 0).any():
            raise ValueError("weights must be finite and nonnegative")

    @classmethod
    def from_edges(cls, edges: Iterable[Edge]) -> "DirectedGraph":
        """Graph from (source, target, weight) records; parallel edges
        accumulate. Labels are sorted to fix the node order."""
        edge_list = [(s, t, float(w)) for s, t, w in edges]
        labels = tuple(sorted({e[0] for e in edge_list} | {e[1] for e in edge_list}))
        index = {lab: k for k, lab in enumerate(labels)}
        w = np.zeros((len(labels), len(labels)))
        for s, t, weight in edge_list:
            if weight <= 0:
                raise ValueError(f"edge weight must be positive, got {weight!r}")
            w[index[s], index[t]] += weight
        return cls(w, labels)

    @classmethod
    def from_matrix(cls, weights: np.ndarray, labels: Sequence[Label] | None = None) -> "DirectedGraph":
        w = np.asarray(weights, dtype=np.float64)
        labs = tuple(labels) if labels is not None else tuple(range(w.shape[0]))
        return cls(w, labs)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def total_weight(self) -> float:
        return float(self.weights.sum())

    def without_self_loops(self) -> "DirectedGraph":
        if not self.weights.diagonal().any():
            return self
        w = self.weights.copy()
        np.fill_diagonal(w, 0.0)
        return DirectedGraph(w, self.labels)

    def subgraph(self, indices: np.ndarray) -> "DirectedGraph":
        return DirectedGraph(
            self.weights[np.ix_(indices, indices)],
            tuple(self.labels[int(k)] for k in indices),
        )


@dataclass(frozen=True)
class TrophicResult:
    levels: dict[Label, float]      # min-norm gauge: levels sum to 0
    incoherence: float
    component: tuple[Label, ...]    # nodes the solve ran on
    omitted: tuple[Label, ...]      # isolated / minor-component nodes


def largest_weak_component(graph: DirectedGraph) -> tuple[DirectedGraph, tuple[Label, ...]]:
    """Largest weakly connected component of the loop-stripped graph.

    Size ties go to the component containing the smallest node label.
    Returns the component subgraph and the omitted labels.
    """
    g = graph.without_self_loops()
    if g.n == 0:
        return g, ()
    _, membership = connected_components(sp.csr_matrix(g.weights), directed=True, connection="weak")
    groups: dict[int, list[int]] = {}
    for idx, comp in enumerate(membership):
        groups.setdefault(int(comp), []).append(idx)
    ordered = sorted(groups.values(), key=lambda idxs: (-len(idxs), min(g.labels[k] for k in idxs)))
    keep = np.array(ordered[0], dtype=np.intp)
    omitted = tuple(g.labels[k] for group in ordered[1:] for k in sorted(group))
    return g.subgraph(keep), omitted


def _solve_min_norm(lap: np.ndarray, imbalance: np.ndarray, dense_limit: int) -> np.ndarray:
    n = lap.shape[0]
    ones = np.ones(n)
    if n <= dense_limit:
        # Grounding with the rank-one term ones @ ones.T / n makes the
        # system positive definite and pins the zero-sum gauge exactly.
        h = np.linalg.solve(lap + np.outer(ones, ones) / n, imbalance)
    else:
        grounded = sp.csr_matrix(lap)
        diag = lap.diagonal() + 1.0 / n
        precond = sp.linalg.LinearOperator((n, n), matvec=lambda x: x / diag)
        operator = sp.linalg.LinearOperator(
            (n, n), matvec=lambda x: grounded @ x + x.sum() / n
        )
        h, info = cg(operator, imbalance, rtol=1e-12, atol=0.0, maxiter=50 * n, M=precond)
        if info != 0:
            h, *_ = np.linalg.lstsq(lap, imbalance, rcond=None)
    h = h - h.mean()
    scale = np.linalg.norm(imbalance)
    if np.linalg.norm(lap @ h - imbalance) > RESIDUAL_RTOL * scale + 1e-12:
        raise ArithmeticError("trophic level solve did not converge")
    return h


def trophic_levels(graph: DirectedGraph, dense_limit: int = DENSE_SOLVER_LIMIT) -> np.ndarray:
    """Per-node levels for a weakly connected graph, zero-sum gauge.

    Callers holding a possibly disconnected graph should reduce it with
    largest_weak_component first.
    """
    g = graph.without_self_loops()
    if g.n == 0:
        raise ValueError("empty graph")
    if g.total_weight() <= 0:
        raise NoEdgesError("graph has no edges")
    n_comp, _ = connected_components(sp.csr_matrix(g.weights), directed=True, connection="weak")
    if n_comp > 1:
        raise DisconnectedGraphError(
            f"graph has {n_comp} weak components; reduce with largest_weak_component first"
        )
    w = g.weights
    in_strength = w.sum(axis=0)
    out_strength = w.sum(axis=1)
    lap = np.diag(in_strength + out_strength) - (w + w.T)
    return _solve_min_norm(lap, in_strength - out_strength, dense_limit)


def edge_incoherence(weights: np.ndarray, levels: np.ndarray) -> float:
    """Weighted mean squared deviation of edge level-gaps from 1."""
    total = weights.sum()
    if total <= 0:
        raise NoEdgesError("graph has no edges")
    rows, cols = np.nonzero(weights)
    gaps = levels[cols] - levels[rows] - 1.0
    return float((weights[rows, cols] * gaps**2).sum() / total)


def analyze(graph: DirectedGraph, dense_limit: int = DENSE_SOLVER_LIMIT) -> TrophicResult:
    """Full pipeline: strip self-loops, reduce to the largest weak
    component, solve for levels, score incoherence on that component."""
    component, omitted = largest_weak_component(graph)
    if component.n == 0 or component.total_weight() <= 0:
        raise NoEdgesError("graph has no edges")
    levels = trophic_levels(component, dense_limit)
    f = edge_incoherence(component.weights, levels)
    return TrophicResult(
        levels={lab: float(h) for lab, h in zip(component.labels, levels)},
        incoherence=f,
        component=component.labels,
        omitted=omitted,
    )


def trophic_incoherence(graph: DirectedGraph, dense_limit: int = DENSE_SOLVER_LIMIT) -> float:
    return analyze(graph, dense_limit).incoherence


# --- layered layout -------------------------------------------------------

LAYER_BIN = 0.25
BARYCENTER_SWEEPS = 8


@dataclass(frozen=True)
class LayoutResult:
    positions: dict[Label, tuple[float, float]]   # x from layer ordering, y = level
    speaking_frequency: dict[Label, float]        # endorsements received


def layered_layout(graph: DirectedGraph, levels: dict[Label, float],
                   layer_bin: float = LAYER_BIN,
                   sweeps: int = BARYCENTER_SWEEPS) -> LayoutResult:
    """Deterministic layered drawing coordinates.

    y is the trophic level; nodes are binned into layers (levels rounded
    to the nearest layer_bin) and ordered within each layer by an
    iterated barycenter heuristic with a fixed sweep count. Node size and
    color are meant to encode speaking frequency, returned here as the
    per-node endorsement in-weight.
    """
    full_index = {lab: k for k, lab in enumerate(graph.labels)}
    labels = [lab for lab in graph.labels if lab in levels]
    if not labels:
        return LayoutResult({}, {})
    sel = np.array([full_index[lab] for lab in labels], dtype=np.intp)
    w = graph.weights[np.ix_(sel, sel)]
    sym = w + w.T
    strength = sym.sum(axis=1)
    index = {lab: k for k, lab in enumerate(labels)}

    layers: dict[int, list[Label]] = {}
    for lab in sorted(labels, key=lambda l: (levels[l], str(l))):
        layers.setdefault(round(levels[lab] / layer_bin), []).append(lab)

    x = np.zeros(len(labels))
    for members in layers.values():
        for slot, lab in enumerate(members):
            x[index[lab]] = slot - (len(members) - 1) / 2.0

    for _ in range(sweeps):
        with np.errstate(invalid="ignore"):
            bary = np.where(strength > 0, (sym @ x) / np.where(strength > 0, strength, 1.0), x)
        for members in layers.values():
            if len(members) < 2:
                continue
            members.sort(key=lambda l: (bary[index[l]], str(l)))
            for slot, lab in enumerate(members):
                x[index[lab]] = slot - (len(members) - 1) / 2.0

    speak = {lab: float(w[:, index[lab]].sum()) for lab in labels}
    positions = {lab: (float(x[index[lab]]), float(levels[lab])) for lab in labels}
    return LayoutResult(positions, speak)


# --- edge-list text format ------------------------------------------------

def parse_edge_line(line: str) -> Edge | None:
    """One `source target weight` triple; `#` starts a comment."""
    body = line.split("#", 1)[0].strip()
    if not body:
        return None
    parts = body.split()
    if len(parts) != 3:
        raise ValueError(f"expected 'source target weight', got {line.rstrip()!r}")
    try:
        weight = float(parts[2])
    except ValueError as err:
        raise ValueError(f"bad weight in line {line.rstrip()!r}") from err
    return parts[0], parts[1], weight


def read_edge_list(path) -> list[Edge]:
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            try:
                edge = parse_edge_line(line)
            except ValueError as err:
                raise ValueError(f"{path}:{lineno}: {err}") from err
            if edge is not None:
                edges.append(edge)
    return edges
