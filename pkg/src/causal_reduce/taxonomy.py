"""Vertex taxonomy around a treatment/outcome pair.

Partitions the vertices of a :class:`~causal_reduce.graph.Dag` into the
treatment, non-ancestors of the outcome (N), indirect ancestors reaching the
outcome only through the treatment (I), baseline covariates (W) and mediators
(M, which includes the outcome), and derives the optimal adjustment set O
together with its minimal d-separating subset O_min.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .graph import (
    Dag,
    GraphError,
    ancestors,
    d_separated,
    descendants,
    has_causal_path,
    parents,
)

__all__ = [
    "Taxonomy",
    "AssumptionViolation",
    "classify",
    "minimal_dseparator_within",
]


class AssumptionViolation(GraphError):
    """The treatment is not an ancestor of the outcome."""


@dataclass(frozen=True)
class Taxonomy:
    """Partition {A} | n | i | w | m of the vertices, plus o and o_min."""

    n: frozenset[str]
    i: frozenset[str]
    w: frozenset[str]
    m: frozenset[str]
    o: frozenset[str]
    o_min: frozenset[str]


def classify(g: Dag) -> Taxonomy:
    """Classify every vertex of ``g``; raises if A is not an ancestor of Y."""
    a, y = g.treatment, g.outcome
    an_y = ancestors(g, {y})
    if a not in an_y:
        raise AssumptionViolation(
            f"treatment {a!r} is not an ancestor of outcome {y!r}"
        )
    de_a = descendants(g, {a})
    n = frozenset(v for v in g.vertices if v not in an_y)
    m = frozenset(v for v in de_a if v != a and v in an_y)
    i = frozenset(
        v
        for v in an_y
        if v != a and v not in de_a and not has_causal_path(g, v, y, avoiding={a})
    )
    w = frozenset(v for v in an_y if v != a and v not in de_a and v not in i)
    o = parents(g, m) - m - {a}
    o_min = minimal_dseparator_within(g, {a}, frozenset(), o)
    return Taxonomy(n=n, i=i, w=w, m=m, o=o, o_min=o_min)


def minimal_dseparator_within(
    g: Dag, x: Iterable[str], y: Iterable[str], c: Iterable[str]
) -> frozenset[str]:
    """Unique inclusion-minimal ``s <= c`` with ``x`` d-separated from
    ``y | (c \\ s)`` given ``s``.

    Requires ``d_separated(g, x, y, c)``.  Uniqueness of the minimum (by the
    intersection property of d-separation) makes greedy backward elimination
    exact; candidates are dropped in reverse topological order for
    determinism.
    """
    xs = frozenset(x)
    ys = frozenset(y)
    cs = frozenset(c)
    if not d_separated(g, xs, ys, cs):
        raise GraphError("precondition failed: x and y are not d-separated by c")
    s = set(cs)
    for v in reversed(g.sort_topologically(cs)):
        candidate = s - {v}
        if d_separated(g, xs, ys | (cs - candidate), candidate):
            s = candidate
    return frozenset(s)
