"""Markov equivalence and its causal refinement.

Two DAGs are Markov equivalent iff they share adjacencies and unshielded
colliders; they are causal Markov equivalent (for the effect of the treatment
on the outcome) iff in addition their optimal adjustment sets coincide.
"""

from __future__ import annotations

from .graph import Dag, GraphError
from .taxonomy import classify

__all__ = ["markov_equivalent", "causal_markov_equivalent"]


def _skeleton(g: Dag) -> frozenset[frozenset[str]]:
    return frozenset(frozenset(e) for e in g.edges)


def _unshielded_colliders(g: Dag) -> frozenset[tuple[frozenset[str], str]]:
    skel = _skeleton(g)
    out = set()
    for v in g.vertices:
        ps = sorted(g.parents(v))
        for i, p in enumerate(ps):
            for q in ps[i + 1 :]:
                if frozenset({p, q}) not in skel:
                    out.add((frozenset({p, q}), v))
    return frozenset(out)


def markov_equivalent(g1: Dag, g2: Dag) -> bool:
    """Same adjacencies and same unshielded colliders."""
    if set(g1.vertices) != set(g2.vertices):
        raise GraphError("graphs must share a vertex set")
    return _skeleton(g1) == _skeleton(g2) and _unshielded_colliders(
        g1
    ) == _unshielded_colliders(g2)


def causal_markov_equivalent(g1: Dag, g2: Dag) -> bool:
    """Markov equivalent and equal optimal adjustment sets.

    Both graphs must share vertices, treatment and outcome, and have the
    treatment ancestral to the outcome.
    """
    if set(g1.vertices) != set(g2.vertices):
        raise GraphError("graphs must share a vertex set")
    if g1.treatment != g2.treatment or g1.outcome != g2.outcome:
        raise GraphError("graphs must share treatment and outcome")
    o1 = classify(g1).o
    o2 = classify(g2).o
    return markov_equivalent(g1, g2) and o1 == o2
