"""Discrete Bayesian networks over a Dag: validation, exact enumeration,
random law generation and i.i.d. ancestral sampling.

States are integers ``0 .. card-1``.  Every CPT is a dense float array whose
leading axes are the vertex's parents in canonical (topological) order and
whose last axis is the vertex's own state, so a row ``cpt[parent_state]`` is
a distribution over the vertex.  Everything is exact enumeration at desk
scale; a guard refuses joint state spaces above 10**7 cells.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .graph import Dag, GraphError, topo_sort

__all__ = [
    "DiscreteBn",
    "Dataset",
    "ValidationCertificate",
    "NormalizationError",
    "PositivityError",
    "ZeroConditioningEvent",
    "EnumerationLimitError",
    "ENUMERATION_LIMIT",
    "validate",
    "joint_prob",
    "joint_table",
    "cond_expectation",
    "random_law",
    "sample",
    "derive_seed",
    "bn_to_json",
    "bn_from_json",
    "dataset_to_csv",
    "dataset_from_csv",
]

ENUMERATION_LIMIT = 10_000_000

_ROW_SUM_TOL = 1e-12


class NormalizationError(ValueError):
    """A CPT row does not sum to one (or has entries outside [0, 1])."""


class PositivityError(ValueError):
    """A required treatment probability is zero (or below the floor)."""


class ZeroConditioningEvent(ValueError):
    """A conditional was requested on an event of probability zero."""


class EnumerationLimitError(ValueError):
    """The joint state space exceeds the exact-enumeration guard."""


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Documented splitting rule for replication streams:
    ``splitmix64(splitmix64(seed) XOR splitmix64(index))``."""
    return _splitmix64(_splitmix64(seed) ^ _splitmix64(index))


def check_enumerable(cards: Iterable[int]) -> None:
    total = 1
    for c in cards:
        total *= c
        if total > ENUMERATION_LIMIT:
            raise EnumerationLimitError(
                f"joint state space exceeds {ENUMERATION_LIMIT} configurations"
            )


@dataclass(frozen=True, eq=False)
class DiscreteBn:
    """A Dag plus finite state spaces and conditional probability tables."""

    graph: Dag
    cards: dict[str, int]
    cpts: dict[str, np.ndarray]

    def __init__(
        self,
        graph: Dag,
        cards: Mapping[str, int],
        cpts: Mapping[str, np.ndarray | Sequence],
    ):
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "cards", dict(cards))
        norm: dict[str, np.ndarray] = {}
        for v in graph.vertices:
            if v not in self.cards:
                raise GraphError(f"missing cardinality for {v!r}")
            if int(self.cards[v]) < 1:
                raise GraphError(f"cardinality of {v!r} must be >= 1")
            self.cards[v] = int(self.cards[v])
            if v not in cpts:
                raise GraphError(f"missing CPT for {v!r}")
            table = np.asarray(cpts[v], dtype=float)
            shape = tuple(self.cards[p] for p in graph.parent_list(v)) + (
                self.cards[v],
            )
            if table.shape != shape:
                raise GraphError(
                    f"CPT for {v!r} has shape {table.shape}, expected {shape} "
                    "(parent axes in topological order, own state last)"
                )
            table = table.copy()
            table.setflags(write=False)
            norm[v] = table
        object.__setattr__(self, "cpts", norm)

    def parent_order(self, v: str) -> tuple[str, ...]:
        return self.graph.parent_list(v)

    def state_shape(self) -> tuple[int, ...]:
        return tuple(self.cards[v] for v in self.graph.vertices)

    def with_cpt(self, v: str, table: np.ndarray) -> "DiscreteBn":
        """Copy of this network with one CPT replaced."""
        cpts = dict(self.cpts)
        cpts[v] = np.asarray(table, dtype=float)
        return DiscreteBn(self.graph, self.cards, cpts)


@dataclass(frozen=True)
class ValidationCertificate:
    rows_checked: int
    positivity_level: int | None = None
    positivity_epsilon: float | None = None


def validate(
    bn: DiscreteBn,
    require_positivity_for: tuple[int, float] | None = None,
) -> ValidationCertificate:
    """Check row normalization and ranges; optionally certify positivity.

    ``require_positivity_for`` is a ``(treatment_level, epsilon)`` pair; the
    check is ``P(A = level | parent state) >= epsilon`` for every parent
    state of the treatment.
    """
    rows = 0
    for v in bn.graph.vertices:
        table = bn.cpts[v]
        flat = table.reshape(-1, bn.cards[v])
        rows += flat.shape[0]
        if np.any(flat < 0.0) or np.any(flat > 1.0):
            raise NormalizationError(f"CPT for {v!r} has entries outside [0, 1]")
        sums = flat.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > _ROW_SUM_TOL)[0]
        if bad.size:
            idx = np.unravel_index(int(bad[0]), table.shape[:-1]) if table.ndim > 1 else ()
            raise NormalizationError(
                f"CPT row for {v!r} at parent state {tuple(int(i) for i in idx)} "
                f"sums to {sums[bad[0]]:.12g}"
            )
    cert = ValidationCertificate(rows_checked=rows)
    if require_positivity_for is not None:
        level, eps = require_positivity_for
        a = bn.graph.treatment
        table = bn.cpts[a].reshape(-1, bn.cards[a])
        if not 0 <= level < bn.cards[a]:
            raise GraphError(f"treatment level {level} out of range")
        bad = np.nonzero(table[:, level] < eps)[0]
        if bad.size:
            shape = bn.cpts[a].shape[:-1]
            idx = np.unravel_index(int(bad[0]), shape) if shape else ()
            raise PositivityError(
                f"P({a}={level} | parents={tuple(int(i) for i in idx)}) = "
                f"{table[bad[0], level]:.6g} < {eps}"
            )
        cert = ValidationCertificate(rows, level, eps)
    return cert


# -- exact enumeration -----------------------------------------------------

def _broadcast_factor(
    bn_axes: Sequence[str], cards: Mapping[str, int], factor_axes: Sequence[str], table: np.ndarray
) -> np.ndarray:
    """Expand ``table`` (axes ``factor_axes``) to broadcast over ``bn_axes``."""
    pos = {v: i for i, v in enumerate(bn_axes)}
    perm = sorted(range(len(factor_axes)), key=lambda i: pos[factor_axes[i]])
    arranged = np.transpose(table, perm)
    shape = [1] * len(bn_axes)
    for v, n in zip([factor_axes[i] for i in perm], arranged.shape):
        shape[pos[v]] = n
    return arranged.reshape(shape)


def joint_table(bn: DiscreteBn) -> np.ndarray:
    """Full joint probability array with one axis per vertex, in declaration
    order."""
    check_enumerable(bn.state_shape())
    axes = bn.graph.vertices
    total = np.ones(bn.state_shape())
    for v in axes:
        factor_axes = list(bn.parent_order(v)) + [v]
        total = total * _broadcast_factor(axes, bn.cards, factor_axes, bn.cpts[v])
    return total


def joint_prob(bn: DiscreteBn, v: Sequence[int]) -> float:
    """Probability of one full configuration (states in declaration order)."""
    if len(v) != len(bn.graph.vertices):
        raise GraphError("state tuple length does not match the vertex count")
    state = {name: int(s) for name, s in zip(bn.graph.vertices, v)}
    for name, s in state.items():
        if not 0 <= s < bn.cards[name]:
            raise GraphError(f"state {s} out of range for {name!r}")
    p = 1.0
    for name in bn.graph.vertices:
        idx = tuple(state[q] for q in bn.parent_order(name)) + (state[name],)
        p *= float(bn.cpts[name][idx])
    return p


def cond_expectation(
    bn: DiscreteBn,
    f_vars: Sequence[str],
    f: Callable[..., float],
    given: Mapping[str, int] | None = None,
) -> float:
    """E[f(f_vars) | given] by exact enumeration.

    ``f`` receives one state per label in ``f_vars``; ``given`` is a partial
    assignment.  Raises :class:`ZeroConditioningEvent` when the conditioning
    event has probability zero.
    """
    given = dict(given or {})
    for name in list(f_vars) + list(given):
        bn.graph._check(name)
    joint = joint_table(bn)
    axes = bn.graph.vertices
    pos = {v: i for i, v in enumerate(axes)}
    sl = [slice(None)] * len(axes)
    for name, s in given.items():
        if not 0 <= int(s) < bn.cards[name]:
            raise GraphError(f"state {s} out of range for {name!r}")
        sl[pos[name]] = int(s)
    restricted = joint[tuple(sl)]
    denom = float(restricted.sum())
    if denom <= 0.0:
        raise ZeroConditioningEvent(f"P({given}) = 0")
    kept = [v for v in axes if v not in given]
    grids = np.meshgrid(
        *[np.arange(bn.cards[v]) for v in f_vars], indexing="ij"
    )
    f_arr = np.vectorize(f, otypes=[float])(*grids) if f_vars else np.asarray(f())
    # align f over the kept axes; conditioned-on f_vars are fixed scalars
    shape = [1] * len(kept)
    take: list[int | slice] = []
    for v in f_vars:
        if v in given:
            take.append(int(given[v]))
        else:
            take.append(slice(None))
            shape[kept.index(v)] = bn.cards[v]
    f_over_kept = np.asarray(f_arr[tuple(take)], dtype=float)
    order = [v for v in f_vars if v not in given]
    perm = sorted(range(len(order)), key=lambda i: kept.index(order[i]))
    f_over_kept = np.transpose(f_over_kept, perm).reshape(shape)
    num = float((restricted * f_over_kept).sum())
    return num / denom


# -- law generation and sampling --------------------------------------------

def random_law(
    g: Dag, cards: Mapping[str, int], seed: int, epsilon: float = 0.01
) -> DiscreteBn:
    """Random full-support law Markov to ``g``.

    Rows are symmetric-Dirichlet draws mixed with the uniform floor
    ``(1 - card * epsilon) * row + epsilon``, so every entry is at least
    ``epsilon``.  Deterministic given ``seed``.
    """
    cards = {v: int(cards[v]) for v in g.vertices}
    for v in g.vertices:
        if epsilon <= 0.0 or epsilon * cards[v] >= 1.0:
            raise ValueError(
                f"epsilon {epsilon} infeasible for cardinality {cards[v]} of {v!r}"
            )
    rng = np.random.default_rng(derive_seed(seed, 0))
    cpts = {}
    for v in g.vertices:
        shape = tuple(cards[p] for p in g.parent_list(v)) + (cards[v],)
        raw = rng.gamma(1.0, 1.0, size=shape)
        rows = raw / raw.sum(axis=-1, keepdims=True)
        cpts[v] = (1.0 - cards[v] * epsilon) * rows + epsilon
    return DiscreteBn(g, cards, cpts)


@dataclass(frozen=True)
class Dataset:
    """Integer-coded observations: one column per vertex label."""

    columns: tuple[str, ...]
    rows: np.ndarray
    cards: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        if rows.ndim != 2 or rows.shape[1] != len(self.columns):
            raise ValueError("rows must be an (n, len(columns)) integer array")
        object.__setattr__(self, "rows", rows)
        for j, name in enumerate(self.columns):
            card = self.cards.get(name)
            if card is not None and rows.size and (
                rows[:, j].min() < 0 or rows[:, j].max() >= card
            ):
                raise ValueError(f"states of {name!r} outside 0..{card - 1}")

    @property
    def n(self) -> int:
        return int(self.rows.shape[0])

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    def card(self, name: str) -> int:
        card = self.cards.get(name)
        if card is None:
            col = self.column(name)
            card = int(col.max()) + 1 if col.size else 1
        return card


def sample(bn: DiscreteBn, n: int, seed: int) -> Dataset:
    """Ancestral sampling of ``n`` i.i.d. rows; reproducible per seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    cols: dict[str, np.ndarray] = {}
    for v in topo_sort(bn.graph):
        parents = bn.parent_order(v)
        table = bn.cpts[v]
        if parents:
            rows = table[tuple(cols[p] for p in parents)]
        else:
            rows = np.broadcast_to(table, (n, bn.cards[v]))
        cum = np.cumsum(rows, axis=1)
        u = rng.random(n)
        states = (u[:, None] > cum).sum(axis=1)
        cols[v] = np.minimum(states, bn.cards[v] - 1).astype(np.int64)
    data = np.column_stack([cols[v] for v in bn.graph.vertices])
    return Dataset(tuple(bn.graph.vertices), data, dict(bn.cards))


# -- serialization -----------------------------------------------------------

def bn_to_json(bn: DiscreteBn) -> dict:
    """JSON-ready dict; CPT rows are dense row-major over lexicographic
    parent states (parent axes in topological order)."""
    return {
        "graph": {
            "vertices": list(bn.graph.vertices),
            "edges": [[u, v] for u, v in bn.graph.edges],
            "treatment": bn.graph.treatment,
            "outcome": bn.graph.outcome,
        },
        "cards": dict(bn.cards),
        "cpts": {
            v: {
                "parents": list(bn.parent_order(v)),
                "table": bn.cpts[v].reshape(-1, bn.cards[v]).tolist(),
            }
            for v in bn.graph.vertices
        },
    }


def bn_from_json(payload: dict) -> DiscreteBn:
    gspec = payload["graph"]
    g = Dag(
        gspec["vertices"],
        [tuple(e) for e in gspec["edges"]],
        gspec["treatment"],
        gspec["outcome"],
    )
    cards = {v: int(c) for v, c in payload["cards"].items()}
    cpts = {}
    for v in g.vertices:
        spec = payload["cpts"][v]
        declared = tuple(spec.get("parents", ()))
        if declared != g.parent_list(v):
            raise GraphError(
                f"CPT parents for {v!r} must be listed in topological order "
                f"{g.parent_list(v)}, got {declared}"
            )
        shape = tuple(cards[p] for p in declared) + (cards[v],)
        cpts[v] = np.asarray(spec["table"], dtype=float).reshape(shape)
    return DiscreteBn(g, cards, cpts)


def load_bn(path: str) -> DiscreteBn:
    with open(path, "r", encoding="utf-8") as fh:
        return bn_from_json(json.load(fh))


def save_bn(bn: DiscreteBn, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(bn_to_json(bn), fh, indent=2)


def dataset_to_csv(ds: Dataset, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ds.columns)
        writer.writerows(ds.rows.tolist())


def dataset_from_csv(path: str, cards: Mapping[str, int] | None = None) -> Dataset:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[int(x) for x in row] for row in reader if row]
    data = np.asarray(rows, dtype=np.int64).reshape(len(rows), len(header))
    return Dataset(tuple(header), data, dict(cards or {}))
