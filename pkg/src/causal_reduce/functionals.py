"""Exact evaluation of identifying formulas, the efficient influence
function and its variance, and maximum-likelihood plugin estimators.

All exact routines enumerate the full joint state space of a
:class:`~causal_reduce.bn.DiscreteBn` (guarded at 10**7 configurations) and
are pure given their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .bn import (
    Dataset,
    DiscreteBn,
    PositivityError,
    ZeroConditioningEvent,
    _broadcast_factor,
    check_enumerable,
    joint_table,
)
from .graph import Dag, GraphError
from .taxonomy import Taxonomy, classify

__all__ = [
    "EstimateReport",
    "EifContext",
    "EmptyCellError",
    "g_functional_exact",
    "g_functional_for_graph",
    "adjustment_exact",
    "front_door_exact",
    "eif_exact",
    "eif_variance",
    "eif_variance_for_graph",
    "adjustment_if_variance",
    "plugin_g",
    "plugin_adjustment",
]


class EmptyCellError(ValueError):
    """A plugin estimator needed a conditional cell with no observations."""

    def __init__(self, message: str, cells: list[tuple[str, tuple[int, ...]]]):
        super().__init__(message)
        self.cells = cells


@dataclass(frozen=True)
class EstimateReport:
    """An estimator value, optionally with replication statistics."""

    estimator: str
    value: float
    n: int
    rep_mean: float | None = None
    rep_variance: float | None = None
    n_times_variance: float | None = None


def _positions(labels: Sequence[str]) -> dict[str, int]:
    return {v: i for i, v in enumerate(labels)}


def _expect_given(
    joint: np.ndarray,
    labels: Sequence[str],
    f_arr: np.ndarray,
    given: Iterable[str],
) -> np.ndarray:
    """E[f | given] as a broadcastable array (keepdims); zero off-support."""
    pos = _positions(labels)
    keep = {pos[v] for v in given}
    other = tuple(i for i in range(len(labels)) if i not in keep)
    denom = joint.sum(axis=other, keepdims=True)
    num = (joint * f_arr).sum(axis=other, keepdims=True)
    safe = np.where(denom > 0.0, denom, 1.0)
    return np.where(denom > 0.0, num / safe, 0.0)


def _value_axis(labels: Sequence[str], cards: Mapping[str, int], v: str) -> np.ndarray:
    """State values of ``v`` (0..card-1) broadcast along its axis."""
    shape = [1] * len(labels)
    shape[_positions(labels)[v]] = cards[v]
    return np.arange(cards[v], dtype=float).reshape(shape)


def _marginal_for_graph(bn: DiscreteBn, graph: Dag) -> np.ndarray:
    """Marginal joint of bn over ``graph.vertices``, axes in graph order."""
    missing = [v for v in graph.vertices if v not in bn.graph.vertices]
    if missing:
        raise GraphError(f"graph vertices {missing} not in the network")
    joint = joint_table(bn)
    labels = bn.graph.vertices
    keep = set(graph.vertices)
    drop = tuple(i for i, v in enumerate(labels) if v not in keep)
    marg = joint.sum(axis=drop)
    remaining = [v for v in labels if v in keep]
    perm = [remaining.index(v) for v in graph.vertices]
    return np.transpose(marg, perm)


def _conditional_from_joint(
    joint: np.ndarray,
    labels: Sequence[str],
    child: str,
    parents: Iterable[str],
) -> np.ndarray:
    """p(child | parents) from a joint array; zero where the conditioning
    event has no mass (such cells never carry weight on the suites used)."""
    pos = _positions(labels)
    pa = set(parents)
    num_axes = tuple(i for i, v in enumerate(labels) if v != child and v not in pa)
    den_axes = tuple(i for i, v in enumerate(labels) if v == child or v not in pa)
    num = joint.sum(axis=num_axes, keepdims=True)
    den = joint.sum(axis=den_axes, keepdims=True)
    safe = np.where(den > 0.0, den, 1.0)
    return np.where(den > 0.0, num / safe, 0.0)


def _check_positivity(bn: DiscreteBn, a: int) -> None:
    """P(A=a | pa(A)) must be positive at every reachable parent state."""
    g = bn.graph
    treat = g.treatment
    if not 0 <= a < bn.cards[treat]:
        raise GraphError(f"treatment level {a} out of range")
    joint = joint_table(bn)
    labels = g.vertices
    parents = g.parent_list(treat)
    pa_marg = joint.sum(
        axis=tuple(i for i, v in enumerate(labels) if v not in parents)
    )
    remaining = [v for v in labels if v in parents]
    pa_marg = np.transpose(pa_marg, [remaining.index(p) for p in parents])
    table = bn.cpts[treat][..., a]
    bad = (pa_marg > 0.0) & (table <= 0.0)
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise PositivityError(
            f"P({treat}={a} | {parents}={idx}) = 0 on a positive-probability event"
        )


def g_functional_exact(bn: DiscreteBn, a: int) -> float:
    """Interventional mean at treatment level ``a`` via the network's own
    truncated factorization."""
    _check_positivity(bn, a)
    g = bn.graph
    labels = [v for v in g.vertices if v != g.treatment]
    cards = bn.cards
    check_enumerable(cards[v] for v in labels)
    total = np.ones([cards[v] for v in labels])
    for v in labels:
        parent_axes = list(bn.parent_order(v))
        table = bn.cpts[v]
        if g.treatment in parent_axes:
            axis = parent_axes.index(g.treatment)
            table = np.take(table, a, axis=axis)
            parent_axes.remove(g.treatment)
        total = total * _broadcast_factor(labels, cards, parent_axes + [v], table)
    y_vals = _value_axis(labels, cards, g.outcome)
    return float((total * y_vals).sum())


def g_functional_for_graph(bn: DiscreteBn, graph: Dag, a: int) -> float:
    """Evaluate ``graph``'s g-formula against the law of ``bn``.

    ``graph.vertices`` may be a subset of the network's vertices, in which
    case the marginal law is used; this computes the reduced-graph
    functional of the marginal law in one step.
    """
    marg = _marginal_for_graph(bn, graph)
    labels = graph.vertices
    cards = {v: bn.cards[v] for v in labels}
    treat = graph.treatment
    if not 0 <= a < cards[treat]:
        raise GraphError(f"treatment level {a} out of range")
    pos = _positions(labels)
    total = np.ones([1] * len(labels))
    for v in labels:
        if v == treat:
            continue
        cond = _conditional_from_joint(marg, labels, v, graph.parents(v))
        if treat in graph.parents(v):
            cond = np.take(cond, [a], axis=pos[treat])
        total = total * cond
    y_vals = _value_axis(labels, cards, graph.outcome)
    return float((total * y_vals).sum())


def adjustment_exact(bn: DiscreteBn, L: Iterable[str], a: int) -> float:
    """Adjustment formula: sum over l of E[Y | A=a, L=l] P(l)."""
    g = bn.graph
    labels = g.vertices
    Ls = set()
    for v in L:
        g._check(v)
        Ls.add(v)
    joint = joint_table(bn)
    pos = _positions(labels)
    y_vals = _value_axis(labels, bn.cards, g.outcome)
    p_l = joint.sum(
        axis=tuple(i for i, v in enumerate(labels) if v not in Ls), keepdims=True
    )
    at_a = np.take(joint, [a], axis=pos[g.treatment])
    den = at_a.sum(
        axis=tuple(i for i, v in enumerate(labels) if v not in Ls), keepdims=True
    )
    num = (at_a * y_vals).sum(
        axis=tuple(i for i, v in enumerate(labels) if v not in Ls), keepdims=True
    )
    needed = p_l > 0.0
    if np.any(needed & (den <= 0.0)):
        raise ZeroConditioningEvent(
            f"P({g.treatment}={a}, L=l) = 0 for some l with P(l) > 0"
        )
    safe = np.where(den > 0.0, den, 1.0)
    return float(np.where(needed, num / safe * p_l, 0.0).sum())


def _take_compat(arr: np.ndarray, axis: int, index: int) -> np.ndarray:
    """Take ``index`` along ``axis`` (keepdims), tolerating size-1 axes."""
    if arr.shape[axis] == 1:
        return arr
    return np.take(arr, [index], axis=axis)


def front_door_exact(bn: DiscreteBn, mediators: Iterable[str], a: int) -> float:
    """Front-door formula through the mediator set.

    Inner mixtures over treatment levels are restricted to levels observable
    jointly with the mediator state and renormalized, which only matters for
    degenerate laws; under positivity over (A, mediators) this is exactly the
    standard formula.
    """
    g = bn.graph
    labels = g.vertices
    Ms = set()
    for v in mediators:
        g._check(v)
        Ms.add(v)
    treat = g.treatment
    joint = joint_table(bn)
    pos = _positions(labels)
    y_vals = _value_axis(labels, bn.cards, g.outcome)

    am_axes = Ms | {treat}
    p_am = joint.sum(
        axis=tuple(i for i, v in enumerate(labels) if v not in am_axes), keepdims=True
    )
    p_a = joint.sum(
        axis=tuple(i for i, v in enumerate(labels) if v != treat), keepdims=True
    )
    if float(np.take(p_a, a, axis=pos[treat]).ravel()[0]) <= 0.0:
        raise ZeroConditioningEvent(f"P({treat}={a}) = 0")
    p_m_given_a = np.take(p_am, [a], axis=pos[treat]) / np.take(
        p_a, [a], axis=pos[treat]
    )
    num = (joint * y_vals).sum(
        axis=tuple(i for i, v in enumerate(labels) if v not in am_axes), keepdims=True
    )
    defined = p_am > 0.0
    safe = np.where(defined, p_am, 1.0)
    e_y_am = np.where(defined, num / safe, 0.0)
    weights = np.where(defined, p_a, 0.0)
    denom_a = weights.sum(axis=pos[treat], keepdims=True)
    if np.any((p_m_given_a > 0.0) & (denom_a <= 0.0)):
        raise ZeroConditioningEvent(
            "no treatment level is jointly observable with a needed mediator state"
        )
    safe_denom = np.where(denom_a > 0.0, denom_a, 1.0)
    inner = (e_y_am * weights).sum(axis=pos[treat], keepdims=True) / safe_denom
    return float((p_m_given_a * inner).sum())


# -- efficient influence function -------------------------------------------

@dataclass(frozen=True)
class EifContext:
    """Precomputed tables for evaluating the efficient influence function at
    one treatment level: the outcome regression over the optimal adjustment
    set and the treatment probability over its minimal d-separating subset,
    plus the assembled per-configuration values."""

    graph: Dag
    tax: Taxonomy
    level: int
    b_table: dict[tuple[int, ...], float]
    rho_table: dict[tuple[int, ...], float]
    values: np.ndarray = field(repr=False)
    joint: np.ndarray = field(repr=False)

    @classmethod
    def build(
        cls,
        bn: DiscreteBn,
        a: int,
        graph: Dag | None = None,
    ) -> "EifContext":
        graph = graph or bn.graph
        marg = _marginal_for_graph(bn, graph)
        return _build_context(graph, {v: bn.cards[v] for v in graph.vertices}, marg, a)

    def evaluate(self, v: Sequence[int]) -> float:
        if len(v) != len(self.graph.vertices):
            raise GraphError("state tuple length does not match the vertex count")
        return float(self.values[tuple(int(s) for s in v)])


def _build_context(
    graph: Dag, cards: Mapping[str, int], joint: np.ndarray, a: int
) -> EifContext:
    labels = graph.vertices
    pos = _positions(labels)
    tax = classify(graph)
    treat, outcome = graph.treatment, graph.outcome
    if not 0 <= a < cards[treat]:
        raise GraphError(f"treatment level {a} out of range")
    y_vals = _value_axis(labels, cards, outcome)

    o_order = tuple(v for v in labels if v in tax.o)
    omin_order = tuple(v for v in labels if v in tax.o_min)

    # b(O) = E[Y | A=a, O]
    e_y_ao = _expect_given(joint, labels, y_vals, set(o_order) | {treat})
    b_arr = _take_compat(e_y_ao, pos[treat], a)

    # rho(O_min) = P(A=a | O_min)
    shape = [1] * len(labels)
    shape[pos[treat]] = cards[treat]
    ind_a = np.zeros(shape)
    idx = [0] * len(labels)
    idx[pos[treat]] = a
    ind_a[tuple(idx)] = 1.0
    rho_arr = _expect_given(joint, labels, ind_a, omin_order)
    p_omin = joint.sum(
        axis=tuple(i for i, v in enumerate(labels) if v not in omin_order),
        keepdims=True,
    )
    if np.any((p_omin > 0.0) & (rho_arr <= 0.0)):
        raise PositivityError(
            f"P({treat}={a} | O_min) = 0 on a positive-probability event"
        )
    rho_safe = np.where(rho_arr > 0.0, rho_arr, 1.0)
    t_arr = ind_a * y_vals / rho_safe

    eif = np.zeros([1] * len(labels))
    for wj in (v for v in labels if v in tax.w):
        pa = graph.parents(wj)
        eif = eif + _expect_given(joint, labels, b_arr, pa | {wj})
        eif = eif - _expect_given(joint, labels, b_arr, pa)
    for mk in (v for v in labels if v in tax.m):
        pa = graph.parents(mk)
        eif = eif + _expect_given(joint, labels, t_arr, pa | {mk})
        eif = eif - _expect_given(joint, labels, t_arr, pa)
    eif = np.broadcast_to(eif, joint.shape).copy()

    b_table = {
        idx: float(b_arr[tuple(_place(labels, o_order, idx, pos))])
        for idx in np.ndindex(*(cards[v] for v in o_order))
    }
    rho_table = {
        idx: float(rho_arr[tuple(_place(labels, omin_order, idx, pos))])
        for idx in np.ndindex(*(cards[v] for v in omin_order))
    }
    return EifContext(
        graph=graph,
        tax=tax,
        level=a,
        b_table=b_table,
        rho_table=rho_table,
        values=eif,
        joint=joint,
    )


def _place(
    labels: Sequence[str],
    order: Sequence[str],
    idx: tuple[int, ...],
    pos: Mapping[str, int],
) -> list[int]:
    out = [0] * len(labels)
    for v, s in zip(order, idx):
        out[pos[v]] = s
    return out


def eif_exact(
    bn: DiscreteBn, a: int, v: Sequence[int], context: EifContext | None = None
) -> float:
    """Efficient influence function at one configuration.

    Values are meaningful at support points of the law; off-support behavior
    is unspecified.  Pass a prebuilt ``context`` to amortize the tables.
    """
    ctx = context or EifContext.build(bn, a)
    return ctx.evaluate(v)


def eif_variance(bn: DiscreteBn, a: int) -> float:
    """Semiparametric variance bound: variance of the influence function."""
    ctx = EifContext.build(bn, a)
    return float((ctx.joint * ctx.values**2).sum())


def eif_variance_for_graph(bn: DiscreteBn, graph: Dag, a: int) -> float:
    """Variance bound computed under ``graph`` for the (marginal) law of the
    network restricted to ``graph.vertices``."""
    ctx = EifContext.build(bn, a, graph=graph)
    return float((ctx.joint * ctx.values**2).sum())


def adjustment_if_variance(bn: DiscreteBn, L: Iterable[str], a: int) -> float:
    """Asymptotic variance of the plugin adjustment estimator: the variance
    of its nonparametric influence function."""
    g = bn.graph
    labels = g.vertices
    Ls = set()
    for v in L:
        g._check(v)
        Ls.add(v)
    joint = joint_table(bn)
    pos = _positions(labels)
    y_vals = _value_axis(labels, bn.cards, g.outcome)
    shape = [1] * len(labels)
    shape[pos[g.treatment]] = bn.cards[g.treatment]
    ind_a = np.zeros(shape)
    idx = [0] * len(labels)
    idx[pos[g.treatment]] = a
    ind_a[tuple(idx)] = 1.0

    b_l = _take_compat(
        _expect_given(joint, labels, y_vals, Ls | {g.treatment}), pos[g.treatment], a
    )
    e_l = _expect_given(joint, labels, ind_a, Ls)
    if np.any(
        (joint.sum(
            axis=tuple(i for i, v in enumerate(labels) if v not in Ls), keepdims=True
        ) > 0.0)
        & (e_l <= 0.0)
    ):
        raise ZeroConditioningEvent(
            f"P({g.treatment}={a} | L) = 0 on a positive-probability event"
        )
    e_safe = np.where(e_l > 0.0, e_l, 1.0)
    psi = adjustment_exact(bn, Ls, a)
    phi = ind_a / e_safe * (y_vals - b_l) + b_l - psi
    return float((joint * phi**2).sum())


# -- plugin estimators -------------------------------------------------------

def _empirical_cpts(
    ds: Dataset, g: Dag, laplace: float | None
) -> tuple[dict[str, np.ndarray], dict[str, np.ndarray], dict[str, int]]:
    cards = {}
    for v in g.vertices:
        if v not in ds.columns:
            raise GraphError(f"dataset has no column {v!r}")
        cards[v] = ds.card(v)
    cpts: dict[str, np.ndarray] = {}
    defined: dict[str, np.ndarray] = {}
    for v in g.vertices:
        parents = g.parent_list(v)
        shape = tuple(cards[p] for p in parents) + (cards[v],)
        cols = [ds.column(p) for p in parents] + [ds.column(v)]
        flat = np.ravel_multi_index(cols, shape)
        counts = np.bincount(flat, minlength=int(np.prod(shape))).reshape(shape)
        counts = counts.astype(float)
        if laplace is not None:
            counts = counts + laplace
        denom = counts.sum(axis=-1, keepdims=True)
        ok = denom > 0.0
        # undefined rows carry a neutral placeholder of 1.0 so that, during
        # the truncated-factorization sum, only the *defined* factors decide
        # whether a configuration carries weight (and hence needs the cell)
        cpts[v] = np.where(ok, counts / np.where(ok, denom, 1.0), 1.0)
        defined[v] = ok[..., 0]
    return cpts, defined, cards


def plugin_g(
    dataset: Dataset, g: Dag, a: int, laplace: float | None = None
) -> EstimateReport:
    """Maximum-likelihood plugin of the g-formula under ``g``.

    Builds empirical conditionals per the graph's factorization and runs the
    truncated-factorization sum.  Any conditioning cell that carries positive
    weight but was never observed raises :class:`EmptyCellError`; pass
    ``laplace`` to smooth instead (explicit opt-in).
    """
    cpts, defined, cards = _empirical_cpts(dataset, g, laplace)
    treat = g.treatment
    labels = [v for v in g.vertices if v != treat]
    check_enumerable(cards[v] for v in labels)
    if not 0 <= a < cards[treat]:
        raise GraphError(f"treatment level {a} out of range")
    total = np.ones([cards[v] for v in labels])
    undef_masks: list[tuple[str, np.ndarray]] = []
    for v in labels:
        parent_axes = list(g.parent_list(v))
        table = cpts[v]
        mask = ~defined[v]
        if treat in parent_axes:
            axis = parent_axes.index(treat)
            table = np.take(table, a, axis=axis)
            mask = np.take(mask, a, axis=axis)
            parent_axes.remove(treat)
        total = total * _broadcast_factor(labels, cards, parent_axes + [v], table)
        if mask.any():
            undef_masks.append(
                (v, _broadcast_factor(labels, cards, parent_axes, mask.astype(bool)))
            )
    cells: list[tuple[str, tuple[int, ...]]] = []
    for v, mask in undef_masks:
        hit = (total > 0.0) & mask
        if hit.any():
            parents = set(g.parent_list(v)) - {treat}
            drop = tuple(i for i, name in enumerate(labels) if name not in parents)
            flat = hit.any(axis=drop) if drop else hit
            for state in np.argwhere(np.atleast_1d(flat))[:5]:
                cells.append((v, tuple(int(s) for s in state)))
    if cells:
        detail = ", ".join(f"{v}|parents={st}" for v, st in cells)
        raise EmptyCellError(
            f"empirical conditionals undefined at needed cells: {detail}", cells
        )
    y_vals = _value_axis(labels, cards, g.outcome)
    value = float((total * y_vals).sum())
    return EstimateReport(estimator="g_formula", value=value, n=dataset.n)


def plugin_adjustment(
    dataset: Dataset, g: Dag, L: Iterable[str], a: int
) -> EstimateReport:
    """Empirical adjustment estimator: sum over l of mean(Y | A=a, L=l) P_n(l)."""
    Ls = [v for v in g.vertices if v in set(L)]
    for v in set(L):
        g._check(v)
    a_col = dataset.column(g.treatment)
    y_col = dataset.column(g.outcome)
    n = dataset.n
    if not Ls:
        mask = a_col == a
        if not mask.any():
            raise EmptyCellError(
                f"no observations with {g.treatment}={a}", [(g.treatment, (a,))]
            )
        return EstimateReport("adjustment", float(y_col[mask].mean()), n)
    shape = tuple(dataset.card(v) for v in Ls)
    flat = np.ravel_multi_index([dataset.column(v) for v in Ls], shape)
    size = int(np.prod(shape))
    n_l = np.bincount(flat, minlength=size).astype(float)
    at_a = (a_col == a).astype(float)
    n_al = np.bincount(flat, weights=at_a, minlength=size)
    y_al = np.bincount(flat, weights=at_a * y_col, minlength=size)
    needed = n_l > 0
    missing = needed & (n_al == 0)
    if missing.any():
        states = [
            (",".join(Ls), tuple(int(s) for s in np.unravel_index(i, shape)))
            for i in np.nonzero(missing)[0][:5]
        ]
        raise EmptyCellError(
            f"no observations with {g.treatment}={a} at L states "
            f"{[st for _, st in states]}",
            states,
        )
    safe = np.where(needed & (n_al > 0), n_al, 1.0)
    value = float(np.where(needed, y_al / safe * (n_l / n), 0.0).sum())
    return EstimateReport("adjustment", value, n)
