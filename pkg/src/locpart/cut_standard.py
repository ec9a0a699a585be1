"""Standard-parameter algorithms for the two fixed-cardinality cut problems.

Max side: a swapping construction with a min{n-k, rk} guarantee feeding a
three-stage decision pipeline.  Min side: the degree-pruned branching
search (parameter p+k) and the boundary-enumeration search (time n^p),
backed by an exact component knapsack.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations

from .branching import constrained_connected_branching, neighborhood_branching
from .graph import Graph, edges_between_masks, iter_bits, mask_of
from .objective import make_solution, preset
from .oracle import Decision

MAX_CUT = preset("max-cut")
MIN_CUT = preset("min-cut")


def _cut_size(g: Graph, mask: int) -> int:
    return sum((g.adj_bits[v] & ~mask).bit_count() for v in iter_bits(mask))


def swap_construct(g: Graph, k: int, *, trace: list | None = None) -> Solution:
    """Size-k side of a cut of value at least min{n-k, r*k}, r the minimum
    degree: repeatedly swap an outside vertex with no inside neighbor
    against an inside vertex with few outside neighbors.

    Each swap strictly increases the cut, so at most m swaps happen; the
    cut sizes after each swap are appended to `trace` when given.
    """
    if not 0 <= k <= g.n:
        raise ValueError(f"k={k} out of range for n={g.n}")
    r = g.min_degree()
    inside = (1 << k) - 1
    adj = g.adj_bits
    while True:
        outside = g.full_mask & ~inside
        lonely = -1
        for v in iter_bits(outside):
            if not adj[v] & inside:
                lonely = v
                break
        if lonely == -1:
            break  # every outside vertex touches the inside: cut >= n-k
        swap_out = -1
        for u in iter_bits(inside):
            if (adj[u] & outside).bit_count() < r:
                swap_out = u
                break
        if swap_out == -1:
            break  # every inside vertex keeps r outside neighbors: cut >= r*k
        inside = (inside & ~(1 << swap_out)) | 1 << lonely
        if trace is not None:
            trace.append(_cut_size(g, inside))
    return make_solution(MAX_CUT, g, inside, "swap")


def decide_max_cut(
    g: Graph, k: int, p: Fraction, *, workers: int = 1
) -> Decision:
    """Is there a size-k set cutting at least p edges?

    Pipeline: the swap construction, then placing a maximum-degree vertex
    inside with all its neighbors outside (when they fit), then the exact
    neighborhood branching.
    """
    p = Fraction(p)
    sol = swap_construct(g, k)
    if sol.value.as_fraction() >= p:
        return Decision(True, sol, "swap")
    if g.n > 0 and k >= 1 and g.max_degree() <= g.n - k:
        # the hub's neighbors all fit outside, so the cut is at least max_degree
        hub = max(range(g.n), key=lambda v: (g.degree(v), -v))
        mask = 1 << hub
        for v in range(g.n):
            if mask.bit_count() == k:
                break
            if v != hub and not g.adj_bits[hub] >> v & 1:
                mask |= 1 << v
        sol = make_solution(MAX_CUT, g, mask, "hub-placement")
        if sol.value.as_fraction() >= p:
            return Decision(True, sol, "hub-placement")
    sol, _ = neighborhood_branching(MAX_CUT, g, k, workers=workers)
    if sol.value.as_fraction() >= p:
        return Decision(True, sol, "neighborhood-branching")
    return Decision(False, None, "neighborhood-branching")


def decide_min_cut_pk(
    g: Graph, k: int, p: Fraction, *, workers: int = 1
) -> Decision:
    """Is there a size-k set cutting at most p edges?  Vertices of degree at
    least k+p cannot sit inside such a set, so the connected-set branching
    runs over the low-degree candidates only (degrees there stay below k+p)
    while values are still counted in the whole graph."""
    p = Fraction(p)
    if not 0 <= k <= g.n:
        raise ValueError(f"k={k} out of range for n={g.n}")
    threshold = k + p
    candidates = [v for v in range(g.n) if g.degree(v) < threshold]
    sol, _ = constrained_connected_branching(MIN_CUT, g, k, candidates, workers=workers)
    if sol is not None and sol.value.as_fraction() <= p:
        return Decision(True, sol, "degree-pruned-branching")
    return Decision(False, None, "degree-pruned-branching")


def component_knapsack(
    items: list[tuple[int, int]], target: int
) -> list[int] | None:
    """Indices of items whose sizes sum to exactly target, maximizing the
    summed second coordinate; None when no subset hits the target."""
    if target < 0:
        return None
    best: list[int | None] = [None] * (target + 1)
    best[0] = 0
    took: list[list[bool]] = []
    for size, alpha in items:
        if size < 1:
            raise ValueError("item sizes must be positive")
        if alpha < 0:
            raise ValueError("item alphas must be nonnegative")
        row = [False] * (target + 1)
        for total in range(target, size - 1, -1):
            prev = best[total - size]
            if prev is None:
                continue
            cand = prev + alpha
            if best[total] is None or cand > best[total]:
                best[total] = cand
                row[total] = True
        took.append(row)
    if best[target] is None:
        return None
    chosen = []
    total = target
    for idx in range(len(items) - 1, -1, -1):
        if took[idx][total]:
            chosen.append(idx)
            total -= items[idx][0]
    chosen.reverse()
    assert total == 0
    return chosen


def _np_candidates(g: Graph, p: int) -> list[int]:
    masks = [0]
    for size in range(1, p + 1):
        for combo in combinations(range(g.n), size):
            masks.append(mask_of(combo))
    return masks


def _np_evaluate(g: Graph, k: int, boundary: int) -> tuple[int, int] | None:
    """Best completion of a boundary guess by whole components of the rest."""
    size = boundary.bit_count()
    need = k - size
    if need < 0:
        return None
    rest = [c for c in connected_components_masks(g, g.full_mask & ~boundary)]
    items = [(c.bit_count(), edges_between_masks(g, c, boundary)) for c in rest]
    chosen = component_knapsack(items, need)
    if chosen is None:
        return None
    mask = boundary
    for idx in chosen:
        mask |= rest[idx]
    return _cut_size(g, mask), mask


def connected_components_masks(g: Graph, within: int) -> list[int]:
    """Connected components of the subgraph induced by the mask, as masks."""
    seen = 0
    parts = []
    remaining = within
    while remaining:
        low = remaining & -remaining
        comp = low
        frontier = comp
        while frontier:
            grown = comp
            for u in iter_bits(frontier):
                grown |= g.adj_bits[u] & within
            frontier = grown & ~comp
            comp = grown
        seen |= comp
        remaining = within & ~seen
        parts.append(comp)
    return parts


def decide_min_cut_np(
    g: Graph, k: int, p: int, *, workers: int = 1
) -> Decision:
    """Is there a size-k set cutting at most p edges, for p <= k?  All the
    cut's inside endpoints form a boundary of at most p vertices; everything
    else inside is a union of whole components of the remainder, picked by
    an exact knapsack."""
    if not 0 <= k <= g.n:
        raise ValueError(f"k={k} out of range for n={g.n}")
    p = int(p)
    if p < 0:
        raise ValueError("p must be nonnegative")
    if p > k:
        raise ValueError("boundary enumeration needs p <= k; use decide_min_cut_pk")
    candidates = _np_candidates(g, p)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda b: _np_evaluate(g, k, b), candidates))
    else:
        results = [_np_evaluate(g, k, b) for b in candidates]
    for outcome in results:
        if outcome is None:
            continue
        cut, mask = outcome
        if cut <= p:
            sol = make_solution(MIN_CUT, g, mask, "boundary-enumeration")
            assert sol.value.as_fraction() <= p
            return Decision(True, sol, "boundary-enumeration")
    return Decision(False, None, "boundary-enumeration")
