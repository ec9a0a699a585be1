"""Branching solvers driven by greedy choices.

Two exhaustive search trees: one branches on the closed neighborhood of a
greedily chosen vertex (exact for degrading objectives, tree size about
(max_degree+1)^k), the other on members of greedily chosen connected sets
of each size (any objective, tree size about (k(k+1)/2)^k).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

from .graph import Graph, connected_submasks, iter_bits, lex_smaller_mask, mask_of
from .objective import MIN, ProblemSpec, Solution, make_solution, value_scaled


@dataclass
class BranchStats:
    """Search-tree instrumentation: visits, depth reached, completed leaves."""

    nodes_visited: int = 0
    max_depth: int = 0
    leaves: int = 0

    def absorb(self, other: "BranchStats") -> None:
        self.nodes_visited += other.nodes_visited
        self.max_depth = max(self.max_depth, other.max_depth)
        self.leaves += other.leaves


class _Best:
    """Running optimum under (goal value, then lexicographic vertex set)."""

    __slots__ = ("sign", "val", "mask")

    def __init__(self, sign: int):
        self.sign = sign
        self.val: int | None = None
        self.mask = 0

    def offer(self, val: int, mask: int) -> None:
        if self.val is None or self.sign * val < self.sign * self.val:
            self.val = val
            self.mask = mask
        elif val == self.val and lex_smaller_mask(mask, self.mask):
            self.mask = mask

    def absorb(self, other: "_Best") -> None:
        if other.val is not None:
            self.offer(other.val, other.mask)


def _sign(spec: ProblemSpec) -> int:
    return 1 if spec.goal == MIN else -1


def _set_stats(spec: ProblemSpec, g: Graph, mask: int) -> tuple[int, int]:
    """(sum of inner adjacency popcounts, degree sum) for the set."""
    adj = g.adj_bits
    inner2 = 0
    degsum = 0
    for v in iter_bits(mask):
        row = adj[v]
        inner2 += (row & mask).bit_count()
        degsum += row.bit_count()
    return inner2, degsum


def _best_extensions(
    spec: ProblemSpec, g: Graph, tmask: int, imax: int, free: int
) -> list[int | None]:
    """Per size 1..imax, the best connected set in G[free] extending tmask.

    Entry i is the bitmask of the set S minimizing/maximizing the value of
    tmask | S among connected sets of G[free] with |S| = i, ties to the
    lexicographically smallest; None when no connected set of that size
    exists.  Index 0 is unused.
    """
    a1 = spec.a1_scaled
    a2 = spec.a2_scaled
    sign = _sign(spec)
    adj = g.adj_bits
    t_inner2, t_degsum = _set_stats(spec, g, tmask)
    best_vals: list[int | None] = [None] * (imax + 1)
    best_masks = [0] * (imax + 1)
    for root in iter_bits(free):
        allowed = free & ~((1 << root) - 1)
        for smask in connected_submasks(g, root, imax, allowed):
            inner2 = t_inner2
            degsum = t_degsum
            grown = tmask
            size = 0
            m = smask
            while m:
                low = m & -m
                row = adj[low.bit_length() - 1]
                inner2 += 2 * (row & grown).bit_count()
                degsum += row.bit_count()
                grown |= low
                size += 1
                m ^= low
            val = sign * ((a1 * inner2) // 2 + a2 * (degsum - inner2))
            cur = best_vals[size]
            if cur is None or val < cur:
                best_vals[size] = val
                best_masks[size] = smask
            elif val == cur and lex_smaller_mask(smask, best_masks[size]):
                best_masks[size] = smask
    return [None if best_vals[i] is None else best_masks[i] for i in range(imax + 1)]


def best_connected_extension(
    spec: ProblemSpec, g: Graph, taken: Iterable[int], i: int
) -> frozenset[int] | None:
    """Best size-i set connected in the untaken part, judged by the value of
    the union with the taken set; None when no such set exists."""
    if i < 1:
        raise ValueError("extension size must be at least 1")
    tmask = mask_of(taken)
    if tmask >> g.n:
        raise ValueError("taken set contains ids >= n")
    free = g.full_mask & ~tmask
    mask = _best_extensions(spec, g, tmask, i, free)[i]
    if mask is None:
        return None
    return frozenset(iter_bits(mask))


# ---------------------------------------------------------------------------
# neighborhood branching (degrading objectives)


def _greedy_vertex(spec: ProblemSpec, g: Graph, tmask: int, free: int) -> int:
    half_a1 = spec.a1_scaled // 2
    a2 = spec.a2_scaled
    sign = _sign(spec)
    adj = g.adj_bits
    pick = -1
    best_key = None
    for v in iter_bits(free):
        row = adj[v]
        inside = (row & tmask).bit_count()
        key = sign * (half_a1 * inside + a2 * (row.bit_count() - inside))
        if best_key is None or key < best_key:
            best_key = key
            pick = v
    return pick


def _neighborhood_children(spec: ProblemSpec, g: Graph, tmask: int, free: int) -> list[int]:
    pick = _greedy_vertex(spec, g, tmask, free)
    return list(iter_bits((g.adj_bits[pick] | 1 << pick) & free))


def _run_neighborhood(
    spec: ProblemSpec,
    g: Graph,
    k: int,
    tmask: int,
    depth: int,
    stats: BranchStats,
    best: _Best,
) -> None:
    stack = [(tmask, depth)]
    while stack:
        tmask, depth = stack.pop()
        stats.nodes_visited += 1
        if depth > stats.max_depth:
            stats.max_depth = depth
        if depth == k:
            stats.leaves += 1
            best.offer(value_scaled(spec, g, tmask), tmask)
            continue
        free = g.full_mask & ~tmask
        if free.bit_count() < k - depth:
            continue
        for w in reversed(_neighborhood_children(spec, g, tmask, free)):
            stack.append((tmask | 1 << w, depth + 1))


def neighborhood_branching(
    spec: ProblemSpec, g: Graph, k: int, *, workers: int = 1
) -> tuple[Solution, BranchStats]:
    """Exact optimum for a degrading objective by branching on the closed
    neighborhood of the vertex with the best marginal contribution."""
    if not spec.is_degrading():
        raise ValueError(
            "objective is not degrading; use connected_set_branching instead"
        )
    if not 0 <= k <= g.n:
        raise ValueError(f"k={k} out of range for n={g.n}")
    stats = BranchStats()
    best = _Best(_sign(spec))
    if workers > 1 and k > 0:
        stats.nodes_visited = 1
        children = _neighborhood_children(spec, g, 0, g.full_mask)

        def task(w: int) -> tuple[BranchStats, _Best]:
            sub_stats = BranchStats()
            sub_best = _Best(_sign(spec))
            _run_neighborhood(spec, g, k, 1 << w, 1, sub_stats, sub_best)
            return sub_stats, sub_best

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for sub_stats, sub_best in pool.map(task, children):
                stats.absorb(sub_stats)
                best.absorb(sub_best)
    else:
        _run_neighborhood(spec, g, k, 0, 0, stats, best)
    assert best.val is not None
    return make_solution(spec, g, best.mask, "neighborhood-branching"), stats


# ---------------------------------------------------------------------------
# connected-set branching (any objective)


def _connected_children(spec: ProblemSpec, g: Graph, tmask: int, free: int, rem: int) -> list[int]:
    children: list[int] = []
    seen = 0
    for smask in _best_extensions(spec, g, tmask, rem, free):
        if smask is None:
            continue
        fresh = smask & ~seen
        seen |= smask
        children.extend(iter_bits(fresh))
    return children


def _run_connected(
    spec: ProblemSpec,
    g: Graph,
    k: int,
    allowed: int,
    tmask: int,
    depth: int,
    stats: BranchStats,
    best: _Best,
) -> None:
    stack = [(tmask, depth)]
    while stack:
        tmask, depth = stack.pop()
        stats.nodes_visited += 1
        if depth > stats.max_depth:
            stats.max_depth = depth
        if depth == k:
            stats.leaves += 1
            best.offer(value_scaled(spec, g, tmask), tmask)
            continue
        free = allowed & ~tmask
        if free.bit_count() < k - depth:
            continue
        for w in reversed(_connected_children(spec, g, tmask, free, k - depth)):
            stack.append((tmask | 1 << w, depth + 1))


def _search_connected(
    spec: ProblemSpec, g: Graph, k: int, allowed: int, workers: int
) -> tuple[_Best, BranchStats]:
    stats = BranchStats()
    best = _Best(_sign(spec))
    if workers > 1 and k > 0 and allowed.bit_count() >= k:
        stats.nodes_visited = 1
        children = _connected_children(spec, g, 0, allowed, k)

        def task(w: int) -> tuple[BranchStats, _Best]:
            sub_stats = BranchStats()
            sub_best = _Best(_sign(spec))
            _run_connected(spec, g, k, allowed, 1 << w, 1, sub_stats, sub_best)
            return sub_stats, sub_best

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for sub_stats, sub_best in pool.map(task, children):
                stats.absorb(sub_stats)
                best.absorb(sub_best)
    else:
        _run_connected(spec, g, k, allowed, 0, 0, stats, best)
    return best, stats


def connected_set_branching(
    spec: ProblemSpec, g: Graph, k: int, *, workers: int = 1
) -> tuple[Solution, BranchStats]:
    """Exact optimum for any objective by branching on the members of the
    best connected extension of each size."""
    if not 0 <= k <= g.n:
        raise ValueError(f"k={k} out of range for n={g.n}")
    best, stats = _search_connected(spec, g, k, g.full_mask, workers)
    assert best.val is not None
    return make_solution(spec, g, best.mask, "connected-branching"), stats


def constrained_connected_branching(
    spec: ProblemSpec, g: Graph, k: int, allowed: Iterable[int], *, workers: int = 1
) -> tuple[Solution | None, BranchStats]:
    """Connected-set branching restricted to candidate vertices.

    Connectivity of candidate sets is judged inside the allowed, untaken
    part, while values are always evaluated in the whole graph.  Returns
    None when fewer than k candidates exist.
    """
    if not 0 <= k <= g.n:
        raise ValueError(f"k={k} out of range for n={g.n}")
    allowed_mask = mask_of(allowed)
    if allowed_mask >> g.n:
        raise ValueError("allowed set contains ids >= n")
    if allowed_mask.bit_count() < k:
        return None, BranchStats()
    best, stats = _search_connected(spec, g, k, allowed_mask, workers)
    assert best.val is not None
    return make_solution(spec, g, best.mask, "connected-branching"), stats
