"""Ground-truth solver: exhaustive k-subset optimization and decision.

Deliberately unclever; every other solver in the package is validated
against this one.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .graph import Graph
from .objective import MIN, ProblemSpec, Solution, make_solution

DEFAULT_BUDGET = 10_000_000


class BudgetExceededError(RuntimeError):
    """Raised when the requested enumeration is larger than the caller's budget."""


@dataclass(frozen=True)
class Decision:
    """Outcome of a threshold query: answer, optional witness, deciding stage."""

    answer: bool
    witness: Solution | None
    stage: str


def _check_args(g: Graph, k: int, budget: int) -> None:
    if not 0 <= k <= g.n:
        raise ValueError(f"k={k} out of range for n={g.n}")
    count = math.comb(g.n, k)
    if count > budget:
        raise BudgetExceededError(
            f"C({g.n},{k}) = {count} subsets exceeds budget {budget}"
        )


def _best_over_first(spec: ProblemSpec, g: Graph, k: int, first: int) -> tuple[int, int]:
    """Best (value, mask) over k-subsets whose smallest member is `first`."""
    a1 = spec.a1_scaled
    a2 = spec.a2_scaled
    adj = g.adj_bits
    sign = 1 if spec.goal == MIN else -1
    base = 1 << first
    best_val = None
    best_mask = 0
    for rest in combinations(range(first + 1, g.n), k - 1):
        mask = base
        for v in rest:
            mask |= 1 << v
        inner2 = 0
        degsum = 0
        m = mask
        while m:
            low = m & -m
            row = adj[low.bit_length() - 1]
            inner2 += (row & mask).bit_count()
            degsum += row.bit_count()
            m ^= low
        val = sign * ((a1 * inner2) // 2 + a2 * (degsum - inner2))
        if best_val is None or val < best_val:
            best_val = val
            best_mask = mask
    return best_val if best_val is None else sign * best_val, best_mask


def brute_force_opt(
    spec: ProblemSpec,
    g: Graph,
    k: int,
    *,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> Solution:
    """Exact optimum by enumerating every k-subset.

    Among optima returns the lexicographically smallest vertex set, so
    solver-equivalence tests only need to compare values.
    """
    _check_args(g, k, budget)
    if k == 0:
        return make_solution(spec, g, 0, "oracle")
    sign = 1 if spec.goal == MIN else -1
    firsts = range(g.n - k + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda f: _best_over_first(spec, g, k, f), firsts))
    else:
        partials = [_best_over_first(spec, g, k, f) for f in firsts]
    best_val = None
    best_mask = 0
    # first-member blocks are in lexicographic order, so keep-first on ties
    # preserves the lexicographically smallest optimum.
    for val, mask in partials:
        if val is None:
            continue
        if best_val is None or sign * val < sign * best_val:
            best_val = val
            best_mask = mask
    assert best_val is not None
    return Solution(
        frozenset(i for i in range(g.n) if best_mask >> i & 1),
        spec.value_of(best_val),
        "oracle",
    )


def decide(
    spec: ProblemSpec,
    g: Graph,
    k: int,
    p: Fraction,
    *,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> Decision:
    """Does a size-k set of value at least p (max) / at most p (min) exist?"""
    opt = brute_force_opt(spec, g, k, budget=budget, workers=workers)
    reached = opt.value.as_fraction()
    ok = reached <= p if spec.goal == MIN else reached >= p
    return Decision(ok, opt if ok else None, "oracle")
