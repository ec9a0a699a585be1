"""Objective calculus for local partitioning: exact values and vertex contributions.

A problem is (goal, alpha1, alpha2); a size-k vertex set S scores
alpha1*|E(S)| + alpha2*|E(S, V-S)|.  All arithmetic is carried out on
integers scaled by twice the lcm of the alpha denominators, so solver
comparisons never touch floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .graph import Graph, edges_crossing_mask, edges_within_mask, iter_bits, mask_of

Rational = Union[int, str, Fraction]

MIN = "min"
MAX = "max"


@dataclass(frozen=True)
class ProblemSpec:
    """A local partitioning objective: goal plus the two edge coefficients."""

    goal: str
    alpha1: Fraction
    alpha2: Fraction

    def __post_init__(self):
        if self.goal not in (MIN, MAX):
            raise ValueError(f"goal must be {MIN!r} or {MAX!r}, got {self.goal!r}")
        object.__setattr__(self, "alpha1", Fraction(self.alpha1))
        object.__setattr__(self, "alpha2", Fraction(self.alpha2))
        # scale is even, so half of the inner-edge coefficient stays integral.
        scale = 2 * math.lcm(self.alpha1.denominator, self.alpha2.denominator)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "a1_scaled", int(self.alpha1 * scale))
        object.__setattr__(self, "a2_scaled", int(self.alpha2 * scale))

    def is_degrading(self) -> bool:
        """Whether a vertex's contribution can only worsen as the solution grows."""
        if self.goal == MAX:
            return self.alpha2 >= self.alpha1 / 2
        return self.alpha2 <= self.alpha1 / 2

    def value_of(self, numerator: int) -> "Value":
        return Value(numerator, self.scale)

    def describe(self) -> str:
        return f"goal={self.goal},a1={self.alpha1},a2={self.alpha2}"


@dataclass(frozen=True)
class Value:
    """Exact objective value as numerator over the spec's common scale."""

    numerator: int
    scale: int

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.scale)

    def _check(self, other: "Value") -> None:
        if self.scale != other.scale:
            raise ValueError("values from different scales are not comparable")

    def __lt__(self, other: "Value") -> bool:
        self._check(other)
        return self.numerator < other.numerator

    def __le__(self, other: "Value") -> bool:
        self._check(other)
        return self.numerator <= other.numerator

    def __gt__(self, other: "Value") -> bool:
        self._check(other)
        return self.numerator > other.numerator

    def __ge__(self, other: "Value") -> bool:
        self._check(other)
        return self.numerator >= other.numerator

    def __str__(self) -> str:
        return str(self.as_fraction())


@dataclass(frozen=True)
class Solution:
    """A size-k vertex set, its exact value, and the algorithm that found it."""

    vertices: frozenset[int]
    value: Value
    method: str

    def sorted_vertices(self) -> list[int]:
        return sorted(self.vertices)


PRESETS = {
    "densest": (MAX, 1, 0),
    "sparsest": (MIN, 1, 0),
    "max-cut": (MAX, 0, 1),
    "min-cut": (MIN, 0, 1),
    "coverage": (MAX, 1, 1),
}


def preset(name: str) -> ProblemSpec:
    try:
        goal, a1, a2 = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}") from None
    return ProblemSpec(goal, Fraction(a1), Fraction(a2))


def parse_spec(text: str) -> ProblemSpec:
    """Parse a preset name or an explicit "goal=max,a1=1,a2=1/2" string."""
    text = text.strip()
    if text in PRESETS:
        return preset(text)
    fields = {}
    for part in text.split(","):
        if "=" not in part:
            raise ValueError(f"malformed spec fragment {part!r}")
        key, _, raw = part.partition("=")
        fields[key.strip()] = raw.strip()
    unknown = set(fields) - {"goal", "a1", "a2"}
    if unknown:
        raise ValueError(f"unknown spec fields: {', '.join(sorted(unknown))}")
    if "goal" not in fields:
        raise ValueError("spec string needs goal=min or goal=max")
    try:
        a1 = Fraction(fields.get("a1", "0"))
        a2 = Fraction(fields.get("a2", "0"))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational in spec string: {exc}") from None
    return ProblemSpec(fields["goal"], a1, a2)


def value_scaled(spec: ProblemSpec, g: Graph, mask: int) -> int:
    """Scaled-integer objective of the vertex set given as a bitmask."""
    adj = g.adj_bits
    inner2 = 0
    degsum = 0
    for v in iter_bits(mask):
        row = adj[v]
        inner2 += (row & mask).bit_count()
        degsum += row.bit_count()
    # inner2 counts every inner edge twice; degsum = 2*m1 + m2.
    return (spec.a1_scaled * inner2) // 2 + spec.a2_scaled * (degsum - inner2)


def contribution_scaled(spec: ProblemSpec, g: Graph, v: int, taken_mask: int) -> int:
    if not taken_mask >> v & 1:
        raise ValueError(f"vertex {v} is not in the partial solution")
    row = g.adj_bits[v]
    inside = (row & taken_mask).bit_count()
    outside = row.bit_count() - inside
    return (spec.a1_scaled * inside) // 2 + spec.a2_scaled * outside


def evaluate(spec: ProblemSpec, g: Graph, vertices: Iterable[int]) -> Value:
    """Exact objective value of a vertex set."""
    mask = mask_of(vertices)
    if mask >> g.n:
        raise ValueError("vertex set contains ids >= n")
    return spec.value_of(value_scaled(spec, g, mask))


def contribution(spec: ProblemSpec, g: Graph, v: int, taken: Iterable[int]) -> Value:
    """Contribution of v within the partial solution: half the inner-edge
    coefficient per edge into the set, the crossing coefficient per edge out."""
    mask = mask_of(taken)
    if mask >> g.n:
        raise ValueError("vertex set contains ids >= n")
    return spec.value_of(contribution_scaled(spec, g, v, mask))


def better(goal: str, a, b) -> bool:
    """Strictly better under the goal: smaller for min, larger for max."""
    if goal == MIN:
        return a < b
    return a > b


def make_solution(spec: ProblemSpec, g: Graph, mask: int, method: str) -> Solution:
    return Solution(
        frozenset(iter_bits(mask)),
        spec.value_of(value_scaled(spec, g, mask)),
        method,
    )


def decomposition_check(spec: ProblemSpec, g: Graph, mask: int) -> bool:
    """Whole-set value equals the sum of member contributions (identity test)."""
    total = sum(contribution_scaled(spec, g, v, mask) for v in iter_bits(mask))
    return total == value_scaled(spec, g, mask)
