"""Tree decompositions and the width-parameterized dynamic program.

Covers validation of the three decomposition conditions, transformation to
nice form (leaf / introduce / forget / join), a min-degree elimination
heuristic, a PACE-style file format, and an exact solver filling one
2^|bag| x (k+1) table per nice node.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import Graph, iter_bits, mask_of
from .objective import MIN, ProblemSpec, Solution, make_solution, value_scaled


class DecompositionError(ValueError):
    """Raised when a decomposition is malformed or does not fit the graph."""


@dataclass
class TreeDecomposition:
    """Bags indexed by node plus tree edges over node indices."""

    bags: list[frozenset[int]]
    edges: list[tuple[int, int]]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.bags]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


@dataclass(frozen=True)
class Violation:
    """First failed decomposition condition plus a witness description."""

    condition: str
    detail: str


def validate_decomposition(g: Graph, td: TreeDecomposition) -> Violation | None:
    """Check tree shape, vertex coverage, edge coverage, and per-vertex
    subtree connectivity; None when all hold."""
    node_count = len(td.bags)
    if node_count == 0:
        return Violation("tree", "decomposition has no nodes")
    for a, b in td.edges:
        if not (0 <= a < node_count and 0 <= b < node_count):
            return Violation("tree", f"edge ({a},{b}) references a missing node")
    if len(td.edges) != node_count - 1:
        return Violation(
            "tree", f"{node_count} nodes need {node_count - 1} edges, got {len(td.edges)}"
        )
    adj = td.adjacency()
    seen = {0}
    queue = [0]
    while queue:
        cur = queue.pop()
        for nxt in adj[cur]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    if len(seen) < node_count:
        missing = min(set(range(node_count)) - seen)
        return Violation("tree", f"node {missing} is unreachable")
    for i, bag in enumerate(td.bags):
        for v in bag:
            if not 0 <= v < g.n:
                return Violation("tree", f"bag {i} contains out-of-range vertex {v}")
    covered = frozenset().union(*td.bags) if td.bags else frozenset()
    for v in range(g.n):
        if v not in covered:
            return Violation("vertex-coverage", f"vertex {v} appears in no bag")
    for u, v in g.edges:
        if not any(u in bag and v in bag for bag in td.bags):
            return Violation("edge-coverage", f"edge ({u},{v}) shares no bag")
    for v in range(g.n):
        holding = [i for i, bag in enumerate(td.bags) if v in bag]
        reached = {holding[0]}
        queue = [holding[0]]
        while queue:
            cur = queue.pop()
            for nxt in adj[cur]:
                if v in td.bags[nxt] and nxt not in reached:
                    reached.add(nxt)
                    queue.append(nxt)
        if len(reached) < len(holding):
            return Violation(
                "connectivity", f"bags containing vertex {v} do not form a subtree"
            )
    return None


# ---------------------------------------------------------------------------
# nice form

LEAF = "leaf"
INTRODUCE = "introduce"
FORGET = "forget"
JOIN = "join"


@dataclass(frozen=True)
class NiceNode:
    kind: str
    bag: frozenset[int]
    children: tuple[int, ...] = ()
    vertex: int | None = None


@dataclass
class NiceDecomposition:
    """Rooted decomposition whose nodes are typed leaf/introduce/forget/join.

    Nodes are stored with children before parents, so index order is a
    valid bottom-up processing order; the root carries an empty bag.
    """

    nodes: list[NiceNode] = field(default_factory=list)
    root: int = -1

    @property
    def width(self) -> int:
        return max((len(node.bag) for node in self.nodes), default=0) - 1

    def as_tree_decomposition(self) -> TreeDecomposition:
        edges = []
        for i, node in enumerate(self.nodes):
            for c in node.children:
                edges.append((c, i))
        return TreeDecomposition([node.bag for node in self.nodes], edges)

    def subtree_vertices(self) -> list[frozenset[int]]:
        """Per node, the union of bags in its subtree."""
        out: list[frozenset[int]] = []
        for node in self.nodes:
            acc = node.bag
            for c in node.children:
                acc |= out[c]
            out.append(acc)
        return out


def _splice_empty_bags(td: TreeDecomposition) -> TreeDecomposition:
    # No vertex subtree passes through an empty bag, so splicing one out and
    # reconnecting its neighbors preserves all three conditions.
    bags = list(td.bags)
    adj = {i: set(ns) for i, ns in enumerate(td.adjacency())}
    alive = set(range(len(bags)))
    for i in range(len(bags)):
        if bags[i] or len(alive) == 1:
            continue
        neighbors = sorted(adj[i])
        for x in neighbors:
            adj[x].discard(i)
        for first, second in zip(neighbors, neighbors[1:]):
            adj[first].add(second)
            adj[second].add(first)
        alive.discard(i)
        adj.pop(i)
    order = sorted(alive)
    renum = {old: new for new, old in enumerate(order)}
    edges = []
    for old in order:
        for nb in adj[old]:
            if old < nb:
                edges.append((renum[old], renum[nb]))
    return TreeDecomposition([bags[old] for old in order], edges)


def to_nice(td: TreeDecomposition, *, root: int = 0) -> NiceDecomposition:
    """Rewrite a valid decomposition into nice form with the same width."""
    td = _splice_empty_bags(td)
    if not any(td.bags):
        raise DecompositionError("decomposition covers no vertices")
    if not 0 <= root < len(td.bags):
        root = 0
    nice = NiceDecomposition()
    nodes = nice.nodes

    def add(kind: str, bag: frozenset[int], children: tuple[int, ...] = (), vertex: int | None = None) -> int:
        nodes.append(NiceNode(kind, bag, children, vertex))
        return len(nodes) - 1

    def build_chain(bag: frozenset[int]) -> int:
        ordered = sorted(bag)
        idx = add(LEAF, frozenset({ordered[0]}))
        acc = {ordered[0]}
        for v in ordered[1:]:
            acc.add(v)
            idx = add(INTRODUCE, frozenset(acc), (idx,), v)
        return idx

    def bridge(idx: int, from_bag: frozenset[int], to_bag: frozenset[int]) -> int:
        acc = set(from_bag)
        for v in sorted(from_bag - to_bag):
            acc.discard(v)
            idx = add(FORGET, frozenset(acc), (idx,), v)
        for v in sorted(to_bag - from_bag):
            acc.add(v)
            idx = add(INTRODUCE, frozenset(acc), (idx,), v)
        return idx

    adj = td.adjacency()
    parent = {root: -1}
    order = [root]
    queue = [root]
    while queue:
        cur = queue.pop()
        for nxt in adj[cur]:
            if nxt not in parent:
                parent[nxt] = cur
                order.append(nxt)
                queue.append(nxt)
    tops: dict[int, int] = {}
    for cur in reversed(order):
        bag = td.bags[cur]
        child_tops = [
            bridge(tops[nxt], td.bags[nxt], bag)
            for nxt in adj[cur]
            if parent.get(nxt) == cur
        ]
        if not child_tops:
            tops[cur] = build_chain(bag)
            continue
        acc = child_tops[0]
        for nxt in child_tops[1:]:
            acc = add(JOIN, bag, (acc, nxt))
        tops[cur] = acc
    top = bridge(tops[root], td.bags[root], frozenset())
    nice.root = top
    return nice


# ---------------------------------------------------------------------------
# heuristic construction

def elimination_decomposition(g: Graph, order: Sequence[int]) -> TreeDecomposition:
    """Decomposition from an elimination ordering: bag of v is v plus its
    neighbors in the fill-in graph at elimination time."""
    if sorted(order) != list(range(g.n)):
        raise ValueError("order must be a permutation of the vertices")
    if g.n == 0:
        return TreeDecomposition([frozenset()], [])
    work = {v: set(g.adj[v]) for v in range(g.n)}
    position = {v: i for i, v in enumerate(order)}
    bags = []
    edges = []
    roots = []
    for i, v in enumerate(order):
        neighbors = work.pop(v)
        bags.append(frozenset(neighbors | {v}))
        for a in neighbors:
            work[a].discard(v)
            for b in neighbors:
                if a != b:
                    work[a].add(b)
        if neighbors:
            attach = min(neighbors, key=position.__getitem__)
            edges.append((i, position[attach]))
        else:
            roots.append(i)
    for first, second in zip(roots, roots[1:]):
        edges.append((first, second))
    return TreeDecomposition(bags, edges)


def min_degree_order(g: Graph, *, tie_largest: bool = False) -> list[int]:
    """Elimination order picking a minimum-degree vertex of the fill-in graph."""
    work = {v: set(g.adj[v]) for v in range(g.n)}
    order = []
    while work:
        if tie_largest:
            v = max(work, key=lambda u: (-len(work[u]), u))
        else:
            v = min(work, key=lambda u: (len(work[u]), u))
        neighbors = work.pop(v)
        for a in neighbors:
            work[a].discard(v)
            for b in neighbors:
                if a != b:
                    work[a].add(b)
        order.append(v)
    return order


def heuristic_decomposition(g: Graph) -> TreeDecomposition:
    """Valid decomposition from the min-degree elimination ordering (width is
    an upper bound on the true treewidth)."""
    return elimination_decomposition(g, min_degree_order(g))


# ---------------------------------------------------------------------------
# file format: "s td <nodes> <width+1> <n>", "b <id> <v...>", tree edges;
# node ids 1-based, vertex ids 0-based.

def parse_decomposition(text: str) -> TreeDecomposition:
    header = None
    bags: dict[int, frozenset[int]] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("c"):
            continue
        fields = stripped.split()
        if fields[0] == "s":
            if header is not None:
                raise DecompositionError(f"line {lineno}: second header")
            if len(fields) != 5 or fields[1] != "td":
                raise DecompositionError(f"line {lineno}: malformed header {stripped!r}")
            header = (int(fields[2]), int(fields[3]), int(fields[4]))
        elif fields[0] == "b":
            if header is None:
                raise DecompositionError(f"line {lineno}: bag before header")
            node = int(fields[1])
            if not 1 <= node <= header[0]:
                raise DecompositionError(f"line {lineno}: bag id {node} out of range")
            if node in bags:
                raise DecompositionError(f"line {lineno}: duplicate bag {node}")
            bags[node] = frozenset(int(x) for x in fields[2:])
        else:
            if header is None:
                raise DecompositionError(f"line {lineno}: edge before header")
            if len(fields) != 2:
                raise DecompositionError(f"line {lineno}: malformed line {stripped!r}")
            a, b = int(fields[0]), int(fields[1])
            if not (1 <= a <= header[0] and 1 <= b <= header[0]):
                raise DecompositionError(f"line {lineno}: edge ({a},{b}) out of range")
            edges.append((a - 1, b - 1))
    if header is None:
        raise DecompositionError("missing 's td' header")
    bag_list = [bags.get(i + 1, frozenset()) for i in range(header[0])]
    return TreeDecomposition(bag_list, edges)


def load_decomposition(path: str) -> TreeDecomposition:
    with open(path, encoding="utf-8") as handle:
        return parse_decomposition(handle.read())


def format_decomposition(td: TreeDecomposition, n: int) -> str:
    lines = [f"s td {len(td.bags)} {td.width + 1} {n}"]
    for i, bag in enumerate(td.bags, start=1):
        lines.append("b " + " ".join([str(i)] + [str(v) for v in sorted(bag)]))
    for a, b in td.edges:
        lines.append(f"{a + 1} {b + 1}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# dynamic program

def _remove_bit(c: int, pos: int) -> int:
    return (c & ((1 << pos) - 1)) | ((c >> (pos + 1)) << pos)


def _insert_bit(c: int, pos: int, bit: int) -> int:
    return (c & ((1 << pos) - 1)) | (bit << pos) | ((c >> pos) << (pos + 1))


def _config_masks(bag_sorted: tuple[int, ...]) -> list[int]:
    masks = [0] * (1 << len(bag_sorted))
    for c in range(1, len(masks)):
        low = c & -c
        masks[c] = masks[c ^ low] | (1 << bag_sorted[low.bit_length() - 1])
    return masks


def _node_table(
    spec: ProblemSpec,
    g: Graph,
    nice: NiceDecomposition,
    k: int,
    idx: int,
    tables: list,
    choices: list,
) -> None:
    node = nice.nodes[idx]
    bag_sorted = tuple(sorted(node.bag))
    rows = 1 << len(bag_sorted)
    a1 = spec.a1_scaled
    a2 = spec.a2_scaled
    sign = 1 if spec.goal == MIN else -1
    adj = g.adj_bits
    masks = _config_masks(bag_sorted)
    bag_mask = masks[rows - 1]
    table = [[None] * (k + 1) for _ in range(rows)]
    choice = None

    if node.kind == LEAF:
        for c in range(rows):
            table[c][0] = 0
    elif node.kind == INTRODUCE:
        child = node.children[0]
        child_table = tables[child]
        v = node.vertex
        pos = bag_sorted.index(v)
        vbit = 1 << v
        row_v = adj[v]
        for c in range(rows):
            tm = masks[c]
            if c >> pos & 1:
                delta = a1 * (row_v & tm & ~vbit).bit_count() + a2 * (
                    row_v & bag_mask & ~tm
                ).bit_count()
            else:
                delta = a2 * (row_v & tm).bit_count()
            src = child_table[_remove_bit(c, pos)]
            dst = table[c]
            for kq in range(k + 1):
                if src[kq] is not None:
                    dst[kq] = src[kq] + delta
    elif node.kind == FORGET:
        child = node.children[0]
        child_table = tables[child]
        v = node.vertex
        child_bag_sorted = tuple(sorted(nice.nodes[child].bag))
        pos = child_bag_sorted.index(v)
        choice = [[None] * (k + 1) for _ in range(rows)]
        for c in range(rows):
            out_row = child_table[_insert_bit(c, pos, 0)]
            in_row = child_table[_insert_bit(c, pos, 1)]
            dst = table[c]
            pick = choice[c]
            for kq in range(k + 1):
                best = out_row[kq]
                best_choice = 0
                cand = in_row[kq - 1] if kq >= 1 else None
                if cand is not None and (best is None or sign * cand < sign * best):
                    best = cand
                    best_choice = 1
                if best is not None:
                    dst[kq] = best
                    pick[kq] = best_choice
    elif node.kind == JOIN:
        left, right = node.children
        left_table = tables[left]
        right_table = tables[right]
        choice = [[None] * (k + 1) for _ in range(rows)]
        for c in range(rows):
            tm = masks[c]
            rm = bag_mask & ~tm
            inner2 = 0
            cross = 0
            for v in iter_bits(tm):
                inner2 += (adj[v] & tm).bit_count()
                cross += (adj[v] & rm).bit_count()
            # bag-internal edges are counted in both children once each
            dup = (a1 * inner2) // 2 + a2 * cross
            lrow = left_table[c]
            rrow = right_table[c]
            dst = table[c]
            pick = choice[c]
            for kq in range(k + 1):
                best = None
                best_split = 0
                for kj in range(kq + 1):
                    lval = lrow[kj]
                    if lval is None:
                        continue
                    rval = rrow[kq - kj]
                    if rval is None:
                        continue
                    cand = lval + rval - dup
                    if best is None or sign * cand < sign * best:
                        best = cand
                        best_split = kj
                if best is not None:
                    dst[kq] = best
                    pick[kq] = best_split
    else:
        raise DecompositionError(f"unknown nice node kind {node.kind!r}")
    tables[idx] = table
    choices[idx] = choice


def _reconstruct(nice: NiceDecomposition, k: int, choices: list) -> int:
    taken = 0
    stack = [(nice.root, 0, k)]
    while stack:
        idx, c, kq = stack.pop()
        node = nice.nodes[idx]
        if node.kind == LEAF:
            continue
        bag_sorted = tuple(sorted(node.bag))
        if node.kind == INTRODUCE:
            pos = bag_sorted.index(node.vertex)
            stack.append((node.children[0], _remove_bit(c, pos), kq))
        elif node.kind == FORGET:
            child = node.children[0]
            child_bag_sorted = tuple(sorted(nice.nodes[child].bag))
            pos = child_bag_sorted.index(node.vertex)
            if choices[idx][c][kq]:
                taken |= 1 << node.vertex
                stack.append((child, _insert_bit(c, pos, 1), kq - 1))
            else:
                stack.append((child, _insert_bit(c, pos, 0), kq))
        else:
            kj = choices[idx][c][kq]
            stack.append((node.children[0], c, kj))
            stack.append((node.children[1], c, kq - kj))
    return taken


def _heights(nice: NiceDecomposition) -> list[list[int]]:
    height = [0] * len(nice.nodes)
    for i, node in enumerate(nice.nodes):
        if node.children:
            height[i] = 1 + max(height[c] for c in node.children)
    waves: dict[int, list[int]] = {}
    for i, h in enumerate(height):
        waves.setdefault(h, []).append(i)
    return [waves[h] for h in sorted(waves)]


def solve_via_decomposition(
    spec: ProblemSpec,
    g: Graph,
    nice: NiceDecomposition,
    k: int,
    *,
    workers: int = 1,
    validate: bool = True,
) -> Solution:
    """Exact optimum by bottom-up tables over a nice decomposition."""
    if not 0 <= k <= g.n:
        raise ValueError(f"k={k} out of range for n={g.n}")
    if validate:
        violation = validate_decomposition(g, nice.as_tree_decomposition())
        if violation is not None:
            raise DecompositionError(f"{violation.condition}: {violation.detail}")
    if nice.nodes[nice.root].bag:
        raise DecompositionError("root bag must be empty")
    for i, node in enumerate(nice.nodes):
        if any(c >= i for c in node.children):
            raise DecompositionError("nodes are not stored bottom-up")
    tables: list = [None] * len(nice.nodes)
    choices: list = [None] * len(nice.nodes)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for wave in _heights(nice):
                list(
                    pool.map(
                        lambda i: _node_table(spec, g, nice, k, i, tables, choices),
                        wave,
                    )
                )
    else:
        for i in range(len(nice.nodes)):
            _node_table(spec, g, nice, k, i, tables, choices)
    answer = tables[nice.root][0][k]
    if answer is None:
        raise DecompositionError("decomposition does not cover enough vertices")
    mask = _reconstruct(nice, k, choices)
    assert mask.bit_count() == k
    assert value_scaled(spec, g, mask) == answer
    return make_solution(spec, g, mask, "treewidth-dp")


def solve_treewidth(
    spec: ProblemSpec,
    g: Graph,
    k: int,
    *,
    decomposition: TreeDecomposition | None = None,
    workers: int = 1,
) -> Solution:
    """Decomposition-based solve; builds the min-degree heuristic
    decomposition when none is supplied."""
    if not 0 <= k <= g.n:
        raise ValueError(f"k={k} out of range for n={g.n}")
    td = decomposition if decomposition is not None else heuristic_decomposition(g)
    violation = validate_decomposition(g, td)
    if violation is not None:
        raise DecompositionError(f"{violation.condition}: {violation.detail}")
    if g.n == 0:
        return make_solution(spec, g, 0, "treewidth-dp")
    nice = to_nice(td)
    return solve_via_decomposition(spec, g, nice, k, workers=workers, validate=False)
