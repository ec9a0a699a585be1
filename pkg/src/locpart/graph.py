"""Simple undirected graphs with bitset adjacency and subgraph primitives."""

from __future__ import annotations

from typing import Iterable, Iterator


class GraphParseError(ValueError):
    """Raised when a graph document violates the input grammar."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class Graph:
    """Immutable simple undirected graph on vertices 0..n-1.

    Adjacency is kept both as sorted neighbor tuples and as one bitmask
    per vertex; set-valued edge counting runs on bitmask popcounts.
    """

    __slots__ = ("n", "m", "edges", "adj", "adj_bits", "full_mask")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        adj_sets: list[set[int]] = [set() for _ in range(n)]
        canonical: list[tuple[int, int]] = []
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            a, b = (u, v) if u < v else (v, u)
            if b in adj_sets[a]:
                raise ValueError(f"duplicate edge ({a},{b})")
            adj_sets[a].add(b)
            adj_sets[b].add(a)
            canonical.append((a, b))
        canonical.sort()
        self.n = n
        self.m = len(canonical)
        self.edges = tuple(canonical)
        self.adj = tuple(tuple(sorted(s)) for s in adj_sets)
        bits = []
        for s in adj_sets:
            b = 0
            for w in s:
                b |= 1 << w
            bits.append(b)
        self.adj_bits = tuple(bits)
        self.full_mask = (1 << n) - 1

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def min_degree(self) -> int:
        return min((len(a) for a in self.adj), default=0)

    def neighborhood(self, v: int, closed: bool = False) -> frozenset[int]:
        if closed:
            return frozenset(self.adj[v]) | {v}
        return frozenset(self.adj[v])

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def lex_smaller_mask(a: int, b: int) -> bool:
    """True if set a precedes set b in sorted-vertex lexicographic order.

    Assumes equal cardinality: the set owning the smallest element of the
    symmetric difference comes first.
    """
    d = a ^ b
    return bool(d) and bool((d & -d) & a)


def _check_members(g: Graph, mask: int) -> None:
    if mask >> g.n:
        raise ValueError("vertex set contains ids >= n")


def edges_within_mask(g: Graph, mask: int) -> int:
    _check_members(g, mask)
    adj = g.adj_bits
    total = 0
    for v in iter_bits(mask):
        total += (adj[v] & mask).bit_count()
    return total // 2


def edges_crossing_mask(g: Graph, mask: int) -> int:
    _check_members(g, mask)
    adj = g.adj_bits
    total = 0
    for v in iter_bits(mask):
        total += (adj[v] & ~mask).bit_count()
    return total


def edges_within(g: Graph, vertices: Iterable[int]) -> int:
    """Number of graph edges with both endpoints in the given set."""
    return edges_within_mask(g, mask_of(vertices))


def edges_crossing(g: Graph, vertices: Iterable[int]) -> int:
    """Number of graph edges with exactly one endpoint in the given set."""
    return edges_crossing_mask(g, mask_of(vertices))


def edges_between_masks(g: Graph, a: int, b: int) -> int:
    """Number of edges with one endpoint in a and the other in b (disjoint masks)."""
    adj = g.adj_bits
    return sum((adj[v] & b).bit_count() for v in iter_bits(a))


def connected_submasks(g: Graph, root: int, max_size: int, allowed: int) -> Iterator[int]:
    """Yield every connected vertex set containing root, as a bitmask.

    Emits each set S with root in S, S subset of allowed, |S| <= max_size and
    G[S] connected exactly once: members are processed in increasing label
    order and each processed vertex's undecided neighbors are committed
    in or out in one step, so no set has two derivations.
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    if not (0 <= root < g.n):
        raise ValueError(f"root {root} out of range")
    rbit = 1 << root
    if not allowed & rbit:
        return
    adj = g.adj_bits
    # frame: (component, unprocessed members, decided-out set, size)
    stack = [(rbit, rbit, 0, 1)]
    push = stack.append
    pop = stack.pop
    while stack:
        comp, pending, banned, size = pop()
        if not pending or size == max_size:
            yield comp
            continue
        low = pending & -pending
        rest = pending ^ low
        undecided = adj[low.bit_length() - 1] & allowed & ~(comp | banned)
        budget = max_size - size
        sub = undecided
        while True:
            take = sub.bit_count()
            if take <= budget:
                push((comp | sub, rest | sub, banned | (undecided ^ sub), size + take))
            if not sub:
                break
            sub = (sub - 1) & undecided
    return


def enumerate_connected(
    g: Graph, root: int, max_size: int, *, min_root_canonical: bool = False
) -> Iterator[frozenset[int]]:
    """Stream the connected induced-subgraph vertex sets containing root.

    With min_root_canonical, vertices labeled below root are excluded, so a
    set is produced only from its minimum-labeled member; the union over all
    roots is then duplicate-free.
    """
    allowed = g.full_mask
    if min_root_canonical:
        allowed &= ~((1 << root) - 1)
    for mask in connected_submasks(g, root, max_size, allowed):
        yield frozenset(iter_bits(mask))


def enumerate_connected_all(g: Graph, max_size: int) -> Iterator[frozenset[int]]:
    """All connected vertex sets of size <= max_size, each exactly once."""
    for root in range(g.n):
        yield from enumerate_connected(g, root, max_size, min_root_canonical=True)


def connected_components(g: Graph) -> list[frozenset[int]]:
    """Partition of the vertices into maximal connected sets, by smallest member."""
    seen = 0
    parts = []
    for v in range(g.n):
        if seen >> v & 1:
            continue
        comp = 1 << v
        frontier = comp
        while frontier:
            grown = comp
            for u in iter_bits(frontier):
                grown |= g.adj_bits[u]
            frontier = grown & ~comp
            comp = grown
        seen |= comp
        parts.append(frozenset(iter_bits(comp)))
    return parts


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
    """Subgraph induced by the set, plus the new-id -> old-id mapping."""
    old_ids = sorted(set(vertices))
    for v in old_ids:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range")
    index = {old: new for new, old in enumerate(old_ids)}
    keep = set(old_ids)
    edges = [
        (index[u], index[v]) for u, v in g.edges if u in keep and v in keep
    ]
    return Graph(len(old_ids), edges), old_ids


def parse_graph(text: str) -> Graph:
    """Parse an edge-list or DIMACS-like document into a Graph.

    Edge-list grammar: header "n m", then exactly m lines "u v" (0-based);
    '#' starts a comment line.  DIMACS-like: "p edge n m" header and
    "e u v" lines with 1-based vertex ids; 'c' starts a comment line.
    """
    lines = text.splitlines()
    for line in lines:
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or stripped.startswith("c"):
            continue
        if stripped.startswith("p"):
            return _parse_dimacs(lines)
        return _parse_edge_list(lines)
    raise GraphParseError("empty graph document")


def _parse_edge_list(lines: list[str]) -> Graph:
    header = None
    header_line = 0
    entries: list[tuple[int, tuple[int, int]]] = []
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) != 2:
            raise GraphParseError(f"expected two integers, got {stripped!r}", lineno)
        try:
            a, b = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphParseError(f"non-integer field in {stripped!r}", lineno) from None
        if header is None:
            header = (a, b)
            header_line = lineno
            if a < 0 or b < 0:
                raise GraphParseError("negative count in header", lineno)
            continue
        entries.append((lineno, (a, b)))
    if header is None:
        raise GraphParseError("missing 'n m' header")
    n, m = header
    if len(entries) != m:
        raise GraphParseError(
            f"header declares {m} edges but document has {len(entries)}", header_line
        )
    return _build_checked(n, entries)


def _parse_dimacs(lines: list[str]) -> Graph:
    header = None
    header_line = 0
    entries: list[tuple[int, tuple[int, int]]] = []
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("c"):
            continue
        fields = stripped.split()
        if fields[0] == "p":
            if header is not None:
                raise GraphParseError("second problem line", lineno)
            if len(fields) != 4 or fields[1] != "edge":
                raise GraphParseError(f"malformed problem line {stripped!r}", lineno)
            try:
                header = (int(fields[2]), int(fields[3]))
            except ValueError:
                raise GraphParseError(f"non-integer field in {stripped!r}", lineno) from None
            header_line = lineno
        elif fields[0] == "e":
            if header is None:
                raise GraphParseError("edge before problem line", lineno)
            if len(fields) != 3:
                raise GraphParseError(f"malformed edge line {stripped!r}", lineno)
            try:
                u, v = int(fields[1]) - 1, int(fields[2]) - 1
            except ValueError:
                raise GraphParseError(f"non-integer field in {stripped!r}", lineno) from None
            entries.append((lineno, (u, v)))
        else:
            raise GraphParseError(f"unknown line kind {fields[0]!r}", lineno)
    if header is None:
        raise GraphParseError("missing problem line")
    n, m = header
    if len(entries) != m:
        raise GraphParseError(
            f"problem line declares {m} edges but document has {len(entries)}", header_line
        )
    return _build_checked(n, entries)


def _build_checked(n: int, entries: list[tuple[int, tuple[int, int]]]) -> Graph:
    seen: set[tuple[int, int]] = set()
    edges = []
    for lineno, (u, v) in entries:
        if u == v:
            raise GraphParseError(f"self-loop at vertex {u}", lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"vertex id out of range in ({u},{v})", lineno)
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise GraphParseError(f"duplicate edge ({key[0]},{key[1]})", lineno)
        seen.add(key)
        edges.append(key)
    return Graph(n, edges)


def load_graph(path: str) -> Graph:
    with open(path, encoding="utf-8") as handle:
        return parse_graph(handle.read())
