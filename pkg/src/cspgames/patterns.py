"""Position patterns of relations, pattern-complete structures, covering
arrays, and the clique embeddings built from them.

A partition of the positions [r] = {0, ..., r-1} is canonically a tuple of
sorted blocks, sorted by first element.  The pattern of a relation is the
downward-closed set of partitions refining the equality pattern of some
tuple; it controls which cliques embed into powers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, islice, product
from math import ceil, comb, log, log2

import numpy as np

from .errors import CapExceededError, NotAHomomorphismError
from .powers import AlicePowerView, bob_power
from .structures import (
    Homomorphism,
    RelationalStructure,
    Signature,
    find_homomorphism,
    is_homomorphism,
)

Partition = tuple[tuple[int, ...], ...]


def canonical_partition(blocks) -> Partition:
    """Normalize and validate a partition of 0..r-1."""
    canon = tuple(sorted(tuple(sorted(int(v) for v in b)) for b in blocks))
    seen = [v for b in canon for v in b]
    if sorted(seen) != list(range(len(seen))) or len(seen) != len(set(seen)):
        raise ValueError(f"{blocks} is not a partition of an initial range")
    if any(not b for b in canon):
        raise ValueError("empty block")
    return canon


def tuple_partition(t) -> Partition:
    """Equality pattern of a tuple: positions grouped by value."""
    groups: dict = {}
    for i, v in enumerate(t):
        groups.setdefault(v, []).append(i)
    return tuple(sorted(tuple(b) for b in groups.values()))


def refines(p: Partition, q: Partition) -> bool:
    """True iff every block of p sits inside a block of q."""
    owner = {}
    for bi, b in enumerate(q):
        for v in b:
            owner[v] = bi
    return all(len({owner[v] for v in b}) == 1 for b in p)


def all_partitions(r: int) -> list[Partition]:
    """Every partition of 0..r-1, canonically ordered."""
    found = []

    def grow(i, blocks):
        if i == r:
            found.append(tuple(sorted(tuple(b) for b in blocks)))
            return
        for b in blocks:
            b.append(i)
            grow(i + 1, blocks)
            b.pop()
        blocks.append([i])
        grow(i + 1, blocks)
        blocks.pop()

    grow(0, [])
    return sorted(found)


@dataclass(frozen=True)
class SigmaPattern:
    """Per-symbol sets of position partitions (downward closed under refines)."""

    signature: Signature
    entries: tuple[tuple[str, tuple[Partition, ...]], ...]

    def for_symbol(self, name: str) -> tuple[Partition, ...]:
        for sym, parts in self.entries:
            if sym == name:
                return parts
        raise KeyError(name)

    def to_json_dict(self) -> dict:
        return {
            "signature": [{"name": n, "arity": a} for n, a in self.signature.symbols],
            "patterns": {
                sym: [[list(b) for b in p] for p in parts] for sym, parts in self.entries
            },
        }


def pattern_of(y: RelationalStructure) -> SigmaPattern:
    """All partitions lying below the equality pattern of some relation tuple."""
    entries = []
    for name, arity in y.signature.symbols:
        shapes = {tuple_partition(t) for t in y.relation(name)}
        parts = tuple(
            p for p in all_partitions(arity) if any(refines(p, s) for s in shapes)
        )
        entries.append((name, parts))
    return SigmaPattern(y.signature, tuple(entries))


@lru_cache(maxsize=256)
def complete_structure(n: int, pattern: SigmaPattern) -> RelationalStructure:
    """The pattern-complete structure on n vertices: a tuple is related iff its
    equality pattern refines some partition in the pattern."""
    if n < 1:
        raise ValueError("complete structure needs n >= 1")
    rels = {}
    for name, arity in pattern.signature.symbols:
        parts = pattern.for_symbol(name)
        rels[name] = [
            t
            for t in product(range(n), repeat=arity)
            if any(refines(tuple_partition(t), p) for p in parts)
        ]
    return RelationalStructure(pattern.signature, n, rels)


def chromatic_number(y: RelationalStructure) -> int:
    """Least n such that y maps into the pattern-complete structure on n
    vertices (bounded by the domain size, where the identity works)."""
    if y.domain_size < 1:
        raise ValueError("chromatic number of an empty-domain structure")
    pat = pattern_of(y)
    for n in range(1, y.domain_size + 1):
        if find_homomorphism(y, complete_structure(n, pat)) is not None:
            return n
    raise AssertionError("identity embedding should have succeeded")


def central_vertices(y: RelationalStructure) -> tuple[int, ...]:
    """Vertices v such that for every symbol, every partition in its pattern,
    and every block, some relation tuple is constantly v on that block."""
    pat = pattern_of(y)
    out = []
    for v in range(y.domain_size):
        ok = True
        for name, _ in y.signature.symbols:
            rel = y.relation(name)
            for p in pat.for_symbol(name):
                for block in p:
                    if not any(all(t[i] == v for i in block) for t in rel):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            out.append(v)
    return tuple(out)


# ---------------------------------------------------------------------------
# covering arrays


@dataclass(frozen=True)
class CoveringArray:
    """n x m array over an alphabet; every ``strength`` rows exhibit all tuples."""

    rows: int
    strength: int
    alphabet: tuple[int, ...]
    columns: tuple[tuple[int, ...], ...]

    @property
    def width(self) -> int:
        return len(self.columns)

    def entry(self, row: int, col: int) -> int:
        return self.columns[col][row]

    def to_csv(self) -> str:
        lines = []
        for i in range(self.rows):
            lines.append(",".join(str(c[i]) for c in self.columns))
        return "\n".join(lines) + "\n"


def verification_cost(n: int, strength: int, alphabet_size: int, width: int) -> int:
    """Number of (row subset, column) tuple extractions exhaustive checking does."""
    return comb(n, strength) * (width + alphabet_size**strength)


def verify_covering_array(arr: CoveringArray) -> bool:
    """Exhaustive check of the covering property."""
    q = len(arr.alphabet)
    want = q**arr.strength
    for rows in combinations(range(arr.rows), arr.strength):
        seen = {tuple(col[i] for i in rows) for col in arr.columns}
        if len(seen) < want:
            return False
        if not all(all(v in arr.alphabet for v in t) for t in seen):
            return False
    return True


def scheduled_columns(n: int, strength: int, alphabet_size: int, slack: float = 8.0) -> int:
    """Column count from the union bound: with this many uniform random
    columns every (row subset, tuple) requirement survives uncovered with
    probability below 1/slack in total.  Grows like strength * log n."""
    q = alphabet_size
    requirements = comb(n, strength) * q**strength
    return ceil(log(slack * requirements) / log(q**strength / (q**strength - 1)))


def covering_array(
    n: int,
    strength: int,
    alphabet,
    seed: int = 0,
    slack: float = 8.0,
    max_columns: int | None = None,
) -> CoveringArray:
    """Build a verified covering array by seeded random sampling plus repair.

    Samples the union-bound column count (smooth in n, so array widths track
    log n without the jitter of adaptive greedy schemes), then adds a directed
    repair column for each requirement the sample missed, rechecking coverage
    after every repair.  The result is exhaustively verified before return.
    """
    alphabet = tuple(alphabet)
    q = len(alphabet)
    if len(set(alphabet)) != q or q < 1:
        raise ValueError("alphabet must be nonempty and duplicate-free")
    if not 1 <= strength <= n:
        raise ValueError(f"strength must be in 1..{n}, got {strength}")
    subsets = list(combinations(range(n), strength))
    if q == 1:
        arr = CoveringArray(n, strength, alphabet, ((alphabet[0],) * n,))
        assert verify_covering_array(arr)
        return arr

    rng = np.random.default_rng(seed)
    planned = scheduled_columns(n, strength, q, slack)
    if max_columns is not None and planned > max_columns:
        raise CapExceededError(
            f"covering array (n={n}, strength={strength}, q={q}) plans {planned} "
            f"columns, cap is {max_columns}"
        )
    uncovered = {
        (si, t) for si in range(len(subsets)) for t in product(alphabet, repeat=strength)
    }
    columns: list[tuple[int, ...]] = []
    for _ in range(planned):
        col = tuple(alphabet[i] for i in rng.integers(0, q, size=n))
        columns.append(col)
        for si, s in enumerate(subsets):
            uncovered.discard((si, tuple(col[i] for i in s)))
    while uncovered:
        if max_columns is not None and len(columns) >= max_columns:
            raise CapExceededError(
                f"covering array (n={n}, strength={strength}, q={q}) exceeded "
                f"the {max_columns}-column budget"
            )
        si, t = min(uncovered)
        col = [alphabet[0]] * n
        for pos, v in zip(subsets[si], t):
            col[pos] = v
        col = tuple(col)
        columns.append(col)
        for si2, s in enumerate(subsets):
            uncovered.discard((si2, tuple(col[i] for i in s)))
    arr = CoveringArray(n, strength, alphabet, tuple(columns))
    if not verify_covering_array(arr):
        raise AssertionError("constructed array failed verification")
    return arr


# ---------------------------------------------------------------------------
# clique embeddings


def _derived_seed(seed: int, index: int) -> int:
    return seed + 7919 * (index + 1)


def clique_into_alice_power(y: RelationalStructure, n: int, seed: int = 0):
    """Embed the pattern-complete structure on n vertices into an Alice power.

    One covering array per (symbol, pattern partition) pair, columns taken
    over the entries of the least witness tuple for that partition; array
    strength is the arity clamped to n.  Rows concatenate into k-tuples, and
    the resulting map is checked against a power membership view before
    being returned.  Returns (k, hom) with the view as the hom's target.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    pat = pattern_of(y)
    source = complete_structure(n, pat)
    pieces: list[tuple[tuple[int, ...], ...]] = []
    idx = 0
    for name, arity in y.signature.symbols:
        rel = y.relation(name)
        for p in pat.for_symbol(name):
            witness = min(t for t in rel if refines(p, tuple_partition(t)))
            alphabet = tuple(sorted(set(witness)))
            arr = covering_array(
                n, min(arity, n), alphabet, seed=_derived_seed(seed, idx)
            )
            pieces.extend(arr.columns)
            idx += 1
    if not pieces:
        pieces = [(0,) * n]
    k = len(pieces)
    view = AlicePowerView(y, k)
    mapping = tuple(view.vertex(tuple(col[i] for col in pieces)) for i in range(n))
    if not is_homomorphism(mapping, source, view):
        raise NotAHomomorphismError("embedding failed its own certification")
    return k, Homomorphism(source, view, mapping)


def clique_into_alice_power_digraph(y: RelationalStructure, m: int):
    """Embed the m-clique into an Alice power of a digraph with an edge.

    Uses the m lexicographically first balanced tuples over the two endpoints
    of the least non-loop edge, with k = ceil(log2 m + log2 log2 m + 2); a
    loop (if that is the only edge) absorbs the whole clique at k = 1.
    """
    syms = y.signature.symbols
    if len(syms) != 1 or syms[0][1] != 2:
        raise ValueError("digraph embedding needs a single binary relation")
    name = syms[0][0]
    edges = y.relation(name)
    if not edges:
        raise ValueError("digraph has no edges")
    if m < 1:
        raise ValueError("need m >= 1")
    source = RelationalStructure(
        y.signature, m, {name: [(i, j) for i in range(m) for j in range(m) if i != j]}
    )
    proper = [e for e in edges if e[0] != e[1]]
    if not proper:
        loop_v = edges[0][0]
        view = AlicePowerView(y, 1)
        mapping = (view.vertex((loop_v,)),) * m
        if not is_homomorphism(mapping, source, view):
            raise NotAHomomorphismError("embedding failed its own certification")
        return 1, Homomorphism(source, view, mapping)
    y1, y2 = min(proper)
    if m == 1:
        k = 1
    else:
        k = ceil(log2(m) + (log2(log2(m)) if m > 2 else 0) + 2)
        while comb(k, k // 2) < m:
            k += 1
    lead, other = (y1, y2) if y1 < y2 else (y2, y1)
    rows = []
    for positions in islice(combinations(range(k), k // 2 if lead == y1 else k - k // 2), m):
        t = [other] * k
        for p in positions:
            t[p] = lead
        rows.append(tuple(t))
    if len(rows) < m:
        raise AssertionError("not enough balanced tuples")
    view = AlicePowerView(y, k)
    mapping = tuple(view.vertex(t) for t in rows)
    if not is_homomorphism(mapping, source, view):
        raise NotAHomomorphismError("embedding failed its own certification")
    return k, Homomorphism(source, view, mapping)


def complete_into_bob_power(y: RelationalStructure, n: int):
    """Embed the pattern-complete structure on n vertices into the n-slot Bob
    power via a central vertex, or return None when no vertex is central."""
    if n < 1:
        raise ValueError("need n >= 1")
    central = central_vertices(y)
    if not central:
        return None
    v = central[0]
    pat = pattern_of(y)
    source = complete_structure(n, pat)
    target = bob_power(y, n)
    mapping = tuple(i * y.domain_size + v for i in range(n))
    if not is_homomorphism(mapping, source, target):
        raise NotAHomomorphismError("embedding failed its own certification")
    return n, Homomorphism(source, target, mapping)
