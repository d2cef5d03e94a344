"""Finite relational structures and homomorphism machinery.

Vertices of every structure are the dense range ``0 .. domain_size - 1``.
Relation tuples are deduplicated and stored sorted, so two structures with
the same content compare equal.  Functions that take a homomorphism target
only need ``signature``, ``domain_size`` and ``has_tuple``, which lets the
power views in :mod:`cspgames.powers` stand in for materialized structures.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import SignatureMismatchError


@dataclass(frozen=True)
class Signature:
    """Ordered relation symbols, each a (name, arity) pair."""

    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple((str(n), int(a)) for n, a in self.symbols))
        seen = set()
        for name, arity in self.symbols:
            if not name:
                raise ValueError("relation names must be nonempty")
            if arity < 1:
                raise ValueError(f"relation {name!r} must have arity >= 1, got {arity}")
            if name in seen:
                raise ValueError(f"duplicate relation name {name!r}")
            seen.add(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.symbols)

    def arity(self, name: str) -> int:
        for sym, ar in self.symbols:
            if sym == name:
                return ar
        raise KeyError(name)


@dataclass(frozen=True, eq=True)
class RelationalStructure:
    """A finite structure: domain ``range(domain_size)`` plus one tuple set per symbol."""

    signature: Signature
    domain_size: int
    relations: Mapping[str, tuple[tuple[int, ...], ...]]
    _sets: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        n = int(self.domain_size)
        if n < 0:
            raise ValueError("domain size must be >= 0")
        object.__setattr__(self, "domain_size", n)
        rels = dict(self.relations)
        unknown = set(rels) - set(self.signature.names)
        if unknown:
            raise ValueError(f"relations {sorted(unknown)} not in signature")
        canon = {}
        sets = {}
        for name, arity in self.signature.symbols:
            tuples = set()
            for t in rels.get(name, ()):
                t = tuple(int(v) for v in t)
                if len(t) != arity:
                    raise ValueError(f"tuple {t} in {name!r} has length {len(t)}, expected {arity}")
                if any(v < 0 or v >= n for v in t):
                    raise ValueError(f"tuple {t} in {name!r} leaves the domain 0..{n - 1}")
                tuples.add(t)
            canon[name] = tuple(sorted(tuples))
            sets[name] = tuples
        object.__setattr__(self, "relations", canon)
        object.__setattr__(self, "_sets", sets)

    @property
    def domain(self) -> range:
        return range(self.domain_size)

    def relation(self, name: str) -> tuple[tuple[int, ...], ...]:
        return self.relations[name]

    def has_tuple(self, name: str, t: Sequence[int]) -> bool:
        return tuple(t) in self._sets[name]

    def total_tuples(self) -> int:
        return sum(len(ts) for ts in self.relations.values())

    def to_json_dict(self) -> dict:
        return {
            "signature": [{"name": n, "arity": a} for n, a in self.signature.symbols],
            "domain": self.domain_size,
            "relations": {n: [list(t) for t in ts] for n, ts in self.relations.items()},
        }

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "RelationalStructure":
        for key in ("signature", "domain", "relations"):
            if key not in data:
                raise ValueError(f"structure JSON is missing the {key!r} field")
        sig = Signature(tuple((s["name"], s["arity"]) for s in data["signature"]))
        return cls(sig, data["domain"], data["relations"])

    @classmethod
    def from_json(cls, text: str) -> "RelationalStructure":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class Homomorphism:
    """A vertex map between structures, recorded alongside both endpoints."""

    source: RelationalStructure
    target: object
    mapping: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(int(v) for v in self.mapping))

    def __call__(self, v: int) -> int:
        return self.mapping[v]


def is_homomorphism(mapping: Sequence[int], source: RelationalStructure, target) -> bool:
    """Check that ``mapping`` sends every relation tuple of source into target.

    ``target`` may be any object with ``signature``, ``domain_size`` and
    ``has_tuple``.  Raises on signature mismatch or a map that is not a
    total function into the target domain; returns False only for genuine
    preservation failures.
    """
    if isinstance(mapping, Homomorphism):
        mapping = mapping.mapping
    if source.signature != target.signature:
        raise SignatureMismatchError(
            f"source signature {source.signature.symbols} != target {target.signature.symbols}"
        )
    mapping = tuple(int(v) for v in mapping)
    if len(mapping) != source.domain_size:
        raise ValueError(f"map has {len(mapping)} entries, domain has {source.domain_size}")
    if any(v < 0 or v >= target.domain_size for v in mapping):
        raise ValueError("map leaves the target domain")
    for name, _ in source.signature.symbols:
        for t in source.relation(name):
            if not target.has_tuple(name, tuple(mapping[v] for v in t)):
                return False
    return True


def find_homomorphism(source: RelationalStructure, target: RelationalStructure):
    """Backtracking search for a homomorphism; None if there is none.

    Deterministic: variables are assigned in order of decreasing constraint
    incidence (ties by vertex id), values in increasing order, and the first
    complete assignment found is returned.  After each assignment every
    constraint touching the variable must retain a supporting target tuple.
    """
    if source.signature != target.signature:
        raise SignatureMismatchError(
            f"source signature {source.signature.symbols} != target {target.signature.symbols}"
        )
    n, m = source.domain_size, target.domain_size
    if n == 0:
        return Homomorphism(source, target, ())
    if m == 0:
        return None

    cons = []
    incidence = [0] * n
    for name, _ in source.signature.symbols:
        targets = target.relation(name)
        for t in source.relation(name):
            if not targets:
                return None
            cons.append((t, targets))
            for v in set(t):
                incidence[v] += 1
    order = sorted(range(n), key=lambda v: (-incidence[v], v))
    by_var = [[] for _ in range(n)]
    for ci, (t, _) in enumerate(cons):
        for v in set(t):
            by_var[v].append(ci)

    assign = [-1] * n

    def supported(ci):
        t, targets = cons[ci]
        for yt in targets:
            for xv, yv in zip(t, yt):
                a = assign[xv]
                if a != -1 and a != yv:
                    break
            else:
                return True
        return False

    def extend(i):
        if i == n:
            return True
        v = order[i]
        for w in range(m):
            assign[v] = w
            if all(supported(ci) for ci in by_var[v]) and extend(i + 1):
                return True
        assign[v] = -1
        return False

    if extend(0):
        return Homomorphism(source, target, tuple(assign))
    return None


def induced_substructure(y: RelationalStructure, vertices: Sequence[int]) -> RelationalStructure:
    """Substructure on the given vertices, relabeled densely in sorted order."""
    keep = sorted(set(int(v) for v in vertices))
    if any(v < 0 or v >= y.domain_size for v in keep):
        raise ValueError("vertices outside the domain")
    relabel = {old: new for new, old in enumerate(keep)}
    rels = {}
    for name, _ in y.signature.symbols:
        rels[name] = [
            tuple(relabel[v] for v in t) for t in y.relation(name) if all(v in relabel for v in t)
        ]
    return RelationalStructure(y.signature, len(keep), rels)


def core_of(y: RelationalStructure) -> RelationalStructure:
    """Compute the core: repeatedly retract onto a proper substructure.

    Looks for an endomorphism avoiding some vertex, restricts to its image,
    and repeats.  When no vertex can be avoided every endomorphism of the
    remainder is surjective, hence an automorphism.
    """
    current = y
    while current.domain_size > 1:
        for drop in range(current.domain_size):
            rest = [v for v in range(current.domain_size) if v != drop]
            sub = induced_substructure(current, rest)
            h = find_homomorphism(current, sub)
            if h is not None:
                image = sorted({rest[w] for w in h.mapping})
                current = induced_substructure(current, image)
                break
        else:
            break
    return current


def _vertex_profiles(y: RelationalStructure) -> list[tuple]:
    profs = []
    for v in range(y.domain_size):
        prof = []
        for name, arity in y.signature.symbols:
            for pos in range(arity):
                prof.append(sum(1 for t in y.relation(name) if t[pos] == v))
        profs.append(tuple(prof))
    return profs


def are_isomorphic(a: RelationalStructure, b: RelationalStructure) -> bool:
    """Decide isomorphism by backtracking over bijections.

    Prunes with per-vertex occurrence profiles; since relation sizes are
    compared up front, any bijection sending tuples into tuples is onto them.
    """
    if a.signature != b.signature or a.domain_size != b.domain_size:
        return False
    for name, _ in a.signature.symbols:
        if len(a.relation(name)) != len(b.relation(name)):
            return False
    n = a.domain_size
    prof_a, prof_b = _vertex_profiles(a), _vertex_profiles(b)
    if sorted(prof_a) != sorted(prof_b):
        return False

    complete_at = [[] for _ in range(n)]
    for name, _ in a.signature.symbols:
        for t in a.relation(name):
            if t:
                complete_at[max(t)].append((name, t))

    used = [False] * n
    assign = [-1] * n

    def extend(v):
        if v == n:
            return True
        for w in range(n):
            if used[w] or prof_a[v] != prof_b[w]:
                continue
            assign[v] = w
            used[w] = True
            if all(
                b.has_tuple(name, tuple(assign[x] for x in t)) for name, t in complete_at[v]
            ) and extend(v + 1):
                return True
            used[w] = False
        assign[v] = -1
        return False

    return extend(0)


BINARY = Signature((("E", 2),))
TERNARY = Signature((("R", 3),))


def make_named(name: str, n: int | None = None) -> RelationalStructure:
    """Catalog of named templates.

    clique(n)          all ordered pairs of distinct vertices
    nae(n)             all non-constant triples
    rainbow(n)         all triples with three distinct entries
    directed_edge      two vertices, single edge (0, 1)
    directed_cycle(n)  edges (i, i+1 mod n)
    one_in_three       Boolean triples with exactly one 1
    loop               one vertex with a loop
    """
    need_n = {"clique", "nae", "rainbow", "directed_cycle"}
    if name in need_n:
        if n is None or n < 1:
            raise ValueError(f"{name} needs a positive size parameter")
    elif n is not None:
        raise ValueError(f"{name} takes no size parameter")
    if name == "clique":
        return RelationalStructure(
            BINARY, n, {"E": [(i, j) for i in range(n) for j in range(n) if i != j]}
        )
    if name == "nae":
        triples = [
            (x, y, z)
            for x in range(n)
            for y in range(n)
            for z in range(n)
            if not (x == y == z)
        ]
        return RelationalStructure(TERNARY, n, {"R": triples})
    if name == "rainbow":
        triples = [
            (x, y, z)
            for x in range(n)
            for y in range(n)
            for z in range(n)
            if x != y and y != z and x != z
        ]
        return RelationalStructure(TERNARY, n, {"R": triples})
    if name == "directed_edge":
        return RelationalStructure(BINARY, 2, {"E": [(0, 1)]})
    if name == "directed_cycle":
        return RelationalStructure(BINARY, n, {"E": [(i, (i + 1) % n) for i in range(n)]})
    if name == "one_in_three":
        return RelationalStructure(TERNARY, 2, {"R": [(1, 0, 0), (0, 1, 0), (0, 0, 1)]})
    if name == "loop":
        return RelationalStructure(BINARY, 1, {"E": [(0, 0)]})
    raise ValueError(f"unknown template {name!r}")
