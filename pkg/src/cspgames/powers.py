"""Alice and Bob power constructions, plus the one-bit-advantage predicates.

Alice power vertices are k-tuples over the base domain, encoded big-endian:
the tuple (t_0, ..., t_{k-1}) over a base of size n gets index
sum(t_j * n**(k-1-j)).  Bob power vertices are (slot, vertex) pairs encoded
slot-major as ``slot * n + vertex``.
"""

from __future__ import annotations

from itertools import product
from math import prod

from .errors import CapExceededError
from .structures import RelationalStructure, core_of, find_homomorphism

MAX_POWER_VERTICES = 100_000
MAX_POWER_WORK = 10_000_000


def tuple_to_index(t, n: int) -> int:
    idx = 0
    for v in t:
        idx = idx * n + v
    return idx


def index_to_tuple(idx: int, n: int, k: int) -> tuple[int, ...]:
    out = [0] * k
    for j in range(k - 1, -1, -1):
        idx, out[j] = divmod(idx, n)
    return tuple(out)


def _check_power_args(y: RelationalStructure, k: int):
    if k < 1:
        raise ValueError(f"power exponent must be >= 1, got {k}")
    if y.domain_size < 1:
        raise ValueError("power of an empty-domain structure")


class AlicePowerView:
    """Membership view of an Alice power that never materializes relations.

    Exposes just enough (signature, domain_size, has_tuple) to act as a
    homomorphism target, so witnesses into huge powers can still be checked
    tuple by tuple.
    """

    def __init__(self, base: RelationalStructure, k: int):
        _check_power_args(base, k)
        self.base = base
        self.k = k
        self.signature = base.signature
        self.domain_size = base.domain_size**k

    def vertex(self, t) -> int:
        if len(t) != self.k or any(v < 0 or v >= self.base.domain_size for v in t):
            raise ValueError(f"{tuple(t)} is not a {self.k}-tuple over the base domain")
        return tuple_to_index(t, self.base.domain_size)

    def tuple_of(self, idx: int) -> tuple[int, ...]:
        if idx < 0 or idx >= self.domain_size:
            raise ValueError(f"vertex {idx} outside the power domain")
        return index_to_tuple(idx, self.base.domain_size, self.k)

    def has_tuple(self, name: str, vt) -> bool:
        decoded = [self.tuple_of(v) for v in vt]
        for j in range(self.k):
            if self.base.has_tuple(name, tuple(d[j] for d in decoded)):
                return True
        return False


class BobPowerView:
    """Membership view of a Bob power (same duck type as AlicePowerView)."""

    def __init__(self, base: RelationalStructure, k: int):
        _check_power_args(base, k)
        self.base = base
        self.k = k
        self.signature = base.signature
        self.domain_size = k * base.domain_size

    def vertex(self, slot: int, v: int) -> int:
        if not (0 <= slot < self.k and 0 <= v < self.base.domain_size):
            raise ValueError(f"({slot}, {v}) outside [k] x domain")
        return slot * self.base.domain_size + v

    def pair_of(self, idx: int) -> tuple[int, int]:
        if idx < 0 or idx >= self.domain_size:
            raise ValueError(f"vertex {idx} outside the power domain")
        return divmod(idx, self.base.domain_size)

    def has_tuple(self, name: str, vt) -> bool:
        pairs = [self.pair_of(v) for v in vt]
        rel = self.base.relation(name)
        if not rel:
            return False
        groups: dict[int, list[int]] = {}
        for pos, (slot, _) in enumerate(pairs):
            groups.setdefault(slot, []).append(pos)
        for positions in groups.values():
            if not any(all(yt[p] == pairs[p][1] for p in positions) for yt in rel):
                return False
        return True


def alice_power(
    y: RelationalStructure,
    k: int,
    max_vertices: int = MAX_POWER_VERTICES,
    max_work: int = MAX_POWER_WORK,
) -> RelationalStructure:
    """Materialize the Alice power: domain Y^k, a tuple of k-tuples is related
    iff some coordinate projects into the base relation."""
    _check_power_args(y, k)
    n = y.domain_size
    size = n**k
    if size > max_vertices:
        raise CapExceededError(f"alice power has {size} vertices, cap is {max_vertices}")
    rels = {}
    for name, arity in y.signature.symbols:
        base = y.relation(name)
        work = k * len(base) * n ** ((k - 1) * arity)
        if work > max_work:
            raise CapExceededError(
                f"alice power relation {name!r} needs {work} candidate tuples, cap is {max_work}"
            )
        out = set()
        free = k - 1
        for j in range(k):
            for yt in base:
                for rest in product(range(n), repeat=free * arity):
                    ids = []
                    for i in range(arity):
                        chunk = rest[free * i : free * (i + 1)]
                        ids.append(tuple_to_index(chunk[:j] + (yt[i],) + chunk[j:], n))
                    out.add(tuple(ids))
        rels[name] = out
    return RelationalStructure(y.signature, size, rels)


def bob_power(
    y: RelationalStructure,
    k: int,
    max_vertices: int = MAX_POWER_VERTICES,
    max_work: int = MAX_POWER_WORK,
) -> RelationalStructure:
    """Materialize the Bob power: domain [k] x Y, a tuple is related iff every
    slot's positions agree with some single base tuple."""
    _check_power_args(y, k)
    view = BobPowerView(y, k)
    size = view.domain_size
    if size > max_vertices:
        raise CapExceededError(f"bob power has {size} vertices, cap is {max_vertices}")
    rels = {}
    for name, arity in y.signature.symbols:
        work = size**arity
        if work > max_work:
            raise CapExceededError(
                f"bob power relation {name!r} needs {work} candidate tuples, cap is {max_work}"
            )
        rels[name] = [
            vt for vt in product(range(size), repeat=arity) if view.has_tuple(name, vt)
        ]
    return RelationalStructure(y.signature, size, rels)


def alice_one_bit_helps(y: RelationalStructure) -> bool:
    """One bit from Alice to Bob beats silence iff the core is non-trivial."""
    return core_of(y).domain_size > 1


def bob_one_bit_helps(y: RelationalStructure) -> bool:
    """One bit from Bob to Alice helps iff some core relation is not a
    Cartesian product of its coordinate projections."""
    c = core_of(y)
    for name, arity in c.signature.symbols:
        rel = c.relation(name)
        projections = prod(len({t[i] for t in rel}) for i in range(arity))
        if len(rel) != projections:
            return True
    return False


def alice_power_maps_back(y: RelationalStructure, k: int) -> bool:
    """Direct test used to cross-check alice_one_bit_helps: does the k-fold
    Alice power map homomorphically back onto the base?"""
    return find_homomorphism(alice_power(y, k), y) is not None


def bob_power_maps_back(y: RelationalStructure, k: int) -> bool:
    """Direct test used to cross-check bob_one_bit_helps."""
    return find_homomorphism(bob_power(y, k), y) is not None
