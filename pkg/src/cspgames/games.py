"""Two-prover game strategies: verification, translation to and from power
homomorphisms, and brute-force synthesis.

A game instance is a pair (X, Y) over a shared signature.  The referee picks
a symbol R and a tuple in R^X for Alice and a single vertex for Bob; the
players win if Alice's answer lies in R^Y and agrees with Bob's answer
wherever Bob's question occurs in Alice's.  Strategies are total tables so
they serialize; the channel variants carry k-valued messages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from math import prod

from .errors import CapExceededError, ImperfectStrategyError, NotAHomomorphismError
from .powers import AlicePowerView, BobPowerView
from .structures import Homomorphism, RelationalStructure, is_homomorphism

MAX_SEARCH_SPACE = 10_000_000


@dataclass(frozen=True)
class NoChannelStrategy:
    answers: dict  # symbol -> {alice question tuple -> answer tuple}
    bob: tuple[int, ...]  # vertex -> answer

    variant = "none"


@dataclass(frozen=True)
class AliceChannelStrategy:
    k: int
    answers: dict  # symbol -> {alice question tuple -> answer tuple}
    messages: dict  # symbol -> {alice question tuple -> message in [k]}
    bob: tuple[tuple[int, ...], ...]  # [vertex][message] -> answer

    variant = "alice"


@dataclass(frozen=True)
class BobChannelStrategy:
    k: int
    messages: tuple[int, ...]  # vertex -> message in [k]
    bob: tuple[int, ...]  # vertex -> answer
    answers: dict  # symbol -> {(alice question tuple, message) -> answer tuple}

    variant = "bob"


@dataclass(frozen=True)
class Counterexample:
    symbol: str
    alice_question: tuple[int, ...]
    bob_question: int
    alice_answer: tuple[int, ...]
    bob_answer: int
    reason: str  # "plausibility" or "consistency"


@dataclass(frozen=True)
class Verdict:
    perfect: bool
    counterexample: Counterexample | None


def _answer_pair(strategy, symbol, xt, x):
    """Alice's tuple answer and Bob's vertex answer on question ((symbol, xt), x)."""
    try:
        if strategy.variant == "none":
            return strategy.answers[symbol][xt], strategy.bob[x]
        if strategy.variant == "alice":
            msg = strategy.messages[symbol][xt]
            return strategy.answers[symbol][xt], strategy.bob[x][msg]
        if strategy.variant == "bob":
            msg = strategy.messages[x]
            return strategy.answers[symbol][(xt, msg)], strategy.bob[x]
    except (KeyError, IndexError) as exc:
        raise ValueError(
            f"strategy is not total: missing entry for {symbol!r} {xt} / bob {x}"
        ) from exc
    raise ValueError(f"unknown strategy variant {strategy.variant!r}")


def verify_perfect(x: RelationalStructure, y, strategy) -> Verdict:
    """Check every question pair; report the first failure in a fixed order.

    Questions are enumerated by signature order, then Alice's tuple in sorted
    order, then Bob's vertex ascending.  Plausibility is checked before
    consistency.
    """
    for name, arity in x.signature.symbols:
        for xt in x.relation(name):
            for v in range(x.domain_size):
                yt, b = _answer_pair(strategy, name, xt, v)
                yt = tuple(yt)
                if len(yt) != arity or any(
                    w < 0 or w >= y.domain_size for w in yt
                ) or not 0 <= b < y.domain_size:
                    raise ValueError(f"answers for {name!r} {xt} leave the target domain")
                if not y.has_tuple(name, yt):
                    return Verdict(False, Counterexample(name, xt, v, yt, b, "plausibility"))
                if any(xi == v and yi != b for xi, yi in zip(xt, yt)):
                    return Verdict(False, Counterexample(name, xt, v, yt, b, "consistency"))
    return Verdict(True, None)


# ---------------------------------------------------------------------------
# translations between strategies and power homomorphisms


def _as_mapping(h):
    return tuple(h.mapping) if isinstance(h, Homomorphism) else tuple(h)


def alice_strategy_from_hom(h, x: RelationalStructure, y: RelationalStructure, k: int):
    """Turn a homomorphism into the k-fold Alice power into a perfect
    Alice-channel strategy: the message names a coordinate whose projection
    lands in the base relation (least such), Bob replies with his vertex's
    coordinate at the received message."""
    mapping = _as_mapping(h)
    view = AlicePowerView(y, k)
    if not is_homomorphism(mapping, x, view):
        raise NotAHomomorphismError("map is not a homomorphism into the Alice power")
    rows = [view.tuple_of(v) for v in mapping]
    answers: dict = {}
    messages: dict = {}
    for name, _ in x.signature.symbols:
        answers[name] = {}
        messages[name] = {}
        for xt in x.relation(name):
            for j in range(k):
                proj = tuple(rows[xi][j] for xi in xt)
                if y.has_tuple(name, proj):
                    answers[name][xt] = proj
                    messages[name][xt] = j
                    break
    bob = tuple(rows[v] for v in range(x.domain_size))
    return AliceChannelStrategy(k, answers, messages, bob)


def hom_from_alice_strategy(strategy: AliceChannelStrategy, x, y) -> Homomorphism:
    """Collapse a perfect Alice-channel strategy to a homomorphism into the
    Alice power: x goes to the tuple of Bob replies across messages."""
    verdict = verify_perfect(x, y, strategy)
    if not verdict.perfect:
        raise ImperfectStrategyError("strategy is not perfect", verdict.counterexample)
    view = AlicePowerView(y, strategy.k)
    mapping = tuple(view.vertex(tuple(strategy.bob[v])) for v in range(x.domain_size))
    assert is_homomorphism(mapping, x, view)
    return Homomorphism(x, view, mapping)


def bob_strategy_from_hom(h, x: RelationalStructure, y: RelationalStructure, k: int):
    """Turn a homomorphism into the k-slot Bob power into a perfect
    Bob-channel strategy: Bob sends his vertex's slot and answers its vertex
    part; Alice answers the least base tuple agreeing with Bob's replies on
    the positions whose slot matches the received message."""
    mapping = _as_mapping(h)
    view = BobPowerView(y, k)
    if not is_homomorphism(mapping, x, view):
        raise NotAHomomorphismError("map is not a homomorphism into the Bob power")
    pairs = [view.pair_of(v) for v in mapping]
    msgs = tuple(p[0] for p in pairs)
    bob = tuple(p[1] for p in pairs)
    answers: dict = {}
    for name, _ in x.signature.symbols:
        answers[name] = {}
        for xt in x.relation(name):
            for s in range(k):
                matches = [i for i, xi in enumerate(xt) if msgs[xi] == s]
                for yt in y.relation(name):
                    if all(yt[i] == bob[xt[i]] for i in matches):
                        answers[name][(xt, s)] = yt
                        break
    return BobChannelStrategy(k, msgs, bob, answers)


def hom_from_bob_strategy(strategy: BobChannelStrategy, x, y) -> Homomorphism:
    """Collapse a perfect Bob-channel strategy to a homomorphism into the Bob
    power: x goes to (message, reply)."""
    verdict = verify_perfect(x, y, strategy)
    if not verdict.perfect:
        raise ImperfectStrategyError("strategy is not perfect", verdict.counterexample)
    view = BobPowerView(y, strategy.k)
    mapping = tuple(
        view.vertex(strategy.messages[v], strategy.bob[v]) for v in range(x.domain_size)
    )
    assert is_homomorphism(mapping, x, view)
    return Homomorphism(x, view, mapping)


# ---------------------------------------------------------------------------
# brute force


def strategy_space_size(x: RelationalStructure, y: RelationalStructure, variant, k=1) -> int:
    """Number of candidate strategies brute_force_search would enumerate.

    Alice's answers range over the target relation only: an answer outside it
    loses outright, so the restriction never discards a perfect strategy.
    """
    nx, ny = x.domain_size, y.domain_size
    questions = {name: len(x.relation(name)) for name, _ in x.signature.symbols}
    options = {name: len(y.relation(name)) for name, _ in y.signature.symbols}
    if variant == "none":
        return prod(options[n] ** q for n, q in questions.items()) * ny**nx
    if variant == "alice":
        return prod((options[n] * k) ** q for n, q in questions.items()) * ny ** (k * nx)
    if variant == "bob":
        return (
            prod(options[n] ** (k * q) for n, q in questions.items())
            * (k * ny) ** nx
        )
    raise ValueError(f"unknown variant {variant!r}")


def brute_force_search(
    x: RelationalStructure,
    y: RelationalStructure,
    variant: str = "none",
    k: int = 1,
    cap: int = MAX_SEARCH_SPACE,
):
    """Exhaustively search for a perfect strategy; None when none exists.

    Enumeration order is documented and deterministic: per-question choices
    vary fastest for the lexicographically last question, Alice answers in
    sorted relation order (paired with ascending messages for the alice
    variant), Bob replies ascending.  Raises CapExceededError beyond ``cap``.
    """
    if variant not in ("none", "alice", "bob"):
        raise ValueError(f"unknown variant {variant!r}")
    if k < 1:
        raise ValueError("k must be >= 1")
    size = strategy_space_size(x, y, variant, k)
    if size == 0:
        return None
    if size > cap:
        raise CapExceededError(f"strategy space has {size} members, cap is {cap}")

    syms = [name for name, _ in x.signature.symbols]
    nx, ny = x.domain_size, y.domain_size

    slots: list[list] = []
    build = None
    if variant == "none":
        for name in syms:
            for xt in x.relation(name):
                slots.append([(name, xt, yt) for yt in y.relation(name)])
        for v in range(nx):
            slots.append([("bob", v, w) for w in range(ny)])

        def build(choice):
            answers = {name: {} for name in syms}
            bob = [0] * nx
            for kind, key, val in choice:
                if kind == "bob":
                    bob[key] = val
                else:
                    answers[kind][key] = val
            return NoChannelStrategy(answers, tuple(bob))

    elif variant == "alice":
        for name in syms:
            for xt in x.relation(name):
                slots.append(
                    [(name, xt, yt, msg) for yt in y.relation(name) for msg in range(k)]
                )
        for v in range(nx):
            for msg in range(k):
                slots.append([("bob", (v, msg), w) for w in range(ny)])

        def build(choice):
            answers = {name: {} for name in syms}
            messages = {name: {} for name in syms}
            bob = [[0] * k for _ in range(nx)]
            for item in choice:
                if item[0] == "bob":
                    _, (v, msg), w = item
                    bob[v][msg] = w
                else:
                    name, xt, yt, msg = item
                    answers[name][xt] = yt
                    messages[name][xt] = msg
            return AliceChannelStrategy(
                k, answers, messages, tuple(tuple(r) for r in bob)
            )

    else:
        for v in range(nx):
            slots.append([("msg", v, s) for s in range(k)])
        for v in range(nx):
            slots.append([("bob", v, w) for w in range(ny)])
        for name in syms:
            for xt in x.relation(name):
                for s in range(k):
                    slots.append([(name, (xt, s), yt) for yt in y.relation(name)])

        def build(choice):
            answers = {name: {} for name in syms}
            msgs = [0] * nx
            bob = [0] * nx
            for kind, key, val in choice:
                if kind == "msg":
                    msgs[key] = val
                elif kind == "bob":
                    bob[key] = val
                else:
                    answers[kind][key] = val
            return BobChannelStrategy(k, tuple(msgs), tuple(bob), answers)

    for choice in product(*slots):
        s = build(choice)
        if verify_perfect(x, y, s).perfect:
            return s
    return None


# ---------------------------------------------------------------------------
# serialization


def strategy_to_json_dict(strategy) -> dict:
    if strategy.variant == "none":
        return {
            "variant": "none",
            "answers": {
                n: [[list(xt), list(yt)] for xt, yt in sorted(table.items())]
                for n, table in strategy.answers.items()
            },
            "bob": list(strategy.bob),
        }
    if strategy.variant == "alice":
        return {
            "variant": "alice",
            "k": strategy.k,
            "answers": {
                n: [
                    [list(xt), list(yt), strategy.messages[n][xt]]
                    for xt, yt in sorted(table.items())
                ]
                for n, table in strategy.answers.items()
            },
            "bob": [list(row) for row in strategy.bob],
        }
    if strategy.variant == "bob":
        return {
            "variant": "bob",
            "k": strategy.k,
            "messages": list(strategy.messages),
            "bob": list(strategy.bob),
            "answers": {
                n: [[list(xt), s, list(yt)] for (xt, s), yt in sorted(table.items())]
                for n, table in strategy.answers.items()
            },
        }
    raise ValueError(f"unknown variant {strategy.variant!r}")


def strategy_from_json_dict(data: dict):
    variant = data.get("variant")
    if variant == "none":
        answers = {
            n: {tuple(xt): tuple(yt) for xt, yt in rows}
            for n, rows in data["answers"].items()
        }
        return NoChannelStrategy(answers, tuple(data["bob"]))
    if variant == "alice":
        answers: dict = {}
        messages: dict = {}
        for n, rows in data["answers"].items():
            answers[n] = {tuple(xt): tuple(yt) for xt, yt, _ in rows}
            messages[n] = {tuple(xt): msg for xt, _, msg in rows}
        return AliceChannelStrategy(
            int(data["k"]), answers, messages, tuple(tuple(r) for r in data["bob"])
        )
    if variant == "bob":
        answers = {
            n: {(tuple(xt), s): tuple(yt) for xt, s, yt in rows}
            for n, rows in data["answers"].items()
        }
        return BobChannelStrategy(
            int(data["k"]),
            tuple(data["messages"]),
            tuple(data["bob"]),
            answers,
        )
    raise ValueError(f"unknown strategy variant {variant!r}")


def strategy_to_json(strategy, indent=None) -> str:
    return json.dumps(strategy_to_json_dict(strategy), indent=indent)


def strategy_from_json(text: str):
    return strategy_from_json_dict(json.loads(text))
