"""Projection-valued measures and quantum strategy verification.

All matrices are dense complex numpy arrays.  A PVM maps a finite outcome set
to projectors summing to the identity.  Tuples of commuting PVMs can witness
membership in the quantum template extension of a relation: the tuple belongs
iff the PVMs pairwise commute and every product over an off-relation outcome
tuple vanishes, in which case the products over the relation form a joint PVM
witness.  Strategies use a shared entangled state with per-question PVMs on
each side; with the maximally entangled state a homomorphism lifts to a
perfect strategy by placing identity projectors on its answers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import CapExceededError, NotAHomomorphismError
from .games import Counterexample, Verdict
from .structures import RelationalStructure, is_homomorphism

DEFAULT_TOL = 1e-9
MAX_DIM = 16


def spectral_norm(a) -> float:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


@dataclass(frozen=True)
class PVM:
    """Outcome labels paired with projectors (labels stay in listed order)."""

    outcomes: tuple
    projectors: tuple

    def __post_init__(self):
        projs = tuple(np.asarray(p, dtype=complex) for p in self.projectors)
        if len(projs) != len(self.outcomes):
            raise ValueError("one projector per outcome required")
        if not projs:
            raise ValueError("PVM needs at least one outcome")
        d = projs[0].shape[0]
        for p in projs:
            if p.shape != (d, d):
                raise ValueError("projectors must be square matrices of equal size")
        if len(set(self.outcomes)) != len(self.outcomes):
            raise ValueError("duplicate outcome labels")
        object.__setattr__(self, "projectors", projs)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def projector(self, outcome):
        return self.projectors[self.outcomes.index(outcome)]


@dataclass(frozen=True)
class PVMValidation:
    ok: bool
    hermitian_residual: float
    idempotency_residual: float
    orthogonality_residual: float
    completeness_residual: float


def validate_pvm(pvm: PVM, tol: float = DEFAULT_TOL) -> PVMValidation:
    """Residuals (spectral norms) for hermiticity, idempotency, mutual
    orthogonality and summing to the identity."""
    herm = max(spectral_norm(p - p.conj().T) for p in pvm.projectors)
    idem = max(spectral_norm(p @ p - p) for p in pvm.projectors)
    orth = 0.0
    for i, p in enumerate(pvm.projectors):
        for q in pvm.projectors[i + 1 :]:
            orth = max(orth, spectral_norm(p @ q))
    comp = spectral_norm(sum(pvm.projectors) - np.eye(pvm.dim))
    ok = max(herm, idem, orth, comp) <= tol
    return PVMValidation(ok, herm, idem, orth, comp)


def commutation_residual(p: PVM, q: PVM) -> float:
    worst = 0.0
    for a in p.projectors:
        for b in q.projectors:
            worst = max(worst, spectral_norm(a @ b - b @ a))
    return worst


def pvms_commute(p: PVM, q: PVM, tol: float = DEFAULT_TOL) -> bool:
    return commutation_residual(p, q) <= tol


@dataclass(frozen=True)
class JointPVM:
    """Witness measurement indexed by relation tuples, with its support."""

    outcomes: tuple
    projectors: tuple
    support: frozenset

    def as_pvm(self) -> PVM:
        return PVM(self.outcomes, self.projectors)


def quantum_relation_membership(
    pvms,
    relation,
    tol: float = DEFAULT_TOL,
    max_dim: int = MAX_DIM,
):
    """Decide membership of a PVM tuple in the quantum template extension.

    Requires all PVMs to share dimension and outcome labels.  Returns the
    joint witness (products over relation tuples) if the tuple is a member,
    otherwise None.  Membership holds iff the PVMs pairwise commute and every
    product over a tuple outside the relation vanishes.
    """
    pvms = tuple(pvms)
    if not pvms:
        raise ValueError("empty PVM tuple")
    d = pvms[0].dim
    if d > max_dim:
        raise CapExceededError(f"dimension {d} exceeds the cap {max_dim}")
    labels = pvms[0].outcomes
    for p in pvms:
        if p.dim != d:
            raise ValueError("PVMs have mismatched dimensions")
        if p.outcomes != labels:
            raise ValueError("PVMs have mismatched outcome sets")
        if not validate_pvm(p, tol).ok:
            raise ValueError("input is not a PVM within tolerance")
    relation = {tuple(t) for t in relation}
    for t in relation:
        if len(t) != len(pvms) or any(v not in labels for v in t):
            raise ValueError(f"relation tuple {t} does not match the PVM tuple")
    for i, p in enumerate(pvms):
        for q in pvms[i + 1 :]:
            if not pvms_commute(p, q, tol):
                return None
    by_tuple = {}
    support = set()
    members = sorted(relation)
    for t in product(labels, repeat=len(pvms)):
        f = pvms[0].projector(t[0]).copy()
        for i in range(1, len(pvms)):
            f = f @ pvms[i].projector(t[i])
        norm = spectral_norm(f)
        if tuple(t) in relation:
            by_tuple[tuple(t)] = f
            if norm > tol:
                support.add(tuple(t))
        elif norm > tol:
            return None
    return JointPVM(
        tuple(members), tuple(by_tuple[t] for t in members), frozenset(support)
    )


def marginals_from_witness(joint: JointPVM, labels, positions: int) -> tuple[PVM, ...]:
    """Rebuild per-position PVMs from a joint witness by summing projectors
    over the tuples fixing each coordinate."""
    labels = tuple(labels)
    if not joint.outcomes:
        raise ValueError("empty witness")
    d = joint.projectors[0].shape[0]
    out = []
    for i in range(positions):
        projs = []
        for y in labels:
            acc = np.zeros((d, d), dtype=complex)
            for t, f in zip(joint.outcomes, joint.projectors):
                if t[i] == y:
                    acc = acc + f
            projs.append(acc)
        out.append(PVM(labels, tuple(projs)))
    return tuple(out)


def deterministic_pvm_tuple(ybar, labels, dim: int) -> tuple[PVM, ...]:
    """PVMs that answer ybar with certainty: identity on each coordinate."""
    labels = tuple(labels)
    eye = np.eye(dim, dtype=complex)
    zero = np.zeros((dim, dim), dtype=complex)
    return tuple(
        PVM(labels, tuple(eye if y == v else zero for y in labels)) for v in ybar
    )


def pvm_tuple_from_classical(
    ybar, y: RelationalStructure, symbol: str, dim: int
) -> tuple[tuple[PVM, ...], JointPVM]:
    """Deterministic member tuple for a relation tuple, with its witness."""
    rel = y.relation(symbol)
    ybar = tuple(ybar)
    if ybar not in rel:
        raise ValueError(f"{ybar} is not in relation {symbol!r}")
    labels = tuple(range(y.domain_size))
    pvms = deterministic_pvm_tuple(ybar, labels, dim)
    eye = np.eye(dim, dtype=complex)
    zero = np.zeros((dim, dim), dtype=complex)
    joint = JointPVM(
        tuple(rel),
        tuple(eye if t == ybar else zero for t in rel),
        frozenset({ybar}),
    )
    return pvms, joint


# ---------------------------------------------------------------------------
# closeness certificates


def alpha_threshold(d: int) -> float:
    """Norm threshold above which commuting PVMs agreeing on a partitioned
    basis must be equal."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return math.sqrt((1.0 + math.sqrt(1.0 - 1.0 / d**2)) / 2.0)


def projection_norm_table(pvm: PVM, basis) -> np.ndarray:
    """Table of ||E_s b_j|| over outcomes s (rows) and basis columns j."""
    basis = np.asarray(basis, dtype=complex)
    return np.array(
        [np.linalg.norm(p @ basis, axis=0) for p in pvm.projectors]
    )


@dataclass(frozen=True)
class EqualityCertificate:
    certified: bool
    alpha: float
    max_difference: float
    joint_trace: float


def close_pvm_equality(
    p: PVM, q: PVM, basis, tau, tol: float = DEFAULT_TOL
) -> EqualityCertificate:
    """Check the closeness certificate for two commuting PVMs.

    ``basis`` holds orthonormal columns; ``tau`` maps outcomes to disjoint
    column index sets covering every column.  The certificate fires when both
    PVMs give every column of tau's class a projection norm above the
    dimension threshold; fired certificates come with equality diagnostics
    (max projector difference, trace of the summed products).
    """
    if p.outcomes != q.outcomes:
        raise ValueError("outcome sets differ")
    d = p.dim
    basis = np.asarray(basis, dtype=complex)
    if basis.shape != (d, d):
        raise ValueError(f"basis must be {d}x{d}")
    if spectral_norm(basis.conj().T @ basis - np.eye(d)) > 100 * tol:
        raise ValueError("basis is not orthonormal within tolerance")
    if commutation_residual(p, q) > 100 * tol:
        raise ValueError("PVMs do not commute within tolerance")
    tau = {s: tuple(ix) for s, ix in tau.items()}
    if any(s not in p.outcomes for s in tau):
        raise ValueError("tau labels outside the outcome set")
    flat = sorted(j for ix in tau.values() for j in ix)
    if flat != list(range(d)):
        raise ValueError("tau must partition the basis columns")

    alpha = alpha_threshold(d)
    npq = projection_norm_table(p, basis), projection_norm_table(q, basis)
    fired = True
    for s, ix in tau.items():
        si = p.outcomes.index(s)
        for j in ix:
            if npq[0][si, j] <= alpha or npq[1][si, j] <= alpha:
                fired = False
    diff = max(
        spectral_norm(a - b) for a, b in zip(p.projectors, q.projectors)
    )
    joint = sum(
        (a @ b for a, b in zip(p.projectors, q.projectors)),
        start=np.zeros((d, d), dtype=complex),
    )
    return EqualityCertificate(fired, alpha, diff, float(np.trace(joint).real))


def find_certifying_partition(p: PVM, q: PVM, basis, alpha: float | None = None):
    """A tau making the closeness certificate fire, or None.

    One exists iff every basis column has some outcome where both PVMs
    project it with norm above the threshold; the least such outcome is used.
    """
    if p.outcomes != q.outcomes:
        raise ValueError("outcome sets differ")
    if alpha is None:
        alpha = alpha_threshold(p.dim)
    np_, nq = projection_norm_table(p, basis), projection_norm_table(q, basis)
    tau: dict = {s: [] for s in p.outcomes}
    for j in range(p.dim):
        chosen = None
        for si, s in enumerate(p.outcomes):
            if np_[si, j] > alpha and nq[si, j] > alpha:
                chosen = s
                break
        if chosen is None:
            return None
        tau[chosen].append(j)
    return {s: tuple(ix) for s, ix in tau.items()}


# ---------------------------------------------------------------------------
# random instances


def random_unitary(d: int, rng) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases


def pvm_from_eigenbasis(basis, assignment, outcomes) -> PVM:
    """PVM whose projectors bundle eigenbasis columns by assigned outcome."""
    basis = np.asarray(basis, dtype=complex)
    d = basis.shape[0]
    projs = []
    for s in outcomes:
        cols = basis[:, [j for j in range(d) if assignment[j] == s]]
        projs.append(cols @ cols.conj().T)
    return PVM(tuple(outcomes), tuple(projs))


def random_pvm(d: int, outcomes, rng) -> PVM:
    outcomes = tuple(outcomes)
    basis = random_unitary(d, rng)
    assignment = [outcomes[i] for i in rng.integers(0, len(outcomes), size=d)]
    return pvm_from_eigenbasis(basis, assignment, outcomes)


def equality_experiment(
    d: int, n_outcomes: int, trials: int, seed: int = 0, tol: float = DEFAULT_TOL
) -> dict:
    """Repeatedly build commuting PVM pairs (equal on even trials, tweaked on
    odd ones) over a shared random eigenbasis and score the certificate."""
    if n_outcomes < 2:
        raise ValueError("need at least two outcomes to build unequal pairs")
    rng = np.random.default_rng(seed)
    outcomes = tuple(range(n_outcomes))
    stats = {
        "trials": trials,
        "equal_certified": 0,
        "unequal_uncertified": 0,
        "false_certifications": 0,
        "missed_equalities": 0,
    }
    for trial in range(trials):
        basis = random_unitary(d, rng)
        assign_p = [outcomes[i] for i in rng.integers(0, n_outcomes, size=d)]
        assign_q = list(assign_p)
        equal = trial % 2 == 0
        if not equal:
            j = int(rng.integers(0, d))
            assign_q[j] = outcomes[(outcomes.index(assign_q[j]) + 1) % n_outcomes]
        p = pvm_from_eigenbasis(basis, assign_p, outcomes)
        q = pvm_from_eigenbasis(basis, assign_q, outcomes)
        tau = find_certifying_partition(p, q, basis)
        if tau is not None:
            cert = close_pvm_equality(p, q, basis, tau, tol)
            assert cert.certified
            if cert.max_difference <= 1000 * tol:
                stats["equal_certified"] += 1
                if not equal:
                    stats["false_certifications"] += 1
            else:
                stats["false_certifications"] += 1
        else:
            stats["unequal_uncertified"] += 1
            if equal:
                stats["missed_equalities"] += 1
    return stats


# ---------------------------------------------------------------------------
# strategies


@dataclass(frozen=True)
class QuantumStrategy:
    """Shared state plus per-question PVMs (Alice over answer tuples, Bob over
    vertices).  The state is a vector of length dim**2, row-major over the
    two dim-dimensional sides."""

    dim: int
    psi: np.ndarray
    alice: dict  # symbol -> {question tuple -> PVM over answer tuples}
    bob: tuple  # vertex -> PVM over target vertices

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=complex).reshape(-1)
        if psi.shape != (self.dim**2,):
            raise ValueError(f"state must have length {self.dim ** 2}")
        object.__setattr__(self, "psi", psi)


def maximally_entangled_state(d: int) -> np.ndarray:
    return (np.eye(d, dtype=complex) / math.sqrt(d)).reshape(-1)


def verify_perfect_quantum(
    x: RelationalStructure, y: RelationalStructure, strategy: QuantumStrategy, tol: float = DEFAULT_TOL
) -> Verdict:
    """Check that every losing outcome has probability at most tol.

    Questions are enumerated as in the classical verifier.  Outcome
    probabilities per question must sum to one within 100*tol (raises
    otherwise); the first losing outcome above tol is reported.
    """
    d = strategy.dim
    psi_mat = strategy.psi.reshape(d, d)
    if abs(np.linalg.norm(strategy.psi) - 1.0) > 100 * tol:
        raise ValueError("state is not normalized")
    for name, _ in x.signature.symbols:
        for xt in x.relation(name):
            try:
                apvm = strategy.alice[name][xt]
            except KeyError as exc:
                raise ValueError(f"missing Alice PVM for {name!r} {xt}") from exc
            if not validate_pvm(apvm, 100 * tol).ok:
                raise ValueError(f"Alice measurement for {name!r} {xt} is not a PVM")
            for v in range(x.domain_size):
                bpvm = strategy.bob[v]
                total = 0.0
                worst = None
                for yt in apvm.outcomes:
                    left = apvm.projector(yt) @ psi_mat
                    for w in bpvm.outcomes:
                        prob = float(
                            np.vdot(psi_mat, left @ bpvm.projector(w).T).real
                        )
                        total += prob
                        losing = None
                        if not y.has_tuple(name, yt):
                            losing = "plausibility"
                        elif any(xi == v and yi != w for xi, yi in zip(xt, yt)):
                            losing = "consistency"
                        if losing and prob > tol and worst is None:
                            worst = Counterexample(name, xt, v, tuple(yt), w, losing)
                if abs(total - 1.0) > 100 * tol:
                    raise ValueError(
                        f"outcome probabilities for {name!r} {xt} / bob {v} sum to {total}"
                    )
                if worst is not None:
                    return Verdict(False, worst)
    return Verdict(True, None)


def deterministic_quantum_strategy(
    mapping, x: RelationalStructure, y: RelationalStructure, dim: int = 2
) -> QuantumStrategy:
    """Deterministic strategy for an arbitrary vertex map: identity projectors
    sit on the mapped answers, the state is maximally entangled.  Perfect
    exactly when the map is a homomorphism."""
    mapping = tuple(mapping)
    labels = tuple(range(y.domain_size))
    alice: dict = {}
    for name, arity in x.signature.symbols:
        table = {}
        for xt in x.relation(name):
            answer = tuple(mapping[v] for v in xt)
            outcomes = tuple(product(labels, repeat=arity))
            table[xt] = PVM(
                outcomes,
                tuple(
                    np.eye(dim, dtype=complex)
                    if t == answer
                    else np.zeros((dim, dim), dtype=complex)
                    for t in outcomes
                ),
            )
        alice[name] = table
    bob = tuple(
        PVM(
            labels,
            tuple(
                np.eye(dim, dtype=complex)
                if w == mapping[v]
                else np.zeros((dim, dim), dtype=complex)
                for w in labels
            ),
        )
        for v in range(x.domain_size)
    )
    return QuantumStrategy(dim, maximally_entangled_state(dim), alice, bob)


def quantum_strategy_from_hom(
    h, x: RelationalStructure, y: RelationalStructure, dim: int = 2
) -> QuantumStrategy:
    """Lift a homomorphism to a perfect quantum strategy on the maximally
    entangled state."""
    from .structures import Homomorphism

    mapping = tuple(h.mapping) if isinstance(h, Homomorphism) else tuple(h)
    if not is_homomorphism(mapping, x, y):
        raise NotAHomomorphismError("map is not a homomorphism")
    return deterministic_quantum_strategy(mapping, x, y, dim)


# ---------------------------------------------------------------------------
# serialization


def _complex_to_json(m: np.ndarray):
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def _complex_from_json(data) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data], dtype=complex)


def pvm_to_json_dict(pvm: PVM) -> dict:
    return {
        "outcomes": [list(o) if isinstance(o, tuple) else o for o in pvm.outcomes],
        "projectors": [_complex_to_json(p) for p in pvm.projectors],
    }


def pvm_from_json_dict(data: dict) -> PVM:
    outcomes = tuple(tuple(o) if isinstance(o, list) else o for o in data["outcomes"])
    return PVM(outcomes, tuple(_complex_from_json(p) for p in data["projectors"]))


def quantum_strategy_to_json_dict(s: QuantumStrategy) -> dict:
    return {
        "dim": s.dim,
        "psi": [[float(v.real), float(v.imag)] for v in s.psi],
        "alice": {
            name: [[list(xt), pvm_to_json_dict(pvm)] for xt, pvm in sorted(table.items())]
            for name, table in s.alice.items()
        },
        "bob": [pvm_to_json_dict(p) for p in s.bob],
    }


def quantum_strategy_from_json_dict(data: dict) -> QuantumStrategy:
    psi = np.array([complex(re, im) for re, im in data["psi"]], dtype=complex)
    alice = {
        name: {tuple(xt): pvm_from_json_dict(p) for xt, p in rows}
        for name, rows in data["alice"].items()
    }
    bob = tuple(pvm_from_json_dict(p) for p in data["bob"])
    return QuantumStrategy(int(data["dim"]), psi, alice, bob)


def quantum_strategy_to_json(s: QuantumStrategy, indent=None) -> str:
    return json.dumps(quantum_strategy_to_json_dict(s), indent=indent)


def quantum_strategy_from_json(text: str) -> QuantumStrategy:
    return quantum_strategy_from_json_dict(json.loads(text))
