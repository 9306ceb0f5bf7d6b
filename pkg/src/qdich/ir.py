"""Circuit and cost-function data model shared by the oracle, compiler, and simulator.

Conventions (fixed across the package and the JSON wire format):
  * qubit indices are 0-based,
  * qubit 0 is the most significant bit of an amplitude index,
  * a PhaseDiag entry d means the diagonal factor exp(-i*pi*d/4),
  * XRot(theta) is exp(-i*theta*X), so XRot(pi/4) is the tilted Hadamard.

All types are immutable after construction; analysis functions are pure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

FORMAT_TAG = "qdich-v1"

GATE_KINDS = {
    "H": 1, "Tdg": 1, "CZ": 2,
    "PhaseDiag1": 1, "PhaseDiag2": 2,
    "XRot": 1,
    "GeneralDiag1": 1, "GeneralDiag2": 2,
}

_PARAM_COUNT = {
    "H": 0, "Tdg": 0, "CZ": 0,
    "PhaseDiag1": 2, "PhaseDiag2": 4,
    "XRot": 1,
    "GeneralDiag1": 2, "GeneralDiag2": 4,
}


@dataclass(frozen=True)
class Gate:
    """One gate application: a kind tag, target qubits, and kind-specific params.

    PhaseDiag params are integer residues mod 8; GeneralDiag params are unit
    complex numbers; XRot carries one angle in radians.
    """

    kind: str
    qubits: tuple[int, ...]
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != GATE_KINDS[self.kind]:
            raise ValueError(f"{self.kind} expects {GATE_KINDS[self.kind]} qubit(s), "
                             f"got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind} qubits must be distinct: {self.qubits}")
        if len(self.params) != _PARAM_COUNT[self.kind]:
            raise ValueError(f"{self.kind} expects {_PARAM_COUNT[self.kind]} param(s)")
        if self.kind.startswith("PhaseDiag"):
            if any(not isinstance(d, int) or not 0 <= d <= 7 for d in self.params):
                raise ValueError(f"PhaseDiag entries must be residues 0..7: {self.params}")

    def is_diagonal(self) -> bool:
        return self.kind in ("Tdg", "CZ", "PhaseDiag1", "PhaseDiag2",
                             "GeneralDiag1", "GeneralDiag2")


def h(q: int) -> Gate:
    return Gate("H", (q,))


def tdg(q: int) -> Gate:
    return Gate("Tdg", (q,))


def cz(q0: int, q1: int) -> Gate:
    return Gate("CZ", (q0, q1))


def phase_diag1(q: int, d0: int, d1: int) -> Gate:
    return Gate("PhaseDiag1", (q,), (d0 % 8, d1 % 8))


def phase_diag2(q0: int, q1: int, entries: tuple[int, int, int, int]) -> Gate:
    return Gate("PhaseDiag2", (q0, q1), tuple(d % 8 for d in entries))


def xrot(q: int, angle: float) -> Gate:
    return Gate("XRot", (q,), (float(angle),))


def general_diag1(q: int, entries: tuple[complex, complex]) -> Gate:
    return Gate("GeneralDiag1", (q,), tuple(complex(e) for e in entries))


def general_diag2(q0: int, q1: int, entries) -> Gate:
    return Gate("GeneralDiag2", (q0, q1), tuple(complex(e) for e in entries))


@dataclass(frozen=True)
class Circuit:
    """Gate list with per-qubit preparation, post-selection register, and wire map.

    ``post_select`` qubits are required to read 0; ``output_map`` sends logical
    wire labels to the physical qubits that carry them at the end.
    """

    n_qubits: int
    prep: tuple[str, ...]
    gates: tuple[Gate, ...]
    post_select: frozenset[int] = frozenset()
    output_map: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.output_map:
            # default: every non-post-selected qubit is its own output wire
            object.__setattr__(self, "output_map", {
                q: q for q in range(self.n_qubits) if q not in self.post_select})

    @classmethod
    def build(cls, n_qubits: int, gates, prep: str | tuple = "zero",
              post_select=(), output_map: dict[int, int] | None = None) -> Circuit:
        if isinstance(prep, str):
            prep = (prep,) * n_qubits
        return cls(n_qubits, tuple(prep), tuple(gates),
                   frozenset(post_select), dict(output_map) if output_map else {})

    def output_wires(self) -> list[int]:
        return sorted(self.output_map)


def validate(circuit: Circuit) -> list[str]:
    """Return the list of invariant violations (empty iff the circuit is well formed).

    The post-selection timing rule: once a post-selected qubit has seen its last
    basis-changing gate (H or XRot, the gadget's completion gate), nothing else
    may touch it, otherwise conditioning at the end is not equivalent to the
    mid-circuit projection the construction performs.
    """
    v: list[str] = []
    n = circuit.n_qubits
    if n <= 0:
        v.append("n_qubits must be positive")
    if len(circuit.prep) != n:
        v.append(f"prep has {len(circuit.prep)} entries for {n} qubits")
    for p in circuit.prep:
        if p not in ("zero", "plus"):
            v.append(f"unknown preparation {p!r}")
            break
    for i, g in enumerate(circuit.gates):
        for q in g.qubits:
            if not 0 <= q < n:
                v.append(f"gate {i} ({g.kind}) touches out-of-range qubit {q}")
        if g.kind.startswith("GeneralDiag"):
            for e in g.params:
                if abs(abs(e) - 1.0) > 1e-9:
                    v.append(f"gate {i} ({g.kind}) has non-unit entry {e}")
                    break
    for q in circuit.post_select:
        if not 0 <= q < n:
            v.append(f"post_select qubit {q} out of range")
    last_basis_change: dict[int, int] = {}
    for i, g in enumerate(circuit.gates):
        if g.kind in ("H", "XRot"):
            last_basis_change[g.qubits[0]] = i
    for q in sorted(circuit.post_select):
        if q in last_basis_change:
            for i in range(last_basis_change[q] + 1, len(circuit.gates)):
                if q in circuit.gates[i].qubits:
                    v.append(f"gate {i} acts on post-selected qubit {q} "
                             "after its projection point")
    seen_targets = set()
    for wire, q in circuit.output_map.items():
        if not 0 <= q < n:
            v.append(f"output wire {wire} maps to out-of-range qubit {q}")
        if q in circuit.post_select:
            v.append(f"output wire {wire} maps to post-selected qubit {q}")
        if q in seen_targets:
            v.append(f"output_map is not injective at qubit {q}")
        seen_targets.add(q)
    return v


@dataclass(frozen=True)
class Term:
    """One cost term on 1 or 2 variables; table indexed by the support's bits.

    For support (u, v) the table order is (00, 01, 10, 11) with u the first bit.
    """

    support: tuple[int, ...]
    table: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(self.support))
        object.__setattr__(self, "table", tuple(self.table))
        if len(self.support) not in (1, 2):
            raise ValueError("term support must have 1 or 2 variables")
        if len(set(self.support)) != len(self.support):
            raise ValueError("term support variables must be distinct")
        if len(self.table) != 2 ** len(self.support):
            raise ValueError("table length must be 2^|support|")

    def value(self, bits: tuple[int, ...]) -> float:
        idx = 0
        for b in bits:
            idx = (idx << 1) | b
        return self.table[idx]

    def depends_on(self) -> tuple[bool, ...]:
        """Per support variable: does flipping that bit ever change the value."""
        if len(self.support) == 1:
            return (self.table[0] != self.table[1],)
        t = self.table
        first = t[0] != t[2] or t[1] != t[3]
        second = t[0] != t[1] or t[2] != t[3]
        return (first, second)


@dataclass(frozen=True)
class CostFunction:
    n_vars: int
    terms: tuple[Term, ...]
    integer_valued: bool = False

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            for s in t.support:
                if not 0 <= s < self.n_vars:
                    raise ValueError(f"term variable {s} out of range")
            if self.integer_valued and any(v != int(v) for v in t.table):
                raise ValueError("integer_valued cost has a non-integer table entry")

    def value(self, assignment) -> float:
        total = 0.0
        for t in self.terms:
            total += t.value(tuple(assignment[s] for s in t.support))
        return total


@dataclass(frozen=True)
class InteractionGraph:
    """Simple graph of nontrivial pairwise couplings (Definition: an edge is
    present iff some single term depends on both endpoint variables)."""

    n: int
    edges: frozenset[tuple[int, int]]

    @property
    def max_degree(self) -> int:
        deg = self.degrees()
        return max(deg.values()) if deg else 0

    def degrees(self) -> dict[int, int]:
        deg = {v: 0 for v in range(self.n)}
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def neighbors(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in range(self.n)}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj


def interaction_graph(cost: CostFunction) -> InteractionGraph:
    """Edge {u, v} iff some 2-variable term on {u, v} depends nontrivially on both."""
    edges = set()
    for t in cost.terms:
        if len(t.support) == 2 and all(t.depends_on()):
            u, v = t.support
            edges.add((min(u, v), max(u, v)))
    return InteractionGraph(cost.n_vars, frozenset(edges))


@dataclass(frozen=True)
class QaoaInstance:
    """Depth-p QAOA data: cost phases e^{-i*gamma_k*C} alternating with the
    fixed transverse mixer e^{-i*beta_k*sum_j X_j} on the |+>^n start state."""

    n: int
    p: int
    cost: CostFunction
    gammas: tuple[float, ...]
    betas: tuple[float, ...]
    post_select: frozenset[int] = frozenset()
    output_map: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if self.cost.n_vars != self.n:
            raise ValueError("cost.n_vars must equal the qubit count")
        if len(self.gammas) != self.p or len(self.betas) != self.p:
            raise ValueError("gamma/beta lists must have length exactly p")
        if not self.output_map:
            object.__setattr__(self, "output_map", {
                q: q for q in range(self.n) if q not in self.post_select})


def _pi4_multiple(angle: float) -> int | None:
    m = round(angle / (math.pi / 4))
    if abs(angle - m * (math.pi / 4)) <= 1e-12:
        return m
    return None


def qaoa_to_circuit(instance: QaoaInstance) -> Circuit:
    """Expand the instance into commuting diagonal gates plus mixer rotations.

    Layer k emits one diagonal gate per term with entries e^{-i*gamma_k*table},
    then XRot(beta_k) on every qubit.  When the cost is integer valued and
    gamma_k is an integer multiple of pi/4 the diagonal entries are eighth
    roots of unity and are emitted as exact PhaseDiag gates.
    """
    gates: list[Gate] = []
    for k in range(instance.p):
        gamma = instance.gammas[k]
        m = _pi4_multiple(gamma) if instance.cost.integer_valued else None
        for t in instance.cost.terms:
            if m is not None:
                residues = tuple((m * int(v)) % 8 for v in t.table)
                if len(t.support) == 1:
                    gates.append(phase_diag1(t.support[0], *residues))
                else:
                    gates.append(phase_diag2(*t.support, residues))
            else:
                entries = tuple(complex(math.cos(gamma * v), -math.sin(gamma * v))
                                for v in t.table)
                if len(t.support) == 1:
                    gates.append(general_diag1(t.support[0], entries))
                else:
                    gates.append(general_diag2(*t.support, entries))
        beta = instance.betas[k]
        for q in range(instance.n):
            gates.append(xrot(q, beta))
    return Circuit(instance.n, ("plus",) * instance.n, tuple(gates),
                   instance.post_select, dict(instance.output_map))


# ---------------------------------------------------------------------------
# JSON wire formats (versioned with "format": "qdich-v1")
# ---------------------------------------------------------------------------

def _gate_to_json(g: Gate) -> dict:
    if g.kind.startswith("GeneralDiag"):
        params = [[e.real, e.imag] for e in g.params]
    else:
        params = list(g.params)
    return {"kind": g.kind, "qubits": list(g.qubits), "params": params}


def _gate_from_json(d: dict) -> Gate:
    kind = d["kind"]
    qubits = tuple(d["qubits"])
    raw = d.get("params", [])
    if kind.startswith("GeneralDiag"):
        params = tuple(complex(re, im) for re, im in raw)
    elif kind.startswith("PhaseDiag"):
        params = tuple(int(x) for x in raw)
    elif kind == "XRot":
        params = (float(raw[0]),)
    else:
        params = ()
    return Gate(kind, qubits, params)


def circuit_to_json(circuit: Circuit) -> dict:
    return {
        "format": FORMAT_TAG,
        "n": circuit.n_qubits,
        "prep": list(circuit.prep),
        "gates": [_gate_to_json(g) for g in circuit.gates],
        "post_select": sorted(circuit.post_select),
        "output_map": {str(w): q for w, q in sorted(circuit.output_map.items())},
    }


def circuit_from_json(d: dict) -> Circuit:
    _check_format(d)
    n = int(d["n"])
    prep = tuple(d.get("prep", ["zero"] * n))
    gates = tuple(_gate_from_json(g) for g in d.get("gates", []))
    post = frozenset(int(q) for q in d.get("post_select", []))
    omap = {int(w): int(q) for w, q in d.get("output_map", {}).items()}
    return Circuit(n, prep, gates, post, omap)


def instance_to_json(instance: QaoaInstance) -> dict:
    return {
        "format": FORMAT_TAG,
        "n": instance.n,
        "p": instance.p,
        "terms": [{"support": list(t.support), "table": list(t.table)}
                  for t in instance.cost.terms],
        "gammas": list(instance.gammas),
        "betas": list(instance.betas),
        "post_select": sorted(instance.post_select),
        "output_map": {str(w): q for w, q in sorted(instance.output_map.items())},
    }


def instance_from_json(d: dict) -> QaoaInstance:
    _check_format(d)
    n = int(d["n"])
    terms = tuple(Term(tuple(t["support"]), tuple(t["table"])) for t in d.get("terms", []))
    integer_valued = all(v == int(v) for t in terms for v in t.table)
    cost = CostFunction(n, terms, integer_valued)
    post = frozenset(int(q) for q in d.get("post_select", []))
    omap = {int(w): int(q) for w, q in d.get("output_map", {}).items()}
    return QaoaInstance(n, int(d["p"]), cost, tuple(d.get("gammas", ())),
                        tuple(d.get("betas", ())), post, omap)


def _check_format(d: dict) -> None:
    tag = d.get("format")
    if tag != FORMAT_TAG:
        raise ValueError(f"unsupported format tag {tag!r} (expected {FORMAT_TAG!r})")


def load_json(path: str) -> dict:
    with open(path) as f:
        return json.load(f)


def dump_json(obj: dict, path: str) -> None:
    with open(path, "w") as f:
        json.dump(obj, f, indent=2)
        f.write("\n")
