"""Compilation of {H, Tdg, CZ} circuits into post-selected depth-1 QAOA.

Pipeline: preprocess (every wire starts in |+>, at most one diagonal gate
between consecutive Hadamards, wire ends with a single XRot(pi/4)), then
replace each remaining Hadamard by a diagonal coupling to a fresh |+>
auxiliary followed by XRot(pi/4) and post-selection of the old wire on 0,
then collect all diagonal phases into one integer cost with
gamma = beta = pi/4.  The result has interaction degree at most 3 and the
same post-selected output distribution as the source, exactly.

Compilation is pure and deterministic: identical inputs give identical gate
ordering and auxiliary numbering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

from .cyclotomic import Cyclotomic, from_sqrt2_pair
from .ir import (Circuit, CostFunction, Gate, QaoaInstance, Term, h,
                 phase_diag1, phase_diag2, xrot)

PI4 = math.pi / 4

# the coupling that completes F = XRot(pi/4): W = diag(1, i, 1, -i)
COUPLING_ENTRIES = (0, 6, 0, 2)
# the IQP coupling completing F = H: W = CZ
IQP_COUPLING_ENTRIES = (0, 0, 0, 4)
# endpoint 1-local diagonal from decomposing the inverse tilted Hadamard
ENDPOINT_ENTRIES = (7, 1)


class UnsupportedGate(Exception):
    pass


class InvariantViolated(Exception):
    pass


class NonDiagonalResidue(Exception):
    pass


class NotIntegerValued(Exception):
    pass


class ZeroMatrixElement(Exception):
    pass


class NoUnitaryW(Exception):
    pass


# ---------------------------------------------------------------------------
# Gadget solving (the diagonal coupling W completing a single-qubit gate F)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GadgetSpec:
    """Solution of w_ab * r_b = lambda * (-1)^(ab) with r_b = <0|F|b>.

    Entries are Cyclotomic on the exact path, complex otherwise; `w` is the
    diagonal of the two-qubit coupling in (00, 01, 10, 11) order.
    """

    f: tuple
    r0: object
    r1: object
    lam: object
    w: tuple
    exact: bool

    def w_complex(self) -> tuple[complex, ...]:
        return tuple(x.to_complex() if isinstance(x, Cyclotomic) else complex(x)
                     for x in self.w)


def _fraction_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    pn, pd = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if pn * pn == x.numerator and pd * pd == x.denominator:
        return Fraction(pn, pd)
    return None


def _sqrt_in_real_subfield(a: Fraction, b: Fraction) -> tuple[Fraction, Fraction] | None:
    """Positive (c, d) with (c + d*sqrt2)^2 = a + b*sqrt2, if one exists in Q(sqrt2)."""
    candidates = []
    if b == 0:
        c = _fraction_sqrt(a)
        if c is not None:
            candidates.append((c, Fraction(0)))
        d = _fraction_sqrt(a / 2)
        if d is not None:
            candidates.append((Fraction(0), d))
    else:
        disc = _fraction_sqrt(a * a - 2 * b * b)
        if disc is not None:
            for t in ((a + disc) / 2, (a - disc) / 2):
                c = _fraction_sqrt(t)
                if c:
                    d = b / (2 * c)
                    if c * c + 2 * d * d == a:
                        candidates.append((c, d))
    for c, d in candidates:
        if float(c) + float(d) * math.sqrt(2) > 0:
            return (c, d)
        if float(-c) + float(-d) * math.sqrt(2) > 0:
            return (-c, -d)
    return None


def _pi4_multiple(angle: float) -> int | None:
    m = round(angle / PI4)
    if abs(angle - m * PI4) <= 1e-12:
        return m
    return None


def gadget_solve(f_matrix, lambda_phase: float = 0.0) -> GadgetSpec:
    """Solve for the diagonal coupling W with V = lambda*H, |lambda| = |r0|.

    Raises ZeroMatrixElement when r0*r1 = 0 and NoUnitaryW when |r0| != |r1|
    (exactly for Cyclotomic entries, within 1e-12 on floats).  The default
    lambda_phase 0 makes lambda real positive, so solutions are reproducible
    bit for bit.
    """
    rows = tuple(tuple(row) for row in f_matrix)
    exact = all(isinstance(e, Cyclotomic) for row in rows for e in row)
    if exact:
        spec = _gadget_solve_exact(rows, lambda_phase)
        if spec is not None:
            return spec
        rows = tuple(tuple(e.to_complex() for e in row) for row in rows)
    return _gadget_solve_float(rows, lambda_phase)


def _gadget_solve_exact(rows, lambda_phase: float) -> GadgetSpec | None:
    r0, r1 = rows[0]
    if r0.is_zero() or r1.is_zero():
        raise ZeroMatrixElement("first-row element of F vanishes")
    m0 = r0 * r0.conjugate()
    m1 = r1 * r1.conjugate()
    if m0 != m1:
        raise NoUnitaryW("|r0| != |r1|, no unitary diagonal W exists")
    k = _pi4_multiple(lambda_phase)
    if k is None:
        return None  # phase leaves the field; fall back to floats
    root = _sqrt_in_real_subfield(m0.c0, m0.c1)
    if root is None:
        return None  # |r0| itself is not in Q(sqrt2)
    c, d = root
    norm = c * c - 2 * d * d
    inv_abs = from_sqrt2_pair(c / norm, -d / norm)
    phase = Cyclotomic.root_power(k)
    lam = from_sqrt2_pair(c, d) * phase
    w = tuple(
        (phase * rb.conjugate() * inv_abs if not (a and b)
         else -(phase * rb.conjugate() * inv_abs))
        for a in (0, 1) for b, rb in ((0, r0), (1, r1)))
    return GadgetSpec(rows, r0, r1, lam, w, exact=True)


def _gadget_solve_float(rows, lambda_phase: float) -> GadgetSpec:
    r0, r1 = complex(rows[0][0]), complex(rows[0][1])
    if abs(r0) < 1e-15 or abs(r1) < 1e-15:
        raise ZeroMatrixElement("first-row element of F vanishes")
    if abs(abs(r0) - abs(r1)) > 1e-12:
        raise NoUnitaryW(f"|r0| = {abs(r0)} differs from |r1| = {abs(r1)}")
    lam = abs(r0) * complex(math.cos(lambda_phase), math.sin(lambda_phase))
    w = tuple(lam * (-1) ** (a * b) / rb
              for a in (0, 1) for b, rb in ((0, r0), (1, r1)))
    return GadgetSpec(rows, r0, r1, lam, w, exact=False)


def named_gate_matrix(name: str):
    """Small library of completion gates for the CLI and tests."""
    s = Cyclotomic(0, Fraction(1, 2), 0, Fraction(-1, 2))  # 1/sqrt(2)
    if name == "H":
        return ((s, s), (s, -s))
    if name == "Htilde":
        mi = s * Cyclotomic.root_power(6)  # -i/sqrt(2)
        return ((s, mi), (mi, s))
    if name == "Tdg":
        one = Cyclotomic(1)
        return ((one, Cyclotomic(0)), (Cyclotomic(0), Cyclotomic.root_power(7)))
    if name.lower().startswith("xrot:"):
        return xrot_matrix(float(name.split(":", 1)[1]))
    raise ValueError(f"unknown gate name {name!r}")


def xrot_matrix(angle: float):
    c, ms = math.cos(angle), -1j * math.sin(angle)
    return ((c, ms), (ms, c))


# ---------------------------------------------------------------------------
# Preprocessing
# ---------------------------------------------------------------------------

_SOURCE_KINDS = {"H", "Tdg", "CZ"}


def _check_source(circuit: Circuit) -> None:
    if circuit.post_select:
        raise ValueError("compilation input must not be post-selected")
    for g in circuit.gates:
        if g.kind not in _SOURCE_KINDS:
            raise UnsupportedGate(f"source circuits use H, Tdg, CZ only, got {g.kind}")


def preprocess(circuit: Circuit, endpoint: str = "qaoa") -> Circuit:
    """Rewrite so every wire starts in |+> and consecutive diagonal gates are
    separated by inserted H*H.

    With the default "qaoa" endpoint each wire closes with the identity
    H * PhaseDiag1(7,1) * H * XRot(pi/4) (the inverse tilted Hadamard times the
    mixer rotation).  With "iqp" a wire ends in a plain Hadamard instead, the
    future second Hadamard wall.
    """
    _check_source(circuit)
    n = circuit.n_qubits
    first_gate: dict[int, int] = {}
    for i, g in enumerate(circuit.gates):
        for q in g.qubits:
            first_gate.setdefault(q, i)

    absorbed: set[int] = set()
    out: list[Gate] = []
    last_kind: dict[int, str | None] = {q: None for q in range(n)}
    for q in range(n):
        if circuit.prep[q] == "plus":
            continue
        i = first_gate.get(q)
        if i is not None and circuit.gates[i].kind == "H":
            absorbed.add(i)  # |+> = H|0>
        else:
            out.append(h(q))  # prepend H*H, absorb the first H into the prep
            last_kind[q] = "H"

    diag_count = {q: 0 for q in range(n)}
    for i, g in enumerate(circuit.gates):
        if i in absorbed:
            continue
        if g.kind == "H":
            out.append(g)
            diag_count[g.qubits[0]] = 0
            last_kind[g.qubits[0]] = "H"
            continue
        # diagonal: CZ counts against both wires
        for q in g.qubits:
            if diag_count[q]:
                out.append(h(q))
                out.append(h(q))
                diag_count[q] = 0
                last_kind[q] = "H"
        out.append(g)
        for q in g.qubits:
            diag_count[q] += 1
            last_kind[q] = "diag"

    for q in range(n):
        if endpoint == "qaoa":
            out.append(h(q))
            out.append(phase_diag1(q, *ENDPOINT_ENTRIES))
            out.append(h(q))
            out.append(xrot(q, PI4))
        elif endpoint == "iqp":
            if last_kind[q] != "H":
                out.append(h(q))
                out.append(h(q))
        else:
            raise ValueError(f"unknown endpoint style {endpoint!r}")
    return Circuit(n, ("plus",) * n, tuple(out), frozenset(), dict(circuit.output_map))


# ---------------------------------------------------------------------------
# Hadamard substitution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WireChain:
    """Per logical wire, the ordered physical qubits the wire occupies; each
    consecutive pair is linked by exactly one coupling gate."""

    chains: dict[int, tuple[int, ...]]

    def couplings(self, wire: int) -> list[tuple[int, int]]:
        c = self.chains[wire]
        return list(zip(c[1:], c[:-1]))


_DIAG_CONVERT = {"Tdg", "CZ", "PhaseDiag1", "PhaseDiag2"}


def _substitute(circuit: Circuit, iqp: bool) -> tuple[Circuit, WireChain]:
    n = circuit.n_qubits
    if any(p != "plus" for p in circuit.prep):
        raise InvariantViolated("substitution requires every wire prepared in |+>")
    cursor = {q: q for q in range(n)}
    chains = {q: [q] for q in range(n)}
    diag_count = {q: 0 for q in range(n)}
    out: list[Gate] = []
    post: set[int] = set()
    next_aux = n

    wall_index: dict[int, int] = {}
    if iqp:
        for i, g in enumerate(circuit.gates):
            for q in g.qubits:
                wall_index[q] = i
        for q, i in wall_index.items():
            if circuit.gates[i].kind != "H":
                raise InvariantViolated(f"wire {q} does not end with a Hadamard wall")

    for i, g in enumerate(circuit.gates):
        if g.kind == "H":
            q = g.qubits[0]
            if iqp and wall_index.get(q) == i:
                continue  # final Hadamard wall, emitted globally below
            j = cursor[q]
            a = next_aux
            next_aux += 1
            entries = IQP_COUPLING_ENTRIES if iqp else COUPLING_ENTRIES
            out.append(phase_diag2(a, j, entries))
            if not iqp:
                out.append(xrot(j, PI4))
            post.add(j)
            cursor[q] = a
            chains[q].append(a)
            diag_count[q] = 0
        elif g.kind in _DIAG_CONVERT:
            for q in g.qubits:
                if diag_count[q]:
                    raise InvariantViolated(
                        f"two diagonal gates meet on wire {q} without a separating H")
                diag_count[q] += 1
            mapped = tuple(cursor[q] for q in g.qubits)
            if g.kind == "Tdg":
                out.append(phase_diag1(mapped[0], 0, 1))
            elif g.kind == "CZ":
                out.append(phase_diag2(*mapped, (0, 0, 0, 4)))
            elif g.kind == "PhaseDiag1":
                out.append(phase_diag1(mapped[0], *g.params))
            else:
                out.append(phase_diag2(*mapped, g.params))
        elif g.kind == "XRot":
            if iqp:
                raise UnsupportedGate("XRot has no place in the IQP specialization")
            out.append(xrot(cursor[g.qubits[0]], g.params[0]))
        else:
            raise UnsupportedGate(f"cannot substitute through {g.kind}")

    if iqp:
        for q in range(next_aux):
            out.append(h(q))
    output_map = {w: cursor[q] for w, q in circuit.output_map.items()}
    compiled = Circuit(next_aux, ("plus",) * next_aux, tuple(out),
                       frozenset(post), output_map)
    return compiled, WireChain({q: tuple(c) for q, c in chains.items()})


def hadamard_substitute(preprocessed: Circuit) -> tuple[Circuit, WireChain]:
    """Replace each Hadamard by the diagonal coupling gadget, relocating the
    wire to the fresh auxiliary and post-selecting the old qubit on 0."""
    return _substitute(preprocessed, iqp=False)


# ---------------------------------------------------------------------------
# Phase collection
# ---------------------------------------------------------------------------

def collect_phases(substituted: Circuit) -> QaoaInstance:
    """Merge all diagonal gates into one integer cost; the per-qubit trailing
    XRot(pi/4) rotations become the beta = pi/4 mixer layer."""
    n = substituted.n_qubits
    terms: list[Term] = []
    xrot_at: dict[int, int] = {}
    last_at: dict[int, int] = {}
    for i, g in enumerate(substituted.gates):
        for q in g.qubits:
            last_at[q] = i
        if g.kind == "PhaseDiag1":
            terms.append(Term(g.qubits, g.params))
        elif g.kind == "PhaseDiag2":
            terms.append(Term(g.qubits, g.params))
        elif g.kind == "XRot":
            if _pi4_multiple(g.params[0]) != 1:
                raise NonDiagonalResidue(
                    f"mixer rotation angle {g.params[0]} is not pi/4")
            q = g.qubits[0]
            if q in xrot_at:
                raise NonDiagonalResidue(f"qubit {q} has more than one mixer rotation")
            xrot_at[q] = i
        else:
            raise NonDiagonalResidue(f"{g.kind} gate left before the mixer layer")
    for q in range(n):
        if q not in xrot_at:
            raise NonDiagonalResidue(f"qubit {q} is missing its trailing XRot(pi/4)")
        if xrot_at[q] != last_at[q]:
            raise NonDiagonalResidue(f"qubit {q} is touched after its mixer rotation")
    cost = CostFunction(n, tuple(terms), integer_valued=True)
    return QaoaInstance(n, 1, cost, (PI4,), (PI4,),
                        substituted.post_select, dict(substituted.output_map))


# ---------------------------------------------------------------------------
# Full pipelines
# ---------------------------------------------------------------------------

def compile_circuit(circuit: Circuit, monotone: bool = False) -> QaoaInstance:
    """Compile a {H, Tdg, CZ} circuit to post-selected depth-1 QAOA with
    gamma = beta = pi/4, interaction degree <= 3, and exactly the source's
    post-selected output distribution."""
    pre = preprocess(circuit)
    substituted, _ = _substitute(pre, iqp=False)
    instance = collect_phases(substituted)
    if monotone:
        instance = replace(instance, cost=make_monotone(instance.cost))
    return instance


@dataclass(frozen=True)
class IqpProgram:
    """H-wall form: prep |+>^n, diagonal phases of `cost`, then H on every
    qubit; measured with `post_select` required to read 0."""

    n: int
    cost: CostFunction
    post_select: frozenset[int]
    output_map: dict[int, int]

    def to_circuit(self) -> Circuit:
        gates: list[Gate] = []
        for t in self.cost.terms:
            entries = tuple(int(v) % 8 for v in t.table)
            if len(t.support) == 1:
                gates.append(phase_diag1(t.support[0], *entries))
            else:
                gates.append(phase_diag2(*t.support, entries))
        gates.extend(h(q) for q in range(self.n))
        return Circuit(self.n, ("plus",) * self.n, tuple(gates),
                       self.post_select, dict(self.output_map))


def compile_iqp(circuit: Circuit) -> IqpProgram:
    """Corollary specialization with completion F = H and coupling W = CZ;
    the final Hadamard layer plays the role of the second wall."""
    pre = preprocess(circuit, endpoint="iqp")
    substituted, _ = _substitute(pre, iqp=True)
    terms = []
    for g in substituted.gates:
        if g.kind == "PhaseDiag1":
            terms.append(Term(g.qubits, g.params))
        elif g.kind == "PhaseDiag2":
            terms.append(Term(g.qubits, g.params))
        elif g.kind != "H":
            raise NonDiagonalResidue(f"unexpected {g.kind} in the IQP form")
    cost = CostFunction(substituted.n_qubits, tuple(terms), integer_valued=True)
    return IqpProgram(substituted.n_qubits, cost, substituted.post_select,
                      dict(substituted.output_map))


# ---------------------------------------------------------------------------
# Monotone rewrite
# ---------------------------------------------------------------------------

def make_monotone(cost: CostFunction) -> CostFunction:
    """Shift table entries by multiples of 8 until every entry dominates the
    entries of assignments with fewer ones, leaving e^{-i*pi*C/4} untouched.

    Reproduces the coupling shift (0,6,0,2) -> (0,6,0,10) and the endpoint
    shift (7,1) -> (7,9); terms that are already monotone are unchanged.
    """
    if not cost.integer_valued:
        raise NotIntegerValued("monotone rewrite needs integer tables")
    new_terms = []
    for t in cost.terms:
        k = len(t.support)
        table = [int(v) % 8 for v in t.table]
        order = sorted(range(2 ** k), key=lambda v: (bin(v).count("1"), v))
        shifted = [0] * (2 ** k)
        for v in order:
            floor = max((shifted[u] for u in range(2 ** k)
                         if u != v and (u & v) == u), default=0)
            val = table[v]
            while val < floor:
                val += 8
            shifted[v] = val
        new_terms.append(Term(t.support, tuple(shifted)))
    return CostFunction(cost.n_vars, tuple(new_terms), integer_valued=True)
