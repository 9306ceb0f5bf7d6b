"""Brute-force statevector oracle with an exact Q(w) backend and a float backend.

The exact backend stores each amplitude as four integers (coefficients over the
basis 1, w, w^2, w^3) plus one shared power-of-1/sqrt(2) exponent, so Hadamard
and pi/4 X-rotations stay integer-valued.  Squared moduli live in Z[sqrt(2)],
which makes post-selected output distributions exactly comparable.

Each simulate() call owns its state; there is no shared mutable state, so
independent simulations may run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cyclotomic import Cyclotomic, from_sqrt2_pair
from .ir import Circuit

MAX_QUBITS = 24

# float-backend treats post-selection mass below this as zero; the exact
# backend exists for definitive answers
FLOAT_ZERO_CUTOFF = 1e-12


class TooManyQubits(Exception):
    pass


class ExactBackendUnsupportedGate(Exception):
    pass


class ZeroPostSelectionProbability(Exception):
    pass


def _omega_complex(k: int) -> complex:
    return complex(math.cos(k * math.pi / 4), math.sin(k * math.pi / 4))


def _rot8(block, k: int):
    """Multiply a (..., 4) integer coefficient block by w^k."""
    k %= 8
    if k == 0:
        return block
    out = np.empty_like(block)
    for j in range(4):
        m = (j - k) % 4
        sign = -1 if (m + k) % 8 >= 4 else 1
        out[..., j] = sign * block[..., m]
    return out


def _pi4_multiple(angle: float) -> int | None:
    m = round(angle / (math.pi / 4))
    if abs(angle - m * (math.pi / 4)) <= 1e-12:
        return m
    return None


class StateVector:
    """Dense amplitudes of an n-qubit state (n <= 24), exact or float backend.

    Qubit 0 is the most significant bit of an amplitude index.  Exact
    amplitudes carry a shared normalization: the physical amplitude is
    coeffs * (1/sqrt(2))**sqrt2_exp.
    """

    def __init__(self, n_qubits: int, backend: str, array, sqrt2_exp: int = 0,
                 coeff_bound: int = 1):
        self.n_qubits = n_qubits
        self.backend = backend
        self.array = array
        self.sqrt2_exp = sqrt2_exp
        self._coeff_bound = coeff_bound

    # -- exact-backend views --------------------------------------------

    def exact_amplitude(self, bits: tuple[int, ...]) -> Cyclotomic:
        """Amplitude of one basis state with the 1/sqrt(2) exponent folded in."""
        if self.backend != "exact":
            raise ValueError("exact_amplitude requires the exact backend")
        c = self.array[tuple(bits)]
        value = Cyclotomic(int(c[0]), int(c[1]), int(c[2]), int(c[3]))
        half = Fraction(1, 2 ** ((self.sqrt2_exp + 1) // 2))
        scaled = value * Cyclotomic(half)
        if self.sqrt2_exp % 2:
            scaled = scaled * Cyclotomic(0, 1, 0, -1)  # leftover sqrt(2)/2 * 2 = sqrt2
        return scaled

    def to_complex_array(self) -> np.ndarray:
        if self.backend == "float":
            return self.array.reshape(-1).copy()
        flat = self.array.reshape(-1, 4)
        omegas = np.array([_omega_complex(k) for k in range(4)])
        vals = flat.astype(float) @ omegas
        return vals * (1 / math.sqrt(2)) ** self.sqrt2_exp

    def probability_grids(self):
        """Per-amplitude squared moduli.

        Float backend: one real grid.  Exact backend: integer grids (r0, r1)
        with |amp|^2 = (r0 + r1*sqrt(2)) / 2**sqrt2_exp.
        """
        if self.backend == "float":
            return (np.abs(self.array) ** 2,)
        a = self.array
        if self._coeff_bound > 2 ** 30 or self.sqrt2_exp > 60:
            a = a.astype(object)
        c0, c1, c2, c3 = (a[..., i] for i in range(4))
        r0 = c0 * c0 + c1 * c1 + c2 * c2 + c3 * c3
        r1 = c0 * c1 - c0 * c3 + c1 * c2 + c2 * c3
        return (r0, r1)

    def check_norm(self) -> None:
        if self.backend == "float":
            total = float(np.sum(np.abs(self.array) ** 2))
            if abs(total - 1.0) > 1e-10:
                raise RuntimeError(f"float norm drifted to {total}")
        else:
            r0, r1 = self.probability_grids()
            if int(np.sum(r0)) != 2 ** self.sqrt2_exp or int(np.sum(r1)) != 0:
                raise RuntimeError("exact norm invariant violated")


def _prepare(circuit: Circuit, backend: str) -> StateVector:
    n = circuit.n_qubits
    if backend == "float":
        amps = np.zeros((2,) * n, dtype=complex)
        idx = tuple(slice(None) if p == "plus" else 0 for p in circuit.prep)
        n_plus = sum(p == "plus" for p in circuit.prep)
        amps[idx] = (1 / math.sqrt(2)) ** n_plus
        return StateVector(n, "float", amps)
    coeffs = np.zeros((2,) * n + (4,), dtype=np.int64)
    idx = tuple(slice(None) if p == "plus" else 0 for p in circuit.prep) + (0,)
    coeffs[idx] = 1
    n_plus = sum(p == "plus" for p in circuit.prep)
    return StateVector(n, "exact", coeffs, sqrt2_exp=n_plus)


def _slice(n: int, assignments: dict[int, int], extra_axis: bool = False):
    idx = [slice(None)] * n
    for q, b in assignments.items():
        idx[q] = b
    if extra_axis:
        idx.append(slice(None))
    return tuple(idx)


def _apply_exact(state: StateVector, gate) -> None:
    n = state.n_qubits
    a = state.array
    kind = gate.kind
    if kind == "H":
        q = gate.qubits[0]
        a0 = a[_slice(n, {q: 0}, True)].copy()
        a1 = a[_slice(n, {q: 1}, True)]
        a[_slice(n, {q: 0}, True)] = a0 + a1
        a[_slice(n, {q: 1}, True)] = a0 - a1
        state.sqrt2_exp += 1
        state._coeff_bound *= 2
    elif kind == "Tdg":
        q = gate.qubits[0]
        ix = _slice(n, {q: 1}, True)
        a[ix] = _rot8(a[ix], 7)
    elif kind == "CZ":
        q0, q1 = gate.qubits
        ix = _slice(n, {q0: 1, q1: 1}, True)
        a[ix] = -a[ix]
    elif kind == "PhaseDiag1":
        q = gate.qubits[0]
        for b, d in enumerate(gate.params):
            if d % 8:
                ix = _slice(n, {q: b}, True)
                a[ix] = _rot8(a[ix], -d)
    elif kind == "PhaseDiag2":
        q0, q1 = gate.qubits
        for v, d in enumerate(gate.params):
            if d % 8:
                ix = _slice(n, {q0: v >> 1, q1: v & 1}, True)
                a[ix] = _rot8(a[ix], -d)
    elif kind == "XRot":
        m = _pi4_multiple(gate.params[0])
        if m is None:
            raise ExactBackendUnsupportedGate(
                f"XRot angle {gate.params[0]} is not a multiple of pi/4")
        m %= 8
        q = gate.qubits[0]
        ix0, ix1 = _slice(n, {q: 0}, True), _slice(n, {q: 1}, True)
        if m == 0:
            pass
        elif m == 4:
            a[ix0] = -a[ix0]
            a[ix1] = -a[ix1]
        elif m in (2, 6):
            # cos = 0: pure (-/+ i) * X
            rot = 6 if m == 2 else 2
            a0 = a[ix0].copy()
            a[ix0] = _rot8(a[ix1], rot)
            a[ix1] = _rot8(a0, rot)
        else:
            c = 1 if m in (1, 7) else -1
            s = 1 if m in (1, 3) else -1
            a0 = a[ix0].copy()
            a1 = a[ix1]
            minus_i = lambda blk: _rot8(blk, 6)
            a[ix0] = c * a0 + s * minus_i(a1)
            a[ix1] = s * minus_i(a0) + c * a1
            state.sqrt2_exp += 1
            state._coeff_bound *= 2
    else:
        raise ExactBackendUnsupportedGate(f"{kind} entries are not in Q(w)")
    if state._coeff_bound > 2 ** 60 and state.array.dtype != object:
        state.array = state.array.astype(object)


def _apply_float(state: StateVector, gate) -> None:
    n = state.n_qubits
    a = state.array
    kind = gate.kind
    if kind in ("H", "XRot"):
        if kind == "H":
            m00 = m01 = m10 = 1 / math.sqrt(2)
            m11 = -m00
        else:
            t = gate.params[0]
            m00 = m11 = math.cos(t)
            m01 = m10 = -1j * math.sin(t)
        q = gate.qubits[0]
        a0 = a[_slice(n, {q: 0})].copy()
        a1 = a[_slice(n, {q: 1})]
        a[_slice(n, {q: 0})] = m00 * a0 + m01 * a1
        a[_slice(n, {q: 1})] = m10 * a0 + m11 * a1
    elif kind == "Tdg":
        q = gate.qubits[0]
        a[_slice(n, {q: 1})] *= _omega_complex(-1)
    elif kind == "CZ":
        q0, q1 = gate.qubits
        a[_slice(n, {q0: 1, q1: 1})] *= -1
    elif kind in ("PhaseDiag1", "GeneralDiag1"):
        q = gate.qubits[0]
        for b, e in enumerate(gate.params):
            factor = _omega_complex(-e) if kind == "PhaseDiag1" else e
            a[_slice(n, {q: b})] *= factor
    elif kind in ("PhaseDiag2", "GeneralDiag2"):
        q0, q1 = gate.qubits
        for v, e in enumerate(gate.params):
            factor = _omega_complex(-e) if kind == "PhaseDiag2" else e
            a[_slice(n, {q0: v >> 1, q1: v & 1})] *= factor
    else:
        raise ValueError(f"unknown gate kind {kind}")


def simulate(circuit: Circuit, backend: str = "float") -> StateVector:
    """Final state before measurement and before post-selection conditioning."""
    if circuit.n_qubits > MAX_QUBITS:
        raise TooManyQubits(f"{circuit.n_qubits} qubits exceeds the cap of {MAX_QUBITS}")
    if backend not in ("exact", "float"):
        raise ValueError(f"unknown backend {backend!r}")
    state = _prepare(circuit, backend)
    for gate in circuit.gates:
        if backend == "exact":
            _apply_exact(state, gate)
        else:
            _apply_float(state, gate)
            state.check_norm()
    return state


@dataclass
class Distribution:
    """Outcome probabilities over the bitstrings of designated wires.

    Keys are bitstrings ordered by ascending wire label, leftmost first.
    Values are floats (float backend) or real Cyclotomic values (exact).
    """

    wires: tuple[int, ...]
    outcomes: dict[str, object]
    conditioning_probability: object
    backend: str

    def support(self) -> list[str]:
        return [s for s, v in self.outcomes.items() if not _is_zero(v)]

    def float_outcomes(self) -> dict[str, float]:
        return {s: _to_float(v) for s, v in self.outcomes.items()}


def _is_zero(v) -> bool:
    return v.is_zero() if isinstance(v, Cyclotomic) else v == 0


def _to_float(v) -> float:
    return v.to_complex().real if isinstance(v, Cyclotomic) else float(v)


def _div_real(num: Cyclotomic, den: Cyclotomic) -> Cyclotomic:
    """Exact quotient of real field elements a + b*sqrt(2) (den nonzero)."""
    a1, b1 = num.c0, num.c1
    a2, b2 = den.c0, den.c1
    norm = a2 * a2 - 2 * b2 * b2
    return from_sqrt2_pair((a1 * a2 - 2 * b1 * b2) / norm, (b1 * a2 - a1 * b2) / norm)


def _marginal_grids(state: StateVector, keep: list[int]):
    """Probability grids conditioned on post-selection support stripped out,
    keeping the given physical qubits as axes in the listed order."""
    grids = state.probability_grids()
    n = state.n_qubits
    out = []
    for g in grids:
        axes = tuple(q for q in range(n) if q not in keep)
        summed = g.sum(axis=axes) if axes else g
        remaining = [q for q in range(n) if q in keep]
        order = [remaining.index(q) for q in keep]
        out.append(summed.transpose(order) if keep else summed)
    return out


def _conditioned_grids(state: StateVector, post: frozenset[int], keep: list[int]):
    """Slice post-selected qubits to 0, then marginalize onto `keep`."""
    n = state.n_qubits
    sliced_state = StateVector(
        n - len(post), state.backend,
        state.array[_slice(n, {q: 0 for q in post}, state.backend == "exact")],
        state.sqrt2_exp, state._coeff_bound)
    survivors = [q for q in range(n) if q not in post]
    relabel = {q: i for i, q in enumerate(survivors)}
    return _marginal_grids(sliced_state, [relabel[q] for q in keep])


def post_selected_distribution(circuit: Circuit, backend: str = "float") -> Distribution:
    """Distribution over the output wires conditioned on the post-selection
    register reading all zeros; unlisted qubits are traced out."""
    state = simulate(circuit, backend)
    wires = circuit.output_wires()
    keep = [circuit.output_map[w] for w in wires]
    grids = _conditioned_grids(state, circuit.post_select, keep)
    k = len(keep)
    if backend == "float":
        joint = grids[0]
        cond = float(joint.sum())
        if cond < FLOAT_ZERO_CUTOFF:
            raise ZeroPostSelectionProbability(f"conditioning probability {cond}")
        outcomes = {_bits(i, k): float(joint.reshape(-1)[i]) / cond for i in range(2 ** k)}
        return Distribution(tuple(wires), outcomes, cond, "float")
    r0, r1 = (np.asarray(g).reshape(-1) for g in grids)
    c0, c1 = int(r0.sum()), int(r1.sum())
    if c0 == 0 and c1 == 0:
        raise ZeroPostSelectionProbability("conditioning probability is exactly zero")
    scale = Fraction(1, 2 ** state.sqrt2_exp)
    cond = from_sqrt2_pair(c0 * scale, c1 * scale)
    den = from_sqrt2_pair(c0, c1)
    outcomes = {_bits(i, k): _div_real(from_sqrt2_pair(int(r0[i]), int(r1[i])), den)
                for i in range(2 ** k)}
    return Distribution(tuple(wires), outcomes, cond, "exact")


def _bits(i: int, k: int) -> str:
    return format(i, f"0{k}b") if k else ""


def marginal_oracle(circuit: Circuit, subset, outcome, backend: str = "float") -> float:
    """Pr[Z_S = z_S] for physical qubits S, conditioned on post-selection if
    the register is nonempty."""
    subset = list(subset)
    bits = [int(b) for b in outcome]
    if len(subset) != len(bits):
        raise ValueError("subset and outcome lengths differ")
    if set(subset) & set(circuit.post_select):
        raise ValueError("subset must be disjoint from the post-selection register")
    state = simulate(circuit, backend)
    grids = _conditioned_grids(state, circuit.post_select, subset)
    if backend == "float":
        joint = grids[0]
        total = float(joint.sum())
        if total < FLOAT_ZERO_CUTOFF:
            raise ZeroPostSelectionProbability(f"conditioning probability {total}")
        return float(joint[tuple(bits)]) / total
    r0, r1 = grids
    t0, t1 = int(np.sum(r0)), int(np.sum(r1))
    if t0 == 0 and t1 == 0:
        raise ZeroPostSelectionProbability("conditioning probability is exactly zero")
    sel0 = int(r0[tuple(bits)]) if subset else t0
    sel1 = int(r1[tuple(bits)]) if subset else t1
    value = _div_real(from_sqrt2_pair(sel0, sel1), from_sqrt2_pair(t0, t1))
    return value.to_complex().real


def multiplicative_error(d1: Distribution, d2: Distribution) -> float:
    """Smallest c >= 1 with c^-1*D(x) <= D'(x) <= c*D(x) pointwise;
    math.inf when exactly one side vanishes somewhere."""
    if len(d1.wires) != len(d2.wires):
        raise ValueError("distributions live on different support universes")
    worst = 1.0
    for x in set(d1.outcomes) | set(d2.outcomes):
        a = d1.outcomes.get(x, 0.0)
        b = d2.outcomes.get(x, 0.0)
        a_zero, b_zero = _is_zero(a), _is_zero(b)
        if a_zero and b_zero:
            continue
        if a_zero != b_zero:
            return math.inf
        if a == b:
            continue
        fa, fb = _to_float(a), _to_float(b)
        worst = max(worst, fa / fb, fb / fa)
    return worst
