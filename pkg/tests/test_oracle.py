import math

import numpy as np
import pytest

from qdich.cyclotomic import INV_SQRT2, Cyclotomic
from qdich.ir import (Circuit, CostFunction, QaoaInstance, Term, cz, h,
                      phase_diag1, phase_diag2, qaoa_to_circuit, tdg, xrot)
from qdich.oracle import (Distribution, ExactBackendUnsupportedGate,
                          TooManyQubits, ZeroPostSelectionProbability,
                          marginal_oracle, multiplicative_error,
                          post_selected_distribution, simulate)

rng = np.random.default_rng(424242)

GADGET = (0, 6, 0, 2)  # W = diag(1, i, 1, -i)


def random_exact_circuit(n: int, n_gates: int, prep="zero") -> Circuit:
    gates = []
    for _ in range(n_gates):
        choice = rng.integers(5 if n > 1 else 4)
        q = int(rng.integers(n))
        if choice == 0:
            gates.append(h(q))
        elif choice == 1:
            gates.append(tdg(q))
        elif choice == 2:
            gates.append(phase_diag1(q, int(rng.integers(8)), int(rng.integers(8))))
        elif choice == 3:
            gates.append(xrot(q, int(rng.integers(8)) * math.pi / 4))
        else:
            a, b = rng.choice(n, size=2, replace=False)
            gates.append(cz(int(a), int(b)))
    return Circuit.build(n, gates, prep=prep)


class TestSimulate:
    def test_hadamard_on_zero(self):
        circ = Circuit.build(1, [h(0)])
        sv = simulate(circ, "float")
        assert np.allclose(sv.array, [1 / math.sqrt(2)] * 2)
        sv = simulate(circ, "exact")
        assert sv.exact_amplitude((0,)) == INV_SQRT2
        assert sv.exact_amplitude((1,)) == INV_SQRT2

    def test_trivial_qaoa_layer_is_uniform(self):
        cost = CostFunction(2, (Term((0, 1), (0, 0, 0, 1)),), integer_valued=True)
        inst = QaoaInstance(2, 1, cost, (0.0,), (0.0,))
        sv = simulate(qaoa_to_circuit(inst), "float")
        assert np.allclose(np.abs(sv.array) ** 2, 0.25)

    def test_qubit_cap(self):
        with pytest.raises(TooManyQubits):
            simulate(Circuit.build(25, []), "float")

    def test_exact_backend_rejects_general_entries(self):
        from qdich.ir import general_diag1
        circ = Circuit.build(1, [general_diag1(0, (1, np.exp(0.3j)))])
        with pytest.raises(ExactBackendUnsupportedGate):
            simulate(circ, "exact")
        with pytest.raises(ExactBackendUnsupportedGate):
            simulate(Circuit.build(1, [xrot(0, 0.3)]), "exact")

    def test_exact_and_float_backends_agree(self):
        for _ in range(30):
            n = int(rng.integers(1, 6))
            circ = random_exact_circuit(n, int(rng.integers(0, 12)),
                                        prep="plus" if rng.random() < 0.5 else "zero")
            exact = simulate(circ, "exact").to_complex_array()
            flt = simulate(circ, "float").array.reshape(-1)
            assert np.max(np.abs(exact - flt)) < 1e-10

    def test_disjoint_gates_commute(self):
        for _ in range(20):
            circ = random_exact_circuit(4, 10)
            gates = list(circ.gates)
            swapped = None
            for i in range(len(gates) - 1):
                if not set(gates[i].qubits) & set(gates[i + 1].qubits):
                    order = gates[:i] + [gates[i + 1], gates[i]] + gates[i + 2:]
                    swapped = Circuit.build(4, order)
                    break
            if swapped is None:
                continue
            a = simulate(circ, "float").array
            b = simulate(swapped, "float").array
            assert np.allclose(a, b, atol=1e-12)

    def test_exact_norm_invariant(self):
        for _ in range(10):
            sv = simulate(random_exact_circuit(3, 8), "exact")
            sv.check_norm()


class TestGadgetFragment:
    """The coupling-plus-completion identity behind the compilation."""

    def prep_bit(self, q, bit):
        # |1> = H * Z * H |0>
        return [h(q), phase_diag1(q, 0, 4), h(q)] if bit else []

    @pytest.mark.parametrize("b", [0, 1])
    def test_basis_inputs(self, b):
        gates = self.prep_bit(1, b) + [phase_diag2(0, 1, GADGET), xrot(1, math.pi / 4)]
        sv = simulate(Circuit(2, ("plus", "zero"), tuple(gates)), "exact")
        for a in (0, 1):
            expected = INV_SQRT2 * INV_SQRT2  # (1/sqrt2) * <a|H|b> up to sign
            if a and b:
                expected = -expected
            assert sv.exact_amplitude((a, 0)) == expected

    def test_entangled_spectator(self):
        """|0>_j|phi0> + |1>_j|phi1> maps to (1/sqrt2) H_a (|0>_a|phi0> + |1>_a|phi1>)."""
        for _ in range(10):
            prep = random_exact_circuit(2, 6).gates  # acts on qubits 0, 1
            # circuit A: a=0 in |+>, j=1, spectator=2; gadget on (a, j)
            shifted = tuple(type(g)(g.kind, tuple(q + 1 for q in g.qubits), g.params)
                            for g in prep)
            gates_a = shifted + (phase_diag2(0, 1, GADGET), xrot(1, math.pi / 4))
            sv_a = simulate(Circuit(3, ("plus", "zero", "zero"), gates_a), "exact")
            # circuit B: same preparation on (a, spectator) then H on a
            gates_b = prep + (h(0),)
            sv_b = simulate(Circuit(2, ("zero", "zero"), gates_b), "exact")
            for a in (0, 1):
                for s in (0, 1):
                    lhs = sv_a.exact_amplitude((a, 0, s))
                    rhs = INV_SQRT2 * sv_b.exact_amplitude((a, s))
                    assert lhs == rhs


class TestPostSelectedDistribution:
    def test_empty_register_is_plain_distribution(self):
        circ = Circuit.build(2, [h(0), cz(0, 1)])
        dist = post_selected_distribution(circ, "float")
        assert dist.conditioning_probability == pytest.approx(1.0)
        assert abs(sum(dist.outcomes.values()) - 1.0) < 1e-10
        assert dist.outcomes["00"] == pytest.approx(0.5)

    def test_plus_state_conditioning(self):
        circ = Circuit(1, ("plus",), (), frozenset({0}), {})
        dist = post_selected_distribution(circ, "exact")
        assert dist.conditioning_probability == Cyclotomic(0.5)
        assert dist.outcomes == {"": Cyclotomic(1)}

    def test_compiled_single_wire_matches_source(self):
        from qdich.compiler import compile_circuit
        src = Circuit.build(1, [h(0), tdg(0), h(0)])
        inst = compile_circuit(src)
        compiled = qaoa_to_circuit(inst)
        ds = post_selected_distribution(src, "exact")
        dc = post_selected_distribution(compiled, "exact")
        assert ds.outcomes == dc.outcomes

    def test_zero_probability_register(self):
        # |+> then H gives |0>; post-selecting on 0 is fine, but forcing the
        # qubit to 1 first makes the register unreachable
        gates = (h(0), phase_diag1(0, 0, 4), h(0))  # |0> -> |1>
        circ = Circuit(1, ("zero",), gates, frozenset({0}), {})
        with pytest.raises(ZeroPostSelectionProbability):
            post_selected_distribution(circ, "exact")
        with pytest.raises(ZeroPostSelectionProbability):
            post_selected_distribution(circ, "float")

    def test_probabilities_sum_to_one(self):
        for _ in range(5):
            circ = random_exact_circuit(4, 8, prep="plus")
            dist = post_selected_distribution(circ, "float")
            assert abs(sum(dist.outcomes.values()) - 1.0) < 1e-10


class TestMarginalOracle:
    def test_empty_subset(self):
        circ = Circuit.build(2, [h(0)])
        assert marginal_oracle(circ, [], "", "float") == 1.0

    def test_uniform_state(self):
        circ = Circuit.build(3, [], prep="plus")
        for k in range(1, 4):
            assert marginal_oracle(circ, list(range(k)), "0" * k, "float") == \
                pytest.approx(2.0 ** -k)

    def test_law_of_total_probability(self):
        for _ in range(10):
            circ = random_exact_circuit(4, 8)
            S = [int(q) for q in rng.choice(4, size=2, replace=False)]
            z = "".join(str(int(b)) for b in rng.integers(0, 2, 2))
            t = int(({0, 1, 2, 3} - set(S)).pop())
            total = sum(marginal_oracle(circ, S + [t], z + str(b), "float")
                        for b in (0, 1))
            assert total == pytest.approx(marginal_oracle(circ, S, z, "float"), abs=1e-12)

    def test_exact_backend_value(self):
        circ = Circuit.build(2, [h(0)])
        assert marginal_oracle(circ, [0], "0", "exact") == pytest.approx(0.5)


class TestMultiplicativeError:
    def test_identical_distributions(self):
        d = Distribution((0,), {"0": 0.5, "1": 0.5}, 1.0, "float")
        assert multiplicative_error(d, d) == 1.0

    def test_two_sided_ratio(self):
        # smallest two-sided c: the binding constraint is 0.5 <= c * 0.4
        d1 = Distribution((0,), {"0": 0.5, "1": 0.5}, 1.0, "float")
        d2 = Distribution((0,), {"0": 0.6, "1": 0.4}, 1.0, "float")
        assert multiplicative_error(d1, d2) == pytest.approx(1.25)
        assert multiplicative_error(d2, d1) == pytest.approx(1.25)

    def test_support_mismatch_is_infinite(self):
        d1 = Distribution((0,), {"0": 1.0, "1": 0.0}, 1.0, "float")
        d2 = Distribution((0,), {"0": 0.5, "1": 0.5}, 1.0, "float")
        assert multiplicative_error(d1, d2) == math.inf

    def test_exact_equality_gives_exactly_one(self):
        half = Cyclotomic(0.5)
        d = Distribution((0,), {"0": half, "1": half}, Cyclotomic(1), "exact")
        assert multiplicative_error(d, d) == 1.0

    def test_definition_bound_holds_at_reported_c(self):
        for _ in range(20):
            p = rng.dirichlet(np.ones(4))
            q = rng.dirichlet(np.ones(4))
            d1 = Distribution((0, 1), {format(i, "02b"): p[i] for i in range(4)}, 1.0, "float")
            d2 = Distribution((0, 1), {format(i, "02b"): q[i] for i in range(4)}, 1.0, "float")
            c = multiplicative_error(d1, d2)
            for i in range(4):
                assert p[i] / c - 1e-12 <= q[i] <= c * p[i] + 1e-12
