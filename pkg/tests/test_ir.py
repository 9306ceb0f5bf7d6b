import math

import numpy as np
import pytest

from qdich.ir import (Circuit, CostFunction, Gate, QaoaInstance, Term,
                      circuit_from_json, circuit_to_json, cz, h,
                      instance_from_json, instance_to_json, interaction_graph,
                      phase_diag1, phase_diag2, qaoa_to_circuit, tdg, validate,
                      xrot)

rng = np.random.default_rng(99)


class TestGate:
    def test_arity_is_enforced(self):
        with pytest.raises(ValueError):
            Gate("H", (0, 1))
        with pytest.raises(ValueError):
            Gate("CZ", (2,))
        with pytest.raises(ValueError):
            Gate("CZ", (1, 1))

    def test_phase_diag_entries_are_residues(self):
        with pytest.raises(ValueError):
            Gate("PhaseDiag1", (0,), (8, 0))
        assert phase_diag1(0, 9, -1).params == (1, 7)

    def test_param_counts(self):
        with pytest.raises(ValueError):
            Gate("XRot", (0,))
        assert xrot(0, math.pi / 4).params == (math.pi / 4,)


class TestInteractionGraph:
    def test_one_sided_table_creates_no_edge(self):
        # value is the second variable's bit, so flipping the first never matters
        cost = CostFunction(3, (Term((1, 2), (0, 1, 0, 1)),))
        assert interaction_graph(cost).edges == frozenset()

    def test_triangle_has_degree_two(self):
        coupling = (0, 0, 0, 1)
        cost = CostFunction(3, (Term((0, 1), coupling), Term((1, 2), coupling),
                                Term((0, 2), coupling)))
        g = interaction_graph(cost)
        assert len(g.edges) == 3 and g.max_degree == 2

    def test_star_has_degree_three(self):
        coupling = (0, 0, 0, 1)
        cost = CostFunction(4, (Term((0, 1), coupling), Term((0, 2), coupling),
                                Term((0, 3), coupling)))
        assert interaction_graph(cost).max_degree == 3

    def test_proportional_split_preserves_graph(self):
        for _ in range(20):
            table = tuple(rng.uniform(-2, 2, 4))
            cost = CostFunction(2, (Term((0, 1), table),))
            split = CostFunction(2, (
                Term((0, 1), tuple(0.25 * v for v in table)),
                Term((0, 1), tuple(0.75 * v for v in table))))
            assert interaction_graph(cost).edges == interaction_graph(split).edges

    def test_constant_term_changes_no_edges(self):
        base = CostFunction(3, (Term((0, 1), (0, 1, 2, 3)),))
        extended = CostFunction(3, base.terms + (Term((1, 2), (5, 5, 5, 5)),))
        assert interaction_graph(base).edges == interaction_graph(extended).edges

    def test_any_nontrivial_term_on_pair_suffices(self):
        cost = CostFunction(2, (Term((0, 1), (0, 1, 0, 1)),   # no edge alone
                                Term((0, 1), (0, 0, 0, 1))))  # couples the pair
        assert interaction_graph(cost).edges == frozenset({(0, 1)})


class TestQaoaToCircuit:
    def test_zero_depth(self):
        inst = QaoaInstance(2, 0, CostFunction(2, ()), (), ())
        circ = qaoa_to_circuit(inst)
        assert circ.gates == () and circ.prep == ("plus", "plus")

    def test_structural_count_single_term(self):
        cost = CostFunction(2, (Term((0, 1), (0.0, 0.5, 1.0, 1.5)),))
        inst = QaoaInstance(2, 1, cost, (0.3,), (0.7,))
        circ = qaoa_to_circuit(inst)
        assert len(circ.gates) == 3
        assert circ.gates[0].kind == "GeneralDiag2"
        assert circ.gates[1].kind == circ.gates[2].kind == "XRot"

    def test_gate_count_scales_with_depth(self):
        cost = CostFunction(3, (Term((0, 1), (0, 0, 0, 1)), Term((2,), (0, 1))))
        inst = QaoaInstance(3, 4, cost, (0.1,) * 4, (0.2,) * 4, frozenset(), {})
        assert len(qaoa_to_circuit(inst).gates) == 4 * (2 + 3)

    def test_integer_cost_at_gamma_pi4_gives_eighth_roots(self):
        cost = CostFunction(2, (Term((0, 1), (0, 6, 0, 2)), Term((0,), (7, 1))),
                            integer_valued=True)
        inst = QaoaInstance(2, 1, cost, (math.pi / 4,), (math.pi / 4,))
        kinds = [g.kind for g in qaoa_to_circuit(inst).gates]
        assert kinds == ["PhaseDiag2", "PhaseDiag1", "XRot", "XRot"]

    def test_general_entries_are_exp_of_gamma_times_table(self):
        table = (0.0, 1.3, -0.4, 2.0)
        inst = QaoaInstance(2, 1, CostFunction(2, (Term((0, 1), table),)),
                            (0.9,), (0.1,))
        gate = qaoa_to_circuit(inst).gates[0]
        for v, e in zip(table, gate.params):
            assert abs(e - complex(math.cos(0.9 * v), -math.sin(0.9 * v))) < 1e-15


class TestValidate:
    def test_well_formed_chain_circuit(self):
        # the substituted three-diagonal wire of the degree-reduction figure
        gates = [phase_diag1(0, 0, 1),
                 phase_diag2(1, 0, (0, 6, 0, 2)), xrot(0, math.pi / 4),
                 phase_diag2(2, 1, (0, 6, 0, 2)), xrot(1, math.pi / 4),
                 phase_diag1(2, 0, 1),
                 xrot(2, math.pi / 4)]
        circ = Circuit(3, ("plus",) * 3, tuple(gates), frozenset({0, 1}), {0: 2})
        assert validate(circ) == []

    def test_gate_after_projection_point(self):
        gates = [phase_diag2(1, 0, (0, 6, 0, 2)), xrot(0, math.pi / 4),
                 phase_diag2(1, 0, (0, 0, 0, 4)),  # touches qubit 0 again
                 xrot(1, math.pi / 4)]
        circ = Circuit(2, ("plus", "plus"), tuple(gates), frozenset({0}), {0: 1})
        issues = validate(circ)
        assert any("post-selected qubit 0" in v for v in issues)

    def test_out_of_range_qubit(self):
        circ = Circuit(1, ("zero",), (h(0), cz(0, 1) if False else Gate("CZ", (0, 1))))
        assert any("out-of-range" in v for v in validate(circ))

    def test_output_map_rules(self):
        circ = Circuit(2, ("zero",) * 2, (), frozenset({0}), {0: 0})
        assert any("post-selected" in v for v in validate(circ))
        circ = Circuit(2, ("zero",) * 2, (), frozenset(), {0: 1, 1: 1})
        assert any("injective" in v for v in validate(circ))


class TestJsonFormats:
    def test_circuit_round_trip(self):
        circ = Circuit(3, ("plus", "zero", "plus"),
                       (h(0), tdg(1), cz(0, 2), phase_diag2(1, 2, (0, 6, 0, 2)),
                        xrot(0, math.pi / 4),
                        Gate("GeneralDiag1", (1,), (1 + 0j, complex(0, 1)))),
                       frozenset({2}), {0: 0, 1: 1})
        doc = circuit_to_json(circ)
        assert doc["format"] == "qdich-v1"
        again = circuit_from_json(doc)
        assert again == circ
        assert circuit_to_json(again) == doc

    def test_instance_round_trip(self):
        cost = CostFunction(3, (Term((0, 1), (0, 6, 0, 2)), Term((2,), (7, 1))),
                            integer_valued=True)
        inst = QaoaInstance(3, 1, cost, (math.pi / 4,), (math.pi / 4,),
                            frozenset({1}), {0: 0, 1: 2})
        doc = instance_to_json(inst)
        again = instance_from_json(doc)
        assert again.n == inst.n and again.p == inst.p
        assert again.cost.terms == inst.cost.terms
        assert again.cost.integer_valued
        assert again.post_select == inst.post_select
        assert again.output_map == inst.output_map
        assert instance_to_json(again) == doc

    def test_format_tag_is_checked(self):
        with pytest.raises(ValueError):
            circuit_from_json({"format": "qdich-v0", "n": 1})


def test_instance_invariants():
    with pytest.raises(ValueError):
        QaoaInstance(2, 1, CostFunction(3, ()), (0.1,), (0.1,))
    with pytest.raises(ValueError):
        QaoaInstance(2, 2, CostFunction(2, ()), (0.1,), (0.1, 0.2))
    with pytest.raises(ValueError):
        CostFunction(2, (Term((0,), (0.5, 1)),), integer_valued=True)
