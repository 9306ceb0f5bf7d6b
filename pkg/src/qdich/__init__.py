"""qdich: compile {H, Tdg, CZ} circuits into post-selected depth-1 QAOA of
interaction degree <= 3, and exactly simulate/sample degree <= 2 QAOA."""

from .cyclotomic import Cyclotomic
from .ir import (Circuit, CostFunction, Gate, InteractionGraph, QaoaInstance,
                 Term, interaction_graph, qaoa_to_circuit, validate)
from .oracle import (Distribution, StateVector, marginal_oracle,
                     multiplicative_error, post_selected_distribution, simulate)
from .compiler import (GadgetSpec, IqpProgram, WireChain, collect_phases,
                       compile_circuit, compile_iqp, gadget_solve,
                       hadamard_substitute, make_monotone, preprocess)
from .tnsim import (BoundaryMessage, Component, CutProfile, component_marginal,
                    cut_width, decompose, marginal, sample)

__version__ = "0.1.0"

__all__ = [
    "Cyclotomic",
    "Circuit", "CostFunction", "Gate", "InteractionGraph", "QaoaInstance",
    "Term", "interaction_graph", "qaoa_to_circuit", "validate",
    "Distribution", "StateVector", "marginal_oracle", "multiplicative_error",
    "post_selected_distribution", "simulate",
    "GadgetSpec", "IqpProgram", "WireChain", "collect_phases", "compile_circuit",
    "compile_iqp", "gadget_solve", "hadamard_substitute", "make_monotone",
    "preprocess",
    "BoundaryMessage", "Component", "CutProfile", "component_marginal",
    "cut_width", "decompose", "marginal", "sample",
]
