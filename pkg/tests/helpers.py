"""Shared factories for randomized tests: source circuits over {H, Tdg, CZ}
and random interaction-degree-2 QAOA instances with mixed components."""

from __future__ import annotations

import itertools
import math

import numpy as np

from qdich.ir import Circuit, CostFunction, QaoaInstance, Term, cz, h, tdg


def random_source_circuit(rng: np.random.Generator, n: int, n_gates: int,
                          prep: str = "zero") -> Circuit:
    gates = []
    for _ in range(n_gates):
        kinds = ["H", "Tdg", "CZ"] if n > 1 else ["H", "Tdg"]
        kind = kinds[rng.integers(len(kinds))]
        if kind == "H":
            gates.append(h(int(rng.integers(n))))
        elif kind == "Tdg":
            gates.append(tdg(int(rng.integers(n))))
        else:
            a, b = rng.choice(n, size=2, replace=False)
            gates.append(cz(int(a), int(b)))
    return Circuit.build(n, gates, prep=prep)


def exhaustive_source_circuits(n: int, max_gates: int):
    """All circuits on n qubits (|0> preps) using up to max_gates gates."""
    vocab = [h(0), tdg(0)]
    if n > 1:
        vocab += [h(1), tdg(1), cz(0, 1)]
    for length in range(max_gates + 1):
        for combo in itertools.product(vocab, repeat=length):
            yield Circuit.build(n, combo)


def path_instance(n: int, p: int, rng: np.random.Generator | None = None,
                  gammas=None, betas=None) -> QaoaInstance:
    """Path over qubits 0..n-1 with coupling tables guaranteed nontrivial."""
    rng = rng or np.random.default_rng(0)
    terms = [Term((i, i + 1), _coupling_table(rng)) for i in range(n - 1)]
    terms += [Term((i,), tuple(rng.uniform(-2, 2, 2))) for i in range(n)]
    cost = CostFunction(n, tuple(terms))
    if gammas is None:
        gammas = tuple(rng.uniform(0, 2 * math.pi, p))
    if betas is None:
        betas = tuple(rng.uniform(0, 2 * math.pi, p))
    return QaoaInstance(n, p, cost, tuple(gammas), tuple(betas))


def cycle_instance(n: int, p: int, rng: np.random.Generator | None = None) -> QaoaInstance:
    rng = rng or np.random.default_rng(0)
    terms = [Term((i, (i + 1) % n), _coupling_table(rng)) for i in range(n)]
    cost = CostFunction(n, tuple(terms))
    return QaoaInstance(n, p, cost,
                        tuple(rng.uniform(0, 2 * math.pi, p)),
                        tuple(rng.uniform(0, 2 * math.pi, p)))


def _coupling_table(rng: np.random.Generator) -> tuple[float, ...]:
    # resample until the term really couples both variables
    while True:
        t = tuple(rng.uniform(-2, 2, 4))
        if (t[0] != t[2] or t[1] != t[3]) and (t[0] != t[1] or t[2] != t[3]):
            return t


def random_degree2_instance(rng: np.random.Generator, n: int, p: int) -> QaoaInstance:
    """Mixed isolated/path/cycle components over a random vertex permutation."""
    perm = [int(v) for v in rng.permutation(n)]
    terms = []
    i = 0
    while i < n:
        remaining = n - i
        kind = rng.integers(3)
        if kind == 0 or remaining < 2:
            size = 1
        elif kind == 1 or remaining < 3:
            size = int(rng.integers(2, remaining + 1))
            block = perm[i:i + size]
            terms += [Term((a, b), _coupling_table(rng))
                      for a, b in zip(block, block[1:])]
        else:
            size = int(rng.integers(3, remaining + 1))
            block = perm[i:i + size]
            terms += [Term((block[j], block[(j + 1) % size]), _coupling_table(rng))
                      for j in range(size)]
        i += size
    for v in range(n):
        if rng.random() < 0.5:
            terms.append(Term((v,), tuple(rng.uniform(-2, 2, 2))))
    cost = CostFunction(n, tuple(terms))
    return QaoaInstance(n, p, cost,
                        tuple(rng.uniform(0, 2 * math.pi, p)),
                        tuple(rng.uniform(0, 2 * math.pi, p)))


def cost_grid(cost: CostFunction) -> np.ndarray:
    """Evaluate the cost on all 2^n assignments (axis q = bit of variable q)."""
    n = cost.n_vars
    grid = np.zeros((2,) * n)
    for t in cost.terms:
        arr = np.asarray(t.table, dtype=float).reshape((2,) * len(t.support))
        order = np.argsort(t.support)
        arr = arr.transpose(order)
        shape = [1] * n
        for s in sorted(t.support):
            shape[s] = 2
        grid = grid + arr.reshape(shape)
    return grid
