"""End-to-end acceptance criteria.

Each test prints one ``[PASS]``/``[FAIL]`` line; the lines are also repeated in
the pytest terminal summary (see ``conftest.py``).  Run just this file with::

    python3 -m pytest tests/test_acceptance.py -v
"""

import itertools
import json
import math
import time

import numpy as np
import pytest

from qgm import cli, tensor
from qgm.classical import (CliquePotential, JointTable, PairwiseModel, classical_cmi, hc_factorize,
                           is_markov_network, sum_product_bp, transfer_matrix_Z)
from qgm.graph import SeparatorTriple, SiteGraph, maximal_cliques
from qgm.quantum import (FIVE_SPIN_TRIPLE, PAULI, DensityMatrix, LocalHamiltonian, PauliTerm, TermGroup,
                         commutation_audit, factorization_gap, five_spin_preset, is_quantum_markov_network,
                         quantum_cmi)

from oracles import (chain_Z_by_enumeration, entropy_by_enumeration, joint_by_enumeration, kron_chain,
                     marginals_by_enumeration, partial_trace_basis, random_density, random_graph_edges,
                     random_hermitian, random_tree_edges)

RESULTS = []


def report(number, name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {name} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def run_sweep(tmp_path, h2):
    out = tmp_path / f"sweep_h2_{h2}.csv"
    start = time.perf_counter()
    code = cli.main(["cmi-sweep", "--model", "five_spin", "--h1", "2", "--h2", str(h2), "--h3", "2",
                     "--A", "0,1", "--B", "2", "--C", "3,4", "--beta-min", "0", "--beta-max", "5",
                     "--steps", "51", "--out", str(out)])
    elapsed = time.perf_counter() - start
    assert code == 0
    return cli.parse_csv(out.read_text()), elapsed


def test_criterion_01_commuting_sweep_vanishes(tmp_path):
    rows, elapsed = run_sweep(tmp_path, 0)
    worst = max(abs(c) for _, c in rows)
    ok = len(rows) == 51 and worst <= 1e-9 and elapsed < 10
    report(1, "h2=0 sweep, CMI <= 1e-9 on 51 betas in < 10 s", ok,
           f"max |cmi| = {worst:.3g}, {elapsed:.2f} s")


def test_criterion_02_noncommuting_sweep_rises(tmp_path):
    rows, elapsed = run_sweep(tmp_path, 2)
    at_zero = abs(rows[0][1])
    smallest = min(c for b, c in rows if b >= 0.5)
    ok = len(rows) == 51 and rows[0][0] == 0 and at_zero <= 1e-10 and smallest > 1e-4 and elapsed < 10
    report(2, "h1=h2=h3=2 sweep, CMI(0) <= 1e-10 and CMI > 1e-4 for beta >= 0.5", ok,
           f"cmi(0) = {at_zero:.3g}, min cmi(beta>=0.5) = {smallest:.4g}, {elapsed:.2f} s")


def zz_tree_hamiltonian(rng, n):
    g = SiteGraph.from_edges(n, random_tree_edges(rng, n))
    groups = []
    for k, (u, v) in enumerate(sorted(g.edges)):
        terms = (PauliTerm((u, v), "ZZ", rng.normal()), PauliTerm((u,), "Z", rng.normal()),
                 PauliTerm((v,), "Z", rng.normal()))
        groups.append(TermGroup(f"e{k}", (u, v), terms))
    return LocalHamiltonian(g, tuple(groups))


def disjoint_support_tree_hamiltonian(rng, n):
    """Dense two-site terms on a matching of a random tree, dense one-site terms elsewhere."""
    g = SiteGraph.from_edges(n, random_tree_edges(rng, n))
    used, groups = set(), []
    for u, v in sorted(g.edges, key=lambda e: rng.random()):
        if u in used or v in used:
            continue
        used |= {u, v}
        terms = tuple(PauliTerm((u, v), a + b, rng.normal()) for a, b in itertools.product("XYZ", repeat=2))
        terms += tuple(PauliTerm((w,), p, rng.normal()) for w in (u, v) for p in "XYZ")
        groups.append(TermGroup(f"m{u}_{v}", (min(u, v), max(u, v)), terms))
    for w in sorted(set(range(n)) - used):
        groups.append(TermGroup(f"s{w}", (w,), tuple(PauliTerm((w,), p, rng.normal()) for p in "XYZ")))
    return LocalHamiltonian(g, tuple(groups))


def test_criterion_03_commuting_implies_markov():
    rng = np.random.default_rng(303)
    worst, failures, count = 0.0, 0, 0
    for k in range(50):
        n = int(rng.integers(3, 7))
        h = zz_tree_hamiltonian(rng, n) if k % 2 == 0 else disjoint_support_tree_hamiltonian(rng, n)
        assert commutation_audit(h).all_commute
        for beta in (0.5, 2.0, 5.0):
            r = is_quantum_markov_network(h, beta, max_A=2, tol=1e-8)
            worst = max(worst, r.max_cmi)
            failures += not r.is_markov
            count += 1
    report(3, "50 commuting Hamiltonians on trees (<= 6 qubits) are Markov at tol 1e-8", failures == 0,
           f"{count} checks, {failures} failures, max |cmi| = {worst:.3g}")


def five_spin_bonds_by_hand(h1, h2, h3):
    I2, X, Z = PAULI["I"], PAULI["X"], PAULI["Z"]

    def op(placed):
        return kron_chain([placed.get(k, I2) for k in range(5)])
    return {
        "h12": op({0: X, 1: X}) + h1 * op({0: Z}),
        "h23": op({1: X, 2: X}) + h2 / 2 * op({2: Z}),
        "h34": op({2: X, 3: X}) + h2 / 2 * op({2: Z}),
        "h45": op({3: X, 4: X}) + h3 * op({4: Z}),
    }


def test_criterion_04_commutation_ground_truth():
    rng = np.random.default_rng(404)
    cases = [(2, 0, 2), (2, 2, 2), (0, 0, 0), (0, 1, 0)] + [
        tuple(rng.uniform(-3, 3, size=3)) for _ in range(6)]
    mismatches = []
    for h1, h2, h3 in cases:
        bonds = five_spin_bonds_by_hand(h1, h2, h3)
        truth = {(a, b) for a, b in itertools.combinations(sorted(bonds), 2)
                 if np.linalg.norm(bonds[a] @ bonds[b] - bonds[b] @ bonds[a]) > 1e-12}
        expected = {("h23", "h34")} if h2 != 0 else set()
        got = set(commutation_audit(five_spin_preset(h1, h2, h3)).non_commuting)
        if not got == truth == expected:
            mismatches.append((h1, h2, h3, got, truth))
    report(4, "five-spin audit flags exactly (h23, h34) iff h2 != 0", not mismatches,
           f"{len(cases)} field settings, {len(mismatches)} mismatches")


def gap_by_hand(h1, h2, h3, beta):
    bonds = five_spin_bonds_by_hand(h1, h2, h3)
    H = sum(bonds.values())
    exact = float(np.sum(np.exp(-beta * np.linalg.eigvalsh(H))))
    prod = np.eye(32)
    for name in ("h12", "h23", "h34", "h45"):
        prod = prod @ tensor.expm_series(-beta * bonds[name])
    return abs(exact - np.trace(prod)) / exact


def test_criterion_05_factorization_gap():
    commuting = factorization_gap(five_spin_preset(2, 0, 2), 1.0)
    noncommuting = factorization_gap(five_spin_preset(2, 2, 2), 1.0)
    oracle_c, oracle_n = gap_by_hand(2, 0, 2, 1.0), gap_by_hand(2, 2, 2, 1.0)
    ok = (commuting.gap <= 1e-10 and oracle_c <= 1e-10 and noncommuting.gap >= 1e-3 and oracle_n >= 1e-3
          and abs(noncommuting.gap - oracle_n) <= 1e-10)
    report(5, "beta=1 factorization gap <= 1e-10 for h2=0 and >= 1e-3 for h2=2", ok,
           f"h2=0: {commuting.gap:.3g} (oracle {oracle_c:.3g}); h2=2: {noncommuting.gap:.6g} (oracle {oracle_n:.6g})")


def random_partition(rng, n, allow_rest=True):
    labels = rng.integers(0, 4 if allow_rest else 3, size=n)
    a, c = rng.choice(n, size=2, replace=False)
    labels[a], labels[c] = 0, 2
    return SeparatorTriple(*(set(np.flatnonzero(labels == k).tolist()) for k in range(3)))


def test_criterion_06_strong_subadditivity():
    rng = np.random.default_rng(606)
    worst_c = math.inf
    for _ in range(1000):
        n = int(rng.integers(3, 7))
        dims = tuple(int(d) for d in rng.integers(2, 4, size=n))
        g = SiteGraph.from_edges(n, [], dims)
        alpha = float(rng.choice([0.05, 0.3, 1.0, 5.0]))
        p = JointTable(g, rng.dirichlet(np.full(math.prod(dims), alpha)))
        worst_c = min(worst_c, classical_cmi(p, random_partition(rng, n)))
    worst_q = math.inf
    for _ in range(500):
        rho = DensityMatrix((2,) * 4, random_density(rng, 16, rank=int(rng.integers(1, 17))))
        worst_q = min(worst_q, quantum_cmi(rho, random_partition(rng, 4)))
    ok = worst_c >= -1e-10 and worst_q >= -1e-9
    report(6, "classical CMI >= -1e-10 (1000 tables), quantum CMI >= -1e-9 (500 4-qubit states)", ok,
           f"min classical = {worst_c:.3g}, min quantum = {worst_q:.3g}")


def test_criterion_07_hammersley_clifford_forward():
    rng = np.random.default_rng(707)
    failures, worst, cross = 0, 0.0, 0.0
    for _ in range(100):
        n = int(rng.integers(2, 8))
        g = SiteGraph.from_edges(n, random_graph_edges(rng, n, float(rng.uniform(0.2, 0.7))),
                                 tuple(int(d) for d in rng.integers(2, 4 if n <= 5 else 3, size=n)))
        pots = []
        for c in maximal_cliques(g):
            support = tuple(int(v) for v in rng.permutation(sorted(c)))
            pots.append(CliquePotential(support, rng.uniform(0.05, 5.0, size=[g.local_dims[v] for v in support])))
        p = hc_factorize(g, pots)
        r = is_markov_network(g, p, max_A=2, tol=1e-9)
        failures += not r.is_markov
        worst = max(worst, r.max_cmi)
        # one triple per graph recomputed by brute-force enumeration
        if r.entries:
            t = r.entries[int(rng.integers(len(r.entries)))][0]
            probs, _ = joint_by_enumeration(g.local_dims, [(q.support, q.table) for q in pots])
            brute = (entropy_by_enumeration(g.local_dims, probs, t.A | t.B)
                     + entropy_by_enumeration(g.local_dims, probs, t.C | t.B)
                     - entropy_by_enumeration(g.local_dims, probs, t.A | t.B | t.C)
                     - entropy_by_enumeration(g.local_dims, probs, t.B))
            cross = max(cross, abs(brute))
    ok = failures == 0 and cross <= 1e-9
    report(7, "100 clique factorizations (<= 7 vertices) pass the Markov check at tol 1e-9", ok,
           f"{failures} failures, max cmi = {worst:.3g}, brute-force spot check max = {cross:.3g}")


def test_criterion_08_transfer_matrix():
    rng = np.random.default_rng(808)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 11))
        terms = [rng.normal(scale=float(rng.uniform(0.1, 2)), size=(2, 2)) for _ in range(n - 1)]
        brute = chain_Z_by_enumeration(terms, [2] * n)
        worst = max(worst, abs(transfer_matrix_Z(terms, [2] * n) - brute) / brute)
    report(8, "transfer-matrix Z matches enumeration on 100 binary chains (<= 10 sites) to 1e-12 rel.",
           worst <= 1e-12, f"max relative error = {worst:.3g}")


def test_criterion_09_bp_exact_on_trees():
    rng = np.random.default_rng(909)
    worst, unconverged = 0.0, 0
    for _ in range(200):
        n = int(rng.integers(1, 11))
        dims = tuple(int(d) for d in rng.integers(2, 4 if n <= 6 else 3, size=n))
        g = SiteGraph.from_edges(n, random_tree_edges(rng, n), dims)
        nodes = tuple(rng.uniform(0.1, 3.0, size=d) for d in dims)
        edges = {e: rng.uniform(0.1, 3.0, size=(dims[e[0]], dims[e[1]])) for e in g.edges}
        res = sum_product_bp(PairwiseModel(g, nodes, edges))
        unconverged += not res.converged
        factors = [((v,), t) for v, t in enumerate(nodes)] + list(edges.items())
        exact = marginals_by_enumeration(dims, joint_by_enumeration(dims, factors)[0])
        worst = max(worst, max(float(np.max(np.abs(b - e))) for b, e in zip(res.marginals, exact)))
    report(9, "BP marginals match enumeration on 200 trees (<= 10 vertices) to 1e-10",
           worst <= 1e-10 and unconverged == 0, f"max error = {worst:.3g}, {unconverged} unconverged")


def test_criterion_10_kernel_oracles():
    rng = np.random.default_rng(1010)
    worst_exp = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 33))
        a = random_hermitian(rng, n, scale=float(rng.uniform(0.05, 2.0)))
        spectral = tensor.matrix_function(a, math.exp)
        series = tensor.expm_series(a)
        worst_exp = max(worst_exp, float(np.max(np.abs(spectral - series)) / np.max(np.abs(series))))
    worst_pt = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 5))
        dims = [int(d) for d in rng.integers(2, 4, size=n)]
        rho = random_density(rng, math.prod(dims))
        order = [int(s) for s in rng.permutation(n)]
        cut = int(rng.integers(0, n))
        s1, s2 = sorted(order[:cut]), sorted(order[cut:cut + int(rng.integers(0, n - cut + 1))])
        rest = [s for s in range(n) if s not in s1]
        once = tensor.partial_trace(rho, dims, s1 + s2)
        twice = tensor.partial_trace(tensor.partial_trace(rho, dims, s1), [dims[s] for s in rest],
                                     [rest.index(s) for s in s2])
        worst_pt = max(worst_pt, float(np.max(np.abs(once - twice))),
                       float(np.max(np.abs(once - partial_trace_basis(rho, dims, s1 + s2)))))
    ok = worst_exp <= 1e-10 and worst_pt <= 1e-12
    report(10, "eigh-based expm vs series oracle (100 matrices, dim <= 32) to 1e-10; partial-trace "
               "composition to 1e-12", ok, f"expm rel. error = {worst_exp:.3g}, partial trace = {worst_pt:.3g}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
