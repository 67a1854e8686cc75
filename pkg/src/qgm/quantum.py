"""Local spin Hamiltonians, Gibbs states and quantum conditional mutual information.

Conventions:

* Gibbs states are ``ρ(β) = exp(-βH) / Z``.
* ``X``, ``Y``, ``Z`` are the bare Pauli matrices (eigenvalues ±1), with no
  spin-1/2 factor.
* Site 0 is the most significant tensor factor.
* Entropies are in nats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import tensor
from .errors import ValidationError
from .graph import MarkovReport, SeparatorTriple, SiteGraph, separator_triples, validate_triple

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

DENSITY_TOL = 1e-10
EIGEN_CLAMP = 1e-14
CMI_TOL = 1e-9
COMMUTE_TOL = 1e-12


@dataclass(frozen=True)
class PauliTerm:
    """``coeff`` times a Pauli string acting on ``sites``."""

    sites: tuple[int, ...]
    paulis: str
    coeff: float = 1.0

    def __post_init__(self):
        sites = tuple(int(s) for s in self.sites)
        paulis = str(self.paulis).upper()
        if not sites or len(paulis) != len(sites):
            raise ValidationError(f"Pauli string {paulis!r} does not match sites {sites}")
        if len(set(sites)) != len(sites):
            raise ValidationError(f"repeated site in {sites}")
        if any(ch not in "XYZ" for ch in paulis):
            raise ValidationError(f"Pauli letters must be X, Y or Z, got {paulis!r}")
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "paulis", paulis)
        object.__setattr__(self, "coeff", float(self.coeff))

    def to_dict(self) -> dict:
        return {"sites": list(self.sites), "paulis": self.paulis, "coeff": self.coeff}


@dataclass(frozen=True)
class TermGroup:
    """A named local term ``h_Q``: a sum of Pauli terms supported on ``support``."""

    name: str
    support: tuple[int, ...]
    terms: tuple[PauliTerm, ...]

    def __post_init__(self):
        support = tuple(sorted(int(s) for s in self.support))
        if not support or len(set(support)) != len(support):
            raise ValidationError(f"group {self.name!r} needs a nonempty support without repeats")
        terms = tuple(self.terms)
        for t in terms:
            if not set(t.sites) <= set(support):
                raise ValidationError(f"term on {t.sites} lies outside support {support} of {self.name!r}")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "terms", terms)

    def to_dict(self) -> dict:
        return {"name": self.name, "support": list(self.support), "terms": [t.to_dict() for t in self.terms]}


@dataclass(frozen=True)
class LocalHamiltonian:
    """``H = Σ_Q h_Q`` with every group supported on a clique of ``graph``."""

    graph: SiteGraph
    groups: tuple[TermGroup, ...]

    def __post_init__(self):
        groups = tuple(self.groups)
        names = [grp.name for grp in groups]
        if len(set(names)) != len(names):
            raise ValidationError(f"group names must be unique, got {names}")
        for grp in groups:
            if any(s < 0 or s >= self.graph.vertex_count for s in grp.support):
                raise ValidationError(f"support {grp.support} of {grp.name!r} out of range")
            if not self.graph.is_clique(grp.support):
                raise ValidationError(f"support {grp.support} of {grp.name!r} is not a clique")
            for term in grp.terms:
                for s in term.sites:
                    if self.graph.local_dims[s] != 2:
                        raise ValidationError(f"Pauli operator on non-qubit site {s}")
        object.__setattr__(self, "groups", groups)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.graph.local_dims

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    def group(self, name: str) -> TermGroup:
        for grp in self.groups:
            if grp.name == name:
                return grp
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"graph": self.graph.to_dict(), "groups": [g.to_dict() for g in self.groups]}

    @classmethod
    def from_dict(cls, data: dict) -> "LocalHamiltonian":
        try:
            graph = SiteGraph.from_dict(data["graph"])
            groups = []
            for k, raw in enumerate(data["groups"]):
                terms = tuple(PauliTerm(tuple(t["sites"]), t["paulis"], t.get("coeff", 1.0))
                              for t in raw.get("terms", []))
                support = raw.get("support")
                if support is None:
                    support = sorted({s for t in terms for s in t.sites})
                groups.append(TermGroup(raw.get("name", f"g{k}"), tuple(support), terms))
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValidationError(f"malformed Hamiltonian description: {exc}") from exc
        return cls(graph, tuple(groups))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator on ``⊗ dims``."""

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        m = tensor.as_matrix(self.matrix)
        if math.prod(dims) != m.shape[0]:
            raise ValidationError(f"dims {dims} do not match matrix dimension {m.shape[0]}")
        if not tensor.is_hermitian(m, DENSITY_TOL):
            raise ValidationError("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > DENSITY_TOL:
            raise ValidationError(f"density matrix has trace {tr}")
        # positivity: Cholesky of ρ + tol·I succeeds iff λ_min > -tol (up to rounding)
        try:
            np.linalg.cholesky(0.5 * (m + m.conj().T) + DENSITY_TOL * np.eye(m.shape[0]))
        except np.linalg.LinAlgError:
            raise ValidationError("density matrix has an eigenvalue below -1e-10") from None
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_pure(cls, psi, dims: Sequence[int]) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        psi = psi / np.linalg.norm(psi)
        return cls(tuple(dims), np.outer(psi, psi.conj()))

    def reduced(self, keep_sites: Iterable[int]) -> np.ndarray:
        return tensor.reduced(self.matrix, self.dims, keep_sites)


@dataclass(frozen=True)
class GibbsState:
    rho: DensityMatrix
    Z: float
    log_Z: float


def embed(term: PauliTerm, graph: SiteGraph) -> np.ndarray:
    """Full-space matrix ``coeff · ⊗_v M_v`` with ``M_v`` the term's Pauli on its sites, identity elsewhere."""
    n = graph.vertex_count
    letters = dict(zip(term.sites, term.paulis))
    if any(s < 0 or s >= n for s in letters):
        raise ValidationError(f"term sites {term.sites} out of range for {n} sites")
    factors = []
    for v in range(n):
        if v in letters:
            if graph.local_dims[v] != 2:
                raise ValidationError(f"Pauli operator on non-qubit site {v}")
            factors.append(PAULI[letters[v]])
        else:
            factors.append(np.eye(graph.local_dims[v], dtype=complex))
    return term.coeff * tensor.kron_all(factors)


def group_operator(h: LocalHamiltonian, group: TermGroup | str) -> np.ndarray:
    """Full-space matrix of one term group ``h_Q``."""
    if isinstance(group, str):
        group = h.group(group)
    tensor.check_capacity(h.dim)
    out = np.zeros((h.dim, h.dim), dtype=complex)
    for term in group.terms:
        out += embed(term, h.graph)
    return out


def build_hamiltonian(h: LocalHamiltonian) -> np.ndarray:
    """Full-space matrix of ``H = Σ_Q h_Q``."""
    tensor.check_capacity(h.dim)
    out = np.zeros((h.dim, h.dim), dtype=complex)
    for grp in h.groups:
        out += group_operator(h, grp)
    return out


@dataclass(frozen=True)
class CommutationReport:
    """Frobenius norms of ``[h_Q, h_Q']`` for every unordered pair of groups.

    Each entry of ``pairs`` is ``(name, name', norm, scale)`` where ``scale``
    is ``||h_Q||_F · ||h_Q'||_F``; a pair commutes when ``norm <= tol * scale``.
    """

    pairs: tuple
    tol: float

    @property
    def non_commuting(self) -> list[tuple[str, str]]:
        return [(a, b) for a, b, norm, scale in self.pairs if norm > self.tol * scale]

    @property
    def all_commute(self) -> bool:
        return not self.non_commuting

    def to_dict(self) -> dict:
        return {
            "all_commute": self.all_commute,
            "tol": self.tol,
            "pairs": [{"a": a, "b": b, "norm": norm, "commute": norm <= self.tol * scale}
                      for a, b, norm, scale in self.pairs],
        }


def commutation_audit(h: LocalHamiltonian, tol: float = COMMUTE_TOL) -> CommutationReport:
    """Commutator norms of all term-group pairs on the full space.

    Groups with disjoint supports commute identically and are reported with
    norm 0 without forming the product.
    """
    ops = {grp.name: group_operator(h, grp) for grp in h.groups}
    norms = {name: float(np.linalg.norm(op)) for name, op in ops.items()}
    pairs = []
    for ga, gb in itertools.combinations(h.groups, 2):
        scale = norms[ga.name] * norms[gb.name]
        if set(ga.support).isdisjoint(gb.support):
            pairs.append((ga.name, gb.name, 0.0, scale))
            continue
        a, b = ops[ga.name], ops[gb.name]
        pairs.append((ga.name, gb.name, float(np.linalg.norm(a @ b - b @ a)), scale))
    return CommutationReport(tuple(pairs), tol)


def gibbs_state(H, beta: float, dims: Sequence[int]) -> GibbsState:
    """Thermal state ``exp(-βH)/Z`` via the spectrum of ``H``.

    The spectrum is shifted by its minimum before exponentiating so that large
    ``β`` does not overflow; ``Z`` and ``log_Z`` refer to the unshifted ``H``.
    """
    H = tensor.as_matrix(H)
    if not math.isfinite(beta) or beta < 0:
        raise ValidationError(f"beta must be finite and nonnegative, got {beta}")
    dims = tuple(int(d) for d in dims)
    if math.prod(dims) != H.shape[0]:
        raise ValidationError(f"dims {dims} do not match Hamiltonian dimension {H.shape[0]}")
    tensor.check_capacity(H.shape[0])
    eig = tensor.eigh(H)
    e_min = float(eig.eigenvalues[0])
    weights = np.exp(-beta * (eig.eigenvalues - e_min))
    z_shifted = float(weights.sum())
    rho = tensor.matrix_function(H, lambda e: math.exp(-beta * (e - e_min)) / z_shifted, eig=eig)
    log_z = math.log(z_shifted) - beta * e_min
    try:
        z = math.exp(log_z)
    except OverflowError:
        z = math.inf
    return GibbsState(DensityMatrix(dims, rho), z, log_z)


def von_neumann_entropy(rho) -> float:
    """``-tr(ρ ln ρ)`` in nats; eigenvalues below 1e-14 contribute nothing."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else tensor.as_matrix(rho)
    w = tensor.eigh(m).eigenvalues
    w = w[w > EIGEN_CLAMP]
    s = float(-np.sum(w * np.log(w)))
    return min(max(s, 0.0), math.log(m.shape[0]))


def _subsystem_entropy(rho: DensityMatrix, sites: frozenset, cache: dict) -> float:
    if not sites:
        return 0.0
    if sites not in cache:
        m = rho.matrix if len(sites) == len(rho.dims) else rho.reduced(sites)
        cache[sites] = von_neumann_entropy(m)
    return cache[sites]


def quantum_cmi(rho: DensityMatrix, t: SeparatorTriple, _cache: dict | None = None) -> float:
    """``I(A:C|B) = S(A,B) + S(C,B) - S(A,B,C) - S(B)`` in nats.

    Sites outside ``A ∪ B ∪ C`` are traced out.
    """
    n = len(rho.dims)
    if any(s < 0 or s >= n for s in t.all):
        raise ValidationError(f"triple {t} out of range for {n} sites")
    cache = {} if _cache is None else _cache
    a, b, c = t.A, t.B, t.C
    return (_subsystem_entropy(rho, a | b, cache) + _subsystem_entropy(rho, c | b, cache)
            - _subsystem_entropy(rho, a | b | c, cache) - _subsystem_entropy(rho, b, cache))


def is_quantum_markov_network(h: LocalHamiltonian, beta: float, max_A: int = 2, tol: float = CMI_TOL,
                              triples: Sequence[SeparatorTriple] | None = None) -> MarkovReport:
    """Evaluate ``I(A:C|B)`` of the Gibbs state on every separator triple of ``h.graph``."""
    tensor.check_capacity(h.dim)
    if triples is None:
        triples = separator_triples(h.graph, max_A)
    else:
        for t in triples:
            validate_triple(h.graph, t)
    rho = gibbs_state(build_hamiltonian(h), beta, h.dims).rho
    cache: dict = {}
    return MarkovReport(tuple((t, quantum_cmi(rho, t, cache)) for t in triples), tol)


@dataclass(frozen=True)
class FactorizationGap:
    """``Tr exp(-βH)`` against the site-by-site partial-trace evaluation.

    ``sequential`` starts from the first site of the chain, ``reverse`` from
    the last.  Gaps are ``|exact - sequential| / exact``.
    """

    exact_Z: float
    sequential: complex
    reverse: complex

    @property
    def gap(self) -> float:
        return abs(self.exact_Z - self.sequential) / self.exact_Z

    @property
    def reverse_gap(self) -> float:
        return abs(self.exact_Z - self.reverse) / self.exact_Z

    def to_dict(self) -> dict:
        return {"exact_Z": self.exact_Z, "sequential": self.sequential.real, "reverse": self.reverse.real,
                "gap": self.gap, "reverse_gap": self.reverse_gap}


def _chain_local_exponentials(h: LocalHamiltonian, beta: float) -> list[np.ndarray]:
    n = h.graph.vertex_count
    supports = [grp.support for grp in h.groups]
    if n < 2 or supports != [(k, k + 1) for k in range(n - 1)]:
        raise ValidationError(
            f"factorization gap needs groups on consecutive chain edges (0,1), (1,2), ...; got {supports}")
    out = []
    for grp, (i, j) in zip(h.groups, supports):
        local = SiteGraph.from_edges(2, [(0, 1)], (h.dims[i], h.dims[j]))
        op = np.zeros((h.dims[i] * h.dims[j],) * 2, dtype=complex)
        for term in grp.terms:
            op += embed(PauliTerm(tuple(s - i for s in term.sites), term.paulis, term.coeff), local)
        out.append(tensor.matrix_function(op, lambda e: math.exp(-beta * e)))
    return out


def factorization_gap(h: LocalHamiltonian, beta: float) -> FactorizationGap:
    """Compare ``Tr exp(-βH)`` with the nested evaluation
    ``Tr_{BC...}{ Tr_A(e^{-βh_AB}) e^{-βh_BC} ... }``.

    The nested form carries a single-site operator along the chain: multiply
    it into the next bond exponential and trace out the site just passed.  It
    equals the trace of the ordered product of bond exponentials, which agrees
    with ``Tr exp(-βH)`` when the bond terms commute.
    """
    dims = h.dims
    bonds = _chain_local_exponentials(h, beta)
    exact = float(np.sum(np.exp(-beta * tensor.eigh(build_hamiltonian(h)).eigenvalues)))

    carry = np.eye(dims[0], dtype=complex)
    for k, bond in enumerate(bonds):
        step = np.kron(carry, np.eye(dims[k + 1])) @ bond
        carry = tensor.partial_trace(step, [dims[k], dims[k + 1]], [0])
    forward = complex(np.trace(carry))

    n = len(dims)
    carry = np.eye(dims[-1], dtype=complex)
    for k in range(n - 2, -1, -1):
        step = np.kron(np.eye(dims[k]), carry) @ bonds[k]
        carry = tensor.partial_trace(step, [dims[k], dims[k + 1]], [1])
    reverse = complex(np.trace(carry))
    return FactorizationGap(exact, forward, reverse)


def five_spin_preset(h1: float, h2: float, h3: float) -> LocalHamiltonian:
    """Five-qubit XX chain with local fields, split into four bond groups.

    Sites are 0-based (spin ``k`` of the usual 1-based labelling is site
    ``k-1``).  The field ``h2`` on the middle site is shared equally between
    the two bonds that touch it, so those bonds fail to commute whenever
    ``h2 != 0``::

        h12 = X0 X1 + h1 Z0
        h23 = X1 X2 + (h2/2) Z2
        h34 = X2 X3 + (h2/2) Z2
        h45 = X3 X4 + h3 Z4
    """
    g = SiteGraph.path(5)
    groups = (
        TermGroup("h12", (0, 1), (PauliTerm((0, 1), "XX"), PauliTerm((0,), "Z", h1))),
        TermGroup("h23", (1, 2), (PauliTerm((1, 2), "XX"), PauliTerm((2,), "Z", h2 / 2))),
        TermGroup("h34", (2, 3), (PauliTerm((2, 3), "XX"), PauliTerm((2,), "Z", h2 / 2))),
        TermGroup("h45", (3, 4), (PauliTerm((3, 4), "XX"), PauliTerm((4,), "Z", h3))),
    )
    return LocalHamiltonian(g, groups)


FIVE_SPIN_TRIPLE = SeparatorTriple(frozenset({0, 1}), frozenset({2}), frozenset({3, 4}))
