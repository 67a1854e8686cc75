"""Classical Markov random fields over explicit probability tables.

Joint distributions are stored as full tables, so everything here is exact
but exponential in the number of variables.  Tables are capped at
``MAX_JOINT_STATES`` entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CapacityError, ValidationError
from .graph import MarkovReport, SeparatorTriple, SiteGraph, separator_triples, validate_triple

MAX_JOINT_STATES = 2**20
CMI_TOL = 1e-9
NORMALIZATION_TOL = 1e-12
BP_MESSAGE_TOL = 1e-12


def _check_states(dims: Sequence[int]) -> int:
    total = math.prod(dims)
    if total > MAX_JOINT_STATES:
        raise CapacityError(f"joint table with {total} states exceeds cap {MAX_JOINT_STATES}")
    return total


@dataclass(frozen=True)
class JointTable:
    """Probability table ``P(x_0, ..., x_{n-1})`` over the vertices of ``graph``.

    ``probs`` is flat, in mixed-radix order with site 0 most significant;
    ``tensor`` gives the same data with one axis per vertex.
    ``normalizer`` holds the partition function when the table was built from
    unnormalized factors.
    """

    graph: SiteGraph
    probs: np.ndarray
    normalizer: float | None = None

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        expected = _check_states(self.graph.local_dims)
        if p.size != expected:
            raise ValidationError(f"table has {p.size} entries, graph needs {expected}")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValidationError("probabilities must be finite and nonnegative")
        if abs(p.sum() - 1.0) > NORMALIZATION_TOL * max(1, p.size) ** 0.5 + NORMALIZATION_TOL:
            raise ValidationError(f"probabilities sum to {p.sum():.15g}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_tensor(cls, graph: SiteGraph, weights, normalize: bool = True) -> "JointTable":
        w = np.asarray(weights, dtype=float)
        z = float(w.sum())
        if normalize:
            if not z > 0:
                raise ValidationError("cannot normalize a table with zero total weight")
            w = w / z
        return cls(graph, w.reshape(-1), z if normalize else None)

    @property
    def tensor(self) -> np.ndarray:
        return self.probs.reshape(self.graph.local_dims)

    def marginal(self, subset: Iterable[int]) -> np.ndarray:
        """Marginal table over ``subset``, axes in ascending vertex order."""
        keep = sorted(set(int(v) for v in subset))
        if any(v < 0 or v >= self.graph.vertex_count for v in keep):
            raise ValidationError(f"subset {keep} out of range")
        drop = tuple(v for v in self.graph.vertices if v not in keep)
        return self.tensor.sum(axis=drop) if drop else self.tensor


@dataclass(frozen=True)
class CliquePotential:
    """Positive factor ``W(c)`` over the vertices in ``support``.

    ``table`` has one axis per support vertex, in the order given by ``support``.
    """

    support: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self):
        support = tuple(int(v) for v in self.support)
        if len(set(support)) != len(support) or not support:
            raise ValidationError(f"support must be nonempty and repetition-free, got {support}")
        table = np.asarray(self.table, dtype=float)
        if table.ndim != len(support):
            raise ValidationError(f"table has {table.ndim} axes for support of size {len(support)}")
        if not np.all(table > 0) or not np.all(np.isfinite(table)):
            raise ValidationError("clique potentials must be strictly positive and finite")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "table", table)


@dataclass(frozen=True)
class PairwiseModel:
    """Pairwise MRF: node potentials (evidence folded in) and hidden-hidden edge potentials.

    ``edge_potentials`` maps ``(i, j)`` with ``i < j`` to a table of shape
    ``(d_i, d_j)``.
    """

    graph: SiteGraph
    node_potentials: tuple
    edge_potentials: Mapping = field(default_factory=dict)

    def __post_init__(self):
        g = self.graph
        nodes = tuple(np.asarray(t, dtype=float) for t in self.node_potentials)
        if len(nodes) != g.vertex_count:
            raise ValidationError(f"{len(nodes)} node potentials for {g.vertex_count} vertices")
        for v, t in enumerate(nodes):
            if t.shape != (g.local_dims[v],):
                raise ValidationError(f"node potential {v} has shape {t.shape}")
            if not np.all(t > 0):
                raise ValidationError(f"node potential {v} must be strictly positive")
        edges = {}
        for (i, j), t in self.edge_potentials.items():
            t = np.asarray(t, dtype=float)
            i, j = int(i), int(j)
            if i > j:
                i, j, t = j, i, t.T
            if (i, j) not in g.edges:
                raise ValidationError(f"edge potential on non-edge {(i, j)}")
            if (i, j) in edges:
                raise ValidationError(f"duplicate edge potential for {(i, j)}")
            if t.shape != (g.local_dims[i], g.local_dims[j]):
                raise ValidationError(f"edge potential {(i, j)} has shape {t.shape}")
            if not np.all(t > 0):
                raise ValidationError(f"edge potential {(i, j)} must be strictly positive")
            edges[(i, j)] = t
        missing = g.edges - edges.keys()
        if missing:
            raise ValidationError(f"missing edge potentials for {sorted(missing)}")
        object.__setattr__(self, "node_potentials", nodes)
        object.__setattr__(self, "edge_potentials", edges)

    def to_dict(self) -> dict:
        return {
            "graph": self.graph.to_dict(),
            "node_potentials": {str(v): t.tolist() for v, t in enumerate(self.node_potentials)},
            "edge_potentials": {f"{i},{j}": t.tolist() for (i, j), t in sorted(self.edge_potentials.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PairwiseModel":
        try:
            g = SiteGraph.from_dict(data["graph"])
            raw_nodes = data.get("node_potentials", {})
            nodes = [raw_nodes.get(str(v), [1.0] * g.local_dims[v]) for v in g.vertices]
            edges = {}
            for key, table in data.get("edge_potentials", {}).items():
                i, j = (int(x) for x in key.replace("-", ",").split(","))
                edges[(i, j)] = table
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ValidationError(f"malformed pairwise model: {exc}") from exc
        return cls(g, tuple(nodes), edges)


def shannon_entropy(p: JointTable, subset: Iterable[int] | None = None) -> float:
    """Shannon entropy in nats of the marginal of ``p`` on ``subset`` (all vertices by default)."""
    subset = p.graph.vertices if subset is None else list(subset)
    if not subset:
        return 0.0
    q = p.marginal(subset).reshape(-1)
    q = q[q > 0]
    return float(max(-np.sum(q * np.log(q)), 0.0))


def classical_cmi(p: JointTable, t: SeparatorTriple) -> float:
    """``I(A:C|B) = H(A,B) + H(C,B) - H(A,B,C) - H(B)`` in nats.

    ``A ∪ B ∪ C`` may be a strict subset of the vertices; the rest is
    marginalized out.
    """
    a, b, c = t.A, t.B, t.C
    return (shannon_entropy(p, a | b) + shannon_entropy(p, c | b)
            - shannon_entropy(p, a | b | c) - shannon_entropy(p, b))


def is_markov_network(g: SiteGraph, p: JointTable, max_A: int = 2, tol: float = CMI_TOL,
                      triples: Sequence[SeparatorTriple] | None = None) -> MarkovReport:
    """Check conditional independence of ``A`` and ``V-A-n(A)`` given ``n(A)``.

    By default every triple from :func:`separator_triples` is checked; pass
    ``triples`` to check an explicit list instead.
    """
    if tuple(g.local_dims) != tuple(p.graph.local_dims):
        raise ValidationError("graph arities do not match the joint table")
    if triples is None:
        triples = separator_triples(g, max_A)
    else:
        for t in triples:
            validate_triple(g, t)
    return MarkovReport(tuple((t, classical_cmi(p, t)) for t in triples), tol)


def _product_of_factors(dims: Sequence[int], factors: Iterable[tuple[Sequence[int], np.ndarray]]) -> np.ndarray:
    n = len(dims)
    w = np.ones(dims, dtype=float)
    for support, table in factors:
        order = np.argsort(support)
        axes = [support[k] for k in order]
        t = np.transpose(table, order)
        shape = [1] * n
        for ax in axes:
            shape[ax] = dims[ax]
        w = w * t.reshape(shape)
    return w


def hc_factorize(g: SiteGraph, potentials: Sequence[CliquePotential]) -> JointTable:
    """Normalized product of clique potentials, ``P = (1/Z) Π_c W(c)``.

    The partition function ``Z`` is kept in ``JointTable.normalizer``.

    Raises:
        ValidationError: a support is not a clique of ``g`` or a table shape
            disagrees with the vertex arities.
    """
    _check_states(g.local_dims)
    factors = []
    for pot in potentials:
        if any(v < 0 or v >= g.vertex_count for v in pot.support):
            raise ValidationError(f"support {pot.support} out of range")
        if not g.is_clique(pot.support):
            raise ValidationError(f"support {pot.support} is not a clique of the graph")
        expected = tuple(g.local_dims[v] for v in pot.support)
        if pot.table.shape != expected:
            raise ValidationError(f"potential on {pot.support} has shape {pot.table.shape}, expected {expected}")
        factors.append((pot.support, pot.table))
    return JointTable.from_tensor(g, _product_of_factors(g.local_dims, factors))


def pairwise_joint(m: PairwiseModel) -> JointTable:
    """Joint distribution of a pairwise MRF: node potentials times edge potentials, normalized."""
    pots = [CliquePotential((v,), t) for v, t in enumerate(m.node_potentials)]
    pots += [CliquePotential(e, t) for e, t in sorted(m.edge_potentials.items())]
    return hc_factorize(m.graph, pots)


def transfer_matrix_Z(chain_terms: Sequence, arities: Sequence[int]) -> float:
    """Partition function ``Σ exp(-Σ_i h_i(x_i, x_{i+1}))`` of an open chain.

    Sums out one variable at a time: ``Z_{1,2}(x_2) = Σ_{x_1} e^{-h(x_1,x_2)}``,
    then ``Z_{2,3}(x_3) = Σ_{x_2} Z_{1,2}(x_2) e^{-h(x_2,x_3)}``, and so on.

    Args:
        chain_terms: ``N-1`` tables, entry ``k`` of shape ``(arities[k], arities[k+1])``.
        arities: number of states of each of the ``N >= 2`` variables.
    """
    arities = [int(d) for d in arities]
    if len(arities) < 2:
        raise ValidationError("a chain needs at least two variables")
    if len(chain_terms) != len(arities) - 1:
        raise ValidationError(f"{len(chain_terms)} edge terms for {len(arities)} variables")
    z = np.ones(arities[0])
    for k, h in enumerate(chain_terms):
        h = np.asarray(h, dtype=float)
        if h.shape != (arities[k], arities[k + 1]):
            raise ValidationError(f"edge term {k} has shape {h.shape}")
        z = z @ np.exp(-h)
    return float(z.sum())


@dataclass(frozen=True)
class BPResult:
    marginals: tuple
    converged: bool
    iterations: int


def sum_product_bp(m: PairwiseModel, max_iters: int = 200, damping: float | None = None,
                   tol: float = BP_MESSAGE_TOL) -> BPResult:
    """Synchronous sum-product belief propagation on a pairwise model.

    Exact on trees and forests.  On loopy graphs the result is the fixed point
    reached (if any); check ``converged``.  ``damping`` defaults to 0 on
    forests and 0.5 otherwise; each update is ``(1-damping)*new + damping*old``.
    """
    g = m.graph
    if damping is None:
        damping = 0.0 if g.is_forest() else 0.5
    if not 0.0 <= damping < 1.0:
        raise ValidationError(f"damping must lie in [0, 1), got {damping}")
    phi = m.node_potentials

    def psi(i, j):
        return m.edge_potentials[(i, j)] if i < j else m.edge_potentials[(j, i)].T

    directed = [(i, j) for i, j in sorted(g.edges)] + [(j, i) for i, j in sorted(g.edges)]
    msgs = {(i, j): np.full(g.local_dims[j], 1.0 / g.local_dims[j]) for i, j in directed}

    converged = not directed
    iterations = 0
    for iterations in range(1, max_iters + 1 if directed else 1):
        new = {}
        for i, j in directed:
            incoming = phi[i].copy()
            for k in g.adjacent(i):
                if k != j:
                    incoming *= msgs[(k, i)]
            out = incoming @ psi(i, j)
            out /= out.sum()
            new[(i, j)] = (1.0 - damping) * out + damping * msgs[(i, j)]
        delta = max(float(np.max(np.abs(new[e] - msgs[e]))) for e in directed)
        msgs = new
        if delta < tol:
            converged = True
            break

    marginals = []
    for v in g.vertices:
        b = phi[v].copy()
        for k in g.adjacent(v):
            b *= msgs[(k, v)]
        marginals.append(b / b.sum())
    return BPResult(tuple(marginals), converged, iterations)


EXACT_DENOISE_PIXELS = 16
MAX_DENOISE_SIDE = 8


def parse_grid(text: str) -> np.ndarray:
    """Parse a text image of ``0``/``1`` characters, one row per line."""
    rows = [line.strip() for line in text.splitlines() if line.strip()]
    if not rows:
        raise ValidationError("empty image")
    if any(len(r) != len(rows[0]) for r in rows):
        raise ValidationError("image rows have unequal lengths")
    if any(ch not in "01" for r in rows for ch in r):
        raise ValidationError("image may contain only '0' and '1'")
    return np.array([[int(ch) for ch in r] for r in rows], dtype=int)


def format_grid(grid) -> str:
    return "\n".join("".join(str(int(x)) for x in row) for row in np.asarray(grid)) + "\n"


def denoise_model(noisy, coupling: float, evidence_strength: float) -> PairwiseModel:
    """Grid MRF with ``Ψ(x_i,x_j) = exp(coupling·[x_i=x_j])`` and ``Φ(x_i) = exp(evidence·[x_i=y_i])``."""
    y = np.asarray(noisy, dtype=int)
    rows, cols = y.shape
    g = SiteGraph.grid(rows, cols)
    nodes = []
    for v in g.vertices:
        obs = y.flat[v]
        nodes.append(np.array([math.exp(evidence_strength * (x == obs)) for x in (0, 1)]))
    same = np.array([[math.exp(coupling), 1.0], [1.0, math.exp(coupling)]])
    return PairwiseModel(g, tuple(nodes), {e: same for e in g.edges})


def denoise_demo(noisy_image, coupling: float, evidence_strength: float) -> np.ndarray:
    """Restore a binary image by per-pixel argmax of posterior marginals.

    Images with at most 16 pixels use exact marginals from the full joint
    table; larger ones (up to 8×8) use loopy belief propagation.  Ties go to 0.
    """
    y = np.asarray(noisy_image, dtype=int)
    if y.ndim != 2 or y.size == 0:
        raise ValidationError("image must be a nonempty 2-D grid")
    if np.any((y != 0) & (y != 1)):
        raise ValidationError("image pixels must be 0 or 1")
    if max(y.shape) > MAX_DENOISE_SIDE:
        raise CapacityError(f"image {y.shape} exceeds {MAX_DENOISE_SIDE}x{MAX_DENOISE_SIDE}")
    model = denoise_model(y, coupling, evidence_strength)
    if y.size <= EXACT_DENOISE_PIXELS:
        joint = pairwise_joint(model)
        p1 = np.array([joint.marginal([v])[1] for v in model.graph.vertices])
    else:
        p1 = np.array([b[1] for b in sum_product_bp(model).marginals])
    return (p1 > 0.5).astype(int).reshape(y.shape)
