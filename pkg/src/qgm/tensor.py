"""Dense complex linear algebra for small many-body operators.

Matrices are plain square ``numpy`` arrays of complex dtype.  Multi-site
operators use the convention that site 0 is the most significant Kronecker
factor, so ``kron(A0, A1, ..., An)`` places ``A0`` on site 0.

The Hermitian eigensolver is a cyclic complex Jacobi iteration.  It is slower
than LAPACK but short enough to audit line by line, and at the sizes this
package targets (a handful of qubits) speed is not the constraint.
"""

from __future__ import annotations

import math
import os
from functools import reduce
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import CapacityError, DomainError, NumericalError, ValidationError

DEFAULT_MAX_DIM = 2**14
HERMITIAN_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
JACOBI_REL_TOL = 1e-14


def max_dim() -> int:
    """Capacity cap on total Hilbert dimension; ``QGM_MAX_DIM`` overrides the default."""
    raw = os.environ.get("QGM_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"QGM_MAX_DIM must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValidationError(f"QGM_MAX_DIM must be positive, got {value}")
    return value


def check_capacity(dim: int, limit: int | None = None) -> None:
    limit = max_dim() if limit is None else limit
    if dim > limit:
        raise CapacityError(f"dimension {dim} exceeds capacity {limit}")


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a square complex matrix, raising ValidationError otherwise."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def kron(a, b, limit: int | None = None) -> np.ndarray:
    """Kronecker product ``a ⊗ b``.

    Entry ``(i*db + k, j*db + l)`` of the result is ``a[i, j] * b[k, l]``.

    Raises:
        CapacityError: if ``a.dim * b.dim`` exceeds the capacity cap.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    check_capacity(a.shape[0] * b.shape[0], limit)
    return np.kron(a, b)


def kron_all(factors: Sequence, limit: int | None = None) -> np.ndarray:
    """Left-to-right Kronecker product of ``factors`` (first factor most significant)."""
    if not factors:
        return np.ones((1, 1), dtype=complex)
    return reduce(lambda x, y: kron(x, y, limit), factors)


class HermitianEigen(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings of ``range(n)`` covering every unordered pair once (circle method).

    Pairs within a round are disjoint, so their rotations commute and can be
    applied together.
    """
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            a, b = players[k], players[m - 1 - k]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _jacobi_sweep(a: np.ndarray, v: np.ndarray, rounds) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    for p, q in rounds:
        apq = a[p, q]
        r = np.abs(apq)
        app = a[p, p].real
        aqq = a[q, q].real
        # leave entries that are exactly zero or negligible next to both diagonal entries
        active = (r > 1e-300) & ~((r < 1e-18 * np.abs(app)) & (r < 1e-18 * np.abs(aqq)))
        if not active.any():
            a[p, q] = a[q, p] = 0.0
            continue
        safe_r = np.where(active, r, 1.0)
        phase = np.where(active, apq / safe_r, 1.0)
        tau = (aqq - app) / (2.0 * safe_r)
        t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
        t = np.where(active, t, 0.0)
        c = 1.0 / np.sqrt(1.0 + t * t)
        s = t * c
        rot = np.eye(n, dtype=complex)
        rot[p, p] = c
        rot[q, q] = c
        rot[p, q] = s * phase
        rot[q, p] = -s * phase.conj()
        a = rot.conj().T @ a @ rot
        v = v @ rot
        a[p, q] = a[q, p] = 0.0
        a = 0.5 * (a + a.conj().T)
    return a, v


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def eigh(a, herm_tol: float = HERMITIAN_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS,
         rel_tol: float = JACOBI_REL_TOL) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Args:
        a: Hermitian matrix.
        herm_tol: Allowed per-entry deviation from Hermiticity, scaled by
            ``max(1, max|a|)``.
        max_sweeps: Iteration cap on full sweeps over the upper triangle.
        rel_tol: Convergence threshold on the off-diagonal Frobenius norm,
            relative to ``||a||_F``.

    Returns:
        HermitianEigen with eigenvalues in ascending order and the matching
        unitary matrix of column eigenvectors.

    Raises:
        ValidationError: ``a`` is not Hermitian.
        NumericalError: no convergence within ``max_sweeps``.
    """
    a = as_matrix(a)
    scale = float(np.max(np.abs(a)))
    if not is_hermitian(a, herm_tol * max(1.0, scale)):
        raise ValidationError("eigh requires a Hermitian matrix")
    n = a.shape[0]
    work = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    target = rel_tol * float(np.linalg.norm(work))

    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        if _off_norm(work) <= target:
            break
        work, v = _jacobi_sweep(work, v, rounds)
    else:
        if _off_norm(work) > target:
            raise NumericalError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")

    w = np.diag(work).real.copy()
    order = np.argsort(w, kind="stable")
    return HermitianEigen(w[order], v[:, order])


def matrix_function(a, f: Callable[[float], float], eig: HermitianEigen | None = None) -> np.ndarray:
    """Spectral functional calculus ``V diag(f(λ)) V†`` for Hermitian ``a``.

    ``f`` is a real scalar map applied to each eigenvalue.  A precomputed
    decomposition may be passed as ``eig`` to avoid a second eigensolve.

    Raises:
        DomainError: ``f`` raises or returns a non-finite value at an eigenvalue.
    """
    if eig is None:
        eig = eigh(a)
    w, v = eig
    values = np.empty(len(w))
    for i, lam in enumerate(w):
        try:
            values[i] = f(float(lam))
        except (ValueError, ArithmeticError) as exc:
            raise DomainError(f"function undefined at eigenvalue {lam:.6g}: {exc}") from exc
    if not np.all(np.isfinite(values)):
        bad = w[~np.isfinite(values)][0]
        raise DomainError(f"function not finite at eigenvalue {bad:.6g}")
    out = (v * values) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def expm_series(a, terms: int = 30) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated Taylor series.

    Independent of :func:`eigh`; used as a cross-check for spectral results.
    """
    a = as_matrix(a)
    norm = float(np.max(np.sum(np.abs(a), axis=0)))
    squarings = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0 else 0
    b = a / (2.0**squarings)
    n = a.shape[0]
    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, terms + 1):
        term = term @ b / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


def _check_dims(rho: np.ndarray, dims: Sequence[int]) -> list[int]:
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise ValidationError(f"site dimensions must be positive, got {dims}")
    if math.prod(dims) != rho.shape[0]:
        raise ValidationError(f"product of dims {dims} does not match matrix dimension {rho.shape[0]}")
    return dims


def partial_trace(rho, dims: Sequence[int], traced_sites) -> np.ndarray:
    """Trace out ``traced_sites`` from an operator on ``⊗ dims``.

    The kept sites stay in ascending order.  Tracing every site returns the
    1×1 matrix ``[[tr(rho)]]``.
    """
    rho = as_matrix(rho)
    dims = _check_dims(rho, dims)
    n = len(dims)
    traced = sorted(set(int(s) for s in traced_sites))
    if any(s < 0 or s >= n for s in traced):
        raise ValidationError(f"traced sites {traced} out of range for {n} sites")
    kept = [s for s in range(n) if s not in traced]
    dk = math.prod(dims[s] for s in kept)
    dt = math.prod(dims[s] for s in traced)
    t = rho.reshape(dims + dims)
    perm = kept + traced + [n + s for s in kept] + [n + s for s in traced]
    t = t.transpose(perm).reshape(dk, dt, dk, dt)
    return np.einsum("itjt->ij", t)


def reduced(rho, dims: Sequence[int], keep_sites) -> np.ndarray:
    """Reduced operator on ``keep_sites`` (the complement is traced out)."""
    keep = set(int(s) for s in keep_sites)
    return partial_trace(rho, dims, [s for s in range(len(dims)) if s not in keep])
