"""Truncated Fock-space linear algebra and entropy primitives.

Density matrices live on a tensor product of truncated occupation-number
spaces (optionally with qubit factors). Storage is dense for small matrices;
large, structurally sparse states (the dual-rail joint states) may carry a
``scipy.sparse`` matrix instead, and every primitive here accepts either.

All entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import CapacityError, InputError, PositivityError, StructuralError

HERMITIAN_TOL = 1e-9
POSITIVITY_TOL = 1e-10
CLIP_THRESHOLD = 1e-15
NORMALIZATION_TOL = 1e-9
DIAGONAL_TOL = 1e-10

# components larger than this are solved one at a time instead of batched
_BATCH_BLOCK_LIMIT = 64

Matrix = Union[np.ndarray, sp.sparray, sp.spmatrix]


@dataclass(frozen=True)
class TruncationPolicy:
    """How far the infinite occupation-number sums are followed.

    Attributes:
        tail_epsilon: largest neglected probability mass per mode.
        max_dim: cap on a single truncated Fock factor (and on the total
            dimension of dense matrices).
    """

    tail_epsilon: float = 1e-14
    max_dim: int = 4096

    def __post_init__(self):
        if not 0.0 < self.tail_epsilon < 1.0:
            raise InputError(f"tail_epsilon must lie in (0, 1), got {self.tail_epsilon}")
        if int(self.max_dim) != self.max_dim or self.max_dim < 2:
            raise InputError(f"max_dim must be an integer >= 2, got {self.max_dim}")


DEFAULT_POLICY = TruncationPolicy()


def _as_factors(factors: Iterable[int]) -> tuple[int, ...]:
    out = tuple(int(f) for f in factors)
    if not out or any(f < 1 for f in out):
        raise InputError(f"factors must be a non-empty list of positive integers, got {factors}")
    return out


def _max_abs(m: Matrix) -> float:
    if sp.issparse(m):
        return float(abs(m).max()) if m.nnz else 0.0
    return float(np.max(np.abs(m))) if m.size else 0.0


@dataclass(frozen=True)
class FockDensityMatrix:
    """A Hermitian operator on a tensor product of subsystems.

    ``factors`` lists the subsystem dimensions in order, e.g. ``(2, N)`` for a
    qubit tensored with a truncated mode or ``(2, N, N)`` for dual rail. The
    entries are symmetrized on construction, so Hermiticity holds exactly.
    Positivity and trace are checked by the consumers that need them.
    """

    entries: Matrix
    factors: tuple[int, ...]

    def __post_init__(self):
        factors = _as_factors(self.factors)
        object.__setattr__(self, "factors", factors)
        m = self.entries
        if sp.issparse(m):
            m = sp.csr_array(m)
        else:
            m = np.asarray(m)
            if m.dtype.kind not in "fc":
                m = m.astype(float)
        total = int(np.prod(factors))
        if m.ndim != 2 or m.shape != (total, total):
            raise InputError(f"entries of shape {m.shape} do not match factors {factors}")
        asym = _max_abs(m - m.conj().T)
        if asym > HERMITIAN_TOL * max(1.0, _max_abs(m)):
            raise StructuralError(f"matrix is not Hermitian (max asymmetry {asym:.3g})")
        m = (m + m.conj().T) / 2
        if sp.issparse(m):
            m = sp.csr_array(m)
            m.eliminate_zeros()
            if m.dtype.kind == "c" and not np.any(m.data.imag):
                m = m.real
        else:
            if m.dtype.kind == "c" and not np.any(m.imag):
                m = m.real.copy()
            m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        """Total matrix dimension (product of the factors)."""
        return int(np.prod(self.factors))

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.entries)

    def trace(self) -> float:
        return float(np.real(self.entries.diagonal().sum()))

    def diagonal(self) -> np.ndarray:
        return np.real(np.asarray(self.entries.diagonal()))

    def to_dense(self) -> np.ndarray:
        if self.is_sparse:
            return self.entries.toarray()
        return np.array(self.entries)

    def is_diagonal(self, tol: float = DIAGONAL_TOL) -> bool:
        m = self.entries
        if sp.issparse(m):
            off = sp.csr_array(m - sp.diags_array(m.diagonal()))
            return _max_abs(off) <= tol
        off = m - np.diag(np.diag(m))
        return _max_abs(off) <= tol


@dataclass(frozen=True)
class SpectralResult:
    """Eigenvalues of a Hermitian matrix, sorted in descending order."""

    eigenvalues: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.sort(np.asarray(self.eigenvalues, dtype=float))[::-1].copy()
        vals.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)

    @property
    def total(self) -> float:
        return float(np.sum(self.eigenvalues))

    def __len__(self):
        return len(self.eigenvalues)


def density_matrix(entries, factors: Sequence[int] | None = None) -> FockDensityMatrix:
    """Wrap a matrix; ``factors`` defaults to a single subsystem."""
    if factors is None:
        factors = (entries.shape[0],)
    return FockDensityMatrix(entries, tuple(factors))


def diagonal_state(probabilities, factors: Sequence[int] | None = None) -> FockDensityMatrix:
    p = np.asarray(probabilities, dtype=float)
    return density_matrix(np.diag(p), factors or (len(p),))


def _block_spectrum(m: Matrix) -> np.ndarray:
    """Eigenvalues via the connected components of the sparsity graph.

    A Hermitian matrix is block diagonal (up to a permutation) along the
    components of its nonzero pattern, so each block is solved separately.
    """
    n = m.shape[0]
    pattern = sp.csr_array(m) if sp.issparse(m) else sp.csr_array(np.asarray(m) != 0)
    _, labels = connected_components(pattern, directed=False)
    sizes = np.bincount(labels)
    order = np.argsort(labels, kind="stable")
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    csr = sp.csr_array(m) if sp.issparse(m) else None
    dense = None if csr is not None else np.asarray(m)
    out = np.empty(n, dtype=float)
    pos = 0
    for size in np.unique(sizes):
        comps = np.flatnonzero(sizes == size)
        idx = order[starts[comps][:, None] + np.arange(size)[None, :]]
        if size == 1:
            diag = m.diagonal() if csr is not None else np.diag(dense)
            vals = np.real(np.asarray(diag)[idx[:, 0]])
        elif size <= _BATCH_BLOCK_LIMIT:
            rows = np.repeat(idx, size, axis=1).ravel()
            cols = np.tile(idx, (1, size)).ravel()
            if csr is not None:
                flat = np.asarray(csr[rows, cols]).ravel()
            else:
                flat = dense[rows, cols]
            blocks = flat.reshape(len(comps), size, size)
            vals = np.linalg.eigvalsh(blocks).ravel()
        else:
            parts = []
            for sel in idx:
                block = csr[sel][:, sel].toarray() if csr is not None else dense[np.ix_(sel, sel)]
                parts.append(np.linalg.eigvalsh(block))
            vals = np.concatenate(parts)
        out[pos:pos + vals.size] = vals
        pos += vals.size
    return out


def hermitian_eigenvalues(m: FockDensityMatrix | Matrix, *, blockwise: bool | None = None) -> SpectralResult:
    """Eigenvalues of a Hermitian matrix in descending order.

    LAPACK's symmetric eigensolver handles dense input. Sparse input (and
    dense input with ``blockwise=True``) is first split into the connected
    components of its sparsity pattern.

    Raises:
        StructuralError: if the matrix is not Hermitian within 1e-9.
    """
    if not isinstance(m, FockDensityMatrix):
        m = density_matrix(m)
    entries = m.entries
    if blockwise is None:
        blockwise = sp.issparse(entries)
    if blockwise:
        vals = _block_spectrum(entries)
    else:
        vals = np.linalg.eigvalsh(np.asarray(entries))
    return SpectralResult(vals)


def entropy_terms(values) -> np.ndarray:
    """Elementwise ``-x lb x`` with ``0 lb 0 = 0``; values below 1e-15 count as zero."""
    x = np.asarray(values, dtype=float)
    out = np.zeros_like(x)
    keep = x > CLIP_THRESHOLD
    out[keep] = -x[keep] * np.log2(x[keep])
    return out


def check_positive(values, tol: float = POSITIVITY_TOL) -> None:
    vals = np.asarray(values, dtype=float)
    if vals.size and vals.min() < -tol:
        raise PositivityError(f"eigenvalue {vals.min():.3g} below -{tol:g}")


def von_neumann_entropy(m: FockDensityMatrix | SpectralResult | Matrix) -> float:
    """Von Neumann entropy ``-sum lambda lb lambda`` in bits.

    Raises:
        PositivityError: if an eigenvalue is below -1e-10.
    """
    spectrum = m if isinstance(m, SpectralResult) else hermitian_eigenvalues(m)
    check_positive(spectrum.eigenvalues)
    return float(np.sum(entropy_terms(spectrum.eigenvalues)))


def shannon_entropy(p) -> float:
    """Shannon entropy of a probability vector, in bits."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0 or np.any(p < 0) or abs(p.sum() - 1.0) > NORMALIZATION_TOL:
        raise InputError("probabilities must be non-negative and sum to 1")
    return float(np.sum(entropy_terms(p)))


def binary_entropy(p: float) -> float:
    """``h(p) = -p lb p - (1-p) lb (1-p)``."""
    return shannon_entropy([p, 1.0 - p])


def _check_keep(keep, n_factors: int) -> tuple[int, ...]:
    keep = tuple(sorted(set(int(k) for k in np.atleast_1d(keep))))
    if not keep:
        raise InputError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= n_factors:
        raise InputError(f"subsystem index out of range for {n_factors} factors: {keep}")
    return keep


def partial_trace(m: FockDensityMatrix, keep) -> FockDensityMatrix:
    """Trace out every subsystem not listed in ``keep``.

    Raises:
        InputError: if ``keep`` is empty or names a missing subsystem.
    """
    factors = m.factors
    keep = _check_keep(keep, len(factors))
    traced = tuple(i for i in range(len(factors)) if i not in keep)
    kept_dims = tuple(factors[i] for i in keep)
    if not traced:
        return m
    kdim = int(np.prod(kept_dims))
    if m.is_sparse:
        coo = sp.coo_array(m.entries)
        ri = np.unravel_index(coo.row, factors)
        ci = np.unravel_index(coo.col, factors)
        mask = np.ones(coo.nnz, dtype=bool)
        for t in traced:
            mask &= ri[t] == ci[t]
        rows = np.ravel_multi_index(tuple(ri[k][mask] for k in keep), kept_dims)
        cols = np.ravel_multi_index(tuple(ci[k][mask] for k in keep), kept_dims)
        out = sp.csr_array((coo.data[mask], (rows, cols)), shape=(kdim, kdim))
        return FockDensityMatrix(out, kept_dims)
    n = len(factors)
    tensor = np.asarray(m.entries).reshape(factors + factors)
    perm = list(keep) + list(traced)
    tensor = tensor.transpose(perm + [p + n for p in perm])
    tdim = int(np.prod([factors[i] for i in traced]))
    out = np.einsum("iaja->ij", tensor.reshape(kdim, tdim, kdim, tdim))
    return FockDensityMatrix(out, kept_dims)


def _vector_matrix(psi, factors, keep, traced):
    """Reshape a state vector into a (kept, traced) matrix."""
    kdims = [factors[i] for i in keep]
    tdims = [factors[i] for i in traced]
    kdim, tdim = int(np.prod(kdims)), int(np.prod(tdims)) if tdims else 1
    if sp.issparse(psi):
        coo = sp.coo_array(psi.reshape(1, -1))
        idx = np.unravel_index(coo.col, factors)
        rows = np.ravel_multi_index(tuple(idx[i] for i in keep), kdims)
        cols = np.ravel_multi_index(tuple(idx[i] for i in traced), tdims) if tdims else np.zeros_like(rows)
        return sp.csr_array((coo.data, (rows, cols)), shape=(kdim, tdim))
    tensor = np.asarray(psi).reshape(factors).transpose(list(keep) + list(traced))
    return tensor.reshape(kdim, tdim)


def reduced_operator(psi, phi, factors: Sequence[int], keep) -> Matrix:
    """``Tr_rest |psi><phi|`` without forming the full outer product.

    ``psi`` and ``phi`` are state vectors (dense 1-D arrays or sparse
    row/column vectors) on the tensor product described by ``factors``.
    The result is sparse when either input is sparse.
    """
    factors = _as_factors(factors)
    keep = _check_keep(keep, len(factors))
    traced = tuple(i for i in range(len(factors)) if i not in keep)
    a = _vector_matrix(psi, factors, keep, traced)
    b = _vector_matrix(phi, factors, keep, traced)
    if sp.issparse(a) or sp.issparse(b):
        return sp.csr_array(sp.csr_array(a) @ sp.csr_array(b).conj().T)
    return a @ b.conj().T


def reduced_state(psi, factors: Sequence[int], keep) -> FockDensityMatrix:
    """Reduced density matrix of the pure state ``psi`` on the ``keep`` factors."""
    factors = _as_factors(factors)
    keep = _check_keep(keep, len(factors))
    return FockDensityMatrix(reduced_operator(psi, psi, factors, keep), tuple(factors[i] for i in keep))


def pure_state(psi, factors: Sequence[int] | None = None) -> FockDensityMatrix:
    if sp.issparse(psi):
        v = sp.csr_array(psi.reshape(-1, 1))
        return FockDensityMatrix(v @ v.conj().T, factors or (v.shape[0],))
    v = np.asarray(psi).ravel()
    return FockDensityMatrix(np.outer(v, v.conj()), factors or (v.size,))


def tensor_product(a: FockDensityMatrix, b: FockDensityMatrix,
                   policy: TruncationPolicy = DEFAULT_POLICY) -> FockDensityMatrix:
    """Kronecker product with concatenated factor lists.

    Dense products are capped at ``policy.max_dim`` in total; sparse products
    are allowed to grow beyond it as long as no single factor does.

    Raises:
        CapacityError: on dimension overflow.
    """
    factors = a.factors + b.factors
    if max(factors) > policy.max_dim:
        raise CapacityError(f"factor of dimension {max(factors)} exceeds max_dim={policy.max_dim}")
    if a.is_sparse or b.is_sparse:
        out = sp.kron(sp.csr_array(a.entries), sp.csr_array(b.entries), format="csr")
    else:
        if a.dim * b.dim > policy.max_dim:
            raise CapacityError(
                f"dense product of dimension {a.dim * b.dim} exceeds max_dim={policy.max_dim}")
        out = np.kron(a.entries, b.entries)
    return FockDensityMatrix(out, factors)


def _sqrt_psd(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(m0: FockDensityMatrix, m1: FockDensityMatrix, method: str = "auto") -> float:
    """Uhlmann fidelity ``Tr[sqrt(sqrt(m0) m1 sqrt(m0))]^2``.

    With ``method="auto"`` two states that are both diagonal in the stored
    basis use ``(sum sqrt(p_i q_i))^2``; anything else goes through the full
    spectral formula. ``"diagonal"`` and ``"uhlmann"`` force one route.
    """
    if m0.dim != m1.dim:
        raise InputError(f"dimension mismatch: {m0.dim} vs {m1.dim}")
    if method not in ("auto", "diagonal", "uhlmann"):
        raise InputError(f"unknown fidelity method {method!r}")
    if method == "diagonal" or (method == "auto" and m0.is_diagonal() and m1.is_diagonal()):
        p = np.clip(m0.diagonal(), 0.0, None)
        q = np.clip(m1.diagonal(), 0.0, None)
        value = float(np.sum(np.sqrt(p * q))) ** 2
    else:
        root = _sqrt_psd(m0.to_dense())
        inner = root @ m1.to_dense() @ root
        inner = (inner + inner.conj().T) / 2
        ev = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
        value = float(np.sum(np.sqrt(ev))) ** 2
    return min(max(value, 0.0), 1.0)
