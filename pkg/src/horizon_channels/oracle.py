"""Brute-force reference pipeline on truncated Fock spaces.

States are built from the explicit two-mode squeezed vectors, the partner
modes are traced out, and every entropy comes from eigenvalues of the
resulting matrices. Nothing here uses the series expressions; the only
shared code is :mod:`horizon_channels.fockcore` and the generic scalar search.

Dual-rail joint states have dimension ``2 N^2``. They conserve the
receiver's total photon number, so they are assembled and diagonalized one
batch of photon-number sectors at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import TruncationError
from .fockcore import (DEFAULT_POLICY, FockDensityMatrix, TruncationPolicy,
                       check_positive, entropy_terms, fidelity, hermitian_eigenvalues,
                       partial_trace, reduced_operator, reduced_state, tensor_product,
                       von_neumann_entropy)
from .numerics import golden_section_max
from .quantities import ChannelQuantities
from .unruh import (Encoding, Preparation, Protocol, as_squeezing, squeezed_one_photon_vector,
                    squeezed_vacuum_vector, truncation_dim)

# sector batches are flushed once they hold this many receiver basis states
_SECTOR_BATCH = 200_000
# above this many product-basis entries the dual-rail fidelity is summed in chunks
_DENSE_PRODUCT_LIMIT = 2_000_000


@dataclass(frozen=True)
class OracleEntropies:
    """Entropies (bits) of one joint state and its marginals."""

    source_bits: float
    receiver_bits: float
    joint_bits: float
    trace: float
    min_eigenvalue: float

    @property
    def mutual_info_bits(self) -> float:
        return self.source_bits + self.receiver_bits - self.joint_bits

    @property
    def conditional_entropy_bits(self) -> float:
        return self.joint_bits - self.receiver_bits


def _amplitudes(prep: Preparation) -> tuple[float, float]:
    return math.sqrt(prep.alpha_sq), math.sqrt(prep.beta_sq)


def _pairs(protocol: Protocol):
    if protocol is Protocol.QUANTUM:
        return [(0, 0), (1, 1), (0, 1), (1, 0)]
    return [(0, 0), (1, 1)]


class OracleChannel:
    """Explicit channel outputs for one encoding at fixed ``r`` and truncation ``N``.

    Per-mode pieces are computed once and reused across input weights.
    """

    def __init__(self, encoding, r, N: int, policy: TruncationPolicy = DEFAULT_POLICY):
        self.encoding = Encoding.parse(encoding)
        self.squeezing = as_squeezing(r)
        self.N = int(N)
        self.policy = policy

    @cached_property
    def vectors(self):
        """Squeezed vacuum and one-photon vectors, keyed by photon number."""
        r, N = self.squeezing, self.N
        return {0: squeezed_vacuum_vector(r, N, sparse=True, policy=self.policy),
                1: squeezed_one_photon_vector(r, N, sparse=True, policy=self.policy)}

    @cached_property
    def mode_operators(self):
        """``Tr_partner |psi_j><psi_k|`` on one receiver mode, for j, k in {0, 1}."""
        N = self.N
        return {(j, k): sp.csr_array(reduced_operator(self.vectors[j], self.vectors[k], (N, N), (0,)))
                for j in (0, 1) for k in (0, 1)}

    def receiver_state(self, photons: int) -> FockDensityMatrix:
        return FockDensityMatrix(self.mode_operators[(photons, photons)], (self.N,))

    # single rail

    def single_rail_joint(self, prep: Preparation, protocol) -> FockDensityMatrix:
        protocol = Protocol.parse(protocol)
        alpha, beta = _amplitudes(prep)
        N = self.N
        if protocol is Protocol.QUANTUM:
            psi = sp.hstack([alpha * self.vectors[0], beta * self.vectors[1]], format="csr")
            return reduced_state(psi, (2, N, N), (0, 1))
        weights = (prep.alpha_sq, prep.beta_sq)
        total = None
        for A in (0, 1):
            marker = np.zeros((2, 2))
            marker[A, A] = weights[A]
            term = tensor_product(FockDensityMatrix(sp.csr_array(marker), (2,)), self.receiver_state(A),
                                  self.policy)
            total = term.entries if total is None else total + term.entries
        return FockDensityMatrix(total, (2, N))

    # dual rail

    def _dual_terms(self, prep: Preparation, protocol: Protocol):
        """(A, A', coefficient, offset_a, values_a, values_b) for each block.

        Logical zero puts the photon in mode a, logical one in mode b. Each
        per-mode operator has a single nonzero diagonal at offset j - k;
        ``values[c]`` is its entry in column c.
        """
        amp = _amplitudes(prep)
        photon = {0: (1, 0), 1: (0, 1)}
        out = []
        for A, B in _pairs(protocol):
            (ja, jb), (ka, kb) = photon[A], photon[B]
            vals = []
            for j, k in ((ja, ka), (jb, kb)):
                op = self.mode_operators[(j, k)]
                d = j - k
                cols = np.arange(self.N)
                rows = cols + d
                ok = (rows >= 0) & (rows < self.N)
                v = np.zeros(self.N)
                v[cols[ok]] = np.asarray(op[rows[ok], cols[ok]]).ravel()
                vals.append(v)
            out.append((A, B, amp[A] * amp[B], ja - ka, vals[0], vals[1]))
        return out

    def dual_rail_sector_batches(self, prep: Preparation, protocol):
        """Yield the joint state restricted to consecutive photon-number sectors.

        Each batch is a :class:`FockDensityMatrix` with factors ``(2, M)``, the
        second factor enumerating receiver states ``(x, L - x)`` sector by sector.
        """
        protocol = Protocol.parse(protocol)
        terms = self._dual_terms(prep, protocol)
        N = self.N
        L_all = np.arange(0, 2 * N - 1)
        xlo = np.maximum(0, L_all - N + 1)
        xhi = np.minimum(L_all, N - 1)
        size = xhi - xlo + 1
        start = 0
        while start < len(L_all):
            stop = start
            acc = 0
            while stop < len(L_all) and (acc < _SECTOR_BATCH or stop == start):
                acc += size[stop]
                stop += 1
            yield self._assemble_batch(terms, L_all[start:stop], xlo[start:stop], size[start:stop])
            start = stop

    def _assemble_batch(self, terms, Ls, xlo, size):
        M = int(size.sum())
        base = np.concatenate(([0], np.cumsum(size)[:-1]))
        rows, cols, vals = [], [], []
        for A, B, coef, d, va, vb in terms:
            lo = np.maximum(xlo, xlo - d)
            hi = np.minimum(xlo + size - 1, xlo + size - 1 - d)
            count = np.maximum(hi - lo + 1, 0)
            total = int(count.sum())
            if total == 0:
                continue
            which = np.repeat(np.arange(len(Ls)), count)
            offset = np.arange(total) - np.repeat(np.cumsum(count) - count, count)
            xc = lo[which] + offset
            yc = Ls[which] - xc
            rows.append(A * M + base[which] + (xc + d - xlo[which]))
            cols.append(B * M + base[which] + (xc - xlo[which]))
            vals.append(coef * va[xc] * vb[yc])
        entries = sp.csr_array((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                               shape=(2 * M, 2 * M))
        return FockDensityMatrix(entries, (2, M))

    # shared entry points

    def entropies(self, prep: Preparation, protocol) -> OracleEntropies:
        protocol = Protocol.parse(protocol)
        if self.encoding is Encoding.SINGLE_RAIL:
            rho = self.single_rail_joint(prep, protocol)
            joint = hermitian_eigenvalues(rho)
            check_positive(joint.eigenvalues)
            return OracleEntropies(
                source_bits=von_neumann_entropy(partial_trace(rho, [0])),
                receiver_bits=von_neumann_entropy(partial_trace(rho, [1])),
                joint_bits=von_neumann_entropy(joint),
                trace=rho.trace(),
                min_eigenvalue=float(joint.eigenvalues[-1]),
            )
        s_joint = s_recv = trace = 0.0
        min_eig = math.inf
        rho_a = np.zeros((2, 2))
        for batch in self.dual_rail_sector_batches(prep, protocol):
            joint = hermitian_eigenvalues(batch)
            recv = hermitian_eigenvalues(partial_trace(batch, [1]))
            check_positive(joint.eigenvalues)
            check_positive(recv.eigenvalues)
            s_joint += float(np.sum(entropy_terms(joint.eigenvalues)))
            s_recv += float(np.sum(entropy_terms(recv.eigenvalues)))
            min_eig = min(min_eig, float(joint.eigenvalues[-1]))
            trace += batch.trace()
            rho_a += np.real(partial_trace(batch, [0]).to_dense())
        return OracleEntropies(
            source_bits=von_neumann_entropy(FockDensityMatrix(rho_a, (2,))),
            receiver_bits=s_recv,
            joint_bits=s_joint,
            trace=trace,
            min_eigenvalue=min_eig,
        )

    def fidelity(self) -> float:
        """Fidelity of the received logical zero and one."""
        zero, one = self.receiver_state(0), self.receiver_state(1)
        if self.encoding is Encoding.SINGLE_RAIL:
            return fidelity(zero, one)
        if self.N**2 <= _DENSE_PRODUCT_LIMIT:
            logical0 = tensor_product(one, zero, self.policy)
            logical1 = tensor_product(zero, one, self.policy)
            return fidelity(logical0, logical1)
        if not (zero.is_diagonal() and one.is_diagonal()):
            return fidelity(tensor_product(one, zero, self.policy), tensor_product(zero, one, self.policy))
        # both logical states are diagonal products; sum sqrt(p q) over the grid in row chunks
        p0, p1 = np.clip(zero.diagonal(), 0, None), np.clip(one.diagonal(), 0, None)
        total = 0.0
        step = max(1, _DENSE_PRODUCT_LIMIT // self.N)
        for i in range(0, self.N, step):
            block = np.sqrt(np.outer(p1[i:i + step], p0) * np.outer(p0[i:i + step], p1))
            total += float(block.sum())
        return min(total**2, 1.0)

    def partner_entropy(self, prep: Preparation) -> float:
        """Entropy of the traced-out partner modes for the quantum protocol.

        The sender, receiver and partner share a pure state, so this equals
        the joint sender/receiver entropy.
        """
        N = self.N
        alpha, beta = _amplitudes(prep)
        if self.encoding is Encoding.SINGLE_RAIL:
            psi = sp.hstack([alpha * self.vectors[0], beta * self.vectors[1]], format="csr")
            return von_neumann_entropy(reduced_state(psi, (2, N, N), (2,)))
        part = {j: reduced_state(self.vectors[j], (N, N), (1,)) for j in (0, 1)}
        if not all(p.is_diagonal() for p in part.values()):
            raise NotImplementedError("non-diagonal partner states")
        d = {j: np.clip(part[j].diagonal(), 0, None) for j in (0, 1)}
        # logical zero leaves the photon's partner in mode a
        total = 0.0
        step = max(1, _DENSE_PRODUCT_LIMIT // N)
        for i in range(0, N, step):
            block = (prep.alpha_sq * np.outer(d[1][i:i + step], d[0])
                     + prep.beta_sq * np.outer(d[0][i:i + step], d[1]))
            total += float(np.sum(entropy_terms(block)))
        return total


def _check_trace(ent: OracleEntropies, r, N: int, policy: TruncationPolicy) -> None:
    deficit = abs(1.0 - ent.trace)
    if deficit > 100.0 * policy.tail_epsilon:
        try:
            suggested = truncation_dim(r, TruncationPolicy(policy.tail_epsilon, 1 << 30))
        except Exception:
            suggested = None
        raise TruncationError(
            f"N = {N} leaves trace deficit {deficit:.3g} at r = {float(as_squeezing(r).r):g}"
            f"; try N >= {suggested}", suggested_dim=suggested)


def oracle_entropies(prep: Preparation, encoding, protocol, r, N: int | None = None,
                     policy: TruncationPolicy = DEFAULT_POLICY) -> OracleEntropies:
    """Entropies of the explicitly constructed joint state.

    Raises:
        TruncationError: if the trace deficit exceeds ``100 * tail_epsilon``.
    """
    if N is None:
        N = truncation_dim(r, policy)
    ent = OracleChannel(encoding, r, N, policy).entropies(prep, protocol)
    _check_trace(ent, r, N, policy)
    return ent


def oracle_quantities(prep: Preparation, encoding, protocol, r, N: int | None = None,
                      policy: TruncationPolicy = DEFAULT_POLICY, *,
                      search_tol: float = 1e-8) -> ChannelQuantities:
    """Every channel quantity from eigenvalues of explicit matrices.

    Mutual information is ``S_A + S_R - S_AR`` and conditional entropy
    ``S_AR - S_R``. The classical single-rail capacity maximizes the
    brute-force mutual information over ``alpha_sq``; dual rail uses 1/2.
    """
    encoding, protocol = Encoding.parse(encoding), Protocol.parse(protocol)
    if N is None:
        N = truncation_dim(r, policy)
    channel = OracleChannel(encoding, r, N, policy)

    def ent(a):
        e = channel.entropies(Preparation(a), protocol)
        _check_trace(e, r, N, policy)
        return e

    here = ent(prep.alpha_sq)
    half = here if prep.alpha_sq == 0.5 else ent(0.5)
    coherent = -half.conditional_entropy_bits
    if protocol is Protocol.QUANTUM:
        capacity = coherent
    elif encoding is Encoding.DUAL_RAIL:
        capacity = half.mutual_info_bits
    else:
        _, capacity = golden_section_max(lambda a: ent(a).mutual_info_bits, 0.0, 1.0, search_tol)
    return ChannelQuantities(
        fidelity=channel.fidelity(),
        mutual_info_bits=here.mutual_info_bits,
        conditional_entropy_bits=here.conditional_entropy_bits,
        capacity_bits=capacity,
        coherent_info_bits=coherent,
        source_entropy_bits=here.source_bits,
    )
