"""Brute-force dense Lindblad solver on the full 2^N Hilbert space.

This module is the ground truth for the quadratic pipeline: it builds the
spin Hamiltonian by explicit tensor products, the Liouvillian as a sparse
superoperator on vectorized density matrices (row-major vec), and extracts
the steady state from the (near-)null space.  Every returned state is
certified by its own residual, Hermiticity and trace checks, independent of
the algorithm that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .chains import TSI, TXY
from .errors import DegenerateNessError, ResourceLimitError, UndefinedCorrelatorError
from .observables import NessObservables

_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_SP = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |up><down|
_SM = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)

MAX_HAMILTONIAN_SITES = 10
MAX_LIOUVILLIAN_SITES = 7


def _site_product(ops):
    """Sparse tensor product of one single-site operator per site."""
    out = sp.csr_matrix(np.atleast_2d(ops[0]))
    for op in ops[1:]:
        out = sp.kron(out, sp.csr_matrix(np.atleast_2d(op)), format="csr")
    return out


def _embedded(op, site, n_sites):
    ops = [np.eye(2, dtype=complex)] * n_sites
    ops[site] = op
    return _site_product(ops)


def build_spin_hamiltonian(spec, dense=False):
    """Exact tensor-product Hamiltonian of a ChainSpec (N <= 10).

    The txy and tsi Hamiltonians are built term by term with all
    inhomogeneous couplings respected.  Returns a sparse CSR matrix unless
    ``dense`` is set.
    """
    n = spec.n_sites
    if n > MAX_HAMILTONIAN_SITES:
        raise ResourceLimitError(f"dense spin Hamiltonian limited to N <= {MAX_HAMILTONIAN_SITES}")
    dim = 2**n
    h = sp.csr_matrix((dim, dim), dtype=complex)
    eye = np.eye(2, dtype=complex)
    for i in range(n):
        if spec.h[i] != 0.0:
            h = h + spec.h[i] * _embedded(_SZ, i, n)
    if spec.kind == TXY:
        for i in range(n - 1):
            if spec.jx[i] != 0.0:
                ops = [eye] * n
                ops[i] = _SX
                ops[i + 1] = _SX
                h = h + spec.jx[i] * _site_product(ops)
            if spec.jy[i] != 0.0:
                ops = [eye] * n
                ops[i] = _SY
                ops[i + 1] = _SY
                h = h + spec.jy[i] * _site_product(ops)
    elif spec.kind == TSI:
        for i in range(n - 1):
            if spec.b2[i] != 0.0:
                ops = [eye] * n
                ops[i] = _SX
                ops[i + 1] = _SX
                h = h + spec.b2[i] * _site_product(ops)
        for m in range(n - 2):
            if spec.b3[m] != 0.0:
                ops = [eye] * n
                ops[m] = _SX
                ops[m + 1] = _SZ
                ops[m + 2] = _SX
                h = h + spec.b3[m] * _site_product(ops)
    return h.toarray() if dense else h.tocsr()


def build_liouvillian(hamiltonian, bath, dense=False):
    """Sparse matrix of the Lindblad generator acting on row-major vec(rho).

    Jump operators are ``sqrt(down) * sigma^-`` and ``sqrt(up) * sigma^+`` on
    the first and last spin, with the dissipator
    ``D[L] rho = 2 L rho L^+ - {L^+ L, rho}`` (note the factor 2).
    """
    h = sp.csr_matrix(hamiltonian)
    dim = h.shape[0]
    n = int(round(np.log2(dim)))
    if 2**n != dim:
        raise ValueError("Hamiltonian dimension is not a power of two")
    if n > MAX_LIOUVILLIAN_SITES:
        raise ResourceLimitError(
            f"dense Liouvillian limited to N <= {MAX_LIOUVILLIAN_SITES} (4^N matrix)"
        )
    eye = sp.identity(dim, dtype=complex, format="csr")
    liouv = -1.0j * (sp.kron(h, eye) - sp.kron(eye, h.T))
    for end, site in ((0, 0), (1, n - 1)):
        up, down = bath.rates(end)
        for rate, op in ((down, _SM), (up, _SP)):
            if rate == 0.0:
                continue
            jump = _embedded(op, site, n)
            jdj = (jump.getH() @ jump).tocsr()
            liouv = liouv + rate * (
                2.0 * sp.kron(jump, jump.conjugate())
                - sp.kron(jdj, eye)
                - sp.kron(eye, jdj.T)
            )
    liouv = liouv.tocsr()
    return liouv.toarray() if dense else liouv


@dataclass
class DenseNess:
    """Steady state on the full Hilbert space plus solve diagnostics."""

    rho: np.ndarray = field(repr=False)
    gap: float
    residual: float
    n_sites: int


def _parity_even_indices(dim):
    """Indices of vec(rho) entries (a, b) whose basis states share fermion parity.

    Valid for Liouvillians assembled by :func:`build_liouvillian`: basis
    states are bit patterns, and spin parity = popcount mod 2 is conserved
    by the Hamiltonian while both jump operators flip it on ket and bra at
    once, so the generator never mixes the two vec-space parity sectors.
    """
    n = int(round(np.log2(dim)))
    parity = np.zeros(dim, dtype=np.int8)
    for bit in range(n):
        parity ^= (np.arange(dim) >> bit).astype(np.int8) & 1
    pairs = parity[:, None] ^ parity[None, :]
    return np.flatnonzero(pairs.reshape(-1) == 0)


def solve_dense_ness(liouv, method="auto", gap_tol=1e-10):
    """Extract the unique steady state from a dense/sparse Liouvillian.

    method:
        "svd"   full SVD, null vector and uniqueness gap from the two
                smallest singular values (reference method, default up to
                4 sites);
        "eigs"  shift-invert Arnoldi for the two eigenvalues nearest zero,
                restricted to the parity-even vec sector when the generator
                block-diagonalizes (fast path for larger N);
        "auto"  pick by size.

    Either way the returned state is trace-normalized, Hermitized, and
    certified by the residual ``|| L vec(rho) ||`` evaluated on the full
    generator.
    """
    dim2 = liouv.shape[0]
    dim = int(round(np.sqrt(dim2)))
    n_sites = int(round(np.log2(dim)))
    if method == "auto":
        method = "svd" if dim2 <= 256 else "eigs"

    if method == "svd":
        dense = liouv.toarray() if sp.issparse(liouv) else np.asarray(liouv)
        _, s, vh = np.linalg.svd(dense)
        vec = vh[-1].conj()
        gap = float(s[-2])
    elif method == "eigs":
        mat = sp.csc_matrix(liouv)
        idx = _parity_even_indices(dim)
        mask = np.zeros(dim2, dtype=bool)
        mask[idx] = True
        coupling = mat[idx][:, ~mask]
        if coupling.nnz and abs(coupling).max() > 0:
            sub, idx = mat, np.arange(dim2)  # no clean sector split; solve full
        else:
            sub = mat[idx][:, idx]
        sigma = 1e-12 * max(abs(mat).max(), 1.0)
        shifted = sp.csc_matrix(sub - sigma * sp.identity(sub.shape[0], dtype=complex))
        lu = spla.splu(shifted, permc_spec="MMD_AT_PLUS_A")
        opinv = spla.LinearOperator(sub.shape, matvec=lu.solve, dtype=complex)
        v0 = np.full(sub.shape[0], 1.0 / np.sqrt(sub.shape[0]), dtype=complex)
        vals, vecs = spla.eigs(sub, k=2, sigma=sigma, which="LM", OPinv=opinv, v0=v0)
        order = np.argsort(np.abs(vals))
        small = vecs[:, order[0]]
        # one inverse-iteration polish with the factorization already in hand
        small = lu.solve(small)
        small /= np.linalg.norm(small)
        vec = np.zeros(dim2, dtype=complex)
        vec[idx] = small
        gap = float(abs(vals[order[1]]))
    else:
        raise ValueError(f"unknown method {method!r}")

    if gap < gap_tol:
        raise DegenerateNessError(
            f"Liouvillian null space is not unique (uniqueness margin {gap:.3e})"
        )
    rho = vec.reshape(dim, dim)
    tr = np.trace(rho)
    if abs(tr) < 1e-12:
        raise DegenerateNessError("null vector is traceless, cannot normalize")
    rho = rho / tr  # complex division fixes the arbitrary eigenvector phase too
    asym = np.linalg.norm(rho - rho.conj().T) / max(np.linalg.norm(rho), 1e-300)
    if asym > 1e-8:
        raise DegenerateNessError(f"null vector is not Hermitian (asymmetry {asym:.3e})")
    rho = 0.5 * (rho + rho.conj().T)
    residual = float(np.linalg.norm(liouv @ rho.reshape(-1)))
    return DenseNess(rho=rho, gap=gap, residual=residual, n_sites=n_sites)


def expectation(ness, op):
    """tr(rho * op) for a dense or sparse operator."""
    if sp.issparse(op):
        return complex((op.T.multiply(ness.rho)).sum())
    return complex(np.tensordot(op.T, ness.rho, axes=2))


def sz_site(ness, site):
    """<sigma^z_site> (0-based site index)."""
    return expectation(ness, _embedded(_SZ, site, ness.n_sites)).real


def oracle_observables(ness, denom_tol=1e-12):
    """End-spin observables evaluated directly on rho, no Wick factorization.

    g2 uses the sigma^z covariance form
    ``1 + (<z1 zN> - <z1><zN>) / ((1 + <z1>)(1 + <zN>))``.
    """
    n = ness.n_sites
    sz1 = sz_site(ness, 0)
    szn = sz_site(ness, n - 1)
    if n == 1:
        zz = 1.0
    else:
        op = _embedded(_SZ, 0, n) @ _embedded(_SZ, n - 1, n)
        zz = expectation(ness, op).real
    denom = (1.0 + sz1) * (1.0 + szn)
    if denom < denom_tol:
        raise UndefinedCorrelatorError(
            f"g2 undefined: (1+<z1>)(1+<zN>) = {denom:.3e} below tolerance"
        )
    g2 = 1.0 + (zz - sz1 * szn) / denom
    return NessObservables(
        sz_left=sz1,
        sz_right=szn,
        g2=g2,
        sz_z_product=zz,
    )


def majorana_operators(n_sites):
    """The 2N Jordan-Wigner Majorana operators as sparse matrices.

    ``w_{2i-1} = (prod_{j<i} -sz_j) sx_i`` and
    ``w_{2i} = (prod_{j<i} -sz_j) sy_i`` (1-based pairs).
    """
    ops = []
    for i in range(n_sites):
        string = [-_SZ] * i
        tail = [np.eye(2, dtype=complex)] * (n_sites - i - 1)
        ops.append(_site_product(string + [_SX] + tail))
        ops.append(_site_product(string + [_SY] + tail))
    return ops


def dense_ness(spec, bath, method="auto"):
    """Convenience pipeline: spec + bath -> certified DenseNess."""
    h = build_spin_hamiltonian(spec)
    liouv = build_liouvillian(h, bath)
    return solve_dense_ness(liouv, method=method)
