"""Shared test utilities: random draws and oracle-side correlation matrices."""

import numpy as np

from ness_chain import ChainSpec, BathSpec
from ness_chain import oracle


def random_spec(kind, n, rng, coupling_range=1.0):
    r = coupling_range
    if kind == "txy":
        return ChainSpec(kind="txy", h=rng.uniform(-r, r, n),
                         jx=rng.uniform(-r, r, n - 1), jy=rng.uniform(-r, r, n - 1))
    return ChainSpec(kind="tsi", h=rng.uniform(-r, r, n),
                     b2=rng.uniform(-r, r, n - 1), b3=rng.uniform(-r, r, max(n - 2, 0)))


def random_bath(rng, gamma_range=(0.01, 0.5), n_range=(0.0, 1.0)):
    return BathSpec(gamma_1=rng.uniform(*gamma_range), gamma_n=rng.uniform(*gamma_range),
                    n_1=rng.uniform(*n_range), n_n=rng.uniform(*n_range))


def bond_reversed(spec):
    """The chain whose literal Jordan-Wigner image the Majorana builders encode.

    The builders follow the convention in which the two-spin bond terms enter
    with reversed sign; a sigma^z rotation of every second spin maps one
    chain onto the other, leaving sigma^z observables and the end dissipators
    untouched.  Raw Majorana correlators must be compared against the
    reversed chain's density matrix.
    """
    if spec.kind == "txy":
        return ChainSpec(kind="txy", h=spec.h.copy(), jx=-spec.jx, jy=-spec.jy)
    return ChainSpec(kind="tsi", h=spec.h.copy(), b2=-spec.b2, b3=spec.b3.copy())


def oracle_correlation_matrix(spec, bath, method="auto"):
    """Dense-oracle correlation matrix in the builders' Majorana convention."""
    ness = oracle.dense_ness(bond_reversed(spec), bath, method=method)
    ops = oracle.majorana_operators(spec.n_sites)
    dim = 2 * spec.n_sites
    c = np.zeros((dim, dim))
    for j in range(dim):
        for k in range(j + 1, dim):
            val = oracle.expectation(ness, (ops[j] @ ops[k]).toarray())
            c[j, k] = (1.0j * val).real
            c[k, j] = -c[j, k]
    return c, ness


def subset_sum_spectrum(energies):
    """All 2^m subset sums of one-particle energies, shifted by the ground energy."""
    e0 = -0.5 * float(np.sum(energies))
    sums = np.array([0.0])
    for e in energies:
        sums = np.concatenate([sums, sums + e])
    return np.sort(sums + e0)
