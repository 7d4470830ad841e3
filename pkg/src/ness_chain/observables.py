"""Physical observables of the NESS from the correlation matrix (Wick's theorem)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UndefinedCorrelatorError


@dataclass(frozen=True)
class NessObservables:
    """End-spin occupations and the end-to-end photon cross correlation.

    ``c_entries`` keeps the raw correlation-matrix entries the formulas used
    (left pair, right pair, and the four cross entries); it is None when the
    observables came from a dense-oracle density matrix instead of a
    correlation matrix.
    """

    sz_left: float
    sz_right: float
    g2: float
    c_entries: dict | None = None
    sz_z_product: float | None = None


def pair_expectation(corr, j, k):
    """<w_j w_k> = delta_jk - i C_jk (0-based Majorana indices)."""
    c = corr.c
    dim = c.shape[0]
    if not (0 <= j < dim and 0 <= k < dim):
        raise IndexError(f"Majorana index out of range: ({j}, {k}) for dim {dim}")
    return (1.0 if j == k else 0.0) - 1.0j * c[j, k]


def quartic_wick(corr, a, b, c, d):
    """<w_a w_b w_c w_d> by Wick factorization into pair expectations.

    Indices must be distinct: <ab><cd> - <ac><bd> + <ad><bc>.
    """
    if len({a, b, c, d}) != 4:
        raise ValueError(f"indices must be distinct, got {(a, b, c, d)}")
    p = lambda i, j: pair_expectation(corr, i, j)
    return p(a, b) * p(c, d) - p(a, c) * p(b, d) + p(a, d) * p(b, c)


def sz(corr, site):
    """<sigma^z_site> = -C_{2i-1,2i} (0-based site index)."""
    n = corr.n_sites
    if not 0 <= site < n:
        raise IndexError(f"site {site} out of range for {n} sites")
    return -float(corr.c[2 * site, 2 * site + 1])


def g2_end_to_end(corr, denom_tol=1e-12):
    """Equal-time photon cross correlation of the two end spins.

    ``g2 = 1 - (C_{1,2N-1} C_{2,2N} - C_{1,2N} C_{2,2N-1})
             / ((1 - C_{1,2})(1 - C_{2N-1,2N}))``

    A denominator below ``denom_tol`` means an end spin is fully polarized
    (no photon emission); that is reported as an error, never regularized.
    """
    c = corr.c
    last = c.shape[0] - 1
    denom = (1.0 - c[0, 1]) * (1.0 - c[last - 1, last])
    if denom < denom_tol:
        raise UndefinedCorrelatorError(
            f"g2 denominator {denom:.3e} below tolerance {denom_tol:.1e}"
        )
    num = c[0, last - 1] * c[1, last] - c[0, last] * c[1, last - 1]
    return 1.0 - num / denom


def ness_observables(corr, denom_tol=1e-12):
    """Bundle sz at both ends and g2, with the raw C entries they used."""
    c = corr.c
    n = corr.n_sites
    last = 2 * n - 1
    sz_left = sz(corr, 0)
    sz_right = sz(corr, n - 1)
    for name, value in (("sz_left", sz_left), ("sz_right", sz_right)):
        if abs(value) > 1.0 + 1e-9:
            raise ValueError(f"{name} = {value} violates the physical bound |sz| <= 1")
    g2 = g2_end_to_end(corr, denom_tol=denom_tol)
    if g2 < -1e-9:
        raise ValueError(f"g2 = {g2} is negative beyond rounding")
    entries = {
        "c_1_2": float(c[0, 1]),
        "c_2Nm1_2N": float(c[last - 1, last]),
        "c_1_2Nm1": float(c[0, last - 1]),
        "c_1_2N": float(c[0, last]),
        "c_2_2Nm1": float(c[1, last - 1]),
        "c_2_2N": float(c[1, last]),
    }
    return NessObservables(
        sz_left=sz_left, sz_right=sz_right, g2=float(g2), c_entries=entries
    )
