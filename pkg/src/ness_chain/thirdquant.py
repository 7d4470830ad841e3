"""Quadratic Liouvillian: bath matrix, drift matrices, and the NESS Lyapunov solve.

For end-spin dissipation the bath couples linearly to the Majoranas, so the
steady state is Gaussian and fully described by the real antisymmetric
correlation matrix C with ``<w_j w_k> = delta_jk - i C_jk``.  C solves the
stationary Lyapunov equation ``X C + C X^T = Y`` with

    X = 4 A - 4 Re(M),      Y = -8 Im(M),

where M is the Hermitian bath matrix with nonzero entries only in the two
2x2 corner blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoUniqueNessError


@dataclass(frozen=True)
class BathMatrix:
    """Hermitian 2N x 2N bath matrix; nonzero only in the corner blocks."""

    m: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class DriftPair:
    """Real drift matrices of the correlation-matrix flow dC/dt = XC + CX^T - Y."""

    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class CorrelationMatrix:
    """Steady-state correlation matrix plus solve diagnostics."""

    c: np.ndarray = field(repr=False)
    residual: float
    spectral_abscissa: float

    @property
    def n_sites(self):
        return self.c.shape[0] // 2


def build_bath_matrix(bath, n_sites):
    """Bath matrix for end dissipation.

    Left block (Majoranas 1,2):  ``M_11 = M_22 = gamma_plus/4`` and
    ``M_12 = conj(M_21) = -i gamma_minus / 4``; the right block is the same
    with the right-end rates at Majoranas (2N-1, 2N).  For N = 1 both blocks
    land on the same Majorana pair and their contributions add.
    """
    m = np.zeros((2 * n_sites, 2 * n_sites), dtype=complex)
    for end, lo in ((0, 0), (1, 2 * n_sites - 2)):
        gp = bath.gamma_plus(end)
        gm = bath.gamma_minus(end)
        m[lo, lo] += gp / 4.0
        m[lo + 1, lo + 1] += gp / 4.0
        m[lo, lo + 1] += -1.0j * gm / 4.0
        m[lo + 1, lo] += 1.0j * gm / 4.0
    return BathMatrix(m=m)


def build_drift(form, bath_matrix):
    """Drift pair X = 4A - 4Re(M), Y = -8Im(M).

    Both are real; Y is exactly antisymmetric because M is Hermitian.
    """
    m = bath_matrix.m
    if m.shape != form.a.shape:
        raise ValueError(f"dimension mismatch: A is {form.a.shape}, M is {m.shape}")
    x = 4.0 * form.a - 4.0 * m.real
    y = -8.0 * m.imag
    return DriftPair(x=x, y=y)


def residual(drift, corr):
    """Frobenius norm of X C + C X^T - Y."""
    c = corr.c if isinstance(corr, CorrelationMatrix) else np.asarray(corr)
    return float(np.linalg.norm(drift.x @ c + c @ drift.x.T - drift.y))


def _lyapunov_eig(x, y, max_refine=3):
    """Lyapunov solve through the eigenbasis of X, with iterative refinement.

    Transforms the equation to ``lam_i Ct_ij + Ct_ij lam_j = Yt_ij`` and maps
    back; a couple of refinement sweeps push the residual to rounding level
    even when the eigenvector matrix is ill-conditioned.
    """
    lam, v = np.linalg.eig(x)
    vinv = np.linalg.inv(v)
    denom = lam[:, None] + lam[None, :]

    def solve_one(rhs):
        return (v @ ((vinv @ rhs @ vinv.T) / denom) @ v.T).real

    c = solve_one(y)
    target = 1e-12 * max(np.linalg.norm(y), 1.0)
    for _ in range(max_refine):
        r = y - (x @ c + c @ x.T)
        if np.linalg.norm(r) <= target:
            break
        c = c + solve_one(r)
    return c, denom


def _lyapunov_kron(x, y):
    """Dense vectorized solve (X (x) I + I (x) X) vec(C) = vec(Y) (row-major vec)."""
    dim = x.shape[0]
    eye = np.eye(dim)
    big = np.kron(x, eye) + np.kron(eye, x)
    c = np.linalg.solve(big, y.reshape(-1)).reshape(dim, dim)
    return c


def solve_ness(drift, method="auto", stability_tol=1e-10, degeneracy_tol=1e-8,
               max_refine=3):
    """Stationary solution of dC/dt = XC + CX^T - Y.

    Parameters
    ----------
    method : {"auto", "eig", "kron"}
        "eig" solves through the eigendecomposition of X (O(N^3)); "kron"
        is the dense vectorized fallback (O(N^6)), taken automatically when
        some ``|lam_i + lam_j|`` falls below ``degeneracy_tol * ||X||_F``.
    stability_tol : float
        X must be Hurwitz with margin: max Re(lam) <= -stability_tol.

    Raises
    ------
    NoUniqueNessError
        When X is not Hurwitz (no dissipation reaching some mode).
    """
    x, y = drift.x, drift.y
    lam = np.linalg.eigvals(x)
    abscissa = float(lam.real.max())
    if abscissa > -stability_tol:
        worst = lam[np.argmax(lam.real)]
        raise NoUniqueNessError(
            f"drift matrix is not Hurwitz: eigenvalue {worst} has Re >= -{stability_tol}",
            eigenvalue=worst,
        )

    if method == "auto":
        pair_min = np.abs(lam[:, None] + lam[None, :]).min()
        method = "eig" if pair_min >= degeneracy_tol * np.linalg.norm(x) else "kron"

    if method == "eig":
        try:
            c, _ = _lyapunov_eig(x, y, max_refine=max_refine)
        except np.linalg.LinAlgError:
            c = _lyapunov_kron(x, y)
    elif method == "kron":
        c = _lyapunov_kron(x, y)
    else:
        raise ValueError(f"unknown method {method!r}")

    c = 0.5 * (c - c.T)  # strip round-off asymmetry before any Wick formula
    res = float(np.linalg.norm(x @ c + c @ x.T - y))
    return CorrelationMatrix(c=c, residual=res, spectral_abscissa=abscissa)


def steady_state(spec, bath, **solver_kwargs):
    """Pipeline: chain spec + bath -> NESS correlation matrix."""
    from .chains import build_majorana

    form = build_majorana(spec)
    m = build_bath_matrix(bath, spec.n_sites)
    drift = build_drift(form, m)
    return solve_ness(drift, **solver_kwargs)
