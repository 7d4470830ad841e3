"""Chain and bath specifications and their quadratic Majorana forms.

Two spin-chain families are supported:

* ``txy``  -- transverse-field XY chain:
  ``H = sum_i h[i] sz_i + sum_i jx[i] sx_i sx_{i+1} + sum_i jy[i] sy_i sy_{i+1}``
* ``tsi``  -- chain with an extra three-spin interaction:
  ``H = sum_i h[i] sz_i + sum_i b2[i] sx_i sx_{i+1}
       + sum_i b3[i] sx_{i-1} sz_i sx_{i+1}``

Both map under Jordan-Wigner to free Majorana fermions
``w_{2i-1} = c_i^+ + c_i``, ``w_{2i} = -i(c_i^+ - c_i)``, and are stored as a
real antisymmetric matrix ``A`` with ``H = w^T (iA) w``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateParameterizationError, SpecificationError

TXY = "txy"
TSI = "tsi"


def _coupling_array(x, length, name):
    """Validate a coupling array: float, finite, exactly `length` entries."""
    if x is None:
        x = np.zeros(length)
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1 or arr.size != length:
        raise SpecificationError(
            f"{name} must have length {length}, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise SpecificationError(f"{name} contains non-finite entries")
    return arr


@dataclass
class ChainSpec:
    """Full inhomogeneous description of a txy or tsi chain.

    Parameters
    ----------
    kind : {"txy", "tsi"}
    h : array_like, shape (N,)
        Transverse fields (energy units).
    jx, jy : array_like, shape (N-1,), txy only
        Bond couplings.
    b2 : array_like, shape (N-1,), tsi only
        Two-spin bond couplings.
    b3 : array_like, shape (N-2,), tsi only
        Three-spin couplings; ``b3[m]`` multiplies the term centered on
        site ``m + 1`` (0-based), i.e. ``sx_m sz_{m+1} sx_{m+2}``.
    """

    kind: str
    h: np.ndarray
    jx: np.ndarray | None = None
    jy: np.ndarray | None = None
    b2: np.ndarray | None = None
    b3: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in (TXY, TSI):
            raise SpecificationError(f"unknown chain kind {self.kind!r}")
        self.h = _coupling_array(self.h, np.atleast_1d(np.asarray(self.h)).size, "h")
        n = self.h.size
        if n < 1:
            raise SpecificationError("chain needs at least one site")
        if self.kind == TXY:
            self.jx = _coupling_array(self.jx, n - 1, "jx")
            self.jy = _coupling_array(self.jy, n - 1, "jy")
            if self.b2 is not None or self.b3 is not None:
                raise SpecificationError("b2/b3 are tsi-only couplings")
        else:
            self.b2 = _coupling_array(self.b2, n - 1, "b2")
            self.b3 = _coupling_array(self.b3, max(n - 2, 0), "b3")
            if self.jx is not None or self.jy is not None:
                raise SpecificationError("jx/jy are txy-only couplings")

    @property
    def n_sites(self):
        return self.h.size

    @classmethod
    def txy_uniform(cls, n_sites, h, jx, jy=0.0):
        """Uniform TXY chain: fields h, bonds (jx, jy)."""
        return cls(
            kind=TXY,
            h=np.full(n_sites, float(h)),
            jx=np.full(n_sites - 1, float(jx)),
            jy=np.full(n_sites - 1, float(jy)),
        )

    @classmethod
    def tsi_uniform(cls, n_sites, lam1, lam2, jx=1.0):
        """Uniform three-spin chain with fields jx and couplings jx*lam1, jx*lam2."""
        return cls(
            kind=TSI,
            h=np.full(n_sites, float(jx)),
            b2=np.full(n_sites - 1, float(jx) * float(lam1)),
            b3=np.full(max(n_sites - 2, 0), float(jx) * float(lam2)),
        )


@dataclass(frozen=True)
class BathSpec:
    """Boundary dissipation rates and thermal occupations.

    Per end: raising rate ``up = gamma * n_th``, lowering rate
    ``down = gamma * (n_th + 1)``, and the combinations
    ``gamma_plus = up + down >= 0`` and ``gamma_minus = up - down <= 0``.
    """

    gamma_1: float
    gamma_n: float
    n_1: float
    n_n: float

    def __post_init__(self):
        for name in ("gamma_1", "gamma_n", "n_1", "n_n"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise SpecificationError(f"{name} must be finite and >= 0, got {v}")

    def rates(self, end):
        """(up, down) rates for end 0 (left) or 1 (right)."""
        if end == 0:
            g, nth = self.gamma_1, self.n_1
        elif end == 1:
            g, nth = self.gamma_n, self.n_n
        else:
            raise ValueError("end must be 0 (left) or 1 (right)")
        return g * nth, g * (nth + 1.0)

    def gamma_plus(self, end):
        up, down = self.rates(end)
        return up + down

    def gamma_minus(self, end):
        up, down = self.rates(end)
        return up - down


@dataclass(frozen=True)
class MajoranaForm:
    """Real antisymmetric matrix A of a quadratic Majorana Hamiltonian H = w^T (iA) w."""

    n_sites: int
    a: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.shape != (2 * self.n_sites, 2 * self.n_sites):
            raise SpecificationError(
                f"A must be {2 * self.n_sites}x{2 * self.n_sites}, got {a.shape}"
            )

    def one_particle_energies(self):
        """The N nonnegative one-particle energies 4*sigma_k, ascending.

        Singular values of an antisymmetric matrix come in equal pairs; one
        representative per pair is returned.
        """
        s = np.linalg.svd(self.a, compute_uv=False)
        return 4.0 * np.sort(s)[::2]


def _antisymmetric_from_upper(upper):
    """Exact antisymmetrization of a strictly upper-triangular matrix."""
    return upper - upper.T


def build_txy_majorana(spec):
    """Quadratic Majorana form of a txy chain.

    Nonzero upper-triangle entries (1-based Majorana indices):
    ``A[2i-1, 2i] = -h_i/2``, ``A[2i, 2i+1] = -jx_i/2``,
    ``A[2i-1, 2i+2] = +jy_i/2``.
    """
    if spec.kind != TXY:
        raise SpecificationError(f"expected a txy spec, got kind {spec.kind!r}")
    n = spec.n_sites
    upper = np.zeros((2 * n, 2 * n))
    for i in range(n):
        upper[2 * i, 2 * i + 1] = -spec.h[i] / 2.0
    for i in range(n - 1):
        upper[2 * i + 1, 2 * i + 2] = -spec.jx[i] / 2.0
        upper[2 * i, 2 * i + 3] = spec.jy[i] / 2.0
    return MajoranaForm(n_sites=n, a=_antisymmetric_from_upper(upper))


def build_3si_majorana(spec):
    """Quadratic Majorana form of a tsi chain.

    Field and two-spin terms sit where the txy ones do; the three-spin term
    centered on site i couples Majoranas two sites apart:
    ``A[2i-2, 2i+1] = -b3_i/2`` (1-based).  The coefficients are certified
    against dense spin-spectrum reconstruction in the test suite.
    """
    if spec.kind != TSI:
        raise SpecificationError(f"expected a tsi spec, got kind {spec.kind!r}")
    n = spec.n_sites
    upper = np.zeros((2 * n, 2 * n))
    for i in range(n):
        upper[2 * i, 2 * i + 1] = -spec.h[i] / 2.0
    for i in range(n - 1):
        upper[2 * i + 1, 2 * i + 2] = -spec.b2[i] / 2.0
    for m in range(n - 2):
        # center site m+1 (0-based): couples w_{2m+1} (left partner) to w_{2m+4}
        upper[2 * m + 1, 2 * m + 4] = -spec.b3[m] / 2.0
    return MajoranaForm(n_sites=n, a=_antisymmetric_from_upper(upper))


def build_majorana(spec):
    """Dispatch to the builder matching ``spec.kind``."""
    if spec.kind == TXY:
        return build_txy_majorana(spec)
    return build_3si_majorana(spec)


def attach_auxiliary(bulk, end_bond_scale=0.02, end_fields=(0.0, 0.0)):
    """Attach one weakly coupled auxiliary site to each end of ``bulk``.

    The new end sites get fields ``end_fields`` (default 0) and couple to
    the bulk through the adjacent bulk bond scaled by ``end_bond_scale``.
    For tsi chains the boundary three-spin terms that involve an auxiliary
    site are scaled by the same factor.

    Returns a spec with ``bulk.n_sites + 2`` sites.
    """
    if end_bond_scale < 0:
        raise SpecificationError(f"end_bond_scale must be >= 0, got {end_bond_scale}")
    if bulk.n_sites < 1:
        raise SpecificationError("bulk chain needs at least one site")
    s = float(end_bond_scale)
    f_left, f_right = (float(end_fields[0]), float(end_fields[1]))
    h = np.concatenate(([f_left], bulk.h, [f_right]))

    def _end_scaled(bonds):
        # single-site bulk has no bond to scale against; fall back to unit coupling
        left = bonds[0] if bonds.size else 1.0
        right = bonds[-1] if bonds.size else 1.0
        return np.concatenate(([s * left], bonds, [s * right]))

    if bulk.kind == TXY:
        return ChainSpec(kind=TXY, h=h, jx=_end_scaled(bulk.jx), jy=_end_scaled(bulk.jy))
    b3_left = s * bulk.b3[0] if bulk.b3.size else 0.0
    b3_right = s * bulk.b3[-1] if bulk.b3.size else 0.0
    b3 = np.concatenate(([b3_left], bulk.b3, [b3_right]))
    return ChainSpec(kind=TSI, h=h, b2=_end_scaled(bulk.b2), b3=b3)


def reduced_params(jx, jy, h):
    """(anisotropy, reduced field): gamma = (jx-jy)/(jx+jy), hbar = h/(jx+jy)."""
    total = jx + jy
    if total == 0:
        raise DegenerateParameterizationError("jx + jy = 0 has no reduced form")
    return (jx - jy) / total, h / total


def full_params(gamma, hbar, scale=1.0):
    """Inverse of :func:`reduced_params` at coupling scale ``jx + jy = scale``."""
    if scale == 0:
        raise DegenerateParameterizationError("scale jx + jy must be nonzero")
    jx = scale * (1.0 + gamma) / 2.0
    jy = scale * (1.0 - gamma) / 2.0
    return jx, jy, hbar * scale


def duality_map(h, jx, jy):
    """Map txy couplings to the dual three-spin couplings (lam1, lam2) = (h/jx, -jy/jx)."""
    if jx == 0:
        raise DegenerateParameterizationError("duality map requires jx != 0")
    return h / jx, -jy / jx
