"""Exact diagonalization of the open-boundary TFIM and the three-qubit toy model.

The open transverse-field Ising chain (jy = 0, uniform couplings) has
one-particle energies ``eps(k) = 2 sqrt(h^2 + jx^2 + 2 h jx cos k)`` at
momenta solving ``sin(kN)/sin(k(N+1)) = xi`` with the reduced field
``xi = -h/jx``.  For ``|xi| >= N/(N+1)`` all N roots are real; otherwise
N-1 are real and the last is a bound state ``k' = i kappa`` (xi > 0) or
``k' = pi + i kappa`` (xi < 0) with ``sinh(kappa N)/sinh(kappa (N+1)) = |xi|``,
exponentially localized at the chain ends.

The weakly coupled auxiliary end spins of the filter setup see only the
bound-state doublet; projecting onto it gives a three-qubit model whose
steady state is available in closed form (:func:`toy_sz`, :func:`toy_g2`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chains import BathSpec, ChainSpec
from .errors import SpecificationError

ROOT_RESIDUAL_TOL = 1e-12
RADICAND_CLAMP = 1e-12
_BISECT_MAX_ITER = 200


def _bisect(f, a, b, max_iter=_BISECT_MAX_ITER):
    """Safeguarded bisection down to adjacent floats; returns the best endpoint."""
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa < 0.0) == (fb < 0.0):
        raise SpecificationError(f"no sign change on [{a}, {b}]")
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if m <= a or m >= b:  # interval collapsed to adjacent floats
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return a if abs(fa) <= abs(fb) else b


def _k_ratio(k, n):
    return math.sin(k * n) / math.sin(k * (n + 1))


def _kappa_ratio(kappa, n):
    """sinh(kappa n)/sinh(kappa (n+1)), overflow-safe for any kappa > 0."""
    return math.exp(-kappa) * math.expm1(-2.0 * kappa * n) / math.expm1(
        -2.0 * kappa * (n + 1)
    )


def _solve_kappa(n, xi_abs):
    """Positive root of the strictly decreasing sinh ratio; None if out of range."""
    lo = 1e-12
    if _kappa_ratio(lo, n) <= xi_abs:
        return None  # |xi| at (or numerically above) the n/(n+1) threshold
    hi = max(1.0, -math.log(xi_abs) + 5.0)
    while _kappa_ratio(hi, n) >= xi_abs:
        hi *= 2.0
    return _bisect(lambda k: _kappa_ratio(k, n) - xi_abs, lo, hi)


@dataclass
class TfimSpectrum:
    """Open-chain TFIM solution bundle: roots, energies and weights.

    ``k_real`` is ascending in [0, pi]; a root exactly at 0 or pi marks the
    threshold case ``|xi| = N/(N+1)``.  ``phi``/``psi`` rows follow the order
    of ``k_real`` with the bound-state row appended last when ``kappa`` is
    set; ``a_norm`` holds each root's normalizer.
    """

    n_sites: int
    xi: float
    h: float
    jx: float
    k_real: np.ndarray
    energies: np.ndarray
    kappa: float | None
    epsilon_kappa: float | None
    phi: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    a_norm: np.ndarray = field(repr=False)

    def all_energies(self):
        """Real-root energies plus the bound-state splitting, one array."""
        if self.kappa is None:
            return self.energies.copy()
        return np.concatenate([self.energies, [self.epsilon_kappa]])

    @property
    def kappa_root(self):
        """The complex momentum of the bound state, or None."""
        if self.kappa is None:
            return None
        if math.isinf(self.kappa):
            return 1j * math.inf if self.xi >= 0 else math.pi + 1j * math.inf
        return 1j * self.kappa if self.xi > 0 else math.pi + 1j * self.kappa


def _energy(h, jx, cos_k):
    rad = h * h + jx * jx + 2.0 * h * jx * cos_k
    if rad < -RADICAND_CLAMP:
        raise SpecificationError(f"negative energy radicand {rad}: wrong root branch")
    return 2.0 * math.sqrt(max(rad, 0.0))


def _epsilon_kappa(n, kappa, jx):
    """Bound-state splitting, evaluated in the cancellation-free product form.

    For kappa solving the quantization condition the radicand factorizes:
    ``eps^2/4 = jx^2 e^{-2 kappa N} (1 - e^{-2 kappa})^2 / (1 - e^{-2 kappa(N+1)})^2``,
    exact to rounding even when the direct formula loses all digits.
    """
    if math.isinf(kappa):
        return 0.0
    t = math.exp(-kappa)
    num = -math.expm1(-2.0 * kappa)
    den = -math.expm1(-2.0 * kappa * (n + 1))
    return 2.0 * abs(jx) * t**n * num / den


def solve_k_spectrum(n_sites, xi=None, h=None, jx=1.0):
    """Solve the open-chain quantization condition and fill energies and weights.

    Parameters
    ----------
    n_sites : int
    xi : float, optional
        Reduced field -h/jx.  May be omitted when ``h`` is given; when both
        are given they must agree.
    h, jx : float
        Field and coupling (jx != 0).

    Real roots are isolated by bisection between consecutive poles of
    ``sin(k (N+1))``; the bound state by bisection on the monotone sinh
    ratio.  A root-count mismatch raises instead of padding.
    """
    n = int(n_sites)
    if n < 1:
        raise SpecificationError("n_sites must be >= 1")
    if jx == 0:
        raise SpecificationError("jx must be nonzero")
    if xi is None:
        if h is None:
            raise SpecificationError("give xi or h")
        xi = -h / jx
    else:
        xi = float(xi)
        if h is None:
            h = -xi * jx
        elif abs(xi + h / jx) > 1e-12 * max(1.0, abs(xi)):
            raise SpecificationError(f"xi={xi} inconsistent with -h/jx={-h / jx}")

    threshold = n / (n + 1.0)
    poles = np.arange(1, n + 1) * math.pi / (n + 1.0)
    f = lambda k: _k_ratio(k, n) - xi

    roots = []
    # interior intervals always hold exactly one root each
    for m in range(1, n):
        a, b = poles[m - 1], poles[m]
        inset = (b - a) * 1e-13
        roots.append(_bisect(f, a + inset, b - inset))

    kappa = None
    if abs(xi) >= threshold:
        # N-th root sits in the boundary interval next to k=0 (xi>0) or k=pi
        if xi > 0:
            a, b = 0.0, poles[0]
            inset = (b - a) * 1e-13
            lo, hi = a + inset, b - inset
        else:
            a, b = poles[-1], math.pi
            inset = (b - a) * 1e-13
            lo, hi = a + inset, b - inset
        if f(lo) == 0.0 or (f(lo) < 0.0) != (f(hi) < 0.0):
            roots.append(_bisect(f, lo, hi))
        elif abs(abs(xi) - threshold) <= 64.0 * np.finfo(float).eps:
            roots.append(0.0 if xi > 0 else math.pi)  # threshold limit root
        else:
            raise SpecificationError(
                f"root count mismatch: expected {n} real roots for xi={xi}"
            )
    else:
        if xi == 0.0:
            kappa = math.inf
        else:
            kappa = _solve_kappa(n, abs(xi))
            if kappa is None:
                raise SpecificationError(f"bound-state search failed for xi={xi}")

    roots = np.sort(np.asarray(roots, dtype=float))
    expected = n if kappa is None else n - 1
    if roots.size != expected:
        raise SpecificationError(
            f"root count mismatch: found {roots.size}, expected {expected}"
        )

    energies = np.array([_energy(h, jx, math.cos(k)) for k in roots])
    eps_kappa = _epsilon_kappa(n, kappa, jx) if kappa is not None else None
    # consistency: the direct radicand must not be substantially negative
    if kappa is not None and not math.isinf(kappa):
        _energy(h, jx, math.cosh(kappa) if xi > 0 else -math.cosh(kappa))

    phi_rows, psi_rows, norms = [], [], []
    for k in roots:
        p, q, a_k = eval_weights(n, k, xi, jx)
        phi_rows.append(p)
        psi_rows.append(q)
        norms.append(a_k)
    if kappa is not None:
        root = (1j * kappa) if xi >= 0 else (math.pi + 1j * kappa)
        p, q, a_k = eval_weights(n, root, xi, jx)
        phi_rows.append(p)
        psi_rows.append(q)
        norms.append(a_k)

    return TfimSpectrum(
        n_sites=n,
        xi=xi,
        h=h,
        jx=jx,
        k_real=roots,
        energies=energies,
        kappa=kappa,
        epsilon_kappa=eps_kappa,
        phi=np.array(phi_rows),
        psi=np.array(psi_rows),
        a_norm=np.array(norms),
    )


def _scaled_sinh_profile(kappa, orders):
    """sinh(kappa*m)/sinh(kappa*max(m)) for integer orders m, overflow-safe."""
    m_max = max(orders)
    return np.array(
        [
            math.exp(kappa * (m - m_max)) * math.expm1(-2.0 * kappa * m)
            / math.expm1(-2.0 * kappa * m_max)
            if m > 0
            else 0.0
            for m in orders
        ]
    )


def eval_weights(n_sites, root, xi, jx=1.0):
    """Weights (phi_j, psi_j) and normalizer for one quantization root.

    ``phi_j ~ sin(k (N+1-j))`` and ``psi_j ~ -sign[jx sin k / sin(k (N+1))]
    sin(k j)``, each normalized to unit norm (for real roots this equals the
    closed-form normalizer).  A complex ``root`` selects the bound state:
    sines continue to hyperbolic profiles, renormalized, with the sign factor
    continued through the real part of the ratio.

    Roots exactly at 0 or pi (threshold case) use the linear limiting profile.
    """
    n = int(n_sites)
    j = np.arange(1, n + 1)
    if isinstance(root, complex) and root.imag != 0.0:
        kappa = root.imag
        on_pi_branch = abs(root.real) > 1e-9
        if (on_pi_branch and xi > 0) or (not on_pi_branch and xi < 0):
            raise SpecificationError("bound-state branch inconsistent with sign of xi")
        if math.isinf(kappa):
            # xi = 0 limit: the bound state collapses onto the end sites
            phi = np.zeros(n)
            phi[0] = 1.0
            psi = np.zeros(n)
            psi[-1] = -math.copysign(1.0, jx)
            return phi, psi, 1.0
        residual = abs(_kappa_ratio(kappa, n) - abs(xi))
        if residual > 1e-9:
            raise SpecificationError(f"not a bound-state root (residual {residual:.2e})")
        phi = _scaled_sinh_profile(kappa, list(n + 1 - j))
        psi_profile = _scaled_sinh_profile(kappa, list(j))
        if on_pi_branch:
            # sin((pi + i kappa) m) = (-1)^m i sinh(kappa m)
            phi = phi * (-1.0) ** (n + 1 - j)
            psi_profile = psi_profile * (-1.0) ** j
            ratio_sign = math.copysign(1.0, jx) * (-1.0) ** n
        else:
            ratio_sign = math.copysign(1.0, jx)
        a_phi = 1.0 / math.sqrt(float(phi @ phi))
        a_psi = 1.0 / math.sqrt(float(psi_profile @ psi_profile))
        return phi * a_phi, -ratio_sign * psi_profile * a_psi, a_phi

    k = float(root.real if isinstance(root, complex) else root)
    if min(abs(k), abs(math.pi - k)) < 1e-13:
        # threshold root |xi| = N/(N+1): weights follow the linear limit
        # sin(k m) -> k m (and the alternating analogue at k = pi)
        if abs(abs(xi) - n / (n + 1.0)) > 1e-9:
            raise SpecificationError(f"{k} is only a root at |xi| = N/(N+1)")
        at_pi = abs(math.pi - k) < 1.0
        phi = (n + 1.0 - j).astype(float)
        psi_profile = j.astype(float)
        if at_pi:
            phi = phi * (-1.0) ** (n + 1 - j)
            psi_profile = psi_profile * (-1.0) ** j
            ratio_sign = math.copysign(1.0, jx) * (-1.0) ** n
        else:
            ratio_sign = math.copysign(1.0, jx)
        a_phi = 1.0 / math.sqrt(float(phi @ phi))
        a_psi = 1.0 / math.sqrt(float(psi_profile @ psi_profile))
        return phi * a_phi, -ratio_sign * psi_profile * a_psi, a_phi

    if not 0.0 < k < math.pi:
        raise SpecificationError(f"root {k} outside (0, pi)")
    if abs(_k_ratio(k, n) - xi) > 1e-9:
        raise SpecificationError(f"{k} is not a quantization root for xi={xi}")
    phi = np.sin(k * (n + 1 - j))
    psi_profile = np.sin(k * j)
    ratio_sign = math.copysign(1.0, jx * math.sin(k) / math.sin(k * (n + 1)))
    a_phi = 1.0 / math.sqrt(float(phi @ phi))
    a_psi = 1.0 / math.sqrt(float(psi_profile @ psi_profile))
    return phi * a_phi, -ratio_sign * psi_profile * a_psi, a_phi


def closed_form_normalizer(n_sites, k):
    """The analytic normalizer 2 (2N+1 - sin(k(2N+1))/sin k)^(-1/2) for real roots."""
    n = int(n_sites)
    return 2.0 / math.sqrt(2.0 * n + 1.0 - math.sin(k * (2 * n + 1)) / math.sin(k))


def renormalized_couplings(bulk, j_end_left, j_end_right):
    """Couplings of the end spins to the bound-state doublet of ``bulk``.

    Returns ``(jbar_left, jbar_right, has_bound_state)``; in the
    paramagnetic regime (no bound state) the couplings are zero and the flag
    is False.  ``jbar_left = phi_kappa[first site] * j_end_left`` and
    ``jbar_right = psi_kappa[last site] * j_end_right``.
    """
    if bulk.kappa is None:
        return 0.0, 0.0, False
    phi = bulk.phi[-1]
    psi = bulk.psi[-1]
    return float(phi[0] * j_end_left), float(psi[-1] * j_end_right), True


@dataclass(frozen=True)
class ToyModelParams:
    """Parameters of the symmetric three-qubit filter model.

    j_bar is the renormalized end coupling (equal on both sides),
    epsilon_kappa the doublet splitting, gamma_plus/minus the combined bath
    rates (equal baths assumed).
    """

    j_bar: float
    epsilon_kappa: float
    gamma_plus: float
    gamma_minus: float

    def __post_init__(self):
        if self.gamma_minus > 0:
            raise SpecificationError("gamma_minus = up - down must be <= 0")
        if self.gamma_plus < 0:
            raise SpecificationError("gamma_plus must be >= 0")

    @property
    def j_plus_sq(self):
        return 2.0 * self.j_bar**2 + self.gamma_plus**2

    @classmethod
    def from_bath(cls, j_bar, epsilon_kappa, gamma, n_th):
        up, down = gamma * n_th, gamma * (n_th + 1.0)
        return cls(
            j_bar=j_bar,
            epsilon_kappa=epsilon_kappa,
            gamma_plus=up + down,
            gamma_minus=up - down,
        )


def toy_sz(p):
    """Closed-form end-spin polarization of the three-qubit model.

    ``sz = gm gp (J+^2 + eps^2) / (J+^4 + gp^2 eps^2)`` with
    ``J+^2 = 2 jbar^2 + gp^2``.
    """
    jp2 = p.j_plus_sq
    if jp2 == 0.0:
        raise SpecificationError("toy model undefined at gamma_plus = j_bar = 0")
    eps2 = p.epsilon_kappa**2
    return p.gamma_minus * p.gamma_plus * (jp2 + eps2) / (jp2**2 + p.gamma_plus**2 * eps2)


def toy_g2(p):
    """Closed-form end-to-end photon cross correlation of the three-qubit model.

    ``g2 = 1 + 4 gm^2 jbar^4 eps^2
           / (J+^4 + gm gp J+^2 + gp (gp + gm) eps^2)^2``.
    """
    jp2 = p.j_plus_sq
    if jp2 == 0.0:
        raise SpecificationError("toy model undefined at gamma_plus = j_bar = 0")
    eps2 = p.epsilon_kappa**2
    gp, gm = p.gamma_plus, p.gamma_minus
    den = jp2**2 + gm * gp * jp2 + gp * (gp + gm) * eps2
    return 1.0 + 4.0 * gm**2 * p.j_bar**4 * eps2 / den**2


def three_site_chain(p):
    """The txy chain + bath realizing the three-qubit model exactly.

    The doublet term ``eps * s+ s-`` equals a transverse field ``eps/2`` on
    the middle site (up to a constant), so the equivalent chain is
    ``h = (0, eps/2, 0)`` with bonds ``(jbar, jbar)`` and equal end baths.
    """
    gamma = -p.gamma_minus
    if gamma <= 0:
        raise SpecificationError("three-site realization needs gamma_minus < 0")
    up = (p.gamma_plus + p.gamma_minus) / 2.0
    n_th = up / gamma
    spec = ChainSpec(
        kind="txy",
        h=np.array([0.0, p.epsilon_kappa / 2.0, 0.0]),
        jx=np.array([p.j_bar, p.j_bar]),
        jy=np.zeros(2),
    )
    bath = BathSpec(gamma_1=gamma, gamma_n=gamma, n_1=n_th, n_n=n_th)
    return spec, bath
