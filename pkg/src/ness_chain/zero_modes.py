"""Majorana zero-mode detection, bulk gaps, and finite-size oscillation crests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chains import TSI, TXY, build_majorana
from .errors import SpecificationError


@dataclass
class ZeroModeReport:
    """Near-zero Majorana modes of a quadratic form.

    ``count`` is the number of modes per end (None when the spectrum near
    zero is too dense or delocalized to classify -- ``gapless`` is then
    set).  ``modes`` are unit vectors in Majorana space, each end-localized;
    ``end_weight`` their squared amplitude on the outer 10% of sites and
    ``decay_length`` an exponential fit (in sites) into the bulk.
    """

    count: int | None
    gapless: bool
    modes: list = field(repr=False)
    smallest_singular_values: np.ndarray
    end_weight: list
    decay_length: list
    left_count: int = 0
    right_count: int = 0


def _site_weights(vec):
    """Per-site squared amplitude of a Majorana-space vector."""
    v = np.asarray(vec)
    return v[0::2] ** 2 + v[1::2] ** 2


def _end_weight(vec, outer_fraction=0.1):
    p = _site_weights(vec)
    n = p.size
    outer = max(1, math.ceil(outer_fraction * n))
    return float(p[:outer].sum() + p[n - outer:].sum()), float(p[:outer].sum()) >= float(
        p[n - outer:].sum()
    )


def _decay_length(vec):
    """1/e amplitude decay length fitted from the dominant end into the bulk."""
    p = _site_weights(vec)
    n = p.size
    if p[: n // 2].sum() < p[n // 2:].sum():
        p = p[::-1]
    half = p[: max(n // 2, 2)]
    mask = half > half[0] * 1e-24
    x = np.arange(half.size)[mask]
    ylog = np.log(half[mask])
    if x.size < 2:
        return math.inf
    slope = np.polyfit(x, ylog, 1)[0]  # p ~ exp(-2 x / ell)
    if slope >= 0:
        return math.inf
    return float(-2.0 / slope)


def find_zero_modes(form, rel_threshold=1e-6, outer_fraction=0.1):
    """Classify near-zero singular modes of a Majorana form by SVD.

    Modes are right-singular vectors with singular value below
    ``rel_threshold * sigma_max``.  For a gapped bulk they come in end
    pairs, so the per-end count is half the number found; a dense or
    delocalized near-zero spectrum yields a ``gapless`` report instead.
    """
    a = form.a
    if not np.any(a):
        raise SpecificationError("zero-mode search needs a nonzero Majorana form")
    _, s, vt = np.linalg.svd(a)
    smax = s[0]
    near = s < rel_threshold * smax
    svals_sorted = np.sort(s)
    candidates = [vt[i] for i in np.nonzero(near)[0]]

    report = ZeroModeReport(
        count=None,
        gapless=True,
        modes=[],
        smallest_singular_values=svals_sorted[: max(8, int(near.sum()) + 2)],
        end_weight=[],
        decay_length=[],
    )
    if len(candidates) > 4 or len(candidates) % 2 == 1:
        return report

    weights = []
    on_left = []
    for v in candidates:
        w, left = _end_weight(v, outer_fraction)
        weights.append(w)
        on_left.append(left)
    if any(w <= 0.9 for w in weights):
        return report
    left_count = sum(on_left)
    right_count = len(candidates) - left_count
    if left_count != right_count:
        return report

    report.count = len(candidates) // 2
    report.gapless = False
    report.modes = candidates
    report.end_weight = weights
    report.decay_length = [_decay_length(v) for v in candidates]
    report.left_count = left_count
    report.right_count = right_count
    return report


def _periodic_majorana(spec):
    """Majorana form with wrap-around couplings (fermion-parity term dropped).

    The wrap bond reuses the chain's first/last coupling values, which is
    exact for uniform chains; this is a gap-location tool, not a full
    periodic spin model.
    """
    form = build_majorana(spec)
    a = form.a.copy()
    n = spec.n_sites
    if n < 3:
        raise SpecificationError("periodic wrap needs at least 3 sites")

    def add(i, j, val):
        a[i, j] += val
        a[j, i] -= val

    if spec.kind == TXY:
        add(2 * n - 1, 0, -spec.jx[0] / 2.0)       # bond N -> 1, jx pattern
        add(2 * n - 2, 1, spec.jy[0] / 2.0)        # bond N -> 1, jy pattern
    elif spec.kind == TSI:
        add(2 * n - 1, 0, -spec.b2[0] / 2.0)
        if spec.b3.size:
            # three-spin terms centered on sites 1 and N wrap around
            add(2 * n - 1, 2, -spec.b3[0] / 2.0)   # center site 1: w_{2N} ~ w_3
            add(2 * n - 3, 0, -spec.b3[-1] / 2.0)  # center site N: w_{2N-2} ~ w_1
    return type(form)(n_sites=n, a=a)


def bulk_gap(spec, boundary="open"):
    """Smallest one-particle excitation energy 4*sigma_min of the chain."""
    if spec.n_sites < 4:
        raise SpecificationError("bulk gap needs at least 4 sites")
    if boundary == "open":
        form = build_majorana(spec)
    elif boundary == "periodic":
        form = _periodic_majorana(spec)
    else:
        raise ValueError(f"boundary must be 'open' or 'periodic', got {boundary!r}")
    s = np.linalg.svd(form.a, compute_uv=False)
    return float(4.0 * s.min())


def soft_mode_momentum(hbar):
    """Momentum where the anisotropy-line dispersion goes soft: arccos(-hbar)."""
    if abs(hbar) > 1.0:
        raise ValueError(f"|hbar| must be <= 1 for a soft mode, got {hbar}")
    return float(math.acos(-hbar))


def predict_crests(n_osc):
    """Reduced fields where the soft mode hits an allowed discrete momentum.

    Discrete momenta ``k_n = pi n / n_osc`` meet ``k0 = arccos(-hbar)`` at
    ``hbar = -cos(pi n / n_osc)``; values inside (0, 1) are returned sorted.
    """
    if n_osc < 2:
        raise ValueError("n_osc must be >= 2")
    vals = [-math.cos(math.pi * n / n_osc) for n in range(1, n_osc)]
    return sorted(v for v in vals if 0.0 < v < 1.0)
