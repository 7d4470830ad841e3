import numpy as np
import pytest

from ness_chain import (
    BathSpec,
    ChainSpec,
    attach_auxiliary,
    build_3si_majorana,
    build_majorana,
    build_txy_majorana,
    duality_map,
    full_params,
    reduced_params,
)
from ness_chain.errors import DegenerateParameterizationError, SpecificationError
from ness_chain.oracle import build_spin_hamiltonian
from ness_chain.zero_modes import bulk_gap

from helpers import random_spec, subset_sum_spectrum


def test_single_site_field_entries():
    form = build_txy_majorana(ChainSpec.txy_uniform(1, 0.7, 0.0))
    expected = np.array([[0.0, -0.35], [0.35, 0.0]])
    assert np.array_equal(form.a, expected)


def test_single_bond_entries():
    spec = ChainSpec(kind="txy", h=np.zeros(2), jx=np.array([1.0]), jy=np.array([0.0]))
    a = build_txy_majorana(spec).a
    expected = np.zeros((4, 4))
    expected[1, 2] = -0.5
    expected[2, 1] = 0.5
    assert np.array_equal(a, expected)


def test_single_site_singular_values():
    form = build_txy_majorana(ChainSpec.txy_uniform(1, 0.7, 0.0))
    s = np.linalg.svd(form.a, compute_uv=False)
    assert np.allclose(s, 0.35)
    # spin gap 2h equals 4 * sigma_max
    assert abs(4.0 * s.max() - 2 * 0.7) < 1e-15


def test_tfim_energies_match_analytic_set():
    from ness_chain.tfim_exact import solve_k_spectrum

    h, jx, n = -0.45, 1.0, 8
    form = build_txy_majorana(ChainSpec.txy_uniform(n, h, jx))
    spectrum = solve_k_spectrum(n, h=h, jx=jx)
    assert np.abs(np.sort(form.one_particle_energies())
                  - np.sort(spectrum.all_energies())).max() < 1e-9


def test_3si_pure_field_block_diagonal():
    a = build_3si_majorana(ChainSpec.tsi_uniform(3, 0.0, 0.0, jx=1.0)).a
    expected = np.zeros((6, 6))
    for i in range(3):
        expected[2 * i, 2 * i + 1] = -0.5
        expected[2 * i + 1, 2 * i] = 0.5
    assert np.array_equal(a, expected)


def test_3si_reduces_to_tfim_at_lambda2_zero():
    lam1, jx, n = 0.8, 1.3, 6
    a_tsi = build_3si_majorana(ChainSpec.tsi_uniform(n, lam1, 0.0, jx=jx)).a
    a_txy = build_txy_majorana(ChainSpec.txy_uniform(n, jx, jx * lam1, 0.0)).a
    assert np.array_equal(a_tsi, a_txy)


@pytest.mark.parametrize("kind,n", [("txy", 6), ("tsi", 6), ("txy", 8), ("tsi", 8)])
def test_spectrum_equivalence_random(kind, n):
    # the 2^N spin eigenvalues must be the subset sums of the one-particle set
    rng = np.random.default_rng(42 + n)
    spec = random_spec(kind, n, rng)
    form = build_majorana(spec)
    energies = form.one_particle_energies()
    dense = build_spin_hamiltonian(spec, dense=True)
    eigs = np.sort(np.linalg.eigvalsh(dense))
    assert np.abs(eigs - subset_sum_spectrum(energies)).max() < 1e-9


def test_3si_spectrum_equivalence_example():
    spec = ChainSpec.tsi_uniform(6, 0.7, 1.3, jx=1.0)
    energies = build_3si_majorana(spec).one_particle_energies()
    eigs = np.sort(np.linalg.eigvalsh(build_spin_hamiltonian(spec, dense=True)))
    assert np.abs(eigs - subset_sum_spectrum(energies)).max() < 1e-9


def test_antisymmetry_exact():
    rng = np.random.default_rng(1)
    for kind in ("txy", "tsi"):
        a = build_majorana(random_spec(kind, 7, rng)).a
        assert np.abs(a + a.T).max() == 0.0


def test_bandwidth():
    rng = np.random.default_rng(2)
    for kind, bw in (("txy", 3), ("tsi", 5)):
        a = build_majorana(random_spec(kind, 9, rng)).a
        j, k = np.nonzero(a)
        assert np.abs(j - k).max() <= bw


def test_wrong_kind_rejected():
    spec = ChainSpec.txy_uniform(3, 0.5, 1.0)
    with pytest.raises(SpecificationError):
        build_3si_majorana(spec)
    with pytest.raises(SpecificationError):
        build_txy_majorana(ChainSpec.tsi_uniform(3, 0.5, 0.5))


def test_array_length_validation():
    with pytest.raises(SpecificationError):
        ChainSpec(kind="txy", h=np.zeros(3), jx=np.zeros(3), jy=np.zeros(2))
    with pytest.raises(SpecificationError):
        ChainSpec(kind="txy", h=np.array([1.0, np.inf]), jx=np.zeros(1), jy=np.zeros(1))
    with pytest.raises(SpecificationError):
        ChainSpec(kind="tsi", h=np.zeros(3), b2=np.zeros(2), b3=np.zeros(3))


def test_attach_auxiliary_tfim():
    bulk = ChainSpec.txy_uniform(10, 0.6, 1.0)
    spec = attach_auxiliary(bulk, 0.02, (0.0, 0.0))
    assert spec.n_sites == 12
    assert np.allclose(spec.h, [0.0] + [0.6] * 10 + [0.0])
    assert np.allclose(spec.jx, [0.02] + [1.0] * 9 + [0.02])
    assert np.allclose(spec.jy, 0.0)


def test_attach_auxiliary_identity():
    bulk = ChainSpec.txy_uniform(5, 0.3, 1.0, 0.2)
    spec = attach_auxiliary(bulk, 1.0, (0.3, 0.3))
    assert np.allclose(spec.h, 0.3)
    assert np.allclose(spec.jx, 1.0)
    assert np.allclose(spec.jy, 0.2)


def test_attach_auxiliary_3si_boundary_terms():
    bulk = ChainSpec.tsi_uniform(40, 0.7, 1.3, jx=1.0)
    spec = attach_auxiliary(bulk, 0.02, (0.0, 0.0))
    assert spec.n_sites == 42
    assert spec.b2[0] == spec.b2[-1] == pytest.approx(0.02 * 0.7)
    # boundary three-spin terms touching an auxiliary site carry the same factor
    assert spec.b3[0] == spec.b3[-1] == pytest.approx(0.02 * 1.3)
    assert np.allclose(spec.b3[1:-1], 1.3)


def test_attach_auxiliary_negative_scale():
    with pytest.raises(SpecificationError):
        attach_auxiliary(ChainSpec.txy_uniform(4, 0.5, 1.0), -0.1)


def test_reduced_params():
    assert reduced_params(1.0, 0.0, 0.5) == (1.0, 0.5)
    assert reduced_params(0.5, 0.5, 1.0) == (0.0, 1.0)  # multi-critical point
    jx, jy, h = full_params(*reduced_params(0.8, 0.2, 0.3), scale=1.0)
    assert (jx, jy, h) == pytest.approx((0.8, 0.2, 0.3))
    with pytest.raises(DegenerateParameterizationError):
        reduced_params(1.0, -1.0, 0.5)


def test_duality_map():
    assert duality_map(1.0, 1.0, 0.0) == (1.0, 0.0)
    assert duality_map(0.0, 2.0, -2.0) == (0.0, 1.0)
    with pytest.raises(DegenerateParameterizationError):
        duality_map(1.0, 0.0, 0.5)


def test_duality_tfim_line_gives_lambda2_zero():
    for h in (0.2, 0.7, 1.5):
        _, lam2 = duality_map(h, 1.3, 0.0)
        assert lam2 == 0.0


def test_duality_bulk_gap_consistency():
    # gap closes for the txy chain iff it closes for its dual (here on lambda2 = 1 + lambda1)
    n = 200
    lam1 = 0.5
    for lam2, expect_gapless in ((1.0 + lam1, True), (3.0, False)):
        jx = 1.0
        h, jy = lam1 * jx, -lam2 * jx
        assert duality_map(h, jx, jy) == pytest.approx((lam1, lam2))
        gap_txy = bulk_gap(ChainSpec.txy_uniform(n, h, jx, jy), "periodic")
        gap_tsi = bulk_gap(ChainSpec.tsi_uniform(n, lam1, lam2, jx=jx), "periodic")
        assert (gap_txy < 5e-2) == expect_gapless
        assert (gap_tsi < 5e-2) == expect_gapless


def test_bath_spec_rates():
    bath = BathSpec(gamma_1=0.4, gamma_n=0.0, n_1=0.25, n_n=0.0)
    up, down = bath.rates(0)
    assert (up, down) == (0.1, 0.5)
    assert bath.gamma_plus(0) == pytest.approx(0.6)
    assert bath.gamma_minus(0) == pytest.approx(-0.4)
    # gamma_plus + gamma_minus = 2 * up >= 0
    assert bath.gamma_plus(0) + bath.gamma_minus(0) == pytest.approx(2 * up)
    with pytest.raises(SpecificationError):
        BathSpec(gamma_1=-0.1, gamma_n=0.0, n_1=0.0, n_n=0.0)
