import itertools
import math

import numpy as np
import pytest

from qcgibbs import (
    AccuracyError,
    ContractError,
    ResourceError,
    Spectrum,
    SpectrumSource,
    TailModelError,
    box,
    fd_eigenvalues,
    homogeneous,
    oscillator_spectrum,
    rescale,
    solve_box,
    solve_fd_1d,
    spectrum_from_csv,
    spectrum_to_csv,
    tabulated,
    tail_bound,
    wedge_spectrum,
)

PI2 = math.pi**2


# ---------------------------------------------------------------------------
# box levels


def test_box_1d_first_three():
    spec = solve_box(1, [1.0], count=3)
    np.testing.assert_allclose(spec.levels, [PI2 / 2, 2 * PI2, 9 * PI2 / 2], rtol=1e-14)


def test_box_1d_matches_fd_oracle():
    # oracle: Richardson-extrapolated finite differences converge to the
    # analytic values under grid refinement
    analytic = solve_box(1, [1.0], count=3).levels
    fd = solve_fd_1d(box([1.0]), grid=(None, 3000), count=3)
    np.testing.assert_allclose(fd.levels, analytic, rtol=1e-8)


def test_box_h_scaling():
    assert solve_box(1, [1.0], planck=2.0, count=1).levels[0] == pytest.approx(
        4 * (PI2 / 2), rel=1e-14
    )


def test_box_2d_degeneracy_brute_force():
    spec = solve_box(2, (1.0, 1.0), count=5)
    # oracle: direct enumeration of (pi^2/2)(n1^2+n2^2) over a safe window
    values = sorted(
        PI2 / 2 * (n1**2 + n2**2)
        for n1, n2 in itertools.product(range(1, 40), repeat=2)
    )[:5]
    np.testing.assert_allclose(spec.levels, values, rtol=1e-13)
    assert spec.levels[1] == spec.levels[2] == pytest.approx(5 * PI2 / 2)


def test_box_resource_cap():
    with pytest.raises(ResourceError):
        solve_box(3, (1.0, 1.0, 1.0), count=500, max_states=100)


# ---------------------------------------------------------------------------
# finite differences


def test_fd_box_ground_level():
    spec = solve_fd_1d(box([1.0]), grid=(None, 4000), count=1)
    assert abs(spec.levels[0] - PI2 / 2) < 1e-5
    assert spec.level_errors is not None and spec.level_errors[0] < 1e-4


def test_fd_second_order_convergence():
    # raw scheme error shrinks by ~4x when the grid is halved
    exact = PI2 / 2
    e_p = fd_eigenvalues(box([1.0]), points=1000, count=1)[0]
    e_2p = fd_eigenvalues(box([1.0]), points=2001, count=1)[0]
    ratio = (exact - e_p) / (exact - e_2p)
    assert 3.5 < ratio < 4.5


def test_fd_oscillator_spacing():
    spec = solve_fd_1d(homogeneous(2), count=2)
    gap = spec.levels[1] - spec.levels[0]
    assert abs(gap - math.sqrt(2.0)) / math.sqrt(2.0) < 1e-5


def test_fd_oscillator_h_scaling():
    e1 = solve_fd_1d(homogeneous(2), planck=1.0, count=1).levels[0]
    e2 = solve_fd_1d(homogeneous(2), planck=2.0, count=1).levels[0]
    assert abs(e2 / e1 - 2.0) < 1e-4  # phi(h) = h^(2*2/(2+2)) = h


def test_fd_matches_rescaled_base():
    base = solve_fd_1d(homogeneous(2), count=16)
    direct = solve_fd_1d(homogeneous(2), planck=2.0, count=16)
    scaled = rescale(base, 2.0, 1.0)
    half = 8
    np.testing.assert_allclose(
        direct.levels[:half], scaled.levels[:half], rtol=1e-4
    )


def test_fd_accuracy_error_names_level():
    with pytest.raises(AccuracyError, match="level"):
        solve_fd_1d(box([1.0]), grid=(None, 30), count=5, accuracy_rtol=1e-12)


def test_fd_operator_normalization():
    # -(h^2/2m) u'' + V with (h, m) equals (h^2/m) times the unit-coefficient
    # problem -(1/2) u'' + (m/h^2) V; checked on a tabulated rescaling of x^2
    h, m = 2.0, 3.0
    xs = np.linspace(-8.0, 8.0, 4001)
    direct = solve_fd_1d(homogeneous(2, mass=m), planck=h, grid=(8.0, 3000), count=3)
    scaled_pot = tabulated(xs, (m / h**2) * xs**2, mass=1.0)
    probabilist = solve_fd_1d(scaled_pot, planck=1.0, grid=(None, 3000), count=3)
    # tolerance dominated by the interpolant's dx^2/6 defect, not the solver
    np.testing.assert_allclose(
        direct.levels, (h**2 / m) * probabilist.levels, rtol=1e-5
    )


# ---------------------------------------------------------------------------
# analytic oscillator and wedge


def test_oscillator_levels():
    spec = oscillator_spectrum(4, mass=1.0, planck=1.0)
    np.testing.assert_allclose(spec.levels, math.sqrt(2.0) * (np.arange(1, 5) - 0.5), rtol=1e-15)
    assert spec.source is SpectrumSource.ANALYTIC_HARMONIC


def test_wedge_levels_against_fd():
    # the |x| kink caps Richardson convergence on even states near 1e-5 at
    # this resolution; the solver's own estimates must cover the true error
    analytic = wedge_spectrum(8)
    fd = solve_fd_1d(homogeneous(1), count=8, refinements=2)
    np.testing.assert_allclose(fd.levels, analytic.levels, rtol=2e-5)
    assert np.all(np.abs(fd.levels - analytic.levels) <= fd.level_errors)


def test_wedge_mass_and_planck_scaling():
    base = wedge_spectrum(5)
    scaled = wedge_spectrum(5, mass=2.0, planck=3.0)
    np.testing.assert_allclose(
        scaled.levels, base.levels * (3.0**2 / 2.0) ** (1.0 / 3.0), rtol=1e-14
    )


# ---------------------------------------------------------------------------
# rescaling


def test_rescale_identity():
    base = Spectrum(np.array([1.0, 2.0, 3.0]), 1.0, SpectrumSource.ANALYTIC_BOX)
    out = rescale(base, 1.0, 1.0)
    np.testing.assert_array_equal(out.levels, base.levels)
    assert out.source is SpectrumSource.RESCALED


def test_rescale_is_exact_multiplication():
    base = Spectrum(np.linspace(0.7, 40.0, 32), 1.0, SpectrumSource.ANALYTIC_BOX)
    out = rescale(base, 2.3, 0.75)
    np.testing.assert_array_equal(out.levels, base.levels * 2.3**0.75)


def test_rescale_values():
    base = Spectrum(np.array([PI2 / 2]), 1.0, SpectrumSource.ANALYTIC_BOX)
    assert rescale(base, 3.0, 2.0).levels[0] == pytest.approx(9 * PI2 / 2, rel=1e-14)
    base1 = Spectrum(np.array([1.0]), 1.0, SpectrumSource.ANALYTIC_BOX)
    assert rescale(base1, 4.0, 2.0 / 3.0).levels[0] == pytest.approx(
        4.0 ** (2.0 / 3.0), rel=1e-14
    )


def test_rescale_multiplicativity():
    base = Spectrum(np.array([1.0, 2.5, 4.0]), 1.0, SpectrumSource.ANALYTIC_BOX)
    a = 0.75
    once = rescale(base, 2.0 * 3.0, a)
    np.testing.assert_allclose(once.levels, base.levels * (2.0 * 3.0) ** a, rtol=1e-14)
    np.testing.assert_allclose(
        once.levels, base.levels * 2.0**a * 3.0**a, rtol=1e-14
    )


def test_rescale_contract():
    base = Spectrum(np.array([1.0]), 1.0, SpectrumSource.ANALYTIC_BOX)
    scaled = rescale(base, 2.0, 1.0)
    with pytest.raises(ContractError):
        rescale(scaled, 2.0, 1.0)
    with pytest.raises(ValueError):
        rescale(base, -1.0, 1.0)
    off_base = Spectrum(np.array([1.0]), 2.0, SpectrumSource.ANALYTIC_BOX)
    with pytest.raises(ContractError):
        rescale(off_base, 2.0, 1.0)


# ---------------------------------------------------------------------------
# tail bounds


def test_tail_bound_box():
    spec = solve_box(1, [1.0], count=50)
    bound = tail_bound(spec, 1.0)
    # oracle: the true tail, summed directly to 200 terms, is ~exp(-beta E_51)
    n = np.arange(51, 201)
    true_tail = float(np.exp(-PI2 / 2 * n**2).sum())
    assert bound <= 1e-100
    assert bound >= true_tail  # a bound, not an estimate


def test_tail_bound_linear_levels():
    spec = Spectrum(np.arange(1.0, 21.0), 1.0, SpectrumSource.ANALYTIC_BOX)
    bound = tail_bound(spec, 1.0)
    geometric = math.exp(-21.0) / (1.0 - math.exp(-1.0))
    assert bound >= geometric * 0.999
    assert bound <= 3.0 * geometric


def test_tail_bound_monotone_in_beta():
    spec = Spectrum(np.arange(1.0, 41.0) ** 1.3, 1.0, SpectrumSource.ANALYTIC_BOX)
    for beta in (0.5, 1.0, 2.0, 4.0):
        assert tail_bound(spec, 2 * beta) <= tail_bound(spec, beta)


def test_tail_bound_needs_depth():
    spec = Spectrum(np.array([1.0, 2.0]), 1.0, SpectrumSource.ANALYTIC_BOX)
    with pytest.raises(ValueError):
        tail_bound(spec, 1.0)


def test_tail_model_rejects_flat_spectrum():
    spec = Spectrum(np.ones(16), 1.0, SpectrumSource.ANALYTIC_BOX)
    with pytest.raises(TailModelError):
        tail_bound(spec, 1.0)


# ---------------------------------------------------------------------------
# construction and serialization


def test_spectrum_validation():
    with pytest.raises(ValueError):
        Spectrum(np.array([0.0, 1.0]), 1.0, SpectrumSource.ANALYTIC_BOX)
    with pytest.raises(ValueError):
        Spectrum(np.array([2.0, 1.0]), 1.0, SpectrumSource.ANALYTIC_BOX)
    with pytest.raises(ValueError):
        Spectrum(np.array([1.0]), -1.0, SpectrumSource.ANALYTIC_BOX)


def test_csv_round_trip(tmp_path):
    spec = solve_box(1, [1.0], planck=0.5, count=12)
    path = tmp_path / "spec.csv"
    spectrum_to_csv(spec, path)
    text = path.read_text()
    assert text.startswith("# h=0.5\n# source=analytic_box\nn,E\n")
    back = spectrum_from_csv(path)
    np.testing.assert_array_equal(back.levels, spec.levels)
    assert back.planck == spec.planck
    assert back.source is spec.source


def test_csv_rejects_disorder(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# h=1\n# source=analytic_box\nn,E\n1,2.0\n2,1.0\n")
    with pytest.raises(ValueError):
        spectrum_from_csv(path)
