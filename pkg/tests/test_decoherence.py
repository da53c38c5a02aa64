import math

import numpy as np
import pytest

from kaonlab.constants import PhysicalConstants, default_constants
from kaonlab.decoherence import (
    AsymmetryPoint,
    Basis,
    FitMode,
    FitResult,
    bundled_cplear_points,
    fit_zeta,
    modified_asymmetry,
    modified_like_probability,
    modified_unlike_probability,
    read_asymmetry_csv,
)
from kaonlab.evolution import (
    asymmetry_qm,
    joint_like_probability,
    joint_unlike_probability,
)

C = default_constants()


# -- zeta = 0 reductions -----------------------------------------------------------

def test_zeta_zero_reduces_to_quantum_mechanics():
    rng = np.random.default_rng(42)
    for _ in range(100):
        t_l, t_r = (float(x) for x in rng.uniform(0.0, 5.0, 2))
        for basis in Basis:
            assert modified_like_probability(basis, t_l, t_r, 0.0, C) == pytest.approx(
                joint_like_probability(t_l, t_r, C), abs=1e-12
            )
            assert modified_unlike_probability(
                basis, t_l, t_r, 0.0, C
            ) == pytest.approx(joint_unlike_probability(t_l, t_r, C), abs=1e-12)
            assert modified_asymmetry(basis, t_l, t_r, 0.0, C) == pytest.approx(
                asymmetry_qm(t_l - t_r, C), abs=1e-12
            )


# -- full decoherence --------------------------------------------------------------

def test_mass_basis_full_decoherence_value():
    # zeta = 1 removes the interference term: (1/8) * 2 e^{-(gs+gl)t} at equal times.
    for t in (0.3, 1.0, 2.0):
        expected = 0.25 * math.exp(-(C.gamma_s_hat + C.gamma_l_hat) * t)
        value = modified_like_probability(Basis.MASS, t, t, 1.0, C)
        assert value == pytest.approx(expected, rel=1e-12)
        assert value > 0.0


def test_factorization_is_basis_dependent():
    mass = modified_like_probability(Basis.MASS, 1.0, 1.0, 1.0, C)
    strangeness = modified_like_probability(Basis.STRANGENESS, 1.0, 1.0, 1.0, C)
    assert abs(mass - strangeness) > 1e-3


def test_modified_probabilities_stay_physical():
    grid = np.linspace(0.0, 5.0, 26)
    for zeta in (0.0, 0.25, 0.5, 0.75, 1.0):
        for basis in Basis:
            for t_l in grid:
                for t_r in grid[::5]:
                    like = modified_like_probability(
                        basis, float(t_l), float(t_r), zeta, C
                    )
                    unlike = modified_unlike_probability(
                        basis, float(t_l), float(t_r), zeta, C
                    )
                    assert -1e-12 <= like <= 1.0
                    assert -1e-12 <= unlike <= 1.0


# -- asymmetries --------------------------------------------------------------------

def test_mass_asymmetry_is_linear_in_zeta():
    rng = np.random.default_rng(5)
    for _ in range(50):
        t_l, t_r = (float(x) for x in rng.uniform(0.0, 5.0, 2))
        zeta = float(rng.uniform(0.0, 1.0))
        base = asymmetry_qm(t_l - t_r, C)
        if abs(base) < 1e-6:
            continue
        ratio = modified_asymmetry(Basis.MASS, t_l, t_r, zeta, C) / base
        assert ratio == pytest.approx(1.0 - zeta, rel=1e-10)


def test_mass_asymmetry_equal_times():
    for zeta in (0.0, 0.13, 0.5, 1.0):
        assert modified_asymmetry(Basis.MASS, 1.3, 1.3, zeta, C) == pytest.approx(
            1.0 - zeta, rel=1e-12
        )


def test_full_decoherence_kills_mass_asymmetry():
    rng = np.random.default_rng(6)
    for _ in range(20):
        t_l, t_r = (float(x) for x in rng.uniform(0.0, 5.0, 2))
        assert modified_asymmetry(Basis.MASS, t_l, t_r, 1.0, C) == pytest.approx(
            0.0, abs=1e-12
        )


def test_strangeness_asymmetry_matches_amplitude_route():
    # The printed cos/cosh ratio must equal the asymmetry built from the
    # modified probabilities themselves.
    rng = np.random.default_rng(7)
    for _ in range(100):
        t_l, t_r = (float(x) for x in rng.uniform(0.0, 5.0, 2))
        zeta = float(rng.uniform(0.0, 1.0))
        like = modified_like_probability(Basis.STRANGENESS, t_l, t_r, zeta, C)
        unlike = modified_unlike_probability(Basis.STRANGENESS, t_l, t_r, zeta, C)
        expected = (unlike - like) / (unlike + like)
        assert modified_asymmetry(
            Basis.STRANGENESS, t_l, t_r, zeta, C
        ) == pytest.approx(expected, abs=1e-12)


def test_strangeness_asymmetry_nonlinear_in_zeta():
    step = 1e-3
    f = lambda z: modified_asymmetry(Basis.STRANGENESS, 1.0, 3.5, z, C)
    second_difference = (f(0.5 + step) - 2.0 * f(0.5) + f(0.5 - step)) / step**2
    assert abs(second_difference) > 1e-3


def test_zeta_range_enforced():
    with pytest.raises(ValueError):
        modified_like_probability(Basis.MASS, 1.0, 1.0, 1.2, C)
    with pytest.raises(ValueError):
        modified_asymmetry(Basis.MASS, 1.0, 1.0, -0.1, C)
    # allowed with the explicit flag
    value = modified_asymmetry(Basis.MASS, 1.0, 1.0, 1.2, C, allow_extended=True)
    assert value == pytest.approx(-0.2, rel=1e-12)
    with pytest.raises(ValueError):
        modified_like_probability(Basis.MASS, -1.0, 1.0, 0.5, C)


# -- data handling ------------------------------------------------------------------

def test_bundled_points():
    points = bundled_cplear_points()
    assert [p.label for p in points] == ["C(0)", "C(5)"]
    assert points[0].measured == 0.81
    assert points[0].sigma == 0.17
    assert points[0].corrected_theory == 0.93
    assert points[1].measured == 0.48


def test_point_validation():
    with pytest.raises(ValueError):
        AsymmetryPoint("bad", 1.0, 1.0, 0.5, 0.0)
    with pytest.raises(ValueError):
        AsymmetryPoint("bad", 1.0, 1.0, 2.0, 0.1)
    with pytest.raises(ValueError):
        AsymmetryPoint("bad", -1.0, 1.0, 0.5, 0.1)


def test_csv_reader_errors(tmp_path):
    bad_header = tmp_path / "bad_header.csv"
    bad_header.write_text("label,tl,tr,measured,sigma,corrected_theory\n")
    with pytest.raises(ValueError, match="header"):
        read_asymmetry_csv(bad_header)

    empty = tmp_path / "empty.csv"
    empty.write_text("label,t_l,t_r,measured,sigma,corrected_theory\n")
    with pytest.raises(ValueError, match="no data"):
        read_asymmetry_csv(empty)

    bad_row = tmp_path / "bad_row.csv"
    bad_row.write_text(
        "label,t_l,t_r,measured,sigma,corrected_theory\nC(0),1.0,1.0,oops,0.17,\n"
    )
    with pytest.raises(ValueError, match="bad data row"):
        read_asymmetry_csv(bad_row)


def test_csv_reader_optional_theory(tmp_path):
    path = tmp_path / "points.csv"
    path.write_text(
        "# comment\nlabel,t_l,t_r,measured,sigma,corrected_theory\n"
        "C(0),1.0,1.0,0.81,0.17,\n"
    )
    points = read_asymmetry_csv(path)
    assert points[0].corrected_theory is None


# -- fitting ------------------------------------------------------------------------

def _closed_form_fit(points):
    num = sum(p.corrected_theory * p.measured / p.sigma**2 for p in points)
    den = sum(p.corrected_theory**2 / p.sigma**2 for p in points)
    return 1.0 - num / den, 1.0 / math.sqrt(den)


def test_fit_matches_closed_form_oracle():
    points = bundled_cplear_points()
    zeta_expected, sigma_expected = _closed_form_fit(points)
    fit = fit_zeta(points, Basis.MASS, FitMode.CORRECTED_THEORY_SCALING, C)
    assert fit.zeta_hat == pytest.approx(zeta_expected, abs=1e-7)
    assert fit.sigma_minus == pytest.approx(sigma_expected, abs=1e-6)
    assert fit.sigma_plus == pytest.approx(sigma_expected, abs=1e-6)
    assert fit.ndf == 1
    # frozen values of the closed form (weighted least squares by hand)
    assert zeta_expected == pytest.approx(0.1348552, abs=1e-6)
    assert sigma_expected == pytest.approx(0.1390699, abs=1e-6)
    assert fit.chi2_min == pytest.approx(0.0024092, abs=1e-6)


def test_fit_interval_brackets_minimum():
    points = bundled_cplear_points()
    fit = fit_zeta(points, Basis.MASS, FitMode.CORRECTED_THEORY_SCALING, C)

    def chi2(zeta):
        return sum(
            ((p.measured - p.corrected_theory * (1.0 - zeta)) / p.sigma) ** 2
            for p in points
        )

    assert chi2(fit.zeta_hat + fit.sigma_plus) == pytest.approx(
        fit.chi2_min + 1.0, abs=1e-6
    )
    assert chi2(fit.zeta_hat - fit.sigma_minus) == pytest.approx(
        fit.chi2_min + 1.0, abs=1e-6
    )


def test_chi2_profile_is_convex_in_linear_mode():
    points = bundled_cplear_points()

    def chi2(zeta):
        return sum(
            ((p.measured - p.corrected_theory * (1.0 - zeta)) / p.sigma) ** 2
            for p in points
        )

    grid = np.linspace(0.0, 1.5, 31)
    values = [chi2(z) for z in grid]
    second = np.diff(values, 2)
    assert (second > -1e-12).all()


def test_single_perfect_point():
    point = AsymmetryPoint("only", 1.0, 1.0, 0.93, 0.1, corrected_theory=0.93)
    fit = fit_zeta([point], Basis.MASS, FitMode.CORRECTED_THEORY_SCALING, C)
    assert fit.zeta_hat == pytest.approx(0.0, abs=1e-7)
    assert fit.chi2_min == pytest.approx(0.0, abs=1e-12)
    assert fit.ndf == 0


def test_strangeness_raw_fit_is_weakly_constraining():
    points = bundled_cplear_points()
    fit = fit_zeta(points, Basis.STRANGENESS, FitMode.RAW_MODEL, C)
    assert fit.sigma_minus + fit.sigma_plus > 0.5
    assert 0.0 <= fit.zeta_hat <= 1.5


def test_mass_raw_fit_runs():
    points = bundled_cplear_points()
    fit = fit_zeta(points, Basis.MASS, FitMode.RAW_MODEL, C)
    assert 0.0 <= fit.zeta_hat <= 1.5


def test_fit_input_validation():
    points = bundled_cplear_points()
    with pytest.raises(ValueError):
        fit_zeta([], Basis.MASS, FitMode.CORRECTED_THEORY_SCALING, C)
    with pytest.raises(ValueError):
        fit_zeta(points, Basis.STRANGENESS, FitMode.CORRECTED_THEORY_SCALING, C)
    stripped = [
        AsymmetryPoint(p.label, p.t_l, p.t_r, p.measured, p.sigma) for p in points
    ]
    with pytest.raises(ValueError):
        fit_zeta(stripped, Basis.MASS, FitMode.CORRECTED_THEORY_SCALING, C)


def test_fit_result_validation():
    with pytest.raises(ValueError):
        FitResult(0.1, -0.1, 0.1, 0.0, 1, Basis.MASS, FitMode.RAW_MODEL)
    with pytest.raises(ValueError):
        FitResult(0.1, 0.1, 0.1, -1.0, 1, Basis.MASS, FitMode.RAW_MODEL)
