import math

import numpy as np
import pytest

from wbst import fixedpoint as fp


@pytest.fixture(scope="module")
def system():
    return fp.solve_second_moments(1e-10)


def test_coefficient_shapes_and_halfpoint():
    a1 = fp.coeff_a1(0.5)
    a2 = fp.coeff_a2(0.5)
    assert fp.spectral_radius(a1) == pytest.approx(0.5, abs=1e-12)
    assert fp.spectral_radius(a2) == pytest.approx(0.5, abs=1e-12)
    c = fp.coeff_c(0.5)
    # last toll coordinate at u = 1/2: 2 (1/2) ln(1/2) * 2 + 1 = 1 - 2 ln 2
    assert c[3] == pytest.approx(1.0 - 2.0 * math.log(2.0), abs=1e-14)


def test_coefficients_domain_error():
    with pytest.raises(ValueError):
        fp.coeff_c(0.0)
    with pytest.raises(ValueError):
        fp.coeff_c(1.0)


def test_mean_toll_vanishes():
    np.testing.assert_allclose(fp.mean_toll(1e-12), 0.0, atol=1e-10)


def test_contraction_check():
    rep = fp.contraction_check(501)
    assert rep.analytic_sum == pytest.approx(2.0 / 3.0)
    assert abs(rep.numeric_sum - 2.0 / 3.0) <= 1e-10
    assert rep.max_radius_error <= 1e-8
    assert rep.contracts
    assert rep.gram_sum < 1.0  # operator-norm form also contracts


def test_spectral_radius_limits():
    assert fp.spectral_radius(fp.coeff_a1(1e-12)) == pytest.approx(0.0, abs=1e-11)


def test_solver_guard():
    with pytest.raises(ValueError):
        fp.solve_second_moments(1e-6)


def test_constants_match_targets(system):
    assert system.max_target_error() <= 1e-6
    assert system.residual <= 10 * system.quad_tol
    assert system.kron_spectral_radius == pytest.approx(2.0 / 3.0, abs=1e-9)
    assert system.is_psd()
    assert np.all(np.diag(system.matrix) > 0)


def test_specific_constants(system):
    pi2 = math.pi**2
    assert system.entry(3, 3) == pytest.approx((21 - 2 * pi2) / 3, abs=1e-9)
    assert system.entry(2, 2) == pytest.approx((65 - 6 * pi2) / 36, abs=1e-9)
    assert system.entry(1, 1) == pytest.approx((20 - 2 * pi2) / 3, abs=1e-9)
    assert system.entry(0, 0) == pytest.approx((2413 - 240 * pi2) / 1440, abs=1e-9)
    assert system.entry(2, 3) == pytest.approx((21 - 2 * pi2) / 6, abs=1e-9)
    assert system.entry(0, 2) == pytest.approx((481 - 48 * pi2) / 288, abs=1e-9)


def test_covariance_report_rows(system):
    rows = fp.covariance_report(system)
    assert len(rows) == 10
    assert all(ok for *_, ok in rows)


def test_write_constants(tmp_path, system):
    csv_path = tmp_path / "constants.csv"
    json_path = tmp_path / "constants.json"
    fp.write_constants(system, csv_path, json_path)
    text = csv_path.read_text()
    assert "var(p)" in text
    import json

    payload = json.loads(json_path.read_text())
    assert payload["kron_spectral_radius"] == pytest.approx(2.0 / 3.0)
    assert len(payload["constants"]) == 10
