import math

import pytest

import levyk


def cauchy():
    return levyk.LevyModel(1, levyk.PureStable(1.0))


def relativistic():
    return levyk.LevyModel(1, levyk.RelativisticStable(1.0, 1.0))


def test_version():
    assert levyk.__version__ == "0.1.0"


def test_exponents():
    m = relativistic()
    assert m.kappa == pytest.approx(1.0)
    assert levyk.psi(m, 1.0) == pytest.approx(math.sqrt(2.0) - 1.0, rel=1e-12)
    assert levyk.omega_star(m) == pytest.approx(1.0, rel=1e-12)
    assert levyk.gamma_alpha(m, 0.5) == pytest.approx(math.sqrt(0.75), rel=1e-10)
    assert math.isinf(levyk.omega(m, 1.5))


def test_heat_kernel_matches_cauchy():
    out = levyk.heat_kernel(cauchy(), 1.0, [0.0, 2.0])
    assert out["values"][1] == pytest.approx(1.0 / (5.0 * math.pi), rel=1e-9)
    assert out["flags"] == [0, 0]


def test_resolvent_routes_agree():
    m = cauchy()
    f = levyk.resolvent(m, 1.0, [5.0], "freq")["values"][0]
    t = levyk.resolvent(m, 1.0, [5.0], "time")["values"][0]
    assert f == pytest.approx(t, rel=1e-4)
    with pytest.raises(levyk.DomainError):
        levyk.resolvent(m, 1.0, [5.0], "spectral")


def test_subexponential_rejection():
    with pytest.raises(levyk.UnsupportedProfile):
        levyk.gamma_alpha(cauchy(), 1.0)
    with pytest.raises(levyk.Error):
        levyk.LevyModel(1, levyk.PureStable(2.5))


def test_classify_and_kf():
    probes = [10 ** (k / 10) for k in range(41)]
    c = levyk.classify_profile(levyk.TemperedStable(1.0, 1.0, 1.0, 2.0), probes)
    assert c["class"] == "exponential"
    assert c["kappa"] == pytest.approx(1.0, abs=1e-3)
    assert levyk.kf(cauchy(), 1.0)["kf"] < 4.0


def test_bound_state():
    r = levyk.find_bound_state(relativistic(), levyk.SquareWell(3.0, 1.0), h=0.04)
    assert r is not None
    assert r["lambda"] < -1.0
    assert r["predicted_rate"] == pytest.approx(1.0)
    assert levyk.find_bound_state(relativistic(), levyk.SquareWell(0.0, 1.0)) is None
