import numpy as np
import pytest
from scipy.integrate import quad

from aggblob.errors import DomainError
from aggblob.mollifier import Mollifier, epsilon_from_spacing


def test_eval_matches_formula():
    moll = Mollifier(0.5)
    # (4 pi 0.25)^(-1/2) exp(-0.25)
    assert moll.eval(np.array([0.5])) == pytest.approx(0.4393912894677224, rel=1e-14)
    assert moll.eval(np.array([0.0])) == pytest.approx((4 * np.pi * 0.25) ** -0.5, rel=1e-14)


def test_unit_mass():
    for eps in (0.05, 0.3, 1.0):
        moll = Mollifier(eps)
        val, _ = quad(lambda x: moll.eval(np.array([x])), -40 * eps, 40 * eps, limit=200)
        assert val == pytest.approx(1.0, abs=1e-12)


def test_grad_matches_finite_difference():
    moll = Mollifier(0.08)
    rng = np.random.default_rng(3)
    x = rng.uniform(-0.4, 0.4, size=(20, 1))
    h = 1e-6
    fd = (moll.eval(x + h) - moll.eval(x - h)) / (2 * h)
    assert np.allclose(moll.grad(x)[:, 0], fd, rtol=1e-7, atol=1e-9)


def test_grad_oracle_value():
    # grad phi_0.5(0.5) = -0.5/(2*0.25) * phi(0.5) = -phi(0.5)
    moll = Mollifier(0.5)
    assert moll.grad(np.array([0.5]))[0] == pytest.approx(-0.4393912894677224, rel=1e-14)


def test_grad_from_eval_consistent():
    moll = Mollifier(0.11)
    x = np.linspace(-1, 1, 33).reshape(-1, 1)
    vals = moll.eval(x)
    assert np.array_equal(moll.grad(x), moll.grad_from_eval(x, vals))


def test_curve_from_eval_matches_finite_difference():
    moll = Mollifier(0.09)
    x = np.linspace(-0.5, 0.5, 41)
    vals = moll.eval(x[:, None])
    h = 1e-5
    fd = (moll.eval((x + h)[:, None]) - 2 * vals + moll.eval((x - h)[:, None])) / h**2
    assert np.allclose(moll.curve_from_eval(x, vals), fd, rtol=1e-4, atol=1e-6)


def test_multidim_normalization():
    moll = Mollifier(0.2, d=2)
    # separable: the 2d value is the product of two 1d values
    one = Mollifier(0.2, d=1)
    pt = np.array([0.1, -0.3])
    expect = one.eval(np.array([0.1])) * one.eval(np.array([-0.3]))
    assert moll.eval(pt) == pytest.approx(float(expect), rel=1e-13)


def test_epsilon_from_spacing():
    assert epsilon_from_spacing(0.0044, 0.9) == pytest.approx(0.0075702009655820544, rel=1e-14)
    assert epsilon_from_spacing(0.01, 1.0) == 0.01


def test_epsilon_from_spacing_rejects_bad_args():
    with pytest.raises(DomainError):
        epsilon_from_spacing(-0.1, 0.9)
    with pytest.raises(DomainError):
        epsilon_from_spacing(0.1, 0.0)
    with pytest.raises(DomainError):
        epsilon_from_spacing(0.1, 1.5)
    with pytest.warns(UserWarning):
        epsilon_from_spacing(2.0, 0.9)


def test_invalid_mollifier():
    with pytest.raises(DomainError):
        Mollifier(0.0)
    with pytest.raises(DomainError):
        Mollifier(0.1, d=0)
