"""Retarded kernel closed forms, their quadrature oracles, and the scalar
integrals entering the bounds."""

import math

import numpy as np
import pytest

from nobind.bounds import Nelson, Optical, Piezo, c_constants
from nobind.kernels import (
    KernelQuery,
    brace_factor,
    jensen_rate,
    piezo_kernel,
    piezo_kernel_grid,
    renorm_integral,
    separation_bound_check,
)

PI = math.pi


class TestKernelQuery:
    def test_validation(self):
        with pytest.raises(ValueError):
            KernelQuery(d=0.0, tau=1.0, cutoff=1.0)
        with pytest.raises(ValueError):
            KernelQuery(d=1.0, tau=-1.0, cutoff=1.0)
        with pytest.raises(ValueError):
            KernelQuery(d=1.0, tau=1.0, cutoff=0.0)


class TestClosedForm:
    def test_zero_lag(self):
        for d, lam in ((0.5, 1.0), (2.0, 3.0), (10.0, 0.5)):
            v = piezo_kernel(KernelQuery(d=d, tau=0.0, cutoff=lam))
            assert v == pytest.approx(4 * PI * (1 - math.cos(lam * d)) / d ** 2,
                                      rel=1e-14)

    def test_small_distance_limit(self):
        """(tau/d) sin(cutoff d) -> tau cutoff, giving the finite d -> 0 limit."""
        tau, lam = 1.5, 2.0
        expected = 4 * PI * (1 - math.exp(-lam * tau) * (1 + lam * tau)) / tau ** 2
        assert piezo_kernel_grid(1e-9, tau, lam) == pytest.approx(expected,
                                                                  rel=1e-9)
        assert piezo_kernel(KernelQuery(d=1e-9, tau=tau, cutoff=lam)) == (
            pytest.approx(expected, rel=1e-9)
        )

    def test_coincidence_limit(self):
        lam = 2.0
        assert piezo_kernel_grid(0.0, 0.0, lam) == 2 * PI * lam ** 2

    def test_grid_matches_scalar(self):
        d = np.array([0.1, 1.0, 10.0])
        tau = np.array([0.0, 0.5, 5.0])
        grid = piezo_kernel_grid(d, tau, 2.0)
        for i in range(3):
            scalar = piezo_kernel(KernelQuery(d=float(d[i]), tau=float(tau[i]),
                                              cutoff=2.0))
            assert grid[i] == pytest.approx(scalar, rel=1e-12)


class TestOracleIdentity:
    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 10.0])
    def test_closed_form_equals_quadrature(self, lam):
        for d in np.logspace(-3, 3, 7):
            for tau in (0.0, 0.01, 0.1, 1.0, 10.0, 100.0):
                q = KernelQuery(d=float(d), tau=tau, cutoff=lam)
                closed = piezo_kernel(q)
                oracle = piezo_kernel(q, use_quadrature_oracle=True)
                scale = max(abs(closed), abs(oracle),
                            4 * PI / (d * d + tau * tau))
                assert abs(closed - oracle) <= 1e-8 * scale


class TestBraceBound:
    def test_hundred_thousand_random_queries(self):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(42)))
        n = 100_000
        d = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), n))
        tau = rng.uniform(0.0, 100.0, n)
        for l in (0.1, 0.5, 1.0, 2.0, 10.0, 50.0):
            vals = brace_factor(d, tau, l)
            assert np.all(vals >= -1e-12)
            assert np.all(vals <= 2 + 1e-12)

    def test_kernel_bounded_by_brace_envelope(self):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(43)))
        d = np.exp(rng.uniform(math.log(1e-2), math.log(1e2), 10_000))
        tau = rng.uniform(0.0, 10.0, 10_000)
        lam = 2.0
        k = piezo_kernel_grid(d, tau, lam)
        envelope = 8 * PI / (d * d + tau * tau)
        assert np.all(k <= envelope * (1 + 1e-12))
        assert np.all(k <= 2 * PI * lam ** 2 * (1 + 1e-12))
        assert np.all(k >= -1e-12)


class TestJensenRate:
    def test_optical_is_alpha(self):
        assert jensen_rate(Optical(), 1.0) == 1.0
        assert jensen_rate(Optical(), 2.5) == 2.5

    def test_piezo_closed_form(self):
        assert jensen_rate(Piezo(cutoff=2.0), 1.0) == pytest.approx(
            8 * PI * math.log(2.0), abs=1e-10
        )
        assert jensen_rate(Piezo(cutoff=2.0), 0.5) == pytest.approx(
            4 * PI * math.log(2.0), abs=1e-10
        )

    def test_nelson_renormalized_rate_is_zero(self):
        assert jensen_rate(Nelson(d1=1.0, d2=0.0, alpha=1.0), 1.0) == 0.0

    def test_alpha_zero(self):
        assert jensen_rate(Optical(), 0.0) == 0.0
        assert jensen_rate(Piezo(cutoff=1.0), 0.0) == 0.0

    def test_negative_alpha_rejected(self):
        with pytest.raises(ValueError):
            jensen_rate(Optical(), -1.0)


class TestSeparationBound:
    def test_zero_horizon(self):
        r = separation_bound_check(1.0, 0.0)
        assert r["exact"] == 0.0
        assert r["bound"] == 0.0

    def test_exact_below_bound_everywhere(self):
        for D in (0.1, 1.0, 10.0):
            for T in (0.01, 1.0, 100.0):
                r = separation_bound_check(D, T)
                assert r["exact"] <= r["bound"]
                assert r["bound"] == pytest.approx(8 * PI ** 2 * T / D,
                                                   rel=1e-15)

    def test_saturation_at_large_horizon(self):
        r = separation_bound_check(1.0, 1000.0)
        ratio = r["exact"] / r["bound"]
        assert 0.99 < ratio <= 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            separation_bound_check(0.0, 1.0)
        with pytest.raises(ValueError):
            separation_bound_check(1.0, -1.0)


class TestRenormIntegral:
    def test_zero_cutoff(self):
        assert renorm_integral(0.0) == 0.0

    def test_closed_form(self):
        assert renorm_integral(2.0) == pytest.approx(8 * PI * math.log(2.0),
                                                     abs=1e-10)

    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 10.0])
    def test_agrees_with_c1(self, lam):
        assert renorm_integral(lam) == pytest.approx(c_constants(lam).c1,
                                                     abs=1e-10)

    def test_negative_cutoff_rejected(self):
        with pytest.raises(ValueError):
            renorm_integral(-1.0)
