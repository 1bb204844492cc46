"""Minimax optimization, tail certification, and threshold conversion."""

import math

import pytest

from nobind.bounds import Nelson, Optical, Piezo, c_constants
from nobind.errors import TailViolation, UncertifiedTail
from nobind.optimize import (
    build_full_schedule,
    certify,
    evaluate_point,
    kinetic_rescale,
    lambda_curve,
    minimize_truncated,
    no_binding_constant,
)

PAPER_POINT = (7.27, 3.44, 3.44, 0.702)


@pytest.fixture(scope="module")
def optical_optimum():
    opt = minimize_truncated(Optical(), starts=32, seed=0)
    return certify(Optical(), opt, n_check=10_000)


class TestEvaluatePoint:
    def test_paper_point_below_published_bound(self):
        rep = evaluate_point(Optical(), PAPER_POINT)
        assert rep.value < 25.9
        assert dict(rep.per_region)[0] == pytest.approx(25.886242865048125,
                                                        rel=1e-14)
        assert dict(rep.per_region)[1] == pytest.approx(25.86122429816112,
                                                        rel=1e-14)

    def test_achieving_index(self):
        rep = evaluate_point(Optical(), PAPER_POINT)
        regions = dict(rep.per_region)
        assert rep.value == regions[rep.achieving_index]


class TestMinimizeTruncated:
    def test_optical_beats_published_bound(self, optical_optimum):
        assert optical_optimum.value <= 25.9

    def test_optimum_improves_on_paper_point(self, optical_optimum):
        paper = evaluate_point(Optical(), PAPER_POINT)
        assert optical_optimum.value <= paper.value

    def test_deterministic_for_fixed_seed(self):
        a = minimize_truncated(Optical(), starts=8, seed=7)
        b = minimize_truncated(Optical(), starts=8, seed=7)
        assert a.value == b.value
        assert a.point == b.point

    def test_threads_do_not_change_result(self):
        serial = minimize_truncated(Optical(), starts=8, seed=3, threads=1)
        parallel = minimize_truncated(Optical(), starts=8, seed=3, threads=4)
        assert serial.value == parallel.value
        assert serial.point == parallel.point

    def test_piezo_dominates_optical(self):
        """8 C2(1) > 2 and the piezo shell terms dominate the optical ones."""
        piezo = minimize_truncated(Piezo(cutoff=1.0), starts=16, seed=0)
        optical = minimize_truncated(Optical(), starts=16, seed=0)
        assert math.isfinite(piezo.value)
        assert piezo.value >= optical.value
        assert 8 * c_constants(1.0).c2 > 2

    def test_bad_arguments_rejected(self):
        with pytest.raises(ValueError):
            minimize_truncated(Optical(), starts=0)
        with pytest.raises(ValueError):
            minimize_truncated(Optical(), tol=0.0)


class TestTailCertificate:
    def test_paper_point_monotone_to_ten_thousand(self):
        rep = evaluate_point(Optical(), PAPER_POINT)
        _, cert = build_full_schedule(rep, n_check=10_000)
        assert cert.monotone
        assert cert.first_violation is None
        assert cert.n_checked == 10_000
        # the F_n sequence stays bounded; its value at N_check is the
        # empirical limit estimate
        assert 0 < cert.last_value < rep.value

    def test_adversarial_schedule_detected(self):
        """A tiny tail width after a huge one drives F_2 above F_1."""
        rep = evaluate_point(Optical(), (1.0, 10.0, 0.01, 0.5))
        with pytest.raises(TailViolation) as exc_info:
            build_full_schedule(rep, n_check=100)
        exc = exc_info.value
        assert exc.index >= 1
        assert exc.certificate.monotone is False
        assert exc.certificate.first_violation == exc.index

    def test_certify_extends_regions(self, optical_optimum):
        assert optical_optimum.tail_certified_up_to == 10_000
        values = dict(optical_optimum.per_region)
        assert len(values) >= 16
        # certified reports decrease across the recorded shell regions
        shell = [values[n] for n in sorted(values) if n >= 1]
        assert all(b <= a for a, b in zip(shell, shell[1:]))

    def test_small_n_check_rejected(self):
        rep = evaluate_point(Optical(), PAPER_POINT)
        with pytest.raises(ValueError):
            build_full_schedule(rep, n_check=5)


class TestThreshold:
    def test_uncertified_report_refused(self):
        rep = evaluate_point(Optical(), PAPER_POINT)
        with pytest.raises(UncertifiedTail):
            no_binding_constant(Optical(), rep)

    def test_optical_threshold_is_the_multiplier(self, optical_optimum):
        assert no_binding_constant(Optical(), optical_optimum) == (
            optical_optimum.value
        )
        assert no_binding_constant(Optical(), optical_optimum) < 25.9

    def test_nelson_threshold_scales_with_alpha(self):
        model = Nelson(d1=8 * c_constants(1.0).c2, d2=0.0, alpha=0.5)
        opt = certify(model, minimize_truncated(model, starts=16, seed=0), 1000)
        assert no_binding_constant(model, opt) == opt.value * 0.5

    def test_kinetic_rescale(self):
        assert kinetic_rescale(25.9) == pytest.approx(25.9 * math.sqrt(2),
                                                      rel=1e-15)
        assert kinetic_rescale(25.9) < 36.7
        assert kinetic_rescale(0.0) == 0.0
        with pytest.raises(ValueError):
            kinetic_rescale(-1.0)

    def test_conversion_chain(self, optical_optimum):
        converted = kinetic_rescale(optical_optimum.value)
        assert converted < 36.7
        assert converted == optical_optimum.converted_value
        reduction = (52.1 - converted) / 52.1
        assert reduction > 0.296


class TestLambdaCurve:
    def test_empty_grid(self):
        assert lambda_curve([]) == []

    def test_two_point_monotone(self):
        rows = lambda_curve([1.0, 2.0], starts=8, n_check=1000)
        assert rows[0][1] <= rows[1][1]
        assert all(math.isfinite(c) for _, c in rows)

    def test_nonpositive_cutoff_rejected(self):
        with pytest.raises(ValueError):
            lambda_curve([1.0, -2.0], starts=4, n_check=1000)
