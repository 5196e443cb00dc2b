"""Acceptance suite: each test runs one criterion at its stated tolerance
and prints a PASS/FAIL line.  The convergence and efficiency criteria run
for several minutes on the finest levels."""

import pytest

from swgraph import verification as V


def _check(result):
    print(result.line())
    assert result.passed, result.line()


def test_01_well_balancing_at_rest():
    _check(V.check_rest())


def test_02_steady_incline_with_friction():
    _check(V.check_incline())


def test_03_vortex_convergence():
    _check(V.check_vortex())


def test_04_paraboloid_convergence():
    _check(V.check_paraboloid())


def test_05_invariant_domain_preservation():
    _check(V.check_idp())


def test_06_wave_speed_dominance():
    _check(V.check_wavespeed())


def test_07_conservation():
    _check(V.check_conservation())


def test_08_entropy_inequality():
    _check(V.check_entropy())


def test_09_erk_efficiency():
    _check(V.check_efficiency())


def test_10_rain_volume_budget():
    _check(V.check_rain())
