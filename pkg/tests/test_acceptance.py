"""Acceptance battery: every criterion at its stated scale and tolerance.

Each test runs one verification suite from fragrect.verify at full
scale, prints a pass/fail line per check, and asserts the suite passed.
Criteria and their suites:

  1 kappa            straight-line growth rate vs quadrature (1e-8)
  2 forms            two representations of the growth functional (1e-8)
  3 named-values     K on the half/unit/slope-10 diagonals
  4 mto              population mean, direct vs weighted single particle
  5 moments          discrete-walk moment bounds at j=20
  6 coupling         ordering of the coupled triple (zero violations)
  7 tube             compound-Poisson tube probability vs analytic bounds
  8 growth           finite-horizon growth exponent in [0.5, 1.3]
  9 extinction       bottleneck ray has no followers
  10 cover           floor-quantization guarantees (zero failures)
  11 metrics         corridor-metric axioms and grid-scan oracle
  12 sandwich        deterministic rate sandwich (exact arithmetic)
  13 region-gamma    positivity region boundary and transition paths
  14 optimizer-oracle  ascent dominates the exhaustive lattice

Run with `pytest tests/test_acceptance.py -v -s` to see the per-check
lines as they complete.
"""

import pytest

from fragrect.verify import run_suite

CRITERIA = [
    (1, "kappa"),
    (2, "forms"),
    (3, "named-values"),
    (4, "mto"),
    (5, "moments"),
    (6, "coupling"),
    (7, "tube"),
    (8, "growth"),
    (9, "extinction"),
    (10, "cover"),
    (11, "metrics"),
    (12, "sandwich"),
    (13, "region-gamma"),
    (14, "optimizer-oracle"),
]


@pytest.mark.parametrize("number,suite", CRITERIA, ids=[f"{n:02d}-{s}" for n, s in CRITERIA])
def test_acceptance_criterion(number, suite):
    result = run_suite(suite)
    for line in result.lines():
        print(f"criterion {number}: {line}")
    assert result.passed, f"criterion {number} ({suite}) failed:\n" + "\n".join(result.lines())
