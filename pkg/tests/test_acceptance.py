"""Validation gate: every numbered criterion at its pinned tolerance.

Each test prints its own pass/fail line (run pytest -s to see them all;
the `mesorate validate` command prints the same report).
"""

import time

import pytest

from mesorate import acceptance, cli_main


@pytest.fixture(scope="module")
def results():
    run = acceptance.run_all()
    return {r.number: r for r in run}


def _check(results, number):
    r = results[number]
    print(f"criterion {r.number}: {'PASS' if r.passed else 'FAIL'}  {r.title}  [{r.detail}]")
    assert r.passed, f"criterion {r.number} failed: {r.detail}"


def test_criterion_1_bare_current_oracle(results):
    _check(results, 1)


def test_criterion_2_dephased_current_oracle(results):
    _check(results, 2)


def test_criterion_3_single_dot_negative_result_limit(results):
    _check(results, 3)


def test_criterion_4_coupled_dot_negative_result_limit(results):
    _check(results, 4)


def test_criterion_5_suppression_factor(results):
    _check(results, 5)


def test_criterion_6_fermi_level_step(results):
    _check(results, 6)


def test_criterion_7_golden_matrices(results):
    _check(results, 7)


def test_criterion_8_conservation_and_positivity(results):
    _check(results, 8)


def test_criterion_9_integrator_order(results):
    _check(results, 9)


def test_criterion_10_validate_cli_runs_clean_and_fast(capsys):
    start = time.monotonic()
    code = cli_main(["validate"])
    elapsed = time.monotonic() - start
    out = capsys.readouterr().out
    print(f"criterion 10: {'PASS' if code == 0 and elapsed < 60 else 'FAIL'}  "
          f"validate exits {code} in {elapsed:.2f}s")
    assert elapsed < 60.0, f"validate took {elapsed:.1f}s"
    assert "criterion 9" in out
    assert code == 0, "validate must exit 0 with every criterion passing"
