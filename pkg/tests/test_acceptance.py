"""Acceptance criteria 1-9.  Each test prints exactly one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py``; lines appear even without ``-s``.
"""

import subprocess
import sys
import time

import pytest

from isac_subspace import Scenario
from isac_subspace.validation import (check_ao_detmax, check_beampattern_order, check_closed_vs_oracle,
                                      check_correlation, check_correlation_link, check_fim,
                                      check_monotone_tradeoff, check_subspace_invariance)


@pytest.fixture(scope="module")
def scn():
    return Scenario()


@pytest.fixture
def report(capsys):
    def emit(number, title, checks, extra=""):
        ok = all(c.passed for c in checks)
        detail = "; ".join(f"{c.name}={c.value:.3e} (tol {c.tol:.1e})" for c in checks)
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {title}: {detail}{extra}")
        return ok
    return emit


class _Timing:
    """Pseudo-check for wall-clock limits."""

    def __init__(self, name, value, tol):
        self.name, self.value, self.tol, self.passed = name, value, tol, value < tol


def test_criterion_1_closed_form_matches_oracle(scn, report):
    t0 = time.perf_counter()
    checks = check_closed_vs_oracle(scn)
    checks.append(_Timing("runtime_s", time.perf_counter() - t0, 5.0))
    assert report(1, "closed form vs bisection oracle (20 rates x 10 channels)", checks)


def test_criterion_2_ao_equals_detmax(scn, report):
    assert report(2, "AO and DetMax covariances coincide", [check_ao_detmax(scn)])


def test_criterion_3_monotone_tradeoff(scn, report):
    assert report(3, "root-CRB nondecreasing in rate", [check_monotone_tradeoff(scn)])


def test_criterion_4_subspace_invariance(scn, report):
    assert report(4, "projection onto the ISAC subspace", check_subspace_invariance(scn, scn.seed, 50))


def test_criterion_5_fim(scn, report):
    checks = [c for c in check_fim(scn, scn.seed, 20)
              if c.name in ("fim_vs_fd_oracle_rel", "fim_single_vs_multi", "det_closed_vs_direct_rel")]
    assert report(5, "FIM vs finite differences, single vs multi, determinant", checks)


def test_criterion_6_correlation_coefficient(scn, report):
    assert report(6, "G analytic vs quadrature, aligned channel", check_correlation(scn, 5))


def test_criterion_7_beampattern_order(scn, report):
    assert report(7, "comm-opt <= ISAC(mid rate) <= CRB-min at the target", [check_beampattern_order(scn)])


def test_criterion_8_correlation_link(scn, report):
    assert report(8, "larger G gives lower root-CRB", [check_correlation_link(scn, 5)])


def _cli(*args, cwd):
    return subprocess.run([sys.executable, "-m", "isac_subspace", *args], cwd=cwd,
                          capture_output=True, text=True)


def test_criterion_9_determinism_and_speed(tmp_path, report):
    names = ["pareto.csv", "beampattern.csv", "corr_study.csv", "corr_study_region.csv"]
    runs = {"a": ["--threads", "1"], "b": ["--threads", "1"], "c": ["--threads", "4"]}
    t0 = time.perf_counter()
    failed = []
    for tag, extra in runs.items():
        d = tmp_path / tag
        d.mkdir()
        for cmd, out in (("pareto", "pareto.csv"), ("beampattern", "beampattern.csv"),
                         ("corr-study", "corr_study.csv")):
            proc = _cli(cmd, "--out", str(d / out), *extra, cwd=tmp_path)
            if proc.returncode != 0:
                failed.append(f"{tag}:{cmd}:{proc.stderr.strip()}")
    elapsed = time.perf_counter() - t0
    mismatched = sum((tmp_path / "a" / n).read_bytes() != (tmp_path / t / n).read_bytes()
                     for n in names for t in ("b", "c")) if not failed else len(names)
    validate = _cli("validate", cwd=tmp_path)

    checks = [_Timing("regeneration_s_3_runs", elapsed, 60.0),
              _Timing("mismatched_files", mismatched, 0.5),
              _Timing("cli_failures", len(failed), 0.5),
              _Timing("validate_exit_code", validate.returncode, 0.5)]
    assert report(9, "byte-identical CSVs across runs and thread counts; validate passes", checks), \
        failed or validate.stdout
