"""Quotient-sum minimizer: objective conventions, stationarity matrix against
finite differences, SCF convergence on the reference problem, degenerate
candidates, and agreement with the sampled oracle."""

import math

import numpy as np
import pytest

from rosen_bkerr import linalg, srq2
from support import (
    SOLVE_VALUE,
    X_STAR_1,
    X_STAR_2,
    example_problem,
)


def _identity_problem(params=(1.0, 0.0, 0.0, 1.0)):
    eye = np.eye(3)
    return srq2.Srq2Problem(eye, eye, eye, *params)


def test_objective_identity_matrices():
    problem = _identity_problem()
    x = linalg.normalize(np.array([1.0, 2.0, -1.0]))
    assert srq2.objective(problem, x) == pytest.approx(2.0, rel=1e-14)


def test_objective_scale_invariant():
    problem = example_problem()
    rng = np.random.default_rng(0)
    x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    f1 = srq2.objective(problem, x)
    f2 = srq2.objective(problem, 5.3 * x)
    assert f1 == pytest.approx(f2, rel=1e-13)


def test_objective_zero_over_zero_contributes_nothing():
    # first denominator vanishes at e2 together with its numerator
    problem = srq2.Srq2Problem(
        a1=np.diag([1.0, 0.0]),
        a2=np.eye(2),
        a3=np.diag([1.0, 0.0]),
        alpha1=0.0,
        beta1=1.0,
        alpha2=1.0,
        beta2=0.0,
    )
    assert srq2.objective(problem, [0.0, 1.0]) == pytest.approx(1.0)


def test_objective_positive_over_zero_is_infinite():
    problem = srq2.Srq2Problem(
        a1=np.diag([0.0, 1.0]),
        a2=np.eye(2),
        a3=np.diag([1.0, 0.0]),
        alpha1=0.0,
        beta1=1.0,
        alpha2=1.0,
        beta2=0.0,
    )
    assert srq2.objective(problem, [0.0, 1.0]) == math.inf
    with pytest.raises(srq2.NondifferentiablePointError):
        srq2.nepv_matrix(problem, [0.0, 1.0])


def test_objective_at_reference_minimizer():
    # the printed four-decimal minimizer reproduces the converged value
    problem = example_problem()
    assert srq2.objective(problem, X_STAR_1) == pytest.approx(SOLVE_VALUE, abs=1e-4)


def test_problem_validation():
    eye = np.eye(2)
    with pytest.raises(ValueError):
        srq2.Srq2Problem(-eye, eye, eye, 1.0, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        # negative beta makes a denominator matrix indefinite
        srq2.Srq2Problem(eye, eye, eye, 0.0, -1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        srq2.Srq2Problem(eye, eye, np.eye(3), 1.0, 0.0, 1.0, 0.0)


def test_nepv_matrix_matches_tangent_finite_differences():
    # 2 Re(d* H(x) x) approximates the tangent directional derivative of f
    rng = np.random.default_rng(7)
    problem = example_problem()
    step = 1e-5
    checked = 0
    while checked < 30:
        x = linalg.normalize(
            rng.standard_normal(3) + 1j * rng.standard_normal(3)
        )
        _, _, _, _, d1, d2 = srq2._forms(problem, x)
        if min(d1, d2) < 0.2:
            continue
        d = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        d = d - x * np.vdot(x, d)
        d = d / np.linalg.norm(d)
        h = srq2.nepv_matrix(problem, x)
        analytic = 2.0 * float(np.real(d.conj() @ (h @ x)))
        fplus = srq2.objective(problem, linalg.normalize(x + step * d))
        fminus = srq2.objective(problem, linalg.normalize(x - step * d))
        numeric = (fplus - fminus) / (2.0 * step)
        assert analytic == pytest.approx(numeric, abs=1e-6)
        checked += 1


def test_scf_constant_matrix_converges_immediately():
    # beta1 = beta2 = 0 makes H(x) constant, so one sweep lands exactly
    rng = np.random.default_rng(1)
    a1 = np.diag([3.0, 1.0, 2.0])
    a2 = np.diag([0.5, 0.25, 4.0])
    problem = srq2.Srq2Problem(a1, a2, np.eye(3), 2.0, 0.0, 1.0, 0.0)
    x0 = rng.standard_normal(3)
    sol = srq2.scf_solve(problem, x0)
    expect = float(np.min(np.diag(a1) / 2.0 + np.diag(a2)))
    assert sol.converged
    assert sol.iterations <= 2
    assert sol.value == pytest.approx(expect, abs=1e-12)


def test_scf_reference_problem_from_random_starts():
    problem = example_problem()
    rng = np.random.default_rng(42)
    for _ in range(5):
        x0 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        sol = srq2.scf_solve(problem, x0)
        assert sol.converged, f"stalled at residual {sol.rel_residual:.2e}"
        assert sol.rel_residual <= 1e-10
        assert sol.value == pytest.approx(SOLVE_VALUE, abs=1e-8)


def test_reference_spurious_point_is_distinguished():
    # the second printed stationary point pairs with the SECOND smallest
    # eigenvalue of H(x), so the smallest-eigenvalue residual stays large
    problem = example_problem()
    x = linalg.normalize(X_STAR_2.astype(complex))
    h = srq2.nepv_matrix(problem, x)
    w = np.linalg.eigvalsh(h)
    s = float(np.real(np.vdot(x, h @ x)))
    assert abs(s - w[1]) < 1e-6
    info = srq2.nepv_residuals(problem, x)
    assert info.nepv_residual > 0.2
    assert info.smallest_eig_gap > 0.2

    sol = srq2.solve(problem, restarts=20, seed=3)
    assert sol.value == pytest.approx(SOLVE_VALUE, abs=1e-9)
    assert abs(np.vdot(sol.x, x)) < 0.5


def test_solution_is_deterministic():
    problem = example_problem()
    a = srq2.solve(problem, restarts=4, seed=9)
    b = srq2.solve(problem, restarts=4, seed=9)
    assert a.value == b.value
    assert a.x.tobytes() == b.x.tobytes()
    assert a.shifts_used == b.shifts_used


def test_nondiff_candidates_closed_form():
    # A1 + (alpha1 I + beta1 A3) = diag(0, 2, 3) has null space e1, where
    # the first quotient is 0/0 and only the second survives with value 1
    problem = srq2.Srq2Problem(
        a1=np.diag([0.0, 1.0, 2.0]),
        a2=np.eye(3),
        a3=np.diag([0.0, 1.0, 1.0]),
        alpha1=0.0,
        beta1=1.0,
        alpha2=1.0,
        beta2=0.0,
    )
    cands = srq2.nondiff_candidates(problem)
    assert len(cands) == 1
    cand = cands[0]
    assert cand.which == 1
    assert cand.value == pytest.approx(1.0, abs=1e-12)
    assert abs(cand.x[0]) == pytest.approx(1.0, abs=1e-10)


def test_nondiff_candidates_empty_when_definite():
    assert srq2.nondiff_candidates(_identity_problem((1.0, 0.0, 1.0, 0.0))) == []


def test_common_null_violation_detected():
    # both denominators vanish on e2, so the degenerate search must refuse
    problem = srq2.Srq2Problem(
        a1=np.eye(2),
        a2=np.eye(2),
        a3=np.diag([1.0, 0.0]),
        alpha1=0.0,
        beta1=1.0,
        alpha2=0.0,
        beta2=1.0,
    )
    assert not problem.common_null_ok
    with pytest.raises(srq2.CommonNullViolationError):
        srq2.nondiff_candidates(problem)
    # solve still works through the SCF path alone
    sol = srq2.solve(problem, restarts=3, seed=0)
    assert sol.value == pytest.approx(2.0, abs=1e-8)


def test_solve_zero_second_numerator_reduces_to_pencil():
    rng = np.random.default_rng(3)
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    a1 = g @ g.conj().T
    a3 = np.diag([1.0, 1.0, 0.0])
    problem = srq2.Srq2Problem(a1, np.zeros((3, 3)), a3, 1.0, 1.0, 1.0, 0.0)
    expect, _ = linalg.definite_pencil_smallest(a1, np.eye(3) + a3)
    sol = srq2.solve(problem, restarts=3, seed=0)
    assert sol.value == pytest.approx(expect, abs=1e-9)


def test_oracle_constant_objective():
    problem = _identity_problem((1.0, 0.0, 1.0, 0.0))
    assert srq2.brute_force_oracle(problem, 50, seed=1) == pytest.approx(2.0, rel=1e-12)


def test_oracle_single_quotient_matches_pencil():
    rng = np.random.default_rng(5)
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    a1 = g @ g.conj().T
    problem = srq2.Srq2Problem(a1, np.zeros((3, 3)), np.eye(3), 1.0, 1.0, 1.0, 0.0)
    expect, _ = linalg.definite_pencil_smallest(a1, 2.0 * np.eye(3))
    assert srq2.brute_force_oracle(problem, 2000, seed=2) == pytest.approx(
        expect, abs=1e-8
    )


def test_oracle_reference_problem():
    value = srq2.brute_force_oracle(example_problem(), 4000, seed=0)
    assert value == pytest.approx(SOLVE_VALUE, abs=1e-3)
    assert value >= SOLVE_VALUE - 1e-8


def test_oracle_deterministic():
    problem = example_problem()
    assert srq2.brute_force_oracle(problem, 500, seed=7) == srq2.brute_force_oracle(
        problem, 500, seed=7
    )


def test_solve_tracks_oracle_on_random_instances():
    rng = np.random.default_rng(2024)
    close = 0
    total = 0
    for k in range(21):
        template = srq2.PATTERN_TEMPLATES[k % len(srq2.PATTERN_TEMPLATES)]
        problem = srq2.random_problem(3, rng, template)
        sol = srq2.solve(problem, restarts=4, seed=k)
        oracle = srq2.brute_force_oracle(problem, 2000, seed=k)
        assert sol.value <= oracle + 1e-8, template
        if math.isfinite(oracle):
            total += 1
            if sol.value >= oracle - 1e-4:
                close += 1
    assert total and close >= total - 1


def test_solve_beats_degenerate_candidates_on_rank_deficient():
    rng = np.random.default_rng(77)
    seen = 0
    for k in range(12):
        template = srq2.PATTERN_TEMPLATES[k % len(srq2.PATTERN_TEMPLATES)]
        problem = srq2.random_problem(3, rng, template, rank_deficient=True)
        if not problem.common_null_ok:
            continue
        cands = srq2.nondiff_candidates(problem)
        if not cands:
            continue
        seen += 1
        sol = srq2.solve(problem, restarts=3, seed=k)
        for cand in cands:
            assert sol.value <= cand.value + 1e-10
    assert seen > 0


def test_solution_reports_residuals():
    sol = srq2.solve(example_problem(), restarts=2, seed=0)
    assert sol.rel_residual <= 1e-10
    assert sol.nepv_residual <= 1e-8
    assert np.linalg.norm(sol.x) == pytest.approx(1.0, abs=1e-12)
    assert sol.source in (srq2.SOURCE_SCF, srq2.SOURCE_NONDIFF_1, srq2.SOURCE_NONDIFF_2)
