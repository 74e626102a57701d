import numpy as np
import pytest

from cutdg.mesh import build_cut_cell_mesh
from cutdg.dg_space import build_space
from cutdg.operators import operator_pair
from cutdg.sbp_verify import (
    SBPReport,
    check_energy_decay,
    check_p0_closed_form,
    check_periodic_sbp,
    check_upwind_sbp,
    p0_closed_form,
    sbp_report,
)


def make_ops(p, alpha, pairing="mp"):
    mesh = build_cut_cell_mesh(-np.pi, np.pi, 8, [(2, alpha, "left")])
    return operator_pair(build_space(mesh, p), pairing)


def test_periodic_sbp_residual_on_hand_built_matrices():
    m = np.array([1.0, 2.0, 3.0])
    skew = np.array([[0.0, 1.0, -2.0], [1.0, 0.0, 0.5], [-2.0, 0.5, 0.0]])
    # D = M^{-1} K with K skew gives M D + D^T M = K + K^T... only if K is
    # skew in the additive sense; build K skew-symmetric instead
    K = skew - skew.T
    D = K / m[:, None]
    assert check_periodic_sbp(m, D) == 0.0
    assert check_periodic_sbp(np.diag(m), D) == 0.0  # full matrix input
    D[0, 1] += 1e-3
    assert check_periodic_sbp(m, D) == pytest.approx(1e-3)


def test_upwind_sbp_residuals_on_hand_built_pair():
    rng = np.random.default_rng(3)
    m = rng.uniform(0.5, 2.0, 4)
    A = rng.standard_normal((4, 4))
    Dp = A / m[:, None]
    Dm = -A.T / m[:, None]  # exact dual partner by construction
    dual, eig = check_upwind_sbp(m, Dp, Dm)
    assert dual <= 1e-15
    # dissipation eigenvalue equals lambda_max of sym(A + A^T) = 2 sym(A)
    want = np.linalg.eigvalsh(A + A.T)[-1]
    assert eig == pytest.approx(want, rel=1e-12)


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        check_periodic_sbp(np.ones(3), np.zeros((4, 4)))
    with pytest.raises(ValueError):
        check_upwind_sbp(np.ones(4), np.zeros((4, 4)), np.zeros((3, 3)))


@pytest.mark.parametrize("p", [0, 1, 2])
@pytest.mark.parametrize("alpha", [1e-7, 0.3])
@pytest.mark.parametrize("pairing", ["mp", "pm", "central"])
def test_report_passes_on_assembled_operators(p, alpha, pairing):
    rep = sbp_report(make_ops(p, alpha, pairing), eps=1.0, trials=50)
    assert rep.passed
    assert rep.energy_derivative_bound <= 0.0 + 1e-9


def test_report_passed_thresholds():
    good = SBPReport(1e-12, 1e-12, -1e-13, -0.1)
    assert good.passed
    assert not SBPReport(1e-9, 1e-12, -1e-13, -0.1).passed
    assert not SBPReport(1e-12, 1e-9, -1e-13, -0.1).passed
    assert not SBPReport(1e-12, 1e-12, 1e-3, -0.1).passed
    assert not SBPReport(1e-12, 1e-12, -1e-13, 0.5).passed


@pytest.mark.parametrize("eps", [1.0, 1e-3])
def test_energy_decay_for_both_scales(eps):
    worst = check_energy_decay(make_ops(2, 0.3), eps, trials=50)
    assert worst <= 1e-12


def test_energy_decay_detects_antidissipative_dynamics():
    # flipping the pairing roles by negating the drift makes energy grow
    ops = make_ops(1, 0.3)
    flipped = type(ops)(**{**ops.__dict__, "Dp_symm": ops.Dm_symm,
                           "Dm_symm": ops.Dp_symm})
    worst = check_energy_decay(flipped, 1.0, trials=50)
    assert worst > 1e-3


def test_energy_decay_eps_validation():
    with pytest.raises(ValueError):
        check_energy_decay(make_ops(0, 0.3), 0.0)


@pytest.mark.parametrize("alpha", [0.3, 0.7, 1e-3, 1 - 1e-3])
def test_p0_closed_form_matches_assembly(alpha):
    a = min(alpha, 1.0 - alpha)
    mesh = build_cut_cell_mesh(-np.pi, np.pi, 8, [(2, a, "left")])
    space = build_space(mesh, 0)
    eta_c = max(0.0, 1.0 - a)
    assert check_p0_closed_form(space, a, eta_c) <= 1e-14


def test_p0_closed_form_validations():
    mesh = build_cut_cell_mesh(-np.pi, np.pi, 8, [(2, 0.3, "left")])
    with pytest.raises(ValueError, match="degree 0"):
        check_p0_closed_form(build_space(mesh, 1), 0.3, 0.5)
    space = build_space(mesh, 0)
    with pytest.raises(ValueError, match="alpha"):
        p0_closed_form(space, 0.2, 0.5)
    uncut = build_space(build_cut_cell_mesh(-np.pi, np.pi, 8), 0)
    with pytest.raises(ValueError, match="single cut"):
        check_p0_closed_form(uncut, 0.3, 0.5)


def test_p0_closed_form_rows_away_from_cut_are_plain_stencils():
    mesh = build_cut_cell_mesh(-np.pi, np.pi, 8, [(2, 0.3, "left")])
    space = build_space(mesh, 0)
    dm, dp = p0_closed_form(space, 0.3, 0.5)
    h = mesh.background_dx
    # row 6 is far from the cut in both stencils
    assert dm[6, 6] == pytest.approx(1 / h) and dm[6, 5] == pytest.approx(-1 / h)
    assert dp[6, 6] == pytest.approx(-1 / h) and dp[6, 7] == pytest.approx(1 / h)
