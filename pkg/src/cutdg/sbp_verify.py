"""Numerical verification of the SBP structure and the energy estimate.

Every check returns a residual; the caller compares against a threshold.
Sign conventions: skew/duality residuals are max-norms (always >= 0), the
dissipation eigenvalue and the energy derivative carry their sign, which
is the verdict (<= 0 up to roundoff means stable).
"""

from dataclasses import dataclass

import numpy as np

from .operators import (
    OperatorSet,
    assemble_stabilized,
    CENTRAL,
    DOWNWIND,
    UPWIND,
)

SKEW_TOL = 1e-11
DUALITY_TOL = 1e-11
DISSIPATION_TOL = 1e-11
ENERGY_TOL = 1e-9


@dataclass(frozen=True)
class SBPReport:
    """Residuals of the four structure checks for one operator set."""

    skew_residual: float
    duality_residual: float
    max_dissipation_eigenvalue: float
    energy_derivative_bound: float

    @property
    def passed(self) -> bool:
        return (
            self.skew_residual <= SKEW_TOL
            and self.duality_residual <= DUALITY_TOL
            and self.max_dissipation_eigenvalue <= DISSIPATION_TOL
            and self.energy_derivative_bound <= ENERGY_TOL
        )


def _as_diag(M):
    M = np.asarray(M, dtype=float)
    return np.diag(M) if M.ndim == 2 else M


def check_periodic_sbp(M, D):
    """Max-norm of M D + D^T M (zero iff D is a periodic SBP operator)."""
    m = _as_diag(M)
    D = np.asarray(D)
    if D.shape[0] != D.shape[1] or D.shape[0] != len(m):
        raise ValueError("dimension mismatch between M and D")
    md = m[:, None] * D
    return float(np.max(np.abs(md + md.T)))


def check_upwind_sbp(M, Dp, Dm):
    """Duality residual and the largest dissipation eigenvalue.

    Returns (max-norm of M Dp + Dm^T M, lambda_max of sym(M (Dp - Dm))).
    Both must be <= tolerance (the eigenvalue possibly negative) for
    (Dp, Dm) to form a periodic upwind SBP pair.
    """
    m = _as_diag(M)
    Dp, Dm = np.asarray(Dp), np.asarray(Dm)
    if Dp.shape != Dm.shape or Dp.shape[0] != len(m):
        raise ValueError("dimension mismatch between M and operators")
    dual = float(np.max(np.abs(m[:, None] * Dp + (m[:, None] * Dm).T)))
    A = m[:, None] * (Dp - Dm)
    A = 0.5 * (A + A.T)
    eig = float(np.linalg.eigvalsh(A)[-1])
    return dual, eig


def check_energy_decay(opset: OperatorSet, eps, trials=200, rng_seed=0):
    """Worst-case energy derivative over random states, relative to energy.

    Evaluates d/dt (rho^T M rho + eps^2 gt^T M gt) algebraically with the
    semidiscrete right side and returns the maximum of the ratio
    derivative / energy; a value <= 0 (up to roundoff) certifies decay.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    rng = np.random.default_rng(rng_seed)
    m = opset.mass_diag
    d_rho, d_gt = opset.d_rho, opset.d_gt
    d_diff = opset.d_diff
    n = len(m)
    worst = -np.inf
    for _ in range(trials):
        rho = rng.standard_normal(n)
        gt = rng.standard_normal(n)
        rho_dot = -d_rho @ gt
        gt_dot = -(d_gt @ rho + gt) / eps**2 + (d_diff @ gt) / (2.0 * eps)
        deriv = 2.0 * rho @ (m * rho_dot) + 2.0 * eps**2 * gt @ (m * gt_dot)
        en = rho @ (m * rho) + eps**2 * gt @ (m * gt)
        worst = max(worst, deriv / en)
    return float(worst)


def p0_closed_form(space, alpha, eta_c):
    """Reference D^-, D^+ for a single left cut at degree 0.

    Away from the cut both are the plain one-sided stencils 1/h; the rows
    of the small cell c and its neighbors carry the stabilized entries.
    """
    mesh = space.mesh
    n = mesh.n_cells
    dx = mesh.background_dx
    (c,) = mesh.small_cells
    # the realized cell sizes are the floating-point values of alpha*dx and
    # (1-alpha)*dx; using them avoids re-rounding the cut vertex
    a_dx = mesh.cell_sizes[c]
    b_dx = mesh.cell_sizes[(c + 1) % n]
    if not np.isclose(a_dx, alpha * dx, rtol=1e-6):
        raise ValueError("alpha does not match the mesh's cut fraction")

    dm = np.zeros((n, n))
    dp = np.zeros((n, n))
    for i in range(n):
        h = mesh.cell_sizes[i]
        dm[i, i] = 1.0 / h
        dm[i, (i - 1) % n] = -1.0 / h
        dp[i, i] = -1.0 / h
        dp[i, (i + 1) % n] = 1.0 / h

    cm, cp = (c - 1) % n, (c + 1) % n
    # upwind rows around the cut
    dm[c, cm] = (eta_c - 1.0) / a_dx
    dm[c, c] = (1.0 - eta_c) / a_dx
    dm[cp, cm] = -eta_c / b_dx
    dm[cp, c] = (eta_c - 1.0) / b_dx
    dm[cp, cp] = 1.0 / b_dx
    # downwind rows around the cut
    dp[cm, cm] = -1.0 / dx
    dp[cm, c] = (1.0 - eta_c) / dx
    dp[cm, cp] = eta_c / dx
    dp[c, c] = (eta_c - 1.0) / a_dx
    dp[c, cp] = (1.0 - eta_c) / a_dx
    return dm, dp


def check_p0_closed_form(space, alpha, eta_c):
    """Max relative deviation of the assembled p=0 pair from closed forms."""
    if space.degree != 0:
        raise ValueError("closed forms are specific to degree 0")
    if len(space.mesh.small_cells) != 1:
        raise ValueError("closed forms assume a single cut")
    (c,) = space.mesh.small_cells
    eta = {c: eta_c}
    dm = assemble_stabilized(space, UPWIND, eta)
    dp = assemble_stabilized(space, DOWNWIND, eta)
    dm_ref, dp_ref = p0_closed_form(space, alpha, eta_c)
    worst = 0.0
    for got, ref in ((dm, dm_ref), (dp, dp_ref)):
        scale = np.max(np.abs(ref))
        worst = max(worst, float(np.max(np.abs(got - ref)) / scale))
    return worst


def sbp_report(opset: OperatorSet, eps=1.0, trials=200, rng_seed=0) -> SBPReport:
    """Run all structure checks on an assembled operator set."""
    return SBPReport(
        skew_residual=check_periodic_sbp(opset.mass_diag, opset.Dz),
        duality_residual=check_upwind_sbp(
            opset.mass_diag, opset.Dp_symm, opset.Dm_symm
        )[0],
        max_dissipation_eigenvalue=check_upwind_sbp(
            opset.mass_diag, opset.Dp_symm, opset.Dm_symm
        )[1],
        energy_derivative_bound=check_energy_decay(
            opset, eps, trials=trials, rng_seed=rng_seed
        ),
    )
