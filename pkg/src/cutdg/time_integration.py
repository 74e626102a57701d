"""IMEX-RK steppers for the split telegraph system and heat-limit steppers.

The telegraph right side is split into a non-stiff explicit part f and a
stiff implicit part g acting only on the g-tilde equation:

    f(rho, gt) = (-D^rho gt, 1/(2 eps) (D^+ - D^-) gt)
    g(rho, gt) = (0, -1/eps^2 (D^gt rho + gt))

Because g is diagonal in gt once rho is known, every implicit stage is a
componentwise division; no linear system is solved on the telegraph path.
All steppers accept states shaped (n,) or (n, m), so propagating a basis
of m vectors costs one pass.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

TYPE_I = "type I"
TYPE_II = "type II"
ARS = "ARS"


@dataclass(frozen=True)
class IMEXTableau:
    """Additive Runge-Kutta tableau pair (explicit, implicit)."""

    name: str
    a_expl: np.ndarray
    a_impl: np.ndarray
    b_expl: np.ndarray
    b_impl: np.ndarray
    c_expl: np.ndarray
    c_impl: np.ndarray

    @property
    def s(self) -> int:
        return len(self.b_expl)

    @property
    def classification(self) -> str:
        """One of "type I", "type II", "ARS" per the diagonal structure."""
        diag = np.diag(self.a_impl)
        if np.all(diag != 0.0):
            return TYPE_I
        if diag[0] == 0.0 and np.all(diag[1:] != 0.0):
            if self.b_impl[0] == 0.0 and np.all(self.a_impl[1:, 0] == 0.0):
                return ARS
            return TYPE_II
        raise ValueError(f"tableau {self.name!r} fits no supported class")

    @property
    def gsa(self) -> bool:
        """Globally stiffly accurate: last stage rows equal the weights."""
        return bool(
            np.array_equal(self.a_impl[-1], self.b_impl)
            and np.array_equal(self.a_expl[-1], self.b_expl)
        )

    def validate(self):
        s = self.s
        if self.a_expl.shape != (s, s) or self.a_impl.shape != (s, s):
            raise ValueError("tableau matrices must be s x s")
        if np.any(np.triu(self.a_expl) != 0.0):
            raise ValueError("explicit tableau must be strictly lower triangular")
        if np.any(np.triu(self.a_impl, 1) != 0.0):
            raise ValueError("implicit tableau must be lower triangular")
        self.classification  # raises if unsupported
        return self


def _tab(rows, s):
    a = np.zeros((s, s))
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            a[i, j] = float(Fraction(v))
    return a


def builtin_tableau(name: str) -> IMEXTableau:
    """Builtin tableaux: third-order ARS(4,4,3) and SSP2(3,2,2)."""
    if name == "ARS443":
        s = 5
        a_expl = _tab(
            [
                [],
                ["1/2"],
                ["11/18", "1/18"],
                ["5/6", "-5/6", "1/2"],
                ["1/4", "7/4", "3/4", "-7/4"],
            ],
            s,
        )
        a_impl = _tab(
            [
                [],
                ["0", "1/2"],
                ["0", "1/6", "1/2"],
                ["0", "-1/2", "1/2", "1/2"],
                ["0", "3/2", "-3/2", "1/2", "1/2"],
            ],
            s,
        )
        b_expl = _tab([["1/4", "7/4", "3/4", "-7/4", "0"]], 5)[0]
        b_impl = _tab([["0", "3/2", "-3/2", "1/2", "1/2"]], 5)[0]
    elif name == "SSP2-332":
        s = 3
        a_expl = _tab([[], ["1/2"], ["1/2", "1/2"]], s)
        a_impl = _tab([["1/4"], ["0", "1/4"], ["1/3", "1/3", "1/3"]], s)
        b_expl = _tab([["1/3", "1/3", "1/3"]], 3)[0]
        b_impl = _tab([["1/3", "1/3", "1/3"]], 3)[0]
    else:
        raise ValueError(f"unknown tableau {name!r}")
    return IMEXTableau(
        name=name,
        a_expl=a_expl,
        a_impl=a_impl,
        b_expl=b_expl,
        b_impl=b_impl,
        c_expl=a_expl.sum(axis=1),
        c_impl=a_impl.sum(axis=1),
    ).validate()


def imex_step(system, tab: IMEXTableau, state, dt):
    """One IMEX-RK step of the split telegraph system.

    This is the textbook formulation with explicit 1/eps^2 arithmetic; it
    degrades by roundoff for very small eps (the rescaled variant below
    avoids that).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    eps = system.eps
    if eps == 0:
        raise ValueError("eps = 0 is not integrable here; use the heat path")
    rho_n, gt_n = state
    d_rho, d_gt, d_diff = system.d_rho, system.d_gt, system.d_diff
    s = tab.s
    ae, ai = tab.a_expl, tab.a_impl

    f_rho, f_gt, g_gt = [], [], []
    rho_k = gt_k = None
    for k in range(s):
        rho_k = rho_n + dt * sum(ae[k, i] * f_rho[i] for i in range(k))
        rhs = (
            gt_n
            + dt * sum(ae[k, i] * f_gt[i] for i in range(k))
            + dt * sum(ai[k, i] * g_gt[i] for i in range(k))
            - (dt * ai[k, k] / eps**2) * (d_gt @ rho_k)
        )
        gt_k = rhs / (1.0 + dt * ai[k, k] / eps**2)
        f_rho.append(-(d_rho @ gt_k))
        f_gt.append((d_diff @ gt_k) / (2.0 * eps))
        g_gt.append(-(d_gt @ rho_k + gt_k) / eps**2)

    if tab.gsa:
        # last stage equals the update; skips the cancellation-prone
        # weight sum with 1/eps^2 terms
        out = (rho_k, gt_k)
    else:
        rho_out = rho_n + dt * sum(tab.b_expl[i] * f_rho[i] for i in range(s))
        gt_out = gt_n + dt * sum(
            tab.b_expl[i] * f_gt[i] + tab.b_impl[i] * g_gt[i] for i in range(s)
        )
        out = (rho_out, gt_out)
    if not (np.all(np.isfinite(out[0])) and np.all(np.isfinite(out[1]))):
        raise FloatingPointError("IMEX step produced non-finite values")
    return out


def stable_ars_step(system, tab: IMEXTableau, state, dt):
    """One IMEX-RK step via stages rescaled by products of (eps^2 + dt*a_kk).

    Algebraically identical to imex_step for ARS-type GSA tableaux, but no
    intermediate quantity is divided by eps, so the update stays accurate
    down to eps = 0.
    """
    if tab.classification != ARS or not tab.gsa:
        raise ValueError("rescaled stepping requires an ARS-type GSA tableau")
    if dt <= 0:
        raise ValueError("dt must be positive")
    eps = system.eps
    e2 = eps**2
    rho_n, gt_n = state
    d_rho, d_gt, d_diff = system.d_rho, system.d_gt, system.d_diff
    s = tab.s
    ae, ai = tab.a_expl, tab.a_impl
    diag = np.diag(ai)

    def ds(k, l):
        # product of (eps^2 + dt*a_jj) for stages k..l, 1-based, empty = 1
        out = 1.0
        for j in range(k, l + 1):
            out *= e2 + dt * diag[j - 1]
        return out

    rho_hat = [rho_n]
    gt_hat = [gt_n]
    for k in range(2, s + 1):
        acc_gt = sum(
            ae[k - 1, i - 1] * ds(i + 1, k - 1) * gt_hat[i - 1] for i in range(1, k)
        )
        rho_k = ds(2, k - 1) * rho_n - dt * (d_rho @ acc_gt)
        rho_hat.append(rho_k)
        acc_rho = sum(
            ai[k - 1, i - 1] * ds(i, k - 1) * rho_hat[i - 1] for i in range(1, k + 1)
        )
        acc_impl = sum(
            ai[k - 1, i - 1] * ds(i + 1, k - 1) * gt_hat[i - 1] for i in range(1, k)
        )
        gt_k = e2 * ds(2, k - 1) * gt_n + dt * (
            (eps / 2.0) * (d_diff @ acc_gt) - d_gt @ acc_rho - acc_impl
        )
        gt_hat.append(gt_k)

    out = (rho_hat[-1] / ds(2, s - 1), gt_hat[-1] / ds(2, s))
    if not (np.all(np.isfinite(out[0])) and np.all(np.isfinite(out[1]))):
        raise FloatingPointError("IMEX step produced non-finite values")
    return out


def explicit_limit_step(L, tab: IMEXTableau, u, dt):
    """Explicit-RK step of u' = L u with the tableau's explicit part."""
    s = tab.s
    ae, be = tab.a_expl, tab.b_expl
    lu = []
    for k in range(s):
        stage = u + dt * sum(ae[k, i] * lu[i] for i in range(k))
        lu.append(L @ stage)
    return u + dt * sum(be[i] * lu[i] for i in range(s))


def factor_implicit(L, dt, theta=1.0):
    """LU factorization of (I - theta*dt*L), reusable across steps."""
    n = L.shape[0]
    return scipy.linalg.lu_factor(np.eye(n) - theta * dt * L)


def implicit_euler_heat_step(L, u, dt, lu=None):
    """Solve (I - dt L) u_next = u by dense LU with partial pivoting."""
    if lu is None:
        lu = factor_implicit(L, dt, theta=1.0)
    return scipy.linalg.lu_solve(lu, u)


def implicit_midpoint_heat_step(L, u, dt, lu=None):
    """u_next = (I - dt/2 L)^{-1} (I + dt/2 L) u."""
    if lu is None:
        lu = factor_implicit(L, dt, theta=0.5)
    return scipy.linalg.lu_solve(lu, u + (0.5 * dt) * (L @ u))
