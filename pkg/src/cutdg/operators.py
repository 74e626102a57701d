"""Assembly of mass and derivative operators for the cut-cell DG scheme.

All bilinear forms are assembled in the convention form(u, w) = w^T M D u;
the helpers below build the matrix B = M D and return D = M^{-1} B (M is
diagonal for the nodal Gauss-Legendre basis).

The stabilized operators come in two flavors:
  * "naive": background + small-cell correction terms, directly as defined.
    With central fluxes this is already skew-symmetric under M; the upwind
    pair is generally not dual for p >= 1.
  * "symmetrized": central part plus the M-symmetrized half of the
    dissipation part, which restores the dual-pair (upwind SBP) structure
    for every degree.
"""

from dataclasses import dataclass

import numpy as np

from .dg_space import DGSpace

UPWIND = "-"
DOWNWIND = "+"
CENTRAL = "z"
FLUX_KINDS = (UPWIND, DOWNWIND, CENTRAL)

# Per-cell stabilization strength: eta_c = 1 - alpha / lambda(p).
LAMBDA_C = {0: 1.0, 1: 0.55}
LAMBDA_C_HIGH = 0.45  # extension for p >= 2


def lambda_c(p):
    return LAMBDA_C.get(p, LAMBDA_C_HIGH)


def default_eta(space: DGSpace):
    """eta_c = max(0, 1 - alpha/lambda_c(p)) for every small cell."""
    mesh = space.mesh
    lam = lambda_c(space.degree)
    return {
        c: max(0.0, 1.0 - (mesh.cell_sizes[c] / mesh.background_dx) / lam)
        for c in mesh.small_cells
    }


def _flux_coeffs(kind):
    """Constant partial derivatives (d/da, d/db) of the linear flux H(a, b)."""
    if kind == UPWIND:
        return 1.0, 0.0
    if kind == DOWNWIND:
        return 0.0, 1.0
    if kind == CENTRAL:
        return 0.5, 0.5
    raise ValueError(f"unknown flux kind {kind!r}")


def mass_diagonal(space: DGSpace):
    diag = np.empty(space.n_dofs)
    for i in range(space.mesh.n_cells):
        diag[space.dofs(i)] = space.cell_weights(i)
    return diag


def assemble_mass(space: DGSpace):
    """Global mass matrix (diagonal with the nodal Gauss-Legendre basis)."""
    return np.diag(mass_diagonal(space))


def _interface_trace(space, i, x):
    """Row vector over global dofs: cell i's polynomial evaluated at x.

    The point is shifted into the periodic chart nearest cell i, so
    wrap-around stencils evaluate the correct periodic image.
    """
    row = np.zeros(space.n_dofs)
    row[space.dofs(i)] = space.basis_at(i, space.wrap_near(i, x))[0]
    return row


def _own_trace(space, i, end):
    """Trace of cell i at its own endpoint (end = -1 left, +1 right).

    Evaluated at the exact reference coordinate; mapping the physical
    vertex back to reference would lose precision on very small cells.
    """
    row = np.zeros(space.n_dofs)
    row[space.dofs(i)] = space.basis_at_ref(float(end))[0]
    return row


def _jump_row(space, i):
    """Test-function jump [[w]] at interface i+1/2 as a global row vector."""
    n = space.mesh.n_cells
    return _own_trace(space, i % n, +1) - _own_trace(space, (i + 1) % n, -1)


def assemble_background_mform(space: DGSpace, kind):
    """B = M D for the background DG derivative with flux `kind`."""
    ha, hb = _flux_coeffs(kind)
    n = space.mesh.n_cells
    nd = space.n_dofs
    B = np.zeros((nd, nd))
    # volume term: -int_E u dx(w); with the collocation basis the block is
    # -(diag(w_ref) @ D_ref)^T independent of the cell size
    vol = -(np.diag(space.ref_weights) @ space.ref_diff).T
    for i in range(n):
        s = space.dofs(i)
        B[s, s] += vol
    # interface terms: H(u_i, u_{i+1}) [[w]]
    for i in range(n):
        flux = ha * _own_trace(space, i, +1) + hb * _own_trace(space, (i + 1) % n, -1)
        jump = _jump_row(space, i)
        B += np.outer(jump, flux)
    return B


def assemble_dod_flux_mform(space: DGSpace, c, kind, eta_c):
    """B = M J0 for the small-cell interface flux correction.

    Replaces a fraction eta_c of the fluxes at both interfaces of the small
    cell by fluxes built from the extended neighbor polynomials.
    """
    mesh = space.mesh
    if c not in mesh.small_cells:
        raise ValueError(f"cell {c} is not a small cell")
    if not 0.0 <= eta_c <= 1.0:
        raise ValueError(f"eta_c={eta_c} outside [0, 1]")
    ha, hb = _flux_coeffs(kind)
    n = mesh.n_cells
    cm, cp = (c - 1) % n, (c + 1) % n
    x_left = mesh.vertices[c]
    x_right = mesh.vertices[c + 1]

    B = np.zeros((space.n_dofs, space.n_dofs))
    # interface c-1/2: H(u_{c-1}, u_{c+1}) - H(u_{c-1}, u_c); the u_{c-1}
    # contributions cancel, leaving the b-slot difference
    flux_l = hb * (_interface_trace(space, cp, x_left) - _own_trace(space, c, -1))
    B += eta_c * np.outer(_jump_row(space, c - 1), flux_l)
    # interface c+1/2: H(u_{c-1}, u_{c+1}) - H(u_c, u_{c+1})
    flux_r = ha * (_interface_trace(space, cm, x_right) - _own_trace(space, c, +1))
    B += eta_c * np.outer(_jump_row(space, c), flux_r)
    return B


def assemble_dod_volume_mform(space: DGSpace, c, kind, eta_c, L_c=0.5, R_c=0.5):
    """B = M J1 for the small-cell volume redistribution (linear flux).

    Implements eta_c * sum_{j in {c-1,c,c+1}} K(j) * int_{E_c} H(j) dx with
    K(c-1)=L_c, K(c)=-1, K(c+1)=R_c and
    H(j) = (H(u_{c-1},u_{c+1}) - u_j) dx(w_j)
           + H_a u_j dx(w_{c-1}) + H_b u_j dx(w_{c+1}).
    All integrands have degree <= 2p-1, so the cell's own quadrature rule
    is exact.
    """
    mesh = space.mesh
    if c not in mesh.small_cells:
        raise ValueError(f"cell {c} is not a small cell")
    if abs(L_c + R_c - 1.0) > 1e-14:
        raise ValueError(f"volume weights must satisfy L_c + R_c = 1, got {L_c + R_c}")
    nd = space.n_dofs
    B = np.zeros((nd, nd))
    if space.degree == 0 or eta_c == 0.0:
        return B  # test derivatives vanish / no stabilization

    ha, hb = _flux_coeffs(kind)
    n = mesh.n_cells
    cells = [(c - 1) % n, c, (c + 1) % n]
    K = [L_c, -1.0, R_c]
    xq = space.nodes[c]  # quadrature points inside E_c
    wq = space.cell_weights(c)
    # values/derivatives of each neighbor's (extended) basis at xq, in the
    # periodic chart nearest the respective neighbor; the small cell's own
    # basis is evaluated at its exact reference nodes (collocation identity)
    E, G = [], []
    for loc, j in enumerate(cells):
        if loc == 1:
            E.append(np.eye(space.nodes_per_cell))
            G.append(space.basis_deriv_at(j, None, ref=space.ref_nodes))
        else:
            xj = space.wrap_near(j, xq)
            E.append(space.basis_at(j, xj))
            G.append(space.basis_deriv_at(j, xj))

    npc = space.nodes_per_cell
    Bloc = np.zeros((3 * npc, 3 * npc))

    def block(a):
        return slice(a * npc, (a + 1) * npc)

    # trial-side flux H(u_{c-1}, u_{c+1}) over the local dof set
    Hmat = np.zeros((len(xq), 3 * npc))
    Hmat[:, block(0)] = ha * E[0]
    Hmat[:, block(2)] = hb * E[2]

    for jloc in range(3):
        Uj = np.zeros((len(xq), 3 * npc))
        Uj[:, block(jloc)] = E[jloc]
        GW_j = G[jloc].T * wq
        Bloc[block(jloc), :] += K[jloc] * (GW_j @ (Hmat - Uj))
        Bloc[block(0), :] += K[jloc] * ha * ((G[0].T * wq) @ Uj)
        Bloc[block(2), :] += K[jloc] * hb * ((G[2].T * wq) @ Uj)

    Bloc *= eta_c
    for a, ja in enumerate(cells):
        for b, jb in enumerate(cells):
            B[space.dofs(ja), space.dofs(jb)] += Bloc[block(a), block(b)]
    return B


def _to_derivative(space, B):
    """Convert B = M D into D (diagonal M)."""
    return B / mass_diagonal(space)[:, None]


def assemble_background(space, kind):
    return _to_derivative(space, assemble_background_mform(space, kind))


def assemble_dod_flux(space, c, kind, eta_c):
    return _to_derivative(space, assemble_dod_flux_mform(space, c, kind, eta_c))


def assemble_dod_volume(space, c, kind, eta_c, L_c=0.5, R_c=0.5):
    return _to_derivative(
        space, assemble_dod_volume_mform(space, c, kind, eta_c, L_c, R_c)
    )


def _volume_weights(kind, lr_policy):
    if lr_policy == "half":
        return 0.5, 0.5
    if lr_policy == "flow":
        # classic flow-based redistribution; breaks the dual-pair for p >= 1
        if kind == UPWIND:
            return 1.0, 0.0
        if kind == DOWNWIND:
            return 0.0, 1.0
        return 0.5, 0.5
    raise ValueError(f"unknown L/R policy {lr_policy!r}")


def assemble_stabilized(space, kind, eta, lr_policy="half"):
    """Full DoD-stabilized derivative: background + sum over small cells."""
    missing = [c for c in space.mesh.small_cells if c not in eta]
    if missing:
        raise ValueError(f"eta missing for small cells {missing}")
    B = assemble_background_mform(space, kind)
    L, R = _volume_weights(kind, lr_policy)
    for c in space.mesh.small_cells:
        B += assemble_dod_flux_mform(space, c, kind, eta[c])
        B += assemble_dod_volume_mform(space, c, kind, eta[c], L, R)
    return _to_derivative(space, B)


def split_dissipation(d_naive_plus, d_naive_minus, d_central=None, mass_diag=None,
                      tol=1e-10):
    """Dissipation operator with D_naive^-/+ = Dz +/- Ddiss (L_c = R_c = 1/2).

    If the central operator is supplied, the decomposition identity is
    verified in the M-weighted norm (pass mass_diag, otherwise unweighted);
    a large residual indicates inconsistent assembly inputs.
    """
    ddiss = 0.5 * (d_naive_minus - d_naive_plus)
    if d_central is not None:
        resid_mat = 0.5 * (d_naive_minus + d_naive_plus) - d_central
        scale_mat = d_central
        if mass_diag is not None:
            resid_mat = mass_diag[:, None] * resid_mat
            scale_mat = mass_diag[:, None] * d_central
        resid = np.max(np.abs(resid_mat))
        scale = max(np.max(np.abs(scale_mat)), 1.0)
        if resid > tol * scale:
            raise RuntimeError(
                f"dissipation split residual {resid:.3e} exceeds tolerance"
            )
    return ddiss


def symmetrize_upwind_pair(d_central, d_diss, mass_diag, tol=1e-10):
    """Symmetrized upwind pair (D^{+,symm}, D^{-,symm}).

    S = sym(M Ddiss); D^{+,symm} = Dz - M^{-1} S, D^{-,symm} = Dz + M^{-1} S.
    The returned pair satisfies M D^+ + (D^-)^T M = 0 and makes
    M (D^+ - D^-) negative semidefinite. All algebra happens on the
    M-weighted matrices so small-cell rows do not amplify roundoff.
    """
    bz = mass_diag[:, None] * d_central
    s = mass_diag[:, None] * d_diss
    s = 0.5 * (s + s.T)
    # roundoff-scaled ridge: the division by M and re-multiplication in the
    # structure checks perturb entries by eps * |B|; shifting the symmetric
    # part by a slightly larger multiple of the identity (relative size
    # ~1e-15) keeps the stored pair dissipative under that perturbation
    mu = 32.0 * np.finfo(float).eps * max(np.max(np.abs(bz)), np.max(np.abs(s)))
    s[np.diag_indices_from(s)] += mu
    dp = (bz - s) / mass_diag[:, None]
    dm = (bz + s) / mass_diag[:, None]
    dual = mass_diag[:, None] * dp + (mass_diag[:, None] * dm).T
    scale = max(np.max(np.abs(bz)), 1.0)
    if np.max(np.abs(dual)) > tol * scale:
        raise RuntimeError("symmetrized pair fails the duality identity")
    return dp, dm


PAIRINGS = ("mp", "pm", "central")


@dataclass(frozen=True)
class OperatorSet:
    """Assembled operators for one space/eta configuration.

    d_rho/d_gt are the pairing-selected derivative operators of the two
    equations; the symmetrized pair is always available because the g-tilde
    equation's drift term uses (D^+ - D^-) regardless of pairing.
    """

    space: DGSpace
    mass_diag: np.ndarray
    Dz: np.ndarray
    Dp_naive: np.ndarray
    Dm_naive: np.ndarray
    Ddiss: np.ndarray
    Dp_symm: np.ndarray
    Dm_symm: np.ndarray
    eta: dict
    pairing: str
    d_rho: np.ndarray
    d_gt: np.ndarray

    @property
    def M(self):
        return np.diag(self.mass_diag)

    @property
    def d_diff(self):
        """D^+ - D^- of the symmetrized pair (drives the drift term)."""
        return self.Dp_symm - self.Dm_symm


def operator_pair(space, pairing, eta=None, lr_policy="half"):
    """Assemble everything and select the (D^rho, D^gt) pair.

    For p = 0 the classic (un-symmetrized) DoD pair already has the upwind
    SBP property, so it is used directly; for p >= 1 the alternating
    pairings use the symmetrized operators.
    """
    if pairing not in PAIRINGS:
        raise ValueError(f"pairing must be one of {PAIRINGS}, got {pairing!r}")
    if eta is None:
        eta = default_eta(space)
    mdiag = mass_diagonal(space)
    dz = assemble_stabilized(space, CENTRAL, eta, lr_policy="half")
    dp_naive = assemble_stabilized(space, DOWNWIND, eta, lr_policy="half")
    dm_naive = assemble_stabilized(space, UPWIND, eta, lr_policy="half")
    ddiss = split_dissipation(dp_naive, dm_naive, dz, mass_diag=mdiag)
    if space.degree == 0:
        dp_symm, dm_symm = dp_naive, dm_naive
    else:
        dp_symm, dm_symm = symmetrize_upwind_pair(dz, ddiss, mdiag)
    if lr_policy == "flow":
        # diagnostic path: replace the naive pair by flow-based volume weights
        dp_naive = assemble_stabilized(space, DOWNWIND, eta, lr_policy="flow")
        dm_naive = assemble_stabilized(space, UPWIND, eta, lr_policy="flow")
        if space.degree == 0:
            dp_symm, dm_symm = dp_naive, dm_naive

    if pairing == "mp":
        d_rho, d_gt = dm_symm, dp_symm
    elif pairing == "pm":
        d_rho, d_gt = dp_symm, dm_symm
    else:
        d_rho = d_gt = dz

    return OperatorSet(
        space=space,
        mass_diag=mdiag,
        Dz=dz,
        Dp_naive=dp_naive,
        Dm_naive=dm_naive,
        Ddiss=ddiss,
        Dp_symm=dp_symm,
        Dm_symm=dm_symm,
        eta=dict(eta),
        pairing=pairing,
        d_rho=d_rho,
        d_gt=d_gt,
    )


def dump_operator_csv(matrix, path):
    """Write a dense operator as CSV, row-major, 17 significant digits."""
    np.savetxt(path, np.asarray(matrix), delimiter=",", fmt="%.17g")
