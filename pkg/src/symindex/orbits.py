"""From Hamiltonian systems to symmetric return-map blocks.

Pipeline: find a symmetric periodic orbit by shooting from the fixed set of
the involution (an orbit that starts on Fix(rho) and hits Fix(rho) again at
half period closes up by reversibility), integrate the variational
equations for the monodromy, build the transverse symplectic subspace V
with a basis adapted to the +1/-1 eigenspaces of the restricted involution,
and express the monodromy restricted to V in that basis.  The result is a
ReturnMapBlocks that feeds the index machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import linalg
from .errors import (
    CriticalPointError,
    DegenerateTransversalError,
    EnergyDriftExceededError,
    NoConvergenceError,
    ProjectionIllConditionedError,
    StepFailureError,
    UnequalEigenspacesError,
)
from .returnmap import ReturnMapBlocks
from .systems import HamiltonianSystem, involution_eigenspace


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (len(times), dim)


@dataclass(frozen=True)
class SymmetricOrbit:
    """A periodic orbit with initial point on Fix(rho)."""

    x: np.ndarray
    eta: float  # full period
    energy: float
    residual: float  # |phi^eta(x) - x|

    def to_json(self) -> dict:
        return {
            "x": self.x.tolist(),
            "eta": self.eta,
            "energy": self.energy,
            "residual": self.residual,
        }


@dataclass(frozen=True)
class TransverseSection:
    """Adapted symplectic basis of the transverse subspace V.

    Columns of ``basis_plus`` span the +1 eigenspace of the restricted
    involution, ``basis_minus`` the -1 eigenspace, with
    omega(e_i, f_j) = delta_ij; ``v_aux`` is the transversal vector used to
    cut V out of the energy level, and ``symplectic_basis_matrix`` stacks
    [e_1..e_n, f_1..f_n] as columns.
    """

    basis_plus: np.ndarray
    basis_minus: np.ndarray
    v_aux: np.ndarray
    symplectic_basis_matrix: np.ndarray


def integrate_with_variations(
    sys: HamiltonianSystem, x0, t_final: float, tol: float = 1e-11
) -> tuple[Trajectory, np.ndarray]:
    """Flow and fundamental solution of the variational equation over
    [0, t_final] (t_final may be negative).

    Uses an adaptive high-order scheme with dense output; post-conditions
    enforced here: energy drift along the trajectory at most 10 * tol
    (relative to max(1, |H|)), fundamental matrix symplectic to 100 * tol.
    """
    x0 = np.asarray(x0, dtype=float)
    dim = sys.dim
    j = sys.structure_matrix()

    def rhs(t, y):
        x = y[:dim]
        fund = y[dim:].reshape(dim, dim)
        dx = sys.vector_field(x)
        dfund = j @ sys.hessian(x) @ fund
        return np.concatenate([dx, dfund.ravel()])

    if t_final == 0.0:
        return Trajectory(np.array([0.0]), x0[None, :].copy()), np.eye(dim)

    y0 = np.concatenate([x0, np.eye(dim).ravel()])
    sol = solve_ivp(
        rhs,
        (0.0, t_final),
        y0,
        method="DOP853",
        rtol=tol,
        atol=tol,
        dense_output=False,
    )
    if not sol.success:
        raise StepFailureError(f"integrator failed: {sol.message}")
    states = sol.y[:dim, :].T
    fund = sol.y[dim:, -1].reshape(dim, dim)

    h0 = sys.hamiltonian(x0)
    h_scale = max(1.0, abs(h0))
    drift = max(abs(sys.hamiltonian(x) - h0) for x in states)
    if drift > 10.0 * tol * h_scale:
        raise EnergyDriftExceededError(
            f"energy drift {drift:.3e} exceeds {10.0 * tol * h_scale:.1e}"
        )
    sympl_resid = linalg.inf_norm(fund.T @ j @ fund - j)
    scale = max(1.0, linalg.inf_norm(fund) ** 2)
    if sympl_resid > 100.0 * tol * scale:
        raise EnergyDriftExceededError(
            f"fundamental matrix symplecticity residual {sympl_resid:.3e} "
            f"exceeds {100.0 * tol * scale:.1e}"
        )
    return Trajectory(sol.t.copy(), states), fund


def _flow(sys, x0, t_final, tol):
    """State-only integration (no variations), for residual checks."""
    if t_final == 0.0:
        return np.asarray(x0, dtype=float)
    sol = solve_ivp(
        lambda t, x: sys.vector_field(x),
        (0.0, t_final),
        np.asarray(x0, dtype=float),
        method="DOP853",
        rtol=tol,
        atol=tol,
    )
    if not sol.success:
        raise StepFailureError(f"integrator failed: {sol.message}")
    return sol.y[:, -1]


def find_symmetric_orbit(
    sys: HamiltonianSystem,
    seed_point,
    half_period_guess: float,
    tol: float = 1e-11,
    energy: float | None = None,
    max_iterations: int = 40,
) -> SymmetricOrbit:
    """Shooting for a symmetric periodic orbit.

    Unknowns are the point x on Fix(rho) and the half period tau; the
    conditions require phi^tau(x) to lie on Fix(rho) again (components along
    the -1 eigenspace of rho vanish), plus optionally H(x) = energy.  The
    system is generically underdetermined by one (symmetric orbits come in
    one-parameter families), so the Newton step is the least-norm solution.
    Reversibility then closes the orbit over the full period 2 tau, which is
    verified directly.
    """
    x_seed = np.asarray(seed_point, dtype=float)
    rho = sys.involution
    if linalg.inf_norm(rho @ x_seed - x_seed) > 1e-9 * max(1.0, linalg.inf_norm(x_seed)):
        raise ValueError("seed point does not lie on the fixed set of the involution")
    grad = sys.gradient(x_seed)
    if np.linalg.norm(grad) < 1e-10:
        raise CriticalPointError("Hamiltonian gradient vanishes at the seed point")
    if half_period_guess <= 0:
        raise ValueError(f"half-period guess must be positive, got {half_period_guess}")

    fix_basis = sys.fixed_set_basis()  # (dim, n+1)
    minus_basis = involution_eigenspace(rho, -1)  # (dim, n+1)

    x = x_seed.copy()
    tau = float(half_period_guess)
    shoot_tol = max(tol * 100.0, 1e-12)
    for _ in range(max_iterations):
        traj, fund = integrate_with_variations(sys, x, tau, tol)
        x_half = traj.states[-1]
        resid_vec = minus_basis.T @ x_half
        if energy is not None:
            resid_vec = np.concatenate([resid_vec, [sys.hamiltonian(x) - energy]])
        if np.linalg.norm(resid_vec) <= shoot_tol:
            break
        # Jacobian wrt (coefficients on Fix(rho), tau).
        d_half = minus_basis.T @ np.column_stack(
            [fund @ fix_basis, sys.vector_field(x_half)]
        )
        if energy is not None:
            d_energy = np.concatenate([sys.gradient(x) @ fix_basis, [0.0]])
            d_half = np.vstack([d_half, d_energy])
        step, *_ = np.linalg.lstsq(d_half, -resid_vec, rcond=None)
        if not np.all(np.isfinite(step)):
            raise NoConvergenceError("shooting step is not finite")
        # Damp very large steps to stay in the convergence basin.
        norm = np.linalg.norm(step)
        if norm > 0.5 * max(1.0, np.linalg.norm(x)):
            step *= 0.5 * max(1.0, np.linalg.norm(x)) / norm
        x = x + fix_basis @ step[:-1]
        tau = tau + step[-1]
        if tau <= 0:
            raise NoConvergenceError("half period collapsed to zero during shooting")
        if np.linalg.norm(sys.gradient(x)) < 1e-10:
            raise CriticalPointError("shooting converged toward a critical point")
    else:
        raise NoConvergenceError(
            f"no symmetric orbit within {max_iterations} iterations "
            f"(residual {np.linalg.norm(resid_vec):.3e})"
        )

    eta = 2.0 * tau
    x_full = _flow(sys, x, eta, tol)
    closure = float(np.linalg.norm(x_full - x))
    if closure > 1000.0 * shoot_tol * max(1.0, np.linalg.norm(x)):
        raise NoConvergenceError(
            f"half-period condition met but the orbit does not close "
            f"(residual {closure:.3e})"
        )
    return SymmetricOrbit(
        x=x, eta=eta, energy=float(sys.hamiltonian(x)), residual=closure
    )


def build_transverse_section(
    sys: HamiltonianSystem,
    orbit: SymmetricOrbit,
    rng_seed=0,
    max_tries: int = 50,
    w_vector=None,
) -> TransverseSection:
    """Transverse symplectic subspace V and its adapted basis at orbit.x.

    v = w + rho w for a sampled w with |dH(x) v| bounded away from zero;
    V is the omega-orthogonal complement of span{v, X_H(x)}; the restricted
    involution splits V into eigenspaces L+ and L- of equal dimension, and
    the basis of L- is the one dual to L+ under omega (the cotangent
    identification), so omega(e_i, f_j) = delta_ij.

    V itself depends on the sampled w (only the computed indices are
    invariants); pass ``w_vector`` to pin a specific transversal, e.g. for
    closed-form comparisons.
    """
    x = orbit.x
    dim = sys.dim
    n = dim // 2 - 1
    j = sys.structure_matrix()
    rho = sys.involution
    grad = sys.gradient(x)
    grad_norm = np.linalg.norm(grad)
    if grad_norm < 1e-10:
        raise CriticalPointError("Hamiltonian gradient vanishes on the orbit")
    x_h = sys.vector_field(x)

    rng = np.random.default_rng(rng_seed)
    v = None
    for attempt in range(max_tries):
        w = np.asarray(w_vector, dtype=float) if w_vector is not None else rng.normal(size=dim)
        cand = w + rho @ w
        norm = np.linalg.norm(cand)
        if norm >= 1e-8:
            cand = cand / norm
            if abs(grad @ cand) > 1e-6 * grad_norm:
                v = cand
                break
        if w_vector is not None:
            raise DegenerateTransversalError(
                "supplied w gives a transversal with |dH v| below threshold"
            )
    if v is None:
        raise DegenerateTransversalError(
            f"no transversal vector with |dH v| > 1e-6 ||grad H|| in {max_tries} draws"
        )

    # V = ker [ (J v)^T ; (J X_H)^T ]: omega(z, v) = omega(z, X_H) = 0.
    constraints = np.vstack([(j @ v), (j @ x_h)])
    _, svals, vt = np.linalg.svd(constraints)
    null_dim = dim - int(np.sum(svals > 1e-12 * max(1.0, svals[0])))
    if null_dim != 2 * n:
        raise DegenerateTransversalError(
            f"transverse subspace has dimension {null_dim}, expected {2 * n}"
        )
    v_basis = vt[2:, :].T  # (dim, 2n), orthonormal

    # Restricted involution in V coordinates.
    r_coords = v_basis.T @ rho @ v_basis
    if linalg.inf_norm(v_basis @ r_coords - rho @ v_basis) > 1e-9:
        raise UnequalEigenspacesError("V is not invariant under the involution")
    plus = v_basis @ involution_eigenspace(r_coords, +1)
    minus = v_basis @ involution_eigenspace(r_coords, -1)
    if plus.shape[1] != n or minus.shape[1] != n:
        raise UnequalEigenspacesError(
            f"eigenspace dimensions ({plus.shape[1]}, {minus.shape[1]}) differ from n = {n}"
        )

    # Dual basis on L-: omega(e_i, f_j) = delta_ij.
    pairing = plus.T @ j @ minus  # (n, n)
    cond = np.linalg.cond(pairing)
    if not np.isfinite(cond) or cond > 1e10:
        raise ProjectionIllConditionedError(
            f"omega pairing between eigenspaces has condition {cond:.3e}"
        )
    minus_dual = minus @ np.linalg.solve(pairing, np.eye(n))
    basis = np.column_stack([plus, minus_dual])
    return TransverseSection(
        basis_plus=plus,
        basis_minus=minus_dual,
        v_aux=v,
        symplectic_basis_matrix=basis,
    )


def reduced_monodromy(
    sys: HamiltonianSystem,
    orbit: SymmetricOrbit,
    section: TransverseSection,
    tol: float = 1e-11,
) -> ReturnMapBlocks:
    """Monodromy restricted to V, expressed in the adapted basis.

    The coefficients are extracted with omega pairings: for z in the tangent
    space of the energy level, omega(z, f_i) reads off the e_i coefficient
    and -omega(z, e_i) the f_i coefficient, because e, f are symplectically
    dual and both are omega-orthogonal to X_H and v.  The residual of the
    reconstruction (everything of M S not accounted for by the section and
    the flow direction) guards the projection.
    """
    x = orbit.x
    j = sys.structure_matrix()
    _, fund = integrate_with_variations(sys, x, orbit.eta, tol)
    basis = section.symplectic_basis_matrix
    n = basis.shape[1] // 2
    e_cols = basis[:, :n]
    f_cols = basis[:, n:]
    images = fund @ basis  # (dim, 2n)
    upper = f_cols.T @ j.T @ images  # omega(image, f_i) = image^T J f = (f^T J^T image)
    lower = -(e_cols.T @ j.T @ images)
    coords = np.vstack([upper, lower])  # (2n, 2n)

    # Reconstruction residual: image minus its section part must lie in
    # span{X_H, v}.
    recon = basis @ coords
    leftover = images - recon
    x_h = sys.vector_field(x)
    span = np.column_stack([x_h, section.v_aux])
    coeff, *_ = np.linalg.lstsq(span, leftover, rcond=None)
    resid = linalg.inf_norm(leftover - span @ coeff)
    scale = max(1.0, linalg.inf_norm(images))
    if resid > 1e-6 * scale:
        raise ProjectionIllConditionedError(
            f"projection residual {resid:.3e} exceeds 1e-6 * {scale:.3e}"
        )
    return ReturnMapBlocks.from_matrix(coords)
