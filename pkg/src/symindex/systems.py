"""Sample Hamiltonian systems carrying a linear antisymplectic involution.

Two desk-scale systems on R^4 (phase order q1, q2, p1, p2):

  * an anisotropic planar oscillator, exactly solvable, used as ground
    truth for the whole pipeline;
  * the Henon-Heiles system with its reflection symmetry, a nontrivial
    nonlinear test case.

The involution rho is a linear map with rho^2 = I and rho^T J rho = -J that
leaves the Hamiltonian invariant; its fixed-point set hosts the symmetric
orbits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linalg
from .errors import MalformedInputError


def involution_eigenspace(rho, sign: int) -> np.ndarray:
    """Orthonormal basis of the (+1 or -1) eigenspace of an involution,
    extracted from the projector (I + sign * rho)/2; works whether or not
    rho is symmetric."""
    rho = np.asarray(rho, dtype=float)
    proj = 0.5 * (np.eye(rho.shape[0]) + sign * rho)
    u, s, _ = np.linalg.svd(proj)
    return u[:, s > 0.5]


@dataclass(frozen=True)
class HamiltonianSystem:
    """An autonomous Hamiltonian on R^dim with a linear antisymplectic
    involution."""

    name: str
    dim: int
    hamiltonian: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    involution: np.ndarray
    meta: dict = field(default_factory=dict)

    def vector_field(self, x) -> np.ndarray:
        """X_H = J grad H (convention dH = omega(X_H, .))."""
        return self.structure_matrix() @ self.gradient(np.asarray(x, dtype=float))

    def structure_matrix(self) -> np.ndarray:
        return linalg.standard_j(self.dim // 2)

    def fixed_set_basis(self) -> np.ndarray:
        """Orthonormal basis of Fix(rho) = ker(rho - I), via the range of
        the projector (I + rho)/2 (valid for any linear involution)."""
        return involution_eigenspace(self.involution, +1)


def validate_system(sys: HamiltonianSystem, rng_seed=0, samples: int = 25, tol: float = 1e-10):
    """Spot-check the structural invariants on random phase points:
    rho^2 = I, rho^T J rho = -J, H(rho x) = H(x), rho X_H(rho x) = -X_H(x),
    and agreement of gradient/hessian with finite differences."""
    rho = sys.involution
    j = sys.structure_matrix()
    eye = np.eye(sys.dim)
    if linalg.inf_norm(rho @ rho - eye) > 1e-12:
        raise MalformedInputError("involution is not an involution")
    if linalg.inf_norm(rho.T @ j @ rho + j) > 1e-12:
        raise MalformedInputError("involution is not antisymplectic")
    rng = np.random.default_rng(rng_seed)
    for _ in range(samples):
        x = rng.uniform(-0.6, 0.6, size=sys.dim)
        if abs(sys.hamiltonian(rho @ x) - sys.hamiltonian(x)) > tol * max(
            1.0, abs(sys.hamiltonian(x))
        ):
            raise MalformedInputError("Hamiltonian is not involution invariant")
        anti = rho @ sys.vector_field(rho @ x) + sys.vector_field(x)
        if linalg.inf_norm(anti) > tol * max(1.0, linalg.inf_norm(sys.vector_field(x))):
            raise MalformedInputError("vector field is not anti-invariant")
        # Finite-difference check of the supplied derivatives.
        h = 1e-6
        grad = sys.gradient(x)
        for i in range(sys.dim):
            e = np.zeros(sys.dim)
            e[i] = h
            fd = (sys.hamiltonian(x + e) - sys.hamiltonian(x - e)) / (2 * h)
            if abs(fd - grad[i]) > 1e-6 * max(1.0, abs(grad[i])):
                raise MalformedInputError(f"gradient component {i} disagrees with quotient")


def oscillator_system(omega1: float = 1.0, omega2: float = 2.0) -> HamiltonianSystem:
    """H = (p1^2 + p2^2)/2 + (omega1^2 q1^2 + omega2^2 q2^2)/2 with the
    involution (q1, q2, p1, p2) -> (q1, -q2, -p1, p2).

    Fix(rho) = {(q1, 0, 0, p2)}; the q1 normal mode through a turning point
    (a, 0, 0, 0) is a symmetric periodic orbit with period 2 pi / omega1, and
    the transverse dynamics is the (q2, p2) oscillator.
    """
    if omega1 <= 0 or omega2 <= 0:
        raise MalformedInputError("oscillator frequencies must be positive")
    w1sq, w2sq = omega1**2, omega2**2

    def ham(x):
        q1, q2, p1, p2 = x
        return 0.5 * (p1 * p1 + p2 * p2) + 0.5 * (w1sq * q1 * q1 + w2sq * q2 * q2)

    def grad(x):
        q1, q2, p1, p2 = x
        return np.array([w1sq * q1, w2sq * q2, p1, p2])

    hess_const = np.diag([w1sq, w2sq, 1.0, 1.0])

    def hess(x):
        return hess_const.copy()

    return HamiltonianSystem(
        name=f"oscillator:{omega1}:{omega2}",
        dim=4,
        hamiltonian=ham,
        gradient=grad,
        hessian=hess,
        involution=np.diag([1.0, -1.0, -1.0, 1.0]),
        meta={"omega1": omega1, "omega2": omega2},
    )


def henon_heiles_system() -> HamiltonianSystem:
    """H = (p1^2 + p2^2)/2 + (q1^2 + q2^2)/2 + q1^2 q2 - q2^3 / 3 with the
    reflection involution (q1, q2, p1, p2) -> (-q1, q2, p1, -p2).

    Fix(rho) = {(0, q2, p1, 0)}; the q2-axis brake orbit through a turning
    point (0, y, 0, 0) is symmetric.  Bounded motion requires energies below
    the escape value 1/6.
    """

    def ham(x):
        q1, q2, p1, p2 = x
        return (
            0.5 * (p1 * p1 + p2 * p2)
            + 0.5 * (q1 * q1 + q2 * q2)
            + q1 * q1 * q2
            - q2**3 / 3.0
        )

    def grad(x):
        q1, q2, p1, p2 = x
        return np.array(
            [q1 + 2.0 * q1 * q2, q2 + q1 * q1 - q2 * q2, p1, p2]
        )

    def hess(x):
        q1, q2, _, _ = x
        out = np.zeros((4, 4))
        out[0, 0] = 1.0 + 2.0 * q2
        out[0, 1] = out[1, 0] = 2.0 * q1
        out[1, 1] = 1.0 - 2.0 * q2
        out[2, 2] = out[3, 3] = 1.0
        return out

    return HamiltonianSystem(
        name="henon-heiles",
        dim=4,
        hamiltonian=ham,
        gradient=grad,
        hessian=hess,
        involution=np.diag([-1.0, 1.0, 1.0, -1.0]),
        meta={"escape_energy": 1.0 / 6.0},
    )


def henon_heiles_brake_seed(energy: float) -> np.ndarray:
    """Turning point (0, y, 0, 0) of the q2-axis brake orbit at the given
    energy: y^2/2 - y^3/3 = energy with 0 < y < 1."""
    if not 0.0 < energy < 1.0 / 6.0:
        raise MalformedInputError(
            f"brake-orbit energy must lie in (0, 1/6), got {energy}"
        )
    # Monotone on (0, 1): bisect.
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * mid / 2 - mid**3 / 3 < energy:
            lo = mid
        else:
            hi = mid
    return np.array([0.0, 0.5 * (lo + hi), 0.0, 0.0])


def parse_system_spec(spec: str) -> HamiltonianSystem:
    """CLI system descriptor: 'oscillator:<omega1>:<omega2>' or
    'henon-heiles[:<energy>]' (the energy only seeds defaults)."""
    parts = spec.split(":")
    if parts[0] == "oscillator":
        if len(parts) != 3:
            raise MalformedInputError(
                "oscillator spec must be 'oscillator:<omega1>:<omega2>'"
            )
        try:
            return oscillator_system(float(parts[1]), float(parts[2]))
        except ValueError as exc:
            raise MalformedInputError(f"bad oscillator frequencies: {exc}") from exc
    if parts[0] == "henon-heiles":
        if len(parts) > 2:
            raise MalformedInputError("henon-heiles spec takes at most one parameter")
        sys = henon_heiles_system()
        if len(parts) == 2:
            try:
                sys.meta["energy"] = float(parts[1])
            except ValueError as exc:
                raise MalformedInputError(f"bad energy: {exc}") from exc
        return sys
    raise MalformedInputError(f"unknown system '{parts[0]}'")
