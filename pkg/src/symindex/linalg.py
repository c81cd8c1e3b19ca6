"""Dense real-matrix utilities specialized for symplectic computations.

Everything here is small and dense (n <= 10 in practice): inertia and
signature of symmetric matrices, symplecticity tests against the standard
structure matrix of the splitting R^n x R^n, the block formula for the
inverse of a symplectic matrix, and a condition-guarded linear solve.

All functions are pure and never mutate their arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateFormError,
    DimensionMismatchError,
    IllConditionedError,
    NonFiniteError,
    NonSquareError,
    NotSymplecticError,
    OddDimensionError,
)

#: Relative eigenvalue zero-threshold used when the caller passes tol=None.
DEFAULT_TOL_FACTOR = 1e-8

#: Condition-number guard for linear solves; index outputs are discrete, so
#: silently ill-conditioned solves are never acceptable.
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class Inertia:
    """Eigenvalue sign counts of a symmetric matrix."""

    n_pos: int
    n_neg: int
    n_zero: int

    @property
    def dimension(self) -> int:
        return self.n_pos + self.n_neg + self.n_zero

    @property
    def signature(self) -> int:
        return self.n_pos - self.n_neg

    def to_json(self) -> dict:
        return {"n_pos": self.n_pos, "n_neg": self.n_neg, "n_zero": self.n_zero}


def inf_norm(m) -> float:
    """Entrywise max-abs norm used for all residual tests."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m)))


def require_square(m, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonSquareError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError(f"{name} contains non-finite entries")
    return m


def default_tol(m, tol: float | None) -> float:
    if tol is not None:
        if tol <= 0:
            raise ValueError(f"tol must be positive, got {tol}")
        return tol
    return DEFAULT_TOL_FACTOR * max(1.0, inf_norm(m))


def inertia(m, tol: float | None = None) -> Inertia:
    """Count eigenvalues of (M + M^T)/2 above tol, below -tol, and inside
    [-tol, tol].

    The caller is expected to pass a matrix that is symmetric up to
    roundoff; the explicit symmetrization only removes that roundoff.
    """
    m = require_square(m, "inertia input")
    tol = default_tol(m, tol)
    sym = 0.5 * (m + m.T)
    eigs = np.linalg.eigvalsh(sym)
    n_pos = int(np.sum(eigs > tol))
    n_neg = int(np.sum(eigs < -tol))
    return Inertia(n_pos, n_neg, m.shape[0] - n_pos - n_neg)


def signature(m, tol: float | None = None) -> int:
    """Signature n_pos - n_neg of a symmetric matrix.

    Raises DegenerateFormError when any eigenvalue falls inside the zero
    threshold: a near-zero eigenvalue means the discrete index downstream is
    not determined, and must never be rounded to a sign.
    """
    ine = inertia(m, tol)
    if ine.n_zero > 0:
        raise DegenerateFormError(
            f"form has {ine.n_zero} eigenvalue(s) inside the zero threshold"
        )
    return ine.signature


def standard_j(n: int) -> np.ndarray:
    """Structure matrix J of the splitting R^n x R^n: omega(u, v) = u^T J v,
    with omega(e_i, f_j) = delta_ij for the basis (e, f) of the two factors."""
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    return j


def is_symplectic(phi, tol: float = 1e-9) -> bool:
    """True iff ||Phi^T J Phi - J||_inf <= tol."""
    phi = require_square(phi, "symplectic candidate")
    if phi.shape[0] % 2 != 0:
        raise OddDimensionError(f"symplectic matrices have even size, got {phi.shape[0]}")
    n = phi.shape[0] // 2
    j = standard_j(n)
    return inf_norm(phi.T @ j @ phi - j) <= tol


def split_blocks(phi) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Split a 2n x 2n matrix into its four n x n blocks (A, B, C, D)."""
    phi = require_square(phi, "block matrix")
    if phi.shape[0] % 2 != 0:
        raise OddDimensionError(f"cannot split odd size {phi.shape[0]} into blocks")
    n = phi.shape[0] // 2
    return (
        phi[:n, :n].copy(),
        phi[:n, n:].copy(),
        phi[n:, :n].copy(),
        phi[n:, n:].copy(),
    )


def assemble_blocks(a, b, c, d) -> np.ndarray:
    """Assemble four n x n blocks into [[A, B], [C, D]]."""
    a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
    shapes = {a.shape, b.shape, c.shape, d.shape}
    if len(shapes) != 1 or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"blocks must share a square shape, got {shapes}")
    return np.block([[a, b], [c, d]])


def symplectic_inverse(phi, tol: float = 1e-8) -> np.ndarray:
    """Inverse of a symplectic matrix from its block structure.

    For Phi = [[A, B], [C, D]] symplectic, the inverse is
    [[D^T, -B^T], [-C^T, A^T]]; no factorization is needed and the result is
    exact up to the rounding already present in the blocks.
    """
    phi = require_square(phi, "symplectic matrix")
    scale = max(1.0, inf_norm(phi) ** 2)
    if not is_symplectic(phi, tol * scale):
        raise NotSymplecticError("matrix is not symplectic within tolerance")
    a, b, c, d = split_blocks(phi)
    return assemble_blocks(d.T, -b.T, -c.T, a.T)


def guarded_solve(a, b, cond_limit: float = CONDITION_LIMIT) -> np.ndarray:
    """Solve a x = b by partial-pivot factorization with a conditioning guard.

    Raises IllConditionedError if the 2-norm condition number of ``a``
    exceeds ``cond_limit``; downstream outputs are discrete indices and an
    unreliable solve must surface as an error.
    """
    a = require_square(a, "solve matrix")
    b = np.asarray(b, dtype=float)
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > cond_limit:
        raise IllConditionedError(f"condition number {cond:.3e} exceeds {cond_limit:.1e}")
    return np.linalg.solve(a, b)


def guarded_inverse(a, cond_limit: float = CONDITION_LIMIT) -> np.ndarray:
    a = require_square(a, "inverse input")
    return guarded_solve(a, np.eye(a.shape[0]), cond_limit)
