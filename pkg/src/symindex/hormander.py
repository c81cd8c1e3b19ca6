"""Hörmander index of a symmetric return map: closed formula and the
quadratic-form oracle.

The closed formula evaluates

    s(k) = 1/2 * sign( (I - T_k(A)) U_{k-1}(A)^{-1} C^{-1} )

for the k-th iterate of a symmetric return map with blocks (A, B, C, A^T).
The quadratic-form oracle recomputes s for a single symplectic matrix Phi
from first principles, without the block formula: it parametrizes L x L over
the diagonal of the product space (V x V, (-omega) x omega) by a linear map
into the graph of Phi, assembles the associated quadratic form Q, and
returns -1/2 * sign(Q).  The relative sign between the two routes is fixed
once by the n = 1 elliptic family and frozen by tests.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import linalg
from .chebyshev import ChebKind, cheb_matrix
from .errors import (
    AsymmetryTooLargeError,
    CSingularError,
    DegenerateFormError,
    IllConditionedError,
    IterateDegenerateError,
    NotTransverseError,
    OddDimensionError,
    QNotSymmetricError,
)
from .halfint import HalfInteger
from .linalg import Inertia
from .returnmap import ReturnMapBlocks

#: Relative singularity threshold for the C and U_{k-1}(A) factors.
SINGULARITY_RTOL = 1e-12

#: Relative asymmetry allowed in the sign matrix before the input is
#: declared invalid rather than symmetrized.
ASYMMETRY_RTOL = 1e-7


class IndexMethod(enum.Enum):
    FORMULA = "formula"
    QUADRATIC_FORM = "qform"
    PATH_DIFFERENCE = "paths"


@dataclass(frozen=True)
class IndexResult:
    """An index value for iterate k together with how it was computed."""

    k: int
    s: HalfInteger
    sign_matrix_inertia: Inertia | None
    method: IndexMethod

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "s": self.s.to_json(),
            "sign_matrix_inertia": (
                None if self.sign_matrix_inertia is None else self.sign_matrix_inertia.to_json()
            ),
            "method": self.method.value,
        }


def _check_invertible(m, what: str, exc_type):
    """Smallest-singular-value test with a unit floor on the scale, so a
    matrix that is tiny in absolute terms (e.g. U_{k-1}(A) at a root) counts
    as singular; raises ``exc_type`` on failure."""
    svals = np.linalg.svd(m, compute_uv=False)
    scale = max(float(svals[0]), 1.0)
    if svals[-1] <= SINGULARITY_RTOL * scale * m.shape[0]:
        raise exc_type(
            f"{what} is numerically singular (sigma_min = {float(svals[-1]):.3e}, "
            f"scale = {scale:.3e})"
        )


def hormander_sign_matrix(blocks: ReturnMapBlocks, k: int = 1) -> np.ndarray:
    """The symmetrized matrix (I - T_k(A)) U_{k-1}(A)^{-1} C^{-1}.

    The product is symmetric in exact arithmetic for valid blocks (it is a
    rational function of A times C^{-1}, and A^T C = C A); asymmetry beyond
    ASYMMETRY_RTOL therefore signals invalid input and raises instead of
    being averaged away.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    _check_invertible(blocks.c, "block C", CSingularError)
    u_km1 = cheb_matrix(ChebKind.SECOND, k - 1, blocks.a)
    _check_invertible(u_km1, f"U_{k - 1}(A)", IterateDegenerateError)
    t_k = cheb_matrix(ChebKind.FIRST, k, blocks.a)
    eye = np.eye(blocks.n)
    try:
        m = linalg.guarded_solve(
            (blocks.c @ u_km1).T, (eye - t_k).T
        ).T  # (I - T_k) (C U_{k-1})^{-1}, solved without forming inverses
    except IllConditionedError as exc:
        raise CSingularError(str(exc)) from exc
    asym = linalg.inf_norm(m - m.T)
    if asym > ASYMMETRY_RTOL * max(linalg.inf_norm(m), 1e-300):
        raise AsymmetryTooLargeError(
            f"sign matrix asymmetry {asym:.3e} exceeds {ASYMMETRY_RTOL:.1e} * ||M||; "
            "input blocks are inconsistent"
        )
    return 0.5 * (m + m.T)


def hormander_index_formula(
    blocks: ReturnMapBlocks,
    k: int = 1,
    tol: float | None = None,
) -> IndexResult:
    """s(k) = 1/2 * sign((I - T_k(A)) U_{k-1}(A)^{-1} C^{-1}) as an exact
    half-integer.

    Requires the iterate to be nondegenerate: det(Phi^k - I) must clear the
    scale-aware threshold, U_{k-1}(A) and C must be invertible, and the sign
    matrix must have no eigenvalue inside the zero threshold.
    """
    phi = blocks.assemble()
    power = np.linalg.matrix_power(phi, k)
    det_k = float(np.linalg.det(power - np.eye(2 * blocks.n)))
    det_thresh = 1e-10 * max(1.0, linalg.inf_norm(phi) ** k)
    if abs(det_k) <= det_thresh:
        raise IterateDegenerateError(
            f"det(Phi^{k} - I) = {det_k:.3e} inside threshold {det_thresh:.1e}"
        )
    m = hormander_sign_matrix(blocks, k)
    ine = linalg.inertia(m, tol)
    if ine.n_zero > 0:
        raise DegenerateFormError(
            f"sign matrix for iterate {k} has {ine.n_zero} near-zero eigenvalue(s)"
        )
    return IndexResult(
        k=k,
        s=HalfInteger(ine.signature),
        sign_matrix_inertia=ine,
        method=IndexMethod.FORMULA,
    )


def closed_form_v(blocks: ReturnMapBlocks, u2) -> tuple[np.ndarray, np.ndarray]:
    """The correction vector v with (u + v, u + Phi v) in L x L, and Phi v.

    v(u) = ((A - I) C^{-1} u2, -u2) and Phi v(u) = ((I - A) C^{-1} u2, -u2);
    both depend on u only through its second component u2.
    """
    u2 = np.asarray(u2, dtype=float).reshape(blocks.n)
    _check_invertible(blocks.c, "block C", CSingularError)
    w = linalg.guarded_solve(blocks.c, u2)
    top = blocks.a @ w - w  # (A - I) C^{-1} u2
    v = np.concatenate([top, -u2])
    phi_v = np.concatenate([-top, -u2])
    return v, phi_v


def duistermaat_form(phi, tol: float | None = None) -> np.ndarray:
    """Assemble the quadratic form Q used by the quadratic-form oracle.

    For each basis vector u of R^2n, the vector v with
    (u + v, u + Phi v) in L x L is obtained by a generic linear solve of

        [[0, I], [Phi_21, Phi_22]] v = (-u2, -u2),

    never through the closed form.  Q(z, z') = Omega(z, Gamma z') with
    z = (u, u) on the diagonal, Gamma z = (v, Phi v) and
    Omega = (-omega) x omega.  Q is symmetric for symplectic input; the
    symmetry check is performed by the caller.
    """
    phi = linalg.require_square(phi, "symplectic matrix")
    dim = phi.shape[0]
    if dim % 2 != 0:
        raise OddDimensionError(f"expected even dimension, got {dim}")
    n = dim // 2
    j = linalg.standard_j(n)
    # Solve for all basis vectors at once: rows n..2n-1 of u are u2.
    k_mat = np.zeros((dim, dim))
    k_mat[:n, n:] = np.eye(n)
    k_mat[n:, :] = phi[n:, :]
    rhs = np.zeros((dim, dim))
    rhs[:n, n:] = -np.eye(n)
    rhs[n:, n:] = -np.eye(n)
    try:
        v_cols = linalg.guarded_solve(k_mat, rhs)
    except IllConditionedError as exc:
        raise CSingularError(
            "L x L is not transverse to the graph of Phi (the correction solve "
            f"is singular): {exc}"
        ) from exc
    phi_v = phi @ v_cols
    # Q_ij = Omega((e_i, e_i), (v_j, Phi v_j)) = -omega(e_i, v_j) + omega(e_i, Phi v_j)
    return -(j @ v_cols) + (j @ phi_v)


def hormander_index_quadratic_form(
    phi,
    tol: float | None = None,
    k: int = 1,
) -> IndexResult:
    """First-principles index of a symplectic matrix with det(Phi - I) != 0.

    Returns s = -1/2 * sign(Q); the global sign is the one that matches the
    closed formula on the n = 1 elliptic family.  Q has exactly n structural
    zero eigenvalues (the form lives on the u2 coordinates); any other count
    raises DegenerateFormError.  ``k`` only labels the result; pass Phi^k to
    compute the index of an iterate.
    """
    phi = linalg.require_square(phi, "symplectic matrix")
    dim = phi.shape[0]
    n = dim // 2
    det = float(np.linalg.det(phi - np.eye(dim)))
    det_thresh = 1e-10 * max(1.0, linalg.inf_norm(phi))
    if abs(det) <= det_thresh:
        raise NotTransverseError(
            f"det(Phi - I) = {det:.3e} inside threshold {det_thresh:.1e}"
        )
    q = duistermaat_form(phi, tol)
    scale = max(linalg.inf_norm(q), 1e-300)
    sym_tol = tol if tol is not None else 1e-8
    if linalg.inf_norm(q - q.T) > sym_tol * scale:
        raise QNotSymmetricError(
            f"assembled form asymmetry {linalg.inf_norm(q - q.T):.3e} exceeds "
            f"{sym_tol:.1e} * ||Q||; input is not symplectic"
        )
    q = 0.5 * (q + q.T)
    ine = linalg.inertia(q, tol)
    if ine.n_zero != n:
        raise DegenerateFormError(
            f"form has {ine.n_zero} zero eigenvalue(s), expected the {n} "
            "structural ones; the index is not determined"
        )
    return IndexResult(
        k=k,
        s=HalfInteger(-ine.signature),
        sign_matrix_inertia=ine,
        method=IndexMethod.QUADRATIC_FORM,
    )


def iterate_index_formula(blocks: ReturnMapBlocks, k_max: int, tol: float | None = None):
    """Formula results for k = 1..k_max; errors are captured per iterate.

    Returns a list of (k, IndexResult | SymindexError).
    """
    out = []
    for k in range(1, k_max + 1):
        try:
            out.append((k, hormander_index_formula(blocks, k, tol)))
        except (CSingularError, IterateDegenerateError, DegenerateFormError,
                AsymmetryTooLargeError) as exc:
            out.append((k, exc))
    return out
