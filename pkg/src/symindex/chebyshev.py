"""Chebyshev polynomials of the first and second kind, scalar and matrix.

Evaluation is by the three-term forward recurrence

    T_0 = 1,  T_1 = x,   T_{k+1} = 2 x T_k - T_{k-1}
    U_0 = 1,  U_1 = 2x,  U_{k+1} = 2 x U_k - U_{k-1}

because the recurrence extends verbatim to square matrices (constants become
the identity).  The trigonometric closed forms T_k(cos a) = cos(k a) and
U_k(cos a) = sin((k+1) a) / sin(a) are provided only as a cross-check.

The block formula for iterates of a symmetric return map lives here too:

    Phi^k = [[T_k(A), U_{k-1}(A) B], [C U_{k-1}(A), T_k(A^T)]].
"""

from __future__ import annotations

import enum

import numpy as np

from . import linalg
from .errors import InvalidBlocksError, SymindexError
from .returnmap import ReturnMapBlocks, validate_blocks


class ChebKind(enum.Enum):
    FIRST = "first"
    SECOND = "second"


class AlphaDegenerateError(SymindexError):
    """sin(alpha) is too small for the closed form U_k(cos a)."""


def cheb_scalar(kind: ChebKind, k: int, x: float) -> float:
    """T_k(x) or U_k(x) by forward recurrence."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    prev = 1.0
    cur = float(x) if kind is ChebKind.FIRST else 2.0 * float(x)
    if k == 0:
        return prev
    for _ in range(k - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


def cheb_matrix(kind: ChebKind, k: int, a) -> np.ndarray:
    """T_k(A) or U_k(A): the recurrence with x replaced by A and 1 by I."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    a = linalg.require_square(a, "Chebyshev argument")
    eye = np.eye(a.shape[0])
    prev = eye
    cur = a.copy() if kind is ChebKind.FIRST else 2.0 * a
    if k == 0:
        return prev
    for _ in range(k - 1):
        prev, cur = cur, 2.0 * (a @ cur) - prev
    return cur


def cheb_trig_reference(k: int, alpha: float) -> tuple[float, float]:
    """(cos(k a), sin((k+1) a) / sin(a)): the closed forms at x = cos(a)."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    s = np.sin(alpha)
    if abs(s) < 1e-12:
        raise AlphaDegenerateError(f"|sin(alpha)| = {abs(s):.3e} below 1e-12")
    return float(np.cos(k * alpha)), float(np.sin((k + 1) * alpha) / s)


def iterate_blocks(
    blocks: ReturnMapBlocks,
    k: int,
    validate_tol: float | None = 1e-6,
) -> ReturnMapBlocks:
    """Blocks of Phi^k: (T_k(A), U_{k-1}(A) B, C U_{k-1}(A), T_k(A)^T).

    The output satisfies the symmetric return-map identities again.  Set
    ``validate_tol`` to None to skip input validation (for callers that just
    validated).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if validate_tol is not None:
        report = validate_blocks(blocks, validate_tol)
        if not report.passed:
            raise InvalidBlocksError(
                f"input blocks violate the return-map identities "
                f"(max residual {report.max_residual:.3e} > {validate_tol:.1e})"
            )
    t_k = cheb_matrix(ChebKind.FIRST, k, blocks.a)
    u_km1 = cheb_matrix(ChebKind.SECOND, k - 1, blocks.a)
    return ReturnMapBlocks(
        blocks.n,
        t_k,
        u_km1 @ blocks.b,
        blocks.c @ u_km1,
        t_k.T.copy(),
    )
