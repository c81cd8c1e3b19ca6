"""Symmetric return maps and their block structure.

The linearized return map Phi of a symmetric periodic orbit, written in a
symplectic basis adapted to the +1/-1 eigenspaces of the reversal R =
diag(I, -I), has n x n blocks A, B, C, D that satisfy

    D = A^T,  B = B^T,  C = C^T,  AB = BA^T,  A^T C = CA,  A^2 - BC = I,

together with symplecticity of the assembled matrix and the reversal
relation Phi = R Phi^{-1} R.  (Equivalently: AB and A^T C are symmetric.
The variant "AC = CA^T" sometimes seen instead of A^T C = CA is false on
this constraint set for n >= 2; expanding Phi^{-1} Phi = I with the block
inverse gives A^T C = C^T A, and the reversal relation symmetrizes C.)

This module provides the block container, residual-based validation of all
of these identities, a total random generator that enforces them by
construction, and the nondegeneracy report det(Phi^k - I) for a range of
iterates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DimensionMismatchError, MalformedInputError, NonFiniteError

#: Residual tolerance the generator guarantees for its output.
GENERATOR_TOL = 1e-8


@dataclass(frozen=True)
class ReturnMapBlocks:
    """The four n x n blocks of a symmetric return map Phi = [[A, B], [C, D]]."""

    n: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            m = np.asarray(getattr(self, name), dtype=float)
            if m.shape != (self.n, self.n):
                raise DimensionMismatchError(
                    f"block {name.upper()} has shape {m.shape}, expected {(self.n, self.n)}"
                )
            if not np.all(np.isfinite(m)):
                raise NonFiniteError(f"block {name.upper()} contains non-finite entries")
            object.__setattr__(self, name, m)

    def assemble(self) -> np.ndarray:
        return linalg.assemble_blocks(self.a, self.b, self.c, self.d)

    @classmethod
    def from_matrix(cls, phi) -> "ReturnMapBlocks":
        a, b, c, d = linalg.split_blocks(phi)
        return cls(a.shape[0], a, b, c, d)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "A": self.a.tolist(),
            "B": self.b.tolist(),
            "C": self.c.tolist(),
            "D": self.d.tolist(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ReturnMapBlocks":
        """Load from {"n", "A", "B", "C", "D"} or {"n", "Phi"} (2n x 2n)."""
        if not isinstance(doc, dict):
            raise MalformedInputError("blocks document must be a JSON object")
        try:
            n = int(doc["n"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError("blocks document needs an integer field 'n'") from exc
        if n < 1:
            raise MalformedInputError(f"n must be >= 1, got {n}")
        if "Phi" in doc:
            phi = np.asarray(doc["Phi"], dtype=float)
            if phi.shape != (2 * n, 2 * n):
                raise MalformedInputError(
                    f"field 'Phi' has shape {phi.shape}, expected {(2 * n, 2 * n)}"
                )
            return cls.from_matrix(phi)
        missing = [k for k in ("A", "B", "C", "D") if k not in doc]
        if missing:
            raise MalformedInputError(f"blocks document is missing fields {missing}")
        try:
            mats = [np.asarray(doc[k], dtype=float) for k in ("A", "B", "C", "D")]
        except (TypeError, ValueError) as exc:
            raise MalformedInputError("block entries must be numeric arrays") from exc
        for k, m in zip("ABCD", mats):
            if m.shape != (n, n):
                raise MalformedInputError(f"field '{k}' has shape {m.shape}, expected {(n, n)}")
        return cls(n, *mats)


def reversal_matrix(n: int) -> np.ndarray:
    """R = diag(I_n, -I_n), the linear antisymplectic involution in the
    adapted basis."""
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)]))


@dataclass(frozen=True)
class ValidationReport:
    """Max-abs residuals of the block identities, plus symplecticity and the
    reversal relation Phi = R Phi^{-1} R."""

    residuals: dict
    tol: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def to_json(self) -> dict:
        return {"tol": self.tol, "passed": self.passed, "residuals": dict(self.residuals)}


def validate_blocks(blocks: ReturnMapBlocks, tol: float = GENERATOR_TOL) -> ValidationReport:
    """Residuals of the six block identities and symplecticity.

    The report also carries the reversal-relation residual as a diagnostic;
    it is implied by the identities but measured directly.
    """
    a, b, c, d = blocks.a, blocks.b, blocks.c, blocks.d
    eye = np.eye(blocks.n)
    phi = blocks.assemble()
    j = linalg.standard_j(blocks.n)
    r = reversal_matrix(blocks.n)
    # Phi^{-1} through the symplectic block formula keeps this check
    # independent of a generic inverse.
    phi_inv = linalg.assemble_blocks(d.T, -b.T, -c.T, a.T)
    residuals = {
        "d_equals_a_transpose": linalg.inf_norm(d - a.T),
        "b_symmetric": linalg.inf_norm(b - b.T),
        "c_symmetric": linalg.inf_norm(c - c.T),
        "ab_balanced": linalg.inf_norm(a @ b - b @ a.T),
        "atc_balanced": linalg.inf_norm(a.T @ c - c @ a),
        "a2_minus_bc": linalg.inf_norm(a @ a - b @ c - eye),
        "symplectic": linalg.inf_norm(phi.T @ j @ phi - j),
        "reversal": linalg.inf_norm(phi - r @ phi_inv @ r),
    }
    return ValidationReport(residuals=residuals, tol=tol)


def random_symplectic(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random 2n x 2n symplectic matrix built from elementary factors.

    Product of an upper shear [[I, S1], [0, I]], a block-diagonal factor
    [[P, 0], [0, P^{-T}]] with P orthogonal, and a lower shear
    [[I, 0], [S2, I]].  Shear entries are uniform in (-scale, scale); each
    factor is exactly symplectic, so the product is too.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    eye = np.eye(n)
    zero = np.zeros((n, n))

    def sym(mat):
        return 0.5 * (mat + mat.T)

    s1 = sym(rng.uniform(-scale, scale, size=(n, n)))
    s2 = sym(rng.uniform(-scale, scale, size=(n, n)))
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    q = q @ np.diag(np.sign(np.diag(r)))
    upper = np.block([[eye, s1], [zero, eye]])
    lower = np.block([[eye, zero], [s2, eye]])
    diag = np.block([[q, zero], [zero, q]])  # orthogonal: Q^{-T} = Q
    return upper @ diag @ lower


def reversible_from_symplectic(w) -> np.ndarray:
    """Phi = (R W^{-1} R) W for symplectic W.

    Satisfies Phi = R Phi^{-1} R and symplecticity for any symplectic W, so
    the generated maps cover the constraint set without rejection sampling.
    """
    w = np.asarray(w, dtype=float)
    n = w.shape[0] // 2
    r = reversal_matrix(n)
    w_inv = linalg.symplectic_inverse(w)
    return r @ w_inv @ r @ w


def random_return_map(n: int, rng_seed, scale: float = 1.0) -> ReturnMapBlocks:
    """Random symmetric return map, valid at GENERATOR_TOL by construction.

    ``rng_seed`` may be anything numpy's default_rng accepts (int,
    SeedSequence, Generator); the stream is deterministic for a fixed seed.
    """
    rng = np.random.default_rng(rng_seed)
    w = random_symplectic(n, rng, scale)
    return ReturnMapBlocks.from_matrix(reversible_from_symplectic(w))


@dataclass(frozen=True)
class NondegeneracyReport:
    """det(Phi^k - I) for k = 1..k_max together with per-k verdicts.

    ``ok`` means every checked iterate cleared its threshold; ``c_invertible``
    reports |det C| > threshold.  Nondegeneracy at k = 1 and k = 2 forces C
    invertible (kernel vectors of C produce kernel vectors of Phi - I or of
    Phi^2 - I), so ``inconsistent`` flags the combination "k = 1, 2
    nondegenerate but C singular", which indicates a numerical contradiction
    in the input.
    """

    k_max: int
    det_values: list = field(default_factory=list)
    nondegenerate: list = field(default_factory=list)
    ok: bool = True
    c_invertible: bool = True
    c_det: float = 0.0
    inconsistent: bool = False

    def to_json(self) -> dict:
        return {
            "k_max": self.k_max,
            "det_values": list(self.det_values),
            "nondegenerate": list(self.nondegenerate),
            "ok": self.ok,
            "c_invertible": self.c_invertible,
            "c_det": self.c_det,
            "inconsistent": self.inconsistent,
        }


def nondegeneracy_check(
    blocks: ReturnMapBlocks,
    k_max: int,
    threshold: float | None = None,
) -> NondegeneracyReport:
    """Evaluate det(Phi^k - I) for k = 1..k_max with exact matrix powers.

    The default per-iterate threshold 1e-10 * max(1, ||Phi||_inf^k) follows
    the growth of determinant magnitudes with the power.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    phi = blocks.assemble()
    eye = np.eye(2 * blocks.n)
    norm = linalg.inf_norm(phi)
    dets = []
    flags = []
    power = eye
    for k in range(1, k_max + 1):
        power = power @ phi
        det_k = float(np.linalg.det(power - eye))
        thresh_k = threshold if threshold is not None else 1e-10 * max(1.0, norm**k)
        dets.append(det_k)
        flags.append(abs(det_k) > thresh_k)
    c_det = float(np.linalg.det(blocks.c))
    c_thresh = threshold if threshold is not None else 1e-10 * max(1.0, norm)
    c_invertible = abs(c_det) > c_thresh
    inconsistent = bool(
        len(flags) >= 2 and flags[0] and flags[1] and not c_invertible
    )
    return NondegeneracyReport(
        k_max=k_max,
        det_values=dets,
        nondegenerate=flags,
        ok=all(flags),
        c_invertible=c_invertible,
        c_det=c_det,
        inconsistent=inconsistent,
    )


def rotation_blocks(theta: float) -> ReturnMapBlocks:
    """n = 1 family (a, b, c, d) = (cos t, -sin t, sin t, cos t); the basic
    elliptic example used by tests and calibration."""
    a = np.array([[np.cos(theta)]])
    b = np.array([[-np.sin(theta)]])
    c = np.array([[np.sin(theta)]])
    return ReturnMapBlocks(1, a, b, c, a.copy())
