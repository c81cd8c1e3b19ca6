"""Request handlers shared by the HTTP endpoints and the CLI.

Each handler maps a validated request model to a response model; all domain
errors surface as MalformedInputError (bad input documents) or pass through
as SymindexError subclasses for the transport layer to translate.
"""

from __future__ import annotations

import numpy as np

from .. import linalg
from ..chebyshev import ChebKind, cheb_scalar
from ..errors import MalformedInputError, SymindexError
from ..hormander import (
    hormander_index_formula,
    hormander_index_quadratic_form,
)
from ..orbits import build_transverse_section, find_symmetric_orbit, reduced_monodromy
from ..returnmap import ReturnMapBlocks, validate_blocks
from ..systems import henon_heiles_brake_seed, parse_system_spec
from ..verify import run_verification
from .schemas import (
    ChebRequest,
    ChebResponse,
    ChebRowModel,
    IndexEntryModel,
    IndexRequest,
    IndexResponse,
    OrbitRequest,
    OrbitResponse,
    OrbitSummaryModel,
    TrialOutcomeModel,
    VerifyRequest,
    VerifyResponse,
)


def _blocks_from_model(model) -> ReturnMapBlocks:
    doc = {"n": model.n}
    if model.Phi is not None:
        doc["Phi"] = model.Phi
    else:
        doc.update({"A": model.A, "B": model.B, "C": model.C, "D": model.D})
    return ReturnMapBlocks.from_json(doc)


def _index_entries(blocks: ReturnMapBlocks, k_max: int, tol, method: str):
    """Per-iterate results; formula preconditions failing is data, not an
    exception, so errors are captured per entry."""
    phi = blocks.assemble()
    phi_norm = linalg.inf_norm(phi)
    entries = []
    methods = ("formula", "qform") if method == "both" else (method,)
    for k in range(1, k_max + 1):
        power = np.linalg.matrix_power(phi, k)
        det_k = float(np.linalg.det(power - np.eye(2 * blocks.n)))
        nondegenerate = bool(abs(det_k) > 1e-10 * max(1.0, phi_norm**k))
        for name in methods:
            try:
                if name == "formula":
                    result = hormander_index_formula(blocks, k, tol)
                else:
                    result = hormander_index_quadratic_form(power, tol, k=k)
                entries.append(
                    IndexEntryModel(
                        k=k,
                        method=name,
                        nondegenerate=nondegenerate,
                        s={"doubled": result.s.doubled},
                        sign_matrix_inertia=result.sign_matrix_inertia.to_json(),
                    )
                )
            except SymindexError as exc:
                entries.append(
                    IndexEntryModel(
                        k=k,
                        method=name,
                        nondegenerate=nondegenerate,
                        error=type(exc).__name__.removesuffix("Error"),
                    )
                )
    return entries


def handle_index(req: IndexRequest) -> IndexResponse:
    blocks = _blocks_from_model(req.blocks)
    report = validate_blocks(blocks, tol=1e-6)
    if not report.passed:
        raise MalformedInputError(
            f"blocks violate the return-map identities (max residual "
            f"{report.max_residual:.3e}); residuals: {report.residuals}"
        )
    return IndexResponse(
        tol=req.tol,
        n=blocks.n,
        results=_index_entries(blocks, req.k_max, req.tol, req.method),
    )


def handle_cheb(req: ChebRequest) -> ChebResponse:
    xs = np.linspace(req.x_min, req.x_max, req.points)
    rows = [
        ChebRowModel(
            k=req.k,
            x=float(x),
            t=cheb_scalar(ChebKind.FIRST, req.k, float(x)),
            u=cheb_scalar(ChebKind.SECOND, req.k, float(x)),
        )
        for x in xs
    ]
    return ChebResponse(rows=rows)


def handle_verify(req: VerifyRequest) -> VerifyResponse:
    report = run_verification(
        n=req.n,
        trials=req.trials,
        seed=req.seed,
        k_max=req.k_max,
        methods=tuple(req.methods),
        tol=req.tol,
        scale=req.scale,
        workers=req.workers,
    )
    return VerifyResponse(
        seed=req.seed,
        tol=req.tol,
        n=report.n,
        trials=report.trials,
        k_max=report.k_max,
        methods=list(report.methods),
        scale=report.scale,
        checked=report.checked,
        agreements=report.agreements,
        disagreements=[TrialOutcomeModel(**d.to_json()) for d in report.disagreements],
        skipped=report.skipped,
        ok=report.ok,
    )


def handle_orbit(req: OrbitRequest) -> OrbitResponse:
    sys = parse_system_spec(req.system)
    energy = req.energy
    if energy is None:
        energy = sys.meta.get("energy")
    seed_point = np.asarray(req.seed_point, dtype=float)
    if seed_point.shape != (sys.dim,):
        if sys.name == "henon-heiles" and seed_point.size == 0 and energy is not None:
            seed_point = henon_heiles_brake_seed(energy)
        else:
            raise MalformedInputError(
                f"seed point must have {sys.dim} components, got {seed_point.shape}"
            )
    fix_residual = linalg.inf_norm(sys.involution @ seed_point - seed_point)
    if fix_residual > 1e-9 * max(1.0, linalg.inf_norm(seed_point)):
        raise MalformedInputError(
            f"seed point is not on the fixed set of the involution "
            f"(residual {fix_residual:.3e})"
        )
    half_period = req.half_period
    if half_period is None:
        omega1 = sys.meta.get("omega1")
        half_period = np.pi / omega1 if omega1 else np.pi
    orbit = find_symmetric_orbit(
        sys, seed_point, half_period_guess=half_period, tol=req.tol, energy=energy
    )
    section = build_transverse_section(sys, orbit, rng_seed=req.section_seed)
    blocks = reduced_monodromy(sys, orbit, section, tol=req.tol)
    report = validate_blocks(blocks, tol=1e-6)
    return OrbitResponse(
        seed=req.section_seed,
        tol=req.tol,
        system=sys.name,
        orbit=OrbitSummaryModel(**orbit.to_json()),
        blocks=blocks.to_json(),
        block_residuals={k: float(v) for k, v in report.residuals.items()},
        indices=_index_entries(blocks, req.k_max, None, "formula"),
    )
