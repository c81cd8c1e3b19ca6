"""Batch cross-verification of the index methods on random return maps.

For each trial a random symmetric return map is generated from a
deterministic per-trial seed; for each iterate k up to k_max that passes
the eligibility screen (nondegenerate, C U_{k-1}(A) and U_{k-1}(A)
invertible, sign matrix nonsingular, endpoint comfortably off the Maslov
cycle), the requested methods are evaluated and their half-integer outputs
compared exactly.  Results are assembled in trial order regardless of the
worker count, so a report is a deterministic function of (n, trials, k_max,
seed, methods, tol, scale).
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import SymindexError
from .hormander import (
    hormander_index_formula,
    hormander_index_quadratic_form,
)
from .maslov import (
    diagonal_frame,
    doubled_frame,
    graph_frame,
    hormander_via_paths,
    horizontal_frame,
)
from .returnmap import random_return_map

METHOD_NAMES = ("formula", "qform", "paths")

# Endpoint separation required from both Maslov cycles before the path
# method is attempted (smallest singular value of the concatenated frames).
ENDPOINT_MARGIN = 1e-5


@dataclass
class TrialOutcome:
    trial: int
    n: int
    checked_k: list = field(default_factory=list)
    skipped_k: dict = field(default_factory=dict)  # k -> reason
    values: dict = field(default_factory=dict)  # k -> {method: doubled}
    agreed: bool = True
    blocks_json: dict | None = None

    def to_json(self) -> dict:
        return {
            "trial": self.trial,
            "n": self.n,
            "checked_k": list(self.checked_k),
            "skipped_k": {str(k): v for k, v in sorted(self.skipped_k.items())},
            "values": {
                str(k): dict(sorted(v.items())) for k, v in sorted(self.values.items())
            },
            "agreed": self.agreed,
            "blocks": self.blocks_json,
        }


def trial_seed(base_seed: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(trial),))


def endpoint_margins(phi) -> tuple[float, float]:
    """Smallest singular values of the concatenated orthonormal frames of
    Gr(Phi) against the diagonal and against L x L."""
    n = phi.shape[0] // 2
    gr = graph_frame(phi, tol=1e-6).frame
    qg, _ = np.linalg.qr(gr)
    margins = []
    for other in (diagonal_frame(n).frame, doubled_frame(horizontal_frame(n)).frame):
        qo, _ = np.linalg.qr(other)
        pair = np.concatenate([qg, qo], axis=1)
        margins.append(float(np.linalg.svd(pair, compute_uv=False)[-1]))
    return margins[0], margins[1]


def run_trial(
    trial: int,
    n: int,
    base_seed: int,
    k_max: int,
    methods: tuple[str, ...],
    tol: float | None,
    scale: float,
) -> TrialOutcome:
    seq = trial_seed(base_seed, trial)
    gen_seed, path_seed_root = seq.spawn(2)
    blocks = random_return_map(n, rng_seed=gen_seed, scale=scale)
    outcome = TrialOutcome(trial=trial, n=n)
    phi = blocks.assemble()
    phi_norm = linalg.inf_norm(phi)
    path_children = path_seed_root.spawn(k_max)

    for k in range(1, k_max + 1):
        power = np.linalg.matrix_power(phi, k)
        det_k = float(np.linalg.det(power - np.eye(2 * n)))
        if abs(det_k) <= 1e-10 * max(1.0, phi_norm**k):
            outcome.skipped_k[k] = "degenerate_iterate"
            continue
        try:
            formula = hormander_index_formula(blocks, k, tol)
        except SymindexError as exc:
            outcome.skipped_k[k] = f"formula_precondition:{type(exc).__name__}"
            continue
        if "paths" in methods:
            margin_diag, margin_lxl = endpoint_margins(power)
            if min(margin_diag, margin_lxl) < ENDPOINT_MARGIN:
                outcome.skipped_k[k] = "endpoint_margin"
                continue
        values = {"formula": formula.s.doubled}
        try:
            if "qform" in methods:
                values["qform"] = hormander_index_quadratic_form(power, tol, k=k).s.doubled
            if "paths" in methods:
                values["paths"] = hormander_via_paths(power, path_children[k - 1]).s.doubled
        except SymindexError as exc:
            outcome.skipped_k[k] = f"oracle_failure:{type(exc).__name__}"
            continue
        outcome.checked_k.append(k)
        outcome.values[k] = values
        if len(set(values.values())) != 1:
            outcome.agreed = False
    if not outcome.agreed:
        outcome.blocks_json = blocks.to_json()
    return outcome


@dataclass
class VerifyReport:
    n: int
    trials: int
    k_max: int
    seed: int
    methods: tuple[str, ...]
    tol: float | None
    scale: float
    checked: int = 0
    agreements: int = 0
    disagreements: list = field(default_factory=list)
    skipped: dict = field(default_factory=dict)  # reason -> count

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "k_max": self.k_max,
            "seed": self.seed,
            "methods": list(self.methods),
            "tol": self.tol,
            "scale": self.scale,
            "checked": self.checked,
            "agreements": self.agreements,
            "disagreements": [d.to_json() for d in self.disagreements],
            "skipped": dict(sorted(self.skipped.items())),
        }

    @property
    def ok(self) -> bool:
        return not self.disagreements


def run_verification(
    n: int,
    trials: int,
    seed: int,
    k_max: int = 6,
    methods: tuple[str, ...] = METHOD_NAMES,
    tol: float | None = None,
    scale: float = 1.0,
    workers: int = 1,
) -> VerifyReport:
    """Compare the requested methods over ``trials`` random maps.

    The outcome is independent of ``workers``: trial computations only
    depend on per-trial seeds and results are assembled in trial order.
    """
    if n < 1 or trials < 1 or k_max < 1:
        raise ValueError("n, trials and k_max must all be >= 1")
    bad = [m for m in methods if m not in METHOD_NAMES]
    if bad:
        raise ValueError(f"unknown methods {bad}; valid: {METHOD_NAMES}")
    if "formula" not in methods:
        methods = ("formula", *methods)  # the formula is the reference

    report = VerifyReport(
        n=n, trials=trials, k_max=k_max, seed=seed,
        methods=tuple(methods), tol=tol, scale=scale,
    )
    args = [(t, n, seed, k_max, tuple(methods), tol, scale) for t in range(trials)]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_trial_star, args, chunksize=8))
    else:
        outcomes = [_run_trial_star(a) for a in args]

    for outcome in outcomes:
        report.checked += len(outcome.checked_k)
        agreed_count = sum(
            1 for k in outcome.checked_k if len(set(outcome.values[k].values())) == 1
        )
        report.agreements += agreed_count
        if not outcome.agreed:
            report.disagreements.append(outcome)
        for reason in outcome.skipped_k.values():
            report.skipped[reason] = report.skipped.get(reason, 0) + 1
    return report


def _run_trial_star(args):
    return run_trial(*args)
