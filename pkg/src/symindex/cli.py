"""Command-line client for the index computations.

The CLI is a thin client over the service layer: flags build the same
request models the HTTP endpoints accept, execution happens in process by
default or against a remote server with --url, and the response models are
rendered to stdout (JSON, or CSV for the Chebyshev tables).

Exit codes: 0 success, 1 malformed input or failed computation,
2 oracle disagreement reported by `verify`.
"""

from __future__ import annotations

import argparse
import json
import sys

import pydantic

from . import __version__
from .errors import MalformedInputError, SymindexError
from .service import handlers
from .service.schemas import ChebRequest, IndexRequest, OrbitRequest, VerifyRequest

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DISAGREEMENT = 2


class _Parser(argparse.ArgumentParser):
    """argparse that exits with the input-error code instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="symindex",
        description="Indices of symmetric periodic orbits and their iterates.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--url", help="base URL of a running service; default runs in process")
    common.add_argument("--output", help="write the result here instead of stdout")

    p_index = sub.add_parser(
        "index", parents=[common],
        help="index of a return map and its iterates from blocks JSON",
    )
    p_index.add_argument(
        "--input", default="-",
        help="blocks JSON file ({n, A, B, C, D} or {n, Phi}); '-' reads stdin",
    )
    p_index.add_argument("--k-max", type=int, default=1)
    p_index.add_argument("--tol", type=float, default=None)
    p_index.add_argument("--method", choices=["formula", "qform", "both"], default="formula")

    p_cheb = sub.add_parser(
        "cheb", parents=[common], help="CSV table of T_k and U_k on a grid"
    )
    p_cheb.add_argument("--k", type=int, required=True)
    p_cheb.add_argument("--x-min", type=float, default=-1.0)
    p_cheb.add_argument("--x-max", type=float, default=1.0)
    p_cheb.add_argument("--points", type=int, default=21)

    p_verify = sub.add_parser(
        "verify", parents=[common],
        help="cross-check the three index methods on random return maps",
    )
    p_verify.add_argument("--n", type=int, required=True)
    p_verify.add_argument("--trials", type=int, required=True)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--k-max", type=int, default=6)
    p_verify.add_argument(
        "--methods", nargs="+", choices=["formula", "qform", "paths"],
        default=["formula", "qform", "paths"],
    )
    p_verify.add_argument("--tol", type=float, default=None)
    p_verify.add_argument("--scale", type=float, default=1.0)
    p_verify.add_argument("--workers", type=int, default=1)

    p_orbit = sub.add_parser(
        "orbit", parents=[common],
        help="find a symmetric periodic orbit and compute its indices",
    )
    p_orbit.add_argument(
        "--system", required=True,
        help="'oscillator:<omega1>:<omega2>' or 'henon-heiles:<energy>'",
    )
    p_orbit.add_argument(
        "--seed-point", default="[]",
        help="JSON vector on the fixed set; may be empty for henon-heiles "
        "with an energy (brake-orbit turning point is used)",
    )
    p_orbit.add_argument("--tol", type=float, default=1e-11)
    p_orbit.add_argument("--k-max", type=int, default=4)
    p_orbit.add_argument("--half-period", type=float, default=None)
    p_orbit.add_argument("--energy", type=float, default=None)
    p_orbit.add_argument("--section-seed", type=int, default=0)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


def _read_input(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise MalformedInputError(f"cannot read input: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(
            f"input is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from exc


def _dispatch(url: str | None, endpoint: str, request: pydantic.BaseModel) -> dict:
    """In-process call by default; HTTP POST against --url otherwise."""
    if url is None:
        handler = {
            "index": handlers.handle_index,
            "cheb": handlers.handle_cheb,
            "verify": handlers.handle_verify,
            "orbit": handlers.handle_orbit,
        }[endpoint]
        return handler(request).model_dump(mode="json")
    import httpx

    response = httpx.post(
        url.rstrip("/") + f"/v1/{endpoint}",
        json=request.model_dump(mode="json"),
        timeout=None,
    )
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise MalformedInputError(f"server returned {response.status_code}: {detail}")
    return response.json()


def _emit(text: str, output: str | None):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def _render_cheb_csv(doc: dict) -> str:
    lines = ["k,x,T,U"]
    for row in doc["rows"]:
        lines.append(f"{row['k']},{row['x']!r},{row['t']!r},{row['u']!r}")
    return "\n".join(lines) + "\n"


def _build_request(args) -> pydantic.BaseModel:
    if args.command == "index":
        doc = _read_input(args.input)
        if not isinstance(doc, dict):
            raise MalformedInputError("blocks document must be a JSON object")
        return IndexRequest(
            blocks=doc, k_max=args.k_max, tol=args.tol, method=args.method
        )
    if args.command == "cheb":
        return ChebRequest(
            k=args.k, x_min=args.x_min, x_max=args.x_max, points=args.points
        )
    if args.command == "verify":
        return VerifyRequest(
            n=args.n, trials=args.trials, seed=args.seed, k_max=args.k_max,
            methods=args.methods, tol=args.tol, scale=args.scale,
            workers=args.workers,
        )
    return OrbitRequest(
        system=args.system,
        seed_point=json.loads(args.seed_point),
        tol=args.tol,
        k_max=args.k_max,
        half_period=args.half_period,
        energy=args.energy,
        section_seed=args.section_seed,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return EXIT_OK

    try:
        request = _build_request(args)
    except (MalformedInputError, pydantic.ValidationError, json.JSONDecodeError) as exc:
        print(f"symindex: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        doc = _dispatch(args.url, args.command, request)
    except MalformedInputError as exc:
        print(f"symindex: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SymindexError as exc:
        print(
            f"symindex: {type(exc).__name__.removesuffix('Error')}: {exc}",
            file=sys.stderr,
        )
        return EXIT_INPUT

    text = _render_cheb_csv(doc) if args.command == "cheb" else _render_json(doc)
    _emit(text, args.output)
    if args.command == "verify" and not doc.get("ok", False):
        return EXIT_DISAGREEMENT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
