"""Thin command-line client for the certificate service.

Each subcommand maps to one service operation.  Without --server the
request is handled in process by the same functions that back the HTTP
endpoints; with --server it is posted to a running instance.  Exit codes:
0 for CONSISTENT or INCONCLUSIVE outcomes, 2 for a VIOLATION, 1 for any
input or transport error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from pydantic import ValidationError

from .errors import CopcertError
from .schemas import RunConfig

SUBCOMMAND_PATHS = {
    "report": "/v1/report",
    "certify-subnormal": "/v1/certify/subnormal",
    "certify-cosubnormal": "/v1/certify/cosubnormal",
    "norm": "/v1/norm",
    "tower": "/v1/tower",
    "density": "/v1/density",
    "falsify": "/v1/falsify",
}

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_VIOLATION = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="copcert", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in [
        ("report", "classification plus the certificate pipeline for the configured side"),
        ("certify-subnormal", "subnormality certificate on the direct-side space"),
        ("certify-cosubnormal", "cosubnormality certificate on the reciprocal-side space"),
        ("norm", "boundedness classification and operator norm"),
        ("tower", "truncation-tower norms for every test function"),
        ("density", "pushforward density values at sample points"),
        ("falsify", "Bram-form eigenvalue search against a non-normal bounded symbol"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the JSON run configuration")
        p.add_argument("--out", help="write the JSON result here instead of stdout")
        p.add_argument("--seed", type=int, help="override the configured RNG seed")
        p.add_argument("--tol", type=float, help="override the PSD tolerance")
        p.add_argument("--hankel-order", type=int, help="override the Hankel order")
        p.add_argument("--server", help="base URL of a running service, e.g. http://localhost:8000")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _load_config(args) -> RunConfig:
    try:
        raw = json.loads(Path(args.config).read_text())
    except OSError as exc:
        raise CopcertError(f"config: cannot read {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CopcertError(f"config: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        cfg = RunConfig(**raw)
    except ValidationError as exc:
        locs = "; ".join(
            "{}: {}".format(".".join(str(p) for p in err["loc"]), err["msg"])
            for err in exc.errors()
        )
        raise CopcertError(f"config: {locs}") from exc
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.hankel_order is not None:
        updates["hankel_order"] = args.hankel_order
    if args.tol is not None:
        updates["tolerances"] = cfg.tolerances.model_copy(update={"psd": args.tol})
    return cfg.model_copy(update=updates) if updates else cfg


def _dispatch(command: str, cfg: RunConfig, server: str | None) -> dict:
    if server:
        import httpx

        url = server.rstrip("/") + SUBCOMMAND_PATHS[command]
        resp = httpx.post(url, json=cfg.model_dump(), timeout=None)
        if resp.status_code != 200:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise CopcertError(f"server returned {resp.status_code}: {detail}")
        return resp.json()
    from .service import HANDLERS

    return HANDLERS[command](cfg).model_dump()


def _exit_code(command: str, doc: dict) -> int:
    if command in ("report", "certify-subnormal", "certify-cosubnormal"):
        if doc["certificate"]["verdict"] == "VIOLATION":
            return EXIT_VIOLATION
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    try:
        cfg = _load_config(args)
        doc = _dispatch(args.command, cfg, args.server)
    except (CopcertError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    payload = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(payload)
    else:
        sys.stdout.write(payload)
    return _exit_code(args.command, doc)


if __name__ == "__main__":
    sys.exit(main())
