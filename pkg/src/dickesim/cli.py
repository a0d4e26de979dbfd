"""Command line front end: a thin client of the HTTP service.

Subcommands spectrum / entropy / wigner / poincare validate the JSON
config, post it to the service (in-process by default, remote with
--server), and write the returned artifacts plus the manifest under the
output directory. `serve` starts the HTTP server itself.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import random
import sys
from pathlib import Path

import httpx
import numpy as np

from .config import ConfigError, parse_config


def _post_in_process(path: str, payload: dict) -> httpx.Response:
    from .service import app

    async def go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://dickesim.local", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def _post(path: str, payload: dict, server: str | None) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.post(path, json=payload)
    return _post_in_process(path, payload)


def _rng_fingerprint() -> tuple:
    state = np.random.get_state()
    return (random.getstate(), state[0], state[1].tobytes(), state[2:])


def _run_command(args: argparse.Namespace) -> int:
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    fingerprint = _rng_fingerprint() if args.seedless else None

    payload = {"config": cfg.model_dump(), "threads": args.threads}
    response = _post(f"/{args.command}", payload, args.server)
    if response.status_code != 200:
        print(f"error: service returned {response.status_code}: {response.text}",
              file=sys.stderr)
        return 1
    body = response.json()

    if fingerprint is not None and not args.server:
        if _rng_fingerprint() != fingerprint:
            print("error: --seedless violated: global RNG state changed during the run",
                  file=sys.stderr)
            return 1

    out_dir = Path(args.out or cfg.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    for artifact in body["files"]:
        (out_dir / artifact["name"]).write_text(artifact["content"])
        print(f"wrote {out_dir / artifact['name']}")
    manifest_path = out_dir / f"manifest_{args.command}.json"
    manifest_path.write_text(json.dumps(body["manifest"], indent=2, sort_keys=True) + "\n")
    print(f"wrote {manifest_path}")
    return 0


def _serve_command(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dickesim",
        description="Dicke model simulator: spectra, entanglement dynamics, "
                    "spin Wigner functions, Poincare sections",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (
        ("spectrum", "write the full eigenvalue spectrum"),
        ("entropy", "write atomic linear entropy time series"),
        ("wigner", "write spin Wigner function snapshots"),
        ("poincare", "write classical Poincare section points"),
    ):
        cmd = sub.add_parser(name, help=helptext)
        cmd.add_argument("--config", required=True, help="JSON run configuration")
        cmd.add_argument("--out", default=None, help="output directory")
        cmd.add_argument("--threads", type=int, default=0,
                         help="worker threads for independent jobs (0 = auto)")
        cmd.add_argument("--seedless", action="store_true",
                         help="assert that the run never touches global RNG state")
        cmd.add_argument("--server", default=None,
                         help="base URL of a running service (default: in-process)")
        cmd.set_defaults(func=_run_command)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=_serve_command)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
