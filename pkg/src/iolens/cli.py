"""Command-line client for the analysis service.

Every subcommand builds a request for the HTTP service and writes the JSON
response. By default the requests run against an in-process instance of the
service; pass --server to talk to a remote one instead.

Subcommands:
  analyze  --masks F --detections F --phase F [--config F] --out F
  study    --manifest F [--config F] --out F [--boxplots-csv F]
  synth    --spec F --out DIR            (video spec or study group spec)
  eval     --pred F --gt F [--kind K] --out F
  serve    [--host H] [--port P]
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

import httpx


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _ClientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iolens", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute the kinematics report for one video")
    p.add_argument("--masks", required=True)
    p.add_argument("--detections", required=True)
    p.add_argument("--phase", required=True)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--server")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("study", help="run the cross-brand study over a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--boxplots-csv")
    p.add_argument("--server")
    p.set_defaults(func=_cmd_study)

    p = sub.add_parser("synth", help="generate synthetic video(s) from a spec file")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--server")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("eval", help="score prediction streams against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--kind", choices=["masks", "detections"])
    p.add_argument("--out", required=True)
    p.add_argument("--server")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)
    return parser


def _cmd_analyze(args) -> int:
    payload = {
        "masks": Path(args.masks).read_text(),
        "detections": Path(args.detections).read_text(),
        "phase": Path(args.phase).read_text(),
        "config": _load_config(args.config),
    }
    response = _post(args.server, "/analyze", payload)
    out = {**response["report"], "config": response["config"]}
    _write_json(args.out, out)
    return 0


def _cmd_study(args) -> int:
    manifest_path = Path(args.manifest).resolve()
    payload = {
        "manifest": json.loads(manifest_path.read_text()),
        "base_dir": str(manifest_path.parent),
        "config": _load_config(args.config),
    }
    response = _post(args.server, "/study", payload)
    csv_text = response.pop("boxplots_csv", None)
    _write_json(args.out, response)
    if args.boxplots_csv and csv_text is not None:
        Path(args.boxplots_csv).write_text(csv_text)
    return 0


def _cmd_synth(args) -> int:
    spec = json.loads(Path(args.spec).read_text())
    out_dir = str(Path(args.out).resolve())
    if "groups" in spec:
        response = _post(args.server, "/synth/study", {"groups": spec["groups"], "out_dir": out_dir})
    else:
        response = _post(args.server, "/synth", {"spec": spec, "out_dir": out_dir})
    print(json.dumps({k: v for k, v in response.items() if k != "ground_truth"}, indent=1))
    return 0


def _cmd_eval(args) -> int:
    payload = {
        "pred": Path(args.pred).read_text(),
        "gt": Path(args.gt).read_text(),
        "kind": args.kind,
    }
    response = _post(args.server, "/eval", payload)
    _write_json(args.out, response)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("iolens.service:app", host=args.host, port=args.port)
    return 0


class _ClientError(Exception):
    pass


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    return json.loads(Path(path).read_text())


def _post(server: str | None, route: str, payload: dict) -> dict:
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            response = client.post(route, json=payload)
    else:
        response = asyncio.run(_post_in_process(route, payload))
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise _ClientError(f"{route} failed ({response.status_code}): {detail}")
    return response.json()


async def _post_in_process(route: str, payload: dict) -> httpx.Response:
    from .service import create_app

    transport = httpx.ASGITransport(app=create_app())
    async with httpx.AsyncClient(
        transport=transport, base_url="http://iolens.local", timeout=600.0
    ) as client:
        return await client.post(route, json=payload)


def _write_json(path: str, obj: dict) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


if __name__ == "__main__":
    sys.exit(main())
