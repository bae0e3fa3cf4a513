"""Command-line client for the clearing service.

The CLI is a thin HTTP client: every subcommand builds a request, posts it to
the service API, and writes the response to disk.  By default requests are
dispatched to the service application in-process (no server needed); pass
``--server http://host:port`` to target a running instance instead.

Subcommands: ``solve``, ``counterexample``, ``sweep``, ``montecarlo``,
``diversify``, ``eba``.  Exit codes: 0 on success, 1 when any solve in the
output failed to converge, 2 on input errors.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import io
import json
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_NONCONVERGED = 1
EXIT_INPUT = 2


class ClientError(Exception):
    """Input or transport problem; maps to exit code 2."""


class ServiceClient:
    """Posts JSON payloads either to an in-process ASGI app or a remote URL."""

    def __init__(self, server: str | None = None):
        self.server = server.rstrip("/") if server else None

    def post(self, path: str, payload: dict) -> dict:
        if self.server:
            response = httpx.post(self.server + path, json=payload, timeout=None)
        else:
            response = asyncio.run(self._post_inprocess(path, payload))
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise ClientError(f"{path} failed ({response.status_code}): {detail}")
        return response.json()

    @staticmethod
    async def _post_inprocess(path: str, payload: dict) -> httpx.Response:
        from .service import create_app

        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://fireclear", timeout=None
        ) as client:
            return await client.post(path, json=payload)


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        raise ClientError(f"cannot read JSON config {path}: {exc}")


def _load_config(args) -> dict:
    return _load_json(args.config) if getattr(args, "config", None) else {}


def _solver_options(args, config: dict) -> dict:
    options = dict(config.get("options", {}))
    if args.tolerance is not None:
        options["tolerance"] = args.tolerance
    if args.max_iter is not None:
        options["max_iterations"] = args.max_iter
    return options


def _write_json(data: dict, outdir: Path | None, name: str) -> None:
    text = json.dumps(data, indent=2) + "\n"
    if outdir is None:
        sys.stdout.write(text)
    else:
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / name).write_text(text, encoding="utf-8")
        print(f"wrote {outdir / name}")


def _write_table(result: dict, outdir: Path | None) -> None:
    columns, rows = result["columns"], result["rows"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format_cell(row.get(c, "")) for c in columns])
    if outdir is None:
        sys.stdout.write(buf.getvalue())
        return
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "results.csv").write_text(buf.getvalue(), encoding="utf-8")
    (outdir / "scenario.json").write_text(
        json.dumps({"scenario": result["scenario"], **result["meta"]}, indent=2) + "\n",
        encoding="utf-8",
    )
    written = [outdir / "results.csv", outdir / "scenario.json"]
    if result.get("summary") is not None:
        (outdir / "summary.json").write_text(
            json.dumps(result["summary"], indent=2) + "\n", encoding="utf-8"
        )
        written.append(outdir / "summary.json")
    for path in written:
        print(f"wrote {path}")


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "True" if value else "False"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _table_exit(result: dict) -> int:
    ok = all(bool(row.get("converged", False)) for row in result["rows"])
    return EXIT_OK if ok else EXIT_NONCONVERGED


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_solve(args, client: ServiceClient) -> int:
    config = _load_config(args)
    if "system" in config:
        system = config["system"]
    elif "system_path" in config:
        system = _load_json(config["system_path"])
    elif args.system:
        system = _load_json(args.system)
    else:
        raise ClientError("solve needs a system: --system FILE or config with system/system_path")
    if "idf" in config:
        idf = config["idf"]
    elif args.idf:
        idf = _load_json(args.idf)
    else:
        raise ClientError("solve needs an inverse demand config: --idf FILE or config with idf")
    payload = {
        "system": system,
        "idf": idf,
        "direction": args.direction or config.get("direction", "greatest"),
        "options": _solver_options(args, config),
        "include_trace": args.trace,
    }
    result = client.post("/solve", payload)
    _write_json(result, args.out, "solve.json")
    return EXIT_OK if result["report"]["converged"] else EXIT_NONCONVERGED


def _cmd_counterexample(args, client: ServiceClient) -> int:
    config = _load_config(args)
    result = client.post("/counterexample", {"options": _solver_options(args, config)})
    _write_json(result, args.out, "counterexample.json")
    converged = result["greatest"]["converged"] and result["least"]["converged"]
    return EXIT_OK if converged else EXIT_NONCONVERGED


def _cmd_sweep(args, client: ServiceClient) -> int:
    config = _load_config(args)
    payload = {k: v for k, v in config.items() if k != "options"}
    payload["options"] = _solver_options(args, config)
    if args.seed is not None:
        payload["seed"] = args.seed
    result = client.post("/scenarios/sweep", payload)
    _write_table(result, args.out)
    return _table_exit(result)


def _cmd_montecarlo(args, client: ServiceClient) -> int:
    config = _load_config(args)
    payload = {k: v for k, v in config.items() if k != "options"}
    payload["options"] = _solver_options(args, config)
    if args.seed is not None:
        payload["seed"] = args.seed
    result = client.post("/scenarios/montecarlo", payload)
    _write_table(result, args.out)
    return _table_exit(result)


def _cmd_diversify(args, client: ServiceClient) -> int:
    config = _load_config(args)
    payload = {k: v for k, v in config.items() if k != "options"}
    payload["options"] = _solver_options(args, config)
    result = client.post("/scenarios/diversify", payload)
    _write_table(result, args.out)
    return _table_exit(result)


def _cmd_eba(args, client: ServiceClient) -> int:
    config = _load_config(args)
    payload = {k: v for k, v in config.items() if k not in ("options", "csv_path")}
    csv_path = args.csv or config.get("csv_path")
    if csv_path:
        try:
            payload["csv_text"] = Path(csv_path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ClientError(f"cannot read CSV {csv_path}: {exc}")
    if args.tolerance is not None:
        payload["tolerance"] = args.tolerance
    if args.max_iter is not None:
        payload["max_iterations"] = args.max_iter
    result = client.post("/scenarios/eba", payload)
    _write_table(result, args.out)
    return _table_exit(result)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fireclear",
        description="Clearing equilibria for contagion networks with endogenous market liquidity.",
    )
    parser.add_argument("--server", help="service URL; default runs the service in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with request fields")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--out", type=Path, help="output directory (default: stdout)")
        p.add_argument("--tolerance", type=float, help="solver tolerance")
        p.add_argument("--max-iter", type=int, help="solver iteration cap")
        p.add_argument("--trace", action="store_true", help="include the default-set trace")

    p = sub.add_parser("solve", help="solve one clearing problem")
    common(p)
    p.add_argument("--system", help="system JSON file")
    p.add_argument("--idf", help="inverse demand JSON file")
    p.add_argument("--direction", choices=["greatest", "least", "fda"])
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("counterexample", help="built-in two-bank non-uniqueness demo")
    common(p)
    p.set_defaults(func=_cmd_counterexample)

    p = sub.add_parser("sweep", help="shock sweep on one random liability draw")
    common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("montecarlo", help="ensemble of random networks at one shock level")
    common(p)
    p.set_defaults(func=_cmd_montecarlo)

    p = sub.add_parser("diversify", help="two-bank portfolio-overlap study")
    common(p)
    p.set_defaults(func=_cmd_diversify)

    p = sub.add_parser("eba", help="liquid-fraction sweep over a balance-sheet CSV")
    common(p)
    p.add_argument("--csv", help="balance-sheet CSV (default: bundled synthetic data)")
    p.set_defaults(func=_cmd_eba)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    client = ServiceClient(args.server)
    try:
        return args.func(args, client)
    except ClientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
